//! Exact linear algebra for classifying linear maps on `M_n(K)` that send
//! invertible matrices to invertible matrices.
//!
//! Scalars live in GF(p) or ℚ and all arithmetic is exact.

pub mod budget;
pub mod division;
pub mod error;
pub mod field;
pub mod harness;
mod intdet;
pub mod lattice;
pub mod matrix;
pub mod mpoly;
pub mod packed;
pub mod poly;
pub mod preserver;
pub mod report;
pub mod subspace;

pub use budget::Budget;
pub use division::{DivisionAlgebraSpec, DivisionVerdict, NonSingularityCertificate, Preset};
pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use matrix::Matrix;
pub use mpoly::MPoly;
pub use poly::{Irreducibility, Polynomial};
pub use preserver::{MatEndo, PinchData, PreservationVerdict, PreserverClassification};
pub use subspace::{FullNonsingularVerdict, MatrixSubspace, MaximalSingularType, Refutation, SingularityVerdict};
