//! Enumeration of the subspace lattice of `F_p^d` and the audit of singular
//! matrix subspaces: dimension bound `n² − n` and the kernel-type /
//! image-type dichotomy at that dimension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::{modp, Matrix};
use crate::packed::{self, Odometer};
use crate::subspace::{MatrixSubspace, MaximalSingularType, SingularityVerdict};

/// Largest lattice that is scanned in full.
pub const FULL_SCAN_LIMIT: u128 = 100_000;

/// Number of `k`-dimensional subspaces of `F_q^d`.
pub fn gaussian_binomial(d: usize, k: usize, q: u64) -> u128 {
    if k > d {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.saturating_mul(q.saturating_pow((d - i) as u32) - 1);
        den = den.saturating_mul(q.saturating_pow((i + 1) as u32) - 1);
    }
    num / den
}

/// Calls `visit` with the row-major `k x d` reduced echelon basis of every
/// `k`-dimensional subspace of `F_p^d`.
pub fn for_each_subspace(p: u32, d: usize, k: usize, mut visit: impl FnMut(&[u32])) {
    for pivots in combinations(d, k) {
        for_each_with_pivots(p, d, &pivots, &mut visit);
    }
}

/// All `k`-subsets of `0..d`, in lexicographic order.
pub fn combinations(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

fn for_each_with_pivots(p: u32, d: usize, pivots: &[usize], visit: &mut impl FnMut(&[u32])) {
    let k = pivots.len();
    // free slots: row r, column j > pivot r that is not itself a pivot
    let free: Vec<usize> = (0..k)
        .flat_map(|r| ((pivots[r] + 1)..d).filter(|j| !pivots.contains(j)).map(move |j| r * d + j))
        .collect();
    let mut rows = vec![0u32; k * d];
    for (r, &c) in pivots.iter().enumerate() {
        rows[r * d + c] = 1;
    }
    let mut odo = Odometer::new(free.len(), p);
    while odo.advance().is_some() {
        for (slot, &v) in free.iter().zip(odo.digits()) {
            rows[*slot] = v;
        }
        visit(&rows);
    }
}

/// Whether the span of the `k` vectorized `n x n` matrices in `rows`
/// contains no invertible matrix.
pub fn is_singular_span(rows: &[u32], k: usize, n: usize, p: u32) -> bool {
    !any_member(rows, k, n, p, true)
}

/// Whether every nonzero member of the span is invertible.
pub fn is_nonsingular_span(rows: &[u32], k: usize, n: usize, p: u32) -> bool {
    !any_member(rows, k, n, p, false)
}

/// Whether some nonzero member has invertibility `invertible`.
fn any_member(rows: &[u32], k: usize, n: usize, p: u32, invertible: bool) -> bool {
    let nn = n * n;
    let mut odo = Odometer::new(k, p);
    let mut buf = vec![0u32; nn];
    let mut scratch = Vec::new();
    odo.advance();
    while odo.advance().is_some() {
        buf.iter_mut().for_each(|x| *x = 0);
        for (r, &c) in odo.digits().iter().enumerate() {
            if c != 0 {
                for (x, y) in buf.iter_mut().zip(&rows[r * nn..(r + 1) * nn]) {
                    *x = ((*x as u64 + c as u64 * *y as u64) % p as u64) as u32;
                }
            }
        }
        if packed::is_invertible_vec(&buf, n, p, &mut scratch) == invertible {
            return true;
        }
    }
    false
}

/// The subspace spanned by vectorized rows.
pub fn subspace_from_rows(field: FieldSpec, n: usize, rows: &[u32]) -> Result<MatrixSubspace> {
    let nn = n * n;
    let mats: Vec<Matrix> = rows
        .chunks(nn)
        .map(|r| Matrix::unvec(&Matrix::from_residues(field, nn, 1, r), n))
        .collect::<Result<_>>()?;
    MatrixSubspace::from_basis(field, n, &mats)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionCount {
    pub dim: usize,
    pub subspaces: u64,
    /// Gaussian binomial count, for full scans.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<u64>,
    pub singular: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DieudonneReport {
    pub field: FieldSpec,
    pub n: usize,
    /// `exhaustive` or `sampled`.
    pub mode: String,
    pub total_subspaces: u64,
    pub per_dimension: Vec<DimensionCount>,
    pub bound: usize,
    pub max_singular_dim: usize,
    pub maximal_singular: u64,
    pub kernel_type: u64,
    pub image_type: u64,
    pub anomalies: Vec<String>,
}

#[derive(Default)]
struct Tally {
    subspaces: u64,
    singular: u64,
    kernel: u64,
    image: u64,
    anomalies: Vec<String>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.subspaces += other.subspaces;
        self.singular += other.singular;
        self.kernel += other.kernel;
        self.image += other.image;
        self.anomalies.extend(other.anomalies);
        self
    }

    fn record_maximal(&mut self, v: &MatrixSubspace) {
        match v.classify_maximal_singular() {
            Ok(MaximalSingularType::KernelType(x)) => {
                self.kernel += 1;
                if !v.basis().iter().all(|b| b.mul(&x).map(|y| y.is_zero()).unwrap_or(false)) {
                    self.anomalies.push(format!("kernel vector {x} not killed by {v:?}"));
                }
            }
            Ok(MaximalSingularType::ImageType(y)) => {
                self.image += 1;
                if !v.basis().iter().all(|b| y.transpose().mul(b).map(|z| z.is_zero()).unwrap_or(false)) {
                    self.anomalies.push(format!("normal vector {y} not orthogonal to {v:?}"));
                }
            }
            Err(e) => self.anomalies.push(format!("maximal singular subspace without a unique type: {e}")),
        }
    }
}

/// Checks that singular subspaces of `M_n(K)` have dimension at most
/// `n² − n` and that those of dimension `n² − n` are kernel-type or
/// image-type, never both.
///
/// Finite fields with at most [`FULL_SCAN_LIMIT`] subspaces of `M_n` are
/// scanned in full; otherwise `budget.samples` random subspaces per
/// dimension are drawn, together with random maximal singular subspaces.
pub fn dieudonne_audit(field: FieldSpec, n: usize, budget: &Budget) -> Result<DieudonneReport> {
    if n < 2 {
        return Err(Error::Precondition("the dimension bound is stated for n >= 2".into()));
    }
    let d = n * n;
    let bound = d - n;
    let lattice_size = field
        .order()
        .map(|q| (0..=d).map(|k| gaussian_binomial(d, k, q)).sum::<u128>());
    let (mode, per_dim) = match (field.modulus(), lattice_size) {
        (Some(p), Some(size)) if size <= FULL_SCAN_LIMIT => {
            budget.check(packed::pow_sat(p as u64, d))?;
            ("exhaustive", full_scan(field, p, n)?)
        }
        _ => ("sampled", sampled_scan(field, n, budget)?),
    };
    let mut report = DieudonneReport {
        field,
        n,
        mode: mode.to_string(),
        total_subspaces: 0,
        per_dimension: Vec::new(),
        bound,
        max_singular_dim: 0,
        maximal_singular: 0,
        kernel_type: 0,
        image_type: 0,
        anomalies: Vec::new(),
    };
    for (k, tally) in per_dim.into_iter().enumerate() {
        let expected = (mode == "exhaustive").then(|| gaussian_binomial(d, k, field.order().unwrap()) as u64);
        if let Some(e) = expected {
            if e != tally.subspaces {
                report.anomalies.push(format!("dimension {k}: scanned {} subspaces, expected {e}", tally.subspaces));
            }
        }
        if tally.singular > 0 {
            report.max_singular_dim = report.max_singular_dim.max(k);
            if k > bound {
                report.anomalies.push(format!("{} singular subspaces of dimension {k} > {bound}", tally.singular));
            }
        }
        if k == bound {
            report.maximal_singular = tally.singular;
        }
        report.kernel_type += tally.kernel;
        report.image_type += tally.image;
        report.total_subspaces += tally.subspaces;
        report.anomalies.extend(tally.anomalies);
        report.per_dimension.push(DimensionCount { dim: k, subspaces: tally.subspaces, expected, singular: tally.singular });
    }
    if report.kernel_type + report.image_type != report.maximal_singular && mode == "exhaustive" {
        report.anomalies.push("maximal singular subspaces do not split into the two types".into());
    }
    Ok(report)
}

fn full_scan(field: FieldSpec, p: u32, n: usize) -> Result<Vec<Tally>> {
    let d = n * n;
    let bound = d - n;
    let mut out = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let tally = combinations(d, k)
            .into_par_iter()
            .map(|pivots| {
                let mut t = Tally::default();
                for_each_with_pivots(p, d, &pivots, &mut |rows: &[u32]| {
                    t.subspaces += 1;
                    if is_singular_span(rows, k, n, p) {
                        t.singular += 1;
                        if k == bound {
                            match subspace_from_rows(field, n, rows) {
                                Ok(v) => t.record_maximal(&v),
                                Err(e) => t.anomalies.push(e.to_string()),
                            }
                        }
                    }
                });
                t
            })
            .reduce(Tally::default, Tally::merge);
        out.push(tally);
    }
    Ok(out)
}

fn random_subspace(field: FieldSpec, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<MatrixSubspace> {
    loop {
        let mats: Vec<Matrix> = (0..k).map(|_| Matrix::random(field, n, n, rng, 3)).collect();
        let v = MatrixSubspace::from_basis(field, n, &mats)?;
        if v.dim() == k {
            return Ok(v);
        }
    }
}

fn random_nonzero_vector(field: FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let v = Matrix::random(field, n, 1, rng, 3);
        if !v.is_zero() {
            return v;
        }
    }
}

fn sampled_scan(field: FieldSpec, n: usize, budget: &Budget) -> Result<Vec<Tally>> {
    let d = n * n;
    let bound = d - n;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut out: Vec<Tally> = (0..=d).map(|_| Tally::default()).collect();
    for k in (bound.saturating_sub(1))..=(bound + 1).min(d) {
        for _ in 0..budget.samples {
            let v = random_subspace(field, n, k, &mut rng)?;
            let t = &mut out[k];
            t.subspaces += 1;
            if matches!(v.is_singular(budget)?, SingularityVerdict::Singular) {
                t.singular += 1;
                if k == bound {
                    t.record_maximal(&v);
                }
            }
        }
    }
    // maximal singular subspaces are rare among random ones; add constructed
    // examples moved around by random invertible P, Q
    for _ in 0..budget.samples {
        let x = random_nonzero_vector(field, n, &mut rng);
        let kernel_type = rng.gen_bool(0.5);
        let base = if kernel_type { MatrixSubspace::make_ld(&x)? } else { MatrixSubspace::make_lh(&x)? };
        let p = Matrix::random_invertible(field, n, &mut rng, 3);
        let q = Matrix::random_invertible(field, n, &mut rng, 3);
        let moved: Vec<Matrix> = base.basis().iter().map(|b| p.mul(b)?.mul(&q)).collect::<Result<_>>()?;
        let v = MatrixSubspace::from_basis(field, n, &moved)?;
        let t = &mut out[bound];
        t.subspaces += 1;
        if matches!(v.is_singular(budget)?, SingularityVerdict::Singular) {
            t.singular += 1;
            t.record_maximal(&v);
        } else {
            t.anomalies.push(format!("image of a maximal singular subspace under M -> PMQ is not singular: {v:?}"));
        }
        let mut extra = moved.clone();
        extra.push(Matrix::identity(field, n));
        let bigger = MatrixSubspace::from_basis(field, n, &extra)?;
        if matches!(bigger.is_singular(budget)?, SingularityVerdict::Singular) {
            out[bound + 1].anomalies.push("singular subspace above the bound".into());
        }
    }
    Ok(out)
}

/// Rank of a row-major residue matrix.
pub fn rank_mod_p(rows: &[u32], r: usize, c: usize, p: u32) -> usize {
    let mut a = rows.to_vec();
    modp::rref(&mut a, r, c, p).len()
}
