use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mpoly::DEFAULT_MONOMIAL_CAP;

/// Default cap on exhaustive enumerations.
pub const DEFAULT_LIMIT: u64 = 1 << 24;

/// Work limits and seeding shared by every search routine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum number of items an exhaustive scan may visit.
    pub limit: u64,
    /// Number of random samples for the non-exhaustive paths.
    pub samples: u64,
    pub seed: u64,
    /// Maximum number of monomials in a generic determinant expansion.
    pub monomial_cap: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { limit: DEFAULT_LIMIT, samples: 1000, seed: 0, monomial_cap: DEFAULT_MONOMIAL_CAP }
    }
}

impl Budget {
    pub fn with_limit(mut self, limit: u64) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn allows(&self, needed: u128) -> bool {
        needed <= self.limit as u128
    }

    pub fn check(&self, needed: u128) -> Result<()> {
        if self.allows(needed) {
            Ok(())
        } else {
            Err(Error::BudgetExceeded { needed, budget: self.limit })
        }
    }
}
