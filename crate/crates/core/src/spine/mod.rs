//! Blockings, b-solutions, the prespinal/spineless decision, and the
//! conditions on shifted powers of `K`.

use thiserror::Error;

mod blocking;
mod farkas;
mod prespinal;
mod star;

pub use blocking::{enumerate_blockings, Blocking};
pub use farkas::{find_positive_orthogonal, verify_farkas, FarkasOutcome};
pub use prespinal::{
    classify_prespinal, find_b_solution, verify_spinal, Classification, SpinalWitness,
};
pub use star::{
    check_star_falsifier, falsify_star, heuristic_k, is_power_of, onevar_star_bound,
    search_star_counterexample, StarFalsifier, StarMode, StarWitness,
};

/// Caps on the size of equations handed to the exponential procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_arity: usize,
    pub max_columns: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_arity: 10,
            max_columns: 128,
        }
    }
}

impl Limits {
    pub fn check(&self, eq: &crate::eqcore::SimpleEquation) -> Result<(), SpineError> {
        if eq.arity() > self.max_arity {
            return Err(SpineError::ArityCap {
                arity: eq.arity(),
                cap: self.max_arity,
            });
        }
        if eq.columns().len() > self.max_columns {
            return Err(SpineError::ColumnCap {
                columns: eq.columns().len(),
                cap: self.max_columns,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpineError {
    #[error("arity {arity} exceeds the cap {cap}")]
    ArityCap { arity: usize, cap: usize },
    #[error("{columns} joinands exceed the cap {cap}")]
    ColumnCap { columns: usize, cap: usize },
    #[error("K must be at least 2, got {0}")]
    InvalidK(u64),
    #[error("not a spine: {0}")]
    NotSpinal(String),
    #[error("arithmetic overflow while searching for powers of K")]
    Overflow,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
