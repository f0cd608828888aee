//! Estimation of matrix elements `<i|f(A)|j>` and local measurements
//! `<0|f(A)^† π f(A)|0>` of Hermitian matrix functions, for matrices given in
//! sparse-oracle, Pauli, super-sparse, or dense form.
//!
//! The crate has three layers:
//!
//! * exact and randomized estimators ([`estimators`]) together with a regime
//!   router that picks an algorithm from declared instance metadata,
//! * circuit-to-matrix instance generators ([`clock`]) whose outputs carry
//!   analytically predicted answers, and
//! * a self-contained dense brute-force oracle ([`dense`]) used to verify
//!   everything else at small dimensions.
//!
//! All randomness flows through explicit seeds; estimators are deterministic
//! functions of `(instance, request, seed)` regardless of worker count.

pub mod access;
pub mod circuit;
pub mod clock;
pub mod dense;
pub mod error;
pub mod estimate;
pub mod estimators;
pub mod io;
pub mod pauli;
pub mod poly;
pub mod rngutil;

pub use access::{PauliAccess, SparseOracle, SuperSparseMatrix};
pub use dense::DenseMatrix;
pub use error::Error;
pub use estimate::{Decision, Estimate, EstimateRequest, Target};
pub use pauli::{PauliOperator, PauliString};
pub use poly::{FunctionSpec, PolynomialSpec};

/// Resource caps shared by estimators and generators.
///
/// `dense_cap` bounds the dimension of any materialized dense matrix,
/// `qubit_cap` the qubit count of any materialized Pauli operator,
/// `closure_terms` the number of distinct Pauli words an explicit closure may
/// hold, and `path_work_log2` the `m·log2(s)` budget of the exact sparse
/// recursion. `max_samples` bounds any single Monte Carlo run.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub dense_cap: usize,
    pub qubit_cap: u32,
    pub closure_terms: usize,
    pub path_work_log2: f64,
    pub max_samples: u64,
    pub inverse_coeff_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            dense_cap: 4096,
            qubit_cap: 12,
            closure_terms: 1 << 16,
            path_work_log2: 27.0,
            max_samples: 200_000_000,
            inverse_coeff_cap: 100_000,
        }
    }
}

impl Caps {
    /// Default caps with the dense cap overridden.
    pub fn with_dense_cap(dense_cap: usize) -> Self {
        Caps {
            dense_cap,
            ..Caps::default()
        }
    }
}
