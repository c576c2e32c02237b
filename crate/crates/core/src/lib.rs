//! Exact inference for discrete Bayesian networks with causal independence.
//!
//! Convergent variables (noisy-OR, noisy-MAX, noisy adders and any other
//! commutative, associative combination of independent contributions) are
//! factorized into per-cause contributing factors that are combined with
//! the heterogeneous operator ⊗ instead of being expanded into exponential
//! CPTs. After deputation, VE1 eliminates variables from this finer
//! factorization. Plain VE, parent divorcing and the temporal
//! transformation are included as baselines, with a brute-force oracle and
//! an exact multiplication/addition ledger for comparing them.

pub mod bench;
pub mod elimination;
pub mod engine;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod oracle;
pub mod transforms;

pub use elimination::{EliminationOrdering, HeterogeneousFactorization};
pub use engine::{answer, Engine, OrderStrategy};
pub use error::InferenceError;
pub use factor::{CostLedger, Factor, Limits, OperatorMap, ScopeVar};
pub use model::{BaseOperator, Frame, Network, NetworkBuilder, Query, VarId, VarKind};
