//! Network rewrites: deputation, CPT expansion of causal-independence
//! models, parent divorcing and the temporal transformation. Each produces
//! a network the elimination engines can consume directly.

mod depute;
mod expand;
mod rewrite;

pub use depute::{depute, deputy_name, Deputation, DeputationMap};
pub use expand::{expand_all, expand_cpt};
pub use rewrite::{parent_divorce, temporal_transform};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("convergent variable `{0}` has no causal-independence model")]
    MissingCausalModel(String),
    #[error("could not build the heterogeneous factorization: {0}")]
    Factorization(String),
}
