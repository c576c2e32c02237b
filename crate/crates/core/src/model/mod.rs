//! Networks, variables, base combination operators and causal-independence
//! node specifications.

mod network;
mod operator;
mod prune;
mod query;
mod validate;

pub use network::{
    CiSpec, ContributingFactor, Cpt, Distribution, Frame, Network, NetworkBuilder, Node, VarId, VarKind,
    Variable, MAX_FRAME_SIZE, MAX_PARENTS,
};
pub use operator::{validate_operator, BaseOperator, OperatorError, OperatorKind};
pub use prune::{ancestors, prune_irrelevant};
pub use query::{Query, QueryError};
pub use validate::{validate_network, ValidationReport, Violation, PROBABILITY_TOLERANCE};
