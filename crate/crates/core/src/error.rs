use crate::elimination::OrderingError;
use crate::factor::{FactorError, ResourceLimit};
use crate::model::{QueryError, ValidationReport, VarId};
use crate::transforms::TransformError;

#[derive(Debug, thiserror::Error)]
pub enum InferenceError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("invalid network: {0}")]
    InvalidNetwork(ValidationReport),
    #[error("impossible evidence: the observations have probability zero")]
    ImpossibleEvidence,
    #[error(transparent)]
    Limit(ResourceLimit),
    #[error("factor algebra: {0}")]
    Factor(FactorError),
    #[error("ordering: {0}")]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("elimination ordering must cover exactly the non-query, non-evidence variables: {0}")]
    OrderingCoverage(String),
    #[error("elimination ordering is not legitimate: every deputy must precede its new regular variable")]
    IllegitimateOrdering,
    #[error("cannot sum out {0} while its deputy is still present")]
    IllegitimateElimination(VarId),
    #[error("network still has convergent variables; VE1 needs a deputation network")]
    NotDeputation,
    #[error("joint state space of {0} states exceeds the enumeration guard")]
    StateSpaceTooLarge(String),
}

impl From<FactorError> for InferenceError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::ImpossibleEvidence => InferenceError::ImpossibleEvidence,
            FactorError::Limit(l) => InferenceError::Limit(l),
            other => InferenceError::Factor(other),
        }
    }
}

impl From<ResourceLimit> for InferenceError {
    fn from(l: ResourceLimit) -> Self {
        InferenceError::Limit(l)
    }
}
