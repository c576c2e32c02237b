//! Elimination orderings and the two elimination engines: plain VE over a
//! homogeneous factorization and VE1 over the heterogeneous factorization of
//! a deputation network.

mod ordering;
mod ve;
mod ve1;

pub use ordering::{
    is_legitimate, is_legitimate_for, legitimacy_constraints, max_cardinality_order, min_deficiency_order,
    EliminationOrdering, MoralGraph, OrderingError,
};
pub use ve::{cpt_factor, homogeneous_factors, sum_out, ve};
pub use ve1::{ve1, ve1_traced, EliminationStep, HeterogeneousFactorization, TidinessViolation};
