//! Ground truth and test material: brute-force inference straight from the
//! chain rule, and seeded random networks and queries.

mod enumerate;
mod random;

pub use enumerate::{enumerate_joint, local_table, marginal, posterior_by_enumeration, posterior_with_ledger, MAX_STATES};
pub use random::{random_network, random_queries, RandomNetworkConfig, RandomQueryError};
