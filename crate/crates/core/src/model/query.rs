use std::collections::{BTreeMap, BTreeSet};

use super::network::{Network, VarId, VarKind};

/// `P(targets | evidence)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub targets: Vec<VarId>,
    pub evidence: BTreeMap<VarId, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("query has no target variables")]
    NoTargets,
    #[error("unknown variable {0}")]
    UnknownVariable(VarId),
    #[error("variable `{0}` is both a target and observed")]
    ObservedTarget(String),
    #[error("variable `{0}` is listed as a target twice")]
    DuplicateTarget(String),
    #[error("value {value} is out of range for `{var}`")]
    ValueOutOfRange { var: String, value: usize },
    #[error("deputy `{0}` is internal and cannot be queried or observed")]
    Deputy(String),
}

impl Query {
    pub fn new(targets: impl IntoIterator<Item = VarId>, evidence: impl IntoIterator<Item = (VarId, usize)>) -> Self {
        Query { targets: targets.into_iter().collect(), evidence: evidence.into_iter().collect() }
    }

    pub fn marginal(target: VarId) -> Self {
        Query { targets: vec![target], evidence: BTreeMap::new() }
    }

    /// Variables mentioned by the query, targets first.
    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.targets.iter().copied().chain(self.evidence.keys().copied())
    }

    pub fn check(&self, net: &Network) -> Result<(), QueryError> {
        if self.targets.is_empty() {
            return Err(QueryError::NoTargets);
        }
        let mut seen = BTreeSet::new();
        for &t in &self.targets {
            let node = net.node(t).ok_or(QueryError::UnknownVariable(t))?;
            if node.variable.kind == VarKind::Deputy {
                return Err(QueryError::Deputy(node.variable.name.clone()));
            }
            if self.evidence.contains_key(&t) {
                return Err(QueryError::ObservedTarget(node.variable.name.clone()));
            }
            if !seen.insert(t) {
                return Err(QueryError::DuplicateTarget(node.variable.name.clone()));
            }
        }
        for (&y, &value) in &self.evidence {
            let node = net.node(y).ok_or(QueryError::UnknownVariable(y))?;
            if node.variable.kind == VarKind::Deputy {
                return Err(QueryError::Deputy(node.variable.name.clone()));
            }
            if value >= node.variable.cardinality() {
                return Err(QueryError::ValueOutOfRange { var: node.variable.name.clone(), value });
            }
        }
        Ok(())
    }

    /// Variables of `net` that are neither targets nor observed.
    pub fn eliminable(&self, net: &Network) -> Vec<VarId> {
        net.ids()
            .filter(|id| !self.targets.contains(id) && !self.evidence.contains_key(id))
            .collect()
    }
}
