use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Network, VarId};
use crate::transforms::DeputationMap;

/// A sequence of variables to sum out, in order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EliminationOrdering(pub Vec<VarId>);

impl EliminationOrdering {
    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    pub fn position(&self, id: VarId) -> Option<usize> {
        self.0.iter().position(|&v| v == id)
    }
}

impl From<Vec<VarId>> for EliminationOrdering {
    fn from(v: Vec<VarId>) -> Self {
        EliminationOrdering(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderingError {
    #[error("precedence constraints contain a cycle")]
    ConstraintCycle,
    #[error("variable {0} is not in the graph")]
    UnknownVariable(VarId),
}

/// Undirected graph of a network with parents married and directions dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoralGraph {
    adjacency: BTreeMap<VarId, BTreeSet<VarId>>,
}

impl MoralGraph {
    pub fn of_network(net: &Network) -> Self {
        let mut g = MoralGraph::default();
        for node in net.nodes() {
            g.adjacency.entry(node.id()).or_default();
            let family: Vec<VarId> = node.parents.iter().copied().chain([node.id()]).collect();
            for (i, &a) in family.iter().enumerate() {
                for &b in &family[i + 1..] {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Drops vertices, typically the observed variables.
    pub fn without(mut self, removed: impl IntoIterator<Item = VarId>) -> Self {
        for v in removed {
            if let Some(nbrs) = self.adjacency.remove(&v) {
                for n in nbrs {
                    if let Some(set) = self.adjacency.get_mut(&n) {
                        set.remove(&v);
                    }
                }
            }
        }
        self
    }

    pub fn add_edge(&mut self, a: VarId, b: VarId) {
        if a == b {
            return;
        }
        self.adjacency.entry(a).or_default().insert(b);
        self.adjacency.entry(b).or_default().insert(a);
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn neighbors(&self, v: VarId) -> impl Iterator<Item = VarId> + '_ {
        self.adjacency.get(&v).into_iter().flatten().copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VarId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn has_edge(&self, a: VarId, b: VarId) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }

    fn fill_in(&self, v: VarId) -> usize {
        let nbrs: Vec<VarId> = self.neighbors(v).collect();
        let mut missing = 0;
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if !self.has_edge(a, b) {
                    missing += 1;
                }
            }
        }
        missing
    }

    fn eliminate(&mut self, v: VarId) {
        let nbrs: Vec<VarId> = self.neighbors(v).collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                self.add_edge(a, b);
            }
        }
        self.adjacency.remove(&v);
        for n in nbrs {
            if let Some(set) = self.adjacency.get_mut(&n) {
                set.remove(&v);
            }
        }
    }
}

/// `(before, after)` pairs restricted to the eliminable set.
fn relevant_constraints<'a>(
    eliminable: &'a BTreeSet<VarId>,
    constraints: &'a [(VarId, VarId)],
) -> impl Iterator<Item = (VarId, VarId)> + 'a {
    constraints
        .iter()
        .copied()
        .filter(|(a, b)| eliminable.contains(a) && eliminable.contains(b))
}

/// Greedy minimum-deficiency (min-fill) ordering. A vertex is a candidate
/// only once everything constrained to precede it is gone; among candidates
/// the fewest fill edges wins, ties to the smallest id.
pub fn min_deficiency_order(
    graph: &MoralGraph,
    eliminable: &[VarId],
    constraints: &[(VarId, VarId)],
) -> Result<EliminationOrdering, OrderingError> {
    let remaining: BTreeSet<VarId> = eliminable.iter().copied().collect();
    if let Some(&v) = remaining.iter().find(|v| !graph.contains(**v)) {
        return Err(OrderingError::UnknownVariable(v));
    }
    let mut predecessors: BTreeMap<VarId, BTreeSet<VarId>> = BTreeMap::new();
    for (before, after) in relevant_constraints(&remaining, constraints) {
        predecessors.entry(after).or_default().insert(before);
    }
    let mut remaining = remaining;
    let mut g = graph.clone();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .copied()
            .filter(|v| predecessors.get(v).is_none_or(|p| p.iter().all(|u| !remaining.contains(u))))
            .min_by_key(|&v| (g.fill_in(v), v))
            .ok_or(OrderingError::ConstraintCycle)?;
        g.eliminate(pick);
        remaining.remove(&pick);
        order.push(pick);
    }
    Ok(EliminationOrdering(order))
}

/// Maximum cardinality search, reversed. Non-eliminable vertices of the
/// graph are numbered first so they end up eliminated last (i.e. never).
/// A vertex constrained to come before `after` in the elimination is only
/// visited once `after` has been.
pub fn max_cardinality_order(
    graph: &MoralGraph,
    eliminable: &[VarId],
    constraints: &[(VarId, VarId)],
) -> Result<EliminationOrdering, OrderingError> {
    let pending: BTreeSet<VarId> = eliminable.iter().copied().collect();
    if let Some(&v) = pending.iter().find(|v| !graph.contains(**v)) {
        return Err(OrderingError::UnknownVariable(v));
    }
    let mut successors: BTreeMap<VarId, BTreeSet<VarId>> = BTreeMap::new();
    for (before, after) in relevant_constraints(&pending, constraints) {
        successors.entry(before).or_default().insert(after);
    }
    let mut visited: BTreeSet<VarId> = graph.vertices().filter(|v| !pending.contains(v)).collect();
    let mut pending = pending;
    let mut visits = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let pick = pending
            .iter()
            .copied()
            .filter(|v| successors.get(v).is_none_or(|s| s.iter().all(|u| visited.contains(u))))
            // most visited neighbours first, then smallest id
            .min_by_key(|&v| (std::cmp::Reverse(graph.neighbors(v).filter(|n| visited.contains(n)).count()), v))
            .ok_or(OrderingError::ConstraintCycle)?;
        visited.insert(pick);
        pending.remove(&pick);
        visits.push(pick);
    }
    visits.reverse();
    Ok(EliminationOrdering(visits))
}

/// `(deputy, new regular)` precedence pairs of a deputation network.
pub fn legitimacy_constraints(map: &DeputationMap) -> Vec<(VarId, VarId)> {
    map.pairs().collect()
}

/// True iff every deputy of `net` is eliminated, and eliminated before its
/// new regular partner whenever the partner is eliminated too.
pub fn is_legitimate(order: &[VarId], net: &Network) -> bool {
    is_legitimate_for(order, &DeputationMap::from_network(net))
}

pub fn is_legitimate_for(order: &[VarId], map: &DeputationMap) -> bool {
    let position: BTreeMap<VarId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    map.pairs().all(|(deputy, partner)| match (position.get(&deputy), position.get(&partner)) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(d), Some(e)) => d < e,
    })
}
