use std::collections::BTreeSet;

use super::network::{Network, VarId};
use super::query::{Query, QueryError};

/// Ancestral closure of `seeds`.
pub fn ancestors(net: &Network, seeds: impl IntoIterator<Item = VarId>) -> BTreeSet<VarId> {
    let mut keep = BTreeSet::new();
    let mut stack: Vec<VarId> = seeds.into_iter().collect();
    while let Some(id) = stack.pop() {
        if keep.insert(id) {
            if let Some(node) = net.node(id) {
                stack.extend(node.parents.iter().copied());
            }
        }
    }
    keep
}

/// Drops every node outside the ancestral closure of the query and
/// evidence variables. Equivalent to repeatedly removing barren nodes, and
/// leaves `P(X | Y = y)` unchanged.
pub fn prune_irrelevant(net: &Network, query: &Query) -> Result<Network, QueryError> {
    for id in query.variables() {
        if !net.contains(id) {
            return Err(QueryError::UnknownVariable(id));
        }
    }
    let keep = ancestors(net, query.variables());
    Ok(Network::from_nodes(net.nodes().filter(|n| keep.contains(&n.id())).cloned()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Frame, NetworkBuilder};

    #[test]
    fn chain_prunes_descendants() {
        let mut b = NetworkBuilder::new();
        let a = b.variable("a", Frame::binary());
        let bb = b.variable("b", Frame::binary());
        let c = b.variable("c", Frame::binary());
        b.cpt(a, &[], vec![0.5, 0.5])
            .cpt(bb, &[a], vec![0.5, 0.5, 0.1, 0.9])
            .cpt(c, &[bb], vec![0.5, 0.5, 0.1, 0.9]);
        let net = b.build().unwrap();
        let pruned = prune_irrelevant(&net, &Query::marginal(a)).unwrap();
        assert_eq!(pruned.ids().collect::<Vec<_>>(), vec![a]);
        let pruned = prune_irrelevant(&net, &Query::new([a], [(c, 1)])).unwrap();
        assert_eq!(pruned.len(), 3);
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let net = Network::default();
        assert_eq!(
            prune_irrelevant(&net, &Query::marginal(VarId(3))),
            Err(QueryError::UnknownVariable(VarId(3)))
        );
    }
}
