use std::collections::BTreeMap;

use crate::elimination::HeterogeneousFactorization;
use crate::model::{Cpt, Distribution, Network, Node, VarId, VarKind, Variable};

use super::TransformError;

/// Pairs each new regular variable with its deputy.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeputationMap {
    deputies: BTreeMap<VarId, VarId>,
    partners: BTreeMap<VarId, VarId>,
}

impl DeputationMap {
    pub fn insert(&mut self, new_regular: VarId, deputy: VarId) {
        self.deputies.insert(new_regular, deputy);
        self.partners.insert(deputy, new_regular);
    }

    /// Reconstructs the pairing from a network's deputy/new-regular kinds.
    pub fn from_network(net: &Network) -> Self {
        let mut map = DeputationMap::default();
        for node in net.nodes() {
            if node.variable.kind == VarKind::NewRegular {
                if let [deputy] = node.parents.as_slice() {
                    map.insert(node.id(), *deputy);
                }
            }
        }
        map
    }

    pub fn deputy_of(&self, new_regular: VarId) -> Option<VarId> {
        self.deputies.get(&new_regular).copied()
    }

    pub fn partner_of(&self, deputy: VarId) -> Option<VarId> {
        self.partners.get(&deputy).copied()
    }

    pub fn is_deputy(&self, id: VarId) -> bool {
        self.partners.contains_key(&id)
    }

    pub fn is_new_regular(&self, id: VarId) -> bool {
        self.deputies.contains_key(&id)
    }

    /// `(deputy, new regular)` pairs in new-regular id order.
    pub fn pairs(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.deputies.iter().map(|(&e, &d)| (d, e))
    }

    pub fn len(&self) -> usize {
        self.deputies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deputies.is_empty()
    }
}

/// Output of [`depute`].
#[derive(Clone, Debug)]
pub struct Deputation {
    pub network: Network,
    pub map: DeputationMap,
    pub factorization: HeterogeneousFactorization,
}

/// The deputy of a variable named `e` is named `e′`.
pub fn deputy_name(name: &str) -> String {
    format!("{name}′")
}

/// Deputes every convergent variable: the deputy `e′` takes over `e`'s
/// parents and causal model, and `e` keeps `e′` as its only parent through
/// the identity table `I(e′, e)`. Deputies get fresh ids in the order of
/// their partners.
pub fn depute(net: &Network) -> Result<Deputation, TransformError> {
    let mut out = net.clone();
    let mut map = DeputationMap::default();
    let mut next = net.next_id().0;
    for node in net.nodes() {
        if node.variable.kind != VarKind::Convergent {
            continue;
        }
        let ci = node.ci().ok_or_else(|| TransformError::MissingCausalModel(node.variable.name.clone()))?;
        let deputy_id = VarId(next);
        next += 1;
        let d = node.variable.cardinality();
        out.insert(Node {
            variable: Variable {
                id: deputy_id,
                name: deputy_name(&node.variable.name),
                frame: node.variable.frame.clone(),
                kind: VarKind::Deputy,
            },
            parents: node.parents.clone(),
            distribution: Distribution::CausalIndependence(ci.clone()),
        });
        let partner = out.node_mut(node.id()).expect("node exists");
        partner.variable.kind = VarKind::NewRegular;
        partner.parents = vec![deputy_id];
        partner.distribution = Distribution::Cpt(identity_cpt(d));
        map.insert(node.id(), deputy_id);
    }
    let factorization = HeterogeneousFactorization::from_deputation_network(&out)
        .map_err(|e| TransformError::Factorization(e.to_string()))?;
    Ok(Deputation { network: out, map, factorization })
}

fn identity_cpt(d: usize) -> Cpt {
    let mut table = vec![0.0; d * d];
    for v in 0..d {
        table[v * d + v] = 1.0;
    }
    Cpt { table }
}
