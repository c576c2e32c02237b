use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::operator::BaseOperator;
use super::validate::{validate_network, ValidationReport};

/// Largest frame we accept.
pub const MAX_FRAME_SIZE: usize = 64;
/// Largest number of parents a node may have.
pub const MAX_PARENTS: usize = 32;

/// Stable identifier of a variable. Transforms keep the ids of existing
/// variables and hand out fresh ones above the current maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The ordered set of values a variable can take. Downstream code only ever
/// sees value indices `0..cardinality`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    values: Vec<String>,
}

impl Frame {
    pub fn new<S: Into<String>>(values: impl IntoIterator<Item = S>) -> Self {
        Frame { values: values.into_iter().map(Into::into).collect() }
    }

    /// Values labelled `0..n`.
    pub fn indexed(n: usize) -> Self {
        Frame { values: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn binary() -> Self {
        Self::indexed(2)
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn label(&self, index: usize) -> &str {
        &self.values[index]
    }

    /// Resolves a value by label, falling back to a numeric index.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.values
            .iter()
            .position(|v| v == label)
            .or_else(|| label.parse::<usize>().ok().filter(|&i| i < self.values.len()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Regular,
    Convergent,
    /// Copy of a convergent variable carrying its causal mechanism.
    Deputy,
    /// A formerly convergent variable whose only parent is its deputy.
    NewRegular,
}

impl VarKind {
    pub fn keyword(self) -> &'static str {
        match self {
            VarKind::Regular => "regular",
            VarKind::Convergent => "convergent",
            VarKind::Deputy => "deputy",
            VarKind::NewRegular => "new-regular",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "regular" => VarKind::Regular,
            "convergent" => VarKind::Convergent,
            "deputy" => VarKind::Deputy,
            "new-regular" => VarKind::NewRegular,
            _ => return None,
        })
    }

    /// Whether the variable takes part in ⊗ as a convergent variable.
    /// After deputation only deputies are convergent.
    pub fn is_convergent(self) -> bool {
        matches!(self, VarKind::Convergent | VarKind::Deputy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    pub frame: Frame,
    pub kind: VarKind,
}

impl Variable {
    pub fn cardinality(&self) -> usize {
        self.frame.cardinality()
    }
}

/// `f(e = α, c) = P(ξ = α | c)`: the distribution of one cause's
/// contribution to the effect. Stored effect-major, so entry
/// `(α, c)` lives at `α * cause_cardinality + c`. A leak has no cause and a
/// cause cardinality of one.
#[derive(Clone, Debug, PartialEq)]
pub struct ContributingFactor {
    pub cause: Option<VarId>,
    pub effect_cardinality: usize,
    pub cause_cardinality: usize,
    pub table: Vec<f64>,
}

impl ContributingFactor {
    pub fn new(cause: Option<VarId>, effect_cardinality: usize, cause_cardinality: usize, table: Vec<f64>) -> Self {
        ContributingFactor { cause, effect_cardinality, cause_cardinality, table }
    }

    /// Builds a factor from one contribution distribution per cause value.
    pub fn from_columns(cause: Option<VarId>, columns: &[Vec<f64>]) -> Self {
        let cause_cardinality = columns.len();
        let effect_cardinality = columns.first().map_or(0, Vec::len);
        let mut table = vec![0.0; effect_cardinality * cause_cardinality];
        for (c, column) in columns.iter().enumerate() {
            for (alpha, &p) in column.iter().enumerate() {
                table[alpha * cause_cardinality + c] = p;
            }
        }
        ContributingFactor { cause, effect_cardinality, cause_cardinality, table }
    }

    pub fn leak(distribution: Vec<f64>) -> Self {
        let effect_cardinality = distribution.len();
        ContributingFactor { cause: None, effect_cardinality, cause_cardinality: 1, table: distribution }
    }

    #[inline]
    pub fn prob(&self, alpha: usize, cause_value: usize) -> f64 {
        self.table[alpha * self.cause_cardinality + cause_value]
    }

    /// Contribution distribution for a fixed cause value.
    pub fn column(&self, cause_value: usize) -> Vec<f64> {
        (0..self.effect_cardinality).map(|a| self.prob(a, cause_value)).collect()
    }
}

/// Causal-independence specification of a convergent node: one
/// contributing factor per parent (same order) and an optional leak.
#[derive(Clone, Debug, PartialEq)]
pub struct CiSpec {
    pub operator: BaseOperator,
    pub contributions: Vec<ContributingFactor>,
    pub leak: Option<ContributingFactor>,
}

impl CiSpec {
    /// Contributions in combination order, leak last.
    pub fn all_factors(&self) -> impl Iterator<Item = &ContributingFactor> {
        self.contributions.iter().chain(self.leak.iter())
    }
}

/// Dense conditional probability table. Rows are parent assignments in
/// parent-major order (first parent slowest); each row is a distribution
/// over the child's values.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    pub table: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Cpt(Cpt),
    CausalIndependence(CiSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub variable: Variable,
    pub parents: Vec<VarId>,
    pub distribution: Distribution,
}

impl Node {
    pub fn id(&self) -> VarId {
        self.variable.id
    }

    pub fn ci(&self) -> Option<&CiSpec> {
        match &self.distribution {
            Distribution::CausalIndependence(ci) => Some(ci),
            Distribution::Cpt(_) => None,
        }
    }

    pub fn cpt(&self) -> Option<&Cpt> {
        match &self.distribution {
            Distribution::Cpt(cpt) => Some(cpt),
            Distribution::CausalIndependence(_) => None,
        }
    }
}

/// A directed acyclic graph of discrete variables. Nodes are kept in id
/// order; edges are implied by parent lists.
///
/// A `Network` may hold an invalid model (cycles, bad tables); use
/// [`validate_network`] or [`NetworkBuilder::build`] before running
/// inference on anything that came from outside.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Network {
    nodes: BTreeMap<VarId, Node>,
}

impl Network {
    pub fn from_nodes(nodes: impl IntoIterator<Item = Node>) -> Self {
        Network { nodes: nodes.into_iter().map(|n| (n.id(), n)).collect() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn contains(&self, id: VarId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn node(&self, id: VarId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    /// Panics if `id` is not in the network.
    pub fn variable(&self, id: VarId) -> &Variable {
        &self.nodes[&id].variable
    }

    pub fn cardinality(&self, id: VarId) -> usize {
        self.variable(id).cardinality()
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.variable(id).name
    }

    pub fn by_name(&self, name: &str) -> Option<VarId> {
        self.nodes.values().find(|n| n.variable.name == name).map(Node::id)
    }

    pub fn next_id(&self) -> VarId {
        VarId(self.nodes.keys().next_back().map_or(0, |id| id.0 + 1))
    }

    pub fn insert(&mut self, node: Node) {
        self.nodes.insert(node.id(), node);
    }

    pub fn remove(&mut self, id: VarId) -> Option<Node> {
        self.nodes.remove(&id)
    }

    pub fn node_mut(&mut self, id: VarId) -> Option<&mut Node> {
        self.nodes.get_mut(&id)
    }

    pub fn children(&self, id: VarId) -> Vec<VarId> {
        self.nodes
            .values()
            .filter(|n| n.parents.contains(&id))
            .map(Node::id)
            .collect()
    }

    pub fn has_causal_independence(&self) -> bool {
        self.nodes.values().any(|n| n.ci().is_some())
    }

    /// Kahn's algorithm with smallest-id tie-break; `None` if there is a
    /// cycle or a dangling parent.
    pub fn topological_order(&self) -> Option<Vec<VarId>> {
        let mut indegree: BTreeMap<VarId, usize> = BTreeMap::new();
        for node in self.nodes.values() {
            if node.parents.iter().any(|p| !self.nodes.contains_key(p)) {
                return None;
            }
            indegree.insert(node.id(), node.parents.len());
        }
        let mut ready: BTreeSet<VarId> =
            indegree.iter().filter(|(_, &d)| d == 0).map(|(&id, _)| id).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        let children: BTreeMap<VarId, Vec<VarId>> = {
            let mut map: BTreeMap<VarId, Vec<VarId>> = BTreeMap::new();
            for node in self.nodes.values() {
                for &p in &node.parents {
                    map.entry(p).or_default().push(node.id());
                }
            }
            map
        };
        while let Some(id) = ready.pop_first() {
            order.push(id);
            for &child in children.get(&id).into_iter().flatten() {
                let d = indegree.get_mut(&child).expect("child is a node");
                *d -= 1;
                if *d == 0 {
                    ready.insert(child);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Checked joint state-space size, `None` on overflow.
    pub fn state_space(&self) -> Option<usize> {
        self.nodes
            .values()
            .try_fold(1usize, |acc, n| acc.checked_mul(n.variable.cardinality()))
    }
}

/// Incremental construction of networks with ids handed out in insertion order.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    variables: Vec<Variable>,
    nodes: BTreeMap<VarId, (Vec<VarId>, Distribution)>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a regular variable; the kind is adjusted when a
    /// causal-independence distribution is attached.
    pub fn variable(&mut self, name: impl Into<String>, frame: Frame) -> VarId {
        self.variable_of_kind(name, frame, VarKind::Regular)
    }

    pub fn variable_of_kind(&mut self, name: impl Into<String>, frame: Frame, kind: VarKind) -> VarId {
        let id = VarId(self.variables.len() as u32);
        self.variables.push(Variable { id, name: name.into(), frame, kind });
        id
    }

    pub fn cardinality(&self, id: VarId) -> usize {
        self.variables[id.0 as usize].cardinality()
    }

    pub fn cpt(&mut self, id: VarId, parents: &[VarId], table: Vec<f64>) -> &mut Self {
        self.nodes.insert(id, (parents.to_vec(), Distribution::Cpt(Cpt { table })));
        self
    }

    /// Attaches a causal-independence model. Contributions are given per
    /// parent as one contribution distribution per cause value.
    pub fn causal(
        &mut self,
        id: VarId,
        operator: BaseOperator,
        contributions: Vec<(VarId, Vec<Vec<f64>>)>,
        leak: Option<Vec<f64>>,
    ) -> &mut Self {
        let parents: Vec<VarId> = contributions.iter().map(|(p, _)| *p).collect();
        let contributions = contributions
            .iter()
            .map(|(p, cols)| ContributingFactor::from_columns(Some(*p), cols))
            .collect();
        let spec = CiSpec { operator, contributions, leak: leak.map(ContributingFactor::leak) };
        let var = &mut self.variables[id.0 as usize];
        if var.kind == VarKind::Regular {
            var.kind = VarKind::Convergent;
        }
        self.nodes.insert(id, (parents, Distribution::CausalIndependence(spec)));
        self
    }

    /// Assembles the network without validating it. Variables with no
    /// distribution attached are dropped.
    pub fn build_unchecked(self) -> Network {
        let mut nodes = self.nodes;
        Network::from_nodes(self.variables.into_iter().filter_map(|variable| {
            let (parents, distribution) = nodes.remove(&variable.id)?;
            Some(Node { variable, parents, distribution })
        }))
    }

    pub fn build(self) -> Result<Network, ValidationReport> {
        let declared = self.variables.len();
        let attached = self.nodes.len();
        let net = self.build_unchecked();
        let mut report = validate_network(&net);
        if attached < declared {
            report.push(super::validate::Violation::MissingDistribution { declared, attached });
        }
        if report.is_valid() {
            Ok(net)
        } else {
            Err(report)
        }
    }
}
