use crate::error::InferenceError;
use crate::factor::{CostLedger, Factor, ScopeVar};
use crate::model::{CiSpec, Distribution, Network, Node, Query, VarId};

/// Largest joint state space the oracle will walk.
pub const MAX_STATES: usize = 1 << 22;

/// `P(x | parents)` of one node as a parent-major table. Causal models are
/// folded cause by cause: the distribution of `ξ_1 * .. * ξ_k` is convolved
/// with that of `ξ_{k+1}` through the operator.
pub fn local_table(net: &Network, node: &Node) -> Vec<f64> {
    match &node.distribution {
        Distribution::Cpt(cpt) => cpt.table.clone(),
        Distribution::CausalIndependence(ci) => fold_contributions(net, node, ci),
    }
}

fn fold_contributions(net: &Network, node: &Node, ci: &CiSpec) -> Vec<f64> {
    let d = ci.operator.cardinality();
    let cards: Vec<usize> = node.parents.iter().map(|&p| net.cardinality(p)).collect();
    let rows: usize = cards.iter().product();
    let mut table = Vec::with_capacity(rows * d);
    for row in 0..rows {
        let values = unrank(row, &cards);
        let mut dist: Option<Vec<f64>> = None;
        let columns = ci
            .contributions
            .iter()
            .zip(&values)
            .map(|(f, &v)| f.column(v))
            .chain(ci.leak.iter().map(|l| l.column(0)));
        for col in columns {
            dist = Some(match dist {
                None => col,
                Some(prev) => {
                    let mut next = vec![0.0; d];
                    for (a, pa) in prev.iter().enumerate() {
                        for (b, pb) in col.iter().enumerate() {
                            next[ci.operator.apply(a, b)] += pa * pb;
                        }
                    }
                    next
                }
            });
        }
        table.extend(dist.expect("a causal model has at least one contribution"));
    }
    table
}

/// Mixed-radix digits of `index`, most significant first.
fn unrank(mut index: usize, cards: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; cards.len()];
    for k in (0..cards.len()).rev() {
        digits[k] = index % cards[k];
        index /= cards[k];
    }
    digits
}

/// Tables and positions needed to score one complete assignment.
struct Walker {
    ids: Vec<VarId>,
    cards: Vec<usize>,
    /// per node: positions of (parents.., self) in `ids`, and its table
    families: Vec<(Vec<usize>, Vec<f64>)>,
}

impl Walker {
    fn new(net: &Network) -> Result<Self, InferenceError> {
        let ids: Vec<VarId> = net.ids().collect();
        let cards: Vec<usize> = ids.iter().map(|&id| net.cardinality(id)).collect();
        let states = cards.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c).filter(|&n| n <= MAX_STATES));
        if states.is_none() {
            let total: f64 = cards.iter().map(|&c| c as f64).product();
            return Err(InferenceError::StateSpaceTooLarge(format!("{total:.0}")));
        }
        let pos = |id: VarId| ids.binary_search(&id).expect("parent is in the network");
        let families = net
            .nodes()
            .map(|node| {
                let family = node.parents.iter().copied().chain([node.id()]).map(pos).collect();
                (family, local_table(net, node))
            })
            .collect();
        Ok(Walker { ids, cards, families })
    }

    fn probability(&self, assignment: &[usize]) -> f64 {
        let mut p = 1.0;
        for (family, table) in &self.families {
            let mut index = 0;
            for &v in family {
                index = index * self.cards[v] + assignment[v];
            }
            p *= table[index];
            if p == 0.0 {
                break;
            }
        }
        p
    }

    /// Calls `visit` on every assignment agreeing with `fixed`.
    fn for_each(
        &self,
        fixed: &[Option<usize>],
        mut visit: impl FnMut(&[usize]) -> Result<(), InferenceError>,
    ) -> Result<(), InferenceError> {
        let free: Vec<usize> = (0..self.ids.len()).filter(|&i| fixed[i].is_none()).collect();
        let mut a: Vec<usize> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
        loop {
            visit(&a)?;
            let mut k = free.len();
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                let i = free[k];
                a[i] += 1;
                if a[i] < self.cards[i] {
                    break;
                }
                a[i] = 0;
            }
        }
    }
}

/// The full joint `Π P(x_i | parents)` over every variable, in id order.
pub fn enumerate_joint(net: &Network) -> Result<Factor, InferenceError> {
    let w = Walker::new(net)?;
    let mut table = Vec::with_capacity(w.cards.iter().product());
    w.for_each(&vec![None; w.ids.len()], |a| {
        table.push(w.probability(a));
        Ok(())
    })?;
    let scope = w.ids.iter().zip(&w.cards).map(|(&id, &c)| ScopeVar::regular(id, c)).collect();
    Ok(Factor::new(scope, table)?)
}

/// Unnormalized marginal of `joint` on `vars`, in the given order.
pub fn marginal(joint: &Factor, vars: &[VarId]) -> Factor {
    let positions: Vec<usize> = vars.iter().map(|&v| joint.position(v).expect("variable in joint")).collect();
    let cards: Vec<usize> = joint.scope().iter().map(|v| v.cardinality).collect();
    let out_cards: Vec<usize> = positions.iter().map(|&p| cards[p]).collect();
    let mut table = vec![0.0; out_cards.iter().product()];
    for (i, &p) in joint.table().iter().enumerate() {
        let a = unrank(i, &cards);
        let mut j = 0;
        for (&pos, &c) in positions.iter().zip(&out_cards) {
            j = j * c + a[pos];
        }
        table[j] += p;
    }
    let scope = positions.iter().map(|&p| joint.scope()[p]).map(|v| ScopeVar::regular(v.id, v.cardinality)).collect();
    Factor::new(scope, table).expect("marginal shape")
}

/// `P(targets | evidence)` by summing the joint over every assignment that
/// agrees with the evidence.
pub fn posterior_by_enumeration(net: &Network, query: &Query) -> Result<Factor, InferenceError> {
    posterior_with_ledger(net, query, &mut CostLedger::new())
}

/// As [`posterior_by_enumeration`], charging one multiplication per table
/// lookup after the first and one addition per accumulated state, and
/// honouring the ledger's time limit.
pub fn posterior_with_ledger(net: &Network, query: &Query, ledger: &mut CostLedger) -> Result<Factor, InferenceError> {
    query.check(net)?;
    let w = Walker::new(net)?;
    let mut fixed = vec![None; w.ids.len()];
    for (&y, &v) in &query.evidence {
        fixed[w.ids.binary_search(&y).expect("checked")] = Some(v);
    }
    let targets: Vec<usize> = query.targets.iter().map(|t| w.ids.binary_search(t).expect("checked")).collect();
    let target_cards: Vec<usize> = targets.iter().map(|&t| w.cards[t]).collect();
    let mut table = vec![0.0; target_cards.iter().product()];
    ledger.allocate(table.len())?;
    let per_state = w.families.len().saturating_sub(1) as u64;
    let mut visited = 0u64;
    w.for_each(&fixed, |a| {
        visited += 1;
        if visited.is_multiple_of(4096) {
            ledger.check_time()?;
        }
        let mut j = 0;
        for (&t, &c) in targets.iter().zip(&target_cards) {
            j = j * c + a[t];
        }
        table[j] += w.probability(a);
        ledger.charge(per_state, 1);
        Ok(())
    })?;
    let total: f64 = table.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(InferenceError::ImpossibleEvidence);
    }
    table.iter_mut().for_each(|p| *p /= total);
    let scope = targets.iter().zip(&target_cards).map(|(&t, &c)| ScopeVar::regular(w.ids[t], c)).collect();
    Ok(Factor::new(scope, table)?)
}
