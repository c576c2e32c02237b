//! Parent divorcing and the temporal transformation. Both replace a wide
//! convergent family by intermediate regular variables on the effect's
//! frame, each holding the ⊗-combination of two earlier stages.

use crate::model::{
    BaseOperator, ContributingFactor, Cpt, Distribution, Network, Node, VarId, VarKind, Variable,
};

use super::expand::expand_cpt;

/// One input of a pairwise combination: either a raw contributing factor
/// (with its cause, if any) or an intermediate variable whose value is
/// passed through unchanged.
#[derive(Clone, Copy)]
enum Stage<'a> {
    Raw(&'a ContributingFactor),
    Node(VarId),
}

impl Stage<'_> {
    fn parent(&self) -> Option<VarId> {
        match self {
            Stage::Raw(f) => f.cause,
            Stage::Node(id) => Some(*id),
        }
    }

    fn parent_cardinality(&self, d: usize) -> usize {
        match self {
            Stage::Raw(f) => f.cause_cardinality,
            Stage::Node(_) => d,
        }
    }

    /// `P(stage value = alpha | parent = v)`.
    fn prob(&self, alpha: usize, v: usize) -> f64 {
        match self {
            Stage::Raw(f) => f.prob(alpha, v),
            Stage::Node(_) => (alpha == v) as u8 as f64,
        }
    }
}

/// `P(out = α | left parent, right parent) = Σ_{a*b=α} P_left(a) P_right(b)`,
/// with the parents of the two stages in order.
fn pair_cpt(op: &BaseOperator, left: Stage, right: Stage) -> (Vec<VarId>, Cpt) {
    let d = op.cardinality();
    let parents: Vec<VarId> = left.parent().into_iter().chain(right.parent()).collect();
    let lc = if left.parent().is_some() { left.parent_cardinality(d) } else { 1 };
    let rc = if right.parent().is_some() { right.parent_cardinality(d) } else { 1 };
    let mut table = vec![0.0; lc * rc * d];
    for lv in 0..lc {
        for rv in 0..rc {
            let row = &mut table[(lv * rc + rv) * d..(lv * rc + rv + 1) * d];
            for a in 0..d {
                let pa = left.prob(a, lv);
                if pa == 0.0 {
                    continue;
                }
                for b in 0..d {
                    row[op.apply(a, b)] += pa * right.prob(b, rv);
                }
            }
        }
    }
    (parents, Cpt { table })
}

/// `P(out | cause) = f` for a single raw stage.
fn single_cpt(f: &ContributingFactor) -> (Vec<VarId>, Cpt) {
    let mut table = Vec::with_capacity(f.table.len());
    for c in 0..f.cause_cardinality {
        table.extend(f.column(c));
    }
    (f.cause.into_iter().collect(), Cpt { table })
}

fn regular_node(id: VarId, name: String, like: &Variable, parents: Vec<VarId>, cpt: Cpt) -> Node {
    Node {
        variable: Variable { id, name, frame: like.frame.clone(), kind: VarKind::Regular },
        parents,
        distribution: Distribution::Cpt(cpt),
    }
}

/// Left-biased binary tree over each wide convergent family. Causes (the
/// leak counts as one, placed last) are paired in declaration order; an odd
/// leftover moves up a level unchanged. Families of at most two causes are
/// expanded directly. Every family gets its own intermediates even when
/// families share parents.
///
/// New variables are named `<effect>_pd<k>` and numbered from the network's
/// next free id.
pub fn parent_divorce(net: &Network) -> Network {
    let mut out = net.clone();
    let mut next = net.next_id().0;
    for node in net.nodes() {
        let Some(ci) = node.ci() else { continue };
        let var = &node.variable;
        let mut items: Vec<Stage> = ci.all_factors().map(Stage::Raw).collect();
        let (parents, cpt) = if items.len() <= 2 {
            (node.parents.clone(), expand_cpt(ci))
        } else {
            let mut k = 0;
            while items.len() > 2 {
                let mut level = Vec::with_capacity(items.len().div_ceil(2));
                for pair in items.chunks(2) {
                    match pair {
                        [left, right] => {
                            let id = VarId(next);
                            next += 1;
                            k += 1;
                            let (parents, cpt) = pair_cpt(&ci.operator, *left, *right);
                            out.insert(regular_node(id, format!("{}_pd{k}", var.name), var, parents, cpt));
                            level.push(Stage::Node(id));
                        }
                        [leftover] => level.push(*leftover),
                        _ => unreachable!(),
                    }
                }
                items = level;
            }
            pair_cpt(&ci.operator, items[0], items[1])
        };
        out.insert(regular_node(var.id, var.name.clone(), var, parents, cpt));
    }
    out
}

/// Chains each convergent family: `e_1` depends on the first cause alone
/// (the leak, when there is one), and `e_i` combines `e_{i-1}` with the
/// `i`-th cause; the last link is the effect itself.
///
/// New variables are named `<effect>_tt<i>`.
pub fn temporal_transform(net: &Network) -> Network {
    let mut out = net.clone();
    let mut next = net.next_id().0;
    for node in net.nodes() {
        let Some(ci) = node.ci() else { continue };
        let var = &node.variable;
        let causes: Vec<&ContributingFactor> = ci.leak.iter().chain(&ci.contributions).collect();
        let (mut parents, mut cpt) = single_cpt(causes[0]);
        for (i, f) in causes.iter().enumerate().skip(1) {
            let id = VarId(next);
            next += 1;
            out.insert(regular_node(id, format!("{}_tt{i}", var.name), var, parents, cpt));
            (parents, cpt) = pair_cpt(&ci.operator, Stage::Node(id), Stage::Raw(f));
        }
        out.insert(regular_node(var.id, var.name.clone(), var, parents, cpt));
    }
    out
}
