use crate::model::{CiSpec, Cpt, Distribution, Network, VarKind};

/// Full `P(e | c_1..c_m)` of a causal-independence node: for every parent
/// assignment, sums the probability of every contribution tuple (leak
/// included) into the cell its operator fold lands in.
///
/// Rows are parent-major with the first parent slowest.
pub fn expand_cpt(ci: &CiSpec) -> Cpt {
    let d = ci.operator.cardinality();
    let cause_cards: Vec<usize> = ci.contributions.iter().map(|f| f.cause_cardinality).collect();
    let rows: usize = cause_cards.iter().product();
    let factors: Vec<_> = ci.all_factors().collect();
    let mut table = vec![0.0; rows * d];
    let mut parents = vec![0usize; cause_cards.len()];
    for row in 0..rows {
        // cause value seen by each factor; the leak always sees 0
        let cause_values: Vec<usize> = (0..factors.len()).map(|i| parents.get(i).copied().unwrap_or(0)).collect();
        let out = &mut table[row * d..(row + 1) * d];
        accumulate(ci, &factors, &cause_values, 0, None, 1.0, out);
        for k in (0..parents.len()).rev() {
            parents[k] += 1;
            if parents[k] < cause_cards[k] {
                break;
            }
            parents[k] = 0;
        }
    }
    Cpt { table }
}

fn accumulate(
    ci: &CiSpec,
    factors: &[&crate::model::ContributingFactor],
    cause_values: &[usize],
    depth: usize,
    acc: Option<usize>,
    weight: f64,
    out: &mut [f64],
) {
    if depth == factors.len() {
        if let Some(alpha) = acc {
            out[alpha] += weight;
        }
        return;
    }
    let f = factors[depth];
    for alpha in 0..f.effect_cardinality {
        let p = f.prob(alpha, cause_values[depth]);
        if p == 0.0 {
            continue;
        }
        let next = match acc {
            None => alpha,
            Some(a) => ci.operator.apply(a, alpha),
        };
        accumulate(ci, factors, cause_values, depth + 1, Some(next), weight * p, out);
    }
}

/// Replaces every causal-independence model by its full CPT. All variables
/// of the result are regular.
pub fn expand_all(net: &Network) -> Network {
    Network::from_nodes(net.nodes().map(|node| {
        let mut node = node.clone();
        if let Distribution::CausalIndependence(ci) = &node.distribution {
            node.distribution = Distribution::Cpt(expand_cpt(ci));
        }
        node.variable.kind = VarKind::Regular;
        node
    }))
}
