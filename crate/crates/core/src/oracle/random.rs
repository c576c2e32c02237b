use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{BaseOperator, Frame, Network, NetworkBuilder, Query, VarId, VarKind};

/// Shape of a random network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomNetworkConfig {
    pub nodes: usize,
    pub max_parents: usize,
    /// Frames have between 2 and this many values.
    pub max_cardinality: usize,
    /// Chance that a node with parents gets a causal-independence model.
    pub convergent_fraction: f64,
    /// Allow custom operator tables besides the built-ins.
    pub custom_operators: bool,
    /// Chance that a probability entry is zero.
    pub zero_fraction: f64,
}

impl Default for RandomNetworkConfig {
    fn default() -> Self {
        RandomNetworkConfig {
            nodes: 8,
            max_parents: 3,
            max_cardinality: 3,
            convergent_fraction: 0.5,
            custom_operators: true,
            zero_fraction: 0.125,
        }
    }
}

/// A random valid network, fully determined by `seed`. Variables are named
/// `x0, x1, ..` and each picks its parents among earlier ones.
pub fn random_network(seed: u64, config: &RandomNetworkConfig) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetworkBuilder::new();
    let max_card = config.max_cardinality.max(2);
    let ids: Vec<VarId> = (0..config.nodes)
        .map(|i| b.variable(format!("x{i}"), Frame::indexed(rng.gen_range(2..=max_card))))
        .collect();
    for (i, &id) in ids.iter().enumerate() {
        let k = rng.gen_range(0..=config.max_parents.min(i));
        let mut parents: Vec<VarId> = sample(&mut rng, i, k).into_iter().map(|j| ids[j]).collect();
        parents.sort();
        let d = b.cardinality(id);
        if k > 0 && rng.gen_bool(config.convergent_fraction.clamp(0.0, 1.0)) {
            let op = random_operator(&mut rng, d, config.custom_operators);
            let contributions = parents
                .iter()
                .map(|&p| (p, (0..b.cardinality(p)).map(|_| distribution(&mut rng, d, config.zero_fraction)).collect()))
                .collect();
            let leak = rng.gen_bool(0.5).then(|| distribution(&mut rng, d, config.zero_fraction));
            b.causal(id, op, contributions, leak);
        } else {
            let rows: usize = parents.iter().map(|&p| b.cardinality(p)).product();
            let table = (0..rows).flat_map(|_| distribution(&mut rng, d, config.zero_fraction)).collect();
            b.cpt(id, &parents, table);
        }
    }
    b.build().expect("generated networks are valid")
}

/// Random probability vector. Zeroed entries exercise deterministic and
/// impossible configurations.
fn distribution(rng: &mut impl Rng, d: usize, zeros: f64) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..d)
            .map(|_| if rng.gen_bool(zeros.clamp(0.0, 1.0)) { 0.0 } else { rng.gen_range(0.01..1.0) })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return raw.into_iter().map(|x| x / total).collect();
        }
    }
}

fn random_operator(rng: &mut impl Rng, d: usize, custom: bool) -> BaseOperator {
    let builtins = if d == 2 { 3 } else { 2 };
    let customs = if d == 4 { 4 } else { 3 };
    let choices = if custom { builtins + customs } else { builtins };
    match (rng.gen_range(0..choices), d) {
        (0, _) => BaseOperator::max(d),
        (1, _) => BaseOperator::sat_sum(d),
        (2, 2) => BaseOperator::and(),
        (c, _) => match c - builtins {
            // addition modulo d
            0 => custom_table(d, |a, b| (a + b) % d),
            // index minimum
            1 => custom_table(d, |a, b| a.min(b)),
            // four-level grading: 0 absorbs, 1 is neutral, 2 * 2 saturates at 3
            3 => custom_table(4, |a, b| if a == 0 || b == 0 { 0 } else { (a + b - 1).min(3) }),
            // maximum under a shuffled value order
            _ => {
                let mut rank: Vec<usize> = (0..d).collect();
                for i in (1..d).rev() {
                    rank.swap(i, rng.gen_range(0..=i));
                }
                let mut by_rank = vec![0; d];
                for (v, &r) in rank.iter().enumerate() {
                    by_rank[r] = v;
                }
                custom_table(d, |a, b| by_rank[rank[a].max(rank[b])])
            }
        },
    }
}

fn custom_table(d: usize, f: impl Fn(usize, usize) -> usize) -> BaseOperator {
    BaseOperator::custom((0..d).map(|a| (0..d).map(|b| f(a, b)).collect()).collect()).expect("square table")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot observe {requested} variables and keep a target: the network has {available} queryable variables")]
pub struct RandomQueryError {
    pub requested: usize,
    pub available: usize,
}

/// `count` queries, each with one uniformly chosen target and `n_obs`
/// other variables observed at uniformly chosen values. Deputies are never
/// picked.
pub fn random_queries(net: &Network, n_obs: usize, count: usize, seed: u64) -> Result<Vec<Query>, RandomQueryError> {
    let pool: Vec<VarId> = net.nodes().filter(|n| n.variable.kind != VarKind::Deputy).map(|n| n.id()).collect();
    if n_obs >= pool.len() {
        return Err(RandomQueryError { requested: n_obs, available: pool.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let picked = sample(&mut rng, pool.len(), n_obs + 1).into_vec();
            let target = pool[picked[0]];
            let evidence = picked[1..].iter().map(|&i| {
                let y = pool[i];
                (y, rng.gen_range(0..net.cardinality(y)))
            });
            let evidence: Vec<_> = evidence.collect();
            Query::new([target], evidence)
        })
        .collect())
}
