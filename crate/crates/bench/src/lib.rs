//! Workloads for the engine benchmarks.

use cive::fixtures::noisy;
use cive::model::{BaseOperator, Frame, Network, NetworkBuilder};

/// `causes` binary roots, each feeding every one of `effects` noisy-OR
/// effects. Wide shared families are where the engines differ most.
pub fn bipartite(causes: usize, effects: usize) -> Network {
    let mut b = NetworkBuilder::new();
    let cs: Vec<_> = (0..causes).map(|i| b.variable(format!("c{i}"), Frame::binary())).collect();
    for (i, &c) in cs.iter().enumerate() {
        let p = 0.05 + 0.4 * i as f64 / causes as f64;
        b.cpt(c, &[], vec![1.0 - p, p]);
    }
    for j in 0..effects {
        let e = b.variable(format!("e{j}"), Frame::binary());
        let contributions = cs
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, noisy(0.3 + 0.6 * ((i + j) % causes) as f64 / causes as f64)))
            .collect();
        b.causal(e, BaseOperator::or(), contributions, None);
    }
    b.build().expect("bipartite network is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let net = bipartite(5, 3);
        assert_eq!(net.nodes().count(), 8);
        assert!(net.nodes().filter(|n| n.ci().is_some()).all(|n| n.parents.len() == 5));
    }
}
