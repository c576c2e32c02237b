//! Small hand-parameterized networks with the classic shapes: three
//! causes feeding two noisy-OR effects that meet in a third, and one effect
//! with four binary causes. Parameters are made up; every number derived
//! from them in the tests is checked against the enumeration oracle.

use crate::model::{BaseOperator, Frame, Network, NetworkBuilder};

/// `a, b, c -> e1, e2` and `e1, e2 -> e3`, all binary, every effect a
/// noisy-OR.
pub fn three_causes_two_effects() -> Network {
    let mut b = NetworkBuilder::new();
    let [a, bb, c] = ["a", "b", "c"].map(|n| b.variable(n, Frame::binary()));
    let [e1, e2, e3] = ["e1", "e2", "e3"].map(|n| b.variable(n, Frame::binary()));
    b.cpt(a, &[], vec![0.7, 0.3]).cpt(bb, &[], vec![0.4, 0.6]).cpt(c, &[], vec![0.9, 0.1]);
    b.causal(e1, BaseOperator::or(), vec![(a, noisy(0.75)), (bb, noisy(0.5)), (c, noisy(0.25))], None);
    b.causal(e2, BaseOperator::or(), vec![(a, noisy(0.25)), (bb, noisy(0.6)), (c, noisy(0.875))], None);
    b.causal(e3, BaseOperator::or(), vec![(e1, noisy(0.625)), (e2, noisy(0.4))], None);
    b.build().expect("fixture is valid")
}

/// `c1..c4 -> e`, all binary, `e` a noisy-OR without leak.
pub fn four_causes() -> Network {
    let mut b = NetworkBuilder::new();
    let causes = ["c1", "c2", "c3", "c4"].map(|n| b.variable(n, Frame::binary()));
    let e = b.variable("e", Frame::binary());
    let priors = [0.2, 0.35, 0.5, 0.1];
    let strengths = [0.75, 0.6, 0.5, 0.4];
    for (&c, p) in causes.iter().zip(priors) {
        b.cpt(c, &[], vec![1.0 - p, p]);
    }
    b.causal(e, BaseOperator::or(), causes.iter().zip(strengths).map(|(&c, s)| (c, noisy(s))).collect(), None);
    b.build().expect("fixture is valid")
}

/// Contribution columns of a noisy-OR cause: silent when off, fires with
/// probability `p` when on.
pub fn noisy(p: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.0], vec![1.0 - p, p]]
}
