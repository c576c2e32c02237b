use std::collections::BTreeSet;

use crate::error::InferenceError;
use crate::factor::{multiply_all, normalize, restrict, sum_out_var, CostLedger, Factor, FactorError, ScopeVar};
use crate::model::{Distribution, Network, Node, Query, VarId, VarKind};
use crate::transforms::expand_cpt;

/// Factor for a node's CPT with scope `(parents.., child)`. Deputies are
/// flagged convergent; everything else is regular.
pub fn cpt_factor(net: &Network, node: &Node, table: Vec<f64>) -> Factor {
    let scope: Vec<ScopeVar> = node
        .parents
        .iter()
        .chain([&node.id()])
        .map(|&id| {
            let var = net.variable(id);
            ScopeVar { id, cardinality: var.cardinality(), convergent: var.kind == VarKind::Deputy }
        })
        .collect();
    Factor::new(scope, table).expect("validated CPT matches its scope")
}

/// One CPT factor per node, causal-independence models expanded; all
/// scope entries regular. This is the factorization plain VE works on.
pub fn homogeneous_factors(net: &Network) -> Vec<Factor> {
    net.nodes()
        .map(|node| {
            let table = match &node.distribution {
                Distribution::Cpt(cpt) => cpt.table.clone(),
                Distribution::CausalIndependence(ci) => expand_cpt(ci).table,
            };
            let f = cpt_factor(net, node, table);
            let scope = f.scope().iter().map(|v| ScopeVar::regular(v.id, v.cardinality)).collect();
            Factor::new(scope, f.into_table()).expect("same shape")
        })
        .collect()
}

/// Removes the factors mentioning `z`, multiplies them left to right and
/// appends the product with `z` summed out. A `z` no factor mentions leaves
/// the list unchanged.
pub fn sum_out(factors: Vec<Factor>, z: VarId, ledger: &mut CostLedger) -> Result<Vec<Factor>, FactorError> {
    let (with, mut without): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.contains(z));
    if let Some(product) = multiply_all(&with, ledger)? {
        without.push(sum_out_var(&product, z, ledger)?);
    }
    Ok(without)
}

/// Checks that `order` lists exactly the variables of `net` outside the query.
pub(crate) fn check_coverage(net: &Network, query: &Query, order: &[VarId]) -> Result<(), InferenceError> {
    let expected: BTreeSet<VarId> = query.eliminable(net).into_iter().collect();
    let mut seen = BTreeSet::new();
    for &v in order {
        if !expected.contains(&v) {
            let what = if net.contains(v) { format!("{} is not eliminable", net.name(v)) } else { format!("unknown variable {v}") };
            return Err(InferenceError::OrderingCoverage(what));
        }
        if !seen.insert(v) {
            return Err(InferenceError::OrderingCoverage(format!("{} appears twice", net.name(v))));
        }
    }
    if let Some(missing) = expected.difference(&seen).next() {
        return Err(InferenceError::OrderingCoverage(format!("{} is missing", net.name(*missing))));
    }
    Ok(())
}

pub(crate) fn restrict_all(factors: Vec<Factor>, query: &Query) -> Result<Vec<Factor>, FactorError> {
    factors
        .into_iter()
        .map(|mut f| {
            for (&y, &value) in &query.evidence {
                if f.contains(y) {
                    f = restrict(&f, y, value)?;
                }
            }
            Ok(f)
        })
        .collect()
}

/// Aligns the posterior to the query's target order.
pub(crate) fn finish_posterior(h: Factor, query: &Query) -> Result<Factor, InferenceError> {
    let h = normalize(&h)?;
    Ok(h.permuted(&query.targets)?.with_heterogeneous(false))
}

/// Variable elimination: restrict on evidence, sum out along `order`,
/// multiply what is left and normalize. Causal-independence nodes are
/// used through their expanded CPTs.
pub fn ve(net: &Network, query: &Query, order: &[VarId], ledger: &mut CostLedger) -> Result<Factor, InferenceError> {
    query.check(net)?;
    check_coverage(net, query, order)?;
    let mut factors = restrict_all(homogeneous_factors(net), query)?;
    for &z in order {
        factors = sum_out(factors, z, ledger)?;
    }
    let h = product_or_one(&factors, ledger)?;
    // targets no factor mentions (cannot happen on a valid net) would be lost here
    debug_assert!(query.targets.iter().all(|t| h.contains(*t)));
    finish_posterior(h, query)
}

/// Product of a whole list, `1` when empty.
pub(crate) fn product_or_one(factors: &[Factor], ledger: &mut CostLedger) -> Result<Factor, FactorError> {
    Ok(multiply_all(factors, ledger)?.unwrap_or_else(|| Factor::scalar(1.0)))
}

