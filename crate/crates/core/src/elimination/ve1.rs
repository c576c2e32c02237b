use std::fmt;

use crate::error::InferenceError;
use crate::factor::{combine_all, multiply, multiply_all, sum_out_var, CostLedger, Factor, OperatorMap, ScopeVar};
use crate::model::{Distribution, Network, Query, VarId, VarKind};
use crate::transforms::DeputationMap;

use super::ordering::is_legitimate_for;
use super::ve::{check_coverage, cpt_factor, finish_posterior, restrict_all};

/// A pair of factor lists whose joint value is
/// `(product of homogeneous) x (⊗-fold of heterogeneous)`, together with the
/// operators of the convergent variables and the deputy pairing.
#[derive(Clone, Debug)]
pub struct HeterogeneousFactorization {
    pub homogeneous: Vec<Factor>,
    pub heterogeneous: Vec<Factor>,
    pub operators: OperatorMap,
    pub deputies: DeputationMap,
}

/// A broken tidiness condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TidinessViolation {
    /// A present deputy is not in exactly one homogeneous factor, its deputing function.
    DeputyNotIsolated { deputy: VarId, homogeneous_factors: usize },
    /// A homogeneous factor other than a deputing function mentions a convergent variable.
    ConvergentInHomogeneous { factor: usize, variable: VarId },
    /// A heterogeneous factor of a fresh deputation has other than one convergent variable.
    ConvergentCount { factor: usize, count: usize },
}

impl fmt::Display for TidinessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TidinessViolation::DeputyNotIsolated { deputy, homogeneous_factors } => write!(
                f,
                "deputy {deputy} is in {homogeneous_factors} homogeneous factors, expected only its deputing function"
            ),
            TidinessViolation::ConvergentInHomogeneous { factor, variable } => {
                write!(f, "homogeneous factor {factor} contains convergent {variable} but is not a deputing function")
            }
            TidinessViolation::ConvergentCount { factor, count } => {
                write!(f, "heterogeneous factor {factor} has {count} convergent variables")
            }
        }
    }
}

/// Scope of the factor created by one `sum_out1` step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationStep {
    pub eliminated: VarId,
    /// `None` when nothing mentioned the variable.
    pub created: Option<Vec<VarId>>,
    pub heterogeneous: bool,
}

impl HeterogeneousFactorization {
    /// Homogeneous factors are the CPTs (old regular variables and deputing
    /// functions), heterogeneous ones the contributing factors of deputies,
    /// each list in node id order.
    pub fn from_deputation_network(net: &Network) -> Result<Self, InferenceError> {
        let mut homogeneous = Vec::new();
        let mut heterogeneous = Vec::new();
        let mut operators = OperatorMap::new();
        for node in net.nodes() {
            match (&node.distribution, node.variable.kind) {
                (_, VarKind::Convergent) => return Err(InferenceError::NotDeputation),
                (Distribution::Cpt(cpt), _) => homogeneous.push(cpt_factor(net, node, cpt.table.clone())),
                (Distribution::CausalIndependence(ci), _) => {
                    let effect = ScopeVar::convergent(node.id(), node.variable.cardinality());
                    for f in ci.all_factors() {
                        let (scope, table) = match f.cause {
                            Some(c) => (vec![effect, ScopeVar::regular(c, f.cause_cardinality)], f.table.clone()),
                            None => (vec![effect], f.table.clone()),
                        };
                        let factor = Factor::new(scope, table).expect("validated contribution").with_heterogeneous(true);
                        heterogeneous.push(factor);
                    }
                    operators.insert(node.id(), ci.operator.clone());
                }
            }
        }
        Ok(HeterogeneousFactorization { homogeneous, heterogeneous, operators, deputies: DeputationMap::from_network(net) })
    }

    fn mentions(&self, z: VarId) -> bool {
        self.homogeneous.iter().chain(&self.heterogeneous).any(|f| f.contains(z))
    }

    /// Variables still mentioned by some factor.
    pub fn variables(&self) -> std::collections::BTreeSet<VarId> {
        self.homogeneous.iter().chain(&self.heterogeneous).flat_map(|f| f.ids()).collect()
    }

    /// Sums `z` out: the homogeneous factors with `z` are multiplied into
    /// `f`, the heterogeneous ones ⊗-combined into `g`; `Σ_z f` goes back to
    /// the homogeneous list when there is no `g`, otherwise `Σ_z f·g` joins
    /// the heterogeneous list.
    ///
    /// Refuses to sum out a new regular variable while its deputy is still around.
    pub fn sum_out1(&mut self, z: VarId, ledger: &mut CostLedger) -> Result<EliminationStep, InferenceError> {
        if let Some(deputy) = self.deputies.deputy_of(z) {
            if self.mentions(deputy) {
                return Err(InferenceError::IllegitimateElimination(z));
            }
        }
        let (f_with, f_without): (Vec<Factor>, Vec<Factor>) =
            std::mem::take(&mut self.homogeneous).into_iter().partition(|f| f.contains(z));
        let (g_with, g_without): (Vec<Factor>, Vec<Factor>) =
            std::mem::take(&mut self.heterogeneous).into_iter().partition(|f| f.contains(z));
        self.homogeneous = f_without;
        self.heterogeneous = g_without;

        let f = multiply_all(&f_with, ledger)?;
        let g = combine_all(&g_with, &self.operators, ledger)?;
        let (created, heterogeneous) = match (f, g) {
            (None, None) => return Ok(EliminationStep { eliminated: z, created: None, heterogeneous: false }),
            (Some(f), None) => {
                let h = sum_out_var(&f, z, ledger)?.with_heterogeneous(false);
                let scope = h.ids().collect();
                self.homogeneous.push(h);
                (scope, false)
            }
            (f, Some(g)) => {
                let fg = match f {
                    Some(f) => multiply(&f, &g, ledger)?,
                    None => g,
                };
                let h = sum_out_var(&fg, z, ledger)?.with_heterogeneous(true);
                let scope = h.ids().collect();
                self.heterogeneous.push(h);
                (scope, true)
            }
        };
        Ok(EliminationStep { eliminated: z, created: Some(created), heterogeneous })
    }

    /// `(product of homogeneous) x (⊗-fold of heterogeneous)`.
    pub fn evaluate(&self, ledger: &mut CostLedger) -> Result<Factor, InferenceError> {
        let h1 = multiply_all(&self.homogeneous, ledger)?;
        let h2 = combine_all(&self.heterogeneous, &self.operators, ledger)?;
        Ok(match (h1, h2) {
            (Some(h1), Some(h2)) => multiply(&h1, &h2, ledger)?,
            (Some(h), None) | (None, Some(h)) => h,
            (None, None) => Factor::scalar(1.0),
        })
    }

    /// Checks both tidiness conditions: every deputy still present occurs in
    /// exactly one homogeneous factor, its (possibly restricted) deputing
    /// function; and no other homogeneous factor holds a convergent variable.
    pub fn tidiness_violations(&self) -> Vec<TidinessViolation> {
        let mut out = Vec::new();
        let present = self.variables();
        let is_deputing = |f: &Factor, deputy: VarId| {
            let partner = self.deputies.partner_of(deputy);
            f.ids().all(|v| v == deputy || Some(v) == partner)
        };
        for (deputy, _) in self.deputies.pairs() {
            if !present.contains(&deputy) {
                continue;
            }
            let holders: Vec<&Factor> = self.homogeneous.iter().filter(|f| f.contains(deputy)).collect();
            if holders.len() != 1 || !is_deputing(holders[0], deputy) {
                out.push(TidinessViolation::DeputyNotIsolated { deputy, homogeneous_factors: holders.len() });
            }
        }
        for (i, f) in self.homogeneous.iter().enumerate() {
            let convergent: Vec<VarId> = f.convergent_ids().collect();
            let ok = match convergent.as_slice() {
                [] => true,
                [d] => is_deputing(f, *d),
                _ => false,
            };
            if !ok {
                out.push(TidinessViolation::ConvergentInHomogeneous { factor: i, variable: convergent[0] });
            }
        }
        out
    }

    /// The extra property of a freshly deputed network: every heterogeneous
    /// factor holds exactly one convergent variable.
    pub fn single_convergent_violations(&self) -> Vec<TidinessViolation> {
        self.heterogeneous
            .iter()
            .enumerate()
            .filter_map(|(i, f)| {
                let count = f.convergent_ids().count();
                (count != 1).then_some(TidinessViolation::ConvergentCount { factor: i, count })
            })
            .collect()
    }

    /// Restricts every factor on the query's evidence.
    pub fn restrict(&mut self, query: &Query) -> Result<(), InferenceError> {
        self.homogeneous = restrict_all(std::mem::take(&mut self.homogeneous), query)?;
        self.heterogeneous = restrict_all(std::mem::take(&mut self.heterogeneous), query)?;
        Ok(())
    }
}

/// VE1 on a deputation network, returning the posterior and the factor
/// created at each step.
pub fn ve1_traced(
    net: &Network,
    query: &Query,
    order: &[VarId],
    ledger: &mut CostLedger,
) -> Result<(Factor, Vec<EliminationStep>), InferenceError> {
    query.check(net)?;
    let mut hf = HeterogeneousFactorization::from_deputation_network(net)?;
    check_coverage(net, query, order)?;
    if !is_legitimate_for(order, &hf.deputies) {
        return Err(InferenceError::IllegitimateOrdering);
    }
    hf.restrict(query)?;
    let mut trace = Vec::with_capacity(order.len());
    for &z in order {
        trace.push(hf.sum_out1(z, ledger)?);
    }
    let h = hf.evaluate(ledger)?;
    Ok((finish_posterior(h, query)?, trace))
}

/// VE1: restrict on evidence, `sum_out1` along a legitimate ordering,
/// evaluate what is left and normalize.
pub fn ve1(net: &Network, query: &Query, order: &[VarId], ledger: &mut CostLedger) -> Result<Factor, InferenceError> {
    ve1_traced(net, query, order, ledger).map(|(f, _)| f)
}
