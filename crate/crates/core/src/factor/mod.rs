//! Dense factor tables and the arithmetic VE and VE1 are built from:
//! multiplication, heterogeneous combination (⊗), marginalization, evidence
//! restriction and normalization. Every arithmetic step is charged to a
//! [`CostLedger`].

mod ledger;
mod ops;

use std::collections::BTreeMap;

pub use ledger::{CostLedger, Limits, ResourceLimit};
pub use ops::{combine, combine_all, multiply, multiply_all, normalize, restrict, sum_out_var};

use crate::model::{BaseOperator, VarId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FactorError {
    #[error("variable {var} has cardinality {left} in one factor and {right} in the other")]
    CardinalityMismatch { var: VarId, left: usize, right: usize },
    #[error("variable {0} is convergent in one factor and regular in the other")]
    ConvergenceMismatch(VarId),
    #[error("no base combination operator for convergent variable {0}")]
    MissingOperator(VarId),
    #[error("operator for {var} is over {operator} values, variable has {cardinality}")]
    OperatorSize { var: VarId, operator: usize, cardinality: usize },
    #[error("variable {0} is not in the factor's scope")]
    NotInScope(VarId),
    #[error("value {value} is out of range for {var} with {cardinality} values")]
    ValueOutOfRange { var: VarId, value: usize, cardinality: usize },
    #[error("variable {0} appears twice in a scope")]
    DuplicateVariable(VarId),
    #[error("table has {found} entries, scope needs {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("entry {index} is {value}; factor entries must be finite and non-negative")]
    BadEntry { index: usize, value: f64 },
    #[error("impossible evidence: the observations have probability zero")]
    ImpossibleEvidence,
    #[error(transparent)]
    Limit(#[from] ResourceLimit),
}

/// One position of a factor's scope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScopeVar {
    pub id: VarId,
    pub cardinality: usize,
    pub convergent: bool,
}

impl ScopeVar {
    pub fn regular(id: VarId, cardinality: usize) -> Self {
        ScopeVar { id, cardinality, convergent: false }
    }

    pub fn convergent(id: VarId, cardinality: usize) -> Self {
        ScopeVar { id, cardinality, convergent: true }
    }
}

/// A non-negative function of a list of discrete variables, stored densely
/// in row-major order (last scope variable fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    scope: Vec<ScopeVar>,
    table: Vec<f64>,
    heterogeneous: bool,
}

impl Factor {
    pub fn new(scope: Vec<ScopeVar>, table: Vec<f64>) -> Result<Self, FactorError> {
        for (i, v) in scope.iter().enumerate() {
            if scope[..i].iter().any(|w| w.id == v.id) {
                return Err(FactorError::DuplicateVariable(v.id));
            }
        }
        let expected = scope
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.cardinality))
            .ok_or(FactorError::Limit(ResourceLimit::Memory))?;
        if table.len() != expected {
            return Err(FactorError::TableLength { expected, found: table.len() });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(FactorError::BadEntry { index, value });
        }
        Ok(Factor { scope, table, heterogeneous: false })
    }

    /// Internal constructor for tables produced by the algebra itself.
    pub(crate) fn from_parts(scope: Vec<ScopeVar>, table: Vec<f64>, heterogeneous: bool) -> Self {
        debug_assert_eq!(table.len(), scope.iter().map(|v| v.cardinality).product::<usize>());
        Factor { scope, table, heterogeneous }
    }

    pub fn scalar(value: f64) -> Self {
        Factor { scope: Vec::new(), table: vec![value], heterogeneous: false }
    }

    pub fn ones(scope: Vec<ScopeVar>) -> Self {
        let n = scope.iter().map(|v| v.cardinality).product();
        Factor { scope, table: vec![1.0; n], heterogeneous: false }
    }

    pub fn with_heterogeneous(mut self, heterogeneous: bool) -> Self {
        self.heterogeneous = heterogeneous;
        self
    }

    pub fn is_heterogeneous(&self) -> bool {
        self.heterogeneous
    }

    pub fn scope(&self) -> &[ScopeVar] {
        &self.scope
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        self.scope.iter().map(|v| v.id)
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn into_table(self) -> Vec<f64> {
        self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn position(&self, id: VarId) -> Option<usize> {
        self.scope.iter().position(|v| v.id == id)
    }

    pub fn contains(&self, id: VarId) -> bool {
        self.position(id).is_some()
    }

    pub fn convergent_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        self.scope.iter().filter(|v| v.convergent).map(|v| v.id)
    }

    pub fn sum(&self) -> f64 {
        self.table.iter().sum()
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.scope.len()];
        for i in (0..self.scope.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.scope[i + 1].cardinality;
        }
        strides
    }

    /// Entry for an assignment given in scope order.
    pub fn value(&self, assignment: &[usize]) -> f64 {
        let offset = assignment
            .iter()
            .zip(self.strides())
            .map(|(a, s)| a * s)
            .sum::<usize>();
        self.table[offset]
    }

    /// Entry for an assignment keyed by variable; extra keys are ignored.
    pub fn get(&self, assignment: &BTreeMap<VarId, usize>) -> Option<f64> {
        let values: Option<Vec<usize>> = self.scope.iter().map(|v| assignment.get(&v.id).copied()).collect();
        values.map(|vals| self.value(&vals))
    }

    /// The same function with its scope reordered to `order`, which must be
    /// a permutation of the scope.
    pub fn permuted(&self, order: &[VarId]) -> Result<Factor, FactorError> {
        if order.len() != self.scope.len() {
            return Err(FactorError::TableLength { expected: self.scope.len(), found: order.len() });
        }
        let positions = order
            .iter()
            .map(|&id| self.position(id).ok_or(FactorError::NotInScope(id)))
            .collect::<Result<Vec<_>, _>>()?;
        let scope: Vec<ScopeVar> = positions.iter().map(|&p| self.scope[p]).collect();
        let src_strides = self.strides();
        let mut out = Factor::from_parts(scope, vec![0.0; self.table.len()], self.heterogeneous);
        let dims: Vec<usize> = out.scope.iter().map(|v| v.cardinality).collect();
        let mut idx = vec![0usize; dims.len()];
        for cell in out.table.iter_mut() {
            let src: usize = idx.iter().zip(&positions).map(|(&i, &p)| i * src_strides[p]).sum();
            *cell = self.table[src];
            for k in (0..dims.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(out)
    }

    /// Maximum absolute entry-wise difference, aligning `other` to this
    /// factor's scope order. `None` when the scopes differ as sets.
    pub fn max_abs_diff(&self, other: &Factor) -> Option<f64> {
        let order: Vec<VarId> = self.ids().collect();
        let aligned = other.permuted(&order).ok()?;
        if aligned.scope.iter().zip(&self.scope).any(|(a, b)| a.cardinality != b.cardinality) {
            return None;
        }
        Some(
            self.table
                .iter()
                .zip(&aligned.table)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &Factor, tolerance: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tolerance)
    }
}

/// Base combination operators keyed by the convergent variable they belong to.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorMap(BTreeMap<VarId, BaseOperator>);

impl OperatorMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: VarId, op: BaseOperator) {
        self.0.insert(id, op);
    }

    pub fn get(&self, id: VarId) -> Option<&BaseOperator> {
        self.0.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &BaseOperator)> {
        self.0.iter().map(|(&k, v)| (k, v))
    }
}

impl FromIterator<(VarId, BaseOperator)> for OperatorMap {
    fn from_iter<T: IntoIterator<Item = (VarId, BaseOperator)>>(iter: T) -> Self {
        OperatorMap(iter.into_iter().collect())
    }
}
