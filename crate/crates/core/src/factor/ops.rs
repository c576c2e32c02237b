use super::{CostLedger, Factor, FactorError, OperatorMap, ScopeVar};
use crate::model::{BaseOperator, VarId};

/// Ordinary product. The result scope is `f`'s scope followed by the
/// variables of `g` that `f` lacks.
pub fn multiply(f: &Factor, g: &Factor, ledger: &mut CostLedger) -> Result<Factor, FactorError> {
    let mut out = product(f, g, None, ledger)?;
    out.heterogeneous = f.heterogeneous || g.heterogeneous;
    Ok(out)
}

/// Heterogeneous combination `f ⊗ g`: shared convergent variables are
/// combined through their base operators, everything else multiplies.
/// With no shared convergent variable this is exactly [`multiply`], cost
/// included.
pub fn combine(f: &Factor, g: &Factor, ops: &OperatorMap, ledger: &mut CostLedger) -> Result<Factor, FactorError> {
    let mut out = product(f, g, Some(ops), ledger)?;
    out.heterogeneous = true;
    Ok(out)
}

/// Left fold of [`multiply`]; `None` for an empty list.
pub fn multiply_all<'a>(
    factors: impl IntoIterator<Item = &'a Factor>,
    ledger: &mut CostLedger,
) -> Result<Option<Factor>, FactorError> {
    let mut acc: Option<Factor> = None;
    for f in factors {
        acc = Some(match acc {
            None => f.clone(),
            Some(a) => multiply(&a, f, ledger)?,
        });
    }
    Ok(acc)
}

/// Left fold of [`combine`]; `None` for an empty list.
pub fn combine_all<'a>(
    factors: impl IntoIterator<Item = &'a Factor>,
    ops: &OperatorMap,
    ledger: &mut CostLedger,
) -> Result<Option<Factor>, FactorError> {
    let mut acc: Option<Factor> = None;
    for f in factors {
        acc = Some(match acc {
            None => f.clone(),
            Some(a) => combine(&a, f, ops, ledger)?,
        });
    }
    Ok(acc)
}

/// Shared implementation of product and ⊗. `ops = None` treats every shared
/// variable as regular.
fn product(f: &Factor, g: &Factor, ops: Option<&OperatorMap>, ledger: &mut CostLedger) -> Result<Factor, FactorError> {
    let mut scope: Vec<ScopeVar> = f.scope.clone();
    // (position in union scope, operator) for each shared convergent variable
    let mut shared: Vec<(usize, &BaseOperator)> = Vec::new();
    for gv in &g.scope {
        match f.scope.iter().position(|fv| fv.id == gv.id) {
            None => scope.push(*gv),
            Some(pos) => {
                let fv = f.scope[pos];
                if fv.cardinality != gv.cardinality {
                    return Err(FactorError::CardinalityMismatch {
                        var: gv.id,
                        left: fv.cardinality,
                        right: gv.cardinality,
                    });
                }
                if fv.convergent != gv.convergent {
                    return Err(FactorError::ConvergenceMismatch(gv.id));
                }
                if let (Some(ops), true) = (ops, fv.convergent) {
                    let op = ops.get(gv.id).ok_or(FactorError::MissingOperator(gv.id))?;
                    if op.cardinality() != fv.cardinality {
                        return Err(FactorError::OperatorSize {
                            var: gv.id,
                            operator: op.cardinality(),
                            cardinality: fv.cardinality,
                        });
                    }
                    shared.push((pos, op));
                }
            }
        }
    }

    let size = scope
        .iter()
        .try_fold(1usize, |acc, v| acc.checked_mul(v.cardinality))
        .ok_or(FactorError::Limit(super::ResourceLimit::Memory))?;
    ledger.allocate(size)?;

    let out_strides = strides_of(&scope);
    let f_strides = strides_in(f, &scope);
    let g_strides = strides_in(g, &scope);

    // Every (f, g, result) offset triple contributed by the shared
    // convergent variables. A single zero triple when there are none.
    let mut pairs: Vec<(usize, usize, usize)> = vec![(0, 0, 0)];
    for &(pos, op) in &shared {
        let d = scope[pos].cardinality;
        let mut next = Vec::with_capacity(pairs.len() * d * d);
        for &(fo, go, ro) in &pairs {
            for a in 0..d {
                for b in 0..d {
                    next.push((
                        fo + a * f_strides[pos],
                        go + b * g_strides[pos],
                        ro + op.apply(a, b) * out_strides[pos],
                    ));
                }
            }
        }
        pairs = next;
    }

    let free: Vec<usize> = (0..scope.len()).filter(|p| !shared.iter().any(|&(s, _)| s == *p)).collect();
    let dims: Vec<usize> = free.iter().map(|&p| scope[p].cardinality).collect();
    let sf: Vec<usize> = free.iter().map(|&p| f_strides[p]).collect();
    let sg: Vec<usize> = free.iter().map(|&p| g_strides[p]).collect();
    let sr: Vec<usize> = free.iter().map(|&p| out_strides[p]).collect();

    let mut table = vec![0.0; size];
    let mut idx = vec![0usize; dims.len()];
    let (mut fb, mut gb, mut rb) = (0usize, 0usize, 0usize);
    'cells: loop {
        for &(fo, go, ro) in &pairs {
            table[rb + ro] += f.table[fb + fo] * g.table[gb + go];
        }
        let mut k = dims.len();
        loop {
            if k == 0 {
                break 'cells;
            }
            k -= 1;
            idx[k] += 1;
            fb += sf[k];
            gb += sg[k];
            rb += sr[k];
            if idx[k] < dims[k] {
                break;
            }
            fb -= sf[k] * dims[k];
            gb -= sg[k] * dims[k];
            rb -= sr[k] * dims[k];
            idx[k] = 0;
        }
    }

    // one product per (free cell, split): S·∏dᵢ in total
    let terms = (dims.iter().product::<usize>() * pairs.len()) as u64;
    ledger.charge(terms, terms - size as u64);
    Ok(Factor::from_parts(scope, table, false))
}

fn strides_of(scope: &[ScopeVar]) -> Vec<usize> {
    let mut strides = vec![1; scope.len()];
    for i in (0..scope.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * scope[i + 1].cardinality;
    }
    strides
}

/// Stride of each `scope` position inside `f`, zero where `f` lacks the variable.
fn strides_in(f: &Factor, scope: &[ScopeVar]) -> Vec<usize> {
    let own = f.strides();
    scope
        .iter()
        .map(|v| f.position(v.id).map_or(0, |p| own[p]))
        .collect()
}

/// `Σ_z f`. Charges `|f| - |result|` additions.
pub fn sum_out_var(f: &Factor, z: VarId, ledger: &mut CostLedger) -> Result<Factor, FactorError> {
    let pos = f.position(z).ok_or(FactorError::NotInScope(z))?;
    let dz = f.scope[pos].cardinality;
    let inner: usize = f.scope[pos + 1..].iter().map(|v| v.cardinality).product();
    let outer: usize = f.scope[..pos].iter().map(|v| v.cardinality).product();
    ledger.allocate(outer * inner)?;
    let mut table = vec![0.0; outer * inner];
    for o in 0..outer {
        for v in 0..dz {
            let src = &f.table[(o * dz + v) * inner..(o * dz + v + 1) * inner];
            for (dst, s) in table[o * inner..(o + 1) * inner].iter_mut().zip(src) {
                *dst += s;
            }
        }
    }
    let mut scope = f.scope.clone();
    scope.remove(pos);
    ledger.charge(0, (f.table.len() - table.len()) as u64);
    Ok(Factor::from_parts(scope, table, f.heterogeneous))
}

/// The slice `z = value`, with `z` dropped from the scope. Free of charge.
pub fn restrict(f: &Factor, z: VarId, value: usize) -> Result<Factor, FactorError> {
    let pos = f.position(z).ok_or(FactorError::NotInScope(z))?;
    let dz = f.scope[pos].cardinality;
    if value >= dz {
        return Err(FactorError::ValueOutOfRange { var: z, value, cardinality: dz });
    }
    let inner: usize = f.scope[pos + 1..].iter().map(|v| v.cardinality).product();
    let outer: usize = f.scope[..pos].iter().map(|v| v.cardinality).product();
    let mut table = Vec::with_capacity(outer * inner);
    for o in 0..outer {
        let start = (o * dz + value) * inner;
        table.extend_from_slice(&f.table[start..start + inner]);
    }
    let mut scope = f.scope.clone();
    scope.remove(pos);
    Ok(Factor::from_parts(scope, table, f.heterogeneous))
}

/// Divides by the total mass. Divisions are not charged.
pub fn normalize(f: &Factor) -> Result<Factor, FactorError> {
    let total = f.sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(FactorError::ImpossibleEvidence);
    }
    let table = f.table.iter().map(|v| v / total).collect();
    Ok(Factor::from_parts(f.scope.clone(), table, f.heterogeneous))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::model::BaseOperator;

    fn reg(id: u32, card: usize) -> ScopeVar {
        ScopeVar::regular(VarId(id), card)
    }

    fn conv(id: u32, card: usize) -> ScopeVar {
        ScopeVar::convergent(VarId(id), card)
    }

    fn factor(scope: Vec<ScopeVar>, seed: u64) -> Factor {
        let n: usize = scope.iter().map(|v| v.cardinality).product();
        // small deterministic pseudo-random entries
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let table = (0..n)
            .map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((x >> 33) % 1000) as f64 / 1000.0
            })
            .collect();
        Factor::new(scope, table).unwrap()
    }

    /// Direct evaluation of the combination formula: for every result cell,
    /// sum over all pairs of convergent splits whose fold hits the cell.
    fn combine_by_definition(f: &Factor, g: &Factor, ops: &OperatorMap) -> BTreeMap<Vec<usize>, f64> {
        let mut scope: Vec<ScopeVar> = f.scope().to_vec();
        for v in g.scope() {
            if !f.contains(v.id) {
                scope.push(*v);
            }
        }
        let shared: Vec<VarId> = f
            .scope()
            .iter()
            .filter(|v| v.convergent && g.contains(v.id))
            .map(|v| v.id)
            .collect();
        let mut out = BTreeMap::new();
        for cell in assignments(&scope.iter().map(|v| v.cardinality).collect::<Vec<_>>()) {
            let base: BTreeMap<VarId, usize> = scope.iter().map(|v| v.id).zip(cell.iter().copied()).collect();
            let cards: Vec<usize> = shared.iter().map(|&id| f.scope()[f.position(id).unwrap()].cardinality).collect();
            let mut total = 0.0;
            for left in assignments(&cards) {
                for right in assignments(&cards) {
                    let hits = shared.iter().enumerate().all(|(k, &id)| {
                        ops.get(id).unwrap().apply(left[k], right[k]) == base[&id]
                    });
                    if !hits {
                        continue;
                    }
                    let mut fa = base.clone();
                    let mut ga = base.clone();
                    for (k, &id) in shared.iter().enumerate() {
                        fa.insert(id, left[k]);
                        ga.insert(id, right[k]);
                    }
                    total += f.get(&fa).unwrap() * g.get(&ga).unwrap();
                }
            }
            out.insert(cell, total);
        }
        out
    }

    fn assignments(cards: &[usize]) -> Vec<Vec<usize>> {
        let mut all = vec![vec![]];
        for &c in cards {
            all = all
                .into_iter()
                .flat_map(|prefix| {
                    (0..c).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        all
    }

    #[test]
    fn multiply_charges_union_size() {
        let mut ledger = CostLedger::new();
        let f = factor(vec![conv(0, 2), reg(1, 2)], 1);
        let g = factor(vec![conv(0, 2), reg(2, 2)], 2);
        let h = multiply(&f, &g, &mut ledger).unwrap();
        assert_eq!(h.ids().collect::<Vec<_>>(), vec![VarId(0), VarId(1), VarId(2)]);
        assert_eq!((ledger.multiplications(), ledger.additions()), (8, 0));
    }

    #[test]
    fn combine_charges_convergent_splits() {
        let mut ledger = CostLedger::new();
        let ops: OperatorMap = [(VarId(0), BaseOperator::or())].into_iter().collect();
        let f = factor(vec![conv(0, 2), reg(1, 2)], 1);
        let g = factor(vec![conv(0, 2), reg(2, 2)], 2);
        combine(&f, &g, &ops, &mut ledger).unwrap();
        assert_eq!((ledger.multiplications(), ledger.additions()), (16, 8));
    }

    #[test]
    fn multiply_by_ones_is_identity() {
        let f = factor(vec![reg(0, 3), reg(1, 2)], 7);
        let ones = Factor::ones(f.scope().to_vec());
        let h = multiply(&f, &ones, &mut CostLedger::new()).unwrap();
        assert_eq!(h.table(), f.table());
    }

    #[test]
    fn disjoint_product_is_outer_product() {
        let f = Factor::new(vec![reg(0, 2)], vec![0.2, 0.8]).unwrap();
        let g = Factor::new(vec![reg(1, 2)], vec![0.5, 0.5]).unwrap();
        let h = multiply(&f, &g, &mut CostLedger::new()).unwrap();
        assert_eq!(h.table(), &[0.1, 0.1, 0.4, 0.4]);
    }

    #[test]
    fn unary_or_combination() {
        let ops: OperatorMap = [(VarId(0), BaseOperator::or())].into_iter().collect();
        let (x0, x1, y0, y1) = (0.3, 0.7, 0.6, 0.4);
        let f = Factor::new(vec![conv(0, 2)], vec![x0, x1]).unwrap();
        let g = Factor::new(vec![conv(0, 2)], vec![y0, y1]).unwrap();
        let h = combine(&f, &g, &ops, &mut CostLedger::new()).unwrap();
        assert!((h.table()[0] - x0 * y0).abs() < 1e-15);
        assert!((h.table()[1] - (x0 * y1 + x1 * y0 + x1 * y1)).abs() < 1e-15);
        assert!(h.is_heterogeneous());
    }

    #[test]
    fn combine_without_shared_convergent_equals_multiply() {
        let ops = OperatorMap::new();
        let f = factor(vec![conv(0, 2), reg(1, 3)], 3);
        let g = factor(vec![reg(1, 3), conv(2, 2)], 4);
        let mut l1 = CostLedger::new();
        let mut l2 = CostLedger::new();
        let a = combine(&f, &g, &ops, &mut l1).unwrap();
        let b = multiply(&f, &g, &mut l2).unwrap();
        assert_eq!(a.table(), b.table());
        assert_eq!(l1.multiplications(), l2.multiplications());
        assert_eq!(l1.additions(), l2.additions());
    }

    #[test]
    fn combine_matches_definition_with_two_shared_convergent() {
        let ops: OperatorMap = [
            (VarId(0), BaseOperator::max(3)),
            (VarId(1), BaseOperator::sat_sum(3)),
        ]
        .into_iter()
        .collect();
        let f = factor(vec![conv(0, 3), reg(2, 2), conv(1, 3), reg(3, 2)], 11);
        let g = factor(vec![conv(1, 3), reg(4, 2), reg(2, 2), conv(0, 3)], 12);
        let h = combine(&f, &g, &ops, &mut CostLedger::new()).unwrap();
        let expected = combine_by_definition(&f, &g, &ops);
        for (cell, value) in expected {
            assert!((h.value(&cell) - value).abs() < 1e-12, "{cell:?}");
        }
    }

    #[test]
    fn missing_operator_is_an_error() {
        let f = factor(vec![conv(0, 2)], 1);
        let err = combine(&f, &f, &OperatorMap::new(), &mut CostLedger::new()).unwrap_err();
        assert_eq!(err, FactorError::MissingOperator(VarId(0)));
    }

    #[test]
    fn cardinality_mismatch_is_an_error() {
        let f = factor(vec![reg(0, 2)], 1);
        let g = factor(vec![reg(0, 3)], 1);
        assert!(matches!(
            multiply(&f, &g, &mut CostLedger::new()),
            Err(FactorError::CardinalityMismatch { .. })
        ));
    }

    #[test]
    fn sum_out_costs_and_values() {
        let mut ledger = CostLedger::new();
        let scope = (0..5).map(|i| reg(i, 2)).collect();
        let f = factor(scope, 5);
        let g = sum_out_var(&f, VarId(1), &mut ledger).unwrap();
        assert_eq!(ledger.additions(), 16);
        assert_eq!(g.len(), 16);

        let z = Factor::new(vec![reg(9, 2)], vec![0.3, 0.7]).unwrap();
        let s = sum_out_var(&z, VarId(9), &mut CostLedger::new()).unwrap();
        assert!(s.scope().is_empty());
        assert!((s.table()[0] - 1.0).abs() < 1e-15);

        let f = factor(vec![reg(0, 2), reg(1, 3)], 9);
        let g = sum_out_var(&f, VarId(1), &mut CostLedger::new()).unwrap();
        for a in 0..2 {
            let direct: f64 = (0..3).map(|z| f.value(&[a, z])).sum();
            assert!((g.value(&[a]) - direct).abs() < 1e-15);
        }
        assert!(matches!(sum_out_var(&f, VarId(5), &mut CostLedger::new()), Err(FactorError::NotInScope(_))));
    }

    #[test]
    fn restrict_slices() {
        let identity = Factor::new(vec![conv(0, 2), reg(1, 2)], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let r = restrict(&identity, VarId(1), 0).unwrap();
        assert_eq!(r.table(), &[1.0, 0.0]);
        assert_eq!(r.ids().collect::<Vec<_>>(), vec![VarId(0)]);

        let f = factor(vec![reg(0, 3), reg(1, 2)], 21);
        let col = restrict(&f, VarId(1), 1).unwrap();
        for a in 0..3 {
            assert_eq!(col.value(&[a]), f.value(&[a, 1]));
        }
        assert!(matches!(restrict(&f, VarId(1), 2), Err(FactorError::ValueOutOfRange { .. })));
        assert!(matches!(restrict(&f, VarId(4), 0), Err(FactorError::NotInScope(_))));
    }

    #[test]
    fn normalize_handles_zero_mass() {
        let f = Factor::new(vec![reg(0, 2)], vec![2.0, 2.0]).unwrap();
        assert_eq!(normalize(&f).unwrap().table(), &[0.5, 0.5]);
        let z = Factor::new(vec![reg(0, 2)], vec![0.0, 0.0]).unwrap();
        assert_eq!(normalize(&z), Err(FactorError::ImpossibleEvidence));
    }

    #[test]
    fn memory_limit_trips_on_allocation() {
        use crate::factor::{Limits, ResourceLimit};
        let mut ledger = CostLedger::with_limits(Limits { time: None, max_cells: Some(10) });
        let f = factor(vec![reg(0, 2), reg(1, 2)], 1);
        let g = factor(vec![reg(2, 2), reg(3, 2)], 2);
        assert_eq!(
            multiply(&f, &g, &mut ledger).unwrap_err(),
            FactorError::Limit(ResourceLimit::Memory)
        );
    }
}
