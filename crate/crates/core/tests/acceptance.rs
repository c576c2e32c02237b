//! Acceptance suite. Runs without the test harness so that every criterion
//! prints exactly one PASS/FAIL line; the process fails if any criterion does.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cive::bench::{bench_run, BenchConfig, RunStatus};
use cive::elimination::{is_legitimate_for, ve, ve1_traced};
use cive::engine::{answer, Engine, OrderStrategy};
use cive::factor::{combine, multiply, sum_out_var, CostLedger, Factor, Limits, OperatorMap, ScopeVar};
use cive::fixtures::{four_causes, three_causes_two_effects};
use cive::model::{BaseOperator, CiSpec, ContributingFactor, Network, OperatorKind, Query, VarId};
use cive::oracle::{enumerate_joint, marginal, posterior_by_enumeration, random_network, random_queries, RandomNetworkConfig};
use cive::transforms::{depute, expand_all, expand_cpt, parent_divorce, temporal_transform};
use cive::InferenceError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact operation counts on the four-cause network", exact_counts),
        ("VE1 trace on the three-cause deputation", trace_replay),
        ("cross-engine agreement with enumeration on random networks", cross_engine),
        ("transforms preserve posteriors", semantics_preserved),
        ("⊗ algebra laws on random factors", combination_algebra),
        ("noisy-OR expansion matches the closed form", noisy_or_closed_form),
        ("tidiness after every step of every legitimate ordering", tidiness),
        ("benchmark replay: 50-node network, 150 queries", bench_replay),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({secs:.2}s): {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.2}s): {reason}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn given(names: &[&str]) -> OrderStrategy {
    OrderStrategy::Given(names.iter().map(|s| s.to_string()).collect())
}

fn id(net: &Network, name: &str) -> VarId {
    net.by_name(name).unwrap_or_else(|| panic!("no variable `{name}`"))
}

// 1 ------------------------------------------------------------------------

fn exact_counts() -> Outcome {
    let net = four_causes();
    let query = Query::marginal(id(&net, "e"));
    let cases = [
        (Engine::Ve, given(&["c1", "c2", "c3", "c4"]), (60, 30)),
        (Engine::Ve1, given(&["c1", "c2", "c3", "c4", "e′"]), (32, 16)),
        (Engine::Pd, given(&["c1", "c2", "c3", "c4", "e_pd1", "e_pd2"]), (36, 18)),
        (Engine::Tt, given(&["c1", "e_tt1", "c2", "e_tt2", "c3", "e_tt3", "c4"]), (40, 20)),
    ];
    let mut mults = Vec::new();
    for (engine, order, expected) in &cases {
        let mut ledger = CostLedger::new();
        answer(&net, &query, *engine, order, &mut ledger).map_err(|e| format!("{engine}: {e}"))?;
        let got = (ledger.multiplications(), ledger.additions());
        ensure(got == *expected, || format!("{engine}: got {got:?}, expected {expected:?}"))?;
        mults.push((*engine, got.0));
    }
    let m = |e: Engine| mults.iter().find(|(x, _)| *x == e).map(|(_, m)| *m).unwrap();
    ensure(m(Engine::Ve1) < m(Engine::Pd) && m(Engine::Pd) < m(Engine::Tt) && m(Engine::Tt) < m(Engine::Ve), || {
        format!("ranking broken: {mults:?}")
    })?;

    let order: Vec<VarId> = ["c1", "c2", "c3", "c4"].iter().map(|n| id(&net, n)).collect();
    let started = Instant::now();
    ve(&net, &query, &order, &mut CostLedger::new()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_millis(1), || format!("VE took {elapsed:?}"))?;
    Ok(format!("ve 60/30, ve1 32/16, pd 36/18, tt 40/20; ve1 < pd < tt < ve; ve in {elapsed:?}"))
}

// 2 ------------------------------------------------------------------------

fn trace_replay() -> Outcome {
    let original = three_causes_two_effects();
    let dep = depute(&original).map_err(|e| e.to_string())?.network;
    let order: Vec<VarId> = ["a", "b", "c", "e1′", "e2′", "e1", "e3′"].iter().map(|n| id(&dep, n)).collect();
    let query = Query::new([id(&dep, "e2")], [(id(&dep, "e3"), 0)]);
    let (posterior, trace) = ve1_traced(&dep, &query, &order, &mut CostLedger::new()).map_err(|e| e.to_string())?;

    let expected: [&[&str]; 7] = [
        &["e1′", "e2′"],
        &["e1′", "e2′"],
        &["e1′", "e2′"],
        &["e1", "e2′"],
        &["e1", "e2"],
        &["e3′", "e2"],
        &["e2"],
    ];
    ensure(trace.len() == expected.len(), || format!("{} steps", trace.len()))?;
    for (step, want) in trace.iter().zip(expected) {
        let got: BTreeSet<VarId> = step.created.clone().unwrap_or_default().into_iter().collect();
        let want: BTreeSet<VarId> = want.iter().map(|n| id(&dep, n)).collect();
        ensure(got == want, || {
            let names: Vec<&str> = got.iter().map(|&v| dep.name(v)).collect();
            format!("eliminating {} created {names:?}", dep.name(step.eliminated))
        })?;
    }
    let oracle = posterior_by_enumeration(&original, &Query::new([id(&original, "e2")], [(id(&original, "e3"), 0)]))
        .map_err(|e| e.to_string())?;
    let diff = posterior.max_abs_diff(&oracle).unwrap_or(f64::INFINITY);
    ensure(diff <= 1e-12, || format!("normalized result differs from the oracle by {diff:e}"))?;
    Ok(format!("7 scopes match (as variable sets); P(e2 | e3=0) = {:?}, oracle Δ = {diff:.1e}", posterior.table()))
}

// 3 ------------------------------------------------------------------------

fn uses_custom(net: &Network) -> bool {
    net.nodes().filter_map(|n| n.ci()).any(|ci| ci.operator.kind() == OperatorKind::Custom)
}

fn cross_engine() -> Outcome {
    let started = Instant::now();
    let config = RandomNetworkConfig { nodes: 8, max_parents: 3, max_cardinality: 3, convergent_fraction: 0.6, custom_operators: true, ..Default::default() };
    let engines = [Engine::Ve, Engine::Ve1, Engine::Pd, Engine::Tt];
    let strategies = [OrderStrategy::MinDeficiency, OrderStrategy::MaxCardinality];
    let (mut nets, mut customs, mut answered, mut impossible) = (0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    for seed in 0..240u64 {
        let net = random_network(seed, &config);
        nets += 1;
        customs += uses_custom(&net) as usize;
        let n_obs = (seed % 4) as usize;
        for query in random_queries(&net, n_obs, 3, seed).map_err(|e| e.to_string())? {
            let oracle = posterior_by_enumeration(&net, &query);
            for engine in engines {
                let strategy = &strategies[(seed % 2) as usize];
                let got = answer(&net, &query, engine, strategy, &mut CostLedger::new());
                match (&oracle, got) {
                    (Ok(o), Ok(p)) => {
                        let d = p.max_abs_diff(o).unwrap_or(f64::INFINITY);
                        worst = worst.max(d);
                        ensure(d <= 1e-9, || format!("seed {seed}, {engine}: off by {d:e} on {query:?}"))?;
                        answered += 1;
                    }
                    (Err(InferenceError::ImpossibleEvidence), Err(InferenceError::ImpossibleEvidence)) => impossible += 1,
                    (o, p) => return Err(format!("seed {seed}, {engine}: oracle {o:?} vs engine {p:?}")),
                }
            }
        }
    }
    ensure(customs > 0, || "no custom operator in the batch".into())?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{nets} networks ({customs} with custom operators), {answered} engine answers within 1e-9 (max Δ {worst:.1e}), {impossible} impossible-evidence agreements, {elapsed:.2?}"
    ))
}

// 4 ------------------------------------------------------------------------

fn semantics_preserved() -> Outcome {
    let config = RandomNetworkConfig { nodes: 6, max_parents: 3, max_cardinality: 3, convergent_fraction: 0.7, custom_operators: true, ..Default::default() };
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for seed in 0..100u64 {
        let net = random_network(1000 + seed, &config);
        let transformed: [(&str, Network); 4] = [
            ("depute", depute(&net).map_err(|e| e.to_string())?.network),
            ("parent divorcing", parent_divorce(&net)),
            ("temporal transformation", temporal_transform(&net)),
            ("expansion", expand_all(&net)),
        ];
        // the joint over the original variables must survive each transform
        let originals: Vec<VarId> = net.ids().collect();
        let reference = marginal(&enumerate_joint(&net).map_err(|e| e.to_string())?, &originals);
        let mut queries = random_queries(&net, 1, 4, seed).map_err(|e| e.to_string())?;
        queries.extend(random_queries(&net, 0, 2, seed).map_err(|e| e.to_string())?);
        for (what, t) in &transformed {
            let joint = marginal(&enumerate_joint(t).map_err(|e| e.to_string())?, &originals);
            let d = joint.max_abs_diff(&reference).unwrap_or(f64::INFINITY);
            worst = worst.max(d);
            ensure(d <= 1e-10, || format!("seed {seed}: {what} changes the joint by {d:e}"))?;
            for q in &queries {
                match (posterior_by_enumeration(&net, q), posterior_by_enumeration(t, q)) {
                    (Ok(a), Ok(b)) => {
                        let d = a.max_abs_diff(&b).unwrap_or(f64::INFINITY);
                        worst = worst.max(d);
                        ensure(d <= 1e-10, || format!("seed {seed}: {what} changes {q:?} by {d:e}"))?;
                    }
                    (Err(InferenceError::ImpossibleEvidence), Err(InferenceError::ImpossibleEvidence)) => {}
                    (a, b) => return Err(format!("seed {seed}: {what}: {a:?} vs {b:?}")),
                }
                checks += 1;
            }
        }
    }
    Ok(format!("100 networks × 4 transforms: joints and {checks} posteriors within 1e-10 (max Δ {worst:.1e})"))
}

// 5 ------------------------------------------------------------------------

/// Pool of variables for random factors: two convergent, three regular.
struct Pool {
    vars: Vec<ScopeVar>,
    ops: OperatorMap,
}

impl Pool {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut vars = Vec::new();
        let mut ops = OperatorMap::new();
        for i in 0..2u32 {
            let d = rng.gen_range(2..=3);
            let op = match rng.gen_range(0..3) {
                0 => BaseOperator::max(d),
                1 => BaseOperator::sat_sum(d),
                _ => BaseOperator::custom((0..d).map(|a| (0..d).map(|b| (a + b) % d).collect()).collect()).unwrap(),
            };
            vars.push(ScopeVar::convergent(VarId(i), d));
            ops.insert(VarId(i), op);
        }
        for i in 2..5u32 {
            vars.push(ScopeVar::regular(VarId(i), rng.gen_range(2..=3)));
        }
        Pool { vars, ops }
    }

    fn factor(&self, rng: &mut ChaCha8Rng, allowed: impl Fn(&ScopeVar) -> bool) -> Factor {
        let mut scope: Vec<ScopeVar> = self.vars.iter().copied().filter(|v| allowed(v) && rng.gen_bool(0.5)).collect();
        // random order
        for i in (1..scope.len()).rev() {
            scope.swap(i, rng.gen_range(0..=i));
        }
        let size: usize = scope.iter().map(|v| v.cardinality).product();
        Factor::new(scope, (0..size).map(|_| rng.gen::<f64>()).collect()).unwrap()
    }
}

fn close(a: &Factor, b: &Factor, law: &str, trial: usize) -> Result<f64, String> {
    let d = a.max_abs_diff(b).ok_or_else(|| format!("{law}, trial {trial}: scopes differ"))?;
    ensure(d <= 1e-12, || format!("{law}, trial {trial}: off by {d:e}"))?;
    Ok(d)
}

fn combination_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 600;
    let l = &mut CostLedger::new();
    let mut worst: f64 = 0.0;
    let mut exchange_cases = 0;
    let mut distributive_cases = 0;
    for t in 0..trials {
        let pool = Pool::new(&mut rng);
        let ops = &pool.ops;
        let any = |_: &ScopeVar| true;
        let (f, g, h) = (pool.factor(&mut rng, any), pool.factor(&mut rng, any), pool.factor(&mut rng, any));
        let err = |e: cive::factor::FactorError| e.to_string();

        // commutativity and associativity
        worst = worst.max(close(&combine(&f, &g, ops, l).map_err(err)?, &combine(&g, &f, ops, l).map_err(err)?, "commutativity", t)?);
        let left = combine(&combine(&f, &g, ops, l).map_err(err)?, &h, ops, l).map_err(err)?;
        let right = combine(&f, &combine(&g, &h, ops, l).map_err(err)?, ops, l).map_err(err)?;
        worst = worst.max(close(&left, &right, "associativity", t)?);

        // no shared convergent variable: ⊗ is the product
        let fc: BTreeSet<VarId> = f.convergent_ids().collect();
        let g2 = pool.factor(&mut rng, |v| !fc.contains(&v.id));
        worst = worst.max(close(&combine(&f, &g2, ops, l).map_err(err)?, &multiply(&f, &g2, l).map_err(err)?, "reduction to product", t)?);

        // Σ_z (f ⊗ g) = (Σ_z f) ⊗ g and Σ_z (f g) = (Σ_z f) g for z in f only
        let z = pool.vars[rng.gen_range(0..pool.vars.len())];
        let g = pool.factor(&mut rng, |v| v.id != z.id);
        let f = {
            let rest = pool.factor(&mut rng, |v| v.id != z.id);
            let unit = Factor::new(vec![z], (0..z.cardinality).map(|_| rng.gen::<f64>()).collect()).unwrap();
            multiply(&rest, &unit, l).map_err(err)?
        };
        {
            let z = z.id;
            distributive_cases += 1;
            let a = sum_out_var(&combine(&f, &g, ops, l).map_err(err)?, z, l).map_err(err)?;
            let b = combine(&sum_out_var(&f, z, l).map_err(err)?, &g, ops, l).map_err(err)?;
            worst = worst.max(close(&a, &b, "distributivity of ⊗", t)?);
            let a = sum_out_var(&multiply(&f, &g, l).map_err(err)?, z, l).map_err(err)?;
            let b = multiply(&sum_out_var(&f, z, l).map_err(err)?, &g, l).map_err(err)?;
            worst = worst.max(close(&a, &b, "distributivity of ×", t)?);
        }

        // g (f ⊗ h) = (g f) ⊗ h when g and h share no convergent variable
        let gc: BTreeSet<VarId> = g.convergent_ids().collect();
        let h2 = pool.factor(&mut rng, |v| !gc.contains(&v.id));
        exchange_cases += 1;
        let a = multiply(&g, &combine(&f, &h2, ops, l).map_err(err)?, l).map_err(err)?;
        let b = combine(&multiply(&g, &f, l).map_err(err)?, &h2, ops, l).map_err(err)?;
        worst = worst.max(close(&a, &b, "exchange", t)?);
    }
    ensure(distributive_cases >= 500 && exchange_cases >= 500, || "too few cases".into())?;
    Ok(format!("{trials} random triples per law (commutativity, associativity, reduction, distributivity, exchange); max Δ {worst:.1e}"))
}

// 6 ------------------------------------------------------------------------

fn noisy_or_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let m = rng.gen_range(1..=6);
        let p: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
        let contributions = p
            .iter()
            .enumerate()
            .map(|(i, &pi)| ContributingFactor::from_columns(Some(VarId(i as u32)), &[vec![1.0, 0.0], vec![1.0 - pi, pi]]))
            .collect();
        let cpt = expand_cpt(&CiSpec { operator: BaseOperator::or(), contributions, leak: None });
        for row in 0..1usize << m {
            // first parent is the most significant bit
            let on = |i: usize| (row >> (m - 1 - i)) & 1 == 1;
            let closed: f64 = (0..m).filter(|&i| on(i)).map(|i| 1.0 - p[i]).product();
            let d = (cpt.table[row * 2] - closed).abs().max((cpt.table[row * 2 + 1] - (1.0 - closed)).abs());
            worst = worst.max(d);
            ensure(d <= 1e-12, || format!("trial {trial}, row {row}: off by {d:e}"))?;
        }
    }
    Ok(format!("100 parameterizations, m ≤ 6, every row within 1e-12 (max Δ {worst:.1e})"))
}

// 7 ------------------------------------------------------------------------

fn permutations(items: &[VarId]) -> Vec<Vec<VarId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn tidiness() -> Outcome {
    let config = RandomNetworkConfig { nodes: 5, max_parents: 3, max_cardinality: 3, convergent_fraction: 0.8, custom_operators: true, ..Default::default() };
    let (mut nets, mut orderings, mut steps) = (0, 0, 0);
    let mut seed = 0u64;
    while nets < 20 {
        seed += 1;
        ensure(seed < 10_000, || "could not find 20 suitable networks".into())?;
        let net = random_network(seed, &config);
        let dep = depute(&net).map_err(|e| e.to_string())?;
        if dep.map.is_empty() {
            continue;
        }
        let queries = random_queries(&net, (seed % 2) as usize, 1, seed).map_err(|e| e.to_string())?;
        let query = &queries[0];
        let eliminable = query.eliminable(&dep.network);
        if eliminable.len() > 6 {
            continue;
        }
        nets += 1;
        let fresh = &dep.factorization;
        ensure(fresh.tidiness_violations().is_empty() && fresh.single_convergent_violations().is_empty(), || {
            format!("seed {seed}: fresh deputation is not tidy")
        })?;
        let mut restricted = fresh.clone();
        restricted.restrict(query).map_err(|e| e.to_string())?;
        let oracle = posterior_by_enumeration(&net, query);
        for order in permutations(&eliminable).into_iter().filter(|o| is_legitimate_for(o, &dep.map)) {
            orderings += 1;
            let mut hf = restricted.clone();
            let mut ledger = CostLedger::new();
            for &z in &order {
                hf.sum_out1(z, &mut ledger).map_err(|e| format!("seed {seed}: {e}"))?;
                steps += 1;
                let v = hf.tidiness_violations();
                ensure(v.is_empty(), || format!("seed {seed}, order {order:?}, after {z}: {}", v[0]))?;
            }
            if let Ok(o) = &oracle {
                let h = hf.evaluate(&mut ledger).map_err(|e| e.to_string())?;
                let total = h.sum();
                let p = Factor::new(h.scope().to_vec(), h.table().iter().map(|x| x / total).collect()).unwrap();
                let d = p.max_abs_diff(o).unwrap_or(f64::INFINITY);
                ensure(d <= 1e-9, || format!("seed {seed}, order {order:?}: answer off by {d:e}"))?;
            }
        }
    }
    Ok(format!("20 deputation networks, {orderings} legitimate orderings, {steps} sum-out steps all tidy"))
}

// 8 ------------------------------------------------------------------------

fn bench_replay() -> Outcome {
    // strictly positive tables, so that most evidence sets are possible
    let config = RandomNetworkConfig {
        nodes: 50,
        max_parents: 3,
        max_cardinality: 3,
        convergent_fraction: 0.5,
        custom_operators: true,
        zero_fraction: 0.0,
    };
    let net = random_network(50, &config);
    let limits = Limits { time: Some(Duration::from_secs(10)), ..Limits::desk() };
    let bench = BenchConfig {
        engines: vec![Engine::Ve, Engine::Ve1, Engine::Pd, Engine::Tt],
        strategy: OrderStrategy::MinDeficiency,
        limits,
        jobs: 0,
    };
    let mut summary = Vec::new();
    for (i, n_obs) in [5, 10, 15].into_iter().enumerate() {
        let queries = random_queries(&net, n_obs, 50, 100 + i as u64).map_err(|e| e.to_string())?;
        let first = bench_run(&net, &queries, &bench).map_err(|e| e.to_string())?;
        let second = bench_run(&net, &queries, &BenchConfig { jobs: 1, ..bench.clone() }).map_err(|e| e.to_string())?;
        ensure(first.to_csv(false) == second.to_csv(false), || format!("n_obs={n_obs}: CSV differs between runs"))?;
        ensure(first.rows.len() == 200, || format!("{} rows", first.rows.len()))?;
        let d = first.max_disagreement();
        ensure(d <= 1e-9, || format!("n_obs={n_obs}: engines disagree by {d:e}"))?;
        // an answered query must be answered (or found impossible) by everyone
        for q in 0..queries.len() {
            let statuses: BTreeSet<&str> = first.rows.iter().filter(|r| r.query_id == q).map(|r| r.status.keyword()).collect();
            ensure(statuses.len() == 1 || !statuses.contains("impossible"), || format!("query {q}: {statuses:?}"))?;
        }
        let answered = first.rows.iter().filter(|r| r.status == RunStatus::Ok).count();
        let limited = first.rows.iter().filter(|r| matches!(r.status, RunStatus::Time | RunStatus::Memory)).count();
        summary.push(format!("n_obs={n_obs}: {answered}/200 ok, {limited} over limit, Δ {d:.1e}"));
    }
    Ok(summary.join("; "))
}
