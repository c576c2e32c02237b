//! Runs engines over query batches under time and memory guards and
//! reports timings, operation counts and posterior checksums.

use std::time::Duration;

use rayon::prelude::*;

use crate::engine::{answer, Engine, OrderStrategy};
use crate::error::InferenceError;
use crate::factor::{CostLedger, Factor, Limits, ResourceLimit};
use crate::model::{Network, Query};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    /// Time limit exceeded.
    Time,
    /// Memory proxy (or the enumeration guard) exceeded.
    Memory,
    /// The evidence has probability zero.
    Impossible,
}

impl RunStatus {
    pub fn keyword(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Time => "time",
            RunStatus::Memory => "memory",
            RunStatus::Impossible => "impossible",
        }
    }
}

/// One (engine, query) run.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub engine: Engine,
    pub query_id: usize,
    pub n_obs: usize,
    pub time: Duration,
    pub multiplications: u64,
    pub additions: u64,
    pub status: RunStatus,
    pub posterior: Option<Factor>,
}

impl BenchRow {
    /// `Σ (i + 1) p_i` over the posterior table, or NaN when unanswered.
    pub fn checksum(&self) -> f64 {
        self.posterior
            .as_ref()
            .map_or(f64::NAN, |p| p.table().iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).sum())
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    /// Query-major, engines in the requested order.
    pub rows: Vec<BenchRow>,
}

pub const CSV_HEADER: [&str; 8] = ["engine", "query_id", "n_obs", "time_ms", "mults", "adds", "status", "checksum"];

impl BenchReport {
    /// CSV with one line per row. With `timing` off the `time_ms` column
    /// reads `NA`, which makes the output a pure function of the inputs.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            let time = if timing { format!("{:.3}", r.time.as_secs_f64() * 1e3) } else { "NA".into() };
            let checksum = if r.posterior.is_some() { format!("{:.12}", r.checksum()) } else { "NA".into() };
            w.write_record([
                r.engine.keyword().to_string(),
                r.query_id.to_string(),
                r.n_obs.to_string(),
                time,
                r.multiplications.to_string(),
                r.additions.to_string(),
                r.status.keyword().to_string(),
                checksum,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    /// Largest per-entry disagreement between any two answered engines on
    /// the same query.
    pub fn max_disagreement(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for q in self.rows.iter().map(|r| r.query_id).collect::<std::collections::BTreeSet<_>>() {
            let answered: Vec<&Factor> =
                self.rows.iter().filter(|r| r.query_id == q).filter_map(|r| r.posterior.as_ref()).collect();
            for pair in answered.windows(2) {
                worst = worst.max(pair[0].max_abs_diff(pair[1]).unwrap_or(f64::INFINITY));
            }
        }
        worst
    }

    pub fn count(&self, engine: Engine, status: RunStatus) -> usize {
        self.rows.iter().filter(|r| r.engine == engine && r.status == status).count()
    }
}

/// Benchmark settings.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub engines: Vec<Engine>,
    pub strategy: OrderStrategy,
    pub limits: Limits,
    /// Worker threads; `0` lets rayon decide.
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            engines: vec![Engine::Ve, Engine::Ve1, Engine::Pd, Engine::Tt],
            strategy: OrderStrategy::MinDeficiency,
            limits: Limits::desk(),
            jobs: 0,
        }
    }
}

/// Runs every engine on every query. Each run gets its own ledger; runs may
/// execute concurrently but rows come back in (query, engine) order.
/// Errors other than limit breaches and impossible evidence are returned.
pub fn bench_run(net: &Network, queries: &[Query], config: &BenchConfig) -> Result<BenchReport, InferenceError> {
    let jobs: Vec<(usize, Engine)> =
        (0..queries.len()).flat_map(|q| config.engines.iter().map(move |&e| (q, e))).collect();
    let run = |&(q, engine): &(usize, Engine)| run_one(net, q, &queries[q], engine, config);
    let rows: Result<Vec<BenchRow>, InferenceError> = if config.jobs == 1 {
        jobs.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| jobs.par_iter().map(run).collect())
    };
    Ok(BenchReport { rows: rows? })
}

fn run_one(net: &Network, query_id: usize, query: &Query, engine: Engine, config: &BenchConfig) -> Result<BenchRow, InferenceError> {
    let mut ledger = CostLedger::with_limits(config.limits);
    let result = answer(net, query, engine, &config.strategy, &mut ledger);
    let time = ledger.elapsed();
    let (status, posterior) = match result {
        Ok(p) => (RunStatus::Ok, Some(p)),
        Err(InferenceError::Limit(ResourceLimit::Time)) => (RunStatus::Time, None),
        Err(InferenceError::Limit(ResourceLimit::Memory) | InferenceError::StateSpaceTooLarge(_)) => {
            (RunStatus::Memory, None)
        }
        Err(InferenceError::ImpossibleEvidence) => (RunStatus::Impossible, None),
        Err(e) => return Err(e),
    };
    Ok(BenchRow {
        engine,
        query_id,
        n_obs: query.evidence.len(),
        time,
        multiplications: ledger.multiplications(),
        additions: ledger.additions(),
        status,
        posterior,
    })
}
