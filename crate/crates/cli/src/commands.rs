use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use cive::bench::{bench_run, BenchConfig};
use cive::engine::{answer, OrderStrategy};
use cive::io::{parse_evidence, parse_network, parse_network_unvalidated, parse_ordering, serialize_network, ParseErrorKind};
use cive::model::{validate_network, Network, Query, QueryError, VarKind, MAX_FRAME_SIZE, MAX_PARENTS};
use cive::oracle::{random_network, random_queries, RandomNetworkConfig};
use cive::transforms::{depute, expand_all, parent_divorce, temporal_transform};
use cive::{CostLedger, Factor, InferenceError, Limits};

use crate::{BenchArgs, Command, GenerateArgs, InferArgs, Method};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Io,
    Parse,
    Invalid,
    Impossible,
    Limit,
}

#[derive(Debug)]
pub struct CliError {
    kind: Kind,
    message: String,
}

impl CliError {
    fn new(kind: Kind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }

    pub fn code(&self) -> &'static str {
        match self.kind {
            Kind::Usage => "usage",
            Kind::Io => "io",
            Kind::Parse => "parse",
            Kind::Invalid => "invalid",
            Kind::Impossible => "impossible",
            Kind::Limit => "limit",
        }
    }

    pub fn exit_status(&self) -> u8 {
        match self.kind {
            Kind::Usage | Kind::Io => 1,
            Kind::Parse | Kind::Invalid => 2,
            Kind::Impossible => 3,
            Kind::Limit => 4,
        }
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        let kind = match &e {
            InferenceError::Query(_)
            | InferenceError::OrderingCoverage(_)
            | InferenceError::IllegitimateOrdering
            | InferenceError::Ordering(_) => Kind::Usage,
            InferenceError::ImpossibleEvidence => Kind::Impossible,
            InferenceError::Limit(_) | InferenceError::StateSpaceTooLarge(_) => Kind::Limit,
            _ => Kind::Invalid,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        CliError::new(Kind::Usage, e.to_string())
    }
}

fn write_failed(e: std::io::Error) -> CliError {
    CliError::new(Kind::Io, format!("cannot write output: {e}"))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(Kind::Io, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Network, CliError> {
    parse_network(&read(path)?).map_err(|e| {
        let kind = if e.kind == ParseErrorKind::Syntax { Kind::Parse } else { Kind::Invalid };
        CliError::new(kind, format!("{}:{e}", path.display()))
    })
}

pub fn run(command: Command, out: &mut impl Write) -> Result<(), CliError> {
    let text = match command {
        Command::Validate { network } => validate(&network)?,
        Command::Infer(args) => infer(&args)?,
        Command::Transform { network, method } => {
            let net = load(&network)?;
            let rewritten = match method {
                Method::Depute => depute(&net).map_err(InferenceError::from)?.network,
                Method::Pd => parent_divorce(&net),
                Method::Tt => temporal_transform(&net),
                Method::Expand => expand_all(&net),
            };
            serialize_network(&rewritten)
        }
        Command::Bench(args) => bench(&args)?,
        Command::Generate(args) => generate(&args)?,
    };
    out.write_all(text.as_bytes()).map_err(write_failed)?;
    out.flush().map_err(write_failed)
}

fn validate(path: &Path) -> Result<String, CliError> {
    let net = parse_network_unvalidated(&read(path)?).map_err(|e| {
        let kind = if e.kind == ParseErrorKind::Syntax { Kind::Parse } else { Kind::Invalid };
        CliError::new(kind, format!("{}:{e}", path.display()))
    })?;
    let report = validate_network(&net);
    if !report.is_valid() {
        // the full report goes to stdout before the one-line error
        for v in report.violations() {
            println!("{v}");
        }
        let n = report.violations().len();
        return Err(CliError::new(Kind::Invalid, format!("{}: {n} problem{} found", path.display(), if n == 1 { "" } else { "s" })));
    }
    let convergent = net.nodes().filter(|n| n.variable.kind == VarKind::Convergent).count();
    Ok(format!("ok: {} variables, {convergent} convergent\n", net.len()))
}

fn strategy(spec: &str) -> Result<OrderStrategy, CliError> {
    match spec {
        "min-deficiency" => Ok(OrderStrategy::MinDeficiency),
        "max-cardinality" => Ok(OrderStrategy::MaxCardinality),
        _ => match spec.strip_prefix("given:") {
            Some(file) => Ok(OrderStrategy::Given(parse_ordering(&read(Path::new(file))?))),
            None => Err(CliError::new(
                Kind::Usage,
                format!("unknown ordering `{spec}` (expected min-deficiency, max-cardinality or given:<file>)"),
            )),
        },
    }
}

fn infer(args: &InferArgs) -> Result<String, CliError> {
    let net = load(&args.network)?;
    let targets = args
        .query
        .iter()
        .map(|name| net.by_name(name).ok_or_else(|| CliError::new(Kind::Usage, format!("unknown variable `{name}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let evidence = parse_evidence(&net, &args.evidence).map_err(|e| CliError::new(Kind::Usage, e))?;
    let query = Query::new(targets, evidence);
    query.check(&net)?;
    let mut ledger = CostLedger::new();
    let posterior = answer(&net, &query, args.engine, &strategy(&args.order)?, &mut ledger)?;
    let mut text = format_posterior(&net, &query, &posterior);
    if args.stats {
        let _ = writeln!(text, "mults={} adds={}", ledger.multiplications(), ledger.additions());
    }
    Ok(text)
}

/// `P(x | y=v)` header, then one `x=value probability` line per cell.
fn format_posterior(net: &Network, query: &Query, posterior: &Factor) -> String {
    let targets: Vec<&str> = query.targets.iter().map(|&t| net.name(t)).collect();
    let evidence: Vec<String> = query
        .evidence
        .iter()
        .map(|(&y, &v)| format!("{}={}", net.name(y), net.variable(y).frame.label(v)))
        .collect();
    let mut text = format!("P({}", targets.join(", "));
    if !evidence.is_empty() {
        let _ = write!(text, " | {}", evidence.join(", "));
    }
    text.push_str(")\n");
    let cards: Vec<usize> = query.targets.iter().map(|&t| net.cardinality(t)).collect();
    for (i, p) in posterior.table().iter().enumerate() {
        let mut rest = i;
        let mut values = vec![0; cards.len()];
        for k in (0..cards.len()).rev() {
            values[k] = rest % cards[k];
            rest /= cards[k];
        }
        let cell: Vec<String> = query
            .targets
            .iter()
            .zip(&values)
            .map(|(&t, &v)| format!("{}={}", net.name(t), net.variable(t).frame.label(v)))
            .collect();
        let _ = writeln!(text, "{}\t{p}", cell.join(" "));
    }
    text
}

fn bench(args: &BenchArgs) -> Result<String, CliError> {
    let net = load(&args.network)?;
    let mut queries = Vec::new();
    for (i, &k) in args.n_obs.iter().enumerate() {
        let batch = random_queries(&net, k, args.count, args.seed.wrapping_add(i as u64))
            .map_err(|e| CliError::new(Kind::Usage, e.to_string()))?;
        queries.extend(batch);
    }
    let positive = |x: f64| if x > 0.0 { Duration::try_from_secs_f64(x).ok() } else { None };
    let config = BenchConfig {
        engines: args.engines.clone(),
        strategy: strategy(&args.order)?,
        limits: Limits { time: positive(args.time_limit), max_cells: (args.max_cells > 0).then_some(args.max_cells) },
        jobs: args.jobs,
    };
    let report = bench_run(&net, &queries, &config)?;
    Ok(report.to_csv(!args.no_timing))
}

fn generate(args: &GenerateArgs) -> Result<String, CliError> {
    let usage = |m: String| Err(CliError::new(Kind::Usage, m));
    if !(2..=MAX_FRAME_SIZE).contains(&args.max_cardinality) {
        return usage(format!("--max-cardinality must be between 2 and {MAX_FRAME_SIZE}"));
    }
    if args.max_parents > MAX_PARENTS {
        return usage(format!("--max-parents must be at most {MAX_PARENTS}"));
    }
    for (flag, x) in [("--convergent-fraction", args.convergent_fraction), ("--zero-fraction", args.zero_fraction)] {
        if !(0.0..=1.0).contains(&x) {
            return usage(format!("{flag} must be between 0 and 1"));
        }
    }
    let config = RandomNetworkConfig {
        nodes: args.nodes,
        max_parents: args.max_parents,
        max_cardinality: args.max_cardinality,
        convergent_fraction: args.convergent_fraction,
        custom_operators: !args.builtin_only,
        zero_fraction: args.zero_fraction,
    };
    Ok(serialize_network(&random_network(args.seed, &config)))
}
