//! One entry point for every engine: prune, transform, order, eliminate.

use std::fmt;
use std::str::FromStr;

use crate::elimination::{
    legitimacy_constraints, max_cardinality_order, min_deficiency_order, ve, ve1, EliminationOrdering, MoralGraph,
};
use crate::error::InferenceError;
use crate::factor::{CostLedger, Factor};
use crate::model::{prune_irrelevant, Network, Query, VarId};
use crate::oracle::posterior_with_ledger;
use crate::transforms::{depute, parent_divorce, temporal_transform};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    /// Plain VE on expanded CPTs.
    Ve,
    /// VE1 on the deputation network.
    Ve1,
    /// VE after parent divorcing.
    Pd,
    /// VE after the temporal transformation.
    Tt,
    /// Brute-force enumeration.
    Enum,
}

impl Engine {
    pub const ALL: [Engine; 5] = [Engine::Ve, Engine::Ve1, Engine::Pd, Engine::Tt, Engine::Enum];

    pub fn keyword(self) -> &'static str {
        match self {
            Engine::Ve => "ve",
            Engine::Ve1 => "ve1",
            Engine::Pd => "pd",
            Engine::Tt => "tt",
            Engine::Enum => "enum",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.keyword() == s)
            .ok_or_else(|| format!("unknown engine `{s}` (expected ve, ve1, pd, tt or enum)"))
    }
}

/// How the elimination ordering is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderStrategy {
    MinDeficiency,
    MaxCardinality,
    /// Explicit variable names, resolved in the network the engine runs on
    /// (so deputies and intermediates can be named). No pruning is done, so
    /// the names must cover every non-query, non-evidence variable.
    Given(Vec<String>),
}

/// Computes `P(targets | evidence)` with `engine`, charging `ledger`.
pub fn answer(
    net: &Network,
    query: &Query,
    engine: Engine,
    strategy: &OrderStrategy,
    ledger: &mut CostLedger,
) -> Result<Factor, InferenceError> {
    query.check(net)?;
    let pruned;
    let net = match strategy {
        OrderStrategy::Given(_) => net,
        _ => {
            pruned = prune_irrelevant(net, query)?;
            &pruned
        }
    };
    match engine {
        Engine::Enum => posterior_with_ledger(net, query, ledger),
        Engine::Ve => {
            let order = ordering(net, query, strategy, &[])?;
            ve(net, query, &order.0, ledger)
        }
        Engine::Pd | Engine::Tt => {
            let rewritten = if engine == Engine::Pd { parent_divorce(net) } else { temporal_transform(net) };
            let order = ordering(&rewritten, query, strategy, &[])?;
            ve(&rewritten, query, &order.0, ledger)
        }
        Engine::Ve1 => {
            let deputation = depute(net)?;
            let constraints = legitimacy_constraints(&deputation.map);
            let order = ordering(&deputation.network, query, strategy, &constraints)?;
            ve1(&deputation.network, query, &order.0, ledger)
        }
    }
}

/// The ordering `strategy` yields on `net` for `query`.
pub fn ordering(
    net: &Network,
    query: &Query,
    strategy: &OrderStrategy,
    constraints: &[(VarId, VarId)],
) -> Result<EliminationOrdering, InferenceError> {
    let eliminable = query.eliminable(net);
    let graph = || MoralGraph::of_network(net).without(query.evidence.keys().copied());
    Ok(match strategy {
        OrderStrategy::MinDeficiency => min_deficiency_order(&graph(), &eliminable, constraints)?,
        OrderStrategy::MaxCardinality => max_cardinality_order(&graph(), &eliminable, constraints)?,
        OrderStrategy::Given(names) => names
            .iter()
            .map(|n| net.by_name(n).ok_or_else(|| InferenceError::OrderingCoverage(format!("unknown variable `{n}`"))))
            .collect::<Result<Vec<_>, _>>()?
            .into(),
    })
}

