use std::collections::BTreeSet;
use std::fmt;

use super::network::{Distribution, Network, Node, VarId, VarKind, MAX_FRAME_SIZE, MAX_PARENTS};
use super::operator::validate_operator;

/// Row sums of CPTs and contributing factors must be within this of one.
pub const PROBABILITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    OperatorDimension { cardinality: usize, len: usize },
    OperatorClosure { left: usize, right: usize, value: usize },
    OperatorCommutativity { left: usize, right: usize },
    OperatorAssociativity { a: usize, b: usize, c: usize },
    /// Some variables were declared but never given a distribution.
    MissingDistribution { declared: usize, attached: usize },
    DuplicateName { name: String },
    FrameTooSmall { var: String, cardinality: usize },
    FrameTooLarge { var: String, cardinality: usize },
    DuplicateLabel { var: String, label: String },
    TooManyParents { var: String, count: usize },
    DanglingParent { var: String, parent: VarId },
    DuplicateParent { var: String, parent: VarId },
    SelfParent { var: String },
    Cycle,
    KindMismatch { var: String, kind: VarKind, detail: &'static str },
    TableLength { var: String, expected: usize, found: usize },
    BadEntry { var: String, index: usize, value: f64 },
    RowSum { var: String, row: usize, sum: f64 },
    OperatorFrame { var: String, operator: usize, frame: usize },
    Operator { var: String, inner: Box<Violation> },
    ContributionCount { var: String, parents: usize, contributions: usize },
    ContributionCause { var: String, position: usize },
    NoContributions { var: String },
    DeputyPairing { var: String, detail: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            OperatorDimension { cardinality, len } => {
                write!(f, "operator table has {len} entries, expected {}", cardinality * cardinality)
            }
            OperatorClosure { left, right, value } => {
                write!(f, "operator not closed: {left} * {right} = {value} is outside the frame")
            }
            OperatorCommutativity { left, right } => {
                write!(f, "operator not commutative: {left} * {right} != {right} * {left}")
            }
            OperatorAssociativity { a, b, c } => {
                write!(f, "operator not associative at ({a} * {b}) * {c}")
            }
            MissingDistribution { declared, attached } => {
                write!(f, "{declared} variables declared but only {attached} have a distribution")
            }
            DuplicateName { name } => write!(f, "variable name `{name}` is used twice"),
            FrameTooSmall { var, cardinality } => {
                write!(f, "`{var}` has {cardinality} values; at least 2 are required")
            }
            FrameTooLarge { var, cardinality } => {
                write!(f, "`{var}` has {cardinality} values; at most {MAX_FRAME_SIZE} are allowed")
            }
            DuplicateLabel { var, label } => write!(f, "`{var}` repeats value `{label}`"),
            TooManyParents { var, count } => {
                write!(f, "`{var}` has {count} parents; at most {MAX_PARENTS} are allowed")
            }
            DanglingParent { var, parent } => write!(f, "`{var}` has unknown parent {parent}"),
            DuplicateParent { var, parent } => write!(f, "`{var}` lists parent {parent} twice"),
            SelfParent { var } => write!(f, "`{var}` is its own parent"),
            Cycle => write!(f, "the graph has a directed cycle"),
            KindMismatch { var, kind, detail } => {
                write!(f, "`{var}` is declared {} but {detail}", kind.keyword())
            }
            TableLength { var, expected, found } => {
                write!(f, "`{var}`: table has {found} entries, expected {expected}")
            }
            BadEntry { var, index, value } => {
                write!(f, "`{var}`: entry {index} is {value}; probabilities must be finite and non-negative")
            }
            RowSum { var, row, sum } => write!(f, "`{var}`: row {row} sums to {sum}, not 1"),
            OperatorFrame { var, operator, frame } => {
                write!(f, "`{var}`: operator is over {operator} values but the frame has {frame}")
            }
            Operator { var, inner } => write!(f, "`{var}`: {inner}"),
            ContributionCount { var, parents, contributions } => {
                write!(f, "`{var}` has {parents} parents but {contributions} contributing factors")
            }
            ContributionCause { var, position } => {
                write!(f, "`{var}`: contributing factor {position} does not belong to parent {position}")
            }
            NoContributions { var } => write!(f, "`{var}` has neither causes nor a leak"),
            DeputyPairing { var, detail } => write!(f, "`{var}`: {detail}"),
        }
    }
}

impl Violation {
    /// Name of the variable the violation is about, if it is about one.
    pub fn variable(&self) -> Option<&str> {
        use Violation::*;
        match self {
            FrameTooSmall { var, .. }
            | FrameTooLarge { var, .. }
            | DuplicateLabel { var, .. }
            | TooManyParents { var, .. }
            | DanglingParent { var, .. }
            | DuplicateParent { var, .. }
            | SelfParent { var }
            | KindMismatch { var, .. }
            | TableLength { var, .. }
            | BadEntry { var, .. }
            | RowSum { var, .. }
            | OperatorFrame { var, .. }
            | Operator { var, .. }
            | ContributionCount { var, .. }
            | ContributionCause { var, .. }
            | NoContributions { var }
            | DeputyPairing { var, .. } => Some(var),
            DuplicateName { name } => Some(name),
            _ => None,
        }
    }
}

/// Everything wrong with a network or operator. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub(crate) fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Collects every violated structural and numerical invariant. Never fails.
pub fn validate_network(net: &Network) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut names = BTreeSet::new();
    for node in net.nodes() {
        if !names.insert(node.variable.name.as_str()) {
            report.push(Violation::DuplicateName { name: node.variable.name.clone() });
        }
        check_frame(node, &mut report);
        check_parents(net, node, &mut report);
    }
    let structurally_sound = report.is_valid();
    if net.topological_order().is_none() && structurally_sound {
        report.push(Violation::Cycle);
    }
    if structurally_sound {
        for node in net.nodes() {
            check_kind(net, node, &mut report);
            check_tables(net, node, &mut report);
        }
    }
    report
}

fn check_frame(node: &Node, report: &mut ValidationReport) {
    let var = &node.variable;
    let d = var.cardinality();
    if d < 2 {
        report.push(Violation::FrameTooSmall { var: var.name.clone(), cardinality: d });
    }
    if d > MAX_FRAME_SIZE {
        report.push(Violation::FrameTooLarge { var: var.name.clone(), cardinality: d });
    }
    let mut seen = BTreeSet::new();
    for label in var.frame.values() {
        if !seen.insert(label) {
            report.push(Violation::DuplicateLabel { var: var.name.clone(), label: label.clone() });
        }
    }
}

fn check_parents(net: &Network, node: &Node, report: &mut ValidationReport) {
    let name = &node.variable.name;
    if node.parents.len() > MAX_PARENTS {
        report.push(Violation::TooManyParents { var: name.clone(), count: node.parents.len() });
    }
    let mut seen = BTreeSet::new();
    for &p in &node.parents {
        if p == node.id() {
            report.push(Violation::SelfParent { var: name.clone() });
        } else if !net.contains(p) {
            report.push(Violation::DanglingParent { var: name.clone(), parent: p });
        }
        if !seen.insert(p) {
            report.push(Violation::DuplicateParent { var: name.clone(), parent: p });
        }
    }
}

fn check_kind(net: &Network, node: &Node, report: &mut ValidationReport) {
    let var = &node.variable;
    let mismatch = |detail| Violation::KindMismatch { var: var.name.clone(), kind: var.kind, detail };
    match (&node.distribution, var.kind) {
        (Distribution::CausalIndependence(_), VarKind::Regular | VarKind::NewRegular) => {
            report.push(mismatch("has a causal-independence model"))
        }
        (Distribution::Cpt(_), VarKind::Convergent | VarKind::Deputy) => {
            report.push(mismatch("has a plain CPT"))
        }
        _ => {}
    }
    if var.kind == VarKind::NewRegular {
        let deputy = match node.parents.as_slice() {
            [p] => net.variable(*p),
            _ => {
                report.push(Violation::DeputyPairing {
                    var: var.name.clone(),
                    detail: "a new regular variable must have exactly its deputy as parent",
                });
                return;
            }
        };
        if deputy.kind != VarKind::Deputy {
            report.push(Violation::DeputyPairing {
                var: var.name.clone(),
                detail: "the parent of a new regular variable must be a deputy",
            });
        } else if deputy.frame != var.frame {
            report.push(Violation::DeputyPairing {
                var: var.name.clone(),
                detail: "a deputy must share the frame of its new regular variable",
            });
        }
        if let Some(cpt) = node.cpt() {
            let d = var.cardinality();
            let identity = cpt.table.len() == d * d
                && cpt.table.iter().enumerate().all(|(i, &p)| p == if i / d == i % d { 1.0 } else { 0.0 });
            if !identity {
                report.push(Violation::DeputyPairing {
                    var: var.name.clone(),
                    detail: "the deputing function must be the identity table",
                });
            }
        }
    }
    if var.kind == VarKind::Deputy {
        let partners = net.children(var.id);
        let paired = partners.len() == 1 && net.variable(partners[0]).kind == VarKind::NewRegular;
        if !paired {
            report.push(Violation::DeputyPairing {
                var: var.name.clone(),
                detail: "a deputy must have exactly one child, its new regular variable",
            });
        }
    }
}

fn check_distribution(var: &str, table: &[f64], rows: usize, width: usize, report: &mut ValidationReport) {
    let expected = rows * width;
    if table.len() != expected {
        report.push(Violation::TableLength { var: var.to_owned(), expected, found: table.len() });
        return;
    }
    for (index, &value) in table.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            report.push(Violation::BadEntry { var: var.to_owned(), index, value });
        }
    }
    for row in 0..rows {
        let sum: f64 = table[row * width..(row + 1) * width].iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            report.push(Violation::RowSum { var: var.to_owned(), row, sum });
        }
    }
}

fn check_tables(net: &Network, node: &Node, report: &mut ValidationReport) {
    let var = &node.variable;
    let d = var.cardinality();
    match &node.distribution {
        Distribution::Cpt(cpt) => {
            let rows = node
                .parents
                .iter()
                .map(|&p| net.cardinality(p))
                .try_fold(1usize, |acc, c| acc.checked_mul(c));
            match rows {
                Some(rows) => check_distribution(&var.name, &cpt.table, rows, d, report),
                None => report.push(Violation::TableLength { var: var.name.clone(), expected: usize::MAX, found: cpt.table.len() }),
            }
        }
        Distribution::CausalIndependence(ci) => {
            if ci.operator.cardinality() != d {
                report.push(Violation::OperatorFrame {
                    var: var.name.clone(),
                    operator: ci.operator.cardinality(),
                    frame: d,
                });
            } else {
                for inner in validate_operator(&ci.operator).violations() {
                    report.push(Violation::Operator { var: var.name.clone(), inner: Box::new(inner.clone()) });
                }
            }
            if ci.contributions.len() != node.parents.len() {
                report.push(Violation::ContributionCount {
                    var: var.name.clone(),
                    parents: node.parents.len(),
                    contributions: ci.contributions.len(),
                });
                return;
            }
            if ci.contributions.is_empty() && ci.leak.is_none() {
                report.push(Violation::NoContributions { var: var.name.clone() });
            }
            for (position, (f, &parent)) in ci.contributions.iter().zip(&node.parents).enumerate() {
                if f.cause != Some(parent) {
                    report.push(Violation::ContributionCause { var: var.name.clone(), position });
                    continue;
                }
                check_contribution(&var.name, f.effect_cardinality, f.cause_cardinality, net.cardinality(parent), d, &f.table, report);
            }
            if let Some(leak) = &ci.leak {
                if leak.cause.is_some() {
                    report.push(Violation::ContributionCause { var: var.name.clone(), position: ci.contributions.len() });
                } else {
                    check_contribution(&var.name, leak.effect_cardinality, leak.cause_cardinality, 1, d, &leak.table, report);
                }
            }
        }
    }
}

fn check_contribution(
    var: &str,
    effect_card: usize,
    cause_card: usize,
    expected_cause_card: usize,
    d: usize,
    table: &[f64],
    report: &mut ValidationReport,
) {
    if effect_card != d || cause_card != expected_cause_card || table.len() != d * cause_card {
        report.push(Violation::TableLength {
            var: var.to_owned(),
            expected: d * expected_cause_card,
            found: table.len(),
        });
        return;
    }
    // transpose to cause-major rows so the shared row checker applies
    let mut rows = Vec::with_capacity(table.len());
    for c in 0..cause_card {
        for alpha in 0..d {
            rows.push(table[alpha * cause_card + c]);
        }
    }
    check_distribution(var, &rows, cause_card, d, report);
}
