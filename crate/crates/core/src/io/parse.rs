use std::collections::BTreeMap;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, Position, FORMAT_VERSION};
use crate::model::{
    validate_network, BaseOperator, CiSpec, ContributingFactor, Cpt, Distribution, Frame, Network, Node, VarId,
    VarKind, Variable,
};

struct VarDecl {
    name: String,
    labels: Vec<String>,
    kind: Option<VarKind>,
    pos: Position,
}

enum OpSpec {
    Named(String),
    Custom(Vec<Vec<f64>>),
}

enum Body {
    Cpt(Vec<Vec<f64>>),
    Ci { operator: OpSpec, op_pos: Position, contributions: Vec<(String, Position, Vec<Vec<f64>>)>, leak: Option<(Position, Vec<Vec<f64>>)> },
    Deputing,
}

struct NodeDecl {
    name: String,
    pos: Position,
    parents: Vec<(String, Position)>,
    body: Body,
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    end: Position,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        let end = Position { line: text.lines().count().max(1), column: text.lines().last().map_or(0, |l| l.chars().count()) + 1 };
        Ok(Parser { tokens, at: 0, end })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn pos(&self) -> Position {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Token { tok: Tok::Word(w), .. }) => format!("`{w}`"),
            Some(Token { tok: Tok::Punct(c), .. }) => format!("`{c}`"),
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, Position), ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Word(w), pos }) => {
                let out = (w.clone(), *pos);
                self.at += 1;
                Ok(out)
            }
            _ => Err(ParseError::syntax(self.pos(), format!("expected {what}, found {}", self.found()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Position, ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Word(w), pos }) if w == kw => {
                let pos = *pos;
                self.at += 1;
                Ok(pos)
            }
            _ => Err(ParseError::syntax(self.pos(), format!("expected `{kw}`, found {}", self.found()))),
        }
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Punct(p), .. }) if *p == c)
    }

    fn at_word(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Word(w), .. }) if w == kw)
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.at_punct(c) {
            self.at += 1;
            Ok(())
        } else {
            Err(ParseError::syntax(self.pos(), format!("expected `{c}`, found {}", self.found())))
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let (w, pos) = self.word("a number")?;
        w.parse::<f64>().map_err(|_| ParseError::syntax(pos, format!("`{w}` is not a number")))
    }

    /// `[ a, b ; c, d ]` as rows.
    fn table(&mut self) -> Result<Vec<Vec<f64>>, ParseError> {
        self.punct('[')?;
        let mut rows = Vec::new();
        if self.at_punct(']') {
            self.at += 1;
            return Ok(rows);
        }
        let mut row = vec![self.number()?];
        loop {
            if self.at_punct(',') {
                self.at += 1;
                row.push(self.number()?);
            } else if self.at_punct(';') {
                self.at += 1;
                rows.push(std::mem::take(&mut row));
                row.push(self.number()?);
            } else {
                self.punct(']')?;
                rows.push(row);
                return Ok(rows);
            }
        }
    }

    fn document(&mut self) -> Result<(Vec<VarDecl>, Vec<NodeDecl>), ParseError> {
        self.keyword("network")?;
        let (version, pos) = self.word("a format version")?;
        if version != FORMAT_VERSION.to_string() {
            return Err(ParseError::syntax(pos, format!("unsupported format version `{version}` (expected {FORMAT_VERSION})")));
        }
        let (mut vars, mut nodes) = (Vec::new(), Vec::new());
        while self.peek().is_some() {
            if self.at_word("variable") {
                vars.push(self.variable()?);
            } else if self.at_word("node") {
                nodes.push(self.node()?);
            } else {
                return Err(ParseError::syntax(self.pos(), format!("expected `variable` or `node`, found {}", self.found())));
            }
        }
        Ok((vars, nodes))
    }

    fn variable(&mut self) -> Result<VarDecl, ParseError> {
        self.keyword("variable")?;
        let (name, pos) = self.word("a variable name")?;
        self.punct('{')?;
        let mut labels = vec![self.word("a value label")?.0];
        while self.at_punct(',') {
            self.at += 1;
            labels.push(self.word("a value label")?.0);
        }
        self.punct('}')?;
        let kind = match self.peek() {
            Some(Token { tok: Tok::Word(w), pos }) if w != "variable" && w != "node" => {
                let kind = VarKind::from_keyword(w)
                    .ok_or_else(|| ParseError::syntax(*pos, format!("unknown variable kind `{w}`")))?;
                self.at += 1;
                Some(kind)
            }
            _ => None,
        };
        Ok(VarDecl { name, labels, kind, pos })
    }

    fn node(&mut self) -> Result<NodeDecl, ParseError> {
        self.keyword("node")?;
        let (name, pos) = self.word("a variable name")?;
        let mut parents = Vec::new();
        if self.at_punct('|') {
            self.at += 1;
            parents.push(self.word("a parent name")?);
            while self.at_punct(',') {
                self.at += 1;
                parents.push(self.word("a parent name")?);
            }
        }
        self.punct('{')?;
        let body = if self.at_word("cpt") {
            self.at += 1;
            Body::Cpt(self.table()?)
        } else if self.at_word("deputing") {
            self.at += 1;
            Body::Deputing
        } else if self.at_word("ci") {
            self.at += 1;
            let (op, op_pos) = self.word("an operator")?;
            let operator = if op == "custom" { OpSpec::Custom(self.table()?) } else { OpSpec::Named(op) };
            let mut contributions = Vec::new();
            while self.at_word("contribution") {
                self.at += 1;
                let (cause, cause_pos) = self.word("a cause name")?;
                contributions.push((cause, cause_pos, self.table()?));
            }
            let leak = if self.at_word("leak") {
                let pos = self.keyword("leak")?;
                Some((pos, self.table()?))
            } else {
                None
            };
            Body::Ci { operator, op_pos, contributions, leak }
        } else {
            return Err(ParseError::syntax(self.pos(), format!("expected `cpt`, `ci` or `deputing`, found {}", self.found())));
        };
        self.punct('}')?;
        Ok(NodeDecl { name, pos, parents, body })
    }
}

/// Parses and validates a network document. Variables get ids in
/// declaration order.
pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    let (net, locations) = build(text)?;
    let report = validate_network(&net);
    if let Some(first) = report.violations().first() {
        let pos = first.variable().and_then(|v| locations.get(v)).copied().unwrap_or(Position { line: 1, column: 1 });
        let more = report.violations().len() - 1;
        let suffix = if more > 0 { format!(" (and {more} more)") } else { String::new() };
        return Err(ParseError::semantic(pos, format!("{first}{suffix}")));
    }
    Ok(net)
}

/// Parses a document without running the network validator, for callers
/// that want the full report.
pub fn parse_network_unvalidated(text: &str) -> Result<Network, ParseError> {
    build(text).map(|(net, _)| net)
}

/// The network and the position of each variable's node block.
fn build(text: &str) -> Result<(Network, BTreeMap<String, Position>), ParseError> {
    let (vars, nodes) = Parser::new(text)?.document()?;

    let mut ids: BTreeMap<&str, VarId> = BTreeMap::new();
    for (i, v) in vars.iter().enumerate() {
        if ids.insert(&v.name, VarId(i as u32)).is_some() {
            return Err(ParseError::semantic(v.pos, format!("variable `{}` is declared twice", v.name)));
        }
    }
    let resolve = |name: &str, pos: Position| {
        ids.get(name).copied().ok_or_else(|| ParseError::semantic(pos, format!("undeclared variable `{name}`")))
    };
    let mut blocks: BTreeMap<VarId, &NodeDecl> = BTreeMap::new();
    for n in &nodes {
        let id = resolve(&n.name, n.pos)?;
        if blocks.insert(id, n).is_some() {
            return Err(ParseError::semantic(n.pos, format!("`{}` has two node blocks", n.name)));
        }
    }
    let cardinality = |id: VarId| vars[id.0 as usize].labels.len();

    let mut out = Vec::with_capacity(vars.len());
    let mut locations = BTreeMap::new();
    for (i, decl) in vars.iter().enumerate() {
        let id = VarId(i as u32);
        let n = blocks
            .get(&id)
            .ok_or_else(|| ParseError::semantic(decl.pos, format!("`{}` has no node block", decl.name)))?;
        let parents = n.parents.iter().map(|(p, pos)| resolve(p, *pos)).collect::<Result<Vec<_>, _>>()?;
        let d = decl.labels.len();
        let (distribution, default_kind) = match &n.body {
            Body::Cpt(rows) => (Distribution::Cpt(Cpt { table: rows.concat() }), VarKind::Regular),
            Body::Deputing => {
                let mut table = vec![0.0; d * d];
                (0..d).for_each(|v| table[v * d + v] = 1.0);
                (Distribution::Cpt(Cpt { table }), VarKind::NewRegular)
            }
            Body::Ci { operator, op_pos, contributions, leak } => {
                let operator = build_operator(operator, d, *op_pos)?;
                if contributions.len() != parents.len() {
                    return Err(ParseError::semantic(
                        n.pos,
                        format!("`{}` has {} parents but {} contributions", n.name, parents.len(), contributions.len()),
                    ));
                }
                let mut factors = Vec::new();
                for ((cause, pos, rows), &parent) in contributions.iter().zip(&parents) {
                    if resolve(cause, *pos)? != parent {
                        return Err(ParseError::semantic(*pos, format!("expected the contribution of `{}` here", vars[parent.0 as usize].name)));
                    }
                    check_rows(rows, cardinality(parent), d, *pos, cause)?;
                    factors.push(ContributingFactor::from_columns(Some(parent), rows));
                }
                let leak = match leak {
                    Some((pos, rows)) => {
                        check_rows(rows, 1, d, *pos, "leak")?;
                        Some(ContributingFactor::leak(rows[0].clone()))
                    }
                    None => None,
                };
                (Distribution::CausalIndependence(CiSpec { operator, contributions: factors, leak }), VarKind::Convergent)
            }
        };
        locations.insert(decl.name.clone(), n.pos);
        out.push(Node {
            variable: Variable {
                id,
                name: decl.name.clone(),
                frame: Frame::new(decl.labels.iter().cloned()),
                kind: decl.kind.unwrap_or(default_kind),
            },
            parents,
            distribution,
        });
    }
    Ok((Network::from_nodes(out), locations))
}

fn build_operator(spec: &OpSpec, d: usize, pos: Position) -> Result<BaseOperator, ParseError> {
    let semantic = |e: crate::model::OperatorError| ParseError::semantic(pos, e.to_string());
    match spec {
        OpSpec::Named(name) => BaseOperator::builtin(name, d)
            .map_err(semantic)?
            .ok_or_else(|| ParseError::syntax(pos, format!("unknown operator `{name}` (expected or, and, max, satsum or custom)"))),
        OpSpec::Custom(rows) => {
            let rows = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&x| {
                            (x >= 0.0 && x.fract() == 0.0)
                                .then_some(x as usize)
                                .ok_or_else(|| ParseError::semantic(pos, format!("operator entry {x} is not a value index")))
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let op = BaseOperator::custom(rows).map_err(semantic)?;
            if op.cardinality() != d {
                return Err(ParseError::semantic(pos, format!("operator table is {0}x{0} but the frame has {d} values", op.cardinality())));
            }
            Ok(op)
        }
    }
}

/// A contribution table has one row per cause value, each a distribution
/// over the effect's values.
fn check_rows(rows: &[Vec<f64>], cause_card: usize, d: usize, pos: Position, what: &str) -> Result<(), ParseError> {
    if rows.len() != cause_card {
        return Err(ParseError::semantic(pos, format!("`{what}` needs {cause_card} rows, found {}", rows.len())));
    }
    if let Some(row) = rows.iter().find(|r| r.len() != d) {
        return Err(ParseError::semantic(pos, format!("`{what}` rows need {d} entries, found {}", row.len())));
    }
    Ok(())
}

/// `name=value` pairs separated by commas; values are labels or indices.
pub fn parse_evidence(net: &Network, text: &str) -> Result<BTreeMap<VarId, usize>, String> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item.split_once('=').ok_or_else(|| format!("`{item}` is not of the form name=value"))?;
        let (name, value) = (name.trim(), value.trim());
        let id = net.by_name(name).ok_or_else(|| format!("unknown variable `{name}`"))?;
        let index = net
            .variable(id)
            .frame
            .index_of(value)
            .ok_or_else(|| format!("`{value}` is not a value of `{name}`"))?;
        if out.insert(id, index).is_some() {
            return Err(format!("`{name}` is observed twice"));
        }
    }
    Ok(out)
}

/// Variable names separated by whitespace or commas; `#` comments allowed.
pub fn parse_ordering(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}
