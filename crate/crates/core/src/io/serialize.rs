use std::fmt::Write;

use super::FORMAT_VERSION;
use crate::model::{ContributingFactor, Distribution, Network, Node, OperatorKind, VarKind};

/// Canonical text of `net`: variables then node blocks, both in id order,
/// numbers in the shortest form that reads back to the same `f64`.
/// Value labels and names are written verbatim, so they must not contain
/// whitespace, `#` or any of `{}[],;|=`.
pub fn serialize_network(net: &Network) -> String {
    let mut out = format!("network {FORMAT_VERSION}\n\n");
    for node in net.nodes() {
        let var = &node.variable;
        let _ = write!(out, "variable {} {{{}}}", var.name, var.frame.values().join(", "));
        if var.kind != VarKind::Regular {
            let _ = write!(out, " {}", var.kind.keyword());
        }
        out.push('\n');
    }
    for node in net.nodes() {
        out.push('\n');
        node_block(net, node, &mut out);
    }
    out
}

fn node_block(net: &Network, node: &Node, out: &mut String) {
    let _ = write!(out, "node {}", node.variable.name);
    if !node.parents.is_empty() {
        let names: Vec<&str> = node.parents.iter().map(|&p| net.name(p)).collect();
        let _ = write!(out, " | {}", names.join(", "));
    }
    out.push_str(" {\n");
    let d = node.variable.cardinality();
    match &node.distribution {
        Distribution::Cpt(cpt) if node.variable.kind == VarKind::NewRegular && is_identity(&cpt.table, d) => {
            out.push_str("  deputing\n");
        }
        Distribution::Cpt(cpt) => {
            let rows: Vec<&[f64]> = cpt.table.chunks(d.max(1)).collect();
            let _ = writeln!(out, "  cpt {}", table(&rows));
        }
        Distribution::CausalIndependence(ci) => {
            match ci.operator.kind() {
                OperatorKind::Custom => {
                    let rows: Vec<Vec<f64>> = ci.operator.rows().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
                    let rows: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
                    let _ = writeln!(out, "  ci custom {}", table(&rows));
                }
                kind => {
                    let _ = writeln!(out, "  ci {}", kind.keyword());
                }
            }
            for f in &ci.contributions {
                let cause = f.cause.map_or("?", |c| net.name(c));
                let _ = writeln!(out, "  contribution {cause} {}", columns(f));
            }
            if let Some(leak) = &ci.leak {
                let _ = writeln!(out, "  leak {}", columns(leak));
            }
        }
    }
    out.push_str("}\n");
}

fn is_identity(table: &[f64], d: usize) -> bool {
    table.len() == d * d && table.iter().enumerate().all(|(i, &p)| p == if i / d == i % d { 1.0 } else { 0.0 })
}

fn columns(f: &ContributingFactor) -> String {
    let cols: Vec<Vec<f64>> = (0..f.cause_cardinality).map(|c| f.column(c)).collect();
    let rows: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    table(&rows)
}

fn table(rows: &[&[f64]]) -> String {
    let rows: Vec<String> = rows
        .iter()
        .map(|r| r.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", "))
        .collect();
    format!("[{}]", rows.join("; "))
}
