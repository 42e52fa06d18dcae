//! Text, DOT and JSON renderings of an analysis.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::flowgraph::{FlowGraph, FlowId, NodeData, NodeKind};
use crate::validator::quote;
use crate::Analysis;

/// Containment tree in pre-order, two spaces per level.
pub fn structure(graph: &FlowGraph) -> String {
    let mut out = String::new();
    // (node, depth, role)
    let mut stack: Vec<(FlowId, usize, &'static str)> = vec![(graph.method(), 0, "")];
    while let Some((id, depth, role)) = stack.pop() {
        let node = graph.node(id);
        let _ = write!(
            out,
            "{}{}{} {}",
            "  ".repeat(depth),
            role,
            node.kind(),
            quote(&node.txt)
        );
        if let NodeData::Break { label: Some(l) } | NodeData::Continue { label: Some(l) } =
            node.data
        {
            let _ = write!(out, " -> {}", quote(graph.txt(l)));
        }
        out.push('\n');
        let children: Vec<(FlowId, &'static str)> = match &node.data {
            NodeData::Method { stmts, exit, vars } => stmts
                .iter()
                .map(|s| (*s, ""))
                .chain([(*exit, "exit: ")])
                .chain(vars.iter().map(|v| (*v, "var: ")))
                .collect(),
            NodeData::Loop { expr, body } => vec![(*expr, "expr: "), (*body, "body: ")],
            NodeData::If { expr, then, else_ } => {
                let mut c = vec![(*expr, "expr: "), (*then, "then: ")];
                c.extend(else_.map(|e| (e, "else: ")));
                c
            }
            NodeData::Label { stmt } => vec![(*stmt, "stmt: ")],
            NodeData::Block { stmts } => stmts.iter().map(|s| (*s, "")).collect(),
            _ => Vec::new(),
        };
        for (child, role) in children.into_iter().rev() {
            stack.push((child, depth + 1, role));
        }
    }
    out
}

/// `left --> right`, one control flow edge per line.
pub fn cf_listing(a: &Analysis) -> String {
    let mut out = String::new();
    for (x, y) in a.control.edges.edges() {
        let _ = writeln!(out, "{} --> {}", a.graph.txt(x), a.graph.txt(y));
    }
    out
}

fn has_def_use(kind: NodeKind) -> bool {
    matches!(
        kind,
        NodeKind::Method | NodeKind::SimpleStmt | NodeKind::Return | NodeKind::Expr
    )
}

fn names(graph: &FlowGraph, vars: &[FlowId]) -> Vec<String> {
    vars.iter().map(|v| graph.txt(*v).to_string()).collect()
}

/// Control flow edges, def/use sets and data flow edges, in three sections.
pub fn df_listing(a: &Analysis) -> String {
    let g = &a.graph;
    let mut out = String::from("== cfNext\n");
    out.push_str(&cf_listing(a));
    out.push_str("== def/use\n");
    for n in g.flow_instrs().filter(|n| has_def_use(g.kind(*n))) {
        let _ = writeln!(
            out,
            "{} def=[{}] use=[{}]",
            g.txt(n),
            names(g, a.defuse.defs(n)).join(", "),
            names(g, a.defuse.uses(n)).join(", ")
        );
    }
    out.push_str("== dfNext\n");
    for (x, y) in a.data.edges.edges() {
        let _ = writeln!(out, "{} --> {}", g.txt(x), g.txt(y));
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT digraph over the flow instructions. Node ids are the label plus a
/// `#k` occurrence counter; control edges are solid, data edges dashed.
pub fn dot(a: &Analysis, with_data: bool) -> String {
    let g = &a.graph;
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut ids: HashMap<FlowId, String> = HashMap::new();
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(&a.method.name));
    out.push_str("  node [shape=box];\n");
    for n in g.flow_instrs() {
        let txt = g.txt(n);
        let k = seen.entry(txt).or_insert(0);
        let id = format!("{txt}#{k}");
        *k += 1;
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{}\"];",
            dot_escape(&id),
            dot_escape(txt)
        );
        ids.insert(n, id);
    }
    for (x, y) in a.control.edges.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\";",
            dot_escape(&ids[&x]),
            dot_escape(&ids[&y])
        );
    }
    if with_data {
        for (x, y) in a.data.edges.edges() {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [style=dashed];",
                dot_escape(&ids[&x]),
                dot_escape(&ids[&y])
            );
        }
    }
    out.push_str("}\n");
    out
}

/// `{nodes, cfNext, dfNext, def, use}`; ids are flow node indices.
pub fn json(a: &Analysis, with_data: bool) -> Value {
    let g = &a.graph;
    let nodes: Vec<Value> = g
        .nodes()
        .iter()
        .map(|n| json!({"id": n.id.0, "kind": n.kind().name(), "txt": n.txt}))
        .collect();
    let pairs = |edges: &mut dyn Iterator<Item = (FlowId, FlowId)>| -> Vec<Value> {
        edges.map(|(x, y)| json!([x.0, y.0])).collect()
    };
    let cf = pairs(&mut a.control.edges.edges());
    let (df, defs, uses) = if with_data {
        let mut defs = Map::new();
        let mut uses = Map::new();
        for n in g.flow_instrs().filter(|n| has_def_use(g.kind(*n))) {
            defs.insert(n.0.to_string(), json!(names(g, a.defuse.defs(n))));
            uses.insert(n.0.to_string(), json!(names(g, a.defuse.uses(n))));
        }
        (pairs(&mut a.data.edges.edges()), defs, uses)
    } else {
        (Vec::new(), Map::new(), Map::new())
    };
    json!({
        "nodes": nodes,
        "cfNext": cf,
        "dfNext": df,
        "def": defs,
        "use": uses,
    })
}
