//! Variables defined and used by each flow instruction.

use crate::ast::{Expr, ExprKind, Method, Stmt, StmtKind};
use crate::flowgraph::{FlowGraph, FlowId, TraceMap};

/// Per-node `def` and `use` lists of VarDecl nodes, duplicate-free and in
/// first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefUseAttr {
    defs: Vec<Vec<FlowId>>,
    uses: Vec<Vec<FlowId>>,
}

impl DefUseAttr {
    pub fn defs(&self, node: FlowId) -> &[FlowId] {
        &self.defs[node.index()]
    }

    pub fn uses(&self, node: FlowId) -> &[FlowId] {
        &self.uses[node.index()]
    }

    pub fn defines(&self, node: FlowId, var: FlowId) -> bool {
        self.defs[node.index()].contains(&var)
    }

    fn set(&mut self, node: FlowId, (reads, writes): (Vec<FlowId>, Vec<FlowId>)) {
        self.uses[node.index()] = dedup(reads);
        self.defs[node.index()] = dedup(writes);
    }
}

fn dedup(mut vars: Vec<FlowId>) -> Vec<FlowId> {
    let mut seen = std::collections::HashSet::new();
    vars.retain(|v| seen.insert(*v));
    vars
}

/// Variables read and written by an expression, in evaluation order.
///
/// An assignment writes its target and everything its value writes; a
/// suffix `++`/`--` both reads and writes its variable.
pub fn expr_reads_writes(expr: &Expr, graph: &FlowGraph) -> (Vec<FlowId>, Vec<FlowId>) {
    let mut reads = Vec::new();
    let mut writes = Vec::new();
    collect(expr, graph, &mut reads, &mut writes);
    (reads, writes)
}

fn collect(expr: &Expr, graph: &FlowGraph, reads: &mut Vec<FlowId>, writes: &mut Vec<FlowId>) {
    match &expr.kind {
        ExprKind::Assign { target, value } => {
            writes.push(graph.var_of(target.binding()));
            collect(value, graph, reads, writes);
        }
        ExprKind::SuffixUnary { target, .. } => {
            let var = graph.var_of(target.binding());
            reads.push(var);
            writes.push(var);
        }
        ExprKind::Chain { children, .. } => {
            for c in children {
                collect(c, graph, reads, writes);
            }
        }
        ExprKind::IdentRef(v) => reads.push(graph.var_of(v.binding())),
        ExprKind::IntLit(_) => {}
    }
}

pub fn compute_def_use(method: &Method, graph: &FlowGraph, trace: &TraceMap) -> DefUseAttr {
    let mut attr = DefUseAttr {
        defs: vec![Vec::new(); graph.len()],
        uses: vec![Vec::new(); graph.len()],
    };
    let params = method.params.iter().map(|p| graph.var_of(p.decl)).collect();
    attr.set(graph.method(), (Vec::new(), params));

    let mut work: Vec<&Stmt> = method.body.iter().rev().collect();
    while let Some(stmt) = work.pop() {
        let image = || trace.flow_of(stmt.id).expect("statement is mapped");
        match &stmt.kind {
            StmtKind::LocalVarDecl { decl, init, .. } => {
                let (reads, mut writes) = expr_reads_writes(init, graph);
                writes.push(graph.var_of(*decl));
                attr.set(image(), (reads, writes));
            }
            StmtKind::ExprStmt(e) => attr.set(image(), expr_reads_writes(e, graph)),
            // Only a suffix unary in the value can write here.
            StmtKind::Return(Some(value)) => attr.set(image(), expr_reads_writes(value, graph)),
            StmtKind::Return(None) | StmtKind::Break(_) | StmtKind::Continue(_) => {}
            StmtKind::While { cond, body } => {
                let expr = trace.flow_of(cond.id).expect("condition is mapped");
                attr.set(expr, expr_reads_writes(cond, graph));
                work.push(body);
            }
            StmtKind::If { cond, then, else_ } => {
                let expr = trace.flow_of(cond.id).expect("condition is mapped");
                attr.set(expr, expr_reads_writes(cond, graph));
                if let Some(e) = else_ {
                    work.push(e);
                }
                work.push(then);
            }
            StmtKind::Labeled { stmt: inner, .. } => work.push(inner),
            StmtKind::Block(stmts) => work.extend(stmts.iter().rev()),
        }
    }
    attr
}
