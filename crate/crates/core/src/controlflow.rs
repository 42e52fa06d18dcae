//! Control flow edges, computed in three phases over the flow graph:
//!
//! 1. `successors` (inherited, top-down): for each statement, its following
//!    siblings and then the enclosing construct's continuation.
//! 2. `cf_next` (synthesized, demand-driven): the flow instruction through
//!    which control enters a node.
//! 3. edge assignment: `cfNext` links between flow instructions, plus the
//!    inverse `cfPrev` table.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::ast::Span;
use crate::flowgraph::{FlowGraph, FlowId, NodeData, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlFlowError {
    #[error("{}`{keyword}` outside of any loop", fmt_span(span))]
    MissingEnclosingLoop {
        keyword: &'static str,
        span: Option<Span>,
    },
    #[error("{}`continue {label}` does not name a loop", fmt_span(span))]
    InvalidContinueTarget { label: String, span: Option<Span> },
    #[error("cycle while resolving the flow instruction of node {node:?} ({txt})")]
    Cycle { node: FlowId, txt: String },
}

fn fmt_span(span: &Option<Span>) -> String {
    span.map(|s| format!("{s}: ")).unwrap_or_default()
}

/// A successors list, stored as a view into a statement list instead of a
/// copy so that long statement lists stay linear in size.
///
/// The list is `stmts(container)[from..]` followed by `cont`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Successors {
    siblings: Option<(FlowId, usize)>,
    cont: FlowId,
}

impl Successors {
    /// A one-element list.
    pub fn only(cont: FlowId) -> Self {
        Successors {
            siblings: None,
            cont,
        }
    }

    fn after(container: FlowId, index: usize, cont: FlowId) -> Self {
        Successors {
            siblings: Some((container, index + 1)),
            cont,
        }
    }

    fn remaining<'g>(&self, graph: &'g FlowGraph) -> &'g [FlowId] {
        match self.siblings {
            Some((container, from)) => {
                let stmts = statement_list(graph, container);
                &stmts[from.min(stmts.len())..]
            }
            None => &[],
        }
    }

    pub fn first(&self, graph: &FlowGraph) -> FlowId {
        self.remaining(graph).first().copied().unwrap_or(self.cont)
    }

    /// The enclosing construct's continuation (the list's last element).
    pub fn last(&self) -> FlowId {
        self.cont
    }

    pub fn to_vec(&self, graph: &FlowGraph) -> Vec<FlowId> {
        let mut out = self.remaining(graph).to_vec();
        out.push(self.cont);
        out
    }
}

fn statement_list(graph: &FlowGraph, container: FlowId) -> &[FlowId] {
    match &graph.node(container).data {
        NodeData::Method { stmts, .. } | NodeData::Block { stmts } => stmts,
        other => unreachable!("{other:?} has no statement list"),
    }
}

/// The `successors` attribute, indexed by node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessorsAttr {
    lists: Vec<Option<Successors>>,
}

impl SuccessorsAttr {
    pub fn get(&self, node: FlowId) -> Option<Successors> {
        self.lists.get(node.index()).copied().flatten()
    }

    fn of(&self, node: FlowId) -> Successors {
        self.get(node)
            .unwrap_or_else(|| panic!("successors of {node:?} were never assigned"))
    }
}

/// The `cf_next` attribute, indexed by node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfNextAttr {
    targets: Vec<Option<FlowId>>,
}

impl CfNextAttr {
    pub fn get(&self, node: FlowId) -> Option<FlowId> {
        self.targets.get(node.index()).copied().flatten()
    }

    fn of(&self, node: FlowId) -> FlowId {
        self.get(node)
            .unwrap_or_else(|| panic!("cf_next of {node:?} was never computed"))
    }
}

/// `cfNext` adjacency and its exact inverse `cfPrev`. Each adjacency list
/// keeps insertion order and holds no duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeTable {
    next: Vec<Vec<FlowId>>,
    prev: Vec<Vec<FlowId>>,
}

impl EdgeTable {
    pub fn new(len: usize) -> Self {
        EdgeTable {
            next: vec![Vec::new(); len],
            prev: vec![Vec::new(); len],
        }
    }

    /// Adds `from -> to`; returns false if the edge already existed.
    pub fn add(&mut self, from: FlowId, to: FlowId) -> bool {
        if self.next[from.index()].contains(&to) {
            return false;
        }
        self.next[from.index()].push(to);
        self.prev[to.index()].push(from);
        true
    }

    pub fn next(&self, node: FlowId) -> &[FlowId] {
        &self.next[node.index()]
    }

    pub fn prev(&self, node: FlowId) -> &[FlowId] {
        &self.prev[node.index()]
    }

    /// All edges, by source id then insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (FlowId, FlowId)> + '_ {
        self.next
            .iter()
            .enumerate()
            .flat_map(|(from, tos)| tos.iter().map(move |to| (FlowId(from as u32), *to)))
    }

    pub fn edge_count(&self) -> usize {
        self.next.iter().map(Vec::len).sum()
    }
}

/// Result of all three phases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlFlow {
    pub successors: SuccessorsAttr,
    pub cf_next: CfNextAttr,
    pub edges: EdgeTable,
}

pub fn analyze_control_flow(graph: &FlowGraph) -> Result<ControlFlow, ControlFlowError> {
    let successors = compute_successors(graph);
    let cf_next = compute_cf_next(graph, &successors)?;
    let edges = compute_cf_edges(graph, &successors, &cf_next)?;
    Ok(ControlFlow {
        successors,
        cf_next,
        edges,
    })
}

/// The flow instructions of a graph; containers and variables are excluded.
pub fn flow_instructions(graph: &FlowGraph) -> BTreeSet<FlowId> {
    graph.flow_instrs().collect()
}

pub fn compute_successors(graph: &FlowGraph) -> SuccessorsAttr {
    let mut attr = SuccessorsAttr {
        lists: vec![None; graph.len()],
    };
    let method = graph.method();
    let exit = graph.exit();
    // Explicit stack: statement lists can be long and nesting deep.
    let mut work: Vec<(FlowId, Successors)> = graph
        .method_stmts()
        .iter()
        .enumerate()
        .rev()
        .map(|(i, s)| (*s, Successors::after(method, i, exit)))
        .collect();

    while let Some((node, succ)) = work.pop() {
        attr.lists[node.index()] = Some(succ);
        match &graph.node(node).data {
            NodeData::Block { stmts } => {
                let cont = succ.first(graph);
                for (i, s) in stmts.iter().enumerate().rev() {
                    work.push((*s, Successors::after(node, i, cont)));
                }
            }
            NodeData::Loop { expr, body } => work.push((*body, Successors::only(*expr))),
            NodeData::If { then, else_, .. } => {
                if let Some(e) = else_ {
                    work.push((*e, succ));
                }
                work.push((*then, succ));
            }
            NodeData::Label { stmt } => work.push((*stmt, succ)),
            _ => {}
        }
    }
    attr
}

enum Step {
    Done(FlowId),
    Delegate(FlowId),
}

pub fn compute_cf_next(
    graph: &FlowGraph,
    succ: &SuccessorsAttr,
) -> Result<CfNextAttr, ControlFlowError> {
    let mut attr = CfNextAttr {
        targets: vec![None; graph.len()],
    };
    let exit = graph.exit();
    attr.targets[exit.index()] = Some(exit);

    let step = |node: FlowId| -> Step {
        match &graph.node(node).data {
            NodeData::SimpleStmt
            | NodeData::Return
            | NodeData::Break { .. }
            | NodeData::Continue { .. }
            | NodeData::Exit
            | NodeData::Expr => Step::Done(node),
            NodeData::Loop { expr, .. } | NodeData::If { expr, .. } => Step::Done(*expr),
            NodeData::Block { stmts } => match stmts.first() {
                Some(first) => Step::Delegate(*first),
                // An empty block is entered wherever control goes after it.
                None => Step::Delegate(succ.of(node).first(graph)),
            },
            NodeData::Label { stmt } => Step::Delegate(*stmt),
            NodeData::Method { .. } | NodeData::Var | NodeData::Param => {
                unreachable!("cf_next is not defined for {}", graph.kind(node))
            }
        }
    };

    let mut path = Vec::new();
    let mut on_path = HashSet::new();
    for start in graph.nodes().iter().map(|n| n.id) {
        if matches!(
            graph.kind(start),
            NodeKind::Method | NodeKind::Var | NodeKind::Param
        ) {
            continue;
        }
        let mut node = start;
        let resolved = loop {
            if let Some(done) = attr.targets[node.index()] {
                break done;
            }
            if !on_path.insert(node) {
                return Err(ControlFlowError::Cycle {
                    node,
                    txt: graph.txt(node).to_string(),
                });
            }
            path.push(node);
            match step(node) {
                Step::Done(target) => break target,
                Step::Delegate(next) => node = next,
            }
        };
        for n in path.drain(..) {
            attr.targets[n.index()] = Some(resolved);
        }
        on_path.clear();
    }
    Ok(attr)
}

pub fn compute_cf_edges(
    graph: &FlowGraph,
    succ: &SuccessorsAttr,
    cfn: &CfNextAttr,
) -> Result<EdgeTable, ControlFlowError> {
    let mut edges = EdgeTable::new(graph.len());
    let method = graph.method();
    let exit = graph.exit();
    match graph.method_stmts().first() {
        Some(first) => edges.add(method, cfn.of(*first)),
        None => edges.add(method, exit),
    };

    // Ids are in pre-order, so a linear scan visits each node after its
    // enclosing loops. `loops` holds (loop, last descendant id) pairs.
    let mut loops: Vec<(FlowId, FlowId)> = Vec::new();
    let last_desc = last_descendants(graph);
    for node in graph.nodes() {
        let id = node.id;
        while loops.last().is_some_and(|(_, end)| *end < id) {
            loops.pop();
        }
        let first_successor = |n: FlowId| cfn.of(succ.of(n).first(graph));
        match &node.data {
            NodeData::SimpleStmt => {
                edges.add(id, first_successor(id));
            }
            NodeData::Return => {
                edges.add(id, exit);
            }
            NodeData::Loop { expr, body } => {
                edges.add(*expr, first_successor(id));
                edges.add(*expr, cfn.of(*body));
                loops.push((id, last_desc[id.index()]));
            }
            NodeData::If { expr, then, else_ } => {
                edges.add(*expr, cfn.of(*then));
                match else_ {
                    Some(e) => edges.add(*expr, cfn.of(*e)),
                    None => edges.add(*expr, first_successor(id)),
                };
            }
            NodeData::Break { label } => {
                let jump_location = match label {
                    Some(l) => *l,
                    None => innermost(&loops, "break", node.span)?,
                };
                edges.add(id, first_successor(jump_location));
            }
            NodeData::Continue { label } => {
                let target_loop = match label {
                    Some(l) => labeled_loop(graph, *l).ok_or_else(|| {
                        ControlFlowError::InvalidContinueTarget {
                            label: graph.txt(*l).trim_end_matches(':').to_string(),
                            span: node.span,
                        }
                    })?,
                    None => innermost(&loops, "continue", node.span)?,
                };
                let NodeData::Loop { expr, .. } = graph.node(target_loop).data else {
                    unreachable!("continue target is a loop");
                };
                edges.add(id, expr);
            }
            _ => {}
        }
    }
    Ok(edges)
}

fn innermost(
    loops: &[(FlowId, FlowId)],
    keyword: &'static str,
    span: Option<Span>,
) -> Result<FlowId, ControlFlowError> {
    loops
        .last()
        .map(|(l, _)| *l)
        .ok_or(ControlFlowError::MissingEnclosingLoop { keyword, span })
}

/// The loop a label names, looking through directly nested labels.
fn labeled_loop(graph: &FlowGraph, mut label: FlowId) -> Option<FlowId> {
    loop {
        match graph.node(label).data {
            NodeData::Label { stmt } => label = stmt,
            NodeData::Loop { .. } => return Some(label),
            _ => return None,
        }
    }
}

/// Highest id in each node's containment subtree (itself if a leaf).
fn last_descendants(graph: &FlowGraph) -> Vec<FlowId> {
    let mut last: Vec<FlowId> = graph.nodes().iter().map(|n| n.id).collect();
    // Children have higher ids than their parent, so a reverse scan sees
    // every child's final value before the parent reads it.
    for node in graph.nodes().iter().rev() {
        if let Some(max) = graph
            .children(node.id)
            .iter()
            .map(|c| last[c.index()])
            .max()
        {
            last[node.id.index()] = last[node.id.index()].max(max);
        }
    }
    last
}
