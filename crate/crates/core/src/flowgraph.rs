//! The language-independent flow graph model and the mapping that builds it
//! from a parsed method.

use std::collections::HashMap;
use std::fmt;

use crate::ast::{self, AstId, DeclKind, Method, Span, Stmt, StmtKind};
use crate::textgen::TextAttr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlowId(pub u32);

impl FlowId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Method,
    Exit,
    SimpleStmt,
    Loop,
    If,
    Return,
    Break,
    Continue,
    Label,
    Block,
    Expr,
    Var,
    Param,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Method => "Method",
            NodeKind::Exit => "Exit",
            NodeKind::SimpleStmt => "SimpleStmt",
            NodeKind::Loop => "Loop",
            NodeKind::If => "If",
            NodeKind::Return => "Return",
            NodeKind::Break => "Break",
            NodeKind::Continue => "Continue",
            NodeKind::Label => "Label",
            NodeKind::Block => "Block",
            NodeKind::Expr => "Expr",
            NodeKind::Var => "Var",
            NodeKind::Param => "Param",
        }
    }

    /// Nodes that take part in control and data flow edges. Containers
    /// (Block, Label, Loop, If) and variables do not.
    pub fn is_flow_instr(self) -> bool {
        matches!(
            self,
            NodeKind::Method
                | NodeKind::Exit
                | NodeKind::SimpleStmt
                | NodeKind::Expr
                | NodeKind::Return
                | NodeKind::Break
                | NodeKind::Continue
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kind-specific containment links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeData {
    Method {
        stmts: Vec<FlowId>,
        exit: FlowId,
        vars: Vec<FlowId>,
    },
    Exit,
    SimpleStmt,
    Loop {
        expr: FlowId,
        body: FlowId,
    },
    If {
        expr: FlowId,
        then: FlowId,
        else_: Option<FlowId>,
    },
    Return,
    Break {
        label: Option<FlowId>,
    },
    Continue {
        label: Option<FlowId>,
    },
    Label {
        stmt: FlowId,
    },
    Block {
        stmts: Vec<FlowId>,
    },
    Expr,
    Var,
    Param,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNode {
    pub id: FlowId,
    pub txt: String,
    pub data: NodeData,
    pub span: Option<Span>,
}

impl FlowNode {
    pub fn kind(&self) -> NodeKind {
        match self.data {
            NodeData::Method { .. } => NodeKind::Method,
            NodeData::Exit => NodeKind::Exit,
            NodeData::SimpleStmt => NodeKind::SimpleStmt,
            NodeData::Loop { .. } => NodeKind::Loop,
            NodeData::If { .. } => NodeKind::If,
            NodeData::Return => NodeKind::Return,
            NodeData::Break { .. } => NodeKind::Break,
            NodeData::Continue { .. } => NodeKind::Continue,
            NodeData::Label { .. } => NodeKind::Label,
            NodeData::Block { .. } => NodeKind::Block,
            NodeData::Expr => NodeKind::Expr,
            NodeData::Var => NodeKind::Var,
            NodeData::Param => NodeKind::Param,
        }
    }

    pub fn is_flow_instr(&self) -> bool {
        self.kind().is_flow_instr()
    }
}

/// Arena of flow nodes. Ids follow containment pre-order: the method, its
/// statements, its exit, then its variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    nodes: Vec<FlowNode>,
    /// VarDecl node of each [`ast::DeclId`], filled by [`collect_vars`].
    var_of_decl: Vec<FlowId>,
}

impl FlowGraph {
    pub fn method(&self) -> FlowId {
        FlowId(0)
    }

    pub fn node(&self, id: FlowId) -> &FlowNode {
        &self.nodes[id.index()]
    }

    pub fn txt(&self, id: FlowId) -> &str {
        &self.nodes[id.index()].txt
    }

    pub fn kind(&self, id: FlowId) -> NodeKind {
        self.nodes[id.index()].kind()
    }

    pub fn nodes(&self) -> &[FlowNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn exit(&self) -> FlowId {
        match &self.node(self.method()).data {
            NodeData::Method { exit, .. } => *exit,
            other => unreachable!("root is not a method: {other:?}"),
        }
    }

    pub fn method_stmts(&self) -> &[FlowId] {
        match &self.node(self.method()).data {
            NodeData::Method { stmts, .. } => stmts,
            other => unreachable!("root is not a method: {other:?}"),
        }
    }

    pub fn vars(&self) -> &[FlowId] {
        match &self.node(self.method()).data {
            NodeData::Method { vars, .. } => vars,
            other => unreachable!("root is not a method: {other:?}"),
        }
    }

    /// The VarDecl node created for a declaration.
    pub fn var_of(&self, decl: ast::DeclId) -> FlowId {
        self.var_of_decl[decl.0 as usize]
    }

    pub fn flow_instrs(&self) -> impl Iterator<Item = FlowId> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.is_flow_instr())
            .map(|n| n.id)
    }

    /// Direct containment children, in order.
    pub fn children(&self, id: FlowId) -> Vec<FlowId> {
        match &self.node(id).data {
            NodeData::Method { stmts, exit, vars } => {
                let mut out = stmts.clone();
                out.push(*exit);
                out.extend(vars);
                out
            }
            NodeData::Loop { expr, body } => vec![*expr, *body],
            NodeData::If { expr, then, else_ } => {
                let mut out = vec![*expr, *then];
                out.extend(else_);
                out
            }
            NodeData::Label { stmt } => vec![*stmt],
            NodeData::Block { stmts } => stmts.clone(),
            _ => Vec::new(),
        }
    }

    fn push(&mut self, txt: String, data: NodeData, span: Option<Span>) -> FlowId {
        let id = FlowId(self.nodes.len() as u32);
        self.nodes.push(FlowNode {
            id,
            txt,
            data,
            span,
        });
        id
    }

    fn set_data(&mut self, id: FlowId, data: NodeData) {
        self.nodes[id.index()].data = data;
    }
}

/// Correspondence between syntax nodes and their flow graph images.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceMap {
    forward: HashMap<AstId, FlowId>,
    reverse: HashMap<FlowId, AstId>,
}

impl TraceMap {
    pub fn flow_of(&self, ast: AstId) -> Option<FlowId> {
        self.forward.get(&ast).copied()
    }

    pub fn ast_of(&self, flow: FlowId) -> Option<AstId> {
        self.reverse.get(&flow).copied()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    fn link(&mut self, ast: AstId, flow: FlowId) {
        let prev = self.forward.insert(ast, flow);
        debug_assert!(prev.is_none(), "{ast:?} mapped twice");
        self.reverse.insert(flow, ast);
    }
}

/// Map a method onto the flow graph model. Variables are added separately by
/// [`collect_vars`].
pub fn build_flowgraph(method: &Method, text: &TextAttr) -> (FlowGraph, TraceMap) {
    let mut b = Builder {
        graph: FlowGraph {
            nodes: Vec::new(),
            var_of_decl: Vec::new(),
        },
        trace: TraceMap::default(),
        text,
        pending_jumps: Vec::new(),
    };
    let root = b.graph.push(
        text.get(method.id).to_string(),
        NodeData::Exit,
        Some(method.span),
    );
    b.trace.link(method.id, root);
    let stmts = method.body.iter().map(|s| b.stmt(s)).collect();
    let exit = b.graph.push("Exit".to_string(), NodeData::Exit, None);
    b.graph.set_data(
        root,
        NodeData::Method {
            stmts,
            exit,
            vars: Vec::new(),
        },
    );
    b.resolve_jumps();
    (b.graph, b.trace)
}

struct Builder<'a> {
    graph: FlowGraph,
    trace: TraceMap,
    text: &'a TextAttr,
    /// Jumps whose label target is fixed once every statement is mapped.
    pending_jumps: Vec<(FlowId, AstId)>,
}

impl Builder<'_> {
    fn stmt(&mut self, stmt: &Stmt) -> FlowId {
        let txt = self.text.get(stmt.id).to_string();
        let span = Some(stmt.span);
        // Containers are pushed before their children to keep pre-order ids.
        let id = match &stmt.kind {
            StmtKind::LocalVarDecl { .. } | StmtKind::ExprStmt(_) => {
                self.graph.push(txt, NodeData::SimpleStmt, span)
            }
            StmtKind::Return(_) => self.graph.push(txt, NodeData::Return, span),
            StmtKind::Break(label) | StmtKind::Continue(label) => {
                let data = if matches!(stmt.kind, StmtKind::Break(_)) {
                    NodeData::Break { label: None }
                } else {
                    NodeData::Continue { label: None }
                };
                let id = self.graph.push(txt, data, span);
                if let Some(target) = label.as_ref().and_then(|l| l.target) {
                    self.pending_jumps.push((id, target));
                }
                id
            }
            StmtKind::While { cond, body } => {
                let id = self.graph.push(txt, NodeData::Exit, span);
                let expr = self.condition(cond);
                let body = self.stmt(body);
                self.graph.set_data(id, NodeData::Loop { expr, body });
                id
            }
            StmtKind::If { cond, then, else_ } => {
                let id = self.graph.push(txt, NodeData::Exit, span);
                let expr = self.condition(cond);
                let then = self.stmt(then);
                let else_ = else_.as_deref().map(|e| self.stmt(e));
                self.graph.set_data(id, NodeData::If { expr, then, else_ });
                id
            }
            StmtKind::Labeled { stmt: inner, .. } => {
                let id = self.graph.push(txt, NodeData::Exit, span);
                let inner = self.stmt(inner);
                self.graph.set_data(id, NodeData::Label { stmt: inner });
                id
            }
            StmtKind::Block(stmts) => {
                let id = self.graph.push(txt, NodeData::Exit, span);
                let stmts = stmts.iter().map(|s| self.stmt(s)).collect();
                self.graph.set_data(id, NodeData::Block { stmts });
                id
            }
        };
        self.trace.link(stmt.id, id);
        id
    }

    /// Loop and if conditions are the only expressions with an image.
    fn condition(&mut self, cond: &ast::Expr) -> FlowId {
        let id = self.graph.push(
            self.text.get(cond.id).to_string(),
            NodeData::Expr,
            Some(cond.span),
        );
        self.trace.link(cond.id, id);
        id
    }

    fn resolve_jumps(&mut self) {
        for (jump, target) in std::mem::take(&mut self.pending_jumps) {
            let label = self.trace.flow_of(target).expect("label target is mapped");
            match &mut self.graph.nodes[jump.index()].data {
                NodeData::Break { label: l } | NodeData::Continue { label: l } => *l = Some(label),
                other => unreachable!("pending jump is not a jump: {other:?}"),
            }
        }
    }
}

/// Create one Param per parameter and one Var per local declaration, all
/// owned by the method; the method node defines the parameters.
pub fn collect_vars(method: &Method, graph: &mut FlowGraph) {
    let mut vars = Vec::with_capacity(method.decls.len());
    for decl in &method.decls {
        let data = match decl.kind {
            DeclKind::Param => NodeData::Param,
            DeclKind::Local => NodeData::Var,
        };
        vars.push(graph.push(decl.name.clone(), data, Some(decl.span)));
    }
    graph.var_of_decl = vars.clone();
    let root = graph.method();
    if let NodeData::Method { vars: v, .. } = &mut graph.nodes[root.index()].data {
        *v = vars;
    }
}
