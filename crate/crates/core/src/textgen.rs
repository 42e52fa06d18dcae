//! The synthesized `text` attribute: display labels for syntax nodes.
//!
//! Labels are what every later stage keys on (flow node `txt`, validation
//! assertions), so the literals and spacing below are fixed.

use crate::ast::{AstId, Expr, ExprKind, Method, Operator, Stmt, StmtKind};

/// Label of every syntax node, indexed by [`AstId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextAttr {
    labels: Vec<Option<String>>,
}

impl TextAttr {
    pub fn get(&self, id: AstId) -> &str {
        self.labels
            .get(id.0 as usize)
            .and_then(|l| l.as_deref())
            .unwrap_or_else(|| panic!("no text computed for node {id:?}"))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn set(&mut self, id: AstId, label: String) {
        let slot = &mut self.labels[id.0 as usize];
        assert!(slot.is_none(), "text of node {id:?} computed twice");
        *slot = Some(label);
    }

    /// Reads a child label. Children are always evaluated before parents, so
    /// a missing entry means the evaluation order is broken.
    fn child(&self, id: AstId) -> &str {
        self.labels[id.0 as usize]
            .as_deref()
            .unwrap_or_else(|| panic!("text of node {id:?} read before it was computed"))
    }
}

pub fn operator_text(op: Operator) -> &'static str {
    match op {
        Operator::Assignment => " = ",
        Operator::Multiplication => " * ",
        Operator::Addition => " + ",
        Operator::Division => " / ",
        Operator::Subtraction => " - ",
        Operator::Equal => " == ",
        Operator::GreaterThan => " > ",
        Operator::LessThan => " < ",
        Operator::PlusPlus => "++",
        Operator::MinusMinus => "--",
    }
}

/// Type reference text; `int` is the only type.
pub const INT_TYPE_TEXT: &str = "int";

/// Evaluate the text attribute over the whole method, bottom-up.
pub fn compute_text(method: &Method) -> TextAttr {
    let mut attr = TextAttr {
        labels: vec![None; method.node_count()],
    };
    for stmt in &method.body {
        stmt_text(stmt, &mut attr);
    }
    attr.set(method.id, format!("{}()", method.name));
    attr
}

/// Label of a single statement subtree's root, without building a full map.
pub fn text_of_stmt(stmt: &Stmt) -> String {
    let mut attr = TextAttr {
        labels: vec![None; max_id_stmt(stmt) + 1],
    };
    stmt_text(stmt, &mut attr);
    attr.get(stmt.id).to_string()
}

/// Label of a single expression.
pub fn text_of_expr(expr: &Expr) -> String {
    let mut attr = TextAttr {
        labels: vec![None; max_id_expr(expr) + 1],
    };
    expr_text(expr, &mut attr);
    attr.get(expr.id).to_string()
}

fn stmt_text(stmt: &Stmt, attr: &mut TextAttr) {
    let label = match &stmt.kind {
        StmtKind::LocalVarDecl { name, init, .. } => {
            expr_text(init, attr);
            format!("{INT_TYPE_TEXT} {name} = {};", attr.child(init.id))
        }
        StmtKind::ExprStmt(e) => {
            expr_text(e, attr);
            format!("{};", attr.child(e.id))
        }
        StmtKind::While { cond, body } => {
            expr_text(cond, attr);
            stmt_text(body, attr);
            "while".to_string()
        }
        StmtKind::If { cond, then, else_ } => {
            expr_text(cond, attr);
            stmt_text(then, attr);
            if let Some(e) = else_ {
                stmt_text(e, attr);
            }
            "if".to_string()
        }
        StmtKind::Return(value) => match value {
            None => "return;".to_string(),
            Some(v) => {
                expr_text(v, attr);
                format!("return {};", attr.child(v.id))
            }
        },
        StmtKind::Break(_) => "break".to_string(),
        StmtKind::Continue(_) => "continue".to_string(),
        StmtKind::Labeled { name, stmt: inner } => {
            stmt_text(inner, attr);
            format!("{name}:")
        }
        StmtKind::Block(stmts) => {
            for s in stmts {
                stmt_text(s, attr);
            }
            "{...}".to_string()
        }
    };
    attr.set(stmt.id, label);
}

fn expr_text(expr: &Expr, attr: &mut TextAttr) {
    let label = match &expr.kind {
        ExprKind::Assign { target, value } => {
            expr_text(value, attr);
            format!(
                "{}{}{}",
                target.name,
                operator_text(Operator::Assignment),
                attr.child(value.id)
            )
        }
        ExprKind::SuffixUnary { target, op } => format!("{}{}", target.name, operator_text(*op)),
        ExprKind::Chain {
            children,
            operators,
            ..
        } => {
            for c in children {
                expr_text(c, attr);
            }
            let mut out = attr.child(children[0].id).to_string();
            for (child, op) in children[1..].iter().zip(operators) {
                out.push_str(operator_text(*op));
                out.push_str(attr.child(child.id));
            }
            out
        }
        ExprKind::IdentRef(v) => v.name.clone(),
        ExprKind::IntLit(value) => value.to_string(),
    };
    attr.set(expr.id, label);
}

fn max_id_stmt(stmt: &Stmt) -> usize {
    let inner = match &stmt.kind {
        StmtKind::LocalVarDecl { init, .. } => max_id_expr(init),
        StmtKind::ExprStmt(e) => max_id_expr(e),
        StmtKind::While { cond, body } => max_id_expr(cond).max(max_id_stmt(body)),
        StmtKind::If { cond, then, else_ } => max_id_expr(cond)
            .max(max_id_stmt(then))
            .max(else_.as_deref().map_or(0, max_id_stmt)),
        StmtKind::Return(v) => v.as_ref().map_or(0, max_id_expr),
        StmtKind::Break(_) | StmtKind::Continue(_) => 0,
        StmtKind::Labeled { stmt, .. } => max_id_stmt(stmt),
        StmtKind::Block(stmts) => stmts.iter().map(max_id_stmt).max().unwrap_or(0),
    };
    inner.max(stmt.id.0 as usize)
}

fn max_id_expr(expr: &Expr) -> usize {
    let inner = match &expr.kind {
        ExprKind::Assign { value, .. } => max_id_expr(value),
        ExprKind::Chain { children, .. } => children.iter().map(max_id_expr).max().unwrap_or(0),
        ExprKind::SuffixUnary { .. } | ExprKind::IdentRef(_) | ExprKind::IntLit(_) => 0,
    };
    inner.max(expr.id.0 as usize)
}

/// Compose statement labels back into parseable source.
///
/// Grouping parentheses are not reproduced, so this only round-trips for
/// programs whose structure does not depend on them.
pub fn render_source(method: &Method, text: &TextAttr) -> String {
    let mut out = String::new();
    let params: Vec<String> = method
        .params
        .iter()
        .map(|p| format!("{INT_TYPE_TEXT} {}", p.name))
        .collect();
    out.push_str(&format!(
        "{INT_TYPE_TEXT} {}({}) {{\n",
        method.name,
        params.join(", ")
    ));
    for s in &method.body {
        render_stmt(s, text, 1, &mut out);
    }
    out.push_str("}\n");
    out
}

fn render_stmt(stmt: &Stmt, text: &TextAttr, depth: usize, out: &mut String) {
    let indent = "    ".repeat(depth);
    match &stmt.kind {
        StmtKind::LocalVarDecl { .. } | StmtKind::ExprStmt(_) | StmtKind::Return(_) => {
            out.push_str(&format!("{indent}{}\n", text.get(stmt.id)));
        }
        StmtKind::Break(label) | StmtKind::Continue(label) => {
            let kw = text.get(stmt.id);
            match label {
                Some(l) => out.push_str(&format!("{indent}{kw} {};\n", l.name)),
                None => out.push_str(&format!("{indent}{kw};\n")),
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str(&format!(
                "{indent}{} ({})\n",
                text.get(stmt.id),
                text.get(cond.id)
            ));
            render_stmt(body, text, depth + 1, out);
        }
        StmtKind::If { cond, then, else_ } => {
            out.push_str(&format!(
                "{indent}{} ({})\n",
                text.get(stmt.id),
                text.get(cond.id)
            ));
            render_stmt(then, text, depth + 1, out);
            if let Some(e) = else_ {
                out.push_str(&format!("{indent}else\n"));
                render_stmt(e, text, depth + 1, out);
            }
        }
        StmtKind::Labeled { stmt: inner, .. } => {
            out.push_str(&format!("{indent}{}\n", text.get(stmt.id)));
            render_stmt(inner, text, depth + 1, out);
        }
        StmtKind::Block(stmts) => {
            out.push_str(&format!("{indent}{{\n"));
            for s in stmts {
                render_stmt(s, text, depth + 1, out);
            }
            out.push_str(&format!("{indent}}}\n"));
        }
    }
}
