//! Typed syntax tree for the mini-Java subset, with its lexer, parser and
//! the post-parse resolution pass.
//!
//! The accepted language is a single method:
//!
//! ```text
//! method := "int" Ident "(" params? ")" block
//! params := "int" Ident ("," "int" Ident)*
//! stmt   := "int" Ident "=" expr ";" | expr ";" | "while" "(" expr ")" stmt
//!         | "if" "(" expr ")" stmt ("else" stmt)? | "return" expr? ";"
//!         | "break" Ident? ";" | "continue" Ident? ";" | Ident ":" stmt
//!         | "{" stmt* "}"
//! ```
//!
//! Expressions bind, tightest first: suffix `++`/`--`, `*` `/`, `+` `-`,
//! `<` `>`, `==`, `=` (right associative, identifier target only).

use std::fmt;

use thiserror::Error;

/// 1-based source position.
///
/// Positions are diagnostics only: two spans always compare equal so that
/// `PartialEq` on the tree is structural.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Identity of a syntax node, assigned in pre-order starting at 0 for the method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AstId(pub u32);

/// Index into [`Method::decls`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeclId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Param,
    Local,
}

/// A variable declaration: a parameter or a local.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub kind: DeclKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Method {
    pub id: AstId,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    /// Parameters first, then locals in source order.
    pub decls: Vec<Decl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub decl: DeclId,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub id: AstId,
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    LocalVarDecl {
        name: String,
        decl: DeclId,
        init: Expr,
    },
    ExprStmt(Expr),
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    If {
        cond: Expr,
        then: Box<Stmt>,
        else_: Option<Box<Stmt>>,
    },
    Return(Option<Expr>),
    Break(Option<LabelRef>),
    Continue(Option<LabelRef>),
    Labeled {
        name: String,
        stmt: Box<Stmt>,
    },
    Block(Vec<Stmt>),
}

/// A `break`/`continue` label, bound to the enclosing `Labeled` statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRef {
    pub name: String,
    pub target: Option<AstId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub id: AstId,
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    Additive,
    Multiplicative,
    Relational,
    Equality,
}

impl ChainKind {
    pub fn admits(self, op: Operator) -> bool {
        use Operator::*;
        match self {
            ChainKind::Additive => matches!(op, Addition | Subtraction),
            ChainKind::Multiplicative => matches!(op, Multiplication | Division),
            ChainKind::Relational => matches!(op, LessThan | GreaterThan),
            ChainKind::Equality => matches!(op, Equal),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Assign {
        target: VarRef,
        value: Box<Expr>,
    },
    SuffixUnary {
        target: VarRef,
        op: Operator,
    },
    /// Flat n-ary chain; `operators.len() == children.len() - 1`.
    Chain {
        kind: ChainKind,
        children: Vec<Expr>,
        operators: Vec<Operator>,
    },
    IdentRef(VarRef),
    IntLit(u64),
}

/// A variable occurrence. `decl` is filled by the resolution pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarRef {
    pub name: String,
    pub decl: Option<DeclId>,
}

impl VarRef {
    fn new(name: String) -> Self {
        VarRef { name, decl: None }
    }

    /// The bound declaration. Only valid on trees returned by [`parse_program`].
    pub fn binding(&self) -> DeclId {
        self.decl
            .unwrap_or_else(|| panic!("variable `{}` was never resolved", self.name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Assignment,
    Multiplication,
    Division,
    Addition,
    Subtraction,
    Equal,
    GreaterThan,
    LessThan,
    PlusPlus,
    MinusMinus,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: expected {expected}, found {found}")]
    Syntax {
        line: u32,
        column: u32,
        expected: String,
        found: String,
    },
    #[error("{line}:{column}: no enclosing label `{name}`")]
    UnresolvedLabel {
        name: String,
        line: u32,
        column: u32,
    },
    #[error("{line}:{column}: unresolved variable `{name}`")]
    UnresolvedVariable {
        name: String,
        line: u32,
        column: u32,
    },
    #[error("{line}:{column}: duplicate parameter `{name}`")]
    DuplicateParam {
        name: String,
        line: u32,
        column: u32,
    },
}

/// Parse and resolve a complete program.
pub fn parse_program(source: &str) -> Result<Method, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        decls: Vec::new(),
    };
    let mut method = parser.method()?;
    number(&mut method);
    resolve(&mut method)?;
    Ok(method)
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    KwInt,
    KwWhile,
    KwIf,
    KwElse,
    KwReturn,
    KwBreak,
    KwContinue,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Colon,
    Assign,
    EqEq,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Slash,
    PlusPlus,
    MinusMinus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Int(v) => return write!(f, "integer `{v}`"),
            Tok::KwInt => "`int`",
            Tok::KwWhile => "`while`",
            Tok::KwIf => "`if`",
            Tok::KwElse => "`else`",
            Tok::KwReturn => "`return`",
            Tok::KwBreak => "`break`",
            Tok::KwContinue => "`continue`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Assign => "`=`",
            Tok::EqEq => "`==`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::PlusPlus => "`++`",
            Tok::MinusMinus => "`--`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1u32, 1u32);

    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let tok = match word.as_str() {
                "int" => Tok::KwInt,
                "while" => Tok::KwWhile,
                "if" => Tok::KwIf,
                "else" => Tok::KwElse,
                "return" => Tok::KwReturn,
                "break" => Tok::KwBreak,
                "continue" => Tok::KwContinue,
                _ => Tok::Ident(word),
            };
            tokens.push(Token { tok, span });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let value = digits.parse::<u64>().map_err(|_| ParseError::Syntax {
                line: span.line,
                column: span.column,
                expected: "an integer literal that fits in 64 bits".into(),
                found: format!("`{digits}`"),
            })?;
            tokens.push(Token {
                tok: Tok::Int(value),
                span,
            });
            continue;
        }
        let two = |next: char| chars.get(i + 1) == Some(&next);
        let (tok, width) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            '=' if two('=') => (Tok::EqEq, 2),
            '=' => (Tok::Assign, 1),
            '<' => (Tok::Lt, 1),
            '>' => (Tok::Gt, 1),
            '+' if two('+') => (Tok::PlusPlus, 2),
            '+' => (Tok::Plus, 1),
            '-' if two('-') => (Tok::MinusMinus, 2),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            other => {
                return Err(ParseError::Syntax {
                    line,
                    column: col,
                    expected: "a token".into(),
                    found: format!("character {other:?}"),
                })
            }
        };
        tokens.push(Token { tok, span });
        i += width;
        col += width as u32;
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span { line, column: col },
    });
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    decls: Vec<Decl>,
}

/// Placeholder until [`number`] runs.
const UNNUMBERED: AstId = AstId(u32::MAX);

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        let span = self.span();
        Err(ParseError::Syntax {
            line: span.line,
            column: span.column,
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.error(&tok.to_string())
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => self.error("identifier"),
        }
    }

    fn declare(&mut self, name: &str, kind: DeclKind, span: Span) -> DeclId {
        let id = DeclId(self.decls.len() as u32);
        self.decls.push(Decl {
            name: name.to_string(),
            kind,
            span,
        });
        id
    }

    fn method(&mut self) -> Result<Method, ParseError> {
        let id = UNNUMBERED;
        let span = self.expect(Tok::KwInt)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                self.expect(Tok::KwInt)?;
                let (pname, pspan) = self.ident()?;
                if params.iter().any(|p: &Param| p.name == pname) {
                    return Err(ParseError::DuplicateParam {
                        name: pname,
                        line: pspan.line,
                        column: pspan.column,
                    });
                }
                let decl = self.declare(&pname, DeclKind::Param, pspan);
                params.push(Param {
                    name: pname,
                    decl,
                    span: pspan,
                });
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut body = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return self.error("`}`");
            }
            body.push(self.stmt()?);
        }
        self.bump();
        if *self.peek() != Tok::Eof {
            return self.error("end of input");
        }
        Ok(Method {
            id,
            name,
            params,
            body,
            decls: std::mem::take(&mut self.decls),
            span,
        })
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let span = self.span();
        let id = UNNUMBERED;
        let kind = match self.peek().clone() {
            Tok::KwInt => {
                self.bump();
                let (name, name_span) = self.ident()?;
                self.expect(Tok::Assign)?;
                let decl = self.declare(&name, DeclKind::Local, name_span);
                let init = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::LocalVarDecl { name, decl, init }
            }
            Tok::KwWhile => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = Box::new(self.stmt()?);
                StmtKind::While { cond, body }
            }
            Tok::KwIf => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then = Box::new(self.stmt()?);
                let else_ = if *self.peek() == Tok::KwElse {
                    self.bump();
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                StmtKind::If { cond, then, else_ }
            }
            Tok::KwReturn => {
                self.bump();
                let value = if *self.peek() == Tok::Semi {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(Tok::Semi)?;
                StmtKind::Return(value)
            }
            Tok::KwBreak | Tok::KwContinue => {
                let is_break = *self.peek() == Tok::KwBreak;
                self.bump();
                let label = match self.peek().clone() {
                    Tok::Ident(name) => {
                        self.bump();
                        Some(LabelRef { name, target: None })
                    }
                    _ => None,
                };
                self.expect(Tok::Semi)?;
                if is_break {
                    StmtKind::Break(label)
                } else {
                    StmtKind::Continue(label)
                }
            }
            Tok::LBrace => {
                self.bump();
                let mut stmts = Vec::new();
                while *self.peek() != Tok::RBrace {
                    if *self.peek() == Tok::Eof {
                        return self.error("`}`");
                    }
                    stmts.push(self.stmt()?);
                }
                self.bump();
                StmtKind::Block(stmts)
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::Colon => {
                self.bump();
                self.bump();
                let stmt = Box::new(self.stmt()?);
                StmtKind::Labeled { name, stmt }
            }
            Tok::Ident(_) | Tok::Int(_) | Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::ExprStmt(e)
            }
            _ => return self.error("statement"),
        };
        Ok(Stmt { id, span, kind })
    }

    /// Full expression: an assignment or an equality chain.
    fn expr(&mut self) -> Result<Expr, ParseError> {
        if let (Tok::Ident(name), Tok::Assign) = (self.peek().clone(), self.peek_at(1).clone()) {
            let span = self.span();
            let id = UNNUMBERED;
            self.bump();
            self.bump();
            let value = Box::new(self.expr()?);
            return Ok(Expr {
                id,
                span,
                kind: ExprKind::Assign {
                    target: VarRef::new(name),
                    value,
                },
            });
        }
        self.chain(ChainKind::Equality)
    }

    fn chain(&mut self, kind: ChainKind) -> Result<Expr, ParseError> {
        let span = self.span();
        let first = self.chain_operand(kind)?;
        let mut children = vec![first];
        let mut operators = Vec::new();
        while let Some(op) = chain_operator(self.peek()).filter(|op| kind.admits(*op)) {
            self.bump();
            operators.push(op);
            children.push(self.chain_operand(kind)?);
        }
        if operators.is_empty() {
            return Ok(children.pop().expect("one operand"));
        }
        Ok(Expr {
            id: UNNUMBERED,
            span,
            kind: ExprKind::Chain {
                kind,
                children,
                operators,
            },
        })
    }

    fn chain_operand(&mut self, kind: ChainKind) -> Result<Expr, ParseError> {
        match kind {
            ChainKind::Equality => self.chain(ChainKind::Relational),
            ChainKind::Relational => self.chain(ChainKind::Additive),
            ChainKind::Additive => self.chain(ChainKind::Multiplicative),
            ChainKind::Multiplicative => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(name) => {
                let id = UNNUMBERED;
                self.bump();
                let kind = match self.peek() {
                    Tok::PlusPlus | Tok::MinusMinus => {
                        let op = if *self.peek() == Tok::PlusPlus {
                            Operator::PlusPlus
                        } else {
                            Operator::MinusMinus
                        };
                        self.bump();
                        ExprKind::SuffixUnary {
                            target: VarRef::new(name),
                            op,
                        }
                    }
                    Tok::Assign => {
                        return self.error("an operator other than `=` inside an expression")
                    }
                    _ => ExprKind::IdentRef(VarRef::new(name)),
                };
                if matches!(self.peek(), Tok::PlusPlus | Tok::MinusMinus) {
                    return self.error("an operator");
                }
                Ok(Expr { id, span, kind })
            }
            Tok::Int(value) => {
                let id = UNNUMBERED;
                self.bump();
                Ok(Expr {
                    id,
                    span,
                    kind: ExprKind::IntLit(value),
                })
            }
            Tok::LParen => {
                // Grouping only; assignments are not allowed inside.
                self.bump();
                let inner = self.chain(ChainKind::Equality)?;
                self.expect(Tok::RParen)?;
                if matches!(self.peek(), Tok::PlusPlus | Tok::MinusMinus) {
                    return self.error("an operator");
                }
                Ok(inner)
            }
            Tok::PlusPlus | Tok::MinusMinus => {
                self.error("an operand (prefix increment/decrement is not supported)")
            }
            _ => self.error("an operand"),
        }
    }
}

fn chain_operator(tok: &Tok) -> Option<Operator> {
    Some(match tok {
        Tok::Plus => Operator::Addition,
        Tok::Minus => Operator::Subtraction,
        Tok::Star => Operator::Multiplication,
        Tok::Slash => Operator::Division,
        Tok::Lt => Operator::LessThan,
        Tok::Gt => Operator::GreaterThan,
        Tok::EqEq => Operator::Equal,
        _ => return None,
    })
}

/// Assign dense pre-order ids, the method being 0.
fn number(method: &mut Method) {
    fn stmt(s: &mut Stmt, next: &mut u32) {
        s.id = AstId(*next);
        *next += 1;
        match &mut s.kind {
            StmtKind::LocalVarDecl { init, .. } => expr(init, next),
            StmtKind::ExprStmt(e) => expr(e, next),
            StmtKind::While { cond, body } => {
                expr(cond, next);
                stmt(body, next);
            }
            StmtKind::If { cond, then, else_ } => {
                expr(cond, next);
                stmt(then, next);
                if let Some(e) = else_ {
                    stmt(e, next);
                }
            }
            StmtKind::Return(v) => {
                if let Some(v) = v {
                    expr(v, next);
                }
            }
            StmtKind::Break(_) | StmtKind::Continue(_) => {}
            StmtKind::Labeled { stmt: inner, .. } => stmt(inner, next),
            StmtKind::Block(stmts) => stmts.iter_mut().for_each(|s| stmt(s, next)),
        }
    }
    fn expr(e: &mut Expr, next: &mut u32) {
        e.id = AstId(*next);
        *next += 1;
        match &mut e.kind {
            ExprKind::Assign { value, .. } => expr(value, next),
            ExprKind::Chain { children, .. } => children.iter_mut().for_each(|c| expr(c, next)),
            ExprKind::SuffixUnary { .. } | ExprKind::IdentRef(_) | ExprKind::IntLit(_) => {}
        }
    }
    method.id = AstId(0);
    let mut next = 1;
    method.body.iter_mut().for_each(|s| stmt(s, &mut next));
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

struct Resolver<'a> {
    decls: &'a [Decl],
    /// Innermost scope last.
    scopes: Vec<Vec<DeclId>>,
    /// Enclosing labels, innermost last.
    labels: Vec<(String, AstId)>,
}

/// Bind every variable occurrence to its innermost visible declaration and
/// every jump label to its enclosing labeled statement.
fn resolve(method: &mut Method) -> Result<(), ParseError> {
    let params = method.params.iter().map(|p| p.decl).collect();
    let mut r = Resolver {
        decls: &method.decls,
        scopes: vec![params],
        labels: Vec::new(),
    };
    r.scopes.push(Vec::new());
    for stmt in &mut method.body {
        r.stmt(stmt)?;
    }
    Ok(())
}

impl Resolver<'_> {
    fn lookup(&self, var: &mut VarRef, span: Span) -> Result<(), ParseError> {
        let found = self
            .scopes
            .iter()
            .rev()
            .flat_map(|scope| scope.iter().rev())
            .find(|d| self.decls[d.0 as usize].name == var.name);
        match found {
            Some(d) => {
                var.decl = Some(*d);
                Ok(())
            }
            None => Err(ParseError::UnresolvedVariable {
                name: var.name.clone(),
                line: span.line,
                column: span.column,
            }),
        }
    }

    fn scoped(&mut self, stmt: &mut Stmt) -> Result<(), ParseError> {
        self.scopes.push(Vec::new());
        let res = self.stmt(stmt);
        self.scopes.pop();
        res
    }

    fn label(&self, label: &mut Option<LabelRef>, span: Span) -> Result<(), ParseError> {
        if let Some(l) = label {
            match self.labels.iter().rev().find(|(name, _)| *name == l.name) {
                Some((_, target)) => l.target = Some(*target),
                None => {
                    return Err(ParseError::UnresolvedLabel {
                        name: l.name.clone(),
                        line: span.line,
                        column: span.column,
                    })
                }
            }
        }
        Ok(())
    }

    fn stmt(&mut self, stmt: &mut Stmt) -> Result<(), ParseError> {
        let span = stmt.span;
        match &mut stmt.kind {
            StmtKind::LocalVarDecl { decl, init, .. } => {
                self.expr(init)?;
                self.scopes.last_mut().expect("scope").push(*decl);
            }
            StmtKind::ExprStmt(e) => self.expr(e)?,
            StmtKind::While { cond, body } => {
                self.expr(cond)?;
                self.scoped(body)?;
            }
            StmtKind::If { cond, then, else_ } => {
                self.expr(cond)?;
                self.scoped(then)?;
                if let Some(e) = else_ {
                    self.scoped(e)?;
                }
            }
            StmtKind::Return(value) => {
                if let Some(v) = value {
                    self.expr(v)?;
                }
            }
            StmtKind::Break(label) | StmtKind::Continue(label) => self.label(label, span)?,
            StmtKind::Labeled { name, stmt: inner } => {
                self.labels.push((name.clone(), stmt.id));
                let res = self.scoped(inner);
                self.labels.pop();
                res?;
            }
            StmtKind::Block(stmts) => {
                self.scopes.push(Vec::new());
                for s in stmts.iter_mut() {
                    if let Err(e) = self.stmt(s) {
                        self.scopes.pop();
                        return Err(e);
                    }
                }
                self.scopes.pop();
            }
        }
        Ok(())
    }

    fn expr(&mut self, expr: &mut Expr) -> Result<(), ParseError> {
        let span = expr.span;
        match &mut expr.kind {
            ExprKind::Assign { target, value } => {
                self.lookup(target, span)?;
                self.expr(value)
            }
            ExprKind::SuffixUnary { target, .. } | ExprKind::IdentRef(target) => {
                self.lookup(target, span)
            }
            ExprKind::Chain { children, .. } => children.iter_mut().try_for_each(|c| self.expr(c)),
            ExprKind::IntLit(_) => Ok(()),
        }
    }
}

impl Method {
    /// Number of syntax nodes; ids are dense in `0..node_count()`.
    pub fn node_count(&self) -> usize {
        fn stmt(s: &Stmt) -> usize {
            1 + match &s.kind {
                StmtKind::LocalVarDecl { init, .. } => expr(init),
                StmtKind::ExprStmt(e) => expr(e),
                StmtKind::While { cond, body } => expr(cond) + stmt(body),
                StmtKind::If { cond, then, else_ } => {
                    expr(cond) + stmt(then) + else_.as_deref().map_or(0, stmt)
                }
                StmtKind::Return(v) => v.as_ref().map_or(0, expr),
                StmtKind::Break(_) | StmtKind::Continue(_) => 0,
                StmtKind::Labeled { stmt: inner, .. } => stmt(inner),
                StmtKind::Block(stmts) => stmts.iter().map(stmt).sum(),
            }
        }
        fn expr(e: &Expr) -> usize {
            1 + match &e.kind {
                ExprKind::Assign { value, .. } => expr(value),
                ExprKind::Chain { children, .. } => children.iter().map(expr).sum(),
                ExprKind::SuffixUnary { .. } | ExprKind::IdentRef(_) | ExprKind::IntLit(_) => 0,
            }
        }
        1 + self.body.iter().map(stmt).sum::<usize>()
    }
}
