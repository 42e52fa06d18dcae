//! `.validate` specifications: required `cfNext`/`dfNext` links between
//! nodes identified by label, and the check that reports false links (in the
//! graph, not in the spec) and missing links (in the spec, not in the graph).
//!
//! ```text
//! validate example
//! cfNext : "m()" --> "return;"
//! dfNext : "int a = 1;" --> "return a;"
//! ```

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::controlflow::EdgeTable;
use crate::dataflow::DfEdgeTable;
use crate::flowgraph::{FlowGraph, FlowId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkAssertion {
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationSpec {
    pub name: String,
    pub cf_links: Vec<LinkAssertion>,
    pub df_links: Vec<LinkAssertion>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: u32,
        column: u32,
        message: String,
    },
    #[error("{line}:{column}: cfNext assertion after a dfNext assertion")]
    Order { line: u32, column: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LinkKind {
    Control,
    Data,
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkKind::Control => "Control",
            LinkKind::Data => "Data",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub false_cf: Vec<LinkAssertion>,
    pub false_df: Vec<LinkAssertion>,
    pub missing_cf: Vec<LinkAssertion>,
    pub missing_df: Vec<LinkAssertion>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.false_cf.is_empty()
            && self.false_df.is_empty()
            && self.missing_cf.is_empty()
            && self.missing_df.is_empty()
    }

    /// Findings in report order: false control, false data, missing
    /// control, missing data.
    pub fn findings(&self) -> impl Iterator<Item = (LinkKind, Finding, &LinkAssertion)> {
        [
            (LinkKind::Control, Finding::False, &self.false_cf),
            (LinkKind::Data, Finding::False, &self.false_df),
            (LinkKind::Control, Finding::Missing, &self.missing_cf),
            (LinkKind::Data, Finding::Missing, &self.missing_df),
        ]
        .into_iter()
        .flat_map(|(kind, finding, list)| list.iter().map(move |l| (kind, finding, l)))
    }

    /// One line per finding: `<Kind> false link: <left> ==> <right>`.
    pub fn render(&self, color: bool) -> String {
        let mut out = String::new();
        for (kind, finding, link) in self.findings() {
            let word = match finding {
                Finding::False => "false",
                Finding::Missing => "missing",
            };
            let head = format!("{kind} {word} link: ");
            if color {
                let code = match finding {
                    Finding::False => "31",
                    Finding::Missing => "33",
                };
                out.push_str(&format!("\x1b[{code}m{head}\x1b[0m"));
            } else {
                out.push_str(&head);
            }
            out.push_str(&format!("{} ==> {}\n", link.left, link.right));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finding {
    False,
    Missing,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Colon,
    Arrow,
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error<T>(&self, line: u32, column: u32, message: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Result<(Tok, u32, u32), SpecError> {
        loop {
            match self.chars.peek().copied() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    let (line, column) = (self.line, self.column);
                    self.bump();
                    if self.chars.peek() != Some(&'/') {
                        return self.error(line, column, "unexpected `/`");
                    }
                    while self.chars.peek().is_some_and(|c| *c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let (line, column) = (self.line, self.column);
        let Some(c) = self.bump() else {
            return Ok((Tok::Eof, line, column));
        };
        let tok = match c {
            ':' => Tok::Colon,
            '-' => {
                if self.bump() == Some('-') && self.bump() == Some('>') {
                    Tok::Arrow
                } else {
                    return self.error(line, column, "expected `-->`");
                }
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None | Some('\n') => {
                            return self.error(line, column, "unterminated string")
                        }
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            _ => {
                                return self.error(
                                    self.line,
                                    self.column - 1,
                                    "invalid escape, expected `\\\"` or `\\\\`",
                                )
                            }
                        },
                        Some(other) => s.push(other),
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while let Some(&n) = self.chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        s.push(n);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Word(s)
            }
            other => return self.error(line, column, format!("unexpected character {other:?}")),
        };
        Ok((tok, line, column))
    }
}

pub fn parse_spec(text: &str) -> Result<ValidationSpec, SpecError> {
    let mut lexer = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        let t = lexer.next()?;
        let eof = t.0 == Tok::Eof;
        tokens.push(t);
        if eof {
            break;
        }
    }
    let mut pos = 0;
    let mut take = || {
        let t = tokens[pos].clone();
        pos = (pos + 1).min(tokens.len() - 1);
        t
    };
    let unexpected = |(tok, line, column): (Tok, u32, u32), expected: &str| -> SpecError {
        let found = match tok {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`-->`".into(),
            Tok::Eof => "end of input".into(),
        };
        SpecError::Syntax {
            line,
            column,
            message: format!("expected {expected}, found {found}"),
        }
    };

    match take() {
        (Tok::Word(w), ..) if w == "validate" => {}
        t => return Err(unexpected(t, "`validate`")),
    }
    let name = match take() {
        (Tok::Word(w), ..) => w,
        t => return Err(unexpected(t, "a specification name")),
    };
    let mut spec = ValidationSpec {
        name,
        cf_links: Vec::new(),
        df_links: Vec::new(),
    };
    loop {
        let (kind, line, column) = match take() {
            (Tok::Eof, ..) => break,
            (Tok::Word(w), line, column) if w == "cfNext" => (LinkKind::Control, line, column),
            (Tok::Word(w), line, column) if w == "dfNext" => (LinkKind::Data, line, column),
            t => return Err(unexpected(t, "`cfNext`, `dfNext` or end of input")),
        };
        match take() {
            (Tok::Colon, ..) => {}
            t => return Err(unexpected(t, "`:`")),
        }
        let left = match take() {
            (Tok::Str(s), l, c) if s.is_empty() => {
                return Err(unexpected((Tok::Str(s), l, c), "a nonempty label"))
            }
            (Tok::Str(s), ..) => s,
            t => return Err(unexpected(t, "a quoted label")),
        };
        match take() {
            (Tok::Arrow, ..) => {}
            t => return Err(unexpected(t, "`-->`")),
        }
        let right = match take() {
            (Tok::Str(s), l, c) if s.is_empty() => {
                return Err(unexpected((Tok::Str(s), l, c), "a nonempty label"))
            }
            (Tok::Str(s), ..) => s,
            t => return Err(unexpected(t, "a quoted label")),
        };
        let link = LinkAssertion { left, right };
        match kind {
            LinkKind::Control if !spec.df_links.is_empty() => {
                return Err(SpecError::Order { line, column })
            }
            LinkKind::Control => spec.cf_links.push(link),
            LinkKind::Data => spec.df_links.push(link),
        }
    }
    Ok(spec)
}

pub(crate) fn quote(label: &str) -> String {
    let mut out = String::with_capacity(label.len() + 2);
    out.push('"');
    for c in label.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

impl fmt::Display for ValidationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validate {}", self.name)?;
        for l in &self.cf_links {
            writeln!(f, "cfNext : {} --> {}", quote(&l.left), quote(&l.right))?;
        }
        for l in &self.df_links {
            writeln!(f, "dfNext : {} --> {}", quote(&l.left), quote(&l.right))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

/// Distinct label pairs of a set of edges, in edge order.
fn label_pairs(
    graph: &FlowGraph,
    edges: impl Iterator<Item = (FlowId, FlowId)>,
) -> Vec<(&str, &str)> {
    let mut seen = HashSet::new();
    edges
        .map(|(a, b)| (graph.txt(a), graph.txt(b)))
        .filter(|pair| seen.insert(*pair))
        .collect()
}

fn compare(
    graph_pairs: &[(&str, &str)],
    asserted: &[LinkAssertion],
) -> (Vec<LinkAssertion>, Vec<LinkAssertion>) {
    let asserted_set: HashSet<(&str, &str)> = asserted
        .iter()
        .map(|l| (l.left.as_str(), l.right.as_str()))
        .collect();
    let present: HashSet<(&str, &str)> = graph_pairs.iter().copied().collect();
    let false_links = graph_pairs
        .iter()
        .filter(|p| !asserted_set.contains(*p))
        .map(|(l, r)| LinkAssertion {
            left: l.to_string(),
            right: r.to_string(),
        })
        .collect();
    let mut reported = HashSet::new();
    let missing = asserted
        .iter()
        .filter(|l| !present.contains(&(l.left.as_str(), l.right.as_str())))
        .filter(|l| reported.insert((l.left.as_str(), l.right.as_str())))
        .cloned()
        .collect();
    (false_links, missing)
}

/// Compare a spec with a graph's edges. Labels match by exact string
/// equality; an assertion is satisfied if any pair of nodes carrying its
/// labels is linked.
pub fn check(
    spec: &ValidationSpec,
    graph: &FlowGraph,
    cf: &EdgeTable,
    df: &DfEdgeTable,
) -> ValidationReport {
    let (false_cf, missing_cf) = compare(&label_pairs(graph, cf.edges()), &spec.cf_links);
    let (false_df, missing_df) = compare(&label_pairs(graph, df.edges()), &spec.df_links);
    ValidationReport {
        false_cf,
        false_df,
        missing_cf,
        missing_df,
        warnings: Vec::new(),
    }
}

/// A spec asserting exactly the graph's links, one line per distinct label
/// pair; named after the method.
pub fn emit_spec(graph: &FlowGraph, cf: &EdgeTable, df: &DfEdgeTable) -> ValidationSpec {
    let to_links = |pairs: Vec<(&str, &str)>| {
        pairs
            .into_iter()
            .map(|(l, r)| LinkAssertion {
                left: l.to_string(),
                right: r.to_string(),
            })
            .collect()
    };
    let name = graph.txt(graph.method()).trim_end_matches("()").to_string();
    ValidationSpec {
        name,
        cf_links: to_links(label_pairs(graph, cf.edges())),
        df_links: to_links(label_pairs(graph, df.edges())),
    }
}
