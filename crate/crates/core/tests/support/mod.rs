//! Shared test helpers: a seeded generator of well-formed programs and a
//! brute-force data flow oracle.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use flowgraph::controlflow::EdgeTable;
use flowgraph::defuse::DefUseAttr;
use flowgraph::flowgraph::{FlowGraph, FlowId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// `(stem, source)` for every `.mj` file in the corpus, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "mj"))
        .map(|p| {
            let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
            (stem, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

struct Label {
    name: String,
    on_loop: bool,
}

/// Random well-formed programs: every variable is declared before use,
/// `break`/`continue` only appear where they have a target, labels are in
/// scope, and blocks are never empty.
pub struct ProgramGen {
    rng: ChaCha8Rng,
    budget: usize,
    scopes: Vec<Vec<String>>,
    next_var: usize,
    next_label: usize,
    loops: usize,
    labels: Vec<Label>,
    max_depth: usize,
    parens: bool,
}

impl ProgramGen {
    pub fn new(seed: u64) -> Self {
        ProgramGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            budget: 0,
            scopes: Vec::new(),
            next_var: 0,
            next_label: 0,
            loops: 0,
            labels: Vec::new(),
            max_depth: 5,
            parens: true,
        }
    }

    /// Never emit parenthesized groups. Labels drop parentheses, so only
    /// such programs survive a render and re-parse unchanged.
    pub fn without_parens(mut self) -> Self {
        self.parens = false;
        self
    }

    /// A method with at most `max_stmts` statements (every statement node
    /// counts, blocks and labeled statements included).
    pub fn program(&mut self, max_stmts: usize) -> String {
        assert!(max_stmts >= 1);
        self.budget = max_stmts;
        self.next_var = 0;
        self.next_label = 0;
        let params: Vec<String> = (0..self.rng.gen_range(0..=3))
            .map(|i| format!("p{i}"))
            .collect();
        self.scopes = vec![params.clone()];
        let target = self.rng.gen_range(1..=max_stmts);
        let mut body = Vec::new();
        while self.budget > 0 && max_stmts - self.budget < target {
            body.push(self.stmt(1, true));
        }
        let params: Vec<String> = params.iter().map(|p| format!("int {p}")).collect();
        format!("int m({}) {{\n{}}}\n", params.join(", "), indent(&body, 1))
    }

    /// A program of exactly `n` statements for scale tests: a fixed ten-line
    /// pattern of assignments, declarations, a loop and an if/else, repeated.
    pub fn large_program(&mut self, n: usize) -> String {
        let mut out = String::from("int big(int a, int b) {\n    int i = 0;\n");
        let mut count = 1;
        let mut line = 0usize;
        while count < n {
            let left = n - count;
            let (text, stmts) = match line % 10 {
                0 if left >= 3 => (format!("while (i < {line}) {{ i++; }}"), 3),
                1 => (format!("a = a + b * {line};"), 1),
                2 => (format!("int v{line} = a - i;"), 1),
                3 => ("b = a;".to_string(), 1),
                4 if left >= 3 => (format!("if (a > {line}) b = b - 1; else a++;"), 3),
                _ => ("i = i + 1;".to_string(), 1),
            };
            out.push_str("    ");
            out.push_str(&text);
            out.push('\n');
            count += stmts;
            line += 1;
        }
        out.push_str("}\n");
        out
    }

    fn fresh_var(&mut self) -> String {
        let v = format!("v{}", self.next_var);
        self.next_var += 1;
        v
    }

    fn var(&mut self) -> Option<String> {
        let count: usize = self.scopes.iter().map(Vec::len).sum();
        if count == 0 {
            return None;
        }
        let k = self.rng.gen_range(0..count);
        self.scopes.iter().flatten().nth(k).cloned()
    }

    fn atom(&mut self) -> String {
        match (self.rng.gen_range(0..10), self.var()) {
            (0..=4, Some(v)) => v,
            (5, Some(v)) => format!("{v}{}", if self.rng.gen() { "++" } else { "--" }),
            _ => self.rng.gen_range(0..100).to_string(),
        }
    }

    fn chain(&mut self, ops: &[&str], depth: usize) -> String {
        let n = self.rng.gen_range(2..=3);
        let mut s = self.operand(depth);
        for _ in 1..n {
            let op = ops.choose(&mut self.rng).unwrap();
            s = format!("{s} {op} {}", self.operand(depth));
        }
        s
    }

    fn operand(&mut self, depth: usize) -> String {
        if depth == 0 || self.rng.gen_bool(0.6) {
            return self.atom();
        }
        let group = match self.rng.gen_range(0..3) {
            0 => return self.chain(&["*", "/"], depth - 1),
            1 => self.chain(&["+", "-"], depth - 1),
            _ => self.condition(depth - 1),
        };
        if self.parens {
            format!("({group})")
        } else {
            group
        }
    }

    fn value(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 => self.atom(),
            1 => self.chain(&["*", "/"], 1),
            _ => self.chain(&["+", "-"], 1),
        }
    }

    fn condition(&mut self, depth: usize) -> String {
        let op = ["<", ">", "=="].choose(&mut self.rng).unwrap();
        let l = if depth > 0 { self.value() } else { self.atom() };
        format!("{l} {op} {}", self.atom())
    }

    fn simple(&mut self, decl_ok: bool) -> String {
        self.budget -= 1;
        let target = self.var();
        match (self.rng.gen_range(0..10), target) {
            (0..=2, _) if decl_ok => {
                let init = self.value();
                let v = self.fresh_var();
                self.scopes.last_mut().unwrap().push(v.clone());
                format!("int {v} = {init};")
            }
            (3..=5, Some(t)) => format!("{t} = {};", self.value()),
            (6, Some(t)) => match self.var() {
                Some(u) => format!("{t} = {u} = {};", self.atom()),
                None => format!("{t} = {};", self.value()),
            },
            (7..=8, Some(t)) => format!("{t}{};", if self.rng.gen() { "++" } else { "--" }),
            _ => {
                let init = self.value();
                let v = self.fresh_var();
                if decl_ok {
                    self.scopes.last_mut().unwrap().push(v.clone());
                    format!("int {v} = {init};")
                } else {
                    format!("return {init};")
                }
            }
        }
    }

    fn jump(&mut self) -> Option<String> {
        let mut options = Vec::new();
        if self.loops > 0 {
            options.push("break;".to_string());
            options.push("continue;".to_string());
        }
        for l in &self.labels {
            options.push(format!("break {};", l.name));
            if l.on_loop {
                options.push(format!("continue {};", l.name));
            }
        }
        let pick = options.choose(&mut self.rng).cloned()?;
        self.budget -= 1;
        Some(pick)
    }

    /// One statement. `decl_ok` is false where a declaration would be the
    /// sole statement of a branch or loop body.
    fn stmt(&mut self, depth: usize, decl_ok: bool) -> String {
        let compound_ok = depth < self.max_depth && self.budget >= 3;
        let roll = self.rng.gen_range(0..100);
        if compound_ok {
            match roll {
                0..=14 => return self.while_stmt(depth),
                15..=29 => return self.if_stmt(depth),
                30..=36 => return self.block(depth),
                37..=42 => return self.labeled(depth),
                _ => {}
            }
        }
        match roll {
            43..=50 => {
                if let Some(j) = self.jump() {
                    return j;
                }
            }
            51..=53 => {
                self.budget -= 1;
                return match self.rng.gen_bool(0.7) {
                    true => format!("return {};", self.value()),
                    false => "return;".to_string(),
                };
            }
            _ => {}
        }
        self.simple(decl_ok)
    }

    fn body(&mut self, depth: usize) -> String {
        if self.budget >= 2 && self.rng.gen_bool(0.6) {
            self.block(depth)
        } else {
            self.scopes.push(Vec::new());
            let s = self.stmt(depth, false);
            self.scopes.pop();
            s
        }
    }

    fn while_stmt(&mut self, depth: usize) -> String {
        self.budget -= 1;
        let cond = self.condition(1);
        self.loops += 1;
        let body = self.body(depth + 1);
        self.loops -= 1;
        format!("while ({cond}) {body}")
    }

    fn if_stmt(&mut self, depth: usize) -> String {
        self.budget -= 1;
        let cond = self.condition(1);
        let then = self.body(depth + 1);
        if self.budget >= 1 && self.rng.gen_bool(0.5) {
            let else_ = self.body(depth + 1);
            format!("if ({cond}) {then}\nelse {else_}")
        } else {
            format!("if ({cond}) {then}")
        }
    }

    fn block(&mut self, depth: usize) -> String {
        self.budget -= 1;
        self.scopes.push(Vec::new());
        let n = self.rng.gen_range(1..=4);
        let mut stmts = vec![self.stmt(depth + 1, true)];
        while stmts.len() < n && self.budget > 0 {
            stmts.push(self.stmt(depth + 1, true));
        }
        self.scopes.pop();
        format!("{{\n{}}}", indent(&stmts, 1))
    }

    fn labeled(&mut self, depth: usize) -> String {
        self.budget -= 1;
        let name = format!("L{}", self.next_label);
        self.next_label += 1;
        let on_loop = self.rng.gen_bool(0.6);
        self.labels.push(Label {
            name: name.clone(),
            on_loop,
        });
        let inner = if on_loop {
            self.while_stmt(depth + 1)
        } else {
            self.block(depth + 1)
        };
        self.labels.pop();
        format!("{name}: {inner}")
    }
}

fn indent(stmts: &[String], level: usize) -> String {
    let pad = "    ".repeat(level);
    let mut out = String::new();
    for s in stmts {
        for line in s.lines() {
            out.push_str(&pad);
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

/// Data flow by exhaustive enumeration of backward simple paths.
///
/// For each use of `v` at `u`, every backward simple path from `u` is
/// followed until its first node that defines `v`; that node gets an edge
/// to `u`. A path that runs out of predecessors first is an undefined use.
/// `u` defining a variable it also uses gets a self-edge.
pub struct Oracle {
    pub edges: BTreeSet<(FlowId, FlowId)>,
    /// `(variable name, use site)`.
    pub undefined: BTreeSet<(String, FlowId)>,
    pub paths: usize,
}

pub fn oracle(graph: &FlowGraph, cf: &EdgeTable, du: &DefUseAttr) -> Oracle {
    let mut o = Oracle {
        edges: BTreeSet::new(),
        undefined: BTreeSet::new(),
        paths: 0,
    };
    for u in graph.flow_instrs() {
        for &v in du.uses(u) {
            if du.defs(u).contains(&v) {
                o.edges.insert((u, u));
            }
            let mut on_path = vec![false; graph.len()];
            on_path[u.index()] = true;
            if cf.prev(u).is_empty() {
                o.undefined.insert((graph.txt(v).to_string(), u));
            }
            for &p in cf.prev(u) {
                walk(p, u, v, graph, cf, du, &mut on_path, &mut o);
            }
        }
    }
    o
}

#[allow(clippy::too_many_arguments)]
fn walk(
    n: FlowId,
    u: FlowId,
    v: FlowId,
    graph: &FlowGraph,
    cf: &EdgeTable,
    du: &DefUseAttr,
    on_path: &mut [bool],
    o: &mut Oracle,
) {
    if on_path[n.index()] {
        return;
    }
    o.paths += 1;
    if du.defs(n).contains(&v) {
        o.edges.insert((n, u));
        return;
    }
    if cf.prev(n).is_empty() {
        o.undefined.insert((graph.txt(v).to_string(), u));
        return;
    }
    on_path[n.index()] = true;
    for &p in cf.prev(n) {
        walk(p, u, v, graph, cf, du, on_path, o);
    }
    on_path[n.index()] = false;
}
