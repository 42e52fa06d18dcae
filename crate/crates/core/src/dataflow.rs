//! Data flow edges: a definition `d` of `v` links to a use `u` of `v` when
//! some control flow path from `d` reaches `u` without passing another
//! definition of `v`. An instruction that both defines and uses `v` also
//! links to itself.

use std::collections::HashMap;
use std::fmt;

use crate::controlflow::EdgeTable;
use crate::defuse::DefUseAttr;
use crate::flowgraph::{FlowGraph, FlowId};

/// `dfNext` adjacency, definition site to use site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfEdgeTable {
    next: Vec<Vec<FlowId>>,
}

impl DfEdgeTable {
    pub fn new(len: usize) -> Self {
        DfEdgeTable {
            next: vec![Vec::new(); len],
        }
    }

    pub fn add(&mut self, def: FlowId, use_: FlowId) -> bool {
        let out = &mut self.next[def.index()];
        if out.contains(&use_) {
            return false;
        }
        out.push(use_);
        true
    }

    pub fn next(&self, node: FlowId) -> &[FlowId] {
        &self.next[node.index()]
    }

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

/// A use that at least one path reaches without any definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndefinedUseWarning {
    pub var: String,
    pub node: FlowId,
    pub txt: String,
}

impl fmt::Display for UndefinedUseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "use of `{}` in \"{}\" has no reaching definition on some path",
            self.var, self.txt
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataFlow {
    pub edges: DfEdgeTable,
    pub warnings: Vec<UndefinedUseWarning>,
}

/// Every flow instruction backward-reachable from `node` via `cfPrev`, once
/// each, `node` itself excluded.
///
/// Nodes come in reverse postorder of a backward depth-first walk: along
/// any backward path that uses no back edge of that walk, nearer nodes come
/// first. On cyclic graphs no single order can satisfy every path.
pub fn all_previous(node: FlowId, cf: &EdgeTable) -> Vec<FlowId> {
    let mut visited = std::collections::HashSet::from([node]);
    let mut postorder = Vec::new();
    let mut stack: Vec<(FlowId, usize)> = vec![(node, 0)];
    while let Some((current, next_child)) = stack.last_mut() {
        let preds = cf.prev(*current);
        if let Some(p) = preds.get(*next_child).copied() {
            *next_child += 1;
            if visited.insert(p) {
                stack.push((p, 0));
            }
        } else {
            postorder.push(*current);
            stack.pop();
        }
    }
    postorder.pop();
    postorder.reverse();
    postorder
}

#[derive(Clone)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn insert(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    fn contains(&self, bit: usize) -> bool {
        self.words[bit / 64] & (1 << (bit % 64)) != 0
    }

    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let bit = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    i * 64 + bit
                })
            })
        })
    }
}

/// Reaching definitions over the flow instructions, then one edge per
/// (reaching definition, use) pair of the same variable.
///
/// A walk from `d` to `u` avoiding other definitions of `v` shortens to a
/// simple path with the same property, so this equals the closest
/// definition along every backward simple path from `u`.
pub fn compute_data_flow(graph: &FlowGraph, cf: &EdgeTable, du: &DefUseAttr) -> DataFlow {
    let instrs: Vec<FlowId> = graph.flow_instrs().collect();
    let vars = graph.vars();
    let var_slot: HashMap<FlowId, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    // Items 0..vars.len() stand for "undefined on entry"; the rest are
    // (definition site, variable) pairs.
    let mut item_var: Vec<usize> = (0..vars.len()).collect();
    let mut item_site: Vec<Option<FlowId>> = vec![None; vars.len()];
    let mut gen: HashMap<FlowId, Vec<usize>> = HashMap::new();
    for &n in &instrs {
        for v in du.defs(n) {
            gen.entry(n).or_default().push(item_var.len());
            item_var.push(var_slot[v]);
            item_site.push(Some(n));
        }
    }
    let item_count = item_var.len();

    // Per variable, the words holding its items and the bits within them.
    let mut kill: Vec<Vec<(usize, u64)>> = vec![Vec::new(); vars.len()];
    for (item, &var) in item_var.iter().enumerate() {
        let (word, bit) = (item / 64, 1u64 << (item % 64));
        match kill[var].last_mut() {
            Some((w, mask)) if *w == word => *mask |= bit,
            _ => kill[var].push((word, bit)),
        }
    }

    let mut entry_state = BitSet::new(item_count);
    (0..vars.len()).for_each(|i| entry_state.insert(i));

    let mut outs: Vec<Option<BitSet>> = vec![None; graph.len()];
    let mut queued = vec![false; graph.len()];
    let mut queue: std::collections::VecDeque<FlowId> = instrs.iter().copied().collect();
    instrs.iter().for_each(|n| queued[n.index()] = true);
    let mut in_state = BitSet::new(item_count);

    let compute_in = |n: FlowId, outs: &[Option<BitSet>], in_state: &mut BitSet| {
        let preds = cf.prev(n);
        if preds.is_empty() {
            in_state.words.copy_from_slice(&entry_state.words);
            return;
        }
        in_state.clear();
        for p in preds {
            if let Some(out) = &outs[p.index()] {
                in_state.union_with(out);
            }
        }
    };

    while let Some(n) = queue.pop_front() {
        queued[n.index()] = false;
        compute_in(n, &outs, &mut in_state);
        let mut out = in_state.clone();
        if let Some(items) = gen.get(&n) {
            for &item in items {
                for &(word, mask) in &kill[item_var[item]] {
                    out.words[word] &= !mask;
                }
            }
            for &item in items {
                out.insert(item);
            }
        }
        let changed = outs[n.index()]
            .as_ref()
            .is_none_or(|old| old.words != out.words);
        if changed {
            outs[n.index()] = Some(out);
            for s in cf.next(n) {
                if !queued[s.index()] {
                    queued[s.index()] = true;
                    queue.push_back(*s);
                }
            }
        }
    }

    let mut edges = DfEdgeTable::new(graph.len());
    let mut warnings = Vec::new();
    // `linked[d] == u + 1` once `d -> u` exists, so each pair is added once.
    let mut linked = vec![0usize; graph.len()];
    let mut used = vec![false; vars.len()];
    for &u in &instrs {
        if du.uses(u).is_empty() {
            continue;
        }
        compute_in(u, &outs, &mut in_state);
        du.uses(u).iter().for_each(|v| used[var_slot[v]] = true);
        let mut link = |d: FlowId, edges: &mut DfEdgeTable| {
            if linked[d.index()] != u.index() + 1 {
                linked[d.index()] = u.index() + 1;
                edges.next[d.index()].push(u);
            }
        };
        for item in in_state.iter().skip_while(|i| *i < vars.len()) {
            if used[item_var[item]] {
                link(item_site[item].expect("definition item"), &mut edges);
            }
        }
        for v in du.uses(u) {
            if in_state.contains(var_slot[v]) {
                warnings.push(UndefinedUseWarning {
                    var: graph.txt(*v).to_string(),
                    node: u,
                    txt: graph.txt(u).to_string(),
                });
            }
            if du.defines(u, *v) {
                link(u, &mut edges);
            }
        }
        du.uses(u).iter().for_each(|v| used[var_slot[v]] = false);
    }
    DataFlow { edges, warnings }
}
