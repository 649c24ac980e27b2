//! Diff callgraph construction and summarization scheduling.
//!
//! The callgraph keeps only the functions present in the diff; callees that
//! resolve outside it are dropped. The schedule orders functions so that a
//! function's callees are summarized before it wherever that is satisfiable:
//! strongly connected components are condensed, components are ordered
//! callee-first, and members inside a component (mutual recursion) run in
//! display-name order with the remaining in-cycle references stubbed at
//! prompt time.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::model::DiffArtifact;

/// Caller→callee graph over the diff functions only.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiffCallgraph {
    pub nodes: BTreeSet<String>,
    /// (caller, callee) pairs; both ends are diff functions. Self-loops are
    /// not recorded, they carry no scheduling information.
    pub edges: BTreeSet<(String, String)>,
}

impl DiffCallgraph {
    pub fn callees_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> {
        self.edges
            .range((name.to_string(), String::new())..)
            .take_while(move |(caller, _)| caller == name)
            .map(|(_, callee)| callee.as_str())
    }

    /// DOT rendering for debugging.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph diff_callgraph {\n");
        for node in &self.nodes {
            out.push_str(&format!("  \"{node}\";\n"));
        }
        for (caller, callee) in &self.edges {
            out.push_str(&format!("  \"{caller}\" -> \"{callee}\";\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Processing order plus each function's in-graph callees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// Every diff function exactly once; for acyclic graphs every callee
    /// precedes its caller.
    pub order: Vec<String>,
    /// Display name → sorted in-graph callees (cycle members included).
    pub dep_map: BTreeMap<String, Vec<String>>,
}

impl Schedule {
    pub fn position(&self, name: &str) -> Option<usize> {
        self.order.iter().position(|n| n == name)
    }
}

/// Builds the diff callgraph from a validated artifact: one node per
/// function record, one edge per callee reference that resolves to another
/// diff function.
pub fn build_diff_callgraph(artifact: &DiffArtifact) -> DiffCallgraph {
    let mut graph = DiffCallgraph::default();
    for f in &artifact.functions {
        graph.nodes.insert(f.display_name.clone());
    }
    for f in &artifact.functions {
        for callee in &f.callees {
            if callee != &f.display_name && graph.nodes.contains(callee) {
                graph.edges.insert((f.display_name.clone(), callee.clone()));
            }
        }
    }
    graph
}

/// Iterative Tarjan SCC over an adjacency list.
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;
    // (node, next child position)
    let mut call_stack: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call_stack.push((root, 0));
        while let Some(&mut (v, ref mut child)) = call_stack.last_mut() {
            if *child == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call_stack.pop();
                if let Some(&mut (parent, _)) = call_stack.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("scc stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Computes the summarization order.
///
/// Components are condensed with Tarjan, then ordered callee-first by
/// Kahn's algorithm; whenever several components are ready the one whose
/// smallest member name sorts first goes next, and members inside a
/// component are emitted in name order. The result is a pure function of
/// the graph.
pub fn schedule(graph: &DiffCallgraph) -> Schedule {
    let names: Vec<&String> = graph.nodes.iter().collect();
    let idx_of: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
    for (caller, callee) in &graph.edges {
        adj[idx_of[caller.as_str()]].push(idx_of[callee.as_str()]);
    }

    let comps = tarjan_scc(&adj);
    let mut comp_of = vec![0usize; names.len()];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }

    // Condensation, reversed: an edge callee-component → caller-component
    // so that in-degree 0 means "all callees done".
    let mut rev: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
    let mut indegree = vec![0usize; comps.len()];
    for (caller, callee) in &graph.edges {
        let from = comp_of[idx_of[caller.as_str()]];
        let to = comp_of[idx_of[callee.as_str()]];
        if from != to && rev[to].insert(from) {
            indegree[from] += 1;
        }
    }

    let comp_key = |ci: usize| -> &String {
        comps[ci].iter().map(|&v| names[v]).min().expect("non-empty component")
    };

    let mut ready: BTreeSet<(&String, usize)> = (0..comps.len())
        .filter(|&ci| indegree[ci] == 0)
        .map(|ci| (comp_key(ci), ci))
        .collect();

    let mut order = Vec::with_capacity(names.len());
    while let Some(&(key, ci)) = ready.iter().next() {
        ready.remove(&(key, ci));
        let mut members: Vec<&String> = comps[ci].iter().map(|&v| names[v]).collect();
        members.sort();
        order.extend(members.into_iter().cloned());
        for &dependent in &rev[ci] {
            indegree[dependent] -= 1;
            if indegree[dependent] == 0 {
                ready.insert((comp_key(dependent), dependent));
            }
        }
    }
    debug_assert_eq!(order.len(), graph.nodes.len());

    let mut dep_map = BTreeMap::new();
    for node in &graph.nodes {
        let callees: Vec<String> = graph.callees_of(node).map(str::to_string).collect();
        dep_map.insert(node.clone(), callees);
    }

    Schedule { order, dep_map }
}
