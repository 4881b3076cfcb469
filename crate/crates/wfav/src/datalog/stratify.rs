use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::ast::*;

/// Rules whose heads share a stratum level. `rules` indexes `Program::rules`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub level: usize,
    pub preds: BTreeSet<Arc<str>>,
    pub rules: Vec<usize>,
}

/// Predicate dependency graph: an edge body -> head, flagged when negated.
pub fn dependency_edges(p: &Program) -> BTreeSet<(Arc<str>, Arc<str>, bool)> {
    let mut out = BTreeSet::new();
    for r in &p.rules {
        for l in &r.body {
            if let Literal::Atom { atom, negated } = l {
                out.insert((atom.pred.clone(), r.head.pred.clone(), *negated));
            }
        }
    }
    out
}

/// Orders rules into strata so each negated predicate is complete before use.
pub fn stratify(p: &Program) -> Result<Vec<Stratum>, DatalogError> {
    p.check()?;
    let mut g: DiGraph<Arc<str>, bool> = DiGraph::new();
    let mut idx: BTreeMap<Arc<str>, NodeIndex> = BTreeMap::new();
    for pred in p.arities()?.into_keys() {
        let n = g.add_node(pred.clone());
        idx.insert(pred, n);
    }
    for (from, to, neg) in dependency_edges(p) {
        g.add_edge(idx[&from], idx[&to], neg);
    }
    // tarjan_scc yields components in reverse topological order
    let sccs: Vec<Vec<NodeIndex>> = tarjan_scc(&g).into_iter().rev().collect();
    let mut comp = vec![0usize; g.node_count()];
    for (ci, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp[n.index()] = ci;
        }
    }
    let mut cycles = Vec::new();
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).unwrap();
        if g[e] && comp[a.index()] == comp[b.index()] {
            let mut names: Vec<String> =
                sccs[comp[a.index()]].iter().map(|n| g[*n].to_string()).collect();
            names.sort();
            cycles.push(names);
        }
    }
    if let Some(first) = cycles.into_iter().min() {
        return Err(DatalogError::Stratification(first));
    }
    let mut level = vec![0usize; sccs.len()];
    for (ci, scc) in sccs.iter().enumerate() {
        for n in scc {
            for e in g.edges_directed(*n, petgraph::Direction::Incoming) {
                use petgraph::visit::EdgeRef;
                let src = comp[e.source().index()];
                if src != ci {
                    let need = level[src] + usize::from(*e.weight());
                    level[ci] = level[ci].max(need);
                }
            }
        }
    }
    let mut by_level: BTreeMap<usize, Stratum> = BTreeMap::new();
    for (ri, r) in p.rules.iter().enumerate() {
        let l = level[comp[idx[&r.head.pred].index()]];
        let s = by_level.entry(l).or_insert_with(|| Stratum {
            level: l,
            preds: BTreeSet::new(),
            rules: Vec::new(),
        });
        s.preds.insert(r.head.pred.clone());
        s.rules.push(ri);
    }
    Ok(by_level.into_values().collect())
}
