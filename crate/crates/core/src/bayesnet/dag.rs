use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Directed acyclic graph stored as sorted parent lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
}

impl Dag {
    pub fn empty(n_vars: usize) -> Self {
        Dag {
            parents: vec![Vec::new(); n_vars],
        }
    }

    /// Validates self-loops, index range and acyclicity.
    pub fn from_parents(mut parents: Vec<Vec<usize>>) -> Result<Self> {
        let n = parents.len();
        for (v, ps) in parents.iter_mut().enumerate() {
            ps.sort_unstable();
            ps.dedup();
            if ps.iter().any(|&p| p == v || p >= n) {
                return Err(Error::invalid(format!("variable {v} has an invalid parent")));
            }
        }
        let dag = Dag { parents };
        if !dag.is_acyclic() {
            return Err(Error::invalid("parent lists contain a cycle"));
        }
        Ok(dag)
    }

    pub fn n_vars(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].binary_search(&from).is_ok()
    }

    /// Adds `from -> to` without checking acyclicity.
    pub(crate) fn insert_edge(&mut self, from: usize, to: usize) {
        if let Err(pos) = self.parents[to].binary_search(&from) {
            self.parents[to].insert(pos, from);
        }
    }

    pub fn remove_edge(&mut self, from: usize, to: usize) {
        if let Ok(pos) = self.parents[to].binary_search(&from) {
            self.parents[to].remove(pos);
        }
    }

    /// Adds `from -> to` if that keeps the graph acyclic; returns whether it did.
    pub fn add_edge(&mut self, from: usize, to: usize) -> bool {
        if from == to || self.has_edge(from, to) || self.has_path(to, from) {
            return false;
        }
        self.insert_edge(from, to);
        true
    }

    pub fn n_edges(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Edges as `(from, to)`, ordered by `to` then `from`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(v, ps)| ps.iter().map(move |&p| (p, v)))
            .collect()
    }

    /// Unordered adjacency pairs `(min, max)`.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect()
    }

    pub(crate) fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.n_vars()];
        for (p, v) in self.edges() {
            ch[p].push(v);
        }
        ch
    }

    /// Directed path `from ~> to` (of length >= 0).
    pub fn has_path(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let children = self.children();
        let mut seen = vec![false; self.n_vars()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &c in &children[u] {
                if c == to {
                    return true;
                }
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    /// Kahn order with smallest-index-first tie breaking, or `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.n_vars();
        let children = self.children();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Edges of some directed cycle, or `None` when acyclic.
    pub fn find_cycle(&self) -> Option<Vec<(usize, usize)>> {
        let n = self.n_vars();
        let children = self.children();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut parent_of = vec![usize::MAX; n];
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(top) = stack.last_mut() {
                let u = top.0;
                if top.1 < children[u].len() {
                    let c = children[u][top.1];
                    top.1 += 1;
                    match state[c] {
                        0 => {
                            state[c] = 1;
                            parent_of[c] = u;
                            stack.push((c, 0));
                        }
                        1 => {
                            let mut cycle = vec![(u, c)];
                            let mut w = u;
                            while w != c {
                                let p = parent_of[w];
                                cycle.push((p, w));
                                w = p;
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[u] = 2;
                    stack.pop();
                }
            }
        }
        None
    }
}
