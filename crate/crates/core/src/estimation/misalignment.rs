use std::cmp::Ordering;

use crate::counts::{cmp_fractions, CountTable};
use crate::sgo::Sgo;

/// Union-find with path compression and union by rank.
#[derive(Clone, Debug)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != node {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    /// Returns `true` if the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] = self.rank[a].saturating_add(1);
        }
        true
    }

    /// Groups `nodes` by set, in order of first appearance.
    pub fn groups(&mut self, nodes: &[usize]) -> Vec<Vec<usize>> {
        let mut slot = vec![usize::MAX; self.parent.len()];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &n in nodes {
            let root = self.find(n);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(n);
        }
        groups
    }
}

/// Pairs of generating states whose empirical maxima contradict the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisalignmentGraph {
    /// States with at least one generated window, highest priority first.
    pub nodes: Vec<usize>,
    /// `(x, y)` with `x ≻ y` in the order.
    pub edges: Vec<(usize, usize)>,
    /// Connected components; members and components are listed in order of priority.
    pub components: Vec<Vec<usize>>,
}

impl MisalignmentGraph {
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }
}

/// Links every `x ≻ y` whose empirical row maximum fraction is strictly smaller for `x`.
pub fn build_misalignment_graph(counts: &CountTable, sgo: &Sgo) -> MisalignmentGraph {
    let nodes: Vec<usize> = sgo
        .priority()
        .iter()
        .copied()
        .filter(|&s| counts.row_total(s) > 0)
        .collect();
    let stats: Vec<(u64, u64)> = nodes
        .iter()
        .map(|&s| (counts.row_peak(s), counts.row_total(s)))
        .collect();

    let mut edges = Vec::new();
    let mut dsu = DisjointSet::new(counts.num_states());
    for i in 0..nodes.len() {
        let (xp, xt) = stats[i];
        for j in i + 1..nodes.len() {
            let (yp, yt) = stats[j];
            if cmp_fractions(xp, xt, yp, yt) == Ordering::Less {
                edges.push((nodes[i], nodes[j]));
                dsu.union(nodes[i], nodes[j]);
            }
        }
    }
    let components = dsu.groups(&nodes);
    MisalignmentGraph {
        nodes,
        edges,
        components,
    }
}
