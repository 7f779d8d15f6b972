//! Exhaustive generation of small graphs up to isomorphism, plus random
//! connected graphs. Backs the verification suites that quantify over "all
//! graphs with |V| <= k".

use super::MatchingGraph;
use rand::Rng;
use std::collections::HashSet;

/// Canonical key of a graph: the maximum, over all vertex orderings, of the
/// upper-triangle adjacency bits read column by column. Two graphs get the
/// same key iff they are isomorphic.
fn canonical_key(adj: &[u64]) -> u64 {
    let n = adj.len();
    debug_assert!(n <= 11, "canonical key packs into 64 bits");

    struct Search<'a> {
        adj: &'a [u64],
        n: usize,
        perm: Vec<usize>,
        cols: Vec<u32>,
        best: Option<Vec<u32>>,
    }

    impl Search<'_> {
        // `tight` = the column prefix so far equals the best prefix; only
        // then is per-column pruning sound. Leaves always do the full
        // comparison, since `best` can move while a subtree is explored.
        fn dfs(&mut self, used: u64, tight: bool) {
            let depth = self.perm.len();
            if depth == self.n {
                if self.best.as_ref().is_none_or(|b| self.cols > *b) {
                    self.best = Some(self.cols.clone());
                }
                return;
            }
            for v in 0..self.n {
                if used & (1 << v) != 0 {
                    continue;
                }
                let mut col = 0u32;
                for (i, &p) in self.perm.iter().enumerate() {
                    if self.adj[p] & (1 << v) != 0 {
                        col |= 1 << i;
                    }
                }
                let mut next_tight = false;
                if let Some(best) = &self.best {
                    if tight {
                        let b = best[depth];
                        if col < b {
                            continue;
                        }
                        next_tight = col == b;
                    }
                }
                self.perm.push(v);
                self.cols.push(col);
                self.dfs(used | (1 << v), next_tight);
                self.perm.pop();
                self.cols.pop();
            }
        }
    }

    let mut search = Search {
        adj,
        n,
        perm: Vec::with_capacity(n),
        cols: Vec::with_capacity(n),
        best: None,
    };
    // Seed the bound with a degree-descending ordering so pruning is active
    // from the first branch.
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
    let mut seed_cols = Vec::with_capacity(n);
    for (j, &v) in by_degree.iter().enumerate() {
        let mut col = 0u32;
        for (i, &p) in by_degree[..j].iter().enumerate() {
            if adj[p] & (1 << v) != 0 {
                col |= 1 << i;
            }
        }
        seed_cols.push(col);
    }
    search.best = Some(seed_cols);
    search.dfs(0, true);
    let best = search.best.expect("at least one ordering");
    let mut key = 0u64;
    for (j, col) in best.iter().enumerate() {
        key = (key << j) | u64::from(*col);
    }
    key
}

fn raw_graphs_up_to_iso(n: usize) -> Vec<Vec<u64>> {
    // Grow one vertex at a time, deduplicating by canonical key at each level.
    let mut level: Vec<Vec<u64>> = vec![vec![0u64]];
    for k in 1..n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for adj in &level {
            for nb in 0u64..(1 << k) {
                let mut grown = adj.clone();
                grown.push(nb);
                for (v, row) in grown.iter_mut().enumerate().take(k) {
                    if nb & (1 << v) != 0 {
                        *row |= 1 << k;
                    }
                }
                if seen.insert(canonical_key(&grown)) {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    level
}

fn materialize(adj: &[u64]) -> MatchingGraph {
    let n = adj.len();
    let edges = (0..n)
        .flat_map(|u| {
            let row = adj[u];
            ((u + 1)..n).filter_map(move |v| (row & (1 << v) != 0).then_some((u, v)))
        })
        .collect::<Vec<_>>();
    MatchingGraph::with_numeric_labels(n, edges).expect("generated graph is valid")
}

/// All graphs on exactly `n` vertices, one per isomorphism class. 2 <= n <= 8.
pub fn all_graphs_up_to_iso(n: usize) -> Vec<MatchingGraph> {
    assert!((2..=8).contains(&n), "enumeration supports 2..=8 vertices");
    raw_graphs_up_to_iso(n)
        .iter()
        .map(|a| materialize(a))
        .collect()
}

/// All connected graphs on exactly `n` vertices, one per isomorphism class.
pub fn connected_graphs_up_to_iso(n: usize) -> Vec<MatchingGraph> {
    all_graphs_up_to_iso(n)
        .into_iter()
        .filter(|g| g.is_connected())
        .collect()
}

/// Uniform-ish random connected labeled graph: Bernoulli edges at a random
/// density, rejection-sampled until connected.
pub fn random_connected_graph<R: Rng>(n: usize, rng: &mut R) -> MatchingGraph {
    assert!((2..=super::MAX_VERTICES).contains(&n));
    loop {
        let p: f64 = rng.gen_range(0.15..0.85);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = MatchingGraph::with_numeric_labels(n, edges).expect("valid indices");
        if g.is_connected() {
            return g;
        }
    }
}
