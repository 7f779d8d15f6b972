//! Matching graphs and the purely structural computations on them:
//! neighborhoods, facets (non-empty independent sets), bipartiteness,
//! connectivity, the doubling construction and separability.

mod enumerate;

pub use enumerate::{all_graphs_up_to_iso, connected_graphs_up_to_iso, random_connected_graph};

use std::fmt;

/// Hard limit on vertex count; everything is backed by 64-bit masks.
pub const MAX_VERTICES: usize = 64;

/// Facet enumeration refuses graphs above this many vertices unless a larger
/// cap is passed explicitly.
pub const DEFAULT_FACET_CAP: usize = 20;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("a matching graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("at most {MAX_VERTICES} vertices are supported, got {0}")]
    TooManyVertices(usize),
    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),
    #[error("vertex index {0} out of range for {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("facet enumeration capped at {cap} vertices, graph has {n}")]
    CapExceeded { n: usize, cap: usize },
}

/// Subset of vertex indices, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_mask(mask: u64) -> Self {
        VertexSet(mask)
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = 0u64;
        for v in indices {
            mask |= 1 << v;
        }
        VertexSet(mask)
    }

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        if n == 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0 & (1 << v) != 0
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn minus(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    pub fn complement(&self, n: usize) -> VertexSet {
        VertexSet(!self.0 & VertexSet::full(n).0)
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(v)
            }
        })
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Finite simple undirected graph of item classes. Immutable after
/// construction; all operations assume the construction-time validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingGraph {
    labels: Vec<String>,
    adj: Vec<u64>,
}

impl MatchingGraph {
    /// Builds a graph from labels and index pairs. Edges are symmetrized;
    /// duplicates are fine, self-loops are not.
    pub fn new(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        if n < 2 {
            return Err(GraphError::TooFewVertices(n));
        }
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        let mut adj = vec![0u64; n];
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(MatchingGraph { labels, adj })
    }

    /// Same as [`MatchingGraph::new`] with labels "1".."n".
    pub fn with_numeric_labels(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        MatchingGraph::new((1..=n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] & (1 << v) != 0
    }

    /// Neighborhood E(v) as a set.
    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet(self.adj[v])
    }

    pub fn neighbor_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|m| m.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Edges as index pairs `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        let mut out = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if self.adjacent(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// E(U): vertices adjacent to at least one member of `u`. E(∅) = ∅.
    pub fn neighbors_of_set(&self, u: &VertexSet) -> VertexSet {
        let mut mask = 0u64;
        for v in u.iter() {
            mask |= self.adj[v];
        }
        VertexSet(mask)
    }

    pub fn is_independent(&self, u: &VertexSet) -> bool {
        u.iter().all(|v| self.adj[v] & u.mask() == 0)
    }

    /// All facets (non-empty independent sets), ascending by bitmask, under
    /// the default cap.
    pub fn facets(&self) -> Result<Vec<VertexSet>, GraphError> {
        self.facets_capped(DEFAULT_FACET_CAP)
    }

    pub fn facets_capped(&self, cap: usize) -> Result<Vec<VertexSet>, GraphError> {
        let n = self.vertex_count();
        if n > cap {
            return Err(GraphError::CapExceeded { n, cap });
        }
        let mut out = Vec::new();
        // Branch only into independent extensions with larger indices.
        fn grow(g: &MatchingGraph, current: u64, candidates: u64, out: &mut Vec<VertexSet>) {
            let mut rest = candidates;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let with_v = current | (1 << v);
                out.push(VertexSet::from_mask(with_v));
                grow(g, with_v, rest & !g.adj[v], out);
            }
        }
        grow(self, 0, VertexSet::full(n).mask(), &mut out);
        out.sort();
        Ok(out)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            let mut rest = frontier;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                next |= self.adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == VertexSet::full(n).mask()
    }

    /// Connectivity, bipartiteness (with a deterministic bipartition) and
    /// separability in one pass.
    pub fn classify(&self) -> GraphClassification {
        let connected = self.is_connected();
        let bipartition = self.bipartition();
        let separable = self.separation();
        GraphClassification {
            connected,
            bipartite: bipartition.is_some(),
            bipartition,
            separable,
        }
    }

    /// 2-coloring, if one exists. Each component is colored from its smallest
    /// vertex; for an edgeless graph vertices alternate sides so that both
    /// parts stay non-empty.
    pub fn bipartition(&self) -> Option<(VertexSet, VertexSet)> {
        let n = self.vertex_count();
        if self.edge_count() == 0 {
            let side0 = VertexSet::from_indices((0..n).step_by(2));
            return Some((side0, side0.complement(n)));
        }
        let mut color = vec![u8::MAX; n];
        for start in 0..n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for v in VertexSet(self.adj[u]).iter() {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return None;
                    }
                }
            }
        }
        let side0 = VertexSet::from_indices((0..n).filter(|&v| color[v] == 0));
        Some((side0, side0.complement(n)))
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Separable of order p means V partitions into p facets with every cross
    /// pair an edge, i.e. the complement graph is a disjoint union of p
    /// cliques (complete multipartite). Only orders p >= 2 are reported.
    fn separation(&self) -> Option<Separation> {
        let n = self.vertex_count();
        let full = VertexSet::full(n).mask();
        let comp_adj: Vec<u64> = (0..n).map(|v| !self.adj[v] & full & !(1u64 << v)).collect();

        let mut unseen = full;
        let mut parts: Vec<VertexSet> = Vec::new();
        while unseen != 0 {
            let start = unseen.trailing_zeros() as usize;
            // Component of the complement graph containing `start`.
            let mut comp = 1u64 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0u64;
                let mut rest = frontier;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    next |= comp_adj[v];
                }
                frontier = next & !comp;
                comp |= next;
            }
            // The component must be a clique of the complement.
            for v in VertexSet(comp).iter() {
                if comp_adj[v] & comp != comp & !(1u64 << v) {
                    return None;
                }
            }
            parts.push(VertexSet(comp));
            unseen &= !comp;
        }
        if parts.len() >= 2 {
            Some(Separation {
                order: parts.len(),
                parts,
            })
        } else {
            None
        }
    }

    /// Doubling graph 2∘G on 2n vertices: originals keep their indices, the
    /// copy of u sits at n+u, and each edge (u,v) becomes (u, ṽ) and (v, ũ).
    pub fn doubling_graph(&self) -> MatchingGraph {
        let n = self.vertex_count();
        let mut labels = self.labels.clone();
        labels.extend(self.labels.iter().map(|l| format!("{l}~")));
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            edges.push((u, n + v));
            edges.push((v, n + u));
        }
        MatchingGraph::new(labels, edges).expect("doubling of a valid graph is valid")
    }

    /// Renders a set as labels, for reports.
    pub fn set_labels(&self, set: &VertexSet) -> String {
        let names: Vec<&str> = set.iter().map(|v| self.label(v)).collect();
        format!("{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub order: usize,
    pub parts: Vec<VertexSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphClassification {
    pub connected: bool,
    pub bipartite: bool,
    pub bipartition: Option<(VertexSet, VertexSet)>,
    pub separable: Option<Separation>,
}

impl GraphClassification {
    pub fn separable_order(&self) -> Option<usize> {
        self.separable.as_ref().map(|s| s.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;

    fn example1() -> MatchingGraph {
        presets::example1_graph()
    }

    fn k3() -> MatchingGraph {
        MatchingGraph::with_numeric_labels(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn set(indices: &[usize]) -> VertexSet {
        VertexSet::from_indices(indices.iter().copied())
    }

    #[test]
    fn construction_validates() {
        assert_eq!(
            MatchingGraph::with_numeric_labels(1, []).unwrap_err(),
            GraphError::TooFewVertices(1)
        );
        assert_eq!(
            MatchingGraph::with_numeric_labels(2, [(0, 0)]).unwrap_err(),
            GraphError::SelfLoop(0)
        );
        assert_eq!(
            MatchingGraph::with_numeric_labels(2, [(0, 5)]).unwrap_err(),
            GraphError::VertexOutOfRange(5, 2)
        );
        assert!(MatchingGraph::new(vec!["a".into(), "a".into()], [(0, 1)]).is_err());
        // Symmetry comes from construction.
        let g = MatchingGraph::with_numeric_labels(3, [(0, 1)]).unwrap();
        assert!(g.adjacent(1, 0) && g.adjacent(0, 1));
        assert!(!g.adjacent(0, 2));
    }

    #[test]
    fn neighborhood_of_set() {
        // Example-1 graph, U = {1,3} -> {2,4} (labels); indices shift by one.
        let g = example1();
        assert_eq!(g.neighbors_of_set(&set(&[0, 2])), set(&[1, 3]));
        assert_eq!(g.neighbors_of_set(&VertexSet::EMPTY), VertexSet::EMPTY);
        assert_eq!(k3().neighbors_of_set(&set(&[0])), set(&[1, 2]));
    }

    #[test]
    fn facet_enumeration_matches_known_lists() {
        let facets = example1().facets().unwrap();
        let expected: Vec<VertexSet> = [vec![0], vec![1], vec![2], vec![0, 2], vec![3], vec![0, 3]]
            .iter()
            .map(|ix| set(ix))
            .collect();
        assert_eq!(facets, expected);

        assert_eq!(k3().facets().unwrap().len(), 3);

        let edgeless = MatchingGraph::with_numeric_labels(2, []).unwrap();
        assert_eq!(
            edgeless.facets().unwrap(),
            vec![set(&[0]), set(&[1]), set(&[0, 1])]
        );
    }

    #[test]
    fn facet_cap_is_enforced() {
        let g = MatchingGraph::with_numeric_labels(25, [(0, 1)]).unwrap();
        assert!(matches!(
            g.facets(),
            Err(GraphError::CapExceeded { n: 25, cap: 20 })
        ));
        assert!(g.facets_capped(25).is_ok());
    }

    fn subset_scan_facets(g: &MatchingGraph) -> std::collections::BTreeSet<VertexSet> {
        let n = g.vertex_count();
        (1..(1u64 << n))
            .map(VertexSet::from_mask)
            .filter(|s| g.is_independent(s))
            .collect()
    }

    #[test]
    fn facets_agree_with_subset_scan() {
        // Exhaustive cross-check on the reference graphs.
        let graphs = [
            example1(),
            k3(),
            presets::cycle5_graph(),
            presets::figure5_graph(),
            MatchingGraph::with_numeric_labels(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
                .unwrap(),
        ];
        for g in graphs {
            let listed: std::collections::BTreeSet<VertexSet> =
                g.facets().unwrap().into_iter().collect();
            assert_eq!(listed, subset_scan_facets(&g));
        }
    }

    proptest::proptest! {
        /// Enumerated facets are exactly the non-empty independent sets, in
        /// ascending bitmask order, on arbitrary graphs up to 12 vertices.
        #[test]
        fn facets_equal_subset_scan_on_arbitrary_graphs(
            n in 2usize..=12,
            edge_bits in proptest::prelude::any::<u128>(),
        ) {
            let mut edges = Vec::new();
            let mut bit = 0u32;
            for u in 0..n {
                for v in (u + 1)..n {
                    if edge_bits & (1 << (bit % 128)) != 0 {
                        edges.push((u, v));
                    }
                    bit += 1;
                }
            }
            let g = MatchingGraph::with_numeric_labels(n, edges).unwrap();
            let listed = g.facets().unwrap();
            let mut sorted = listed.clone();
            sorted.sort();
            proptest::prop_assert_eq!(&listed, &sorted);
            let as_set: std::collections::BTreeSet<VertexSet> = listed.into_iter().collect();
            proptest::prop_assert_eq!(as_set, subset_scan_facets(&g));
        }
    }

    #[test]
    fn classification_of_reference_graphs() {
        let c1 = example1().classify();
        assert!(c1.connected);
        assert!(!c1.bipartite);
        assert_eq!(c1.separable_order(), None);

        let c2 = k3().classify();
        assert!(!c2.bipartite);
        assert_eq!(c2.separable_order(), Some(3));

        let c3 = presets::figure5_graph().classify();
        assert!(c3.connected);
        assert!(c3.bipartite);
        let sep = c3.separable.unwrap();
        assert_eq!(sep.order, 2);
        assert_eq!(sep.parts, vec![set(&[0, 1, 3, 4]), set(&[2, 5])]);
    }

    #[test]
    fn bipartition_parts_are_valid() {
        let g = presets::figure5_graph();
        let (a, b) = g.bipartition().unwrap();
        assert!(!a.is_empty() && !b.is_empty());
        assert_eq!(a.union(&b), VertexSet::full(g.vertex_count()));
        assert!(a.intersection(&b).is_empty());
        assert!(g.is_independent(&a) && g.is_independent(&b));

        let edgeless = MatchingGraph::with_numeric_labels(3, []).unwrap();
        let (a, b) = edgeless.bipartition().unwrap();
        assert!(!a.is_empty() && !b.is_empty());
    }

    #[test]
    fn doubling_graph_shapes() {
        // Example-1 doubles to the 8-vertex bipartite graph of the figure.
        let d = example1().doubling_graph();
        assert_eq!(d.vertex_count(), 8);
        let mut expected: Vec<(usize, usize)> = Vec::new();
        for (u, v) in example1().edges() {
            expected.push((u, 4 + v));
            expected.push((v, 4 + u));
        }
        expected.sort();
        assert_eq!(d.edges(), expected);
        assert!(d.is_bipartite());
        assert!(d.is_connected());

        // K2 doubles to two disjoint edges.
        let k2 = MatchingGraph::with_numeric_labels(2, [(0, 1)]).unwrap();
        let d2 = k2.doubling_graph();
        assert_eq!(d2.edges(), vec![(0, 3), (1, 2)]);
        assert!(!d2.is_connected());

        // K3 doubles to a 6-cycle.
        let d3 = k3().doubling_graph();
        assert!(d3.is_connected());
        assert!(d3.is_bipartite());
        assert_eq!(d3.edge_count(), 6);
        assert!((0..6).all(|v| d3.degree(v) == 2));
    }

    #[test]
    fn union_property_of_neighborhoods() {
        for (n, edges) in [
            (4, vec![(0, 1), (1, 2), (1, 3), (2, 3)]),
            (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
        ] {
            let g = MatchingGraph::with_numeric_labels(n, edges).unwrap();
            for mask in 0..(1u64 << n) {
                let u = VertexSet::from_mask(mask);
                let direct = g.neighbors_of_set(&u);
                let by_union = u.iter().fold(VertexSet::EMPTY, |acc, v| {
                    acc.union(&g.neighbors_of_set(&VertexSet::singleton(v)))
                });
                assert_eq!(direct, by_union);
            }
        }
    }

    #[test]
    fn separability_agrees_with_partition_search() {
        // Brute force over set partitions: parts must be independent and all
        // cross pairs must be edges.
        fn brute_separable(g: &MatchingGraph) -> Option<usize> {
            let n = g.vertex_count();
            let mut assignment = vec![0usize; n];
            fn rec(
                g: &MatchingGraph,
                assignment: &mut Vec<usize>,
                v: usize,
                parts: usize,
            ) -> Option<usize> {
                let n = g.vertex_count();
                if v == n {
                    if parts < 2 {
                        return None;
                    }
                    let sets: Vec<VertexSet> = (0..parts)
                        .map(|p| VertexSet::from_indices((0..n).filter(|&u| assignment[u] == p)))
                        .collect();
                    for (i, a) in sets.iter().enumerate() {
                        if !g.is_independent(a) {
                            return None;
                        }
                        for b in &sets[i + 1..] {
                            for x in a.iter() {
                                for y in b.iter() {
                                    if !g.adjacent(x, y) {
                                        return None;
                                    }
                                }
                            }
                        }
                    }
                    return Some(parts);
                }
                for p in 0..=parts.min(n - 1) {
                    assignment[v] = p;
                    let next_parts = parts.max(p + 1);
                    if let Some(order) = rec(g, assignment, v + 1, next_parts) {
                        return Some(order);
                    }
                }
                None
            }
            rec(g, &mut assignment, 1, 1)
        }

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(2..=7usize);
            let g = random_connected_graph(n, &mut rng);
            assert_eq!(g.classify().separable_order(), brute_separable(&g), "{g:?}");
        }
        // And the references.
        assert_eq!(brute_separable(&presets::figure5_graph()), Some(2));
        assert_eq!(brute_separable(&example1()), None);
    }

    #[test]
    fn separable_order_fixes_parity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut seen2 = false;
        let mut seen3 = false;
        for _ in 0..300 {
            let n = rng.gen_range(2..=8usize);
            let g = random_connected_graph(n, &mut rng);
            let c = g.classify();
            match c.separable_order() {
                Some(2) => {
                    assert!(c.bipartite);
                    seen2 = true;
                }
                Some(p) if p >= 3 => {
                    assert!(!c.bipartite);
                    seen3 = true;
                }
                _ => {}
            }
        }
        assert!(seen2 && seen3, "sample never hit separable graphs");
    }

    #[test]
    fn doubling_connectivity_characterizes_bipartiteness() {
        // Exhaustive over every connected graph with up to 8 vertices.
        for n in 2..=8 {
            for g in connected_graphs_up_to_iso(n) {
                assert_eq!(g.is_bipartite(), !g.doubling_graph().is_connected());
            }
        }
    }
}
