//! Buffer states as words over the classes, and the matching policies that
//! decide which buffered item an arrival takes.

use crate::graph::MatchingGraph;
use crate::graph::VertexSet;
use rand::Rng;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("no buffered item is compatible with the arrival")]
    NoMatchAvailable,
    #[error("policy preset expects a different matching graph")]
    GraphMismatch,
    #[error("bad preference table: {0}")]
    BadPreferences(String),
    #[error("bad tie-break order: {0}")]
    BadOrder(String),
    #[error("invalid buffer word: {0}")]
    InvalidWord(String),
}

/// Buffer content as a word over the classes, oldest first. The support is
/// always an independent set of the matching graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BufferState {
    word: Vec<usize>,
}

impl BufferState {
    pub fn empty() -> Self {
        BufferState::default()
    }

    pub fn from_word(g: &MatchingGraph, word: Vec<usize>) -> Result<Self, PolicyError> {
        for &v in &word {
            if v >= g.vertex_count() {
                return Err(PolicyError::InvalidWord(format!(
                    "class index {v} out of range"
                )));
            }
        }
        let state = BufferState { word };
        if !g.is_independent(&state.support()) {
            return Err(PolicyError::InvalidWord(
                "support is not an independent set".into(),
            ));
        }
        Ok(state)
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn support(&self) -> VertexSet {
        VertexSet::from_indices(self.word.iter().copied())
    }

    /// Commutative image: per-class counts.
    pub fn counts(&self, n: usize) -> Vec<u64> {
        let mut counts = vec![0u64; n];
        for &v in &self.word {
            counts[v] += 1;
        }
        counts
    }

    fn remove_oldest_of(&mut self, class: usize) {
        let pos = self
            .word
            .iter()
            .position(|&c| c == class)
            .expect("class present");
        self.word.remove(pos);
    }
}

/// A deterministic transition rule (plus one randomized baseline) deciding
/// which buffered item an arrival matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingPolicy {
    /// Match the oldest compatible item.
    Fcfs,
    /// Match the most-represented compatible class; `rank` breaks ties
    /// (higher rank wins).
    MatchLongest { rank: Vec<usize> },
    /// Per-class preference orders over the neighborhoods, most preferred
    /// first.
    Priority { prefs: Vec<Vec<usize>> },
    /// Match a uniformly random compatible buffered item.
    UniformRandom,
}

impl MatchingPolicy {
    pub fn fcfs() -> Self {
        MatchingPolicy::Fcfs
    }

    pub fn uniform_random() -> Self {
        MatchingPolicy::UniformRandom
    }

    /// Match-the-longest with ties broken towards the larger class label.
    pub fn match_longest(g: &MatchingGraph) -> Self {
        MatchingPolicy::MatchLongest {
            rank: (0..g.vertex_count()).collect(),
        }
    }

    /// `order` lists the classes from least to most preferred in ties.
    pub fn match_longest_with_order(
        g: &MatchingGraph,
        order: Vec<usize>,
    ) -> Result<Self, PolicyError> {
        let n = g.vertex_count();
        let mut rank = vec![usize::MAX; n];
        if order.len() != n {
            return Err(PolicyError::BadOrder(format!(
                "order lists {} classes, graph has {n}",
                order.len()
            )));
        }
        for (position, &v) in order.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(PolicyError::BadOrder("not a permutation".into()));
            }
            rank[v] = position;
        }
        Ok(MatchingPolicy::MatchLongest { rank })
    }

    /// `prefs[v]` must be a total order over exactly the neighborhood E(v).
    pub fn priority(g: &MatchingGraph, prefs: Vec<Vec<usize>>) -> Result<Self, PolicyError> {
        let n = g.vertex_count();
        if prefs.len() != n {
            return Err(PolicyError::BadPreferences(format!(
                "{} preference lists for {n} classes",
                prefs.len()
            )));
        }
        for (v, list) in prefs.iter().enumerate() {
            let listed = VertexSet::from_indices(list.iter().copied().filter(|&x| x < n));
            if list.iter().any(|&x| x >= n) || listed != g.neighbors(v) || list.len() != g.degree(v)
            {
                return Err(PolicyError::BadPreferences(format!(
                    "preferences of class {v} must enumerate its neighborhood exactly once"
                )));
            }
        }
        Ok(MatchingPolicy::Priority { prefs })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MatchingPolicy::Fcfs => "fcfs",
            MatchingPolicy::MatchLongest { .. } => "ml",
            MatchingPolicy::Priority { .. } => "priority",
            MatchingPolicy::UniformRandom => "random",
        }
    }

    /// Whether the transition depends only on the commutative image.
    pub fn count_based(&self) -> bool {
        !matches!(self, MatchingPolicy::Fcfs)
    }
}

/// Neighbor classes of `v` with buffered items.
fn present_neighbors(g: &MatchingGraph, counts: &[u64], v: usize) -> u64 {
    let mut mask = 0u64;
    for b in g.neighbors(v).iter() {
        if counts[b] > 0 {
            mask |= 1 << b;
        }
    }
    mask
}

/// Match-the-longest choice: the compatible class with the largest count,
/// ties to the highest rank.
pub fn match_longest_choice(
    g: &MatchingGraph,
    counts: &[u64],
    v: usize,
    rank: &[usize],
) -> Result<usize, PolicyError> {
    let mut best: Option<usize> = None;
    for b in g.neighbors(v).iter() {
        if counts[b] == 0 {
            continue;
        }
        let better = match best {
            None => true,
            Some(cur) => {
                counts[b] > counts[cur] || (counts[b] == counts[cur] && rank[b] > rank[cur])
            }
        };
        if better {
            best = Some(b);
        }
    }
    best.ok_or(PolicyError::NoMatchAvailable)
}

/// Priority choice: the most-preferred neighbor class with a buffered item.
pub fn priority_choice(counts: &[u64], prefs_v: &[usize]) -> Result<usize, PolicyError> {
    prefs_v
        .iter()
        .copied()
        .find(|&b| counts[b] > 0)
        .ok_or(PolicyError::NoMatchAvailable)
}

/// FCFS choice: position of the earliest-arrived compatible item.
pub fn fcfs_choice(g: &MatchingGraph, u: &BufferState, v: usize) -> Result<usize, PolicyError> {
    u.word()
        .iter()
        .position(|&c| g.adjacent(c, v))
        .ok_or(PolicyError::NoMatchAvailable)
}

/// One transition of the buffer chain: append the arrival if nothing in the
/// buffer is compatible, otherwise remove exactly one compatible item chosen
/// by the policy. Deterministic policies ignore `rng`.
pub fn step<R: Rng>(
    g: &MatchingGraph,
    policy: &MatchingPolicy,
    state: &BufferState,
    arrival: usize,
    rng: &mut R,
) -> BufferState {
    assert!(arrival < g.vertex_count(), "arrival class out of range");
    let counts = state.counts(g.vertex_count());
    let present = present_neighbors(g, &counts, arrival);
    let mut next = state.clone();
    if present == 0 {
        next.word.push(arrival);
        return next;
    }
    match policy {
        MatchingPolicy::Fcfs => {
            let pos = fcfs_choice(g, state, arrival).expect("present mask non-empty");
            next.word.remove(pos);
        }
        MatchingPolicy::MatchLongest { rank } => {
            let class =
                match_longest_choice(g, &counts, arrival, rank).expect("present mask non-empty");
            next.remove_oldest_of(class);
        }
        MatchingPolicy::Priority { prefs } => {
            let class = priority_choice(&counts, &prefs[arrival]).expect("present mask non-empty");
            next.remove_oldest_of(class);
        }
        MatchingPolicy::UniformRandom => {
            let total: u64 = VertexSet::from_mask(present)
                .iter()
                .map(|b| counts[b])
                .sum();
            let mut draw = rng.gen_range(0..total);
            let mut chosen = None;
            for b in VertexSet::from_mask(present).iter() {
                if draw < counts[b] {
                    chosen = Some(b);
                    break;
                }
                draw -= counts[b];
            }
            next.remove_oldest_of(chosen.expect("draw lands in some class"));
        }
    }
    next
}

/// Priority policy "A" on the four-class reference graph: class 2 prefers
/// "3 or 4" over 1; remaining orders ascend by label.
pub fn policy_a(g: &MatchingGraph) -> Result<MatchingPolicy, PolicyError> {
    expect_graph(g, &crate::model::presets::example1_graph())?;
    MatchingPolicy::priority(g, vec![vec![1], vec![2, 3, 0], vec![1, 3], vec![1, 2]])
}

/// Priority policy "B": class 2 prefers 1 over "3 or 4".
pub fn policy_b(g: &MatchingGraph) -> Result<MatchingPolicy, PolicyError> {
    expect_graph(g, &crate::model::presets::example1_graph())?;
    MatchingPolicy::priority(g, vec![vec![1], vec![0, 2, 3], vec![1, 3], vec![1, 2]])
}

/// The five-cycle priority policy of the instability construction: class 2
/// prefers 3 over 1, class 5 prefers 4 over 1; remaining orders ascend.
pub fn policy_cycle5(g: &MatchingGraph) -> Result<MatchingPolicy, PolicyError> {
    expect_graph(g, &crate::model::presets::cycle5_graph())?;
    MatchingPolicy::priority(
        g,
        vec![vec![1, 4], vec![2, 0], vec![1, 3], vec![2, 4], vec![3, 0]],
    )
}

fn expect_graph(g: &MatchingGraph, expected: &MatchingGraph) -> Result<(), PolicyError> {
    let same = g.vertex_count() == expected.vertex_count() && g.edges() == expected.edges();
    if same {
        Ok(())
    } else {
        Err(PolicyError::GraphMismatch)
    }
}
