//! Max-flow / min-cut machinery for the polynomial structural check.
//!
//! Capacities are exact rationals. Total useful flow in these networks is
//! at most 1 (probability mass), so "infinite" arcs simply carry capacity 2.

use num::rational::BigRational;
use num::{BigInt, Signed, Zero};
use std::collections::VecDeque;

pub(crate) fn unbounded_cap() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    rev: usize,
    cap: BigRational,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: vec![Vec::new(); nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: BigRational) {
        debug_assert!(!cap.is_negative());
        let rev_from = self.arcs[to].len();
        let rev_to = self.arcs[from].len();
        self.arcs[from].push(Arc {
            to,
            rev: rev_from,
            cap,
        });
        self.arcs[to].push(Arc {
            to: from,
            rev: rev_to,
            cap: BigRational::zero(),
        });
    }

    /// Edmonds-Karp: augment along shortest residual paths until none remain.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> BigRational {
        let mut total = BigRational::zero();
        loop {
            // BFS for a shortest augmenting path.
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.arcs.len()];
            let mut queue = VecDeque::from([source]);
            let mut reached = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for (k, arc) in self.arcs[u].iter().enumerate() {
                    if arc.cap.is_positive() && prev[arc.to].is_none() && arc.to != source {
                        prev[arc.to] = Some((u, k));
                        if arc.to == sink {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(arc.to);
                    }
                }
            }
            if !reached {
                return total;
            }
            // Bottleneck along the path.
            let mut bottleneck: Option<BigRational> = None;
            let mut node = sink;
            while node != source {
                let (u, k) = prev[node].expect("path recorded");
                let cap = &self.arcs[u][k].cap;
                bottleneck = Some(match bottleneck {
                    None => cap.clone(),
                    Some(b) if *cap < b => cap.clone(),
                    Some(b) => b,
                });
                node = u;
            }
            let push = bottleneck.expect("non-trivial path");
            let mut node = sink;
            while node != source {
                let (u, k) = prev[node].expect("path recorded");
                self.arcs[u][k].cap -= &push;
                let rev = self.arcs[u][k].rev;
                self.arcs[node][rev].cap += &push;
                node = u;
            }
            total += push;
        }
    }

    /// Nodes reachable from `source` in the residual graph; call after
    /// `max_flow` to read off a minimum cut.
    pub fn source_side(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.arcs.len()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for arc in &self.arcs[u] {
                if arc.cap.is_positive() && !seen[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn classic_small_network() {
        // s=0, t=3; two parallel routes with a cross arc.
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, r(3, 1));
        net.add_arc(0, 2, r(2, 1));
        net.add_arc(1, 2, r(5, 1));
        net.add_arc(1, 3, r(2, 1));
        net.add_arc(2, 3, r(3, 1));
        assert_eq!(net.max_flow(0, 3), r(5, 1));
    }

    #[test]
    fn rational_bottlenecks_stay_exact() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, r(1, 3));
        net.add_arc(1, 2, r(1, 7));
        assert_eq!(net.max_flow(0, 2), r(1, 7));
        let side = net.source_side(0);
        assert_eq!(side, vec![true, true, false]);
    }
}
