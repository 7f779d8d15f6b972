//! The structural stability conditions on an arrival law: for every facet F,
//! strictly less mass on F than on its neighborhood E(F).
//!
//! Three decision routes are provided: a facet-enumerating oracle, a min-cut
//! based check that is polynomial in the vertex count, and the bipartite
//! variant with side masses pinned to 1/2. A witness constructor produces a
//! law satisfying the conditions whenever one exists.

mod flow;
mod simplex;

use crate::graph::{GraphError, MatchingGraph, VertexSet};
use crate::measure::ProbabilityVector;
use crate::scalar::{Scalar, Sign};
use num::rational::BigRational;
use num::{BigInt, Signed, ToPrimitive, Zero};
use simplex::{Constraint, LpOutcome, Rel};

/// Lower bound imposed on every entry of a constructed witness measure.
pub const WITNESS_FLOOR: (i64, i64) = (1, 1_000_000);

#[derive(Debug, thiserror::Error)]
pub enum NcondError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("measure has {measure} entries but the graph has {graph} vertices")]
    DimensionMismatch { graph: usize, measure: usize },
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph is not bipartite")]
    NotBipartite,
}

/// Outcome of a conditions check. `holds` iff `margin` is strictly positive;
/// an equality anywhere already reports failure.
#[derive(Debug, Clone)]
pub struct NcondVerdict {
    pub holds: bool,
    /// Worst slack. For the facet oracle this is `min_F μ(E(F)) − μ(F)`; the
    /// flow check minimizes over all non-empty proper vertex sets instead,
    /// which has the same sign but can sit lower.
    pub margin: Scalar,
    /// A set achieving the minimum. Always present for the facet routes; the
    /// flow route reports one only on failure (then it is a violating facet).
    pub witness: Option<VertexSet>,
}

impl NcondVerdict {
    fn from_margin(margin: Scalar, witness: Option<VertexSet>) -> Self {
        NcondVerdict {
            holds: margin.sign() == Sign::Positive,
            margin,
            witness,
        }
    }
}

fn check_dims(g: &MatchingGraph, mu: &ProbabilityVector) -> Result<(), NcondError> {
    if g.vertex_count() != mu.dim() {
        return Err(NcondError::DimensionMismatch {
            graph: g.vertex_count(),
            measure: mu.dim(),
        });
    }
    Ok(())
}

/// Facet margin μ(E(F)) − μ(F).
pub fn facet_margin(g: &MatchingGraph, mu: &ProbabilityVector, facet: &VertexSet) -> Scalar {
    &mu.mass(&g.neighbors_of_set(facet)) - &mu.mass(facet)
}

/// Checks the conditions by enumerating every facet. Exact when μ is.
pub fn ncond_bruteforce(
    g: &MatchingGraph,
    mu: &ProbabilityVector,
) -> Result<NcondVerdict, NcondError> {
    check_dims(g, mu)?;
    let facets = g.facets()?;
    let mut best: Option<(Scalar, VertexSet)> = None;
    for facet in facets {
        let margin = facet_margin(g, mu, &facet);
        let replace = match &best {
            None => true,
            Some((m, _)) => margin.cmp_value(m) == std::cmp::Ordering::Less,
        };
        if replace {
            best = Some((margin, facet));
        }
    }
    let (margin, witness) = best.expect("n >= 2 guarantees at least one facet");
    Ok(NcondVerdict::from_margin(margin, Some(witness)))
}

/// Polynomial check: decides whether μ(U) < μ(E(U)) for every non-empty
/// proper U, which is equivalent on connected graphs. For each ordered pair
/// (u, w) a min-cut instance maximizes μ(U) − μ(E(U)) over the sets that
/// contain u and avoid w; the network has a source arc of weight μ(v) per
/// candidate member, a sink arc of weight μ(b) per potential neighbor, and
/// unbounded member→neighbor arcs, with u forced in through an unbounded
/// source arc and w removed from the member side.
pub fn ncond_flow(g: &MatchingGraph, mu: &ProbabilityVector) -> Result<NcondVerdict, NcondError> {
    check_dims(g, mu)?;
    if !g.is_connected() {
        return Err(NcondError::NotConnected);
    }
    let n = g.vertex_count();
    let weights: Vec<BigRational> = mu.entries().iter().map(Scalar::to_rational).collect();

    let mut best: Option<(BigRational, VertexSet)> = None;
    for forced in 0..n {
        for excluded in 0..n {
            if forced == excluded {
                continue;
            }
            // Nodes: source, sink, then member-side and neighbor-side copies.
            let source = 0;
            let sink = 1;
            let member = |v: usize| 2 + v;
            let neighbor = |v: usize| 2 + n + v;
            let mut net = flow::FlowNetwork::new(2 + 2 * n);
            for (v, weight) in weights.iter().enumerate() {
                if v == excluded {
                    continue;
                }
                let cap = if v == forced {
                    flow::unbounded_cap()
                } else {
                    weight.clone()
                };
                net.add_arc(source, member(v), cap);
                for b in g.neighbors(v).iter() {
                    net.add_arc(member(v), neighbor(b), flow::unbounded_cap());
                }
            }
            for (b, weight) in weights.iter().enumerate() {
                net.add_arc(neighbor(b), sink, weight.clone());
            }
            net.max_flow(source, sink);
            let side = net.source_side(source);
            let subset =
                VertexSet::from_indices((0..n).filter(|&v| v != excluded && side[member(v)]));
            debug_assert!(subset.contains(forced));
            let gain = set_deficit(g, &weights, &subset);
            let replace = match &best {
                None => true,
                Some((b, _)) => gain > *b,
            };
            if replace {
                best = Some((gain, subset));
            }
        }
    }

    let (max_deficit, arg) = best.expect("n >= 2 yields at least one ordered pair");
    let margin_rational = -max_deficit;
    let margin = if mu.is_exact() {
        Scalar::Exact(margin_rational)
    } else {
        Scalar::Approx(margin_rational.to_f64().unwrap_or(f64::NAN))
    };
    let verdict_holds = margin.sign() == Sign::Positive;
    let witness = if verdict_holds {
        None
    } else {
        violating_facet_within(g, &arg)
    };
    Ok(NcondVerdict {
        holds: verdict_holds,
        margin,
        witness,
    })
}

/// μ(U) − μ(E(U)), exactly.
fn set_deficit(g: &MatchingGraph, weights: &[BigRational], set: &VertexSet) -> BigRational {
    let mut value = BigRational::zero();
    for v in set.iter() {
        value += &weights[v];
    }
    for b in g.neighbors_of_set(set).iter() {
        value -= &weights[b];
    }
    value
}

/// The members of `set` with no neighbor inside `set` form a facet whose
/// margin is no better than the set's own; on a violating set it is a
/// violating facet.
fn violating_facet_within(g: &MatchingGraph, set: &VertexSet) -> Option<VertexSet> {
    let isolated =
        VertexSet::from_indices(set.iter().filter(|&v| g.neighbor_mask(v) & set.mask() == 0));
    (!isolated.is_empty()).then_some(isolated)
}

/// The bipartite variant: both sides must carry mass exactly 1/2 and every
/// *eligible* facet must satisfy the strict inequality. Eligible means the
/// facet's trace on each side is a proper subset of that side; the full
/// sides themselves always sit at equality under the mass condition and are
/// excluded. With no eligible facet at all the conditions hold vacuously.
pub fn ncond_half(g: &MatchingGraph, mu: &ProbabilityVector) -> Result<NcondVerdict, NcondError> {
    check_dims(g, mu)?;
    let (side_a, side_b) = g.bipartition().ok_or(NcondError::NotBipartite)?;
    let half = Scalar::ratio(1, 2);
    let mass_a = mu.mass(&side_a);
    let mass_ok = (&mass_a - &half).sign() == Sign::Zero;

    let facets = g.facets()?;
    let mut best: Option<(Scalar, VertexSet)> = None;
    let consider = |margin: Scalar, set: VertexSet, best: &mut Option<(Scalar, VertexSet)>| {
        let replace = match &*best {
            None => true,
            Some((m, _)) => margin.cmp_value(m) == std::cmp::Ordering::Less,
        };
        if replace {
            *best = Some((margin, set));
        }
    };
    for facet in facets {
        let on_a = facet.intersection(&side_a);
        let on_b = facet.intersection(&side_b);
        if on_a == side_a || on_b == side_b {
            continue;
        }
        let margin = facet_margin(g, mu, &facet);
        consider(margin, facet, &mut best);
    }

    if !mass_ok {
        // An unbalanced side is itself a violating facet; fold the sides into
        // the minimum so that margin and verdict stay consistent.
        for side in [side_a, side_b] {
            let margin = facet_margin(g, mu, &side);
            consider(margin, side, &mut best);
        }
        let (margin, witness) = best.expect("sides were folded in");
        return Ok(NcondVerdict {
            holds: false,
            margin,
            witness: Some(witness),
        });
    }

    match best {
        Some((margin, witness)) => Ok(NcondVerdict::from_margin(margin, Some(witness))),
        // No eligible facet: vacuously true; report a unit margin.
        None => Ok(NcondVerdict {
            holds: true,
            margin: Scalar::one(),
            witness: None,
        }),
    }
}

/// Builds a measure satisfying the conditions on a connected non-bipartite
/// graph, or reports that none exists. Solves, in exact arithmetic,
///
///   maximize δ  s.t.  μ(F) + δ <= μ(E(F)) for every facet F,
///                     Σ μ = 1,  μ(v) >= floor,
///
/// and returns the measure iff the optimal δ is strictly positive.
pub fn find_ncond_witness(g: &MatchingGraph) -> Result<Option<ProbabilityVector>, NcondError> {
    if !g.is_connected() {
        return Err(NcondError::NotConnected);
    }
    let n = g.vertex_count();
    let facets = g.facets()?;
    let floor = BigRational::new(BigInt::from(WITNESS_FLOOR.0), BigInt::from(WITNESS_FLOOR.1));
    let one = BigRational::from_integer(BigInt::from(1));

    // Variables: x_v = μ(v) − floor for each vertex, then δ⁺, δ⁻ with
    // δ = δ⁺ − δ⁻ (the optimum may be negative).
    let vars = n + 2;
    let mut objective = vec![BigRational::zero(); vars];
    objective[n] = one.clone();
    objective[n + 1] = -&one;

    let mut constraints = Vec::with_capacity(facets.len() + 1);
    constraints.push(Constraint {
        coeffs: vec![one.clone(); n]
            .into_iter()
            .chain([BigRational::zero(), BigRational::zero()])
            .collect(),
        rel: Rel::Eq,
        rhs: &one - BigRational::from_integer(BigInt::from(n as i64)) * &floor,
    });
    for facet in &facets {
        let neighborhood = g.neighbors_of_set(facet);
        let mut coeffs = vec![BigRational::zero(); vars];
        for v in neighborhood.iter() {
            coeffs[v] = one.clone();
        }
        for v in facet.iter() {
            coeffs[v] = -&one;
        }
        coeffs[n] = -&one;
        coeffs[n + 1] = one.clone();
        let imbalance = facet.len() as i64 - neighborhood.len() as i64;
        constraints.push(Constraint {
            coeffs,
            rel: Rel::Ge,
            rhs: BigRational::from_integer(BigInt::from(imbalance)) * &floor,
        });
    }

    match simplex::maximize(&objective, &constraints) {
        LpOutcome::Optimal { value, point } => {
            if value.is_positive() {
                let entries: Vec<BigRational> = point[..n].iter().map(|x| x + &floor).collect();
                let mu = ProbabilityVector::from_rationals(entries)
                    .expect("program constraints keep the measure valid");
                Ok(Some(mu))
            } else {
                Ok(None)
            }
        }
        // Always feasible (uniform measure with δ very negative) and bounded
        // (any singleton facet bounds δ by 1).
        other => unreachable!("witness program cannot be {other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{connected_graphs_up_to_iso, random_connected_graph};
    use crate::model::presets;
    use rand::SeedableRng;

    fn example1() -> MatchingGraph {
        presets::example1_graph()
    }

    fn mu_percent(weights: &[u64]) -> ProbabilityVector {
        ProbabilityVector::from_integer_weights(weights).unwrap()
    }

    #[test]
    fn bruteforce_on_the_reference_graph() {
        let g = example1();
        // Holds with margin 1/10 at facet {1}.
        let verdict = ncond_bruteforce(&g, &mu_percent(&[20, 30, 25, 25])).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.margin, Scalar::ratio(1, 10));
        assert_eq!(verdict.witness, Some(VertexSet::singleton(0)));

        // Fails at facet {1} when class 1 outweighs class 2.
        let verdict = ncond_bruteforce(&g, &mu_percent(&[40, 20, 20, 20])).unwrap();
        assert!(!verdict.holds);
        assert_eq!(verdict.margin, Scalar::ratio(-1, 5));
        assert_eq!(verdict.witness, Some(VertexSet::singleton(0)));
    }

    #[test]
    fn k2_fails_for_every_measure() {
        let k2 = MatchingGraph::with_numeric_labels(2, [(0, 1)]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let mu = ProbabilityVector::random_rational(2, &mut rng);
            assert!(!ncond_bruteforce(&k2, &mu).unwrap().holds);
            assert!(!ncond_flow(&k2, &mu).unwrap().holds);
        }
        // The balanced case is an exact tie: margin 0 still fails.
        let even = mu_percent(&[1, 1]);
        let verdict = ncond_flow(&k2, &even).unwrap();
        assert!(!verdict.holds);
        assert_eq!(verdict.margin, Scalar::zero());
    }

    #[test]
    fn flow_agrees_with_bruteforce_on_reference_inputs() {
        let g = example1();
        let verdict = ncond_flow(&g, &mu_percent(&[20, 30, 25, 25])).unwrap();
        assert!(verdict.holds);

        // Five-cycle measure used by the instability construction at ε=1/10.
        let mu = presets::cycle5_measure(&Scalar::ratio(1, 10)).unwrap();
        let verdict = ncond_flow(&presets::cycle5_graph(), &mu).unwrap();
        assert!(verdict.holds);
        assert!(
            ncond_bruteforce(&presets::cycle5_graph(), &mu)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn flow_witness_is_a_violating_facet() {
        let g = example1();
        let mu = mu_percent(&[40, 20, 20, 20]);
        let verdict = ncond_flow(&g, &mu).unwrap();
        assert!(!verdict.holds);
        let facet = verdict.witness.expect("failing verdict carries a witness");
        assert!(g.is_independent(&facet));
        assert!(facet_margin(&g, &mu, &facet).sign() != Sign::Positive);
    }

    #[test]
    fn error_paths() {
        // Facet cap propagates out of the oracle.
        let big = MatchingGraph::with_numeric_labels(25, [(0, 1)]).unwrap();
        let uniform = ProbabilityVector::uniform(25);
        assert!(matches!(
            ncond_bruteforce(&big, &uniform),
            Err(NcondError::Graph(GraphError::CapExceeded { .. }))
        ));
        // The flow check and the witness construction need connectivity.
        let split = MatchingGraph::with_numeric_labels(4, [(0, 1), (2, 3)]).unwrap();
        let mu = ProbabilityVector::uniform(4);
        assert!(matches!(
            ncond_flow(&split, &mu),
            Err(NcondError::NotConnected)
        ));
        assert!(matches!(
            find_ncond_witness(&split),
            Err(NcondError::NotConnected)
        ));
        // Measure dimension must match the graph.
        let g = example1();
        assert!(matches!(
            ncond_bruteforce(&g, &ProbabilityVector::uniform(3)),
            Err(NcondError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn equivalence_with_all_proper_subsets() {
        // The facet conditions hold iff μ(U) < μ(E(U)) for every non-empty
        // proper U, on connected graphs. Exhaustive subset scan.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = 2 + (rand::Rng::gen_range(&mut rng, 0..9usize));
            let g = random_connected_graph(n, &mut rng);
            let mu = ProbabilityVector::random_rational(n, &mut rng);
            let facet_check = ncond_bruteforce(&g, &mu).unwrap().holds;
            let full = VertexSet::full(n).mask();
            let subset_check = (1..full).all(|mask| {
                let u = VertexSet::from_mask(mask);
                mu.mass(&u).strictly_less(&mu.mass(&g.neighbors_of_set(&u)))
            });
            assert_eq!(facet_check, subset_check);
        }
    }

    #[test]
    fn flow_matches_bruteforce_in_sign_on_random_inputs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..60 {
            let n = 2 + (rand::Rng::gen_range(&mut rng, 0..5usize));
            let g = random_connected_graph(n, &mut rng);
            let mu = ProbabilityVector::random_rational(n, &mut rng);
            let brute = ncond_bruteforce(&g, &mu).unwrap();
            let fast = ncond_flow(&g, &mu).unwrap();
            assert_eq!(brute.holds, fast.holds);
            assert_eq!(brute.margin.sign(), fast.margin.sign());
        }
    }

    #[test]
    fn half_conditions_on_the_doubled_reference() {
        let g = example1();
        let mu = mu_percent(&[20, 30, 25, 25]);
        // Forced by the doubling correspondence given the check above.
        let verdict = ncond_half(&g.doubling_graph(), &mu.doubled()).unwrap();
        assert!(verdict.holds);

        // Unbalanced sides fail regardless of facets.
        let path = MatchingGraph::with_numeric_labels(3, [(0, 1), (1, 2)]).unwrap();
        let skew = mu_percent(&[50, 30, 20]);
        let verdict = ncond_half(&path, &skew).unwrap();
        assert!(!verdict.holds);
        assert!(verdict.witness.is_some());

        // Non-bipartite input is rejected.
        assert!(matches!(
            ncond_half(&presets::cycle5_graph(), &ProbabilityVector::uniform(5)),
            Err(NcondError::NotBipartite)
        ));
    }

    #[test]
    fn half_conditions_on_a_disconnected_bipartite_graph() {
        // Two disjoint edges, uniform law: the derived sides carry mass 1/2
        // each, but the eligible singleton facets sit at exact equality, so
        // the conditions fail with margin zero.
        let two_edges = MatchingGraph::with_numeric_labels(4, [(0, 1), (2, 3)]).unwrap();
        let verdict = ncond_half(&two_edges, &ProbabilityVector::uniform(4)).unwrap();
        assert!(!verdict.holds);
        assert_eq!(verdict.margin, Scalar::zero());
        assert!(verdict.witness.is_some());
    }

    #[test]
    fn half_conditions_on_the_six_cycle() {
        let six =
            MatchingGraph::with_numeric_labels(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
                .unwrap();
        let verdict = ncond_half(&six, &ProbabilityVector::uniform(6)).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.margin, Scalar::ratio(1, 6));
    }

    #[test]
    fn doubling_equivalence_on_random_connected_graphs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let n = 2 + (rand::Rng::gen_range(&mut rng, 0..6usize));
            let g = random_connected_graph(n, &mut rng);
            let mu = ProbabilityVector::random_rational(n, &mut rng);
            let direct = ncond_bruteforce(&g, &mu).unwrap().holds;
            let doubled = ncond_half(&g.doubling_graph(), &mu.doubled())
                .unwrap()
                .holds;
            assert_eq!(direct, doubled, "graph {g:?}");
        }
    }

    #[test]
    fn witness_exists_iff_non_bipartite_small() {
        for n in 2..=5 {
            for g in connected_graphs_up_to_iso(n) {
                let witness = find_ncond_witness(&g).unwrap();
                match witness {
                    Some(mu) => {
                        assert!(!g.is_bipartite());
                        let verdict = ncond_bruteforce(&g, &mu).unwrap();
                        assert!(verdict.holds, "constructed witness must verify");
                    }
                    None => assert!(g.is_bipartite()),
                }
            }
        }
    }

    #[test]
    fn uniform_is_a_valid_witness_on_triangles() {
        let k3 = MatchingGraph::with_numeric_labels(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert!(
            ncond_bruteforce(&k3, &ProbabilityVector::uniform(3))
                .unwrap()
                .holds
        );
        let witness = find_ncond_witness(&k3).unwrap().expect("K3 is odd");
        assert!(ncond_bruteforce(&k3, &witness).unwrap().holds);
    }

    #[test]
    fn witness_on_the_reference_graph_has_positive_margin() {
        let witness = find_ncond_witness(&example1())
            .unwrap()
            .expect("non-bipartite");
        let verdict = ncond_bruteforce(&example1(), &witness).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.margin.sign(), Sign::Positive);
    }

    #[test]
    fn facet_margins_are_affine_in_the_measure() {
        // margin_F(λμ + (1−λ)ν) = λ·margin_F(μ) + (1−λ)·margin_F(ν).
        let g = example1();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let mu = ProbabilityVector::random_rational(4, &mut rng);
            let nu = ProbabilityVector::random_rational(4, &mut rng);
            let lambda = Scalar::ratio(rand::Rng::gen_range(&mut rng, 0..=10), 10);
            let one_minus = &Scalar::one() - &lambda;
            let mixed = ProbabilityVector::new(
                (0..4)
                    .map(|v| &(&lambda * mu.get(v)) + &(&one_minus * nu.get(v)))
                    .collect(),
            )
            .unwrap();
            for facet in g.facets().unwrap() {
                let lhs = facet_margin(&g, &mixed, &facet);
                let rhs = &(&lambda * &facet_margin(&g, &mu, &facet))
                    + &(&one_minus * &facet_margin(&g, &nu, &facet));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn representation_of_rationals_does_not_change_verdicts() {
        let g = example1();
        let a = ProbabilityVector::new(
            ["2/10", "3/10", "25/100", "1/4"]
                .iter()
                .map(|s| Scalar::parse_exact(s).unwrap())
                .collect(),
        )
        .unwrap();
        let b = mu_percent(&[20, 30, 25, 25]);
        let va = ncond_bruteforce(&g, &a).unwrap();
        let vb = ncond_bruteforce(&g, &b).unwrap();
        assert_eq!(va.holds, vb.holds);
        assert_eq!(va.margin, vb.margin);
    }
}
