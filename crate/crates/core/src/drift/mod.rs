//! Exact stability classification. The four-class reference model reduces,
//! once classes 3 and 4 carry equal mass, to a birth-death chain on the
//! class-2 count plus a random walk on the quarter plane for the class-1 /
//! merged-class counts; the five-cycle construction reduces the same way.
//! Walks are classified by the one-step drift criterion on the interior and
//! the two axes.

mod stationary;

pub use stationary::{stationary_truncated_birth_death, stationary_truncated_quadrant};

use crate::graph::{GraphError, MatchingGraph, VertexSet};
use crate::measure::ProbabilityVector;
use crate::model::presets;
use crate::policy::{self, MatchingPolicy};
use crate::scalar::{Scalar, Sign};
use num::rational::BigRational;
use num::{BigInt, Zero};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum DriftError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("expected a measure on {expected} classes, got {got}")]
    GraphMismatch { expected: usize, got: usize },
    #[error("reduction requires equal mass on classes 3 and 4")]
    AsymmetricMu,
    #[error("epsilon must lie strictly between 0 and 2/9")]
    EpsilonOutOfRange,
    #[error("eta must satisfy 0 < eta < 1 - mu(1)/mu(2)")]
    EtaOutOfRange,
    #[error("graph is not connected")]
    NotConnected,
    #[error("walk row invalid: {0}")]
    BadWalk(String),
    #[error("chain is not ergodic, no stationary distribution to truncate")]
    NotErgodic,
    #[error("balance equations are singular at this truncation")]
    SingularSystem,
}

/// Ergodicity classification of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainClass {
    Ergodic,
    Transient,
    /// The deciding discriminant is exactly zero (or inside the float
    /// tolerance band); never silently folded into the other two.
    Boundary,
    /// A drift sign pattern the criterion is not instantiated for.
    Unsupported,
}

impl std::fmt::Display for ChainClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ChainClass::Ergodic => "Ergodic",
            ChainClass::Transient => "Transient",
            ChainClass::Boundary => "Boundary",
            ChainClass::Unsupported => "Unsupported",
        };
        f.write_str(s)
    }
}

/// Which branch of the drift criterion produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionCase {
    /// Dx > 0, Dy < 0: sign of Dx·Dy' − Dy·Dx'.
    PositiveDxNegativeDy,
    /// Dx < 0, Dy = 0 with Dy'' < 0: sign of Dy·Dx'' − Dx·Dy''.
    NegativeDxZeroDy,
    /// Dx < 0, Dy < 0: both discriminants must be negative.
    BothNegative,
    /// Dx >= 0, Dy >= 0, not both zero: transient outright.
    BothNonnegative,
    /// One-dimensional birth-death comparison.
    BirthDeath,
    /// Anything else.
    Unclassified,
}

#[derive(Debug, Clone)]
pub struct StabilityVerdict {
    pub class: ChainClass,
    pub discriminant: Option<Scalar>,
    pub case: CriterionCase,
}

type Step = (i8, i8);

/// Random walk on ℤ²₊, homogeneous on the interior, on each axis and at the
/// origin. Rows map a step in {−1,0,1}² to its probability.
#[derive(Debug, Clone)]
pub struct QuadrantWalk {
    interior: Vec<(Step, Scalar)>,
    x_axis: Vec<(Step, Scalar)>,
    y_axis: Vec<(Step, Scalar)>,
    origin: Vec<(Step, Scalar)>,
}

fn normalize_row(name: &str, row: Vec<(Step, Scalar)>) -> Result<Vec<(Step, Scalar)>, DriftError> {
    let mut merged: BTreeMap<Step, Scalar> = BTreeMap::new();
    for ((dx, dy), p) in row {
        if !(-1..=1).contains(&dx) || !(-1..=1).contains(&dy) {
            return Err(DriftError::BadWalk(format!(
                "{name}: step ({dx},{dy}) outside the unit box"
            )));
        }
        if p.sign() == Sign::Negative {
            return Err(DriftError::BadWalk(format!(
                "{name}: negative probability on ({dx},{dy})"
            )));
        }
        merged
            .entry((dx, dy))
            .and_modify(|q| *q = &*q + &p)
            .or_insert(p);
    }
    let total = Scalar::sum(merged.values());
    if (&total - &Scalar::one()).sign() != Sign::Zero {
        return Err(DriftError::BadWalk(format!("{name}: row sums to {total}")));
    }
    Ok(merged.into_iter().collect())
}

impl QuadrantWalk {
    pub fn new(
        interior: Vec<(Step, Scalar)>,
        x_axis: Vec<(Step, Scalar)>,
        y_axis: Vec<(Step, Scalar)>,
        origin: Vec<(Step, Scalar)>,
    ) -> Result<Self, DriftError> {
        let interior = normalize_row("interior", interior)?;
        let x_axis = normalize_row("x-axis", x_axis)?;
        let y_axis = normalize_row("y-axis", y_axis)?;
        let origin = normalize_row("origin", origin)?;
        for ((_, dy), p) in &x_axis {
            if *dy == -1 && p.sign() != Sign::Zero {
                return Err(DriftError::BadWalk(
                    "x-axis row steps below the axis".into(),
                ));
            }
        }
        for ((dx, _), p) in &y_axis {
            if *dx == -1 && p.sign() != Sign::Zero {
                return Err(DriftError::BadWalk(
                    "y-axis row steps left of the axis".into(),
                ));
            }
        }
        for ((dx, dy), p) in &origin {
            if (*dx == -1 || *dy == -1) && p.sign() != Sign::Zero {
                return Err(DriftError::BadWalk("origin row leaves the quadrant".into()));
            }
        }
        Ok(QuadrantWalk {
            interior,
            x_axis,
            y_axis,
            origin,
        })
    }

    pub fn interior(&self) -> &[(Step, Scalar)] {
        &self.interior
    }

    pub fn x_axis(&self) -> &[(Step, Scalar)] {
        &self.x_axis
    }

    pub fn y_axis(&self) -> &[(Step, Scalar)] {
        &self.y_axis
    }

    pub fn origin(&self) -> &[(Step, Scalar)] {
        &self.origin
    }

    pub fn probability(&self, region: WalkRegion, step: Step) -> Scalar {
        let row = match region {
            WalkRegion::Interior => &self.interior,
            WalkRegion::XAxis => &self.x_axis,
            WalkRegion::YAxis => &self.y_axis,
            WalkRegion::Origin => &self.origin,
        };
        row.iter()
            .find(|(s, _)| *s == step)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Scalar::zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkRegion {
    Interior,
    XAxis,
    YAxis,
    Origin,
}

/// One-step expected increments: interior (Dx, Dy), first axis (Dx', Dy'),
/// second axis (Dx'', Dy'').
#[derive(Debug, Clone, PartialEq)]
pub struct DriftProfile {
    pub interior_dx: Scalar,
    pub interior_dy: Scalar,
    pub x_axis_dx: Scalar,
    pub x_axis_dy: Scalar,
    pub y_axis_dx: Scalar,
    pub y_axis_dy: Scalar,
}

fn expected_step(row: &[(Step, Scalar)]) -> (Scalar, Scalar) {
    let mut dx = Scalar::zero();
    let mut dy = Scalar::zero();
    for ((sx, sy), p) in row {
        dx = &dx + &(&Scalar::from_int(i64::from(*sx)) * p);
        dy = &dy + &(&Scalar::from_int(i64::from(*sy)) * p);
    }
    (dx, dy)
}

pub fn drifts(walk: &QuadrantWalk) -> DriftProfile {
    let (interior_dx, interior_dy) = expected_step(&walk.interior);
    let (x_axis_dx, x_axis_dy) = expected_step(&walk.x_axis);
    let (y_axis_dx, y_axis_dy) = expected_step(&walk.y_axis);
    DriftProfile {
        interior_dx,
        interior_dy,
        x_axis_dx,
        x_axis_dy,
        y_axis_dx,
        y_axis_dy,
    }
}

/// The drift criterion, instantiated for the sign patterns this model
/// family produces. Anything else reports `Unsupported` rather than guess.
pub fn fmm_classify(d: &DriftProfile) -> StabilityVerdict {
    let sx = d.interior_dx.sign();
    let sy = d.interior_dy.sign();
    let disc_x = &(&d.interior_dx * &d.x_axis_dy) - &(&d.interior_dy * &d.x_axis_dx);
    let disc_y = &(&d.interior_dy * &d.y_axis_dx) - &(&d.interior_dx * &d.y_axis_dy);
    match (sx, sy) {
        (Sign::Positive, Sign::Negative) => StabilityVerdict {
            class: class_from_sign(disc_x.sign()),
            discriminant: Some(disc_x),
            case: CriterionCase::PositiveDxNegativeDy,
        },
        (Sign::Negative, Sign::Zero) if d.y_axis_dy.sign() == Sign::Negative => StabilityVerdict {
            class: class_from_sign(disc_y.sign()),
            discriminant: Some(disc_y),
            case: CriterionCase::NegativeDxZeroDy,
        },
        (Sign::Negative, Sign::Negative) => {
            let class = match (disc_x.sign(), disc_y.sign()) {
                (Sign::Negative, Sign::Negative) => ChainClass::Ergodic,
                (Sign::Positive, _) | (_, Sign::Positive) => ChainClass::Transient,
                _ => ChainClass::Boundary,
            };
            // Report the binding (larger) discriminant.
            let disc = if disc_x.cmp_value(&disc_y) == std::cmp::Ordering::Less {
                disc_y
            } else {
                disc_x
            };
            StabilityVerdict {
                class,
                discriminant: Some(disc),
                case: CriterionCase::BothNegative,
            }
        }
        (Sign::Positive | Sign::Zero, Sign::Positive | Sign::Zero)
            if !(sx == Sign::Zero && sy == Sign::Zero) =>
        {
            StabilityVerdict {
                class: ChainClass::Transient,
                discriminant: None,
                case: CriterionCase::BothNonnegative,
            }
        }
        _ => StabilityVerdict {
            class: ChainClass::Unsupported,
            discriminant: None,
            case: CriterionCase::Unclassified,
        },
    }
}

fn class_from_sign(sign: Sign) -> ChainClass {
    match sign {
        Sign::Negative => ChainClass::Ergodic,
        Sign::Positive => ChainClass::Transient,
        Sign::Zero => ChainClass::Boundary,
    }
}

/// Birth-death chain on ℕ with homogeneous up/down probabilities away from
/// zero. The behavior at zero belongs to the full reduced model and does not
/// affect the classification.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathChain {
    pub up: Scalar,
    pub down: Scalar,
}

impl BirthDeathChain {
    pub fn classify(&self) -> StabilityVerdict {
        let disc = &self.up - &self.down;
        StabilityVerdict {
            class: class_from_sign(disc.sign()),
            discriminant: Some(disc),
            case: CriterionCase::BirthDeath,
        }
    }
}

fn expect_dim(mu: &ProbabilityVector, expected: usize) -> Result<(), DriftError> {
    if mu.dim() != expected {
        return Err(DriftError::GraphMismatch {
            expected,
            got: mu.dim(),
        });
    }
    Ok(())
}

fn require_symmetric_34(mu: &ProbabilityVector) -> Result<(), DriftError> {
    if (mu.get(2) - mu.get(3)).sign() != Sign::Zero {
        return Err(DriftError::AsymmetricMu);
    }
    Ok(())
}

/// Induced chain on the class-2 count for the reference model: up with
/// probability μ(2), down otherwise. Stable iff μ(2) < 1/2.
pub fn build_axis_chain_u2(mu: &ProbabilityVector) -> Result<BirthDeathChain, DriftError> {
    expect_dim(mu, 4)?;
    let up = mu.get(1).clone();
    let down = &Scalar::one() - &up;
    Ok(BirthDeathChain { up, down })
}

/// The two priority policies studied on the reference graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedPolicy {
    A,
    B,
}

impl std::fmt::Display for ReducedPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReducedPolicy::A => "A",
            ReducedPolicy::B => "B",
        })
    }
}

/// Quarter-plane walk of the reference model under policy A or B, on the
/// coordinates (class-1 count, merged 3-or-4 count). Requires μ(3) = μ(4).
/// At the origin a class-2 arrival leaves for the class-2 ray; that excursion
/// is folded into a hold step.
pub fn build_reduced_chain(
    policy: ReducedPolicy,
    mu: &ProbabilityVector,
) -> Result<QuadrantWalk, DriftError> {
    expect_dim(mu, 4)?;
    require_symmetric_34(mu)?;
    let m1 = mu.get(0).clone();
    let m2 = mu.get(1).clone();
    let m3 = mu.get(2).clone();
    let m2_plus_m3 = &m2 + &m3;
    let two_m3 = &m3 + &m3;

    let interior = match policy {
        ReducedPolicy::A => vec![
            ((1, 0), m1.clone()),
            ((0, 1), m3.clone()),
            ((0, -1), m2_plus_m3.clone()),
        ],
        ReducedPolicy::B => vec![
            ((1, 0), m1.clone()),
            ((-1, 0), m2.clone()),
            ((0, 1), m3.clone()),
            ((0, -1), m3.clone()),
        ],
    };
    let x_axis = vec![
        ((1, 0), m1.clone()),
        ((-1, 0), m2.clone()),
        ((0, 1), two_m3.clone()),
    ];
    let y_axis = vec![
        ((1, 0), m1.clone()),
        ((0, 1), m3.clone()),
        ((0, -1), m2_plus_m3),
    ];
    let origin = vec![((1, 0), m1), ((0, 1), two_m3), ((0, 0), m2)];
    QuadrantWalk::new(interior, x_axis, y_axis, origin)
}

/// Derives the same walk by enumerating arrival effects through the actual
/// policy machinery on representative buffer contents. Used to cross-check
/// the closed-form tables.
pub fn derive_reduced_chain(
    policy: ReducedPolicy,
    mu: &ProbabilityVector,
) -> Result<QuadrantWalk, DriftError> {
    expect_dim(mu, 4)?;
    require_symmetric_34(mu)?;
    let g = presets::example1_graph();
    let matching_policy = match policy {
        ReducedPolicy::A => policy::policy_a(&g),
        ReducedPolicy::B => policy::policy_b(&g),
    }
    .expect("presets match their graph");
    derive_walk(
        &g,
        &matching_policy,
        mu,
        VertexSet::singleton(0),
        VertexSet::from_indices([2, 3]),
        &[vec![2, 0, 2, 0], vec![2, 0, 0, 2]],
        &[vec![2, 0, 0, 0]],
        &[vec![0, 0, 2, 0], vec![0, 0, 0, 2]],
        &[vec![0, 0, 0, 0]],
    )
}

/// Quarter-plane walk of the five-cycle construction on (class-1 count,
/// merged 3-or-4 count), derived from the policy and arrival law. The
/// construction refuses to return unless its interior and first-axis drifts
/// equal the published formulas exactly.
pub fn build_cycle5_chain(epsilon: &Scalar) -> Result<QuadrantWalk, DriftError> {
    let lo = epsilon.sign();
    let hi = (epsilon - &Scalar::ratio(2, 9)).sign();
    if lo != Sign::Positive || hi != Sign::Negative {
        return Err(DriftError::EpsilonOutOfRange);
    }
    let mu = presets::cycle5_measure(epsilon).expect("in-range epsilon gives a valid law");
    let g = presets::cycle5_graph();
    let matching_policy = policy::policy_cycle5(&g).expect("preset graph");
    let walk = derive_walk(
        &g,
        &matching_policy,
        &mu,
        VertexSet::singleton(0),
        VertexSet::from_indices([2, 3]),
        &[vec![2, 0, 2, 0, 0], vec![2, 0, 0, 2, 0]],
        &[vec![2, 0, 0, 0, 0]],
        &[vec![0, 0, 2, 0, 0], vec![0, 0, 0, 2, 0]],
        &[vec![0, 0, 0, 0, 0]],
    )?;

    // Gate the construction on the published drift values.
    let d = drifts(&walk);
    let quarter = Scalar::ratio(1, 4);
    let expected_dx = &quarter - &(epsilon * &Scalar::ratio(5, 8));
    let expected_dy = &(epsilon * &Scalar::ratio(1, 8)) - &quarter;
    let expected_dx1 = -&(epsilon * &Scalar::ratio(1, 2));
    let expected_dy1 = epsilon.clone();
    for (got, want, name) in [
        (&d.interior_dx, &expected_dx, "Dx"),
        (&d.interior_dy, &expected_dy, "Dy"),
        (&d.x_axis_dx, &expected_dx1, "Dx'"),
        (&d.x_axis_dy, &expected_dy1, "Dy'"),
    ] {
        assert_eq!(
            (got - want).sign(),
            Sign::Zero,
            "derived five-cycle drift {name} = {got}, expected {want}"
        );
    }
    Ok(walk)
}

/// Enumerates the arrival effects of a deterministic count-based policy on
/// representative buffer contents, one per homogeneity region. Arrivals that
/// neither match nor belong to a tracked class leave the reduced space and
/// fold into a hold step; every representative of a region must induce the
/// same row.
#[allow(clippy::too_many_arguments)]
fn derive_walk(
    g: &MatchingGraph,
    matching_policy: &MatchingPolicy,
    mu: &ProbabilityVector,
    x_classes: VertexSet,
    y_classes: VertexSet,
    interior_reps: &[Vec<u64>],
    x_axis_reps: &[Vec<u64>],
    y_axis_reps: &[Vec<u64>],
    origin_reps: &[Vec<u64>],
) -> Result<QuadrantWalk, DriftError> {
    let row_for = |reps: &[Vec<u64>], name: &str| -> Result<Vec<(Step, Scalar)>, DriftError> {
        let mut rows: Vec<BTreeMap<Step, Scalar>> = Vec::new();
        for counts in reps {
            let mut row: BTreeMap<Step, Scalar> = BTreeMap::new();
            for arrival in 0..g.vertex_count() {
                let step =
                    arrival_effect(g, matching_policy, counts, arrival, &x_classes, &y_classes);
                row.entry(step)
                    .and_modify(|p| *p = &*p + mu.get(arrival))
                    .or_insert_with(|| mu.get(arrival).clone());
            }
            rows.push(row);
        }
        for pair in rows.windows(2) {
            let same = pair[0].len() == pair[1].len()
                && pair[0]
                    .iter()
                    .zip(pair[1].iter())
                    .all(|((sa, pa), (sb, pb))| sa == sb && (pa - pb).sign() == Sign::Zero);
            if !same {
                return Err(DriftError::BadWalk(format!(
                    "{name}: representatives disagree, reduction is not exact"
                )));
            }
        }
        Ok(rows.remove(0).into_iter().collect())
    };

    QuadrantWalk::new(
        row_for(interior_reps, "interior")?,
        row_for(x_axis_reps, "x-axis")?,
        row_for(y_axis_reps, "y-axis")?,
        row_for(origin_reps, "origin")?,
    )
}

fn arrival_effect(
    g: &MatchingGraph,
    matching_policy: &MatchingPolicy,
    counts: &[u64],
    arrival: usize,
    x_classes: &VertexSet,
    y_classes: &VertexSet,
) -> Step {
    let present: Vec<usize> = g
        .neighbors(arrival)
        .iter()
        .filter(|&b| counts[b] > 0)
        .collect();
    if present.is_empty() {
        if x_classes.contains(arrival) {
            (1, 0)
        } else if y_classes.contains(arrival) {
            (0, 1)
        } else {
            (0, 0) // leaves the tracked pair of coordinates
        }
    } else {
        let chosen = match matching_policy {
            MatchingPolicy::Priority { prefs } => {
                policy::priority_choice(counts, &prefs[arrival]).expect("present non-empty")
            }
            MatchingPolicy::MatchLongest { rank } => {
                policy::match_longest_choice(g, counts, arrival, rank).expect("present non-empty")
            }
            other => panic!("derivation needs a deterministic count-based policy, got {other:?}"),
        };
        if x_classes.contains(chosen) {
            (-1, 0)
        } else if y_classes.contains(chosen) {
            (0, -1)
        } else {
            panic!("representative states only buffer tracked classes");
        }
    }
}

/// Conjunction of the two induced chains: the model regenerates through the
/// empty buffer, so it is stable iff both are.
#[derive(Debug, Clone)]
pub struct ModelStability {
    pub overall: ChainClass,
    pub axis: StabilityVerdict,
    pub quadrant: StabilityVerdict,
}

pub fn classify_model(
    policy: ReducedPolicy,
    mu: &ProbabilityVector,
) -> Result<ModelStability, DriftError> {
    let axis = build_axis_chain_u2(mu)?.classify();
    let quadrant = fmm_classify(&drifts(&build_reduced_chain(policy, mu)?));
    let overall = combine(axis.class, quadrant.class);
    Ok(ModelStability {
        overall,
        axis,
        quadrant,
    })
}

fn combine(a: ChainClass, b: ChainClass) -> ChainClass {
    use ChainClass::*;
    if a == Transient || b == Transient {
        Transient
    } else if a == Unsupported || b == Unsupported {
        Unsupported
    } else if a == Boundary || b == Boundary {
        Boundary
    } else {
        Ergodic
    }
}

/// Closed-form stability regions of the two priority policies:
/// policy A needs μ(1) < μ(2) < 1/2 and μ(1)(1−μ(1)) < μ(2)²; policy B needs
/// only μ(1) < μ(2) < 1/2.
pub fn stab_region_closed_form(
    policy: ReducedPolicy,
    mu: &ProbabilityVector,
) -> Result<bool, DriftError> {
    expect_dim(mu, 4)?;
    require_symmetric_34(mu)?;
    let m1 = mu.get(0);
    let m2 = mu.get(1);
    let half = Scalar::ratio(1, 2);
    let ncond = m1.strictly_less(m2) && m2.strictly_less(&half);
    Ok(match policy {
        ReducedPolicy::B => ncond,
        ReducedPolicy::A => {
            let parabola = (&(m1 * &(&Scalar::one() - m1)) - &(m2 * m2)).sign() == Sign::Negative;
            ncond && parabola
        }
    })
}

/// Per-facet drift of the buffer-size potential: δ_F = μ(E(F)ᶜ) − μ(E(F)).
/// All strictly negative means the size itself certifies stability under any
/// policy; on non-separable graphs some facet typically fails.
#[derive(Debug, Clone)]
pub struct LyapunovReport {
    pub per_facet: Vec<(VertexSet, Scalar)>,
    pub pass: bool,
}

pub fn verify_lyapunov_linear(
    g: &MatchingGraph,
    mu: &ProbabilityVector,
) -> Result<LyapunovReport, DriftError> {
    if !g.is_connected() {
        return Err(DriftError::NotConnected);
    }
    if g.vertex_count() != mu.dim() {
        return Err(DriftError::GraphMismatch {
            expected: g.vertex_count(),
            got: mu.dim(),
        });
    }
    let n = g.vertex_count();
    let mut per_facet = Vec::new();
    let mut pass = true;
    for facet in g.facets()? {
        let neighborhood = g.neighbors_of_set(&facet);
        let delta = &mu.mass(&neighborhood.complement(n)) - &mu.mass(&neighborhood);
        if delta.sign() != Sign::Negative {
            pass = false;
        }
        per_facet.push((facet, delta));
    }
    Ok(LyapunovReport { per_facet, pass })
}

/// Drift report of the weighted potential (1−η)·|u|₁ + |u|₂ + μ(1)/μ(2)·|u|₃₄
/// on the reference model, region by region.
#[derive(Debug, Clone)]
pub struct WeightedDriftReport {
    /// Buffer holding class-2 items: 2μ(2) − 1.
    pub class2_region: Scalar,
    /// Buffer holding merged-class items: worst case −η·μ(1).
    pub merged_region: Scalar,
    /// Buffer holding only class-1 items.
    pub class1_region: Scalar,
    pub pass: bool,
}

pub fn verify_l_eta(
    mu: &ProbabilityVector,
    eta: &Scalar,
) -> Result<WeightedDriftReport, DriftError> {
    expect_dim(mu, 4)?;
    require_symmetric_34(mu)?;
    let m1 = mu.get(0);
    let m2 = mu.get(1);
    // 0 < η and μ(1)/μ(2) < 1 − η.
    let upper = &Scalar::one() - &(m1 / m2);
    if eta.sign() != Sign::Positive || (eta - &upper).sign() != Sign::Negative {
        return Err(DriftError::EtaOutOfRange);
    }
    let one = Scalar::one();
    let one_minus_eta = &one - eta;
    let class2_region = &(m2 + m2) - &one;
    let merged_region = -&(eta * m1);
    // (1−η)(μ(1) − μ(2)) + (μ(3)+μ(4))·μ(1)/μ(2)
    let class1_region = &(&one_minus_eta * &(m1 - m2)) + &(&(mu.get(2) + mu.get(3)) * &(m1 / m2));
    let pass = [&class2_region, &merged_region, &class1_region]
        .iter()
        .all(|d| d.sign() == Sign::Negative);
    Ok(WeightedDriftReport {
        class2_region,
        merged_region,
        class1_region,
        pass,
    })
}

/// One grid point of the exact region sweep.
#[derive(Debug, Clone)]
pub struct RegionPoint {
    pub mu1: BigRational,
    pub mu2: BigRational,
    pub mu: ProbabilityVector,
    pub closed_form_a: bool,
    pub closed_form_b: bool,
    pub model_a: ModelStability,
    pub model_b: ModelStability,
    /// μ(1)(1−μ(1)) − μ(2)², the policy-A discriminant.
    pub discriminant_a: Scalar,
}

/// Sweeps the open (μ(1), μ(2)) triangle on a rational grid with
/// μ(3) = μ(4) = (1 − μ(1) − μ(2))/2, in exact arithmetic.
pub fn region_sweep(step: &BigRational) -> Result<Vec<RegionPoint>, DriftError> {
    assert!(step > &BigRational::zero(), "grid step must be positive");
    let one = BigRational::from_integer(BigInt::from(1));
    let two = BigRational::from_integer(BigInt::from(2));
    let mut points = Vec::new();
    let mut i = 1u32;
    loop {
        let mu1 = step * BigRational::from_integer(BigInt::from(i));
        if mu1 >= one {
            break;
        }
        let mut j = 1u32;
        loop {
            let mu2 = step * BigRational::from_integer(BigInt::from(j));
            let rest = &one - &mu1 - &mu2;
            if rest <= BigRational::zero() {
                break;
            }
            let tail = &rest / &two;
            let mu = ProbabilityVector::from_rationals(vec![
                mu1.clone(),
                mu2.clone(),
                tail.clone(),
                tail,
            ])
            .expect("grid point lies in the open simplex");
            let m1 = Scalar::Exact(mu1.clone());
            let discriminant_a = &(&m1 * &(&Scalar::one() - &m1))
                - &(&Scalar::Exact(mu2.clone()) * &Scalar::Exact(mu2.clone()));
            points.push(RegionPoint {
                mu1: mu1.clone(),
                mu2,
                closed_form_a: stab_region_closed_form(ReducedPolicy::A, &mu)?,
                closed_form_b: stab_region_closed_form(ReducedPolicy::B, &mu)?,
                model_a: classify_model(ReducedPolicy::A, &mu)?,
                model_b: classify_model(ReducedPolicy::B, &mu)?,
                discriminant_a,
                mu,
            });
            j += 1;
        }
        i += 1;
    }
    Ok(points)
}
