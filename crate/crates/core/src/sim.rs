//! Seeded Monte-Carlo simulation of the buffer chain, growth-rate
//! estimation, and an empirical recurrence classifier.
//!
//! Determinism contract: the arrival sequence is a pure function of
//! `(mu, seed)` and policy randomness draws from a separate stream, so two
//! policies run with the same seed see the same arrivals.

use crate::graph::MatchingGraph;
use crate::measure::ProbabilityVector;
use crate::policy::{self, MatchingPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::VecDeque;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SimError {
    #[error("not enough snapshots to fit a growth rate (need at least 10)")]
    InsufficientData,
}

/// SplitMix64; used to derive independent seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Seed for replica `r` of a sweep rooted at `base_seed`.
pub fn replica_seed(base_seed: u64, replica: u64) -> u64 {
    splitmix64(base_seed ^ replica.wrapping_mul(0x9e3779b97f4a7c15))
}

const POLICY_STREAM_TAG: u64 = 0x706f_6c69_6379;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationConfig {
    pub horizon: u64,
    pub seed: u64,
    pub record_trajectory: bool,
    /// 0 means horizon/1000 (at least 1).
    pub snapshot_stride: u64,
}

impl SimulationConfig {
    pub fn new(horizon: u64, seed: u64) -> Self {
        SimulationConfig {
            horizon,
            seed,
            record_trajectory: false,
            snapshot_stride: 0,
        }
    }

    fn effective_stride(&self) -> u64 {
        if self.snapshot_stride > 0 {
            self.snapshot_stride
        } else {
            (self.horizon / 1000).max(1)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub horizon: u64,
    pub final_size: u64,
    pub max_size: u64,
    pub mean_size: f64,
    /// Times n > 0 with an empty buffer.
    pub empty_visits: u64,
    /// Gaps between consecutive empty-buffer times, starting from time 0.
    pub regeneration_lengths: Vec<u64>,
    /// |U_horizon| / horizon.
    pub growth_rate: f64,
    /// Sampled (n, |U_n|) pairs at the snapshot stride.
    pub size_snapshots: Vec<(u64, u64)>,
    /// Full |U_n| series for n = 1..=horizon, when requested.
    pub trajectory: Option<Vec<u64>>,
}

/// Deterministic i.i.d. arrival sequence of law μ: inverse-CDF over the
/// class order, driven by ChaCha8 from the given seed.
#[derive(Debug, Clone)]
pub struct ArrivalStream {
    rng: ChaCha8Rng,
    cdf: Vec<f64>,
}

impl ArrivalStream {
    pub fn new(mu: &ProbabilityVector, seed: u64) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = mu
            .to_f64s()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = f64::INFINITY; // absorb rounding in the final cell
        }
        ArrivalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cdf,
        }
    }

    pub fn next_arrival(&mut self) -> usize {
        let u: f64 = self.rng.gen();
        self.cdf.iter().position(|&c| u < c).unwrap_or(0)
    }
}

impl Iterator for ArrivalStream {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        Some(self.next_arrival())
    }
}

/// Buffer tracked as per-class counts, plus arrival-ordered queues when the
/// policy needs seniority.
struct FastBuffer {
    counts: Vec<u64>,
    support: u64,
    queues: Option<Vec<VecDeque<u64>>>,
    size: u64,
}

impl FastBuffer {
    fn new(n: usize, fcfs: bool) -> Self {
        FastBuffer {
            counts: vec![0; n],
            support: 0,
            queues: fcfs.then(|| vec![VecDeque::new(); n]),
            size: 0,
        }
    }

    fn push(&mut self, class: usize, stamp: u64) {
        self.counts[class] += 1;
        self.support |= 1 << class;
        if let Some(q) = &mut self.queues {
            q[class].push_back(stamp);
        }
        self.size += 1;
    }

    fn pop(&mut self, class: usize) {
        debug_assert!(self.counts[class] > 0);
        self.counts[class] -= 1;
        if self.counts[class] == 0 {
            self.support &= !(1 << class);
        }
        if let Some(q) = &mut self.queues {
            q[class].pop_front();
        }
        self.size -= 1;
    }
}

/// Runs the chain from the empty buffer. Identical configurations produce
/// bit-identical results.
pub fn simulate(
    g: &MatchingGraph,
    policy: &MatchingPolicy,
    mu: &ProbabilityVector,
    cfg: &SimulationConfig,
) -> SimulationResult {
    assert_eq!(g.vertex_count(), mu.dim(), "measure must match the graph");
    let n = g.vertex_count();
    let mut arrivals = ArrivalStream::new(mu, cfg.seed);
    let mut policy_rng = ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ POLICY_STREAM_TAG));
    let mut buffer = FastBuffer::new(n, matches!(policy, MatchingPolicy::Fcfs));
    let stride = cfg.effective_stride();

    let mut max_size = 0u64;
    let mut size_sum = 0u128;
    let mut empty_visits = 0u64;
    let mut regeneration_lengths = Vec::new();
    let mut last_empty = 0u64;
    let mut snapshots = Vec::new();
    let mut trajectory = cfg.record_trajectory.then(Vec::new);

    for step_no in 1..=cfg.horizon {
        let arrival = arrivals.next_arrival();
        let matchable = g.neighbor_mask(arrival) & buffer.support;
        if matchable == 0 {
            buffer.push(arrival, step_no);
        } else {
            let class = match policy {
                MatchingPolicy::Fcfs => {
                    let queues = buffer.queues.as_ref().expect("fcfs keeps queues");
                    crate::graph::VertexSet::from_mask(matchable)
                        .iter()
                        .min_by_key(|&c| queues[c].front().copied().unwrap_or(u64::MAX))
                        .expect("matchable is non-empty")
                }
                MatchingPolicy::MatchLongest { rank } => {
                    policy::match_longest_choice(g, &buffer.counts, arrival, rank)
                        .expect("matchable is non-empty")
                }
                MatchingPolicy::Priority { prefs } => {
                    policy::priority_choice(&buffer.counts, &prefs[arrival])
                        .expect("matchable is non-empty")
                }
                MatchingPolicy::UniformRandom => {
                    let classes = crate::graph::VertexSet::from_mask(matchable);
                    let total: u64 = classes.iter().map(|c| buffer.counts[c]).sum();
                    let mut draw = policy_rng.gen_range(0..total);
                    let chosen = classes
                        .iter()
                        .find(|&c| {
                            if draw < buffer.counts[c] {
                                true
                            } else {
                                draw -= buffer.counts[c];
                                false
                            }
                        })
                        .expect("draw lands in a class");
                    chosen
                }
            };
            buffer.pop(class);
        }

        let size = buffer.size;
        max_size = max_size.max(size);
        size_sum += u128::from(size);
        if size == 0 {
            empty_visits += 1;
            regeneration_lengths.push(step_no - last_empty);
            last_empty = step_no;
        }
        if step_no % stride == 0 {
            snapshots.push((step_no, size));
        }
        if let Some(t) = &mut trajectory {
            t.push(size);
        }
    }

    let final_size = buffer.size;
    SimulationResult {
        horizon: cfg.horizon,
        final_size,
        max_size,
        mean_size: if cfg.horizon == 0 {
            0.0
        } else {
            size_sum as f64 / cfg.horizon as f64
        },
        empty_visits,
        regeneration_lengths,
        growth_rate: if cfg.horizon == 0 {
            0.0
        } else {
            final_size as f64 / cfg.horizon as f64
        },
        size_snapshots: snapshots,
        trajectory,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    /// Half-width of the 95% confidence band on the slope.
    pub half_width: f64,
}

/// Least-squares slope of |U_n| against n over the second half of the run
/// (the first half is burn-in).
pub fn growth_rate_fit(result: &SimulationResult) -> Result<GrowthFit, SimError> {
    if result.size_snapshots.len() < 10 {
        return Err(SimError::InsufficientData);
    }
    let burn_in = result.horizon / 2;
    let points: Vec<(f64, f64)> = result
        .size_snapshots
        .iter()
        .filter(|(n, _)| *n > burn_in)
        .map(|&(n, s)| (n as f64, s as f64))
        .collect();
    if points.len() < 3 {
        return Err(SimError::InsufficientData);
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let se = (ss_res / (m - 2.0) / sxx).sqrt();
    Ok(GrowthFit {
        slope,
        half_width: 1.96 * se,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpiricalVerdict {
    StableLikely,
    TransientLikely,
    Inconclusive,
}

impl std::fmt::Display for EmpiricalVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EmpiricalVerdict::StableLikely => "StableLikely",
            EmpiricalVerdict::TransientLikely => "TransientLikely",
            EmpiricalVerdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// Heuristic thresholds; configuration, not claims.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalConfig {
    /// Median slope above this reads as transient.
    pub tau_plus: f64,
    /// Median slope must stay below this for a stable call.
    pub tau_minus: f64,
    /// Empty visits at the full horizon must exceed this multiple of the
    /// half-horizon count ("scales at least linearly").
    pub growth_factor_min: f64,
}

impl Default for EmpiricalConfig {
    fn default() -> Self {
        EmpiricalConfig {
            tau_plus: 0.01,
            tau_minus: 0.005,
            growth_factor_min: 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedStats {
    pub seed: u64,
    pub slope: f64,
    pub empty_visits: u64,
    pub empty_visits_first_half: u64,
}

impl SeedStats {
    /// Summary of one finished run: fitted slope (growth rate when too few
    /// snapshots) and the empty-visit counts at half and full horizon.
    pub fn from_result(seed: u64, result: &SimulationResult) -> Self {
        let slope = growth_rate_fit(result)
            .map(|f| f.slope)
            .unwrap_or(result.growth_rate);
        let mut elapsed = 0u64;
        let mut first_half = 0u64;
        for gap in &result.regeneration_lengths {
            elapsed += gap;
            if elapsed <= result.horizon / 2 {
                first_half += 1;
            }
        }
        SeedStats {
            seed,
            slope,
            empty_visits: result.empty_visits,
            empty_visits_first_half: first_half,
        }
    }
}

fn seed_stats(
    g: &MatchingGraph,
    policy: &MatchingPolicy,
    mu: &ProbabilityVector,
    seed: u64,
    horizon: u64,
) -> SeedStats {
    let result = simulate(g, policy, mu, &SimulationConfig::new(horizon, seed));
    SeedStats::from_result(seed, &result)
}

fn median_f64(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    }
}

fn median_u64(values: &mut [u64]) -> f64 {
    values.sort_unstable();
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2] as f64
    } else {
        (values[k / 2 - 1] + values[k / 2]) as f64 / 2.0
    }
}

/// Verdict from per-seed medians: transient on a clearly positive slope,
/// stable on a near-zero slope with linearly growing regeneration counts,
/// inconclusive otherwise.
pub fn empirical_verdict(stats: &[SeedStats], cfg: &EmpiricalConfig) -> EmpiricalVerdict {
    let mut slopes: Vec<f64> = stats.iter().map(|s| s.slope).collect();
    let mut full: Vec<u64> = stats.iter().map(|s| s.empty_visits).collect();
    let mut half: Vec<u64> = stats.iter().map(|s| s.empty_visits_first_half).collect();
    let slope = median_f64(&mut slopes);
    let full = median_u64(&mut full);
    let half = median_u64(&mut half);
    if slope > cfg.tau_plus {
        EmpiricalVerdict::TransientLikely
    } else if slope < cfg.tau_minus && half > 0.0 && full >= cfg.growth_factor_min * half {
        EmpiricalVerdict::StableLikely
    } else {
        EmpiricalVerdict::Inconclusive
    }
}

/// Classifies (graph, policy, μ) from simulations alone. Needs at least 3
/// seeds. The exact classifications come from the drift analysis; this is a
/// cross-check with configured thresholds.
pub fn classify_empirical(
    g: &MatchingGraph,
    policy: &MatchingPolicy,
    mu: &ProbabilityVector,
    seeds: &[u64],
    horizon: u64,
    cfg: &EmpiricalConfig,
) -> EmpiricalVerdict {
    assert!(
        seeds.len() >= 3,
        "empirical classification needs >= 3 seeds"
    );
    let stats: Vec<SeedStats> = seeds
        .iter()
        .map(|&s| seed_stats(g, policy, mu, s, horizon))
        .collect();
    empirical_verdict(&stats, cfg)
}

#[derive(Debug, Clone)]
pub struct PointEmpirical {
    pub verdict: EmpiricalVerdict,
    pub per_seed: Vec<SeedStats>,
}

/// Empirical verdicts for a batch of laws, parallelized over (point, seed)
/// pairs. Aggregation is order-independent.
pub fn empirical_batch(
    g: &MatchingGraph,
    policy: &MatchingPolicy,
    points: &[ProbabilityVector],
    seeds: &[u64],
    horizon: u64,
    cfg: &EmpiricalConfig,
) -> Vec<PointEmpirical> {
    assert!(
        seeds.len() >= 3,
        "empirical classification needs >= 3 seeds"
    );
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let mut stats: Vec<(usize, SeedStats)> = jobs
        .par_iter()
        .map(|&(p, s)| (p, seed_stats(g, policy, &points[p], s, horizon)))
        .collect();
    stats.sort_by_key(|(p, st)| (*p, st.seed));
    (0..points.len())
        .map(|p| {
            let per_seed: Vec<SeedStats> = stats
                .iter()
                .filter(|(q, _)| *q == p)
                .map(|(_, st)| *st)
                .collect();
            PointEmpirical {
                verdict: empirical_verdict(&per_seed, cfg),
                per_seed,
            }
        })
        .collect()
}
