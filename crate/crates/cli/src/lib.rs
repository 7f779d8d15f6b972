//! Command implementations for the matching-model binary: structural
//! reports, stability-condition checks, seeded simulation, exact region
//! sweeps and the built-in reproduction suites.

use clap::{Args, Parser, Subcommand, ValueEnum};
use matching_model::drift::{self, ChainClass, ReducedPolicy};
use matching_model::graph::MatchingGraph;
use matching_model::model::{self, presets, ModelFile};
use matching_model::ncond;
use matching_model::policy::{self, BufferState, MatchingPolicy};
use matching_model::scalar::{Scalar, Sign};
use matching_model::sim;
use matching_model::ProbabilityVector;
use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Exit codes: 0 success, 1 parse/validation error, 2 computational failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => m,
        }
    }
}

impl From<model::ModelError> for CliError {
    fn from(e: model::ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ncond::NcondError> for CliError {
    fn from(e: ncond::NcondError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<drift::DriftError> for CliError {
    fn from(e: drift::DriftError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<policy::PolicyError> for CliError {
    fn from(e: policy::PolicyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(format!("io error: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "matching-model",
    about = "Stability analysis and simulation of stochastic matching models",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structural report: connectivity, bipartiteness, separability, facets.
    Classify(ClassifyArgs),
    /// Check the stability conditions for the model's arrival law.
    Ncond(NcondArgs),
    /// Simulate the buffer chain and write trajectory/summary CSV.
    Simulate(SimulateArgs),
    /// Sweep the (mu1, mu2) triangle: exact regions plus empirical verdicts.
    Region(RegionArgs),
    /// Re-run the bundled end-to-end studies.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Model file path, or a preset name: example1, cycle5, figure5.
    #[arg(long)]
    pub model: String,
}

#[derive(Args, Debug)]
pub struct NcondArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long, value_enum, ignore_case = true, default_value_t = NcondMethod::Both)]
    pub method: NcondMethod,
    /// Construct a witness law instead of (or in addition to) checking mu.
    #[arg(long)]
    pub witness: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NcondMethod {
    Oracle,
    Flow,
    Both,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: String,
    /// ml, fcfs, random, a, b, cycle5; defaults to the model's policy or ml.
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write n,size rows here (snapshots, or every step with --trajectory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a one-row summary CSV (same schema as the sweep output).
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    /// Record every step instead of snapshots.
    #[arg(long)]
    pub trajectory: bool,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    /// Policy simulated for the empirical column.
    #[arg(long, value_enum, ignore_case = true, default_value_t = RegionPolicy::Ml)]
    pub policy: RegionPolicy,
    /// Grid step for (mu1, mu2), a decimal or p/q rational.
    #[arg(long, default_value = "0.02")]
    pub step: String,
    /// Simulation horizon for the empirical column; 0 skips simulation.
    #[arg(long, default_value_t = 200_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    #[arg(long, default_value_t = 1)]
    pub base_seed: u64,
    /// Grid CSV output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional per-seed CSV (mu_1, mu_2, policy, seed, slope, empty_visits, verdict).
    #[arg(long)]
    pub empirical_out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionPolicy {
    A,
    B,
    Ml,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Which study to re-run: example1 or cycle5.
    pub target: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    #[arg(long, default_value_t = 1)]
    pub base_seed: u64,
}

pub fn run(cli: Cli, out: &mut impl std::io::Write) -> Result<(), CliError> {
    match cli.command {
        Command::Classify(args) => cmd_classify(&args, out),
        Command::Ncond(args) => cmd_ncond(&args, out),
        Command::Simulate(args) => cmd_simulate(&args, out),
        Command::Region(args) => cmd_region(&args, out),
        Command::Reproduce(args) => cmd_reproduce(&args, out),
    }
}

fn load(model: &str) -> Result<ModelFile, CliError> {
    if let Some(preset) = presets::preset(model) {
        return Ok(preset);
    }
    Ok(model::load_model(Path::new(model))?)
}

fn cmd_classify(args: &ClassifyArgs, out: &mut impl std::io::Write) -> Result<(), CliError> {
    let model = load(&args.model)?;
    let g = &model.graph;
    let c = g.classify();
    writeln!(out, "vertices: {}", g.vertex_count())?;
    writeln!(out, "edges: {}", g.edge_count())?;
    writeln!(out, "connected: {}", c.connected)?;
    writeln!(out, "bipartite: {}", c.bipartite)?;
    if let Some((a, b)) = &c.bipartition {
        writeln!(out, "bipartition: {} {}", g.set_labels(a), g.set_labels(b))?;
    }
    match &c.separable {
        Some(sep) => {
            let parts: Vec<String> = sep.parts.iter().map(|p| g.set_labels(p)).collect();
            writeln!(
                out,
                "separable: order {} with parts {}",
                sep.order,
                parts.join(" ")
            )?;
        }
        None => writeln!(out, "separable: no")?,
    }
    match g.facets() {
        Ok(f) => writeln!(out, "facets: {}", f.len())?,
        Err(_) => writeln!(
            out,
            "facets: skipped (vertex count above the enumeration cap)"
        )?,
    }
    writeln!(
        out,
        "doubling graph connected: {}",
        g.doubling_graph().is_connected()
    )?;
    Ok(())
}

fn describe_margin(margin: &Scalar) -> String {
    if margin.is_exact() {
        format!("{} (~{})", margin, margin.to_f64())
    } else {
        format!("{margin}")
    }
}

fn report_verdict(
    out: &mut impl std::io::Write,
    g: &MatchingGraph,
    name: &str,
    verdict: &ncond::NcondVerdict,
) -> Result<(), CliError> {
    writeln!(out, "method: {name}")?;
    writeln!(out, "holds: {}", verdict.holds)?;
    writeln!(out, "margin: {}", describe_margin(&verdict.margin))?;
    match &verdict.witness {
        Some(w) => writeln!(out, "witness: {}", g.set_labels(w))?,
        None => writeln!(out, "witness: none")?,
    }
    Ok(())
}

fn cmd_ncond(args: &NcondArgs, out: &mut impl std::io::Write) -> Result<(), CliError> {
    let model = load(&args.model)?;
    let g = &model.graph;
    if !args.witness && model.mu.is_none() {
        return Err(CliError::Usage(
            "model has no arrival law; provide `mu` in the file or pass --witness".into(),
        ));
    }
    if let Some(mu) = &model.mu {
        match args.method {
            NcondMethod::Oracle => {
                report_verdict(out, g, "oracle", &ncond::ncond_bruteforce(g, mu)?)?
            }
            NcondMethod::Flow => report_verdict(out, g, "flow", &ncond::ncond_flow(g, mu)?)?,
            NcondMethod::Both => {
                let oracle = ncond::ncond_bruteforce(g, mu)?;
                let flow = ncond::ncond_flow(g, mu)?;
                report_verdict(out, g, "oracle", &oracle)?;
                report_verdict(out, g, "flow", &flow)?;
                writeln!(out, "agreement: {}", oracle.holds == flow.holds)?;
            }
        }
    }
    if args.witness {
        match ncond::find_ncond_witness(g)? {
            Some(mu) => {
                let entries: Vec<String> = g
                    .labels()
                    .iter()
                    .enumerate()
                    .map(|(v, l)| format!("{l}: {}", mu.get(v)))
                    .collect();
                writeln!(out, "witness law: {}", entries.join(", "))?;
                let check = ncond::ncond_bruteforce(g, &mu)?;
                writeln!(out, "witness margin: {}", describe_margin(&check.margin))?;
            }
            None => writeln!(out, "witness law: none (graph is bipartite)")?,
        }
    }
    Ok(())
}

fn resolve_policy(model: &ModelFile, flag: Option<&str>) -> Result<MatchingPolicy, CliError> {
    let g = &model.graph;
    match flag {
        None => Ok(model
            .policy
            .clone()
            .unwrap_or_else(|| MatchingPolicy::match_longest(g))),
        Some("ml") => Ok(MatchingPolicy::match_longest(g)),
        Some("fcfs") => Ok(MatchingPolicy::fcfs()),
        Some("random") => Ok(MatchingPolicy::uniform_random()),
        Some("a") => Ok(policy::policy_a(g)?),
        Some("b") => Ok(policy::policy_b(g)?),
        Some("cycle5") => Ok(policy::policy_cycle5(g)?),
        Some(other) => Err(CliError::Usage(format!(
            "unknown policy `{other}` (expected ml, fcfs, random, a, b or cycle5)"
        ))),
    }
}

fn cmd_simulate(args: &SimulateArgs, out: &mut impl std::io::Write) -> Result<(), CliError> {
    let model = load(&args.model)?;
    let mu = model.mu.clone().ok_or_else(|| {
        CliError::Usage("simulation needs an arrival law (`mu`) in the model".into())
    })?;
    let policy = resolve_policy(&model, args.policy.as_deref())?;
    let cfg = sim::SimulationConfig {
        horizon: args.horizon,
        seed: args.seed,
        record_trajectory: args.trajectory,
        snapshot_stride: 0,
    };
    let result = sim::simulate(&model.graph, &policy, &mu, &cfg);
    writeln!(out, "policy: {}", policy.kind())?;
    writeln!(out, "horizon: {}", result.horizon)?;
    writeln!(out, "seed: {}", args.seed)?;
    writeln!(out, "final_size: {}", result.final_size)?;
    writeln!(out, "max_size: {}", result.max_size)?;
    writeln!(out, "mean_size: {}", result.mean_size)?;
    writeln!(out, "empty_visits: {}", result.empty_visits)?;
    writeln!(out, "growth_rate: {}", result.growth_rate)?;
    match sim::growth_rate_fit(&result) {
        Ok(fit) => writeln!(out, "slope: {} +/- {}", fit.slope, fit.half_width)?,
        Err(_) => writeln!(out, "slope: n/a (not enough snapshots)")?,
    }
    if let Some(path) = &args.out {
        let mut csv = String::from("n,size\n");
        match &result.trajectory {
            Some(series) => {
                for (i, size) in series.iter().enumerate() {
                    let _ = writeln!(csv, "{},{}", i as u64 + 1, size);
                }
            }
            None => {
                for (n, size) in &result.size_snapshots {
                    let _ = writeln!(csv, "{n},{size}");
                }
            }
        }
        std::fs::write(path, csv)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    if let Some(path) = &args.summary_out {
        let stats = sim::SeedStats::from_result(args.seed, &result);
        let verdict = sim::empirical_verdict(
            std::slice::from_ref(&stats),
            &sim::EmpiricalConfig::default(),
        );
        let mut csv = String::from("mu_1,mu_2,policy,seed,slope,empty_visits,verdict\n");
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            mu.get(0),
            mu.get(1),
            policy.kind(),
            args.seed,
            stats.slope,
            stats.empty_visits,
            verdict
        );
        std::fs::write(path, csv)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

/// Exact decimal rendering of a rational whose reduced denominator divides a
/// power of ten; falls back to p/q otherwise.
fn exact_decimal(r: &BigRational) -> String {
    let reduced = r.reduced();
    let mut denom = reduced.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", reduced.numer(), reduced.denom());
    }
    let places = twos.max(fives);
    let scale = BigInt::from(10).pow(places);
    let scaled = (reduced.numer() * &scale) / reduced.denom();
    let negative = scaled.is_negative();
    let digits = scaled.magnitude().to_string();
    let digits = if digits.len() <= places as usize {
        format!(
            "{}{}",
            "0".repeat(places as usize + 1 - digits.len()),
            digits
        )
    } else {
        digits
    };
    let (int_part, frac_part) = digits.split_at(digits.len() - places as usize);
    let mut text = String::new();
    if negative {
        text.push('-');
    }
    text.push_str(int_part);
    if !frac_part.is_empty() {
        text.push('.');
        text.push_str(frac_part);
    }
    text
}

fn cmd_region(args: &RegionArgs, out: &mut impl std::io::Write) -> Result<(), CliError> {
    let step_scalar =
        Scalar::parse_exact(&args.step).map_err(|e| CliError::Usage(format!("bad --step: {e}")))?;
    let step = step_scalar.to_rational();
    if !step.is_positive() {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    let points = drift::region_sweep(&step)?;

    let g = presets::example1_graph();
    let (policy_name, policy) = match args.policy {
        RegionPolicy::A => ("A", policy::policy_a(&g)?),
        RegionPolicy::B => ("B", policy::policy_b(&g)?),
        RegionPolicy::Ml => ("ML", MatchingPolicy::match_longest(&g)),
    };
    let run_empirical = args.horizon > 0 && args.seeds >= 3;
    let empirical = if run_empirical {
        let laws: Vec<ProbabilityVector> = points.iter().map(|p| p.mu.clone()).collect();
        let seeds: Vec<u64> = (0..args.seeds)
            .map(|r| sim::replica_seed(args.base_seed, r))
            .collect();
        Some(sim::empirical_batch(
            &g,
            &policy,
            &laws,
            &seeds,
            args.horizon,
            &sim::EmpiricalConfig::default(),
        ))
    } else {
        writeln!(
            out,
            "empirical column skipped (needs --horizon > 0 and --seeds >= 3)"
        )?;
        None
    };

    let mut csv = String::from(
        "mu_1,mu_2,closed_form_A,closed_form_B,fmm_A,fmm_B,discriminant_A,empirical\n",
    );
    for (i, p) in points.iter().enumerate() {
        let empirical_cell = match &empirical {
            Some(results) => results[i].verdict.to_string(),
            None => "na".to_string(),
        };
        let disc = match &p.discriminant_a {
            Scalar::Exact(r) => exact_decimal(r),
            approx => approx.to_string(),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            exact_decimal(&p.mu1),
            exact_decimal(&p.mu2),
            p.closed_form_a,
            p.closed_form_b,
            p.model_a.overall,
            p.model_b.overall,
            disc,
            empirical_cell
        );
    }
    std::fs::write(&args.out, csv)?;
    writeln!(
        out,
        "wrote {} ({} grid points)",
        args.out.display(),
        points.len()
    )?;

    if let Some(path) = &args.empirical_out {
        let mut csv = String::from("mu_1,mu_2,policy,seed,slope,empty_visits,verdict\n");
        if let Some(results) = &empirical {
            for (p, r) in points.iter().zip(results.iter()) {
                for s in &r.per_seed {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{}",
                        exact_decimal(&p.mu1),
                        exact_decimal(&p.mu2),
                        policy_name,
                        s.seed,
                        s.slope,
                        s.empty_visits,
                        r.verdict
                    );
                }
            }
        }
        std::fs::write(path, csv)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

struct CheckList {
    failures: usize,
}

impl CheckList {
    fn new() -> Self {
        CheckList { failures: 0 }
    }

    fn check(
        &mut self,
        out: &mut impl std::io::Write,
        name: &str,
        ok: bool,
        detail: &str,
    ) -> Result<(), CliError> {
        if ok {
            writeln!(out, "ok: {name} ({detail})")?;
        } else {
            self.failures += 1;
            writeln!(out, "FAIL: {name} ({detail})")?;
        }
        Ok(())
    }

    fn finish(self) -> Result<(), CliError> {
        if self.failures == 0 {
            Ok(())
        } else {
            Err(CliError::Compute(format!(
                "{} reproduction check(s) failed",
                self.failures
            )))
        }
    }
}

fn cmd_reproduce(args: &ReproduceArgs, out: &mut impl std::io::Write) -> Result<(), CliError> {
    match args.target.as_str() {
        "example1" => reproduce_example1(args, out),
        "cycle5" => reproduce_cycle5(args, out),
        other => Err(CliError::Usage(format!(
            "unknown reproduction target `{other}` (expected example1 or cycle5)"
        ))),
    }
}

fn reproduce_example1(args: &ReproduceArgs, out: &mut impl std::io::Write) -> Result<(), CliError> {
    let g = presets::example1_graph();
    let mut checks = CheckList::new();

    // Fixed arrival prefix: the first seven buffer states are forced, for
    // every policy, because at most one compatible class is ever present.
    let arrivals = ["3", "1", "4", "2", "4", "4", "1", "2", "3", "2", "1", "4"];
    let expected: [&[&str]; 7] = [
        &["3"],
        &["3", "1"],
        &["1"],
        &[],
        &["4"],
        &["4", "4"],
        &["4", "4", "1"],
    ];
    let policies: Vec<(&str, MatchingPolicy)> = vec![
        ("fcfs", MatchingPolicy::fcfs()),
        ("ml", MatchingPolicy::match_longest(&g)),
        ("A", policy::policy_a(&g)?),
        ("B", policy::policy_b(&g)?),
        ("random", MatchingPolicy::uniform_random()),
    ];
    let mut trajectory_ok = true;
    for (_, p) in &policies {
        let mut rng = rand_chacha_seeded(args.base_seed);
        let mut state = BufferState::empty();
        for (k, label) in arrivals.iter().take(7).enumerate() {
            let arrival = g.label_index(label).expect("preset label");
            state = policy::step(&g, p, &state, arrival, &mut rng);
            let want: Vec<usize> = expected[k]
                .iter()
                .map(|l| g.label_index(l).expect("preset label"))
                .collect();
            if state.word() != want {
                trajectory_ok = false;
            }
        }
    }
    checks.check(
        out,
        "fixed-arrival trajectory",
        trajectory_ok,
        "first 7 states identical under all policies",
    )?;

    // The reduced transition tables match the ones derived from the policy
    // machinery itself.
    let mut tables_ok = true;
    for policy in [ReducedPolicy::A, ReducedPolicy::B] {
        for weights in [[10u64, 40, 25, 25], [30, 40, 15, 15], [25, 35, 20, 20]] {
            let mu = ProbabilityVector::from_integer_weights(&weights).expect("valid weights");
            let built = drift::build_reduced_chain(policy, &mu)?;
            let derived = drift::derive_reduced_chain(policy, &mu)?;
            for region in [
                drift::WalkRegion::Interior,
                drift::WalkRegion::XAxis,
                drift::WalkRegion::YAxis,
                drift::WalkRegion::Origin,
            ] {
                for dx in -1..=1i8 {
                    for dy in -1..=1i8 {
                        let a = built.probability(region, (dx, dy));
                        let b = derived.probability(region, (dx, dy));
                        if (&a - &b).sign() != Sign::Zero {
                            tables_ok = false;
                        }
                    }
                }
            }
        }
    }
    checks.check(
        out,
        "reduced chain tables",
        tables_ok,
        "closed-form tables equal policy-derived tables for A and B",
    )?;

    // Exact region sweep: drift classification reproduces the closed forms.
    let step = BigRational::new(BigInt::from(1), BigInt::from(50));
    let points = drift::region_sweep(&step)?;
    let mut region_ok = true;
    let mut a_stable = 0usize;
    let mut b_only = 0usize;
    for p in &points {
        if (p.model_a.overall == ChainClass::Ergodic) != p.closed_form_a {
            region_ok = false;
        }
        if (p.model_b.overall == ChainClass::Ergodic) != p.closed_form_b {
            region_ok = false;
        }
        if p.closed_form_a && !p.closed_form_b {
            region_ok = false; // A must sit inside B
        }
        if p.closed_form_a {
            a_stable += 1;
        }
        if p.closed_form_b && !p.closed_form_a {
            b_only += 1;
        }
    }
    checks.check(
        out,
        "stability regions",
        region_ok && a_stable > 0 && b_only > 0,
        &format!(
            "{} grid points; Stab(A) strictly inside Stab(B) ({} A-stable, {} B-only)",
            points.len(),
            a_stable,
            b_only
        ),
    )?;

    // Weighted-potential certificates sit inside the closed-form region and
    // exhaust it as eta shrinks.
    let mut sandwich_ok = true;
    let mut certified = 0usize;
    for w1 in 1..=9u64 {
        for w2 in (w1 + 1)..=9u64 {
            let rest = 20 - w1 - w2;
            if rest < 2 || rest % 2 != 0 {
                continue;
            }
            let mu = ProbabilityVector::from_integer_weights(&[w1, w2, rest / 2, rest / 2])
                .expect("valid weights");
            let in_region = drift::stab_region_closed_form(ReducedPolicy::A, &mu)?;
            let upper = &Scalar::one() - &(mu.get(0) / mu.get(1));
            let mut any_eta = false;
            for k in 1..=12u32 {
                let eta = &upper * &Scalar::ratio(1, 1i64 << k);
                let report = drift::verify_l_eta(&mu, &eta)?;
                if report.pass {
                    any_eta = true;
                    if !in_region {
                        sandwich_ok = false; // certificate outside the region
                    }
                }
            }
            if in_region && !any_eta {
                sandwich_ok = false; // small eta must certify interior points
            }
            if in_region && any_eta {
                certified += 1;
            }
        }
    }
    checks.check(
        out,
        "weighted-potential sandwich",
        sandwich_ok && certified > 0,
        &format!("{certified} interior laws certified by some eta"),
    )?;

    checks.finish()
}

fn reproduce_cycle5(args: &ReproduceArgs, out: &mut impl std::io::Write) -> Result<(), CliError> {
    let g = presets::cycle5_graph();
    let policy = policy::policy_cycle5(&g)?;
    let mut checks = CheckList::new();

    for (num, den) in [(1i64, 20i64), (1, 10), (1, 5)] {
        let eps = Scalar::ratio(num, den);
        let mu = presets::cycle5_measure(&eps).expect("in-range epsilon");

        let oracle = ncond::ncond_bruteforce(&g, &mu)?;
        let flow = ncond::ncond_flow(&g, &mu)?;
        checks.check(
            out,
            &format!("eps={num}/{den} stability conditions"),
            oracle.holds && flow.holds,
            &format!("margin {}", describe_margin(&oracle.margin)),
        )?;

        let walk = drift::build_cycle5_chain(&eps)?;
        let d = drift::drifts(&walk);
        let quarter = Scalar::ratio(1, 4);
        let drift_ok = [
            (&d.interior_dx, &quarter - &(&eps * &Scalar::ratio(5, 8))),
            (&d.interior_dy, &(&eps * &Scalar::ratio(1, 8)) - &quarter),
            (&d.x_axis_dx, -&(&eps * &Scalar::ratio(1, 2))),
            (&d.x_axis_dy, eps.clone()),
        ]
        .iter()
        .all(|(got, want)| (*got - want).sign() == Sign::Zero);
        checks.check(
            out,
            &format!("eps={num}/{den} drift formulas"),
            drift_ok,
            "interior and first-axis drifts equal the published expressions",
        )?;

        let verdict = drift::fmm_classify(&d);
        let expected_disc =
            &(&eps * &Scalar::ratio(1, 8)) - &(&(&eps * &eps) * &Scalar::ratio(9, 16));
        let disc_ok = verdict
            .discriminant
            .as_ref()
            .map(|disc| (disc - &expected_disc).sign() == Sign::Zero)
            .unwrap_or(false);
        checks.check(
            out,
            &format!("eps={num}/{den} classification"),
            verdict.class == ChainClass::Transient && disc_ok,
            &format!(
                "discriminant {} > 0, verdict {}",
                expected_disc, verdict.class
            ),
        )?;

        let mut finals: Vec<u64> = (0..args.seeds.max(3))
            .map(|r| {
                let cfg =
                    sim::SimulationConfig::new(args.horizon, sim::replica_seed(args.base_seed, r));
                sim::simulate(&g, &policy, &mu, &cfg).final_size
            })
            .collect();
        finals.sort_unstable();
        let median = finals[finals.len() / 2];
        checks.check(
            out,
            &format!("eps={num}/{den} simulated escape"),
            median > 1_000,
            &format!("median final buffer {median} after {} steps", args.horizon),
        )?;
    }

    checks.finish()
}

fn rand_chacha_seeded(seed: u64) -> impl rand::Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
