//! Monte Carlo harness: drop a macro user, learn, design, and score the
//! realised access and interference.
//!
//! Trial `t` of every sweep point draws from ChaCha stream `t` of the master
//! seed, so sweep points share common random numbers and runs are
//! reproducible regardless of scheduling.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{observe_snr_samples, LinkGeometry};
use crate::config::SystemConfig;
use crate::design::{design_ap, CaseTag, ScenarioCase};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::geometry::{classify_scenario, coverage_area, Scenario};
use crate::learner::{compensated_sum, SnrSampleSet};

/// Salt for the stream that draws the true target SNR in imperfect runs.
const TARGET_SNR_SALT: u64 = 0x7a3d_5f21_9c4e_b801;
/// Salt for the stream that draws the access coin in Bernoulli mode.
const ACCESS_SALT: u64 = 0x2c91_e6a4_0d57_f3b9;

/// Which rule the small cell uses to pick its access probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AccessPolicy {
    /// Learn distance thresholds from SNR samples, then design per case.
    #[default]
    Learned,
    /// Statistical location prior only (uniform users), no learning.
    StatisticalPrior,
    /// Partial-location detector comparator. Its algorithm is defined
    /// elsewhere and is not reproduced here.
    PartialLocation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub n_trials: usize,
    pub policy: AccessPolicy,
    pub execution: Execution,
    /// Draw an access coin per trial instead of scoring `ρ_AP` in expectation.
    pub bernoulli_access: bool,
    /// True target SNR drawn uniformly from this dB interval while the design
    /// keeps using the configured value.
    pub true_target_snr_db: Option<(f64, f64)>,
}

impl SimOptions {
    pub const DESK_TRIALS: usize = 10_000;
    pub const PAPER_TRIALS: usize = 100_000;

    pub fn new(n_trials: usize) -> Self {
        SimOptions {
            n_trials,
            ..Default::default()
        }
    }
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            n_trials: Self::DESK_TRIALS,
            policy: AccessPolicy::Learned,
            execution: Execution::Parallel,
            bernoulli_access: false,
            true_target_snr_db: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub rho_ap: f64,
    pub mu_in_interference_region: bool,
    /// `None` for policies that do not classify.
    pub scenario_case: Option<ScenarioCase>,
    /// The access coin, when one was drawn.
    pub accessed: Option<bool>,
}

impl TrialOutcome {
    /// This trial's contribution to the interference probability estimate.
    pub fn interference(&self) -> f64 {
        if !self.mu_in_interference_region {
            return 0.0;
        }
        match self.accessed {
            Some(true) => 1.0,
            Some(false) => 0.0,
            None => self.rho_ap,
        }
    }
}

/// Uniform position in the annulus `ξ ≤ |x| ≤ R` around the MBS at the origin.
pub fn drop_mu<R: Rng + ?Sized>(rng: &mut R, cfg: &SystemConfig) -> (f64, f64) {
    let xi2 = cfg.min_distance * cfg.min_distance;
    let span = cfg.macro_radius * cfg.macro_radius - xi2;
    let u: f64 = rng.random();
    let radius = (xi2 + u * span)
        .sqrt()
        .clamp(cfg.min_distance, cfg.macro_radius);
    let angle = std::f64::consts::TAU * rng.random::<f64>();
    (radius * angle.cos(), radius * angle.sin())
}

/// Whether a user at `(x, y)` is inside the coverage disk of a small cell
/// placed at `(d1, 0)`.
pub fn in_coverage(x: f64, y: f64, d1: f64, r: f64) -> bool {
    (x - d1).hypot(y) <= r
}

/// One learn-then-design episode with the configured target SNR.
pub fn run_trial<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SystemConfig,
    d1: f64,
) -> Result<TrialOutcome> {
    run_trial_with_target(rng, cfg, d1, cfg.target_snr_db)
}

/// One episode in which power control enforces `true_target_snr_db` while
/// the design assumes `cfg.target_snr_db`.
pub fn run_trial_with_target<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SystemConfig,
    d1: f64,
    true_target_snr_db: f64,
) -> Result<TrialOutcome> {
    let (x, y) = drop_mu(rng, cfg);
    let geom = LinkGeometry::new(x.hypot(y).max(cfg.min_distance), d1, cfg.min_distance)?;
    let truth;
    let physical = if true_target_snr_db == cfg.target_snr_db {
        cfg
    } else {
        truth = SystemConfig {
            target_snr_db: true_target_snr_db,
            ..cfg.clone()
        };
        &truth
    };
    let samples = SnrSampleSet::new(observe_snr_samples(physical, &geom, rng))?;
    let decision = design_ap(&samples, d1, cfg)?;
    Ok(TrialOutcome {
        rho_ap: decision.rho_ap,
        mu_in_interference_region: in_coverage(x, y, d1, cfg.small_radius),
        scenario_case: Some(decision.scenario_case),
        accessed: None,
    })
}

/// Access probability from the uniform user prior alone:
/// `min{η(πR² − πξ²)/S_c, 1}`.
pub fn sli_baseline_ap(d1: f64, cfg: &SystemConfig) -> Result<f64> {
    let s_c = coverage_area(d1, cfg)?;
    if s_c <= 0.0 {
        return Ok(1.0);
    }
    let cell = std::f64::consts::PI
        * (cfg.macro_radius * cfg.macro_radius - cfg.min_distance * cfg.min_distance);
    Ok((cfg.ip_constraint * cell / s_c).min(1.0))
}

/// Value of the swept parameter at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    D1Km(f64),
    Blocks(usize),
    TargetSnrDb(f64),
}

impl SweepValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            SweepValue::D1Km(v) | SweepValue::TargetSnrDb(v) => v,
            SweepValue::Blocks(b) => b as f64,
        }
    }

    pub fn axis_label(&self) -> &'static str {
        match self {
            SweepValue::D1Km(_) => "d1 (km)",
            SweepValue::Blocks(_) => "I",
            SweepValue::TargetSnrDb(_) => "gamma_T (dB)",
        }
    }
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::D1Km(v) => write!(f, "d1={v} km"),
            SweepValue::Blocks(b) => write!(f, "I={b}"),
            SweepValue::TargetSnrDb(v) => write!(f, "gamma_T={v} dB"),
        }
    }
}

/// Aggregate of all trials at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub sweep: SweepValue,
    pub d1: f64,
    pub empirical_ap: f64,
    pub stderr_ap: f64,
    pub empirical_ip: f64,
    pub stderr_ip: f64,
    pub n_trials: usize,
    pub case_histogram: BTreeMap<(Scenario, CaseTag), usize>,
    pub seed: u64,
}

impl SimReport {
    /// Fraction of trials that landed in the given scenario/case.
    pub fn case_fraction(&self, key: (Scenario, CaseTag)) -> f64 {
        self.case_histogram.get(&key).copied().unwrap_or(0) as f64 / self.n_trials as f64
    }
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn simulate_one(
    cfg: &SystemConfig,
    d1: f64,
    opts: &SimOptions,
    trial: usize,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut outcome = match opts.policy {
        AccessPolicy::Learned => {
            let true_target = match opts.true_target_snr_db {
                Some((lo, hi)) if lo < hi => {
                    trial_rng(cfg.seed ^ TARGET_SNR_SALT, trial).random_range(lo..=hi)
                }
                Some((lo, _)) => lo,
                None => cfg.target_snr_db,
            };
            run_trial_with_target(&mut rng, cfg, d1, true_target)?
        }
        AccessPolicy::StatisticalPrior => {
            let (x, y) = drop_mu(&mut rng, cfg);
            TrialOutcome {
                rho_ap: sli_baseline_ap(d1, cfg)?,
                mu_in_interference_region: in_coverage(x, y, d1, cfg.small_radius),
                scenario_case: None,
                accessed: None,
            }
        }
        AccessPolicy::PartialLocation => {
            return Err(Error::NotImplemented("partial-location detector"))
        }
    };
    if opts.bernoulli_access {
        let coin: f64 = trial_rng(cfg.seed ^ ACCESS_SALT, trial).random();
        outcome.accessed = Some(coin < outcome.rho_ap);
    }
    Ok(outcome)
}

/// Run `opts.n_trials` independent trials with the small cell at `d1`.
pub fn run_point(
    cfg: &SystemConfig,
    d1: f64,
    sweep: SweepValue,
    opts: &SimOptions,
) -> Result<SimReport> {
    cfg.validate()?;
    if opts.n_trials == 0 {
        return Err(Error::Empty("trial count"));
    }
    if let Some((lo, hi)) = opts.true_target_snr_db {
        if !(lo <= hi) {
            return Err(Error::Config(format!(
                "true target SNR interval [{lo}, {hi}] is empty"
            )));
        }
    }
    classify_scenario(d1, cfg).map_err(|e| Error::Config(e.to_string()))?;

    let outcomes = map_indexed(opts.n_trials, opts.execution, |t| {
        simulate_one(cfg, d1, opts, t)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let ap: Vec<f64> = outcomes.iter().map(|o| o.rho_ap).collect();
    let ip: Vec<f64> = outcomes.iter().map(TrialOutcome::interference).collect();
    let (empirical_ap, stderr_ap) = mean_and_stderr(&ap);
    let (empirical_ip, stderr_ip) = mean_and_stderr(&ip);
    let mut case_histogram = BTreeMap::new();
    for sc in outcomes.iter().filter_map(|o| o.scenario_case) {
        *case_histogram.entry(sc.key()).or_insert(0) += 1;
    }
    Ok(SimReport {
        sweep,
        d1,
        empirical_ap,
        stderr_ap,
        empirical_ip,
        stderr_ip,
        n_trials: opts.n_trials,
        case_histogram,
        seed: cfg.seed,
    })
}

/// Grid of sweep points.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    D1(Vec<f64>),
    Blocks { d1: f64, blocks: Vec<usize> },
    TargetSnr { d1: f64, target_snr_db: Vec<f64> },
}

impl Sweep {
    fn len(&self) -> usize {
        match self {
            Sweep::D1(v) => v.len(),
            Sweep::Blocks { blocks, .. } => blocks.len(),
            Sweep::TargetSnr { target_snr_db, .. } => target_snr_db.len(),
        }
    }
}

pub fn run_sweep(cfg: &SystemConfig, sweep: &Sweep, opts: &SimOptions) -> Result<Vec<SimReport>> {
    if sweep.len() == 0 {
        return Err(Error::Empty("sweep grid"));
    }
    match sweep {
        Sweep::D1(grid) => grid
            .iter()
            .map(|&d1| run_point(cfg, d1, SweepValue::D1Km(d1), opts))
            .collect(),
        Sweep::Blocks { d1, blocks } => blocks
            .iter()
            .map(|&b| {
                let point = SystemConfig {
                    blocks: b,
                    ..cfg.clone()
                };
                run_point(&point, *d1, SweepValue::Blocks(b), opts)
            })
            .collect(),
        Sweep::TargetSnr { d1, target_snr_db } => target_snr_db
            .iter()
            .map(|&g| {
                let point = SystemConfig {
                    target_snr_db: g,
                    ..cfg.clone()
                };
                run_point(&point, *d1, SweepValue::TargetSnrDb(g), opts)
            })
            .collect(),
    }
}

/// `d1` sweep where power control targets a true SNR uniform in
/// `[low_db, high_db]` and the design uses the configured estimate.
pub fn run_imperfect_gamma_t_sweep(
    cfg: &SystemConfig,
    d1_grid: &[f64],
    opts: &SimOptions,
    low_db: f64,
    high_db: f64,
) -> Result<Vec<SimReport>> {
    if !(low_db <= high_db) {
        return Err(Error::Config(format!(
            "true target SNR interval [{low_db}, {high_db}] is empty"
        )));
    }
    let opts = SimOptions {
        true_target_snr_db: Some((low_db, high_db)),
        ..opts.clone()
    };
    run_sweep(cfg, &Sweep::D1(d1_grid.to_vec()), &opts)
}

/// Evenly spaced grid `start, start+step, …` up to and including `stop`
/// (within rounding).
pub fn linspace_step(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return Vec::new();
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| {
            let v = start + step * i as f64;
            // snap to the step's decimal precision so grid labels print cleanly
            (v * 1e9).round() / 1e9
        })
        .collect()
}
