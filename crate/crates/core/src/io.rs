//! Config documents, experiment orchestration, CSV tables and plot scripts.
//!
//! Config schema (TOML, every key optional):
//!
//! ```toml
//! [system]
//! macro_radius_km = 0.5
//! small_radius_km = 0.1
//! min_distance_km = 0.035
//! noise_power_dbm = -114.0
//! target_snr_db = 20.0
//! ip_constraint = 0.01
//! shadow_sigma_db = 8.0
//! blocks = 50
//! subblocks = 1
//! measurement = "noisy"          # or "ideal"
//! samples_per_subblock = 64
//! seed = 1
//!
//! [run]
//! experiment = "ApIpVsD1"        # ApIpVsBlocks, ApVsTargetSnr, ImperfectGammaT, SingleDecision
//! output_dir = "results"
//! trials = 10000
//! execution = "parallel"         # or "sequential"
//! d1_grid = [0.04, 0.06]         # default 0.04..0.6 step 0.02
//! blocks_grid = [50, 100, 200]
//! gamma_t_grid = [10.0, 12.0]    # default 10..30 step 2
//! gamma_t_probe_d1 = [0.1, 0.25, 0.4]
//! true_gamma_t_low_db = 17.0
//! true_gamma_t_high_db = 23.0
//! decide_d1 = 0.25
//! decide_d0 = 0.3                # omit to drop the user at random
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{observe_snr_samples, LinkGeometry};
use crate::config::{dbm_to_mw, linear_to_db, MeasurementMode, SystemConfig};
use crate::design::{design_ap, ApDecision};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::learner::SnrSampleSet;
use crate::sim::{
    drop_mu, linspace_step, run_imperfect_gamma_t_sweep, run_sweep, AccessPolicy, SimOptions,
    SimReport, Sweep,
};

/// Fixed CSV columns; case-histogram columns follow.
pub const CSV_HEADER: [&str; 7] = [
    "sweep_param",
    "empirical_ap",
    "stderr_ap",
    "empirical_ip",
    "stderr_ip",
    "n_trials",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    ApIpVsD1,
    ApIpVsBlocks,
    ApVsTargetSnr,
    ImperfectGammaT,
    SingleDecision,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::ApIpVsD1,
        Experiment::ApIpVsBlocks,
        Experiment::ApVsTargetSnr,
        Experiment::ImperfectGammaT,
        Experiment::SingleDecision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ApIpVsD1 => "ApIpVsD1",
            Experiment::ApIpVsBlocks => "ApIpVsBlocks",
            Experiment::ApVsTargetSnr => "ApVsTargetSnr",
            Experiment::ImperfectGammaT => "ImperfectGammaT",
            Experiment::SingleDecision => "SingleDecision",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| *c != '-' && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

impl FromStr for Experiment {
    type Err = Error;

    /// Accepts the variant name in any case, with optional `-`/`_`
    /// separators (`ap-ip-vs-d1`, `ApIpVsD1`).
    fn from_str(s: &str) -> Result<Self> {
        let key = squash(s);
        Experiment::ALL
            .into_iter()
            .find(|e| squash(e.name()) == key)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                Error::Config(format!(
                    "unknown experiment `{s}`; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Everything about a run that is not physics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub experiment: Experiment,
    /// Key/value overrides applied on top of the document, as given.
    pub overrides: BTreeMap<String, String>,
    pub seed: u64,
    pub trials: usize,
    pub execution: Execution,
    pub d1_grid: Vec<f64>,
    pub blocks_grid: Vec<usize>,
    pub gamma_t_grid: Vec<f64>,
    pub gamma_t_probe_d1: Vec<f64>,
    pub true_gamma_t_db: (f64, f64),
    pub decide_d1: f64,
    pub decide_d0: Option<f64>,
}

impl Default for RunManifest {
    fn default() -> Self {
        RunManifest {
            config_path: None,
            output_dir: PathBuf::from("results"),
            experiment: Experiment::ApIpVsD1,
            overrides: BTreeMap::new(),
            seed: SystemConfig::default().seed,
            trials: SimOptions::DESK_TRIALS,
            execution: Execution::Parallel,
            d1_grid: linspace_step(0.04, 0.6, 0.02),
            blocks_grid: vec![50, 100, 200],
            gamma_t_grid: linspace_step(10.0, 30.0, 2.0),
            gamma_t_probe_d1: vec![0.1, 0.25, 0.4],
            true_gamma_t_db: (17.0, 23.0),
            decide_d1: 0.25,
            decide_d0: None,
        }
    }
}

impl RunManifest {
    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            n_trials: self.trials,
            execution: self.execution,
            ..SimOptions::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.d1_grid.is_empty() || self.blocks_grid.is_empty() || self.gamma_t_grid.is_empty() {
            return Err(Error::Config("sweep grids must be nonempty".into()));
        }
        if self.blocks_grid.contains(&0) {
            return Err(Error::Config("blocks_grid entries must be >= 1".into()));
        }
        let (lo, hi) = self.true_gamma_t_db;
        if !(lo <= hi) {
            return Err(Error::Config(format!(
                "true_gamma_t_low_db ({lo}) exceeds true_gamma_t_high_db ({hi})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    system: SystemSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    macro_radius_km: Option<f64>,
    small_radius_km: Option<f64>,
    min_distance_km: Option<f64>,
    noise_power_dbm: Option<f64>,
    target_snr_db: Option<f64>,
    ip_constraint: Option<f64>,
    shadow_sigma_db: Option<f64>,
    blocks: Option<usize>,
    subblocks: Option<usize>,
    measurement: Option<String>,
    samples_per_subblock: Option<u32>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    experiment: Option<String>,
    output_dir: Option<PathBuf>,
    trials: Option<usize>,
    execution: Option<String>,
    d1_grid: Option<Vec<f64>>,
    blocks_grid: Option<Vec<usize>>,
    gamma_t_grid: Option<Vec<f64>>,
    gamma_t_probe_d1: Option<Vec<f64>>,
    true_gamma_t_low_db: Option<f64>,
    true_gamma_t_high_db: Option<f64>,
    decide_d1: Option<f64>,
    decide_d0: Option<f64>,
}

const SYSTEM_KEYS: [&str; 12] = [
    "macro_radius_km",
    "small_radius_km",
    "min_distance_km",
    "noise_power_dbm",
    "target_snr_db",
    "ip_constraint",
    "shadow_sigma_db",
    "blocks",
    "subblocks",
    "measurement",
    "samples_per_subblock",
    "seed",
];

const RUN_KEYS: [&str; 12] = [
    "experiment",
    "output_dir",
    "trials",
    "execution",
    "d1_grid",
    "blocks_grid",
    "gamma_t_grid",
    "gamma_t_probe_d1",
    "true_gamma_t_low_db",
    "true_gamma_t_high_db",
    "decide_d1",
    "decide_d0",
];

/// Parse a grid written as `a,b,c` or `start:stop:step`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::Config(format!("bad grid `{spec}`: {what}"));
    let spec = spec.trim().trim_start_matches('[').trim_end_matches(']');
    if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|e| bad(&e.to_string())))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad("expected start:stop:step"));
        };
        let grid = linspace_step(start, stop, step);
        if grid.is_empty() {
            return Err(bad("empty range"));
        }
        return Ok(grid);
    }
    let grid: Vec<f64> = spec
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().map_err(|e| bad(&e.to_string())))
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(bad("no values"));
    }
    Ok(grid)
}

fn override_value(key: &str, raw: &str) -> Result<toml::Value> {
    if key.ends_with("_grid") || key == "gamma_t_probe_d1" {
        let grid = parse_grid(raw)?;
        return Ok(if key == "blocks_grid" {
            toml::Value::Array(
                grid.into_iter()
                    .map(|v| toml::Value::Integer(v as i64))
                    .collect(),
            )
        } else {
            toml::Value::Array(grid.into_iter().map(toml::Value::Float).collect())
        });
    }
    // Bare words (experiment names, paths) fall back to strings.
    let doc = format!("v = {raw}");
    Ok(match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    })
}

fn apply_overrides(table: &mut toml::Table, overrides: &BTreeMap<String, String>) -> Result<()> {
    for (key, raw) in overrides {
        let section = if SYSTEM_KEYS.contains(&key.as_str()) {
            "system"
        } else if RUN_KEYS.contains(&key.as_str()) {
            "run"
        } else {
            return Err(Error::Config(format!("unknown override key `{key}`")));
        };
        let mut value = override_value(key, raw)?;
        // Integer-valued float keys given as `20` must still deserialize as f64.
        if let toml::Value::Integer(i) = value {
            if !matches!(
                key.as_str(),
                "blocks" | "subblocks" | "samples_per_subblock" | "seed" | "trials"
            ) {
                value = toml::Value::Float(i as f64);
            }
        }
        let entry = table
            .entry(section)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let toml::Value::Table(sub) = entry else {
            return Err(Error::Parse(format!("`{section}` must be a table")));
        };
        sub.insert(key.clone(), value);
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<(SystemConfig, RunManifest)> {
    parse_config_with_overrides(text, &BTreeMap::new())
}

/// Parse a config document, then apply `key = value` overrides, which take
/// precedence over the document. Keys are the bare schema keys.
pub fn parse_config_with_overrides(
    text: &str,
    overrides: &BTreeMap<String, String>,
) -> Result<(SystemConfig, RunManifest)> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    apply_overrides(&mut table, overrides)?;
    let doc: Document = table
        .try_into()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;

    let d = SystemConfig::default();
    let s = doc.system;
    let samples_per_subblock = s
        .samples_per_subblock
        .unwrap_or(MeasurementMode::DEFAULT_SAMPLES_PER_SUBBLOCK);
    let measurement = match s
        .measurement
        .as_deref()
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        None => match d.measurement {
            MeasurementMode::Noisy { .. } => MeasurementMode::Noisy {
                samples_per_subblock,
            },
            m => m,
        },
        Some("ideal") => MeasurementMode::Ideal,
        Some("noisy") => MeasurementMode::Noisy {
            samples_per_subblock,
        },
        Some(other) => {
            return Err(Error::Config(format!(
                "measurement must be `ideal` or `noisy`, got `{other}`"
            )))
        }
    };
    let cfg = SystemConfig {
        macro_radius: s.macro_radius_km.unwrap_or(d.macro_radius),
        small_radius: s.small_radius_km.unwrap_or(d.small_radius),
        min_distance: s.min_distance_km.unwrap_or(d.min_distance),
        noise_power: s.noise_power_dbm.map(dbm_to_mw).unwrap_or(d.noise_power),
        target_snr_db: s.target_snr_db.unwrap_or(d.target_snr_db),
        ip_constraint: s.ip_constraint.unwrap_or(d.ip_constraint),
        shadow_sigma_db: s.shadow_sigma_db.unwrap_or(d.shadow_sigma_db),
        blocks: s.blocks.unwrap_or(d.blocks),
        subblocks: s.subblocks.unwrap_or(d.subblocks),
        measurement,
        seed: s.seed.unwrap_or(d.seed),
    };
    cfg.validate()?;

    let m = RunManifest::default();
    let r = doc.run;
    let execution = match r
        .execution
        .as_deref()
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        None => m.execution,
        Some("parallel") => Execution::Parallel,
        Some("sequential") => Execution::Sequential,
        Some(other) => {
            return Err(Error::Config(format!(
                "execution must be `parallel` or `sequential`, got `{other}`"
            )))
        }
    };
    let manifest = RunManifest {
        config_path: None,
        output_dir: r.output_dir.unwrap_or(m.output_dir),
        experiment: r
            .experiment
            .as_deref()
            .map(str::parse)
            .transpose()?
            .unwrap_or(m.experiment),
        overrides: overrides.clone(),
        seed: cfg.seed,
        trials: r.trials.unwrap_or(m.trials),
        execution,
        d1_grid: r.d1_grid.unwrap_or(m.d1_grid),
        blocks_grid: r.blocks_grid.unwrap_or(m.blocks_grid),
        gamma_t_grid: r.gamma_t_grid.unwrap_or(m.gamma_t_grid),
        gamma_t_probe_d1: r.gamma_t_probe_d1.unwrap_or(m.gamma_t_probe_d1),
        true_gamma_t_db: (
            r.true_gamma_t_low_db.unwrap_or(m.true_gamma_t_db.0),
            r.true_gamma_t_high_db.unwrap_or(m.true_gamma_t_db.1),
        ),
        decide_d1: r.decide_d1.unwrap_or(m.decide_d1),
        decide_d0: r.decide_d0.or(m.decide_d0),
    };
    manifest.validate()?;
    Ok((cfg, manifest))
}

/// Read and parse a config file; `None` means defaults plus overrides.
pub fn load_config(
    path: Option<&Path>,
    overrides: &BTreeMap<String, String>,
) -> Result<(SystemConfig, RunManifest)> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    let (cfg, mut manifest) = parse_config_with_overrides(&text, overrides)?;
    manifest.config_path = path.map(Path::to_path_buf);
    Ok((cfg, manifest))
}

/// Fully explicit config document for `cfg` and `manifest`.
pub fn config_to_toml(cfg: &SystemConfig, manifest: &RunManifest) -> String {
    let (measurement, samples) = match cfg.measurement {
        MeasurementMode::Ideal => ("ideal", None),
        MeasurementMode::Noisy {
            samples_per_subblock,
        } => ("noisy", Some(samples_per_subblock)),
    };
    let doc = Document {
        system: SystemSection {
            macro_radius_km: Some(cfg.macro_radius),
            small_radius_km: Some(cfg.small_radius),
            min_distance_km: Some(cfg.min_distance),
            noise_power_dbm: Some(linear_to_db(cfg.noise_power)),
            target_snr_db: Some(cfg.target_snr_db),
            ip_constraint: Some(cfg.ip_constraint),
            shadow_sigma_db: Some(cfg.shadow_sigma_db),
            blocks: Some(cfg.blocks),
            subblocks: Some(cfg.subblocks),
            measurement: Some(measurement.into()),
            samples_per_subblock: samples,
            seed: Some(cfg.seed),
        },
        run: RunSection {
            experiment: Some(manifest.experiment.name().into()),
            output_dir: Some(manifest.output_dir.clone()),
            trials: Some(manifest.trials),
            execution: Some(
                match manifest.execution {
                    Execution::Parallel => "parallel",
                    Execution::Sequential => "sequential",
                }
                .into(),
            ),
            d1_grid: Some(manifest.d1_grid.clone()),
            blocks_grid: Some(manifest.blocks_grid.clone()),
            gamma_t_grid: Some(manifest.gamma_t_grid.clone()),
            gamma_t_probe_d1: Some(manifest.gamma_t_probe_d1.clone()),
            true_gamma_t_low_db: Some(manifest.true_gamma_t_db.0),
            true_gamma_t_high_db: Some(manifest.true_gamma_t_db.1),
            decide_d1: Some(manifest.decide_d1),
            decide_d0: manifest.decide_d0,
        },
    };
    toml::to_string(&doc).expect("config document is always serializable")
}

fn case_column(key: &(crate::geometry::Scenario, crate::design::CaseTag)) -> String {
    format!("case_{}_{}", key.0, key.1)
}

fn sci(v: f64) -> String {
    format!("{v:.9e}")
}

/// Write `reports` as one CSV table. Rows follow report order.
pub fn emit_report_csv(reports: &[SimReport], path: &Path) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::Empty("report list"));
    }
    let keys: std::collections::BTreeSet<_> = reports
        .iter()
        .flat_map(|r| r.case_histogram.keys().copied())
        .collect();
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend(keys.iter().map(case_column));
    w.write_record(&header).map_err(csv_err)?;
    for r in reports {
        let mut row = vec![
            sci(r.sweep.as_f64()),
            sci(r.empirical_ap),
            sci(r.stderr_ap),
            sci(r.empirical_ip),
            sci(r.stderr_ip),
            r.n_trials.to_string(),
            r.seed.to_string(),
        ];
        row.extend(
            keys.iter()
                .map(|k| r.case_histogram.get(k).copied().unwrap_or(0).to_string()),
        );
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub sweep_param: f64,
    pub empirical_ap: f64,
    pub stderr_ap: f64,
    pub empirical_ip: f64,
    pub stderr_ip: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub cases: BTreeMap<String, usize>,
}

pub fn read_report_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let bad = |what: String| Error::Parse(format!("{}: {what}", path.display()));
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.len() < CSV_HEADER.len() || header[..CSV_HEADER.len()] != CSV_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|e| bad(format!("column {}: {e}", header[i])))
        };
        let u = |i: usize| -> Result<u64> {
            rec[i]
                .parse()
                .map_err(|e| bad(format!("column {}: {e}", header[i])))
        };
        let mut cases = BTreeMap::new();
        for (i, name) in header.iter().enumerate().skip(CSV_HEADER.len()) {
            cases.insert(name.clone(), u(i)? as usize);
        }
        rows.push(CsvRow {
            sweep_param: f(0)?,
            empirical_ap: f(1)?,
            stderr_ap: f(2)?,
            empirical_ip: f(3)?,
            stderr_ip: f(4)?,
            n_trials: u(5)? as usize,
            seed: u(6)?,
            cases,
        });
    }
    Ok(rows)
}

/// Which figure a plot script renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    ApVsD1,
    IpVsD1,
    ApVsTargetSnr,
    ApVsBlocks,
}

impl FigureKind {
    fn column(self) -> &'static str {
        match self {
            FigureKind::IpVsD1 => "empirical_ip",
            _ => "empirical_ap",
        }
    }

    fn stderr_column(self) -> &'static str {
        match self {
            FigureKind::IpVsD1 => "stderr_ip",
            _ => "stderr_ap",
        }
    }

    fn labels(self) -> (&'static str, &'static str) {
        match self {
            FigureKind::ApVsD1 => ("d\u{2081} (km)", "AP"),
            FigureKind::IpVsD1 => ("d\u{2081} (km)", "IP"),
            FigureKind::ApVsTargetSnr => ("\u{03b3}_T (dB)", "AP"),
            FigureKind::ApVsBlocks => ("I", "AP"),
        }
    }

    fn slug(self) -> &'static str {
        match self {
            FigureKind::ApVsD1 => "ap",
            FigureKind::IpVsD1 => "ip",
            FigureKind::ApVsTargetSnr => "ap_vs_target_snr",
            FigureKind::ApVsBlocks => "ap_vs_blocks",
        }
    }
}

impl FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match squash(s).as_str() {
            "apvsd1" => Ok(FigureKind::ApVsD1),
            "ipvsd1" => Ok(FigureKind::IpVsD1),
            "apvstargetsnr" => Ok(FigureKind::ApVsTargetSnr),
            "apvsblocks" => Ok(FigureKind::ApVsBlocks),
            _ => Err(Error::Config(format!(
                "unknown figure kind `{s}`; expected ApVsD1, IpVsD1, ApVsTargetSnr or ApVsBlocks"
            ))),
        }
    }
}

/// Write a matplotlib script next to the first CSV that overlays every CSV
/// in `csv_paths` (all in the same directory). IP figures get a horizontal
/// line at `eta`. Returns the script path.
pub fn emit_plot_script(csv_paths: &[&Path], kind: FigureKind, eta: f64) -> Result<PathBuf> {
    let first = csv_paths.first().ok_or(Error::Empty("plot inputs"))?;
    for p in csv_paths {
        if !p.is_file() {
            return Err(Error::io(
                *p,
                std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    "CSV not found; run the experiment first to produce it",
                ),
            ));
        }
    }
    let dir = first.parent().unwrap_or(Path::new("."));
    let stem = first.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let base = stem.split('_').next().unwrap_or(stem);
    let script = dir.join(format!("{base}_{}.py", kind.slug()));
    let (xlabel, ylabel) = kind.labels();
    let names: Vec<String> = csv_paths
        .iter()
        .map(|p| {
            let name = p.file_name().and_then(|s| s.to_str()).unwrap_or_default();
            format!("    {name:?},\n")
        })
        .collect();
    let eta_line = if kind == FigureKind::IpVsD1 {
        format!("ax.axhline({eta}, color=\"k\", linestyle=\"--\", label=\"\u{03b7} = {eta}\")\n")
    } else {
        String::new()
    };
    let body = format!(
        "#!/usr/bin/env python3\n\
import csv\n\
import os\n\
\n\
import matplotlib\n\
matplotlib.use(\"Agg\")\n\
import matplotlib.pyplot as plt\n\
\n\
HERE = os.path.dirname(os.path.abspath(__file__))\n\
CSVS = [\n{files}]\n\
\n\
fig, ax = plt.subplots()\n\
for name in CSVS:\n\
    with open(os.path.join(HERE, name), newline=\"\") as fh:\n\
        rows = list(csv.DictReader(fh))\n\
    x = [float(r[\"sweep_param\"]) for r in rows]\n\
    y = [float(r[\"{col}\"]) for r in rows]\n\
    e = [float(r[\"{err}\"]) for r in rows]\n\
    ax.errorbar(x, y, yerr=e, marker=\"o\", markersize=3, capsize=2, label=os.path.splitext(name)[0])\n\
{eta_line}\
ax.set_xlabel({xlabel:?})\n\
ax.set_ylabel({ylabel:?})\n\
ax.grid(True, alpha=0.3)\n\
ax.legend()\n\
fig.tight_layout()\n\
fig.savefig(os.path.join(HERE, {png:?}), dpi=150)\n",
        files = names.concat(),
        col = kind.column(),
        err = kind.stderr_column(),
        png = format!("{base}_{}.png", kind.slug()),
    );
    fs::write(&script, body).map_err(|e| Error::io(&script, e))?;
    Ok(script)
}

/// Key/value rendering of a single design.
pub fn format_decision(d1: f64, d0: f64, decision: &ApDecision) -> String {
    let sc = decision.scenario_case;
    format!(
        "d1_km = {d1}\nd0_km = {d0}\nscenario = {}\ncase = {}\ninner_index = {:?}\nouter_index = {:?}\n\
rho_region_upper = {:e}\ns_region_km2 = {}\ns_c_km2 = {}\nrho_ap = {}\nadmitted_ip = {:e}\n",
        sc.scenario,
        sc.case,
        sc.inner,
        sc.outer,
        decision.rho_region_upper,
        decision.areas.s_region,
        decision.areas.s_c,
        decision.rho_ap,
        decision.admitted_ip(),
    )
}

/// One learning episode at `manifest.decide_d1`, with the macro user at
/// `decide_d0` or at a random drop.
pub fn single_decision(cfg: &SystemConfig, manifest: &RunManifest) -> Result<(f64, ApDecision)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d0 = match manifest.decide_d0 {
        Some(d0) => d0,
        None => {
            let (x, y) = drop_mu(&mut rng, cfg);
            x.hypot(y)
        }
    };
    let geom = LinkGeometry::new(d0, manifest.decide_d1, cfg.min_distance)?;
    let samples = SnrSampleSet::new(observe_snr_samples(cfg, &geom, &mut rng))?;
    Ok((d0, design_ap(&samples, manifest.decide_d1, cfg)?))
}

fn fmt_grid_label(v: f64) -> String {
    let s = format!("{v}");
    s.replace('.', "p").replace('-', "m")
}

/// Run `manifest.experiment`, writing every artifact under
/// `manifest.output_dir`. Returns the written paths.
pub fn run_experiment(cfg: &SystemConfig, manifest: &RunManifest) -> Result<Vec<PathBuf>> {
    let out = &manifest.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let opts = manifest.sim_options();
    let name = manifest.experiment.name();
    let mut written = Vec::new();
    let write_csv =
        |file: String, reports: &[SimReport], written: &mut Vec<PathBuf>| -> Result<PathBuf> {
            let p = out.join(file);
            emit_report_csv(reports, &p)?;
            written.push(p.clone());
            Ok(p)
        };
    let d1_sweep = Sweep::D1(manifest.d1_grid.clone());
    match manifest.experiment {
        Experiment::ApIpVsD1 => {
            let proposed = write_csv(
                format!("{name}.csv"),
                &run_sweep(cfg, &d1_sweep, &opts)?,
                &mut written,
            )?;
            let sli_opts = SimOptions {
                policy: AccessPolicy::StatisticalPrior,
                ..opts.clone()
            };
            let sli = write_csv(
                format!("{name}_sli.csv"),
                &run_sweep(cfg, &d1_sweep, &sli_opts)?,
                &mut written,
            )?;
            let both = [proposed.as_path(), sli.as_path()];
            written.push(emit_plot_script(
                &both,
                FigureKind::ApVsD1,
                cfg.ip_constraint,
            )?);
            written.push(emit_plot_script(
                &both,
                FigureKind::IpVsD1,
                cfg.ip_constraint,
            )?);
        }
        Experiment::ApIpVsBlocks => {
            let mut paths = Vec::new();
            for &blocks in &manifest.blocks_grid {
                let point = SystemConfig {
                    blocks,
                    ..cfg.clone()
                };
                let reports = run_sweep(&point, &d1_sweep, &opts)?;
                paths.push(write_csv(
                    format!("{name}_I{blocks}.csv"),
                    &reports,
                    &mut written,
                )?);
            }
            let refs: Vec<&Path> = paths.iter().map(PathBuf::as_path).collect();
            written.push(emit_plot_script(
                &refs,
                FigureKind::ApVsD1,
                cfg.ip_constraint,
            )?);
            written.push(emit_plot_script(
                &refs,
                FigureKind::IpVsD1,
                cfg.ip_constraint,
            )?);
        }
        Experiment::ApVsTargetSnr => {
            let mut paths = Vec::new();
            for &d1 in &manifest.gamma_t_probe_d1 {
                let sweep = Sweep::TargetSnr {
                    d1,
                    target_snr_db: manifest.gamma_t_grid.clone(),
                };
                let reports = run_sweep(cfg, &sweep, &opts)?;
                paths.push(write_csv(
                    format!("{name}_d1_{}.csv", fmt_grid_label(d1)),
                    &reports,
                    &mut written,
                )?);
            }
            let refs: Vec<&Path> = paths.iter().map(PathBuf::as_path).collect();
            written.push(emit_plot_script(
                &refs,
                FigureKind::ApVsTargetSnr,
                cfg.ip_constraint,
            )?);
        }
        Experiment::ImperfectGammaT => {
            let perfect = write_csv(
                format!("{name}_perfect.csv"),
                &run_sweep(cfg, &d1_sweep, &opts)?,
                &mut written,
            )?;
            let (lo, hi) = manifest.true_gamma_t_db;
            let reports = run_imperfect_gamma_t_sweep(cfg, &manifest.d1_grid, &opts, lo, hi)?;
            let imperfect = write_csv(format!("{name}_imperfect.csv"), &reports, &mut written)?;
            let both = [perfect.as_path(), imperfect.as_path()];
            written.push(emit_plot_script(
                &both,
                FigureKind::ApVsD1,
                cfg.ip_constraint,
            )?);
            written.push(emit_plot_script(
                &both,
                FigureKind::IpVsD1,
                cfg.ip_constraint,
            )?);
        }
        Experiment::SingleDecision => {
            let (d0, decision) = single_decision(cfg, manifest)?;
            let p = out.join(format!("{name}.txt"));
            fs::write(&p, format_decision(manifest.decide_d1, d0, &decision))
                .map_err(|e| Error::io(&p, e))?;
            written.push(p);
        }
    }
    Ok(written)
}
