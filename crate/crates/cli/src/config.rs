//! Experiment configuration files.
//!
//! A config is a JSON document with a top-level `schema` version and one
//! `experiment` object tagged by `kind`. Unknown keys are rejected.

use std::path::Path;

use atomchain::protocols::{BondShape, FieldShape, ZoneProfile};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema version {found}, expected {SCHEMA_VERSION}")]
    Schema { found: u32 },
    #[error("config does not describe a `{expected}` experiment (found `{found}`)")]
    KindMismatch { expected: String, found: String },
    #[error("invalid config: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub experiment: Experiment,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum(SpectrumConfig),
    Quench(QuenchConfig),
    SweepT(SweepTConfig),
    SweepWidth(WidthSweepConfig),
    Gate(GateConfig),
    OracleCompare(OracleCompareConfig),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Spectrum(_) => "spectrum",
            Experiment::Quench(_) => "quench",
            Experiment::SweepT(_) => "sweep-t",
            Experiment::SweepWidth(_) => "sweep-width",
            Experiment::Gate(_) => "gate",
            Experiment::OracleCompare(_) => "oracle-compare",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "path", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumConfig {
    /// Quasiparticle energies against `Jx / |W|`.
    Homogeneous {
        sites: usize,
        w: f64,
        ratio_from: f64,
        ratio_to: f64,
        points: usize,
    },
    /// Lowest exact eigenenergies along a beam-splitter sweep.
    BeamSplitter {
        sites: usize,
        zone: ZoneSpec,
        points: usize,
        levels: usize,
    },
}

/// Zone parameters; `speed` is in units of `lambda |w0|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneSpec {
    #[serde(default = "default_w0")]
    pub w0: f64,
    pub width: f64,
    #[serde(default = "default_speed")]
    pub speed: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "default_jx0")]
    pub jx0: f64,
    #[serde(default = "default_bond_shape")]
    pub shape_w: BondShape,
    #[serde(default = "default_field_shape")]
    pub shape_j: FieldShape,
}

impl ZoneSpec {
    /// `width` is in units of `lambda`.
    pub fn profile(&self) -> ZoneProfile {
        let mut zone = ZoneProfile::new(
            self.w0,
            self.width * self.lambda,
            self.speed,
            self.lambda,
            self.jx0,
        );
        zone.shape_w = self.shape_w;
        zone.shape_j = self.shape_j;
        zone
    }

    fn check(&self, errs: &mut Vec<String>) {
        finite(errs, "zone.w0", self.w0);
        if self.w0 == 0.0 {
            errs.push("zone.w0 must be nonzero".into());
        }
        positive(errs, "zone.width", self.width);
        positive(errs, "zone.speed", self.speed);
        positive(errs, "zone.lambda", self.lambda);
        positive(errs, "zone.jx0", self.jx0);
    }
}

fn default_w0() -> f64 {
    -1.0
}
fn default_speed() -> f64 {
    0.01
}
fn one() -> f64 {
    1.0
}
fn default_jx0() -> f64 {
    2.0
}
fn default_bond_shape() -> BondShape {
    BondShape::Gaussian
}
fn default_field_shape() -> FieldShape {
    FieldShape::Smoothstep
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchConfig {
    pub sites: usize,
    #[serde(default = "default_w")]
    pub w: f64,
    #[serde(default = "default_jx_start")]
    pub jx_start: f64,
    #[serde(default)]
    pub jx_end: f64,
    /// Ramp duration; `KAPPA N^2 / |W|` when absent.
    #[serde(default)]
    pub duration: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Adds the state-vector fidelity column; defaults to on for N <= 8.
    #[serde(default)]
    pub oracle: Option<bool>,
}

fn default_w() -> f64 {
    -1.0
}
fn default_jx_start() -> f64 {
    5.0
}
fn default_samples() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTConfig {
    pub sizes: Vec<usize>,
    #[serde(default = "default_w")]
    pub w: f64,
    #[serde(default = "default_jx_start")]
    pub jx_start: f64,
    #[serde(default)]
    pub jx_end: f64,
    #[serde(default = "default_target")]
    pub target: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_target() -> f64 {
    0.95
}
fn default_t_max() -> f64 {
    1e5
}
fn default_scan_points() -> usize {
    48
}
fn default_rel_tol() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthSweepConfig {
    /// Zone widths in units of `lambda`.
    pub widths: Vec<f64>,
    pub sizes: Vec<usize>,
    #[serde(default = "default_w0")]
    pub w0: f64,
    #[serde(default = "default_speed")]
    pub speed: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "default_jx0")]
    pub jx0: f64,
    #[serde(default = "default_bond_shape")]
    pub shape_w: BondShape,
    #[serde(default = "default_field_shape")]
    pub shape_j: FieldShape,
}

impl WidthSweepConfig {
    pub fn zone(&self, width: f64) -> ZoneSpec {
        ZoneSpec {
            w0: self.w0,
            width,
            speed: self.speed,
            lambda: self.lambda,
            jx0: self.jx0,
            shape_w: self.shape_w,
            shape_j: self.shape_j,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GateConfig {
    Hadamard {
        sites: usize,
        #[serde(default = "one")]
        w: f64,
        #[serde(default = "default_jx_max")]
        jx_max: f64,
        jz_hold: f64,
        /// Fixed leg durations; when absent the legs are doubled from
        /// `leg_start` until both fidelities reach `target`.
        #[serde(default)]
        legs: Option<[f64; 4]>,
        #[serde(default = "default_leg_start")]
        leg_start: f64,
        #[serde(default = "default_gate_target")]
        target: f64,
        #[serde(default = "default_doublings")]
        max_doublings: usize,
        #[serde(default = "default_levels")]
        levels: usize,
        #[serde(default = "default_level_points")]
        level_points: usize,
    },
    Staggered {
        sites: usize,
        #[serde(default = "one")]
        w: f64,
        jz: f64,
        tau: f64,
    },
    Phase {
        sites: usize,
        #[serde(default = "one")]
        w: f64,
        w_prime: f64,
        tau2: f64,
        /// Runs the two-chain state-vector check when `2N` fits the oracle.
        #[serde(default = "yes")]
        check: bool,
    },
}

fn default_jx_max() -> f64 {
    2.0
}
fn default_leg_start() -> f64 {
    10.0
}
fn default_gate_target() -> f64 {
    0.99
}
fn default_doublings() -> usize {
    6
}
fn default_levels() -> usize {
    4
}
fn default_level_points() -> usize {
    50
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCompareConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "two")]
    pub min_sites: usize,
    #[serde(default = "eight")]
    pub max_sites: usize,
    #[serde(default = "three")]
    pub max_segments: usize,
    /// Probability that a schedule starts from the gapless `Jx = 0` frame;
    /// such schedules are reported as skipped.
    #[serde(default)]
    pub degenerate_fraction: f64,
}

fn default_count() -> usize {
    50
}
fn two() -> usize {
    2
}
fn eight() -> usize {
    8
}
fn three() -> usize {
    3
}

fn finite(errs: &mut Vec<String>, name: &str, v: f64) {
    if !v.is_finite() {
        errs.push(format!("{name} must be finite, got {v}"));
    }
}

fn positive(errs: &mut Vec<String>, name: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        errs.push(format!("{name} must be positive, got {v}"));
    }
}

fn sites_in(errs: &mut Vec<String>, name: &str, n: usize, lo: usize, hi: usize) {
    if n < lo || n > hi {
        errs.push(format!("{name} must lie in [{lo}, {hi}], got {n}"));
    }
}

fn unit_open(errs: &mut Vec<String>, name: &str, v: f64) {
    if !(v > 0.0 && v < 1.0) {
        errs.push(format!("{name} must lie in (0, 1), got {v}"));
    }
}

const MAX_GAUSSIAN_SITES: usize = 2000;
const MAX_ORACLE_SITES: usize = atomchain::exact::DEFAULT_MAX_SITES;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Range-checks every field; all problems are reported at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ConfigError::Schema { found: self.schema });
        }
        let mut errs = Vec::new();
        unit_open(&mut errs, "tol", self.tol);
        if self.workers == Some(0) {
            errs.push("workers must be at least 1".into());
        }
        match &self.experiment {
            Experiment::Spectrum(SpectrumConfig::Homogeneous {
                sites,
                w,
                ratio_from,
                ratio_to,
                points,
            }) => {
                sites_in(&mut errs, "sites", *sites, 2, MAX_GAUSSIAN_SITES);
                positive(&mut errs, "|w|", w.abs());
                finite(&mut errs, "ratio_from", *ratio_from);
                finite(&mut errs, "ratio_to", *ratio_to);
                if *points < 1 {
                    errs.push("points must be at least 1".into());
                }
            }
            Experiment::Spectrum(SpectrumConfig::BeamSplitter {
                sites,
                zone,
                points,
                levels,
            }) => {
                sites_in(&mut errs, "sites", *sites, 2, MAX_ORACLE_SITES);
                zone.check(&mut errs);
                if *points < 2 {
                    errs.push("points must be at least 2".into());
                }
                if *levels < 1 || *levels > 1 << (*sites).min(MAX_ORACLE_SITES) {
                    errs.push(format!("levels must lie in [1, 2^sites], got {levels}"));
                }
            }
            Experiment::Quench(q) => {
                sites_in(&mut errs, "sites", q.sites, 2, MAX_GAUSSIAN_SITES);
                positive(&mut errs, "|w|", q.w.abs());
                finite(&mut errs, "jx_start", q.jx_start);
                finite(&mut errs, "jx_end", q.jx_end);
                if let Some(t) = q.duration {
                    if !(t >= 0.0 && t.is_finite()) {
                        errs.push(format!("duration must be >= 0, got {t}"));
                    }
                }
                if q.samples < 1 {
                    errs.push("samples must be at least 1".into());
                }
                if q.oracle == Some(true) && q.sites > MAX_ORACLE_SITES {
                    errs.push(format!("oracle column needs sites <= {MAX_ORACLE_SITES}"));
                }
            }
            Experiment::SweepT(s) => {
                if s.sizes.is_empty() {
                    errs.push("sizes must not be empty".into());
                }
                for &n in &s.sizes {
                    sites_in(&mut errs, "sizes[]", n, 2, MAX_GAUSSIAN_SITES);
                }
                positive(&mut errs, "|w|", s.w.abs());
                finite(&mut errs, "jx_start", s.jx_start);
                finite(&mut errs, "jx_end", s.jx_end);
                unit_open(&mut errs, "target", s.target);
                positive(&mut errs, "t_max", s.t_max);
                if s.scan_points < 4 {
                    errs.push("scan_points must be at least 4".into());
                }
                unit_open(&mut errs, "rel_tol", s.rel_tol);
            }
            Experiment::SweepWidth(s) => {
                if s.widths.is_empty() || s.sizes.is_empty() {
                    errs.push("widths and sizes must not be empty".into());
                }
                for &w in &s.widths {
                    positive(&mut errs, "widths[]", w);
                }
                for &n in &s.sizes {
                    sites_in(&mut errs, "sizes[]", n, 2, MAX_GAUSSIAN_SITES);
                }
                s.zone(1.0).check(&mut errs);
            }
            Experiment::Gate(GateConfig::Hadamard {
                sites,
                w,
                jx_max,
                jz_hold,
                legs,
                leg_start,
                target,
                levels,
                level_points,
                ..
            }) => {
                sites_in(&mut errs, "sites", *sites, 2, MAX_ORACLE_SITES);
                positive(&mut errs, "w", *w);
                positive(&mut errs, "jx_max", *jx_max);
                finite(&mut errs, "jz_hold", *jz_hold);
                if let Some(legs) = legs {
                    for &d in legs {
                        positive(&mut errs, "legs[]", d);
                    }
                }
                positive(&mut errs, "leg_start", *leg_start);
                unit_open(&mut errs, "target", *target);
                if *levels < 2 {
                    errs.push("levels must be at least 2".into());
                }
                if *level_points < 2 {
                    errs.push("level_points must be at least 2".into());
                }
            }
            Experiment::Gate(GateConfig::Staggered { sites, w, jz, tau }) => {
                sites_in(&mut errs, "sites", *sites, 2, MAX_ORACLE_SITES);
                positive(&mut errs, "w", *w);
                finite(&mut errs, "jz", *jz);
                positive(&mut errs, "tau", *tau);
            }
            Experiment::Gate(GateConfig::Phase {
                sites,
                w,
                w_prime,
                tau2,
                ..
            }) => {
                sites_in(&mut errs, "sites", *sites, 2, MAX_GAUSSIAN_SITES);
                positive(&mut errs, "w", *w);
                finite(&mut errs, "w_prime", *w_prime);
                if !(*tau2 >= 0.0 && tau2.is_finite()) {
                    errs.push(format!("tau2 must be >= 0, got {tau2}"));
                }
            }
            Experiment::OracleCompare(o) => {
                if o.count < 1 {
                    errs.push("count must be at least 1".into());
                }
                sites_in(&mut errs, "min_sites", o.min_sites, 2, 8);
                sites_in(&mut errs, "max_sites", o.max_sites, o.min_sites.max(2), 8);
                if o.max_segments < 1 {
                    errs.push("max_segments must be at least 1".into());
                }
                if !(0.0..=1.0).contains(&o.degenerate_fraction) {
                    errs.push(format!(
                        "degenerate_fraction must lie in [0, 1], got {}",
                        o.degenerate_fraction
                    ));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errs))
        }
    }

    pub fn expect_kind(&self, kind: &str) -> Result<(), ConfigError> {
        if self.experiment.kind() == kind {
            Ok(())
        } else {
            Err(ConfigError::KindMismatch {
                expected: kind.into(),
                found: self.experiment.kind().into(),
            })
        }
    }
}
