//! Chain configuration, coupling frames and time-dependent schedules.
//!
//! Units are dimensionless (hbar = 1). A [`Schedule`] is an ordered list of
//! [`Segment`]s; each segment is closed on the left and open on the right,
//! except that `t = T` evaluates the end point of the final segment.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::ZoneProfile;

/// Sign of the nearest-neighbour coupling `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionSign {
    /// `W <= 0`: aligned neighbours are favoured (GHZ protocols).
    Ferromagnetic,
    /// `W >= 0`: alternating neighbours are favoured (Neel qubit protocols).
    Antiferromagnetic,
}

impl InteractionSign {
    pub fn of(w: f64) -> Self {
        if w < 0.0 {
            InteractionSign::Ferromagnetic
        } else {
            InteractionSign::Antiferromagnetic
        }
    }

    /// True if a bond value is compatible with this sign (zero always is).
    pub fn admits(self, w: f64) -> bool {
        match self {
            InteractionSign::Ferromagnetic => w <= 0.0,
            InteractionSign::Antiferromagnetic => w >= 0.0,
        }
    }
}

/// A chain of `sites` spins with free ends. Occupancy is fixed at one atom
/// per site, so the only degree of freedom per site is the two-mode spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub sites: usize,
    pub sign: InteractionSign,
}

impl ChainConfig {
    pub fn new(sites: usize, sign: InteractionSign) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidConfig(format!(
                "chain needs at least 2 sites, got {sites}"
            )));
        }
        Ok(Self { sites, sign })
    }

    pub fn ferromagnetic(sites: usize) -> Result<Self> {
        Self::new(sites, InteractionSign::Ferromagnetic)
    }

    pub fn antiferromagnetic(sites: usize) -> Result<Self> {
        Self::new(sites, InteractionSign::Antiferromagnetic)
    }
}

/// Instantaneous couplings of an `N`-site chain.
///
/// `jx` and `jz` hold one entry per site, `w` one entry per bond `(l, l+1)`.
/// The transverse component `J^y` is identically zero and not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingFrame {
    pub jx: Vec<f64>,
    pub jz: Vec<f64>,
    pub w: Vec<f64>,
    #[serde(default)]
    pub t: f64,
}

impl CouplingFrame {
    /// Builds a frame from explicit arrays, checking their lengths and
    /// finiteness.
    pub fn new(jx: Vec<f64>, jz: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let frame = Self { jx, jz, w, t: 0.0 };
        frame.check()?;
        Ok(frame)
    }

    /// Site-homogeneous frame with `Jz = 0`.
    pub fn homogeneous(sites: usize, jx: f64, w: f64) -> Self {
        Self {
            jx: vec![jx; sites],
            jz: vec![0.0; sites],
            w: vec![w; sites.saturating_sub(1)],
            t: 0.0,
        }
    }

    pub fn zeros(sites: usize) -> Self {
        Self::homogeneous(sites, 0.0, 0.0)
    }

    /// Same frame with a uniform longitudinal field.
    pub fn with_uniform_jz(mut self, jz: f64) -> Self {
        self.jz.iter_mut().for_each(|v| *v = jz);
        self
    }

    /// Same frame with the staggered field `Jz_l = jz * (-1)^l`, sites
    /// numbered from 1.
    pub fn with_staggered_jz(mut self, jz: f64) -> Self {
        for (i, v) in self.jz.iter_mut().enumerate() {
            *v = if i % 2 == 0 { -jz } else { jz };
        }
        self
    }

    pub fn sites(&self) -> usize {
        self.jx.len()
    }

    /// Checks array lengths (N, N, N-1) and finiteness.
    pub fn check(&self) -> Result<()> {
        let n = self.jx.len();
        if n < 2 {
            return Err(Error::InvalidConfig(format!(
                "frame needs at least 2 sites, got {n}"
            )));
        }
        if self.jz.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.jz.len(),
            });
        }
        if self.w.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                got: self.w.len(),
            });
        }
        if !self.values().all(f64::is_finite) {
            return Err(Error::InvalidParameter {
                name: "frame",
                reason: "non-finite coupling".into(),
            });
        }
        Ok(())
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.jx
            .iter()
            .chain(self.jz.iter())
            .chain(self.w.iter())
            .copied()
    }

    /// First site with a nonzero longitudinal field, if any.
    pub fn first_jz_violation(&self) -> Option<(usize, f64)> {
        self.jz
            .iter()
            .copied()
            .enumerate()
            .find(|&(_, v)| v != 0.0)
    }

    pub fn is_fermionizable(&self) -> bool {
        self.first_jz_violation().is_none()
    }

    /// Returns `(jx, w)` if every site and every bond carries the same value.
    pub fn homogeneous_values(&self) -> Option<(f64, f64)> {
        let jx = *self.jx.first()?;
        let w = self.w.first().copied().unwrap_or(0.0);
        let same = |xs: &[f64], v: f64| xs.iter().all(|&x| x == v);
        if same(&self.jx, jx) && same(&self.w, w) {
            Some((jx, w))
        } else {
            None
        }
    }

    /// Largest absolute coupling, used as the energy scale of the frame.
    pub fn scale(&self) -> f64 {
        self.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Componentwise linear combination `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &CouplingFrame, b: f64) -> CouplingFrame {
        let mix = |x: &[f64], y: &[f64]| -> Vec<f64> {
            x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
        };
        CouplingFrame {
            jx: mix(&self.jx, &other.jx),
            jz: mix(&self.jz, &other.jz),
            w: mix(&self.w, &other.w),
            t: a * self.t + b * other.t,
        }
    }

    pub fn negated(&self) -> CouplingFrame {
        self.combine(-1.0, self, 0.0)
    }

    /// Largest componentwise difference to another frame of the same shape.
    pub fn max_abs_diff(&self, other: &CouplingFrame) -> f64 {
        self.values()
            .zip(other.values())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// One piece of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Segment {
    /// Fixed couplings.
    Constant { duration: f64, frame: CouplingFrame },
    /// Componentwise linear interpolation between two frames.
    LinearRamp {
        duration: f64,
        from: CouplingFrame,
        to: CouplingFrame,
    },
    /// A string moving through a spatially localised interaction zone.
    /// `t_offset` is the zone-clock time at the start of the segment.
    MovingZone {
        duration: f64,
        zone: ZoneProfile,
        #[serde(default)]
        t_offset: f64,
    },
    /// `Jx = 0`, uniform bond `w`, and `Jz_l = jz * (-1)^l`.
    StaggeredOffset { duration: f64, w: f64, jz: f64 },
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match self {
            Segment::Constant { duration, .. }
            | Segment::LinearRamp { duration, .. }
            | Segment::MovingZone { duration, .. }
            | Segment::StaggeredOffset { duration, .. } => *duration,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Segment::Constant { .. } => "constant",
            Segment::LinearRamp { .. } => "linear-ramp",
            Segment::MovingZone { .. } => "moving-zone",
            Segment::StaggeredOffset { .. } => "staggered-offset",
        }
    }

    /// Couplings at local time `tau` in `[0, duration]`.
    fn frame_at(&self, sites: usize, tau: f64) -> CouplingFrame {
        match self {
            Segment::Constant { frame, .. } => frame.clone(),
            Segment::LinearRamp { duration, from, to } => {
                let s = if *duration > 0.0 { tau / duration } else { 1.0 };
                from.combine(1.0 - s, to, s)
            }
            Segment::MovingZone { zone, t_offset, .. } => zone.frame_at(sites, t_offset + tau),
            Segment::StaggeredOffset { w, jz, .. } => {
                CouplingFrame::homogeneous(sites, 0.0, *w).with_staggered_jz(*jz)
            }
        }
    }

    /// Frames that bound every value the segment can take. Ramps are convex
    /// combinations of their end points; a moving zone is bounded by its
    /// peak couplings.
    fn extreme_frames(&self, sites: usize) -> Vec<CouplingFrame> {
        match self {
            Segment::Constant { frame, .. } => vec![frame.clone()],
            Segment::LinearRamp { from, to, .. } => vec![from.clone(), to.clone()],
            Segment::MovingZone { duration, zone, .. } => vec![
                self.frame_at(sites, 0.0),
                self.frame_at(sites, *duration),
                zone.envelope_frame(sites),
            ],
            Segment::StaggeredOffset { .. } => vec![self.frame_at(sites, 0.0)],
        }
    }
}

/// Time-dependent coupling program on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub config: ChainConfig,
    pub segments: Vec<Segment>,
    /// Promise that `Jz` vanishes at all times, so the free-fermion engine
    /// applies. Checked by [`validate`].
    pub fermionizable: bool,
    /// Evaluate as `-H(T - t)`: the inverse evolution of the forward program.
    #[serde(default)]
    pub reversed: bool,
}

impl Schedule {
    pub fn new(config: ChainConfig, segments: Vec<Segment>, fermionizable: bool) -> Self {
        Self {
            config,
            segments,
            fermionizable,
            reversed: false,
        }
    }

    pub fn sites(&self) -> usize {
        self.config.sites
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    /// Segment boundaries `[0, t_1, ..., T]` in schedule time.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut acc = 0.0;
        out.push(acc);
        let durations: Vec<f64> = if self.reversed {
            self.segments.iter().rev().map(Segment::duration).collect()
        } else {
            self.segments.iter().map(Segment::duration).collect()
        };
        for d in durations {
            acc += d;
            out.push(acc);
        }
        out
    }

    /// The schedule that undoes this one: evaluating it forward from 0 to T
    /// applies `-H(T - t)`.
    pub fn time_reversed(&self) -> Schedule {
        Schedule {
            reversed: !self.reversed,
            ..self.clone()
        }
    }

    /// Couplings at time `t`.
    pub fn eval_frame(&self, t: f64) -> Result<CouplingFrame> {
        let total = self.total_duration();
        if !(0.0..=total).contains(&t) || self.segments.is_empty() {
            return Err(Error::OutOfRange { t, total });
        }
        let mut frame = if self.reversed {
            self.forward_frame(total - t, total).negated()
        } else {
            self.forward_frame(t, total)
        };
        frame.t = t;
        Ok(frame)
    }

    fn forward_frame(&self, t: f64, total: f64) -> CouplingFrame {
        let n = self.sites();
        let mut start = 0.0;
        for seg in &self.segments {
            let end = start + seg.duration();
            if t < end {
                return seg.frame_at(n, t - start);
            }
            start = end;
        }
        // t == T (or rounding just past the last boundary)
        let last = self.segments.last().expect("non-empty schedule");
        let tau = (t - (total - last.duration())).clamp(0.0, last.duration());
        last.frame_at(n, tau)
    }

    /// Largest coupling magnitude reached over the schedule, a bound for
    /// the operator norm used in step-size selection.
    pub fn coupling_scale(&self) -> f64 {
        let n = self.sites();
        self.segments
            .iter()
            .flat_map(|s| s.extreme_frames(n))
            .map(|f| f.scale())
            .fold(0.0, f64::max)
    }
}

/// What a [`Diagnostic`] complains about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    EmptySchedule,
    NonpositiveDuration,
    ShapeMismatch,
    NonFinite,
    FermionizableViolated,
    SignMismatch,
    InvalidZone,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagnosticKind::EmptySchedule => "empty schedule",
            DiagnosticKind::NonpositiveDuration => "nonpositive duration",
            DiagnosticKind::ShapeMismatch => "shape mismatch",
            DiagnosticKind::NonFinite => "non-finite value",
            DiagnosticKind::FermionizableViolated => "fermionizable violated",
            DiagnosticKind::SignMismatch => "interaction sign mismatch",
            DiagnosticKind::InvalidZone => "invalid zone profile",
        };
        f.write_str(s)
    }
}

/// A violated schedule invariant, located by segment index.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub segment: Option<usize>,
    pub kind: DiagnosticKind,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.segment {
            Some(i) => write!(f, "segment {i}: {}: {}", self.kind, self.detail),
            None => write!(f, "{}: {}", self.kind, self.detail),
        }
    }
}

/// Checks every schedule invariant; an empty result means the schedule is
/// well formed.
pub fn validate(schedule: &Schedule) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = schedule.sites();
    let mut push = |segment, kind, detail: String| {
        out.push(Diagnostic {
            segment,
            kind,
            detail,
        })
    };

    if n < 2 {
        push(None, DiagnosticKind::ShapeMismatch, format!("{n} sites"));
        return out;
    }
    if schedule.segments.is_empty() {
        push(None, DiagnosticKind::EmptySchedule, "no segments".into());
    }

    for (i, seg) in schedule.segments.iter().enumerate() {
        let d = seg.duration();
        if !d.is_finite() {
            push(Some(i), DiagnosticKind::NonFinite, format!("duration {d}"));
        } else if d <= 0.0 {
            push(
                Some(i),
                DiagnosticKind::NonpositiveDuration,
                format!("{} segment has duration {d}", seg.label()),
            );
        }

        if let Segment::MovingZone { zone, t_offset, .. } = seg {
            if let Err(e) = zone.check() {
                push(Some(i), DiagnosticKind::InvalidZone, e.to_string());
                continue;
            }
            if !t_offset.is_finite() {
                push(Some(i), DiagnosticKind::NonFinite, "t_offset".into());
            }
        }

        for frame in seg.extreme_frames(n) {
            if frame.jx.len() != n || frame.jz.len() != n || frame.w.len() != n - 1 {
                push(
                    Some(i),
                    DiagnosticKind::ShapeMismatch,
                    format!(
                        "expected lengths ({n}, {n}, {}), got ({}, {}, {})",
                        n - 1,
                        frame.jx.len(),
                        frame.jz.len(),
                        frame.w.len()
                    ),
                );
                continue;
            }
            if !frame.values().all(f64::is_finite) {
                push(Some(i), DiagnosticKind::NonFinite, "coupling".into());
            }
            if schedule.fermionizable {
                if let Some((site, v)) = frame.first_jz_violation() {
                    push(
                        Some(i),
                        DiagnosticKind::FermionizableViolated,
                        format!("Jz[{site}] = {v}"),
                    );
                }
            }
            if let Some(&bad) = frame.w.iter().find(|&&w| !schedule.config.sign.admits(w)) {
                push(
                    Some(i),
                    DiagnosticKind::SignMismatch,
                    format!("W = {bad} under {:?} configuration", schedule.config.sign),
                );
            }
        }
    }
    out.dedup();
    out
}
