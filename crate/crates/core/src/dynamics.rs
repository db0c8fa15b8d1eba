//! Gaussian-state dynamics under the Majorana generator.
//!
//! The Heisenberg-picture Majoranas evolve as `a(t) = O(t) a(0)` with
//! `dO/dt = A(t) O`, so `Gamma(t) = O Gamma(0) O^T`. `O` is integrated with
//! the commutator-free Magnus step from [`crate::stepping`]; each exponential
//! `exp(tau A)` is split into the onsite and bond parts of `A`, both of which
//! are sets of disjoint 2x2 rotations, and recombined with the fourth-order
//! Suzuki composition. Every step is therefore exactly orthogonal; the rows
//! are re-orthonormalized periodically to remove rounding drift.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fermion::{build_majorana_matrix, mode_basis, MajoranaMatrix, ModeBasis};
use crate::linalg::{antisymmetry_defect, orthogonality_defect, orthonormalize_rows, pfaffian};
use crate::model::{CouplingFrame, Schedule};
use crate::stepping::{for_each_step, step_length};

/// `Gamma Gamma^T = PURITY_SCALE^2 * I` for pure states.
pub const PURITY_SCALE: f64 = 1.0;

/// Purity tolerance for parity extraction.
pub const PURITY_TOL: f64 = 1e-8;

/// Steps between row re-orthonormalizations of the propagator.
pub const REORTH_INTERVAL: u64 = 256;

const STEP_SCALE: f64 = 25.0;

// fourth-order Suzuki composition of Strang steps
const SUZUKI_P: f64 = 0.414_490_771_794_375_7; // 1 / (4 - 4^(1/3))

/// Majorana two-point matrix `Gamma_jk = (i/2) <[a_j, a_k]>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub gamma: DMatrix<f64>,
    pub t: f64,
}

impl CovarianceMatrix {
    pub fn new(gamma: DMatrix<f64>, t: f64) -> Result<Self> {
        if gamma.nrows() != gamma.ncols() || gamma.nrows() % 2 == 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (gamma.nrows() / 2),
                got: gamma.ncols(),
            });
        }
        let defect = antisymmetry_defect(&gamma);
        if defect > 1e-10 {
            return Err(Error::Numerical(format!(
                "covariance is not antisymmetric: |G + G^T| = {defect:e}"
            )));
        }
        Ok(Self { gamma, t })
    }

    pub fn sites(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        antisymmetry_defect(&self.gamma)
    }

    /// Largest entry of `|G G^T - s^2 I|`.
    pub fn purity_defect(&self) -> f64 {
        orthogonality_defect(&self.gamma, PURITY_SCALE)
    }

    /// `<H> = (1/4) sum_jk A_jk Gamma_jk`.
    pub fn energy(&self, m: &MajoranaMatrix) -> f64 {
        0.25 * m.a.component_mul(&self.gamma).sum()
    }

    /// Applies a particle-hole flip to the listed normal modes of `basis`.
    pub fn with_modes_flipped(&self, basis: &ModeBasis, modes: &[usize]) -> CovarianceMatrix {
        let dim = self.gamma.nrows();
        let mut d = DMatrix::<f64>::identity(dim, dim);
        for &k in modes {
            d[(2 * k + 1, 2 * k + 1)] = -1.0;
        }
        let r = basis.q.transpose() * d * &basis.q;
        CovarianceMatrix {
            gamma: &r * &self.gamma * r.transpose(),
            t: self.t,
        }
    }

    /// Covariance expressed in the normal-mode Majoranas of `basis`.
    fn in_basis(&self, basis: &ModeBasis) -> DMatrix<f64> {
        &basis.q * &self.gamma * basis.q.transpose()
    }
}

/// Mode occupations in the eigenbasis of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOccupations {
    pub n: Vec<f64>,
    pub a1: f64,
}

/// First two moments of the total excitation number, plus mode occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationMoments {
    pub a1: f64,
    pub a2: f64,
    pub n: Vec<f64>,
}

/// Lower and upper fidelity bounds, reported unclamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityBounds {
    pub f1: f64,
    pub f2: f64,
}

impl FidelityBounds {
    /// The bounds left `[0, 1]`: the state is far from adiabatic (or the
    /// integrator is off) and the bounds carry little information.
    pub fn flag(&self) -> QualityFlag {
        if self.f1 < 0.0 {
            QualityFlag::NegativeLowerBound
        } else if self.f2 > 1.0 {
            QualityFlag::UpperBoundAboveOne
        } else {
            QualityFlag::Ok
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QualityFlag {
    Ok,
    NegativeLowerBound,
    UpperBoundAboveOne,
}

impl QualityFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            QualityFlag::Ok => "ok",
            QualityFlag::NegativeLowerBound => "f1-negative",
            QualityFlag::UpperBoundAboveOne => "f2-above-one",
        }
    }
}

/// Fermion parity `<prod_l X_l>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

/// Orthogonal propagator `O(t)` with `a(t) = O a(t0)`, stored row-major.
#[derive(Debug, Clone)]
pub struct GaussianPropagator {
    dim: usize,
    data: Vec<f64>,
    pub steps: u64,
}

impl GaussianPropagator {
    pub fn identity(sites: usize) -> Self {
        let dim = 2 * sites;
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self {
            dim,
            data,
            steps: 0,
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    /// Advances from `t0` to `t1` with steps of at most `h_max`.
    pub fn advance(&mut self, schedule: &Schedule, t0: f64, t1: f64, h_max: f64) -> Result<()> {
        if schedule.sites() * 2 != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim / 2,
                got: schedule.sites(),
            });
        }
        let mut angles_a = vec![0.0; self.dim / 2];
        let mut angles_b = vec![0.0; self.dim / 2 - 1];
        let mut pending = vec![0.0; self.dim / 2];
        for_each_step(schedule, t0, t1, h_max, |step| {
            for frame in [&step.first, &step.second] {
                if let Some((site, value)) = frame.first_jz_violation() {
                    return Err(Error::NotFermionizable { site, value });
                }
            }
            // exp(tau A(first)) then exp(tau A(second)); A layers commute
            // with each other, so adjacent ones are merged
            pending.iter_mut().for_each(|v| *v = 0.0);
            for frame in [&step.first, &step.second] {
                for (k, c) in suzuki_sequence().into_iter().enumerate() {
                    let tau = c * step.h;
                    if k % 2 == 0 {
                        for (p, jx) in pending.iter_mut().zip(&frame.jx) {
                            *p += -2.0 * jx * tau;
                        }
                    } else {
                        angles_a.copy_from_slice(&pending);
                        self.rotate(0, &angles_a);
                        pending.iter_mut().for_each(|v| *v = 0.0);
                        for (b, w) in angles_b.iter_mut().zip(&frame.w) {
                            *b = 2.0 * w * tau;
                        }
                        self.rotate(1, &angles_b);
                    }
                }
            }
            angles_a.copy_from_slice(&pending);
            self.rotate(0, &angles_a);
            self.steps += 1;
            if self.steps.is_multiple_of(REORTH_INTERVAL) {
                orthonormalize_rows(&mut self.data, self.dim);
            }
            Ok(())
        })?;
        Ok(())
    }

    /// Left-multiplies by rotations acting on row pairs
    /// `(offset + 2k, offset + 2k + 1)` with generator entry `angles[k]`.
    fn rotate(&mut self, offset: usize, angles: &[f64]) {
        let dim = self.dim;
        for (k, &theta) in angles.iter().enumerate() {
            if theta == 0.0 {
                continue;
            }
            let i = offset + 2 * k;
            let (s, c) = theta.sin_cos();
            let (head, tail) = self.data.split_at_mut((i + 1) * dim);
            let ri = &mut head[i * dim..];
            let rj = &mut tail[..dim];
            for (x, y) in ri.iter_mut().zip(rj.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = c * u + s * v;
                *y = c * v - s * u;
            }
        }
    }
}

/// Coefficients of the alternating A/B layers of one Suzuki step:
/// `A(p/2) B(p) A(p) B(p) A((1-3p)/2) B(1-4p) A((1-3p)/2) B(p) A(p) B(p) A(p/2)`.
fn suzuki_sequence() -> [f64; 11] {
    let p = SUZUKI_P;
    let q = 1.0 - 4.0 * p;
    [
        0.5 * p,
        p,
        p,
        p,
        0.5 * (p + q),
        q,
        0.5 * (p + q),
        p,
        p,
        p,
        0.5 * p,
    ]
}

fn check_fermionizable(schedule: &Schedule) -> Result<()> {
    if !schedule.fermionizable {
        return Err(Error::InvalidParameter {
            name: "schedule",
            reason: "schedule is not flagged fermionizable".into(),
        });
    }
    Ok(())
}

/// Step length used for a schedule at tolerance `tol`.
pub fn gaussian_step(schedule: &Schedule, tol: f64) -> Result<f64> {
    step_length(tol, 4.0 * schedule.coupling_scale(), STEP_SCALE)
}

/// Evolves `gamma0` from `t0` to `t1` under the schedule.
pub fn evolve_covariance(
    gamma0: &CovarianceMatrix,
    schedule: &Schedule,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<CovarianceMatrix> {
    let h = gaussian_step(schedule, tol)?;
    evolve_covariance_with_step(gamma0, schedule, t0, t1, h)
}

/// As [`evolve_covariance`] with an explicit maximal step, for convergence
/// studies.
pub fn evolve_covariance_with_step(
    gamma0: &CovarianceMatrix,
    schedule: &Schedule,
    t0: f64,
    t1: f64,
    h_max: f64,
) -> Result<CovarianceMatrix> {
    check_fermionizable(schedule)?;
    if gamma0.sites() != schedule.sites() {
        return Err(Error::DimensionMismatch {
            expected: schedule.sites(),
            got: gamma0.sites(),
        });
    }
    if t1 == t0 {
        let mut out = gamma0.clone();
        out.t = t1;
        return Ok(out);
    }
    let mut prop = GaussianPropagator::identity(schedule.sites());
    prop.advance(schedule, t0, t1, h_max)?;
    let o = prop.matrix();
    Ok(CovarianceMatrix {
        gamma: &o * &gamma0.gamma * o.transpose(),
        t: t1,
    })
}

/// Evolves `gamma0` (taken at `gamma0.t`) and returns the covariance at each
/// of the ascending `times`.
pub fn evolve_trajectory(
    gamma0: &CovarianceMatrix,
    schedule: &Schedule,
    times: &[f64],
    tol: f64,
) -> Result<Vec<CovarianceMatrix>> {
    check_fermionizable(schedule)?;
    let h = gaussian_step(schedule, tol)?;
    let mut prop = GaussianPropagator::identity(schedule.sites());
    let mut now = gamma0.t;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        prop.advance(schedule, now, t, h)?;
        now = t;
        let o = prop.matrix();
        out.push(CovarianceMatrix {
            gamma: &o * &gamma0.gamma * o.transpose(),
            t,
        });
    }
    Ok(out)
}

fn final_basis(frame: &CouplingFrame) -> Result<ModeBasis> {
    mode_basis(&build_majorana_matrix(frame)?)
}

fn occupations_in(g: &DMatrix<f64>, sites: usize) -> Vec<f64> {
    (0..sites)
        .map(|k| 0.5 * (1.0 + g[(2 * k, 2 * k + 1)] / PURITY_SCALE))
        .collect()
}

/// Occupations of the final frame's normal modes.
pub fn mode_occupations(
    gamma: &CovarianceMatrix,
    final_frame: &CouplingFrame,
) -> Result<ModeOccupations> {
    let basis = final_basis(final_frame)?;
    if basis.sites() != gamma.sites() {
        return Err(Error::DimensionMismatch {
            expected: basis.sites(),
            got: gamma.sites(),
        });
    }
    let n = occupations_in(&gamma.in_basis(&basis), basis.sites());
    let a1 = n.iter().sum();
    Ok(ModeOccupations { n, a1 })
}

/// `A1 = <N>` and `A2 = <N^2>` for the excitation number of the final
/// frame, by Wick's theorem:
///
/// ```text
/// <n_k n_m> = <n_k><n_m> + (G_ps G_qr - G_pr G_qs) / 4,  k != m
/// ```
///
/// with `p, q = 2k, 2k+1`, `r, s = 2m, 2m+1` and `G` the covariance in the
/// normal-mode Majoranas.
pub fn excitation_moments(
    gamma: &CovarianceMatrix,
    final_frame: &CouplingFrame,
) -> Result<ExcitationMoments> {
    let basis = final_basis(final_frame)?;
    let sites = basis.sites();
    if sites != gamma.sites() {
        return Err(Error::DimensionMismatch {
            expected: sites,
            got: gamma.sites(),
        });
    }
    let g = gamma.in_basis(&basis) / PURITY_SCALE;
    let n = occupations_in(&g, sites);
    let a1: f64 = n.iter().sum();
    let mut a2 = a1;
    for k in 0..sites {
        let (p, q) = (2 * k, 2 * k + 1);
        for m in 0..sites {
            if m == k {
                continue;
            }
            let (r, s) = (2 * m, 2 * m + 1);
            a2 += n[k] * n[m] + 0.25 * (g[(p, s)] * g[(q, r)] - g[(p, r)] * g[(q, s)]);
        }
    }
    Ok(ExcitationMoments { a1, a2, n })
}

/// `F1 = 1 - A1`, `F2 = 1 - (3 A1 - A2) / 2`.
pub fn fidelity_bounds(m: &ExcitationMoments) -> FidelityBounds {
    FidelityBounds {
        f1: 1.0 - m.a1,
        f2: 1.0 - 0.5 * (3.0 * m.a1 - m.a2),
    }
}

/// Sign of the Pfaffian of the (normalized) covariance.
pub fn fermion_parity(gamma: &CovarianceMatrix) -> Result<Parity> {
    let deviation = gamma.purity_defect();
    if deviation > PURITY_TOL {
        return Err(Error::NotPure { deviation });
    }
    let pf = pfaffian(&(&gamma.gamma / PURITY_SCALE));
    Ok(if pf > 0.0 { Parity::Even } else { Parity::Odd })
}
