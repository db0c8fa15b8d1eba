//! Fixed-step time grids shared by the Gaussian and exact integrators.
//!
//! Both engines use the fourth-order commutator-free Magnus scheme
//!
//! ```text
//! U(t+h, t) = exp(-i h (b H1 + a H2)) exp(-i h (a H1 + b H2))
//! ```
//!
//! with `H1, H2` sampled at the Gauss points `t + (1/2 ∓ √3/6) h`,
//! `a = 1/4 + √3/6`, `b = 1/4 - √3/6`. Since every Hamiltonian here is
//! linear in the couplings, each exponent is the Hamiltonian of a blended
//! frame.

use crate::error::{Error, Result};
use crate::model::{CouplingFrame, Schedule};

const SQRT3_6: f64 = 0.288_675_134_594_812_9; // sqrt(3) / 6

pub(crate) const GAUSS_NODES: [f64; 2] = [0.5 - SQRT3_6, 0.5 + SQRT3_6];
pub(crate) const CF4_A: f64 = 0.25 + SQRT3_6;
pub(crate) const CF4_B: f64 = 0.25 - SQRT3_6;

/// Upper bound on the number of steps in a single call.
pub const MAX_STEPS: u64 = 200_000_000;

/// Local step length for a tolerance and energy scale. The constant was
/// tuned so that step halving changes fidelities by far less than `tol`.
pub(crate) fn step_length(tol: f64, energy_scale: f64, step_scale: f64) -> Result<f64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("tolerance must lie in (0, 1), got {tol}"),
        });
    }
    let scale = energy_scale.max(1e-3);
    Ok(step_scale * tol.powf(0.25) / scale)
}

/// One step of the scheme: the two blended frames in application order and
/// the step length.
pub(crate) struct Cf4Step {
    pub first: CouplingFrame,
    pub second: CouplingFrame,
    pub h: f64,
}

/// Walks `[t0, t1]` segment by segment with steps no longer than `h_max`.
/// Gauss nodes are interior, so every evaluation lands inside the segment
/// that owns the step.
pub(crate) fn for_each_step(
    schedule: &Schedule,
    t0: f64,
    t1: f64,
    h_max: f64,
    mut f: impl FnMut(Cf4Step) -> Result<()>,
) -> Result<u64> {
    let total = schedule.total_duration();
    for t in [t0, t1] {
        if !(0.0..=total).contains(&t) {
            return Err(Error::OutOfRange { t, total });
        }
    }
    if t1 < t0 {
        return Err(Error::InvalidParameter {
            name: "t1",
            reason: format!("end time {t1} precedes start time {t0}"),
        });
    }
    let mut steps = 0u64;
    let bp = schedule.breakpoints();
    for win in bp.windows(2) {
        let a = win[0].max(t0);
        let b = win[1].min(t1);
        if b <= a {
            continue;
        }
        let span = b - a;
        let n = (span / h_max).ceil().max(1.0);
        if n > MAX_STEPS as f64 || span / n < f64::EPSILON * win[1].abs().max(1.0) {
            return Err(Error::Stiffness {
                step: span / n,
                span,
            });
        }
        let n = n as u64;
        let h = span / n as f64;
        for i in 0..n {
            let t = a + i as f64 * h;
            let f1 = schedule.eval_frame(t + GAUSS_NODES[0] * h)?;
            let f2 = schedule.eval_frame(t + GAUSS_NODES[1] * h)?;
            // weights sum to 1/2; doubling gives the frame whose Hamiltonian
            // is the exponent divided by h/2
            let first = f1.combine(2.0 * CF4_A, &f2, 2.0 * CF4_B);
            let second = f1.combine(2.0 * CF4_B, &f2, 2.0 * CF4_A);
            f(Cf4Step {
                first,
                second,
                h: 0.5 * h,
            })?;
        }
        steps += n;
    }
    Ok(steps)
}
