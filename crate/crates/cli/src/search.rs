//! Ramp-duration searches for a target fidelity.

use atomchain::Result;

/// How a crossing was located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// Doubling bracket then bisection; samples were monotone.
    Bisection,
    /// Dense scan of `(0, T_hi]` for the last point below target, then
    /// bisection. Used when the samples were not monotone or no lower
    /// bracket exists.
    Scan,
}

impl SearchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMethod::Bisection => "bisection",
            SearchMethod::Scan => "scan",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub t: f64,
    pub method: SearchMethod,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub t_start: f64,
    pub t_max: f64,
    pub rel_tol: f64,
    pub scan_points: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("fidelity stays below {target} up to T = {t_max} (last value {last})")]
    NoBracket { target: f64, t_max: f64, last: f64 },
    #[error(transparent)]
    Engine(#[from] atomchain::Error),
}

/// Smallest `T` with `f(T) >= target`, assuming `f` rises with `T`.
///
/// The doubling samples are checked for monotonicity; if they are not
/// monotone, or the very first sample already meets the target, the answer
/// comes from [`last_crossing`] on `(0, T_hi]`.
pub fn first_crossing(
    mut f: impl FnMut(f64) -> Result<f64>,
    target: f64,
    limits: SearchLimits,
) -> std::result::Result<Crossing, SearchError> {
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut t = limits.t_start;
    loop {
        let v = f(t)?;
        samples.push((t, v));
        if v >= target {
            break;
        }
        if t >= limits.t_max {
            return Err(SearchError::NoBracket {
                target,
                t_max: limits.t_max,
                last: v,
            });
        }
        t = (2.0 * t).min(limits.t_max);
    }
    let monotone = samples.windows(2).all(|w| w[1].1 >= w[0].1);
    if samples.len() < 2 || !monotone {
        let mut c = last_crossing(f, target, t, limits)?;
        c.evaluations += samples.len();
        return Ok(c);
    }
    let lo = samples[samples.len() - 2].0;
    let (t, n) = bisect(&mut f, target, lo, t, limits.rel_tol)?;
    Ok(Crossing {
        t,
        method: SearchMethod::Bisection,
        evaluations: samples.len() + n,
    })
}

/// The point after which `f` stays at or above `target` on the scan grid
/// of `(0, t_hi]`, refined by bisection. `f(t_hi) >= target` is assumed.
pub fn last_crossing(
    mut f: impl FnMut(f64) -> Result<f64>,
    target: f64,
    t_hi: f64,
    limits: SearchLimits,
) -> std::result::Result<Crossing, SearchError> {
    let m = limits.scan_points;
    let grid: Vec<f64> = (1..=m).map(|k| t_hi * k as f64 / m as f64).collect();
    let mut below = None;
    for (k, &t) in grid.iter().enumerate().take(m - 1) {
        if f(t)? < target {
            below = Some(k);
        }
    }
    let mut evaluations = m - 1;
    let t = match below {
        None => grid[0],
        Some(k) => {
            let (t, n) = bisect(&mut f, target, grid[k], grid[k + 1], limits.rel_tol)?;
            evaluations += n;
            t
        }
    };
    Ok(Crossing {
        t,
        method: SearchMethod::Scan,
        evaluations,
    })
}

/// Shrinks `[lo, hi]` with `f(lo) < target <= f(hi)`; returns `hi`.
fn bisect(
    f: &mut impl FnMut(f64) -> Result<f64>,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> Result<(f64, usize)> {
    let mut n = 0;
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        n += 1;
    }
    Ok((hi, n))
}
