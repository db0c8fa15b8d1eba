//! Brute-force state-vector oracle on the full `2^N` space.
//!
//! Basis states are `sigma^z` products with site 1 as the most significant
//! bit; a 0 bit is spin up (`Z = +1`). Index 0 is `|up ... up>`.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{build_majorana_matrix, excitation_spectrum, mode_basis, ModeBasis};
use crate::model::{CouplingFrame, Schedule};
use crate::stepping::{for_each_step, step_length};

/// Default largest chain handled by the dense oracle.
pub const DEFAULT_MAX_SITES: usize = 12;

/// Relative energy tolerance for labeling exact levels by excitation number.
pub const LABEL_TOL: f64 = 1e-8;

const STEP_SCALE: f64 = 25.0;
const TAYLOR_EPS: f64 = 1e-17;

/// Normalized `2^N` amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amp: Vec<Complex64>,
    pub sites: usize,
}

impl StateVector {
    /// Wraps amplitudes, checking the length and the norm.
    pub fn new(amp: Vec<Complex64>) -> Result<Self> {
        let sites = sites_for_len(amp.len())?;
        let state = Self { amp, sites };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "amp",
                reason: format!("state norm {norm} differs from 1"),
            });
        }
        Ok(state)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amp: Vec<Complex64>) -> Result<Self> {
        let sites = sites_for_len(amp.len())?;
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter {
                name: "amp",
                reason: "zero vector".into(),
            });
        }
        amp.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amp, sites })
    }

    /// Product state `|index>`.
    pub fn basis(sites: usize, index: usize) -> Result<Self> {
        check_capacity(sites, DEFAULT_MAX_SITES)?;
        let dim = 1usize << sites;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amp = vec![Complex64::new(0.0, 0.0); dim];
        amp[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amp, sites })
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Writes `index,re,im` rows in basis order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,re,im")?;
        for (i, a) in self.amp.iter().enumerate() {
            writeln!(out, "{i},{},{}", a.re, a.im)?;
        }
        Ok(())
    }
}

fn sites_for_len(len: usize) -> Result<usize> {
    if len < 4 || !len.is_power_of_two() {
        return Err(Error::InvalidParameter {
            name: "amp",
            reason: format!("length {len} is not 2^N with N >= 2"),
        });
    }
    Ok(len.trailing_zeros() as usize)
}

fn check_capacity(sites: usize, max: usize) -> Result<()> {
    if sites > max {
        return Err(Error::Capacity { sites, max });
    }
    Ok(())
}

/// Bit mask of site `l` (0-based) in an `n`-site index.
#[inline]
fn site_bit(n: usize, l: usize) -> usize {
    1 << (n - 1 - l)
}

/// `Z` eigenvalue of site `l` in basis state `s`.
#[inline]
fn z_value(n: usize, s: usize, l: usize) -> f64 {
    if s & site_bit(n, l) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dense real Hamiltonian of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    pub h: DMatrix<f64>,
    pub frame: CouplingFrame,
}

/// Diagonal of `sum W Z Z - sum Jz Z` in the computational basis.
fn diagonal(frame: &CouplingFrame) -> Vec<f64> {
    let n = frame.sites();
    (0..1usize << n)
        .map(|s| {
            let z: Vec<f64> = (0..n).map(|l| z_value(n, s, l)).collect();
            let bonds: f64 = frame.w.iter().enumerate().map(|(l, w)| w * z[l] * z[l + 1]).sum();
            let field: f64 = frame.jz.iter().zip(&z).map(|(j, z)| j * z).sum();
            bonds - field
        })
        .collect()
}

/// `H = sum W_l Z_l Z_{l+1} - sum (Jx_l X_l + Jz_l Z_l)`.
pub fn build_dense_hamiltonian(frame: &CouplingFrame) -> Result<DenseHamiltonian> {
    build_dense_hamiltonian_with_limit(frame, DEFAULT_MAX_SITES)
}

pub fn build_dense_hamiltonian_with_limit(
    frame: &CouplingFrame,
    max_sites: usize,
) -> Result<DenseHamiltonian> {
    frame.check()?;
    let n = frame.sites();
    check_capacity(n, max_sites)?;
    let dim = 1usize << n;
    let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diagonal(frame)));
    for s in 0..dim {
        for (l, &jx) in frame.jx.iter().enumerate() {
            h[(s ^ site_bit(n, l), s)] -= jx;
        }
    }
    Ok(DenseHamiltonian {
        h,
        frame: frame.clone(),
    })
}

/// The `k` lowest eigenpairs, energies ascending.
pub fn eigensystem(h: &DenseHamiltonian, k: usize) -> Result<(Vec<f64>, Vec<StateVector>)> {
    let dim = h.h.nrows();
    let eig = SymmetricEigen::try_new(h.h.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical(format!("eigensolver failed for dimension {dim}")))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let sites = h.frame.sites();
    let mut energies = Vec::with_capacity(k.min(dim));
    let mut states = Vec::with_capacity(k.min(dim));
    for &i in order.iter().take(k) {
        energies.push(eig.eigenvalues[i]);
        let amp = eig
            .eigenvectors
            .column(i)
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        states.push(StateVector { amp, sites });
    }
    Ok((energies, states))
}

/// Matrix-free `H` for one frame plus an optional static diagonal.
struct SparseHamiltonian {
    sites: usize,
    diag: Vec<f64>,
    jx: Vec<f64>,
    norm_bound: f64,
}

impl SparseHamiltonian {
    fn new(frame: &CouplingFrame, extra: Option<&[f64]>) -> Self {
        let mut diag = diagonal(frame);
        if let Some(extra) = extra {
            diag.iter_mut().zip(extra).for_each(|(d, e)| *d += e);
        }
        let dmax = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let offdiag: f64 = frame.jx.iter().map(|j| j.abs()).sum();
        Self {
            sites: frame.sites(),
            diag,
            jx: frame.jx.clone(),
            norm_bound: dmax + offdiag,
        }
    }

    fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.sites;
        for (s, o) in out.iter_mut().enumerate() {
            let mut acc = psi[s] * self.diag[s];
            for (l, &jx) in self.jx.iter().enumerate() {
                if jx != 0.0 {
                    acc -= psi[s ^ site_bit(n, l)] * jx;
                }
            }
            *o = acc;
        }
    }

    /// `psi <- exp(-i tau H) psi` by Taylor series on substeps with
    /// `|tau| ||H|| <= 1`.
    fn exp_apply(&self, psi: &mut [Complex64], tau: f64, work: &mut [Vec<Complex64>; 2]) {
        let subs = (tau.abs() * self.norm_bound).ceil().max(1.0) as usize;
        let dt = tau / subs as f64;
        let minus_i_dt = Complex64::new(0.0, -dt);
        for _ in 0..subs {
            let [term, next] = work;
            term.copy_from_slice(psi);
            for k in 1..60 {
                self.apply(term, next);
                let c = minus_i_dt / k as f64;
                let mut size = 0.0f64;
                for (t, x) in term.iter_mut().zip(next.iter()) {
                    *t = x * c;
                    size = size.max(t.norm_sqr());
                }
                psi.iter_mut().zip(term.iter()).for_each(|(p, t)| *p += t);
                if size.sqrt() < TAYLOR_EPS {
                    break;
                }
            }
        }
    }
}

/// Step length of the oracle integrator at tolerance `tol`.
pub fn exact_step(schedule: &Schedule, tol: f64) -> Result<f64> {
    step_length(tol, 4.0 * schedule.coupling_scale(), STEP_SCALE)
}

/// Integrates the Schrodinger equation from `t0` to `t1`.
pub fn evolve_state(
    psi0: &StateVector,
    schedule: &Schedule,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<StateVector> {
    let h = exact_step(schedule, tol)?;
    evolve_state_with(psi0, schedule, t0, t1, h, None)
}

/// As [`evolve_state`] with an explicit maximal step and an optional static
/// diagonal term added to `H(t)`.
pub fn evolve_state_with(
    psi0: &StateVector,
    schedule: &Schedule,
    t0: f64,
    t1: f64,
    h_max: f64,
    extra_diagonal: Option<&[f64]>,
) -> Result<StateVector> {
    let n = schedule.sites();
    check_capacity(n, DEFAULT_MAX_SITES)?;
    if psi0.sites != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: psi0.sites,
        });
    }
    if let Some(extra) = extra_diagonal {
        if extra.len() != psi0.dim() {
            return Err(Error::DimensionMismatch {
                expected: psi0.dim(),
                got: extra.len(),
            });
        }
    }
    if t1 == t0 {
        return Ok(psi0.clone());
    }
    let mut psi = psi0.amp.clone();
    let zero = Complex64::new(0.0, 0.0);
    let mut work = [vec![zero; psi.len()], vec![zero; psi.len()]];
    for_each_step(schedule, t0, t1, h_max, |step| {
        for frame in [&step.first, &step.second] {
            SparseHamiltonian::new(frame, extra_diagonal).exp_apply(&mut psi, step.h, &mut work);
        }
        Ok(())
    })?;
    StateVector::normalized(psi)
}

/// `|<psi|target>|^2`.
pub fn state_fidelity(psi: &StateVector, target: &StateVector) -> Result<f64> {
    Ok(psi.inner(target)?.norm_sqr())
}

/// `(|up...up> + sign |down...down>) / sqrt(2)`.
pub fn ghz_target(sites: usize, sign: i32) -> Result<StateVector> {
    check_capacity(sites, DEFAULT_MAX_SITES)?;
    if sites < 2 {
        return Err(Error::InvalidConfig(format!("{sites} sites")));
    }
    let dim = 1usize << sites;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amp = vec![Complex64::new(0.0, 0.0); dim];
    amp[0] = Complex64::new(r, 0.0);
    amp[dim - 1] = Complex64::new(if sign < 0 { -r } else { r }, 0.0);
    Ok(StateVector { amp, sites })
}

/// Neel states `|0> = |down up ... down up>`, `|1> = |up down ... up down>`.
pub fn neel_states(sites: usize) -> Result<(StateVector, StateVector)> {
    if sites % 2 == 1 {
        return Err(Error::OddChain(sites));
    }
    // site 1 is the top bit; a set bit is spin down
    let zero = (0..sites)
        .filter(|l| l % 2 == 0)
        .fold(0, |acc, l| acc | site_bit(sites, l));
    let one = ((1usize << sites) - 1) ^ zero;
    Ok((
        StateVector::basis(sites, zero)?,
        StateVector::basis(sites, one)?,
    ))
}

/// `(sum_l Z_l) psi`, unnormalized.
pub fn total_z_action(psi: &StateVector) -> Vec<Complex64> {
    let n = psi.sites;
    psi.amp
        .iter()
        .enumerate()
        .map(|(s, a)| a * (0..n).map(|l| z_value(n, s, l)).sum::<f64>())
        .collect()
}

/// `a_j psi` for the Jordan-Wigner Majoranas of [`crate::fermion`].
pub fn apply_majorana(sites: usize, j: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let l = j / 2;
    // string X_0 ... X_{l-1} flips the top l bits
    let string = ((1usize << l) - 1) << (sites - l);
    let flip = if j.is_multiple_of(2) {
        string
    } else {
        string | site_bit(sites, l)
    };
    let phase = if j.is_multiple_of(2) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (s, a) in psi.iter().enumerate() {
        out[s ^ flip] = a * phase * z_value(sites, s, l);
    }
    out
}

/// `sum_i coeffs_i a_i psi`.
fn apply_mode(sites: usize, coeffs: &[f64], psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let part = apply_majorana(sites, i, psi);
        out.iter_mut().zip(part).for_each(|(o, p)| *o += p * c);
    }
    out
}

/// Total quasiparticle number `sum_k (1 + i b_{2k} b_{2k+1}) / 2` applied
/// to `psi`.
fn apply_number(basis: &ModeBasis, sites: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let rows: Vec<Vec<f64>> = (0..2 * sites).map(|j| basis.q.row(j).iter().copied().collect()).collect();
    let mut out: Vec<Complex64> = psi.iter().map(|a| a * (0.5 * sites as f64)).collect();
    let half_i = Complex64::new(0.0, 0.5);
    for k in 0..sites {
        let odd = apply_mode(sites, &rows[2 * k + 1], psi);
        let both = apply_mode(sites, &rows[2 * k], &odd);
        out.iter_mut().zip(both).for_each(|(o, b)| *o += b * half_i);
    }
    out
}

/// `P(m)` built from the quasiparticle number operator: `psi` is projected
/// onto each eigenspace `N = m` with Lagrange polynomials in `N`.
pub fn excitation_distribution_by_number(
    psi: &StateVector,
    final_frame: &CouplingFrame,
) -> Result<Vec<f64>> {
    let n = final_frame.sites();
    check_capacity(n, DEFAULT_MAX_SITES)?;
    if psi.sites != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: psi.sites,
        });
    }
    let basis = mode_basis(&build_majorana_matrix(final_frame)?)?;
    let mut p = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut v = psi.amp.clone();
        for k in (0..=n).filter(|&k| k != m) {
            let nv = apply_number(&basis, n, &v);
            let denom = m as f64 - k as f64;
            v = nv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * k as f64) / denom)
                .collect();
        }
        p.push(v.iter().map(|a| a.norm_sqr()).sum());
    }
    Ok(p)
}

/// `P(m)`, the probability of `m` quasiparticles of the final frame.
///
/// Exact eigenstates are labeled by matching their energies to
/// `E0 + sum_S eps`; if some exact level matches fermionic levels with
/// different excitation numbers the number-operator projection is used
/// instead.
pub fn excitation_distribution(psi: &StateVector, final_frame: &CouplingFrame) -> Result<Vec<f64>> {
    let n = final_frame.sites();
    let spec = excitation_spectrum(&build_majorana_matrix(final_frame)?)?;
    let h = build_dense_hamiltonian(final_frame)?;
    if psi.sites != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: psi.sites,
        });
    }
    let dim = 1usize << n;
    let (energies, states) = eigensystem(&h, dim)?;
    let levels = spec.many_body_levels();
    let tol = LABEL_TOL * final_frame.scale().max(1.0);
    let mut p = vec![0.0; n + 1];
    let mut lo = 0;
    for (e, state) in energies.iter().zip(&states) {
        while lo < levels.len() && levels[lo].0 < e - tol {
            lo += 1;
        }
        let mut label = None;
        let mut ambiguous = false;
        for &(level, m) in levels[lo..].iter().take_while(|(level, _)| *level <= e + tol) {
            let _ = level;
            match label {
                None => label = Some(m),
                Some(prev) if prev != m => ambiguous = true,
                _ => {}
            }
        }
        match label {
            Some(m) if !ambiguous => p[m] += state.inner(psi)?.norm_sqr(),
            _ => return excitation_distribution_by_number(psi, final_frame),
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChainConfig, Segment};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn spectrum(frame: &CouplingFrame) -> Vec<f64> {
        let h = build_dense_hamiltonian(frame).unwrap();
        eigensystem(&h, 1 << frame.sites()).unwrap().0
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn two_free_spins() {
        let f = CouplingFrame::homogeneous(2, 1.0, 0.0);
        assert!(close(&spectrum(&f), &[-2.0, 0.0, 0.0, 2.0], 1e-12));
    }

    #[test]
    fn single_bond() {
        let f = CouplingFrame::homogeneous(2, 0.0, 1.0);
        assert!(close(&spectrum(&f), &[-1.0, -1.0, 1.0, 1.0], 1e-12));
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let f = CouplingFrame::new(vec![0.3, -1.1, 0.7], vec![0.2, 0.0, -0.4], vec![0.5, -0.9]).unwrap();
        let h = build_dense_hamiltonian(&f).unwrap();
        assert_eq!(h.h, h.h.transpose());
    }

    #[test]
    fn three_sites_match_fermionic_levels() {
        let f = CouplingFrame::homogeneous(3, 1.0, -1.0);
        let spec = excitation_spectrum(&build_majorana_matrix(&f).unwrap()).unwrap();
        let levels: Vec<f64> = spec.many_body_levels().iter().map(|l| l.0).collect();
        assert!(close(&spectrum(&f), &levels, 1e-9));
    }

    #[test]
    fn capacity_is_enforced() {
        let f = CouplingFrame::homogeneous(13, 1.0, -1.0);
        assert!(matches!(
            build_dense_hamiltonian(&f),
            Err(Error::Capacity { sites: 13, max: 12 })
        ));
    }

    #[test]
    fn ising_limits_have_expected_ground_spaces() {
        let (e, v) = eigensystem(&build_dense_hamiltonian(&CouplingFrame::homogeneous(2, 0.0, -1.0)).unwrap(), 2).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] + 1.0).abs() < 1e-12);
        for s in &v {
            let weight = s.amp[0].norm_sqr() + s.amp[3].norm_sqr();
            assert!((weight - 1.0).abs() < 1e-12);
        }
        let (_, v) = eigensystem(&build_dense_hamiltonian(&CouplingFrame::homogeneous(2, 0.0, 1.0)).unwrap(), 2).unwrap();
        for s in &v {
            let weight = s.amp[1].norm_sqr() + s.amp[2].norm_sqr();
            assert!((weight - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let f = CouplingFrame::homogeneous(4, 0.7, -1.0).with_uniform_jz(0.1);
        let (_, v) = eigensystem(&build_dense_hamiltonian(&f).unwrap(), 6).unwrap();
        for i in 0..v.len() {
            for j in 0..v.len() {
                let ip = v[i].inner(&v[j]).unwrap().norm();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fidelity_examples() {
        let g = ghz_target(2, 1).unwrap();
        assert!((state_fidelity(&g, &g).unwrap() - 1.0).abs() < 1e-15);
        let a = StateVector::basis(3, 1).unwrap();
        let b = StateVector::basis(3, 6).unwrap();
        assert_eq!(state_fidelity(&a, &b).unwrap(), 0.0);
        let plus = StateVector::new(vec![c(0.5); 4]).unwrap();
        assert!((state_fidelity(&plus, &g).unwrap() - 0.5).abs() < 1e-15);
        assert!(state_fidelity(&plus, &a).is_err());
    }

    #[test]
    fn cat_states() {
        let p = ghz_target(2, 1).unwrap();
        let m = ghz_target(2, -1).unwrap();
        assert!((p.amp[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        assert!((p.amp[3].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        assert!(p.inner(&m).unwrap().norm() < 1e-16);
        for n in 2..=8 {
            assert!((ghz_target(n, -1).unwrap().norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn neel_layout() {
        let (q0, q1) = neel_states(2).unwrap();
        // |down up> = 0b10, |up down> = 0b01
        assert_eq!(q0.amp[2], c(1.0));
        assert_eq!(q1.amp[1], c(1.0));
        assert_eq!(q0.inner(&q1).unwrap().norm(), 0.0);
        let (q0, q1) = neel_states(4).unwrap();
        assert_eq!(q0.amp[0b1010], c(1.0));
        assert_eq!(q1.amp[0b0101], c(1.0));
        assert!(matches!(neel_states(5), Err(Error::OddChain(5))));
    }

    #[test]
    fn neel_states_are_antiferromagnetic_ground_states() {
        let f = CouplingFrame::homogeneous(4, 0.0, 1.0);
        let h = build_dense_hamiltonian(&f).unwrap();
        let (e, _) = eigensystem(&h, 1).unwrap();
        let (q0, q1) = neel_states(4).unwrap();
        for q in [q0, q1] {
            let i = q.amp.iter().position(|a| a.norm() == 1.0).unwrap();
            assert!((h.h[(i, i)] - e[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn total_z_examples() {
        let (q0, _) = neel_states(4).unwrap();
        let z = total_z_action(&q0);
        assert!(z.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() <= 1e-14);
        let up = StateVector::basis(2, 0).unwrap();
        assert_eq!(total_z_action(&up)[0], c(2.0));
        let z = total_z_action(&ghz_target(2, 1).unwrap());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z[0].re - 2.0 * r).abs() < 1e-15 && (z[3].re + 2.0 * r).abs() < 1e-15);
        assert!((z.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn majoranas_anticommute_and_square_to_one() {
        let n = 3;
        let psi = StateVector::normalized((0..8).map(|i| Complex64::new(i as f64 + 0.5, 0.3 * i as f64)).collect()).unwrap();
        for i in 0..2 * n {
            let sq = apply_majorana(n, i, &apply_majorana(n, i, &psi.amp));
            assert!(sq.iter().zip(&psi.amp).all(|(a, b)| (a - b).norm() < 1e-14));
            for j in 0..i {
                let ij = apply_majorana(n, i, &apply_majorana(n, j, &psi.amp));
                let ji = apply_majorana(n, j, &apply_majorana(n, i, &psi.amp));
                assert!(ij.iter().zip(&ji).all(|(a, b)| (a + b).norm() < 1e-14));
            }
        }
    }

    #[test]
    fn majorana_pairs_give_spin_terms() {
        // X_l = i a_{2l} a_{2l+1}, Z_l Z_{l+1} = i a_{2l+1} a_{2l+2}
        let n = 3;
        let psi = StateVector::normalized((0..8).map(|i| Complex64::new(1.0 + i as f64, -0.2 * i as f64)).collect()).unwrap();
        let i = Complex64::new(0.0, 1.0);
        for l in 0..n {
            let x: Vec<_> = apply_majorana(n, 2 * l, &apply_majorana(n, 2 * l + 1, &psi.amp)).iter().map(|a| a * i).collect();
            for s in 0..8 {
                assert!((x[s] - psi.amp[s ^ site_bit(n, l)]).norm() < 1e-14);
            }
        }
        for l in 0..n - 1 {
            let zz: Vec<_> = apply_majorana(n, 2 * l + 1, &apply_majorana(n, 2 * l + 2, &psi.amp)).iter().map(|a| a * i).collect();
            for s in 0..8 {
                let expect = psi.amp[s] * z_value(n, s, l) * z_value(n, s, l + 1);
                assert!((zz[s] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn ground_and_first_excited_distributions() {
        let f = CouplingFrame::homogeneous(4, 0.8, -1.0);
        let (_, v) = eigensystem(&build_dense_hamiltonian(&f).unwrap(), 2).unwrap();
        let p0 = excitation_distribution(&v[0], &f).unwrap();
        assert!((p0[0] - 1.0).abs() < 1e-10);
        let p1 = excitation_distribution(&v[1], &f).unwrap();
        assert!((p1[1] - 1.0).abs() < 1e-10);
        let q1 = excitation_distribution_by_number(&v[1], &f).unwrap();
        assert!((q1[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_frames_use_the_number_operator() {
        // Jx = 0: every level is degenerate; the + cat is the vacuum
        let f = CouplingFrame::homogeneous(4, 0.0, -1.0);
        let p = excitation_distribution(&ghz_target(4, 1).unwrap(), &f).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        let p = excitation_distribution(&ghz_target(4, -1).unwrap(), &f).unwrap();
        assert!((p[1] - 1.0).abs() < 1e-12);
        let p = excitation_distribution(&StateVector::basis(4, 0).unwrap(), &f).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenstates_are_stationary() {
        let f = CouplingFrame::homogeneous(4, 0.6, -1.0).with_uniform_jz(0.2);
        let (_, v) = eigensystem(&build_dense_hamiltonian(&f).unwrap(), 3).unwrap();
        let s = Schedule::new(
            ChainConfig::ferromagnetic(4).unwrap(),
            vec![Segment::Constant { duration: 5.0, frame: f }],
            false,
        );
        let out = evolve_state(&v[2], &s, 0.0, 5.0, 1e-8).unwrap();
        assert!((state_fidelity(&out, &v[2]).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(evolve_state(&v[2], &s, 2.0, 2.0, 1e-8).unwrap(), v[2]);
    }

    #[test]
    fn static_evolution_matches_spectral_propagator() {
        let f = CouplingFrame::new(vec![0.9, 0.4, 1.2], vec![0.3, -0.1, 0.0], vec![-0.7, 0.5]).unwrap();
        let h = build_dense_hamiltonian(&f).unwrap();
        let (e, v) = eigensystem(&h, 8).unwrap();
        let psi = StateVector::normalized((0..8).map(|i| Complex64::new(1.0, i as f64)).collect()).unwrap();
        let t = 3.7;
        let mut expect = vec![Complex64::new(0.0, 0.0); 8];
        for (ek, vk) in e.iter().zip(&v) {
            let ov = vk.inner(&psi).unwrap() * Complex64::from_polar(1.0, -ek * t);
            expect.iter_mut().zip(&vk.amp).for_each(|(x, a)| *x += a * ov);
        }
        let s = Schedule::new(ChainConfig::ferromagnetic(3).unwrap(), vec![Segment::Constant { duration: t, frame: f }], false);
        let out = evolve_state(&psi, &s, 0.0, t, 1e-8).unwrap();
        assert!(out.amp.iter().zip(&expect).all(|(a, b)| (a - b).norm() < 1e-10));
    }

    #[test]
    fn csv_dump_lists_every_amplitude() {
        let mut buf = Vec::new();
        ghz_target(2, -1).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "index,re,im");
        assert!(lines[4].starts_with("3,-0.7071"));
    }
}
