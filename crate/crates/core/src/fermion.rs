//! Jordan-Wigner reduction of the `Jz = 0` chain to free Majorana fermions.
//!
//! Per site `l` (0-based) the Majorana operators are
//!
//! ```text
//! a_{2l}   = (X_0 ... X_{l-1}) Z_l
//! a_{2l+1} = (X_0 ... X_{l-1}) Y_l
//! ```
//!
//! so that `X_l = i a_{2l} a_{2l+1}` and `Z_l Z_{l+1} = i a_{2l+1} a_{2l+2}`.
//! The string runs along `X`, which is the axis rotation that turns the
//! `ZZ + X` chain into the textbook transverse-field form. With `c = a / 2`
//! the Hamiltonian reads `H = i c^T A c = (i/4) a^T A a` where `A` is real,
//! antisymmetric and tridiagonal:
//!
//! ```text
//! A[2l, 2l+1]   = -2 Jx_l
//! A[2l+1, 2l+2] =  2 W_l
//! ```
//!
//! The Heisenberg equations are `dc/dt = A c` and `eig(A) = {±i eps_nu}`.

use nalgebra::{DMatrix, SVD};

use crate::dynamics::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::model::CouplingFrame;

/// `eig(A) = ±i * SPECTRUM_SCALE * eps`. Fixed against the two-site exact
/// spectra (see tests).
pub const SPECTRUM_SCALE: f64 = 1.0;

/// `dc/dt = GENERATOR_SCALE * A c`.
pub const GENERATOR_SCALE: f64 = 1.0;

/// Relative threshold below which the smallest excitation counts as a zero
/// mode.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Quadratic generator of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaMatrix {
    pub a: DMatrix<f64>,
    pub frame: CouplingFrame,
}

impl MajoranaMatrix {
    pub fn sites(&self) -> usize {
        self.a.nrows() / 2
    }

    /// The `N x N` block coupling even to odd Majoranas:
    /// `A[2l, 2m+1] = B[l, m]`.
    fn bipartite_block(&self) -> DMatrix<f64> {
        let n = self.sites();
        DMatrix::from_fn(n, n, |l, m| self.a[(2 * l, 2 * m + 1)])
    }
}

/// Single-quasiparticle energies of a frame and its vacuum energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSpectrum {
    /// Ascending, nonnegative.
    pub eps: Vec<f64>,
    /// `-(1/2) sum eps`.
    pub e0: f64,
}

impl ExcitationSpectrum {
    fn from_eps(eps: Vec<f64>) -> Self {
        let e0 = -0.5 * eps.iter().sum::<f64>();
        Self { eps, e0 }
    }

    /// Every many-body level `E0 + sum_{nu in S} eps_nu` paired with `|S|`,
    /// sorted by energy. Exponential in `N`; meant for small chains.
    pub fn many_body_levels(&self) -> Vec<(f64, usize)> {
        let n = self.eps.len();
        assert!(n < 28, "many-body enumeration for {n} modes");
        let mut levels: Vec<(f64, usize)> = (0u64..1 << n)
            .map(|mask| {
                let e: f64 = (0..n)
                    .filter(|k| mask >> k & 1 == 1)
                    .map(|k| self.eps[k])
                    .sum();
                (self.e0 + e, mask.count_ones() as usize)
            })
            .collect();
        levels.sort_by(|a, b| a.0.total_cmp(&b.0));
        levels
    }
}

/// Normal-mode Majoranas `b = Q a` of a frame: `H = (i/2) sum eps_k b_{2k} b_{2k+1}`,
/// i.e. `H = sum eps_k (n_k - 1/2)` with `n_k = (1 + i b_{2k} b_{2k+1}) / 2`.
///
/// When the lowest mode is a zero mode its sign is chosen so that the vacuum
/// has even parity (`prod X = +1`). This makes the symmetric cat the vacuum
/// of the `Jx = 0` chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    pub eps: Vec<f64>,
    /// Row `j` holds the coefficients of `b_j` in terms of `a`.
    pub q: DMatrix<f64>,
}

impl ModeBasis {
    pub fn sites(&self) -> usize {
        self.eps.len()
    }

    /// Covariance of the vacuum `n_k = 0`: `-Q^T J Q` with `J` the
    /// canonical symplectic block.
    pub fn vacuum_gamma(&self) -> DMatrix<f64> {
        let n = self.sites();
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            let even = self.q.row(2 * k);
            let odd = self.q.row(2 * k + 1);
            // -(e_k^T o_k - o_k^T e_k)
            out -= even.transpose() * odd - odd.transpose() * even;
        }
        out
    }
}

/// Builds the Majorana generator of a `Jz = 0` frame.
pub fn build_majorana_matrix(frame: &CouplingFrame) -> Result<MajoranaMatrix> {
    frame.check()?;
    if let Some((site, value)) = frame.first_jz_violation() {
        return Err(Error::NotFermionizable { site, value });
    }
    let n = frame.sites();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for (l, &jx) in frame.jx.iter().enumerate() {
        a[(2 * l, 2 * l + 1)] = -2.0 * jx;
        a[(2 * l + 1, 2 * l)] = 2.0 * jx;
    }
    for (l, &w) in frame.w.iter().enumerate() {
        a[(2 * l + 1, 2 * l + 2)] = 2.0 * w;
        a[(2 * l + 2, 2 * l + 1)] = -2.0 * w;
    }
    Ok(MajoranaMatrix {
        a,
        frame: frame.clone(),
    })
}

/// Normal modes from the singular value decomposition of the bipartite
/// block `B = U diag(eps) V^T`: `b_{2k} = sum_l U_{lk} a_{2l}`,
/// `b_{2k+1} = sum_m V_{mk} a_{2m+1}`.
pub fn mode_basis(m: &MajoranaMatrix) -> Result<ModeBasis> {
    let n = m.sites();
    for i in 0..2 * n {
        for j in 0..2 * n {
            if (i + j) % 2 == 0 && m.a[(i, j)] != 0.0 {
                return Err(Error::Numerical(format!(
                    "generator couples Majoranas of equal parity at ({i}, {j})"
                )));
            }
        }
    }
    let b = m.bipartite_block();
    let scale = b.amax();
    let svd = SVD::try_new(b.clone(), true, true, f64::EPSILON, 0).ok_or_else(|| {
        Error::Numerical(format!(
            "SVD did not converge for {n}x{n} block, max |entry| {scale:e}, min |entry| {:e}",
            b.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()))
        ))
    })?;
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));

    let mut eps = Vec::with_capacity(n);
    let mut q = DMatrix::zeros(2 * n, 2 * n);
    for (k, &src) in order.iter().enumerate() {
        eps.push(svd.singular_values[src] / SPECTRUM_SCALE);
        for l in 0..n {
            q[(2 * k, 2 * l)] = u[(l, src)];
            q[(2 * k + 1, 2 * l + 1)] = vt[(src, l)];
        }
    }

    if eps[0] <= DEGENERACY_TOL * scale.max(f64::MIN_POSITIVE) {
        // vacuum parity = det(Q) * (-1)^N; det(Q) = det(U) det(V)
        let det = u.determinant() * vt.determinant();
        let parity = det.signum() * if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        if parity < 0.0 {
            for l in 0..2 * n {
                q[(1, l)] = -q[(1, l)];
            }
        }
    }
    Ok(ModeBasis { eps, q })
}

/// Excitation energies `eps_nu` (ascending) and the vacuum energy.
pub fn excitation_spectrum(m: &MajoranaMatrix) -> Result<ExcitationSpectrum> {
    Ok(ExcitationSpectrum::from_eps(mode_basis(m)?.eps))
}

/// Closed-form bulk gap `2 ||W| - |Jx||` of a homogeneous frame.
///
/// The spectrum is invariant under `W -> -W`, so the magnitude of `W` enters.
/// For `W > 0` this is `2 |W - Jx|`.
pub fn bulk_gap(frame: &CouplingFrame) -> Result<f64> {
    frame.check()?;
    if let Some((site, value)) = frame.first_jz_violation() {
        return Err(Error::NotFermionizable { site, value });
    }
    let (jx, w) = frame
        .homogeneous_values()
        .ok_or_else(|| Error::Inhomogeneous("bulk gap needs uniform Jx and W".into()))?;
    Ok(2.0 * (w.abs() - jx.abs()).abs())
}

/// Lowest excitation energy of a homogeneous frame in the ordered phase
/// (`|Jx| < |W|`): the edge mode that closes as `(Jx/W)^N`.
pub fn boundary_mode_energy(frame: &CouplingFrame) -> Result<f64> {
    let (jx, w) = frame
        .homogeneous_values()
        .ok_or_else(|| Error::Inhomogeneous("boundary mode needs uniform Jx and W".into()))?;
    if jx.abs() >= w.abs() {
        return Err(Error::InvalidParameter {
            name: "jx",
            reason: format!("|Jx| = {} must be below |W| = {}", jx.abs(), w.abs()),
        });
    }
    let spec = excitation_spectrum(&build_majorana_matrix(frame)?)?;
    Ok(spec.eps[0])
}

/// Gaussian ground state (quasiparticle vacuum) of a gapped frame.
pub fn ground_covariance(m: &MajoranaMatrix) -> Result<CovarianceMatrix> {
    let basis = mode_basis(m)?;
    let tol = DEGENERACY_TOL * m.frame.scale().max(f64::MIN_POSITIVE);
    if basis.eps[0] <= tol {
        return Err(Error::DegenerateGround {
            eps: basis.eps[0],
            tol,
        });
    }
    Ok(CovarianceMatrix {
        gamma: basis.vacuum_gamma(),
        t: m.frame.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::antisymmetry_defect;
    use nalgebra::Complex;

    fn frame(jx: &[f64], w: &[f64]) -> CouplingFrame {
        CouplingFrame::new(jx.to_vec(), vec![0.0; jx.len()], w.to_vec()).unwrap()
    }

    fn imag_eigs(a: &DMatrix<f64>) -> Vec<f64> {
        let eig: Vec<Complex<f64>> = a.complex_eigenvalues().iter().copied().collect();
        let mut im: Vec<f64> = eig.iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        im
    }

    #[test]
    fn two_free_spins_calibrate_the_scale() {
        // exact: -X1 - X2 has eigenvalues {-2, 0, 0, 2}, i.e. eps = {2, 2}
        let m = build_majorana_matrix(&frame(&[1.0, 1.0], &[0.0])).unwrap();
        let nonzero = m.a.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 4, "two onsite pairs");
        let im = imag_eigs(&m.a);
        let expected = [-2.0, -2.0, 2.0, 2.0].map(|v| v * SPECTRUM_SCALE);
        for (a, b) in im.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let s = excitation_spectrum(&m).unwrap();
        assert_eq!(s.eps.len(), 2);
        assert!(s.eps.iter().all(|e| (e - 2.0).abs() < 1e-12));
        assert!((s.e0 + 2.0).abs() < 1e-12);
        assert_eq!(SPECTRUM_SCALE, 1.0);
        assert_eq!(GENERATOR_SCALE, 1.0);
    }

    #[test]
    fn single_bond_has_a_zero_mode() {
        // exact: Z1 Z2 has eigenvalues {-1, -1, 1, 1}
        let m = build_majorana_matrix(&frame(&[0.0, 0.0], &[1.0])).unwrap();
        let s = excitation_spectrum(&m).unwrap();
        assert!(s.eps[0].abs() < 1e-12);
        assert!((s.eps[1] - 2.0).abs() < 1e-12);
        assert!((s.e0 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn generator_is_antisymmetric() {
        let f = frame(&[0.3, -1.2, 2.0, 0.1], &[-0.5, 0.7, 1.1]);
        let m = build_majorana_matrix(&f).unwrap();
        assert_eq!(antisymmetry_defect(&m.a), 0.0);
        for i in 0..8usize {
            for j in 0..8 {
                if i.abs_diff(j) > 1 {
                    assert_eq!(m.a[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn jz_is_rejected() {
        let f = CouplingFrame::homogeneous(3, 1.0, -1.0).with_uniform_jz(0.2);
        assert!(matches!(
            build_majorana_matrix(&f),
            Err(Error::NotFermionizable { site: 0, .. })
        ));
    }

    #[test]
    fn mode_basis_is_orthogonal_and_diagonalizes() {
        let f = frame(&[0.9, 1.4, 0.2, 0.6, 1.0], &[-0.3, -1.1, 0.8, -0.4]);
        let m = build_majorana_matrix(&f).unwrap();
        let basis = mode_basis(&m).unwrap();
        let qqt = &basis.q * basis.q.transpose();
        assert!((qqt - DMatrix::identity(10, 10)).amax() < 1e-12);
        // Q A Q^T is block diagonal with eps_k in the (2k, 2k+1) slots
        let d = &basis.q * &m.a * basis.q.transpose();
        for k in 0..5 {
            assert!((d[(2 * k, 2 * k + 1)] - basis.eps[k]).abs() < 1e-12);
        }
        let mut off = d.clone();
        for k in 0..5 {
            off[(2 * k, 2 * k + 1)] = 0.0;
            off[(2 * k + 1, 2 * k)] = 0.0;
        }
        assert!(off.amax() < 1e-12);
        assert!(basis.eps.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn gap_formula() {
        assert_eq!(bulk_gap(&CouplingFrame::homogeneous(5, 1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(bulk_gap(&CouplingFrame::homogeneous(5, 0.0, -1.0)).unwrap(), 2.0);
        assert_eq!(bulk_gap(&CouplingFrame::homogeneous(5, 2.0, 1.0)).unwrap(), 2.0);
        let inhom = frame(&[1.0, 2.0, 1.0], &[1.0, 1.0]);
        assert!(matches!(bulk_gap(&inhom), Err(Error::Inhomogeneous(_))));
    }

    #[test]
    fn decoupled_limit_has_exact_zero_mode() {
        for w in [-1.0, 0.5, 3.0] {
            let e = boundary_mode_energy(&CouplingFrame::homogeneous(7, 0.0, w)).unwrap();
            assert!(e.abs() < 1e-14);
        }
        assert!(boundary_mode_energy(&CouplingFrame::homogeneous(7, 2.0, 1.0)).is_err());
    }

    #[test]
    fn ground_state_is_vacuum_of_its_own_frame() {
        let f = frame(&[1.0, 1.0], &[0.0]);
        let m = build_majorana_matrix(&f).unwrap();
        let g = ground_covariance(&m).unwrap();
        // product state along +x: <X_l> = Gamma[2l, 2l+1] = 1
        assert!((g.gamma[(0, 1)] - 1.0).abs() < 1e-12);
        assert!((g.gamma[(2, 3)] - 1.0).abs() < 1e-12);
        let prod = &g.gamma * g.gamma.transpose();
        assert!((prod - DMatrix::identity(4, 4)).amax() < 1e-10);
    }

    #[test]
    fn degenerate_frames_are_refused() {
        let m = build_majorana_matrix(&CouplingFrame::homogeneous(4, 0.0, -1.0)).unwrap();
        assert!(matches!(
            ground_covariance(&m),
            Err(Error::DegenerateGround { .. })
        ));
    }

    #[test]
    fn zero_mode_vacuum_has_even_parity() {
        for n in 2..7 {
            for w in [-1.0, 1.0] {
                let m = build_majorana_matrix(&CouplingFrame::homogeneous(n, 0.0, w)).unwrap();
                let basis = mode_basis(&m).unwrap();
                let pf = crate::linalg::pfaffian(&basis.vacuum_gamma());
                assert!((pf - 1.0).abs() < 1e-10, "n = {n}, w = {w}, pf = {pf}");
            }
        }
    }

    #[test]
    fn many_body_levels_cover_all_subsets() {
        let s = ExcitationSpectrum::from_eps(vec![1.0, 2.0]);
        let levels = s.many_body_levels();
        let e: Vec<f64> = levels.iter().map(|l| l.0).collect();
        assert_eq!(e, vec![-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(levels[3].1, 2);
    }
}
