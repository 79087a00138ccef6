//! Multimode Gaussian states in the quadrature (covariance-matrix) picture.
//!
//! Quadratures are ordered `q1, p1, q2, p2, ...` with `q = (a + a†)/√2` and
//! `p = (a − a†)/(i√2)`. Covariances are symmetrized, so the vacuum has zero
//! mean and covariance `I/2`, and the photon number of mode `k` is
//! `(V_qq + V_pp − 1)/2 + (m_q² + m_p²)/2`.
//!
//! Every transform here is a symplectic map `x → S x` acting on a pair of
//! modes, applied as `m → S m`, `V → S V Sᵀ`. Lossy channels couple to an
//! environment mode that is appended, mixed in, and traced out again, so a
//! state never grows beyond the modes the caller created.

pub mod circuit;

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::error::{Error, Result};

/// Tolerance on symplectic eigenvalues below the vacuum value `1/2`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Mean and variance of a photon-number observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    pub mean: f64,
    pub variance: f64,
}

impl QuadratureState {
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::param("n_modes", 0.0, "must be >= 1"));
        }
        let dim = 2 * n_modes;
        Ok(Self {
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim) * 0.5,
        })
    }

    /// Product of independent thermal modes with the given mean photon numbers.
    pub fn thermal(mean_photons: &[f64]) -> Result<Self> {
        let mut state = Self::vacuum(mean_photons.len())?;
        for (k, &n) in mean_photons.iter().enumerate() {
            check_photons("mean_photon", n)?;
            state.cov[(2 * k, 2 * k)] = n + 0.5;
            state.cov[(2 * k + 1, 2 * k + 1)] = n + 0.5;
        }
        Ok(state)
    }

    /// Builds a state from raw moments; checks shape and symmetry only.
    pub fn from_moments(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 || cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Unphysical(format!(
                "mean of length {dim} and covariance {}x{} do not describe a mode set",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::Unphysical("covariance is not symmetric".into()));
        }
        let mut s = Self { mean, cov };
        s.symmetrize();
        Ok(s)
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i < self.n_modes() {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                index: i,
                n_modes: self.n_modes(),
            })
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::SameMode(i));
        }
        Ok(())
    }

    fn symmetrize(&mut self) {
        let t = self.cov.transpose();
        self.cov = (&self.cov + t) * 0.5;
    }

    /// Applies a 4x4 symplectic matrix, given in the local ordering
    /// `(q_i, p_i, q_j, p_j)`, to modes `i` and `j`.
    fn apply_pair(&self, i: usize, j: usize, local: &Matrix4<f64>) -> Self {
        let dim = self.mean.len();
        let idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
        let mut s = DMatrix::<f64>::identity(dim, dim);
        for (r, &gr) in idx.iter().enumerate() {
            for (c, &gc) in idx.iter().enumerate() {
                s[(gr, gc)] = local[(r, c)];
            }
        }
        let mut out = Self {
            mean: &s * &self.mean,
            cov: &s * &self.cov * s.transpose(),
        };
        out.symmetrize();
        out
    }

    /// Two-mode squeezer `a_i → c a_i + s a_j†`, `a_j → c a_j + s a_i†` with
    /// `s² = sinh² r = mean_photon`.
    ///
    /// On vacuum this prepares a two-mode squeezed vacuum with `mean_photon`
    /// photons per mode. With a vacuum `i` and a signal `j` it is a phase
    /// conjugator of gain `1 + mean_photon`, read out on mode `i`.
    pub fn two_mode_squeeze(&self, i: usize, j: usize, mean_photon: f64) -> Result<Self> {
        self.check_pair(i, j)?;
        check_photons("mean_photon", mean_photon)?;
        if mean_photon == 0.0 {
            return Ok(self.clone());
        }
        let s = mean_photon.sqrt();
        let c = (1.0 + mean_photon).sqrt();
        #[rustfmt::skip]
        let local = Matrix4::new(
            c,   0.0, s,   0.0,
            0.0, c,   0.0, -s,
            s,   0.0, c,   0.0,
            0.0, -s,  0.0, c,
        );
        Ok(self.apply_pair(i, j, &local))
    }

    /// Beamsplitter with `out_i = √T in_i + √(1−T) in_j` and
    /// `out_j = √(1−T) in_i − √T in_j`.
    pub fn beamsplitter(&self, i: usize, j: usize, transmissivity: f64) -> Result<Self> {
        self.check_pair(i, j)?;
        check_unit("transmissivity", transmissivity)?;
        let t = transmissivity.sqrt();
        let r = (1.0 - transmissivity).sqrt();
        #[rustfmt::skip]
        let local = Matrix4::new(
            t,   0.0, r,   0.0,
            0.0, t,   0.0, r,
            r,   0.0, -t,  0.0,
            0.0, r,   0.0, -t,
        );
        Ok(self.apply_pair(i, j, &local))
    }

    /// Phase rotation `a_i → e^{iθ} a_i`.
    pub fn phase_shift(&self, i: usize, theta: f64) -> Result<Self> {
        self.check_mode(i)?;
        let (sin, cos) = theta.sin_cos();
        let (q, p) = (2 * i, 2 * i + 1);
        let mut out = self.clone();
        let rotate = |x: f64, y: f64| (cos * x - sin * y, sin * x + cos * y);
        let (mq, mp) = rotate(self.mean[q], self.mean[p]);
        out.mean[q] = mq;
        out.mean[p] = mp;
        // rows then columns
        for c in 0..self.cov.ncols() {
            let (a, b) = rotate(out.cov[(q, c)], out.cov[(p, c)]);
            out.cov[(q, c)] = a;
            out.cov[(p, c)] = b;
        }
        for r in 0..self.cov.nrows() {
            let (a, b) = rotate(out.cov[(r, q)], out.cov[(r, p)]);
            out.cov[(r, q)] = a;
            out.cov[(r, p)] = b;
        }
        out.symmetrize();
        Ok(out)
    }

    /// Exact sign flip `a_i → −a_i` (BPSK pi shift).
    pub fn flip_sign(&self, i: usize) -> Result<Self> {
        self.check_mode(i)?;
        let mut out = self.clone();
        for k in [2 * i, 2 * i + 1] {
            out.mean[k] = -out.mean[k];
            for c in 0..out.cov.ncols() {
                out.cov[(k, c)] = -out.cov[(k, c)];
            }
            for r in 0..out.cov.nrows() {
                out.cov[(r, k)] = -out.cov[(r, k)];
            }
        }
        Ok(out)
    }

    /// Adds a coherent amplitude `α = re + i·im` to mode `i`.
    pub fn displace(&self, i: usize, re: f64, im: f64) -> Result<Self> {
        self.check_mode(i)?;
        let mut out = self.clone();
        out.mean[2 * i] += std::f64::consts::SQRT_2 * re;
        out.mean[2 * i + 1] += std::f64::consts::SQRT_2 * im;
        Ok(out)
    }

    /// Appends an independent thermal mode; returns its index.
    pub fn append_thermal(&self, mean_photon: f64) -> Result<(Self, usize)> {
        check_photons("mean_photon", mean_photon)?;
        let dim = self.mean.len();
        let mut mean = DVector::zeros(dim + 2);
        mean.rows_mut(0, dim).copy_from(&self.mean);
        let mut cov = DMatrix::zeros(dim + 2, dim + 2);
        cov.view_mut((0, 0), (dim, dim)).copy_from(&self.cov);
        cov[(dim, dim)] = mean_photon + 0.5;
        cov[(dim + 1, dim + 1)] = mean_photon + 0.5;
        Ok((Self { mean, cov }, self.n_modes()))
    }

    /// Partial trace over mode `i`; later modes shift down by one.
    pub fn trace_out(&self, i: usize) -> Result<Self> {
        self.check_mode(i)?;
        if self.n_modes() == 1 {
            return Err(Error::Unphysical("cannot trace out the only mode".into()));
        }
        let keep: Vec<usize> = (0..self.mean.len()).filter(|&k| k / 2 != i).collect();
        let mean = DVector::from_iterator(keep.len(), keep.iter().map(|&k| self.mean[k]));
        let cov = DMatrix::from_fn(keep.len(), keep.len(), |r, c| self.cov[(keep[r], keep[c])]);
        Ok(Self { mean, cov })
    }

    /// Thermal-loss channel: mode `i` meets a fresh thermal environment of
    /// `env_mean_photon` on a beamsplitter of transmissivity `kappa`, and the
    /// environment is discarded.
    pub fn thermal_loss(&self, i: usize, kappa: f64, env_mean_photon: f64) -> Result<Self> {
        self.check_mode(i)?;
        check_unit("kappa", kappa)?;
        check_photons("env_mean_photon", env_mean_photon)?;
        if kappa == 1.0 {
            return Ok(self.clone());
        }
        let (with_env, env) = self.append_thermal(env_mean_photon)?;
        with_env.beamsplitter(i, env, kappa)?.trace_out(env)
    }

    pub fn photon_mean(&self, i: usize) -> Result<f64> {
        self.check_mode(i)?;
        let (q, p) = (2 * i, 2 * i + 1);
        Ok((self.cov[(q, q)] + self.cov[(p, p)] - 1.0) / 2.0
            + (self.mean[q].powi(2) + self.mean[p].powi(2)) / 2.0)
    }

    /// Photon-number mean and variance of a single mode.
    pub fn photon_stats(&self, i: usize) -> Result<PhotonStats> {
        let mean = self.photon_mean(i)?;
        Ok(PhotonStats {
            mean,
            variance: self.number_covariance(i, i),
        })
    }

    /// `Cov(n_i, n_j)` from the Gaussian fourth-moment factorisation.
    ///
    /// With `C` the `2x2` block between the modes and `m` the means,
    /// `Cov = ½ Σ C_ab² + m_iᵀ C m_j`, less `¼` on the diagonal, which is the
    /// commutator left over from symmetric ordering.
    fn number_covariance(&self, i: usize, j: usize) -> f64 {
        let (bi, bj) = (2 * i, 2 * j);
        let mut frob = 0.0;
        let mut mixed = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let c = self.cov[(bi + a, bj + b)];
                frob += c * c;
                mixed += self.mean[bi + a] * c * self.mean[bj + b];
            }
        }
        let commutator = if i == j { 0.25 } else { 0.0 };
        0.5 * frob + mixed - commutator
    }

    /// Mean and variance of `n_i − n_j`. Exact for Gaussian states.
    pub fn photon_diff_stats(&self, i: usize, j: usize) -> Result<PhotonStats> {
        self.check_pair(i, j)?;
        let mean = self.photon_mean(i)? - self.photon_mean(j)?;
        let variance = self.number_covariance(i, i) + self.number_covariance(j, j)
            - 2.0 * self.number_covariance(i, j);
        Ok(PhotonStats {
            mean,
            variance: variance.max(0.0),
        })
    }

    /// Symplectic eigenvalues in ascending order, one per mode.
    ///
    /// With `V = L Lᵀ`, the antisymmetric matrix `Lᵀ Ω L` has eigenvalues
    /// `±iν`, so its singular values are the `ν` in degenerate pairs. Taking
    /// singular values directly keeps the error at `ε‖V‖`. A covariance that
    /// is not positive definite has a zero eigenvalue reported.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let dim = self.cov.nrows();
        let Some(chol) = self.cov.clone().cholesky() else {
            return vec![0.0; dim / 2];
        };
        let l = chol.l();
        let mut omega = DMatrix::<f64>::zeros(dim, dim);
        for k in 0..dim / 2 {
            omega[(2 * k, 2 * k + 1)] = 1.0;
            omega[(2 * k + 1, 2 * k)] = -1.0;
        }
        let a = l.transpose() * omega * &l;
        let mut nu: Vec<f64> = a.singular_values().iter().copied().collect();
        nu.sort_by(f64::total_cmp);
        nu.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
    }

    /// Slack allowed below `½` when testing physicality: the fixed
    /// [`PHYSICALITY_TOL`], or `ε‖V‖_F²` for strongly squeezed states, where
    /// rounding in the stored covariance itself dominates.
    pub fn physicality_tolerance(&self) -> f64 {
        PHYSICALITY_TOL.max(f64::EPSILON * self.cov.norm_squared())
    }

    pub fn is_physical(&self) -> bool {
        let tol = self.physicality_tolerance();
        self.symplectic_eigenvalues()
            .iter()
            .all(|&nu| nu >= 0.5 - tol)
    }
}

fn check_photons(name: &'static str, n: f64) -> Result<()> {
    if n.is_finite() && n >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, n, "must be finite and >= 0"))
    }
}

fn check_unit(name: &'static str, t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::param(name, t, "must lie in [0, 1]"))
    }
}
