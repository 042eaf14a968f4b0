//! Hierarchical RLS: the engine with `f = h = 0`, `g = ||.||_1` and
//! `T_n` built from the running moments `(R_n, r_n)`.
//!
//! * HRLSa: `T_n = I - R_n/ϖ_n` on `x`, plus `r_n/ϖ_n`.
//! * HRLSb: `T_n = (I + κ R_n)^{-1}(. + κ r_n)`.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use super::{check_iterate, Oracles, SolverState};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, power_iter_estimate, Vector};
use crate::maps::{grad_map, prox_map, verify_family_membership, AffineMap};
use crate::prox::{quad_prox, soft_threshold, L1Prox, ProxOracle};
use crate::stats::RunningMoments;

fn default_eps() -> f64 {
    0.05
}

fn default_inner() -> usize {
    1
}

/// How the over-estimate `ϖ_n >= ||R_n||` is produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum VarpiMode {
    /// One power-iteration round per sample carried across samples, plus `eps`.
    /// Cheap, but not a guaranteed upper bound.
    Power {
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default = "default_inner")]
        inner_steps: usize,
    },
    /// Jacobi spectral norm plus `margin`.
    Exact { margin: f64 },
    /// A constant, as in the fixed-`ϖ` convergence regime.
    Fixed { value: f64 },
}

impl Default for VarpiMode {
    fn default() -> Self {
        VarpiMode::Power { eps: default_eps(), inner_steps: default_inner() }
    }
}

#[derive(Debug, Clone)]
pub struct VarpiEstimator {
    pub mode: VarpiMode,
    p: Vector,
}

impl VarpiEstimator {
    pub fn new(mode: VarpiMode, dim: usize) -> Result<Self> {
        match mode {
            VarpiMode::Power { eps, inner_steps } if !(eps > 0.0) || inner_steps == 0 => {
                return Err(Error::InvalidParameter(format!(
                    "power mode needs eps > 0 and >= 1 step (got {eps}, {inner_steps})"
                )))
            }
            VarpiMode::Exact { margin } if !(margin > 0.0) => {
                return Err(Error::InvalidParameter(format!("exact mode needs margin > 0 (got {margin})")))
            }
            VarpiMode::Fixed { value } if !(value > 0.0) || !value.is_finite() => {
                return Err(Error::InvalidParameter(format!("fixed varpi must be positive (got {value})")))
            }
            _ => {}
        }
        Ok(VarpiEstimator { mode, p: Vector::from_elem(dim, 1.0 / (dim as f64).sqrt()) })
    }

    /// `ϖ` for the current `R_n`; the power vector is carried to the next call.
    pub fn estimate(&mut self, moments: &RunningMoments) -> Result<f64> {
        match self.mode {
            VarpiMode::Power { eps, inner_steps } => {
                let (varpi, p) = power_iter_estimate(&moments.r_mat, self.p.view(), eps, inner_steps)?;
                self.p = p;
                Ok(varpi)
            }
            VarpiMode::Exact { margin } => Ok(eig_sym(&moments.r_mat)?.spectral_norm() + margin),
            VarpiMode::Fixed { value } => Ok(value),
        }
    }
}

fn residual(moments: &RunningMoments, x: ArrayView1<f64>) -> Vector {
    moments.r_mat.matvec(x) - &moments.r_vec
}

/// `x_{1/2} = x_0 - (α/ϖ_0)(R_0 x_0 - r_0)`, `x_1 = soft(x_{1/2}, λ)`.
pub fn hrlsa_init(x0: Vector, moments: &RunningMoments, alpha: f64, lambda: f64, varpi: f64) -> Result<SolverState> {
    check_iterate(&x0, 0)?;
    let mut x_half = x0.clone();
    x_half.scaled_add(-alpha / varpi, &residual(moments, x0.view()));
    let x1 = soft_threshold(x_half.view(), lambda)?;
    check_iterate(&x1, 1)?;
    let dim = x0.len();
    Ok(SolverState { buf_t: x_half.clone(), x_prev: x0, x_cur: x1, x_half, buf_grad: Vector::zeros(dim), n: 1 })
}

/// ```text
/// x_{n+1/2} = x_n + x_{n-1/2} - x_{n-1}
///           + (α/ϖ_{n-1})(R_{n-1} x_{n-1} - r_{n-1}) - (1/ϖ_n)(R_n x_n - r_n)
/// x_{n+1}   = soft(x_{n+1/2}, λ)
/// ```
///
/// The previous-step term is recomputed from `prev_moments`, literally as
/// written; `buf_t` is kept in sync so the state stays interchangeable with
/// the generic engine's.
#[allow(clippy::too_many_arguments)]
pub fn hrlsa_step(
    state: &mut SolverState,
    moments: &RunningMoments,
    prev_moments: &RunningMoments,
    alpha: f64,
    lambda: f64,
    varpi_cur: f64,
    varpi_prev: f64,
) -> Result<()> {
    let n = state.n;
    let res_cur = residual(moments, state.x_cur.view());
    let res_prev = residual(prev_moments, state.x_prev.view());
    let mut x_half = &state.x_cur + &state.x_half - &state.x_prev;
    x_half.scaled_add(alpha / varpi_prev, &res_prev);
    x_half.scaled_add(-1.0 / varpi_cur, &res_cur);
    let x_next = soft_threshold(x_half.view(), lambda)?;
    check_iterate(&x_next, n + 1)?;

    let mut buf_t = state.x_cur.clone();
    buf_t.scaled_add(-alpha / varpi_cur, &res_cur);
    state.buf_t = buf_t;
    state.x_prev = std::mem::replace(&mut state.x_cur, x_next);
    state.x_half = x_half;
    state.n = n + 1;
    Ok(())
}

fn resolvent(moments: &RunningMoments, x: ArrayView1<f64>, kappa: f64) -> Result<Vector> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidKappa(kappa));
    }
    quad_prox(x, &moments.r_mat, moments.r_vec.view(), kappa)
}

/// `x_{1/2} = α T_0 x_0 + (1 - α) x_0`, `x_1 = soft(x_{1/2}, λ)`.
pub fn hrlsb_init(x0: Vector, moments: &RunningMoments, alpha: f64, lambda: f64, kappa: f64) -> Result<SolverState> {
    check_iterate(&x0, 0)?;
    let tx = resolvent(moments, x0.view(), kappa)?;
    let x_half = tx * alpha + &x0 * (1.0 - alpha);
    let x1 = soft_threshold(x_half.view(), lambda)?;
    check_iterate(&x1, 1)?;
    let dim = x0.len();
    Ok(SolverState { buf_t: x_half.clone(), x_prev: x0, x_cur: x1, x_half, buf_grad: Vector::zeros(dim), n: 1 })
}

/// `x_{n+1/2} = x_{n-1/2} - T_{n-1}^(α) x_{n-1} + T_n x_n`, then soft
/// thresholding. `T_{n-1}^(α) x_{n-1}` comes from the buffer, so one linear
/// solve per step suffices and the previous moments are not needed.
pub fn hrlsb_step(
    state: &mut SolverState,
    moments: &RunningMoments,
    alpha: f64,
    lambda: f64,
    kappa: f64,
) -> Result<()> {
    let n = state.n;
    let tx = resolvent(moments, state.x_cur.view(), kappa)?;
    let x_half = &state.x_half - &state.buf_t + &tx;
    let x_next = soft_threshold(x_half.view(), lambda)?;
    check_iterate(&x_next, n + 1)?;
    state.buf_t = tx * alpha + &state.x_cur * (1.0 - alpha);
    state.x_prev = std::mem::replace(&mut state.x_cur, x_next);
    state.x_half = x_half;
    state.n = n + 1;
    Ok(())
}

/// Which mapping the HRLS oracles hand to the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum HlsMapping {
    /// `grad_map(R_n, r_n, 1, ϖ_n)`; `varpi[n]` is `ϖ_n`.
    Gradient { varpi: Vec<f64> },
    /// `prox_map(R_n, r_n, κ)`.
    Resolvent { kappa: f64 },
}

/// Oracles over recorded moment snapshots; `moments[n]` is `(R_n, r_n)`.
#[derive(Debug, Clone)]
pub struct HlsOracles {
    pub moments: Vec<RunningMoments>,
    pub mapping: HlsMapping,
    /// Check every mapping handed out for family membership.
    pub verify: bool,
}

impl Oracles for HlsOracles {
    fn map_at(&mut self, n: usize) -> Result<AffineMap> {
        let m =
            self.moments.get(n).ok_or_else(|| Error::InvalidParameter(format!("no moments recorded for step {n}")))?;
        let map = match &self.mapping {
            HlsMapping::Gradient { varpi } => grad_map(&m.r_mat, m.r_vec.view(), 1.0, varpi[n], false)?,
            HlsMapping::Resolvent { kappa } => prox_map(&m.r_mat, m.r_vec.view(), *kappa)?,
        };
        if self.verify {
            let report = verify_family_membership(&map, Some((&m.r_mat, m.r_vec.view())))?;
            if !report.passed() {
                return Err(Error::InvalidParameter(format!(
                    "T_{n} outside the mapping family: {}",
                    report.failures.join("; ")
                )));
            }
        }
        Ok(map)
    }

    fn grad_at(&mut self, _n: usize, x: ArrayView1<f64>) -> Vector {
        Vector::zeros(x.len())
    }

    fn prox_at(&mut self, _n: usize) -> Result<Box<dyn ProxOracle + '_>> {
        Ok(Box::new(L1Prox { weight: 1.0 }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMat;
    use crate::solvers::{engine_init, engine_step, SolverParams};
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn fixed_moments(r: SymMat, v: Vector) -> RunningMoments {
        let n = v.len();
        let mut m = RunningMoments::new(n, 1.0).unwrap();
        m.r_mat = r;
        m.r_vec = v;
        m
    }

    fn state_at(c: f64) -> SolverState {
        let x = array![c];
        SolverState {
            x_prev: x.clone(),
            x_cur: x.clone(),
            x_half: x.clone(),
            buf_t: x.clone(),
            buf_grad: array![0.0],
            n: 3,
        }
    }

    #[test]
    fn hrlsa_half_step_identity_moments() {
        let m = fixed_moments(SymMat::identity(1), array![0.0]);
        for c in [2.0, -3.0, 10.0] {
            let mut s = state_at(c);
            // tiny λ keeps the threshold out of the way
            hrlsa_step(&mut s, &m, &m, 0.5, 1e-9, 1.0, 1.0).unwrap();
            assert_abs_diff_eq!(s.x_half[0], 0.5 * c, epsilon = 1e-15);
        }
    }

    #[test]
    fn hrlsa_zero_moments_telescope() {
        let m = RunningMoments::new(2, 1.0).unwrap();
        let mut s = SolverState {
            x_prev: array![1.0, 2.0],
            x_cur: array![3.0, -1.0],
            x_half: array![0.5, 0.5],
            buf_t: array![0.0, 0.0],
            buf_grad: array![0.0, 0.0],
            n: 5,
        };
        hrlsa_step(&mut s, &m, &m, 0.7, 0.1, 0.05, 0.05).unwrap();
        assert_eq!(s.x_half, array![3.0 + 0.5 - 1.0, -1.0 + 0.5 - 2.0]);
    }

    #[test]
    fn varpi_modes() {
        let m = fixed_moments(SymMat::from_diag(&[2.0, 1.0]), array![0.0, 0.0]);
        let mut e = VarpiEstimator::new(VarpiMode::Exact { margin: 0.1 }, 2).unwrap();
        assert_abs_diff_eq!(e.estimate(&m).unwrap(), 2.1, epsilon = 1e-12);
        let mut f = VarpiEstimator::new(VarpiMode::Fixed { value: 3.0 }, 2).unwrap();
        assert_eq!(f.estimate(&m).unwrap(), 3.0);
        let mut p = VarpiEstimator::new(VarpiMode::default(), 2).unwrap();
        let mut last = 0.0;
        for _ in 0..60 {
            last = p.estimate(&m).unwrap();
        }
        assert_abs_diff_eq!(last, 2.05, epsilon = 1e-6);
        assert!(VarpiEstimator::new(VarpiMode::Power { eps: 0.0, inner_steps: 1 }, 2).is_err());
        assert!(VarpiEstimator::new(VarpiMode::Exact { margin: 0.0 }, 2).is_err());
        assert!(VarpiEstimator::new(VarpiMode::Fixed { value: -1.0 }, 2).is_err());
    }

    #[test]
    fn hrlsb_single_step_matches_engine() {
        let r = SymMat::identity(2);
        let rv = array![1.0, -2.0];
        let m = fixed_moments(r, rv);
        let x0 = array![0.3, 0.7];
        let (alpha, lambda) = (0.5, 0.1);
        let mut stepper = hrlsb_init(x0.clone(), &m, alpha, lambda, 1.0).unwrap();
        hrlsb_step(&mut stepper, &m, alpha, lambda, 1.0).unwrap();

        // T = ½ I + ½ r
        let map = AffineMap::new(SymMat::identity(2).scaled(0.5), array![0.5, -1.0]).unwrap();
        let mut oracles = crate::solvers::FixedOracles { map, prox: L1Prox { weight: 1.0 } };
        let params = SolverParams::new(alpha, lambda, 1.0).unwrap();
        let mut gen = engine_init(&params, &mut oracles, x0).unwrap();
        engine_step(&mut gen, &params, &mut oracles).unwrap();
        assert_abs_diff_eq!(stepper.x_cur, gen.x_cur, epsilon = 1e-15);
        assert_abs_diff_eq!(stepper.x_half, gen.x_half, epsilon = 1e-15);
    }

    #[test]
    fn hrlsb_zero_moments_is_identity_map() {
        let m = RunningMoments::new(1, 1.0).unwrap();
        let mut s = hrlsb_init(array![2.0], &m, 0.5, 0.5, 1.0).unwrap();
        assert_eq!(s.x_half, array![2.0]);
        assert_eq!(s.x_cur, array![1.5]);
        hrlsb_step(&mut s, &m, 0.5, 0.5, 1.0).unwrap();
        // x_{3/2} = 2 - 2 + 1.5
        assert_eq!(s.x_half, array![1.5]);
        assert_eq!(s.x_cur, array![1.0]);
    }

    #[test]
    fn hrlsb_recovers_sparse_truth_on_stationary_moments() {
        let d = 20;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut moments = RunningMoments::new(d, 1.0).unwrap();
        let mut theta = Vector::zeros(d);
        theta[3] = 1.0;
        theta[11] = -1.0;
        for _ in 0..200 {
            let a = Vector::from_iter((0..d).map(|_| StandardNormal.sample(&mut rng)));
            let b = a.dot(&theta);
            moments.update(a.view(), b);
        }
        let (alpha, lambda) = (0.5, 0.05);
        let mut s = hrlsb_init(Vector::zeros(d), &moments, alpha, lambda, lambda).unwrap();
        for _ in 1..5000 {
            hrlsb_step(&mut s, &moments, alpha, lambda, lambda).unwrap();
        }
        let err = crate::linalg::dist2(s.x_cur.view(), theta.view()) / crate::linalg::norm2(theta.view());
        assert!(err <= 1e-6, "nrmsd {err}");
    }
}
