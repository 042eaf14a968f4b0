//! The S-FM-HSDM engine and its specializations.
//!
//! The generic engine iterates, for `n >= 1`,
//!
//! ```text
//! x_{n+1/2} = x_{n-1/2} - [T_{n-1}^(α) x_{n-1} - λ ∇f_{n-1}(x_{n-1})]
//!                       + [T_n x_n           - λ ∇f_n(x_n)]
//! x_{n+1}   = prox_{λ(h_n + g)}(x_{n+1/2})
//! ```
//!
//! Note the asymmetry: the subtracted bracket uses the *averaged* mapping of
//! the previous step, the added bracket the plain mapping of the current
//! step. Both brackets come from a single evaluation of `T_n` and `∇f_n`
//! per step; the averaged one is buffered for the next step.

mod cregls;
mod fejer;
mod hrls;
pub mod online;
mod rls;

use ndarray::ArrayView1;

pub use cregls::{cregls_estimate, cregls_init, cregls_step, CreglsOracles};
pub use fejer::{l1_min_norm_subgradient, FejerDiag};
pub use hrls::{hrlsa_init, hrlsa_step, hrlsb_init, hrlsb_step, HlsMapping, HlsOracles, VarpiEstimator, VarpiMode};
pub use rls::{classical_rls_step, Rls};

use crate::error::{Error, Result};
use crate::linalg::{norm2, Vector};
use crate::maps::{check_alpha, AffineMap};
use crate::prox::ProxOracle;

/// Iterates with a norm above this are treated as diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// `α ∈ [0.5, 1)`, `λ ∈ (0, 2(1 - α)/L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub alpha: f64,
    pub lambda: f64,
    /// Lipschitz constant of `∇f`; any positive surrogate when `f = 0`.
    pub lipschitz: f64,
    pub horizon: Option<usize>,
}

impl SolverParams {
    pub fn new(alpha: f64, lambda: f64, lipschitz: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(Error::InvalidParameter(format!("Lipschitz constant {lipschitz} must be positive")));
        }
        let upper = Self::lambda_upper(alpha, lipschitz);
        if !(lambda > 0.0 && lambda < upper) {
            return Err(Error::InvalidLambda { lambda, upper });
        }
        Ok(SolverParams { alpha, lambda, lipschitz, horizon: None })
    }

    /// Parameters with `λ = fraction * 2(1 - α)/L`.
    pub fn from_fraction(alpha: f64, fraction: f64, lipschitz: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Self::new(alpha, fraction * Self::lambda_upper(alpha, lipschitz), lipschitz)
    }

    pub fn lambda_upper(alpha: f64, lipschitz: f64) -> f64 {
        2.0 * (1.0 - alpha) / lipschitz
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = Some(horizon);
        self
    }
}

/// Iterate triple and buffers of the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    /// `x_{n-1}`.
    pub x_prev: Vector,
    /// `x_n`.
    pub x_cur: Vector,
    /// `x_{n-1/2}`.
    pub x_half: Vector,
    /// `T_{n-1}^(α) x_{n-1}`.
    pub buf_t: Vector,
    /// `∇f_{n-1}(x_{n-1})`.
    pub buf_grad: Vector,
    /// Index of `x_cur`.
    pub n: usize,
}

impl SolverState {
    pub fn step_delta(&self) -> f64 {
        crate::linalg::dist2(self.x_cur.view(), self.x_prev.view())
    }
}

/// Stochastic oracle: `T_n`, `∇f_n` and `prox_{λ(h_n + g)}` at time `n`.
pub trait Oracles {
    fn map_at(&mut self, n: usize) -> Result<AffineMap>;

    fn grad_at(&mut self, n: usize, x: ArrayView1<f64>) -> Vector;

    fn prox_at(&mut self, n: usize) -> Result<Box<dyn ProxOracle + '_>>;
}

pub(crate) fn check_iterate(x: &Vector, step: usize) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) && norm2(x.view()) <= DIVERGENCE_NORM {
        Ok(())
    } else {
        Err(Error::NonFinite { step })
    }
}

/// `x_{1/2} = T_0^(α) x_0 - λ ∇f_0(x_0)`, `x_1 = prox_{λ(h_0+g)}(x_{1/2})`.
pub fn engine_init<O: Oracles + ?Sized>(params: &SolverParams, oracles: &mut O, x0: Vector) -> Result<SolverState> {
    check_iterate(&x0, 0)?;
    let t0 = oracles.map_at(0)?;
    if t0.dim() != x0.len() {
        return Err(Error::DimensionMismatch { expected: x0.len(), found: t0.dim() });
    }
    let tx = t0.apply(x0.view());
    let grad = oracles.grad_at(0, x0.view());
    let alpha = params.alpha;
    let buf_t = tx * alpha + &x0 * (1.0 - alpha);
    let x_half = &buf_t - &(&grad * params.lambda);
    let x1 = oracles.prox_at(0)?.prox(x_half.view(), params.lambda)?;
    check_iterate(&x1, 1)?;
    Ok(SolverState { x_prev: x0, x_cur: x1, x_half, buf_t, buf_grad: grad, n: 1 })
}

/// One pass of the main loop: produces `x_{n+1}` from `x_n`.
pub fn engine_step<O: Oracles + ?Sized>(state: &mut SolverState, params: &SolverParams, oracles: &mut O) -> Result<()> {
    let n = state.n;
    let (alpha, lambda) = (params.alpha, params.lambda);
    let tn = oracles.map_at(n)?;
    let tx = tn.apply(state.x_cur.view());
    let grad = oracles.grad_at(n, state.x_cur.view());

    let mut x_half = state.x_half.clone();
    x_half -= &state.buf_t;
    x_half.scaled_add(lambda, &state.buf_grad);
    x_half += &tx;
    x_half.scaled_add(-lambda, &grad);

    let x_next = oracles.prox_at(n)?.prox(x_half.view(), lambda)?;
    check_iterate(&x_next, n + 1)?;

    state.buf_t = tx * alpha + &state.x_cur * (1.0 - alpha);
    state.buf_grad = grad;
    state.x_prev = std::mem::replace(&mut state.x_cur, x_next);
    state.x_half = x_half;
    state.n = n + 1;
    Ok(())
}

/// Oracles with a fixed mapping, no smooth term and a fixed prox; the
/// exact-`T` regime.
pub struct FixedOracles<P> {
    pub map: AffineMap,
    pub prox: P,
}

impl<P: ProxOracle + Clone> Oracles for FixedOracles<P> {
    fn map_at(&mut self, _n: usize) -> Result<AffineMap> {
        Ok(self.map.clone())
    }

    fn grad_at(&mut self, _n: usize, x: ArrayView1<f64>) -> Vector {
        Vector::zeros(x.len())
    }

    fn prox_at(&mut self, _n: usize) -> Result<Box<dyn ProxOracle + '_>> {
        Ok(Box::new(self.prox.clone()))
    }
}
