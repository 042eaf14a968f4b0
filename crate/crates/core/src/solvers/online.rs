//! Streaming wrappers: feed `(a_n, b_n)` one at a time, read the estimate.
//!
//! After `observe` has seen `n` samples the HRLS/CRegLS estimate is
//! `x_{n+1}`, the first iterate that used `(R_n, r_n)`.

use ndarray::ArrayView1;

use super::{
    cregls_estimate, cregls_init, cregls_step, hrlsa_init, hrlsa_step, hrlsb_init, hrlsb_step, Rls, SolverState,
    VarpiEstimator, VarpiMode,
};
use crate::error::Result;
use crate::linalg::{dist2, Vector};
use crate::maps::check_alpha;
use crate::stats::RunningMoments;

pub trait OnlineEstimator: Send {
    fn observe(&mut self, a: ArrayView1<f64>, b: f64) -> Result<()>;

    fn estimate(&self) -> Vector;

    /// Current `ϖ_n`, for estimators that use one.
    fn varpi(&self) -> Option<f64> {
        None
    }

    /// `||x_{n+1} - x_n||` of the last update.
    fn step_delta(&self) -> f64;
}

/// Settings shared by the HRLS-type estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlsSettings {
    pub alpha: f64,
    pub lambda: f64,
    /// Forgetting factor of the running moments.
    pub gamma: f64,
    /// `R_0 = delta_init * I`.
    pub delta_init: f64,
}

impl HlsSettings {
    fn moments(&self, dim: usize) -> Result<RunningMoments> {
        check_alpha(self.alpha)?;
        RunningMoments::with_init(dim, self.gamma, self.delta_init)
    }
}

pub struct HrlsaOnline {
    settings: HlsSettings,
    moments: RunningMoments,
    prev_moments: RunningMoments,
    varpi_est: VarpiEstimator,
    varpi_cur: f64,
    state: SolverState,
}

impl HrlsaOnline {
    pub fn new(dim: usize, settings: HlsSettings, varpi: VarpiMode) -> Result<Self> {
        let moments = settings.moments(dim)?;
        let mut varpi_est = VarpiEstimator::new(varpi, dim)?;
        let varpi_cur = varpi_est.estimate(&moments)?;
        let state = hrlsa_init(Vector::zeros(dim), &moments, settings.alpha, settings.lambda, varpi_cur)?;
        Ok(HrlsaOnline { settings, prev_moments: moments.clone(), moments, varpi_est, varpi_cur, state })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }
}

impl OnlineEstimator for HrlsaOnline {
    fn observe(&mut self, a: ArrayView1<f64>, b: f64) -> Result<()> {
        self.prev_moments.clone_from(&self.moments);
        self.moments.update(a, b);
        let varpi_prev = self.varpi_cur;
        self.varpi_cur = self.varpi_est.estimate(&self.moments)?;
        let s = &self.settings;
        hrlsa_step(&mut self.state, &self.moments, &self.prev_moments, s.alpha, s.lambda, self.varpi_cur, varpi_prev)
    }

    fn estimate(&self) -> Vector {
        self.state.x_cur.clone()
    }

    fn varpi(&self) -> Option<f64> {
        Some(self.varpi_cur)
    }

    fn step_delta(&self) -> f64 {
        self.state.step_delta()
    }
}

pub struct HrlsbOnline {
    settings: HlsSettings,
    kappa: f64,
    moments: RunningMoments,
    state: SolverState,
}

impl HrlsbOnline {
    pub fn new(dim: usize, settings: HlsSettings, kappa: f64) -> Result<Self> {
        let moments = settings.moments(dim)?;
        let state = hrlsb_init(Vector::zeros(dim), &moments, settings.alpha, settings.lambda, kappa)?;
        Ok(HrlsbOnline { settings, kappa, moments, state })
    }
}

impl OnlineEstimator for HrlsbOnline {
    fn observe(&mut self, a: ArrayView1<f64>, b: f64) -> Result<()> {
        self.moments.update(a, b);
        hrlsb_step(&mut self.state, &self.moments, self.settings.alpha, self.settings.lambda, self.kappa)
    }

    fn estimate(&self) -> Vector {
        self.state.x_cur.clone()
    }

    fn step_delta(&self) -> f64 {
        self.state.step_delta()
    }
}

pub struct CreglsOnline {
    settings: HlsSettings,
    rho: f64,
    moments: RunningMoments,
    state: SolverState,
    last_delta: f64,
}

impl CreglsOnline {
    pub fn new(dim: usize, settings: HlsSettings, rho: f64) -> Result<Self> {
        let moments = settings.moments(dim)?;
        let state = cregls_init(Vector::zeros(2 * dim), &moments, settings.alpha, settings.lambda, rho)?;
        let last_delta = crate::linalg::norm2(cregls_estimate(&state).view());
        Ok(CreglsOnline { settings, rho, moments, state, last_delta })
    }
}

impl OnlineEstimator for CreglsOnline {
    fn observe(&mut self, a: ArrayView1<f64>, b: f64) -> Result<()> {
        self.moments.update(a, b);
        let before = cregls_estimate(&self.state);
        cregls_step(&mut self.state, &self.moments, self.settings.alpha, self.settings.lambda, self.rho)?;
        self.last_delta = dist2(cregls_estimate(&self.state).view(), before.view());
        Ok(())
    }

    fn estimate(&self) -> Vector {
        cregls_estimate(&self.state)
    }

    fn step_delta(&self) -> f64 {
        self.last_delta
    }
}

pub struct RlsOnline {
    rls: Rls,
    n: usize,
    last_delta: f64,
}

impl RlsOnline {
    pub fn new(dim: usize, gamma: f64, delta: f64) -> Result<Self> {
        Ok(RlsOnline { rls: Rls::new(dim, gamma, delta)?, n: 0, last_delta: 0.0 })
    }
}

impl OnlineEstimator for RlsOnline {
    fn observe(&mut self, a: ArrayView1<f64>, b: f64) -> Result<()> {
        let before = self.rls.w.clone();
        self.rls.update(a, b);
        self.n += 1;
        super::check_iterate(&self.rls.w, self.n)?;
        self.last_delta = dist2(self.rls.w.view(), before.view());
        Ok(())
    }

    fn estimate(&self) -> Vector {
        self.rls.w.clone()
    }

    fn step_delta(&self) -> f64 {
        self.last_delta
    }
}
