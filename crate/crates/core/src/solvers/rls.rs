//! Exponentially weighted recursive least squares, the baseline.

use ndarray::ArrayView1;

use crate::error::{Error, Result};
use crate::linalg::{SymMat, Vector};

/// `k = P a / (γ + a^T P a)`, `w += k (b - a^T w)`, `P = (P - k a^T P) / γ`.
///
/// The covariance update is written as `P - u u^T / s` with `u = P a`,
/// which keeps `P` exactly symmetric.
pub fn classical_rls_step(p: &mut SymMat, w: &mut Vector, a: ArrayView1<f64>, b: f64, gamma: f64) {
    let u = p.matvec(a);
    let s = gamma + a.dot(&u);
    let err = b - a.dot(w);
    w.scaled_add(err / s, &u);
    p.scale_add_outer(1.0 / gamma, -1.0 / (s * gamma), u.view());
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rls {
    pub p: SymMat,
    pub w: Vector,
    pub gamma: f64,
}

impl Rls {
    /// `P_0 = δ^{-1} I`, `w_0 = 0`.
    pub fn new(dim: usize, gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("forgetting factor {gamma} outside (0, 1]")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("regularization delta = {delta} must be positive")));
        }
        Ok(Rls { p: SymMat::identity(dim).scaled(1.0 / delta), w: Vector::zeros(dim), gamma })
    }

    pub fn update(&mut self, a: ArrayView1<f64>, b: f64) {
        classical_rls_step(&mut self.p, &mut self.w, a, b, self.gamma);
    }
}
