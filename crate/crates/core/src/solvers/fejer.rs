//! Fejér diagnostic for the exact-mapping regime.
//!
//! With `U = sqrt(I - Q)` for the exact `T = Q + π`, the auxiliary sequence
//! `v_{n+1} = v_n + (1 - α) U (x_{n+1} - x★)`, `v_0 = 0`, makes
//! `y_n = (x_n, v_n)` Fejér monotone in the norm
//!
//! ```text
//! ||y - y★||²_Θ = (x - x★)^T Q^(α) (x - x★) + ||v - v★||² / (1 - α)
//! ```
//!
//! where `v★` solves `U v★ = -λ (∇f(x★) + ξ★)` for a subgradient `ξ★`.

use ndarray::ArrayView1;

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, norm2, sqrt_psd, SymMat, Vector};
use crate::maps::{check_alpha, AffineMap};

/// Residual above which `U v★ = rhs` is considered inconsistent.
const V_STAR_TOL: f64 = 1e-8;

/// Minimal-norm element of `weight * ∂||.||_1(x)`: `weight * sign(x_d)` on
/// the support, zero elsewhere.
pub fn l1_min_norm_subgradient(x: ArrayView1<f64>, weight: f64) -> Vector {
    x.mapv(|v| if v == 0.0 { 0.0 } else { weight * v.signum() })
}

#[derive(Debug, Clone)]
pub struct FejerDiag {
    pub x_star: Vector,
    pub u: SymMat,
    pub q_alpha: SymMat,
    pub alpha: f64,
    pub lambda: f64,
    pub v_cur: Vector,
    /// `None` when `U v★ = rhs` has no solution; the trace then holds only
    /// the `x` part of the norm.
    pub v_star: Option<Vector>,
    pub theta_norm_trace: Vec<f64>,
}

impl FejerDiag {
    /// `grad_star` is `∇f(x★)` and `l1_weight` the weight of `g = weight ||.||_1`.
    pub fn new(
        map: &AffineMap,
        x_star: Vector,
        alpha: f64,
        lambda: f64,
        grad_star: ArrayView1<f64>,
        l1_weight: f64,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let d = map.dim();
        if x_star.len() != d || grad_star.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x_star.len() });
        }
        let identity = SymMat::identity(d);
        let u = sqrt_psd(&identity.lin_comb(1.0, &map.q, -1.0))?;
        let q_alpha = map.q.lin_comb(alpha, &identity, 1.0 - alpha);

        let xi = l1_min_norm_subgradient(x_star.view(), l1_weight);
        let rhs = (&grad_star + &xi) * (-lambda);
        let v = eig_sym(&u)?.pseudo_solve(rhs.view(), 1e-12);
        let res = norm2((u.matvec(v.view()) - &rhs).view());
        let v_star = (res <= V_STAR_TOL * (1.0 + norm2(rhs.view()))).then_some(v);

        Ok(FejerDiag {
            x_star,
            u,
            q_alpha,
            alpha,
            lambda,
            v_cur: Vector::zeros(d),
            v_star,
            theta_norm_trace: Vec::new(),
        })
    }

    pub fn v_star_available(&self) -> bool {
        self.v_star.is_some()
    }

    /// Advances `v` with `x_{n+1}` and appends `||y_{n+1} - y★||²_Θ`.
    pub fn update(&mut self, x_next: ArrayView1<f64>) -> f64 {
        let dx = &x_next - &self.x_star;
        self.v_cur.scaled_add(1.0 - self.alpha, &self.u.matvec(dx.view()));
        let value = self.theta_norm(x_next);
        self.theta_norm_trace.push(value);
        value
    }

    /// `||(x, v_cur) - y★||²_Θ`.
    pub fn theta_norm(&self, x: ArrayView1<f64>) -> f64 {
        let dx = &x - &self.x_star;
        let mut value = self.q_alpha.quad_form(dx.view());
        if let Some(v_star) = &self.v_star {
            let dv = &self.v_cur - v_star;
            value += dv.dot(&dv) / (1.0 - self.alpha);
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn subgradient_rule() {
        assert_eq!(l1_min_norm_subgradient(array![2.0, 0.0, -0.1].view(), 0.5), array![0.5, 0.0, -0.5]);
    }

    #[test]
    fn constant_at_solution() {
        let map = AffineMap::new(SymMat::from_diag(&[0.5, 0.25]), array![0.5, 0.75]).unwrap();
        let x_star = array![1.0, 1.0];
        let mut diag = FejerDiag::new(&map, x_star.clone(), 0.5, 0.1, array![0.0, 0.0].view(), 1.0).unwrap();
        assert!(diag.v_star_available());
        let first = diag.update(x_star.view());
        for _ in 0..10 {
            assert_eq!(diag.update(x_star.view()), first);
            assert_eq!(diag.v_cur, array![0.0, 0.0]);
        }
    }

    #[test]
    fn unit_increment_of_v() {
        // Q = 0 so U = I
        let map = AffineMap::new(SymMat::zeros(2), array![0.0, 0.0]).unwrap();
        let mut diag = FejerDiag::new(&map, array![0.0, 0.0], 0.5, 0.3, array![0.0, 0.0].view(), 1.0).unwrap();
        diag.update(array![1.0, 0.0].view());
        assert_abs_diff_eq!(diag.v_cur, array![0.5, 0.0], epsilon = 1e-15);
    }

    #[test]
    fn inconsistent_dual_is_flagged() {
        // U = 0 while ξ★ != 0
        let map = AffineMap::identity(1);
        let diag = FejerDiag::new(&map, array![1.0], 0.5, 0.1, array![0.0].view(), 1.0).unwrap();
        assert!(!diag.v_star_available());
        assert_abs_diff_eq!(diag.theta_norm(array![3.0].view()), 4.0, epsilon = 1e-15);
    }
}
