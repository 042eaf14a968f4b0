//! ℓ1-regularized ensemble least squares by variable splitting on
//! `R^D x R^D`: the quadratic loss acts on block 1, `ρ||.||_1` on block 2,
//! and the constraint "block 1 = block 2" is enforced by the consensus
//! projection as the (exact) mapping.

use ndarray::{s, ArrayView1};

use super::{check_iterate, Oracles, SolverState};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::maps::{consensus_projection, AffineMap};
use crate::prox::{product_prox, quad_prox, soft_threshold, L1Prox, ProxOracle, QuadraticProx};
use crate::stats::RunningMoments;

fn split(x: &Vector) -> (ArrayView1<'_, f64>, ArrayView1<'_, f64>) {
    let d = x.len() / 2;
    (x.slice(s![..d]), x.slice(s![d..]))
}

fn block_mean(x: &Vector) -> Vector {
    let (a, b) = split(x);
    (&a + &b) * 0.5
}

fn stack(a: &Vector, b: &Vector) -> Vector {
    ndarray::concatenate![ndarray::Axis(0), *a, *b]
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("rho = {rho} must be positive")))
    }
}

/// Block prox: resolvent of the quadratic on block 1, threshold `λρ` on block 2.
fn split_prox(x_half: &Vector, moments: &RunningMoments, lambda: f64, rho: f64) -> Result<Vector> {
    let (h1, h2) = split(x_half);
    let x1 = quad_prox(h1, &moments.r_mat, moments.r_vec.view(), lambda)?;
    let x2 = soft_threshold(h2, lambda * rho)?;
    Ok(stack(&x1, &x2))
}

/// Initialization on the stacked vector `x0 = (x0^(1), x0^(2))` of length `2D`.
pub fn cregls_init(x0: Vector, moments: &RunningMoments, alpha: f64, lambda: f64, rho: f64) -> Result<SolverState> {
    check_rho(rho)?;
    if x0.len() != 2 * moments.dim() {
        return Err(Error::DimensionMismatch { expected: 2 * moments.dim(), found: x0.len() });
    }
    check_iterate(&x0, 0)?;
    let mean = block_mean(&x0);
    let consensus = stack(&mean, &mean);
    let x_half = &consensus * alpha + &x0 * (1.0 - alpha);
    let x1 = split_prox(&x_half, moments, lambda, rho)?;
    check_iterate(&x1, 1)?;
    let dim = x0.len();
    Ok(SolverState { buf_t: x_half.clone(), x_prev: x0, x_cur: x1, x_half, buf_grad: Vector::zeros(dim), n: 1 })
}

/// ```text
/// x^(i)_{n+1/2} = x^(i)_{n-1/2} - α x̄_{n-1} - (1 - α) x^(i)_{n-1} + x̄_n
/// ```
/// followed by the block prox; `x̄` is the block mean.
pub fn cregls_step(state: &mut SolverState, moments: &RunningMoments, alpha: f64, lambda: f64, rho: f64) -> Result<()> {
    check_rho(rho)?;
    let n = state.n;
    let mean_prev = block_mean(&state.x_prev);
    let mean_cur = block_mean(&state.x_cur);
    let shift_prev = stack(&mean_prev, &mean_prev);
    let shift_cur = stack(&mean_cur, &mean_cur);
    let mut x_half = &state.x_half - &(&shift_prev * alpha);
    x_half.scaled_add(-(1.0 - alpha), &state.x_prev);
    x_half += &shift_cur;
    let x_next = split_prox(&x_half, moments, lambda, rho)?;
    check_iterate(&x_next, n + 1)?;
    state.buf_t = &shift_cur * alpha + &state.x_cur * (1.0 - alpha);
    state.x_prev = std::mem::replace(&mut state.x_cur, x_next);
    state.x_half = x_half;
    state.n = n + 1;
    Ok(())
}

/// The estimate in `R^D`: the mean of the two blocks.
pub fn cregls_estimate(state: &SolverState) -> Vector {
    block_mean(&state.x_cur)
}

/// Engine oracles for the split formulation; `moments[n]` is `(R_n, r_n)`.
#[derive(Debug, Clone)]
pub struct CreglsOracles {
    pub moments: Vec<RunningMoments>,
    pub rho: f64,
}

impl Oracles for CreglsOracles {
    fn map_at(&mut self, _n: usize) -> Result<AffineMap> {
        let d = self.moments.first().map(|m| m.dim()).unwrap_or(0);
        consensus_projection(2, d)
    }

    fn grad_at(&mut self, _n: usize, x: ArrayView1<f64>) -> Vector {
        Vector::zeros(x.len())
    }

    fn prox_at(&mut self, n: usize) -> Result<Box<dyn ProxOracle + '_>> {
        let m =
            self.moments.get(n).ok_or_else(|| Error::InvalidParameter(format!("no moments recorded for step {n}")))?;
        let d = m.dim();
        let parts: Vec<(Box<dyn ProxOracle + '_>, std::ops::Range<usize>)> = vec![
            (Box::new(QuadraticProx { r_mat: &m.r_mat, r_vec: m.r_vec.view() }), 0..d),
            (Box::new(L1Prox { weight: self.rho }), d..2 * d),
        ];
        Ok(Box::new(product_prox(parts, 2 * d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist2, norm2, SymMat};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn saturated_threshold_pins_block_two() {
        let m = RunningMoments::new(2, 1.0).unwrap();
        let x0 = array![1.0, -2.0, 3.0, 0.5];
        let mut s = cregls_init(x0, &m, 0.5, 0.1, 1e9).unwrap();
        for _ in 0..20 {
            assert_eq!(s.x_cur.slice(s![2..]), array![0.0, 0.0]);
            let est = cregls_estimate(&s);
            assert_abs_diff_eq!(est, &s.x_cur.slice(s![..2]) * 0.5, epsilon = 1e-15);
            cregls_step(&mut s, &m, 0.5, 0.1, 1e9).unwrap();
        }
    }

    #[test]
    fn init_hand_values() {
        // x̄_0 = (2), x_{1/2} = 0.5 * (2, 2) + 0.5 * (1, 3) = (1.5, 2.5)
        let m = RunningMoments::new(1, 1.0).unwrap();
        let s = cregls_init(array![1.0, 3.0], &m, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(s.x_half, array![1.5, 2.5]);
        assert_eq!(s.x_cur, array![1.5, 1.5]);
        assert_eq!(cregls_estimate(&s), array![1.5]);
    }

    #[test]
    fn vanishing_rho_converges_to_least_squares() {
        let r = SymMat::from_lower(array![[2.0, 0.5, 0.0], [0.5, 1.5, 0.2], [0.0, 0.2, 1.0]]).unwrap();
        let theta = array![1.0, -0.5, 0.25];
        let mut m = RunningMoments::new(3, 1.0).unwrap();
        m.r_vec = r.matvec(theta.view());
        m.r_mat = r;
        let mut s = cregls_init(Vector::zeros(6), &m, 0.5, 0.5, 1e-12).unwrap();
        for _ in 0..3000 {
            cregls_step(&mut s, &m, 0.5, 0.5, 1e-12).unwrap();
        }
        let est = cregls_estimate(&s);
        assert!(dist2(est.view(), theta.view()) / norm2(theta.view()) < 1e-8);
    }

    #[test]
    fn rejects_bad_input() {
        let m = RunningMoments::new(2, 1.0).unwrap();
        assert!(cregls_init(Vector::zeros(4), &m, 0.5, 0.1, 0.0).is_err());
        assert!(matches!(cregls_init(Vector::zeros(3), &m, 0.5, 0.1, 1.0), Err(Error::DimensionMismatch { .. })));
    }
}
