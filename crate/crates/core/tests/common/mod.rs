#![allow(dead_code)]

use hsdm_core::linalg::{SymMat, Vector};
use hsdm_core::solvers::{VarpiEstimator, VarpiMode};
use hsdm_core::stats::RunningMoments;
use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian_vec<R: Rng>(d: usize, rng: &mut R) -> Vector {
    Vector::from_iter((0..d).map(|_| StandardNormal.sample(rng)))
}

/// `A^T A / m + shift I` for a Gaussian `m x d` matrix `A`.
pub fn random_spd<R: Rng>(d: usize, m: usize, shift: f64, rng: &mut R) -> SymMat {
    let a = Array2::from_shape_fn((m, d), |_| StandardNormal.sample(rng));
    let g = a.t().dot(&a) / m as f64 + Array2::<f64>::eye(d) * shift;
    SymMat::from_lower(g).unwrap()
}

/// Moment snapshots `(R_0, r_0), ..., (R_n, r_n)` for a noisy sparse system.
pub fn moment_trace<R: Rng>(d: usize, steps: usize, noise: f64, rng: &mut R) -> Vec<RunningMoments> {
    let mut theta = Vector::zeros(d);
    theta[0] = 1.0;
    theta[d - 1] = -1.0;
    let mut m = RunningMoments::new(d, 1.0).unwrap();
    let mut out = vec![m.clone()];
    for _ in 0..steps {
        let a = gaussian_vec(d, rng);
        let e: f64 = StandardNormal.sample(rng);
        m.update(a.view(), a.dot(&theta) + noise * e);
        out.push(m.clone());
    }
    out
}

/// Power-iteration `ϖ_n` along a moment trace, as the online estimator makes them.
pub fn varpi_trace(moments: &[RunningMoments]) -> Vec<f64> {
    let mut est = VarpiEstimator::new(VarpiMode::default(), moments[0].dim()).unwrap();
    moments.iter().map(|m| est.estimate(m).unwrap()).collect()
}

pub fn max_abs_diff(a: &Vector, b: &Vector) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
