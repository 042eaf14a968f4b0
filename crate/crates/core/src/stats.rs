//! Running second-moment estimates
//! `R_n = Σ γ^{n-ν} a_ν a_ν^T / Γ_n`, `r_n = Σ γ^{n-ν} b_ν a_ν / Γ_n`,
//! `Γ_n = Σ γ^{n-ν}`. With `γ = 1` these are the plain sample averages.

use ndarray::ArrayView1;

use crate::error::{Error, Result};
use crate::linalg::{SymMat, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct RunningMoments {
    pub r_mat: SymMat,
    pub r_vec: Vector,
    pub n: usize,
    pub gamma: f64,
    /// `Γ_n`.
    pub weight_sum: f64,
}

impl RunningMoments {
    /// Zero-initialized `R_0 = 0`, `r_0 = 0`.
    pub fn new(dim: usize, gamma: f64) -> Result<Self> {
        Self::with_init(dim, gamma, 0.0)
    }

    /// `R_0 = δ I`, `r_0 = 0`. The initial value only feeds the
    /// initialization step of the solvers; it carries zero weight from `n = 1`.
    pub fn with_init(dim: usize, gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("forgetting factor {gamma} outside (0, 1]")));
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidParameter(format!("initial diagonal {delta} must be >= 0")));
        }
        Ok(RunningMoments {
            r_mat: SymMat::identity(dim).scaled(delta),
            r_vec: Vector::zeros(dim),
            n: 0,
            gamma,
            weight_sum: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.r_vec.len()
    }

    /// Rank-one update with a new pair `(a_n, b_n)`.
    pub fn update(&mut self, a: ArrayView1<f64>, b: f64) {
        assert_eq!(a.len(), self.dim(), "sample dimension mismatch");
        self.n += 1;
        if self.gamma == 1.0 {
            let n = self.n as f64;
            let keep = (n - 1.0) / n;
            self.r_mat.scale_add_outer(keep, 1.0 / n, a);
            self.r_vec.zip_mut_with(&a, |r, &ai| *r = keep * *r + b * ai / n);
            self.weight_sum = n;
        } else {
            let prev = self.gamma * self.weight_sum;
            let total = prev + 1.0;
            let keep = prev / total;
            self.r_mat.scale_add_outer(keep, 1.0 / total, a);
            self.r_vec.zip_mut_with(&a, |r, &ai| *r = keep * *r + b * ai / total);
            self.weight_sum = total;
        }
    }

    /// `Γ_n` in closed form.
    pub fn expected_weight_sum(gamma: f64, n: usize) -> f64 {
        if gamma == 1.0 {
            n as f64
        } else {
            (1.0 - gamma.powi(n as i32)) / (1.0 - gamma)
        }
    }
}

/// Direct weighted summation over all samples; reference for the recursion.
pub fn batch_recompute(samples: &[(Vector, f64)], gamma: f64) -> Result<RunningMoments> {
    let Some((first, _)) = samples.first() else {
        return Err(Error::InvalidParameter("batch_recompute needs at least one sample".into()));
    };
    let d = first.len();
    let n = samples.len();
    let mut r_mat = SymMat::zeros(d);
    let mut r_vec = Vector::zeros(d);
    let mut total = 0.0;
    for (nu, (a, b)) in samples.iter().enumerate() {
        let w = gamma.powi((n - 1 - nu) as i32);
        r_mat.scale_add_outer(1.0, w, a.view());
        r_vec.scaled_add(w * b, a);
        total += w;
    }
    Ok(RunningMoments { r_mat: r_mat.scaled(1.0 / total), r_vec: r_vec / total, n, gamma, weight_sum: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn single_sample() {
        let mut m = RunningMoments::new(2, 1.0).unwrap();
        m.update(array![1.0, 0.0].view(), 2.0);
        assert_eq!(m.r_mat.as_array(), &array![[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(m.r_vec, array![2.0, 0.0]);
        assert_eq!(m.n, 1);
        assert_eq!(m.weight_sum, 1.0);
        let batch = batch_recompute(&[(array![1.0, 0.0], 2.0)], 1.0).unwrap();
        assert_eq!(batch, m);
    }

    #[test]
    fn two_samples_plain_and_weighted() {
        let mut m = RunningMoments::new(2, 1.0).unwrap();
        m.update(array![1.0, 0.0].view(), 2.0);
        m.update(array![0.0, 1.0].view(), 4.0);
        assert_eq!(m.r_mat.as_array(), &(Array2::eye(2) * 0.5));
        assert_eq!(m.r_vec, array![1.0, 2.0]);

        let mut w = RunningMoments::new(2, 0.5).unwrap();
        w.update(array![1.0, 0.0].view(), 2.0);
        w.update(array![0.0, 1.0].view(), 4.0);
        assert_abs_diff_eq!(w.weight_sum, 1.5);
        let expected = array![[0.5, 0.0], [0.0, 1.0]] / 1.5;
        assert_abs_diff_eq!(w.r_mat.as_array(), &expected, epsilon = 1e-15);
        assert_abs_diff_eq!(w.r_vec, array![1.0, 4.0] / 1.5, epsilon = 1e-15);
    }

    #[test]
    fn weight_sum_closed_form() {
        let mut m = RunningMoments::new(1, 0.9).unwrap();
        for n in 1..=200 {
            m.update(array![1.0].view(), 0.0);
            assert_abs_diff_eq!(m.weight_sum, RunningMoments::expected_weight_sum(0.9, n), epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(RunningMoments::new(2, 0.0).is_err());
        assert!(RunningMoments::new(2, 1.1).is_err());
        assert!(RunningMoments::with_init(2, 1.0, -1.0).is_err());
        assert!(batch_recompute(&[], 1.0).is_err());
    }

    #[test]
    fn init_delta_has_no_weight_after_first_sample() {
        let mut m = RunningMoments::with_init(2, 1.0, 3.0).unwrap();
        assert_eq!(m.r_mat, SymMat::identity(2).scaled(3.0));
        m.update(array![1.0, 1.0].view(), 1.0);
        assert_eq!(m.r_mat.as_array(), &Array2::from_elem((2, 2), 1.0));
    }

    #[test]
    fn noiseless_normal_equations_hold_every_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let theta = array![1.0, 0.0, -1.0, 0.0, 0.5];
        let mut m = RunningMoments::new(5, 1.0).unwrap();
        for _ in 0..500 {
            let a = Vector::from_iter((0..5).map(|_| StandardNormal.sample(&mut rng)));
            let b = a.dot(&theta);
            m.update(a.view(), b);
            let res = m.r_mat.matvec(theta.view()) - &m.r_vec;
            assert!(res.iter().all(|v| v.abs() <= 1e-10));
        }
    }
}
