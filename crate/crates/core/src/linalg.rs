//! Dense symmetric linear algebra.
//!
//! Everything here works on small dense matrices (D up to a few hundred).
//! [`SymMat`] keeps both triangles bit-identical; every mutating operation
//! below preserves that, so no re-symmetrization is ever needed.

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

/// Real vector in `R^D`.
pub type Vector = Array1<f64>;

/// Numerical tolerances used across the linear-algebra layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// First diagonal shift tried when Cholesky fails, relative to `trace/D`.
    pub chol_shift_start: f64,
    /// Largest diagonal shift tried, relative to `trace/D`.
    pub chol_shift_max: f64,
    /// Jacobi stops once the off-diagonal Frobenius norm falls below this
    /// fraction of the Frobenius norm of the input.
    pub jacobi_rel_offdiag: f64,
    /// Sweep cap is `jacobi_sweep_factor * D^2`.
    pub jacobi_sweep_factor: usize,
    /// Eigenvalues above `-psd_rel_tol * ||A||` are clamped to zero by
    /// [`sqrt_psd`]; anything below is rejected.
    pub psd_rel_tol: f64,
    /// Power iteration treats `||A p|| < power_zero` as a zero matrix.
    pub power_zero: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        chol_shift_start: 1e-12,
        chol_shift_max: 1e-6,
        jacobi_rel_offdiag: 1e-15,
        jacobi_sweep_factor: 10,
        psd_rel_tol: 1e-10,
        power_zero: 1e-14,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub fn norm2(x: ArrayView1<f64>) -> f64 {
    x.dot(&x).sqrt()
}

pub fn dist2(x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn check_finite(x: ArrayView1<f64>, what: &'static str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteInput { what })
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Symmetric `D x D` matrix. The lower triangle is authoritative on
/// construction; afterwards both triangles are kept equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    data: Array2<f64>,
}

impl SymMat {
    pub fn zeros(dim: usize) -> Self {
        SymMat { data: Array2::zeros((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        SymMat { data: Array2::eye(dim) }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut data = Array2::zeros((diag.len(), diag.len()));
        for (i, &d) in diag.iter().enumerate() {
            data[[i, i]] = d;
        }
        SymMat { data }
    }

    /// Builds a symmetric matrix from the lower triangle of `a`.
    pub fn from_lower(mut a: Array2<f64>) -> Result<Self> {
        let (rows, cols) = a.dim();
        check_dim(rows, cols)?;
        for i in 0..rows {
            for j in 0..i {
                a[[j, i]] = a[[i, j]];
            }
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { what: "symmetric matrix" });
        }
        Ok(SymMat { data: a })
    }

    /// Builds `sum_k c_k u_k u_k^T` from columns of `vectors`.
    pub fn from_spectral(values: ArrayView1<f64>, vectors: &Array2<f64>) -> Self {
        let dim = vectors.nrows();
        let mut data = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..=i {
                let mut acc = 0.0;
                for (k, &c) in values.iter().enumerate() {
                    acc += c * vectors[[i, k]] * vectors[[j, k]];
                }
                data[[i, j]] = acc;
                data[[j, i]] = acc;
            }
        }
        SymMat { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[[i, j]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    pub fn diag(&self) -> Vector {
        self.data.diag().to_owned()
    }

    pub fn trace(&self) -> f64 {
        self.data.diag().sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest `|A_ij - A_ji|`; zero for anything built through this type.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..i {
                worst = worst.max((self.data[[i, j]] - self.data[[j, i]]).abs());
            }
        }
        worst
    }

    pub fn matvec(&self, x: ArrayView1<f64>) -> Vector {
        self.data.dot(&x)
    }

    pub fn matmul(&self, other: &SymMat) -> Array2<f64> {
        self.data.dot(&other.data)
    }

    pub fn quad_form(&self, x: ArrayView1<f64>) -> f64 {
        x.dot(&self.data.dot(&x))
    }

    pub fn scaled(&self, s: f64) -> SymMat {
        SymMat { data: &self.data * s }
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &SymMat, b: f64) -> SymMat {
        assert_eq!(self.dim(), other.dim(), "lin_comb dimension mismatch");
        let mut data = &self.data * a;
        data.scaled_add(b, &other.data);
        SymMat { data }
    }

    /// `self + s * I`.
    pub fn shifted(&self, s: f64) -> SymMat {
        let mut data = self.data.clone();
        for i in 0..self.dim() {
            data[[i, i]] += s;
        }
        SymMat { data }
    }

    /// `self <- keep * self + coef * a a^T`.
    pub fn scale_add_outer(&mut self, keep: f64, coef: f64, a: ArrayView1<f64>) {
        let d = self.dim();
        for i in 0..d {
            let ci = coef * a[i];
            for j in 0..d {
                self.data[[i, j]] = keep * self.data[[i, j]] + ci * a[j];
            }
        }
        // ci * a[j] and cj * a[i] can differ in the last bit; restore symmetry
        // from the lower triangle.
        for i in 0..d {
            for j in 0..i {
                self.data[[j, i]] = self.data[[i, j]];
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Lower-triangular Cholesky factor of `A + shift * I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor {
    pub lower: Array2<f64>,
    pub shift: f64,
}

fn try_cholesky(a: &SymMat, shift: f64) -> Option<Array2<f64>> {
    let d = a.dim();
    let mut l = Array2::<f64>::zeros((d, d));
    for j in 0..d {
        let mut diag = a.get(j, j) + shift;
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..d {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Some(l)
}

impl CholFactor {
    /// Factors `a`, escalating a diagonal shift when plain factorization
    /// fails: `shift = 1e-12 * trace/D`, then x10 up to `1e-6 * trace/D`.
    pub fn factor(a: &SymMat) -> Result<Self> {
        Self::factor_with(a, &Tolerances::DEFAULT)
    }

    pub fn factor_with(a: &SymMat, tol: &Tolerances) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::NonFiniteInput { what: "cholesky input" });
        }
        if let Some(lower) = try_cholesky(a, 0.0) {
            return Ok(CholFactor { lower, shift: 0.0 });
        }
        let d = a.dim().max(1) as f64;
        let base = a.trace() / d;
        let mut shift = 0.0;
        if base > 0.0 {
            let mut rel = tol.chol_shift_start;
            while rel <= tol.chol_shift_max * (1.0 + 1e-9) {
                shift = rel * base;
                if let Some(lower) = try_cholesky(a, shift) {
                    return Ok(CholFactor { lower, shift });
                }
                rel *= 10.0;
            }
        }
        Err(Error::NotPositiveDefinite { shift })
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// Solves `(A + shift I) x = b` by forward and back substitution.
    pub fn solve(&self, b: ArrayView1<f64>) -> Result<Vector> {
        let d = self.dim();
        check_dim(d, b.len())?;
        let l = &self.lower;
        let mut y = b.to_owned();
        for i in 0..d {
            let mut s = y[i];
            for k in 0..i {
                s -= l[[i, k]] * y[k];
            }
            y[i] = s / l[[i, i]];
        }
        for i in (0..d).rev() {
            let mut s = y[i];
            for k in (i + 1)..d {
                s -= l[[k, i]] * y[k];
            }
            y[i] = s / l[[i, i]];
        }
        Ok(y)
    }
}

/// Solves `A x = b` for symmetric positive (semi)definite `A`.
pub fn chol_solve(a: &SymMat, b: ArrayView1<f64>) -> Result<Vector> {
    check_dim(a.dim(), b.len())?;
    check_finite(b, "right-hand side")?;
    CholFactor::factor(a)?.solve(b)
}

/// Eigendecomposition of a symmetric matrix: values in descending order,
/// eigenvectors as the matching orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vector,
    pub vectors: Array2<f64>,
}

impl SymEigen {
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Spectral norm `max |lambda_i|`.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Minimum-norm least-squares solution of `A x = b` through the
    /// pseudoinverse; eigenvalues with `|lambda| <= rel_cut * ||A||` are
    /// treated as zero.
    pub fn pseudo_solve(&self, b: ArrayView1<f64>, rel_cut: f64) -> Vector {
        let cut = rel_cut * self.spectral_norm();
        let mut x = Vector::zeros(b.len());
        for (k, &lam) in self.values.iter().enumerate() {
            if lam.abs() > cut && lam != 0.0 {
                let col = self.vectors.column(k);
                let coef = col.dot(&b) / lam;
                x.scaled_add(coef, &col);
            }
        }
        x
    }
}

/// Cyclic Jacobi eigendecomposition with a `10 * D^2` sweep cap.
pub fn eig_sym(a: &SymMat) -> Result<SymEigen> {
    eig_sym_with(a, &Tolerances::DEFAULT)
}

pub fn eig_sym_with(a: &SymMat, tol: &Tolerances) -> Result<SymEigen> {
    if !a.is_finite() {
        return Err(Error::NonFiniteInput { what: "eigen input" });
    }
    let n = a.dim();
    let mut m = a.as_array().clone();
    let mut v = Array2::<f64>::eye(n);
    let scale = a.frobenius();
    let max_sweeps = (tol.jacobi_sweep_factor * n * n).max(1);
    let mut converged = n <= 1 || scale == 0.0;
    let mut sweep = 0;
    while !converged && sweep < max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * m[[i, j]] * m[[i, j]])
            .sum::<f64>()
            .sqrt();
        if off <= tol.jacobi_rel_offdiag * scale {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                if s == 0.0 {
                    // rotation is the identity at this precision
                    m[[p, q]] = 0.0;
                    m[[q, p]] = 0.0;
                    continue;
                }
                rotated = true;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                m[[p, q]] = 0.0;
                m[[q, p]] = 0.0;
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
        sweep += 1;
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: sweep });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].total_cmp(&m[[i, i]]));
    let values = Vector::from_iter(order.iter().map(|&i| m[[i, i]]));
    let vectors = v.select(Axis(1), &order);
    Ok(SymEigen { values, vectors })
}

/// Spectral norm through the Jacobi oracle.
pub fn spectral_norm(a: &SymMat) -> Result<f64> {
    Ok(eig_sym(a)?.spectral_norm())
}

/// Principal square root of a PSD matrix. Slightly negative eigenvalues
/// (above `-1e-10 * ||A||`) are clamped to zero.
pub fn sqrt_psd(a: &SymMat) -> Result<SymMat> {
    let eig = eig_sym(a)?;
    let norm = eig.spectral_norm();
    let min = eig.min();
    if min < -Tolerances::DEFAULT.psd_rel_tol * norm {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let roots = eig.values.mapv(|l| l.max(0.0).sqrt());
    Ok(SymMat::from_spectral(roots.view(), &eig.vectors))
}

/// Power-iteration over-estimate of the spectral norm of a PSD matrix:
/// `inner_steps` rounds of `q = A p; p = q / ||q||`, then
/// `varpi = p^T A p + eps_w`.
///
/// A (numerically) zero `A p` returns `(eps_w, p_prev)` unchanged.
pub fn power_iter_estimate(
    a: &SymMat,
    p_prev: ArrayView1<f64>,
    eps_w: f64,
    inner_steps: usize,
) -> Result<(f64, Vector)> {
    check_dim(a.dim(), p_prev.len())?;
    if !(eps_w > 0.0) {
        return Err(Error::InvalidParameter(format!("eps_w = {eps_w} must be positive")));
    }
    if inner_steps == 0 {
        return Err(Error::InvalidParameter("power iteration needs at least one step".into()));
    }
    let mut p = p_prev.to_owned();
    for _ in 0..inner_steps {
        let q = a.matvec(p.view());
        let nq = norm2(q.view());
        if nq < Tolerances::DEFAULT.power_zero {
            return Ok((eps_w, p_prev.to_owned()));
        }
        p = q / nq;
    }
    Ok((a.quad_form(p.view()) + eps_w, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> SymMat {
        let b = Array2::from_shape_fn((d, d), |_| rng.random_range(-1.0..1.0));
        SymMat::from_lower(b.dot(&b.t()) / d as f64).unwrap().shifted(0.1)
    }

    #[test]
    fn chol_solve_examples() {
        let x = chol_solve(&SymMat::identity(2), array![3.0, -1.0].view()).unwrap();
        assert_eq!(x, array![3.0, -1.0]);
        let x = chol_solve(&SymMat::from_diag(&[2.0, 4.0]), array![2.0, 4.0].view()).unwrap();
        assert_abs_diff_eq!(x, array![1.0, 1.0], epsilon = 1e-15);
        let a = SymMat::from_lower(array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let x = chol_solve(&a, array![3.0, 3.0].view()).unwrap();
        assert_abs_diff_eq!(a.matvec(x.view()), array![3.0, 3.0], epsilon = 1e-14);
        assert_abs_diff_eq!(x, array![1.0, 1.0], epsilon = 1e-14);
    }

    #[test]
    fn chol_reconstructs_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_spd(&mut rng, 12);
        let f = CholFactor::factor(&a).unwrap();
        assert_eq!(f.shift, 0.0);
        let rec = f.lower.dot(&f.lower.t());
        let err = (&rec - a.as_array()).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * a.frobenius());
    }

    #[test]
    fn chol_shifts_rank_deficient_matrix() {
        // rank-one R_1 = a a^T, the situation at n = 1 < D
        let mut r = SymMat::zeros(3);
        r.scale_add_outer(0.0, 1.0, array![1.0, 2.0, -1.0].view());
        let f = CholFactor::factor(&r).unwrap();
        assert!(f.shift > 0.0);
        assert!(f.shift <= 1e-6 * r.trace() / 3.0 * (1.0 + 1e-9));
        let rec = f.lower.dot(&f.lower.t());
        let target = r.shifted(f.shift);
        let err = (&rec - target.as_array()).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * target.frobenius());
    }

    #[test]
    fn chol_rejects_indefinite() {
        let a = SymMat::from_diag(&[1.0, -1.0]);
        assert!(matches!(chol_solve(&a, array![1.0, 1.0].view()), Err(Error::NotPositiveDefinite { .. })));
        assert!(matches!(
            chol_solve(&SymMat::zeros(2), array![1.0, 1.0].view()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn eig_examples() {
        let e = eig_sym(&SymMat::from_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(e.values, array![3.0, 1.0]);
        assert_abs_diff_eq!(e.vectors[[0, 0]].abs(), 1.0);
        assert_abs_diff_eq!(e.vectors[[1, 1]].abs(), 1.0);

        let e = eig_sym(&SymMat::zeros(2)).unwrap();
        assert_eq!(e.values, array![0.0, 0.0]);

        // characteristic polynomial (2 - l)^2 - 1 = 0 gives l = 3, 1
        let a = SymMat::from_lower(array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let e = eig_sym(&a).unwrap();
        assert_abs_diff_eq!(e.values, array![3.0, 1.0], epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.column(0);
        let v1 = e.vectors.column(1);
        assert_abs_diff_eq!(v0[0].abs(), s, epsilon = 1e-14);
        assert_abs_diff_eq!(v0[0] * v0[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(v1[0] * v1[1], -0.5, epsilon = 1e-14);
    }

    #[test]
    fn eig_residual_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [1, 2, 5, 17, 30] {
            let b = Array2::from_shape_fn((d, d), |_| rng.random_range(-1.0..1.0));
            let a = SymMat::from_lower(b).unwrap();
            let e = eig_sym(&a).unwrap();
            let norm = e.spectral_norm();
            for k in 0..d {
                let v = e.vectors.column(k);
                let r = a.matvec(v) - &v * e.values[k];
                assert!(norm2(r.view()) <= 1e-8 * norm.max(1e-300));
            }
            let gram = e.vectors.t().dot(&e.vectors);
            let err = (&gram - &Array2::<f64>::eye(d)).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            assert!(err <= 1e-10);
            for k in 1..d {
                assert!(e.values[k - 1] >= e.values[k]);
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        let u = sqrt_psd(&SymMat::identity(3)).unwrap();
        assert_abs_diff_eq!(u.as_array(), &Array2::eye(3), epsilon = 1e-15);
        let u = sqrt_psd(&SymMat::from_diag(&[4.0, 9.0])).unwrap();
        assert_abs_diff_eq!(u.as_array(), &array![[2.0, 0.0], [0.0, 3.0]], epsilon = 1e-14);
        // eigenvalues (8, 2) with vectors (1,1)/sqrt2, (1,-1)/sqrt2
        let a = SymMat::from_lower(array![[5.0, 3.0], [3.0, 5.0]]).unwrap();
        let u = sqrt_psd(&a).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        let expected = array![[1.5 * r2, 0.5 * r2], [0.5 * r2, 1.5 * r2]];
        assert_abs_diff_eq!(u.as_array(), &expected, epsilon = 1e-13);
        let sq = u.matmul(&u);
        let err = (&sq - a.as_array()).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err <= 1e-8 * (1.0 + a.frobenius()));
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let a = SymMat::from_diag(&[1.0, -0.5]);
        assert!(matches!(sqrt_psd(&a), Err(Error::NotPsd { .. })));
        // tiny negative round-off is clamped
        let a = SymMat::from_diag(&[1.0, -1e-13]);
        let u = sqrt_psd(&a).unwrap();
        assert_eq!(u.get(1, 1), 0.0);
    }

    #[test]
    fn sqrt_of_projection_is_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 6;
        let b = Array2::from_shape_fn((d, 2), |_| rng.random_range(-1.0..1.0));
        // orthonormalize two columns
        let mut q = b.clone();
        let c0 = q.column(0).to_owned();
        let c0 = &c0 / norm2(c0.view());
        let c1 = q.column(1).to_owned();
        let c1 = &c1 - &c0 * c0.dot(&c1);
        let c1 = &c1 / norm2(c1.view());
        q.column_mut(0).assign(&c0);
        q.column_mut(1).assign(&c1);
        let p = SymMat::from_spectral(array![1.0, 1.0].view(), &q);
        let u = sqrt_psd(&p).unwrap();
        let err = (u.as_array() - p.as_array()).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(err <= 1e-8);
    }

    #[test]
    fn power_iteration_examples() {
        let p = array![0.6, 0.8];
        let (w, p1) = power_iter_estimate(&SymMat::identity(2), p.view(), 0.05, 3).unwrap();
        assert_abs_diff_eq!(w, 1.05, epsilon = 1e-15);
        assert_abs_diff_eq!(p1, p, epsilon = 1e-15);

        let e1 = array![1.0, 0.0];
        let (w, p1) = power_iter_estimate(&SymMat::zeros(2), e1.view(), 0.01, 1).unwrap();
        assert_eq!(w, 0.01);
        assert_eq!(p1, e1);

        let a = SymMat::from_diag(&[2.0, 1.0]);
        let lmax = eig_sym(&a).unwrap().max();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (w, p1) = power_iter_estimate(&a, array![s, s].view(), 0.05, 50).unwrap();
        assert_abs_diff_eq!(w, lmax + 0.05, epsilon = 1e-6);
        assert_abs_diff_eq!(norm2(p1.view()), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn power_iteration_rejects_bad_input() {
        let a = SymMat::identity(2);
        assert!(power_iter_estimate(&a, array![1.0, 0.0].view(), 0.0, 1).is_err());
        assert!(power_iter_estimate(&a, array![1.0, 0.0].view(), 0.1, 0).is_err());
        assert!(power_iter_estimate(&a, array![1.0].view(), 0.1, 1).is_err());
    }

    #[test]
    fn from_lower_copies_lower_triangle() {
        let a = SymMat::from_lower(array![[1.0, 99.0], [2.0, 3.0]]).unwrap();
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.asymmetry(), 0.0);
        assert!(SymMat::from_lower(array![[f64::NAN]]).is_err());
    }
}
