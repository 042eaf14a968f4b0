//! Proximal operators `prox_{λφ}(x) = argmin_a ½||a - x||² + λ φ(a)`.

use std::ops::Range;

use ndarray::{s, ArrayView1};

use crate::error::{Error, Result};
use crate::linalg::{chol_solve, SymMat, Vector};

/// A proximal operator `x -> prox_{λφ}(x)` for a fixed convex `φ`.
pub trait ProxOracle {
    fn prox(&self, x: ArrayView1<f64>, lambda: f64) -> Result<Vector>;

    fn tag(&self) -> String;
}

/// Soft thresholding, written exactly as `x_d (1 - τ / max{τ, |x_d|})`.
pub fn soft_threshold(x: ArrayView1<f64>, tau: f64) -> Result<Vector> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidTau(tau));
    }
    Ok(x.mapv(|v| v * (1.0 - tau / tau.max(v.abs()))))
}

/// Prox of `h(x) = ½ x^T R x - r^T x`: solves `(I + λR) z = x + λ r`.
pub fn quad_prox(x: ArrayView1<f64>, r_mat: &SymMat, r_vec: ArrayView1<f64>, lambda: f64) -> Result<Vector> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
    }
    let d = r_mat.dim();
    if x.len() != d || r_vec.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x.len().max(r_vec.len()) });
    }
    let system = r_mat.lin_comb(lambda, &SymMat::identity(d), 1.0);
    let rhs = &x + &(&r_vec * lambda);
    chol_solve(&system, rhs.view())
}

/// `φ = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroProx;

impl ProxOracle for ZeroProx {
    fn prox(&self, x: ArrayView1<f64>, _lambda: f64) -> Result<Vector> {
        Ok(x.to_owned())
    }

    fn tag(&self) -> String {
        "zero".into()
    }
}

/// `φ = weight * ||.||_1`; the threshold is `λ * weight`.
#[derive(Debug, Clone, Copy)]
pub struct L1Prox {
    pub weight: f64,
}

impl ProxOracle for L1Prox {
    fn prox(&self, x: ArrayView1<f64>, lambda: f64) -> Result<Vector> {
        soft_threshold(x, lambda * self.weight)
    }

    fn tag(&self) -> String {
        format!("l1(weight={})", self.weight)
    }
}

/// `φ(x) = ½ x^T R x - r^T x`.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticProx<'a> {
    pub r_mat: &'a SymMat,
    pub r_vec: ArrayView1<'a, f64>,
}

impl ProxOracle for QuadraticProx<'_> {
    fn prox(&self, x: ArrayView1<f64>, lambda: f64) -> Result<Vector> {
        quad_prox(x, self.r_mat, self.r_vec, lambda)
    }

    fn tag(&self) -> String {
        "quadratic".into()
    }
}

/// Separable prox on a product space: each part acts on its own slice.
pub struct ProductProx<'a> {
    parts: Vec<(Box<dyn ProxOracle + 'a>, Range<usize>)>,
    dim: usize,
}

impl std::fmt::Debug for ProductProx<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductProx").field("tag", &self.tag()).field("dim", &self.dim).finish()
    }
}

/// Builds a product prox; the slices must tile `0..dim` in order.
pub fn product_prox<'a>(parts: Vec<(Box<dyn ProxOracle + 'a>, Range<usize>)>, dim: usize) -> Result<ProductProx<'a>> {
    let mut next = 0;
    for (_, range) in &parts {
        if range.start != next || range.end <= range.start {
            return Err(Error::SliceMismatch { dim });
        }
        next = range.end;
    }
    if next != dim {
        return Err(Error::SliceMismatch { dim });
    }
    Ok(ProductProx { parts, dim })
}

impl ProxOracle for ProductProx<'_> {
    fn prox(&self, x: ArrayView1<f64>, lambda: f64) -> Result<Vector> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut out = Vector::zeros(self.dim);
        for (part, range) in &self.parts {
            let z = part.prox(x.slice(s![range.clone()]), lambda)?;
            out.slice_mut(s![range.clone()]).assign(&z);
        }
        Ok(out)
    }

    fn tag(&self) -> String {
        let tags: Vec<String> =
            self.parts.iter().map(|(p, r)| format!("{}[{}..{}]", p.tag(), r.start, r.end)).collect();
        format!("product({})", tags.join(", "))
    }
}

/// Grid search for the scalar prox `argmin_a ½(a - x)² + λ φ(a)` over
/// `steps + 1` equispaced points of `[lo, hi]`. Accuracy is `(hi - lo)/steps`.
pub fn brute_prox_oracle<F: Fn(f64) -> f64>(phi: F, x: f64, lambda: f64, grid: (f64, f64, usize)) -> f64 {
    let (lo, hi, steps) = grid;
    let h = (hi - lo) / steps as f64;
    let mut best_a = lo;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let a = lo + h * i as f64;
        let val = 0.5 * (a - x) * (a - x) + lambda * phi(a);
        if val < best {
            best = val;
            best_a = a;
        }
    }
    best_a
}
