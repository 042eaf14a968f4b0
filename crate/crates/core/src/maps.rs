//! Affine nonexpansive mappings `T = Q + π` with `Q` positive and
//! `||Q|| <= 1`, whose fixed-point set is the affine constraint
//! `{x : R x = r}` (or a consensus subspace in the split formulation).

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::linalg::{chol_solve, eig_sym, norm2, CholFactor, SymMat, Vector};

/// Membership tolerance for `Q` positive and `||Q|| <= 1`.
pub const FAMILY_TOL: f64 = 1e-10;

/// `T x = Q x + π`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub q: SymMat,
    pub pi: Vector,
}

impl AffineMap {
    pub fn new(q: SymMat, pi: Vector) -> Result<Self> {
        if q.dim() != pi.len() {
            return Err(Error::DimensionMismatch { expected: q.dim(), found: pi.len() });
        }
        Ok(AffineMap { q, pi })
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap { q: SymMat::identity(dim), pi: Vector::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.pi.len()
    }

    pub fn apply(&self, x: ArrayView1<f64>) -> Vector {
        self.q.matvec(x) + &self.pi
    }

    /// `beta * self + (1 - beta) * other`.
    pub fn convex_combination(&self, other: &AffineMap, beta: f64) -> Result<AffineMap> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!("beta = {beta} outside [0, 1]")));
        }
        let q = self.q.lin_comb(beta, &other.q, 1.0 - beta);
        let pi = &self.pi * beta + &other.pi * (1.0 - beta);
        Ok(AffineMap { q, pi })
    }
}

/// `T^(α) = α T + (1 - α) Id` for `α ∈ [0.5, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedMap {
    pub base: AffineMap,
    pub alpha: f64,
}

impl AveragedMap {
    pub fn apply(&self, x: ArrayView1<f64>) -> Vector {
        self.base.apply(x) * self.alpha + &x * (1.0 - self.alpha)
    }

    /// Linear part `Q^(α) = α Q + (1 - α) I`.
    pub fn linear_part(&self) -> SymMat {
        self.base.q.lin_comb(self.alpha, &SymMat::identity(self.base.dim()), 1.0 - self.alpha)
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if (0.5..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

pub fn averaged(map: AffineMap, alpha: f64) -> Result<AveragedMap> {
    check_alpha(alpha)?;
    Ok(AveragedMap { base: map, alpha })
}

/// Gradient-type mapping `Q = I - (μ/ϖ) R`, `π = (μ/ϖ) r`.
///
/// With `verify` set, `ϖ` is checked against the spectral norm of `R`
/// computed by the Jacobi oracle.
pub fn grad_map(r_mat: &SymMat, r_vec: ArrayView1<f64>, mu: f64, varpi: f64, verify: bool) -> Result<AffineMap> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidMu(mu));
    }
    if r_mat.dim() != r_vec.len() {
        return Err(Error::DimensionMismatch { expected: r_mat.dim(), found: r_vec.len() });
    }
    if !(varpi > 0.0) || !varpi.is_finite() {
        return Err(Error::InvalidParameter(format!("varpi = {varpi} must be positive")));
    }
    if verify {
        let norm = eig_sym(r_mat)?.spectral_norm();
        if varpi < norm - FAMILY_TOL {
            return Err(Error::NotDominating { varpi, norm });
        }
    }
    let step = mu / varpi;
    let q = SymMat::identity(r_mat.dim()).lin_comb(1.0, r_mat, -step);
    let pi = &r_vec * step;
    Ok(AffineMap { q, pi })
}

/// Resolvent-type mapping `Q = (I + κ R)^{-1}`, `π = κ Q r`.
///
/// `Q` is materialized column by column through Cholesky solves.
pub fn prox_map(r_mat: &SymMat, r_vec: ArrayView1<f64>, kappa: f64) -> Result<AffineMap> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidKappa(kappa));
    }
    let d = r_mat.dim();
    if d != r_vec.len() {
        return Err(Error::DimensionMismatch { expected: d, found: r_vec.len() });
    }
    let system = r_mat.lin_comb(kappa, &SymMat::identity(d), 1.0);
    let chol = CholFactor::factor(&system)?;
    let mut cols = Array2::<f64>::zeros((d, d));
    let mut e = Vector::zeros(d);
    for j in 0..d {
        e[j] = 1.0;
        let col = chol.solve(e.view())?;
        cols.column_mut(j).assign(&col);
        e[j] = 0.0;
    }
    let q = SymMat::from_lower(cols)?;
    let pi = chol_solve(&system, (&r_vec * kappa).view())?;
    Ok(AffineMap { q, pi })
}

/// Orthogonal projection of `R^{kD}` onto the diagonal `{(x, ..., x)}`.
pub fn consensus_projection(blocks: usize, block_dim: usize) -> Result<AffineMap> {
    if blocks < 2 || block_dim < 1 {
        return Err(Error::InvalidParameter(format!(
            "consensus projection needs k >= 2 and D >= 1 (got k = {blocks}, D = {block_dim})"
        )));
    }
    let n = blocks * block_dim;
    let w = 1.0 / blocks as f64;
    let q = Array2::from_shape_fn((n, n), |(i, j)| if i % block_dim == j % block_dim { w } else { 0.0 });
    Ok(AffineMap { q: SymMat::from_lower(q)?, pi: Vector::zeros(n) })
}

/// Outcome of [`verify_family_membership`].
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub symmetry_residual: f64,
    pub min_eigenvalue: f64,
    pub norm: f64,
    /// `||T z - z|| / (1 + ||z||)` at the least-squares solution `z` of `R z = r`.
    pub fixed_point_residual: Option<f64>,
    /// Largest `||(I - Q) u||` over an orthonormal basis `u` of `ker R`.
    pub kernel_residual: Option<f64>,
    /// Largest `||R w||` over eigenvectors `w` of `Q` with eigenvalue one,
    /// i.e. whether `Fix T` is larger than `{R x = r}`.
    pub excess_fixed_residual: Option<f64>,
    /// `||R z - r|| / (1 + ||r||)` at the least-squares solution.
    pub constraint_residual: Option<f64>,
    pub failures: Vec<String>,
}

impl MembershipReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const FIXED_POINT_TOL: f64 = 1e-7;
const CONSTRAINT_TOL: f64 = 1e-7;
const RANK_CUT: f64 = 1e-9;

/// Checks `Q` symmetric positive with `||Q|| <= 1`, and, given `(R, r)`,
/// that `Fix T = {x : R x = r}`.
pub fn verify_family_membership(
    map: &AffineMap,
    constraint: Option<(&SymMat, ArrayView1<f64>)>,
) -> Result<MembershipReport> {
    let eig_q = eig_sym(&map.q)?;
    let symmetry_residual = map.q.asymmetry();
    let min_eigenvalue = eig_q.min();
    let norm = eig_q.spectral_norm();
    let mut failures = Vec::new();
    if symmetry_residual > 0.0 {
        failures.push(format!("Q not symmetric (residual {symmetry_residual:e})"));
    }
    if min_eigenvalue < -FAMILY_TOL {
        failures.push(format!("Q not positive (min eigenvalue {min_eigenvalue:e})"));
    }
    if norm > 1.0 + FAMILY_TOL {
        failures.push(format!("||Q|| = {norm} exceeds 1"));
    }

    let mut report = MembershipReport {
        symmetry_residual,
        min_eigenvalue,
        norm,
        fixed_point_residual: None,
        kernel_residual: None,
        excess_fixed_residual: None,
        constraint_residual: None,
        failures: Vec::new(),
    };

    if let Some((r_mat, r_vec)) = constraint {
        if r_mat.dim() != map.dim() || r_vec.len() != map.dim() {
            return Err(Error::DimensionMismatch { expected: map.dim(), found: r_mat.dim() });
        }
        let eig_r = eig_sym(r_mat)?;
        let cut = RANK_CUT * eig_r.spectral_norm().max(f64::MIN_POSITIVE);
        let z = eig_r.pseudo_solve(r_vec, RANK_CUT);

        let constraint_residual = norm2((r_mat.matvec(z.view()) - r_vec).view()) / (1.0 + norm2(r_vec));
        if constraint_residual > CONSTRAINT_TOL {
            failures.push(format!("R z = r is inconsistent (residual {constraint_residual:e})"));
        }
        report.constraint_residual = Some(constraint_residual);

        let tz = map.apply(z.view());
        let fp = norm2((&tz - &z).view()) / (1.0 + norm2(z.view()));
        if fp > FIXED_POINT_TOL {
            failures.push(format!("least-squares solution is not fixed (residual {fp:e})"));
        }
        report.fixed_point_residual = Some(fp);

        let mut kernel = 0.0_f64;
        for (k, &lam) in eig_r.values.iter().enumerate() {
            if lam.abs() <= cut {
                let u = eig_r.vectors.column(k);
                let res = &u - &map.q.matvec(u);
                kernel = kernel.max(norm2(res.view()));
            }
        }
        if kernel > FIXED_POINT_TOL {
            failures.push(format!("ker R is not fixed by Q (residual {kernel:e})"));
        }
        report.kernel_residual = Some(kernel);

        let r_scale = eig_r.spectral_norm().max(f64::MIN_POSITIVE);
        let mut excess = 0.0_f64;
        for (k, &lam) in eig_q.values.iter().enumerate() {
            if (lam - 1.0).abs() <= 1e-9 {
                let w = eig_q.vectors.column(k);
                excess = excess.max(norm2(r_mat.matvec(w).view()) / r_scale);
            }
        }
        if excess > FIXED_POINT_TOL {
            failures.push(format!("Fix T exceeds {{R x = r}} (residual {excess:e})"));
        }
        report.excess_fixed_residual = Some(excess);
    }
    report.failures = failures;
    Ok(report)
}
