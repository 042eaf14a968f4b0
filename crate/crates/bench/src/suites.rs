//! Property suites behind `hsdm verify`.

use std::fmt;
use std::time::Instant;

use hsdm_core::datagen::{InputModel, Scenario};
use hsdm_core::linalg::{dist2, eig_sym, norm2, SymMat, Vector};
use hsdm_core::maps::{grad_map, prox_map, verify_family_membership, AffineMap};
use hsdm_core::prox::{brute_prox_oracle, quad_prox, soft_threshold, L1Prox};
use hsdm_core::solvers::{
    cregls_init, cregls_step, engine_init, engine_step, hrlsa_init, hrlsa_step, hrlsb_init, hrlsb_step, CreglsOracles,
    FejerDiag, FixedOracles, HlsMapping, HlsOracles, SolverParams, SolverState, VarpiEstimator, VarpiMode,
};
use hsdm_core::stats::{batch_recompute, RunningMoments};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<20} {:>7.2}s  {}", self.name, self.seconds, self.detail)
    }
}

fn timed(name: &'static str, body: impl FnOnce() -> (bool, String)) -> SuiteReport {
    let start = Instant::now();
    let (passed, detail) = body();
    SuiteReport { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// A prox point together with the function it minimizes (up to the quadratic).
type Objective<'a> = Box<dyn Fn(&Vector) -> f64 + 'a>;

fn gaussian(d: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_iter((0..d).map(|_| StandardNormal.sample(rng)))
}

fn random_gram(d: usize, m: usize, rng: &mut ChaCha8Rng) -> SymMat {
    let a = Array2::from_shape_fn((m, d), |_| StandardNormal.sample(rng));
    SymMat::from_lower(a.t().dot(&a) / m as f64).expect("square and finite")
}

fn max_nonexpansive_ratio(t: &AffineMap, pairs: usize, rng: &mut ChaCha8Rng) -> f64 {
    let d = t.dim();
    let mut worst = 0.0_f64;
    for _ in 0..pairs {
        let x = gaussian(d, rng) * 3.0;
        let y = gaussian(d, rng) * 3.0;
        let den = dist2(x.view(), y.view());
        if den > 0.0 {
            worst = worst.max(dist2(t.apply(x.view()).view(), t.apply(y.view()).view()) / den);
        }
    }
    worst
}

/// Random `(R, r = R θ)` with `D <= 30`, often rank deficient: both mapping
/// constructions must be in the family and nonexpansive.
pub fn mapping_family(seed: u64, instances: usize, pairs: usize) -> SuiteReport {
    timed("mapping-family", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = Vec::new();
        let mut worst_ratio = 0.0_f64;
        for k in 0..instances {
            let d = rng.random_range(1..=30);
            let m = rng.random_range(1..=2 * d);
            let r = random_gram(d, m, &mut rng);
            let rv = r.matvec(gaussian(d, &mut rng).view());
            let norm = match eig_sym(&r) {
                Ok(e) => e.spectral_norm(),
                Err(e) => {
                    failures.push(format!("#{k}: {e}"));
                    continue;
                }
            };
            let kappa = rng.random_range(0.01..10.0);
            let maps =
                [("grad", grad_map(&r, rv.view(), 1.0, norm + 0.01, true)), ("prox", prox_map(&r, rv.view(), kappa))];
            for (tag, map) in maps {
                let map = match map {
                    Ok(m) => m,
                    Err(e) => {
                        failures.push(format!("#{k} {tag}: {e}"));
                        continue;
                    }
                };
                match verify_family_membership(&map, Some((&r, rv.view()))) {
                    Ok(rep) if rep.passed() => {}
                    Ok(rep) => failures.push(format!("#{k} {tag}: {}", rep.failures.join("; "))),
                    Err(e) => failures.push(format!("#{k} {tag}: {e}")),
                }
                worst_ratio = worst_ratio.max(max_nonexpansive_ratio(&map, pairs, &mut rng));
            }
        }
        if worst_ratio > 1.0 + 1e-12 {
            failures.push(format!("expansion ratio {worst_ratio}"));
        }
        let detail =
            format!("{instances} instances, max ||Tx-Ty||/||x-y|| = {worst_ratio:.6}, {} failures", failures.len());
        let detail = failures.first().map(|f| format!("{detail}; first: {f}")).unwrap_or(detail);
        (failures.is_empty(), detail)
    })
}

const GRID_STEP: f64 = 1e-5;

fn grid_around(points: &[f64]) -> (f64, f64, usize) {
    let lo = points.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    (lo, hi, ((hi - lo) / GRID_STEP).ceil() as usize)
}

/// Scalar prox values against the brute-force grid minimizer, and the
/// variational inequality `<x - p, y - p> <= λ(φ(y) - φ(p))` on perturbations.
pub fn prox(seed: u64, instances: usize) -> SuiteReport {
    timed("prox", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_grid = 0.0_f64;
        let mut worst_vi = f64::NEG_INFINITY;
        for _ in 0..instances {
            let x: f64 = rng.random_range(-5.0..5.0);
            let lambda: f64 = rng.random_range(0.05..2.0);
            // ℓ1: the minimizer lies between 0 and x
            let st = soft_threshold(Vector::from(vec![x]).view(), lambda).expect("positive threshold")[0];
            let brute = brute_prox_oracle(f64::abs, x, lambda, grid_around(&[0.0, x]));
            worst_grid = worst_grid.max((st - brute).abs());
            // quadratic ½ c a² - s a: the minimizer lies between x and s/c
            let c: f64 = rng.random_range(0.0..4.0);
            let s: f64 = rng.random_range(-3.0..3.0);
            let qp =
                quad_prox(Vector::from(vec![x]).view(), &SymMat::from_diag(&[c]), Vector::from(vec![s]).view(), lambda)
                    .expect("positive definite system")[0];
            let anchor = if c > 0.0 { s / c } else { x + lambda * s };
            let brute = brute_prox_oracle(|a| 0.5 * c * a * a - s * a, x, lambda, grid_around(&[x, anchor]));
            worst_grid = worst_grid.max((qp - brute).abs());
        }
        for _ in 0..instances / 10 {
            let d = rng.random_range(1..=10);
            let lambda: f64 = rng.random_range(0.05..2.0);
            let x = gaussian(d, &mut rng) * 2.0;
            let r = random_gram(d, rng.random_range(1..=2 * d), &mut rng);
            let rv = gaussian(d, &mut rng);
            let phis: [(Vector, Objective); 2] = [
                (
                    soft_threshold(x.view(), lambda).expect("positive threshold"),
                    Box::new(|y: &Vector| y.mapv(f64::abs).sum()),
                ),
                (
                    quad_prox(x.view(), &r, rv.view(), lambda).expect("positive definite system"),
                    Box::new(|y: &Vector| 0.5 * r.quad_form(y.view()) - rv.dot(y)),
                ),
            ];
            for (p, phi) in phis.iter() {
                for _ in 0..20 {
                    let scale = 10f64.powf(rng.random_range(-4.0..1.0));
                    let y = p + &(gaussian(d, &mut rng) * scale);
                    let lhs = (&x - p).dot(&(&y - p));
                    let rhs = lambda * (phi(&y) - phi(p));
                    worst_vi = worst_vi.max((lhs - rhs) / (1.0 + rhs.abs()));
                }
            }
        }
        let passed = worst_grid <= GRID_STEP && worst_vi <= 1e-9;
        (
            passed,
            format!("{instances} scalar instances, max grid gap {worst_grid:.2e}, max VI violation {worst_vi:.2e}"),
        )
    })
}

/// Streaming moments against direct weighted summation and the noiseless
/// normal equations.
pub fn moments(seed: u64, samples: usize) -> SuiteReport {
    timed("moments", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 8;
        let theta = gaussian(d, &mut rng);
        let mut details = Vec::new();
        let mut passed = true;
        for (gamma, tol) in [(1.0, 1e-10), (0.9, 1e-9)] {
            let mut m = RunningMoments::new(d, gamma).expect("valid forgetting factor");
            let mut clean = RunningMoments::new(d, gamma).expect("valid forgetting factor");
            let mut all = Vec::with_capacity(samples);
            let mut identity = 0.0_f64;
            for _ in 0..samples {
                let a = gaussian(d, &mut rng);
                let e: f64 = StandardNormal.sample(&mut rng);
                let b = a.dot(&theta) + 0.1 * e;
                m.update(a.view(), b);
                clean.update(a.view(), a.dot(&theta));
                let res = clean.r_mat.matvec(theta.view()) - &clean.r_vec;
                identity = identity.max(norm2(res.view()));
                all.push((a, b));
            }
            let batch = batch_recompute(&all, gamma).expect("non-empty");
            let rel_m = m.r_mat.lin_comb(1.0, &batch.r_mat, -1.0).frobenius() / batch.r_mat.frobenius();
            let rel_v = norm2((&m.r_vec - &batch.r_vec).view()) / norm2(batch.r_vec.view());
            let rel = rel_m.max(rel_v);
            passed &= rel <= tol && identity <= 1e-10;
            details.push(format!("gamma={gamma}: rel {rel:.2e}, ||R θ - r|| {identity:.2e}"));
        }
        (passed, details.join("; "))
    })
}

fn moment_snapshots(d: usize, steps: usize, seed: u64) -> Vec<RunningMoments> {
    let sc = Scenario {
        dim: d,
        sparsity_pct: 40.0,
        input: InputModel::Iid,
        snr_db: 20.0,
        horizon: steps,
        change: None,
        seed,
    };
    let mut m = RunningMoments::new(d, 1.0).expect("valid forgetting factor");
    let mut out = vec![m.clone()];
    for s in sc.stream(0).expect("valid scenario") {
        m.update(s.a.view(), s.b);
        out.push(m.clone());
    }
    out
}

fn max_gap(a: &SolverState, b: &SolverState) -> f64 {
    a.x_cur.iter().zip(&b.x_cur).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Largest deviation between the HRLSa, HRLSb and CRegLS steppers and the
/// generic engine over `steps` steps.
pub fn equivalence_gaps(d: usize, seed: u64, steps: usize) -> hsdm_core::Result<[f64; 3]> {
    let moments = moment_snapshots(d, steps, seed);
    let mut est = VarpiEstimator::new(VarpiMode::default(), d)?;
    let varpi = moments.iter().map(|m| est.estimate(m)).collect::<hsdm_core::Result<Vec<_>>>()?;

    let (alpha, lambda) = (0.6, 0.02);
    let params = SolverParams::new(alpha, lambda, 1.0)?;
    let mut stepper = hrlsa_init(Vector::zeros(d), &moments[0], alpha, lambda, varpi[0])?;
    let mut oracles =
        HlsOracles { moments: moments.clone(), mapping: HlsMapping::Gradient { varpi: varpi.clone() }, verify: false };
    let mut gen = engine_init(&params, &mut oracles, Vector::zeros(d))?;
    let mut gap_a = max_gap(&stepper, &gen);
    for n in 1..steps {
        hrlsa_step(&mut stepper, &moments[n], &moments[n - 1], alpha, lambda, varpi[n], varpi[n - 1])?;
        engine_step(&mut gen, &params, &mut oracles)?;
        gap_a = gap_a.max(max_gap(&stepper, &gen));
    }

    let kappa = 0.5;
    let mut stepper = hrlsb_init(Vector::zeros(d), &moments[0], alpha, lambda, kappa)?;
    let mut oracles = HlsOracles { moments: moments.clone(), mapping: HlsMapping::Resolvent { kappa }, verify: false };
    let mut gen = engine_init(&params, &mut oracles, Vector::zeros(d))?;
    let mut gap_b = max_gap(&stepper, &gen);
    for m in &moments[1..steps] {
        hrlsb_step(&mut stepper, m, alpha, lambda, kappa)?;
        engine_step(&mut gen, &params, &mut oracles)?;
        gap_b = gap_b.max(max_gap(&stepper, &gen));
    }

    let (lambda, rho) = (0.3, 0.05);
    let params = SolverParams::new(alpha, lambda, 1.0)?;
    let mut stepper = cregls_init(Vector::zeros(2 * d), &moments[0], alpha, lambda, rho)?;
    let mut oracles = CreglsOracles { moments, rho };
    let mut gen = engine_init(&params, &mut oracles, Vector::zeros(2 * d))?;
    let mut gap_c = max_gap(&stepper, &gen);
    for n in 1..steps {
        cregls_step(&mut stepper, &oracles.moments[n], alpha, lambda, rho)?;
        engine_step(&mut gen, &params, &mut oracles)?;
        gap_c = gap_c.max(max_gap(&stepper, &gen));
    }
    Ok([gap_a, gap_b, gap_c])
}

pub fn equivalence(seeds: u64, steps: usize) -> SuiteReport {
    timed("engine-equivalence", || {
        let mut worst = [0.0_f64; 3];
        for d in [5, 20] {
            for seed in 0..seeds {
                match equivalence_gaps(d, seed, steps) {
                    Ok(g) => {
                        for k in 0..3 {
                            worst[k] = worst[k].max(g[k]);
                        }
                    }
                    Err(e) => return (false, format!("D={d} seed={seed}: {e}")),
                }
            }
        }
        let passed = worst.iter().all(|&g| g <= 1e-9);
        (passed, format!("max |Δ| hrlsa {:.2e}, hrlsb {:.2e}, cregls {:.2e}", worst[0], worst[1], worst[2]))
    })
}

/// Outcome of a deterministic run with a fixed, exactly known mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRun {
    /// `||(I - T) x_N||`.
    pub fixed_point_gap: f64,
    pub nrmsd: f64,
    /// Largest increase between consecutive Θ-norm values (≤ 0 when monotone).
    pub max_theta_increase: f64,
    pub dual_available: bool,
}

/// Noiseless, nonsingular `(R, r = R θ★)` held fixed; HRLSa's gradient
/// mapping with the exact `ϖ = ||R|| + 0.05`, `α = 0.5`, `λ = 0.5`.
pub fn exact_run(d: usize, seed: u64, steps: usize) -> hsdm_core::Result<ExactRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_mat = random_gram(d, 4 * d, &mut rng);
    let theta = Vector::from_iter((0..d).map(|i| match i % 7 {
        0 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }));
    let r_vec = r_mat.matvec(theta.view());
    let varpi = eig_sym(&r_mat)?.spectral_norm() + 0.05;
    let map = grad_map(&r_mat, r_vec.view(), 1.0, varpi, true)?;
    let (alpha, lambda) = (0.5, 0.5);
    let params = SolverParams::new(alpha, lambda, 1.0)?;
    let mut oracles = FixedOracles { map: map.clone(), prox: L1Prox { weight: 1.0 } };
    let mut diag = FejerDiag::new(&map, theta.clone(), alpha, lambda, Vector::zeros(d).view(), 1.0)?;

    let mut state = engine_init(&params, &mut oracles, Vector::zeros(d))?;
    diag.update(state.x_cur.view());
    for _ in 1..steps {
        engine_step(&mut state, &params, &mut oracles)?;
        diag.update(state.x_cur.view());
    }
    let x = &state.x_cur;
    let max_theta_increase = diag.theta_norm_trace.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExactRun {
        fixed_point_gap: dist2(x.view(), map.apply(x.view()).view()),
        nrmsd: dist2(x.view(), theta.view()) / norm2(theta.view()),
        max_theta_increase,
        dual_available: diag.v_star_available(),
    })
}

/// D = 20, N = 5000: `||(I - T) x_N|| <= 1e-6`, NRMSD `<= 1e-5` and a
/// Θ-norm trace that never rises by more than 1e-9.
pub fn exact_regime(seed: u64) -> SuiteReport {
    timed("exact-regime", || match exact_run(20, seed, 5000) {
        Ok(run) => {
            let passed = run.dual_available
                && run.fixed_point_gap <= 1e-6
                && run.nrmsd <= 1e-5
                && run.max_theta_increase <= 1e-9;
            let detail = format!(
                "||(I-T)x_N|| {:.2e}, nrmsd {:.2e}, max Θ-norm rise {:.2e}, dual {}",
                run.fixed_point_gap,
                run.nrmsd,
                run.max_theta_increase,
                if run.dual_available { "available" } else { "unavailable" }
            );
            (passed, detail)
        }
        Err(e) => (false, e.to_string()),
    })
}

/// Every suite at its default size.
pub fn all(seed: u64) -> Vec<SuiteReport> {
    vec![
        mapping_family(seed, 100, 200),
        prox(seed, 1000),
        moments(seed, 1000),
        equivalence(10, 200),
        exact_regime(seed),
    ]
}
