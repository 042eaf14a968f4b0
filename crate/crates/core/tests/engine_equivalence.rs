//! The specialized steppers against the generic engine fed with the
//! corresponding oracles, on identical data.

mod common;

use common::{max_abs_diff, moment_trace, varpi_trace};
use hsdm_core::linalg::Vector;
use hsdm_core::maps::AffineMap;
use hsdm_core::prox::ProxOracle;
use hsdm_core::solvers::{
    cregls_init, cregls_step, engine_init, engine_step, hrlsa_init, hrlsa_step, hrlsb_init, hrlsb_step, CreglsOracles,
    HlsMapping, HlsOracles, Oracles, SolverParams,
};
use hsdm_core::Result;
use ndarray::ArrayView1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STEPS: usize = 200;
const TOL: f64 = 1e-9;

fn hrlsa_gap(d: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moments = moment_trace(d, STEPS, 0.1, &mut rng);
    let varpi = varpi_trace(&moments);
    let (alpha, lambda) = (0.6, 0.02);
    let params = SolverParams::new(alpha, lambda, 1.0).unwrap();

    let mut stepper = hrlsa_init(Vector::zeros(d), &moments[0], alpha, lambda, varpi[0]).unwrap();
    let mut oracles =
        HlsOracles { moments: moments.clone(), mapping: HlsMapping::Gradient { varpi: varpi.clone() }, verify: false };
    let mut gen = engine_init(&params, &mut oracles, Vector::zeros(d)).unwrap();
    let mut worst = max_abs_diff(&stepper.x_cur, &gen.x_cur);
    for n in 1..STEPS {
        hrlsa_step(&mut stepper, &moments[n], &moments[n - 1], alpha, lambda, varpi[n], varpi[n - 1]).unwrap();
        engine_step(&mut gen, &params, &mut oracles).unwrap();
        worst = worst.max(max_abs_diff(&stepper.x_cur, &gen.x_cur));
        worst = worst.max(max_abs_diff(&stepper.x_half, &gen.x_half));
    }
    worst
}

fn hrlsb_gap(d: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moments = moment_trace(d, STEPS, 0.1, &mut rng);
    let (alpha, lambda, kappa) = (0.5, 0.05, 0.5);
    let params = SolverParams::new(alpha, lambda, 1.0).unwrap();

    let mut stepper = hrlsb_init(Vector::zeros(d), &moments[0], alpha, lambda, kappa).unwrap();
    let mut oracles = HlsOracles { moments: moments.clone(), mapping: HlsMapping::Resolvent { kappa }, verify: false };
    let mut gen = engine_init(&params, &mut oracles, Vector::zeros(d)).unwrap();
    let mut worst = max_abs_diff(&stepper.x_cur, &gen.x_cur);
    for m in &moments[1..STEPS] {
        hrlsb_step(&mut stepper, m, alpha, lambda, kappa).unwrap();
        engine_step(&mut gen, &params, &mut oracles).unwrap();
        worst = worst.max(max_abs_diff(&stepper.x_cur, &gen.x_cur));
    }
    worst
}

fn cregls_gap(d: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moments = moment_trace(d, STEPS, 0.1, &mut rng);
    let (alpha, lambda, rho) = (0.7, 0.3, 0.05);
    let params = SolverParams::new(alpha, lambda, 1.0).unwrap();
    let x0 = Vector::from_iter((0..2 * d).map(|i| (i as f64 * 0.37).sin()));

    let mut stepper = cregls_init(x0.clone(), &moments[0], alpha, lambda, rho).unwrap();
    let mut oracles = CreglsOracles { moments: moments.clone(), rho };
    let mut gen = engine_init(&params, &mut oracles, x0).unwrap();
    let mut worst = max_abs_diff(&stepper.x_cur, &gen.x_cur);
    for m in &moments[1..STEPS] {
        cregls_step(&mut stepper, m, alpha, lambda, rho).unwrap();
        engine_step(&mut gen, &params, &mut oracles).unwrap();
        worst = worst.max(max_abs_diff(&stepper.x_cur, &gen.x_cur));
    }
    worst
}

#[test]
fn hrlsa_matches_engine() {
    for d in [5, 20] {
        for seed in 0..3 {
            let gap = hrlsa_gap(d, seed);
            assert!(gap <= TOL, "D = {d}, seed {seed}: {gap:e}");
        }
    }
}

#[test]
fn hrlsb_matches_engine() {
    for d in [5, 20] {
        for seed in 0..3 {
            let gap = hrlsb_gap(d, seed);
            assert!(gap <= TOL, "D = {d}, seed {seed}: {gap:e}");
        }
    }
}

#[test]
fn cregls_matches_engine() {
    for d in [5, 10, 20] {
        for seed in 0..3 {
            let gap = cregls_gap(d, seed);
            assert!(gap <= TOL, "D = {d}, seed {seed}: {gap:e}");
        }
    }
}

#[test]
fn hls_mappings_stay_in_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let moments = moment_trace(6, 40, 0.1, &mut rng);
    let exact: Vec<f64> = moments.iter().map(|m| hsdm_core::linalg::spectral_norm(&m.r_mat).unwrap() + 0.01).collect();
    let mut grad =
        HlsOracles { moments: moments.clone(), mapping: HlsMapping::Gradient { varpi: exact }, verify: true };
    let mut res = HlsOracles { moments, mapping: HlsMapping::Resolvent { kappa: 0.3 }, verify: true };
    for n in 0..40 {
        grad.map_at(n).unwrap();
        res.map_at(n).unwrap();
    }
}

/// Counts every mapping application and gradient evaluation.
struct Counting<O> {
    inner: O,
    maps: Vec<usize>,
    grads: Vec<usize>,
}

impl<O: Oracles> Oracles for Counting<O> {
    fn map_at(&mut self, n: usize) -> Result<AffineMap> {
        if self.maps.len() <= n {
            self.maps.resize(n + 1, 0);
        }
        self.maps[n] += 1;
        self.inner.map_at(n)
    }

    fn grad_at(&mut self, n: usize, x: ArrayView1<f64>) -> Vector {
        if self.grads.len() <= n {
            self.grads.resize(n + 1, 0);
        }
        self.grads[n] += 1;
        x.mapv(|v| 0.1 * v) + self.inner.grad_at(n, x)
    }

    fn prox_at(&mut self, n: usize) -> Result<Box<dyn ProxOracle + '_>> {
        self.inner.prox_at(n)
    }
}

#[test]
fn one_mapping_and_one_gradient_per_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let moments = moment_trace(5, 60, 0.1, &mut rng);
    let varpi = varpi_trace(&moments);
    let inner = HlsOracles { moments, mapping: HlsMapping::Gradient { varpi }, verify: false };
    let mut oracles = Counting { inner, maps: Vec::new(), grads: Vec::new() };
    // L = 0.1 for the added gradient
    let params = SolverParams::new(0.5, 5.0, 0.1).unwrap();
    let mut state = engine_init(&params, &mut oracles, Vector::zeros(5)).unwrap();
    for _ in 1..60 {
        engine_step(&mut state, &params, &mut oracles).unwrap();
    }
    assert_eq!(oracles.maps.len(), 60);
    assert!(oracles.maps.iter().all(|&c| c == 1), "{:?}", oracles.maps);
    assert!(oracles.grads.iter().all(|&c| c == 1), "{:?}", oracles.grads);
}
