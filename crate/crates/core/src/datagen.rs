//! Synthetic sparse system-identification data.
//!
//! The model is `b_n = a_n^T θ + η_n`, with `θ` holding `±1` at randomly
//! chosen positions, inputs either IID standard Gaussian or a stationary
//! AR(1) process with unit per-entry variance, and Gaussian noise whose
//! power is set from an SNR in dB.
//!
//! # Reproducibility
//!
//! Every trial owns two ChaCha8 generators, one for the system `θ` and one
//! for inputs and noise. Their 64-bit seeds are
//! `splitmix64(seed ^ splitmix64(trial) ^ TAG)` with a distinct `TAG` per
//! generator, so trials are independent of scheduling and of each other.

use ndarray::ArrayView1;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

const SYSTEM_TAG: u64 = 0x5359_5354_454d_0001;
const DATA_TAG: u64 = 0x4441_5441_0000_0002;

/// The SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the substream `tag` of `trial`.
pub fn substream_seed(seed: u64, trial: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(trial) ^ tag)
}

pub fn trial_rng(seed: u64, trial: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, trial, tag))
}

/// Number of nonzeros `round(pct * D / 100)`, validated to lie in `1..=D`.
pub fn support_size(dim: usize, sparsity_pct: f64) -> Result<usize> {
    let count = (sparsity_pct * dim as f64 / 100.0).round();
    if !count.is_finite() || count < 1.0 || count > dim as f64 {
        return Err(Error::InvalidSparsity { pct: sparsity_pct, dim, count: count as i64 });
    }
    Ok(count as usize)
}

/// `θ` with exactly `round(pct D / 100)` entries equal to `±1` (fair signs)
/// at uniformly drawn distinct positions.
pub fn make_sparse_system<R: Rng + ?Sized>(dim: usize, sparsity_pct: f64, rng: &mut R) -> Result<Vector> {
    let s = support_size(dim, sparsity_pct)?;
    let mut theta = Vector::zeros(dim);
    for pos in index::sample(rng, dim, s) {
        theta[pos] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    }
    Ok(theta)
}

/// One IID standard Gaussian input vector.
pub fn iid_sample<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    Vector::from_iter((0..dim).map(|_| StandardNormal.sample(rng)))
}

/// AR(1) coefficient whose stationary-to-innovation variance ratio is
/// `ratio_db` dB: `1 / (1 - δ²) = 10^{ratio_db/10}`.
pub fn ar1_delta_from_ratio_db(ratio_db: f64) -> f64 {
    (1.0 - 10f64.powf(-ratio_db / 10.0)).sqrt()
}

/// AR(1) input process `a_n = δ a_{n-1} + υ_n`, `a_{-1} = υ_{-1}`, with
/// innovation variance `1 - δ²` so that the stationary variance is one.
#[derive(Debug, Clone)]
pub struct Ar1Process {
    delta: f64,
    innovation: Normal<f64>,
    prev: Vector,
}

impl Ar1Process {
    pub fn new<R: Rng + ?Sized>(dim: usize, delta: f64, rng: &mut R) -> Result<Self> {
        if !(delta.abs() < 1.0) {
            return Err(Error::InvalidDelta(delta));
        }
        let innovation =
            Normal::new(0.0, (1.0 - delta * delta).sqrt()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let prev = Vector::from_iter((0..dim).map(|_| innovation.sample(rng)));
        Ok(Ar1Process { delta, innovation, prev })
    }

    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vector {
        let delta = self.delta;
        let innovation = self.innovation;
        self.prev.mapv_inplace(|p| delta * p + innovation.sample(rng));
        self.prev.clone()
    }
}

/// Noise standard deviation `sqrt(10^{-snr/10} ||θ||² E[a_d²])`;
/// infinite SNR means no noise.
pub fn noise_sigma(snr_db: f64, theta: ArrayView1<f64>, input_var: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    (10f64.powf(-snr_db / 10.0) * theta.dot(&theta) * input_var).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum InputModel {
    Iid,
    /// Either `delta` directly or `ratio_db` (stationary over innovation
    /// variance, 5 dB by default).
    Ar1 {
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        ratio_db: Option<f64>,
    },
}

impl InputModel {
    pub fn ar1(delta: f64) -> Self {
        InputModel::Ar1 { delta: Some(delta), ratio_db: None }
    }

    /// Effective AR coefficient (0 for IID).
    pub fn delta(&self) -> f64 {
        match *self {
            InputModel::Iid => 0.0,
            InputModel::Ar1 { delta: Some(d), .. } => d,
            InputModel::Ar1 { delta: None, ratio_db } => ar1_delta_from_ratio_db(ratio_db.unwrap_or(5.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemChange {
    /// First (1-based) sample index generated by the new system.
    pub at: usize,
    pub sparsity_pct: f64,
}

fn default_snr() -> f64 {
    f64::INFINITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub dim: usize,
    pub sparsity_pct: f64,
    pub input: InputModel,
    /// `inf` for noiseless data.
    #[serde(default = "default_snr")]
    pub snr_db: f64,
    pub horizon: usize,
    #[serde(default)]
    pub change: Option<SystemChange>,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        support_size(self.dim, self.sparsity_pct)?;
        let delta = self.input.delta();
        if !(delta.abs() < 1.0) {
            return Err(Error::InvalidDelta(delta));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!("SNR {} dB is not usable", self.snr_db)));
        }
        if let Some(change) = &self.change {
            support_size(self.dim, change.sparsity_pct)?;
            if change.at < 1 {
                return Err(Error::InvalidParameter("change index is 1-based".into()));
            }
        }
        Ok(())
    }

    pub fn stream(&self, trial: u64) -> Result<Stream> {
        Stream::new(self.clone(), trial)
    }
}

/// One observation together with the system that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// 1-based sample index.
    pub n: usize,
    pub a: Vector,
    pub b: f64,
    pub theta: Vector,
}

enum Inputs {
    Iid,
    Ar1(Ar1Process),
}

/// Deterministic stream of `(a_n, b_n, θ_n)` for one trial of a scenario.
pub struct Stream {
    scenario: Scenario,
    system_rng: ChaCha8Rng,
    data_rng: ChaCha8Rng,
    inputs: Inputs,
    theta: Vector,
    sigma: f64,
    n: usize,
}

impl Stream {
    pub fn new(scenario: Scenario, trial: u64) -> Result<Self> {
        scenario.validate()?;
        let mut system_rng = trial_rng(scenario.seed, trial, SYSTEM_TAG);
        let mut data_rng = trial_rng(scenario.seed, trial, DATA_TAG);
        let theta = make_sparse_system(scenario.dim, scenario.sparsity_pct, &mut system_rng)?;
        let sigma = noise_sigma(scenario.snr_db, theta.view(), 1.0);
        let inputs = match scenario.input {
            InputModel::Iid => Inputs::Iid,
            model => Inputs::Ar1(Ar1Process::new(scenario.dim, model.delta(), &mut data_rng)?),
        };
        Ok(Stream { scenario, system_rng, data_rng, inputs, theta, sigma, n: 0 })
    }

    pub fn theta(&self) -> &Vector {
        &self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }
}

impl Iterator for Stream {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        if self.n >= self.scenario.horizon {
            return None;
        }
        self.n += 1;
        if let Some(change) = self.scenario.change {
            if change.at == self.n {
                // validated in Scenario::validate
                self.theta = make_sparse_system(self.scenario.dim, change.sparsity_pct, &mut self.system_rng)
                    .expect("validated sparsity");
                self.sigma = noise_sigma(self.scenario.snr_db, self.theta.view(), 1.0);
            }
        }
        let a = match &mut self.inputs {
            Inputs::Iid => iid_sample(self.scenario.dim, &mut self.data_rng),
            Inputs::Ar1(p) => p.next_sample(&mut self.data_rng),
        };
        let noise = if self.sigma > 0.0 {
            let z: f64 = StandardNormal.sample(&mut self.data_rng);
            self.sigma * z
        } else {
            0.0
        };
        let b = a.dot(&self.theta) + noise;
        Some(Sample { n: self.n, a, b, theta: self.theta.clone() })
    }
}
