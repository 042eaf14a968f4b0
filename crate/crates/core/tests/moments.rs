//! Streaming moments against direct weighted summation.

mod common;

use common::gaussian_vec;
use hsdm_core::linalg::{norm2, Vector};
use hsdm_core::stats::{batch_recompute, RunningMoments};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel_gap(stream: &RunningMoments, batch: &RunningMoments) -> f64 {
    let dm = stream.r_mat.lin_comb(1.0, &batch.r_mat, -1.0).frobenius() / batch.r_mat.frobenius();
    let dv = norm2((&stream.r_vec - &batch.r_vec).view()) / norm2(batch.r_vec.view());
    dm.max(dv)
}

fn run(gamma: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = gaussian_vec(6, &mut rng);
    let mut m = RunningMoments::new(6, gamma).unwrap();
    let mut samples = Vec::new();
    for _ in 0..1000 {
        let a = gaussian_vec(6, &mut rng);
        let b = a.dot(&theta) + 0.1 * gaussian_vec(1, &mut rng)[0];
        m.update(a.view(), b);
        samples.push((a, b));
    }
    rel_gap(&m, &batch_recompute(&samples, gamma).unwrap())
}

#[test]
fn plain_average_matches_batch() {
    let gap = run(1.0, 1);
    assert!(gap <= 1e-10, "{gap:e}");
}

#[test]
fn forgetting_average_matches_batch() {
    let gap = run(0.9, 2);
    assert!(gap <= 1e-9, "{gap:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noiseless_identity(seed in any::<u64>(), gamma in 0.5f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = gaussian_vec(5, &mut rng);
        let mut m = RunningMoments::new(5, gamma).unwrap();
        for _ in 0..200 {
            let a = gaussian_vec(5, &mut rng);
            m.update(a.view(), a.dot(&theta));
        }
        let res: Vector = m.r_mat.matvec(theta.view()) - &m.r_vec;
        prop_assert!(norm2(res.view()) <= 1e-10 * (1.0 + norm2(theta.view())));
    }
}
