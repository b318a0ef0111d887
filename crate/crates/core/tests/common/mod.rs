#![allow(dead_code)]

use netspace::{Architecture, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Widths in `1..=max_width`, input dimension `d`, `layers` layers, scalar output.
pub fn random_arch(
    rng: &mut ChaCha8Rng,
    d: usize,
    layers: usize,
    max_width: usize,
) -> Architecture {
    let mut dims = vec![d];
    for _ in 1..layers {
        dims.push(rng.gen_range(1..=max_width));
    }
    dims.push(1);
    Architecture::new(dims).unwrap()
}

pub fn random_net(rng: &mut ChaCha8Rng, arch: &Architecture, scale: f64) -> Network {
    let params: Vec<f64> = (0..arch.num_params())
        .map(|_| rng.gen_range(-scale..=scale))
        .collect();
    Network::from_params(arch, &params).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, d: usize, b: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-b..=b)).collect()
}
