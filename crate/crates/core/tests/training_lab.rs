mod common;

use netspace::training::{
    control_network, exploding_weights_experiment, gradient_check, midpoint_gap_experiment,
    midpoint_instance, Dataset, Optimizer, Target, TrainConfig,
};
use netspace::{Activation, Architecture, DomainBox};
use rand::Rng;

/// Reporting threshold for the midpoint gap of the shipped instance.
const GAP_THRESHOLD: f64 = 1e-3;

#[test]
fn gradients_match_central_differences_on_deeper_nets() {
    let mut rng = common::rng(21);
    for act in Activation::all() {
        for _ in 0..5 {
            let d = rng.gen_range(1..=2);
            let depth = rng.gen_range(2..=4);
            let arch = common::random_arch(&mut rng, d, depth, 3);
            let net = common::random_net(&mut rng, &arch, 1.0);
            let n = rng.gen_range(1..=16);
            let inputs = (0..n)
                .map(|_| common::random_point(&mut rng, d, 1.0))
                .collect();
            let targets = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let data = Dataset::new(inputs, targets).unwrap();
            assert!(
                gradient_check(&net, &act, &data, 1e-5).unwrap() <= 1e-5,
                "{act}"
            );
        }
    }
}

#[test]
fn shipped_midpoint_gap_is_positive() {
    let arch = Architecture::new(vec![1, 2, 1]).unwrap();
    let dom = DomainBox::new(1, 1.0, 257).unwrap();
    let (f1, f2) = midpoint_instance();
    // the default budget is too short to refit f1 itself from random starts
    let cfg = TrainConfig {
        step: 0.2,
        iterations: 5000,
        ..TrainConfig::default()
    };
    let gap = midpoint_gap_experiment(&Activation::Relu, &arch, &f1, &f2, &dom, 20, &cfg).unwrap();
    assert_eq!(gap.per_restart.len(), 20);
    println!("midpoint floor {}", gap.floor);
    assert!(gap.floor > GAP_THRESHOLD);

    // f2 = f1: the midpoint is in the set
    let same = midpoint_gap_experiment(&Activation::Relu, &arch, &f1, &f1, &dom, 20, &cfg).unwrap();
    assert!(same.floor <= GAP_THRESHOLD, "{}", same.floor);
}

#[test]
fn control_target_keeps_norms_bounded() {
    let arch = Architecture::new(vec![1, 2, 1]).unwrap();
    let dom = DomainBox::with_default_grid(1, 1.0).unwrap();
    let target = Target::Network {
        net: control_network(),
        act: Activation::Relu,
    };
    let cfg = TrainConfig {
        iterations: 500,
        ..TrainConfig::default()
    };
    let (summary, _) = exploding_weights_experiment(
        &Activation::Relu,
        &arch,
        &target,
        &[64, 256, 1024],
        &dom,
        &cfg,
    )
    .unwrap();
    for row in &summary.rows {
        assert!(row.final_norm_total <= 10.0 * summary.init_norm_total);
    }
}

#[test]
fn momentum_runs_are_deterministic() {
    let arch = Architecture::new(vec![1, 3, 1]).unwrap();
    let dom = DomainBox::with_default_grid(1, 1.0).unwrap();
    let cfg = TrainConfig {
        iterations: 200,
        optimizer: Optimizer::Momentum { beta: 0.9 },
        seed: 4,
        ..TrainConfig::default()
    };
    let target = Target::DerivativeLimit {
        act: Activation::Sigmoid,
        lambda: 1.0,
    };
    let run = || {
        exploding_weights_experiment(&Activation::Sigmoid, &arch, &target, &[16, 32], &dom, &cfg)
            .unwrap()
    };
    let (a, na) = run();
    let (b, nb) = run();
    assert_eq!(na, nb);
    assert_eq!(
        a.rows
            .iter()
            .map(|r| r.final_loss.to_bits())
            .collect::<Vec<_>>(),
        b.rows
            .iter()
            .map(|r| r.final_loss.to_bits())
            .collect::<Vec<_>>()
    );
}
