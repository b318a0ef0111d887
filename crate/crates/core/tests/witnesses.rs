mod common;

use netspace::constructions::{
    build_analytic_witness, build_derivative_witness, build_homogeneity_witness,
    build_instability_sequence, build_step_witness, canonicalize_relu_biases, default_index_list,
    hidden_bias_caps, normalize_parrelu_rows, WitnessSequence,
};
use netspace::probes::{sequence_report, sup_distance};
use netspace::{Activation, Architecture, DomainBox, HomogeneityOrder};

fn line() -> DomainBox {
    DomainBox::with_default_grid(1, 1.0).unwrap()
}

fn assert_nonincreasing(ws: &WitnessSequence) {
    let rows = sequence_report(ws);
    for w in rows.windows(2) {
        assert!(
            w[1].distance <= w[0].distance + 1e-12,
            "{} {}: n={} {} -> n={} {}",
            ws.kind,
            ws.activation,
            w[0].n,
            w[0].distance,
            w[1].n,
            w[1].distance
        );
    }
}

#[test]
fn step_witnesses_converge_monotonically() {
    let ns = default_index_list();
    for (act, layers) in [
        (Activation::Relu, 2),
        (Activation::Relu, 3),
        (Activation::Sigmoid, 2),
        (Activation::Tanh, 3),
        (Activation::Softplus, 2),
        (Activation::Elu { a: 1.0 }, 2),
    ] {
        let ws = build_step_witness(&act, layers, &ns, &line(), &[0.0], &[1.0], 2.0).unwrap();
        assert_nonincreasing(&ws);
        let rows = sequence_report(&ws);
        assert!(
            rows.last().unwrap().distance < 0.1 * rows[0].distance,
            "{act}"
        );
    }
}

#[test]
fn step_witness_in_two_dimensions() {
    let dom = DomainBox::with_default_grid(2, 1.0).unwrap();
    let v = [0.6, 0.8];
    let ws = build_step_witness(
        &Activation::Relu,
        2,
        &[1, 4, 16, 64],
        &dom,
        &[0.1, -0.2],
        &v,
        1.0,
    )
    .unwrap();
    assert_nonincreasing(&ws);
}

#[test]
fn uniform_witnesses_converge_monotonically() {
    let ns = default_index_list();
    for act in [
        Activation::Sigmoid,
        Activation::Tanh,
        Activation::Softsign,
        Activation::Elu { a: 1.0 },
    ] {
        let ws = build_derivative_witness(&act, 1.0, 2, &line(), &ns).unwrap();
        assert_nonincreasing(&ws);
    }
    for act in [
        Activation::Sigmoid,
        Activation::Tanh,
        Activation::Arctan,
        Activation::Isru { a: 1.0 },
    ] {
        let ws = build_analytic_witness(&act, 0.5, 2, &line(), &ns).unwrap();
        assert_nonincreasing(&ws);
    }
    let order = HomogeneityOrder {
        r: 1,
        q: 0,
        s: 1.0 + std::f64::consts::LN_2,
    };
    let ws = build_homogeneity_witness(&Activation::Softplus, order, &line(), &ns).unwrap();
    assert_nonincreasing(&ws);
}

#[test]
fn deep_uniform_witnesses_respect_rates() {
    let ws = build_derivative_witness(&Activation::Tanh, 2.0, 3, &line(), &[4, 16, 64]).unwrap();
    assert_nonincreasing(&ws);
    let ws = build_analytic_witness(&Activation::Sigmoid, 0.0, 4, &line(), &[4, 16, 64]).unwrap();
    assert_nonincreasing(&ws);
}

#[test]
fn instability_duality_for_relu() {
    for a in [1.0, 0.5, 0.25] {
        let arch = Architecture::new(vec![1, 3, 1]).unwrap();
        // fine enough to resolve the hat of half-width a / n^2 for n <= 16
        let dom = DomainBox::new(1, 1.0, 4097).unwrap();
        let (ws, _) = build_instability_sequence(
            &Activation::Relu,
            &arch,
            &dom,
            &[0.0],
            Some(a),
            &(1..=16).collect::<Vec<_>>(),
        )
        .unwrap();
        for row in sequence_report(&ws) {
            let product = row.distance * row.empirical_lipschitz;
            assert!(
                (product - a).abs() <= 0.1 * a,
                "a={a} n={}: {product}",
                row.n
            );
        }
    }
}

#[test]
fn instability_converges_for_smooth_activations() {
    let arch = Architecture::new(vec![1, 4, 2, 1]).unwrap();
    for act in [Activation::Tanh, Activation::Softplus, Activation::Sigmoid] {
        let (ws, _) =
            build_instability_sequence(&act, &arch, &line(), &[0.2], None, &[1, 4, 16]).unwrap();
        let rows = sequence_report(&ws);
        for r in &rows {
            assert!(
                r.distance <= ws.predicted_rate(r.n).unwrap(),
                "{act} n={}",
                r.n
            );
        }
        assert!(rows[2].norm_scaling >= 256.0);
    }
}

#[test]
fn canonicalization_is_sound_on_random_networks() {
    let mut rng = common::rng(11);
    let act = Activation::Relu;
    for case in 0..200 {
        let d = 1 + case % 3;
        let arch = common::random_arch(&mut rng, d, 2 + case % 3, 4);
        // large biases so that many neurons saturate
        let mut net = common::random_net(&mut rng, &arch, 1.0);
        let last = net.num_layers() - 1;
        for layer in net.layers_mut()[..last].iter_mut() {
            for b in layer.bias.iter_mut() {
                *b *= 8.0;
            }
        }
        let dom = DomainBox::with_default_grid(d, 1.0).unwrap();
        let c = canonicalize_relu_biases(&net, &act, &dom).unwrap();
        assert_eq!(c.network.arch(), arch);
        for _ in 0..200 {
            let x = common::random_point(&mut rng, d, 1.0);
            let (a, b) = (net.eval_scalar(&act, &x), c.network.eval_scalar(&act, &x));
            assert!((a - b).abs() <= 1e-9, "case {case}");
        }
        let caps = hidden_bias_caps(&c.network, &dom).unwrap();
        for (l, layer_caps) in caps.iter().enumerate() {
            for (j, cap) in layer_caps.iter().enumerate() {
                assert!(c.network.layers()[l].bias[j].abs() <= cap * (1.0 + 1e-12) + 1e-12);
            }
        }
        // idempotent
        let again = canonicalize_relu_biases(&c.network, &act, &dom).unwrap();
        assert!(
            again.dead.is_empty() && again.capped.is_empty(),
            "case {case}"
        );
    }
}

#[test]
fn row_normalization_keeps_sign_patterns() {
    let mut rng = common::rng(5);
    for case in 0..100 {
        let arch = common::random_arch(&mut rng, 2, 2, 5);
        let net = common::random_net(&mut rng, &arch, 3.0);
        let a = 0.1 * (case % 5) as f64;
        let act = Activation::ParametricRelu { a };
        let out = normalize_parrelu_rows(&net, a).unwrap();
        let dom = DomainBox::new(2, 1.0, 33).unwrap();
        for x in dom.nodes() {
            let before = net.layers()[0].affine(&x);
            let after = out.layers()[0].affine(&x);
            for (p, q) in before.iter().zip(&after) {
                assert_eq!(p.signum(), q.signum());
            }
        }
        let diff = sup_distance(
            |x| net.eval_scalar(&act, x),
            |x| out.eval_scalar(&act, x),
            &dom,
        );
        assert!(diff <= 1e-12, "case {case}: {diff}");
        for j in 0..out.layers()[0].out_dim() {
            let norm: f64 = out.layers()[0]
                .weights
                .row(j)
                .iter()
                .map(|w| w * w)
                .sum::<f64>()
                .sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }
}
