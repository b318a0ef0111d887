//! Realization-preserving rewrites of ReLU and parametric-ReLU networks.

use crate::activations::Activation;
use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::network::Network;

/// A hidden neuron: zero-based layer index into `Network::layers` and row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeuronRef {
    pub layer: usize,
    pub neuron: usize,
}

#[derive(Debug, Clone)]
pub struct Canonicalized {
    pub network: Network,
    /// Neurons that are inactive on the whole domain; zeroed.
    pub dead: Vec<NeuronRef>,
    /// Neurons that are active on the whole domain; bias capped, excess folded forward.
    pub capped: Vec<NeuronRef>,
    /// `R'_l`: sup-norm bound on the inputs of each hidden layer.
    pub input_radii: Vec<f64>,
}

fn l1(row: &[f64]) -> f64 {
    row.iter().map(|w| w.abs()).sum()
}

/// Box of hidden outputs, given the (possibly rewritten) layer and the input radius.
fn relu_box(row_caps: &[f64], bias: &[f64]) -> Vec<(f64, f64)> {
    row_caps
        .iter()
        .zip(bias)
        .map(|(cap, b)| ((b - cap).max(0.0), (b + cap).max(0.0)))
        .collect()
}

fn radius(bx: &[(f64, f64)]) -> f64 {
    bx.iter()
        .fold(0.0, |r, (lo, hi)| r.max(lo.abs()).max(hi.abs()))
}

/// Per hidden neuron, the bound `R'_l * ||row||_1` on `|<w, x>|` over the domain,
/// propagated with forward interval boxes.
pub fn hidden_bias_caps(net: &Network, domain: &DomainBox) -> Result<Vec<Vec<f64>>> {
    check_domain(net, domain)?;
    let mut r = domain.half_width();
    let mut caps = Vec::new();
    let hidden = net.num_layers() - 1;
    for layer in &net.layers()[..hidden] {
        let c: Vec<f64> = (0..layer.out_dim())
            .map(|j| l1(layer.weights.row(j)) * r)
            .collect();
        r = radius(&relu_box(&c, &layer.bias));
        caps.push(c);
    }
    Ok(caps)
}

fn check_domain(net: &Network, domain: &DomainBox) -> Result<()> {
    if net.input_dim() != domain.dim() {
        return Err(Error::Shape(format!(
            "network input dimension {} does not match domain dimension {}",
            net.input_dim(),
            domain.dim()
        )));
    }
    Ok(())
}

/// Rewrites hidden biases of a ReLU network so that every `|b_j| <= R'_l ||row_j||_1`.
///
/// A neuron with `b_j < -cap` never fires on the domain and is zeroed. One with
/// `b_j > cap` is linear on the domain: its bias becomes `cap` and the excess
/// `(b_j - cap) * A_{l+1}[:, j]` moves into the next bias. Other neurons are kept.
pub fn canonicalize_relu_biases(
    net: &Network,
    act: &Activation,
    domain: &DomainBox,
) -> Result<Canonicalized> {
    if *act != Activation::Relu {
        return Err(Error::UnsupportedActivation {
            activation: act.to_string(),
            condition: "relu".into(),
        });
    }
    check_domain(net, domain)?;
    let mut out = net.clone();
    let mut dead = Vec::new();
    let mut capped = Vec::new();
    let mut input_radii = Vec::new();
    let mut r = domain.half_width();
    let hidden = out.num_layers() - 1;

    for l in 0..hidden {
        input_radii.push(r);
        let (this, rest) = out.layers_mut().split_at_mut(l + 1);
        let layer = &mut this[l];
        let next = &mut rest[0];
        let mut caps = Vec::with_capacity(layer.out_dim());
        for j in 0..layer.out_dim() {
            let cap = l1(layer.weights.row(j)) * r;
            let beta = layer.bias[j];
            if beta < -cap {
                layer.weights.row_mut(j).fill(0.0);
                layer.bias[j] = 0.0;
                dead.push(NeuronRef {
                    layer: l,
                    neuron: j,
                });
                caps.push(0.0);
                continue;
            }
            if beta > cap {
                let excess = beta - cap;
                layer.bias[j] = cap;
                for i in 0..next.out_dim() {
                    next.bias[i] += excess * next.weights.get(i, j);
                }
                capped.push(NeuronRef {
                    layer: l,
                    neuron: j,
                });
            }
            caps.push(cap);
        }
        r = radius(&relu_box(&caps, &layer.bias));
    }

    Ok(Canonicalized {
        network: out,
        dead,
        capped,
        input_radii,
    })
}

/// Rescales every nonzero first-layer row of a two-layer parametric-ReLU network
/// to unit Euclidean norm, moving the factor into the output column.
pub fn normalize_parrelu_rows(net: &Network, a: f64) -> Result<Network> {
    if net.num_layers() != 2 {
        return Err(Error::Contract(format!(
            "row normalization needs exactly 2 layers, got {}",
            net.num_layers()
        )));
    }
    if !(a >= 0.0) {
        return Err(Error::Contract(format!(
            "slope must be nonnegative, got {a}"
        )));
    }
    let mut out = net.clone();
    let (first, second) = out.layers_mut().split_at_mut(1);
    let (first, second) = (&mut first[0], &mut second[0]);
    for j in 0..first.out_dim() {
        let c = first
            .weights
            .row(j)
            .iter()
            .map(|w| w * w)
            .sum::<f64>()
            .sqrt();
        if c == 0.0 {
            continue;
        }
        first.weights.row_mut(j).iter_mut().for_each(|w| *w /= c);
        first.bias[j] /= c;
        for i in 0..second.out_dim() {
            let w = second.weights.get(i, j);
            second.weights.set(i, j, w * c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Layer;

    fn net(layers: Vec<(Vec<Vec<f64>>, Vec<f64>)>) -> Network {
        Network::new(
            layers
                .into_iter()
                .map(|(a, b)| Layer::from_rows(&a, &b).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn line() -> DomainBox {
        DomainBox::with_default_grid(1, 1.0).unwrap()
    }

    fn max_grid_diff(a: &Network, b: &Network, act: &Activation, dom: &DomainBox) -> f64 {
        dom.nodes()
            .iter()
            .map(|x| (a.eval_scalar(act, x) - b.eval_scalar(act, x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn always_active_neuron_is_capped() {
        let input = net(vec![
            (vec![vec![1.0]], vec![1e6]),
            (vec![vec![1.0]], vec![0.0]),
        ]);
        let c = canonicalize_relu_biases(&input, &Activation::Relu, &line()).unwrap();
        let layers = c.network.layers();
        assert_eq!(layers[0].bias, vec![1.0]);
        assert_eq!(layers[1].bias, vec![1e6 - 1.0]);
        assert_eq!(
            c.capped,
            vec![NeuronRef {
                layer: 0,
                neuron: 0
            }]
        );
        // relu(x + 1e6) = x + 1e6 on [-1, 1]
        for x in line().nodes() {
            assert_eq!(c.network.eval_scalar(&Activation::Relu, &x), x[0] + 1e6);
        }
    }

    #[test]
    fn always_dead_neuron_is_zeroed() {
        let input = net(vec![
            (vec![vec![2.0], vec![1.0]], vec![-1e6, 0.5]),
            (vec![vec![3.0, 1.0]], vec![0.25]),
        ]);
        let c = canonicalize_relu_biases(&input, &Activation::Relu, &line()).unwrap();
        assert_eq!(c.network.layers()[0].weights.row(0), &[0.0]);
        assert_eq!(c.network.layers()[0].bias[0], 0.0);
        assert_eq!(
            c.dead,
            vec![NeuronRef {
                layer: 0,
                neuron: 0
            }]
        );
        assert_eq!(
            max_grid_diff(&input, &c.network, &Activation::Relu, &line()),
            0.0
        );
    }

    #[test]
    fn unsaturated_is_identity() {
        let input = net(vec![
            (vec![vec![2.0], vec![-1.0]], vec![1.5, -0.5]),
            (vec![vec![1.0, 1.0]], vec![3.0]),
        ]);
        let c = canonicalize_relu_biases(&input, &Activation::Relu, &line()).unwrap();
        assert_eq!(c.network, input);
        assert!(c.dead.is_empty() && c.capped.is_empty());
    }

    #[test]
    fn deep_mixed_network_preserved_and_bounded() {
        let input = net(vec![
            (
                vec![vec![1.0, -2.0], vec![0.5, 0.5], vec![1.0, 1.0]],
                vec![50.0, -9.0, 0.3],
            ),
            (
                vec![vec![1.0, 2.0, -1.0], vec![-0.2, 0.1, 0.4]],
                vec![-1e3, 400.0],
            ),
            (vec![vec![2.0, -3.0]], vec![1.0]),
        ]);
        let dom = DomainBox::with_default_grid(2, 1.0).unwrap();
        let c = canonicalize_relu_biases(&input, &Activation::Relu, &dom).unwrap();
        assert!(max_grid_diff(&input, &c.network, &Activation::Relu, &dom) <= 1e-9);
        let caps = hidden_bias_caps(&c.network, &dom).unwrap();
        for (l, layer_caps) in caps.iter().enumerate() {
            for (j, cap) in layer_caps.iter().enumerate() {
                assert!(
                    c.network.layers()[l].bias[j].abs() <= cap + 1e-12,
                    "{l},{j}"
                );
            }
        }
        assert!(!c.capped.is_empty() && !c.dead.is_empty());
        assert_eq!(c.input_radii[0], 1.0);
    }

    #[test]
    fn norm_total_can_grow_when_outgoing_weight_is_large() {
        // folding (b - cap) * 5 into the next bias exceeds the original total norm
        let input = net(vec![
            (vec![vec![1.0]], vec![3.0]),
            (vec![vec![5.0]], vec![0.0]),
        ]);
        let c = canonicalize_relu_biases(&input, &Activation::Relu, &line()).unwrap();
        assert_eq!(c.network.layers()[1].bias, vec![10.0]);
        assert!(c.network.norm_total() > input.norm_total());
    }

    #[test]
    fn non_relu_rejected() {
        let input = net(vec![
            (vec![vec![1.0]], vec![0.0]),
            (vec![vec![1.0]], vec![0.0]),
        ]);
        assert!(matches!(
            canonicalize_relu_biases(&input, &Activation::Tanh, &line()),
            Err(Error::UnsupportedActivation { .. })
        ));
    }

    #[test]
    fn parrelu_row_example() {
        let input = net(vec![
            (vec![vec![3.0, 4.0]], vec![5.0]),
            (vec![vec![2.0]], vec![0.0]),
        ]);
        let out = normalize_parrelu_rows(&input, 0.2).unwrap();
        let l = out.layers();
        assert!((l[0].weights.get(0, 0) - 0.6).abs() < 1e-15);
        assert!((l[0].weights.get(0, 1) - 0.8).abs() < 1e-15);
        assert_eq!(l[0].bias, vec![1.0]);
        assert_eq!(l[1].weights.get(0, 0), 10.0);
        let act = Activation::ParametricRelu { a: 0.2 };
        let dom = DomainBox::with_default_grid(2, 2.0).unwrap();
        assert!(max_grid_diff(&input, &out, &act, &dom) <= 1e-12);
    }

    #[test]
    fn parrelu_zero_row_and_unit_rows_untouched() {
        let input = net(vec![
            (vec![vec![0.0, 0.0], vec![0.6, -0.8]], vec![1.5, 0.1]),
            (vec![vec![7.0, -2.0]], vec![0.0]),
        ]);
        let out = normalize_parrelu_rows(&input, 0.0).unwrap();
        assert_eq!(out.layers()[0].weights.row(0), &[0.0, 0.0]);
        assert_eq!(out.layers()[0].bias[0], 1.5);
        assert_eq!(out.layers()[1].weights.get(0, 0), 7.0);
        assert!((out.layers()[1].weights.get(0, 1) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn parrelu_depth_contract() {
        let one = net(vec![(vec![vec![1.0]], vec![0.0])]);
        assert!(matches!(
            normalize_parrelu_rows(&one, 0.1),
            Err(Error::Contract(_))
        ));
    }
}
