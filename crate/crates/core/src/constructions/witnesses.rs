//! Witness families converging to functions outside the realization set,
//! and the inverse-instability family converging to zero with exploding
//! weights.

use super::identity::{build_identity_network, build_projection_network};
use super::{ConvergenceMode, Limit, Rate, WitnessKind, WitnessSequence};
use crate::activations::{check_approx_homogeneity, Activation, HomogeneityOrder};
use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::network::{Architecture, Layer, Matrix, Network};
use crate::probes;

fn unsupported(act: &Activation, condition: &str) -> Error {
    Error::UnsupportedActivation {
        activation: act.to_string(),
        condition: condition.to_string(),
    }
}

fn check_indices(n_list: &[u64]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::Contract("index list is empty".into()));
    }
    if n_list.contains(&0) {
        return Err(Error::Contract("indices must be positive".into()));
    }
    Ok(())
}

fn check_depth(layers: usize) -> Result<()> {
    if layers < 2 {
        return Err(Error::Contract(format!(
            "witness networks need at least 2 layers, got {layers}"
        )));
    }
    Ok(())
}

fn layer(rows: Vec<Vec<f64>>, bias: Vec<f64>) -> Layer {
    Layer::from_rows(&rows, &bias).expect("construction shapes are consistent")
}

fn two_layer(first: Layer, second: Layer) -> Network {
    Network::new(vec![first, second]).expect("construction shapes are consistent")
}

/// Network of architecture `(d, 1, ..., 1)` with `layers` layers realizing
/// (approximately, within `eps`) `x -> <v, x - x*>`.
fn hyperplane_functional(
    act: &Activation,
    layers: usize,
    x_star: &[f64],
    v: &[f64],
    inner_half_width: f64,
    eps: f64,
) -> Result<Network> {
    let offset: f64 = v.iter().zip(x_star).map(|(a, b)| a * b).sum();
    let affine = Network::new(vec![layer(vec![v.to_vec()], vec![-offset])])?;
    if layers == 1 {
        return Ok(affine);
    }
    let psi = build_identity_network(act, 1, layers, eps, inner_half_width)?;
    Network::concatenate(&psi.network, &affine)
}

/// Step-function witness for non-closedness in `L^p`.
///
/// Unbounded activations (distinct asymptotic slopes) use
/// `h_n = f(n J) - f(n J - 1)` on architecture `(d, 1, ..., 1, 2, 1)`;
/// bounded ones use `f(n J)` on `(d, 1, ..., 1, 1, 1)`. `J` is the signed
/// distance to the hyperplane through `x_star` with unit normal `v`.
pub fn build_step_witness(
    act: &Activation,
    layers: usize,
    n_list: &[u64],
    domain: &DomainBox,
    x_star: &[f64],
    v: &[f64],
    p: f64,
) -> Result<WitnessSequence> {
    check_depth(layers)?;
    check_indices(n_list)?;
    if !(p > 0.0) {
        return Err(Error::Contract(format!("p must be positive, got {p}")));
    }
    if !domain.contains(x_star) {
        return Err(Error::Contract(format!(
            "x* = {x_star:?} is outside the domain"
        )));
    }
    if v.len() != domain.dim() {
        return Err(Error::Shape(format!(
            "normal has length {}, domain dimension is {}",
            v.len(),
            domain.dim()
        )));
    }
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "normal must have unit length, got {norm}"
        )));
    }

    let limit;
    let outer: Box<dyn Fn(f64) -> Network>;
    if act.is_bounded() {
        let (c, c_minus) = act
            .range_limits()
            .expect("bounded activations store limits");
        limit = Limit::HalfSpace {
            x_star: x_star.to_vec(),
            v: v.to_vec(),
            plus: c,
            on_plane: act.eval(0.0),
            minus: c_minus,
        };
        outer = Box::new(|n| {
            two_layer(
                layer(vec![vec![n]], vec![0.0]),
                layer(vec![vec![1.0]], vec![0.0]),
            )
        });
    } else {
        match act.asymptotic_slopes() {
            Some((lam, lam_minus)) if lam != lam_minus => {
                limit = Limit::HalfSpace {
                    x_star: x_star.to_vec(),
                    v: v.to_vec(),
                    plus: lam,
                    on_plane: act.eval(0.0) - act.eval(-1.0),
                    minus: lam_minus,
                };
                outer = Box::new(|n| {
                    two_layer(
                        layer(vec![vec![n], vec![n]], vec![0.0, -1.0]),
                        layer(vec![vec![1.0, -1.0]], vec![0.0]),
                    )
                });
            }
            _ => return Err(unsupported(act, "(iv)(a)/(iv)(b)")),
        }
    }

    let inner_half_width = 2.0 * domain.dim() as f64 * domain.half_width();
    let mut members = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let j = hyperplane_functional(
            act,
            layers - 1,
            x_star,
            v,
            inner_half_width,
            1.0 / (nf * nf),
        )?;
        members.push((n, Network::concatenate(&outer(nf), &j)?));
    }

    let (n0, first) = &members[0];
    let d0 = probes::lp_distance_masked(
        |x| first.eval_scalar(act, x),
        |x| limit.eval(x),
        p,
        domain,
        |x| limit.is_null_point(x),
    );
    let rate = Rate::Fitted {
        constant: d0 * (*n0 as f64).powf(1.0 / p),
        exponent: 1.0 / p,
    };
    Ok(WitnessSequence {
        kind: WitnessKind::StepLp,
        activation: *act,
        domain: domain.clone(),
        mode: ConvergenceMode::Lp(p),
        limit,
        rate,
        members,
    })
}

/// Uniform witness converging to `x -> lambda f'(lambda x_1)` for `C^1` activations,
/// on architecture `(d, 1, ..., 1, 2, 1)`.
pub fn build_derivative_witness(
    act: &Activation,
    lambda: f64,
    layers: usize,
    domain: &DomainBox,
    n_list: &[u64],
) -> Result<WitnessSequence> {
    check_depth(layers)?;
    check_indices(n_list)?;
    if !act.smoothness().is_at_least(1) {
        return Err(unsupported(act, "C1"));
    }
    if !(lambda > 0.0) {
        return Err(Error::Contract(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let d = domain.dim();
    let mut members = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let outer = two_layer(
            layer(vec![vec![lambda], vec![lambda]], vec![lambda / nf, 0.0]),
            layer(vec![vec![nf, -nf]], vec![0.0]),
        );
        let proj = build_projection_network(
            act,
            d,
            0,
            layers - 1,
            1.0 / (2.0 * nf * nf),
            domain.half_width(),
        )?;
        members.push((n, Network::concatenate(&outer, &proj.network)?));
    }
    Ok(WitnessSequence {
        kind: WitnessKind::DerivativeC1,
        activation: *act,
        domain: domain.clone(),
        mode: ConvergenceMode::Uniform,
        limit: Limit::ScaledDerivative { act: *act, lambda },
        rate: Rate::None,
        members,
    })
}

/// Uniform witness converging to the unbounded analytic function
/// `x -> f(x_1) + f'(x*) x_1`, for bounded analytic activations.
pub fn build_analytic_witness(
    act: &Activation,
    x_star: f64,
    layers: usize,
    domain: &DomainBox,
    n_list: &[u64],
) -> Result<WitnessSequence> {
    check_depth(layers)?;
    check_indices(n_list)?;
    if !(act.is_bounded() && act.smoothness() == crate::activations::Smoothness::Analytic) {
        return Err(unsupported(act, "bounded-analytic"));
    }
    let slope = act.deriv(x_star);
    if slope == 0.0 {
        return Err(Error::Contract(format!(
            "derivative vanishes at x* = {x_star}"
        )));
    }
    let d = domain.dim();
    let r_star = act.eval(x_star);
    let mut members = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let outer = two_layer(
            layer(vec![vec![1.0], vec![1.0 / nf]], vec![0.0, x_star]),
            layer(vec![vec![1.0, nf]], vec![-r_star * nf]),
        );
        let proj = build_projection_network(act, d, 0, layers - 1, 1.0 / nf, domain.half_width())?;
        members.push((n, Network::concatenate(&outer, &proj.network)?));
    }
    Ok(WitnessSequence {
        kind: WitnessKind::AnalyticBounded,
        activation: *act,
        domain: domain.clone(),
        mode: ConvergenceMode::Uniform,
        limit: Limit::ShiftedActivation { act: *act, slope },
        rate: Rate::None,
        members,
    })
}

/// Uniform witness `k^{-r} f(k x_1) -> max(x_1, 0)^r` on architecture `(d, 1, 1)`
/// for activations approximately homogeneous of order `(r, q)`, `r != q`.
/// When `q > r` the mirrored family `(-k)^{-q} f(-k x_1)` is used.
pub fn build_homogeneity_witness(
    act: &Activation,
    order: HomogeneityOrder,
    domain: &DomainBox,
    k_list: &[u64],
) -> Result<WitnessSequence> {
    check_indices(k_list)?;
    if order.r == order.q {
        return Err(Error::Contract(format!(
            "homogeneity witness needs r != q, got r = q = {}",
            order.r
        )));
    }
    let top = order.r.max(order.q);
    if !act.smoothness().is_at_least(top) {
        return Err(unsupported(act, &format!("C{top}")));
    }
    let half_width = domain.half_width();
    let k_max = *k_list.iter().max().expect("non-empty") as f64;
    let measured = check_approx_homogeneity(act, order, k_max * half_width);
    if !(measured <= order.s) {
        return Err(unsupported(
            act,
            &format!(
                "homogeneous of order ({},{}) with slack {} (measured {measured})",
                order.r, order.q, order.s
            ),
        ));
    }

    let d = domain.dim();
    let mirrored = order.q > order.r;
    let mut members = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let kf = k as f64;
        let (inner, outer) = if mirrored {
            (-kf, (-kf).powi(-(order.q as i32)))
        } else {
            (kf, kf.powi(-(order.r as i32)))
        };
        let mut row = vec![0.0; d];
        row[0] = inner;
        let net = Network::new(vec![
            Layer::new(Matrix::from_vec(1, d, row)?, vec![0.0])?,
            layer(vec![vec![outer]], vec![0.0]),
        ])?;
        members.push((k, net));
    }

    let rate = match act.homogeneity_profile() {
        Some((profile, pos, neg)) if profile.r == order.r && profile.q == order.q => Rate::Bound {
            constant: pos.max(neg),
            power: f64::from(top),
            identity_slack: Vec::new(),
        },
        _ => {
            // |k^{-r} f(kx)| <= k^{-r}(s + k^q B^q) on the far side, s k^{-r} on the near side
            let low = order.r.min(order.q);
            let slack = order.s;
            let entries = k_list
                .iter()
                .map(|&k| {
                    let kf = k as f64;
                    let far = kf.powi(-(top as i32))
                        * (slack + kf.powi(low as i32) * half_width.powi(low as i32));
                    let near = slack * kf.powi(-(top as i32));
                    (k, far.max(near))
                })
                .collect();
            Rate::Bound {
                constant: 0.0,
                power: 0.0,
                identity_slack: entries,
            }
        }
    };

    Ok(WitnessSequence {
        kind: WitnessKind::Homogeneity,
        activation: *act,
        domain: domain.clone(),
        mode: ConvergenceMode::Uniform,
        limit: Limit::PositivePower { exponent: top },
        rate,
        members,
    })
}

/// Result of probing `f_a(x) = f(x + a) - 2 f(x) + f(x - a)` for non-constancy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstabilityProbe {
    pub a: f64,
    /// Grid argmin/argmax of `f_a`, sorted so `b < c`.
    pub b: f64,
    pub c: f64,
    pub oscillation: f64,
}

pub const OSCILLATION_THRESHOLD: f64 = 1e-6;

fn second_difference(act: &Activation, a: f64, x: f64) -> f64 {
    act.eval(x + a) - 2.0 * act.eval(x) + act.eval(x - a)
}

/// Finds `a` with `f_a` non-constant, trying `a` itself when given, else
/// `1, 1/2, 1/4, ...` down to `2^-20`. Oscillation is measured on 1025
/// points of `[-4 max(a,1), 4 max(a,1)]`.
pub fn instability_probe(act: &Activation, a: Option<f64>) -> Result<InstabilityProbe> {
    let candidates: Vec<f64> = match a {
        Some(a) if a > 0.0 && a.is_finite() => vec![a],
        Some(a) => return Err(Error::Contract(format!("a must be positive, got {a}"))),
        None => (0..=20).map(|k| (-f64::from(k)).exp2()).collect(),
    };
    for a in candidates {
        let span = 4.0 * a.max(1.0);
        let grid = DomainBox::new(1, span, 1025)?;
        let mut lo = (f64::INFINITY, 0.0);
        let mut hi = (f64::NEG_INFINITY, 0.0);
        for x in grid.axis_nodes() {
            let v = second_difference(act, a, x);
            if v < lo.0 {
                lo = (v, x);
            }
            if v > hi.0 {
                hi = (v, x);
            }
        }
        let oscillation = hi.0 - lo.0;
        if oscillation > OSCILLATION_THRESHOLD {
            let (b, c) = if lo.1 < hi.1 {
                (lo.1, hi.1)
            } else {
                (hi.1, lo.1)
            };
            return Ok(InstabilityProbe {
                a,
                b,
                c,
                oscillation,
            });
        }
    }
    Err(unsupported(
        act,
        "non-affine (f_a constant for every probed a)",
    ))
}

/// Family `F_n = psi(n^{-1} f_a(n^2 (x - x0)_1))` converging uniformly to 0 while
/// its Lipschitz constant grows like `n`; enlarged to `arch`.
///
/// `psi` is exact for two layers and otherwise an identity approximant
/// with tolerance `1/n^2`.
pub fn build_instability_sequence(
    act: &Activation,
    arch: &Architecture,
    domain: &DomainBox,
    x0: &[f64],
    a: Option<f64>,
    n_list: &[u64],
) -> Result<(WitnessSequence, InstabilityProbe)> {
    check_indices(n_list)?;
    let dims = arch.dims();
    if arch.num_layers() < 2 {
        return Err(Error::Contract(format!(
            "architecture {arch} needs at least 2 layers"
        )));
    }
    if dims[1] < 3 {
        return Err(Error::Contract(format!(
            "architecture {arch} needs at least 3 neurons in the first hidden layer"
        )));
    }
    if arch.output_dim() != 1 {
        return Err(Error::Contract(format!(
            "architecture {arch} must have output width 1"
        )));
    }
    if arch.input_dim() != domain.dim() || x0.len() != domain.dim() {
        return Err(Error::Shape(format!(
            "architecture {arch}, point {x0:?} and domain dimension {} disagree",
            domain.dim()
        )));
    }
    if x0.iter().any(|v| v.abs() >= domain.half_width()) {
        return Err(Error::Contract(format!(
            "x0 = {x0:?} is not interior to the domain"
        )));
    }
    if act.is_affine() {
        return Err(unsupported(act, "non-affine"));
    }
    let probe = instability_probe(act, a)?;
    let a = probe.a;
    let lip = act.lipschitz();
    let d = domain.dim();
    let layers = arch.num_layers();

    let mut members = Vec::with_capacity(n_list.len());
    let mut slack = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let n2 = nf * nf;
        let mut a1 = Matrix::zeros(3, d);
        for i in 0..3 {
            a1.set(i, 0, n2);
        }
        let shift = -n2 * x0[0];
        let base = Network::new(vec![
            Layer::new(a1, vec![shift + a, shift, shift - a])?,
            layer(vec![vec![1.0 / nf, -2.0 / nf, 1.0 / nf]], vec![0.0]),
        ])?;
        let (net, eps) = if layers == 2 {
            (base, 0.0)
        } else {
            let eps = 1.0 / n2;
            let psi = build_identity_network(act, 1, layers - 1, eps, 2.0 * lip * a)?;
            (Network::concatenate(&psi.network, &base)?, psi.sup_error)
        };
        members.push((n, net.enlarge(arch)?));
        slack.push((n, eps));
    }

    let seq = WitnessSequence {
        kind: WitnessKind::Instability,
        activation: *act,
        domain: domain.clone(),
        mode: ConvergenceMode::Uniform,
        limit: Limit::Zero,
        rate: Rate::Bound {
            constant: 2.0 * lip * a,
            power: 1.0,
            identity_slack: slack,
        },
        members,
    };
    Ok((seq, probe))
}
