//! Identity and coordinate-projection approximants.
//!
//! With an anchor `(x0, r0, s0)` of the activation, the two-layer block
//! `x -> (C/s0) f(x/C + x0) - C r0/s0` tends to the identity as `C` grows.
//! Stacking `L - 1` such blocks by concatenation gives an `L`-layer
//! approximant. `C` is found by doubling from `B` until the grid error
//! is within tolerance.

use crate::activations::Activation;
use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::network::{Layer, Matrix, Network};

/// Number of doublings tried for the scale constant, `C in {B, 2B, ..., 2^20 B}`.
pub const MAX_SCALE_DOUBLINGS: u32 = 20;

#[derive(Debug, Clone)]
pub struct IdentityApproximant {
    pub network: Network,
    /// Certified scale constant; `None` for the exact single-layer case.
    pub scale: Option<f64>,
    /// Sup-error over the certification grid.
    pub sup_error: f64,
}

fn check_inputs(d: usize, layers: usize, eps: f64, half_width: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::Contract("dimension must be positive".into()));
    }
    if layers == 0 {
        return Err(Error::Contract("need at least one layer".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Contract(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    if !(half_width > 0.0) {
        return Err(Error::Contract(format!(
            "half-width must be positive, got {half_width}"
        )));
    }
    Ok(())
}

/// The `(d, d, d)` block realizing `rho_C` in every coordinate.
fn identity_block(act: &Activation, d: usize, scale: f64) -> Network {
    let anchor = act.anchor();
    let first = Layer {
        weights: Matrix::identity(d).scale(1.0 / scale),
        bias: vec![anchor.x0; d],
    };
    let second = Layer {
        weights: Matrix::identity(d).scale(scale / anchor.s0),
        bias: vec![-scale * anchor.r0 / anchor.s0; d],
    };
    Network::new(vec![first, second]).expect("block shapes are consistent")
}

/// The `(d, 1, 1)` block realizing `rho_C(x_i)`, or `(1, 1, 1)` when `d = 1`.
fn projection_block(act: &Activation, d: usize, i: usize, scale: f64) -> Network {
    let anchor = act.anchor();
    let mut row = vec![0.0; d];
    row[i] = 1.0 / scale;
    let first = Layer {
        weights: Matrix::from_vec(1, d, row).expect("1 x d"),
        bias: vec![anchor.x0],
    };
    let second = Layer {
        weights: Matrix::from_vec(1, 1, vec![scale / anchor.s0]).expect("1 x 1"),
        bias: vec![-scale * anchor.r0 / anchor.s0],
    };
    Network::new(vec![first, second]).expect("block shapes are consistent")
}

/// `first` followed by `count - 1` copies of `repeat`, joined by concatenation.
fn stack(first: Network, repeat: &Network, count: usize) -> Network {
    (1..count).fold(first, |acc, _| {
        Network::concatenate(repeat, &acc).expect("widths chain")
    })
}

fn identity_candidate(act: &Activation, d: usize, layers: usize, scale: f64) -> Network {
    let block = identity_block(act, d, scale);
    stack(block.clone(), &block, layers - 1)
}

fn projection_candidate(
    act: &Activation,
    d: usize,
    i: usize,
    layers: usize,
    scale: f64,
) -> Network {
    let first = projection_block(act, d, i, scale);
    let repeat = projection_block(act, 1, 0, scale);
    stack(first, &repeat, layers - 1)
}

/// Grid sup of `max_j |R(x)_j - target(x)_j|`.
fn grid_error(
    net: &Network,
    act: &Activation,
    grid: &DomainBox,
    target: impl Fn(&[f64]) -> Vec<f64>,
) -> f64 {
    let mut worst: f64 = 0.0;
    for x in grid.nodes() {
        let y = net.eval(act, &x);
        for (a, b) in y.iter().zip(target(&x)) {
            let e = (a - b).abs();
            // NaN must never certify
            if e.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(e);
        }
    }
    worst
}

fn search(
    eps: f64,
    half_width: f64,
    build: impl Fn(f64) -> Network,
    error_of: impl Fn(&Network) -> f64,
    what: &str,
) -> Result<IdentityApproximant> {
    let mut best = f64::INFINITY;
    for k in 0..=MAX_SCALE_DOUBLINGS {
        let scale = half_width * f64::from(k).exp2();
        let network = build(scale);
        let err = error_of(&network);
        best = best.min(err);
        if err <= eps {
            return Ok(IdentityApproximant {
                network,
                scale: Some(scale),
                sup_error: err,
            });
        }
    }
    Err(Error::ConstructionFailure {
        message: format!("no scale up to 2^{MAX_SCALE_DOUBLINGS} B certifies {what} to {eps:e}"),
        best_error: best,
    })
}

/// `L`-layer network of architecture `(d, ..., d)` whose realization is
/// within `eps` of the identity on the default grid of `[-B, B]^d`.
pub fn build_identity_network(
    act: &Activation,
    d: usize,
    layers: usize,
    eps: f64,
    half_width: f64,
) -> Result<IdentityApproximant> {
    check_inputs(d, layers, eps, half_width)?;
    if layers == 1 {
        let network = Network::new(vec![Layer {
            weights: Matrix::identity(d),
            bias: vec![0.0; d],
        }])?;
        return Ok(IdentityApproximant {
            network,
            scale: None,
            sup_error: 0.0,
        });
    }
    let grid = DomainBox::with_default_grid(d, half_width)?;
    search(
        eps,
        half_width,
        |c| identity_candidate(act, d, layers, c),
        |net| grid_error(net, act, &grid, |x| x.to_vec()),
        "the identity",
    )
}

/// `L`-layer network of architecture `(d, 1, ..., 1)` within `eps` of
/// `x -> x_i` (zero-based `i`) on the default grid of `[-B, B]^d`.
pub fn build_projection_network(
    act: &Activation,
    d: usize,
    i: usize,
    layers: usize,
    eps: f64,
    half_width: f64,
) -> Result<IdentityApproximant> {
    check_inputs(d, layers, eps, half_width)?;
    if i >= d {
        return Err(Error::Contract(format!(
            "coordinate {i} out of range for dimension {d}"
        )));
    }
    if layers == 1 {
        let mut row = vec![0.0; d];
        row[i] = 1.0;
        let network = Network::new(vec![Layer {
            weights: Matrix::from_vec(1, d, row)?,
            bias: vec![0.0],
        }])?;
        return Ok(IdentityApproximant {
            network,
            scale: None,
            sup_error: 0.0,
        });
    }
    let grid = DomainBox::with_default_grid(d, half_width)?;
    search(
        eps,
        half_width,
        |c| projection_candidate(act, d, i, layers, c),
        |net| grid_error(net, act, &grid, |x| vec![x[i]]),
        "the projection",
    )
}
