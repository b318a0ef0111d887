//! Explicit network constructions: identity approximants, witness
//! sequences for non-closedness and inverse instability, and the two
//! ReLU canonicalization passes.

mod canonical;
mod identity;
mod witnesses;

pub use canonical::{
    canonicalize_relu_biases, hidden_bias_caps, normalize_parrelu_rows, Canonicalized, NeuronRef,
};
pub use identity::{
    build_identity_network, build_projection_network, IdentityApproximant, MAX_SCALE_DOUBLINGS,
};
pub use witnesses::{
    build_analytic_witness, build_derivative_witness, build_homogeneity_witness,
    build_instability_sequence, build_step_witness, instability_probe, InstabilityProbe,
};

use std::fmt;

use crate::activations::Activation;
use crate::domain::DomainBox;
use crate::network::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    StepLp,
    DerivativeC1,
    AnalyticBounded,
    Homogeneity,
    Instability,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessKind::StepLp => "step_lp",
            WitnessKind::DerivativeC1 => "derivative_c1",
            WitnessKind::AnalyticBounded => "analytic_bounded",
            WitnessKind::Homogeneity => "homogeneity",
            WitnessKind::Instability => "instability",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceMode {
    Uniform,
    Lp(f64),
}

/// Closed-form limit of a witness family.
#[derive(Debug, Clone, PartialEq)]
pub enum Limit {
    /// `plus` on `<v, x - x*> > 0`, `minus` on `< 0`, `on_plane` on the hyperplane.
    HalfSpace {
        x_star: Vec<f64>,
        v: Vec<f64>,
        plus: f64,
        on_plane: f64,
        minus: f64,
    },
    /// `x -> lambda * f'(lambda x_1)`.
    ScaledDerivative {
        act: Activation,
        lambda: f64,
    },
    /// `x -> f(x_1) + slope * x_1`.
    ShiftedActivation {
        act: Activation,
        slope: f64,
    },
    /// `x -> max(x_1, 0)^exponent`.
    PositivePower {
        exponent: u32,
    },
    Zero,
}

impl Limit {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Limit::HalfSpace {
                x_star,
                v,
                plus,
                on_plane,
                minus,
            } => {
                let s = side(x_star, v, x);
                if s > 0.0 {
                    *plus
                } else if s < 0.0 {
                    *minus
                } else {
                    *on_plane
                }
            }
            Limit::ScaledDerivative { act, lambda } => lambda * act.deriv(lambda * x[0]),
            Limit::ShiftedActivation { act, slope } => act.eval(x[0]) + slope * x[0],
            Limit::PositivePower { exponent } => x[0].max(0.0).powi(*exponent as i32),
            Limit::Zero => 0.0,
        }
    }

    /// True on the null set excluded from `L^p` quadrature (the separating hyperplane).
    pub fn is_null_point(&self, x: &[f64]) -> bool {
        match self {
            Limit::HalfSpace { x_star, v, .. } => side(x_star, v, x) == 0.0,
            _ => false,
        }
    }
}

fn side(x_star: &[f64], v: &[f64], x: &[f64]) -> f64 {
    x.iter()
        .zip(x_star)
        .zip(v)
        .map(|((xi, si), vi)| (xi - si) * vi)
        .sum()
}

/// Upper envelope `n -> rate(n)` for the distance to the limit.
#[derive(Debug, Clone, PartialEq)]
pub enum Rate {
    /// No closed-form rate is claimed.
    None,
    /// `constant * n^(-exponent)`, with the constant fitted to the first index.
    Fitted { constant: f64, exponent: f64 },
    /// `constant / n^power + slack(n)`, slack being an identity-approximant tolerance.
    Bound {
        constant: f64,
        power: f64,
        identity_slack: Vec<(u64, f64)>,
    },
}

impl Rate {
    pub fn at(&self, n: u64) -> Option<f64> {
        match self {
            Rate::None => None,
            Rate::Fitted { constant, exponent } => Some(constant * (n as f64).powf(-exponent)),
            Rate::Bound {
                constant,
                power,
                identity_slack,
            } => {
                let slack = identity_slack
                    .iter()
                    .find(|(m, _)| *m == n)
                    .map_or(0.0, |(_, s)| *s);
                Some(constant * (n as f64).powf(-power) + slack)
            }
        }
    }
}

/// An indexed family of networks together with its claimed limit.
#[derive(Debug, Clone)]
pub struct WitnessSequence {
    pub kind: WitnessKind,
    pub activation: Activation,
    pub domain: DomainBox,
    pub mode: ConvergenceMode,
    pub limit: Limit,
    pub rate: Rate,
    /// `(n, network)` in index order; all share one architecture.
    pub members: Vec<(u64, Network)>,
}

impl WitnessSequence {
    pub fn network(&self, n: u64) -> Option<&Network> {
        self.members
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, net)| net)
    }

    pub fn indices(&self) -> Vec<u64> {
        self.members.iter().map(|(n, _)| *n).collect()
    }

    pub fn predicted_rate(&self, n: u64) -> Option<f64> {
        self.rate.at(n)
    }
}

/// `{1, 2, 4, ..., 2^10}`.
pub fn default_index_list() -> Vec<u64> {
    (0..=10).map(|k| 1u64 << k).collect()
}
