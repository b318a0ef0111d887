//! The activation zoo: evaluators, derivatives and the metadata the
//! witness constructions dispatch on.
//!
//! Derivatives at kinks use the right-hand derivative, e.g. `ReLU'(0) = 1`.

use std::f64::consts::{FRAC_PI_2, LN_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Relu,
    /// `max(x, a x)` with `a >= 0`.
    ParametricRelu {
        a: f64,
    },
    /// `x` for `x >= 0`, `a (e^x - 1)` otherwise.
    Elu {
        a: f64,
    },
    Softsign,
    /// `x` for `x >= 0`, `x / sqrt(1 + a x^2)` otherwise.
    Isrlu {
        a: f64,
    },
    /// `x / sqrt(1 + a x^2)`.
    Isru {
        a: f64,
    },
    Sigmoid,
    Tanh,
    Arctan,
    Softplus,
}

/// Largest `k` with the activation in `C^k`, or analytic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Smoothness {
    Finite(u32),
    Analytic,
}

impl Smoothness {
    pub fn is_at_least(self, k: u32) -> bool {
        match self {
            Smoothness::Analytic => true,
            Smoothness::Finite(m) => m >= k,
        }
    }
}

/// Point with non-vanishing derivative: `x0`, `r0 = f(x0)`, `s0 = f'(x0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub x0: f64,
    pub r0: f64,
    pub s0: f64,
}

/// Order `(r, q)` and slack `s` of approximate homogeneity:
/// `|f(x) - x^r| <= s` for `x >= 0` and `|f(x) - x^q| <= s` for `x <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneityOrder {
    pub r: u32,
    pub q: u32,
    pub s: f64,
}

pub const DEFAULT_PRELU_SLOPE: f64 = 0.01;
pub const DEFAULT_ELU_SCALE: f64 = 1.0;
pub const DEFAULT_ISR_SCALE: f64 = 1.0;

impl Activation {
    /// Every activation id with its default parameter.
    pub fn all() -> Vec<Activation> {
        vec![
            Activation::Relu,
            Activation::ParametricRelu {
                a: DEFAULT_PRELU_SLOPE,
            },
            Activation::Elu {
                a: DEFAULT_ELU_SCALE,
            },
            Activation::Softsign,
            Activation::Isrlu {
                a: DEFAULT_ISR_SCALE,
            },
            Activation::Isru {
                a: DEFAULT_ISR_SCALE,
            },
            Activation::Sigmoid,
            Activation::Tanh,
            Activation::Arctan,
            Activation::Softplus,
        ]
    }

    pub fn id(&self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::ParametricRelu { .. } => "parametric_relu",
            Activation::Elu { .. } => "elu",
            Activation::Softsign => "softsign",
            Activation::Isrlu { .. } => "isrlu",
            Activation::Isru { .. } => "isru",
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Arctan => "arctan",
            Activation::Softplus => "softplus",
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match *self {
            Activation::ParametricRelu { a }
            | Activation::Elu { a }
            | Activation::Isrlu { a }
            | Activation::Isru { a } => Some(a),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Activation::Relu => x.max(0.0),
            Activation::ParametricRelu { a } => x.max(a * x),
            Activation::Elu { a } => {
                if x >= 0.0 {
                    x
                } else {
                    a * x.exp_m1()
                }
            }
            Activation::Softsign => x / (1.0 + x.abs()),
            Activation::Isrlu { a } => {
                if x >= 0.0 {
                    x
                } else {
                    x / (1.0 + a * x * x).sqrt()
                }
            }
            Activation::Isru { a } => x / (1.0 + a * x * x).sqrt(),
            Activation::Sigmoid => sigmoid(x),
            Activation::Tanh => x.tanh(),
            Activation::Arctan => x.atan(),
            Activation::Softplus => x.max(0.0) + (-x.abs()).exp().ln_1p(),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            Activation::Relu => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::ParametricRelu { a } => {
                if x >= 0.0 {
                    a.max(1.0)
                } else {
                    a.min(1.0)
                }
            }
            Activation::Elu { a } => {
                if x >= 0.0 {
                    1.0
                } else {
                    a * x.exp()
                }
            }
            Activation::Softsign => {
                let t = 1.0 + x.abs();
                1.0 / (t * t)
            }
            Activation::Isrlu { a } => {
                if x >= 0.0 {
                    1.0
                } else {
                    (1.0 + a * x * x).powf(-1.5)
                }
            }
            Activation::Isru { a } => (1.0 + a * x * x).powf(-1.5),
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Arctan => 1.0 / (1.0 + x * x),
            Activation::Softplus => sigmoid(x),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self,
            Activation::Softsign
                | Activation::Isru { .. }
                | Activation::Sigmoid
                | Activation::Tanh
                | Activation::Arctan
        )
    }

    pub fn smoothness(&self) -> Smoothness {
        match *self {
            Activation::Relu | Activation::ParametricRelu { .. } => Smoothness::Finite(0),
            // a (e^x - 1) has slope a at 0-, so C^1 needs a = 1
            Activation::Elu { a } => {
                if a == 1.0 {
                    Smoothness::Finite(1)
                } else {
                    Smoothness::Finite(0)
                }
            }
            Activation::Softsign => Smoothness::Finite(1),
            Activation::Isrlu { .. } => Smoothness::Finite(2),
            Activation::Isru { .. }
            | Activation::Sigmoid
            | Activation::Tanh
            | Activation::Arctan
            | Activation::Softplus => Smoothness::Analytic,
        }
    }

    /// `(lambda, lambda')`: limits of the derivative at `+inf` and `-inf`,
    /// stored for the unbounded activations only.
    pub fn asymptotic_slopes(&self) -> Option<(f64, f64)> {
        match *self {
            Activation::Relu
            | Activation::Elu { .. }
            | Activation::Isrlu { .. }
            | Activation::Softplus => Some((1.0, 0.0)),
            Activation::ParametricRelu { a } => Some((a.max(1.0), a.min(1.0))),
            _ => None,
        }
    }

    /// `(c, c')`: limits of the activation at `+inf` and `-inf` for bounded ones.
    pub fn range_limits(&self) -> Option<(f64, f64)> {
        match *self {
            Activation::Softsign | Activation::Tanh => Some((1.0, -1.0)),
            Activation::Isru { a } => {
                let c = 1.0 / a.sqrt();
                Some((c, -c))
            }
            Activation::Sigmoid => Some((1.0, 0.0)),
            Activation::Arctan => Some((FRAC_PI_2, -FRAC_PI_2)),
            _ => None,
        }
    }

    pub fn anchor(&self) -> Anchor {
        let x0 = match self {
            Activation::Relu
            | Activation::ParametricRelu { .. }
            | Activation::Elu { .. }
            | Activation::Isrlu { .. } => 1.0,
            _ => 0.0,
        };
        Anchor {
            x0,
            r0: self.eval(x0),
            s0: self.deriv(x0),
        }
    }

    /// Global Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            Activation::ParametricRelu { a } | Activation::Elu { a } => a.max(1.0),
            Activation::Sigmoid => 0.25,
            _ => 1.0,
        }
    }

    /// True when the activation is an affine map (parametric ReLU with `a = 1`).
    pub fn is_affine(&self) -> bool {
        matches!(*self, Activation::ParametricRelu { a } if a == 1.0)
    }

    /// Known tight constants for the homogeneity witness: order plus
    /// `(sup_{x>=0} |f(x) - x^r|, sup_{x<=0} |f(x)|)`.
    pub fn homogeneity_profile(&self) -> Option<(HomogeneityOrder, f64, f64)> {
        match self {
            Activation::Softplus => Some((
                HomogeneityOrder {
                    r: 1,
                    q: 0,
                    s: 1.0 + LN_2,
                },
                LN_2,
                LN_2,
            )),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Activation::ParametricRelu { a } if !(a >= 0.0 && a.is_finite()) => Err(Error::Config(
                format!("parametric_relu needs a >= 0, got {a}"),
            )),
            Activation::Elu { a } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::Config(format!("elu needs a > 0, got {a}")))
            }
            Activation::Isrlu { a } | Activation::Isru { a } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::Config(format!("{} needs a > 0, got {a}", self.id())))
            }
            _ => Ok(()),
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(a) => write!(f, "{}:a={}", self.id(), a),
            None => f.write_str(self.id()),
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    /// Parses ids such as `relu`, `sigmoid` or `parametric_relu:a=0.2`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let a = match param {
            None => None,
            Some(p) => {
                let v = p
                    .strip_prefix("a=")
                    .ok_or_else(|| Error::Config(format!("expected a=<float>, got {p:?}")))?;
                Some(
                    v.parse::<f64>()
                        .map_err(|e| Error::Config(format!("bad parameter {v:?}: {e}")))?,
                )
            }
        };
        let act = match name {
            "relu" => Activation::Relu,
            "parametric_relu" | "prelu" => Activation::ParametricRelu {
                a: a.unwrap_or(DEFAULT_PRELU_SLOPE),
            },
            "elu" => Activation::Elu {
                a: a.unwrap_or(DEFAULT_ELU_SCALE),
            },
            "softsign" => Activation::Softsign,
            "isrlu" => Activation::Isrlu {
                a: a.unwrap_or(DEFAULT_ISR_SCALE),
            },
            "isru" => Activation::Isru {
                a: a.unwrap_or(DEFAULT_ISR_SCALE),
            },
            "sigmoid" | "logistic" => Activation::Sigmoid,
            "tanh" => Activation::Tanh,
            "arctan" => Activation::Arctan,
            "softplus" => Activation::Softplus,
            other => return Err(Error::Config(format!("unknown activation {other:?}"))),
        };
        if a.is_some() && act.parameter().is_none() {
            return Err(Error::Config(format!(
                "activation {name} takes no parameter"
            )));
        }
        act.validate()?;
        Ok(act)
    }
}

/// Measured homogeneity slack on `[-range, range]`.
///
/// Probes a fixed nested point set (dyadic steps of 1/256 up to 64 plus
/// 64 log-spaced points per octave), so the result is nondecreasing in `range`.
pub fn check_approx_homogeneity(act: &Activation, order: HomogeneityOrder, range: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut visit = |x: f64| {
        let err = if x >= 0.0 {
            (act.eval(x) - x.powi(order.r as i32)).abs()
        } else {
            (act.eval(x) - x.powi(order.q as i32)).abs()
        };
        if x <= 0.0 {
            // x = 0 is on both sides
            let neg = (act.eval(x) - x.powi(order.q as i32)).abs();
            worst = worst.max(neg);
        }
        worst = worst.max(err);
    };
    let linear_extent = range.min(64.0);
    let steps = (linear_extent * 256.0).floor() as i64;
    for i in -steps..=steps {
        visit(i as f64 / 256.0);
    }
    // log-spaced 2^(j/64) for j from -64*40 upward
    let mut j: i32 = -64 * 40;
    loop {
        let t = (j as f64 / 64.0).exp2();
        if t > range {
            break;
        }
        visit(t);
        visit(-t);
        j += 1;
    }
    worst
}
