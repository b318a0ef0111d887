//! Full-batch gradient descent on the empirical squared loss, with
//! hand-written backpropagation, plus the exploding-weights and
//! midpoint-gap experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::activations::Activation;
use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::network::{Architecture, Layer, Network};
use crate::probes;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::Shape(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        Ok(Self { inputs, targets })
    }

    /// `count` points uniform on the domain labelled by `target`.
    pub fn sample(target: &Target, domain: &DomainBox, count: usize, seed: u64) -> Self {
        let inputs = domain.uniform_samples(count, seed);
        let targets = inputs.iter().map(|x| target.eval(x)).collect();
        Self { inputs, targets }
    }

    /// Targets evaluated on the grid nodes of `domain`.
    pub fn on_grid(target: impl Fn(&[f64]) -> f64, domain: &DomainBox) -> Self {
        let inputs = domain.nodes();
        let targets = inputs.iter().map(|x| target(x)).collect();
        Self { inputs, targets }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Regression targets shipped with the experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// `1` where `x_1 > 0`, else `0`.
    Step,
    /// `lambda f'(lambda x_1)`.
    DerivativeLimit { act: Activation, lambda: f64 },
    /// The realization of a fixed network (a target inside the set).
    Network { net: Network, act: Activation },
}

impl Target {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Target::Step => {
                if x[0] > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Target::DerivativeLimit { act, lambda } => lambda * act.deriv(lambda * x[0]),
            Target::Network { net, act } => net.eval_scalar(act, x),
        }
    }

    pub fn id(&self) -> String {
        match self {
            Target::Step => "step".into(),
            Target::DerivativeLimit { act, lambda } => format!("derivative:{act}:{lambda}"),
            Target::Network { .. } => "network".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    GradientDescent,
    Momentum { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrainConfig {
    pub step: f64,
    pub iterations: usize,
    pub optimizer: Optimizer,
    pub init_scale: f64,
    pub seed: u64,
    pub record_stride: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            step: 0.05,
            iterations: 2000,
            optimizer: Optimizer::GradientDescent,
            init_scale: 0.5,
            seed: 0,
            record_stride: 100,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iteration budget must be at least 1".into()));
        }
        if !(self.init_scale >= 0.0) {
            return Err(Error::Config(format!(
                "init scale must be nonnegative, got {}",
                self.init_scale
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("record stride must be at least 1".into()));
        }
        if let Optimizer::Momentum { beta } = self.optimizer {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::Config(format!(
                    "momentum must lie in [0, 1), got {beta}"
                )));
            }
        }
        Ok(())
    }
}

fn check_scalar_output(net: &Network) -> Result<()> {
    if net.output_dim() != 1 {
        return Err(Error::Shape(format!(
            "training needs a scalar output, network has {}",
            net.output_dim()
        )));
    }
    Ok(())
}

/// `(1/N) sum |f(x_i) - y_i|^2`; zero on an empty dataset.
pub fn empirical_loss(net: &Network, act: &Activation, data: &Dataset) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let total: f64 = data
        .inputs
        .iter()
        .zip(&data.targets)
        .map(|(x, y)| (net.eval_scalar(act, x) - y).powi(2))
        .sum();
    total / data.len() as f64
}

/// Gradient of [`empirical_loss`] in the order of [`Network::params`].
/// At kinks the activation's one-sided derivative convention applies.
pub fn gradient(net: &Network, act: &Activation, data: &Dataset) -> Vec<f64> {
    let layers = net.layers();
    let depth = layers.len();
    let mut grads: Vec<(Vec<f64>, Vec<f64>)> = layers
        .iter()
        .map(|l| {
            (
                vec![0.0; l.weights.as_slice().len()],
                vec![0.0; l.bias.len()],
            )
        })
        .collect();
    if !data.is_empty() {
        let scale = 2.0 / data.len() as f64;
        for (x, y) in data.inputs.iter().zip(&data.targets) {
            // activations[l] is the input of layer l; pre[l] its affine output
            let mut activations = Vec::with_capacity(depth + 1);
            let mut pre = Vec::with_capacity(depth);
            activations.push(x.clone());
            for (l, layer) in layers.iter().enumerate() {
                let z = layer.affine(&activations[l]);
                let a = if l + 1 < depth {
                    z.iter().map(|&v| act.eval(v)).collect()
                } else {
                    z.clone()
                };
                pre.push(z);
                activations.push(a);
            }
            let mut delta = vec![scale * (activations[depth][0] - y)];
            for l in (0..depth).rev() {
                let layer = &layers[l];
                let input = &activations[l];
                let (gw, gb) = &mut grads[l];
                let cols = layer.in_dim();
                for (i, d) in delta.iter().enumerate() {
                    gb[i] += d;
                    for (j, a) in input.iter().enumerate() {
                        gw[i * cols + j] += d * a;
                    }
                }
                if l > 0 {
                    delta = (0..cols)
                        .map(|j| {
                            let back: f64 = delta
                                .iter()
                                .enumerate()
                                .map(|(i, d)| d * layer.weights.get(i, j))
                                .sum();
                            back * act.deriv(pre[l - 1][j])
                        })
                        .collect();
                }
            }
        }
    }
    grads
        .into_iter()
        .flat_map(|(w, b)| w.into_iter().chain(b))
        .collect()
}

/// Central-difference check of [`gradient`] at `net`.
pub fn gradient_check(net: &Network, act: &Activation, data: &Dataset, h: f64) -> Result<f64> {
    let arch = net.arch();
    let rebuild = |p: &[f64]| Network::from_params(&arch, p).expect("length preserved");
    probes::finite_diff_gradient_check(
        |p| empirical_loss(&rebuild(p), act, data),
        |p| gradient(&rebuild(p), act, data),
        &net.params(),
        h,
    )
}

/// Entries i.i.d. uniform on `[-scale, scale]`.
pub fn init_network(arch: &Architecture, scale: f64, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<f64> = (0..arch.num_params())
        .map(|_| {
            if scale > 0.0 {
                rng.gen_range(-scale..=scale)
            } else {
                0.0
            }
        })
        .collect();
    Network::from_params(arch, &params).expect("parameter count matches")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub iter: usize,
    pub loss: f64,
    pub norm_total: f64,
    pub norm_scaling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainStatus {
    Completed,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network,
    pub trajectory: Vec<TrajectoryRow>,
    pub status: TrainStatus,
    pub final_loss: f64,
}

fn row(iter: usize, loss: f64, net: &Network) -> TrajectoryRow {
    TrajectoryRow {
        iter,
        loss,
        norm_total: net.norm_total(),
        norm_scaling: net.norm_scaling(),
    }
}

/// Runs `cfg.iterations` full-batch steps from `net0`. Rows are recorded at
/// iteration 0, every `record_stride` iterations and at the end. A non-finite
/// loss stops the run with [`TrainStatus::Diverged`].
pub fn train(
    net0: &Network,
    act: &Activation,
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    check_scalar_output(net0)?;
    let arch = net0.arch();
    let mut params = net0.params();
    let mut velocity = vec![0.0; params.len()];
    let mut net = net0.clone();
    let mut trajectory = Vec::new();

    for iter in 0..=cfg.iterations {
        let loss = empirical_loss(&net, act, data);
        if !loss.is_finite() {
            trajectory.push(row(iter, loss, &net));
            return Ok(TrainOutcome {
                network: net,
                trajectory,
                status: TrainStatus::Diverged,
                final_loss: loss,
            });
        }
        if iter % cfg.record_stride == 0 || iter == cfg.iterations {
            trajectory.push(row(iter, loss, &net));
        }
        if iter == cfg.iterations {
            return Ok(TrainOutcome {
                network: net,
                trajectory,
                status: TrainStatus::Completed,
                final_loss: loss,
            });
        }
        let g = gradient(&net, act, data);
        match cfg.optimizer {
            Optimizer::GradientDescent => {
                for (p, gi) in params.iter_mut().zip(&g) {
                    *p -= cfg.step * gi;
                }
            }
            Optimizer::Momentum { beta } => {
                for ((p, v), gi) in params.iter_mut().zip(velocity.iter_mut()).zip(&g) {
                    *v = beta * *v + gi;
                    *p -= cfg.step * *v;
                }
            }
        }
        net = Network::from_params(&arch, &params)?;
    }
    unreachable!("loop returns on the last iteration")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplodeRow {
    pub n: usize,
    pub final_loss: f64,
    pub final_norm_total: f64,
    pub status: TrainStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplodeSummary {
    pub target: String,
    pub init_norm_total: f64,
    pub rows: Vec<ExplodeRow>,
}

/// For each `N`, samples `N` points (seed `cfg.seed + N`) and trains,
/// warm-starting from the previous solution. The first run starts from
/// [`init_network`] with `cfg.seed`.
pub fn exploding_weights_experiment(
    act: &Activation,
    arch: &Architecture,
    target: &Target,
    n_list: &[usize],
    domain: &DomainBox,
    cfg: &TrainConfig,
) -> Result<(ExplodeSummary, Network)> {
    cfg.validate()?;
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::Config(
            "sample sizes must be positive and non-empty".into(),
        ));
    }
    let mut net = init_network(arch, cfg.init_scale, cfg.seed);
    check_scalar_output(&net)?;
    let init_norm_total = net.norm_total();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let data = Dataset::sample(target, domain, n, cfg.seed.wrapping_add(n as u64));
        let out = train(&net, act, &data, cfg)?;
        rows.push(ExplodeRow {
            n,
            final_loss: out.final_loss,
            final_norm_total: out.network.norm_total(),
            status: out.status,
        });
        if out.status == TrainStatus::Completed {
            net = out.network;
        }
    }
    Ok((
        ExplodeSummary {
            target: target.id(),
            init_norm_total,
            rows,
        },
        net,
    ))
}

/// The in-set control target: a fixed `(1, 2, 1)` network with small weights.
pub fn control_network() -> Network {
    Network::new(vec![
        Layer::from_rows(&[vec![0.5], vec![-0.3]], &[0.1, 0.2]).expect("fixed shape"),
        Layer::from_rows(&[vec![0.4, -0.6]], &[0.1]).expect("fixed shape"),
    ])
    .expect("fixed shape")
}

/// Two `(1, 2, 1)` ReLU networks with kinks at `{-0.6, 0.2}` and `{-0.2, 0.6}`.
/// Their midpoint has four kinks, more than any `(1, 2, 1)` ReLU network.
pub fn midpoint_instance() -> (Network, Network) {
    let f1 = Network::new(vec![
        Layer::from_rows(&[vec![1.0], vec![1.0]], &[0.6, -0.2]).expect("fixed shape"),
        Layer::from_rows(&[vec![1.0, -1.0]], &[0.0]).expect("fixed shape"),
    ])
    .expect("fixed shape");
    let f2 = Network::new(vec![
        Layer::from_rows(&[vec![-1.0], vec![-1.0]], &[0.6, -0.2]).expect("fixed shape"),
        Layer::from_rows(&[vec![1.0, -1.0]], &[0.0]).expect("fixed shape"),
    ])
    .expect("fixed shape");
    (f1, f2)
}

#[derive(Debug, Clone, Serialize)]
pub struct MidpointGap {
    /// Minimum over restarts of the grid `L^2` distance to the midpoint.
    pub floor: f64,
    pub per_restart: Vec<f64>,
}

/// Trains `restarts` networks of architecture `arch` (seeds `cfg.seed + r`)
/// toward `(f1 + f2) / 2` on the domain grid.
pub fn midpoint_gap_experiment(
    act: &Activation,
    arch: &Architecture,
    f1: &Network,
    f2: &Network,
    domain: &DomainBox,
    restarts: usize,
    cfg: &TrainConfig,
) -> Result<MidpointGap> {
    cfg.validate()?;
    if f1.arch() != *arch || f2.arch() != *arch {
        return Err(Error::Shape(format!(
            "f1 and f2 must have architecture {arch}"
        )));
    }
    if restarts == 0 {
        return Err(Error::Config("need at least one restart".into()));
    }
    let mid = |x: &[f64]| 0.5 * (f1.eval_scalar(act, x) + f2.eval_scalar(act, x));
    let data = Dataset::on_grid(mid, domain);
    let mut per_restart = Vec::with_capacity(restarts);
    for r in 0..restarts {
        let seed = cfg.seed.wrapping_add(r as u64);
        let net0 = init_network(arch, cfg.init_scale, seed);
        let out = train(&net0, act, &data, cfg)?;
        let dist = match out.status {
            TrainStatus::Completed => {
                probes::lp_distance(|x| out.network.eval_scalar(act, x), mid, 2.0, domain)
            }
            TrainStatus::Diverged => f64::INFINITY,
        };
        per_restart.push(dist);
    }
    let floor = per_restart.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MidpointGap { floor, per_restart })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_net() -> Network {
        Network::new(vec![Layer::from_rows(&[vec![1.0]], &[0.0]).unwrap()]).unwrap()
    }

    #[test]
    fn loss_examples() {
        let data = Dataset::new(vec![vec![0.0], vec![1.0]], vec![0.0, 0.0]).unwrap();
        assert_eq!(
            empirical_loss(&identity_net(), &Activation::Relu, &data),
            0.5
        );
        let zero = Network::zeros(&Architecture::new(vec![1, 2, 1]).unwrap());
        let ones = Dataset::new(vec![vec![0.3]; 5], vec![1.0; 5]).unwrap();
        assert_eq!(empirical_loss(&zero, &Activation::Tanh, &ones), 1.0);
    }

    #[test]
    fn empty_data_has_zero_gradient() {
        let net = init_network(&Architecture::new(vec![2, 3, 1]).unwrap(), 0.5, 1);
        let empty = Dataset::new(vec![], vec![]).unwrap();
        assert!(gradient(&net, &Activation::Sigmoid, &empty)
            .iter()
            .all(|&g| g == 0.0));
        assert_eq!(
            gradient_check(&net, &Activation::Sigmoid, &empty, 1e-5).unwrap(),
            0.0
        );
    }

    #[test]
    fn linear_gradient_is_exact() {
        let data =
            Dataset::new(vec![vec![0.5], vec![-1.0], vec![2.0]], vec![1.0, 0.0, 3.0]).unwrap();
        let net = Network::new(vec![Layer::from_rows(&[vec![0.7]], &[-0.2]).unwrap()]).unwrap();
        let g = gradient(&net, &Activation::Relu, &data);
        let mut oracle = [0.0; 2];
        for (x, y) in data.inputs.iter().zip(&data.targets) {
            let r = 2.0 * (0.7 * x[0] - 0.2 - y) / 3.0;
            oracle[0] += r * x[0];
            oracle[1] += r;
        }
        assert!((g[0] - oracle[0]).abs() < 1e-15 && (g[1] - oracle[1]).abs() < 1e-15);
        assert!(gradient_check(&net, &Activation::Relu, &data, 1e-5).unwrap() <= 1e-7);
    }

    #[test]
    fn sigmoid_gradient_check() {
        let arch = Architecture::new(vec![1, 2, 1]).unwrap();
        let net = init_network(&arch, 0.5, 3);
        let dom = DomainBox::with_default_grid(1, 1.0).unwrap();
        let data = Dataset::sample(&Target::Step, &dom, 16, 4);
        assert!(gradient_check(&net, &Activation::Sigmoid, &data, 1e-5).unwrap() <= 1e-5);
    }

    #[test]
    fn zero_target_linear_fit_decreases() {
        let data = Dataset::new(vec![vec![-1.0], vec![0.5], vec![1.0]], vec![0.0; 3]).unwrap();
        let cfg = TrainConfig {
            iterations: 500,
            record_stride: 50,
            ..TrainConfig::default()
        };
        let out = train(&identity_net(), &Activation::Relu, &data, &cfg).unwrap();
        assert_eq!(out.status, TrainStatus::Completed);
        assert!(out.final_loss < 1e-3 * out.trajectory[0].loss);
        assert_eq!(out.trajectory.last().unwrap().iter, 500);
    }

    #[test]
    fn config_errors_and_determinism() {
        let data = Dataset::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let bad = TrainConfig {
            step: 0.0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train(&identity_net(), &Activation::Relu, &data, &bad),
            Err(Error::Config(_))
        ));
        let arch = Architecture::new(vec![1, 3, 1]).unwrap();
        let net = init_network(&arch, 0.5, 9);
        assert_eq!(net, init_network(&arch, 0.5, 9));
        let dom = DomainBox::with_default_grid(1, 1.0).unwrap();
        let data = Dataset::sample(&Target::Step, &dom, 32, 2);
        let cfg = TrainConfig {
            iterations: 50,
            record_stride: 5,
            ..TrainConfig::default()
        };
        let a = train(&net, &Activation::Tanh, &data, &cfg).unwrap();
        let b = train(&net, &Activation::Tanh, &data, &cfg).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.network, b.network);
    }

    #[test]
    fn divergence_is_reported() {
        let data = Dataset::new(vec![vec![10.0]], vec![0.0]).unwrap();
        let cfg = TrainConfig {
            step: 10.0,
            iterations: 200,
            ..TrainConfig::default()
        };
        let out = train(&identity_net(), &Activation::Relu, &data, &cfg).unwrap();
        assert_eq!(out.status, TrainStatus::Diverged);
        assert!(!out.trajectory.last().unwrap().loss.is_finite());
    }

    #[test]
    fn single_sample_is_interpolated() {
        let arch = Architecture::new(vec![1, 2, 1]).unwrap();
        let dom = DomainBox::with_default_grid(1, 1.0).unwrap();
        let cfg = TrainConfig {
            iterations: 500,
            ..TrainConfig::default()
        };
        let (summary, _) =
            exploding_weights_experiment(&Activation::Relu, &arch, &Target::Step, &[1], &dom, &cfg)
                .unwrap();
        assert!(summary.rows[0].final_loss < 1e-6);
    }

    #[test]
    fn midpoint_trivial_cases() {
        let arch = Architecture::new(vec![1, 2, 1]).unwrap();
        let dom = DomainBox::new(1, 1.0, 129).unwrap();
        let (f1, _) = midpoint_instance();
        let cfg = TrainConfig {
            iterations: 3000,
            ..TrainConfig::default()
        };
        // midpoint of f1 and -f1 is the zero function
        let gap = midpoint_gap_experiment(
            &Activation::Relu,
            &arch,
            &f1,
            &f1.scale_output(-1.0),
            &dom,
            3,
            &cfg,
        )
        .unwrap();
        assert!(gap.floor <= 1e-3, "{}", gap.floor);
    }

    #[test]
    fn midpoint_instance_has_four_kinks() {
        let (f1, f2) = midpoint_instance();
        let g = |x: f64| {
            0.5 * (f1.eval_scalar(&Activation::Relu, &[x])
                + f2.eval_scalar(&Activation::Relu, &[x]))
        };
        let second = |x: f64| g(x + 0.01) - 2.0 * g(x) + g(x - 0.01);
        for k in [-0.6, -0.2, 0.2, 0.6] {
            assert!(second(k).abs() > 1e-3, "{k}");
        }
        assert!(second(0.0).abs() < 1e-12 && second(0.9).abs() < 1e-12);
    }
}
