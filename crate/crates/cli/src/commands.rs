use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use netspace::constructions::{
    build_analytic_witness, build_derivative_witness, build_homogeneity_witness,
    build_identity_network, build_instability_sequence, build_projection_network,
    build_step_witness, canonicalize_relu_biases, normalize_parrelu_rows, ConvergenceMode,
    NeuronRef, WitnessSequence,
};
use netspace::probes::{lipschitz_bound_check, rank_probe, report_csv, sequence_report};
use netspace::training::{
    control_network, exploding_weights_experiment, init_network, midpoint_gap_experiment,
    midpoint_instance, Optimizer, Target, TrainConfig, TrainStatus,
};
use netspace::{Activation, Architecture, DomainBox, Error, HomogeneityOrder, Layer, Network};
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{Artifacts, CliError};

type Outcome = Result<Artifacts, CliError>;

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Identity(a) => identity(a),
        Command::Witness(a) => witness(a),
        Command::Instability(a) => instability(a),
        Command::Canonicalize(a) => canonicalize(a),
        Command::RankProbe(a) => rank(a),
        Command::Explode(a) => explode(a),
        Command::MidpointGap(a) => midpoint(a),
        Command::LipschitzCheck(a) => lipschitz(a),
    }
}

fn activation(id: &str) -> Result<Activation, CliError> {
    let act: Activation = id.parse()?;
    act.validate()?;
    Ok(act)
}

fn architecture(s: &str) -> Result<Architecture, CliError> {
    Ok(s.parse()?)
}

fn domain(d: usize, half_width: f64, grid: Option<usize>) -> Result<DomainBox, CliError> {
    Ok(match grid {
        Some(g) => DomainBox::new(d, half_width, g)?,
        None => DomainBox::with_default_grid(d, half_width)?,
    })
}

fn read_network(path: &Path) -> Result<Network, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Network::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn artifacts(
    summary: String,
    report: Value,
    csv: String,
    networks: Vec<(String, Network)>,
) -> Artifacts {
    Artifacts {
        summary,
        report,
        csv,
        networks,
        failure: None,
    }
}

fn identity(a: &IdentityArgs) -> Outcome {
    let act = activation(&a.activation)?;
    let approx = match a.coordinate {
        None => build_identity_network(&act, a.d, a.layers, a.eps, a.half_width)?,
        Some(i) => build_projection_network(&act, a.d, i, a.layers, a.eps, a.half_width)?,
    };
    // independent measurement on the requested grid
    let dom = domain(a.d, a.half_width, a.grid)?;
    let mut csv = String::new();
    let header: Vec<String> = (1..=a.d).map(|i| format!("x{i}")).collect();
    writeln!(csv, "{},error", header.join(",")).unwrap();
    let mut measured: f64 = 0.0;
    for x in dom.nodes() {
        let y = approx.network.eval(&act, &x);
        let err = match a.coordinate {
            None => y
                .iter()
                .zip(&x)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max),
            Some(i) => (y[0] - x[i]).abs(),
        };
        measured = measured.max(err);
        let coords: Vec<String> = x.iter().map(f64::to_string).collect();
        writeln!(csv, "{},{err}", coords.join(",")).unwrap();
    }
    let report = json!({
        "activation": act.to_string(),
        "architecture": approx.network.arch().to_string(),
        "eps": a.eps,
        "scale": approx.scale,
        "certified_error": approx.sup_error,
        "measured_error": measured,
    });
    let summary = format!(
        "{act} identity on [-{b},{b}]^{d}: certified {:e}, measured {measured:e}, scale {}",
        approx.sup_error,
        approx.scale.map_or("none".into(), |c| c.to_string()),
        b = a.half_width,
        d = a.d,
    );
    let mut out = artifacts(
        summary,
        report,
        csv,
        vec![("identity".into(), approx.network)],
    );
    if measured > a.eps {
        out.failure = Some(format!(
            "measured error {measured:e} exceeds eps {:e}",
            a.eps
        ));
    }
    Ok(out)
}

fn mode_id(mode: ConvergenceMode) -> String {
    match mode {
        ConvergenceMode::Uniform => "uniform".into(),
        ConvergenceMode::Lp(p) => format!("lp({p})"),
    }
}

fn sequence_artifacts(ws: WitnessSequence, extra: Value) -> Artifacts {
    let rows = sequence_report(&ws);
    let monotone = rows.windows(2).all(|w| w[1].distance <= w[0].distance);
    let arch = ws.members[0].1.arch();
    let rates: Vec<Option<f64>> = rows.iter().map(|r| ws.predicted_rate(r.n)).collect();
    let last = rows.last().expect("index lists are non-empty");
    let summary = format!(
        "{} {}: {} members on {arch}, distance {:e} at n={}, monotone {monotone}",
        ws.kind,
        ws.activation,
        rows.len(),
        last.distance,
        last.n
    );
    let report = json!({
        "kind": ws.kind.to_string(),
        "activation": ws.activation.to_string(),
        "architecture": arch.to_string(),
        "mode": mode_id(ws.mode),
        "monotone": monotone,
        "predicted_rate": rates,
        "extra": extra,
    });
    let csv = report_csv(&rows);
    let networks = ws
        .members
        .into_iter()
        .map(|(n, net)| (format!("n{n}"), net))
        .collect();
    artifacts(summary, report, csv, networks)
}

fn homogeneity_order(act: &Activation, a: &WitnessArgs) -> Result<HomogeneityOrder, CliError> {
    if let (Some(r), Some(q), Some(s)) = (a.r, a.q, a.s) {
        return Ok(HomogeneityOrder { r, q, s });
    }
    let (base, _, _) = act
        .homogeneity_profile()
        .ok_or_else(|| Error::UnsupportedActivation {
            activation: act.to_string(),
            condition: "approximate homogeneity (no stored order; pass --r, --q and --s)".into(),
        })?;
    Ok(HomogeneityOrder {
        r: a.r.unwrap_or(base.r),
        q: a.q.unwrap_or(base.q),
        s: a.s.unwrap_or(base.s),
    })
}

fn witness(a: &WitnessArgs) -> Outcome {
    let act = activation(&a.activation)?;
    let dom = domain(a.domain.d, a.domain.half_width, a.domain.grid)?;
    let ns = &a.n_list.0;
    let d = a.domain.d;
    let ws = match a.family {
        WitnessFamily::Step => {
            let x_star = a.x_star.clone().map_or(vec![0.0; d], |l| l.0);
            let v = a.v.clone().map_or_else(
                || {
                    let mut e = vec![0.0; d];
                    e[0] = 1.0;
                    e
                },
                |l| l.0,
            );
            build_step_witness(&act, a.layers, ns, &dom, &x_star, &v, a.p)?
        }
        WitnessFamily::Derivative => build_derivative_witness(&act, a.lambda, a.layers, &dom, ns)?,
        WitnessFamily::Analytic => {
            let x_star = a.x_star.as_ref().map_or(0.0, |l| l.0[0]);
            build_analytic_witness(&act, x_star, a.layers, &dom, ns)?
        }
        WitnessFamily::Homogeneity => {
            let order = homogeneity_order(&act, a)?;
            build_homogeneity_witness(&act, order, &dom, ns)?
        }
    };
    Ok(sequence_artifacts(ws, Value::Null))
}

fn instability(a: &InstabilityArgs) -> Outcome {
    let act = activation(&a.activation)?;
    let arch = architecture(&a.arch)?;
    let d = arch.input_dim();
    let dom = domain(d, a.half_width, a.grid)?;
    let x0 = a.x0.clone().map_or(vec![0.0; d], |l| l.0);
    let (ws, probe) = build_instability_sequence(&act, &arch, &dom, &x0, a.a, &a.n_list.0)?;
    let products: Vec<f64> = sequence_report(&ws)
        .iter()
        .map(|r| r.distance * r.empirical_lipschitz)
        .collect();
    let extra = json!({
        "a": probe.a,
        "b": probe.b,
        "c": probe.c,
        "oscillation": probe.oscillation,
        "distance_times_lipschitz": products,
    });
    Ok(sequence_artifacts(ws, extra))
}

fn neuron_list(v: &[NeuronRef]) -> Value {
    v.iter().map(|r| json!([r.layer, r.neuron])).collect()
}

fn canonicalize(a: &CanonicalizeArgs) -> Outcome {
    let act = activation(&a.activation)?;
    let net = read_network(&a.input)?;
    let d = net.input_dim();
    let dom = domain(d, a.half_width, a.grid)?;
    let (out, mut report) = match act {
        Activation::ParametricRelu { a: slope } => {
            let out = normalize_parrelu_rows(&net, slope)?;
            (out, json!({ "procedure": "row_normalization" }))
        }
        _ => {
            let c = canonicalize_relu_biases(&net, &act, &dom)?;
            let report = json!({
                "procedure": "bias_canonicalization",
                "dead": neuron_list(&c.dead),
                "capped": neuron_list(&c.capped),
                "input_radii": c.input_radii,
            });
            (c.network, report)
        }
    };
    let mut csv = String::new();
    let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    writeln!(csv, "{},before,after,difference", header.join(",")).unwrap();
    let mut worst: f64 = 0.0;
    for x in dom.uniform_samples(a.points, a.common.seed) {
        let (p, q) = (net.eval_scalar(&act, &x), out.eval_scalar(&act, &x));
        let diff = (p - q).abs();
        worst = worst.max(diff);
        let coords: Vec<String> = x.iter().map(f64::to_string).collect();
        writeln!(csv, "{},{p},{q},{diff}", coords.join(",")).unwrap();
    }
    let obj = report.as_object_mut().expect("object literal");
    obj.insert("max_difference".into(), json!(worst));
    obj.insert("norm_total_before".into(), json!(net.norm_total()));
    obj.insert("norm_total_after".into(), json!(out.norm_total()));
    let summary = format!(
        "{act}: max difference {worst:e} on {} points, norm_total {} -> {}",
        a.points,
        net.norm_total(),
        out.norm_total()
    );
    Ok(artifacts(
        summary,
        report,
        csv,
        vec![("input".into(), net), ("canonical".into(), out)],
    ))
}

/// Nine ReLU kinks at -0.8, -0.6, ..., 0.8 plus the constant 1, all on `(1, 2, 1)`.
fn kink_family() -> Vec<Network> {
    let kink = |beta: f64, out: f64, c: f64| {
        Network::new(vec![
            Layer::from_rows(&[vec![1.0], vec![0.0]], &[-beta, 0.0]).expect("fixed shape"),
            Layer::from_rows(&[vec![out, 0.0]], &[c]).expect("fixed shape"),
        ])
        .expect("fixed shape")
    };
    let mut nets: Vec<Network> = (1..=9)
        .map(|j| kink(-1.0 + 0.2 * j as f64, 1.0, 0.0))
        .collect();
    nets.push(kink(0.0, 0.0, 1.0));
    nets
}

fn rank(a: &RankProbeArgs) -> Outcome {
    let act = activation(&a.activation)?;
    let nets = if a.inputs.is_empty() {
        kink_family()
    } else {
        a.inputs
            .iter()
            .map(|p| read_network(p))
            .collect::<Result<Vec<_>, _>>()?
    };
    let d = nets[0].input_dim();
    let dom = DomainBox::with_default_grid(d, a.half_width)?;
    let r = rank_probe(&nets, &act, &dom, a.points, a.tolerance)?;
    let mut csv = String::from("index,singular_value\n");
    for (i, s) in r.singular_values.iter().enumerate() {
        writeln!(csv, "{i},{s}").unwrap();
    }
    let summary = format!(
        "{} functions on {}: numerical rank {}, parameters {}, exceeds {}",
        r.num_functions,
        nets[0].arch(),
        r.numerical_rank,
        r.parameter_count,
        r.exceeds_parameter_count
    );
    let report = serde_json::to_value(&r).expect("plain data");
    let networks = nets
        .into_iter()
        .enumerate()
        .map(|(i, n)| (format!("member{i:02}"), n))
        .collect();
    Ok(artifacts(summary, report, csv, networks))
}

fn train_config(t: &TrainArgs, seed: u64) -> TrainConfig {
    TrainConfig {
        step: t.step,
        iterations: t.iterations,
        optimizer: match t.optimizer {
            OptimizerChoice::Gd => Optimizer::GradientDescent,
            OptimizerChoice::Momentum => Optimizer::Momentum { beta: t.beta },
        },
        init_scale: t.init_scale,
        seed,
        ..TrainConfig::default()
    }
}

fn sample_sizes(list: &IndexList) -> Vec<usize> {
    list.0.iter().map(|&n| n as usize).collect()
}

fn explode(a: &ExplodeArgs) -> Outcome {
    let act = activation(&a.activation)?;
    let arch = architecture(&a.arch)?;
    let dom = DomainBox::with_default_grid(arch.input_dim(), a.half_width)?;
    let target = match a.target {
        TargetChoice::Step => Target::Step,
        TargetChoice::Derivative => Target::DerivativeLimit {
            act,
            lambda: a.lambda,
        },
        TargetChoice::Control => Target::Network {
            net: control_network(),
            act: Activation::Relu,
        },
    };
    let cfg = train_config(&a.train, a.common.seed);
    let (s, net) =
        exploding_weights_experiment(&act, &arch, &target, &sample_sizes(&a.n_list), &dom, &cfg)?;
    let mut csv = String::from("n,final_loss,final_norm_total,status\n");
    for r in &s.rows {
        let status = match r.status {
            TrainStatus::Completed => "completed",
            TrainStatus::Diverged => "diverged",
        };
        writeln!(
            csv,
            "{},{},{},{status}",
            r.n, r.final_loss, r.final_norm_total
        )
        .unwrap();
    }
    let first = s.rows[0].final_norm_total;
    let last = s.rows.last().expect("non-empty").final_norm_total;
    let summary = format!(
        "{} on {arch}: norm_total {first} (N={}) -> {last} (N={}), init {}",
        s.target,
        s.rows[0].n,
        s.rows.last().expect("non-empty").n,
        s.init_norm_total
    );
    let mut report = serde_json::to_value(&s).expect("plain data");
    report["growth_ratio"] = json!(last / first);
    Ok(artifacts(summary, report, csv, vec![("final".into(), net)]))
}

fn midpoint(a: &MidpointGapArgs) -> Outcome {
    let act = activation(&a.activation)?;
    let (f1, f2) = match (&a.f1, &a.f2) {
        (Some(p1), Some(p2)) => (read_network(p1)?, read_network(p2)?),
        _ => midpoint_instance(),
    };
    let arch = f1.arch();
    let dom = DomainBox::new(arch.input_dim(), a.half_width, a.grid)?;
    let cfg = train_config(&a.train, a.common.seed);
    let gap = midpoint_gap_experiment(&act, &arch, &f1, &f2, &dom, a.restarts, &cfg)?;
    let mut csv = String::from("restart,seed,distance\n");
    for (r, dist) in gap.per_restart.iter().enumerate() {
        writeln!(csv, "{r},{},{dist}", a.common.seed.wrapping_add(r as u64)).unwrap();
    }
    let summary = format!(
        "midpoint on {arch}: floor {} over {} restarts",
        gap.floor, a.restarts
    );
    let report = serde_json::to_value(&gap).expect("plain data");
    Ok(artifacts(
        summary,
        report,
        csv,
        vec![("f1".into(), f1), ("f2".into(), f2)],
    ))
}

fn lipschitz(a: &LipschitzCheckArgs) -> Outcome {
    let act = activation(&a.activation)?;
    let nets = if a.inputs.is_empty() {
        let arch = architecture(&a.arch)?;
        (0..a.count as u64)
            .map(|i| init_network(&arch, a.scale, a.common.seed.wrapping_add(i)))
            .collect()
    } else {
        a.inputs
            .iter()
            .map(|p| read_network(p))
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut csv = String::from("index,empirical,bound,rounding,ok\n");
    let mut violations = Vec::new();
    for (i, net) in nets.iter().enumerate() {
        let dom = domain(net.input_dim(), a.half_width, a.grid)?;
        let c = lipschitz_bound_check(net, &act, &dom);
        writeln!(
            csv,
            "{i},{},{},{},{}",
            c.empirical, c.bound, c.rounding, c.ok
        )
        .unwrap();
        if !c.ok {
            violations.push(i);
        }
    }
    let summary = format!(
        "{act}: {} of {} networks within the bound",
        nets.len() - violations.len(),
        nets.len()
    );
    let report = json!({ "networks": nets.len(), "violations": violations });
    let mut out = artifacts(summary, report, csv, Vec::new());
    if !violations.is_empty() {
        out.failure = Some(format!(
            "Lipschitz bound violated by networks {violations:?}"
        ));
    }
    Ok(out)
}
