//! Grid measurements: distances, Lipschitz estimates, the realization-map
//! Lipschitz bound, the rank probe and witness-sequence reports.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::activations::Activation;
use crate::constructions::{ConvergenceMode, WitnessSequence};
use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::network::Network;

/// Max of `|f - g|` over the grid nodes.
pub fn sup_distance(
    f: impl Fn(&[f64]) -> f64,
    g: impl Fn(&[f64]) -> f64,
    domain: &DomainBox,
) -> f64 {
    domain
        .nodes()
        .iter()
        .map(|x| (f(x) - g(x)).abs())
        .fold(0.0, f64::max)
}

/// Midpoint-rule `L^p` distance with Lebesgue weight on the grid cells.
pub fn lp_distance(
    f: impl Fn(&[f64]) -> f64,
    g: impl Fn(&[f64]) -> f64,
    p: f64,
    domain: &DomainBox,
) -> f64 {
    lp_distance_masked(f, g, p, domain, |_| false)
}

/// As [`lp_distance`], skipping cell centres where `skip` holds (a null set
/// such as a hyperplane, on which the limit value is conventional).
pub fn lp_distance_masked(
    f: impl Fn(&[f64]) -> f64,
    g: impl Fn(&[f64]) -> f64,
    p: f64,
    domain: &DomainBox,
    skip: impl Fn(&[f64]) -> bool,
) -> f64 {
    let sum: f64 = domain
        .midpoints()
        .iter()
        .filter(|x| !skip(x))
        .map(|x| (f(x) - g(x)).abs().powf(p))
        .sum();
    (sum * domain.cell_volume()).powf(1.0 / p)
}

/// Largest `||f(x) - f(y)||_inf / h` over grid neighbours `x, y` along any axis.
/// A lower bound on the Lipschitz constant.
pub fn empirical_lipschitz_vec(f: impl Fn(&[f64]) -> Vec<f64>, domain: &DomainBox) -> f64 {
    let values: Vec<Vec<f64>> = domain.nodes().iter().map(|x| f(x)).collect();
    let p = domain.grid_points_per_axis();
    let d = domain.dim();
    let h = domain.spacing();
    let mut best: f64 = 0.0;
    for (idx, v) in values.iter().enumerate() {
        let mut stride = 1;
        for _axis in 0..d {
            // coordinate along this axis is (idx / stride) % p; last axis fastest
            if (idx / stride) % p + 1 < p {
                let w = &values[idx + stride];
                let diff = v
                    .iter()
                    .zip(w)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                best = best.max(diff / h);
            }
            stride *= p;
        }
    }
    best
}

pub fn empirical_lipschitz(f: impl Fn(&[f64]) -> f64, domain: &DomainBox) -> f64 {
    empirical_lipschitz_vec(|x| vec![f(x)], domain)
}

/// `max(M, 1)^L * N_0 ... N_{L-1} * ||net||_scaling^L`.
pub fn lipschitz_bound(net: &Network, act: &Activation) -> f64 {
    let arch = net.arch();
    let dims = arch.dims();
    let l = net.num_layers() as i32;
    let widths: f64 = dims[..dims.len() - 1].iter().map(|&n| n as f64).product();
    act.lipschitz().max(1.0).powi(l) * widths * net.norm_scaling().powi(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzCheck {
    pub empirical: f64,
    pub bound: f64,
    /// Allowance for rounding in the grid difference quotients.
    pub rounding: f64,
    pub ok: bool,
}

/// Compares the grid estimate with [`lipschitz_bound`]. The estimate is a
/// quotient `|f(x) - f(y)| / h` of computed values, so `ok` allows
/// `64 eps (1 + max |f|) / h` on top of the bound: affine networks attain
/// the bound exactly and would otherwise fail on the last bits.
pub fn lipschitz_bound_check(
    net: &Network,
    act: &Activation,
    domain: &DomainBox,
) -> LipschitzCheck {
    let empirical = empirical_lipschitz_vec(|x| net.eval(act, x), domain);
    let bound = lipschitz_bound(net, act);
    let peak = domain
        .nodes()
        .iter()
        .flat_map(|x| net.eval(act, x))
        .fold(0.0, |m: f64, v| m.max(v.abs()));
    let rounding = 64.0 * f64::EPSILON * (1.0 + peak) / domain.spacing();
    LipschitzCheck {
        empirical,
        bound,
        rounding,
        ok: empirical <= bound + rounding,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankProbeReport {
    pub num_functions: usize,
    pub num_sample_points: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub numerical_rank: usize,
    pub parameter_count: usize,
    pub tolerance: f64,
    pub exceeds_parameter_count: bool,
}

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// `count` Halton points in `[-B, B]^d`, starting at index `seed + 1`.
pub fn halton_points(domain: &DomainBox, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if domain.dim() > PRIMES.len() {
        return Err(Error::Contract(format!(
            "Halton points support up to {} dimensions",
            PRIMES.len()
        )));
    }
    let b = domain.half_width();
    Ok((0..count as u64)
        .map(|k| {
            PRIMES[..domain.dim()]
                .iter()
                .map(|&base| -b + 2.0 * b * radical_inverse(seed + 1 + k, base))
                .collect()
        })
        .collect())
}

/// Numerical rank of the `k x m` matrix of realizations (all outputs
/// concatenated) at `m` Halton points.
pub fn rank_probe(
    nets: &[Network],
    act: &Activation,
    domain: &DomainBox,
    num_points: usize,
    tolerance: f64,
) -> Result<RankProbeReport> {
    let first = nets
        .first()
        .ok_or_else(|| Error::Contract("rank probe needs at least one network".into()))?;
    let arch = first.arch();
    if nets.iter().any(|n| n.arch() != arch) {
        return Err(Error::Contract(
            "all networks must share one architecture".into(),
        ));
    }
    if num_points < nets.len() {
        return Err(Error::Contract(format!(
            "need at least as many points ({num_points}) as functions ({})",
            nets.len()
        )));
    }
    if arch.input_dim() != domain.dim() {
        return Err(Error::Shape(format!(
            "architecture {arch} does not match domain dimension {}",
            domain.dim()
        )));
    }
    let points = halton_points(domain, num_points, 0)?;
    let out = arch.output_dim();
    let cols = num_points * out;
    let mut m = DMatrix::<f64>::zeros(nets.len(), cols);
    for (i, net) in nets.iter().enumerate() {
        for (j, x) in points.iter().enumerate() {
            for (k, y) in net.eval(act, x).into_iter().enumerate() {
                m[(i, j * out + k)] = y;
            }
        }
    }
    let mut singular_values: Vec<f64> = m
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let top = singular_values.first().copied().unwrap_or(0.0);
    let numerical_rank = if top > 0.0 {
        singular_values
            .iter()
            .filter(|&&s| s > tolerance * top)
            .count()
    } else {
        0
    };
    let parameter_count = arch.num_params();
    Ok(RankProbeReport {
        num_functions: nets.len(),
        num_sample_points: num_points,
        singular_values,
        numerical_rank,
        parameter_count,
        tolerance,
        exceeds_parameter_count: numerical_rank > parameter_count,
    })
}

/// Max over coordinates of `|g_i - c_i| / max(1, |g_i|)` where `g` is the
/// analytic gradient and `c` the central difference with step `h`.
pub fn finite_diff_gradient_check(
    loss: impl Fn(&[f64]) -> f64,
    gradient: impl Fn(&[f64]) -> Vec<f64>,
    params: &[f64],
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Contract(format!("step h must be positive, got {h}")));
    }
    let g = gradient(params);
    if g.len() != params.len() {
        return Err(Error::Shape(format!(
            "gradient has {} entries for {} parameters",
            g.len(),
            params.len()
        )));
    }
    let mut p = params.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + h;
        let up = loss(&p);
        p[i] = orig - h;
        let down = loss(&p);
        p[i] = orig;
        let central = (up - down) / (2.0 * h);
        worst = worst.max((g[i] - central).abs() / g[i].abs().max(1.0));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: u64,
    pub distance: f64,
    pub norm_total: f64,
    pub norm_scaling: f64,
    pub empirical_lipschitz: f64,
}

pub const REPORT_HEADER: &str = "n,distance,norm_total,norm_scaling,empirical_lipschitz";

/// One row per member, distance measured in the sequence's own mode on its domain.
pub fn sequence_report(ws: &WitnessSequence) -> Vec<ReportRow> {
    let act = ws.activation;
    let dom = &ws.domain;
    ws.members
        .iter()
        .map(|(n, net)| {
            let f = |x: &[f64]| net.eval_scalar(&act, x);
            let g = |x: &[f64]| ws.limit.eval(x);
            let distance = match ws.mode {
                ConvergenceMode::Uniform => sup_distance(f, g, dom),
                ConvergenceMode::Lp(p) => {
                    lp_distance_masked(f, g, p, dom, |x| ws.limit.is_null_point(x))
                }
            };
            ReportRow {
                n: *n,
                distance,
                norm_total: net.norm_total(),
                norm_scaling: net.norm_scaling(),
                empirical_lipschitz: empirical_lipschitz(f, dom),
            }
        })
        .collect()
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.distance, r.norm_total, r.norm_scaling, r.empirical_lipschitz
        ));
    }
    out
}
