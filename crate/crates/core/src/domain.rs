use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The cube `[-B, B]^d` with a uniform tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    dim: usize,
    half_width: f64,
    grid_points_per_axis: usize,
    sampling: Option<Sampling>,
}

/// Monte-Carlo sampling settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
}

impl DomainBox {
    pub fn new(dim: usize, half_width: f64, grid_points_per_axis: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Contract("domain dimension must be positive".into()));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Contract(format!(
                "half-width must be positive and finite, got {half_width}"
            )));
        }
        if grid_points_per_axis < 2 {
            return Err(Error::Contract(format!(
                "need at least 2 grid points per axis, got {grid_points_per_axis}"
            )));
        }
        Ok(Self {
            dim,
            half_width,
            grid_points_per_axis,
            sampling: None,
        })
    }

    /// Default grid: 1025 points for d = 1, 65 per axis for d = 2, 17 above.
    pub fn with_default_grid(dim: usize, half_width: f64) -> Result<Self> {
        let pts = match dim {
            1 => 1025,
            2 => 65,
            _ => 17,
        };
        Self::new(dim, half_width, pts)
    }

    pub fn with_sampling(mut self, count: usize, seed: u64) -> Self {
        self.sampling = Some(Sampling { count, seed });
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn grid_points_per_axis(&self) -> usize {
        self.grid_points_per_axis
    }

    pub fn sampling(&self) -> Option<Sampling> {
        self.sampling
    }

    /// Grid spacing `2B / (p - 1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.grid_points_per_axis - 1) as f64
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|v| v.abs() <= self.half_width)
    }

    /// Node coordinates along one axis; symmetric, so 0 is a node for odd counts.
    pub fn axis_nodes(&self) -> Vec<f64> {
        let m = (self.grid_points_per_axis - 1) as f64;
        (0..self.grid_points_per_axis)
            .map(|i| self.half_width * ((2.0 * i as f64 - m) / m))
            .collect()
    }

    /// Cell centres along one axis.
    pub fn axis_midpoints(&self) -> Vec<f64> {
        let m = (self.grid_points_per_axis - 1) as f64;
        (0..self.grid_points_per_axis - 1)
            .map(|i| self.half_width * ((2.0 * i as f64 + 1.0 - m) / m))
            .collect()
    }

    /// All tensor-grid nodes, last coordinate varying fastest.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        tensor(&self.axis_nodes(), self.dim)
    }

    /// All cell centres of the tensor grid.
    pub fn midpoints(&self) -> Vec<Vec<f64>> {
        tensor(&self.axis_midpoints(), self.dim)
    }

    /// Lebesgue volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Lebesgue volume of the whole box, `(2B)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    /// Uniform samples from the configured sampling settings, or `None` if unset.
    pub fn samples(&self) -> Option<Vec<Vec<f64>>> {
        self.sampling.map(|s| self.uniform_samples(s.count, s.seed))
    }

    pub fn uniform_samples(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                (0..self.dim)
                    .map(|_| rng.gen_range(-self.half_width..=self.half_width))
                    .collect()
            })
            .collect()
    }
}

fn tensor(axis: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(dim)];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}
