//! Fixed-architecture feedforward networks and their realizations.
//!
//! A [`Network`] is a list of affine layers `(A_l, b_l)`. Its realization
//! under an activation applies the activation componentwise after every
//! layer except the last one, which stays affine.

use serde::{Deserialize, Serialize};

use crate::activations::Activation;
use crate::error::{Error, Result};

/// Layer widths `(N_0, N_1, ..., N_L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Architecture {
    dims: Vec<usize>,
}

impl Architecture {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Contract(format!(
                "architecture needs at least two widths, got {dims:?}"
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Contract(format!(
                "architecture widths must be positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        self.dims[self.dims.len() - 1]
    }

    /// Number of affine layers `L`.
    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    /// Total number of weights and biases, `sum_l (N_{l-1} + 1) N_l`.
    pub fn num_params(&self) -> usize {
        self.dims.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for Architecture {
    type Err = Error;

    /// Parses `1,2,1` or `(1,2,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let dims = trimmed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Config(format!("bad architecture width {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Architecture::new(dims)
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Shape(format!(
                    "row {i} has length {}, expected {n_cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest absolute entry, 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `self * x`; panics if `x.len() != cols`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }
}

/// One affine map `x -> A x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if weights.rows() != bias.len() {
            return Err(Error::Shape(format!(
                "weight matrix has {} rows but bias has length {}",
                weights.rows(),
                bias.len()
            )));
        }
        Ok(Self { weights, bias })
    }

    /// Builds a layer from row vectors; convenient in tests and fixtures.
    pub fn from_rows(rows: &[Vec<f64>], bias: &[f64]) -> Result<Self> {
        Layer::new(Matrix::from_rows(rows)?, bias.to_vec())
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.weights.mul_vec(x);
        for (v, b) in y.iter_mut().zip(&self.bias) {
            *v += b;
        }
        y
    }
}

/// A network `((A_1, b_1), ..., (A_L, b_L))` with chained layer shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("a network needs at least one layer".into()));
        }
        for (l, layer) in layers.iter().enumerate() {
            if layer.weights.rows() == 0 || layer.weights.cols() == 0 {
                return Err(Error::Shape(format!(
                    "layer {l} has an empty weight matrix"
                )));
            }
            if layer.weights.rows() != layer.bias.len() {
                return Err(Error::Shape(format!(
                    "layer {l}: {} weight rows but bias length {}",
                    layer.weights.rows(),
                    layer.bias.len()
                )));
            }
        }
        for (l, pair) in layers.windows(2).enumerate() {
            if pair[1].in_dim() != pair[0].out_dim() {
                return Err(Error::Shape(format!(
                    "layer {} expects input width {} but layer {l} produces {}",
                    l + 1,
                    pair[1].in_dim(),
                    pair[0].out_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    /// All-zero network of the given architecture.
    pub fn zeros(arch: &Architecture) -> Self {
        let layers = arch
            .dims()
            .windows(2)
            .map(|w| Layer {
                weights: Matrix::zeros(w[1], w[0]),
                bias: vec![0.0; w[1]],
            })
            .collect();
        Self { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn arch(&self) -> Architecture {
        let mut dims = vec![self.layers[0].in_dim()];
        dims.extend(self.layers.iter().map(Layer::out_dim));
        Architecture { dims }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Evaluates the realization at `x`.
    pub fn realize(&self, act: &Activation, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input has length {} but the network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        Ok(self.eval(act, x))
    }

    /// Realization without the input-length check. Panics on mismatch.
    pub fn eval(&self, act: &Activation, x: &[f64]) -> Vec<f64> {
        let last = self.layers.len() - 1;
        let mut h = x.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            h = layer.affine(&h);
            if l < last {
                for v in h.iter_mut() {
                    *v = act.eval(*v);
                }
            }
        }
        h
    }

    /// First output coordinate of the realization.
    pub fn eval_scalar(&self, act: &Activation, x: &[f64]) -> f64 {
        self.eval(act, x)[0]
    }

    /// `max_l ||A_l||_max`.
    pub fn norm_scaling(&self) -> f64 {
        self.layers
            .iter()
            .fold(0.0, |m, l| m.max(l.weights.max_abs()))
    }

    /// `norm_scaling + max_l ||b_l||_max`.
    pub fn norm_total(&self) -> f64 {
        let bias = self
            .layers
            .iter()
            .flat_map(|l| l.bias.iter())
            .fold(0.0_f64, |m, b| m.max(b.abs()));
        self.norm_scaling() + bias
    }

    /// Multiplies the last layer by `lambda`, so the realization is scaled by `lambda`.
    pub fn scale_output(&self, lambda: f64) -> Network {
        let mut out = self.clone();
        let last = out.layers.last_mut().expect("non-empty");
        last.weights = last.weights.scale(lambda);
        for b in last.bias.iter_mut() {
            *b *= lambda;
        }
        out
    }

    /// Multiplies every weight and bias by `lambda` (vector-space scaling in NN(S)).
    pub fn scale_all(&self, lambda: f64) -> Network {
        self.map_params(|v| v * lambda)
    }

    /// Entrywise sum of two networks of the same architecture.
    pub fn add(&self, other: &Network) -> Result<Network> {
        if self.arch() != other.arch() {
            return Err(Error::Shape(format!(
                "cannot add networks of architectures {} and {}",
                self.arch(),
                other.arch()
            )));
        }
        let params: Vec<f64> = self
            .params()
            .iter()
            .zip(other.params())
            .map(|(a, b)| a + b)
            .collect();
        Network::from_params(&self.arch(), &params)
    }

    fn map_params(&self, f: impl Fn(f64) -> f64) -> Network {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer {
                weights: Matrix {
                    rows: l.weights.rows,
                    cols: l.weights.cols,
                    data: l.weights.data.iter().map(|&v| f(v)).collect(),
                },
                bias: l.bias.iter().map(|&v| f(v)).collect(),
            })
            .collect();
        Network { layers }
    }

    /// Flattens the parameters layer by layer: weights row-major, then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    /// Inverse of [`Network::params`].
    pub fn from_params(arch: &Architecture, params: &[f64]) -> Result<Network> {
        if params.len() != arch.num_params() {
            return Err(Error::Shape(format!(
                "{} parameters given, architecture {arch} needs {}",
                params.len(),
                arch.num_params()
            )));
        }
        let mut offset = 0;
        let mut layers = Vec::with_capacity(arch.num_layers());
        for w in arch.dims().windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            let weights =
                Matrix::from_vec(n_out, n_in, params[offset..offset + n_in * n_out].to_vec())?;
            offset += n_in * n_out;
            let bias = params[offset..offset + n_out].to_vec();
            offset += n_out;
            layers.push(Layer { weights, bias });
        }
        Ok(Network { layers })
    }

    /// Zero-pads hidden layers up to `target`, keeping the original block
    /// in the top-left corner of every weight matrix.
    pub fn enlarge(&self, target: &Architecture) -> Result<Network> {
        let src = self.arch();
        if target.num_layers() != src.num_layers() {
            return Err(Error::Contract(format!(
                "cannot enlarge {src} to {target}: depth differs"
            )));
        }
        if target.input_dim() != src.input_dim() || target.output_dim() != src.output_dim() {
            return Err(Error::Contract(format!(
                "cannot enlarge {src} to {target}: input/output widths must match"
            )));
        }
        if let Some(l) = (1..src.num_layers()).find(|&l| target.dims()[l] < src.dims()[l]) {
            return Err(Error::Contract(format!(
                "cannot enlarge {src} to {target}: hidden width {l} would shrink"
            )));
        }
        let layers = self
            .layers
            .iter()
            .zip(target.dims().windows(2))
            .map(|(layer, w)| {
                let mut weights = Matrix::zeros(w[1], w[0]);
                for i in 0..layer.out_dim() {
                    weights.row_mut(i)[..layer.in_dim()].copy_from_slice(layer.weights.row(i));
                }
                let mut bias = vec![0.0; w[1]];
                bias[..layer.out_dim()].copy_from_slice(&layer.bias);
                Layer { weights, bias }
            })
            .collect();
        Ok(Network { layers })
    }

    /// The concatenation `outer . inner`: its realization is `outer` after `inner`.
    ///
    /// The last layer of `inner` and the first layer of `outer` merge into
    /// `(A_1^outer A_L^inner, A_1^outer b_L^inner + b_1^outer)`, giving
    /// `L_outer + L_inner - 1` layers.
    pub fn concatenate(outer: &Network, inner: &Network) -> Result<Network> {
        if outer.input_dim() != inner.output_dim() {
            return Err(Error::Shape(format!(
                "cannot concatenate: outer input width {} differs from inner output width {}",
                outer.input_dim(),
                inner.output_dim()
            )));
        }
        let n_inner = inner.layers.len();
        let inner_last = &inner.layers[n_inner - 1];
        let outer_first = &outer.layers[0];
        let weights = outer_first.weights.matmul(&inner_last.weights)?;
        let mut bias = outer_first.weights.mul_vec(&inner_last.bias);
        for (v, b) in bias.iter_mut().zip(&outer_first.bias) {
            *v += b;
        }
        let mut layers: Vec<Layer> = inner.layers[..n_inner - 1].to_vec();
        layers.push(Layer { weights, bias });
        layers.extend_from_slice(&outer.layers[1..]);
        Ok(Network { layers })
    }

    pub fn to_json(&self) -> Result<String> {
        crate::serialize::to_json(self)
    }

    /// The JSON document as a value, for embedding in larger reports.
    pub fn to_json_value(&self) -> serde_json::Value {
        crate::serialize::to_json_value(self)
    }

    pub fn from_json(text: &str) -> Result<Network> {
        crate::serialize::from_json(text)
    }
}

/// JSON layer document `{"A": [[...]], "b": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct LayerDoc {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

/// JSON network document `{"arch": [...], "layers": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct NetworkDoc {
    pub arch: Vec<usize>,
    pub layers: Vec<LayerDoc>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relu() -> Activation {
        Activation::Relu
    }

    fn step_net(n: f64) -> Network {
        Network::new(vec![
            Layer::from_rows(&[vec![n], vec![n]], &[0.0, -1.0]).unwrap(),
            Layer::from_rows(&[vec![1.0, -1.0]], &[0.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn relu_kills_negative_input() {
        let net = Network::new(vec![
            Layer::from_rows(&[vec![1.0]], &[0.0]).unwrap(),
            Layer::from_rows(&[vec![1.0]], &[0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(net.realize(&relu(), &[-2.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn single_layer_is_affine() {
        let net = Network::new(vec![Layer::from_rows(&[vec![2.0, 3.0]], &[1.0]).unwrap()]).unwrap();
        for act in [Activation::Relu, Activation::Sigmoid, Activation::Tanh] {
            assert_eq!(net.realize(&act, &[1.0, 1.0]).unwrap(), vec![6.0]);
        }
    }

    #[test]
    fn hidden_step_evaluation() {
        // h_4(0.5) = relu(2) - relu(1) = 1
        let v = step_net(4.0).realize(&relu(), &[0.5]).unwrap();
        let oracle = 2.0_f64.max(0.0) - 1.0_f64.max(0.0);
        assert_eq!(v, vec![oracle]);
        // with the scale on the output layer instead: 4 (relu(0.5) - relu(-0.5)) = 2
        let outer = Network::new(vec![
            Layer::from_rows(&[vec![1.0], vec![1.0]], &[0.0, -1.0]).unwrap(),
            Layer::from_rows(&[vec![4.0, -4.0]], &[0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(outer.realize(&relu(), &[0.5]).unwrap(), vec![2.0]);
    }

    #[test]
    fn shape_error_on_wrong_input() {
        let err = step_net(1.0).realize(&relu(), &[0.5, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn mismatched_layers_rejected() {
        let err = Network::new(vec![
            Layer::from_rows(&[vec![1.0], vec![1.0]], &[0.0, 0.0]).unwrap(),
            Layer::from_rows(&[vec![1.0, 1.0, 1.0]], &[0.0]).unwrap(),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn norms() {
        let net = Network::new(vec![
            Layer::from_rows(&[vec![2.0]], &[0.0]).unwrap(),
            Layer::from_rows(&[vec![-3.0]], &[0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(net.norm_scaling(), 3.0);
        assert_eq!(net.norm_total(), 3.0);

        let zero = Network::zeros(&Architecture::new(vec![2, 3, 1]).unwrap());
        assert_eq!(zero.norm_scaling(), 0.0);
        assert_eq!(zero.norm_total(), 0.0);

        let single = Network::new(vec![Layer::from_rows(&[vec![2.0]], &[3.0]).unwrap()]).unwrap();
        assert_eq!(single.norm_total(), 5.0);
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(Architecture::new(vec![1, 2, 1]).unwrap().num_params(), 7);
        assert_eq!(Architecture::new(vec![5, 1]).unwrap().num_params(), 6);
        assert_eq!(
            Architecture::new(vec![2, 3, 3, 1]).unwrap().num_params(),
            25
        );
    }

    #[test]
    fn architecture_validation() {
        assert!(Architecture::new(vec![3]).is_err());
        assert!(Architecture::new(vec![1, 0, 1]).is_err());
        let a: Architecture = "(2,3,1)".parse().unwrap();
        assert_eq!(a.dims(), &[2, 3, 1]);
        assert_eq!(a.to_string(), "(2,3,1)");
    }

    #[test]
    fn scale_output_examples() {
        let net = step_net(4.0);
        let zero = net.scale_output(0.0);
        assert_eq!(zero.realize(&relu(), &[0.5]).unwrap(), vec![0.0]);
        assert_eq!(
            net.scale_output(1.0).realize(&relu(), &[0.3]).unwrap(),
            net.realize(&relu(), &[0.3]).unwrap()
        );
        assert_eq!(
            net.scale_output(-2.0).realize(&relu(), &[0.5]).unwrap(),
            vec![-2.0]
        );
        assert_eq!(net.scale_output(-2.0).arch(), net.arch());
    }

    #[test]
    fn enlarge_examples() {
        let net = Network::new(vec![
            Layer::from_rows(&[vec![0.7]], &[0.1]).unwrap(),
            Layer::from_rows(&[vec![-1.3]], &[0.4]).unwrap(),
        ])
        .unwrap();
        let big = net
            .enlarge(&Architecture::new(vec![1, 3, 1]).unwrap())
            .unwrap();
        assert_eq!(big.arch().dims(), &[1, 3, 1]);
        for i in 0..100 {
            let x = -1.0 + 2.0 * i as f64 / 99.0;
            assert_eq!(
                big.realize(&Activation::Tanh, &[x]).unwrap(),
                net.realize(&Activation::Tanh, &[x]).unwrap()
            );
        }
        assert_eq!(net.enlarge(&net.arch()).unwrap(), net);

        let step = step_net(3.0);
        let padded = step
            .enlarge(&Architecture::new(vec![1, 5, 1]).unwrap())
            .unwrap();
        for x in [-1.0, 0.0, 1.0] {
            assert_eq!(
                padded.realize(&relu(), &[x]).unwrap(),
                step.realize(&relu(), &[x]).unwrap()
            );
        }
    }

    #[test]
    fn enlarge_rejects_bad_targets() {
        let net = step_net(1.0);
        for dims in [
            vec![1, 1, 1],
            vec![1, 2, 2, 1],
            vec![2, 2, 1],
            vec![1, 3, 2],
        ] {
            let t = Architecture::new(dims).unwrap();
            assert!(matches!(net.enlarge(&t), Err(Error::Contract(_))));
        }
    }

    #[test]
    fn concatenate_affine_layers() {
        let phi1 =
            Network::new(vec![Layer::from_rows(&[vec![1.0, 2.0]], &[3.0]).unwrap()]).unwrap();
        let phi2 = Network::new(vec![Layer::from_rows(
            &[vec![0.5], vec![-1.0]],
            &[1.0, 2.0],
        )
        .unwrap()])
        .unwrap();
        let c = Network::concatenate(&phi1, &phi2).unwrap();
        assert_eq!(c.num_layers(), 1);
        // A C = [0.5 - 2] = [-1.5], A d + b = 1 + 4 + 3 = 8
        assert_eq!(c.layers()[0].weights.to_rows(), vec![vec![-1.5]]);
        assert_eq!(c.layers()[0].bias, vec![8.0]);
    }

    #[test]
    fn concatenate_with_identity_keeps_layers() {
        let phi1 = step_net(2.0);
        let id = Network::new(vec![Layer::new(Matrix::identity(1), vec![0.0]).unwrap()]).unwrap();
        let c = Network::concatenate(&phi1, &id).unwrap();
        assert_eq!(c, phi1);
    }

    #[test]
    fn concatenate_dimension_mismatch() {
        let phi1 = step_net(1.0);
        let phi2 = Network::new(vec![
            Layer::from_rows(&[vec![1.0], vec![1.0]], &[0.0, 0.0]).unwrap()
        ])
        .unwrap();
        assert!(matches!(
            Network::concatenate(&phi1, &phi2),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn params_round_trip() {
        let net = step_net(5.0);
        let p = net.params();
        assert_eq!(p.len(), net.arch().num_params());
        assert_eq!(Network::from_params(&net.arch(), &p).unwrap(), net);
    }
}
