//! A small multilayer perceptron trained under the expectile check loss with
//! plain mini-batch gradient descent.
//!
//! Layers are dense. Every hidden layer applies the same activation followed
//! by (inverted) dropout in training mode; the output is a single linear
//! unit. Weight matrices are stored `fan_in x fan_out`, row-major.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectile::{grad_unchecked, loss_unchecked, ExpectileLevel};
use crate::scalar::{Scalar, Strided, StridedMut};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    fn apply<T: Scalar>(self, z: T) -> T {
        match self {
            Activation::Relu => z.max(T::zero()),
            Activation::Sigmoid => T::one() / (T::one() + (-z).exp()),
        }
    }

    /// Derivative given the pre-activation `z` and the activation value `a`.
    /// The ReLU subgradient at zero is zero.
    #[inline]
    fn derivative<T: Scalar>(self, z: T, a: T) -> T {
        match self {
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Sigmoid => a * (T::one() - a),
        }
    }
}

/// Network architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    pub activation: Activation,
    pub dropout_rate: f64,
}

impl MlpSpec {
    pub fn new(
        input_dim: usize,
        hidden_widths: Vec<usize>,
        activation: Activation,
        dropout_rate: f64,
    ) -> Result<Self> {
        let spec = Self { input_dim, hidden_widths, activation, dropout_rate };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::domain("input dimension must be positive"));
        }
        if self.hidden_widths.is_empty() {
            return Err(Error::domain("at least one hidden layer is required"));
        }
        if self.hidden_widths.contains(&0) {
            return Err(Error::domain("hidden layer widths must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::domain(format!(
                "dropout rate {} outside [0, 1)",
                self.dropout_rate
            )));
        }
        Ok(())
    }

    /// `(fan_in, fan_out)` for every layer, output layer last.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes = Vec::with_capacity(self.hidden_widths.len() + 1);
        let mut fan_in = self.input_dim;
        for &w in &self.hidden_widths {
            shapes.push((fan_in, w));
            fan_in = w;
        }
        shapes.push((fan_in, 1));
        shapes
    }

    pub fn num_params(&self) -> usize {
        self.layer_shapes().iter().map(|(i, o)| i * o + o).sum()
    }
}

/// One dense layer: `fan_in x fan_out` row-major weights and `fan_out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub fan_in: usize,
    pub fan_out: usize,
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            fan_in,
            fan_out,
            weights: vec![T::zero(); fan_in * fan_out],
            biases: vec![T::zero(); fan_out],
        }
    }

    #[inline]
    pub fn weight(&self, row: usize, col: usize) -> T {
        self.weights[row * self.fan_out + col]
    }
}

/// Trained (or initialised) network parameters together with their spec.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams<T: Scalar = f64> {
    spec: MlpSpec,
    layers: Vec<Dense<T>>,
}

/// Gradient with the same layout as [`MlpParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient<T: Scalar = f64> {
    pub layers: Vec<Dense<T>>,
}

impl<T: Scalar> Gradient<T> {
    fn zeros(spec: &MlpSpec) -> Self {
        Self {
            layers: spec.layer_shapes().into_iter().map(|(i, o)| Dense::zeros(i, o)).collect(),
        }
    }

    fn clear(&mut self) {
        for layer in &mut self.layers {
            layer.weights.fill(T::zero());
            layer.biases.fill(T::zero());
        }
    }

    /// Layer-major flattening, weights (row-major) before biases.
    pub fn to_flat(&self) -> Vec<T> {
        flatten(&self.layers)
    }
}

fn flatten<T: Scalar>(layers: &[Dense<T>]) -> Vec<T> {
    let mut out = Vec::new();
    for layer in layers {
        out.extend_from_slice(&layer.weights);
        out.extend_from_slice(&layer.biases);
    }
    out
}

impl<T: Scalar> MlpParams<T> {
    pub fn zeros(spec: &MlpSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec: spec.clone(),
            layers: spec.layer_shapes().into_iter().map(|(i, o)| Dense::zeros(i, o)).collect(),
        })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    /// All layers, output layer last.
    pub fn layers(&self) -> &[Dense<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense<T>] {
        &mut self.layers
    }

    pub fn hidden(&self) -> &[Dense<T>] {
        &self.layers[..self.layers.len() - 1]
    }

    pub fn output(&self) -> &Dense<T> {
        self.layers.last().expect("output layer")
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
    }

    /// Layer-major flattening, weights (row-major) before biases.
    pub fn to_flat(&self) -> Vec<T> {
        flatten(&self.layers)
    }

    pub fn from_flat(spec: &MlpSpec, values: &[T]) -> Result<Self> {
        let mut params = Self::zeros(spec)?;
        if values.len() != spec.num_params() {
            return Err(Error::domain(format!(
                "expected {} parameters, got {}",
                spec.num_params(),
                values.len()
            )));
        }
        let mut rest = values;
        for layer in &mut params.layers {
            let (w, tail) = rest.split_at(layer.weights.len());
            layer.weights.copy_from_slice(w);
            let (b, tail) = tail.split_at(layer.biases.len());
            layer.biases.copy_from_slice(b);
            rest = tail;
        }
        if !params.is_finite() {
            return Err(Error::domain("parameter snapshot contains non-finite values"));
        }
        Ok(params)
    }

    fn descend(&mut self, grad: &Gradient<T>, step: T) {
        for (layer, g) in self.layers.iter_mut().zip(&grad.layers) {
            for (w, dw) in layer.weights.iter_mut().zip(&g.weights) {
                *w -= step * *dw;
            }
            for (b, db) in layer.biases.iter_mut().zip(&g.biases) {
                *b -= step * *db;
            }
        }
    }

    pub fn cast<U: Scalar>(&self) -> MlpParams<U> {
        MlpParams {
            spec: self.spec.clone(),
            layers: self
                .layers
                .iter()
                .map(|l| Dense {
                    fan_in: l.fan_in,
                    fan_out: l.fan_out,
                    weights: l.weights.iter().map(|v| U::lit(v.as_f64())).collect(),
                    biases: l.biases.iter().map(|v| U::lit(v.as_f64())).collect(),
                })
                .collect(),
        }
    }
}

/// He-style initialisation: `N(0, 2 / fan_in)` for ReLU, `N(0, 1 / fan_in)`
/// for Sigmoid; zero biases.
pub fn init_params<T: Scalar>(spec: &MlpSpec, seed: u64) -> Result<MlpParams<T>> {
    let mut params = MlpParams::zeros(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gain = match spec.activation {
        Activation::Relu => 2.0,
        Activation::Sigmoid => 1.0,
    };
    for layer in &mut params.layers {
        let sd = (gain / layer.fan_in as f64).sqrt();
        for w in &mut layer.weights {
            let z: f64 = rng.sample(StandardNormal);
            *w = T::lit(sd * z);
        }
    }
    Ok(params)
}

/// Whether dropout is active for a forward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Per-layer hidden values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    pre: Vec<Vec<T>>,
    /// Activations after dropout; these feed the next layer.
    post: Vec<Vec<T>>,
}

impl<T> ForwardCache<T> {
    pub fn hidden_pre_activations(&self) -> &[Vec<T>] {
        &self.pre
    }

    pub fn hidden_activations(&self) -> &[Vec<T>] {
        &self.post
    }
}

fn check_dim<T>(spec: &MlpSpec, x: &[T]) -> Result<()> {
    if x.len() != spec.input_dim {
        return Err(Error::domain(format!(
            "covariate vector has length {}, network expects {}",
            x.len(),
            spec.input_dim
        )));
    }
    Ok(())
}

/// Single forward pass. Training mode applies inverted dropout with masks
/// drawn from `rng`; evaluation mode never touches `rng`.
pub fn forward<T: Scalar, R: Rng + ?Sized>(
    params: &MlpParams<T>,
    x: &[T],
    mode: Mode,
    rng: &mut R,
) -> Result<(T, ForwardCache<T>)> {
    check_dim(&params.spec, x)?;
    let mut ws = BatchWorkspace::new(&params.spec, 1);
    ws.x.copy_from_slice(x);
    let rate = params.spec.dropout_rate;
    let active = mode == Mode::Train && rate > 0.0;
    if active {
        draw_masks(&mut ws, &params.spec.hidden_widths, 1, rate, rng);
    }
    forward_batch(params, &mut ws, 1, active);
    let y = output_row(params, &ws, 0);
    let cache = ForwardCache { pre: ws.pre, post: ws.post };
    Ok((y, cache))
}

/// Mean check loss over a batch and its gradient with respect to every
/// parameter, by reverse-mode accumulation.
pub fn loss_and_gradient<T: Scalar, X: AsRef<[T]>, R: Rng + ?Sized>(
    params: &MlpParams<T>,
    xs: &[X],
    targets: &[T],
    tau: ExpectileLevel<T>,
    mode: Mode,
    rng: &mut R,
) -> Result<(T, Gradient<T>)> {
    if xs.is_empty() || xs.len() != targets.len() {
        return Err(Error::domain(format!(
            "batch needs matching non-empty covariates and targets ({} vs {})",
            xs.len(),
            targets.len()
        )));
    }
    validate_data(&params.spec, xs, targets)?;
    let mut ws = BatchWorkspace::new(&params.spec, xs.len());
    let mut grad = Gradient::zeros(&params.spec);
    let idx: Vec<usize> = (0..xs.len()).collect();
    let dropout = match mode {
        Mode::Train => Some(params.spec.dropout_rate),
        Mode::Eval => None,
    };
    let total = accumulate_batch(params, xs, targets, &idx, tau.value(), dropout, rng, &mut ws, &mut grad);
    Ok((total / T::from_count(xs.len()), grad))
}

fn validate_data<T: Scalar, X: AsRef<[T]>>(spec: &MlpSpec, xs: &[X], targets: &[T]) -> Result<()> {
    for x in xs {
        check_dim(spec, x.as_ref())?;
        if x.as_ref().iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite covariate"));
        }
    }
    if let Some(t) = targets.iter().find(|t| !t.is_finite()) {
        return Err(Error::domain(format!("non-finite training target {t}")));
    }
    Ok(())
}

/// Row-major `batch x width` buffers for a batched forward/backward pass.
struct BatchWorkspace<T> {
    x: Vec<T>,
    pre: Vec<Vec<T>>,
    act: Vec<Vec<T>>,
    post: Vec<Vec<T>>,
    masks: Vec<Vec<T>>,
    delta: Vec<Vec<T>>,
    d_out: Vec<T>,
}

impl<T: Scalar> BatchWorkspace<T> {
    fn new(spec: &MlpSpec, capacity: usize) -> Self {
        let buf = || spec.hidden_widths.iter().map(|&w| vec![T::zero(); w * capacity]).collect::<Vec<_>>();
        Self {
            x: vec![T::zero(); spec.input_dim * capacity],
            pre: buf(),
            act: buf(),
            post: buf(),
            masks: buf(),
            delta: buf(),
            d_out: vec![T::zero(); capacity],
        }
    }
}

fn draw_masks<T: Scalar, R: Rng + ?Sized>(ws: &mut BatchWorkspace<T>, widths: &[usize], b: usize, rate: f64, rng: &mut R) {
    let keep = 1.0 - rate;
    let scale = T::lit(1.0 / keep);
    // Unit kept iff a uniform u32 falls below keep * 2^32.
    let threshold = (keep * 4_294_967_296.0) as u64;
    for r in 0..b {
        for (l, &w) in widths.iter().enumerate() {
            for m in &mut ws.masks[l][r * w..(r + 1) * w] {
                *m = if u64::from(rng.next_u32()) < threshold { scale } else { T::zero() };
            }
        }
    }
}

/// Hidden layers of a batched forward pass over the first `b` rows of
/// `ws.x`, applying `ws.masks` when `active`.
fn forward_batch<T: Scalar>(params: &MlpParams<T>, ws: &mut BatchWorkspace<T>, b: usize, active: bool) {
    let p = params.spec.input_dim;
    let activation = params.spec.activation;
    for (l, layer) in params.hidden().iter().enumerate() {
        let w = layer.fan_out;
        let (prev, rest) = ws.post.split_at_mut(l);
        let input: &[T] = if l == 0 { &ws.x[..b * p] } else { &prev[l - 1][..b * layer.fan_in] };
        let pre = &mut ws.pre[l][..b * w];
        for row in pre.chunks_exact_mut(w) {
            row.copy_from_slice(&layer.biases);
        }
        T::gemm(
            b,
            layer.fan_in,
            w,
            T::one(),
            Strided::row_major(input, layer.fan_in),
            Strided::row_major(&layer.weights, w),
            T::one(),
            StridedMut::row_major(pre, w),
        );
        let act = &mut ws.act[l][..b * w];
        let post = &mut rest[0][..b * w];
        for ((a, q), &z) in act.iter_mut().zip(post.iter_mut()).zip(pre.iter()) {
            *a = activation.apply(z);
            *q = *a;
        }
        if active {
            for (q, &m) in post.iter_mut().zip(&ws.masks[l][..b * w]) {
                *q *= m;
            }
        }
    }

}

/// Output-unit value for row `r` of the last hidden layer.
#[inline]
fn output_row<T: Scalar>(params: &MlpParams<T>, ws: &BatchWorkspace<T>, r: usize) -> T {
    let out = params.output();
    let w = out.fan_in;
    let row = &ws.post[ws.post.len() - 1][r * w..(r + 1) * w];
    out.biases[0] + row.iter().zip(&out.weights).map(|(&g, &w)| g * w).sum::<T>()
}

/// Adds the batch-mean gradient into `grad` (which is cleared first) and
/// returns the summed (not averaged) loss.
///
/// Dropout masks are drawn sample by sample, layer by layer, so the random
/// stream is consumed exactly as a per-sample pass would consume it.
#[allow(clippy::too_many_arguments)]
fn accumulate_batch<T: Scalar, X: AsRef<[T]>, R: Rng + ?Sized>(
    params: &MlpParams<T>,
    xs: &[X],
    targets: &[T],
    batch: &[usize],
    tau: T,
    dropout: Option<f64>,
    rng: &mut R,
    ws: &mut BatchWorkspace<T>,
    grad: &mut Gradient<T>,
) -> T {
    grad.clear();
    let b = batch.len();
    let p = params.spec.input_dim;
    let widths = &params.spec.hidden_widths;
    let activation = params.spec.activation;
    let n_hidden = widths.len();
    let rate = dropout.unwrap_or(0.0);
    let active = rate > 0.0;

    for (r, &i) in batch.iter().enumerate() {
        ws.x[r * p..(r + 1) * p].copy_from_slice(xs[i].as_ref());
    }
    if active {
        draw_masks(ws, widths, b, rate, rng);
    }

    forward_batch(params, ws, b, active);

    let out = params.output();
    let last_w = widths[n_hidden - 1];
    let inv = T::one() / T::from_count(b);
    let mut total = T::zero();
    {
        let last = &ws.post[n_hidden - 1][..b * last_w];
        for (r, &i) in batch.iter().enumerate() {
            let pred = output_row(params, ws, r);
            let u = targets[i] - pred;
            total += loss_unchecked(u, tau);
            // d/d(pred) of rho(target - pred) / |batch|
            ws.d_out[r] = -grad_unchecked(u, tau) * inv;
        }
        let g_out = &mut grad.layers[n_hidden];
        g_out.biases[0] = ws.d_out[..b].iter().copied().sum();
        T::gemm(
            last_w,
            b,
            1,
            T::one(),
            Strided::transposed(last, last_w),
            Strided::row_major(&ws.d_out[..b], 1),
            T::zero(),
            StridedMut::row_major(&mut g_out.weights, 1),
        );
        let delta = &mut ws.delta[n_hidden - 1][..b * last_w];
        for (row, &d) in delta.chunks_exact_mut(last_w).zip(&ws.d_out[..b]) {
            for (v, &w) in row.iter_mut().zip(&out.weights) {
                *v = w * d;
            }
        }
    }

    for l in (0..n_hidden).rev() {
        let layer = &params.layers[l];
        let w = layer.fan_out;
        // delta[l] holds d(loss)/d(post[l]); turn it into d(loss)/d(pre[l]).
        {
            let delta = &mut ws.delta[l][..b * w];
            let pre = &ws.pre[l][..b * w];
            let act = &ws.act[l][..b * w];
            if active {
                for (d, &m) in delta.iter_mut().zip(&ws.masks[l][..b * w]) {
                    *d *= m;
                }
            }
            for ((d, &z), &a) in delta.iter_mut().zip(pre).zip(act) {
                *d *= activation.derivative(z, a);
            }
        }
        let (before, from_l) = ws.delta.split_at_mut(l);
        let dz = &from_l[0][..b * w];
        let input: &[T] = if l == 0 { &ws.x[..b * p] } else { &ws.post[l - 1][..b * layer.fan_in] };
        let g = &mut grad.layers[l];
        for row in dz.chunks_exact(w) {
            for (gb, &d) in g.biases.iter_mut().zip(row) {
                *gb += d;
            }
        }
        T::gemm(
            layer.fan_in,
            b,
            w,
            T::one(),
            Strided::transposed(input, layer.fan_in),
            Strided::row_major(dz, w),
            T::zero(),
            StridedMut::row_major(&mut g.weights, w),
        );
        if l > 0 {
            let prev = &mut before[l - 1][..b * layer.fan_in];
            T::gemm(
                b,
                w,
                layer.fan_in,
                T::one(),
                Strided::row_major(dz, w),
                Strided::transposed(&layer.weights, w),
                T::zero(),
                StridedMut::row_major(prev, layer.fan_in),
            );
        }
    }
    total
}

/// Optimiser settings for [`train_mbgd`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::domain(format!("learning rate {} must be positive", self.learning_rate)));
        }
        if self.epochs == 0 {
            return Err(Error::domain("epochs must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::domain("batch size must be positive"));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Result of a training run: final parameters and the mean training loss of
/// every epoch (computed on the fly, in training mode).
#[derive(Debug, Clone)]
pub struct TrainOutcome<T: Scalar> {
    pub params: MlpParams<T>,
    pub epoch_losses: Vec<T>,
}

/// Fresh He initialisation from `config.seed`, then [`train_mbgd_from`].
pub fn train_mbgd<T: Scalar, X: AsRef<[T]>>(
    xs: &[X],
    targets: &[T],
    spec: &MlpSpec,
    config: &TrainConfig,
    tau: ExpectileLevel<T>,
) -> Result<MlpParams<T>> {
    let init = init_params(spec, config.seed)?;
    Ok(train_mbgd_from(init, xs, targets, config, tau)?.params)
}

/// Mini-batch gradient descent from given starting parameters.
///
/// Each epoch reshuffles the sample order with the seeded stream and walks it
/// in batches of `batch_size` (clamped to the data size; the last batch may be
/// smaller), taking a step `theta -= lr * grad` per batch.
pub fn train_mbgd_from<T: Scalar, X: AsRef<[T]>>(
    init: MlpParams<T>,
    xs: &[X],
    targets: &[T],
    config: &TrainConfig,
    tau: ExpectileLevel<T>,
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    if xs.is_empty() || xs.len() != targets.len() {
        return Err(Error::domain(format!(
            "training data needs matching non-empty covariates and targets ({} vs {})",
            xs.len(),
            targets.len()
        )));
    }
    let mut params = init;
    validate_data(&params.spec, xs, targets)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let n = xs.len();
    let batch_size = config.batch_size.min(n);
    let step = T::lit(config.learning_rate);
    let tau = tau.value();
    let dropout = Some(params.spec.dropout_rate);
    let mut ws = BatchWorkspace::new(&params.spec, batch_size);
    let mut grad = Gradient::zeros(&params.spec);
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_total = T::zero();
        for batch in order.chunks(batch_size) {
            let total = accumulate_batch(
                &params, xs, targets, batch, tau, dropout, &mut rng, &mut ws, &mut grad,
            );
            if !total.is_finite() {
                return Err(Error::Diverged { epoch, loss: total.as_f64() });
            }
            epoch_total += total;
            params.descend(&grad, step);
        }
        let mean = epoch_total / T::from_count(n);
        epoch_losses.push(mean);
    }
    if !params.is_finite() {
        return Err(Error::Diverged { epoch: config.epochs, loss: f64::NAN });
    }
    Ok(TrainOutcome { params, epoch_losses })
}

/// Evaluation-mode predictions, one per covariate vector, in order. Uses the
/// same batched arithmetic as training, so a fitted network reproduces its
/// training-time outputs exactly.
pub fn predict<T: Scalar, X: AsRef<[T]>>(params: &MlpParams<T>, xs: &[X]) -> Result<Vec<T>> {
    const CHUNK: usize = 256;
    let p = params.spec.input_dim;
    for x in xs {
        check_dim(&params.spec, x.as_ref())?;
    }
    let mut ws = BatchWorkspace::new(&params.spec, CHUNK.min(xs.len()));
    let mut out = Vec::with_capacity(xs.len());
    for chunk in xs.chunks(CHUNK) {
        for (r, x) in chunk.iter().enumerate() {
            ws.x[r * p..(r + 1) * p].copy_from_slice(x.as_ref());
        }
        forward_batch(params, &mut ws, chunk.len(), false);
        out.extend((0..chunk.len()).map(|r| output_row(params, &ws, r)));
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotRow {
    layer: usize,
    kind: String,
    row: usize,
    col: usize,
    value: f64,
}

/// Writes parameters as CSV rows `layer,kind,row,col,value` in layer-major
/// order: each layer's weights row-major (`kind = w`), then its biases
/// (`kind = b`, `row = 0`). The output layer has the highest index.
pub fn write_snapshot<T: Scalar, W: Write>(params: &MlpParams<T>, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["layer", "kind", "row", "col", "value"])?;
    for (l, layer) in params.layers.iter().enumerate() {
        for r in 0..layer.fan_in {
            for c in 0..layer.fan_out {
                let v = layer.weight(r, c);
                csv.write_record([l.to_string(), "w".into(), r.to_string(), c.to_string(), v.to_string()])?;
            }
        }
        for (c, b) in layer.biases.iter().enumerate() {
            csv.write_record([l.to_string(), "b".into(), "0".into(), c.to_string(), b.to_string()])?;
        }
    }
    csv.flush()?;
    Ok(())
}

/// Reads a snapshot written by [`write_snapshot`] for the given spec.
pub fn read_snapshot<T: Scalar, R: Read>(spec: &MlpSpec, reader: R) -> Result<MlpParams<T>> {
    let mut params = MlpParams::<T>::zeros(spec)?;
    let mut seen = 0usize;
    let mut csv = csv::Reader::from_reader(reader);
    for row in csv.deserialize::<SnapshotRow>() {
        let row = row?;
        let layer = params
            .layers
            .get_mut(row.layer)
            .ok_or_else(|| Error::Schema(format!("snapshot layer {} not in spec", row.layer)))?;
        let slot = match row.kind.as_str() {
            "w" if row.row < layer.fan_in && row.col < layer.fan_out => {
                &mut layer.weights[row.row * layer.fan_out + row.col]
            }
            "b" if row.row == 0 && row.col < layer.fan_out => &mut layer.biases[row.col],
            _ => {
                return Err(Error::Schema(format!(
                    "snapshot entry ({}, {}, {}, {}) does not fit the spec",
                    row.layer, row.kind, row.row, row.col
                )))
            }
        };
        *slot = T::lit(row.value);
        seen += 1;
    }
    if seen != spec.num_params() {
        return Err(Error::Schema(format!(
            "snapshot has {seen} entries, spec needs {}",
            spec.num_params()
        )));
    }
    Ok(params)
}
