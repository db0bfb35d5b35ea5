//! Dense autoencoder trained on non-fraud rows; fraud is flagged when the
//! reconstruction error exceeds a percentile-calibrated threshold.

use std::io::Write;

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureMatrix;
use crate::metrics::{scalar_metrics, ConfusionMatrix, MetricsError, SweepRow};

#[derive(Debug, Error)]
pub enum AutoencoderError {
    #[error("training input contains {0} fraud-labelled rows; filter to non-fraud first")]
    FraudRowsPresent(usize),
    #[error("loss became non-finite at epoch {epoch}; lower the learning rate (currently {learning_rate})")]
    NonFiniteLoss { epoch: usize, learning_rate: f64 },
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training input has no rows")]
    EmptyInput,
    #[error("no errors to calibrate against")]
    EmptyErrors,
    #[error("percentile {0} outside (0, 100]")]
    PercentileOutOfRange(f64),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
    Linear,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Linear => z,
        }
    }

    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub layer_sizes: Vec<usize>,
    pub dropout_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
    pub hidden_activation: Activation,
}

impl NetworkConfig {
    /// Symmetric funnel [d, ⌈d/2⌉, ⌈d/4⌉, ⌈d/2⌉, d].
    pub fn for_features(d: usize) -> Self {
        let h = d.div_ceil(2).max(1);
        let b = d.div_ceil(4).max(1);
        NetworkConfig {
            layer_sizes: vec![d, h, b, h, d],
            dropout_rate: 0.2,
            epochs: 100,
            batch_size: 32,
            learning_rate: 0.001,
            momentum: 0.9,
            seed: 42,
            hidden_activation: Activation::Relu,
        }
    }

    pub fn n_features(&self) -> usize {
        self.layer_sizes.first().copied().unwrap_or(0)
    }

    pub fn bottleneck(&self) -> usize {
        self.layer_sizes.iter().copied().min().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), AutoencoderError> {
        let bad = |m: String| Err(AutoencoderError::InvalidConfig(m));
        let sizes = &self.layer_sizes;
        if sizes.len() < 3 {
            return bad(format!("need at least 3 layer sizes, got {}", sizes.len()));
        }
        if sizes.contains(&0) {
            return bad("layer sizes must be positive".into());
        }
        if sizes[0] != sizes[sizes.len() - 1] {
            return bad(format!(
                "input size {} != output size {}",
                sizes[0],
                sizes[sizes.len() - 1]
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad(format!("dropout_rate {} outside [0, 1)", self.dropout_rate));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning_rate {} must be positive",
                self.learning_rate
            ));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum {} outside [0, 1)", self.momentum));
        }
        Ok(())
    }
}

/// Weights are stored fan_in × fan_out so a batch forward pass is `a · W + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerGradient {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutoencoderModel {
    pub layers: Vec<DenseLayer>,
    pub config: NetworkConfig,
    pub training_loss_curve: Vec<f64>,
    pub threshold: Option<f64>,
}

struct Trace {
    /// Post-activation (and post-dropout) outputs, starting with the input.
    activations: Vec<Array2<f64>>,
    pre_activations: Vec<Array2<f64>>,
    /// Dropout scale factors per hidden layer: 0 or 1/(1-rate).
    masks: Vec<Option<Array2<f64>>>,
}

impl AutoencoderModel {
    /// Glorot-uniform weights, zero biases.
    pub fn initialize(config: &NetworkConfig, rng: &mut impl Rng) -> Self {
        let layers = config
            .layer_sizes
            .windows(2)
            .map(|w| {
                let limit = (6.0 / (w[0] + w[1]) as f64).sqrt();
                DenseLayer {
                    weights: Array2::from_shape_fn((w[0], w[1]), |_| {
                        rng.random_range(-limit..=limit)
                    }),
                    bias: Array1::zeros(w[1]),
                }
            })
            .collect();
        AutoencoderModel {
            layers,
            config: config.clone(),
            training_loss_curve: Vec::new(),
            threshold: None,
        }
    }

    pub fn n_features(&self) -> usize {
        self.config.n_features()
    }

    fn forward(&self, x: &Array2<f64>, mut dropout: Option<&mut ChaCha8Rng>) -> Trace {
        let last = self.layers.len() - 1;
        let rate = self.config.dropout_rate;
        let mut activations = vec![x.clone()];
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        let mut masks = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let z = activations[l].dot(&layer.weights) + &layer.bias;
            let (a, mask) = if l == last {
                (z.clone(), None)
            } else {
                let mut a = z.mapv(|v| self.config.hidden_activation.apply(v));
                let mask = match dropout.as_deref_mut() {
                    Some(rng) if rate > 0.0 => {
                        let keep = 1.0 / (1.0 - rate);
                        let m = Array2::from_shape_fn(a.raw_dim(), |_| {
                            if rng.random::<f64>() < rate {
                                0.0
                            } else {
                                keep
                            }
                        });
                        a *= &m;
                        Some(m)
                    }
                    _ => None,
                };
                (a, mask)
            };
            pre_activations.push(z);
            masks.push(mask);
            activations.push(a);
        }
        Trace {
            activations,
            pre_activations,
            masks,
        }
    }

    fn backward(&self, x: &Array2<f64>, trace: &Trace) -> (f64, Vec<LayerGradient>) {
        let output = trace.activations.last().expect("network has layers");
        let diff = output - x;
        let scale = (x.nrows() * x.ncols()) as f64;
        let loss = diff.iter().map(|v| v * v).sum::<f64>() / scale;
        let mut delta = diff.mapv(|v| 2.0 * v / scale);
        let mut grads = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            grads.push(LayerGradient {
                weights: trace.activations[l].t().dot(&delta),
                bias: delta.sum_axis(Axis(0)),
            });
            if l > 0 {
                let mut back = delta.dot(&self.layers[l].weights.t());
                let act = self.config.hidden_activation;
                back.zip_mut_with(&trace.pre_activations[l - 1], |g, &z| {
                    *g *= act.derivative(z)
                });
                if let Some(m) = &trace.masks[l - 1] {
                    back *= m;
                }
                delta = back;
            }
        }
        grads.reverse();
        (loss, grads)
    }

    /// Mean squared reconstruction loss and its gradient, dropout disabled.
    pub fn loss_and_gradients(&self, x: &Array2<f64>) -> (f64, Vec<LayerGradient>) {
        self.backward(x, &self.forward(x, None))
    }

    /// Inference-mode reconstruction; consumes no randomness.
    pub fn reconstruct(&self, x: &Array2<f64>) -> Result<Array2<f64>, AutoencoderError> {
        if x.ncols() != self.n_features() {
            return Err(AutoencoderError::DimensionMismatch {
                expected: self.n_features(),
                found: x.ncols(),
            });
        }
        Ok(self
            .forward(x, None)
            .activations
            .pop()
            .expect("network has layers"))
    }

    /// Hidden activations of layer `l` (1-based among hidden layers) in
    /// training mode when `rng` is supplied, inference mode otherwise.
    pub fn hidden_activations(
        &self,
        x: &Array2<f64>,
        l: usize,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Array2<f64> {
        self.forward(x, rng).activations[l].clone()
    }

    pub fn calibrate(
        &mut self,
        errors: &ErrorTable,
        percentile: f64,
    ) -> Result<f64, AutoencoderError> {
        let t = calibrate_threshold(errors, percentile)?;
        self.threshold = Some(t);
        Ok(t)
    }
}

pub fn train_autoencoder(
    features: &FeatureMatrix,
    config: &NetworkConfig,
) -> Result<AutoencoderModel, AutoencoderError> {
    config.validate()?;
    let fraud = features.target.iter().filter(|&&t| t).count();
    if fraud > 0 {
        return Err(AutoencoderError::FraudRowsPresent(fraud));
    }
    if features.n_cols() != config.n_features() {
        return Err(AutoencoderError::DimensionMismatch {
            expected: config.n_features(),
            found: features.n_cols(),
        });
    }
    let n = features.n_rows();
    if n == 0 {
        return Err(AutoencoderError::EmptyInput);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = AutoencoderModel::initialize(config, &mut rng);
    let mut velocity: Vec<LayerGradient> = model
        .layers
        .iter()
        .map(|l| LayerGradient {
            weights: Array2::zeros(l.weights.raw_dim()),
            bias: Array1::zeros(l.bias.len()),
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let x = features.values.select(Axis(0), batch);
            let trace = model.forward(&x, Some(&mut rng));
            let (loss, grads) = model.backward(&x, &trace);
            if !loss.is_finite() {
                return Err(AutoencoderError::NonFiniteLoss {
                    epoch,
                    learning_rate: config.learning_rate,
                });
            }
            epoch_loss += loss * batch.len() as f64;
            for ((layer, v), g) in model.layers.iter_mut().zip(&mut velocity).zip(&grads) {
                v.weights *= config.momentum;
                v.weights.scaled_add(-config.learning_rate, &g.weights);
                v.bias *= config.momentum;
                v.bias.scaled_add(-config.learning_rate, &g.bias);
                layer.weights += &v.weights;
                layer.bias += &v.bias;
            }
        }
        let mean = epoch_loss / n as f64;
        if !mean.is_finite() {
            return Err(AutoencoderError::NonFiniteLoss {
                epoch,
                learning_rate: config.learning_rate,
            });
        }
        model.training_loss_curve.push(mean);
    }
    Ok(model)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTable {
    pub attribute_names: Vec<String>,
    /// n × d absolute per-attribute errors.
    pub attribute_errors: Array2<f64>,
    /// Mean squared error per row.
    pub total_error: Vec<f64>,
    pub target: Vec<bool>,
}

impl ErrorTable {
    pub fn from_reconstruction(
        attribute_names: Vec<String>,
        input: &Array2<f64>,
        output: &Array2<f64>,
        target: Vec<bool>,
    ) -> Self {
        let diff = output - input;
        let d = diff.ncols().max(1) as f64;
        let total_error = diff
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v * v).sum::<f64>() / d)
            .collect();
        ErrorTable {
            attribute_names,
            attribute_errors: diff.mapv(f64::abs),
            total_error,
            target,
        }
    }

    pub fn len(&self) -> usize {
        self.total_error.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total_error.is_empty()
    }

    pub fn non_fraud_errors(&self) -> Vec<f64> {
        self.total_error
            .iter()
            .zip(&self.target)
            .filter(|(_, &t)| !t)
            .map(|(&e, _)| e)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), AutoencoderError> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header: Vec<String> = self
            .attribute_names
            .iter()
            .map(|c| format!("err_{c}"))
            .collect();
        header.push("total_error".into());
        header.push("target".into());
        w.write_record(&header)?;
        for (i, row) in self.attribute_errors.rows().into_iter().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(self.total_error[i].to_string());
            rec.push(if self.target[i] { "1" } else { "0" }.into());
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

pub fn reconstruction_errors(
    model: &AutoencoderModel,
    features: &FeatureMatrix,
) -> Result<ErrorTable, AutoencoderError> {
    let output = model.reconstruct(&features.values)?;
    Ok(ErrorTable::from_reconstruction(
        features.column_names.clone(),
        &features.values,
        &output,
        features.target.clone(),
    ))
}

/// ⌈p/100 · n⌉-th smallest value (1-based).
pub fn nearest_rank(values: &[f64], percentile: f64) -> Result<f64, AutoencoderError> {
    if values.is_empty() {
        return Err(AutoencoderError::EmptyErrors);
    }
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(AutoencoderError::PercentileOutOfRange(percentile));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((percentile / 100.0) * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Threshold from the non-fraud rows of `errors`.
pub fn calibrate_threshold(errors: &ErrorTable, percentile: f64) -> Result<f64, AutoencoderError> {
    nearest_rank(&errors.non_fraud_errors(), percentile)
}

/// Fraud iff total error is strictly above the threshold.
pub fn classify_by_error(errors: &ErrorTable, threshold: f64) -> Vec<bool> {
    errors.total_error.iter().map(|&e| e > threshold).collect()
}

/// One metrics row per percentile, sorted by ascending percentile. Thresholds
/// are nearest-rank percentiles over every row of the table; percentile 0
/// uses the lowest finite float so that every row is flagged and the value
/// still survives a JSON round trip.
pub fn threshold_sweep_ae(
    errors: &ErrorTable,
    percentiles: &[f64],
) -> Result<Vec<SweepRow>, AutoencoderError> {
    percentile_sweep(&errors.total_error, &errors.target, percentiles)
}

/// Percentile-driven sweep over any anomaly score where larger means more suspicious.
pub fn percentile_sweep(
    scores: &[f64],
    labels: &[bool],
    percentiles: &[f64],
) -> Result<Vec<SweepRow>, AutoencoderError> {
    if scores.is_empty() {
        return Err(AutoencoderError::EmptyErrors);
    }
    let mut ps = percentiles.to_vec();
    if let Some(bad) = ps.iter().find(|p| !(0.0..=100.0).contains(*p)) {
        return Err(AutoencoderError::PercentileOutOfRange(*bad));
    }
    ps.sort_by(f64::total_cmp);
    ps.iter()
        .map(|&p| {
            let threshold = if p == 0.0 {
                f64::MIN
            } else {
                nearest_rank(scores, p)?
            };
            let predicted: Vec<bool> = scores.iter().map(|&e| e > threshold).collect();
            let m = scalar_metrics(&ConfusionMatrix::from_labels(labels, &predicted)?)?;
            Ok(SweepRow {
                percentile: Some(p),
                threshold,
                precision: m.precision,
                recall: m.recall,
                specificity: m.specificity,
                f1: m.f1,
                accuracy: m.accuracy,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::AnalysisUnit;
    use ndarray::array;

    fn matrix(values: Array2<f64>, target: Vec<bool>) -> FeatureMatrix {
        let (n, d) = values.dim();
        FeatureMatrix::new(
            values,
            (0..d).map(|j| format!("f{j}")).collect(),
            target,
            (0..n).map(|i| i.to_string()).collect(),
            AnalysisUnit::Claim,
        )
        .unwrap()
    }

    fn random(seed: u64, n: usize, d: usize) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, d), |_| rng.random_range(-1.5..1.5))
    }

    fn table(errors: &[f64], target: &[bool]) -> ErrorTable {
        ErrorTable {
            attribute_names: vec!["a".into()],
            attribute_errors: Array2::from_shape_fn((errors.len(), 1), |(i, _)| errors[i].sqrt()),
            total_error: errors.to_vec(),
            target: target.to_vec(),
        }
    }

    fn loss_at(model: &AutoencoderModel, x: &Array2<f64>) -> f64 {
        model.loss_and_gradients(x).0
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut config = NetworkConfig::for_features(3);
        config.layer_sizes = vec![3, 2, 1, 2, 3];
        config.dropout_rate = 0.0;
        let x = random(11, 7, 3);
        let h = 1e-5;
        for draw in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + draw);
            let mut model = AutoencoderModel::initialize(&config, &mut rng);
            for layer in &mut model.layers {
                layer.bias.mapv_inplace(|_| rng.random_range(0.1..0.5));
            }
            let (_, grads) = model.loss_and_gradients(&x);
            for l in 0..model.layers.len() {
                let n_w = model.layers[l].weights.len();
                for idx in 0..n_w + model.layers[l].bias.len() {
                    let analytic = if idx < n_w {
                        let cols = grads[l].weights.ncols();
                        grads[l].weights[[idx / cols, idx % cols]]
                    } else {
                        grads[l].bias[idx - n_w]
                    };
                    let bump = |m: &mut AutoencoderModel, delta: f64| {
                        if idx < n_w {
                            m.layers[l].weights.as_slice_mut().unwrap()[idx] += delta;
                        } else {
                            m.layers[l].bias[idx - n_w] += delta;
                        }
                    };
                    let mut plus = model.clone();
                    bump(&mut plus, h);
                    let mut minus = model.clone();
                    bump(&mut minus, -h);
                    let numeric = (loss_at(&plus, &x) - loss_at(&minus, &x)) / (2.0 * h);
                    let rel =
                        (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
                    assert!(
                        rel < 1e-5,
                        "draw {draw} layer {l} param {idx}: {analytic} vs {numeric}"
                    );
                }
            }
        }
    }

    #[test]
    fn inverted_dropout_preserves_expectation() {
        let mut config = NetworkConfig::for_features(4);
        config.dropout_rate = 0.2;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = AutoencoderModel::initialize(&config, &mut rng);
        let x = array![[0.5, -1.0, 1.2, 0.3]];
        let reference = model.hidden_activations(&x, 1, None);
        assert_eq!(reference, model.hidden_activations(&x, 1, None));
        let samples = 10_000;
        let mut sum = Array2::<f64>::zeros(reference.raw_dim());
        let mut drop_rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..samples {
            sum += &model.hidden_activations(&x, 1, Some(&mut drop_rng));
        }
        let mean = sum / samples as f64;
        let p = config.dropout_rate;
        for (m, a) in mean.iter().zip(reference.iter()) {
            // Each sample is a·B/(1−p) with B ~ Bernoulli(1−p).
            let sigma = a.abs() * (p / (1.0 - p)).sqrt() / (samples as f64).sqrt();
            assert!((m - a).abs() <= 3.0 * sigma + 1e-12, "{m} vs {a}");
        }
    }

    #[test]
    fn linear_identity_is_learned() {
        let mut config = NetworkConfig::for_features(3);
        config.layer_sizes = vec![3, 3, 3, 3, 3];
        config.hidden_activation = Activation::Linear;
        config.dropout_rate = 0.0;
        config.epochs = 200;
        config.batch_size = 8;
        config.learning_rate = 0.01;
        let m = matrix(random(7, 64, 3), vec![false; 64]);
        let model = train_autoencoder(&m, &config).unwrap();
        let last = *model.training_loss_curve.last().unwrap();
        assert!(last < 1e-4, "final loss {last}");
        assert!(last < model.training_loss_curve[0]);
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let mut config = NetworkConfig::for_features(4);
        config.epochs = 0;
        let m = matrix(random(8, 10, 4), vec![false; 10]);
        let model = train_autoencoder(&m, &config).unwrap();
        let init =
            AutoencoderModel::initialize(&config, &mut ChaCha8Rng::seed_from_u64(config.seed));
        assert_eq!(model, init);
        assert!(model.training_loss_curve.is_empty());
    }

    #[test]
    fn training_is_deterministic() {
        let mut config = NetworkConfig::for_features(6);
        config.epochs = 5;
        let m = matrix(random(9, 50, 6), vec![false; 50]);
        let a = train_autoencoder(&m, &config).unwrap();
        let b = train_autoencoder(&m, &config).unwrap();
        assert_eq!(a, b);
        config.seed += 1;
        assert_ne!(a, train_autoencoder(&m, &config).unwrap());
    }

    #[test]
    fn row_order_does_not_matter_for_full_batch() {
        let mut config = NetworkConfig::for_features(4);
        config.epochs = 20;
        config.dropout_rate = 0.0;
        config.batch_size = 1000;
        let x = random(10, 40, 4);
        let reversed = x.slice(ndarray::s![..;-1, ..]).to_owned();
        let a = train_autoencoder(&matrix(x, vec![false; 40]), &config).unwrap();
        let b = train_autoencoder(&matrix(reversed, vec![false; 40]), &config).unwrap();
        let (la, lb) = (
            a.training_loss_curve.last().unwrap(),
            b.training_loss_curve.last().unwrap(),
        );
        assert!((la - lb).abs() < 1e-9);
    }

    #[test]
    fn training_rejects_bad_input() {
        let config = NetworkConfig::for_features(3);
        let m = matrix(random(1, 4, 3), vec![false, true, false, true]);
        assert!(matches!(
            train_autoencoder(&m, &config),
            Err(AutoencoderError::FraudRowsPresent(2))
        ));
        let m = matrix(random(1, 4, 5), vec![false; 4]);
        assert!(matches!(
            train_autoencoder(&m, &config),
            Err(AutoencoderError::DimensionMismatch { .. })
        ));
        let mut hot = NetworkConfig::for_features(3);
        hot.learning_rate = 1e200;
        hot.dropout_rate = 0.0;
        let m = matrix(random(1, 16, 3), vec![false; 16]);
        assert!(matches!(
            train_autoencoder(&m, &hot),
            Err(AutoencoderError::NonFiniteLoss { .. })
        ));
        let mut wide = NetworkConfig::for_features(3);
        wide.layer_sizes = vec![3, 2, 4];
        assert!(matches!(
            wide.validate(),
            Err(AutoencoderError::InvalidConfig(_))
        ));
    }

    #[test]
    fn error_table_arithmetic() {
        let input = array![[1.0, 2.0]];
        let output = array![[1.3, 1.6]];
        let t = ErrorTable::from_reconstruction(
            vec!["a".into(), "b".into()],
            &input,
            &output,
            vec![true],
        );
        assert!((t.attribute_errors[[0, 0]] - 0.3).abs() < 1e-12);
        assert!((t.attribute_errors[[0, 1]] - 0.4).abs() < 1e-12);
        assert!((t.total_error[0] - 0.125).abs() < 1e-12);

        let x = random(12, 30, 5);
        let y = random(13, 30, 5);
        let t = ErrorTable::from_reconstruction(
            (0..5).map(|j| j.to_string()).collect(),
            &x,
            &y,
            vec![false; 30],
        );
        for i in 0..30 {
            let mut s = 0.0;
            for j in 0..5 {
                s += (y[[i, j]] - x[[i, j]]) * (y[[i, j]] - x[[i, j]]);
            }
            assert!((t.total_error[i] - s / 5.0).abs() < 1e-12);
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "err_0,err_1,err_2,err_3,err_4,total_error,target"
        );
        assert_eq!(text.lines().count(), 31);
    }

    #[test]
    fn perfect_reconstruction_has_zero_error() {
        let x = random(14, 5, 3);
        let t = ErrorTable::from_reconstruction(vec!["a".into(); 3], &x, &x, vec![false; 5]);
        assert!(t.total_error.iter().all(|&e| e == 0.0));
        assert!(t.attribute_errors.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn calibration_uses_nearest_rank() {
        let values: Vec<f64> = (1..=100).map(f64::from).collect();
        let t = table(&values, &[false; 100]);
        assert_eq!(calibrate_threshold(&t, 95.0).unwrap(), 95.0);
        assert_eq!(calibrate_threshold(&t, 100.0).unwrap(), 100.0);
        assert_eq!(nearest_rank(&[3.5], 1.0).unwrap(), 3.5);
        assert_eq!(nearest_rank(&[3.5], 99.9).unwrap(), 3.5);
        assert!(matches!(
            nearest_rank(&[], 50.0),
            Err(AutoencoderError::EmptyErrors)
        ));
        assert!(matches!(
            nearest_rank(&[1.0], 0.0),
            Err(AutoencoderError::PercentileOutOfRange(_))
        ));
        assert!(matches!(
            nearest_rank(&[1.0], 101.0),
            Err(AutoencoderError::PercentileOutOfRange(_))
        ));

        // Fraud rows are ignored for calibration.
        let mixed = table(&[1.0, 50.0, 2.0], &[false, true, false]);
        assert_eq!(calibrate_threshold(&mixed, 100.0).unwrap(), 2.0);
    }

    #[test]
    fn strict_classification() {
        let t = table(&[0.1, 0.9], &[false, true]);
        assert_eq!(classify_by_error(&t, 0.5), vec![false, true]);
        assert_eq!(classify_by_error(&t, 0.9), vec![false, false]);
        assert_eq!(classify_by_error(&t, -1.0), vec![true, true]);
    }

    #[test]
    fn sweep_endpoints_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let errors: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..1.0)).collect();
        let target: Vec<bool> = errors
            .iter()
            .map(|&e| e > 0.7 || rng.random_bool(0.05))
            .collect();
        let t = table(&errors, &target);
        let rows = threshold_sweep_ae(&t, &[100.0, 0.0, 50.0, 90.0, 10.0, 99.0]).unwrap();
        assert_eq!(rows[0].percentile, Some(0.0));
        assert_eq!(rows[0].recall, 1.0);
        assert_eq!(rows.last().unwrap().recall, 0.0);
        for w in rows.windows(2) {
            assert!(w[0].percentile < w[1].percentile);
            assert!(w[1].recall <= w[0].recall);
            assert!(w[1].specificity >= w[0].specificity);
        }
        assert!(matches!(
            threshold_sweep_ae(&table(&[], &[]), &[50.0]),
            Err(AutoencoderError::EmptyErrors)
        ));
    }

    #[test]
    fn model_json_round_trip() {
        let config = NetworkConfig::for_features(5);
        let mut model = AutoencoderModel::initialize(&config, &mut ChaCha8Rng::seed_from_u64(1));
        model.threshold = Some(0.25);
        let text = serde_json::to_string(&model).unwrap();
        let back: AutoencoderModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, model);
    }
}
