use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::features::FeatureMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            epochs: 500,
            learning_rate: 0.1,
            l2: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Loss at the start of each epoch.
    pub training_log: Vec<f64>,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean binary cross-entropy plus (l2/2)·‖w‖², and its gradient in (w, b).
pub fn loss_and_gradient(
    x: &Array2<f64>,
    y: &[bool],
    weights: ArrayView1<f64>,
    bias: f64,
    l2: f64,
) -> (f64, Array1<f64>, f64) {
    let n = x.nrows() as f64;
    let z = x.dot(&weights) + bias;
    let mut loss = 0.0;
    let mut residual = Array1::zeros(x.nrows());
    for (i, (&zi, &yi)) in z.iter().zip(y).enumerate() {
        let t = f64::from(u8::from(yi));
        loss += softplus(zi) - t * zi;
        residual[i] = sigmoid(zi) - t;
    }
    let grad_w = x.t().dot(&residual) / n + &weights * l2;
    let grad_b = residual.sum() / n;
    (loss / n + 0.5 * l2 * weights.dot(&weights), grad_w, grad_b)
}

/// Full-batch gradient descent from zero-initialized parameters.
pub fn train_logistic(
    features: &FeatureMatrix,
    params: &LogisticParams,
) -> Result<LogisticModel, ModelError> {
    if features.n_rows() == 0 || features.n_cols() == 0 {
        return Err(ModelError::EmptyMatrix);
    }
    if !(params.learning_rate > 0.0 && params.learning_rate.is_finite())
        || params.l2.is_nan()
        || params.l2 < 0.0
    {
        return Err(ModelError::InvalidHyperparameter(format!(
            "learning_rate {} / l2 {}",
            params.learning_rate, params.l2
        )));
    }
    let x = &features.values;
    let mut w = Array1::<f64>::zeros(x.ncols());
    let mut b = 0.0;
    let mut log = Vec::with_capacity(params.epochs);
    for epoch in 0..params.epochs {
        let (loss, gw, gb) = loss_and_gradient(x, &features.target, w.view(), b, params.l2);
        if !loss.is_finite() {
            return Err(ModelError::NonFiniteLoss { epoch });
        }
        log.push(loss);
        w.scaled_add(-params.learning_rate, &gw);
        b -= params.learning_rate * gb;
    }
    Ok(LogisticModel {
        weights: w.to_vec(),
        bias: b,
        training_log: log,
    })
}

pub fn predict_proba_logistic(
    model: &LogisticModel,
    features: &FeatureMatrix,
) -> Result<Vec<f64>, ModelError> {
    if features.n_cols() != model.weights.len() {
        return Err(ModelError::DimensionMismatch {
            expected: model.weights.len(),
            found: features.n_cols(),
        });
    }
    let w = ArrayView1::from(&model.weights);
    Ok(features
        .values
        .dot(&w)
        .iter()
        .map(|&z| sigmoid(z + model.bias))
        .collect())
}

/// Label 1 iff score ≥ threshold.
pub fn classify(scores: &[f64], threshold: f64) -> Vec<bool> {
    scores.iter().map(|&s| s >= threshold).collect()
}
