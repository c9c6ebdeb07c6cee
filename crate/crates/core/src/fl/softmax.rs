//! Multinomial logistic regression with federated averaging.

use serde::{Deserialize, Serialize};

use super::data::LocalDataset;
use crate::error::{Error, Result};

pub const DEFAULT_LOCAL_EPOCHS: usize = 100;
pub const DEFAULT_LOCAL_LR: f64 = 0.05;

/// `K x (d + 1)` weights, row-major, bias in the last column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxModel {
    pub num_classes: usize,
    pub dim: usize,
    pub weights: Vec<f64>,
}

impl SoftmaxModel {
    pub fn zeros(num_classes: usize, dim: usize) -> Self {
        SoftmaxModel {
            num_classes,
            dim,
            weights: vec![0.0; num_classes * (dim + 1)],
        }
    }

    fn stride(&self) -> usize {
        self.dim + 1
    }

    pub fn logits_into(&self, x: &[f64], out: &mut [f64]) {
        let s = self.stride();
        for (k, o) in out.iter_mut().enumerate() {
            let w = &self.weights[k * s..(k + 1) * s];
            *o = w[self.dim] + w[..self.dim].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    /// Class probabilities for `x` written into `out`.
    pub fn predict_proba_into(&self, x: &[f64], out: &mut [f64]) {
        self.logits_into(x, out);
        let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for o in out.iter_mut() {
            *o = (*o - max).exp();
            z += *o;
        }
        out.iter_mut().for_each(|o| *o /= z);
    }

    /// Arg-max class; ties go to the lowest class id.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut logits = vec![0.0; self.num_classes];
        self.logits_into(x, &mut logits);
        let mut best = 0;
        for k in 1..self.num_classes {
            if logits[k] > logits[best] {
                best = k;
            }
        }
        best
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }
}

/// Mean cross-entropy over `data`.
pub fn cross_entropy(model: &SoftmaxModel, data: &LocalDataset) -> f64 {
    let mut p = vec![0.0; model.num_classes];
    let total: f64 = (0..data.len())
        .map(|i| {
            model.predict_proba_into(data.row(i), &mut p);
            -p[data.labels[i]].max(f64::MIN_POSITIVE).ln()
        })
        .sum();
    total / data.len() as f64
}

/// Gradient of [`cross_entropy`] with respect to the weights.
pub fn cross_entropy_gradient(model: &SoftmaxModel, data: &LocalDataset) -> Vec<f64> {
    let s = model.stride();
    let mut grad = vec![0.0; model.weights.len()];
    let mut p = vec![0.0; model.num_classes];
    for i in 0..data.len() {
        let x = data.row(i);
        model.predict_proba_into(x, &mut p);
        p[data.labels[i]] -= 1.0;
        for (k, &pk) in p.iter().enumerate() {
            let g = &mut grad[k * s..(k + 1) * s];
            for (gj, xj) in g[..model.dim].iter_mut().zip(x) {
                *gj += pk * xj;
            }
            g[model.dim] += pk;
        }
    }
    let n = data.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    grad
}

/// Full-batch gradient descent on the local cross-entropy.
pub fn local_train(model: &SoftmaxModel, data: &LocalDataset, local_epochs: usize, lr: f64) -> Result<SoftmaxModel> {
    let mut m = model.clone();
    if data.is_empty() {
        return Ok(m);
    }
    for epoch in 0..local_epochs {
        let g = cross_entropy_gradient(&m, data);
        for (w, gi) in m.weights.iter_mut().zip(&g) {
            *w -= lr * gi;
        }
        if !m.is_finite() {
            return Err(Error::NonFinite { epoch });
        }
    }
    Ok(m)
}

/// Sample-weighted average of client models.
pub fn fedavg(updates: &[(SoftmaxModel, usize)]) -> Result<SoftmaxModel> {
    let (first, _) = updates
        .first()
        .ok_or_else(|| Error::InsufficientData("federated averaging needs at least one update".into()))?;
    let total: usize = updates.iter().map(|(_, n)| n).sum();
    if total == 0 {
        return Err(Error::InsufficientData("federated averaging needs a positive sample count".into()));
    }
    let mut avg = SoftmaxModel::zeros(first.num_classes, first.dim);
    for (m, n) in updates {
        if m.num_classes != first.num_classes || m.dim != first.dim {
            return Err(Error::Config(format!(
                "model shape mismatch: {}x{} vs {}x{}",
                m.num_classes, m.dim, first.num_classes, first.dim
            )));
        }
        let w = *n as f64 / total as f64;
        for (a, b) in avg.weights.iter_mut().zip(&m.weights) {
            *a += w * b;
        }
    }
    Ok(avg)
}

/// Fraction of rows whose arg-max prediction matches the label.
pub fn evaluate(model: &SoftmaxModel, test: &LocalDataset) -> f64 {
    if test.is_empty() {
        return 0.0;
    }
    let correct = (0..test.len()).filter(|&i| model.predict(test.row(i)) == test.labels[i]).count();
    correct as f64 / test.len() as f64
}
