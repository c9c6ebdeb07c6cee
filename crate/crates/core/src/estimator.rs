//! Log-linear utility estimator `s(q) = ln(1 + theta^T q)` fitted by
//! full-batch gradient descent on squared error over won auctions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{DataOwner, Features, QualityTier};

pub const DEFAULT_CLAMP_EPS: f64 = 1e-6;
pub const DEFAULT_LEARNING_RATE: f64 = 0.05;
pub const DEFAULT_EPOCHS: usize = 5000;

/// Consecutive loss increases that count as divergence.
pub const DIVERGENCE_WINDOW: usize = 10;

/// Quality discount applied to blurred owners by [`true_utility`].
pub const BLURRED_DISCOUNT: f64 = 0.4;

/// One past auction as seen by a single consumer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub features: Features,
    /// Observed only for won auctions.
    pub realized_utility: Option<f64>,
    pub bid: f64,
    pub won: bool,
    pub clearing_price: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub clamp_eps: f64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: DEFAULT_EPOCHS,
            clamp_eps: DEFAULT_CLAMP_EPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedEstimator {
    pub theta: Vec<f64>,
    pub initial_loss: f64,
    pub final_loss: f64,
    /// Loss after each gradient step, in order.
    pub loss_trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dimension mismatch: theta has {} entries, q has {}", a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `1 + theta^T q`, floored at `clamp_eps`.
fn margin(theta: &[f64], q: &[f64], clamp_eps: f64) -> f64 {
    (1.0 + dot(theta, q)).max(clamp_eps)
}

pub fn predict(theta: &[f64], q: &[f64], clamp_eps: f64) -> f64 {
    margin(theta, q, clamp_eps).ln()
}

fn labeled(history: &[HistoryRecord]) -> impl Iterator<Item = (&Features, f64)> {
    history
        .iter()
        .filter(|r| r.won)
        .filter_map(|r| r.realized_utility.map(|y| (&r.features, y)))
}

fn require_labeled(history: &[HistoryRecord]) -> Result<()> {
    if labeled(history).next().is_none() {
        return Err(Error::InsufficientData(
            "utility estimator needs at least one won record with realized utility".into(),
        ));
    }
    Ok(())
}

/// Half the sum of squared residuals over the won records of `history`.
pub fn loss(theta: &[f64], history: &[HistoryRecord], clamp_eps: f64) -> Result<f64> {
    require_labeled(history)?;
    Ok(labeled(history)
        .map(|(q, y)| {
            let r = y - predict(theta, q, clamp_eps);
            r * r
        })
        .sum::<f64>()
        * 0.5)
}

pub fn gradient(theta: &[f64], history: &[HistoryRecord], clamp_eps: f64) -> Result<Vec<f64>> {
    require_labeled(history)?;
    let mut grad = vec![0.0; theta.len()];
    for (q, y) in labeled(history) {
        let m = margin(theta, q, clamp_eps);
        let scale = (m.ln() - y) / m;
        for (g, qk) in grad.iter_mut().zip(q) {
            *g += scale * qk;
        }
    }
    Ok(grad)
}

/// Shrinks `theta` towards zero just enough that `1 + theta^T q >= clamp_eps`
/// holds on every training point.
fn project(theta: &mut [f64], history: &[HistoryRecord], clamp_eps: f64) {
    let mut factor: f64 = 1.0;
    for (q, _) in labeled(history) {
        let t = dot(theta, q);
        if 1.0 + t < clamp_eps {
            factor = factor.min((1.0 - clamp_eps) / -t);
        }
    }
    if factor < 1.0 {
        theta.iter_mut().for_each(|v| *v *= factor);
    }
}

/// Flags a run whose loss is non-finite or has risen for
/// [`DIVERGENCE_WINDOW`] consecutive steps.
#[derive(Debug, Clone, Copy)]
struct DivergenceMonitor {
    prev: f64,
    rising: usize,
}

impl DivergenceMonitor {
    fn new(initial: f64) -> Self {
        DivergenceMonitor { prev: initial, rising: 0 }
    }

    fn observe(&mut self, step: usize, loss: f64) -> Result<()> {
        let diverged = Error::Divergence { step, window: DIVERGENCE_WINDOW };
        if !loss.is_finite() {
            return Err(diverged);
        }
        self.rising = if loss > self.prev { self.rising + 1 } else { 0 };
        self.prev = loss;
        if self.rising >= DIVERGENCE_WINDOW {
            return Err(diverged);
        }
        Ok(())
    }
}

/// Gradient descent from `theta = 0`. Returns the lowest-loss iterate seen,
/// so the final loss never exceeds the initial one.
pub fn fit(history: &[HistoryRecord], params: &EstimatorParams) -> Result<FittedEstimator> {
    require_labeled(history)?;
    let dim = labeled(history).next().map(|(q, _)| q.len()).unwrap_or(0);
    let eps = params.clamp_eps;
    let mut theta = vec![0.0; dim];
    let initial_loss = loss(&theta, history, eps)?;

    let mut best = (initial_loss, theta.clone());
    let mut monitor = DivergenceMonitor::new(initial_loss);
    let mut trace = Vec::with_capacity(params.epochs);
    for step in 0..params.epochs {
        let grad = gradient(&theta, history, eps)?;
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= params.learning_rate * g;
        }
        project(&mut theta, history, eps);
        let current = loss(&theta, history, eps)?;
        monitor.observe(step, current)?;
        trace.push(current);
        if current < best.0 {
            best = (current, theta.clone());
        }
    }
    Ok(FittedEstimator {
        theta: best.1,
        initial_loss,
        final_loss: best.0,
        loss_trace: trace,
    })
}

/// Ground-truth utility of recruiting `owner`: `g * ln(1 + n / 1000)` with
/// `g = 1` for clean owners and [`BLURRED_DISCOUNT`] for blurred ones.
pub fn true_utility(owner: &DataOwner) -> f64 {
    let g = match owner.quality_tier {
        QualityTier::Clean => 1.0,
        QualityTier::Blurred => BLURRED_DISCOUNT,
    };
    g * (owner.num_samples as f64 / 1000.0).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn won(q: Features, y: f64) -> HistoryRecord {
        HistoryRecord { features: q, realized_utility: Some(y), bid: 0.1, won: true, clearing_price: 0.1 }
    }

    fn owner(tier: QualityTier, n: u32) -> DataOwner {
        DataOwner { id: 1, num_samples: n, quality_tier: tier, local_seed: 0 }
    }

    #[test]
    fn predict_basics() {
        assert_eq!(predict(&[0.0; 3], &[1.0, 0.3, 0.7], DEFAULT_CLAMP_EPS), 0.0);
        let e1 = std::f64::consts::E - 1.0;
        assert!((predict(&[1.0, 0.0, 0.0], &[e1, 0.4, 0.9], DEFAULT_CLAMP_EPS) - 1.0).abs() < 1e-15);
        let floored = predict(&[-0.999_999, 0.0, 0.0], &[1.0, 0.0, 0.0], 1e-6);
        assert!((floored - 1e-6f64.ln()).abs() < 1e-6);
        // Below the floor the clamp takes over exactly.
        assert_eq!(predict(&[-2.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 1e-6), 1e-6f64.ln());
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn predict_dimension_mismatch() {
        predict(&[0.0; 2], &[1.0, 0.0, 0.0], DEFAULT_CLAMP_EPS);
    }

    #[test]
    fn loss_examples() {
        let q = [1.0, 0.2, 0.4];
        let theta = [0.3, -0.1, 0.5];
        let y = predict(&theta, &q, DEFAULT_CLAMP_EPS);
        assert_eq!(loss(&theta, &[won(q, y)], DEFAULT_CLAMP_EPS).unwrap(), 0.0);
        assert_eq!(loss(&[0.0; 3], &[won(q, 2.0)], DEFAULT_CLAMP_EPS).unwrap(), 2.0);
        assert!(matches!(loss(&theta, &[], DEFAULT_CLAMP_EPS), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn lost_records_are_ignored() {
        let q = [1.0, 0.2, 0.4];
        let lost = HistoryRecord { features: q, realized_utility: None, bid: 0.3, won: false, clearing_price: 0.0 };
        assert!(loss(&[0.0; 3], &[lost], DEFAULT_CLAMP_EPS).is_err());
        let l = loss(&[0.0; 3], &[lost, won(q, 1.0)], DEFAULT_CLAMP_EPS).unwrap();
        assert_eq!(l, 0.5);
    }

    #[test]
    fn gradient_examples() {
        let q = [1.0, 0.5, 0.25];
        assert_eq!(gradient(&[0.0; 3], &[won(q, 0.0)], DEFAULT_CLAMP_EPS).unwrap(), vec![0.0; 3]);
        let theta = [0.2, 0.1, -0.3];
        let one = gradient(&theta, &[won(q, 0.7)], DEFAULT_CLAMP_EPS).unwrap();
        let two = gradient(&theta, &[won(q, 0.7), won(q, 0.7)], DEFAULT_CLAMP_EPS).unwrap();
        for (a, b) in one.iter().zip(&two) {
            assert_eq!(2.0 * a, *b);
        }
    }

    proptest! {
        #[test]
        fn loss_is_order_invariant(ys in proptest::collection::vec(0.0f64..2.0, 2..12), seed in 0u64..1000) {
            let history: Vec<_> = ys.iter().enumerate()
                .map(|(i, &y)| won([1.0, (i as f64 + 1.0) / 12.0, ((seed + i as u64) % 10) as f64 / 10.0], y))
                .collect();
            let mut rev = history.clone();
            rev.reverse();
            let theta = [0.4, 0.3, 0.2];
            let a = loss(&theta, &history, DEFAULT_CLAMP_EPS).unwrap();
            let b = loss(&theta, &rev, DEFAULT_CLAMP_EPS).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
        }

        #[test]
        fn predict_monotone_in_margin(t1 in -0.99f64..5.0, dt in 0.0f64..3.0) {
            let q = [1.0, 0.0, 0.0];
            prop_assert!(predict(&[t1 + dt, 0.0, 0.0], &q, DEFAULT_CLAMP_EPS) >= predict(&[t1, 0.0, 0.0], &q, DEFAULT_CLAMP_EPS));
        }
    }

    #[test]
    fn zero_epochs_returns_zero_theta() {
        let params = EstimatorParams { epochs: 0, ..Default::default() };
        let fit = fit(&[won([1.0, 0.5, 0.5], 1.0)], &params).unwrap();
        assert_eq!(fit.theta, vec![0.0; 3]);
        assert_eq!(fit.final_loss, fit.initial_loss);
    }

    #[test]
    fn single_record_interpolates() {
        let q = [1.0, 0.6, 0.3];
        let fit = fit(&[won(q, 0.9)], &EstimatorParams::default()).unwrap();
        assert!((predict(&fit.theta, &q, DEFAULT_CLAMP_EPS) - 0.9).abs() <= 1e-3);
    }

    #[test]
    fn projection_keeps_margin_floor() {
        // A large negative label drags theta^T q towards -1.
        let history = [won([1.0, 0.0, 0.0], -20.0), won([1.0, 1.0, 0.0], 0.5)];
        let params = EstimatorParams { learning_rate: 0.5, epochs: 200, clamp_eps: 1e-6 };
        if let Ok(fit) = fit(&history, &params) {
            for r in &history {
                assert!(1.0 + dot(&fit.theta, &r.features) >= 1e-6 * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn divergence_monitor_window() {
        let mut m = DivergenceMonitor::new(1.0);
        for step in 0..DIVERGENCE_WINDOW - 1 {
            m.observe(step, 2.0 + step as f64).unwrap();
        }
        // A single dip resets the count.
        m.observe(20, 0.5).unwrap();
        for step in 0..DIVERGENCE_WINDOW - 1 {
            m.observe(step, 1.0 + step as f64).unwrap();
        }
        assert!(matches!(m.observe(99, 100.0), Err(Error::Divergence { step: 99, .. })));
        assert!(DivergenceMonitor::new(1.0).observe(0, f64::NAN).is_err());
    }

    #[test]
    fn overshooting_rate_never_worsens_returned_fit() {
        let history: Vec<_> = (0..50).map(|i| won([1.0, i as f64 / 50.0, 1.0], 0.5)).collect();
        let params = EstimatorParams { learning_rate: 5.0, epochs: 200, clamp_eps: 1e-6 };
        if let Ok(f) = fit(&history, &params) {
            assert!(f.final_loss <= f.initial_loss);
        }
    }

    #[test]
    fn true_utility_values() {
        assert!((true_utility(&owner(QualityTier::Clean, 1000)) - 2f64.ln()).abs() < 1e-15);
        assert!((true_utility(&owner(QualityTier::Blurred, 1000)) - 0.4 * 2f64.ln()).abs() < 1e-15);
        for n in [1000, 2500, 9999] {
            assert!(true_utility(&owner(QualityTier::Clean, n + 1)) > true_utility(&owner(QualityTier::Clean, n)));
            assert!(true_utility(&owner(QualityTier::Clean, n)) > true_utility(&owner(QualityTier::Blurred, n)));
        }
    }
}
