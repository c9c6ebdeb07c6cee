//! Parametric winning functions and their calibration from bid history.
//!
//! Two families are supported, both with `W(0) = 0`, `W(c) = 1/2` and
//! `W -> 1` as the bid grows:
//!
//! * [`WinForm::Simple`]: `W(b) = b / (c + b)`
//! * [`WinForm::Complex`]: `W(b) = b^2 / (c^2 + b^2)`
//!
//! The complex form is sigmoidal rather than concave (it is convex for
//! `b < c / sqrt(3)`); nothing downstream relies on concavity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::HistoryRecord;

pub const DEFAULT_NUM_BUCKETS: usize = 20;

/// Lower end of the calibration search interval for `c`.
pub const MIN_C: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WinForm {
    Simple,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinningFunctionModel {
    pub form: WinForm,
    pub c: f64,
}

impl WinningFunctionModel {
    pub fn new(form: WinForm, c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "winning-function constant must be positive, got {c}");
        WinningFunctionModel { form, c }
    }

    pub fn win_prob(&self, b: f64) -> f64 {
        win_prob(self, b)
    }

    pub fn derivative(&self, b: f64) -> f64 {
        win_prob_derivative(self, b)
    }
}

pub fn win_prob(model: &WinningFunctionModel, b: f64) -> f64 {
    assert!(b >= 0.0, "bid must be non-negative, got {b}");
    let c = model.c;
    match model.form {
        WinForm::Simple => b / (c + b),
        WinForm::Complex => {
            let b2 = b * b;
            b2 / (c * c + b2)
        }
    }
}

pub fn win_prob_derivative(model: &WinningFunctionModel, b: f64) -> f64 {
    assert!(b >= 0.0, "bid must be non-negative, got {b}");
    let c = model.c;
    match model.form {
        WinForm::Simple => c / ((c + b) * (c + b)),
        WinForm::Complex => {
            let denom = c * c + b * b;
            2.0 * b * c * c / (denom * denom)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinBucket {
    pub bid_mid: f64,
    pub win_rate: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinCurve {
    /// Non-empty buckets in ascending bid order.
    pub buckets: Vec<WinBucket>,
    pub max_bid: f64,
}

impl WinCurve {
    pub fn total_count(&self) -> usize {
        self.buckets.iter().map(|b| b.count).sum()
    }
}

/// Buckets bids into `num_buckets` equal-width bins over `[0, max bid]` and
/// reports the mean win indicator of each occupied bin.
pub fn empirical_win_curve(records: &[HistoryRecord], num_buckets: usize) -> Result<WinCurve> {
    if records.is_empty() {
        return Err(Error::InsufficientData("win curve needs at least one bid record".into()));
    }
    if num_buckets < 2 {
        return Err(Error::invalid("num_buckets", format!("need at least 2, got {num_buckets}")));
    }
    let max_bid = records.iter().map(|r| r.bid).fold(0.0_f64, f64::max);
    let width = max_bid / num_buckets as f64;
    let mut wins = vec![0usize; num_buckets];
    let mut counts = vec![0usize; num_buckets];
    for r in records {
        let idx = if width > 0.0 {
            ((r.bid / width) as usize).min(num_buckets - 1)
        } else {
            0
        };
        counts[idx] += 1;
        wins[idx] += r.won as usize;
    }
    let buckets = (0..num_buckets)
        .filter(|&i| counts[i] > 0)
        .map(|i| WinBucket {
            bid_mid: (i as f64 + 0.5) * width,
            win_rate: wins[i] as f64 / counts[i] as f64,
            count: counts[i],
        })
        .collect();
    Ok(WinCurve { buckets, max_bid })
}

/// Count-weighted squared error of `form` with constant `c` against `curve`.
pub fn calibration_objective(curve: &WinCurve, form: WinForm, c: f64) -> f64 {
    let model = WinningFunctionModel { form, c };
    curve
        .buckets
        .iter()
        .map(|b| {
            let r = win_prob(&model, b.bid_mid) - b.win_rate;
            b.count as f64 * r * r
        })
        .sum()
}

/// Fits `c` by golden-section search of [`calibration_objective`] over
/// `[MIN_C, 10 * max_bid]`.
pub fn calibrate_c(curve: &WinCurve, form: WinForm) -> Result<f64> {
    if curve.buckets.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "calibration needs at least 2 occupied buckets, got {}",
            curve.buckets.len()
        )));
    }
    if curve.buckets.iter().all(|b| b.win_rate == 0.0) {
        return Err(Error::DegenerateCurve("every bucket lost".into()));
    }
    if curve.buckets.iter().all(|b| b.win_rate == 1.0) {
        return Err(Error::DegenerateCurve("every bucket won".into()));
    }
    let hi = (10.0 * curve.max_bid).max(2.0 * MIN_C);
    let c = golden_section_minimize(|c| calibration_objective(curve, form, c), MIN_C, hi, 1e-10);
    Ok(c.max(MIN_C))
}

/// Minimizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than
/// `tol * (1 + |x|)`.
pub fn golden_section_minimize(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..500 {
        if hi - lo <= tol * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}
