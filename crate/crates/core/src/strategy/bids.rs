use rand::Rng;

use crate::win_model::{WinForm, WinningFunctionModel};

fn check_inputs(s: f64, c: f64, lambda: f64) {
    assert!(s >= 0.0, "utility must be non-negative, got {s}");
    assert!(c > 0.0, "winning-function constant must be positive, got {c}");
    assert!(lambda >= 0.0, "multiplier must be non-negative, got {lambda}");
}

pub fn bid_const(const_bid: f64) -> f64 {
    const_bid
}

/// Uniform on `(0, rand_max]`.
pub fn bid_rand<R: Rng + ?Sized>(rand_max: f64, rng: &mut R) -> f64 {
    rand_max * (1.0 - rng.random::<f64>())
}

/// Uniform on `(0, s]`; zero when `s = 0`.
pub fn bid_bmub<R: Rng + ?Sized>(s: f64, rng: &mut R) -> f64 {
    s.max(0.0) * (1.0 - rng.random::<f64>())
}

pub fn bid_lin(s: f64, lin_coef: f64) -> f64 {
    lin_coef * s.max(0.0)
}

/// Optimal bid under `W(b) = b / (c + b)`:
/// `sqrt(c^2 + s c / (lambda + 1)) - c`.
pub fn bid_fbs(s: f64, c: f64, lambda: f64) -> f64 {
    check_inputs(s, c, lambda);
    let k = s / (lambda + 1.0);
    // Rationalized form of sqrt(c^2 + k c) - c; avoids cancellation when k << c.
    let b = k * c / ((c * c + k * c).sqrt() + c);
    b.max(0.0)
}

/// Optimal bid under `W(b) = b^2 / (c^2 + b^2)`: the real root of
/// `b^3 + 3 c^2 b = 2 c^2 s / (lambda + 1)`, in Cardano form
/// `c (A^(1/3) - A^(-1/3))` with `A = (s + sqrt(c^2 (lambda+1)^2 + s^2)) / (c (lambda+1))`.
pub fn bid_fbc(s: f64, c: f64, lambda: f64) -> f64 {
    check_inputs(s, c, lambda);
    let cl = c * (lambda + 1.0);
    let a = (s + cl.hypot(s)) / cl;
    let cube_root = a.cbrt();
    // c (r - 1/r) = c (r^2 - 1) / r, with r^2 - 1 computed without cancellation
    // via A^(2/3) - 1 = (A^2 - 1) / (A^(4/3) + A^(2/3) + 1) and
    // A^2 - 1 = 2 s (s + sqrt(...)) / cl^2 = 2 s A / cl.
    let r2 = cube_root * cube_root;
    let a2_minus_1 = 2.0 * s * a / cl;
    let r2_minus_1 = a2_minus_1 / (r2 * r2 + r2 + 1.0);
    let b = c * r2_minus_1 / cube_root;
    b.max(0.0)
}

/// Closed-form optimal bid for `model.form`.
pub fn optimal_bid(s: f64, model: &WinningFunctionModel, lambda: f64) -> f64 {
    match model.form {
        WinForm::Simple => bid_fbs(s, model.c, lambda),
        WinForm::Complex => bid_fbc(s, model.c, lambda),
    }
}

/// Residual of the first-order optimality condition
/// `(lambda + 1) W(b) = (s - (lambda + 1) b) W'(b)`, signed as the marginal
/// objective `(s - (lambda + 1) b) W'(b) - (lambda + 1) W(b)`: zero at the
/// optimum, negative when overbidding, positive when underbidding.
pub fn check_foc(s: f64, b: f64, model: &WinningFunctionModel, lambda: f64) -> f64 {
    let l1 = lambda + 1.0;
    (s - l1 * b) * model.derivative(b) - l1 * model.win_prob(b)
}
