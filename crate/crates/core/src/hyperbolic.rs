//! Overflow- and cancellation-safe hyperbolic building blocks.

/// Below this magnitude `sinh(x)/x` switches to its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// `ln sinh(x)` for `x > 0`, finite for arbitrarily large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // sinh x = e^x (1 - e^{-2x}) / 2
    x + (-(-2.0 * x).exp_m1()).ln() - std::f64::consts::LN_2
}

/// `coth(x)` for `x > 0`.
pub fn coth(x: f64) -> f64 {
    let e = (-2.0 * x).exp();
    (1.0 + e) / -(-2.0 * x).exp_m1()
}

/// `1 / sinh(x)` for `x > 0`; underflows gracefully to 0.
pub fn csch(x: f64) -> f64 {
    2.0 * (-x).exp() / -(-2.0 * x).exp_m1()
}

/// `sinh(x) / x`, equal to 1 at the origin.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// `sinh(a) / (sinh(b) sinh(c))` for positive `a, b, c`.
pub fn sinh_quotient(a: f64, b: f64, c: f64) -> f64 {
    if a.max(b).max(c) < 300.0 {
        a.sinh() / (b.sinh() * c.sinh())
    } else {
        (ln_sinh(a) - ln_sinh(b) - ln_sinh(c)).exp()
    }
}
