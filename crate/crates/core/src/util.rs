//! Small shared helpers: deterministic number formatting and tolerance checks.

/// Formats a float with 17 significant digits in scientific notation, enough
/// to round-trip any f64 exactly.  Negative zero is normalized to zero so
/// that output files are byte-stable across algebraically equivalent runs.
pub fn float17(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

/// Mixed absolute/relative closeness test used throughout the test suites:
/// `|a - b| <= atol + rtol * max(|a|, |b|)`.
pub fn close(a: f64, b: f64, atol: f64, rtol: f64) -> bool {
    (a - b).abs() <= atol + rtol * a.abs().max(b.abs())
}

/// Default closeness: absolute 1e-12, relative 1e-10.
pub fn close_default(a: f64, b: f64) -> bool {
    close(a, b, 1e-12, 1e-10)
}
