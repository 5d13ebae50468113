//! Central finite differences with magnitude-scaled steps.

/// cbrt of f64 machine epsilon, the usual central-difference sweet spot.
const CBRT_EPS: f64 = 6.055454452393343e-6;

/// Step size scaled to the magnitude of the expansion point.
pub(crate) fn fd_step(x: f64) -> f64 {
    x.abs().max(1.0) * CBRT_EPS
}

/// Central difference of a scalar function of one variable.
#[cfg(test)]
pub(crate) fn central<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = fd_step(x);
    (f(x + h) - f(x - h)) / (2.0 * h)
}
