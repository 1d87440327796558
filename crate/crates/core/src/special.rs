//! Small special-function helpers shared by the kernel modules.

use std::f64::consts::PI;

/// `Γ(m/2)` for a positive integer `m`, by the half-integer recurrence.
pub fn gamma_half(m: u32) -> f64 {
    assert!(m > 0, "gamma_half needs m >= 1");
    let mut g = if m % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut k = if m % 2 == 0 { 2 } else { 1 };
    while k < m {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

/// Volume of the unit `n`-sphere `S^n`, i.e. `2π^{(n+1)/2}/Γ((n+1)/2)`.
pub fn sphere_volume(n: u32) -> f64 {
    2.0 * PI.powf((n as f64 + 1.0) / 2.0) / gamma_half(n + 1)
}

/// `ln(1/tol)` with a floor, the usual exponent budget for Gaussian truncation.
pub(crate) fn log_inv_tol(tol: f64) -> f64 {
    (1.0 / tol.max(1e-300)).ln().max(1.0)
}
