//! Quadrature: adaptive Gauss–Kronrod on finite intervals, square-root
//! endpoint singularities, mapped half-lines, and trapezoidal contour
//! integrals with optional multiprecision.

mod contour;
mod gk;
pub mod mp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::Jet;

pub use contour::{integrate_contour, ContourIntegrand, ContourSpec, ContourStats};
pub(crate) use contour::contour_integral;
pub use gk::{adaptive, AdaptiveOpts, MAX_DEPTH};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult<V = f64> {
    pub value: V,
    pub err_estimate: f64,
    pub n_evals: usize,
}

impl<V> QuadResult<V> {
    pub fn map<W>(self, f: impl FnOnce(V) -> W) -> QuadResult<W> {
        QuadResult { value: f(self.value), err_estimate: self.err_estimate, n_evals: self.n_evals }
    }
}

impl QuadResult<f64> {
    pub fn scaled(self, c: f64) -> Self {
        QuadResult { value: self.value * c, err_estimate: self.err_estimate * c.abs(), n_evals: self.n_evals }
    }
}

/// Values that adaptive quadrature can accumulate.
pub trait QuadValue: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Jet {
    fn zero_like(&self) -> Self {
        Jet::constant(self.center(), 0.0, self.order())
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self = &*self + &other.scale(w);
    }
    fn norm(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, c| m.max(c.abs()))
    }
    fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a < b) {
        return Err(Error::domain(format!("need a < b, got [{a}, {b}]")));
    }
    Ok(())
}

/// `∫_a^b f`, accurate to about `max(tol·|value|, tol)`.
pub fn integrate_adaptive(f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    check_interval(a, b)?;
    let mut f = f;
    adaptive(|x| Ok(f(x)), a, b, AdaptiveOpts::relative(tol).with_abs(tol))
}

/// Absolute accuracy below which results near underflow are accepted as they are.
const UNDERFLOW_FLOOR: f64 = 1e-280;

/// Relative-tolerance variant used by the kernel code, where values can be tiny.
pub(crate) fn integrate_rel<V: QuadValue>(
    f: impl FnMut(f64) -> Result<V>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult<V>> {
    check_interval(a, b)?;
    adaptive(f, a, b, AdaptiveOpts::relative(tol).with_abs(UNDERFLOW_FLOOR))
}

/// `∫_a^b f(x) (x-a)^{-1/2} dx` via `x = a + u²`.
pub fn integrate_sqrt_endpoint(
    f_regular: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult> {
    check_interval(a, b)?;
    let ub = (b - a).sqrt();
    adaptive(|u| Ok(2.0 * f_regular(a + u * u)), 0.0, ub, AdaptiveOpts::relative(tol).with_abs(tol))
}

/// `∫_a^∞ f` through `x = a + u/(1-u)`; `f` must decay at least like `x^{-1-δ}`.
pub fn integrate_semi_infinite(f: impl Fn(f64) -> f64, a: f64, tol: f64) -> Result<QuadResult> {
    semi_infinite_rel(|x| Ok(f(x)), a, tol, tol)
}

pub(crate) fn semi_infinite_rel<V: QuadValue>(
    f: impl Fn(f64) -> Result<V>,
    a: f64,
    tol: f64,
    abs: f64,
) -> Result<QuadResult<V>> {
    adaptive(
        |u| {
            let d = 1.0 - u;
            let v = f(a + u / d)?;
            let mut out = v.zero_like();
            out.add_scaled(&v, 1.0 / (d * d));
            Ok(out)
        },
        0.0,
        1.0,
        AdaptiveOpts::relative(tol).with_abs(abs.max(UNDERFLOW_FLOOR)),
    )
}
