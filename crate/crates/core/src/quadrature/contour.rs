//! Bromwich-line integrals `∫₀^∞ Re f(σ - iξ) dξ` with a Gaussian envelope.
//!
//! For real-analytic `f` (`f(z̄) = f(z)̄`) the integrand is even in `ξ` and
//! analytic in a strip, so the trapezoid rule converges geometrically in the
//! step size; we halve until two successive sums agree. Vertical-line
//! integrands of heat kernels cancel heavily when `t` is small (the result
//! can be `e^{-r²/4t}` while the integrand peaks at `e^{σ²/4t}`), so
//! [`contour_integral`] measures the cancellation in double precision and
//! reruns in multiprecision when double cannot meet the tolerance.

use super::mp::{Cplx, Mp, MpScope, Real};
use super::QuadResult;
use crate::error::{Error, Result};
use crate::special::log_inv_tol;

/// Abscissa and truncation of a Bromwich-line integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub sigma: f64,
    pub xi_max: f64,
    pub tol: f64,
    /// Time scale `t` of the `e^{-ξ²/4t}` envelope, when known; used for the tail bound.
    pub envelope_t: Option<f64>,
}

impl ContourSpec {
    pub fn new(sigma: f64, xi_max: f64, tol: f64) -> Result<Self> {
        if !(xi_max > 0.0 && tol > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!(
                "bad contour: sigma {sigma}, xi_max {xi_max}, tol {tol}"
            )));
        }
        Ok(Self { sigma, xi_max, tol, envelope_t: None })
    }

    /// Truncation where `e^{(σ²-ξ²)/4t}` has fallen below `tol` times its peak.
    pub fn for_gaussian(sigma: f64, t: f64, tol: f64) -> Self {
        Self { sigma, xi_max: gaussian_cutoff(sigma, t, tol), tol, envelope_t: Some(t) }
    }
}

fn gaussian_cutoff(sigma: f64, t: f64, rel: f64) -> f64 {
    (sigma * sigma + 4.0 * t * (log_inv_tol(rel) + 4.0)).sqrt() + 2.0 * t.sqrt()
}

/// What it took to evaluate a contour integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourStats {
    /// Working precision in bits (53 for plain double precision).
    pub bits: usize,
    /// `∫|integrand| / |∫ integrand|`.
    pub cancellation: f64,
}

/// An integrand along `σ - iξ`, evaluable in any [`Real`] precision.
pub trait ContourIntegrand: Sync {
    /// `Re f(σ - iξ)`.
    fn re_at<T: Real>(&self, xi: &T) -> T;
    fn sigma(&self) -> f64;
    /// Distance from the real `ξ` axis to the nearest singularity of the integrand.
    fn strip_width(&self) -> f64;
}

#[derive(Clone, Debug)]
pub(crate) struct TrapOutcome {
    pub value: f64,
    pub diff: f64,
    pub l1: f64,
    pub tail: f64,
    pub n_evals: usize,
    pub converged: bool,
    pub finite: bool,
}

/// Trapezoid rule for `∫₀^X g`, halving `h` until successive sums agree to `rel_tol`.
///
/// Nodes are formed in `T` so multiprecision runs see exact abscissae.
pub(crate) fn trapezoid_even<T: Real>(
    g: impl Fn(&T) -> T,
    xi_max: f64,
    h0: f64,
    rel_tol: f64,
    envelope_t: Option<f64>,
    max_points: usize,
) -> TrapOutcome {
    let n0 = ((xi_max / h0).ceil() as usize).max(4);
    let mut h = xi_max / n0 as f64;
    let mut n = n0;
    let node = |k: usize, h: f64| T::from_f64(h).mul(&T::from_f64(k as f64));

    let g0 = g(&T::from_f64(0.0));
    let g_end = g(&T::from_f64(xi_max));
    let end_mag = g_end.to_f64().abs();
    let mut sum = g0.add(&g_end).mul_f64(0.5);
    let mut abs_sum = 0.5 * (g0.to_f64().abs() + end_mag);
    let mut finite = g0.to_f64().is_finite() && end_mag.is_finite();
    for k in 1..n {
        let v = g(&node(k, h));
        let f = v.to_f64();
        finite &= f.is_finite();
        abs_sum += f.abs();
        sum = sum.add(&v);
    }
    let mut evals = n + 1;
    let mut prev = sum.mul_f64(h).to_f64();
    let mut diff = f64::INFINITY;
    let mut converged = false;
    while finite && 2 * n <= max_points {
        h *= 0.5;
        for k in (1..2 * n).step_by(2) {
            let v = g(&node(k, h));
            let f = v.to_f64();
            finite &= f.is_finite();
            abs_sum += f.abs();
            sum = sum.add(&v);
        }
        evals += n;
        n *= 2;
        let cur = sum.mul_f64(h).to_f64();
        diff = (cur - prev).abs();
        prev = cur;
        let l1 = abs_sum * h;
        if diff <= rel_tol * cur.abs() || diff <= 16.0 * T::epsilon() * l1 {
            converged = true;
            break;
        }
    }
    let tail = match envelope_t {
        Some(t) => end_mag * 2.0 * t / xi_max,
        None => end_mag * h,
    };
    TrapOutcome { value: prev, diff, l1: abs_sum * h, tail, n_evals: evals, converged, finite }
}

/// `∫₀^{xi_max} Re f(σ - iξ) dξ` in double precision.
pub fn integrate_contour(
    f: impl Fn(Cplx<f64>) -> Cplx<f64>,
    spec: &ContourSpec,
) -> Result<QuadResult> {
    let sigma = spec.sigma;
    let h0 = (spec.xi_max / 16.0).min(spec.envelope_t.map_or(f64::INFINITY, |t| t.sqrt()));
    let out = trapezoid_even(
        |xi: &f64| f(Cplx::new(sigma, -xi)).re,
        spec.xi_max,
        h0,
        spec.tol,
        spec.envelope_t,
        1 << 20,
    );
    if !out.finite {
        return Err(Error::Contour(format!("integrand not finite on Re y = {sigma}")));
    }
    let err = out.diff + out.tail + 64.0 * f64::EPSILON * out.l1;
    if !out.converged {
        return Err(Error::Convergence {
            reason: "trapezoid halving did not settle".into(),
            best: out.value,
            err,
        });
    }
    Ok(QuadResult { value: out.value, err_estimate: err, n_evals: out.n_evals })
}

const MAX_BITS: usize = 4096;

/// `∫₀^∞ Re f(σ - iξ) dξ` for a Gaussian envelope of time `t`, to relative `tol`,
/// escalating to multiprecision when double precision is cancellation-limited.
pub(crate) fn contour_integral<I: ContourIntegrand>(
    ig: &I,
    t: f64,
    tol: f64,
) -> Result<(QuadResult, ContourStats)> {
    let tol = tol.max(1e-15);
    let sigma = ig.sigma();
    let h0 = (0.5 * ig.strip_width()).min(t.sqrt()).max(1e-3);
    let x0 = gaussian_cutoff(sigma, t, tol);
    let out = trapezoid_even(|xi: &f64| ig.re_at(xi), x0, h0.min(x0 / 8.0), tol, Some(t), 1 << 18);
    if !out.finite {
        return Err(Error::Contour(format!("integrand not finite on Re y = {sigma}")));
    }
    let roundoff = |eps: f64, l1: f64| 64.0 * eps * l1;
    let cancellation = |o: &TrapOutcome, eps: f64| {
        // a value buried in roundoff only bounds the cancellation from below
        let floor = roundoff(eps, o.l1);
        o.l1 / o.value.abs().max(floor).max(f64::MIN_POSITIVE)
    };
    let eps64 = f64::EPSILON / 2.0;
    if out.converged && roundoff(eps64, out.l1) <= tol * out.value.abs() {
        let err = out.diff + out.tail + roundoff(eps64, out.l1);
        return Ok((
            QuadResult { value: out.value, err_estimate: err, n_evals: out.n_evals },
            ContourStats { bits: 53, cancellation: cancellation(&out, eps64) },
        ));
    }
    let mut cond = cancellation(&out, eps64);
    let mut bits = 53usize;
    let mut evals = out.n_evals;
    let mut last = out;
    while bits < MAX_BITS {
        let want = (cond.log2() + log_inv_tol(tol) / std::f64::consts::LN_2 + 16.0).ceil() as usize;
        bits = want.max(bits + 64).min(MAX_BITS);
        let _scope = MpScope::new(bits);
        let x = gaussian_cutoff(sigma, t, tol / cond.max(1.0));
        let o = trapezoid_even(|xi: &Mp| ig.re_at(xi), x, h0.min(x / 8.0), tol, Some(t), 1 << 15);
        evals += o.n_evals;
        if !o.finite {
            return Err(Error::Contour(format!("integrand not finite on Re y = {sigma}")));
        }
        let eps = Mp::epsilon();
        let achieved = cancellation(&o, eps);
        if o.converged && roundoff(eps, o.l1) <= tol * o.value.abs() {
            let err = o.diff + o.tail + roundoff(eps, o.l1);
            return Ok((
                QuadResult { value: o.value, err_estimate: err, n_evals: evals },
                ContourStats { bits: MpScope::bits(), cancellation: achieved },
            ));
        }
        cond = achieved.max(cond * 2.0);
        last = o;
    }
    Err(Error::Convergence {
        reason: format!("contour integral still cancellation-limited at {MAX_BITS} bits"),
        best: last.value,
        err: last.diff + last.tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrand() {
        let spec = ContourSpec::new(0.0, 3.0, 1e-12).unwrap();
        let r = integrate_contour(|_| Cplx::from_f64(1.0, 0.0), &spec).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_on_imaginary_axis() {
        let t = 1.0;
        let spec = ContourSpec::for_gaussian(0.0, t, 1e-12);
        let r = integrate_contour(|y| y.mul(&y).scale(&(1.0 / (4.0 * t))).exp(), &spec).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn tail_bound_is_honored() {
        let t = 0.7;
        let f = |y: Cplx<f64>| {
            let z = y.mul(&y);
            z.scale(&(1.0 / (4.0 * t))).exp().mul(&z.add(&Cplx::from_f64(2.0, 0.0)).recip())
        };
        let mut spec = ContourSpec::for_gaussian(0.8, t, 1e-6);
        let a = integrate_contour(f, &spec).unwrap();
        spec.xi_max *= 1.5;
        let b = integrate_contour(f, &spec).unwrap();
        assert!((a.value - b.value).abs() < a.err_estimate);
    }

    struct Shifted {
        sigma: f64,
        t: f64,
        r: f64,
    }

    impl ContourIntegrand for Shifted {
        fn re_at<T: Real>(&self, xi: &T) -> T {
            // e^{y²/4t} y / (r² + y²), y = σ - iξ: inverse transform of a simple pole pair
            let y = Cplx::new(T::from_f64(self.sigma), xi.neg());
            let y2 = y.mul(&y);
            let e = y2.scale(&T::from_f64(1.0 / (4.0 * self.t))).exp();
            let d = y2.add(&Cplx::from_f64(self.r * self.r, 0.0));
            e.mul(&y).div(&d).re
        }
        fn sigma(&self) -> f64 {
            self.sigma
        }
        fn strip_width(&self) -> f64 {
            self.sigma
        }
    }

    /// `(1/π)∫₀^∞ Re[e^{y²/4t} y/(r²+y²)] dξ` is `e^{-r²/4t}/2`: the `n = 1` Euclidean
    /// kernel times `√(4πt)/2`. Small `t` forces the multiprecision path.
    #[test]
    fn escalates_when_cancellation_is_severe() {
        for &(t, r) in &[(1.0, 1.0), (0.1, 3.0)] {
            let ig = Shifted { sigma: 1.5, t, r };
            let (q, stats) = contour_integral(&ig, t, 1e-10).unwrap();
            let expect = PI * 0.5 * (-r * r / (4.0 * t)).exp();
            assert!(((q.value - expect) / expect).abs() < 1e-9, "t={t}: {} vs {expect}", q.value);
            if t < 0.5 {
                assert!(stats.bits > 53);
                assert!(stats.cancellation > 1e8);
            } else {
                assert_eq!(stats.bits, 53);
            }
        }
    }
}
