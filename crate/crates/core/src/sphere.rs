//! Heat and Poisson kernels on the unit sphere `Sⁿ`, as functions of the
//! geodesic angle `φ ∈ [0, π]`.
//!
//! The heat kernels here are those of `e^{t(Δ - (n-1)²/4)}`, so their mass is
//! `e^{-(n-1)²t/4}`; multiply by `e^{(n-1)²t/4}` for the Markovian kernel.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::euclid::EvenForm;
use crate::geometry::Space;
use crate::jets::Jet;
use crate::kernel::{raised, Evaluation, Warning};
use crate::quadrature::mp::{Cplx, Real};
use crate::quadrature::{contour_integral, integrate_rel, ContourIntegrand, QuadResult};
use crate::special::{gamma_half, log_inv_tol, sphere_volume};

/// Above this time the heat kernels are summed in the dual (eigenfunction) series.
pub const DUAL_SERIES_T: f64 = 10.0;

/// Below this angle the outside-raised even kernel switches to the inside form.
const OUTSIDE_MIN_PHI: f64 = 0.3;

fn check(n: u32, t: f64, phi: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time/height must be positive, got {t}")));
    }
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::domain(format!("angle must lie in [0, π], got {phi}")));
    }
    Ok(())
}

fn theta_bound(t: f64, tol: f64, k: usize) -> f64 {
    2.0 * (t * (log_inv_tol(tol) + 4.0 * k as f64 + 4.0)).sqrt() + 2.0 * PI
}

/// Jet of the wrapped Gaussian `(4πt)^{-1/2} Σ_m e^{-(x+2mπ)²/4t}`.
pub fn theta1_of(t: f64, x: &Jet, tol: f64) -> Jet {
    let bound = theta_bound(t, tol, x.order());
    let c = x.center();
    let m_lo = ((-bound - c) / (2.0 * PI)).floor() as i64;
    let m_hi = ((bound - c) / (2.0 * PI)).ceil() as i64;
    let mut acc = Jet::constant(c, 0.0, x.order());
    for m in m_lo..=m_hi {
        let a = 2.0 * PI * m as f64;
        if (c + a).abs() > bound {
            continue;
        }
        let s = x.add_scalar(a);
        acc = &acc + &(&s * &s).scale(-0.25 / t).exp();
    }
    acc.scale((4.0 * PI * t).powf(-0.5))
}

/// Jet of `(1/2π)(1 + 2 Σ_k e^{-k²t} cos kx)`.
pub fn theta1_dual_of(t: f64, x: &Jet, tol: f64) -> Jet {
    let kmax = ((log_inv_tol(tol) + 8.0 + x.order() as f64) / t).sqrt().ceil() as usize + 1;
    let mut acc = Jet::constant(x.center(), 1.0, x.order());
    for k in 1..=kmax {
        acc = &acc + &x.scale(k as f64).cos().scale(2.0 * (-((k * k) as f64) * t).exp());
    }
    acc.scale(1.0 / (2.0 * PI))
}

/// `H₁(t, φ)` on the circle; any real `φ` is accepted.
pub fn heat_theta_1(t: f64, phi: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite() && phi.is_finite()) {
        return Err(Error::domain(format!("need t > 0 and finite φ, got t={t}, φ={phi}")));
    }
    let x = Jet::constant(phi, phi, 0);
    Ok(if t > DUAL_SERIES_T { theta1_dual_of(t, &x, tol) } else { theta1_of(t, &x, tol) }.value())
}

pub(crate) fn theta1_jet(t: f64, phi: f64, order: usize, tol: f64) -> Jet {
    let x = Jet::variable(phi, order);
    if t > DUAL_SERIES_T {
        theta1_dual_of(t, &x, tol)
    } else {
        theta1_of(t, &x, tol)
    }
}

/// `2 Σ_m (-1)^m h(ψ+2mπ)/sin(ψ/2)` with `h(x) = x e^{-x²/4t}`, the θ-integrand
/// of the two-dimensional kernel (without the `(4πt)^{-3/2}` factor).
///
/// Pairs `±m` are combined as `e^{-(ψ²+a²)/4t}·2(ψ cosh(aψ/2t) - a sinh(aψ/2t))`
/// so nothing cancels as `ψ → 0`.
pub(crate) fn theta2_integrand(t: f64, psi: &Jet, tol: f64) -> Result<Jet> {
    let bound = theta_bound(t, tol, psi.order());
    let p2 = psi * psi;
    let mut acc = psi * &p2.scale(-0.25 / t).exp();
    let mut m = 1;
    loop {
        let a = 2.0 * PI * m as f64;
        if a - PI > bound {
            break;
        }
        let pair = if (a * psi.value() / (2.0 * t)).abs() < 1.0 {
            let (sh, ch) = psi.scale(a / (2.0 * t)).sinh_cosh();
            (psi * &ch - sh.scale(a)) * p2.add_scalar(a * a).scale(-0.25 / t).exp()
        } else {
            let (lo, hi) = (psi.add_scalar(-a), psi.add_scalar(a));
            let g = |s: &Jet| s * &(s * s).scale(-0.25 / t).exp();
            (g(&lo) + g(&hi)).scale(0.5)
        };
        let sign = if m % 2 == 0 { 2.0 } else { -2.0 };
        acc = &acc + &pair.scale(sign);
        m += 1;
    }
    let s = psi.scale(0.5).sin();
    Ok(acc.arith(&s, crate::jets::JetOp::Div)?.scale(2.0))
}

/// Dual series `Σ_l e^{-t(l+α)²} (2l+n-1)/(n-1) C_l^α(cos φ)/|Sⁿ|`, `α = (n-1)/2`, for `n ≥ 2`.
pub fn heat_spectral(n: u32, t: f64, phi: f64, tol: f64) -> Result<f64> {
    check(n, t, phi)?;
    Ok(heat_spectral_of(n, t, &Jet::constant(phi, phi, 0), tol).value())
}

/// Jet form of [`heat_spectral`]; `n = 1` falls back to the cosine series.
pub fn heat_spectral_of(n: u32, t: f64, phi: &Jet, tol: f64) -> Jet {
    heat_spectral_shifted_of(n, t, phi, 0.0, tol)
}

/// `e^{λt}` times [`heat_spectral_of`], with `λ` folded into each eigenvalue
/// so that large `t` neither overflows nor underflows.
pub fn heat_spectral_shifted_of(n: u32, t: f64, phi: &Jet, shift: f64, tol: f64) -> Jet {
    if n < 2 {
        return theta1_dual_of(t, phi, tol).scale((shift * t).exp());
    }
    let alpha = (n as f64 - 1.0) / 2.0;
    let x = phi.cos();
    let lmax = ((log_inv_tol(tol) + 10.0 + phi.order() as f64) / t).sqrt().ceil() as usize + n as usize + 2;
    let one = Jet::constant(phi.center(), 1.0, phi.order());
    let (mut c_prev, mut c) = (one.scale(0.0), one.clone());
    let mut acc = one.scale(0.0);
    for l in 0..=lmax {
        let lf = l as f64;
        if l == 1 {
            c_prev = one.clone();
            c = x.scale(2.0 * alpha);
        } else if l > 1 {
            let next = ((&x * &c).scale(2.0 * (lf + alpha - 1.0)) - c_prev.scale(lf + 2.0 * alpha - 2.0)).scale(1.0 / lf);
            c_prev = std::mem::replace(&mut c, next);
        }
        let rate = (lf + alpha).powi(2) - shift;
        acc = &acc + &c.scale((-t * rate).exp() * (2.0 * lf + 2.0 * alpha) / (2.0 * alpha));
    }
    acc.scale(1.0 / sphere_volume(n))
}

fn spectral_eval(n: u32, t: f64, phi: f64, tol: f64) -> Result<Evaluation> {
    spectral_eval_shifted(n, t, phi, 0.0, tol)
}

pub(crate) fn spectral_eval_shifted(n: u32, t: f64, phi: f64, shift: f64, tol: f64) -> Result<Evaluation> {
    check(n, t, phi)?;
    let v = heat_spectral_shifted_of(n, t, &Jet::constant(phi, phi, 0), shift, tol).value();
    Ok(Evaluation::closed(v).with_warning(Warning::DualSeries {
        detail: format!("t = {t} > {DUAL_SERIES_T}: eigenfunction series"),
    }))
}

/// `ψ(θ)` with `cos(ψ/2) = cos(φ/2) cos θ`, as a jet in `φ`.
fn psi_of(phi: &Jet, theta: f64) -> Result<Jet> {
    phi.scale(0.5).cos().scale(theta.cos()).acos().map(|j| j.scale(2.0))
}

/// The two-dimensional kernel.
///
/// The defining integral over `ψ ∈ [φ, π]` has an inverse square-root singularity
/// at `ψ = φ`; with `cos(ψ/2) = cos(φ/2) cos θ` it becomes
/// `(4πt)^{-3/2} ∫₀^{π/2} 2 Σ_m (-1)^m h(ψ+2mπ)/sin(ψ/2) dθ`, which also covers
/// `φ = π` without a limit. Large `t` uses [`heat_spectral`].
pub fn heat_theta_2(t: f64, phi: f64, tol: f64) -> Result<QuadResult> {
    check(2, t, phi)?;
    if t > DUAL_SERIES_T {
        let v = heat_spectral(2, t, phi, tol)?;
        return Ok(QuadResult { value: v, err_estimate: 4.0 * f64::EPSILON * v.abs(), n_evals: 1 });
    }
    let x = Jet::constant(phi, phi, 0);
    let q = integrate_rel(|th| Ok(theta2_integrand(t, &psi_of(&x, th)?, tol)?.value()), 0.0, PI / 2.0, tol)?;
    Ok(q.scaled((4.0 * PI * t).powf(-1.5)))
}

pub(crate) fn theta2_jet(t: f64, phi: f64, order: usize, tol: f64) -> Result<QuadResult<Jet>> {
    let x = Jet::variable(phi, order);
    let q = integrate_rel(|th| theta2_integrand(t, &psi_of(&x, th)?, tol), 0.0, PI / 2.0, tol)?;
    Ok(q.map(|j| j.scale((4.0 * PI * t).powf(-1.5))))
}

/// `D^k` of the two-dimensional kernel with `D` moved inside the θ-integral.
///
/// With `w = cos²(φ/2)`, `D = (4π)^{-1} d/dw` and the kernel is
/// `∫ G(w cos²θ) dθ`; on the integrand the `w`-derivative turns back into `D`
/// acting in `ψ`, so `H_{2+2k} = (4πt)^{-3/2} ∫₀^{π/2} cos^{2k}θ (D^k G̃)(ψ) dθ`.
fn heat_even_inside(k: usize, t: f64, phi: f64, tol: f64) -> Result<Evaluation> {
    let g = move |psi: f64, order: usize| theta2_integrand(t, &Jet::variable(psi, order), tol);
    let x = Jet::constant(phi, phi, 0);
    let mut worst_rel: f64 = 0.0;
    let q = integrate_rel(
        |th| {
            let psi = psi_of(&x, th)?.value().clamp(0.0, PI);
            let e = raised(Space::Positive, &g, k, psi, 0.0)?;
            worst_rel = worst_rel.max(e.rel_err());
            Ok(th.cos().powi(2 * k as i32) * e.value)
        },
        0.0,
        PI / 2.0,
        tol,
    )?;
    let mut e = Evaluation::from_quad(q.scaled((4.0 * PI * t).powf(-1.5)));
    e.err_estimate += worst_rel * e.value.abs();
    Ok(e)
}

/// `Hₙ` by raising `H₁` (odd `n`) or `H₂` (even `n`) with `D = -(2π sin φ)⁻¹ ∂_φ`.
pub fn heat_raise(n: u32, t: f64, phi: f64, form: EvenForm, tol: f64) -> Result<Evaluation> {
    check(n, t, phi)?;
    if n >= 2 && t > DUAL_SERIES_T {
        return spectral_eval(n, t, phi, tol);
    }
    if n % 2 == 1 {
        let k = ((n - 1) / 2) as usize;
        let g = move |s: f64, order: usize| Ok(theta1_jet(t, s, order, tol));
        return raised(Space::Positive, &g, k, phi, 0.0);
    }
    let k = ((n - 2) / 2) as usize;
    if form == EvenForm::RaiseInside || phi < OUTSIDE_MIN_PHI {
        return heat_even_inside(k, t, phi, tol);
    }
    let evals = std::cell::Cell::new(0);
    let g = |s: f64, order: usize| {
        let q = theta2_jet(t, s, order, tol)?;
        evals.set(evals.get() + q.n_evals);
        Ok(q.value)
    };
    let mut e = raised(Space::Positive, &g, k, phi, tol)?;
    e.n_evals = evals.get();
    Ok(e)
}

/// `Γ((n+1)/2) π^{-(n+1)/2} sinh y / (2cosh y - 2c)^{(n+1)/2}` with `c = cos φ`.
fn poisson_cos(n: u32, y: f64, c: f64) -> f64 {
    let m = (n + 1) as f64 / 2.0;
    gamma_half(n + 1) / PI.powf(m) * y.sinh() / (2.0 * y.cosh() - 2.0 * c).powf(m)
}

pub fn poisson_closed(n: u32, y: f64, phi: f64) -> f64 {
    poisson_cos(n, y, phi.cos())
}

/// Jet of `Pₙ(y, ·)` composed with the angle jet `x`.
pub fn poisson_of(n: u32, y: f64, x: &Jet) -> Result<Jet> {
    let m = (n + 1) as f64 / 2.0;
    let d = x.cos().scale(-2.0).add_scalar(2.0 * y.cosh());
    Ok(d.powf(-m)?.scale(gamma_half(n + 1) / PI.powf(m) * y.sinh()))
}

/// Which form of the doubling identity to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Doubling {
    /// Integral over `v ∈ [-1, 1]` with `P_{2n+1}(y/2, arccos(v cos(φ/2)))`.
    V,
    /// Integral over `ψ ∈ [φ, 2π-φ]` after `v = cos(ψ/2)/cos(φ/2)`.
    Psi,
}

fn doubling_const(n: u32) -> f64 {
    PI.powf((n + 1) as f64 / 2.0) / (2f64.powi(n as i32 - 1) * gamma_half(n + 1))
}

/// `Pₙ(y, φ)` from `P_{2n+1}(y/2, ·)` through the doubling identity.
///
/// In the ψ form the weight is `(1 - cos²(ψ/2)/cos²(φ/2))^{(n-1)/2}`, which is what
/// the substitution produces; it needs `φ < π`.
pub fn poisson_doubling(n: u32, y: f64, phi: f64, form: Doubling, tol: f64) -> Result<QuadResult> {
    check(n, y, phi)?;
    let cn = doubling_const(n);
    let ch = (y / 2.0).cosh();
    let p = (n - 1) as i32;
    match form {
        Doubling::V => {
            // v = -cos α removes the endpoint behaviour of (1-v²)^{(n-1)/2}
            let c = (phi / 2.0).cos();
            let q = integrate_rel(
                |a: f64| {
                    let v = -a.cos();
                    Ok(poisson_cos(2 * n + 1, y / 2.0, v * c) * a.sin().powi(p + 1))
                },
                0.0,
                PI,
                tol,
            )?;
            Ok(q.scaled(cn * ch))
        }
        Doubling::Psi => {
            let c = (phi / 2.0).cos();
            if c < 1e-8 {
                return Err(Error::domain("the ψ form of the doubling identity needs φ < π"));
            }
            let half = PI - phi;
            let q = integrate_rel(
                |a: f64| {
                    let psi = PI - half * a.cos();
                    let ratio = (psi / 2.0).cos() / c;
                    let w = (1.0 - ratio * ratio).max(0.0);
                    let jac = half * a.sin();
                    Ok(w.powf(p as f64 / 2.0) * poisson_closed(2 * n + 1, y / 2.0, psi / 2.0) * (psi / 2.0).sin() * jac)
                },
                0.0,
                PI,
                tol,
            )?;
            Ok(q.scaled(cn / 2.0 * ch / c))
        }
    }
}

/// `Pₙ` by raising the closed forms `P₁` or `P₂`.
pub fn poisson_raise(n: u32, y: f64, phi: f64) -> Result<Evaluation> {
    check(n, y, phi)?;
    let base = if n % 2 == 1 { 1 } else { 2 };
    let k = ((n - base) / 2) as usize;
    let g = move |s: f64, order: usize| poisson_of(base, y, &Jet::variable(s, order));
    raised(Space::Positive, &g, k, phi, 0.0)
}

/// Default abscissa for [`heat_gruet`].
pub fn default_sigma(phi: f64) -> f64 {
    0.5 * phi.max(1.0)
}

struct GruetIntegrand {
    n: u32,
    t: f64,
    cos_phi: f64,
    sigma: f64,
}

impl ContourIntegrand for GruetIntegrand {
    fn re_at<T: Real>(&self, xi: &T) -> T {
        let y = Cplx::new(T::from_f64(self.sigma), xi.neg());
        let e = y.mul(&y).scale(&T::from_f64(0.25 / self.t)).exp();
        let d = y.cosh().sub(&Cplx::from_f64(self.cos_phi, 0.0));
        let mut v = e.mul(&y.sinh()).mul(&d.inv_pow_half(self.n + 1));
        // the principal root of d flips sign each time d crosses the negative axis
        if self.n % 2 == 0 && (xi.to_f64() / (2.0 * PI)).round() as i64 % 2 != 0 {
            v = v.scale(&T::from_f64(-1.0));
        }
        v.re
    }

    fn sigma(&self) -> f64 {
        self.sigma
    }

    fn strip_width(&self) -> f64 {
        self.sigma
    }
}

/// Contour form
/// `Hₙ = 2Γ((n+1)/2)/(2^{(n+1)/2} π^{n/2+1} √(4t)) ∫₀^∞ Re[e^{y²/4t} sinh y (cosh y - cos φ)^{-(n+1)/2}] dξ`,
/// `y = σ - iξ`, with the root continued along the line.
pub fn heat_gruet(n: u32, t: f64, phi: f64, sigma: Option<f64>, tol: f64) -> Result<Evaluation> {
    check(n, t, phi)?;
    let sigma = sigma.unwrap_or_else(|| default_sigma(phi));
    if !(sigma > 0.0) {
        return Err(Error::Contour(format!("sigma = {sigma} must be positive")));
    }
    let ig = GruetIntegrand { n, t, cos_phi: phi.cos(), sigma };
    let (q, stats) = contour_integral(&ig, t, tol)?;
    let pre = 2.0 * gamma_half(n + 1)
        / (2f64.powf((n + 1) as f64 / 2.0) * PI.powf(n as f64 / 2.0 + 1.0) * (4.0 * t).sqrt());
    Ok(Evaluation::from_contour(q, stats).scaled(pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclid;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn mass(n: u32, f: impl Fn(f64) -> f64) -> f64 {
        let omega = crate::geometry::sphere_surface_coeff(n).unwrap();
        integrate_rel(|p: f64| Ok(f(p) * omega * p.sin().powi(n as i32 - 1)), 0.0, PI, 1e-12)
            .unwrap()
            .value
    }

    #[test]
    fn theta1_mass_is_one() {
        for &t in &[0.1, 1.0, 10.0, 30.0] {
            let q = integrate_rel(|p| Ok(heat_theta_1(t, p, 1e-14).unwrap()), 0.0, 2.0 * PI, 1e-13).unwrap();
            assert!((q.value - 1.0).abs() < 1e-11, "t={t}: {}", q.value);
        }
    }

    #[test]
    fn theta1_limits() {
        let r = heat_theta_1(1e-3, 1.0, 1e-14).unwrap() / euclid::heat_closed(1, 1e-3, 1.0);
        assert!((r - 1.0).abs() < 1e-12);
        assert!((heat_theta_1(50.0, 2.0, 1e-14).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-8);
        // both series agree where they overlap
        let a = theta1_of(DUAL_SERIES_T, &Jet::constant(1.3, 1.3, 0), 1e-14).value();
        let b = theta1_dual_of(DUAL_SERIES_T, &Jet::constant(1.3, 1.3, 0), 1e-14).value();
        assert!(rel(a, b) < 1e-13);
    }

    #[test]
    fn theta1_reflection() {
        for &t in &[0.05, 0.7, 3.0, 20.0] {
            for &p in &[0.0, 0.4, 2.5, 3.1] {
                let a = heat_theta_1(t, p, 1e-14).unwrap();
                let b = heat_theta_1(t, 2.0 * PI - p, 1e-14).unwrap();
                assert!(rel(a, b) < 1e-14);
            }
        }
    }

    #[test]
    fn theta2_mass_and_limits() {
        let m = mass(2, |p| heat_theta_2(1.0, p, 1e-12).unwrap().value);
        assert!(rel(m, (-0.25f64).exp()) < 1e-9, "{m}");
        // small time: Euclidean kernel times the Van Vleck factor √(φ/sin φ)
        let t = 0.01;
        let vv = (0.5 / 0.5f64.sin()).sqrt();
        let r = heat_theta_2(t, 0.5, 1e-12).unwrap().value / (euclid::heat_closed(2, t, 0.5) * vv);
        assert!((r - 1.0).abs() < 1e-3, "{r}");
        for &(t, p) in &[(0.05, 0.1), (0.3, 3.0), (2.0, PI), (5.0, 0.0)] {
            assert!(heat_theta_2(t, p, 1e-10).unwrap().value > 0.0);
        }
    }

    #[test]
    fn theta2_matches_spectral() {
        for &(t, p) in &[(0.5, 0.3), (1.0, 2.0), (3.0, PI), (8.0, 0.0)] {
            let a = heat_theta_2(t, p, 1e-12).unwrap().value;
            let b = heat_spectral(2, t, p, 1e-14).unwrap();
            assert!(rel(a, b) < 1e-10, "t={t} φ={p}: {a} vs {b}");
        }
    }

    #[test]
    fn raise_matches_spectral() {
        for n in 1..=5 {
            for &(t, p) in &[(0.5, 1.0), (1.5, 0.2), (0.8, 2.9), (2.0, 0.0), (1.0, PI)] {
                let b = heat_spectral(n, t, p, 1e-14).unwrap();
                for form in [EvenForm::RaiseOutside, EvenForm::RaiseInside] {
                    let a = heat_raise(n, t, p, form, 1e-11).unwrap();
                    // the wrapped sum cancels down to the mass e^{-(n-1)²t/4}
                    let cancel = ((n as f64 - 1.0).powi(2) * t / 4.0).exp();
                    let tol = if p == 0.0 || p == PI { 1e-8 } else { 1e-10 } * cancel;
                    assert!(rel(a.value, b) < tol, "n={n} t={t} φ={p} {form:?}: {} vs {b}", a.value);
                }
            }
        }
    }

    #[test]
    fn raise_examples() {
        // one application by hand: D H₁ = Σ (φ+2mπ) e^{-(φ+2mπ)²/4t} / (2π sin φ · 2t √(4πt))
        let (t, p) = (1.0, 1.0);
        let by_hand: f64 = (-3..=3)
            .map(|m| {
                let x = p + 2.0 * PI * m as f64;
                x * (-x * x / (4.0 * t)).exp()
            })
            .sum::<f64>()
            / (2.0 * PI * p.sin() * 2.0 * t * (4.0 * PI * t).sqrt());
        let v = heat_raise(3, t, p, EvenForm::default(), 1e-12).unwrap();
        assert!(rel(v.value, by_hand) < 1e-13);
        assert_eq!(heat_raise(1, 0.4, 1.1, EvenForm::default(), 1e-12).unwrap().value, heat_theta_1(0.4, 1.1, 1e-12).unwrap());
        let m = mass(3, |p| heat_raise(3, 0.5, p, EvenForm::default(), 1e-12).unwrap().value);
        assert!(rel(m, (-0.5f64).exp()) < 1e-9, "{m}");
    }

    #[test]
    fn poisson_examples() {
        let q = integrate_rel(|p| Ok(poisson_closed(1, 1.0, p)), 0.0, 2.0 * PI, 1e-13).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
        assert!((poisson_closed(1, 40.0, 1.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let want = gamma_half(3) / PI.powf(1.5) * 1f64.sinh() / (2.0 * 1f64.cosh() - 2.0).powf(1.5);
        assert!(rel(poisson_closed(2, 1.0, 0.0), want) < 1e-15);
    }

    #[test]
    fn poisson_doubling_examples() {
        let a = poisson_doubling(1, 1.0, 1.0, Doubling::V, 1e-12).unwrap();
        assert!(rel(a.value, poisson_closed(1, 1.0, 1.0)) < 1e-10);
        let b = poisson_doubling(2, 0.5, 2.0, Doubling::Psi, 1e-12).unwrap();
        assert!(rel(b.value, poisson_closed(2, 0.5, 2.0)) < 1e-10);
        let u = poisson_doubling(1, 2.0, 0.3, Doubling::V, 1e-12).unwrap();
        let w = poisson_doubling(1, 2.0, 0.3, Doubling::Psi, 1e-12).unwrap();
        assert!((u.value - w.value).abs() <= u.err_estimate + w.err_estimate + 1e-15 * u.value);
        for n in 1..=3 {
            for &(y, p) in &[(0.3, 0.0), (1.0, 2.5), (2.0, 3.1)] {
                for form in [Doubling::V, Doubling::Psi] {
                    let v = poisson_doubling(n, y, p, form, 1e-12).unwrap().value;
                    assert!(rel(v, poisson_closed(n, y, p)) < 1e-10, "n={n} y={y} φ={p} {form:?}");
                }
            }
        }
    }

    #[test]
    fn poisson_raise_examples() {
        assert!(rel(poisson_raise(3, 1.0, 1.0).unwrap().value, poisson_closed(3, 1.0, 1.0)) < 1e-13);
        assert!(rel(poisson_raise(5, 0.7, 2.0).unwrap().value, poisson_closed(5, 0.7, 2.0)) < 1e-12);
        assert!(rel(poisson_raise(4, 0.7, 0.0).unwrap().value, poisson_closed(4, 0.7, 0.0)) < 1e-9);
        assert!(rel(poisson_raise(2, 0.9, 1.2).unwrap().value, poisson_closed(2, 0.9, 1.2)) < 1e-15);
    }

    #[test]
    fn gruet_examples() {
        let v = heat_gruet(1, 1.0, 1.0, Some(1.0), 1e-11).unwrap();
        assert!(rel(v.value, heat_theta_1(1.0, 1.0, 1e-14).unwrap()) < 1e-9);
        let v = heat_gruet(3, 0.5, 1.5, Some(1.0), 1e-11).unwrap();
        let r = heat_raise(3, 0.5, 1.5, EvenForm::default(), 1e-12).unwrap();
        assert!(rel(v.value, r.value) < 1e-9);
        for n in 1..=4 {
            for &p in &[0.2, 1.4, 2.9] {
                let v = heat_gruet(n, 0.7, p, None, 1e-11).unwrap();
                let b = heat_spectral(n, 0.7, p, 1e-14).unwrap();
                assert!(rel(v.value, b) < 1e-8, "n={n} φ={p}: {} vs {b}", v.value);
            }
        }
    }

    #[test]
    fn gruet_sigma_independence() {
        let a = heat_gruet(2, 1.0, 1.0, Some(0.8), 1e-11).unwrap();
        let b = heat_gruet(2, 1.0, 1.0, Some(1.6), 1e-11).unwrap();
        assert!((a.value - b.value).abs() <= a.err_estimate + b.err_estimate + 1e-14 * a.value);
    }
}
