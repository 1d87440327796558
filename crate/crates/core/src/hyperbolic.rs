//! Heat and Poisson kernels on hyperbolic space `Hⁿ`, as functions of the
//! geodesic distance `ρ ≥ 0`.
//!
//! The heat kernels here are those of `e^{t(Δ + (n-1)²/4)}` (so `H₃` has mass
//! `e^t`); multiply by `e^{-(n-1)²t/4}` for the Markovian kernel.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::euclid::{self, EvenForm};
use crate::geometry::Space;
use crate::jets::Jet;
use crate::kernel::{raised, Evaluation};
use crate::quadrature::mp::{Cplx, Real};
use crate::quadrature::{contour_integral, integrate_rel, ContourIntegrand, QuadResult};
use crate::special::{gamma_half, log_inv_tol};

/// Below this distance the outside-raised even kernel switches to the inside form.
const OUTSIDE_MIN_RHO: f64 = 0.3;

fn check(n: u32, t: f64, rho: f64) -> Result<()> {
    euclid::check_heat(n, t, rho)
}

fn check_poisson(n: u32, y: f64, rho: f64) -> Result<()> {
    if !(y > 0.0 && y < PI) {
        return Err(Error::domain(format!("hyperbolic Poisson height must lie in (0, π), got {y}")));
    }
    euclid::check_heat(n, y, rho)
}

/// `v/√(sinh(v²/2))`, finite at `v = 0`.
fn abel_weight(v: f64) -> f64 {
    let z = 0.5 * v * v;
    let shc = if z < 1e-8 { 1.0 + z * z / 6.0 } else { z.sinh() / z };
    SQRT_2 / shc.sqrt()
}

/// `∫_ρ^∞ (cosh²(s/2) - cosh²(ρ/2))^{-1/2} F(s) ds` with `s = ρ + v²`, where the
/// caller supplies `F(s)` already multiplied by `sinh s`; the distance enters as the
/// jet `x` so the result is a jet in `ρ`.
fn descend_jet(
    f_sinh: impl Fn(&Jet) -> Result<Jet>,
    x: &Jet,
    s_max: f64,
    tol: f64,
) -> Result<QuadResult<Jet>> {
    let vmax = (s_max - x.center()).max(1e-3).sqrt();
    integrate_rel(
        |v| {
            let s = x.add_scalar(v * v);
            let den = x.add_scalar(0.5 * v * v).sinh().powf(-0.5)?;
            Ok((f_sinh(&s)? * den).scale(2.0 * abel_weight(v)))
        },
        0.0,
        vmax,
        tol,
    )
}

/// Plain-valued version of the descent integral for an arbitrary `F`.
pub fn descend(
    f: impl Fn(f64) -> Result<f64>,
    rho: f64,
    s_max: f64,
    tol: f64,
) -> Result<QuadResult> {
    let x = Jet::constant(rho, rho, 0);
    let q = descend_jet(|s| Ok(Jet::constant(rho, f(s.value())? * s.value().sinh(), 0)), &x, s_max, tol)?;
    Ok(q.map(|j| j.value()))
}

/// Distance beyond which the Gaussian factor of a heat kernel is below `tol`.
pub fn heat_cutoff(n: u32, t: f64, rho: f64, tol: f64) -> f64 {
    let a = 2.0 * t * n as f64;
    let l = log_inv_tol(tol) + 10.0;
    a + ((rho - a).powi(2) + 4.0 * t * l).sqrt()
}

/// `Hₙ` for odd `n`: `D^{(n-1)/2}` with `w = sinh` on the flat one-dimensional Gaussian.
pub fn heat_raise_odd(n: u32, t: f64, rho: f64) -> Result<Evaluation> {
    check(n, t, rho)?;
    if n % 2 == 0 {
        return Err(Error::domain(format!("the closed raise needs odd n, got {n}")));
    }
    let k = ((n - 1) / 2) as usize;
    let g = move |s: f64, order: usize| Ok(euclid::heat_jet(1, t, s, order));
    raised(Space::Negative, &g, k, rho, 0.0)
}

/// `Hₙ` for even `n` from the three-dimensional kernel: `D^{(n-2)/2}` applied
/// outside the descent integral of `(4πt)^{-3/2} s e^{-s²/4t}`, or inside it on
/// the closed odd kernel `H_{n+1}`.
pub fn heat_descent_even(n: u32, t: f64, rho: f64, form: EvenForm, tol: f64) -> Result<Evaluation> {
    check(n, t, rho)?;
    if n % 2 == 1 {
        return Err(Error::domain(format!("the even-dimension forms need even n, got {n}")));
    }
    let k = ((n - 2) / 2) as usize;
    let s_max = heat_cutoff(n, t, rho, tol);
    if form == EvenForm::RaiseInside || rho < OUTSIDE_MIN_RHO {
        let q = descend(|s| Ok(heat_raise_odd(n + 1, t, s)?.value), rho, s_max, tol)?;
        return Ok(Evaluation::from_quad(q));
    }
    let evals = std::cell::Cell::new(0);
    let g = |r: f64, order: usize| {
        let q = even_generator(t, r, order, s_max, tol)?;
        evals.set(evals.get() + q.n_evals);
        Ok(q.value)
    };
    let mut e = raised(Space::Negative, &g, k, rho, tol)?;
    e.n_evals = evals.get();
    Ok(e)
}

/// Jet in `ρ` of the descent integral of `(4πt)^{-3/2} s e^{-s²/4t}`, i.e. of `H₂`.
pub(crate) fn even_generator(t: f64, r: f64, order: usize, s_max: f64, tol: f64) -> Result<QuadResult<Jet>> {
    let c = (4.0 * PI * t).powf(-1.5);
    let x = Jet::variable(r, order);
    descend_jet(|s| Ok((s * &(s * s).scale(-0.25 / t).exp()).scale(c)), &x, s_max, tol)
}

/// `Hₙ` by whichever of [`heat_raise_odd`] and [`heat_descent_even`] applies.
pub fn heat_classical(n: u32, t: f64, rho: f64, tol: f64) -> Result<Evaluation> {
    if n % 2 == 1 {
        heat_raise_odd(n, t, rho)
    } else {
        heat_descent_even(n, t, rho, EvenForm::default(), tol)
    }
}

/// The descent identity: `Hₙ(ρ)` recovered from `H_{n+1}` by the Abel-type integral.
pub fn heat_descent(n: u32, t: f64, rho: f64, tol: f64) -> Result<QuadResult> {
    check(n, t, rho)?;
    let s_max = heat_cutoff(n + 1, t, rho, tol);
    // one even form throughout: switching forms inside the integral leaves a
    // small jump that stalls the outer quadrature
    let upper = |s: f64| match n % 2 {
        0 => heat_raise_odd(n + 1, t, s),
        _ => heat_descent_even(n + 1, t, s, EvenForm::RaiseInside, tol * 0.01),
    };
    descend(|s| Ok(upper(s)?.value), rho, s_max, tol)
}

pub fn poisson_closed(n: u32, y: f64, rho: f64) -> f64 {
    let m = (n + 1) as f64 / 2.0;
    gamma_half(n + 1) / (2.0 * PI).powf(m) * y.sin() / (rho.cosh() - y.cos()).powf(m)
}

pub fn poisson_of(n: u32, y: f64, x: &Jet) -> Result<Jet> {
    let m = (n + 1) as f64 / 2.0;
    Ok(x.cosh().add_scalar(-y.cos()).powf(-m)?.scale(gamma_half(n + 1) / (2.0 * PI).powf(m) * y.sin()))
}

/// `Pₙ` from `P_{n+1}` by the descent integral.
pub fn poisson_descent(n: u32, y: f64, rho: f64, tol: f64) -> Result<QuadResult> {
    check_poisson(n, y, rho)?;
    // P_{n+1} sinh s decays like e^{-ns/2}
    let s_max = rho + 2.0 * (log_inv_tol(tol) + 10.0) / n as f64;
    descend(|s| Ok(poisson_closed(n + 1, y, s)), rho, s_max, tol)
}

/// `Pₙ` by raising `P₁` (odd `n`) or `P₂` (even `n`).
pub fn poisson_raise(n: u32, y: f64, rho: f64) -> Result<Evaluation> {
    check_poisson(n, y, rho)?;
    let base = if n % 2 == 1 { 1 } else { 2 };
    let k = ((n - base) / 2) as usize;
    let g = move |s: f64, order: usize| poisson_of(base, y, &Jet::variable(s, order));
    raised(Space::Negative, &g, k, rho, 0.0)
}

struct GruetIntegrand {
    n: u32,
    t: f64,
    cosh_rho: f64,
    sigma: f64,
}

impl ContourIntegrand for GruetIntegrand {
    fn re_at<T: Real>(&self, xi: &T) -> T {
        let y = Cplx::new(T::from_f64(self.sigma), xi.neg());
        let e = y.mul(&y).scale(&T::from_f64(0.25 / self.t)).exp();
        let d = Cplx::from_f64(self.cosh_rho, 0.0).sub(&y.cos());
        e.mul(&y.sin()).mul(&d.inv_pow_half(self.n + 1)).re
    }

    fn sigma(&self) -> f64 {
        self.sigma
    }

    fn strip_width(&self) -> f64 {
        self.sigma.min(2.0 * PI - self.sigma)
    }
}

/// Contour form
/// `Hₙ = Γ((n+1)/2)/(2^{(n-1)/2} π^{n/2+1} √(4t)) ∫₀^∞ Re[e^{y²/4t} sin y (cosh ρ - cos y)^{-(n+1)/2}] dξ`,
/// `y = σ - iξ`, `0 < σ < 2π` (default `π`).
pub fn heat_gruet(n: u32, t: f64, rho: f64, sigma: Option<f64>, tol: f64) -> Result<Evaluation> {
    check(n, t, rho)?;
    let sigma = sigma.unwrap_or(PI);
    if !(sigma > 0.0 && sigma < 2.0 * PI) {
        return Err(Error::Contour(format!("sigma = {sigma} must lie in (0, 2π)")));
    }
    let ig = GruetIntegrand { n, t, cosh_rho: rho.cosh(), sigma };
    let (q, stats) = contour_integral(&ig, t, tol)?;
    let pre = gamma_half(n + 1)
        / (2f64.powf((n as f64 - 1.0) / 2.0) * PI.powf(n as f64 / 2.0 + 1.0) * (4.0 * t).sqrt());
    Ok(Evaluation::from_contour(q, stats).scaled(pre))
}

/// `e^{(π²-ξ²)/2τ} sinh ξ sin(πξ/τ) / (cosh ρ + cosh ξ)^{(n+1)/2}`, even in `ξ`.
struct ClassicIntegrand {
    n: u32,
    tau: f64,
    cosh_rho: f64,
}

impl ContourIntegrand for ClassicIntegrand {
    fn re_at<T: Real>(&self, xi: &T) -> T {
        let inv = 1.0 / self.tau;
        let g = xi.mul(xi).neg().add_f64(PI * PI).mul_f64(0.5 * inv).exp();
        let (sh, ch) = xi.sinh_cosh();
        let den = ch.add_f64(self.cosh_rho);
        let m = (self.n + 1) / 2;
        let mut p = den.clone();
        for _ in 1..m {
            p = p.mul(&den);
        }
        if self.n % 2 == 0 {
            p = p.mul(&den.sqrt());
        }
        g.mul(&sh).mul(&xi.mul_f64(PI * inv).sin()).div(&p)
    }

    fn sigma(&self) -> f64 {
        PI
    }

    fn strip_width(&self) -> f64 {
        PI
    }
}

/// The classical formula exactly as written:
/// `Γ((n+1)/2)/(2^{n/2} π^{n/2+1}) τ^{-1/2} ∫₀^∞ e^{(π²-ξ²)/2τ} sinh ξ sin(πξ/τ) (cosh ρ + cosh ξ)^{-(n+1)/2} dξ`.
///
/// Its value is the heat kernel at time `τ/2`; see [`heat_gruet_classic`].
pub fn gruet_classic_printed(n: u32, tau: f64, rho: f64, tol: f64) -> Result<Evaluation> {
    check(n, tau, rho)?;
    let ig = ClassicIntegrand { n, tau, cosh_rho: rho.cosh() };
    // the e^{-ξ²/2τ} envelope is that of time τ/2
    let (q, stats) = contour_integral(&ig, tau / 2.0, tol)?;
    let pre = gamma_half(n + 1) / (2f64.powf(n as f64 / 2.0) * PI.powf(n as f64 / 2.0 + 1.0) * tau.sqrt());
    Ok(Evaluation::from_contour(q, stats).scaled(pre))
}

/// `Hₙ(t, ρ)` from the classical real-variable formula, evaluated at `τ = 2t`.
pub fn heat_gruet_classic(n: u32, t: f64, rho: f64, tol: f64) -> Result<Evaluation> {
    gruet_classic_printed(n, 2.0 * t, rho, tol)
}
