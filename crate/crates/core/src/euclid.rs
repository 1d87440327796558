//! Euclidean heat and Poisson kernels.
//!
//! `H_n(t,r) = (4πt)^{-n/2} e^{-r²/4t}` and
//! `P_n(y,r) = Γ((n+1)/2) π^{-(n+1)/2} y (r²+y²)^{-(n+1)/2}`, together with
//! the raising operator, the descent integral, the Laplace-type integral for
//! `P_n`, and Bromwich contour integrals for `H_n`.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Space;
use crate::jets::Jet;
use crate::kernel::{raised, Evaluation};
use crate::quadrature::mp::{Cplx, Real};
use crate::quadrature::{
    contour_integral, integrate_rel, semi_infinite_rel, ContourIntegrand, QuadResult,
};
use crate::special::{gamma_half, log_inv_tol};

/// How an even-dimensional kernel is built from the three-dimensional one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EvenForm {
    /// Raise the two-dimensional descent integral.
    #[default]
    RaiseOutside,
    /// Descend from the already-raised odd kernel.
    RaiseInside,
}

pub(crate) fn check_heat(n: u32, t: f64, r: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("r must be non-negative, got {r}")));
    }
    Ok(())
}

pub fn heat_closed(n: u32, t: f64, r: f64) -> f64 {
    (4.0 * PI * t).powf(-(n as f64) / 2.0) * (-r * r / (4.0 * t)).exp()
}

pub fn poisson_closed(n: u32, y: f64, r: f64) -> f64 {
    let m = (n + 1) as f64 / 2.0;
    gamma_half(n + 1) / PI.powf(m) * y / (r * r + y * y).powf(m)
}

/// Jet of `H_n(t, ·)` composed with a jet of the squared distance.
pub fn heat_of_sq(n: u32, t: f64, s2: &Jet) -> Jet {
    s2.scale(-1.0 / (4.0 * t)).exp().scale((4.0 * PI * t).powf(-(n as f64) / 2.0))
}

/// Jet of `P_n(y, ·)` composed with a jet of the squared distance.
pub fn poisson_of_sq(n: u32, y: f64, s2: &Jet) -> Result<Jet> {
    let m = (n + 1) as f64 / 2.0;
    Ok(s2.add_scalar(y * y).powf(-m)?.scale(gamma_half(n + 1) / PI.powf(m) * y))
}

pub fn heat_jet(n: u32, t: f64, r: f64, order: usize) -> Jet {
    let x = Jet::variable(r, order);
    heat_of_sq(n, t, &(&x * &x))
}

pub fn poisson_jet(n: u32, y: f64, r: f64, order: usize) -> Result<Jet> {
    let x = Jet::variable(r, order);
    poisson_of_sq(n, y, &(&x * &x))
}

/// `(y/π^{(n+1)/2}) ∫₀^∞ e^{-(r²+y²)u} u^{(n-1)/2} du`, with `u = v²`.
pub fn poisson_integral(n: u32, y: f64, r: f64, tol: f64) -> Result<QuadResult> {
    check_heat(n, y, r)?;
    let a = r * r + y * y;
    let m = (n + 1) as f64 / 2.0;
    let q = semi_infinite_rel(|v| Ok(2.0 * v.powi(n as i32) * (-a * v * v).exp()), 0.0, tol, 0.0)?;
    Ok(q.scaled(y / PI.powf(m)))
}

/// Cut-off for `∫₀^∞ e^{-u²/4t} poly(u) du` at relative accuracy `tol`.
fn gaussian_upper(t: f64, tol: f64, extra_log: f64) -> f64 {
    (4.0 * t * (log_inv_tol(tol) + 8.0 + extra_log)).sqrt()
}

/// `2∫₀^U K(√(x²+u²)) du` as a jet in `x` at `r`; `kernel` takes the squared distance.
fn descent_jet(
    kernel: impl Fn(&Jet) -> Result<Jet>,
    r: f64,
    order: usize,
    upper: Option<f64>,
    tol: f64,
    evals: &Cell<usize>,
) -> Result<QuadResult<Jet>> {
    let x = Jet::variable(r, order);
    let x2 = &x * &x;
    let f = |u: f64| {
        Ok(kernel(&x2.add_scalar(u * u))?.scale(2.0))
    };
    let q = match upper {
        Some(u) => integrate_rel(f, 0.0, u, tol)?,
        None => semi_infinite_rel(f, 0.0, tol, 0.0)?,
    };
    evals.set(evals.get() + q.n_evals);
    Ok(q)
}

/// `∫_r^∞ (s²-r²)^{-1/2} H_{n+1}(t,s) 2s ds`, which equals `H_n(t,r)`.
pub fn heat_descent(n: u32, t: f64, r: f64, tol: f64) -> Result<QuadResult> {
    check_heat(n, t, r)?;
    let evals = Cell::new(0);
    let q = descent_jet(|s2| Ok(heat_of_sq(n + 1, t, s2)), r, 0, Some(gaussian_upper(t, tol, 0.0)), tol, &evals)?;
    Ok(q.map(|j| j.value()))
}

/// `∫_r^∞ (s²-r²)^{-1/2} P_{n+1}(y,s) 2s ds`, which equals `P_n(y,r)`.
pub fn poisson_descent(n: u32, y: f64, r: f64, tol: f64) -> Result<QuadResult> {
    check_heat(n, y, r)?;
    let evals = Cell::new(0);
    let q = descent_jet(|s2| poisson_of_sq(n + 1, y, s2), r, 0, None, tol, &evals)?;
    Ok(q.map(|j| j.value()))
}

/// `H_n` from the raising operator: `D^{(n-1)/2}` on the one-dimensional
/// Gaussian for odd `n`; for even `n`, `D^{(n-2)/2}` combined with the descent
/// of the three-dimensional kernel in the order given by `form`.
pub fn heat_raise(n: u32, t: f64, r: f64, form: EvenForm, tol: f64) -> Result<Evaluation> {
    check_heat(n, t, r)?;
    if n % 2 == 1 {
        let k = ((n - 1) / 2) as usize;
        let g = move |s: f64, order: usize| Ok(heat_jet(1, t, s, order));
        return raised(Space::Flat, &g, k, r, 0.0);
    }
    let k = ((n - 2) / 2) as usize;
    let upper = gaussian_upper(t, tol, 2.0 * k as f64);
    let evals = Cell::new(0);
    let mut e = match form {
        EvenForm::RaiseOutside => {
            let g = |s: f64, order: usize| {
                Ok(descent_jet(|s2| Ok(heat_of_sq(3, t, s2)), s, order, Some(upper), tol, &evals)?.value)
            };
            raised(Space::Flat, &g, k, r, tol)?
        }
        EvenForm::RaiseInside => {
            let inner = move |s: f64, order: usize| Ok(heat_jet(3, t, s, order));
            let q = integrate_rel(
                |u| Ok(2.0 * raised(Space::Flat, &inner, k, (r * r + u * u).sqrt(), 0.0)?.value),
                0.0,
                upper,
                tol,
            )?;
            evals.set(q.n_evals);
            Evaluation::from_quad(q)
        }
    };
    e.n_evals = evals.get().max(1);
    Ok(e)
}

/// `P_n` from the raising operator, mirroring [`heat_raise`] with `P_1`, `P_3` as bases.
pub fn poisson_raise(n: u32, y: f64, r: f64, form: EvenForm, tol: f64) -> Result<Evaluation> {
    check_heat(n, y, r)?;
    if n % 2 == 1 {
        let k = ((n - 1) / 2) as usize;
        let g = move |s: f64, order: usize| poisson_jet(1, y, s, order);
        return raised(Space::Flat, &g, k, r, 0.0);
    }
    let k = ((n - 2) / 2) as usize;
    let evals = Cell::new(0);
    let mut e = match form {
        EvenForm::RaiseOutside => {
            let g = |s: f64, order: usize| {
                Ok(descent_jet(|s2| poisson_of_sq(3, y, s2), s, order, None, tol, &evals)?.value)
            };
            raised(Space::Flat, &g, k, r, tol)?
        }
        EvenForm::RaiseInside => {
            let inner = move |s: f64, order: usize| poisson_jet(3, y, s, order);
            let q = semi_infinite_rel(
                |u| Ok(2.0 * raised(Space::Flat, &inner, k, (r * r + u * u).sqrt(), 0.0)?.value),
                0.0,
                tol,
                0.0,
            )?;
            evals.set(q.n_evals);
            Evaluation::from_quad(q)
        }
    };
    e.n_evals = evals.get().max(1);
    Ok(e)
}

/// Default abscissa for [`heat_gruet`].
pub fn default_sigma(r: f64) -> f64 {
    0.5 * r.max(1.0)
}

struct GruetIntegrand {
    n: u32,
    t: f64,
    r: f64,
    sigma: f64,
}

impl ContourIntegrand for GruetIntegrand {
    fn re_at<T: Real>(&self, xi: &T) -> T {
        let y = Cplx::new(T::from_f64(self.sigma), xi.neg());
        let y2 = y.mul(&y);
        let e = y2.scale(&T::from_f64(0.25 / self.t)).exp();
        let d = y2.add(&Cplx::from_f64(self.r * self.r, 0.0));
        e.mul(&y).mul(&d.inv_pow_half(self.n + 1)).re
    }

    fn sigma(&self) -> f64 {
        self.sigma
    }

    fn strip_width(&self) -> f64 {
        self.sigma
    }
}

/// Bromwich inversion of the Poisson kernel in the height `y`:
/// `H_n = 2Γ((n+1)/2)/(π^{n/2+1}√(4t)) ∫₀^∞ Re[e^{y²/4t} y (r²+y²)^{-(n+1)/2}] dξ`,
/// `y = σ - iξ`.
pub fn heat_gruet(n: u32, t: f64, r: f64, sigma: Option<f64>, tol: f64) -> Result<Evaluation> {
    check_heat(n, t, r)?;
    let sigma = sigma.unwrap_or_else(|| default_sigma(r));
    if !(sigma > 0.0) {
        return Err(Error::Contour(format!(
            "sigma = {sigma} puts the branch points ±ir on or right of the line"
        )));
    }
    let ig = GruetIntegrand { n, t, r, sigma };
    let (q, stats) = contour_integral(&ig, t, tol)?;
    let pre = 2.0 * gamma_half(n + 1) / (PI.powf(n as f64 / 2.0 + 1.0) * (4.0 * t).sqrt());
    Ok(Evaluation::from_contour(q, stats).scaled(pre))
}

/// Saddle point of `e^{s/4t}(r²+s)^{-(n+1)/2}` on the real `s` axis.
pub fn default_sigma_linear(n: u32, t: f64, r: f64) -> f64 {
    2.0 * t * (n as f64 + 1.0) - r * r
}

/// Bromwich inversion in `s = y²`:
/// `H_n = Γ((n+1)/2)/(π^{n/2+1}√(4t)) ∫₀^∞ Re[e^{s/4t}(r²+s)^{-(n+1)/2}] dξ`,
/// `s = σ + iξ`.
///
/// Equivalent to [`heat_gruet`] but the integrand only decays like
/// `ξ^{-(n+1)/2}` while oscillating with period `8πt`; the integral is summed
/// period by period and the partial sums extrapolated with Wynn's ε-algorithm.
pub fn heat_gruet_linear(n: u32, t: f64, r: f64, sigma: Option<f64>, tol: f64) -> Result<Evaluation> {
    check_heat(n, t, r)?;
    let sigma = sigma.unwrap_or_else(|| default_sigma_linear(n, t, r));
    if !(sigma + r * r > 0.0) {
        return Err(Error::Contour(format!("sigma = {sigma} is left of the branch point -r²")));
    }
    let f = |xi: f64| {
        let s = Cplx::<f64>::from_f64(sigma, xi);
        let e = s.scale(&(0.25 / t)).exp();
        let d = s.add(&Cplx::from_f64(r * r, 0.0));
        Ok(e.mul(&d.inv_pow_half(n + 1)).re)
    };
    // far out Re ∝ cos(ξ/4t - (n+1)π/4); cut at its zeros so the pieces alternate
    let half = 4.0 * PI * t;
    let phase0 = 4.0 * t * ((n as f64 + 1.0) * PI / 4.0 + PI / 2.0);
    let min_head = 4.0 * (sigma + r * r).abs().max(4.0 * t);
    let head = phase0 + half * ((min_head - phase0) / half).ceil().max(0.0);
    let mut evals = 0;
    let piece = |a: f64, b: f64| {
        integrate_rel(f, a, b, tol * 0.01).or_else(|e| match e {
            Error::Convergence { best, err, .. } => Ok(QuadResult { value: best, err_estimate: err, n_evals: 0 }),
            other => Err(other),
        })
    };
    let h = piece(0.0, head)?;
    evals += h.n_evals;
    let mut partial = Vec::new();
    let mut acc = h.value;
    let mut a = head;
    let mut last_est = f64::NAN;
    let mut err = f64::INFINITY;
    for _ in 0..400 {
        let q = piece(a, a + half)?;
        evals += q.n_evals;
        acc += q.value;
        a += half;
        partial.push(acc);
        if partial.len() >= 8 {
            let est = wynn_epsilon(&partial[partial.len().saturating_sub(24)..]);
            err = (est - last_est).abs();
            last_est = est;
            if err <= tol * est.abs() {
                break;
            }
        }
    }
    let pre = gamma_half(n + 1) / (PI.powf(n as f64 / 2.0 + 1.0) * (4.0 * t).sqrt());
    let mut e = Evaluation { value: last_est, err_estimate: err, n_evals: evals, warnings: vec![] };
    if !(err <= tol * last_est.abs()) {
        e.warnings.push(crate::kernel::Warning::ConvergenceFallback {
            reason: "epsilon extrapolation of the oscillatory tail did not settle".into(),
        });
    }
    Ok(e.scaled(pre))
}

/// Wynn's ε-algorithm on a sequence of partial sums; returns the last even-column entry.
pub(crate) fn wynn_epsilon(s: &[f64]) -> f64 {
    let m = s.len();
    let mut prev = vec![0.0; m + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = *s.last().unwrap_or(&f64::NAN);
    let mut col = 0;
    while cur.len() > 1 {
        let next: Vec<f64> = (0..cur.len() - 1)
            .map(|i| {
                let d = cur[i + 1] - cur[i];
                let base = prev.get(i + 1).copied().unwrap_or(0.0);
                if d == 0.0 {
                    f64::INFINITY
                } else {
                    base + 1.0 / d
                }
            })
            .collect();
        col += 1;
        if col % 2 == 0 {
            if let Some(v) = next.last().copied().filter(|v| v.is_finite()) {
                best = v;
            } else {
                break;
            }
        }
        prev = cur;
        cur = next;
    }
    best
}
