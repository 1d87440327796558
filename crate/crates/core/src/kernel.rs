//! Representation-independent entry point: evaluate a [`KernelQuery`] by a named method.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::{self, EvenForm};
use crate::geometry::{Convention, KernelKind, KernelQuery, Space};
use crate::jets::{self, Jet, RadialGenerator};
use crate::quadrature::{ContourStats, QuadResult};
use crate::{analysis, hyperbolic, sphere, DEFAULT_TOL};

/// A documented condition attached to a result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// The raising operator was applied at a point off the pole and the
    /// Taylor polynomial re-expanded at `r`.
    NearPoleRemap { r: f64, center: f64 },
    /// The contour integral cancelled too much for double precision.
    Multiprecision { bits: usize, cancellation: f64 },
    /// A series dual to the one requested was used because it converges faster here.
    DualSeries { detail: String },
    /// The value at the edge of the distance domain was taken as a limit.
    DomainEdgeLimit { r: f64 },
    /// The tolerance was not met; the value is the best estimate available.
    ConvergenceFallback { reason: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NearPoleRemap { r, center } => {
                write!(f, "near-pole remap: r={r} evaluated by re-expansion from {center}")
            }
            Warning::Multiprecision { bits, cancellation } => {
                write!(f, "multiprecision: {bits} bits (cancellation {cancellation:.1e})")
            }
            Warning::DualSeries { detail } => write!(f, "dual series: {detail}"),
            Warning::DomainEdgeLimit { r } => write!(f, "domain-edge limit at r={r}"),
            Warning::ConvergenceFallback { reason } => write!(f, "convergence fallback: {reason}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub err_estimate: f64,
    pub n_evals: usize,
    pub warnings: Vec<Warning>,
}

impl Evaluation {
    /// A closed-form value, accurate to a few ulps.
    pub fn closed(value: f64) -> Self {
        Self { value, err_estimate: 4.0 * f64::EPSILON * value.abs(), n_evals: 1, warnings: vec![] }
    }

    pub fn from_quad(q: QuadResult) -> Self {
        Self { value: q.value, err_estimate: q.err_estimate, n_evals: q.n_evals, warnings: vec![] }
    }

    pub fn from_contour(q: QuadResult, stats: ContourStats) -> Self {
        let mut e = Self::from_quad(q);
        if stats.bits > 53 {
            e.warnings.push(Warning::Multiprecision { bits: stats.bits, cancellation: stats.cancellation });
        }
        e
    }

    pub fn with_warning(mut self, w: Warning) -> Self {
        self.warnings.push(w);
        self
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.value *= c;
        self.err_estimate *= c.abs();
        self
    }

    pub fn rel_err(&self) -> f64 {
        self.err_estimate / self.value.abs().max(f64::MIN_POSITIVE)
    }
}

/// `(D^k g)(r)` with pole continuation, packaged with its error and warnings.
///
/// `base_rel` is the relative accuracy of the generator's own jets.
pub(crate) fn raised(
    space: Space,
    g: &impl RadialGenerator,
    k: usize,
    r: f64,
    base_rel: f64,
) -> Result<Evaluation> {
    let (j, center) = jets::raise_jet_anywhere(space, g, k, r, 0)?;
    let value = j.value();
    let mut rel = base_rel + 16.0 * f64::EPSILON * (k as f64 + 1.0);
    let mut warnings = vec![];
    if let Some(center) = center {
        rel += jets::continuation_rel_error(k, center);
        warnings.push(Warning::NearPoleRemap { r, center });
    }
    Ok(Evaluation { value, err_estimate: rel * value.abs(), n_evals: 1, warnings })
}

/// A way of computing a kernel. Not every representation exists for every
/// (space, kind, dimension); [`evaluate`] reports `Unsupported` for those.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    Closed,
    /// Raising operator applied to a low-dimensional generator; for even
    /// dimensions, outside the integral that produces the generator.
    Raise,
    /// Even dimensions only: raising operator moved inside that integral.
    RaiseInside,
    /// Abel-type descent from the kernel in dimension `n + 1`.
    Descent,
    /// Wrapped-Gaussian series on the circle or its two-sphere analogue.
    Theta,
    /// Laplace-type integral for the Euclidean Poisson kernel.
    Integral,
    /// Bromwich contour integral of the Poisson kernel in its height variable.
    Gruet,
    /// Hyperbolic heat kernel from the classical real-variable formula.
    GruetClassic,
    /// Euclidean contour integral in `s = y²`.
    GruetLinear,
    /// Spherical Poisson kernel through the doubling identity, `v` form.
    Doubling,
    /// Spherical Poisson kernel through the doubling identity, `ψ` form.
    DoublingPsi,
    /// Poisson kernel from the heat kernel by subordination.
    Subordinate,
    /// Cheapest representation valid for the query.
    Auto,
}

impl Representation {
    pub const ALL: [Representation; 13] = [
        Representation::Closed,
        Representation::Raise,
        Representation::RaiseInside,
        Representation::Descent,
        Representation::Theta,
        Representation::Integral,
        Representation::Gruet,
        Representation::GruetClassic,
        Representation::GruetLinear,
        Representation::Doubling,
        Representation::DoublingPsi,
        Representation::Subordinate,
        Representation::Auto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Closed => "closed",
            Representation::Raise => "raise",
            Representation::RaiseInside => "raise-inside",
            Representation::Descent => "descent",
            Representation::Theta => "theta",
            Representation::Integral => "integral",
            Representation::Gruet => "gruet",
            Representation::GruetClassic => "gruet-classic",
            Representation::GruetLinear => "gruet-linear",
            Representation::Doubling => "doubling",
            Representation::DoublingPsi => "doubling-psi",
            Representation::Subordinate => "subordinate",
            Representation::Auto => "auto",
        }
    }

    /// Whether [`evaluate`] supports this representation for the query's shape.
    pub fn applies(self, space: Space, kind: KernelKind, n: u32) -> bool {
        use KernelKind::*;
        use Representation::*;
        use Space::*;
        match (self, space, kind) {
            (Auto, _, _) => true,
            (Closed, Flat, _) | (Closed, _, Poisson) => true,
            (Raise, _, _) => true,
            (RaiseInside, Flat, _) | (RaiseInside, Positive, Heat) | (RaiseInside, Negative, Heat) => n % 2 == 0,
            (Descent, Flat, _) | (Descent, Negative, _) => true,
            (Theta, Positive, Heat) => n <= 2,
            (Integral, Flat, Poisson) => true,
            (Gruet, _, Heat) => true,
            (GruetClassic, Negative, Heat) => true,
            (GruetLinear, Flat, Heat) => true,
            (Doubling, Positive, Poisson) | (DoublingPsi, Positive, Poisson) => true,
            (Subordinate, _, Poisson) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let alias = match s.as_str() {
            "descent-iv" => Some(Representation::Raise),
            "descent-v" => Some(Representation::RaiseInside),
            "poisson-integral" => Some(Representation::Integral),
            _ => None,
        };
        alias
            .or_else(|| Representation::ALL.iter().copied().find(|r| r.name() == s))
            .ok_or_else(|| Error::domain(format!("unknown representation '{s}'")))
    }
}

/// Knobs shared by all representations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Relative accuracy requested from quadratures and series.
    pub tol: f64,
    /// Abscissa of the Bromwich line; each space has its own default.
    pub sigma: Option<f64>,
    pub convention: Convention,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, sigma: None, convention: Convention::Paper }
    }
}

impl EvalOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn markovian(mut self) -> Self {
        self.convention = Convention::Markovian;
        self
    }
}

fn unsupported(q: &KernelQuery, rep: Representation) -> Error {
    Error::Unsupported(format!(
        "representation '{rep}' for the {} kernel on {} in dimension {}",
        q.kind.name(),
        q.space,
        q.n
    ))
}

/// Rate `λ` with `e^{λt}` turning a paper-convention heat kernel into the
/// requested convention.
fn convention_shift(q: &KernelQuery, convention: Convention) -> f64 {
    if q.kind == KernelKind::Poisson {
        return 0.0;
    }
    convention.heat_shift(q.space, q.n) - Convention::Paper.heat_shift(q.space, q.n)
}

/// Factor turning a paper-convention heat kernel into the requested convention.
pub fn convention_factor(q: &KernelQuery, convention: Convention) -> f64 {
    (convention_shift(q, convention) * q.param).exp()
}

/// Evaluates the kernel `q` by representation `rep`.
pub fn evaluate(q: &KernelQuery, rep: Representation, opts: &EvalOptions) -> Result<Evaluation> {
    q.validate()?;
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(Error::domain(format!("tolerance must lie in (0, 1), got {}", opts.tol)));
    }
    if rep == Representation::Auto {
        return evaluate_auto(q, opts);
    }
    if !rep.applies(q.space, q.kind, q.n) {
        return Err(unsupported(q, rep));
    }
    let shift = convention_shift(q, opts.convention);
    if shift != 0.0 && q.space == Space::Positive && q.param > sphere::DUAL_SERIES_T {
        use Representation::*;
        if matches!(rep, Raise | RaiseInside | Theta) {
            // e^{λt} would overflow before the kernel underflows
            return sphere::spectral_eval_shifted(q.n, q.param, q.r, shift, opts.tol);
        }
    }
    let e = evaluate_unshifted(q, rep, opts)?;
    Ok(e.scaled((shift * q.param).exp()))
}

fn evaluate_auto(q: &KernelQuery, opts: &EvalOptions) -> Result<Evaluation> {
    use Representation::*;
    let first = match (q.space, q.kind) {
        (_, KernelKind::Poisson) | (Space::Flat, _) => Closed,
        (Space::Positive, _) if q.n == 1 => Theta,
        _ => Raise,
    };
    match evaluate(q, first, opts) {
        Ok(e) => Ok(e),
        Err(err) if err.is_convergence() || matches!(err, Error::SingularPoint(_)) => {
            let e = evaluate(q, Gruet, opts)?;
            Ok(e.with_warning(Warning::ConvergenceFallback { reason: format!("{first}: {err}") }))
        }
        Err(err) => Err(err),
    }
}

fn evaluate_unshifted(q: &KernelQuery, rep: Representation, opts: &EvalOptions) -> Result<Evaluation> {
    use KernelKind::*;
    use Representation::*;
    use Space::*;
    let (n, p, r, tol) = (q.n, q.param, q.r, opts.tol);
    let quad = |x: Result<QuadResult>| x.map(Evaluation::from_quad);
    match (q.space, q.kind, rep) {
        (Flat, Heat, Closed) => Ok(Evaluation::closed(euclid::heat_closed(n, p, r))),
        (Flat, Heat, Raise) => euclid::heat_raise(n, p, r, EvenForm::RaiseOutside, tol),
        (Flat, Heat, RaiseInside) => euclid::heat_raise(n, p, r, EvenForm::RaiseInside, tol),
        (Flat, Heat, Descent) => quad(euclid::heat_descent(n, p, r, tol)),
        (Flat, Heat, Gruet) => euclid::heat_gruet(n, p, r, opts.sigma, tol),
        (Flat, Heat, GruetLinear) => euclid::heat_gruet_linear(n, p, r, opts.sigma, tol),
        (Flat, Poisson, Closed) => Ok(Evaluation::closed(euclid::poisson_closed(n, p, r))),
        (Flat, Poisson, Raise) => euclid::poisson_raise(n, p, r, EvenForm::RaiseOutside, tol),
        (Flat, Poisson, RaiseInside) => euclid::poisson_raise(n, p, r, EvenForm::RaiseInside, tol),
        (Flat, Poisson, Descent) => quad(euclid::poisson_descent(n, p, r, tol)),
        (Flat, Poisson, Integral) => quad(euclid::poisson_integral(n, p, r, tol)),

        (Positive, Heat, Theta) if n == 1 => {
            let e = Evaluation::closed(sphere::heat_theta_1(p, r, tol * 1e-3)?);
            Ok(if p > sphere::DUAL_SERIES_T { e.with_warning(dual_warning(p)) } else { e })
        }
        (Positive, Heat, Theta) => {
            let e = quad(sphere::heat_theta_2(p, r, tol))?;
            Ok(if p > sphere::DUAL_SERIES_T { e.with_warning(dual_warning(p)) } else { e })
        }
        (Positive, Heat, Raise) => sphere::heat_raise(n, p, r, EvenForm::RaiseOutside, tol),
        (Positive, Heat, RaiseInside) => sphere::heat_raise(n, p, r, EvenForm::RaiseInside, tol),
        (Positive, Heat, Gruet) => sphere::heat_gruet(n, p, r, opts.sigma, tol),
        (Positive, Poisson, Closed) => Ok(Evaluation::closed(sphere::poisson_closed(n, p, r))),
        (Positive, Poisson, Raise) => sphere::poisson_raise(n, p, r),
        (Positive, Poisson, Doubling) => quad(sphere::poisson_doubling(n, p, r, sphere::Doubling::V, tol)),
        (Positive, Poisson, DoublingPsi) => quad(sphere::poisson_doubling(n, p, r, sphere::Doubling::Psi, tol)),

        (Negative, Heat, Raise) if n % 2 == 1 => hyperbolic::heat_raise_odd(n, p, r),
        (Negative, Heat, Raise) => hyperbolic::heat_descent_even(n, p, r, EvenForm::RaiseOutside, tol),
        (Negative, Heat, RaiseInside) => hyperbolic::heat_descent_even(n, p, r, EvenForm::RaiseInside, tol),
        (Negative, Heat, Descent) => quad(hyperbolic::heat_descent(n, p, r, tol)),
        (Negative, Heat, Gruet) => hyperbolic::heat_gruet(n, p, r, opts.sigma, tol),
        (Negative, Heat, GruetClassic) => hyperbolic::heat_gruet_classic(n, p, r, tol),
        (Negative, Poisson, Closed) => Ok(Evaluation::closed(hyperbolic::poisson_closed(n, p, r))),
        (Negative, Poisson, Raise) => hyperbolic::poisson_raise(n, p, r),
        (Negative, Poisson, Descent) => quad(hyperbolic::poisson_descent(n, p, r, tol)),

        (space, Poisson, Subordinate) => {
            let heat_opts = EvalOptions { tol: tol * 0.1, ..*opts };
            let heat = |t: f64| {
                let hq = KernelQuery::heat(space, n, t, r);
                Ok(evaluate(&hq, Representation::Auto, &heat_opts)?.value)
            };
            quad(analysis::subordinate(heat, p, tol))
        }
        _ => Err(unsupported(q, rep)),
    }
}

fn dual_warning(t: f64) -> Warning {
    Warning::DualSeries { detail: format!("t = {t} > {}: cosine/eigenfunction series", sphere::DUAL_SERIES_T) }
}

/// Distance from a pole below which even-dimensional jets lose accuracy.
const JET_POLE_MARGIN: f64 = 0.3;

/// Taylor jet of the kernel in the distance variable, for PDE checks.
///
/// Uses closed forms where they exist and otherwise the raising-operator
/// generators, so the spatial derivatives are exact up to quadrature error.
pub fn kernel_jet(q: &KernelQuery, opts: &EvalOptions, order: usize) -> Result<Jet> {
    q.validate()?;
    let (n, p, r, tol) = (q.n, q.param, q.r, opts.tol);
    let x = Jet::variable(r, order);
    let k_odd = ((n.max(1) - 1) / 2) as usize;
    let k_even = ((n.max(2) - 2) / 2) as usize;
    let near_pole = q.space.distance_to_pole(r) < JET_POLE_MARGIN;
    let anywhere = |space, g: &dyn Fn(f64, usize) -> Result<Jet>, k| {
        jets::raise_jet_anywhere(space, &|s: f64, o: usize| g(s, o), k, r, order).map(|(j, _)| j)
    };
    let j = match (q.space, q.kind) {
        (Space::Flat, KernelKind::Heat) => euclid::heat_jet(n, p, r, order),
        (Space::Flat, KernelKind::Poisson) => euclid::poisson_jet(n, p, r, order)?,
        (Space::Positive, KernelKind::Poisson) => sphere::poisson_of(n, p, &x)?,
        (Space::Negative, KernelKind::Poisson) => hyperbolic::poisson_of(n, p, &x)?,
        (Space::Positive, KernelKind::Heat) if n == 1 || p > sphere::DUAL_SERIES_T => {
            let shift = convention_shift(q, opts.convention);
            return Ok(sphere::heat_spectral_shifted_of(n, p, &x, shift, tol));
        }
        (Space::Positive, KernelKind::Heat) if n % 2 == 1 => {
            anywhere(Space::Positive, &|s, o| Ok(sphere::theta1_jet(p, s, o, tol)), k_odd)?
        }
        (Space::Positive, KernelKind::Heat) => {
            if near_pole {
                return Err(Error::Unsupported(format!("even-dimensional sphere jet within {JET_POLE_MARGIN} of a pole")));
            }
            anywhere(Space::Positive, &|s, o| Ok(sphere::theta2_jet(p, s, o, tol)?.value), k_even)?
        }
        (Space::Negative, KernelKind::Heat) if n % 2 == 1 => {
            anywhere(Space::Negative, &|s, o| Ok(euclid::heat_jet(1, p, s, o)), k_odd)?
        }
        (Space::Negative, KernelKind::Heat) => {
            if near_pole {
                return Err(Error::Unsupported(format!("even-dimensional hyperbolic jet within {JET_POLE_MARGIN} of the origin")));
            }
            let s_max = hyperbolic::heat_cutoff(n, p, r, tol);
            anywhere(Space::Negative, &|s, o| Ok(hyperbolic::even_generator(p, s, o, s_max, tol)?.value), k_even)?
        }
    };
    Ok(j.scale(convention_factor(q, opts.convention)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn names_round_trip() {
        for rep in Representation::ALL {
            assert_eq!(rep.name().parse::<Representation>().unwrap(), rep);
        }
        assert_eq!("descent-v".parse::<Representation>().unwrap(), Representation::RaiseInside);
        assert!("nope".parse::<Representation>().is_err());
    }

    #[test]
    fn auto_examples() {
        let o = EvalOptions::default();
        let v = evaluate(&KernelQuery::poisson(Space::Flat, 1, 1.0, 0.0), Representation::Closed, &o).unwrap();
        assert!((v.value - 1.0 / PI).abs() < 1e-15);
        let v = evaluate(&KernelQuery::heat(Space::Positive, 1, 10.0, 1.0), Representation::Auto, &o).unwrap();
        assert!((v.value - 1.0 / (2.0 * PI)).abs() < 1e-4);
        for space in Space::ALL {
            for n in 1..=4 {
                let q = KernelQuery::heat(space, n, 0.7, 0.9);
                assert!(evaluate(&q, Representation::Auto, &o).unwrap().value > 0.0);
            }
        }
    }

    #[test]
    fn unsupported_is_reported() {
        let o = EvalOptions::default();
        let q = KernelQuery::heat(Space::Positive, 3, 1.0, 1.0);
        assert!(matches!(evaluate(&q, Representation::GruetClassic, &o), Err(Error::Unsupported(_))));
        let q = KernelQuery::poisson(Space::Negative, 3, 4.0, 1.0);
        assert!(matches!(evaluate(&q, Representation::Closed, &o), Err(Error::Domain(_))));
    }

    #[test]
    fn markovian_masses() {
        // e^{tΔ} conserves mass on the sphere
        let o = EvalOptions::with_tol(1e-12).markovian();
        let t = 0.6;
        let m = crate::quadrature::integrate_rel(
            |p: f64| {
                let q = KernelQuery::heat(Space::Positive, 3, t, p);
                Ok(evaluate(&q, Representation::Raise, &o)?.value * 4.0 * PI * p.sin().powi(2))
            },
            0.0,
            PI,
            1e-11,
        )
        .unwrap();
        assert!((m.value - 1.0).abs() < 1e-9, "{}", m.value);
    }

    #[test]
    fn jets_match_values() {
        let o = EvalOptions::with_tol(1e-12);
        for space in Space::ALL {
            for kind in [KernelKind::Heat, KernelKind::Poisson] {
                for n in 1..=4 {
                    let q = KernelQuery { space, n, kind, param: 0.8, r: 1.1 };
                    let j = kernel_jet(&q, &o, 2).unwrap();
                    let v = evaluate(&q, Representation::Auto, &o).unwrap().value;
                    assert!(((j.value() - v) / v).abs() < 1e-9, "{space} {kind:?} n={n}: {} vs {v}", j.value());
                }
            }
        }
    }
}
