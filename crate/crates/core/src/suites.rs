//! Standard grids and the validation suites built on [`analysis`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{self, Flag, ValidationReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{Convention, KernelKind, KernelQuery, Space};
use crate::kernel::{evaluate, EvalOptions, Representation};
use crate::{euclid, sphere};

/// Evenly spaced points, linearly or geometrically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub geometric: bool,
}

impl Axis {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count, geometric: false }
    }

    pub fn geometric(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count, geometric: true }
    }

    /// Parses `start:stop:count`, optionally suffixed `g` (geometric) or `l`
    /// (linear); without a suffix `geometric_default` decides.
    pub fn parse(s: &str, geometric_default: bool) -> Result<Self> {
        let bad = || Error::domain(format!("grid '{s}' is not start:stop:count[g|l]"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let (start, stop, count) = match parts.as_slice() {
            [a] => {
                let v: f64 = a.parse().map_err(|_| bad())?;
                return Ok(Self::linear(v, v, 1));
            }
            [a, b, c] => (*a, *b, *c),
            _ => return Err(bad()),
        };
        let (count, geometric) = match count.strip_suffix('g') {
            Some(c) => (c, true),
            None => match count.strip_suffix('l') {
                Some(c) => (c, false),
                None => (count, geometric_default),
            },
        };
        let axis = Self {
            start: start.parse().map_err(|_| bad())?,
            stop: stop.parse().map_err(|_| bad())?,
            count: count.parse().map_err(|_| bad())?,
            geometric,
        };
        if axis.count == 0 || !axis.start.is_finite() || !axis.stop.is_finite() {
            return Err(bad());
        }
        if axis.geometric && !(axis.start > 0.0 && axis.stop > 0.0) {
            return Err(Error::domain(format!("geometric grid '{s}' needs positive endpoints")));
        }
        Ok(axis)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let m = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / m;
                if i + 1 == self.count {
                    self.stop
                } else if self.geometric {
                    self.start * (self.stop / self.start).powf(f)
                } else {
                    self.start + (self.stop - self.start) * f
                }
            })
            .collect()
    }
}

/// Cartesian product as `(param, r)` cells, parameter-major.
pub fn cells(params: &Axis, rs: &Axis) -> Vec<(f64, f64)> {
    let r = rs.points();
    params.points().into_iter().flat_map(|p| r.iter().map(move |&x| (p, x))).collect()
}

/// The 4×4 grid used by the representation suite.
pub fn standard_grid(space: Space, kind: KernelKind) -> (Axis, Axis) {
    let param = match (space, kind) {
        (Space::Negative, KernelKind::Poisson) => Axis::geometric(0.1, 3.0, 4),
        _ => Axis::geometric(0.1, 4.0, 4),
    };
    let r = match space {
        Space::Positive => Axis::linear(0.2, 2.9, 4),
        _ => Axis::linear(0.0, 3.0, 4),
    };
    (param, r)
}

/// A grid kept away from poles, where every kernel has a jet.
pub fn interior_grid(space: Space, kind: KernelKind) -> (Axis, Axis) {
    let param = match (space, kind) {
        (Space::Negative, KernelKind::Poisson) => Axis::geometric(0.3, 2.5, 3),
        _ => Axis::geometric(0.3, 2.0, 3),
    };
    let r = match space {
        Space::Positive => Axis::linear(0.5, 2.6, 3),
        _ => Axis::linear(0.5, 2.5, 3),
    };
    (param, r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Representations,
    Pde,
    Mass,
    Subordination,
    Semigroup,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Representations, Suite::Pde, Suite::Mass, Suite::Subordination, Suite::Semigroup];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Representations => "representations",
            Suite::Pde => "pde",
            Suite::Mass => "mass",
            Suite::Subordination => "subordination",
            Suite::Semigroup => "semigroup",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TolProfile {
    Strict,
    #[default]
    Default,
}

impl TolProfile {
    pub fn tol(self) -> f64 {
        match self {
            TolProfile::Strict => 1e-12,
            TolProfile::Default => 1e-10,
        }
    }
}

impl FromStr for TolProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(TolProfile::Strict),
            "default" => Ok(TolProfile::Default),
            other => Err(Error::domain(format!("unknown tolerance profile '{other}'"))),
        }
    }
}

/// What to run. Empty `spaces` or `dims` mean each suite's own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub spaces: Vec<Space>,
    pub dims: Vec<u32>,
    pub profile: TolProfile,
    pub exec: Execution,
}

impl SuiteOptions {
    fn spaces(&self) -> Vec<Space> {
        if self.spaces.is_empty() {
            Space::ALL.to_vec()
        } else {
            self.spaces.clone()
        }
    }

    fn dims(&self, default: &[u32]) -> Vec<u32> {
        if self.dims.is_empty() {
            default.to_vec()
        } else {
            self.dims.clone()
        }
    }

    fn eval(&self) -> EvalOptions {
        EvalOptions::with_tol(self.profile.tol())
    }
}

/// Runs `suite` and returns one report per configuration.
pub fn run(suite: Suite, opts: &SuiteOptions) -> Vec<ValidationReport> {
    match suite {
        Suite::Representations => representations(opts),
        Suite::Pde => pde(opts),
        Suite::Mass => mass(opts),
        Suite::Subordination => subordination(opts),
        Suite::Semigroup => semigroup(opts),
        Suite::All => Suite::EACH.iter().flat_map(|&s| run(s, opts)).collect(),
    }
}

fn agreement_threshold(space: Space) -> f64 {
    match space {
        Space::Flat => 1e-8,
        _ => 1e-7,
    }
}

fn error_flag(report: &mut ValidationReport, name: &str, e: &Error) {
    report.flags.push(Flag { name: name.into(), passed: false, value: f64::NAN, threshold: 0.0 });
    report.notes.push(format!("{name}: {e}"));
}

/// Every applicable representation on the standard grid, pairwise.
pub fn representations(opts: &SuiteOptions) -> Vec<ValidationReport> {
    let eval = opts.eval();
    let mut out = vec![];
    for space in opts.spaces() {
        for kind in [KernelKind::Heat, KernelKind::Poisson] {
            for n in opts.dims(&[1, 2, 3, 4, 5]) {
                let reps: Vec<Representation> = Representation::ALL
                    .into_iter()
                    .filter(|r| *r != Representation::Auto && r.applies(space, kind, n))
                    // the hyperbolic closed kernel is not a subordinated semigroup;
                    // the subordination suite sorts out the pairing
                    .filter(|r| !(space == Space::Negative && *r == Representation::Subordinate))
                    .collect();
                let (pa, ra) = standard_grid(space, kind);
                let grid = cells(&pa, &ra);
                let mut report = analysis::compare(space, n, kind, &grid, &reps, &eval, opts.exec);
                let thr = agreement_threshold(space);
                for d in &report.pairwise.clone() {
                    report.flags.push(Flag::below(format!("{}~{}", d.a, d.b), d.max_rel_diff, thr));
                }
                report.flags.push(Flag::below("cell-errors", report.errors.len() as f64, 0.0));
                if kind == KernelKind::Heat {
                    match sigma_shift(space, n, &eval) {
                        Ok(v) => report.flags.push(Flag::below("sigma-invariance", v, 1.0)),
                        Err(e) => error_flag(&mut report, "sigma-invariance", &e),
                    }
                }
                out.push(report);
            }
        }
    }
    out
}

/// Moves the Bromwich abscissa by ±50% at one interior point and returns the
/// largest change in units of the combined error estimates.
pub fn sigma_shift(space: Space, n: u32, opts: &EvalOptions) -> Result<f64> {
    let (t, r) = (0.8, 1.3);
    let base = match space {
        Space::Flat => euclid::default_sigma(r),
        Space::Positive => sphere::default_sigma(r),
        Space::Negative => std::f64::consts::PI,
    };
    let q = KernelQuery::heat(space, n, t, r);
    let at = |s: f64| evaluate(&q, Representation::Gruet, &EvalOptions { sigma: Some(s), ..*opts });
    let mid = at(base)?;
    let mut worst: f64 = 0.0;
    for f in [0.5, 1.5] {
        let e = at(base * f)?;
        // both estimates, plus a few ulps for the final roundoff
        let budget = mid.err_estimate + e.err_estimate + 8.0 * f64::EPSILON * mid.value.abs();
        worst = worst.max((e.value - mid.value).abs() / budget);
    }
    Ok(worst)
}

/// Heat and Poisson PDE residuals with a fitted shift.
pub fn pde(opts: &SuiteOptions) -> Vec<ValidationReport> {
    let eval = opts.eval();
    let mut out = vec![];
    for space in opts.spaces() {
        for kind in [KernelKind::Heat, KernelKind::Poisson] {
            for n in opts.dims(&[1, 2, 3, 4, 5]) {
                let (pa, ra) = interior_grid(space, kind);
                let grid = cells(&pa, &ra);
                let mut report = ValidationReport::new(space, n, kind);
                report.grid = grid.clone();
                match analysis::pde_residual(space, n, kind, &grid, &eval, None, opts.exec) {
                    Ok(c) => {
                        report.pde_residual_max = Some(c.max_rel_residual);
                        report.flags.push(Flag::below("pde-residual", c.max_rel_residual, 1e-5));
                        report.flags.push(Flag::below("richardson-ratio-error", (c.richardson_ratio - 4.0).abs(), 1.0));
                        report.notes.push(format!(
                            "fitted shift {:.9} (worst residual at {}={}, r={})",
                            c.lambda,
                            kind.param_name(),
                            c.at.0,
                            c.at.1
                        ));
                        if kind == KernelKind::Heat {
                            let want = Convention::Paper.heat_shift(space, n);
                            report.flags.push(Flag::below("shift-vs-convention", (c.lambda - want).abs(), 1e-4));
                        }
                    }
                    Err(e) => error_flag(&mut report, "pde-residual", &e),
                }
                out.push(report);
            }
        }
    }
    out
}

/// Heat masses and their exponential rate; Poisson masses and multiplicativity.
pub fn mass(opts: &SuiteOptions) -> Vec<ValidationReport> {
    let eval = opts.eval();
    let mut out = vec![];
    for space in opts.spaces() {
        for n in opts.dims(&[1, 2, 3, 4, 5]) {
            let mut report = ValidationReport::new(space, n, KernelKind::Heat);
            let ts = [0.25, 0.5, 1.0, 2.0];
            report.grid = ts.iter().map(|&t| (t, 0.0)).collect();
            let lambda = Convention::Paper.heat_shift(space, n);
            let m = |t: f64| analysis::kernel_mass(&KernelQuery::heat(space, n, t, 0.0), Representation::Auto, &eval);
            let fit = analysis::fit_spectral_shift(|t| m(t).map(|q| q.value), &ts);
            match fit {
                Ok(f) => {
                    let dev = f.table.iter().fold(0.0f64, |d, &(t, v)| d.max((v / (lambda * t).exp() - 1.0).abs()));
                    report.flags.push(Flag::below("mass-vs-e^{shift t}", dev, 1e-8));
                    report.flags.push(Flag::below("fitted-shift-error", (f.lambda - lambda).abs(), 1e-6));
                    report.mass_table = f.table.clone();
                    report.fitted_shift = Some(f);
                }
                Err(e) => error_flag(&mut report, "heat-mass", &e),
            }
            out.push(report);

            if space == Space::Negative && n >= 3 {
                // the kernel decays like e^{-(n+1)ρ/2} against volume e^{(n-1)ρ}
                let mut r = ValidationReport::new(space, n, KernelKind::Poisson);
                r.notes.push("Poisson mass is infinite for n >= 3".into());
                out.push(r);
                continue;
            }
            let mut report = ValidationReport::new(space, n, KernelKind::Poisson);
            let ys = [0.25, 0.5, 1.0, 2.0];
            report.grid = ys.iter().map(|&y| (y, 0.0)).collect();
            let pm = |y: f64| {
                analysis::kernel_mass(&KernelQuery::poisson(space, n, y, 0.0), Representation::Closed, &eval).map(|q| q.value)
            };
            let table: Result<Vec<(f64, f64)>> = ys.iter().map(|&y| Ok((y, pm(y)?))).collect();
            match table {
                Ok(t) => {
                    if space == Space::Flat {
                        let dev = t.iter().fold(0.0f64, |d, &(_, v)| d.max((v - 1.0).abs()));
                        report.flags.push(Flag::below("mass-one", dev, 1e-10));
                    }
                    // M(0.5)² against M(1) shows whether heights compose as a semigroup
                    let mult = (t[1].1 * t[1].1 / t[2].1 - 1.0).abs();
                    report.notes.push(format!("|M(0.5)^2/M(1) - 1| = {mult:.3e}"));
                    if space != Space::Negative {
                        report.flags.push(Flag::below("multiplicative", mult, 1e-8));
                    }
                    if let Ok(f) = analysis::fit_spectral_shift(|y| pm(y), &ys) {
                        report.notes.push(format!("ln M(y) slope {:.9}", f.lambda));
                    }
                    report.mass_table = t;
                }
                Err(e) => error_flag(&mut report, "poisson-mass", &e),
            }
            out.push(report);
        }
    }
    out
}

/// One `(convention, extra shift)` pairing tried in the subordination sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub convention: Convention,
    /// Added to the generator: the heat kernel is multiplied by `e^{shift t}`.
    pub shift: f64,
    /// Largest relative difference from the closed Poisson kernel, or `None`
    /// when subordination failed (for a growing heat kernel).
    pub max_rel_diff: Option<f64>,
}

/// Subordinates heat kernels of `Δ + λ` for a sweep of `λ` and reports which
/// generator each closed Poisson kernel belongs to.
pub fn pairing_sweep(space: Space, n: u32, opts: &EvalOptions) -> Vec<Pairing> {
    let q = (n as f64 - 1.0).powi(2) / 4.0;
    let ys = match space {
        Space::Negative => [0.3, 1.0, 2.0],
        _ => [0.3, 1.0, 2.5],
    };
    let rs = [0.2, 1.0, 2.0];
    let mut out = vec![];
    for convention in [Convention::Paper, Convention::Markovian] {
        let shifts: &[f64] = if q == 0.0 { &[0.0] } else { &[-q, 0.0, q] };
        for &shift in shifts {
            let heat_opts = EvalOptions { convention, tol: opts.tol * 0.1, ..*opts };
            let mut worst = Some(0.0f64);
            'cells: for &y in &ys {
                for &r in &rs {
                    let heat = |t: f64| {
                        let h = evaluate(&KernelQuery::heat(space, n, t, r), Representation::Auto, &heat_opts)?.value;
                        let v = h * (shift * t).exp();
                        if !v.is_finite() {
                            return Err(Error::domain("heat kernel grows without bound"));
                        }
                        Ok(v)
                    };
                    let closed = evaluate(&KernelQuery::poisson(space, n, y, r), Representation::Closed, opts);
                    match (analysis::subordinate(heat, y, opts.tol), closed) {
                        (Ok(s), Ok(c)) => {
                            let d = ((s.value - c.value) / c.value).abs();
                            worst = worst.map(|w| w.max(d));
                        }
                        _ => {
                            worst = None;
                            break 'cells;
                        }
                    }
                }
            }
            out.push(Pairing { convention, shift, max_rel_diff: worst });
        }
    }
    out
}

/// Euclidean subordination against the closed Poisson kernel, then the
/// operator-pairing sweep on the sphere and hyperbolic space.
pub fn subordination(opts: &SuiteOptions) -> Vec<ValidationReport> {
    let eval = opts.eval();
    let mut out = vec![];
    for space in opts.spaces() {
        match space {
            Space::Flat => {
                for n in opts.dims(&[1, 2, 3, 4, 5]) {
                    let (pa, ra) = standard_grid(space, KernelKind::Poisson);
                    let grid = cells(&pa, &ra);
                    let reps = [Representation::Closed, Representation::Subordinate];
                    let mut report = analysis::compare(space, n, KernelKind::Poisson, &grid, &reps, &eval, opts.exec);
                    report.flags.push(Flag::below("subordinate~closed", report.max_pairwise(), 1e-8));
                    report.flags.push(Flag::below("cell-errors", report.errors.len() as f64, 0.0));
                    out.push(report);
                }
            }
            _ => {
                let dims = match space {
                    Space::Negative => opts.dims(&[1, 3]),
                    _ => opts.dims(&[1, 2, 3]),
                };
                for n in dims {
                    let mut report = ValidationReport::new(space, n, KernelKind::Poisson);
                    let sweep = pairing_sweep(space, n, &eval);
                    let best = sweep
                        .iter()
                        .filter_map(|p| p.max_rel_diff.map(|d| (d, p)))
                        .min_by(|a, b| a.0.total_cmp(&b.0));
                    for p in &sweep {
                        report.notes.push(match p.max_rel_diff {
                            Some(d) => format!("{} heat x e^({} t): max rel diff {d:.3e}", p.convention, p.shift),
                            None => format!("{} heat x e^({} t): subordination diverges", p.convention, p.shift),
                        });
                    }
                    match best {
                        Some((d, p)) if d < 1e-6 => report.notes.push(format!(
                            "closed Poisson kernel = subordinated {} heat kernel x e^({} t)",
                            p.convention, p.shift
                        )),
                        _ => report.notes.push(
                            "closed Poisson kernel is not the subordinate of any swept heat kernel".into(),
                        ),
                    }
                    let (pa, ra) = interior_grid(space, KernelKind::Poisson);
                    match analysis::pde_residual(space, n, KernelKind::Poisson, &cells(&pa, &ra), &eval, None, opts.exec) {
                        Ok(c) => report.notes.push(format!(
                            "closed Poisson kernel solves u_yy + (Δ + λ)u = 0 with fitted λ = {:.9} (residual {:.1e})",
                            c.lambda, c.max_rel_residual
                        )),
                        Err(e) => report.notes.push(format!("PDE fit failed: {e}")),
                    }
                    out.push(report);
                }
            }
        }
    }
    out
}

/// Convolution of heat kernels against the kernel at the summed time.
pub fn semigroup(opts: &SuiteOptions) -> Vec<ValidationReport> {
    let eval = opts.eval();
    let cases = [
        (Space::Flat, 1, 0.5, 0.5, 1.0, 1e-8),
        (Space::Flat, 3, 0.3, 0.7, 2.0, 1e-8),
        (Space::Negative, 3, 0.5, 0.5, 1.0, 1e-5),
    ];
    let spaces = opts.spaces();
    let mut out = vec![];
    for (space, n, t, s, r, thr) in cases {
        if !spaces.contains(&space) || !(opts.dims.is_empty() || opts.dims.contains(&n)) {
            continue;
        }
        let mut report = ValidationReport::new(space, n, KernelKind::Heat);
        report.grid = vec![(t + s, r)];
        match analysis::semigroup_check(space, n, t, s, r, &eval) {
            Ok(c) => {
                report.flags.push(Flag::below("semigroup", c.rel_dev, thr));
                report.notes.push(format!("t={t}, s={s}, r={r}: convolution {:e}, direct {:e}", c.convolution, c.direct));
            }
            Err(e) => error_flag(&mut report, "semigroup", &e),
        }
        out.push(report);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        assert_eq!(Axis::parse("0.1:10:3", true).unwrap().points(), vec![0.1, 1.0, 10.0]);
        assert_eq!(Axis::parse("0:2:3", false).unwrap().points(), vec![0.0, 1.0, 2.0]);
        assert_eq!(Axis::parse("1:4:2l", true).unwrap().points(), vec![1.0, 4.0]);
        assert!(Axis::parse("0:1:3g", false).is_err());
        assert!(Axis::parse("1:2", false).is_err());
        assert_eq!(Axis::parse("0.5", true).unwrap().points(), vec![0.5]);
    }

    #[test]
    fn cells_are_param_major() {
        let c = cells(&Axis::linear(1.0, 2.0, 2), &Axis::linear(0.0, 1.0, 3));
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], (1.0, 0.0));
        assert_eq!(c[3], (2.0, 0.0));
    }

    #[test]
    fn names() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
    }
}
