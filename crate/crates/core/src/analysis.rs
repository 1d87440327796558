//! Cross-checks: subordination, masses and the spectral shift they reveal,
//! PDE residuals, pairwise comparison of representations, and the semigroup law.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{radial_laplacian, sphere_surface_coeff, KernelKind, KernelQuery, Space};
use crate::hyperbolic;
use crate::kernel::{evaluate, kernel_jet, EvalOptions, Representation};
use crate::quadrature::{integrate_rel, semi_infinite_rel, QuadResult};
use crate::special::log_inv_tol;

/// Largest time the subordination integral samples. The rest, `v < v₀`, is
/// taken as half its bound `v₀ |H(T_MAX)|` with the other half as its error,
/// which covers any kernel monotone in `t` out there.
const SUBORDINATION_T_MAX: f64 = 1e24;

/// `P(y) = (y/√π) ∫₀^∞ e^{-uy²} u^{-1/2} H(1/(4u)) du`, computed with `u = v²`
/// as `(2y/√π) ∫₀^∞ e^{-v²y²} H(1/(4v²)) dv`.
///
/// `heat` maps a time to the heat kernel at the fixed distance of interest.
pub fn subordinate(heat: impl Fn(f64) -> Result<f64> + Sync, y: f64, tol: f64) -> Result<QuadResult> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::domain(format!("y must be positive, got {y}")));
    }
    let v0 = 0.5 / SUBORDINATION_T_MAX.sqrt();
    let q = semi_infinite_rel(
        |v| {
            let g = (-v * v * y * y).exp();
            if g == 0.0 {
                return Ok(0.0);
            }
            Ok(g * heat(0.25 / (v * v))?)
        },
        v0,
        tol,
        0.0,
    )?;
    let head = 0.5 * v0 * heat(SUBORDINATION_T_MAX)?;
    let c = 2.0 * y / PI.sqrt();
    Ok(QuadResult {
        value: c * (q.value + head),
        err_estimate: c * (q.err_estimate + head.abs()),
        n_evals: q.n_evals + 1,
    })
}

/// `∫ kernel(r) |S^{n-1}| w(r)^{n-1} dr` over `[0, upper]`, or the whole
/// distance domain when `upper` is `None`.
pub fn mass(
    kernel: impl Fn(f64) -> Result<f64>,
    space: Space,
    n: u32,
    upper: Option<f64>,
    tol: f64,
) -> Result<QuadResult> {
    let omega = sphere_surface_coeff(n)?;
    let f = |r: f64| {
        let k = kernel(r)?;
        if k == 0.0 {
            return Ok(0.0);
        }
        Ok(k * omega * space.weight_unchecked(r).powi(n as i32 - 1))
    };
    let top = upper.unwrap_or(space.max_distance());
    if top.is_finite() {
        integrate_rel(f, 0.0, top, tol)
    } else {
        semi_infinite_rel(f, 0.0, tol, 0.0)
    }
}

/// Distance past which a heat kernel of time `t` contributes below `tol` to
/// its mass (the weight's growth included).
pub fn heat_mass_cutoff(space: Space, n: u32, t: f64, tol: f64) -> f64 {
    match space {
        Space::Positive => PI,
        Space::Flat => (4.0 * t * (log_inv_tol(tol) + 10.0 + n as f64 * (1.0 + t).ln())).sqrt() + 1.0,
        Space::Negative => hyperbolic::heat_cutoff(n, t, 0.0, tol) + (n as f64 - 1.0) * 2.0 * t,
    }
}

/// Mass of the heat or Poisson kernel for the query's space, dimension and parameter.
pub fn kernel_mass(q: &KernelQuery, rep: Representation, opts: &EvalOptions) -> Result<QuadResult> {
    let upper = match q.kind {
        KernelKind::Heat => Some(heat_mass_cutoff(q.space, q.n, q.param, opts.tol)),
        KernelKind::Poisson => None,
    };
    let inner = EvalOptions { tol: opts.tol * 0.01, ..*opts };
    mass(
        |r| evaluate(&KernelQuery { r, ..*q }, rep, &inner).map(|e| e.value),
        q.space,
        q.n,
        upper,
        opts.tol,
    )
}

/// Least-squares line `ln M(t) = a + λ t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftFit {
    pub lambda: f64,
    pub intercept: f64,
    /// Largest deviation of `ln M` from the fitted line.
    pub max_residual: f64,
    /// Standard error of the slope (zero for an exact fit).
    pub width: f64,
    pub table: Vec<(f64, f64)>,
}

/// Fits the exponential rate of `mass_of` over `t_grid`.
pub fn fit_spectral_shift(mass_of: impl Fn(f64) -> Result<f64>, t_grid: &[f64]) -> Result<ShiftFit> {
    if t_grid.len() < 3 {
        return Err(Error::domain("the shift fit needs at least three times"));
    }
    let mut table = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let m = mass_of(t)?;
        if !(m > 0.0) {
            return Err(Error::domain(format!("mass {m} at t = {t} is not positive")));
        }
        table.push((t, m));
    }
    let pts: Vec<(f64, f64)> = table.iter().map(|&(t, m)| (t, m.ln())).collect();
    let k = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let lm = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - lm)).sum();
    let lambda = sxy / sxx;
    let intercept = lm - lambda * tm;
    let res: Vec<f64> = pts.iter().map(|p| p.1 - intercept - lambda * p.0).collect();
    let max_residual = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let s2 = res.iter().map(|r| r * r).sum::<f64>() / (k - 2.0);
    Ok(ShiftFit { lambda, intercept, max_residual, width: (s2 / sxx).sqrt(), table })
}

/// Outcome of a PDE residual check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeCheck {
    /// The shift `λ` used: heat `(Δ+λ)u = ∂_t u`, Poisson `∂_y²u + (Δ+λ)u = 0`.
    pub lambda: f64,
    /// Whether `lambda` was fitted from the residuals themselves.
    pub fitted: bool,
    /// Largest residual relative to the sum of the magnitudes of its terms.
    pub max_rel_residual: f64,
    /// `(param, r)` where the largest residual occurred.
    pub at: (f64, f64),
    /// Residual ratio for a halved parameter step at a probe point (≈ 4 for a
    /// second-order stencil).
    pub richardson_ratio: f64,
}

struct PdeTerms {
    u: f64,
    lap: f64,
    /// `∂_t u` for heat, `-∂_y² u` for Poisson.
    rhs: f64,
}

fn pde_terms(q: &KernelQuery, opts: &EvalOptions, h: f64) -> Result<PdeTerms> {
    let j = kernel_jet(q, opts, 2)?;
    let lap = radial_laplacian(q.space, q.n, &j)?;
    let at = |p: f64| -> Result<f64> { Ok(kernel_jet(&KernelQuery { param: p, ..*q }, opts, 0)?.value()) };
    let (lo, hi) = (at(q.param - h)?, at(q.param + h)?);
    let rhs = match q.kind {
        KernelKind::Heat => (hi - lo) / (2.0 * h),
        KernelKind::Poisson => -(hi - 2.0 * j.value() + lo) / (h * h),
    };
    Ok(PdeTerms { u: j.value(), lap, rhs })
}

fn residual(t: &PdeTerms, lambda: f64) -> f64 {
    let scale = t.lap.abs() + t.rhs.abs() + (lambda * t.u).abs();
    (t.lap + lambda * t.u - t.rhs).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Parameter step: `10⁻⁴ t` for the first derivative in time, `10⁻³ y` for the
/// second derivative in height.
fn default_step(kind: KernelKind, p: f64) -> f64 {
    match kind {
        KernelKind::Heat => 1e-4 * p,
        KernelKind::Poisson => 1e-3 * p,
    }
}

/// Residual of the kernel's PDE over `grid` (pairs `(param, r)`), with the
/// spatial derivatives taken from jets and the parameter derivative from a
/// centered difference. When `lambda` is `None` it is fitted by weighted least
/// squares over the grid.
pub fn pde_residual(
    space: Space,
    n: u32,
    kind: KernelKind,
    grid: &[(f64, f64)],
    opts: &EvalOptions,
    lambda: Option<f64>,
    exec: Execution,
) -> Result<PdeCheck> {
    if grid.is_empty() {
        return Err(Error::domain("empty grid"));
    }
    let terms: Vec<Result<PdeTerms>> = exec.map(grid, |&(p, r)| {
        let q = KernelQuery { space, n, kind, param: p, r };
        pde_terms(&q, opts, default_step(kind, p))
    });
    let terms: Vec<PdeTerms> = terms.into_iter().collect::<Result<_>>()?;
    let (lambda, fitted) = match lambda {
        Some(l) => (l, false),
        None => {
            // minimise Σ ((lap + λu - rhs)/s)² with s the term scale at λ = 0
            let (mut num, mut den) = (0.0, 0.0);
            for t in &terms {
                let s = (t.lap.abs() + t.rhs.abs()).max(f64::MIN_POSITIVE);
                num += t.u * (t.rhs - t.lap) / (s * s);
                den += t.u * t.u / (s * s);
            }
            (num / den, true)
        }
    };
    let mut worst = (0.0, grid[0]);
    for (t, &cell) in terms.iter().zip(grid) {
        let r = residual(t, lambda);
        if r >= worst.0 {
            worst = (r, cell);
        }
    }
    // probe where truncation dominates: the candidate with the largest coarse residual
    let mut probe = (f64::NEG_INFINITY, 0.0, 0.0);
    for &(p, r) in [grid[0], grid[grid.len() / 2], grid[grid.len() - 1]].iter() {
        let q = KernelQuery { space, n, kind, param: p, r };
        let coarse = residual(&pde_terms(&q, opts, 0.04 * p)?, lambda);
        if coarse > probe.0 {
            let fine = residual(&pde_terms(&q, opts, 0.02 * p)?, lambda);
            probe = (coarse, fine, p);
        }
    }
    let (coarse, fine) = (probe.0, probe.1);
    Ok(PdeCheck {
        lambda,
        fitted,
        max_rel_residual: worst.0,
        at: worst.1,
        richardson_ratio: coarse / fine,
    })
}

/// Largest relative difference between two representations over a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDiff {
    pub a: Representation,
    pub b: Representation,
    pub max_rel_diff: f64,
    /// `(param, r)` of the largest difference.
    pub at: (f64, f64),
}

/// A cell that could not be evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub rep: Representation,
    pub param: f64,
    pub r: f64,
    pub message: String,
}

/// A named pass/fail outcome with the measured value and its threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Flag {
    /// Passes when `value <= threshold`.
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold }
    }
}

/// Results of a validation run over one (space, dimension, kind).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub space: Space,
    pub n: u32,
    pub kind: KernelKind,
    /// Cells as `(param, r)`.
    pub grid: Vec<(f64, f64)>,
    pub representations: Vec<Representation>,
    pub pairwise: Vec<PairDiff>,
    pub pde_residual_max: Option<f64>,
    pub fitted_shift: Option<ShiftFit>,
    pub mass_table: Vec<(f64, f64)>,
    pub flags: Vec<Flag>,
    pub errors: Vec<CellError>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn new(space: Space, n: u32, kind: KernelKind) -> Self {
        Self {
            space,
            n,
            kind,
            grid: vec![],
            representations: vec![],
            pairwise: vec![],
            pde_residual_max: None,
            fitted_shift: None,
            mass_table: vec![],
            flags: vec![],
            errors: vec![],
            notes: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }

    pub fn max_pairwise(&self) -> f64 {
        self.pairwise.iter().fold(0.0, |m, d| m.max(d.max_rel_diff))
    }
}

/// Evaluates every representation on every cell and records pairwise
/// differences. Failed cells are listed in `errors` and skipped in the diffs.
pub fn compare(
    space: Space,
    n: u32,
    kind: KernelKind,
    grid: &[(f64, f64)],
    reps: &[Representation],
    opts: &EvalOptions,
    exec: Execution,
) -> ValidationReport {
    let cells: Vec<(usize, usize)> = (0..reps.len()).flat_map(|i| (0..grid.len()).map(move |j| (i, j))).collect();
    let values = exec.map(&cells, |&(i, j)| {
        let (param, r) = grid[j];
        evaluate(&KernelQuery { space, n, kind, param, r }, reps[i], opts)
    });
    let mut report = ValidationReport::new(space, n, kind);
    report.grid = grid.to_vec();
    report.representations = reps.to_vec();
    let mut table = vec![vec![None; grid.len()]; reps.len()];
    for (&(i, j), v) in cells.iter().zip(values) {
        match v {
            Ok(e) => table[i][j] = Some(e.value),
            Err(e) => report.errors.push(CellError {
                rep: reps[i],
                param: grid[j].0,
                r: grid[j].1,
                message: e.to_string(),
            }),
        }
    }
    for a in 0..reps.len() {
        for b in a + 1..reps.len() {
            let mut worst = PairDiff { a: reps[a], b: reps[b], max_rel_diff: 0.0, at: grid[0] };
            for j in 0..grid.len() {
                if let (Some(x), Some(y)) = (table[a][j], table[b][j]) {
                    let d = (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
                    if d > worst.max_rel_diff || d.is_nan() {
                        worst.max_rel_diff = if d.is_nan() { f64::INFINITY } else { d };
                        worst.at = grid[j];
                    }
                }
            }
            report.pairwise.push(worst);
        }
    }
    report
}

/// Outcome of a semigroup check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemigroupCheck {
    /// `∫ H(t, d(x,z)) H(s, d(z,y)) dz`.
    pub convolution: f64,
    pub err_estimate: f64,
    /// `H(t+s, d(x,y))`.
    pub direct: f64,
    /// `e^{λ(t+s)}/(e^{λt}e^{λs})`, which is 1 for any fixed shift `λ`.
    pub shift_correction: f64,
    pub rel_dev: f64,
}

/// Half the distance between points at distances `r`, `rho` from a common
/// point with angle `θ` between them, through `sin²(θ/2)` to avoid cancellation.
fn half_distance(space: Space, r: f64, rho: f64, theta: f64) -> f64 {
    let s2 = (0.5 * theta).sin().powi(2);
    match space {
        Space::Flat => 0.5 * ((r - rho).powi(2) + 4.0 * r * rho * s2).sqrt(),
        Space::Positive => {
            let v = (0.5 * (r - rho)).sin().powi(2) + r.sin() * rho.sin() * s2;
            v.sqrt().min(1.0).asin()
        }
        Space::Negative => {
            let v = (0.5 * (r - rho)).sinh().powi(2) + r.sinh() * rho.sinh() * s2;
            v.sqrt().asinh()
        }
    }
}

/// Checks `∫ H(t, d(x,z)) H(s, d(z,y)) dz = H(t+s, d(x,y))` with `d(x,y) = r`,
/// reducing the integral over `z` to distance and angle from `x`.
pub fn semigroup_check(
    space: Space,
    n: u32,
    t: f64,
    s: f64,
    r: f64,
    opts: &EvalOptions,
) -> Result<SemigroupCheck> {
    let tol = opts.tol;
    let inner = EvalOptions { tol: tol * 0.01, ..*opts };
    let h = |time: f64, d: f64| -> Result<f64> {
        Ok(evaluate(&KernelQuery::heat(space, n, time, d), Representation::Auto, &inner)?.value)
    };
    let q = if n == 1 {
        if space == Space::Positive {
            // the circle: z over [-π, π]
            integrate_rel(|z: f64| Ok(h(t, z.abs())? * h(s, (z - r).abs().min(2.0 * PI - (z - r).abs()))?), -PI, PI, tol)?
        } else {
            let cut = heat_mass_cutoff(space, 1, t.max(s), tol);
            integrate_rel(|z: f64| Ok(h(t, z.abs())? * h(s, (z - r).abs())?), -cut, r + cut, tol)?
        }
    } else {
        let omega = sphere_surface_coeff(n - 1)?;
        let top = match space {
            Space::Positive => PI,
            _ => r + heat_mass_cutoff(space, n, t.max(s), tol),
        };
        let angular = |rho: f64| -> Result<f64> {
            let q = integrate_rel(
                |th: f64| Ok(h(s, 2.0 * half_distance(space, r, rho, th))? * th.sin().powi(n as i32 - 2)),
                0.0,
                PI,
                tol * 0.1,
            )?;
            Ok(q.value)
        };
        let mut kinks = vec![0.0];
        if r > 0.0 && r < top {
            kinks.push(r);
        }
        kinks.push(top);
        let mut acc = QuadResult { value: 0.0, err_estimate: 0.0, n_evals: 0 };
        for w in kinks.windows(2) {
            let part = integrate_rel(
                |rho: f64| {
                    let a = h(t, rho)?;
                    if a == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(a * space.weight_unchecked(rho).powi(n as i32 - 1) * angular(rho)?)
                },
                w[0],
                w[1],
                tol,
            )?;
            acc.value += part.value;
            acc.err_estimate += part.err_estimate;
            acc.n_evals += part.n_evals;
        }
        acc.scaled(omega)
    };
    let direct = h(t + s, r)?;
    Ok(SemigroupCheck {
        convolution: q.value,
        err_estimate: q.err_estimate,
        direct,
        shift_correction: 1.0,
        rel_dev: ((q.value - direct) / direct).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclid;

    #[test]
    fn subordination_examples() {
        let q = subordinate(|t| Ok(euclid::heat_closed(1, t, 0.0)), 1.0, 1e-12).unwrap();
        assert!((q.value - 1.0 / PI).abs() < 1e-10 / PI, "{}", q.value);
        let q = subordinate(|t| Ok(euclid::heat_closed(3, t, 1.0)), 1.0, 1e-12).unwrap();
        let want = euclid::poisson_closed(3, 1.0, 1.0);
        assert!(((q.value - want) / want).abs() < 1e-9);
    }

    #[test]
    fn mass_examples() {
        let m = mass(|r| Ok(euclid::heat_closed(2, 1.0, r)), Space::Flat, 2, None, 1e-12).unwrap();
        assert!((m.value - 1.0).abs() < 1e-10);
        let o = EvalOptions::with_tol(1e-10);
        let m = kernel_mass(&KernelQuery::heat(Space::Negative, 3, 1.0, 0.0), Representation::Raise, &o).unwrap();
        assert!((m.value / 1f64.exp() - 1.0).abs() < 1e-8);
        let m = |y: f64| kernel_mass(&KernelQuery::poisson(Space::Positive, 1, y, 0.0), Representation::Closed, &o).unwrap().value;
        assert!((m(1.0) - m(0.5) * m(0.5)).abs() < 1e-9);
    }

    #[test]
    fn shift_fit_examples() {
        let f = fit_spectral_shift(|t| Ok((0.3 + 1.5 * t).exp()), &[0.1, 0.5, 1.0, 2.0]).unwrap();
        assert!((f.lambda - 1.5).abs() < 1e-12 && (f.intercept - 0.3).abs() < 1e-12);
        let g = fit_spectral_shift(|t| Ok(7.0 * (0.3 + 1.5 * t).exp()), &[0.1, 0.5, 1.0, 2.0]).unwrap();
        assert!((g.lambda - f.lambda).abs() < 1e-12);
        assert!(fit_spectral_shift(|_| Ok(1.0), &[1.0, 2.0]).is_err());
        assert!(fit_spectral_shift(|_| Ok(0.0), &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn pde_examples() {
        let o = EvalOptions::with_tol(1e-12);
        let grid = [(0.5, 0.7), (1.0, 1.5), (2.0, 0.3)];
        for n in 1..=4 {
            let c = pde_residual(Space::Flat, n, KernelKind::Heat, &grid, &o, Some(0.0), Execution::Sequential).unwrap();
            assert!(c.max_rel_residual < 1e-5, "n={n}: {c:?}");
            assert!((c.richardson_ratio - 4.0).abs() < 0.5, "{c:?}");
        }
        let c = pde_residual(Space::Negative, 3, KernelKind::Heat, &grid, &o, None, Execution::Sequential).unwrap();
        assert!((c.lambda - 1.0).abs() < 1e-5 && c.max_rel_residual < 1e-5, "{c:?}");
        let c = pde_residual(Space::Flat, 2, KernelKind::Poisson, &grid, &o, Some(0.0), Execution::Sequential).unwrap();
        assert!(c.max_rel_residual < 1e-5, "{c:?}");
    }

    #[test]
    fn compare_flat() {
        let o = EvalOptions::with_tol(1e-11);
        let grid = [(0.3, 0.0), (1.0, 1.0), (2.0, 2.5)];
        let reps = [Representation::Closed, Representation::Raise, Representation::Gruet];
        let r = compare(Space::Flat, 3, KernelKind::Heat, &grid, &reps, &o, Execution::Parallel);
        assert!(r.errors.is_empty());
        assert_eq!(r.pairwise.len(), 3);
        assert!(r.max_pairwise() < 1e-8, "{:?}", r.pairwise);
    }

    #[test]
    fn semigroup_examples() {
        let o = EvalOptions::with_tol(1e-10);
        let c = semigroup_check(Space::Flat, 1, 0.5, 0.5, 1.0, &o).unwrap();
        assert!(c.rel_dev < 1e-9, "{c:?}");
        let c = semigroup_check(Space::Flat, 3, 0.3, 0.7, 2.0, &o).unwrap();
        assert!(c.rel_dev < 1e-8, "{c:?}");
    }
}
