//! Acceptance criteria 1–11, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use ck_core::analysis::{self, kernel_mass};
use ck_core::euclid::{self, EvenForm};
use ck_core::jets::raise_operator;
use ck_core::suites::{self, cells, Axis, Suite, SuiteOptions};
use ck_core::{
    hyperbolic, sphere, Convention, EvalOptions, Execution, KernelKind, KernelQuery, Representation, Space,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn euclid_grid() -> Vec<(f64, f64)> {
    cells(&Axis::geometric(0.1, 4.0, 4), &Axis::linear(0.0, 3.0, 4))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let o = EvalOptions::with_tol(1e-11);
    let grid = euclid_grid();
    let heat = [Representation::Closed, Representation::Raise, Representation::Descent, Representation::Gruet];
    let poisson = [
        Representation::Closed,
        Representation::Raise,
        Representation::Descent,
        Representation::Integral,
        Representation::Subordinate,
    ];
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for n in 1..=5 {
        for (kind, reps) in [(KernelKind::Heat, &heat[..]), (KernelKind::Poisson, &poisson[..])] {
            let r = analysis::compare(Space::Flat, n, kind, &grid, reps, &o, Execution::default());
            worst = worst.max(r.max_pairwise());
            errors += r.errors.len();
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-8 && errors == 0 && secs < 60.0,
        format!("max pairwise rel diff {worst:.2e}, {errors} failed cells, {secs:.1} s"),
    )
}

fn criterion_2() -> Outcome {
    let tol = 1e-12;
    let mut flat: f64 = 0.0;
    for n in 1..=4 {
        for &(p, r) in &euclid_grid() {
            let h = euclid::heat_descent(n, p, r, tol).unwrap().value / euclid::heat_closed(n, p, r);
            let q = euclid::poisson_descent(n, p, r, tol).unwrap().value / euclid::poisson_closed(n, p, r);
            flat = flat.max((h - 1.0).abs()).max((q - 1.0).abs());
        }
    }
    let mut hyp: f64 = 0.0;
    for n in 1..=4 {
        for &(p, r) in &euclid_grid() {
            let direct = hyperbolic::heat_classical(n, p, r, tol).unwrap().value;
            let h = hyperbolic::heat_descent(n, p, r, 1e-11).unwrap().value / direct;
            hyp = hyp.max((h - 1.0).abs());
            let y = p.min(3.0);
            let q = hyperbolic::poisson_descent(n, y, r, tol).unwrap().value / hyperbolic::poisson_closed(n, y, r);
            hyp = hyp.max((q - 1.0).abs());
        }
    }
    outcome(
        flat < 1e-9 && hyp < 1e-7,
        format!("descent/direct - 1: Euclidean {flat:.2e}, hyperbolic {hyp:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let grid = euclid_grid();
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        for &(t, r) in &grid {
            let g = hyperbolic::heat_gruet(n, t, r, None, 1e-11).unwrap().value;
            let other = if n % 2 == 1 {
                hyperbolic::heat_raise_odd(n, t, r).unwrap().value
            } else {
                hyperbolic::heat_descent_even(n, t, r, EvenForm::RaiseInside, 1e-12).unwrap().value
            };
            worst = worst.max(rel(g, other));
        }
    }
    outcome(worst < 1e-7, format!("hyperbolic contour vs residue (n=3,5) and descent (n=2,4): {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let grid = cells(&Axis::geometric(0.1, 4.0, 4), &Axis::linear(0.2, 2.9, 6));
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for &(t, phi) in &grid {
            let g = sphere::heat_gruet(n, t, phi, None, 1e-11).unwrap().value;
            let theta = match n {
                1 => sphere::heat_theta_1(t, phi, 1e-14).unwrap(),
                2 => sphere::heat_theta_2(t, phi, 1e-12).unwrap().value,
                _ => sphere::heat_raise(n, t, phi, EvenForm::default(), 1e-12).unwrap().value,
            };
            worst = worst.max(rel(g, theta));
        }
    }
    outcome(worst < 1e-7, format!("spherical contour vs theta series, n=1..3: {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let o = EvalOptions::with_tol(1e-11);
    let mut parts = vec![];
    let mut ok = true;
    for space in Space::ALL {
        match suites::sigma_shift(space, 3, &o) {
            Ok(v) => {
                ok &= v < 1.0;
                parts.push(format!("{space} {v:.2}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{space} error {e}"));
            }
        }
    }
    outcome(ok, format!("|Δvalue| / (err₁ + err₂) under σ ± 50%: {}", parts.join(", ")))
}

fn criterion_6() -> Outcome {
    let o = EvalOptions::with_tol(1e-12);
    let mut flat: f64 = 0.0;
    for n in 1..=5 {
        for p in [0.25, 1.0, 3.0] {
            for q in [KernelQuery::heat(Space::Flat, n, p, 0.0), KernelQuery::poisson(Space::Flat, n, p, 0.0)] {
                let m = kernel_mass(&q, Representation::Closed, &o).unwrap().value;
                flat = flat.max((m - 1.0).abs());
            }
        }
    }
    let ts = [0.25, 0.5, 1.0, 2.0];
    let mass = |t: f64| kernel_mass(&KernelQuery::heat(Space::Negative, 3, t, 0.0), Representation::Raise, &o).map(|q| q.value);
    let mut hyp: f64 = 0.0;
    for &t in &ts {
        hyp = hyp.max((mass(t).unwrap() - t.exp()).abs());
    }
    let fit = analysis::fit_spectral_shift(mass, &ts).unwrap();
    let mut circle: f64 = 0.0;
    for t in [0.1, 1.0, 5.0, 20.0] {
        let m = kernel_mass(&KernelQuery::heat(Space::Positive, 1, t, 0.0), Representation::Theta, &o).unwrap().value;
        circle = circle.max((m - 1.0).abs());
    }
    let shift = (fit.lambda - 1.0).abs();
    outcome(
        flat < 1e-10 && hyp < 1e-8 && shift < 1e-6 && circle < 1e-10,
        format!(
            "Euclidean |M-1| {flat:.1e}; hyperbolic n=3 |M-e^t| {hyp:.1e}, fitted shift {:.9}; circle |M-1| {circle:.1e}",
            fit.lambda
        ),
    )
}

fn criterion_7() -> Outcome {
    let o = EvalOptions::with_tol(1e-11);
    let grid = cells(&Axis::geometric(0.1, 4.0, 4), &Axis::linear(0.0, 3.0, 4));
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for &(y, r) in &grid {
            let s = analysis::subordinate(|t| Ok(euclid::heat_closed(n, t, r)), y, 1e-12).unwrap().value;
            worst = worst.max(rel(s, euclid::poisson_closed(n, y, r)));
        }
    }
    let sphere_pair = suites::pairing_sweep(Space::Positive, 3, &o)
        .into_iter()
        .find(|p| p.max_rel_diff.is_some_and(|d| d < 1e-8));
    let hyp_pair = suites::pairing_sweep(Space::Negative, 3, &o)
        .into_iter()
        .find(|p| p.max_rel_diff.is_some_and(|d| d < 1e-6));
    let hyp_pde = analysis::pde_residual(
        Space::Negative,
        3,
        KernelKind::Poisson,
        &cells(&Axis::geometric(0.3, 2.5, 3), &Axis::linear(0.5, 2.5, 3)),
        &o,
        None,
        Execution::default(),
    )
    .unwrap();
    let sphere_desc = match &sphere_pair {
        Some(p) => format!("sphere closed kernel = subordinated {} heat x e^({} t)", p.convention, p.shift),
        None => "sphere closed kernel unmatched".into(),
    };
    let hyp_desc = match &hyp_pair {
        Some(p) => format!("hyperbolic closed kernel = subordinated {} heat x e^({} t)", p.convention, p.shift),
        None => format!(
            "hyperbolic closed kernel matches no subordinated heat kernel but solves u_yy + (Δ + {:.6})u = 0",
            hyp_pde.lambda
        ),
    };
    let identified = sphere_pair.is_some_and(|p| p.convention == Convention::Paper && p.shift == 0.0)
        && (hyp_pair.is_some() || (hyp_pde.lambda - 1.0).abs() < 1e-4);
    outcome(
        worst < 1e-8 && identified,
        format!("Euclidean n=1..3 max rel diff {worst:.2e}; {sphere_desc}; {hyp_desc}"),
    )
}

fn criterion_8() -> Outcome {
    let reports = suites::pde(&SuiteOptions::default());
    let mut worst: f64 = 0.0;
    let mut ratio_dev: f64 = 0.0;
    let mut failed = vec![];
    for r in &reports {
        worst = worst.max(r.pde_residual_max.unwrap_or(f64::INFINITY));
        for f in &r.flags {
            if f.name == "richardson-ratio-error" {
                ratio_dev = ratio_dev.max(f.value);
            }
            if (f.name == "pde-residual" || f.name == "richardson-ratio-error") && !f.passed {
                failed.push(format!("{} n={} {}", r.space, r.n, r.kind));
            }
        }
    }
    outcome(
        failed.is_empty() && worst < 1e-5,
        format!(
            "{} kernels, max rel residual {worst:.2e}, max |ratio-4| {ratio_dev:.2}{}",
            reports.len(),
            if failed.is_empty() { String::new() } else { format!(", failing: {}", failed.join("; ")) }
        ),
    )
}

fn criterion_9() -> Outcome {
    let points = [(0.3, 0.4), (0.3, 2.5), (1.0, 0.0), (1.0, 1.5), (2.5, 1.0), (2.5, 3.0)];
    let (mut vs_closed, mut mutual): (f64, f64) = (0.0, 0.0);
    for n in 1..=2 {
        for &(y, phi) in &points {
            let c = sphere::poisson_closed(n, y, phi);
            let v = sphere::poisson_doubling(n, y, phi, sphere::Doubling::V, 1e-13).unwrap().value;
            let p = sphere::poisson_doubling(n, y, phi, sphere::Doubling::Psi, 1e-13).unwrap().value;
            vs_closed = vs_closed.max(rel(v, c)).max(rel(p, c));
            mutual = mutual.max(rel(v, p));
        }
    }
    outcome(
        vs_closed < 1e-8 && mutual < 1e-8,
        format!("doubling vs closed {vs_closed:.2e}, v form vs ψ form {mutual:.2e}"),
    )
}

fn criterion_10() -> Outcome {
    let o = EvalOptions::with_tol(1e-11);
    let a = analysis::semigroup_check(Space::Flat, 1, 0.5, 0.5, 1.0, &o).unwrap();
    let b = analysis::semigroup_check(Space::Flat, 3, 0.3, 0.7, 2.0, &o).unwrap();
    let c = analysis::semigroup_check(Space::Negative, 3, 0.5, 0.5, 1.0, &o).unwrap();
    outcome(
        a.rel_dev < 1e-8 && b.rel_dev < 1e-8 && c.rel_dev < 1e-5,
        format!(
            "flat n=1 {:.2e}, flat n=3 {:.2e}, hyperbolic n=3 {:.2e}",
            a.rel_dev, b.rel_dev, c.rel_dev
        ),
    )
}

fn criterion_11() -> Outcome {
    let (t, r) = (0.5f64, 0.7f64);
    let g = move |s: f64, order: usize| Ok(euclid::heat_jet(1, t, s, order));
    let g0 = (4.0 * PI * t).powf(-0.5) * (-r * r / (4.0 * t)).exp();
    let g1 = -r / (2.0 * t) * g0;
    let g2 = (r * r / (4.0 * t * t) - 1.0 / (2.0 * t)) * g0;
    let mut worst: f64 = 0.0;
    for space in Space::ALL {
        let (w, w1) = match space {
            Space::Flat => (r, 1.0),
            Space::Positive => (r.sin(), r.cos()),
            Space::Negative => (r.sinh(), r.cosh()),
        };
        // D g = -g'/(2πw);  D²g = (g''w - g'w') / (4π² w³)
        let d1 = -g1 / (2.0 * PI * w);
        let d2 = (g2 * w - g1 * w1) / (4.0 * PI * PI * w.powi(3));
        worst = worst.max(rel(raise_operator(space, &g, 1, r).unwrap(), d1));
        worst = worst.max(rel(raise_operator(space, &g, 2, r).unwrap(), d2));
    }
    let start = Instant::now();
    let reports = suites::run(Suite::All, &SuiteOptions::default());
    let secs = start.elapsed().as_secs_f64();
    let passed = reports.iter().all(|r| r.passed());
    outcome(
        worst < 1e-12 && secs < 600.0 && passed,
        format!(
            "raise vs hand-derived k=1,2: {worst:.2e}; full validation ({} reports, all {}) in {secs:.1} s",
            reports.len(),
            if passed { "passed" } else { "NOT passed" }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut all = true;
    for (i, c) in criteria {
        let o = c();
        all &= o.passed;
        println!("{} {i}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
