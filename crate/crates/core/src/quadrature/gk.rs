//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The error heuristic is the QUADPACK one: `resasc·min(1, (200|K-G|/resasc)^{3/2})`
//! with a roundoff floor. Intervals are kept in a max-heap on their error and
//! the worst is bisected until the total error meets the request.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{QuadResult, QuadValue};
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];

/// Gauss weights for the odd-indexed Kronrod nodes, last one at the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_489_0,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// Default number of bisection levels before giving up.
pub const MAX_DEPTH: u32 = 60;

#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl AdaptiveOpts {
    pub fn relative(tol: f64) -> Self {
        Self { rel_tol: tol, abs_tol: 0.0, max_depth: MAX_DEPTH, max_intervals: 4000 }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs_tol = abs;
        self
    }
}

struct Segment<V> {
    a: f64,
    b: f64,
    depth: u32,
    value: V,
    err: f64,
    l1: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// One 15-point Kronrod panel with its embedded Gauss error estimate.
fn panel<V: QuadValue>(f: &mut impl FnMut(f64) -> Result<V>, a: f64, b: f64) -> Result<(V, f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc.zero_like();
    let mut gauss = fc.zero_like();
    kron.add_scaled(&fc, WGK[7]);
    gauss.add_scaled(&fc, WG[3]);
    let mut samples = Vec::with_capacity(15);
    samples.push((fc.clone(), WGK[7]));
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::Convergence {
                reason: format!("non-finite integrand near x = {}", c - dx),
                best: f64::NAN,
                err: f64::INFINITY,
            });
        }
        kron.add_scaled(&f1, WGK[j]);
        kron.add_scaled(&f2, WGK[j]);
        if j % 2 == 1 {
            gauss.add_scaled(&f1, WG[j / 2]);
            gauss.add_scaled(&f2, WG[j / 2]);
        }
        samples.push((f1, WGK[j]));
        samples.push((f2, WGK[j]));
    }
    if !fc.is_finite() {
        return Err(Error::Convergence {
            reason: format!("non-finite integrand at x = {c}"),
            best: f64::NAN,
            err: f64::INFINITY,
        });
    }
    let (mut resabs, mut resasc) = (0.0, 0.0);
    for (v, w) in &samples {
        resabs += w * v.norm();
        let mut centered = v.clone();
        centered.add_scaled(&kron, -0.5);
        resasc += w * centered.norm();
    }
    let mut diff = kron.clone();
    diff.add_scaled(&gauss, -1.0);
    let mut err = (diff.norm() * h).abs();
    let resasc = resasc * h.abs();
    let resabs = resabs * h.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    let mut value = kron.zero_like();
    value.add_scaled(&kron, h);
    Ok((value, err, resabs))
}

/// Adaptive integral of a (possibly vector-valued) function over `[a, b]`.
pub fn adaptive<V: QuadValue>(
    mut f: impl FnMut(f64) -> Result<V>,
    a: f64,
    b: f64,
    opts: AdaptiveOpts,
) -> Result<QuadResult<V>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("integration limits must be finite: [{a}, {b}]")));
    }
    let mut evals = 0usize;
    let mut counted = |x: f64| {
        evals += 1;
        f(x)
    };
    let (v0, e0, l0) = panel(&mut counted, a, b)?;
    let mut total = v0.clone();
    let mut total_err = e0;
    let mut total_l1 = l0;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, depth: 0, value: v0, err: e0, l1: l0 });
    let mut intervals = 1usize;
    loop {
        // Below ~100ε·∫|f| the answer is roundoff-limited and further splitting is futile.
        let target = (opts.rel_tol * total.norm())
            .max(opts.abs_tol)
            .max(100.0 * f64::EPSILON * total_l1);
        if total_err <= target {
            break;
        }
        let worst = heap.pop().expect("heap never empties");
        if worst.depth >= opts.max_depth || intervals >= opts.max_intervals {
            let best = total.norm();
            return Err(Error::Convergence {
                reason: format!(
                    "adaptive quadrature on [{a}, {b}] stopped after {intervals} intervals (depth {})",
                    worst.depth
                ),
                best,
                err: total_err,
            });
        }
        let m = 0.5 * (worst.a + worst.b);
        let (vl, el, ll) = panel(&mut counted, worst.a, m)?;
        let (vr, er, lr) = panel(&mut counted, m, worst.b)?;
        total.add_scaled(&worst.value, -1.0);
        total.add_scaled(&vl, 1.0);
        total.add_scaled(&vr, 1.0);
        total_err += el + er - worst.err;
        total_l1 += ll + lr - worst.l1;
        heap.push(Segment { a: worst.a, b: m, depth: worst.depth + 1, value: vl, err: el, l1: ll });
        heap.push(Segment { a: m, b: worst.b, depth: worst.depth + 1, value: vr, err: er, l1: lr });
        intervals += 1;
        // Recompute occasionally so the running sum does not drift.
        if intervals % 64 == 0 {
            let mut fresh = total.zero_like();
            let (mut fresh_err, mut fresh_l1) = (0.0, 0.0);
            for s in heap.iter() {
                fresh.add_scaled(&s.value, 1.0);
                fresh_err += s.err;
                fresh_l1 += s.l1;
            }
            total = fresh;
            total_err = fresh_err;
            total_l1 = fresh_l1;
        }
    }
    let mut value = total.zero_like();
    let mut err = 0.0;
    for s in heap.iter() {
        value.add_scaled(&s.value, 1.0);
        err += s.err;
    }
    Ok(QuadResult { value, err_estimate: err, n_evals: evals })
}
