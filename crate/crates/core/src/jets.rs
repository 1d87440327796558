//! Truncated Taylor series ("jets") and the dimension-raising operator.
//!
//! A [`Jet`] of order `K` at center `c` stores `f⁽ⁱ⁾(c)/i!` for `i = 0..=K`.
//! Arithmetic and the elementary functions follow the usual truncated
//! power-series recurrences, so derivatives of composite radial functions are
//! exact up to rounding. The raising operator `D f = -f'/(2π w)` is applied at
//! the jet level: each application consumes one order.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::geometry::Space;

/// Largest order used for a plain `k`-fold raise (supports odd `n` up to 33).
pub const MAX_RAISE_ORDER: usize = 16;

/// Distance from a zero of the weight below which [`raise_operator`] refuses.
pub const POLE_GUARD: f64 = 1e-3;

/// Offset of the expansion center used when continuing across a pole.
const CONTINUATION_OFFSET: f64 = 0.05;
const CONTINUATION_ORDER: usize = 12;
/// Order kept by pole-centered jets; the truncation is `(d/R)^POLE_ORDER` for a
/// point `d < POLE_GUARD` from the pole and singularities at distance `R`.
const POLE_ORDER: usize = 24;
/// Farthest distance from a pole at which pole-centered jets are tried.
const POLE_REACH: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    center: f64,
    coeffs: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Jet {
    pub fn from_coeffs(center: f64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least its value");
        Self { center, coeffs }
    }

    pub fn constant(center: f64, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { center, coeffs }
    }

    /// The identity function `x ↦ x` expanded at `center`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = center;
        if order > 0 {
            coeffs[1] = 1.0;
        }
        Self { center, coeffs }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `f⁽ᵏ⁾(center)`.
    pub fn derivative_value(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.coeffs[k] * fact
    }

    /// Jet of `f'`, one order lower.
    pub fn derivative(&self) -> Jet {
        if self.order() == 0 {
            return Jet::constant(self.center, 0.0, 0);
        }
        let coeffs = (1..self.coeffs.len())
            .map(|i| i as f64 * self.coeffs[i])
            .collect();
        Jet { center: self.center, coeffs }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order());
        Jet { center: self.center, coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Evaluates the Taylor polynomial at `x`.
    pub fn eval_at(&self, x: f64) -> f64 {
        let dx = x - self.center;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * dx + c)
    }

    pub fn scale(&self, a: f64) -> Jet {
        self.map_coeffs(|c| a * c)
    }

    pub fn add_scalar(&self, a: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += a;
        out
    }

    fn map_coeffs(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet { center: self.center, coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::Jet(format!(
                "orders differ ({} vs {})",
                self.order(),
                other.order()
            )));
        }
        if self.center != other.center {
            return Err(Error::Jet(format!(
                "centers differ ({} vs {})",
                self.center, other.center
            )));
        }
        Ok(())
    }

    /// Checked binary arithmetic.
    pub fn arith(&self, other: &Jet, op: JetOp) -> Result<Jet> {
        self.check_compatible(other)?;
        match op {
            JetOp::Add => Ok(self.zip(other, |a, b| a + b)),
            JetOp::Sub => Ok(self.zip(other, |a, b| a - b)),
            JetOp::Mul => Ok(self.mul_unchecked(other)),
            JetOp::Div => {
                if other.value() == 0.0 {
                    return Err(Error::Jet("division by a jet with zero value".into()));
                }
                Ok(self.div_unchecked(other))
            }
        }
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect();
        Jet { center: self.center, coeffs }
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let k = self.coeffs.len();
        let mut out = vec![0.0; k];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs[..k - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet { center: self.center, coeffs: out }
    }

    fn div_unchecked(&self, other: &Jet) -> Jet {
        let k = self.coeffs.len();
        let b0 = other.coeffs[0];
        let mut q = vec![0.0; k];
        for n in 0..k {
            let mut acc = self.coeffs[n];
            for i in 1..=n {
                acc -= other.coeffs[i] * q[n - i];
            }
            q[n] = acc / b0;
        }
        Jet { center: self.center, coeffs: q }
    }

    pub fn recip(&self) -> Result<Jet> {
        Jet::constant(self.center, 1.0, self.order()).arith(self, JetOp::Div)
    }

    pub fn exp(&self) -> Jet {
        let a = &self.coeffs;
        let k = a.len();
        let mut e = vec![0.0; k];
        e[0] = a[0].exp();
        for n in 1..k {
            let s: f64 = (1..=n).map(|j| j as f64 * a[j] * e[n - j]).sum();
            e[n] = s / n as f64;
        }
        Jet { center: self.center, coeffs: e }
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = &self.coeffs;
        if a[0] <= 0.0 {
            return Err(Error::domain(format!("ln of a jet with value {}", a[0])));
        }
        let k = a.len();
        let mut l = vec![0.0; k];
        l[0] = a[0].ln();
        for n in 1..k {
            let s: f64 = (1..n).map(|j| j as f64 * l[j] * a[n - j]).sum();
            l[n] = (a[n] - s / n as f64) / a[0];
        }
        Ok(Jet { center: self.center, coeffs: l })
    }

    /// `(sin f, cos f)` from the coupled recurrence.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let a = &self.coeffs;
        let k = a.len();
        let mut s = vec![0.0; k];
        let mut c = vec![0.0; k];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for n in 1..k {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=n {
                let ja = j as f64 * a[j];
                ss += ja * c[n - j];
                cc += ja * s[n - j];
            }
            s[n] = ss / n as f64;
            c[n] = -cc / n as f64;
        }
        (Jet { center: self.center, coeffs: s }, Jet { center: self.center, coeffs: c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// `(sinh f, cosh f)` from the coupled recurrence.
    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        let a = &self.coeffs;
        let k = a.len();
        let mut s = vec![0.0; k];
        let mut c = vec![0.0; k];
        s[0] = a[0].sinh();
        c[0] = a[0].cosh();
        for n in 1..k {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=n {
                let ja = j as f64 * a[j];
                ss += ja * c[n - j];
                cc += ja * s[n - j];
            }
            s[n] = ss / n as f64;
            c[n] = cc / n as f64;
        }
        (Jet { center: self.center, coeffs: s }, Jet { center: self.center, coeffs: c })
    }

    pub fn sinh(&self) -> Jet {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Jet {
        self.sinh_cosh().1
    }

    /// `f^α` for real `α`; needs a positive value unless `α` is a
    /// non-negative integer.
    pub fn powf(&self, alpha: f64) -> Result<Jet> {
        let a = &self.coeffs;
        let integral = alpha.fract() == 0.0 && alpha >= 0.0;
        if a[0] == 0.0 {
            if integral {
                return Ok(self.powi(alpha as u32));
            }
            return Err(Error::domain("non-integer power of a jet with zero value"));
        }
        if a[0] < 0.0 && alpha.fract() != 0.0 {
            return Err(Error::domain(format!(
                "power {alpha} of a jet with negative value {}",
                a[0]
            )));
        }
        let k = a.len();
        let mut p = vec![0.0; k];
        p[0] = a[0].powf(alpha);
        for n in 1..k {
            let s: f64 = (1..=n)
                .map(|j| ((alpha + 1.0) * j as f64 - n as f64) * a[j] * p[n - j])
                .sum();
            p[n] = s / (n as f64 * a[0]);
        }
        Ok(Jet { center: self.center, coeffs: p })
    }

    pub fn powi(&self, m: u32) -> Jet {
        let mut out = Jet::constant(self.center, 1.0, self.order());
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        out
    }

    pub fn sqrt(&self) -> Result<Jet> {
        if self.value() < 0.0 || (self.value() == 0.0 && self.order() > 0) {
            return Err(Error::domain(format!("sqrt of a jet with value {}", self.value())));
        }
        self.powf(0.5)
    }

    /// `arccos f`, from `(arccos f)' = -f'/√(1-f²)`; needs `|value| < 1`.
    pub fn acos(&self) -> Result<Jet> {
        let a0 = self.value();
        if !(a0.abs() < 1.0) {
            return Err(Error::domain(format!("acos of a jet with value {a0}")));
        }
        let s = (self * self).scale(-1.0).add_scalar(1.0).sqrt()?;
        let dq = (-self.derivative()).arith(&s.truncate(self.order().saturating_sub(1)), JetOp::Div)?;
        Ok(self.integrate_from(a0.acos(), &dq))
    }

    fn integrate_from(&self, value: f64, d: &Jet) -> Jet {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        coeffs[0] = value;
        for i in 1..coeffs.len() {
            coeffs[i] = d.coeffs[i - 1] / i as f64;
        }
        Jet { center: self.center, coeffs }
    }

    /// `outer ∘ self`, where `outer` is expanded at `self.value()`.
    pub fn compose(outer: &Jet, inner: &Jet) -> Result<Jet> {
        if (outer.center - inner.value()).abs() > 1e-12 * outer.center.abs().max(1.0) {
            return Err(Error::Jet(format!(
                "outer jet centered at {} but inner value is {}",
                outer.center,
                inner.value()
            )));
        }
        let order = inner.order();
        let mut delta = inner.clone();
        delta.coeffs[0] = 0.0;
        let mut out = Jet::constant(inner.center, 0.0, order);
        for &c in outer.coeffs[..=order.min(outer.order())].iter().rev() {
            out = out.mul_unchecked(&delta).add_scalar(c);
        }
        Ok(out)
    }
}

/// Checked jet arithmetic.
pub fn jet_arith(a: &Jet, b: &Jet, op: JetOp) -> Result<Jet> {
    a.arith(b, op)
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            /// Panics on mismatched center or order; use [`Jet::arith`] for a checked version.
            fn $method(self, rhs: &Jet) -> Jet {
                self.arith(rhs, $op).expect("jet operands must share center and order")
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
    };
}

jet_binop!(Add, add, JetOp::Add);
jet_binop!(Sub, sub, JetOp::Sub);
jet_binop!(Mul, mul, JetOp::Mul);
jet_binop!(Div, div, JetOp::Div);

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self.add_scalar(-rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// A radial function that can hand out its jet at any center.
///
/// Jets of different orders at the same center must agree on shared coefficients.
pub trait RadialGenerator {
    fn jet(&self, r: f64, order: usize) -> Result<Jet>;
}

impl<F> RadialGenerator for F
where
    F: Fn(f64, usize) -> Result<Jet>,
{
    fn jet(&self, r: f64, order: usize) -> Result<Jet> {
        self(r, order)
    }
}

/// Jet of `1/(2π w(r))` at `r`.
fn inverse_weight_jet(space: Space, r: f64, order: usize) -> Result<Jet> {
    space.weight_jet(&Jet::variable(r, order)).scale(2.0 * PI).recip()
}

/// Jet of `D^k g` at `r`, carrying `extra` orders beyond the value.
///
/// Requests a jet of order `k + extra` from `g` and applies `D` `k` times.
pub fn raise_jet(
    space: Space,
    g: &impl RadialGenerator,
    k: usize,
    r: f64,
    extra: usize,
) -> Result<Jet> {
    check_off_pole(space, r)?;
    let mut f = g.jet(r, k + extra)?;
    if f.order() != k + extra {
        return Err(Error::Jet(format!(
            "generator returned order {} instead of {}",
            f.order(),
            k + extra
        )));
    }
    for _ in 0..k {
        let d = f.derivative();
        let inv = inverse_weight_jet(space, r, d.order())?;
        f = -(d * inv);
    }
    Ok(f)
}

/// `(D^k g)(r)` with `D = -(2π w)⁻¹ d/dr`.
pub fn raise_operator(space: Space, g: &impl RadialGenerator, k: usize, r: f64) -> Result<f64> {
    Ok(raise_jet(space, g, k, r, 0)?.value())
}

fn check_off_pole(space: Space, r: f64) -> Result<()> {
    if !space.contains(r) {
        return Err(Error::domain(format!("distance {r} outside the {space} domain")));
    }
    if space.distance_to_pole(r) < POLE_GUARD {
        return Err(Error::SingularPoint(format!(
            "r = {r} is within {POLE_GUARD} of a zero of the {space} weight"
        )));
    }
    Ok(())
}

/// Jet of `D^k g` at any `r` in the domain, including near a zero of the weight.
///
/// Close to a pole the kernel is even about it, so `D` is applied to the jet
/// centered on the pole itself, where both `g'` and `w` vanish and their
/// quotient is a shifted series division; the Taylor polynomial is then
/// re-expanded at `r`. That is used whenever its truncated tail is at rounding
/// level, since the plain raise at `r` cancels like `ε/d^{k-1}` at distance `d`.
/// Otherwise the plain raise is used, or within `POLE_GUARD` of a pole a
/// generator without a finite jet there is expanded `CONTINUATION_OFFSET`
/// away. The center used, if not `r`, is returned.
pub fn raise_jet_anywhere(
    space: Space,
    g: &impl RadialGenerator,
    k: usize,
    r: f64,
    extra: usize,
) -> Result<(Jet, Option<f64>)> {
    if !space.contains(r) {
        return Err(Error::domain(format!("distance {r} outside the {space} domain")));
    }
    if k == 0 {
        return Ok((g.jet(r, extra)?, None));
    }
    let d = space.distance_to_pole(r);
    let pole = if r < PI / 2.0 || space != Space::Positive { 0.0 } else { PI };
    if d < POLE_REACH {
        if let Ok(j) = raise_jet_at_pole(space, g, k, pole, POLE_ORDER + extra) {
            if d < POLE_GUARD || tail_is_negligible(&j, d) {
                return Ok((reexpand(&j, r, extra), Some(pole)));
            }
        }
    }
    if d >= POLE_GUARD {
        return Ok((raise_jet(space, g, k, r, extra)?, None));
    }
    let center = if pole == 0.0 { CONTINUATION_OFFSET } else { PI - CONTINUATION_OFFSET };
    let wide = raise_jet(space, g, k, center, CONTINUATION_ORDER + extra)?;
    Ok((reexpand(&wide, r, extra), Some(center)))
}

/// Whether the last few terms of the series at distance `d` are below rounding.
fn tail_is_negligible(j: &Jet, d: f64) -> bool {
    let c = j.coeffs();
    let head: f64 = c.iter().enumerate().map(|(i, a)| (a * d.powi(i as i32)).abs()).fold(0.0, f64::max);
    let tail = c[c.len() - 4..]
        .iter()
        .enumerate()
        .map(|(i, a)| (a * d.powi((c.len() - 4 + i) as i32)).abs())
        .fold(0.0, f64::max);
    head > 0.0 && tail <= f64::EPSILON * head
}

/// Jet of `D^k g` of the given order centered on a zero of the weight.
fn raise_jet_at_pole(space: Space, g: &impl RadialGenerator, k: usize, pole: f64, order: usize) -> Result<Jet> {
    let mut f = g.jet(pole, 2 * k + order)?;
    if f.order() != 2 * k + order || f.coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Jet(format!("generator has no finite jet at the pole {pole}")));
    }
    let shift = |j: &Jet| Jet { center: pole, coeffs: j.coeffs[1..].to_vec() };
    for _ in 0..k {
        let d = f.derivative();
        let w = space.weight_jet(&Jet::variable(pole, d.order())).scale(2.0 * PI);
        f = -(shift(&d).div_unchecked(&shift(&w)));
    }
    Ok(f)
}

/// Rough relative roundoff of a `k`-fold raise continued across a pole.
///
/// Pole-centered jets lose a few ulps per application; the offset expansion
/// divides by a jet of `w` whose coefficients grow like `offset^{-i}`, which
/// cancels on re-expansion but costs about `K²` per application at order `K`.
pub fn continuation_rel_error(k: usize, center: f64) -> f64 {
    if center == 0.0 || center == PI {
        64.0 * (k as f64 + 1.0) * f64::EPSILON
    } else {
        (CONTINUATION_ORDER as f64).powi(2 * k as i32) * f64::EPSILON
    }
}

/// Re-expands a jet's Taylor polynomial about a new center, keeping `order` terms.
pub fn reexpand(jet: &Jet, new_center: f64, order: usize) -> Jet {
    let dx = new_center - jet.center();
    let c = jet.coeffs();
    let k = c.len();
    let order = order.min(k - 1);
    let mut out = vec![0.0; order + 1];
    // coefficient m of the shifted series: Σ_{i≥m} C(i,m) c_i dx^{i-m}
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        let mut binom = 1.0;
        let mut pow = 1.0;
        for i in m..k {
            if i > m {
                binom = binom * i as f64 / (i - m) as f64;
                pow *= dx;
            }
            acc += binom * c[i] * pow;
        }
        *slot = acc;
    }
    Jet::from_coeffs(new_center, out)
}
