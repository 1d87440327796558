//! Scalar abstraction over `f64` and a multiprecision float, plus complex numbers on top.
//!
//! Contour integrands are written once against [`Real`] and instantiated
//! either with `f64` or with [`Mp`]. `Mp` reads its working precision from a
//! thread-local set by [`MpScope`], so integrand code stays precision-agnostic.

use std::cell::{Cell, RefCell};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

pub trait Real: Clone + Send + Sync {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn is_negative(&self) -> bool;
    /// Unit roundoff of the current working precision.
    fn epsilon() -> f64;

    fn mul_f64(&self, c: f64) -> Self {
        self.mul(&Self::from_f64(c))
    }

    fn add_f64(&self, c: f64) -> Self {
        self.add(&Self::from_f64(c))
    }

    fn sinh_cosh(&self) -> (Self, Self) {
        let e = self.exp();
        let ei = Self::from_f64(1.0).div(&e);
        (e.sub(&ei).mul_f64(0.5), e.add(&ei).mul_f64(0.5))
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn epsilon() -> f64 {
        f64::EPSILON / 2.0
    }
    fn sinh_cosh(&self) -> (Self, Self) {
        (f64::sinh(*self), f64::cosh(*self))
    }
}

thread_local! {
    static PRECISION: Cell<usize> = const { Cell::new(128) };
    static CONSTS: RefCell<Option<Consts>> = const { RefCell::new(None) };
}

fn prec() -> usize {
    PRECISION.with(|p| p.get())
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| {
        let mut c = c.borrow_mut();
        let cc = c.get_or_insert_with(|| Consts::new().expect("constants cache"));
        f(cc)
    })
}

/// Sets the working precision of [`Mp`] on this thread until dropped.
pub struct MpScope {
    previous: usize,
}

impl MpScope {
    pub fn new(bits: usize) -> Self {
        let bits = bits.clamp(64, 1 << 16).div_ceil(64) * 64;
        let previous = PRECISION.with(|p| p.replace(bits));
        Self { previous }
    }

    pub fn bits() -> usize {
        prec()
    }
}

impl Drop for MpScope {
    fn drop(&mut self) {
        PRECISION.with(|p| p.set(self.previous));
    }
}

/// Multiprecision real at the thread's current [`MpScope`] precision.
#[derive(Clone, Debug)]
pub struct Mp(BigFloat);

impl Mp {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Mp(BigFloat::from_f64(x, prec().max(64)))
    }

    fn to_f64(&self) -> f64 {
        let b = &self.0;
        if b.is_nan() {
            return f64::NAN;
        }
        if b.is_inf() {
            return if b.is_inf_pos() { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if b.is_zero() {
            return 0.0;
        }
        let (Some(words), Some(e)) = (b.mantissa_digits(), b.exponent()) else {
            return f64::NAN;
        };
        // value = 0.m × 2^e with the most significant word last
        let top = *words.last().expect("non-empty mantissa") as f64;
        let mag = top * 2f64.powi(e - 64);
        match b.sign() {
            Some(Sign::Neg) => -mag,
            _ => mag,
        }
    }

    fn add(&self, o: &Self) -> Self {
        Mp(self.0.add(&o.0, prec(), RM))
    }
    fn sub(&self, o: &Self) -> Self {
        Mp(self.0.sub(&o.0, prec(), RM))
    }
    fn mul(&self, o: &Self) -> Self {
        Mp(self.0.mul(&o.0, prec(), RM))
    }
    fn div(&self, o: &Self) -> Self {
        Mp(self.0.div(&o.0, prec(), RM))
    }
    fn neg(&self) -> Self {
        Mp(self.0.neg())
    }
    fn abs(&self) -> Self {
        Mp(self.0.abs())
    }
    fn exp(&self) -> Self {
        with_consts(|cc| Mp(self.0.exp(prec(), RM, cc)))
    }
    fn sin(&self) -> Self {
        with_consts(|cc| Mp(self.0.sin(prec(), RM, cc)))
    }
    fn cos(&self) -> Self {
        with_consts(|cc| Mp(self.0.cos(prec(), RM, cc)))
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(prec(), RM))
    }
    fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
    fn epsilon() -> f64 {
        2f64.powi(-(prec() as i32))
    }
}

/// Complex number over a [`Real`] scalar.
#[derive(Clone, Debug)]
pub struct Cplx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Cplx<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Self { re: T::from_f64(re), im: T::from_f64(im) }
    }

    pub fn real(re: T) -> Self {
        Self { re, im: T::from_f64(0.0) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.re.mul(c), self.im.mul(c))
    }

    pub fn norm_sqr(&self) -> T {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Self::new(self.re.div(&d), self.im.neg().div(&d))
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Self::new(m.mul(&self.im.cos()), m.mul(&self.im.sin()))
    }

    pub fn sin(&self) -> Self {
        let (sh, ch) = self.im.sinh_cosh();
        Self::new(self.re.sin().mul(&ch), self.re.cos().mul(&sh))
    }

    pub fn cos(&self) -> Self {
        let (sh, ch) = self.im.sinh_cosh();
        Self::new(self.re.cos().mul(&ch), self.re.sin().mul(&sh).neg())
    }

    pub fn sinh(&self) -> Self {
        let (sh, ch) = self.re.sinh_cosh();
        Self::new(sh.mul(&self.im.cos()), ch.mul(&self.im.sin()))
    }

    pub fn cosh(&self) -> Self {
        let (sh, ch) = self.re.sinh_cosh();
        Self::new(ch.mul(&self.im.cos()), sh.mul(&self.im.sin()))
    }

    /// Principal square root, cut along the negative real axis.
    pub fn sqrt(&self) -> Self {
        let r = self.abs();
        let zero = T::from_f64(0.0);
        let s = self.re.abs().add(&r).mul_f64(0.5).sqrt();
        if s.to_f64() == 0.0 {
            return Self::new(zero.clone(), zero);
        }
        let half = self.im.div(&s.mul_f64(2.0));
        if !self.re.is_negative() {
            Self::new(s, half)
        } else if self.im.is_negative() {
            Self::new(half.abs(), s.neg())
        } else {
            Self::new(half.abs(), s)
        }
    }

    pub fn powi(&self, m: i32) -> Self {
        if m < 0 {
            return self.powi(-m).recip();
        }
        let mut out = Self::from_f64(1.0, 0.0);
        let mut base = self.clone();
        let mut e = m as u32;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        out
    }

    /// `z^{-(2m+1)/2}` on the principal branch.
    pub fn inv_pow_half(&self, two_m_plus_one: u32) -> Self {
        let m = (two_m_plus_one / 2) as i32;
        let mut p = self.powi(m);
        if two_m_plus_one % 2 == 1 {
            p = p.mul(&self.sqrt());
        }
        p.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_roundtrip_and_ops() {
        let _s = MpScope::new(192);
        let x = Mp::from_f64(1.25);
        assert_eq!(x.to_f64(), 1.25);
        assert_eq!(x.neg().to_f64(), -1.25);
        assert!((x.exp().to_f64() - 1.25f64.exp()).abs() < 1e-15);
        assert!((x.sin().to_f64() - 1.25f64.sin()).abs() < 1e-16);
        assert!((Mp::from_f64(2.0).sqrt().to_f64() - 2f64.sqrt()).abs() < 1e-16);
        assert_eq!(Mp::from_f64(0.0).to_f64(), 0.0);
        assert!(Mp::epsilon() < 1e-55);
    }

    #[test]
    fn mp_sees_below_double_cancellation() {
        let _s = MpScope::new(256);
        let big = Mp::from_f64(1e30);
        let tiny = Mp::from_f64(1.5);
        let back = big.add(&tiny).sub(&big);
        assert_eq!(back.to_f64(), 1.5);
    }

    #[test]
    fn scope_restores_precision() {
        let before = MpScope::bits();
        {
            let _s = MpScope::new(300);
            assert_eq!(MpScope::bits(), 320);
        }
        assert_eq!(MpScope::bits(), before);
    }

    #[test]
    fn complex_sqrt_branches() {
        for &(a, b) in &[(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (3.0, -4.0), (-1.0, 0.0)] {
            let z = Cplx::<f64>::from_f64(a, b);
            let s = z.sqrt();
            let back = s.mul(&s);
            assert!((back.re - a).abs() < 1e-14 && (back.im - b).abs() < 1e-14);
            assert!(s.re >= 0.0);
        }
    }

    #[test]
    fn complex_elementary_identities() {
        let z = Cplx::<f64>::from_f64(0.7, -1.3);
        let (s, c) = (z.sin(), z.cos());
        let one = s.mul(&s).add(&c.mul(&c));
        assert!((one.re - 1.0).abs() < 1e-14 && one.im.abs() < 1e-14);
        let (sh, ch) = (z.sinh(), z.cosh());
        let one = ch.mul(&ch).sub(&sh.mul(&sh));
        assert!((one.re - 1.0).abs() < 1e-14 && one.im.abs() < 1e-14);
        let e = z.exp().mul(&Cplx::from_f64(-0.7, 1.3).exp());
        assert!((e.re - 1.0).abs() < 1e-15 && e.im.abs() < 1e-15);
    }

    #[test]
    fn mp_and_double_complex_agree() {
        let zf = Cplx::<f64>::from_f64(0.4, -2.1).inv_pow_half(5);
        let _s = MpScope::new(128);
        let zm = Cplx::<Mp>::from_f64(0.4, -2.1).inv_pow_half(5);
        assert!((zf.re - zm.re.to_f64()).abs() < 1e-14);
        assert!((zf.im - zm.im.to_f64()).abs() < 1e-14);
    }
}
