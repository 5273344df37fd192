//! Minimal double-double arithmetic.
//!
//! Polynomial composition at high degree squares away precision: coefficients
//! of the composed numerator combine thousands of products of comparable
//! magnitude. When a configuration requests extended precision, composition
//! runs over complex double-double coefficients (roughly 106 significand
//! bits) and rounds back to f64 at the end. Only the handful of operations
//! composition needs are implemented: addition, multiplication, negation and
//! scaling by an f64.
//!
//! The error-free transformations are the classical Dekker/Knuth ones;
//! `two_prod` uses the fused multiply-add so the product error is exact.

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Requires |a| >= |b| (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

// Named methods instead of operator impls: every call site should read as
// an explicit error-free transform, not incidental arithmetic.
#[allow(clippy::should_implement_trait)]
impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s1, e1) = two_sum(self.hi, rhs.hi);
        let (s2, e2) = two_sum(self.lo, rhs.lo);
        let (s1, e1) = quick_two_sum(s1, e1 + s2);
        let (hi, lo) = quick_two_sum(s1, e1 + e2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn scale(self, s: f64) -> Dd {
        let (p, e) = two_prod(self.hi, s);
        let (hi, lo) = quick_two_sum(p, e + self.lo * s);
        Dd { hi, lo }
    }
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

/// Coefficient ring the composition routine is generic over: plain f64
/// complex numbers for the default path, double-double complex numbers for
/// the extended path. Only ring operations plus a rough magnitude (used for
/// normalisation and trimming, where f64 accuracy is plenty) are required.
pub trait Coeff: Copy {
    fn zero() -> Self;
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    fn add(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    /// Magnitude estimate in f64; exactness is not needed.
    fn abs_f64(self) -> f64;
}

impl Coeff for Complex64 {
    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        z
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        self
    }
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn abs_f64(self) -> f64 {
        self.norm()
    }
}

impl Coeff for CDd {
    #[inline]
    fn zero() -> Self {
        CDd {
            re: Dd::ZERO,
            im: Dd::ZERO,
        }
    }
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        CDd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    #[inline]
    fn add(self, rhs: Self) -> Self {
        CDd {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        // (a+bi)(c+di) = (ac - bd) + (ad + bc)i
        CDd {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        CDd {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }
    #[inline]
    fn abs_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
}
