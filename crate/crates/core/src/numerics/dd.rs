//! Double-double arithmetic: unevaluated sums `hi + lo` of two doubles,
//! giving ~31 significant digits. The series engines and the coupling module
//! lean on this where terminating (basic) hypergeometric sums can lose most
//! of a double's mantissa to term cancellation.
//!
//! Core building blocks are the classical error-free transforms (TwoSum,
//! QuickTwoSum, and an FMA-based TwoProd); the transcendental kernels follow
//! the well-known QD library recipes (exp: argument reduction by ln 2 plus a
//! scaled Taylor tail; ln: one Newton correction of the double-precision
//! seed).

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// ln 2 to double-double precision.
    pub const LN2: Dd = Dd { hi: 0.693_147_180_559_945_3, lo: 2.319_046_813_846_299_6e-17 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Multiply by an exact power of two (splits exactly).
    #[inline]
    pub fn mul_pow2(self, p: f64) -> Dd {
        Dd { hi: self.hi * p, lo: self.lo * p }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "dd sqrt of negative value");
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let err = self - Dd::from_f64(ax) * ax;
        let (s, e) = quick_two_sum(ax, err.hi * (x * 0.5));
        Dd { hi: s, lo: e }
    }

    /// Integer power by binary exponentiation.
    pub fn powi(self, n: i64) -> Dd {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut r = Dd::ONE;
        let mut b = self;
        let mut n = n;
        while n != 0 {
            if n & 1 == 1 {
                r = r * b;
            }
            b = b * b;
            n >>= 1;
        }
        r
    }

    /// exp(self) to full double-double accuracy.
    pub fn exp(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        if self.hi > 700.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -746.0 {
            return Dd::ZERO;
        }
        let m = (self.hi / std::f64::consts::LN_2 + 0.5).floor();
        // reduce: self = m ln2 + 512 r with |r| <= ln2/1024
        let r = (self - Dd::LN2 * m).mul_pow2(1.0 / 512.0);
        // Taylor for exp(r) - 1
        let mut p = r * r;
        let mut s = r + p.mul_pow2(0.5);
        let mut fact = 2.0f64;
        let mut k = 3.0f64;
        loop {
            p = p * r;
            fact *= k;
            let t = p / fact;
            s = s + t;
            if t.hi.abs() < 1e-35 || k > 18.0 {
                break;
            }
            k += 1.0;
        }
        // square back: (1+s) <- (1+s)^2 nine times, tracking s to avoid
        // cancellation against the leading 1
        for _ in 0..9 {
            s = s.mul_pow2(2.0) + s * s;
        }
        let e = s + 1.0;
        // scale by 2^m
        e.mul_pow2(2.0f64.powi(m as i32))
    }

    /// Natural log for positive values: double seed plus one dd Newton step.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0, "dd ln of nonpositive value");
        let y0 = self.hi.ln();
        // y1 = y0 + x e^{-y0} - 1
        Dd::from_f64(y0) + self * Dd::from_f64(-y0).exp() - 1.0
    }

    /// q^t for real t: exp(t ln q). Exact-integer exponents of moderate size
    /// go through powi instead, which is cheaper and exact at t = 0, 1.
    pub fn powf(self, t: f64) -> Dd {
        if t == t.trunc() && t.abs() <= 512.0 {
            return self.powi(t as i64);
        }
        (self.ln() * t).exp()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd { hi: s1, lo: s2 }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, other: f64) -> Dd {
        self + Dd::from_f64(other)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, other: Dd) -> Dd {
        self + (-other)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, other: f64) -> Dd {
        self + Dd::from_f64(-other)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + (self.hi * other.lo + self.lo * other.hi);
        let (s, e) = quick_two_sum(p1, p2);
        Dd { hi: s, lo: e }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, other: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, other);
        let p2 = p2 + self.lo * other;
        let (s, e) = quick_two_sum(p1, p2);
        Dd { hi: s, lo: e }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self - other * q1;
        let q2 = r.hi / other.hi;
        let r = r - other * q2;
        let q3 = r.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, other: f64) -> Dd {
        self / Dd::from_f64(other)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

// ---------------------------------------------------------------------------
// complex double-double
// ---------------------------------------------------------------------------

/// Complex scalar with double-double components, for series whose terms
/// cancel catastrophically in plain doubles.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CxDd {
    pub re: Dd,
    pub im: Dd,
}

impl CxDd {
    pub const ZERO: CxDd = CxDd { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: CxDd = CxDd { re: Dd::ONE, im: Dd::ZERO };

    #[inline]
    pub fn new(re: Dd, im: Dd) -> CxDd {
        CxDd { re, im }
    }

    #[inline]
    pub fn from_f64(re: f64, im: f64) -> CxDd {
        CxDd { re: Dd::from_f64(re), im: Dd::from_f64(im) }
    }

    #[inline]
    pub fn real(re: Dd) -> CxDd {
        CxDd { re, im: Dd::ZERO }
    }

    #[inline]
    pub fn conj(self) -> CxDd {
        CxDd { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> Dd {
        self.norm_sqr().sqrt()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.re == Dd::ZERO && self.im == Dd::ZERO
    }

    /// Principal square root, branch cut along the negative real axis with
    /// the sign of a zero imaginary part deciding the side (as for doubles).
    pub fn sqrt(self) -> CxDd {
        if self.is_zero() {
            return CxDd::ZERO;
        }
        let r = self.abs();
        let u = ((r + self.re.abs()).mul_pow2(0.5)).sqrt();
        if self.re >= Dd::ZERO {
            CxDd { re: u, im: self.im / u.mul_pow2(2.0) }
        } else {
            let v = self.im.abs() / u.mul_pow2(2.0);
            let w = if self.im.hi.is_sign_negative() { -u } else { u };
            CxDd { re: v, im: w }
        }
    }

    /// Scale by a real double-double factor.
    #[inline]
    pub fn scale(self, s: Dd) -> CxDd {
        CxDd { re: self.re * s, im: self.im * s }
    }
}

impl Neg for CxDd {
    type Output = CxDd;
    #[inline]
    fn neg(self) -> CxDd {
        CxDd { re: -self.re, im: -self.im }
    }
}

impl Add for CxDd {
    type Output = CxDd;
    #[inline]
    fn add(self, o: CxDd) -> CxDd {
        CxDd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CxDd {
    type Output = CxDd;
    #[inline]
    fn sub(self, o: CxDd) -> CxDd {
        CxDd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for CxDd {
    type Output = CxDd;
    #[inline]
    fn mul(self, o: CxDd) -> CxDd {
        CxDd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Div for CxDd {
    type Output = CxDd;
    fn div(self, o: CxDd) -> CxDd {
        let inv = o.norm_sqr().recip();
        (self * o.conj()).scale(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// |got - want| with the reference held as an (hi, lo) pair.
    fn dd_err(got: Dd, want: Dd) -> f64 {
        (got - want).abs().to_f64()
    }

    #[test]
    fn error_free_transforms() {
        // representative cancellation case: (a + b) - a == b exactly in dd
        let a = Dd::from_f64(1e16);
        let b = Dd::from_f64(std::f64::consts::PI);
        let s = a + b - a;
        assert_eq!(s.to_f64(), std::f64::consts::PI);
        assert!(dd_err(s, b) == 0.0);
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = Dd::new(0.6, 1.1e-17);
        let b = Dd::new(-2.7, 3.3e-18);
        let r = a * b / b;
        assert!(dd_err(r, a) < 1e-31);
        let one = (a / b) * (b / a);
        assert!(dd_err(one, Dd::ONE) < 1e-31);
    }

    #[test]
    fn sqrt_squares_back() {
        for x in [2.0, 0.3, 1.7e-8, 91234.5] {
            let s = Dd::from_f64(x).sqrt();
            assert!(dd_err(s * s, Dd::from_f64(x)) < 1e-30 * (1.0 + x));
        }
        // 40-digit reference values
        assert!(dd_err(Dd::from_f64(2.0).sqrt(), Dd { hi: 1.4142135623730951, lo: -9.667293313452913e-17 }) < 1e-31);
        assert!(dd_err(Dd::from_f64(0.3).sqrt(), Dd { hi: 0.5477225575051661, lo: 2.890126723719787e-17 }) < 1e-31);
    }

    #[test]
    fn powi_reference() {
        // 0.6^37 against a 40-digit reference
        let got = Dd::from_f64(0.6).powi(37);
        let want = Dd { hi: 6.188654879094313e-9, lo: -1.1729657464320087e-26 };
        assert!(dd_err(got, want) < 1e-39);
        assert!(dd_err(Dd::from_f64(0.6).powi(-3) * Dd::from_f64(0.6).powi(3), Dd::ONE) < 1e-31);
    }

    #[test]
    fn exp_reference() {
        // 40-digit references
        let cases = [
            (0.5, Dd { hi: 1.6487212707001282, lo: -4.731568479435833e-17 }),
            (-3.2, Dd { hi: 0.04076220397836621, lo: -3.362474322397608e-18 }),
            (2.75, Dd { hi: 15.642631884188171, lo: 3.1177950824195657e-16 }),
            (-0.001, Dd { hi: 0.999000499833375, lo: -3.026024053145243e-17 }),
        ];
        for (x, want) in cases {
            let got = Dd::from_f64(x).exp();
            assert!(
                dd_err(got, want) < 1e-30 * want.hi.abs().max(1.0),
                "exp({x}): got {got:?} want {want:?}"
            );
        }
        assert_eq!(Dd::ZERO.exp(), Dd::ONE);
    }

    #[test]
    fn ln_reference() {
        let cases = [
            (2.0, Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 }),
            (0.7, Dd { hi: -0.35667494393873245, lo: 4.82556379937662e-18 }),
            (123.456, Dd { hi: 4.815884817283264, lo: 1.2224723590869397e-16 }),
        ];
        for (x, want) in cases {
            let got = Dd::from_f64(x).ln();
            assert!(dd_err(got, want) < 1e-31 * (1.0 + want.hi.abs()), "ln({x})");
        }
        // roundtrip
        for x in [1e-6, 0.37, 5.5, 2.0e9] {
            let r = Dd::from_f64(x).ln().exp();
            assert!(dd_err(r, Dd::from_f64(x)) < 1e-29 * x.max(1.0), "exp(ln({x}))");
        }
    }

    #[test]
    fn powf_matches_powi_and_exp_ln() {
        let q = Dd::from_f64(0.45);
        assert!(dd_err(q.powf(7.0), q.powi(7)) == 0.0);
        // non-integer exponent: q^2.5 == q^2 * sqrt(q)
        let got = q.powf(2.5);
        let want = q.powi(2) * q.sqrt();
        assert!(dd_err(got, want) < 1e-32);
        assert!(dd_err(q.powf(0.0), Dd::ONE) == 0.0);
    }

    #[test]
    fn ordering() {
        assert!(Dd::new(1.0, -1e-20) < Dd::ONE);
        assert!(Dd::from_f64(2.0) > Dd::from_f64(1.0));
        assert!(Dd::new(1.0, 0.0) == Dd::ONE);
    }

    #[test]
    fn complex_mul_div_roundtrip() {
        let z = CxDd::from_f64(1.7, -0.3);
        let w = CxDd::from_f64(-0.4, 2.2);
        let back = z * w / w;
        assert!(dd_err(back.re, z.re) < 1e-30);
        assert!(dd_err(back.im, z.im) < 1e-30);
        // i * i = -1
        let i = CxDd::from_f64(0.0, 1.0);
        let m1 = i * i;
        assert!(m1.re == Dd::from_f64(-1.0) && m1.im == Dd::ZERO);
    }

    #[test]
    fn complex_sqrt_branches() {
        // 40-digit reference for a second-quadrant point.
        let s = CxDd::from_f64(-0.7, 0.2).sqrt();
        assert!(dd_err(s.re, Dd { hi: 0.11834481173260582, lo: 1.6651576467717006e-18 }) < 1e-31);
        assert!(dd_err(s.im, Dd { hi: 0.8449884581839127, lo: -2.584475347288251e-17 }) < 1e-31);
        // Exact case and the positive-real axis.
        let s = CxDd::from_f64(3.0, 4.0).sqrt();
        assert!(dd_err(s.re, Dd::from_f64(2.0)) < 1e-31);
        assert!(dd_err(s.im, Dd::ONE) < 1e-31);
        let s = CxDd::from_f64(2.0, 0.0).sqrt();
        assert!(dd_err(s.re, Dd { hi: 1.4142135623730951, lo: -9.667293313452913e-17 }) < 1e-31);
        assert!(s.im == Dd::ZERO);
        // Negative real axis: the zero imaginary part's sign picks the side.
        let s = CxDd::from_f64(-2.0, 0.0).sqrt();
        assert!(s.re == Dd::ZERO);
        assert!(dd_err(s.im, Dd { hi: 1.4142135623730951, lo: -9.667293313452913e-17 }) < 1e-31);
        let s = CxDd::from_f64(-2.0, -0.0).sqrt();
        assert!(s.im.hi < 0.0);
        // Round trip through squaring.
        for (re, im) in [(0.3, -1.7), (-5.0, 0.01), (1e-8, 2.0)] {
            let z = CxDd::from_f64(re, im);
            let s = z.sqrt();
            let back = s * s;
            assert!(dd_err(back.re, z.re) < 1e-30 * (1.0 + re.abs()));
            assert!(dd_err(back.im, z.im) < 1e-30 * (1.0 + im.abs()));
        }
    }

    #[test]
    fn complex_abs_and_conj() {
        let z = CxDd::from_f64(3.0, -4.0);
        assert!(dd_err(z.abs(), Dd::from_f64(5.0)) < 1e-30);
        let p = z * z.conj();
        assert!(dd_err(p.re, Dd::from_f64(25.0)) < 1e-30);
        assert!(p.im == Dd::ZERO);
        assert!(CxDd::ZERO.is_zero() && !CxDd::ONE.is_zero());
        assert!(CxDd::ZERO.abs() == Dd::ZERO);
    }
}
