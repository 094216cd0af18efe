//! Scalar substrate for everything else: complex arithmetic helpers,
//! principal-branch log-gamma, shifted factorials, q-shifted factorials, and
//! stable evaluation of terminating (basic) hypergeometric series.
//!
//! Series are summed term by term with a running term update
//! `t_{k+1} = t_k * ratio`. Degrees are small throughout, so no acceleration
//! is attempted. Two accumulation grades exist: the public engines keep
//! complex double precision with compensated (Neumaier) accumulation, and
//! crate-internal double-double variants serve the polynomial evaluators,
//! whose terminating sums can cancel far past a double's headroom.

pub mod dd;

use crate::{Error, Result};
use dd::{CxDd, Dd};
use std::f64::consts::{E, FRAC_PI_2, LN_2, PI};

/// Complex double — the working scalar for every evaluator.
pub type Cx = num_complex::Complex64;

/// Shorthand constructor, used pervasively in call sites and tests.
#[inline]
pub fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

// ---------------------------------------------------------------------------
// log-gamma
// ---------------------------------------------------------------------------

// Lanczos approximation constants (Pugh 2004, p. 116; same set statrs uses:
// r = 10.900511 with an 11-term kernel, ~1e-14 relative over the right
// half-plane).
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
const TWO_SQRT_E_OVER_PI: f64 = 1.8603827342052657173362492472666631120594218414085755;

/// Lanczos kernel, valid for Re z >= 0.5.
fn log_gamma_right(z: Cx) -> Cx {
    let mut s = cx(LANCZOS_DK[0], 0.0);
    for (i, dk) in LANCZOS_DK.iter().enumerate().skip(1) {
        s += dk / (z + (i as f64 - 1.0));
    }
    let w = (z - 0.5 + LANCZOS_R) / E;
    s.ln() + TWO_SQRT_E_OVER_PI.ln() + (z - 0.5) * w.ln()
}

/// log sin(pi z) on the branch that keeps the reflection formula for
/// log-gamma continuous off the real axis. For Im z >= 0 write
/// sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}), whose last factor stays
/// inside the unit disc; the conjugate symmetry handles Im z < 0.
fn log_sin_pi(z: Cx) -> Cx {
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    let e = (cx(0.0, 2.0 * PI) * z).exp();
    cx(-LN_2, FRAC_PI_2) + cx(0.0, -PI) * z + (Cx::new(1.0, 0.0) - e).ln()
}

/// Principal-branch log Gamma(z). Relative accuracy ~1e-13 for |z| <= 50.
///
/// Matches the standard continuous branch (real on the positive axis,
/// conjugate-symmetric, continued through the left half-plane by the
/// winding-corrected reflection formula).
pub fn log_gamma(z: Cx) -> Result<Cx> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole(format!("log_gamma pole at nonpositive integer z = {}", z.re)));
    }
    if z.re >= 0.5 {
        Ok(log_gamma_right(z))
    } else {
        // reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        Ok(cx(PI.ln(), 0.0) - log_sin_pi(z) - log_gamma_right(Cx::new(1.0, 0.0) - z))
    }
}

/// Gamma(z) = exp(log_gamma(z)). Overflows for large |z|; fine at desk scale.
pub fn gamma(z: Cx) -> Result<Cx> {
    log_gamma(z).map(|lg| lg.exp())
}

// ---------------------------------------------------------------------------
// shifted factorials
// ---------------------------------------------------------------------------

/// Shifted factorial (a)_n = a (a+1) ... (a+n-1); empty product = 1.
pub fn pochhammer(a: Cx, n: u32) -> Cx {
    let mut p = Cx::new(1.0, 0.0);
    for k in 0..n {
        p *= a + k as f64;
    }
    p
}

/// q-shifted factorial (a;q)_n = prod_{k<n} (1 - a q^k).
///
/// Any finite real base is accepted (a handful of closed forms are naturally
/// written with base 1/q); the (0,1) restriction only matters for the
/// infinite product.
pub fn q_pochhammer(a: Cx, q: f64, n: u32) -> Cx {
    let mut p = Cx::new(1.0, 0.0);
    let mut qk = 1.0;
    for _ in 0..n {
        p *= Cx::new(1.0, 0.0) - a * qk;
        qk *= q;
    }
    p
}

/// Infinite q-shifted factorial (a;q)_inf for 0 < q < 1, truncated once the
/// tail bound |a| q^k / (1-q) drops below 1e-17.
pub fn q_pochhammer_inf(a: Cx, q: f64) -> Result<Cx> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("(a;q)_inf requires 0 < q < 1, got q = {q}")));
    }
    let mut p = Cx::new(1.0, 0.0);
    let mut qk = 1.0;
    while a.norm() * qk / (1.0 - q) >= 1e-17 {
        p *= Cx::new(1.0, 0.0) - a * qk;
        qk *= q;
    }
    Ok(p)
}

/// Gaussian binomial [n choose k]_q; 0 outside 0 <= k <= n.
pub fn q_binomial(n: u32, k: i64, q: f64) -> f64 {
    if k < 0 || k > n as i64 {
        return 0.0;
    }
    let k = k as u32;
    let num = q_pochhammer(cx(q, 0.0), q, n).re;
    let d1 = q_pochhammer(cx(q, 0.0), q, k).re;
    let d2 = q_pochhammer(cx(q, 0.0), q, n - k).re;
    num / (d1 * d2)
}

// ---------------------------------------------------------------------------
// terminating series
// ---------------------------------------------------------------------------

/// A terminating (basic) hypergeometric series: numerator and denominator
/// parameter lists, argument, optional base q (present <=> basic series), and
/// the terminating degree n. One numerator parameter must encode the
/// termination: a parameter equal to -n classically, q^{-n} in the basic
/// case.
#[derive(Debug, Clone)]
pub struct SeriesSpec {
    pub numerator: Vec<Cx>,
    pub denominator: Vec<Cx>,
    pub argument: Cx,
    pub base: Option<f64>,
    pub terminating_degree: u32,
}

impl SeriesSpec {
    /// Classical terminating series (no base).
    pub fn classical(numerator: Vec<Cx>, denominator: Vec<Cx>, argument: Cx, n: u32) -> Self {
        SeriesSpec { numerator, denominator, argument, base: None, terminating_degree: n }
    }

    /// Basic series with base q.
    pub fn basic(numerator: Vec<Cx>, denominator: Vec<Cx>, argument: Cx, q: f64, n: u32) -> Self {
        SeriesSpec { numerator, denominator, argument, base: Some(q), terminating_degree: n }
    }

    fn check_terminating(&self) -> Result<()> {
        let n = self.terminating_degree;
        match self.base {
            None => {
                let target = -(n as f64);
                if self.numerator.iter().any(|a| (a - target).norm() <= 1e-9 * (1.0 + n as f64)) {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "no numerator parameter equals -{n}; series does not terminate at the declared degree"
                    )))
                }
            }
            Some(q) => {
                if !(0.0 < q && q < 1.0) {
                    return Err(Error::Domain(format!("series base must lie in (0,1), got {q}")));
                }
                let target = q.powi(-(n as i32));
                if self.numerator.iter().any(|a| (a - target).norm() <= 1e-9 * target) {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "no numerator parameter equals q^-{n}; series does not terminate at the declared degree"
                    )))
                }
            }
        }
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Default)]
struct Kahan {
    s: (f64, f64),
    c: (f64, f64),
}

impl Kahan {
    fn add(&mut self, z: Cx) {
        fn comp(s: &mut f64, c: &mut f64, x: f64) {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
        comp(&mut self.s.0, &mut self.c.0, z.re);
        comp(&mut self.s.1, &mut self.c.1, z.im);
    }

    fn sum(&self) -> Cx {
        cx(self.s.0 + self.c.0, self.s.1 + self.c.1)
    }
}

/// Terminating hypergeometric sum
/// sum_{k=0}^{n} prod (a_i)_k / prod (c_i)_k * z^k / k!.
///
/// Errors with a pole if a denominator Pochhammer vanishes before the
/// numerator terminates the series.
pub fn hyp_terminating(spec: &SeriesSpec) -> Result<Cx> {
    if spec.base.is_some() {
        return Err(Error::Domain("hyp_terminating requires a base-free spec".into()));
    }
    spec.check_terminating()?;
    let mut term = Cx::new(1.0, 0.0);
    let mut acc = Kahan::default();
    acc.add(term);
    for k in 0..spec.terminating_degree {
        let kf = k as f64;
        let mut num = spec.argument / (kf + 1.0);
        for a in &spec.numerator {
            num *= a + kf;
        }
        // A vanishing numerator factor zeroes every later term; stop before
        // probing denominators that may only blow up past the true cutoff.
        if num == Cx::new(0.0, 0.0) {
            break;
        }
        for c in &spec.denominator {
            let d = c + kf;
            if d.norm() <= 1e-12 * (1.0 + c.norm() + kf) {
                return Err(Error::Pole(format!(
                    "denominator parameter {c} hits a pole at series index {}",
                    k + 1
                )));
            }
            num /= d;
        }
        term *= num;
        acc.add(term);
    }
    Ok(acc.sum())
}

/// Terminating basic hypergeometric sum
/// sum_{k=0}^{n} prod (a_i;q)_k / prod (c_i;q)_k * z^k / (q;q)_k
/// (the r+1_phi_r convention with argument z).
pub fn basic_phi_terminating(spec: &SeriesSpec) -> Result<Cx> {
    let q = spec
        .base
        .ok_or_else(|| Error::Domain("basic_phi_terminating requires a base".into()))?;
    spec.check_terminating()?;
    let mut term = Cx::new(1.0, 0.0);
    let mut acc = Kahan::default();
    acc.add(term);
    let mut qk = 1.0; // q^k
    for k in 0..spec.terminating_degree {
        let mut num = spec.argument / (1.0 - q * qk);
        for a in &spec.numerator {
            num *= Cx::new(1.0, 0.0) - a * qk;
        }
        if num == Cx::new(0.0, 0.0) {
            break;
        }
        for c in &spec.denominator {
            let d = Cx::new(1.0, 0.0) - c * qk;
            if d.norm() <= 1e-13 * (1.0 + c.norm() * qk) {
                return Err(Error::Pole(format!(
                    "denominator parameter {c} hits a pole at series index {}",
                    k + 1
                )));
            }
            num /= d;
        }
        term *= num;
        acc.add(term);
        qk *= q;
    }
    Ok(acc.sum())
}

// ---------------------------------------------------------------------------
// double-double series engines
// ---------------------------------------------------------------------------

/// `hyp_terminating` with double-double accumulation, for the polynomial
/// evaluators: their sums can cancel far past a double's headroom at the top
/// of the supported degree range, and the realification bound downstream has
/// to survive that cancellation. Semantics (termination check, pole
/// detection, early cutoff) mirror the public engine exactly.
pub(crate) fn hyp_terminating_dd(spec: &SeriesSpec) -> Result<Cx> {
    if spec.base.is_some() {
        return Err(Error::Domain("hyp_terminating requires a base-free spec".into()));
    }
    spec.check_terminating()?;
    let num: Vec<CxDd> = spec.numerator.iter().map(|a| CxDd::from_f64(a.re, a.im)).collect();
    let den: Vec<CxDd> = spec.denominator.iter().map(|c| CxDd::from_f64(c.re, c.im)).collect();
    let z = CxDd::from_f64(spec.argument.re, spec.argument.im);
    let mut term = CxDd::ONE;
    let mut acc = CxDd::ONE;
    for k in 0..spec.terminating_degree {
        let kf = k as f64;
        let kdd = CxDd::real(Dd::from_f64(kf));
        let mut ratio = z.scale(Dd::from_f64(kf + 1.0).recip());
        for a in &num {
            ratio = ratio * (*a + kdd);
        }
        // A vanishing numerator factor zeroes every later term; stop before
        // probing denominators that may only blow up past the true cutoff.
        if ratio.is_zero() {
            break;
        }
        for (c, c_f64) in den.iter().zip(&spec.denominator) {
            let d = *c + kdd;
            if d.abs().to_f64() <= 1e-12 * (1.0 + c_f64.norm() + kf) {
                return Err(Error::Pole(format!(
                    "denominator parameter {c_f64} hits a pole at series index {}",
                    k + 1
                )));
            }
            ratio = ratio / d;
        }
        term = term * ratio;
        acc = acc + term;
    }
    Ok(cx(acc.re.to_f64(), acc.im.to_f64()))
}

/// `basic_phi_terminating` with double-double accumulation; see
/// [`hyp_terminating_dd`] for why the evaluators need it (basic-series terms
/// grow like q^{-n(n-1)/2} while the sum stays moderate).
/// Series data for the double-double basic engine. Unlike [`SeriesSpec`]
/// the parameters arrive as double-doubles: the terminating sums are
/// catastrophically ill-conditioned in their *derived* parameters, so the
/// evaluators must build quantities like q^{-n} or a·w coherently in
/// extended precision — a plain double's rounding of q^{-n} alone can cost
/// six digits of the final value even when the summation itself is exact.
pub(crate) struct SeriesSpecDd {
    pub numerator: Vec<CxDd>,
    pub denominator: Vec<CxDd>,
    pub argument: CxDd,
    pub base: Dd,
    pub terminating_degree: u32,
}

pub(crate) fn basic_phi_terminating_dd(spec: &SeriesSpecDd) -> Result<Cx> {
    let q = spec.base.to_f64();
    if !(0.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("series base must lie in (0,1), got {q}")));
    }
    let n = spec.terminating_degree;
    let target = CxDd::real(spec.base.powi(-(n as i64)));
    let scale = 1e-9 * target.re.to_f64();
    if !spec.numerator.iter().any(|a| (*a - target).abs().to_f64() <= scale) {
        return Err(Error::Domain(format!(
            "no numerator parameter equals q^-{n}; series does not terminate at the declared degree"
        )));
    }
    let qdd = spec.base;
    let mut term = CxDd::ONE;
    let mut acc = CxDd::ONE;
    let mut qk = Dd::ONE; // q^k
    for k in 0..n {
        let mut ratio = spec.argument.scale((Dd::ONE - qdd * qk).recip());
        for a in &spec.numerator {
            ratio = ratio * (CxDd::ONE - a.scale(qk));
        }
        if ratio.is_zero() {
            break;
        }
        let qk_f64 = qk.to_f64();
        for c in &spec.denominator {
            let d = CxDd::ONE - c.scale(qk);
            let c_norm = c.abs().to_f64();
            if d.abs().to_f64() <= 1e-13 * (1.0 + c_norm * qk_f64) {
                return Err(Error::Pole(format!(
                    "denominator parameter {} hits a pole at series index {}",
                    cx(c.re.to_f64(), c.im.to_f64()),
                    k + 1
                )));
            }
            ratio = ratio / d;
        }
        term = term * ratio;
        acc = acc + term;
        qk = qk * qdd;
    }
    Ok(cx(acc.re.to_f64(), acc.im.to_f64()))
}
