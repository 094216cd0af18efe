//! Polynomial families of the Askey scheme and its q-analogue: definitions,
//! evaluators, orthonormal normalisations, three-term recurrences, and weight
//! functions.
//!
//! Every family is evaluated from its terminating (basic) hypergeometric
//! definition through [`crate::numerics`]. Evaluation is complex throughout;
//! when the parameter set guarantees a real value at a real argument the
//! result is realified (imaginary part checked against `1e-10 * (1 + |Re|)`
//! and then dropped).
//!
//! Families whose natural argument is a transformed spectral variable
//! (Askey-Wilson x = μ(z), Racah λ(x), q-Racah ν(x), dual q-Krawtchouk y(x))
//! take that spectral value as the argument of [`eval`]; the inversion back to
//! the series variables happens internally. [`ArgumentMap`] provides the
//! forward maps.

mod weight;

pub use weight::{weight, WeightEval};

use crate::numerics::{
    self, basic_phi_terminating_dd, cx, hyp_terminating_dd, pochhammer, q_binomial, q_pochhammer,
    Cx, SeriesSpec,
};
use crate::spectral::{Dimension, JacobiOperator};
use crate::{Error, Result};

/// Families from the classical (q-free) Askey scheme, with the parameter
/// domains under which the paper uses them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalFamily {
    /// P_n^(λ)(x;φ), λ>0, 0<φ<π.
    MeixnerPollaczek { lambda: f64, phi: f64 },
    /// p_n(x;a,b,c,d), all real parts positive; the positive-measure case has
    /// c = conj(a), d = conj(b).
    ContinuousHahn { a: Cx, b: Cx, c: Cx, d: Cx },
    /// Q_n(x;a,b,N), a,b>-1, degrees 0..=N.
    Hahn { a: f64, b: f64, n_max: u32 },
    /// P_n^(a,b)(x), a,b>-1.
    Jacobi { a: f64, b: f64 },
    /// L_n^(a)(x), a>-1.
    Laguerre { a: f64 },
    /// M_n(x;β,c), β>0, 0<c<1.
    Meixner { beta: f64, c: f64 },
    /// K_n(x;p,N), 0<p<1, degrees 0..=N.
    Krawtchouk { p: f64, n_max: u32 },
    /// C_n(x;a), a>0.
    Charlier { a: f64 },
    /// H_n(x).
    Hermite,
    /// R_n(λ(x);α,β,γ,δ) with λ(x)=x(x+γ+δ+1); one of α+1, β+δ+1, γ+1 must
    /// equal -N for a nonnegative integer N (termination of the lattice).
    Racah { alpha: f64, beta: f64, gamma: f64, delta: f64 },
}

/// Families from the basic (q-)Askey scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QFamily {
    /// p_n(x;a,b,c,d|q) in x = μ(z); at least one parameter must be nonzero
    /// (the evaluator uses the parameter symmetry to route the a^{-n}
    /// prefactor through the largest one).
    AskeyWilson { a: Cx, b: Cx, c: Cx, d: Cx, q: f64 },
    /// s_n(x;a,b|q) = p_n(x;a,b,0,0|q).
    AlSalamChihara { a: Cx, b: Cx, q: f64 },
    /// Q_n(v;a,b,N|q), argument v = q^{-x}; degrees 0..=N.
    QHahn { a: f64, b: f64, n_max: u32, q: f64 },
    /// R_n(ν(x);α,β,γ,δ|q) with ν(x)=q^{-x}+γδq^{x+1}; one of αq, βδq, γq
    /// must equal q^{-N} for a nonnegative integer N.
    QRacah { alpha: f64, beta: f64, gamma: f64, delta: f64, q: f64 },
    /// R_n(y(x);a,N|q) with y(x)=q^{-x}-q^{x-N}/a, a>0; degrees 0..=N.
    DualQKrawtchouk { a: f64, n_max: u32, q: f64 },
}

/// Any polynomial family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Classical(ClassicalFamily),
    Q(QFamily),
}

impl From<ClassicalFamily> for Family {
    fn from(f: ClassicalFamily) -> Family {
        Family::Classical(f)
    }
}

impl From<QFamily> for Family {
    fn from(f: QFamily) -> Family {
        Family::Q(f)
    }
}

/// Spectral-variable maps used as polynomial arguments and as the recorded
/// variable of Jacobi operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArgumentMap {
    /// x ↦ x.
    Identity,
    /// w ↦ (w + 1/w)/2.
    Mu,
    /// x ↦ x(x+γ+δ+1).
    RacahLambda { gamma: f64, delta: f64 },
    /// x ↦ q^{-x} + γδ q^{x+1}.
    QRacahNu { gamma: f64, delta: f64, q: f64 },
    /// x ↦ q^{-x} - q^{x-N}/a.
    DualQk { a: f64, n_max: u32, q: f64 },
    /// x ↦ 2x sin φ.
    TwoXSinPhi { phi: f64 },
    /// x ↦ 2x.
    TwoX,
    /// x ↦ 2(x - μ(s)) / (q^{-1} - q).
    YsAffine { s: f64, q: f64 },
    /// f ↦ (√p q^{N-2f} - q^{2f-N}/√p + 1/√p - √p) / (q^{-1} - q).
    XpEigenvalue { p: f64, n_max: u32, q: f64 },
}

/// Apply an [`ArgumentMap`] to an input point.
pub fn argument(map: ArgumentMap, input: Cx) -> Result<Cx> {
    match map {
        ArgumentMap::Identity => Ok(input),
        ArgumentMap::Mu => {
            if input == cx(0.0, 0.0) {
                return Err(Error::Domain("mu(w) is undefined at w = 0".into()));
            }
            Ok((input + input.inv()) * 0.5)
        }
        ArgumentMap::RacahLambda { gamma, delta } => Ok(input * (input + gamma + delta + 1.0)),
        ArgumentMap::QRacahNu { gamma, delta, q } => {
            let lnq = q.ln();
            Ok((-input * lnq).exp() + ((input + 1.0) * lnq).exp() * gamma * delta)
        }
        ArgumentMap::DualQk { a, n_max, q } => {
            let lnq = q.ln();
            Ok((-input * lnq).exp() - ((input - n_max as f64) * lnq).exp() / a)
        }
        ArgumentMap::TwoXSinPhi { phi } => Ok(input * 2.0 * phi.sin()),
        ArgumentMap::TwoX => Ok(input * 2.0),
        ArgumentMap::YsAffine { s, q } => {
            let mu_s = 0.5 * (s + 1.0 / s);
            Ok((input - mu_s) * 2.0 / (1.0 / q - q))
        }
        ArgumentMap::XpEigenvalue { p, n_max, q } => {
            let sp = p.sqrt();
            let lnq = q.ln();
            let nn = n_max as f64;
            let up = ((cx(nn, 0.0) - input * 2.0) * lnq).exp();
            Ok((up * sp - up.inv() / sp + 1.0 / sp - sp) / (1.0 / q - q))
        }
    }
}

fn finite(vals: &[f64]) -> bool {
    vals.iter().all(|v| v.is_finite())
}

fn finite_cx(vals: &[Cx]) -> bool {
    vals.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// -v rounded to a nonnegative integer, if v is within 1e-9 of one.
fn neg_int_resonance(v: f64) -> Option<u32> {
    let n = (-v).round();
    if n >= 0.0 && n <= u32::MAX as f64 && (v + n).abs() <= 1e-9 * (1.0 + v.abs()) {
        Some(n as u32)
    } else {
        None
    }
}

/// N with t = q^{-N} within 1e-9 relative, if any.
fn q_resonance(t: f64, q: f64) -> Option<u32> {
    if !(t > 0.0) {
        return None;
    }
    let nf = -(t.ln() / q.ln());
    let n = nf.round();
    if n >= 0.0 && n <= 4096.0 && (t * q.powi(n as i32) - 1.0).abs() <= 1e-9 {
        Some(n as u32)
    } else {
        None
    }
}

impl Family {
    /// Construct with validation; the preferred entry point.
    pub fn classical(f: ClassicalFamily) -> Result<Family> {
        let fam = Family::Classical(f);
        fam.validate()?;
        Ok(fam)
    }

    /// Construct with validation; the preferred entry point.
    pub fn q(f: QFamily) -> Result<Family> {
        let fam = Family::Q(f);
        fam.validate()?;
        Ok(fam)
    }

    /// Check the parameter domain.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Domain(msg.into()));
        match *self {
            Family::Classical(f) => match f {
                ClassicalFamily::MeixnerPollaczek { lambda, phi } => {
                    if !finite(&[lambda, phi]) || lambda <= 0.0 {
                        return bad("Meixner-Pollaczek requires lambda > 0");
                    }
                    if !(0.0 < phi && phi < std::f64::consts::PI) {
                        return bad("Meixner-Pollaczek requires 0 < phi < pi");
                    }
                }
                ClassicalFamily::ContinuousHahn { a, b, c, d } => {
                    if !finite_cx(&[a, b, c, d])
                        || a.re <= 0.0
                        || b.re <= 0.0
                        || c.re <= 0.0
                        || d.re <= 0.0
                    {
                        return bad("continuous Hahn requires Re a, Re b, Re c, Re d > 0");
                    }
                }
                ClassicalFamily::Hahn { a, b, .. } => {
                    if !finite(&[a, b]) || a <= -1.0 || b <= -1.0 {
                        return bad("Hahn requires a, b > -1");
                    }
                }
                ClassicalFamily::Jacobi { a, b } => {
                    if !finite(&[a, b]) || a <= -1.0 || b <= -1.0 {
                        return bad("Jacobi requires a, b > -1");
                    }
                }
                ClassicalFamily::Laguerre { a } => {
                    if !finite(&[a]) || a <= -1.0 {
                        return bad("Laguerre requires a > -1");
                    }
                }
                ClassicalFamily::Meixner { beta, c } => {
                    if !finite(&[beta, c]) || beta <= 0.0 || !(0.0 < c && c < 1.0) {
                        return bad("Meixner requires beta > 0 and 0 < c < 1");
                    }
                }
                ClassicalFamily::Krawtchouk { p, .. } => {
                    if !finite(&[p]) || !(0.0 < p && p < 1.0) {
                        return bad("Krawtchouk requires 0 < p < 1");
                    }
                }
                ClassicalFamily::Charlier { a } => {
                    if !finite(&[a]) || a <= 0.0 {
                        return bad("Charlier requires a > 0");
                    }
                }
                ClassicalFamily::Hermite => {}
                ClassicalFamily::Racah { alpha, beta, gamma, delta } => {
                    if !finite(&[alpha, beta, gamma, delta]) {
                        return bad("Racah parameters must be finite");
                    }
                    if self.degree_bound().is_none() {
                        return bad(
                            "Racah requires one of alpha+1, beta+delta+1, gamma+1 to be -N \
                             for a nonnegative integer N",
                        );
                    }
                }
            },
            Family::Q(f) => {
                let q = match f {
                    QFamily::AskeyWilson { q, .. }
                    | QFamily::AlSalamChihara { q, .. }
                    | QFamily::QHahn { q, .. }
                    | QFamily::QRacah { q, .. }
                    | QFamily::DualQKrawtchouk { q, .. } => q,
                };
                if !q.is_finite() || !(0.0 < q && q < 1.0) {
                    return bad("q must lie strictly inside (0,1)");
                }
                match f {
                    QFamily::AskeyWilson { a, b, c, d, .. } => {
                        let zero = cx(0.0, 0.0);
                        if !finite_cx(&[a, b, c, d]) || [a, b, c, d] == [zero; 4] {
                            return bad("Askey-Wilson requires finite parameters, not all zero");
                        }
                    }
                    QFamily::AlSalamChihara { a, b, .. } => {
                        let zero = cx(0.0, 0.0);
                        if !finite_cx(&[a, b]) || [a, b] == [zero; 2] {
                            return bad("Al-Salam-Chihara requires finite parameters, not all zero");
                        }
                    }
                    QFamily::QHahn { a, b, .. } => {
                        if !finite(&[a, b]) {
                            return bad("q-Hahn parameters must be finite");
                        }
                    }
                    QFamily::QRacah { alpha, beta, gamma, delta, .. } => {
                        if !finite(&[alpha, beta, gamma, delta]) {
                            return bad("q-Racah parameters must be finite");
                        }
                        if self.degree_bound().is_none() {
                            return bad(
                                "q-Racah requires one of alpha*q, beta*delta*q, gamma*q to be \
                                 q^{-N} for a nonnegative integer N",
                            );
                        }
                    }
                    QFamily::DualQKrawtchouk { a, .. } => {
                        if !finite(&[a]) || a <= 0.0 {
                            return bad("dual q-Krawtchouk requires a > 0");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The largest admissible degree, for families supported on a finite
    /// lattice.
    pub fn degree_bound(&self) -> Option<u32> {
        match *self {
            Family::Classical(ClassicalFamily::Hahn { n_max, .. })
            | Family::Classical(ClassicalFamily::Krawtchouk { n_max, .. })
            | Family::Q(QFamily::QHahn { n_max, .. })
            | Family::Q(QFamily::DualQKrawtchouk { n_max, .. }) => Some(n_max),
            Family::Classical(ClassicalFamily::Racah { alpha, beta, gamma, delta }) => {
                neg_int_resonance(alpha + 1.0)
                    .or_else(|| neg_int_resonance(beta + delta + 1.0))
                    .or_else(|| neg_int_resonance(gamma + 1.0))
            }
            Family::Q(QFamily::QRacah { alpha, beta, gamma, delta, q }) => {
                q_resonance(alpha * q, q)
                    .or_else(|| q_resonance(beta * delta * q, q))
                    .or_else(|| q_resonance(gamma * q, q))
            }
            _ => None,
        }
    }

    /// Whether eval at this (real) point is contractually real-valued.
    fn real_valued_at(&self, x: Cx) -> bool {
        if x.im != 0.0 {
            return false;
        }
        match *self {
            Family::Classical(ClassicalFamily::ContinuousHahn { a, b, c, d }) => {
                approx_conj(a, c) && approx_conj(b, d)
            }
            Family::Q(QFamily::AskeyWilson { a, b, c, d, .. }) => conj_closed(&[a, b, c, d]),
            Family::Q(QFamily::AlSalamChihara { a, b, .. }) => conj_closed(&[a, b]),
            _ => true,
        }
    }
}

fn approx_conj(u: Cx, v: Cx) -> bool {
    (u - v.conj()).norm() <= 1e-12 * (1.0 + u.norm())
}

/// Is the multiset closed under complex conjugation (so that symmetric
/// functions of it are real)?
fn conj_closed(zs: &[Cx]) -> bool {
    let mut used = vec![false; zs.len()];
    for i in 0..zs.len() {
        if used[i] {
            continue;
        }
        if zs[i].im.abs() <= 1e-12 * (1.0 + zs[i].norm()) {
            used[i] = true;
            continue;
        }
        let mut found = false;
        for j in (i + 1)..zs.len() {
            if !used[j] && approx_conj(zs[i], zs[j]) {
                used[i] = true;
                used[j] = true;
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

fn realify(v: Cx, contractually_real: bool) -> Result<Cx> {
    if !contractually_real {
        return Ok(v);
    }
    if v.im.abs() <= 1e-10 * (1.0 + v.re.abs()) {
        Ok(cx(v.re, 0.0))
    } else {
        Err(Error::Realification(format!(
            "expected a real value but got imaginary part {:e} against real part {:e}",
            v.im, v.re
        )))
    }
}

fn fct(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// i^n without rounding.
fn i_pow(n: u32) -> Cx {
    match n % 4 {
        0 => cx(1.0, 0.0),
        1 => cx(0.0, 1.0),
        2 => cx(-1.0, 0.0),
        _ => cx(0.0, -1.0),
    }
}

/// The inverse of μ: w with (w+1/w)/2 = x and |w| >= 1. Either branch gives
/// the same polynomial value; the outer one is numerically preferable.
fn inv_mu(x: Cx) -> Cx {
    let s = (x * x - 1.0).sqrt();
    let w = x + s;
    if w.norm() >= 1.0 {
        w
    } else {
        x - s
    }
}

/// Evaluate the degree-n polynomial of a family at the point x (the family's
/// spectral variable; see the module docs). Values that are contractually
/// real come back with a zero imaginary part.
///
/// The terminating sums run in double-double precision internally: their
/// terms can exceed the final value by many orders (in the basic case the
/// growth is like q^{-n(n-1)/2}), and plain doubles would forfeit the
/// realification bound well inside the supported degree range.
pub fn eval(family: &Family, n: u32, x: Cx) -> Result<Cx> {
    family.validate()?;
    if let Some(nmax) = family.degree_bound() {
        if n > nmax {
            return Err(Error::Domain(format!(
                "degree {n} exceeds the family's lattice bound {nmax}"
            )));
        }
    }
    let raw = eval_raw(family, n, x)?;
    realify(raw, family.real_valued_at(x))
}

fn eval_raw(family: &Family, n: u32, x: Cx) -> Result<Cx> {
    let nf = n as f64;
    match *family {
        Family::Classical(f) => match f {
            ClassicalFamily::MeixnerPollaczek { lambda, phi } => {
                let z = cx(1.0, 0.0) - cx(0.0, -2.0 * phi).exp();
                let pref =
                    pochhammer(cx(2.0 * lambda, 0.0), n) / fct(n) * cx(0.0, nf * phi).exp();
                let s = hyp_terminating_dd(&SeriesSpec::classical(
                    vec![cx(-nf, 0.0), cx(lambda, 0.0) + x * cx(0.0, 1.0)],
                    vec![cx(2.0 * lambda, 0.0)],
                    z,
                    n,
                ))?;
                Ok(pref * s)
            }
            ClassicalFamily::ContinuousHahn { a, b, c, d } => {
                let pref = i_pow(n) * pochhammer(a + c, n) * pochhammer(a + d, n) / fct(n);
                let s = hyp_terminating_dd(&SeriesSpec::classical(
                    vec![cx(-nf, 0.0), a + b + c + d + (nf - 1.0), a + x * cx(0.0, 1.0)],
                    vec![a + c, a + d],
                    cx(1.0, 0.0),
                    n,
                ))?;
                Ok(pref * s)
            }
            ClassicalFamily::Hahn { a, b, n_max } => hyp_terminating_dd(&SeriesSpec::classical(
                vec![cx(-nf, 0.0), cx(nf + a + b + 1.0, 0.0), -x],
                vec![cx(a + 1.0, 0.0), cx(-(n_max as f64), 0.0)],
                cx(1.0, 0.0),
                n,
            )),
            ClassicalFamily::Jacobi { a, b } => {
                let pref = pochhammer(cx(a + 1.0, 0.0), n) / fct(n);
                let s = hyp_terminating_dd(&SeriesSpec::classical(
                    vec![cx(-nf, 0.0), cx(nf + a + b + 1.0, 0.0)],
                    vec![cx(a + 1.0, 0.0)],
                    (cx(1.0, 0.0) - x) * 0.5,
                    n,
                ))?;
                Ok(pref * s)
            }
            ClassicalFamily::Laguerre { a } => {
                let pref = pochhammer(cx(a + 1.0, 0.0), n) / fct(n);
                let s = hyp_terminating_dd(&SeriesSpec::classical(
                    vec![cx(-nf, 0.0)],
                    vec![cx(a + 1.0, 0.0)],
                    x,
                    n,
                ))?;
                Ok(pref * s)
            }
            ClassicalFamily::Meixner { beta, c } => hyp_terminating_dd(&SeriesSpec::classical(
                vec![cx(-nf, 0.0), -x],
                vec![cx(beta, 0.0)],
                cx(1.0 - 1.0 / c, 0.0),
                n,
            )),
            ClassicalFamily::Krawtchouk { p, n_max } => hyp_terminating_dd(&SeriesSpec::classical(
                vec![cx(-nf, 0.0), -x],
                vec![cx(-(n_max as f64), 0.0)],
                cx(1.0 / p, 0.0),
                n,
            )),
            ClassicalFamily::Charlier { a } => hyp_terminating_dd(&SeriesSpec::classical(
                vec![cx(-nf, 0.0), -x],
                vec![],
                cx(1.0 / a, 0.0),
                n,
            )),
            ClassicalFamily::Hermite => {
                // H_n(x) = n! sum_k (-1)^k (2x)^{n-2k} / (k! (n-2k)!), the
                // expanded form of the usual 2F0 expression; it stays finite
                // at x = 0 where the 2F0 argument -1/x^2 blows up.
                let mut s = cx(0.0, 0.0);
                let two_x = x * 2.0;
                for k in 0..=(n / 2) {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    s += two_x.powu(n - 2 * k) * (sign / (fct(k) * fct(n - 2 * k)));
                }
                Ok(s * fct(n))
            }
            ClassicalFamily::Racah { alpha, beta, gamma, delta } => {
                // x is the spectral value Λ = ξ(ξ+γ+δ+1); recover ξ. Both
                // quadratic roots give the same series (ξ <-> -(ξ+γ+δ+1)
                // swaps two numerator parameters).
                let gd1 = gamma + delta + 1.0;
                let xi = (-gd1 + (cx(gd1 * gd1, 0.0) + x * 4.0).sqrt()) * 0.5;
                hyp_terminating_dd(&SeriesSpec::classical(
                    vec![cx(-nf, 0.0), cx(nf + alpha + beta + 1.0, 0.0), -xi, xi + gd1],
                    vec![
                        cx(alpha + 1.0, 0.0),
                        cx(beta + delta + 1.0, 0.0),
                        cx(gamma + 1.0, 0.0),
                    ],
                    cx(1.0, 0.0),
                    n,
                ))
            }
        },
        Family::Q(f) => match f {
            QFamily::AskeyWilson { a, b, c, d, q } => aw_eval(n, x, a, b, c, d, q),
            QFamily::AlSalamChihara { a, b, q } => {
                aw_eval(n, x, a, b, cx(0.0, 0.0), cx(0.0, 0.0), q)
            }
            QFamily::QHahn { a, b, n_max, q } => {
                // The polynomial argument is v = q^{-x} directly.
                basic_phi_terminating_dd(&SeriesSpec::basic(
                    vec![
                        cx(q.powi(-(n as i32)), 0.0),
                        cx(a * b * q.powi(n as i32 + 1), 0.0),
                        x,
                    ],
                    vec![cx(a * q, 0.0), cx(q.powi(-(n_max as i32)), 0.0)],
                    cx(q, 0.0),
                    q,
                    n,
                ))
            }
            QFamily::QRacah { alpha, beta, gamma, delta, q } => {
                // x is ν = u + γδq/u with u = q^{-ξ}; the two roots of the
                // quadratic swap the numerator parameters u and γδq/u, so
                // pick the larger one for stability.
                let gdq = gamma * delta * q;
                let (u, v) = if gdq == 0.0 {
                    (x, cx(0.0, 0.0))
                } else {
                    let s = (x * x - 4.0 * gdq).sqrt();
                    let u1 = (x + s) * 0.5;
                    let u2 = (x - s) * 0.5;
                    let ubig = if u1.norm() >= u2.norm() { u1 } else { u2 };
                    (ubig, cx(gdq, 0.0) / ubig)
                };
                basic_phi_terminating_dd(&SeriesSpec::basic(
                    vec![
                        cx(q.powi(-(n as i32)), 0.0),
                        cx(alpha * beta * q.powi(n as i32 + 1), 0.0),
                        u,
                        v,
                    ],
                    vec![
                        cx(alpha * q, 0.0),
                        cx(beta * delta * q, 0.0),
                        cx(gamma * q, 0.0),
                    ],
                    cx(q, 0.0),
                    q,
                    n,
                ))
            }
            QFamily::DualQKrawtchouk { a, n_max, q } => {
                // x is y = u - q^{-N}/(a u) with u = q^{-ξ}; roots have
                // product -q^{-N}/a, and swapping them swaps the numerator
                // parameters u and -q^{ξ-N}/a.
                let qn = q.powi(-(n_max as i32));
                let s = (x * x + 4.0 * qn / a).sqrt();
                let u1 = (x + s) * 0.5;
                let u2 = (x - s) * 0.5;
                let u = if u1.norm() >= u2.norm() { u1 } else { u2 };
                let other = -cx(qn / a, 0.0) / u;
                basic_phi_terminating_dd(&SeriesSpec::basic(
                    vec![cx(q.powi(-(n as i32)), 0.0), u, other],
                    vec![cx(qn, 0.0), cx(0.0, 0.0)],
                    cx(q, 0.0),
                    q,
                    n,
                ))
            }
        },
    }
}

fn aw_eval(n: u32, x: Cx, a: Cx, b: Cx, c: Cx, d: Cx, q: f64) -> Result<Cx> {
    // The polynomial is symmetric in {a,b,c,d}. Put the largest-modulus
    // parameter in the prefactor slot: a^{-n} against a tiny a inflates the
    // series' cancellation error by |a|^{-n} for no mathematical reason.
    // Ties break on (re, im) so equal-modulus orderings stay deterministic.
    let mut ps = [a, b, c, d];
    ps.sort_by(|u, v| {
        v.norm()
            .partial_cmp(&u.norm())
            .unwrap()
            .then(u.re.partial_cmp(&v.re).unwrap())
            .then(u.im.partial_cmp(&v.im).unwrap())
    });
    let [a, b, c, d] = ps;
    let pref = a.powi(-(n as i32))
        * q_pochhammer(a * b, q, n)
        * q_pochhammer(a * c, q, n)
        * q_pochhammer(a * d, q, n);
    // The series parameters are built in double-double: the sum is violently
    // ill-conditioned in the derived quantities (q^{-n}, a·w, ...), so they
    // must stay mutually coherent well past a double's rounding. The
    // prefactor is a plain product — no cancellation — and stays f64.
    let qdd = Dd::from_f64(q);
    let (ad, bd, cd, dd) = (
        CxDd::from_f64(a.re, a.im),
        CxDd::from_f64(b.re, b.im),
        CxDd::from_f64(c.re, c.im),
        CxDd::from_f64(d.re, d.im),
    );
    let w = inv_mu_dd(x);
    let s = basic_phi_terminating_dd(&SeriesSpecDd {
        numerator: vec![
            CxDd::real(qdd.powi(-(n as i64))),
            (ad * bd * cd * dd).scale(qdd.powi(n as i64 - 1)),
            ad * w,
            ad / w,
        ],
        denominator: vec![ad * bd, ad * cd, ad * dd],
        argument: CxDd::real(qdd),
        base: qdd,
        terminating_degree: n,
    })?;
    Ok(pref * s)
}

/// Evaluate the orthonormal version of a family at a real point of its
/// support. Supported: Meixner-Pollaczek, Al-Salam-Chihara, Askey-Wilson,
/// dual q-Krawtchouk.
pub fn orthonormal_eval(family: &Family, n: u32, x: f64) -> Result<f64> {
    family.validate()?;
    match *family {
        Family::Classical(ClassicalFamily::MeixnerPollaczek { lambda, .. }) => {
            let v = eval(family, n, cx(x, 0.0))?;
            // sqrt(n! Γ(2λ) / Γ(n+2λ)) in log space to dodge overflow; the
            // Γ(2λ) factor makes the family orthonormal against the
            // unit-mass measure that `weight` returns, so the n = 0 member
            // is the constant 1
            let ln = numerics::log_gamma(cx(n as f64 + 1.0, 0.0))?.re
                + numerics::log_gamma(cx(2.0 * lambda, 0.0))?.re
                - numerics::log_gamma(cx(n as f64 + 2.0 * lambda, 0.0))?.re;
            Ok(v.re * (0.5 * ln).exp())
        }
        Family::Q(QFamily::AlSalamChihara { a, b, q }) => {
            let v = eval(family, n, cx(x, 0.0))?;
            let h = q_pochhammer(cx(q, 0.0), q, n) * q_pochhammer(a * b, q, n);
            let h = realify(h, true)?.re;
            if h <= 0.0 {
                return Err(Error::Domain(format!(
                    "orthonormalisation requires (q,ab;q)_n > 0, got {h:e}"
                )));
            }
            Ok(v.re / h.sqrt())
        }
        Family::Q(QFamily::AskeyWilson { a, b, c, d, q }) => {
            let v = eval(family, n, cx(x, 0.0))?;
            let h = realify(aw_norm(n, a, b, c, d, q)?, true)?.re;
            if h <= 0.0 {
                return Err(Error::Domain(format!(
                    "orthonormalisation requires h_n > 0, got {h:e}"
                )));
            }
            Ok(v.re / h.sqrt())
        }
        Family::Q(QFamily::DualQKrawtchouk { a, n_max, q }) => {
            let v = eval(family, n, cx(x, 0.0))?;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let pref = sign
                * a.powf(n as f64 / 2.0)
                * q.powf(n as f64 * (n as f64 - 1.0) / 4.0)
                * q_binomial(n_max, n as i64, q).sqrt();
            Ok(pref * v.re)
        }
        _ => Err(Error::UnsupportedFamily(format!(
            "no orthonormal normalisation implemented for {family:?}"
        ))),
    }
}

/// The squared norm h_n of the Askey-Wilson family against its normalised
/// orthogonality measure (h_0 = 1).
pub(crate) fn aw_norm(n: u32, a: Cx, b: Cx, c: Cx, d: Cx, q: f64) -> Result<Cx> {
    if n == 0 {
        return Ok(cx(1.0, 0.0));
    }
    let e4 = a * b * c * d;
    let head = (cx(1.0, 0.0) - e4 * q.powi(n as i32 - 1))
        / (cx(1.0, 0.0) - e4 * q.powi(2 * n as i32 - 1));
    let mut r = head * q_pochhammer(cx(q, 0.0), q, n);
    for uv in [a * b, a * c, a * d, b * c, b * d, c * d] {
        r *= q_pochhammer(uv, q, n);
    }
    Ok(r / q_pochhammer(e4, q, n))
}

/// The three-term recurrence of the orthonormal family, as a Jacobi operator
/// together with the spectral-variable map. Supported: Meixner-Pollaczek
/// (variable 2x sinφ), Al-Salam-Chihara (variable 2x), dual q-Krawtchouk
/// (variable y(x)).
pub fn recurrence(family: &Family) -> Result<JacobiOperator> {
    family.validate()?;
    match *family {
        Family::Classical(ClassicalFamily::MeixnerPollaczek { lambda, phi }) => {
            Ok(JacobiOperator::new(
                move |n| {
                    let nf = n as f64;
                    ((nf + 1.0) * (nf + 2.0 * lambda)).sqrt()
                },
                move |n| -2.0 * (n as f64 + lambda) * phi.cos(),
                Dimension::Unbounded,
                ArgumentMap::TwoXSinPhi { phi },
            ))
        }
        Family::Q(QFamily::AlSalamChihara { a, b, q }) => {
            let ab = realify(a * b, true).map_err(|_| {
                Error::Domain("Al-Salam-Chihara recurrence requires ab real".into())
            })?;
            let apb = realify(a + b, true).map_err(|_| {
                Error::Domain("Al-Salam-Chihara recurrence requires a+b real".into())
            })?;
            let (ab, apb) = (ab.re, apb.re);
            if ab >= 1.0 {
                return Err(Error::Domain(
                    "Al-Salam-Chihara recurrence requires ab < 1 for positivity".into(),
                ));
            }
            Ok(JacobiOperator::new(
                move |n| ((1.0 - ab * q.powi(n as i32)) * (1.0 - q.powi(n as i32 + 1))).sqrt(),
                move |n| q.powi(n as i32) * apb,
                Dimension::Unbounded,
                ArgumentMap::TwoX,
            ))
        }
        Family::Q(QFamily::DualQKrawtchouk { a, n_max, q }) => Ok(JacobiOperator::new(
            move |n| {
                (q.powf(n as f64 / 2.0 - n_max as f64) / a.sqrt())
                    * ((1.0 - q.powi(n as i32 + 1)) * (1.0 - q.powi((n_max - n) as i32))).sqrt()
            },
            move |n| q.powi(n as i32 - n_max as i32) * (1.0 - 1.0 / a),
            Dimension::Finite(n_max + 1),
            ArgumentMap::DualQk { a, n_max, q },
        )),
        _ => Err(Error::UnsupportedFamily(format!(
            "no recurrence form implemented for {family:?}"
        ))),
    }
}
