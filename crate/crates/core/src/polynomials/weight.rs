//! Orthogonality measures, normalised to total mass 1.
//!
//! For Meixner-Pollaczek and continuous Hahn the measure is a density on the
//! real line and `point` is x itself. For Askey-Wilson and Al-Salam-Chihara
//! the absolutely continuous part lives on x = cos θ and is reported as a
//! density in θ over [0, π] (`point` = θ), while any discrete part appears as
//! `masses`: pairs (x_k, mass) in the spectral variable, generated by a single
//! real parameter of modulus above one. The integral of the density plus the
//! sum of the masses is 1.

use super::{approx_conj, conj_closed, realify, ClassicalFamily, Family, QFamily};
use crate::numerics::{cx, gamma, q_pochhammer, q_pochhammer_inf, Cx};
use crate::{Error, Result};

use std::f64::consts::PI;

/// The orthogonality measure evaluated at one point: the continuous density
/// there, plus the complete list of discrete mass points of the measure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightEval {
    /// Density of the absolutely continuous part at the requested point.
    pub density: f64,
    /// All discrete mass points (location, mass), independent of the point.
    pub masses: Vec<(f64, f64)>,
}

/// Evaluate the (probability-normalised) orthogonality measure of a family.
/// Supported: Meixner-Pollaczek, continuous Hahn in the positive case,
/// Askey-Wilson, Al-Salam-Chihara.
pub fn weight(family: &Family, point: f64) -> Result<WeightEval> {
    family.validate()?;
    if !point.is_finite() {
        return Err(Error::Domain("weight point must be finite".into()));
    }
    match *family {
        Family::Classical(ClassicalFamily::MeixnerPollaczek { lambda, phi }) => {
            let x = point;
            let g2 = gamma(cx(lambda, x))?.norm_sqr();
            let norm = gamma(cx(2.0 * lambda, 0.0))?.re;
            let density = (2.0 * phi.sin()).powf(2.0 * lambda) / (2.0 * PI)
                * ((2.0 * phi - PI) * x).exp()
                * g2
                / norm;
            Ok(WeightEval { density, masses: vec![] })
        }
        Family::Classical(ClassicalFamily::ContinuousHahn { a, b, c, d }) => {
            if !(approx_conj(a, c) && approx_conj(b, d)) {
                return Err(Error::Domain(
                    "continuous Hahn weight needs the positive case c = conj(a), d = conj(b)"
                        .into(),
                ));
            }
            let x = point;
            let ix = cx(0.0, x);
            let g = gamma(a + ix)? * gamma(b + ix)? * gamma(c - ix)? * gamma(d - ix)?;
            let g = realify(g, true)?.re;
            let n0 = gamma(a + c)? * gamma(a + d)? * gamma(b + c)? * gamma(b + d)?
                / gamma(a + b + c + d)?;
            let n0 = realify(n0, true)?.re;
            Ok(WeightEval { density: g / (2.0 * PI * n0), masses: vec![] })
        }
        Family::Q(QFamily::AskeyWilson { a, b, c, d, q }) => aw_weight([a, b, c, d], q, point),
        Family::Q(QFamily::AlSalamChihara { a, b, q }) => {
            aw_weight([a, b, cx(0.0, 0.0), cx(0.0, 0.0)], q, point)
        }
        _ => Err(Error::UnsupportedFamily(format!(
            "no weight implemented for {family:?}"
        ))),
    }
}

fn aw_weight(params: [Cx; 4], q: f64, theta: f64) -> Result<WeightEval> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!(
            "angle must lie in [0, pi], got {theta}"
        )));
    }
    if !conj_closed(&params) {
        return Err(Error::Domain(
            "positive measure needs parameters real or in conjugate pairs".into(),
        ));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (params[i] * params[j]).norm() >= 1.0 {
                return Err(Error::Domain(
                    "positive measure needs all pairwise parameter products inside the unit disk"
                        .into(),
                ));
            }
        }
    }
    let mut big: Option<f64> = None;
    for p in params {
        if p.norm() > 1.0 {
            if p.im.abs() > 1e-12 * p.norm() {
                return Err(Error::Domain(
                    "a parameter of modulus above one must be real to carry mass points".into(),
                ));
            }
            if big.is_some() {
                // unreachable given the pairwise check, but keep the guard
                return Err(Error::Domain(
                    "at most one parameter may have modulus above one".into(),
                ));
            }
            big = Some(p.re);
        }
    }

    let h0 = aw_h0(params, q)?;

    // density in θ: w(e^{iθ}) / (2π h0)
    let z = cx(theta.cos(), theta.sin());
    let mut w = q_pochhammer_inf(z * z, q)? * q_pochhammer_inf((z * z).inv(), q)?;
    for p in params {
        w /= q_pochhammer_inf(p * z, q)? * q_pochhammer_inf(p / z, q)?;
    }
    let density = realify(w, true)?.re / (2.0 * PI * h0);

    let masses = match big {
        None => vec![],
        Some(e) => {
            // rotate the carrier to the front
            let mut others = [cx(0.0, 0.0); 3];
            let mut idx = 0;
            let mut taken = false;
            for p in params {
                if !taken && p.im == 0.0 && p.re == e {
                    taken = true;
                } else {
                    others[idx] = p;
                    idx += 1;
                }
            }
            aw_point_masses(e, others, q, h0)?
        }
    };
    Ok(WeightEval { density, masses })
}

/// h_0 = (abcd;q)_inf / (q,ab,ac,ad,bc,bd,cd;q)_inf for the unnormalised
/// Askey-Wilson measure; dividing by it makes the total mass 1.
fn aw_h0(params: [Cx; 4], q: f64) -> Result<f64> {
    let [a, b, c, d] = params;
    let mut den = q_pochhammer_inf(cx(q, 0.0), q)?;
    for uv in [a * b, a * c, a * d, b * c, b * d, c * d] {
        den *= q_pochhammer_inf(uv, q)?;
    }
    let h0 = q_pochhammer_inf(a * b * c * d, q)? / den;
    Ok(realify(h0, true)?.re)
}

/// Mass points generated by a real parameter e with |e| > 1: locations
/// x_k = (e q^k + q^{-k}/e)/2 for k with |e q^k| > 1, already divided by h0.
/// Zero companion parameters are handled by their limiting factor.
fn aw_point_masses(e: f64, others: [Cx; 3], q: f64, h0: f64) -> Result<Vec<(f64, f64)>> {
    let mut head = q_pochhammer_inf(cx(1.0 / (e * e), 0.0), q)?;
    head /= q_pochhammer_inf(cx(q, 0.0), q)?;
    for p in others {
        head /= q_pochhammer_inf(p * e, q)? * q_pochhammer_inf(p / e, q)?;
    }

    // factor (pe;q)_k / (eq/p;q)_k * p^{-k}; its p -> 0 limit is
    // (-e)^{-k} q^{-k(k+1)/2}
    let companion = |p: Cx, k: u32| -> Cx {
        if p == cx(0.0, 0.0) {
            let kf = k as f64;
            cx(-e, 0.0).powi(-(k as i32)) * q.powf(-kf * (kf + 1.0) / 2.0)
        } else {
            q_pochhammer(p * e, q, k) / q_pochhammer(cx(e * q, 0.0) / p, q, k)
                * p.powi(-(k as i32))
        }
    };

    let mut masses = Vec::new();
    let mut k = 0u32;
    while (e * q.powi(k as i32)).abs() > 1.0 {
        let x_k = (e * q.powi(k as i32) + q.powi(-(k as i32)) / e) / 2.0;
        let mut m = head * q_pochhammer(cx(e * e * q, 0.0), q, 2 * k)
            / (q_pochhammer(cx(q, 0.0), q, k)
                * q_pochhammer(cx(e * e * q.powi(k as i32), 0.0), q, k));
        for p in others {
            m *= companion(p, k);
        }
        m *= q.powi(k as i32) * e.powi(-(k as i32));
        let m = realify(m, true)?.re / h0;
        masses.push((x_k, m));
        k += 1;
    }
    Ok(masses)
}
