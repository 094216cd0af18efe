//! Jacobi operators (symmetric tridiagonal operators with positive
//! off-diagonal), finite sections, a QL eigensolver that accumulates the
//! first row of the eigenvector matrix, Gauss quadrature for the spectral
//! measure of the vacuum vector, and the Lie/quantum-algebra representation
//! operators realised as Jacobi matrices.

use std::fmt;
use std::sync::Arc;

use crate::polynomials::ArgumentMap;
use crate::{Error, Result};

/// Dimension of the underlying Hilbert space basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Finite(u32),
    Unbounded,
}

/// A symmetric tridiagonal operator given by coefficient functions:
/// diagonal b(n) and off-diagonal a(n) > 0, together with the spectral
/// variable it represents multiplication by.
#[derive(Clone)]
pub struct JacobiOperator {
    a_fn: Arc<dyn Fn(u32) -> f64 + Send + Sync>,
    b_fn: Arc<dyn Fn(u32) -> f64 + Send + Sync>,
    pub dimension: Dimension,
    pub variable_map: ArgumentMap,
}

impl JacobiOperator {
    pub fn new(
        a: impl Fn(u32) -> f64 + Send + Sync + 'static,
        b: impl Fn(u32) -> f64 + Send + Sync + 'static,
        dimension: Dimension,
        variable_map: ArgumentMap,
    ) -> Self {
        JacobiOperator { a_fn: Arc::new(a), b_fn: Arc::new(b), dimension, variable_map }
    }

    /// Off-diagonal coefficient a_n (coupling basis vectors n and n+1).
    pub fn a(&self, n: u32) -> f64 {
        (self.a_fn)(n)
    }

    /// Diagonal coefficient b_n.
    pub fn b(&self, n: u32) -> f64 {
        (self.b_fn)(n)
    }
}

impl fmt::Debug for JacobiOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JacobiOperator")
            .field("dimension", &self.dimension)
            .field("variable_map", &self.variable_map)
            .finish_non_exhaustive()
    }
}

/// A materialised finite section: `diag` of length N, `offdiag` of length
/// N-1 with strictly positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Dimension("a tridiagonal matrix needs at least one row".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::Dimension(format!(
                "off-diagonal length {} does not fit diagonal length {}",
                offdiag.len(),
                diag.len()
            )));
        }
        if !diag.iter().chain(offdiag.iter()).all(|v| v.is_finite()) {
            return Err(Error::Domain("tridiagonal entries must be finite".into()));
        }
        if offdiag.iter().any(|&v| v <= 0.0) {
            return Err(Error::Domain(
                "off-diagonal entries must be strictly positive".into(),
            ));
        }
        Ok(TridiagonalMatrix { diag, offdiag })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }
}

/// Eigendecomposition data sufficient for spectral measures: the ascending
/// eigenvalues and the (nonnegative) first coordinate of each unit
/// eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub first_components: Vec<f64>,
}

/// A quadrature rule for the spectral measure of the first basis vector:
/// strictly ascending nodes, positive weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Defining data of the representation operators that the library realises
/// as Jacobi matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RepnOperatorSpec {
    /// The elliptic-parameter element -cos(φ)·H + B - C in the positive
    /// discrete series with lowest weight 2k.
    Su11Xphi { k: f64, phi: f64 },
    /// The twisted-primitive combination Y_s·A in the quantum positive
    /// discrete series; s real and nonzero.
    UqSu11YsA { k: f64, s: f64, q: f64 },
    /// X_p·A in the (N+1)-dimensional quantum spin representation; p > 0.
    UqSu2XpA { n_max: u32, p: f64, q: f64 },
}

/// The leading N×N section of a Jacobi operator.
pub fn truncate(j: &JacobiOperator, n: u32) -> Result<TridiagonalMatrix> {
    if n == 0 {
        return Err(Error::Dimension("truncation size must be at least 1".into()));
    }
    if let Dimension::Finite(d) = j.dimension {
        if n > d {
            return Err(Error::Dimension(format!(
                "truncation size {n} exceeds the operator dimension {d}"
            )));
        }
    }
    let diag = (0..n).map(|i| j.b(i)).collect();
    let offdiag = (0..n - 1).map(|i| j.a(i)).collect();
    TridiagonalMatrix::new(diag, offdiag)
}

/// Eigenvalues (ascending) and first components of the unit eigenvectors of
/// a symmetric tridiagonal matrix, by implicit-shift QL. Only the first row
/// of the eigenvector matrix is accumulated. Errors with a convergence
/// failure after 50 iterations on any single eigenvalue.
pub fn eig_tridiagonal(t: &TridiagonalMatrix) -> Result<TridiagonalEigen> {
    let n = t.order();
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            // first index at or after l where the matrix decouples
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= 1e-14 * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Convergence(format!(
                    "QL sweep failed to isolate eigenvalue {l} of {n} within 50 iterations"
                )));
            }
            // Wilkinson shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // deflate by hand and restart the sweep
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // rotate the tracked first row
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("eigenvalues are finite"));
    let values: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let first_components: Vec<f64> = idx.iter().map(|&i| z[i].abs()).collect();
    // positive off-diagonal forces a simple spectrum; a tie means a bug
    for w in values.windows(2) {
        assert!(w[0] < w[1], "repeated eigenvalue {} in a Jacobi section", w[0]);
    }
    Ok(TridiagonalEigen { values, first_components })
}

/// The N-point Gauss rule of the operator's spectral measure at the first
/// basis vector: nodes are eigenvalues of the N-section, weights the squared
/// first components of the eigenvectors.
pub fn gauss_rule(j: &JacobiOperator, n: u32) -> Result<QuadratureRule> {
    let t = truncate(j, n)?;
    let eig = eig_tridiagonal(&t)?;
    let weights: Vec<f64> = eig.first_components.iter().map(|z| z * z).collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Convergence(format!(
            "quadrature weights sum to {total} instead of 1"
        )));
    }
    Ok(QuadratureRule { nodes: eig.values, weights })
}

/// Orthonormal polynomial values p_0(x), …, p_N(x) from the three-term
/// recurrence a_n p_{n+1} = (x - b_n) p_n - a_{n-1} p_{n-1}, p_0 = 1.
/// The argument is the operator's own spectral variable.
pub fn eval_by_recurrence(j: &JacobiOperator, n_top: u32, x: f64) -> Result<Vec<f64>> {
    if let Dimension::Finite(d) = j.dimension {
        if n_top >= d {
            return Err(Error::Dimension(format!(
                "the orthonormal family stops at degree {}",
                d - 1
            )));
        }
    }
    let mut p = Vec::with_capacity(n_top as usize + 1);
    p.push(1.0);
    if n_top >= 1 {
        p.push((x - j.b(0)) / j.a(0));
    }
    for k in 1..n_top {
        let k = k as usize;
        let next = ((x - j.b(k as u32)) * p[k] - j.a(k as u32 - 1) * p[k - 1]) / j.a(k as u32);
        p.push(next);
    }
    Ok(p)
}

/// Build the Jacobi matrix of a representation operator directly from the
/// generator actions on the standard basis, not from any polynomial
/// recurrence — so agreement with `polynomials::recurrence` is a genuine
/// check of the intertwining.
pub fn representation_operator(spec: RepnOperatorSpec) -> Result<JacobiOperator> {
    match spec {
        RepnOperatorSpec::Su11Xphi { k, phi } => {
            if !k.is_finite() || k <= 0.0 {
                return Err(Error::Domain("the lowest-weight label k must be positive".into()));
            }
            if !phi.is_finite() || !(0.0 < phi && phi < std::f64::consts::PI) {
                return Err(Error::Domain("phi must lie strictly inside (0, pi)".into()));
            }
            // generator actions on the basis e_n of the discrete series:
            //   H e_n = 2(k+n) e_n
            //   B e_n = sqrt((n+1)(2k+n)) e_{n+1}
            //   C e_n = -sqrt(n(2k+n-1)) e_{n-1}
            let raise = move |n: u32| ((n as f64 + 1.0) * (2.0 * k + n as f64)).sqrt();
            let lower = move |n: u32| -((n as f64) * (2.0 * k + n as f64 - 1.0)).sqrt();
            let h = move |n: u32| 2.0 * (k + n as f64);
            // element: -cos(φ)·H + B - C
            let a = move |n: u32| {
                let sub = raise(n);
                let sup = -lower(n + 1);
                debug_assert!((sub - sup).abs() <= 1e-12 * (1.0 + sub.abs()));
                sub
            };
            let b = move |n: u32| -phi.cos() * h(n);
            Ok(JacobiOperator::new(a, b, Dimension::Unbounded, ArgumentMap::TwoXSinPhi { phi }))
        }
        RepnOperatorSpec::UqSu11YsA { k, s, q } => {
            if !k.is_finite() || k <= 0.0 {
                return Err(Error::Domain("the lowest-weight label k must be positive".into()));
            }
            if !s.is_finite() || s == 0.0 {
                return Err(Error::Domain("s must be real and nonzero".into()));
            }
            if !q.is_finite() || !(0.0 < q && q < 1.0) {
                return Err(Error::Domain("q must lie strictly inside (0,1)".into()));
            }
            let denom = 1.0 / q - q;
            // generator actions on the basis e_n:
            //   A e_n = q^{k+n} e_n,  D = A^{-1}
            //   B e_n = q^{-1/2-k-n} sqrt((1-q^{2n+2})(1-q^{4k+2n}))/(q^{-1}-q) e_{n+1}
            //   C e_n = q^{1/2-k-n} sqrt((1-q^{2n})(1-q^{4k+2n-2}))/(q-q^{-1}) e_{n-1}
            let a_diag = move |n: u32| q.powf(k + n as f64);
            let b_raise = move |n: u32| {
                let nf = n as f64;
                q.powf(-0.5 - k - nf)
                    * ((1.0 - q.powf(2.0 * nf + 2.0)) * (1.0 - q.powf(4.0 * k + 2.0 * nf)))
                        .sqrt()
                    / denom
            };
            let c_lower = move |n: u32| {
                let nf = n as f64;
                q.powf(0.5 - k - nf)
                    * ((1.0 - q.powf(2.0 * nf)) * (1.0 - q.powf(4.0 * k + 2.0 * nf - 2.0)))
                        .sqrt()
                    / (-denom)
            };
            // element: (q^{1/2} B - q^{-1/2} C + (s+1/s)(A-D)/(q^{-1}-q)) · A;
            // right-multiplying by A scales column n by a_diag(n)
            let a = move |n: u32| {
                let sub = q.sqrt() * b_raise(n) * a_diag(n);
                let sup = -q.powf(-0.5) * c_lower(n + 1) * a_diag(n + 1);
                debug_assert!((sub - sup).abs() <= 1e-12 * (1.0 + sub.abs()));
                sub
            };
            let b = move |n: u32| {
                (s + 1.0 / s) / denom * (a_diag(n) - 1.0 / a_diag(n)) * a_diag(n)
            };
            Ok(JacobiOperator::new(a, b, Dimension::Unbounded, ArgumentMap::YsAffine { s, q }))
        }
        RepnOperatorSpec::UqSu2XpA { n_max, p, q } => {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::Domain("p must be positive".into()));
            }
            if !q.is_finite() || !(0.0 < q && q < 1.0) {
                return Err(Error::Domain("q must lie strictly inside (0,1)".into()));
            }
            let nn = n_max as f64;
            let cst = q.powf((1.0 - nn) / 2.0) / (1.0 - q * q);
            let c_p = (p.sqrt() - 1.0 / p.sqrt()) / (q - 1.0 / q);
            // generator actions on the spin basis e_0..e_N:
            //   A e_n = q^{n-N/2} e_n,  D = A^{-1}
            //   B e_n = cst·sqrt((1-q^{2n+2})(1-q^{2N-2n})) e_{n+1}
            //   C e_{n+1} = cst·sqrt((1-q^{2n+2})(1-q^{2N-2n})) e_n
            let a_diag = move |n: u32| q.powf(n as f64 - nn / 2.0);
            let rung = move |n: u32| {
                let nf = n as f64;
                ((1.0 - q.powf(2.0 * nf + 2.0)) * (1.0 - q.powf(2.0 * nn - 2.0 * nf))).sqrt()
            };
            // element: (q^{1/2} B + q^{-1/2} C - c_p (A - D)) · A
            let a = move |n: u32| {
                let sub = q.sqrt() * cst * rung(n) * a_diag(n);
                let sup = q.powf(-0.5) * cst * rung(n) * a_diag(n + 1);
                debug_assert!((sub - sup).abs() <= 1e-12 * (1.0 + sub.abs()));
                sub
            };
            let b = move |n: u32| -c_p * (a_diag(n) - 1.0 / a_diag(n)) * a_diag(n);
            Ok(JacobiOperator::new(
                a,
                b,
                Dimension::Finite(n_max + 1),
                ArgumentMap::XpEigenvalue { p, n_max, q },
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cx;
    use crate::polynomials::{self as poly, ClassicalFamily, Family, QFamily};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn constant_op(a: f64, b: f64) -> JacobiOperator {
        JacobiOperator::new(move |_| a, move |_| b, Dimension::Unbounded, ArgumentMap::Identity)
    }

    fn mp_operator() -> JacobiOperator {
        poly::recurrence(&Family::Classical(ClassicalFamily::MeixnerPollaczek {
            lambda: 1.3,
            phi: 0.9,
        }))
        .unwrap()
    }

    fn dqk_operator() -> JacobiOperator {
        poly::recurrence(&Family::Q(QFamily::DualQKrawtchouk { a: 1.3, n_max: 6, q: 0.5 }))
            .unwrap()
    }

    #[test]
    fn truncate_sections() {
        let j = mp_operator();
        let t1 = truncate(&j, 1).unwrap();
        assert_eq!(t1.diag, vec![j.b(0)]);
        assert!(t1.offdiag.is_empty());

        let t2 = truncate(&j, 2).unwrap();
        assert_eq!(t2.diag, vec![j.b(0), j.b(1)]);
        assert_eq!(t2.offdiag, vec![j.a(0)]);

        // re-truncation to a smaller size is a prefix
        let t5 = truncate(&j, 5).unwrap();
        let t3 = truncate(&j, 3).unwrap();
        assert_eq!(&t5.diag[..3], &t3.diag[..]);
        assert_eq!(&t5.offdiag[..2], &t3.offdiag[..]);

        assert!(matches!(truncate(&j, 0), Err(Error::Dimension(_))));
        let fj = dqk_operator();
        assert!(truncate(&fj, 7).is_ok());
        assert!(matches!(truncate(&fj, 8), Err(Error::Dimension(_))));
    }

    #[test]
    fn tridiagonal_matrix_validation() {
        assert!(TridiagonalMatrix::new(vec![], vec![]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, 2.0], vec![-0.5]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, f64::NAN], vec![0.5]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, 2.0], vec![0.5]).is_ok());
    }

    #[test]
    fn eigensolver_analytic_spectra() {
        // 1x1
        let t = TridiagonalMatrix::new(vec![2.5], vec![]).unwrap();
        let e = eig_tridiagonal(&t).unwrap();
        assert_eq!(e.values, vec![2.5]);
        assert_eq!(e.first_components, vec![1.0]);

        // zero diagonal, half off-diagonal: spectrum cos(kπ/4)
        let t = TridiagonalMatrix::new(vec![0.0; 3], vec![0.5; 2]).unwrap();
        let e = eig_tridiagonal(&t).unwrap();
        let want = [-(2.0f64.sqrt()) / 2.0, 0.0, 2.0f64.sqrt() / 2.0];
        for (got, want) in e.values.iter().zip(want) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        // squared first components are the Gauss weights 2sin²(kπ/4)/4
        let wants = [0.25, 0.5, 0.25];
        for (z, w) in e.first_components.iter().zip(wants) {
            assert_relative_eq!(z * z, w, max_relative = 1e-13);
        }

        // golden-ratio pair from diag (0,1), offdiag 1
        let t = TridiagonalMatrix::new(vec![0.0, 1.0], vec![1.0]).unwrap();
        let e = eig_tridiagonal(&t).unwrap();
        let r5 = 5.0f64.sqrt();
        assert_relative_eq!(e.values[0], (1.0 - r5) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(e.values[1], (1.0 + r5) / 2.0, max_relative = 1e-14);
        for (lam, z) in e.values.iter().zip(&e.first_components) {
            // eigenvector (1, λ)/√(1+λ²)
            assert_relative_eq!(*z, 1.0 / (1.0 + lam * lam).sqrt(), max_relative = 1e-13);
        }
    }

    #[test]
    fn chebyshev_gauss_weights() {
        // a_n = 1/2, b_n = 0 generates the measure (2/π)√(1-x²) dx on [-1,1]
        let j = constant_op(0.5, 0.0);
        let n = 6u32;
        let rule = gauss_rule(&j, n).unwrap();
        for (i, (node, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let k = (n as usize) - i; // ascending nodes run k = N..1
            let angle = k as f64 * PI / (n as f64 + 1.0);
            assert_relative_eq!(*node, angle.cos(), epsilon = 1e-14);
            assert_relative_eq!(*w, 2.0 * angle.sin().powi(2) / (n as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn gauss_rule_first_moments() {
        let j = mp_operator();
        let rule = gauss_rule(&j, 9).unwrap();
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mean: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| x * w).sum();
        assert_relative_eq!(mean, j.b(0), max_relative = 1e-12);
        for w in rule.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for &w in &rule.weights {
            assert!(w > 0.0);
        }
    }

    #[test]
    fn gauss_exactness_unbounded() {
        // N-point rule integrates p_i p_j exactly for i+j ≤ 2N-1
        let j = mp_operator();
        let n = 12u32;
        let rule = gauss_rule(&j, n).unwrap();
        let vals: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|&x| eval_by_recurrence(&j, n, x).unwrap())
            .collect();
        for i in 0..=(n as usize) {
            for jx in 0..=(n as usize) {
                if i + jx > 2 * n as usize - 1 {
                    continue;
                }
                let s: f64 = vals
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * p[i] * p[jx])
                    .sum();
                let want = if i == jx { 1.0 } else { 0.0 };
                assert!(
                    (s - want).abs() < 1e-10,
                    "moment ({i},{jx}) came out {s}"
                );
            }
        }
    }

    #[test]
    fn gauss_exactness_finite_lattice() {
        // full-dimension rule on a finite operator is its exact spectral
        // decomposition: Gram identity for every pair
        let j = dqk_operator();
        let rule = gauss_rule(&j, 7).unwrap();
        let vals: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|&x| eval_by_recurrence(&j, 6, x).unwrap())
            .collect();
        for i in 0..=6usize {
            for jx in 0..=6usize {
                let s: f64 = vals
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * p[i] * p[jx])
                    .sum();
                let want = if i == jx { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-10, "Gram ({i},{jx}) = {s}");
            }
        }
    }

    /// Count of eigenvalues below x via the signs of the LDLᵀ pivots.
    fn count_below(t: &TridiagonalMatrix, x: f64) -> usize {
        let mut count = 0;
        let mut piv = t.diag[0] - x;
        if piv < 0.0 {
            count += 1;
        }
        for i in 1..t.order() {
            let e = t.offdiag[i - 1];
            let denom = if piv == 0.0 { 1e-300 } else { piv };
            piv = t.diag[i] - x - e * e / denom;
            if piv < 0.0 {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn eigenvalues_match_sturm_bisection() {
        for t in [truncate(&mp_operator(), 5).unwrap(), truncate(&dqk_operator(), 6).unwrap()] {
            let n = t.order();
            // Gershgorin enclosure
            let radius = |i: usize| {
                let left = if i > 0 { t.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { t.offdiag[i].abs() } else { 0.0 };
                left + right
            };
            let lo0 = (0..n).map(|i| t.diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
            let hi0 = (0..n).map(|i| t.diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
            let eig = eig_tridiagonal(&t).unwrap();
            for j in 0..n {
                let (mut lo, mut hi) = (lo0 - 1.0, hi0 + 1.0);
                while hi - lo > 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
                    let mid = 0.5 * (lo + hi);
                    if count_below(&t, mid) > j {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let root = 0.5 * (lo + hi);
                assert!(
                    (root - eig.values[j]).abs() <= 1e-10 * (1.0 + root.abs()),
                    "eigenvalue {j}: bisection {root} vs QL {}",
                    eig.values[j]
                );
            }
        }
    }

    #[test]
    fn recurrence_evaluation_basics() {
        let j = mp_operator();
        let x = 0.83;
        let p = eval_by_recurrence(&j, 6, x).unwrap();
        assert_eq!(p.len(), 7);
        assert_eq!(p[0], 1.0);
        assert_relative_eq!(p[1], (x - j.b(0)) / j.a(0), max_relative = 1e-15);

        // out of range on a finite lattice
        let fj = dqk_operator();
        assert!(eval_by_recurrence(&fj, 6, 0.0).is_ok());
        assert!(matches!(eval_by_recurrence(&fj, 7, 0.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn recurrence_matches_orthonormal_closed_form() {
        let fam = Family::Classical(ClassicalFamily::MeixnerPollaczek { lambda: 1.3, phi: 0.9 });
        let j = poly::recurrence(&fam).unwrap();
        for &x in &[-1.7, 0.3, 2.4] {
            let y = poly::argument(j.variable_map, cx(x, 0.0)).unwrap().re;
            let p = eval_by_recurrence(&j, 10, y).unwrap();
            for n in 0..=10u32 {
                let want = poly::orthonormal_eval(&fam, n, x).unwrap();
                assert_relative_eq!(p[n as usize], want, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn su11_operator_reproduces_meixner_pollaczek_recurrence() {
        let (k, phi) = (0.85, 1.1);
        let rep = representation_operator(RepnOperatorSpec::Su11Xphi { k, phi }).unwrap();
        let fam = Family::Classical(ClassicalFamily::MeixnerPollaczek { lambda: k, phi });
        let rec = poly::recurrence(&fam).unwrap();
        for n in 0..40u32 {
            assert_relative_eq!(rep.a(n), rec.a(n), max_relative = 1e-13);
            assert_relative_eq!(rep.b(n), rec.b(n), max_relative = 1e-13);
        }
        assert_eq!(rep.variable_map, rec.variable_map);
        assert_eq!(rep.dimension, Dimension::Unbounded);
    }

    #[test]
    fn ys_operator_reproduces_al_salam_chihara_recurrence() {
        // the eigenvector expansion carries Y_s·A to the recurrence with
        // parameters (s q^{2k}, q^{2k}/s) in base q², up to the affine change
        // of variable recorded in variable_map
        let (k, s, q) = (0.7, 1.4, 0.6);
        let rep = representation_operator(RepnOperatorSpec::UqSu11YsA { k, s, q }).unwrap();
        let fam = Family::Q(QFamily::AlSalamChihara {
            a: cx(s * q.powf(2.0 * k), 0.0),
            b: cx(q.powf(2.0 * k) / s, 0.0),
            q: q * q,
        });
        let rec = poly::recurrence(&fam).unwrap();
        let scale = 1.0 / q - q;
        for n in 0..30u32 {
            assert_relative_eq!(rep.a(n) * scale, rec.a(n), max_relative = 1e-13);
            // compare in the operator's own scale: the other direction pits
            // (s+1/s)(q^{2k+2n}-1) + (s+1/s) against a value that decays to 0
            // and loses all relative accuracy to cancellation
            assert_relative_eq!(
                rep.b(n),
                (rec.b(n) - (s + 1.0 / s)) / scale,
                max_relative = 1e-13
            );
        }
        assert_eq!(rep.variable_map, ArgumentMap::YsAffine { s, q });
    }

    #[test]
    fn xpa_operator_eigenvalues() {
        let (p, q) = (1.2, 0.6);
        for n_max in [0u32, 1, 4, 8] {
            let rep =
                representation_operator(RepnOperatorSpec::UqSu2XpA { n_max, p, q }).unwrap();
            assert_eq!(rep.dimension, Dimension::Finite(n_max + 1));
            let t = truncate(&rep, n_max + 1).unwrap();
            let eig = eig_tridiagonal(&t).unwrap();
            let mut want: Vec<f64> = (0..=n_max)
                .map(|f| {
                    poly::argument(rep.variable_map, cx(f as f64, 0.0)).unwrap().re
                })
                .collect();
            want.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (got, want) in eig.values.iter().zip(&want) {
                assert!(
                    (got - want).abs() <= 1e-10 * (1.0 + want.abs()),
                    "N={n_max}: eigenvalue {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn representation_spec_validation() {
        assert!(representation_operator(RepnOperatorSpec::Su11Xphi { k: 0.0, phi: 1.0 }).is_err());
        assert!(representation_operator(RepnOperatorSpec::Su11Xphi { k: 1.0, phi: 0.0 }).is_err());
        assert!(representation_operator(RepnOperatorSpec::Su11Xphi { k: 1.0, phi: PI }).is_err());
        assert!(
            representation_operator(RepnOperatorSpec::UqSu11YsA { k: 0.5, s: 0.0, q: 0.5 })
                .is_err()
        );
        assert!(
            representation_operator(RepnOperatorSpec::UqSu11YsA { k: 0.5, s: 1.0, q: 1.0 })
                .is_err()
        );
        assert!(
            representation_operator(RepnOperatorSpec::UqSu2XpA { n_max: 3, p: 0.0, q: 0.5 })
                .is_err()
        );
        assert!(
            representation_operator(RepnOperatorSpec::UqSu2XpA { n_max: 3, p: 1.2, q: 0.5 })
                .is_ok()
        );
    }
}
