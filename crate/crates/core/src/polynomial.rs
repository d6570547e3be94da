//! Dense real polynomials in ascending-power form and real-root extraction.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which a coefficient counts as zero when trimming.
pub const DEFAULT_TOL_LEAD: f64 = 1e-10;

/// Real polynomial `c0 + c1 t + ... + cn t^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Ascending coefficients. Trailing exact zeros are dropped.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, zero past the stored length.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nominal degree (index of the last stored coefficient).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Highest index whose coefficient exceeds `tol_lead * max|c|`.
    /// `None` for the zero polynomial.
    pub fn effective_degree(&self, tol_lead: f64) -> Option<usize> {
        let cutoff = tol_lead * self.max_abs_coeff();
        self.coeffs.iter().rposition(|c| c.abs() > cutoff)
    }

    /// Copy with negligible leading coefficients removed.
    pub fn trimmed(&self, tol_lead: f64) -> Polynomial {
        match self.effective_degree(tol_lead) {
            Some(d) => Polynomial::new(&self.coeffs[..=d]),
            None => Polynomial::zero(),
        }
    }

    /// Horner evaluation.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect::<Vec<_>>())
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect::<Vec<_>>())
    }

    /// Long division `self = quotient * divisor + remainder`. Returns the
    /// quotient and the Euclidean norm of the remainder coefficients.
    ///
    /// The divisor's stored leading coefficient must be nonzero.
    pub fn divide_out(&self, divisor: &Polynomial) -> (Polynomial, f64) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd];
        let n = match self.degree() {
            Some(n) if n >= dd => n,
            _ => {
                let norm = self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
                return (Polynomial::zero(), norm);
            }
        };
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; n - dd + 1];
        for k in (0..=n - dd).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= q * d;
            }
            rem[k + dd] = 0.0;
        }
        let norm = rem[..dd].iter().map(|c| c * c).sum::<f64>().sqrt();
        (Polynomial::new(quot), norm)
    }

    /// Quotient of `self / (t - r)`, discarding the remainder. Runs from the
    /// leading coefficient down for `|r| <= 1` and from the constant term up
    /// otherwise, which keeps the recurrence stable for large roots.
    pub fn deflate(&self, r: f64) -> Polynomial {
        let Some(n) = self.degree().filter(|&n| n > 0) else {
            return Polynomial::zero();
        };
        let p = &self.coeffs;
        let mut q = vec![0.0; n];
        if r.abs() <= 1.0 {
            q[n - 1] = p[n];
            for k in (1..n).rev() {
                q[k - 1] = p[k] + r * q[k];
            }
        } else {
            q[0] = -p[0] / r;
            for k in 1..n {
                q[k] = (q[k - 1] - p[k]) / r;
            }
        }
        Polynomial::new(q)
    }

    /// All real roots with multiplicities, polished on the original
    /// coefficients.
    pub fn real_roots(&self, opts: &RootOptions) -> Result<Vec<Root>> {
        real_roots(self, opts)
    }

    /// Real parts of the complex roots (one per conjugate pair) with
    /// `|im| <= band * (1 + |re|)` that [`real_roots`] rejected as non-real.
    /// A slightly perturbed cluster of real roots can end up here.
    pub fn near_real_parts(&self, opts: &RootOptions, band: f64) -> Vec<f64> {
        let p = self.trimmed(opts.tol_lead);
        if p.is_zero() {
            return Vec::new();
        }
        let cutoff = opts.tol_lead * p.max_abs_coeff();
        let zeros = p.coeffs.iter().take_while(|c| c.abs() <= cutoff).count();
        companion_eigenvalues(&Polynomial::new(&p.coeffs[zeros..]))
            .into_iter()
            .filter(|&(re, im)| im > opts.tol_imag * (1.0 + re.abs()) && im <= band * (1.0 + re.abs()))
            .map(|(re, _)| re)
            .collect()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect::<Vec<_>>())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect::<Vec<_>>())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// Tolerances for [`real_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Relative leading/trailing coefficient cutoff.
    pub tol_lead: f64,
    /// An eigenvalue is real when `|im| <= tol_imag * (1 + |re|)`.
    pub tol_imag: f64,
    /// Real roots closer than `tol_cluster * (1 + |r|)` are merged.
    pub tol_cluster: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { tol_lead: DEFAULT_TOL_LEAD, tol_imag: 1e-8, tol_cluster: 1e-7 }
    }
}

/// A real root, its multiplicity and `|p(root)|` after polishing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
    pub residual: f64,
}

/// Real roots of `p`, sorted ascending.
///
/// Zero roots are split off from negligible trailing coefficients first.
/// The remaining roots come from the eigenvalues of the companion matrix;
/// near-real eigenvalues are clustered, and each cluster of multiplicity `m`
/// is polished by Newton iteration on the `(m-1)`-th derivative, where the
/// root is simple.
pub fn real_roots(p: &Polynomial, opts: &RootOptions) -> Result<Vec<Root>> {
    let p = p.trimmed(opts.tol_lead);
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let cutoff = opts.tol_lead * p.max_abs_coeff();
    let zeros = p.coeffs.iter().take_while(|c| c.abs() <= cutoff).count();
    let reduced = Polynomial::new(&p.coeffs[zeros..]);

    let mut candidates: Vec<f64> = vec![0.0; zeros];
    for (re, im) in companion_eigenvalues(&reduced) {
        if im.abs() <= opts.tol_imag * (1.0 + re.abs()) {
            candidates.push(re);
        } else if im > 0.0 && im <= opts.tol_imag.sqrt() * (1.0 + re.abs()) {
            // A double real root is typically perturbed into a conjugate pair
            // with |im| ~ sqrt(eps). Keep the pair when p vanishes to
            // rounding level at the stationary point next to it.
            let r = newton_polish(&p.derivative(), re);
            if p.evaluate(r).abs() <= 1e-13 * magnitude_at(&p, r) {
                candidates.extend([r, r]);
            }
        }
    }
    candidates.sort_by(|a, b| a.total_cmp(b));

    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for r in candidates {
        match clusters.last_mut() {
            Some(c) if (r - c[c.len() - 1]).abs() <= opts.tol_cluster * (1.0 + r.abs()) => c.push(r),
            _ => clusters.push(vec![r]),
        }
    }

    let mut roots: Vec<Root> = clusters
        .into_iter()
        .map(|c| {
            let m = c.len();
            let mean = c.iter().sum::<f64>() / m as f64;
            let mut target = p.clone();
            for _ in 1..m {
                target = target.derivative();
            }
            let value = newton_polish(&target, mean);
            Root { value, multiplicity: m, residual: p.evaluate(value).abs() }
        })
        .collect();
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(roots)
}

/// Eigenvalues of the companion matrix of `p` as `(re, im)` pairs.
fn companion_eigenvalues(p: &Polynomial) -> Vec<(f64, f64)> {
    let n = match p.degree() {
        Some(n) if n > 0 => n,
        _ => return Vec::new(),
    };
    let lead = p.coeffs[n];
    if n == 1 {
        return vec![(-p.coeffs[0] / lead, 0.0)];
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs[i] / lead;
    }
    m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

/// `sum |c_i| |t|^i`, the scale of rounding error in evaluating `p(t)`.
fn magnitude_at(p: &Polynomial, t: f64) -> f64 {
    p.coeffs.iter().rev().fold(0.0, |acc, c| acc * t.abs() + c.abs())
}

/// Newton iteration from `start`, keeping the best iterate by `|p|`.
fn newton_polish(p: &Polynomial, start: f64) -> f64 {
    let dp = p.derivative();
    let mut best = start;
    let mut best_val = p.evaluate(start).abs();
    let mut t = start;
    for _ in 0..50 {
        let d = dp.evaluate(t);
        if d == 0.0 {
            break;
        }
        let step = p.evaluate(t) / d;
        t -= step;
        let v = p.evaluate(t).abs();
        if v < best_val {
            best = t;
            best_val = v;
        }
        if step.abs() <= f64::EPSILON * (1.0 + t.abs()) || best_val == 0.0 {
            break;
        }
    }
    // Newton may wander off on a flat region; never move further than the
    // clustering radius would justify.
    if (best - start).abs() > 1e-3 * (1.0 + start.abs()) {
        start
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots(c: &[f64]) -> Vec<Root> {
        Polynomial::new(c.to_vec()).real_roots(&RootOptions::default()).unwrap()
    }

    #[test]
    fn deflation_small_and_large_roots() {
        // (t - 0.5)(t + 2000)(t - 3)
        let p = &(&Polynomial::new(vec![-0.5, 1.0]) * &Polynomial::new(vec![2000.0, 1.0]))
            * &Polynomial::new(vec![-3.0, 1.0]);
        for (r, other) in [(0.5, -2000.0), (-2000.0, 0.5)] {
            let q = p.deflate(r);
            assert_eq!(q.degree(), Some(2));
            assert!(q.evaluate(3.0).abs() < 1e-9 * q.max_abs_coeff());
            assert!(q.evaluate(other).abs() < 1e-9 * q.max_abs_coeff() * other.abs().max(1.0).powi(2));
        }
    }

    #[test]
    fn cubic_of_the_family_example() {
        // t = -1 is exact; 161 t^2 - 400 t + 161 = 0 gives the other two.
        let disc = (400.0f64 * 400.0 - 4.0 * 161.0 * 161.0).sqrt();
        let expected = [-1.0, (400.0 - disc) / 322.0, (400.0 + disc) / 322.0];
        let r = roots(&[161.0, -239.0, -239.0, 161.0]);
        assert_eq!(r.len(), 3);
        for (root, want) in r.iter().zip(expected) {
            assert_eq!(root.multiplicity, 1);
            assert!((root.value - want).abs() < 1e-12, "{} vs {want}", root.value);
        }
        assert!((r[1].value - 0.50525).abs() < 1e-5 && (r[2].value - 1.97923).abs() < 1e-5);
    }

    #[test]
    fn double_root_at_zero() {
        let r = roots(&[0.0, 0.0, -2.0, 1.0]);
        assert_eq!(r.len(), 2);
        assert_eq!((r[0].value, r[0].multiplicity), (0.0, 2));
        assert!((r[1].value - 2.0).abs() < 1e-14 && r[1].multiplicity == 1);
    }

    #[test]
    fn no_real_roots() {
        assert!(roots(&[1.0, 0.0, 1.0]).is_empty());
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        let err = Polynomial::new(vec![0.0, 0.0]).real_roots(&RootOptions::default());
        assert_eq!(err, Err(Error::ZeroPolynomial));
        assert!(roots(&[3.0]).is_empty());
    }

    #[test]
    fn interior_double_root_is_merged() {
        // (t - 0.3)^2 (t + 2)
        let p =
            &(&Polynomial::new(vec![-0.3, 1.0]) * &Polynomial::new(vec![-0.3, 1.0])) * &Polynomial::new(vec![2.0, 1.0]);
        let r = p.real_roots(&RootOptions::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].multiplicity, 2);
        assert!((r[1].value - 0.3).abs() < 1e-9);
    }

    #[test]
    fn close_complex_pair_stays_complex() {
        // (t - 0.3)^2 + 1e-10 has no real root
        let p = Polynomial::new(vec![0.09 + 1e-10, -0.6, 1.0]);
        assert!(p.real_roots(&RootOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn negligible_leading_coefficient_is_trimmed() {
        let p = Polynomial::new(vec![-1.0, 1.0, 1e-14]);
        assert_eq!(p.effective_degree(DEFAULT_TOL_LEAD), Some(1));
        let r = p.real_roots(&RootOptions::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn division() {
        let (q, rem) = Polynomial::new(vec![1.0, 0.0, 2.0, 0.0, 1.0]).divide_out(&Polynomial::new(vec![1.0, 0.0, 1.0]));
        assert_eq!(q.coeffs(), &[1.0, 0.0, 1.0]);
        assert_eq!(rem, 0.0);

        let (q, rem) = Polynomial::new(vec![1.0, 1.0]).divide_out(&Polynomial::new(vec![1.0, 0.0, 1.0]));
        assert!(q.is_zero());
        assert_eq!(rem, 2f64.sqrt());
    }

    #[test]
    fn evaluation_and_derivative() {
        let p = Polynomial::new(vec![161.0, -239.0, -239.0, 161.0]);
        assert_eq!(p.evaluate(-1.0), 0.0);
        assert_eq!(p.evaluate(0.0), 161.0);
        // -239 - 478 t + 483 t^2 at t = -1
        assert_eq!(p.derivative().evaluate(-1.0), 722.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn recovers_product_of_linear_factors(
                mut rs in proptest::collection::vec(-5.0..5.0f64, 1..=6),
                lead in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64],
            ) {
                rs.sort_by(|a, b| a.total_cmp(b));
                prop_assume!(rs.windows(2).all(|w| w[1] - w[0] > 0.05));
                let p = rs.iter().fold(Polynomial::constant(lead), |acc, r| &acc * &Polynomial::new(vec![-r, 1.0]));
                let found = p.real_roots(&RootOptions::default()).unwrap();
                prop_assert_eq!(found.len(), rs.len());
                let n = rs.len() as f64;
                let bound = p.max_abs_coeff();
                for (f, r) in found.iter().zip(&rs) {
                    prop_assert!((f.value - r).abs() < 1e-7 * (1.0 + r.abs()));
                    prop_assert!(f.residual <= 1e-8 * (n + 1.0) * bound * f.value.abs().max(1.0).powf(n));
                }
            }

            #[test]
            fn multiplicities_never_exceed_degree(c in proptest::collection::vec(-3.0..3.0f64, 2..=9)) {
                let p = Polynomial::new(c);
                if let Ok(found) = p.real_roots(&RootOptions::default()) {
                    let total: usize = found.iter().map(|r| r.multiplicity).sum();
                    prop_assert!(total <= p.effective_degree(DEFAULT_TOL_LEAD).unwrap_or(0));
                }
            }
        }
    }
}
