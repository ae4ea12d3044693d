//! q-numbers, q-factorials and the Jackson q-exponential.
//!
//! The series form `e_q(x) = sum x^n / [n]_q!` is entire for `q > 1` and
//! converges in `|x| < 1/(1-q)` for `q < 1`. Both regimes also have product
//! forms:
//!
//! * `q > 1`: `prod_k (1 + x q^{-k} (1 - 1/q))`, zeros at `x = -q^{k+1}/(q-1)`;
//! * `q < 1`: `prod_k 1 / (1 - q^k (1-q) x)`, poles at `x = 1/((1-q) q^k)`.
//!
//! Within `CLASSICAL_BAND` of `q = 1` every function falls back to its
//! classical counterpart (`n`, `n!`, `exp`).

use serde::{Deserialize, Serialize};

use crate::complex::{ensure_finite, Complex};
use crate::error::{FlowError, Result};
use crate::states::Truncation;

/// `|q - 1|` below which the classical formulas are used.
pub const CLASSICAL_BAND: f64 = 1e-6;

/// Relative distance of a product factor from zero treated as a pole hit.
const POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    GreaterThanOne,
    LessThanOne,
}

/// Deformation parameter `q > 0`, `q != 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParameter {
    q: f64,
}

impl QParameter {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 || q == 1.0 {
            return Err(FlowError::InvalidQ(q));
        }
        Ok(Self { q })
    }

    pub fn value(&self) -> f64 {
        self.q
    }

    pub fn regime(&self) -> Regime {
        if self.q > 1.0 {
            Regime::GreaterThanOne
        } else {
            Regime::LessThanOne
        }
    }

    pub fn is_classical(&self) -> bool {
        (self.q - 1.0).abs() < CLASSICAL_BAND
    }

    /// Radius of convergence of the series in the argument `x`
    /// (`None` when the series is entire).
    pub fn convergence_radius(&self) -> Option<f64> {
        if self.q < 1.0 && !self.is_classical() {
            Some(1.0 / (1.0 - self.q))
        } else {
            None
        }
    }
}

/// `[n]_q = 1 + q + ... + q^{n-1}`.
pub fn q_number(n: u32, q: QParameter) -> f64 {
    if q.is_classical() {
        return n as f64;
    }
    let mut sum = 0.0;
    let mut power = 1.0;
    for _ in 0..n {
        sum += power;
        power *= q.q;
    }
    sum
}

/// `ln([n]_q!)`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, q: QParameter) -> f64 {
    if q.is_classical() {
        return crate::states::ln_factorial(n);
    }
    (1..=n).map(|k| q_number(k, q).ln()).sum()
}

/// Series form of `e_q(x)`.
pub fn q_exponential(q: QParameter, x: Complex, t: &Truncation) -> Result<Complex> {
    q_exponential_with_derivative(q, x, t).map(|(v, _)| v)
}

/// Series form of `e_q(x)` together with `d/dx e_q(x)`.
pub fn q_exponential_with_derivative(
    q: QParameter,
    x: Complex,
    t: &Truncation,
) -> Result<(Complex, Complex)> {
    if q.is_classical() {
        let v = ensure_finite(x.exp(), "classical exponential")?;
        return Ok((v, v));
    }
    if let Some(radius) = q.convergence_radius() {
        if x.norm() >= radius {
            return Err(FlowError::ConvergenceDomain { x, radius });
        }
    }
    // term_n = x^n / [n]_q!;  derivative term = n x^{n-1} / [n]_q! = term_{n-1} / [n-1]_q! * ... = term_{n-1} * n / [n]_q
    let mut value = Complex::new(1.0, 0.0);
    let mut deriv = Complex::new(0.0, 0.0);
    let mut prev = Complex::new(1.0, 0.0);
    let mut small_in_a_row = 0;
    for n in 1..t.max_terms as u32 {
        let qn = q_number(n, q);
        let d_term = prev * (n as f64 / qn);
        let term = prev * x / qn;
        value += term;
        deriv += d_term;
        if !(value.re.is_finite() && value.im.is_finite() && deriv.re.is_finite() && deriv.im.is_finite()) {
            return Err(FlowError::Overflow("q-exponential series".into()));
        }
        let small = term.norm() < t.tol * value.norm() && d_term.norm() < t.tol * deriv.norm();
        small_in_a_row = if small { small_in_a_row + 1 } else { 0 };
        if small_in_a_row >= 2 {
            return Ok((value, deriv));
        }
        prev = term;
    }
    Err(FlowError::NonConvergence { max_terms: t.max_terms })
}

/// Factor `k` of the `q > 1` product, `1 + x q^{-k} (1 - 1/q)`.
pub fn q_product_factor(q: QParameter, k: u32, x: Complex) -> Complex {
    let scale = q.q.powi(-(k as i32)) * (1.0 - 1.0 / q.q);
    Complex::new(1.0, 0.0) + x * scale
}

/// Factor `k` of the `q < 1` reciprocal product, `1 - q^k (1 - q) x`.
pub fn q_pole_factor(q: QParameter, k: u32, x: Complex) -> Complex {
    Complex::new(1.0, 0.0) - x * (q.q.powi(k as i32) * (1.0 - q.q))
}

/// Zero of factor `k` of the `q > 1` product, in the argument `x`.
pub fn product_zero(q: QParameter, k: u32) -> f64 {
    -q.q.powi(k as i32 + 1) / (q.q - 1.0)
}

/// Pole of factor `k` of the `q < 1` product, in the argument `x`.
pub fn product_pole(q: QParameter, k: u32) -> f64 {
    1.0 / ((1.0 - q.q) * q.q.powi(k as i32))
}

/// Truncated product form of `e_q(x)`; stops once a factor is within
/// `t.tol` of one or after `t.max_terms` factors.
pub fn q_exponential_product(q: QParameter, x: Complex, t: &Truncation) -> Result<Complex> {
    q_exponential_product_n(q, x, t.max_terms, t.tol)
}

/// Product form with an explicit factor budget (`tol = 0` uses every factor).
pub fn q_exponential_product_n(q: QParameter, x: Complex, max_factors: usize, tol: f64) -> Result<Complex> {
    if q.is_classical() {
        return ensure_finite(x.exp(), "classical exponential");
    }
    let one = Complex::new(1.0, 0.0);
    let mut acc = one;
    for k in 0..max_factors as u32 {
        match q.regime() {
            Regime::GreaterThanOne => {
                let f = q_product_factor(q, k, x);
                acc *= f;
                if (f - one).norm() < tol {
                    break;
                }
            }
            Regime::LessThanOne => {
                let f = q_pole_factor(q, k, x);
                if f.norm() < POLE_GUARD {
                    return Err(FlowError::PoleProximity { z: x });
                }
                acc /= f;
                if (f - one).norm() < tol {
                    break;
                }
            }
        }
    }
    ensure_finite(acc, "q-exponential product")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;

    fn qp(q: f64) -> QParameter {
        QParameter::new(q).unwrap()
    }

    // independent brute force: partial sums of 1/[n]_2! with [n]_2 = 2^n - 1
    fn brute_e2_at_one() -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for n in 0..60 {
            if n > 0 {
                fact *= (2f64).powi(n) - 1.0;
            }
            sum += 1.0 / fact;
        }
        sum
    }

    #[test]
    fn rejects_bad_q() {
        assert!(QParameter::new(1.0).is_err());
        assert!(QParameter::new(0.0).is_err());
        assert!(QParameter::new(-2.0).is_err());
        assert!(QParameter::new(f64::NAN).is_err());
        assert_eq!(qp(2.0).regime(), Regime::GreaterThanOne);
        assert_eq!(qp(0.5).regime(), Regime::LessThanOne);
    }

    #[test]
    fn q_numbers() {
        assert_eq!(q_number(0, qp(2.0)), 0.0);
        assert_eq!(q_number(0, qp(0.3)), 0.0);
        assert_eq!(q_number(3, qp(2.0)), 7.0);
        assert!((q_number(5, qp(1.0 + 1e-12)) - 5.0).abs() < 1e-9);
    }

    #[test]
    fn q_number_recurrence() {
        for &q in &[2.0, 3.0, 0.5, 0.8, 1.1] {
            let qp = qp(q);
            for n in 0..=60 {
                let lhs = q_number(n + 1, qp);
                let rhs = 1.0 + q * q_number(n, qp);
                assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs(), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn q_factorials() {
        assert_eq!(q_factorial(0, qp(2.0)), 0.0);
        assert!((q_factorial(4, qp(2.0)).exp() - 315.0).abs() < 1e-10);
        assert!((q_factorial(5, qp(1.0 + 1e-9)).exp() - 120.0).abs() < 1e-9);
    }

    #[test]
    fn series_values() {
        let t = Truncation::default();
        assert_eq!(q_exponential(qp(2.0), c(0.0, 0.0), &t).unwrap(), c(1.0, 0.0));
        let expect = brute_e2_at_one();
        assert!((expect - 2.384_231_029_031_371_7).abs() < 1e-15);
        let got = q_exponential(qp(2.0), c(1.0, 0.0), &t).unwrap();
        assert!((got.re - expect).abs() < 1e-14 && got.im == 0.0);
        for q in [1.0 + 1e-6, 1.0 - 1e-6] {
            let v = q_exponential(qp(q), c(1.0, 0.0), &t).unwrap();
            assert!((v.re - std::f64::consts::E).abs() < 1e-4);
        }
    }

    #[test]
    fn series_domain_error() {
        let t = Truncation::default();
        let err = q_exponential(qp(0.5), c(2.5, 0.0), &t).unwrap_err();
        assert!(matches!(err, FlowError::ConvergenceDomain { .. }));
    }

    #[test]
    fn series_non_convergence() {
        let t = Truncation { max_terms: 8, tol: 1e-14 };
        let err = q_exponential(qp(0.9), c(9.0, 0.0), &t).unwrap_err();
        assert_eq!(err, FlowError::NonConvergence { max_terms: 8 });
    }

    #[test]
    fn product_matches_series() {
        let t = Truncation::default();
        assert_eq!(q_exponential_product(qp(2.0), c(0.0, 0.0), &t).unwrap(), c(1.0, 0.0));
        let p = q_exponential_product_n(qp(2.0), c(1.0, 0.0), 64, 0.0).unwrap();
        let s = q_exponential(qp(2.0), c(1.0, 0.0), &t).unwrap();
        assert!((p - s).norm() <= 1e-10);
    }

    #[test]
    fn product_pole_behaviour() {
        let t = Truncation { max_terms: 400, tol: 1e-16 };
        let q = qp(0.5);
        assert!(q_exponential_product(q, c(1.5, 0.0), &t).unwrap().norm().is_finite());
        let mut last = 0.0;
        for x in [1.9, 1.99, 1.999, 1.9999] {
            let m = q_exponential_product(q, c(x, 0.0), &t).unwrap().norm();
            assert!(m > last);
            last = m;
        }
        assert!(last > 1e3);
        assert!(matches!(
            q_exponential_product(q, c(2.0, 0.0), &t),
            Err(FlowError::PoleProximity { .. })
        ));
    }

    #[test]
    fn factor_zeros_are_exact() {
        for &q in &[2.0, 3.0, 1.5] {
            let qp = qp(q);
            for k in 0..20 {
                let x = c(product_zero(qp, k), 0.0);
                assert!(q_product_factor(qp, k, x).norm() <= 1e-15, "q={q} k={k}");
            }
        }
        for &q in &[0.5, 0.8] {
            let qp = qp(q);
            for k in 0..20 {
                let x = c(product_pole(qp, k), 0.0);
                assert!(q_pole_factor(qp, k, x).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn monotone_truncation() {
        for &q in &[2.0, 3.0, 0.5, 0.8] {
            let qp = qp(q);
            let xs = if q > 1.0 {
                vec![c(1.0, 0.0), c(2.5, 1.0), c(-0.7, 0.4), c(0.3, -3.0)]
            } else {
                let r = 0.5 / (1.0 - q);
                vec![c(r * 0.5, 0.0), c(-r * 0.8, 0.1), c(0.2 * r, 0.7 * r)]
            };
            for x in xs {
                let kmax = 60;
                let reference = q_exponential_product_n(qp, x, 2 * kmax, 0.0).unwrap();
                let mut last = f64::INFINITY;
                for k in 1..=kmax {
                    let d = (q_exponential_product_n(qp, x, k, 0.0).unwrap() - reference).norm();
                    assert!(d <= last * (1.0 + 1e-12) + 1e-15, "q={q} x={x} k={k}");
                    last = d;
                }
            }
        }
    }
}
