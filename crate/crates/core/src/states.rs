//! Fock-Bargmann wave functions `Psi(z)` for the supported state families.
//!
//! All states are unnormalized. Exponential families are evaluated in a
//! scaled form `m * e^s` so that logarithms and logarithmic derivatives stay
//! finite long after `Psi` itself would overflow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complex::{cis, ensure_finite, Complex};
use crate::error::{FlowError, Result};
use crate::qcalc::{self, QParameter};

/// `|Psi|` below this is treated as sitting on a zero.
pub const SINGULARITY_GUARD: f64 = 1e-280;

/// Default number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 128;
/// Default relative stopping tolerance for series.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Series truncation policy. A series stops after `max_terms` terms or once
/// two consecutive terms fall below `tol * |partial sum|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub max_terms: usize,
    pub tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { max_terms: DEFAULT_MAX_TERMS, tol: DEFAULT_TOL }
    }
}

impl Truncation {
    pub fn new(max_terms: usize, tol: f64) -> Result<Self> {
        let t = Self { max_terms, tol };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(FlowError::InvalidParameter("max_terms must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(FlowError::InvalidParameter("tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// A quantum state in Fock-Bargmann form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateSpec {
    /// `z^n / sqrt(n!)`
    Fock { n: u32 },
    /// `e^{alpha z}`
    Coherent {
        #[serde(with = "crate::complex::text")]
        alpha: Complex,
    },
    /// `(z - conj(alpha))^n e^{alpha z} / sqrt(n!)`
    Displaced {
        n: u32,
        #[serde(with = "crate::complex::text")]
        alpha: Complex,
    },
    /// `cosh(alpha z)` (even) or `sinh(alpha z)` (odd)
    Cat {
        parity: Parity,
        #[serde(with = "crate::complex::text")]
        alpha: Complex,
    },
    /// Sector `s` of `e^{alpha z}` under `z -> e^{2 pi i/3} z`
    Qutrit {
        sector: u8,
        #[serde(with = "crate::complex::text")]
        alpha: Complex,
    },
    /// Jackson exponential `e_q(alpha z)`
    #[serde(rename = "qcoherent")]
    QCoherent {
        q: f64,
        #[serde(with = "crate::complex::text")]
        alpha: Complex,
    },
    /// `sum c_n z^n / sqrt(n!)` over a finite coefficient list
    Coefficients {
        #[serde(with = "crate::complex::text_vec")]
        c: Vec<Complex>,
    },
}

impl StateSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            StateSpec::Qutrit { sector, .. } if *sector > 2 => Err(FlowError::InvalidParameter(format!(
                "qutrit sector must be 0, 1 or 2 (got {sector})"
            ))),
            StateSpec::QCoherent { q, .. } => QParameter::new(*q).map(|_| ()),
            StateSpec::Coefficients { c } if c.is_empty() => {
                Err(FlowError::InvalidParameter("coefficient list must be non-empty".into()))
            }
            StateSpec::Coefficients { c } if c.iter().any(|z| !crate::complex::is_finite(*z)) => {
                Err(FlowError::InvalidParameter("coefficients must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// `Psi(z) = z - a`: a single simple zero at `a`.
    pub fn point_zero(a: Complex) -> Self {
        StateSpec::Coefficients { c: vec![-a, Complex::new(1.0, 0.0)] }
    }

    /// The same state with every coefficient multiplied by `b`.
    /// Only meaningful for explicit coefficient lists.
    pub fn scaled(&self, b: Complex) -> Result<Self> {
        match self {
            StateSpec::Coefficients { c } => Ok(StateSpec::Coefficients { c: c.iter().map(|x| x * b).collect() }),
            _ => Err(FlowError::InvalidParameter(
                "only coefficient states can be rescaled; expand with taylor_coefficients first".into(),
            )),
        }
    }

    /// First `n` Fock coefficients `c_k = sqrt(k!) Psi^{(k)}(0) / k!` for the
    /// families with closed-form expansions.
    pub fn taylor_coefficients(&self, n: usize) -> Result<Vec<Complex>> {
        self.validate()?;
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        // c_k = alpha^k / sqrt(k!) for e^{alpha z}
        let coherent = |alpha: Complex| -> Vec<Complex> {
            (0..n)
                .map(|k| alpha.powu(k as u32) * (-0.5 * ln_factorial(k as u32)).exp())
                .collect()
        };
        Ok(match self {
            StateSpec::Fock { n: m } => (0..n).map(|k| if k == *m as usize { one } else { zero }).collect(),
            StateSpec::Coherent { alpha } => coherent(*alpha),
            StateSpec::Cat { parity, alpha } => coherent(*alpha)
                .into_iter()
                .enumerate()
                .map(|(k, v)| match (parity, k % 2) {
                    (Parity::Even, 0) | (Parity::Odd, 1) => v,
                    _ => zero,
                })
                .collect(),
            StateSpec::Qutrit { sector, alpha } => coherent(*alpha)
                .into_iter()
                .enumerate()
                .map(|(k, v)| if k % 3 == *sector as usize { v } else { zero })
                .collect(),
            StateSpec::Coefficients { c } => (0..n).map(|k| c.get(k).copied().unwrap_or(zero)).collect(),
            _ => {
                return Err(FlowError::InvalidParameter(
                    "no closed-form coefficient expansion for this state".into(),
                ))
            }
        })
    }
}

/// `ln(n!)` by summed logarithms.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `Psi` and `Psi'` sharing a common real log-scale: value = `psi * e^scale`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled {
    pub psi: Complex,
    pub dpsi: Complex,
    pub scale: f64,
}

impl Scaled {
    fn plain(psi: Complex, dpsi: Complex) -> Self {
        Self { psi, dpsi, scale: 0.0 }
    }

    pub fn value(&self) -> Result<Complex> {
        if self.psi == Complex::new(0.0, 0.0) {
            return Ok(self.psi);
        }
        ensure_finite(self.psi * self.scale.exp(), "wave function")
    }

    pub fn derivative(&self) -> Result<Complex> {
        if self.dpsi == Complex::new(0.0, 0.0) {
            return Ok(self.dpsi);
        }
        ensure_finite(self.dpsi * self.scale.exp(), "wave function derivative")
    }

    /// `ln |Psi|`
    pub fn ln_abs(&self) -> f64 {
        self.psi.norm().ln() + self.scale
    }

    pub fn is_singular(&self) -> bool {
        !(self.ln_abs() >= SINGULARITY_GUARD.ln())
    }

    fn guard(&self, z: Complex) -> Result<()> {
        if self.is_singular() {
            Err(FlowError::Singularity { z })
        } else {
            Ok(())
        }
    }

    /// Principal `Log Psi`.
    pub fn log(&self, z: Complex) -> Result<Complex> {
        self.guard(z)?;
        Ok(Complex::new(self.ln_abs(), self.psi.arg()))
    }

    /// `Psi' / Psi`
    pub fn log_derivative(&self, z: Complex) -> Result<Complex> {
        self.guard(z)?;
        ensure_finite(self.dpsi / self.psi, "logarithmic derivative")
    }
}

fn exp_scaled(w: Complex) -> (Complex, f64) {
    (cis(w.im), w.re)
}

/// Coefficient series `sum c_n z^n / sqrt(n!)` and its derivative.
fn coefficient_series(c: &[Complex], z: Complex, t: &Truncation) -> Result<Scaled> {
    let mut value = Complex::new(0.0, 0.0);
    let mut deriv = Complex::new(0.0, 0.0);
    // basis_n = z^n / sqrt(n!), dbasis_n = n z^{n-1} / sqrt(n!) = sqrt(n) basis_{n-1}
    let mut basis = Complex::new(1.0, 0.0);
    for (n, cn) in c.iter().enumerate().take(t.max_terms) {
        if n > 0 {
            let root = (n as f64).sqrt();
            deriv += cn * basis * root;
            basis = basis * z / root;
        }
        value += cn * basis;
    }
    ensure_finite(value, "coefficient series")?;
    ensure_finite(deriv, "coefficient series derivative")?;
    Ok(Scaled::plain(value, deriv))
}

/// Evaluates the qutrit sectors `(Psi_0, Psi_1, Psi_2)` in scaled form.
fn qutrit_scaled(alpha: Complex, z: Complex) -> ([Complex; 3], f64) {
    let w = alpha * z;
    if w.norm() <= 4.0 {
        (qutrit_taylor(w), 0.0)
    } else {
        qutrit_exponentials(w)
    }
}

/// Taylor split by `n mod 3`; 60 terms reach below 1e-40 at `|w| = 4`.
fn qutrit_taylor(w: Complex) -> [Complex; 3] {
    let mut out = [Complex::new(0.0, 0.0); 3];
    let mut term = Complex::new(1.0, 0.0);
    for n in 0..60usize {
        if n > 0 {
            term = term * w / n as f64;
        }
        out[n % 3] += term;
    }
    out
}

fn qutrit_exponentials(w: Complex) -> ([Complex; 3], f64) {
    let omega = [Complex::new(1.0, 0.0), cis(2.0 * PI / 3.0), cis(-2.0 * PI / 3.0)];
    let exps: Vec<Complex> = omega.iter().map(|o| w * o).collect();
    let scale = exps.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    let mut out = [Complex::new(0.0, 0.0); 3];
    for (s, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex::new(0.0, 0.0);
        for (j, e) in exps.iter().enumerate() {
            // coefficient omega^{-s j}
            let idx = (3 - (s * j) % 3) % 3;
            acc += omega[idx] * (e - scale).exp();
        }
        *slot = acc / 3.0;
    }
    (out, scale)
}

/// Stable `cosh`/`sinh` of `w` as `(mantissa, scale)` pairs.
fn cosh_sinh_scaled(w: Complex) -> (Complex, Complex, f64) {
    let one = Complex::new(1.0, 0.0);
    if w.re >= 0.0 {
        let (m, s) = exp_scaled(w);
        let tail = (-2.0 * w).exp();
        (m * (one + tail) * 0.5, m * (one - tail) * 0.5, s)
    } else {
        let (m, s) = exp_scaled(-w);
        let tail = (2.0 * w).exp();
        (m * (one + tail) * 0.5, -(m * (one - tail)) * 0.5, s)
    }
}

pub(crate) fn eval_scaled(s: &StateSpec, z: Complex, t: &Truncation) -> Result<Scaled> {
    s.validate()?;
    let zero = Complex::new(0.0, 0.0);
    Ok(match s {
        StateSpec::Fock { n } => monomial_exp(*n, z, zero, z),
        StateSpec::Coherent { alpha } => {
            let (m, scale) = exp_scaled(alpha * z);
            Scaled { psi: m, dpsi: m * alpha, scale }
        }
        StateSpec::Displaced { n, alpha } => monomial_exp(*n, z - alpha.conj(), *alpha, z),
        StateSpec::Cat { parity, alpha } => {
            let (ch, sh, scale) = cosh_sinh_scaled(alpha * z);
            match parity {
                Parity::Even => Scaled { psi: ch, dpsi: sh * alpha, scale },
                Parity::Odd => Scaled { psi: sh, dpsi: ch * alpha, scale },
            }
        }
        StateSpec::Qutrit { sector, alpha } => {
            let (parts, scale) = qutrit_scaled(*alpha, z);
            let s = *sector as usize;
            Scaled { psi: parts[s], dpsi: parts[(s + 2) % 3] * alpha, scale }
        }
        StateSpec::QCoherent { q, alpha } => {
            let q = QParameter::new(*q)?;
            let (v, d) = qcalc::q_exponential_with_derivative(q, alpha * z, t)?;
            Scaled::plain(v, d * alpha)
        }
        StateSpec::Coefficients { c } => coefficient_series(c, z, t)?,
    })
}

/// `w^n e^{alpha z} / sqrt(n!)` with derivative `Psi (n / w + alpha)`.
fn monomial_exp(n: u32, w: Complex, alpha: Complex, z: Complex) -> Scaled {
    let zero = Complex::new(0.0, 0.0);
    let extra = alpha * z;
    if n == 0 {
        let m = cis(extra.im);
        return Scaled { psi: m, dpsi: m * alpha, scale: extra.re };
    }
    let half_ln_fact = 0.5 * ln_factorial(n);
    if w == zero {
        // Psi = 0; Psi' nonzero only for n = 1
        let dpsi = if n == 1 { cis(extra.im) } else { zero };
        return Scaled { psi: zero, dpsi, scale: extra.re - half_ln_fact };
    }
    let m = cis(n as f64 * w.arg() + extra.im);
    let scale = n as f64 * w.norm().ln() - half_ln_fact + extra.re;
    Scaled { psi: m, dpsi: m * (n as f64 / w + alpha), scale }
}

/// `Psi(z)`.
pub fn eval_state(s: &StateSpec, z: Complex, t: &Truncation) -> Result<Complex> {
    eval_scaled(s, z, t)?.value()
}

/// `Psi'(z)`.
pub fn eval_state_derivative(s: &StateSpec, z: Complex, t: &Truncation) -> Result<Complex> {
    eval_scaled(s, z, t)?.derivative()
}

/// `Psi'(z) / Psi(z)`, evaluated without forming `Psi` where a closed form allows.
pub fn log_derivative(s: &StateSpec, z: Complex, t: &Truncation) -> Result<Complex> {
    if let StateSpec::Coherent { alpha } = s {
        s.validate()?;
        return Ok(*alpha);
    }
    eval_scaled(s, z, t)?.log_derivative(z)
}

/// Principal-branch `Log Psi(z)`.
pub fn log_value(s: &StateSpec, z: Complex, t: &Truncation) -> Result<Complex> {
    eval_scaled(s, z, t)?.log(z)
}

/// Truncated Taylor series `sum_{n} (alpha z)^n / n!` of a coherent state,
/// accumulated in double-double arithmetic so that cancellation in the
/// decaying directions does not eat the result. Honors the truncation policy.
pub fn coherent_series(alpha: Complex, z: Complex, t: &Truncation) -> Result<Complex> {
    t.validate()?;
    let x = alpha * z;
    let mut term = Dd2::one();
    let mut sum = Dd2::one();
    let mut small = 0;
    for n in 1..t.max_terms {
        term = term.mul(x).div(n as f64);
        sum = sum.add(term);
        if term.approx().norm() <= t.tol * sum.approx().norm() {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    ensure_finite(sum.approx(), "coherent series")
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd(p, a.mul_add(b, -p))
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.0, o.0);
        let lo = s.1 + self.1 + o.1;
        Dd::two_sum(s.0, lo)
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = Dd::two_prod(self.0, b);
        Dd::two_sum(p.0, p.1 + self.1 * b)
    }

    fn div_f(self, b: f64) -> Dd {
        let q1 = self.0 / b;
        let r = self.add(Dd::two_prod(q1, b).neg());
        let q2 = r.0 / b;
        Dd::two_sum(q1, q2)
    }
}

#[derive(Debug, Clone, Copy)]
struct Dd2 {
    re: Dd,
    im: Dd,
}

impl Dd2 {
    fn one() -> Self {
        Self { re: Dd(1.0, 0.0), im: Dd(0.0, 0.0) }
    }

    fn approx(&self) -> Complex {
        Complex::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }

    fn add(self, o: Dd2) -> Dd2 {
        Dd2 { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn mul(self, x: Complex) -> Dd2 {
        Dd2 {
            re: self.re.mul_f(x.re).add(self.im.mul_f(x.im).neg()),
            im: self.re.mul_f(x.im).add(self.im.mul_f(x.re)),
        }
    }

    fn div(self, d: f64) -> Dd2 {
        Dd2 { re: self.re.div_f(d), im: self.im.div_f(d) }
    }
}

/// `<beta|alpha> = e^{conj(beta) alpha}`.
pub fn inner_product_coherent(beta: Complex, alpha: Complex) -> Result<Complex> {
    ensure_finite((beta.conj() * alpha).exp(), "coherent inner product")
}

/// `<alpha|alpha> = e^{|alpha|^2}`.
pub fn coherent_norm(alpha: Complex) -> Result<f64> {
    let v = alpha.norm_sqr().exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FlowError::Overflow("coherent norm".into()))
    }
}

/// Even and odd parts of `e^{alpha z}`: `(cosh alpha z, sinh alpha z)`.
pub fn cat_components(alpha: Complex, z: Complex) -> Result<(Complex, Complex)> {
    let (ch, sh, scale) = cosh_sinh_scaled(alpha * z);
    let f = scale.exp();
    Ok((ensure_finite(ch * f, "cat component")?, ensure_finite(sh * f, "cat component")?))
}

/// The three `omega`-graded parts of `e^{alpha z}`, `omega = e^{2 pi i / 3}`.
pub fn qutrit_components(alpha: Complex, z: Complex) -> Result<(Complex, Complex, Complex)> {
    let (p, scale) = qutrit_scaled(alpha, z);
    let f = scale.exp();
    Ok((
        ensure_finite(p[0] * f, "qutrit component")?,
        ensure_finite(p[1] * f, "qutrit component")?,
        ensure_finite(p[2] * f, "qutrit component")?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;
    use approx::assert_relative_eq;

    fn t() -> Truncation {
        Truncation::default()
    }

    #[test]
    fn fock_values() {
        let v = eval_state(&StateSpec::Fock { n: 2 }, c(1.0, 0.0), &t()).unwrap();
        assert_relative_eq!(v.re, 0.707_106_781_186_547_5, max_relative = 1e-15);
        assert_eq!(eval_state(&StateSpec::Fock { n: 0 }, c(0.0, 0.0), &t()).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_state(&StateSpec::Fock { n: 3 }, c(0.0, 0.0), &t()).unwrap(), c(0.0, 0.0));
        let d = eval_state_derivative(&StateSpec::Fock { n: 3 }, c(1.0, 0.0), &t()).unwrap();
        assert_relative_eq!(d.re, 3.0 / 6f64.sqrt(), max_relative = 1e-14);
        assert!(d.im.abs() < 1e-15);
        // log-space keeps n = 200 finite for |z| = 2
        let big = eval_state(&StateSpec::Fock { n: 200 }, c(2.0, 0.0), &t()).unwrap();
        assert!(big.re.is_finite() && big.re > 0.0);
    }

    #[test]
    fn coherent_values() {
        let v = eval_state(&StateSpec::Coherent { alpha: c(1.0, 0.0) }, c(0.0, 0.0), &t()).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        let d = eval_state_derivative(&StateSpec::Coherent { alpha: c(2.0, 0.0) }, c(0.5, 0.0), &t()).unwrap();
        assert_relative_eq!(d.re, 2.0 * std::f64::consts::E, max_relative = 1e-15);
        let err = eval_state(&StateSpec::Coherent { alpha: c(1.0, 0.0) }, c(800.0, 0.0), &t()).unwrap_err();
        assert!(matches!(err, FlowError::Overflow(_)));
        // the log-derivative survives where Psi overflows
        let ld = log_derivative(&StateSpec::Coherent { alpha: c(1.0, 2.0) }, c(800.0, 0.0), &t()).unwrap();
        assert_eq!(ld, c(1.0, 2.0));
    }

    #[test]
    fn cat_values() {
        let odd = StateSpec::Cat { parity: Parity::Odd, alpha: c(1.0, 0.0) };
        assert_relative_eq!(eval_state(&odd, c(1.0, 0.0), &t()).unwrap().re, 1.175_201_193_643_801_4, max_relative = 1e-15);
        let (even, odd) = cat_components(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!((even, odd), (c(1.0, 0.0), c(0.0, 0.0)));
        let (even, odd) = cat_components(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_relative_eq!(even.re, 1.543_080_634_815_243_7, max_relative = 1e-15);
        assert_relative_eq!(odd.re, 1.175_201_193_643_801_4, max_relative = 1e-15);
        let (even, odd) = cat_components(c(0.0, 1.0), c(PI, 0.0)).unwrap();
        assert!((even - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(odd.norm() < 1e-15);
    }

    #[test]
    fn cat_parity() {
        let t = t();
        for alpha in [c(1.0, 0.0), c(0.3, -1.2)] {
            for k in 0..20 {
                let z = c(-2.0 + 0.21 * k as f64, 1.5 - 0.17 * k as f64);
                let e = StateSpec::Cat { parity: Parity::Even, alpha };
                let o = StateSpec::Cat { parity: Parity::Odd, alpha };
                let (ep, em) = (eval_state(&e, z, &t).unwrap(), eval_state(&e, -z, &t).unwrap());
                let (op, om) = (eval_state(&o, z, &t).unwrap(), eval_state(&o, -z, &t).unwrap());
                assert!((ep - em).norm() <= 1e-14 * ep.norm().max(1.0));
                assert!((op + om).norm() <= 1e-14 * op.norm().max(1.0));
            }
        }
    }

    #[test]
    fn qutrit_values() {
        let (a, b, cc) = qutrit_components(c(0.7, 0.3), c(0.0, 0.0)).unwrap();
        assert_eq!(a, c(1.0, 0.0));
        assert!(b.norm() == 0.0 && cc.norm() == 0.0);
        let (a, b, cc) = qutrit_components(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((a + b + cc - c(std::f64::consts::E, 0.0)).norm() < 1e-14);
        // both branches of the evaluator agree where they meet
        for dir in [c(1.0, 0.1), c(-0.5, 0.9), c(0.0, -1.0), c(-1.0, -0.2)] {
            let w = dir * (4.0 / dir.norm());
            let series = qutrit_taylor(w);
            let (closed, s) = qutrit_exponentials(w);
            for k in 0..3 {
                let cl = closed[k] * s.exp();
                assert!((series[k] - cl).norm() < 1e-13 * w.exp().norm().max(1.0));
            }
        }
    }

    #[test]
    fn qutrit_grading() {
        let omega = cis(2.0 * PI / 3.0);
        let z = c(0.7, 0.2);
        let (p0, p1, p2) = qutrit_components(c(1.0, 0.0), z).unwrap();
        let (r0, r1, r2) = qutrit_components(c(1.0, 0.0), omega * z).unwrap();
        assert!((r0 - p0).norm() < 1e-14);
        assert!((r1 - omega * p1).norm() < 1e-14);
        assert!((r2 - omega * omega * p2).norm() < 1e-14);
    }

    #[test]
    fn displaced_values() {
        let alpha = c(1.0, 1.0);
        let s = StateSpec::Displaced { n: 2, alpha };
        let z = c(0.3, -0.4);
        let w = z - alpha.conj();
        let expect = w * w / 2f64.sqrt() * (alpha * z).exp();
        assert!((eval_state(&s, z, &t()).unwrap() - expect).norm() < 1e-14);
        let dexpect = (w * 2.0 + alpha * w * w) / 2f64.sqrt() * (alpha * z).exp();
        assert!((eval_state_derivative(&s, z, &t()).unwrap() - dexpect).norm() < 1e-14);
        assert_eq!(eval_state(&s, alpha.conj(), &t()).unwrap(), c(0.0, 0.0));
        assert!(matches!(log_derivative(&s, alpha.conj(), &t()), Err(FlowError::Singularity { .. })));
    }

    #[test]
    fn q_coherent_values() {
        let s = StateSpec::QCoherent { q: 2.0, alpha: c(1.0, 0.0) };
        assert!((eval_state(&s, c(1.0, 0.0), &t()).unwrap().re - 2.384_231_029_031_371_7).abs() < 1e-14);
        let bad = StateSpec::QCoherent { q: 0.5, alpha: c(1.0, 0.0) };
        assert!(matches!(eval_state(&bad, c(3.0, 0.0), &t()), Err(FlowError::ConvergenceDomain { .. })));
        assert!(StateSpec::QCoherent { q: 1.0, alpha: c(1.0, 0.0) }.validate().is_err());
    }

    #[test]
    fn q_coherent_classical_limit() {
        for q in [1.0 + 1e-6, 1.0 - 1e-6] {
            for k in 0..16 {
                let z = cis(k as f64 * 0.4) * (2.0 * k as f64 / 15.0);
                let a = eval_state(&StateSpec::QCoherent { q, alpha: c(1.0, 0.0) }, z, &t()).unwrap();
                let b = eval_state(&StateSpec::Coherent { alpha: c(1.0, 0.0) }, z, &t()).unwrap();
                assert!((a - b).norm() <= 1e-4 * b.norm());
            }
        }
    }

    #[test]
    fn coherent_series_matches_closed_form() {
        let t = Truncation { max_terms: 80, tol: DEFAULT_TOL };
        for alpha in [c(1.0, 0.0), c(0.6, 0.8), c(-2.0, 1.0)] {
            for k in 0..24 {
                let w = cis(k as f64 * 2.0 * PI / 24.0) * (10.0 * ((k % 6) as f64 + 1.0) / 6.0);
                let z = w / alpha;
                let a = coherent_series(alpha, z, &t).unwrap();
                let b = (alpha * z).exp();
                assert!((a - b).norm() <= 1e-12 * b.norm(), "alpha={alpha} z={z} rel={}", (a - b).norm() / b.norm());
            }
        }
    }

    #[test]
    fn coefficient_form_of_coherent_state() {
        // plain f64 summation loses about e^{2|x|} eps to cancellation
        let t = Truncation { max_terms: 80, tol: DEFAULT_TOL };
        let alpha = c(0.6, 0.8);
        let series = StateSpec::Coefficients { c: StateSpec::Coherent { alpha }.taylor_coefficients(80).unwrap() };
        for k in 0..24 {
            let w = cis(k as f64 * 2.0 * PI / 24.0) * 10.0;
            let z = w / alpha;
            let a = eval_state(&series, z, &t).unwrap();
            let b = (alpha * z).exp();
            let budget = 64.0 * f64::EPSILON * w.norm().exp();
            assert!((a - b).norm() <= budget, "z={z}");
        }
    }

    #[test]
    fn coefficient_state_is_polynomial() {
        let s = StateSpec::Coefficients { c: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)] };
        let z = c(0.5, 0.5);
        let expect = c(1.0, 0.0) + z * z * z * (5.0 / 6f64.sqrt());
        assert!((eval_state(&s, z, &t()).unwrap() - expect).norm() < 1e-15);
        assert!(StateSpec::Coefficients { c: vec![] }.validate().is_err());
    }

    #[test]
    fn inner_products() {
        assert_eq!(inner_product_coherent(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_relative_eq!(inner_product_coherent(c(1.0, 0.0), c(1.0, 0.0)).unwrap().re, std::f64::consts::E);
        let v = inner_product_coherent(c(0.0, 1.0), c(0.0, 1.0)).unwrap();
        assert!((v - c(std::f64::consts::E, 0.0)).norm() < 1e-15);
        assert_relative_eq!(coherent_norm(c(0.6, 0.8)).unwrap(), std::f64::consts::E, max_relative = 1e-15);
        assert!(inner_product_coherent(c(30.0, 0.0), c(30.0, 0.0)).is_err());
    }

    #[test]
    fn json_shape() {
        let s: StateSpec = serde_json::from_str(r#"{"kind":"cat","parity":"odd","alpha":"1+0i"}"#).unwrap();
        assert_eq!(s, StateSpec::Cat { parity: Parity::Odd, alpha: c(1.0, 0.0) });
        let q: StateSpec = serde_json::from_str(r#"{"kind":"qcoherent","q":0.5,"alpha":"1+0i"}"#).unwrap();
        assert!(matches!(q, StateSpec::QCoherent { .. }));
        let text = serde_json::to_string(&StateSpec::Coefficients { c: vec![c(1.0, -2.0)] }).unwrap();
        assert_eq!(text, r#"{"kind":"coefficients","c":["1-2i"]}"#);
    }
}
