//! Strips and oblique strips.
//!
//! An oblique strip of width `h` and inclination `beta` centred on the line
//! through `offset` has lattice vector `d = i h e^{i beta}` and walls at
//! `offset ± d/2 + t e^{i beta}`. The image flow is the symmetric lattice sum
//!
//! `F(z) = sum_{|k| <= 2M} T_k(z + k d)`, `T_k = f` for even `k`, `f̃` for odd `k`,
//!
//! where `f̃(w) = conj(f(R w))` and `R w = offset + e^{2 i beta} conj(w - offset)`
//! reflects across the centre line. For `beta = 0` and `offset = 0` this is the
//! strip of width `h` with walls at `Im z = ± h/2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complex::{cis, ensure_finite, is_finite, Complex, I};
use crate::error::{FlowError, Result};
use crate::flow::{FlowRep, FlowSpec, PointZero, StateFn, WaveFunction};
use crate::states::{StateSpec, Truncation};

/// How a symmetric lattice sum is truncated.
///
/// `m` bounds the pair index `n` (terms `|k| <= 2m`). With `richardson` the
/// partial sums at `m/16, m/8, m/4, m/2, m` are extrapolated to `1/m -> 0`; only
/// terms up to `m` are ever evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSum {
    pub m: usize,
    pub richardson: bool,
}

impl LatticeSum {
    pub fn partial(m: usize) -> Self {
        Self { m, richardson: false }
    }

    pub fn extrapolated(m: usize) -> Self {
        Self { m, richardson: true }
    }

    fn levels(&self) -> Vec<usize> {
        if !self.richardson {
            return vec![self.m];
        }
        let mut out: Vec<usize> = (0..5).rev().map(|j| self.m >> j).filter(|&l| l >= 1).collect();
        out.dedup();
        if out.is_empty() {
            out.push(self.m);
        }
        out
    }

    /// Evaluates `sum_{|k| <= 2m} term(k)`.
    pub fn sum<T>(&self, term: T) -> Result<Complex>
    where
        T: Fn(i64) -> Result<Complex>,
    {
        let mut acc = term(0)?;
        let mut bound = 0i64;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for level in self.levels() {
            let top = 2 * level as i64;
            for k in bound + 1..=top {
                acc += term(k)? + term(-k)?;
            }
            bound = top;
            if level > 0 {
                xs.push(1.0 / level as f64);
            } else {
                xs.push(0.0);
            }
            ys.push(acc);
        }
        if xs.len() == 1 {
            return ensure_finite(acc, "lattice sum");
        }
        // Neville's scheme evaluated at 1/m = 0
        let n = xs.len();
        for j in 1..n {
            for i in (j..n).rev() {
                let d = ys[i] - ys[i - 1];
                ys[i] += d * (xs[i] / (xs[i - j] - xs[i]));
            }
        }
        ensure_finite(ys[n - 1], "extrapolated lattice sum")
    }
}

/// Oblique strip geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObliqueStrip {
    pub h: f64,
    pub beta: f64,
    pub offset: Complex,
}

impl ObliqueStrip {
    pub fn new(h: f64, beta: f64, offset: Complex) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(FlowError::InvalidParameter("strip width h must be positive".into()));
        }
        if !(beta.abs() <= PI / 2.0) {
            return Err(FlowError::InvalidParameter("strip inclination must satisfy |beta| <= pi/2".into()));
        }
        if !is_finite(offset) {
            return Err(FlowError::InvalidParameter("strip offset must be finite".into()));
        }
        Ok(Self { h, beta, offset })
    }

    pub fn strip(h: f64) -> Result<Self> {
        Self::new(h, 0.0, Complex::new(0.0, 0.0))
    }

    /// Lattice vector `i h e^{i beta}`.
    pub fn lattice(&self) -> Complex {
        I * cis(self.beta) * self.h
    }

    /// Unit tangent of the walls.
    pub fn direction(&self) -> Complex {
        cis(self.beta)
    }

    /// Reflection across the centre line.
    pub fn reflect(&self, w: Complex) -> Complex {
        self.offset + cis(2.0 * self.beta) * (w - self.offset).conj()
    }

    /// Point on the upper (`side = 1`) or lower (`side = -1`) wall at arc
    /// parameter `t`.
    pub fn wall_point(&self, side: f64, t: f64) -> Complex {
        self.offset + self.lattice() * (0.5 * side) + self.direction() * t
    }

    /// Velocity component normal to the walls, `Im(v̄ e^{i beta})` up to sign.
    pub fn normal_component(&self, vbar: Complex) -> f64 {
        (vbar * self.direction()).im
    }
}

/// Wave function kind for strip closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StripKind {
    Vortex,
    Source,
}

/// `tanh w` without overflow for large `|Re w|`.
pub fn stable_tanh(w: Complex) -> Complex {
    let one = Complex::new(1.0, 0.0);
    if w.re >= 0.0 {
        let e = (-2.0 * w).exp();
        (one - e) / (one + e)
    } else {
        let e = (2.0 * w).exp();
        -(one - e) / (one + e)
    }
}

/// `tanh(pi z / 2h)` (vortex) or `sinh(pi z / h)` (source).
pub fn closed_form_strip(kind: StripKind, h: f64, z: Complex) -> Result<Complex> {
    ObliqueStrip::strip(h)?;
    match kind {
        StripKind::Vortex => ensure_finite(stable_tanh(z * (PI / (2.0 * h))), "tanh"),
        StripKind::Source => ensure_finite((z * (PI / h)).sinh(), "sinh"),
    }
}

/// Conjugate velocity of a point singularity at the origin of the strip
/// `|Im z| < h/2`: `(i Gamma / 2 pi)(pi/h)/sinh(pi z/h) + (N / 2 pi)(pi/h) coth(pi z/h)`.
pub fn closed_form_strip_velocity(rep: FlowRep, h: f64, z: Complex) -> Result<Complex> {
    ObliqueStrip::strip(h)?;
    let (n, g) = rep.strengths();
    let w = z * (PI / h);
    if w.norm() == 0.0 {
        return Err(FlowError::Singularity { z });
    }
    let k = PI / h / (2.0 * PI);
    let one = Complex::new(1.0, 0.0);
    // 1/sinh w and coth w through e^{-2|w|}-type tails
    let (csch, coth) = if w.re >= 0.0 {
        let e = (-2.0 * w).exp();
        ((-w).exp() * 2.0 / (one - e), (one + e) / (one - e))
    } else {
        let e = (2.0 * w).exp();
        (-(w.exp() * 2.0) / (one - e), -(one + e) / (one - e))
    };
    ensure_finite(I * g * k * csch + coth * (n * k), "strip velocity")
}

fn reference_log<W: WaveFunction + ?Sized>(wf: &W, z: Complex, reference: Complex) -> Result<Complex> {
    match wf.log_ratio(z, reference) {
        Err(FlowError::Singularity { z: at }) if at == reference => wf.log_value(z),
        other => other,
    }
}

/// Complex potential of the oblique strip image flow. Lattice terms are
/// normalized against their value at the centre so the sum converges; the
/// result is defined up to an additive constant.
pub fn oblique_strip_flow_of<W: WaveFunction + ?Sized>(
    rep: FlowRep,
    wf: &W,
    geom: &ObliqueStrip,
    z: Complex,
    sum: LatticeSum,
) -> Result<Complex> {
    let p = rep.prefactor();
    let d = geom.lattice();
    let c = geom.offset;
    sum.sum(|k| {
        let shift = d * k as f64;
        let w = z + shift;
        if k == 0 {
            Ok(p * wf.log_value(w)?)
        } else if k % 2 == 0 {
            Ok(p * reference_log(wf, w, c + shift)?)
        } else {
            Ok((p * reference_log(wf, geom.reflect(w), geom.reflect(c + shift))?).conj())
        }
    })
}

/// Conjugate velocity of the oblique strip image flow.
pub fn oblique_strip_velocity_of<W: WaveFunction + ?Sized>(
    rep: FlowRep,
    wf: &W,
    geom: &ObliqueStrip,
    z: Complex,
    sum: LatticeSum,
) -> Result<Complex> {
    let p = rep.prefactor();
    let d = geom.lattice();
    let back = cis(-2.0 * geom.beta);
    sum.sum(|k| {
        let w = z + d * k as f64;
        if k % 2 == 0 {
            Ok(p * wf.log_derivative(w)?)
        } else {
            Ok(back * (p * wf.log_derivative(geom.reflect(w))?).conj())
        }
    })
}

/// Oblique strip potential of a base flow, strip centred on the origin.
pub fn oblique_strip_flow(base: &FlowSpec, h: f64, beta: f64, z: Complex, sum: LatticeSum) -> Result<Complex> {
    base.validate()?;
    let geom = ObliqueStrip::new(h, beta, Complex::new(0.0, 0.0))?;
    oblique_strip_flow_of(base.rep, base, &geom, z, sum)
}

pub fn oblique_strip_velocity(base: &FlowSpec, h: f64, beta: f64, z: Complex, sum: LatticeSum) -> Result<Complex> {
    base.validate()?;
    let geom = ObliqueStrip::new(h, beta, Complex::new(0.0, 0.0))?;
    oblique_strip_velocity_of(base.rep, base, &geom, z, sum)
}

/// Velocity of the strip image system of a point singularity at `base_zero`.
pub fn strip_velocity(base_zero: Complex, rep: FlowRep, h: f64, z: Complex, sum: LatticeSum) -> Result<Complex> {
    rep.validate()?;
    let geom = ObliqueStrip::strip(h)?;
    oblique_strip_velocity_of(rep, &PointZero(base_zero), &geom, z, sum)
}

fn strip_form(rep: FlowRep) -> Result<f64> {
    rep.validate()?;
    match rep {
        FlowRep::Vortex { .. } => Ok(-1.0),
        FlowRep::Source { .. } => Ok(1.0),
        FlowRep::Mixed { .. } => Err(FlowError::InvalidParameter(
            "a mixed flow has no single strip wave function; use the strip flow".into(),
        )),
    }
}

/// `Log` of the normalized strip product: even lattice factors
/// `Psi(z + k ih) / Psi(k ih)` times odd factors `Ψ̄(z + k ih) / Ψ̄(k ih)`
/// raised to `sign`.
fn strip_log_product<W: WaveFunction + ?Sized>(wf: &W, sign: f64, h: f64, z: Complex, m: usize) -> Result<Complex> {
    let geom = ObliqueStrip::strip(h)?;
    let d = geom.lattice();
    let mut acc = Complex::new(0.0, 0.0);
    let top = 2 * m as i64;
    for k in -top..=top {
        let shift = d * k as f64;
        let w = z + shift;
        if k == 0 {
            acc += wf.log_value(w)?;
        } else if k % 2 == 0 {
            acc += reference_log(wf, w, shift)?;
        } else {
            acc += reference_log(wf, w.conj(), shift.conj())?.conj() * sign;
        }
    }
    ensure_finite(acc, "strip product")
}

/// Symmetric partial product of the strip wave function over `|k| <= 2M`
/// lattice factors, `k` even direct and `k` odd Schwarz conjugate; the vortex
/// form is divided (vortex) or multiplied (source) by the conjugate factors.
///
/// Every factor is normalized to one at the origin and the vortex form is
/// further scaled to unit modulus on the upper wall, which fixes the free
/// multiplicative constant so the product converges to `tanh(pi z / 2h)` for
/// `Psi(z) = z`. Mixed representations are rejected.
pub fn strip_wavefunction(s: &StateSpec, rep: FlowRep, h: f64, z: Complex, m: usize, t: &Truncation) -> Result<Complex> {
    let sign = strip_form(rep)?;
    s.validate()?;
    let wf = StateFn::new(s.clone(), *t);
    let mut log = strip_log_product(&wf, sign, h, z, m)?;
    if sign < 0.0 {
        // pick a wall point that is not itself a singularity
        let mut norm = None;
        for x in [0.0, 0.37, -0.61, 1.13] {
            if let Ok(v) = strip_log_product(&wf, sign, h, Complex::new(x * h, h / 2.0), m) {
                norm = Some(v.re);
                break;
            }
        }
        log.re -= norm.ok_or(FlowError::Singularity { z: Complex::new(0.0, h / 2.0) })?;
    }
    if log.re > 709.0 {
        return Err(FlowError::Overflow("strip wave function".into()));
    }
    ensure_finite(log.exp(), "strip wave function")
}

/// `Psi_h'/Psi_h` of the strip wave function.
pub fn strip_log_derivative(s: &StateSpec, rep: FlowRep, h: f64, z: Complex, sum: LatticeSum, t: &Truncation) -> Result<Complex> {
    let sign = strip_form(rep)?;
    s.validate()?;
    let wf = StateFn::new(s.clone(), *t);
    let d = ObliqueStrip::strip(h)?.lattice();
    sum.sum(|k| {
        let w = z + d * k as f64;
        if k % 2 == 0 {
            wf.log_derivative(w)
        } else {
            Ok(wf.log_derivative(w.conj())?.conj() * sign)
        }
    })
}
