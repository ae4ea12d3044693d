//! From wave functions to planar flows.
//!
//! A representation attaches a strength to `Log Psi`:
//!
//! * vortex: `f = (i Gamma / 2 pi) Log Psi`
//! * source: `f = (N / 2 pi) Log Psi`
//! * mixed:  `f = ((N + i Gamma) / 2 pi) Log Psi`
//!
//! and the conjugate velocity is `v̄ = df/dz = u - i v`. Potentials use the
//! principal branch of `Log` and are therefore discontinuous across the
//! preimage of the negative real axis; velocities are single valued and all
//! cross-checks go through them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::{ensure_finite, Complex, I};
use crate::error::{FlowError, Result};
use crate::states::{self, StateSpec, Truncation, SINGULARITY_GUARD};

/// Default number of trapezoid nodes on a contour.
pub const DEFAULT_CONTOUR_SAMPLES: usize = 1024;
/// Minimum number of contour nodes.
pub const MIN_CONTOUR_SAMPLES: usize = 16;

/// A holomorphic function with a logarithmic derivative.
pub trait WaveFunction: Sync {
    fn value(&self, z: Complex) -> Result<Complex>;

    /// `Psi'(z) / Psi(z)`
    fn log_derivative(&self, z: Complex) -> Result<Complex>;

    /// Principal `Log Psi(z)`.
    fn log_value(&self, z: Complex) -> Result<Complex> {
        let v = self.value(z)?;
        if v.norm() < SINGULARITY_GUARD {
            return Err(FlowError::Singularity { z });
        }
        Ok(v.ln())
    }

    /// Principal `Log (Psi(z) / Psi(reference))`.
    fn log_ratio(&self, z: Complex, reference: Complex) -> Result<Complex> {
        let a = self.value(z)?;
        let b = self.value(reference)?;
        if a.norm() < SINGULARITY_GUARD {
            return Err(FlowError::Singularity { z });
        }
        if b.norm() < SINGULARITY_GUARD {
            return Err(FlowError::Singularity { z: reference });
        }
        Ok((a / b).ln())
    }
}

/// A state paired with the truncation used to evaluate it.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFn {
    pub state: StateSpec,
    pub trunc: Truncation,
}

impl StateFn {
    pub fn new(state: StateSpec, trunc: Truncation) -> Self {
        Self { state, trunc }
    }
}

impl WaveFunction for StateFn {
    fn value(&self, z: Complex) -> Result<Complex> {
        states::eval_state(&self.state, z, &self.trunc)
    }

    fn log_derivative(&self, z: Complex) -> Result<Complex> {
        states::log_derivative(&self.state, z, &self.trunc)
    }

    fn log_value(&self, z: Complex) -> Result<Complex> {
        states::log_value(&self.state, z, &self.trunc)
    }

    fn log_ratio(&self, z: Complex, reference: Complex) -> Result<Complex> {
        let a = states::eval_scaled(&self.state, z, &self.trunc)?;
        let b = states::eval_scaled(&self.state, reference, &self.trunc)?;
        if a.is_singular() {
            return Err(FlowError::Singularity { z });
        }
        if b.is_singular() {
            return Err(FlowError::Singularity { z: reference });
        }
        let ratio = a.psi / b.psi;
        Ok(Complex::new(ratio.norm().ln() + a.scale - b.scale, ratio.arg()))
    }
}

/// `Psi(z) = z - a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointZero(pub Complex);

impl WaveFunction for PointZero {
    fn value(&self, z: Complex) -> Result<Complex> {
        Ok(z - self.0)
    }

    fn log_derivative(&self, z: Complex) -> Result<Complex> {
        let w = z - self.0;
        if w.norm() < SINGULARITY_GUARD {
            return Err(FlowError::Singularity { z });
        }
        Ok(w.inv())
    }
}

/// Wraps a pair of closures `(Psi, Psi')`.
pub struct FnWave<V, D> {
    value: V,
    derivative: D,
}

impl<V, D> FnWave<V, D>
where
    V: Fn(Complex) -> Complex + Sync,
    D: Fn(Complex) -> Complex + Sync,
{
    pub fn new(value: V, derivative: D) -> Self {
        Self { value, derivative }
    }
}

impl<V, D> WaveFunction for FnWave<V, D>
where
    V: Fn(Complex) -> Complex + Sync,
    D: Fn(Complex) -> Complex + Sync,
{
    fn value(&self, z: Complex) -> Result<Complex> {
        ensure_finite((self.value)(z), "wave function")
    }

    fn log_derivative(&self, z: Complex) -> Result<Complex> {
        let v = self.value(z)?;
        if v.norm() < SINGULARITY_GUARD {
            return Err(FlowError::Singularity { z });
        }
        ensure_finite((self.derivative)(z) / v, "logarithmic derivative")
    }
}

/// Strength of the logarithmic singularity attached to every zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FlowRep {
    Vortex { gamma: f64 },
    Source { n_strength: f64 },
    Mixed { n_strength: f64, gamma: f64 },
}

impl FlowRep {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FlowRep::Vortex { gamma } => gamma.is_finite(),
            FlowRep::Source { n_strength } => n_strength.is_finite(),
            FlowRep::Mixed { n_strength, gamma } => n_strength.is_finite() && gamma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(FlowError::InvalidParameter("flow strengths must be finite".into()))
        }
    }

    /// `i Gamma / 2 pi`, `N / 2 pi` or `(N + i Gamma) / 2 pi`.
    pub fn prefactor(&self) -> Complex {
        let (n, g) = self.strengths();
        Complex::new(n, g) / (2.0 * PI)
    }

    /// `(N, Gamma)`, zero where the representation has no such part.
    pub fn strengths(&self) -> (f64, f64) {
        match *self {
            FlowRep::Vortex { gamma } => (0.0, gamma),
            FlowRep::Source { n_strength } => (n_strength, 0.0),
            FlowRep::Mixed { n_strength, gamma } => (n_strength, gamma),
        }
    }

    pub fn unit_vortex() -> Self {
        FlowRep::Vortex { gamma: 2.0 * PI }
    }

    pub fn unit_source() -> Self {
        FlowRep::Source { n_strength: 2.0 * PI }
    }
}

impl fmt::Display for FlowRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowRep::Vortex { gamma } => write!(f, "vortex:{gamma}"),
            FlowRep::Source { n_strength } => write!(f, "source:{n_strength}"),
            FlowRep::Mixed { n_strength, gamma } => write!(f, "mixed:{n_strength}:{gamma}"),
        }
    }
}

impl FromStr for FlowRep {
    type Err = FlowError;

    /// `vortex:<Gamma>`, `source:<N>` or `mixed:<N>:<Gamma>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| FlowError::Parse(format!("bad strength '{t}' in '{s}'")))
        };
        let rep = match parts.as_slice() {
            ["vortex", g] => FlowRep::Vortex { gamma: num(g)? },
            ["source", n] => FlowRep::Source { n_strength: num(n)? },
            ["mixed", n, g] => FlowRep::Mixed { n_strength: num(n)?, gamma: num(g)? },
            _ => {
                return Err(FlowError::Parse(format!(
                    "representation must be vortex:<G>, source:<N> or mixed:<N>:<G>, got '{s}'"
                )))
            }
        };
        Ok(rep)
    }
}

/// A state, its flow representation and the series truncation policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub state: StateSpec,
    pub rep: FlowRep,
    #[serde(default)]
    pub trunc: Truncation,
}

impl FlowSpec {
    pub fn new(state: StateSpec, rep: FlowRep) -> Self {
        Self { state, rep, trunc: Truncation::default() }
    }

    pub fn with_truncation(mut self, trunc: Truncation) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.state.validate()?;
        self.rep.validate()?;
        self.trunc.validate()
    }

    pub fn wave(&self) -> StateFn {
        StateFn::new(self.state.clone(), self.trunc)
    }
}

impl WaveFunction for FlowSpec {
    fn value(&self, z: Complex) -> Result<Complex> {
        states::eval_state(&self.state, z, &self.trunc)
    }

    fn log_derivative(&self, z: Complex) -> Result<Complex> {
        states::log_derivative(&self.state, z, &self.trunc)
    }

    fn log_value(&self, z: Complex) -> Result<Complex> {
        states::log_value(&self.state, z, &self.trunc)
    }

    fn log_ratio(&self, z: Complex, reference: Complex) -> Result<Complex> {
        self.wave().log_ratio(z, reference)
    }
}

/// Closed integration path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Contour {
    Circle {
        #[serde(with = "crate::complex::text")]
        center: Complex,
        radius: f64,
        samples: usize,
    },
    /// Vertices in order; the path is closed automatically.
    Polyline {
        #[serde(with = "crate::complex::text_vec")]
        points: Vec<Complex>,
        samples: usize,
    },
}

impl Contour {
    pub fn circle(center: Complex, radius: f64) -> Self {
        Contour::Circle { center, radius, samples: DEFAULT_CONTOUR_SAMPLES }
    }

    pub fn circle_with(center: Complex, radius: f64, samples: usize) -> Self {
        Contour::Circle { center, radius, samples }
    }

    pub fn polyline(points: Vec<Complex>, samples: usize) -> Self {
        Contour::Polyline { points, samples }
    }

    /// Counter-clockwise rectangle.
    pub fn rectangle(min: Complex, max: Complex, samples: usize) -> Self {
        Contour::Polyline {
            points: vec![min, Complex::new(max.re, min.im), max, Complex::new(min.re, max.im)],
            samples,
        }
    }

    pub fn samples(&self) -> usize {
        match self {
            Contour::Circle { samples, .. } | Contour::Polyline { samples, .. } => *samples,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples() < MIN_CONTOUR_SAMPLES {
            return Err(FlowError::InvalidParameter(format!(
                "contour needs at least {MIN_CONTOUR_SAMPLES} samples"
            )));
        }
        match self {
            Contour::Circle { radius, center, .. } => {
                if !(*radius > 0.0) || !radius.is_finite() || !crate::complex::is_finite(*center) {
                    return Err(FlowError::InvalidParameter("circle radius must be positive".into()));
                }
            }
            Contour::Polyline { points, .. } => {
                let closed = self.closed_vertices();
                if closed.len() < 4 || points.iter().any(|p| !crate::complex::is_finite(*p)) {
                    return Err(FlowError::InvalidParameter("polyline needs at least 3 distinct points".into()));
                }
            }
        }
        Ok(())
    }

    fn closed_vertices(&self) -> Vec<Complex> {
        match self {
            Contour::Polyline { points, .. } => {
                let mut v: Vec<Complex> = Vec::with_capacity(points.len() + 1);
                for p in points {
                    if v.last() != Some(p) {
                        v.push(*p);
                    }
                }
                if let (Some(first), Some(last)) = (v.first().copied(), v.last().copied()) {
                    if first != last {
                        v.push(first);
                    }
                }
                v
            }
            Contour::Circle { .. } => Vec::new(),
        }
    }

    /// Trapezoid nodes `z_k` and weights `w_k` with `∮ g dz ≈ Σ w_k g(z_k)`.
    pub fn quadrature(&self) -> Result<Vec<(Complex, Complex)>> {
        self.validate()?;
        Ok(match self {
            Contour::Circle { center, radius, samples } => {
                let n = *samples;
                let dtheta = 2.0 * PI / n as f64;
                (0..n)
                    .map(|k| {
                        let e = Complex::from_polar(1.0, k as f64 * dtheta);
                        (center + e * *radius, I * e * (*radius * dtheta))
                    })
                    .collect()
            }
            Contour::Polyline { samples, .. } => {
                let v = self.closed_vertices();
                let lengths: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
                let total: f64 = lengths.iter().sum();
                let mut out = Vec::with_capacity(samples + 2 * v.len());
                for (w, len) in v.windows(2).zip(&lengths) {
                    let m = ((*samples as f64 * len / total).round() as usize).max(1);
                    let step = (w[1] - w[0]) / m as f64;
                    for j in 0..=m {
                        let weight = if j == 0 || j == m { step * 0.5 } else { step };
                        out.push((w[0] + step * j as f64, weight));
                    }
                }
                out
            }
        })
    }
}

/// Composite trapezoid integral of `g` around a contour. A singularity at a
/// node becomes `ContourThroughSingularity`.
pub fn contour_integral<G>(g: G, c: &Contour) -> Result<Complex>
where
    G: Fn(Complex) -> Result<Complex>,
{
    let mut acc = Complex::new(0.0, 0.0);
    for (z, w) in c.quadrature()? {
        let v = g(z).map_err(|e| match e {
            FlowError::Singularity { z } => FlowError::ContourThroughSingularity { z },
            other => other,
        })?;
        acc += v * w;
    }
    Ok(acc)
}

/// Complex potential `f(z) = prefactor * Log Psi(z)`.
pub fn potential(fs: &FlowSpec, z: Complex) -> Result<Complex> {
    potential_of(fs.rep, fs, z)
}

pub fn potential_of<W: WaveFunction + ?Sized>(rep: FlowRep, wf: &W, z: Complex) -> Result<Complex> {
    Ok(rep.prefactor() * wf.log_value(z)?)
}

/// Conjugate velocity `v̄ = u - i v = prefactor * Psi'/Psi`.
pub fn velocity(fs: &FlowSpec, z: Complex) -> Result<Complex> {
    velocity_of(fs.rep, fs, z)
}

pub fn velocity_of<W: WaveFunction + ?Sized>(rep: FlowRep, wf: &W, z: Complex) -> Result<Complex> {
    Ok(rep.prefactor() * wf.log_derivative(z)?)
}

/// Physical velocity components `(u, v)` from `v̄`.
pub fn velocity_components(vbar: Complex) -> (f64, f64) {
    (vbar.re, -vbar.im)
}

/// `∮_C v̄ dz`.
pub fn contour_integral_velocity(fs: &FlowSpec, c: &Contour) -> Result<Complex> {
    contour_integral(|z| velocity(fs, z), c)
}

/// Circulation and flux enclosed by a contour, read off from
/// `∮ v̄ dz = -circulation + i flux`. A vortex zero of multiplicity `m`
/// reports `circulation = m Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnclosedStrength {
    pub circulation: f64,
    pub flux: f64,
}

pub fn enclosed_strength(fs: &FlowSpec, c: &Contour) -> Result<EnclosedStrength> {
    let total = contour_integral_velocity(fs, c)?;
    Ok(EnclosedStrength { circulation: -total.re, flux: total.im })
}

/// Outcome of a numerical identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub sample_count: usize,
}

impl VerificationReport {
    /// Builds a report; a non-finite error is recorded as `f64::MAX` and fails.
    pub fn new(name: impl Into<String>, max_error: f64, tolerance: f64, sample_count: usize) -> Self {
        let max_error = if max_error.is_finite() { max_error.max(0.0) } else { f64::MAX };
        Self { name: name.into(), max_error, tolerance, pass: max_error <= tolerance, sample_count }
    }

    /// Report for a check that could not be evaluated at all.
    pub fn failed(name: impl Into<String>, tolerance: f64) -> Self {
        Self::new(name, f64::MAX, tolerance, 0)
    }
}

/// Boundary condition residual of a wave function along a curve:
/// `||Psi| - 1|` for vortex flows, `|Im Psi|` for source flows, the larger of
/// the two for mixed flows.
pub fn boundary_residual<W: WaveFunction + ?Sized>(rep: FlowRep, wf: &W, z: Complex) -> Result<f64> {
    let psi = wf.value(z)?;
    let unimodular = (psi.norm() - 1.0).abs();
    let real = psi.im.abs();
    Ok(match rep {
        FlowRep::Vortex { .. } => unimodular,
        FlowRep::Source { .. } => real,
        FlowRep::Mixed { .. } => unimodular.max(real),
    })
}

/// Checks the no-normal-flow condition on a sampled boundary curve.
pub fn check_boundary(fs: &FlowSpec, curve: &[Complex], tolerance: f64) -> VerificationReport {
    check_boundary_of("boundary", fs.rep, fs, curve, tolerance)
}

pub fn check_boundary_of<W: WaveFunction + ?Sized>(
    name: &str,
    rep: FlowRep,
    wf: &W,
    curve: &[Complex],
    tolerance: f64,
) -> VerificationReport {
    let mut worst: f64 = 0.0;
    for &z in curve {
        match boundary_residual(rep, wf, z) {
            Ok(e) if e.is_finite() => worst = worst.max(e),
            _ => worst = f64::INFINITY,
        }
    }
    VerificationReport::new(name, worst, tolerance, curve.len())
}
