//! Zeros of entire wave functions by the argument principle.
//!
//! A rectangle is counted with adaptive Gauss-Legendre panels on `Psi'/Psi`,
//! split into quadrants until each piece holds one zero or one tight cluster,
//! and the candidate is polished by Newton's method with the counted
//! multiplicity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complex::{is_finite, Complex, I};
use crate::error::{FlowError, Result};
use crate::flow::{contour_integral, Contour, StateFn, WaveFunction};
use crate::quadrature::adaptive_polygon;
use crate::states::{StateSpec, Truncation};

/// Largest multiplicity reported for a single zero.
pub const MULTIPLICITY_CAP: i64 = 16;
/// Deepest quadrisection level before giving up.
pub const MAX_DEPTH: usize = 48;

const SPLITS: [f64; 6] = [0.512_3, 0.467_1, 0.538_9, 0.441_7, 0.570_1, 0.420_3];
const PANEL_TOL: f64 = 1e-9;
const PANEL_DEPTH: usize = 40;
const CIRCLE_SAMPLES: usize = 256;

/// Search region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Disk {
        #[serde(with = "crate::complex::text")]
        center: Complex,
        radius: f64,
    },
    Rect {
        #[serde(with = "crate::complex::text")]
        min: Complex,
        #[serde(with = "crate::complex::text")]
        max: Complex,
    },
}

impl Region {
    pub fn disk(center: Complex, radius: f64) -> Self {
        Region::Disk { center, radius }
    }

    pub fn rect(min: Complex, max: Complex) -> Self {
        Region::Rect { min, max }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Region::Disk { center, radius } => is_finite(*center) && *radius > 0.0 && radius.is_finite(),
            Region::Rect { min, max } => is_finite(*min) && is_finite(*max) && max.re > min.re && max.im > min.im,
        };
        if ok {
            Ok(())
        } else {
            Err(FlowError::InvalidParameter("region must have positive extent".into()))
        }
    }

    pub fn contains(&self, z: Complex) -> bool {
        match self {
            Region::Disk { center, radius } => (z - center).norm() < *radius,
            Region::Rect { min, max } => z.re >= min.re && z.re <= max.re && z.im >= min.im && z.im <= max.im,
        }
    }

    fn bounding_box(&self) -> (Complex, Complex) {
        match self {
            Region::Disk { center, radius } => {
                let r = Complex::new(*radius, *radius);
                (center - r, center + r)
            }
            Region::Rect { min, max } => (*min, *max),
        }
    }
}

/// A located zero and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ZeroJson", from = "ZeroJson")]
pub struct Zero {
    pub position: Complex,
    pub multiplicity: u32,
}

#[derive(Serialize, Deserialize)]
struct ZeroJson {
    re: f64,
    im: f64,
    multiplicity: u32,
}

impl From<Zero> for ZeroJson {
    fn from(z: Zero) -> Self {
        Self { re: z.position.re, im: z.position.im, multiplicity: z.multiplicity }
    }
}

impl From<ZeroJson> for Zero {
    fn from(j: ZeroJson) -> Self {
        Self { position: Complex::new(j.re, j.im), multiplicity: j.multiplicity }
    }
}

/// `(1 / 2 pi i) ∮ Psi'/Psi dz` by the contour's trapezoid rule.
pub fn winding_number<W: WaveFunction + ?Sized>(wf: &W, c: &Contour) -> Result<Complex> {
    Ok(contour_integral(|z| wf.log_derivative(z), c)? / (2.0 * PI * I))
}

fn round_winding(w: Complex) -> Result<i64> {
    let n = w.re.round();
    let defect = (w - Complex::new(n, 0.0)).norm();
    if !(defect < 0.25) {
        return Err(FlowError::IllConditionedContour { winding: w, defect: if defect.is_finite() { defect } else { f64::MAX } });
    }
    Ok(n as i64)
}

/// Zeros minus poles enclosed by the contour.
pub fn count_zeros(s: &StateSpec, c: &Contour, t: &Truncation) -> Result<i64> {
    s.validate()?;
    count_zeros_of(&StateFn::new(s.clone(), *t), c)
}

pub fn count_zeros_of<W: WaveFunction + ?Sized>(wf: &W, c: &Contour) -> Result<i64> {
    round_winding(winding_number(wf, c)?)
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    min: Complex,
    max: Complex,
}

impl Rect {
    fn vertices(&self) -> [Complex; 4] {
        [self.min, Complex::new(self.max.re, self.min.im), self.max, Complex::new(self.min.re, self.max.im)]
    }

    fn diag(&self) -> f64 {
        (self.max - self.min).norm()
    }

    fn center(&self) -> Complex {
        (self.min + self.max) * 0.5
    }

    fn contains_loose(&self, z: Complex) -> bool {
        let pad = (self.max - self.min) * 0.05;
        z.re >= self.min.re - pad.re && z.re <= self.max.re + pad.re && z.im >= self.min.im - pad.im && z.im <= self.max.im + pad.im
    }

    fn quadrants(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let x = self.min.re + fx * (self.max.re - self.min.re);
        let y = self.min.im + fy * (self.max.im - self.min.im);
        let c = Complex::new(x, y);
        [
            Rect { min: self.min, max: c },
            Rect { min: Complex::new(x, self.min.im), max: Complex::new(self.max.re, y) },
            Rect { min: c, max: self.max },
            Rect { min: Complex::new(self.min.re, y), max: Complex::new(x, self.max.im) },
        ]
    }
}

fn moment<W: WaveFunction + ?Sized>(wf: &W, r: &Rect, power: i32) -> Result<Complex> {
    let scale = r.diag();
    let g = |z: Complex| Ok(wf.log_derivative(z)? * z.powi(power));
    Ok(adaptive_polygon(&g, &r.vertices(), PANEL_TOL * scale.max(1.0).powi(power), PANEL_DEPTH)? / (2.0 * PI * I))
}

fn count_rect<W: WaveFunction + ?Sized>(wf: &W, r: &Rect) -> Result<i64> {
    round_winding(moment(wf, r, 0)?)
}

/// Newton's method for a zero of multiplicity `m` (`z -= m Psi/Psi'`).
fn polish<W: WaveFunction + ?Sized>(wf: &W, start: Complex, m: i64) -> Option<Complex> {
    let mut z = start;
    let mut last = f64::INFINITY;
    for _ in 0..100 {
        let ld = match wf.log_derivative(z) {
            Ok(v) => v,
            Err(FlowError::Singularity { .. }) => return Some(z),
            Err(_) => return None,
        };
        if ld.norm() == 0.0 {
            return None;
        }
        let step = Complex::new(m as f64, 0.0) / ld;
        if !is_finite(step) {
            return None;
        }
        z -= step;
        let size = step.norm();
        if size <= 4.0 * f64::EPSILON * (1.0 + z.norm()) || (size >= last && size < 1e-7 * (1.0 + z.norm())) {
            return Some(z);
        }
        last = size;
    }
    Some(z)
}

/// Confirms a candidate: small-circle winding equals `m` and `|Psi|` at the
/// candidate is tiny relative to its size on the circle.
fn confirm<W: WaveFunction + ?Sized>(wf: &W, z: Complex, m: i64, radius: f64) -> bool {
    let circle = Contour::circle_with(z, radius, CIRCLE_SAMPLES);
    match count_zeros_of(wf, &circle) {
        Ok(k) if k == m => {}
        _ => return false,
    }
    let local = circle
        .quadrature()
        .map(|q| q.iter().step_by(16).filter_map(|(w, _)| wf.value(*w).ok()).map(|v| v.norm()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    match wf.value(z) {
        Ok(v) => v.norm() <= 1e-10 * local || v.norm() == 0.0,
        Err(_) => false,
    }
}

fn search<W: WaveFunction + ?Sized>(wf: &W, r: Rect, count: i64, depth: usize, out: &mut Vec<Zero>) -> Result<()> {
    if count <= 0 {
        return Ok(());
    }
    if depth > MAX_DEPTH {
        return Err(FlowError::MaxDepth { depth: MAX_DEPTH });
    }
    let radius = (0.25 * r.diag()).min(1e-2 * (1.0 + r.center().norm()));
    let mean = moment(wf, &r, 1).map(|m1| m1 / count as f64);
    if let Ok(mean) = mean {
        let tight = count == 1 || {
            let spread = moment(wf, &r, 2).map(|m2| (m2 / count as f64 - mean * mean).norm().sqrt());
            matches!(spread, Ok(s) if s <= 1e-3 * r.diag())
        };
        if tight {
            let start = if r.contains_loose(mean) && is_finite(mean) { mean } else { r.center() };
            if let Some(z) = polish(wf, start, count) {
                if r.contains_loose(z) && confirm(wf, z, count, radius) {
                    if count > MULTIPLICITY_CAP {
                        return Err(FlowError::MultiplicityCap(count));
                    }
                    out.push(Zero { position: z, multiplicity: count as u32 });
                    return Ok(());
                }
            }
        }
    }
    let mut last_err = FlowError::MaxDepth { depth };
    for (j, fx) in SPLITS.iter().enumerate() {
        let fy = SPLITS[(j + 3) % SPLITS.len()];
        let quads = r.quadrants(*fx, fy);
        let counts: Result<Vec<i64>> = quads.iter().map(|q| count_rect(wf, q)).collect();
        match counts {
            Ok(c) if c.iter().sum::<i64>() == count && c.iter().all(|k| *k >= 0) => {
                for (q, k) in quads.iter().zip(c) {
                    search(wf, *q, k, depth + 1, out)?;
                }
                return Ok(());
            }
            Ok(_) => {}
            Err(e) => last_err = e,
        }
    }
    Err(match last_err {
        FlowError::MaxDepth { .. } => FlowError::MaxDepth { depth },
        e => e,
    })
}

/// Zeros of an entire wave function inside a region, sorted by real then
/// imaginary part.
pub fn find_zeros(s: &StateSpec, region: &Region, t: &Truncation) -> Result<Vec<Zero>> {
    s.validate()?;
    find_zeros_of(&StateFn::new(s.clone(), *t), region)
}

pub fn find_zeros_of<W: WaveFunction + ?Sized>(wf: &W, region: &Region) -> Result<Vec<Zero>> {
    region.validate()?;
    let (lo, hi) = region.bounding_box();
    let mid = (lo + hi) * 0.5;
    let half = (hi - lo) * 0.5;
    let mut outer = None;
    let mut last_err = None;
    for grow in [1.0, 1.013, 1.029, 1.047, 1.071] {
        let r = Rect { min: mid - half * grow, max: mid + half * grow };
        match count_rect(wf, &r) {
            Ok(k) => {
                outer = Some((r, k));
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (rect, count) = match outer {
        Some(v) => v,
        None => return Err(last_err.unwrap_or(FlowError::MaxDepth { depth: 0 })),
    };
    let mut found = Vec::new();
    search(wf, rect, count, 0, &mut found)?;
    let mut zeros: Vec<Zero> = Vec::new();
    for z in found.into_iter().filter(|z| region.contains(z.position)) {
        match zeros.iter_mut().find(|w| (w.position - z.position).norm() <= 1e-9 * (1.0 + z.position.norm())) {
            Some(w) => w.multiplicity = w.multiplicity.max(z.multiplicity),
            None => zeros.push(z),
        }
    }
    zeros.sort_by(|a, b| {
        let (p, q) = (a.position, b.position);
        if (p.re - q.re).abs() > 1e-9 * (1.0 + p.norm().max(q.norm())) {
            p.re.total_cmp(&q.re)
        } else {
            p.im.total_cmp(&q.im)
        }
    });
    Ok(zeros)
}
