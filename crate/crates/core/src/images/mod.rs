//! Image systems for wedges, strips and oblique strips, the cat-state
//! lattices and the geometric progressions of the q-exponential.
//!
//! The Schwarz conjugate of `g` is `conj(g(conj w))`; for an oblique strip of
//! inclination `beta` the reflection `w -> e^{2 i beta} conj(w)` replaces the
//! plain conjugation.

mod strip;
mod systems;
mod wedge;

use serde::{Deserialize, Serialize};

use crate::complex::{is_finite, Complex};
use crate::error::{FlowError, Result};
use crate::flow::FlowRep;

pub use strip::{
    closed_form_strip, closed_form_strip_velocity, oblique_strip_flow, oblique_strip_flow_of,
    oblique_strip_velocity, oblique_strip_velocity_of, stable_tanh, strip_log_derivative,
    strip_velocity, strip_wavefunction, LatticeSum, ObliqueStrip, StripKind,
};
pub use systems::{
    cat_image_system, displaced_flow_decomposition, q_image_system, strip_image_system,
    wedge_image_system,
};
pub use wedge::{wedge_flow, wedge_flow_of, wedge_rotation, wedge_velocity, wedge_velocity_of, wedge_wavefunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    Vortex,
    AntiVortex,
    Source,
    Sink,
}

impl SingularityKind {
    /// Sign of the effective strength.
    pub fn sign(self) -> f64 {
        match self {
            SingularityKind::Vortex | SingularityKind::Source => 1.0,
            SingularityKind::AntiVortex | SingularityKind::Sink => -1.0,
        }
    }

    pub fn is_vortex_like(self) -> bool {
        matches!(self, SingularityKind::Vortex | SingularityKind::AntiVortex)
    }

    pub fn opposite(self) -> Self {
        match self {
            SingularityKind::Vortex => SingularityKind::AntiVortex,
            SingularityKind::AntiVortex => SingularityKind::Vortex,
            SingularityKind::Source => SingularityKind::Sink,
            SingularityKind::Sink => SingularityKind::Source,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SingularityKind::Vortex => "vortex",
            SingularityKind::AntiVortex => "anti_vortex",
            SingularityKind::Source => "source",
            SingularityKind::Sink => "sink",
        }
    }
}

/// A point vortex or source. `strength` is the positive total strength at the
/// position (multiplicity times the unit strength); `kind` carries the sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "SingularityJson", try_from = "SingularityJson")]
pub struct Singularity {
    pub position: Complex,
    pub kind: SingularityKind,
    pub strength: f64,
    pub multiplicity: u32,
}

#[derive(Serialize, Deserialize)]
struct SingularityJson {
    re: f64,
    im: f64,
    kind: SingularityKind,
    strength: f64,
    multiplicity: u32,
}

impl From<Singularity> for SingularityJson {
    fn from(s: Singularity) -> Self {
        Self { re: s.position.re, im: s.position.im, kind: s.kind, strength: s.strength, multiplicity: s.multiplicity }
    }
}

impl TryFrom<SingularityJson> for Singularity {
    type Error = FlowError;

    fn try_from(j: SingularityJson) -> Result<Self> {
        Singularity::new(Complex::new(j.re, j.im), j.kind, j.strength, j.multiplicity)
    }
}

impl Singularity {
    pub fn new(position: Complex, kind: SingularityKind, strength: f64, multiplicity: u32) -> Result<Self> {
        if !is_finite(position) || !(strength > 0.0) || !strength.is_finite() || multiplicity == 0 {
            return Err(FlowError::InvalidParameter(
                "singularity needs a finite position, positive strength and multiplicity".into(),
            ));
        }
        Ok(Self { position, kind, strength, multiplicity })
    }

    /// Strength with the sign of the kind.
    pub fn signed_strength(&self) -> f64 {
        self.kind.sign() * self.strength
    }

    /// `∮ v̄ dz` around this singularity alone: `-Gamma` for vortices,
    /// `i N` for sources.
    pub fn contour_value(&self) -> Complex {
        if self.kind.is_vortex_like() {
            Complex::new(-self.signed_strength(), 0.0)
        } else {
            Complex::new(0.0, self.signed_strength())
        }
    }

    /// Conjugate velocity induced at `z`.
    pub fn velocity(&self, z: Complex) -> Complex {
        let w = z - self.position;
        let p = if self.kind.is_vortex_like() {
            Complex::new(0.0, self.signed_strength())
        } else {
            Complex::new(self.signed_strength(), 0.0)
        };
        p / (2.0 * std::f64::consts::PI) / w
    }
}

/// The singularities a representation attaches to a zero of multiplicity
/// `mult`, with `reflected` flipping the vortex part (an image across a wall).
/// Zero strengths produce nothing.
pub fn singularities_for(
    rep: FlowRep,
    position: Complex,
    mult: u32,
    reflected: bool,
) -> Result<Vec<Singularity>> {
    let (n, g) = rep.strengths();
    let g = if reflected { -g } else { g };
    let mut out = Vec::new();
    if n != 0.0 {
        let kind = if n > 0.0 { SingularityKind::Source } else { SingularityKind::Sink };
        out.push(Singularity::new(position, kind, n.abs() * mult as f64, mult)?);
    }
    if g != 0.0 {
        let kind = if g > 0.0 { SingularityKind::Vortex } else { SingularityKind::AntiVortex };
        out.push(Singularity::new(position, kind, g.abs() * mult as f64, mult)?);
    }
    Ok(out)
}

/// Geometry carrying an image system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    /// `0 < arg z < pi / n`
    Wedge { n: u32 },
    /// `|Im z| < h / 2`
    Strip { h: f64 },
    /// The strip `|Im z| < h / 2` rotated by `beta` and shifted by `offset`.
    ObliqueStrip {
        h: f64,
        beta: f64,
        #[serde(with = "crate::complex::text")]
        offset: Complex,
    },
    /// Geometric progressions of the q-exponential.
    Geometric {
        q: f64,
        #[serde(with = "crate::complex::text")]
        alpha: Complex,
    },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DomainSpec::Wedge { n } => *n >= 1,
            DomainSpec::Strip { h } => *h > 0.0 && h.is_finite(),
            DomainSpec::ObliqueStrip { h, beta, offset } => {
                *h > 0.0 && h.is_finite() && beta.abs() <= std::f64::consts::FRAC_PI_2 && is_finite(*offset)
            }
            DomainSpec::Geometric { q, alpha } => {
                crate::qcalc::QParameter::new(*q)?;
                *alpha != Complex::new(0.0, 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(FlowError::InvalidParameter(format!("invalid domain {self:?}")))
        }
    }
}

/// A listing of singularities; `truncated` marks systems that are finite
/// sections of an infinite set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageSystem {
    pub domain: DomainSpec,
    pub truncation_index: usize,
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_inclination: Option<f64>,
    pub singularities: Vec<Singularity>,
}

impl ImageSystem {
    /// Sum of the conjugate velocities of all listed singularities.
    pub fn velocity(&self, z: Complex) -> Complex {
        self.singularities.iter().map(|s| s.velocity(z)).sum()
    }

    pub fn positions(&self) -> Vec<Complex> {
        self.singularities.iter().map(|s| s.position).collect()
    }
}
