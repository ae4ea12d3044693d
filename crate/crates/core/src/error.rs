use thiserror::Error;

use crate::complex::{format_complex, Complex};

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {} lies outside the convergence disk |x| < {radius}", format_complex(*.x))]
    ConvergenceDomain { x: Complex, radius: f64 },

    #[error("magnitude overflow while evaluating {0}")]
    Overflow(String),

    #[error("wave function vanishes at {}", format_complex(*.z))]
    Singularity { z: Complex },

    #[error("series did not converge within {max_terms} terms")]
    NonConvergence { max_terms: usize },

    #[error("argument {} is too close to a pole", format_complex(*.z))]
    PoleProximity { z: Complex },

    #[error("contour passes through a singularity near {}", format_complex(*.z))]
    ContourThroughSingularity { z: Complex },

    #[error("ill-conditioned contour: winding integral {} is {defect:.3} away from an integer", format_complex(*.winding))]
    IllConditionedContour { winding: Complex, defect: f64 },

    #[error("zeros could not be isolated within {depth} subdivisions")]
    MaxDepth { depth: usize },

    #[error("zero multiplicity {0} exceeds the supported cap")]
    MultiplicityCap(i64),

    #[error("coherent parameter alpha must be nonzero")]
    ZeroAlpha,

    #[error("invalid deformation parameter q = {0} (need q > 0, q != 1)")]
    InvalidQ(f64),

    #[error("unknown identity '{0}'")]
    UnknownIdentity(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl FlowError {
    /// Stable machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            FlowError::InvalidParameter(_) => "invalid_parameter",
            FlowError::ConvergenceDomain { .. } => "convergence_domain",
            FlowError::Overflow(_) => "overflow",
            FlowError::Singularity { .. } => "singularity",
            FlowError::NonConvergence { .. } => "non_convergence",
            FlowError::PoleProximity { .. } => "pole_proximity",
            FlowError::ContourThroughSingularity { .. } => "contour_through_singularity",
            FlowError::IllConditionedContour { .. } => "ill_conditioned_contour",
            FlowError::MaxDepth { .. } => "max_depth",
            FlowError::MultiplicityCap(_) => "multiplicity_cap",
            FlowError::ZeroAlpha => "zero_alpha",
            FlowError::InvalidQ(_) => "invalid_q",
            FlowError::UnknownIdentity(_) => "unknown_identity",
            FlowError::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, FlowError>;
