//! Planar potential flows generated by holomorphic wave functions.
//!
//! A wave function `Psi(z)` in the Fock-Bargmann representation defines the
//! complex potential `f = p Log Psi`, so every zero of `Psi` becomes a point
//! vortex or source. The crate evaluates such flows, builds image systems for
//! wedges and strips, locates zeros and samples fields.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod complex;
pub mod error;
pub mod flow;
pub mod images;
pub mod qcalc;
pub mod quadrature;
pub mod states;

pub use complex::{format_complex, parse_complex, Complex};
pub use error::{FlowError, Result};
pub use flow::{Contour, FlowRep, FlowSpec, VerificationReport, WaveFunction};
pub use qcalc::QParameter;
pub use states::{Parity, StateSpec, Truncation};
