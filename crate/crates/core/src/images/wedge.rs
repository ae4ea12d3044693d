//! Flows in the wedge `0 < arg z < pi / n`.
//!
//! With `q = e^{i pi / n}` the wedge flow is
//! `F(z) = sum_k f(q^{2k} z) + f̄(q^{2k} z)`, `k = 0..n-1`.

use std::f64::consts::PI;

use crate::complex::{ensure_finite, Complex};
use crate::error::{FlowError, Result};
use crate::flow::{FlowRep, FlowSpec, WaveFunction};
use crate::states::{StateSpec, Truncation, SINGULARITY_GUARD};

/// `q^{2k} = e^{2 pi i k / n}`.
pub fn wedge_rotation(n: u32, k: u32) -> Complex {
    Complex::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        Err(FlowError::InvalidParameter("wedge order n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Wedge potential of a base flow.
pub fn wedge_flow(base: &FlowSpec, n: u32, z: Complex) -> Result<Complex> {
    base.validate()?;
    wedge_flow_of(base.rep, base, n, z)
}

pub fn wedge_flow_of<W: WaveFunction + ?Sized>(rep: FlowRep, wf: &W, n: u32, z: Complex) -> Result<Complex> {
    check_n(n)?;
    let p = rep.prefactor();
    let mut acc = Complex::new(0.0, 0.0);
    for k in 0..n {
        let w = wedge_rotation(n, k) * z;
        acc += p * wf.log_value(w)?;
        // f̄(w) = conj(f(conj w))
        acc += (p * wf.log_value(w.conj())?).conj();
    }
    ensure_finite(acc, "wedge potential")
}

/// Conjugate velocity of the wedge flow.
pub fn wedge_velocity(base: &FlowSpec, n: u32, z: Complex) -> Result<Complex> {
    base.validate()?;
    wedge_velocity_of(base.rep, base, n, z)
}

pub fn wedge_velocity_of<W: WaveFunction + ?Sized>(rep: FlowRep, wf: &W, n: u32, z: Complex) -> Result<Complex> {
    check_n(n)?;
    let p = rep.prefactor();
    let mut acc = Complex::new(0.0, 0.0);
    for k in 0..n {
        let r = wedge_rotation(n, k);
        let w = r * z;
        acc += r * p * wf.log_derivative(w)?;
        acc += r * (p * wf.log_derivative(w.conj())?).conj();
    }
    ensure_finite(acc, "wedge velocity")
}

/// `prod_k Psi(q^{2k} z) / Ψ̄(q^{2k} z)` for vortices or
/// `prod_k Psi(q^{2k} z) Ψ̄(q^{2k} z)` for sources.
pub fn wedge_wavefunction(s: &StateSpec, rep: FlowRep, n: u32, z: Complex, t: &Truncation) -> Result<Complex> {
    check_n(n)?;
    rep.validate()?;
    let ratio = match rep {
        FlowRep::Vortex { .. } => true,
        FlowRep::Source { .. } => false,
        FlowRep::Mixed { .. } => {
            return Err(FlowError::InvalidParameter(
                "a mixed flow has no single wedge wave function; use wedge_flow".into(),
            ))
        }
    };
    let mut acc = Complex::new(1.0, 0.0);
    for k in 0..n {
        let w = wedge_rotation(n, k) * z;
        let num = crate::states::eval_state(s, w, t)?;
        let den = crate::states::eval_state(s, w.conj(), t)?.conj();
        if ratio {
            if den.norm() < SINGULARITY_GUARD {
                return Err(FlowError::Singularity { z });
            }
            acc *= num / den;
        } else {
            acc *= num * den;
        }
    }
    ensure_finite(acc, "wedge wave function")
}
