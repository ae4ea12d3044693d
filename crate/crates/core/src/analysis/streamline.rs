//! Fixed-step streamline tracing.

use crate::complex::Complex;
use crate::error::{FlowError, Result};
use crate::flow::{velocity_of, FlowRep, FlowSpec, WaveFunction};

/// Integrates `dz/dt = u + i v = conj(v̄)` with classical RK4 from `seed`.
/// Returns the visited points including the seed; stops early when a stage
/// hits a singularity or the path leaves `bounds` (min, max corners).
pub fn trace_streamline(fs: &FlowSpec, seed: Complex, step: f64, n_steps: usize) -> Result<Vec<Complex>> {
    trace_streamline_in(fs, seed, step, n_steps, None)
}

pub fn trace_streamline_in(
    fs: &FlowSpec,
    seed: Complex,
    step: f64,
    n_steps: usize,
    bounds: Option<(Complex, Complex)>,
) -> Result<Vec<Complex>> {
    fs.validate()?;
    trace_streamline_of(fs.rep, fs, seed, step, n_steps, bounds)
}

pub fn trace_streamline_of<W: WaveFunction + ?Sized>(
    rep: FlowRep,
    wf: &W,
    seed: Complex,
    step: f64,
    n_steps: usize,
    bounds: Option<(Complex, Complex)>,
) -> Result<Vec<Complex>> {
    if !step.is_finite() || step == 0.0 {
        return Err(FlowError::InvalidParameter("streamline step must be finite and nonzero".into()));
    }
    let field = |z: Complex| velocity_of(rep, wf, z).map(|v| v.conj());
    let inside = |z: Complex| match bounds {
        Some((lo, hi)) => z.re >= lo.re && z.re <= hi.re && z.im >= lo.im && z.im <= hi.im,
        None => true,
    };
    let mut k1 = field(seed)?;
    let mut path = Vec::with_capacity(n_steps + 1);
    path.push(seed);
    let mut z = seed;
    for _ in 0..n_steps {
        let stages = (|| {
            let k2 = field(z + k1 * (0.5 * step))?;
            let k3 = field(z + k2 * (0.5 * step))?;
            let k4 = field(z + k3 * step)?;
            Ok::<_, FlowError>((k2, k3, k4))
        })();
        let Ok((k2, k3, k4)) = stages else { break };
        let next = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0);
        if !inside(next) {
            break;
        }
        let Ok(k) = field(next) else {
            path.push(next);
            break;
        };
        z = next;
        k1 = k;
        path.push(z);
    }
    Ok(path)
}
