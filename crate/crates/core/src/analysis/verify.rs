//! Named numerical identity checks on fixed sample sets.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::complex::{c, cis, rel_err, Complex, I};
use crate::error::{FlowError, Result};
use crate::flow::{
    check_boundary_of, contour_integral_velocity, velocity, Contour, FlowRep, FlowSpec, FnWave, VerificationReport,
};
use crate::images::{
    closed_form_strip, oblique_strip_velocity_of, q_image_system, stable_tanh, strip_wavefunction, wedge_rotation,
    wedge_wavefunction, LatticeSum, ObliqueStrip, StripKind,
};
use crate::flow::PointZero;
use crate::qcalc::{self, QParameter};
use crate::states::{eval_state, Parity, StateSpec, Truncation};

use super::zeros::{find_zeros, Region};

/// Registered checks, in battery order.
pub const IDENTITIES: [&str; 15] = [
    "wedge_periodicity",
    "wedge_boundary",
    "strip_closed_form",
    "strip_combined_periodicity",
    "oblique_boundary",
    "cat_velocity_periodicity",
    "cat_zero_lattice",
    "qutrit_derivative_cycle",
    "qutrit_equivariance",
    "q_series_product",
    "q_zero_progression",
    "circulation_strength",
    "boundary_unimodular",
    "boundary_real",
    "normalization_freedom",
];

/// Numeric parameters of a check; unknown keys are rejected.
pub type Params = BTreeMap<String, f64>;

struct Args<'a> {
    name: &'a str,
    map: &'a Params,
}

impl Args<'_> {
    fn allow(&self, keys: &[&str]) -> Result<()> {
        let mut all = vec!["tolerance"];
        all.extend_from_slice(keys);
        match self.map.keys().find(|k| !all.contains(&k.as_str())) {
            Some(k) => Err(FlowError::InvalidParameter(format!(
                "'{}' takes parameters {:?}, got '{k}'",
                self.name, all
            ))),
            None => Ok(()),
        }
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.map.get(key).copied().unwrap_or(default)
    }

    fn opt(&self, key: &str) -> Option<f64> {
        self.map.get(key).copied()
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v >= 0.0 && v.fract() == 0.0 && v < 1e7 {
            Ok(v as usize)
        } else {
            Err(FlowError::InvalidParameter(format!("'{key}' must be a non-negative integer")))
        }
    }

    fn tolerance(&self, default: f64) -> Result<f64> {
        let t = self.get("tolerance", default);
        if t > 0.0 && t.is_finite() {
            Ok(t)
        } else {
            Err(FlowError::InvalidParameter("tolerance must be positive".into()))
        }
    }

    /// `alpha` from `alpha_re`/`alpha_im`, or the supplied defaults.
    fn alphas(&self, defaults: &[Complex]) -> Vec<Complex> {
        match (self.opt("alpha_re"), self.opt("alpha_im")) {
            (None, None) => defaults.to_vec(),
            (re, im) => vec![c(re.unwrap_or(0.0), im.unwrap_or(0.0))],
        }
    }
}

/// Running maximum that treats a failed evaluation as an infinite error.
#[derive(Default)]
struct Worst {
    err: f64,
    samples: usize,
}

impl Worst {
    fn add(&mut self, e: Result<f64>) {
        self.samples += 1;
        match e {
            Ok(v) if v.is_finite() => self.err = self.err.max(v),
            _ => self.err = f64::INFINITY,
        }
    }

    fn report(self, name: &str, tol: f64) -> VerificationReport {
        VerificationReport::new(name, self.err, tol, self.samples)
    }
}

fn vortex() -> FlowRep {
    FlowRep::unit_vortex()
}

fn source() -> FlowRep {
    FlowRep::unit_source()
}

/// Runs a named check. Evaluation failures inside a check produce a failing
/// report rather than an error.
pub fn verify_identity(name: &str, params: &Params) -> Result<VerificationReport> {
    let a = Args { name, map: params };
    let t = Truncation::default();
    match name {
        "wedge_periodicity" => {
            a.allow(&["n"])?;
            let tol = a.tolerance(1e-12)?;
            let mut w = Worst::default();
            for n in wedge_orders(&a)? {
                let s = wedge_base(n);
                let q2 = wedge_rotation(n, 1);
                for j in 0..12 {
                    let r = 0.3 + 0.1 * j as f64;
                    let z = cis(PI / n as f64 * (0.05 + 0.9 * ((j * 7) % 12) as f64 / 11.0)) * r;
                    w.add((|| {
                        let lhs = wedge_wavefunction(&s, vortex(), n, q2 * z, &t)?;
                        let rhs = wedge_wavefunction(&s, vortex(), n, z, &t)?;
                        Ok(rel_err(lhs, rhs, 0.0))
                    })());
                }
            }
            Ok(w.report(name, tol))
        }
        "wedge_boundary" => {
            a.allow(&["n"])?;
            let tol = a.tolerance(1e-10)?;
            let mut w = Worst::default();
            for n in wedge_orders(&a)? {
                let s = wedge_base(n);
                for ray in [0.0, PI / n as f64] {
                    for j in 0..50 {
                        let z = cis(ray) * (0.05 + 0.05 * j as f64);
                        w.add(wedge_wavefunction(&s, vortex(), n, z, &t).map(|v| (v.norm() - 1.0).abs()));
                    }
                }
            }
            Ok(w.report(name, tol))
        }
        "strip_closed_form" => {
            a.allow(&["m", "h"])?;
            let tol = a.tolerance(1e-5)?;
            let m = a.usize("m", 400)?;
            let h = a.get("h", 1.0);
            let s = StateSpec::point_zero(c(0.0, 0.0));
            let mut w = Worst::default();
            for z in strip_points(h) {
                w.add((|| {
                    let p = strip_wavefunction(&s, vortex(), h, z, m, &t)?;
                    Ok(rel_err(p, closed_form_strip(StripKind::Vortex, h, z)?, 0.0))
                })());
            }
            Ok(w.report(name, tol))
        }
        "strip_combined_periodicity" => {
            a.allow(&["m", "h"])?;
            let tol = a.tolerance(1e-5)?;
            let m = a.usize("m", 400)?;
            let h = a.get("h", 1.0);
            let s = StateSpec::point_zero(c(0.0, 0.0));
            let mut w = Worst::default();
            for z in strip_points(h) {
                w.add((|| {
                    let shifted = strip_wavefunction(&s, vortex(), h, z.conj() + I * h, m, &t)?;
                    let p = strip_wavefunction(&s, vortex(), h, z, m, &t)?;
                    Ok((shifted.conj() * p - 1.0).norm())
                })());
            }
            Ok(w.report(name, tol))
        }
        "oblique_boundary" => {
            a.allow(&["beta", "m", "h"])?;
            let tol = a.tolerance(1e-6)?;
            let m = a.usize("m", 500)?;
            let h = a.get("h", 1.0);
            let betas = match a.opt("beta") {
                Some(b) => vec![b],
                None => vec![0.0, PI / 6.0, -PI / 4.0],
            };
            let mut w = Worst::default();
            for beta in betas {
                let geom = ObliqueStrip::new(h, beta, c(0.0, 0.0))?;
                for rep in [source(), vortex()] {
                    for side in [1.0, -1.0] {
                        for j in 0..25 {
                            let z = geom.wall_point(side, h * (-2.0 + 4.0 * j as f64 / 24.0 + 0.013));
                            w.add(
                                oblique_strip_velocity_of(rep, &PointZero(c(0.0, 0.0)), &geom, z, LatticeSum::extrapolated(m))
                                    .map(|v| geom.normal_component(v).abs()),
                            );
                        }
                    }
                }
            }
            Ok(w.report(name, tol))
        }
        "cat_velocity_periodicity" => {
            a.allow(&["alpha_re", "alpha_im"])?;
            let tol = a.tolerance(1e-10)?;
            let mut w = Worst::default();
            for alpha in a.alphas(&cat_alphas()) {
                nonzero(alpha)?;
                let period = I * PI / alpha;
                for parity in [Parity::Odd, Parity::Even] {
                    for rep in [vortex(), source()] {
                        let fs = FlowSpec::new(StateSpec::Cat { parity, alpha }, rep);
                        for x in [-0.9, -0.5, 0.2, 0.6, 1.1] {
                            for y in [-1.3, -0.4, 0.35, 1.0, 2.2] {
                                let z = c(x, y) / alpha;
                                w.add((|| Ok(rel_err(velocity(&fs, z + period)?, velocity(&fs, z)?, 1.0)))());
                            }
                        }
                    }
                }
            }
            Ok(w.report(name, tol))
        }
        "cat_zero_lattice" => {
            a.allow(&["alpha_re", "alpha_im"])?;
            let tol = a.tolerance(1e-8)?;
            let mut w = Worst::default();
            for alpha in a.alphas(&cat_alphas()) {
                nonzero(alpha)?;
                let s = StateSpec::Cat { parity: Parity::Odd, alpha };
                let found = find_zeros(&s, &Region::disk(c(0.0, 0.0), 3.5 * PI / alpha.norm()), &t);
                w.add(found.map(|zs| {
                    if zs.len() != 7 || zs.iter().any(|z| z.multiplicity != 1) {
                        return f64::INFINITY;
                    }
                    (-3..=3)
                        .map(|n| {
                            let target = I * PI * n as f64 / alpha;
                            zs.iter().map(|z| (z.position - target).norm()).fold(f64::INFINITY, f64::min)
                        })
                        .fold(0.0, f64::max)
                }));
            }
            Ok(w.report(name, tol))
        }
        "qutrit_derivative_cycle" => {
            a.allow(&["alpha_re", "alpha_im"])?;
            let tol = a.tolerance(1e-6)?;
            let mut w = Worst::default();
            for alpha in a.alphas(&[c(0.8, 0.5)]) {
                nonzero(alpha)?;
                for sector in 0..3u8 {
                    let s = StateSpec::Qutrit { sector, alpha };
                    let partner = StateSpec::Qutrit { sector: (sector + 2) % 3, alpha };
                    for z in sample_disk(2.5, 12) {
                        w.add((|| {
                            let f = |z: Complex| eval_state(&s, z, &t);
                            let d = |hh: f64| -> Result<Complex> { Ok((f(z + hh)? - f(z - hh)?) / (2.0 * hh)) };
                            let h0 = 1e-3;
                            let fd = (d(h0 / 2.0)? * 4.0 - d(h0)?) / 3.0;
                            let exact = alpha * eval_state(&partner, z, &t)?;
                            Ok(rel_err(fd, exact, 1.0))
                        })());
                    }
                }
            }
            Ok(w.report(name, tol))
        }
        "qutrit_equivariance" => {
            a.allow(&["alpha_re", "alpha_im"])?;
            let tol = a.tolerance(1e-10)?;
            let omega = cis(2.0 * PI / 3.0);
            let mut w = Worst::default();
            for alpha in a.alphas(&[c(0.8, 0.5)]) {
                nonzero(alpha)?;
                for sector in 0..3u8 {
                    let fs = FlowSpec::new(StateSpec::Qutrit { sector, alpha }, vortex());
                    for z in sample_disk(2.5, 12) {
                        w.add((|| Ok(rel_err(omega * velocity(&fs, omega * z)?, velocity(&fs, z)?, 1.0)))());
                    }
                }
            }
            Ok(w.report(name, tol))
        }
        "q_series_product" => {
            a.allow(&["q"])?;
            let tol = a.tolerance(1e-10)?;
            let mut w = Worst::default();
            let series_t = Truncation { max_terms: 2000, tol: 1e-17 };
            for q in q_values(&a) {
                let qp = QParameter::new(q)?;
                let reach = match qp.convergence_radius() {
                    Some(r) => 0.6 * r,
                    None => 3.0,
                };
                for j in 0..50 {
                    let x = cis(-0.8 * PI + 1.6 * PI * j as f64 / 49.0) * (reach * (0.1 + 0.9 * ((j * 13) % 50) as f64 / 49.0));
                    w.add((|| {
                        let s = qcalc::q_exponential(qp, x, &series_t)?;
                        let p = qcalc::q_exponential_product_n(qp, x, 400, 0.0)?;
                        Ok(rel_err(s, p, 0.0))
                    })());
                }
            }
            Ok(w.report(name, tol))
        }
        "q_zero_progression" => {
            a.allow(&["q", "m"])?;
            let tol = a.tolerance(1e-14)?;
            let m = a.usize("m", 20)?;
            let mut w = Worst::default();
            for q in q_values(&a) {
                let qp = QParameter::new(q)?;
                let sys = q_image_system(q, c(1.0, 0.0), vortex(), m)?;
                let pos = sys.positions();
                for (k, pair) in pos.windows(2).enumerate() {
                    // toward the origin consecutive positions shrink by q
                    let ratio = if q > 1.0 { pair[1] / pair[0] } else { pair[0] / pair[1] };
                    w.add(Ok((ratio - q).norm() / q));
                    let factor = if q > 1.0 {
                        qcalc::q_product_factor(qp, k as u32, pair[0])
                    } else {
                        qcalc::q_pole_factor(qp, k as u32, pair[0])
                    };
                    w.add(Ok(factor.norm()));
                }
            }
            Ok(w.report(name, tol))
        }
        "circulation_strength" => {
            a.allow(&["gamma", "n_strength", "samples"])?;
            let tol = a.tolerance(1e-8)?;
            let gamma = a.get("gamma", 2.0 * PI);
            let n = a.get("n_strength", 2.0 * PI);
            let samples = a.usize("samples", 1024)?;
            let mut w = Worst::default();
            let cases = [
                (StateSpec::Fock { n: 1 }, c(0.0, 0.0), 1.0),
                (StateSpec::Displaced { n: 1, alpha: c(0.3, 0.2) }, c(0.3, -0.2), 0.5),
            ];
            for (s, center, radius) in cases {
                let contour = Contour::circle_with(center, radius, samples);
                let vfs = FlowSpec::new(s.clone(), FlowRep::Vortex { gamma });
                w.add(contour_integral_velocity(&vfs, &contour).map(|v| (-v.re - gamma).abs().max(v.im.abs())));
                let sfs = FlowSpec::new(s, FlowRep::Source { n_strength: n });
                w.add(contour_integral_velocity(&sfs, &contour).map(|v| (v.im - n).abs().max(v.re.abs())));
            }
            Ok(w.report(name, tol))
        }
        "boundary_unimodular" => {
            a.allow(&["h"])?;
            let tol = a.tolerance(1e-12)?;
            let h = a.get("h", 1.0);
            let f = FnWave::new(move |z: Complex| stable_tanh(z * (PI / (2.0 * h))), |_| c(1.0, 0.0));
            let curve: Vec<Complex> = [0.5, -0.5]
                .iter()
                .flat_map(|side| (0..50).map(move |j| c(-5.0 + 10.0 * j as f64 / 49.0, side * h)))
                .collect();
            let r = check_boundary_of(name, vortex(), &f, &curve, tol);
            Ok(r)
        }
        "boundary_real" => {
            a.allow(&["h"])?;
            let tol = a.tolerance(1e-12)?;
            let h = a.get("h", 1.0);
            let f = FnWave::new(move |z: Complex| (z * (PI / h)).sinh(), |_| c(1.0, 0.0));
            let curve: Vec<Complex> = (0..50).map(|j| c(-3.0 + 6.0 * j as f64 / 49.0, 0.0)).collect();
            Ok(check_boundary_of(name, source(), &f, &curve, tol))
        }
        "normalization_freedom" => {
            a.allow(&["b_abs", "b_arg"])?;
            let tol = a.tolerance(1e-13)?;
            let b = cis(a.get("b_arg", PI / 3.0)) * a.get("b_abs", 1e3);
            nonzero(b)?;
            let states = [
                StateSpec::Coefficients { c: vec![c(1.0, 0.0), c(0.5, -0.2), c(0.0, 0.3), c(-0.1, 0.0)] },
                StateSpec::Coefficients { c: StateSpec::Cat { parity: Parity::Odd, alpha: c(1.0, 0.0) }.taylor_coefficients(24)? },
                StateSpec::Coefficients { c: StateSpec::Coherent { alpha: c(0.4, -0.7) }.taylor_coefficients(30)? },
            ];
            let mut w = Worst::default();
            for s in states {
                let scaled = s.scaled(b)?;
                for rep in [vortex(), source()] {
                    let fa = FlowSpec::new(s.clone(), rep);
                    let fb = FlowSpec::new(scaled.clone(), rep);
                    for x in [-1.1, -0.45, 0.25, 0.7, 1.3] {
                        for y in [-0.9, -0.35, 0.15, 0.55, 1.2] {
                            let z = c(x, y);
                            w.add((|| Ok(rel_err(velocity(&fb, z)?, velocity(&fa, z)?, 0.0)))());
                        }
                    }
                }
            }
            Ok(w.report(name, tol))
        }
        _ => Err(FlowError::UnknownIdentity(name.to_string())),
    }
}

/// Runs every registered check with default parameters, in battery order.
pub fn verify_all() -> Vec<VerificationReport> {
    let empty = Params::new();
    IDENTITIES
        .par_iter()
        .map(|name| verify_identity(name, &empty).unwrap_or_else(|_| VerificationReport::failed(*name, 1.0)))
        .collect()
}

fn nonzero(z: Complex) -> Result<()> {
    if z == c(0.0, 0.0) || !crate::complex::is_finite(z) {
        Err(FlowError::ZeroAlpha)
    } else {
        Ok(())
    }
}

fn wedge_orders(a: &Args) -> Result<Vec<u32>> {
    match a.opt("n") {
        Some(_) => {
            let n = a.usize("n", 3)?;
            if n == 0 || n > 64 {
                return Err(FlowError::InvalidParameter("wedge order must be in 1..=64".into()));
            }
            Ok(vec![n as u32])
        }
        None => Ok(vec![2, 3, 4, 5]),
    }
}

/// Displaced state with its zero inside the wedge of order `n`.
fn wedge_base(n: u32) -> StateSpec {
    let zero = cis(PI / (2.0 * n as f64) + 0.1) * 0.7;
    StateSpec::Displaced { n: 1, alpha: zero.conj() }
}

fn strip_points(h: f64) -> Vec<Complex> {
    let mut out = Vec::with_capacity(25);
    for x in [-1.2, -0.6, 0.05, 0.6, 1.2] {
        for y in [-0.4, -0.2, 0.03, 0.2, 0.4] {
            out.push(c(x, y) * h);
        }
    }
    out
}

fn cat_alphas() -> [Complex; 3] {
    [c(1.0, 0.0), cis(PI / 4.0), c(0.0, 2.0)]
}

fn q_values(a: &Args) -> Vec<f64> {
    match a.opt("q") {
        Some(q) => vec![q],
        None => vec![2.0, 3.0, 0.5, 0.8],
    }
}

/// Deterministic points spread over the disk `|z| < r`, avoiding the origin.
fn sample_disk(r: f64, n: usize) -> Vec<Complex> {
    (0..n)
        .map(|k| {
            let frac = (k as f64 + 0.5) / n as f64;
            cis(2.399_963_229_728_653 * k as f64 + 0.3) * (r * frac.sqrt())
        })
        .collect()
}
