//! Explicit image listings.

use std::f64::consts::PI;

use crate::complex::{wrap_angle, Complex, I};
use crate::error::{FlowError, Result};
use crate::flow::FlowRep;
use crate::qcalc::{self, QParameter, Regime};
use crate::states::Parity;

use super::strip::ObliqueStrip;
use super::wedge::wedge_rotation;
use super::{singularities_for, DomainSpec, ImageSystem, Singularity};

/// Reduces a line inclination to `(-pi/2, pi/2]`.
fn line_angle(theta: f64) -> f64 {
    let mut t = wrap_angle(theta);
    if t > PI / 2.0 {
        t -= PI;
    } else if t <= -PI / 2.0 {
        t += PI;
    }
    t
}

/// Zeros of `sinh(alpha z)` (odd) at `i pi n / alpha` or of `cosh(alpha z)`
/// (even) at `i pi (n + 1/2) / alpha`, `|n| <= M`, with the oblique strip of
/// width `pi/|alpha|` and inclination `-arg alpha` that carries them.
pub fn cat_image_system(alpha: Complex, parity: Parity, rep: FlowRep, m: usize) -> Result<ImageSystem> {
    if alpha == Complex::new(0.0, 0.0) {
        return Err(FlowError::ZeroAlpha);
    }
    rep.validate()?;
    let shift = match parity {
        Parity::Odd => 0.0,
        Parity::Even => 0.5,
    };
    let mut singularities = Vec::new();
    for n in -(m as i64)..=m as i64 {
        let z = I * PI * (n as f64 + shift) / alpha;
        singularities.extend(singularities_for(rep, z, 1, false)?);
    }
    let offset = I * PI * shift / alpha;
    Ok(ImageSystem {
        domain: DomainSpec::ObliqueStrip { h: PI / alpha.norm(), beta: line_angle(-alpha.arg()), offset },
        truncation_index: m,
        truncated: true,
        lattice_inclination: Some(line_angle(PI / 2.0 - alpha.arg())),
        singularities,
    })
}

/// Zeros (`q > 1`) at `-q^{k+1}/(alpha (q-1))` or poles (`q < 1`) at
/// `1/(alpha (1-q) q^k)` of the product form of `e_q(alpha z)`, `k = 0..M`.
/// Poles carry the opposite kind.
pub fn q_image_system(q: f64, alpha: Complex, rep: FlowRep, m: usize) -> Result<ImageSystem> {
    let qp = QParameter::new(q)?;
    if alpha == Complex::new(0.0, 0.0) {
        return Err(FlowError::ZeroAlpha);
    }
    rep.validate()?;
    let mut singularities = Vec::new();
    for k in 0..=m as u32 {
        match qp.regime() {
            Regime::GreaterThanOne => {
                let z = Complex::new(qcalc::product_zero(qp, k), 0.0) / alpha;
                singularities.extend(singularities_for(rep, z, 1, false)?);
            }
            Regime::LessThanOne => {
                let z = Complex::new(qcalc::product_pole(qp, k), 0.0) / alpha;
                singularities.extend(singularities_for(rep, z, 1, false)?.into_iter().map(|mut s| {
                    s.kind = s.kind.opposite();
                    s
                }));
            }
        }
    }
    Ok(ImageSystem {
        domain: DomainSpec::Geometric { q, alpha },
        truncation_index: m,
        truncated: true,
        lattice_inclination: None,
        singularities,
    })
}

/// The displaced state `(z - conj alpha)^n e^{alpha z}` as a singularity of
/// multiplicity `n` at `conj alpha` on a uniform background `prefactor * alpha`.
pub fn displaced_flow_decomposition(n: u32, alpha: Complex, rep: FlowRep) -> Result<(Vec<Singularity>, Complex)> {
    rep.validate()?;
    if !crate::complex::is_finite(alpha) {
        return Err(FlowError::InvalidParameter("alpha must be finite".into()));
    }
    let singularities = if n == 0 { Vec::new() } else { singularities_for(rep, alpha.conj(), n, false)? };
    Ok((singularities, rep.prefactor() * alpha))
}

/// The `2n` singularities of the wedge flow of a point singularity at
/// `base`: rotated copies `q^{-2k} base` and mirrored copies `q^{-2k} conj(base)`.
pub fn wedge_image_system(base: Complex, rep: FlowRep, n: u32) -> Result<ImageSystem> {
    if n == 0 {
        return Err(FlowError::InvalidParameter("wedge order n must be at least 1".into()));
    }
    rep.validate()?;
    let mut singularities = Vec::new();
    for k in 0..n {
        let r = wedge_rotation(n, k).conj();
        singularities.extend(singularities_for(rep, r * base, 1, false)?);
        singularities.extend(singularities_for(rep, r * base.conj(), 1, true)?);
    }
    Ok(ImageSystem {
        domain: DomainSpec::Wedge { n },
        truncation_index: n as usize,
        truncated: false,
        lattice_inclination: None,
        singularities,
    })
}

/// Lattice images `|k| <= M` of a point singularity in an oblique strip:
/// `base - k d` for even `k`, `R(base) - k d` (reflected) for odd `k`.
pub fn strip_image_system(base: Complex, rep: FlowRep, geom: &ObliqueStrip, m: usize) -> Result<ImageSystem> {
    rep.validate()?;
    let d = geom.lattice();
    let mirrored = geom.reflect(base);
    let mut singularities = Vec::new();
    for k in -(m as i64)..=m as i64 {
        let odd = k % 2 != 0;
        let origin = if odd { mirrored } else { base };
        singularities.extend(singularities_for(rep, origin - d * k as f64, 1, odd)?);
    }
    let domain = if geom.beta == 0.0 && geom.offset == Complex::new(0.0, 0.0) {
        DomainSpec::Strip { h: geom.h }
    } else {
        DomainSpec::ObliqueStrip { h: geom.h, beta: geom.beta, offset: geom.offset }
    };
    Ok(ImageSystem {
        domain,
        truncation_index: m,
        truncated: true,
        lattice_inclination: Some(line_angle(geom.beta + PI / 2.0)),
        singularities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{c, cis};
    use crate::images::SingularityKind;

    fn vortex() -> FlowRep {
        FlowRep::unit_vortex()
    }

    #[test]
    fn odd_cat_positions() {
        let sys = cat_image_system(c(1.0, 0.0), Parity::Odd, vortex(), 2).unwrap();
        let expect = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|n| c(0.0, PI * n));
        assert_eq!(sys.singularities.len(), 5);
        for (s, e) in sys.singularities.iter().zip(expect) {
            assert!((s.position - e).norm() < 1e-15);
            assert_eq!(s.strength, 2.0 * PI);
            assert_eq!(s.kind, SingularityKind::Vortex);
        }
        assert!(sys.truncated);
        assert_eq!(sys.lattice_inclination, Some(PI / 2.0));
    }

    #[test]
    fn even_cat_positions_on_real_axis() {
        let sys = cat_image_system(c(0.0, 1.0), Parity::Even, vortex(), 1).unwrap();
        let got: Vec<Complex> = sys.positions();
        for (g, e) in got.iter().zip([-0.5, 0.5, 1.5]) {
            assert!((g - c(PI * e, 0.0)).norm() < 1e-15);
        }
        assert_eq!(sys.lattice_inclination, Some(0.0));
        match sys.domain {
            DomainSpec::ObliqueStrip { h, beta, offset } => {
                assert!((h - PI).abs() < 1e-15);
                assert!((beta.abs() - PI / 2.0).abs() < 1e-15);
                assert!((offset - c(PI / 2.0, 0.0)).norm() < 1e-15);
            }
            _ => panic!("wrong domain"),
        }
    }

    #[test]
    fn cat_inclination_and_errors() {
        let sys = cat_image_system(cis(PI / 4.0), Parity::Odd, vortex(), 0).unwrap();
        assert!((sys.lattice_inclination.unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(matches!(cat_image_system(c(0.0, 0.0), Parity::Odd, vortex(), 1), Err(FlowError::ZeroAlpha)));
        let mixed = cat_image_system(c(1.0, 0.0), Parity::Odd, FlowRep::Mixed { n_strength: -1.0, gamma: 1.0 }, 1).unwrap();
        assert_eq!(mixed.singularities.len(), 6);
        assert_eq!(mixed.singularities[0].kind, SingularityKind::Sink);
    }

    #[test]
    fn geometric_progressions() {
        let sys = q_image_system(0.5, c(1.0, 0.0), vortex(), 2).unwrap();
        let pos: Vec<f64> = sys.positions().iter().map(|z| z.re).collect();
        assert_eq!(pos, vec![2.0, 4.0, 8.0]);
        assert!(sys.singularities.iter().all(|s| s.kind == SingularityKind::AntiVortex));
        let sys = q_image_system(2.0, c(1.0, 0.0), vortex(), 2).unwrap();
        let pos: Vec<f64> = sys.positions().iter().map(|z| z.re).collect();
        assert_eq!(pos, vec![-2.0, -4.0, -8.0]);
        assert!(sys.singularities.iter().all(|s| s.kind == SingularityKind::Vortex));
        for q in [3.0, 0.8, 1.7] {
            let p = q_image_system(q, c(0.3, 0.4), vortex(), 10).unwrap().positions();
            for w in p.windows(2) {
                let ratio = if q > 1.0 { w[1] / w[0] } else { w[0] / w[1] };
                assert!((ratio - q).norm() < 1e-14 * q);
            }
        }
        assert!(matches!(q_image_system(1.0, c(1.0, 0.0), vortex(), 1), Err(FlowError::InvalidQ(_))));
    }

    #[test]
    fn geometric_zeros_are_factor_zeros() {
        let q = QParameter::new(2.0).unwrap();
        let sys = q_image_system(2.0, c(1.0, 0.0), vortex(), 6).unwrap();
        for (k, z) in sys.positions().iter().enumerate() {
            assert_eq!(qcalc::q_product_factor(q, k as u32, *z), c(0.0, 0.0));
        }
    }

    #[test]
    fn displaced_decomposition() {
        let (s, bg) = displaced_flow_decomposition(0, c(1.0, 1.0), vortex()).unwrap();
        assert!(s.is_empty());
        assert!((bg - c(-1.0, 1.0)).norm() < 1e-15);
        let (s, bg) = displaced_flow_decomposition(2, c(1.0, 1.0), vortex()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].position, c(1.0, -1.0));
        assert_eq!((s[0].strength, s[0].multiplicity), (4.0 * PI, 2));
        assert!((bg - c(-1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn wedge_listing() {
        let a = cis(PI / 6.0);
        let sys = wedge_image_system(a, vortex(), 3).unwrap();
        assert_eq!(sys.singularities.len(), 6);
        assert!(!sys.truncated);
        let vortices = sys.singularities.iter().filter(|s| s.kind == SingularityKind::Vortex).count();
        assert_eq!(vortices, 3);
        // every listed position is a zero or pole of the wedge wave function
        let t = crate::states::Truncation::default();
        let st = crate::states::StateSpec::point_zero(a);
        for s in &sys.singularities {
            let near = super::super::wedge_wavefunction(&st, vortex(), 3, s.position + c(1e-7, 0.0), &t).unwrap();
            match s.kind {
                SingularityKind::Vortex => assert!(near.norm() < 1e-5),
                _ => assert!(near.norm() > 1e5),
            }
        }
    }

    #[test]
    fn strip_listing_matches_velocity() {
        let geom = ObliqueStrip::strip(1.0).unwrap();
        let rep = FlowRep::Mixed { n_strength: 0.7, gamma: 1.3 };
        let sys = strip_image_system(c(0.1, 0.2), rep, &geom, 6).unwrap();
        assert_eq!(sys.singularities.len(), 2 * 13);
        assert!(matches!(sys.domain, DomainSpec::Strip { .. }));
        let z = c(0.3, -0.1);
        let listed = sys.velocity(z);
        let summed = crate::images::strip_velocity(c(0.1, 0.2), rep, 1.0, z, crate::images::LatticeSum::partial(3)).unwrap();
        assert!((listed - summed).norm() < 1e-13);
    }
}
