//! Gauss-Legendre panels for line integrals in the complex plane.

use crate::complex::Complex;
use crate::error::Result;

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss-Legendre rule for `∫_a^b g(z) dz` along a segment.
pub fn gl8_segment<G>(g: &G, a: Complex, b: Complex) -> Result<Complex>
where
    G: Fn(Complex) -> Result<Complex>,
{
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let mut acc = Complex::new(0.0, 0.0);
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        acc += (g(mid + half * *x)? + g(mid - half * *x)?) * w;
    }
    Ok(acc * half)
}

/// Adaptive bisection on top of [`gl8_segment`]; stops when two halves agree
/// with the whole to `tol` (absolute) or `depth` levels are exhausted.
pub fn adaptive_segment<G>(g: &G, a: Complex, b: Complex, tol: f64, depth: usize) -> Result<Complex>
where
    G: Fn(Complex) -> Result<Complex>,
{
    let whole = gl8_segment(g, a, b)?;
    refine(g, a, b, whole, tol, depth)
}

fn refine<G>(g: &G, a: Complex, b: Complex, whole: Complex, tol: f64, depth: usize) -> Result<Complex>
where
    G: Fn(Complex) -> Result<Complex>,
{
    let m = (a + b) * 0.5;
    let left = gl8_segment(g, a, m)?;
    let right = gl8_segment(g, m, b)?;
    let split = left + right;
    if depth == 0 || (split - whole).norm() <= tol {
        return Ok(split);
    }
    Ok(refine(g, a, m, left, tol * 0.5, depth - 1)? + refine(g, m, b, right, tol * 0.5, depth - 1)?)
}

/// Adaptive integral around a closed polygon.
pub fn adaptive_polygon<G>(g: &G, vertices: &[Complex], tol: f64, depth: usize) -> Result<Complex>
where
    G: Fn(Complex) -> Result<Complex>,
{
    let n = vertices.len();
    let mut acc = Complex::new(0.0, 0.0);
    for k in 0..n {
        acc += adaptive_segment(g, vertices[k], vertices[(k + 1) % n], tol / n as f64, depth)?;
    }
    Ok(acc)
}
