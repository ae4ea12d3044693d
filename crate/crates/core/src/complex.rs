//! Complex scalar helpers and the `"a+bi"` text form used in JSON and on the
//! command line.

use std::f64::consts::PI;

use serde::{de, Deserialize, Deserializer, Serializer};

use crate::error::{FlowError, Result};

pub type Complex = num_complex::Complex64;

pub const I: Complex = Complex::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// `e^{i theta}`
#[inline]
pub fn cis(theta: f64) -> Complex {
    Complex::from_polar(1.0, theta)
}

/// Schwarz reflection of a point across the real axis.
#[inline]
pub fn conj(z: Complex) -> Complex {
    z.conj()
}

#[inline]
pub fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn ensure_finite(z: Complex, what: &str) -> Result<Complex> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(FlowError::Overflow(what.to_string()))
    }
}

/// Wraps an angle into the principal interval (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let two_pi = 2.0 * PI;
    let mut t = theta.rem_euclid(two_pi);
    if t > PI {
        t -= two_pi;
    }
    t
}

/// Relative distance `|a - b| / max(|b|, floor)`.
pub fn rel_err(a: Complex, b: Complex, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}

/// Formats as `a+bi` / `a-bi` with shortest round-trip decimal digits.
pub fn format_complex(z: Complex) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im.is_sign_negative() {
        format!("{}-{}i", format_real(z.re), format_real(-im))
    } else {
        format!("{}+{}i", format_real(z.re), format_real(im))
    }
}

/// Shortest round-trip digits, in exponent form for very small or large
/// magnitudes.
fn format_real(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` (whitespace ignored).
pub fn parse_complex(text: &str) -> Result<Complex> {
    let s: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    let err = || FlowError::Parse(format!("cannot parse complex number '{text}'"));
    if s.is_empty() {
        return Err(err());
    }
    if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) {
        // find the sign separating real and imaginary parts, skipping exponent signs
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let ch = bytes[k];
            if (ch == b'+' || ch == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re_txt, im_txt) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_txt {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => t.parse::<f64>().map_err(|_| err())?,
        };
        let re = re_txt.parse::<f64>().map_err(|_| err())?;
        let z = Complex::new(re, im);
        if !is_finite(z) {
            return Err(err());
        }
        Ok(z)
    } else {
        let re = s.parse::<f64>().map_err(|_| err())?;
        if !re.is_finite() {
            return Err(err());
        }
        Ok(Complex::new(re, 0.0))
    }
}

/// Serde adapter: complex numbers as `"a+bi"` strings (plain JSON numbers are
/// accepted on input as real values).
pub mod text {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_complex(*z))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Real(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => parse_complex(&t).map_err(de::Error::custom),
            Repr::Real(r) => Ok(Complex::new(r, 0.0)),
        }
    }
}

/// Serde adapter for sequences of complex numbers in text form.
pub mod text_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Complex], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for z in v {
            seq.serialize_element(&format_complex(*z))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::text")] Complex);
        let v: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}
