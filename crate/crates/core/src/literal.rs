//! Text forms of complex numbers: `"a+bi"`, `"a-bi"`, `"a"` (and `"bi"`).

use num_complex::Complex64 as C64;

use crate::{Error, Result};

fn parse_real(tok: &str, whole: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(whole, "expected a complex literal like 0.7+0.2i"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::parse(whole, "components must be finite"))
    }
}

pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::parse(s, "empty complex literal"));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(parse_real(&t, s)?, 0.0));
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_real(&body[..i], s)?, imag_part(&body[i..], s)?),
        None => (0.0, imag_part(body, s)?),
    };
    Ok(C64::new(re, im))
}

fn imag_part(tok: &str, whole: &str) -> Result<f64> {
    match tok {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(tok, whole),
    }
}

/// Shortest round-trip form, e.g. `"1.5"`, `"0.8+0.3i"`, `"0.1-0.1i"`.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
