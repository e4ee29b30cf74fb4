//! Complex literals: `a`, `bi`, `a+bi`, `a-bi` (no whitespace).

use num_complex::Complex64;

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("invalid complex literal {s:?} (expected a, bi, a+bi or a-bi)");
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not the leading one or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(j) => {
            let re = body[..j].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[j..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Lossless literal: shortest round-trip decimal for each part.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        return format!("{:?}", z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{sign}{:?}i", z.re, z.im.abs())
}
