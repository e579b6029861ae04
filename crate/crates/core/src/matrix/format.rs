//! Text form of block elements:
//!
//! ```text
//! !algebra dim=2 weight=1
//! 1.5 0.5-0.25i
//! 0.5+0.25i 1.5
//! ```

use num_complex::Complex64;

use super::{Block, CMatrix, Element, MatrixError, WeightedMatrixAlgebra};
use crate::spectral::format::fmt_exact;

fn perr(line: usize, msg: impl Into<String>) -> MatrixError {
    MatrixError::Parse { line, msg: msg.into() }
}

/// Parse `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("invalid complex number `{s}`");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.strip_prefix('+').unwrap_or(im).parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_exact(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", fmt_exact(z.re), fmt_exact(-z.im))
    } else {
        format!("{}+{}i", fmt_exact(z.re), fmt_exact(z.im))
    }
}

/// Parse one element together with the algebra its headers describe.
pub fn parse_element(text: &str) -> Result<(WeightedMatrixAlgebra, Element), MatrixError> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut mats: Vec<Vec<Complex64>> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        last_line = no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("!algebra") {
            if let (Some(b), Some(m)) = (blocks.last(), mats.last()) {
                if m.len() != b.dim * b.dim {
                    return Err(perr(no, "previous block is incomplete"));
                }
            }
            let (mut dim, mut weight) = (None, None);
            for w in rest.split_whitespace() {
                match w.split_once('=') {
                    Some(("dim", v)) => dim = Some(v.parse::<usize>().map_err(|_| perr(no, format!("invalid dim `{v}`")))?),
                    Some(("weight", v)) => {
                        weight = Some(v.parse::<f64>().map_err(|_| perr(no, format!("invalid weight `{v}`")))?)
                    }
                    _ => return Err(perr(no, format!("unexpected `{w}`"))),
                }
            }
            let dim = dim.ok_or_else(|| perr(no, "missing dim"))?;
            blocks.push(Block {
                dim,
                weight: weight.unwrap_or(1.0),
            });
            mats.push(Vec::with_capacity(dim * dim));
            continue;
        }
        if line.starts_with('!') {
            return Err(perr(no, "unknown directive"));
        }
        let (Some(b), Some(m)) = (blocks.last(), mats.last_mut()) else {
            return Err(perr(no, "entries before the first `!algebra` header"));
        };
        let row: Vec<Complex64> = line
            .split_whitespace()
            .map(parse_complex)
            .collect::<Result<_, _>>()
            .map_err(|e| perr(no, e))?;
        if row.len() != b.dim {
            return Err(perr(no, format!("expected {} entries, got {}", b.dim, row.len())));
        }
        if m.len() == b.dim * b.dim {
            return Err(perr(no, "too many rows for this block"));
        }
        m.extend(row);
    }
    for (b, m) in blocks.iter().zip(&mats) {
        if m.len() != b.dim * b.dim {
            return Err(perr(last_line, "last block is incomplete"));
        }
    }
    let alg = WeightedMatrixAlgebra::new(blocks.clone())?;
    let element = Element::new(
        blocks
            .iter()
            .zip(mats)
            .map(|(b, m)| CMatrix::from_vec(b.dim, m))
            .collect(),
    );
    Ok((alg, element))
}

pub fn write_element(alg: &WeightedMatrixAlgebra, x: &Element) -> String {
    let mut s = String::new();
    for (b, m) in alg.blocks().iter().zip(&x.blocks) {
        s.push_str(&format!("!algebra dim={} weight={}\n", b.dim, fmt_exact(b.weight)));
        for i in 0..b.dim {
            let row: Vec<String> = (0..b.dim).map(|j| fmt_complex(m[(i, j)])).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1-2i").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(parse_complex("1e-3+2.5e+2i").unwrap(), Complex64::new(1e-3, 250.0));
        assert_eq!(parse_complex("-1e-3-1e-3i").unwrap(), Complex64::new(-1e-3, -1e-3));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "!algebra dim=2 weight=1\n1.5 0.5-0.25i\n0.5+0.25i 1.5\n!algebra dim=1 weight=3\n2\n";
        let (alg, x) = parse_element(text).unwrap();
        assert_eq!(alg.total_trace(), 5.0);
        assert_eq!(write_element(&alg, &x), text);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_element("1 2\n").is_err());
        assert!(parse_element("!algebra dim=2\n1 0\n").is_err());
        assert!(parse_element("!algebra dim=1\n1 2\n").is_err());
        assert!(parse_element("!algebra dim=1 weight=-1\n1\n").is_err());
    }
}
