//! Line-oriented text format for spectral densities.
//!
//! ```text
//! # comment
//! !trace <value|inf>
//! !tail <family> key=value ...
//! <t>\t<w>
//! ```
//!
//! Tail keys: `beta`, `gamma` (geometric_over_square); `weight`
//! (inverse_log_square); `t_coef`, `t_npow`, `t_base`, `t_lnpow`, `w_coef`,
//! `w_npow`, `w_base`, `w_lnpow` (custom); common `scale`, `offset`, `start`
//! or `indices`, `grid`, and the required declarations `trace`, `entropy`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::domain::IndexDomain;
use super::monomial::Monomial;
use super::tail::{Tail, TailDeclaration, TailFamily};
use super::{parse_extended, Atom, EntropyClass, SpectralDensity, SpectralError};

fn perr(line: usize, msg: impl Into<String>) -> SpectralError {
    SpectralError::Parse {
        line,
        msg: msg.into(),
    }
}

/// A parsed file before validation: the pieces as written.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDensity {
    pub atoms: Vec<Atom>,
    pub tail: Option<Tail>,
    pub total_trace: f64,
}

impl RawDensity {
    pub fn into_density(self) -> Result<SpectralDensity, SpectralError> {
        SpectralDensity::new(self.atoms, self.tail.into_iter().collect(), self.total_trace)
    }
}

/// Parse without validating invariants (numbers must still be well formed).
pub fn parse_raw(text: &str) -> Result<RawDensity, SpectralError> {
    parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)), &mut |_, _| {
        Err("unknown directive".into())
    })
}

/// Parse and validate.
pub fn parse_density(text: &str) -> Result<SpectralDensity, SpectralError> {
    parse_raw(text)?.into_density()
}

/// Shared line loop; `extra` receives directives this format does not own.
pub(crate) fn parse_lines<'a, I, E>(lines: I, extra: &mut E) -> Result<RawDensity, SpectralError>
where
    I: Iterator<Item = (usize, &'a str)>,
    E: FnMut(&str, &str) -> Result<(), String>,
{
    let mut atoms = Vec::new();
    let mut tail = None;
    let mut total = None;
    for (no, raw) in lines {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('!') {
            let (name, args) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let args = args.trim();
            match name {
                "trace" => {
                    if total.is_some() {
                        return Err(perr(no, "`!trace` given twice"));
                    }
                    let v = parse_extended(args).map_err(|e| perr(no, e))?;
                    total = Some(v);
                }
                "tail" => {
                    if tail.is_some() {
                        return Err(perr(no, "at most one `!tail` directive is allowed"));
                    }
                    tail = Some(parse_tail(args).map_err(|e| perr(no, e))?);
                }
                other => extra(other, args).map_err(|e| perr(no, format!("`!{other}`: {e}")))?,
            }
            continue;
        }
        let mut fields = line.split('\t');
        let (t, w) = match (fields.next(), fields.next(), fields.next()) {
            (Some(t), Some(w), None) => (t, w),
            _ => return Err(perr(no, "atom lines must be `<t><TAB><w>`")),
        };
        let parse = |s: &str| -> Result<f64, SpectralError> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| perr(no, format!("invalid number `{s}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(perr(no, format!("invalid number `{s}`")))
            }
        };
        atoms.push(Atom::new(parse(t)?, parse(w)?));
    }
    Ok(RawDensity {
        atoms,
        tail,
        total_trace: total.unwrap_or(f64::INFINITY),
    })
}

fn parse_tail(args: &str) -> Result<Tail, String> {
    let mut words = args.split_whitespace();
    let family_name = words.next().ok_or("missing tail family")?;
    let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| format!("expected key=value, got `{w}`"))?;
        if kv.insert(k, v).is_some() {
            return Err(format!("parameter `{k}` given twice"));
        }
    }
    let mut take = |k: &str| kv.remove(k);
    let num = |s: Option<&str>, k: &str, default: Option<f64>| -> Result<f64, String> {
        match (s, default) {
            (Some(s), _) => s.parse::<f64>().map_err(|_| format!("invalid {k} `{s}`")),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(format!("missing parameter `{k}`")),
        }
    };
    let family = match family_name {
        "geometric_over_square" => TailFamily::GeometricOverSquare {
            beta: num(take("beta"), "beta", None)?,
            gamma: num(take("gamma"), "gamma", None)?,
        },
        "inverse_log_square" => TailFamily::InverseLogSquare {
            weight: num(take("weight"), "weight", Some(1.0))?,
        },
        "custom" => {
            let mut rule = |p: &str| -> Result<Monomial, String> {
                Ok(Monomial::new(
                    num(take(&format!("{p}_coef")), &format!("{p}_coef"), Some(1.0))?,
                    num(take(&format!("{p}_npow")), &format!("{p}_npow"), Some(0.0))?,
                    num(take(&format!("{p}_base")), &format!("{p}_base"), Some(1.0))?,
                    num(take(&format!("{p}_lnpow")), &format!("{p}_lnpow"), Some(0.0))?,
                ))
            };
            let t = rule("t")?;
            let w = rule("w")?;
            TailFamily::Custom { t, w }
        }
        other => return Err(format!("unknown tail family `{other}`")),
    };
    let scale = num(take("scale"), "scale", Some(1.0))?;
    let offset = num(take("offset"), "offset", Some(0.0))?;
    let grid = match take("grid") {
        Some(s) => s.parse::<u32>().map_err(|_| format!("invalid grid `{s}`"))?,
        None => 0,
    };
    let domain = match (take("start"), take("indices")) {
        (Some(_), Some(_)) => return Err("give either `start` or `indices`, not both".into()),
        (Some(s), None) => IndexDomain::from(s.parse::<u64>().map_err(|_| format!("invalid start `{s}`"))?),
        (None, Some(s)) => IndexDomain::parse(s)?,
        (None, None) => IndexDomain::from(family.min_index()),
    };
    let trace = parse_extended(take("trace").ok_or("missing declaration `trace`")?)?;
    let entropy: EntropyClass = take("entropy").ok_or("missing declaration `entropy`")?.parse()?;
    if let Some(k) = kv.keys().next() {
        return Err(format!("unknown tail parameter `{k}`"));
    }
    Ok(Tail {
        family,
        scale,
        offset,
        domain,
        grid,
        declared: TailDeclaration { trace, entropy },
    })
}

/// Shortest round-trip decimal, switching to exponent form for extreme magnitudes.
pub fn fmt_exact(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_tail(out: &mut String, tail: &Tail) {
    let _ = write!(out, "!tail {}", tail.family.name());
    match &tail.family {
        TailFamily::GeometricOverSquare { beta, gamma } => {
            let _ = write!(out, " beta={} gamma={}", fmt_exact(*beta), fmt_exact(*gamma));
        }
        TailFamily::InverseLogSquare { weight } => {
            let _ = write!(out, " weight={}", fmt_exact(*weight));
        }
        TailFamily::Custom { t, w } => {
            for (p, m) in [("t", t), ("w", w)] {
                let _ = write!(
                    out,
                    " {p}_coef={} {p}_npow={} {p}_base={} {p}_lnpow={}",
                    fmt_exact(m.coef),
                    fmt_exact(m.n_pow),
                    fmt_exact(m.base),
                    fmt_exact(m.ln_pow)
                );
            }
        }
    }
    if tail.scale != 1.0 {
        let _ = write!(out, " scale={}", fmt_exact(tail.scale));
    }
    if tail.offset != 0.0 {
        let _ = write!(out, " offset={}", fmt_exact(tail.offset));
    }
    match (tail.domain.unbounded_start(), tail.domain.bounded_ranges().next()) {
        (Some(k), None) => {
            let _ = write!(out, " start={k}");
        }
        _ => {
            let _ = write!(out, " indices={}", tail.domain);
        }
    }
    if tail.grid != 0 {
        let _ = write!(out, " grid={}", tail.grid);
    }
    let _ = writeln!(
        out,
        " trace={} entropy={}",
        fmt_exact(tail.declared.trace),
        tail.declared.entropy
    );
}

/// Serialize. Tails with finitely many points are written as atoms; at most
/// one tail with infinitely many points is representable.
pub fn write_density(d: &SpectralDensity) -> Result<String, SpectralError> {
    let flat = d.flatten_bounded()?;
    if flat.tails().len() > 1 {
        return Err(SpectralError::Precondition(
            "the text format holds at most one infinite tail".into(),
        ));
    }
    let mut out = String::new();
    let _ = writeln!(out, "!trace {}", fmt_exact(flat.total_trace()));
    if let Some(tail) = flat.tails().first() {
        write_tail(&mut out, tail);
    }
    for a in flat.atoms() {
        let _ = writeln!(out, "{}\t{}", fmt_exact(a.value), fmt_exact(a.weight));
    }
    Ok(out)
}
