//! `H(h) = τ(h log h)` on spectral densities, as an extended real split into
//! the parts over `t > 1` and `t < 1`.

use std::fmt;

use thiserror::Error;

use crate::numeric::{csum, fmt12, xlogx};
use crate::spectral::{EntropyClass, SpectralDensity, SpectralError, SumSettings};

/// An entropy value in `[−∞, ∞] ∪ {undefined}`, kept as its two one-sided parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedEntropyValue {
    /// `∫_{t>1} t log t`, in `[0, ∞]`.
    pub positive_part: f64,
    /// `∫_{t<1} t log t`, in `[−∞, 0]`.
    pub negative_part: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Undefined,
}

impl Verdict {
    pub fn class(&self) -> EntropyClass {
        match self {
            Verdict::Finite(_) => EntropyClass::Finite,
            Verdict::PlusInfinity => EntropyClass::PlusInfinity,
            Verdict::MinusInfinity => EntropyClass::MinusInfinity,
            Verdict::Undefined => EntropyClass::Undefined,
        }
    }
}

impl ExtendedEntropyValue {
    pub fn from_parts(positive_part: f64, negative_part: f64) -> Self {
        Self {
            positive_part,
            negative_part,
        }
    }

    pub fn finite(v: f64) -> Self {
        Self {
            positive_part: v.max(0.0),
            negative_part: v.min(0.0),
        }
    }

    pub fn class(&self) -> EntropyClass {
        EntropyClass::from_parts(self.positive_part, self.negative_part)
    }

    pub fn verdict(&self) -> Verdict {
        match self.class() {
            EntropyClass::Finite => Verdict::Finite(self.positive_part + self.negative_part),
            EntropyClass::PlusInfinity => Verdict::PlusInfinity,
            EntropyClass::MinusInfinity => Verdict::MinusInfinity,
            EntropyClass::Undefined => Verdict::Undefined,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.class() == EntropyClass::Finite
    }

    /// The value as an extended real; `NaN` when undefined.
    pub fn value(&self) -> f64 {
        match self.verdict() {
            Verdict::Finite(v) => v,
            Verdict::PlusInfinity => f64::INFINITY,
            Verdict::MinusInfinity => f64::NEG_INFINITY,
            Verdict::Undefined => f64::NAN,
        }
    }

    pub fn negate(&self) -> Self {
        Self {
            positive_part: -self.negative_part,
            negative_part: -self.positive_part,
        }
    }

    /// Value column for text output.
    pub fn value_text(&self) -> String {
        match self.verdict() {
            Verdict::Undefined => "undefined".into(),
            _ => fmt12(self.value()),
        }
    }
}

impl fmt::Display for ExtendedEntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict() {
            Verdict::Finite(v) => write!(f, "finite({})", fmt12(v)),
            Verdict::PlusInfinity => f.write_str("+inf"),
            Verdict::MinusInfinity => f.write_str("-inf"),
            Verdict::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub value: ExtendedEntropyValue,
    pub trace: f64,
    /// `τ(h) − τ(𝟙)` in a finite algebra.
    pub lower_bound_check: Option<f64>,
    /// Tail terms summed directly before analytic remainders took over.
    pub partial_sum_cutoff: u64,
    /// Estimated error of the numerically summed tail parts.
    pub remainder_bound: f64,
    /// `τ(e({0}))`, possibly infinite.
    pub zero_mass: f64,
}

impl EntropyReport {
    pub const CSV_HEADER: &'static str = "verdict,value,positive_part,negative_part,trace,cutoff";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.value.class(),
            self.value.value_text(),
            fmt12(self.value.positive_part),
            fmt12(self.value.negative_part),
            fmt12(self.trace),
            self.partial_sum_cutoff
        )
    }

    pub fn kv_block(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("verdict = {}\n", self.value.class()));
        s.push_str(&format!("value = {}\n", self.value.value_text()));
        s.push_str(&format!("positive_part = {}\n", fmt12(self.value.positive_part)));
        s.push_str(&format!("negative_part = {}\n", fmt12(self.value.negative_part)));
        s.push_str(&format!("trace = {}\n", fmt12(self.trace)));
        if let Some(lb) = self.lower_bound_check {
            s.push_str(&format!("lower_bound_check = {}\n", fmt12(lb)));
        }
        s.push_str(&format!("zero_mass = {}\n", fmt12(self.zero_mass)));
        s.push_str(&format!("cutoff = {}\n", self.partial_sum_cutoff));
        s.push_str(&format!("remainder_bound = {}\n", fmt12(self.remainder_bound)));
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("entropy is {0}, a finite value is required")]
    NotFinite(EntropyClass),
}

/// One-sided sums over a finite list of points.
pub fn entropy_of_points(points: &[(f64, f64)]) -> ExtendedEntropyValue {
    let pos = csum(points.iter().filter(|p| p.0 > 1.0).map(|&(t, w)| xlogx(t) * w));
    let neg = csum(points.iter().filter(|p| p.0 < 1.0).map(|&(t, w)| xlogx(t) * w));
    ExtendedEntropyValue::from_parts(pos, neg)
}

pub fn entropy(d: &SpectralDensity) -> Result<EntropyReport, SpectralError> {
    entropy_with(d, SumSettings::default())
}

/// Tail verdicts come from the families' analytic classes; numeric sums only
/// ever shift a finite part.
pub fn entropy_with(d: &SpectralDensity, settings: SumSettings) -> Result<EntropyReport, SpectralError> {
    let points: Vec<(f64, f64)> = d.atoms().iter().map(|a| (a.value, a.weight)).collect();
    let head = entropy_of_points(&points);
    let mut pos = vec![head.positive_part];
    let mut neg = vec![head.negative_part];
    let mut terms = 0;
    let mut remainder = 0.0;
    for tail in d.tails() {
        let e = tail.entropy(settings)?;
        pos.push(e.positive);
        neg.push(e.negative);
        terms += e.terms;
        remainder += e.error_bound;
    }
    let positive = if pos.iter().any(|v| v.is_infinite()) {
        f64::INFINITY
    } else {
        csum(pos)
    };
    let negative = if neg.iter().any(|v| v.is_infinite()) {
        f64::NEG_INFINITY
    } else {
        csum(neg)
    };
    let trace = d.trace_with(settings)?;
    let total = d.total_trace();
    Ok(EntropyReport {
        value: ExtendedEntropyValue::from_parts(positive, negative),
        trace,
        lower_bound_check: total.is_finite().then_some(trace - total),
        partial_sum_cutoff: terms,
        remainder_bound: remainder,
        zero_mass: d.zero_mass()?,
    })
}

/// `(H(αh), α log α τ(h) + α H(h))`.
pub fn entropy_scale_law(
    d: &SpectralDensity,
    alpha: f64,
) -> Result<(ExtendedEntropyValue, ExtendedEntropyValue), EntropyError> {
    let base = entropy(d)?;
    let h = match base.value.verdict() {
        Verdict::Finite(v) => v,
        _ => return Err(EntropyError::NotFinite(base.value.class())),
    };
    let lhs = entropy(&d.scale(alpha)?)?.value;
    let rhs = ExtendedEntropyValue::finite(xlogx(alpha) * base.trace + alpha * h);
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftEquivalence {
    pub h: ExtendedEntropyValue,
    pub h_plus_one: ExtendedEntropyValue,
    pub both_finite_agree: bool,
}

/// `H(h)` against `H(h + 𝟙)` in a finite algebra.
pub fn shift_equivalence(d: &SpectralDensity) -> Result<ShiftEquivalence, SpectralError> {
    let shifted = d.shift_plus_identity()?;
    let h = entropy(d)?.value;
    let h_plus_one = entropy(&shifted)?.value;
    Ok(ShiftEquivalence {
        both_finite_agree: h.is_finite() == h_plus_one.is_finite(),
        h,
        h_plus_one,
    })
}

/// `S(h) = −H(h)`.
pub fn von_neumann_entropy(d: &SpectralDensity) -> Result<ExtendedEntropyValue, SpectralError> {
    Ok(entropy(d)?.value.negate())
}

/// `t log t ≤ (t+1) log(t+1) ≤ 2t log 2t`, valid for `t ≥ 1`.
pub fn shift_inequality_holds(t: f64) -> bool {
    let a = xlogx(t);
    let b = xlogx(t + 1.0);
    let c = xlogx(2.0 * t);
    let slack = 1e-12 * c.abs().max(1.0);
    a <= b + slack && b <= c + slack
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((1e-4f64..1e4, 1e-3f64..10.0), 1..10)
    }

    proptest! {
        #[test]
        fn atom_densities_are_finite_and_match_points(a in atoms()) {
            let d = SpectralDensity::from_atoms(&a).unwrap();
            let r = entropy(&d).unwrap();
            prop_assert_eq!(r.value.class(), EntropyClass::Finite);
            let direct: f64 = a.iter().map(|&(t, w)| w * t * t.ln()).sum();
            prop_assert!((r.value.value() - direct).abs() <= 1e-10 * (1.0 + r.value.positive_part));
        }

        #[test]
        fn scale_law_holds(a in atoms(), alpha in 1e-2f64..1e2) {
            let d = SpectralDensity::from_atoms(&a).unwrap();
            let (lhs, rhs) = entropy_scale_law(&d, alpha).unwrap();
            let scale = 1.0 + lhs.positive_part + lhs.negative_part;
            prop_assert!((lhs.value() - rhs.value()).abs() <= 1e-10 * scale);
        }

        #[test]
        fn verdict_class_agrees_with_parts(p in prop_oneof![Just(f64::INFINITY), 0f64..1e3],
                                           n in prop_oneof![Just(f64::INFINITY), 0f64..1e3]) {
            let v = ExtendedEntropyValue::from_parts(p, n);
            let want = match (p.is_finite(), n.is_finite()) {
                (true, true) => EntropyClass::Finite,
                (false, true) => EntropyClass::PlusInfinity,
                (true, false) => EntropyClass::MinusInfinity,
                (false, false) => EntropyClass::Undefined,
            };
            prop_assert_eq!(v.class(), want);
            prop_assert_eq!(v.verdict().class(), want);
        }
    }
}
