//! Analytic tail families. A tail is the point set
//! `{(o + σ·t(n), w(n)) : n ∈ domain}` where `t` and `w` are index rules of
//! the family, `σ` a scale and `o` an offset. Every divergence question is
//! answered from the rules; numerics only evaluate sums already known to be
//! finite.

use crate::numeric::CompensatedSum;

use super::domain::IndexDomain;
use super::monomial::{Limit, Monomial, SeriesClass};
use super::series::{sum_from, sum_range, SeriesEstimate, SumSettings};
use super::{EntropyClass, SpectralError};

/// Scan budget when locating where a tail crosses a value.
const SCAN_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum TailFamily {
    /// `αₙ = β γⁿ`, `tₙ = 1/(αₙ n²)`, `wₙ = αₙ`.
    GeometricOverSquare { beta: f64, gamma: f64 },
    /// `tₙ = 1/(n ln² n)`, `wₙ = weight`.
    InverseLogSquare { weight: f64 },
    /// Explicit rules for `tₙ` and `wₙ`.
    Custom { t: Monomial, w: Monomial },
}

impl TailFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TailFamily::GeometricOverSquare { .. } => "geometric_over_square",
            TailFamily::InverseLogSquare { .. } => "inverse_log_square",
            TailFamily::Custom { .. } => "custom",
        }
    }

    /// `(t rule, w rule)` before scale and offset.
    pub fn rules(&self) -> (Monomial, Monomial) {
        match *self {
            TailFamily::GeometricOverSquare { beta, gamma } => (
                Monomial::new(1.0 / beta, -2.0, 1.0 / gamma, 0.0),
                Monomial::new(beta, 0.0, gamma, 0.0),
            ),
            TailFamily::InverseLogSquare { weight } => {
                (Monomial::new(1.0, -1.0, 1.0, -2.0), Monomial::constant(weight))
            }
            TailFamily::Custom { t, w } => (t, w),
        }
    }

    pub fn min_index(&self) -> u64 {
        let (t, w) = self.rules();
        t.min_index().max(w.min_index())
    }

    pub fn check(&self) -> Result<(), SpectralError> {
        let bad = |m: String| Err(SpectralError::InvalidTail(m));
        match *self {
            TailFamily::GeometricOverSquare { beta, gamma } => {
                if !(beta.is_finite() && beta > 0.0) {
                    return bad(format!("beta must be positive, got {beta}"));
                }
                if !(gamma > 0.0 && gamma < 1.0) {
                    return bad(format!("gamma must lie in (0,1), got {gamma}"));
                }
            }
            TailFamily::InverseLogSquare { weight } => {
                if !(weight.is_finite() && weight > 0.0) {
                    return bad(format!("weight must be positive, got {weight}"));
                }
            }
            TailFamily::Custom { t, w } => {
                if !t.is_well_formed() || !w.is_well_formed() {
                    return bad("custom rules need positive finite coefficients and bases".into());
                }
            }
        }
        Ok(())
    }
}

/// Trace and entropy class a tail claims for itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDeclaration {
    pub trace: f64,
    pub entropy: EntropyClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tail {
    pub family: TailFamily,
    pub scale: f64,
    pub offset: f64,
    pub domain: IndexDomain,
    /// Projection-grid label; tails on the same label share projections index by index.
    pub grid: u32,
    pub declared: TailDeclaration,
}

/// One-sided entropy sums of a tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEntropy {
    pub positive: f64,
    pub negative: f64,
    pub error_bound: f64,
    pub terms: u64,
}

fn worse(a: SeriesClass, b: SeriesClass) -> SeriesClass {
    use SeriesClass::*;
    match (a, b) {
        (Divergent, _) | (_, Divergent) => Divergent,
        (Convergent, _) | (_, Convergent) => Convergent,
        _ => Geometric,
    }
}

impl Tail {
    /// A tail on `domain` with unit scale, no offset, grid 0 and a computed declaration.
    pub fn new(family: TailFamily, domain: IndexDomain, settings: SumSettings) -> Result<Tail, SpectralError> {
        Tail::with_params(family, 1.0, 0.0, domain, 0, settings)
    }

    pub fn with_params(
        family: TailFamily,
        scale: f64,
        offset: f64,
        domain: IndexDomain,
        grid: u32,
        settings: SumSettings,
    ) -> Result<Tail, SpectralError> {
        let mut tail = Tail {
            family,
            scale,
            offset,
            domain,
            grid,
            declared: TailDeclaration {
                trace: 0.0,
                entropy: EntropyClass::Finite,
            },
        };
        tail.check_shape()?;
        tail.declared = tail.derive_declaration(settings)?;
        Ok(tail)
    }

    /// Recompute the declaration after a transformation.
    pub fn redeclared(mut self, settings: SumSettings) -> Result<Tail, SpectralError> {
        self.check_shape()?;
        self.declared = self.derive_declaration(settings)?;
        Ok(self)
    }

    pub fn check_shape(&self) -> Result<(), SpectralError> {
        self.family.check()?;
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(SpectralError::InvalidTail(format!("scale must be positive, got {}", self.scale)));
        }
        if !(self.offset.is_finite() && self.offset >= 0.0) {
            return Err(SpectralError::InvalidTail(format!("offset must be nonnegative, got {}", self.offset)));
        }
        if let Some(first) = self.domain.min() {
            if first < self.family.min_index() {
                return Err(SpectralError::InvalidTail(format!(
                    "{} needs indices ≥ {}, got {first}",
                    self.family.name(),
                    self.family.min_index()
                )));
            }
        }
        Ok(())
    }

    pub fn t_rule(&self) -> Monomial {
        self.family.rules().0.scaled(self.scale)
    }

    pub fn w_rule(&self) -> Monomial {
        self.family.rules().1
    }

    fn tw_rule(&self) -> Monomial {
        self.t_rule().mul(&self.w_rule())
    }

    pub fn has_unbounded_part(&self) -> bool {
        !self.domain.is_finite()
    }

    /// ln of the spectral value at index `x = e^{ln_x}`.
    pub fn ln_value_at_ln(&self, ln_x: f64) -> f64 {
        let ln_t = self.t_rule().ln_at_ln(ln_x);
        self.ln_value_from_ln_t(ln_t)
    }

    fn ln_value_from_ln_t(&self, ln_t: f64) -> f64 {
        let o = self.offset;
        if o == 0.0 {
            ln_t
        } else if ln_t > 0.0 {
            ln_t + (o * (-ln_t).exp()).ln_1p()
        } else {
            (o + ln_t.exp()).ln()
        }
    }

    pub fn value(&self, n: u64) -> f64 {
        self.ln_value_at_ln((n as f64).ln()).exp()
    }

    pub fn weight(&self, n: u64) -> f64 {
        self.w_rule().at(n as f64)
    }

    /// `(value·weight·e^{extra}, ln value)`, evaluated without forming
    /// indeterminate products at extreme indices.
    pub fn vw_at_ln(&self, ln_x: f64, extra: f64) -> (f64, f64) {
        let ln_tw = self.tw_rule().ln_at_ln(ln_x);
        let mut vw = (ln_tw + extra).exp();
        if self.offset > 0.0 {
            vw += self.offset * (self.w_rule().ln_at_ln(ln_x) + extra).exp();
        }
        (vw, self.ln_value_at_ln(ln_x))
    }

    /// `Σ value·weight·kernel(ln value)` as a summand.
    pub fn kernel_term<'a, K: Fn(f64) -> f64 + 'a>(&'a self, kernel: K) -> impl Fn(f64, f64) -> f64 + 'a {
        move |ln_x, extra| {
            let (vw, lv) = self.vw_at_ln(ln_x, extra);
            if vw == 0.0 {
                0.0
            } else {
                vw * kernel(lv)
            }
        }
    }

    /// `Σ weight·e^{extra}` as a summand.
    pub fn mass_term(&self) -> impl Fn(f64, f64) -> f64 + '_ {
        let w = self.w_rule();
        move |ln_x, extra| (w.ln_at_ln(ln_x) + extra).exp()
    }

    /// `Σ value^p·weight` as a summand.
    pub fn moment_term(&self, p: f64) -> impl Fn(f64, f64) -> f64 + '_ {
        let t = self.t_rule();
        let w = self.w_rule();
        let tpw = t.powf(p).mul(&w);
        let o = self.offset;
        move |ln_x, extra| {
            if o == 0.0 {
                return (tpw.ln_at_ln(ln_x) + extra).exp();
            }
            let ln_t = t.ln_at_ln(ln_x);
            if ln_t >= 0.0 {
                (tpw.ln_at_ln(ln_x) + extra + p * (o * (-ln_t).exp()).ln_1p()).exp()
            } else {
                (p * (o + ln_t.exp()).ln() + w.ln_at_ln(ln_x) + extra).exp()
            }
        }
    }

    pub fn mass_class(&self) -> SeriesClass {
        self.w_rule().series()
    }

    pub fn trace_class(&self) -> SeriesClass {
        let tw = self.tw_rule().series();
        if self.offset > 0.0 {
            worse(tw, self.mass_class())
        } else {
            tw
        }
    }

    pub fn moment_class(&self, p: f64) -> SeriesClass {
        let t = self.t_rule();
        let w = self.w_rule();
        let tpw = t.powf(p).mul(&w).series();
        match t.limit() {
            Limit::Infinity => tpw,
            Limit::Zero if self.offset == 0.0 => tpw,
            _ => w.series(),
        }
    }

    /// Eventual sign of `ln value` and the convergence class of the one-sided
    /// entropy series `Σ value·|ln value|·weight` on the unbounded part.
    pub fn eventual_entropy(&self) -> (f64, SeriesClass) {
        let t = self.t_rule();
        let w = self.w_rule();
        let tw = self.tw_rule();
        let o = self.offset;
        match t.limit() {
            Limit::Infinity => (1.0, tw.series_times_log(t.growth())),
            Limit::Zero if o == 0.0 => (-1.0, tw.series_times_log(t.growth())),
            Limit::Zero if o == 1.0 => (1.0, tw.series()),
            Limit::Zero => ((o.ln()).signum(), w.series()),
            Limit::Constant(c) => {
                let v = o + c;
                if v == 1.0 {
                    (0.0, SeriesClass::Geometric)
                } else {
                    (v.ln().signum(), w.series())
                }
            }
        }
    }

    /// Entropy class from the rules alone.
    pub fn entropy_class(&self) -> EntropyClass {
        if !self.has_unbounded_part() {
            return EntropyClass::Finite;
        }
        let (side, class) = self.eventual_entropy();
        match (class.converges(), side > 0.0) {
            (true, _) => EntropyClass::Finite,
            (false, true) => EntropyClass::PlusInfinity,
            (false, false) => EntropyClass::MinusInfinity,
        }
    }

    /// Sum a summand over a sub-domain of this tail. `class` governs the
    /// unbounded part; a divergent class yields `+∞` (summand assumed ≥ 0).
    pub fn sum_over<F: Fn(f64, f64) -> f64>(
        &self,
        domain: &IndexDomain,
        term: &F,
        class: SeriesClass,
        settings: SumSettings,
    ) -> Result<SeriesEstimate, SpectralError> {
        let mut total = SeriesEstimate::ZERO;
        for (a, b) in domain.bounded_ranges() {
            total = total.combine(sum_range(term, a, b));
        }
        if let Some(k) = domain.unbounded_start() {
            if !class.converges() {
                return Ok(SeriesEstimate {
                    value: f64::INFINITY,
                    ..total
                });
            }
            total = total.combine(sum_from(term, k, class, settings)?);
        }
        Ok(total)
    }

    pub fn trace(&self, settings: SumSettings) -> Result<SeriesEstimate, SpectralError> {
        let term = self.kernel_term(|_| 1.0);
        self.sum_over(&self.domain, &term, self.trace_class(), settings)
    }

    pub fn mass(&self, settings: SumSettings) -> Result<SeriesEstimate, SpectralError> {
        let term = self.mass_term();
        self.sum_over(&self.domain, &term, self.mass_class(), settings)
    }

    pub fn moment(&self, p: f64, settings: SumSettings) -> Result<SeriesEstimate, SpectralError> {
        let term = self.moment_term(p);
        self.sum_over(&self.domain, &term, self.moment_class(p), settings)
    }

    /// One-sided entropy sums. The analytic verdict decides divergence; only
    /// convergent sides are summed.
    pub fn entropy(&self, settings: SumSettings) -> Result<TailEntropy, SpectralError> {
        let term = self.kernel_term(|lv| lv);
        let mut pos = CompensatedSum::new();
        let mut neg = CompensatedSum::new();
        let mut terms = 0u64;
        let mut add = |n: u64| {
            let v = term((n as f64).ln(), 0.0);
            if v > 0.0 {
                pos.add(v);
            } else {
                neg.add(v);
            }
        };
        for n in self.domain.iter_bounded() {
            add(n);
            terms += 1;
        }
        let mut out = TailEntropy {
            positive: 0.0,
            negative: 0.0,
            error_bound: 0.0,
            terms: 0,
        };
        if let Some(k) = self.domain.unbounded_start() {
            let (side, class) = self.eventual_entropy();
            let n0 = k.max(self.t_rule().monotone_from());
            for n in k..n0 {
                add(n);
            }
            terms += n0 - k;
            let on_side = |n: u64| {
                let lv = self.ln_value_at_ln((n as f64).ln());
                side == 0.0 || lv * side > 0.0
            };
            let mut n1 = n0;
            while !on_side(n1) {
                add(n1);
                n1 += 1;
                terms += 1;
                if n1 - n0 > SCAN_LIMIT {
                    return Err(SpectralError::Numerical(
                        "tail does not settle on one side of 1 within the scan budget".into(),
                    ));
                }
            }
            if side != 0.0 {
                if !class.converges() {
                    if side > 0.0 {
                        out.positive = f64::INFINITY;
                    } else {
                        out.negative = f64::NEG_INFINITY;
                    }
                } else {
                    let s = sum_from(&term, n1, class, settings)?;
                    if side > 0.0 {
                        pos.add(s.value);
                    } else {
                        neg.add(s.value);
                    }
                    out.error_bound = s.error_bound;
                    terms += s.terms;
                }
            }
        }
        if out.positive == 0.0 {
            out.positive = pos.value().max(0.0);
        }
        if out.negative == 0.0 {
            out.negative = neg.value().min(0.0);
        }
        out.terms = terms;
        Ok(out)
    }

    pub fn derive_declaration(&self, settings: SumSettings) -> Result<TailDeclaration, SpectralError> {
        let trace = if self.has_unbounded_part() && !self.trace_class().converges() {
            f64::INFINITY
        } else {
            self.trace(settings)?.value
        };
        Ok(TailDeclaration {
            trace,
            entropy: self.entropy_class(),
        })
    }

    /// Indices whose values lie in `[lo, hi]` (`hi` may be `+∞`).
    pub fn indices_in(&self, lo: f64, hi: f64) -> Result<IndexDomain, SpectralError> {
        let inside = |n: u64| {
            let v = self.value(n);
            v >= lo && v <= hi
        };
        let mut ranges: Vec<(u64, Option<u64>)> = Vec::new();
        for n in self.domain.iter_bounded() {
            if inside(n) {
                ranges.push((n, Some(n + 1)));
            }
        }
        if let Some(k) = self.domain.unbounded_start() {
            let n0 = k.max(self.t_rule().monotone_from());
            for n in k..n0 {
                if inside(n) {
                    ranges.push((n, Some(n + 1)));
                }
            }
            let value = |n: u64| self.value(n);
            match self.t_rule().limit() {
                Limit::Constant(_) => {
                    if inside(n0) {
                        ranges.push((n0, None));
                    }
                }
                Limit::Zero => {
                    // Values decrease to the offset.
                    let o = self.offset;
                    if hi > o {
                        let a = first_index(n0, |n| value(n) <= hi)?;
                        if lo <= o {
                            ranges.push((a, None));
                        } else {
                            let b = first_index(a, |n| value(n) < lo)?;
                            ranges.push((a, Some(b)));
                        }
                    }
                }
                Limit::Infinity => {
                    let a = first_index(n0, |n| value(n) >= lo)?;
                    if hi.is_infinite() {
                        ranges.push((a, None));
                    } else {
                        let b = first_index(a, |n| value(n) > hi)?;
                        ranges.push((a, Some(b)));
                    }
                }
            }
        }
        Ok(IndexDomain::from_ranges(ranges))
    }

    /// Indices with value strictly below `v`.
    pub fn indices_below(&self, v: f64) -> Result<IndexDomain, SpectralError> {
        Ok(self.domain.minus(&self.indices_in(v, f64::INFINITY)?))
    }

    /// Indices with value strictly above `v`.
    pub fn indices_above(&self, v: f64) -> Result<IndexDomain, SpectralError> {
        Ok(self.domain.minus(&self.indices_in(0.0, v)?))
    }

    /// Same tail restricted to a sub-domain.
    pub fn restricted(&self, domain: IndexDomain, settings: SumSettings) -> Result<Tail, SpectralError> {
        Tail {
            domain,
            ..self.clone()
        }
        .redeclared(settings)
    }

    /// Bounded part as explicit `(value, weight)` points.
    pub fn bounded_points(&self) -> Vec<(f64, f64)> {
        self.domain
            .iter_bounded()
            .map(|n| (self.value(n), self.weight(n)))
            .collect()
    }

    /// If both tails use proportional value rules and identical weight rules,
    /// the coefficient of `t̂` on each side (`t = coef · t̂`).
    pub fn alignment(&self, other: &Tail) -> Option<(f64, f64)> {
        let (t1, w1) = (self.t_rule(), self.w_rule());
        let (t2, w2) = (other.t_rule(), other.w_rule());
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
        let same_shape = |a: &Monomial, b: &Monomial| {
            a.n_pow == b.n_pow && close(a.base, b.base) && a.ln_pow == b.ln_pow
        };
        if same_shape(&t1, &t2) && same_shape(&w1, &w2) && close(w1.coef, w2.coef) {
            Some((t1.coef, t2.coef))
        } else {
            None
        }
    }
}

/// First `n ≥ from` with `pred(n)`, for `pred` monotone false → true.
pub(crate) fn first_index<P: Fn(u64) -> bool>(from: u64, pred: P) -> Result<u64, SpectralError> {
    if pred(from) {
        return Ok(from);
    }
    let mut lo = from;
    let mut step = 1u64;
    let mut hi = from.saturating_add(step);
    while !pred(hi) {
        if hi >= 1 << 62 {
            return Err(SpectralError::Numerical(
                "value threshold lies beyond the representable index range".into(),
            ));
        }
        lo = hi;
        step = step.saturating_mul(2);
        hi = from.saturating_add(step);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> SumSettings {
        SumSettings::default()
    }

    fn gos() -> Tail {
        Tail::new(
            TailFamily::GeometricOverSquare { beta: 1.0, gamma: 0.5 },
            IndexDomain::from(1),
            s(),
        )
        .unwrap()
    }

    fn ils() -> Tail {
        Tail::new(TailFamily::InverseLogSquare { weight: 1.0 }, IndexDomain::from(2), s()).unwrap()
    }

    #[test]
    fn geometric_over_square_points_and_trace() {
        let t = gos();
        assert!((t.value(3) - 8.0 / 9.0).abs() < 1e-14);
        assert!((t.weight(3) - 0.125).abs() < 1e-15);
        let pi2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((t.declared.trace - pi2).abs() < 1e-10);
        assert_eq!(t.declared.entropy, EntropyClass::PlusInfinity);
    }

    #[test]
    fn inverse_log_square_classes() {
        let t = ils();
        assert_eq!(t.declared.entropy, EntropyClass::MinusInfinity);
        assert!((t.declared.trace - 2.109742801236892).abs() < 1e-9);
        assert!(!t.mass_class().converges());
        let e = t.entropy(s()).unwrap();
        assert_eq!(e.negative, f64::NEG_INFINITY);
        // Only n = 2 has value above 1.
        assert!((e.positive - xlogx_at(t.value(2))).abs() < 1e-15);
    }

    fn xlogx_at(v: f64) -> f64 {
        v * v.ln()
    }

    #[test]
    fn convergent_entropy_tail() {
        // t = 1/n², w = 1: Σ (1/n²) ln(1/n²) = −2 Σ ln n / n² = 2ζ'(2).
        let t = Tail::new(
            TailFamily::Custom {
                t: Monomial::new(1.0, -2.0, 1.0, 0.0),
                w: Monomial::ONE,
            },
            IndexDomain::from(1),
            s(),
        )
        .unwrap();
        assert_eq!(t.declared.entropy, EntropyClass::Finite);
        let e = t.entropy(s()).unwrap();
        assert_eq!(e.positive, 0.0);
        assert!((e.negative - 2.0 * -0.937_548_254_315_843_8).abs() < 1e-9, "{}", e.negative);
    }

    #[test]
    fn band_selection_on_inverse_log_square() {
        let t = ils();
        let d = t.indices_in(0.5, 2.0).unwrap();
        // 1/(n ln² n) ≥ 0.5 holds for n = 2 only.
        assert_eq!(d.to_string(), "2");
        for n in 3..100 {
            assert!(t.value(n) < 0.5);
        }
        let below = t.indices_below(1e-3).unwrap();
        let k = below.min().unwrap();
        assert!(t.value(k) < 1e-3 && t.value(k - 1) >= 1e-3);
        assert!(!below.is_finite());
    }

    #[test]
    fn band_selection_on_growing_tail() {
        let t = gos();
        let d = t.indices_in(10.0, 1000.0).unwrap();
        for n in 1..40 {
            let v = t.value(n);
            assert_eq!(d.contains(n), (10.0..=1000.0).contains(&v), "n = {n}");
        }
    }

    #[test]
    fn offset_tail_classes() {
        let mut t = gos();
        t.offset = 1.0;
        let t = t.redeclared(s()).unwrap();
        // (1 + 2ⁿ/n²)·2⁻ⁿ: trace = Σ2⁻ⁿ + π²/6.
        let pi2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((t.declared.trace - (1.0 + pi2)).abs() < 1e-10);
        assert_eq!(t.declared.entropy, EntropyClass::PlusInfinity);
    }

    #[test]
    fn moments() {
        let t = gos();
        assert!(!t.moment_class(1.5).converges());
        let m = t.moment(0.5, s()).unwrap();
        // Σ (2ⁿ/n²)^{1/2} 2⁻ⁿ = Σ 2^{-n/2}/n.
        let direct: f64 = (1..200).map(|n| 2f64.powf(-(n as f64) / 2.0) / n as f64).sum();
        assert!((m.value - direct).abs() < 1e-12);
    }

    #[test]
    fn first_index_search() {
        assert_eq!(first_index(3, |n| n >= 1000).unwrap(), 1000);
        assert_eq!(first_index(3, |_| true).unwrap(), 3);
    }
}
