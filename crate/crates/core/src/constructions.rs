//! Constructive approximation procedures: the divergent-series sequence over
//! a resolution of the identity, finite-entropy truncations, the
//! infinite-entropy element of a finite algebra with infinitely many
//! projections, and infinite-entropy approximants.

use std::f64::consts::{LN_2, PI};

use thiserror::Error;

use crate::entropy::{entropy, Verdict};
use crate::numeric::CompensatedSum;
use crate::spectral::series::{sum_from, sum_range};
use crate::spectral::tail::first_index;
use crate::spectral::{
    fresh_grid_label, l1_distance, EntropyClass, IndexDomain, Limit, Monomial, SpectralDensity, SpectralError,
    SumSettings, Tail, TailFamily,
};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// ζ'(2).
const ZETA_PRIME_2: f64 = -0.937_548_254_315_843_8;
/// Largest index scanned term by term.
const DIRECT_LIMIT: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not representable: {0}")]
    NotRepresentable(String),
    #[error("the spectrum below m carries trace {available}, need {needed}")]
    InsufficientLowSpectrum { needed: f64, available: f64 },
}

impl ConstructionError {
    pub fn code(&self) -> &'static str {
        match self {
            ConstructionError::Spectral(e) => e.code(),
            ConstructionError::Precondition(_) => "precondition",
            ConstructionError::NotRepresentable(_) => "not_representable",
            ConstructionError::InsufficientLowSpectrum { .. } => "insufficient_low_spectrum",
        }
    }
}

fn pre(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::Precondition(msg.into())
}

/// Orthogonal projections `eₙ` with traces `αₙ`, summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionOfIdentity {
    pub weights: Monomial,
    pub domain: IndexDomain,
}

impl ResolutionOfIdentity {
    pub fn new(weights: Monomial, domain: IndexDomain) -> Result<Self, ConstructionError> {
        if !weights.is_well_formed() {
            return Err(pre("weights need a positive finite coefficient and base"));
        }
        match domain.min() {
            None => return Err(pre("empty index set")),
            Some(s) if s < weights.min_index() => {
                return Err(pre(format!("weight rule needs indices ≥ {}", weights.min_index())))
            }
            _ => {}
        }
        Ok(Self { weights, domain })
    }

    /// `αₙ = base^n` for `n ≥ 1`.
    pub fn geometric(base: f64) -> Result<Self, ConstructionError> {
        Self::new(Monomial::new(1.0, 0.0, base, 0.0), IndexDomain::from(1))
    }

    pub fn weight(&self, n: u64) -> f64 {
        self.weights.at(n as f64)
    }

    pub fn is_infinite(&self) -> bool {
        self.domain.unbounded_start().is_some()
    }

    /// `Σ αₙ`, `+∞` when the series diverges.
    pub fn total(&self) -> Result<f64, SpectralError> {
        let w = self.weights;
        let term = move |ln_x: f64, extra: f64| (w.ln_at_ln(ln_x) + extra).exp();
        let mut acc = CompensatedSum::new();
        for (a, b) in self.domain.bounded_ranges() {
            acc.add(sum_range(&term, a, b).value);
        }
        if let Some(k) = self.domain.unbounded_start() {
            if !w.series().converges() {
                return Ok(f64::INFINITY);
            }
            acc.add(sum_from(&term, k, w.series(), SumSettings::default())?.value);
        }
        Ok(acc.value())
    }
}

/// Whether `w(n) ≤ 2⁻ⁿ` (`below`) or `w(n) ≥ 2ⁿ` for every `n ≥ from`.
fn dominated_by_powers_of_two(w: &Monomial, from: u64, below: bool) -> Result<bool, ConstructionError> {
    let g = if below {
        Monomial::new(w.coef, w.n_pow, w.base * 2.0, w.ln_pow)
    } else {
        Monomial::new(1.0 / w.coef, -w.n_pow, 2.0 / w.base, -w.ln_pow)
    };
    // Need g ≤ 1 everywhere; past monotone_from g moves monotonically to its limit.
    match g.limit() {
        Limit::Infinity => return Ok(false),
        Limit::Constant(c) if c > 1.0 + 1e-12 => return Ok(false),
        _ => {}
    }
    let until = g.monotone_from().max(from);
    if until - from > DIRECT_LIMIT {
        return Err(ConstructionError::NotRepresentable(
            "cannot verify the power-of-two bound on a finite prefix".into(),
        ));
    }
    Ok((from..=until).all(|n| g.ln_at(n as f64) <= 1e-12))
}

/// The sequence `λ` of the divergent-series construction: along the first
/// indices `kₙ` with `α_{kₙ} ≤ 2⁻ⁿ` put `λ = 1/(α_{kₙ} n²)`, elsewhere `λ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma13Sequence {
    pub resolution: ResolutionOfIdentity,
    pub total: f64,
    start: u64,
}

pub fn lemma13_sequence(r: &ResolutionOfIdentity) -> Result<Lemma13Sequence, ConstructionError> {
    let start = match (r.domain.unbounded_start(), r.domain.bounded_ranges().next()) {
        (Some(s), None) => s,
        (None, _) => return Err(pre("the resolution must have infinitely many projections")),
        _ => return Err(pre("the index set must be a single range `s..`")),
    };
    let total = r.total()?;
    if !total.is_finite() {
        return Err(pre("Σ αₙ must be finite"));
    }
    Ok(Lemma13Sequence {
        resolution: r.clone(),
        total,
        start,
    })
}

impl Lemma13Sequence {
    /// `k₁ < k₂ < …`, the first `count` selected indices.
    pub fn subsequence(&self, count: usize) -> Result<Vec<u64>, ConstructionError> {
        let w = self.resolution.weights;
        let mono = w.monotone_from();
        let mut out = Vec::with_capacity(count);
        let mut next = self.start;
        for n in 1..=count as u64 {
            let ok = |k: u64| w.ln_at(k as f64) <= -(n as f64) * LN_2 + 1e-12;
            let k = if next >= mono {
                first_index(next, ok)?
            } else {
                match (next..mono).find(|&k| ok(k)) {
                    Some(k) => k,
                    None => first_index(mono, ok)?,
                }
            };
            out.push(k);
            next = k + 1;
        }
        Ok(out)
    }

    /// `kₙ = n` for every `n`.
    pub fn is_identity_selection(&self) -> Result<bool, ConstructionError> {
        Ok(self.start == 1 && dominated_by_powers_of_two(&self.resolution.weights, 1, true)?)
    }

    /// `(Σ_{r≤R} α_r λ_r, Σ_{r≤R} α_r λ_r log λ_r)`.
    pub fn partial_sums(&self, last: u64) -> Result<(f64, f64), ConstructionError> {
        let mut ks;
        let mut count = 16;
        loop {
            ks = self.subsequence(count)?;
            if *ks.last().unwrap() > last || count > 4096 {
                break;
            }
            count *= 2;
        }
        let mut trace = CompensatedSum::new();
        let mut ent = CompensatedSum::new();
        let mut sel = ks.iter().enumerate().peekable();
        for r in self.start..=last {
            let a = self.resolution.weight(r);
            match sel.peek() {
                Some(&(i, &k)) if k == r => {
                    let n = (i + 1) as f64;
                    let lam_ln = -self.resolution.weights.ln_at(r as f64) - 2.0 * n.ln();
                    trace.add(1.0 / (n * n));
                    ent.add(lam_ln / (n * n));
                    sel.next();
                }
                _ => trace.add(a),
            }
        }
        Ok((trace.value(), ent.value()))
    }

    /// Upper bound on `Σ αₙ λₙ`.
    pub fn trace_bound(&self) -> f64 {
        self.total + PI * PI / 6.0
    }
}

/// `Σ_{n≤N} (n log 2 − 2 log n)/n²`, the lower bound for the entropy partial sums.
pub fn divergence_lower_bound(last: u64) -> f64 {
    let mut acc = CompensatedSum::new();
    for n in 1..=last {
        let x = n as f64;
        acc.add((x * LN_2 - 2.0 * x.ln()) / (x * x));
    }
    acc.value()
}

/// Large-N form of the same sum as a function of `ln N`.
pub fn divergence_lower_bound_asymptotic(ln_n: f64) -> f64 {
    let inv = (-ln_n).exp();
    LN_2 * (ln_n + EULER_GAMMA + 0.5 * inv) + 2.0 * ZETA_PRIME_2 + 2.0 * (ln_n + 1.0) * inv - ln_n * inv * inv
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceWitness {
    pub threshold: f64,
    /// Exact `N(B)` when it is reached by direct summation.
    pub n: Option<u64>,
    pub ln_n: f64,
    pub partial_sum: f64,
}

/// Smallest `N` at which the lower-bound partial sums exceed `threshold`.
pub fn divergence_witness(threshold: f64) -> DivergenceWitness {
    let mut acc = CompensatedSum::new();
    for n in 1..=DIRECT_LIMIT {
        let x = n as f64;
        acc.add((x * LN_2 - 2.0 * x.ln()) / (x * x));
        if acc.value() > threshold {
            return DivergenceWitness {
                threshold,
                n: Some(n),
                ln_n: x.ln(),
                partial_sum: acc.value(),
            };
        }
    }
    // Past 10⁸ the remainder terms are below 10⁻⁷ and the sum is increasing in N.
    let mut ln_n = (threshold - 2.0 * ZETA_PRIME_2) / LN_2 - EULER_GAMMA;
    // The correction terms vanish in f64 at this size; step to the first point strictly above.
    while ln_n.is_finite() && divergence_lower_bound_asymptotic(ln_n) <= threshold {
        ln_n = ln_n.next_up();
    }
    DivergenceWitness {
        threshold,
        n: None,
        ln_n,
        partial_sum: divergence_lower_bound_asymptotic(ln_n),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub h_prime: SpectralDensity,
    pub m: f64,
    pub big_m: f64,
    pub distance: f64,
}

/// Largest `x` (in `ln` space) with `pred(eˣ)` for `pred` true → false.
fn bisect_ln<P>(pred: P) -> Result<f64, ConstructionError>
where
    P: Fn(f64) -> Result<bool, SpectralError>,
{
    const CAP: f64 = 690.0;
    let step = 10f64.ln();
    let (mut lo, mut hi);
    if pred(1.0)? {
        lo = 0.0;
        hi = step;
        while pred(hi.exp())? {
            lo = hi;
            if hi >= CAP {
                return Ok(lo.exp());
            }
            hi = (hi + step).min(CAP);
        }
    } else {
        hi = 0.0;
        lo = -step;
        while !pred(lo.exp())? {
            hi = lo;
            if lo <= -CAP {
                return Err(ConstructionError::NotRepresentable(
                    "the cutoff lies below the smallest representable value".into(),
                ));
            }
            lo = (lo - step).max(-CAP);
        }
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if pred(mid.exp())? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.exp())
}

/// `h' = e([m,M]) h` with both cut-off pieces of trace below `ε`.
pub fn thm12_truncation(d: &SpectralDensity, eps: f64) -> Result<Truncation, ConstructionError> {
    if !(eps > 0.0) {
        return Err(pre("ε must be positive"));
    }
    // Bracketing uses short direct sums; the cut points are re-checked at full accuracy below.
    let coarse = SumSettings { cutoff: 10_000 };
    let mut m = bisect_ln(|v| Ok(d.trace_below_with(v, coarse)? < eps))?;
    let mut step = 1e-12;
    while d.trace_below(m)? >= eps {
        m *= 1.0 - step;
        step *= 2.0;
    }
    // Smallest M with trace above M below ε: the largest x where it still fails, then step past it.
    let not_yet = bisect_ln(|v| Ok(d.trace_above_with(v, coarse)? >= eps));
    let mut big_m = match not_yet {
        Ok(v) => v * (1.0 + 1e-12),
        Err(ConstructionError::NotRepresentable(_)) => f64::MIN_POSITIVE,
        Err(e) => return Err(e),
    };
    let mut step = 1e-9;
    while d.trace_above(big_m)? >= eps {
        big_m *= 1.0 + step;
        step *= 2.0;
    }
    let big_m = if big_m <= m { big_m.max(2.0 * m) } else { big_m };
    let h_prime = d.truncate(m, big_m)?;
    let distance = l1_distance(d, &h_prime)?;
    Ok(Truncation {
        h_prime,
        m,
        big_m,
        distance,
    })
}

/// The element `Σ λₙ eₙ` of a finite algebra: trace finite, entropy `+∞`.
/// Representable when `kₙ = n`, i.e. `αₙ ≤ 2⁻ⁿ` for all `n ≥ 1`.
pub fn thm14_counterexample(r: &ResolutionOfIdentity, normalize_trace: bool) -> Result<SpectralDensity, ConstructionError> {
    let seq = lemma13_sequence(r)?;
    if !seq.is_identity_selection()? {
        return Err(ConstructionError::NotRepresentable(
            "the selected subsequence is not kₙ = n, so λ has no closed-form tail".into(),
        ));
    }
    let w = r.weights;
    let family = if w.n_pow == 0.0 && w.ln_pow == 0.0 && w.base < 1.0 {
        TailFamily::GeometricOverSquare {
            beta: w.coef,
            gamma: w.base,
        }
    } else {
        TailFamily::Custom {
            t: Monomial::new(1.0 / w.coef, -2.0 - w.n_pow, 1.0 / w.base, -w.ln_pow),
            w,
        }
    };
    let tail = Tail::new(family, r.domain.clone(), SumSettings::default())?;
    let d = SpectralDensity::new(vec![], vec![tail], seq.total)?;
    if normalize_trace {
        let tr = d.trace();
        Ok(d.scale(1.0 / tr)?)
    } else {
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thm15Case {
    /// `c₁ ≤ τ(eₙ) ≤ c₂`.
    Bounded { c1: f64, c2: f64 },
    /// `τ(eₙ) ≤ 2⁻ⁿ`.
    Small,
    /// `τ(eₙ) ≥ 2ⁿ`.
    Large,
}

impl Thm15Case {
    pub fn name(&self) -> &'static str {
        match self {
            Thm15Case::Bounded { .. } => "case1",
            Thm15Case::Small => "case2",
            Thm15Case::Large => "case3",
        }
    }

    pub fn expected(&self) -> EntropyClass {
        match self {
            Thm15Case::Small => EntropyClass::PlusInfinity,
            _ => EntropyClass::MinusInfinity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximant {
    pub h_prime: SpectralDensity,
    /// The added piece `h'₁`, supported off `[m, M]`.
    pub added: SpectralDensity,
    /// `e([m,M]) h`.
    pub truncated: SpectralDensity,
    pub m: f64,
    pub big_m: f64,
    pub n0: u64,
    pub lambda_scale: f64,
    pub distance: f64,
    pub verdict: Verdict,
}

/// `τ(e([0, v)))` for the spectral measure of `d`.
pub fn low_spectrum_trace(d: &SpectralDensity, v: f64) -> Result<f64, SpectralError> {
    let zero = d.zero_mass()?;
    let mut acc = CompensatedSum::new();
    for a in d.atoms().iter().filter(|a| a.value > 0.0 && a.value < v) {
        acc.add(a.weight);
    }
    for tail in d.tails() {
        let dom = tail.indices_below(v)?;
        let term = tail.mass_term();
        acc.add(tail.sum_over(&dom, &term, tail.mass_class(), SumSettings::default())?.value);
    }
    Ok(zero + acc.value())
}

/// `h' = h'₁ + e([m,M]) h` with `‖h'₁‖₁ < ε`, spectrum of `h'₁` outside `[m, M]`
/// and infinite entropy. `weights` gives `τ(eₙ)` of the projections carrying `h'₁`.
pub fn thm15_approximant(
    d: &SpectralDensity,
    eps: f64,
    case: Thm15Case,
    weights: &ResolutionOfIdentity,
    lambda_scale: Option<f64>,
) -> Result<Approximant, ConstructionError> {
    if !weights.is_infinite() {
        return Err(pre("the projections must form an infinite family"));
    }
    let start = weights.domain.unbounded_start().unwrap();
    if weights.domain.bounded_ranges().next().is_some() {
        return Err(pre("the index set must be a single range `s..`"));
    }
    let w = weights.weights;
    let cut = thm12_truncation(d, eps)?;
    let (m, big_m) = (cut.m, cut.big_m);

    let (family, scale) = match case {
        Thm15Case::Bounded { c1, c2 } => {
            if !(c1 > 0.0 && c1 <= c2) {
                return Err(pre("case 1 needs 0 < c₁ ≤ c₂"));
            }
            if !w.is_constant() {
                return Err(pre("case 1 needs projections of constant trace"));
            }
            let c = w.coef;
            if c < c1 || c > c2 {
                return Err(pre(format!("projection trace {c} lies outside [{c1}, {c2}]")));
            }
            let family = TailFamily::InverseLogSquare { weight: c };
            let sigma = match lambda_scale {
                Some(s) if s > 0.0 && s.is_finite() => s,
                Some(s) => return Err(pre(format!("lambda scale must be positive, got {s}"))),
                None => {
                    let unit = Tail::new(family.clone(), IndexDomain::from(start.max(2)), SumSettings::default())?;
                    (0.5 * eps / unit.declared.trace).min(1.0)
                }
            };
            (family, sigma)
        }
        Thm15Case::Small | Thm15Case::Large => {
            let small = matches!(case, Thm15Case::Small);
            if !dominated_by_powers_of_two(&w, start, small)? {
                return Err(pre(if small {
                    "case 2 needs τ(eₙ) ≤ 2⁻ⁿ for every n"
                } else {
                    "case 3 needs τ(eₙ) ≥ 2ⁿ for every n"
                }));
            }
            let t = Monomial::new(1.0 / w.coef, -2.0 - w.n_pow, 1.0 / w.base, -w.ln_pow);
            let family = if small && w.n_pow == 0.0 && w.ln_pow == 0.0 && w.base < 1.0 {
                TailFamily::GeometricOverSquare {
                    beta: w.coef,
                    gamma: w.base,
                }
            } else {
                TailFamily::Custom { t, w }
            };
            (family, lambda_scale.unwrap_or(1.0))
        }
    };

    let grid = fresh_grid_label(d);
    let probe = Tail {
        family: family.clone(),
        scale,
        offset: 0.0,
        domain: IndexDomain::from(start.max(family.min_index())),
        grid,
        declared: crate::spectral::TailDeclaration {
            trace: 0.0,
            entropy: EntropyClass::Finite,
        },
    };
    let from = probe.domain.min().unwrap().max(probe.t_rule().monotone_from());
    let in_range = |n: u64| match case {
        Thm15Case::Small => probe.value(n) > big_m,
        _ => probe.value(n) < m,
    };
    let search = SumSettings { cutoff: 10_000 };
    let small_mass = |n: u64, settings: SumSettings| -> Result<f64, SpectralError> {
        let term = probe.kernel_term(|_| 1.0);
        Ok(probe
            .sum_over(&IndexDomain::from(n), &term, probe.trace_class(), settings)?
            .value)
    };
    let n_range = first_index(from, in_range)?;
    let err = std::cell::RefCell::new(None);
    let mut n0 = first_index(n_range, |n| match small_mass(n, search) {
        Ok(v) => v < eps,
        Err(e) => {
            *err.borrow_mut() = Some(e);
            true
        }
    })?;
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    while small_mass(n0, SumSettings::default())? >= eps {
        n0 += 1;
    }
    if n0 > DIRECT_LIMIT {
        return Err(ConstructionError::NotRepresentable(format!(
            "n₀ = {n0} exceeds the index range; pass a smaller lambda scale"
        )));
    }

    let h1_tail = Tail::with_params(family, scale, 0.0, IndexDomain::from(n0), grid, SumSettings::default())?;
    let needed = match case {
        Thm15Case::Small => {
            let term = h1_tail.mass_term();
            h1_tail
                .sum_over(&h1_tail.domain, &term, h1_tail.mass_class(), SumSettings::default())?
                .value
        }
        _ => f64::INFINITY,
    };
    let available = low_spectrum_trace(d, m)?;
    if available < needed {
        return Err(ConstructionError::InsufficientLowSpectrum { needed, available });
    }

    let added = SpectralDensity::new(vec![], vec![h1_tail.clone()], d.total_trace())?;
    let truncated = cut.h_prime;
    let mut tails = truncated.tails().to_vec();
    tails.push(h1_tail);
    let h_prime = SpectralDensity::new(truncated.atoms().to_vec(), tails, d.total_trace())?;
    let distance = l1_distance(d, &h_prime)?;
    let verdict = entropy(&h_prime)?.value.verdict();
    Ok(Approximant {
        h_prime,
        added,
        truncated,
        m,
        big_m,
        n0,
        lambda_scale: scale,
        distance,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Atom;

    #[test]
    fn geometric_selection_is_identity() {
        let seq = lemma13_sequence(&ResolutionOfIdentity::geometric(0.5).unwrap()).unwrap();
        assert_eq!(seq.subsequence(6).unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert!(seq.is_identity_selection().unwrap());
        assert!((seq.total - 1.0).abs() < 1e-15);
        let (tr, _) = seq.partial_sums(200).unwrap();
        assert!((tr - (PI * PI / 6.0 - 1.0 / 200.0)).abs() < 1e-4);
    }

    #[test]
    fn inverse_square_selection() {
        let r = ResolutionOfIdentity::new(Monomial::new(1.0, -2.0, 1.0, 0.0), IndexDomain::from(1)).unwrap();
        let seq = lemma13_sequence(&r).unwrap();
        assert_eq!(seq.subsequence(8).unwrap(), vec![2, 3, 4, 5, 6, 8, 12, 16]);
        assert!(!seq.is_identity_selection().unwrap());
        let (tr, _) = seq.partial_sums(100_000).unwrap();
        assert!(tr <= seq.trace_bound());
    }

    #[test]
    fn selection_errors() {
        let finite = ResolutionOfIdentity::new(Monomial::new(1.0, 0.0, 0.5, 0.0), IndexDomain::range(1, 10)).unwrap();
        assert_eq!(lemma13_sequence(&finite).unwrap_err().code(), "precondition");
        let harmonic = ResolutionOfIdentity::new(Monomial::new(1.0, -1.0, 1.0, 0.0), IndexDomain::from(1)).unwrap();
        assert_eq!(lemma13_sequence(&harmonic).unwrap_err().code(), "precondition");
    }

    #[test]
    fn divergence_sums() {
        assert!((divergence_lower_bound(1_000_000) - 8.10121107089977).abs() < 1e-9);
        let w = divergence_witness(10.0);
        assert_eq!(w.n, Some(15_477_902));
        assert!((divergence_lower_bound_asymptotic(1e8f64.ln()) - divergence_lower_bound(100_000_000)).abs() < 1e-9);
        let w = divergence_witness(100.0);
        assert!(w.n.is_none());
        assert!((w.ln_n - 146.39748085818596).abs() < 1e-9);
        assert!((divergence_witness(1000.0).ln_n - 1444.823017658253).abs() < 1e-8);
    }

    #[test]
    fn truncation_examples() {
        let d = SpectralDensity::from_atoms(&[(0.001, 10.0), (1.0, 1.0), (1000.0, 0.00001)]).unwrap();
        let t = thm12_truncation(&d, 0.02).unwrap();
        assert_eq!(t.h_prime.atoms(), &[Atom::new(1.0, 1.0)]);
        assert!((t.distance - 0.02).abs() < 1e-15);

        let d = SpectralDensity::from_atoms(&[(1.0, 2.0), (1.5, 1.0), (2.0, 0.5)]).unwrap();
        let t = thm12_truncation(&d, 0.01).unwrap();
        assert_eq!(t.h_prime, d);
        assert_eq!(t.distance, 0.0);
    }

    #[test]
    fn truncation_of_log_square_tail() {
        let tail = Tail::with_params(
            TailFamily::InverseLogSquare { weight: 1.0 },
            1.0,
            0.0,
            IndexDomain::from(2),
            0,
            SumSettings::default(),
        )
        .unwrap();
        let d = SpectralDensity::new(vec![Atom::new(1.0, 1.0)], vec![tail], f64::INFINITY).unwrap();
        let t = thm12_truncation(&d, 0.1).unwrap();
        assert!(t.distance < 0.2);
        assert!(t.h_prime.atoms().contains(&Atom::new(1.0, 1.0)));
        assert!(!t.h_prime.has_infinite_spectrum());
        assert!(entropy(&t.h_prime).unwrap().value.is_finite());
    }

    #[test]
    fn counterexample_examples() {
        let r = ResolutionOfIdentity::geometric(0.5).unwrap();
        let d = thm14_counterexample(&r, false).unwrap();
        assert!(matches!(d.tails()[0].family, TailFamily::GeometricOverSquare { .. }));
        assert!((d.trace() - PI * PI / 6.0).abs() < 1e-12);
        assert_eq!(entropy(&d).unwrap().value.class(), EntropyClass::PlusInfinity);
        assert_eq!(d.total_trace(), 1.0);
        let n = thm14_counterexample(&r, true).unwrap();
        assert!((n.trace() - 1.0).abs() < 1e-12);
        assert_eq!(entropy(&n).unwrap().value.class(), EntropyClass::PlusInfinity);
        let finite = ResolutionOfIdentity::new(Monomial::new(1.0, 0.0, 0.5, 0.0), IndexDomain::range(1, 30)).unwrap();
        assert!(thm14_counterexample(&finite, false).is_err());
    }

    fn base_density() -> SpectralDensity {
        SpectralDensity::from_atoms(&[(0.5, 1.0), (2.0, 0.5)]).unwrap()
    }

    #[test]
    fn approximant_bounded_case() {
        let r = ResolutionOfIdentity::new(Monomial::constant(1.0), IndexDomain::from(2)).unwrap();
        let a = thm15_approximant(&base_density(), 0.01, Thm15Case::Bounded { c1: 1.0, c2: 1.0 }, &r, None).unwrap();
        assert_eq!(a.verdict, Verdict::MinusInfinity);
        assert!(a.distance < 0.03);
        let a = thm15_approximant(&base_density(), 0.1, Thm15Case::Bounded { c1: 1.0, c2: 1.0 }, &r, Some(1.0)).unwrap();
        assert_eq!(a.verdict, Verdict::MinusInfinity);
        assert!(a.distance < 0.3);
    }

    #[test]
    fn approximant_small_and_large_cases() {
        let r = ResolutionOfIdentity::geometric(0.5).unwrap();
        let a = thm15_approximant(&base_density(), 0.05, Thm15Case::Small, &r, None).unwrap();
        assert_eq!(a.verdict, Verdict::PlusInfinity);
        assert!(a.distance < 0.15);
        assert!(a.added.trace() < 0.05);
        let r = ResolutionOfIdentity::geometric(2.0).unwrap();
        let a = thm15_approximant(&base_density(), 0.05, Thm15Case::Large, &r, None).unwrap();
        assert_eq!(a.verdict, Verdict::MinusInfinity);
        assert!(a.distance < 0.15);
        let inside = a.truncated.atoms().iter().all(|x| x.value >= a.m && x.value <= a.big_m);
        assert!(inside);
    }

    #[test]
    fn approximant_preconditions() {
        let r = ResolutionOfIdentity::new(Monomial::new(1.0, -2.0, 1.0, 0.0), IndexDomain::from(1)).unwrap();
        let e = thm15_approximant(&base_density(), 0.05, Thm15Case::Small, &r, None).unwrap_err();
        assert_eq!(e.code(), "precondition");
        let finite = SpectralDensity::new(vec![Atom::new(0.5, 1.0)], vec![], 1.5).unwrap();
        let r = ResolutionOfIdentity::geometric(2.0).unwrap();
        let e = thm15_approximant(&finite, 0.05, Thm15Case::Large, &r, None).unwrap_err();
        assert_eq!(e.code(), "insufficient_low_spectrum");
    }
}
