//! The regularization `f_{m,M}(t) = t log[(M+1)(m+t) / ((m+1)(M+t))]`, its
//! trace, the integral-representation oracle and the Lipschitz modulus.

use thiserror::Error;

use crate::entropy::{entropy_with, Verdict};
use crate::numeric::{csum, fmt12};
use crate::quadrature::{integrate, QuadratureError, QuadratureSettings};
use crate::spectral::{SpectralDensity, SpectralError, SumSettings};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegularizationError {
    #[error("need 0 < m < M < ∞, got m = {m}, M = {big_m}")]
    InvalidParams { m: f64, big_m: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("the oracle needs finitely many spectral points")]
    InfiniteSpectrum,
    #[error("sweep grid must be ascending with every M > 1")]
    BadGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationParams {
    pub m: f64,
    pub big_m: f64,
    pub quadrature: QuadratureSettings,
}

impl RegularizationParams {
    pub fn new(m: f64, big_m: f64) -> Result<Self, RegularizationError> {
        if !(m > 0.0 && m < big_m && big_m.is_finite()) {
            return Err(RegularizationError::InvalidParams { m, big_m });
        }
        Ok(Self {
            m,
            big_m,
            quadrature: QuadratureSettings::default(),
        })
    }

    /// The `m = 1/M` pair.
    pub fn symmetric(big_m: f64) -> Result<Self, RegularizationError> {
        Self::new(1.0 / big_m, big_m)
    }

    pub fn with_quadrature(self, quadrature: QuadratureSettings) -> Self {
        Self { quadrature, ..self }
    }
}

/// `log[(M+1)(m+t)/((m+1)(M+t))]` as a function of `ln t`.
pub fn log_ratio(ln_t: f64, m: f64, big_m: f64) -> f64 {
    if ln_t > 40.0 {
        let inv = (-ln_t).exp();
        ((big_m + 1.0) / (m + 1.0)).ln() + (m * inv).ln_1p() - (big_m * inv).ln_1p()
    } else {
        let t = ln_t.exp();
        ((t - 1.0) / (m + 1.0)).ln_1p() - ((t - 1.0) / (big_m + 1.0)).ln_1p()
    }
}

pub fn f_mm_scalar(t: f64, p: &RegularizationParams) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t * log_ratio(t.ln(), p.m, p.big_m)
}

/// `τ(f_{m,M}(h))`.
pub fn tau_f_mm(d: &SpectralDensity, p: &RegularizationParams) -> Result<f64, SpectralError> {
    tau_f_mm_with(d, p, SumSettings::default())
}

pub fn tau_f_mm_with(
    d: &SpectralDensity,
    p: &RegularizationParams,
    settings: SumSettings,
) -> Result<f64, SpectralError> {
    let mut parts = vec![csum(d.atoms().iter().map(|a| f_mm_scalar(a.value, p) * a.weight))];
    let (m, big_m) = (p.m, p.big_m);
    for tail in d.tails() {
        let term = tail.kernel_term(move |lv| log_ratio(lv, m, big_m));
        // |f_{m,M}(t)| ≤ L·t, so the summand is dominated by the trace series.
        parts.push(tail.sum_over(&tail.domain, &term, tail.trace_class(), settings)?.value);
    }
    Ok(csum(parts))
}

/// `∫_m^M Σ wᵢ (tᵢ/(s+1) − tᵢ/(s+tᵢ)) ds`, integrated in `u = ln s`.
pub fn tau_f_mm_quadrature_oracle(
    d: &SpectralDensity,
    p: &RegularizationParams,
) -> Result<f64, RegularizationError> {
    let pts = d.finite_points().ok_or(RegularizationError::InfiniteSpectrum)?;
    let integrand = |u: f64| {
        let s = u.exp();
        s * csum(pts.iter().map(|&(t, w)| w * t * (t - 1.0) / ((s + 1.0) * (s + t))))
    };
    let r = integrate(integrand, p.m.ln(), p.big_m.ln(), p.quadrature)?;
    Ok(r.value)
}

/// `∫_m^M (1/(s+1) + 1/s) ds = log((M+1)/(m+1)) + log(M/m)`.
pub fn lipschitz_modulus(p: &RegularizationParams) -> f64 {
    ((p.big_m + 1.0) / (p.m + 1.0)).ln() + (p.big_m / p.m).ln()
}

/// The same integral by quadrature.
pub fn lipschitz_modulus_numeric(p: &RegularizationParams) -> Result<f64, QuadratureError> {
    let settings = QuadratureSettings {
        abs_tol: 1e-13,
        ..p.quadrature
    };
    Ok(integrate(|s| 1.0 / (s + 1.0) + 1.0 / s, p.m, p.big_m, settings)?.value)
}

/// `t ≤ (Mt+1)/(M+t) ≤ 1` on `[0,1]` and `1 ≤ (Mt+1)/(M+t) ≤ t` on `[1,∞)`.
pub fn sandwich_holds(t: f64, big_m: f64) -> bool {
    let q = (big_m * t + 1.0) / (big_m + t);
    let tol = 1e-12 * t.max(1.0);
    if t <= 1.0 {
        t <= q + tol && q <= 1.0 + tol
    } else {
        1.0 <= q + tol && q <= t + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVerdict {
    Converging,
    DivergingUp,
    DivergingDown,
    /// The grid did not meet the configured threshold.
    Inconclusive,
}

impl SweepVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVerdict::Converging => "converging",
            SweepVerdict::DivergingUp => "diverging_up",
            SweepVerdict::DivergingDown => "diverging_down",
            SweepVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub big_m: f64,
    pub tau_f: f64,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub entropy: crate::entropy::ExtendedEntropyValue,
    pub verdict: SweepVerdict,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "M,tau_f,gap";

    pub fn csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let gap = r.gap.map(fmt12).unwrap_or_else(|| "n/a".into());
            s.push_str(&format!("{},{},{}\n", fmt12(r.big_m), fmt12(r.tau_f), gap));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub convergence_threshold: f64,
    pub divergence_threshold: f64,
    pub sums: SumSettings,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            convergence_threshold: 1e-2,
            divergence_threshold: 1e3,
            sums: SumSettings::default(),
        }
    }
}

/// One sweep row; rows are independent of each other.
pub fn sweep_row(
    d: &SpectralDensity,
    big_m: f64,
    h: Option<f64>,
    sums: SumSettings,
) -> Result<SweepRow, RegularizationError> {
    let p = RegularizationParams::symmetric(big_m)?;
    let tau_f = tau_f_mm_with(d, &p, sums)?;
    Ok(SweepRow {
        big_m,
        tau_f,
        gap: h.map(|h| (tau_f - h).abs()),
    })
}

fn check_grid(ms: &[f64]) -> Result<(), RegularizationError> {
    if ms.is_empty() || ms.iter().any(|&m| !(m > 1.0 && m.is_finite())) || ms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RegularizationError::BadGrid);
    }
    Ok(())
}

/// Verdict of a completed set of rows.
pub fn classify_sweep(rows: &[SweepRow], h: Verdict, cfg: &SweepConfig) -> SweepVerdict {
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else {
        return SweepVerdict::Inconclusive;
    };
    match h {
        Verdict::Finite(_) => {
            let (g0, g1) = (first.gap.unwrap_or(f64::INFINITY), last.gap.unwrap_or(f64::INFINITY));
            let shrinking = g1 < g0 || (g0 == 0.0 && g1 == 0.0);
            if shrinking && g1 < cfg.convergence_threshold {
                SweepVerdict::Converging
            } else {
                SweepVerdict::Inconclusive
            }
        }
        Verdict::PlusInfinity if last.tau_f > cfg.divergence_threshold => SweepVerdict::DivergingUp,
        Verdict::MinusInfinity if last.tau_f < -cfg.divergence_threshold => SweepVerdict::DivergingDown,
        _ => SweepVerdict::Inconclusive,
    }
}

/// Rows of `τ(f_{1/M,M}(h))` over an ascending grid.
pub fn lemma1_sweep(d: &SpectralDensity, ms: &[f64], cfg: &SweepConfig) -> Result<SweepResult, RegularizationError> {
    check_grid(ms)?;
    let entropy = entropy_with(d, cfg.sums)?.value;
    let h = match entropy.verdict() {
        Verdict::Finite(v) => Some(v),
        _ => None,
    };
    let rows = ms
        .iter()
        .map(|&m| sweep_row(d, m, h, cfg.sums))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult {
        verdict: classify_sweep(&rows, entropy.verdict(), cfg),
        rows,
        entropy,
    })
}

/// Sweep over `M = start·10^k` until the divergence threshold is crossed
/// (infinite entropy) or the gap drops below the convergence threshold, or
/// `max_m` is reached.
pub fn extended_sweep(
    d: &SpectralDensity,
    start: f64,
    max_m: f64,
    cfg: &SweepConfig,
) -> Result<SweepResult, RegularizationError> {
    check_grid(&[start])?;
    let entropy = entropy_with(d, cfg.sums)?.value;
    let verdict = entropy.verdict();
    let h = match verdict {
        Verdict::Finite(v) => Some(v),
        _ => None,
    };
    let mut rows = Vec::new();
    let mut m = start;
    while m <= max_m {
        let row = sweep_row(d, m, h, cfg.sums)?;
        rows.push(row);
        if classify_sweep(&rows, verdict, cfg) != SweepVerdict::Inconclusive {
            break;
        }
        m *= 10.0;
    }
    Ok(SweepResult {
        verdict: classify_sweep(&rows, verdict, cfg),
        rows,
        entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn atoms(p: &[(f64, f64)]) -> SpectralDensity {
        SpectralDensity::from_atoms(p).unwrap()
    }

    #[test]
    fn scalar_values() {
        let p = RegularizationParams::new(0.01, 100.0).unwrap();
        assert_eq!(f_mm_scalar(1.0, &p), 0.0);
        assert_eq!(f_mm_scalar(0.0, &p), 0.0);
        assert!((f_mm_scalar(E, &p) - 2.655359359091088).abs() < 1e-14);
        let q = RegularizationParams::new(0.3, 7.0).unwrap();
        for t in [1e-9, 0.2, 0.9, 1.1, 5.0, 1e8, 1e20] {
            let direct = t * (((q.big_m + 1.0) * (q.m + t)) / ((q.m + 1.0) * (q.big_m + t))).ln();
            assert!((f_mm_scalar(t, &q) - direct).abs() <= 1e-13 * direct.abs().max(1e-300), "t={t}");
        }
    }

    #[test]
    fn trace_examples() {
        let p = RegularizationParams::new(0.01, 10.0).unwrap();
        assert_eq!(tau_f_mm(&atoms(&[(1.0, 7.0)]), &p).unwrap(), 0.0);
        let d = atoms(&[(2.0, 0.5), (0.5, 1.0)]);
        assert!((tau_f_mm(&d, &p).unwrap() - 0.28278557998716612).abs() < 1e-14);
        let p = RegularizationParams::new(0.5, 2.0).unwrap();
        assert!((tau_f_mm(&d, &p).unwrap() - 0.11157177565710488).abs() < 1e-14);
    }

    #[test]
    fn oracle_agrees() {
        let p = RegularizationParams::new(0.01, 100.0).unwrap();
        let d = atoms(&[(E, 1.0)]);
        let oracle = tau_f_mm_quadrature_oracle(&d, &p).unwrap();
        assert!((oracle - tau_f_mm(&d, &p).unwrap()).abs() < 1e-8);
        assert_eq!(tau_f_mm_quadrature_oracle(&atoms(&[(1.0, 1.0)]), &p).unwrap(), 0.0);
        let p = RegularizationParams::new(0.5, 2.0).unwrap();
        let d = atoms(&[(2.0, 0.5), (0.5, 1.0)]);
        let oracle = tau_f_mm_quadrature_oracle(&d, &p).unwrap();
        assert!((oracle - tau_f_mm(&d, &p).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn lipschitz_examples() {
        let p = RegularizationParams::new(0.5, 2.0).unwrap();
        assert!((lipschitz_modulus(&p) - 8f64.ln()).abs() < 1e-15);
        assert!((lipschitz_modulus_numeric(&p).unwrap() - 8f64.ln()).abs() < 1e-10);
        let p = RegularizationParams::new(0.01, 100.0).unwrap();
        assert!((lipschitz_modulus(&p) - 13.815510557964274).abs() < 1e-12);
        let m = 0.37;
        let p = RegularizationParams::new(m, m * (1.0 + 1e-9)).unwrap();
        assert!(lipschitz_modulus(&p) < 1e-8);
    }

    #[test]
    fn sandwich_on_grid() {
        for big_m in [2.0, 10.0, 1e3] {
            for k in -600..=600 {
                assert!(sandwich_holds(10f64.powf(k as f64 / 100.0), big_m));
            }
        }
    }

    #[test]
    fn sweep_on_atom_e() {
        let r = lemma1_sweep(&atoms(&[(E, 1.0)]), &[10.0, 100.0, 1000.0, 1e4], &SweepConfig::default()).unwrap();
        let gaps: Vec<f64> = r.rows.iter().map(|r| r.gap.unwrap()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps[3] < 1e-3);
        assert!((r.rows[1].tau_f - 2.65535935909).abs() < 1e-10);
        assert_eq!(r.verdict, SweepVerdict::Converging);
    }

    #[test]
    fn sweep_on_unit_atom() {
        let r = lemma1_sweep(&atoms(&[(1.0, 1.0)]), &[10.0, 100.0], &SweepConfig::default()).unwrap();
        assert!(r.rows.iter().all(|r| r.tau_f == 0.0 && r.gap == Some(0.0)));
        assert_eq!(r.verdict, SweepVerdict::Converging);
    }

    #[test]
    fn bad_grid() {
        let d = atoms(&[(1.0, 1.0)]);
        assert!(lemma1_sweep(&d, &[100.0, 10.0], &SweepConfig::default()).is_err());
        assert!(lemma1_sweep(&d, &[0.5], &SweepConfig::default()).is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::spectral::l1_distance;
    use proptest::prelude::*;

    fn params() -> impl Strategy<Value = RegularizationParams> {
        (-3f64..-0.01, 0.01f64..3.0).prop_map(|(a, b)| RegularizationParams::new(10f64.powf(a), 10f64.powf(b)).unwrap())
    }

    proptest! {
        #[test]
        fn scalar_is_lipschitz(p in params(), s in 0f64..1e3, t in 0f64..1e3) {
            let l = lipschitz_modulus(&p);
            let gap = (f_mm_scalar(s, &p) - f_mm_scalar(t, &p)).abs();
            prop_assert!(gap <= l * (s - t).abs() + 1e-10 * (1.0 + s.max(t)));
        }

        #[test]
        fn trace_functional_is_lipschitz_in_l1(
            p in params(),
            a in prop::collection::vec((1e-3f64..1e3, 1e-3f64..10.0, 0.5f64..2.0, 0.5f64..1.5), 1..8),
        ) {
            let d1 = SpectralDensity::from_atoms(&a.iter().map(|x| (x.0, x.1)).collect::<Vec<_>>()).unwrap();
            let d2 = SpectralDensity::from_atoms(&a.iter().map(|x| (x.0 * x.2, x.1 * x.3)).collect::<Vec<_>>()).unwrap();
            let lhs = (tau_f_mm(&d1, &p).unwrap() - tau_f_mm(&d2, &p).unwrap()).abs();
            let dist = l1_distance(&d1, &d2).unwrap();
            prop_assert!(lhs <= lipschitz_modulus(&p) * dist + 1e-9);
        }

        #[test]
        fn sandwich_everywhere(t in 0f64..1e6, lm in 0.01f64..6.0) {
            prop_assert!(sandwich_holds(t, 10f64.powf(lm)));
        }
    }
}
