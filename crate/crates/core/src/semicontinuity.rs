//! Per-n forms of the semicontinuity bound chains, evaluated along explicit
//! convergent sequences of spectral densities.

use std::f64::consts::LN_2;

use thiserror::Error;

use crate::entropy::{entropy_with, Verdict};
use crate::numeric::{csum, fmt12};
use crate::regularization::{tau_f_mm_with, RegularizationParams};
use crate::spectral::format::parse_lines;
use crate::spectral::{l1_distance_with, Atom, SpectralDensity, SpectralError, SumSettings};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemicontinuityError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("moment constraint violated at n = {n}: τ(h^{p}) = {moment} > c = {c}")]
    MomentViolation { n: u64, p: f64, moment: f64, c: f64 },
    #[error("sequence does not converge: ‖h_n − h_0‖₁ = {distance} at n = {n}")]
    NotConvergent { n: u64, distance: f64 },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl SemicontinuityError {
    pub fn code(&self) -> &'static str {
        match self {
            SemicontinuityError::Spectral(e) => e.code(),
            SemicontinuityError::MomentViolation { .. } => "moment_violation",
            SemicontinuityError::NotConvergent { .. } => "not_convergent",
            SemicontinuityError::Invalid(_) => "invalid_experiment",
            SemicontinuityError::Parse { .. } => "parse",
        }
    }
}

/// `k(x) = εx − ln ln(1 + eˣ)`; positive exactly where `log(1+u) < u^ε`, `u = eˣ`.
fn log_gap(x: f64, eps: f64) -> f64 {
    let l = if x > 30.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() };
    eps * x - l.ln()
}

/// Smallest `r ≥ 0` with `log(1+u) ≤ u^ε` for all `u ≥ r`.
pub fn r_eps(eps: f64) -> f64 {
    assert!(eps > 0.0 && eps <= 1.0, "r_eps needs 0 < ε ≤ 1, got {eps}");
    if eps >= 1.0 {
        return 0.0;
    }
    // k is increasing beyond x = 1/ε, so the last sign change lies below the
    // first positive point past it.
    let mut hi = (1.0 / eps).max(1.0);
    while log_gap(hi, eps) <= 0.0 {
        hi *= 2.0;
    }
    let lo_x = -40.0;
    let steps = 200_000usize;
    let h = (hi - lo_x) / steps as f64;
    let mut last_nonpos = None;
    for i in (0..=steps).rev() {
        let x = lo_x + h * i as f64;
        if log_gap(x, eps) <= 0.0 {
            last_nonpos = Some(x);
            break;
        }
    }
    let Some(mut a) = last_nonpos else {
        return 0.0;
    };
    let mut b = (a + h).min(hi);
    // Relative tolerance 1e-10 on u is an absolute tolerance on ln u.
    while b - a > 1e-11 {
        let mid = 0.5 * (a + b);
        if log_gap(mid, eps) <= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    b.exp()
}

/// Worst value of `log(1−u) + 2 log 2 · u` over a uniform grid on `[0, ½]`;
/// the inequality `log(1−u) ≥ −(2 log 2) u` holds iff this is `≥ 0` (up to rounding).
pub fn log1m_grid_check(points: usize) -> f64 {
    (0..=points)
        .map(|i| {
            let u = 0.5 * i as f64 / points as f64;
            (-u).ln_1p() + 2.0 * LN_2 * u
        })
        .fold(f64::INFINITY, f64::min)
}

/// `τ(h^p)`; `+∞` when a tail series diverges.
pub fn moment(d: &SpectralDensity, p: f64) -> Result<f64, SpectralError> {
    moment_with(d, p, SumSettings::default())
}

pub fn moment_with(d: &SpectralDensity, p: f64, settings: SumSettings) -> Result<f64, SpectralError> {
    let mut parts = vec![csum(
        d.atoms()
            .iter()
            .filter(|a| a.value > 0.0)
            .map(|a| a.value.powf(p) * a.weight),
    )];
    for tail in d.tails() {
        let term = tail.moment_term(p);
        parts.push(tail.sum_over(&tail.domain, &term, tail.moment_class(p), settings)?.value);
    }
    Ok(csum(parts))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheckRow {
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl BoundCheckRow {
    pub const CSV_HEADER: &'static str = "n,lhs,rhs,slack";

    pub fn holds(&self) -> bool {
        self.slack >= -1e-9
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.n, fmt12(self.lhs), fmt12(self.rhs), fmt12(self.slack))
    }
}

/// `a^{1−ε} τ(e([a,∞))) ≤ τ(h^{1−ε})`.
pub fn tail_mass_inequality_check(d: &SpectralDensity, a: f64, eps: f64) -> Result<BoundCheckRow, SpectralError> {
    let lhs = a.powf(1.0 - eps) * d.mass_at_or_above(a)?;
    let rhs = moment(d, 1.0 - eps)?;
    Ok(BoundCheckRow {
        n: 0,
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Upper,
    Lower,
    LowerFinite,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Upper => "upper",
            Mode::Lower => "lower",
            Mode::LowerFinite => "lower_finite",
        }
    }

    pub fn parse(s: &str) -> Result<Mode, String> {
        match s {
            "upper" => Ok(Mode::Upper),
            "lower" => Ok(Mode::Lower),
            "lower_finite" => Ok(Mode::LowerFinite),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }

    /// The moment exponent constrained in this mode.
    pub fn moment_power(self, eps: f64) -> Option<f64> {
        match self {
            Mode::Upper => Some(1.0 + eps),
            Mode::Lower => Some(1.0 - eps),
            Mode::LowerFinite => None,
        }
    }
}

/// `h_n` as a deterministic function of `h_0` and `n`, with `δ_n = amp / n^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceRule {
    Constant,
    /// Moves atom `index` of `h_0` to `t + δ_n`.
    PerturbAtom { index: usize, amp: f64, power: f64 },
    /// `(1 + δ_n) h_0`.
    ScaleTo { amp: f64, power: f64 },
    /// `h_0` plus an extra atom `(δ_n, weight)`.
    VanishingAtom { weight: f64, amp: f64, power: f64 },
}

impl SequenceRule {
    pub fn parse(args: &str) -> Result<SequenceRule, String> {
        let mut words = args.split_whitespace();
        let family = words.next().ok_or("missing sequence family")?;
        let mut kv = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| format!("expected key=value, got `{w}`"))?;
            let v: f64 = v.parse().map_err(|_| format!("invalid {k} `{v}`"))?;
            kv.insert(k.to_string(), v);
        }
        let mut get = |k: &str, default: Option<f64>| {
            kv.remove(k)
                .or(default)
                .ok_or_else(|| format!("missing sequence parameter `{k}`"))
        };
        let rule = match family {
            "constant" => SequenceRule::Constant,
            "perturb_atom" => {
                let index = get("index", Some(0.0))?;
                if index < 0.0 || index.fract() != 0.0 {
                    return Err(format!("invalid index {index}"));
                }
                SequenceRule::PerturbAtom {
                    index: index as usize,
                    amp: get("amp", None)?,
                    power: get("power", Some(1.0))?,
                }
            }
            "scale_to" => SequenceRule::ScaleTo {
                amp: get("amp", None)?,
                power: get("power", Some(1.0))?,
            },
            "vanishing_atom" => SequenceRule::VanishingAtom {
                weight: get("weight", None)?,
                amp: get("amp", Some(1.0))?,
                power: get("power", Some(1.0))?,
            },
            other => return Err(format!("unknown sequence family `{other}`")),
        };
        if let Some(k) = kv.keys().next() {
            return Err(format!("unknown sequence parameter `{k}`"));
        }
        Ok(rule)
    }

    pub fn describe(&self) -> String {
        match *self {
            SequenceRule::Constant => "constant".into(),
            SequenceRule::PerturbAtom { index, amp, power } => {
                format!("perturb_atom index={index} amp={amp} power={power}")
            }
            SequenceRule::ScaleTo { amp, power } => format!("scale_to amp={amp} power={power}"),
            SequenceRule::VanishingAtom { weight, amp, power } => {
                format!("vanishing_atom weight={weight} amp={amp} power={power}")
            }
        }
    }

    pub fn member(&self, h0: &SpectralDensity, n: u64) -> Result<SpectralDensity, SpectralError> {
        let delta = |amp: f64, power: f64| amp / (n as f64).powf(power);
        match *self {
            SequenceRule::Constant => Ok(h0.clone()),
            SequenceRule::PerturbAtom { index, amp, power } => {
                let mut atoms = h0.atoms().to_vec();
                let a = atoms.get_mut(index).ok_or_else(|| {
                    SpectralError::Precondition(format!("h0 has no atom with index {index}"))
                })?;
                a.value += delta(amp, power);
                SpectralDensity::new(atoms, h0.tails().to_vec(), h0.total_trace())
            }
            SequenceRule::ScaleTo { amp, power } => h0.scale(1.0 + delta(amp, power)),
            SequenceRule::VanishingAtom { weight, amp, power } => {
                let mut atoms = h0.atoms().to_vec();
                atoms.push(Atom::new(delta(amp, power), weight));
                SpectralDensity::new(atoms, h0.tails().to_vec(), h0.total_trace())
            }
        }
    }
}

/// Index at which convergence in trace norm is verified.
pub const CONVERGENCE_INDEX: u64 = 1_000_000_000;
pub const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub h0: SpectralDensity,
    pub sequence: SequenceRule,
    pub epsilon: f64,
    /// `None` means the supremum of the constrained moment over the generated terms.
    pub c: Option<f64>,
    pub mode: Mode,
    pub n_max: u64,
    pub ms: Vec<f64>,
    pub big_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemicontinuityExperiment {
    pub h0: SpectralDensity,
    pub sequence: SequenceRule,
    pub epsilon: f64,
    pub c: f64,
    pub mode: Mode,
    pub n_max: u64,
    pub ms: Vec<f64>,
    pub big_ms: Vec<f64>,
    pub r: f64,
    /// `‖h_N − h_0‖₁` at `N = CONVERGENCE_INDEX`.
    pub convergence_distance: f64,
    pub sums: SumSettings,
}

impl SemicontinuityExperiment {
    pub fn new(spec: ExperimentSpec) -> Result<Self, SemicontinuityError> {
        Self::with_settings(spec, SumSettings::default())
    }

    pub fn with_settings(spec: ExperimentSpec, sums: SumSettings) -> Result<Self, SemicontinuityError> {
        let ExperimentSpec {
            h0,
            sequence,
            epsilon,
            c,
            mode,
            n_max,
            ms,
            big_ms,
        } = spec;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(SemicontinuityError::Invalid(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        if n_max == 0 {
            return Err(SemicontinuityError::Invalid("n_max must be at least 1".into()));
        }
        if ms.is_empty() || big_ms.is_empty() {
            return Err(SemicontinuityError::Invalid("need at least one m and one M".into()));
        }
        for &m in &ms {
            for &big_m in &big_ms {
                if !(m > 0.0 && m < big_m && big_m.is_finite()) {
                    return Err(SemicontinuityError::Invalid(format!("need 0 < m < M < ∞, got m={m}, M={big_m}")));
                }
                if mode != Mode::Upper && big_m < 1.0 {
                    return Err(SemicontinuityError::Invalid(format!("lower modes need M ≥ 1, got {big_m}")));
                }
            }
        }
        if mode == Mode::LowerFinite && !h0.total_trace().is_finite() {
            return Err(SemicontinuityError::Invalid(
                "lower_finite needs an algebra of finite total trace".into(),
            ));
        }
        if let Some(c) = c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(SemicontinuityError::Invalid(format!("c must be positive, got {c}")));
            }
        }

        let c = match mode.moment_power(epsilon) {
            Some(p) => {
                let mut sup = moment_with(&h0, p, sums)?;
                if let Some(c) = c {
                    if sup > c {
                        return Err(SemicontinuityError::MomentViolation { n: 0, p, moment: sup, c });
                    }
                }
                for n in 1..=n_max {
                    let mu = moment_with(&sequence.member(&h0, n)?, p, sums)?;
                    if let Some(c) = c {
                        if mu > c {
                            return Err(SemicontinuityError::MomentViolation { n, p, moment: mu, c });
                        }
                    }
                    sup = sup.max(mu);
                }
                match c {
                    Some(c) => c,
                    None if sup.is_finite() && sup > 0.0 => sup,
                    None => {
                        return Err(SemicontinuityError::Invalid(format!(
                            "cannot choose c automatically: sup of moments is {sup}"
                        )))
                    }
                }
            }
            None => c.unwrap_or(f64::NAN),
        };

        let far = sequence.member(&h0, CONVERGENCE_INDEX)?;
        let convergence_distance = l1_distance_with(&far, &h0, sums)?;
        if !(convergence_distance < CONVERGENCE_TOL) {
            return Err(SemicontinuityError::NotConvergent {
                n: CONVERGENCE_INDEX,
                distance: convergence_distance,
            });
        }
        Ok(Self {
            h0,
            sequence,
            epsilon,
            c,
            mode,
            n_max,
            ms,
            big_ms,
            r: r_eps(epsilon),
            convergence_distance,
            sums,
        })
    }

    pub fn member(&self, n: u64) -> Result<SpectralDensity, SpectralError> {
        self.sequence.member(&self.h0, n)
    }

    /// Everything about `h_n` the bounds need, independent of `(m, M)`.
    pub fn evaluate(&self, n: u64) -> Result<MemberEval, SemicontinuityError> {
        let h = self.member(n)?;
        let report = entropy_with(&h, self.sums)?;
        let lhs = match report.value.verdict() {
            Verdict::Undefined => {
                return Err(SemicontinuityError::Invalid(format!("entropy of h_{n} is undefined")))
            }
            _ => report.value.value(),
        };
        Ok(MemberEval {
            n,
            h,
            entropy: lhs,
            trace: report.trace,
        })
    }

    fn reg(&self, m: f64, big_m: f64) -> Result<RegularizationParams, SemicontinuityError> {
        RegularizationParams::new(m, big_m).map_err(|e| SemicontinuityError::Invalid(e.to_string()))
    }

    /// `τ(f_{m,M}(h_0))`.
    pub fn tau_f_h0(&self, m: f64, big_m: f64) -> Result<f64, SemicontinuityError> {
        Ok(tau_f_mm_with(&self.h0, &self.reg(m, big_m)?, self.sums)?)
    }

    /// The bound row for one member, reusing `τ(f_{m,M}(h_0))`.
    pub fn check_member(
        &self,
        eval: &MemberEval,
        m: f64,
        big_m: f64,
        tau_f_h0: f64,
    ) -> Result<BoundCheckRow, SemicontinuityError> {
        let eps = self.epsilon;
        let tau_f_hn = tau_f_mm_with(&eval.h, &self.reg(m, big_m)?, self.sums)?;
        let delta = tau_f_hn - tau_f_h0;
        let tr = eval.trace;
        let lhs = eval.entropy;
        let (rhs, slack) = match self.mode {
            Mode::Upper => {
                let rhs = csum([
                    (m + 1.0).ln() * tr,
                    self.c * (self.r.powf(1.0 - eps) + 1.0) / big_m.powf(eps),
                    delta,
                    tau_f_h0,
                ]);
                (rhs, rhs - lhs)
            }
            Mode::Lower | Mode::LowerFinite => {
                let first = match self.mode {
                    Mode::Lower => -self.c * (1.0 + self.r.powf(1.0 - eps)) * m.powf(eps),
                    _ => -m * self.h0.total_trace(),
                };
                let rhs = csum([
                    first,
                    (m + 1.0).ln() * tr,
                    -2.0 * LN_2 / (big_m + 1.0) * tr,
                    delta,
                    tau_f_h0,
                ]);
                (rhs, lhs - rhs)
            }
        };
        Ok(BoundCheckRow {
            n: eval.n,
            lhs,
            rhs,
            slack,
        })
    }

    fn check_mode(&self, want: Mode, m: f64, big_m: f64, n: u64) -> Result<BoundCheckRow, SemicontinuityError> {
        if self.mode != want {
            return Err(SemicontinuityError::Invalid(format!(
                "experiment is in {} mode, not {}",
                self.mode.as_str(),
                want.as_str()
            )));
        }
        let eval = self.evaluate(n)?;
        self.check_member(&eval, m, big_m, self.tau_f_h0(m, big_m)?)
    }

    pub fn usc_bound_check(&self, m: f64, big_m: f64, n: u64) -> Result<BoundCheckRow, SemicontinuityError> {
        self.check_mode(Mode::Upper, m, big_m, n)
    }

    pub fn lsc_bound_check(&self, m: f64, big_m: f64, n: u64) -> Result<BoundCheckRow, SemicontinuityError> {
        self.check_mode(Mode::Lower, m, big_m, n)
    }

    pub fn lsc_finite_bound_check(&self, m: f64, big_m: f64, n: u64) -> Result<BoundCheckRow, SemicontinuityError> {
        self.check_mode(Mode::LowerFinite, m, big_m, n)
    }

    /// Distance between the limiting bound at `m = 1/M` and `H(h_0)`:
    /// the amount by which the bound can exceed (upper) or fall short of
    /// (lower modes) the entropy of the limit.
    pub fn delta(&self, big_m: f64) -> Result<f64, SemicontinuityError> {
        let m = 1.0 / big_m;
        let eps = self.epsilon;
        let h0 = entropy_with(&self.h0, self.sums)?;
        let tr = self.h0.trace_with(self.sums)?;
        let tf = self.tau_f_h0(m, big_m)?;
        let h = h0.value.value();
        Ok(match self.mode {
            Mode::Upper => (m + 1.0).ln() * tr + self.c * (self.r.powf(1.0 - eps) + 1.0) / big_m.powf(eps) + tf - h,
            Mode::Lower | Mode::LowerFinite => {
                let first = match self.mode {
                    Mode::Lower => -self.c * (1.0 + self.r.powf(1.0 - eps)) * m.powf(eps),
                    _ => -m * self.h0.total_trace(),
                };
                h - (first + (m + 1.0).ln() * tr - 2.0 * LN_2 / (big_m + 1.0) * tr + tf)
            }
        })
    }

    /// `δ(M)` together with the extreme `τ(f(h_n))` over `n ∈ [N/2, N]`.
    pub fn trend(&self, big_ms: &[f64]) -> Result<Vec<TrendRow>, SemicontinuityError> {
        let lo = (self.n_max / 2).max(1);
        let mut extreme = match self.mode {
            Mode::Upper => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        };
        for n in lo..=self.n_max {
            let e = self.evaluate(n)?.entropy;
            extreme = match self.mode {
                Mode::Upper => extreme.max(e),
                _ => extreme.min(e),
            };
        }
        big_ms
            .iter()
            .map(|&big_m| {
                Ok(TrendRow {
                    big_m,
                    delta: self.delta(big_m)?,
                    extreme_lhs: extreme,
                })
            })
            .collect()
    }

    /// All rows, ordered by `m`, then `M`, then `n`.
    pub fn run(&self) -> Result<Vec<GridRows>, SemicontinuityError> {
        let evals = (1..=self.n_max)
            .map(|n| self.evaluate(n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::new();
        for &m in &self.ms {
            for &big_m in &self.big_ms {
                let tf0 = self.tau_f_h0(m, big_m)?;
                let rows = evals
                    .iter()
                    .map(|e| self.check_member(e, m, big_m, tf0))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(GridRows { m, big_m, rows });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberEval {
    pub n: u64,
    pub h: SpectralDensity,
    /// `τ(f(h_n))` as an extended real.
    pub entropy: f64,
    pub trace: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRows {
    pub m: f64,
    pub big_m: f64,
    pub rows: Vec<BoundCheckRow>,
}

impl GridRows {
    pub fn min_slack(&self) -> f64 {
        self.rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendRow {
    pub big_m: f64,
    pub delta: f64,
    pub extreme_lhs: f64,
}

fn parse_list(args: &str) -> Result<Vec<f64>, String> {
    args.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("invalid number `{s}`")))
        .collect()
}

/// Experiment file: an `h_0` density followed or preceded by the directives
/// `!mode`, `!epsilon`, `!c <value|auto>`, `!n_max`, `!sequence <family> k=v ...`,
/// `!m <list>`, `!M <list>`.
pub fn parse_experiment(text: &str) -> Result<ExperimentSpec, SemicontinuityError> {
    let mut mode = None;
    let mut epsilon = None;
    let mut c = None;
    let mut n_max = None;
    let mut sequence = None;
    let mut ms = None;
    let mut big_ms = None;
    let raw = parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)), &mut |name, args| {
        fn once<T>(slot: &mut Option<T>, v: T) -> Result<(), String> {
            if slot.is_some() {
                return Err("given twice".into());
            }
            *slot = Some(v);
            Ok(())
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("invalid number `{s}`"));
        match name {
            "mode" => once(&mut mode, Mode::parse(args)?),
            "epsilon" => once(&mut epsilon, num(args)?),
            "c" => once(&mut c, if args == "auto" { None } else { Some(num(args)?) }),
            "n_max" => once(&mut n_max, args.parse::<u64>().map_err(|_| format!("invalid n_max `{args}`"))?),
            "sequence" => once(&mut sequence, SequenceRule::parse(args)?),
            "m" => once(&mut ms, parse_list(args)?),
            "M" => once(&mut big_ms, parse_list(args)?),
            _ => Err("unknown directive".into()),
        }
    })
    .map_err(|e| match e {
        SpectralError::Parse { line, msg } => SemicontinuityError::Parse { line, msg },
        other => other.into(),
    })?;
    let missing = |what: &str| SemicontinuityError::Invalid(format!("missing `!{what}`"));
    Ok(ExperimentSpec {
        h0: raw.into_density()?,
        sequence: sequence.ok_or_else(|| missing("sequence"))?,
        epsilon: epsilon.ok_or_else(|| missing("epsilon"))?,
        c: c.ok_or_else(|| missing("c"))?,
        mode: mode.ok_or_else(|| missing("mode"))?,
        n_max: n_max.ok_or_else(|| missing("n_max"))?,
        ms: ms.ok_or_else(|| missing("m"))?,
        big_ms: big_ms.ok_or_else(|| missing("M"))?,
    })
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn threshold_shrinks_as_eps_grows(a in 0.08f64..1.0, b in 0.08f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(r_eps(hi) <= r_eps(lo) * (1.0 + 1e-9));
        }

        #[test]
        fn inequality_holds_past_threshold(eps in 0.08f64..0.95, k in 0f64..8.0) {
            let u = r_eps(eps) * 10f64.powf(k);
            prop_assert!(u.ln_1p() <= u.powf(eps) * (1.0 + 1e-9));
        }
    }
}
