use std::path::PathBuf;

use clap::{Args, ValueEnum};

use segal_core::constructions::{
    divergence_witness, lemma13_sequence, thm12_truncation, thm14_counterexample, thm15_approximant,
    ResolutionOfIdentity, Thm15Case,
};
use segal_core::entropy::{entropy_with, Verdict};
use segal_core::spectral::format::write_density;
use segal_core::spectral::{EntropyClass, IndexDomain, Monomial, SpectralDensity};

use crate::output::{emit, Kv};
use crate::spectral::{load_density, sums};
use crate::{input, CliError, Format, Global};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Finite-entropy truncation e([m,M])h within 2ε.
    Thm12,
    /// Infinite-entropy element from an infinite resolution of the identity.
    Thm14,
    /// Infinite-entropy approximant within 3ε.
    Thm15,
    /// Divergent-series sequence and its divergence witness.
    Lemma13,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    pub kind: Kind,
    /// Density to approximate (truncation and approximant kinds).
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Projection traces: `geometric:<b>`, `constant:<c>`, `power:<p>` or `monomial:<coef>,<npow>,<base>,<lnpow>`.
    #[arg(long, default_value = "geometric:0.5")]
    pub weights: String,
    /// First projection index.
    #[arg(long, default_value_t = 1)]
    pub start: u64,
    /// Case of the approximant: 1 bounded traces, 2 small, 3 large.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub case: u8,
    #[arg(long, default_value_t = 0.5)]
    pub c1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub c2: f64,
    /// Multiplier of the added eigenvalue sequence (chosen automatically when absent).
    #[arg(long)]
    pub lambda_scale: Option<f64>,
    /// Rescale the counterexample to unit trace.
    #[arg(long)]
    pub normalize: bool,
    /// Divergence threshold B for the divergent-series witness.
    #[arg(long, default_value_t = 1e3)]
    pub threshold: f64,
    /// Number of selected indices to list.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

fn parse_weights(spec: &str, start: u64) -> Result<ResolutionOfIdentity, CliError> {
    let bad = || CliError::Input(format!("invalid --weights `{spec}`"));
    let (family, args) = spec.split_once(':').ok_or_else(bad)?;
    let nums: Vec<f64> = args
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let w = match (family, nums.as_slice()) {
        ("geometric", [b]) => Monomial::new(1.0, 0.0, *b, 0.0),
        ("constant", [c]) => Monomial::constant(*c),
        ("power", [p]) => Monomial::new(1.0, -p, 1.0, 0.0),
        ("monomial", [c, np, b, lp]) => Monomial::new(*c, *np, *b, *lp),
        _ => return Err(bad()),
    };
    ResolutionOfIdentity::new(w, IndexDomain::from(start)).map_err(input)
}

fn need_eps(a: &ConstructArgs) -> Result<f64, CliError> {
    match a.eps {
        Some(e) if e > 0.0 && e.is_finite() => Ok(e),
        Some(e) => Err(CliError::Input(format!("--eps must be positive, got {e}"))),
        None => Err(CliError::Input("--eps is required".into())),
    }
}

fn need_input(a: &ConstructArgs) -> Result<SpectralDensity, CliError> {
    load_density(a.input.as_ref().ok_or_else(|| CliError::Input("an input density is required".into()))?)
}

fn verdict_text(v: Verdict) -> String {
    v.class().to_string()
}

/// Density output with the summary: comment header on the density, and the
/// summary alone on stdout when the density goes to a file.
fn finish(g: &Global, summary: &Kv, density: &SpectralDensity) -> Result<(), CliError> {
    let body = write_density(density).map_err(input)?;
    let file = format!("{}{body}", summary.render_comment());
    match &g.output {
        Some(p) => {
            std::fs::write(p, &file).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let text = match g.format {
                Format::Csv => summary.render_csv(),
                Format::Kv => summary.render(),
            };
            print!("{text}");
            Ok(())
        }
        None => emit(g, &file),
    }
}

pub fn run(g: &Global, a: &ConstructArgs) -> Result<(), CliError> {
    let mut kv = Kv::new();
    match a.kind {
        Kind::Thm12 => {
            let eps = need_eps(a)?;
            let d = need_input(a)?;
            let t = thm12_truncation(&d, eps).map_err(input)?;
            let v = entropy_with(&t.h_prime, sums(g)).map_err(input)?.value.verdict();
            kv.s("construction", "thm12")
                .f("eps", eps)
                .f("m", t.m)
                .f("M", t.big_m)
                .f("distance", t.distance)
                .s("verdict", verdict_text(v));
            finish(g, &kv, &t.h_prime)?;
            if !(t.distance < 2.0 * eps) || !matches!(v, Verdict::Finite(_)) {
                return Err(CliError::Contract(format!(
                    "distance {} (bound {}), verdict {}",
                    t.distance,
                    2.0 * eps,
                    verdict_text(v)
                )));
            }
        }
        Kind::Thm14 => {
            let r = parse_weights(&a.weights, a.start)?;
            let d = thm14_counterexample(&r, a.normalize).map_err(input)?;
            let rep = entropy_with(&d, sums(g)).map_err(input)?;
            kv.s("construction", "thm14")
                .s("weights", a.weights.clone())
                .f("total_trace", d.total_trace())
                .f("trace", rep.trace)
                .s("verdict", rep.value.class().to_string());
            finish(g, &kv, &d)?;
            if rep.value.class() != EntropyClass::PlusInfinity || !rep.trace.is_finite() {
                return Err(CliError::Contract(format!(
                    "expected finite trace and entropy +inf, got trace {} and {}",
                    rep.trace,
                    rep.value.class()
                )));
            }
        }
        Kind::Thm15 => {
            let eps = need_eps(a)?;
            let d = need_input(a)?;
            let r = parse_weights(&a.weights, a.start)?;
            let case = match a.case {
                1 => Thm15Case::Bounded { c1: a.c1, c2: a.c2 },
                2 => Thm15Case::Small,
                _ => Thm15Case::Large,
            };
            let x = thm15_approximant(&d, eps, case, &r, a.lambda_scale).map_err(input)?;
            kv.s("construction", "thm15")
                .s("case", case.name())
                .f("eps", eps)
                .f("m", x.m)
                .f("M", x.big_m)
                .s("n0", x.n0.to_string())
                .f("lambda_scale", x.lambda_scale)
                .f("distance", x.distance)
                .s("verdict", verdict_text(x.verdict))
                .s("expected", case.expected().to_string());
            finish(g, &kv, &x.h_prime)?;
            if !(x.distance < 3.0 * eps) || x.verdict.class() != case.expected() {
                return Err(CliError::Contract(format!(
                    "distance {} (bound {}), verdict {} (expected {})",
                    x.distance,
                    3.0 * eps,
                    verdict_text(x.verdict),
                    case.expected()
                )));
            }
        }
        Kind::Lemma13 => {
            if !a.threshold.is_finite() {
                return Err(CliError::Input(format!("--threshold must be finite, got {}", a.threshold)));
            }
            let r = parse_weights(&a.weights, a.start)?;
            let seq = lemma13_sequence(&r).map_err(input)?;
            let ks = seq.subsequence(a.count).map_err(input)?;
            let w = divergence_witness(a.threshold);
            let ks: Vec<String> = ks.iter().map(u64::to_string).collect();
            kv.s("construction", "lemma13")
                .s("weights", a.weights.clone())
                .f("sum_alpha", seq.total)
                .s("selected", ks.join(" "))
                .s("identity_selection", seq.is_identity_selection().map_err(input)?.to_string())
                .f("trace_bound", seq.trace_bound())
                .f("threshold", w.threshold)
                .s("witness_n", w.n.map(|n| n.to_string()).unwrap_or_else(|| "beyond 1e8".into()))
                .f("witness_ln_n", w.ln_n)
                .f("partial_sum", w.partial_sum)
                .s("exceeds", (w.partial_sum > w.threshold).to_string());
            let text = match g.format {
                Format::Csv => kv.render_csv(),
                Format::Kv => kv.render(),
            };
            emit(g, &text)?;
            if !(w.partial_sum > w.threshold) {
                return Err(CliError::Contract(format!(
                    "partial sum {} does not exceed {}",
                    w.partial_sum, w.threshold
                )));
            }
        }
    }
    Ok(())
}
