use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rand::Rng;
use rayon::prelude::*;

use segal_core::entropy::entropy;
use segal_core::matrix::format::parse_element;
use segal_core::matrix::random::{
    gaussian_element, random_algebra, random_contraction, random_normal_contraction, random_psd, random_psd_above,
    rng,
};
use segal_core::matrix::{
    eig_spectral, eigenvalue_domination_check, entropy_matrix, entropy_trace_monotonicity_check,
    log_monotonicity_check, ordered_pair_domination, phi_map, polarization_identity_check, ContractionElement,
    HermitianElement, MatrixError, WeightedMatrixAlgebra,
};
use segal_core::numeric::fmt12;

use crate::output::{emit, parse_grid, read, Grid, Kv};
use crate::{input, CliError, Format, Global};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// yh against the four-term polarization sum, relative to the entry scale.
    Polarization,
    /// Smallest eigenvalue of log h₂ − log h₁ for 𝟙 ≤ h₁ ≤ h₂.
    LogMonotonicity,
    /// |τ(Φ(h)) − τ(h)| for arbitrary contractions.
    PhiTrace,
    /// H(Φ(h)) − H(h) for normal contractions.
    PhiEntropy,
    /// H(Φ(h)) − H(h) for arbitrary contractions, recorded without a bound.
    PhiGeneral,
    /// Largest θₙ − ‖z‖²λₙ for the eigenvalues of zhz* against those of h.
    Domination,
    /// Largest λₙ(h₁) − λₙ(h₂) for h₁ ≤ h₂.
    OrderedDomination,
    /// τ(√(h₁+𝟙) log(h₂+𝟙) √(h₁+𝟙)) chain for h₁ ≤ h₂, as the worst gap.
    TraceChain,
    /// Matrix entropy against the entropy of the eigenvalue density.
    Bridge,
    /// Scaling law H(αh) = α log α τ(h) + α H(h).
    Scaling,
    /// Every randomized check above.
    All,
    /// Entropy of the element in `--input`.
    Entropy,
    /// Φ applied to `--input` with the contraction in `--z`.
    Phi,
}

const RANDOMIZED: [Check; 10] = [
    Check::Polarization,
    Check::LogMonotonicity,
    Check::PhiTrace,
    Check::PhiEntropy,
    Check::PhiGeneral,
    Check::Domination,
    Check::OrderedDomination,
    Check::TraceChain,
    Check::Bridge,
    Check::Scaling,
];

#[derive(Debug, Args)]
pub struct MatrixDemoArgs {
    pub check: Check,
    /// Matrix size of a single block with unit weight.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub dim: u64,
    /// Block sizes, comma separated; block weights are then drawn per seed.
    #[arg(long, value_parser = parse_grid)]
    pub blocks: Option<Grid>,
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    /// First seed; seeds run from here upward.
    #[arg(long, alias = "seed", default_value_t = 0)]
    pub seed0: u64,
    /// Print one row per seed.
    #[arg(long)]
    pub rows: bool,
    /// Element file for `entropy` and `phi`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Contraction file for `phi`.
    #[arg(long)]
    pub z: Option<PathBuf>,
}

impl Check {
    fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }

    /// `(tolerance, larger_is_worse)`; `None` for recorded-only checks.
    fn bound(self) -> Option<(f64, bool)> {
        match self {
            Check::Polarization => Some((1e-10, true)),
            Check::LogMonotonicity => Some((-1e-8, false)),
            Check::PhiGeneral => None,
            _ => Some((1e-9, true)),
        }
    }
}

fn algebra(a: &MatrixDemoArgs, r: &mut impl Rng) -> Result<WeightedMatrixAlgebra, MatrixError> {
    match &a.blocks {
        Some(Grid(dims)) => {
            let dims: Vec<usize> = dims.iter().map(|&d| d as usize).collect();
            random_algebra(&dims, r)
        }
        None => WeightedMatrixAlgebra::full(a.dim as usize, 1.0),
    }
}

fn measure(check: Check, a: &MatrixDemoArgs, seed: u64) -> Result<f64, MatrixError> {
    let mut r = rng(seed);
    let alg = algebra(a, &mut r)?;
    let h = random_psd(&alg, &mut r)?;
    Ok(match check {
        Check::Polarization => {
            let y = gaussian_element(&alg, &mut r);
            let scale = (y.max_abs() + 1.0).powi(2) * h.element().max_abs();
            polarization_identity_check(&y, h.element(), &alg)? / scale
        }
        Check::LogMonotonicity => {
            let one = HermitianElement::psd(&alg, alg.identity())?;
            let h1 = random_psd_above(&one, &alg, 1.0, &mut r)?;
            let h2 = random_psd_above(&h1, &alg, 1.0, &mut r)?;
            log_monotonicity_check(&h1, &h2, &alg)?
        }
        Check::PhiTrace => phi_map(&h, &random_contraction(&alg, &mut r)?, &alg)?.trace_residual,
        Check::PhiEntropy | Check::PhiGeneral => {
            let z = if check == Check::PhiEntropy {
                random_normal_contraction(&alg, &mut r)?
            } else {
                random_contraction(&alg, &mut r)?
            };
            entropy_matrix(&phi_map(&h, &z, &alg)?.phi, &alg)? - entropy_matrix(&h, &alg)?
        }
        Check::Domination => {
            let z = random_contraction(&alg, &mut r)?;
            eigenvalue_domination_check(&h, &z.element, &alg)?
                .iter()
                .map(|d| d.theta - d.bound)
                .fold(f64::NEG_INFINITY, f64::max)
        }
        Check::OrderedDomination => {
            let h2 = random_psd_above(&h, &alg, 0.5, &mut r)?;
            ordered_pair_domination(&h, &h2, &alg)?
                .iter()
                .map(|d| d.theta - d.bound)
                .fold(f64::NEG_INFINITY, f64::max)
        }
        Check::TraceChain => {
            let h2 = random_psd_above(&h, &alg, 0.5, &mut r)?;
            let c = entropy_trace_monotonicity_check(&h, &h2, &alg)?;
            (c.lhs - c.middle).max(c.middle - c.rhs)
        }
        Check::Bridge => {
            let d = eig_spectral(&h, &alg)?;
            let hs = entropy(&d)?.value.value();
            (entropy_matrix(&h, &alg)? - hs).abs()
        }
        Check::Scaling => {
            let alpha = 10f64.powf(r.random_range(-2.0..2.0));
            let scaled = HermitianElement::psd(&alg, h.element().scale_real(alpha))?;
            let rhs = alpha * alpha.ln() * alg.tau(h.element()) + alpha * entropy_matrix(&h, &alg)?;
            (entropy_matrix(&scaled, &alg)? - rhs).abs()
        }
        Check::All | Check::Entropy | Check::Phi => unreachable!("not a randomized check"),
    })
}

fn element(path: &Option<PathBuf>, flag: &str) -> Result<(WeightedMatrixAlgebra, segal_core::matrix::Element), CliError> {
    let p = path.as_ref().ok_or_else(|| CliError::Input(format!("{flag} is required for this check")))?;
    parse_element(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
}

fn single(g: &Global, a: &MatrixDemoArgs) -> Result<(), CliError> {
    let (alg, x) = element(&a.input, "--input")?;
    let h = HermitianElement::psd(&alg, x).map_err(input)?;
    let mut kv = Kv::new();
    kv.f("trace", alg.tau(h.element()))
        .f("total_trace", alg.total_trace())
        .f("entropy", entropy_matrix(&h, &alg).map_err(input)?);
    if a.check == Check::Phi {
        let (zalg, z) = element(&a.z, "--z")?;
        if zalg != alg {
            return Err(CliError::Input("--z lives in a different algebra".into()));
        }
        let z = ContractionElement::new(&alg, z).map_err(input)?;
        let p = phi_map(&h, &z, &alg).map_err(input)?;
        kv.s("normal", z.normal.to_string())
            .f("phi_trace", alg.tau(p.phi.element()))
            .f("phi_entropy", entropy_matrix(&p.phi, &alg).map_err(input)?)
            .f("trace_residual", p.trace_residual);
        match p.unital_residual {
            Some(u) => kv.f("unital_residual", u),
            None => kv.s("unital_residual", "n/a"),
        };
    }
    let text = match g.format {
        Format::Csv => kv.render_csv(),
        Format::Kv => kv.render(),
    };
    emit(g, &text)
}

pub fn run(g: &Global, a: &MatrixDemoArgs) -> Result<(), CliError> {
    if matches!(a.check, Check::Entropy | Check::Phi) {
        return single(g, a);
    }
    if let Some(Grid(b)) = &a.blocks {
        if b.is_empty() || b.iter().any(|&d| !((1.0..=64.0).contains(&d) && d.fract() == 0.0)) {
            return Err(CliError::Input("--blocks must list block sizes between 1 and 64".into()));
        }
    }
    if a.seeds == 0 {
        return Err(CliError::Input("--seeds must be positive".into()));
    }
    let checks: Vec<Check> = if a.check == Check::All { RANDOMIZED.to_vec() } else { vec![a.check] };
    let seeds: Vec<u64> = (0..a.seeds).map(|i| a.seed0.wrapping_add(i)).collect();

    let mut rows = String::new();
    let mut summary = String::from("check,seeds,worst,tolerance,failures\n");
    let mut kv = Kv::new();
    let mut failed = Vec::new();
    for &check in &checks {
        let values = seeds
            .par_iter()
            .map(|&s| measure(check, a, s))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(input)?;
        let (worst, failures, tol) = match check.bound() {
            Some((tol, true)) => {
                let w = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (w, values.iter().filter(|&&v| !(v <= tol)).count(), fmt12(tol))
            }
            Some((tol, false)) => {
                let w = values.iter().copied().fold(f64::INFINITY, f64::min);
                (w, values.iter().filter(|&&v| !(v >= tol)).count(), fmt12(tol))
            }
            None => (values.iter().copied().fold(f64::NEG_INFINITY, f64::max), 0, "n/a".into()),
        };
        if a.rows {
            for (s, v) in seeds.iter().zip(&values) {
                let _ = writeln!(rows, "{},{s},{}", check.name(), fmt12(*v));
            }
        }
        let _ = writeln!(summary, "{},{},{},{tol},{failures}", check.name(), seeds.len(), fmt12(worst));
        kv.s(&format!("{}.seeds", check.name()), seeds.len().to_string())
            .f(&format!("{}.worst", check.name()), worst)
            .s(&format!("{}.tolerance", check.name()), tol)
            .s(&format!("{}.failures", check.name()), failures.to_string());
        if failures > 0 {
            failed.push(format!("{} ({failures} seeds)", check.name()));
        }
    }
    let text = match g.format {
        Format::Csv if a.rows => format!("check,seed,value\n{rows}\n{summary}"),
        Format::Csv => summary,
        Format::Kv => kv.render(),
    };
    emit(g, &text)?;
    if !failed.is_empty() {
        return Err(CliError::Contract(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}
