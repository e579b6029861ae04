use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use segal_core::entropy::{entropy_with, EntropyReport, Verdict};
use segal_core::matrix::format::parse_element;
use segal_core::matrix::HermitianElement;
use segal_core::numeric::fmt12;
use segal_core::quadrature::QuadratureSettings;
use segal_core::regularization::{
    classify_sweep, extended_sweep, lipschitz_modulus, sweep_row, tau_f_mm_quadrature_oracle, tau_f_mm_with,
    RegularizationError, RegularizationParams, SweepConfig, SweepResult,
};
use segal_core::semicontinuity::{parse_experiment, SemicontinuityExperiment};
use segal_core::spectral::format::parse_density;
use segal_core::spectral::{SpectralDensity, SumSettings};

use crate::output::{parse_grid, read, Grid, Kv};
use crate::{input, CliError, Format, Global};

pub fn sums(g: &Global) -> SumSettings {
    SumSettings { cutoff: g.cutoff }
}

pub fn load_density(path: &Path) -> Result<SpectralDensity, CliError> {
    parse_density(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Spectral density file.
    pub input: PathBuf,
}

pub fn entropy(g: &Global, a: &EntropyArgs) -> Result<String, CliError> {
    let d = load_density(&a.input)?;
    let r = entropy_with(&d, sums(g)).map_err(input)?;
    Ok(match g.format {
        Format::Csv => format!("{}\n{}\n", EntropyReport::CSV_HEADER, r.csv_row()),
        Format::Kv => r.kv_block(),
    })
}

#[derive(Debug, Args)]
pub struct RegularizeArgs {
    pub input: PathBuf,
    /// Lower regularization parameter.
    #[arg(long)]
    pub m: f64,
    /// Upper regularization parameter.
    #[arg(long = "M")]
    pub big_m: f64,
    /// Absolute tolerance of the quadrature oracle.
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// Subdivision budget of the quadrature oracle.
    #[arg(long, default_value_t = 1 << 16)]
    pub quad_max: usize,
    /// Largest accepted |closed form − oracle|.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

pub fn regularize(g: &Global, a: &RegularizeArgs) -> Result<String, CliError> {
    if !(a.quad_tol > 0.0) || a.quad_max == 0 {
        return Err(CliError::Input("--quad-tol and --quad-max must be positive".into()));
    }
    let d = load_density(&a.input)?;
    let p = RegularizationParams::new(a.m, a.big_m).map_err(input)?.with_quadrature(QuadratureSettings {
        abs_tol: a.quad_tol,
        max_subdivisions: a.quad_max,
    });
    let closed = tau_f_mm_with(&d, &p, sums(g)).map_err(input)?;
    let oracle = match tau_f_mm_quadrature_oracle(&d, &p) {
        Ok(v) => Some(v),
        Err(RegularizationError::InfiniteSpectrum) => None,
        Err(e) => return Err(input(e)),
    };
    let mut kv = Kv::new();
    kv.f("m", a.m).f("M", a.big_m).f("tau_f", closed);
    match oracle {
        Some(o) => kv.f("oracle", o).f("difference", (closed - o).abs()),
        None => kv.s("oracle", "n/a").s("difference", "n/a"),
    };
    kv.f("lipschitz", lipschitz_modulus(&p));
    let text = match g.format {
        Format::Csv => kv.render_csv(),
        Format::Kv => kv.render(),
    };
    if let Some(o) = oracle {
        if !((closed - o).abs() <= a.tol) {
            crate::output::emit(g, &text)?;
            return Err(CliError::Contract(format!(
                "closed form {} and oracle {} differ by more than {}",
                fmt12(closed),
                fmt12(o),
                fmt12(a.tol)
            )));
        }
    }
    Ok(text)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub input: PathBuf,
    /// Ascending grid of M, comma separated.
    #[arg(long = "Ms", default_value = "10,100,1000,10000", value_parser = parse_grid)]
    pub ms: Grid,
    /// Keep multiplying M by 10 from the first grid point until the verdict settles or `--max-M` is passed.
    #[arg(long)]
    pub extend: bool,
    #[arg(long = "max-M", default_value_t = 1e300)]
    pub max_m: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub convergence_threshold: f64,
    #[arg(long, default_value_t = 1e3)]
    pub divergence_threshold: f64,
}

pub fn sweep(g: &Global, a: &SweepArgs) -> Result<String, CliError> {
    let d = load_density(&a.input)?;
    let cfg = SweepConfig {
        convergence_threshold: a.convergence_threshold,
        divergence_threshold: a.divergence_threshold,
        sums: sums(g),
    };
    let grid = &a.ms.0;
    if grid.is_empty() || grid.iter().any(|&m| !(m > 1.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Input("--Ms must be an ascending list of values above 1".into()));
    }
    let result = if a.extend {
        extended_sweep(&d, grid[0], a.max_m, &cfg).map_err(input)?
    } else {
        let entropy = entropy_with(&d, cfg.sums).map_err(input)?.value;
        let h = match entropy.verdict() {
            Verdict::Finite(v) => Some(v),
            _ => None,
        };
        let rows = grid
            .par_iter()
            .map(|&m| sweep_row(&d, m, h, cfg.sums))
            .collect::<Result<Vec<_>, _>>()
            .map_err(input)?;
        SweepResult {
            verdict: classify_sweep(&rows, entropy.verdict(), &cfg),
            rows,
            entropy,
        }
    };
    Ok(match g.format {
        Format::Csv => result.csv(),
        Format::Kv => {
            let mut kv = Kv::new();
            kv.s("entropy", result.entropy.value_text()).s("verdict", result.verdict.as_str());
            for (i, r) in result.rows.iter().enumerate() {
                let i = i + 1;
                kv.f(&format!("row.{i}.M"), r.big_m).f(&format!("row.{i}.tau_f"), r.tau_f);
                match r.gap {
                    Some(gap) => kv.f(&format!("row.{i}.gap"), gap),
                    None => kv.s(&format!("row.{i}.gap"), "n/a"),
                };
            }
            kv.render()
        }
    })
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// `.spd` density, `.exp` experiment or `.mat` matrix element.
    pub input: PathBuf,
}

pub fn validate(g: &Global, a: &ValidateArgs) -> Result<String, CliError> {
    let text = read(&a.input)?;
    let at = |e: &dyn std::fmt::Display| CliError::Input(format!("{}: {e}", a.input.display()));
    let mut kv = Kv::new();
    match a.input.extension().and_then(|e| e.to_str()) {
        Some("exp") => {
            let spec = parse_experiment(&text).map_err(|e| at(&e))?;
            let x = SemicontinuityExperiment::with_settings(spec, sums(g)).map_err(|e| at(&e))?;
            kv.s("kind", "experiment")
                .s("mode", x.mode.as_str())
                .s("sequence", x.sequence.describe())
                .f("epsilon", x.epsilon)
                .f("c", x.c)
                .f("r", x.r)
                .f("convergence_distance", x.convergence_distance)
                .s("n_max", x.n_max.to_string())
                .s("grid_points", (x.ms.len() * x.big_ms.len()).to_string());
        }
        Some("mat") => {
            let (alg, x) = parse_element(&text).map_err(|e| at(&e))?;
            kv.s("kind", "matrix")
                .s("blocks", alg.blocks().len().to_string())
                .f("total_trace", alg.total_trace())
                .f("hermitian_defect", x.hermitian_defect());
            match HermitianElement::new(&alg, x) {
                Ok(h) => kv.s("hermitian", "true").f("min_eigenvalue", h.min_eigenvalue()),
                Err(_) => kv.s("hermitian", "false"),
            };
        }
        _ => {
            let d = parse_density(&text).map_err(|e| at(&e))?;
            let r = entropy_with(&d, sums(g)).map_err(|e| at(&e))?;
            kv.s("kind", "density")
                .s("atoms", d.atoms().len().to_string())
                .s("tails", d.tails().len().to_string())
                .f("total_trace", d.total_trace())
                .f("trace", r.trace)
                .s("verdict", r.value.class().to_string());
        }
    }
    kv.s("status", "ok");
    Ok(match g.format {
        Format::Csv => kv.render_csv(),
        Format::Kv => kv.render(),
    })
}
