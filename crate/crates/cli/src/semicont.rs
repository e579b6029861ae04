use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use segal_core::numeric::fmt12;
use segal_core::semicontinuity::{parse_experiment, BoundCheckRow, SemicontinuityExperiment};

use crate::output::{emit, read, Kv};
use crate::spectral::sums;
use crate::{input, CliError, Format, Global};

#[derive(Debug, Args)]
pub struct SemicontArgs {
    /// Experiment file.
    pub input: PathBuf,
    /// Print only rows with n = 1 or n divisible by this; every row is still checked.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub every: u64,
    /// Most negative slack accepted.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Append δ(M) at m = 1/M for each M of the grid.
    #[arg(long)]
    pub trend: bool,
}

pub fn run(g: &Global, a: &SemicontArgs) -> Result<(), CliError> {
    let at = |e: &dyn std::fmt::Display| CliError::Input(format!("{}: {e}", a.input.display()));
    let spec = parse_experiment(&read(&a.input)?).map_err(|e| at(&e))?;
    let x = SemicontinuityExperiment::with_settings(spec, sums(g)).map_err(|e| at(&e))?;

    let evals = (1..=x.n_max)
        .into_par_iter()
        .map(|n| x.evaluate(n))
        .collect::<Result<Vec<_>, _>>()
        .map_err(input)?;
    let grid: Vec<(f64, f64)> = x.ms.iter().flat_map(|&m| x.big_ms.iter().map(move |&bm| (m, bm))).collect();
    let blocks = grid
        .par_iter()
        .map(|&(m, big_m)| {
            let tf0 = x.tau_f_h0(m, big_m)?;
            let rows = evals
                .iter()
                .map(|e| x.check_member(e, m, big_m, tf0))
                .collect::<Result<Vec<BoundCheckRow>, _>>()?;
            Ok((m, big_m, rows))
        })
        .collect::<Result<Vec<_>, segal_core::semicontinuity::SemicontinuityError>>()
        .map_err(input)?;

    let bad = |r: &BoundCheckRow| !(r.slack >= -a.tol);
    let mut out = String::new();
    let mut summary = Kv::new();
    summary
        .s("mode", x.mode.as_str())
        .s("sequence", x.sequence.describe())
        .f("epsilon", x.epsilon)
        .f("c", x.c)
        .f("r", x.r)
        .f("convergence_distance", x.convergence_distance);
    let (mut total, mut violations, mut worst) = (0usize, 0usize, f64::INFINITY);
    for (i, (m, big_m, rows)) in blocks.iter().enumerate() {
        if g.format == Format::Csv {
            let _ = writeln!(out, "# m = {}, M = {}", fmt12(*m), fmt12(*big_m));
            out.push_str(BoundCheckRow::CSV_HEADER);
            out.push('\n');
            for r in rows.iter().filter(|r| r.n == 1 || r.n % a.every == 0 || bad(r)) {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
        }
        let v = rows.iter().filter(|r| bad(r)).count();
        let w = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
        summary.s(
            &format!("grid.{}", i + 1),
            format!("m={} M={} min_slack={} violations={v}", fmt12(*m), fmt12(*big_m), fmt12(w)),
        );
        total += rows.len();
        violations += v;
        worst = worst.min(w);
    }
    if a.trend {
        for t in x.trend(&x.big_ms).map_err(input)? {
            summary.s(
                &format!("trend.M={}", fmt12(t.big_m)),
                format!("delta={} extreme_lhs={}", fmt12(t.delta), fmt12(t.extreme_lhs)),
            );
        }
    }
    summary
        .s("rows", total.to_string())
        .s("violations", violations.to_string())
        .f("min_slack", worst);
    match g.format {
        Format::Csv => {
            out.push_str("# summary\n");
            out.push_str(&summary.render_comment());
        }
        Format::Kv => out.push_str(&summary.render()),
    }
    emit(g, &out)?;
    if violations > 0 {
        return Err(CliError::Contract(format!(
            "{violations} rows with slack below −{}, minimum {}",
            a.tol,
            fmt12(worst)
        )));
    }
    Ok(())
}
