//! Dispatches a parsed config to the engines and writes the outputs: one
//! CSV per run plus a self-contained JSON report with the config echo.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use gexpect_core::{
    clt_convergence_experiment, hausdorff, hausdorff_interval, lln_convergence_experiment,
    maximal_expectation, solve_gheat_1d, solve_gheat_2d, solve_maximal_pde_1d,
    solve_maximal_pde_2d, validate_hypotheses, Grid1D, Grid2D, HypothesisProbes, HypothesisReport,
    PdeSolution,
};

use crate::config::{Experiment, ExperimentConfig, GridConfig, PdeSpec};
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub version: String,
    pub seed: u64,
    pub threads: String,
    pub config: ExperimentConfig,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<HypothesisReport>,
    pub total_seconds: f64,
}

pub struct RunOutcome {
    pub report: ExperimentReport,
    pub csv_path: PathBuf,
    pub report_path: PathBuf,
}

/// Executes the experiment and writes `<prefix>.csv` and
/// `<prefix>.report.json`, where the prefix is the config's `output`
/// field or the config path minus its extension.
pub fn run(config: ExperimentConfig, config_path: &Path) -> Result<RunOutcome, CliError> {
    let started = Instant::now();
    let prefix = match &config.output {
        Some(p) => PathBuf::from(p),
        None => config_path.with_extension(""),
    };
    if let Some(dir) = prefix.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(CliError::config)?;
        }
    }
    let csv_path = prefix.with_extension("csv");
    let report_path = prefix.with_extension("report.json");

    let mut csv: Vec<u8> = Vec::new();
    let mut validation = None;
    let results = match &config.experiment {
        Experiment::Clt(spec) => {
            let seq = spec.sequence.build()?;
            let table =
                clt_convergence_experiment(&seq, &spec.phi, &spec.n_list, &spec.pde, &spec.dp)
                    .map_err(CliError::from_engine)?;
            table.write_csv(&mut csv).map_err(CliError::config)?;
            json!({
                "rows": table.rows,
                "final_gap": table.final_gap(),
            })
        }
        Experiment::Lln(spec) => {
            let seq = spec.sequence.build()?;
            let table = lln_convergence_experiment(&seq, &spec.phi, &spec.n_list, &spec.dp)
                .map_err(CliError::from_engine)?;
            table.write_csv(&mut csv).map_err(CliError::config)?;
            json!({
                "rows": table.rows,
                "final_gap": table.final_gap(),
            })
        }
        Experiment::Pde(spec) => {
            let solution = solve_pde(spec)?;
            solution.write_csv(&mut csv).map_err(CliError::config)?;
            json!({
                "center_value": solution.center_value(),
                "steps": solution.steps,
                "cfl_ratio": solution.cfl_ratio,
            })
        }
        Experiment::Maximal(spec) => {
            let value = maximal_expectation(&spec.gamma, &spec.phi).map_err(CliError::config)?;
            csv.extend_from_slice(b"value,error_bound\n");
            writeln!(csv, "{},{}", value.value, value.error_bound).map_err(CliError::config)?;
            json!({
                "value": value.value,
                "error_bound": value.error_bound,
                "argmax": value.argmax,
            })
        }
        Experiment::Hausdorff(spec) => {
            let value = hausdorff(&spec.a, &spec.b).map_err(CliError::config)?;
            let closed = match (spec.a.as_interval(), spec.b.as_interval()) {
                (Some(a), Some(b)) => Some(hausdorff_interval(a, b)),
                _ => None,
            };
            csv.extend_from_slice(b"hausdorff,interval_closed_form\n");
            match closed {
                Some(c) => writeln!(csv, "{value},{c}"),
                None => writeln!(csv, "{value},"),
            }
            .map_err(CliError::config)?;
            json!({
                "value": value,
                "interval_closed_form": closed,
            })
        }
        Experiment::Validate(spec) => {
            let seq = spec.sequence.build()?;
            let probes = HypothesisProbes::random(seq.dimension(), spec.probes, config.seed);
            let report =
                validate_hypotheses(&seq, spec.n_check, &probes).map_err(CliError::from_engine)?;
            csv.extend_from_slice(b"condition,pass,worst\n");
            for c in &report.checks {
                writeln!(csv, "{},{},{}", c.condition, c.pass, c.worst)
                    .map_err(CliError::config)?;
            }
            let summary = json!({
                "pass": report.pass(),
                "checks": report.checks,
                "cesaro_means_tail": report.cesaro_means.last(),
            });
            validation = Some(report);
            summary
        }
    };

    let report = ExperimentReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        threads: std::env::var("GEXPECT_THREADS").unwrap_or_else(|_| "1".into()),
        config,
        results,
        validation,
        total_seconds: started.elapsed().as_secs_f64(),
    };

    let mut csv_file = BufWriter::new(File::create(&csv_path).map_err(CliError::config)?);
    csv_file.write_all(&csv).map_err(CliError::config)?;
    csv_file.flush().map_err(CliError::config)?;

    let mut report_file = BufWriter::new(File::create(&report_path).map_err(CliError::config)?);
    serde_json::to_writer_pretty(&mut report_file, &report).map_err(CliError::config)?;
    report_file.write_all(b"\n").map_err(CliError::config)?;
    report_file.flush().map_err(CliError::config)?;

    Ok(RunOutcome {
        report,
        csv_path,
        report_path,
    })
}

fn solve_pde(spec: &PdeSpec) -> Result<PdeSolution, CliError> {
    let picked =
        spec.sigma2.is_some() as u8 + spec.theta.is_some() as u8 + spec.gamma.is_some() as u8;
    if picked != 1 {
        return Err(CliError::Config(
            "pde spec needs exactly one of sigma2, theta, gamma".into(),
        ));
    }
    match (&spec.sigma2, &spec.theta, &spec.gamma, &spec.grid) {
        (Some([lo, hi]), None, None, GridConfig::OneD { l, j, t, dt }) => {
            let grid = Grid1D::new(*l, *j, *t, *dt).map_err(CliError::config)?;
            solve_gheat_1d(*lo, *hi, &spec.phi, &grid).map_err(CliError::from_engine)
        }
        (None, Some(theta), None, grid) => match (theta.dimension(), grid) {
            (1, GridConfig::OneD { l, j, t, dt }) => {
                let (lo, hi) = theta.as_interval().expect("dimension checked");
                let grid = Grid1D::new(*l, *j, *t, *dt).map_err(CliError::config)?;
                solve_gheat_1d(lo.max(0.0), hi.max(0.0), &spec.phi, &grid)
                    .map_err(CliError::from_engine)
            }
            (2, GridConfig::TwoD { l, j, t, dt }) => {
                let grid =
                    Grid2D::new((l[0], l[1]), (j[0], j[1]), *t, *dt).map_err(CliError::config)?;
                solve_gheat_2d(theta, &spec.phi, &grid).map_err(CliError::from_engine)
            }
            (d, _) => Err(CliError::Config(format!(
                "grid shape does not match the {d}-dimensional covariance set"
            ))),
        },
        (None, None, Some(gamma), grid) => match (gamma.dimension(), grid) {
            (1, GridConfig::OneD { l, j, t, dt }) => {
                let grid = Grid1D::new(*l, *j, *t, *dt).map_err(CliError::config)?;
                solve_maximal_pde_1d(gamma, &spec.phi, &grid).map_err(CliError::from_engine)
            }
            (2, GridConfig::TwoD { l, j, t, dt }) => {
                let grid =
                    Grid2D::new((l[0], l[1]), (j[0], j[1]), *t, *dt).map_err(CliError::config)?;
                solve_maximal_pde_2d(gamma, &spec.phi, &grid).map_err(CliError::from_engine)
            }
            (d, _) => Err(CliError::Config(format!(
                "grid shape does not match the {d}-dimensional mean set"
            ))),
        },
        _ => Err(CliError::Config(
            "grid shape does not match the equation".into(),
        )),
    }
}
