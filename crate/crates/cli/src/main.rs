//! `ddg`: solve, sweep and inspect the DDG discretization from the command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shishkin_ddg::admissibility::{check_admissibility, estimate_m};
use shishkin_ddg::projection::{composite_interpolant, global_theta_project, gauss_radau_project, theta_residuals, transition_jump};
use shishkin_ddg::study::{emit_report, run_convergence_study, run_single, write_report};
use shishkin_ddg::{AdmissibilityReport, ConfigOverrides, ReportFormat, RunConfig, ShishkinMesh};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] shishkin_ddg::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "ddg", version, about = "DDG solver for singularly perturbed convection-diffusion on Shishkin meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve on one mesh and print the error measures.
    Solve(RunArgs),
    /// Sweep over N and report errors and rates.
    Convergence(RunArgs),
    /// Print the penalty constants for degree k; with --trials, also test
    /// admissibility and coercivity on the configured meshes.
    Admissibility {
        #[command(flatten)]
        run: RunArgs,
        /// Random trial functions per mesh (0 skips the mesh checks).
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value_t = 0.5)]
        mu1: f64,
        #[arg(long, default_value_t = 1.0)]
        mu2: f64,
    },
    /// Residuals of the projection conditions for the exact solution.
    Project(RunArgs),
}

/// Run parameters. Flags override values from `--config`.
#[derive(Debug, Args)]
struct RunArgs {
    /// TOML file with any of the fields below (`N_list` for the mesh sizes).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in problem: `exp-layer` or `quadratic`.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Number of elements; repeat or comma-separate for several.
    #[arg(long = "N", value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    /// `half-order`, `full-order`, `k1-experiment` or `constant:<c>`.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output format: `csv` or `text`.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            problem: self.problem.clone(),
            epsilon: self.epsilon,
            k: self.k,
            n_list: (!self.n.is_empty()).then(|| self.n.clone()),
            sigma: self.sigma,
            theta: self.theta,
            beta1: self.beta1,
            schedule: self.schedule.clone(),
            seed: self.seed,
            output: self.out.clone(),
        }
    }

    fn resolve(&self) -> CliResult<(RunConfig, ReportFormat)> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => ConfigOverrides::default(),
        };
        let config = file.overlay(self.overrides()).resolve();
        config.validate().map_err(config_err)?;
        let format = self.format.parse().map_err(config_err)?;
        info!("resolved configuration: {config:?}");
        Ok((config, format))
    }
}

fn read_config(path: &Path) -> CliResult<ConfigOverrides> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Run(shishkin_ddg::Error::Io { path: path.display().to_string(), message: e.to_string() })
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Rows of `(label, value)` as CSV or as an aligned two-column table.
fn table(header: &[&str], rows: &[Vec<String>], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            let _ = writeln!(out, "{}", header.join(","));
            for row in rows {
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        ReportFormat::Text => {
            let widths: Vec<usize> = (0..header.len())
                .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: Vec<&str>| -> String {
                cells.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
            };
            let _ = writeln!(out, "{}", line(header.to_vec()));
            for row in rows {
                let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
            }
        }
    }
    out
}

fn solve(args: &RunArgs) -> CliResult<()> {
    let (config, format) = args.resolve()?;
    let n = match config.sorted_n().as_slice() {
        [n] => *n,
        list => return Err(CliError::Config(format!("solve needs exactly one N, got {list:?}"))),
    };
    let spec = config.problem_spec()?;
    let run = run_single(&config, &spec, n)?;
    let b = &run.bundle;
    let rows: Vec<Vec<String>> = [
        ("e_energy", run.e_energy),
        ("superclose_energy", run.superclose_energy),
        ("l2", b.l2),
        ("linf", b.linf),
        ("h1_semi_broken", b.h1_semi_broken),
        ("energy", b.energy),
        ("jump_l2", b.jump_l2),
        ("relative_residual", run.solve.relative_residual),
        ("backward_error", run.solve.backward_error),
        ("pivot_ratio", run.solve.pivot_ratio),
    ]
    .into_iter()
    .map(|(k, v)| vec![k.to_string(), format!("{v:.6e}")])
    .collect();
    let mut text = match format {
        ReportFormat::Text => format!("N = {n}, k = {}, epsilon = {:e}\n", config.k, config.epsilon),
        ReportFormat::Csv => String::new(),
    };
    text.push_str(&table(&["quantity", "value"], &rows, format));
    emit(&text, config.output.as_deref())
}

fn convergence(args: &RunArgs) -> CliResult<ExitCode> {
    let (config, format) = args.resolve()?;
    let report = run_convergence_study(&config)?;
    match &config.output {
        Some(path) => write_report(&report, format, path)?,
        None => print!("{}", emit_report(&report, format)),
    }
    Ok(if report.has_failures() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn admissibility(args: &RunArgs, trials: usize, mu1: f64, mu2: f64) -> CliResult<()> {
    let (config, format) = args.resolve()?;
    let r = AdmissibilityReport::new(config.k, mu1, mu2).map_err(config_err)?;
    let header = ["k", "lambda_max", "beta0_bound", "beta0_integer", "mu1", "mu2"];
    let row = vec![
        r.k.to_string(),
        r.lambda_max.to_string(),
        r.beta0_bound.to_string(),
        r.beta0_integer.to_string(),
        r.mu1.to_string(),
        r.mu2.to_string(),
    ];
    let mut text = table(&header, &[row], format);
    if trials > 0 {
        let spec = config.problem_spec()?;
        let params = config.flux_params()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut rows = Vec::new();
        for n in config.sorted_n() {
            let mesh = ShishkinMesh::new(n, config.epsilon, config.sigma, spec.alpha)?;
            let m = estimate_m(&mesh, config.k, config.beta1)?;
            let c = check_admissibility(&spec, &mesh, config.k, &params, trials, mu1, mu2, &mut rng)?;
            rows.push(vec![
                n.to_string(),
                format!("{m:.6e}"),
                format!("{:+.3e}", c.definition_slack),
                format!("{:+.3e}", c.definition_exact),
                format!("{:+.3e}", c.coercivity_slack),
                format!("{:+.3e}", c.coercivity_exact),
                c.admissible().to_string(),
                c.coercive().to_string(),
            ]);
        }
        text.push('\n');
        text.push_str(&table(
            &["N", "M", "definition_slack", "definition_exact", "coercivity_slack", "coercivity_exact", "admissible", "coercive"],
            &rows,
            format,
        ));
    }
    emit(&text, config.output.as_deref())
}

fn project(args: &RunArgs) -> CliResult<()> {
    let (config, format) = args.resolve()?;
    let spec = config.problem_spec()?;
    let w = spec.exact.as_ref().ok_or_else(|| CliError::Config(format!("problem {} has no exact solution", config.problem)))?;
    let mut rows = Vec::new();
    for n in config.sorted_n() {
        let mesh = ShishkinMesh::new(n, config.epsilon, config.sigma, spec.alpha)?;
        let p = global_theta_project(w, &mesh, config.k, config.theta)?;
        let r = theta_residuals(w, &p, config.theta);
        let one = global_theta_project(w, &mesh, config.k, 1.0)?;
        let radau = gauss_radau_project(w, &mesh, config.k)?;
        let radau_diff = one.coeffs().iter().zip(radau.coeffs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let pi = composite_interpolant(w, &mesh, config.k, config.theta)?;
        rows.push(vec![
            n.to_string(),
            format!("{:.3e}", r.moment),
            format!("{:.3e}", r.flux),
            format!("{:.3e}", r.endpoint),
            format!("{radau_diff:.3e}"),
            format!("{:+.3e}", transition_jump(w, &pi)),
        ]);
    }
    let text = table(&["N", "moment", "flux", "endpoint", "theta1_vs_radau", "transition_jump"], &rows, format);
    emit(&text, config.output.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve(args).map(|()| ExitCode::SUCCESS),
        Command::Convergence(args) => convergence(args),
        Command::Admissibility { run, trials, mu1, mu2 } => admissibility(run, *trials, *mu1, *mu2).map(|()| ExitCode::SUCCESS),
        Command::Project(args) => project(args).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("ddg: {e}");
        ExitCode::from(e.exit_code())
    })
}
