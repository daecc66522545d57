//! Argument parsing and command dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use radon_svm::analysis::{self, ConfigurationReport, PrecisionAudit};
use radon_svm::experiments::{self, CensusResult, ExperimentConfig};
use radon_svm::geometry::{self, RadonCertificate};
use radon_svm::svm::{self, Label, TrainParams};
use radon_svm::{LabeledPointSet, SvmSolution, Verdict};

use crate::dataset::{self, Dataset};
use crate::plot;
use crate::{CliError, Result};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "radon-svm", version, about = "Hard-margin SVMs and the Radon geometry of their support vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Solver tolerance on the maximal KKT violation.
    #[arg(long, global = true, default_value_t = svm::DEFAULT_TOL)]
    pub tol: f64,

    /// Margin threshold for support vectors (default: max(1e-8, tol)).
    #[arg(long, global = true)]
    pub tau: Option<f64>,

    /// Budget of pair updates for the solver.
    #[arg(long, global = true, default_value_t = svm::DEFAULT_MAX_ITER)]
    pub max_iter: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write a 2-D SVG figure to this path.
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the maximal-margin separator.
    Train { input: PathBuf },
    /// Radon partition of the first n+2 points.
    Radon { input: PathBuf },
    /// Support-vector configuration and Radon point of the trained separator.
    Analyze { input: PathBuf },
    /// Check whether affine separators realize every labeling.
    Shatter { input: PathBuf },
    /// Explain a support-vector count above n+1.
    Audit { input: PathBuf },
    /// Monte Carlo census of support-vector configurations.
    Census {
        /// Half-width of the box the class centers are drawn from.
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = experiments::DEFAULT_POINTS_PER_CLASS)]
        points_per_class: usize,
        #[arg(long, default_value_t = experiments::DEFAULT_DIM)]
        dim: usize,
        #[arg(long, default_value_t = experiments::DEFAULT_STD_DEV)]
        std_dev: f64,
        #[arg(long, default_value_t = experiments::DEFAULT_MAX_REJECTIONS)]
        max_rejections: usize,
    },
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct RadonReport {
    #[serde(flatten)]
    certificate: RadonCertificate,
    general_position: bool,
    unique_partition: bool,
}

#[derive(Serialize)]
struct AnalyzeReport {
    w: Vec<f64>,
    b: f64,
    margin: f64,
    #[serde(flatten)]
    configuration: ConfigurationReport,
}

#[derive(Serialize)]
struct ShatterReport {
    shattered: bool,
    witness: Option<Vec<Label>>,
}

#[derive(Serialize)]
struct AuditReport {
    kkt_residual: f64,
    #[serde(flatten)]
    audit: PrecisionAudit,
}

#[derive(Serialize)]
struct CensusReport {
    two_sv_fraction: f64,
    three_sv_fraction: f64,
    #[serde(flatten)]
    census: CensusResult,
}

fn json<T: Serialize>(command: &str, body: T) -> String {
    let report = Report {
        schema: SCHEMA_VERSION,
        command,
        body,
    };
    // reports hold only plain data, which always serializes
    serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
}

fn csv_row(fields: impl IntoIterator<Item = String>) -> String {
    fields.into_iter().collect::<Vec<_>>().join(",") + "\n"
}

impl Cli {
    fn train_params(&self) -> TrainParams {
        TrainParams {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    fn tau_for(&self, sol: &SvmSolution) -> f64 {
        self.tau.unwrap_or_else(|| analysis::effective_tau(sol))
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        if self.tau.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
            return Err(CliError::Usage("--tau must be nonnegative".into()));
        }
        if self.max_iter == 0 {
            return Err(CliError::Usage("--max-iter must be positive".into()));
        }
        let csv_ok = matches!(self.command, Command::Train { .. } | Command::Census { .. });
        if self.format == Format::Csv && !csv_ok {
            return Err(CliError::Usage("--format csv is available for train and census".into()));
        }
        if self.plot.is_some() && matches!(self.command, Command::Radon { .. } | Command::Shatter { .. } | Command::Audit { .. }) {
            return Err(CliError::Usage("--plot is available for train, analyze and census".into()));
        }
        Ok(())
    }

    fn load(path: &std::path::Path) -> Result<Dataset> {
        dataset::read_dataset_file(path)
    }

    fn plot(&self, data: &LabeledPointSet, sol: &SvmSolution, radon_point: Option<&[f64]>) -> Result<()> {
        match &self.plot {
            Some(path) => plot::plot_svg(data, Some(sol), radon_point, path),
            None => Ok(()),
        }
    }

    /// Runs the command and returns the text to print on success.
    pub fn run(&self) -> Result<String> {
        self.validate()?;
        match &self.command {
            Command::Train { input } => {
                let data = Self::load(input)?.labeled()?;
                let sol = svm::train_hard_margin(&data, self.train_params())?;
                self.plot(&data, &sol, None)?;
                Ok(match self.format {
                    Format::Json => json("train", &sol),
                    Format::Csv => {
                        let mut header: Vec<String> = (1..=data.dim()).map(|d| format!("w{d}")).collect();
                        header.extend(["b", "margin", "support"].map(String::from));
                        let mut row: Vec<String> = sol.w.iter().map(f64::to_string).collect();
                        row.push(sol.b.to_string());
                        row.push(sol.margin.to_string());
                        row.push(
                            sol.support_indices
                                .iter()
                                .map(usize::to_string)
                                .collect::<Vec<_>>()
                                .join(";"),
                        );
                        csv_row(header) + &csv_row(row)
                    }
                })
            }
            Command::Radon { input } => {
                let points = Self::load(input)?.points();
                let certificate = geometry::radon_partition(&points)?;
                let first = points.subset(&(0..points.dim() + 2).collect::<Vec<_>>());
                let report = RadonReport {
                    general_position: geometry::in_general_position(&first).holds(),
                    unique_partition: geometry::unique_radon_partition(&first)?,
                    certificate,
                };
                Ok(json("radon", report))
            }
            Command::Analyze { input } => {
                let data = Self::load(input)?.labeled()?;
                let sol = svm::train_hard_margin(&data, self.train_params())?;
                let configuration = analysis::classify_configuration_with_tau(&sol, &data, self.tau_for(&sol));
                self.plot(&data, &sol, configuration.radon_point.as_deref())?;
                Ok(json(
                    "analyze",
                    AnalyzeReport {
                        w: sol.w.clone(),
                        b: sol.b,
                        margin: sol.margin,
                        configuration,
                    },
                ))
            }
            Command::Shatter { input } => {
                let points = Self::load(input)?.points();
                let report = match analysis::shatter_check(&points)? {
                    Verdict::Holds => ShatterReport {
                        shattered: true,
                        witness: None,
                    },
                    Verdict::Violated(labels) => ShatterReport {
                        shattered: false,
                        witness: Some(labels),
                    },
                };
                Ok(json("shatter", report))
            }
            Command::Audit { input } => {
                let data = Self::load(input)?.labeled()?;
                let sol = svm::train_hard_margin(&data, self.train_params())?;
                let audit = analysis::precision_audit_with_tau(&sol, &data, self.tau_for(&sol));
                Ok(json(
                    "audit",
                    AuditReport {
                        kkt_residual: svm::kkt_check(&sol, &data).max_residual(),
                        audit,
                    },
                ))
            }
            Command::Census {
                a,
                trials,
                seed,
                points_per_class,
                dim,
                std_dev,
                max_rejections,
            } => {
                let cfg = ExperimentConfig {
                    a: *a,
                    points_per_class: *points_per_class,
                    dim: *dim,
                    std_dev: *std_dev,
                    trials: *trials,
                    seed: *seed,
                    max_rejections_per_trial: *max_rejections,
                    tol: self.tol,
                    max_iter: self.max_iter,
                };
                cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
                let census = experiments::census(&cfg)?;
                if self.plot.is_some() {
                    let data = experiments::generate_trial(&cfg, 0)?;
                    let sol = svm::train_hard_margin(&data, self.train_params())?;
                    let point = analysis::radon_point_from_duals(&sol, &data).ok().map(|p| p.point);
                    self.plot(&data, &sol, point.as_deref())?;
                }
                Ok(match self.format {
                    Format::Json => json(
                        "census",
                        CensusReport {
                            two_sv_fraction: census.sv_fraction(2),
                            three_sv_fraction: census.sv_fraction(3),
                            census,
                        },
                    ),
                    Format::Csv => {
                        let mut out = csv_row(["trial", "n_pos_sv", "n_neg_sv", "margin", "flags"].map(String::from));
                        for r in &census.records {
                            let flags: Vec<String> = r
                                .flags
                                .iter()
                                .map(|f| serde_json::to_value(f).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
                                .collect();
                            out += &csv_row([
                                r.trial.to_string(),
                                r.n_pos_sv.to_string(),
                                r.n_neg_sv.to_string(),
                                r.margin.to_string(),
                                flags.join(";"),
                            ]);
                        }
                        out
                    }
                })
            }
        }
    }
}

/// Caps the worker pool from `RADON_SVM_THREADS` when set.
pub fn configure_threads(value: Option<&str>) -> Result<()> {
    let Some(raw) = value else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("RADON_SVM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses `args`, runs the command and writes the result. Returns the
/// process exit code.
pub fn main_with<I, T>(args: I, threads: Option<&str>, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(if e.use_stderr() { err as &mut dyn Write } else { out as &mut dyn Write }, "{e}");
            return code;
        }
    };
    let result = configure_threads(threads).and_then(|()| cli.run());
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
