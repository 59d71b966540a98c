//! Command-line front end.
//!
//! ```text
//! pds-schemes integrate --model builtin:paper-5x5 --scheme geco1 --dt 1 --steps 200
//! pds-schemes stability --model builtin:paper-5x5 --scheme geco2 --dt 0.3576
//! pds-schemes reproduce fig6 --outdir out
//! pds-schemes order --model builtin:paper-2x2 --scheme geco2 --tmax 1 --dt0 0.125 --levels 7
//! pds-schemes random-system --seed 3 --dim 6
//! ```
//!
//! Exit codes: 0 success, 2 usage or model error, 3 numerical failure.

pub mod csv;
pub mod experiments;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::integrators::{integrate, SchemeId, SchemeSpec};
use crate::linalg::expm_apply;
use crate::pds::{parse_model, steady_state_for, ModelDocument};
use crate::stability::{
    classify_fixed_point, critical_step, random_system_8, unconditional_certificate,
};
use csv::{fmt_real, CsvTable};
use experiments::{convergence_study, run_experiment, ExperimentId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pds-schemes",
    version,
    about = "Positive, invariant-preserving integrators and their stability"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a model with a fixed step and write the trajectory as CSV.
    Integrate(IntegrateArgs),
    /// Critical step size, certificate and fixed-point verdict.
    Stability(StabilityArgs),
    /// Regenerate one of the reference experiments.
    Reproduce(ReproduceArgs),
    /// Observed convergence orders against the matrix exponential.
    Order(OrderArgs),
    /// Print a seeded random model of the linear test class.
    RandomSystem(RandomArgs),
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// Model file path or builtin address such as builtin:paper-stiff?K=10.
    #[arg(long)]
    pub model: String,
    /// euler, heun, geco1, geco2, gbbks1 (bbks1) or gbbks2 (bbks2).
    #[arg(long)]
    pub scheme: String,
    /// Stage parameter of gbbks2, at least 1/2.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub common: SchemeArgs,
    #[arg(long)]
    pub dt: f64,
    #[arg(long)]
    pub steps: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: SchemeArgs,
    /// Classify the steady state reached from the model's y0 at this step.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// fig2, fig3a, fig3c, fig4a, fig4c, fig5a, fig5c, fig6, remark8,
    /// jacobians or order.
    pub id: String,
    #[arg(long, default_value = ".")]
    pub outdir: PathBuf,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub common: SchemeArgs,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long)]
    pub dt0: f64,
    #[arg(long)]
    pub levels: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse `args` (including the program name), run, and return the exit code.
/// Output goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn std::io::Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<String, CliError> {
    match command {
        Command::Integrate(a) => run_integrate(&a),
        Command::Stability(a) => run_stability(&a),
        Command::Reproduce(a) => run_reproduce(&a.id, &a.outdir),
        Command::Order(a) => run_order(&a),
        Command::RandomSystem(a) => run_random(&a),
    }
}

/// Load a model from a builtin address or a file path.
pub fn load_model(spec: &str) -> Result<ModelDocument, CliError> {
    let text = if spec.starts_with("builtin:") {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec)
            .map_err(|e| CliError::Usage(format!("cannot read model file '{spec}': {e}")))?
    };
    parse_model(&text).map_err(|e| CliError::Usage(format!("{spec}: {e}")))
}

fn scheme_from(args: &SchemeArgs) -> Result<SchemeSpec, CliError> {
    let id: SchemeId = args
        .scheme
        .parse()
        .map_err(|e: crate::integrators::IntegratorError| CliError::Usage(e.to_string()))?;
    SchemeSpec::new(id)
        .with_alpha(args.alpha)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn emit(table: &CsvTable, out: Option<&Path>) -> Result<String, CliError> {
    match out {
        Some(path) => {
            table.write(path).map_err(|e| {
                CliError::Numerical(format!("cannot write {}: {e}", path.display()))
            })?;
            Ok(String::new())
        }
        None => Ok(table.render()),
    }
}

fn run_integrate(args: &IntegrateArgs) -> Result<String, CliError> {
    let doc = load_model(&args.common.model)?;
    let scheme = scheme_from(&args.common)?;
    if !(args.dt > 0.0) || !args.dt.is_finite() {
        return Err(CliError::Usage(format!(
            "--dt must be finite and positive, got {}",
            args.dt
        )));
    }
    let model = doc.to_model().map_err(|e| CliError::Usage(e.to_string()))?;
    let traj =
        integrate(&model, &scheme, &doc.y0, args.dt, args.steps).map_err(experiments::aborted)?;
    let mut header = vec!["step".to_string(), "t".to_string()];
    header.extend((1..=doc.dim()).map(|i| format!("y_{i}")));
    header.extend(["inv_defect".to_string(), "err".to_string()]);
    let mut table = CsvTable::new(header);
    for (n, y) in traj.states.iter().enumerate() {
        let t = traj.time(n);
        let exact = expm_apply(model.matrix(), &doc.y0, t)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut row = vec![n.to_string(), fmt_real(t)];
        row.extend(y.iter().map(|v| fmt_real(*v)));
        row.push(fmt_real(traj.invariant_defect[n]));
        row.push(fmt_real(experiments::error_inf(y, &exact)));
        table.push(row);
    }
    emit(&table, args.out.as_deref())
}

fn run_stability(args: &StabilityArgs) -> Result<String, CliError> {
    let doc = load_model(&args.common.model)?;
    let scheme = scheme_from(&args.common)?;
    let model = doc.to_model().map_err(|e| CliError::Usage(e.to_string()))?;
    let numerical = |e: crate::stability::StabilityError| CliError::Numerical(e.to_string());
    let cs = critical_step(&model, scheme.id()).map_err(numerical)?;
    let cert = unconditional_certificate(&model).map_err(numerical)?;
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "model: {}", args.common.model);
    let _ = writeln!(w, "scheme: {}", scheme.id());
    match cs.dt_star {
        Some(dt) => {
            let _ = writeln!(w, "critical_dt: {}", fmt_real(dt));
            if let Some(l) = cs.binding_eigenvalue {
                let _ = writeln!(w, "binding_eigenvalue: {} {:+}i", fmt_real(l.re), l.im);
            }
            let _ = writeln!(w, "bracket_width: {}", fmt_real(cs.bracket_width));
        }
        None => {
            let _ = writeln!(w, "critical_dt: unconditional");
        }
    }
    let _ = writeln!(w, "certificate_m: {}", fmt_real(cert.m_value));
    let _ = writeln!(w, "trace_s_minus: {}", fmt_real(cert.trace_s_minus));
    let _ = writeln!(w, "certificate_product: {}", fmt_real(cert.product));
    let _ = writeln!(w, "certificate_holds: {}", cert.holds);
    if let Some(dt) = args.dt {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(CliError::Usage(format!(
                "--dt must be finite and positive, got {dt}"
            )));
        }
        let y_star =
            steady_state_for(&model, &doc.y0).map_err(|e| CliError::Numerical(e.to_string()))?;
        let report = classify_fixed_point(&model, &scheme, &y_star, dt).map_err(numerical)?;
        let ys: Vec<String> = y_star.iter().map(|v| fmt_real(*v)).collect();
        let _ = writeln!(w, "dt: {}", fmt_real(dt));
        let _ = writeln!(w, "steady_state: {}", ys.join(" "));
        let _ = writeln!(w, "kernel_count: {}", report.kernel_count);
        let _ = writeln!(
            w,
            "non_kernel_radius: {}",
            fmt_real(report.non_kernel_radius)
        );
        let _ = writeln!(w, "jacobian_fd_gap: {}", fmt_real(report.fd_max_error));
        let _ = writeln!(w, "verdict: {}", report.verdict);
        for note in &report.notes {
            let _ = writeln!(w, "note: {note}");
        }
    }
    Ok(out)
}

/// Write `<id>.csv` and `<id>.summary.json` into `outdir`.
pub fn run_reproduce(id: &str, outdir: &Path) -> Result<String, CliError> {
    let id: ExperimentId = id.parse()?;
    let exp = run_experiment(id)?;
    let io = |e: std::io::Error| {
        CliError::Numerical(format!("cannot write into {}: {e}", outdir.display()))
    };
    std::fs::create_dir_all(outdir).map_err(io)?;
    exp.table
        .write(&outdir.join(format!("{id}.csv")))
        .map_err(io)?;
    let json = serde_json::to_string_pretty(&exp.summary)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    std::fs::write(outdir.join(format!("{id}.summary.json")), json + "\n").map_err(io)?;
    let mut out = String::new();
    for c in &exp.summary.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{verdict} {id} {}: observed {:e} ({} {:e}, tol {:e})",
            c.name, c.observed, c.relation, c.expected, c.tolerance
        );
    }
    for n in &exp.summary.notes {
        let _ = writeln!(out, "note {id}: {n}");
    }
    Ok(out)
}

fn run_order(args: &OrderArgs) -> Result<String, CliError> {
    let doc = load_model(&args.common.model)?;
    let scheme = scheme_from(&args.common)?;
    let model = doc.to_model().map_err(|e| CliError::Usage(e.to_string()))?;
    let rows = convergence_study(&model, &scheme, &doc.y0, args.tmax, args.dt0, args.levels)?;
    let mut table = CsvTable::new(["dt", "error", "order"]);
    for r in rows {
        table.push(vec![
            fmt_real(r.dt),
            fmt_real(r.error),
            r.order.map(fmt_real).unwrap_or_default(),
        ]);
    }
    emit(&table, args.out.as_deref())
}

fn run_random(args: &RandomArgs) -> Result<String, CliError> {
    if args.dim < 2 {
        return Err(CliError::Usage(format!(
            "--dim must be at least 2, got {}",
            args.dim
        )));
    }
    let model =
        random_system_8(args.seed, args.dim).map_err(|e| CliError::Numerical(e.to_string()))?;
    let doc = ModelDocument {
        kind: crate::pds::ModelKind::Linear,
        matrix: model.matrix().clone(),
        y0: vec![1.0; args.dim],
    };
    let text = format!("# random system, seed {}\n{}", args.seed, doc.to_text());
    match &args.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| {
                CliError::Numerical(format!("cannot write {}: {e}", path.display()))
            })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
