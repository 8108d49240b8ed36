//! Command-line interface.

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::compare::{CompareReport, SimulationSettings};
use crate::error::{AhpError, Result};
use crate::format::{load_matrix, MatrixFormat};
use crate::report::{
    build_group, default_consistency_tol, save_result, GroupReport, Method, OutputFormat, SolveReport,
    EQUIVALENCE_TOL,
};
use crate::service;
use crate::store::SessionStore;

#[derive(Debug, Parser)]
#[command(name = "ahp", version, about = "Pairwise-comparison priorities by logarithmic least squares")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Priorities and consistency measures for one matrix.
    Solve(SolveArgs),
    /// Weighted group priorities from several expert matrices.
    Group(GroupArgs),
    /// LLS against the principal eigenvector, optionally by simulation.
    Compare(CompareArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct InputOptions {
    /// Input format; inferred from the extension when omitted.
    #[arg(long = "input-format", value_enum)]
    pub input_format: Option<MatrixFormat>,
    /// Reject entries outside 1/9..9.
    #[arg(long)]
    pub strict_scale: bool,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    #[command(flatten)]
    pub options: InputOptions,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Expert matrix; repeat once per expert.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Expert weight, in the same order as the inputs; equal weights when omitted.
    #[arg(long)]
    pub weight: Vec<f64>,
    /// Also check the KL aggregation route against the log-sum route.
    #[arg(long)]
    pub verify_kl: bool,
    #[command(flatten)]
    pub options: InputOptions,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Number of perturbed matrices to simulate.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Standard deviation of the log-normal judgment noise.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub input_format: Option<MatrixFormat>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Session store directory; the `AHP_STORE` environment variable takes precedence.
    #[arg(long, default_value = "./ahp-store")]
    pub store: PathBuf,
    /// Allowed CORS origin; repeatable. Any origin when omitted.
    #[arg(long)]
    pub cors_origin: Vec<String>,
}

/// Runs a command, writing results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Solve(args) => solve(args, out),
        Command::Group(args) => group(args, out),
        Command::Compare(args) => compare(args, out),
        Command::Serve(args) => serve(args),
    }
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    out.write_all(bytes).and_then(|()| out.flush()).map_err(|e| AhpError::io("stdout", e))
}

pub fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<()> {
    let a = load_matrix(&args.input, args.options.input_format, args.options.strict_scale)?;
    let report = SolveReport::new(&a, args.method, default_consistency_tol());
    emit(out, &save_result(&report, args.options.format))
}

pub fn group(args: GroupArgs, out: &mut dyn Write) -> Result<()> {
    if !args.weight.is_empty() && args.weight.len() != args.input.len() {
        return Err(AhpError::Invalid(format!(
            "{} inputs but {} weights",
            args.input.len(),
            args.weight.len()
        )));
    }
    let matrices = args
        .input
        .iter()
        .map(|p| load_matrix(p, args.options.input_format, args.options.strict_scale))
        .collect::<Result<Vec<_>>>()?;
    let weights = (!args.weight.is_empty()).then_some(args.weight);
    let g = build_group(matrices, weights)?;
    let verify = args.verify_kl.then_some(EQUIVALENCE_TOL);
    let report = GroupReport::new(&g, None, default_consistency_tol(), verify);
    emit(out, &save_result(&report, args.options.format))?;
    match &report.kl_verification {
        Some(v) if !v.passed => Err(AhpError::Invalid(format!(
            "KL equivalence check failed: max difference {:e} exceeds {:e}",
            v.max_abs_diff, v.tol
        ))),
        _ => Ok(()),
    }
}

pub fn compare(args: CompareArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.noise >= 0.0 && args.noise.is_finite()) {
        return Err(AhpError::Invalid("--noise must be finite and non-negative".into()));
    }
    let a = load_matrix(&args.input, args.input_format, false)?;
    let simulation = args.trials.map(|trials| SimulationSettings { trials, noise: args.noise, seed: args.seed });
    let report = CompareReport::new(&a, default_consistency_tol(), simulation);
    emit(out, &save_result(&report, args.format))
}

pub fn serve(args: ServeArgs) -> Result<()> {
    let dir = std::env::var_os("AHP_STORE").map_or(args.store, PathBuf::from);
    let store = Arc::new(SessionStore::open(&dir)?);
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .map_err(|_| AhpError::Invalid(format!("bad listen address {}:{}", args.host, args.port)))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| AhpError::io("runtime", e))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| AhpError::io(addr.to_string(), e))?;
        let local = listener.local_addr().map_err(|e| AhpError::io("listener", e))?;
        tracing::info!(%local, store = %store.path().display(), "listening");
        eprintln!("listening on http://{local}");
        service::serve(listener, store, &args.cors_origin, shutdown_signal()).await
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
    tracing::info!("shutting down");
}
