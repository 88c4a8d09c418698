use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drx_core::dataset::load_csv;
use drx_core::evaluation::{run_benchmark, BenchConfig};
use drx_core::model::ModelKind;
use drx_core::{Execution, TrainConfig};
use drx_service::{fit_model, router, AppState};

#[derive(Parser)]
#[command(name = "drx", version, about = "Interactive forward/backward projection engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a projection and print `id,x,y` per row.
    Fit(FitArgs),
    /// Run the OOS-vs-recompute benchmark and write the CSV report.
    Bench(BenchArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct FitArgs {
    /// `pca` or `autoencoder`.
    #[arg(long, default_value = "pca")]
    method: ModelKind,
    /// Column holding row ids; rows are numbered when absent.
    #[arg(long)]
    id_column: Option<String>,
    /// Fit PCA on raw rather than z-scored features.
    #[arg(long)]
    no_standardize: bool,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    file: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with a full benchmark configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated sample counts (at the fixed dimension count).
    #[arg(long, value_delimiter = ',')]
    samples: Option<Vec<usize>>,
    /// Comma-separated dimension counts (at the fixed sample count).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Comma-separated models.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelKind>>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip timings.
    #[arg(long)]
    accuracy_only: bool,
    /// Run accuracy repeats on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct ServeArgs {
    /// Listening port; the PORT environment variable takes precedence.
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Directory for session snapshots; existing ones are restored at start.
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => fit(args),
        Command::Bench(args) => bench(args),
        Command::Serve(args) => serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn fit(args: FitArgs) -> CliResult {
    let data = load_csv(File::open(&args.file)?, args.id_column.as_deref())?;
    let mut train = TrainConfig::default();
    if let Some(e) = args.epochs {
        train.epochs = e;
    }
    if let Some(s) = args.seed {
        train.seed = s;
    }
    let (model, _) = fit_model(&data, args.method, Some(train), Some(!args.no_standardize))?;
    let positions = model.project_all(&data)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "id,x,y")?;
    for (id, p) in data.ids().iter().zip(&positions) {
        writeln!(out, "{id},{:?},{:?}", p[0], p[1])?;
    }
    out.flush()?;
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult {
    let mut config = match &args.config {
        Some(path) => serde_json::from_reader(File::open(path)?)?,
        None => BenchConfig::default(),
    };
    if let Some(v) = args.samples {
        config.sample_counts = v;
    }
    if let Some(v) = args.dims {
        config.dimension_counts = v;
    }
    if let Some(v) = args.models {
        config.models = v;
    }
    if let Some(v) = args.repeats {
        config.repeats = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    config.accuracy_only |= args.accuracy_only;
    if args.sequential {
        config.execution = Execution::Sequential;
    }
    let report = run_benchmark(&config)?;
    match args.out {
        Some(path) => {
            report.write_csv(File::create(&path)?)?;
            eprintln!("wrote {} rows to {}", report.rows.len(), path.display());
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn port_from_env(cli_port: u16) -> u16 {
    std::env::var("PORT").ok().and_then(|p| p.parse().ok()).unwrap_or(cli_port)
}

fn serve(args: ServeArgs) -> CliResult {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let state = AppState::new(args.snapshot_dir);
    let restored = state.restore_all()?;
    if restored > 0 {
        tracing::info!(restored, "sessions restored");
    }
    let addr: SocketAddr = format!("{}:{}", args.host, port_from_env(args.port)).parse()?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        tracing::info!(%addr, "listening");
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
