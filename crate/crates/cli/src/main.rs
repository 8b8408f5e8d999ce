//! `smevor` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/output failure,
//! 3 configuration error (including an indicator with no spread to
//! normalize), 4 data error. Failures print one JSON object to
//! stderr; non-fatal diagnostics go to stderr as JSON lines.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use smevor::config::RunConfig;
use smevor::pipeline::{self, RunOutput};
use smevor::{Error, IndicatorKind, IndicatorPanel, SignFilter};

#[derive(Parser)]
#[command(
    name = "smevor",
    version,
    about = "Innovation/performance clustering, outliers and Voronoi maps for firm panels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Panel CSV (overrides `input` in the config; default is the bundled synthetic fixture).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct MapArgs {
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    /// pos, neg or all.
    #[arg(long)]
    sign: Option<String>,
    /// Company ids to label on the map.
    #[arg(long, value_delimiter = ',')]
    highlight: Option<Vec<u32>>,
    #[arg(long)]
    swap_axes: bool,
}

#[derive(Args, Clone)]
struct FitArgs {
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    year_a: Option<i32>,
    #[arg(long)]
    year_b: Option<i32>,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics of the windowed averages.
    Stats(Common),
    /// Normalize, assign clusters, cross-tabulate and profile.
    Cluster(Common),
    /// Sigma-band outlier flags and systematic classification.
    Outliers(Common),
    /// Voronoi map of a log-scaled indicator plane.
    Map {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        map: MapArgs,
    },
    /// Power-law fit of an indicator between two years.
    Fit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// All of the above into one directory tree.
    Report(Common),
    /// Write the seeded synthetic 62-company panel as CSV.
    Fixture {
        #[arg(long, default_value_t = smevor::fixture::FIXTURE_SEED)]
        seed: u64,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 2,
        Error::Config(_) | Error::DegenerateColumn(_) => 3,
        _ => 4,
    }
}

fn error_json(e: &Error) -> serde_json::Value {
    let mut body = json!({"kind": e.kind(), "message": e.to_string()});
    if let Error::Io { path, .. } = e {
        body["path"] = json!(path.display().to_string());
    }
    json!({ "error": body })
}

fn load_config(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(input) = &common.input {
        cfg.input = Some(input.clone());
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn kind_arg(s: &Option<String>, fallback: IndicatorKind) -> Result<IndicatorKind, Error> {
    match s {
        Some(s) => s
            .parse()
            .map_err(|_| Error::Config(format!("unknown indicator `{s}`"))),
        None => Ok(fallback),
    }
}

type Action = Box<dyn FnOnce(&RunConfig, &IndicatorPanel, &Path) -> Result<RunOutput, Error>>;

fn run(command: Command) -> Result<RunOutput, Error> {
    let (common, action): (Common, Action) = match command {
        Command::Stats(c) => (c, Box::new(pipeline::run_stats)),
        Command::Cluster(c) => (c, Box::new(pipeline::run_cluster)),
        Command::Outliers(c) => (c, Box::new(pipeline::run_outliers)),
        Command::Report(c) => (c, Box::new(pipeline::run_report)),
        Command::Map { common, map } => (
            common,
            Box::new(move |cfg: &RunConfig, panel: &IndicatorPanel, dir: &Path| {
                let mut cfg = cfg.clone();
                cfg.map.x = kind_arg(&map.x, cfg.map.x)?;
                cfg.map.y = kind_arg(&map.y, cfg.map.y)?;
                if let Some(s) = &map.sign {
                    cfg.map.sign = s.parse::<SignFilter>()?;
                }
                if let Some(h) = map.highlight {
                    cfg.map.highlight = h;
                }
                cfg.map.swap_axes |= map.swap_axes;
                cfg.validate()?;
                pipeline::run_map(&cfg, panel, dir, cfg.map.x, cfg.map.y, cfg.map.sign)
            }),
        ),
        Command::Fit { common, fit } => (
            common,
            Box::new(move |cfg: &RunConfig, panel: &IndicatorPanel, dir: &Path| {
                let kind = kind_arg(&fit.kind, cfg.fit.kind)?;
                let a = fit.year_a.unwrap_or(cfg.fit.year_a);
                let b = fit.year_b.unwrap_or(cfg.fit.year_b);
                pipeline::run_fit(panel, dir, kind, a, b)
            }),
        ),
        Command::Fixture { seed, out } => {
            let csv = smevor::fixture::generate(seed).to_csv();
            let mut output = RunOutput::default();
            match out {
                Some(path) => {
                    std::fs::write(&path, csv).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    output.files.push(path);
                }
                None => print!("{csv}"),
            }
            return Ok(output);
        }
    };
    let cfg = load_config(&common)?;
    let (panel, mut diagnostics) = pipeline::load_panel(&cfg)?;
    let mut output = action(&cfg, &panel, &cfg.output_dir)?;
    diagnostics.append(&mut output.diagnostics);
    output.diagnostics = diagnostics;
    Ok(output)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SMEVOR_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap would exit 2, which is taken by I/O failures.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(output) => {
            for d in &output.diagnostics {
                eprintln!("{}", d.to_json_line());
            }
            for f in &output.files {
                log::info!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
