use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pullfit::commands::{cmd_fit, cmd_recover, cmd_report, cmd_simulate, OutputFormat};
use pullfit::config::{parse_config, RunConfig};
use pullfit::error::{Error, Result};
use pullfit::observer::SimCounts;
use pullfit::stimulus::CompoundLayout;

#[derive(Parser)]
#[command(
    name = "pullfit",
    version,
    about = "Fit position estimates in compound graphs as weighted mixtures of single-series percepts"
)]
struct Cli {
    /// Config file (`section.key = value` lines); defaults used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate an observer dataset and write the trial CSV.
    Simulate {
        /// Where to write the trial CSV (default: the configured io.trials).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Simulation seed (default: the configured base seed).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_single_line: Option<usize>,
        #[arg(long)]
        n_single_bar: Option<usize>,
        #[arg(long)]
        n_compound_line: Option<usize>,
        #[arg(long)]
        n_compound_bar: Option<usize>,
        /// Which kind occupies the top half of compound displays.
        #[arg(long, value_parser = ["line_above_bar", "bar_above_line"])]
        layout: Option<String>,
        /// Mixture weight of the simulated observer on line-target trials.
        #[arg(long)]
        w_line: Option<f64>,
        /// Mixture weight of the simulated observer on bar-target trials.
        #[arg(long)]
        w_bar: Option<f64>,
    },
    /// Fit mixture weights to a trial CSV and emit a report.
    Fit {
        /// Trial CSV to fit (default: the configured io.trials).
        trials: Option<PathBuf>,
        /// Write the report here (default: the configured io.out);
        /// with neither, the report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json", value_parser = ["json", "csv", "svg"])]
        format: String,
        /// Base seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Repeat-count override.
        #[arg(long)]
        repeats: Option<usize>,
        /// Synthetic samples per likelihood evaluation.
        #[arg(long)]
        m_samples: Option<usize>,
    },
    /// Parameter-recovery sweep over a weight grid.
    Recover {
        /// Grid as `lo:hi:step`, e.g. 0.80:1.00:0.05.
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        m_samples: Option<usize>,
    },
    /// Re-emit a saved JSON report as json, csv, or svg.
    Report {
        /// A report written by `fit --format json`.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv", value_parser = ["json", "csv", "svg"])]
        format: String,
    },
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("PULLFIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            Error::Validation(format!("PULLFIT_THREADS `{raw}` is not a positive thread count"))
        })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Validation(format!("thread pool setup failed: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => parse_config(p),
        None => Ok(RunConfig::default()),
    }
}

fn resolve_path(flag: Option<PathBuf>, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    flag.or_else(|| fallback.clone()).ok_or_else(|| {
        Error::Validation(format!("no {what}: pass it on the command line or set io.trials"))
    })
}

fn apply_fit_overrides(
    cfg: &mut RunConfig,
    seed: Option<u64>,
    repeats: Option<usize>,
    m_samples: Option<usize>,
) -> Result<()> {
    if let Some(s) = seed {
        cfg.fit.base_seed = s;
    }
    if let Some(r) = repeats {
        cfg.fit.repeats = r;
    }
    if let Some(m) = m_samples {
        cfg.fit.m = m;
    }
    cfg.fit.validate()
}

fn run(cli: Cli) -> Result<String> {
    init_threads()?;
    let mut cfg = load_config(&cli.config)?;
    match cli.cmd {
        Cmd::Simulate {
            out,
            seed,
            n_single_line,
            n_single_bar,
            n_compound_line,
            n_compound_bar,
            layout,
            w_line,
            w_bar,
        } => {
            let defaults = SimCounts::default();
            let counts = SimCounts {
                n_single_line: n_single_line.unwrap_or(defaults.n_single_line),
                n_single_bar: n_single_bar.unwrap_or(defaults.n_single_bar),
                n_compound_line_target: n_compound_line.unwrap_or(defaults.n_compound_line_target),
                n_compound_bar_target: n_compound_bar.unwrap_or(defaults.n_compound_bar_target),
            };
            if let Some(l) = layout {
                cfg.layout = match l.as_str() {
                    "line_above_bar" => CompoundLayout::LineAboveBar,
                    _ => CompoundLayout::BarAboveLine,
                };
            }
            if let Some(w) = w_line {
                cfg.observer.w_line_target = w;
            }
            if let Some(w) = w_bar {
                cfg.observer.w_bar_target = w;
            }
            cfg.observer.validate()?;
            let out = resolve_path(out, &cfg.trials_path, "trial CSV destination")?;
            cmd_simulate(&cfg, counts, seed.unwrap_or(cfg.fit.base_seed), &out)
        }
        Cmd::Fit {
            trials,
            out,
            format,
            seed,
            repeats,
            m_samples,
        } => {
            apply_fit_overrides(&mut cfg, seed, repeats, m_samples)?;
            let trials = resolve_path(trials, &cfg.trials_path, "trial CSV")?;
            let out = out.or_else(|| cfg.out_path.clone());
            cmd_fit(&cfg, &trials, out.as_deref(), format.parse::<OutputFormat>()?)
        }
        Cmd::Recover {
            grid,
            out,
            seed,
            repeats,
            m_samples,
        } => {
            apply_fit_overrides(&mut cfg, seed, repeats, m_samples)?;
            cmd_recover(&cfg, &grid, out.as_deref())
        }
        Cmd::Report { input, out, format } => {
            cmd_report(&input, out.as_deref(), format.parse::<OutputFormat>()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pullfit: error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
