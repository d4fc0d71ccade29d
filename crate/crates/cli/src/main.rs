use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ftr_noma_cli::output::with_outputs;
use ftr_noma_cli::{load_config, run, validate, CliError, Overrides};

#[derive(Parser)]
#[command(name = "ftr-noma", version, about = "Outage and capacity of two-user NOMA over fluctuating two-ray fading")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides [output] dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte-Carlo realizations per grid point (draw count for `sample`).
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Series truncation length.
    #[arg(long, global = true)]
    terms: Option<usize>,

    /// Also write SVG plots.
    #[arg(long, global = true)]
    plots: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Outage probability of both users.
    Op,
    /// Ergodic sum capacity of the configured scheme.
    Ec,
    /// Sum rate of GPA, OPA and TDMA on common channel draws.
    Sumrate,
    /// Check closed forms against simulation; exit code 3 on any failed check.
    Validate,
    /// Raw channel gains for external analysis.
    Sample,
}

fn init_threads() {
    if let Ok(v) = std::env::var("FTR_NOMA_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring FTR_NOMA_THREADS={v}"),
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let config = cli.config.clone().ok_or_else(|| ftr_noma_cli::ConfigError::Invalid {
        key: "--config".into(),
        line: None,
        reason: "a scenario file is required".into(),
    })?;
    let overrides = Overrides {
        out: cli.out,
        seed: cli.seed,
        samples: if matches!(cli.command, Command::Sample) { None } else { cli.samples },
        terms: cli.terms,
        plots: cli.plots,
    };
    let cfg = load_config(&config, &overrides)?;
    let (report, files) = with_outputs(&cfg.outputs, |out| match cli.command {
        Command::Op => run::run_op(&cfg, out).map(|_| None),
        Command::Ec => run::run_ec(&cfg, out).map(|_| None),
        Command::Sumrate => run::run_sumrate(&cfg, out).map(|_| None),
        Command::Sample => {
            let n = cli.samples.unwrap_or(cfg.scenario.n_samples);
            run::run_sample(&cfg, n, out).map(|_| None)
        }
        Command::Validate => {
            let report = validate::validate(&cfg)?;
            out.text("validate_report.txt", &report.render())?;
            Ok(Some(report))
        }
    })?;
    if let Some(report) = &report {
        print!("{}", report.render());
    }
    for f in &files {
        eprintln!("wrote {}", f.display());
    }
    match report {
        Some(r) if !r.passed() => Err(CliError::Acceptance {
            failed: r.failed(),
            total: r.checks.len(),
        }),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    init_threads();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
