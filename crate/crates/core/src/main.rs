use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use bigjump::cli::{self, EstimatorKind, ExperimentSpec, Format, Overrides, Workers};
use bigjump::{Result, Variant};

/// Heavy-tailed random sums: Monte Carlo estimates of P(S_n > x), its
/// one-big-jump decomposition, and the matching analytic bounds.
///
/// Settings come from defaults, then the config file, then these flags.
#[derive(Debug, Parser)]
#[command(name = "bigjump", version)]
struct Args {
    /// TOML experiment file.
    #[arg(long, short = 'f')]
    config: Option<PathBuf>,

    #[arg(long)]
    alpha: Option<f64>,

    /// PurePareto or SmoothPareto.
    #[arg(long)]
    variant: Option<Variant>,

    #[arg(long)]
    u0: Option<f64>,

    /// Number of summands (repeatable).
    #[arg(long)]
    n: Vec<u64>,

    /// Deviation level: a number, or lo:hi:count for a log-spaced grid (repeatable).
    #[arg(long)]
    x: Vec<String>,

    #[arg(long)]
    c: Option<f64>,

    #[arg(long)]
    b: Option<f64>,

    #[arg(long)]
    samples: Option<u64>,

    #[arg(long)]
    seed: Option<u64>,

    /// Comma-separated subset of crude,decomposition,one_big_pos,one_big_neg,one_mid,refined.
    /// An empty string runs the bounds only.
    #[arg(long)]
    estimators: Option<String>,

    #[arg(long)]
    ci_level: Option<f64>,

    /// "auto" or a thread count.
    #[arg(long)]
    workers: Option<Workers>,

    /// Output path; "-" for stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv or json.
    #[arg(long)]
    format: Option<Format>,
}

fn overrides(args: &Args) -> Result<Overrides> {
    let mut x = Vec::new();
    for s in &args.x {
        x.extend(cli::parse_x_values(s)?);
    }
    let estimators = args
        .estimators
        .as_deref()
        .map(|s| {
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(str::parse::<EstimatorKind>)
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok(Overrides {
        alpha: args.alpha,
        variant: args.variant,
        u0: args.u0,
        n: args.n.clone(),
        x,
        c: args.c,
        b: args.b,
        samples: args.samples,
        seed: args.seed,
        estimators,
        ci_level: args.ci_level,
        workers: args.workers,
        out: args.out.clone(),
        format: args.format,
    })
}

fn main_inner(args: Args) -> Result<()> {
    let base = match &args.config {
        Some(p) => ExperimentSpec::load(p)?,
        None => ExperimentSpec::default(),
    };
    let spec = overrides(&args)?.apply(base)?;
    let report = cli::run_with_workers(&spec)?;
    for p in report.points.iter().filter(|p| p.regime_violation) {
        eprintln!(
            "warning: n={} x={} has n*x^-alpha = {} >= 1 (outside the large-deviation regime)",
            p.n, p.x, p.ratios[0]
        );
    }
    let text = cli::emit(&report, spec.output.format)?;
    cli::write_report(&text, &spec.output.path)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
