use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cyclic_rmt::runner::{run, DataFormat, Experiment, RunConfig, RunReport};
use cyclic_rmt::PairingPolicy;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Fig1Cc,
    Fig2Rc,
    Fig3Generic,
    Structural,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PairingArg {
    One,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Monte Carlo experiments on Gaussian ensembles of real cyclic matrices.
#[derive(Debug, Parser)]
#[command(name = "cyclic-rmt", version)]
struct Args {
    #[arg(long, value_enum, default_value = "all")]
    experiment: ExperimentArg,

    /// Matrix size N; each experiment has its own default.
    #[arg(long)]
    dimension: Option<usize>,

    /// Scale A of the Gaussian weight exp(-A tr MᵀM).
    #[arg(long = "scale-a", default_value_t = 1.0)]
    scale_a: f64,

    /// Realization count; each experiment has its own default.
    #[arg(long)]
    realizations: Option<usize>,

    #[arg(long, default_value_t = RunConfig::default().seed)]
    seed: u64,

    #[arg(long, value_enum, default_value = "one")]
    pairing: PairingArg,

    #[arg(long, default_value_t = 50)]
    bins: usize,

    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,

    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

impl From<Args> for RunConfig {
    fn from(args: Args) -> Self {
        let defaults = RunConfig::default();
        RunConfig {
            experiment: match args.experiment {
                ExperimentArg::Fig1Cc => Experiment::Fig1Cc,
                ExperimentArg::Fig2Rc => Experiment::Fig2Rc,
                ExperimentArg::Fig3Generic => Experiment::Fig3Generic,
                ExperimentArg::Structural => Experiment::Structural,
                ExperimentArg::All => Experiment::All,
            },
            dimension: args.dimension,
            scale: args.scale_a,
            realizations: args.realizations,
            seed: args.seed,
            pairing: match args.pairing {
                PairingArg::One => PairingPolicy::OnePerRealization,
                PairingArg::All => PairingPolicy::All,
            },
            bins: args.bins,
            out_dir: args.out_dir,
            workers: args.workers.unwrap_or(defaults.workers),
            format: match args.format {
                FormatArg::Csv => DataFormat::Csv,
                FormatArg::Json => DataFormat::Json,
            },
        }
    }
}

fn summarize(report: &RunReport) {
    for r in &report.experiments {
        println!(
            "{:<14} N={:<4} n={:<6} mean={:.5} (analytic {:.5})  KS={:.5} < {:.4}  {}",
            r.plan.id,
            r.plan.dimension,
            r.sample_size,
            r.empirical_mean_spacing,
            r.analytic_mean_spacing,
            r.ks_distance,
            r.plan.ks_threshold,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    if let Some(s) = &report.structural {
        let worst = |f: fn(&cyclic_rmt::runner::StructuralRow) -> f64| s.rows.iter().map(f).fold(0.0, f64::max);
        println!(
            "structural     pseudo-symmetry={:e} eigen={:.2e} round-trip={:.2e}  {}",
            worst(|r| r.max_pseudo_symmetry_residual),
            worst(|r| r.max_eigen_equation_residual),
            worst(|r| r.max_round_trip_error),
            if s.passed { "PASS" } else { "FAIL" }
        );
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("report: {}", report.config.out_dir.join("report.json").display());
}

/// 0 when every check passes, 1 on a statistical failure, 2 on a
/// configuration or I/O error.
fn exit_code(result: &cyclic_rmt::Result<RunReport>) -> u8 {
    match result {
        Ok(report) if report.passed => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    let config = RunConfig::from(Args::parse());
    let result = run(&config);
    match &result {
        Ok(report) => summarize(report),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cyclic_rmt::runner::Timings;

    fn report(passed: bool) -> RunReport {
        RunReport {
            format_version: 1,
            config: RunConfig::default(),
            experiments: Vec::new(),
            structural: None,
            plot_script: None,
            warnings: Vec::new(),
            passed,
            timings: Timings::default(),
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(report(true))), 0);
        assert_eq!(exit_code(&Ok(report(false))), 1);
        assert_eq!(exit_code(&Err(cyclic_rmt::Error::Config("x".into()))), 2);
    }

    #[test]
    fn flags_map_onto_config() {
        let args = Args::parse_from([
            "cyclic-rmt",
            "--experiment",
            "fig3-generic",
            "--dimension",
            "20",
            "--scale-a",
            "0.5",
            "--realizations",
            "300",
            "--seed",
            "9",
            "--pairing",
            "all",
            "--bins",
            "12",
            "--out-dir",
            "x",
            "--workers",
            "3",
            "--format",
            "json",
        ]);
        let c = RunConfig::from(args);
        assert_eq!(c.experiment, Experiment::Fig3Generic);
        assert_eq!(c.dimension, Some(20));
        assert_eq!(c.scale, 0.5);
        assert_eq!(c.realizations, Some(300));
        assert_eq!(c.seed, 9);
        assert_eq!(c.pairing, PairingPolicy::All);
        assert_eq!(c.bins, 12);
        assert_eq!(c.out_dir, PathBuf::from("x"));
        assert_eq!(c.workers, 3);
        assert_eq!(c.format, DataFormat::Json);
    }
}
