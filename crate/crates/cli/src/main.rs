use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use papr_core::harness::csv::{fmt_opt, fmt_sig};
use papr_core::harness::output::{write_ber, write_ccdf};
use papr_core::{run_ber_experiment, run_ccdf_experiment, Error, ExperimentConfig, FilterBank};

/// OFDM clipping-and-filtering PAPR experiments.
#[derive(Debug, Parser)]
#[command(name = "papr-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Flat `key = value` config file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override a config key, e.g. `--set clip.cr_list=0.8,1.6`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> papr_core::Result<ExperimentConfig> {
        ExperimentConfig::load(self.config.as_deref(), &self.set)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PAPR CCDF per method and clipping ratio.
    Ccdf {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Bit error rate over AWGN per method, clipping ratio and Eb/N0.
    Ber {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a designed filter's coefficients as CSV.
    DumpFilter {
        /// previous, proposed or lpf.
        #[arg(long)]
        variant: String,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
}

fn ccdf(cfg: &ExperimentConfig, out: &Path) -> papr_core::Result<()> {
    let digest = FilterBank::for_ccdf(cfg)?.map_or_else(|| "none".to_string(), |b| b.digest());
    let report = run_ccdf_experiment(cfg)?;
    write_ccdf(&report, cfg, &digest, out)?;
    if let Some(r) = report.series.iter().find(|s| s.cr.is_none()) {
        println!(
            "unclipped: PAPR at CCDF {} = {} dB",
            fmt_sig(cfg.report_probability),
            fmt_opt(r.papr_at_report_db)
        );
    }
    if !report.summary.is_empty() {
        println!(
            "{:>6} {:>12} {:>12} {:>12}",
            "CR", "previous", "proposed", "improvement"
        );
        for row in &report.summary {
            println!(
                "{:>6} {:>12} {:>12} {:>12}",
                fmt_sig(row.cr),
                fmt_opt(row.previous_db),
                fmt_opt(row.proposed_db),
                fmt_opt(row.improvement_db())
            );
        }
    }
    println!(
        "{} symbols in {:.1} s -> {}",
        report.symbols,
        report.elapsed_s,
        out.display()
    );
    Ok(())
}

fn ber(cfg: &ExperimentConfig, out: &Path) -> papr_core::Result<()> {
    let digest = FilterBank::design(cfg)?.digest();
    let report = run_ber_experiment(cfg)?;
    write_ber(&report, cfg, &digest, out)?;
    if !report.summary.is_empty() {
        println!(
            "BER at Eb/N0 = {} dB ({})",
            fmt_sig(cfg.report_ebn0_db),
            cfg.scheme
        );
        println!(
            "{:>6} {:>12} {:>12} {:>12}",
            "CR", "previous", "proposed", "difference"
        );
        for row in &report.summary {
            println!(
                "{:>6} {:>12} {:>12} {:>12}",
                fmt_sig(row.cr),
                fmt_opt(row.previous),
                fmt_opt(row.proposed),
                fmt_opt(row.difference())
            );
        }
    }
    println!(
        "{} bits in {:.1} s -> {}",
        report.bits_processed,
        report.elapsed_s,
        out.display()
    );
    Ok(())
}

fn dump_filter(cfg: &ExperimentConfig, variant: &str, out: &Path) -> papr_core::Result<()> {
    let bank = FilterBank::design(cfg)?;
    let filter = bank.by_name(variant)?;
    std::fs::write(out, filter.coefficients_csv()).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> papr_core::Result<()> {
    match cli.command {
        Command::Ccdf { cfg, out } => ccdf(&cfg.load()?, &out),
        Command::Ber { cfg, out } => ber(&cfg.load()?, &out),
        Command::DumpFilter { variant, cfg, out } => dump_filter(&cfg.load()?, &variant, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("papr-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
