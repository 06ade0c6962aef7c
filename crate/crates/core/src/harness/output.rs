//! Result files and their manifests.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::csv::*;
use crate::harness::experiment::{BerReport, CcdfReport};
use crate::harness::manifest::{write_file, RunManifest};
use crate::metrics::AWGN_FORMULA;

pub const CCDF_FILE: &str = "ccdf.csv";
pub const CCDF_SUMMARY_FILE: &str = "ccdf_summary.csv";
pub const TELEMETRY_FILE: &str = "telemetry.csv";
pub const CCDF_MANIFEST_FILE: &str = "ccdf_manifest.txt";
pub const BER_FILE: &str = "ber.csv";
pub const BER_SUMMARY_FILE: &str = "ber_summary.csv";
pub const ANALYTICAL_FILE: &str = "ber_analytical.csv";
pub const BER_MANIFEST_FILE: &str = "ber_manifest.txt";

fn line(s: &mut String, fields: &[String]) {
    writeln!(s, "{}", fields.join(",")).expect("writing to a String");
}

pub fn render_ccdf(report: &CcdfReport) -> String {
    let mut s = format!("{CCDF_HEADER}\n");
    for series in &report.series {
        let c = &series.curve;
        for (t, p) in c.thresholds_db.iter().zip(&c.probabilities) {
            line(
                &mut s,
                &[
                    series.variant.to_string(),
                    fmt_cr(series.cr),
                    fmt_sig(*t),
                    fmt_sig(*p),
                    c.sample_count.to_string(),
                ],
            );
        }
    }
    s
}

pub fn render_ccdf_summary(report: &CcdfReport) -> String {
    let mut s = format!("{CCDF_SUMMARY_HEADER}\n");
    for row in &report.summary {
        line(
            &mut s,
            &[
                fmt_sig(row.cr),
                fmt_opt(row.previous_db),
                fmt_opt(row.proposed_db),
                fmt_opt(row.improvement_db()),
            ],
        );
    }
    s
}

pub fn render_telemetry(report: &CcdfReport) -> String {
    let mut s = format!("{TELEMETRY_HEADER}\n");
    for row in &report.telemetry {
        let t = &row.stages;
        line(
            &mut s,
            &[
                row.symbol.to_string(),
                row.variant.to_string(),
                fmt_sig(row.cr),
                fmt_sig(t.papr_pre_db),
                fmt_sig(t.papr_clip_db),
                fmt_sig(t.papr_filt_db),
            ],
        );
    }
    s
}

pub fn render_ber(report: &BerReport) -> String {
    let mut s = format!("{BER_HEADER}\n");
    for row in &report.rows {
        let p = &row.point;
        line(
            &mut s,
            &[
                row.variant.to_string(),
                fmt_cr(row.cr),
                fmt_sig(p.snr_db),
                p.bit_errors.to_string(),
                p.bits_total.to_string(),
                fmt_sig(p.ber),
                row.confident.to_string(),
            ],
        );
    }
    s
}

pub fn render_ber_summary(report: &BerReport) -> String {
    let mut s = format!("{BER_SUMMARY_HEADER}\n");
    for row in &report.summary {
        line(
            &mut s,
            &[
                fmt_sig(row.cr),
                fmt_opt(row.previous),
                fmt_opt(row.proposed),
                fmt_opt(row.difference()),
            ],
        );
    }
    s
}

pub fn render_analytical(report: &BerReport, cfg: &ExperimentConfig) -> String {
    let mut s = format!("{ANALYTICAL_HEADER}\n");
    for (snr, ber) in &report.analytical {
        line(
            &mut s,
            &[cfg.scheme.to_string(), fmt_sig(*snr), fmt_sig(*ber)],
        );
    }
    s
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_ccdf(
    report: &CcdfReport,
    cfg: &ExperimentConfig,
    filter_digest: &str,
    dir: &Path,
) -> Result<RunManifest> {
    create_dir(dir)?;
    let mut m = RunManifest::new("ccdf", cfg, filter_digest);
    m.push("symbols", report.symbols);
    m.push(
        "papr_domain",
        match cfg.clip_domain {
            crate::papr::ClipDomain::PassbandHard => "passband",
            crate::papr::ClipDomain::BasebandPolar => "baseband",
        },
    );
    if let Some(r) = report.series.iter().find(|s| s.cr.is_none()) {
        m.push("unclipped_papr_db", fmt_opt(r.papr_at_report_db));
    }
    m.push("wall_clock_s", format!("{:.3}", report.elapsed_s));
    m.push(
        format!("digest.{CCDF_FILE}"),
        write_file(dir, CCDF_FILE, &render_ccdf(report))?,
    );
    m.push(
        format!("digest.{CCDF_SUMMARY_FILE}"),
        write_file(dir, CCDF_SUMMARY_FILE, &render_ccdf_summary(report))?,
    );
    if cfg.telemetry {
        m.push(
            format!("digest.{TELEMETRY_FILE}"),
            write_file(dir, TELEMETRY_FILE, &render_telemetry(report))?,
        );
    }
    write_file(dir, CCDF_MANIFEST_FILE, &m.render())?;
    Ok(m)
}

pub fn write_ber(
    report: &BerReport,
    cfg: &ExperimentConfig,
    filter_digest: &str,
    dir: &Path,
) -> Result<RunManifest> {
    create_dir(dir)?;
    let mut m = RunManifest::new("ber", cfg, filter_digest);
    m.push("awgn_calibration", AWGN_FORMULA);
    m.push("symbols_per_point", report.symbols_per_point);
    m.push("bits_processed", report.bits_processed);
    m.push("wall_clock_s", format!("{:.3}", report.elapsed_s));
    m.push(
        format!("digest.{BER_FILE}"),
        write_file(dir, BER_FILE, &render_ber(report))?,
    );
    m.push(
        format!("digest.{BER_SUMMARY_FILE}"),
        write_file(dir, BER_SUMMARY_FILE, &render_ber_summary(report))?,
    );
    m.push(
        format!("digest.{ANALYTICAL_FILE}"),
        write_file(dir, ANALYTICAL_FILE, &render_analytical(report, cfg))?,
    );
    write_file(dir, BER_MANIFEST_FILE, &m.render())?;
    Ok(m)
}
