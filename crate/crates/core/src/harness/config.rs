//! Flat `key = value` experiment configuration.
//!
//! Keys are dotted (`ofdm.n`, `clip.cr_list`, ...), `#` starts a comment, list
//! values are comma separated. Command-line overrides use the same keys.

use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::modem::Scheme;
use crate::ofdm::OfdmParams;
use crate::papr::{ClipDomain, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    PerSymbol,
    /// The analytic unclipped RMS, `sqrt(1 / L)` for unit-energy symbols.
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    pub previous_order: usize,
    pub previous_cutoff_hz: f64,
    pub proposed_order: usize,
    pub proposed_ripple_db: f64,
    pub proposed_low_hz: f64,
    pub proposed_high_hz: f64,
    pub lpf_order: usize,
    pub lpf_cutoff_hz: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            previous_order: 64,
            previous_cutoff_hz: 1.5e6,
            proposed_order: 1,
            proposed_ripple_db: 4.0,
            proposed_low_hz: 1.5e6,
            proposed_high_hz: 2.5e6,
            lpf_order: 64,
            lpf_cutoff_hz: 2.0e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ofdm: OfdmParams,
    pub scheme: Scheme,
    pub variants: Vec<Variant>,
    pub cr_list: Vec<f64>,
    pub clip_domain: ClipDomain,
    pub sigma: SigmaMode,
    pub seed: u64,
    /// 0 means one worker per available core.
    pub workers: usize,
    pub ccdf_symbols: usize,
    pub threshold_min_db: f64,
    pub threshold_max_db: f64,
    pub threshold_step_db: f64,
    pub report_probability: f64,
    pub ebn0_db: Vec<f64>,
    pub bits_per_point: u64,
    /// Stop a BER point once it has this many errors; 0 runs the full budget.
    pub target_errors: u64,
    pub min_confident_errors: u64,
    pub report_ebn0_db: f64,
    pub filters: FilterConfig,
    /// FFT window start inside the guard interval; `None` is half the CP.
    pub rx_advance: Option<usize>,
    pub telemetry: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            ofdm: OfdmParams::default(),
            scheme: Scheme::Qpsk,
            variants: vec![Variant::Previous, Variant::Proposed],
            cr_list: vec![0.8, 1.0, 1.2, 1.4, 1.6],
            clip_domain: ClipDomain::PassbandHard,
            sigma: SigmaMode::PerSymbol,
            seed: 1,
            workers: 0,
            ccdf_symbols: 100_000,
            threshold_min_db: 0.0,
            threshold_max_db: 16.0,
            threshold_step_db: 0.02,
            report_probability: 0.1,
            ebn0_db: vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0],
            bits_per_point: 2_000_000,
            target_errors: 0,
            min_confident_errors: 100,
            report_ebn0_db: 6.0,
            filters: FilterConfig::default(),
            rx_advance: None,
            telemetry: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse `{value}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(Error::Config(format!(
            "{key}: expected a boolean, got `{other}`"
        ))),
    }
}

fn join<T: Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Split `key=value`, as given on the command line.
pub fn split_assignment(s: &str) -> Result<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| Error::Config(format!("expected key=value, got `{s}`")))
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let f = &mut self.filters;
        match key {
            "ofdm.n" => self.ofdm.n_subcarriers = parse(key, value)?,
            "ofdm.oversample" => self.ofdm.oversample = parse(key, value)?,
            "ofdm.cp" => self.ofdm.cp_len = parse(key, value)?,
            "ofdm.bandwidth_hz" => self.ofdm.bandwidth_hz = parse(key, value)?,
            "ofdm.carrier_hz" => self.ofdm.carrier_hz = parse(key, value)?,
            "modem.scheme" => self.scheme = parse(key, value)?,
            "run.variants" => self.variants = parse_list(key, value)?,
            "run.seed" => self.seed = parse(key, value)?,
            "run.workers" => self.workers = parse(key, value)?,
            "clip.cr_list" => self.cr_list = parse_list(key, value)?,
            "clip.domain" => {
                self.clip_domain = match value.trim() {
                    "passband" => ClipDomain::PassbandHard,
                    "baseband" => ClipDomain::BasebandPolar,
                    other => {
                        return Err(Error::Config(format!(
                            "{key}: expected passband|baseband, got `{other}`"
                        )))
                    }
                }
            }
            "clip.sigma" => {
                self.sigma = match value.trim() {
                    "per_symbol" => SigmaMode::PerSymbol,
                    "global" => SigmaMode::Global,
                    other => {
                        return Err(Error::Config(format!(
                            "{key}: expected per_symbol|global, got `{other}`"
                        )))
                    }
                }
            }
            "ccdf.symbols" => self.ccdf_symbols = parse(key, value)?,
            "ccdf.threshold_min_db" => self.threshold_min_db = parse(key, value)?,
            "ccdf.threshold_max_db" => self.threshold_max_db = parse(key, value)?,
            "ccdf.threshold_step_db" => self.threshold_step_db = parse(key, value)?,
            "ccdf.report_probability" => self.report_probability = parse(key, value)?,
            "ber.ebn0_db" => self.ebn0_db = parse_list(key, value)?,
            "ber.bits_per_point" => self.bits_per_point = parse(key, value)?,
            "ber.target_errors" => self.target_errors = parse(key, value)?,
            "ber.min_confident_errors" => self.min_confident_errors = parse(key, value)?,
            "ber.report_ebn0_db" => self.report_ebn0_db = parse(key, value)?,
            "filter.previous.order" => f.previous_order = parse(key, value)?,
            "filter.previous.cutoff_hz" => f.previous_cutoff_hz = parse(key, value)?,
            "filter.proposed.order" => f.proposed_order = parse(key, value)?,
            "filter.proposed.ripple_db" => f.proposed_ripple_db = parse(key, value)?,
            "filter.proposed.low_hz" => f.proposed_low_hz = parse(key, value)?,
            "filter.proposed.high_hz" => f.proposed_high_hz = parse(key, value)?,
            "filter.lpf.order" => f.lpf_order = parse(key, value)?,
            "filter.lpf.cutoff_hz" => f.lpf_cutoff_hz = parse(key, value)?,
            "rx.fft_advance" => {
                self.rx_advance = match value.trim() {
                    "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "output.telemetry" => self.telemetry = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Every key with its resolved value, in a fixed order. Feeding these back
    /// through [`ExperimentConfig::set`] reproduces the config.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let f = &self.filters;
        let o = &self.ofdm;
        vec![
            ("ofdm.n", o.n_subcarriers.to_string()),
            ("ofdm.oversample", o.oversample.to_string()),
            ("ofdm.cp", o.cp_len.to_string()),
            ("ofdm.bandwidth_hz", o.bandwidth_hz.to_string()),
            ("ofdm.carrier_hz", o.carrier_hz.to_string()),
            ("modem.scheme", self.scheme.name().to_string()),
            ("run.variants", join(&self.variants)),
            ("run.seed", self.seed.to_string()),
            ("run.workers", self.workers.to_string()),
            ("clip.cr_list", join(&self.cr_list)),
            (
                "clip.domain",
                match self.clip_domain {
                    ClipDomain::PassbandHard => "passband",
                    ClipDomain::BasebandPolar => "baseband",
                }
                .to_string(),
            ),
            (
                "clip.sigma",
                match self.sigma {
                    SigmaMode::PerSymbol => "per_symbol",
                    SigmaMode::Global => "global",
                }
                .to_string(),
            ),
            ("ccdf.symbols", self.ccdf_symbols.to_string()),
            ("ccdf.threshold_min_db", self.threshold_min_db.to_string()),
            ("ccdf.threshold_max_db", self.threshold_max_db.to_string()),
            ("ccdf.threshold_step_db", self.threshold_step_db.to_string()),
            (
                "ccdf.report_probability",
                self.report_probability.to_string(),
            ),
            ("ber.ebn0_db", join(&self.ebn0_db)),
            ("ber.bits_per_point", self.bits_per_point.to_string()),
            ("ber.target_errors", self.target_errors.to_string()),
            (
                "ber.min_confident_errors",
                self.min_confident_errors.to_string(),
            ),
            ("ber.report_ebn0_db", self.report_ebn0_db.to_string()),
            ("filter.previous.order", f.previous_order.to_string()),
            (
                "filter.previous.cutoff_hz",
                f.previous_cutoff_hz.to_string(),
            ),
            ("filter.proposed.order", f.proposed_order.to_string()),
            (
                "filter.proposed.ripple_db",
                f.proposed_ripple_db.to_string(),
            ),
            ("filter.proposed.low_hz", f.proposed_low_hz.to_string()),
            ("filter.proposed.high_hz", f.proposed_high_hz.to_string()),
            ("filter.lpf.order", f.lpf_order.to_string()),
            ("filter.lpf.cutoff_hz", f.lpf_cutoff_hz.to_string()),
            (
                "rx.fft_advance",
                self.rx_advance
                    .map_or_else(|| "auto".to_string(), |a| a.to_string()),
            ),
            ("output.telemetry", self.telemetry.to_string()),
        ]
    }

    /// Apply every assignment in a config text. Later lines win.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_assignment(line)
                .map_err(|_| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key, value).map_err(|e| {
                Error::Config(format!("line {}: {}", lineno + 1, config_message(e)))
            })?;
        }
        Ok(())
    }

    /// Defaults, then the optional file, then `key=value` overrides, then
    /// validation.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        for o in overrides {
            let (k, v) = split_assignment(o)?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn threshold_grid(&self) -> Result<Vec<f64>> {
        crate::metrics::threshold_grid(
            self.threshold_min_db,
            self.threshold_max_db,
            self.threshold_step_db,
        )
    }

    pub fn rx_advance(&self) -> usize {
        self.rx_advance.unwrap_or(self.ofdm.cp_samples() / 2)
    }

    /// Check everything up front and report all problems together.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if let Err(e) = self.ofdm.validate() {
            problems.push(config_message(e));
        }
        if self.variants.is_empty() {
            problems.push("run.variants: empty".to_string());
        }
        let mut seen = self.variants.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.variants.len() {
            problems.push("run.variants: duplicates".to_string());
        }
        if self
            .cr_list
            .iter()
            .any(|&cr| !(cr > 0.0) || !cr.is_finite())
        {
            problems.push("clip.cr_list: every ratio must be positive and finite".to_string());
        }
        if self.ccdf_symbols == 0 {
            problems.push("ccdf.symbols: must be positive".to_string());
        }
        if let Err(e) = self.threshold_grid() {
            problems.push(config_message(e));
        }
        if !(self.report_probability > 0.0 && self.report_probability < 1.0) {
            problems.push("ccdf.report_probability: must lie in (0, 1)".to_string());
        }
        if self.ebn0_db.is_empty() || self.ebn0_db.iter().any(|v| v.is_nan()) {
            problems.push("ber.ebn0_db: needs at least one value, no NaN".to_string());
        }
        if self.bits_per_point == 0 {
            problems.push("ber.bits_per_point: must be positive".to_string());
        }
        if self.report_ebn0_db.is_nan() {
            problems.push("ber.report_ebn0_db: NaN".to_string());
        }
        if let Some(a) = self.rx_advance {
            if a > self.ofdm.cp_samples() {
                problems.push(format!(
                    "rx.fft_advance: {a} exceeds the {} guard samples",
                    self.ofdm.cp_samples()
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

fn config_message(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_parameters() {
        let c = ExperimentConfig::default();
        assert_eq!(c.ofdm.n_subcarriers, 128);
        assert_eq!(c.ofdm.oversample, 8);
        assert_eq!(c.ofdm.cp_len, 32);
        assert_eq!(c.ofdm.bandwidth_hz, 1e6);
        assert_eq!(c.ofdm.carrier_hz, 2e6);
        assert_eq!(c.ofdm.sample_rate_hz(), 8e6);
        assert_eq!(c.cr_list, vec![0.8, 1.0, 1.2, 1.4, 1.6]);
        c.validate().unwrap();
    }

    #[test]
    fn parse_text_and_overrides() {
        let mut c = ExperimentConfig::default();
        c.apply_text(
            "# comment\n\nofdm.n = 64   # trailing\nclip.cr_list = 1.0, 2.0\nrun.variants = none\nmodem.scheme = qam16\nclip.cr_list =\n",
        )
        .unwrap();
        assert_eq!(c.ofdm.n_subcarriers, 64);
        assert!(c.cr_list.is_empty());
        assert_eq!(c.variants, vec![Variant::None]);
        assert_eq!(c.scheme, Scheme::Qam16);
        c.set("rx.fft_advance", "12").unwrap();
        assert_eq!(c.rx_advance(), 12);
        c.set("rx.fft_advance", "auto").unwrap();
        assert_eq!(c.rx_advance(), c.ofdm.cp_samples() / 2);
    }

    #[test]
    fn entries_round_trip() {
        let mut c = ExperimentConfig::default();
        c.set("ber.ebn0_db", "0,inf").unwrap();
        c.set("filter.proposed.ripple_db", "0.5").unwrap();
        c.set("output.telemetry", "yes").unwrap();
        let mut back = ExperimentConfig::default();
        for (k, v) in c.entries() {
            back.set(k, &v).unwrap();
        }
        assert_eq!(back, c);
    }

    #[test]
    fn errors_are_config_errors() {
        let mut c = ExperimentConfig::default();
        for (k, v) in [
            ("nope", "1"),
            ("ofdm.n", "abc"),
            ("clip.domain", "x"),
            ("run.variants", "fancy"),
        ] {
            let e = c.set(k, v).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{k}");
        }
        let e = c.apply_text("ofdm.n 12").unwrap_err();
        assert!(e.to_string().contains("line 1"));
    }

    #[test]
    fn validation_lists_every_problem() {
        let mut c = ExperimentConfig::default();
        c.cr_list = vec![0.0];
        c.ccdf_symbols = 0;
        c.ofdm.n_subcarriers = 100;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("clip.cr_list"));
        assert!(msg.contains("ccdf.symbols"));
        assert!(msg.contains("power of two"), "{msg}");
    }

    #[test]
    fn override_syntax() {
        assert_eq!(split_assignment("a.b=3").unwrap(), ("a.b", "3"));
        assert!(split_assignment("novalue").is_err());
        assert!(split_assignment("=3").is_err());
    }
}
