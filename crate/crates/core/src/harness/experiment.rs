//! Monte Carlo CCDF and BER runs.
//!
//! Symbol `i` always draws its bits from stream `i` and its channel noise from
//! stream `i`, so results do not depend on how symbols are spread across
//! workers, and every clipping case sees the same symbols and the same noise.

use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::{design, DesignedFilter, FilterSpec, Kind};
use crate::harness::config::{ExperimentConfig, SigmaMode};
use crate::harness::manifest::sha256_hex;
use crate::metrics::{
    analytical_ber, ber_count, ccdf, papr_db, AwgnCalibration, BerCount, BerPoint, CcdfCurve,
};
use crate::modem::{generate_bits, Constellation};
use crate::ofdm::{add_cyclic_prefix, OfdmSymbol, Receiver, Transmitter};
use crate::papr::{
    reduce_papr, reduce_papr_baseband, ClipConfig, ClipDomain, ComposedFilter, SigmaEstimate,
    StageTelemetry, Variant,
};
use crate::rng::{stream, Purpose};
use crate::signal::{mean_power, ComplexSample, SignalBuffer};

/// Symbols per BER batch; early stopping is only checked between batches.
const BER_BATCH: u64 = 256;

/// The three filters an experiment needs, designed once.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub previous: DesignedFilter,
    pub proposed: DesignedFilter,
    pub lpf: DesignedFilter,
}

impl FilterBank {
    pub fn design(cfg: &ExperimentConfig) -> Result<Self> {
        let f = &cfg.filters;
        let fs = cfg.ofdm.sample_rate_hz();
        Ok(Self {
            previous: design(&FilterSpec::fir(
                Kind::Highpass,
                f.previous_order,
                &[f.previous_cutoff_hz],
                fs,
            ))?,
            proposed: design(&FilterSpec::cheby1(
                Kind::Bandpass,
                f.proposed_order,
                f.proposed_ripple_db,
                &[f.proposed_low_hz, f.proposed_high_hz],
                fs,
            ))?,
            lpf: design(&FilterSpec::fir(
                Kind::Lowpass,
                f.lpf_order,
                &[f.lpf_cutoff_hz],
                fs,
            ))?,
        })
    }

    /// Filters for a CCDF run, which only needs them when some variant
    /// filters; a reference-only run may use rates no filter can be designed
    /// for.
    pub fn for_ccdf(cfg: &ExperimentConfig) -> Result<Option<Self>> {
        if cfg.variants.iter().all(|&v| v == Variant::None) {
            Ok(None)
        } else {
            Self::design(cfg).map(Some)
        }
    }

    pub fn kernel(&self, variant: Variant) -> Option<&DesignedFilter> {
        match variant {
            Variant::None => None,
            Variant::Previous => Some(&self.previous),
            Variant::Proposed => Some(&self.proposed),
        }
    }

    /// `previous`, `proposed` or `lpf`.
    pub fn by_name(&self, name: &str) -> Result<&DesignedFilter> {
        match name {
            "previous" => Ok(&self.previous),
            "proposed" => Ok(&self.proposed),
            "lpf" => Ok(&self.lpf),
            other => Err(Error::Config(format!(
                "unknown filter `{other}` (previous|proposed|lpf)"
            ))),
        }
    }

    pub fn digest(&self) -> String {
        let text = format!(
            "previous\n{}proposed\n{}lpf\n{}",
            self.previous.coefficients_csv(),
            self.proposed.coefficients_csv(),
            self.lpf.coefficients_csv()
        );
        sha256_hex(text.as_bytes())
    }
}

/// One clipping case; `cr == None` is the unclipped reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub variant: Variant,
    pub cr: Option<f64>,
}

struct Processed {
    passband: Option<Vec<f64>>,
    papr_db: f64,
    telemetry: Option<StageTelemetry>,
}

/// Everything needed to push one symbol through every case.
struct Chain {
    cfg: ExperimentConfig,
    tx: Transmitter,
    constellation: Constellation,
    composed: Vec<(Variant, ComposedFilter)>,
    cases: Vec<Case>,
}

impl Chain {
    fn new(
        cfg: &ExperimentConfig,
        filters: Option<&FilterBank>,
        need_passband: bool,
    ) -> Result<Self> {
        let baseband = cfg.clip_domain == ClipDomain::BasebandPolar;
        let tx = if baseband && !need_passband {
            Transmitter::baseband_only(&cfg.ofdm)?
        } else {
            Transmitter::new(&cfg.ofdm)?
        };
        let composed = cfg
            .variants
            .iter()
            .map(|&v| {
                let k = filters.and_then(|f| f.kernel(v));
                let f = if baseband {
                    ComposedFilter::baseband(v, k, &cfg.ofdm)?
                } else {
                    ComposedFilter::passband(v, k, &cfg.ofdm)?
                };
                Ok((v, f))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cases = vec![Case {
            variant: Variant::None,
            cr: None,
        }];
        for &variant in &cfg.variants {
            for &cr in &cfg.cr_list {
                cases.push(Case {
                    variant,
                    cr: Some(cr),
                });
            }
        }
        Ok(Self {
            cfg: cfg.clone(),
            tx,
            constellation: Constellation::new(cfg.scheme),
            composed,
            cases,
        })
    }

    fn bits_per_symbol(&self) -> usize {
        self.cfg.ofdm.n_subcarriers * self.cfg.scheme.bits_per_symbol()
    }

    fn symbol(&self, index: u64) -> Result<(Vec<u8>, OfdmSymbol)> {
        let bits = generate_bits(self.bits_per_symbol(), self.cfg.seed, index)?.bits;
        let data = self.constellation.map(&bits)?;
        let sym = if self.tx.carrier().is_some() {
            self.tx.synthesize(&data)?
        } else {
            let time = self.tx.baseband(&data)?;
            OfdmSymbol {
                freq_data: data,
                time_oversampled: time,
                passband: crate::signal::RealBuffer {
                    samples: Vec::new(),
                    sample_rate_hz: self.cfg.ofdm.sample_rate_hz(),
                },
            }
        };
        Ok((bits, sym))
    }

    fn filter_for(&self, variant: Variant) -> &ComposedFilter {
        &self
            .composed
            .iter()
            .find(|(v, _)| *v == variant)
            .expect("every configured variant has a filter")
            .1
    }

    fn clip_config(&self, cr: f64) -> ClipConfig {
        ClipConfig {
            cr,
            domain: self.cfg.clip_domain,
            sigma: match self.cfg.sigma {
                SigmaMode::PerSymbol => SigmaEstimate::PerSymbol,
                SigmaMode::Global => {
                    SigmaEstimate::Global((1.0 / self.cfg.ofdm.oversample as f64).sqrt())
                }
            },
        }
    }

    /// Run one case. The passband output is only produced when `want_passband`.
    fn process(&self, sym: &OfdmSymbol, case: Case, want_passband: bool) -> Result<Processed> {
        let baseband = self.cfg.clip_domain == ClipDomain::BasebandPolar;
        let Some(cr) = case.cr else {
            return Ok(Processed {
                papr_db: if baseband {
                    papr_db(&sym.time_oversampled)?
                } else {
                    papr_db(&sym.passband.samples)?
                },
                passband: want_passband.then(|| sym.passband.samples.clone()),
                telemetry: None,
            });
        };
        let clip = self.clip_config(cr);
        let filter = self.filter_for(case.variant);
        if baseband {
            let (y, t) = reduce_papr_baseband(&sym.time_oversampled, &clip, filter)?;
            let passband = if want_passband {
                let carrier = self.tx.carrier().ok_or_else(|| {
                    Error::invalid("carrier_hz", "passband output needs a carrier")
                })?;
                Some(
                    carrier
                        .upconvert(&SignalBuffer::time(y, self.cfg.ofdm.sample_rate_hz())?)?
                        .samples,
                )
            } else {
                None
            };
            Ok(Processed {
                passband,
                papr_db: t.papr_filt_db,
                telemetry: Some(t),
            })
        } else {
            let (y, t) = reduce_papr(&sym.passband.samples, &clip, filter)?;
            Ok(Processed {
                passband: want_passband.then_some(y),
                papr_db: t.papr_filt_db,
                telemetry: Some(t),
            })
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical {
            stage: "thread pool",
            detail: e.to_string(),
        })
}

#[derive(Debug, Clone)]
pub struct CcdfSeries {
    pub variant: Variant,
    pub cr: Option<f64>,
    pub curve: CcdfCurve,
    /// PAPR (dB) where the curve crosses the reporting probability.
    pub papr_at_report_db: Option<f64>,
    /// Fraction of symbols whose PAPR rose between clipping and filtering.
    pub regrowth_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfSummaryRow {
    pub cr: f64,
    pub previous_db: Option<f64>,
    pub proposed_db: Option<f64>,
}

impl CcdfSummaryRow {
    /// Previous minus proposed: positive when the proposed method wins.
    pub fn improvement_db(&self) -> Option<f64> {
        Some(self.previous_db? - self.proposed_db?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelemetryRow {
    pub symbol: u64,
    pub variant: Variant,
    pub cr: f64,
    pub stages: StageTelemetry,
}

#[derive(Debug, Clone)]
pub struct CcdfReport {
    pub symbols: u64,
    pub series: Vec<CcdfSeries>,
    pub summary: Vec<CcdfSummaryRow>,
    pub telemetry: Vec<TelemetryRow>,
    pub elapsed_s: f64,
}

impl CcdfReport {
    pub fn series(&self, variant: Variant, cr: Option<f64>) -> Option<&CcdfSeries> {
        self.series
            .iter()
            .find(|s| s.variant == variant && s.cr == cr)
    }
}

struct CcdfSymbol {
    paprs: Vec<f64>,
    regrowth: Vec<bool>,
    telemetry: Vec<StageTelemetry>,
}

pub fn run_ccdf_experiment(cfg: &ExperimentConfig) -> Result<CcdfReport> {
    cfg.validate()?;
    let grid = cfg.threshold_grid()?;
    let filters = FilterBank::for_ccdf(cfg)?;
    let chain = Chain::new(cfg, filters.as_ref(), false)?;
    let started = Instant::now();
    let keep_telemetry = cfg.telemetry;

    let per_symbol = pool(cfg.workers)?.install(|| {
        (0..cfg.ccdf_symbols as u64)
            .into_par_iter()
            .map(|i| {
                let (_, sym) = chain.symbol(i)?;
                let mut out = CcdfSymbol {
                    paprs: Vec::with_capacity(chain.cases.len()),
                    regrowth: Vec::with_capacity(chain.cases.len()),
                    telemetry: Vec::new(),
                };
                for &case in &chain.cases {
                    let p = chain.process(&sym, case, false)?;
                    out.paprs.push(p.papr_db);
                    if let Some(t) = p.telemetry {
                        out.regrowth.push(t.papr_filt_db >= t.papr_clip_db);
                        if keep_telemetry {
                            out.telemetry.push(t);
                        }
                    } else {
                        out.regrowth.push(false);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let n = per_symbol.len() as f64;
    let mut series = Vec::with_capacity(chain.cases.len());
    for (c, case) in chain.cases.iter().enumerate() {
        let samples: Vec<f64> = per_symbol.iter().map(|s| s.paprs[c]).collect();
        let curve = ccdf(&samples, &grid)?;
        let regrowth_fraction = case
            .cr
            .map(|_| per_symbol.iter().filter(|s| s.regrowth[c]).count() as f64 / n);
        series.push(CcdfSeries {
            variant: case.variant,
            cr: case.cr,
            papr_at_report_db: curve.papr_at_ccdf(cfg.report_probability),
            curve,
            regrowth_fraction,
        });
    }

    let mut telemetry = Vec::new();
    if keep_telemetry {
        let clipped: Vec<Case> = chain
            .cases
            .iter()
            .copied()
            .filter(|c| c.cr.is_some())
            .collect();
        for (i, s) in per_symbol.iter().enumerate() {
            for (case, t) in clipped.iter().zip(&s.telemetry) {
                telemetry.push(TelemetryRow {
                    symbol: i as u64,
                    variant: case.variant,
                    cr: case.cr.expect("clipped case"),
                    stages: *t,
                });
            }
        }
    }

    let at = |v: Variant, cr: f64| {
        series
            .iter()
            .find(|s| s.variant == v && s.cr == Some(cr))
            .and_then(|s| s.papr_at_report_db)
    };
    let summary = cfg
        .cr_list
        .iter()
        .map(|&cr| CcdfSummaryRow {
            cr,
            previous_db: at(Variant::Previous, cr),
            proposed_db: at(Variant::Proposed, cr),
        })
        .collect();

    Ok(CcdfReport {
        symbols: cfg.ccdf_symbols as u64,
        series,
        summary,
        telemetry,
        elapsed_s: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerRow {
    pub variant: Variant,
    pub cr: Option<f64>,
    pub point: BerPoint,
    pub confident: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerSummaryRow {
    pub cr: f64,
    pub previous: Option<f64>,
    pub proposed: Option<f64>,
}

impl BerSummaryRow {
    pub fn difference(&self) -> Option<f64> {
        Some(self.previous? - self.proposed?)
    }
}

#[derive(Debug, Clone)]
pub struct BerReport {
    pub rows: Vec<BerRow>,
    /// `(ebn0_db, ber)` of the closed-form reference.
    pub analytical: Vec<(f64, f64)>,
    pub summary: Vec<BerSummaryRow>,
    pub symbols_per_point: u64,
    pub bits_processed: u64,
    pub elapsed_s: f64,
}

impl BerReport {
    pub fn row(&self, variant: Variant, cr: Option<f64>, ebn0_db: f64) -> Option<&BerRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.cr == cr && r.point.snr_db == ebn0_db)
    }
}

pub fn run_ber_experiment(cfg: &ExperimentConfig) -> Result<BerReport> {
    cfg.validate()?;
    let filters = FilterBank::design(cfg)?;
    let chain = Chain::new(cfg, Some(&filters), true)?;
    let rx = Receiver::new(&cfg.ofdm, filters.lpf.clone(), cfg.rx_advance())?;
    let started = Instant::now();

    let bits_per_symbol = chain.bits_per_symbol() as u64;
    let symbols = cfg.bits_per_point.div_ceil(bits_per_symbol);
    let snrs = &cfg.ebn0_db;
    let n_cases = chain.cases.len();
    let n_points = n_cases * snrs.len();
    let mut counts = vec![BerCount::default(); n_points];
    let mut active = vec![true; n_points];
    let cp = cfg.ofdm.cp_samples();
    let noise_len = cfg.ofdm.fft_len() + cp;
    let k = cfg.scheme.bits_per_symbol();

    let pool = pool(cfg.workers)?;
    let mut start = 0;
    while start < symbols && active.iter().any(|&a| a) {
        let end = (start + BER_BATCH).min(symbols);
        let live = &active;
        let batch = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| {
                    let mut local = vec![BerCount::default(); n_points];
                    let (bits, sym) = chain.symbol(i)?;
                    let mut rng = stream(cfg.seed, Purpose::Noise, i);
                    let z: Vec<f64> = (0..noise_len)
                        .map(|_| StandardNormal.sample(&mut rng))
                        .collect();
                    // The receiver is linear, so unit-variance noise is
                    // demodulated once and scaled per Eb/N0.
                    let noise_bins = rx.receive(&z)?;
                    for (c, &case) in chain.cases.iter().enumerate() {
                        if !(0..snrs.len()).any(|j| live[c * snrs.len() + j]) {
                            continue;
                        }
                        let out = chain
                            .process(&sym, case, true)?
                            .passband
                            .expect("passband requested");
                        let power = mean_power(&out)?;
                        let signal_bins = rx.receive(&add_cyclic_prefix(&out, cp)?)?;
                        for (j, &snr) in snrs.iter().enumerate() {
                            let p = c * snrs.len() + j;
                            if !live[p] {
                                continue;
                            }
                            let s = AwgnCalibration::new(power, snr, k, 1.0, cfg.ofdm.oversample)?
                                .sigma_per_dimension();
                            let noisy: Vec<ComplexSample> = signal_bins
                                .iter()
                                .zip(&noise_bins)
                                .map(|(&a, &b)| a + b * s)
                                .collect();
                            let decided = chain.constellation.demap(&noisy)?;
                            local[p] = ber_count(&bits, &decided)?;
                        }
                    }
                    Ok(local)
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for local in batch {
            for (acc, part) in counts.iter_mut().zip(local) {
                *acc = acc.merge(part);
            }
        }
        if cfg.target_errors > 0 {
            for (a, c) in active.iter_mut().zip(&counts) {
                if c.bit_errors >= cfg.target_errors {
                    *a = false;
                }
            }
        }
        start = end;
    }

    let mut rows = Vec::with_capacity(n_points);
    for (c, case) in chain.cases.iter().enumerate() {
        for (j, &snr) in snrs.iter().enumerate() {
            let count = counts[c * snrs.len() + j];
            rows.push(BerRow {
                variant: case.variant,
                cr: case.cr,
                point: BerPoint::new(snr, count),
                confident: count.bit_errors >= cfg.min_confident_errors,
            });
        }
    }
    let analytical = snrs
        .iter()
        .map(|&s| (s, analytical_ber(cfg.scheme, s)))
        .collect();
    let ber_at = |v: Variant, cr: f64| {
        rows.iter()
            .find(|r| {
                r.variant == v
                    && r.cr == Some(cr)
                    && (r.point.snr_db - cfg.report_ebn0_db).abs() < 1e-9
            })
            .map(|r| r.point.ber)
    };
    let summary = cfg
        .cr_list
        .iter()
        .map(|&cr| BerSummaryRow {
            cr,
            previous: ber_at(Variant::Previous, cr),
            proposed: ber_at(Variant::Proposed, cr),
        })
        .collect();
    let bits_processed = counts.iter().map(|c| c.bits_total).sum();
    Ok(BerReport {
        rows,
        analytical,
        summary,
        symbols_per_point: symbols,
        bits_processed,
        elapsed_s: started.elapsed().as_secs_f64(),
    })
}
