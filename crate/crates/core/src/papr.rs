//! Clipping and the frequency-domain composed filter.
//!
//! A symbol is clipped at `A = CR * sigma`, transformed, weighted by the
//! method's kernel on the occupied bins, has every other bin forced to zero,
//! and is transformed back. The kernel is applied as a zero-phase gain (see
//! [`DesignedFilter::zero_phase_gain`]), so the filter reshapes the
//! in-band spectrum without rotating subcarrier phases.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::filters::DesignedFilter;
use crate::metrics::papr_db;
use crate::ofdm::OfdmParams;
use crate::signal::{rms, ComplexSample, Energy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// No composed filter; the unclipped reference when no clipping is done.
    None,
    /// FIR highpass kernel.
    Previous,
    /// Chebyshev Type I bandpass kernel.
    Proposed,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::None => "none",
            Variant::Previous => "previous",
            Variant::Proposed => "proposed",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Variant::None),
            "previous" => Ok(Variant::Previous),
            "proposed" => Ok(Variant::Proposed),
            other => Err(Error::Config(format!("unknown method variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipDomain {
    /// Magnitude clipping of the complex envelope, phase kept.
    BasebandPolar,
    /// Hard limiting of the real passband waveform.
    PassbandHard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaEstimate {
    /// RMS of each unclipped symbol.
    PerSymbol,
    /// A fixed RMS shared by every symbol.
    Global(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipConfig {
    pub cr: f64,
    pub domain: ClipDomain,
    pub sigma: SigmaEstimate,
}

impl ClipConfig {
    pub fn passband(cr: f64) -> Self {
        Self {
            cr,
            domain: ClipDomain::PassbandHard,
            sigma: SigmaEstimate::PerSymbol,
        }
    }

    fn sigma_for<T: Energy>(&self, unclipped: &[T]) -> Result<f64> {
        match self.sigma {
            SigmaEstimate::PerSymbol => rms(unclipped),
            SigmaEstimate::Global(s) => Ok(s),
        }
    }
}

/// `A = CR * sigma`.
pub fn clipping_level(cr: f64, sigma: f64) -> Result<f64> {
    if !(cr > 0.0) {
        return Err(Error::invalid("cr", format!("must be positive, got {cr}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid(
            "sigma",
            format!("must be positive, got {sigma}"),
        ));
    }
    Ok(cr * sigma)
}

/// Polar clipping: samples above `level` keep their phase and get magnitude
/// `level`. Output magnitudes never exceed `level`.
pub fn clip_baseband(x: &[ComplexSample], level: f64) -> Vec<ComplexSample> {
    x.iter()
        .map(|&v| {
            let mag = v.norm();
            if mag <= level {
                return v;
            }
            let mut y = v * (level / mag);
            while y.norm() > level {
                y *= 1.0 - f64::EPSILON;
            }
            y
        })
        .collect()
}

/// Hard limiter: `-A` below `-A`, `A` above `A`, pass-through in between.
pub fn clip_passband(x: &[f64], level: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            if v >= level {
                level
            } else if v <= -level {
                -level
            } else {
                v
            }
        })
        .collect()
}

/// FFT -> per-bin kernel gain -> zero outside the occupied band -> IFFT.
#[derive(Debug, Clone)]
pub struct ComposedFilter {
    variant: Variant,
    plan: Option<FftPlan>,
    gains: Vec<f64>,
}

impl ComposedFilter {
    pub fn identity() -> Self {
        Self {
            variant: Variant::None,
            plan: None,
            gains: Vec::new(),
        }
    }

    /// Composed filter for the real passband signal. Occupied bins are the
    /// data bins translated up by the carrier plus their mirror image; the
    /// carrier must therefore sit exactly on an FFT bin.
    pub fn passband(
        variant: Variant,
        kernel: Option<&DesignedFilter>,
        params: &OfdmParams,
    ) -> Result<Self> {
        let Some(kernel) = Self::kernel_for(variant, kernel)? else {
            return Ok(Self::identity());
        };
        params.validate()?;
        params.carrier()?;
        let m = params.fft_len();
        let fs = params.sample_rate_hz();
        let bin_hz = fs / m as f64;
        let carrier_bin = params.carrier_hz / bin_hz;
        if (carrier_bin - carrier_bin.round()).abs() > 1e-9 {
            return Err(Error::invalid(
                "carrier_hz",
                format!("carrier must be a multiple of the bin spacing {bin_hz} Hz"),
            ));
        }
        let carrier_bin = carrier_bin.round() as i64;
        let n = params.n_subcarriers as i64;
        let mut gains = vec![0.0; m];
        for offset in -(n / 2 - 1)..=n / 2 {
            let bin = (carrier_bin + offset) as usize;
            let g = kernel.zero_phase_gain(bin as f64 * bin_hz);
            gains[bin] = g;
            gains[m - bin] = g;
        }
        Self::build(variant, gains)
    }

    /// Composed filter applied directly to the complex envelope, with the
    /// kernel evaluated at `fc + f` for each baseband bin frequency `f`.
    pub fn baseband(
        variant: Variant,
        kernel: Option<&DesignedFilter>,
        params: &OfdmParams,
    ) -> Result<Self> {
        let Some(kernel) = Self::kernel_for(variant, kernel)? else {
            return Ok(Self::identity());
        };
        params.validate()?;
        let m = params.fft_len();
        let bin_hz = params.sample_rate_hz() / m as f64;
        let mut gains = vec![0.0; m];
        for bin in params.occupied_bins() {
            let signed = if bin <= m / 2 {
                bin as f64
            } else {
                bin as f64 - m as f64
            };
            gains[bin] = kernel.zero_phase_gain(params.carrier_hz + signed * bin_hz);
        }
        Self::build(variant, gains)
    }

    fn kernel_for(
        variant: Variant,
        kernel: Option<&DesignedFilter>,
    ) -> Result<Option<&DesignedFilter>> {
        match (variant, kernel) {
            (Variant::None, _) => Ok(None),
            (_, Some(k)) => Ok(Some(k)),
            (v, None) => Err(Error::invalid(
                "kernel",
                format!("variant {v} needs a kernel filter"),
            )),
        }
    }

    fn build(variant: Variant, gains: Vec<f64>) -> Result<Self> {
        Ok(Self {
            variant,
            plan: Some(FftPlan::new(gains.len())?),
            gains,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Per-bin gain; empty for the identity filter.
    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn apply_real(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.plan.is_none() {
            return Ok(x.to_vec());
        }
        let spectrum: Vec<ComplexSample> = x.iter().map(|&v| ComplexSample::new(v, 0.0)).collect();
        Ok(self.filter(spectrum)?.into_iter().map(|v| v.re).collect())
    }

    pub fn apply_complex(&self, x: &[ComplexSample]) -> Result<Vec<ComplexSample>> {
        if self.plan.is_none() {
            return Ok(x.to_vec());
        }
        self.filter(x.to_vec())
    }

    fn filter(&self, mut data: Vec<ComplexSample>) -> Result<Vec<ComplexSample>> {
        let plan = self.plan.as_ref().expect("non-identity filter has a plan");
        plan.forward(&mut data)?;
        for (v, &g) in data.iter_mut().zip(&self.gains) {
            // exact zero outside the band, not g * v
            *v = if g == 0.0 {
                ComplexSample::new(0.0, 0.0)
            } else {
                *v * g
            };
        }
        plan.inverse(&mut data)?;
        Ok(data)
    }
}

/// PAPR (dB) at the three taps of the pipeline, plus clipping bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTelemetry {
    pub papr_pre_db: f64,
    pub papr_clip_db: f64,
    pub papr_filt_db: f64,
    pub sigma: f64,
    pub clip_level: f64,
    pub clipped_samples: usize,
}

/// Clip and filter one passband symbol.
pub fn reduce_papr(
    passband: &[f64],
    clip: &ClipConfig,
    filter: &ComposedFilter,
) -> Result<(Vec<f64>, StageTelemetry)> {
    if clip.domain != ClipDomain::PassbandHard {
        return Err(Error::invalid(
            "clip.domain",
            "reduce_papr works on the passband signal",
        ));
    }
    let sigma = clip.sigma_for(passband)?;
    let level = clipping_level(clip.cr, sigma)?;
    let clipped = clip_passband(passband, level);
    let filtered = filter.apply_real(&clipped)?;
    let telemetry = StageTelemetry {
        papr_pre_db: papr_db(passband)?,
        papr_clip_db: papr_db(&clipped)?,
        papr_filt_db: papr_db(&filtered)?,
        sigma,
        clip_level: level,
        clipped_samples: passband.iter().filter(|v| v.abs() >= level).count(),
    };
    Ok((filtered, telemetry))
}

/// Baseband counterpart of [`reduce_papr`], clipping the complex envelope.
pub fn reduce_papr_baseband(
    envelope: &[ComplexSample],
    clip: &ClipConfig,
    filter: &ComposedFilter,
) -> Result<(Vec<ComplexSample>, StageTelemetry)> {
    if clip.domain != ClipDomain::BasebandPolar {
        return Err(Error::invalid(
            "clip.domain",
            "reduce_papr_baseband works on the complex envelope",
        ));
    }
    let sigma = clip.sigma_for(envelope)?;
    let level = clipping_level(clip.cr, sigma)?;
    let clipped = clip_baseband(envelope, level);
    let filtered = filter.apply_complex(&clipped)?;
    let telemetry = StageTelemetry {
        papr_pre_db: papr_db(envelope)?,
        papr_clip_db: papr_db(&clipped)?,
        papr_filt_db: papr_db(&filtered)?,
        sigma,
        clip_level: level,
        clipped_samples: envelope.iter().filter(|v| v.norm() > level).count(),
    };
    Ok((filtered, telemetry))
}
