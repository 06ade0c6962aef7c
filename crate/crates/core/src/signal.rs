//! Sample buffers and power statistics.
//!
//! Complex baseband signals live in [`SignalBuffer`], real passband signals in
//! [`RealBuffer`]. Both carry their sample rate so filters can check they are
//! applied at the rate they were designed for.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexSample = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Time,
    Frequency,
}

impl Domain {
    pub fn flipped(self) -> Self {
        match self {
            Domain::Time => Domain::Frequency,
            Domain::Frequency => Domain::Time,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalBuffer {
    pub samples: Vec<ComplexSample>,
    pub sample_rate_hz: f64,
    pub domain: Domain,
}

impl SignalBuffer {
    pub fn new(samples: Vec<ComplexSample>, sample_rate_hz: f64, domain: Domain) -> Result<Self> {
        validate_rate(sample_rate_hz)?;
        if samples.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            domain,
        })
    }

    pub fn time(samples: Vec<ComplexSample>, sample_rate_hz: f64) -> Result<Self> {
        Self::new(samples, sample_rate_hz, Domain::Time)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.samples
            .iter()
            .all(|s| s.re.is_finite() && s.im.is_finite())
    }

    pub fn mean_power(&self) -> Result<f64> {
        mean_power(&self.samples)
    }

    pub fn rms(&self) -> Result<f64> {
        rms(&self.samples)
    }
}

/// Real-valued signal, used for passband waveforms.
#[derive(Debug, Clone, PartialEq)]
pub struct RealBuffer {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
}

impl RealBuffer {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        validate_rate(sample_rate_hz)?;
        if samples.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.is_finite())
    }

    pub fn mean_power(&self) -> Result<f64> {
        mean_power(&self.samples)
    }

    pub fn rms(&self) -> Result<f64> {
        rms(&self.samples)
    }

    pub fn to_complex(&self) -> SignalBuffer {
        SignalBuffer {
            samples: self
                .samples
                .iter()
                .map(|&x| ComplexSample::new(x, 0.0))
                .collect(),
            sample_rate_hz: self.sample_rate_hz,
            domain: Domain::Time,
        }
    }
}

fn validate_rate(sample_rate_hz: f64) -> Result<()> {
    if sample_rate_hz.is_finite() && sample_rate_hz > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "sample_rate_hz",
            format!("must be positive and finite, got {sample_rate_hz}"),
        ))
    }
}

/// Instantaneous power of a single sample.
pub trait Energy: Copy {
    fn energy(self) -> f64;
}

impl Energy for f64 {
    #[inline]
    fn energy(self) -> f64 {
        self * self
    }
}

impl Energy for ComplexSample {
    #[inline]
    fn energy(self) -> f64 {
        self.norm_sqr()
    }
}

/// `(1/M) * sum |x[m]|^2`.
pub fn mean_power<T: Energy>(samples: &[T]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let total: f64 = samples.iter().map(|&s| s.energy()).sum();
    Ok(total / samples.len() as f64)
}

pub fn rms<T: Energy>(samples: &[T]) -> Result<f64> {
    mean_power(samples).map(f64::sqrt)
}

pub fn peak_power<T: Energy>(samples: &[T]) -> Result<f64> {
    samples
        .iter()
        .map(|&s| s.energy())
        .reduce(f64::max)
        .ok_or(Error::Empty)
}
