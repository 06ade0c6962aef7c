//! Filter design and application.
//!
//! Two families are supported: window-method FIR (Hamming) and Chebyshev
//! Type I IIR realized as a cascade of second-order sections. A designed
//! filter is immutable; [`DesignedFilter::apply`] keeps its state local to the
//! call so one filter can be shared across threads.

mod cheby1;
mod fir;

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::ops::{Add, AddAssign, Mul, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::signal::{ComplexSample, RealBuffer, SignalBuffer};

pub use cheby1::design_cheby1;
pub use fir::design_fir;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    FirWindow,
    IirCheby1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Lowpass,
    Highpass,
    Bandpass,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Lowpass => "lowpass",
            Kind::Highpass => "highpass",
            Kind::Bandpass => "bandpass",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Hamming,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub family: Family,
    pub kind: Kind,
    /// One cutoff for low/highpass, `[low, high]` for bandpass.
    pub edges_hz: Vec<f64>,
    /// FIR: taps - 1. Chebyshev: analog prototype order.
    pub order: usize,
    pub passband_ripple_db: f64,
    pub window: Window,
    pub sample_rate_hz: f64,
}

impl FilterSpec {
    pub fn fir(kind: Kind, order: usize, edges_hz: &[f64], sample_rate_hz: f64) -> Self {
        Self {
            family: Family::FirWindow,
            kind,
            edges_hz: edges_hz.to_vec(),
            order,
            passband_ripple_db: 0.0,
            window: Window::Hamming,
            sample_rate_hz,
        }
    }

    pub fn cheby1(
        kind: Kind,
        order: usize,
        ripple_db: f64,
        edges_hz: &[f64],
        sample_rate_hz: f64,
    ) -> Self {
        Self {
            family: Family::IirCheby1,
            kind,
            edges_hz: edges_hz.to_vec(),
            order,
            passband_ripple_db: ripple_db,
            window: Window::Hamming,
            sample_rate_hz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fs = self.sample_rate_hz;
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::invalid("sample_rate_hz", format!("{fs}")));
        }
        if self.order < 1 {
            return Err(Error::invalid("order", "must be at least 1"));
        }
        let expected_edges = match self.kind {
            Kind::Lowpass | Kind::Highpass => 1,
            Kind::Bandpass => 2,
        };
        if self.edges_hz.len() != expected_edges {
            return Err(Error::invalid(
                "edges_hz",
                format!(
                    "{} filter needs {expected_edges} edge(s), got {}",
                    self.kind,
                    self.edges_hz.len()
                ),
            ));
        }
        for &e in &self.edges_hz {
            if !(e > 0.0 && e < fs / 2.0) {
                return Err(Error::invalid(
                    "edges_hz",
                    format!("edge {e} Hz outside (0, {}) Hz", fs / 2.0),
                ));
            }
        }
        if self.kind == Kind::Bandpass && self.edges_hz[0] >= self.edges_hz[1] {
            return Err(Error::invalid(
                "edges_hz",
                "bandpass edges must be ascending",
            ));
        }
        if self.family == Family::IirCheby1
            && !(self.passband_ripple_db > 0.0 && self.passband_ripple_db.is_finite())
        {
            return Err(Error::invalid("passband_ripple_db", "must be positive"));
        }
        Ok(())
    }
}

/// Second-order section `(b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    pub fn response(&self, omega: f64) -> ComplexSample {
        let z1 = ComplexSample::from_polar(1.0, -omega);
        let z2 = z1 * z1;
        (self.b0 + z1 * self.b1 + z2 * self.b2) / (1.0 + z1 * self.a1 + z2 * self.a2)
    }

    /// Roots of `z^2 + a1 z + a2`.
    pub fn poles(&self) -> [ComplexSample; 2] {
        let disc = ComplexSample::new(self.a1 * self.a1 - 4.0 * self.a2, 0.0).sqrt();
        [(-self.a1 + disc) / 2.0, (-self.a1 - disc) / 2.0]
    }

    fn run<T: FilterSample>(&self, data: &mut [T]) {
        let (mut s1, mut s2) = (T::zero(), T::zero());
        for x in data.iter_mut() {
            let input = *x;
            let y = input * self.b0 + s1;
            s1 = input * self.b1 - y * self.a1 + s2;
            s2 = input * self.b2 - y * self.a2;
            *x = y;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Realization {
    FirTaps(Vec<f64>),
    Biquads(Vec<Biquad>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignedFilter {
    pub spec: FilterSpec,
    pub realization: Realization,
}

/// Sample types a filter can run over: real passband or complex baseband.
pub trait FilterSample:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
}

impl FilterSample for f64 {}
impl FilterSample for ComplexSample {}

pub fn design(spec: &FilterSpec) -> Result<DesignedFilter> {
    match spec.family {
        Family::FirWindow => design_fir(spec),
        Family::IirCheby1 => design_cheby1(spec),
    }
}

impl DesignedFilter {
    pub fn sample_rate_hz(&self) -> f64 {
        self.spec.sample_rate_hz
    }

    /// Integer delay removed from FIR output; zero for IIR.
    pub fn delay_compensation(&self) -> usize {
        match &self.realization {
            Realization::FirTaps(taps) => (taps.len() - 1) / 2,
            Realization::Biquads(_) => 0,
        }
    }

    /// Same-length filtering with zero initial state. FIR output is advanced
    /// by `order / 2` samples so a linear-phase filter introduces no delay.
    pub fn apply<T: FilterSample>(&self, x: &[T], sample_rate_hz: f64) -> Result<Vec<T>> {
        self.check_rate(sample_rate_hz)?;
        Ok(match &self.realization {
            Realization::FirTaps(taps) => fir_same(taps, x, self.delay_compensation()),
            Realization::Biquads(sections) => {
                let mut y = x.to_vec();
                for s in sections {
                    s.run(&mut y);
                }
                y
            }
        })
    }

    pub fn apply_real(&self, x: &RealBuffer) -> Result<RealBuffer> {
        Ok(RealBuffer {
            samples: self.apply(&x.samples, x.sample_rate_hz)?,
            sample_rate_hz: x.sample_rate_hz,
        })
    }

    pub fn apply_complex(&self, x: &SignalBuffer) -> Result<SignalBuffer> {
        Ok(SignalBuffer {
            samples: self.apply(&x.samples, x.sample_rate_hz)?,
            sample_rate_hz: x.sample_rate_hz,
            domain: x.domain,
        })
    }

    fn check_rate(&self, sample_rate_hz: f64) -> Result<()> {
        let fs = self.spec.sample_rate_hz;
        if (sample_rate_hz - fs).abs() > 1e-9 * fs {
            return Err(Error::SampleRateMismatch {
                signal_hz: sample_rate_hz,
                filter_hz: fs,
            });
        }
        Ok(())
    }

    /// `H(e^{j 2 pi f / fs})` at each frequency.
    pub fn frequency_response(&self, freqs_hz: &[f64]) -> Vec<ComplexSample> {
        freqs_hz.iter().map(|&f| self.response_at(f)).collect()
    }

    pub fn response_at(&self, freq_hz: f64) -> ComplexSample {
        let omega = 2.0 * PI * freq_hz / self.spec.sample_rate_hz;
        match &self.realization {
            Realization::FirTaps(taps) => taps
                .iter()
                .enumerate()
                .map(|(n, &h)| ComplexSample::from_polar(h, -omega * n as f64))
                .sum(),
            Realization::Biquads(sections) => sections.iter().map(|s| s.response(omega)).product(),
        }
    }

    pub fn magnitude_db(&self, freq_hz: f64) -> f64 {
        20.0 * self.response_at(freq_hz).norm().log10()
    }

    /// Real gain with the filter's delay stripped: the amplitude response
    /// `Re{H e^{j w order/2}}` for a symmetric FIR, `|H|` for IIR.
    pub fn zero_phase_gain(&self, freq_hz: f64) -> f64 {
        let omega = 2.0 * PI * freq_hz / self.spec.sample_rate_hz;
        match &self.realization {
            Realization::FirTaps(taps) => {
                let center = (taps.len() - 1) as f64 / 2.0;
                taps.iter()
                    .enumerate()
                    .map(|(n, &h)| h * (omega * (n as f64 - center)).cos())
                    .sum()
            }
            Realization::Biquads(_) => self.response_at(freq_hz).norm(),
        }
    }

    pub fn poles(&self) -> Vec<ComplexSample> {
        match &self.realization {
            Realization::FirTaps(_) => Vec::new(),
            Realization::Biquads(sections) => sections.iter().flat_map(|s| s.poles()).collect(),
        }
    }

    /// Coefficients as CSV: `index,tap` for FIR, one section per row for IIR.
    pub fn coefficients_csv(&self) -> String {
        let mut out = String::new();
        match &self.realization {
            Realization::FirTaps(taps) => {
                out.push_str("index,tap\n");
                for (i, t) in taps.iter().enumerate() {
                    let _ = writeln!(out, "{i},{t:e}");
                }
            }
            Realization::Biquads(sections) => {
                out.push_str("section,b0,b1,b2,a1,a2\n");
                for (i, s) in sections.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{i},{:e},{:e},{:e},{:e},{:e}",
                        s.b0, s.b1, s.b2, s.a1, s.a2
                    );
                }
            }
        }
        out
    }
}

fn fir_same<T: FilterSample>(taps: &[f64], x: &[T], delay: usize) -> Vec<T> {
    let len = x.len();
    (0..len)
        .map(|n| {
            let mut acc = T::zero();
            // y[n] = sum_k h[k] x[n + delay - k], restricted to valid input indices
            let lo = (n + delay + 1).saturating_sub(len);
            let hi = (n + delay).min(taps.len() - 1);
            for k in lo..=hi {
                acc += x[n + delay - k] * taps[k];
            }
            acc
        })
        .collect()
}
