//! OFDM clipping-and-filtering PAPR reduction.
//!
//! The crate covers the whole symbol chain (mapping, oversampled IFFT,
//! carrier up/down conversion), filter design, the clip + composed filter
//! stage, channel and measurement code, and the Monte Carlo harness that the
//! `papr-lab` binary drives.

pub mod error;
pub mod fft;
pub mod filters;
pub mod harness;
pub mod metrics;
pub mod modem;
pub mod ofdm;
pub mod papr;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
pub use fft::{fft, Direction, FftPlan};
pub use filters::{design, Biquad, DesignedFilter, Family, FilterSpec, Kind, Realization, Window};
pub use harness::{run_ber_experiment, run_ccdf_experiment, ExperimentConfig, FilterBank};
pub use metrics::{
    analytical_ber, awgn, ber_count, ccdf, papr_db, q_function, AwgnCalibration, BerCount,
    BerPoint, CcdfCurve,
};
pub use modem::{generate_bits, BitStream, Constellation, Scheme};
pub use ofdm::{Carrier, OfdmParams, OfdmSymbol, Receiver, Transmitter};
pub use papr::{
    clip_baseband, clip_passband, clipping_level, reduce_papr, ClipConfig, ClipDomain,
    ComposedFilter, SigmaEstimate, StageTelemetry, Variant,
};
pub use signal::{mean_power, rms, ComplexSample, Domain, RealBuffer, SignalBuffer};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
