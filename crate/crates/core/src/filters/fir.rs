use std::f64::consts::PI;

use super::{DesignedFilter, Family, FilterSpec, Kind, Realization};
use crate::error::{Error, Result};

/// Hamming-windowed sinc design.
///
/// Highpass is the spectral inversion of the lowpass prototype, bandpass the
/// difference of two lowpass prototypes. Every prototype is scaled to unit DC
/// gain first.
pub fn design_fir(spec: &FilterSpec) -> Result<DesignedFilter> {
    if spec.family != Family::FirWindow {
        return Err(Error::invalid(
            "family",
            "design_fir needs a window-method spec",
        ));
    }
    spec.validate()?;
    let fs = spec.sample_rate_hz;
    let order = spec.order;
    let taps = match spec.kind {
        Kind::Lowpass => lowpass_prototype(order, spec.edges_hz[0] / fs),
        Kind::Highpass => {
            if !order.is_multiple_of(2) {
                return Err(Error::invalid(
                    "order",
                    format!("highpass needs an odd tap count (even order), got order {order}"),
                ));
            }
            let mut taps = lowpass_prototype(order, spec.edges_hz[0] / fs);
            taps.iter_mut().for_each(|t| *t = -*t);
            taps[order / 2] += 1.0;
            taps
        }
        Kind::Bandpass => {
            let low = lowpass_prototype(order, spec.edges_hz[0] / fs);
            let high = lowpass_prototype(order, spec.edges_hz[1] / fs);
            high.iter().zip(&low).map(|(h, l)| h - l).collect()
        }
    };
    Ok(DesignedFilter {
        spec: spec.clone(),
        realization: Realization::FirTaps(taps),
    })
}

/// Taps are computed for the first half and mirrored, so the result is
/// symmetric bit for bit.
fn lowpass_prototype(order: usize, cutoff_norm: f64) -> Vec<f64> {
    let len = order + 1;
    let center = order as f64 / 2.0;
    let mut taps = vec![0.0; len];
    for n in 0..len.div_ceil(2) {
        let t = n as f64 - center;
        let x = 2.0 * cutoff_norm * t;
        let sinc = if x == 0.0 {
            1.0
        } else {
            (PI * x).sin() / (PI * x)
        };
        let window = 0.54 - 0.46 * (2.0 * PI * n as f64 / order as f64).cos();
        let h = 2.0 * cutoff_norm * sinc * window;
        taps[n] = h;
        taps[order - n] = h;
    }
    let dc: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= dc);
    taps
}
