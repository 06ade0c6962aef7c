//! PAPR and CCDF estimation, the AWGN channel and BER bookkeeping.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::modem::Scheme;
use crate::signal::{mean_power, peak_power, ComplexSample, Energy};

/// `10 log10(max |x|^2 / mean |x|^2)`.
pub fn papr_db<T: Energy>(x: &[T]) -> Result<f64> {
    let mean = mean_power(x)?;
    if mean == 0.0 {
        return Err(Error::invalid(
            "signal",
            "PAPR of an all-zero signal is undefined",
        ));
    }
    Ok(10.0 * (peak_power(x)? / mean).log10())
}

/// Empirical `P(PAPR > threshold)` on a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub sample_count: usize,
}

impl CcdfCurve {
    /// Threshold at which the curve crosses `p`, interpolated linearly between
    /// the two bracketing grid points. `None` if the grid never brackets `p`.
    pub fn papr_at_ccdf(&self, p: f64) -> Option<f64> {
        let t = &self.thresholds_db;
        let q = &self.probabilities;
        for i in 1..t.len() {
            if q[i - 1] >= p && q[i] <= p {
                if q[i - 1] == q[i] {
                    return Some(t[i - 1]);
                }
                let frac = (q[i - 1] - p) / (q[i - 1] - q[i]);
                return Some(t[i - 1] + frac * (t[i] - t[i - 1]));
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.probabilities.windows(2).all(|w| w[1] <= w[0])
            && self.probabilities.iter().all(|p| (0.0..=1.0).contains(p))
    }
}

pub fn ccdf(papr_samples_db: &[f64], thresholds_db: &[f64]) -> Result<CcdfCurve> {
    if papr_samples_db.is_empty() {
        return Err(Error::Empty);
    }
    if papr_samples_db.iter().any(|v| v.is_nan()) {
        return Err(Error::Numerical {
            stage: "ccdf",
            detail: "NaN PAPR sample".into(),
        });
    }
    if thresholds_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "thresholds_db",
            "must be strictly ascending",
        ));
    }
    let mut sorted = papr_samples_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let probabilities = thresholds_db
        .iter()
        .map(|&t| (n - sorted.partition_point(|&v| v <= t)) as f64 / n as f64)
        .collect();
    Ok(CcdfCurve {
        thresholds_db: thresholds_db.to_vec(),
        probabilities,
        sample_count: n,
    })
}

/// Evenly spaced grid `min, min + step, ...` up to and including `max`
/// (within half a step).
pub fn threshold_grid(min_db: f64, max_db: f64, step_db: f64) -> Result<Vec<f64>> {
    if !(step_db > 0.0) || !(max_db > min_db) {
        return Err(Error::invalid(
            "thresholds",
            format!("bad grid {min_db}..{max_db} step {step_db}"),
        ));
    }
    let count = ((max_db - min_db) / step_db + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| min_db + i as f64 * step_db).collect())
}

/// Noise level for a target `E_b/N_0`.
///
/// `N_0 = P * L / (k * R * gamma_b)`: a symbol of mean sample power `P`
/// spreads `N` data symbols over `N * L` samples, so each carries energy
/// `P * L`. Real signals get `N_0 / 2` per sample, complex ones `N_0 / 2` per
/// dimension; both leave noise variance `N_0` on every demodulated bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnCalibration {
    pub ebn0_db: f64,
    pub signal_power: f64,
    pub oversample: usize,
    pub bits_per_symbol: usize,
    pub code_rate: f64,
    pub n0: f64,
}

pub const AWGN_FORMULA: &str =
    "N0 = P*L/(k*R*10^(EbN0/10)); noise variance N0/2 per real dimension";

impl AwgnCalibration {
    pub fn new(
        signal_power: f64,
        ebn0_db: f64,
        bits_per_symbol: usize,
        code_rate: f64,
        oversample: usize,
    ) -> Result<Self> {
        if !(signal_power > 0.0) || !signal_power.is_finite() {
            return Err(Error::invalid(
                "signal_power",
                format!("must be positive, got {signal_power}"),
            ));
        }
        if bits_per_symbol == 0 || oversample == 0 || !(code_rate > 0.0) {
            return Err(Error::invalid(
                "awgn",
                "bits per symbol, code rate and oversampling must be positive",
            ));
        }
        if ebn0_db.is_nan() {
            return Err(Error::invalid("ebn0_db", "NaN"));
        }
        let gamma = 10f64.powf(ebn0_db / 10.0);
        let n0 = signal_power * oversample as f64 / (bits_per_symbol as f64 * code_rate * gamma);
        Ok(Self {
            ebn0_db,
            signal_power,
            oversample,
            bits_per_symbol,
            code_rate,
            n0,
        })
    }

    /// Standard deviation of each real noise dimension.
    pub fn sigma_per_dimension(&self) -> f64 {
        (self.n0 / 2.0).sqrt()
    }
}

/// Add real white Gaussian noise drawn from `rng`.
pub fn awgn_real<R: Rng + ?Sized>(x: &[f64], cal: &AwgnCalibration, rng: &mut R) -> Vec<f64> {
    let s = cal.sigma_per_dimension();
    if s == 0.0 {
        return x.to_vec();
    }
    x.iter()
        .map(|&v| v + s * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Complex counterpart of [`awgn_real`]; each dimension gets `N_0 / 2`.
pub fn awgn_complex<R: Rng + ?Sized>(
    x: &[ComplexSample],
    cal: &AwgnCalibration,
    rng: &mut R,
) -> Vec<ComplexSample> {
    let s = cal.sigma_per_dimension();
    if s == 0.0 {
        return x.to_vec();
    }
    x.iter()
        .map(|&v| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v + ComplexSample::new(s * re, s * im)
        })
        .collect()
}

/// Calibrate on the measured power of `x`, then add noise.
pub fn awgn<R: Rng + ?Sized>(
    x: &[f64],
    ebn0_db: f64,
    bits_per_symbol: usize,
    code_rate: f64,
    oversample: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, AwgnCalibration)> {
    let cal = AwgnCalibration::new(
        mean_power(x)?,
        ebn0_db,
        bits_per_symbol,
        code_rate,
        oversample,
    )?;
    Ok((awgn_real(x, &cal, rng), cal))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BerCount {
    pub bit_errors: u64,
    pub bits_total: u64,
}

impl BerCount {
    pub fn ber(&self) -> f64 {
        if self.bits_total == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_total as f64
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            bit_errors: self.bit_errors + other.bit_errors,
            bits_total: self.bits_total + other.bits_total,
        }
    }
}

pub fn ber_count(tx: &[u8], rx: &[u8]) -> Result<BerCount> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    Ok(BerCount {
        bit_errors: tx.iter().zip(rx).filter(|(a, b)| a != b).count() as u64,
        bits_total: tx.len() as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits_total: u64,
    pub ber: f64,
}

impl BerPoint {
    pub fn new(snr_db: f64, count: BerCount) -> Self {
        Self {
            snr_db,
            bit_errors: count.bit_errors,
            bits_total: count.bits_total,
            ber: count.ber(),
        }
    }
}

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Uncoded AWGN bit error probability with Gray mapping.
pub fn analytical_ber(scheme: Scheme, ebn0_db: f64) -> f64 {
    let gamma = 10f64.powf(ebn0_db / 10.0);
    match scheme {
        Scheme::Qpsk => q_function((2.0 * gamma).sqrt()),
        Scheme::Qam16 => 0.75 * q_function((0.8 * gamma).sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::{generate_bits, Constellation};
    use crate::ofdm::{OfdmParams, Transmitter};
    use crate::rng::{stream, Purpose};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Composite Simpson integration of the normal density over [x, x + 40].
    fn q_oracle(x: f64) -> f64 {
        let steps = 200_000;
        let h = 40.0 / steps as f64;
        let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * PI).sqrt();
        let mut acc = pdf(x) + pdf(x + 40.0);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * pdf(x + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn papr_examples() {
        let m = 64;
        let tone: Vec<ComplexSample> = (0..m)
            .map(|i| ComplexSample::from_polar(1.0, 2.0 * PI * 5.0 * i as f64 / m as f64))
            .collect();
        assert!(papr_db(&tone).unwrap().abs() < 1e-12);

        let mut impulse = vec![0.0; m];
        impulse[3] = 1.0;
        assert!((papr_db(&impulse).unwrap() - 10.0 * (m as f64).log10()).abs() < 1e-12);

        let cosine: Vec<f64> = (0..m)
            .map(|i| 2.5 * (2.0 * PI * 4.0 * i as f64 / m as f64).cos())
            .collect();
        assert!((papr_db(&cosine).unwrap() - 3.0103).abs() < 1e-4);

        assert!(papr_db(&[0.0; 8]).is_err());
        assert!(papr_db::<f64>(&[]).is_err());
    }

    #[test]
    fn ccdf_counting() {
        let c = ccdf(&[1.0, 2.0, 3.0, 4.0], &[0.0, 2.5, 5.0]).unwrap();
        assert_eq!(c.probabilities, vec![1.0, 0.5, 0.0]);
        assert_eq!(c.sample_count, 4);
        assert!(c.is_monotone());
        // strictly greater than
        assert_eq!(ccdf(&[2.0], &[2.0]).unwrap().probabilities, vec![0.0]);
        assert!(ccdf(&[], &[1.0]).is_err());
        assert!(ccdf(&[1.0], &[2.0, 1.0]).is_err());
    }

    #[test]
    fn ccdf_inverse_interpolates() {
        let c = CcdfCurve {
            thresholds_db: vec![0.0, 1.0, 2.0],
            probabilities: vec![1.0, 0.3, 0.1],
            sample_count: 10,
        };
        assert!((c.papr_at_ccdf(0.2).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(c.papr_at_ccdf(0.1), Some(2.0));
        assert_eq!(c.papr_at_ccdf(0.05), None);
    }

    #[test]
    fn threshold_grid_endpoints() {
        let g = threshold_grid(0.0, 16.0, 0.02).unwrap();
        assert_eq!(g.len(), 801);
        assert!((g[800] - 16.0).abs() < 1e-9);
        assert!(threshold_grid(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn q_function_against_quadrature() {
        for x in [0.0, 0.5, 1.0, 2.0_f64.sqrt(), 2.0, 3.0, 4.5] {
            let (q, oracle) = (q_function(x), q_oracle(x));
            assert!((q - oracle).abs() < 1e-12, "x={x}: {q} vs {oracle}");
        }
    }

    #[test]
    fn analytical_ber_values() {
        assert!((analytical_ber(Scheme::Qpsk, 0.0) - 7.865e-2).abs() < 1e-5);
        assert!((analytical_ber(Scheme::Qpsk, 6.0) - 2.39e-3).abs() < 1e-5);
        assert_eq!(analytical_ber(Scheme::Qpsk, f64::INFINITY), 0.0);
        let gamma = 10f64.powf(0.6);
        assert!(
            (analytical_ber(Scheme::Qam16, 6.0) - 0.75 * q_oracle((0.8 * gamma).sqrt())).abs()
                < 1e-12
        );
    }

    #[test]
    fn ber_count_examples() {
        let a = [0u8, 1, 0, 1, 1, 0, 0, 1];
        assert_eq!(ber_count(&a, &a).unwrap().ber(), 0.0);
        let mut b = a;
        b[5] ^= 1;
        assert_eq!(ber_count(&a, &b).unwrap().ber(), 0.125);
        let c: Vec<u8> = a.iter().map(|v| v ^ 1).collect();
        assert_eq!(ber_count(&a, &c).unwrap().ber(), 1.0);
        assert!(ber_count(&a, &a[..4]).is_err());
        let sum = BerCount {
            bit_errors: 1,
            bits_total: 8,
        }
        .merge(BerCount {
            bit_errors: 3,
            bits_total: 8,
        });
        assert_eq!(BerPoint::new(6.0, sum).ber, 0.25);
    }

    #[test]
    fn infinite_snr_is_identity() {
        let x = vec![0.5, -1.0, 2.0];
        let mut rng = stream(1, Purpose::Noise, 0);
        let (y, cal) = awgn(&x, f64::INFINITY, 2, 1.0, 8, &mut rng).unwrap();
        assert_eq!(cal.n0, 0.0);
        assert_eq!(y, x);
        assert!(awgn(&[0.0, 0.0], 3.0, 2, 1.0, 8, &mut rng).is_err());
    }

    #[test]
    fn noise_power_matches_target() {
        let n = 1_000_000;
        let cal = AwgnCalibration::new(0.125, 4.0, 2, 1.0, 8).unwrap();
        let mut rng = stream(7, Purpose::Noise, 3);
        let noise = awgn_real(&vec![0.0; n], &cal, &mut rng);
        let measured = mean_power(&noise).unwrap();
        assert!(
            (measured / (cal.n0 / 2.0) - 1.0).abs() < 0.01,
            "{measured} vs {}",
            cal.n0 / 2.0
        );

        let cnoise = awgn_complex(&vec![ComplexSample::new(0.0, 0.0); n], &cal, &mut rng);
        let measured = mean_power(&cnoise).unwrap();
        assert!((measured / cal.n0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn order_statistics_oracle_nyquist_rate() {
        let n = 128;
        let p = OfdmParams {
            oversample: 1,
            ..OfdmParams::default()
        };
        let tx = Transmitter::baseband_only(&p).unwrap();
        let m = Constellation::new(Scheme::Qpsk);
        let symbols = 20_000;
        let paprs: Vec<f64> = (0..symbols)
            .map(|i| {
                let bits = generate_bits(2 * n, 99, i).unwrap();
                papr_db(&tx.baseband(&m.map(&bits.bits).unwrap()).unwrap()).unwrap()
            })
            .collect();
        let curve = ccdf(&paprs, &threshold_grid(0.0, 14.0, 0.02).unwrap()).unwrap();
        let measured = curve.papr_at_ccdf(0.1).unwrap();
        let z = -(1.0 - 0.9f64.powf(1.0 / n as f64)).ln();
        let expected = 10.0 * z.log10();
        assert!(
            (measured - expected).abs() < 0.3,
            "{measured} vs {expected}"
        );
    }

    proptest! {
        #[test]
        fn papr_scale_invariant(x in prop::collection::vec(-10.0f64..10.0, 2..200), c in prop::sample::select(vec![0.5, 2.0, -4.0, 1024.0, 0.125])) {
            prop_assume!(x.iter().any(|&v| v != 0.0));
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            prop_assert_eq!(papr_db(&scaled).unwrap(), papr_db(&x).unwrap());
        }

        #[test]
        fn ccdf_monotone(samples in prop::collection::vec(0.0f64..15.0, 1..300)) {
            let curve = ccdf(&samples, &threshold_grid(0.0, 16.0, 0.5).unwrap()).unwrap();
            prop_assert!(curve.is_monotone());
        }
    }
}
