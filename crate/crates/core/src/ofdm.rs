//! OFDM symbol synthesis and the matching receiver.
//!
//! Transmit path: data block `X` (N bins) -> zero-padded spectrum (N*L bins)
//! -> IFFT scaled by `1/sqrt(N L)` -> real passband via a power-preserving
//! `sqrt(2) Re{x e^{j 2 pi fc m / fs}}` mixer. The receive path mirrors it.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::filters::{DesignedFilter, Kind};
use crate::signal::{ComplexSample, RealBuffer, SignalBuffer};

#[derive(Debug, Clone, PartialEq)]
pub struct OfdmParams {
    pub n_subcarriers: usize,
    pub oversample: usize,
    /// Guard length in pre-oversampling samples; `cp_len * oversample`
    /// samples are inserted on the oversampled signal.
    pub cp_len: usize,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
}

impl Default for OfdmParams {
    fn default() -> Self {
        Self {
            n_subcarriers: 128,
            oversample: 8,
            cp_len: 32,
            bandwidth_hz: 1e6,
            carrier_hz: 2e6,
        }
    }
}

impl OfdmParams {
    pub fn validate(&self) -> Result<()> {
        if self.oversample < 1 {
            return Err(Error::invalid("oversample", "must be at least 1"));
        }
        if !self.n_subcarriers.is_power_of_two() {
            return Err(Error::invalid(
                "n_subcarriers",
                format!("{} is not a power of two", self.n_subcarriers),
            ));
        }
        if !self.fft_len().is_power_of_two() {
            return Err(Error::invalid(
                "oversample",
                format!("N*L = {} is not a power of two", self.fft_len()),
            ));
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth_hz", "must be positive"));
        }
        if self.cp_len > self.n_subcarriers {
            return Err(Error::invalid("cp_len", "longer than the symbol"));
        }
        Ok(())
    }

    pub fn fft_len(&self) -> usize {
        self.n_subcarriers * self.oversample
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.bandwidth_hz * self.oversample as f64
    }

    pub fn cp_samples(&self) -> usize {
        self.cp_len * self.oversample
    }

    pub fn subcarrier_spacing_hz(&self) -> f64 {
        self.bandwidth_hz / self.n_subcarriers as f64
    }

    pub fn carrier(&self) -> Result<Carrier> {
        Carrier::new(self.carrier_hz, self.sample_rate_hz(), self.bandwidth_hz)
    }

    /// Indices of the N*L-point spectrum that carry data, in data-block order.
    pub fn occupied_bins(&self) -> Vec<usize> {
        occupied_bins(self.n_subcarriers, self.fft_len())
    }
}

fn occupied_bins(n: usize, fft_len: usize) -> Vec<usize> {
    (0..n)
        .map(|k| if k <= n / 2 { k } else { fft_len - (n - k) })
        .collect()
}

/// Places `X[0..=N/2]` at the start of an `N*L` spectrum and the remaining
/// (negative-frequency) half at its tail; everything between is zero.
pub fn oversample_spectrum(x: &[ComplexSample], oversample: usize) -> Result<Vec<ComplexSample>> {
    if oversample < 1 {
        return Err(Error::invalid("oversample", "must be at least 1"));
    }
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let fft_len = x.len() * oversample;
    if !fft_len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: fft_len });
    }
    let mut out = vec![ComplexSample::new(0.0, 0.0); fft_len];
    for (k, bin) in occupied_bins(x.len(), fft_len).into_iter().enumerate() {
        out[bin] = x[k];
    }
    Ok(out)
}

/// Inverse of [`oversample_spectrum`]: gathers the N data bins back.
pub fn collapse_spectrum(
    padded: &[ComplexSample],
    n_subcarriers: usize,
) -> Result<Vec<ComplexSample>> {
    if n_subcarriers == 0 || padded.len() < n_subcarriers {
        return Err(Error::LengthMismatch {
            expected: n_subcarriers,
            actual: padded.len(),
        });
    }
    Ok(occupied_bins(n_subcarriers, padded.len())
        .into_iter()
        .map(|bin| padded[bin])
        .collect())
}

/// `x'[m] = (1/sqrt(LN)) sum_k X[k] e^{j 2 pi m k / LN}`.
pub fn ofdm_modulate(padded: &[ComplexSample], params: &OfdmParams) -> Result<Vec<ComplexSample>> {
    params.validate()?;
    Modulator::new(params)?.modulate(padded)
}

/// Unitary-scaled N*L-point transforms shared by transmitter and receiver.
#[derive(Debug, Clone)]
pub struct Modulator {
    plan: FftPlan,
    scale: f64,
}

impl Modulator {
    pub fn new(params: &OfdmParams) -> Result<Self> {
        let plan = FftPlan::new(params.fft_len())?;
        Ok(Self {
            scale: (params.fft_len() as f64).sqrt(),
            plan,
        })
    }

    pub fn fft_len(&self) -> usize {
        self.plan.len()
    }

    pub fn modulate(&self, padded: &[ComplexSample]) -> Result<Vec<ComplexSample>> {
        let mut x = padded.to_vec();
        self.plan.inverse(&mut x)?;
        x.iter_mut().for_each(|v| *v *= self.scale);
        Ok(x)
    }

    pub fn demodulate(&self, time: &[ComplexSample]) -> Result<Vec<ComplexSample>> {
        let mut x = time.to_vec();
        self.plan.forward(&mut x)?;
        let inv = 1.0 / self.scale;
        x.iter_mut().for_each(|v| *v *= inv);
        Ok(x)
    }
}

pub fn add_cyclic_prefix<T: Clone>(x: &[T], cp_len: usize) -> Result<Vec<T>> {
    if cp_len > x.len() {
        return Err(Error::invalid(
            "cp_len",
            format!("{cp_len} exceeds signal length {}", x.len()),
        ));
    }
    let mut out = Vec::with_capacity(x.len() + cp_len);
    out.extend_from_slice(&x[x.len() - cp_len..]);
    out.extend_from_slice(x);
    Ok(out)
}

pub fn remove_cyclic_prefix<T: Clone>(x: &[T], cp_len: usize) -> Result<Vec<T>> {
    if cp_len > x.len() {
        return Err(Error::invalid(
            "cp_len",
            format!("{cp_len} exceeds signal length {}", x.len()),
        ));
    }
    Ok(x[cp_len..].to_vec())
}

/// Takes the FFT window `advance` samples early inside the guard interval and
/// rotates it back, which leaves the symbol unchanged for a cyclic signal
/// but keeps filter tails at the symbol end out of the window.
pub fn extract_symbol<T: Clone>(
    x: &[T],
    cp_len: usize,
    symbol_len: usize,
    advance: usize,
) -> Result<Vec<T>> {
    if advance > cp_len {
        return Err(Error::invalid(
            "advance",
            format!("{advance} exceeds guard {cp_len}"),
        ));
    }
    if x.len() < cp_len + symbol_len {
        return Err(Error::LengthMismatch {
            expected: cp_len + symbol_len,
            actual: x.len(),
        });
    }
    let start = cp_len - advance;
    let mut w = x[start..start + symbol_len].to_vec();
    w.rotate_left(advance % symbol_len.max(1));
    Ok(w)
}

/// Carrier mixer between complex baseband and real passband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carrier {
    pub carrier_hz: f64,
    pub sample_rate_hz: f64,
    pub bandwidth_hz: f64,
}

impl Carrier {
    /// Rejects carriers whose occupied band would fold over DC or Nyquist.
    pub fn new(carrier_hz: f64, sample_rate_hz: f64, bandwidth_hz: f64) -> Result<Self> {
        let half_bw = bandwidth_hz / 2.0;
        if !(carrier_hz > half_bw && carrier_hz < sample_rate_hz / 2.0 - half_bw) {
            return Err(Error::invalid(
                "carrier_hz",
                format!(
                    "{carrier_hz} Hz with bandwidth {bandwidth_hz} Hz folds over at fs = {sample_rate_hz} Hz; need BW/2 < fc < fs/2 - BW/2"
                ),
            ));
        }
        Ok(Self {
            carrier_hz,
            sample_rate_hz,
            bandwidth_hz,
        })
    }

    /// `e^{j 2 pi fc m / fs}` for `m = start .. start + len`.
    pub fn oscillator(&self, start: i64, len: usize) -> Vec<ComplexSample> {
        let cycles_per_sample = self.carrier_hz / self.sample_rate_hz;
        (0..len as i64)
            .map(|i| {
                let turns = ((start + i) as f64 * cycles_per_sample).rem_euclid(1.0);
                ComplexSample::from_polar(1.0, 2.0 * PI * turns)
            })
            .collect()
    }

    pub fn upconvert(&self, x: &SignalBuffer) -> Result<RealBuffer> {
        self.check_rate(x.sample_rate_hz)?;
        let osc = self.oscillator(0, x.len());
        RealBuffer::new(upconvert_with(&x.samples, &osc), x.sample_rate_hz)
    }

    pub fn downconvert(&self, xp: &RealBuffer, lpf: &DesignedFilter) -> Result<SignalBuffer> {
        self.downconvert_from(xp, lpf, 0)
    }

    /// Like [`Carrier::downconvert`], with the first sample at carrier index
    /// `start` (negative when a guard interval precedes the symbol).
    pub fn downconvert_from(
        &self,
        xp: &RealBuffer,
        lpf: &DesignedFilter,
        start: i64,
    ) -> Result<SignalBuffer> {
        self.check_rate(xp.sample_rate_hz)?;
        self.check_lowpass(lpf)?;
        let osc = self.oscillator(start, xp.len());
        SignalBuffer::time(downconvert_with(&xp.samples, &osc, lpf)?, xp.sample_rate_hz)
    }

    pub fn check_lowpass(&self, lpf: &DesignedFilter) -> Result<()> {
        let half_bw = self.bandwidth_hz / 2.0;
        let max = 2.0 * self.carrier_hz - half_bw;
        let ok = lpf.spec.kind == Kind::Lowpass
            && lpf
                .spec
                .edges_hz
                .first()
                .is_some_and(|&c| c >= half_bw && c < max);
        if !ok {
            return Err(Error::invalid(
                "lpf",
                format!("receive filter must be a lowpass with cutoff in [{half_bw}, {max}) Hz"),
            ));
        }
        Ok(())
    }

    fn check_rate(&self, rate: f64) -> Result<()> {
        if (rate - self.sample_rate_hz).abs() > 1e-9 * self.sample_rate_hz {
            return Err(Error::SampleRateMismatch {
                signal_hz: rate,
                filter_hz: self.sample_rate_hz,
            });
        }
        Ok(())
    }
}

pub(crate) fn upconvert_with(x: &[ComplexSample], osc: &[ComplexSample]) -> Vec<f64> {
    x.iter()
        .zip(osc)
        .map(|(v, o)| SQRT_2 * (v * o).re)
        .collect()
}

pub(crate) fn downconvert_with(
    xp: &[f64],
    osc: &[ComplexSample],
    lpf: &DesignedFilter,
) -> Result<Vec<ComplexSample>> {
    let mixed: Vec<ComplexSample> = xp
        .iter()
        .zip(osc)
        .map(|(&v, o)| o.conj() * (SQRT_2 * v))
        .collect();
    lpf.apply(&mixed, lpf.sample_rate_hz())
}

/// One transmitted symbol, stage by stage.
#[derive(Debug, Clone)]
pub struct OfdmSymbol {
    pub freq_data: Vec<ComplexSample>,
    pub time_oversampled: Vec<ComplexSample>,
    pub passband: RealBuffer,
}

/// Cached transforms and oscillator tables for one parameter set.
#[derive(Debug, Clone)]
pub struct Transmitter {
    params: OfdmParams,
    modulator: Modulator,
    mixer: Option<(Carrier, Vec<ComplexSample>)>,
}

impl Transmitter {
    pub fn new(params: &OfdmParams) -> Result<Self> {
        let mut tx = Self::baseband_only(params)?;
        let carrier = params.carrier()?;
        tx.mixer = Some((carrier, carrier.oscillator(0, params.fft_len())));
        Ok(tx)
    }

    /// A transmitter that stops at complex baseband; `synthesize` fails.
    pub fn baseband_only(params: &OfdmParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            modulator: Modulator::new(params)?,
            mixer: None,
            params: params.clone(),
        })
    }

    pub fn params(&self) -> &OfdmParams {
        &self.params
    }

    pub fn carrier(&self) -> Option<&Carrier> {
        self.mixer.as_ref().map(|(c, _)| c)
    }

    pub fn baseband(&self, data: &[ComplexSample]) -> Result<Vec<ComplexSample>> {
        if data.len() != self.params.n_subcarriers {
            return Err(Error::LengthMismatch {
                expected: self.params.n_subcarriers,
                actual: data.len(),
            });
        }
        self.modulator
            .modulate(&oversample_spectrum(data, self.params.oversample)?)
    }

    pub fn synthesize(&self, data: &[ComplexSample]) -> Result<OfdmSymbol> {
        let (_, osc) = self.mixer.as_ref().ok_or_else(|| {
            Error::invalid("carrier_hz", "transmitter was built without a carrier")
        })?;
        let time = self.baseband(data)?;
        let passband = RealBuffer::new(upconvert_with(&time, osc), self.params.sample_rate_hz())?;
        Ok(OfdmSymbol {
            freq_data: data.to_vec(),
            time_oversampled: time,
            passband,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Receiver {
    params: OfdmParams,
    modulator: Modulator,
    lpf: DesignedFilter,
    osc: Vec<ComplexSample>,
    advance: usize,
}

impl Receiver {
    /// `advance` is how far the FFT window starts inside the guard interval.
    pub fn new(params: &OfdmParams, lpf: DesignedFilter, advance: usize) -> Result<Self> {
        params.validate()?;
        let carrier = params.carrier()?;
        carrier.check_lowpass(&lpf)?;
        if advance > params.cp_samples() {
            return Err(Error::invalid("advance", "exceeds the guard interval"));
        }
        let cp = params.cp_samples();
        Ok(Self {
            modulator: Modulator::new(params)?,
            osc: carrier.oscillator(-(cp as i64), params.fft_len() + cp),
            lpf,
            advance,
            params: params.clone(),
        })
    }

    /// Passband with guard interval in, N equalizer-free data-bin estimates out.
    pub fn receive(&self, passband_with_cp: &[f64]) -> Result<Vec<ComplexSample>> {
        let expected = self.params.fft_len() + self.params.cp_samples();
        if passband_with_cp.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: passband_with_cp.len(),
            });
        }
        let baseband = downconvert_with(passband_with_cp, &self.osc, &self.lpf)?;
        let window = extract_symbol(
            &baseband,
            self.params.cp_samples(),
            self.params.fft_len(),
            self.advance,
        )?;
        collapse_spectrum(
            &self.modulator.demodulate(&window)?,
            self.params.n_subcarriers,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{design, FilterSpec};
    use crate::modem::{generate_bits, Constellation, Scheme};
    use crate::signal::mean_power;

    fn c(re: f64, im: f64) -> ComplexSample {
        ComplexSample::new(re, im)
    }

    fn default_lpf(params: &OfdmParams) -> DesignedFilter {
        design(&FilterSpec::fir(
            Kind::Lowpass,
            64,
            &[params.carrier_hz],
            params.sample_rate_hz(),
        ))
        .unwrap()
    }

    fn random_block(scheme: Scheme, n: usize, index: u64) -> Vec<ComplexSample> {
        let m = Constellation::new(scheme);
        m.map(
            &generate_bits(n * m.bits_per_symbol(), 99, index)
                .unwrap()
                .bits,
        )
        .unwrap()
    }

    #[test]
    fn oversample_identity_at_l1() {
        let x = vec![c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0)];
        assert_eq!(oversample_spectrum(&x, 1).unwrap(), x);
    }

    #[test]
    fn oversample_index_mapping() {
        let (a, b, cc, d) = (c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0));
        let z = c(0.0, 0.0);
        assert_eq!(
            oversample_spectrum(&[a, b, cc, d], 2).unwrap(),
            vec![a, b, cc, z, z, z, z, d]
        );
        assert_eq!(
            collapse_spectrum(&[a, b, cc, z, z, z, z, d], 4).unwrap(),
            vec![a, b, cc, d]
        );
    }

    #[test]
    fn oversample_zero_and_energy() {
        assert!(oversample_spectrum(&[c(0.0, 0.0); 8], 4)
            .unwrap()
            .iter()
            .all(|v| v.norm() == 0.0));
        let x = random_block(Scheme::Qam16, 128, 1);
        let y = oversample_spectrum(&x, 8).unwrap();
        let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let ey: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        assert_eq!(ex, ey);
        assert!(oversample_spectrum(&x, 0).is_err());
        assert!(oversample_spectrum(&x[..96], 1).is_err());
    }

    #[test]
    fn single_tone_modulates_to_constant() {
        let p = OfdmParams::default();
        let m = p.fft_len();
        let mut padded = vec![c(0.0, 0.0); m];
        padded[0] = c((m as f64).sqrt(), 0.0);
        let x = ofdm_modulate(&padded, &p).unwrap();
        assert!(x.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-12));
        assert!(ofdm_modulate(&vec![c(0.0, 0.0); m], &p)
            .unwrap()
            .iter()
            .all(|v| v.norm() == 0.0));
        assert!(matches!(
            ofdm_modulate(&padded[..512], &p),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn modulated_power_is_one_over_l() {
        // Parseval: sum |x'|^2 = sum |X|^2 = N, so mean power = N / (N L) = 1/L.
        let p = OfdmParams::default();
        let tx = Transmitter::new(&p).unwrap();
        let mut total = 0.0;
        for i in 0..100 {
            let x = tx.baseband(&random_block(Scheme::Qpsk, 128, i)).unwrap();
            total += mean_power(&x).unwrap();
        }
        let avg = total / 100.0;
        assert!((avg - 0.125).abs() < 0.05 * 0.125, "{avg}");
    }

    #[test]
    fn cyclic_prefix() {
        let x = [1, 2, 3, 4];
        assert_eq!(add_cyclic_prefix(&x, 0).unwrap(), x.to_vec());
        assert_eq!(add_cyclic_prefix(&x, 2).unwrap(), vec![3, 4, 1, 2, 3, 4]);
        assert_eq!(
            remove_cyclic_prefix(&add_cyclic_prefix(&x, 3).unwrap(), 3).unwrap(),
            x.to_vec()
        );
        assert!(add_cyclic_prefix(&x, 5).is_err());
        assert!(remove_cyclic_prefix(&x, 5).is_err());
    }

    #[test]
    fn window_advance_is_transparent_for_cyclic_input() {
        let x: Vec<u32> = (0..16).collect();
        let with_cp = add_cyclic_prefix(&x, 6).unwrap();
        for adv in 0..=6 {
            assert_eq!(extract_symbol(&with_cp, 6, 16, adv).unwrap(), x);
        }
        assert!(extract_symbol(&with_cp, 6, 16, 7).is_err());
    }

    #[test]
    fn upconvert_constant_is_scaled_cosine() {
        let p = OfdmParams::default();
        let carrier = p.carrier().unwrap();
        let x = SignalBuffer::time(vec![c(1.0, 0.0); 64], p.sample_rate_hz()).unwrap();
        let y = carrier.upconvert(&x).unwrap();
        for (m, v) in y.samples.iter().enumerate() {
            let want = SQRT_2 * (2.0 * PI * p.carrier_hz * m as f64 / p.sample_rate_hz()).cos();
            assert!((v - want).abs() < 1e-12);
        }
        let zero = SignalBuffer::time(vec![c(0.0, 0.0); 64], p.sample_rate_hz()).unwrap();
        assert!(carrier
            .upconvert(&zero)
            .unwrap()
            .samples
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn upconvert_preserves_power() {
        let p = OfdmParams::default();
        let tx = Transmitter::new(&p).unwrap();
        for i in 0..20 {
            let s = tx.synthesize(&random_block(Scheme::Qpsk, 128, i)).unwrap();
            let pb = s.passband.mean_power().unwrap();
            let bb = mean_power(&s.time_oversampled).unwrap();
            assert!((pb / bb - 1.0).abs() < 0.01, "{pb} vs {bb}");
        }
    }

    #[test]
    fn carrier_fold_over_rejected() {
        assert!(Carrier::new(3.7e6, 8e6, 1e6).is_err());
        assert!(Carrier::new(0.4e6, 8e6, 1e6).is_err());
        assert!(Carrier::new(2e6, 8e6, 1e6).is_ok());
    }

    #[test]
    fn downconvert_checks_lpf() {
        let p = OfdmParams::default();
        let carrier = p.carrier().unwrap();
        let xp = RealBuffer::new(vec![0.0; 32], p.sample_rate_hz()).unwrap();
        let narrow = design(&FilterSpec::fir(
            Kind::Lowpass,
            16,
            &[0.2e6],
            p.sample_rate_hz(),
        ))
        .unwrap();
        let wide = design(&FilterSpec::fir(
            Kind::Lowpass,
            16,
            &[3.6e6],
            p.sample_rate_hz(),
        ))
        .unwrap();
        let hp = design(&FilterSpec::fir(
            Kind::Highpass,
            16,
            &[1e6],
            p.sample_rate_hz(),
        ))
        .unwrap();
        for f in [narrow, wide, hp] {
            assert!(carrier.downconvert(&xp, &f).is_err());
        }
        let out = carrier.downconvert(&xp, &default_lpf(&p)).unwrap();
        assert!(out.samples.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn pure_carrier_downconverts_to_dc() {
        let p = OfdmParams::default();
        let carrier = p.carrier().unwrap();
        let fs = p.sample_rate_hz();
        let xp: Vec<f64> = (0..512)
            .map(|m| SQRT_2 * (2.0 * PI * p.carrier_hz * m as f64 / fs).cos())
            .collect();
        let y = carrier
            .downconvert(&RealBuffer::new(xp, fs).unwrap(), &default_lpf(&p))
            .unwrap();
        for v in &y.samples[64..448] {
            assert!((v - c(1.0, 0.0)).norm() < 1e-3, "{v}");
        }
    }

    #[test]
    fn baseband_round_trip_evm() {
        let p = OfdmParams::default();
        let tx = Transmitter::new(&p).unwrap();
        let carrier = p.carrier().unwrap();
        let lpf = default_lpf(&p);
        for i in 0..10 {
            let s = tx.synthesize(&random_block(Scheme::Qam16, 128, i)).unwrap();
            let rx = carrier.downconvert(&s.passband, &lpf).unwrap();
            let mid = 64..p.fft_len() - 64;
            let err: f64 = rx.samples[mid.clone()]
                .iter()
                .zip(&s.time_oversampled[mid.clone()])
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            let sig: f64 = s.time_oversampled[mid].iter().map(|v| v.norm_sqr()).sum();
            let evm = (err / sig).sqrt();
            assert!(evm < 0.01, "symbol {i}: evm {evm}");
        }
    }

    #[test]
    fn noiseless_transceiver_recovers_data() {
        let p = OfdmParams::default();
        let tx = Transmitter::new(&p).unwrap();
        let rx = Receiver::new(&p, default_lpf(&p), p.cp_samples() / 2).unwrap();
        for scheme in [Scheme::Qpsk, Scheme::Qam16] {
            let m = Constellation::new(scheme);
            for i in 0..5 {
                let data = random_block(scheme, 128, i);
                let s = tx.synthesize(&data).unwrap();
                let sent = add_cyclic_prefix(&s.passband.samples, p.cp_samples()).unwrap();
                let got = rx.receive(&sent).unwrap();
                let worst = got
                    .iter()
                    .zip(&data)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                // Hamming passband ripple is about 0.2%
                assert!(worst < 1e-2, "{scheme}: {worst}");
                assert_eq!(m.demap(&got).unwrap(), m.demap(&data).unwrap());
            }
        }
    }
}
