//! Bit generation and Gray-coded QPSK / 16-QAM mapping.
//!
//! Both constellations are square, so mapping and hard decisions are done
//! per axis: the first half of a symbol's bits picks the in-phase level, the
//! second half the quadrature level. On each axis the first bit is the sign
//! (0 = positive) and, for 16-QAM, the second bit selects the outer level.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::signal::ComplexSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Qpsk,
    Qam16,
}

impl Scheme {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Scheme::Qpsk => 2,
            Scheme::Qam16 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Qpsk => "qpsk",
            Scheme::Qam16 => "qam16",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" | "4qam" | "qam4" => Ok(Scheme::Qpsk),
            "qam16" | "16qam" | "qam" => Ok(Scheme::Qam16),
            other => Err(Error::Config(format!(
                "unknown modulation scheme `{other}`"
            ))),
        }
    }
}

/// One axis of a square constellation: ascending amplitude levels, the Gray
/// label carried by each level, and the decision thresholds between them.
#[derive(Debug, Clone)]
struct Axis {
    levels: Vec<f64>,
    labels: Vec<usize>,
    thresholds: Vec<f64>,
    bits: usize,
}

impl Axis {
    fn new(levels: Vec<f64>, labels: Vec<usize>, bits: usize) -> Self {
        let thresholds = levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Self {
            levels,
            labels,
            thresholds,
            bits,
        }
    }

    fn level_for(&self, label: usize) -> f64 {
        let idx = self
            .labels
            .iter()
            .position(|&l| l == label)
            .expect("label in table");
        self.levels[idx]
    }

    /// Nearest level; a value exactly on a threshold goes to the smaller label.
    fn decide(&self, v: f64) -> usize {
        let mut region = 0;
        for (i, &t) in self.thresholds.iter().enumerate() {
            if v > t {
                region = i + 1;
            } else {
                if v == t && self.labels[i + 1] < self.labels[i] {
                    region = i + 1;
                }
                break;
            }
        }
        self.labels[region]
    }
}

#[derive(Debug, Clone)]
pub struct Constellation {
    scheme: Scheme,
    axis: Axis,
    points: Vec<ComplexSample>,
}

impl Constellation {
    pub fn new(scheme: Scheme) -> Self {
        let axis = match scheme {
            Scheme::Qpsk => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                Axis::new(vec![-a, a], vec![1, 0], 1)
            }
            Scheme::Qam16 => {
                let s = 10f64.sqrt();
                Axis::new(
                    vec![-3.0 / s, -1.0 / s, 1.0 / s, 3.0 / s],
                    vec![0b11, 0b10, 0b00, 0b01],
                    2,
                )
            }
        };
        let points = (0..1usize << scheme.bits_per_symbol())
            .map(|label| {
                let i = label >> axis.bits;
                let q = label & ((1 << axis.bits) - 1);
                ComplexSample::new(axis.level_for(i), axis.level_for(q))
            })
            .collect();
        Self {
            scheme,
            axis,
            points,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.scheme.bits_per_symbol()
    }

    /// Constellation points indexed by integer label (bits MSB first).
    pub fn points(&self) -> &[ComplexSample] {
        &self.points
    }

    pub fn map(&self, bits: &[u8]) -> Result<Vec<ComplexSample>> {
        let k = self.bits_per_symbol();
        if !bits.len().is_multiple_of(k) {
            return Err(Error::invalid(
                "bits",
                format!("length {} is not a multiple of {k}", bits.len()),
            ));
        }
        Ok(bits
            .chunks_exact(k)
            .map(|group| {
                let label = group
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.points[label]
            })
            .collect())
    }

    /// Hard minimum-distance decisions back to bits.
    pub fn demap(&self, symbols: &[ComplexSample]) -> Result<Vec<u8>> {
        if symbols.is_empty() {
            return Err(Error::Empty);
        }
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for s in symbols {
            self.demap_into(*s, &mut out);
        }
        Ok(out)
    }

    pub fn decide(&self, symbol: ComplexSample) -> usize {
        (self.axis.decide(symbol.re) << self.axis.bits) | self.axis.decide(symbol.im)
    }

    pub(crate) fn demap_into(&self, symbol: ComplexSample, out: &mut Vec<u8>) {
        let label = self.decide(symbol);
        let k = self.bits_per_symbol();
        out.extend((0..k).rev().map(|shift| ((label >> shift) & 1) as u8));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    pub bits: Vec<u8>,
    pub master_seed: u64,
    pub stream_index: u64,
}

pub fn generate_bits(count: usize, master_seed: u64, stream_index: u64) -> Result<BitStream> {
    if count == 0 {
        return Err(Error::invalid("count", "must be positive"));
    }
    let mut rng = rng::stream(master_seed, Purpose::Bits, stream_index);
    let mut bits = Vec::with_capacity(count);
    while bits.len() < count {
        let word = rng.next_u64();
        let take = (count - bits.len()).min(64);
        bits.extend((0..take).map(|i| ((word >> i) & 1) as u8));
    }
    Ok(BitStream {
        bits,
        master_seed,
        stream_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SCHEMES: [Scheme; 2] = [Scheme::Qpsk, Scheme::Qam16];

    fn c(re: f64, im: f64) -> ComplexSample {
        ComplexSample::new(re, im)
    }

    #[test]
    fn qpsk_convention() {
        let m = Constellation::new(Scheme::Qpsk);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(m.map(&[0, 0]).unwrap(), vec![c(s, s)]);
        assert_eq!(m.map(&[1, 1]).unwrap(), vec![c(-s, -s)]);
        assert_eq!(m.map(&[0, 1]).unwrap(), vec![c(s, -s)]);
    }

    #[test]
    fn qam16_axis_levels() {
        let m = Constellation::new(Scheme::Qam16);
        let s = 10f64.sqrt();
        assert_eq!(m.map(&[0, 0, 0, 0]).unwrap()[0], c(1.0 / s, 1.0 / s));
        assert_eq!(m.map(&[1, 1, 0, 1]).unwrap()[0], c(-3.0 / s, 3.0 / s));
    }

    #[test]
    fn unit_average_energy() {
        for scheme in SCHEMES {
            let pts = Constellation::new(scheme).points().to_vec();
            let e: f64 = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!((e - 1.0).abs() < 1e-12, "{scheme}: {e}");
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for scheme in SCHEMES {
            let m = Constellation::new(scheme);
            let pts = m.points();
            let spacing = match scheme {
                Scheme::Qpsk => 2.0 * std::f64::consts::FRAC_1_SQRT_2,
                Scheme::Qam16 => 2.0 / 10f64.sqrt(),
            };
            let mut pairs = 0;
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    let d = pts[a] - pts[b];
                    let axis_neighbour = (d.re.abs() < 1e-12
                        && (d.im.abs() - spacing).abs() < 1e-12)
                        || (d.im.abs() < 1e-12 && (d.re.abs() - spacing).abs() < 1e-12);
                    if axis_neighbour {
                        pairs += 1;
                        assert_eq!((a ^ b).count_ones(), 1, "{scheme}: labels {a:b} {b:b}");
                    }
                }
            }
            assert!(pairs > 0);
        }
    }

    #[test]
    fn exhaustive_round_trip() {
        for scheme in SCHEMES {
            let m = Constellation::new(scheme);
            for (label, &p) in m.points().iter().enumerate() {
                assert_eq!(m.decide(p), label);
            }
        }
    }

    #[test]
    fn quadrant_decisions() {
        let m = Constellation::new(Scheme::Qpsk);
        assert_eq!(m.demap(&[c(0.9, 0.8)]).unwrap(), vec![0, 0]);
        assert_eq!(m.demap(&[c(-0.1, 2.0)]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn boundary_ties_go_to_lower_label() {
        let qpsk = Constellation::new(Scheme::Qpsk);
        assert_eq!(qpsk.demap(&[c(0.0, 0.5)]).unwrap(), vec![0, 0]);
        assert_eq!(qpsk.decide(c(0.0, 0.0)), 0);

        let qam = Constellation::new(Scheme::Qam16);
        let s = 10f64.sqrt();
        let axis = &qam.axis;
        // thresholds sit between -3/-1 (labels 11/10), -1/+1 (10/00), +1/+3 (00/01)
        assert_eq!(axis.decide(axis.thresholds[0]), 0b10);
        assert_eq!(axis.decide(axis.thresholds[1]), 0b00);
        assert_eq!(axis.decide(axis.thresholds[2]), 0b00);
        assert_eq!(axis.decide(-10.0 / s), 0b11);
        assert_eq!(axis.decide(10.0 / s), 0b01);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(Constellation::new(Scheme::Qam16).map(&[0, 1, 1]).is_err());
        assert!(matches!(
            Constellation::new(Scheme::Qpsk).demap(&[]),
            Err(Error::Empty)
        ));
        assert!(generate_bits(0, 1, 1).is_err());
    }

    #[test]
    fn noiseless_round_trip_10k_bits() {
        for scheme in SCHEMES {
            let m = Constellation::new(scheme);
            let bits = generate_bits(10_000, 3, 0).unwrap().bits;
            assert_eq!(m.demap(&m.map(&bits).unwrap()).unwrap(), bits);
        }
    }

    #[test]
    fn bit_streams_deterministic_and_index_sensitive() {
        let a = generate_bits(64, 11, 5).unwrap();
        assert_eq!(a, generate_bits(64, 11, 5).unwrap());
        let b = generate_bits(64, 11, 6).unwrap();
        assert_ne!(a.bits, b.bits);
        assert_eq!(a.bits.len(), 64);
        assert_eq!(generate_bits(70, 11, 5).unwrap().bits[..64], a.bits[..]);
    }

    #[test]
    fn ones_fraction_is_balanced() {
        // Binomial(1e6, 1/2) has std 5e-4; 0.002 is a 4-sigma band.
        let bits = generate_bits(1_000_000, 2024, 0).unwrap().bits;
        let ones = bits.iter().filter(|&&b| b == 1).count() as f64 / bits.len() as f64;
        assert!((ones - 0.5).abs() < 0.002, "{ones}");
    }

    proptest! {
        #[test]
        fn every_point_demaps_to_one_label(re in -3.0f64..3.0, im in -3.0f64..3.0) {
            for scheme in SCHEMES {
                let m = Constellation::new(scheme);
                let label = m.decide(c(re, im));
                prop_assert!(label < m.points().len());
                // the chosen point is at least as close as any other
                let d = (m.points()[label] - c(re, im)).norm_sqr();
                for p in m.points() {
                    prop_assert!(d <= (p - c(re, im)).norm_sqr() + 1e-12);
                }
            }
        }

        #[test]
        fn map_demap_identity(seed in any::<u64>(), groups in 1usize..200) {
            for scheme in SCHEMES {
                let m = Constellation::new(scheme);
                let bits = generate_bits(groups * m.bits_per_symbol(), seed, 0).unwrap().bits;
                prop_assert_eq!(m.demap(&m.map(&bits).unwrap()).unwrap(), bits);
            }
        }
    }
}
