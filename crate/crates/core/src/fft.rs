//! Iterative radix-2 FFT.
//!
//! Convention: the forward transform is the unnormalized sum
//! `X[k] = sum_n x[n] e^{-j 2 pi n k / M}`, the inverse carries the `1/M`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::signal::{ComplexSample, SignalBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Precomputed twiddles and bit-reversal permutation for one transform size.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<ComplexSample>,
    bit_reverse: Vec<usize>,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len });
        }
        let twiddles = (0..len / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                ComplexSample::new(angle.cos(), angle.sin())
            })
            .collect();
        let bits = len.trailing_zeros();
        let bit_reverse = (0..len)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                }
            })
            .collect();
        Ok(Self {
            len,
            twiddles,
            bit_reverse,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, data: &mut [ComplexSample]) -> Result<()> {
        self.transform(data, false)
    }

    pub fn inverse(&self, data: &mut [ComplexSample]) -> Result<()> {
        self.transform(data, true)?;
        let scale = 1.0 / self.len as f64;
        data.iter_mut().for_each(|x| *x *= scale);
        Ok(())
    }

    pub fn process(&self, data: &mut [ComplexSample], direction: Direction) -> Result<()> {
        match direction {
            Direction::Forward => self.forward(data),
            Direction::Inverse => self.inverse(data),
        }
    }

    fn transform(&self, data: &mut [ComplexSample], conjugate: bool) -> Result<()> {
        if data.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: data.len(),
            });
        }
        for (i, &j) in self.bit_reverse.iter().enumerate() {
            if i < j {
                data.swap(i, j);
            }
        }

        let mut half = 1;
        while half < self.len {
            let stride = self.len / (2 * half);
            for block in data.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let w = self.twiddles[k * stride];
                    let w = if conjugate { w.conj() } else { w };
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            half *= 2;
        }
        Ok(())
    }
}

/// Transform a whole buffer, flipping its domain tag.
pub fn fft(buf: &SignalBuffer, direction: Direction) -> Result<SignalBuffer> {
    let plan = FftPlan::new(buf.len())?;
    let mut samples = buf.samples.clone();
    plan.process(&mut samples, direction)?;
    Ok(SignalBuffer {
        samples,
        sample_rate_hz: buf.sample_rate_hz,
        domain: buf.domain.flipped(),
    })
}
