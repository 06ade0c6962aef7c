//! Chebyshev Type I design via the analog prototype and the bilinear
//! transform.
//!
//! The prototype is normalized so that its ripple band ends at 1 rad/s; the
//! digital edges are prewarped with `tan(pi f / fs)`, which makes the
//! magnitude at each digital edge exactly `-ripple` dB.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Biquad, DesignedFilter, Family, FilterSpec, Kind, Realization};
use crate::error::{Error, Result};

/// Poles must sit at least this far inside the unit circle.
const STABILITY_MARGIN: f64 = 1e-9;

pub fn design_cheby1(spec: &FilterSpec) -> Result<DesignedFilter> {
    if spec.family != Family::IirCheby1 {
        return Err(Error::invalid(
            "family",
            "design_cheby1 needs a Chebyshev spec",
        ));
    }
    spec.validate()?;
    let n = spec.order;
    let fs = spec.sample_rate_hz;
    let eps = (10f64.powf(spec.passband_ripple_db / 10.0) - 1.0).sqrt();
    let prototype = prototype_poles(n, eps);
    let warp = |f: f64| (PI * f / fs).tan();

    // Analog poles after the frequency transformation, plus the digital
    // numerator shared by every section and the reference frequency where the
    // gain is pinned.
    let (analog, numerator, reference_omega) = match spec.kind {
        Kind::Lowpass => {
            let wc = warp(spec.edges_hz[0]);
            let poles: Vec<Complex64> = prototype.iter().map(|p| p * wc).collect();
            (poles, [1.0, 2.0, 1.0], 0.0)
        }
        Kind::Bandpass => {
            let (w1, w2) = (warp(spec.edges_hz[0]), warp(spec.edges_hz[1]));
            let bw = w2 - w1;
            let w0_sq = w1 * w2;
            // s -> (s^2 + w0^2) / (bw s): each prototype pole p yields the two
            // roots of s^2 - p bw s + w0^2.
            let poles = prototype
                .iter()
                .flat_map(|&p| {
                    let pb = p * bw;
                    let disc = (pb * pb - 4.0 * w0_sq).sqrt();
                    [(pb + disc) / 2.0, (pb - disc) / 2.0]
                })
                .collect();
            (poles, [1.0, 0.0, -1.0], 2.0 * w0_sq.sqrt().atan())
        }
        Kind::Highpass => {
            return Err(Error::invalid(
                "kind",
                "Chebyshev designs support lowpass and bandpass",
            ));
        }
    };

    let digital: Vec<Complex64> = analog.iter().map(|&p| (1.0 + p) / (1.0 - p)).collect();
    for z in &digital {
        if !(z.norm() < 1.0 - STABILITY_MARGIN) || !z.re.is_finite() {
            return Err(Error::Numerical {
                stage: "cheby1 design",
                detail: format!(
                    "pole {z} (|z| = {:.12}) not inside the unit circle for {} order {} ripple {} dB edges {:?} at fs {}",
                    z.norm(),
                    spec.kind,
                    n,
                    spec.passband_ripple_db,
                    spec.edges_hz,
                    fs
                ),
            });
        }
    }

    let mut sections = group_sections(&digital, numerator)?;

    let target = if n % 2 == 1 {
        1.0
    } else {
        1.0 / (1.0 + eps * eps).sqrt()
    };
    let raw: Complex64 = sections
        .iter()
        .map(|s| s.response(reference_omega))
        .product();
    let per_section = (target / raw.norm()).powf(1.0 / sections.len() as f64);
    for s in &mut sections {
        s.b0 *= per_section;
        s.b1 *= per_section;
        s.b2 *= per_section;
    }

    Ok(DesignedFilter {
        spec: spec.clone(),
        realization: Realization::Biquads(sections),
    })
}

/// Left-half-plane poles of the normalized Type I prototype.
fn prototype_poles(n: usize, eps: f64) -> Vec<Complex64> {
    let phi = (1.0 / eps).asinh() / n as f64;
    (1..=n)
        .map(|k| {
            let theta = (2 * k - 1) as f64 * PI / (2 * n) as f64;
            Complex64::new(-phi.sinh() * theta.sin(), phi.cosh() * theta.cos())
        })
        .collect()
}

/// Pair conjugate poles into biquads; leftover real poles are paired with
/// each other, and a single remaining real pole becomes a first-order
/// section.
fn group_sections(poles: &[Complex64], numerator: [f64; 3]) -> Result<Vec<Biquad>> {
    const IMAG_TOL: f64 = 1e-12;
    let mut sections = Vec::new();
    let mut real: Vec<f64> = Vec::new();
    for p in poles {
        if p.im > IMAG_TOL {
            sections.push(Biquad {
                b0: numerator[0],
                b1: numerator[1],
                b2: numerator[2],
                a1: -2.0 * p.re,
                a2: p.norm_sqr(),
            });
        } else if p.im.abs() <= IMAG_TOL {
            real.push(p.re);
        }
    }
    let complex_count = poles.iter().filter(|p| p.im.abs() > IMAG_TOL).count();
    if complex_count != 2 * sections.len() {
        return Err(Error::Numerical {
            stage: "cheby1 design",
            detail: "complex poles do not come in conjugate pairs".into(),
        });
    }
    real.sort_by(f64::total_cmp);
    for pair in real.chunks(2) {
        match *pair {
            [a, b] => sections.push(Biquad {
                b0: numerator[0],
                b1: numerator[1],
                b2: numerator[2],
                a1: -(a + b),
                a2: a * b,
            }),
            // only a lowpass has an odd pole count: zero at z = -1
            [a] => sections.push(Biquad {
                b0: 1.0,
                b1: 1.0,
                b2: 0.0,
                a1: -a,
                a2: 0.0,
            }),
            _ => unreachable!(),
        }
    }
    Ok(sections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::design;

    const FS: f64 = 8e6;

    fn bp(order: usize, ripple: f64) -> DesignedFilter {
        design(&FilterSpec::cheby1(
            Kind::Bandpass,
            order,
            ripple,
            &[1.5e6, 2.5e6],
            FS,
        ))
        .unwrap()
    }

    fn sections(f: &DesignedFilter) -> &[Biquad] {
        match &f.realization {
            Realization::Biquads(s) => s,
            _ => unreachable!(),
        }
    }

    #[test]
    fn first_order_lowpass_oracle() {
        // n = 1: the prototype pole is -sinh(asinh(1/eps)) = -1/eps, so
        // H(s) = (1/eps) / (s + 1/eps) and |H(j1)|^2 = 1 / (1 + eps^2).
        let ripple = 1.0;
        let eps = (10f64.powf(ripple / 10.0) - 1.0).sqrt();
        let poles = prototype_poles(1, eps);
        assert!((poles[0] - Complex64::new(-1.0 / eps, 0.0)).norm() < 1e-12);

        let cutoff = 1e6;
        let f = design(&FilterSpec::cheby1(Kind::Lowpass, 1, ripple, &[cutoff], FS)).unwrap();
        assert_eq!(sections(&f).len(), 1);
        assert_eq!(f.poles().iter().filter(|p| p.norm() > 0.0).count(), 1);
        assert!((f.magnitude_db(cutoff) + ripple).abs() < 0.05);
        assert!((f.response_at(0.0).norm() - 1.0).abs() < 1e-12);

        // bilinear image of the analog pole, evaluated by hand
        let wc = (PI * cutoff / FS).tan();
        let pa = -wc / eps;
        let zp = (1.0 + pa) / (1.0 - pa);
        assert!((sections(&f)[0].a1 + zp).abs() < 1e-12);
    }

    #[test]
    fn order4_bandpass_at_default_geometry() {
        for ripple in [0.5, 1.0] {
            let f = bp(4, ripple);
            assert_eq!(sections(&f).len(), 4);
            let center = f.magnitude_db(2.0e6);
            assert!((-1.0..=1e-9).contains(&center), "{center}");
            assert!(f.magnitude_db(0.5e6) <= -20.0);
            assert!(f.magnitude_db(3.5e6) <= -20.0);
        }
    }

    #[test]
    fn edge_magnitude_equals_ripple() {
        for ripple in [0.1, 0.5, 1.0] {
            for order in [1, 2, 3, 4, 5] {
                let lp = design(&FilterSpec::cheby1(
                    Kind::Lowpass,
                    order,
                    ripple,
                    &[1.2e6],
                    FS,
                ))
                .unwrap();
                assert!(
                    (lp.magnitude_db(1.2e6) + ripple).abs() < 0.05,
                    "lp n={order} r={ripple}"
                );
                let f = bp(order, ripple);
                assert!(
                    (f.magnitude_db(1.5e6) + ripple).abs() < 0.05,
                    "bp n={order} r={ripple}"
                );
                assert!(
                    (f.magnitude_db(2.5e6) + ripple).abs() < 0.05,
                    "bp n={order} r={ripple}"
                );
            }
        }
    }

    #[test]
    fn all_poles_stable() {
        for order in 1..=8 {
            for ripple in [0.1, 0.5, 3.0] {
                let f = bp(order, ripple);
                assert_eq!(f.poles().len(), 2 * order);
                assert!(f.poles().iter().all(|p| p.norm() < 1.0 - STABILITY_MARGIN));
                let lp = design(&FilterSpec::cheby1(
                    Kind::Lowpass,
                    order,
                    ripple,
                    &[0.7e6],
                    FS,
                ))
                .unwrap();
                assert!(lp.poles().iter().all(|p| p.norm() < 1.0 - STABILITY_MARGIN));
            }
        }
    }

    #[test]
    fn highpass_not_supported() {
        let err = design(&FilterSpec::cheby1(Kind::Highpass, 2, 0.5, &[1e6], FS)).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "kind", .. }));
    }

    #[test]
    fn unstable_realization_reported() {
        // Edge so close to fs/2 that the warped pole lands on the unit circle
        // within the margin.
        let spec = FilterSpec::cheby1(Kind::Lowpass, 8, 0.01, &[FS / 2.0 * (1.0 - 1e-13)], FS);
        match design(&spec) {
            Err(Error::Numerical { detail, .. }) => assert!(detail.contains("unit circle")),
            other => panic!("expected numerical failure, got {other:?}"),
        }
    }
}
