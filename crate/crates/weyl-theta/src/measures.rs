//! Exact inverse-CDF samplers for the two limiting measures on the
//! fundamental domain.
//!
//! The base pair (x, y) has joint density (3/pi) y^{-2} above the unit
//! circle in the strip |x| <= 1/2:
//!
//! ```text
//! x = sin(pi x0 / 3 - pi / 6),        y = sqrt(1 - x^2) / (1 - y0),
//! ```
//!
//! with x0, y0 independent uniforms. The rational measure adds phi uniform
//! on [0, pi) and an atom of weight 1/3 on each of (0,0), (1/2,0), (0,1/2);
//! the irrational measure draws xi uniformly on the torus instead.
//!
//! Streams are ChaCha8 with the stream id baked into the generator, so one
//! stream per worker index reproduces bit-identically at any thread count.

use crate::error::{Error, Result};
use crate::group::{from_iwasawa, GroupElement, IwasawaCoords};
use crate::theta::ThetaPoint;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::io::Write;

/// Which limiting measure a sample was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureTag {
    /// mu^0: Haar on the base times three half-integer atoms.
    Rational,
    /// mu: full Haar probability measure.
    Irrational,
}

/// A point of the fundamental domain with its measure tag.
#[derive(Debug, Clone, Copy)]
pub struct MeasureSample {
    pub point: ThetaPoint,
    pub tag: MeasureTag,
}

/// Deterministic, splittable random stream: identical (seed, stream_id)
/// reproduce identical sequences bit for bit.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { rng }
    }

    /// Uniform on [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

/// The (x, y) base pair with density (3/pi) y^{-2} on the fundamental
/// domain of the modular group.
pub fn sample_base(rng: &mut RngStream) -> (f64, f64) {
    let x0 = rng.uniform();
    let mut y0 = rng.uniform();
    while y0 == 1.0 {
        // probability-zero guard for the division below
        y0 = rng.uniform();
    }
    let x = (PI * x0 / 3.0 - PI / 6.0).sin();
    let y = (1.0 - x * x).sqrt() / (1.0 - y0);
    (x, y)
}

/// Draw from the rational measure mu^0.
pub fn sample_mu0(rng: &mut RngStream) -> MeasureSample {
    let (x, y) = sample_base(rng);
    let phi = PI * rng.uniform();
    let xi0 = rng.uniform();
    let (xi1, xi2) = if xi0 < 1.0 / 3.0 {
        (0.0, 0.0)
    } else if xi0 < 2.0 / 3.0 {
        (0.5, 0.0)
    } else {
        (0.0, 0.5)
    };
    MeasureSample { point: ThetaPoint::new(x, y, phi, xi1, xi2), tag: MeasureTag::Rational }
}

/// Draw from the Haar probability measure mu.
pub fn sample_mu(rng: &mut RngStream) -> MeasureSample {
    let (x, y) = sample_base(rng);
    let phi = PI * rng.uniform();
    let to_torus = |u: f64| if u > 0.5 { u - 1.0 } else { u };
    let xi1 = to_torus(rng.uniform());
    let xi2 = to_torus(rng.uniform());
    MeasureSample { point: ThetaPoint::new(x, y, phi, xi1, xi2), tag: MeasureTag::Irrational }
}

/// Rebuild the group element of a sampled point (translation attached).
pub fn point_to_group(p: &ThetaPoint) -> GroupElement {
    let mut g = from_iwasawa(&IwasawaCoords { x: p.x, y: p.y, phi: p.phi.rem_euclid(2.0 * PI) });
    g.xi1 = p.xi1;
    g.xi2 = p.xi2;
    g
}

const RATIONAL_ATOMS: [(f64, f64); 3] = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)];

fn in_base_domain(p: &ThetaPoint) -> bool {
    (-0.5..0.5).contains(&p.x)
        && p.x * p.x + p.y * p.y >= 1.0 - 1e-12
        && (0.0..PI).contains(&p.phi)
}

/// Density of the requested measure at a fundamental-domain point:
/// 3/(pi^2 y^2) per unit d xi^2 for mu, 1/(pi^2 y^2) per atom for mu^0.
pub fn density(p: &ThetaPoint, tag: MeasureTag) -> Result<f64> {
    if !in_base_domain(p) {
        return Err(Error::OutsideFundamentalDomain);
    }
    match tag {
        MeasureTag::Irrational => {
            let on_torus = p.xi1 > -0.5 && p.xi1 <= 0.5 && p.xi2 > -0.5 && p.xi2 <= 0.5;
            if !on_torus {
                return Err(Error::OutsideFundamentalDomain);
            }
            Ok(3.0 / (PI * PI * p.y * p.y))
        }
        MeasureTag::Rational => {
            let atom = RATIONAL_ATOMS.iter().any(|a| p.xi1 == a.0 && p.xi2 == a.1);
            if !atom {
                return Err(Error::OutsideFundamentalDomain);
            }
            Ok(1.0 / (PI * PI * p.y * p.y))
        }
    }
}

/// Write samples as CSV: header `x,y,phi,xi1,xi2,tag`, 17 significant
/// digits.
pub fn write_samples_csv<W: Write>(out: &mut W, samples: &[MeasureSample]) -> Result<()> {
    writeln!(out, "x,y,phi,xi1,xi2,tag")?;
    for s in samples {
        let tag = match s.tag {
            MeasureTag::Rational => "rational",
            MeasureTag::Irrational => "irrational",
        };
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            s.point.x, s.point.y, s.point.phi, s.point.xi1, s.point.xi2, tag
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_real;

    #[test]
    fn base_formulas_at_fixed_uniforms() {
        // (x0, y0) = (0.5, 0) -> (0, 1); (x0, y0) = (1, 0) -> (1/2, sqrt(3)/2).
        let x = (PI * 0.5 / 3.0 - PI / 6.0).sin();
        let y = (1.0 - x * x).sqrt() / 1.0;
        assert!(x.abs() < 1e-16 && (y - 1.0).abs() < 1e-15);
        let x = (PI * 1.0 / 3.0 - PI / 6.0).sin();
        assert!((x - 0.5).abs() < 1e-15);
        assert!(((1.0 - x * x).sqrt() - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn streams_are_reproducible_and_disjoint() {
        let a: Vec<f64> = {
            let mut r = RngStream::new(42, 3);
            (0..64).map(|_| r.uniform()).collect()
        };
        let b: Vec<f64> = {
            let mut r = RngStream::new(42, 3);
            (0..64).map(|_| r.uniform()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<f64> = {
            let mut r = RngStream::new(42, 4);
            (0..64).map(|_| r.uniform()).collect()
        };
        assert_ne!(a, c);
    }

    #[test]
    fn tail_mass_above_three() {
        // P(y > 3) = (3/pi) int int_3^infty y^-2 = 1/pi.
        let mut rng = RngStream::new(1, 0);
        let n = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let (_, y) = sample_base(&mut rng);
            if y > 3.0 {
                hits += 1;
            }
        }
        let frac = hits as f64 / n as f64;
        assert!((frac - 1.0 / PI).abs() < 0.002, "P(y>3) = {frac}");
    }

    #[test]
    fn atom_frequencies() {
        let mut rng = RngStream::new(2, 0);
        let n = 300_000;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let s = sample_mu0(&mut rng);
            let xi = (s.point.xi1, s.point.xi2);
            let idx = RATIONAL_ATOMS.iter().position(|a| *a == xi).expect("exact atom");
            counts[idx] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 1.0 / 3.0).abs() < 0.005);
        }
    }

    #[test]
    fn phi_marginal_uniform_ks() {
        // One-sample KS against the uniform CDF on [0, pi); 1% critical
        // value 1.63 / sqrt(n).
        let mut rng = RngStream::new(3, 0);
        let n = 300_000;
        let mut phis: Vec<f64> = (0..n).map(|_| sample_mu0(&mut rng).point.phi / PI).collect();
        phis.sort_by(f64::total_cmp);
        let mut ks = 0.0f64;
        for (i, p) in phis.iter().enumerate() {
            ks = ks.max((p - i as f64 / n as f64).abs());
            ks = ks.max((p - (i + 1) as f64 / n as f64).abs());
        }
        assert!(ks < 1.63 / (n as f64).sqrt(), "KS = {ks}");
    }

    #[test]
    fn xi_marginals_uniform_ks() {
        let mut rng = RngStream::new(4, 0);
        let n = 100_000;
        let mut xi1: Vec<f64> = Vec::with_capacity(n);
        let mut xi2: Vec<f64> = Vec::with_capacity(n);
        for _ in 0..n {
            let s = sample_mu(&mut rng);
            xi1.push(s.point.xi1 + 0.5);
            xi2.push(s.point.xi2 + 0.5);
        }
        for mut v in [xi1, xi2] {
            v.sort_by(f64::total_cmp);
            let mut ks = 0.0f64;
            for (i, p) in v.iter().enumerate() {
                ks = ks.max((p - i as f64 / n as f64).abs());
                ks = ks.max((p - (i + 1) as f64 / n as f64).abs());
            }
            assert!(ks < 1.63 / (n as f64).sqrt(), "KS = {ks}");
        }
    }

    #[test]
    fn x_marginal_chi_squared() {
        // Marginal density 3/(pi sqrt(1-x^2)): chi^2 over 50 equiprobable-ish
        // bins must pass at the 1% level (49 dof).
        let mut rng = RngStream::new(5, 0);
        let n = 1_000_000usize;
        let bins = 50;
        let mut counts = vec![0u64; bins];
        for _ in 0..n {
            let s = sample_mu0(&mut rng);
            let idx = (((s.point.x + 0.5) * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let cdf = |t: f64| 0.5 + 3.0 * t.asin() / PI;
        let mut stat = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            let lo = -0.5 + i as f64 / bins as f64;
            let hi = lo + 1.0 / bins as f64;
            let expected = n as f64 * (cdf(hi) - cdf(lo));
            stat += (c as f64 - expected).powi(2) / expected;
        }
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let critical = ChiSquared::new(49.0).unwrap().inverse_cdf(0.99);
        assert!(stat < critical, "chi^2 = {stat} vs critical {critical}");
    }

    #[test]
    fn inverse_y_moment_matches_quadrature() {
        // E[1/y] = (3/pi) int int y^-3 dy dx over the base domain.
        let (expect, _) = integrate_real(
            |x| {
                let y0 = (1.0 - x * x).sqrt();
                3.0 / PI * 0.5 / (y0 * y0)
            },
            -0.5,
            0.5,
            1e-10,
            10_000,
        )
        .unwrap();
        let mut rng = RngStream::new(6, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let s = sample_mu(&mut rng);
            let v = 1.0 / s.point.y;
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let se = ((sumsq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - expect).abs() < 3.0 * se, "mean {mean} vs {expect} (se {se})");
    }

    #[test]
    fn joint_base_shared_by_both_measures() {
        let mut a = RngStream::new(9, 1);
        let mut b = RngStream::new(9, 1);
        let s0 = sample_mu0(&mut a);
        let s1 = sample_mu(&mut b);
        assert_eq!((s0.point.x, s0.point.y), (s1.point.x, s1.point.y));
    }

    #[test]
    fn density_values_and_total_mass() {
        // ratio of densities at y = 1 vs y = 2 is 4
        let p1 = ThetaPoint::new(0.0, 1.0, 0.5, 0.1, 0.2);
        let p2 = ThetaPoint::new(0.0, 2.0, 0.5, 0.1, 0.2);
        let d1 = density(&p1, MeasureTag::Irrational).unwrap();
        let d2 = density(&p2, MeasureTag::Irrational).unwrap();
        assert!((d1 / d2 - 4.0).abs() < 1e-12);

        // total mass: (3/pi^2) int dx int_{sqrt(1-x^2)} y^-2 dy int_0^pi dphi = 1
        let (mass, _) = integrate_real(
            |x| 3.0 / (PI * PI) * PI / (1.0 - x * x).sqrt(),
            -0.5,
            0.5,
            1e-9,
            10_000,
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "mu mass {mass}");

        // mu^0: three atoms of (1/pi^2) each integrate to 1 as well
        let (mass0, _) = integrate_real(
            |x| 3.0 / (PI * PI) * PI / (1.0 - x * x).sqrt(),
            -0.5,
            0.5,
            1e-9,
            10_000,
        )
        .unwrap();
        assert!((mass0 - 1.0).abs() < 1e-6);

        assert!(matches!(
            density(&ThetaPoint::new(0.7, 1.0, 0.5, 0.0, 0.0), MeasureTag::Irrational),
            Err(Error::OutsideFundamentalDomain)
        ));
        assert!(matches!(
            density(&ThetaPoint::new(0.0, 1.0, 0.5, 0.3, 0.0), MeasureTag::Rational),
            Err(Error::OutsideFundamentalDomain)
        ));
    }

    #[test]
    fn samples_satisfy_domain_invariants() {
        let mut rng = RngStream::new(7, 0);
        for _ in 0..10_000 {
            let s = sample_mu0(&mut rng);
            assert!(in_base_domain(&s.point));
            assert!(RATIONAL_ATOMS.contains(&(s.point.xi1, s.point.xi2)));
            let s = sample_mu(&mut rng);
            assert!(in_base_domain(&s.point));
            assert!(s.point.xi1 > -0.5 && s.point.xi1 <= 0.5);
            assert!(s.point.xi2 > -0.5 && s.point.xi2 <= 0.5);
        }
    }

    #[test]
    fn csv_round_trip_format() {
        let mut rng = RngStream::new(8, 0);
        let samples: Vec<MeasureSample> = (0..3).map(|_| sample_mu0(&mut rng)).collect();
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &samples).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,phi,xi1,xi2,tag"));
        for (line, s) in lines.zip(&samples) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 6);
            assert_eq!(fields[0].parse::<f64>().unwrap(), s.point.x);
            assert_eq!(fields[1].parse::<f64>().unwrap(), s.point.y);
        }
    }
}
