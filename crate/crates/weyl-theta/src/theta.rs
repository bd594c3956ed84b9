//! Jacobi theta series on the group coordinates (x + iy, phi; xi).
//!
//! ```text
//! Theta_f(x+iy, phi; xi) = y^{1/4} e(-xi1 xi2 / 2)
//!     sum_n f_phi((n - xi2) sqrt(y)) e( (n - xi2)^2 x / 2 + n xi1 )
//! ```
//!
//! The Heisenberg height is fixed to zero throughout: the product
//! Theta_{f1} conj(Theta_{f2}) does not depend on it. A single theta value
//! carries an untracked metaplectic phase under the inversion generator, so
//! only products and moduli are asserted invariant; `phi` is consumed as a
//! real number (the transform is 4 pi periodic) which lets geodesic-orbit
//! identities track the angle continuously instead of mod 2 pi.

use crate::error::{Error, Result};
use crate::fresnel::expi_quadratic_phase;
use crate::group::{compose, iwasawa, GroupElement};
use crate::oscillator::kappa_upper_bound;
use crate::weyl::{weighted_weyl_sum, WeylParams};
use crate::windows::{DyadicPart, Window, WindowKind};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Evaluation point: Iwasawa coordinates plus the torus variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPoint {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    pub xi1: f64,
    pub xi2: f64,
}

impl ThetaPoint {
    pub fn new(x: f64, y: f64, phi: f64, xi1: f64, xi2: f64) -> Self {
        ThetaPoint { x, y, phi, xi1, xi2 }
    }

    /// Read the point off a group element (phi from the principal Iwasawa
    /// chart).
    pub fn from_group(g: &GroupElement) -> Result<Self> {
        let iw = iwasawa(g)?;
        Ok(ThetaPoint { x: iw.x, y: iw.y, phi: iw.phi, xi1: g.xi1, xi2: g.xi2 })
    }

    /// Right-translate by the geodesic flow, tracking phi continuously.
    ///
    /// Right multiplication by a positive diagonal matrix rescales the
    /// bottom row of the linear part without changing its quadrant, so the
    /// principal atan2 difference is the continuous angle increment.
    pub fn geodesic_translate(&self, t: f64) -> ThetaPoint {
        let m = crate::group::from_iwasawa(&crate::group::IwasawaCoords {
            x: self.x,
            y: self.y,
            phi: self.phi.rem_euclid(2.0 * PI),
        });
        let flowed = compose(&m, &crate::group::special::geodesic(t));
        let before = m.m21.atan2(m.m22);
        let after = flowed.m21.atan2(flowed.m22);
        let iw = iwasawa(&flowed).expect("geodesic flow preserves the determinant");
        ThetaPoint {
            x: iw.x,
            y: iw.y,
            phi: self.phi + (after - before),
            xi1: self.xi1,
            xi2: self.xi2,
        }
    }
}

/// Summation control for the theta series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Keep terms with |n - xi2| sqrt(y) <= w_cut.
    pub w_cut: f64,
    /// Hard cap |n| <= n_cap.
    pub n_cap: Option<i64>,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { w_cut: 64.0, n_cap: Some(200) }
    }
}

impl TruncationPolicy {
    /// The figure-reproduction policy: |n| <= 100, no w cut.
    pub fn paper_repro() -> Self {
        TruncationPolicy { w_cut: f64::INFINITY, n_cap: Some(100) }
    }

    /// Explicit window for identities that need every support term.
    pub fn unbounded(n_cap: i64) -> Self {
        TruncationPolicy { w_cut: f64::INFINITY, n_cap: Some(n_cap) }
    }

    fn range(&self, xi2: f64, y: f64) -> (i64, i64) {
        let half = self.w_cut / y.sqrt();
        let mut lo = if half.is_finite() { (xi2 - half).ceil() as i64 } else { i64::MIN / 2 };
        let mut hi = if half.is_finite() { (xi2 + half).floor() as i64 } else { i64::MAX / 2 };
        if let Some(cap) = self.n_cap {
            lo = lo.max(-cap);
            hi = hi.min(cap);
        }
        let main = xi2.round() as i64;
        (lo.min(main), hi.max(main))
    }
}

/// A theta value with the summation range it used and a bound on the
/// truncated absolute tail (conservative for jump windows, where the paper
/// sums conditionally).
#[derive(Debug, Clone, Copy)]
pub struct ThetaValue {
    pub value: Complex64,
    pub n_range: (i64, i64),
    pub tail_estimate: f64,
}

/// Bound the omitted |f_phi(v)| sum beyond the truncation radius.
fn tail_bound(f: &Window, y: f64, v_edge: f64) -> f64 {
    let sqrt_y = y.sqrt();
    match f.kind() {
        WindowKind::Gaussian { amp, width } | WindowKind::Hermite1 { amp, width } => {
            // |f_phi| decays like a Gaussian of width >= min(width, 1/width).
            let weff = width.min(1.0 / width).min(1.0);
            let v = v_edge.max(1.0);
            let head = amp.abs() * (1.0 + v) * (-PI * weff * v * v).exp();
            let ratio = (-2.0 * PI * weff * v * sqrt_y).exp();
            2.0 * head / (1.0 - ratio).max(1e-6)
        }
        _ => {
            let norms = f.norms();
            let (slo, shi) = f.support();
            let smax = slo.abs().max(shi.abs());
            if f.is_piecewise_c(1) {
                // kappa_2 certificate: |f_phi(v)| <= k2 / (1 + v^2)
                let k2 = kappa_upper_bound(f, 2.0).unwrap_or(f64::INFINITY);
                if v_edge > sqrt_y {
                    k2 * 2.0 / (sqrt_y * (v_edge - sqrt_y))
                } else {
                    f64::INFINITY
                }
            } else {
                // van der Corput first-derivative envelope over the next
                // octave: |f_phi(v)| <= (||f||_inf + V(f)) / (pi (|v|-smax)).
                let c = (norms.linf + norms.tv) / PI;
                if v_edge > smax + sqrt_y {
                    // sum over v in (v_edge, 2 v_edge], spacing sqrt(y)
                    let n_next = (v_edge / sqrt_y).ceil();
                    2.0 * c * ((2.0 * v_edge - smax) / (v_edge - smax)).ln().max(0.0)
                        / sqrt_y.min(1.0)
                        / n_next.max(1.0)
                        * n_next
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// Evaluate the theta series under a truncation policy.
pub fn theta(f: &Window, p: &ThetaPoint, trunc: &TruncationPolicy) -> Result<ThetaValue> {
    if p.y <= 0.0 {
        return Err(Error::ParameterOutOfRange(format!("theta needs y > 0, got {}", p.y)));
    }
    if p.y < 1e-6 {
        return Err(Error::SlowConvergence { y: p.y });
    }
    let (lo, hi) = trunc.range(p.xi2, p.y);
    let sqrt_y = p.y.sqrt();

    // e( (n - xi2)^2 x / 2 + n xi1 ) as a quadratic phase in n:
    // pi x n^2 + (2 pi xi1 - 2 pi x xi2) n + pi x xi2^2.
    let a_phase = PI * p.x;
    let b_phase = 2.0 * PI * (p.xi1 - p.x * p.xi2);
    let c_phase = expi_quadratic_phase(PI * p.x, 0.0, p.xi2);

    let plan = crate::oscillator::TransformPlan::new(f, p.phi);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in lo..=hi {
        let v = (n as f64 - p.xi2) * sqrt_y;
        let t = plan.eval(v);
        if t.value.norm_sqr() == 0.0 {
            continue;
        }
        let phase = expi_quadratic_phase(a_phase, b_phase, n as f64) * c_phase;
        sum += t.value * phase;
    }

    let prefactor = p.y.powf(0.25)
        * expi_quadratic_phase(0.0, -PI * p.xi1, p.xi2);
    let v_edge = ((hi as f64 - p.xi2).abs().min((lo as f64 - p.xi2).abs()) + 1.0) * sqrt_y;
    let tail = p.y.powf(0.25) * tail_bound(f, p.y, v_edge);
    Ok(ThetaValue { value: prefactor * sum, n_range: (lo, hi), tail_estimate: tail })
}

/// The product statistic Theta_{f1} conj(Theta_{f2}); the Heisenberg phase
/// and the metaplectic phase both cancel.
pub fn theta_product(
    f1: &Window,
    f2: &Window,
    p: &ThetaPoint,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    let t1 = theta(f1, p, trunc)?;
    if f1 == f2 {
        return Ok(t1.value * t1.value.conj());
    }
    let t2 = theta(f2, p, trunc)?;
    Ok(t1.value * t2.value.conj())
}

/// |N^{-1/2} S_N(x; c, alpha; f) - Theta_f(x + i N^{-2}, 0; (alpha + c x, 0))|.
///
/// Both sides are finite sums over the support of f; phi = 0 needs no
/// transform, so the identity is exact up to rounding.
pub fn weyl_identity_check(f: &Window, n_terms: u64, x: f64, c: f64, alpha: f64) -> f64 {
    let params =
        WeylParams { n_terms, x, c, alpha, weight: Some(f.clone()) };
    let lhs = weighted_weyl_sum(&params) / (n_terms as f64).sqrt();

    let y = 1.0 / (n_terms as f64 * n_terms as f64);
    let point = ThetaPoint::new(x, y, 0.0, alpha + c * x, 0.0);
    let (_, shi) = f.support();
    let cap = (n_terms as f64 * shi.abs().max(1.0)).ceil() as i64 + 2;
    let rhs = theta(f, &point, &TruncationPolicy::unbounded(cap))
        .expect("identity points have y >= N^-2 >= 1e-6");
    (lhs - rhs.value).norm()
}

/// Discrepancies of the dyadic block decomposition at a point.
#[derive(Debug, Clone, Copy)]
pub struct DyadicCheck {
    /// |Theta_{chi_s^J} - Theta_{chi_{s,L}^J} - Theta_{chi_{s,R}^J}|.
    pub linearity: f64,
    /// |Theta_{chi_{s,L}^J} - sqrt(s) sum_j 2^{-j/2} Theta_Delta(p Phi^{t_j})|
    /// with t_j = 2 log(s / 2^j).
    pub geodesic_orbit: f64,
}

/// Check the decomposition Theta_{chi_s^(J)} = L + R and the geodesic-orbit
/// form of the left half.
pub fn dyadic_decomposition_check(s: f64, j_steps: u32, p: &ThetaPoint) -> Result<DyadicCheck> {
    // The geodesic-orbit comparison sums different truncation sets on each
    // side, so the shared cut has to sit deep in the transform tails.
    let trunc = TruncationPolicy { w_cut: 16384.0, n_cap: None };
    let full = Window::dyadic_truncation(s, j_steps, DyadicPart::Full)?;
    let left = Window::dyadic_truncation(s, j_steps, DyadicPart::Left)?;
    let right = Window::dyadic_truncation(s, j_steps, DyadicPart::Right)?;
    let t_full = theta(&full, p, &trunc)?.value;
    let t_left = theta(&left, p, &trunc)?.value;
    let t_right = theta(&right, p, &trunc)?.value;
    let linearity = (t_full - t_left - t_right).norm();

    let delta = Window::delta_bump();
    let mut orbit = Complex64::new(0.0, 0.0);
    for j in 0..j_steps {
        let t_j = 2.0 * (s / 2f64.powi(j as i32)).ln();
        let q = p.geodesic_translate(t_j);
        let w_j = 2f64.powf(-(j as f64) / 2.0);
        orbit += w_j * theta(&delta, &q, &trunc)?.value;
    }
    orbit *= s.sqrt();
    let geodesic_orbit = (t_left - orbit).norm();
    Ok(DyadicCheck { linearity, geodesic_orbit })
}
