//! Explicit constants of the tail laws.
//!
//! The rational leading constant has the closed form
//!
//! ```text
//! D_rat(b) = 2 log 2                                       (b = 1)
//!          = 2b acoth(b) + log(b^2-1)/2 + (b^2/2) log(1 - 1/b^2)   (b > 1)
//! ```
//!
//! checked here against its defining quadrature
//! int_0^pi |chi_phi(0) (chi_b)_phi(0)|^2 dphi. The irrational constant
//! D_irr(b) only exists as a 2-D quadrature. The remaining constants
//! (C_eta, K, K_L, R_0, P, R(b, eps), the eta(eps) maps, zeta bounds) are
//! literal formulas.

use crate::error::{Error, Result};
use crate::oscillator::TransformPlan;
use crate::quad;
use crate::windows::Window;
use std::f64::consts::PI;

/// D_rat(chi, chi_b) in closed form for b >= 1.
///
/// acoth near 1 is evaluated as log((b+1)/(b-1))/2 with a branch at
/// b <= 1 + 1e-12 where the exact limit 2 log 2 takes over.
pub fn d_rat(b: f64) -> f64 {
    assert!(b >= 1.0, "d_rat needs b >= 1");
    if b <= 1.0 + 1e-12 {
        return 2.0 * std::f64::consts::LN_2;
    }
    let acoth = 0.5 * ((b + 1.0) / (b - 1.0)).ln();
    2.0 * b * acoth + 0.5 * (b * b - 1.0).ln() + 0.5 * b * b * (1.0 - 1.0 / (b * b)).ln()
}

/// D_rat(chi, chi_c) for 0 < c <= 1 (the reflected closed form): the
/// scaling identity reads d_rat(b) = b^2 d_rat_small(1/b).
pub fn d_rat_small(c: f64) -> f64 {
    assert!(c > 0.0 && c <= 1.0);
    if c >= 1.0 - 1e-12 {
        return 2.0 * std::f64::consts::LN_2;
    }
    2.0 * c * c.atanh() - c * c * c.ln() + 0.5 * (1.0 + c * c) * (1.0 - c * c).ln()
}

/// Defining quadrature of D_rat: int_0^pi |chi_phi(0)|^2 |(chi_b)_phi(0)|^2 dphi.
///
/// Substituting x = cot(phi) turns the integrand into
/// |I_1(x)|^2 |I_b(x)|^2 with I_s(x) = int_0^s e^{i pi x v^2} dv and
/// cancels the Jacobian against the 1/sin^2 of the transforms, leaving a
/// plain integral over the real line whose tail is 1/(64 x) + O(x^{-3/2}).
pub fn d_rat_quadrature(b: f64) -> Result<f64> {
    d_rat_pair_quadrature(&Window::indicator(1.0), &Window::indicator(b), 1e-9)
}

/// int_0^pi |(f1)_phi(0) (f2)_phi(0)|^2 dphi for general windows.
pub fn d_rat_pair_quadrature(f1: &Window, f2: &Window, tol: f64) -> Result<f64> {
    // x = cot(phi): |f_phi(0)|^2 carries a 1/sin(phi) prefactor each, and
    // sin^2(phi) = 1/(1+x^2) cancels the Jacobian dphi = -dx/(1+x^2),
    // leaving |I_1(x)|^2 |I_2(x)|^2 dx over the line (even in x).
    let both_indicators = matches!(
        (f1.kind(), f2.kind()),
        (crate::windows::WindowKind::Indicator { .. }, crate::windows::WindowKind::Indicator { .. })
    );
    let (s1, s2_len) = (indicator_len(f1), indicator_len(f2));
    let integrand = |x: f64| {
        let v = if both_indicators {
            // |int_0^s e^{i pi x v^2} dv|^2 = |E(sqrt(2x) s)|^2 / (2x)
            let r = (2.0 * x).sqrt();
            let e1 = crate::fresnel::fresnel_e(r * s1).norm_sqr();
            let e2 = crate::fresnel::fresnel_e(r * s2_len).norm_sqr();
            e1 * e2 / (4.0 * x * x)
        } else {
            let phi = (1.0 / x).atan().rem_euclid(PI);
            let sin2 = 1.0 / (1.0 + x * x);
            let a = TransformPlan::new(f1, phi).eval(0.0).value.norm_sqr();
            let b = TransformPlan::new(f2, phi).eval(0.0).value.norm_sqr();
            a * b * sin2
        };
        num_complex::Complex64::new(v, 0.0)
    };
    let (slo, shi) = f2.support();
    let smax = shi.abs().max(slo.abs()).max(1.0);
    let x0 = 2.0e4 * smax;
    let mut points = vec![0.0];
    let mut x = 0.25 / (smax * smax);
    while x < x0 {
        points.push(x);
        x *= 1.12;
    }
    points.push(x0);
    let r = quad::integrate_panels(&integrand, &points, tol / 4.0, 4_000_000)?;
    let mut total = 2.0 * r.value.re;

    // Tail: |I_s(x)|^2 -> (C^2+S^2)(2 sqrt(x) s)/(4x) with C^2+S^2 -> 1/2,
    // so the product integrand -> 1/(16 x^2) * 1/4 and the tail from X0 is
    // 2 * 1/(64 X0) for the indicator pair, plus oscillatory corrections
    // O(X0^{-3/2}) that stay below tol/4 for the X0 above.
    if both_indicators {
        // |E|^2 -> 1/2 for each factor: tail 2 int_x0 (1/4)/(4 x^2) dx
        total += 1.0 / (8.0 * x0);
    }
    Ok(total)
}

fn indicator_len(f: &Window) -> f64 {
    match f.kind() {
        crate::windows::WindowKind::Indicator { s } => *s,
        _ => 0.0,
    }
}

/// D_irr(f1, f2) = int_0^pi int_R |(f1)_phi(w) (f2)_phi(w)|^3 dw dphi by
/// iterated quadrature.
///
/// The integrand in phi carries quasi-periodic ripples of period ~1 in
/// cot(phi) and amplitude ~1e-3 riding on a smooth profile, so the outer
/// integral uses dense fixed Gauss panels (ripple aliasing averages out
/// like 1/sqrt(N)) over [phi_c, pi/2], a fitted power-law endpoint model
/// on (0, phi_c] where the transforms collapse onto the windows
/// themselves, and the phi <-> pi - phi symmetry for the other half.
pub fn d_irr_pair_quadrature(f1: &Window, f2: &Window, tol: f64) -> Result<f64> {
    let (lo1, hi1) = f1.support();
    let (lo2, hi2) = f2.support();
    let smax = hi1.abs().max(lo1.abs()).max(hi2.abs()).max(lo2.abs());
    // van der Corput envelope: both factors fall below
    // sqrt(sin phi)/(pi (|w| - s)) past the supports, so the tail beyond
    // w_max contributes < (8/3)/(5 pi^6 (w_max - smax)^5).
    let w_max = smax + 8.0;

    let inner = |phi: f64| -> Result<f64> {
        let p1 = TransformPlan::new(f1, phi);
        let same = f1 == f2;
        let p2 = if same { None } else { Some(TransformPlan::new(f2, phi)) };
        let f = |w: f64| {
            let a = p1.eval(w).value.norm();
            let b = match &p2 {
                Some(p) => p.eval(w).value.norm(),
                None => a,
            };
            num_complex::Complex64::new((a * b).powi(3), 0.0)
        };
        // panel scale follows the ripple wavelength ~ sin(phi)
        let step = (phi.sin().abs() * 0.45).clamp(5e-5, 0.22);
        let n = (2.0 * w_max / step).ceil() as usize;
        let pts: Vec<f64> = (0..=n).map(|i| -w_max + 2.0 * w_max * i as f64 / n as f64).collect();
        Ok(quad::integrate_panels(f, &pts, tol / 50.0, 2_000_000)?.value.re)
    };

    const GL4: [(f64, f64); 4] = [
        (-0.8611363115940526, 0.34785484513745385),
        (-0.3399810435848563, 0.6521451548625461),
        (0.3399810435848563, 0.6521451548625461),
        (0.8611363115940526, 0.34785484513745385),
    ];
    let phi_c = 0.02;
    let panels = 1400usize;
    let width = (PI / 2.0 - phi_c) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let a = phi_c + i as f64 * width;
        let mid = a + 0.5 * width;
        for &(t, wgt) in GL4.iter() {
            total += wgt * 0.5 * width * inner(mid + 0.5 * width * t)?;
        }
    }

    // Endpoint (0, phi_c]: inner(phi) = limit + a phi^p with the exact
    // phi -> 0 limit int |f1 f2|^3 dw; fit (a, p) from resolved samples.
    let limit: f64 = {
        let f = |w: f64| {
            let v = (f1.eval(w) * f2.eval(w)).abs().powi(3);
            num_complex::Complex64::new(v, 0.0)
        };
        // panels split at the support edges so the initial rule cannot
        // straddle the windows with every node on zero
        let mut pts = vec![-w_max, lo1, hi1, lo2, hi2, 0.5 * (lo1 + hi1), w_max];
        pts.retain(|p| p.abs() <= w_max);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        quad::integrate_panels(f, &pts, 1e-12, 100_000)?.value.re
    };
    let s1 = inner(phi_c / 4.0)? - limit;
    let s2 = inner(phi_c / 2.0)? - limit;
    let s3 = inner(phi_c)? - limit;
    let p_fit = 0.5 * ((s2 / s1).ln() + (s3 / s2).ln()) / std::f64::consts::LN_2;
    let p_fit = p_fit.clamp(0.1, 1.5);
    let a_fit = s3 / phi_c.powf(p_fit);
    total += limit * phi_c + a_fit * phi_c.powf(1.0 + p_fit) / (1.0 + p_fit);

    Ok(2.0 * total)
}

/// D_irr(chi, chi_b); the b = 1 value is 3.
pub fn d_irr(b: f64) -> Result<f64> {
    d_irr_pair_quadrature(&Window::indicator(1.0), &Window::indicator(b), 1e-4)
}

/// Alternating zeta (Dirichlet eta) by the Cohen-Rodriguez Villegas-Zagier
/// acceleration: geometric convergence, well conditioned at eta -> 1+.
pub fn zeta_alternating(eta: f64) -> f64 {
    // d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), accumulated through
    // the term ratio; error ~ (3 + sqrt(8))^{-n}.
    let n = 48usize;
    let nf = n as f64;
    let mut dk = vec![0.0f64; n + 1];
    let mut term = 1.0; // n * t_0
    dk[0] = 1.0;
    for k in 1..=n {
        let kf = k as f64;
        term *= (nf + kf - 1.0) * (nf - kf + 1.0) * 4.0 / ((2.0 * kf - 1.0) * (2.0 * kf));
        dk[k] = dk[k - 1] + term;
    }
    let dn = dk[n];
    let mut sum = 0.0;
    let mut sign = 1.0;
    for (k, d) in dk.iter().copied().enumerate().take(n) {
        sum += sign * (d - dn) / ((k as f64 + 1.0).powf(eta));
        sign = -sign;
    }
    -sum / dn
}

/// Bundle from the zeta appendix: the value, the alternating series, the
/// Laurent-type lower/upper bounds, and the c(eta0) constant.
#[derive(Debug, Clone, Copy)]
pub struct ZetaSuite {
    pub zeta: f64,
    pub zeta_alt: f64,
    pub lower: f64,
    pub upper: f64,
    pub c_of_eta0: f64,
}

/// zeta(eta) and its appendix bounds for eta > 1.
pub fn zeta_suite(eta: f64) -> ZetaSuite {
    assert!(eta > 1.0, "zeta bounds need eta > 1");
    let za = zeta_alternating(eta);
    // 1 - 2^{1-eta} without cancellation near eta = 1
    let denom = -((1.0 - eta) * std::f64::consts::LN_2).exp_m1();
    let zeta = za / denom;
    let ln2 = std::f64::consts::LN_2;
    let lower = za * (1.0 / (ln2 * (eta - 1.0)) + 0.5);
    let upper = za * (1.0 / (ln2 * (eta - 1.0)) + 0.5 + ln2 / 12.0 * (eta - 1.0));
    let c = za * (1.0 / ln2 + 0.5 * (eta - 1.0) + ln2 / 12.0 * (eta - 1.0) * (eta - 1.0));
    ZetaSuite { zeta, zeta_alt: za, lower, upper, c_of_eta0: c }
}

/// C_eta = 2^{6 eta} zeta(eta)^2.
pub fn c_eta(eta: f64) -> f64 {
    let z = zeta_suite(eta).zeta;
    2f64.powf(6.0 * eta) * z * z
}

/// K(s) = 48 + 2s + max{9 s^2, (2/3) s^3}.
pub fn big_k(s: f64) -> f64 {
    48.0 + 2.0 * s + (9.0 * s * s).max(2.0 / 3.0 * s * s * s)
}

/// K_L(s) = 36 + (5/4) s + max{(293/96) s^2, (19/216) s^3}.
pub fn big_k_left(s: f64) -> f64 {
    36.0 + 1.25 * s + (293.0 / 96.0 * s * s).max(19.0 / 216.0 * s * s * s)
}

/// sp norms of the indicator family: ||chi_s||_sp and ||chi_{s,L}||_sp.
pub fn sp_chi(s: f64) -> f64 {
    (2.0 * s).max(9.0)
}
pub fn sp_chi_left(s: f64) -> f64 {
    s.max(9.0)
}

/// eta(eps) for the rational error exponent 2 eta/(6 eta(eta-1)+1) = 2 - eps.
pub fn eta_of_eps_rational(eps: f64) -> f64 {
    (7.0 - 3.0 * eps + (3.0 * eps * eps - 18.0 * eps + 25.0).sqrt()) / (6.0 * (2.0 - eps))
}

/// eta(eps) for the irrational exponent 6 eta/(16 eta(eta-1)+3) = 2 - eps.
pub fn eta_of_eps_irrational(eps: f64) -> f64 {
    (19.0 - 8.0 * eps + (16.0 * eps * eps - 112.0 * eps + 169.0).sqrt()) / (16.0 * (2.0 - eps))
}

/// All named constants at one (b, eta, eps).
#[derive(Debug, Clone, Copy)]
pub struct ExplicitConstants {
    pub b: f64,
    pub eta: f64,
    pub eps: f64,
    pub c_eta: f64,
    pub k_b: f64,
    pub k_left_b: f64,
    pub sp_chi_b: f64,
    pub sp_chi_left_b: f64,
    pub r0_rat: f64,
    pub p_rat: f64,
    pub r_rat_eps: f64,
    pub implied_rat_eps: f64,
    pub r0_irr: f64,
    /// First branch of P^irr; the full value divides by D_irr(chi, chi_b),
    /// for which the paper only conjectures a lower bound.
    pub p_irr: f64,
    pub p_irr_conjectural: bool,
    pub r_irr_eps: f64,
    pub implied_irr_eps: f64,
    pub eta_of_eps_rat: f64,
    pub eta_of_eps_irr: f64,
    /// b = 1 corollary forms.
    pub r_rat_eps_b1: f64,
    pub implied_rat_eps_b1: f64,
    pub r_irr_eps_b1: f64,
    pub implied_irr_eps_b1: f64,
}

/// Evaluate every explicit constant; `d_irr_value` feeds the conjectural
/// P^irr branch when a quadrature value is available.
pub fn explicit_constants(
    b: f64,
    eta: f64,
    eps: f64,
    d_irr_value: Option<f64>,
) -> Result<ExplicitConstants> {
    if b < 1.0 {
        return Err(Error::ParameterOutOfRange(format!("b >= 1 required, got {b}")));
    }
    if !(1.0 < eta && eta <= 2.0) {
        return Err(Error::ParameterOutOfRange(format!("eta in (1, 2] required, got {eta}")));
    }
    if !(0.0 < eps && eps <= 1.0) {
        return Err(Error::ParameterOutOfRange(format!("eps in (0, 1] required, got {eps}")));
    }
    let ce = c_eta(eta);
    let kb = big_k(b);
    let kb4 = kb.powi(4);
    let r0_rat = (32.0 * kb * kb * ce).powf(1.0 / eta + 6.0 * (eta - 1.0));
    let p_rat = 2f64.powi(12) * kb4 * ce * ce;
    let r0_irr = (2f64.powf(5.5) * kb * kb * ce).powf(1.0 / eta + 16.0 / 3.0 * (eta - 1.0));
    let first = 2f64.powi(13) * kb4 * ce * ce;
    let (p_irr, p_irr_conjectural) = match d_irr_value {
        Some(d) => (first.max(PI * PI * 2f64.powi(24) * sp_chi_left(b).powi(5) / d), false),
        // conjectured D_irr >= 3 gives an upper bound for the second branch
        None => (first.max(PI * PI * 2f64.powi(24) * sp_chi_left(b).powi(5) / 3.0), true),
    };
    let implied_irr = match d_irr_value {
        Some(d) => (2f64.powi(41) * kb4 / eps.powi(4))
            .max(2f64.powi(28) * (b.powi(5)).max(3f64.powi(10)) / d),
        None => (2f64.powi(41) * kb4 / eps.powi(4))
            .max(2f64.powi(28) * (b.powi(5)).max(3f64.powi(10)) / 3.0),
    };
    Ok(ExplicitConstants {
        b,
        eta,
        eps,
        c_eta: ce,
        k_b: kb,
        k_left_b: big_k_left(b),
        sp_chi_b: sp_chi(b),
        sp_chi_left_b: sp_chi_left(b),
        r0_rat,
        p_rat,
        r_rat_eps: 2f64.powi(38) * kb4 / (eps * eps),
        implied_rat_eps: 2f64.powi(42) * kb4 / eps.powi(4),
        r0_irr,
        p_irr,
        p_irr_conjectural,
        r_irr_eps: 2f64.powi(39) * kb4 / (eps * eps),
        implied_irr_eps: implied_irr,
        eta_of_eps_rat: eta_of_eps_rational(eps),
        eta_of_eps_irr: eta_of_eps_irrational(eps),
        r_rat_eps_b1: 2f64.powi(62) / (eps * eps),
        implied_rat_eps_b1: 2f64.powi(66) / eps.powi(4),
        r_irr_eps_b1: 2f64.powi(63) / (eps * eps),
        implied_irr_eps_b1: 2f64.powi(65) / eps.powi(4),
    })
}

/// Which of the two tail laws, and in which parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailCase {
    Rational,
    Irrational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorForm {
    Eta,
    Eps,
}

/// A fully pinned tail law P(|product| > R^2) ~ leading R^{-exponent}.
#[derive(Debug, Clone, Copy)]
pub struct TailLaw {
    pub exponent: f64,
    pub leading_coefficient: f64,
    pub error_exponent: f64,
    pub implied_constant: f64,
    pub validity_threshold: f64,
}

/// Assemble the tail law for the (chi, chi_b) pair.
pub fn tail_law(case: TailCase, b: f64, form: ErrorForm, param: f64) -> Result<TailLaw> {
    if b < 1.0 {
        return Err(Error::ParameterOutOfRange(format!("b >= 1 required, got {b}")));
    }
    let (eta, eps) = match form {
        ErrorForm::Eta => {
            if !(1.0 < param && param <= 2.0) {
                return Err(Error::ParameterOutOfRange(format!("eta in (1, 2], got {param}")));
            }
            (param, 0.5)
        }
        ErrorForm::Eps => {
            if !(0.0 < param && param <= 1.0) {
                return Err(Error::ParameterOutOfRange(format!("eps in (0, 1], got {param}")));
            }
            let eta = match case {
                TailCase::Rational => eta_of_eps_rational(param),
                TailCase::Irrational => eta_of_eps_irrational(param),
            };
            (eta, param)
        }
    };
    let consts = explicit_constants(b, eta, eps, None)?;
    match case {
        TailCase::Rational => Ok(TailLaw {
            exponent: 4.0,
            leading_coefficient: 2.0 * d_rat(b) / (PI * PI),
            error_exponent: match form {
                ErrorForm::Eta => 2.0 * eta / (6.0 * eta * (eta - 1.0) + 1.0),
                ErrorForm::Eps => 2.0 - eps,
            },
            implied_constant: match form {
                ErrorForm::Eta => consts.p_rat,
                ErrorForm::Eps => consts.implied_rat_eps,
            },
            validity_threshold: match form {
                ErrorForm::Eta => consts.r0_rat,
                ErrorForm::Eps => consts.r_rat_eps,
            },
        }),
        TailCase::Irrational => {
            // D_irr(1) = 3 is a paper value; other b go through quadrature.
            let d = if (b - 1.0).abs() < 1e-12 { 3.0 } else { d_irr(b)? };
            Ok(TailLaw {
                exponent: 6.0,
                leading_coefficient: 2.0 * d / (PI * PI),
                error_exponent: match form {
                    ErrorForm::Eta => 6.0 * eta / (16.0 * eta * (eta - 1.0) + 3.0),
                    ErrorForm::Eps => 2.0 - eps,
                },
                implied_constant: match form {
                    ErrorForm::Eta => consts.p_irr,
                    ErrorForm::Eps => consts.implied_irr_eps,
                },
                validity_threshold: match form {
                    ErrorForm::Eta => consts.r0_irr,
                    ErrorForm::Eps => consts.r_irr_eps,
                },
            })
        }
    }
}
