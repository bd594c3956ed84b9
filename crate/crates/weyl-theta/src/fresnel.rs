//! Fresnel integrals `C`, `S` and the auxiliary pair `(f, g)`.
//!
//! Conventions follow Abramowitz & Stegun 7.3:
//!
//! ```text
//! C(x) = int_0^x cos(pi t^2 / 2) dt,      S(x) = int_0^x sin(pi t^2 / 2) dt,
//! C(x) = 1/2 + f(x) sin(pi x^2/2) - g(x) cos(pi x^2/2)   (x >= 0),
//! S(x) = 1/2 - f(x) cos(pi x^2/2) - g(x) sin(pi x^2/2).
//! ```
//!
//! Three regimes: Maclaurin series for |x| <= 2, Chebyshev fits of
//! pi*x*f and pi^2*x^3*g in the variable s = 1/x^2 on three windows for
//! 2 < |x| <= 9, and the alternating asymptotic series beyond. The
//! Chebyshev coefficients were generated offline against a 50-digit
//! reference; fit residuals are below 1.1e-18 on every window.
//!
//! The auxiliary pair is exposed because differences C(b)-C(a) with large
//! same-sign arguments cancel catastrophically in direct form; callers
//! recombine f, g with exactly reduced phases instead.

use num_complex::Complex64;
use std::f64::consts::PI;

const TWO_PI: f64 = 6.283185307179586;
const TWO_PI_LO: f64 = 2.449293598294706e-16;

/// Exact product: returns (hi, lo) with hi + lo == a * b.
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Exact sum: returns (hi, lo) with hi + lo == a + b.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Reduce a double-double angle to (-pi, pi] with ~1e-16 absolute error,
/// valid for |hi| up to ~2^52.
pub fn reduce_mod_2pi(hi: f64, lo: f64) -> f64 {
    let k = (hi / TWO_PI).round();
    let (p, pe) = two_prod(k, TWO_PI);
    let mut r = hi - p;
    r -= pe;
    r -= k * TWO_PI_LO;
    r += lo;
    r
}

/// e^{i (a w^2 + b w)} with the phase reduced in double-double arithmetic.
pub fn expi_quadratic_phase(a: f64, b: f64, w: f64) -> Complex64 {
    let (w2h, w2l) = two_prod(w, w);
    let (t1h, t1l) = two_prod(a, w2h);
    let (t2h, t2l) = two_prod(b, w);
    let (sh, se) = two_sum(t1h, t2h);
    let lo = t1l + a * w2l + t2l + se;
    let th = reduce_mod_2pi(sh, lo);
    Complex64::new(th.cos(), th.sin())
}

/// e^{i pi x^2 / 2} with exact argument reduction (phase of the Fresnel
/// auxiliary decomposition).
pub fn expi_half_pi_x2(x: f64) -> Complex64 {
    let (hi, lo) = two_prod(x, x);
    // pi x^2 / 2 mod 2 pi  <=>  frac(x^2 / 4) * 2 pi
    let q = hi * 0.25;
    let mut fr = q.fract() + lo * 0.25;
    fr -= fr.floor();
    let th = TWO_PI * fr;
    Complex64::new(th.cos(), th.sin())
}

// Chebyshev fits of F(s) = pi x f(x), G(s) = pi^2 x^3 g(x), s = 1/x^2.
// Window 1: x in [2, 3.25].
const F1: [f64; 17] = [
    0.99116764882856916629,
    -0.0067870779907076875905,
    -0.00056524316261386501757,
    0.00003363044271522972913,
    -5.6637129560156315645e-7,
    -9.4942781994212344652e-8,
    1.3147593733108688425e-8,
    -9.3610835219945369675e-10,
    1.9700508772443925066e-11,
    5.8604399026683434328e-12,
    -1.1623786603072896473e-12,
    1.3461106433109618787e-13,
    -1.0244471574835452477e-14,
    1.7584183165626325745e-16,
    1.1046704153568180179e-16,
    -2.5781149920677285224e-17,
    3.8407948257781537095e-18,
];
const G1: [f64; 19] = [
    0.95922623441581256265,
    -0.030013412842808162523,
    -0.0019437023153900423774,
    0.0002140808691886982003,
    -9.0525492684808488722e-6,
    -3.688667799369692063e-7,
    1.1381994746930516392e-7,
    -1.2530047093886094908e-8,
    7.6925359063161187202e-10,
    1.3026964023759130644e-11,
    -1.1735291607258871898e-11,
    2.0267174655736760713e-12,
    -2.3288481384550835611e-13,
    1.7449512480959078362e-14,
    -4.6107285107220703465e-17,
    -2.7793465422778022102e-16,
    6.3859831626202826468e-17,
    -9.9175336296795455405e-18,
    1.1873796603479446115e-18,
];
// Window 2: x in [3.25, 5.5].
const F2: [f64; 13] = [
    0.99864476470915101011,
    -0.0011585016820395720835,
    -0.00013258620291309197933,
    1.6555644162658303789e-6,
    6.7221092712263153319e-8,
    -3.7478722283223260273e-9,
    1.1872509237808824891e-11,
    8.4559706865035181041e-12,
    -4.9705314826873855383e-13,
    5.5880817000243665227e-16,
    2.1286404048786028317e-15,
    -1.7835115198257275101e-16,
    4.1654117276992118292e-18,
];
const G2: [f64; 15] = [
    0.99333228766855296819,
    -0.0056523092550777041341,
    -0.00062082596932232446672,
    0.000013744394413627409061,
    4.5036182951769309131e-7,
    -4.0431925282392897643e-8,
    6.2936989265985536713e-10,
    9.4056007768016244107e-11,
    -8.3390509442324845436e-12,
    1.797178465688622995e-13,
    2.8705353213481288123e-14,
    -3.662348359801099167e-15,
    1.7599007863729371353e-16,
    7.4062152296664632944e-18,
    -2.2302824405113240054e-18,
];
// Window 3: x in [5.5, 9].
const F3: [f64; 10] = [
    0.99982751205599031001,
    -0.00014232671726715276913,
    -0.000016117612077556504756,
    2.6446143606584042225e-8,
    1.4332164951293509782e-9,
    -9.9536268216623725363e-12,
    -3.1078409510586686138e-13,
    6.023800576308626377e-15,
    9.1475482706178323013e-17,
    -4.9197236732391305731e-18,
];
const G3: [f64; 10] = [
    0.99913940670800682456,
    -0.0007092664344823606948,
    -0.000079869895519858391141,
    2.3517623703098267371e-7,
    1.2455471378627255546e-8,
    -1.2566559992237954899e-10,
    -3.6679169597283010657e-12,
    9.6597214476891838674e-14,
    1.1674193787770108414e-15,
    -9.2961198967266735124e-17,
];

fn cheb_eval(coeffs: &[f64], lo: f64, hi: f64, s: f64) -> f64 {
    let t = (2.0 * s - lo - hi) / (hi - lo);
    let t2 = 2.0 * t;
    let mut b0 = 0.0;
    let mut b1 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let tmp = b0;
        b0 = t2 * b0 - b1 + c;
        b1 = tmp;
    }
    t * b0 - b1 + coeffs[0]
}

/// Auxiliary functions `(f, g)` for `x >= 2`.
pub fn fresnel_aux(x: f64) -> (f64, f64) {
    debug_assert!(x >= 2.0);
    if x <= 9.0 {
        let s = 1.0 / (x * x);
        let (fc, gc, lo, hi): (&[f64], &[f64], f64, f64) = if x <= 3.25 {
            (&F1, &G1, 1.0 / (3.25 * 3.25), 0.25)
        } else if x <= 5.5 {
            (&F2, &G2, 1.0 / (5.5 * 5.5), 1.0 / (3.25 * 3.25))
        } else {
            (&F3, &G3, 1.0 / 81.0, 1.0 / (5.5 * 5.5))
        };
        let f = cheb_eval(fc, lo, hi, s) / (PI * x);
        let g = cheb_eval(gc, lo, hi, s) / (PI * PI * x * x * x);
        (f, g)
    } else {
        // Alternating asymptotic series; first omitted term < 1e-16 rel.
        let u = 1.0 / (PI * x * x);
        let u2 = u * u;
        // (4k-1)!! and (4k+1)!! numerators
        let f_ser = 1.0 + u2 * (-3.0 + u2 * (105.0 + u2 * (-10395.0 + u2 * (2027025.0 - u2 * 654729075.0))));
        let g_ser = 1.0 + u2 * (-15.0 + u2 * (945.0 + u2 * (-135135.0 + u2 * (34459425.0 - u2 * 13749310575.0))));
        (f_ser / (PI * x), g_ser / (PI * PI * x * x * x))
    }
}

/// Maclaurin evaluation of (C, S) for |x| <= 2.
///
/// C(x) = x sum_k (-1)^k z^{2k} / ((2k)! (4k+1)) and
/// S(x) = x sum_k (-1)^k z^{2k+1} / ((2k+1)! (4k+3)) with z = pi x^2 / 2.
/// At x = 2 the largest term is ~13, so cancellation costs < 2 ulps.
fn fresnel_series(x: f64) -> (f64, f64) {
    let z = PI / 2.0 * x * x;
    let z2 = z * z;
    let mut c_sum = 0.0;
    let mut s_sum = 0.0;
    let mut pow = 1.0; // (-1)^k z^{2k} / (2k)!
    let mut k = 0usize;
    loop {
        let c_add = pow / (4 * k + 1) as f64;
        let s_add = pow * z / ((2 * k + 1) * (4 * k + 3)) as f64;
        c_sum += c_add;
        s_sum += s_add;
        if k > 2 && c_add.abs() < 1e-18 && s_add.abs() < 1e-18 {
            break;
        }
        pow *= -z2 / (((2 * k + 1) * (2 * k + 2)) as f64);
        k += 1;
        if k > 60 {
            break;
        }
    }
    (x * c_sum, x * s_sum)
}

/// Fresnel cosine integral.
pub fn fresnel_c(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= 2.0 {
        fresnel_series(ax).0
    } else {
        let (f, g) = fresnel_aux(ax);
        let e = expi_half_pi_x2(ax);
        0.5 + f * e.im - g * e.re
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Fresnel sine integral.
pub fn fresnel_s(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= 2.0 {
        fresnel_series(ax).1
    } else {
        let (f, g) = fresnel_aux(ax);
        let e = expi_half_pi_x2(ax);
        0.5 - f * e.re - g * e.im
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// E(x) = C(x) + i S(x) = int_0^x e^{i pi t^2/2} dt.
pub fn fresnel_e(x: f64) -> Complex64 {
    let ax = x.abs();
    let v = if ax <= 2.0 {
        let (c, s) = fresnel_series(ax);
        Complex64::new(c, s)
    } else {
        let (f, g) = fresnel_aux(ax);
        let e = expi_half_pi_x2(ax);
        // (1+i)/2 - (g + i f) e^{i pi x^2/2}
        Complex64::new(0.5, 0.5) - Complex64::new(g, f) * e
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// E(b) - E(a), stable against cancellation of the 1/2 + i/2 plateaus when
/// both arguments are large with the same sign.
pub fn fresnel_e_diff(a: f64, b: f64) -> Complex64 {
    if a.abs() >= 2.0 && b.abs() >= 2.0 && a.signum() == b.signum() {
        let s = a.signum();
        let (aa, ab) = (a.abs(), b.abs());
        let (fa, ga) = fresnel_aux(aa);
        let (fb, gb) = fresnel_aux(ab);
        let ea = expi_half_pi_x2(aa);
        let eb = expi_half_pi_x2(ab);
        // E(b)-E(a) = (g_a + i f_a) e^{i th_a} - (g_b + i f_b) e^{i th_b}
        let d = Complex64::new(ga, fa) * ea - Complex64::new(gb, fb) * eb;
        if s < 0.0 {
            -d
        } else {
            d
        }
    } else {
        fresnel_e(b) - fresnel_e(a)
    }
}
