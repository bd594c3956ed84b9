//! The affine special linear group G = ASL(2,R) = SL(2,R) x R^2.
//!
//! Elements are pairs (M; xi) with unimodular M and translation xi, composed
//! by (M; xi)(M'; xi') = (MM'; xi + M xi'). The module provides the Iwasawa
//! chart (x, y, phi), the geodesic and horocycle flows, the four lattice
//! generators, and reduction to the fundamental domain
//!
//! ```text
//! F = F_SL(2,Z) x [0, pi) x (-1/2, 1/2]^2 .
//! ```

use crate::error::{Error, Result};

const DET_TOL: f64 = 1e-6;
const MAX_REDUCTION_STEPS: usize = 10_000;

/// An element (M; xi) of ASL(2,R).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    pub xi1: f64,
    pub xi2: f64,
}

/// Iwasawa coordinates of the linear part: M = n_x a_y k_phi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IwasawaCoords {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
}

/// Lattice generators and the inverse/square words used by the reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// gamma_1 = (S; 0) with S = [[0,-1],[1,0]].
    Gamma1,
    Gamma1Inv,
    /// gamma_1^2 = (-I; 0).
    Gamma1Sq,
    /// gamma_2 = ([[1,1],[0,1]]; (1/2, 0)).
    Gamma2,
    Gamma2Inv,
    /// gamma_3 = (I; (1, 0)).
    Gamma3,
    Gamma3Inv,
    /// gamma_4 = (I; (0, 1)).
    Gamma4,
    Gamma4Inv,
}

/// One reduction move: a generator applied `power` times (power >= 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordLetter {
    pub generator: Generator,
    pub power: u32,
}

/// Result of reduce_to_fundamental: the reduced element and the word of
/// generator applications that maps the input onto it (left-multiplied in
/// order: reduced = w_k ... w_1 g).
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub reduced: GroupElement,
    pub word: Vec<WordLetter>,
}

impl Generator {
    pub fn element(self) -> GroupElement {
        match self {
            Generator::Gamma1 => GroupElement::new([[0.0, -1.0], [1.0, 0.0]], [0.0, 0.0]),
            Generator::Gamma1Inv => GroupElement::new([[0.0, 1.0], [-1.0, 0.0]], [0.0, 0.0]),
            Generator::Gamma1Sq => GroupElement::new([[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]),
            Generator::Gamma2 => GroupElement::new([[1.0, 1.0], [0.0, 1.0]], [0.5, 0.0]),
            Generator::Gamma2Inv => GroupElement::new([[1.0, -1.0], [0.0, 1.0]], [-0.5, 0.0]),
            Generator::Gamma3 => GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0]),
            Generator::Gamma3Inv => GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [-1.0, 0.0]),
            Generator::Gamma4 => GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [0.0, 1.0]),
            Generator::Gamma4Inv => GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [0.0, -1.0]),
        }
    }

    /// Closed-form power, exact for the translation-like generators where
    /// repeated composition would otherwise cost O(power).
    pub fn power_element(self, power: u32) -> GroupElement {
        let n = power as f64;
        match self {
            Generator::Gamma2 => GroupElement::new([[1.0, n], [0.0, 1.0]], [n / 2.0, 0.0]),
            Generator::Gamma2Inv => GroupElement::new([[1.0, -n], [0.0, 1.0]], [-n / 2.0, 0.0]),
            Generator::Gamma3 => GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [n, 0.0]),
            Generator::Gamma3Inv => GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [-n, 0.0]),
            Generator::Gamma4 => GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [0.0, n]),
            Generator::Gamma4Inv => GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [0.0, -n]),
            _ => {
                let mut g = GroupElement::identity();
                for _ in 0..power {
                    g = compose(&self.element(), &g);
                }
                g
            }
        }
    }
}

impl WordLetter {
    pub fn element(self) -> GroupElement {
        self.generator.power_element(self.power)
    }
}

impl GroupElement {
    pub fn new(m: [[f64; 2]; 2], xi: [f64; 2]) -> Self {
        GroupElement { m11: m[0][0], m12: m[0][1], m21: m[1][0], m22: m[1][1], xi1: xi[0], xi2: xi[1] }
    }

    pub fn identity() -> Self {
        GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// (M; xi)^-1 = (M^-1; -M^-1 xi).
    pub fn inverse(&self) -> Self {
        let (a, b, c, d) = (self.m11, self.m12, self.m21, self.m22);
        GroupElement {
            m11: d,
            m12: -b,
            m21: -c,
            m22: a,
            xi1: -(d * self.xi1 - b * self.xi2),
            xi2: -(-c * self.xi1 + a * self.xi2),
        }
    }

    /// Maximum entrywise distance to another element.
    pub fn dist(&self, other: &Self) -> f64 {
        [
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
            self.xi1 - other.xi1,
            self.xi2 - other.xi2,
        ]
        .iter()
        .fold(0.0f64, |acc, d| acc.max(d.abs()))
    }
}

/// Group law: (M; xi)(M'; xi') = (MM'; xi + M xi').
pub fn compose(g: &GroupElement, h: &GroupElement) -> GroupElement {
    GroupElement {
        m11: g.m11 * h.m11 + g.m12 * h.m21,
        m12: g.m11 * h.m12 + g.m12 * h.m22,
        m21: g.m21 * h.m11 + g.m22 * h.m21,
        m22: g.m21 * h.m12 + g.m22 * h.m22,
        xi1: g.xi1 + g.m11 * h.xi1 + g.m12 * h.xi2,
        xi2: g.xi2 + g.m21 * h.xi1 + g.m22 * h.xi2,
    }
}

/// Iwasawa decomposition M = n_x a_y k_phi.
///
/// The bottom row of M equals (sin(phi)/sqrt(y), cos(phi)/sqrt(y)), so
/// y = 1/(c^2 + d^2), phi = atan2(c, d) normalized to [0, 2pi), and
/// x = (ac + bd) y.
pub fn iwasawa(g: &GroupElement) -> Result<IwasawaCoords> {
    let det = g.det();
    if (det - 1.0).abs() > DET_TOL {
        return Err(Error::DegenerateMatrix((det - 1.0).abs()));
    }
    let (a, b, c, d) = (g.m11, g.m12, g.m21, g.m22);
    let s = c * c + d * d;
    let y = 1.0 / s;
    let x = (a * c + b * d) * y;
    let mut phi = c.atan2(d);
    if phi < 0.0 {
        phi += std::f64::consts::TAU;
    }
    if std::f64::consts::TAU - phi < 1e-14 {
        phi = 0.0;
    }
    Ok(IwasawaCoords { x, y, phi })
}

/// Rebuild the linear part from Iwasawa coordinates (translation zero).
pub fn from_iwasawa(c: &IwasawaCoords) -> GroupElement {
    let r = c.y.sqrt();
    let (sin, cos) = c.phi.sin_cos();
    // n_x a_y k_phi
    GroupElement {
        m11: r * cos + c.x * sin / r,
        m12: -r * sin + c.x * cos / r,
        m21: sin / r,
        m22: cos / r,
        xi1: 0.0,
        xi2: 0.0,
    }
}

/// The named special elements.
pub mod special {
    use super::GroupElement;

    /// Geodesic flow element Phi^t = (a_{e^-t}; 0); Iwasawa y = e^{-t}.
    pub fn geodesic(t: f64) -> GroupElement {
        let r = (-t / 2.0).exp();
        GroupElement::new([[r, 0.0], [0.0, 1.0 / r]], [0.0, 0.0])
    }

    /// Horocycle flow element Psi^x = (n_x; 0).
    pub fn horocycle(x: f64) -> GroupElement {
        GroupElement::new([[1.0, x], [0.0, 1.0]], [0.0, 0.0])
    }
}

/// Lift (I; (alpha + c u, 0)) Psi^u Phi^t used by the limit theorems.
pub fn horocycle_lift(u: f64, t: f64, c: f64, alpha: f64) -> GroupElement {
    let shift = GroupElement::new([[1.0, 0.0], [0.0, 1.0]], [alpha + c * u, 0.0]);
    compose(&compose(&shift, &special::horocycle(u)), &special::geodesic(t))
}

/// Whether g lies in the fundamental domain, up to `tol` on the open/closed
/// boundary distinctions.
pub fn in_fundamental_domain(g: &GroupElement, tol: f64) -> bool {
    let iw = match iwasawa(g) {
        Ok(c) => c,
        Err(_) => return false,
    };
    let norm2 = iw.x * iw.x + iw.y * iw.y;
    let in_strip = iw.x >= -0.5 - tol && iw.x < 0.5 + tol;
    let above = norm2 >= 1.0 - tol;
    let phi_ok = iw.phi >= -tol && iw.phi < std::f64::consts::PI + tol;
    let xi_ok = g.xi1 > -0.5 - tol && g.xi1 <= 0.5 + tol && g.xi2 > -0.5 - tol && g.xi2 <= 0.5 + tol;
    in_strip && above && phi_ok && xi_ok
}

fn push_letter(word: &mut Vec<WordLetter>, generator: Generator, power: u32) {
    if power > 0 {
        word.push(WordLetter { generator, power });
    }
}

/// Reduce g to the fundamental domain by Gauss reduction of z = x + iy
/// under gamma_1 (inversion) and gamma_2 (translation), then gamma_1^2 to
/// put phi in [0, pi), then gamma_3/gamma_4 to put xi in (-1/2, 1/2]^2.
///
/// Boundary conventions: |z| > 1 with x in [-1/2, 1/2), plus |z| = 1 with
/// x <= 0; ties at |z| = 1 are resolved by one more inversion when x > 0.
pub fn reduce_to_fundamental(g: &GroupElement) -> Result<ReductionResult> {
    let det = g.det();
    if (det - 1.0).abs() > DET_TOL {
        return Err(Error::DegenerateMatrix((det - 1.0).abs()));
    }
    let mut cur = *g;
    let mut word = Vec::new();
    let mut steps = 0usize;
    const BOUNDARY: f64 = 1e-14;

    loop {
        steps += 1;
        if steps > MAX_REDUCTION_STEPS {
            return Err(Error::NonConvergence(MAX_REDUCTION_STEPS));
        }
        let iw = iwasawa(&cur)?;
        // Translate x into [-1/2, 1/2).
        let n = (iw.x + 0.5).floor();
        if n != 0.0 {
            if n.abs() > u32::MAX as f64 {
                return Err(Error::NonConvergence(steps));
            }
            let generator = if n > 0.0 { Generator::Gamma2Inv } else { Generator::Gamma2 };
            let power = n.abs() as u32;
            let letter = WordLetter { generator, power };
            cur = compose(&letter.element(), &cur);
            push_letter(&mut word, generator, power);
            continue;
        }
        let norm2 = iw.x * iw.x + iw.y * iw.y;
        if norm2 < 1.0 - BOUNDARY || (norm2 <= 1.0 + BOUNDARY && iw.x > BOUNDARY) {
            // Invert: strictly inside the disc, or on the circle with x > 0.
            cur = compose(&Generator::Gamma1.element(), &cur);
            push_letter(&mut word, Generator::Gamma1, 1);
            continue;
        }
        break;
    }

    // phi into [0, pi).
    let iw = iwasawa(&cur)?;
    if iw.phi >= std::f64::consts::PI {
        cur = compose(&Generator::Gamma1Sq.element(), &cur);
        push_letter(&mut word, Generator::Gamma1Sq, 1);
    }

    // xi into (-1/2, 1/2]^2: ceil(xi - 1/2) is the integer to subtract.
    let shift1 = (cur.xi1 - 0.5).ceil();
    if shift1 != 0.0 {
        let generator = if shift1 > 0.0 { Generator::Gamma3Inv } else { Generator::Gamma3 };
        let power = shift1.abs() as u32;
        let letter = WordLetter { generator, power };
        cur = compose(&letter.element(), &cur);
        push_letter(&mut word, generator, power);
    }
    let shift2 = (cur.xi2 - 0.5).ceil();
    if shift2 != 0.0 {
        let generator = if shift2 > 0.0 { Generator::Gamma4Inv } else { Generator::Gamma4 };
        let power = shift2.abs() as u32;
        let letter = WordLetter { generator, power };
        cur = compose(&letter.element(), &cur);
        push_letter(&mut word, generator, power);
    }

    Ok(ReductionResult { reduced: cur, word })
}

/// Replay a reduction word against g (left-multiplication in word order).
pub fn apply_word(word: &[WordLetter], g: &GroupElement) -> GroupElement {
    let mut cur = *g;
    for letter in word {
        cur = compose(&letter.element(), &cur);
    }
    cur
}
