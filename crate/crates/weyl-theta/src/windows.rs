//! Window functions: indicators, piecewise-quadratic trapezoids, dyadic
//! truncations, and the Gaussian/Hermite test functions.
//!
//! The trapezoid
//!
//! ```text
//!             0                          w <= a - eps
//!             2/eps^2 (w - a + eps)^2    a - eps   < w <= a - eps/2
//! T(w) =      1 - 2/eps^2 (w - a)^2      a - eps/2 < w <= a
//!             1                          a < w <= b
//!             ...mirrored in delta on the right flank
//! ```
//!
//! is the basic smoothing block; `Delta = T_{1/3,1/3}^{1/6,1/3}` generates a
//! partition of unity of the unit indicator under dyadic dilation, and the
//! truncations chi_s^(J) are its J-term partial sums. All norms (L1, L2,
//! Linf, total variation, and the stationary-phase norm) are computed
//! exactly from the polynomial pieces and cached.

use crate::error::{Error, Result};

/// One polynomial piece: value c[0] + c[1] w + c[2] w^2 on (lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub c: [f64; 3],
}

impl Piece {
    fn eval(&self, w: f64) -> f64 {
        (self.c[2] * w + self.c[1]) * w + self.c[0]
    }

    fn derivative(&self) -> [f64; 3] {
        [self.c[1], 2.0 * self.c[2], 0.0]
    }
}

/// Compactly supported piecewise quadratic, zero outside its pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewisePoly {
    pub pieces: Vec<Piece>,
}

/// Real roots of g0 + g1 w + g2 w^2.
fn quadratic_roots(g: [f64; 3]) -> Vec<f64> {
    let [g0, g1, g2] = g;
    if g2 == 0.0 {
        if g1 == 0.0 {
            return vec![];
        }
        return vec![-g0 / g1];
    }
    let disc = g1 * g1 - 4.0 * g2 * g0;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    // Citardauq form for the smaller-magnitude root to avoid cancellation.
    let q = -0.5 * (g1 + g1.signum() * sq);
    let mut roots = vec![q / g2];
    if q != 0.0 {
        roots.push(g0 / q);
    } else {
        roots.push(0.0);
    }
    roots
}

/// Exact signed integral of w^p (g0 + g1 w + g2 w^2) over [a, b].
///
/// Evaluated around the midpoint so that ramp pieces with large monomial
/// coefficients do not cancel: with w = m + u the integrand expands in
/// powers of u with coefficients at the scale of the function values.
fn signed_moment(p: u32, g: [f64; 3], a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    // g in the u-basis
    let g0 = (g[2] * m + g[1]) * m + g[0];
    let g1 = g[1] + 2.0 * g[2] * m;
    let g2 = g[2];
    // multiply by (m + u)^p
    let mut c = [0.0f64; 5];
    match p {
        0 => {
            c[0] = g0;
            c[1] = g1;
            c[2] = g2;
        }
        1 => {
            c[0] = m * g0;
            c[1] = g0 + m * g1;
            c[2] = g1 + m * g2;
            c[3] = g2;
        }
        _ => {
            let m2 = m * m;
            c[0] = m2 * g0;
            c[1] = 2.0 * m * g0 + m2 * g1;
            c[2] = g0 + 2.0 * m * g1 + m2 * g2;
            c[3] = g1 + 2.0 * m * g2;
            c[4] = g2;
        }
    }
    // odd powers of u integrate to zero on [-h, h]
    let h2 = h * h;
    2.0 * h * (c[0] + h2 * (c[2] / 3.0 + h2 * c[4] / 5.0))
}

/// Exact integral of |w^p (g0 + g1 w + g2 w^2)| over [a, b].
fn abs_moment(p: u32, g: [f64; 3], a: f64, b: f64) -> f64 {
    let mut cuts = vec![a, b];
    if p > 0 && a < 0.0 && b > 0.0 {
        cuts.push(0.0);
    }
    for r in quadratic_roots(g) {
        if r > a && r < b {
            cuts.push(r);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| signed_moment(p, g, w[0], w[1]).abs()).sum()
}

/// Max of |w^p (g0 + g1 w + g2 w^2)| over [a, b].
fn abs_max(p: u32, g: [f64; 3], a: f64, b: f64) -> f64 {
    let h = |w: f64| w.powi(p as i32) * ((g[2] * w + g[1]) * w + g[0]);
    let mut best = h(a).abs().max(h(b).abs());
    // critical points: w = 0 (for p >= 1) and roots of p g + w g'
    if p >= 1 && a < 0.0 && b > 0.0 {
        best = best.max(0.0);
    }
    let pf = p as f64;
    let crit = [pf * g[0], (pf + 1.0) * g[1], (pf + 2.0) * g[2]];
    for r in quadratic_roots(crit) {
        if r > a && r < b {
            best = best.max(h(r).abs());
        }
    }
    best
}

impl PiecewisePoly {
    pub fn eval(&self, w: f64) -> f64 {
        // Pieces are sorted and contiguous; membership is lo < w <= hi.
        match self.pieces.binary_search_by(|p| {
            if w <= p.lo {
                std::cmp::Ordering::Greater
            } else if w > p.hi {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Equal
            }
        }) {
            Ok(i) => self.pieces[i].eval(w),
            Err(_) => 0.0,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        if self.pieces.is_empty() {
            (0.0, 0.0)
        } else {
            (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
        }
    }

    /// Jumps of the q-th derivative at the piece boundaries, including the
    /// outer edges against the zero extension. Returns (location, jump) pairs.
    fn jumps(&self, q: u32) -> Vec<(f64, f64)> {
        let dv = |p: &Piece, w: f64| -> f64 {
            match q {
                0 => p.eval(w),
                1 => p.c[1] + 2.0 * p.c[2] * w,
                2 => 2.0 * p.c[2],
                _ => 0.0,
            }
        };
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let left = if i > 0 && self.pieces[i - 1].hi == p.lo {
                dv(&self.pieces[i - 1], p.lo)
            } else {
                0.0
            };
            let here = dv(p, p.lo);
            if left != here {
                out.push((p.lo, here - left));
            }
            if i + 1 == self.pieces.len() || self.pieces[i + 1].lo != p.hi {
                let right = dv(p, p.hi);
                if right != 0.0 {
                    out.push((p.hi, -right));
                }
            }
        }
        out
    }

    fn is_continuous(&self, order: u32) -> bool {
        (0..=order).all(|q| self.jumps(q).iter().all(|(_, j)| j.abs() < 1e-9))
    }

    /// Mirror w -> -w.
    pub fn mirror(&self) -> PiecewisePoly {
        let mut pieces: Vec<Piece> = self
            .pieces
            .iter()
            .map(|p| Piece { lo: -p.hi, hi: -p.lo, c: [p.c[0], -p.c[1], p.c[2]] })
            .collect();
        pieces.reverse();
        PiecewisePoly { pieces }
    }

    /// Pointwise linear combination a*self + b*other on the merged partition.
    pub fn linear_combination(&self, a: f64, other: &PiecewisePoly, b: f64) -> PiecewisePoly {
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(other.pieces.iter())
            .flat_map(|p| [p.lo, p.hi])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut c = [0.0; 3];
            for (weight, poly) in [(a, self), (b, other)] {
                for p in &poly.pieces {
                    if p.lo < mid && mid <= p.hi {
                        for k in 0..3 {
                            c[k] += weight * p.c[k];
                        }
                    }
                }
            }
            if c.iter().any(|&x| x != 0.0) {
                pieces.push(Piece { lo: w[0], hi: w[1], c });
            }
        }
        PiecewisePoly { pieces }
    }
}

/// Which part of the dyadic truncation to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyadicPart {
    Full,
    Left,
    Right,
}

/// Norm bundle cached on every window. `sp` is absent for the
/// unbounded-support variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub tv: f64,
    pub sp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WindowKind {
    /// chi_s = 1_{(0,s)}.
    Indicator { s: f64 },
    Piecewise(PiecewisePoly),
    /// amp * exp(-pi width w^2).
    Gaussian { amp: f64, width: f64 },
    /// amp * w * exp(-pi width w^2).
    Hermite1 { amp: f64, width: f64 },
}

/// A real window function with cached norms.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    kind: WindowKind,
    norms: Norms,
}

fn piecewise_norms(p: &PiecewisePoly) -> Norms {
    let mut l1 = 0.0;
    let mut l2sq = 0.0;
    let mut linf = 0.0f64;
    let mut tv = 0.0;
    for piece in &p.pieces {
        l1 += abs_moment(0, piece.c, piece.lo, piece.hi);
        // square the quadratic: degree-4 monomial integral
        let c = piece.c;
        let sq = [c[0] * c[0], 2.0 * c[0] * c[1], c[1] * c[1] + 2.0 * c[0] * c[2], 2.0 * c[1] * c[2], c[2] * c[2]];
        for (k, &s) in sq.iter().enumerate() {
            if s != 0.0 {
                let e = k as i32 + 1;
                l2sq += s * (piece.hi.powi(e) - piece.lo.powi(e)) / e as f64;
            }
        }
        linf = linf.max(abs_max(0, piece.c, piece.lo, piece.hi));
        tv += abs_moment(0, piece.derivative(), piece.lo, piece.hi);
    }
    for (_, j) in p.jumps(0) {
        tv += j.abs();
    }
    let sp = (2.0 * l1).max(3.0 * (linf + tv));
    Norms { l1, l2: l2sq.max(0.0).sqrt(), linf, tv, sp: Some(sp) }
}

impl Window {
    fn from_kind(kind: WindowKind) -> Window {
        let norms = match &kind {
            WindowKind::Indicator { s } => Norms {
                l1: *s,
                l2: s.sqrt(),
                linf: 1.0,
                tv: 2.0,
                sp: Some((2.0 * s).max(9.0)),
            },
            WindowKind::Piecewise(p) => piecewise_norms(p),
            WindowKind::Gaussian { amp, width } => {
                let a = amp.abs();
                Norms {
                    l1: a / width.sqrt(),
                    l2: a / (2.0 * width).powf(0.25),
                    linf: a,
                    tv: 2.0 * a,
                    sp: None,
                }
            }
            WindowKind::Hermite1 { amp, width } => {
                let a = amp.abs();
                let peak = a * (-0.5f64).exp() / (2.0 * std::f64::consts::PI * width).sqrt();
                Norms {
                    l1: a / (std::f64::consts::PI * width),
                    l2: a * (std::f64::consts::PI.sqrt() / (2.0 * (2.0 * std::f64::consts::PI * width).powf(1.5)))
                        .sqrt(),
                    linf: peak,
                    tv: 4.0 * peak,
                    sp: None,
                }
            }
        };
        Window { kind, norms }
    }

    /// chi_s = 1_{(0,s)}.
    pub fn indicator(s: f64) -> Window {
        Window::from_kind(WindowKind::Indicator { s })
    }

    /// The oscillator ground state e^{-pi w^2}.
    pub fn gaussian() -> Window {
        Window::from_kind(WindowKind::Gaussian { amp: 1.0, width: 1.0 })
    }

    /// The first excited state w e^{-pi w^2}.
    pub fn hermite1() -> Window {
        Window::from_kind(WindowKind::Hermite1 { amp: 1.0, width: 1.0 })
    }

    /// Smooth trapezoid T_{a,b}^{eps,delta}; zero ramps collapse to jumps.
    pub fn trapezoid(a: f64, b: f64, eps: f64, delta: f64) -> Result<Window> {
        if a > b {
            return Err(Error::InvalidInterval { a, b });
        }
        let mut pieces = Vec::with_capacity(5);
        if eps > 0.0 {
            let e2 = 2.0 / (eps * eps);
            let lo = a - eps;
            pieces.push(Piece { lo, hi: a - eps / 2.0, c: [e2 * lo * lo, -2.0 * e2 * lo, e2] });
            pieces.push(Piece { lo: a - eps / 2.0, hi: a, c: [1.0 - e2 * a * a, 2.0 * e2 * a, -e2] });
        }
        if b > a {
            pieces.push(Piece { lo: a, hi: b, c: [1.0, 0.0, 0.0] });
        }
        if delta > 0.0 {
            let d2 = 2.0 / (delta * delta);
            let hi = b + delta;
            pieces.push(Piece { lo: b, hi: b + delta / 2.0, c: [1.0 - d2 * b * b, 2.0 * d2 * b, -d2] });
            pieces.push(Piece { lo: b + delta / 2.0, hi, c: [d2 * hi * hi, -2.0 * d2 * hi, d2] });
        }
        Ok(Window::from_kind(WindowKind::Piecewise(PiecewisePoly { pieces })))
    }

    /// Delta = T_{1/3,1/3}^{1/6,1/3}, the partition-of-unity bump.
    pub fn delta_bump() -> Window {
        Window::trapezoid(1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0).unwrap()
    }

    /// Delta_-(w) = Delta(-w), stored as its own piecewise function.
    pub fn delta_bump_mirror() -> Window {
        Window::delta_bump().mirror()
    }

    /// Dyadic truncation chi_s^(J) (or its left/right half).
    pub fn dyadic_truncation(s: f64, j_steps: u32, part: DyadicPart) -> Result<Window> {
        if s < 1.0 {
            return Err(Error::ParameterOutOfRange(format!("dyadic truncation needs s >= 1, got {s}")));
        }
        if j_steps < 1 {
            return Err(Error::ParameterOutOfRange("dyadic truncation needs J >= 1".into()));
        }
        let pw = 3.0 * 2f64.powi(j_steps as i32 - 1);
        let edge = s / pw; // s / (3 * 2^(J-1))
        let ramp = s / (2.0 * pw); // s / (6 * 2^(J-1))
        match part {
            DyadicPart::Full => Window::trapezoid(edge, s - edge, ramp, ramp),
            DyadicPart::Left => Window::trapezoid(edge, s / 3.0, ramp, s / 3.0),
            DyadicPart::Right => {
                // At J = 1 the plateau degenerates: s - edge = 2s/3 up to
                // one ulp of rounding.
                let a = 2.0 * s / 3.0;
                Window::trapezoid(a, (s - edge).max(a), s / 3.0, ramp)
            }
        }
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    pub fn eval(&self, w: f64) -> f64 {
        match &self.kind {
            WindowKind::Indicator { s } => {
                if w > 0.0 && w < *s {
                    1.0
                } else {
                    0.0
                }
            }
            WindowKind::Piecewise(p) => p.eval(w),
            WindowKind::Gaussian { amp, width } => amp * (-std::f64::consts::PI * width * w * w).exp(),
            WindowKind::Hermite1 { amp, width } => amp * w * (-std::f64::consts::PI * width * w * w).exp(),
        }
    }

    /// Cached norms; recomputable exactly from the pieces.
    pub fn norms(&self) -> Norms {
        self.norms
    }

    /// Stationary-phase norm max{2 ||f||_1, 3(||f||_inf + V(f))}.
    pub fn sp_norm(&self) -> Result<f64> {
        self.norms.sp.ok_or(Error::UnboundedSupport)
    }

    /// Support interval (compact variants) or the 1e-16 truncation radius
    /// of the Gaussian tails.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            WindowKind::Indicator { s } => (0.0, *s),
            WindowKind::Piecewise(p) => p.support(),
            WindowKind::Gaussian { width, .. } | WindowKind::Hermite1 { width, .. } => {
                let r = (16.0 * std::f64::consts::LN_10 / (std::f64::consts::PI * width)).sqrt();
                (-r, r)
            }
        }
    }

    /// Geodesic dilation: w -> e^{-t/4} f(e^{-t/2} w), so that
    /// sqrt(s) * dilate(chi_(0,1), 2 log s) = chi_(0,s).
    pub fn dilate(&self, t: f64) -> Window {
        let amp_scale = (-t / 4.0).exp();
        let arg_scale = (-t / 2.0).exp();
        match &self.kind {
            WindowKind::Indicator { s } => {
                let piece =
                    Piece { lo: 0.0, hi: s / arg_scale, c: [amp_scale, 0.0, 0.0] };
                Window::from_kind(WindowKind::Piecewise(PiecewisePoly { pieces: vec![piece] }))
            }
            WindowKind::Piecewise(p) => {
                let pieces = p
                    .pieces
                    .iter()
                    .map(|piece| Piece {
                        lo: piece.lo / arg_scale,
                        hi: piece.hi / arg_scale,
                        c: [
                            amp_scale * piece.c[0],
                            amp_scale * piece.c[1] * arg_scale,
                            amp_scale * piece.c[2] * arg_scale * arg_scale,
                        ],
                    })
                    .collect();
                Window::from_kind(WindowKind::Piecewise(PiecewisePoly { pieces }))
            }
            WindowKind::Gaussian { amp, width } => Window::from_kind(WindowKind::Gaussian {
                amp: amp * amp_scale,
                width: width * arg_scale * arg_scale,
            }),
            WindowKind::Hermite1 { amp, width } => Window::from_kind(WindowKind::Hermite1 {
                amp: amp * amp_scale * arg_scale,
                width: width * arg_scale * arg_scale,
            }),
        }
    }

    /// Mirror w -> -w.
    pub fn mirror(&self) -> Window {
        match &self.kind {
            WindowKind::Piecewise(p) => Window::from_kind(WindowKind::Piecewise(p.mirror())),
            WindowKind::Indicator { s } => {
                let piece = Piece { lo: -s, hi: 0.0, c: [1.0, 0.0, 0.0] };
                Window::from_kind(WindowKind::Piecewise(PiecewisePoly { pieces: vec![piece] }))
            }
            WindowKind::Gaussian { .. } => self.clone(),
            WindowKind::Hermite1 { amp, width } => {
                Window::from_kind(WindowKind::Hermite1 { amp: -amp, width: *width })
            }
        }
    }

    /// Pointwise a*self + b*other for the piecewise-representable variants.
    pub fn linear_combination(&self, a: f64, other: &Window, b: f64) -> Result<Window> {
        let as_poly = |w: &Window| -> Result<PiecewisePoly> {
            match &w.kind {
                WindowKind::Piecewise(p) => Ok(p.clone()),
                WindowKind::Indicator { s } => Ok(PiecewisePoly {
                    pieces: vec![Piece { lo: 0.0, hi: *s, c: [1.0, 0.0, 0.0] }],
                }),
                _ => Err(Error::UnboundedSupport),
            }
        };
        let pa = as_poly(self)?;
        let pb = as_poly(other)?;
        Ok(Window::from_kind(WindowKind::Piecewise(pa.linear_combination(a, &pb, b))))
    }

    /// Is the window q-1 times continuously differentiable (so that the
    /// q-th derivative has no delta components)?
    pub fn is_piecewise_c(&self, order: u32) -> bool {
        match &self.kind {
            WindowKind::Piecewise(p) => order == 0 || p.is_continuous(order - 1),
            WindowKind::Indicator { .. } => order == 0,
            _ => true,
        }
    }
}

/// Which norm h_norm should report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HNorm {
    L1,
    Sp,
}

/// Exact ||w^p f^(q)|| for a piecewise window, in L1 or the sp norm.
///
/// The q-th derivative of a quadratic piece is again (at most) quadratic,
/// so every h^{p,q} is w^p times a quadratic and all integrals reduce to
/// monomial antiderivatives split at sign changes.
pub fn h_norm(f: &Window, p: u32, q: u32, norm: HNorm) -> Result<f64> {
    if p > 2 || q > 2 {
        return Err(Error::ParameterOutOfRange(format!("h_norm supports p,q <= 2, got ({p},{q})")));
    }
    let poly = match f.kind() {
        WindowKind::Piecewise(poly) => poly.clone(),
        WindowKind::Indicator { s } => PiecewisePoly {
            pieces: vec![Piece { lo: 0.0, hi: *s, c: [1.0, 0.0, 0.0] }],
        },
        _ => return Err(Error::UnboundedSupport),
    };
    if q >= 1 && !poly.is_continuous(q - 1) {
        return Err(Error::NotSmoothEnough { q });
    }

    let deriv = |c: [f64; 3], q: u32| -> [f64; 3] {
        match q {
            0 => c,
            1 => [c[1], 2.0 * c[2], 0.0],
            _ => [2.0 * c[2], 0.0, 0.0],
        }
    };

    match norm {
        HNorm::L1 => {
            let mut total = 0.0;
            for piece in &poly.pieces {
                total += abs_moment(p, deriv(piece.c, q), piece.lo, piece.hi);
            }
            Ok(total)
        }
        HNorm::Sp => {
            // sp = max{2 ||h||_1, 3(||h||_inf + V(h))} where V includes
            // jumps of h at the piece boundaries.
            let mut l1 = 0.0;
            let mut linf = 0.0f64;
            let mut var = 0.0;
            for piece in &poly.pieces {
                let g = deriv(piece.c, q);
                l1 += abs_moment(p, g, piece.lo, piece.hi);
                linf = linf.max(abs_max(p, g, piece.lo, piece.hi));
                // (w^p g)' = w^{p-1} (p g + w g')
                let pf = p as f64;
                let hderiv = [pf * g[0], (pf + 1.0) * g[1], (pf + 2.0) * g[2]];
                if p == 0 {
                    var += abs_moment(0, [g[1], 2.0 * g[2], 0.0], piece.lo, piece.hi);
                } else {
                    var += abs_moment(p - 1, hderiv, piece.lo, piece.hi);
                }
            }
            // jumps of h = w^p f^(q) at boundaries of the q-th derivative
            let hval = |piece: &Piece, w: f64| -> f64 {
                let g = deriv(piece.c, q);
                w.powi(p as i32) * ((g[2] * w + g[1]) * w + g[0])
            };
            for (i, piece) in poly.pieces.iter().enumerate() {
                let left = if i > 0 && poly.pieces[i - 1].hi == piece.lo {
                    hval(&poly.pieces[i - 1], piece.lo)
                } else {
                    0.0
                };
                var += (hval(piece, piece.lo) - left).abs();
                if i + 1 == poly.pieces.len() || poly.pieces[i + 1].lo != piece.hi {
                    var += hval(piece, piece.hi).abs();
                }
            }
            Ok((2.0 * l1).max(3.0 * (linf + var)))
        }
    }
}

/// Partial partition-of-unity sum sum_{j<J} Delta(2^j w) + Delta(2^j (1-w)).
pub fn partition_sum(w: f64, j_max: u32) -> f64 {
    let delta = Window::delta_bump();
    let mut total = 0.0;
    let mut scale = 1.0;
    for _ in 0..j_max {
        total += delta.eval(scale * w) + delta.eval(scale * (1.0 - w));
        scale *= 2.0;
    }
    total
}
