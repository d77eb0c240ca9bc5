//! Exact piecewise models of a real function on a closed interval.
//!
//! A [`FunctionModel`] is an ordered list of [`Piece`]s that tile `[a, b]`.
//! Linear and constant pieces (and Cantor iterates, which expand into them)
//! are evaluated in exact rational arithmetic; polynomial and oscillating
//! pieces are evaluated in `f64` with a per-model tolerance.

mod roots;
mod segments;
mod spec;

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

pub use segments::{Direction, MonotoneSegmentation, Run, Segment};
pub use spec::{ArithmeticSpec, FunctionSpec, PieceKindSpec, PieceSpec};

/// Default tolerance of float-mode models.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default truncation distance from an oscillation accumulation point.
pub const DEFAULT_X_MIN: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticMode {
    ExactRational,
    FloatWithTol { tol: f64 },
}

impl ArithmeticMode {
    pub fn tol(&self) -> f64 {
        match self {
            ArithmeticMode::ExactRational => 0.0,
            ArithmeticMode::FloatWithTol { tol } => *tol,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ArithmeticMode::ExactRational)
    }
}

/// `scale * u^exponent * sin(1/u) + slope * x + offset` with
/// `u = orientation * (x - center) >= 0` on the piece.
#[derive(Clone, Debug, PartialEq)]
pub struct Oscillation {
    pub center: f64,
    pub orientation: f64,
    pub exponent: f64,
    pub scale: f64,
    pub slope: f64,
    pub offset: f64,
}

impl Oscillation {
    fn u(&self, x: f64) -> f64 {
        (self.orientation * (x - self.center)).max(0.0)
    }

    fn eval(&self, x: f64) -> f64 {
        let u = self.u(x);
        let wave = if u == 0.0 {
            0.0
        } else {
            self.scale * u.powf(self.exponent) * (1.0 / u).sin()
        };
        wave + self.slope * x + self.offset
    }

    /// Derivative in `x`, written in `t = 1/u`.
    fn derivative_in_t(&self, t: f64) -> f64 {
        let p = self.exponent;
        self.scale * self.orientation * t.powf(1.0 - p) * (p * t.sin() - t * t.cos()) + self.slope
    }

    fn x_of_t(&self, t: f64) -> f64 {
        self.center + self.orientation / t
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PieceKind {
    /// `slope * x + intercept`.
    Linear {
        slope: Real,
        intercept: Real,
    },
    Constant {
        value: Real,
    },
    /// Ascending powers of the absolute coordinate `x`.
    Polynomial {
        coefficients: Vec<f64>,
    },
    Oscillating(Oscillation),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub kind: PieceKind,
    pub lo: Real,
    pub hi: Real,
}

impl Piece {
    pub fn new(kind: PieceKind, lo: Real, hi: Real) -> Piece {
        Piece { kind, lo, hi }
    }

    pub fn linear(slope: Real, intercept: Real, lo: Real, hi: Real) -> Piece {
        Piece::new(PieceKind::Linear { slope, intercept }, lo, hi)
    }

    /// The linear piece through `(x0, y0)` and `(x1, y1)`.
    pub fn through(x0: Real, y0: Real, x1: Real, y1: Real) -> Piece {
        let slope = (&y1 - &y0) / (&x1 - &x0);
        let intercept = &y0 - &slope * &x0;
        Piece::linear(slope, intercept, x0, x1)
    }

    pub fn constant(value: Real, lo: Real, hi: Real) -> Piece {
        Piece::new(PieceKind::Constant { value }, lo, hi)
    }

    pub fn is_exact_kind(&self) -> bool {
        matches!(
            self.kind,
            PieceKind::Linear { .. } | PieceKind::Constant { .. }
        )
    }

    pub(crate) fn eval(&self, x: &Real, mode: ArithmeticMode) -> Real {
        match (&self.kind, mode) {
            (PieceKind::Linear { slope, intercept }, ArithmeticMode::ExactRational) => {
                slope * x + intercept
            }
            (PieceKind::Constant { value }, ArithmeticMode::ExactRational) => value.clone(),
            _ => Real::Float(self.eval_f64(x.to_f64())),
        }
    }

    pub(crate) fn eval_f64(&self, x: f64) -> f64 {
        match &self.kind {
            PieceKind::Linear { slope, intercept } => slope.to_f64() * x + intercept.to_f64(),
            PieceKind::Constant { value } => value.to_f64(),
            PieceKind::Polynomial { coefficients } => roots::horner(coefficients, x),
            PieceKind::Oscillating(osc) => osc.eval(x),
        }
    }

    /// The accumulation point of an oscillating piece, when it lies in the
    /// piece's closed domain.
    pub fn accumulation_point(&self) -> Option<f64> {
        match &self.kind {
            PieceKind::Oscillating(osc) if osc.scale != 0.0 => {
                let (lo, hi) = (self.lo.to_f64(), self.hi.to_f64());
                (osc.center >= lo && osc.center <= hi).then_some(osc.center)
            }
            _ => None,
        }
    }

    fn shifted(&self) -> Piece {
        let kind = match &self.kind {
            PieceKind::Linear { slope, intercept } => PieceKind::Linear {
                slope: slope + Real::one(),
                intercept: intercept.clone(),
            },
            PieceKind::Constant { value } => PieceKind::Linear {
                slope: Real::one(),
                intercept: value.clone(),
            },
            PieceKind::Polynomial { coefficients } => {
                let mut c = coefficients.clone();
                if c.len() < 2 {
                    c.resize(2, 0.0);
                }
                c[1] += 1.0;
                PieceKind::Polynomial { coefficients: c }
            }
            PieceKind::Oscillating(osc) => PieceKind::Oscillating(Oscillation {
                slope: osc.slope + 1.0,
                ..osc.clone()
            }),
        };
        Piece::new(kind, self.lo.clone(), self.hi.clone())
    }

    /// The piece of `x -> F(s - x)` where `s = a + b`.
    fn reflected(&self, s: &Real) -> Piece {
        let kind = match &self.kind {
            PieceKind::Linear { slope, intercept } => PieceKind::Linear {
                slope: -slope,
                intercept: slope * s + intercept,
            },
            PieceKind::Constant { value } => PieceKind::Constant {
                value: value.clone(),
            },
            PieceKind::Polynomial { coefficients } => PieceKind::Polynomial {
                coefficients: reflect_polynomial(coefficients, s.to_f64()),
            },
            PieceKind::Oscillating(osc) => {
                let sf = s.to_f64();
                PieceKind::Oscillating(Oscillation {
                    center: sf - osc.center,
                    orientation: -osc.orientation,
                    slope: -osc.slope,
                    offset: osc.slope * sf + osc.offset,
                    ..osc.clone()
                })
            }
        };
        Piece::new(kind, s - &self.hi, s - &self.lo)
    }

    /// `sign * self + shift` on `[lo, hi]`.
    pub(crate) fn signed_shift(&self, sign: i64, shift: &Real, lo: Real, hi: Real) -> Piece {
        if sign == 0 {
            return Piece::constant(shift.clone(), lo, hi);
        }
        let s = Real::int(sign);
        let sf = sign as f64;
        let kind = match &self.kind {
            PieceKind::Linear { slope, intercept } => PieceKind::Linear {
                slope: slope * &s,
                intercept: intercept * &s + shift,
            },
            PieceKind::Constant { value } => PieceKind::Constant {
                value: value * &s + shift,
            },
            PieceKind::Polynomial { coefficients } => {
                let mut c: Vec<f64> = coefficients.iter().map(|v| v * sf).collect();
                if c.is_empty() {
                    c.push(0.0);
                }
                c[0] += shift.to_f64();
                PieceKind::Polynomial { coefficients: c }
            }
            PieceKind::Oscillating(osc) => PieceKind::Oscillating(Oscillation {
                scale: osc.scale * sf,
                slope: osc.slope * sf,
                offset: osc.offset * sf + shift.to_f64(),
                ..osc.clone()
            }),
        };
        Piece::new(kind, lo, hi)
    }

    fn to_float(&self) -> Piece {
        let kind = match &self.kind {
            PieceKind::Linear { slope, intercept } => PieceKind::Linear {
                slope: slope.to_float(),
                intercept: intercept.to_float(),
            },
            PieceKind::Constant { value } => PieceKind::Constant {
                value: value.to_float(),
            },
            other => other.clone(),
        };
        Piece::new(kind, self.lo.clone(), self.hi.clone())
    }
}

/// Coefficients of `p(s - x)`.
fn reflect_polynomial(c: &[f64], s: f64) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    for (k, ck) in c.iter().enumerate() {
        // (s - x)^k = sum_j C(k, j) s^(k-j) (-x)^j
        let mut binom = 1.0;
        for (j, o) in out.iter_mut().enumerate().take(k + 1) {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *o += ck * binom * s.powi((k - j) as i32) * sign;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// Bounds on the variation over the unresolved stretch next to an
/// oscillation accumulation point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    pub point: Real,
    pub x_min: Real,
    /// A partition sum over extrema inside the stretch.
    pub lower: Real,
    /// `None` when the variation of the stretch is infinite.
    pub upper: Option<Real>,
}

#[derive(Clone, Debug)]
pub struct FunctionModel {
    pieces: Vec<Piece>,
    a: Real,
    b: Real,
    mode: ArithmeticMode,
    continuous: bool,
    segmentation: Arc<OnceLock<Result<MonotoneSegmentation, String>>>,
}

impl PartialEq for FunctionModel {
    fn eq(&self, other: &Self) -> bool {
        self.pieces == other.pieces && self.mode == other.mode
    }
}

impl FunctionModel {
    /// Builds a model from contiguous pieces. Exact mode requires linear or
    /// constant pieces with exact parameters.
    pub fn new(pieces: Vec<Piece>, mode: ArithmeticMode) -> Result<FunctionModel> {
        if pieces.is_empty() {
            return Err(Error::InvalidModel(
                "a model needs at least one piece".into(),
            ));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.lo >= p.hi {
                return Err(Error::InvalidModel(format!(
                    "piece {i} has an empty domain [{}, {}]",
                    p.lo, p.hi
                )));
            }
            if i > 0 && pieces[i - 1].hi != p.lo {
                return Err(Error::InvalidModel(format!(
                    "pieces {} and {i} are not contiguous ({} vs {})",
                    i - 1,
                    pieces[i - 1].hi,
                    p.lo
                )));
            }
            if let PieceKind::Oscillating(osc) = &p.kind {
                let ok = osc.exponent >= 0.0
                    && osc.orientation.abs() == 1.0
                    && osc.orientation * (p.lo.to_f64() - osc.center) >= 0.0
                    && osc.orientation * (p.hi.to_f64() - osc.center) >= 0.0;
                if !ok {
                    return Err(Error::InvalidModel(format!(
                        "oscillating piece {i} must lie on one side of its center with exponent >= 0"
                    )));
                }
            }
        }
        let pieces = match mode {
            ArithmeticMode::ExactRational => {
                for (i, p) in pieces.iter().enumerate() {
                    let exact_params = match &p.kind {
                        PieceKind::Linear { slope, intercept } => {
                            slope.is_exact() && intercept.is_exact()
                        }
                        PieceKind::Constant { value } => value.is_exact(),
                        _ => false,
                    };
                    if !exact_params || !p.lo.is_exact() || !p.hi.is_exact() {
                        return Err(Error::InvalidModel(format!(
                            "piece {i} cannot be represented in exact rational mode"
                        )));
                    }
                }
                pieces
            }
            ArithmeticMode::FloatWithTol { tol } => {
                if tol.is_nan() || tol < 0.0 {
                    return Err(Error::InvalidModel(format!("bad tolerance {tol}")));
                }
                pieces.iter().map(Piece::to_float).collect()
            }
        };
        let a = pieces[0].lo.clone();
        let b = pieces[pieces.len() - 1].hi.clone();
        let mut model = FunctionModel {
            pieces,
            a,
            b,
            mode,
            continuous: false,
            segmentation: Arc::new(OnceLock::new()),
        };
        model.continuous = model.find_discontinuity().is_none();
        Ok(model)
    }

    /// Picks exact mode when every piece allows it, float mode otherwise.
    pub fn auto(pieces: Vec<Piece>) -> Result<FunctionModel> {
        let exact = pieces.iter().all(|p| {
            p.lo.is_exact()
                && p.hi.is_exact()
                && match &p.kind {
                    PieceKind::Linear { slope, intercept } => {
                        slope.is_exact() && intercept.is_exact()
                    }
                    PieceKind::Constant { value } => value.is_exact(),
                    _ => false,
                }
        });
        let mode = if exact {
            ArithmeticMode::ExactRational
        } else {
            ArithmeticMode::FloatWithTol { tol: DEFAULT_TOL }
        };
        FunctionModel::new(pieces, mode)
    }

    pub fn identity(a: Real, b: Real) -> FunctionModel {
        FunctionModel::auto(vec![Piece::linear(Real::one(), Real::zero(), a, b)])
            .expect("identity model")
    }

    pub fn polynomial(coefficients: Vec<f64>, a: Real, b: Real) -> FunctionModel {
        FunctionModel::new(
            vec![Piece::new(PieceKind::Polynomial { coefficients }, a, b)],
            ArithmeticMode::FloatWithTol { tol: DEFAULT_TOL },
        )
        .expect("polynomial model")
    }

    /// Linear interpolation through the given nodes (exact when they are).
    pub fn piecewise_linear(nodes: &[(Real, Real)]) -> Result<FunctionModel> {
        if nodes.len() < 2 {
            return Err(Error::InvalidModel("need at least two nodes".into()));
        }
        let pieces = nodes
            .windows(2)
            .map(|w| {
                if w[0].1 == w[1].1 {
                    Piece::constant(w[0].1.clone(), w[0].0.clone(), w[1].0.clone())
                } else {
                    Piece::through(
                        w[0].0.clone(),
                        w[0].1.clone(),
                        w[1].0.clone(),
                        w[1].1.clone(),
                    )
                }
            })
            .collect();
        FunctionModel::auto(pieces)
    }

    /// `scale * x^exponent * sin(1/x)` on `[a, b]` with `0 <= a`.
    pub fn x_sin(exponent: f64, a: Real, b: Real) -> Result<FunctionModel> {
        let osc = Oscillation {
            center: 0.0,
            orientation: 1.0,
            exponent,
            scale: 1.0,
            slope: 0.0,
            offset: 0.0,
        };
        FunctionModel::new(
            vec![Piece::new(PieceKind::Oscillating(osc), a, b)],
            ArithmeticMode::FloatWithTol { tol: DEFAULT_TOL },
        )
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> (Real, Real) {
        (self.a.clone(), self.b.clone())
    }

    pub fn a(&self) -> &Real {
        &self.a
    }

    pub fn b(&self) -> &Real {
        &self.b
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }

    pub fn tol(&self) -> f64 {
        self.mode.tol()
    }

    pub fn is_exact(&self) -> bool {
        self.mode.is_exact()
    }

    /// Whether all junction values agree (exactly, or within tolerance).
    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    /// Piece boundaries, including `a` and `b`.
    pub fn knots(&self) -> Vec<Real> {
        let mut k: Vec<Real> = self.pieces.iter().map(|p| p.lo.clone()).collect();
        k.push(self.b.clone());
        k
    }

    pub fn contains(&self, x: &Real) -> bool {
        *x >= self.a && *x <= self.b
    }

    /// Brings `x` into the model's arithmetic.
    pub fn coerce(&self, x: &Real) -> Real {
        match self.mode {
            ArithmeticMode::ExactRational => x.to_exact().unwrap_or_else(|| x.clone()),
            ArithmeticMode::FloatWithTol { .. } => x.clone(),
        }
    }

    pub(crate) fn piece_index(&self, x: &Real) -> usize {
        let i = self.pieces.partition_point(|p| p.hi < *x);
        i.min(self.pieces.len() - 1)
    }

    /// `F(x)`. At a shared knot the left piece is used.
    pub fn evaluate(&self, x: &Real) -> Result<Real> {
        if !self.contains(x) {
            return Err(Error::OutOfDomain {
                x: x.clone(),
                a: self.a.clone(),
                b: self.b.clone(),
            });
        }
        let x = self.coerce(x);
        Ok(self.pieces[self.piece_index(&x)].eval(&x, self.mode))
    }

    /// `evaluate` for points already known to be in the domain.
    pub(crate) fn eval_unchecked(&self, x: &Real) -> Real {
        let x = self.coerce(x);
        self.pieces[self.piece_index(&x)].eval(&x, self.mode)
    }

    pub(crate) fn eval_f64(&self, x: f64) -> f64 {
        let xr = Real::Float(x);
        self.pieces[self.piece_index(&xr)].eval_f64(x)
    }

    /// A knot where neighbouring pieces disagree, or an oscillation with no
    /// limit at its accumulation point.
    pub fn find_discontinuity(&self) -> Option<Real> {
        for w in self.pieces.windows(2) {
            let knot = &w[0].hi;
            let left = w[0].eval(knot, self.mode);
            let right = w[1].eval(knot, self.mode);
            if !left.approx_eq(&right, self.tol()) {
                return Some(knot.clone());
            }
        }
        for p in &self.pieces {
            if let PieceKind::Oscillating(osc) = &p.kind {
                if osc.exponent == 0.0 && p.accumulation_point().is_some() {
                    return Some(Real::Float(osc.center));
                }
            }
        }
        None
    }

    /// `G(x) = F(x) + x`.
    pub fn shift_add_identity(&self) -> FunctionModel {
        let pieces = self.pieces.iter().map(Piece::shifted).collect();
        let g = FunctionModel::new(pieces, self.mode).expect("shift keeps the model valid");
        if cfg!(debug_assertions) && self.is_exact() && self.continuous {
            if let Ok(seg) = self.segmentation() {
                if seg.is_non_decreasing() {
                    let g_seg = g.segmentation().expect("shifted segmentation");
                    debug_assert!(g_seg
                        .runs()
                        .iter()
                        .all(|r| r.direction == Direction::Increasing));
                }
            }
        }
        g
    }

    /// `x -> F(a + b - x)` on the same domain.
    pub fn reflect(&self) -> FunctionModel {
        let s = &self.a + &self.b;
        let pieces = self.pieces.iter().rev().map(|p| p.reflected(&s)).collect();
        FunctionModel::new(pieces, self.mode).expect("reflection keeps the model valid")
    }

    /// `x -> -F(x)`.
    pub fn negate(&self) -> FunctionModel {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.signed_shift(-1, &Real::zero(), p.lo.clone(), p.hi.clone()))
            .collect();
        FunctionModel::new(pieces, self.mode).expect("negation keeps the model valid")
    }

    /// The restriction of the model to `[lo, hi]`.
    pub fn restrict(&self, lo: &Real, hi: &Real) -> Result<FunctionModel> {
        if lo >= hi || !self.contains(lo) || !self.contains(hi) {
            return Err(Error::InvalidModel(format!(
                "cannot restrict [{}, {}] to [{lo}, {hi}]",
                self.a, self.b
            )));
        }
        let pieces = self
            .pieces
            .iter()
            .filter(|p| p.hi > *lo && p.lo < *hi)
            .map(|p| {
                let mut q = p.clone();
                q.lo = p.lo.clone().max(lo.clone());
                q.hi = p.hi.clone().min(hi.clone());
                q
            })
            .collect();
        FunctionModel::new(pieces, self.mode)
    }

    /// Removes a stretch of length `x_min` next to every oscillation
    /// accumulation point sitting at an end of the domain.
    pub fn truncate(&self, x_min: f64) -> Result<FunctionModel> {
        let mut lo = self.a.clone();
        let mut hi = self.b.clone();
        for p in &self.pieces {
            if let Some(c) = p.accumulation_point() {
                if Real::Float(c) == self.a {
                    lo = Real::Float(c + x_min);
                } else if Real::Float(c) == self.b {
                    hi = Real::Float(c - x_min);
                } else {
                    return Err(Error::InvalidModel(format!(
                        "accumulation point {c} is interior; split the domain there first"
                    )));
                }
            }
        }
        if lo == self.a && hi == self.b {
            return Ok(self.clone());
        }
        self.restrict(&lo, &hi)
    }

    /// Whether some oscillating piece reaches its accumulation point.
    pub fn has_unresolved_oscillation(&self) -> bool {
        self.pieces.iter().any(|p| p.accumulation_point().is_some())
    }

    /// Variation bounds for each unresolved stretch of length `x_min`.
    pub fn tail_bounds(&self, x_min: f64) -> Vec<TailBounds> {
        self.pieces
            .iter()
            .filter_map(|p| {
                let c = p.accumulation_point()?;
                let PieceKind::Oscillating(osc) = &p.kind else {
                    return None;
                };
                let s = osc.scale.abs();
                let m = osc.slope.abs();
                let p_exp = osc.exponent;
                let upper = if p_exp > 1.0 {
                    Some(Real::Float(
                        s * (x_min.powf(p_exp) + x_min.powf(p_exp - 1.0) / (p_exp - 1.0))
                            + m * x_min,
                    ))
                } else {
                    None
                };
                Some(TailBounds {
                    point: Real::Float(c),
                    x_min: Real::Float(x_min),
                    lower: Real::Float(oscillation_chain_sum(osc, x_min, 1 << 16)),
                    upper,
                })
            })
            .collect()
    }

    /// The model in float arithmetic.
    pub fn to_float_mode(&self, tol: f64) -> FunctionModel {
        FunctionModel::new(self.pieces.clone(), ArithmeticMode::FloatWithTol { tol })
            .expect("float conversion keeps the model valid")
    }

    /// The maximal monotone segmentation, memoized.
    pub fn segmentation(&self) -> Result<&MonotoneSegmentation> {
        let cached = self
            .segmentation
            .get_or_init(|| segments::segment(self).map_err(|e| e.to_string()));
        match cached {
            Ok(s) => Ok(s),
            Err(_) => Err(segments::segment(self).expect_err("segmentation failed before")),
        }
    }

    /// A Lipschitz bound taken from the segment slopes (`f64`).
    pub fn lipschitz_estimate(&self) -> Result<f64> {
        let seg = self.segmentation()?;
        let mut best: f64 = 0.0;
        for run in seg.runs() {
            let len = (&run.hi - &run.lo).to_f64();
            let rise = (&run.f_hi - &run.f_lo).abs().to_f64();
            let piece = &self.pieces[run.piece];
            let local = match &piece.kind {
                PieceKind::Linear { slope, .. } => slope.abs().to_f64(),
                PieceKind::Constant { .. } => 0.0,
                PieceKind::Polynomial { coefficients } => {
                    let d = roots::derivative(coefficients);
                    let (l, h) = (run.lo.to_f64(), run.hi.to_f64());
                    let mut m = roots::horner(&d, l).abs().max(roots::horner(&d, h).abs());
                    for r in roots::polynomial_roots(&roots::derivative(&d), l, h) {
                        m = m.max(roots::horner(&d, r).abs());
                    }
                    m
                }
                PieceKind::Oscillating(_) => {
                    let n = 64;
                    let mut m = if len > 0.0 { rise / len } else { 0.0 };
                    let (l, h) = (run.lo.to_f64(), run.hi.to_f64());
                    for i in 0..n {
                        let x0 = l + (h - l) * i as f64 / n as f64;
                        let x1 = l + (h - l) * (i + 1) as f64 / n as f64;
                        m = m.max((piece.eval_f64(x1) - piece.eval_f64(x0)).abs() / (x1 - x0));
                    }
                    m
                }
            };
            best = best.max(local);
        }
        Ok(best)
    }
}

/// Partition sum of an oscillation over the points `u_k = 1/((k + 1/2) pi)`
/// inside `(0, x_min]`, using at most `cap` points.
pub(crate) fn oscillation_chain_sum(osc: &Oscillation, x_min: f64, cap: usize) -> f64 {
    let k0 = ((1.0 / x_min) / PI - 0.5).ceil().max(0.0) as usize;
    let mut prev: Option<f64> = None;
    let mut sum = 0.0;
    for k in k0..k0 + cap {
        let u = 1.0 / ((k as f64 + 0.5) * PI);
        if u > x_min {
            continue;
        }
        let x = osc.center + osc.orientation * u;
        let y = osc.eval(x);
        if let Some(p) = prev {
            sum += (y - p).abs();
        }
        prev = Some(y);
    }
    sum
}

/// The level-`k` Cantor iterate `c_k` on `[0, 1]` as exact linear and
/// constant pieces: `2^k` rising pieces of slope `(3/2)^k` interleaved with
/// `2^k - 1` plateaus.
pub fn build_cantor_iterate(k: u32) -> FunctionModel {
    let pieces = cantor_pieces(k, &Real::zero(), &Real::one(), &Real::zero(), &Real::one());
    FunctionModel::new(pieces, ArithmeticMode::ExactRational).expect("cantor iterate is valid")
}

/// Pieces of `lo_val + (hi_val - lo_val) * c_k((x - lo) / (hi - lo))`.
pub(crate) fn cantor_pieces(
    k: u32,
    lo: &Real,
    hi: &Real,
    lo_val: &Real,
    hi_val: &Real,
) -> Vec<Piece> {
    // (x0, x1, y0, y1) for each rising stretch, plus plateaus
    let mut rising = vec![(lo.clone(), hi.clone(), lo_val.clone(), hi_val.clone())];
    let mut plateaus: Vec<(Real, Real, Real)> = Vec::new();
    let three = Real::int(3);
    let two = Real::int(2);
    for _ in 0..k {
        let mut next = Vec::with_capacity(rising.len() * 2);
        for (x0, x1, y0, y1) in rising {
            let third = (&x1 - &x0) / &three;
            let xa = &x0 + &third;
            let xb = &xa + &third;
            let ym = (&y0 + &y1) / &two;
            next.push((x0, xa.clone(), y0, ym.clone()));
            plateaus.push((xa, xb.clone(), ym.clone()));
            next.push((xb, x1, ym, y1));
        }
        rising = next;
    }
    let mut pieces: Vec<Piece> = rising
        .into_iter()
        .map(|(x0, x1, y0, y1)| {
            if y0 == y1 {
                Piece::constant(y0, x0, x1)
            } else {
                Piece::through(x0, y0, x1, y1)
            }
        })
        .chain(
            plateaus
                .into_iter()
                .map(|(x0, x1, y)| Piece::constant(y, x0, x1)),
        )
        .collect();
    pieces.sort_by(|p, q| p.lo.cmp(&q.lo));
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zigzag() -> FunctionModel {
        let q = |n, d| Real::ratio(n, d);
        FunctionModel::piecewise_linear(&[
            (q(0, 1), q(0, 1)),
            (q(1, 4), q(1, 1)),
            (q(1, 2), q(0, 1)),
            (q(3, 4), q(1, 1)),
            (q(1, 1), q(0, 1)),
        ])
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let id = FunctionModel::identity(Real::zero(), Real::one());
        assert_eq!(id.evaluate(&Real::ratio(1, 2)).unwrap(), Real::ratio(1, 2));
        let c1 = build_cantor_iterate(1);
        assert_eq!(c1.evaluate(&Real::ratio(1, 2)).unwrap(), Real::ratio(1, 2));
        assert_eq!(
            zigzag().evaluate(&Real::ratio(3, 8)).unwrap(),
            Real::ratio(1, 2)
        );
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let id = FunctionModel::identity(Real::zero(), Real::one());
        assert!(matches!(
            id.evaluate(&Real::int(2)),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn cantor_iterate_shapes() {
        let c0 = build_cantor_iterate(0);
        assert_eq!(c0, FunctionModel::identity(Real::zero(), Real::one()));

        let c1 = build_cantor_iterate(1);
        let p = c1.pieces();
        assert_eq!(p.len(), 3);
        assert_eq!(
            p[0].kind,
            PieceKind::Linear {
                slope: Real::ratio(3, 2),
                intercept: Real::zero()
            }
        );
        assert_eq!(
            p[1].kind,
            PieceKind::Constant {
                value: Real::ratio(1, 2)
            }
        );
        assert_eq!(
            (p[1].lo.clone(), p[1].hi.clone()),
            (Real::ratio(1, 3), Real::ratio(2, 3))
        );
        assert!(
            matches!(&p[2].kind, PieceKind::Linear { slope, .. } if *slope == Real::ratio(3, 2))
        );

        let c3 = build_cantor_iterate(3);
        let rising: Vec<_> = c3
            .pieces()
            .iter()
            .filter(|p| matches!(p.kind, PieceKind::Linear { .. }))
            .collect();
        assert_eq!(rising.len(), 8);
        assert!(rising.iter().all(|p| &p.hi - &p.lo == Real::ratio(1, 27)));
        assert_eq!(c3.evaluate(&Real::zero()).unwrap(), Real::zero());
        assert_eq!(c3.evaluate(&Real::one()).unwrap(), Real::one());
        assert!(c3.is_continuous());
    }

    #[test]
    fn shift_examples() {
        let id = FunctionModel::identity(Real::zero(), Real::one());
        let g = id.shift_add_identity();
        assert_eq!(g.evaluate(&Real::ratio(1, 3)).unwrap(), Real::ratio(2, 3));

        let g = build_cantor_iterate(1).shift_add_identity();
        assert_eq!(g.evaluate(&Real::ratio(1, 3)).unwrap(), Real::ratio(5, 6));
        assert!(g
            .pieces()
            .iter()
            .all(|p| matches!(p.kind, PieceKind::Linear { .. })));

        let zero = FunctionModel::new(
            vec![Piece::constant(Real::zero(), Real::zero(), Real::one())],
            ArithmeticMode::ExactRational,
        )
        .unwrap();
        assert_eq!(
            zero.shift_add_identity(),
            FunctionModel::identity(Real::zero(), Real::one())
        );
    }

    #[test]
    fn continuity_flag() {
        let broken = FunctionModel::new(
            vec![
                Piece::constant(Real::zero(), Real::zero(), Real::one()),
                Piece::constant(Real::one(), Real::one(), Real::int(2)),
            ],
            ArithmeticMode::ExactRational,
        )
        .unwrap();
        assert!(!broken.is_continuous());
        assert!(zigzag().is_continuous());
        let sin = FunctionModel::x_sin(0.0, Real::zero(), Real::one()).unwrap();
        assert!(!sin.is_continuous());
        let xsin = FunctionModel::x_sin(1.0, Real::zero(), Real::one()).unwrap();
        assert!(xsin.is_continuous());
    }

    #[test]
    fn exact_mode_rejects_polynomials() {
        let r = FunctionModel::new(
            vec![Piece::new(
                PieceKind::Polynomial {
                    coefficients: vec![0.0, 0.0, 1.0],
                },
                Real::zero(),
                Real::one(),
            )],
            ArithmeticMode::ExactRational,
        );
        assert!(r.is_err());
    }

    #[test]
    fn gaps_are_rejected() {
        let r = FunctionModel::new(
            vec![
                Piece::constant(Real::zero(), Real::zero(), Real::ratio(1, 2)),
                Piece::constant(Real::zero(), Real::ratio(2, 3), Real::one()),
            ],
            ArithmeticMode::ExactRational,
        );
        assert!(matches!(r, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn reflection_round_trips() {
        let z = zigzag();
        let quarter = Real::ratio(1, 8);
        assert_eq!(
            z.reflect().evaluate(&quarter).unwrap(),
            z.evaluate(&(Real::one() - &quarter)).unwrap()
        );
        assert_eq!(z.reflect().reflect(), z);

        let cube = FunctionModel::polynomial(vec![0.0, 0.0, 0.0, 1.0], Real::int(-1), Real::one());
        let r = cube.reflect();
        assert!((r.eval_f64(0.3) - (-0.3f64).powi(3)).abs() < 1e-15);

        let xs = FunctionModel::x_sin(1.0, Real::zero(), Real::one()).unwrap();
        let r = xs.reflect();
        assert!((r.eval_f64(0.7) - xs.eval_f64(0.3)).abs() < 1e-15);
    }

    #[test]
    fn tail_bounds_by_exponent() {
        let xs = FunctionModel::x_sin(1.0, Real::zero(), Real::one()).unwrap();
        let t = &xs.tail_bounds(1e-4)[0];
        assert!(t.upper.is_none());
        assert!(t.lower.to_f64() > 1.0);
        let x2s = FunctionModel::x_sin(2.0, Real::zero(), Real::one()).unwrap();
        let t = &x2s.tail_bounds(1e-4)[0];
        let upper = t.upper.as_ref().unwrap().to_f64();
        assert!(t.lower.to_f64() <= upper && upper < 2e-4);
    }

    #[test]
    fn truncation_drops_the_oscillating_stretch() {
        let xs = FunctionModel::x_sin(1.0, Real::zero(), Real::one()).unwrap();
        let t = xs.truncate(1e-3).unwrap();
        assert_eq!(t.a().to_f64(), 1e-3);
        assert!(!t.has_unresolved_oscillation());
    }
}
