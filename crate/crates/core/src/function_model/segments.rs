//! Monotone runs, maximal segments, preimages and level sets.

use serde::{Deserialize, Serialize};

use super::{roots, FunctionModel, PieceKind, DEFAULT_X_MIN};
use crate::error::{Error, Result};
use crate::measure::{Interval, IntervalSet};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
}

/// A stretch `[lo, hi]` of one piece on which `F` is monotone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub lo: Real,
    pub hi: Real,
    pub f_lo: Real,
    pub f_hi: Real,
    pub direction: Direction,
    pub piece: usize,
}

impl Run {
    pub fn rise(&self) -> Real {
        (&self.f_hi - &self.f_lo).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: Real,
    pub hi: Real,
    pub f_lo: Real,
    pub f_hi: Real,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneSegmentation {
    /// Maximal segments; neighbours have different directions.
    pub segments: Vec<Segment>,
    pub maximal: bool,
    #[serde(skip)]
    runs: Vec<Run>,
}

impl MonotoneSegmentation {
    /// The finer per-piece runs the segments are merged from.
    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.segments
            .iter()
            .all(|s| s.direction != Direction::Decreasing)
    }

    pub fn is_monotone(&self) -> bool {
        self.is_non_decreasing()
            || self
                .segments
                .iter()
                .all(|s| s.direction != Direction::Increasing)
    }

    /// Segment boundaries, including both domain ends.
    pub fn knots(&self) -> Vec<Real> {
        let mut k: Vec<Real> = self.segments.iter().map(|s| s.lo.clone()).collect();
        if let Some(last) = self.segments.last() {
            k.push(last.hi.clone());
        }
        k
    }

    /// Runs overlapping `[lo, hi]` in a positive-length stretch, or containing
    /// it when it is a point.
    pub(crate) fn runs_meeting(&self, lo: &Real, hi: &Real) -> &[Run] {
        let start = self.runs.partition_point(|r| r.hi < *lo);
        let end = self.runs.partition_point(|r| r.lo <= *hi);
        &self.runs[start..end.max(start)]
    }
}

pub(super) fn segment(model: &FunctionModel) -> Result<MonotoneSegmentation> {
    if let Some(at) = model.find_discontinuity() {
        return Err(Error::Discontinuous { at });
    }
    let mut runs = Vec::new();
    for (i, piece) in model.pieces.iter().enumerate() {
        if let Some(c) = piece.accumulation_point() {
            return Err(Error::InfiniteSegmentation {
                piece: i,
                point: Real::Float(c),
                hint: Real::Float(DEFAULT_X_MIN),
            });
        }
        let (lo, hi) = (piece.lo.clone(), piece.hi.clone());
        let mut cuts: Vec<Real> = match &piece.kind {
            PieceKind::Linear { .. } | PieceKind::Constant { .. } => Vec::new(),
            PieceKind::Polynomial { coefficients } => {
                roots::polynomial_roots(&roots::derivative(coefficients), lo.to_f64(), hi.to_f64())
                    .into_iter()
                    .map(Real::Float)
                    .collect()
            }
            PieceKind::Oscillating(osc) => {
                let u0 = (osc.orientation * (lo.to_f64() - osc.center)).abs();
                let u1 = (osc.orientation * (hi.to_f64() - osc.center)).abs();
                let (u_min, u_max) = (u0.min(u1), u0.max(u1));
                let mut xs: Vec<f64> = roots::sampled_sign_changes(
                    |t| osc.derivative_in_t(t),
                    1.0 / u_max,
                    1.0 / u_min,
                )
                .into_iter()
                .map(|t| osc.x_of_t(t))
                .collect();
                xs.sort_by(f64::total_cmp);
                xs.into_iter().map(Real::Float).collect()
            }
        };
        cuts.retain(|c| *c > lo && *c < hi);
        let mut bounds = vec![lo];
        bounds.append(&mut cuts);
        bounds.push(hi);
        for w in bounds.windows(2) {
            if w[0] >= w[1] {
                continue;
            }
            let f_lo = piece.eval(&w[0], model.mode);
            let f_hi = piece.eval(&w[1], model.mode);
            let direction = match &piece.kind {
                PieceKind::Constant { .. } => Direction::Constant,
                PieceKind::Linear { slope, .. } => match slope.signum() {
                    1 => Direction::Increasing,
                    -1 => Direction::Decreasing,
                    _ => Direction::Constant,
                },
                _ => match f_hi.cmp(&f_lo) {
                    std::cmp::Ordering::Greater => Direction::Increasing,
                    std::cmp::Ordering::Less => Direction::Decreasing,
                    std::cmp::Ordering::Equal => Direction::Constant,
                },
            };
            runs.push(Run {
                lo: w[0].clone(),
                hi: w[1].clone(),
                f_lo,
                f_hi,
                direction,
                piece: i,
            });
        }
    }

    let mut segments: Vec<Segment> = Vec::new();
    for r in &runs {
        match segments.last_mut() {
            Some(s) if s.direction == r.direction => {
                s.hi = r.hi.clone();
                s.f_hi = r.f_hi.clone();
            }
            _ => segments.push(Segment {
                lo: r.lo.clone(),
                hi: r.hi.clone(),
                f_lo: r.f_lo.clone(),
                f_hi: r.f_hi.clone(),
                direction: r.direction,
            }),
        }
    }
    Ok(MonotoneSegmentation {
        segments,
        maximal: true,
        runs,
    })
}

impl FunctionModel {
    /// The maximal monotone segmentation (cloned from the cache).
    pub fn monotone_segments(&self) -> Result<MonotoneSegmentation> {
        self.segmentation().cloned()
    }

    /// Solves `F(x) = y` on a monotone, non-constant run whose endpoint
    /// values bracket `y`.
    pub(crate) fn solve_on_run(&self, run: &Run, y: &Real) -> Real {
        if *y == run.f_lo {
            return run.lo.clone();
        }
        if *y == run.f_hi {
            return run.hi.clone();
        }
        let piece = &self.pieces[run.piece];
        if let PieceKind::Linear { slope, intercept } = &piece.kind {
            let x = (y - intercept) / slope;
            return x.max(run.lo.clone()).min(run.hi.clone());
        }
        let target = y.to_f64();
        let increasing = run.direction == Direction::Increasing;
        let x = roots::bisect(
            |x| {
                let v = piece.eval_f64(x) - target;
                if increasing {
                    v
                } else {
                    -v
                }
            },
            run.lo.to_f64(),
            run.hi.to_f64(),
        );
        Real::Float(x)
    }

    /// The relatively open components of `F^{-1}((c, d))`, sorted.
    pub fn preimage_interval(&self, c: &Real, d: &Real) -> Result<IntervalSet> {
        let seg = self.segmentation()?;
        let mut parts = Vec::new();
        if c >= d {
            return Ok(IntervalSet::empty());
        }
        for run in seg.runs() {
            let (lo_v, hi_v) = if run.f_lo <= run.f_hi {
                (&run.f_lo, &run.f_hi)
            } else {
                (&run.f_hi, &run.f_lo)
            };
            if run.direction == Direction::Constant {
                if lo_v > c && lo_v < d {
                    parts.push(Interval::closed(run.lo.clone(), run.hi.clone()));
                }
                continue;
            }
            if hi_v <= c || lo_v >= d {
                continue;
            }
            let x_c = if c >= lo_v {
                Some(self.solve_on_run(run, c))
            } else {
                None
            };
            let x_d = if d <= hi_v {
                Some(self.solve_on_run(run, d))
            } else {
                None
            };
            let (lo, lo_open, hi, hi_open) = match run.direction {
                Direction::Increasing => {
                    let (lo, lo_open) = match x_c {
                        Some(x) => (x, true),
                        None => (run.lo.clone(), false),
                    };
                    let (hi, hi_open) = match x_d {
                        Some(x) => (x, true),
                        None => (run.hi.clone(), false),
                    };
                    (lo, lo_open, hi, hi_open)
                }
                _ => {
                    let (lo, lo_open) = match x_d {
                        Some(x) => (x, true),
                        None => (run.lo.clone(), false),
                    };
                    let (hi, hi_open) = match x_c {
                        Some(x) => (x, true),
                        None => (run.hi.clone(), false),
                    };
                    (lo, lo_open, hi, hi_open)
                }
            };
            if lo < hi {
                parts.push(Interval::new(lo, hi, lo_open, hi_open));
            }
        }
        Ok(IntervalSet::from_intervals(parts))
    }

    /// Smallest and largest `x` in `[lo, hi]` with `F(x) = y`.
    pub fn level_set_extremes(
        &self,
        y: &Real,
        lo: &Real,
        hi: &Real,
    ) -> Result<Option<(Real, Real)>> {
        let seg = self.segmentation()?;
        let tol = self.tol();
        let mut best: Option<(Real, Real)> = None;
        let mut note = |x: Real| {
            best = Some(match best.take() {
                None => (x.clone(), x),
                Some((a, b)) => (a.min(x.clone()), b.max(x)),
            });
        };
        for run in seg.runs_meeting(lo, hi) {
            let l = run.lo.clone().max(lo.clone());
            let h = run.hi.clone().min(hi.clone());
            if l > h {
                continue;
            }
            let f_l = if l == run.lo {
                run.f_lo.clone()
            } else {
                self.eval_unchecked(&l)
            };
            let f_h = if h == run.hi {
                run.f_hi.clone()
            } else {
                self.eval_unchecked(&h)
            };
            if f_l.approx_eq(y, tol) {
                note(l.clone());
            }
            if f_h.approx_eq(y, tol) {
                note(h.clone());
            }
            if run.direction == Direction::Constant {
                continue;
            }
            let (mn, mx) = if f_l <= f_h {
                (&f_l, &f_h)
            } else {
                (&f_h, &f_l)
            };
            if y > mn && y < mx {
                let clipped = Run {
                    lo: l,
                    hi: h,
                    f_lo: f_l.clone(),
                    f_hi: f_h.clone(),
                    ..run.clone()
                };
                note(self.solve_on_run(&clipped, y));
            }
        }
        Ok(best)
    }
}
