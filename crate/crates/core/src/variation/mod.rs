//! Total variation, the variation function `p`, the Jordan decomposition
//! `F = p - n`, and the uniform approximants `u_ε` of `p`.

mod approx;
mod decomposition;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_model::{Direction, FunctionModel, DEFAULT_X_MIN};
use crate::real::Real;

pub use approx::{
    coarsened_partition, uniform_approx, uniform_approx_with_partition, UniformApprox,
};
pub use decomposition::{
    jordan_decomposition, Decomposition, NegativeVariation, VariationFunction,
};

/// Hard cap on refinement partitions.
pub const MAX_REFINEMENT_POINTS: usize = 1 << 20;

/// A strictly increasing list of points. A single point stands for the
/// degenerate partition of `[a, a]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Real>", into = "Vec<Real>")]
pub struct Partition(Vec<Real>);

impl Partition {
    pub fn new(points: Vec<Real>) -> Result<Partition> {
        if points.is_empty() {
            return Err(Error::InvalidPartition(
                "a partition needs at least one point".into(),
            ));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!(
                "points must increase strictly ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Partition(points))
    }

    pub fn points(&self) -> &[Real] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> &Real {
        &self.0[0]
    }

    pub fn last(&self) -> &Real {
        &self.0[self.0.len() - 1]
    }

    /// Whether every point of `self` is also a point of `finer`.
    pub fn is_refined_by(&self, finer: &Partition) -> bool {
        self.0.iter().all(|p| finer.0.binary_search(p).is_ok())
    }
}

impl TryFrom<Vec<Real>> for Partition {
    type Error = Error;

    fn try_from(v: Vec<Real>) -> Result<Partition> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<Real> {
    fn from(p: Partition) -> Vec<Real> {
        p.0
    }
}

/// `|F(P)| = Σ |F(x_k) - F(x_{k-1})|`.
pub fn partition_sum(model: &FunctionModel, p: &Partition) -> Result<Real> {
    let values = p
        .points()
        .iter()
        .map(|x| model.evaluate(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(values
        .windows(2)
        .fold(Real::zero(), |acc, w| acc + (&w[1] - &w[0]).abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationEstimate {
    pub lower: Real,
    /// Infinite (`inf` float) when refinement did not converge.
    pub upper: Real,
    pub achieving_partition: Partition,
    pub converged: bool,
    /// `(partition size, |F(P)|)` per refinement round.
    pub refinement_trace: Vec<(usize, Real)>,
}

impl VariationEstimate {
    pub fn is_exact(&self) -> bool {
        self.converged && self.lower == self.upper
    }
}

/// `V_a^x(F)`.
///
/// With a finite monotone segmentation the value is exact: the sum of
/// `|ΔF|` over the runs clipped to `[a, x]`, achieved by the turning-point
/// partition (the smallest achieving partition, lexicographically first).
/// An oscillation accumulating inside `[a, x]` gives an error carrying a
/// lower bound.
pub fn total_variation(model: &FunctionModel, x: &Real, tol: f64) -> Result<VariationEstimate> {
    let a = model.a().clone();
    if !model.contains(x) {
        return Err(Error::OutOfDomain {
            x: x.clone(),
            a,
            b: model.b().clone(),
        });
    }
    let x = model.coerce(x);
    if x == a {
        return Ok(VariationEstimate {
            lower: Real::zero(),
            upper: Real::zero(),
            achieving_partition: Partition(vec![a]),
            converged: true,
            refinement_trace: vec![(1, Real::zero())],
        });
    }
    if model.has_unresolved_oscillation() {
        let head = model.restrict(&a, &x)?;
        if head.has_unresolved_oscillation() {
            return Err(unresolved(&head, tol));
        }
        return total_variation(&head, &x, tol);
    }
    let seg = model.segmentation()?;
    let mut sum = Real::zero();
    let mut points = vec![a];
    let mut heading: Option<Direction> = None;
    let mut candidate: Option<Real> = None;
    for run in seg.runs_meeting(model.a(), &x) {
        if run.lo >= x {
            break;
        }
        let (hi, f_hi) = if run.hi <= x {
            (run.hi.clone(), run.f_hi.clone())
        } else {
            (x.clone(), model.eval_unchecked(&x))
        };
        sum = sum + (&f_hi - &run.f_lo).abs();
        if run.direction == Direction::Constant {
            continue;
        }
        if let Some(h) = heading {
            if h != run.direction {
                points.push(candidate.take().expect("a monotone run preceded"));
            }
        }
        heading = Some(run.direction);
        candidate = Some(hi);
    }
    points.push(x);
    let achieving_partition = Partition::new(points)?;
    debug_assert!(
        !model.is_exact() || partition_sum(model, &achieving_partition)? == sum,
        "turning points must achieve the variation"
    );
    Ok(VariationEstimate {
        lower: sum.clone(),
        upper: sum.clone(),
        refinement_trace: vec![(achieving_partition.len(), sum)],
        achieving_partition,
        converged: true,
    })
}

fn unresolved(model: &FunctionModel, tol: f64) -> Error {
    let tails = model.tail_bounds(DEFAULT_X_MIN);
    let tail = tails
        .into_iter()
        .next()
        .expect("an accumulation point exists");
    let resolved = model
        .truncate(DEFAULT_X_MIN)
        .and_then(|t| total_variation(&t, t.b(), tol))
        .map(|v| v.lower)
        .unwrap_or_else(|_| Real::zero());
    let lower_bound = resolved + &tail.lower;
    if tail.upper.is_none() {
        Error::NotBv { lower_bound }
    } else {
        Error::UnresolvedOscillation {
            lower_bound,
            tail: Box::new(tail),
        }
    }
}

/// Dyadic refinement of `{a, x}`: every round bisects every cell, and the
/// search stops once two consecutive rounds gain at most `tol` (after at
/// least eight rounds) or the cap of [`MAX_REFINEMENT_POINTS`] is reached.
///
/// Independent of the segmentation, so it serves as an oracle for
/// [`total_variation`]. The upper bound `lower + tol` on convergence is a
/// heuristic, not a certificate.
pub fn refine_variation(model: &FunctionModel, x: &Real, tol: f64) -> Result<VariationEstimate> {
    let a = model.a().clone();
    if !model.contains(x) {
        return Err(Error::OutOfDomain {
            x: x.clone(),
            a,
            b: model.b().clone(),
        });
    }
    if *x == a {
        return total_variation(model, x, tol);
    }
    let mut cells = 1usize;
    let mut trace = Vec::new();
    let mut quiet_rounds = 0;
    let mut converged = false;
    let mut best = Real::zero();
    let mut best_points = vec![a.clone(), x.clone()];
    loop {
        let points = crate::evaluable::uniform_grid(&a, x, cells);
        let p = Partition::new(points)?;
        let s = partition_sum(model, &p)?;
        let gain = (&s - &best).to_f64();
        trace.push((p.len(), s.clone()));
        if s >= best {
            best = s;
            best_points = p.0;
        }
        if trace.len() > 1 {
            quiet_rounds = if gain <= tol { quiet_rounds + 1 } else { 0 };
        }
        if trace.len() >= 8 && quiet_rounds >= 2 {
            converged = true;
            break;
        }
        if cells * 2 + 1 > MAX_REFINEMENT_POINTS {
            break;
        }
        cells *= 2;
    }
    let upper = if converged {
        &best + &Real::Float(tol)
    } else {
        Real::Float(f64::INFINITY)
    };
    Ok(VariationEstimate {
        lower: best,
        upper,
        achieving_partition: Partition(best_points),
        converged,
        refinement_trace: trace,
    })
}
