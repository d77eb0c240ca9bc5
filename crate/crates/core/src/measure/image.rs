use crate::error::{Error, Result};
use crate::function_model::{Direction, FunctionModel};
use crate::measure::{Interval, IntervalSet};
use crate::real::Real;

/// `F(E)` as a finite union of intervals, built by pushing `E` through each
/// monotone run.
pub fn image_set(model: &FunctionModel, e: &IntervalSet) -> Result<IntervalSet> {
    let seg = model.segmentation()?;
    let mut images = Vec::new();
    for comp in e.components() {
        let Some(comp) = comp.intersect(&Interval::closed(model.a().clone(), model.b().clone()))
        else {
            continue;
        };
        for run in seg.runs_meeting(&comp.lo, &comp.hi) {
            let Some(part) = comp.intersect(&Interval::closed(run.lo.clone(), run.hi.clone()))
            else {
                continue;
            };
            let f_l = if part.lo == run.lo {
                run.f_lo.clone()
            } else {
                model.eval_unchecked(&part.lo)
            };
            let f_h = if part.hi == run.hi {
                run.f_hi.clone()
            } else {
                model.eval_unchecked(&part.hi)
            };
            let iv = match run.direction {
                Direction::Constant => Interval::point(f_l),
                Direction::Increasing => Interval::new(f_l, f_h, part.lo_open, part.hi_open),
                Direction::Decreasing => Interval::new(f_h, f_l, part.hi_open, part.lo_open),
            };
            images.push(iv);
        }
    }
    Ok(IntervalSet::from_intervals(images))
}

/// `λ(F(E))`, the measure `ν(E)`.
pub fn image_measure(model: &FunctionModel, e: &IntervalSet) -> Result<Real> {
    Ok(image_set(model, e)?.measure().clone())
}

/// Disjoint open intervals `{J_k}` covering `F(E)` with total measure below
/// `λ(F(E)) + slack`.
pub fn cover_image(model: &FunctionModel, e: &IntervalSet, slack: &Real) -> Result<IntervalSet> {
    if *slack <= Real::zero() {
        return Err(Error::Precondition(format!(
            "cover slack must be positive, got {slack}"
        )));
    }
    Ok(image_set(model, e)?.open_cover(slack))
}
