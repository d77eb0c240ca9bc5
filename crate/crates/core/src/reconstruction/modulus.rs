use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluable::uniform_grid;
use crate::function_model::{FunctionModel, PieceKind, DEFAULT_X_MIN};
use crate::measure::Interval;
use crate::real::Real;

/// Cells per domain used by the discretized profile for curved pieces.
pub const PROFILE_CELLS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AcVerdict {
    AcAtResolution,
    NotAc,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusSample {
    pub delta: Real,
    pub omega: Real,
    /// The non-overlapping intervals achieving `omega`.
    pub collection: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusReport {
    /// Sorted by increasing `delta`.
    pub samples: Vec<ModulusSample>,
    pub verdict: AcVerdict,
    pub threshold: Real,
    /// `omega` is exact (piecewise-linear model); otherwise each value is a
    /// lower bound achieved by its collection.
    pub exact: bool,
    /// The model oscillated without bound and was truncated first.
    pub truncated: bool,
    /// Upper bound on the variation of the removed tails, when finite.
    pub tail_variation: Option<Real>,
}

/// Cells with `(lo, hi, |ΔF|)`, each inside one monotone run.
#[allow(clippy::type_complexity)]
fn profile(model: &FunctionModel) -> Result<(Vec<(Real, Real, Real)>, bool)> {
    let seg = model.segmentation()?;
    let exact = model.pieces().iter().all(|p| {
        matches!(
            p.kind,
            PieceKind::Linear { .. } | PieceKind::Constant { .. }
        )
    });
    let mut cells = Vec::new();
    if exact {
        for r in seg.runs() {
            cells.push((r.lo.clone(), r.hi.clone(), r.rise()));
        }
    } else {
        let (a, b) = model.domain();
        let mut cuts = uniform_grid(&a, &b, PROFILE_CELLS);
        cuts.extend(seg.runs().iter().map(|r| r.lo.clone()));
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let rise = (model.evaluate(&w[1])? - model.evaluate(&w[0])?).abs();
            cells.push((w[0].clone(), w[1].clone(), rise));
        }
    }
    Ok((cells, exact))
}

/// `ω(δ)` by greedy allocation of length to the steepest cells; the cell
/// that does not fit is used from its left end.
fn greedy(
    model: &FunctionModel,
    cells: &[(Real, Real, Real)],
    order: &[usize],
    delta: &Real,
) -> Result<ModulusSample> {
    let mut left = delta.clone();
    let mut omega = Real::zero();
    let mut collection = Vec::new();
    for &i in order {
        if left <= Real::zero() {
            break;
        }
        let (lo, hi, rise) = &cells[i];
        if rise.is_zero() {
            break;
        }
        let len = hi - lo;
        if len <= left {
            omega = omega + rise;
            left = left - len;
            collection.push(Interval::closed(lo.clone(), hi.clone()));
        } else {
            let end = lo + &left;
            omega = omega + (model.evaluate(&end)? - model.evaluate(lo)?).abs();
            collection.push(Interval::closed(lo.clone(), end));
            left = Real::zero();
        }
    }
    collection.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(ModulusSample {
        delta: delta.clone(),
        omega,
        collection,
    })
}

/// The absolute-continuity modulus
/// `ω(δ) = sup Σ |F(b_i) - F(a_i)|` over non-overlapping collections with
/// `Σ (b_i - a_i) <= δ`.
///
/// The verdict is `not_ac` when `ω >= threshold` on every `δ` in the smaller
/// half of the schedule, `ac_at_resolution` when `ω(δ_min) < threshold` and
/// `ω(δ_min)/δ_min <= 2 ω(δ_max)/δ_max` (the modulus shrinks in proportion
/// to `δ`), and `inconclusive` otherwise. After truncation the removed
/// tails' variation bound is added to `ω(δ_min)` before comparing, and
/// `ac_at_resolution` needs that bound to be finite.
pub fn ac_modulus(
    model: &FunctionModel,
    deltas: &[Real],
    threshold: &Real,
) -> Result<ModulusReport> {
    if deltas.is_empty() || deltas.iter().any(|d| *d <= Real::zero()) {
        return Err(Error::Precondition(
            "the δ schedule needs positive entries".into(),
        ));
    }
    let (work, truncated) = if model.has_unresolved_oscillation() {
        (model.truncate(DEFAULT_X_MIN)?, true)
    } else {
        (model.clone(), false)
    };
    let tail_variation = if truncated {
        model
            .tail_bounds(DEFAULT_X_MIN)
            .into_iter()
            .try_fold(Real::zero(), |acc, t| t.upper.map(|u| acc + u))
    } else {
        Some(Real::zero())
    };
    let model = work;
    let (cells, exact) = profile(&model)?;
    let slope = |c: &(Real, Real, Real)| c.2.clone() / (&c.1 - &c.0);
    let slopes: Vec<Real> = cells.iter().map(slope).collect();
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&i, &j| slopes[j].cmp(&slopes[i]).then(i.cmp(&j)));

    let mut ds = deltas.to_vec();
    ds.sort();
    ds.dedup();
    let samples = ds
        .iter()
        .map(|d| greedy(&model, &cells, &order, d))
        .collect::<Result<Vec<_>>>()?;

    let exact = exact && !truncated;
    let tail = &samples[..samples.len().div_ceil(2)];
    let (first, last) = (&samples[0], &samples[samples.len() - 1]);
    let verdict = if tail.iter().all(|s| s.omega >= *threshold) {
        AcVerdict::NotAc
    } else if tail_variation
        .as_ref()
        .is_some_and(|t| &first.omega + t < *threshold)
        && &first.omega / &first.delta <= Real::int(2) * &last.omega / &last.delta
    {
        AcVerdict::AcAtResolution
    } else {
        AcVerdict::Inconclusive
    };
    Ok(ModulusReport {
        samples,
        verdict,
        threshold: threshold.clone(),
        exact,
        truncated,
        tail_variation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::build_cantor_iterate;

    fn q(n: i64, d: i64) -> Real {
        Real::ratio(n, d)
    }

    fn omega(r: &ModulusReport, d: &Real) -> Real {
        r.samples
            .iter()
            .find(|s| s.delta == *d)
            .unwrap()
            .omega
            .clone()
    }

    #[test]
    fn identity_and_zigzag_are_exact() {
        let id = FunctionModel::identity(Real::zero(), Real::one());
        let ds = [q(1, 10), q(1, 3), q(1, 1000)];
        let r = ac_modulus(&id, &ds, &q(1, 2)).unwrap();
        assert!(r.exact);
        for d in &ds {
            assert_eq!(omega(&r, d), d.clone());
        }
        assert_eq!(r.verdict, AcVerdict::AcAtResolution);

        let z = crate::variation::tests::zigzag();
        let r = ac_modulus(&z, &[q(1, 7), q(1, 1), q(1, 1000)], &q(1, 2)).unwrap();
        assert_eq!(omega(&r, &q(1, 7)), q(4, 7));
        assert_eq!(omega(&r, &q(1, 1)), Real::int(4));
    }

    #[test]
    fn cantor_is_pinned_at_one() {
        for k in 1..=8u32 {
            let c = build_cantor_iterate(k);
            let ds: Vec<Real> = (1..=k).map(|j| q(2, 3).powi(j)).collect();
            let r = ac_modulus(&c, &ds, &q(1, 2)).unwrap();
            assert_eq!(omega(&r, &q(2, 3).powi(k)), Real::one());
            assert_eq!(r.verdict, AcVerdict::NotAc);
            let s = r
                .samples
                .iter()
                .find(|s| s.delta == q(2, 3).powi(k))
                .unwrap();
            assert_eq!(s.collection.len(), 1 << k);
        }
    }

    #[test]
    fn omega_is_monotone_and_collections_fit() {
        let cube =
            FunctionModel::polynomial(vec![0.0, -1.0, 0.0, 1.0], Real::int(-2), Real::int(2));
        let ds: Vec<Real> = (1..=12)
            .map(|j| Real::Float((2.0f64 / 3.0).powi(j)))
            .collect();
        let r = ac_modulus(&cube, &ds, &q(1, 2)).unwrap();
        assert!(!r.exact);
        for w in r.samples.windows(2) {
            assert!(w[0].omega <= w[1].omega);
        }
        for s in &r.samples {
            let total = Real::sum(
                s.collection
                    .iter()
                    .map(|c| c.length())
                    .collect::<Vec<_>>()
                    .iter(),
            );
            assert!(total.to_f64() <= s.delta.to_f64() + 1e-15);
            for w in s.collection.windows(2) {
                assert!(w[0].hi <= w[1].lo);
            }
        }
    }

    #[test]
    fn oscillation_gives_lower_bounds() {
        let xs = FunctionModel::x_sin(1.0, Real::zero(), Real::one()).unwrap();
        let ds: Vec<Real> = (1..=16)
            .map(|j| Real::Float((2.0f64 / 3.0).powi(j)))
            .collect();
        let r = ac_modulus(&xs, &ds, &q(1, 2)).unwrap();
        assert!(r.truncated && !r.exact);
        assert_eq!(r.verdict, AcVerdict::NotAc);
    }

    #[test]
    fn square_oscillation_is_ac_with_tail_bound() {
        let xs = FunctionModel::x_sin(2.0, Real::zero(), Real::one()).unwrap();
        let ds: Vec<Real> = (1..=16)
            .map(|j| Real::Float((2.0f64 / 3.0).powi(j)))
            .collect();
        let r = ac_modulus(&xs, &ds, &q(1, 2)).unwrap();
        assert!(r.truncated);
        assert!(r.tail_variation.as_ref().unwrap().to_f64() < 1e-3);
        assert_eq!(r.verdict, AcVerdict::AcAtResolution);
    }
}
