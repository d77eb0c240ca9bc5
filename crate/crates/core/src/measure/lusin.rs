use serde::{Deserialize, Serialize};

use super::image::image_measure;
use super::{Interval, IntervalSet};
use crate::error::{Error, Result};
use crate::function_model::FunctionModel;
use crate::real::Real;

/// Sets `N_j` with `λ(N_j)` strictly decreasing to 0, standing in for a
/// null set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NullSetFamily {
    /// The level-`j` middle-thirds Cantor set: `2^j` closed intervals of
    /// relative length `3^-j`.
    CantorLevels,
    /// `count` intervals `[a + i w, a + i w + w rate^j]` with
    /// `w = (b - a) / count`.
    ShrinkingUniform { count: usize, rate: Real },
    /// Explicit levels; level `j` is `levels[j - 1]`.
    Custom { levels: Vec<IntervalSet> },
}

impl NullSetFamily {
    /// Level `j >= 1` placed inside `[a, b]`.
    pub fn level(&self, j: u32, a: &Real, b: &Real) -> IntervalSet {
        match self {
            NullSetFamily::CantorLevels => {
                let mut ivs = vec![(Real::zero(), Real::one())];
                let three = Real::int(3);
                for _ in 0..j {
                    ivs = ivs
                        .into_iter()
                        .flat_map(|(lo, hi)| {
                            let third = (&hi - &lo) / &three;
                            let l1 = &lo + &third;
                            let h0 = &hi - &third;
                            [(lo, l1), (h0, hi)]
                        })
                        .collect();
                }
                IntervalSet::from_intervals(
                    ivs.into_iter()
                        .map(|(l, h)| Interval::closed(l, h))
                        .collect(),
                )
                .scale_unit_into(a, b)
            }
            NullSetFamily::ShrinkingUniform { count, rate } => {
                let m = (*count).max(1);
                let w = (b - a) / &Real::int(m as i64);
                let len = &w * &rate.powi(j);
                IntervalSet::from_intervals(
                    (0..m)
                        .map(|i| {
                            let lo = a + &(&w * &Real::int(i as i64));
                            let hi = &lo + &len;
                            Interval::closed(lo, hi)
                        })
                        .collect(),
                )
            }
            NullSetFamily::Custom { levels } => levels
                .get((j as usize).saturating_sub(1))
                .cloned()
                .unwrap_or_default(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NullSetFamily::CantorLevels => "cantor",
            NullSetFamily::ShrinkingUniform { .. } => "shrinking_uniform",
            NullSetFamily::Custom { .. } => "custom",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let NullSetFamily::ShrinkingUniform { rate, .. } = self {
            if *rate <= Real::zero() || *rate >= Real::one() {
                return Err(Error::Precondition(format!(
                    "shrinking rate {rate} must lie in (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LusinVerdict {
    PassesAtResolution,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LusinLevel {
    pub level: u32,
    pub measure: Real,
    pub image_measure: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LusinReport {
    pub family: String,
    pub levels: Vec<LusinLevel>,
    pub verdict: LusinVerdict,
    pub threshold: Real,
}

/// Tabulates `(λ(N_j), λ(F(N_j)))` for `j = 1..=max_level`.
///
/// The verdict is `fails` when every image measure stays at or above
/// `threshold` while `λ(N_j)` decreases; `passes_at_resolution` when the last
/// image measure is below the threshold and has dropped from the first (or
/// is zero); `inconclusive` otherwise.
pub fn lusin_probe(
    model: &FunctionModel,
    family: &NullSetFamily,
    max_level: u32,
    threshold: &Real,
) -> Result<LusinReport> {
    family.validate()?;
    let (a, b) = model.domain();
    let mut levels = Vec::new();
    for j in 1..=max_level {
        let n = family.level(j, &a, &b);
        levels.push(LusinLevel {
            level: j,
            measure: n.measure().clone(),
            image_measure: image_measure(model, &n)?,
        });
    }
    let shrinking = levels.windows(2).all(|w| w[1].measure < w[0].measure);
    let verdict = match (levels.first(), levels.last()) {
        (Some(first), Some(last)) => {
            if shrinking && levels.iter().all(|l| l.image_measure >= *threshold) {
                LusinVerdict::Fails
            } else if last.image_measure < *threshold
                && (last.image_measure.is_zero() || last.image_measure < first.image_measure)
            {
                LusinVerdict::PassesAtResolution
            } else {
                LusinVerdict::Inconclusive
            }
        }
        _ => LusinVerdict::Inconclusive,
    };
    Ok(LusinReport {
        family: family.name().to_string(),
        levels,
        verdict,
        threshold: threshold.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::build_cantor_iterate;

    #[test]
    fn cantor_probe_fails() {
        let c = build_cantor_iterate(8);
        let r = lusin_probe(&c, &NullSetFamily::CantorLevels, 8, &Real::ratio(1, 2)).unwrap();
        assert_eq!(r.verdict, LusinVerdict::Fails);
        for l in &r.levels {
            assert_eq!(l.measure, Real::ratio(2, 3).powi(l.level));
            assert_eq!(l.image_measure, Real::one());
        }
    }

    #[test]
    fn square_probe_passes() {
        let sq = FunctionModel::polynomial(vec![0.0, 0.0, 1.0], Real::zero(), Real::one());
        let fam = NullSetFamily::ShrinkingUniform {
            count: 1,
            rate: Real::ratio(1, 2),
        };
        let r = lusin_probe(&sq, &fam, 8, &Real::ratio(1, 2)).unwrap();
        assert_eq!(r.verdict, LusinVerdict::PassesAtResolution);
        for l in &r.levels {
            assert_eq!(l.image_measure.to_f64(), 4f64.powi(-(l.level as i32)));
        }
    }

    #[test]
    fn identity_image_equals_measure() {
        let id = FunctionModel::identity(Real::zero(), Real::one());
        let fam = NullSetFamily::ShrinkingUniform {
            count: 5,
            rate: Real::ratio(1, 3),
        };
        let r = lusin_probe(&id, &fam, 6, &Real::ratio(1, 2)).unwrap();
        assert!(r.levels.iter().all(|l| l.measure == l.image_measure));
        assert_eq!(r.verdict, LusinVerdict::PassesAtResolution);
    }

    #[test]
    fn family_json() {
        let fam: NullSetFamily =
            serde_json::from_str(r#"{"kind": "shrinking_uniform", "count": 4, "rate": "1/2"}"#)
                .unwrap();
        assert_eq!(
            fam,
            NullSetFamily::ShrinkingUniform {
                count: 4,
                rate: Real::ratio(1, 2)
            }
        );
    }
}
