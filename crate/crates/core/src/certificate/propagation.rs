use rayon::prelude::*;
use serde::Serialize;

use super::lemma22::lemma22_certificate;
use crate::error::{Error, Result};
use crate::function_model::FunctionModel;
use crate::measure::{image_measure, lusin_probe, LusinReport, LusinVerdict, NullSetFamily};
use crate::real::Real;

/// One `(level, ε)` run of the certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationRow {
    pub level: u32,
    pub epsilon: Real,
    pub n_measure: Real,
    pub f_image_measure: Real,
    /// `λ(p(N_j))` and `λ(n(N_j))`, exact where the model is.
    pub p_image_measure: Real,
    pub n_image_measure: Real,
    /// Largest per-cell cover measures, or `None` when the row was skipped.
    pub p_cover: Option<Real>,
    pub n_cover: Option<Real>,
    pub within_budget: Option<bool>,
    /// Why the certificate refused this row (its precondition failed).
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationReport {
    pub probe: LusinReport,
    pub rows: Vec<PropagationRow>,
    /// Every non-skipped row met the `5ε` / `9ε` budgets.
    pub all_within_budget: bool,
}

/// Runs the variation certificate over `levels` sets of `family` and every
/// `ε` in the schedule, recording how the covers of `p(N_j)` and `n(N_j)`
/// compare with `5ε` and `9ε`. Rows whose image `λ(F(N_j ∩ cell))` is not
/// below `ε` are marked skipped.
pub fn lusin_propagation_check(
    model: &FunctionModel,
    family: &NullSetFamily,
    levels: u32,
    eps_schedule: &[Real],
    threshold: &Real,
) -> Result<PropagationReport> {
    let probe = lusin_probe(model, family, levels, threshold)?;
    if probe.verdict == LusinVerdict::Fails {
        return Err(Error::Precondition(format!(
            "the model fails the Lusin probe on the {} family",
            family.name()
        )));
    }
    let p = crate::variation::VariationFunction::new(model, model.tol())?;
    let (p_model, n_model) = (p.p_model()?, p.n_model()?);
    let (a, b) = model.domain();
    let jobs: Vec<(u32, &Real)> = (1..=levels)
        .flat_map(|j| eps_schedule.iter().map(move |e| (j, e)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(j, eps)| -> Result<PropagationRow> {
            let n = family.level(j, &a, &b);
            let mut row = PropagationRow {
                level: j,
                epsilon: eps.clone(),
                n_measure: n.measure().clone(),
                f_image_measure: image_measure(model, &n)?,
                p_image_measure: image_measure(&p_model, &n)?,
                n_image_measure: image_measure(&n_model, &n)?,
                p_cover: None,
                n_cover: None,
                within_budget: None,
                skipped: None,
            };
            match lemma22_certificate(model, &n, eps) {
                Ok(t) => {
                    row.within_budget = Some(
                        t.holds
                            && t.max_p_cover < eps * &Real::int(5)
                            && t.max_n_cover < eps * &Real::int(9),
                    );
                    row.p_cover = Some(t.max_p_cover);
                    row.n_cover = Some(t.max_n_cover);
                }
                Err(Error::Precondition(why)) => row.skipped = Some(why),
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let all_within_budget = rows.iter().all(|r| r.within_budget != Some(false));
    Ok(PropagationReport {
        probe,
        rows,
        all_within_budget,
    })
}
