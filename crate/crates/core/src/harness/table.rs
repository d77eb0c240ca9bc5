use rayon::prelude::*;
use serde::Serialize;

use super::corpus::{Corpus, CorpusEntry, Truth};
use crate::error::{Error, Result};
use crate::evaluable::uniform_grid;
use crate::function_model::{FunctionModel, DEFAULT_X_MIN};
use crate::measure::{lusin_probe, LusinVerdict};
use crate::real::Real;
use crate::reconstruction::{
    ac_modulus, bv_density, default_window, density_grid, reconstruction_error, AcVerdict,
    ReconstructionReport,
};
use crate::variation::{total_variation, VariationFunction};

/// Samples per plotted curve.
pub const PLOT_SAMPLES: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// Cells of the density grid.
    pub grid_cells: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig { grid_cells: 4096 }
    }
}

/// Measured flags; `None` when the check errored or was inconclusive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Measured {
    pub continuous: Option<bool>,
    pub bv: Option<bool>,
    pub lusin: Option<bool>,
    pub ac: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub continuous: bool,
    pub bv: bool,
    pub lusin: bool,
    pub ac: bool,
    /// Measured `ac` equals measured `continuous ∧ bv ∧ lusin`.
    pub equivalence: bool,
    /// Measured variation matches the expected value, when one is given.
    pub variation: bool,
    pub all: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationSummary {
    pub lower: Real,
    /// Absent when no finite upper bound is known.
    pub upper: Option<Real>,
    pub exact: bool,
}

/// Sampled curves for plotting, on the working model.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Curves {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub p: Option<Vec<f64>>,
    pub n: Option<Vec<f64>>,
    /// `(x_j, f(x_j))` on the density grid.
    pub density: Option<(Vec<f64>, Vec<f64>)>,
    /// `(δ, ω(δ))`.
    pub omega: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub name: String,
    pub truth: Truth,
    pub measured: Measured,
    pub agreement: Agreement,
    /// The oscillation was cut at `x_min` before the grid-based checks.
    pub truncated: bool,
    pub variation: Option<VariationSummary>,
    pub lusin_verdict: Option<LusinVerdict>,
    pub ac_verdict: Option<AcVerdict>,
    pub reconstruction: Option<ReconstructionReport>,
    pub errors: Vec<String>,
    #[serde(skip)]
    pub curves: Curves,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceTable {
    pub config: RunConfig,
    pub rows: Vec<TableRow>,
    pub all_agree: bool,
}

impl EquivalenceTable {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn disagreements(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| !r.agreement.all)
            .map(|r| r.name.as_str())
            .collect()
    }
}

/// Runs the continuity, variation, Lusin, AC-modulus and reconstruction
/// checks on every entry and compares them with the ground truth. Entries
/// run in parallel; a failing check only marks its own row.
pub fn run_corpus(corpus: &Corpus, config: &RunConfig) -> EquivalenceTable {
    let mut rows: Vec<TableRow> = corpus
        .entries
        .par_iter()
        .map(|e| run_entry(e, config))
        .collect();
    rows.sort_by(|a, b| a.name.cmp(&b.name));
    let all_agree = rows.iter().all(|r| r.agreement.all);
    EquivalenceTable {
        config: config.clone(),
        rows,
        all_agree,
    }
}

fn note<T>(errors: &mut Vec<String>, what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("{what}: {e}"));
            None
        }
    }
}

pub fn run_entry(entry: &CorpusEntry, config: &RunConfig) -> TableRow {
    let mut errors = Vec::new();
    let mut row = TableRow {
        name: entry.name.clone(),
        truth: entry.truth,
        measured: Measured::default(),
        agreement: compare(&entry.truth, &Measured::default(), false),
        truncated: false,
        variation: None,
        lusin_verdict: None,
        ac_verdict: None,
        reconstruction: None,
        errors: Vec::new(),
        curves: Curves::default(),
    };
    let Some(model) = note(&mut errors, "model", entry.model.build()) else {
        row.errors = errors;
        return row;
    };
    let mut m = Measured {
        continuous: Some(model.find_discontinuity().is_none()),
        ..Measured::default()
    };

    let mut variation_ok = entry.expected_variation.is_none();
    match total_variation(&model, model.b(), model.tol()) {
        Ok(v) => {
            if let Some(expected) = &entry.expected_variation {
                variation_ok = if model.is_exact() && v.is_exact() {
                    v.lower == *expected
                } else {
                    v.lower.approx_eq(expected, 10.0 * model.tol())
                };
            }
            m.bv = Some(true);
            row.variation = Some(VariationSummary {
                exact: v.is_exact(),
                lower: v.lower,
                upper: Some(v.upper),
            });
        }
        Err(Error::UnresolvedOscillation { lower_bound, tail }) => {
            m.bv = Some(true);
            row.variation = Some(VariationSummary {
                upper: tail.upper.clone().map(|u| &lower_bound - &tail.lower + u),
                lower: lower_bound,
                exact: false,
            });
        }
        Err(Error::NotBv { lower_bound }) => {
            m.bv = Some(false);
            row.variation = Some(VariationSummary {
                lower: lower_bound,
                upper: None,
                exact: false,
            });
        }
        Err(e) => errors.push(format!("variation: {e}")),
    }

    let work = if model.has_unresolved_oscillation() {
        row.truncated = true;
        note(&mut errors, "truncate", model.truncate(DEFAULT_X_MIN))
    } else {
        Some(model.clone())
    };

    let ac = ac_modulus(&model, &entry.deltas, &entry.ac_threshold);
    if let Some(r) = note(&mut errors, "ac_modulus", ac) {
        m.ac = match r.verdict {
            AcVerdict::AcAtResolution => Some(true),
            AcVerdict::NotAc => Some(false),
            AcVerdict::Inconclusive => None,
        };
        row.ac_verdict = Some(r.verdict);
        row.curves.omega = r
            .samples
            .iter()
            .map(|s| (s.delta.to_f64(), s.omega.to_f64()))
            .collect();
    }

    if let Some(work) = &work {
        let probe = lusin_probe(
            work,
            &entry.lusin.family,
            entry.lusin.levels,
            &entry.lusin.threshold,
        );
        if let Some(r) = note(&mut errors, "lusin_probe", probe) {
            m.lusin = match r.verdict {
                LusinVerdict::PassesAtResolution => Some(true),
                LusinVerdict::Fails => Some(false),
                LusinVerdict::Inconclusive => None,
            };
            row.lusin_verdict = Some(r.verdict);
        }
        if let Some(c) = note(&mut errors, "curves", sample(work)) {
            row.curves.x = c.0;
            row.curves.f = c.1;
        }
        if m.bv == Some(true) {
            if let Some((p, n)) = note(&mut errors, "decomposition", sample_pn(work, &row.curves.x))
            {
                row.curves.p = Some(p);
                row.curves.n = Some(n);
            }
            let grid = density_grid(work, config.grid_cells);
            let density =
                default_window(&grid).and_then(|h| bv_density(work, &grid, &h, work.tol()));
            if let Some(d) = note(&mut errors, "bv_density", density) {
                row.curves.density = Some((
                    d.grid.iter().map(Real::to_f64).collect(),
                    d.values.iter().map(Real::to_f64).collect(),
                ));
                row.reconstruction = note(
                    &mut errors,
                    "reconstruction",
                    reconstruction_error(work, &d),
                );
            }
        }
    }

    row.measured = m;
    row.agreement = compare(&entry.truth, &m, variation_ok);
    row.errors = errors;
    row
}

fn compare(truth: &Truth, m: &Measured, variation: bool) -> Agreement {
    let continuous = m.continuous == Some(truth.continuous);
    let bv = m.bv == Some(truth.bv);
    let lusin = m.lusin == Some(truth.lusin);
    let ac = m.ac == Some(truth.ac);
    let equivalence = match (m.continuous, m.bv, m.lusin, m.ac) {
        (Some(c), Some(b), Some(l), Some(a)) => a == (c && b && l),
        _ => false,
    };
    Agreement {
        continuous,
        bv,
        lusin,
        ac,
        equivalence,
        variation,
        all: continuous && bv && lusin && ac && equivalence && variation,
    }
}

fn sample(model: &FunctionModel) -> Result<(Vec<f64>, Vec<f64>)> {
    let (a, b) = model.domain();
    let xs: Vec<f64> = uniform_grid(&a, &b, PLOT_SAMPLES - 1)
        .iter()
        .map(Real::to_f64)
        .collect();
    let fs = xs.iter().map(|&x| model.eval_f64(x)).collect();
    Ok((xs, fs))
}

fn sample_pn(model: &FunctionModel, xs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let v = VariationFunction::new(model, model.tol())?;
    let (pm, nm) = (v.p_model()?, v.n_model()?);
    Ok((
        xs.iter().map(|&x| pm.eval_f64(x)).collect(),
        xs.iter().map(|&x| nm.eval_f64(x)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::default_corpus;

    #[test]
    fn default_corpus_agrees() {
        let t = run_corpus(&default_corpus(), &RunConfig::default());
        for r in &t.rows {
            assert!(
                r.agreement.all,
                "{}: {:?} {:?} {:?}",
                r.name, r.measured, r.agreement, r.errors
            );
        }
        assert!(t.all_agree);
        let names: Vec<&str> = t.rows.iter().map(|r| r.name.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn empty_corpus_is_an_empty_agreeing_table() {
        let t = run_corpus(&Corpus::default(), &RunConfig::default());
        assert!(t.rows.is_empty() && t.all_agree);
    }

    #[test]
    fn wrong_truth_is_a_disagreement() {
        let mut c = default_corpus();
        c.entries
            .retain(|e| e.name == "cantor_2" || e.name == "identity");
        // consistent but wrong: claims the Cantor iterate is Lusin and AC
        let e = c.entries.iter_mut().find(|e| e.name == "cantor_2").unwrap();
        e.truth.lusin = true;
        e.truth.ac = true;
        let t = run_corpus(&c, &RunConfig::default());
        assert!(!t.all_agree);
        assert_eq!(t.disagreements(), vec!["cantor_2"]);
    }

    #[test]
    fn broken_entry_is_isolated() {
        let mut c = default_corpus();
        c.entries
            .retain(|e| e.name == "identity" || e.name == "zigzag");
        c.entries[1].deltas.clear();
        let t = run_corpus(&c, &RunConfig::default());
        assert!(t.rows[0].agreement.all);
        assert!(!t.rows[1].agreement.all);
        assert!(t.rows[1].errors.iter().any(|e| e.starts_with("ac_modulus")));
    }
}
