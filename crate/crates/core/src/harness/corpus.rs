use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_model::{FunctionSpec, PieceKindSpec, PieceSpec};
use crate::measure::NullSetFamily;
use crate::real::Real;

/// Ground-truth flags for one corpus function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    pub continuous: bool,
    pub bv: bool,
    pub lusin: bool,
    pub ac: bool,
}

impl Truth {
    /// `ac` holds exactly when the other three do.
    pub fn is_consistent(&self) -> bool {
        self.ac == (self.continuous && self.bv && self.lusin)
    }
}

/// How the Lusin column is probed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LusinSetup {
    pub family: NullSetFamily,
    pub levels: u32,
    pub threshold: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub model: FunctionSpec,
    pub truth: Truth,
    /// Where the truth flags come from.
    #[serde(default)]
    pub notes: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_variation: Option<Real>,
    pub lusin: LusinSetup,
    pub deltas: Vec<Real>,
    pub ac_threshold: Real,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn from_json(text: &str) -> Result<Corpus> {
        let c: Corpus = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Corpus> {
        Corpus::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Names are unique and every truth row is consistent.
    pub fn validate(&self) -> Result<()> {
        let mut names: Vec<&str> = self.entries.iter().map(|e| e.name.as_str()).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidModel(format!(
                "duplicate corpus entry {}",
                w[0]
            )));
        }
        for e in &self.entries {
            if !e.truth.is_consistent() {
                return Err(Error::InvalidModel(format!(
                    "{}: ground truth has ac = {} but continuous ∧ bv ∧ lusin = {}",
                    e.name,
                    e.truth.ac,
                    e.truth.continuous && e.truth.bv && e.truth.lusin
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

fn q(n: i64, d: i64) -> Real {
    Real::ratio(n, d)
}

fn piece(kind: PieceKindSpec, lo: Real, hi: Real) -> PieceSpec {
    PieceSpec {
        kind,
        domain: [lo, hi],
    }
}

fn linear(slope: Real, intercept: Real, lo: Real, hi: Real) -> PieceSpec {
    piece(PieceKindSpec::Linear { slope, intercept }, lo, hi)
}

fn poly(coefficients: &[i64], lo: Real, hi: Real) -> PieceSpec {
    piece(
        PieceKindSpec::Polynomial {
            coefficients: coefficients.iter().map(|&c| Real::int(c)).collect(),
        },
        lo,
        hi,
    )
}

fn spec(pieces: Vec<PieceSpec>) -> FunctionSpec {
    FunctionSpec {
        domain: [
            pieces[0].domain[0].clone(),
            pieces[pieces.len() - 1].domain[1].clone(),
        ],
        arithmetic: None,
        tol: None,
        pieces,
    }
}

/// `(2/3)^j` for `j = 1..=n`.
fn two_thirds(n: i32) -> Vec<Real> {
    (1..=n).map(|j| q(2, 3).powi(j as u32)).collect()
}

const ALL: Truth = Truth {
    continuous: true,
    bv: true,
    lusin: true,
    ac: true,
};

struct Draft {
    name: &'static str,
    model: FunctionSpec,
    truth: Truth,
    notes: &'static str,
    expected_variation: Option<Real>,
}

fn finish(d: Draft) -> CorpusEntry {
    CorpusEntry {
        name: d.name.into(),
        model: d.model,
        truth: d.truth,
        notes: d.notes.into(),
        expected_variation: d.expected_variation,
        lusin: LusinSetup {
            family: NullSetFamily::ShrinkingUniform {
                count: 16,
                rate: q(1, 2),
            },
            levels: 8,
            threshold: q(1, 2),
        },
        deltas: two_thirds(16),
        ac_threshold: q(1, 2),
    }
}

/// The built-in corpus: polynomials and piecewise-linear maps (all four
/// properties), Cantor iterates (continuous and BV, sending Cantor levels
/// onto the full range), and the two oscillating `x^p sin(1/x)` maps.
pub fn default_corpus() -> Corpus {
    let (zero, one) = (Real::zero(), Real::one());
    let mut entries = vec![
        finish(Draft {
            name: "identity",
            model: spec(vec![linear(
                one.clone(),
                zero.clone(),
                zero.clone(),
                one.clone(),
            )]),
            truth: ALL,
            notes: "Lipschitz",
            expected_variation: Some(one.clone()),
        }),
        finish(Draft {
            name: "neg_identity",
            model: spec(vec![linear(
                Real::int(-1),
                zero.clone(),
                zero.clone(),
                one.clone(),
            )]),
            truth: ALL,
            notes: "Lipschitz",
            expected_variation: Some(one.clone()),
        }),
        finish(Draft {
            name: "square",
            model: spec(vec![poly(&[0, 0, 1], zero.clone(), one.clone())]),
            truth: ALL,
            notes: "C^1 on a compact interval",
            expected_variation: Some(one.clone()),
        }),
        finish(Draft {
            name: "square_sym",
            model: spec(vec![poly(&[0, 0, 1], Real::int(-1), one.clone())]),
            truth: ALL,
            notes: "C^1 on a compact interval",
            expected_variation: Some(Real::int(2)),
        }),
        finish(Draft {
            name: "cube",
            model: spec(vec![poly(&[0, 0, 0, 1], Real::int(-1), one.clone())]),
            truth: ALL,
            notes: "C^1 on a compact interval",
            expected_variation: Some(Real::int(2)),
        }),
        finish(Draft {
            name: "zigzag",
            model: spec(vec![
                linear(Real::int(4), zero.clone(), zero.clone(), q(1, 4)),
                linear(Real::int(-4), Real::int(2), q(1, 4), q(1, 2)),
                linear(Real::int(4), Real::int(-2), q(1, 2), q(3, 4)),
                linear(Real::int(-4), Real::int(4), q(3, 4), one.clone()),
            ]),
            truth: ALL,
            notes: "piecewise linear, slope 4",
            expected_variation: Some(Real::int(4)),
        }),
        finish(Draft {
            name: "mixed",
            model: spec(vec![
                poly(&[0, 0, 1], zero.clone(), one.clone()),
                linear(Real::int(-2), Real::int(3), one.clone(), q(3, 2)),
                piece(
                    PieceKindSpec::Constant {
                        value: zero.clone(),
                    },
                    q(3, 2),
                    Real::int(2),
                ),
            ]),
            truth: ALL,
            notes: "piecewise C^1",
            expected_variation: Some(Real::int(2)),
        }),
        finish(Draft {
            name: "x_sin",
            model: spec(vec![piece(
                PieceKindSpec::XSinFamily {
                    exponent: 1.0,
                    scale: 1.0,
                    slope: 0.0,
                    offset: 0.0,
                    center: 0.0,
                },
                zero.clone(),
                one.clone(),
            )]),
            truth: Truth {
                continuous: true,
                bv: false,
                lusin: true,
                ac: false,
            },
            notes: "harmonic-series variation; differentiable off 0, so Lusin (N) holds",
            expected_variation: None,
        }),
        finish(Draft {
            name: "x2_sin",
            model: spec(vec![piece(
                PieceKindSpec::XSinFamily {
                    exponent: 2.0,
                    scale: 1.0,
                    slope: 0.0,
                    offset: 0.0,
                    center: 0.0,
                },
                zero.clone(),
                one.clone(),
            )]),
            truth: ALL,
            notes: "derivative bounded by 3",
            expected_variation: None,
        }),
    ];
    for k in [2u32, 4, 6, 8] {
        let mut e = finish(Draft {
            name: "",
            model: spec(vec![piece(
                PieceKindSpec::CantorIterate {
                    level: k,
                    range: None,
                },
                zero.clone(),
                one.clone(),
            )]),
            truth: Truth {
                continuous: true,
                bv: true,
                lusin: false,
                ac: false,
            },
            notes:
                "stands in for the Cantor function: level-j Cantor sets map onto [0, 1] for j <= k",
            expected_variation: Some(one.clone()),
        });
        e.name = format!("cantor_{k}");
        e.lusin = LusinSetup {
            family: NullSetFamily::CantorLevels,
            levels: k,
            threshold: q(1, 2),
        };
        e.deltas = two_thirds(k as i32);
        entries.push(e);
    }
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Corpus { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_corpus_is_consistent_and_builds() {
        let c = default_corpus();
        c.validate().unwrap();
        assert_eq!(c.entries.len(), 13);
        for e in &c.entries {
            e.model.build().unwrap();
        }
    }

    #[test]
    fn json_round_trip() {
        let c = default_corpus();
        let back = Corpus::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn inconsistent_truth_is_refused() {
        let mut c = default_corpus();
        c.entries[0].truth.ac = !c.entries[0].truth.ac;
        assert!(c.validate().is_err());
        let mut c = default_corpus();
        let dup = c.entries[0].clone();
        c.entries.push(dup);
        assert!(c.validate().is_err());
    }
}
