//! The JSON function spec file.
//!
//! ```json
//! {"domain": ["0", "1"], "arithmetic": "rational",
//!  "pieces": [{"kind": "linear", "params": {"slope": "3/2", "intercept": 0},
//!              "domain": ["0", "1/3"]}, ...]}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    cantor_pieces, ArithmeticMode, FunctionModel, Oscillation, Piece, PieceKind, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PieceKindSpec {
    Linear {
        slope: Real,
        intercept: Real,
    },
    Polynomial {
        coefficients: Vec<Real>,
    },
    /// The level-`level` Cantor iterate stretched over the piece domain,
    /// rising from `range[0]` to `range[1]` (default `[0, 1]`).
    CantorIterate {
        level: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[Real; 2]>,
    },
    XSinFamily {
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        slope: f64,
        #[serde(default)]
        offset: f64,
        /// Accumulation point of the oscillation.
        #[serde(default, skip_serializing_if = "is_zero")]
        center: f64,
    },
    Constant {
        value: Real,
    },
}

fn one() -> f64 {
    1.0
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    #[serde(flatten)]
    pub kind: PieceKindSpec,
    pub domain: [Real; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticSpec {
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub domain: [Real; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arithmetic: Option<ArithmeticSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub pieces: Vec<PieceSpec>,
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> Result<FunctionSpec> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<FunctionSpec> {
        FunctionSpec::from_json(&std::fs::read_to_string(path)?)
    }

    /// Builds the model. Without an explicit `arithmetic` field the mode
    /// is exact whenever every piece allows it.
    pub fn build(&self) -> Result<FunctionModel> {
        let mut pieces = Vec::new();
        for (i, ps) in self.pieces.iter().enumerate() {
            let [lo, hi] = ps.domain.clone();
            match &ps.kind {
                PieceKindSpec::Linear { slope, intercept } => {
                    pieces.push(Piece::linear(slope.clone(), intercept.clone(), lo, hi))
                }
                PieceKindSpec::Constant { value } => {
                    pieces.push(Piece::constant(value.clone(), lo, hi))
                }
                PieceKindSpec::Polynomial { coefficients } => pieces.push(Piece::new(
                    PieceKind::Polynomial {
                        coefficients: coefficients.iter().map(Real::to_f64).collect(),
                    },
                    lo,
                    hi,
                )),
                PieceKindSpec::CantorIterate { level, range } => {
                    let [y0, y1] = range.clone().unwrap_or([Real::zero(), Real::one()]);
                    if *level > 16 {
                        return Err(Error::InvalidModel(format!(
                            "piece {i}: cantor level {level} is too deep (max 16)"
                        )));
                    }
                    pieces.extend(cantor_pieces(*level, &lo, &hi, &y0, &y1));
                }
                PieceKindSpec::XSinFamily {
                    exponent,
                    scale,
                    slope,
                    offset,
                    center,
                } => {
                    let (l, h) = (lo.to_f64(), hi.to_f64());
                    let orientation = if h <= *center { -1.0 } else { 1.0 };
                    if l < *center && h > *center {
                        return Err(Error::InvalidModel(format!(
                            "piece {i}: x_sin_family domain must not straddle {center}"
                        )));
                    }
                    pieces.push(Piece::new(
                        PieceKind::Oscillating(Oscillation {
                            center: *center,
                            orientation,
                            exponent: *exponent,
                            scale: *scale,
                            slope: *slope,
                            offset: *offset,
                        }),
                        lo,
                        hi,
                    ));
                }
            }
        }
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        let model = match self.arithmetic {
            Some(ArithmeticSpec::Rational) => {
                FunctionModel::new(pieces, ArithmeticMode::ExactRational)?
            }
            Some(ArithmeticSpec::Float) => {
                FunctionModel::new(pieces, ArithmeticMode::FloatWithTol { tol })?
            }
            None => {
                let m = FunctionModel::auto(pieces)?;
                if m.is_exact() {
                    m
                } else {
                    m.to_float_mode(tol)
                }
            }
        };
        let [a, b] = &self.domain;
        if model.a() != a || model.b() != b {
            return Err(Error::InvalidModel(format!(
                "pieces cover [{}, {}] but the declared domain is [{a}, {b}]",
                model.a(),
                model.b()
            )));
        }
        Ok(model)
    }
}

impl FunctionModel {
    /// A spec describing this model piece by piece (Cantor iterates appear
    /// expanded).
    pub fn to_spec(&self) -> FunctionSpec {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let kind = match &p.kind {
                    PieceKind::Linear { slope, intercept } => PieceKindSpec::Linear {
                        slope: slope.clone(),
                        intercept: intercept.clone(),
                    },
                    PieceKind::Constant { value } => PieceKindSpec::Constant {
                        value: value.clone(),
                    },
                    PieceKind::Polynomial { coefficients } => PieceKindSpec::Polynomial {
                        coefficients: coefficients.iter().map(|c| Real::Float(*c)).collect(),
                    },
                    PieceKind::Oscillating(osc) => PieceKindSpec::XSinFamily {
                        exponent: osc.exponent,
                        scale: osc.scale,
                        slope: osc.slope,
                        offset: osc.offset,
                        center: osc.center,
                    },
                };
                PieceSpec {
                    kind,
                    domain: [p.lo.clone(), p.hi.clone()],
                }
            })
            .collect();
        FunctionSpec {
            domain: [self.a.clone(), self.b.clone()],
            arithmetic: Some(if self.is_exact() {
                ArithmeticSpec::Rational
            } else {
                ArithmeticSpec::Float
            }),
            tol: (!self.is_exact()).then(|| self.tol()),
            pieces,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::build_cantor_iterate;

    #[test]
    fn parses_rational_spec() {
        let text = r#"{
            "domain": ["0", "1"],
            "arithmetic": "rational",
            "pieces": [
                {"kind": "linear", "params": {"slope": "3/2", "intercept": 0}, "domain": ["0", "1/3"]},
                {"kind": "constant", "params": {"value": "1/2"}, "domain": ["1/3", "2/3"]},
                {"kind": "linear", "params": {"slope": "3/2", "intercept": "-1/2"}, "domain": ["2/3", "1"]}
            ]
        }"#;
        let m = FunctionSpec::from_json(text).unwrap().build().unwrap();
        assert_eq!(m, build_cantor_iterate(1));
    }

    #[test]
    fn cantor_kind_expands() {
        let text = r#"{"domain": [0, 1], "pieces": [
            {"kind": "cantor_iterate", "params": {"level": 3}, "domain": [0, 1]}]}"#;
        let m = FunctionSpec::from_json(text).unwrap().build().unwrap();
        assert_eq!(m, build_cantor_iterate(3));
    }

    #[test]
    fn rational_mode_rejects_polynomials() {
        let text = r#"{"domain": [0, 1], "arithmetic": "rational", "pieces": [
            {"kind": "polynomial", "params": {"coefficients": [0, 0, 1]}, "domain": [0, 1]}]}"#;
        assert!(FunctionSpec::from_json(text).unwrap().build().is_err());
    }

    #[test]
    fn x_sin_defaults() {
        let text = r#"{"domain": [0, 1], "pieces": [
            {"kind": "x_sin_family", "params": {"exponent": 2}, "domain": [0, 1]}]}"#;
        let m = FunctionSpec::from_json(text).unwrap().build().unwrap();
        assert!(!m.is_exact());
        assert!((m.eval_f64(0.5) - 0.25 * 2f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let m = build_cantor_iterate(2);
        let text = serde_json::to_string(&m.to_spec()).unwrap();
        assert_eq!(FunctionSpec::from_json(&text).unwrap().build().unwrap(), m);
    }

    #[test]
    fn domain_mismatch_is_rejected() {
        let text = r#"{"domain": [0, 2], "pieces": [
            {"kind": "constant", "params": {"value": 0}, "domain": [0, 1]}]}"#;
        assert!(FunctionSpec::from_json(text).unwrap().build().is_err());
    }
}
