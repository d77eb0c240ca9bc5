use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Lt,
    Le,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
        })
    }
}

/// One recorded inequality with both sides evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub description: String,
    pub lhs: Real,
    pub relation: Relation,
    pub rhs: Real,
    pub holds: bool,
}

/// Checks relations exactly, or with a `10 tol` margin in float mode: a
/// strict `<` must clear the margin, `<=` and `=` may miss by it.
#[derive(Clone, Copy, Debug)]
pub struct Checker {
    margin: Option<f64>,
}

impl Checker {
    pub fn exact() -> Checker {
        Checker { margin: None }
    }

    pub fn float(tol: f64) -> Checker {
        Checker {
            margin: Some(10.0 * tol),
        }
    }

    pub fn for_exactness(exact: bool, tol: f64) -> Checker {
        if exact {
            Checker::exact()
        } else {
            Checker::float(tol)
        }
    }

    pub fn holds(&self, lhs: &Real, relation: Relation, rhs: &Real) -> bool {
        let both_exact = lhs.is_exact() && rhs.is_exact();
        match (self.margin.filter(|_| !both_exact), relation) {
            (None, Relation::Lt) => lhs < rhs,
            (None, Relation::Le) => lhs <= rhs,
            (None, Relation::Eq) => lhs == rhs,
            (Some(m), Relation::Lt) => (rhs - lhs).to_f64() > m,
            (Some(m), Relation::Le) => (lhs - rhs).to_f64() <= m,
            (Some(m), Relation::Eq) => (lhs - rhs).to_f64().abs() <= m,
        }
    }
}

/// Ordered ledger entries; the first failing entry aborts with a
/// `CertificateFailure` naming `context` and the entry label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
    #[serde(skip, default = "default_checker")]
    checker: Checker,
    #[serde(skip)]
    context: String,
}

fn default_checker() -> Checker {
    Checker::exact()
}

impl PartialEq for Ledger {
    fn eq(&self, other: &Ledger) -> bool {
        self.entries == other.entries
    }
}

impl Ledger {
    pub fn new(checker: Checker, context: impl Into<String>) -> Ledger {
        Ledger {
            entries: Vec::new(),
            checker,
            context: context.into(),
        }
    }

    pub fn record(
        &mut self,
        label: &str,
        description: &str,
        lhs: Real,
        relation: Relation,
        rhs: Real,
    ) -> Result<()> {
        let holds = self.checker.holds(&lhs, relation, &rhs);
        if !holds {
            return Err(Error::CertificateFailure {
                context: format!("{} [{label}: {description}]", self.context),
                lhs,
                relation: relation.to_string(),
                rhs,
            });
        }
        self.entries.push(LedgerEntry {
            label: label.to_string(),
            description: description.to_string(),
            lhs,
            relation,
            rhs,
            holds,
        });
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_checks_are_strict() {
        let c = Checker::exact();
        assert!(c.holds(&Real::ratio(1, 3), Relation::Lt, &Real::ratio(1, 2)));
        assert!(!c.holds(&Real::ratio(1, 2), Relation::Lt, &Real::ratio(1, 2)));
        assert!(c.holds(&Real::ratio(1, 2), Relation::Le, &Real::ratio(1, 2)));
    }

    #[test]
    fn float_checks_use_the_margin() {
        let c = Checker::float(1e-12);
        let x = Real::Float(1.0);
        assert!(c.holds(&x, Relation::Le, &Real::Float(1.0 - 5e-12)));
        assert!(!c.holds(&x, Relation::Lt, &Real::Float(1.0 + 5e-12)));
        assert!(c.holds(&x, Relation::Eq, &Real::Float(1.0 + 5e-12)));
    }

    #[test]
    fn failure_carries_both_sides() {
        let mut l = Ledger::new(Checker::exact(), "cell 2");
        let err = l
            .record(
                "p_cover_split",
                "test",
                Real::int(3),
                Relation::Lt,
                Real::int(2),
            )
            .unwrap_err();
        match err {
            Error::CertificateFailure {
                context,
                lhs,
                rhs,
                relation,
            } => {
                assert!(context.contains("cell 2") && context.contains("p_cover_split"));
                assert_eq!(
                    (lhs, rhs, relation.as_str()),
                    (Real::int(3), Real::int(2), "<")
                );
            }
            other => panic!("unexpected {other}"),
        }
    }
}
