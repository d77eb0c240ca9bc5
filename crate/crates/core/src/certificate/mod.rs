//! Checkable replays of the two cover arguments: null sets stay null under
//! `G = F + x` for non-decreasing `F`, and under the variation parts `p`
//! and `n` for continuous BV `F`.

mod ledger;
mod lemma22;
mod propagation;
mod step2;

pub use ledger::{Checker, Ledger, LedgerEntry, Relation};
pub use lemma22::{
    lemma22_certificate, lemma22_certificate_with_partition, BetweenRecord, CellCase, CellRecord,
    CertificateTrace, ComponentRecord, CoverRecord, ExcursionRecord, Family, Frame,
};
pub use propagation::{lusin_propagation_check, PropagationReport, PropagationRow};
pub use step2::{step2_certificate, Plateau, Step2Trace, TrimmedComponent};
