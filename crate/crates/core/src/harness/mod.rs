//! The corpus of test functions, the equivalence table comparing measured
//! properties with ground truth, and plot emission.

mod corpus;
mod plots;
mod table;

pub use corpus::{default_corpus, Corpus, CorpusEntry, LusinSetup, Truth};
pub use plots::{emit_plots, write_report};
pub use table::{
    run_corpus, run_entry, Agreement, Curves, EquivalenceTable, Measured, RunConfig, TableRow,
    VariationSummary, PLOT_SAMPLES,
};
