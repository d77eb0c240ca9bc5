use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bvkit::certificate::{lemma22_certificate, step2_certificate};
use bvkit::evaluable::uniform_grid;
use bvkit::function_model::{ArithmeticSpec, DEFAULT_X_MIN};
use bvkit::harness::{default_corpus, run_corpus, write_report, Corpus, RunConfig};
use bvkit::measure::{lusin_probe, Interval};
use bvkit::reconstruction::{
    ac_modulus, bv_density, default_window, density_grid, reconstruction_error,
};
use bvkit::variation::{jordan_decomposition, total_variation};
use bvkit::{FunctionModel, FunctionSpec, IntervalSet, NullSetFamily, Real};
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "bvkit",
    version,
    about = "Bounded variation, Lusin's condition and absolute continuity on piecewise models"
)]
struct Cli {
    /// Override the arithmetic declared in the spec file.
    #[arg(long, global = true, value_enum)]
    arithmetic: Option<Arithmetic>,
    /// Tolerance for float arithmetic.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomly placed null sets (`random:<count>` families).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arithmetic {
    Rational,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertificateKind {
    /// Covers of p(N) and n(N) from a cover of F(N).
    Lemma22,
    /// The shift G = F + x of a non-decreasing F.
    Step2,
}

#[derive(Subcommand)]
enum Command {
    /// Total variation on [a, x].
    Variation {
        spec: PathBuf,
        /// Right end of the interval (default b).
        #[arg(long)]
        at: Option<String>,
    },
    /// Jordan decomposition F = p - n sampled on a uniform grid.
    Decompose {
        spec: PathBuf,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        /// CSV with columns x, F, p, n.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Tabulate λ(N_j) and λ(F(N_j)) for a shrinking family.
    Lusin {
        spec: PathBuf,
        /// cantor | shrinking[:count:rate] | random:count
        #[arg(long, default_value = "shrinking")]
        family: String,
        #[arg(long, default_value_t = 8)]
        levels: u32,
        #[arg(long, default_value = "1/2")]
        threshold: String,
    },
    /// Build and check a cover certificate on a null-set stand-in.
    Certify {
        spec: PathBuf,
        /// `<family>@<level>` (e.g. `cantor@4`) or a JSON file holding an interval set.
        #[arg(long)]
        nullset: String,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value = "lemma22")]
        kind: CertificateKind,
        /// Write the full ledger trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Recover a density f with F = F(a) + ∫f from image measures.
    Recover {
        spec: PathBuf,
        /// Number of grid cells.
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        /// Window width, or `auto` for a quarter of the grid spacing.
        #[arg(long, default_value = "auto")]
        h: String,
        /// CSV with columns x, f.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// The absolute-continuity modulus ω(δ).
    Ac {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4")]
        deltas: Vec<String>,
        #[arg(long, default_value = "1/2")]
        threshold: String,
    },
    /// Run the corpus and write the equivalence table and plots.
    CorpusReport {
        /// Corpus JSON (default: the built-in corpus).
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        /// Also write the corpus that was run.
        #[arg(long)]
        dump_corpus: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_model(cli: &Cli, path: &Path) -> Result<FunctionModel> {
    let mut spec =
        FunctionSpec::load(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(a) = cli.arithmetic {
        spec.arithmetic = Some(match a {
            Arithmetic::Rational => ArithmeticSpec::Rational,
            Arithmetic::Float => ArithmeticSpec::Float,
        });
    }
    if cli.tol.is_some() {
        spec.tol = cli.tol;
    }
    Ok(spec.build()?)
}

/// Parses a number, rounding it to a float for float-mode models.
fn number(s: &str, model: &FunctionModel) -> Result<Real> {
    let r: Real = s.parse()?;
    Ok(if model.is_exact() { r } else { r.to_float() })
}

fn working(model: &FunctionModel) -> Result<FunctionModel> {
    if model.has_unresolved_oscillation() {
        eprintln!("note: truncating the oscillation at x_min = {DEFAULT_X_MIN}");
        Ok(model.truncate(DEFAULT_X_MIN)?)
    } else {
        Ok(model.clone())
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn write_columns(path: &Path, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// `count` random intervals per level, each of length `(b - a) 2^-j / count`,
/// with left ends on a `2^-20` lattice of `[a, b]`.
fn random_family(seed: u64, count: usize, levels: u32, a: &Real, b: &Real) -> NullSetFamily {
    let mut rng = StdRng::seed_from_u64(seed);
    let span = b - a;
    let lattice = 1i64 << 20;
    let levels = (1..=levels)
        .map(|j| {
            let len = &span / &Real::int((count as i64) << j);
            let ivs = (0..count)
                .map(|_| {
                    let k = rng.gen_range(0..lattice);
                    let lo = a + &(&(&span - &len) * &Real::ratio(k, lattice));
                    let hi = &lo + &len;
                    Interval::closed(lo, hi)
                })
                .collect();
            IntervalSet::from_intervals(ivs)
        })
        .collect();
    NullSetFamily::Custom { levels }
}

fn parse_family(s: &str, seed: u64, levels: u32, model: &FunctionModel) -> Result<NullSetFamily> {
    let parts: Vec<&str> = s.split(':').collect();
    Ok(match parts.as_slice() {
        ["cantor"] => NullSetFamily::CantorLevels,
        ["shrinking"] => NullSetFamily::ShrinkingUniform {
            count: 16,
            rate: Real::ratio(1, 2),
        },
        ["shrinking", count, rate] => NullSetFamily::ShrinkingUniform {
            count: count.parse()?,
            rate: rate.parse()?,
        },
        ["random", count] => random_family(seed, count.parse()?, levels, model.a(), model.b()),
        _ => {
            bail!("unknown null-set family {s:?} (cantor | shrinking[:count:rate] | random:count)")
        }
    })
}

fn parse_nullset(s: &str, seed: u64, model: &FunctionModel) -> Result<IntervalSet> {
    if let Some((family, level)) = s.rsplit_once('@') {
        let level: u32 = level.parse().context("null-set level")?;
        let f = parse_family(family, seed, level, model)?;
        return Ok(f.level(level, model.a(), model.b()));
    }
    let text = std::fs::read_to_string(s).with_context(|| format!("reading {s}"))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Serialize)]
struct CertificateSummary {
    kind: &'static str,
    epsilon: Real,
    holds: bool,
    n_measure: Real,
    /// Cover certificate: largest per-cell `Σ λ(p(I))` and `Σ λ(n(I))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    max_p_cover: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_n_cover: Option<Real>,
    /// Shift certificate: the bound on `λ(G(N₂))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    g_n2_bound: Option<Real>,
    ledger_entries: usize,
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Variation { spec, at } => {
            let m = load_model(cli, spec)?;
            let x = match at {
                Some(s) => number(s, &m)?,
                None => m.b().clone(),
            };
            print_json(&total_variation(&m, &x, m.tol())?)?;
        }
        Command::Decompose {
            spec,
            samples,
            emit,
        } => {
            let m = working(&load_model(cli, spec)?)?;
            let d = jordan_decomposition(&m, m.tol())?;
            let xs = uniform_grid(m.a(), m.b(), (*samples).max(2) - 1);
            let mut rows = Vec::with_capacity(xs.len());
            for x in &xs {
                let (p, n) = d.eval(x)?;
                rows.push(vec![
                    x.to_f64(),
                    m.evaluate(x)?.to_f64(),
                    p.to_f64(),
                    n.to_f64(),
                ]);
            }
            if let Some(path) = emit {
                write_columns(path, "x,F,p,n", rows.into_iter())?;
            }
            print_json(&serde_json::json!({
                "total_variation": d.p.total(),
                "knots": d.p.knots(),
                "samples": xs.len(),
            }))?;
        }
        Command::Lusin {
            spec,
            family,
            levels,
            threshold,
        } => {
            let m = working(&load_model(cli, spec)?)?;
            let fam = parse_family(family, cli.seed, *levels, &m)?;
            print_json(&lusin_probe(&m, &fam, *levels, &threshold.parse()?)?)?;
        }
        Command::Certify {
            spec,
            nullset,
            eps,
            kind,
            trace,
        } => {
            let m = load_model(cli, spec)?;
            let eps = number(eps, &m)?;
            let n = parse_nullset(nullset, cli.seed, &m)?;
            let summary = match kind {
                CertificateKind::Lemma22 => {
                    let t = lemma22_certificate(&m, &n, &eps)?;
                    if let Some(path) = trace {
                        write_json(path, &t)?;
                    }
                    CertificateSummary {
                        kind: "lemma22",
                        epsilon: eps,
                        holds: t.holds,
                        n_measure: n.measure().clone(),
                        max_p_cover: Some(t.max_p_cover.clone()),
                        max_n_cover: Some(t.max_n_cover.clone()),
                        g_n2_bound: None,
                        ledger_entries: t.ledger.entries.len()
                            + t.cells
                                .iter()
                                .map(|c| c.ledger.entries.len())
                                .sum::<usize>(),
                    }
                }
                CertificateKind::Step2 => {
                    let t = step2_certificate(&m, &n, &eps)?;
                    if let Some(path) = trace {
                        write_json(path, &t)?;
                    }
                    CertificateSummary {
                        kind: "step2",
                        epsilon: eps,
                        holds: t.holds,
                        n_measure: n.measure().clone(),
                        max_p_cover: None,
                        max_n_cover: None,
                        g_n2_bound: Some(t.g_n2_bound.clone()),
                        ledger_entries: t.ledger.entries.len(),
                    }
                }
            };
            print_json(&summary)?;
            if !summary.holds {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Recover {
            spec,
            grid,
            h,
            emit,
            report,
        } => {
            let m = working(&load_model(cli, spec)?)?;
            let g = density_grid(&m, *grid);
            let h = if h == "auto" {
                default_window(&g)?
            } else {
                number(h, &m)?
            };
            let d = bv_density(&m, &g, &h, m.tol())?;
            let r = reconstruction_error(&m, &d)?;
            if let Some(path) = emit {
                write_columns(
                    path,
                    "x,f",
                    d.grid
                        .iter()
                        .zip(&d.values)
                        .map(|(x, f)| vec![x.to_f64(), f.to_f64()]),
                )?;
            }
            if let Some(path) = report {
                write_json(path, &r)?;
            }
            print_json(&r)?;
        }
        Command::Ac {
            spec,
            deltas,
            threshold,
        } => {
            let m = load_model(cli, spec)?;
            let ds = deltas
                .iter()
                .map(|d| number(d, &m))
                .collect::<Result<Vec<_>>>()?;
            print_json(&ac_modulus(&m, &ds, &threshold.parse()?)?)?;
        }
        Command::CorpusReport {
            corpus,
            out,
            grid,
            dump_corpus,
        } => {
            let corpus = match corpus {
                Some(p) => Corpus::load(p).with_context(|| format!("reading {}", p.display()))?,
                None => default_corpus(),
            };
            if let Some(p) = dump_corpus {
                std::fs::write(p, corpus.to_json()? + "\n")?;
            }
            let table = run_corpus(&corpus, &RunConfig { grid_cells: *grid });
            let files = write_report(&table, out)?;
            println!(
                "{:<14} {:>5} {:>5} {:>5} {:>5}  agree",
                "entry", "cont", "bv", "lusin", "ac"
            );
            let flag = |b: Option<bool>| match b {
                Some(true) => "yes",
                Some(false) => "no",
                None => "?",
            };
            for r in &table.rows {
                println!(
                    "{:<14} {:>5} {:>5} {:>5} {:>5}  {}",
                    r.name,
                    flag(r.measured.continuous),
                    flag(r.measured.bv),
                    flag(r.measured.lusin),
                    flag(r.measured.ac),
                    if r.agreement.all { "ok" } else { "DISAGREE" }
                );
                for e in &r.errors {
                    println!("    {e}");
                }
            }
            println!("wrote {} files to {}", files.len(), out.display());
            if !table.all_agree {
                eprintln!("disagreement in: {}", table.disagreements().join(", "));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
