use rayon::prelude::*;
use serde::Serialize;

use super::ledger::{Checker, Ledger, Relation};
use crate::error::{Error, Result};
use crate::evaluable::Evaluable;
use crate::function_model::{Direction, FunctionModel};
use crate::measure::{cover_image, image_measure, Interval, IntervalSet};
use crate::real::Real;
use crate::variation::{coarsened_partition, partition_sum, Partition, VariationFunction};

/// A component interval and the value range of its cover, both in frame coordinates.
type FrameItem = ((Real, Real), (Real, Real));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellCase {
    EqualEndpoints,
    Ordered,
}

/// Where a cover interval sits relative to the cell's end values: beyond
/// `F(x_i)` (plus), beyond `F(x_{i-1})` (minus), or between them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Plus,
    Minus,
    Between,
}

/// Coordinates in which a family is handled: `flip` maps
/// `x -> x_{i-1} + x_i - x`, `negate` maps `F -> -F`. Every frame turns the
/// cell into one with `H(x_{i-1}) < H(x_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub flip: bool,
    pub negate: bool,
}

impl Frame {
    fn for_family(family: Family, orientation: Direction) -> Frame {
        let dec = orientation == Direction::Decreasing;
        match family {
            Family::Plus | Family::Between => Frame {
                flip: false,
                negate: dec,
            },
            Family::Minus => Frame {
                flip: true,
                negate: !dec,
            },
        }
    }

    fn model(&self, f: &FunctionModel) -> FunctionModel {
        let m = if self.flip { f.reflect() } else { f.clone() };
        if self.negate {
            m.negate()
        } else {
            m
        }
    }

    fn interval(&self, iv: &Interval, lo: &Real, hi: &Real) -> (Real, Real) {
        if self.flip {
            let s = lo + hi;
            (&s - &iv.hi, &s - &iv.lo)
        } else {
            (iv.lo.clone(), iv.hi.clone())
        }
    }

    fn values(&self, iv: &Interval) -> (Real, Real) {
        if self.negate {
            (-&iv.hi, -&iv.lo)
        } else {
            (iv.lo.clone(), iv.hi.clone())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverRecord {
    pub interval: Interval,
    pub family: Option<Family>,
}

/// A preimage component `I_kl = (a_kl, b_kl)` of the cover interval
/// `J_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentRecord {
    pub cover: usize,
    pub family: Option<Family>,
    pub interval: Interval,
    /// `λ(p(I_kl))`.
    pub p_length: Real,
    /// `λ(n(I_kl))`.
    pub n_length: Real,
    /// `|F(b_kl) - F(a_kl)|`.
    pub f_change: Real,
}

/// The plus or minus family, in frame coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcursionRecord {
    pub family: Family,
    pub frame: Frame,
    /// Smallest lower end `c_1` among the cover intervals used.
    pub anchor: Real,
    pub alpha: Real,
    pub beta: Real,
    pub r1: Vec<Real>,
    pub r2: Vec<Real>,
    /// `|F(R₂)| - |F(R₁)|`.
    pub refinement_gain: Real,
    pub sum_f_change: Real,
}

/// The between family, in frame coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetweenRecord {
    pub frame: Frame,
    /// `(c_r, d_r)` sorted by `c_r`.
    pub anchors: Vec<(Real, Real)>,
    /// `α_1, ..., α_s, α_{s+1} = x_i`.
    pub alphas: Vec<Real>,
    /// `β_0 = x_{i-1}, β_1, ..., β_s`.
    pub betas: Vec<Real>,
    pub s1: Vec<Real>,
    pub s2: Vec<Real>,
    /// `|F(S₂)| - |F(S₁)|`.
    pub refinement_gain: Real,
    /// `Σ_r |F(β_r) - F(α_r)|`.
    pub anchor_change: Real,
    pub sum_f_change: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRecord {
    pub index: usize,
    pub lo: Real,
    pub hi: Real,
    pub f_lo: Real,
    pub f_hi: Real,
    pub case: CellCase,
    pub orientation: Direction,
    /// `λ(N_i)`.
    pub n_measure: Real,
    /// `λ(F(N_i))`.
    pub f_image_measure: Real,
    pub cover: Vec<CoverRecord>,
    pub components: Vec<ComponentRecord>,
    pub q_partition: Vec<Real>,
    pub plus: Option<ExcursionRecord>,
    pub minus: Option<ExcursionRecord>,
    pub between: Option<BetweenRecord>,
    /// `Σ |F(b_kl) - F(a_kl)|`.
    pub sum_f_change: Real,
    /// `Σ λ(p(I_kl))`, the measure of the cover of `p(N_i)`.
    pub p_cover_measure: Real,
    /// `Σ λ(n(I_kl))`.
    pub n_cover_measure: Real,
    pub p_image_measure: Real,
    pub n_image_measure: Real,
    pub ledger: Ledger,
}

impl CellRecord {
    pub fn family_sum(&self, family: Family) -> Real {
        Real::sum(
            self.components
                .iter()
                .filter(|c| c.family == Some(family))
                .map(|c| &c.f_change),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateTrace {
    pub epsilon: Real,
    pub base_partition: Partition,
    pub total_variation: Real,
    /// `|F(P)|`.
    pub partition_sum: Real,
    pub ledger: Ledger,
    pub cells: Vec<CellRecord>,
    /// Largest per-cell `Σ λ(p(I_kl))`; below `5ε`.
    pub max_p_cover: Real,
    /// Largest per-cell `Σ λ(n(I_kl))`; below `9ε`.
    pub max_n_cover: Real,
    pub total_p_cover: Real,
    pub total_n_cover: Real,
    pub holds: bool,
}

struct Context<'a> {
    model: &'a FunctionModel,
    n: &'a IntervalSet,
    epsilon: &'a Real,
    p: VariationFunction,
    p_model: FunctionModel,
    n_model: FunctionModel,
    checker: Checker,
}

/// Replays the cover argument showing `p` and `n` inherit Lusin's
/// condition, on the finite set `N` at tolerance `epsilon`, using the
/// coarsest greedy partition with variation deficit below `epsilon`.
pub fn lemma22_certificate(
    model: &FunctionModel,
    n: &IntervalSet,
    epsilon: &Real,
) -> Result<CertificateTrace> {
    if *epsilon <= Real::zero() {
        return Err(Error::Precondition(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let partition = coarsened_partition(model, epsilon)?;
    lemma22_certificate_with_partition(model, n, epsilon, &partition)
}

/// As [`lemma22_certificate`] on a caller-chosen partition, which must
/// satisfy `V_a^b(F) - |F(P)| < ε`.
pub fn lemma22_certificate_with_partition(
    model: &FunctionModel,
    n: &IntervalSet,
    epsilon: &Real,
    partition: &Partition,
) -> Result<CertificateTrace> {
    if *epsilon <= Real::zero() {
        return Err(Error::Precondition(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if partition.first() != model.a() || partition.last() != model.b() || partition.len() < 2 {
        return Err(Error::InvalidPartition(format!(
            "base partition must run from {} to {}",
            model.a(),
            model.b()
        )));
    }
    let p = VariationFunction::new(model, model.tol())?;
    let total = p.total();
    let psum = partition_sum(model, partition)?;
    let checker = Checker::for_exactness(model.is_exact(), model.tol());
    let mut ledger = Ledger::new(checker, "variation certificate");
    ledger.record(
        "partition_deficit",
        "V_a^b(F) - |F(P)| < ε",
        &total - &psum,
        Relation::Lt,
        epsilon.clone(),
    )?;
    let (a, b) = model.domain();
    let n = n.intersect_interval(&Interval::closed(a, b));
    let ctx = Context {
        model,
        n: &n,
        epsilon,
        p_model: p.p_model()?,
        n_model: p.n_model()?,
        p,
        checker,
    };
    let cells = partition
        .points()
        .par_windows(2)
        .enumerate()
        .map(|(i, w)| certify_cell(&ctx, i, &w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;

    let max_p = cells
        .iter()
        .map(|c| c.p_cover_measure.clone())
        .max()
        .unwrap_or_default();
    let max_n = cells
        .iter()
        .map(|c| c.n_cover_measure.clone())
        .max()
        .unwrap_or_default();
    let total_p = Real::sum(cells.iter().map(|c| &c.p_cover_measure));
    let total_n = Real::sum(cells.iter().map(|c| &c.n_cover_measure));
    let holds = ledger.all_hold() && cells.iter().all(|c| c.ledger.all_hold());
    Ok(CertificateTrace {
        epsilon: epsilon.clone(),
        base_partition: partition.clone(),
        total_variation: total,
        partition_sum: psum,
        ledger,
        cells,
        max_p_cover: max_p,
        max_n_cover: max_n,
        total_p_cover: total_p,
        total_n_cover: total_n,
        holds,
    })
}

fn certify_cell(ctx: &Context<'_>, index: usize, lo: &Real, hi: &Real) -> Result<CellRecord> {
    let eps = ctx.epsilon;
    let f_i = ctx.model.restrict(lo, hi)?;
    let f_lo = f_i.evaluate(lo)?;
    let f_hi = f_i.evaluate(hi)?;
    let mut ledger = Ledger::new(ctx.checker, format!("cell {index} [{lo}, {hi}]"));

    let n_i = ctx
        .n
        .intersect_interval(&Interval::closed(lo.clone(), hi.clone()));
    let f_n = image_measure(&f_i, &n_i)?;
    if f_n >= *eps {
        return Err(Error::Precondition(format!(
            "cell {index}: λ(F(N_i)) = {f_n} is not below epsilon {eps}"
        )));
    }
    let cover = cover_image(&f_i, &n_i, &(eps - &f_n))?.split_at(&[f_lo.clone(), f_hi.clone()]);
    ledger.record(
        "cover_measure",
        "Σ λ(J_k) < ε",
        cover.measure().clone(),
        Relation::Lt,
        eps.clone(),
    )?;

    let equal = ctx.checker.holds(&f_lo, Relation::Eq, &f_hi);
    let orientation = if equal {
        Direction::Constant
    } else if f_lo < f_hi {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    let (below, above) = if f_lo <= f_hi {
        (&f_lo, &f_hi)
    } else {
        (&f_hi, &f_lo)
    };

    let mut covers = Vec::new();
    let mut comps = Vec::new();
    for (k, j) in cover.components().iter().enumerate() {
        let family = match orientation {
            Direction::Constant => None,
            _ if j.lo >= *above => Some(if orientation == Direction::Increasing {
                Family::Plus
            } else {
                Family::Minus
            }),
            _ if j.hi <= *below => Some(if orientation == Direction::Increasing {
                Family::Minus
            } else {
                Family::Plus
            }),
            _ => Some(Family::Between),
        };
        covers.push(CoverRecord {
            interval: j.clone(),
            family,
        });
        for iv in f_i.preimage_interval(&j.lo, &j.hi)?.components() {
            if !iv.is_open() {
                return Err(Error::InvariantViolation(format!(
                    "cell {index}: preimage component {iv} of J_{k} is not open"
                )));
            }
            let single = IntervalSet::single(iv.clone());
            comps.push(ComponentRecord {
                cover: k,
                family,
                interval: iv.clone(),
                p_length: image_measure(&ctx.p_model, &single)?,
                n_length: image_measure(&ctx.n_model, &single)?,
                f_change: (f_i.evaluate(&iv.hi)? - f_i.evaluate(&iv.lo)?).abs(),
            });
        }
    }
    comps.sort_by(|x, y| x.interval.lo.cmp(&y.interval.lo));
    for w in comps.windows(2) {
        if w[0].interval.hi > w[1].interval.lo {
            return Err(Error::InvariantViolation(format!(
                "cell {index}: components {} and {} overlap",
                w[0].interval, w[1].interval
            )));
        }
    }

    let mut q = vec![lo.clone()];
    for c in &comps {
        q.push(c.interval.lo.clone());
        q.push(c.interval.hi.clone());
    }
    q.push(hi.clone());
    q.dedup();
    let q = Partition::new(q)?;
    let v_cell = ctx.p.eval(hi)? - ctx.p.eval(lo)?;
    let fq = partition_sum(&f_i, &q)?;
    ledger.record(
        "q_deficit",
        "V(F) over the cell - |F(Q)| < ε",
        &v_cell - &fq,
        Relation::Lt,
        eps.clone(),
    )?;

    let sum_p = Real::sum(comps.iter().map(|c| &c.p_length));
    let sum_n = Real::sum(comps.iter().map(|c| &c.n_length));
    let sum_f = Real::sum(comps.iter().map(|c| &c.f_change));
    let union = IntervalSet::from_intervals(comps.iter().map(|c| c.interval.clone()).collect());
    let p_img = image_measure(&ctx.p_model, &n_i)?;
    ledger.record(
        "residual",
        "λ(p(N_i outside every I_kl)) = 0",
        image_measure(&ctx.p_model, &n_i.difference(&union))?,
        Relation::Eq,
        Real::zero(),
    )?;
    ledger.record(
        "p_image",
        "λ(p(N_i)) <= Σ λ(p(I_kl))",
        p_img.clone(),
        Relation::Le,
        sum_p.clone(),
    )?;
    ledger.record(
        "p_cover_split",
        "Σ λ(p(I_kl)) < ε + Σ |F(b_kl) - F(a_kl)|",
        sum_p.clone(),
        Relation::Lt,
        eps + &sum_f,
    )?;

    let mut plus = None;
    let mut minus = None;
    let mut between = None;
    if equal {
        ledger.record(
            "q_sum",
            "Σ |F(b_kl) - F(a_kl)| <= |F(Q)|",
            sum_f.clone(),
            Relation::Le,
            fq.clone(),
        )?;
        ledger.record(
            "q_refine",
            "|F(Q)| - |F(x_i) - F(x_{i-1})| < ε",
            &fq - &(&f_hi - &f_lo).abs(),
            Relation::Lt,
            eps.clone(),
        )?;
        ledger.record(
            "p_cover_equal",
            "Σ λ(p(I_kl)) < 2ε",
            sum_p.clone(),
            Relation::Lt,
            eps * &Real::int(2),
        )?;
    } else {
        let in_frame = |family: Family| -> (Frame, Vec<FrameItem>) {
            let frame = Frame::for_family(family, orientation);
            let items = comps
                .iter()
                .filter(|c| c.family == Some(family))
                .map(|c| {
                    (
                        frame.interval(&c.interval, lo, hi),
                        frame.values(&covers[c.cover].interval),
                    )
                })
                .collect();
            (frame, items)
        };
        for family in [Family::Plus, Family::Minus] {
            let (frame, items) = in_frame(family);
            if items.is_empty() {
                continue;
            }
            let rec = excursion(ctx, &f_i, lo, hi, family, frame, &items, &mut ledger)?;
            match family {
                Family::Plus => plus = Some(rec),
                _ => minus = Some(rec),
            }
        }
        let (frame, items) = in_frame(Family::Between);
        if !items.is_empty() {
            between = Some(between_family(
                ctx,
                &f_i,
                lo,
                hi,
                frame,
                &items,
                &mut ledger,
            )?);
        }
        ledger.record(
            "excursion_total",
            "Σ |F(b_kl) - F(a_kl)| < 4ε",
            sum_f.clone(),
            Relation::Lt,
            eps * &Real::int(4),
        )?;
    }
    ledger.record(
        "p_cover_budget",
        "Σ λ(p(I_kl)) < 5ε",
        sum_p.clone(),
        Relation::Lt,
        eps * &Real::int(5),
    )?;

    let n_img = image_measure(&ctx.n_model, &n_i)?;
    ledger.record(
        "n_image",
        "λ(n(N_i)) <= Σ λ(n(I_kl))",
        n_img.clone(),
        Relation::Le,
        sum_n.clone(),
    )?;
    ledger.record(
        "n_triangle",
        "Σ λ(n(I_kl)) <= Σ λ(p(I_kl)) + Σ |F(b_kl) - F(a_kl)|",
        sum_n.clone(),
        Relation::Le,
        &sum_p + &sum_f,
    )?;
    ledger.record(
        "n_budget",
        "Σ λ(p(I_kl)) + Σ |F(b_kl) - F(a_kl)| < 9ε",
        &sum_p + &sum_f,
        Relation::Lt,
        eps * &Real::int(9),
    )?;

    Ok(CellRecord {
        index,
        lo: lo.clone(),
        hi: hi.clone(),
        f_lo,
        f_hi,
        case: if equal {
            CellCase::EqualEndpoints
        } else {
            CellCase::Ordered
        },
        orientation,
        n_measure: n_i.measure().clone(),
        f_image_measure: f_n,
        cover: covers,
        components: comps,
        q_partition: q.points().to_vec(),
        plus,
        minus,
        between,
        sum_f_change: sum_f,
        p_cover_measure: sum_p,
        n_cover_measure: sum_n,
        p_image_measure: p_img,
        n_image_measure: n_img,
        ledger,
    })
}

fn sorted_points(points: impl IntoIterator<Item = Real>) -> Result<Partition> {
    let mut v: Vec<Real> = points.into_iter().collect();
    v.sort();
    v.dedup();
    Partition::new(v)
}

/// The plus family in its frame: every component sits between the extreme
/// points `α, β` of the level set at the lowest cover end `c_1`.
#[allow(clippy::too_many_arguments)]
fn excursion(
    ctx: &Context<'_>,
    f_i: &FunctionModel,
    lo: &Real,
    hi: &Real,
    family: Family,
    frame: Frame,
    items: &[FrameItem],
    ledger: &mut Ledger,
) -> Result<ExcursionRecord> {
    let eps = ctx.epsilon;
    let (tag, eq) = match family {
        Family::Plus => ("plus", "plus_bound"),
        _ => ("minus", "minus_bound"),
    };
    let h = frame.model(f_i);
    let anchor = items
        .iter()
        .map(|(_, (c, _))| c.clone())
        .min()
        .expect("nonempty family");
    let (alpha, beta) = h.level_set_extremes(&anchor, lo, hi)?.ok_or_else(|| {
        Error::InvariantViolation(format!("{tag}: level set of {anchor} is empty"))
    })?;
    let min_a = items
        .iter()
        .map(|((a, _), _)| a.clone())
        .min()
        .expect("nonempty family");
    let max_b = items
        .iter()
        .map(|((_, b), _)| b.clone())
        .max()
        .expect("nonempty family");
    ledger.record(
        &format!("{tag}_alpha"),
        "α <= every a_kl",
        alpha.clone(),
        Relation::Le,
        min_a,
    )?;
    ledger.record(
        &format!("{tag}_beta"),
        "every b_kl <= β",
        max_b,
        Relation::Le,
        beta.clone(),
    )?;

    let r1 = sorted_points([lo.clone(), alpha.clone(), beta.clone(), hi.clone()])?;
    let r2 = sorted_points(
        r1.points()
            .iter()
            .cloned()
            .chain(items.iter().flat_map(|((a, b), _)| [a.clone(), b.clone()])),
    )?;
    let gain = partition_sum(&h, &r2)? - partition_sum(&h, &r1)?;
    ledger.record(
        &format!("{tag}_refine"),
        "|F(R₂)| - |F(R₁)| < ε",
        gain.clone(),
        Relation::Lt,
        eps.clone(),
    )?;
    let mut sum = Real::zero();
    for ((a, b), _) in items {
        sum = sum + (h.evaluate(b)? - h.evaluate(a)?).abs();
    }
    ledger.record(
        &format!("{tag}_sum"),
        "Σ |F(b_kl) - F(a_kl)| <= |F(R₂)| - |F(R₁)|",
        sum.clone(),
        Relation::Le,
        gain.clone(),
    )?;
    ledger.record(
        eq,
        "Σ |F(b_kl) - F(a_kl)| < ε",
        sum.clone(),
        Relation::Lt,
        eps.clone(),
    )?;
    Ok(ExcursionRecord {
        family,
        frame,
        anchor,
        alpha,
        beta,
        r1: r1.points().to_vec(),
        r2: r2.points().to_vec(),
        refinement_gain: gain,
        sum_f_change: sum,
    })
}

/// The between family in its frame: the components fall into the blocks
/// `[α_r, β_r]` of the partition `S₁`.
fn between_family(
    ctx: &Context<'_>,
    f_i: &FunctionModel,
    lo: &Real,
    hi: &Real,
    frame: Frame,
    items: &[FrameItem],
    ledger: &mut Ledger,
) -> Result<BetweenRecord> {
    let eps = ctx.epsilon;
    let h = frame.model(f_i);
    let mut anchors: Vec<(Real, Real)> = items.iter().map(|(_, cd)| cd.clone()).collect();
    anchors.sort();
    anchors.dedup();
    let missing =
        |y: &Real| Error::InvariantViolation(format!("between: level set of {y} is empty"));

    let mut alphas = Vec::with_capacity(anchors.len() + 1);
    for (c, _) in &anchors {
        let (mn, _) = h.level_set_extremes(c, lo, hi)?.ok_or_else(|| missing(c))?;
        alphas.push(mn);
    }
    alphas.push(hi.clone());
    let mut betas = vec![lo.clone()];
    for (r, (_, d)) in anchors.iter().enumerate() {
        let (_, mx) = h
            .level_set_extremes(d, lo, &alphas[r + 1])?
            .ok_or_else(|| missing(d))?;
        betas.push(mx);
    }

    let s = anchors.len();
    let mut s1 = vec![betas[0].clone()];
    for r in 0..s {
        s1.push(alphas[r].clone());
        s1.push(betas[r + 1].clone());
    }
    s1.push(alphas[s].clone());
    if s1.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvariantViolation(format!(
            "between: anchor points are out of order: {s1:?}"
        )));
    }
    let outside = items
        .iter()
        .filter(|((a, b), _)| {
            !(0..s).any(|r| {
                ctx.checker.holds(&alphas[r], Relation::Le, a)
                    && ctx.checker.holds(b, Relation::Le, &betas[r + 1])
            })
        })
        .count();
    ledger.record(
        "between_blocks",
        "components outside every [α_r, β_r]",
        Real::int(outside as i64),
        Relation::Eq,
        Real::zero(),
    )?;

    let s1p = sorted_points(s1)?;
    let s2p = sorted_points(
        s1p.points()
            .iter()
            .cloned()
            .chain(items.iter().flat_map(|((a, b), _)| [a.clone(), b.clone()])),
    )?;
    let gain = partition_sum(&h, &s2p)? - partition_sum(&h, &s1p)?;
    ledger.record(
        "between_refine",
        "|F(S₂)| - |F(S₁)| < ε",
        gain.clone(),
        Relation::Lt,
        eps.clone(),
    )?;
    let mut anchor_change = Real::zero();
    for r in 0..s {
        anchor_change =
            anchor_change + (h.evaluate(&betas[r + 1])? - h.evaluate(&alphas[r])?).abs();
    }
    let mut sum = Real::zero();
    for ((a, b), _) in items {
        sum = sum + (h.evaluate(b)? - h.evaluate(a)?).abs();
    }
    ledger.record(
        "between_sum",
        "Σ |F(b_kl) - F(a_kl)| <= |F(S₂)| - |F(S₁)| + Σ |F(β_r) - F(α_r)|",
        sum.clone(),
        Relation::Le,
        &gain + &anchor_change,
    )?;
    let cover_sum = Real::sum(
        anchors
            .iter()
            .map(|(c, d)| d - c)
            .collect::<Vec<_>>()
            .iter(),
    );
    ledger.record(
        "between_anchor",
        "Σ |F(β_r) - F(α_r)| <= Σ λ(J_r)",
        anchor_change.clone(),
        Relation::Le,
        cover_sum,
    )?;
    ledger.record(
        "between_bound",
        "Σ |F(b_kl) - F(a_kl)| < 2ε",
        sum.clone(),
        Relation::Lt,
        eps * &Real::int(2),
    )?;
    Ok(BetweenRecord {
        frame,
        anchors,
        alphas,
        betas,
        s1: s1p.points().to_vec(),
        s2: s2p.points().to_vec(),
        refinement_gain: gain,
        anchor_change,
        sum_f_change: sum,
    })
}
