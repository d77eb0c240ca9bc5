use serde::Serialize;

use super::ledger::{Checker, Ledger, Relation};
use crate::error::{Error, Result};
use crate::function_model::{Direction, FunctionModel};
use crate::measure::{cover_image, image_measure, image_set, Interval, IntervalSet};
use crate::real::Real;

/// A constancy interval `S_k = [lo, hi]` with value `μ_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plateau {
    pub lo: Real,
    pub hi: Real,
    pub value: Real,
    /// `λ(N ∩ S_k)`.
    pub n_measure: Real,
    /// `λ(G(N ∩ S_k))`.
    pub g_image_measure: Real,
}

/// A component `I_k` of `V`, its trimmed part `I'_k` and `J_k = F(I'_k)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrimmedComponent {
    pub component: Interval,
    pub trimmed: Option<Interval>,
    pub image: Option<Interval>,
    pub g_image_measure: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step2Trace {
    pub epsilon: Real,
    pub plateaus: Vec<Plateau>,
    pub n1: IntervalSet,
    pub n2: IntervalSet,
    /// Open cover of `F(N₂)`.
    pub u: IntervalSet,
    /// Open cover of `N₂`.
    pub u_prime: IntervalSet,
    /// `U' ∩ F^{-1}(U)`.
    pub v: IntervalSet,
    pub components: Vec<TrimmedComponent>,
    pub g_n1_measure: Real,
    pub g_n2_measure: Real,
    /// `Σ λ(I'_k) + Σ λ(J_k)`, which must stay below `2ε`.
    pub g_n2_bound: Real,
    pub ledger: Ledger,
    pub holds: bool,
}

/// Replays the argument that `G = F + x` keeps null sets null when `F` is
/// non-decreasing, on the finite set `N` at tolerance `epsilon`.
pub fn step2_certificate(
    model: &FunctionModel,
    n: &IntervalSet,
    epsilon: &Real,
) -> Result<Step2Trace> {
    if *epsilon <= Real::zero() {
        return Err(Error::Precondition(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let seg = model.segmentation()?;
    if !seg.is_non_decreasing() {
        return Err(Error::Precondition(
            "the shift certificate needs a non-decreasing model".into(),
        ));
    }
    let (a, b) = model.domain();
    let n = n.intersect_interval(&Interval::closed(a.clone(), b.clone()));
    if *n.measure() >= *epsilon {
        return Err(Error::Precondition(format!(
            "λ(N) = {} is not below epsilon {epsilon}",
            n.measure()
        )));
    }
    let g = model.shift_add_identity();
    let mut ledger = Ledger::new(
        Checker::for_exactness(model.is_exact(), model.tol()),
        "shift certificate",
    );

    let mut plateaus = Vec::new();
    let mut s_parts = Vec::new();
    for s in seg
        .segments
        .iter()
        .filter(|s| s.direction == Direction::Constant)
    {
        let s_k = Interval::closed(s.lo.clone(), s.hi.clone());
        let part = n.intersect_interval(&s_k);
        let g_meas = image_measure(&g, &part)?;
        ledger.record(
            &format!("plateau_{}", plateaus.len()),
            "G translates N ∩ S_k by μ_k: λ(G(N ∩ S_k)) = λ(N ∩ S_k)",
            g_meas.clone(),
            Relation::Eq,
            part.measure().clone(),
        )?;
        plateaus.push(Plateau {
            lo: s.lo.clone(),
            hi: s.hi.clone(),
            value: s.f_lo.clone(),
            n_measure: part.measure().clone(),
            g_image_measure: g_meas,
        });
        s_parts.push(s_k);
    }
    let s_set = IntervalSet::from_intervals(s_parts.clone());
    let n1 = n.intersection(&s_set);
    let n2 = n.difference(&s_set);
    let g_n1 = image_measure(&g, &n1)?;
    ledger.record(
        "g_n1",
        "λ(G(N₁)) <= λ(N₁)",
        g_n1.clone(),
        Relation::Le,
        n1.measure().clone(),
    )?;

    let f_n2 = image_measure(model, &n2)?;
    if f_n2 >= *epsilon {
        return Err(Error::Precondition(format!(
            "λ(F(N₂)) = {f_n2} is not below epsilon {epsilon}; no cover of F(N₂) fits the budget"
        )));
    }
    let u = cover_image(model, &n2, &(epsilon - &f_n2))?;
    let u_prime = n2.open_cover(&(epsilon - n2.measure()));
    ledger.record(
        "u",
        "λ(U) < ε",
        u.measure().clone(),
        Relation::Lt,
        epsilon.clone(),
    )?;
    ledger.record(
        "u_prime",
        "λ(U') < ε",
        u_prime.measure().clone(),
        Relation::Lt,
        epsilon.clone(),
    )?;

    let mut pre = IntervalSet::empty();
    for j in u.components() {
        pre = pre.union(&model.preimage_interval(&j.lo, &j.hi)?);
    }
    let v = u_prime.intersection(&pre);
    ledger.record(
        "v",
        "λ(V) < ε",
        v.measure().clone(),
        Relation::Lt,
        epsilon.clone(),
    )?;
    ledger.record(
        "f_v",
        "λ(F(V)) < ε",
        image_measure(model, &v)?,
        Relation::Lt,
        epsilon.clone(),
    )?;

    let mut components = Vec::new();
    let mut trimmed_parts = Vec::new();
    for comp in v.components() {
        let mut cut = Vec::new();
        for s in &s_parts {
            let hits_left = s.lo <= comp.lo && comp.lo <= s.hi && s.hi > comp.lo;
            let hits_right = s.lo <= comp.hi && comp.hi <= s.hi && s.lo < comp.hi;
            if hits_left || hits_right {
                cut.push(s.clone());
            }
        }
        let rest = IntervalSet::single(comp.clone()).difference(&IntervalSet::from_intervals(cut));
        if rest.len() > 1 {
            return Err(Error::InvariantViolation(format!(
                "trimming {comp} left {} pieces",
                rest.len()
            )));
        }
        let trimmed = rest.components().first().cloned();
        let (image, g_meas) = match &trimmed {
            Some(t) => {
                let single = IntervalSet::single(t.clone());
                let img = image_set(model, &single)?;
                if img.len() != 1 {
                    return Err(Error::InvariantViolation(format!(
                        "F({t}) is not an interval"
                    )));
                }
                (
                    img.components().first().cloned(),
                    image_measure(&g, &single)?,
                )
            }
            None => (None, Real::zero()),
        };
        if let Some(t) = &trimmed {
            trimmed_parts.push(t.clone());
        }
        components.push(TrimmedComponent {
            component: comp.clone(),
            trimmed,
            image,
            g_image_measure: g_meas,
        });
    }

    let v_prime = IntervalSet::from_intervals(trimmed_parts);
    if !n2.is_subset(&v_prime) {
        return Err(Error::InvariantViolation(format!(
            "N₂ is not inside V'; left over: {:?}",
            n2.difference(&v_prime).components()
        )));
    }

    let images: Vec<(usize, &Interval)> = components
        .iter()
        .enumerate()
        .filter_map(|(k, c)| c.image.as_ref().map(|j| (k, j)))
        .collect();
    for (i, (k, jk)) in images.iter().enumerate() {
        for (l, jl) in &images[i + 1..] {
            if jk.intersect(jl).is_some() {
                return Err(Error::CertificateFailure {
                    context: format!("shift certificate: J_{k} = {jk} and J_{l} = {jl} overlap"),
                    lhs: jl.lo.clone(),
                    relation: ">=".into(),
                    rhs: jk.hi.clone(),
                });
            }
        }
    }

    let mut sum_i = Real::zero();
    let mut sum_j = Real::zero();
    let mut sum_g = Real::zero();
    for (k, c) in components.iter().enumerate() {
        let (Some(t), Some(j)) = (&c.trimmed, &c.image) else {
            continue;
        };
        ledger.record(
            &format!("component_{k}"),
            "λ(G(I'_k)) <= λ(I'_k) + λ(J_k)",
            c.g_image_measure.clone(),
            Relation::Le,
            t.length() + j.length(),
        )?;
        sum_i = sum_i + t.length();
        sum_j = sum_j + j.length();
        sum_g = sum_g + &c.g_image_measure;
    }
    ledger.record(
        "sum_j",
        "Σ λ(J_k) <= λ(U)",
        sum_j.clone(),
        Relation::Le,
        u.measure().clone(),
    )?;
    ledger.record(
        "sum_i",
        "Σ λ(I'_k) <= λ(V)",
        sum_i.clone(),
        Relation::Le,
        v.measure().clone(),
    )?;
    let g_n2 = image_measure(&g, &n2)?;
    ledger.record(
        "g_n2",
        "λ(G(N₂)) <= Σ λ(G(I'_k))",
        g_n2.clone(),
        Relation::Le,
        sum_g,
    )?;
    let bound = &sum_i + &sum_j;
    let two_eps = epsilon * &Real::int(2);
    ledger.record(
        "bound",
        "Σ λ(I'_k) + Σ λ(J_k) < 2ε",
        bound.clone(),
        Relation::Lt,
        two_eps,
    )?;
    ledger.record(
        "g_n",
        "λ(G(N)) <= λ(G(N₁)) + λ(G(N₂))",
        image_measure(&g, &n)?,
        Relation::Le,
        &g_n1 + &g_n2,
    )?;

    let holds = ledger.all_hold();
    Ok(Step2Trace {
        epsilon: epsilon.clone(),
        plateaus,
        n1,
        n2,
        u,
        u_prime,
        v,
        components,
        g_n1_measure: g_n1,
        g_n2_measure: g_n2,
        g_n2_bound: bound,
        ledger,
        holds,
    })
}
