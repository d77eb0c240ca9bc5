use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluable::{verification_grid, Evaluable};
use crate::function_model::FunctionModel;
use crate::real::Real;

use super::{partition_sum, total_variation, Partition, VariationFunction};

/// `u_ε`: on the cell `[x_{i-1}, x_i]` of the base partition,
/// `u_ε(x) = |F(P_1(x))| = Σ_{k<i} |F(x_k) - F(x_{k-1})| + |F(x) - F(x_{i-1})|`.
#[derive(Clone, Debug, Serialize)]
pub struct UniformApprox {
    pub epsilon: Real,
    pub base_partition: Partition,
    /// `V_a^b(F) - |F(P)|`, below `epsilon`.
    pub deficit: Real,
    /// Largest `p(x) - u_ε(x)` seen on the verification grid.
    pub sup_gap: Real,
    #[serde(skip)]
    model: FunctionModel,
    #[serde(skip)]
    values: Vec<Real>,
    #[serde(skip)]
    prefix: Vec<Real>,
}

impl UniformApprox {
    fn build(
        model: &FunctionModel,
        epsilon: Real,
        p: Partition,
        total: &Real,
    ) -> Result<UniformApprox> {
        let values = p
            .points()
            .iter()
            .map(|x| model.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        let mut prefix = vec![Real::zero()];
        for w in values.windows(2) {
            let next = &prefix[prefix.len() - 1] + &(&w[1] - &w[0]).abs();
            prefix.push(next);
        }
        let deficit = total - &prefix[prefix.len() - 1];
        Ok(UniformApprox {
            epsilon,
            base_partition: p,
            deficit,
            sup_gap: Real::zero(),
            model: model.clone(),
            values,
            prefix,
        })
    }

    /// Index `i` of the cell `[x_{i-1}, x_i]` holding `x` (left cell at knots).
    pub fn cell_of(&self, x: &Real) -> usize {
        let pts = self.base_partition.points();
        pts.partition_point(|p| p < x).clamp(1, pts.len() - 1)
    }
}

impl Evaluable for UniformApprox {
    fn domain(&self) -> (Real, Real) {
        self.model.domain()
    }

    fn eval(&self, x: &Real) -> Result<Real> {
        let f = self.model.evaluate(x)?;
        if self.base_partition.len() == 1 {
            return Ok(Real::zero());
        }
        let i = self.cell_of(x);
        Ok(&self.prefix[i - 1] + &(&f - &self.values[i - 1]).abs())
    }
}

/// Greedy coarsening of the turning-point partition: repeatedly drop the
/// interior point whose removal loses least (ties: smallest `x`) while the
/// accumulated deficit stays below `epsilon`.
pub fn coarsened_partition(model: &FunctionModel, epsilon: &Real) -> Result<Partition> {
    let full = total_variation(model, model.b(), model.tol())?;
    let pts = full.achieving_partition.points().to_vec();
    let vals = pts
        .iter()
        .map(|x| model.evaluate(x))
        .collect::<Result<Vec<_>>>()?;
    let n = pts.len();
    let mut prev: Vec<usize> = (0..n).map(|i| i.wrapping_sub(1)).collect();
    let mut next: Vec<usize> = (1..=n).collect();
    let mut alive = vec![true; n];
    let mut version = vec![0u32; n];
    let loss = |i: usize, prev: &[usize], next: &[usize]| -> Real {
        let (l, r) = (prev[i], next[i]);
        (&vals[i] - &vals[l]).abs() + (&vals[r] - &vals[i]).abs() - (&vals[r] - &vals[l]).abs()
    };
    let mut heap = BinaryHeap::new();
    for i in 1..n.saturating_sub(1) {
        heap.push(Reverse((loss(i, &prev, &next), i, 0u32)));
    }
    let mut deficit = Real::zero();
    while let Some(Reverse((l, i, v))) = heap.pop() {
        if !alive[i] || v != version[i] {
            continue;
        }
        if &deficit + &l >= *epsilon {
            break;
        }
        deficit = deficit + l;
        alive[i] = false;
        let (lp, rn) = (prev[i], next[i]);
        next[lp] = rn;
        prev[rn] = lp;
        for j in [lp, rn] {
            if j != 0 && j != n - 1 {
                version[j] += 1;
                heap.push(Reverse((loss(j, &prev, &next), j, version[j])));
            }
        }
    }
    Partition::new(
        pts.into_iter()
            .zip(alive)
            .filter_map(|(p, keep)| keep.then_some(p))
            .collect(),
    )
}

/// `u_ε` on the turning-point partition, which achieves `V_a^b(F)` exactly,
/// checked against `0 <= p - u_ε < ε` on the verification grid.
pub fn uniform_approx(model: &FunctionModel, epsilon: &Real) -> Result<UniformApprox> {
    let full = total_variation(model, model.b(), model.tol())?;
    uniform_approx_with_partition(model, epsilon, full.achieving_partition)
}

/// `u_ε` on a caller-chosen partition of `[a, b]`, which must satisfy
/// `V_a^b(F) - |F(P)| < ε`.
pub fn uniform_approx_with_partition(
    model: &FunctionModel,
    epsilon: &Real,
    partition: Partition,
) -> Result<UniformApprox> {
    if *epsilon <= Real::zero() {
        return Err(Error::Precondition(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if partition.first() != model.a() || partition.last() != model.b() {
        return Err(Error::InvalidPartition(format!(
            "base partition must run from {} to {}",
            model.a(),
            model.b()
        )));
    }
    let p = VariationFunction::new(model, model.tol())?;
    let total = p.total();
    let mut u = UniformApprox::build(model, epsilon.clone(), partition, &total)?;
    debug_assert_eq!(
        u.prefix[u.prefix.len() - 1],
        partition_sum(model, &u.base_partition)?
    );
    if u.deficit >= *epsilon {
        return Err(Error::Precondition(format!(
            "partition leaves a variation deficit {} >= epsilon {epsilon}",
            u.deficit
        )));
    }
    let allowance = if model.is_exact() {
        Real::zero()
    } else {
        Real::Float(10.0 * model.tol())
    };
    let neg_allowance = -&allowance;
    let mut sup = Real::zero();
    for x in verification_grid(model) {
        let gap = p.eval(&x)? - u.eval(&x)?;
        if gap < neg_allowance || gap >= *epsilon {
            return Err(Error::InvariantViolation(format!(
                "p - u_eps = {gap} at {x} leaves [0, {epsilon})"
            )));
        }
        sup = sup.max(gap);
    }
    u.sup_gap = sup;
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::build_cantor_iterate;

    fn q(n: i64, d: i64) -> Real {
        Real::ratio(n, d)
    }

    #[test]
    fn zigzag_approx_is_exact() {
        let z = super::super::tests::zigzag();
        let u = uniform_approx(&z, &q(1, 10)).unwrap();
        assert_eq!(u.sup_gap, Real::zero());
        assert_eq!(u.eval(&q(3, 8)).unwrap(), q(3, 2));
        assert_eq!(u.base_partition.len(), 5);
    }

    #[test]
    fn cantor_approx_is_exact() {
        let c = build_cantor_iterate(2);
        let u = uniform_approx(&c, &q(1, 8)).unwrap();
        assert_eq!(u.deficit, Real::zero());
        assert_eq!(u.sup_gap, Real::zero());
    }

    #[test]
    fn coarsening_respects_the_budget() {
        // a big swing with small wiggles on the way up
        let m = FunctionModel::piecewise_linear(&[
            (q(0, 1), q(0, 1)),
            (q(1, 4), q(1, 2)),
            (q(3, 8), q(9, 20)),
            (q(1, 2), q(1, 1)),
            (q(5, 8), q(19, 20)),
            (q(1, 1), q(2, 1)),
        ])
        .unwrap();
        // V = 11/5; each interior point costs 1/10 on removal
        let p = coarsened_partition(&m, &q(1, 2)).unwrap();
        assert_eq!(p.points(), &[q(0, 1), q(1, 1)]);
        let u = uniform_approx_with_partition(&m, &q(1, 2), p).unwrap();
        assert_eq!(u.deficit, q(1, 5));
        assert!(u.sup_gap < q(1, 2));

        let p = coarsened_partition(&m, &q(1, 5)).unwrap();
        assert_eq!(p.points(), &[q(0, 1), q(1, 2), q(5, 8), q(1, 1)]);
        let p = coarsened_partition(&m, &q(1, 10)).unwrap();
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn bad_partition_is_refused() {
        let z = super::super::tests::zigzag();
        let p = Partition::new(vec![Real::zero(), Real::one()]).unwrap();
        assert!(matches!(
            uniform_approx_with_partition(&z, &q(1, 10), p),
            Err(Error::Precondition(_))
        ));
    }
}
