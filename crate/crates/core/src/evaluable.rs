use crate::error::Result;
use crate::function_model::FunctionModel;
use crate::real::Real;

/// A real function on a closed interval that can be evaluated pointwise.
pub trait Evaluable: Send + Sync {
    fn domain(&self) -> (Real, Real);
    fn eval(&self, x: &Real) -> Result<Real>;
}

impl Evaluable for FunctionModel {
    fn domain(&self) -> (Real, Real) {
        FunctionModel::domain(self)
    }

    fn eval(&self, x: &Real) -> Result<Real> {
        self.evaluate(x)
    }
}

/// `n + 1` equally spaced points from `a` to `b` (exact when `a`, `b` are).
pub fn uniform_grid(a: &Real, b: &Real, n: usize) -> Vec<Real> {
    let n = n.max(1);
    let w = b - a;
    let nr = Real::int(n as i64);
    (0..=n)
        .map(|i| {
            if i == n {
                b.clone()
            } else {
                a + &(&w * &Real::int(i as i64) / &nr)
            }
        })
        .collect()
}

/// Number of uniform points on verification grids.
pub const VERIFICATION_POINTS: usize = 4096;

/// `VERIFICATION_POINTS` uniform points plus every piece and segment knot.
pub fn verification_grid(model: &FunctionModel) -> Vec<Real> {
    let (a, b) = model.domain();
    let mut g = uniform_grid(&a, &b, VERIFICATION_POINTS - 1);
    g.extend(model.knots());
    if let Ok(seg) = model.segmentation() {
        g.extend(seg.runs().iter().map(|r| r.lo.clone()));
    }
    g.sort();
    g.dedup();
    g
}
