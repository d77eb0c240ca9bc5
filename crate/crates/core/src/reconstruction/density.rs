use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluable::{uniform_grid, verification_grid};
use crate::function_model::FunctionModel;
use crate::measure::{image_measure, Interval, IntervalSet};
use crate::real::Real;
use crate::variation::VariationFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    MonotoneDensity,
    ShiftedMonotone,
    BvDifference,
}

/// A sampled density `f` with `F(x) ≈ F(a) + ∫_a^x f`.
///
/// `values[j]` is the forward quotient `ν([x_j, x_j + h]) / h` (the left
/// window at `b`); `left_values[j]` is `ν([x_j - h, x_j]) / h`, the forward
/// quotient at `x_j - h` (the right window at `a`). Every quotient is
/// placed at the left end of its window, and a cell `[x_j, x_{j+1}]` is
/// integrated along the line through its two inside samples, at `x_j` and
/// `x_{j+1} - h`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityGrid {
    pub grid: Vec<Real>,
    pub values: Vec<Real>,
    pub left_values: Vec<Real>,
    pub h: Real,
    pub method: DensityMethod,
    /// `∫_a^{x_j} f`, cached for `integrate`.
    #[serde(skip)]
    prefix: Vec<Real>,
}

impl DensityGrid {
    fn new(
        grid: Vec<Real>,
        values: Vec<Real>,
        left_values: Vec<Real>,
        h: Real,
        method: DensityMethod,
    ) -> DensityGrid {
        let mut prefix = Vec::with_capacity(grid.len());
        prefix.push(Real::zero());
        for j in 1..grid.len() {
            let cell = cell_area(
                &grid[j - 1],
                &grid[j],
                &values[j - 1],
                &left_values[j],
                &grid[j],
                &h,
            );
            let next = &prefix[j - 1] + &cell;
            prefix.push(next);
        }
        DensityGrid {
            grid,
            values,
            left_values,
            h,
            method,
            prefix,
        }
    }

    fn combine(
        &self,
        other: &DensityGrid,
        op: impl Fn(&Real, &Real) -> Real,
        method: DensityMethod,
    ) -> DensityGrid {
        let zip =
            |a: &[Real], b: &[Real]| a.iter().zip(b).map(|(x, y)| op(x, y)).collect::<Vec<_>>();
        DensityGrid::new(
            self.grid.clone(),
            zip(&self.values, &other.values),
            zip(&self.left_values, &other.left_values),
            self.h.clone(),
            method,
        )
    }

    /// `∫_a^x f`, piecewise linear between the inside samples of each cell.
    pub fn integrate(&self, x: &Real) -> Result<Real> {
        let (a, b) = (&self.grid[0], &self.grid[self.grid.len() - 1]);
        if x < a || x > b {
            return Err(Error::OutOfDomain {
                x: x.clone(),
                a: a.clone(),
                b: b.clone(),
            });
        }
        let j = self.grid.partition_point(|g| g <= x) - 1;
        if self.grid[j] == *x {
            return Ok(self.prefix[j].clone());
        }
        let part = cell_area(
            &self.grid[j],
            &self.grid[j + 1],
            &self.values[j],
            &self.left_values[j + 1],
            x,
            &self.h,
        );
        Ok(&self.prefix[j] + &part)
    }
}

/// Area over `[lo, x]` under the line through `(lo, f_lo)` and
/// `(hi - h, f_hi)`.
fn cell_area(lo: &Real, hi: &Real, f_lo: &Real, f_hi: &Real, x: &Real, h: &Real) -> Real {
    let w = x - lo;
    let slope = (f_hi - f_lo) / (hi - h - lo);
    f_lo * &w + slope * &w * &w / Real::int(2)
}

/// `n + 1` uniform points on the model's domain.
pub fn density_grid(model: &FunctionModel, cells: usize) -> Vec<Real> {
    let (a, b) = model.domain();
    uniform_grid(&a, &b, cells)
}

/// The default window: a quarter of the smallest grid spacing.
pub fn default_window(grid: &[Real]) -> Result<Real> {
    let spacing = min_spacing(grid)?;
    Ok(spacing / Real::int(4))
}

fn min_spacing(grid: &[Real]) -> Result<Real> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "density grid needs at least two increasing points".into(),
        ));
    }
    Ok(grid
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .min()
        .expect("two points"))
}

fn check_setup(model: &FunctionModel, grid: &[Real], h: &Real) -> Result<()> {
    let spacing = min_spacing(grid)?;
    if *h <= Real::zero() || *h >= spacing {
        return Err(Error::Precondition(format!(
            "window {h} must be positive and below the grid spacing {spacing}"
        )));
    }
    if grid[0] != *model.a() || grid[grid.len() - 1] != *model.b() {
        return Err(Error::Precondition(format!(
            "density grid must run from {} to {}",
            model.a(),
            model.b()
        )));
    }
    Ok(())
}

/// `ν([x, x + h]) / h` with `ν(E) = λ(F(E))`, for non-decreasing `F`.
pub fn monotone_density(model: &FunctionModel, grid: &[Real], h: &Real) -> Result<DensityGrid> {
    check_setup(model, grid, h)?;
    if !model.segmentation()?.is_non_decreasing() {
        return Err(Error::Precondition(
            "monotone_density needs a non-decreasing model".into(),
        ));
    }
    let (a, b) = model.domain();
    let quotient = |lo: Real, hi: Real| -> Result<Real> {
        Ok(image_measure(model, &IntervalSet::single(Interval::closed(lo, hi)))? / h)
    };
    let pairs = grid
        .par_iter()
        .map(|x| -> Result<(Real, Real)> {
            let fwd = if *x == b { x - h } else { x.clone() };
            let bwd = if *x == a { x.clone() } else { x - h };
            Ok((
                quotient(fwd.clone(), &fwd + h)?,
                quotient(bwd.clone(), &bwd + h)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (values, left_values) = pairs.into_iter().unzip();
    Ok(DensityGrid::new(
        grid.to_vec(),
        values,
        left_values,
        h.clone(),
        DensityMethod::MonotoneDensity,
    ))
}

/// `f = f₁ - 1` where `f₁` is the monotone density of `G = F + x`, checked
/// against the direct monotone density within `2 h Lip` on the grid.
pub fn shifted_monotone_density(
    model: &FunctionModel,
    grid: &[Real],
    h: &Real,
) -> Result<DensityGrid> {
    let g = model.shift_add_identity();
    let f1 = monotone_density(&g, grid, h)?;
    let one = Real::one();
    let shifted = DensityGrid::new(
        f1.grid,
        f1.values.iter().map(|v| v - &one).collect(),
        f1.left_values.iter().map(|v| v - &one).collect(),
        h.clone(),
        DensityMethod::ShiftedMonotone,
    );
    let direct = monotone_density(model, grid, h)?;
    let allowance =
        Real::Float(2.0 * h.to_f64() * model.lipschitz_estimate()? + 10.0 * model.tol());
    for (j, (s, d)) in shifted.values.iter().zip(&direct.values).enumerate() {
        if (s - d).abs() > allowance {
            return Err(Error::InvariantViolation(format!(
                "shifted density {s} and direct density {d} disagree at {}",
                shifted.grid[j]
            )));
        }
    }
    Ok(shifted)
}

/// `f = g - h` where `g`, `h` are the shifted monotone densities of the
/// variation parts `p` and `n`.
pub fn bv_density(model: &FunctionModel, grid: &[Real], h: &Real, tol: f64) -> Result<DensityGrid> {
    check_setup(model, grid, h)?;
    let p = VariationFunction::new(model, tol)?;
    let g = shifted_monotone_density(&p.p_model()?, grid, h)?;
    let hn = shifted_monotone_density(&p.n_model()?, grid, h)?;
    Ok(g.combine(&hn, |x, y| x - y, DensityMethod::BvDifference))
}

/// `∫_a^x f` for a sampled density.
pub fn integrate(density: &DensityGrid, x: &Real) -> Result<Real> {
    density.integrate(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionReport {
    /// `max |F(x) - F(a) - ∫_a^x f|` over the verification grid.
    pub sup_error: Real,
    pub argmax: Real,
    pub h: Real,
    pub grid_points: usize,
    pub method: DensityMethod,
}

pub fn reconstruction_error(
    model: &FunctionModel,
    density: &DensityGrid,
) -> Result<ReconstructionReport> {
    let fa = model.evaluate(model.a())?;
    let pts = verification_grid(model);
    let errs = pts
        .par_iter()
        .map(|x| Ok((model.evaluate(x)? - &fa - density.integrate(x)?).abs()))
        .collect::<Result<Vec<Real>>>()?;
    let mut best = 0;
    for (i, e) in errs.iter().enumerate() {
        if *e > errs[best] {
            best = i;
        }
    }
    Ok(ReconstructionReport {
        sup_error: errs[best].clone(),
        argmax: pts[best].clone(),
        h: density.h.clone(),
        grid_points: density.grid.len(),
        method: density.method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::build_cantor_iterate;

    fn q(n: i64, d: i64) -> Real {
        Real::ratio(n, d)
    }

    fn at(d: &DensityGrid, x: &Real) -> Real {
        d.values[d.grid.iter().position(|g| g == x).unwrap()].clone()
    }

    #[test]
    fn identity_density_is_one() {
        let id = FunctionModel::identity(Real::zero(), Real::one());
        let grid = density_grid(&id, 16);
        let h = q(1, 1024);
        let d = monotone_density(&id, &grid, &h).unwrap();
        assert!(d.values.iter().all(|v| *v == Real::one()));
        let s = shifted_monotone_density(&id, &grid, &h).unwrap();
        assert!(s.values.iter().all(|v| *v == Real::one()));
        assert_eq!(integrate(&d, &q(7, 10)).unwrap(), q(7, 10));
    }

    #[test]
    fn square_quotient_at_one_half() {
        let sq = FunctionModel::polynomial(vec![0.0, 0.0, 1.0], Real::zero(), Real::one());
        let grid = density_grid(&sq, 2);
        let h = Real::Float(2f64.powi(-10));
        let d = monotone_density(&sq, &grid, &h).unwrap();
        assert_eq!(d.values[1].to_f64(), 1.0009765625);
        let s = shifted_monotone_density(&sq, &grid, &h).unwrap();
        assert!((s.values[1].to_f64() - 1.0009765625).abs() < 1e-9);
    }

    #[test]
    fn cantor_plateau_density_is_zero() {
        let c = build_cantor_iterate(2);
        let grid = density_grid(&c, 18);
        let d = monotone_density(&c, &grid, &default_window(&grid).unwrap()).unwrap();
        assert_eq!(at(&d, &q(1, 2)), Real::zero());
        assert_eq!(at(&d, &Real::zero()), q(9, 4));
    }

    #[test]
    fn constant_shift_density() {
        let z = FunctionModel::piecewise_linear(&[(q(0, 1), q(0, 1)), (q(1, 1), q(0, 1))]).unwrap();
        let grid = density_grid(&z, 8);
        let s = shifted_monotone_density(&z, &grid, &q(1, 64)).unwrap();
        assert!(s.values.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn bv_density_examples() {
        let neg =
            FunctionModel::piecewise_linear(&[(q(0, 1), q(0, 1)), (q(1, 1), q(-1, 1))]).unwrap();
        let grid = density_grid(&neg, 8);
        let d = bv_density(&neg, &grid, &q(1, 64), 0.0).unwrap();
        assert!(d.values.iter().all(|v| *v == Real::int(-1)));

        let z = crate::variation::tests::zigzag();
        let grid = density_grid(&z, 8);
        let d = bv_density(&z, &grid, &q(1, 64), 0.0).unwrap();
        assert_eq!(at(&d, &q(3, 8)), Real::int(-4));
        let r = reconstruction_error(&z, &d).unwrap();
        assert_eq!(r.sup_error, Real::zero());
    }

    #[test]
    fn integrate_linear_density() {
        // f = 2t sampled exactly at the window starts, so each cell is exact
        let grid = uniform_grid(&Real::zero(), &Real::one(), 8);
        let h = q(1, 64);
        let vals: Vec<Real> = grid.iter().map(|x| x * &Real::int(2)).collect();
        let left: Vec<Real> = grid.iter().map(|x| (x - &h) * Real::int(2)).collect();
        let d = DensityGrid::new(grid, vals, left, h, DensityMethod::MonotoneDensity);
        assert_eq!(d.integrate(&Real::one()).unwrap(), Real::one());
        assert_eq!(d.integrate(&q(3, 10)).unwrap(), q(9, 100));
        assert!(d.integrate(&q(11, 10)).is_err());
    }

    #[test]
    fn square_error_is_first_order_in_h() {
        let sq = FunctionModel::polynomial(vec![0.0, 0.0, 1.0], Real::zero(), Real::one());
        let grid = density_grid(&sq, 1 << 12);
        let h = default_window(&grid).unwrap();
        let e1 = reconstruction_error(&sq, &bv_density(&sq, &grid, &h, 1e-12).unwrap()).unwrap();
        assert!(e1.sup_error.to_f64() <= 2f64.powi(-9));
        let h2 = &h / &Real::int(2);
        let e2 = reconstruction_error(&sq, &bv_density(&sq, &grid, &h2, 1e-12).unwrap()).unwrap();
        let ratio = e2.sup_error.to_f64() / e1.sup_error.to_f64();
        assert!((0.4..=0.6).contains(&ratio), "{ratio}");
    }

    #[test]
    fn window_must_fit_the_grid() {
        let id = FunctionModel::identity(Real::zero(), Real::one());
        let grid = density_grid(&id, 4);
        assert!(matches!(
            monotone_density(&id, &grid, &q(1, 2)),
            Err(Error::Precondition(_))
        ));
    }
}
