use crate::error::{Error, Result};
use crate::evaluable::{verification_grid, Evaluable};
use crate::function_model::{Direction, FunctionModel, Run};
use crate::real::Real;

use super::total_variation;

/// `p(x) = V_a^x(F)`, with the variation memoized at run starts so each
/// evaluation is one lookup plus one model evaluation.
#[derive(Clone, Debug)]
pub struct VariationFunction {
    model: FunctionModel,
    runs: Vec<Run>,
    /// `cumulative[i]` is `p` at the start of run `i`.
    cumulative: Vec<Real>,
}

impl VariationFunction {
    pub fn new(model: &FunctionModel, tol: f64) -> Result<VariationFunction> {
        if model.has_unresolved_oscillation() {
            // surfaces the not-BV / unresolved error with its bound
            total_variation(model, model.b(), tol)?;
        }
        let seg = model.segmentation()?;
        let runs = seg.runs().to_vec();
        let mut cumulative = Vec::with_capacity(runs.len());
        let mut acc = Real::zero();
        for r in &runs {
            cumulative.push(acc.clone());
            acc = acc + r.rise();
        }
        Ok(VariationFunction {
            model: model.clone(),
            runs,
            cumulative,
        })
    }

    pub fn model(&self) -> &FunctionModel {
        &self.model
    }

    /// `V_a^b(F)`.
    pub fn total(&self) -> Real {
        match self.runs.last() {
            Some(r) => self.cumulative[self.cumulative.len() - 1].clone() + r.rise(),
            None => Real::zero(),
        }
    }

    /// Points where `p` changes slope: the run boundaries.
    pub fn knots(&self) -> Vec<Real> {
        let mut k: Vec<Real> = self.runs.iter().map(|r| r.lo.clone()).collect();
        k.push(self.model.b().clone());
        k
    }

    /// `p` as a piecewise model with one piece per monotone run of `F`.
    pub fn p_model(&self) -> Result<FunctionModel> {
        self.run_model(|run, cum| match run.direction {
            Direction::Increasing => (1, cum - &run.f_lo),
            Direction::Decreasing => (-1, cum + &run.f_lo),
            Direction::Constant => (0, cum.clone()),
        })
    }

    /// `n = p - F` as a piecewise model.
    pub fn n_model(&self) -> Result<FunctionModel> {
        self.run_model(|run, cum| match run.direction {
            Direction::Increasing | Direction::Constant => (0, cum - &run.f_lo),
            Direction::Decreasing => (-2, cum + &run.f_lo),
        })
    }

    fn run_model<T: Fn(&Run, &Real) -> (i64, Real)>(&self, t: T) -> Result<FunctionModel> {
        let pieces = self
            .runs
            .iter()
            .zip(&self.cumulative)
            .map(|(run, cum)| {
                let (sign, shift) = t(run, cum);
                self.model.pieces()[run.piece].signed_shift(
                    sign,
                    &shift,
                    run.lo.clone(),
                    run.hi.clone(),
                )
            })
            .collect();
        FunctionModel::new(pieces, self.model.mode())
    }

    /// `p(x)` together with `F(x)`.
    pub fn eval_with_f(&self, x: &Real) -> Result<(Real, Real)> {
        let f = self.model.evaluate(x)?;
        let x = self.model.coerce(x);
        let i = self
            .runs
            .partition_point(|r| r.hi < x)
            .min(self.runs.len() - 1);
        let p = &self.cumulative[i] + &(&f - &self.runs[i].f_lo).abs();
        Ok((p, f))
    }
}

impl Evaluable for VariationFunction {
    fn domain(&self) -> (Real, Real) {
        self.model.domain()
    }

    fn eval(&self, x: &Real) -> Result<Real> {
        Ok(self.eval_with_f(x)?.0)
    }
}

/// `n = p - F`.
#[derive(Clone, Debug)]
pub struct NegativeVariation {
    p: VariationFunction,
}

impl NegativeVariation {
    pub fn new(p: VariationFunction) -> NegativeVariation {
        NegativeVariation { p }
    }
}

impl Evaluable for NegativeVariation {
    fn domain(&self) -> (Real, Real) {
        self.p.domain()
    }

    fn eval(&self, x: &Real) -> Result<Real> {
        let (p, f) = self.p.eval_with_f(x)?;
        Ok(p - f)
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub p: VariationFunction,
    pub n: NegativeVariation,
    pub source: FunctionModel,
}

impl Decomposition {
    /// `(p(x), n(x))`.
    pub fn eval(&self, x: &Real) -> Result<(Real, Real)> {
        let (p, f) = self.p.eval_with_f(x)?;
        let n = &p - &f;
        Ok((p, n))
    }
}

/// `F = p - n` with both parts checked non-decreasing on the verification
/// grid (exactly in rational mode, within `10 tol` in float mode).
pub fn jordan_decomposition(model: &FunctionModel, tol: f64) -> Result<Decomposition> {
    let p = VariationFunction::new(model, tol)?;
    let n = NegativeVariation::new(p.clone());
    let d = Decomposition {
        p,
        n,
        source: model.clone(),
    };
    let slack = Real::Float(-10.0 * model.tol().max(tol));
    let slack = if model.is_exact() {
        Real::zero()
    } else {
        slack
    };
    let mut prev: Option<(Real, Real, Real)> = None;
    for x in verification_grid(model) {
        let (pv, nv) = d.eval(&x)?;
        if let Some((px, pp, pn)) = &prev {
            if &pv - pp < slack || &nv - pn < slack {
                return Err(Error::InvariantViolation(format!(
                    "decomposition not monotone between {px} and {x}"
                )));
            }
        }
        prev = Some((x, pv, nv));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::build_cantor_iterate;

    fn q(n: i64, d: i64) -> Real {
        Real::ratio(n, d)
    }

    #[test]
    fn variation_function_examples() {
        let z = super::super::tests::zigzag();
        let p = VariationFunction::new(&z, 0.0).unwrap();
        assert_eq!(p.eval(&q(3, 8)).unwrap(), q(3, 2));
        assert_eq!(p.eval(&Real::zero()).unwrap(), Real::zero());
        assert_eq!(p.total(), Real::int(4));

        let neg =
            FunctionModel::piecewise_linear(&[(q(0, 1), q(0, 1)), (q(1, 1), q(-1, 1))]).unwrap();
        let p = VariationFunction::new(&neg, 0.0).unwrap();
        assert_eq!(p.eval(&q(2, 5)).unwrap(), q(2, 5));
    }

    #[test]
    fn decomposition_examples() {
        let neg =
            FunctionModel::piecewise_linear(&[(q(0, 1), q(0, 1)), (q(1, 1), q(-1, 1))]).unwrap();
        let d = jordan_decomposition(&neg, 0.0).unwrap();
        assert_eq!(d.eval(&q(1, 3)).unwrap(), (q(1, 3), q(2, 3)));

        let z = super::super::tests::zigzag();
        let d = jordan_decomposition(&z, 0.0).unwrap();
        assert_eq!(d.eval(&Real::one()).unwrap(), (Real::int(4), Real::int(4)));

        let c = build_cantor_iterate(4);
        let d = jordan_decomposition(&c, 0.0).unwrap();
        for x in [q(1, 7), q(1, 2), q(25, 27)] {
            let (p, n) = d.eval(&x).unwrap();
            assert_eq!(p, c.evaluate(&x).unwrap());
            assert_eq!(n, Real::zero());
        }
    }

    #[test]
    fn p_and_n_models_match_pointwise() {
        let z = super::super::tests::zigzag();
        let p = VariationFunction::new(&z, 0.0).unwrap();
        let (pm, nm) = (p.p_model().unwrap(), p.n_model().unwrap());
        for i in 0..=16 {
            let x = q(i, 16);
            let (pv, f) = p.eval_with_f(&x).unwrap();
            assert_eq!(pm.evaluate(&x).unwrap(), pv);
            assert_eq!(nm.evaluate(&x).unwrap(), &pv - &f);
        }
        assert!(pm.is_continuous() && nm.is_continuous());
        assert!(pm.segmentation().unwrap().is_non_decreasing());

        let cube =
            FunctionModel::polynomial(vec![0.0, -1.0, 0.0, 1.0], Real::int(-2), Real::int(2));
        let p = VariationFunction::new(&cube, 1e-12).unwrap();
        let pm = p.p_model().unwrap();
        for i in 0..=40 {
            let x = Real::Float(-2.0 + 0.1 * i as f64);
            assert!(pm
                .evaluate(&x)
                .unwrap()
                .approx_eq(&p.eval(&x).unwrap(), 1e-12));
        }
    }

    #[test]
    fn not_bv_is_reported() {
        let xs = FunctionModel::x_sin(1.0, Real::zero(), Real::one()).unwrap();
        assert!(matches!(
            jordan_decomposition(&xs, 1e-9),
            Err(Error::NotBv { .. })
        ));
    }
}
