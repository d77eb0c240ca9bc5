//! Workloads shared by the criterion benches.

use bvkit::function_model::build_cantor_iterate;
use bvkit::{FunctionModel, IntervalSet, NullSetFamily, Real};

pub fn cantor(k: u32) -> FunctionModel {
    build_cantor_iterate(k)
}

pub fn zigzag(teeth: i64) -> FunctionModel {
    let nodes: Vec<(Real, Real)> = (0..=2 * teeth)
        .map(|i| (Real::ratio(i, 2 * teeth), Real::int(i % 2)))
        .collect();
    FunctionModel::piecewise_linear(&nodes).unwrap()
}

/// Level `k` of the Cantor family on `[0, 1]`.
pub fn cantor_set(k: u32) -> IntervalSet {
    NullSetFamily::CantorLevels.level(k, &Real::zero(), &Real::one())
}
