//! Interval-set arithmetic, image measures and Lusin probes.

mod image;
mod interval_set;
mod lusin;

pub use image::{cover_image, image_measure, image_set};
pub use interval_set::{Interval, IntervalSet};
pub use lusin::{lusin_probe, LusinLevel, LusinReport, LusinVerdict, NullSetFamily};
