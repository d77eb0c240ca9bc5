//! Density recovery from image measures, and the absolute-continuity
//! modulus.

mod density;
mod modulus;

pub use density::{
    bv_density, default_window, density_grid, integrate, monotone_density, reconstruction_error,
    shifted_monotone_density, DensityGrid, DensityMethod, ReconstructionReport,
};
pub use modulus::{ac_modulus, AcVerdict, ModulusReport, ModulusSample, PROFILE_CELLS};
