//! Discrete reflectivity of finite perfectly matched layers under a
//! second-order finite-difference Helmholtz discretization, and selection of
//! absorption profiles by Nelder-Mead minimization of the angle-averaged
//! reflectivity.

pub mod error;
pub mod numerics;
pub mod objective;
pub mod optimizer;
pub mod profiles;
pub mod published;
pub mod reflectivity;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use objective::{average_reflectivity, ObjectiveSpec};
pub use optimizer::{nelder_mead, optimize_profile, OptResult, SimplexConfig, Termination};
pub use profiles::{CoefficientVector, Family, Profile};
pub use reflectivity::{GridSpec, Incidence, ReflectionResult, Sampling};
