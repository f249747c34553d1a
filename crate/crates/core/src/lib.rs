//! Lie-derivative calculus for tensor fields carried by a fluid motion.
//!
//! The crate is organised bottom-up:
//!
//! * [`kinematics`]: flow maps, velocity gradients, deformation gradients
//!   (closed form, finite difference and RK4-evolved) and mass density.
//! * [`tensor`]: variance-tagged values, push-forward / pull-back, fields
//!   transported by a flow and the fields derived from them.
//! * [`lie`]: numerical Lie derivatives for every variance, vorticity and
//!   the Helmholtz residual, and the exterior-derivative commutation defect.
//! * [`integrals`]: material curves, surfaces and volumes with circulation,
//!   flux and volume integrals.
//! * [`conservation`]: divergence-form residuals, the Clebsch construction
//!   and the electro/magnetodynamic transport laws.
//! * [`expr`]: a small expression language used to define fields in
//!   configuration files.
//! * [`standard`]: the reference fields and witnesses used by the checks.
//!
//! All points are three-dimensional. Covectors are stored as row vectors and
//! act on the left; vectors are columns.

pub mod conservation;
pub mod error;
pub mod expr;
pub mod fd;
pub mod integrals;
pub mod kinematics;
pub mod lie;
pub mod report;
pub mod standard;
pub mod tensor;

pub use error::{Error, Result};

/// A point of the reference or the current configuration.
pub type Point = nalgebra::Vector3<f64>;
/// A contravariant 3-vector.
pub type Vec3 = nalgebra::Vector3<f64>;
/// A covariant 3-vector (row).
pub type Covec3 = nalgebra::RowVector3<f64>;
/// A 3×3 real matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
