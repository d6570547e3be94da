//! Kinematics of planar 3-RPR parallel manipulators.
//!
//! The forward kinematics are solved through a characteristic polynomial in
//! `t = tan(phi/2)` built so that it stays valid where the linear system for
//! the platform position is singular. Such singular orientations are
//! detected, and the two positions they carry are recovered separately. The
//! degenerate-manipulator family, whose linear system is singular
//! everywhere, is solved through a cubic. A brute-force sweep over the
//! orientation serves as an independent check.
//!
//! ```
//! use std::f64::consts::PI;
//! use rpr3_core::{forward_kinematics, Geometry, JointVector};
//!
//! let g = Geometry::new(1.0, 0.0, 1.0, 1.0, 1.0, -PI / 2.0).unwrap();
//! let j = JointVector::new(0.8, 1.5, 1.5).unwrap();
//! assert_eq!(forward_kinematics(&g, &j).unwrap().len(), 6);
//! ```

pub mod analytic;
pub mod charpoly;
pub mod degeneracy;
pub mod error;
pub mod model;
pub mod oracle;
pub mod polynomial;
pub mod solution;

pub use analytic::{classify_family, cubic_characteristic, forward_kinematics_family, FamilyClass, FamilyKind};
pub use charpoly::{characteristic_polynomial, forward_kinematics, linear_coeffs, solve_forward};
pub use degeneracy::{check_degenerate_input, degenerate_orientations, DegenerateInput, DegenerateOrientations};
pub use error::{Error, Result};
pub use model::{inverse_kinematics, residuals, Geometry, HalfAngle, JointVector, Pose};
pub use oracle::{sweep_fk, SweepConfig};
pub use polynomial::{Polynomial, Root, RootOptions};
pub use solution::{Diagnostic, FkOptions, FkSolution, ForwardSolution, RootKind, Route};
