//! Spherical functions, orbit hypergroups and biinvariant random walks on
//! Weyl chambers of type A, B, C and D.

pub mod cli;
pub mod error;
pub mod hypergroup_mc;
pub mod linalg;
pub mod logsum;
pub mod matrix_kernels;
pub mod random_walk;
pub mod rng;
pub mod root_system;
pub mod selftest;
pub mod special_functions;
pub mod stats;

pub use error::{Error, Result};
pub use root_system::{build_root_system, chamber_project, ChamberPoint, RootFamily, RootSystem, WeylElement};
pub use special_functions::{m1_closed, semicharacter, spherical_phi, spherical_psi, SphericalValue};
