//! Verification toolkit for Einstein conditions on statistical manifolds.

pub mod catalog;
pub mod einstein2d;
pub mod exec;
pub mod infogeo;
pub mod linalg;
pub mod sampling;
pub mod symbolic;
pub mod symmetry;
