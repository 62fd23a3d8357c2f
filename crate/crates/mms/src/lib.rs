//! Matched-section solver for energy-optimal surface reconstruction.
//!
//! Reconstructs a smooth surface over a rectangular domain as the solution of
//! a plate-bending (biharmonic) problem: the domain is tiled with rectangular
//! elements, each modeled by two coupled one-dimensional sections, and the
//! section states are matched across element edges into one sparse linear
//! system. Boundary data comes from an analytic reference surface or from
//! tabulated samples; interior data enters through point constraints with
//! optional load spreading.
//!
//! Start with [`mesh::MeshSpec`] and [`assembly::solve`], or run one of the
//! examples (`cargo run --release --example corner_plate`).

pub mod assembly;
pub mod boundary;
pub mod cli;
pub mod constraints;
pub mod element;
pub mod error;
pub mod fields;
pub mod mesh;
pub mod surfaces;

pub use error::{Error, Result};
