//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("matching system is singular for element {a} x {b}")]
    DegenerateCoupling { a: f64, b: f64 },

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid mesh spec: {0}")]
    MeshSpec(String),

    #[error("point ({x}, {y}) outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("boundary condition conflict: {0}")]
    BoundaryConflict(String),

    #[error("corner {corner:?} does not touch side {side:?}")]
    CornerSide {
        side: crate::mesh::Side,
        corner: crate::boundary::Corner,
    },

    #[error("two point constraints attach to element {element}")]
    ConstraintOverlap { element: usize },

    #[error("element {element} carries both a distributed load and a constraint load")]
    ConstraintWithLoad { element: usize },

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("solve failed: {0}")]
    Solve(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{0}")]
    Cli(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
