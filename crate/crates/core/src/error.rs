use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Lattice parameters outside the region where the B-spline generates a frame.
    #[error("lattice (a = {a}, b = {b}) outside the frame region (0, {order}] x (0, 1/{order}] for order {order}")]
    FrameRegion { order: usize, a: f64, b: f64 },

    /// Modulation step outside the range for which the explicit dual windows exist.
    #[error("modulation step b = {b} outside the admissible interval (0, {max}] for order {order}")]
    DualRange { order: usize, b: f64, max: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("linear algebra: {0}")]
    LinearAlgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;
