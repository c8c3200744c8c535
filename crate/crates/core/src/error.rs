use thiserror::Error;

/// Errors raised by the walk library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    /// Input failed a structural check (duplicate coefficient index, bad parameter, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Transform grid cannot hold the state without wrapping it onto itself.
    #[error("grid of {grid} points is smaller than the state support width {width}")]
    GridTooSmall { grid: usize, width: usize },

    /// Required grid size exceeds the configured cap.
    #[error("required grid size {required} exceeds cap {cap}")]
    GridCap { required: u128, cap: usize },

    /// Probability leaked into the guard band of the periodic window.
    #[error(
        "aliasing at t = {t}: guard-band mass {mass:e} exceeds {tol:e} on a grid of {grid}; \
         retry with M >= {suggested}"
    )]
    Aliasing {
        t: f64,
        mass: f64,
        tol: f64,
        grid: usize,
        suggested: usize,
    },
}

pub type Result<T> = std::result::Result<T, WalkError>;
