use thiserror::Error;

/// Errors surfaced by the library. Numerical failure states carry enough
/// context (time, norms) to be reported without re-running.
#[derive(Debug, Error)]
pub enum NematicError {
    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field is in the wrong representation for this operation: expected {expected}")]
    WrongRepresentation { expected: &'static str },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("CFL violation at t={t}: u_max*dt*n = {cfl} > safety {safety}")]
    CflViolation { t: f64, cfl: f64, safety: f64 },

    #[error("non-finite field values at t={t} (blow-up): last norms h1_u={h1_u}, h1_d={h1_d}")]
    BlowUp { t: f64, h1_u: f64, h1_d: f64 },

    #[error("density left its admissible band at t={t}: rho in [{rho_min}, {rho_max}], allowed [{m1}, {m2}] +/- {tol}")]
    RhoBounds {
        t: f64,
        rho_min: f64,
        rho_max: f64,
        m1: f64,
        m2: f64,
        tol: f64,
    },

    #[error("coefficients fail the dissipation conditions: {0:?}")]
    Inadmissible(Vec<String>),

    #[error("configuration errors:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("initial-data preset cannot be satisfied: {0}")]
    Unsatisfiable(String),

    #[error("trajectory too short for time quadrature: {got} samples, need at least {need}")]
    InsufficientCadence { got: usize, need: usize },

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NematicError>;
