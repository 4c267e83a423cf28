use thiserror::Error;

/// Errors raised by the analytic solvers and the numerical oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid quantum numbers N={n}, L={l}, M={m}: {reason}")]
    InvalidQuantumNumbers {
        n: u32,
        l: u32,
        m: i32,
        reason: &'static str,
    },

    #[error("no bound state: a_0..a_{{N-1}} forced to zero (L={l} >= N={n})")]
    NoCoulombState { n: u32, l: u32 },

    #[error("scale transformation undefined for k = 0")]
    ScaleTransformationUndefined,

    #[error("series known only to order {max}, requested order {requested}")]
    SeriesOrder { requested: usize, max: usize },

    #[error("N=2 series defined for L=0,1 only (got L={0})")]
    ExcitedSeriesL(u32),

    #[error("use exact Coulomb N=2 state: screening is zero")]
    UseCoulomb,

    #[error("formal series wavefunction is not normalizable at lambda={lambda} (requires lambda < {limit})")]
    NotNormalizable { lambda: f64, limit: f64 },

    #[error("hierarchy requires nonnegative potential (v({r}) = {value})")]
    NegativePotential { r: f64, value: f64 },

    #[error("hierarchy requires v(0) = 0 at the minimum (v(0) = {0})")]
    NonzeroMinimum(f64),

    #[error("regularity condition unattainable at order {order} (limit estimates differ by {spread:e})")]
    RegularityUnattainable { order: usize, spread: f64 },

    #[error("order {order} has a derivative singular at the origin; higher orders cannot be built")]
    SingularOrder { order: usize },

    #[error("no bound state found in bracket (L={l}, nodes={nodes}): {detail}")]
    NoBoundState { l: u32, nodes: usize, detail: String },

    #[error("not converged after {iterations} iterations: {detail}")]
    NotConverged { iterations: usize, detail: String },

    #[error("observable is singular faster than 1/rho^2 at the origin")]
    SingularObservable,

    #[error("quadrature failed to reach tolerance {tol:e} on [{a}, {b}]")]
    Quadrature { a: f64, b: f64, tol: f64 },

    #[error("oracle failed at g = {g}: {source}")]
    AtCoupling {
        g: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
