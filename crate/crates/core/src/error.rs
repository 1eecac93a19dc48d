use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite field")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("quadrature did not converge: best estimate {estimate:e}, error bound {bound:e}")]
    Quadrature { estimate: f64, bound: f64 },

    #[error("{what} did not converge after {iterations} iterations (last residual {last:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("density not divisible by q: {0}")]
    NotDivisible(String),

    #[error("derivative order {0} exceeds the stored soliton table")]
    TableOrder(u32),

    #[error("odd power of phi in integrand: {0}")]
    OddPower(String),

    #[error("rescale out of range: lambda = {lambda}, needed |x| up to {reach} on a box of half-width {half_width}")]
    RescaleRange {
        lambda: f64,
        reach: f64,
        half_width: f64,
    },

    #[error("branch condition violated: eta = {0:e}")]
    Branch(f64),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
