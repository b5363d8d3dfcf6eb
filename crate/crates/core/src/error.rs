use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space: {0}")]
    Construction(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Gamma factor {factor} evaluated at {arg} is within {distance:.3e} of a pole")]
    GammaPole {
        factor: &'static str,
        arg: String,
        distance: f64,
    },

    #[error("quadrature did not converge (achieved {achieved:.3e}, wanted {wanted:.3e})")]
    Quadrature { achieved: f64, wanted: f64 },

    #[error("series did not converge within {terms} terms (mu(H) = {mu})")]
    Series { terms: usize, mu: f64 },

    #[error("ODE step size underflow at r = {0}")]
    StepUnderflow(f64),

    #[error("grid coverage insufficient: boundary share {share:.3e} exceeds {limit:.3e}")]
    Coverage { share: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for failures of a numerical method as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::GammaPole { .. }
                | Error::Quadrature { .. }
                | Error::Series { .. }
                | Error::StepUnderflow(_)
                | Error::Coverage { .. }
        )
    }
}
