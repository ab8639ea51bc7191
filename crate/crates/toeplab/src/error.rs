use thiserror::Error;

/// Errors raised by the library. Input problems and numerical failures are
/// kept apart so the command line can map them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("pole of the gamma function at z = {0}")]
    GammaPole(f64),
    #[error("zero of the Barnes G-function at z = {0}")]
    BarnesZero(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cannot evaluate at singular angle {0}")]
    SingularPoint(f64),
    #[error("symbol has nonzero winding or zeros: {0}")]
    Winding(String),
    #[error("degenerate Fisher-Hartwig data: {0}")]
    Degenerate(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("recursion breakdown at index {0}")]
    Breakdown(usize),
    #[error("integration failed near {at}: {msg}")]
    Integration { at: f64, msg: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by bad arguments rather than failed numerics.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Input(_)
                | Error::GammaPole(_)
                | Error::BarnesZero(_)
                | Error::Domain(_)
                | Error::SingularPoint(_)
                | Error::Winding(_)
                | Error::Degenerate(_)
        )
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_input() {
            2
        } else {
            3
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
