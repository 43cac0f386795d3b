use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// malformed or inconsistent user input; `at` is a JSON pointer when known
    #[error("input error at {at}: {msg}")]
    Input { at: String, msg: String },
    #[error("numerical error: {msg}")]
    Numerical { msg: String, residuals: Vec<f64> },
    #[error("structural error: {msg}")]
    Structural { msg: String },
    #[error("precondition failed: {msg}")]
    Precondition { msg: String },
    /// evaluation hit an excluded hyperplane or branch cut
    #[error("domain error near {form}")]
    Domain { form: String },
}

impl Error {
    pub fn input(at: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Input { at: at.into(), msg: msg.into() }
    }
    pub fn numerical(msg: impl Into<String>, residuals: Vec<f64>) -> Self {
        Error::Numerical { msg: msg.into(), residuals }
    }
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural { msg: msg.into() }
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition { msg: msg.into() }
    }
    pub fn domain(form: impl Into<String>) -> Self {
        Error::Domain { form: form.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
