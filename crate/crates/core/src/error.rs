use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The query falls outside the range the packed-signature tables support.
    #[error("scale limit exceeded: {0}")]
    ScaleLimit(String),

    /// A brute-force enumeration was asked to visit more points than allowed.
    #[error("enumeration infeasible: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("count overflowed 128-bit accumulator")]
    Overflow,

    #[error("unknown counting strategy `{0}`")]
    UnknownStrategy(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn scale(msg: impl Into<String>) -> Self {
        Error::ScaleLimit(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Whether the error reflects a scale or feasibility limit rather than a bad input.
    pub fn is_scale_limit(&self) -> bool {
        matches!(self, Error::ScaleLimit(_) | Error::Infeasible(_) | Error::Overflow)
    }
}
