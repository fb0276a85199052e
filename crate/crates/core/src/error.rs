use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius must be positive, got r = {0}")]
    NonPositiveRadius(f64),

    #[error("r = {r} lies beyond the last tabulated sample {last} and the tail |V| = {tail:e} exceeds the tail tolerance {tol:e}")]
    BeyondTable { r: f64, last: f64, tail: f64, tol: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("tabulated potential needs at least 4 samples, got {0}")]
    TooFewSamples(usize),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("phase not converged at r_max = {r_max}: {detail}")]
    PhaseNotConverged { r_max: f64, detail: String },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("superpotential undefined: the effective potential has no bound state")]
    NoBoundState,

    #[error("ground-state matching failed at r = {r}: relative residual {residual:e}")]
    MatchingFailed { r: f64, residual: f64 },

    #[error("ladder theorem inapplicable: {0}")]
    LadderInapplicable(String),

    #[error("bound inapplicable: {0}")]
    Inapplicable(String),

    #[error("effective potential is not of the form V + l(l+1)/r^2")]
    NotCentrifugal,

    #[error("counting failed at l = {l}: {source}")]
    Census { l: u32, source: Box<Error> },

    #[error("potential spec: {0}")]
    Spec(String),

    #[error("config: {0}")]
    Config(String),

    #[error("report: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveRadius(_)
                | Error::InvalidPotential(_)
                | Error::TooFewSamples(_)
                | Error::Spec(_)
                | Error::Config(_)
                | Error::Report(_)
                | Error::Io(_)
                | Error::BeyondTable { .. }
        )
    }

    /// True when the request was valid but the theorem does not cover the input.
    pub fn is_inapplicable(&self) -> bool {
        matches!(self, Error::Inapplicable(_) | Error::LadderInapplicable(_) | Error::NotCentrifugal)
    }
}
