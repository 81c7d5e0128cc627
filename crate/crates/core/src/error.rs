use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),

    #[error("invalid group presentation: {0}")]
    InvalidPresentation(String),

    #[error("invalid ping-pong certificate: {0}")]
    InvalidCertificate(String),

    #[error("discreteness suspect: elements {first} and {second} agree to {coarse:e} but differ at {fine:e}")]
    DiscretenessSuspect { first: String, second: String, coarse: f64, fine: f64 },

    #[error("orbit ball is incomplete: node cap reached after {elements} elements")]
    IncompleteBall { elements: usize },

    #[error("orbit ball carries no words")]
    MissingWords,

    #[error("radius {rho} outside the enumerated range [0, {radius}]")]
    RadiusOutOfRange { rho: f64, radius: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("too few points for a fit: need {needed}, have {have}")]
    TooFewPoints { needed: usize, have: usize },

    #[error("tail bound inadequate: tail/value = {ratio:e} exceeds {limit:e} at t = {t}")]
    InadequateTail { t: f64, ratio: f64, limit: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
