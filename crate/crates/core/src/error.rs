use crate::model::ParamErrors;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(ParamErrors),

    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    #[error("horizon T = {horizon} is not below the critical time T* = {t_star}")]
    HorizonBeyondCriticalTime { horizon: f64, t_star: f64 },

    /// `time` is calendar time in `[0, T]`; the last finite node is `last_finite`.
    #[error("Riccati solution blows up at t = {time} (last finite node t = {last_finite})")]
    SolutionBlowUp { time: f64, last_finite: f64 },

    #[error("step-halving error estimate {estimate:e} exceeds the tolerance {tolerance:e}")]
    AccuracyNotCertified { estimate: f64, tolerance: f64 },

    #[error("Q(t) = 1 - gamma C(t) R(t) = {value} is not positive at t = {time}")]
    QNonPositive { time: f64, value: f64 },

    #[error("Gaussian expectation diverges: 1 - c var = {margin}")]
    DivergentExpectation { margin: f64 },

    #[error("moment generating function explodes for z = {z_re}{z_im:+}i at s = {time}")]
    MomentExplosion { z_re: f64, z_im: f64, time: f64 },

    #[error("Fourier grid too coarse: {0}")]
    GridTooCoarse(&'static str),

    #[error("closed form not verified: sufficient condition fails with left-hand side {lhs}")]
    NotVerified { info: crate::InfoKind, lhs: f64 },

    #[error("quantity is undefined for logarithmic utility (gamma = 1)")]
    LogUtility,

    #[error("non-positive price {value} at node {index}")]
    NonPositivePrice { index: usize, value: f64 },
}
