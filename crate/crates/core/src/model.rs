//! Market parameters and the classification of the full-information Riccati
//! system into its solution regimes.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use num_traits::Float;


use crate::{Error, Result};

/// Unvalidated parameter record. All rates and volatilities are per year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    /// Risk-free rate.
    pub r: f64,
    /// Stock volatility.
    pub sigma: f64,
    /// Mean-reversion speed of the market price of risk.
    pub lambda: f64,
    /// Volatility of the market price of risk.
    pub sigma_x: f64,
    /// Long-run mean of the market price of risk.
    pub x_bar: f64,
    /// Correlation between stock and market-price-of-risk shocks.
    pub rho: f64,
    /// Prior mean of `X_0`.
    pub pi0: f64,
    /// Prior variance of `X_0`.
    pub r0: f64,
    /// Investment horizon `T`.
    pub horizon: f64,
    /// Relative risk aversion.
    pub gamma: f64,
    /// Initial wealth.
    pub w: f64,
}

impl RawParams {
    /// The US-market calibration used throughout the numerical study. It does
    /// not pin the correlation, so it is an argument.
    pub fn table1(rho: f64) -> Self {
        RawParams {
            r: 0.034,
            sigma: 0.144,
            lambda: 0.19,
            sigma_x: 0.1875,
            x_bar: 0.3958,
            rho,
            pi0: 0.3958,
            r0: 0.09,
            horizon: 5.0,
            gamma: 5.0,
            w: 1.0,
        }
    }
}

/// One violated constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NonFinite { field: &'static str },
    /// Volatilities must be strictly positive.
    NegativeVolatility { field: &'static str, value: f64 },
    NonPositiveMeanReversion(f64),
    NegativeLongRunMean(f64),
    CorrelationOutOfRange(f64),
    NegativePriorVariance(f64),
    NonPositiveHorizon(f64),
    NonPositiveGamma(f64),
    /// `gamma` is within `1e-9` of one without being one; use `gamma = 1`.
    NearLogUtility(f64),
    NonPositiveWealth(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonFinite { field } => write!(f, "{field} is not finite"),
            Violation::NegativeVolatility { field, value } => {
                write!(f, "{field} = {value} must be strictly positive")
            }
            Violation::NonPositiveMeanReversion(v) => write!(f, "lambda = {v} must be positive"),
            Violation::NegativeLongRunMean(v) => write!(f, "x_bar = {v} must be non-negative"),
            Violation::CorrelationOutOfRange(v) => write!(f, "rho = {v} must lie in [-1, 1]"),
            Violation::NegativePriorVariance(v) => write!(f, "r0 = {v} must be non-negative"),
            Violation::NonPositiveHorizon(v) => write!(f, "T = {v} must be positive"),
            Violation::NonPositiveGamma(v) => write!(f, "gamma = {v} must be positive"),
            Violation::NearLogUtility(v) => write!(
                f,
                "gamma = {v} is numerically indistinguishable from 1; set gamma = 1 for log utility"
            ),
            Violation::NonPositiveWealth(v) => write!(f, "w = {v} must be positive"),
        }
    }
}

/// Every constraint violated by a parameter record.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamErrors(pub Vec<Violation>);

impl ParamErrors {
    pub fn contains(&self, pred: impl Fn(&Violation) -> bool) -> bool {
        self.0.iter().any(pred)
    }
}

impl fmt::Display for ParamErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Validated parameters. Read fields through `Deref<Target = RawParams>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams(RawParams);

impl Deref for MarketParams {
    type Target = RawParams;

    fn deref(&self) -> &RawParams {
        &self.0
    }
}

const LOG_UTILITY_BAND: f64 = 1e-9;

/// Checks every constraint and reports all violations at once.
pub fn validate(raw: RawParams) -> Result<MarketParams> {
    let mut errs = Vec::new();
    let fields = [
        ("r", raw.r),
        ("sigma", raw.sigma),
        ("lambda", raw.lambda),
        ("sigma_x", raw.sigma_x),
        ("x_bar", raw.x_bar),
        ("rho", raw.rho),
        ("pi0", raw.pi0),
        ("r0", raw.r0),
        ("T", raw.horizon),
        ("gamma", raw.gamma),
        ("w", raw.w),
    ];
    for (field, v) in fields {
        if !v.is_finite() {
            errs.push(Violation::NonFinite { field });
        }
    }
    if !errs.is_empty() {
        return Err(Error::InvalidParams(ParamErrors(errs)));
    }
    for (field, value) in [("sigma", raw.sigma), ("sigma_x", raw.sigma_x)] {
        if value <= 0.0 {
            errs.push(Violation::NegativeVolatility { field, value });
        }
    }
    if raw.lambda <= 0.0 {
        errs.push(Violation::NonPositiveMeanReversion(raw.lambda));
    }
    if raw.x_bar < 0.0 {
        errs.push(Violation::NegativeLongRunMean(raw.x_bar));
    }
    if !(-1.0..=1.0).contains(&raw.rho) {
        errs.push(Violation::CorrelationOutOfRange(raw.rho));
    }
    if raw.r0 < 0.0 {
        errs.push(Violation::NegativePriorVariance(raw.r0));
    }
    if raw.horizon <= 0.0 {
        errs.push(Violation::NonPositiveHorizon(raw.horizon));
    }
    if raw.gamma <= 0.0 {
        errs.push(Violation::NonPositiveGamma(raw.gamma));
    } else if raw.gamma != 1.0 && (raw.gamma - 1.0).abs() < LOG_UTILITY_BAND {
        errs.push(Violation::NearLogUtility(raw.gamma));
    }
    if raw.w <= 0.0 {
        errs.push(Violation::NonPositiveWealth(raw.w));
    }
    if errs.is_empty() {
        Ok(MarketParams(raw))
    } else {
        Err(Error::InvalidParams(ParamErrors(errs)))
    }
}

impl MarketParams {
    pub fn new(raw: RawParams) -> Result<Self> {
        validate(raw)
    }

    /// Table 1 calibration at correlation `rho`.
    pub fn table1(rho: f64) -> Self {
        validate(RawParams::table1(rho)).expect("table 1 parameters are valid")
    }

    pub fn raw(&self) -> RawParams {
        self.0
    }

    /// Copy with some fields changed, re-validated.
    pub fn with(&self, edit: impl FnOnce(&mut RawParams)) -> Result<Self> {
        let mut raw = self.0;
        edit(&mut raw);
        validate(raw)
    }

    pub fn is_log_utility(&self) -> bool {
        self.0.gamma == 1.0
    }

    /// `(gamma - 1) / gamma`, the exponent of the state price density in the
    /// value function.
    pub fn k(&self) -> f64 {
        (self.0.gamma - 1.0) / self.0.gamma
    }

    /// Unconditional variance of `X_t` under the prior.
    pub fn x_variance(&self, t: f64) -> f64 {
        let e = (-2.0 * self.lambda * t).exp();
        self.r0 * e + self.sigma_x * self.sigma_x / (2.0 * self.lambda) * (1.0 - e)
    }

    /// Power utility, logarithmic at `gamma = 1`.
    pub fn utility(&self, wealth: f64) -> f64 {
        if self.is_log_utility() {
            wealth.ln()
        } else {
            wealth.powf(1.0 - self.gamma) / (1.0 - self.gamma)
        }
    }
}

/// Regime of the full-information Riccati solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Exists on every horizon, `Delta > 0`.
    WellBehavedNormal,
    /// Exists only for horizons below the critical time, `Delta < 0`.
    Tangent,
    /// Exists on every horizon, `Delta = 0`, `b < 0`.
    WellBehavedHyperbolic,
    /// `gamma = 1`: the Riccati system is trivial.
    LogUtility,
    /// `rho` sits exactly on the critical correlation with `gamma` below the
    /// critical risk aversion; the classification table does not cover it.
    Unclassified,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::WellBehavedNormal => "WellBehavedNormal",
            Regime::Tangent => "Tangent",
            Regime::WellBehavedHyperbolic => "WellBehavedHyperbolic",
            Regime::LogUtility => "LogUtility",
            Regime::Unclassified => "Unclassified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// Constant term of the `C` equation, `(1 - gamma) / gamma^2`.
    pub a: f64,
    /// Linear coefficient, `2(-lambda + (1 - gamma)/gamma rho sigma_x)`.
    pub b: f64,
    /// Quadratic coefficient, `sigma_x^2 (rho^2 + gamma (1 - rho^2))`.
    pub c: f64,
    pub delta: f64,
    pub p: f64,
    pub q: f64,
    pub rho_star: f64,
    /// Defined for `rho >= rho_star`.
    pub gamma_star: Option<f64>,
    pub regime: Regime,
    /// Finite only in the tangent regime.
    pub t_star: Option<f64>,
}

impl RegimeReport {
    /// Largest horizon on which the Riccati solution exists.
    pub fn max_horizon(&self) -> f64 {
        self.t_star.unwrap_or(f64::INFINITY)
    }
}

/// Critical time `pi/eta - (2/eta) atan(b/eta)` for `Delta < 0`.
pub fn critical_time(b: f64, delta: f64) -> Option<f64> {
    if delta >= 0.0 {
        return None;
    }
    let eta = (-delta).sqrt();
    Some(core::f64::consts::PI / eta - 2.0 / eta * (b / eta).atan())
}

pub fn classify(params: &MarketParams) -> RegimeReport {
    let MarketParams(RawParams {
        lambda,
        sigma_x,
        rho,
        gamma,
        ..
    }) = *params;
    let a = (1.0 - gamma) / (gamma * gamma);
    let b = 2.0 * (-lambda + (1.0 - gamma) / gamma * rho * sigma_x);
    let c = sigma_x * sigma_x * (rho * rho + gamma * (1.0 - rho * rho));
    let delta = b * b - 4.0 * a * c;
    let p = lambda * lambda + 2.0 * lambda * rho * sigma_x + sigma_x * sigma_x;
    let q = 2.0 * lambda * rho * sigma_x + sigma_x * sigma_x;
    debug_assert!(p > q && p >= 0.0);
    let rho_star = (-sigma_x / (2.0 * lambda)).max(-1.0);
    let gamma_star = (rho >= rho_star).then(|| q / p);

    let same = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + y.abs());
    let regime = if gamma == 1.0 {
        Regime::LogUtility
    } else if gamma > 1.0 || rho < rho_star {
        Regime::WellBehavedNormal
    } else {
        let gs = gamma_star.unwrap_or(0.0);
        if same(gamma, gs) {
            if rho > rho_star {
                Regime::WellBehavedHyperbolic
            } else {
                Regime::Unclassified
            }
        } else if gamma > gs {
            Regime::WellBehavedNormal
        } else if rho > rho_star {
            Regime::Tangent
        } else {
            Regime::Unclassified
        }
    };
    let t_star = match regime {
        Regime::Tangent => critical_time(b, delta),
        _ => None,
    };
    RegimeReport {
        a,
        b,
        c,
        delta,
        p,
        q,
        rho_star,
        gamma_star,
        regime,
        t_star,
    }
}
