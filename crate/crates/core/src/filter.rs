//! Kalman-Bucy filter for the market price of risk, driven by observed
//! log-price increments.

use alloc::vec::Vec;

use num_traits::Float;

use crate::model::MarketParams;
use crate::riccati::{solve_filter_variance, FilterVariance};
use crate::{Error, Result, TimeGrid};

/// Stock prices on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    grid: TimeGrid,
    s_vals: Vec<f64>,
}

impl PricePath {
    pub fn new(grid: TimeGrid, s_vals: Vec<f64>) -> Result<Self> {
        if s_vals.len() != grid.len() {
            return Err(Error::InvalidInput("price path length must equal the number of grid nodes"));
        }
        if let Some((index, &value)) = s_vals.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositivePrice { index, value });
        }
        Ok(PricePath { grid, s_vals })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn s_vals(&self) -> &[f64] {
        &self.s_vals
    }
}

/// Conditional mean path with the innovations that drove it.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPath {
    pub grid: TimeGrid,
    pub pi_vals: Vec<f64>,
    pub fv: FilterVariance,
    /// `dI` over each interval; one fewer than the nodes.
    pub innov_increments: Vec<f64>,
}

/// One Euler step of the filter. Shared with the Monte Carlo engine.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FilterStep {
    r: f64,
    sigma: f64,
    lambda: f64,
    x_bar: f64,
    rho_sigma_x: f64,
}

impl FilterStep {
    pub fn new(params: &MarketParams) -> Self {
        FilterStep {
            r: params.r,
            sigma: params.sigma,
            lambda: params.lambda,
            x_bar: params.x_bar,
            rho_sigma_x: params.rho * params.sigma_x,
        }
    }

    /// Innovation increment from a log-price increment.
    #[inline]
    pub fn innovation(&self, dlog_s: f64, pi: f64, dt: f64) -> f64 {
        let s = self.sigma;
        (dlog_s - (self.r + s * pi - 0.5 * s * s) * dt) / s
    }

    /// New conditional mean, with the gain frozen at the variance `r_left`.
    #[inline]
    pub fn update(&self, pi: f64, r_left: f64, d_innov: f64, dt: f64) -> f64 {
        pi - self.lambda * (pi - self.x_bar) * dt + (r_left + self.rho_sigma_x) * d_innov
    }
}

/// Runs the filter from `pi0` with the filter variance solved on `[0, T]`.
pub fn run_filter(params: &MarketParams, prices: &PricePath) -> Result<FilterPath> {
    let grid = TimeGrid::for_horizon(params.horizon)?;
    let fv = solve_filter_variance(params, &grid)?;
    run_filter_with(params, &fv, prices)
}

/// Runs the filter with a precomputed variance whose grid covers the price grid.
pub fn run_filter_with(params: &MarketParams, fv: &FilterVariance, prices: &PricePath) -> Result<FilterPath> {
    let grid = prices.grid;
    if !fv.grid().covers(&grid) {
        return Err(Error::InvalidInput("filter variance does not cover the price grid"));
    }
    let step = FilterStep::new(params);
    let n = grid.n();
    let mut pi_vals = Vec::with_capacity(n + 1);
    let mut innov = Vec::with_capacity(n);
    let mut pi = params.pi0;
    pi_vals.push(pi);
    for i in 0..n {
        let dt = grid.node(i + 1) - grid.node(i);
        let dlog = (prices.s_vals[i + 1] / prices.s_vals[i]).ln();
        let d_innov = step.innovation(dlog, pi, dt);
        pi = step.update(pi, fv.r(grid.node(i)), d_innov, dt);
        innov.push(d_innov);
        pi_vals.push(pi);
    }
    Ok(FilterPath {
        grid,
        pi_vals,
        fv: fv.clone(),
        innov_increments: innov,
    })
}
