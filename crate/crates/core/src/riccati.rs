//! Riccati systems behind the exponential-quadratic closed forms.
//!
//! All systems carry zero terminal data at the horizon `T` and are integrated
//! backward with classical fixed-step RK4 on a shared uniform grid. The filter
//! variance runs forward from the prior variance. Node slopes are stored
//! alongside node values so that off-node evaluations use cubic Hermite
//! interpolation of the same order as the integrator.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::interp::Series;
use crate::model::{classify, MarketParams, Regime, RegimeReport};
use crate::{Error, InfoKind, Result, TimeGrid};

/// Absolute accuracy certified at `t = 0` by step halving.
pub const CERTIFY_TOL: f64 = 1e-8;
/// Magnitude of `C` treated as divergence.
pub const BLOW_UP_LEVEL: f64 = 1e8;

pub(crate) fn rk4<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let shift = |y: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *y;
        for j in 0..N {
            out[j] += s * k[j];
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &shift(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &shift(y, &k2, 0.5 * h));
    let k4 = f(t + h, &shift(y, &k3, h));
    let mut out = *y;
    for j in 0..N {
        out[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    out
}

enum Halt {
    /// Index of the first node that failed the check.
    Diverged(usize),
}

/// Integrates from the last node down to node 0. Returns node values in
/// grid order.
fn integrate_backward<const N: usize>(
    grid: &TimeGrid,
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    ok: impl Fn(&[f64; N]) -> bool,
) -> core::result::Result<Vec<[f64; N]>, Halt> {
    let n = grid.n();
    let h = grid.step();
    let mut out = vec![[0.0; N]; n + 1];
    for i in (1..=n).rev() {
        let y = rk4(f, grid.node(i), &out[i], -h);
        if !ok(&y) {
            return Err(Halt::Diverged(i - 1));
        }
        out[i - 1] = y;
    }
    Ok(out)
}

fn to_series<const N: usize>(
    grid: &TimeGrid,
    vals: &[[f64; N]],
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
) -> [Series; N] {
    let slopes: Vec<[f64; N]> = vals
        .iter()
        .enumerate()
        .map(|(i, y)| f(grid.node(i), y))
        .collect();
    core::array::from_fn(|j| Series {
        vals: vals.iter().map(|y| y[j]).collect(),
        slopes: slopes.iter().map(|d| d[j]).collect(),
    })
}

fn finite_and_bounded<const N: usize>(y: &[f64; N], c_idx: usize) -> bool {
    y.iter().all(|v| v.is_finite()) && y[c_idx].abs() <= BLOW_UP_LEVEL
}

fn check_span(params: &MarketParams, grid: &TimeGrid) -> Result<()> {
    let tol = 1e-12 * (1.0 + params.horizon);
    if grid.t0().abs() > tol || (grid.t1() - params.horizon).abs() > tol {
        return Err(Error::InvalidInput("grid must span [0, T]"));
    }
    Ok(())
}

/// Node values of `A, B, C` (or their partial-information counterparts).
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    grid: TimeGrid,
    a: Series,
    b: Series,
    c: Series,
    kind: InfoKind,
    regime: RegimeReport,
    error_estimate: f64,
}

impl RiccatiSolution {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn kind(&self) -> InfoKind {
        self.kind
    }

    pub fn regime(&self) -> &RegimeReport {
        &self.regime
    }

    /// Step-halving estimate of the absolute error at `t = 0`.
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    pub fn a_vals(&self) -> &[f64] {
        &self.a.vals
    }

    pub fn b_vals(&self) -> &[f64] {
        &self.b.vals
    }

    pub fn c_vals(&self) -> &[f64] {
        &self.c.vals
    }

    pub fn a(&self, t: f64) -> f64 {
        self.a.eval(&self.grid, t)
    }

    pub fn b(&self, t: f64) -> f64 {
        self.b.eval(&self.grid, t)
    }

    pub fn c(&self, t: f64) -> f64 {
        self.c.eval(&self.grid, t)
    }

    /// `(A(t), B(t), C(t))`.
    pub fn at(&self, t: f64) -> (f64, f64, f64) {
        (self.a(t), self.b(t), self.c(t))
    }

    /// `(A(0), B(0), C(0))`.
    pub fn initial(&self) -> (f64, f64, f64) {
        (self.a.vals[0], self.b.vals[0], self.c.vals[0])
    }

    /// `A + B x + C x^2 / 2` at time `t`.
    pub fn exponent(&self, t: f64, x: f64) -> f64 {
        let (a, b, c) = self.at(t);
        a + b * x + 0.5 * c * x * x
    }

    /// Sign of `C` on `[0, T)`: positive for `gamma < 1`, negative for
    /// `gamma > 1`, zero for log utility. The full-information `C` is also
    /// monotone toward its zero terminal value. The partial-information `C~`
    /// need not be: its coefficients move with `R(t)`, and with a fast-falling
    /// filter variance it can overshoot before turning back.
    pub fn has_expected_shape(&self, gamma: f64) -> bool {
        let c = &self.c.vals;
        let n = c.len() - 1;
        if c[n] != 0.0 {
            return false;
        }
        if gamma == 1.0 {
            return c.iter().all(|&v| v.abs() < 1e-14);
        }
        let s = if gamma < 1.0 { 1.0 } else { -1.0 };
        let signed = c[..n].iter().all(|&v| s * v > 0.0);
        signed && (self.kind == InfoKind::PartialInfo || self.is_monotone(gamma))
    }

    /// `C` moves monotonically toward zero.
    pub fn is_monotone(&self, gamma: f64) -> bool {
        let s = if gamma < 1.0 { 1.0 } else { -1.0 };
        self.c.vals.windows(2).all(|w| s * (w[1] - w[0]) <= 1e-15)
    }
}

/// Right-hand side of the full-information system in calendar time, state
/// `[A, B, C]`.
pub(crate) fn full_rhs(params: &MarketParams, rep: &RegimeReport) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] {
    let (a, b, c) = (rep.a, rep.b, rep.c);
    let k = params.k();
    let r = params.r;
    let lx = params.lambda * params.x_bar;
    let sx2 = params.sigma_x * params.sigma_x;
    move |_t, y| {
        let (bb, cc) = (y[1], y[2]);
        [
            k * r - bb * lx - 0.5 * sx2 * cc - 0.5 * c * bb * bb,
            -cc * lx - (0.5 * b + c * cc) * bb,
            -a - b * cc - c * cc * cc,
        ]
    }
}

fn solve_full_on(params: &MarketParams, rep: &RegimeReport, grid: &TimeGrid) -> Result<Vec<[f64; 3]>> {
    let f = full_rhs(params, rep);
    integrate_backward(grid, &f, |y| finite_and_bounded(y, 2)).map_err(|Halt::Diverged(i)| {
        let tau = locate_blow_up(rep, params.horizon).unwrap_or(params.horizon - grid.node(i));
        Error::SolutionBlowUp {
            time: params.horizon - tau,
            last_finite: grid.node(i + 1),
        }
    })
}

fn richardson(coarse: &[f64; 3], fine: &[f64; 3]) -> f64 {
    (0..3)
        .map(|j| (coarse[j] - fine[j]).abs() * 16.0 / 15.0)
        .fold(0.0, f64::max)
}

/// Backward RK4 solve of the full-information system on `grid`, which must
/// span `[0, T]`. The result is certified against a half-step solve.
pub fn solve_full_riccati(
    params: &MarketParams,
    regime: &RegimeReport,
    grid: &TimeGrid,
) -> Result<RiccatiSolution> {
    check_span(params, grid)?;
    if let Some(t_star) = regime.t_star {
        if params.horizon >= t_star {
            return Err(Error::HorizonBeyondCriticalTime {
                horizon: params.horizon,
                t_star,
            });
        }
    }
    let vals = solve_full_on(params, regime, grid)?;
    let fine = solve_full_on(params, regime, &grid.refined())?;
    let estimate = richardson(&vals[0], &fine[0]);
    if !(estimate <= CERTIFY_TOL) {
        return Err(Error::AccuracyNotCertified {
            estimate,
            tolerance: CERTIFY_TOL,
        });
    }
    let f = full_rhs(params, regime);
    let [a, b, c] = to_series(grid, &vals, &f);
    let sol = RiccatiSolution {
        grid: *grid,
        a,
        b,
        c,
        kind: InfoKind::FullInfo,
        regime: *regime,
        error_estimate: estimate,
    };
    debug_assert!(sol.has_expected_shape(params.gamma));
    Ok(sol)
}

/// Full-information solve on the default grid.
pub fn solve_full(params: &MarketParams) -> Result<RiccatiSolution> {
    let grid = TimeGrid::for_horizon(params.horizon)?;
    solve_full_riccati(params, &classify(params), &grid)
}

/// Time to go at which `C` diverges, searched up to `max_tau`.
///
/// `C` is integrated in time to go until `|C| > 1`, after which the
/// reciprocal `1/C`, which stays smooth through the singularity, is
/// integrated until it changes sign. The root is placed by cubic Hermite
/// interpolation on the last step.
pub fn locate_blow_up(rep: &RegimeReport, max_tau: f64) -> Option<f64> {
    let (a, b, c) = (rep.a, rep.b, rep.c);
    let n = (400.0 * max_tau).ceil().max(2000.0) as usize;
    let h = max_tau / n as f64;
    let fc = |_t: f64, y: &[f64; 1]| [a + b * y[0] + c * y[0] * y[0]];
    let fw = |_t: f64, y: &[f64; 1]| [-(a * y[0] * y[0] + b * y[0] + c)];
    let mut y = [0.0];
    let mut tau = 0.0;
    let mut i = 0;
    while y[0].abs() <= 1.0 {
        if i == n {
            return None;
        }
        y = rk4(&fc, tau, &y, h);
        i += 1;
        tau = i as f64 * h;
    }
    let mut w = [1.0 / y[0]];
    while i < n {
        let next = rk4(&fw, tau, &w, h);
        if next[0] == 0.0 || next[0].signum() != w[0].signum() {
            let (d0, d1) = (fw(0.0, &w)[0], fw(0.0, &next)[0]);
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let v = crate::interp::hermite(w[0], next[0], d0, d1, h, mid);
                if v.signum() == w[0].signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(tau + 0.5 * (lo + hi));
        }
        w = next;
        i += 1;
        tau = i as f64 * h;
    }
    None
}

/// `C(0)` for horizon `tau`, from a scalar solve of the `C` equation.
fn c_at_time_to_go(rep: &RegimeReport, tau: f64) -> f64 {
    let (a, b, c) = (rep.a, rep.b, rep.c);
    let n = (400.0 * tau).ceil().max(200.0) as usize;
    let h = tau / n as f64;
    let f = |_t: f64, y: &[f64; 1]| [a + b * y[0] + c * y[0] * y[0]];
    let mut y = [0.0];
    for i in 0..n {
        y = rk4(&f, i as f64 * h, &y, h);
        if !y[0].is_finite() {
            return f64::INFINITY;
        }
    }
    y[0]
}

/// Filter variance `R(t)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterVariance {
    grid: TimeGrid,
    r: Series,
    r_infty: f64,
    rho_sigma_x: f64,
}

impl FilterVariance {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn r_vals(&self) -> &[f64] {
        &self.r.vals
    }

    pub fn r(&self, t: f64) -> f64 {
        self.r.eval(&self.grid, t)
    }

    pub fn r0(&self) -> f64 {
        self.r.vals[0]
    }

    /// Steady state of the variance equation.
    pub fn r_infty(&self) -> f64 {
        self.r_infty
    }

    /// Filter gain `R(t) + rho sigma_x`.
    pub fn gain(&self, t: f64) -> f64 {
        self.r(t) + self.rho_sigma_x
    }

    pub(crate) fn gain_at_node(&self, i: usize) -> f64 {
        self.r.vals[i] + self.rho_sigma_x
    }
}

/// Positive root of `sigma_x^2 - 2 lambda R - (R + rho sigma_x)^2 = 0`.
pub fn steady_state_variance(params: &MarketParams) -> f64 {
    let m = params.lambda + params.rho * params.sigma_x;
    let s2 = params.sigma_x * params.sigma_x * (1.0 - params.rho * params.rho);
    // -m + sqrt(m^2 + s2), written without cancellation for large m.
    if m > 0.0 {
        s2 / (m + (m * m + s2).sqrt())
    } else {
        -m + (m * m + s2).sqrt()
    }
}

/// Forward solve of the filter variance from `R(0) = r0` of `params`.
pub fn solve_filter_variance(params: &MarketParams, grid: &TimeGrid) -> Result<FilterVariance> {
    check_span(params, grid)?;
    let (l, sx, rho) = (params.lambda, params.sigma_x, params.rho);
    let f = move |_t: f64, y: &[f64; 1]| {
        let g = y[0] + rho * sx;
        [sx * sx - 2.0 * l * y[0] - g * g]
    };
    let n = grid.n();
    let h = grid.step();
    let mut vals = vec![[params.r0]; n + 1];
    for i in 0..n {
        // The variance cannot cross zero; the clamp only absorbs rounding.
        vals[i + 1] = [rk4(&f, grid.node(i), &vals[i], h)[0].max(0.0)];
    }
    let [r] = to_series(grid, &vals, &f);
    Ok(FilterVariance {
        grid: *grid,
        r,
        r_infty: steady_state_variance(params),
        rho_sigma_x: rho * sx,
    })
}

/// Right-hand side of the partial-information system, state `[A~, B~, C~]`.
pub(crate) fn partial_rhs<'a>(
    params: &MarketParams,
    fv: &'a FilterVariance,
) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] + 'a {
    let g = params.gamma;
    let at = (g - 1.0) / (g * g);
    let k = params.k();
    let r = params.r;
    let lx = params.lambda * params.x_bar;
    let l = params.lambda;
    move |t, y| {
        let gain = fv.gain(t);
        let bt = 2.0 * (l + k * gain);
        let ct = -gain * gain;
        let (bb, cc) = (y[1], y[2]);
        [
            k * r - lx * bb + 0.5 * ct * (bb * bb + cc),
            -cc * lx + (0.5 * bt + ct * cc) * bb,
            at + bt * cc + ct * cc * cc,
        ]
    }
}

fn solve_partial_on(params: &MarketParams, fv: &FilterVariance, grid: &TimeGrid) -> Result<Vec<[f64; 3]>> {
    let f = partial_rhs(params, fv);
    integrate_backward(grid, &f, |y| finite_and_bounded(y, 2)).map_err(|Halt::Diverged(i)| {
        Error::SolutionBlowUp {
            time: grid.node(i),
            last_finite: grid.node(i + 1),
        }
    })
}

/// Backward RK4 solve of the partial-information system driven by `fv`.
pub fn solve_partial_riccati(
    params: &MarketParams,
    fv: &FilterVariance,
    grid: &TimeGrid,
) -> Result<RiccatiSolution> {
    check_span(params, grid)?;
    if !grid.same_as(&fv.grid) {
        return Err(Error::InvalidInput("partial solve grid must match the filter variance grid"));
    }
    let vals = solve_partial_on(params, fv, grid)?;
    let fine = solve_partial_on(params, fv, &grid.refined())?;
    let estimate = richardson(&vals[0], &fine[0]);
    if !(estimate <= CERTIFY_TOL) {
        return Err(Error::AccuracyNotCertified {
            estimate,
            tolerance: CERTIFY_TOL,
        });
    }
    let f = partial_rhs(params, fv);
    let [a, b, c] = to_series(grid, &vals, &f);
    let sol = RiccatiSolution {
        grid: *grid,
        a,
        b,
        c,
        kind: InfoKind::PartialInfo,
        regime: classify(params),
        error_estimate: estimate,
    };
    debug_assert!(sol.has_expected_shape(params.gamma));
    Ok(sol)
}

/// `Q(t) = 1 - gamma C(t) R(t)` on the shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QPath {
    grid: TimeGrid,
    q: Series,
}

impl QPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn q_vals(&self) -> &[f64] {
        &self.q.vals
    }

    pub fn q(&self, t: f64) -> f64 {
        self.q.eval(&self.grid, t)
    }

    pub fn q0(&self) -> f64 {
        self.q.vals[0]
    }
}

/// Partial-information solution from the full one: `C~ = C/Q`, `B~ = B/Q`,
/// and `A~` by composite Simpson quadrature of its equation.
pub fn via_q_relation(
    full: &RiccatiSolution,
    fv: &FilterVariance,
    params: &MarketParams,
) -> Result<(RiccatiSolution, QPath)> {
    if full.kind != InfoKind::FullInfo {
        return Err(Error::InvalidInput("Q-relation needs the full-information solution"));
    }
    if !full.grid.same_as(&fv.grid) {
        return Err(Error::InvalidInput("full solution and filter variance grids differ"));
    }
    let grid = full.grid;
    let g = params.gamma;
    let n = grid.n();
    let rsx = fv.rho_sigma_x;

    let mut q = Series {
        vals: Vec::with_capacity(n + 1),
        slopes: Vec::with_capacity(n + 1),
    };
    for i in 0..=n {
        let (c, r) = (full.c.vals[i], fv.r.vals[i]);
        let value = if i == n { 1.0 } else { 1.0 - g * c * r };
        if !(value > 0.0) {
            return Err(Error::QNonPositive {
                time: grid.node(i),
                value,
            });
        }
        q.vals.push(value);
        q.slopes.push(-g * (full.c.slopes[i] * r + c * fv.r.slopes[i]));
    }

    let bt = |b: f64, qv: f64| b / qv;
    let mut b_t = Series {
        vals: (0..=n).map(|i| bt(full.b.vals[i], q.vals[i])).collect(),
        slopes: vec![0.0; n + 1],
    };
    let mut c_t = Series {
        vals: (0..=n).map(|i| bt(full.c.vals[i], q.vals[i])).collect(),
        slopes: vec![0.0; n + 1],
    };
    for i in 0..=n {
        let (qv, dq) = (q.vals[i], q.slopes[i]);
        b_t.slopes[i] = (full.b.slopes[i] * qv - full.b.vals[i] * dq) / (qv * qv);
        c_t.slopes[i] = (full.c.slopes[i] * qv - full.c.vals[i] * dq) / (qv * qv);
    }

    let k = params.k();
    let (r, lx) = (params.r, params.lambda * params.x_bar);
    let a_rate = |gain: f64, bb: f64, cc: f64| k * r - lx * bb - 0.5 * gain * gain * (bb * bb + cc);
    let rate_at_node = |i: usize| a_rate(fv.gain_at_node(i), b_t.vals[i], c_t.vals[i]);
    let rate_at = |t: f64| {
        let (_, bb, cc) = full.at(t);
        let r_t = fv.r(t);
        let qv = 1.0 - g * cc * r_t;
        a_rate(r_t + rsx, bb / qv, cc / qv)
    };
    let h = grid.step();
    let mut a_t = Series {
        vals: vec![0.0; n + 1],
        slopes: (0..=n).map(rate_at_node).collect(),
    };
    for i in (0..n).rev() {
        let mid = rate_at(grid.node(i) + 0.5 * h);
        a_t.vals[i] = a_t.vals[i + 1] - h / 6.0 * (a_t.slopes[i] + 4.0 * mid + a_t.slopes[i + 1]);
    }

    let sol = RiccatiSolution {
        grid,
        a: a_t,
        b: b_t,
        c: c_t,
        kind: InfoKind::PartialInfo,
        regime: full.regime,
        error_estimate: full.error_estimate,
    };
    Ok((sol, QPath { grid, q }))
}

/// One sufficient condition for the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub holds: bool,
    /// The condition holds through `gamma > 1`.
    pub via_gamma: bool,
    /// Left-hand side of the inequality; positive when it holds.
    pub lhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub full: Condition,
    pub partial: Condition,
    /// Largest horizon on which the full-information inequality holds;
    /// `None` when it holds on every horizon searched.
    pub t_double_star: Option<f64>,
}

impl Admissibility {
    pub fn holds(&self, info: InfoKind) -> bool {
        match info {
            InfoKind::FullInfo => self.full.holds,
            InfoKind::PartialInfo => self.partial.holds,
        }
    }

    pub fn condition(&self, info: InfoKind) -> Condition {
        match info {
            InfoKind::FullInfo => self.full,
            InfoKind::PartialInfo => self.partial,
        }
    }
}

/// `max(R0, v_T)` where `v_T` is the unconditional variance of `X_T`.
fn variance_bound(params: &MarketParams, horizon: f64) -> f64 {
    params.r0.max(params.x_variance(horizon))
}

/// Largest horizon searched for the crossing of the full-information
/// inequality when the Riccati solution exists on every horizon.
pub const MAX_SEARCH_HORIZON: f64 = 500.0;

/// Largest horizon on which the full-information sufficient inequality holds
/// (bisection on the horizon).
pub fn maximal_admissible_horizon(params: &MarketParams) -> Option<f64> {
    let rep = classify(params);
    if params.gamma >= 1.0 {
        return None;
    }
    let lhs = |tau: f64| 1.0 - 4.0 * c_at_time_to_go(&rep, tau) * variance_bound(params, tau);
    let upper = rep.t_star.unwrap_or(MAX_SEARCH_HORIZON);
    // Scan for the first failure, then bisect.
    let steps = 200;
    let mut lo = 0.0;
    let mut hi = None;
    for j in 1..=steps {
        let tau = upper * j as f64 / steps as f64 * (1.0 - 1e-9);
        if !(lhs(tau) > 0.0) {
            hi = Some(tau);
            break;
        }
        lo = tau;
    }
    let mut hi = hi?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Sufficient conditions for the full- and partial-information closed forms.
pub fn check_admissibility(
    full: &RiccatiSolution,
    partial: &RiccatiSolution,
    q: &QPath,
    params: &MarketParams,
) -> Admissibility {
    let _ = partial;
    let via_gamma = params.gamma > 1.0;
    let bound = variance_bound(params, params.horizon);
    let c0 = full.c.vals[0];
    let lhs_full = 1.0 - 4.0 * c0 * bound;
    let lhs_partial = 1.0 - 4.0 * c0 / q.q0() * bound;
    Admissibility {
        full: Condition {
            holds: via_gamma || lhs_full > 0.0,
            via_gamma,
            lhs: lhs_full,
        },
        partial: Condition {
            holds: via_gamma || lhs_partial > 0.0,
            via_gamma,
            lhs: lhs_partial,
        },
        t_double_star: maximal_admissible_horizon(params),
    }
}

/// Every Riccati object one parameter set needs, on the default grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub params: MarketParams,
    pub full: RiccatiSolution,
    pub fv: FilterVariance,
    pub partial: RiccatiSolution,
    pub q: QPath,
}

impl Solved {
    /// Full solve, filter variance, and the partial system from its own
    /// integration.
    pub fn new(params: &MarketParams) -> Result<Self> {
        let grid = TimeGrid::for_horizon(params.horizon)?;
        Self::on_grid(params, &grid)
    }

    pub fn on_grid(params: &MarketParams, grid: &TimeGrid) -> Result<Self> {
        let rep = classify(params);
        let full = solve_full_riccati(params, &rep, grid)?;
        let fv = solve_filter_variance(params, grid)?;
        let partial = solve_partial_riccati(params, &fv, grid)?;
        let (_, q) = via_q_relation(&full, &fv, params)?;
        Ok(Solved {
            params: *params,
            full,
            fv,
            partial,
            q,
        })
    }

    pub fn admissibility(&self) -> Admissibility {
        check_admissibility(&self.full, &self.partial, &self.q, &self.params)
    }

    pub fn is_log_utility(&self) -> bool {
        self.full.regime.regime == Regime::LogUtility
    }
}
