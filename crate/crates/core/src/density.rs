//! Terminal wealth distributions by damped Fourier inversion of the log-wealth
//! moment generating function, mean-variance frontiers and first-order
//! stochastic dominance.
//!
//! With `Y = ln W_T` and `M(z) = E[W_T^z]`, the density of `Y` is
//! `f(y) = e^{-alpha y} / pi * Re int_0^inf M(alpha + iu) e^{-iuy} du`,
//! evaluated by the trapezoid rule on a uniform `u` grid. The wealth density
//! follows as `f(ln w) / w`.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::mgf::{Conditioning, MgfSystem};
use crate::model::MarketParams;
use crate::riccati::Solved;
use crate::{par, Error, InfoKind, Result};

/// Default largest admissible `|M(alpha + i u_max)|`.
pub const TAIL_TOL: f64 = 1e-8;
/// Largest admissible negative mass clipped from the raw density.
pub const CLIP_TOL: f64 = 1e-3;
/// Frequencies are no longer evaluated once a whole block falls below this
/// fraction of `M(alpha)`.
const CUTOFF: f64 = 1e-15;
const BLOCK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    /// Damping exponent; `E[W_T^alpha]` must be finite.
    pub alpha: f64,
    pub u_max: f64,
    pub n_u: usize,
    /// Number of wealth abscissae.
    pub n_w: usize,
    /// Largest admissible `|M(alpha + i u_max)|`.
    pub tail_tol: f64,
    /// Wealth range; by default `ln W` spans ten lognormal-fit standard
    /// deviations either side of its fitted mean.
    pub w_range: Option<(f64, f64)>,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            alpha: 1.0,
            u_max: 200.0,
            n_u: 1 << 14,
            n_w: 2001,
            tail_tol: TAIL_TOL,
            w_range: None,
        }
    }
}

impl InversionConfig {
    /// Wider frequency range with a looser tail gate. Partially informed
    /// wealth has a hard lower bound at which its density vanishes like a
    /// power, so its transform decays only algebraically and cannot pass the
    /// default gate at any reachable `u_max`.
    pub fn wide() -> Self {
        InversionConfig {
            u_max: 1000.0,
            tail_tol: 1e-3,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WealthDistribution {
    pub w_grid: Vec<f64>,
    pub pdf: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Moments from `M(1)`, `M(2)`, `M(3)`.
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    /// Trapezoid mass of the raw inverted density before clipping.
    pub raw_mass: f64,
    pub info_kind: InfoKind,
    pub conditioning: Conditioning,
}

impl WealthDistribution {
    /// Trapezoid integral of `g(w) pdf(w)`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        trapezoid(&self.w_grid, |i| g(self.w_grid[i]) * self.pdf[i])
    }

    /// Linear interpolation of the cdf, 0 and 1 outside the grid.
    pub fn cdf_at(&self, w: f64) -> f64 {
        let g = &self.w_grid;
        if w <= g[0] {
            return 0.0;
        }
        if w >= g[g.len() - 1] {
            return 1.0;
        }
        let i = g.partition_point(|&x| x <= w) - 1;
        let s = (w - g[i]) / (g[i + 1] - g[i]);
        self.cdf[i] + s * (self.cdf[i + 1] - self.cdf[i])
    }
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..x.len()).map(|i| 0.5 * (f(i - 1) + f(i)) * (x[i] - x[i - 1])).sum()
}

/// Raw moments `E[W^k]`, `k = 1, 2, 3`, from the moment generating function.
pub fn raw_moments(system: &MgfSystem, cond: Conditioning) -> Result<[f64; 3]> {
    let m = |k: f64| system.moment(C64::new(k, 0.0), cond).map(|v| v.re);
    Ok([m(1.0)?, m(2.0)?, m(3.0)?])
}

fn central(m: [f64; 3]) -> (f64, f64, f64) {
    let [m1, m2, m3] = m;
    let var = m2 - m1 * m1;
    let skew = (m3 - 3.0 * m1 * var - m1 * m1 * m1) / var.powf(1.5);
    (m1, var, skew)
}

/// `M(alpha + i u_k)` for `u_k = k du`, stopping early once the transform has
/// decayed below the working precision. The tail check uses the last value
/// that was needed.
fn transform(system: &MgfSystem, cond: Conditioning, cfg: &InversionConfig) -> Result<Vec<C64>> {
    let du = cfg.u_max / cfg.n_u as f64;
    let peak = system.moment(C64::new(cfg.alpha, 0.0), cond)?.re;
    let mut vals = Vec::with_capacity(cfg.n_u + 1);
    let mut start = 0;
    while start <= cfg.n_u {
        let len = BLOCK.min(cfg.n_u + 1 - start);
        let block = par::map(len, |j| system.moment(C64::new(cfg.alpha, (start + j) as f64 * du), cond));
        let mut small = true;
        for v in block {
            let v = v?;
            small &= v.norm() < CUTOFF * peak;
            vals.push(v);
        }
        if small {
            return Ok(vals);
        }
        start += len;
    }
    if vals[cfg.n_u].norm() > cfg.tail_tol {
        return Err(Error::GridTooCoarse("transform has not decayed at u_max"));
    }
    Ok(vals)
}

/// Density of terminal wealth `W_T` for one investor type.
pub fn invert_to_density(
    solved: &Solved,
    info_kind: InfoKind,
    conditioning: Conditioning,
    cfg: &InversionConfig,
) -> Result<WealthDistribution> {
    if !(cfg.alpha > 0.0) || !(cfg.u_max > 0.0) || cfg.n_u < 2 || cfg.n_w < 3 {
        return Err(Error::InvalidInput("inversion needs alpha > 0, u_max > 0, n_u >= 2, n_w >= 3"));
    }
    let system = MgfSystem::new(solved, info_kind, solved.params.horizon)?;
    let moments = raw_moments(&system, conditioning)?;
    let (mean, variance, skewness) = central(moments);

    let (y_lo, y_hi) = match cfg.w_range {
        Some((lo, hi)) if 0.0 < lo && lo < hi => (lo.ln(), hi.ln()),
        Some(_) => return Err(Error::InvalidInput("wealth range must satisfy 0 < lo < hi")),
        None => {
            let s2 = (moments[1] / (moments[0] * moments[0])).ln();
            let mu = moments[0].ln() - 0.5 * s2;
            let s = s2.sqrt();
            (mu - 10.0 * s, mu + 10.0 * s)
        }
    };
    let vals = transform(&system, conditioning, cfg)?;
    let du = cfg.u_max / cfg.n_u as f64;
    let last = cfg.n_u;
    let alpha = cfg.alpha;
    let w_grid: Vec<f64> = (0..cfg.n_w)
        .map(|i| (y_lo + (y_hi - y_lo) * i as f64 / (cfg.n_w - 1) as f64).exp())
        .collect();
    let raw: Vec<f64> = par::map(cfg.n_w, |i| {
        let y = w_grid[i].ln();
        let mut acc = 0.0;
        for (k, m) in vals.iter().enumerate() {
            let wk = if k == 0 || k == last { 0.5 } else { 1.0 };
            let u = k as f64 * du;
            let (s, c) = (u * y).sin_cos();
            // Re[m e^{-iuy}]
            acc += wk * (m.re * c + m.im * s);
        }
        (-alpha * y).exp() * acc * du / core::f64::consts::PI / w_grid[i]
    });

    let raw_mass = trapezoid(&w_grid, |i| raw[i]);
    let clipped = trapezoid(&w_grid, |i| (-raw[i]).max(0.0));
    if clipped > CLIP_TOL {
        return Err(Error::GridTooCoarse("clipped negative mass exceeds tolerance"));
    }
    let kept = trapezoid(&w_grid, |i| raw[i].max(0.0));
    let pdf: Vec<f64> = raw.iter().map(|&p| p.max(0.0) / kept).collect();
    let mut cdf = Vec::with_capacity(cfg.n_w);
    cdf.push(0.0);
    for i in 1..cfg.n_w {
        let c = cdf[i - 1] + 0.5 * (pdf[i - 1] + pdf[i]) * (w_grid[i] - w_grid[i - 1]);
        cdf.push(c.min(1.0));
    }
    Ok(WealthDistribution {
        w_grid,
        pdf,
        cdf,
        mean,
        variance,
        skewness,
        raw_mass,
        info_kind,
        conditioning,
    })
}

/// Largest pdf change when `u_max` or `n_u` is doubled, on the same wealth grid.
pub fn grid_sensitivity(
    solved: &Solved,
    info_kind: InfoKind,
    conditioning: Conditioning,
    cfg: &InversionConfig,
) -> Result<f64> {
    let base = invert_to_density(solved, info_kind, conditioning, cfg)?;
    let range = Some((base.w_grid[0], base.w_grid[cfg.n_w - 1]));
    let pinned = InversionConfig { w_range: range, ..*cfg };
    let mut worst = 0.0f64;
    for alt in [
        InversionConfig {
            u_max: 2.0 * cfg.u_max,
            ..pinned
        },
        InversionConfig { n_u: 2 * cfg.n_u, ..pinned },
    ] {
        let d = invert_to_density(solved, info_kind, conditioning, &alt)?;
        let diff = base.pdf.iter().zip(&d.pdf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    Ok(worst)
}

/// How returns over `[0, T]` are annualized for the frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnConvention {
    /// `(E[W_T/w] - 1) / T`, standard deviation `sd(W_T/w) / sqrt(T)`.
    #[default]
    Simple,
    /// `E[W_T/w]^{1/T} - 1`, standard deviation `sd(W_T/w) / sqrt(T)`.
    Geometric,
    /// `ln E[W_T/w] / T`, standard deviation `sqrt(ln(1 + var/mean^2) / T)`.
    Continuous,
}

impl ReturnConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            ReturnConvention::Simple => "simple",
            ReturnConvention::Geometric => "geometric",
            ReturnConvention::Continuous => "continuous",
        }
    }

    /// `(mean, std)` of the annualized return from moments of `W_T / w`.
    pub fn annualize(self, mean: f64, variance: f64, horizon: f64) -> (f64, f64) {
        let sd = variance.max(0.0).sqrt() / horizon.sqrt();
        match self {
            ReturnConvention::Simple => ((mean - 1.0) / horizon, sd),
            ReturnConvention::Geometric => (mean.powf(1.0 / horizon) - 1.0, sd),
            ReturnConvention::Continuous => (
                mean.ln() / horizon,
                ((1.0 + variance / (mean * mean)).ln() / horizon).sqrt(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    pub gamma: f64,
    pub mean_return: f64,
    pub std_return: f64,
    pub info_kind: InfoKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    pub points: Vec<FrontierPoint>,
    /// Risk aversions that could not be evaluated, with the reason.
    pub skipped: Vec<(f64, Error)>,
}

fn frontier_point(
    params: &MarketParams,
    gamma: f64,
    info_kind: InfoKind,
    conditioning: Conditioning,
    convention: ReturnConvention,
) -> Result<FrontierPoint> {
    let p = params.with(|r| r.gamma = gamma)?;
    let solved = Solved::new(&p)?;
    let adm = solved.admissibility();
    if !adm.holds(info_kind) {
        return Err(Error::NotVerified {
            info: info_kind,
            lhs: adm.condition(info_kind).lhs,
        });
    }
    let system = MgfSystem::new(&solved, info_kind, p.horizon)?;
    let m1 = system.moment(C64::new(1.0, 0.0), conditioning)?.re;
    let m2 = system.moment(C64::new(2.0, 0.0), conditioning)?.re;
    let (mean, var) = (m1 / p.w, (m2 - m1 * m1) / (p.w * p.w));
    let (mean_return, std_return) = convention.annualize(mean, var, p.horizon);
    Ok(FrontierPoint {
        gamma,
        mean_return,
        std_return,
        info_kind,
    })
}

/// Annualized mean and standard deviation of the optimal terminal wealth for
/// each risk aversion on `gammas`.
pub fn frontier(
    params: &MarketParams,
    gammas: &[f64],
    info_kind: InfoKind,
    conditioning: Conditioning,
    convention: ReturnConvention,
) -> Frontier {
    let results = par::map(gammas.len(), |i| {
        frontier_point(params, gammas[i], info_kind, conditioning, convention)
    });
    let mut out = Frontier {
        points: Vec::new(),
        skipped: Vec::new(),
    };
    for (g, r) in gammas.iter().zip(results) {
        match r {
            Ok(p) => out.points.push(p),
            Err(e) => out.skipped.push((*g, e)),
        }
    }
    out
}

/// Tolerance on `cdf_a - cdf_b` below which dominance is accepted.
pub const DOMINANCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceReport {
    /// `cdf_a <= cdf_b` everywhere up to [`DOMINANCE_TOL`].
    pub dominates: bool,
    /// `max(cdf_a - cdf_b, 0)` over the union of both grids.
    pub max_violation: f64,
    /// Wealth at which the largest violation occurs.
    pub at: f64,
}

/// First-order stochastic dominance of `a` over `b`, with `b`'s cdf
/// re-interpolated onto the union of both grids.
pub fn stochastic_dominance_check(a: &WealthDistribution, b: &WealthDistribution) -> DominanceReport {
    let mut worst = (0.0f64, a.w_grid[0]);
    for &w in a.w_grid.iter().chain(&b.w_grid) {
        let v = a.cdf_at(w) - b.cdf_at(w);
        if v > worst.0 {
            worst = (v, w);
        }
    }
    DominanceReport {
        dominates: worst.0 <= DOMINANCE_TOL,
        max_violation: worst.0,
        at: worst.1,
    }
}
