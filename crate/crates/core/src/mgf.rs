//! Moment generating functions of optimal wealth, `phi_s(t, z) = E_s[(W_t)^z]`.
//!
//! The coefficient functions `D, E, H` solve a Riccati-type system backward
//! from `s = t` with terminal data `z (A, B, C)(t)`. The same equations are
//! integrated in complex arithmetic, which gives the characteristic function
//! of log-wealth on the imaginary axis.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::allocation::gaussian_quad_expectation_complex;
use crate::interp::hermite;
use crate::riccati::Solved;
use crate::{Error, InfoKind, Result, TimeGrid};

type C64 = Complex64;

/// Magnitude of any coefficient treated as divergence.
const EXPLOSION_LEVEL: f64 = 1e10;

/// Whether the moment conditions on the realized `X_0` or integrates it over
/// the prior `N(pi0, R0)`. The partially informed investor's time-0
/// information is trivial, so both coincide for that investor unless a value
/// is supplied to evaluate the filter-state formula at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditioning {
    ConditionalOnX0(f64),
    Unconditional,
}

/// Backward system for one investor type and evaluation time, with the
/// z-independent coefficient data tabulated on half steps.
#[derive(Debug, Clone)]
pub struct MgfSystem {
    kind: InfoKind,
    grid: TimeGrid,
    gamma: f64,
    r: f64,
    lambda: f64,
    lambda_xbar: f64,
    sigma_x: f64,
    rho: f64,
    w: f64,
    pi0: f64,
    r0: f64,
    /// Full info: `B`, `C` at `s = k h / 2`. Partial info: filter gain in `c_half`.
    b_half: Vec<f64>,
    c_half: Vec<f64>,
    /// Riccati values at `t_eval` (terminal data up to the factor `z`).
    terminal: [f64; 3],
    /// Riccati values at `s = 0`.
    base: [f64; 3],
}

/// `D, E, H` on the grid `[0, t_eval]`, with node slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct MgfCoefficients {
    pub grid: TimeGrid,
    pub z: C64,
    pub t_eval: f64,
    pub kind: InfoKind,
    /// `[D, E, H]` per node.
    pub vals: Vec<[C64; 3]>,
    pub slopes: Vec<[C64; 3]>,
    base: [f64; 3],
    w: f64,
    gamma: f64,
    pi0: f64,
    r0: f64,
}

impl MgfSystem {
    /// Tabulates coefficient data for `E_s[(W_t)^z]`, `0 < t_eval <= T`.
    pub fn new(solved: &Solved, kind: InfoKind, t_eval: f64) -> Result<Self> {
        let p = &solved.params;
        let rgrid = *solved.full.grid();
        if !(t_eval > 0.0 && t_eval <= p.horizon * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput("evaluation time must lie in (0, T]"));
        }
        let t_eval = t_eval.min(p.horizon);
        let h = rgrid.step();
        let m = match rgrid.index_of(t_eval) {
            Some(i) if i > 0 => i,
            _ => ((t_eval / h).ceil() as usize).max(1),
        };
        let grid = TimeGrid::new(0.0, t_eval, m)?;
        let hh = grid.step();
        let sol = match kind {
            InfoKind::FullInfo => &solved.full,
            InfoKind::PartialInfo => &solved.partial,
        };
        let half = |k: usize| if k == 2 * m { t_eval } else { k as f64 * 0.5 * hh };
        let (b_half, c_half) = match kind {
            InfoKind::FullInfo => (0..=2 * m)
                .map(|k| {
                    let s = half(k);
                    (sol.b(s), sol.c(s))
                })
                .unzip(),
            InfoKind::PartialInfo => (0..=2 * m)
                .map(|k| (0.0, solved.fv.gain(half(k))))
                .unzip(),
        };
        let (a1, b1, c1) = sol.at(t_eval);
        let (a0, b0, c0) = sol.initial();
        Ok(MgfSystem {
            kind,
            grid,
            gamma: p.gamma,
            r: p.r,
            lambda: p.lambda,
            lambda_xbar: p.lambda * p.x_bar,
            sigma_x: p.sigma_x,
            rho: p.rho,
            w: p.w,
            pi0: p.pi0,
            r0: p.r0,
            b_half,
            c_half,
            terminal: [a1, b1, c1],
            base: [a0, b0, c0],
        })
    }

    pub fn kind(&self) -> InfoKind {
        self.kind
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn t_eval(&self) -> f64 {
        self.grid.t1()
    }

    fn rhs_fn(&self, z: C64) -> impl Fn(usize, &[C64; 3]) -> [C64; 3] + '_ {
        let g = self.gamma;
        let zz = z * z / (g * g) + z / g;
        let z2g = z * z + z * g;
        let zg = z / g;
        let sx = self.sigma_x;
        let sx2 = sx * sx;
        let a1 = sx2 * (1.0 - self.rho * self.rho);
        let zr = z * self.r / g;
        let l = self.lambda;
        let lx = self.lambda_xbar;
        let e0 = C64::new(l, 0.0) - zg * (sx * self.rho);
        let kind = self.kind;
        move |k, y| {
            let [_, ee, hh] = *y;
            match kind {
                InfoKind::FullInfo => {
                    let (b, c) = (self.b_half[k], self.c_half[k]);
                    let d = -zz * (1.0 + g * g * a1 * c * c);
                    let e = e0 + z * (a1 * c);
                    let f = -z2g * (a1 * b * c);
                    let gg = z * (a1 * b) - lx;
                    let h = -z2g * (0.5 * a1 * b * b) - zr;
                    [
                        h + gg * ee - (hh + ee * ee) * (0.5 * sx2),
                        f + (e - hh * sx2) * ee + gg * hh,
                        d + e * hh * 2.0 - hh * hh * sx2,
                    ]
                }
                InfoKind::PartialInfo => {
                    let gain = self.c_half[k];
                    let f = -gain * gain;
                    let e = C64::new(l, 0.0) - zg * gain;
                    [
                        -zr - ee * lx + (hh + ee * ee) * (0.5 * f),
                        (e + hh * f) * ee - hh * lx,
                        -zz + e * hh * 2.0 + hh * hh * f,
                    ]
                }
            }
        }
    }

    fn terminal_data(&self, z: C64) -> [C64; 3] {
        self.terminal.map(|v| z * v)
    }

    /// Integrates from node `from` with data `y` down to node 0, optionally
    /// recording every node.
    fn integrate(
        &self,
        z: C64,
        from: usize,
        y: [C64; 3],
        mut record: Option<&mut Vec<[C64; 3]>>,
    ) -> Result<[C64; 3]> {
        let f = self.rhs_fn(z);
        let h = self.grid.step();
        let mut y = y;
        if let Some(rec) = record.as_deref_mut() {
            rec.push(y);
        }
        for i in (1..=from).rev() {
            let k = 2 * i;
            let k1 = f(k, &y);
            let k2 = f(k - 1, &add(&y, &k1, -0.5 * h));
            let k3 = f(k - 1, &add(&y, &k2, -0.5 * h));
            let k4 = f(k - 2, &add(&y, &k3, -h));
            for j in 0..3 {
                y[j] -= (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
            }
            if !y.iter().all(|v| v.re.is_finite() && v.im.is_finite() && v.norm() <= EXPLOSION_LEVEL) {
                return Err(Error::MomentExplosion {
                    z_re: z.re,
                    z_im: z.im,
                    time: self.grid.node(i - 1),
                });
            }
            if let Some(rec) = record.as_deref_mut() {
                rec.push(y);
            }
        }
        Ok(y)
    }

    /// `[D, E, H]` at `s = 0`.
    pub fn solve_at_zero(&self, z: C64) -> Result<[C64; 3]> {
        self.integrate(z, self.grid.n(), self.terminal_data(z), None)
    }

    /// Re-integrates from fresh terminal data `y` placed at node `from`.
    pub fn solve_from(&self, z: C64, from: usize, y: [C64; 3]) -> Result<[C64; 3]> {
        if from > self.grid.n() {
            return Err(Error::InvalidInput("restart node beyond the evaluation time"));
        }
        self.integrate(z, from, y, None)
    }

    /// Full coefficient paths on `[0, t_eval]`.
    pub fn solve(&self, z: C64) -> Result<MgfCoefficients> {
        let n = self.grid.n();
        let mut rec = Vec::with_capacity(n + 1);
        self.integrate(z, n, self.terminal_data(z), Some(&mut rec))?;
        rec.reverse();
        let f = self.rhs_fn(z);
        let slopes = rec.iter().enumerate().map(|(i, y)| f(2 * i, y)).collect();
        Ok(MgfCoefficients {
            grid: self.grid,
            z,
            t_eval: self.t_eval(),
            kind: self.kind,
            vals: rec,
            slopes,
            base: self.base,
            w: self.w,
            gamma: self.gamma,
            pi0: self.pi0,
            r0: self.r0,
        })
    }

    /// `E[(W_t)^z]` at time 0 under `cond`, without storing coefficient paths.
    pub fn moment(&self, z: C64, cond: Conditioning) -> Result<C64> {
        let y = self.solve_at_zero(z)?;
        time_zero_moment(y, z, self.base, self.w, self.pi0, self.r0, self.kind, cond)
    }
}

fn add(y: &[C64; 3], k: &[C64; 3], s: f64) -> [C64; 3] {
    [y[0] + k[0] * s, y[1] + k[1] * s, y[2] + k[2] * s]
}

#[allow(clippy::too_many_arguments)]
fn time_zero_moment(
    y: [C64; 3],
    z: C64,
    base: [f64; 3],
    w: f64,
    pi0: f64,
    r0: f64,
    kind: InfoKind,
    cond: Conditioning,
) -> Result<C64> {
    // lambda_0^(-z/gamma) = w^z exp(-z (A0 + B0 x + C0 x^2 / 2)) folds into
    // the exponent.
    let a = y[0] - z * base[0];
    let b = y[1] - z * base[1];
    let c = y[2] - z * base[2];
    let wz = (z * w.ln()).exp();
    let at = |x: f64| (a + b * x + c * (0.5 * x * x)).exp();
    let value = match (kind, cond) {
        (_, Conditioning::ConditionalOnX0(x)) => at(x),
        (InfoKind::PartialInfo, Conditioning::Unconditional) => at(pi0),
        (InfoKind::FullInfo, Conditioning::Unconditional) => {
            gaussian_quad_expectation_complex(a, b, c, pi0, r0)?
        }
    };
    Ok(wz * value)
}

impl MgfCoefficients {
    /// `[D, E, H](s)` by cubic Hermite interpolation.
    pub fn at(&self, s: f64) -> [C64; 3] {
        if s >= self.grid.t1() {
            return self.vals[self.grid.n()];
        }
        let (i, off) = self.grid.locate(s);
        let h = self.grid.step();
        core::array::from_fn(|j| {
            let (y0, y1, d0, d1) = (self.vals[i][j], self.vals[i + 1][j], self.slopes[i][j], self.slopes[i + 1][j]);
            C64::new(
                hermite(y0.re, y1.re, d0.re, d1.re, h, off),
                hermite(y0.im, y1.im, d0.im, d1.im, h, off),
            )
        })
    }

    pub fn d_vals(&self) -> impl Iterator<Item = C64> + '_ {
        self.vals.iter().map(|v| v[0])
    }

    pub fn e_vals(&self) -> impl Iterator<Item = C64> + '_ {
        self.vals.iter().map(|v| v[1])
    }

    pub fn h_vals(&self) -> impl Iterator<Item = C64> + '_ {
        self.vals.iter().map(|v| v[2])
    }
}

/// Coefficients for the full-information investor, `E_s[(W*_t)^z]`.
pub fn solve_mgf_full(solved: &Solved, t_eval: f64, z: C64) -> Result<MgfCoefficients> {
    MgfSystem::new(solved, InfoKind::FullInfo, t_eval)?.solve(z)
}

/// Coefficients for the partially informed investor.
pub fn solve_mgf_partial(solved: &Solved, t_eval: f64, z: C64) -> Result<MgfCoefficients> {
    MgfSystem::new(solved, InfoKind::PartialInfo, t_eval)?.solve(z)
}

/// `phi_s(t, z) = (lambda_0 xi_s)^(-z/gamma) exp(D + E x + H x^2 / 2)`, with
/// `x` the market price of risk (full info) or its filter (partial info).
pub fn evaluate_mgf(coeffs: &MgfCoefficients, s: f64, xi_value: f64, state: f64, lambda0: f64) -> C64 {
    let [d, e, h] = coeffs.at(s);
    let z = coeffs.z;
    (-(z / coeffs.gamma) * (lambda0 * xi_value).ln() + d + e * state + h * (0.5 * state * state)).exp()
}

/// Time-0 moment `E[(W_t)^z]`; the full-information multiplier's dependence on
/// `X_0` is folded into the exponent before integrating over the prior.
pub fn unconditional_mgf(coeffs: &MgfCoefficients) -> Result<C64> {
    time_zero_moment(
        coeffs.vals[0],
        coeffs.z,
        coeffs.base,
        coeffs.w,
        coeffs.pi0,
        coeffs.r0,
        coeffs.kind,
        Conditioning::Unconditional,
    )
}

/// Time-0 moment conditional on `X_0 = x0` (full info) or at filter state
/// `x0` (partial info).
pub fn conditional_mgf(coeffs: &MgfCoefficients, x0: f64) -> Result<C64> {
    time_zero_moment(
        coeffs.vals[0],
        coeffs.z,
        coeffs.base,
        coeffs.w,
        coeffs.pi0,
        coeffs.r0,
        coeffs.kind,
        Conditioning::ConditionalOnX0(x0),
    )
}
