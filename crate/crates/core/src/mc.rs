//! Monte Carlo oracle.
//!
//! The market price of risk is sampled from its exact Gaussian transition,
//! jointly with the Brownian increment that drives it, so the only time
//! discretization is the log-Euler step for stock, wealth and state price
//! densities, and the Euler step of the filter. Each antithetic pair (or each
//! path, without antithetics) draws from its own ChaCha stream derived from
//! the seed, so results do not depend on the thread count.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::allocation::{StrategyKind, StrategySpec};
use crate::filter::FilterStep;
use crate::riccati::Solved;
use crate::{par, Error, Result, TimeGrid};

/// Most paths a simulation will record in full.
pub const MAX_DUMPED_PATHS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// `X_0 ~ N(pi0, R0)`.
    Prior,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
    pub x0: InitialState,
    /// Times at which `X_t` and `pi_t` are recorded; must be grid nodes.
    pub checkpoints: Vec<f64>,
    /// Track the largest gap between closed-form and self-financed wealth.
    pub track_gap: bool,
    /// Number of leading paths recorded in full, capped at
    /// [`MAX_DUMPED_PATHS`].
    pub dump_paths: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_paths: 100_000,
            n_steps: 500,
            seed: 42,
            antithetic: true,
            x0: InitialState::Prior,
            checkpoints: Vec::new(),
            track_gap: false,
            dump_paths: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.n_steps == 0 {
            return Err(Error::InvalidInput("need at least one path and one step"));
        }
        if self.antithetic && !self.n_paths.is_multiple_of(2) {
            return Err(Error::InvalidInput("antithetic sampling needs an even path count"));
        }
        Ok(())
    }
}

/// Mean with its standard error. With antithetics the error comes from the
/// pair averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Sample variance of the per-path values.
    pub variance: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Whether `value` lies within `k` standard errors.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

fn mean_var(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64, usize) {
    let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for x in xs {
        n += 1;
        let d = x - mean;
        mean += d / n as f64;
        m2 += d * (x - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    (mean, var, n)
}

/// One recorded path.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPath {
    pub grid: TimeGrid,
    pub x_vals: Vec<f64>,
    pub pi_vals: Vec<f64>,
    pub s_vals: Vec<f64>,
    pub zs_increments: Vec<f64>,
    pub zperp_increments: Vec<f64>,
    pub xi_star_vals: Vec<f64>,
    pub xi_tilde_vals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub pi: Vec<f64>,
}

/// Per-path terminal values of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenarios {
    pub grid: TimeGrid,
    pub antithetic: bool,
    pub x0: Vec<f64>,
    pub x_t: Vec<f64>,
    pub pi_t: Vec<f64>,
    pub xi_star: Vec<f64>,
    pub xi_tilde: Vec<f64>,
    /// Closed-form optimal terminal wealth given the simulated densities.
    pub wealth_full: Vec<f64>,
    pub wealth_partial: Vec<f64>,
    /// Self-financed terminal wealth, one vector per strategy.
    pub wealth: Vec<Vec<f64>>,
    /// Largest relative gap between self-financed and closed-form wealth over
    /// nodes and paths, for untilted optimal strategies when tracked.
    pub max_gap: Vec<Option<f64>>,
    pub checkpoints: Vec<Checkpoint>,
    /// Mean and variance of `dI / sqrt(dt)` over all steps and paths.
    pub innovation_mean: f64,
    pub innovation_var: f64,
    pub paths: Vec<ScenarioPath>,
}

impl Scenarios {
    pub fn n_paths(&self) -> usize {
        self.x0.len()
    }

    /// Estimate of `E[f(i)]` over path indices.
    pub fn estimate(&self, f: impl Fn(usize) -> f64) -> Estimate {
        let n = self.n_paths();
        let (mean, variance, _) = mean_var((0..n).map(&f));
        let std_error = if self.antithetic {
            let (_, pv, np) = mean_var((0..n / 2).map(|p| 0.5 * (f(2 * p) + f(2 * p + 1))));
            (pv / np as f64).sqrt()
        } else {
            (variance / n as f64).sqrt()
        };
        Estimate {
            mean,
            variance,
            std_error,
        }
    }
}

struct Tables {
    a_full: Vec<f64>,
    b_full: Vec<f64>,
    c_full: Vec<f64>,
    a_part: Vec<f64>,
    b_part: Vec<f64>,
    c_part: Vec<f64>,
    r: Vec<f64>,
    gain: Vec<f64>,
}

impl Tables {
    fn new(solved: &Solved, grid: &TimeGrid) -> Self {
        let nodes: Vec<f64> = grid.nodes().collect();
        let col = |f: &dyn Fn(f64) -> f64| nodes.iter().map(|&t| f(t)).collect::<Vec<_>>();
        Tables {
            a_full: col(&|t| solved.full.a(t)),
            b_full: col(&|t| solved.full.b(t)),
            c_full: col(&|t| solved.full.c(t)),
            a_part: col(&|t| solved.partial.a(t)),
            b_part: col(&|t| solved.partial.b(t)),
            c_part: col(&|t| solved.partial.c(t)),
            r: col(&|t| solved.fv.r(t)),
            gain: col(&|t| solved.fv.gain(t)),
        }
    }
}

struct PathOut {
    x0: f64,
    x_t: f64,
    pi_t: f64,
    ln_xi: f64,
    ln_xit: f64,
    ln_wf: f64,
    ln_wp: f64,
    ln_w: Vec<f64>,
    gap: Vec<f64>,
    checkpoints: Vec<(f64, f64)>,
    innov: (f64, f64),
    path: Option<ScenarioPath>,
}

struct Engine<'a> {
    solved: &'a Solved,
    grid: TimeGrid,
    tables: Tables,
    strategies: &'a [StrategySpec],
    checkpoint_nodes: Vec<usize>,
    config: &'a SimConfig,
    filter: FilterStep,
}

impl Engine<'_> {
    fn normals(&self, stream: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(stream);
        (0..3 * self.grid.n() + 1).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn run(&self, z: &[f64], sign: f64, record: bool) -> PathOut {
        let p = &self.solved.params;
        let t = &self.tables;
        let n = self.grid.n();
        let h = self.grid.step();
        let sh = h.sqrt();
        let (g, sigma, r, sx, rho) = (p.gamma, p.sigma, p.r, p.sigma_x, p.rho);
        let rho_c = (1.0 - rho * rho).max(0.0).sqrt();
        let decay = (-p.lambda * h).exp();
        let beta = (1.0 - decay) / (p.lambda * h);
        let resid = ((1.0 - decay * decay) / (2.0 * p.lambda) - beta * beta * h).max(0.0).sqrt();

        let x0 = match self.config.x0 {
            InitialState::Prior => p.pi0 + sign * p.r0.sqrt() * z[0],
            InitialState::Fixed(x) => x,
        };
        let (mut x, mut pi) = (x0, p.pi0);
        let k0_full = t.a_full[0] + t.b_full[0] * x0 + 0.5 * t.c_full[0] * x0 * x0;
        let k0_part = t.a_part[0] + t.b_part[0] * pi + 0.5 * t.c_part[0] * pi * pi;
        let ln_w0 = p.w.ln();
        let m = self.strategies.len();
        let mut ln_w = vec![ln_w0; m];
        let mut gap = vec![0.0f64; m];
        let (mut ln_xi, mut ln_xit, mut ln_s) = (0.0, 0.0, 0.0);
        let (mut isum, mut isq) = (0.0, 0.0);
        let mut checkpoints = Vec::with_capacity(self.checkpoint_nodes.len());
        let mut path = record.then(|| ScenarioPath {
            grid: self.grid,
            x_vals: vec![x],
            pi_vals: vec![pi],
            s_vals: vec![1.0],
            zs_increments: Vec::with_capacity(n),
            zperp_increments: Vec::with_capacity(n),
            xi_star_vals: vec![1.0],
            xi_tilde_vals: vec![1.0],
        });
        if self.checkpoint_nodes.first() == Some(&0) {
            checkpoints.push((x, pi));
        }

        for k in 0..n {
            let zs = sign * sh * z[3 * k + 1];
            let zp = sign * sh * z[3 * k + 2];
            let z3 = sign * z[3 * k + 3];
            for (j, s) in self.strategies.iter().enumerate() {
                let base = match s.kind {
                    StrategyKind::FullInfo => {
                        x / (g * sigma) + rho * sx / sigma * (t.b_full[k] + t.c_full[k] * x)
                    }
                    StrategyKind::PartialInfo => {
                        pi / (g * sigma) + t.gain[k] / sigma * (t.b_part[k] + t.c_part[k] * pi)
                    }
                    StrategyKind::Myopic => x / (g * sigma),
                    StrategyKind::Constant(th) => th,
                };
                let th = base * (1.0 + s.scale) + s.shift;
                ln_w[j] += (r + th * sigma * x - 0.5 * th * th * sigma * sigma) * h + th * sigma * zs;
            }
            let nu = -g * (t.b_full[k] + t.c_full[k] * x) * sx;
            ln_xi += (-r - 0.5 * x * x - 0.5 * nu * nu * rho_c * rho_c) * h - x * zs - nu * rho_c * zp;
            let dlog_s = (r + sigma * x - 0.5 * sigma * sigma) * h + sigma * zs;
            ln_s += dlog_s;
            let d_innov = self.filter.innovation(dlog_s, pi, h);
            isum += d_innov / sh;
            isq += d_innov * d_innov / h;
            ln_xit += (-r - 0.5 * pi * pi) * h - pi * d_innov;
            pi = self.filter.update(pi, t.r[k], d_innov, h);
            let dzx = rho * zs + rho_c * zp;
            x = p.x_bar + (x - p.x_bar) * decay + sx * (beta * dzx + resid * z3);

            if self.config.track_gap {
                let i = k + 1;
                for (j, s) in self.strategies.iter().enumerate() {
                    if !s.is_untilted() {
                        continue;
                    }
                    let cf = match s.kind {
                        StrategyKind::FullInfo => {
                            ln_w0 - k0_full - ln_xi / g
                                + t.a_full[i]
                                + t.b_full[i] * x
                                + 0.5 * t.c_full[i] * x * x
                        }
                        StrategyKind::PartialInfo => {
                            ln_w0 - k0_part - ln_xit / g
                                + t.a_part[i]
                                + t.b_part[i] * pi
                                + 0.5 * t.c_part[i] * pi * pi
                        }
                        _ => continue,
                    };
                    gap[j] = gap[j].max((ln_w[j] - cf).exp_m1().abs());
                }
            }
            if self.checkpoint_nodes.contains(&(k + 1)) {
                checkpoints.push((x, pi));
            }
            if let Some(ps) = path.as_mut() {
                ps.x_vals.push(x);
                ps.pi_vals.push(pi);
                ps.s_vals.push(ln_s.exp());
                ps.zs_increments.push(zs);
                ps.zperp_increments.push(zp);
                ps.xi_star_vals.push(ln_xi.exp());
                ps.xi_tilde_vals.push(ln_xit.exp());
            }
        }
        PathOut {
            x0,
            x_t: x,
            pi_t: pi,
            ln_xi,
            ln_xit,
            ln_wf: ln_w0 - k0_full - ln_xi / g,
            ln_wp: ln_w0 - k0_part - ln_xit / g,
            ln_w,
            gap,
            checkpoints,
            innov: (isum, isq),
            path,
        }
    }
}

/// Simulates `config.n_paths` joint scenarios on `[0, T]` and runs every
/// strategy on the same random numbers.
pub fn simulate_scenarios(solved: &Solved, config: &SimConfig, strategies: &[StrategySpec]) -> Result<Scenarios> {
    config.validate()?;
    let p = &solved.params;
    let grid = TimeGrid::new(0.0, p.horizon, config.n_steps)?;
    let checkpoint_nodes = config
        .checkpoints
        .iter()
        .map(|&t| grid.index_of(t).ok_or(Error::InvalidInput("checkpoint is not a simulation node")))
        .collect::<Result<Vec<_>>>()?;
    let engine = Engine {
        solved,
        grid,
        tables: Tables::new(solved, &grid),
        strategies,
        checkpoint_nodes,
        config,
        filter: FilterStep::new(p),
    };
    let dump = config.dump_paths.min(MAX_DUMPED_PATHS);
    let outs: Vec<PathOut> = if config.antithetic {
        par::map(config.n_paths / 2, |pair| {
            let z = engine.normals(pair as u64);
            [
                engine.run(&z, 1.0, 2 * pair < dump),
                engine.run(&z, -1.0, 2 * pair + 1 < dump),
            ]
        })
        .into_iter()
        .flatten()
        .collect()
    } else {
        par::map(config.n_paths, |i| engine.run(&engine.normals(i as u64), 1.0, i < dump))
    };

    let n = outs.len();
    let m = strategies.len();
    let mut sc = Scenarios {
        grid,
        antithetic: config.antithetic,
        x0: Vec::with_capacity(n),
        x_t: Vec::with_capacity(n),
        pi_t: Vec::with_capacity(n),
        xi_star: Vec::with_capacity(n),
        xi_tilde: Vec::with_capacity(n),
        wealth_full: Vec::with_capacity(n),
        wealth_partial: Vec::with_capacity(n),
        wealth: vec![Vec::with_capacity(n); m],
        max_gap: vec![None; m],
        checkpoints: config
            .checkpoints
            .iter()
            .map(|&t| Checkpoint {
                t,
                x: Vec::with_capacity(n),
                pi: Vec::with_capacity(n),
            })
            .collect(),
        innovation_mean: 0.0,
        innovation_var: 0.0,
        paths: Vec::new(),
    };
    let (mut isum, mut isq) = (0.0, 0.0);
    for o in outs {
        sc.x0.push(o.x0);
        sc.x_t.push(o.x_t);
        sc.pi_t.push(o.pi_t);
        sc.xi_star.push(o.ln_xi.exp());
        sc.xi_tilde.push(o.ln_xit.exp());
        sc.wealth_full.push(o.ln_wf.exp());
        sc.wealth_partial.push(o.ln_wp.exp());
        for (j, spec) in strategies.iter().enumerate() {
            sc.wealth[j].push(o.ln_w[j].exp());
            if config.track_gap
                && spec.is_untilted()
                && matches!(spec.kind, StrategyKind::FullInfo | StrategyKind::PartialInfo)
            {
                let g = sc.max_gap[j].get_or_insert(0.0);
                *g = g.max(o.gap[j]);
            }
        }
        for (c, (x, pi)) in sc.checkpoints.iter_mut().zip(o.checkpoints) {
            c.x.push(x);
            c.pi.push(pi);
        }
        isum += o.innov.0;
        isq += o.innov.1;
        if let Some(path) = o.path {
            sc.paths.push(path);
        }
    }
    let count = (n * grid.n()) as f64;
    sc.innovation_mean = isum / count;
    sc.innovation_var = isq / count - sc.innovation_mean * sc.innovation_mean;
    Ok(sc)
}

/// Simulated expected utility along a grid of tilts `theta (1 + eps)` and
/// `theta + eps`, all on common random numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub eps: Vec<f64>,
    pub scale: Vec<Estimate>,
    pub shift: Vec<Estimate>,
    pub argmax_scale: f64,
    pub argmax_shift: f64,
}

pub fn perturbation_test(
    solved: &Solved,
    config: &SimConfig,
    base: StrategySpec,
    eps: &[f64],
) -> Result<Perturbation> {
    let mut specs: Vec<StrategySpec> = eps.iter().map(|&e| base.scaled(e)).collect();
    specs.extend(eps.iter().map(|&e| base.shifted(e)));
    let sc = simulate_scenarios(solved, config, &specs)?;
    let p = &solved.params;
    let curve = |j0: usize| -> Vec<Estimate> {
        (0..eps.len())
            .map(|j| sc.estimate(|i| p.utility(sc.wealth[j0 + j][i])))
            .collect()
    };
    let scale = curve(0);
    let shift = curve(eps.len());
    let argmax = |c: &[Estimate]| {
        let j = (0..c.len())
            .max_by(|&a, &b| c[a].mean.total_cmp(&c[b].mean))
            .unwrap_or(0);
        eps.get(j).copied().unwrap_or(0.0)
    };
    Ok(Perturbation {
        argmax_scale: argmax(&scale),
        argmax_shift: argmax(&shift),
        eps: eps.to_vec(),
        scale,
        shift,
    })
}
