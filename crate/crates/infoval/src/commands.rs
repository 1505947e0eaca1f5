//! One function per subcommand. Each writes its tables through [`Output`] and
//! finishes with a manifest.

use infoval_core::allocation::{
    expected_utility_full_unconditional, expected_utility_partial_unconditional, myopic, penalty, strategy_full,
    strategy_partial, StrategySpec,
};
use infoval_core::density::{frontier, invert_to_density, InversionConfig, ReturnConvention, WealthDistribution};
use infoval_core::filter::{run_filter, PricePath};
use infoval_core::mc::{simulate_scenarios, Estimate, InitialState, SimConfig, MAX_DUMPED_PATHS};
use infoval_core::mgf::{Conditioning, MgfSystem};
use infoval_core::riccati::{maximal_admissible_horizon, Solved};
use infoval_core::voi::{voi_sweep, SweepAxis, SweepPoint};
use infoval_core::{classify, Error, InfoKind, MarketParams, TimeGrid};
use num_complex::Complex64;
use serde_json::json;

use crate::config::{self, parse_grid};
use crate::error::CliError;
use crate::output::{num, opt, Output};
use crate::{
    AxisArg, Cli, Command, ConventionArg, DensityArgs, FilterArgs, FrontierArgs, InfoArg, SimulateArgs, StrategyArgs,
    VoiArgs,
};

pub fn run(cli: &Cli, argv: &[String]) -> Result<(), CliError> {
    let params = config::load(cli.config.as_deref(), &cli.set)?;
    let mut out = Output::new(&cli.out)?;
    let (name, settings) = match &cli.command {
        Command::Classify => ("classify", cmd_classify(&params, &mut out)?),
        Command::Solve => ("solve", cmd_solve(&params, &mut out)?),
        Command::Strategy(a) => ("strategy", cmd_strategy(&params, a, &mut out)?),
        Command::Density(a) => ("density", cmd_density(&params, a, &mut out)?),
        Command::Frontier(a) => ("frontier", cmd_frontier(&params, a, &mut out)?),
        Command::Voi(a) => ("voi", cmd_voi(&params, a, &mut out)?),
        Command::Simulate(a) => ("simulate", cmd_simulate(&params, a, &mut out)?),
        Command::Figures(a) => ("figures", crate::figures::run(&params, a, &mut out)?),
        Command::Filter(a) => ("filter", cmd_filter(&params, a, &mut out)?),
    };
    out.finish(name, argv, &params, settings)
}

pub fn kinds(info: InfoArg) -> &'static [InfoKind] {
    match info {
        InfoArg::Full => &[InfoKind::FullInfo],
        InfoArg::Partial => &[InfoKind::PartialInfo],
        InfoArg::Both => &[InfoKind::FullInfo, InfoKind::PartialInfo],
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    CliError::Core(e.clone()).kind()
}

fn conditioning(x0: Option<f64>) -> Conditioning {
    x0.map_or(Conditioning::Unconditional, Conditioning::ConditionalOnX0)
}

fn cond_json(c: Conditioning) -> serde_json::Value {
    match c {
        Conditioning::Unconditional => json!("unconditional"),
        Conditioning::ConditionalOnX0(x) => json!({ "x0": x }),
    }
}

fn cmd_classify(p: &MarketParams, out: &mut Output) -> Result<serde_json::Value, CliError> {
    let rep = classify(p);
    let t2 = maximal_admissible_horizon(p);
    println!("rho* = {:.6}", rep.rho_star);
    println!("gamma* = {}", rep.gamma_star.map_or("undefined".into(), |g| format!("{g:.6}")));
    println!("regime = {}", rep.regime.as_str());
    println!("T* = {}", rep.t_star.map_or("inf".into(), |t| format!("{t:.4}")));
    println!("T** = {}", t2.map_or("inf".into(), |t| format!("{t:.4}")));
    out.table(
        "classify.csv",
        &["rho_star", "gamma_star", "regime", "t_star", "t_double_star", "a", "b", "c", "delta"],
        [vec![
            num(rep.rho_star),
            opt(rep.gamma_star),
            rep.regime.as_str().to_string(),
            opt(rep.t_star),
            opt(t2),
            num(rep.a),
            num(rep.b),
            num(rep.c),
            num(rep.delta),
        ]],
    )?;
    Ok(json!({}))
}

fn cmd_solve(p: &MarketParams, out: &mut Output) -> Result<serde_json::Value, CliError> {
    let s = Solved::new(p)?;
    let grid = *s.full.grid();
    let rows = grid.nodes().enumerate().map(|(i, t)| {
        let (a, b, c) = (s.full.a_vals()[i], s.full.b_vals()[i], s.full.c_vals()[i]);
        let (at, bt, ct) = (s.partial.a_vals()[i], s.partial.b_vals()[i], s.partial.c_vals()[i]);
        [t, a, b, c, s.fv.r_vals()[i], s.q.q_vals()[i], at, bt, ct].map(num).to_vec()
    });
    out.table("solve.csv", &["t", "A", "B", "C", "R", "Q", "A_tilde", "B_tilde", "C_tilde"], rows)?;
    println!("solved on {} intervals, step-halving error {:.2e}", grid.n(), s.full.error_estimate());
    Ok(json!({ "intervals": grid.n() }))
}

fn cmd_strategy(p: &MarketParams, a: &StrategyArgs, out: &mut Output) -> Result<serde_json::Value, CliError> {
    if a.points < 2 {
        return Err(CliError::Config("--points must be at least 2".into()));
    }
    let s = Solved::new(p)?;
    let state = a.state.unwrap_or(p.pi0);
    let rows = (0..a.points).map(|k| {
        let t = p.horizon * k as f64 / (a.points - 1) as f64;
        [
            t,
            strategy_full(t, state, &s.full, p),
            strategy_partial(t, state, &s.partial, &s.fv, p),
            myopic(state, p),
            penalty(t, state, &s.full, p),
        ]
        .map(num)
        .to_vec()
    });
    out.table("strategy.csv", &["t", "theta_full", "theta_partial", "theta_myopic", "nu"], rows)?;
    Ok(json!({ "state": state, "points": a.points }))
}

pub fn density_rows(d: &WealthDistribution) -> impl Iterator<Item = Vec<String>> + '_ {
    (0..d.w_grid.len()).map(|i| {
        vec![
            d.info_kind.as_str().to_string(),
            num(d.w_grid[i]),
            num(d.pdf[i]),
            num(d.cdf[i]),
        ]
    })
}

fn cmd_density(p: &MarketParams, a: &DensityArgs, out: &mut Output) -> Result<serde_json::Value, CliError> {
    let base = if a.wide { InversionConfig::wide() } else { InversionConfig::default() };
    let cfg = InversionConfig {
        alpha: a.alpha,
        u_max: a.u_max.unwrap_or(base.u_max),
        n_u: a.n_u,
        n_w: a.n_w,
        tail_tol: a.tail_tol.unwrap_or(base.tail_tol),
        w_range: a.w_min.zip(a.w_max),
    };
    let cond = conditioning(a.x0);
    let s = Solved::new(p)?;
    let mut dists = Vec::new();
    for &kind in kinds(a.info) {
        let d = invert_to_density(&s, kind, cond, &cfg)?;
        println!(
            "{}: mean {:.6} variance {:.6} skewness {:.4} raw mass {:.6}",
            kind.as_str(),
            d.mean,
            d.variance,
            d.skewness,
            d.raw_mass
        );
        dists.push(d);
    }
    out.table("density.csv", &["info", "w", "pdf", "cdf"], dists.iter().flat_map(density_rows))?;
    let summary: Vec<_> = dists
        .iter()
        .map(|d| {
            json!({
                "info": d.info_kind.as_str(), "mean": d.mean, "variance": d.variance,
                "skewness": d.skewness, "raw_mass": d.raw_mass,
            })
        })
        .collect();
    Ok(json!({
        "alpha": cfg.alpha, "u_max": cfg.u_max, "n_u": cfg.n_u, "n_w": cfg.n_w,
        "tail_tol": cfg.tail_tol, "w_range": cfg.w_range, "conditioning": cond_json(cond),
        "summary": summary,
    }))
}

pub fn convention(c: ConventionArg) -> ReturnConvention {
    match c {
        ConventionArg::Simple => ReturnConvention::Simple,
        ConventionArg::Geometric => ReturnConvention::Geometric,
        ConventionArg::Continuous => ReturnConvention::Continuous,
    }
}

/// Frontier rows in gamma order, skipped points carrying the error kind.
pub fn frontier_rows(
    p: &MarketParams,
    gammas: &[f64],
    kinds: &[InfoKind],
    cond: Conditioning,
    conv: ReturnConvention,
) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for &kind in kinds {
        let f = frontier(p, gammas, kind, cond, conv);
        let (mut points, mut skipped) = (f.points.iter().peekable(), f.skipped.iter().peekable());
        for &g in gammas {
            let row = if points.peek().is_some_and(|pt| pt.gamma == g) {
                let pt = points.next().expect("peeked");
                vec![num(pt.mean_return), num(pt.std_return), "ok".into()]
            } else {
                let (_, e) = skipped.next().expect("every gamma is either a point or skipped");
                vec![String::new(), String::new(), error_kind(e).into()]
            };
            let mut full = vec![kind.as_str().to_string(), num(g)];
            full.extend(row);
            rows.push(full);
        }
    }
    rows
}

fn cmd_frontier(p: &MarketParams, a: &FrontierArgs, out: &mut Output) -> Result<serde_json::Value, CliError> {
    let gammas = parse_grid(&a.gammas)?;
    let conv = convention(a.convention);
    let cond = conditioning(a.x0);
    let rows = frontier_rows(p, &gammas, kinds(a.info), cond, conv);
    let skipped = rows.iter().filter(|r| r[4] != "ok").count();
    if skipped > 0 {
        println!("{skipped} of {} points skipped, see the status column", rows.len());
    }
    out.table("frontier.csv", &["info", "gamma", "mean_return", "std_return", "status"], rows)?;
    Ok(json!({
        "gammas": gammas, "convention": conv.as_str(), "conditioning": cond_json(cond),
    }))
}

pub fn axis(a: AxisArg) -> SweepAxis {
    match a {
        AxisArg::R0 => SweepAxis::R0,
        AxisArg::T => SweepAxis::Horizon,
        AxisArg::Rho => SweepAxis::Rho,
        AxisArg::Gamma => SweepAxis::Gamma,
    }
}

fn default_grid(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::R0 => "0:1:21",
        SweepAxis::Horizon => "1:20:20",
        SweepAxis::Rho => "-0.9:0.9:19",
        SweepAxis::Gamma => "1.5:10:18",
    }
}

pub const VOI_COLUMNS: [&str; 9] = [
    "v_initial",
    "v_dynamic",
    "ratio",
    "delta_w_initial",
    "delta_w_dynamic",
    "ce_partial",
    "ce_partial_r0zero",
    "ce_full",
    "status",
];

/// The nine report columns of one sweep point, blanks plus the error kind on failure.
pub fn voi_cells(pt: &SweepPoint) -> Vec<String> {
    match &pt.report {
        Ok(r) => {
            let mut v = [
                r.v_initial,
                r.v_dynamic,
                r.ratio(),
                r.delta_w_initial,
                r.delta_w_dynamic,
                r.ce_partial,
                r.ce_partial_r0zero,
                r.ce_full,
            ]
            .map(num)
            .to_vec();
            v.push("ok".into());
            v
        }
        Err(e) => {
            let mut v = vec![String::new(); 8];
            v.push(error_kind(e).into());
            v
        }
    }
}

fn cmd_voi(p: &MarketParams, a: &VoiArgs, out: &mut Output) -> Result<serde_json::Value, CliError> {
    let ax = axis(a.sweep);
    let grid = parse_grid(a.grid.as_deref().unwrap_or(default_grid(ax)))?;
    let rhos = match &a.rho {
        Some(spec) => parse_grid(spec)?,
        None => vec![p.rho],
    };
    if ax == SweepAxis::Rho && a.rho.is_some() {
        return Err(CliError::Config("--rho cannot be combined with --sweep rho".into()));
    }
    let mut rows = Vec::new();
    for &rho in &rhos {
        let base = p.with(|r| r.rho = rho)?;
        for pt in voi_sweep(&base, ax, &grid) {
            let mut row = vec![num(rho), num(pt.value)];
            row.extend(voi_cells(&pt));
            rows.push(row);
        }
    }
    let failed = rows.iter().filter(|r| r[10] != "ok").count();
    if failed > 0 {
        println!("{failed} of {} points failed, see the status column", rows.len());
    }
    let mut header = vec!["rho", ax.as_str()];
    header.extend(VOI_COLUMNS);
    out.table("voi.csv", &header, rows)?;
    Ok(json!({ "sweep": ax.as_str(), "grid": grid, "rho": rhos }))
}

fn estimate_row(name: &str, est: &Estimate, closed: Option<f64>) -> Vec<String> {
    let z = closed.map(|c| (est.mean - c) / est.std_error);
    println!(
        "{name:<22} {:>14.6e} +- {:<12.3e} closed form {:>14} z {}",
        est.mean,
        est.std_error,
        closed.map_or("-".into(), |c| format!("{c:.6e}")),
        z.map_or("-".into(), |z| format!("{z:+.2}"))
    );
    vec![name.into(), num(est.mean), num(est.std_error), opt(closed), opt(z)]
}

fn cmd_simulate(p: &MarketParams, a: &SimulateArgs, out: &mut Output) -> Result<serde_json::Value, CliError> {
    if a.dump > MAX_DUMPED_PATHS {
        return Err(CliError::Config(format!("--dump is capped at {MAX_DUMPED_PATHS}")));
    }
    let s = Solved::new(p)?;
    let cfg = SimConfig {
        n_paths: a.paths,
        n_steps: a.steps,
        seed: a.seed,
        antithetic: !a.no_antithetic,
        x0: a.x0.map_or(InitialState::Prior, InitialState::Fixed),
        dump_paths: a.dump,
        ..SimConfig::default()
    };
    let strategies = [StrategySpec::full(), StrategySpec::partial(), StrategySpec::myopic()];
    let sc = simulate_scenarios(&s, &cfg, &strategies)?;

    let cond = conditioning(a.x0);
    let moment = |kind: InfoKind, z: f64| -> Result<f64, CliError> {
        Ok(MgfSystem::new(&s, kind, p.horizon)?.moment(Complex64::new(z, 0.0), cond)?.re)
    };
    // Closed-form expected utility: the prior formulas, or the moment at 1 - gamma given X_0.
    let utility = |kind: InfoKind| -> Result<Option<f64>, CliError> {
        Ok(match (a.x0, kind) {
            (None, InfoKind::FullInfo) => Some(expected_utility_full_unconditional(&s)?),
            (None, InfoKind::PartialInfo) => Some(expected_utility_partial_unconditional(&s)?),
            (Some(_), _) if p.is_log_utility() => None,
            (Some(_), _) => Some(moment(kind, 1.0 - p.gamma)? / (1.0 - p.gamma)),
        })
    };
    let u_full = utility(InfoKind::FullInfo)?;
    let u_partial = utility(InfoKind::PartialInfo)?;

    let mut rows = vec![
        estimate_row("budget_full", &sc.estimate(|i| sc.xi_star[i] * sc.wealth_full[i]), Some(p.w)),
        estimate_row("budget_partial", &sc.estimate(|i| sc.xi_tilde[i] * sc.wealth_partial[i]), Some(p.w)),
        estimate_row("mean_wealth_full", &sc.estimate(|i| sc.wealth_full[i]), Some(moment(InfoKind::FullInfo, 1.0)?)),
        estimate_row(
            "mean_wealth_partial",
            &sc.estimate(|i| sc.wealth_partial[i]),
            Some(moment(InfoKind::PartialInfo, 1.0)?),
        ),
        estimate_row("utility_full", &sc.estimate(|i| p.utility(sc.wealth_full[i])), u_full),
        estimate_row("utility_partial", &sc.estimate(|i| p.utility(sc.wealth_partial[i])), u_partial),
    ];
    for (name, k, closed) in [
        ("traded_utility_full", 0, u_full),
        ("traded_utility_partial", 1, u_partial),
        ("traded_utility_myopic", 2, None),
    ] {
        let w = &sc.wealth[k];
        rows.push(estimate_row(name, &sc.estimate(|i| p.utility(w[i])), closed));
    }
    for (name, value, closed) in [("innovation_mean", sc.innovation_mean, 0.0), ("innovation_var", sc.innovation_var, 1.0)] {
        println!("{name:<22} {value:>14.6e}                 closed form {closed:>14.6e}");
        rows.push(vec![name.into(), num(value), String::new(), num(closed), String::new()]);
    }
    out.table("simulate.csv", &["quantity", "estimate", "std_error", "closed_form", "z_score"], rows)?;

    if !sc.paths.is_empty() {
        let rows = sc.paths.iter().enumerate().flat_map(|(k, path)| {
            path.grid.nodes().enumerate().map(move |(i, t)| {
                let mut row = vec![k.to_string()];
                row.extend(
                    [t, path.x_vals[i], path.pi_vals[i], path.s_vals[i], path.xi_star_vals[i], path.xi_tilde_vals[i]]
                        .map(num),
                );
                row
            })
        });
        out.table("paths.csv", &["path", "t", "x", "pi", "s", "xi_star", "xi_tilde"], rows)?;
    }
    Ok(json!({
        "paths": cfg.n_paths, "steps": cfg.n_steps, "seed": cfg.seed, "antithetic": cfg.antithetic,
        "x0": a.x0, "dump": cfg.dump_paths,
    }))
}

fn read_prices(path: &std::path::Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name).ok_or_else(|| bad(format!("no `{name}` column")));
    let (it, is) = (col("t")?, col("s")?);
    let (mut t, mut s) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |k: usize| {
            rec.get(k)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| bad(format!("row {}: not a number", line + 2)))
        };
        t.push(field(it)?);
        s.push(field(is)?);
    }
    Ok((t, s))
}

fn cmd_filter(p: &MarketParams, a: &FilterArgs, out: &mut Output) -> Result<serde_json::Value, CliError> {
    let (t, s) = read_prices(&a.prices)?;
    if t.len() < 2 {
        return Err(CliError::Config("price file needs at least two rows".into()));
    }
    let grid = TimeGrid::new(t[0], t[t.len() - 1], t.len() - 1)?;
    let tol = 1e-9 * grid.step().max(1.0);
    if t.iter().enumerate().any(|(i, &ti)| (ti - grid.node(i)).abs() > tol) {
        return Err(CliError::Config("price times must be evenly spaced".into()));
    }
    let fp = run_filter(p, &PricePath::new(grid, s.clone())?)?;
    let rows = (0..t.len()).map(|i| {
        vec![
            num(t[i]),
            num(s[i]),
            num(fp.pi_vals[i]),
            num(fp.fv.r(t[i])),
            if i == 0 { String::new() } else { num(fp.innov_increments[i - 1]) },
        ]
    });
    out.table("filter.csv", &["t", "s", "pi", "R", "innovation"], rows)?;
    Ok(json!({ "prices": a.prices.display().to_string(), "nodes": t.len() }))
}
