//! Data behind figures 1 to 8.
//!
//! | file | columns | content |
//! |------|---------|---------|
//! | fig1.csv | rho, gamma, nu0, status | penalty at t = 0, X_0 = pi0, for rho in {0.8, 0, -0.8} |
//! | fig2.csv | rho, gamma, t_star, t_double_star | critical time and largest admissible horizon, rho in {0, 0.8} |
//! | fig3.csv | info, gamma, w, pdf, cdf | wealth densities, full info at gamma 4.03, partial at 2.08 |
//! | fig4.csv | info, gamma, mean_return, std_return, status | mean-standard deviation frontiers |
//! | fig5.csv | w, cdf_full, cdf_partial, cdf_partial_topped | cdfs, the last with w raised by the dynamic reservation price |
//! | fig6.csv | rho, R0, ce_partial, v_initial, status | certainty equivalent and value of initial information |
//! | fig7.csv | rho, R0, ratio, status | V^D / V^I against R0 |
//! | fig8.csv | rho, T, ratio, status | V^D / V^I against the horizon at R0 = 0.09 |
//!
//! Figures 3 to 5 use `--rho-density`; an empty cell marks an undefined value.

use infoval_core::allocation::penalty;
use infoval_core::density::{invert_to_density, InversionConfig, ReturnConvention};
use infoval_core::mgf::Conditioning;
use infoval_core::riccati::{maximal_admissible_horizon, solve_full, Solved};
use infoval_core::voi::{compute_info_value, voi_sweep, SweepAxis};
use infoval_core::{classify, InfoKind, MarketParams};
use serde_json::json;

use crate::commands::{density_rows, error_kind, frontier_rows};
use crate::config::parse_grid;
use crate::error::CliError;
use crate::output::{num, opt, Output};
use crate::FiguresArgs;

const FIG1_RHO: [f64; 3] = [0.8, 0.0, -0.8];
const FIG1_GAMMA: &str = "0.1:10:100";
const FIG2_RHO: [f64; 2] = [0.0, 0.8];
const FIG2_GAMMA: &str = "0.05:1:96";
const GAMMA_FULL: f64 = 4.03;
const GAMMA_PARTIAL: f64 = 2.08;
const FRONTIER_GAMMA: &str = "1.5:20:38";
const VOI_RHO: [f64; 3] = [-0.9, 0.0, 0.9];
const FIG6_R0: &str = "0:1:51";
const FIG7_R0: &str = "0.01:1:100";
const FIG8_T: &str = "0.5:20:40";
const FIG8_R0: f64 = 0.09;

fn full_inversion() -> InversionConfig {
    InversionConfig {
        u_max: 1000.0,
        ..InversionConfig::default()
    }
}

fn inversion(kind: InfoKind) -> InversionConfig {
    match kind {
        InfoKind::FullInfo => full_inversion(),
        InfoKind::PartialInfo => InversionConfig::wide(),
    }
}

pub fn run(p: &MarketParams, a: &FiguresArgs, out: &mut Output) -> Result<serde_json::Value, CliError> {
    let grid = |spec: &str| parse_grid(spec).expect("built-in grid");
    let cond = Conditioning::Unconditional;

    let mut rows = Vec::new();
    for rho in FIG1_RHO {
        for g in grid(FIG1_GAMMA) {
            let q = p.with(|r| {
                r.rho = rho;
                r.gamma = g;
            })?;
            let cell = match solve_full(&q) {
                Ok(full) => vec![num(penalty(0.0, q.pi0, &full, &q)), "ok".into()],
                Err(e) => vec![String::new(), error_kind(&e).into()],
            };
            let mut row = vec![num(rho), num(g)];
            row.extend(cell);
            rows.push(row);
        }
    }
    out.table("fig1.csv", &["rho", "gamma", "nu0", "status"], rows)?;

    let mut rows = Vec::new();
    for rho in FIG2_RHO {
        for g in grid(FIG2_GAMMA) {
            let q = p.with(|r| {
                r.rho = rho;
                r.gamma = g;
            })?;
            rows.push(vec![num(rho), num(g), opt(classify(&q).t_star), opt(maximal_admissible_horizon(&q))]);
        }
    }
    out.table("fig2.csv", &["rho", "gamma", "t_star", "t_double_star"], rows)?;

    let base = p.with(|r| r.rho = a.rho_density)?;
    let mut rows = Vec::new();
    for (kind, g) in [(InfoKind::FullInfo, GAMMA_FULL), (InfoKind::PartialInfo, GAMMA_PARTIAL)] {
        let s = Solved::new(&base.with(|r| r.gamma = g)?)?;
        let d = invert_to_density(&s, kind, cond, &inversion(kind))?;
        rows.extend(density_rows(&d).map(|mut r| {
            r.insert(1, num(g));
            r
        }));
    }
    out.table("fig3.csv", &["info", "gamma", "w", "pdf", "cdf"], rows)?;

    let mut gammas = grid(FRONTIER_GAMMA);
    gammas.extend([GAMMA_PARTIAL, GAMMA_FULL]);
    gammas.sort_by(f64::total_cmp);
    let rows = frontier_rows(
        &base,
        &gammas,
        &[InfoKind::FullInfo, InfoKind::PartialInfo],
        cond,
        ReturnConvention::default(),
    );
    out.table("fig4.csv", &["info", "gamma", "mean_return", "std_return", "status"], rows)?;

    let s = Solved::new(&base)?;
    let delta_w = compute_info_value(&s)?.delta_w_dynamic;
    let topped = Solved::new(&base.with(|r| r.w += delta_w)?)?;
    let dists = [
        invert_to_density(&s, InfoKind::FullInfo, cond, &full_inversion())?,
        invert_to_density(&s, InfoKind::PartialInfo, cond, &InversionConfig::wide())?,
        invert_to_density(&topped, InfoKind::PartialInfo, cond, &InversionConfig::wide())?,
    ];
    let lo = dists.iter().map(|d| d.w_grid[0]).fold(f64::INFINITY, f64::min);
    let hi = dists.iter().map(|d| d.w_grid[d.w_grid.len() - 1]).fold(0.0, f64::max);
    let n = full_inversion().n_w;
    let rows = (0..n).map(|i| {
        let w = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let mut row = vec![num(w)];
        row.extend(dists.iter().map(|d| num(d.cdf_at(w))));
        row
    });
    out.table("fig5.csv", &["w", "cdf_full", "cdf_partial", "cdf_partial_topped"], rows)?;

    let sweep = |axis: SweepAxis, spec: &str, base_edit: &dyn Fn(&mut infoval_core::RawParams)| {
        let mut rows = Vec::new();
        for rho in VOI_RHO {
            let q = p.with(|r| {
                base_edit(r);
                r.rho = rho;
            })?;
            for pt in voi_sweep(&q, axis, &grid(spec)) {
                let mut row = vec![num(rho), num(pt.value)];
                match &pt.report {
                    Ok(r) => row.extend([num(r.ce_partial), num(r.v_initial), num(r.ratio()), "ok".into()]),
                    Err(e) => row.extend([String::new(), String::new(), String::new(), error_kind(e).into()]),
                }
                rows.push(row);
            }
        }
        Ok::<_, CliError>(rows)
    };
    let pick = |rows: Vec<Vec<String>>, cols: &[usize]| -> Vec<Vec<String>> {
        rows.into_iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect()
    };
    let r0_rows = sweep(SweepAxis::R0, FIG6_R0, &|_| {})?;
    out.table("fig6.csv", &["rho", "R0", "ce_partial", "v_initial", "status"], pick(r0_rows, &[0, 1, 2, 3, 5]))?;
    let r0_rows = sweep(SweepAxis::R0, FIG7_R0, &|_| {})?;
    out.table("fig7.csv", &["rho", "R0", "ratio", "status"], pick(r0_rows, &[0, 1, 4, 5]))?;
    let t_rows = sweep(SweepAxis::Horizon, FIG8_T, &|r| r.r0 = FIG8_R0)?;
    out.table("fig8.csv", &["rho", "T", "ratio", "status"], pick(t_rows, &[0, 1, 4, 5]))?;

    Ok(json!({
        "rho_density": a.rho_density,
        "gamma_full": GAMMA_FULL,
        "gamma_partial": GAMMA_PARTIAL,
        "delta_w_dynamic": delta_w,
        "return_convention": ReturnConvention::default().as_str(),
        "grids": {
            "fig1_gamma": FIG1_GAMMA, "fig2_gamma": FIG2_GAMMA, "fig4_gamma": FRONTIER_GAMMA,
            "fig6_r0": FIG6_R0, "fig7_r0": FIG7_R0, "fig8_t": FIG8_T, "fig8_r0": FIG8_R0,
        },
    }))
}
