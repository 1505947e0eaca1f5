use infoval_core::allocation::StrategySpec;
use infoval_core::density::{frontier, ReturnConvention};
use infoval_core::mc::{simulate_scenarios, SimConfig};
use infoval_core::mgf::{Conditioning, MgfSystem};
use infoval_core::riccati::Solved;
use infoval_core::voi::{compute_info_value, voi_sweep, SweepAxis};
use infoval_core::{InfoKind, MarketParams};
use num_complex::Complex64;

fn solved(p: &MarketParams) -> Solved {
    Solved::new(p).unwrap()
}

#[test]
fn log_utility_myopic_beats_constants() {
    let p = MarketParams::table1(-0.9).with(|r| r.gamma = 1.0).unwrap();
    let s = solved(&p);
    let mut specs = vec![StrategySpec::full()];
    let constants = [0.5, 1.5, 2.5, 3.5];
    specs.extend(constants.iter().map(|&c| StrategySpec::constant(c)));
    let cfg = SimConfig {
        n_paths: 20_000,
        ..SimConfig::default()
    };
    let sc = simulate_scenarios(&s, &cfg, &specs).unwrap();
    for j in 1..specs.len() {
        let diff = sc.estimate(|i| sc.wealth[0][i].ln() - sc.wealth[j][i].ln());
        assert!(diff.mean > 0.0, "theta = {}: {diff:?}", constants[j - 1]);
    }
}

#[test]
fn hedging_demand_beats_myopic() {
    let s = solved(&MarketParams::table1(-0.9));
    let cfg = SimConfig {
        n_paths: 20_000,
        ..SimConfig::default()
    };
    let sc = simulate_scenarios(&s, &cfg, &[StrategySpec::full(), StrategySpec::myopic()]).unwrap();
    let u = |w: f64| s.params.utility(w);
    let diff = sc.estimate(|i| u(sc.wealth[0][i]) - u(sc.wealth[1][i]));
    assert!(diff.mean > 3.0 * diff.std_error, "{diff:?}");
}

#[test]
fn closed_form_gap_shrinks_with_step() {
    let s = solved(&MarketParams::table1(0.0));
    let gap = |n_steps| {
        let cfg = SimConfig {
            n_paths: 200,
            n_steps,
            track_gap: true,
            ..SimConfig::default()
        };
        let sc = simulate_scenarios(&s, &cfg, &[StrategySpec::full(), StrategySpec::partial()]).unwrap();
        (sc.max_gap[0].unwrap(), sc.max_gap[1].unwrap())
    };
    let (f1, p1) = gap(250);
    let (f2, p2) = gap(1000);
    // O(sqrt(dt)): quartering the step should roughly halve the gap.
    assert!(f2 < 0.7 * f1, "{f1} -> {f2}");
    assert!(p2 < 0.7 * p1, "{p1} -> {p2}");
}

#[test]
fn frontier_variance_matches_simulation() {
    let p = MarketParams::table1(-0.9);
    let s = solved(&p);
    let sc = simulate_scenarios(&s, &SimConfig::default(), &[]).unwrap();
    for (kind, wealth) in [(InfoKind::FullInfo, &sc.wealth_full), (InfoKind::PartialInfo, &sc.wealth_partial)] {
        let sys = MgfSystem::new(&s, kind, p.horizon).unwrap();
        let m = |z: f64| sys.moment(Complex64::new(z, 0.0), Conditioning::Unconditional).unwrap().re;
        let var = m(2.0) - m(1.0) * m(1.0);
        let mean = sc.estimate(|i| wealth[i]).mean;
        let est = sc.estimate(|i| (wealth[i] - mean).powi(2));
        assert!(est.covers(var, 3.0), "{kind:?}: {est:?} vs {var}");
    }
}

#[test]
fn partial_frontier_lies_above_full() {
    let p = MarketParams::table1(-0.9);
    let gammas: Vec<f64> = (0..30).map(|k| 1.5 + 0.5 * k as f64).collect();
    let conv = ReturnConvention::Simple;
    let full = frontier(&p, &gammas, InfoKind::FullInfo, Conditioning::Unconditional, conv);
    let part = frontier(&p, &gammas, InfoKind::PartialInfo, Conditioning::Unconditional, conv);
    assert!(full.skipped.is_empty() && part.skipped.is_empty());
    // Full-info curve interpolated at each partial-info standard deviation.
    let mut pts: Vec<(f64, f64)> = full.points.iter().map(|q| (q.std_return, q.mean_return)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut compared = 0;
    for q in &part.points {
        let Some(i) = pts.windows(2).position(|w| w[0].0 <= q.std_return && q.std_return <= w[1].0) else {
            continue;
        };
        let (a, b) = (pts[i], pts[i + 1]);
        let on_full = a.1 + (b.1 - a.1) * (q.std_return - a.0) / (b.0 - a.0);
        assert!(q.mean_return > on_full, "sd {}: {} vs {}", q.std_return, q.mean_return, on_full);
        compared += 1;
    }
    assert!(compared > 10);
}

#[test]
fn initial_value_grows_with_prior_variance() {
    let grid: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
    let mut at_r0 = Vec::new();
    for rho in [-0.9, 0.0, 0.9] {
        let pts = voi_sweep(&MarketParams::table1(rho), SweepAxis::R0, &grid);
        let vi: Vec<f64> = pts.iter().map(|p| p.report.as_ref().unwrap().v_initial).collect();
        assert!(vi.windows(2).all(|w| w[1] > w[0]), "rho {rho}");
        at_r0.push(vi);
    }
    for j in 0..grid.len() {
        assert!(at_r0[0][j] > at_r0[1][j] && at_r0[0][j] > at_r0[2][j], "R0 {}", grid[j]);
    }
}

#[test]
fn ratio_grows_with_horizon() {
    let grid: Vec<f64> = (1..=10).map(|k| k as f64).collect();
    let mut slopes = Vec::new();
    for rho in [-0.9, 0.0, 0.9] {
        let pts = voi_sweep(&MarketParams::table1(rho), SweepAxis::Horizon, &grid);
        let ratio: Vec<f64> = pts.iter().map(|p| p.report.as_ref().unwrap().ratio()).collect();
        assert!(ratio.windows(2).all(|w| w[1] > w[0]), "rho {rho}: {ratio:?}");
        slopes.push(ratio[9] - ratio[0]);
    }
    assert!(slopes[1] > slopes[0] && slopes[1] > slopes[2], "{slopes:?}");
}

#[test]
fn ratio_unbounded_as_prior_variance_vanishes() {
    let p = MarketParams::table1(0.0);
    let pts = voi_sweep(&p, SweepAxis::R0, &[1e-2, 1e-4, 1e-6]);
    let r: Vec<f64> = pts.iter().map(|p| p.report.as_ref().unwrap().ratio()).collect();
    assert!(r[1] > 10.0 * r[0] && r[2] > 10.0 * r[1], "{r:?}");
}

#[test]
fn certainty_equivalent_has_interior_minimum() {
    let grid: Vec<f64> = (0..=100).map(|k| 0.01 * k as f64).collect();
    let mut found = false;
    for rho in [-0.9, 0.0, 0.9] {
        let ce: Vec<f64> = voi_sweep(&MarketParams::table1(rho), SweepAxis::R0, &grid)
            .iter()
            .map(|p| p.report.as_ref().unwrap().ce_partial)
            .collect();
        let k = (0..ce.len()).min_by(|&a, &b| ce[a].total_cmp(&ce[b])).unwrap();
        found |= grid[k] > 0.1 && grid[k] < 1.0;
    }
    assert!(found);
}

#[test]
fn budget_constraint_partial() {
    let s = solved(&MarketParams::table1(0.0));
    let sc = simulate_scenarios(&s, &SimConfig::default(), &[]).unwrap();
    let est = sc.estimate(|i| sc.xi_tilde[i] * sc.wealth_partial[i]);
    assert!(est.covers(s.params.w, 3.0), "{est:?}");
    let rep = compute_info_value(&s).unwrap();
    assert!(rep.ce_full > rep.ce_partial);
}
