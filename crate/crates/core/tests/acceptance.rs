//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::time::Instant;

use infoval_core::allocation::{
    expected_utility_full_unconditional, expected_utility_partial_unconditional, StrategySpec,
};
use infoval_core::density::{invert_to_density, stochastic_dominance_check, InversionConfig, ReturnConvention};
use infoval_core::mc::{perturbation_test, simulate_scenarios, InitialState, SimConfig};
use infoval_core::mgf::{Conditioning, MgfSystem};
use infoval_core::riccati::{
    locate_blow_up, solve_partial_riccati, steady_state_variance, via_q_relation, RiccatiSolution, Solved,
};
use infoval_core::voi::{compute_info_value, solve_partial_at_zero, value_of_dynamic_information, value_of_initial_information};
use infoval_core::{classify, InfoKind, MarketParams};
use num_complex::Complex64;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn table1(rho: f64) -> MarketParams {
    MarketParams::table1(rho)
}

fn with(rho: f64, edit: impl FnOnce(&mut infoval_core::RawParams)) -> MarketParams {
    table1(rho).with(edit).expect("valid parameters")
}

fn solved(p: &MarketParams) -> Solved {
    Solved::new(p).expect("solvable parameters")
}

fn regime_constants() -> Outcome {
    let rho_star = classify(&table1(0.0)).rho_star;
    let g0 = classify(&table1(0.0)).gamma_star.unwrap_or(f64::NAN);
    let g8 = classify(&table1(0.8)).gamma_star.unwrap_or(f64::NAN);
    let ok = (rho_star + 0.4934).abs() <= 1e-4 && (g0 - 0.4933).abs() <= 1e-4 && (g8 - 0.7185).abs() <= 1e-4;
    (ok, format!("rho* = {rho_star:.6}, gamma*(0) = {g0:.6}, gamma*(0.8) = {g8:.6}"))
}

fn critical_time() -> Outcome {
    let p = with(0.0, |r| r.gamma = 0.4);
    let rep = classify(&p);
    let Some(t_star) = rep.t_star else {
        return (false, format!("no critical time, regime {:?}", rep.regime));
    };
    let Some(numeric) = locate_blow_up(&rep, 2.0 * t_star) else {
        return (false, format!("T* = {t_star:.4} but no numerical blow-up found"));
    };
    let ok = (t_star - 19.73).abs() < 0.005 && (numeric - t_star).abs() <= 1e-3;
    (ok, format!("T* = {t_star:.5}, numerical blow-up at {numeric:.5}"))
}

fn filter_steady_states() -> Outcome {
    let cases = [(0.0, 0.0769), (-0.9, 0.0632), (0.9, 0.0092)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (rho, want) in cases {
        let got = steady_state_variance(&table1(rho));
        ok &= (got - want).abs() <= 5e-4;
        detail.push(format!("rho {rho}: {got:.5}"));
    }
    (ok, detail.join(", "))
}

fn max_rel(a: &RiccatiSolution, b: &RiccatiSolution) -> f64 {
    let mut worst = 0.0f64;
    for (x, y) in [(a.a_vals(), b.a_vals()), (a.b_vals(), b.b_vals()), (a.c_vals(), b.c_vals())] {
        for (u, v) in x.iter().zip(y) {
            let scale = u.abs().max(v.abs());
            if scale > 0.0 {
                worst = worst.max((u - v).abs() / scale);
            }
        }
    }
    worst
}

fn q_relation() -> Outcome {
    let mut worst = 0.0f64;
    for rho in [-0.9, 0.0, 0.9] {
        for gamma in [2.0, 5.0, 10.0] {
            for r0 in [0.09, 0.5] {
                let p = with(rho, |r| {
                    r.gamma = gamma;
                    r.r0 = r0;
                });
                let s = solved(&p);
                let direct = solve_partial_riccati(&p, &s.fv, s.full.grid()).expect("partial solve");
                let (bridged, _) = via_q_relation(&s.full, &s.fv, &p).expect("Q relation");
                worst = worst.max(max_rel(&direct, &bridged));
            }
        }
    }
    (worst <= 1e-6, format!("max pointwise relative difference {worst:.3e} over 18 cases"))
}

fn mgf_identities() -> Outcome {
    let mut worst = 0.0f64;
    for rho in [-0.9, 0.0, 0.9] {
        let s = solved(&table1(rho));
        let z = Complex64::new(1.0 - s.params.gamma, 0.0);
        for (kind, sol) in [(InfoKind::FullInfo, &s.full), (InfoKind::PartialInfo, &s.partial)] {
            let co = MgfSystem::new(&s, kind, s.params.horizon).and_then(|m| m.solve(z)).expect("mgf solve");
            for (i, v) in co.vals.iter().enumerate() {
                let want = [sol.a_vals()[i], sol.b_vals()[i], sol.c_vals()[i]];
                for k in 0..3 {
                    worst = worst.max((v[k] - want[k]).norm());
                }
            }
        }
    }
    (worst <= 1e-8, format!("max |(D, E, H) - (A, B, C)| = {worst:.3e}"))
}

fn certainty_equivalents() -> Outcome {
    let cases = [(-0.9, 32.11), (0.0, 26.11), (0.9, 26.58)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (rho, want) in cases {
        let at_zero = compute_info_value(&solved(&with(rho, |r| r.r0 = 0.0))).expect("report");
        let at_table = compute_info_value(&solved(&table1(rho))).expect("report");
        let got = 100.0 * (at_zero.ce_partial - 1.0);
        ok &= (got - want).abs() <= 0.05;
        detail.push(format!(
            "rho {rho}: {got:.2}% (paper {want}%, at R0 = 0.09: {:.2}%)",
            100.0 * (at_table.ce_partial - 1.0)
        ));
    }
    (ok, detail.join("; "))
}

fn bisect(w: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0, w * (1.0 - 1e-15));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Prior average of `exp(g(x))` by composite Simpson on +-12 standard deviations.
fn prior_average(mean: f64, var: f64, g: impl Fn(f64) -> f64) -> f64 {
    let n = 8000;
    let sd = var.sqrt();
    let h = 24.0 / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let z = -12.0 + h * i as f64;
        let wgt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += wgt * (g(mean + sd * z) - 0.5 * z * z).exp();
    }
    acc * h / 3.0 / (2.0 * std::f64::consts::PI).sqrt()
}

fn value_of_information() -> Outcome {
    let rhos = [-0.9, 0.0, 0.9];
    let r0s = [0.01, 0.09, 0.5, 1.0];
    let mut ok = true;
    let mut notes = Vec::new();

    for rho in rhos {
        let rep = compute_info_value(&solved(&with(rho, |r| r.r0 = 0.0))).expect("report");
        if rep.v_initial != 0.0 {
            ok = false;
            notes.push(format!("V^I = {} at R0 = 0, rho {rho}", rep.v_initial));
        }
    }

    let mut ratios = [[0.0; 4]; 3];
    let mut worst_root = 0.0f64;
    for (i, rho) in rhos.into_iter().enumerate() {
        for (j, r0) in r0s.into_iter().enumerate() {
            let s = solved(&with(rho, |r| r.r0 = r0));
            let p = &s.params;
            let rep = compute_info_value(&s).expect("report");
            if !(0.0 < rep.v_initial && rep.v_initial <= rep.v_dynamic && rep.v_dynamic < 1.0) {
                ok = false;
                notes.push(format!("ordering fails at rho {rho}, R0 {r0}"));
            }
            ratios[i][j] = rep.ratio();

            // Indifference equations solved numerically.
            let g = p.gamma;
            let lhs = expected_utility_partial_unconditional(&s).expect("utility");
            let at_zero = solve_partial_at_zero(&s).expect("partial at zero");
            let (_, b0, c0) = s.full.initial();
            let informed = prior_average(p.pi0, p.r0, |x| g * (at_zero.initial().0 + b0 * x + 0.5 * c0 * x * x));
            let dw_i = bisect(p.w, |dw| lhs - (p.w - dw).powf(1.0 - g) / (1.0 - g) * informed);
            let full_u = expected_utility_full_unconditional(&s).expect("utility");
            let dw_d = bisect(p.w, |dw| lhs - full_u * ((p.w - dw) / p.w).powf(1.0 - g));
            let vi = value_of_initial_information(p, &s.full, &s.partial, &at_zero).expect("V^I").value;
            let vd = value_of_dynamic_information(p, &s.full, &s.partial).expect("V^D").value;
            worst_root = worst_root.max((vi - dw_i / p.w).abs() / vi).max((vd - dw_d / p.w).abs() / vd);
        }
    }
    for (i, row) in ratios.iter().enumerate() {
        if !row.windows(2).all(|w| w[1] < w[0]) {
            ok = false;
            notes.push(format!("ratio not decreasing in R0 at rho {}", rhos[i]));
        }
    }
    for j in 0..4 {
        if !(ratios[1][j] > ratios[0][j] && ratios[1][j] > ratios[2][j]) {
            ok = false;
            notes.push(format!("ratio not largest at rho 0 for R0 {}", r0s[j]));
        }
    }
    ok &= worst_root <= 1e-9;
    notes.push(format!(
        "ratio at R0 = 0.09: {:.3} / {:.3} / {:.3}; root-finding max rel diff {worst_root:.2e}",
        ratios[0][1], ratios[1][1], ratios[2][1]
    ));
    (ok, notes.join("; "))
}

fn oracle_equivalence() -> Outcome {
    let s = solved(&table1(-0.9));
    let p = &s.params;
    let cfg = SimConfig::default();
    let sc = simulate_scenarios(&s, &cfg, &[]).expect("simulation");
    let mut ok = true;
    let mut notes = Vec::new();

    let budget = sc.estimate(|i| sc.xi_star[i] * sc.wealth_full[i]);
    let a = budget.covers(p.w, 3.0);
    notes.push(format!("(a) E[xi W] = {:.5} +- {:.5}", budget.mean, budget.std_error));

    let mut b = true;
    for (kind, want, wealth) in [
        ("full", expected_utility_full_unconditional(&s).expect("utility"), &sc.wealth_full),
        ("partial", expected_utility_partial_unconditional(&s).expect("utility"), &sc.wealth_partial),
    ] {
        let est = sc.estimate(|i| p.utility(wealth[i]));
        b &= est.covers(want, 3.0);
        notes.push(format!("(b) {kind} {:.3}se", (est.mean - want) / est.std_error));
    }

    let mut c = true;
    for (kind, wealth) in [(InfoKind::FullInfo, &sc.wealth_full), (InfoKind::PartialInfo, &sc.wealth_partial)] {
        let sys = MgfSystem::new(&s, kind, p.horizon).expect("mgf");
        for z in [0.5, 1.0, 2.0] {
            let want = sys.moment(Complex64::new(z, 0.0), Conditioning::Unconditional).expect("moment").re;
            let est = sc.estimate(|i| wealth[i].powf(z));
            c &= est.covers(want, 3.0);
            if !est.covers(want, 3.0) {
                notes.push(format!("(c) {kind:?} z {z}: {:.3}se", (est.mean - want) / est.std_error));
            }
        }
    }
    if c {
        notes.push("(c) six moments within 3 se".into());
    }

    let eps: Vec<f64> = (-4..=4).map(|k| 0.05 * k as f64).collect();
    let mut d = true;
    for base in [StrategySpec::full(), StrategySpec::partial()] {
        let pt = perturbation_test(&s, &cfg, base, &eps).expect("perturbation");
        d &= pt.argmax_scale.abs() < 1e-12 && pt.argmax_shift.abs() < 1e-12;
        notes.push(format!("(d) {:?} argmax {:+.2} / {:+.2}", base.kind, pt.argmax_scale, pt.argmax_shift));
    }
    ok &= a && b && c && d;
    (ok, notes.join("; "))
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn ks(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn full_cfg() -> InversionConfig {
    InversionConfig {
        u_max: 1000.0,
        ..InversionConfig::default()
    }
}

fn density_quality() -> Outcome {
    let sf = solved(&with(-0.9, |r| r.gamma = 4.03));
    let sp = solved(&with(-0.9, |r| r.gamma = 2.08));
    let cond = Conditioning::Unconditional;
    let df = invert_to_density(&sf, InfoKind::FullInfo, cond, &full_cfg()).expect("full density");
    let dp = invert_to_density(&sp, InfoKind::PartialInfo, cond, &InversionConfig::wide()).expect("partial density");
    let cfg = SimConfig::default();
    let mf = simulate_scenarios(&sf, &cfg, &[]).expect("simulation");
    let mp = simulate_scenarios(&sp, &cfg, &[]).expect("simulation");
    let ks_f = ks(&sorted(&mf.wealth_full), |w| df.cdf_at(w));
    let ks_p = ks(&sorted(&mp.wealth_partial), |w| dp.cdf_at(w));
    let conv = ReturnConvention::Simple;
    let (ret_f, _) = conv.annualize(df.mean, df.variance, 5.0);
    let (ret_p, _) = conv.annualize(dp.mean, dp.variance, 5.0);
    let ok = (df.raw_mass - 1.0).abs() <= 1e-4
        && (dp.raw_mass - 1.0).abs() <= 1e-4
        && ks_f <= 0.01
        && ks_p <= 0.01
        && (ret_f - ret_p).abs() <= 0.005
        && df.skewness > dp.skewness;
    (
        ok,
        format!(
            "mass {:.2e} / {:.2e}, KS {ks_f:.4} / {ks_p:.4}, returns {:.2}% / {:.2}%, skewness {:.3} / {:.3}",
            df.raw_mass - 1.0,
            dp.raw_mass - 1.0,
            100.0 * ret_f,
            100.0 * ret_p,
            df.skewness,
            dp.skewness
        ),
    )
}

fn dominance() -> Outcome {
    let p = table1(-0.9);
    let s = solved(&p);
    let cond = Conditioning::Unconditional;
    let df = invert_to_density(&s, InfoKind::FullInfo, cond, &full_cfg()).expect("full density");
    let dp = invert_to_density(&s, InfoKind::PartialInfo, cond, &InversionConfig::wide()).expect("partial density");
    let vd = compute_info_value(&s).expect("report").v_dynamic;
    let topped = solved(&p.with(|r| r.w *= 1.0 + vd).expect("valid"));
    let dt = invert_to_density(&topped, InfoKind::PartialInfo, cond, &InversionConfig::wide()).expect("density");
    let plain = stochastic_dominance_check(&df, &dp);
    let up_fp = stochastic_dominance_check(&df, &dt);
    let up_pf = stochastic_dominance_check(&dt, &df);
    let ok = plain.dominates && !up_fp.dominates && !up_pf.dominates;
    (
        ok,
        format!(
            "full over partial: max violation {:.2e} at w = {:.3}; topped up: violations {:.3} and {:.3}",
            plain.max_violation, plain.at, up_fp.max_violation, up_pf.max_violation
        ),
    )
}

fn filter_consistency() -> Outcome {
    let s = solved(&table1(-0.9));
    let times = [1.25, 2.5, 5.0];
    // Antithetic pairs would make the pair means of the linear error exact.
    let cfg = SimConfig {
        antithetic: false,
        x0: InitialState::Prior,
        checkpoints: times.to_vec(),
        ..SimConfig::default()
    };
    let sc = simulate_scenarios(&s, &cfg, &[]).expect("simulation");
    let mut ok = true;
    let mut notes = Vec::new();
    for c in &sc.checkpoints {
        let err = sc.estimate(|i| c.x[i] - c.pi[i]);
        let r = s.fv.r(c.t);
        let rel = err.variance / r - 1.0;
        ok &= err.covers(0.0, 3.0) && rel.abs() <= 0.05;
        notes.push(format!("t {}: mean {:.2}se, var/R - 1 = {rel:+.4}", c.t, err.mean / err.std_error));
    }
    (ok, notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("regime constants", regime_constants),
        ("critical time", critical_time),
        ("filter steady states", filter_steady_states),
        ("Q relation", q_relation),
        ("MGF boundary identities", mgf_identities),
        ("certainty equivalents at R0 = 0", certainty_equivalents),
        ("value of information", value_of_information),
        ("Monte Carlo oracle equivalence", oracle_equivalence),
        ("density quality", density_quality),
        ("dominance structure", dominance),
        ("filter consistency", filter_consistency),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {}: {name} ({:.1}s): {detail}",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
