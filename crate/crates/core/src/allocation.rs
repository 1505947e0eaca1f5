//! Optimal strategies, multipliers, optimal wealth and expected utility in
//! closed form.

use num_complex::Complex64;
use num_traits::Float;

use crate::model::MarketParams;
use crate::riccati::{Admissibility, FilterVariance, RiccatiSolution, Solved};
use crate::{Error, InfoKind, Result};

/// Which rule sets the stock weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyKind {
    /// Optimal weight given the market price of risk.
    FullInfo,
    /// Optimal weight given the filter only.
    PartialInfo,
    /// `X / (gamma sigma)`: the full-information demand without hedging.
    Myopic,
    /// Fixed weight.
    Constant(f64),
}

/// A weight rule with an optional tilt: `theta (1 + scale) + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    pub scale: f64,
    pub shift: f64,
}

impl StrategySpec {
    pub fn new(kind: StrategyKind) -> Self {
        StrategySpec {
            kind,
            scale: 0.0,
            shift: 0.0,
        }
    }

    pub fn full() -> Self {
        Self::new(StrategyKind::FullInfo)
    }

    pub fn partial() -> Self {
        Self::new(StrategyKind::PartialInfo)
    }

    pub fn myopic() -> Self {
        Self::new(StrategyKind::Myopic)
    }

    pub fn constant(theta: f64) -> Self {
        Self::new(StrategyKind::Constant(theta))
    }

    pub fn scaled(self, eps: f64) -> Self {
        StrategySpec { scale: eps, ..self }
    }

    pub fn shifted(self, eps: f64) -> Self {
        StrategySpec { shift: eps, ..self }
    }

    pub fn is_untilted(&self) -> bool {
        self.scale == 0.0 && self.shift == 0.0
    }

    /// Weight at time `t` with market price of risk `x` and filter `pi`.
    pub fn weight(&self, solved: &Solved, t: f64, x: f64, pi: f64) -> f64 {
        let p = &solved.params;
        let base = match self.kind {
            StrategyKind::FullInfo => strategy_full(t, x, &solved.full, p),
            StrategyKind::PartialInfo => strategy_partial(t, pi, &solved.partial, &solved.fv, p),
            StrategyKind::Myopic => myopic(x, p),
            StrategyKind::Constant(theta) => theta,
        };
        base * (1.0 + self.scale) + self.shift
    }
}

/// Penalty process `nu* = -gamma (B(t) + C(t) x) sigma_x`.
pub fn penalty(t: f64, x: f64, full: &RiccatiSolution, params: &MarketParams) -> f64 {
    if params.is_log_utility() {
        return 0.0;
    }
    let (_, b, c) = full.at(t);
    -params.gamma * (b + c * x) * params.sigma_x
}

/// Full-information weight in the stock: myopic demand plus hedging demand.
pub fn strategy_full(t: f64, x: f64, full: &RiccatiSolution, params: &MarketParams) -> f64 {
    let (_, b, c) = full.at(t);
    myopic(x, params) + params.rho * params.sigma_x / params.sigma * (b + c * x)
}

/// Partial-information weight; the filter gain `R(t) + rho sigma_x` replaces
/// `rho sigma_x`.
pub fn strategy_partial(
    t: f64,
    pi: f64,
    partial: &RiccatiSolution,
    fv: &FilterVariance,
    params: &MarketParams,
) -> f64 {
    let (_, b, c) = partial.at(t);
    myopic(pi, params) + fv.gain(t) / params.sigma * (b + c * pi)
}

/// `x / (gamma sigma)`.
pub fn myopic(x: f64, params: &MarketParams) -> f64 {
    x / (params.gamma * params.sigma)
}

/// `(lambda_0, lambda~_0)`: the full-information multiplier at the realized
/// `x0`, the partial-information one at the prior mean.
pub fn lagrange_multipliers(
    full: &RiccatiSolution,
    partial: &RiccatiSolution,
    params: &MarketParams,
    x0: f64,
) -> (f64, f64) {
    let g = params.gamma;
    let l = (full.exponent(0.0, x0) - params.w.ln()) * g;
    let lt = (partial.exponent(0.0, params.pi0) - params.w.ln()) * g;
    (l.exp(), lt.exp())
}

/// Closed-form optimal wealth for one realization of `X_0`.
#[derive(Debug, Clone, Copy)]
pub struct WealthFormula<'a> {
    pub solved: &'a Solved,
    pub x0: f64,
    pub lambda0: f64,
    pub lambda0_tilde: f64,
    pub admissibility: Admissibility,
}

impl<'a> WealthFormula<'a> {
    pub fn new(solved: &'a Solved, x0: f64) -> Self {
        let (lambda0, lambda0_tilde) =
            lagrange_multipliers(&solved.full, &solved.partial, &solved.params, x0);
        WealthFormula {
            solved,
            x0,
            lambda0,
            lambda0_tilde,
            admissibility: solved.admissibility(),
        }
    }

    /// Errors with `NotVerified` when the sufficient condition fails.
    pub fn verified(&self, info: InfoKind) -> Result<()> {
        let cond = self.admissibility.condition(info);
        if cond.holds {
            Ok(())
        } else {
            Err(Error::NotVerified { info, lhs: cond.lhs })
        }
    }

    fn params(&self) -> &MarketParams {
        &self.solved.params
    }
}

/// `W*_t = (lambda_0 xi*_t)^(-1/gamma) exp(A + B x + C x^2 / 2)`.
pub fn wealth_full(t: f64, xi_star: f64, x: f64, wf: &WealthFormula) -> Result<f64> {
    wf.verified(InfoKind::FullInfo)?;
    let g = wf.params().gamma;
    Ok(((wf.solved.full.exponent(t, x) * g - (wf.lambda0 * xi_star).ln()) / g).exp())
}

/// Partial-information analogue of [`wealth_full`] in the filtered state.
pub fn wealth_partial(t: f64, xi_tilde: f64, pi: f64, wf: &WealthFormula) -> Result<f64> {
    wf.verified(InfoKind::PartialInfo)?;
    let g = wf.params().gamma;
    Ok(((wf.solved.partial.exponent(t, pi) * g - (wf.lambda0_tilde * xi_tilde).ln()) / g).exp())
}

fn conditional_utility(gamma: f64, lambda_xi: f64, exponent: f64) -> Result<f64> {
    if gamma == 1.0 {
        return Err(Error::LogUtility);
    }
    Ok(((1.0 - 1.0 / gamma) * lambda_xi.ln() + exponent).exp() / (1.0 - gamma))
}

/// `E_t[u(W*_T)]` given `xi*_t` and `X_t = x`.
pub fn expected_utility_full(t: f64, xi_star: f64, x: f64, wf: &WealthFormula) -> Result<f64> {
    wf.verified(InfoKind::FullInfo)?;
    let p = wf.params();
    conditional_utility(p.gamma, wf.lambda0 * xi_star, wf.solved.full.exponent(t, x))
}

/// `E_t[u(W~*_T)]` given `xi~_t` and `pi_t`.
pub fn expected_utility_partial(t: f64, xi_tilde: f64, pi: f64, wf: &WealthFormula) -> Result<f64> {
    wf.verified(InfoKind::PartialInfo)?;
    let p = wf.params();
    conditional_utility(p.gamma, wf.lambda0_tilde * xi_tilde, wf.solved.partial.exponent(t, pi))
}

/// Expected utility at time 0 with `X_0 ~ N(pi0, R0)` integrated out.
pub fn expected_utility_full_unconditional(solved: &Solved) -> Result<f64> {
    let p = &solved.params;
    if p.is_log_utility() {
        return Err(Error::LogUtility);
    }
    if !solved.admissibility().full.holds {
        return Err(Error::NotVerified {
            info: InfoKind::FullInfo,
            lhs: solved.admissibility().full.lhs,
        });
    }
    let g = p.gamma;
    let (a0, b0, c0) = solved.full.initial();
    let q0 = 1.0 - g * c0 * p.r0;
    if !(q0 > 0.0) {
        return Err(Error::QNonPositive { time: 0.0, value: q0 });
    }
    let m = gaussian_quad_expectation(g * a0, g * b0, g * c0, p.pi0, p.r0)?;
    Ok(p.w.powf(1.0 - g) / (1.0 - g) * m)
}

/// Expected utility at time 0 of the partially informed investor; the initial
/// information is trivial, so no integration is needed.
pub fn expected_utility_partial_unconditional(solved: &Solved) -> Result<f64> {
    let wf = WealthFormula::new(solved, solved.params.pi0);
    expected_utility_partial(0.0, 1.0, solved.params.pi0, &wf)
}

/// `E[exp(a + b e + c e^2 / 2)]` for `e ~ N(mu, var)`.
pub fn gaussian_quad_expectation(a: f64, b: f64, c: f64, mu: f64, var: f64) -> Result<f64> {
    let d = 1.0 - c * var;
    if !(d > 0.0) {
        return Err(Error::DivergentExpectation { margin: d });
    }
    let ex = a + b * b * var / (2.0 * d) + b * mu / d + c * mu * mu / (2.0 * d);
    Ok(ex.exp() / d.sqrt())
}

/// Complex-coefficient version of [`gaussian_quad_expectation`], principal
/// branch of the square root. Needs `Re(1 - c var) > 0`.
pub fn gaussian_quad_expectation_complex(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    mu: f64,
    var: f64,
) -> Result<Complex64> {
    let d = Complex64::new(1.0, 0.0) - c * var;
    if !(d.re > 0.0) {
        return Err(Error::DivergentExpectation { margin: d.re });
    }
    let ex = a + b * b * var / (d * 2.0) + b * mu / d + c * mu * mu / (d * 2.0);
    Ok(ex.exp() / d.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::Solved;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn solved(rho: f64, edit: impl FnOnce(&mut crate::RawParams)) -> Solved {
        Solved::new(&MarketParams::table1(rho).with(edit).unwrap()).unwrap()
    }

    #[test]
    fn penalty_vanishes_at_horizon_and_for_log_utility() {
        let s = solved(0.0, |_| {});
        assert_eq!(penalty(5.0, 0.7, &s.full, &s.params), 0.0);
        let s = solved(0.0, |r| r.gamma = 1.0);
        assert_eq!(penalty(0.0, 0.7, &s.full, &s.params), 0.0);
    }

    #[test]
    fn penalty_shape_in_gamma() {
        let nu = |g: f64| {
            let s = solved(0.0, |r| r.gamma = g);
            penalty(0.0, s.params.pi0, &s.full, &s.params)
        };
        let small: Vec<f64> = [0.6, 0.8, 0.9].iter().map(|&g| nu(g).abs()).collect();
        assert!(small[0] > small[1] && small[1] > small[2]);
        assert_eq!(nu(1.0), 0.0);
        // Sign flips through log utility.
        assert!(nu(0.8) < 0.0 && nu(1.2) > 0.0);
        // Above one the size saturates: gamma C and gamma B have finite limits.
        let high: Vec<f64> = [1.5, 3.0, 10.0, 100.0, 1000.0].iter().map(|&g| nu(g)).collect();
        assert!(high.windows(2).all(|w| w[1] > w[0]), "{high:?}");
        assert!(high[4] - high[3] < 0.1 * (high[1] - high[0]));
    }

    #[test]
    fn strategy_boundaries() {
        let s = solved(-0.9, |_| {});
        let p = &s.params;
        assert_eq!(strategy_full(5.0, 0.3, &s.full, p), 0.3 / (5.0 * p.sigma));
        assert_eq!(strategy_partial(5.0, 0.3, &s.partial, &s.fv, p), 0.3 / (5.0 * p.sigma));
        let s0 = solved(0.0, |_| {});
        assert_eq!(strategy_full(1.0, 0.3, &s0.full, &s0.params), myopic(0.3, &s0.params));
        let log = solved(-0.9, |r| r.gamma = 1.0);
        assert_eq!(strategy_full(1.0, 0.3, &log.full, &log.params), 0.3 / p.sigma);
    }

    #[test]
    fn partial_strategy_decomposition() {
        let s = solved(0.4, |_| {});
        let p = &s.params;
        for (t, pi) in [(0.0, 0.1), (2.2, 0.5), (4.9, -0.3)] {
            let th = strategy_partial(t, pi, &s.partial, &s.fv, p);
            let (_, b, c) = s.partial.at(t);
            let hedge = s.fv.gain(t) / p.sigma * (b + c * pi);
            assert!((th - pi / (p.gamma * p.sigma) - hedge).abs() < 1e-15);
        }
    }

    #[test]
    fn multipliers_degenerate_cases() {
        let s = solved(0.0, |_| {});
        let (l0, _) = lagrange_multipliers(&s.full, &s.partial, &s.params, 0.0);
        assert!((l0 - (5.0 * s.full.a(0.0)).exp()).abs() < 1e-14 * l0);
        let s = solved(0.0, |r| r.w = 2.0);
        let wf = WealthFormula::new(&s, 0.25);
        assert!(wf.lambda0 > 0.0 && wf.lambda0_tilde > 0.0);
        // At the horizon A = B = C = 0, so the multiplier is w^-gamma.
        let w0 = wealth_full(5.0, 1.0, 0.25, &wf).unwrap();
        assert!((w0 - wf.lambda0.powf(-0.2)).abs() < 1e-14);
    }

    #[test]
    fn budget_identities() {
        let s = solved(-0.9, |r| r.w = 3.0);
        let wf = WealthFormula::new(&s, 0.61);
        assert!((wealth_full(0.0, 1.0, 0.61, &wf).unwrap() - 3.0).abs() < 1e-13);
        assert!((wealth_partial(0.0, 1.0, s.params.pi0, &wf).unwrap() - 3.0).abs() < 1e-13);
        let xi = 0.8;
        let wt = wealth_partial(5.0, xi, 0.9, &wf).unwrap();
        assert!((wt.powf(-5.0) - wf.lambda0_tilde * xi).abs() < 1e-12 * wt.powf(-5.0));
    }

    #[test]
    fn conditional_utility_at_horizon_is_utility() {
        let s = solved(0.0, |_| {});
        let wf = WealthFormula::new(&s, 0.4);
        let xi = 1.3;
        let w = wealth_full(5.0, xi, 0.2, &wf).unwrap();
        let eu = expected_utility_full(5.0, xi, 0.2, &wf).unwrap();
        assert!((eu - s.params.utility(w)).abs() < 1e-13 * eu.abs());
    }

    #[test]
    fn unconditional_matches_explicit_expression() {
        for rho in [-0.9, 0.0, 0.9] {
            let s = solved(rho, |_| {});
            let p = &s.params;
            let g = p.gamma;
            let (a0, b0, c0) = s.full.initial();
            let q0 = 1.0 - g * c0 * p.r0;
            let explicit = p.w.powf(1.0 - g) / ((1.0 - g) * q0.sqrt())
                * (g * a0 + g / (2.0 * q0) * (g * b0 * b0 * p.r0 + 2.0 * p.pi0 * b0 + c0 * p.pi0 * p.pi0)).exp();
            let got = expected_utility_full_unconditional(&s).unwrap();
            assert!((got - explicit).abs() < 1e-13 * explicit.abs());
        }
    }

    #[test]
    fn zero_prior_variance_unconditional_is_conditional() {
        let s = solved(0.0, |r| r.r0 = 0.0);
        let wf = WealthFormula::new(&s, s.params.pi0);
        let cond = expected_utility_full(0.0, 1.0, s.params.pi0, &wf).unwrap();
        let unc = expected_utility_full_unconditional(&s).unwrap();
        assert!((cond - unc).abs() < 1e-14 * cond.abs());
    }

    #[test]
    fn information_ordering() {
        for rho in [-0.9, 0.0, 0.9] {
            for r0 in [0.0, 0.09, 1.0] {
                let s = solved(rho, |r| r.r0 = r0);
                let full = expected_utility_full_unconditional(&s).unwrap();
                let part = expected_utility_partial_unconditional(&s).unwrap();
                assert!(part <= full, "rho {rho} r0 {r0}: {part} > {full}");
            }
        }
    }

    #[test]
    fn log_utility_refuses_power_formulas() {
        let s = solved(0.0, |r| r.gamma = 1.0);
        assert_eq!(expected_utility_full_unconditional(&s), Err(Error::LogUtility));
    }

    #[test]
    fn gaussian_special_cases() {
        let (a, b, mu, var) = (0.3, -0.7, 0.2, 0.4);
        let m = gaussian_quad_expectation(a, b, 0.0, mu, var).unwrap();
        assert!((m - (a + b * mu + 0.5 * b * b * var).exp()).abs() < 1e-14);
        let m = gaussian_quad_expectation(0.0, 0.0, 0.8, 0.0, 0.5).unwrap();
        assert!((m - 1.0 / (1.0 - 0.4f64).sqrt()).abs() < 1e-14);
        assert!(matches!(
            gaussian_quad_expectation(0.0, 0.0, 2.0, 0.0, 0.5),
            Err(Error::DivergentExpectation { .. })
        ));
    }

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
    }

    #[test]
    fn gaussian_against_quadrature() {
        let var: f64 = 0.5;
        let sd = var.sqrt();
        let dens = |e: f64| (-e * e / (2.0 * var)).exp() / (sd * (2.0 * core::f64::consts::PI).sqrt());
        let f = |e: f64| (e + 0.5 * e * e).exp() * dens(e);
        let quad = adaptive_simpson(&f, -30.0, 30.0, 1e-12);
        let closed = gaussian_quad_expectation(0.0, 1.0, 1.0, 0.0, var).unwrap();
        assert!((quad - closed).abs() <= 1e-10 * closed, "{quad} vs {closed}");
    }

    proptest! {
        #[test]
        fn complex_agrees_on_real_axis(
            a in -1.0f64..1.0, b in -2.0f64..2.0, c in -3.0f64..0.9, mu in -1.0f64..1.0, var in 0.0f64..1.0
        ) {
            let re = gaussian_quad_expectation(a, b, c, mu, var).unwrap();
            let z = gaussian_quad_expectation_complex(a.into(), b.into(), c.into(), mu, var).unwrap();
            prop_assert!((z.re - re).abs() <= 1e-12 * re.abs());
            prop_assert!(z.im.abs() <= 1e-12 * re.abs());
        }

        #[test]
        fn strategies_are_affine(t in 0.0f64..5.0, x0 in -1.0f64..1.0, dx in 0.01f64..1.0) {
            let s = solved(-0.5, |_| {});
            let p = &s.params;
            let f = |x: f64| strategy_full(t, x, &s.full, p);
            let g = |x: f64| strategy_partial(t, x, &s.partial, &s.fv, p);
            for h in [&f as &dyn Fn(f64) -> f64, &g] {
                let (y0, y1, y2) = (h(x0), h(x0 + dx), h(x0 + 2.0 * dx));
                prop_assert!(((y2 - y1) - (y1 - y0)).abs() < 1e-12);
            }
        }
    }
}
