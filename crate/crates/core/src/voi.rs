//! Monetary value of information about the market price of risk.
//!
//! A partially informed investor is compared with one who learns `X_0` at the
//! start (initial information) and one who observes `X` throughout (dynamic
//! information). Each value is the fraction of initial wealth that leaves the
//! better informed investor indifferent.

use alloc::vec::Vec;

use num_traits::Float;

use crate::model::MarketParams;
use crate::riccati::{solve_filter_variance, solve_partial_riccati, RiccatiSolution, Solved};
use crate::{par, Error, Result, TimeGrid};

/// Value as a fraction of wealth, with the matching reservation price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoValue {
    pub value: f64,
    pub reservation_price: f64,
}

/// Time-0 coefficients the information values are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoInputs {
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub q0: f64,
    /// `A~(0)` with the filter started at `R0`.
    pub a_tilde_r0: f64,
    /// `A~(0)` with the filter started at zero.
    pub a_tilde_zero: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoValueReport {
    pub v_initial: f64,
    pub v_dynamic: f64,
    pub delta_w_initial: f64,
    pub delta_w_dynamic: f64,
    /// Certainty equivalents as fractions of `w`.
    pub ce_partial: f64,
    pub ce_partial_r0zero: f64,
    pub ce_full: f64,
    pub inputs: InfoInputs,
}

impl InfoValueReport {
    /// `V^D / V^I`; infinite when `V^I = 0`.
    pub fn ratio(&self) -> f64 {
        self.v_dynamic / self.v_initial
    }
}

fn q0_of(params: &MarketParams, c0: f64) -> Result<f64> {
    let q0 = 1.0 - params.gamma * c0 * params.r0;
    if !(q0 > 0.0) {
        return Err(Error::QNonPositive { time: 0.0, value: q0 });
    }
    Ok(q0)
}

/// `1 - (sqrt(Q0) exp(gamma adiff - gamma^2 B0^2 R0 / (2 Q0)))^(1 / (1 - gamma))`,
/// evaluated in log space so small values keep their digits.
fn kernel(params: &MarketParams, q0: f64, adiff: f64, b0: f64) -> Result<f64> {
    if params.is_log_utility() {
        return Err(Error::LogUtility);
    }
    let g = params.gamma;
    let ln_base = 0.5 * q0.ln() + g * adiff - g * g * b0 * b0 * params.r0 / (2.0 * q0);
    if !ln_base.is_finite() {
        return Err(Error::InvalidInput("information value base is not a positive finite number"));
    }
    Ok(-(ln_base / (1.0 - g)).exp_m1())
}

fn priced(params: &MarketParams, value: f64) -> InfoValue {
    InfoValue {
        value,
        reservation_price: params.w * value,
    }
}

/// Value of learning `X_0` at time 0.
pub fn value_of_initial_information(
    params: &MarketParams,
    full: &RiccatiSolution,
    partial_at_r0: &RiccatiSolution,
    partial_at_zero: &RiccatiSolution,
) -> Result<InfoValue> {
    let (_, b0, c0) = full.initial();
    let q0 = q0_of(params, c0)?;
    let adiff = partial_at_r0.initial().0 - partial_at_zero.initial().0;
    Ok(priced(params, kernel(params, q0, adiff, b0)?))
}

/// Value of observing the whole path of `X`.
pub fn value_of_dynamic_information(
    params: &MarketParams,
    full: &RiccatiSolution,
    partial_at_r0: &RiccatiSolution,
) -> Result<InfoValue> {
    let (a0, b0, c0) = full.initial();
    let q0 = q0_of(params, c0)?;
    let adiff = partial_at_r0.initial().0 - a0;
    Ok(priced(params, kernel(params, q0, adiff, b0)?))
}

/// Certainty equivalent of the partially informed investor as a fraction of
/// `w`: `exp(gamma K / (1 - gamma))` where `K` is the time-0 exponent at `pi0`.
pub fn certainty_equivalent_partial(
    params: &MarketParams,
    partial: &RiccatiSolution,
    full: &RiccatiSolution,
) -> Result<f64> {
    if params.is_log_utility() {
        return Err(Error::LogUtility);
    }
    let (_, b0, c0) = full.initial();
    let q0 = q0_of(params, c0)?;
    let pi0 = params.pi0;
    let k = partial.initial().0 + (b0 * pi0 + 0.5 * c0 * pi0 * pi0) / q0;
    let g = params.gamma;
    Ok((g * k / (1.0 - g)).exp())
}

/// Certainty equivalent of the fully informed investor with `X_0` drawn from
/// the prior, as a fraction of `w`.
pub fn certainty_equivalent_full(params: &MarketParams, full: &RiccatiSolution) -> Result<f64> {
    if params.is_log_utility() {
        return Err(Error::LogUtility);
    }
    let g = params.gamma;
    let (a0, b0, c0) = full.initial();
    let q0 = q0_of(params, c0)?;
    let pi0 = params.pi0;
    let ln_m = g * a0 + g * (g * b0 * b0 * params.r0 + 2.0 * b0 * pi0 + c0 * pi0 * pi0) / (2.0 * q0) - 0.5 * q0.ln();
    Ok((ln_m / (1.0 - g)).exp())
}

/// Partial-information solve with the filter started at zero variance, on the
/// grid of `solved`.
pub fn solve_partial_at_zero(solved: &Solved) -> Result<RiccatiSolution> {
    if solved.params.r0 == 0.0 {
        return Ok(solved.partial.clone());
    }
    let params = solved.params.with(|r| r.r0 = 0.0)?;
    let grid: TimeGrid = *solved.full.grid();
    let fv = solve_filter_variance(&params, &grid)?;
    solve_partial_riccati(&params, &fv, &grid)
}

pub fn compute_info_value(solved: &Solved) -> Result<InfoValueReport> {
    let p = &solved.params;
    let at_zero = solve_partial_at_zero(solved)?;
    let initial = value_of_initial_information(p, &solved.full, &solved.partial, &at_zero)?;
    let dynamic = value_of_dynamic_information(p, &solved.full, &solved.partial)?;
    let p_zero = p.with(|r| r.r0 = 0.0)?;
    let (a0, b0, c0) = solved.full.initial();
    Ok(InfoValueReport {
        v_initial: initial.value,
        v_dynamic: dynamic.value,
        delta_w_initial: initial.reservation_price,
        delta_w_dynamic: dynamic.reservation_price,
        ce_partial: certainty_equivalent_partial(p, &solved.partial, &solved.full)?,
        ce_partial_r0zero: certainty_equivalent_partial(&p_zero, &at_zero, &solved.full)?,
        ce_full: certainty_equivalent_full(p, &solved.full)?,
        inputs: InfoInputs {
            a0,
            b0,
            c0,
            q0: q0_of(p, c0)?,
            a_tilde_r0: solved.partial.initial().0,
            a_tilde_zero: at_zero.initial().0,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    R0,
    Horizon,
    Rho,
    Gamma,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::R0 => "R0",
            SweepAxis::Horizon => "T",
            SweepAxis::Rho => "rho",
            SweepAxis::Gamma => "gamma",
        }
    }

    pub fn apply(self, params: &MarketParams, value: f64) -> Result<MarketParams> {
        params.with(|r| match self {
            SweepAxis::R0 => r.r0 = value,
            SweepAxis::Horizon => r.horizon = value,
            SweepAxis::Rho => r.rho = value,
            SweepAxis::Gamma => r.gamma = value,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub report: Result<InfoValueReport>,
}

/// Information values along one parameter axis; failures are kept per point.
pub fn voi_sweep(params: &MarketParams, axis: SweepAxis, grid: &[f64]) -> Vec<SweepPoint> {
    par::map(grid.len(), |i| {
        let value = grid[i];
        let report = axis
            .apply(params, value)
            .and_then(|p| Solved::new(&p))
            .and_then(|s| compute_info_value(&s));
        SweepPoint { value, report }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{expected_utility_full_unconditional, expected_utility_partial_unconditional};

    fn solved(rho: f64, edit: impl FnOnce(&mut crate::RawParams)) -> Solved {
        Solved::new(&MarketParams::table1(rho).with(edit).unwrap()).unwrap()
    }

    /// Bisection on `f(dw) = 0` over `(0, w)` with `f` increasing.
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

    #[test]
    fn zero_prior_variance_has_no_initial_value() {
        let s = solved(-0.9, |r| r.r0 = 0.0);
        let rep = compute_info_value(&s).unwrap();
        assert_eq!(rep.v_initial, 0.0);
        assert!(rep.v_dynamic > 0.0);
        assert!(rep.ratio().is_infinite());
    }

    #[test]
    fn initial_value_solves_indifference() {
        for rho in [-0.9, 0.0, 0.9] {
            let s = solved(rho, |_| {});
            let p = &s.params;
            let g = p.gamma;
            let lhs = expected_utility_partial_unconditional(&s).unwrap();
            let at_zero = solve_partial_at_zero(&s).unwrap();
            let (_, b0, c0) = s.full.initial();
            // Utility of the investor told X_0, averaged over the prior by
            // quadrature, with initial wealth w - dw.
            let expo = |x: f64| g * (at_zero.initial().0 + b0 * x + 0.5 * c0 * x * x);
            let sd = p.r0.sqrt();
            let nodes = 4000;
            let mut avg = 0.0;
            for i in 0..=nodes {
                let z = -12.0 + 24.0 * i as f64 / nodes as f64;
                let wgt = if i == 0 || i == nodes { 0.5 } else { 1.0 };
                avg += wgt * (expo(p.pi0 + sd * z) - 0.5 * z * z).exp();
            }
            avg *= 24.0 / nodes as f64 / (2.0 * core::f64::consts::PI).sqrt();
            let rhs = |dw: f64| (p.w - dw).powf(1.0 - g) / (1.0 - g) * avg;
            let dw = bisect(p.w, |dw| lhs - rhs(dw));
            let v = value_of_initial_information(p, &s.full, &s.partial, &at_zero).unwrap();
            assert!((v.value - dw / p.w).abs() < 1e-9 * v.value, "rho {rho}: {} vs {}", v.value, dw);
        }
    }

    #[test]
    fn dynamic_value_solves_indifference() {
        for rho in [-0.9, 0.0, 0.9] {
            let s = solved(rho, |_| {});
            let p = &s.params;
            let lhs = expected_utility_partial_unconditional(&s).unwrap();
            let full_w = expected_utility_full_unconditional(&s).unwrap();
            // Expected utility scales as w^(1 - gamma).
            let rhs = |dw: f64| full_w * ((p.w - dw) / p.w).powf(1.0 - p.gamma);
            let dw = bisect(p.w, |dw| lhs - rhs(dw));
            let v = value_of_dynamic_information(p, &s.full, &s.partial).unwrap();
            assert!((v.value - dw / p.w).abs() < 1e-9 * v.value, "rho {rho}");
        }
    }

    #[test]
    fn ordering_and_invariances() {
        let base = compute_info_value(&solved(0.0, |_| {})).unwrap();
        assert!(0.0 < base.v_initial && base.v_initial <= base.v_dynamic && base.v_dynamic < 1.0);
        let shifted = compute_info_value(&solved(0.0, |r| r.pi0 += 1.0)).unwrap();
        assert!((shifted.v_initial - base.v_initial).abs() < 1e-12);
        assert!((shifted.v_dynamic - base.v_dynamic).abs() < 1e-12);
        let richer = compute_info_value(&solved(0.0, |r| r.w *= 2.0)).unwrap();
        assert_eq!(richer.v_initial, base.v_initial);
        assert_eq!(richer.delta_w_dynamic, 2.0 * base.delta_w_dynamic);
    }

    #[test]
    fn certainty_equivalents_match_utilities() {
        let s = solved(-0.9, |_| {});
        let p = &s.params;
        let rep = compute_info_value(&s).unwrap();
        let u = expected_utility_partial_unconditional(&s).unwrap();
        assert!((p.utility(p.w * rep.ce_partial) / u - 1.0).abs() < 1e-12);
        let u = expected_utility_full_unconditional(&s).unwrap();
        assert!((p.utility(p.w * rep.ce_full) / u - 1.0).abs() < 1e-12);
        assert!(rep.ce_full > rep.ce_partial);
    }

    #[test]
    fn sweep_keeps_failures() {
        let p = MarketParams::table1(0.0);
        let pts = voi_sweep(&p, SweepAxis::R0, &[0.05, -1.0]);
        assert!(pts[0].report.is_ok());
        assert!(pts[1].report.is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn invariants(rho in -0.95f64..0.95, r0 in 0.01f64..1.0, gamma in 1.5f64..10.0, shift in -1.0f64..1.0) {
            let edit = |r: &mut crate::RawParams| {
                r.rho = rho;
                r.r0 = r0;
                r.gamma = gamma;
                r.horizon = 2.0;
            };
            let base = compute_info_value(&solved(0.0, edit)).unwrap();
            proptest::prop_assert!(0.0 < base.v_initial && base.v_initial <= base.v_dynamic && base.v_dynamic < 1.0);
            let moved = compute_info_value(&solved(0.0, |r| {
                edit(r);
                r.pi0 += shift;
                r.w = 3.0;
            }))
            .unwrap();
            proptest::prop_assert!((moved.v_initial - base.v_initial).abs() <= 1e-12);
            proptest::prop_assert!((moved.v_dynamic - base.v_dynamic).abs() <= 1e-12);
        }
    }

    #[test]
    fn log_utility_is_rejected() {
        let s = solved(0.0, |r| r.gamma = 1.0);
        assert_eq!(compute_info_value(&s), Err(Error::LogUtility));
    }
}
