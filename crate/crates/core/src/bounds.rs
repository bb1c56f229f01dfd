//! Closed-form evaluators for the information-movement lower bounds and the
//! total-energy optimization.
//!
//! Logarithms are base 2 throughout; every ratio of logarithms appearing in
//! a bit-meters bound is base-invariant, so this convention only affects
//! reported intermediate quantities. Bounds are real-valued; no ceiling is
//! ever applied.

use std::fmt;

use thiserror::Error;

use crate::channel::q_function;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("bound does not apply: {condition}")]
    ConditionNotMet { condition: String },
    #[error("optimizer cross-check failed: closed form {closed}, golden section {golden}")]
    OptimizerCrossCheck { closed: f64, golden: f64 },
}

/// Lattice pitch and friction coefficient of an implementation.
#[derive(Debug, Clone, Copy)]
pub struct ImplementationParams {
    /// Meters per lattice unit.
    pub lambda: f64,
    /// Joules per bit-meter.
    pub mu: f64,
}

impl ImplementationParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self, BoundsError> {
        check_pos("lambda", lambda)?;
        check_pos("mu", mu)?;
        Ok(Self { lambda, mu })
    }

    /// Energy in joules for a given number of bit-meters.
    pub fn energy(&self, bitmeters: f64) -> f64 {
        self.mu * bitmeters
    }
}

/// What a bound value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundUnit {
    BitMeters,
    /// Average over computation inputs (flexible-message-length setting).
    AvgBitMeters,
    JoulesPerBit,
}

impl fmt::Display for BoundUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundUnit::BitMeters => "bit-meters",
            BoundUnit::AvgBitMeters => "avg-bit-meters",
            BoundUnit::JoulesPerBit => "joules-per-bit",
        };
        f.write_str(s)
    }
}

/// An evaluated lower bound with its regime condition and echoed inputs.
///
/// When `condition_ok` is false the bound does not apply: `value` is absent
/// and `note` names the alternate regime.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub theorem: &'static str,
    pub unit: BoundUnit,
    pub value: Option<f64>,
    pub condition_ok: bool,
    pub condition_text: &'static str,
    pub note: Option<String>,
    pub inputs: Vec<(&'static str, f64)>,
}

fn check_pos(name: &'static str, value: f64) -> Result<(), BoundsError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::InvalidParameter { name, value })
    }
}

fn check_eps(eps: f64) -> Result<(), BoundsError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(BoundsError::InvalidParameter {
            name: "eps",
            value: eps,
        })
    }
}

fn check_p_ch(p_ch: f64) -> Result<(), BoundsError> {
    if p_ch > 0.0 && p_ch < 0.5 {
        Ok(())
    } else {
        Err(BoundsError::InvalidParameter {
            name: "p_ch",
            value: p_ch,
        })
    }
}

/// `log2(1 / (10 eps))`: the reliability term of the fixed-power bounds.
fn reliability_term(eps: f64) -> f64 {
    -(10.0 * eps).log2()
}

/// `log2(1 / (2 p_ch))`: the channel-quality term.
fn channel_term(p_ch: f64) -> f64 {
    -(2.0 * p_ch).log2()
}

const COEFF_48_SQRT2: f64 = 48.0 * std::f64::consts::SQRT_2;

/// Error-probability lower bound when only `i_bits` bits of information are
/// available to estimate a uniform `r`-bit message.
///
/// At the `i_bits <= r/3` operating point this is the 1/9 floor for `r = 1`
/// and `max(1/9, 2/3 - 1/r)` for `r >= 2`; in general it is the entropy
/// inversion `(1 - i)^2 / 4` for `r = 1` and `(r - i - 1)/r` for `r >= 2`.
pub fn fano_error_lb(r: u64, i_bits: f64) -> Result<f64, BoundsError> {
    if r < 1 {
        return Err(BoundsError::InvalidParameter {
            name: "r",
            value: r as f64,
        });
    }
    if !(i_bits >= 0.0 && i_bits.is_finite()) {
        return Err(BoundsError::InvalidParameter {
            name: "i_bits",
            value: i_bits,
        });
    }
    let rf = r as f64;
    let bound = if r == 1 {
        let inversion = ((1.0 - i_bits).max(0.0)).powi(2) / 4.0;
        if i_bits <= rf / 3.0 {
            inversion.max(1.0 / 9.0)
        } else {
            inversion
        }
    } else {
        let general = ((rf - i_bits - 1.0) / rf).max(0.0);
        if i_bits <= rf / 3.0 {
            general.max(1.0 / 9.0).max(2.0 / 3.0 - 1.0 / rf)
        } else {
            general
        }
    };
    Ok(bound)
}

/// Node-count cap for one stencil cell of side ratio `a / lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeCellBound {
    /// `floor((a/l)^2 + 4 (a/l) + 4)`, from boundary padding of one node
    /// per side.
    pub bound: u64,
    /// The `2 (a/l)^2` simplification, valid once `(a/l)^2 >= 25`.
    pub simplified: Option<f64>,
}

/// Maximum number of computational nodes a stencil cell can hold.
pub fn max_nodes_in_cell(a_over_lambda: f64) -> NodeCellBound {
    let r = a_over_lambda.max(0.0);
    let bound = (r * r + 4.0 * r + 4.0).floor() as u64;
    let simplified = if r * r >= 25.0 {
        Some(2.0 * r * r)
    } else {
        None
    };
    NodeCellBound { bound, simplified }
}

const FIXED_POWER_CONDITION: &str = "log2(1/(10 eps)) > 50 log2(1/(2 p_ch))";
const FIXED_POWER_NOTE: &str =
    "outside this regime the transmit power must grow as Omega(log(1/eps)); no finite bit-meters bound applies";

fn fixed_power_condition_raw(eps: f64, p_ch: f64) -> bool {
    reliability_term(eps) > 50.0 * channel_term(p_ch)
}

/// The regime condition of the fixed-power decoding/encoding bounds.
/// Base-invariant. Domain: `0 < eps < 0.1`, `0 < p_ch < 1/2`.
pub fn fixed_power_condition(eps: f64, p_ch: f64) -> Result<bool, BoundsError> {
    if !(eps > 0.0 && eps < 0.1) {
        return Err(BoundsError::InvalidParameter {
            name: "eps",
            value: eps,
        });
    }
    check_p_ch(p_ch)?;
    Ok(fixed_power_condition_raw(eps, p_ch))
}

fn fixed_power_bm_lb(
    theorem: &'static str,
    unit: BoundUnit,
    k: u64,
    eps: f64,
    p_ch: f64,
    lambda: f64,
) -> Result<BoundReport, BoundsError> {
    if k < 1 {
        return Err(BoundsError::InvalidParameter {
            name: "k",
            value: k as f64,
        });
    }
    check_eps(eps)?;
    check_p_ch(p_ch)?;
    check_pos("lambda", lambda)?;

    let inputs = vec![
        ("k", k as f64),
        ("eps", eps),
        ("p_ch", p_ch),
        ("lambda", lambda),
    ];
    let condition_ok = fixed_power_condition_raw(eps, p_ch);
    let value = condition_ok.then(|| {
        k as f64 / COEFF_48_SQRT2 * (reliability_term(eps) / channel_term(p_ch)).sqrt() * lambda
    });
    Ok(BoundReport {
        theorem,
        unit,
        value,
        condition_ok,
        condition_text: FIXED_POWER_CONDITION,
        note: (!condition_ok).then(|| FIXED_POWER_NOTE.to_string()),
        inputs,
    })
}

/// Decoder bit-meters lower bound at fixed transmit power:
/// `k / (48 sqrt(2)) * sqrt(log(1/(10 eps)) / log(1/(2 p_ch))) * lambda`,
/// applicable while `log(1/(10 eps)) > 50 log(1/(2 p_ch))`.
pub fn decoding_bm_lb(
    k: u64,
    eps: f64,
    p_ch: f64,
    lambda: f64,
) -> Result<BoundReport, BoundsError> {
    fixed_power_bm_lb("decoding", BoundUnit::BitMeters, k, eps, p_ch, lambda)
}

/// Encoder average bit-meters lower bound; the same right-hand side as
/// [`decoding_bm_lb`] and valid for both fixed and flexible message
/// lengths, reported as an average.
pub fn encoding_bm_lb(
    k: u64,
    eps: f64,
    p_ch: f64,
    lambda: f64,
) -> Result<BoundReport, BoundsError> {
    fixed_power_bm_lb("encoding", BoundUnit::AvgBitMeters, k, eps, p_ch, lambda)
}

const NEAR_CAPACITY_CONDITION: &str = "log2(n) > 100 log2(1/(2 p_ch))";

fn near_capacity_condition_raw(n: u64, p_ch: f64) -> bool {
    (n as f64).log2() > 100.0 * channel_term(p_ch)
}

/// The regime condition of the blocklength-driven decoding bound.
pub fn near_capacity_condition(n: u64, p_ch: f64) -> Result<bool, BoundsError> {
    if n < 2 {
        return Err(BoundsError::InvalidParameter {
            name: "n",
            value: n as f64,
        });
    }
    check_p_ch(p_ch)?;
    Ok(near_capacity_condition_raw(n, p_ch))
}

/// Decoder bit-meters lower bound in terms of the blocklength:
/// `k / 192 * sqrt(log(n) / log(1/(2 p_ch))) * lambda`, applicable while
/// `log(n) > 100 log(1/(2 p_ch))`. Diverges as `sqrt(log n)`.
pub fn near_capacity_bm_lb(
    k: u64,
    n: u64,
    p_ch: f64,
    lambda: f64,
) -> Result<BoundReport, BoundsError> {
    if k < 1 {
        return Err(BoundsError::InvalidParameter {
            name: "k",
            value: k as f64,
        });
    }
    if n < 2 {
        return Err(BoundsError::InvalidParameter {
            name: "n",
            value: n as f64,
        });
    }
    check_p_ch(p_ch)?;
    check_pos("lambda", lambda)?;

    let inputs = vec![
        ("k", k as f64),
        ("n", n as f64),
        ("p_ch", p_ch),
        ("lambda", lambda),
    ];
    let condition_ok = near_capacity_condition_raw(n, p_ch);
    let value = condition_ok
        .then(|| k as f64 / 192.0 * ((n as f64).log2() / channel_term(p_ch)).sqrt() * lambda);
    Ok(BoundReport {
        theorem: "near_capacity",
        unit: BoundUnit::BitMeters,
        value,
        condition_ok,
        condition_text: NEAR_CAPACITY_CONDITION,
        note: (!condition_ok)
            .then(|| "blocklength too short for this crossover; bound not applicable".to_string()),
        inputs,
    })
}

/// Block-error lower bound from independent per-subcircuit erasure events:
/// `1 - (1 - (2 p_ch)^nbar / 9)^(n R log(1/(2 p_ch)) / (4 log n))` with
/// `nbar = log(n) / (2 log(1/(2 p_ch)))`. Evaluated in the log domain so
/// huge exponents cannot overflow. Requires the regime of
/// [`near_capacity_bm_lb`].
pub fn appendix_block_error_lb(n: u64, rate: f64, p_ch: f64) -> Result<f64, BoundsError> {
    if n < 2 {
        return Err(BoundsError::InvalidParameter {
            name: "n",
            value: n as f64,
        });
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(BoundsError::InvalidParameter {
            name: "rate",
            value: rate,
        });
    }
    check_p_ch(p_ch)?;
    if !near_capacity_condition_raw(n, p_ch) {
        return Err(BoundsError::ConditionNotMet {
            condition: NEAR_CAPACITY_CONDITION.to_string(),
        });
    }

    let ln_n = (n as f64).ln();
    let ln_inv_2p = -(2.0 * p_ch).ln();
    let nbar = ln_n / (2.0 * ln_inv_2p);
    // (2 p_ch)^nbar = exp(-ln(n)/2) = 1/sqrt(n), kept in log form.
    let per_cell = (-nbar * ln_inv_2p).exp() / 9.0;
    let exponent = n as f64 * rate * ln_inv_2p / (4.0 * ln_n);
    Ok(-(exponent * (-per_cell).ln_1p()).exp_m1())
}

/// Calibration default for the power-proportionality constant `beta`:
/// `beta * P_T = log2(1/(2 p_ch(P_T)))` holds exactly at received SNR 4.
pub fn default_beta() -> f64 {
    channel_term(q_function(2.0)) / 4.0
}

fn check_energy_params(eps: f64, beta: f64, mu: f64, rate: f64, w: f64) -> Result<(), BoundsError> {
    if !(eps > 0.0 && eps < 0.1) {
        return Err(BoundsError::InvalidParameter {
            name: "eps",
            value: eps,
        });
    }
    check_pos("beta", beta)?;
    check_pos("mu", mu)?;
    check_pos("rate", rate)?;
    check_pos("w", w)?;
    Ok(())
}

/// Combined coefficient of the friction term, `mu / (48 sqrt(2) sqrt(beta))`.
///
/// `beta` links channel quality to received power
/// (`log2(1/(2 p_ch)) ~ beta * P_T`, see [`default_beta`]); substituting it
/// into the encoding bit-meters bound turns the friction energy into
/// `c * sqrt(log2(1/(10 eps)) / P_T)` with this `c`.
pub fn friction_coefficient(mu: f64, beta: f64) -> f64 {
    mu / (COEFF_48_SQRT2 * beta.sqrt())
}

/// Total (transmit + encoding) energy per bit at transmit power `p_t`:
/// `P_T / (R W) + c * sqrt(log2(1/(10 eps)) / P_T)` with
/// `c = friction_coefficient(mu, beta)`, in joules per bit.
pub fn total_energy_per_bit_lb(
    eps: f64,
    beta: f64,
    mu: f64,
    rate: f64,
    w: f64,
    p_t: f64,
) -> Result<f64, BoundsError> {
    check_energy_params(eps, beta, mu, rate, w)?;
    check_pos("p_t", p_t)?;
    let c = friction_coefficient(mu, beta);
    Ok(p_t / (rate * w) + c * (reliability_term(eps) / p_t).sqrt())
}

/// Transmit power minimizing [`total_energy_per_bit_lb`], in closed form:
/// `P_T* = ((c/2) sqrt(L) R W)^(2/3)` with `L = log2(1/(10 eps))`. The
/// result is cross-checked internally against a golden-section search to
/// 1e-9 relative.
pub fn optimal_transmit_power(
    eps: f64,
    beta: f64,
    mu: f64,
    rate: f64,
    w: f64,
) -> Result<(f64, f64), BoundsError> {
    check_energy_params(eps, beta, mu, rate, w)?;
    let c = friction_coefficient(mu, beta);
    let l = reliability_term(eps);
    let p_star = (c / 2.0 * l.sqrt() * rate * w).powf(2.0 / 3.0);
    let value = total_energy_per_bit_lb(eps, beta, mu, rate, w, p_star)?;

    let (p_golden, _) = golden_section_power(eps, beta, mu, rate, w)?;
    if (p_star - p_golden).abs() > 1e-9 * p_star.abs().max(1e-300) {
        return Err(BoundsError::OptimizerCrossCheck {
            closed: p_star,
            golden: p_golden,
        });
    }
    Ok((p_star, value))
}

/// Derivative-free minimizer of the total-energy bound, used as the
/// independent cross-check for the closed form.
pub fn golden_section_power(
    eps: f64,
    beta: f64,
    mu: f64,
    rate: f64,
    w: f64,
) -> Result<(f64, f64), BoundsError> {
    check_energy_params(eps, beta, mu, rate, w)?;
    let c = friction_coefficient(mu, beta);
    let l = reliability_term(eps);
    let f = |p: f64| p / (rate * w) + c * (l / p).sqrt();

    // Bracket the minimum of the unimodal objective.
    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    while f(hi * 2.0) < f(hi) && hi < 1e200 {
        hi *= 2.0;
    }
    hi *= 2.0;
    while f(lo / 2.0) < f(lo) && lo > 1e-200 {
        lo /= 2.0;
    }
    lo /= 2.0;

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        // Stop while function comparisons still resolve: below ~1e-6
        // relative the objective is flat to f64 rounding and the bracket
        // stops tracking the true minimizer.
        if hi - lo <= 1e-6 * hi.abs() {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    // Parabolic refinement through well-separated samples recovers the
    // digits golden section cannot resolve in f64.
    let mut p = (lo + hi) / 2.0;
    for _ in 0..3 {
        let h = 1e-5 * p;
        let (fm, f0, fp) = (f(p - h), f(p), f(p + h));
        let denom = fp - 2.0 * f0 + fm;
        if denom > 0.0 {
            let step = h * (fm - fp) / (2.0 * denom);
            if step.abs() < 0.5 * p {
                p += step;
            }
        }
    }
    Ok((p, f(p)))
}

/// Order-sense blocklength needed to hit `eps` at rate gap `C - R`:
/// `log2(1/eps) / (K (C - R)^2)`.
pub fn required_blocklength(eps: f64, c_minus_r: f64, k_const: f64) -> Result<f64, BoundsError> {
    check_eps(eps)?;
    check_pos("c_minus_r", c_minus_r)?;
    check_pos("k_const", k_const)?;
    Ok((1.0 / eps).log2() / (k_const * c_minus_r * c_minus_r))
}

/// Least-squares line through `points`; `None` with fewer than two points
/// or a degenerate abscissa.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let max_abs_residual = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).abs())
        .fold(0.0, f64::max);
    Some(LinearFit {
        slope,
        intercept,
        max_abs_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // 60-digit reference evaluations, frozen.
    const THM1_EXAMPLE: f64 = 1.33845702770771402087563418036e-4;
    const THM3_EXAMPLE: f64 = 84.4894637615802568492367396775;
    const APPENDIX_2_20: f64 = 0.102459427410087903106264558131;

    #[test]
    fn fano_examples() {
        assert!((fano_error_lb(1, 1.0 / 3.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((fano_error_lb(2, 2.0 / 3.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((fano_error_lb(3, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // Plenty of information: bound degrades to zero, never negative.
        assert_eq!(fano_error_lb(2, 5.0).unwrap(), 0.0);
        assert!(fano_error_lb(0, 0.1).is_err());
    }

    #[test]
    fn node_cell_bound_examples() {
        let five = max_nodes_in_cell(5.0);
        assert_eq!(five.bound, 49);
        assert_eq!(five.simplified, Some(50.0));
        assert!(five.simplified.unwrap() >= five.bound as f64);

        let zero = max_nodes_in_cell(0.0);
        assert_eq!(zero.bound, 4);
        assert_eq!(zero.simplified, None);

        let ten = max_nodes_in_cell(10.0);
        assert_eq!(ten.bound, 144);
        assert_eq!(ten.simplified, Some(200.0));
    }

    #[test]
    fn fixed_power_condition_examples() {
        assert!(fixed_power_condition(1e-10, 0.45).unwrap());
        assert!(!fixed_power_condition(1e-10, 0.05).unwrap());
        assert!(!fixed_power_condition(0.0999999, 0.45).unwrap());
        assert!(fixed_power_condition(0.2, 0.4).is_err());
        assert!(fixed_power_condition(1e-10, 0.6).is_err());
    }

    #[test]
    fn decoding_bound_matches_frozen_oracle() {
        let report = decoding_bm_lb(1000, 1e-9, 0.4, 1e-6).unwrap();
        assert!(report.condition_ok);
        let value = report.value.unwrap();
        assert!(
            (value - THM1_EXAMPLE).abs() <= 1e-9 * THM1_EXAMPLE,
            "got {value}"
        );
    }

    #[test]
    fn decoding_bound_linear_in_k() {
        let one = decoding_bm_lb(1000, 1e-9, 0.4, 1e-6)
            .unwrap()
            .value
            .unwrap();
        let two = decoding_bm_lb(2000, 1e-9, 0.4, 1e-6)
            .unwrap()
            .value
            .unwrap();
        assert!((two - 2.0 * one).abs() < 1e-18);
    }

    #[test]
    fn encoding_equals_decoding() {
        let dec = decoding_bm_lb(1000, 1e-9, 0.4, 1e-6).unwrap();
        let enc = encoding_bm_lb(1000, 1e-9, 0.4, 1e-6).unwrap();
        assert_eq!(dec.value, enc.value);
        assert_eq!(enc.unit, BoundUnit::AvgBitMeters);
        assert_eq!(dec.unit, BoundUnit::BitMeters);
    }

    #[test]
    fn decoding_condition_failure_reports_regime() {
        let report = decoding_bm_lb(1000, 1e-9, 0.05, 1e-6).unwrap();
        assert!(!report.condition_ok);
        assert!(report.value.is_none());
        assert!(report.note.is_some());
    }

    #[test]
    fn near_capacity_examples() {
        let report = near_capacity_bm_lb(1000, 1u64 << 40, 0.45, 1.0).unwrap();
        assert!(report.condition_ok);
        let value = report.value.unwrap();
        assert!(
            (value - THM3_EXAMPLE).abs() <= 1e-9 * THM3_EXAMPLE,
            "got {value}"
        );

        assert!(!near_capacity_condition(1u64 << 10, 0.45).unwrap());
        let off = near_capacity_bm_lb(1000, 1u64 << 10, 0.45, 1.0).unwrap();
        assert!(!off.condition_ok && off.value.is_none());
    }

    #[test]
    fn near_capacity_sqrt_log_ratio() {
        let n = 1u64 << 20;
        let at_n = near_capacity_bm_lb(7, n, 0.45, 1.0).unwrap().value.unwrap();
        let at_n2 = near_capacity_bm_lb(7, n * n, 0.45, 1.0)
            .unwrap()
            .value
            .unwrap();
        let ratio = at_n2 / at_n;
        assert!(
            (ratio - std::f64::consts::SQRT_2).abs() < 1e-12,
            "ratio {ratio}"
        );
    }

    #[test]
    fn appendix_examples() {
        let v = appendix_block_error_lb(1 << 20, 0.5, 0.45).unwrap();
        assert!((v - APPENDIX_2_20).abs() < 1e-12, "got {v}");

        // Monotone in n at fixed rate and crossover.
        let big = appendix_block_error_lb(1u64 << 40, 0.5, 0.45).unwrap();
        assert!(big > v);

        // Tends to one.
        let huge = appendix_block_error_lb(1u64 << 60, 0.5, 0.45).unwrap();
        assert!(huge > 0.999);

        // Refuses outside the regime.
        assert!(matches!(
            appendix_block_error_lb(1 << 20, 0.5, 0.01),
            Err(BoundsError::ConditionNotMet { .. })
        ));
    }

    #[test]
    fn base_invariance_of_bound_formulas() {
        // Re-derive with natural logs; ratios of logs are base-free.
        let (k, eps, p_ch, lambda) = (137u64, 3.3e-8, 0.41, 2.5e-7);
        let report = decoding_bm_lb(k, eps, p_ch, lambda).unwrap();
        let nat = k as f64 / (48.0 * std::f64::consts::SQRT_2)
            * ((1.0 / (10.0 * eps)).ln() / (1.0 / (2.0 * p_ch)).ln()).sqrt()
            * lambda;
        let got = report.value.unwrap();
        assert!((got - nat).abs() <= 1e-12 * nat);

        let n = 1u64 << 33;
        let r3 = near_capacity_bm_lb(k, n, 0.45, lambda)
            .unwrap()
            .value
            .unwrap();
        let nat3 = k as f64 / 192.0 * ((n as f64).ln() / (1.0 / 0.9f64).ln()).sqrt() * lambda;
        assert!((r3 - nat3).abs() <= 1e-12 * nat3);
    }

    #[test]
    fn total_energy_shape() {
        // Premise: friction coefficient times sqrt(L) equals 2, R W = 1.
        let eps = 1e-6f64;
        let l = -(10.0 * eps).log2();
        let beta = 1.0;
        let mu = 2.0 * COEFF_48_SQRT2 / l.sqrt();
        assert!((friction_coefficient(mu, beta) * l.sqrt() - 2.0).abs() < 1e-12);

        let at = |p| total_energy_per_bit_lb(eps, beta, mu, 1.0, 1.0, p).unwrap();
        assert!((at(1.0) - 3.0).abs() < 1e-12);
        assert!(at(1e6) > 1e5);
        assert!(at(1e-12) > 1e5);
        assert!(at(0.5) > at(1.0) && at(2.0) > at(1.0));
    }

    #[test]
    fn optimizer_closed_form_and_cube_root_scaling() {
        let eps = 1e-6f64;
        let l = -(10.0 * eps).log2();
        let beta = 1.0;
        let mu = 2.0 * COEFF_48_SQRT2 / l.sqrt();
        let (p_star, value) = optimal_transmit_power(eps, beta, mu, 1.0, 1.0).unwrap();
        assert!((p_star - 1.0).abs() < 1e-12, "p* = {p_star}");
        assert!((value - 3.0).abs() < 1e-12, "value = {value}");

        // Minimal energy grows like the cube root of the reliability term.
        let points: Vec<(f64, f64)> = (3..=15)
            .map(|i| {
                let eps = 10f64.powi(-i);
                let l = -(10.0 * eps).log2();
                let (_, v) = optimal_transmit_power(eps, 2.0, 1.0, 0.5, 3.0).unwrap();
                (l.ln(), v.ln())
            })
            .collect();
        let fit = linear_fit(&points).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() < 0.02, "slope {}", fit.slope);

        // R W to infinity: transmit term vanishes, optimum power diverges.
        let (p_big, _) = optimal_transmit_power(1e-6, 1.0, 1.0, 1.0, 1e9).unwrap();
        assert!(p_big > 1e3);
    }

    #[test]
    fn golden_section_agrees_with_calculus() {
        let (p, v) = golden_section_power(1e-8, 0.7, 3.0, 0.25, 2.0).unwrap();
        let c = friction_coefficient(3.0, 0.7);
        let l = -(10.0f64 * 1e-8).log2();
        let expected = (c / 2.0 * l.sqrt() * 0.25 * 2.0).powf(2.0 / 3.0);
        assert!(
            (p - expected).abs() < 1e-9 * expected,
            "p = {p} vs {expected}"
        );
        assert!(v > 0.0);
    }

    #[test]
    fn required_blocklength_examples() {
        let n = required_blocklength(1e-6, 0.1, 1.0).unwrap();
        assert!((n - 1993.156856932417).abs() < 1e-9);
        let halved = required_blocklength(1e-6, 0.05, 1.0).unwrap();
        assert!((halved / n - 4.0).abs() < 1e-12);
        let squared = required_blocklength(1e-12, 0.1, 1.0).unwrap();
        assert!((squared / n - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_scaling_of_fixed_power_bound() {
        // Slope of log(bound) against log(log(1/(10 eps))) is 1/2.
        let points: Vec<(f64, f64)> = (5..=15)
            .map(|i| {
                let eps = 10f64.powi(-i);
                let v = decoding_bm_lb(1000, eps, 0.45, 1e-6)
                    .unwrap()
                    .value
                    .unwrap();
                ((-(10.0 * eps).log2()).ln(), v.ln())
            })
            .collect();
        let fit = linear_fit(&points).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.02, "slope {}", fit.slope);
    }

    #[test]
    fn default_beta_calibration() {
        // beta * 4 = log2(1/(2 Q(2))) by construction.
        let beta = default_beta();
        assert!((beta * 4.0 - -(2.0 * q_function(2.0)).log2()).abs() < 1e-15);
        assert!((beta - 1.114495319242971).abs() < 1e-12);
    }

    #[test]
    fn implementation_params_energy() {
        let params = ImplementationParams::new(1e-6, 3.0e-12).unwrap();
        assert!((params.energy(2.0) - 6.0e-12).abs() < 1e-24);
        assert!(ImplementationParams::new(0.0, 1.0).is_err());
    }
}
