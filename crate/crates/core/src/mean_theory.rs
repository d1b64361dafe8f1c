//! Comparison between the power and Radó scales, the `h`-profile of a
//! homogeneous symmetric mean, and entropies generated by means.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::means::{eval_mean, MeanKind, PowerOrder, RadoOrder};
use crate::sampling::{self, chunk_rng};

/// Relative excess that counts as an envelope violation.
pub const ENVELOPE_VIOLATION: f64 = 1e-9;

/// Which of the five parameter intervals an order falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum EnvelopeRegime {
    /// `α ≤ -2`
    BelowMinusTwo,
    /// `-2 < α ≤ -1`
    MinusTwoToMinusOne,
    /// `-1 < α ≤ -1/2`
    MinusOneToMinusHalf,
    /// `-1/2 < α < 1`
    MinusHalfToOne,
    /// `α ≥ 1`
    AboveOne,
}

impl fmt::Display for EnvelopeRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnvelopeRegime::BelowMinusTwo => "(-inf,-2]",
            EnvelopeRegime::MinusTwoToMinusOne => "(-2,-1]",
            EnvelopeRegime::MinusOneToMinusHalf => "(-1,-1/2]",
            EnvelopeRegime::MinusHalfToOne => "(-1/2,1)",
            EnvelopeRegime::AboveOne => "[1,inf]",
        })
    }
}

/// Sharp power-mean orders bracketing `R_α`: `M_lower ≤ R_α ≤ M_upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PowerEnvelope {
    pub alpha: f64,
    pub lower_exponent: f64,
    pub upper_exponent: f64,
    pub regime: EnvelopeRegime,
}

/// `α·ln 2 / ln(1+α)`, continuous at `α = 0` (value `ln 2`) and `α = -1`
/// (value `0`).
fn log_exponent(alpha: f64) -> f64 {
    if alpha == 0.0 {
        core::f64::consts::LN_2
    } else if alpha == -1.0 {
        0.0
    } else if alpha == f64::INFINITY {
        f64::INFINITY
    } else if alpha.abs() < 1e-8 {
        // α/ln(1+α) = 1 + α/2 - α²/12 + …
        core::f64::consts::LN_2 * (1.0 + alpha / 2.0 - alpha * alpha / 12.0)
    } else {
        alpha * core::f64::consts::LN_2 / alpha.ln_1p()
    }
}

fn linear_exponent(alpha: f64) -> f64 {
    (alpha + 2.0) / 3.0
}

/// The envelope for any extended real `α`.
pub fn rado_power_envelope(alpha: f64) -> Result<PowerEnvelope> {
    if alpha.is_nan() {
        return Err(Error::invalid("order is NaN"));
    }
    let (lower, upper, regime) = if alpha <= -2.0 {
        (linear_exponent(alpha), 0.0, EnvelopeRegime::BelowMinusTwo)
    } else if alpha <= -1.0 {
        (0.0, linear_exponent(alpha), EnvelopeRegime::MinusTwoToMinusOne)
    } else if alpha <= -0.5 {
        (log_exponent(alpha), linear_exponent(alpha), EnvelopeRegime::MinusOneToMinusHalf)
    } else if alpha < 1.0 {
        (linear_exponent(alpha), log_exponent(alpha), EnvelopeRegime::MinusHalfToOne)
    } else {
        (log_exponent(alpha), linear_exponent(alpha), EnvelopeRegime::AboveOne)
    };
    Ok(PowerEnvelope {
        alpha,
        lower_exponent: lower,
        upper_exponent: upper,
        regime,
    })
}

/// Relative gaps `((R - M_lower)/R, (M_upper - R)/R)` at one pair.
/// Negative entries are envelope violations.
pub fn envelope_gaps(env: &PowerEnvelope, x: f64, y: f64) -> Result<(f64, f64)> {
    let r = eval_mean(&MeanKind::Rado(RadoOrder::new(env.alpha)?), x, y)?;
    let lo = eval_mean(&MeanKind::Power(PowerOrder::new(env.lower_exponent)?), x, y)?;
    let hi = eval_mean(&MeanKind::Power(PowerOrder::new(env.upper_exponent)?), x, y)?;
    Ok(((r - lo) / r, (hi - r) / r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EnvelopeViolation {
    pub x: f64,
    pub y: f64,
    pub lower_gap: f64,
    pub upper_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EnvelopeReport {
    pub envelope: PowerEnvelope,
    pub violations: Vec<EnvelopeViolation>,
    /// Smallest relative gap seen on either side (a tightness witness).
    pub max_slack: f64,
    pub samples: usize,
}

impl EnvelopeReport {
    pub fn merge(&mut self, other: EnvelopeReport) {
        self.violations.extend(other.violations);
        self.max_slack = self.max_slack.min(other.max_slack);
        self.samples += other.samples;
    }
}

/// Checks `M_lower ≤ R_α ≤ M_upper` on `samples` log-uniform pairs from
/// `[1e-3, 1e3]`.
pub fn verify_envelope(alpha: f64, samples: usize, seed: u64) -> Result<EnvelopeReport> {
    if samples == 0 {
        return Err(Error::invalid("verify_envelope needs samples ≥ 1"));
    }
    let envelope = rado_power_envelope(alpha)?;
    let mut report = EnvelopeReport {
        envelope,
        violations: Vec::new(),
        max_slack: f64::INFINITY,
        samples: 0,
    };
    for (chunk, len) in sampling::chunks(samples) {
        report.merge(verify_envelope_chunk(alpha, seed, chunk, len)?);
    }
    Ok(report)
}

/// One chunk of [`verify_envelope`].
pub fn verify_envelope_chunk(alpha: f64, seed: u64, chunk: u64, len: usize) -> Result<EnvelopeReport> {
    let envelope = rado_power_envelope(alpha)?;
    let mut rng = chunk_rng(seed, chunk);
    let mut violations = Vec::new();
    let mut slack = f64::INFINITY;
    for _ in 0..len {
        let x = sampling::log_uniform(&mut rng, 1e-3, 1e3);
        let y = sampling::log_uniform(&mut rng, 1e-3, 1e3);
        let (lg, ug) = envelope_gaps(&envelope, x, y)?;
        if lg < -ENVELOPE_VIOLATION || ug < -ENVELOPE_VIOLATION {
            violations.push(EnvelopeViolation {
                x,
                y,
                lower_gap: lg,
                upper_gap: ug,
            });
        }
        slack = slack.min(lg).min(ug);
    }
    Ok(EnvelopeReport {
        envelope,
        violations,
        max_slack: slack,
        samples: len,
    })
}

/// Orders `(α, β)` with `M_α ≡ R_β`.
///
/// The middle pair is `(1/2, -1/2)`: `R_{-1/2}(x,y) = ((√x + √y)/2)²`.
pub fn common_scale_means() -> [(f64, f64); 5] {
    [
        (f64::NEG_INFINITY, f64::NEG_INFINITY),
        (0.0, -2.0),
        (0.5, -0.5),
        (1.0, 1.0),
        (f64::INFINITY, f64::INFINITY),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HProfile {
    pub t: f64,
    pub h: f64,
}

/// `h(t) = M(1, e^t)/(1 + e^t)`, evaluated as `M(e^{-t}, 1)/(e^{-t} + 1)`
/// for `t > 0` so that large `|t|` does not overflow.
pub fn h_profile(kind: &MeanKind, t: f64) -> Result<HProfile> {
    if !t.is_finite() {
        return Err(Error::domain("h_profile needs finite t"));
    }
    let h = if t > 0.0 {
        let s = (-t).exp();
        eval_mean(kind, s, 1.0)? / (s + 1.0)
    } else {
        let s = t.exp();
        eval_mean(kind, 1.0, s)? / (1.0 + s)
    };
    Ok(HProfile { t, h })
}

/// Ratio bounds on `h(t1)/h(t2)` for `0 ≤ t1 ≤ t2`, absolute tolerance
/// `1e-12` on the ratio. Only defined for symmetric kinds.
pub fn check_characterization(kind: &MeanKind, t1: f64, t2: f64) -> Result<bool> {
    if !kind.is_symmetric() {
        return Err(Error::invalid(format!("{kind} is not symmetric")));
    }
    if !(0.0 <= t1 && t1 <= t2 && t2.is_finite()) {
        return Err(Error::domain(format!("need 0 ≤ t1 ≤ t2, got ({t1}, {t2})")));
    }
    let ratio = h_profile(kind, t1)?.h / h_profile(kind, t2)?.h;
    // e^{t1}(e^{t2}+1)/(e^{t2}(e^{t1}+1)) = (1 + e^{-t2})/(1 + e^{-t1})
    let lower = (-t2).exp().ln_1p() - (-t1).exp().ln_1p();
    let upper = (t2.exp() + 1.0) / (t1.exp() + 1.0);
    let tol = 1e-12;
    Ok(ratio >= lower.exp() - tol && ratio <= upper + tol)
}

/// `Shannon`: the weighted geometric mean `G_{p1,p2}(p1, p2)`.
pub fn shannon_kind(p1: f64) -> MeanKind {
    MeanKind::WeightedGeometric(p1)
}

/// `Rényi` of order `α ≠ 1`: the Gini mean with `(u, v) = (α, 1)`.
pub fn renyi_kind(alpha: f64) -> MeanKind {
    MeanKind::Gini { u: alpha, v: 1.0 }
}

/// `H = -ln M(p1, p2)` for a probability pair.
pub fn entropy_from_mean(kind: &MeanKind, p1: f64, p2: f64) -> Result<f64> {
    if !(p1 > 0.0 && p2 > 0.0) || (p1 + p2 - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("({p1}, {p2}) is not a probability pair")));
    }
    Ok(-eval_mean(kind, p1, p2)?.ln())
}
