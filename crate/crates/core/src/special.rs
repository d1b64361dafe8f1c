//! Gamma, incomplete gamma, complete elliptic K and Jacobi θ₃, with the
//! two-sided bounds that the mean refinements produce for them.

use alloc::format;

// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::Accumulator;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k-1))` for `k = 1..=8`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn check_positive(a: f64, what: &str) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} needs a finite positive argument, got {a}")))
    }
}

/// `ln Γ(a)` for `a > 0`: Stirling series at `z ≥ 10`, upward recurrence below.
pub fn log_gamma(a: f64) -> Result<f64> {
    check_positive(a, "log_gamma")?;
    let mut z = a;
    let mut shift = 1.0f64;
    let mut ln_shift = 0.0;
    while z < 10.0 {
        shift *= z;
        if shift > 1e280 {
            ln_shift += shift.ln();
            shift = 1.0;
        }
        z += 1.0;
    }
    ln_shift += shift.ln();
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    Ok((z - 0.5) * z.ln() - z + HALF_LN_2PI + series - ln_shift)
}

/// `Γ(a)` for `a > 0`; exact products for small integers.
pub fn gamma(a: f64) -> Result<f64> {
    check_positive(a, "gamma")?;
    if a.fract() == 0.0 && a <= 25.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < a {
            p *= k;
            k += 1.0;
        }
        return Ok(p);
    }
    let v = log_gamma(a)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("gamma({a}) overflows")))
    }
}

/// `γ(a, x)` and `Γ(a, x)` with their regularized forms.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IncompleteGamma {
    pub lower: f64,
    pub upper: f64,
    /// `γ(a, x)/Γ(a)`.
    pub p: f64,
    /// `Γ(a, x)/Γ(a)`.
    pub q: f64,
}

const INC_EPS: f64 = 1e-17;
const INC_MAX_ITER: usize = 10_000;

fn lower_series(a: f64, x: f64) -> Result<f64> {
    // P(a,x) = x^a e^{-x}/Γ(a+1) · Σ x^n / ((a+1)…(a+n))
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ap = a;
    for _ in 0..INC_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * INC_EPS {
            return Ok((a * x.ln() - x - log_gamma(a + 1.0)?).exp() * sum);
        }
    }
    Err(Error::NoConvergence {
        iterations: INC_MAX_ITER,
        gap: term,
    })
}

fn upper_fraction(a: f64, x: f64) -> Result<f64> {
    // modified Lentz on Γ(a,x) = e^{-x} x^a · 1/(x+1-a- 1(1-a)/(x+3-a- …))
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..INC_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < INC_EPS {
            return Ok((a * x.ln() - x - log_gamma(a)?).exp() * h);
        }
    }
    Err(Error::NoConvergence {
        iterations: INC_MAX_ITER,
        gap: h,
    })
}

/// Regularized `(P, Q)`: series below `x = a + 1`, continued fraction above.
pub fn regularized_gamma(a: f64, x: f64) -> Result<(f64, f64)> {
    check_positive(a, "incomplete_gamma")?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("incomplete_gamma needs x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x < a + 1.0 {
        let p = lower_series(a, x)?;
        Ok((p, 1.0 - p))
    } else {
        let q = upper_fraction(a, x)?;
        Ok((1.0 - q, q))
    }
}

pub fn incomplete_gamma(a: f64, x: f64) -> Result<IncompleteGamma> {
    let (p, q) = regularized_gamma(a, x)?;
    let g = gamma(a)?;
    Ok(IncompleteGamma {
        lower: p * g,
        upper: q * g,
        p,
        q,
    })
}

/// `Γ²(a+1) ≤ (γ(a,1)+Γ(a+2,1))(γ(a+2,1)+Γ(a,1)) ≤ Γ(a+2)Γ(a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GammaChain {
    pub a: f64,
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    /// `middle / upper`.
    pub g_ratio: f64,
    /// `1 - g_ratio`, computed without cancellation.
    pub g_gap: f64,
    /// `lower / upper = a/(a+1)`.
    pub l_ratio: f64,
}

/// `D(a) = ∫₀¹ t^{a-1} e^{-t} (1 - t²) dt = Σ_k (-1)^k/k! · 2/((a+k)(a+k+2))`.
fn restricted_difference(a: f64) -> f64 {
    let mut acc = Accumulator::default();
    let mut fact = 1.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            fact *= kf;
        }
        let term = 2.0 / (fact * (a + kf) * (a + kf + 2.0));
        acc.add(if k % 2 == 0 { term } else { -term });
        if term < 1e-18 * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

pub fn gamma_turan_chain(a: f64) -> Result<GammaChain> {
    check_positive(a, "gamma_turan_chain")?;
    let (pa, qa) = regularized_gamma(a, 1.0)?;
    let (pa2, qa2) = regularized_gamma(a + 2.0, 1.0)?;
    let aa = a * (a + 1.0);
    // middle / (Γ(a+2)Γ(a)) = (P_a/(a(a+1)) + Q_{a+2}) · (a(a+1) P_{a+2} + Q_a)
    let g_ratio = (pa / aa + qa2) * (aa * pa2 + qa);

    // gap = [∫₁^∞ t^{a-1}e^{-t}(t²-1)] · [∫₀¹ t^{a-1}e^{-t}(1-t²)] / (Γ(a+2)Γ(a))
    //     = [(a²+a-1) + d]·d / (a(a+1)),  d = D(a)/Γ(a)
    let d = (restricted_difference(a).ln() - log_gamma(a)?).exp();
    let g_gap = ((aa - 1.0) + d) * d / aa;

    let ln_upper = log_gamma(a + 2.0)? + log_gamma(a)?;
    let upper = ln_upper.exp();
    let lower = (2.0 * log_gamma(a + 1.0)?).exp();
    let middle = g_ratio * upper;
    if !upper.is_finite() {
        return Err(Error::NonFinite(format!("gamma chain members overflow at a = {a}")));
    }
    Ok(GammaChain {
        a,
        lower,
        middle,
        upper,
        g_ratio,
        g_gap,
        l_ratio: a / (a + 1.0),
    })
}

/// `K(x) = ∫₀¹ dt/√((1-t²)(1-x²t²))` via `K = π/(2·AGM(1, √(1-x²)))`.
pub fn elliptic_k(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain(format!("elliptic_k needs 0 ≤ x < 1, got {x}")));
    }
    let mut a = 1.0f64;
    let mut b = ((1.0 - x) * (1.0 + x)).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let na = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = na;
    }
    Ok(core::f64::consts::FRAC_PI_2 / a)
}

/// Lower and upper bounds on `K(x)` after `level` tightening steps.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EllipticBounds {
    pub x: f64,
    pub level: u8,
    pub lower: f64,
    pub upper: f64,
}

/// `∫₀¹ dt / ((c + d t)·√((1-t)(1-xt)))` for `c > 0`, `c + d > 0`, `0 < x < 1`.
fn log_kernel(c: f64, d: f64, x: f64) -> f64 {
    let p = (c + d) * (d + c * x);
    let b = -(c + d) * x - d - c * x;
    let sp = p.sqrt();
    let num = 2.0 * sp * d / c + 2.0 * p / c + b;
    (num / (d * (1.0 - x))).ln() / sp
}

/// `L_0, G_0, L_1, G_1, L_2, G_2` at `x`.
fn elliptic_levels(x: f64) -> [f64; 6] {
    let l0 = log_kernel(1.0, 1.0, x);
    let g0 = log_kernel(1.0, x, x);
    let l1 = 2.0 * log_kernel(2.0, 1.0 + x, x);
    let g1 = 0.5 * (l0 + g0);
    let r1 = -3.0 + 2.0 * core::f64::consts::SQRT_2;
    let r2 = -3.0 - 2.0 * core::f64::consts::SQRT_2;
    let w1 = (1.0 + r1) / (r1 - r2);
    let w2 = 1.0 - w1;
    let l2 = 4.0 * (w1 * log_kernel(1.0 - r1, 1.0 - r1 * x, x) + w2 * log_kernel(1.0 - r2, 1.0 - r2 * x, x));
    let g2 = 0.5 * (g1 + l1);
    [l0, g0, l1, g1, l2, g2]
}

/// Bounds `L_level ≤ K(x) ≤ G_level` for `0 < x < 1`, `level ∈ {0, 1, 2}`.
pub fn elliptic_bounds(x: f64, level: u8) -> Result<EllipticBounds> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("elliptic_bounds needs 0 < x < 1, got {x}")));
    }
    if level > 2 {
        return Err(Error::invalid(format!("level must be 0, 1 or 2, got {level}")));
    }
    let v = elliptic_levels(x);
    let i = 2 * level as usize;
    Ok(EllipticBounds {
        x,
        level,
        lower: v[i],
        upper: v[i + 1],
    })
}

/// `K(k) ≥ √(1/(2(1+k²)))·ln((1+c)/(1-c))`, `c = √((1+k²)/2)`.
pub fn elliptic_elementary_lower(k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::domain(format!("elliptic_elementary_lower needs 0 < k < 1, got {k}")));
    }
    let s = 1.0 + k * k;
    let c = (0.5 * s).sqrt();
    // 1 - c = (1 - c²)/(1 + c) = ((1-k)(1+k)/2)/(1 + c)
    let one_minus_c = 0.5 * (1.0 - k) * (1.0 + k) / (1.0 + c);
    Ok((1.0 / (2.0 * s)).sqrt() * ((1.0 + c) / one_minus_c).ln())
}

fn check_q(q: f64) -> Result<()> {
    if (0.0..1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::domain(format!("q must lie in [0, 1), got {q}")))
    }
}

/// `θ₃(z, q) = 1 + 2 Σ q^{k²} cos(2kz)`, summed until `2 q^{k²} < tail_tol`.
pub fn theta3(z: f64, q: f64, tail_tol: f64) -> Result<f64> {
    check_q(q)?;
    if !(tail_tol > 0.0) {
        return Err(Error::invalid("tail_tol must be positive"));
    }
    if q == 0.0 {
        return Ok(1.0);
    }
    let lq = q.ln();
    let mut acc = Accumulator::default();
    acc.add(1.0);
    let mut k = 1.0f64;
    loop {
        let t = 2.0 * (k * k * lq).exp();
        if t < tail_tol {
            break;
        }
        acc.add(t * (2.0 * k * z).cos());
        k += 1.0;
    }
    Ok(acc.value())
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThetaBound {
    /// `exp(-(q² + 2q)/(1 - q²))`; may underflow to 0.
    pub bound: f64,
    /// Natural log of the bound, exact even when `bound` underflows.
    pub log_bound: f64,
    pub log10_bound: f64,
}

/// Upper bound on the minimum `m(q) = θ₃(π/2, q)`.
pub fn theta_min_bound(q: f64) -> Result<ThetaBound> {
    check_q(q)?;
    let log_bound = -(q * q + 2.0 * q) / ((1.0 - q) * (1.0 + q));
    Ok(ThetaBound {
        bound: log_bound.exp(),
        log_bound,
        log10_bound: log_bound / core::f64::consts::LN_10,
    })
}

/// `ln m(q)` from the product `m(q) = Π (1 - q^{2n})(1 - q^{2n-1})²`,
/// usable where `m(q)` itself underflows.
pub fn theta_min_ln(q: f64) -> Result<f64> {
    check_q(q)?;
    let mut acc = Accumulator::default();
    let mut p = q;
    loop {
        // p = q^{2n-1}
        let even = p * q;
        acc.add(2.0 * (-p).ln_1p() + (-even).ln_1p());
        if even < 1e-20 {
            break;
        }
        p = even * q;
    }
    Ok(acc.value())
}
