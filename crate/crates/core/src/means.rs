//! Two-argument means: evaluation, complements, compound (iterative) means,
//! sampled axiom checks and the canonical text form used on the command line.
//!
//! A mean `M(x, y)` here is anything satisfying intermediacy, reflexivity,
//! homogeneity and monotonicity. Symmetry is not required; the weighted means
//! are deliberately asymmetric.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{ln_abs_expm1, ln_cosh, pow0, softplus};
use crate::sampling::{self, chunk_rng};

/// Below this `|α|` the power mean switches to its second-order series in α.
const POWER_SERIES_ALPHA: f64 = 1e-5;
/// Above this `|α|` the power mean is evaluated in the log domain.
const POWER_LOG_ALPHA: f64 = 50.0;
/// Input ratio beyond which evaluation moves to the log domain.
const LOG_DOMAIN_RANGE: f64 = 1e100;
/// Relative separation `|x-y|/max` below which Radó means use their series.
const RADO_SERIES_GAP: f64 = 1e-7;
/// Below this `|β|`, `R_β` is expanded about the identric mean.
const RADO_SERIES_BETA: f64 = 1e-5;

const ITER_REL_TOL: f64 = 4.0 * f64::EPSILON;
const ITER_MAX: usize = 200;

/// Relative tolerance for the sampled axiom checks.
pub const AXIOM_TOL: f64 = 1e-9;

/// Order of a power mean `M_α`, with the limit orders as explicit tags.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum PowerOrder {
    /// `α = -∞`: the minimum.
    NegInf,
    /// `α = 0`: the geometric mean.
    Geometric,
    /// Finite nonzero `α`.
    Finite(f64),
    /// `α = +∞`: the maximum.
    PosInf,
}

impl PowerOrder {
    /// Maps a real (or infinite) order onto its tag. `0` becomes
    /// [`PowerOrder::Geometric`].
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() {
            return Err(Error::invalid("power order is NaN"));
        }
        Ok(if alpha == f64::NEG_INFINITY {
            PowerOrder::NegInf
        } else if alpha == f64::INFINITY {
            PowerOrder::PosInf
        } else if alpha == 0.0 {
            PowerOrder::Geometric
        } else {
            PowerOrder::Finite(alpha)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            PowerOrder::NegInf => f64::NEG_INFINITY,
            PowerOrder::Geometric => 0.0,
            PowerOrder::Finite(a) => a,
            PowerOrder::PosInf => f64::INFINITY,
        }
    }

    /// The order of the complementary mean, `(M_α)* = M_{-α}`.
    pub fn negated(self) -> Self {
        match self {
            PowerOrder::NegInf => PowerOrder::PosInf,
            PowerOrder::PosInf => PowerOrder::NegInf,
            PowerOrder::Geometric => PowerOrder::Geometric,
            PowerOrder::Finite(a) => PowerOrder::Finite(-a),
        }
    }
}

/// Order of a Radó mean `R_β`, with its four exceptional orders tagged.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum RadoOrder {
    NegInf,
    /// `β = -1`: the logarithmic mean.
    Logarithmic,
    /// `β = 0`: the identric mean.
    Identric,
    /// Finite `β ∉ {-1, 0}`.
    Finite(f64),
    PosInf,
}

impl RadoOrder {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_nan() {
            return Err(Error::invalid("Radó order is NaN"));
        }
        Ok(if beta == f64::NEG_INFINITY {
            RadoOrder::NegInf
        } else if beta == f64::INFINITY {
            RadoOrder::PosInf
        } else if beta == -1.0 {
            RadoOrder::Logarithmic
        } else if beta == 0.0 {
            RadoOrder::Identric
        } else {
            RadoOrder::Finite(beta)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            RadoOrder::NegInf => f64::NEG_INFINITY,
            RadoOrder::Logarithmic => -1.0,
            RadoOrder::Identric => 0.0,
            RadoOrder::Finite(b) => b,
            RadoOrder::PosInf => f64::INFINITY,
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Strictly monotone generator of a quasi-arithmetic mean, with its inverse.
#[derive(Clone)]
pub struct MonotoneFn {
    label: String,
    forward: RealFn,
    inverse: RealFn,
    domain: (f64, f64),
}

impl MonotoneFn {
    /// Builds a generator after spot-checking strict monotonicity and the
    /// inverse round trip (relative `1e-10`) on a sample grid of the domain.
    pub fn new(
        label: impl Into<String>,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Result<Self> {
        let g = MonotoneFn {
            label: label.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            domain,
        };
        g.validate()?;
        Ok(g)
    }

    fn builtin(label: String, forward: RealFn, inverse: RealFn, domain: (f64, f64)) -> Self {
        MonotoneFn {
            label,
            forward,
            inverse,
            domain,
        }
    }

    /// `f(x) = x`; the quasi-arithmetic mean is the arithmetic mean.
    pub fn identity() -> Self {
        Self::builtin("id".into(), Arc::new(|x| x), Arc::new(|x| x), (0.0, f64::INFINITY))
    }

    /// `f(x) = ln x`; the quasi-arithmetic mean is the geometric mean.
    pub fn ln() -> Self {
        Self::builtin(
            "ln".into(),
            Arc::new(|x: f64| x.ln()),
            Arc::new(|y: f64| y.exp()),
            (f64::MIN_POSITIVE, f64::INFINITY),
        )
    }

    pub fn exp() -> Self {
        Self::builtin(
            "exp".into(),
            Arc::new(|x: f64| x.exp()),
            Arc::new(|y: f64| y.ln()),
            (0.0, 700.0),
        )
    }

    /// `f(x) = x^p`, `p != 0`; the quasi-arithmetic mean is `M_p`.
    pub fn power(p: f64) -> Result<Self> {
        if p == 0.0 || !p.is_finite() {
            return Err(Error::invalid("power generator needs a finite nonzero exponent"));
        }
        let lo = if p > 0.0 { 0.0 } else { f64::MIN_POSITIVE };
        Ok(Self::builtin(
            format!("pow:{p}"),
            Arc::new(move |x: f64| pow0(x, p)),
            Arc::new(move |y: f64| pow0(y, 1.0 / p)),
            (lo, f64::INFINITY),
        ))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn forward(&self, x: f64) -> f64 {
        (self.forward)(x)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (self.inverse)(y)
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 && x <= self.domain.1
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::invalid(format!("generator {}: empty domain", self.label)));
        }
        let grid = sample_grid(lo, hi, 64);
        let mut direction = 0.0;
        for w in grid.windows(2) {
            let (a, b) = (self.forward(w[0]), self.forward(w[1]));
            let step = b - a;
            if !(a.is_finite() && b.is_finite()) || step == 0.0 {
                return Err(Error::invalid(format!(
                    "generator {}: not strictly monotone near {}",
                    self.label, w[0]
                )));
            }
            if direction == 0.0 {
                direction = step.signum();
            } else if step.signum() != direction {
                return Err(Error::invalid(format!(
                    "generator {}: changes direction near {}",
                    self.label, w[0]
                )));
            }
        }
        for &x in &grid {
            let back = self.inverse(self.forward(x));
            if (back - x).abs() > 1e-10 * x.abs().max(1e-300) {
                return Err(Error::invalid(format!(
                    "generator {}: inverse round trip fails at {x}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

fn sample_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let a = if lo >= 0.0 { lo.max(1e-3) } else { lo.max(-1e3) };
    let b = hi.min(1e3);
    let (a, b) = if a < b { (a, b) } else { (lo, hi) };
    let log_ok = a > 0.0 && b / a > 10.0;
    (0..n)
        .map(|i| {
            // interior points only; open domains may blow up at their ends
            let t = (i as f64 + 0.5) / n as f64;
            if log_ok {
                (a.ln() + t * (b.ln() - a.ln())).exp()
            } else {
                a + t * (b - a)
            }
        })
        .collect()
}

impl fmt::Debug for MonotoneFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneFn")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

impl PartialEq for MonotoneFn {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.domain == other.domain
    }
}

/// The `h` function of a homogeneous symmetric mean, `M(x,y) = (x+y)·h(ln(y/x))`.
///
/// Wrapping an arbitrary `h` gives a candidate mean; [`check_axioms`] tells
/// whether it is one.
#[derive(Clone)]
pub struct ProfileFn {
    label: String,
    h: RealFn,
}

impl ProfileFn {
    pub fn new(label: impl Into<String>, h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ProfileFn {
            label: label.into(),
            h: Arc::new(h),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.h)(t)
    }
}

impl fmt::Debug for ProfileFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileFn").field("label", &self.label).finish()
    }
}

impl PartialEq for ProfileFn {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

/// A two-argument mean from the catalog.
#[derive(Clone, Debug, PartialEq)]
pub enum MeanKind {
    Power(PowerOrder),
    Rado(RadoOrder),
    /// Gini mean `((x^u + y^u)/(x^v + y^v))^{1/(u-v)}`.
    Gini { u: f64, v: f64 },
    /// Lehmer mean `(x^{u+1} + y^{u+1})/(x^u + y^u)`.
    Lehmer(f64),
    /// `w·x + (1-w)·y`.
    WeightedArithmetic(f64),
    /// `x^w · y^{1-w}`.
    WeightedGeometric(f64),
    QuasiArithmetic(MonotoneFn),
    /// Common limit of `x ← M(x,y), y ← N(x,y)`.
    Iterative(Box<MeanKind>, Box<MeanKind>),
    /// `M*(x,y) = xy / M(x,y)`.
    Complementary(Box<MeanKind>),
    Min,
    Max,
    Profile(ProfileFn),
}

impl MeanKind {
    pub fn power(alpha: f64) -> Result<Self> {
        PowerOrder::new(alpha).map(MeanKind::Power)
    }

    pub fn rado(beta: f64) -> Result<Self> {
        RadoOrder::new(beta).map(MeanKind::Rado)
    }

    pub fn arithmetic() -> Self {
        MeanKind::Power(PowerOrder::Finite(1.0))
    }

    pub fn geometric() -> Self {
        MeanKind::Power(PowerOrder::Geometric)
    }

    pub fn harmonic() -> Self {
        MeanKind::Power(PowerOrder::Finite(-1.0))
    }

    /// Gauss's arithmetic–geometric mean.
    pub fn agm() -> Self {
        MeanKind::Iterative(Box::new(Self::arithmetic()), Box::new(Self::geometric()))
    }

    pub fn complement(self) -> Self {
        MeanKind::Complementary(Box::new(self))
    }

    /// Structural symmetry `M(x,y) = M(y,x)`. Profile means are assumed
    /// symmetric (their `h` is expected to be even).
    pub fn is_symmetric(&self) -> bool {
        match self {
            MeanKind::WeightedArithmetic(w) | MeanKind::WeightedGeometric(w) => *w == 0.5,
            MeanKind::Iterative(m, n) => m.is_symmetric() && n.is_symmetric(),
            MeanKind::Complementary(m) => m.is_symmetric(),
            _ => true,
        }
    }

    /// Whether the mean extends continuously to a zero argument.
    pub fn admits_zero(&self) -> bool {
        match self {
            MeanKind::Power(o) => match o {
                PowerOrder::NegInf | PowerOrder::PosInf | PowerOrder::Geometric => true,
                PowerOrder::Finite(a) => *a > 0.0,
            },
            MeanKind::Rado(o) => match o {
                RadoOrder::NegInf | RadoOrder::PosInf => true,
                RadoOrder::Logarithmic | RadoOrder::Identric => false,
                RadoOrder::Finite(b) => *b > 0.0,
            },
            MeanKind::Gini { u, v } => u.min(*v) >= 0.0,
            MeanKind::Lehmer(u) => *u >= 0.0,
            MeanKind::WeightedArithmetic(_)
            | MeanKind::WeightedGeometric(_)
            | MeanKind::Min
            | MeanKind::Max => true,
            MeanKind::QuasiArithmetic(g) => g.contains(0.0),
            MeanKind::Iterative(m, n) => m.admits_zero() && n.admits_zero(),
            MeanKind::Complementary(_) | MeanKind::Profile(_) => false,
        }
    }
}

/// Evaluates `M(x, y)` for `x, y ≥ 0`.
///
/// Zero arguments are accepted only by kinds that extend continuously to
/// them (see [`MeanKind::admits_zero`]); log-type and negative-exponent
/// kinds need strictly positive inputs.
pub fn eval_mean(kind: &MeanKind, x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 {
        return Err(Error::domain(format!("{kind}: inputs must be finite and ≥ 0, got ({x}, {y})")));
    }
    if (x == 0.0 || y == 0.0) && !kind.admits_zero() {
        return Err(Error::domain(format!("{kind}: needs strictly positive inputs, got ({x}, {y})")));
    }
    if x == y && !matches!(kind, MeanKind::Profile(_)) {
        return Ok(x);
    }
    let v = eval_unchecked(kind, x, y)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{kind} at ({x}, {y})")))
    }
}

fn eval_unchecked(kind: &MeanKind, x: f64, y: f64) -> Result<f64> {
    Ok(match kind {
        MeanKind::Power(o) => power_mean(*o, x, y),
        MeanKind::Rado(o) => rado_mean(*o, x, y),
        MeanKind::Gini { u, v } => gini_mean(*u, *v, x, y),
        MeanKind::Lehmer(u) => gini_mean(u + 1.0, *u, x, y),
        MeanKind::WeightedArithmetic(w) => {
            check_weight(*w)?;
            w * x + (1.0 - w) * y
        }
        MeanKind::WeightedGeometric(w) => {
            check_weight(*w)?;
            if *w == 1.0 {
                x
            } else if *w == 0.0 {
                y
            } else if x == 0.0 || y == 0.0 {
                0.0
            } else {
                (w * x.ln() + (1.0 - w) * y.ln()).exp()
            }
        }
        MeanKind::QuasiArithmetic(g) => {
            if !(g.contains(x) && g.contains(y)) {
                return Err(Error::domain(format!(
                    "generator {} undefined at ({x}, {y})",
                    g.label()
                )));
            }
            g.inverse(0.5 * (g.forward(x) + g.forward(y)))
        }
        MeanKind::Iterative(m, n) => iterate_raw(m, n, x, y, ITER_REL_TOL, ITER_MAX)?.value,
        MeanKind::Complementary(inner) => {
            let m = eval_mean(inner, x, y)?;
            if m <= 0.0 {
                return Err(Error::domain(format!("{inner} vanished at ({x}, {y})")));
            }
            x * (y / m)
        }
        MeanKind::Min => x.min(y),
        MeanKind::Max => x.max(y),
        MeanKind::Profile(h) => (x + y) * h.eval(ln_ratio(y, x)),
    })
}

fn check_weight(w: f64) -> Result<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(Error::domain(format!("weight {w} outside [0, 1]")))
    }
}

/// `ln(a/b)` for positive `a, b`, accurate when `a ≈ b`.
fn ln_ratio(a: f64, b: f64) -> f64 {
    let r = a / b;
    if r > 0.5 && r < 2.0 {
        ((a - b) / b).ln_1p()
    } else {
        a.ln() - b.ln()
    }
}

fn power_mean(order: PowerOrder, x: f64, y: f64) -> f64 {
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    match order {
        PowerOrder::NegInf => lo,
        PowerOrder::PosInf => hi,
        PowerOrder::Geometric => lo.sqrt() * hi.sqrt(),
        PowerOrder::Finite(a) => {
            if lo == 0.0 {
                // a > 0 here; a < 0 was rejected by the domain check
                return hi * (0.5).powf(1.0 / a);
            }
            let m = 0.5 * (x.ln() + y.ln());
            let d = 0.5 * ln_ratio(hi, lo);
            if a.abs() < POWER_SERIES_ALPHA && (a * d).abs() < 1e-3 {
                let d2 = d * d;
                (m + 0.5 * a * d2 - a * a * a * d2 * d2 / 12.0).exp()
            } else if a.abs() > POWER_LOG_ALPHA || hi / lo > LOG_DOMAIN_RANGE {
                (m + ln_cosh(a * d) / a).exp()
            } else if a > 0.0 {
                hi * ((1.0 + (lo / hi).powf(a)) * 0.5).powf(1.0 / a)
            } else {
                lo * ((1.0 + (hi / lo).powf(a)) * 0.5).powf(1.0 / a)
            }
        }
    }
}

/// Second-order expansion of `R_β` about the diagonal:
/// `R_β ≈ m·(1 + (β-1)·ε²/6)` with `m = (x+y)/2`, `ε = (y-x)/(y+x)`.
fn rado_series(beta: f64, x: f64, y: f64) -> f64 {
    let m = 0.5 * (x + y);
    let eps = (y - x) / (y + x);
    m * (1.0 + (beta - 1.0) * eps * eps / 6.0)
}

/// `ln(R_β/hi)` to second order in `β`, written through the derivatives of
/// `φ(p) = ln((1 - r^p)/(p(1 - r)))` at `p = 1`; `φ(1 + β)/β` is the exact value.
fn rado_identric_expansion(b: f64, r: f64, lr: f64) -> f64 {
    let q = 1.0 - r;
    let d1 = -lr * r / q - 1.0;
    let d2 = 1.0 - lr * lr * r / (q * q);
    let d3 = -lr * lr * lr * r * (1.0 + r) / (q * q * q) - 2.0;
    d1 + b * d2 / 2.0 + b * b * d3 / 6.0
}

fn rado_mean(order: RadoOrder, x: f64, y: f64) -> f64 {
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let near = (hi - lo) / hi < RADO_SERIES_GAP;
    match order {
        RadoOrder::NegInf => lo,
        RadoOrder::PosInf => hi,
        RadoOrder::Logarithmic => {
            if near {
                rado_series(-1.0, x, y)
            } else {
                (hi - lo) / ln_ratio(hi, lo)
            }
        }
        RadoOrder::Identric => {
            if near {
                rado_series(0.0, x, y)
            } else {
                // ln I = ln lo - 1 + hi·ln(hi/lo)/(hi-lo)
                (lo.ln() - 1.0 + hi * ln_ratio(hi, lo) / (hi - lo)).exp()
            }
        }
        RadoOrder::Finite(b) => {
            let p = b + 1.0;
            if lo == 0.0 {
                // b > 0
                return hi * (1.0 / p).powf(1.0 / b);
            }
            if near {
                return rado_series(b, x, y);
            }
            if p == 0.0 {
                return (hi - lo) / ln_ratio(hi, lo);
            }
            // R = hi·[(1 - r^p)/(p(1 - r))]^{1/b},  r = lo/hi
            let lr = -ln_ratio(hi, lo);
            if b.abs() < RADO_SERIES_BETA {
                return (hi.ln() + rado_identric_expansion(b, lo / hi, lr)).exp();
            }
            let ln_num = ln_abs_expm1(p * lr) - p.abs().ln();
            let ln_den = ln_abs_expm1(lr);
            (hi.ln() + (ln_num - ln_den) / b).exp()
        }
    }
}

fn gini_mean(u: f64, v: f64, x: f64, y: f64) -> f64 {
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    if u == v {
        if u == 0.0 {
            return lo.sqrt() * hi.sqrt();
        }
        if lo == 0.0 {
            return hi;
        }
        // exp of the x^u-weighted average of ln x, ln y
        let (lx, ly) = (x.ln(), y.ln());
        let wx = 1.0 / (1.0 + (u * (ly - lx)).exp());
        return (wx * lx + (1.0 - wx) * ly).exp();
    }
    if lo == 0.0 {
        let num = pow0(0.0, u) + 1.0;
        let den = pow0(0.0, v) + 1.0;
        return hi * (num / den).powf(1.0 / (u - v));
    }
    let lr = -ln_ratio(hi, lo);
    (hi.ln() + (softplus(u * lr) - softplus(v * lr)) / (u - v)).exp()
}

/// `M(x,y)` together with `M*(x,y)`, extending `M*` continuously where an
/// argument vanishes.
pub(crate) fn mean_and_complement(kind: &MeanKind, x: f64, y: f64) -> Result<(f64, f64)> {
    let m = eval_mean(kind, x, y)?;
    if x > 0.0 && y > 0.0 {
        return Ok((m, x * (y / m)));
    }
    if m > 0.0 || (x == 0.0 && y == 0.0) {
        return Ok((m, 0.0));
    }
    // M(x,y) = 0 with exactly one zero argument: M* tends either to the
    // other argument (min-like kinds) or to 0 (geometric-like kinds).
    // Probe the limit along two vanishing arguments.
    let other = x.max(y);
    let probe = |eps: f64| -> Result<f64> {
        let (px, py) = if x == 0.0 { (eps * other, other) } else { (other, eps * other) };
        let pm = eval_mean(kind, px, py)?;
        Ok(px * (py / pm))
    };
    let (c1, c2) = (probe(1e-100)?, probe(1e-200)?);
    if c2 <= 1e-40 * other && c2 <= c1 {
        Ok((m, 0.0))
    } else if (c1 - other).abs() <= 1e-9 * other && (c2 - other).abs() <= 1e-9 * other {
        Ok((m, other))
    } else {
        Err(Error::domain(format!("{kind}: complementary mean has no limit at ({x}, {y})")))
    }
}

/// `M*(x,y) = xy / M(x,y)` for strictly positive inputs.
pub fn complementary_eval(inner: &MeanKind, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::domain(format!("complementary mean needs x, y > 0, got ({x}, {y})")));
    }
    let m = eval_mean(inner, x, y)?;
    if m <= 0.0 {
        return Err(Error::domain(format!("{inner} vanished at ({x}, {y})")));
    }
    Ok(x * (y / m))
}

/// Result of a compound-mean iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IteratedMean {
    pub value: f64,
    pub iterations: usize,
}

/// Runs `x ← M(x,y), y ← N(x,y)` from `(x0, y0)` until
/// `|x - y| ≤ rel_tol·max(x, y)`.
pub fn iterate_mean(
    m: &MeanKind,
    n: &MeanKind,
    x0: f64,
    y0: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<IteratedMean> {
    if !(x0 > 0.0 && y0 > 0.0 && x0.is_finite() && y0.is_finite()) {
        return Err(Error::domain(format!("iterate_mean needs x0, y0 > 0, got ({x0}, {y0})")));
    }
    if !(rel_tol > 0.0) || max_iter == 0 {
        return Err(Error::invalid("iterate_mean needs rel_tol > 0 and max_iter ≥ 1"));
    }
    iterate_raw(m, n, x0, y0, rel_tol, max_iter)
}

fn iterate_raw(
    m: &MeanKind,
    n: &MeanKind,
    x0: f64,
    y0: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<IteratedMean> {
    let (mut x, mut y) = (x0, y0);
    for iterations in 0..=max_iter {
        if (x - y).abs() <= rel_tol * x.max(y) {
            return Ok(IteratedMean {
                value: 0.5 * (x + y),
                iterations,
            });
        }
        if iterations == max_iter {
            break;
        }
        let nx = eval_mean(m, x, y)?;
        let ny = eval_mean(n, x, y)?;
        if nx == x && ny == y {
            break;
        }
        // one sequence pinned at zero while the other shrinks: the common
        // limit can only be zero
        if (y == 0.0 && ny == 0.0 && nx < x) || (x == 0.0 && nx == 0.0 && ny < y) {
            return Ok(IteratedMean {
                value: 0.0,
                iterations: iterations + 1,
            });
        }
        x = nx;
        y = ny;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        gap: (x - y).abs(),
    })
}

/// Weighted n-ary quasi-arithmetic mean `f⁻¹(Σ p_k f(x_k))`, `Σ p_k = 1`.
pub fn quasi_arithmetic_nary(g: &MonotoneFn, xs: &[f64], weights: &[f64]) -> Result<f64> {
    if xs.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: weights.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::invalid("quasi-arithmetic mean of an empty list"));
    }
    if weights.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::domain("weights must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("weights sum to {total}, not 1")));
    }
    if let Some(&bad) = xs.iter().find(|&&x| !g.contains(x)) {
        return Err(Error::domain(format!("generator {} undefined at {bad}", g.label())));
    }
    let s: f64 = xs.iter().zip(weights).map(|(&x, &p)| p * g.forward(x)).sum();
    Ok(g.inverse(s))
}

/// A sampled input on which an axiom failed.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AxiomViolation {
    pub inputs: Vec<f64>,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AxiomReport {
    pub intermediacy_violations: Vec<AxiomViolation>,
    pub reflexivity_violations: Vec<AxiomViolation>,
    pub homogeneity_violations: Vec<AxiomViolation>,
    pub monotonicity_violations: Vec<AxiomViolation>,
    pub samples_used: usize,
    pub seed: u64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.intermediacy_violations.is_empty()
            && self.reflexivity_violations.is_empty()
            && self.homogeneity_violations.is_empty()
            && self.monotonicity_violations.is_empty()
    }

    /// Appends a later chunk's findings.
    pub fn merge(&mut self, other: AxiomReport) {
        self.intermediacy_violations.extend(other.intermediacy_violations);
        self.reflexivity_violations.extend(other.reflexivity_violations);
        self.homogeneity_violations.extend(other.homogeneity_violations);
        self.monotonicity_violations.extend(other.monotonicity_violations);
        self.samples_used += other.samples_used;
    }
}

/// Samples the four mean axioms on `samples` log-uniform pairs from
/// `[1e-3, 1e3]`, recording every violation beyond relative `1e-9`.
pub fn check_axioms(kind: &MeanKind, samples: usize, seed: u64) -> Result<AxiomReport> {
    if samples == 0 {
        return Err(Error::invalid("check_axioms needs samples ≥ 1"));
    }
    let mut report = AxiomReport {
        seed,
        ..AxiomReport::default()
    };
    for (chunk, len) in sampling::chunks(samples) {
        report.merge(check_axioms_chunk(kind, seed, chunk, len)?);
    }
    Ok(report)
}

/// One chunk of [`check_axioms`]; merging chunks in order reproduces the
/// serial report exactly.
pub fn check_axioms_chunk(kind: &MeanKind, seed: u64, chunk: u64, len: usize) -> Result<AxiomReport> {
    let mut rng = chunk_rng(seed, chunk);
    let mut r = AxiomReport {
        seed,
        samples_used: len,
        ..AxiomReport::default()
    };
    let tol = AXIOM_TOL;
    for _ in 0..len {
        let x = sampling::log_uniform(&mut rng, 1e-3, 1e3);
        let y = sampling::log_uniform(&mut rng, 1e-3, 1e3);
        let a = sampling::log_uniform(&mut rng, 1e-2, 1e2);
        let dx = sampling::uniform(&mut rng, 0.0, 1.0);
        let dy = sampling::uniform(&mut rng, 0.0, 1.0);

        let m = eval_mean(kind, x, y)?;
        let (lo, hi) = (x.min(y), x.max(y));
        if m < lo * (1.0 - tol) {
            r.intermediacy_violations.push(AxiomViolation { inputs: [x, y].into(), observed: m, bound: lo });
        } else if m > hi * (1.0 + tol) {
            r.intermediacy_violations.push(AxiomViolation { inputs: [x, y].into(), observed: m, bound: hi });
        }

        let mxx = eval_mean(kind, x, x)?;
        if (mxx - x).abs() > tol * x {
            r.reflexivity_violations.push(AxiomViolation { inputs: [x, x].into(), observed: mxx, bound: x });
        }

        let scaled = eval_mean(kind, a * x, a * y)?;
        if (scaled - a * m).abs() > tol * (a * m).abs() {
            r.homogeneity_violations.push(AxiomViolation {
                inputs: [x, y, a].into(),
                observed: scaled,
                bound: a * m,
            });
        }

        let (x2, y2) = (x * (1.0 + dx), y * (1.0 + dy));
        for (xi, yi) in [(x2, y), (x, y2)] {
            let mi = eval_mean(kind, xi, yi)?;
            if mi < m * (1.0 - tol) {
                r.monotonicity_violations.push(AxiomViolation {
                    inputs: [x, y, xi, yi].into(),
                    observed: mi,
                    bound: m,
                });
            }
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Canonical text form
// ---------------------------------------------------------------------------

struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanKind::Power(o) => write!(f, "power:{}", Num(o.value())),
            MeanKind::Rado(o) => write!(f, "rado:{}", Num(o.value())),
            MeanKind::Gini { u, v } => write!(f, "gini:{}:{}", Num(*u), Num(*v)),
            MeanKind::Lehmer(u) => write!(f, "lehmer:{}", Num(*u)),
            MeanKind::WeightedArithmetic(w) => write!(f, "warith:{}", Num(*w)),
            MeanKind::WeightedGeometric(w) => write!(f, "wgeom:{}", Num(*w)),
            MeanKind::QuasiArithmetic(g) => write!(f, "qa:{}", g.label()),
            MeanKind::Iterative(m, n) => write!(f, "iter({m},{n})"),
            MeanKind::Complementary(m) => write!(f, "compl({m})"),
            MeanKind::Min => f.write_str("min"),
            MeanKind::Max => f.write_str("max"),
            MeanKind::Profile(h) => write!(f, "profile({})", h.label()),
        }
    }
}

fn parse_num(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = if let Some((a, b)) = s.split_once('/') {
        let (a, b) = (parse_plain(a)?, parse_plain(b)?);
        a / b
    } else {
        parse_plain(s)?
    };
    if v.is_nan() {
        return Err(Error::invalid(format!("not a number: {s:?}")));
    }
    Ok(v)
}

fn parse_plain(s: &str) -> Result<f64> {
    let s = s.trim();
    match s {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::invalid(format!("bad number {s:?}"))),
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{what} must be finite")))
    }
}

/// Splits `a,b` at the top-level comma.
fn split_pair(s: &str) -> Result<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Ok((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    Err(Error::invalid(format!("expected two comma-separated means in {s:?}")))
}

fn parse_generator(s: &str) -> Result<MonotoneFn> {
    match s {
        "id" => Ok(MonotoneFn::identity()),
        "ln" => Ok(MonotoneFn::ln()),
        "exp" => Ok(MonotoneFn::exp()),
        _ => match s.strip_prefix("pow:") {
            Some(p) => MonotoneFn::power(parse_num(p)?),
            None => Err(Error::invalid(format!("unknown generator {s:?}"))),
        },
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("compl(").and_then(|r| r.strip_suffix(')')) {
            return Ok(MeanKind::Complementary(Box::new(inner.parse()?)));
        }
        if let Some(inner) = s.strip_prefix("iter(").and_then(|r| r.strip_suffix(')')) {
            let (a, b) = split_pair(inner)?;
            return Ok(MeanKind::Iterative(Box::new(a.parse()?), Box::new(b.parse()?)));
        }
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let weight = |r: &str| -> Result<f64> {
            let w = parse_num(r)?;
            check_weight(w)?;
            Ok(w)
        };
        match (head, rest) {
            ("min", None) => Ok(MeanKind::Min),
            ("max", None) => Ok(MeanKind::Max),
            ("power", Some(r)) => MeanKind::power(parse_num(r)?),
            ("rado", Some(r)) => MeanKind::rado(parse_num(r)?),
            ("lehmer", Some(r)) => Ok(MeanKind::Lehmer(finite(parse_num(r)?, "Lehmer order")?)),
            ("gini", Some(r)) => {
                let (u, v) = r
                    .split_once(':')
                    .ok_or_else(|| Error::invalid("gini needs gini:<u>:<v>"))?;
                Ok(MeanKind::Gini {
                    u: finite(parse_num(u)?, "Gini u")?,
                    v: finite(parse_num(v)?, "Gini v")?,
                })
            }
            ("warith", Some(r)) => Ok(MeanKind::WeightedArithmetic(weight(r)?)),
            ("wgeom", Some(r)) => Ok(MeanKind::WeightedGeometric(weight(r)?)),
            ("qa", Some(r)) => Ok(MeanKind::QuasiArithmetic(parse_generator(r)?)),
            _ => Err(Error::invalid(format!("unknown mean {s:?}"))),
        }
    }
}

impl From<PowerOrder> for MeanKind {
    fn from(o: PowerOrder) -> Self {
        MeanKind::Power(o)
    }
}

impl From<RadoOrder> for MeanKind {
    fn from(o: RadoOrder) -> Self {
        MeanKind::Rado(o)
    }
}

/// Canonical text form, e.g. `power:0.5` or `iter(power:1,power:0)`.
pub fn to_text(kind: &MeanKind) -> String {
    kind.to_string()
}
