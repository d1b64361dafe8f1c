//! Integral and Jackson q-integral forms of the mean refinement.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::chain::{RefinementChain, CHAIN_TOL};
use crate::error::{Error, Result};
use crate::expr::ExprAst;
use crate::math::Accumulator;
use crate::means::{mean_and_complement, MeanKind};
use crate::quadrature::{integrate, integrate_by_sign, QuadResult, QuadratureSpec};

type EvalFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A labelled real function of one variable.
#[derive(Clone)]
pub struct Integrand {
    label: String,
    eval: EvalFn,
}

impl Integrand {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Integrand {
            label: label.into(),
            eval: Arc::new(move |x| Ok(f(x))),
        }
    }

    pub fn fallible(label: impl Into<String>, f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Integrand {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    pub fn from_expr(ast: ExprAst) -> Self {
        let label = ast.unparse();
        Integrand {
            label,
            eval: Arc::new(move |x| ast.eval(x).map_err(Error::from)),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_expr(crate::expr::parse(text)?))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        (self.eval)(x)
    }
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Integrand({})", self.label)
    }
}

/// The five integrals behind an integral chain, with their error estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChainIntegrals {
    pub fg: QuadResult,
    pub mean_sq: QuadResult,
    pub complement_sq: QuadResult,
    pub f_sq: QuadResult,
    pub g_sq: QuadResult,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IntegralChain {
    pub chain: RefinementChain,
    pub integrals: ChainIntegrals,
    /// Propagated quadrature error of each chain member (lower, middle, upper).
    pub member_errors: [f64; 3],
}

fn product_error(a: &QuadResult, b: &QuadResult) -> f64 {
    a.value.abs() * b.error + b.value.abs() * a.error + a.error * b.error
}

fn assemble(integrals: ChainIntegrals) -> IntegralChain {
    let ChainIntegrals {
        fg,
        mean_sq,
        complement_sq,
        f_sq,
        g_sq,
    } = integrals;
    let lower = fg.value * fg.value;
    let middle = mean_sq.value * complement_sq.value;
    let upper = f_sq.value * g_sq.value;
    let errors = [
        product_error(&fg, &fg),
        product_error(&mean_sq, &complement_sq),
        product_error(&f_sq, &g_sq),
    ];
    let allow = 4.0 * (errors[0] + errors[1] + errors[2]);
    IntegralChain {
        chain: RefinementChain::with_tolerance(lower, middle, upper, CHAIN_TOL, allow),
        integrals,
        member_errors: errors,
    }
}

/// `(∫fg)² ≤ ∫M(f,g)²·∫M*(f,g)² ≤ ∫f²·∫g²` on `[quad.a, quad.b]`.
///
/// Verdicts allow `1e-9·scale` plus four times the propagated quadrature
/// error. Negative samples of `f` or `g` surface as domain errors.
pub fn integral_refine(kind: &MeanKind, f: &Integrand, g: &Integrand, quad: &QuadratureSpec) -> Result<RefinementChain> {
    integral_refine_report(kind, f, g, quad).map(|r| r.chain)
}

/// [`integral_refine`] with the underlying integrals and error estimates.
pub fn integral_refine_report(
    kind: &MeanKind,
    f: &Integrand,
    g: &Integrand,
    quad: &QuadratureSpec,
) -> Result<IntegralChain> {
    let pair = |x: f64| -> Result<(f64, f64)> {
        let (u, v) = (f.eval(x)?, g.eval(x)?);
        if u < 0.0 || v < 0.0 {
            return Err(Error::domain(format!("negative integrand at {x}: f = {u}, g = {v}")));
        }
        Ok((u, v))
    };
    let fg = integrate(quad, &|x| pair(x).map(|(u, v)| u * v))?;
    let mean_sq = integrate(quad, &|x| {
        let (u, v) = pair(x)?;
        let (m, _) = mean_and_complement(kind, u, v)?;
        Ok(m * m)
    })?;
    let complement_sq = integrate(quad, &|x| {
        let (u, v) = pair(x)?;
        let (_, c) = mean_and_complement(kind, u, v)?;
        Ok(c * c)
    })?;
    let f_sq = integrate(quad, &|x| pair(x).map(|(u, _)| u * u))?;
    let g_sq = integrate(quad, &|x| pair(x).map(|(_, v)| v * v))?;
    Ok(assemble(ChainIntegrals {
        fg,
        mean_sq,
        complement_sq,
        f_sq,
        g_sq,
    }))
}

/// Gap between the outer and max–min members and its product form.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapIdentity {
    /// `∫f²·∫g² - ∫max(f,g)²·∫min(f,g)²`.
    pub gap: f64,
    /// `∫_{f≥g}(f² - g²) · ∫_{f<g}(g² - f²)`.
    pub product: f64,
    pub residual: f64,
    /// Combined quadrature error estimate of `gap` and `product`.
    pub error_estimate: f64,
    pub breakpoints: alloc::vec::Vec<f64>,
}

/// Evaluates both sides of the max–min gap identity. `f` and `g` may take
/// either sign.
pub fn minmax_gap_identity(f: &Integrand, g: &Integrand, quad: &QuadratureSpec) -> Result<GapIdentity> {
    let parts = minmax_integrals(f, g, quad)?;
    let upper = parts.f_sq.value * parts.g_sq.value;
    let middle = parts.mean_sq.value * parts.complement_sq.value;
    let gap = upper - middle;
    let gap_err = product_error(&parts.f_sq, &parts.g_sq) + product_error(&parts.mean_sq, &parts.complement_sq);

    let regions = integrate_by_sign(
        quad,
        &|x| Ok(f.eval(x)? - g.eval(x)?),
        &|x| {
            let (u, v) = (f.eval(x)?, g.eval(x)?);
            Ok(u * u - v * v)
        },
    )?;
    let pos = regions.nonnegative;
    let neg = regions.negative;
    let product = pos.value * (-neg.value);
    let prod_err = pos.value.abs() * neg.error + neg.value.abs() * pos.error + pos.error * neg.error;
    Ok(GapIdentity {
        gap,
        product,
        residual: (gap - product).abs(),
        error_estimate: gap_err + prod_err,
        breakpoints: regions.breakpoints,
    })
}

fn minmax_integrals(f: &Integrand, g: &Integrand, quad: &QuadratureSpec) -> Result<ChainIntegrals> {
    let both = |x: f64| -> Result<(f64, f64)> { Ok((f.eval(x)?, g.eval(x)?)) };
    Ok(ChainIntegrals {
        fg: integrate(quad, &|x| both(x).map(|(u, v)| u * v))?,
        mean_sq: integrate(quad, &|x| both(x).map(|(u, v)| u.max(v).powi(2)))?,
        complement_sq: integrate(quad, &|x| both(x).map(|(u, v)| u.min(v).powi(2)))?,
        f_sq: integrate(quad, &|x| both(x).map(|(u, _)| u * u))?,
        g_sq: integrate(quad, &|x| both(x).map(|(_, v)| v * v))?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Direction {
    /// `f + g ≥ 0` everywhere sampled: `lower ≤ middle ≤ upper` expected.
    Forward,
    /// `f + g ≤ 0` everywhere sampled: `lower ≥ middle ≥ upper` expected.
    Reversed,
    /// `f + g` changes sign; no verdict.
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SignedChain {
    /// Members of the max–min chain; its verdict flags test the forward order.
    pub chain: RefinementChain,
    pub direction: Direction,
    /// Whether the chain holds in the order `direction` asks for.
    pub verdict: Option<bool>,
    pub quad_error: f64,
}

/// Samples of `f + g` used to pick the direction.
const DIRECTION_SAMPLES: usize = 4096;

/// The max–min chain for functions of arbitrary sign.
///
/// Note that the members are invariant under `(f, g) → (-f, -g)`, so a
/// reversed verdict can only hold when all three members coincide.
pub fn minmax_refine_signed(f: &Integrand, g: &Integrand, quad: &QuadratureSpec) -> Result<SignedChain> {
    let (mut nonneg, mut nonpos) = (true, true);
    for i in 0..=DIRECTION_SAMPLES {
        let x = if i == DIRECTION_SAMPLES {
            quad.b
        } else {
            quad.a + (quad.b - quad.a) * i as f64 / DIRECTION_SAMPLES as f64
        };
        let s = f.eval(x)? + g.eval(x)?;
        nonneg &= s >= 0.0;
        nonpos &= s <= 0.0;
    }
    let direction = if nonneg {
        Direction::Forward
    } else if nonpos {
        Direction::Reversed
    } else {
        Direction::Indeterminate
    };
    let report = assemble(minmax_integrals(f, g, quad)?);
    let c = report.chain;
    let allow = CHAIN_TOL * c.scale() + 4.0 * report.member_errors.iter().sum::<f64>();
    let verdict = match direction {
        Direction::Forward => Some(c.holds()),
        Direction::Reversed => Some(c.lower + allow >= c.middle && c.middle + allow >= c.upper),
        Direction::Indeterminate => None,
    };
    Ok(SignedChain {
        chain: c,
        direction,
        verdict,
        quad_error: report.member_errors.iter().sum(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct JacksonResult {
    pub value: f64,
    /// Number of lattice points `q^0, …, q^{N}` summed.
    pub terms_used: usize,
    /// `M_f·q^{N+1}`, the bound on the neglected tail.
    pub tail_bound: f64,
    pub sup_estimate: f64,
}

/// Probe points `2^{-j}` used to estimate `sup|f|` and detect blow-up at 0.
fn probe_sup(f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut sup = 0.0f64;
    let mut at = [0.0f64; 3];
    for j in 0..=60 {
        let t = (0.5f64).powi(j);
        let v = f(t)?.abs();
        if !v.is_finite() {
            return Err(Error::DivergentSeries(format!("integrand is not finite at {t}")));
        }
        sup = sup.max(v);
        match j {
            10 => at[0] = v,
            40 => at[1] = v,
            60 => at[2] = v,
            _ => {}
        }
    }
    let base = at[0].max(1.0);
    if at[2] > 1e6 * base && at[2] > at[1] && at[1] > at[0] {
        return Err(Error::DivergentSeries("integrand grows without bound as t → 0⁺".into()));
    }
    Ok(sup)
}

fn check_q(q: f64, tail_tol: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("q must lie in (0, 1), got {q}")));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::invalid("tail_tol must be positive"));
    }
    Ok(())
}

/// Smallest `N` with `sup·q^{N+1} ≤ tail_tol`.
fn terms_for(sup: f64, q: f64, tail_tol: f64) -> usize {
    if sup <= tail_tol {
        return 0;
    }
    let n = ((tail_tol / sup).ln() / q.ln()).ceil() - 1.0;
    n.max(0.0) as usize
}

/// Jackson integral `(1-q)·Σ_k f(q^k) q^k`, truncated once the tail bound
/// `sup|f|·q^{N+1}` drops below `tail_tol`.
pub fn jackson_integral(f: &Integrand, q: f64, tail_tol: f64) -> Result<JacksonResult> {
    check_q(q, tail_tol)?;
    let mut sup = probe_sup(&|t| f.eval(t))?;
    let mut n = terms_for(sup, q, tail_tol);
    let mut acc = Accumulator::default();
    let mut k = 0usize;
    let mut qk = 1.0f64;
    while k <= n {
        let v = f.eval(qk)?;
        if v.abs() > sup {
            sup = v.abs();
            n = terms_for(sup, q, tail_tol);
        }
        acc.add(v * qk);
        k += 1;
        qk *= q;
    }
    Ok(JacksonResult {
        value: (1.0 - q) * acc.value(),
        terms_used: n + 1,
        tail_bound: sup * q.powi((n + 1) as i32),
        sup_estimate: sup,
    })
}

/// The refinement chain with every integral replaced by the Jackson
/// q-integral on `(0, 1]`; upper member `∫f² d_q t · ∫g² d_q t`.
pub fn jackson_refine(kind: &MeanKind, f: &Integrand, g: &Integrand, q: f64, tail_tol: f64) -> Result<RefinementChain> {
    check_q(q, tail_tol)?;
    let sf = probe_sup(&|t| f.eval(t))?;
    let sg = probe_sup(&|t| g.eval(t))?;
    // every integrand below is bounded by max(f, g)²
    let mut sup = sf.max(sg).powi(2);
    let mut n = terms_for(sup, q, tail_tol);
    let mut sums = [Accumulator::default(); 5];
    let mut k = 0usize;
    let mut qk = 1.0f64;
    while k <= n {
        let (u, v) = (f.eval(qk)?, g.eval(qk)?);
        if u < 0.0 || v < 0.0 {
            return Err(Error::domain(format!("negative value on the q-lattice at {qk}")));
        }
        let b = u.max(v).powi(2);
        if b > sup {
            sup = b;
            n = terms_for(sup, q, tail_tol);
        }
        let (m, c) = mean_and_complement(kind, u, v)?;
        for (s, val) in sums.iter_mut().zip([u * v, m * m, c * c, u * u, v * v]) {
            s.add(val * qk);
        }
        k += 1;
        qk *= q;
    }
    let w = 1.0 - q;
    let [fg, m2, c2, f2, g2] = sums.map(|s| w * s.value());
    let tail = sup * q.powi((n + 1) as i32);
    let err = 2.0 * tail * (fg.abs() + m2.abs() + c2.abs() + f2.abs() + g2.abs() + tail);
    Ok(RefinementChain::with_tolerance(fg * fg, m2 * c2, f2 * g2, CHAIN_TOL, 4.0 * err))
}
