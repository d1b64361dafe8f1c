//! Deterministic adaptive Simpson quadrature over fallible integrands, plus
//! integration restricted to the sign regions of a second function.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::math::Accumulator;

/// Panels the adaptive rule starts from.
const INITIAL_PANELS: usize = 16;
/// Width (relative to `b - a`) below which a root bracket counts as located.
const ROOT_WIDTH: f64 = 1e-12;
/// Cells scanned for sign changes before root bisection.
const SIGN_SCAN_CELLS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Rule {
    AdaptiveSimpson,
    /// Composite Simpson with this many panels (`2n + 1` nodes).
    FixedComposite(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QuadratureSpec {
    pub a: f64,
    pub b: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_nodes: usize,
    pub rule: Rule,
}

impl QuadratureSpec {
    pub fn new(a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_nodes: usize, rule: Rule) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("need finite a < b, got [{a}, {b}]")));
        }
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if max_nodes < 16 {
            return Err(Error::invalid("max_nodes must be at least 16"));
        }
        if let Rule::FixedComposite(n) = rule {
            if n < 2 || 2 * n + 1 > max_nodes {
                return Err(Error::invalid(format!("composite rule with {n} panels does not fit the node budget")));
            }
        }
        Ok(QuadratureSpec {
            a,
            b,
            abs_tol,
            rel_tol,
            max_nodes,
            rule,
        })
    }

    /// Adaptive Simpson on `[a, b]` with tolerances `1e-13` absolute and
    /// `1e-12` relative and a budget of four million nodes.
    pub fn adaptive(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, 1e-13, 1e-12, 4_000_000, Rule::AdaptiveSimpson)
    }

    pub fn with_tolerances(self, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        Self::new(self.a, self.b, abs_tol, rel_tol, self.max_nodes, self.rule)
    }

    pub fn with_interval(self, a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, self.abs_tol, self.rel_tol, self.max_nodes, self.rule)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error, including a rounding floor.
    pub error: f64,
    pub nodes: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn finite_at(f: &dyn Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("integrand at {x}")))
    }
}

/// Integrates `f` over `[spec.a, spec.b]`.
///
/// The adaptive rule refines panels depth-first, left to right, so the
/// summation order and hence the result are reproducible bit for bit.
pub fn integrate(spec: &QuadratureSpec, f: &dyn Fn(f64) -> Result<f64>) -> Result<QuadResult> {
    match spec.rule {
        Rule::AdaptiveSimpson => adaptive_simpson(spec, spec.a, spec.b, f),
        Rule::FixedComposite(n) => composite(spec.a, spec.b, n, f),
    }
}

fn composite(a: f64, b: f64, n: usize, f: &dyn Fn(f64) -> Result<f64>) -> Result<QuadResult> {
    let m = 2 * n;
    let h = (b - a) / m as f64;
    let vals = (0..=m)
        .map(|i| finite_at(f, if i == m { b } else { a + i as f64 * h }))
        .collect::<Result<Vec<_>>>()?;
    let (fine, abs_sum) = simpson_sum(&vals, h, 1);
    let err = if n.is_multiple_of(2) {
        let (coarse, _) = simpson_sum(&vals, 2.0 * h, 2);
        (fine - coarse).abs() / 15.0
    } else {
        0.0
    };
    Ok(QuadResult {
        value: fine,
        error: err + 64.0 * f64::EPSILON * abs_sum,
        nodes: m + 1,
    })
}

/// Composite Simpson on every `stride`-th node of `vals`, spacing `h`.
/// Returns the sum and the sum of absolute contributions.
pub(crate) fn simpson_sum(vals: &[f64], h: f64, stride: usize) -> (f64, f64) {
    let mut acc = Accumulator::default();
    let mut abs = 0.0;
    let mut i = 0;
    while i + 2 * stride < vals.len() {
        let p = h / 3.0 * (vals[i] + 4.0 * vals[i + stride] + vals[i + 2 * stride]);
        acc.add(p);
        abs += p.abs();
        i += 2 * stride;
    }
    (acc.value(), abs)
}

fn adaptive_simpson(spec: &QuadratureSpec, a: f64, b: f64, f: &dyn Fn(f64) -> Result<f64>) -> Result<QuadResult> {
    let width = b - a;
    let nodes = core::cell::Cell::new(0usize);
    let eval = |x: f64| -> Result<f64> {
        nodes.set(nodes.get() + 1);
        finite_at(f, x)
    };

    let h = width / INITIAL_PANELS as f64;
    let mut xs = Vec::with_capacity(2 * INITIAL_PANELS + 1);
    for i in 0..=2 * INITIAL_PANELS {
        xs.push(if i == 2 * INITIAL_PANELS { b } else { a + i as f64 * h / 2.0 });
    }
    let vals = xs.iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
    let mut stack = Vec::new();
    let mut rough = 0.0;
    for p in (0..INITIAL_PANELS).rev() {
        let i = 2 * p;
        let whole = simpson(xs[i], xs[i + 2], vals[i], vals[i + 1], vals[i + 2]);
        rough += whole.abs();
        stack.push(Panel {
            a: xs[i],
            b: xs[i + 2],
            fa: vals[i],
            fm: vals[i + 1],
            fb: vals[i + 2],
            whole,
        });
    }
    let tol_density = spec.abs_tol.max(spec.rel_tol * rough) / width;
    let min_width = width * 1e-14;

    let mut sum = Accumulator::default();
    let mut abs_sum = 0.0;
    let mut err = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        if nodes.get() > spec.max_nodes {
            return Err(Error::QuadratureFailure(format!(
                "node budget {} exhausted on [{a}, {b}]",
                spec.max_nodes
            )));
        }
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let tol = tol_density * (p.b - p.a);
        if diff.abs() <= 15.0 * tol || p.b - p.a <= min_width {
            let v = left + right + diff / 15.0;
            sum.add(v);
            abs_sum += left.abs() + right.abs();
            err += diff.abs() / 15.0;
        } else {
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
            });
        }
    }
    Ok(QuadResult {
        value: sum.value(),
        error: err + 64.0 * f64::EPSILON * abs_sum,
        nodes: nodes.get(),
    })
}

/// Integrals of `h` over `{d ≥ 0}` and `{d < 0}`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegionIntegrals {
    pub nonnegative: QuadResult,
    pub negative: QuadResult,
    /// Located sign changes of `d`.
    pub breakpoints: Vec<f64>,
}

/// Splits `[a, b]` at the sign changes of `d` and integrates `h` on each
/// piece, assigning pieces by the sign of `d` at their midpoint.
///
/// Sign changes are found on a uniform scan and bisected down to width
/// `1e-12·(b - a)`. Changes that the scan cannot see (two roots in one
/// cell) are missed.
pub fn integrate_by_sign(
    spec: &QuadratureSpec,
    d: &dyn Fn(f64) -> Result<f64>,
    h: &dyn Fn(f64) -> Result<f64>,
) -> Result<RegionIntegrals> {
    let (a, b) = (spec.a, spec.b);
    let cells = SIGN_SCAN_CELLS;
    let step = (b - a) / cells as f64;
    let xs: Vec<f64> = (0..=cells).map(|i| if i == cells { b } else { a + i as f64 * step }).collect();
    let ds = xs.iter().map(|&x| finite_at(d, x)).collect::<Result<Vec<_>>>()?;
    let mut breakpoints = Vec::new();
    for i in 0..cells {
        if (ds[i] >= 0.0) != (ds[i + 1] >= 0.0) {
            let (mut lo, mut hi) = (xs[i], xs[i + 1]);
            let lo_sign = ds[i] >= 0.0;
            while hi - lo > ROOT_WIDTH * (b - a) {
                let mid = 0.5 * (lo + hi);
                if (finite_at(d, mid)? >= 0.0) == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            breakpoints.push(0.5 * (lo + hi));
        }
    }
    let mut edges = vec![a];
    edges.extend(breakpoints.iter().copied());
    edges.push(b);

    let mut pos = (Accumulator::default(), 0.0, 0usize);
    let mut neg = (Accumulator::default(), 0.0, 0usize);
    let mut budget = spec.max_nodes;
    for w in edges.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let piece = QuadratureSpec {
            a: w[0],
            b: w[1],
            max_nodes: budget,
            ..*spec
        };
        let r = integrate(&piece, h)?;
        budget = budget.saturating_sub(r.nodes).max(16);
        let target = if finite_at(d, 0.5 * (w[0] + w[1]))? >= 0.0 {
            &mut pos
        } else {
            &mut neg
        };
        target.0.add(r.value);
        target.1 += r.error;
        target.2 += r.nodes;
    }
    let pack = |(acc, e, n): (Accumulator, f64, usize)| QuadResult {
        value: acc.value(),
        error: e,
        nodes: n,
    };
    Ok(RegionIntegrals {
        nonnegative: pack(pos),
        negative: pack(neg),
        breakpoints,
    })
}
