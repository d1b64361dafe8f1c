//! Iterative tightening of the integral chain.
//!
//! Starting from `U_0 = f`, `V_0 = g`, each step replaces the pair by
//! `U_{n+1} = M_α(U_n, V_n)` and `V_{n+1} = M_{-α}(U_n, V_n)`. Because
//! `M_{-α} = (M_α)*`, the product `U_n V_n = f g` is preserved, and with
//! `L_n = ∫V_n²`, `G_n = ∫U_n²`, `A_n = L_n G_n` one gets
//! `S² ≤ A_n ≤ A_{n-1}` where `S = ∫fg`.
//!
//! Functions are carried as values on a composite Simpson grid that is
//! refined until the first few integrals stop moving.

use alloc::format;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::integral::Integrand;
use crate::means::{eval_mean, MeanKind, PowerOrder, RadoOrder};
use crate::quadrature::{simpson_sum, QuadratureSpec};

/// Panels of the first grid tried.
const INITIAL_PANELS: usize = 16;
/// Relative agreement the grid is refined to, whatever `quad.rel_tol` says.
const GRID_TOL_FLOOR: f64 = 1e-13;

/// Which mean drives the iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum IterationScheme {
    /// `U ← M_α(U, V)`, `V ← M_{-α}(U, V)`.
    Power { alpha: f64 },
    /// `U ← R_β(U, V)`, `V ← R_β*(U, V)`. Experimental: no monotonicity
    /// guarantee.
    Rado { beta: f64 },
}

impl IterationScheme {
    fn upper_mean(&self) -> Result<MeanKind> {
        match *self {
            IterationScheme::Power { alpha } => {
                if !(alpha > 0.0) {
                    return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
                }
                Ok(MeanKind::Power(PowerOrder::new(alpha)?))
            }
            IterationScheme::Rado { beta } => Ok(MeanKind::Rado(RadoOrder::new(beta)?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundTrace {
    pub alpha: f64,
    #[cfg_attr(feature = "serde", serde(rename = "L"))]
    pub l: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "G"))]
    pub g: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "A"))]
    pub a: Vec<f64>,
    /// `∫fg` on the final grid.
    pub s_estimate: f64,
    pub steps: usize,
    /// `max |U_n - V_n|` over the grid for each `n`.
    pub sup_gap: Vec<f64>,
    pub grid_nodes: usize,
}

/// Grid values of `U_n`, `V_n` for every step.
#[derive(Clone, Debug, PartialEq)]
pub struct GridIterates {
    pub nodes: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

/// Runs the power-mean iteration for `steps` steps.
pub fn iterate_bounds(f: &Integrand, g: &Integrand, quad: &QuadratureSpec, alpha: f64, steps: usize) -> Result<BoundTrace> {
    iterate_bounds_with(f, g, quad, IterationScheme::Power { alpha }, steps)
}

pub fn iterate_bounds_with(
    f: &Integrand,
    g: &Integrand,
    quad: &QuadratureSpec,
    scheme: IterationScheme,
    steps: usize,
) -> Result<BoundTrace> {
    iterate_grid(f, g, quad, scheme, steps).map(|(t, _)| t)
}

fn step(kind: &MeanKind, u: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut nu = Vec::with_capacity(u.len());
    let mut nv = Vec::with_capacity(u.len());
    for (&a, &b) in u.iter().zip(v) {
        let m = eval_mean(kind, a, b)?;
        // complement, continuous at a zero argument
        let c = if m > 0.0 { a * (b / m) } else { 0.0 };
        nu.push(m);
        nv.push(c);
    }
    Ok((nu, nv))
}

fn sq_integral(vals: &[f64], h: f64) -> f64 {
    let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
    simpson_sum(&sq, h, 1).0
}

fn product_integral(u: &[f64], v: &[f64], h: f64) -> f64 {
    let p: Vec<f64> = u.iter().zip(v).map(|(a, b)| a * b).collect();
    simpson_sum(&p, h, 1).0
}

/// [`iterate_bounds_with`] that also returns the grid iterates.
pub fn iterate_grid(
    f: &Integrand,
    g: &Integrand,
    quad: &QuadratureSpec,
    scheme: IterationScheme,
    steps: usize,
) -> Result<(BoundTrace, GridIterates)> {
    if steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    let kind = scheme.upper_mean()?;
    let tol = quad.rel_tol.max(GRID_TOL_FLOOR);
    let mut panels = INITIAL_PANELS;
    let mut previous: Option<[f64; 3]> = None;
    loop {
        let n_nodes = 2 * panels + 1;
        if n_nodes > quad.max_nodes {
            return Err(Error::QuadratureFailure(format!(
                "grid did not stabilise within {} nodes",
                quad.max_nodes
            )));
        }
        let h = (quad.b - quad.a) / (2 * panels) as f64;
        let nodes: Vec<f64> = (0..n_nodes)
            .map(|i| if i == n_nodes - 1 { quad.b } else { quad.a + i as f64 * h })
            .collect();
        let mut u0 = Vec::with_capacity(n_nodes);
        let mut v0 = Vec::with_capacity(n_nodes);
        for &x in &nodes {
            let (a, b) = (f.eval(x)?, g.eval(x)?);
            if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
                return Err(Error::domain(format!("iteration needs f, g ≥ 0; at {x}: f = {a}, g = {b}")));
            }
            u0.push(a);
            v0.push(b);
        }
        let (u1, v1) = step(&kind, &u0, &v0)?;
        let probe = [
            sq_integral(&u0, h) * sq_integral(&v0, h),
            product_integral(&u0, &v0, h),
            sq_integral(&u1, h) * sq_integral(&v1, h),
        ];
        let stable = previous.is_some_and(|p| {
            p.iter()
                .zip(&probe)
                .all(|(a, b)| (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
        });
        if !stable {
            previous = Some(probe);
            panels *= 2;
            continue;
        }

        let s = probe[1];
        let mut us = alloc::vec![u0];
        let mut vs = alloc::vec![v0];
        for _ in 0..steps {
            let (nu, nv) = step(&kind, us.last().unwrap(), vs.last().unwrap())?;
            us.push(nu);
            vs.push(nv);
        }
        let l: Vec<f64> = vs.iter().map(|v| sq_integral(v, h)).collect();
        let gs: Vec<f64> = us.iter().map(|u| sq_integral(u, h)).collect();
        let a = l.iter().zip(&gs).map(|(x, y)| x * y).collect();
        let sup_gap = us
            .iter()
            .zip(&vs)
            .map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
            .collect();
        let alpha = match scheme {
            IterationScheme::Power { alpha } => alpha,
            IterationScheme::Rado { beta } => beta,
        };
        let trace = BoundTrace {
            alpha,
            l,
            g: gs,
            a,
            s_estimate: s,
            steps,
            sup_gap,
            grid_nodes: n_nodes,
        };
        return Ok((trace, GridIterates { nodes, u: us, v: vs }));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TraceCheck {
    /// `S² ≤ A_n ≤ A_{n-1}` for every `n`.
    pub it1_holds: bool,
    /// Smallest `n` from which `L_m ≤ S ≤ G_m` holds for all `m ≥ n`.
    pub it2_holds_from: Option<usize>,
    /// `A_last - S² < (A_1 - S²)/2`, or the chain is already at `S²`.
    pub converging: bool,
}

/// Relative slack used when comparing trace members.
const TRACE_TOL: f64 = 1e-12;

pub fn check_trace(trace: &BoundTrace) -> TraceCheck {
    let s = trace.s_estimate;
    let s2 = s * s;
    let slack = |v: f64| TRACE_TOL * v.abs().max(s2.abs());
    let n = trace.a.len();
    let it1_holds = (0..n).all(|i| {
        let ai = trace.a[i];
        s2 <= ai + slack(ai) && (i == 0 || ai <= trace.a[i - 1] + slack(ai))
    });
    let ok = |i: usize| {
        let sl = TRACE_TOL * s.abs().max(trace.l[i].abs()).max(trace.g[i].abs());
        trace.l[i] <= s + sl && s <= trace.g[i] + sl
    };
    let mut from = None;
    for i in (0..n).rev() {
        if ok(i) {
            from = Some(i);
        } else {
            break;
        }
    }
    let first = trace.a.get(1).map_or(0.0, |a1| a1 - s2);
    let last = trace.a[n - 1] - s2;
    let converging = first <= slack(s2) || last < first / 2.0;
    TraceCheck {
        it1_holds,
        it2_holds_from: from,
        converging,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::adaptive(0.0, 1.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }

    #[test]
    fn envelope_pair_first_step() {
        let f = Integrand::new("x", |x| x);
        let g = Integrand::new("1-x", |x| 1.0 - x);
        let t = iterate_bounds(&f, &g, &quad(), 1.0, 1).unwrap();
        assert!(close(t.l[1], 2.0 / 15.0, 1e-12));
        assert!(close(t.g[1], 0.25, 1e-12));
        assert!(close(t.a[1], 1.0 / 30.0, 1e-12));
        assert!(close(t.s_estimate, 1.0 / 6.0, 1e-13));
        assert!(close(t.a[0], 1.0 / 9.0, 1e-12));
        assert!(close(t.l[0], 1.0 / 3.0, 1e-12));
        let c = check_trace(&t);
        assert!(c.it1_holds);
        assert_eq!(c.it2_holds_from, Some(1));
    }

    #[test]
    fn equal_functions_are_a_fixed_point() {
        let f = Integrand::new("1+x^2", |x| 1.0 + x * x);
        let t = iterate_bounds(&f, &f, &quad(), 2.0, 3).unwrap();
        let want = 1.0 + 2.0 / 3.0 + 0.2;
        for n in 0..=3 {
            assert!(close(t.l[n], want, 1e-12) && close(t.g[n], want, 1e-12));
            assert!(close(t.a[n], t.s_estimate * t.s_estimate, 1e-12));
        }
        let c = check_trace(&t);
        assert_eq!(c.it2_holds_from, Some(0));
        assert!(c.converging && c.it1_holds);
    }

    #[test]
    fn constants_with_f_above_g() {
        let f = Integrand::new("2", |_| 2.0);
        let g = Integrand::new("1", |_| 1.0);
        let t = iterate_bounds(&f, &g, &quad(), 1.0, 3).unwrap();
        assert_eq!(check_trace(&t).it2_holds_from, Some(0));
    }

    #[test]
    fn exponential_pair_strictly_tightens() {
        let f = Integrand::new("exp(x)", |x: f64| x.exp());
        let g = Integrand::new("1", |_| 1.0);
        let t = iterate_bounds(&f, &g, &quad(), 2.0, 4).unwrap();
        let s2 = t.s_estimate * t.s_estimate;
        assert!(t.a[4] - s2 < t.a[1] - s2);
        for n in 1..=4 {
            assert!(t.a[n] < t.a[n - 1]);
        }
        let c = check_trace(&t);
        assert!(c.it1_holds && c.converging);
    }

    #[test]
    fn pointwise_invariants() {
        let f = Integrand::new("1+x", |x| 1.0 + x);
        let g = Integrand::new("exp(-x)", |x: f64| (-x).exp());
        let (t, it) = iterate_grid(&f, &g, &quad(), IterationScheme::Power { alpha: 1.0 }, 4).unwrap();
        for n in 1..=4 {
            for i in 0..it.nodes.len() {
                let (u, v) = (it.u[n][i], it.v[n][i]);
                assert!(v <= u * (1.0 + 1e-15));
                let fg = it.u[0][i] * it.v[0][i];
                assert!(close(u * v, fg, 1e-12));
            }
        }
        for n in 1..3 {
            assert!(t.sup_gap[n + 1] <= t.sup_gap[n] * t.sup_gap[n] + 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = Integrand::new("x-1", |x| x - 1.0);
        let g = Integrand::new("1", |_| 1.0);
        assert!(matches!(iterate_bounds(&f, &g, &quad(), 1.0, 2), Err(Error::Domain(_))));
        assert!(iterate_bounds(&g, &g, &quad(), 0.0, 2).is_err());
        assert!(iterate_bounds(&g, &g, &quad(), 1.0, 0).is_err());
    }

    #[test]
    fn rado_scheme_runs() {
        let f = Integrand::new("1+x", |x| 1.0 + x);
        let g = Integrand::new("2-x", |x| 2.0 - x);
        let t = iterate_bounds_with(&f, &g, &quad(), IterationScheme::Rado { beta: -1.0 }, 3).unwrap();
        let s2 = t.s_estimate * t.s_estimate;
        assert!(t.a.iter().all(|&a| a >= s2 * (1.0 - 1e-12)));
    }
}
