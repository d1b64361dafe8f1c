//! Refinements of the discrete Cauchy–Bunyakovskii inequality through a mean
//! and its complement, the reversed Aczél chain, the discrete Fourier
//! uncertainty relation and the four-variable indefinite Lagrange identity.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::chain::RefinementChain;
use crate::error::{Error, Result};
use crate::math::Accumulator;
use crate::means::{mean_and_complement, MeanKind};
use crate::sampling::{self, chunk_rng};

/// Two equal-length sequences of finite nonnegative reals.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SequencePair {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SequencePair {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: ys.len(),
            });
        }
        if let Some(v) = xs.iter().chain(&ys).find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!("sequence entries must be finite and nonnegative, got {v}")));
        }
        Ok(SequencePair { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

/// `Σ M(x_k,y_k)² · Σ M*(x_k,y_k)²`.
fn mean_middle<'a>(kind: &MeanKind, pairs: impl Iterator<Item = (f64, f64)> + 'a) -> Result<f64> {
    let mut sm = Accumulator::default();
    let mut sc = Accumulator::default();
    for (x, y) in pairs {
        let (m, c) = mean_and_complement(kind, x, y)?;
        sm.add(m * m);
        sc.add(c * c);
    }
    Ok(sm.value() * sc.value())
}

/// `(Σ x_k y_k)² ≤ Σ M(x_k,y_k)² · Σ M*(x_k,y_k)² ≤ Σ x_k² · Σ y_k²`.
pub fn cde_refine(kind: &MeanKind, pair: &SequencePair) -> Result<RefinementChain> {
    if pair.is_empty() {
        return Err(Error::invalid("cde_refine needs at least one pair"));
    }
    let mut sxy = Accumulator::default();
    let mut sxx = Accumulator::default();
    let mut syy = Accumulator::default();
    for (x, y) in pair.pairs() {
        sxy.add(x * y);
        sxx.add(x * x);
        syy.add(y * y);
    }
    let middle = mean_middle(kind, pair.pairs())?;
    let dot = sxy.value();
    Ok(RefinementChain::new(dot * dot, middle, sxx.value() * syy.value()))
}

/// Which of the two conditions on a generating function held on every sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CdeConditions {
    /// `f(tx, ty) = t² f(x, y)`.
    pub homogeneous: bool,
    /// `y f(x,1)/(x f(y,1)) + x f(y,1)/(y f(x,1)) ≤ x/y + y/x`.
    pub hybrid_condition: bool,
    pub samples: usize,
}

const CDE_TOL: f64 = 1e-9;

/// Samples log-uniform positive pairs from `[1e-3, 1e3]` and a scale factor
/// from `[1e-2, 1e2]`, checking both conditions at relative `1e-9`.
pub fn cde_condition_check(f: &dyn Fn(f64, f64) -> f64, samples: usize, seed: u64) -> CdeConditions {
    let mut out = CdeConditions {
        homogeneous: true,
        hybrid_condition: true,
        samples,
    };
    for (chunk, len) in sampling::chunks(samples) {
        let mut rng = chunk_rng(seed, chunk);
        for _ in 0..len {
            let x = sampling::log_uniform(&mut rng, 1e-3, 1e3);
            let y = sampling::log_uniform(&mut rng, 1e-3, 1e3);
            let t = sampling::log_uniform(&mut rng, 1e-2, 1e2);

            let fxy = f(x, y);
            let scaled = f(t * x, t * y);
            let want = t * t * fxy;
            if !((scaled - want).abs() <= CDE_TOL * scaled.abs().max(want.abs())) {
                out.homogeneous = false;
            }

            let r = (y * f(x, 1.0)) / (x * f(y, 1.0));
            let lhs = r + 1.0 / r;
            let rhs = x / y + y / x;
            if !(lhs <= rhs * (1.0 + CDE_TOL)) {
                out.hybrid_condition = false;
            }
        }
    }
    out
}

/// Reversed chain for the Aczél inequality with admissible leading entries:
/// `(x₀² - Σx_k²)(y₀² - Σy_k²) ≤ (x₀y₀ - √A)² ≤ (x₀y₀ - Σx_k y_k)²`, where
/// `A` is the mean middle of the tails.
pub fn aczel_refine(kind: &MeanKind, x: &[f64], y: &[f64]) -> Result<RefinementChain> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::invalid("aczel_refine needs a leading entry and at least one tail entry"));
    }
    let tails = SequencePair::new(x[1..].to_vec(), y[1..].to_vec())?;
    let (x0, y0) = (x[0], y[0]);
    if !(x0.is_finite() && y0.is_finite()) {
        return Err(Error::domain("leading entries must be finite"));
    }
    let mut sxx = Accumulator::default();
    let mut syy = Accumulator::default();
    let mut sxy = Accumulator::default();
    for (a, b) in tails.pairs() {
        sxx.add(a * a);
        syy.add(b * b);
        sxy.add(a * b);
    }
    let dx = x0 * x0 - sxx.value();
    let dy = y0 * y0 - syy.value();
    if dx < 0.0 || dy < 0.0 {
        return Err(Error::Admissibility(format!(
            "leading squares must dominate the tails, deficiencies {dx} and {dy}"
        )));
    }
    let a = mean_middle(kind, tails.pairs())?;
    let lead = x0 * y0;
    let middle = (lead - a.sqrt()).powi(2);
    let upper = (lead - sxy.value()).powi(2);
    Ok(RefinementChain::new(dx * dy, middle, upper))
}

/// Support sizes of a vector and of its unitary discrete Fourier transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Uncertainty {
    pub n: usize,
    pub support_a: usize,
    pub support_b: usize,
    pub product: usize,
    /// `support_a · support_b ≥ n`.
    pub holds: bool,
    /// `support_a · support_b = n`.
    pub equality: bool,
}

/// `b_j = n^{-1/2} Σ_k a_k w^{-jk}` with `w = e^{2πi/n}`, summed directly.
pub fn dft(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let scale = 1.0 / (n as f64).sqrt();
    let step = -core::f64::consts::TAU / n as f64;
    // twiddles indexed by jk mod n keep the phase exact for large jk
    let tw: Vec<Complex64> = (0..n).map(|m| Complex64::from_polar(1.0, step * m as f64)).collect();
    (0..n)
        .map(|j| {
            let mut re = Accumulator::default();
            let mut im = Accumulator::default();
            for (k, ak) in a.iter().enumerate() {
                let t = ak * tw[(j * k) % n];
                re.add(t.re);
                im.add(t.im);
            }
            Complex64::new(re.value(), im.value()) * scale
        })
        .collect()
}

const SUPPORT_TOL: f64 = 1e-9;

fn support(v: &[Complex64]) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter().filter(|z| z.norm() > SUPPORT_TOL * max).count()
}

/// Counts the supports of `a` and of its transform, each relative to its own
/// largest magnitude.
pub fn dft_uncertainty(a: &[Complex64]) -> Result<Uncertainty> {
    if a.is_empty() {
        return Err(Error::invalid("dft_uncertainty needs n ≥ 1"));
    }
    if let Some(z) = a.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::domain(format!("non-finite entry {z}")));
    }
    if a.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::ZeroVector);
    }
    let n = a.len();
    let support_a = support(a);
    let support_b = support(&dft(a));
    let product = support_a * support_b;
    Ok(Uncertainty {
        n,
        support_a,
        support_b,
        product,
        holds: product >= n,
        equality: product == n,
    })
}

/// Both sides of the indefinite Lagrange identity in four variables.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IdentityResidual {
    /// `(x₁y₁+x₂y₂-x₃y₃-x₄y₄)² - (x₁²+x₂²-x₃²-x₄²)(y₁²+y₂²-y₃²-y₄²)`.
    pub form_value: f64,
    /// The four positive minus two negative squared 2×2 minors.
    pub squares_value: f64,
    pub residual: f64,
    /// `1 + |x|²|y|²`, the natural size of either side.
    pub scale: f64,
}

pub fn pontryagin_identity_residual(x: [f64; 4], y: [f64; 4]) -> IdentityResidual {
    let [x1, x2, x3, x4] = x;
    let [y1, y2, y3, y4] = y;
    let dot = x1 * y1 + x2 * y2 - x3 * y3 - x4 * y4;
    let qx = x1 * x1 + x2 * x2 - x3 * x3 - x4 * x4;
    let qy = y1 * y1 + y2 * y2 - y3 * y3 - y4 * y4;
    let form_value = dot * dot - qx * qy;

    let sq = |v: f64| v * v;
    let squares_value = sq(y3 * x1 - x3 * y1) + sq(x4 * y1 - x1 * y4) + sq(y3 * x2 - y2 * x3) + sq(y2 * x4 - y4 * x2)
        - sq(y2 * x1 - y1 * x2)
        - sq(y3 * x4 - x3 * y4);

    let nx: f64 = x.iter().map(|v| v * v).sum();
    let ny: f64 = y.iter().map(|v| v * v).sum();
    IdentityResidual {
        form_value,
        squares_value,
        residual: (form_value - squares_value).abs(),
        scale: 1.0 + nx * ny,
    }
}
