//! Small numerical helpers shared across modules.

// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

/// `ln(cosh z)` without overflow or small-argument cancellation.
pub(crate) fn ln_cosh(z: f64) -> f64 {
    let a = z.abs();
    if a < 1.0 {
        let s = (0.5 * a).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        a + (-2.0 * a).exp().ln_1p() - LN_2
    }
}

/// `ln(1 + e^z)`.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// `ln|e^z - 1|` for `z != 0`.
pub(crate) fn ln_abs_expm1(z: f64) -> f64 {
    if z > 0.0 {
        z + (-(-z).exp_m1()).ln()
    } else {
        (-z.exp_m1()).ln()
    }
}

/// `x^p` with the conventions `0^0 = 1` and `0^p = 0` for `p > 0`.
pub(crate) fn pow0(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        if p == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        x.powf(p)
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
