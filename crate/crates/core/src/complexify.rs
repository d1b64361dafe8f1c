//! Where the arithmetic–geometric inequality `|s| ≤ |(s+1)/2|²` survives in
//! the complex plane, and the quartic curve `|s+1|⁴ = 16|s|²` separating the
//! two regions.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use num_complex::Complex64;
// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// Position of `s` relative to the separating curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Region {
    /// Enclosed by the curve: `|s| > |(s+1)/2|²`, the inequality fails.
    Inside,
    Boundary,
    /// `|s| < |(s+1)/2|²`, the inequality holds.
    Outside,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Inside => "inside",
            Region::Boundary => "boundary",
            Region::Outside => "outside",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PointClass {
    pub s: Complex64,
    /// `|s|`.
    pub lhs: f64,
    /// `|(s+1)/2|²`.
    pub rhs: f64,
    pub region: Region,
}

impl PointClass {
    /// Whether `|s| ≤ |(s+1)/2|²` holds, counting the boundary band.
    pub fn holds(&self) -> bool {
        self.region != Region::Inside
    }
}

/// Boundary when `|lhs - rhs| ≤ tol·(1 + lhs)`; otherwise by the sign of `rhs - lhs`.
pub fn classify_point(s: Complex64, tol: f64) -> PointClass {
    let lhs = s.norm();
    let rhs = ((s + 1.0) * 0.5).norm_sqr();
    let d = rhs - lhs;
    let region = if d.abs() <= tol * (1.0 + lhs) {
        Region::Boundary
    } else if d > 0.0 {
        Region::Outside
    } else {
        Region::Inside
    };
    PointClass { s, lhs, rhs, region }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Branch {
    /// The outer loop, `r ≥ 1`.
    Plus,
    /// The inner loop, `r ≤ 1`.
    Minus,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CurvePoint {
    pub phi: f64,
    pub branch: Branch,
    pub r: f64,
    pub x: f64,
    pub y: f64,
    /// Quartic evaluated at `(x, y)`.
    pub residual: f64,
}

impl CurvePoint {
    /// `|residual| / (1 + x⁴ + y⁴)`.
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / quartic_scale(self.x, self.y)
    }
}

/// `r = c ± √(c² - 1)` with `c = 2 - cos φ`; the two radii are reciprocal.
pub fn curve_radius(phi: f64, branch: Branch) -> f64 {
    let c = 2.0 - phi.cos();
    // c² - 1 = (c - 1)(c + 1), exact near φ = 0
    let root = ((c - 1.0) * (c + 1.0)).sqrt();
    match branch {
        Branch::Plus => c + root,
        Branch::Minus => 1.0 / (c + root),
    }
}

pub fn curve_point(phi: f64, branch: Branch) -> CurvePoint {
    let r = curve_radius(phi, branch);
    let (sin, cos) = phi.sin_cos();
    let (x, y) = (r * cos, r * sin);
    CurvePoint {
        phi,
        branch,
        r,
        x,
        y,
        residual: quartic_residual(x, y),
    }
}

/// `x⁴ + y⁴ + 2x²y² + 4x³ + 4xy² - 10x² - 14y² + 4x + 1`.
pub fn quartic_residual(x: f64, y: f64) -> f64 {
    let (x2, y2) = (x * x, y * y);
    x2 * x2 + y2 * y2 + 2.0 * x2 * y2 + 4.0 * x2 * x + 4.0 * x * y2 - 10.0 * x2 - 14.0 * y2 + 4.0 * x + 1.0
}

/// `1 + x⁴ + y⁴`.
pub fn quartic_scale(x: f64, y: f64) -> f64 {
    1.0 + x.powi(4) + y.powi(4)
}

/// `n` points per branch at `φ = 2πk/n`, plus branch first.
pub fn sample_curve(n: usize) -> Vec<CurvePoint> {
    [Branch::Plus, Branch::Minus]
        .into_iter()
        .flat_map(|b| (0..n).map(move |k| curve_point(TAU * k as f64 / n as f64, b)))
        .collect()
}

/// Location of `s` relative to the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DiskPosition {
    Interior,
    Circle,
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DiskClass {
    pub position: DiskPosition,
    /// `|s|`.
    pub lhs: f64,
    /// `((|s| + 1)/2)²`.
    pub rhs: f64,
    /// `lhs ≤ rhs`; true everywhere since `rhs - lhs = ((|s| - 1)/2)²`.
    pub holds: bool,
}

const CIRCLE_TOL: f64 = 1e-12;

/// `|s| ≤ ((|s| + 1)/2)²` together with where `s` sits relative to `|s| = 1`.
pub fn classify_unit_disk(s: Complex64) -> DiskClass {
    let lhs = s.norm();
    let h = (lhs + 1.0) * 0.5;
    let rhs = h * h;
    let position = if (lhs - 1.0).abs() <= CIRCLE_TOL {
        DiskPosition::Circle
    } else if lhs < 1.0 {
        DiskPosition::Interior
    } else {
        DiskPosition::Exterior
    };
    DiskClass {
        position,
        lhs,
        rhs,
        holds: lhs <= rhs,
    }
}

/// Classes of `r(1 - ε)e^{iφ}` and `r(1 + ε)e^{iφ}` around the curve point on
/// `branch` at angle `phi`.
pub fn ray_crossing(phi: f64, branch: Branch, eps: f64) -> (PointClass, PointClass) {
    let r = curve_radius(phi, branch);
    let u = Complex64::from_polar(1.0, phi);
    let tol = 1e-14;
    (classify_point(u * (r * (1.0 - eps)), tol), classify_point(u * (r * (1.0 + eps)), tol))
}

/// Whether the region flips across the curve point on every one of `rays`
/// rays at `φ = 2π(j + ½)/rays`, both branches.
pub fn curve_separates(rays: usize, eps: f64) -> bool {
    (0..rays).all(|j| {
        let phi = TAU * (j as f64 + 0.5) / rays as f64;
        [Branch::Plus, Branch::Minus].into_iter().all(|b| {
            let (a, c) = ray_crossing(phi, b, eps);
            a.region != Region::Boundary && c.region != Region::Boundary && a.region != c.region
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_point(c(1.0, 0.0), 1e-12).region, Region::Boundary);
        // |-0.1| = 0.1 < 0.2025 = |0.9/2|²
        let p = classify_point(c(-0.1, 0.0), 1e-12);
        assert_eq!(p.region, Region::Outside);
        assert!((p.rhs - 0.2025).abs() < 1e-15 && p.holds());
        assert_eq!(classify_point(c(-6.0, 0.0), 1e-12).region, Region::Outside);
        assert_eq!(classify_point(c(-1.0, 0.0), 1e-12).region, Region::Inside);
        assert_eq!(classify_point(c(0.0, 1.0), 1e-12).region, Region::Inside);
    }

    #[test]
    fn real_axis_regions_match_crossings() {
        let a = -3.0 - 2.0 * SQRT_2;
        let b = -3.0 + 2.0 * SQRT_2;
        for k in 0..=400 {
            let x = -8.0 + k as f64 * 0.025 + 1e-7;
            let p = classify_point(c(x, 0.0), 1e-12);
            let expect_holds = x <= a || x >= b;
            assert_eq!(p.holds(), expect_holds, "{x}");
        }
    }

    #[test]
    fn curve_point_examples() {
        for b in [Branch::Plus, Branch::Minus] {
            let p = curve_point(0.0, b);
            assert_eq!((p.r, p.x, p.y), (1.0, 1.0, 0.0));
        }
        let p = curve_point(PI, Branch::Plus);
        assert!((p.r - (3.0 + 2.0 * SQRT_2)).abs() < 1e-14);
        assert!((p.x + 3.0 + 2.0 * SQRT_2).abs() < 1e-12 && p.y.abs() < 1e-12);
        let p = curve_point(PI, Branch::Minus);
        assert!((p.x + 3.0 - 2.0 * SQRT_2).abs() < 1e-15);
        let s3 = 3f64.sqrt();
        assert!((curve_point(FRAC_PI_2, Branch::Plus).y - (2.0 + s3)).abs() < 1e-14);
        assert!((curve_point(FRAC_PI_2, Branch::Minus).y - (2.0 - s3)).abs() < 1e-15);
        assert!((curve_point(-FRAC_PI_2, Branch::Plus).y + (2.0 + s3)).abs() < 1e-14);
    }

    #[test]
    fn quartic_examples() {
        assert_eq!(quartic_residual(1.0, 0.0), 0.0);
        assert!(quartic_residual(-3.0 - 2.0 * SQRT_2, 0.0).abs() < 1e-9);
        assert_eq!(quartic_residual(0.0, 0.0), 1.0);
    }

    #[test]
    fn quartic_is_the_squared_equality() {
        // |s+1|⁴ - 16|s|² expands to the quartic
        for &(x, y) in &[(0.3, -1.7), (2.0, 5.0), (-4.0, 0.5), (0.0, 0.0)] {
            let q = ((x + 1.0) * (x + 1.0) + y * y).powi(2) - 16.0 * (x * x + y * y);
            assert!((q - quartic_residual(x, y)).abs() < 1e-12 * quartic_scale(x, y));
        }
    }

    #[test]
    fn sampled_curve_lies_on_quartic() {
        let pts = sample_curve(720);
        assert_eq!(pts.len(), 1440);
        for p in &pts {
            assert!(p.relative_residual() <= 1e-9, "{p:?}");
            let class = classify_point(c(p.x, p.y), 1e-9);
            assert_eq!(class.region, Region::Boundary);
        }
    }

    #[test]
    fn curve_is_conjugation_symmetric() {
        for k in 0..360 {
            let phi = TAU * k as f64 / 360.0;
            for b in [Branch::Plus, Branch::Minus] {
                let p = curve_point(phi, b);
                let q = curve_point(-phi, b);
                assert!((p.x - q.x).abs() < 1e-13 && (p.y + q.y).abs() < 1e-13);
                assert!(quartic_residual(p.x, -p.y).abs() <= 1e-9 * quartic_scale(p.x, p.y));
            }
        }
    }

    #[test]
    fn radii_are_reciprocal() {
        for k in 0..100 {
            let phi = 0.0628 * k as f64;
            let prod = curve_radius(phi, Branch::Plus) * curve_radius(phi, Branch::Minus);
            assert!((prod - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn curve_separates_regions() {
        assert!(curve_separates(100, 1e-3));
        let (a, b) = ray_crossing(PI, Branch::Plus, 1e-3);
        assert_eq!((a.region, b.region), (Region::Inside, Region::Outside));
        let (a, b) = ray_crossing(PI, Branch::Minus, 1e-3);
        assert_eq!((a.region, b.region), (Region::Outside, Region::Inside));
    }

    #[test]
    fn unit_disk_examples() {
        let d = classify_unit_disk(Complex64::from_polar(1.0, 0.7));
        assert_eq!(d.position, DiskPosition::Circle);
        assert!(d.holds);
        let d = classify_unit_disk(c(2.0, 0.0));
        assert_eq!((d.position, d.lhs, d.rhs, d.holds), (DiskPosition::Exterior, 2.0, 2.25, true));
        let d = classify_unit_disk(c(0.5, 0.0));
        assert_eq!((d.position, d.lhs, d.rhs, d.holds), (DiskPosition::Interior, 0.5, 0.5625, true));
    }

    #[test]
    fn unit_disk_inequality_never_fails() {
        let mut rng = crate::sampling::chunk_rng(3, 0);
        for _ in 0..2000 {
            let r = crate::sampling::log_uniform(&mut rng, 1e-6, 1e6);
            let t = crate::sampling::uniform(&mut rng, 0.0, TAU);
            assert!(classify_unit_disk(Complex64::from_polar(r, t)).holds);
        }
    }
}
