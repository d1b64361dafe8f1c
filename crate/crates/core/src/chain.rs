//! The `lower ≤ middle ≤ upper` triple every refinement produces.

/// Default relative tolerance for chain verdicts.
pub const CHAIN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RefinementChain {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// `middle - lower`.
    pub slack_lower: f64,
    /// `upper - middle`.
    pub slack_upper: f64,
}

impl RefinementChain {
    /// Verdicts at relative tolerance [`CHAIN_TOL`].
    pub fn new(lower: f64, middle: f64, upper: f64) -> Self {
        Self::with_tolerance(lower, middle, upper, CHAIN_TOL, 0.0)
    }

    /// Verdicts with `rel_tol·scale + abs_tol` of allowance, where
    /// `scale = max(|lower|, |middle|, |upper|)`.
    pub fn with_tolerance(lower: f64, middle: f64, upper: f64, rel_tol: f64, abs_tol: f64) -> Self {
        let allow = rel_tol * Self::scale_of(lower, middle, upper) + abs_tol;
        RefinementChain {
            lower,
            middle,
            upper,
            lower_holds: lower <= middle + allow,
            upper_holds: middle <= upper + allow,
            slack_lower: middle - lower,
            slack_upper: upper - middle,
        }
    }

    fn scale_of(a: f64, b: f64, c: f64) -> f64 {
        a.abs().max(b.abs()).max(c.abs())
    }

    pub fn scale(&self) -> f64 {
        Self::scale_of(self.lower, self.middle, self.upper)
    }

    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }

    /// Both inequalities hold with strictly positive slack.
    pub fn strict(&self) -> bool {
        self.slack_lower > 0.0 && self.slack_upper > 0.0
    }

    /// The same members with `upper` replaced, verdicts recomputed at
    /// [`CHAIN_TOL`]. Used to exercise violation handling.
    pub fn with_upper(&self, upper: f64) -> Self {
        Self::new(self.lower, self.middle, upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_and_slack() {
        let c = RefinementChain::new(1.0, 2.0, 3.0);
        assert!(c.holds() && c.strict());
        assert_eq!((c.slack_lower, c.slack_upper), (1.0, 1.0));
        let c = RefinementChain::new(9.0, 9.0, 9.0);
        assert!(c.holds() && !c.strict());
        let c = RefinementChain::new(1.0, 2.0, 1.5);
        assert!(c.lower_holds && !c.upper_holds);
    }

    #[test]
    fn tolerance_absorbs_rounding_only() {
        let c = RefinementChain::new(1.0 + 1e-12, 1.0, 1.0);
        assert!(c.holds());
        let c = RefinementChain::new(1.0 + 1e-8, 1.0, 1.0);
        assert!(!c.lower_holds);
        let c = RefinementChain::with_tolerance(1.0 + 1e-8, 1.0, 1.0, 1e-9, 1e-7);
        assert!(c.holds());
    }

    #[test]
    fn perturbing_upper_breaks_chain() {
        let c = RefinementChain::new(1.0, 2.0, 3.0).with_upper(1.9);
        assert!(!c.upper_holds);
    }
}
