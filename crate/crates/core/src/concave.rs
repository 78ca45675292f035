//! Monotone concave scalar functions with `ψ(0) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A monotone nondecreasing concave function on `[0, ∞)` with `ψ(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConcaveSpec {
    /// `y^exponent`, exponent in `(0, 1]`.
    Power { exponent: f64 },
    /// `ln(1 + scale * y)`.
    Log1p { scale: f64 },
    /// `min(y, cap)`.
    Truncation { cap: f64 },
    /// Piecewise-linear interpolation of `(breakpoint, value)` knots starting
    /// at `(0, 0)`; the last slope is continued past the final knot.
    ExplicitPl { points: Vec<(f64, f64)> },
}

impl ConcaveSpec {
    pub fn power(exponent: f64) -> Result<Self> {
        let s = ConcaveSpec::Power { exponent };
        s.validate()?;
        Ok(s)
    }

    pub fn identity() -> Self {
        ConcaveSpec::Power { exponent: 1.0 }
    }

    pub fn log1p(scale: f64) -> Result<Self> {
        let s = ConcaveSpec::Log1p { scale };
        s.validate()?;
        Ok(s)
    }

    pub fn truncation(cap: f64) -> Result<Self> {
        let s = ConcaveSpec::Truncation { cap };
        s.validate()?;
        Ok(s)
    }

    pub fn explicit_pl(points: Vec<(f64, f64)>) -> Result<Self> {
        let s = ConcaveSpec::ExplicitPl { points };
        s.validate()?;
        Ok(s)
    }

    /// Checks the variant parameters; deserialized specs go through this too.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConcaveSpec::Power { exponent } => {
                if !(exponent.is_finite() && *exponent > 0.0 && *exponent <= 1.0) {
                    return Err(Error::param("exponent", format!("{exponent} not in (0, 1]")));
                }
            }
            ConcaveSpec::Log1p { scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::param("scale", format!("{scale} must be > 0")));
                }
            }
            ConcaveSpec::Truncation { cap } => {
                if !(cap.is_finite() && *cap > 0.0) {
                    return Err(Error::param("cap", format!("{cap} must be > 0")));
                }
            }
            ConcaveSpec::ExplicitPl { points } => {
                if points.len() < 2 {
                    return Err(Error::param("points", "need at least two knots"));
                }
                if points[0] != (0.0, 0.0) {
                    return Err(Error::param("points", "first knot must be (0, 0)"));
                }
                let mut prev_slope = f64::INFINITY;
                for w in points.windows(2) {
                    let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                    if !(x1.is_finite() && y1.is_finite()) || x1 <= x0 {
                        return Err(Error::param("points", "breakpoints must be finite and strictly increasing"));
                    }
                    let slope = (y1 - y0) / (x1 - x0);
                    if slope < 0.0 {
                        return Err(Error::param("points", "values must be nondecreasing"));
                    }
                    if slope > prev_slope * (1.0 + 1e-12) {
                        return Err(Error::param("points", "slopes must be nonincreasing (concavity)"));
                    }
                    prev_slope = slope;
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, y: f64) -> f64 {
        debug_assert!(y >= 0.0);
        match self {
            ConcaveSpec::Power { exponent } => {
                if *exponent == 1.0 {
                    y
                } else {
                    y.powf(*exponent)
                }
            }
            ConcaveSpec::Log1p { scale } => (scale * y).ln_1p(),
            ConcaveSpec::Truncation { cap } => y.min(*cap),
            ConcaveSpec::ExplicitPl { points } => eval_knots(points, y),
        }
    }

    /// Constant `c` with `ψ(ky) <= k^c ψ(y)` for all `k >= 1`, `y >= 0`.
    pub fn growth_exponent(&self) -> f64 {
        match self {
            ConcaveSpec::Power { exponent } => *exponent,
            _ => 1.0,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, ConcaveSpec::Power { exponent } if *exponent == 1.0)
    }
}

fn eval_knots(points: &[(f64, f64)], y: f64) -> f64 {
    // index of the first knot strictly right of y
    let idx = points.partition_point(|&(x, _)| x <= y);
    let seg = idx.clamp(1, points.len() - 1);
    let (x0, y0) = points[seg - 1];
    let (x1, y1) = points[seg];
    y0 + (y1 - y0) / (x1 - x0) * (y - x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_specs() -> Vec<ConcaveSpec> {
        vec![
            ConcaveSpec::power(0.3).unwrap(),
            ConcaveSpec::power(0.5).unwrap(),
            ConcaveSpec::identity(),
            ConcaveSpec::log1p(1.0).unwrap(),
            ConcaveSpec::log1p(7.5).unwrap(),
            ConcaveSpec::truncation(2.5).unwrap(),
            ConcaveSpec::explicit_pl(vec![(0.0, 0.0), (1.0, 2.0), (4.0, 3.0), (10.0, 3.6)]).unwrap(),
        ]
    }

    #[test]
    fn normalized_at_zero() {
        for s in all_specs() {
            assert_eq!(s.eval(0.0), 0.0, "{s:?}");
        }
    }

    #[test]
    fn explicit_pl_interpolates_and_extrapolates() {
        let s = ConcaveSpec::explicit_pl(vec![(0.0, 0.0), (2.0, 2.0), (4.0, 3.0)]).unwrap();
        assert_eq!(s.eval(1.0), 1.0);
        assert_eq!(s.eval(3.0), 2.5);
        assert_eq!(s.eval(6.0), 4.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ConcaveSpec::power(1.5).is_err());
        assert!(ConcaveSpec::power(0.0).is_err());
        assert!(ConcaveSpec::log1p(-1.0).is_err());
        assert!(ConcaveSpec::truncation(0.0).is_err());
        assert!(ConcaveSpec::explicit_pl(vec![(1.0, 0.0), (2.0, 1.0)]).is_err());
        // convex knots
        assert!(ConcaveSpec::explicit_pl(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)]).is_err());
    }

    proptest! {
        #[test]
        fn growth_exponent_is_sound(k in 1.0f64..50.0, y in 0.0f64..100.0) {
            for s in all_specs() {
                let lhs = s.eval(k * y);
                let rhs = k.powf(s.growth_exponent()) * s.eval(y);
                prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300, "{:?}: {} > {}", s, lhs, rhs);
            }
        }

        #[test]
        fn monotone_and_midpoint_concave(a in 0.0f64..50.0, b in 0.0f64..50.0) {
            for s in all_specs() {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(s.eval(lo) <= s.eval(hi) + 1e-12);
                let mid = s.eval(0.5 * (a + b));
                prop_assert!(mid + 1e-12 >= 0.5 * (s.eval(a) + s.eval(b)));
            }
        }
    }
}
