//! Piecewise-linear lower envelopes of the concave components.
//!
//! Each component `ψ_i` is replaced on `[l_i, u_i]` by chords between
//! geometric breakpoints `b^{j+1} = b^j (1 + ε')`, with `(1 + ε')^c = 1 + ε`
//! for the component's growth exponent `c`. A lead chord from the origin to
//! `(l, ψ(l))` covers `[0, l]`. On every load that is `0` or inside `[l, u]`
//! the envelope satisfies `ψ^PL <= ψ <= (1 + ε) ψ^PL`.
//!
//! Segment `0` is the lead chord; segment `j >= 1` spans
//! `[breakpoints[j-1], breakpoints[j]]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::concave::ConcaveSpec;
use crate::cost::{CooperativeCost, SetFunction};
use crate::error::{Error, Result};
use crate::linear::{solve_linear, solve_linear_max, ConstraintSpec, MaxSolve};
use crate::subset::{compensated_sum, Subset};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PLEnvelope {
    breakpoints: Vec<f64>,
    /// Inner segment slopes, `slopes[j-1]` for segment `j`.
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
    lead_slope: f64,
    epsilon_prime: f64,
    source: ConcaveSpec,
    /// True when the envelope coincides with `ψ` on all of `[0, ∞)`.
    exact: bool,
}

impl PLEnvelope {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn lead_slope(&self) -> f64 {
        self.lead_slope
    }

    pub fn epsilon_prime(&self) -> f64 {
        self.epsilon_prime
    }

    pub fn source(&self) -> &ConcaveSpec {
        &self.source
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Number of segments including the lead chord (= number of breakpoints).
    pub fn segment_count(&self) -> usize {
        self.slopes.len() + 1
    }

    /// `(slope, intercept)` of segment `j`.
    pub fn segment(&self, j: usize) -> (f64, f64) {
        if j == 0 {
            (self.lead_slope, 0.0)
        } else {
            (self.slopes[j - 1], self.intercepts[j - 1])
        }
    }

    /// Load interval on which segment `j` is the active piece.
    pub fn segment_range(&self, j: usize) -> (f64, f64) {
        let last = self.segment_count() - 1;
        let hi = if self.exact && j == last {
            f64::INFINITY
        } else {
            self.breakpoints[j]
        };
        let lo = if j == 0 { 0.0 } else { self.breakpoints[j - 1] };
        (lo, hi)
    }

    /// `min_j (s_j y + c_j)`; past the last breakpoint of a grid envelope the
    /// value is held at `ψ(b^N)` so it stays below `ψ`.
    pub fn eval(&self, y: f64) -> f64 {
        let mut best = self.lead_slope * y;
        for (s, c) in self.slopes.iter().zip(&self.intercepts) {
            best = best.min(s * y + c);
        }
        if !self.exact {
            let last = *self.breakpoints.last().expect("nonempty");
            if y > last {
                best = best.min(self.source.eval(last));
            }
        }
        best
    }
}

/// Ratio of consecutive breakpoints, `1 + ε'`.
fn grid_ratio(spec: &ConcaveSpec, epsilon: f64) -> f64 {
    (1.0 + epsilon).powf(1.0 / spec.growth_exponent())
}

pub fn build_envelope(spec: &ConcaveSpec, l: f64, u: f64, epsilon: f64) -> Result<PLEnvelope> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::param("epsilon", format!("{epsilon} must be > 0")));
    }
    if !(l.is_finite() && u.is_finite() && l > 0.0 && u >= l) {
        return Err(Error::param("range", format!("need 0 < l <= u, got l={l}, u={u}")));
    }
    spec.validate()?;

    let (breakpoints, epsilon_prime, exact) = match spec {
        ConcaveSpec::ExplicitPl { points } => (points[1..].iter().map(|p| p.0).collect::<Vec<_>>(), 0.0, true),
        _ => {
            let ratio = grid_ratio(spec, epsilon);
            let mut bps = vec![l];
            if u > l {
                let steps = ((u / l).ln() / ratio.ln() - 1e-9).ceil().max(1.0) as i32;
                bps.extend((1..=steps).map(|j| l * ratio.powi(j)));
                if *bps.last().unwrap() < u * (1.0 - 1e-12) {
                    bps.push(l * ratio.powi(steps + 1));
                }
            }
            (bps, ratio - 1.0, false)
        }
    };

    let b0 = breakpoints[0];
    let lead_slope = spec.eval(b0) / b0;
    let mut slopes = Vec::with_capacity(breakpoints.len() - 1);
    let mut intercepts = Vec::with_capacity(breakpoints.len() - 1);
    for w in breakpoints.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (fp, fq) = (spec.eval(p), spec.eval(q));
        let s = (fq - fp) / (q - p);
        slopes.push(s);
        intercepts.push(fp - s * p);
    }
    Ok(PLEnvelope {
        breakpoints,
        slopes,
        intercepts,
        lead_slope,
        epsilon_prime,
        source: spec.clone(),
        exact,
    })
}

pub fn eval_envelope(env: &PLEnvelope, y: f64) -> f64 {
    env.eval(y)
}

/// Load range `(l_i, u_i)` of component `i`.
///
/// With a constraint the range is the exact min / max of `w_i` over the
/// family, falling back to `w_i(V)` when maximization is unsupported and to
/// the smallest positive weight when the family reaches load zero. Without a
/// constraint it is `(min positive w_i(j), w_i(V))`.
pub fn component_range(f: &CooperativeCost, i: usize, constraint: Option<&ConstraintSpec>) -> Result<(f64, f64)> {
    let w = &f
        .components()
        .get(i)
        .ok_or_else(|| Error::param("component", format!("index {i} out of range")))?
        .weights;
    let Some(min_pos) = w.min_positive() else {
        return Err(Error::Degenerate(format!("component {i} has an all-zero weight vector")));
    };
    let total = w.total();
    let Some(c) = constraint else {
        return Ok((min_pos, total));
    };
    let lo = solve_linear(c, w)?.objective;
    let hi = match solve_linear_max(c, w)? {
        MaxSolve::Solved(r) => r.objective,
        MaxSolve::Unsupported => total,
    };
    let lo = if lo > 0.0 { lo } else { min_pos };
    Ok((lo, hi.max(lo)))
}

/// Envelopes aligned with a cost's components; `None` marks an all-zero
/// (constant) component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PLCost {
    envelopes: Vec<Option<PLEnvelope>>,
    epsilon: f64,
}

impl PLCost {
    pub fn build(f: &CooperativeCost, epsilon: f64, constraint: Option<&ConstraintSpec>) -> Result<Self> {
        let mut envelopes = Vec::with_capacity(f.rank());
        for (i, comp) in f.components().iter().enumerate() {
            if comp.weights.is_zero() {
                envelopes.push(None);
                continue;
            }
            let (l, u) = component_range(f, i, constraint)?;
            envelopes.push(Some(build_envelope(&comp.concave, l, u, epsilon)?));
        }
        Ok(PLCost { envelopes, epsilon })
    }

    pub fn envelopes(&self) -> &[Option<PLEnvelope>] {
        &self.envelopes
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// True when every envelope is exact, so `f^PL = f`.
    pub fn is_exact(&self) -> bool {
        self.envelopes.iter().flatten().all(|e| e.exact)
    }

    /// `Π_i N_i` over nondegenerate components.
    pub fn piece_count(&self) -> u128 {
        self.envelopes
            .iter()
            .flatten()
            .map(|e| e.segment_count() as u128)
            .product()
    }

    pub fn eval_loads(&self, loads: &[f64]) -> f64 {
        compensated_sum(
            self.envelopes
                .iter()
                .zip(loads)
                .map(|(e, &y)| e.as_ref().map_or(0.0, |e| e.eval(y))),
        )
    }

    pub fn eval(&self, f: &CooperativeCost, set: &[usize]) -> f64 {
        self.eval_loads(&f.loads(set))
    }

    /// Upper-bound factor of the sandwich (`1` when exact).
    pub fn sandwich_factor(&self) -> f64 {
        if self.is_exact() {
            1.0
        } else {
            1.0 + self.epsilon
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub passed: bool,
    pub subsets_checked: usize,
    /// Largest observed `f(X) / f^PL(X)` (1 when both vanish).
    pub max_ratio: f64,
    pub witness: Option<Subset>,
}

const SANDWICH_SLACK: f64 = 1e-12;

fn sandwich_over(f: &CooperativeCost, plc: &PLCost, sets: impl Iterator<Item = Subset>) -> SandwichReport {
    let bound = plc.sandwich_factor();
    let mut report = SandwichReport {
        passed: true,
        subsets_checked: 0,
        max_ratio: 1.0,
        witness: None,
    };
    for x in sets {
        let loads = f.loads(x.as_slice());
        let exact = f.eval_loads(&loads);
        let approx = plc.eval_loads(&loads);
        report.subsets_checked += 1;
        let ok = approx <= exact * (1.0 + SANDWICH_SLACK) + 1e-300 && exact <= bound * approx * (1.0 + SANDWICH_SLACK);
        if approx > 0.0 {
            report.max_ratio = report.max_ratio.max(exact / approx);
        } else if exact > 0.0 {
            report.max_ratio = f64::INFINITY;
        }
        if !ok && report.passed {
            report.passed = false;
            report.witness = Some(x);
        }
    }
    report
}

/// Checks the sandwich on `samples` random subsets plus `∅` and `V`.
pub fn verify_sandwich(f: &CooperativeCost, plc: &PLCost, samples: usize, seed: u64) -> SandwichReport {
    let n = f.ground_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = (0..samples).map(move |_| {
        let p: f64 = rng.gen_range(0.0..1.0);
        (0..n).filter(|_| rng.gen_bool(p)).collect::<Subset>()
    });
    let sets = [Subset::empty(), Subset::full(n)].into_iter().chain(random);
    sandwich_over(f, plc, sets)
}

/// Checks the sandwich on all `2^n` subsets (`n <= 20`).
pub fn verify_sandwich_exhaustive(f: &CooperativeCost, plc: &PLCost) -> Result<SandwichReport> {
    let n = f.ground_size();
    if n > 20 {
        return Err(Error::TooLarge(format!("exhaustive sandwich check needs n <= 20, got {n}")));
    }
    Ok(sandwich_over(f, plc, (0..1u64 << n).map(Subset::from_mask)))
}
