//! Ground sets, modular weights and low-rank cooperative costs
//! `f(X) = Σ_i ψ_i(w_i(X))`.

use serde::{Deserialize, Serialize};

use crate::concave::ConcaveSpec;
use crate::error::{Error, Result};
use crate::subset::{compensated_sum, Subset};

/// Any set function over `{0, .., n-1}`.
///
/// Implementations are immutable and safe to evaluate from many threads.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Value on a sorted, duplicate-free element list.
    fn eval(&self, set: &[usize]) -> f64;

    /// `f(X ∪ {j}) - f(X)`; `j` must not already be in `X`.
    fn marginal_gain(&self, set: &Subset, j: usize) -> Result<f64> {
        check_gain_args(self.ground_size(), set, j)?;
        Ok(self.eval(set.with(j).as_slice()) - self.eval(set.as_slice()))
    }
}

pub(crate) fn check_gain_args(n: usize, set: &Subset, j: usize) -> Result<()> {
    if j >= n {
        return Err(Error::Precondition(format!("element {j} outside ground set of size {n}")));
    }
    if set.contains(j) {
        return Err(Error::Precondition(format!("element {j} already in the set")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundSet {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        let g = GroundSet { n, labels: None };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "ground set must be nonempty"));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.n {
                return Err(Error::param("labels", format!("expected {} labels, got {}", self.n, labels.len())));
            }
        }
        Ok(())
    }
}

/// Nonnegative per-element weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let w = WeightVector(values);
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &v) in self.0.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param("weights", format!("entry {i} = {v} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    /// `w(X)` with compensated summation.
    pub fn sum_over(&self, set: &[usize]) -> f64 {
        compensated_sum(set.iter().map(|&j| self.0[j]))
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.0.iter().copied())
    }

    pub fn min_positive(&self) -> Option<f64> {
        self.0.iter().copied().filter(|&v| v > 0.0).min_by(f64::total_cmp)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub concave: ConcaveSpec,
    pub weights: WeightVector,
}

/// `f(X) = Σ_i ψ_i(w_i(X))` with `k >= 1` components over a common ground set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CooperativeCost {
    components: Vec<Component>,
}

impl CooperativeCost {
    pub fn new(components: Vec<(ConcaveSpec, WeightVector)>) -> Result<Self> {
        let f = CooperativeCost {
            components: components
                .into_iter()
                .map(|(concave, weights)| Component { concave, weights })
                .collect(),
        };
        f.validate()?;
        Ok(f)
    }

    /// Single modular component `w(X)`.
    pub fn modular(weights: WeightVector) -> Result<Self> {
        Self::new(vec![(ConcaveSpec::identity(), weights)])
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.components.first() else {
            return Err(Error::param("components", "need at least one component"));
        };
        let n = first.weights.len();
        if n == 0 {
            return Err(Error::param("weights", "weight vectors must be nonempty"));
        }
        for (i, c) in self.components.iter().enumerate() {
            c.concave.validate()?;
            c.weights.validate()?;
            if c.weights.len() != n {
                return Err(Error::param(
                    "weights",
                    format!("component {i} has {} weights, expected {n}", c.weights.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    /// Per-component loads `w_i(X)`.
    pub fn loads(&self, set: &[usize]) -> Vec<f64> {
        self.components.iter().map(|c| c.weights.sum_over(set)).collect()
    }

    pub fn eval_loads(&self, loads: &[f64]) -> f64 {
        compensated_sum(self.components.iter().zip(loads).map(|(c, &y)| c.concave.eval(y)))
    }

    /// Gain of `j` on top of a set with the given loads.
    pub fn gain_from_loads(&self, loads: &[f64], j: usize) -> f64 {
        compensated_sum(self.components.iter().zip(loads).map(|(c, &y)| {
            let wj = c.weights.get(j);
            if wj == 0.0 {
                0.0
            } else {
                c.concave.eval(y + wj) - c.concave.eval(y)
            }
        }))
    }
}

impl SetFunction for CooperativeCost {
    fn ground_size(&self) -> usize {
        self.components[0].weights.len()
    }

    fn eval(&self, set: &[usize]) -> f64 {
        self.eval_loads(&self.loads(set))
    }

    fn marginal_gain(&self, set: &Subset, j: usize) -> Result<f64> {
        check_gain_args(self.ground_size(), set, j)?;
        Ok(self.gain_from_loads(&self.loads(set.as_slice()), j))
    }
}
