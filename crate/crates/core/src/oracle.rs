//! Monotone submodular coverage functions `g` used by the cover, knapsack and
//! ratio programs.

use serde::{Deserialize, Serialize};

use crate::cost::{check_gain_args, CooperativeCost, SetFunction};
use crate::error::{Error, Result};
use crate::subset::{compensated_sum, Subset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SubmodularOracle {
    /// `g(A) = Σ_r max_{j ∈ A} similarity[r][j]`; one row per represented
    /// point, one column per ground element. Entries must be nonnegative.
    FacilityLocation { similarity: Vec<Vec<f64>> },
    /// `g(A) = Σ` weights of concepts touched by `A`.
    WeightedCoverage {
        incidence: Vec<Vec<usize>>,
        concept_weights: Vec<f64>,
    },
    /// `g(A) = ½ log det(I + K_A / noise_variance)`.
    LogDet { kernel: Vec<Vec<f64>>, noise_variance: f64 },
    CooperativeCost(CooperativeCost),
}

impl SubmodularOracle {
    pub fn validate(&self) -> Result<()> {
        match self {
            SubmodularOracle::FacilityLocation { similarity } => {
                let n = similarity.first().map_or(0, Vec::len);
                if n == 0 {
                    return Err(Error::param("similarity", "matrix must be nonempty"));
                }
                for row in similarity {
                    if row.len() != n {
                        return Err(Error::param("similarity", "rows must have equal length"));
                    }
                    if row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                        return Err(Error::param("similarity", "entries must be finite and >= 0"));
                    }
                }
            }
            SubmodularOracle::WeightedCoverage {
                incidence,
                concept_weights,
            } => {
                if incidence.is_empty() {
                    return Err(Error::param("incidence", "need at least one element"));
                }
                if concept_weights.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::param("concept_weights", "entries must be finite and >= 0"));
                }
                for concepts in incidence {
                    if concepts.iter().any(|&c| c >= concept_weights.len()) {
                        return Err(Error::param("incidence", "concept index out of range"));
                    }
                }
            }
            SubmodularOracle::LogDet {
                kernel,
                noise_variance,
            } => {
                if !(noise_variance.is_finite() && *noise_variance > 0.0) {
                    return Err(Error::param("noise_variance", "must be > 0"));
                }
                let n = kernel.len();
                if n == 0 {
                    return Err(Error::param("kernel", "matrix must be nonempty"));
                }
                for (i, row) in kernel.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::param("kernel", "matrix must be square"));
                    }
                    for j in 0..i {
                        if (row[j] - kernel[j][i]).abs() > 1e-9 * (1.0 + row[j].abs()) {
                            return Err(Error::param("kernel", "matrix must be symmetric"));
                        }
                    }
                }
                // positive semidefinite kernel <=> I + K/σ² admits a Cholesky factor
                let mut state = self.state();
                for j in 0..n {
                    if !state.gain(j).is_finite() {
                        return Err(Error::param("kernel", "matrix must be positive semidefinite"));
                    }
                    state.insert(j);
                }
            }
            SubmodularOracle::CooperativeCost(f) => f.validate()?,
        }
        Ok(())
    }

    /// Fresh incremental evaluator positioned at the empty set.
    pub fn state(&self) -> OracleState<'_> {
        let inner = match self {
            SubmodularOracle::FacilityLocation { similarity } => Inner::Facility {
                best: vec![0.0; similarity.len()],
            },
            SubmodularOracle::WeightedCoverage { concept_weights, .. } => Inner::Coverage {
                covered: vec![false; concept_weights.len()],
            },
            SubmodularOracle::LogDet { .. } => Inner::LogDet { rows: Vec::new() },
            SubmodularOracle::CooperativeCost(f) => Inner::Coop {
                loads: vec![0.0; f.rank()],
            },
        };
        OracleState {
            oracle: self,
            inner,
            members: Vec::new(),
        }
    }

    pub fn state_at(&self, set: &[usize]) -> OracleState<'_> {
        let mut s = self.state();
        for &j in set {
            s.insert(j);
        }
        s
    }
}

impl SetFunction for SubmodularOracle {
    fn ground_size(&self) -> usize {
        match self {
            SubmodularOracle::FacilityLocation { similarity } => similarity[0].len(),
            SubmodularOracle::WeightedCoverage { incidence, .. } => incidence.len(),
            SubmodularOracle::LogDet { kernel, .. } => kernel.len(),
            SubmodularOracle::CooperativeCost(f) => f.ground_size(),
        }
    }

    fn eval(&self, set: &[usize]) -> f64 {
        self.state_at(set).value()
    }

    fn marginal_gain(&self, set: &Subset, j: usize) -> Result<f64> {
        check_gain_args(self.ground_size(), set, j)?;
        Ok(self.state_at(set.as_slice()).gain(j))
    }
}

#[derive(Clone, Debug)]
enum Inner {
    Facility { best: Vec<f64> },
    Coverage { covered: Vec<bool> },
    /// Rows of the Cholesky factor of `I + K_A/σ²`, in insertion order.
    LogDet { rows: Vec<Vec<f64>> },
    Coop { loads: Vec<f64> },
}

/// Incremental evaluator for one growing set.
#[derive(Clone, Debug)]
pub struct OracleState<'a> {
    oracle: &'a SubmodularOracle,
    inner: Inner,
    members: Vec<usize>,
}

impl OracleState<'_> {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn gain(&self, j: usize) -> f64 {
        match (&self.inner, self.oracle) {
            (Inner::Facility { best }, SubmodularOracle::FacilityLocation { similarity }) => {
                compensated_sum(similarity.iter().zip(best).map(|(row, &b)| (row[j] - b).max(0.0)))
            }
            (
                Inner::Coverage { covered },
                SubmodularOracle::WeightedCoverage {
                    incidence,
                    concept_weights,
                },
            ) => {
                let mut seen: Vec<usize> = incidence[j].iter().copied().filter(|&c| !covered[c]).collect();
                seen.sort_unstable();
                seen.dedup();
                compensated_sum(seen.into_iter().map(|c| concept_weights[c]))
            }
            (Inner::LogDet { rows }, SubmodularOracle::LogDet { kernel, noise_variance }) => {
                let (_, d) = schur_step(rows, &self.members, kernel, *noise_variance, j);
                0.5 * d.ln()
            }
            (Inner::Coop { loads }, SubmodularOracle::CooperativeCost(f)) => f.gain_from_loads(loads, j),
            _ => unreachable!("state does not match its oracle"),
        }
    }

    pub fn insert(&mut self, j: usize) {
        match (&mut self.inner, self.oracle) {
            (Inner::Facility { best }, SubmodularOracle::FacilityLocation { similarity }) => {
                for (b, row) in best.iter_mut().zip(similarity) {
                    *b = b.max(row[j]);
                }
            }
            (Inner::Coverage { covered }, SubmodularOracle::WeightedCoverage { incidence, .. }) => {
                for &c in &incidence[j] {
                    covered[c] = true;
                }
            }
            (Inner::LogDet { rows }, SubmodularOracle::LogDet { kernel, noise_variance }) => {
                let (mut v, d) = schur_step(rows, &self.members, kernel, *noise_variance, j);
                v.push(d.sqrt());
                rows.push(v);
            }
            (Inner::Coop { loads }, SubmodularOracle::CooperativeCost(f)) => {
                for (l, c) in loads.iter_mut().zip(f.components()) {
                    *l += c.weights.get(j);
                }
            }
            _ => unreachable!("state does not match its oracle"),
        }
        self.members.push(j);
    }

    pub fn value(&self) -> f64 {
        match (&self.inner, self.oracle) {
            (Inner::Facility { best }, _) => compensated_sum(best.iter().copied()),
            (Inner::Coverage { covered }, SubmodularOracle::WeightedCoverage { concept_weights, .. }) => {
                compensated_sum(covered.iter().zip(concept_weights).filter(|(c, _)| **c).map(|(_, w)| *w))
            }
            (Inner::LogDet { rows }, _) => compensated_sum(rows.iter().enumerate().map(|(i, r)| r[i].ln())),
            (Inner::Coop { loads }, SubmodularOracle::CooperativeCost(f)) => f.eval_loads(loads),
            _ => unreachable!("state does not match its oracle"),
        }
    }
}

/// Forward substitution `L v = M_{A,j}` and the Schur complement
/// `M_jj - |v|²` for `M = I + K/σ²`.
fn schur_step(rows: &[Vec<f64>], members: &[usize], kernel: &[Vec<f64>], sigma2: f64, j: usize) -> (Vec<f64>, f64) {
    let mut v = Vec::with_capacity(members.len() + 1);
    for (r, &a) in members.iter().enumerate() {
        let mut acc = kernel[a][j] / sigma2;
        for (c, vc) in v.iter().enumerate() {
            acc -= rows[r][c] * vc;
        }
        v.push(acc / rows[r][r]);
    }
    let d = 1.0 + kernel[j][j] / sigma2 - v.iter().map(|x| x * x).sum::<f64>();
    (v, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concave::ConcaveSpec;
    use crate::cost::WeightVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_facility(rng: &mut ChaCha8Rng, rows: usize, n: usize) -> SubmodularOracle {
        SubmodularOracle::FacilityLocation {
            similarity: (0..rows).map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()).collect(),
        }
    }

    fn rbf_logdet(rng: &mut ChaCha8Rng, n: usize) -> SubmodularOracle {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect();
        let kernel = pts
            .iter()
            .map(|a| {
                pts.iter()
                    .map(|b| (-((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)) / 0.1).exp())
                    .collect()
            })
            .collect();
        SubmodularOracle::LogDet {
            kernel,
            noise_variance: 0.5,
        }
    }

    /// Dense determinant by Gaussian elimination with partial pivoting.
    fn logdet_dense(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        let mut a = m.to_vec();
        let mut acc = 0.0;
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
            a.swap(c, p);
            acc += a[c][c].abs().ln();
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
        acc
    }

    #[test]
    fn logdet_matches_dense_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = rbf_logdet(&mut rng, 8);
        let SubmodularOracle::LogDet { kernel, noise_variance } = &g else { unreachable!() };
        let set = [1usize, 3, 4, 7];
        let m: Vec<Vec<f64>> = set
            .iter()
            .map(|&a| {
                set.iter()
                    .map(|&b| if a == b { 1.0 } else { 0.0 } + kernel[a][b] / noise_variance)
                    .collect()
            })
            .collect();
        let expected = 0.5 * logdet_dense(&m);
        assert!((g.eval(&set) - expected).abs() <= 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn incremental_gain_agrees_with_full_evaluations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let oracles = [
            rbf_logdet(&mut rng, 10),
            random_facility(&mut rng, 6, 10),
            SubmodularOracle::WeightedCoverage {
                incidence: (0..10).map(|_| (0..3).map(|_| rng.gen_range(0..8)).collect()).collect(),
                concept_weights: (0..8).map(|_| rng.gen_range(0.1..2.0)).collect(),
            },
            SubmodularOracle::CooperativeCost(
                CooperativeCost::new(vec![(
                    ConcaveSpec::power(0.5).unwrap(),
                    WeightVector::new((0..10).map(|_| rng.gen_range(0.0..3.0)).collect()).unwrap(),
                )])
                .unwrap(),
            ),
        ];
        for g in &oracles {
            g.validate().unwrap();
            assert_eq!(g.eval(&[]), 0.0);
            for _ in 0..100 {
                let x: Subset = (0..10).filter(|_| rng.gen_bool(0.4)).collect();
                let j = rng.gen_range(0..10);
                if x.contains(j) {
                    assert!(g.marginal_gain(&x, j).is_err());
                    continue;
                }
                let gain = g.marginal_gain(&x, j).unwrap();
                let diff = g.eval(x.with(j).as_slice()) - g.eval(x.as_slice());
                assert!(gain >= -1e-9);
                assert!((gain - diff).abs() <= 1e-7 * diff.abs().max(1e-3), "{gain} vs {diff}");
            }
        }
    }

    #[test]
    fn facility_location_diminishing_returns() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_facility(&mut rng, 5, 6);
        // every S ⊆ T ⊆ V, j ∉ T
        for t in 0u64..64 {
            let mut s = t;
            loop {
                for j in (0..6).filter(|j| t & (1 << j) == 0) {
                    let ss = Subset::from_mask(s);
                    let tt = Subset::from_mask(t);
                    let gs = g.eval(ss.with(j).as_slice()) - g.eval(ss.as_slice());
                    let gt = g.eval(tt.with(j).as_slice()) - g.eval(tt.as_slice());
                    assert!(gs >= gt - 1e-9);
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
        }
    }

    #[test]
    fn rejects_indefinite_kernel() {
        let g = SubmodularOracle::LogDet {
            kernel: vec![vec![1.0, 3.0], vec![3.0, 1.0]],
            noise_variance: 0.1,
        };
        assert!(g.validate().is_err());
    }
}
