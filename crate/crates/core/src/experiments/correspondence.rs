use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::kmeans::kmeans;
use crate::algorithms::{pla_solve, sga_solve_cooperative, PlaOptions, Problem, SgaOptions};
use crate::concave::ConcaveSpec;
use crate::cost::{CooperativeCost, SetFunction, WeightVector};
use crate::error::{Error, Result};
use crate::linear::{solve_linear, ConstraintSpec, MatchingMode};
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceParams {
    pub points: usize,
    pub clusters: usize,
    /// Standard deviation of the descriptor perturbation between images.
    pub noise: f64,
    /// Fraction of image-2 descriptors replaced by unrelated ones.
    pub outlier_fraction: f64,
    pub descriptor_dim: usize,
    pub seed: u64,
}

impl Default for CorrespondenceParams {
    fn default() -> Self {
        CorrespondenceParams {
            points: 30,
            clusters: 3,
            noise: 0.8,
            outlier_fraction: 0.1,
            descriptor_dim: 8,
            seed: 0,
        }
    }
}

/// Raw two-image data: positions and descriptors per key point, plus the
/// ground truth `truth[a] = b` meaning point `a` of image 1 is point `b` of
/// image 2. Real data can be supplied in this form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointPairs {
    pub positions1: Vec<[f64; 2]>,
    pub positions2: Vec<[f64; 2]>,
    pub descriptors1: Vec<Vec<f64>>,
    pub descriptors2: Vec<Vec<f64>>,
    pub truth: Vec<usize>,
}

impl PointPairs {
    pub fn validate(&self) -> Result<()> {
        let n = self.positions1.len();
        if n == 0 {
            return Err(Error::param("positions1", "no points"));
        }
        if self.positions2.len() != n || self.descriptors1.len() != n || self.descriptors2.len() != n {
            return Err(Error::param("positions2", "both images need the same number of points and descriptors"));
        }
        let dim = self.descriptors1[0].len();
        if self.descriptors1.iter().chain(&self.descriptors2).any(|d| d.len() != dim) {
            return Err(Error::param("descriptors", "descriptor lengths differ"));
        }
        let mut seen = vec![false; n];
        for &b in &self.truth {
            if b >= n || std::mem::replace(&mut seen[b], true) {
                return Err(Error::param("truth", "must be a permutation of the image-2 indices"));
            }
        }
        if self.truth.len() != n {
            return Err(Error::param("truth", "must have one entry per point"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceInstance {
    pub data: PointPairs,
    pub clusters: usize,
    pub clusters1: Vec<usize>,
    pub clusters2: Vec<usize>,
    /// Complete bipartite graph, edge `a * n + b` joins `a` to `b`.
    pub edges: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    /// Group of each edge; `group_pairs.len()` marks the residual group.
    pub edge_groups: Vec<usize>,
    /// `(image-1 cluster, image-2 cluster)` behind each group, largest
    /// first-pass intersection first.
    pub group_pairs: Vec<(usize, usize)>,
    pub cost: CooperativeCost,
    pub constraint: ConstraintSpec,
}

fn sample_points(p: &CorrespondenceParams) -> Result<PointPairs> {
    if p.points == 0 || p.clusters == 0 || p.clusters > p.points {
        return Err(Error::param("clusters", format!("need points >= clusters >= 1, got {} and {}", p.points, p.clusters)));
    }
    if p.descriptor_dim == 0 {
        return Err(Error::param("descriptor_dim", "must be positive"));
    }
    if !(p.noise.is_finite() && p.noise >= 0.0) {
        return Err(Error::param("noise", "must be finite and >= 0"));
    }
    if !(0.0..=1.0).contains(&p.outlier_fraction) {
        return Err(Error::param("outlier_fraction", "must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let centers: Vec<[f64; 2]> = (0..p.clusters)
        .map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
        .collect();
    let n = p.points;
    let positions1: Vec<[f64; 2]> = (0..n)
        .map(|a| {
            let c = centers[a % p.clusters];
            [c[0] + 0.7 * unit.sample(&mut rng), c[1] + 0.7 * unit.sample(&mut rng)]
        })
        .collect();
    let descriptors1: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p.descriptor_dim).map(|_| unit.sample(&mut rng)).collect())
        .collect();
    let mut truth: Vec<usize> = (0..n).collect();
    truth.shuffle(&mut rng);
    let mut positions2 = vec![[0.0; 2]; n];
    let mut descriptors2 = vec![Vec::new(); n];
    for a in 0..n {
        let b = truth[a];
        positions2[b] = [
            positions1[a][0] + 0.05 * unit.sample(&mut rng),
            positions1[a][1] + 0.05 * unit.sample(&mut rng),
        ];
        let outlier = rng.gen_bool(p.outlier_fraction);
        descriptors2[b] = descriptors1[a]
            .iter()
            .map(|&d| {
                let z = unit.sample(&mut rng);
                if outlier {
                    z
                } else {
                    d + p.noise * z
                }
            })
            .collect();
    }
    Ok(PointPairs {
        positions1,
        positions2,
        descriptors1,
        descriptors2,
        truth,
    })
}

/// Synthetic clustered key points in two images related by a permutation.
pub fn gen_correspondence(p: &CorrespondenceParams) -> Result<CorrespondenceInstance> {
    let data = sample_points(p)?;
    build_correspondence(data, p.clusters, p.seed)
}

/// Cluster each image, take a first-pass minimum matching, and group the
/// edges between the `k` cluster pairs it uses most; each group gets a
/// square-root discount and all remaining edges are charged linearly.
pub fn build_correspondence(data: PointPairs, k: usize, seed: u64) -> Result<CorrespondenceInstance> {
    data.validate()?;
    let n = data.positions1.len();
    if k == 0 || k > n {
        return Err(Error::param("clusters", format!("need 1 <= k <= {n}, got {k}")));
    }
    let clusters1 = kmeans(&data.positions1, k, seed ^ 0x9e37_79b9_7f4a_7c15);
    let clusters2 = kmeans(&data.positions2, k, seed ^ 0xc2b2_ae3d_27d4_eb4f);
    let mut edges = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            edges.push((a, b));
            let d2: f64 = data.descriptors1[a]
                .iter()
                .zip(&data.descriptors2[b])
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            weights.push(d2.sqrt());
        }
    }
    let constraint = ConstraintSpec::BipartiteMatching {
        left: n,
        right: n,
        edges: edges.clone(),
        mode: MatchingMode::Perfect,
    };
    let w = WeightVector::new(weights.clone())?;
    let first = solve_linear(&constraint, &w)?;
    let mut counts = vec![vec![0usize; k]; k];
    for e in first.set.iter() {
        let (a, b) = edges[e];
        counts[clusters1[a]][clusters2[b]] += 1;
    }
    let mut pairs: Vec<(usize, usize, usize)> = (0..k)
        .flat_map(|l| (0..k).map(move |s| (l, s)))
        .map(|(l, s)| (counts[l][s], l, s))
        .filter(|&(c, _, _)| c > 0)
        .collect();
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    pairs.truncate(k);
    let group_pairs: Vec<(usize, usize)> = pairs.iter().map(|&(_, l, s)| (l, s)).collect();
    let residual = group_pairs.len();
    let edge_groups: Vec<usize> = edges
        .iter()
        .map(|&(a, b)| {
            group_pairs
                .iter()
                .position(|&(l, s)| clusters1[a] == l && clusters2[b] == s)
                .unwrap_or(residual)
        })
        .collect();
    let mut components = Vec::with_capacity(residual + 1);
    for gi in 0..=residual {
        let masked: Vec<f64> = weights
            .iter()
            .zip(&edge_groups)
            .map(|(&w, &g)| if g == gi { w } else { 0.0 })
            .collect();
        let spec = if gi == residual {
            ConcaveSpec::identity()
        } else {
            ConcaveSpec::power(0.5)?
        };
        components.push((spec, WeightVector::new(masked)?));
    }
    let cost = CooperativeCost::new(components)?;
    Ok(CorrespondenceInstance {
        data,
        clusters: k,
        clusters1,
        clusters2,
        edges,
        weights,
        edge_groups,
        group_pairs,
        cost,
        constraint,
    })
}

impl CorrespondenceInstance {
    /// Fraction of image-1 points matched to their true partner.
    pub fn accuracy(&self, matching: &Subset) -> f64 {
        let n = self.data.truth.len();
        let hits = matching
            .iter()
            .filter(|&e| {
                let (a, b) = self.edges[e];
                self.data.truth[a] == b
            })
            .count();
        hits as f64 / n as f64
    }

    /// Edge set of the ground-truth matching.
    pub fn truth_matching(&self) -> Subset {
        let n = self.data.truth.len();
        Subset::from_elems((0..n).map(|a| a * n + self.data.truth[a]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingOutcome {
    pub set: Subset,
    /// Cooperative cost `f` of the matching.
    pub objective: f64,
    pub accuracy: f64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingComparison {
    pub pla: MatchingOutcome,
    pub sga: MatchingOutcome,
    pub modular: MatchingOutcome,
}

/// Minimum cooperative-cost perfect matching three ways: piecewise-linear
/// approximation, supergradient descent, and the plain minimum-weight
/// matching that ignores the discounts.
pub fn run_matching_experiment(inst: &CorrespondenceInstance, epsilon: f64, workers: usize) -> Result<MatchingComparison> {
    let started = std::time::Instant::now();
    let w = WeightVector::new(inst.weights.clone())?;
    let modular = solve_linear(&inst.constraint, &w)?;
    let modular = MatchingOutcome {
        objective: inst.cost.eval(modular.set.as_slice()),
        accuracy: inst.accuracy(&modular.set),
        set: modular.set,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let problem = Problem::ConstrainedMin {
        constraint: &inst.constraint,
    };
    let opts = PlaOptions {
        epsilon,
        workers,
        seeds: vec![modular.set.clone()],
        ..PlaOptions::default()
    };
    let pla = pla_solve(problem, &inst.cost, &opts)?;
    let sga = sga_solve_cooperative(problem, &inst.cost, &SgaOptions::default())?;
    let outcome = |r: crate::algorithms::SolveReport| MatchingOutcome {
        objective: r.objective,
        accuracy: inst.accuracy(&r.set),
        set: r.set,
        wall_time_ms: r.wall_time_ms,
    };
    Ok(MatchingComparison {
        pla: outcome(pla),
        sga: outcome(sga),
        modular,
    })
}
