#![allow(dead_code)]

use coopsub::linear::MatchingMode;
use coopsub::{ConcaveSpec, ConstraintSpec, CooperativeCost, SubmodularOracle, WeightVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    rand::SeedableRng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Power,
    Log1p,
    Truncation,
    ExplicitPl,
}

pub const FAMILIES: [Family; 4] = [Family::Power, Family::Log1p, Family::Truncation, Family::ExplicitPl];

pub fn concave(rng: &mut TestRng, family: Family) -> ConcaveSpec {
    match family {
        Family::Power => ConcaveSpec::power(rng.gen_range(0.3..=1.0)).unwrap(),
        Family::Log1p => ConcaveSpec::log1p(rng.gen_range(0.2..3.0)).unwrap(),
        Family::Truncation => ConcaveSpec::truncation(rng.gen_range(0.5..6.0)).unwrap(),
        Family::ExplicitPl => {
            let knots = rng.gen_range(1..=4);
            let mut slope = rng.gen_range(1.0..3.0);
            let (mut x, mut y) = (0.0, 0.0);
            let mut points = vec![(0.0, 0.0)];
            for _ in 0..knots {
                let dx = rng.gen_range(0.5..3.0);
                x += dx;
                y += slope * dx;
                points.push((x, y));
                slope *= rng.gen_range(0.2..0.9);
            }
            ConcaveSpec::explicit_pl(points).unwrap()
        }
    }
}

pub fn any_concave(rng: &mut TestRng) -> ConcaveSpec {
    let family = *FAMILIES.choose(rng).unwrap();
    concave(rng, family)
}

/// Weights in `[0.5, 3)` with roughly a quarter zeroed; never all zero.
pub fn weights(rng: &mut TestRng, n: usize) -> WeightVector {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.5..3.0) })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    WeightVector::new(w).unwrap()
}

pub fn cost_with(rng: &mut TestRng, n: usize, k: usize, mut pick: impl FnMut(&mut TestRng) -> ConcaveSpec) -> CooperativeCost {
    let comps = (0..k).map(|_| (pick(rng), weights(rng, n))).collect();
    CooperativeCost::new(comps).unwrap()
}

pub fn cost(rng: &mut TestRng, n: usize) -> CooperativeCost {
    let k = rng.gen_range(1..=3);
    cost_with(rng, n, k, any_concave)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Cardinality,
    PerfectMatching,
    MaxMatching,
    Path,
    Tree,
}

pub const VARIANTS: [Variant; 5] = [
    Variant::Cardinality,
    Variant::PerfectMatching,
    Variant::MaxMatching,
    Variant::Path,
    Variant::Tree,
];

fn add_extra(rng: &mut TestRng, edges: &mut Vec<(usize, usize)>, cap: usize, mut draw: impl FnMut(&mut TestRng) -> (usize, usize)) {
    let mut tries = 0;
    while edges.len() < cap && tries < 200 {
        tries += 1;
        let e = draw(rng);
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
}

/// Random constraint with at most `max_edges` ground elements (graph
/// variants) or exactly 12 (cardinality); always feasible.
pub fn constraint(rng: &mut TestRng, variant: Variant, max_edges: usize) -> ConstraintSpec {
    match variant {
        Variant::Cardinality => ConstraintSpec::CardinalityLb {
            ground_size: 12,
            min_size: rng.gen_range(1..=6),
        },
        Variant::PerfectMatching => {
            let m = rng.gen_range(2..=4);
            let mut perm: Vec<usize> = (0..m).collect();
            perm.shuffle(rng);
            let mut edges: Vec<(usize, usize)> = (0..m).map(|a| (a, perm[a])).collect();
            let cap = rng.gen_range(m..=max_edges.min(m * m));
            add_extra(rng, &mut edges, cap, |r| (r.gen_range(0..m), r.gen_range(0..m)));
            edges.shuffle(rng);
            ConstraintSpec::BipartiteMatching {
                left: m,
                right: m,
                edges,
                mode: MatchingMode::Perfect,
            }
        }
        Variant::MaxMatching => {
            let (l, r) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
            let mut edges = vec![(rng.gen_range(0..l), rng.gen_range(0..r))];
            let cap = rng.gen_range(3..=max_edges.min(l * r).max(3));
            add_extra(rng, &mut edges, cap, |g| (g.gen_range(0..l), g.gen_range(0..r)));
            ConstraintSpec::BipartiteMatching {
                left: l,
                right: r,
                edges,
                mode: MatchingMode::MaximumCardinality,
            }
        }
        Variant::Path => {
            let v = rng.gen_range(4..=10);
            let mut mid: Vec<usize> = (1..v - 1).collect();
            mid.shuffle(rng);
            let len = rng.gen_range(0..=mid.len());
            let mut route = vec![0];
            route.extend(&mid[..len]);
            route.push(v - 1);
            let mut arcs: Vec<(usize, usize)> = route.windows(2).map(|w| (w[0], w[1])).collect();
            let cap = rng.gen_range(arcs.len()..=max_edges.max(arcs.len()));
            add_extra(rng, &mut arcs, cap, |g| {
                let a = g.gen_range(0..v);
                let b = (a + g.gen_range(1..v)) % v;
                (a, b)
            });
            arcs.shuffle(rng);
            ConstraintSpec::ShortestPath {
                vertices: v,
                arcs,
                source: 0,
                target: v - 1,
            }
        }
        Variant::Tree => {
            let v = rng.gen_range(3..=10);
            let mut edges: Vec<(usize, usize)> = (1..v).map(|b| (rng.gen_range(0..b), b)).collect();
            let cap = rng.gen_range(edges.len()..=max_edges.max(edges.len()));
            add_extra(rng, &mut edges, cap, |g| {
                let a = g.gen_range(0..v);
                let b = (a + g.gen_range(1..v)) % v;
                (a.min(b), a.max(b))
            });
            edges.shuffle(rng);
            ConstraintSpec::SpanningTree { vertices: v, edges }
        }
    }
}

pub fn facility_location(rng: &mut TestRng, n: usize) -> SubmodularOracle {
    let rows = rng.gen_range(3..=8);
    let similarity = (0..rows)
        .map(|_| (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect())
        .collect();
    SubmodularOracle::FacilityLocation { similarity }
}

pub fn coverage(rng: &mut TestRng, n: usize) -> SubmodularOracle {
    let concepts = rng.gen_range(4..=10);
    let incidence = (0..n)
        .map(|_| (0..concepts).filter(|_| rng.gen_bool(0.3)).collect())
        .collect();
    let concept_weights = (0..concepts).map(|_| rng.gen_range(0.5..2.0)).collect();
    SubmodularOracle::WeightedCoverage {
        incidence,
        concept_weights,
    }
}

pub fn oracle(rng: &mut TestRng, n: usize) -> SubmodularOracle {
    if rng.gen_bool(0.5) {
        facility_location(rng, n)
    } else {
        coverage(rng, n)
    }
}

pub fn rel_le(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * a.abs().max(b.abs()).max(1e-300)
}

pub fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
