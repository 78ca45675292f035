//! Library results against independent exhaustive computations.

mod common;

use common::*;
use coopsub::algorithms::curvature;
use coopsub::greedy::{greedy_knapsack, greedy_ratio, Evaluation, KnapsackMode};
use coopsub::linear::{solve_linear, MatchingMode};
use coopsub::{ConstraintSpec, CooperativeCost, SetFunction, WeightVector};
use rand::Rng;

fn masks(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..1u64 << n).map(move |m| (0..n).filter(|&j| m >> j & 1 == 1).collect())
}

fn modular(w: &WeightVector, set: &[usize]) -> f64 {
    set.iter().map(|&j| w.get(j)).sum()
}

#[test]
fn knapsack_greedy_against_enumeration() {
    let bound = (1.0 - 1.0 / std::f64::consts::E) / 2.0;
    for seed in 0..60 {
        let mut rng = rng(seed);
        let n = rng.gen_range(4..=10);
        let g = oracle(&mut rng, n);
        let w = weights(&mut rng, n);
        let budget = rng.gen_range(0.2..0.6) * w.values().iter().sum::<f64>();
        let opt = masks(n)
            .filter(|s| modular(&w, s) <= budget)
            .map(|s| g.eval(&s))
            .fold(0.0, f64::max);
        for mode in [KnapsackMode::MaxOfTwo, KnapsackMode::PartialEnumeration] {
            let r = greedy_knapsack(&g, &w, 0.0, budget, mode, Evaluation::Lazy).unwrap();
            assert!(modular(&w, r.set.as_slice()) <= budget);
            assert!(r.value >= bound * opt - 1e-9, "seed {seed}: {} vs {opt}", r.value);
        }
    }
}

#[test]
fn ratio_greedy_against_enumeration() {
    let factor = std::f64::consts::E / (std::f64::consts::E - 1.0);
    for seed in 0..60 {
        let mut rng = rng(100 + seed);
        let n = rng.gen_range(3..=10);
        let g = oracle(&mut rng, n);
        let w = weights(&mut rng, n);
        let offset = if seed % 2 == 0 { 0.0 } else { rng.gen_range(0.0..2.0) };
        let opt = masks(n)
            .filter_map(|s| {
                let gv = g.eval(&s);
                (gv > 0.0).then(|| (modular(&w, &s) + offset) / gv)
            })
            .fold(f64::INFINITY, f64::min);
        if !opt.is_finite() {
            continue;
        }
        let r = greedy_ratio(&w, offset, &g, Evaluation::Lazy).unwrap();
        let got = (modular(&w, r.set.as_slice()) + offset) / g.eval(r.set.as_slice());
        assert!((got - r.ratio).abs() <= 1e-9 * got.max(1.0));
        assert!(got <= factor * opt * (1.0 + 1e-9), "seed {seed}: {got} vs {opt}");
    }
}

#[test]
fn curvature_matches_definition() {
    for seed in 0..40 {
        let mut rng = rng(200 + seed);
        let n = rng.gen_range(2..=9);
        let f = cost(&mut rng, n);
        let set: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        if set.is_empty() {
            continue;
        }
        let singleton: f64 = set.iter().map(|&j| f.eval(&[j])).sum();
        if singleton == 0.0 {
            continue;
        }
        let total = f.eval(&set);
        let tails: f64 = set
            .iter()
            .map(|&j| {
                let rest: Vec<usize> = set.iter().copied().filter(|&e| e != j).collect();
                total - f.eval(&rest)
            })
            .sum();
        let kappa = 1.0 - tails / singleton;
        let m = set.len() as f64;
        let alpha = m / (1.0 + (m - 1.0) * (1.0 - kappa));
        let r = curvature(&f, &set).unwrap();
        assert!((r.average_curvature - kappa).abs() <= 1e-9, "seed {seed}");
        assert!((r.alpha - alpha).abs() <= 1e-9 * alpha, "seed {seed}");
    }
}

fn matching_ok(left: usize, right: usize, edges: &[(usize, usize)], set: &[usize]) -> bool {
    let mut l = vec![0; left];
    let mut r = vec![0; right];
    for &e in set {
        l[edges[e].0] += 1;
        r[edges[e].1] += 1;
    }
    l.iter().chain(&r).all(|&d| d <= 1)
}

#[test]
fn perfect_matching_against_enumeration() {
    for seed in 0..80 {
        let mut rng = rng(300 + seed);
        let c = constraint(&mut rng, Variant::PerfectMatching, 16);
        let ConstraintSpec::BipartiteMatching { left, right, ref edges, mode } = c else { unreachable!() };
        assert_eq!(mode, MatchingMode::Perfect);
        let w = weights(&mut rng, edges.len());
        let opt = masks(edges.len())
            .filter(|s| s.len() == left && matching_ok(left, right, edges, s))
            .map(|s| modular(&w, &s))
            .fold(f64::INFINITY, f64::min);
        let r = solve_linear(&c, &w).unwrap();
        assert!((r.objective - opt).abs() <= 1e-9 * opt.max(1.0), "seed {seed}: {} vs {opt}", r.objective);
    }
}

fn connects(vertices: usize, edges: &[(usize, usize)], set: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for &e in set {
        let (a, b) = (root(&mut parent, edges[e].0), root(&mut parent, edges[e].1));
        parent[a] = b;
    }
    let r0 = root(&mut parent, 0);
    (0..vertices).all(|v| root(&mut parent, v) == r0)
}

#[test]
fn spanning_tree_against_enumeration() {
    for seed in 0..80 {
        let mut rng = rng(400 + seed);
        let c = constraint(&mut rng, Variant::Tree, 14);
        let ConstraintSpec::SpanningTree { vertices, ref edges } = c else { unreachable!() };
        let w = weights(&mut rng, edges.len());
        // nonnegative weights: the cheapest connected subgraph is a tree
        let opt = masks(edges.len())
            .filter(|s| connects(vertices, edges, s))
            .map(|s| modular(&w, &s))
            .fold(f64::INFINITY, f64::min);
        let r = solve_linear(&c, &w).unwrap();
        assert_eq!(r.set.len(), vertices - 1);
        assert!((r.objective - opt).abs() <= 1e-9 * opt.max(1.0), "seed {seed}: {} vs {opt}", r.objective);
    }
}

#[test]
fn cooperative_value_matches_formula() {
    for seed in 0..50 {
        let mut rng = rng(500 + seed);
        let n = rng.gen_range(1..=12);
        let f: CooperativeCost = cost(&mut rng, n);
        let set: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let direct: f64 = f
            .components()
            .iter()
            .map(|c| c.concave.eval(modular(&c.weights, &set)))
            .sum();
        assert!((f.eval(&set) - direct).abs() <= 1e-12 * direct.max(1.0));
    }
}
