//! Diminishing-returns checks `f(j|S) >= f(j|T)` for `S ⊆ T`, `j ∉ T`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::SetFunction;
use crate::error::{Error, Result};
use crate::subset::Subset;

const EXHAUSTIVE_CAP: usize = 20;
const SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Every triple; requires `n <= 20` (intended for `n <= 10`).
    Exhaustive,
    /// `trials` random triples.
    Sampled { trials: usize },
    /// Exhaustive for `n <= 10`, sampled otherwise.
    Auto { trials: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub smaller: Subset,
    pub larger: Subset,
    pub element: usize,
    pub gain_smaller: f64,
    pub gain_larger: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubmodularityReport {
    pub passed: bool,
    pub triples_checked: u64,
    /// Largest `f(j|S) - f(j|T)`; zero (up to rounding) for modular functions.
    pub max_gap: f64,
    pub counterexample: Option<Witness>,
}

impl SubmodularityReport {
    pub fn is_modular(&self, tol: f64) -> bool {
        self.passed && self.max_gap <= tol
    }
}

pub fn check_submodularity(f: &dyn SetFunction, mode: CheckMode, seed: u64) -> Result<SubmodularityReport> {
    let n = f.ground_size();
    match mode {
        CheckMode::Exhaustive => {
            if n > EXHAUSTIVE_CAP {
                return Err(Error::TooLarge(format!(
                    "exhaustive submodularity check needs n <= {EXHAUSTIVE_CAP}, got {n}"
                )));
            }
            Ok(exhaustive(f, n))
        }
        CheckMode::Sampled { trials } => Ok(sampled(f, n, trials, seed)),
        CheckMode::Auto { trials } => {
            if n <= 10 {
                Ok(exhaustive(f, n))
            } else {
                Ok(sampled(f, n, trials, seed))
            }
        }
    }
}

fn exhaustive(f: &dyn SetFunction, n: usize) -> SubmodularityReport {
    let values: Vec<f64> = (0..1u64 << n).map(|m| f.eval(Subset::from_mask(m).as_slice())).collect();
    let mut report = SubmodularityReport {
        passed: true,
        triples_checked: 0,
        max_gap: 0.0,
        counterexample: None,
    };
    let full = (1u64 << n) - 1;
    for t in 0..=full {
        let outside = full & !t;
        // all S ⊆ T
        let mut s = t;
        loop {
            let mut rest = outside;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let bit = 1u64 << j;
                let gs = values[(s | bit) as usize] - values[s as usize];
                let gt = values[(t | bit) as usize] - values[t as usize];
                record(&mut report, s, t, j, gs, gt);
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & t;
        }
    }
    report
}

fn sampled(f: &dyn SetFunction, n: usize, trials: usize, seed: u64) -> SubmodularityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SubmodularityReport {
        passed: true,
        triples_checked: 0,
        max_gap: 0.0,
        counterexample: None,
    };
    if n < 1 {
        return report;
    }
    for _ in 0..trials {
        let j = rng.gen_range(0..n);
        let p_t: f64 = rng.gen_range(0.0..1.0);
        let p_s: f64 = rng.gen_range(0.0..1.0);
        let t: Vec<usize> = (0..n).filter(|&e| e != j && rng.gen_bool(p_t)).collect();
        let s: Vec<usize> = t.iter().copied().filter(|_| rng.gen_bool(p_s)).collect();
        let (s, t) = (Subset::from_elems(s), Subset::from_elems(t));
        let gs = f.eval(s.with(j).as_slice()) - f.eval(s.as_slice());
        let gt = f.eval(t.with(j).as_slice()) - f.eval(t.as_slice());
        report.triples_checked += 1;
        let gap = gs - gt;
        report.max_gap = report.max_gap.max(gap);
        if gap < -SLACK * (1.0 + gs.abs().max(gt.abs())) && report.passed {
            report.passed = false;
            report.counterexample = Some(Witness {
                smaller: s,
                larger: t,
                element: j,
                gain_smaller: gs,
                gain_larger: gt,
            });
        }
    }
    report
}

fn record(report: &mut SubmodularityReport, s: u64, t: u64, j: usize, gs: f64, gt: f64) {
    report.triples_checked += 1;
    let gap = gs - gt;
    report.max_gap = report.max_gap.max(gap);
    if report.passed && gap < -SLACK * (1.0 + gs.abs().max(gt.abs())) {
        report.passed = false;
        report.counterexample = Some(Witness {
            smaller: Subset::from_mask(s),
            larger: Subset::from_mask(t),
            element: j,
            gain_smaller: gs,
            gain_larger: gt,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concave::ConcaveSpec;
    use crate::cost::{CooperativeCost, WeightVector};

    /// `(w(X))²`: supermodular, used as a failing double.
    struct SquaredLoad(Vec<f64>);

    impl SetFunction for SquaredLoad {
        fn ground_size(&self) -> usize {
            self.0.len()
        }
        fn eval(&self, set: &[usize]) -> f64 {
            let y: f64 = set.iter().map(|&j| self.0[j]).sum();
            y * y
        }
    }

    #[test]
    fn concave_over_modular_passes() {
        let f = CooperativeCost::new(vec![
            (ConcaveSpec::power(0.5).unwrap(), WeightVector::new(vec![1.0, 2.0, 0.5, 3.0, 1.5, 0.0]).unwrap()),
            (ConcaveSpec::log1p(2.0).unwrap(), WeightVector::new(vec![0.0, 1.0, 1.0, 2.0, 0.5, 4.0]).unwrap()),
        ])
        .unwrap();
        let r = check_submodularity(&f, CheckMode::Exhaustive, 0).unwrap();
        assert!(r.passed);
        assert_eq!(r.triples_checked, 6 * 3u64.pow(5)); // Σ_T 2^|T| (n-|T|) = n·3^(n-1)
    }

    #[test]
    fn convex_composition_fails_with_witness() {
        let f = SquaredLoad(vec![1.0, 2.0, 1.0, 0.5]);
        let r = check_submodularity(&f, CheckMode::Exhaustive, 0).unwrap();
        assert!(!r.passed);
        let w = r.counterexample.unwrap();
        assert!(w.smaller.is_subset_of(&w.larger));
        assert!(!w.larger.contains(w.element));
        assert!(w.gain_smaller < w.gain_larger);
        let sampled = check_submodularity(&f, CheckMode::Sampled { trials: 500 }, 1).unwrap();
        assert!(!sampled.passed);
    }

    #[test]
    fn modular_passes_with_equality() {
        let f = CooperativeCost::modular(WeightVector::new(vec![0.5, 1.0, 2.0, 4.0, 8.0]).unwrap()).unwrap();
        let r = check_submodularity(&f, CheckMode::Exhaustive, 0).unwrap();
        assert!(r.is_modular(1e-12));
    }

    #[test]
    fn exhaustive_cap() {
        let f = CooperativeCost::modular(WeightVector::new(vec![1.0; 21]).unwrap()).unwrap();
        assert!(matches!(
            check_submodularity(&f, CheckMode::Exhaustive, 0),
            Err(Error::TooLarge(_))
        ));
        assert!(check_submodularity(&f, CheckMode::Auto { trials: 50 }, 0).unwrap().passed);
    }
}
