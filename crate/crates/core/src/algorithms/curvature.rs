use serde::{Deserialize, Serialize};

use crate::cost::SetFunction;
use crate::error::{Error, Result};
use crate::subset::compensated_sum;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    /// `1 - Σ_{j∈X} f(j | X∖j) / Σ_{j∈X} f(j)`.
    pub average_curvature: f64,
    /// `|X| / (1 + (|X| - 1)(1 - κ̂))`.
    pub alpha: f64,
    /// `1 - min_j f(j | V∖j) / f(j)` over elements with `f(j) > 0`.
    pub worst_case_curvature: f64,
}

pub fn curvature(f: &dyn SetFunction, set: &[usize]) -> Result<CurvatureReport> {
    if set.is_empty() {
        return Err(Error::Degenerate("curvature of the empty set".into()));
    }
    let n = f.ground_size();
    if let Some(&bad) = set.iter().find(|&&j| j >= n) {
        return Err(Error::param("set", format!("element {bad} outside ground set of size {n}")));
    }
    let fx = f.eval(set);
    let singles: Vec<f64> = (0..n).map(|j| f.eval(&[j])).collect();
    let denom = compensated_sum(set.iter().map(|&j| singles[j]));
    if !(denom > 0.0) {
        return Err(Error::Degenerate("Σ f(j) over the set is zero".into()));
    }
    let mut rest = Vec::with_capacity(set.len());
    let numer = compensated_sum(set.iter().map(|&j| {
        rest.clear();
        rest.extend(set.iter().copied().filter(|&e| e != j));
        fx - f.eval(&rest)
    }));
    let kappa = (1.0 - numer / denom).clamp(0.0, 1.0);
    let m = set.len() as f64;
    let alpha = m / (1.0 + (m - 1.0) * (1.0 - kappa));

    let all: Vec<usize> = (0..n).collect();
    let fv = f.eval(&all);
    let mut worst = 0.0f64;
    for j in 0..n {
        if singles[j] <= 0.0 {
            continue;
        }
        rest.clear();
        rest.extend(all.iter().copied().filter(|&e| e != j));
        let tail = fv - f.eval(&rest);
        worst = worst.max(1.0 - tail / singles[j]);
    }
    Ok(CurvatureReport {
        average_curvature: kappa,
        alpha,
        worst_case_curvature: worst.clamp(0.0, 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concave::ConcaveSpec;
    use crate::cost::{CooperativeCost, WeightVector};

    #[test]
    fn modular_has_no_curvature() {
        let f = CooperativeCost::modular(WeightVector::new(vec![1.0, 2.0, 3.0]).unwrap()).unwrap();
        let c = curvature(&f, &[0, 2]).unwrap();
        assert!(c.average_curvature.abs() < 1e-12);
        assert!((c.alpha - 1.0).abs() < 1e-12);
        assert!(c.worst_case_curvature.abs() < 1e-12);
    }

    #[test]
    fn unit_truncation_is_fully_curved() {
        let f = CooperativeCost::new(vec![(
            ConcaveSpec::truncation(1.0).unwrap(),
            WeightVector::new(vec![1.0; 3]).unwrap(),
        )])
        .unwrap();
        let c = curvature(&f, &[0, 1, 2]).unwrap();
        assert_eq!(c.average_curvature, 1.0);
        assert_eq!(c.alpha, 3.0);
        assert_eq!(c.worst_case_curvature, 1.0);
    }

    #[test]
    fn power_matches_closed_form() {
        let (n, a) = (5usize, 0.5f64);
        let f = CooperativeCost::new(vec![(
            ConcaveSpec::power(a).unwrap(),
            WeightVector::new(vec![1.0; n]).unwrap(),
        )])
        .unwrap();
        let all: Vec<usize> = (0..n).collect();
        let c = curvature(&f, &all).unwrap();
        let nf = n as f64;
        let kappa = 1.0 - nf * (nf.powf(a) - (nf - 1.0).powf(a)) / nf;
        assert!((c.average_curvature - kappa).abs() < 1e-12);
        let alpha = nf / (1.0 + (nf - 1.0) * (1.0 - kappa));
        assert!((c.alpha - alpha).abs() < 1e-12);
        assert!(c.alpha <= nf.min(1.0 / (1.0 - kappa)) + 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let f = CooperativeCost::modular(WeightVector::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert!(matches!(curvature(&f, &[]), Err(Error::Degenerate(_))));
        assert!(matches!(curvature(&f, &[0]), Err(Error::Degenerate(_))));
    }
}
