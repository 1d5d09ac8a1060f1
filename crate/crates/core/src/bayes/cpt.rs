use std::f64::consts::SQRT_2;

use statrs::function::erf::erfc;

use super::{DiscreteDistribution, NodeSpec};
use crate::error::ConfigError;
use crate::model::Level5;

/// Conditional probability table of one node. Rows are indexed by the parent
/// states in mixed radix, first parent most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    node: String,
    arity: usize,
    rows: Vec<DiscreteDistribution>,
}

impl Cpt {
    pub fn node(&self) -> &str {
        &self.node
    }

    /// Number of parents.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> &[DiscreteDistribution] {
        &self.rows
    }

    pub fn row(&self, parent_states: &[Level5]) -> &DiscreteDistribution {
        assert_eq!(parent_states.len(), self.arity, "parent state count");
        let idx = parent_states
            .iter()
            .fold(0usize, |acc, s| acc * 5 + s.index());
        &self.rows[idx]
    }

    pub(crate) fn row_by_index(&self, idx: usize) -> &DiscreteDistribution {
        &self.rows[idx]
    }
}

/// Probability mass of `N(mean, sigma)` on `(lo, hi)`.
pub fn normal_interval_mass(mean: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    let a = (lo - mean) / sigma;
    let b = (hi - mean) / sigma;
    // Work in whichever tail keeps the subtraction away from 1 - 1.
    if a >= 0.0 {
        0.5 * (erfc(a / SQRT_2) - erfc(b / SQRT_2))
    } else {
        0.5 * (erfc(-b / SQRT_2) - erfc(-a / SQRT_2))
    }
}

/// Generates the table of a node from its weighted parents.
///
/// For each parent-state combination the effective parent value is `v` for a
/// positive and `6 - v` for a negative influence. The row is the normal
/// distribution around the weighted mean of those values (or `prior_mean`
/// for a root), integrated over `(k-1, k)` for state `k` and renormalized.
pub fn build_cpt(node: &NodeSpec) -> Result<Cpt, ConfigError> {
    node.check()?;
    let arity = node.parents.len();
    let total_weight: f64 = node.parents.iter().map(|p| p.weight.0).sum();
    let combos = 5usize.pow(arity as u32);
    let mut rows = Vec::with_capacity(combos);
    let mut states = vec![Level5::VeryLow; arity];
    for combo in 0..combos {
        let mut rest = combo;
        for slot in states.iter_mut().rev() {
            *slot = Level5::from_index(rest % 5).unwrap();
            rest /= 5;
        }
        let mean = if arity == 0 {
            node.prior_mean
        } else {
            node.parents
                .iter()
                .zip(&states)
                .map(|(p, s)| p.weight.0 * f64::from(p.sign.apply(*s).value()))
                .sum::<f64>()
                / total_weight
        };
        rows.push(truncated_row(mean, node.sigma));
    }
    Ok(Cpt {
        node: node.name.clone(),
        arity,
        rows,
    })
}

fn truncated_row(mean: f64, sigma: f64) -> DiscreteDistribution {
    let masses: [f64; 5] =
        std::array::from_fn(|k| normal_interval_mass(mean, sigma, k as f64, k as f64 + 1.0));
    DiscreteDistribution::normalize(masses).expect("mean lies in [1, 5], so the mass on [0, 5] is positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::Sign;

    /// Composite Simpson integration of the normal density, independent of
    /// the erfc path used by the implementation.
    fn simpson_mass(mean: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
        let density = |x: f64| {
            let z = (x - mean) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        };
        let n = 20_000;
        let h = (hi - lo) / n as f64;
        let mut acc = density(lo) + density(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * density(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn single_parent(sign: Sign, sigma: f64) -> NodeSpec {
        NodeSpec::root("child")
            .with_parent("p", 1.0, sign)
            .with_sigma(sigma)
    }

    #[test]
    fn root_row_is_symmetric_around_the_interval_midpoint() {
        // States cover (0,1)..(4,5), so the reflection point is 2.5.
        let cpt = build_cpt(&NodeSpec::root("r").with_prior_mean(2.5)).unwrap();
        let p = cpt.row(&[]).probabilities();
        assert!((p[0] - p[4]).abs() < 1e-12);
        assert!((p[1] - p[3]).abs() < 1e-12);
        assert!(p[2] > p[1] && p[1] > p[0]);

        let centred = build_cpt(&NodeSpec::root("r")).unwrap();
        let q = centred.row(&[]).probabilities();
        assert!(q[3] > q[1], "a mean of 3 leans towards the upper states");
    }

    #[test]
    fn high_parent_gives_decreasing_masses_downwards() {
        let cpt = build_cpt(&single_parent(Sign::Positive, 0.75)).unwrap();
        let p = cpt.row(&[Level5::VeryHigh]).probabilities();
        for k in 0..4 {
            assert!(p[k] < p[k + 1], "{p:?}");
        }
    }

    #[test]
    fn weighted_mean_row_matches_quadrature() {
        let node = NodeSpec::root("development_quality")
            .with_parent("staff_capability", 3.0, Sign::Positive)
            .with_parent("process_maturity", 2.0, Sign::Positive);
        let cpt = build_cpt(&node).unwrap();
        let row = cpt.row(&[Level5::High, Level5::Low]);

        // mean = (3*4 + 2*2) / 5 = 3.2
        let masses: Vec<f64> = (0..5)
            .map(|k| simpson_mass(3.2, 0.75, k as f64, k as f64 + 1.0))
            .collect();
        let z: f64 = masses.iter().sum();
        for k in 0..5 {
            assert!(
                (row.probabilities()[k] - masses[k] / z).abs() < 1e-9,
                "state {}: {} vs {}",
                k + 1,
                row.probabilities()[k],
                masses[k] / z
            );
        }
    }

    #[test]
    fn negative_sign_mirrors_parent_state() {
        for sigma in [0.5, 0.75, 1.5] {
            let pos = build_cpt(&single_parent(Sign::Positive, sigma)).unwrap();
            let neg = build_cpt(&single_parent(Sign::Negative, sigma)).unwrap();
            for s in Level5::ALL {
                let a = neg.row(&[s]).probabilities();
                let b = pos.row(&[s.reversed()]).probabilities();
                for k in 0..5 {
                    assert!((a[k] - b[k]).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let node = NodeSpec::root("x")
            .with_parent("a", 1.0, Sign::Positive)
            .with_parent("b", 2.0, Sign::Negative)
            .with_parent("c", 3.0, Sign::Positive)
            .with_sigma(0.3);
        let cpt = build_cpt(&node).unwrap();
        assert_eq!(cpt.rows().len(), 125);
        for row in cpt.rows() {
            let sum: f64 = row.probabilities().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(row.probabilities().iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn zero_sigma_is_a_configuration_error() {
        let node = NodeSpec::root("x").with_sigma(-1.0);
        assert!(matches!(build_cpt(&node), Err(ConfigError::Sigma { .. })));
    }

    #[test]
    fn interval_mass_is_accurate_in_both_tails() {
        let upper = normal_interval_mass(1.0, 0.5, 4.0, 5.0);
        let lower = normal_interval_mass(4.0, 0.5, 0.0, 1.0);
        assert!(upper > 0.0 && lower > 0.0);
        assert!((upper - lower).abs() <= 1e-9 * upper, "{upper} vs {lower}");
    }
}
