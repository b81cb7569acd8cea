//! Seeded random measure pairs and a batch runner for the structural
//! properties of divergences over rays.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::DiscreteDistribution;
use crate::divergence::{divergence, divergence_over_rays, projected_measure, rearrangement_pair};
use crate::error::Result;
use crate::generator::Generator;
use crate::inequalities::{check_inequalities_with_slack, universal_lower_bound, INEQUALITY_SLACK};
use crate::rays::certify_ks_identity;

/// Tolerance for identities between divergence values.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Nonnegativity slack.
pub const NONNEGATIVITY_TOL: f64 = 1e-12;

/// Affine shifts c in f(t) + c(t − 1) exercised by the fuzzer.
pub const AFFINE_SHIFTS: [f64; 3] = [-1.0, 0.5, 3.0];

fn exponential(rng: &mut impl Rng) -> f64 {
    // (0, 1] avoids ln 0
    -(1.0 - rng.random::<f64>()).ln()
}

fn on_integers(weights: &[f64]) -> DiscreteDistribution {
    let atoms: Vec<f64> = (0..weights.len()).map(|k| k as f64).collect();
    DiscreteDistribution::new(&atoms, weights).expect("positive weights")
}

/// A pair on atoms 0..n, n uniform in 1..=max_atoms, with every atom
/// carrying mass under both measures. One pair in four has μ = ν, one in
/// four has μ a small perturbation of ν.
pub fn random_mutual_pair(rng: &mut impl Rng, max_atoms: usize) -> (DiscreteDistribution, DiscreteDistribution) {
    let n = rng.random_range(1..=max_atoms.max(1));
    let nu: Vec<f64> = (0..n).map(|_| exponential(rng)).collect();
    let mu: Vec<f64> = match rng.random_range(0..4) {
        0 => nu.clone(),
        1 => nu
            .iter()
            .map(|w| w * (1.0 + 0.1 * (rng.random::<f64>() - 0.5)))
            .collect(),
        _ => (0..n).map(|_| exponential(rng)).collect(),
    };
    (on_integers(&mu), on_integers(&nu))
}

/// A pair with μ ≪ ν but μ possibly missing some of ν's atoms.
pub fn random_dominated_pair(rng: &mut impl Rng, max_atoms: usize) -> (DiscreteDistribution, DiscreteDistribution) {
    let n = rng.random_range(1..=max_atoms.max(1));
    let nu: Vec<f64> = (0..n).map(|_| exponential(rng)).collect();
    let mut mu: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.3) { 0.0 } else { exponential(rng) })
        .collect();
    if mu.iter().all(|&w| w == 0.0) {
        let k = rng.random_range(0..n);
        mu[k] = 1.0;
    }
    (on_integers(&mu), on_integers(&nu))
}

/// Stream for pair `index` of a batch.
pub fn pair_stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub pairs: usize,
    pub max_atoms: usize,
    pub seed: u64,
    /// Additive slack of the inequality checks.
    pub slack: f64,
}

impl FuzzConfig {
    pub fn new(pairs: usize, max_atoms: usize, seed: u64) -> Self {
        Self {
            pairs,
            max_atoms,
            seed,
            slack: INEQUALITY_SLACK,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub pair: usize,
    pub check: String,
    pub detail: String,
    pub mu: DiscreteDistribution,
    pub nu: DiscreteDistribution,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct FuzzReport {
    pub pairs: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn differ(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a != b;
    }
    !((a - b).abs() <= tol)
}

/// Runs every property on one pair, returning (checks run, failures).
pub fn check_pair(mu: &DiscreteDistribution, nu: &DiscreteDistribution, slack: f64) -> Result<(usize, Vec<(String, String)>)> {
    let mut checks = 0;
    let mut failures = Vec::new();
    let mut fail = |name: String, detail: String| failures.push((name, detail));

    let report = check_inequalities_with_slack(mu, nu, slack)?;
    checks += report.checks.len();
    for c in report.failures() {
        fail(format!("inequality_{}_{}", c.family, c.name), format!("lhs={} rhs={}", c.lhs, c.rhs));
    }

    let ks = certify_ks_identity(mu, nu)?;
    checks += 1;
    if !ks.holds {
        fail("ks_identity".into(), format!("residual={}", ks.residual));
    }

    let zeta = projected_measure(mu, nu)?;
    let pair = rearrangement_pair(mu, nu)?;
    for f in Generator::catalogue() {
        let lb = universal_lower_bound(&f, mu, nu, slack)?;
        checks += 1;
        if !lb.holds {
            fail(format!("lower_bound_{}", f.name()), format!("lhs={} rhs={}", lb.lhs, lb.rhs));
        }

        let plain = divergence(&f, mu, nu)?.value;
        let rays = divergence_over_rays(&f, mu, nu)?.value;
        checks += 2;
        if !(rays >= -NONNEGATIVITY_TOL) {
            fail(format!("nonnegativity_{}", f.name()), format!("value={rays}"));
        }
        if !(rays <= plain + IDENTITY_TOL) {
            fail(format!("boundedness_{}", f.name()), format!("rays={rays} plain={plain}"));
        }

        for c in AFFINE_SHIFTS {
            let shifted = divergence_over_rays(&f.affine_shift(c), mu, nu)?.value;
            checks += 1;
            if differ(shifted, rays, IDENTITY_TOL) {
                fail(format!("affine_{}_{c}", f.name()), format!("shifted={shifted} base={rays}"));
            }
        }

        let via_zeta = divergence(&f, &zeta, nu)?.value;
        let via_pair = divergence_over_rays(&f, &pair.eta, &pair.tau)?.value;
        checks += 2;
        if differ(via_zeta, rays, IDENTITY_TOL) {
            fail(format!("projected_measure_{}", f.name()), format!("zeta={via_zeta} rays={rays}"));
        }
        if differ(via_pair, plain, IDENTITY_TOL) {
            fail(format!("rearrangement_{}", f.name()), format!("pair={via_pair} plain={plain}"));
        }
    }
    Ok((checks, failures))
}

/// Checks `config.pairs` seeded mutually absolutely continuous pairs.
pub fn run_fuzz(config: &FuzzConfig) -> Result<FuzzReport> {
    let results: Vec<(usize, Vec<Violation>)> = (0..config.pairs)
        .into_par_iter()
        .map(|index| {
            let mut rng = pair_stream(config.seed, index);
            let (mu, nu) = random_mutual_pair(&mut rng, config.max_atoms);
            let (checks, failures) = check_pair(&mu, &nu, config.slack)?;
            let violations = failures
                .into_iter()
                .map(|(check, detail)| Violation {
                    pair: index,
                    check,
                    detail,
                    mu: mu.clone(),
                    nu: nu.clone(),
                })
                .collect();
            Ok((checks, violations))
        })
        .collect::<Result<_>>()?;

    let mut report = FuzzReport {
        pairs: config.pairs,
        ..Default::default()
    };
    for (checks, violations) in results {
        report.checks += checks;
        report.violations.extend(violations);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::is_absolutely_continuous;

    #[test]
    fn generated_pairs_are_mutual() {
        let mut rng = pair_stream(3, 0);
        for _ in 0..200 {
            let (mu, nu) = random_mutual_pair(&mut rng, 12);
            assert!(mu.len() <= 12);
            assert!(is_absolutely_continuous(&mu, &nu) && is_absolutely_continuous(&nu, &mu));
        }
        for _ in 0..200 {
            let (mu, nu) = random_dominated_pair(&mut rng, 12);
            assert!(is_absolutely_continuous(&mu, &nu));
        }
    }

    #[test]
    fn empty_batch() {
        let report = run_fuzz(&FuzzConfig::new(0, 20, 7)).unwrap();
        assert!(report.passed());
        assert_eq!(report.checks, 0);
    }

    #[test]
    fn small_batch_passes() {
        let report = run_fuzz(&FuzzConfig::new(50, 10, 7)).unwrap();
        assert!(report.passed(), "{:?}", report.violations.first());
        assert!(report.checks > 50 * 20);
    }

    #[test]
    fn negative_slack_is_reported_with_reproducer() {
        let mut config = FuzzConfig::new(3, 5, 7);
        config.slack = -1.0;
        let report = run_fuzz(&config).unwrap();
        assert!(!report.passed());
        let v = &report.violations[0];
        let json = serde_json::to_string(v).unwrap();
        assert!(json.contains("\"mu\":{\"atoms\""));
    }

    #[test]
    fn batches_are_reproducible() {
        let a = run_fuzz(&FuzzConfig::new(20, 8, 11)).unwrap();
        let b = run_fuzz(&FuzzConfig::new(20, 8, 11)).unwrap();
        assert_eq!(a.checks, b.checks);
        let mut r1 = pair_stream(11, 4);
        let mut r2 = pair_stream(11, 4);
        assert_eq!(random_mutual_pair(&mut r1, 8), random_mutual_pair(&mut r2, 8));
    }
}
