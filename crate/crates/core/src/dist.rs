//! Finite discrete probability measures on the real line.
//!
//! A [`DiscreteDistribution`] keeps its atoms strictly increasing and its
//! weights strictly positive, so that the support is exactly the atom set and
//! absolute continuity between two distributions is a finite check.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// On-disk shape of a distribution: `{"atoms": [...], "weights": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionFile", into = "DistributionFile")]
pub struct DiscreteDistribution {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from unsorted atoms and nonnegative weights.
    ///
    /// Atoms are sorted, exact duplicates merged by summing their weights,
    /// zero-weight atoms dropped and the weights normalized to sum to one.
    /// Weights that already sum to one within 1e-12 are kept bit-for-bit, which
    /// makes construction idempotent.
    pub fn new(atoms: &[f64], weights: &[f64]) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::LengthMismatch {
                atoms: atoms.len(),
                weights: weights.len(),
            });
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("atoms"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("weights"));
        }
        if let Some((index, &weight)) = weights.iter().enumerate().find(|(_, w)| **w < 0.0) {
            return Err(Error::NegativeWeight { index, weight });
        }

        let mut pairs: Vec<(f64, f64)> = atoms
            .iter()
            .copied()
            .zip(weights.iter().copied())
            .filter(|&(_, w)| w > 0.0)
            .collect();
        if pairs.is_empty() {
            return Err(Error::ZeroMass);
        }
        // Stable sort keeps duplicate merging deterministic.
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged_atoms = Vec::with_capacity(pairs.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (atom, weight) in pairs {
            // -0.0 and 0.0 are the same support point.
            match merged_atoms.last() {
                Some(&last) if last == atom => *merged_weights.last_mut().unwrap() += weight,
                _ => {
                    merged_atoms.push(atom);
                    merged_weights.push(weight);
                }
            }
        }

        let total: f64 = merged_weights.iter().sum();
        if !total.is_finite() {
            return Err(Error::NonFinite("weights"));
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            for w in &mut merged_weights {
                *w /= total;
            }
        }

        Ok(Self {
            atoms: merged_atoms,
            weights: merged_weights,
        })
    }

    /// A unit point mass.
    pub fn dirac(atom: f64) -> Result<Self> {
        Self::new(&[atom], &[1.0])
    }

    pub(crate) fn from_parts_unchecked(atoms: Vec<f64>, weights: Vec<f64>) -> Self {
        debug_assert_eq!(atoms.len(), weights.len());
        Self { atoms, weights }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Smallest positive weight.
    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Mass at `atom`, zero off the support.
    pub fn mass_at(&self, atom: f64) -> f64 {
        self.atoms
            .binary_search_by(|a| a.partial_cmp(&atom).expect("finite atoms"))
            .map(|i| self.weights[i])
            .unwrap_or(0.0)
    }

    /// Masses of the closed left-rays ending at each atom.
    pub fn prefix_masses(&self) -> Vec<f64> {
        self.weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }

    /// Mass of the closed left-ray (-inf, x].
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|&a| a <= x);
        self.weights[..k].iter().sum()
    }

    /// Index of the atom an inverse-CDF draw lands on: the first atom whose
    /// prefix mass is strictly greater than `u`.
    pub fn inverse_cdf_index(prefix: &[f64], u: f64) -> usize {
        prefix
            .partition_point(|&p| p <= u)
            .min(prefix.len().saturating_sub(1))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serializes")
    }
}

impl TryFrom<DistributionFile> for DiscreteDistribution {
    type Error = Error;

    fn try_from(file: DistributionFile) -> Result<Self> {
        Self::new(&file.atoms, &file.weights)
    }
}

impl From<DiscreteDistribution> for DistributionFile {
    fn from(d: DiscreteDistribution) -> Self {
        Self {
            atoms: d.atoms,
            weights: d.weights,
        }
    }
}

/// Prefix masses of `d` along its sorted atoms.
pub fn prefix_masses(d: &DiscreteDistribution) -> Vec<f64> {
    d.prefix_masses()
}

/// Empirical measure of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    base: DiscreteDistribution,
    sample_size: usize,
    counts: Vec<usize>,
}

impl EmpiricalDistribution {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("samples"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);

        let mut atoms: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for s in sorted {
            match atoms.last() {
                Some(&last) if last == s => *counts.last_mut().unwrap() += 1,
                _ => {
                    atoms.push(s);
                    counts.push(1);
                }
            }
        }
        Self::from_counts(atoms, counts)
    }

    /// Builds the empirical measure from per-atom counts. Atoms must be
    /// strictly increasing; atoms with a zero count are dropped.
    pub fn from_counts(atoms: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        if atoms.len() != counts.len() {
            return Err(Error::LengthMismatch {
                atoms: atoms.len(),
                weights: counts.len(),
            });
        }
        if atoms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("atoms must be strictly increasing".into()));
        }
        let (atoms, counts): (Vec<f64>, Vec<usize>) =
            atoms.into_iter().zip(counts).filter(|&(_, c)| c > 0).unzip();
        let sample_size: usize = counts.iter().sum();
        if sample_size == 0 {
            return Err(Error::EmptySample);
        }
        let n = sample_size as f64;
        let weights = counts.iter().map(|&c| c as f64 / n).collect();
        Ok(Self {
            base: DiscreteDistribution::from_parts_unchecked(atoms, weights),
            sample_size,
            counts,
        })
    }

    pub fn base(&self) -> &DiscreteDistribution {
        &self.base
    }

    pub fn into_base(self) -> DiscreteDistribution {
        self.base
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
}

/// Parses a newline-separated list of decimal numbers; blank lines are skipped.
pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|e| Error::Parse(format!("sample {}: `{l}`: {e}", i + 1)))
        })
        .collect()
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_samples(&std::fs::read_to_string(path)?)
}

/// Radon-Nikodym derivative dμ/dν of two discrete measures, aligned to the
/// atoms of ν.
#[derive(Debug, Clone, PartialEq)]
pub struct RnDerivative {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl RnDerivative {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The carrier weights (ν-masses).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Σ ν_i g_i, which is μ's total mass.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(g, w)| g * w).sum()
    }
}

/// dμ/dν on ν's atoms; zero where μ has no mass.
pub fn rn_derivative(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<RnDerivative> {
    let mut values = vec![0.0; nu.len()];
    let mut j = 0;
    for (&atom, &mass) in mu.atoms().iter().zip(mu.weights()) {
        while j < nu.len() && nu.atoms()[j] < atom {
            j += 1;
        }
        if j == nu.len() || nu.atoms()[j] != atom {
            return Err(Error::AbsoluteContinuityViolated { atom, mass });
        }
        values[j] = mass / nu.weights()[j];
    }
    Ok(RnDerivative {
        values,
        weights: nu.weights().to_vec(),
    })
}

/// True when every atom of `mu` is an atom of `nu`.
pub fn is_absolutely_continuous(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> bool {
    mu.atoms()
        .iter()
        .all(|a| nu.atoms().binary_search_by(|b| b.partial_cmp(a).expect("finite atoms")).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_sorted_normalized_input() {
        let d = DiscreteDistribution::new(&[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
        assert_eq!(d.atoms(), &[1.0, 2.0, 3.0]);
        assert_eq!(d.weights(), &[0.2, 0.5, 0.3]);
    }

    #[test]
    fn sorts_and_merges() {
        let d = DiscreteDistribution::new(&[2.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(d.atoms(), &[1.0, 2.0]);
        assert_eq!(d.weights(), &[0.5, 0.5]);

        let d = DiscreteDistribution::new(&[1.0, 1.0, 2.0], &[0.1, 0.1, 0.8]).unwrap();
        assert_eq!(d.atoms(), &[1.0, 2.0]);
        assert!((d.weights()[0] - 0.2).abs() < 1e-15);
        assert!((d.weights()[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn drops_zero_weights_and_renormalizes() {
        let d = DiscreteDistribution::new(&[0.0, 1.0, 2.0], &[2.0, 0.0, 6.0]).unwrap();
        assert_eq!(d.atoms(), &[0.0, 2.0]);
        assert_eq!(d.weights(), &[0.25, 0.75]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            DiscreteDistribution::new(&[1.0], &[0.5, 0.5]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            DiscreteDistribution::new(&[1.0, 2.0], &[-0.1, 1.1]),
            Err(Error::NegativeWeight { index: 0, .. })
        ));
        assert!(matches!(
            DiscreteDistribution::new(&[1.0, 2.0], &[0.0, 0.0]),
            Err(Error::ZeroMass)
        ));
        assert!(matches!(
            DiscreteDistribution::new(&[f64::NAN], &[1.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(&[1.0], &[f64::INFINITY]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn empirical_counts() {
        let e = EmpiricalDistribution::from_samples(&[5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(e.base().atoms(), &[5.0, 7.0, 9.0]);
        assert_eq!(e.base().weights(), &[0.5, 0.25, 0.25]);
        assert_eq!(e.sample_size(), 4);
        assert_eq!(e.counts(), &[2, 1, 1]);

        let e = EmpiricalDistribution::from_samples(&[3.0]).unwrap();
        assert_eq!(e.base().weights(), &[1.0]);
        assert_eq!(e.sample_size(), 1);

        assert!(matches!(
            EmpiricalDistribution::from_samples(&[]),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn rn_derivative_ratios() {
        let mu = DiscreteDistribution::new(&[1.0, 2.0], &[0.2, 0.8]).unwrap();
        let nu = DiscreteDistribution::new(&[1.0, 2.0], &[0.5, 0.5]).unwrap();
        let g = rn_derivative(&mu, &nu).unwrap();
        assert_eq!(g.values(), &[0.4, 1.6]);

        let g = rn_derivative(&nu, &nu).unwrap();
        assert_eq!(g.values(), &[1.0, 1.0]);
    }

    #[test]
    fn rn_derivative_zero_off_support() {
        let mu = DiscreteDistribution::new(&[2.0], &[1.0]).unwrap();
        let nu = DiscreteDistribution::new(&[1.0, 2.0, 3.0], &[0.25, 0.5, 0.25]).unwrap();
        let g = rn_derivative(&mu, &nu).unwrap();
        assert_eq!(g.values(), &[0.0, 2.0, 0.0]);
        assert_eq!(g.total_mass(), 1.0);
    }

    #[test]
    fn rn_derivative_detects_violation() {
        let mu = DiscreteDistribution::new(&[1.0, 2.0, 4.0], &[0.2, 0.3, 0.5]).unwrap();
        let nu = DiscreteDistribution::new(&[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
        assert!(matches!(
            rn_derivative(&mu, &nu),
            Err(Error::AbsoluteContinuityViolated { atom, .. }) if atom == 4.0
        ));
        assert!(!is_absolutely_continuous(&mu, &nu));
        assert!(is_absolutely_continuous(&nu, &nu));
    }

    #[test]
    fn prefix_mass_examples() {
        let d = DiscreteDistribution::new(&[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
        let p = prefix_masses(&d);
        assert_eq!(p[0], 0.2);
        assert!((p[1] - 0.7).abs() < 1e-15);
        assert!((p[2] - 1.0).abs() < 1e-12);

        assert_eq!(prefix_masses(&DiscreteDistribution::dirac(0.0).unwrap()), vec![1.0]);

        let u = DiscreteDistribution::new(&[1.0, 2.0, 3.0, 4.0], &[0.25; 4]).unwrap();
        assert_eq!(prefix_masses(&u), vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn inverse_cdf_half_open() {
        let prefix = [0.2, 0.7, 1.0];
        assert_eq!(DiscreteDistribution::inverse_cdf_index(&prefix, 0.0), 0);
        assert_eq!(DiscreteDistribution::inverse_cdf_index(&prefix, 0.1), 0);
        assert_eq!(DiscreteDistribution::inverse_cdf_index(&prefix, 0.2), 1);
        assert_eq!(DiscreteDistribution::inverse_cdf_index(&prefix, 0.5), 1);
        assert_eq!(DiscreteDistribution::inverse_cdf_index(&prefix, 0.9), 2);
        // prefix sums may end a few ulps short of one
        assert_eq!(DiscreteDistribution::inverse_cdf_index(&[0.5, 0.9999999999999999], 0.99999999999999995), 1);
    }

    #[test]
    fn json_round_trip_goes_through_validation() {
        let d = DiscreteDistribution::from_json_str(r#"{"atoms":[2,1],"weights":[1,3]}"#).unwrap();
        assert_eq!(d.atoms(), &[1.0, 2.0]);
        assert_eq!(d.weights(), &[0.75, 0.25]);
        assert_eq!(DiscreteDistribution::from_json_str(&d.to_json()).unwrap(), d);
        assert!(DiscreteDistribution::from_json_str(r#"{"atoms":[1],"weights":[-1]}"#).is_err());
        assert!(DiscreteDistribution::from_json_str(r#"{"atoms":[1]}"#).is_err());
    }

    #[test]
    fn sample_file_parsing() {
        assert_eq!(parse_samples("1.5\n\n 2\n-3e1\n").unwrap(), vec![1.5, 2.0, -30.0]);
        assert!(matches!(parse_samples("1\nx\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn cdf_counts_closed_rays() {
        let d = DiscreteDistribution::new(&[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.cdf(1.0), 0.2);
        assert_eq!(d.cdf(1.5), 0.2);
        assert_eq!(d.mass_at(2.0), 0.5);
        assert_eq!(d.mass_at(2.5), 0.0);
    }
}
