//! f-divergences, f-divergences over rays and the measure constructions
//! that relate them.
//!
//! The divergence over rays replaces dμ/dν by its antitonic projection in
//! L²(ν) before integrating f against ν:
//!
//! ```text
//! D_f^R(μ‖ν) = Σ_i ν_i f(β_i),   β = proj_antitonic(dμ/dν; ν)
//! ```

use serde::Serialize;

use crate::antitonic::{project_antitonic, AntitonicFit, WeightedSequence};
use crate::dist::{rn_derivative, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::generator::Generator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// (first ‖ second) as passed.
    Forward,
    /// (second ‖ first).
    Reverse,
    /// max of both directions.
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub block_count: usize,
    pub conservation_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceResult {
    pub value: f64,
    pub generator: String,
    pub direction: Direction,
    pub over_rays: bool,
    pub fit_diagnostics: Option<FitDiagnostics>,
}

impl DivergenceResult {
    /// The extended-real +∞ arises when f(0) = ∞ meets a zero fitted value.
    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

fn integrate(f: &Generator, values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(&g, &w)| w * f.eval(g)).sum()
}

/// D_f(μ‖ν) = Σ_i ν_i f(μ_i / ν_i).
pub fn divergence(f: &Generator, mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<DivergenceResult> {
    let g = rn_derivative(mu, nu)?;
    Ok(DivergenceResult {
        value: integrate(f, g.values(), g.weights()),
        generator: f.name().to_string(),
        direction: Direction::Forward,
        over_rays: false,
        fit_diagnostics: None,
    })
}

/// The weighted sequence dμ/dν on ν's atoms and its antitonic projection.
pub fn rays_fit(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<(WeightedSequence, AntitonicFit)> {
    let g = rn_derivative(mu, nu)?;
    let input = WeightedSequence::new(g.values().to_vec(), g.weights().to_vec())?;
    let fit = project_antitonic(&input);
    Ok((input, fit))
}

/// D_f^R(μ‖ν) = Σ_i ν_i f(β_i) with β the antitonic projection of dμ/dν.
pub fn divergence_over_rays(
    f: &Generator,
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
) -> Result<DivergenceResult> {
    let (input, fit) = rays_fit(mu, nu)?;
    Ok(DivergenceResult {
        value: integrate(f, &fit.fitted, input.weights()),
        generator: f.name().to_string(),
        direction: Direction::Forward,
        over_rays: true,
        fit_diagnostics: Some(FitDiagnostics {
            block_count: fit.block_count(),
            conservation_residual: fit.conservation_residual(&input),
        }),
    })
}

/// Evaluates several generators on one projection.
pub fn divergences_over_rays(
    gens: &[Generator],
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
) -> Result<Vec<f64>> {
    let (input, fit) = rays_fit(mu, nu)?;
    Ok(gens
        .iter()
        .map(|f| integrate(f, &fit.fitted, input.weights()))
        .collect())
}

/// max{D_f^R(μ‖ν), D_f^R(ν‖μ)}.
pub fn symmetrized_over_rays(
    f: &Generator,
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
) -> Result<DivergenceResult> {
    let forward = divergence_over_rays(f, mu, nu)?;
    let reverse = divergence_over_rays(f, nu, mu)?;
    let (value, diagnostics) = if reverse.value > forward.value {
        (reverse.value, reverse.fit_diagnostics)
    } else {
        (forward.value, forward.fit_diagnostics)
    };
    Ok(DivergenceResult {
        value,
        generator: f.name().to_string(),
        direction: Direction::Symmetrized,
        over_rays: true,
        fit_diagnostics: diagnostics,
    })
}

/// The measure ζ = β·ν carried by ν's atoms, for which D_f(ζ‖ν) = D_f^R(μ‖ν)
/// for every generator.
pub fn projected_measure(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<DiscreteDistribution> {
    let (input, fit) = rays_fit(mu, nu)?;
    let masses: Vec<f64> = fit
        .fitted
        .iter()
        .zip(input.weights())
        .map(|(b, w)| b * w)
        .collect();
    DiscreteDistribution::new(nu.atoms(), &masses)
}

/// ν and μ reordered so that dμ/dν is nonincreasing along integer atoms
/// 1..=n.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangementPair {
    pub eta: DiscreteDistribution,
    pub tau: DiscreteDistribution,
    /// `permutation[k]` is the index into ν's atoms placed at position k.
    pub permutation: Vec<usize>,
}

/// Sorts ν's atoms by dμ/dν descending (stable on ties). Then
/// D_f(μ‖ν) = D_f^R(η‖τ) for every generator.
pub fn rearrangement_pair(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<RearrangementPair> {
    let g = rn_derivative(mu, nu)?;
    let mut permutation: Vec<usize> = (0..nu.len()).collect();
    permutation.sort_by(|&a, &b| g.values()[b].total_cmp(&g.values()[a]));

    let positions: Vec<f64> = (1..=nu.len()).map(|k| k as f64).collect();
    let tau_weights: Vec<f64> = permutation.iter().map(|&i| nu.weights()[i]).collect();
    let eta_weights: Vec<f64> = permutation.iter().map(|&i| mu.mass_at(nu.atoms()[i])).collect();
    Ok(RearrangementPair {
        eta: DiscreteDistribution::new(&positions, &eta_weights)?,
        tau: DiscreteDistribution::new(&positions, &tau_weights)?,
        permutation,
    })
}

/// Masses of `d` in the right-closed bins (e_0, e_1], …, (e_{k−1}, e_k].
pub fn coarsen(d: &DiscreteDistribution, edges: &[f64]) -> Result<Vec<f64>> {
    if edges.len() < 2 {
        return Err(Error::InvalidPartition("at least two edges are needed".into()));
    }
    if edges.iter().any(|e| e.is_nan()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPartition("edges must be strictly increasing".into()));
    }
    let mut masses = vec![0.0; edges.len() - 1];
    for (&atom, &w) in d.atoms().iter().zip(d.weights()) {
        if atom <= edges[0] || atom > edges[edges.len() - 1] {
            return Err(Error::InvalidPartition(format!("atom {atom} is not covered by the bins")));
        }
        // first edge ≥ atom closes the bin
        let bin = edges.partition_point(|&e| e < atom) - 1;
        masses[bin] += w;
    }
    // rounding in the stored weights must not leak into the bin masses; a bin
    // holding every atom has mass exactly one
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    Ok(masses)
}

/// D_f on the σ-algebra generated by a finite partition into bins:
/// Σ_bins ν(E) f(μ(E)/ν(E)).
pub fn partition_divergence(
    f: &Generator,
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    edges: &[f64],
) -> Result<DivergenceResult> {
    let mu_bins = coarsen(mu, edges)?;
    let nu_bins = coarsen(nu, edges)?;
    let mut values = Vec::with_capacity(nu_bins.len());
    let mut weights = Vec::with_capacity(nu_bins.len());
    for (k, (&m, &n)) in mu_bins.iter().zip(&nu_bins).enumerate() {
        if n > 0.0 {
            values.push(m / n);
            weights.push(n);
        } else if m > 0.0 {
            return Err(Error::AbsoluteContinuityViolated {
                atom: k as f64,
                mass: m,
            });
        }
    }
    Ok(DivergenceResult {
        value: integrate(f, &values, &weights),
        generator: f.name().to_string(),
        direction: Direction::Forward,
        over_rays: false,
        fit_diagnostics: None,
    })
}
