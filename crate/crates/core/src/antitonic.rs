//! Weighted least-squares projection onto nonincreasing sequences.
//!
//! [`project_antitonic`] runs pool-adjacent-violators from left to right.
//! [`qp_oracle`] solves the same quadratic program by enumerating the
//! active sets of the adjacency constraints; it shares no code with the
//! pooling path and is only meant for small instances.
//!
//! Both report the multipliers λ_k = 2 Σ_{i≤k} w_i (β_i − v_i), which are the
//! dual variables of the constraint β_k ≥ β_{k+1} (and β_n ≥ 0 for the last
//! one). A fit is optimal iff it is nonincreasing, λ ≥ 0, and λ_k = 0
//! wherever β strictly decreases.

use crate::error::{Error, Result};

/// Absolute slack for primal and dual feasibility checks.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// Relative tolerance of the level-set mass checks.
pub const PREFIX_INTEGRAL_TOL: f64 = 1e-10;

/// Largest input accepted by [`qp_oracle`].
pub const QP_ORACLE_MAX_LEN: usize = 20;

/// Nonnegative values carried by positive weights, read left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSequence {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSequence {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch {
                atoms: values.len(),
                weights: weights.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::InvalidSequence("empty sequence".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidSequence("values must be finite and nonnegative".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidSequence("weights must be finite and positive".into()));
        }
        Ok(Self { values, weights })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Σ w_i |v_i|, the scale used by relative conservation checks.
    pub fn scale(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| w * v.abs()).sum()
    }
}

/// A maximal run of indices sharing one fitted value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    pub value: f64,
    pub weight: f64,
}

impl Block {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntitonicFit {
    pub fitted: Vec<f64>,
    pub blocks: Vec<Block>,
    pub multipliers: Vec<f64>,
}

/// Outcome of checking the optimality conditions of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub primal_feasible: bool,
    pub dual_feasible: bool,
    pub complementary_slackness: bool,
    /// Largest increase β_{i+1} − β_i (or −β_n), clamped at 0.
    pub max_primal_violation: f64,
    /// Most negative multiplier, reported as a nonnegative number.
    pub max_dual_violation: f64,
    /// Largest |λ_k| at a strict decrease of β.
    pub max_slackness_residual: f64,
}

impl KktReport {
    pub fn holds(&self) -> bool {
        self.primal_feasible && self.dual_feasible && self.complementary_slackness
    }
}

impl AntitonicFit {
    fn from_fitted(input: &WeightedSequence, fitted: Vec<f64>) -> Self {
        let blocks = canonical_blocks(&fitted, input.weights());
        let multipliers = kkt_multipliers(input, &fitted);
        Self {
            fitted,
            blocks,
            multipliers,
        }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// |Σ w_i β_i − Σ w_i v_i|.
    pub fn conservation_residual(&self, input: &WeightedSequence) -> f64 {
        let fitted: f64 = self.fitted.iter().zip(input.weights()).map(|(b, w)| w * b).sum();
        let original: f64 = input.values().iter().zip(input.weights()).map(|(v, w)| w * v).sum();
        (fitted - original).abs()
    }

    /// Checks primal feasibility, dual feasibility and complementary
    /// slackness at [`FEASIBILITY_TOL`], scaled by max(1, Σ w|v|) for the
    /// multiplier checks.
    pub fn kkt_report(&self, input: &WeightedSequence) -> KktReport {
        let n = self.fitted.len();
        let scale = input.scale().max(1.0);

        let mut max_primal = 0.0_f64;
        for k in 0..n {
            let next = if k + 1 < n { self.fitted[k + 1] } else { 0.0 };
            max_primal = max_primal.max(next - self.fitted[k]);
        }

        let max_dual = self
            .multipliers
            .iter()
            .fold(0.0_f64, |acc, &l| acc.max(-l));

        let mut max_slack = 0.0_f64;
        for k in 0..n {
            let next = if k + 1 < n { self.fitted[k + 1] } else { 0.0 };
            if self.fitted[k] > next + FEASIBILITY_TOL {
                max_slack = max_slack.max(self.multipliers[k].abs());
            }
        }

        KktReport {
            primal_feasible: max_primal <= FEASIBILITY_TOL,
            dual_feasible: max_dual <= FEASIBILITY_TOL * scale,
            complementary_slackness: max_slack <= FEASIBILITY_TOL * scale,
            max_primal_violation: max_primal,
            max_dual_violation: max_dual,
            max_slackness_residual: max_slack,
        }
    }
}

/// λ_k = 2 Σ_{i≤k} w_i (β_i − v_i).
pub fn kkt_multipliers(input: &WeightedSequence, fitted: &[f64]) -> Vec<f64> {
    fitted
        .iter()
        .zip(input.values())
        .zip(input.weights())
        .scan(0.0, |acc, ((b, v), w)| {
            *acc += w * (b - v);
            Some(2.0 * *acc)
        })
        .collect()
}

fn canonical_blocks(fitted: &[f64], weights: &[f64]) -> Vec<Block> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, (&value, &weight)) in fitted.iter().zip(weights).enumerate() {
        match blocks.last_mut() {
            Some(b) if b.value == value => {
                b.end = i + 1;
                b.weight += weight;
            }
            _ => blocks.push(Block {
                start: i,
                end: i + 1,
                value,
                weight,
            }),
        }
    }
    blocks
}

struct Pool {
    start: usize,
    end: usize,
    weight: f64,
    weighted_sum: f64,
    mean: f64,
}

/// Projects `input` onto the cone of nonincreasing sequences in the
/// weighted L² norm, by pool-adjacent-violators.
///
/// Adjacent pools merge only on a strict violation, so an input that is
/// already nonincreasing comes back unchanged bit-for-bit.
pub fn project_antitonic(input: &WeightedSequence) -> AntitonicFit {
    let mut stack: Vec<Pool> = Vec::with_capacity(input.len());
    for (i, (&v, &w)) in input.values().iter().zip(input.weights()).enumerate() {
        let mut pool = Pool {
            start: i,
            end: i + 1,
            weight: w,
            weighted_sum: w * v,
            mean: v,
        };
        while let Some(left) = stack.last() {
            if left.mean >= pool.mean {
                break;
            }
            let left = stack.pop().unwrap();
            let weight = left.weight + pool.weight;
            let weighted_sum = left.weighted_sum + pool.weighted_sum;
            pool = Pool {
                start: left.start,
                end: pool.end,
                weight,
                weighted_sum,
                mean: weighted_sum / weight,
            };
        }
        stack.push(pool);
    }

    let mut fitted = vec![0.0; input.len()];
    for pool in &stack {
        fitted[pool.start..pool.end].fill(pool.mean);
    }
    debug_assert!(fitted.iter().all(|&b| b >= 0.0));
    AntitonicFit::from_fitted(input, fitted)
}

/// Solves the projection by enumerating all 2^(n−1) activity patterns of the
/// constraints β_k ≥ β_{k+1}.
///
/// Each pattern fixes which neighbours are pooled; the pooled values are
/// plain weighted means. The returned fit is the first pattern, in mask
/// order, that is both primal and dual feasible. The minimizer is unique, so
/// any such pattern yields the same β.
pub fn qp_oracle(input: &WeightedSequence) -> Result<AntitonicFit> {
    let n = input.len();
    if n > QP_ORACLE_MAX_LEN {
        return Err(Error::InstanceTooLarge {
            len: n,
            max: QP_ORACLE_MAX_LEN,
        });
    }
    let scale = input.scale().max(1.0);
    let values = input.values();
    let weights = input.weights();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut candidate = vec![0.0; n];
    for mask in 0u32..(1u32 << (n - 1)) {
        // bit k set: constraint between k and k+1 is active (pooled)
        let mut start = 0;
        for k in 0..n {
            let closes = k + 1 == n || mask & (1 << k) == 0;
            if closes {
                let (mut w_sum, mut v_sum) = (0.0, 0.0);
                for i in start..=k {
                    w_sum += weights[i];
                    v_sum += weights[i] * values[i];
                }
                let mean = if k == start { values[k] } else { v_sum / w_sum };
                candidate[start..=k].fill(mean);
                start = k + 1;
            }
        }

        let mut violation = 0.0_f64;
        for k in 0..n {
            let next = if k + 1 < n { candidate[k + 1] } else { 0.0 };
            violation = violation.max(next - candidate[k]);
        }
        let mut running = 0.0;
        for k in 0..n {
            running += weights[k] * (candidate[k] - values[k]);
            violation = violation.max(-2.0 * running / scale);
        }

        if violation <= FEASIBILITY_TOL {
            return Ok(AntitonicFit::from_fitted(input, candidate));
        }
        if best.as_ref().is_none_or(|(v, _)| violation < *v) {
            best = Some((violation, candidate.clone()));
        }
    }
    // Unreachable in exact arithmetic; fall back to the least violating pattern.
    let (_, fitted) = best.expect("at least one pattern");
    Ok(AntitonicFit::from_fitted(input, fitted))
}

/// Report of [`prefix_integral_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixIntegralReport {
    pub holds: bool,
    /// Indices k (last index of a level set {β > r}) whose prefix integrals
    /// disagree; the full length appears as `n − 1`.
    pub violations: Vec<usize>,
    pub max_residual: f64,
}

/// Checks Σ_{i≤k} w_i β_i = Σ_{i≤k} w_i v_i at every index where the fit
/// strictly decreases and over the whole sequence.
pub fn prefix_integral_check(input: &WeightedSequence, fit: &AntitonicFit) -> PrefixIntegralReport {
    let n = input.len();
    let tol = PREFIX_INTEGRAL_TOL * if input.scale() > 0.0 { input.scale() } else { 1.0 };
    let mut violations = Vec::new();
    let mut max_residual = 0.0_f64;
    let (mut fitted_sum, mut original_sum) = (0.0, 0.0);
    for k in 0..n {
        fitted_sum += input.weights()[k] * fit.fitted[k];
        original_sum += input.weights()[k] * input.values()[k];
        let boundary = k + 1 == n || fit.fitted[k] > fit.fitted[k + 1];
        if boundary {
            let residual = (fitted_sum - original_sum).abs();
            max_residual = max_residual.max(residual);
            if residual > tol {
                violations.push(k);
            }
        }
    }
    PrefixIntegralReport {
        holds: violations.is_empty(),
        violations,
        max_residual,
    }
}

/// Checks that projecting preserves pointwise order: a ≤ b implies
/// proj a ≤ proj b.
pub fn check_monotone_pair(a: &WeightedSequence, b: &WeightedSequence) -> Result<bool> {
    if a.weights() != b.weights() {
        return Err(Error::WeightMismatch);
    }
    if a.values().iter().zip(b.values()).any(|(x, y)| x > y) {
        return Err(Error::InvalidSequence("first sequence must be pointwise dominated".into()));
    }
    let pa = project_antitonic(a);
    let pb = project_antitonic(b);
    Ok(pa
        .fitted
        .iter()
        .zip(&pb.fitted)
        .all(|(x, y)| *x <= *y + FEASIBILITY_TOL))
}
