//! Glivenko-Cantelli simulation for f-divergences over rays.
//!
//! Each trial draws n i.i.d. atoms of the target ν by inverse CDF, forms
//! the empirical measure ν_n and evaluates D_f^R(ν_n‖ν), D_f^R(ν‖ν_n) and
//! their maximum. The reverse direction needs ν ≪ ν_n, which only holds once
//! every atom has been drawn; trials without coverage record it as
//! undefined.
//!
//! Streams are ChaCha8 keyed by the seed, with stream id `(n << 32) | trial`,
//! so every (sample size, trial) pair owns an independent substream and the
//! sweep is reproducible regardless of how trials are scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::{DiscreteDistribution, EmpiricalDistribution};
use crate::divergence::divergences_over_rays;
use crate::error::{Error, Result};
use crate::format::machine;
use crate::generator::Generator;

pub const RNG_FAMILY: &str = "chacha8";

/// A source of uniform variates in [0, 1).
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

impl<R: RngCore> UniformSource for R {
    fn next_uniform(&mut self) -> f64 {
        // 53 random bits
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Replays a fixed list of uniforms, cycling when exhausted.
#[derive(Debug, Clone)]
pub struct ReplayStream {
    values: Vec<f64>,
    pos: usize,
}

impl ReplayStream {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "replay stream needs at least one value");
        Self { values, pos: 0 }
    }
}

impl UniformSource for ReplayStream {
    fn next_uniform(&mut self) -> f64 {
        let u = self.values[self.pos % self.values.len()];
        self.pos += 1;
        u
    }
}

/// The substream for one (sample size, trial) pair.
pub fn trial_stream(seed: u64, n: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | trial as u64);
    rng
}

/// Per-atom counts of n inverse-CDF draws from `target`.
pub fn draw_counts(target: &DiscreteDistribution, n: usize, stream: &mut impl UniformSource) -> Vec<usize> {
    let prefix = target.prefix_masses();
    let mut counts = vec![0usize; target.len()];
    for _ in 0..n {
        counts[DiscreteDistribution::inverse_cdf_index(&prefix, stream.next_uniform())] += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub empirical: EmpiricalDistribution,
    /// D_f^R(ν_n‖ν) per generator.
    pub forward: Vec<f64>,
    /// D_f^R(ν‖ν_n) per generator; `None` unless every atom was drawn.
    pub reverse: Option<Vec<f64>>,
}

impl TrialOutcome {
    pub fn symmetrized(&self) -> Option<Vec<f64>> {
        self.reverse
            .as_ref()
            .map(|r| self.forward.iter().zip(r).map(|(a, b)| a.max(*b)).collect())
    }
}

pub fn run_trial(
    target: &DiscreteDistribution,
    n: usize,
    stream: &mut impl UniformSource,
    generators: &[Generator],
) -> Result<TrialOutcome> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be positive".into()));
    }
    let counts = draw_counts(target, n, stream);
    let covered = counts.iter().all(|&c| c > 0);
    let empirical = EmpiricalDistribution::from_counts(target.atoms().to_vec(), counts)?;
    let forward = divergences_over_rays(generators, empirical.base(), target)?;
    let reverse = if covered {
        Some(divergences_over_rays(generators, target, empirical.base())?)
    } else {
        None
    };
    Ok(TrialOutcome {
        empirical,
        forward,
        reverse,
    })
}

/// Number of draws until every atom of `target` has appeared.
pub fn coverage_time(target: &DiscreteDistribution, stream: &mut impl UniformSource) -> usize {
    let prefix = target.prefix_masses();
    let mut seen = vec![false; target.len()];
    let mut missing = target.len();
    let mut draws = 0;
    while missing > 0 {
        let i = DiscreteDistribution::inverse_cdf_index(&prefix, stream.next_uniform());
        draws += 1;
        if !seen[i] {
            seen[i] = true;
            missing -= 1;
        }
    }
    draws
}

#[derive(Debug, Clone)]
pub struct GcConfig {
    pub target: DiscreteDistribution,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    pub generators: Vec<Generator>,
    pub seed: u64,
}

impl GcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes[0] == 0 {
            return Err(Error::InvalidConfig("sample sizes must be positive".into()));
        }
        if self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("sample sizes must be strictly increasing".into()));
        }
        if self.sample_sizes.iter().any(|&n| n as u64 > u32::MAX as u64) || self.trials as u64 > u32::MAX as u64 {
            return Err(Error::InvalidConfig("sample sizes and trials must fit in 32 bits".into()));
        }
        if self.generators.is_empty() {
            return Err(Error::InvalidConfig("no generators".into()));
        }
        Ok(())
    }

    /// One-line description of the resolved configuration.
    pub fn describe(&self) -> String {
        let sizes: Vec<String> = self.sample_sizes.iter().map(|n| n.to_string()).collect();
        let gens: Vec<&str> = self.generators.iter().map(Generator::name).collect();
        format!(
            "rng={RNG_FAMILY} seed={} trials={} sizes={} gens={} nu={}",
            self.seed,
            self.trials,
            sizes.join(","),
            gens.join(","),
            self.target.to_json()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len();
        let median = if m % 2 == 1 {
            sorted[m / 2]
        } else {
            (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0
        };
        Some(Self {
            median,
            mean: values.iter().sum::<f64>() / m as f64,
            max: sorted[m - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcRow {
    pub generator: String,
    pub n: usize,
    pub forward: Summary,
    /// Over trials where the reverse direction is defined.
    pub reverse: Option<Summary>,
    pub symmetrized: Option<Summary>,
    pub reverse_defined_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcTrace {
    pub rows: Vec<GcRow>,
}

pub const CSV_HEADER: &str = "generator,n,stat,value,reverse_defined_fraction";

impl GcTrace {
    pub fn row(&self, generator: &str, n: usize) -> Option<&GcRow> {
        self.rows.iter().find(|r| r.generator == generator && r.n == n)
    }

    pub fn rows_for<'a>(&'a self, generator: &'a str) -> impl Iterator<Item = &'a GcRow> + 'a {
        self.rows.iter().filter(move |r| r.generator == generator)
    }

    /// CSV with one row per aggregate statistic. Lines of `metadata` are
    /// emitted first as `# ` comments. Undefined statistics have an empty
    /// value field.
    pub fn to_csv(&self, metadata: &[String]) -> String {
        let mut out = String::new();
        for line in metadata {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let frac = machine(row.reverse_defined_fraction);
            let groups = [
                ("forward", Some(row.forward)),
                ("reverse", row.reverse),
                ("symmetrized", row.symmetrized),
            ];
            for (label, summary) in groups {
                let stats = [
                    ("median", summary.map(|s| s.median)),
                    ("mean", summary.map(|s| s.mean)),
                    ("max", summary.map(|s| s.max)),
                ];
                for (stat, value) in stats {
                    let value = value.map(machine).unwrap_or_default();
                    out.push_str(&format!(
                        "{},{},{label}_{stat},{value},{frac}\n",
                        row.generator, row.n
                    ));
                }
            }
        }
        out
    }
}

/// Runs every (sample size, trial) pair and aggregates per generator.
pub fn run_sweep(config: &GcConfig) -> Result<GcTrace> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut by_size: Vec<Vec<TrialOutcome>> = Vec::with_capacity(config.sample_sizes.len());
    for &n in &config.sample_sizes {
        let outcomes: Vec<TrialOutcome> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let mut stream = trial_stream(config.seed, n, trial);
                run_trial(&config.target, n, &mut stream, &config.generators)
            })
            .collect::<Result<_>>()?;
        by_size.push(outcomes);
    }

    for (g, generator) in config.generators.iter().enumerate() {
        for (&n, outcomes) in config.sample_sizes.iter().zip(&by_size) {
            let forward: Vec<f64> = outcomes.iter().map(|o| o.forward[g]).collect();
            let reverse: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.reverse.as_ref().map(|r| r[g]))
                .collect();
            let symmetrized: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.reverse.as_ref().map(|r| r[g].max(o.forward[g])))
                .collect();
            rows.push(GcRow {
                generator: generator.name().to_string(),
                n,
                forward: Summary::of(&forward).expect("trials >= 1"),
                reverse: Summary::of(&reverse),
                symmetrized: Summary::of(&symmetrized),
                reverse_defined_fraction: reverse.len() as f64 / outcomes.len() as f64,
            });
        }
    }
    Ok(GcTrace { rows })
}
