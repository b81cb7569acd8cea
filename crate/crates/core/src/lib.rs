//! f-divergences over rays for finite discrete measures on ℝ.
//!
//! The divergence over rays D_f^R(μ‖ν) integrates f against ν after
//! replacing dμ/dν by its nearest nonincreasing function in L²(ν). For total
//! variation this is exactly the one-sided Kolmogorov-Smirnov statistic
//! sup over left-rays of μ − ν.
//!
//! Modules:
//! - [`dist`]: discrete and empirical measures, Radon-Nikodym derivatives.
//! - [`antitonic`]: pool-adjacent-violators projection, an enumeration
//!   oracle and KKT certificates.
//! - [`generator`], [`divergence`]: generators f and the divergences built
//!   on them.
//! - [`rays`]: ray suprema and the KS identity.
//! - [`inequalities`]: relations between divergences over rays.
//! - [`gc`]: Glivenko-Cantelli simulation.
//! - [`levelcurves`]: divergence grids over the 3-simplex and contours.
//! - [`fuzz`]: seeded random pairs and batch property checks.

pub mod antitonic;
pub mod dist;
pub mod divergence;
pub mod error;
pub mod format;
pub mod fuzz;
pub mod gc;
pub mod generator;
pub mod inequalities;
pub mod levelcurves;
pub mod rays;

pub use antitonic::{
    check_monotone_pair, prefix_integral_check, project_antitonic, qp_oracle, AntitonicFit, Block,
    KktReport, PrefixIntegralReport, WeightedSequence,
};
pub use dist::{
    prefix_masses, rn_derivative, DiscreteDistribution, EmpiricalDistribution, RnDerivative,
};
pub use divergence::{
    divergence, divergence_over_rays, partition_divergence, projected_measure, rearrangement_pair,
    symmetrized_over_rays, Direction, DivergenceResult, RearrangementPair,
};
pub use error::{Error, Result};
pub use gc::{coverage_time, run_sweep, run_trial, GcConfig, GcTrace};
pub use generator::Generator;
pub use inequalities::{check_inequalities, check_universal_lower_bound, InequalityReport};
pub use rays::{certify_ks_identity, ks_two_sided, ray_supremum, RaySupremum};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
