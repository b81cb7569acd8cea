//! Classical inequalities between f-divergences, evaluated on their
//! counterparts over rays.
//!
//! Normalizations: TV = ½‖μ − ν‖₁ ∈ [0, 1], H² = Σ(√μ − √ν)² ∈ [0, 2],
//! H = √H², natural logarithms. Two bounds are stated with the quantities
//! they hold for at these normalizations: reverse Pinsker uses the L¹
//! distance 2·TV, and the KL-Hellinger upper bound uses the Bhattacharyya
//! coefficient 1 − H²/2.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::dist::{is_absolutely_continuous, DiscreteDistribution};
use crate::divergence::divergences_over_rays;
use crate::error::{Error, Result};
use crate::generator::Generator;

/// Additive slack allowed on every inequality.
pub const INEQUALITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub family: char,
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    /// rhs − lhs; negative when violated.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub checks: Vec<InequalityCheck>,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// The divergences over rays the inequality families are stated in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayDivergences {
    pub tv: f64,
    pub kl: f64,
    pub hellinger2: f64,
    pub chi2: f64,
    pub le_cam: f64,
    pub jensen_shannon: f64,
}

impl RayDivergences {
    pub fn compute(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<Self> {
        let gens = [
            Generator::tv(),
            Generator::kl(),
            Generator::hellinger2(),
            Generator::chi2(),
            Generator::le_cam(),
            Generator::jensen_shannon(),
        ];
        let v = divergences_over_rays(&gens, mu, nu)?;
        Ok(Self {
            tv: v[0],
            kl: v[1],
            hellinger2: v[2],
            chi2: v[3],
            le_cam: v[4],
            jensen_shannon: v[5],
        })
    }
}

fn phi(t: f64) -> f64 {
    if t <= 0.5 {
        4.0 * t * t
    } else {
        t / (1.0 - t)
    }
}

/// log(1/m − 1)/(1 − 2m), continuous at m = 1/2 with value 2.
fn kl_hellinger_constant(nu_min: f64) -> f64 {
    let d = 1.0 - 2.0 * nu_min;
    if d.abs() < 1e-6 {
        // Taylor expansion around m = 1/2: 2 + (2/3) d²
        2.0 + 2.0 * d * d / 3.0
    } else {
        (1.0 / nu_min - 1.0).ln() / d
    }
}

/// Evaluates families (a)-(g) on precomputed values. `nu_min` is the
/// smallest atom mass of the second measure.
pub fn inequality_checks(d: &RayDivergences, nu_min: f64, slack: f64) -> InequalityReport {
    let RayDivergences {
        tv,
        kl,
        hellinger2: h2,
        chi2: chi,
        le_cam: lc,
        jensen_shannon: js,
    } = *d;
    let h = h2.max(0.0).sqrt();
    let h_tv_bound = h * (1.0 - h2 / 4.0).max(0.0).sqrt();
    let l1 = 2.0 * tv;
    let reverse_pinsker = (1.0 + l1 * l1 / (2.0 * nu_min)).ln();
    let bc = 1.0 - h2 / 2.0;
    let hellinger_kl_factor = 1.0 - bc * bc;
    let kl_hellinger_upper = if hellinger_kl_factor == 0.0 {
        0.0
    } else {
        kl_hellinger_constant(nu_min) * hellinger_kl_factor
    };

    let raw: [(char, &'static str, f64, f64); 20] = [
        ('a', "half_h2_le_tv", 0.5 * h2, tv),
        ('a', "tv_le_h_sqrt", tv, h_tv_bound),
        ('a', "h_sqrt_le_one", h_tv_bound, 1.0),
        ('a', "tv_le_bhattacharyya", tv, (-2.0 * (1.0 - h2 / 2.0).ln()).sqrt()),
        ('b', "pinsker", tv * tv, 0.5 * kl),
        (
            'b',
            "strong_pinsker",
            ((1.0 + tv) / (1.0 - tv)).ln() - 2.0 * tv / (1.0 + tv),
            kl,
        ),
        ('b', "reverse_pinsker", kl, reverse_pinsker),
        ('b', "reverse_pinsker_linear", reverse_pinsker, l1 * l1 / (2.0 * nu_min)),
        ('c', "tv2_le_quarter_chi2", tv * tv, chi / 4.0),
        ('c', "tv_le_chi2_ratio", tv, f64::max(0.5, chi / (1.0 + chi))),
        ('c', "four_tv2_le_phi", 4.0 * tv * tv, phi(tv)),
        ('c', "phi_le_chi2", phi(tv), chi),
        ('d', "h2_le_log_ratio", h2, 2.0 * (2.0 / (2.0 - h2)).ln()),
        ('d', "log_ratio_le_kl", 2.0 * (2.0 / (2.0 - h2)).ln(), kl),
        ('d', "kl_le_hellinger_bound", kl, kl_hellinger_upper),
        ('e', "kl_le_log_chi2", kl, (1.0 + chi).ln()),
        ('e', "log_chi2_le_chi2", (1.0 + chi).ln(), chi),
        ('f', "half_h2_le_le_cam", 0.5 * h2, lc),
        ('f', "le_cam_le_h2", lc, h2),
        ('g', "le_cam_le_js", lc, js),
    ];
    let mut checks: Vec<InequalityCheck> = raw
        .iter()
        .map(|&(family, name, lhs, rhs)| InequalityCheck {
            family,
            name,
            lhs,
            rhs,
            holds: lhs <= rhs + slack,
        })
        .collect();
    let (lhs, rhs) = (js, 2.0 * LN_2 * lc);
    checks.push(InequalityCheck {
        family: 'g',
        name: "js_le_2log2_le_cam",
        lhs,
        rhs,
        holds: lhs <= rhs + slack,
    });
    InequalityReport { checks }
}

/// Every inequality family over rays in the direction (μ‖ν), with slack
/// [`INEQUALITY_SLACK`].
pub fn check_inequalities(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<InequalityReport> {
    check_inequalities_with_slack(mu, nu, INEQUALITY_SLACK)
}

pub fn check_inequalities_with_slack(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    slack: f64,
) -> Result<InequalityReport> {
    require_mutual(mu, nu)?;
    let d = RayDivergences::compute(mu, nu)?;
    Ok(inequality_checks(&d, nu.min_weight(), slack))
}

fn require_mutual(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<()> {
    for (a, b) in [(mu, nu), (nu, mu)] {
        if !is_absolutely_continuous(a, b) {
            let (atom, mass) = a
                .atoms()
                .iter()
                .zip(a.weights())
                .find(|(x, _)| b.mass_at(**x) == 0.0)
                .map(|(x, w)| (*x, *w))
                .expect("violating atom exists");
            return Err(Error::AbsoluteContinuityViolated { atom, mass });
        }
    }
    Ok(())
}

/// Both sides of f̄(D_tv^R(μ‖ν)) ≤ D_f^R(μ‖ν).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn universal_lower_bound(
    f: &Generator,
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    slack: f64,
) -> Result<LowerBoundCheck> {
    let v = divergences_over_rays(&[Generator::tv(), f.clone()], mu, nu)?;
    let lhs = f.symmetrized(v[0]);
    let rhs = v[1];
    Ok(LowerBoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + slack,
    })
}

/// f̄(D_tv^R(μ‖ν)) ≤ D_f^R(μ‖ν) + 1e-9.
pub fn check_universal_lower_bound(
    f: &Generator,
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
) -> Result<bool> {
    Ok(universal_lower_bound(f, mu, nu, INEQUALITY_SLACK)?.holds)
}
