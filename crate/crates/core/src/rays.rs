//! Suprema of μ − ν over left-rays, i.e. Kolmogorov-Smirnov statistics of
//! discrete measures.
//!
//! For purely atomic measures, sup over (−∞, a] and (−∞, a) coincide and are
//! attained at atoms, so only the merged support is scanned. ∅ and ℝ both
//! contribute 0.

use serde::Serialize;

use crate::dist::DiscreteDistribution;
use crate::divergence::divergence_over_rays;
use crate::error::Result;
use crate::generator::Generator;

/// Tolerance of the identity D_tv^R(μ‖ν) = sup_rays (μ − ν).
pub const KS_IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The first measure exceeds the second on the maximizing ray.
    First,
    /// The supremum is the trivial 0 of ∅ or ℝ.
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaySupremum {
    pub value: f64,
    /// Right end of the maximizing closed ray, `None` when only ∅/ℝ attain it.
    pub argmax_atom: Option<f64>,
    pub side: Side,
}

/// Merged sorted support of two measures with both prefix masses at each
/// support point.
fn merged_prefixes(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Vec<(f64, f64, f64)> {
    let (a, b) = (mu.atoms(), nu.atoms());
    let (wa, wb) = (mu.weights(), nu.weights());
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let (mut pa, mut pb) = (0.0, 0.0);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        if i < a.len() && a[i] == x {
            pa += wa[i];
            i += 1;
        }
        if j < b.len() && b[j] == x {
            pb += wb[j];
            j += 1;
        }
        out.push((x, pa, pb));
    }
    out
}

/// sup over left-rays A of μ(A) − ν(A), clamped to [0, 1].
pub fn ray_supremum(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> RaySupremum {
    let mut best = RaySupremum {
        value: 0.0,
        argmax_atom: None,
        side: Side::Neither,
    };
    for (x, pa, pb) in merged_prefixes(mu, nu) {
        let diff = pa - pb;
        if diff > best.value {
            best = RaySupremum {
                value: diff.min(1.0),
                argmax_atom: Some(x),
                side: Side::First,
            };
        }
    }
    best
}

/// sup over left-rays of |μ(A) − ν(A)|.
pub fn ks_two_sided(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> f64 {
    ray_supremum(mu, nu).value.max(ray_supremum(nu, mu).value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsCertificate {
    pub holds: bool,
    pub tv_over_rays: f64,
    pub ray_supremum: f64,
    pub residual: f64,
}

/// Compares D_tv^R(μ‖ν) with sup_rays (μ − ν).
pub fn certify_ks_identity(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<KsCertificate> {
    let tv = divergence_over_rays(&Generator::tv(), mu, nu)?.value;
    let sup = ray_supremum(mu, nu).value;
    let residual = (tv - sup).abs();
    Ok(KsCertificate {
        holds: residual <= KS_IDENTITY_TOL,
        tv_over_rays: tv,
        ray_supremum: sup,
        residual,
    })
}
