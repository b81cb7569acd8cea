#![allow(dead_code)]
//! Oracles shared by the integration tests. None of these call into the
//! code paths they are used to check.

use raydiv_core::DiscreteDistribution;

pub fn dist(weights: &[f64]) -> DiscreteDistribution {
    let atoms: Vec<f64> = (1..=weights.len()).map(|k| k as f64).collect();
    DiscreteDistribution::new(&atoms, weights).unwrap()
}

fn mass_where(d: &DiscreteDistribution, keep: impl Fn(f64) -> bool) -> f64 {
    d.atoms()
        .iter()
        .zip(d.weights())
        .filter(|(a, _)| keep(**a))
        .map(|(_, w)| *w)
        .sum()
}

/// sup of μ(A) − ν(A) over ∅, ℝ and every open and closed left-ray ending at
/// an atom, a midpoint between atoms, or outside the support.
pub fn brute_force_ray_sup(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> f64 {
    let mut points: Vec<f64> = mu.atoms().iter().chain(nu.atoms()).copied().collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut cuts = points.clone();
    for w in points.windows(2) {
        cuts.push((w[0] + w[1]) / 2.0);
    }
    cuts.push(points[0] - 1.0);
    cuts.push(points[points.len() - 1] + 1.0);

    let mut best = 0.0_f64;
    for &a in &cuts {
        let closed = mass_where(mu, |x| x <= a) - mass_where(nu, |x| x <= a);
        let open = mass_where(mu, |x| x < a) - mass_where(nu, |x| x < a);
        best = best.max(closed).max(open);
    }
    best
}

/// sup over all subsets A of the support of μ(A) − ν(A) (total variation).
pub fn brute_force_tv(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> f64 {
    let mut points: Vec<f64> = mu.atoms().iter().chain(nu.atoms()).copied().collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    assert!(points.len() <= 16);
    let mut best = 0.0_f64;
    for mask in 0u32..(1 << points.len()) {
        let inside = |x: f64| {
            let k = points.iter().position(|p| *p == x).unwrap();
            mask & (1 << k) != 0
        };
        best = best.max(mass_where(mu, inside) - mass_where(nu, inside));
    }
    best
}

/// Min-max formula for the weighted antitonic regression:
/// β_i = min_{j≤i} max_{k≥i} Av(j..=k).
pub fn minmax_antitonic(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let n = values.len();
    let avg = |j: usize, k: usize| {
        let w: f64 = weights[j..=k].iter().sum();
        let s: f64 = (j..=k).map(|i| weights[i] * values[i]).sum();
        s / w
    };
    (0..n)
        .map(|i| {
            (0..=i)
                .map(|j| (i..n).map(|k| avg(j, k)).fold(f64::NEG_INFINITY, f64::max))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// E[coverage time] by inclusion-exclusion: Σ_{∅≠J} (−1)^{|J|+1} / p(J).
pub fn expected_coverage_time(p: &[f64]) -> f64 {
    let n = p.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mass: f64 = (0..n).filter(|k| mask & (1 << k) != 0).map(|k| p[k]).sum();
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign / mass;
    }
    total
}
