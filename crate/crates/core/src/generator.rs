//! Convex generators f with f(1) = 0.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type GeneratorFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Names of the built-in generators, in catalogue order.
pub const CATALOGUE: [&str; 7] = [
    "tv",
    "kl",
    "hellinger2",
    "chi2",
    "le_cam",
    "jensen_shannon",
    "jeffreys",
];

const CONVEXITY_PROBES: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0];

/// A convex function f: [0, ∞) → (−∞, ∞] with f(1) = 0, evaluated with its
/// right limit at 0.
#[derive(Clone)]
pub struct Generator {
    name: String,
    f: Arc<GeneratorFn>,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator").field("name", &self.name).finish()
    }
}

fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

impl Generator {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Total variation, |t − 1| / 2.
    pub fn tv() -> Self {
        Self::new("tv", |t| (t - 1.0).abs() / 2.0)
    }

    /// Kullback-Leibler, t ln t (nats).
    pub fn kl() -> Self {
        Self::new("kl", xlogx)
    }

    /// Squared Hellinger, (√t − 1)²; ranges over [0, 2].
    pub fn hellinger2() -> Self {
        Self::new("hellinger2", |t| {
            let r = t.sqrt() - 1.0;
            r * r
        })
    }

    /// Pearson χ², (t − 1)².
    pub fn chi2() -> Self {
        Self::new("chi2", |t| (t - 1.0) * (t - 1.0))
    }

    /// Le Cam, (1 − t)² / (2(1 + t)).
    pub fn le_cam() -> Self {
        Self::new("le_cam", |t| (1.0 - t) * (1.0 - t) / (2.0 * (1.0 + t)))
    }

    /// Jensen-Shannon, t ln(2t/(1+t)) + ln(2/(1+t)).
    pub fn jensen_shannon() -> Self {
        Self::new("jensen_shannon", |t| {
            let head = if t == 0.0 { 0.0 } else { t * (2.0 * t / (1.0 + t)).ln() };
            head + (2.0 / (1.0 + t)).ln()
        })
    }

    /// Jeffreys, (t − 1) ln t; infinite at 0.
    pub fn jeffreys() -> Self {
        Self::new("jeffreys", |t| {
            if t == 0.0 {
                f64::INFINITY
            } else {
                (t - 1.0) * t.ln()
            }
        })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "tv" => Ok(Self::tv()),
            "kl" => Ok(Self::kl()),
            "hellinger2" => Ok(Self::hellinger2()),
            "chi2" => Ok(Self::chi2()),
            "le_cam" => Ok(Self::le_cam()),
            "jensen_shannon" => Ok(Self::jensen_shannon()),
            "jeffreys" => Ok(Self::jeffreys()),
            other => Err(Error::UnknownGenerator(other.to_string())),
        }
    }

    /// Parses a comma-separated list of generator names.
    pub fn parse_list(names: &str) -> Result<Vec<Self>> {
        names
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Self::by_name)
            .collect()
    }

    pub fn catalogue() -> Vec<Self> {
        CATALOGUE
            .iter()
            .map(|n| Self::by_name(n).expect("catalogue names resolve"))
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn value_at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// f̄(x) = f(1 + x) + f(1 − x) for x in [0, 1].
    pub fn symmetrized(&self, x: f64) -> f64 {
        self.eval(1.0 + x) + self.eval(1.0 - x)
    }

    /// t ↦ f(t) + c (t − 1). Divergences are unchanged by the added term.
    pub fn affine_shift(&self, c: f64) -> Self {
        let f = Arc::clone(&self.f);
        Self {
            name: format!("{}{:+}(t-1)", self.name, c),
            f: Arc::new(move |t| f(t) + c * (t - 1.0)),
        }
    }

    /// t ↦ a f(t) + b g(t), for a, b ≥ 0.
    pub fn combine(a: f64, f: &Generator, b: f64, g: &Generator) -> Self {
        let (ff, gg) = (Arc::clone(&f.f), Arc::clone(&g.f));
        Self {
            name: format!("{a}*{}+{b}*{}", f.name, g.name),
            f: Arc::new(move |t| {
                // avoid 0 * inf
                let x = if a == 0.0 { 0.0 } else { a * ff(t) };
                let y = if b == 0.0 { 0.0 } else { b * gg(t) };
                x + y
            }),
        }
    }

    /// Probes f(1) = 0, midpoint convexity and the shape of f̄.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.eval(1.0) != 0.0 {
            return Err(format!("{}: f(1) = {}", self.name, self.eval(1.0)));
        }
        for &s in &CONVEXITY_PROBES {
            for &t in &CONVEXITY_PROBES {
                let mid = self.eval((s + t) / 2.0);
                let chord = (self.eval(s) + self.eval(t)) / 2.0;
                if mid > chord + 1e-12 {
                    return Err(format!("{}: not midpoint convex at ({s}, {t})", self.name));
                }
            }
        }
        if self.symmetrized(0.0) != 0.0 {
            return Err(format!("{}: symmetrized value at 0 is nonzero", self.name));
        }
        let mut prev = 0.0;
        for k in 1..=10 {
            let x = k as f64 / 10.0;
            let v = self.symmetrized(x);
            if v < prev {
                return Err(format!("{}: symmetrized function decreases at {x}", self.name));
            }
            prev = v;
        }
        Ok(())
    }
}
