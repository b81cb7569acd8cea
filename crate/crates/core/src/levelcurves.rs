//! Divergence grids over the simplex of three-atom measures μ against a
//! fixed ν, and their contour plots.
//!
//! Node (i, j) of an N×N lattice is μ = (i, j, N−1−i−j)/(N−1). Only interior
//! nodes (all three masses positive) carry a value.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dist::DiscreteDistribution;
use crate::divergence::{divergence, divergence_over_rays};
use crate::error::{Error, Result};
use crate::format::machine;
use crate::generator::Generator;

/// Number of contour levels drawn per plot.
pub const CONTOUR_LEVELS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// D(μ‖ν)
    Forward,
    /// D(ν‖μ)
    Reverse,
}

impl Orientation {
    pub fn label(self) -> &'static str {
        match self {
            Orientation::Forward => "forward",
            Orientation::Reverse => "reverse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelGrid {
    pub generator: String,
    pub over_rays: bool,
    pub orientation: Orientation,
    pub size: usize,
    /// Row-major in i (first mass), then j (second mass).
    pub values: Vec<Option<f64>>,
}

/// The three masses at lattice node (i, j), or `None` off the open simplex.
pub fn node_masses(size: usize, i: usize, j: usize) -> Option<[f64; 3]> {
    let last = size - 1;
    if i == 0 || j == 0 || i + j >= last {
        return None;
    }
    let d = last as f64;
    Some([i as f64 / d, j as f64 / d, (last - i - j) as f64 / d])
}

impl LevelGrid {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.size + j]
    }

    /// `{generator}_{plain|rays}_{forward|reverse}`
    pub fn stem(&self) -> String {
        format!(
            "{}_{}_{}",
            self.generator,
            if self.over_rays { "rays" } else { "plain" },
            self.orientation.label()
        )
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().flatten().copied().filter(|v| v.is_finite());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// `i,j,mu1,mu2,mu3,value` for every lattice node; off-simplex and
    /// boundary nodes have empty mass and value fields.
    pub fn to_csv(&self, metadata: &[String]) -> String {
        let mut out = String::new();
        for line in metadata {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str("i,j,mu1,mu2,mu3,value\n");
        for i in 0..self.size {
            for j in 0..self.size {
                match (node_masses(self.size, i, j), self.get(i, j)) {
                    (Some(m), Some(v)) => {
                        let _ = writeln!(
                            out,
                            "{i},{j},{},{},{},{}",
                            machine(m[0]),
                            machine(m[1]),
                            machine(m[2]),
                            machine(v)
                        );
                    }
                    _ => {
                        let _ = writeln!(out, "{i},{j},,,,");
                    }
                }
            }
        }
        out
    }

    /// Contour segments at `level` in (first mass, second mass) coordinates,
    /// by marching squares over cells whose four corners carry values.
    pub fn contour_segments(&self, level: f64) -> Vec<[(f64, f64); 2]> {
        let d = (self.size - 1) as f64;
        let mut segments = Vec::new();
        for i in 0..self.size.saturating_sub(1) {
            for j in 0..self.size.saturating_sub(1) {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let vals: Option<Vec<f64>> = corners
                    .iter()
                    .map(|&(a, b)| self.get(a, b).filter(|v| v.is_finite()))
                    .collect();
                let Some(v) = vals else { continue };
                let pos: Vec<(f64, f64)> = corners.iter().map(|&(a, b)| (a as f64 / d, b as f64 / d)).collect();
                let center_above = (v[0] + v[1] + v[2] + v[3]) / 4.0 >= level;
                for [ea, eb] in cell_edges(&v, level, center_above) {
                    segments.push([edge_point(&pos, &v, ea, level), edge_point(&pos, &v, eb, level)]);
                }
            }
        }
        segments
    }

    /// SVG with `levels` contours evenly spaced strictly between the grid's
    /// minimum and maximum.
    pub fn contour_svg(&self, levels: usize, metadata: &[String]) -> String {
        const SIZE: f64 = 600.0;
        const PAD: f64 = 20.0;
        let span = SIZE - 2.0 * PAD;
        let px = |(x, y): (f64, f64)| (PAD + x * span, SIZE - PAD - y * span);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        for line in metadata {
            let _ = writeln!(out, "<!-- {} -->", line.replace("--", "- -"));
        }
        let _ = writeln!(out, "<title>{}</title>", self.stem());
        let (a, b, c) = (px((0.0, 0.0)), px((1.0, 0.0)), px((0.0, 1.0)));
        let _ = writeln!(
            out,
            r#"<path d="M{:.2} {:.2} L{:.2} {:.2} L{:.2} {:.2} Z" fill="none" stroke="black" stroke-width="1"/>"#,
            a.0, a.1, b.0, b.1, c.0, c.1
        );
        if let Some((lo, hi)) = self.min_max() {
            if hi > lo {
                for k in 1..=levels {
                    let level = lo + (hi - lo) * k as f64 / (levels + 1) as f64;
                    let segments = self.contour_segments(level);
                    if segments.is_empty() {
                        continue;
                    }
                    let mut path = String::new();
                    for [p, q] in segments {
                        let (p, q) = (px(p), px(q));
                        let _ = write!(path, "M{:.2} {:.2}L{:.2} {:.2}", p.0, p.1, q.0, q.1);
                    }
                    let shade = (255.0 * (1.0 - k as f64 / levels as f64)) as u8;
                    let _ = writeln!(
                        out,
                        r#"<path data-level="{}" d="{path}" fill="none" stroke="rgb({shade},0,{})" stroke-width="0.8"/>"#,
                        machine(level),
                        255 - shade
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

// Edges: 0 bottom (c0-c1), 1 right (c1-c2), 2 top (c3-c2), 3 left (c0-c3).
fn cell_edges(v: &[f64], level: f64, center_above: bool) -> Vec<[usize; 2]> {
    let case = v
        .iter()
        .enumerate()
        .fold(0u8, |acc, (k, &x)| acc | (((x >= level) as u8) << k));
    match case {
        0 | 15 => vec![],
        1 | 14 => vec![[3, 0]],
        2 | 13 => vec![[0, 1]],
        3 | 12 => vec![[3, 1]],
        4 | 11 => vec![[1, 2]],
        6 | 9 => vec![[0, 2]],
        7 | 8 => vec![[3, 2]],
        5 => {
            if center_above {
                vec![[0, 1], [3, 2]]
            } else {
                vec![[3, 0], [1, 2]]
            }
        }
        10 => {
            if center_above {
                vec![[3, 0], [1, 2]]
            } else {
                vec![[0, 1], [3, 2]]
            }
        }
        _ => unreachable!(),
    }
}

fn edge_point(pos: &[(f64, f64)], v: &[f64], edge: usize, level: f64) -> (f64, f64) {
    let (a, b) = match edge {
        0 => (0, 1),
        1 => (1, 2),
        2 => (3, 2),
        _ => (0, 3),
    };
    let t = if v[b] == v[a] { 0.5 } else { (level - v[a]) / (v[b] - v[a]) };
    (
        pos[a].0 + t * (pos[b].0 - pos[a].0),
        pos[a].1 + t * (pos[b].1 - pos[a].1),
    )
}

/// Grids for every generator in `gens`, in the order plain forward, plain
/// reverse, rays forward, rays reverse.
pub fn level_grids(nu: &DiscreteDistribution, size: usize, gens: &[Generator]) -> Result<Vec<LevelGrid>> {
    if nu.len() != 3 {
        return Err(Error::InvalidConfig(format!(
            "level curves need a three-atom distribution, got {} atoms",
            nu.len()
        )));
    }
    if size < 2 {
        return Err(Error::InvalidConfig("grid size must be at least 2".into()));
    }

    let variants = [
        (false, Orientation::Forward),
        (false, Orientation::Reverse),
        (true, Orientation::Forward),
        (true, Orientation::Reverse),
    ];
    let mut grids = Vec::with_capacity(gens.len() * variants.len());
    for f in gens {
        for &(over_rays, orientation) in &variants {
            let values = (0..size * size)
                .into_par_iter()
                .map(|k| {
                    let Some(m) = node_masses(size, k / size, k % size) else {
                        return Ok(None);
                    };
                    let mu = DiscreteDistribution::new(nu.atoms(), &m)?;
                    let (first, second) = match orientation {
                        Orientation::Forward => (&mu, nu),
                        Orientation::Reverse => (nu, &mu),
                    };
                    let r = if over_rays {
                        divergence_over_rays(f, first, second)?
                    } else {
                        divergence(f, first, second)?
                    };
                    Ok(Some(r.value))
                })
                .collect::<Result<Vec<_>>>()?;
            grids.push(LevelGrid {
                generator: f.name().to_string(),
                over_rays,
                orientation,
                size,
                values,
            });
        }
    }
    Ok(grids)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_grid(size: usize) -> LevelGrid {
        let mut values = vec![None; size * size];
        for i in 0..size {
            for j in 0..size {
                values[i * size + j] = Some(i as f64 / (size - 1) as f64);
            }
        }
        LevelGrid {
            generator: "x".into(),
            over_rays: false,
            orientation: Orientation::Forward,
            size,
            values,
        }
    }

    #[test]
    fn contour_of_linear_field_is_vertical_line() {
        let grid = linear_grid(11);
        let segments = grid.contour_segments(0.45);
        assert_eq!(segments.len(), 10);
        for [p, q] in segments {
            assert!((p.0 - 0.45).abs() < 1e-12 && (q.0 - 0.45).abs() < 1e-12);
        }
    }

    #[test]
    fn saddle_cells_produce_two_segments() {
        let grid = LevelGrid {
            generator: "s".into(),
            over_rays: false,
            orientation: Orientation::Forward,
            size: 2,
            // corners (0,0)=1, (0,1)=0, (1,0)=0, (1,1)=1
            values: vec![Some(1.0), Some(0.0), Some(0.0), Some(1.0)],
        };
        assert_eq!(grid.contour_segments(0.5).len(), 2);
        assert_eq!(grid.contour_segments(2.0).len(), 0);
    }

    #[test]
    fn node_layout() {
        assert_eq!(node_masses(101, 20, 50), Some([0.2, 0.5, 0.3]));
        assert_eq!(node_masses(101, 0, 50), None);
        assert_eq!(node_masses(101, 50, 50), None);
        assert_eq!(node_masses(2, 1, 0), None);
    }

    #[test]
    fn witness_node_values() {
        let nu = DiscreteDistribution::new(&[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
        let grids = level_grids(&nu, 11, &[Generator::tv()]).unwrap();
        assert_eq!(grids.len(), 4);
        let stems: Vec<String> = grids.iter().map(LevelGrid::stem).collect();
        assert_eq!(stems, ["tv_plain_forward", "tv_plain_reverse", "tv_rays_forward", "tv_rays_reverse"]);
        // node (1, 5) is μ = (0.1, 0.5, 0.4)
        assert!(grids[2].get(1, 5).unwrap().abs() < 1e-12);
        assert!((grids[3].get(1, 5).unwrap() - 0.1).abs() < 1e-12);
        assert!(grids[0].get(2, 5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let two = DiscreteDistribution::new(&[1.0, 2.0], &[0.5, 0.5]).unwrap();
        assert!(level_grids(&two, 11, &[Generator::tv()]).is_err());
        let nu = DiscreteDistribution::new(&[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
        assert!(level_grids(&nu, 1, &[Generator::tv()]).is_err());
    }

    #[test]
    fn csv_and_svg_render() {
        let nu = DiscreteDistribution::new(&[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
        let grids = level_grids(&nu, 6, &[Generator::hellinger2()]).unwrap();
        let csv = grids[0].to_csv(&["meta".into()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# meta");
        assert_eq!(lines[1], "i,j,mu1,mu2,mu3,value");
        assert_eq!(lines.len(), 2 + 36);
        assert_eq!(lines[2], "0,0,,,,");
        let svg = grids[0].contour_svg(CONTOUR_LEVELS, &["meta".into()]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("data-level"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
