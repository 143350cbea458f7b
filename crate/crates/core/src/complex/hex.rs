//! Dual complexes of pointy-top hexagonal grids: one node per hexagon, one
//! edge per shared side, one triangle per shared corner.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Geometry, Point, SimplicialComplex};
use crate::error::{Error, Result};

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect { x_min, x_max, y_min, y_max }
    }

    pub fn center(&self) -> Point {
        [(self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0]
    }

    fn strictly_contains(&self, p: Point) -> bool {
        p[0] > self.x_min && p[0] < self.x_max && p[1] > self.y_min && p[1] < self.y_max
    }
}

/// The hexagon side crossed by one edge of the dual complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexSide {
    pub midpoint: Point,
    pub length: f64,
    /// Unit normal pointing from the lower-indexed to the higher-indexed hexagon.
    pub normal: Point,
}

/// Per-edge side geometry, indexed like the complex's edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexMeta {
    pub circumradius: f64,
    pub sides: Vec<HexSide>,
}

const AXIAL_NEIGHBORS: [(i64, i64); 3] = [(1, 0), (0, 1), (-1, 1)];

fn axial_center(q: i64, r: i64, rho: f64, origin: Point) -> Point {
    let s3 = 3f64.sqrt();
    [
        origin[0] + rho * s3 * (q as f64 + r as f64 / 2.0),
        origin[1] + rho * 1.5 * r as f64,
    ]
}

/// Builds the dual complex of an explicit set of axial hexagon cells.
///
/// Nodes are ordered by row `r`, then column `q`.
pub fn hex_complex_from_cells(
    cells: &[(i64, i64)],
    circumradius: f64,
    origin: Point,
) -> Result<(SimplicialComplex, Geometry, HexMeta)> {
    if !(circumradius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "circumradius must be positive, got {circumradius}"
        )));
    }
    let mut ordered: Vec<(i64, i64)> = cells.to_vec();
    ordered.sort_by_key(|&(q, r)| (r, q));
    ordered.dedup();
    if ordered.is_empty() {
        return Err(Error::NoHexagons);
    }
    let index: BTreeMap<(i64, i64), usize> =
        ordered.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let lookup = |q: i64, r: i64| index.get(&(q, r)).copied();

    let mut edges = Vec::new();
    let mut triangles = Vec::new();
    for (&(q, r), &i) in &index {
        for (dq, dr) in AXIAL_NEIGHBORS {
            if let Some(j) = lookup(q + dq, r + dr) {
                edges.push([i, j]);
            }
        }
        if let (Some(a), Some(b)) = (lookup(q + 1, r), lookup(q, r + 1)) {
            triangles.push([i, a, b]);
        }
        if let (Some(a), Some(b)) = (lookup(q + 1, r), lookup(q + 1, r - 1)) {
            triangles.push([i, a, b]);
        }
    }
    let positions: Vec<Point> = ordered
        .iter()
        .map(|&(q, r)| axial_center(q, r, circumradius, origin))
        .collect();
    let complex = SimplicialComplex::new(ordered.len(), edges, triangles)?;
    let sides = complex
        .edges()
        .iter()
        .map(|&[i, j]| {
            let (a, b) = (positions[i], positions[j]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let len = d[0].hypot(d[1]);
            HexSide {
                midpoint: [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0],
                length: circumradius,
                normal: [d[0] / len, d[1] / len],
            }
        })
        .collect();
    Ok((
        complex,
        Geometry::new(positions),
        HexMeta { circumradius, sides },
    ))
}

/// Hexagonal grid anchored at the center of `bounds`, keeping the
/// hexagons whose centers fall strictly inside.
pub fn hex_complex(bounds: Rect, circumradius: f64) -> Result<(SimplicialComplex, Geometry, HexMeta)> {
    if !(circumradius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "circumradius must be positive, got {circumradius}"
        )));
    }
    let origin = bounds.center();
    let half_h = (bounds.y_max - bounds.y_min) / 2.0;
    let half_w = (bounds.x_max - bounds.x_min) / 2.0;
    let r_max = (half_h / (1.5 * circumradius)).ceil() as i64 + 1;
    let q_max = (half_w / (3f64.sqrt() * circumradius)).ceil() as i64 + r_max + 1;
    let mut cells = Vec::new();
    for r in -r_max..=r_max {
        for q in -q_max..=q_max {
            if bounds.strictly_contains(axial_center(q, r, circumradius, origin)) {
                cells.push((q, r));
            }
        }
    }
    if cells.len() < 2 {
        return Err(Error::NoHexagons);
    }
    hex_complex_from_cells(&cells, circumradius, origin)
}

fn count_cells(bounds: Rect, circumradius: f64) -> usize {
    hex_complex(bounds, circumradius).map_or(0, |(x, _, _)| x.n_nodes())
}

/// Chooses the circumradius whose grid has a node count closest to `target`.
pub fn hex_complex_with_target(
    bounds: Rect,
    target: usize,
) -> Result<(SimplicialComplex, Geometry, HexMeta)> {
    if target < 2 {
        return Err(Error::InvalidParameter("target node count must be at least 2".into()));
    }
    let span = (bounds.x_max - bounds.x_min).max(bounds.y_max - bounds.y_min);
    // node count decreases roughly monotonically with the radius
    let (mut lo, mut hi) = (span * 1e-4, span);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if count_cells(bounds, mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut best = (usize::MAX, hi);
    for k in -20..=20 {
        let rho = lo * (1.0 + 0.002 * k as f64);
        let n = count_cells(bounds, rho);
        let gap = n.abs_diff(target);
        if gap < best.0 {
            best = (gap, rho);
        }
    }
    hex_complex(bounds, best.1)
}
