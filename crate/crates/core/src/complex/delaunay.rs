//! Bowyer-Watson Delaunay triangulation with ghost triangles on the hull.

use std::collections::{HashMap, VecDeque};

use super::{Geometry, Point, SimplicialComplex};
use crate::error::{Error, Result};

const GHOST: usize = usize::MAX;
const IN_CIRCLE_TOL: f64 = 1e-12;

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// In-circle determinant for the counter-clockwise triangle `abc`;
/// positive when `d` lies strictly inside the circumcircle.
pub fn in_circle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

struct Mesh {
    pts: Vec<Point>,
    tris: Vec<Option<[usize; 3]>>,
    owner: HashMap<(usize, usize), usize>,
}

impl Mesh {
    fn add(&mut self, t: [usize; 3]) {
        let id = self.tris.len();
        for k in 0..3 {
            self.owner.insert((t[k], t[(k + 1) % 3]), id);
        }
        self.tris.push(Some(t));
    }

    fn kill(&mut self, id: usize) {
        if let Some(t) = self.tris[id].take() {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if self.owner.get(&e) == Some(&id) {
                    self.owner.remove(&e);
                }
            }
        }
    }

    fn conflicts(&self, t: [usize; 3], p: Point) -> bool {
        if t[2] == GHOST {
            let (a, b) = (self.pts[t[0]], self.pts[t[1]]);
            let o = orient(a, b, p);
            if o > 0.0 {
                return true;
            }
            if o == 0.0 {
                // on the hull line: conflict only inside the open segment
                let dot = (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]);
                let len2 = (b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2);
                return dot > 0.0 && dot < len2;
            }
            return false;
        }
        in_circle(self.pts[t[0]], self.pts[t[1]], self.pts[t[2]], p) > IN_CIRCLE_TOL
    }

    fn insert(&mut self, v: usize) {
        let p = self.pts[v];
        let Some(seed) = (0..self.tris.len())
            .find(|&i| self.tris[i].is_some_and(|t| t[2] != GHOST && self.conflicts(t, p)))
            .or_else(|| {
                (0..self.tris.len()).find(|&i| self.tris[i].is_some_and(|t| self.conflicts(t, p)))
            })
        else {
            return;
        };

        let mut bad = vec![seed];
        let mut in_bad = HashMap::from([(seed, ())]);
        let mut queue = VecDeque::from([seed]);
        while let Some(id) = queue.pop_front() {
            let t = self.tris[id].unwrap();
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if let Some(&nb) = self.owner.get(&(b, a)) {
                    if !in_bad.contains_key(&nb) && self.conflicts(self.tris[nb].unwrap(), p) {
                        in_bad.insert(nb, ());
                        bad.push(nb);
                        queue.push_back(nb);
                    }
                }
            }
        }

        let mut boundary = Vec::new();
        for &id in &bad {
            let t = self.tris[id].unwrap();
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let inner = self
                    .owner
                    .get(&(b, a))
                    .is_some_and(|nb| in_bad.contains_key(nb));
                if !inner {
                    boundary.push((a, b));
                }
            }
        }
        for &id in &bad {
            self.kill(id);
        }
        for (a, b) in boundary {
            let t = if b == GHOST {
                [v, a, GHOST]
            } else if a == GHOST {
                [b, v, GHOST]
            } else {
                [a, b, v]
            };
            self.add(t);
        }
    }

    fn real_triangles(&self) -> Vec<[usize; 3]> {
        self.tris
            .iter()
            .flatten()
            .filter(|t| t[2] != GHOST)
            .copied()
            .collect()
    }
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Lawson flips: illegal edges are flipped, and co-circular quads take the
/// lexicographically smaller diagonal.
fn legalize(pts: &[Point], tris: &mut [[usize; 3]]) {
    let max_rounds = 10 * tris.len() + 10;
    for _ in 0..max_rounds {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, t) in tris.iter().enumerate() {
            for k in 0..3 {
                owner.insert((t[k], t[(k + 1) % 3]), i);
            }
        }
        let mut flipped = false;
        'scan: for i in 0..tris.len() {
            let t = tris[i];
            for k in 0..3 {
                let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
                let Some(&j) = owner.get(&(b, a)) else { continue };
                let u = tris[j];
                let d = *u.iter().find(|&&x| x != a && x != b).unwrap();
                let det = in_circle(pts[a], pts[b], pts[c], pts[d]);
                let convex = orient(pts[c], pts[a], pts[d]) > 0.0 && orient(pts[d], pts[b], pts[c]) > 0.0;
                let flip = if det > IN_CIRCLE_TOL {
                    convex
                } else if det.abs() <= IN_CIRCLE_TOL {
                    convex && sorted_pair(c, d) < sorted_pair(a, b)
                } else {
                    false
                };
                if flip {
                    tris[i] = [c, a, d];
                    tris[j] = [d, b, c];
                    flipped = true;
                    break 'scan;
                }
            }
        }
        if !flipped {
            return;
        }
    }
    log::warn!("delaunay legalization hit its round cap");
}

/// Delaunay triangulation of planar points. Node `i` of the result is
/// `points[i]`.
pub fn delaunay(points: &[Point]) -> Result<(SimplicialComplex, Geometry)> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        if seen.insert((p[0].to_bits(), p[1].to_bits()), i).is_some() {
            return Err(Error::DuplicatePoint(i));
        }
    }

    // normalize into the unit box so the predicate tolerance is scale free
    let geom = Geometry::new(points.to_vec());
    let (lo, hi) = geom.bounding_box().unwrap();
    let scale = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let pts: Vec<Point> = points
        .iter()
        .map(|p| [(p[0] - lo[0]) / scale, (p[1] - lo[1]) / scale])
        .collect();

    let Some(third) = (2..n).find(|&k| orient(pts[0], pts[1], pts[k]).abs() > 1e-12) else {
        return Err(Error::Collinear);
    };
    let first = if orient(pts[0], pts[1], pts[third]) > 0.0 {
        [0, 1, third]
    } else {
        [1, 0, third]
    };

    let mut mesh = Mesh {
        pts: pts.clone(),
        tris: Vec::new(),
        owner: HashMap::new(),
    };
    mesh.add(first);
    for k in 0..3 {
        mesh.add([first[(k + 1) % 3], first[k], GHOST]);
    }
    for v in (2..n).filter(|&v| v != third) {
        mesh.insert(v);
    }

    let mut tris = mesh.real_triangles();
    legalize(&pts, &mut tris);
    let complex = SimplicialComplex::new(n, Vec::<[usize; 2]>::new(), tris)?;
    Ok((complex, geom))
}
