//! Oriented simplicial complexes of dimension at most two.
//!
//! Simplices are stored with ascending vertex lists, which fixes the
//! reference orientation: an edge `[i, j]` points from `i` to `j` and a
//! triangle `[i, j, k]` circulates `i -> j -> k`. Node indices are 0-based
//! in memory; the file formats in [`crate::io`] use 1-based indices.

mod delaunay;
mod hex;
mod incidence;

pub use delaunay::{delaunay, in_circle};
pub use hex::{hex_complex, hex_complex_from_cells, hex_complex_with_target, HexMeta, HexSide, Rect};
pub use incidence::Incidence;

use std::collections::{BTreeSet, HashMap, VecDeque};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// A simplex as a strictly ascending vertex list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Canonicalizes `vertices` into ascending order, rejecting repeated vertices.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() || vertices.len() > 3 {
            return Err(Error::SimplexSize(vertices.len()));
        }
        let original = vertices.clone();
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateSimplex(original));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

/// Planar node positions, one per node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Geometry {
    pub positions: Vec<Point>,
}

impl Geometry {
    pub fn new(positions: Vec<Point>) -> Self {
        Geometry { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn check(&self, complex: &SimplicialComplex) -> Result<()> {
        if self.positions.len() != complex.n_nodes() {
            return Err(Error::GeometryMismatch {
                expected: complex.n_nodes(),
                got: self.positions.len(),
            });
        }
        Ok(())
    }

    /// Index of the node nearest to `p`; ties go to the lowest index.
    pub fn nearest_node(&self, p: Point) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, q) in self.positions.iter().enumerate() {
            let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let first = *self.positions.first()?;
        let (mut lo, mut hi) = (first, first);
        for p in &self.positions {
            lo = [lo[0].min(p[0]), lo[1].min(p[1])];
            hi = [hi[0].max(p[0]), hi[1].max(p[1])];
        }
        Some((lo, hi))
    }

    /// Circumcenter of the triangle spanned by three nodes.
    pub fn circumcenter(&self, tri: [usize; 3]) -> Point {
        circumcenter(
            self.positions[tri[0]],
            self.positions[tri[1]],
            self.positions[tri[2]],
        )
    }
}

pub(crate) fn circumcenter(a: Point, b: Point, c: Point) -> Point {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    let a2 = a[0] * a[0] + a[1] * a[1];
    let b2 = b[0] * b[0] + b[1] * b[1];
    let c2 = c[0] * c[0] + c[1] * c[1];
    let ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
    let uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
    [ux, uy]
}

/// Degree of a cochain: 0 (nodes), 1 (edges) or 2 (triangles).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degree {
    Node,
    Edge,
    Triangle,
}

/// Real values on the oriented k-simplices of a complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub degree: Degree,
    pub values: DVector<f64>,
}

impl Cochain {
    pub fn new(degree: Degree, values: DVector<f64>) -> Self {
        Cochain { degree, values }
    }

    pub fn edge_flow(values: DVector<f64>) -> Self {
        Cochain::new(Degree::Edge, values)
    }

    pub fn zeros(degree: Degree, len: usize) -> Self {
        Cochain::new(degree, DVector::zeros(len))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.norm()
    }

    /// Errors unless the cochain has `degree` and matches the simplex count
    /// of `complex`.
    pub fn check(&self, complex: &SimplicialComplex, degree: Degree) -> Result<()> {
        let expected = complex.count(degree);
        if self.degree != degree || self.values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// An oriented simplicial complex with nodes, edges and triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    n_nodes: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    edge_index: HashMap<[usize; 2], usize>,
    triangle_index: HashMap<[usize; 3], usize>,
}

impl SimplicialComplex {
    /// Builds a complex from 0-based vertex sets.
    ///
    /// Vertex lists are reordered ascending, missing triangle faces are
    /// added, duplicates are merged and both simplex lists are sorted
    /// lexicographically.
    pub fn new<E, T>(n_nodes: usize, edges: E, triangles: T) -> Result<Self>
    where
        E: IntoIterator,
        E::Item: AsRef<[usize]>,
        T: IntoIterator,
        T::Item: AsRef<[usize]>,
    {
        let check = |v: &[usize], want: usize| -> Result<Simplex> {
            if v.len() != want {
                return Err(Error::SimplexSize(v.len()));
            }
            if let Some(&bad) = v.iter().find(|&&x| x >= n_nodes) {
                return Err(Error::VertexOutOfRange {
                    vertex: bad,
                    n_nodes,
                });
            }
            Simplex::new(v.to_vec())
        };

        let mut edge_set = BTreeSet::new();
        let mut tri_set = BTreeSet::new();
        for e in edges {
            let s = check(e.as_ref(), 2)?;
            edge_set.insert([s.0[0], s.0[1]]);
        }
        for t in triangles {
            let s = check(t.as_ref(), 3)?;
            let [a, b, c] = [s.0[0], s.0[1], s.0[2]];
            tri_set.insert([a, b, c]);
            edge_set.extend([[a, b], [b, c], [a, c]]);
        }
        Ok(Self::from_sorted(
            n_nodes,
            edge_set.into_iter().collect(),
            tri_set.into_iter().collect(),
        ))
    }

    /// Builds a complex from 1-based vertex sets, as used in complex files.
    pub fn from_simplices(
        n_nodes: usize,
        edges: &[Vec<usize>],
        triangles: &[Vec<usize>],
    ) -> Result<Self> {
        let shift = |v: &Vec<usize>| -> Result<Vec<usize>> {
            v.iter()
                .map(|&x| {
                    if x == 0 || x > n_nodes {
                        Err(Error::VertexOutOfRange { vertex: x, n_nodes })
                    } else {
                        Ok(x - 1)
                    }
                })
                .collect()
        };
        let edges = edges.iter().map(shift).collect::<Result<Vec<_>>>()?;
        let triangles = triangles.iter().map(shift).collect::<Result<Vec<_>>>()?;
        Self::new(n_nodes, edges, triangles)
    }

    fn from_sorted(n_nodes: usize, edges: Vec<[usize; 2]>, triangles: Vec<[usize; 3]>) -> Self {
        let edge_index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let triangle_index = triangles.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        SimplicialComplex {
            n_nodes,
            edges,
            triangles,
            edge_index,
            triangle_index,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn count(&self, degree: Degree) -> usize {
        match degree {
            Degree::Node => self.n_nodes,
            Degree::Edge => self.edges.len(),
            Degree::Triangle => self.triangles.len(),
        }
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Column index of the edge between `a` and `b`, in either order.
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edge_index.get(&key).copied()
    }

    pub fn triangle_id(&self, mut t: [usize; 3]) -> Option<usize> {
        t.sort_unstable();
        self.triangle_index.get(&t).copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_nodes as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Node-to-edge boundary operator, N0 x N1.
    pub fn boundary_1(&self) -> Incidence {
        let cols = self
            .edges
            .iter()
            .map(|&[i, j]| vec![(i, -1), (j, 1)])
            .collect();
        Incidence::new(self.n_nodes, cols)
    }

    /// Edge-to-triangle boundary operator, N1 x N2.
    pub fn boundary_2(&self) -> Incidence {
        let cols = self
            .triangles
            .iter()
            .map(|&[i, j, k]| {
                let mut col = vec![
                    (self.edge_index[&[i, j]], 1),
                    (self.edge_index[&[j, k]], 1),
                    (self.edge_index[&[i, k]], -1),
                ];
                col.sort_unstable();
                col
            })
            .collect();
        Incidence::new(self.edges.len(), cols)
    }

    /// Sorted neighbor lists of the 1-skeleton.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for &[i, j] in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        adj
    }

    /// Connected components of the 1-skeleton, isolated nodes included.
    pub fn connected_components(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n_nodes];
        let mut components = 0;
        for start in 0..self.n_nodes {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        components
    }

    /// First Betti number from exact ranks: N1 - rank d1 - rank d2.
    pub fn betti_1(&self) -> usize {
        let rank_1 = self.n_nodes - self.connected_components();
        let rank_2 = self.boundary_2().rank();
        self.edges.len() - rank_1 - rank_2
    }

    /// Removes every triangle whose circumcenter lies strictly within
    /// `radius` of `center`.
    ///
    /// Edges that were shared by two removed triangles are dropped with
    /// them, and nodes left without any edge are deleted (the geometry is
    /// reindexed accordingly). Boundary edges of the removed region stay, so
    /// the region becomes a hole bounded by a cycle.
    pub fn punch_hole(
        &self,
        geometry: &Geometry,
        center: Point,
        radius: f64,
    ) -> Result<(SimplicialComplex, Geometry)> {
        geometry.check(self)?;
        let removed: Vec<bool> = self
            .triangles
            .iter()
            .map(|&t| {
                let c = geometry.circumcenter(t);
                (c[0] - center[0]).hypot(c[1] - center[1]) < radius
            })
            .collect();
        if !removed.iter().any(|&r| r) {
            return Ok((self.clone(), geometry.clone()));
        }

        let mut kept_faces = vec![0usize; self.edges.len()];
        let mut removed_faces = vec![0usize; self.edges.len()];
        for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
            for e in [[a, b], [b, c], [a, c]] {
                let id = self.edge_index[&e];
                if removed[t] {
                    removed_faces[id] += 1;
                } else {
                    kept_faces[id] += 1;
                }
            }
        }
        let keep_edge: Vec<bool> = (0..self.edges.len())
            .map(|e| kept_faces[e] > 0 || removed_faces[e] < 2)
            .collect();

        let mut used = vec![false; self.n_nodes];
        for (e, &[i, j]) in self.edges.iter().enumerate() {
            if keep_edge[e] {
                used[i] = true;
                used[j] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.n_nodes];
        let mut positions = Vec::new();
        for (v, &u) in used.iter().enumerate() {
            if u {
                remap[v] = positions.len();
                positions.push(geometry.positions[v]);
            }
        }
        let edges: Vec<[usize; 2]> = self
            .edges
            .iter()
            .zip(&keep_edge)
            .filter(|(_, &k)| k)
            .map(|(&[i, j], _)| [remap[i], remap[j]])
            .collect();
        let triangles: Vec<[usize; 3]> = self
            .triangles
            .iter()
            .zip(&removed)
            .filter(|(_, &r)| !r)
            .map(|(&[a, b, c], _)| [remap[a], remap[b], remap[c]])
            .collect();
        let complex = SimplicialComplex::new(positions.len(), edges, triangles)?;
        let components = complex.connected_components();
        if components > 1 {
            return Err(Error::Disconnected { components });
        }
        Ok((complex, Geometry::new(positions)))
    }
}
