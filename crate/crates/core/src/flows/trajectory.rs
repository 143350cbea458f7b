//! Trajectory files, snapping, and lifting to edge flows.

use std::collections::{HashMap, VecDeque};
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use nalgebra::DVector;

use crate::complex::{Cochain, Geometry, Point, SimplicialComplex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Seconds since the Unix epoch.
    pub time: f64,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: String,
    /// Time-sorted.
    pub samples: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrajectories {
    /// In order of first appearance in the file.
    pub trajectories: Vec<Trajectory>,
    /// Rows dropped for missing or unreadable fields.
    pub skipped: usize,
}

fn parse_time(s: &str) -> Option<f64> {
    if let Ok(t) = s.parse::<f64>() {
        return t.is_finite().then_some(t);
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp_millis() as f64 / 1000.0);
    }
    ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
        .map(|t| t.and_utc().timestamp_millis() as f64 / 1000.0)
}

fn parse_coord(s: &str, limit: f64) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite() && v.abs() <= limit)
}

/// Reads `id,time,lat,lon` rows, where time is ISO-8601 or epoch seconds.
pub fn parse_trajectories<R: Read>(reader: R) -> Result<ParsedTrajectories> {
    let mut csv = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = csv
        .headers()
        .map_err(|e| Error::Parse(format!("trajectory header: {e}")))?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    if header != ["id", "time", "lat", "lon"] {
        return Err(Error::Parse(format!(
            "expected header id,time,lat,lon, found {}",
            header.join(",")
        )));
    }

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<Sample>> = HashMap::new();
    let mut skipped = 0;
    for record in csv.records() {
        let Ok(record) = record else {
            skipped += 1;
            continue;
        };
        let field = |i: usize| record.get(i).filter(|s| !s.is_empty());
        let parsed = (|| {
            let id = field(0)?.to_string();
            let time = parse_time(field(1)?)?;
            let lat = parse_coord(field(2)?, 90.0)?;
            let lon = parse_coord(field(3)?, 360.0)?;
            Some((id, Sample { time, lat, lon }))
        })();
        match parsed {
            Some((id, sample)) => {
                groups
                    .entry(id.clone())
                    .or_insert_with(|| {
                        order.push(id);
                        Vec::new()
                    })
                    .push(sample);
            }
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} unreadable trajectory rows");
    }
    if order.is_empty() {
        return Err(Error::Parse("no valid trajectory rows".into()));
    }
    let trajectories = order
        .into_iter()
        .map(|id| {
            let mut samples = groups.remove(&id).unwrap();
            samples.sort_by(|a, b| a.time.total_cmp(&b.time));
            Trajectory { id, samples }
        })
        .collect();
    Ok(ParsedTrajectories { trajectories, skipped })
}

pub fn read_trajectories(path: impl AsRef<Path>) -> Result<ParsedTrajectories> {
    parse_trajectories(std::fs::File::open(path)?)
}

/// Equirectangular projection about the centroid of all samples, in degrees
/// of latitude: `x = (lon - lon0) cos(lat0)`, `y = lat - lat0`.
pub fn project_equirectangular(trajectories: &[Trajectory]) -> Vec<Vec<Point>> {
    let all = trajectories.iter().flat_map(|t| &t.samples);
    let (mut lat0, mut lon0, mut n) = (0.0, 0.0, 0usize);
    for s in all {
        lat0 += s.lat;
        lon0 += s.lon;
        n += 1;
    }
    if n > 0 {
        lat0 /= n as f64;
        lon0 /= n as f64;
    }
    let c = lat0.to_radians().cos();
    trajectories
        .iter()
        .map(|t| {
            t.samples
                .iter()
                .map(|s| [(s.lon - lon0) * c, s.lat - lat0])
                .collect()
        })
        .collect()
}

/// Nearest node per point with consecutive repeats removed.
pub fn snap(points: &[Point], geometry: &Geometry) -> Vec<usize> {
    let mut nodes: Vec<usize> = Vec::with_capacity(points.len());
    for &p in points {
        if let Some(v) = geometry.nearest_node(p) {
            if nodes.last() != Some(&v) {
                nodes.push(v);
            }
        }
    }
    nodes
}

/// BFS distances to `target` over sorted adjacency lists.
pub(crate) fn distances_to(adjacency: &[Vec<usize>], targets: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; adjacency.len()];
    let mut queue = VecDeque::new();
    for &t in targets {
        if dist[t].is_none() {
            dist[t] = Some(0);
            queue.push_back(t);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in &adjacency[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Lexicographically smallest among the shortest node paths from `a` to `b`.
pub fn shortest_path(adjacency: &[Vec<usize>], a: usize, b: usize) -> Result<Vec<usize>> {
    let dist = distances_to(adjacency, &[b]);
    let Some(mut remaining) = dist[a] else {
        return Err(Error::Unreachable(a + 1, b + 1));
    };
    let mut path = vec![a];
    let mut v = a;
    while remaining > 0 {
        remaining -= 1;
        v = *adjacency[v]
            .iter()
            .find(|&&w| dist[w] == Some(remaining))
            .expect("BFS layer has a predecessor");
        path.push(v);
    }
    Ok(path)
}

/// Sums `+1` for every edge traversed along its reference orientation and
/// `-1` against it. Consecutive nodes that are not adjacent are joined by
/// [`shortest_path`].
pub fn lift_path(nodes: &[usize], complex: &SimplicialComplex) -> Result<Cochain> {
    let adjacency = complex.adjacency();
    let mut values = DVector::zeros(complex.n_edges());
    for pair in nodes.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b {
            continue;
        }
        let hops = match complex.edge_id(a, b) {
            Some(_) => vec![a, b],
            None => shortest_path(&adjacency, a, b)?,
        };
        for hop in hops.windows(2) {
            let (u, v) = (hop[0], hop[1]);
            let e = complex.edge_id(u, v).expect("path follows edges");
            values[e] += if u < v { 1.0 } else { -1.0 };
        }
    }
    Ok(Cochain::edge_flow(values))
}

/// Snaps planar samples to nodes and lifts the resulting walk.
pub fn lift_trajectory(
    points: &[Point],
    complex: &SimplicialComplex,
    geometry: &Geometry,
) -> Result<Cochain> {
    geometry.check(complex)?;
    lift_path(&snap(points, geometry), complex)
}
