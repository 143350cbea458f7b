//! Seeded random-walk trajectories between regions of a complex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trajectory::distances_to;
use crate::complex::{Geometry, Point, SimplicialComplex};
use crate::error::{Error, Result};

/// Closed disc in geometry coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub center: Point,
    pub radius: f64,
}

impl Region {
    pub fn nodes(&self, geometry: &Geometry) -> Vec<usize> {
        geometry
            .positions
            .iter()
            .enumerate()
            .filter(|(_, p)| (p[0] - self.center[0]).hypot(p[1] - self.center[1]) <= self.radius)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    /// One `(start, end)` pair per class.
    pub classes: Vec<(Region, Region)>,
    pub count_per_class: usize,
    /// Probability of a uniformly random hop instead of a greedy one.
    pub noise: f64,
    pub seed: u64,
    /// Walk length cap; defaults to four times the node count.
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTrajectory {
    pub label: usize,
    pub nodes: Vec<usize>,
}

/// Random walks from a uniform start node in each class's start region,
/// stepping greedily toward the end region with probability `1 - noise` and
/// to a uniform neighbor otherwise. A greedy step picks uniformly among the
/// neighbors closest to the end region, so noiseless walks are random
/// shortest paths rather than one canonical route.
/// Output is grouped by class.
pub fn synthetic_trajectories(
    complex: &SimplicialComplex,
    geometry: &Geometry,
    params: &SyntheticParams,
) -> Result<Vec<SyntheticTrajectory>> {
    geometry.check(complex)?;
    if !(0.0..=1.0).contains(&params.noise) {
        return Err(Error::InvalidParameter(format!("noise {} outside [0, 1]", params.noise)));
    }
    let adjacency = complex.adjacency();
    let cap = params.max_steps.unwrap_or(4 * complex.n_nodes());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut out = Vec::with_capacity(params.classes.len() * params.count_per_class);

    for (label, (start, end)) in params.classes.iter().enumerate() {
        let sources = start.nodes(geometry);
        let targets = end.nodes(geometry);
        if sources.is_empty() || targets.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "class {label} has an empty start or end region"
            )));
        }
        let dist = distances_to(&adjacency, &targets);
        if let Some(&s) = sources.iter().find(|&&s| dist[s].is_none()) {
            return Err(Error::Unreachable(s + 1, targets[0] + 1));
        }
        for _ in 0..params.count_per_class {
            let mut v = sources[rng.gen_range(0..sources.len())];
            let mut nodes = vec![v];
            while dist[v] != Some(0) && nodes.len() <= cap {
                let nbrs = &adjacency[v];
                let greedy = rng.gen::<f64>() >= params.noise;
                v = if greedy {
                    let best = nbrs.iter().filter_map(|&w| dist[w]).min().unwrap();
                    let ties: Vec<usize> = nbrs.iter().copied().filter(|&w| dist[w] == Some(best)).collect();
                    ties[rng.gen_range(0..ties.len())]
                } else {
                    nbrs[rng.gen_range(0..nbrs.len())]
                };
                nodes.push(v);
            }
            out.push(SyntheticTrajectory { label, nodes });
        }
    }
    Ok(out)
}
