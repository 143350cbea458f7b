//! Orthogonal matching pursuit and sparsity-versus-error curves.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hodgelets::Dictionary;

/// Atoms with norm below this fraction of the largest atom norm are skipped.
pub const ZERO_ATOM_RTOL: f64 = 1e-10;

/// Relative residual decrease below which pursuit stops.
pub const STAGNATION_RTOL: f64 = 1e-12;

/// Result of a pursuit: a support, its least-squares coefficients, and the
/// residual norm after each selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseApproximation {
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    pub epsilon: f64,
    /// `history[k]` is the residual norm with `k` atoms; `history[0] = ||f||`.
    pub history: Vec<f64>,
}

impl SparseApproximation {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `D_support * coefficients`.
    pub fn reconstruct(&self, dictionary: &Dictionary) -> DVector<f64> {
        let mut out = DVector::zeros(dictionary.dim());
        for (&k, &c) in self.support.iter().zip(&self.coefficients) {
            out.axpy(c, &dictionary.atoms().column(k), 1.0);
        }
        out
    }

    /// Fewest atoms along the pursuit path meeting `epsilon`.
    pub fn atoms_needed(&self, epsilon: f64) -> Option<usize> {
        self.history.iter().position(|&r| r <= epsilon)
    }
}

/// Greedy sparse approximation of `f` within `epsilon`.
///
/// Atoms are ranked by `|<psi, r>| / ||psi||` (ties to the lowest index) and
/// coefficients are refit by least squares on the whole support after every
/// selection. `max_atoms` defaults to the signal length. Failing to reach
/// `epsilon` yields [`Error::NotConverged`] carrying the partial result.
/// A residual below `STAGNATION_RTOL * ||f||` is treated as an exact fit.
pub fn omp(
    dictionary: &Dictionary,
    f: &DVector<f64>,
    epsilon: f64,
    max_atoms: Option<usize>,
) -> Result<SparseApproximation> {
    let n = dictionary.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len() });
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let norms = dictionary.norms();
    let top = norms.iter().fold(0.0f64, |m, &x| m.max(x));
    if !(top > 0.0) {
        return Err(Error::EmptyDictionary);
    }
    let mut eligible: Vec<bool> = norms.iter().map(|&x| x > ZERO_ATOM_RTOL * top).collect();
    let cap = max_atoms.unwrap_or(n);
    let atoms = dictionary.atoms();

    let mut support = Vec::new();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut residual = f.clone();
    let mut history = vec![f.norm()];
    // residuals at rounding level count as an exact fit
    let floor = STAGNATION_RTOL * f.norm();

    while *history.last().unwrap() > epsilon && support.len() < cap {
        let current = *history.last().unwrap();
        let corr = atoms.tr_mul(&residual);
        let mut best: Option<(usize, f64)> = None;
        for (k, &c) in corr.iter().enumerate() {
            if !eligible[k] {
                continue;
            }
            let score = c.abs() / norms[k];
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((k, score));
            }
        }
        let Some((k, score)) = best else { break };
        if score <= f64::EPSILON * current {
            break;
        }

        // two passes of Gram-Schmidt against the current orthonormal basis
        let atom = atoms.column(k).into_owned();
        let mut q = atom.clone();
        let mut coeffs = vec![0.0; basis.len()];
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = b.dot(&q);
                coeffs[i] += c;
                q.axpy(-c, b, 1.0);
            }
        }
        let rho = q.norm();
        eligible[k] = false;
        if rho <= ZERO_ATOM_RTOL * norms[k] {
            continue;
        }
        q /= rho;
        coeffs.push(rho);
        basis.push(q);
        r_cols.push(coeffs);
        support.push(k);

        let mut proj = DVector::zeros(n);
        for b in &basis {
            proj.axpy(b.dot(f), b, 1.0);
        }
        let next = f - proj;
        let now = next.norm();
        if now > current * (1.0 - STAGNATION_RTOL) {
            basis.pop();
            r_cols.pop();
            support.pop();
            break;
        }
        residual = next;
        history.push(now);
        if now <= floor {
            break;
        }
    }

    // back-substitution on the triangular factor
    let s = support.len();
    let qtf: Vec<f64> = basis.iter().map(|b| b.dot(f)).collect();
    let mut coefficients = vec![0.0; s];
    for i in (0..s).rev() {
        let mut acc = qtf[i];
        for j in i + 1..s {
            acc -= r_cols[j][i] * coefficients[j];
        }
        coefficients[i] = acc / r_cols[i][i];
    }

    let mut approx = SparseApproximation {
        support,
        coefficients,
        residual_norm: 0.0,
        epsilon,
        history,
    };
    approx.residual_norm = (f - approx.reconstruct(dictionary)).norm();
    if approx.residual_norm > epsilon.max(floor) {
        return Err(Error::NotConverged {
            residual: approx.residual_norm,
            epsilon,
            atoms: approx.len(),
            partial: Box::new(approx),
        });
    }
    Ok(approx)
}

/// `count` relative tolerances spaced logarithmically from `min` up to 1.
pub fn log_epsilons(min: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![1.0];
    }
    let lo = min.log10();
    (0..count)
        .map(|i| {
            if i + 1 == count {
                1.0
            } else {
                10f64.powf(lo * (1.0 - i as f64 / (count - 1) as f64))
            }
        })
        .collect()
}

/// Atom counts per dictionary and relative tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsityCurve {
    pub names: Vec<String>,
    pub epsilons: Vec<f64>,
    /// `counts[e][d]`: atoms needed by dictionary `d` at `epsilons[e]`;
    /// `None` when pursuit stalled before reaching that tolerance.
    pub counts: Vec<Vec<Option<usize>>>,
}

impl SparsityCurve {
    pub fn count(&self, name: &str, epsilon: f64) -> Option<usize> {
        let d = self.names.iter().position(|n| n == name)?;
        let e = self.epsilons.iter().position(|&x| (x - epsilon).abs() <= 1e-12 * epsilon)?;
        self.counts[e][d]
    }
}

/// Runs one pursuit per dictionary down to the smallest tolerance and reads
/// off the atom count for every tolerance along the path. Tolerances are
/// relative to `||f||` and must lie in `(0, 1]`.
pub fn sparsity_curve(
    dictionaries: &[(&str, &Dictionary)],
    f: &DVector<f64>,
    epsilons: &[f64],
) -> Result<SparsityCurve> {
    if let Some(&bad) = epsilons.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::InvalidParameter(format!("relative tolerance {bad} outside (0, 1]")));
    }
    let norm = f.norm();
    let smallest = epsilons.iter().copied().fold(1.0, f64::min) * norm;
    let mut columns = Vec::with_capacity(dictionaries.len());
    for &(_, dictionary) in dictionaries {
        let path = match omp(dictionary, f, smallest, None) {
            Ok(a) => a,
            Err(Error::NotConverged { partial, .. }) => *partial,
            Err(e) => return Err(e),
        };
        columns.push(path);
    }
    let counts = epsilons
        .iter()
        .map(|&e| columns.iter().map(|p| p.atoms_needed(e * norm)).collect())
        .collect();
    Ok(SparsityCurve {
        names: dictionaries.iter().map(|(n, _)| n.to_string()).collect(),
        epsilons: epsilons.to_vec(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodgelets::{standard_dictionary, AtomLabel, DictionaryKind, Part};
    use nalgebra::{dvector, DMatrix};

    fn random_dictionary(n: usize, k: usize, seed: u64) -> Dictionary {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let atoms = DMatrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0));
        let labels = (0..k).map(|j| AtomLabel { part: Part::Joint, m: 1, j: j + 1 }).collect();
        Dictionary::new(DictionaryKind::Joint, atoms, labels).unwrap()
    }

    #[test]
    fn single_atom_signal() {
        let d = random_dictionary(8, 20, 1);
        let f = d.atom(7).to_vector() * 5.0;
        let a = omp(&d, &f, 0.0, None).unwrap();
        assert_eq!(a.support, vec![7]);
        assert!((a.coefficients[0] - 5.0).abs() < 1e-12);
        assert!(a.residual_norm < 1e-12);
    }

    #[test]
    fn loose_tolerance_selects_nothing() {
        let d = random_dictionary(5, 9, 2);
        let f = dvector![1.0, 2.0, 0.0, 0.0, -1.0];
        let a = omp(&d, &f, f.norm(), None).unwrap();
        assert!(a.is_empty());
        assert_eq!(a.reconstruct(&d), DVector::zeros(5));
    }

    #[test]
    fn recovers_standard_basis_support() {
        let d = standard_dictionary(10);
        let mut f = DVector::zeros(10);
        f[2] = 3.0;
        f[5] = -1.0;
        f[9] = 0.5;
        let a = omp(&d, &f, 1e-12, None).unwrap();
        assert_eq!(a.support, vec![2, 5, 9]);
        assert_eq!(a.coefficients, vec![3.0, -1.0, 0.5]);
    }

    #[test]
    fn residual_orthogonal_to_support_and_decreasing() {
        let d = random_dictionary(12, 40, 3);
        let f = DVector::from_fn(12, |i, _| (i as f64 * 0.7).sin());
        let a = omp(&d, &f, 1e-3 * f.norm(), None).unwrap();
        let r = &f - a.reconstruct(&d);
        for &k in &a.support {
            let atom = d.atoms().column(k);
            assert!(atom.dot(&r).abs() <= 1e-10 * atom.norm() * f.norm());
        }
        assert!(a.history.windows(2).all(|w| w[1] < w[0]));
        let mut sorted = a.support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), a.support.len());
    }

    #[test]
    fn zero_atoms_are_skipped() {
        let mut atoms = DMatrix::zeros(3, 4);
        for i in 0..3 {
            atoms[(i, i + 1)] = 1.0;
        }
        let labels = (0..4).map(|j| AtomLabel { part: Part::Basis, m: 1, j: j + 1 }).collect();
        let d = Dictionary::new(DictionaryKind::Standard, atoms, labels).unwrap();
        let a = omp(&d, &dvector![1.0, 1.0, 1.0], 1e-12, None).unwrap();
        assert!(!a.support.contains(&0));

        let empty = Dictionary::new(
            DictionaryKind::Standard,
            DMatrix::zeros(3, 2),
            vec![AtomLabel { part: Part::Basis, m: 1, j: 1 }; 2],
        )
        .unwrap();
        assert!(matches!(omp(&empty, &dvector![1.0, 0.0, 0.0], 0.0, None), Err(Error::EmptyDictionary)));
    }

    #[test]
    fn cap_reports_partial_result() {
        let d = standard_dictionary(6);
        let f = DVector::from_element(6, 1.0);
        match omp(&d, &f, 1e-9, Some(2)) {
            Err(Error::NotConverged { atoms, partial, .. }) => {
                assert_eq!(atoms, 2);
                assert_eq!(partial.support, vec![0, 1]);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn curve_on_standard_basis_matches_sorted_energy() {
        let d = standard_dictionary(8);
        let f = dvector![0.1, -3.0, 0.0, 2.0, 0.5, 0.0, -1.0, 0.0];
        let eps = log_epsilons(1e-3, 13);
        let curve = sparsity_curve(&[("standard", &d)], &f, &eps).unwrap();
        // oracle: drop the smallest entries while their energy fits
        let mut mags: Vec<f64> = f.iter().map(|x| x.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        for (row, &e) in curve.counts.iter().zip(&eps) {
            let tol = e * f.norm();
            let expected = (0..=mags.len())
                .find(|&k| mags[k..].iter().map(|x| x * x).sum::<f64>().sqrt() <= tol)
                .unwrap();
            assert_eq!(row[0], Some(expected), "eps {e}");
        }
        assert_eq!(curve.count("standard", 1.0), Some(0));
        assert!(sparsity_curve(&[("standard", &d)], &f, &[0.0]).is_err());
    }

    #[test]
    fn epsilon_grid() {
        let g = log_epsilons(1e-2, 3);
        assert!((g[0] - 1e-2).abs() < 1e-15 && (g[1] - 1e-1).abs() < 1e-15 && g[2] == 1.0);
    }
}
