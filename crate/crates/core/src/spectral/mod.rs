//! Hodge Laplacians, their spectra, and the Hodge decomposition of edge flows.

mod eigen;

pub use eigen::{symmetric_eigen, MAX_QL_ITERATIONS};

use nalgebra::{DMatrix, DVector};

use crate::complex::{Cochain, Degree, SimplicialComplex};
use crate::error::{Error, Result};

/// Relative threshold separating zero from nonzero eigenvalues.
pub const ZERO_EIGENVALUE_RTOL: f64 = 1e-8;

/// Accepted relative asymmetry of eigensolver input.
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// The four Laplacians of a 2-complex, built with exact integer arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeOperators {
    /// Hodge Laplacian on edges, upper plus lower.
    pub l1: DMatrix<f64>,
    /// Upper part, `d2 d2^T`.
    pub l1_upper: DMatrix<f64>,
    /// Lower part, `d1^T d1`.
    pub l1_lower: DMatrix<f64>,
    /// Graph Laplacian on nodes, `d1 d1^T`.
    pub l0: DMatrix<f64>,
}

impl HodgeOperators {
    pub fn new(complex: &SimplicialComplex) -> Self {
        let d1 = complex.boundary_1();
        let d2 = complex.boundary_2();
        let upper = d2.gram_outer();
        let lower = d1.gram_inner();
        let l1 = &upper + &lower;
        let to_f = |m: DMatrix<i64>| m.map(|v| v as f64);
        HodgeOperators {
            l1: to_f(l1),
            l1_upper: to_f(upper),
            l1_lower: to_f(lower),
            l0: to_f(d1.gram_outer()),
        }
    }

    pub fn n_edges(&self) -> usize {
        self.l1.nrows()
    }
}

pub fn hodge_operators(complex: &SimplicialComplex) -> HodgeOperators {
    HodgeOperators::new(complex)
}

/// Eigenpairs of a symmetric operator, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: DMatrix<f64>,
    /// Eigenvalues at or below this are treated as zero.
    pub tol: f64,
}

/// Full eigendecomposition of a symmetric matrix.
///
/// `tol` overrides the default zero threshold of `1e-8 * lambda_max`.
pub fn eigendecompose(a: &DMatrix<f64>, tol: Option<f64>) -> Result<SpectralDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let scale = a.amax();
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_RTOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Asymmetric(asym / scale));
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen(a)?;
    let lambda_max = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = tol.unwrap_or(ZERO_EIGENVALUE_RTOL * lambda_max);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        tol,
    })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m: f64, &x| m.max(x))
    }

    pub fn is_zero(&self, i: usize) -> bool {
        self.eigenvalues[i] <= self.tol
    }

    /// Eigenvalues with everything at or below `tol` set to exactly zero.
    pub fn clamped_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .map(|&l| if l <= self.tol { 0.0 } else { l })
            .collect()
    }

    pub fn null_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.is_zero(i)).collect()
    }

    pub fn range_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.is_zero(i)).collect()
    }

    pub fn nullity(&self) -> usize {
        self.null_indices().len()
    }

    /// Smallest eigenvalue above the zero threshold.
    pub fn smallest_nonzero(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|&l| l > self.tol)
    }

    /// Clamped eigenvalues with near-duplicates merged.
    pub fn distinct_eigenvalues(&self) -> Vec<f64> {
        let merge = (1e-9 * self.lambda_max()).max(self.tol);
        let mut out: Vec<f64> = Vec::new();
        for l in self.clamped_eigenvalues() {
            match out.last() {
                Some(&prev) if l - prev <= merge => {}
                _ => out.push(l),
            }
        }
        out
    }

    /// Orthogonal projection of `f` onto the span of the selected eigenvectors.
    pub fn project(&self, indices: &[usize], f: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(f.len());
        for &i in indices {
            let v = self.eigenvectors.column(i);
            out.axpy(v.dot(f), &v, 1.0);
        }
        out
    }

    /// Dense matrix `g(A) = V diag(g(lambda)) V^T`, evaluated on the
    /// clamped spectrum.
    pub fn apply_function<G: Fn(f64) -> f64>(&self, g: G) -> DMatrix<f64> {
        let weights: Vec<f64> = self.clamped_eigenvalues().into_iter().map(g).collect();
        self.weighted_outer(&weights)
    }

    pub(crate) fn weighted_outer(&self, weights: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (mut col, &w) in scaled.column_iter_mut().zip(weights) {
            col *= w;
        }
        scaled * self.eigenvectors.transpose()
    }
}

/// Spectra of the three edge Laplacians of one complex.
#[derive(Debug, Clone)]
pub struct HodgeSpectra {
    pub full: SpectralDecomposition,
    pub upper: SpectralDecomposition,
    pub lower: SpectralDecomposition,
}

impl HodgeSpectra {
    pub fn new(ops: &HodgeOperators) -> Result<Self> {
        Ok(HodgeSpectra {
            full: eigendecompose(&ops.l1, None)?,
            upper: eigendecompose(&ops.l1_upper, None)?,
            lower: eigendecompose(&ops.l1_lower, None)?,
        })
    }

    pub fn n_edges(&self) -> usize {
        self.full.dim()
    }

    pub fn harmonic_dimension(&self) -> usize {
        self.full.nullity()
    }
}

/// Gradient, curl and harmonic parts of an edge flow.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeComponents {
    pub gradient: Cochain,
    pub curl: Cochain,
    pub harmonic: Cochain,
}

impl HodgeComponents {
    pub fn sum(&self) -> DVector<f64> {
        &self.gradient.values + &self.curl.values + &self.harmonic.values
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Splits `f` into its components in `Im d1^T`, `Im d2` and `ker L1` by
/// projecting onto the corresponding eigenspaces.
pub fn hodge_decompose(f: &Cochain, spectra: &HodgeSpectra) -> Result<HodgeComponents> {
    check_len(spectra.n_edges(), f.len())?;
    if f.degree != Degree::Edge {
        return Err(Error::InvalidParameter("Hodge decomposition needs an edge flow".into()));
    }
    let v = &f.values;
    Ok(HodgeComponents {
        gradient: Cochain::edge_flow(spectra.lower.project(&spectra.lower.range_indices(), v)),
        curl: Cochain::edge_flow(spectra.upper.project(&spectra.upper.range_indices(), v)),
        harmonic: Cochain::edge_flow(spectra.full.project(&spectra.full.null_indices(), v)),
    })
}

/// Simplicial Fourier coefficients `<v_i, f>`.
pub fn sft(f: &DVector<f64>, spectrum: &SpectralDecomposition) -> Result<DVector<f64>> {
    check_len(spectrum.dim(), f.len())?;
    Ok(spectrum.eigenvectors.tr_mul(f))
}

/// Graph Laplacian of the line graph: edges adjacent iff they share a node.
pub fn linegraph_laplacian(complex: &SimplicialComplex) -> DMatrix<f64> {
    let n1 = complex.n_edges();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); complex.n_nodes()];
    for (e, &[i, j]) in complex.edges().iter().enumerate() {
        incident[i].push(e);
        incident[j].push(e);
    }
    let mut l = DMatrix::zeros(n1, n1);
    for star in &incident {
        for &a in star {
            for &b in star {
                if a != b {
                    l[(a, b)] = -1.0;
                }
            }
        }
    }
    for e in 0..n1 {
        let degree: f64 = -(0..n1).filter(|&f| f != e).map(|f| l[(e, f)]).sum::<f64>();
        l[(e, e)] = degree;
    }
    l
}
