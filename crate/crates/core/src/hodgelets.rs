//! Joint and separate Hodgelet dictionaries, baseline bases, and frame bounds.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelBank;
use crate::spectral::{symmetric_eigen, HodgeSpectra, SpectralDecomposition};

/// Which operator an atom was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Joint,
    Upper,
    Lower,
    /// Orthonormal bases (standard, Fourier) that carry no kernel.
    Basis,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Joint => "joint",
            Part::Upper => "upper",
            Part::Lower => "lower",
            Part::Basis => "basis",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DictionaryKind {
    Joint,
    Separate,
    Fourier,
    LinegraphFourier,
    LinegraphWavelet,
    Standard,
}

/// Position of an atom: kernel `m` and localization edge `j`, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomLabel {
    pub part: Part,
    pub m: usize,
    pub j: usize,
}

/// Borrowed view of one atom.
#[derive(Debug, Clone, Copy)]
pub struct Atom<'a> {
    pub vector: &'a [f64],
    pub label: AtomLabel,
}

impl Atom<'_> {
    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(self.vector)
    }
}

/// An ordered set of atoms stored as the columns of one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    kind: DictionaryKind,
    atoms: DMatrix<f64>,
    labels: Vec<AtomLabel>,
}

impl Dictionary {
    pub fn new(kind: DictionaryKind, atoms: DMatrix<f64>, labels: Vec<AtomLabel>) -> Result<Self> {
        if atoms.ncols() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: atoms.ncols(),
                got: labels.len(),
            });
        }
        Ok(Dictionary { kind, atoms, labels })
    }

    pub fn kind(&self) -> DictionaryKind {
        self.kind
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Length of each atom.
    pub fn dim(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn atoms(&self) -> &DMatrix<f64> {
        &self.atoms
    }

    pub fn labels(&self) -> &[AtomLabel] {
        &self.labels
    }

    pub fn atom(&self, k: usize) -> Atom<'_> {
        let n = self.atoms.nrows();
        Atom {
            vector: &self.atoms.as_slice()[k * n..(k + 1) * n],
            label: self.labels[k],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom<'_>> {
        (0..self.len()).map(|k| self.atom(k))
    }

    pub fn norms(&self) -> Vec<f64> {
        self.atoms.column_iter().map(|c| c.norm()).collect()
    }

    /// Frame operator `S = sum psi psi^T`.
    pub fn frame_operator(&self) -> DMatrix<f64> {
        &self.atoms * self.atoms.transpose()
    }

    /// Analysis coefficients `<psi_k, f>` in dictionary order.
    pub fn analyze(&self, f: &DVector<f64>) -> Result<DVector<f64>> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: f.len(),
            });
        }
        Ok(self.atoms.tr_mul(f))
    }

    /// Synthesis `sum c_k psi_k`.
    pub fn synthesize(&self, coefficients: &DVector<f64>) -> Result<DVector<f64>> {
        if coefficients.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: coefficients.len(),
            });
        }
        Ok(&self.atoms * coefficients)
    }

    /// Canonical dual-frame reconstruction `S^{-1} sum c_k psi_k`.
    pub fn dual_reconstruct(&self, coefficients: &DVector<f64>) -> Result<DVector<f64>> {
        let y = self.synthesize(coefficients)?;
        let (values, vectors) = symmetric_eigen(&self.frame_operator())?;
        let top = values.iter().fold(0.0f64, |m, &x| m.max(x));
        let bottom = values.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        if !(bottom > DEGENERATE_FRAME_RTOL * top) {
            return Err(Error::DegenerateFrame(bottom.max(0.0)));
        }
        let mut z = vectors.tr_mul(&y);
        z.component_div_assign(&values);
        Ok(vectors * z)
    }
}

/// Frames whose lower bound falls below this fraction of the upper bound
/// are treated as degenerate.
pub const DEGENERATE_FRAME_RTOL: f64 = 1e-12;

pub fn analyze(dictionary: &Dictionary, f: &DVector<f64>) -> Result<DVector<f64>> {
    dictionary.analyze(f)
}

pub fn dual_reconstruct(dictionary: &Dictionary, coefficients: &DVector<f64>) -> Result<DVector<f64>> {
    dictionary.dual_reconstruct(coefficients)
}

/// Kernel values on the clamped spectrum, `table[i][m] = g_m(lambda_i)`.
fn kernel_table(spectrum: &SpectralDecomposition, bank: &KernelBank) -> Result<Vec<Vec<f64>>> {
    spectrum
        .clamped_eigenvalues()
        .into_iter()
        .map(|l| bank.evaluate(l.max(0.0)))
        .collect()
}

fn push_kernel_atoms(
    spectrum: &SpectralDecomposition,
    bank: &KernelBank,
    part: Part,
    columns: &mut Vec<f64>,
    labels: &mut Vec<AtomLabel>,
) -> Result<()> {
    let table = kernel_table(spectrum, bank)?;
    let n = spectrum.dim();
    for m in 0..bank.len() {
        let weights: Vec<f64> = table.iter().map(|row| row[m]).collect();
        let op = spectrum.weighted_outer(&weights);
        columns.extend_from_slice(op.as_slice());
        labels.extend((0..n).map(|j| AtomLabel { part, m: m + 1, j: j + 1 }));
    }
    Ok(())
}

fn kernel_dictionary(
    kind: DictionaryKind,
    parts: &[(&SpectralDecomposition, &KernelBank, Part)],
) -> Result<Dictionary> {
    let n = parts.first().map_or(0, |p| p.0.dim());
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    for &(spectrum, bank, part) in parts {
        if spectrum.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: spectrum.dim(),
            });
        }
        push_kernel_atoms(spectrum, bank, part, &mut columns, &mut labels)?;
    }
    let atoms = DMatrix::from_vec(n, labels.len(), columns);
    Dictionary::new(kind, atoms, labels)
}

/// Joint Hodgelets `g_m(L1) e_j`, ordered by kernel then edge.
pub fn joint_dictionary(spectrum: &SpectralDecomposition, bank: &KernelBank) -> Result<Dictionary> {
    kernel_dictionary(DictionaryKind::Joint, &[(spectrum, bank, Part::Joint)])
}

/// Separate Hodgelets: upper atoms `g^U_m(L1_up) e_j` followed by lower
/// atoms `g^L_m(L1_low) e_j`.
pub fn separate_dictionary(
    upper: &SpectralDecomposition,
    lower: &SpectralDecomposition,
    bank_upper: &KernelBank,
    bank_lower: &KernelBank,
) -> Result<Dictionary> {
    kernel_dictionary(
        DictionaryKind::Separate,
        &[(upper, bank_upper, Part::Upper), (lower, bank_lower, Part::Lower)],
    )
}

/// Spectral wavelets of the line-graph Laplacian.
pub fn linegraph_wavelet_dictionary(
    spectrum: &SpectralDecomposition,
    bank: &KernelBank,
) -> Result<Dictionary> {
    kernel_dictionary(DictionaryKind::LinegraphWavelet, &[(spectrum, bank, Part::Joint)])
}

fn basis_dictionary(kind: DictionaryKind, atoms: DMatrix<f64>) -> Dictionary {
    let labels = (0..atoms.ncols())
        .map(|j| AtomLabel { part: Part::Basis, m: 1, j: j + 1 })
        .collect();
    Dictionary { kind, atoms, labels }
}

/// Eigenvectors of an edge operator as a dictionary.
pub fn fourier_dictionary(spectrum: &SpectralDecomposition) -> Dictionary {
    basis_dictionary(DictionaryKind::Fourier, spectrum.eigenvectors.clone())
}

pub fn linegraph_fourier_dictionary(spectrum: &SpectralDecomposition) -> Dictionary {
    basis_dictionary(DictionaryKind::LinegraphFourier, spectrum.eigenvectors.clone())
}

pub fn standard_dictionary(n: usize) -> Dictionary {
    basis_dictionary(DictionaryKind::Standard, DMatrix::identity(n, n))
}

/// Frame bounds `0 <= A <= B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl FrameBounds {
    fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            a = a.min(v);
            b = b.max(v);
        }
        if a > b {
            return FrameBounds { a: 0.0, b: 0.0 };
        }
        FrameBounds { a: a.max(0.0), b: b.max(0.0) }
    }

    /// `B / A - 1 <= tol` with `A > 0`.
    pub fn is_tight(&self, tol: f64) -> bool {
        self.a > 0.0 && self.b / self.a - 1.0 <= tol
    }

    pub fn is_degenerate(&self) -> bool {
        self.a <= 0.0
    }
}

fn g_values(bank: &KernelBank, spectrum: &[f64]) -> Result<Vec<f64>> {
    spectrum.iter().map(|&l| bank.g_sum(l.max(0.0))).collect()
}

/// Frame bounds of a joint dictionary from `G` on the spectrum of `L1`.
/// Slightly negative eigenvalues are read as zero.
pub fn frame_bounds_joint(bank: &KernelBank, spectrum: &[f64]) -> Result<FrameBounds> {
    Ok(FrameBounds::from_values(g_values(bank, spectrum)?))
}

/// Frame bounds of a separate dictionary from `G(mu, 0)` over the upper
/// spectrum and `G(0, nu)` over the lower spectrum.
pub fn frame_bounds_separate(
    bank_upper: &KernelBank,
    bank_lower: &KernelBank,
    spectrum_upper: &[f64],
    spectrum_lower: &[f64],
) -> Result<FrameBounds> {
    let upper_at_zero = bank_upper.g_sum(0.0)?;
    let lower_at_zero = bank_lower.g_sum(0.0)?;
    let from_upper = g_values(bank_upper, spectrum_upper)?
        .into_iter()
        .map(|g| g + lower_at_zero);
    let from_lower = g_values(bank_lower, spectrum_lower)?
        .into_iter()
        .map(|g| g + upper_at_zero);
    Ok(FrameBounds::from_values(from_upper.chain(from_lower)))
}

/// Extreme eigenvalues of the frame operator.
pub fn frame_bounds_empirical(dictionary: &Dictionary) -> Result<FrameBounds> {
    if dictionary.dim() == 0 {
        return Ok(FrameBounds { a: 0.0, b: 0.0 });
    }
    let (values, _) = symmetric_eigen(&dictionary.frame_operator())?;
    Ok(FrameBounds::from_values(values.iter().copied()))
}

/// Norm of the part of an upper (lower) atom lying outside `Im d2`
/// (`Im d1^T`), measured with the eigenprojections of the corresponding
/// Laplacian.
pub fn subspace_residual(atom: &Atom<'_>, spectra: &HodgeSpectra) -> Result<f64> {
    let spectrum = match atom.label.part {
        Part::Upper => &spectra.upper,
        Part::Lower => &spectra.lower,
        _ => return Err(Error::JointAtom),
    };
    if atom.vector.len() != spectrum.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.dim(),
            got: atom.vector.len(),
        });
    }
    let psi = atom.to_vector();
    let inside = spectrum.project(&spectrum.range_indices(), &psi);
    Ok((psi - inside).norm())
}
