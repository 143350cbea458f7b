//! End-to-end pipelines shared by the command line and the acceptance
//! suite.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::{sparse_kmeans, train_test_split, DEFAULT_MAX_ITERS};
use crate::complex::{
    delaunay, hex_complex_with_target, Cochain, Geometry, HexMeta, Point, Rect, SimplicialComplex,
};
use crate::error::{Error, Result};
use crate::flows::{discretize_field, lift_path, two_vortex_field, synthetic_trajectories, Region, SyntheticParams};
use crate::hodgelets::{
    fourier_dictionary, frame_bounds_empirical, frame_bounds_joint, frame_bounds_separate,
    joint_dictionary, linegraph_fourier_dictionary, linegraph_wavelet_dictionary,
    separate_dictionary, standard_dictionary, Dictionary, FrameBounds,
};
use crate::kernels::{hann_bank, KernelBank};
use crate::sparse::{sparsity_curve, SparsityCurve};
use crate::spectral::{eigendecompose, linegraph_laplacian, HodgeOperators, HodgeSpectra, SpectralDecomposition};

/// `B / A - 1` at or below this counts as tight.
pub const TIGHTNESS_TOL: f64 = 1e-9;

/// Column order of the sparsity curve.
pub const CURVE_COLUMNS: [&str; 5] = ["fourier", "linegraph_fourier", "linegraph_wavelet", "joint", "separate"];

/// Log-Hann bank on a spectrum, optionally normalized on it.
pub fn spectrum_bank(
    spectrum: &SpectralDecomposition,
    kernels: usize,
    overlap: usize,
    normalize: bool,
) -> Result<KernelBank> {
    let eigenvalues = spectrum.clamped_eigenvalues();
    let lambda_max = spectrum.lambda_max();
    // an all-zero operator (no triangles, say) still needs a nondegenerate warp
    let bank = hann_bank(if lambda_max > 0.0 { lambda_max } else { 1.0 }, kernels, overlap, &eigenvalues)?;
    if normalize {
        bank.normalize_on_spectrum(&eigenvalues)
    } else {
        Ok(bank)
    }
}

/// Joint and separate Hodgelet dictionaries with matching banks.
pub struct HodgeletDictionaries {
    pub joint: Dictionary,
    pub separate: Dictionary,
    pub bank: KernelBank,
    pub bank_upper: KernelBank,
    pub bank_lower: KernelBank,
}

pub fn hodgelet_dictionaries(
    spectra: &HodgeSpectra,
    kernels: usize,
    overlap: usize,
    normalize: bool,
) -> Result<HodgeletDictionaries> {
    let bank = spectrum_bank(&spectra.full, kernels, overlap, normalize)?;
    let bank_upper = spectrum_bank(&spectra.upper, kernels, overlap, normalize)?;
    let bank_lower = spectrum_bank(&spectra.lower, kernels, overlap, normalize)?;
    Ok(HodgeletDictionaries {
        joint: joint_dictionary(&spectra.full, &bank)?,
        separate: separate_dictionary(&spectra.upper, &spectra.lower, &bank_upper, &bank_lower)?,
        bank,
        bank_upper,
        bank_lower,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldConfig {
    pub bounds: Rect,
    pub target_nodes: usize,
    pub kernels: usize,
    pub overlap: usize,
    pub normalize: bool,
    /// Relative tolerances, each in `(0, 1]`.
    pub epsilons: Vec<f64>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            bounds: Rect::new(-2.0, 2.0, -2.0, 2.0),
            target_nodes: 64,
            kernels: 4,
            overlap: 3,
            normalize: true,
            epsilons: default_epsilons(),
        }
    }
}

/// 0.01 to 1 in 20 log-spaced steps; includes 0.1 exactly.
pub fn default_epsilons() -> Vec<f64> {
    (0..=20).map(|i| 10f64.powf(-2.0 + i as f64 / 10.0)).map(|e| (e * 1e12).round() / 1e12).collect()
}

pub struct FieldOutcome {
    pub complex: SimplicialComplex,
    pub geometry: Geometry,
    pub meta: HexMeta,
    pub flow: Cochain,
    pub curve: SparsityCurve,
    /// Atom count of each dictionary, in [`CURVE_COLUMNS`] order.
    pub sizes: Vec<usize>,
}

/// Discretizes the two-ball field on a hex complex and records, for every
/// tolerance, how many pursuit atoms each dictionary needs.
pub fn field_experiment(config: &FieldConfig) -> Result<FieldOutcome> {
    let (complex, geometry, meta) = hex_complex_with_target(config.bounds, config.target_nodes)?;
    let flow = discretize_field(&two_vortex_field(), &complex, &meta)?;
    let spectra = HodgeSpectra::new(&HodgeOperators::new(&complex))?;
    let linegraph = eigendecompose(&linegraph_laplacian(&complex), None)?;
    let lg_bank = spectrum_bank(&linegraph, config.kernels, config.overlap, config.normalize)?;
    let hodge = hodgelet_dictionaries(&spectra, config.kernels, config.overlap, config.normalize)?;
    let dictionaries = [
        fourier_dictionary(&spectra.full),
        linegraph_fourier_dictionary(&linegraph),
        linegraph_wavelet_dictionary(&linegraph, &lg_bank)?,
        hodge.joint,
        hodge.separate,
    ];
    let named: Vec<(&str, &Dictionary)> = CURVE_COLUMNS.iter().copied().zip(dictionaries.iter()).collect();
    let curve = sparsity_curve(&named, &flow.values, &config.epsilons)?;
    Ok(FieldOutcome {
        complex,
        geometry,
        meta,
        flow,
        curve,
        sizes: dictionaries.iter().map(Dictionary::len).collect(),
    })
}

/// Seeded 2-class trajectory set on a punctured Delaunay complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticFixture {
    pub n_points: usize,
    pub bounds: Rect,
    /// Removed disc `(center, radius)`, leaving an island in the middle.
    pub hole: Option<(Point, f64)>,
    pub walks: SyntheticParams,
}

impl Default for SyntheticFixture {
    fn default() -> Self {
        let disc = |x: f64, y: f64| Region { center: [x, y], radius: 0.45 };
        SyntheticFixture {
            n_points: 133,
            bounds: Rect::new(-2.0, 2.0, -2.0, 2.0),
            hole: Some(([0.0, 0.0], 0.6)),
            walks: SyntheticParams {
                classes: vec![(disc(-1.5, -1.2), disc(1.5, -1.2)), (disc(1.5, 1.2), disc(-1.5, 1.2))],
                count_per_class: 60,
                noise: 0.25,
                seed: 7,
                max_steps: None,
            },
        }
    }
}

pub struct TrajectorySet {
    pub complex: SimplicialComplex,
    pub geometry: Geometry,
    pub flows: Vec<DVector<f64>>,
    pub labels: Vec<usize>,
}

/// Builds the fixture complex and lifts its random walks to edge flows.
pub fn synthetic_fixture(fixture: &SyntheticFixture) -> Result<TrajectorySet> {
    let mut rng = ChaCha8Rng::seed_from_u64(fixture.walks.seed);
    let b = fixture.bounds;
    let points: Vec<Point> = (0..fixture.n_points)
        .map(|_| [rng.gen_range(b.x_min..b.x_max), rng.gen_range(b.y_min..b.y_max)])
        .collect();
    let (mut complex, mut geometry) = delaunay(&points)?;
    if let Some((center, radius)) = fixture.hole {
        (complex, geometry) = complex.punch_hole(&geometry, center, radius)?;
    }
    let walks = synthetic_trajectories(&complex, &geometry, &fixture.walks)?;
    let flows = walks
        .iter()
        .map(|w| lift_path(&w.nodes, &complex).map(|c| c.values))
        .collect::<Result<_>>()?;
    Ok(TrajectorySet {
        complex,
        geometry,
        flows,
        labels: walks.iter().map(|w| w.label).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusteringConfig {
    pub kernels: usize,
    pub overlap: usize,
    pub normalize: bool,
    #[serde(rename = "K")]
    pub k: usize,
    /// l1 budget; `None` means `sqrt(D) / 4` per representation (at least 1).
    pub s: Option<f64>,
    pub train_ratio: f64,
    pub seed: u64,
    pub max_iters: usize,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            kernels: 16,
            overlap: 3,
            normalize: true,
            k: 2,
            s: None,
            train_ratio: 0.75,
            seed: 0,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationScore {
    pub representation: String,
    pub features: usize,
    pub s: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub model: crate::clustering::ClusterModel,
}

/// Representation names in output order.
pub const REPRESENTATIONS: [&str; 4] = ["standard", "fourier", "joint", "separate"];

/// Clusters the training flows in each representation and scores the
/// held-out flows against the centroids.
pub fn clustering_experiment(
    complex: &SimplicialComplex,
    flows: &[DVector<f64>],
    config: &ClusteringConfig,
) -> Result<Vec<RepresentationScore>> {
    let n1 = complex.n_edges();
    if let Some(f) = flows.iter().find(|f| f.len() != n1) {
        return Err(Error::DimensionMismatch { expected: n1, got: f.len() });
    }
    let spectra = HodgeSpectra::new(&HodgeOperators::new(complex))?;
    let hodge = hodgelet_dictionaries(&spectra, config.kernels, config.overlap, config.normalize)?;
    let dictionaries = [
        standard_dictionary(n1),
        fourier_dictionary(&spectra.full),
        hodge.joint,
        hodge.separate,
    ];
    let (train, test) = train_test_split(flows.len(), config.train_ratio, config.seed)?;

    let mut scores = Vec::new();
    for (name, dictionary) in REPRESENTATIONS.iter().zip(&dictionaries) {
        let coefficients: Vec<DVector<f64>> = flows
            .iter()
            .map(|f| dictionary.analyze(f))
            .collect::<Result<_>>()?;
        let d = dictionary.len();
        let features = DMatrix::from_fn(train.len(), d, |i, j| coefficients[train[i]][j]);
        let s = config.s.unwrap_or_else(|| ((d as f64).sqrt() / 4.0).max(1.0));
        let model = sparse_kmeans(&features, config.k, s, config.seed, config.max_iters)?;
        let held_out: Vec<DVector<f64>> = test.iter().map(|&i| coefficients[i].clone()).collect();
        let l = model.alignment(&held_out)?;
        log::info!("{name}: {d} features, s = {s:.3}, L = {l:.6}");
        scores.push(RepresentationScore {
            representation: name.to_string(),
            features: d,
            s,
            l,
            model,
        });
    }
    Ok(scores)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BankChoice {
    /// Log-warped Hann windows with a low-pass kernel.
    LogHann,
    /// The single kernel `g(lambda) = lambda`, degenerate on the harmonic space.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameConfig {
    pub kernels: usize,
    pub overlap: usize,
    pub bank: BankChoice,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig { kernels: 4, overlap: 3, bank: BankChoice::LogHann }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub dictionary: String,
    /// `raw` or `normalized`.
    pub bank: String,
    /// `analytic` or `empirical`.
    pub method: String,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub tight: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub n_triangles: usize,
    pub harmonic_dimension: usize,
    pub entries: Vec<FrameEntry>,
}

impl FrameReport {
    pub fn find(&self, dictionary: &str, bank: &str, method: &str) -> Option<&FrameEntry> {
        self.entries
            .iter()
            .find(|e| e.dictionary == dictionary && e.bank == bank && e.method == method)
    }
}

fn entry(dictionary: &str, bank: &str, method: &str, bounds: FrameBounds) -> FrameEntry {
    FrameEntry {
        dictionary: dictionary.into(),
        bank: bank.into(),
        method: method.into(),
        a: bounds.a,
        b: bounds.b,
        tight: bounds.is_tight(TIGHTNESS_TOL),
    }
}

/// Analytic and empirical frame bounds of the joint and separate
/// dictionaries, for raw and spectrum-normalized banks, plus the standard
/// basis. The linear bank cannot be normalized when zero is in the
/// spectrum, so it is reported raw only.
pub fn frame_report(complex: &SimplicialComplex, config: &FrameConfig) -> Result<FrameReport> {
    let spectra = HodgeSpectra::new(&HodgeOperators::new(complex))?;
    let full = spectra.full.clamped_eigenvalues();
    let upper = spectra.upper.clamped_eigenvalues();
    let lower = spectra.lower.clamped_eigenvalues();

    let mut variants: Vec<(&str, [KernelBank; 3])> = Vec::new();
    match config.bank {
        BankChoice::LogHann => {
            for (label, normalize) in [("raw", false), ("normalized", true)] {
                let bank = |s: &SpectralDecomposition| spectrum_bank(s, config.kernels, config.overlap, normalize);
                variants.push((label, [bank(&spectra.full)?, bank(&spectra.upper)?, bank(&spectra.lower)?]));
            }
        }
        BankChoice::Linear => {
            let linear = || KernelBank::from_fns(vec![|l: f64| l]);
            variants.push(("raw", [linear(), linear(), linear()]));
        }
    }

    let mut entries = Vec::new();
    for (label, [bank, bank_upper, bank_lower]) in &variants {
        let joint = joint_dictionary(&spectra.full, bank)?;
        let separate = separate_dictionary(&spectra.upper, &spectra.lower, bank_upper, bank_lower)?;
        entries.push(entry("joint", label, "analytic", frame_bounds_joint(bank, &full)?));
        entries.push(entry("joint", label, "empirical", frame_bounds_empirical(&joint)?));
        entries.push(entry(
            "separate",
            label,
            "analytic",
            frame_bounds_separate(bank_upper, bank_lower, &upper, &lower)?,
        ));
        entries.push(entry("separate", label, "empirical", frame_bounds_empirical(&separate)?));
    }
    let standard = standard_dictionary(complex.n_edges());
    entries.push(entry("standard", "none", "empirical", frame_bounds_empirical(&standard)?));

    Ok(FrameReport {
        n_nodes: complex.n_nodes(),
        n_edges: complex.n_edges(),
        n_triangles: complex.n_triangles(),
        harmonic_dimension: spectra.harmonic_dimension(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_grid() {
        let eps = default_epsilons();
        assert_eq!(eps.len(), 21);
        assert_eq!(eps[0], 0.01);
        assert_eq!(eps[10], 0.1);
        assert_eq!(eps[20], 1.0);
    }

    #[test]
    fn small_field_experiment() {
        let config = FieldConfig { target_nodes: 20, ..FieldConfig::default() };
        let out = field_experiment(&config).unwrap();
        let n1 = out.complex.n_edges();
        assert_eq!(out.sizes, vec![n1, n1, 4 * n1, 4 * n1, 8 * n1]);
        let last = out.curve.counts.last().unwrap();
        assert!(last.iter().all(|&c| c == Some(0)));
    }

    #[test]
    fn frame_report_on_a_small_complex() {
        let x = SimplicialComplex::new(4, [[0, 1], [1, 2], [0, 2], [2, 3], [1, 3]], [[0, 1, 2]]).unwrap();
        let report = frame_report(&x, &FrameConfig::default()).unwrap();
        assert_eq!(report.harmonic_dimension, 1);
        for e in &report.entries {
            assert!(e.tight, "{e:?}");
        }
        let std = report.find("standard", "none", "empirical").unwrap();
        assert!((std.a - 1.0).abs() < 1e-12 && (std.b - 1.0).abs() < 1e-12);

        let linear = frame_report(&x, &FrameConfig { bank: BankChoice::Linear, ..FrameConfig::default() }).unwrap();
        let joint = linear.find("joint", "raw", "analytic").unwrap();
        assert_eq!(joint.a, 0.0);
        assert!(!joint.tight);
        assert!(linear.find("joint", "raw", "empirical").unwrap().a.abs() < 1e-10);
    }

    #[test]
    fn fixture_is_reproducible() {
        let fixture = SyntheticFixture {
            walks: SyntheticParams { count_per_class: 3, ..SyntheticFixture::default().walks },
            ..SyntheticFixture::default()
        };
        let a = synthetic_fixture(&fixture).unwrap();
        let b = synthetic_fixture(&fixture).unwrap();
        assert_eq!(a.flows, b.flows);
        assert_eq!(a.labels, vec![0, 0, 0, 1, 1, 1]);
        assert!(a.complex.betti_1() >= 1);
    }
}
