use hodgelets::clustering::sparse_kmeans;
use hodgelets::complex::{hex_complex_from_cells, HexMeta};
use hodgelets::flows::{discretize_field, lift_path, VectorField};
use hodgelets::hodgelets::{frame_bounds_empirical, frame_bounds_joint, joint_dictionary};
use hodgelets::kernels::hann_bank;
use hodgelets::sparse::omp;
use hodgelets::spectral::{hodge_decompose, HodgeOperators, HodgeSpectra};
use hodgelets::{Cochain, Geometry, SimplicialComplex};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn complex_strategy() -> impl Strategy<Value = SimplicialComplex> {
    (3usize..=12).prop_flat_map(|n| {
        let tri = proptest::collection::vec((0..n, 0..n, 0..n), 0..=2 * n);
        let edge = proptest::collection::vec((0..n, 0..n), 1..=2 * n);
        (Just(n), tri, edge).prop_map(|(n, tri, edge)| {
            let tri: Vec<[usize; 3]> = tri
                .into_iter()
                .filter(|&(a, b, c)| a != b && b != c && a != c)
                .map(|(a, b, c)| [a, b, c])
                .collect();
            let mut edge: Vec<[usize; 2]> = edge.into_iter().filter(|&(a, b)| a != b).map(|(a, b)| [a, b]).collect();
            edge.push([0, 1]);
            SimplicialComplex::new(n, edge, tri).unwrap()
        })
    })
}

fn flow_for(x: &SimplicialComplex, seed: &[f64]) -> DVector<f64> {
    DVector::from_fn(x.n_edges(), |i, _| seed[i % seed.len()] * (1.0 + i as f64).sin())
}

fn hex_patch() -> (SimplicialComplex, Geometry, HexMeta) {
    let cells: Vec<(i64, i64)> = (-2..=2).flat_map(|q| (-2..=2).map(move |r| (q, r))).collect();
    hex_complex_from_cells(&cells, 0.4, [0.0, 0.0]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_of_boundary_vanishes(x in complex_strategy()) {
        prop_assert!(x.boundary_1().product(&x.boundary_2()).iter().all(|&v| v == 0));
    }

    #[test]
    fn hodge_parts_are_orthogonal_and_complete(
        x in complex_strategy(),
        seed in proptest::collection::vec(-1.0f64..1.0, 1..8),
    ) {
        let spectra = HodgeSpectra::new(&HodgeOperators::new(&x)).unwrap();
        let f = flow_for(&x, &seed);
        let scale = f.norm().max(1.0);
        let parts = hodge_decompose(&Cochain::edge_flow(f.clone()), &spectra).unwrap();
        let (g, c, h) = (&parts.gradient.values, &parts.curl.values, &parts.harmonic.values);
        prop_assert!(g.dot(c).abs() <= 1e-10 * scale * scale);
        prop_assert!(g.dot(h).abs() <= 1e-10 * scale * scale);
        prop_assert!(c.dot(h).abs() <= 1e-10 * scale * scale);
        prop_assert!((parts.sum() - f).norm() <= 1e-10 * scale);
    }

    #[test]
    fn hann_kernels_are_nonnegative_and_sum_to_constant(
        kernels in 2usize..10,
        overlap in 3usize..6,
        lambda_max in 0.5f64..20.0,
        t in 0.0f64..=1.0,
    ) {
        let bank = hann_bank(lambda_max, kernels, overlap, &[lambda_max / 50.0]).unwrap();
        let lambda = lambda_max * t;
        prop_assert!(bank.evaluate(lambda).unwrap().iter().all(|&g| g >= 0.0));
        prop_assert!((bank.g_sum(lambda).unwrap() - bank.target()).abs() <= 1e-12 * bank.target());
    }

    #[test]
    fn frame_inequality_holds(
        x in complex_strategy(),
        seed in proptest::collection::vec(-1.0f64..1.0, 1..8),
        kernels in 2usize..6,
    ) {
        let spectra = HodgeSpectra::new(&HodgeOperators::new(&x)).unwrap();
        let spectrum = spectra.full.clamped_eigenvalues();
        let bank = hann_bank(spectra.full.lambda_max().max(1.0), kernels, 2, &spectrum).unwrap();
        let d = joint_dictionary(&spectra.full, &bank).unwrap();
        let bounds = frame_bounds_joint(&bank, &spectrum).unwrap();
        let empirical = frame_bounds_empirical(&d).unwrap();
        prop_assert!((bounds.b - empirical.b).abs() <= 1e-8 * bounds.b.max(1.0));
        let f = flow_for(&x, &seed);
        let energy = d.analyze(&f).unwrap().norm_squared();
        let n2 = f.norm_squared();
        prop_assert!(energy >= bounds.a * n2 - 1e-9 * n2.max(1.0));
        prop_assert!(energy <= bounds.b * n2 + 1e-9 * n2.max(1.0));
    }

    #[test]
    fn omp_residual_is_monotone(
        x in complex_strategy(),
        seed in proptest::collection::vec(-1.0f64..1.0, 1..8),
    ) {
        let spectra = HodgeSpectra::new(&HodgeOperators::new(&x)).unwrap();
        let spectrum = spectra.full.clamped_eigenvalues();
        let bank = hann_bank(spectra.full.lambda_max().max(1.0), 3, 3, &spectrum).unwrap();
        let d = joint_dictionary(&spectra.full, &bank).unwrap();
        let f = flow_for(&x, &seed);
        let approx = omp(&d, &f, 0.05 * f.norm(), None).unwrap();
        prop_assert!(approx.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        prop_assert!(approx.residual_norm <= 0.05 * f.norm() + 1e-12);
    }

    #[test]
    fn kmeans_weights_respect_constraints(
        values in proptest::collection::vec(-5.0f64..5.0, 40),
        k in 1usize..4,
        seed in 0u64..1000,
    ) {
        let features = DMatrix::from_vec(10, 4, values);
        let s = 1.0 + (seed % 10) as f64 / 10.0;
        let model = sparse_kmeans(&features, k, s, seed, 10).unwrap();
        let l2: f64 = model.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        let l1: f64 = model.weights.iter().sum();
        prop_assert!(model.weights.iter().all(|&w| w >= 0.0));
        prop_assert!(l2 <= 1.0 + 1e-6);
        prop_assert!(l1 <= s + 1e-6);
        prop_assert_eq!(model.assignments.len(), 10);
    }

    #[test]
    fn lifting_respects_concatenation(
        walk in proptest::collection::vec(0usize..4, 2..12),
        split in 1usize..10,
    ) {
        // the complete graph on 4 nodes makes every consecutive pair an edge
        let edges = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
        let x = SimplicialComplex::new(4, edges, Vec::<[usize; 3]>::new()).unwrap();
        let mut nodes = walk.clone();
        nodes.dedup();
        prop_assume!(nodes.len() >= 2);
        let split = split.min(nodes.len() - 1);
        let whole = lift_path(&nodes, &x).unwrap().values;
        let first = lift_path(&nodes[..=split], &x).unwrap().values;
        let second = lift_path(&nodes[split..], &x).unwrap().values;
        prop_assert_eq!(whole, first + second);
    }

    #[test]
    fn discretization_is_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        u in (-2.0f64..2.0, -2.0f64..2.0),
        v in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let (x, _, meta) = hex_patch();
        let fu = discretize_field(&VectorField::new(move |p| [u.0 * p[1], u.1 * p[0]]), &x, &meta).unwrap().values;
        let fv = discretize_field(&VectorField::constant([v.0, v.1]), &x, &meta).unwrap().values;
        let combined = VectorField::new(move |p| [a * u.0 * p[1] + b * v.0, a * u.1 * p[0] + b * v.1]);
        let fc = discretize_field(&combined, &x, &meta).unwrap().values;
        prop_assert!((fc - (fu * a + fv * b)).amax() <= 1e-12);
    }
}
