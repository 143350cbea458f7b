use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use hodgelets::complex::{delaunay, hex_complex, hex_complex_with_target, Rect};
use hodgelets::experiments::{
    clustering_experiment, field_experiment, frame_report, synthetic_fixture, BankChoice,
    ClusteringConfig, FieldConfig, FrameConfig, SyntheticFixture, TIGHTNESS_TOL,
};
use hodgelets::flows::{lift_trajectory, project_equirectangular, read_trajectories};
use hodgelets::io::{read_complex, read_geometry, read_json, write_cochain, write_complex, write_curve, write_geometry, write_json, write_scores};
use hodgelets::sparse::log_epsilons;
use hodgelets::{Cochain, Error, Geometry, Result, SimplicialComplex};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::{BankArgs, BankKind, BuildCommand, Cli, Command, ExperimentCommand, FieldArgs, FrameArgs, SynthArgs, TrajectoryArgs};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    field: Option<FieldConfig>,
    trajectories: Option<ClusteringConfig>,
    synthetic: Option<SyntheticFixture>,
    frame: Option<FrameConfig>,
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        Some(p) => read_json(File::open(p)?),
        None => Ok(ConfigFile::default()),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_complex_files(dir: &Path, complex: &SimplicialComplex, geometry: Option<&Geometry>) -> Result<()> {
    write_complex(create(dir, "complex.json")?, complex)?;
    if let Some(g) = geometry {
        write_geometry(create(dir, "geometry.csv")?, g)?;
    }
    Ok(())
}

fn summary(complex: &SimplicialComplex) -> String {
    format!(
        "N0={} N1={} N2={} harmonic_dimension={}",
        complex.n_nodes(),
        complex.n_edges(),
        complex.n_triangles(),
        complex.betti_1()
    )
}

fn apply_bank(args: &BankArgs, kernels: &mut usize, overlap: &mut usize, normalize: &mut bool) {
    if let Some(m) = args.kernels {
        *kernels = m;
    }
    if let Some(r) = args.overlap {
        *overlap = r;
    }
    if let Some(n) = args.normalize {
        *normalize = n;
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Build(cmd) => build(cmd),
        Command::Experiment(ExperimentCommand::Field(args)) => field(args, config.field.unwrap_or_default()),
        Command::Experiment(ExperimentCommand::Trajectories(args)) => trajectories(
            args,
            config.trajectories.unwrap_or_default(),
            config.synthetic,
        ),
        Command::FrameReport(args) => frame(args, config.frame.unwrap_or_default()),
        Command::Synth(args) => synth(args, config.synthetic.unwrap_or_default()),
    }
}

fn build(cmd: BuildCommand) -> Result<()> {
    let (out, complex) = match cmd {
        BuildCommand::Simplices { file, out } => {
            let complex = read_complex(File::open(file)?)?;
            write_complex_files(&out, &complex, None)?;
            (out, complex)
        }
        BuildCommand::Delaunay { n, seed, points, hole, out } => {
            let positions = match points {
                Some(p) => read_geometry(File::open(p)?)?.positions,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect()
                }
            };
            let (mut complex, mut geometry) = delaunay(&positions)?;
            if let Some(h) = hole {
                (complex, geometry) = complex.punch_hole(&geometry, [h[0], h[1]], h[2])?;
            }
            write_complex_files(&out, &complex, Some(&geometry))?;
            (out, complex)
        }
        BuildCommand::Hex { bounds, target_nodes, circumradius, out } => {
            let rect = Rect::new(bounds[0], bounds[1], bounds[2], bounds[3]);
            let (complex, geometry, meta) = match (target_nodes, circumradius) {
                (_, Some(r)) => hex_complex(rect, r)?,
                (target, None) => hex_complex_with_target(rect, target.unwrap_or(225))?,
            };
            write_complex_files(&out, &complex, Some(&geometry))?;
            write_json(create(&out, "hexmeta.json")?, &meta)?;
            (out, complex)
        }
    };
    println!("{} -> {}", summary(&complex), out.display());
    Ok(())
}

fn field(args: FieldArgs, mut config: FieldConfig) -> Result<()> {
    apply_bank(&args.bank, &mut config.kernels, &mut config.overlap, &mut config.normalize);
    if let Some(t) = args.target_nodes {
        config.target_nodes = t;
    }
    if args.tol.is_some() || args.tol_count.is_some() {
        let lo = args.tol.unwrap_or(config.epsilons.iter().copied().fold(1.0, f64::min));
        config.epsilons = log_epsilons(lo, args.tol_count.unwrap_or(21));
    }
    let outcome = field_experiment(&config)?;
    let out = &args.out;
    write_json(create(out, "config.json")?, &config)?;
    write_complex_files(out, &outcome.complex, Some(&outcome.geometry))?;
    write_json(create(out, "hexmeta.json")?, &outcome.meta)?;
    write_cochain(create(out, "field.csv")?, &outcome.complex, &outcome.flow)?;
    write_curve(create(out, "curve.csv")?, &outcome.curve)?;
    create(out, "field.svg")?.write_all(
        crate::svg::render_flow(&outcome.complex, &outcome.geometry, &outcome.flow).as_bytes(),
    )?;
    println!("{}", summary(&outcome.complex));
    for (name, size) in outcome.curve.names.iter().zip(&outcome.sizes) {
        println!("{name}: {size} atoms");
    }
    Ok(())
}

struct Flows {
    complex: SimplicialComplex,
    geometry: Geometry,
    flows: Vec<DVector<f64>>,
}

fn real_flows(path: &PathBuf, target_nodes: usize) -> Result<Flows> {
    let parsed = read_trajectories(path)?;
    if parsed.skipped > 0 {
        eprintln!("skipped {} unreadable rows", parsed.skipped);
    }
    let projected = project_equirectangular(&parsed.trajectories);
    let all: Vec<[f64; 2]> = projected.iter().flatten().copied().collect();
    let bbox = Geometry::new(all).bounding_box().ok_or(Error::Parse("no samples".into()))?;
    let pad = 0.05 * (bbox.1[0] - bbox.0[0]).max(bbox.1[1] - bbox.0[1]).max(1e-6);
    let rect = Rect::new(bbox.0[0] - pad, bbox.1[0] + pad, bbox.0[1] - pad, bbox.1[1] + pad);
    let (complex, geometry, _) = hex_complex_with_target(rect, target_nodes)?;
    let flows = projected
        .iter()
        .map(|points| lift_trajectory(points, &complex, &geometry).map(|c| c.values))
        .collect::<Result<_>>()?;
    Ok(Flows { complex, geometry, flows })
}

fn trajectories(args: TrajectoryArgs, mut config: ClusteringConfig, synthetic: Option<SyntheticFixture>) -> Result<()> {
    apply_bank(&args.bank, &mut config.kernels, &mut config.overlap, &mut config.normalize);
    if let Some(k) = args.k {
        config.k = k;
    }
    if args.s.is_some() {
        config.s = args.s;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(r) = args.ratio {
        config.train_ratio = r;
    }
    if let Some(m) = args.max_iters {
        config.max_iters = m;
    }
    let out = &args.out;
    let data = match (&args.input, &args.manifest) {
        (Some(path), _) => real_flows(path, args.target_nodes)?,
        (None, manifest) => {
            let fixture = match manifest {
                Some(p) => read_json(File::open(p)?)?,
                None => synthetic.unwrap_or_default(),
            };
            write_json(create(out, "manifest.json")?, &fixture)?;
            let set = synthetic_fixture(&fixture)?;
            Flows { complex: set.complex, geometry: set.geometry, flows: set.flows }
        }
    };
    let scores = clustering_experiment(&data.complex, &data.flows, &config)?;

    write_json(create(out, "config.json")?, &config)?;
    write_complex_files(out, &data.complex, Some(&data.geometry))?;
    let total = data.flows.iter().fold(DVector::zeros(data.complex.n_edges()), |acc, f| acc + f);
    write_cochain(create(out, "aggregate.csv")?, &data.complex, &Cochain::edge_flow(total))?;
    let models: Vec<_> = scores.iter().map(|s| (&s.representation, &s.model)).collect();
    write_json(create(out, "models.json")?, &models)?;
    let table: Vec<(String, f64)> = scores.iter().map(|s| (s.representation.clone(), s.l)).collect();
    write_scores(create(out, "scores.csv")?, &table)?;
    println!("{} trajectories, {}", data.flows.len(), summary(&data.complex));
    for (name, l) in &table {
        println!("{name}: L = {l}");
    }
    Ok(())
}

fn frame(args: FrameArgs, mut config: FrameConfig) -> Result<()> {
    if let Some(m) = args.kernels {
        config.kernels = m;
    }
    if let Some(r) = args.overlap {
        config.overlap = r;
    }
    if let Some(b) = args.bank {
        config.bank = match b {
            BankKind::LogHann => BankChoice::LogHann,
            BankKind::Linear => BankChoice::Linear,
        };
    }
    let complex = match &args.complex {
        Some(p) => read_complex(File::open(p)?)?,
        None => hex_complex_with_target(Rect::new(-2.0, 2.0, -2.0, 2.0), args.target_nodes)?.0,
    };
    let mut report = frame_report(&complex, &config)?;
    let tol = args.tol.unwrap_or(TIGHTNESS_TOL);
    for e in &mut report.entries {
        e.tight = e.a > 0.0 && e.b / e.a - 1.0 <= tol;
    }
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_json(BufWriter::new(File::create(&args.out)?), &report)?;
    println!("{}", summary(&complex));
    for e in &report.entries {
        println!("{} {} {}: A = {} B = {} tight = {}", e.dictionary, e.bank, e.method, e.a, e.b, e.tight);
    }
    Ok(())
}

fn synth(args: SynthArgs, mut fixture: SyntheticFixture) -> Result<()> {
    if let Some(seed) = args.seed {
        fixture.walks.seed = seed;
    }
    if let Some(c) = args.count {
        fixture.walks.count_per_class = c;
    }
    if let Some(n) = args.noise {
        fixture.walks.noise = n;
    }
    let set = synthetic_fixture(&fixture)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_json(BufWriter::new(File::create(&args.out)?), &fixture)?;
    println!("{} trajectories, {}", set.flows.len(), summary(&set.complex));
    Ok(())
}
