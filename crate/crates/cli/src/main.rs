//! `sfem`: patch tests, cantilever runs and convergence studies from the
//! command line.

mod plot;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::LevelFilter;
use sfem_core::benchmarks::{beam_divisions, beam_mesh, PatchResult, StudyConfig, CSV_HEADER, MAX_DISTORTION_ATTEMPTS};
use sfem_core::mesh::{quad_sites, Sc2Split, Subdivision};
use sfem_core::prelude::*;

use plot::{LogLogPlot, Series};

const REGULAR_PATCH_TOL: f64 = 1e-10;
const DISTORTED_PATCH_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "sfem",
    version,
    about = "Smoothed finite element benchmarks for quadrilateral meshes"
)]
struct Cli {
    /// Directory receiving CSV, SVG and metadata files.
    #[arg(long, global = true, env = "SFEM_OUTPUT_DIR", default_value = "sfem-output")]
    output_dir: PathBuf,

    /// More log output; repeat for debug detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linear-field patch test on a unit square.
    PatchTest(PatchArgs),
    /// Single cantilever solve against the closed-form solution.
    Beam(BeamArgs),
    /// Cantilever convergence study with CSV and SVG output.
    Convergence(ConvergenceArgs),
    /// Shape-function values of every scheme at one point.
    ShapefnDemo(DemoArgs),
}

#[derive(Args, Clone, Copy)]
struct CellArgs {
    /// Smoothing cells per element (1, 2 or 4).
    #[arg(long, default_value_t = 4, value_parser = parse_cells)]
    k: usize,

    /// Bimedian used when k = 2.
    #[arg(long, default_value = "12-34", value_parser = parse_split)]
    sc2_split: Sc2Split,

    /// Gauss points per cell segment (1 to 4); scheme default if omitted.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    quadrature: Option<u8>,
}

impl CellArgs {
    fn subdivision(&self) -> Subdivision {
        // k was validated by the parser
        Subdivision::from_count(self.k, self.sc2_split).unwrap_or(Subdivision::Quarters)
    }

    fn discretization(&self, scheme: Scheme) -> Result<Discretization> {
        let d = Discretization::new(scheme, self.subdivision());
        match self.quadrature {
            Some(q) => d.with_quadrature(q as usize),
            None => Ok(d),
        }
    }
}

#[derive(Args)]
struct DistortionArgs {
    /// Irregularity factor in [0, 0.5].
    #[arg(long, default_value_t = 0.0, value_parser = parse_alpha)]
    alpha: f64,

    /// Seed of the first distortion draw.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Cholesky,
    Cg,
}

impl From<SolverArg> for LinearSolver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Cholesky => LinearSolver::Cholesky,
            SolverArg::Cg => LinearSolver::ConjugateGradient,
        }
    }
}

#[derive(Args)]
struct PatchArgs {
    #[arg(long, default_value = "wachspress", value_parser = parse_scheme)]
    scheme: Scheme,
    #[command(flatten)]
    cells: CellArgs,
    #[command(flatten)]
    distortion: DistortionArgs,
    /// Elements per side; 2 for a regular patch and 3 for a distorted one if omitted.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=200))]
    divisions: Option<u16>,
}

#[derive(Args)]
struct BeamArgs {
    #[arg(long, default_value = "wachspress", value_parser = parse_scheme)]
    scheme: Scheme,
    #[command(flatten)]
    cells: CellArgs,
    #[command(flatten)]
    distortion: DistortionArgs,
    /// Elements along the beam axis divided by the beam length.
    #[arg(long, default_value_t = 4.0)]
    mesh_index: f64,
    #[arg(long, value_enum, default_value = "cholesky")]
    solver: SolverArg,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Comma-separated schemes, one curve each.
    #[arg(long = "scheme", value_delimiter = ',', default_value = "wachspress,averaged", value_parser = parse_scheme)]
    schemes: Vec<Scheme>,
    #[command(flatten)]
    cells: CellArgs,
    #[command(flatten)]
    distortion: DistortionArgs,
    /// Number of distortion seeds, counting up from --seed. Ignored for regular meshes.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=1000))]
    seeds: u64,
    /// Ascending mesh indices.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    mesh_indices: Vec<f64>,
    #[arg(long, value_enum, default_value = "cholesky")]
    solver: SolverArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum NamedQuad {
    Parallelogram,
    Square,
    Trapezoid,
}

#[derive(Args)]
struct DemoArgs {
    /// Named quad, or four counter-clockwise nodes as `x1,y1,x2,y2,x3,y3,x4,y4`.
    #[arg(long, default_value = "parallelogram")]
    quad: String,
    /// Evaluation point as `x,y`.
    #[arg(long, default_value = "0.25,0.5")]
    point: String,
    #[command(flatten)]
    cells: CellArgs,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::UnsupportedSubdivision(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_split(s: &str) -> Result<Sc2Split, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_cells(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k @ (1 | 2 | 4)) => Ok(k),
        _ => Err(format!("`{s}` is not 1, 2 or 4")),
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=DistortionSpec::MAX_ALPHA).contains(&a) {
        Ok(a)
    } else {
        Err(format!("{a} is outside [0, 0.5]"))
    }
}

fn parse_numbers(s: &str, count: usize) -> Result<Vec<f64>, Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("`{s}` is not a comma-separated list of numbers")))?;
    if v.len() != count || v.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Usage(format!("expected {count} finite numbers, got `{s}`")));
    }
    Ok(v)
}

/// At most twelve decimals, without trailing zeros.
fn short(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_failure(&path, e))?;
    Ok(path)
}

/// `key = value` lines describing every modelling choice behind a run.
fn meta(command: &str, extra: &[(&str, String)], cells: &CellArgs, schemes: &[Scheme]) -> String {
    let quadrature = schemes
        .iter()
        .map(|&s| format!("{s}={}", cells.quadrature.map_or(s.default_quadrature(), usize::from)))
        .collect::<Vec<_>>()
        .join(",");
    let mut lines: Vec<(&str, String)> = vec![
        ("command", command.into()),
        ("version", env!("CARGO_PKG_VERSION").into()),
        (
            "schemes",
            schemes.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","),
        ),
        ("smoothing_cells", cells.subdivision().to_string()),
        (
            "sc2_split",
            match cells.sc2_split {
                Sc2Split::Edge12To34 => {
                    "12-34 (k = 2 splits along the bimedian from the midpoint of edge 1-2 to that of edge 3-4)"
                }
                Sc2Split::Edge23To41 => {
                    "23-41 (k = 2 splits along the bimedian from the midpoint of edge 2-3 to that of edge 4-1)"
                }
            }
            .into(),
        ),
        ("quadrature_points_per_segment", quadrature),
    ];
    lines.extend(extra.iter().cloned());
    let mut s = String::new();
    for (k, v) in lines {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

fn beam_meta(alpha: f64, seeds: &[u64], solver: LinearSolver) -> Vec<(&'static str, String)> {
    let beam = TimoshenkoBeam::default();
    vec![
        (
            "beam",
            format!(
                "L={} D={} t={} E={} nu={} P={}",
                beam.length, beam.height, beam.thickness, beam.young, beam.poisson, beam.load
            ),
        ),
        ("exact_strain_energy", EXACT_STRAIN_ENERGY.to_string()),
        (
            "essential_bc",
            "closed-form displacement imposed on both components of every node at x = 0".into(),
        ),
        (
            "natural_bc",
            "parabolic shear traction at x = L, linear edge lumping with 2 Gauss points per edge".into(),
        ),
        ("alpha_ir", alpha.to_string()),
        ("seeds", seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(",")),
        (
            "distortion_rng",
            "ChaCha8 seeded from the 64-bit seed; interior nodes in id order, x draw then y draw, r uniform in [-1, 1)"
                .into(),
        ),
        (
            "distortion_admissibility",
            format!(
                "reject draws with a self-intersecting element or a non-positive four-cell smoothing cell; \
                 up to {MAX_DISTORTION_ATTEMPTS} attempts with seed + attempt * 0x9E3779B97F4A7C15 (wrapping)"
            ),
        ),
        (
            "energy_norm",
            "sqrt(sum over cells of the integral of (e_h - e)^T D (e_h - e)), no factor 1/2, unit thickness".into(),
        ),
        (
            "rate_fit",
            "least squares of log(median error over seeds) against log(1 / mesh index)".into(),
        ),
        (
            "solver",
            match solver {
                LinearSolver::Cholesky => "sparse Cholesky".into(),
                LinearSolver::ConjugateGradient => "Jacobi-preconditioned conjugate gradients".into(),
            },
        ),
    ]
}

fn report_warnings(warnings: &[Warning]) {
    if warnings.is_empty() {
        return;
    }
    eprintln!("{} warning(s)", warnings.len());
    for w in warnings.iter().take(5) {
        eprintln!("  {w}");
    }
    if warnings.len() > 5 {
        eprintln!("  ...");
    }
}

fn patch_test(args: &PatchArgs) -> Result<(), Failure> {
    let d = &args.distortion;
    let regular = d.alpha == 0.0;
    let divisions = args.divisions.map_or(if regular { 2 } else { 3 }, usize::from);
    let config = if regular {
        PatchConfig::regular(divisions)
    } else {
        PatchConfig::distorted(divisions, d.alpha, d.seed)
    };
    let disc = args.cells.discretization(args.scheme)?;
    let PatchResult {
        max_error,
        interior_nodes,
        warnings,
        ..
    } = run_patch_test(&disc, &config)?;
    let tol = if regular {
        REGULAR_PATCH_TOL
    } else {
        DISTORTED_PATCH_TOL
    };
    let verdict = if max_error < tol { "PASS" } else { "FAIL" };
    println!(
        "{} {} alpha={} seed={} divisions={divisions} interior_nodes={interior_nodes} max_error={max_error:.3e} tolerance={tol:e} {verdict}",
        args.scheme,
        disc.subdivision,
        d.alpha,
        d.seed
    );
    report_warnings(&warnings);
    if max_error < tol {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "patch test error {max_error:e} exceeds {tol:e}"
        )))
    }
}

fn beam(args: &BeamArgs, out: &Path) -> Result<(), Failure> {
    let beam = TimoshenkoBeam::default();
    let disc = args.cells.discretization(args.scheme)?;
    let solver = LinearSolver::from(args.solver);
    let (nx, ny) = beam_divisions(&beam, args.mesh_index)?;
    let (mesh, seed) = beam_mesh(&beam, nx, ny, args.distortion.alpha, args.distortion.seed)?;
    let run = solve_beam(&beam, &mesh, nx, &disc, solver)?;
    let u = run.solution.strain_energy;
    println!(
        "{} {} mesh_index={} elements={nx}x{ny} dofs={} strain_energy={u:.10} exact={EXACT_STRAIN_ENERGY} relative_gap={:.3e} energy_norm_error={:.6e}",
        args.scheme,
        disc.subdivision,
        args.mesh_index,
        run.dof_count,
        (u - EXACT_STRAIN_ENERGY) / EXACT_STRAIN_ENERGY,
        run.energy_norm_error
    );
    report_warnings(&run.solution.warnings);

    let record = ConvergenceRecord {
        scheme: args.scheme,
        k_cells: disc.subdivision.count(),
        alpha_ir: args.distortion.alpha,
        seed,
        mesh_index: run.mesh_index,
        dof_count: run.dof_count,
        strain_energy: u,
        energy_norm_error: run.energy_norm_error,
    };
    write_file(out, "beam.csv", &records_to_csv(&[record]))?;
    let mut cells = String::from("element,centroid_x,centroid_y,area,exx,eyy,gxy\n");
    for c in &run.solution.per_cell_strains {
        let _ = writeln!(
            cells,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            c.element, c.centroid.x, c.centroid.y, c.area, c.strain.x, c.strain.y, c.strain.z
        );
    }
    write_file(out, "beam_cell_strains.csv", &cells)?;
    let mut extra = beam_meta(args.distortion.alpha, &[seed], solver);
    extra.push(("mesh_index", args.mesh_index.to_string()));
    write_file(out, "meta.txt", &meta("beam", &extra, &args.cells, &[args.scheme]))?;
    println!(
        "wrote beam.csv, beam_cell_strains.csv and meta.txt to {}",
        out.display()
    );
    Ok(())
}

fn convergence(args: &ConvergenceArgs, out: &Path) -> Result<(), Failure> {
    let alpha = args.distortion.alpha;
    let seeds: Vec<u64> = if alpha == 0.0 {
        vec![args.distortion.seed]
    } else {
        (0..args.seeds).map(|i| args.distortion.seed.wrapping_add(i)).collect()
    };
    let mut schemes = args.schemes.clone();
    schemes.dedup();
    let solver = LinearSolver::from(args.solver);
    let mut records = Vec::new();
    let mut series = Vec::new();
    for &scheme in &schemes {
        let mut config = StudyConfig::new(args.cells.discretization(scheme)?, alpha);
        config.seeds = seeds.clone();
        config.mesh_indices = args.mesh_indices.clone();
        config.solver = solver;
        let study = run_convergence_study(&config)?;
        println!(
            "{scheme} {}: rate {:.4} (r² {:.5}) over mesh indices {:?}",
            config.discretization.subdivision, study.fit.slope, study.fit.r_squared, config.mesh_indices
        );
        for (m, u, e) in study.medians() {
            println!("  mesh_index={m} median_strain_energy={u:.10} median_energy_norm_error={e:.6e}");
        }
        report_warnings(&study.warnings);
        series.push(Series {
            label: scheme.to_string(),
            points: study.medians().iter().map(|&(m, _, e)| (m, e)).collect(),
            slope: study.fit.slope.is_finite().then_some(study.fit.slope),
        });
        records.extend(study.records);
    }

    let sub = args.cells.subdivision();
    let stem = format!("convergence_{}_alpha{alpha}", sub.to_string().to_lowercase());
    let csv = records_to_csv(&records);
    debug_assert!(csv.starts_with(CSV_HEADER));
    write_file(out, &format!("{stem}.csv"), &csv)?;
    let plot = LogLogPlot {
        title: format!("{sub}, alpha_ir = {alpha}"),
        x_label: "mesh index".into(),
        y_label: "energy-norm error".into(),
        series,
    };
    write_file(out, &format!("{stem}.svg"), &plot.to_svg())?;
    let mut extra = beam_meta(alpha, &seeds, solver);
    extra.push((
        "mesh_indices",
        args.mesh_indices
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    ));
    write_file(out, "meta.txt", &meta("convergence", &extra, &args.cells, &schemes))?;
    println!("wrote {stem}.csv, {stem}.svg and meta.txt to {}", out.display());
    Ok(())
}

fn demo_quad(spec: &str) -> Result<[Point; 4], Failure> {
    if let Ok(named) = NamedQuad::from_str(spec, true) {
        return Ok(match named {
            NamedQuad::Parallelogram => [point(0.0, 0.0), point(1.0, 0.0), point(1.5, 1.0), point(0.5, 1.0)],
            NamedQuad::Square => [point(0.0, 0.0), point(1.0, 0.0), point(1.0, 1.0), point(0.0, 1.0)],
            NamedQuad::Trapezoid => [point(0.0, 0.0), point(2.0, 0.0), point(1.5, 1.0), point(0.5, 1.0)],
        });
    }
    let v = parse_numbers(spec, 8)?;
    Ok(std::array::from_fn(|i| point(v[2 * i], v[2 * i + 1])))
}

fn shapefn_demo(args: &DemoArgs) -> Result<(), Failure> {
    let quad = demo_quad(&args.quad)?;
    let p = parse_numbers(&args.point, 2)?;
    let p = point(p[0], p[1]);
    let sub = args.cells.subdivision();
    let nodes: Vec<String> = quad
        .iter()
        .map(|q| format!("({}, {})", short(q.x), short(q.y)))
        .collect();
    println!("quad {}", nodes.join(" "));
    println!(
        "point ({}, {}), averaged scheme on the {sub} skeleton",
        short(p.x),
        short(p.y)
    );
    let columns: Vec<(Scheme, Result<ShapeValues>)> = Scheme::ALL
        .iter()
        .map(|&s| (s, ElementBasis::new(s, &quad, sub).and_then(|b| b.values(&p))))
        .collect();
    let mut header = format!("{:<5}", "");
    for (s, _) in &columns {
        let _ = write!(header, "{:>16}", s.as_str());
    }
    println!("{header}");
    for row in 0..5 {
        let mut line = format!("{:<5}", if row < 4 { format!("N{}", row + 1) } else { "sum".into() });
        for (_, v) in &columns {
            let cell = match v {
                Ok(v) if row < 4 => short(v.n[row]),
                Ok(v) => short(v.sum()),
                Err(_) => "-".into(),
            };
            let _ = write!(line, "{cell:>16}");
        }
        println!("{line}");
    }
    for (s, v) in &columns {
        if let Err(e) = v {
            println!("{s}: {e}");
        }
    }
    if let Some(i) = quad_sites(&quad).iter().position(|s| (s - p).norm() < 1e-12) {
        println!("the point is site {} of the quad", i + 1);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    let result = match &cli.command {
        Command::PatchTest(a) => patch_test(a),
        Command::Beam(a) => beam(a, &cli.output_dir),
        Command::Convergence(a) => convergence(a, &cli.output_dir),
        Command::ShapefnDemo(a) => shapefn_demo(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
