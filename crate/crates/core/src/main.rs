//! Command-line front end: build surfaces, run verification suites, emit
//! figures and lifted generators.
//!
//! Exit codes: 0 all pass, 1 verification failure, 2 usage/config error,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use koopman_lab::config::RunConfig;
use koopman_lab::error::Error;
use koopman_lab::figures;
use koopman_lab::linflow::{hyperbolic_generator, SquareMatrix};
use koopman_lab::mesh;
use koopman_lab::polynomials::{compute_m, example2_p, Box2, MultiPoly};
use koopman_lab::surface::{build_surface, cross_section, equilibria, sample_surface, SurfaceSpec};
use koopman_lab::symspace::{basis_dim, lift_generator, PolySpaceBasis};
use koopman_lab::verify::{
    self, conjugate_field, equivariance_suite, graphlike_check, invariance_suite,
    koopman_eigencheck, obstruction_suite, random_fibers, standard_observables,
    standard_subspace_suite, verify_m_certificate, verify_taming, verify_transversality,
    TamingPair, TurnCount, VerificationReport, DEFAULT_SEPARATION_DELTA,
};

const EXIT_VERIFICATION_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "koopman-lab", version, about = "Invariant surfaces with isolated equilibria inside linear flows: construction and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the surface artifacts: mesh, snake curve, taming polynomials,
    /// and the certified constant M.
    Build(ConfigArgs),
    /// Run verification suites and write a consolidated report.
    Verify(VerifyArgs),
    /// Emit figures: section SVG, surface OBJ, or contour CSV.
    Plot(PlotArgs),
    /// Print and write the lifted generator on the degree-bounded
    /// polynomial space.
    Lift(LiftArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Number of isolated equilibria.
    #[arg(long)]
    l: Option<usize>,
    /// Snake amplitude in (0, 1).
    #[arg(long)]
    a: Option<f64>,
    /// Embedding degree (default 2l - 1).
    #[arg(long)]
    m: Option<usize>,
    /// Taming constant M (default: computed from the certifying box).
    #[arg(long = "M")]
    m_const: Option<f64>,
    /// Certifying box as x_lo,x_hi,z_lo,z_hi.
    #[arg(long = "M-box", value_parser = parse_box, allow_hyphen_values = true)]
    m_box: Option<[f64; 4]>,
    /// Cross-section heights, comma separated.
    #[arg(long = "y-grid", value_parser = parse_grid, allow_hyphen_values = true)]
    y_grid: Option<Vec<f64>>,
    /// Seed for the sampled suites.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (env KOOPMAN_LAB_OUT overrides).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Suites to run: all, or a comma list of
    /// taming,transversality,graphlike,koopman,subspace,equivariance,invariance,obstruction.
    #[arg(long, default_value = "all")]
    suites: String,
    /// Turn count for the obstruction suite (default l - 1).
    #[arg(long)]
    turns: Option<u64>,
    /// Infinite-turns flag for the obstruction suite.
    #[arg(long, default_value_t = false)]
    infinite_turns: bool,
    /// Polynomial degree for the obstruction suite (default 2l - 1).
    #[arg(long)]
    degree: Option<u64>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Figure kind: cross_section (SVG), surface (OBJ), or contour (CSV).
    #[arg(long)]
    kind: String,
    /// Section height for cross_section and contour plots.
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
}

#[derive(Args)]
struct LiftArgs {
    /// Ambient dimension.
    #[arg(long)]
    n: usize,
    /// Embedding degree.
    #[arg(long)]
    m: usize,
    /// Generator matrix as a JSON row array, e.g. [[0,1],[1,0]]; defaults
    /// to the hyperbolic generator for n >= 3.
    #[arg(long = "A", allow_hyphen_values = true)]
    matrix: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_box(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let [x_lo, x_hi, z_lo, z_hi] = parts[..] else {
        return Err("expected x_lo,x_hi,z_lo,z_hi".into());
    };
    Ok([x_lo, x_hi, z_lo, z_hi])
}

fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NumericalFailure(_) | Error::DegenerateGram { .. } | Error::ExpOutOfRange { .. } => {
            EXIT_NUMERICAL
        }
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(args) => cmd_build(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Plot(args) => cmd_plot(&args),
        Command::Lift(args) => cmd_lift(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn resolve_config(args: &ConfigArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(l) = args.l {
        cfg.l = l;
    }
    if let Some(a) = args.a {
        cfg.a = a;
    }
    if args.m.is_some() {
        cfg.m = args.m;
    }
    if args.m_const.is_some() {
        cfg.m_const = args.m_const;
    }
    if args.m_box.is_some() {
        cfg.m_box = args.m_box;
    }
    if let Some(grid) = &args.y_grid {
        cfg.y_grid = grid.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Ok(env_out) = std::env::var("KOOPMAN_LAB_OUT") {
        if !env_out.is_empty() {
            cfg.output_dir = PathBuf::from(env_out);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_artifact(cfg: &RunConfig, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

#[derive(Serialize)]
struct TamingArtifact {
    config_hash: String,
    l: usize,
    degree: usize,
    m_const: f64,
    q: MultiPoly,
    p: MultiPoly,
    example2_p: Option<MultiPoly>,
}

#[derive(Serialize)]
struct MBoundArtifact {
    config_hash: String,
    l: usize,
    m_const: f64,
    certifying_box: Box2,
    box_maximum: f64,
    margin: f64,
    certified: bool,
}

fn cmd_build(args: &ConfigArgs) -> Result<u8, Error> {
    let cfg = resolve_config(args)?;
    let spec = build_surface(cfg.l, cfg.a)?;
    let hash = cfg.config_hash();

    let mesh_data = sample_surface(&spec, cfg.density, cfg.plot_radius)?;
    write_artifact(&cfg, "surface.obj", &mesh::render_obj(&mesh_data))?;
    write_artifact(&cfg, "surface_points.csv", &mesh::render_point_cloud_csv(&mesh_data))?;
    write_artifact(
        &cfg,
        "snake.csv",
        &figures::render_snake_csv(&spec, (cfg.density * 100.0) as usize),
    )?;

    let m_const = cfg.resolve_m_const()?;
    let m_box = cfg.resolve_m_box()?;
    let pair = TamingPair::for_surface(cfg.l, m_const)?;
    let taming = TamingArtifact {
        config_hash: hash.clone(),
        l: cfg.l,
        degree: pair.degree,
        m_const,
        q: pair.q.clone(),
        p: pair.p.clone(),
        example2_p: (cfg.l == 2).then(example2_p),
    };
    write_artifact(&cfg, "taming.json", &to_pretty_json(&taming)?)?;

    let box_maximum = compute_m(cfg.l, &m_box, 0.0)?;
    let m_bound = MBoundArtifact {
        config_hash: hash.clone(),
        l: cfg.l,
        m_const,
        certifying_box: m_box,
        box_maximum,
        margin: cfg.m_margin,
        certified: m_const > box_maximum,
    };
    write_artifact(&cfg, "m_bound.json", &to_pretty_json(&m_bound)?)?;
    write_artifact(&cfg, "config.json", &to_pretty_json(&cfg)?)?;

    println!(
        "built surface l={} a={} ({} vertices, {} quads, {} equilibria) into {}",
        cfg.l,
        cfg.a,
        mesh_data.points.len(),
        mesh_data.quads.len(),
        mesh_data.equilibrium_vertices.len(),
        cfg.output_dir.display()
    );
    Ok(0)
}

#[derive(Serialize)]
struct ConsolidatedReport {
    config_hash: String,
    seed: u64,
    l: usize,
    a: f64,
    embed_degree: usize,
    m_const: f64,
    certifying_box: Box2,
    pass: bool,
    conventions: Vec<String>,
    suites: Vec<VerificationReport>,
}

fn known_suites() -> Vec<&'static str> {
    vec![
        "taming",
        "transversality",
        "graphlike",
        "koopman",
        "subspace",
        "equivariance",
        "invariance",
        "obstruction",
    ]
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Error> {
    let cfg = resolve_config(&args.config)?;
    let selected: Vec<String> = if args.suites.trim() == "all" {
        known_suites().iter().map(|s| s.to_string()).collect()
    } else {
        let list: Vec<String> = args
            .suites
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        for name in &list {
            if !known_suites().contains(&name.as_str()) {
                return Err(Error::InvalidParameter(format!("unknown suite: {name}")));
            }
        }
        list
    };

    let spec = build_surface(cfg.l, cfg.a)?;
    let m_const = cfg.resolve_m_const()?;
    let m_box = cfg.resolve_m_box()?;
    let pair = TamingPair::for_surface(cfg.l, m_const)?;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut reports: Vec<VerificationReport> = Vec::new();

    for suite in &selected {
        match suite.as_str() {
            "taming" => {
                let margin = cfg.tolerance("taming");
                reports.push(verify_taming(&spec, &pair, &cfg.y_grid, margin)?);
                if cfg.l == 2 {
                    reports.push(verify_taming(&spec, &TamingPair::example2(), &cfg.y_grid, margin)?);
                }
                reports.push(verify_m_certificate(cfg.l, m_const, &m_box, cfg.a)?);
            }
            "transversality" => {
                let fibers = random_fibers(&mut rng, 200);
                let tol = cfg.tolerance("transversality");
                reports.push(verify_transversality(&spec, &pair, &fibers, tol)?);
                if cfg.l == 2 {
                    reports.push(verify_transversality(
                        &spec,
                        &TamingPair::example2(),
                        &fibers,
                        tol,
                    )?);
                }
            }
            "graphlike" => {
                reports.push(graphlike_check(
                    &spec,
                    &pair,
                    2000,
                    DEFAULT_SEPARATION_DELTA,
                    cfg.tolerance("graphlike"),
                    &mut rng,
                )?);
            }
            "koopman" => {
                let t_grid: Vec<f64> = (-10..=10).map(|i| i as f64 / 5.0).collect();
                let tol = cfg.tolerance("koopman");
                for (psi, lambda) in standard_observables().iter().zip([1.0, -1.0, 0.0]) {
                    reports.push(koopman_eigencheck(
                        &spec, psi, lambda, 100, &t_grid, tol, &mut rng,
                    )?);
                }
            }
            "subspace" => {
                reports.push(standard_subspace_suite(
                    &spec,
                    &[-1.0, 0.3, 1.0],
                    cfg.tolerance("subspace"),
                    200,
                    &mut rng,
                )?);
            }
            "equivariance" => {
                reports.push(equivariance_suite(
                    &[1, 2, 3],
                    200,
                    cfg.tolerance("equivariance"),
                    &mut rng,
                )?);
            }
            "invariance" => {
                reports.push(invariance_suite(
                    &[cfg.l],
                    cfg.a,
                    500,
                    cfg.tolerance("invariance"),
                    cfg.tolerance("conservation"),
                    &mut rng,
                )?);
                // the conjugate field must vanish exactly at the
                // equilibrium images in the chart
                let mut report = VerificationReport::new("equilibrium_census", 1e-10);
                for e in equilibria(&spec) {
                    let w = [e[1], pair.p.eval(&e)?];
                    match conjugate_field(&spec, &pair, w)? {
                        Some(sample) => {
                            let magnitude = sample.field[0].abs().max(sample.field[1].abs());
                            report.record_residual(
                                format!("|conjugate field| at chart image of {e:?}"),
                                magnitude,
                                1e-10,
                            );
                        }
                        None => report.record("chart preimage found", 0.0, 1.0, false),
                    }
                    report.add_samples(1);
                }
                reports.push(report.finish());
            }
            "obstruction" => {
                let turns = if args.infinite_turns {
                    TurnCount::Infinite
                } else {
                    TurnCount::Finite(args.turns.unwrap_or((cfg.l - 1) as u64))
                };
                let degree = args.degree.unwrap_or((2 * cfg.l - 1) as u64);
                reports.push(obstruction_suite(turns, degree));
            }
            _ => unreachable!("suite names validated above"),
        }
    }

    let pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        println!("{}", r.summary_line());
    }
    let consolidated = ConsolidatedReport {
        config_hash: cfg.config_hash(),
        seed: cfg.seed,
        l: cfg.l,
        a: cfg.a,
        embed_degree: cfg.embed_degree(),
        m_const,
        certifying_box: m_box,
        pass,
        conventions: verify::conventions(),
        suites: reports,
    };
    write_artifact(&cfg, "report.json", &to_pretty_json(&consolidated)?)?;
    Ok(if pass { 0 } else { EXIT_VERIFICATION_FAILURE })
}

fn plot_polynomial(cfg: &RunConfig) -> Result<MultiPoly, Error> {
    Ok(TamingPair::for_surface(cfg.l, cfg.resolve_m_const()?)?.p)
}

#[derive(Serialize)]
struct FigureArtifact {
    kind: String,
    path: PathBuf,
    provenance: String,
}

fn cmd_plot(args: &PlotArgs) -> Result<u8, Error> {
    let mut cfg = resolve_config(&args.config)?;
    if let Some(y) = args.y {
        cfg.y_value = y;
    }
    let spec: SurfaceSpec = build_surface(cfg.l, cfg.a)?;
    let (kind, path) = match args.kind.as_str() {
        "cross_section" | "cross_section_svg" => {
            let p = plot_polynomial(&cfg)?;
            let svg =
                figures::render_section_svg(&spec, &p, cfg.y_value, &cfg.contour_levels, cfg.plot_radius)?;
            ("cross_section_svg", write_artifact(&cfg, "cross_section.svg", &svg)?)
        }
        "surface" | "surface_obj" => {
            let mesh_data = sample_surface(&spec, cfg.density, cfg.plot_radius)?;
            ("surface_obj", write_artifact(&cfg, "surface.obj", &mesh::render_obj(&mesh_data))?)
        }
        "contour" | "contour_csv" => {
            let p = plot_polynomial(&cfg)?;
            let csv = figures::render_contours_csv(
                &spec,
                &p,
                cfg.y_value,
                &cfg.contour_levels,
                cfg.plot_radius,
            )?;
            ("contour_csv", write_artifact(&cfg, "contours.csv", &csv)?)
        }
        other => {
            return Err(Error::InvalidParameter(format!("unknown plot kind: {other}")));
        }
    };
    let manifest = FigureArtifact {
        kind: kind.to_owned(),
        path: path.clone(),
        provenance: cfg.config_hash(),
    };
    write_artifact(&cfg, "figure.json", &to_pretty_json(&manifest)?)?;
    // the section traversal is exported alongside every figure kind
    let cs = cross_section(&spec, cfg.y_value);
    write_artifact(&cfg, "cross_section.csv", &figures::render_section_csv(&cs))?;
    println!("wrote {}", path.display());
    Ok(0)
}

#[derive(Serialize)]
struct LiftArtifact {
    n: usize,
    m: usize,
    dim: usize,
    basis: Vec<Vec<u32>>,
    generator: SquareMatrix,
}

const LIFT_DIM_CAP: usize = 10_000;

fn cmd_lift(args: &LiftArgs) -> Result<u8, Error> {
    let dim = basis_dim(args.n, args.m)?;
    if dim > LIFT_DIM_CAP {
        return Err(Error::InvalidParameter(format!(
            "lifted dimension {dim} exceeds the cap {LIFT_DIM_CAP}"
        )));
    }
    let a = match &args.matrix {
        Some(text) => {
            let rows: Vec<Vec<f64>> = serde_json::from_str(text)?;
            let parsed = SquareMatrix::from_rows(&rows)?;
            if parsed.dim() != args.n {
                return Err(Error::DimensionMismatch(format!(
                    "matrix is {}x{} but n = {}",
                    parsed.dim(),
                    parsed.dim(),
                    args.n
                )));
            }
            parsed
        }
        None if args.n >= 3 => hyperbolic_generator(args.n - 3),
        None => {
            return Err(Error::InvalidParameter(
                "pass --A for ambient dimension below 3".into(),
            ));
        }
    };
    let basis = PolySpaceBasis::new(args.n, args.m)?;
    let lifted = lift_generator(&a, args.m)?;
    let artifact = LiftArtifact {
        n: args.n,
        m: args.m,
        dim,
        basis: basis
            .indices()
            .iter()
            .map(|idx| idx.exponents().to_vec())
            .collect(),
        generator: lifted,
    };
    let json = to_pretty_json(&artifact)?;
    println!("{json}");
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        std::fs::write(out.join("lift.json"), &json)?;
    }
    Ok(0)
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}
