//! `hopflab` command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 failed certification or verification.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hopflab::actions::{ActionLabel, PolarActionSpec};
use hopflab::catalog::{self, CatalogName, CatalogParams};
use hopflab::constructor::{
    build_hypersurface, integrate_sigma_symmetric, law_certify, sample_mesh, strongly_2hopf_certify, CertifyOptions,
};
use hopflab::hypersurface::{
    classify, verify_gauss_codazzi, ClassificationReport, GaussCodazziOptions, HypersurfacePatch, Tolerances,
};
use hopflab::suites::{self, SuiteName};

use hopflab_cli::config::{self, LawKind, Overrides, RunConfig, ToleranceOverrides};
use hopflab_cli::scene::{self, SceneCertification, SceneFile, SCENE_SCHEMA_VERSION};

/// Gauss-Codazzi tolerance for the spot check recorded in scenes.
const GAUSS_CODAZZI_TOL: f64 = 1e-4;
/// Tolerance for comparing catalog expectations.
const CATALOG_TOL: f64 = 1e-4;

#[derive(Parser)]
#[command(name = "hopflab", version, about = "Real hypersurfaces in CP2 and CH2: construction, classification, verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a section curve, sweep it by the action and certify the result.
    Construct(ConstructArgs),
    /// Classify a catalog entry or a constructed scene.
    Classify(ClassifyArgs),
    /// Zeros of the Hopf obstruction map at a section point.
    HopfDirections(HopfArgs),
    /// Run an invariant suite.
    Verify(VerifyArgs),
    /// Export a sampled mesh as CSV.
    Sample(SampleArgs),
}

#[derive(Args, Default)]
struct TolArgs {
    #[arg(long)]
    tau_mult: Option<f64>,
    #[arg(long)]
    tau_proj: Option<f64>,
    #[arg(long = "flag-tol")]
    flag: Option<f64>,
    #[arg(long = "integrability-tol")]
    integrability: Option<f64>,
    #[arg(long = "derivative-tol")]
    derivative: Option<f64>,
}

impl TolArgs {
    fn overrides(&self) -> ToleranceOverrides {
        ToleranceOverrides {
            tau_mult: self.tau_mult,
            tau_proj: self.tau_proj,
            flag: self.flag,
            integrability: self.integrability,
            derivative: self.derivative,
        }
    }
}

fn pair(name: &str, v: &[f64]) -> Result<[f64; 2]> {
    match v {
        [x, y] => Ok([*x, *y]),
        _ => bail!("invalid --{name}: expected 2 comma-separated numbers, got {}", v.len()),
    }
}

fn triple(v: &[usize]) -> Result<[usize; 3]> {
    match v {
        [a, b, c] if a * b * c > 0 => Ok([*a, *b, *c]),
        [..] if v.len() == 3 => bail!("invalid --grid: sizes must be at least 1, got {v:?}"),
        _ => bail!("invalid --grid: expected 3 comma-separated sizes, got {}", v.len()),
    }
}

#[derive(Args)]
struct ConstructArgs {
    /// JSON config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    action: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Section coordinates `x,y`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, value_enum)]
    law: Option<LawKind>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    #[arg(long)]
    n_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    t_half: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s_extent: Option<f64>,
    /// Certification grid `nt,ns1,ns2`.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    #[command(flatten)]
    tol: TolArgs,
    /// Scene JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mesh CSV output.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long, conflicts_with = "scene", required_unless_present = "scene")]
    catalog: Option<String>,
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Curvature for catalog entries.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Radius for spheres and tubes.
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_delimiter = ',', default_value = "5,3,3")]
    grid: Vec<usize>,
    #[command(flatten)]
    tol: TolArgs,
    /// Report JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct HopfArgs {
    #[arg(long, default_value = "cp2-torus")]
    action: String,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3,0.5")]
    point: Vec<f64>,
    #[arg(long, default_value_t = 720)]
    samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Sampled Φ(θ) as CSV.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Gnuplot script for the profile (needs --profile).
    #[arg(long, requires = "profile")]
    plot: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// ambient, actions, frames, connection, gauss-codazzi, austere, cmc, levi-flat or all.
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Report JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_delimiter = ',', default_value = "5,3,3")]
    grid: Vec<usize>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.cmd {
        Command::Construct(a) => cmd_construct(a),
        Command::Classify(a) => cmd_classify(a),
        Command::HopfDirections(a) => cmd_hopf(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sample(a) => cmd_sample(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn resolve_config(a: &ConstructArgs) -> Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        action: a.action.clone(),
        c: a.c,
        point: a.point.as_deref().map(|v| pair("point", v)).transpose()?,
        theta: a.theta,
        law: a.law,
        eta: a.eta,
        step: a.step,
        n_steps: a.n_steps,
        t_half: a.t_half,
        s_extent: a.s_extent,
        grid: a.grid.as_deref().map(triple).transpose()?,
        tolerances: a.tol.overrides(),
        out: a.out.clone(),
        mesh: a.mesh.clone(),
        seed: a.seed,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn default_theta(spec: &PolarActionSpec, y: &hopflab::ambient::RealVec) -> Result<f64> {
    let prof = spec.phi_profile(y, 720)?;
    Ok(prof.iter().fold((0.0, -1.0), |best, p| if p.1.abs() > best.1 { (p.0, p.1.abs()) } else { best }).0)
}

fn cmd_construct(a: ConstructArgs) -> Result<bool> {
    let mut cfg = resolve_config(&a)?;
    let spec = cfg.spec()?;
    let tol = cfg.tolerances.resolve()?;
    let y = spec.section.coords_to_y(cfg.point);
    if !spec.is_regular(&spec.section.lift(&y)) {
        bail!("invalid config: point {:?} is not a regular point of {}", cfg.point, spec.label);
    }
    let theta = match cfg.theta {
        Some(t) => t,
        None => default_theta(&spec, &y)?,
    };
    let w = spec.section.direction(&y, theta);
    let steps = cfg.steps();
    let sigma = integrate_sigma_symmetric(&spec, &y, &w, cfg.curve_law(), cfg.step, steps)?;
    let ehs = build_hypersurface(&spec, &sigma, cfg.t_half, cfg.s_extent)?;

    let opts = CertifyOptions { grid: cfg.grid, tolerances: tol, ..CertifyOptions::default() };
    let s2h = strongly_2hopf_certify(&ehs, &opts)?;
    let (law, classification) = law_certify(&ehs, cfg.grid, &tol)?;
    let seed = cfg.seed.unwrap_or(0);
    let gc_opts = GaussCodazziOptions { seed, ..GaussCodazziOptions::default() };
    let gc = verify_gauss_codazzi(&ehs.patch, ehs.patch.center(), GAUSS_CODAZZI_TOL, &gc_opts)?;
    let passed = s2h.passed && law.passed && gc.passed;

    let (out, mesh_path) = (cfg.out.take(), cfg.mesh.take());
    cfg.c = Some(spec.ambient.c());
    cfg.theta = Some(theta);
    cfg.n_steps = Some(steps);
    cfg.seed = Some(seed);
    let scene = SceneFile {
        schema_version: SCENE_SCHEMA_VERSION,
        config: cfg,
        sigma,
        certification: SceneCertification { passed, strongly_two_hopf: s2h, law, gauss_codazzi: gc },
        classification,
    };
    let mesh = match &mesh_path {
        Some(_) => Some(sample_mesh(&ehs.patch, scene.config.grid)?),
        None => None,
    };

    let mut so = std::io::stdout().lock();
    writeln!(so, "action {}  law {}  theta {:.6}  t {:?}", spec.label, scene.sigma.law.name(), theta, ehs.patch.bounds[0])?;
    print_certification(&mut so, "strongly 2-Hopf", &scene.certification.strongly_two_hopf)?;
    print_certification(&mut so, "law", &scene.certification.law)?;
    let gc = &scene.certification.gauss_codazzi;
    writeln!(so, "gauss-codazzi   gauss {:.3e}  codazzi {:.3e}  {}", gc.gauss, gc.codazzi, if gc.passed { "ok" } else { "FAIL" })?;
    writeln!(so, "certification {}", if passed { "passed" } else { "FAILED" })?;

    if let Some(p) = &out {
        scene::write_file(p, scene.to_json()?.as_bytes())?;
    }
    if let (Some(p), Some(rows)) = (&mesh_path, &mesh) {
        let mut buf = Vec::new();
        scene::write_mesh(&mut buf, rows)?;
        scene::write_file(p, &buf)?;
    }
    Ok(passed)
}

fn print_certification(out: &mut impl Write, title: &str, c: &hopflab::constructor::Certification) -> Result<()> {
    writeln!(out, "{title:15} {}", if c.passed { "ok" } else { "FAIL" })?;
    for (k, v) in &c.residuals {
        writeln!(out, "  {k:28} {v:.3e}")?;
    }
    for f in &c.failures {
        writeln!(out, "  failed: {f}")?;
    }
    Ok(())
}

/// Patch named by `--catalog` or rebuilt from `--scene`, with the catalog expectation if any.
fn load_source(s: &SourceArgs) -> Result<(String, HypersurfacePatch, Option<catalog::ExpectedFragment>)> {
    if let Some(path) = &s.scene {
        let scene = SceneFile::read(path)?;
        let spec = scene.config.spec()?;
        let ehs = build_hypersurface(&spec, &scene.sigma, scene.config.t_half, scene.config.s_extent)?;
        return Ok((format!("{} ({})", path.display(), spec.label), ehs.patch, None));
    }
    let name: CatalogName = s.catalog.as_deref().unwrap_or_default().parse().map_err(|e| {
        let names: Vec<&str> = CatalogName::ALL.iter().map(|n| n.as_str()).collect();
        anyhow::anyhow!("{e}; expected one of {}", names.join(", "))
    })?;
    if let Some(r) = s.r {
        if !(r > 0.0 && r.is_finite()) {
            bail!("invalid --r: radius must be positive, got {r}");
        }
    }
    let entry = catalog::build(name, &CatalogParams { c: s.c, r: s.r }).with_context(|| format!("cannot build {name}"))?;
    Ok((entry.name, entry.patch, Some(entry.expected)))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_classification(title: &str, r: &ClassificationReport) -> String {
    let mut s = format!("{title}\n");
    s += &format!("  h (max over grid)    {}   counts {:?}\n", r.h, r.h_counts);
    for (k, v) in [
        ("hopf", r.hopf),
        ("2-hopf", r.two_hopf),
        ("strongly 2-hopf", r.strongly_two_hopf),
        ("austere", r.austere),
        ("levi-flat", r.levi_flat),
        ("ruled", r.ruled),
        ("cmc", r.cmc),
    ] {
        s += &format!("  {k:20} {}\n", yes(v));
    }
    s += &format!("  mean curvature       {:.6} (spread {:.2e})\n", r.mean_curvature, r.mean_curvature_spread);
    s += "  residuals\n";
    for (k, v) in &r.residuals {
        s += &format!("    {k:24} {v:.3e}\n");
    }
    s
}

fn cmd_classify(a: ClassifyArgs) -> Result<bool> {
    let grid = triple(&a.grid)?;
    let tol: Tolerances = a.tol.overrides().resolve()?;
    let (title, patch, expected) = load_source(&a.source)?;
    let report = classify(&patch, &patch.grid(grid), &tol)?;
    let mismatches = expected.map(|e| e.mismatches(&report, CATALOG_TOL)).unwrap_or_default();
    let json = serde_json::to_string_pretty(&report)? + "\n";
    let mut so = std::io::stdout().lock();
    if a.json {
        so.write_all(json.as_bytes())?;
    } else {
        so.write_all(render_classification(&title, &report).as_bytes())?;
        for m in &mismatches {
            writeln!(so, "  expectation mismatch: {m}")?;
        }
    }
    if let Some(p) = &a.out {
        scene::write_file(p, json.as_bytes())?;
    }
    Ok(mismatches.is_empty())
}

fn cmd_hopf(a: HopfArgs) -> Result<bool> {
    let label: ActionLabel = a.action.parse()?;
    let c = a.c.unwrap_or(label.default_curvature());
    let spec = PolarActionSpec::new(label, c)?;
    if a.samples < 90 {
        bail!("invalid --samples: need at least 90, got {}", a.samples);
    }
    if !(a.tol > 0.0) {
        bail!("invalid --tol: must be positive, got {}", a.tol);
    }
    let point = pair("point", &a.point)?;
    let y = spec.section.coords_to_y(point);
    if !spec.is_regular(&spec.section.lift(&y)) {
        bail!("point {:?} is not a regular point of {label}", a.point);
    }
    let dirs = spec.hopf_directions(&y, a.samples, a.tol)?;
    let profile = spec.phi_profile(&y, a.samples)?;
    let max = profile.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let mut so = std::io::stdout().lock();
    if a.json {
        let doc = serde_json::json!({ "action": label.cli_name(), "c": c, "point": a.point, "samples": a.samples, "phi_max": max, "directions": dirs });
        writeln!(so, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        writeln!(so, "{} zero directions at {:?} (max |phi| {:.4e})", dirs.len(), a.point, max)?;
        for d in &dirs {
            writeln!(so, "  theta {:.10}  |phi| {:.2e}", d.theta, d.phi.abs())?;
        }
    }
    if let Some(p) = &a.profile {
        let mut buf = Vec::new();
        scene::write_profile(&mut buf, &profile)?;
        scene::write_file(p, &buf)?;
        if let Some(s) = &a.plot {
            scene::write_file(s, scene::profile_script(p).as_bytes())?;
        }
    }
    Ok(true)
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let suite: SuiteName = a.suite.parse().map_err(|e| {
        let names: Vec<&str> = SuiteName::ALL.iter().map(|s| s.as_str()).collect();
        anyhow::anyhow!("{e}; expected one of {}", names.join(", "))
    })?;
    let seed = match a.seed {
        Some(s) => s,
        None => config::seed_from_env()?.unwrap_or(0),
    };
    let report = suites::run(suite, seed);
    let json = serde_json::to_string_pretty(&report)? + "\n";
    let mut so = std::io::stdout().lock();
    if a.json {
        so.write_all(json.as_bytes())?;
    } else {
        so.write_all(suites::render_table(&report).as_bytes())?;
    }
    if let Some(p) = &a.out {
        scene::write_file(p, json.as_bytes())?;
    }
    Ok(report.passed)
}

fn cmd_sample(a: SampleArgs) -> Result<bool> {
    let grid = triple(&a.grid)?;
    let (_, patch, _) = load_source(&a.source)?;
    let rows = sample_mesh(&patch, grid)?;
    let mut buf = Vec::new();
    scene::write_mesh(&mut buf, &rows)?;
    match &a.out {
        Some(p) => scene::write_file(p, &buf)?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    Ok(true)
}
