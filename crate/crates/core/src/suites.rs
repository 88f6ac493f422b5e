//! Invariant suites behind `hopflab verify`.
//!
//! Every suite is a list of named checks, each a worst-case residual compared
//! with a fixed tolerance. Random sampling is seeded, so a suite run is a pure
//! function of its seed.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::{ActionLabel, PolarActionSpec};
use crate::ambient::{cscale, AmbientPoint, AmbientTangent, SpaceForm, C3};
use crate::catalog::{self, CatalogEntry};
use crate::constructor::{
    austere_search, construct, integrate_sigma_symmetric, build_hypersurface, law_certify, levi_flat_cmc_certify,
    strongly_2hopf_certify, AustereCurve, CertifyOptions, CurveLaw, EquivariantHypersurface, SectionGrid,
};
use crate::error::{GeometryError, Result};
use crate::fd;
use crate::hypersurface::{
    classify, verify_gauss_codazzi, ConnectionModel, GaussCodazziOptions, HypersurfacePatch, Tolerances,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Ambient,
    Actions,
    Frames,
    Connection,
    GaussCodazzi,
    Austere,
    Cmc,
    LeviFlat,
    All,
}

impl SuiteName {
    pub const ALL: [SuiteName; 9] = [
        SuiteName::Ambient,
        SuiteName::Actions,
        SuiteName::Frames,
        SuiteName::Connection,
        SuiteName::GaussCodazzi,
        SuiteName::Austere,
        SuiteName::Cmc,
        SuiteName::LeviFlat,
        SuiteName::All,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Ambient => "ambient",
            SuiteName::Actions => "actions",
            SuiteName::Frames => "frames",
            SuiteName::Connection => "connection",
            SuiteName::GaussCodazzi => "gauss-codazzi",
            SuiteName::Austere => "austere",
            SuiteName::Cmc => "cmc",
            SuiteName::LeviFlat => "levi-flat",
            SuiteName::All => "all",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL.iter().find(|n| n.as_str() == s).copied().ok_or_else(|| GeometryError::UnknownSuite(s.to_string()))
    }
}

/// How a check compares its value with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when `value < tolerance`.
    Below,
    /// Passes when `value > tolerance` (negative controls, nondegeneracy).
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: SuiteName,
    pub name: String,
    #[serde(with = "crate::serde_f64")]
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl Check {
    fn below(suite: SuiteName, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { suite, name: name.into(), value, tolerance, comparison: Comparison::Below, passed: value < tolerance, detail: None }
    }

    fn above(suite: SuiteName, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { suite, name: name.into(), value, tolerance, comparison: Comparison::Above, passed: value > tolerance, detail: None }
    }

    /// Boolean check, recorded as value 1 (true) or 0 (false) against 0.5.
    fn flag(suite: SuiteName, name: impl Into<String>, ok: bool, detail: Option<String>) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Check { detail, ..Check::above(suite, name, v, 0.5) }
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    fn failed(suite: SuiteName, name: impl Into<String>, err: impl fmt::Display) -> Self {
        Check::flag(suite, name, false, Some(err.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: SuiteName,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs `name` (every suite for [`SuiteName::All`]).
pub fn run(name: SuiteName, seed: u64) -> SuiteReport {
    let checks = match name {
        SuiteName::All => SuiteName::ALL[..8].iter().flat_map(|s| run_one(*s, seed)).collect(),
        s => run_one(s, seed),
    };
    SuiteReport { schema_version: REPORT_SCHEMA_VERSION, suite: name, seed, passed: checks.iter().all(|c| c.passed), checks }
}

fn run_one(name: SuiteName, seed: u64) -> Vec<Check> {
    // each suite draws from its own stream
    let rng = |k: u64| ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ k);
    match name {
        SuiteName::Ambient => ambient_suite(&mut rng(1)),
        SuiteName::Actions => actions_suite(&mut rng(2)),
        SuiteName::Frames => frames_suite(),
        SuiteName::Connection => connection_suite(),
        SuiteName::GaussCodazzi => gauss_codazzi_suite(seed),
        SuiteName::Austere => austere_suite(),
        SuiteName::Cmc => cmc_suite(),
        SuiteName::LeviFlat => levi_flat_suite(),
        SuiteName::All => unreachable!(),
    }
}

// ---------------------------------------------------------------- sampling

/// Random unit horizontal vector at `p`.
pub fn random_unit(space: &SpaceForm, p: &AmbientPoint, rng: &mut impl Rng) -> C3 {
    let b = space.horizontal_basis(p);
    let v: C3 = b.iter().map(|e| cscale(e, rng.random_range(-1.0..1.0f64).into())).sum();
    cscale(&v, (1.0 / space.norm(&v)).into())
}

/// Random point within distance `0.9·R` of the origin (inside the injectivity radius of `CP²`).
pub fn random_point(space: &SpaceForm, rng: &mut impl Rng) -> AmbientPoint {
    let o = space.origin();
    let v = random_unit(space, &o, rng);
    let t = rng.random_range(0.05..0.9) * space.radius();
    let p = space.exp_vec(&o, &v, t);
    space.point(p.rep).unwrap_or(p)
}

/// Unit vector orthogonal to `x` and `Jx`.
fn random_totally_real(space: &SpaceForm, p: &AmbientPoint, x: &C3, rng: &mut impl Rng) -> C3 {
    let y = random_unit(space, p, rng);
    let y = y - cscale(x, space.herm(&y, x));
    cscale(&y, (1.0 / space.norm(&y)).into())
}

/// Curvature `⟨R(X,Y)Y,X⟩` at `p` from the coordinate metric of the chart
/// `x ↦ [p + Σ xₖ bₖ]`, by finite differences.
pub fn fd_sectional_curvature(space: &SpaceForm, p: &AmbientPoint, x: &C3, y: &C3, h: f64) -> f64 {
    let b = space.horizontal_basis(p);
    let metric = |u: &[f64]| chart_metric_j(space, p, &b, u).0;
    let r = fd::riemann(&metric, &[0.0; 4], h);
    let coords = |v: &C3| -> Vec<f64> { b.iter().map(|e| space.g(v, e)).collect() };
    let (cx, cy) = (coords(x), coords(y));
    fd::eval4(&r, 4, &cx, &cy, &cy, &cx)
}

/// Coordinate metric and complex structure of the chart `x ↦ [p + Σ xₖ bₖ]`.
fn chart_metric_j(space: &SpaceForm, p: &AmbientPoint, b: &[C3; 4], u: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let q: C3 = p.rep + b.iter().zip(u).map(|(e, t)| cscale(e, (*t).into())).sum::<C3>();
    let s2 = space.kappa() / space.herm(&q, &q).re;
    let phi = cscale(&q, s2.sqrt().into());
    let hb: Vec<C3> = b.iter().map(|e| space.horizontal(&phi, e)).collect();
    let g = DMatrix::from_fn(4, 4, |i, j| s2 * space.g(&hb[i], &hb[j]));
    // J∂ⱼ = Σ Jⁱⱼ ∂ᵢ, solved through the metric
    let gij = DMatrix::from_fn(4, 4, |l, j| s2 * space.g(&hb[l], &cscale(&hb[j], Complex64::i())));
    let jm = g.clone().try_inverse().unwrap_or_else(|| DMatrix::zeros(4, 4)) * gij;
    (g, jm)
}

/// `|∇_v J|` at `p` from finite-difference Christoffel symbols of the chart metric.
pub fn fd_kahler_defect(space: &SpaceForm, p: &AmbientPoint, v: &C3, h: f64) -> f64 {
    let b = space.horizontal_basis(p);
    let metric = |u: &[f64]| chart_metric_j(space, p, &b, u).0;
    let jf = |u: &[f64]| chart_metric_j(space, p, &b, u).1;
    let x0 = [0.0; 4];
    let gamma = fd::christoffel(&metric, &x0, h);
    let dj = fd::gradient(&jf, &x0, h);
    let j0 = jf(&x0);
    let coords: Vec<f64> = b.iter().map(|e| space.g(v, e)).collect();
    let mut out = DMatrix::zeros(4, 4);
    for k in 0..4 {
        let gk = DMatrix::from_fn(4, 4, |i, l| gamma[i][(k, l)]);
        out += (&dj[k] + &gk * &j0 - &j0 * &gk) * coords[k];
    }
    out.norm()
}

// ----------------------------------------------------------------- ambient

fn ambient_suite(rng: &mut ChaCha8Rng) -> Vec<Check> {
    const S: SuiteName = SuiteName::Ambient;
    let mut out = Vec::new();
    for c in [4.0, -4.0] {
        let space = SpaceForm::new(c).expect("nonzero curvature");
        let (mut hol, mut hol_fd, mut real, mut norm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..50 {
            let p = random_point(&space, rng);
            norm = norm.max(space.normalization_defect(&p));
            let x = random_unit(&space, &p, rng);
            let jx = cscale(&x, Complex64::i());
            let y = random_totally_real(&space, &p, &x, rng);
            hol = hol.max((space.curvature_form(&x, &jx, &jx, &x) - c).abs());
            real = real.max((space.curvature_form(&x, &y, &y, &x) - c / 4.0).abs());
            hol_fd = hol_fd.max((fd_sectional_curvature(&space, &p, &x, &jx, 1e-2) - c).abs() / c.abs());
        }
        let tag = if c > 0.0 { "cp2" } else { "ch2" };
        out.push(Check::below(S, format!("{tag}.normalization"), norm, 1e-10));
        out.push(Check::below(S, format!("{tag}.holomorphic_curvature"), hol, 1e-8));
        out.push(Check::below(S, format!("{tag}.holomorphic_curvature_fd"), hol_fd, 1e-3));
        out.push(Check::below(S, format!("{tag}.totally_real_curvature"), real, 1e-8));

        // ∇J = 0 in the chart at points of random geodesics, along the velocity
        let mut kahler = 0.0f64;
        for _ in 0..20 {
            let p = random_point(&space, rng);
            let v = AmbientTangent { base: p, vec: random_unit(&space, &p, rng) };
            let t0 = rng.random_range(0.1..0.5);
            let vel = space.geodesic_velocity(&p, &v.vec, t0);
            let q = space.point(vel.base.rep).unwrap_or(vel.base);
            let vq = space.vec_at(&q, &vel).unwrap_or(vel.vec);
            kahler = kahler.max(fd_kahler_defect(&space, &q, &vq, 1e-3));
        }
        out.push(Check::below(S, format!("{tag}.kahler_identity"), kahler, 1e-6));
    }
    out
}

// ----------------------------------------------------------------- actions

fn actions_suite(rng: &mut ChaCha8Rng) -> Vec<Check> {
    const S: SuiteName = SuiteName::Actions;
    let mut out = Vec::new();
    for label in ActionLabel::ALL {
        let spec = PolarActionSpec::standard(label);
        let ch = &spec.section;
        let space = spec.ambient;
        let iso = spec.generators.iter().map(|g| (g.adjoint() * space.hermitian_matrix() + space.hermitian_matrix() * g).norm()).fold(0.0, f64::max);
        out.push(Check::below(S, format!("{label}.generators_skew"), iso, 1e-12));

        let (mut treal, mut second, mut killing) = (0.0f64, 0.0f64, 0.0f64);
        let mut n = 0;
        while n < 20 {
            let u = [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)];
            let y = ch.coords_to_y(u);
            if !spec.is_regular(&ch.lift(&y)) {
                continue;
            }
            n += 1;
            let [e1, e2] = ch.frame_at(&y);
            let (t1, t2) = (ch.lift_tangent(&y, &e1), ch.lift_tangent(&y, &e2));
            let jt1 = space.complex_structure(&t1);
            treal = treal.max(space.g(&jt1.vec, &t2.vec).abs());
            // section geodesics are ambient geodesics
            let w = ch.direction(&y, rng.random_range(0.0..std::f64::consts::TAU));
            let curve = |t: f64| ch.lift(&ch.geodesic(&y, &w, t).0);
            let vel = |t: f64| {
                let (yy, vv) = ch.geodesic(&y, &w, t);
                ch.lift_tangent(&yy, &vv)
            };
            let acc = space.covariant_derivative(&curve, &vel, 0.0, 1e-4);
            second = second.max(space.norm(&acc.vec));
            for g in 0..spec.generators.len() {
                if let Ok(k) = spec.killing_field(g, &ch.lift(&y)) {
                    let kv = space.vec_at(&t1.base, &k).unwrap_or(k.vec);
                    killing = killing.max(space.g(&kv, &t1.vec).abs()).max(space.g(&kv, &t2.vec).abs());
                }
            }
        }
        out.push(Check::below(S, format!("{label}.section_totally_real"), treal, 1e-8));
        out.push(Check::below(S, format!("{label}.section_second_fundamental_form"), second, 1e-6));
        out.push(Check::below(S, format!("{label}.killing_orthogonal_to_section"), killing, 1e-8));

        // obstruction map: never identically zero, even and stable zero count
        let (mut min_max, mut parity_ok, mut stable) = (f64::INFINITY, true, true);
        let mut n = 0;
        let mut counts = Vec::new();
        while n < 5 {
            let u = [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)];
            let y = ch.coords_to_y(u);
            if !spec.is_regular(&ch.lift(&y)) {
                continue;
            }
            n += 1;
            match (spec.phi_profile(&y, 720), spec.hopf_directions(&y, 720, 1e-6), spec.hopf_directions(&y, 1440, 1e-6)) {
                (Ok(prof), Ok(a), Ok(b)) => {
                    min_max = min_max.min(prof.iter().map(|p| p.1.abs()).fold(0.0, f64::max));
                    parity_ok &= a.len() % 2 == 0;
                    stable &= a.len() == b.len();
                    counts.push(a.len());
                }
                _ => {
                    min_max = 0.0;
                    parity_ok = false;
                }
            }
        }
        out.push(Check::above(S, format!("{label}.phi_max"), min_max, 1e-6));
        out.push(Check::flag(S, format!("{label}.phi_zero_count_even"), parity_ok, Some(format!("{counts:?}"))));
        out.push(Check::flag(S, format!("{label}.phi_zero_count_stable"), stable, None));
    }
    out
}

// ------------------------------------------------------------------ frames

/// Catalog expectations, the Hopf relation and adapted-frame identities.
fn frames_suite() -> Vec<Check> {
    const S: SuiteName = SuiteName::Frames;
    let tol = Tolerances::default();
    let entries = match catalog::all() {
        Ok(e) => e,
        Err(e) => return vec![Check::failed(S, "catalog", e)],
    };
    let mut out = Vec::new();
    for entry in &entries {
        let name = &entry.name;
        let report = match classify(&entry.patch, &entry.patch.grid([5, 2, 2]), &tol) {
            Ok(r) => r,
            Err(e) => {
                out.push(Check::failed(S, format!("{name}.classify"), e));
                continue;
            }
        };
        let miss = entry.expected.mismatches(&report, 1e-4);
        out.push(Check::flag(S, format!("{name}.expected_classification"), miss.is_empty(), (!miss.is_empty()).then(|| miss.join("; "))));
        if report.hopf {
            let rel = report
                .points
                .iter()
                .map(|p| entry.patch.hopf_cmc_relation_check(p.params, tol.tau_proj).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            out.push(Check::below(S, format!("{name}.hopf_relation"), rel, 1e-6));
            out.push(Check::below(S, format!("{name}.spectrum_spread"), report.residuals["spectrum_spread"], 1e-4));
        }
        if report.h == 2 {
            let id = report.residuals.get("frame_identity").copied().unwrap_or(f64::INFINITY);
            out.push(Check::below(S, format!("{name}.frame_identity"), id, 1e-6));
        }
    }
    out
}

// -------------------------------------------------------------- connection

/// CMC(η = 1) construction used by several suites: launched at a fixed section
/// point in the direction of largest `|Φ|`.
pub fn standard_cmc(spec: &PolarActionSpec, eta: f64) -> Result<EquivariantHypersurface> {
    let u = STANDARD_LAUNCH;
    let y = spec.section.coords_to_y(u);
    let prof = spec.phi_profile(&y, 720)?;
    let theta = prof.iter().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map_or(0.0, |p| p.0);
    construct(spec, u, theta, CurveLaw::Cmc { eta }, 1e-3, 0.2, 0.3)
}

/// Section coordinates of the standard launch point.
pub const STANDARD_LAUNCH: [f64; 2] = [0.3, 0.5];

fn connection_suite() -> Vec<Check> {
    const S: SuiteName = SuiteName::Connection;
    let mut out = Vec::new();
    // general strongly 2-Hopf table on the austere catalog entries
    for name in [catalog::CatalogName::Lohnherr, catalog::CatalogName::Bisector, catalog::CatalogName::CliffordConeCp2, catalog::CatalogName::CliffordConeCh2] {
        match catalog::build(name, &Default::default()) {
            Ok(e) => out.push(connection_check(S, &e.name, &e.patch)),
            Err(e) => out.push(Check::failed(S, format!("{name}.build"), e)),
        }
    }
    let results: Vec<Vec<Check>> = ActionLabel::ALL
        .par_iter()
        .map(|label| {
            let spec = PolarActionSpec::standard(*label);
            match standard_cmc(&spec, 1.0) {
                Ok(ehs) => {
                    let mut v = vec![connection_check(S, &format!("{label}.cmc"), &ehs.patch)];
                    let opts = CertifyOptions { grid: [3, 2, 2], ..CertifyOptions::default() };
                    match strongly_2hopf_certify(&ehs, &opts) {
                        Ok(cert) => {
                            for (k, tol) in [("nabla_a_a", 1e-4), ("leaf_curvature", 1e-3), ("leaf_totally_real", 1e-6)] {
                                let val = cert.residuals.get(k).copied().unwrap_or(f64::INFINITY);
                                v.push(Check::below(S, format!("{label}.cmc.{k}"), val, tol));
                            }
                        }
                        Err(e) => v.push(Check::failed(S, format!("{label}.cmc.certify"), e)),
                    }
                    v
                }
                Err(e) => vec![Check::failed(S, format!("{label}.construct"), e)],
            }
        })
        .collect();
    out.extend(results.into_iter().flatten());
    out
}

fn connection_check(suite: SuiteName, name: &str, patch: &HypersurfacePatch) -> Check {
    let pts = patch.grid([3, 2, 1]);
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for x in &pts {
        match crate::hypersurface::verify_connection_formulas(patch, *x, ConnectionModel::StronglyTwoHopf, 1e-3) {
            Ok(r) if r.skipped.is_some() => skipped += 1,
            Ok(r) => worst = worst.max(r.max_residual),
            Err(_) => worst = f64::INFINITY,
        }
    }
    if skipped == pts.len() {
        worst = f64::INFINITY;
    }
    Check::below(suite, format!("{name}.connection_table"), worst, 1e-3).with_detail(format!("{} points, {skipped} skipped", pts.len()))
}

// ----------------------------------------------------------- gauss-codazzi

/// Gauss and Codazzi residuals over every catalog entry and constructed CMC patch,
/// with a perturbed shape operator as negative control.
fn gauss_codazzi_suite(seed: u64) -> Vec<Check> {
    const S: SuiteName = SuiteName::GaussCodazzi;
    let mut patches: Vec<(String, HypersurfacePatch)> = Vec::new();
    match catalog::all() {
        Ok(es) => patches.extend(es.into_iter().map(|e: CatalogEntry| (e.name, e.patch))),
        Err(e) => return vec![Check::failed(S, "catalog", e)],
    }
    for label in ActionLabel::ALL {
        let spec = PolarActionSpec::standard(label);
        match standard_cmc(&spec, 1.0) {
            Ok(ehs) => patches.push((format!("{label}.cmc"), ehs.patch)),
            Err(e) => return vec![Check::failed(S, format!("{label}.construct"), e)],
        }
    }
    let opts = GaussCodazziOptions { probes: 20, seed, shape_perturbation: 0.0 };
    let bad = GaussCodazziOptions { shape_perturbation: 0.2, ..opts };
    patches
        .par_iter()
        .map(|(name, patch)| {
            let mut worst = 0.0f64;
            let mut control = f64::INFINITY;
            for x in patch.grid([2, 1, 1]) {
                match (verify_gauss_codazzi(patch, x, 1e-4, &opts), verify_gauss_codazzi(patch, x, 1e-4, &bad)) {
                    (Ok(r), Ok(b)) => {
                        worst = worst.max(r.gauss).max(r.codazzi);
                        control = control.min(b.gauss.max(b.codazzi));
                    }
                    _ => {
                        worst = f64::INFINITY;
                        control = 0.0;
                    }
                }
            }
            vec![Check::below(S, format!("{name}.residual"), worst, 1e-4), Check::above(S, format!("{name}.corrupted_control"), control, 1e-2)]
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

// ----------------------------------------------------------------- austere

/// Expected number of curves from [`austere_search`] on the default grid.
pub fn expected_austere_curves(label: ActionLabel) -> std::ops::RangeInclusive<usize> {
    match label {
        ActionLabel::Cp2Torus | ActionLabel::Ch2Torus => 1..=usize::MAX,
        ActionLabel::Ch2G0 | ActionLabel::Ch2LineG2a => 1..=1,
        ActionLabel::Ch2K0G2a => 0..=0,
    }
}

/// Worst austere residuals of `H·σ` for a found curve:
/// `(max |α+β|, max |γ|, levi, ruled, max |a − 1/√2|, max |b − 1/√2|)`.
pub fn austere_residuals(spec: &PolarActionSpec, curve: &AustereCurve) -> Result<[f64; 6]> {
    let ehs = build_hypersurface(spec, &curve.sigma, 0.2, 0.2)?;
    let report = classify(&ehs.patch, &ehs.patch.grid([10, 3, 3]), &Tolerances::default())?;
    let mut r = [0.0f64; 6];
    r[2] = report.residuals["levi_form"];
    r[3] = report.residuals["ruled"];
    for p in &report.points {
        let f = ehs.patch.adapted_frame(p.params)?;
        r[0] = r[0].max((f.alpha + f.beta).abs());
        r[1] = r[1].max(f.gamma.abs());
        r[4] = r[4].max((f.a - FRAC_1_SQRT_2).abs());
        r[5] = r[5].max((f.b - FRAC_1_SQRT_2).abs());
    }
    Ok(r)
}

fn austere_suite() -> Vec<Check> {
    const S: SuiteName = SuiteName::Austere;
    ActionLabel::ALL
        .par_iter()
        .map(|label| {
            let spec = PolarActionSpec::standard(*label);
            let found = match austere_search(&spec, &SectionGrid::default()) {
                Ok(f) => f,
                Err(e) => return vec![Check::failed(S, format!("{label}.search"), e)],
            };
            let want = expected_austere_curves(*label);
            let mut v = vec![Check::flag(
                S,
                format!("{label}.curve_count"),
                want.contains(&found.len()),
                Some(format!("{} curves", found.len())),
            )];
            let mut worst = [0.0f64; 6];
            for c in &found {
                match austere_residuals(&spec, c) {
                    Ok(r) => {
                        for k in 0..6 {
                            worst[k] = worst[k].max(r[k]);
                        }
                    }
                    Err(_) => worst = [f64::INFINITY; 6],
                }
            }
            if !found.is_empty() {
                let names = ["alpha_plus_beta", "gamma", "levi_form", "ruled", "a_minus_inv_sqrt2", "b_minus_inv_sqrt2"];
                let tols = [1e-3, 1e-3, 1e-3, 1e-3, 1e-4, 1e-4];
                for k in 0..6 {
                    v.push(Check::below(S, format!("{label}.{}", names[k]), worst[k], tols[k]));
                }
            }
            v
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

// --------------------------------------------------------------------- cmc

fn cmc_suite() -> Vec<Check> {
    const S: SuiteName = SuiteName::Cmc;
    let opts = CertifyOptions::default();
    ActionLabel::ALL
        .par_iter()
        .map(|label| {
            let spec = PolarActionSpec::standard(*label);
            let ehs = match standard_cmc(&spec, 1.0) {
                Ok(e) => e,
                Err(e) => return vec![Check::failed(S, format!("{label}.construct"), e)],
            };
            let mut v = Vec::new();
            match strongly_2hopf_certify(&ehs, &opts) {
                Ok(c) => {
                    let h2 = c.h_counts.keys().all(|&h| h == 2);
                    v.push(Check::flag(S, format!("{label}.h_equals_2"), h2, Some(format!("{:?}", c.h_counts))));
                    let get = |k: &str| c.residuals.get(k).copied().unwrap_or(f64::INFINITY);
                    v.push(Check::below(S, format!("{label}.integrability"), get("integrability"), 1e-5));
                    v.push(Check::below(S, format!("{label}.spectrum_derivative"), get("spectrum_derivative"), 1e-4));
                    v.push(Check::flag(S, format!("{label}.strongly_2hopf"), c.passed, (!c.passed).then(|| c.failures.join("; "))));
                }
                Err(e) => v.push(Check::failed(S, format!("{label}.certify"), e)),
            }
            match law_certify(&ehs, [10, 3, 3], &Tolerances::default()) {
                Ok((_, rep)) => {
                    v.push(Check::below(S, format!("{label}.mean_curvature_error"), (rep.mean_curvature - 1.0).abs(), 1e-3));
                    v.push(Check::below(S, format!("{label}.mean_curvature_spread"), rep.mean_curvature_spread, 1e-3));
                }
                Err(e) => v.push(Check::failed(S, format!("{label}.classify"), e)),
            }
            // launch inside w_p: a Hopf point at t = 0
            let y = spec.section.coords_to_y(STANDARD_LAUNCH);
            let h = spec.hopf_directions(&y, 720, 1e-6).and_then(|d| {
                let theta = d.first().ok_or(GeometryError::DegenerateObstruction(0.0))?.theta;
                let e = construct(&spec, STANDARD_LAUNCH, theta, CurveLaw::Cmc { eta: 1.0 }, 1e-3, 0.1, 0.2)?;
                e.patch.hopf_projection_count([0.0, 0.0, 0.0], Tolerances::default().tau_proj)
            });
            match h {
                Ok(h) => v.push(Check::flag(S, format!("{label}.wp_launch_h1"), h == 1, Some(format!("h = {h}")))),
                Err(e) => v.push(Check::failed(S, format!("{label}.wp_launch_h1"), e)),
            }
            v
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

// --------------------------------------------------------------- levi-flat

fn levi_flat_suite() -> Vec<Check> {
    const S: SuiteName = SuiteName::LeviFlat;
    let tol = Tolerances::default();
    ActionLabel::ALL
        .par_iter()
        .map(|label| {
            let spec = PolarActionSpec::standard(*label);
            let mut v = Vec::new();
            // generic Levi-flat construction
            match construct(&spec, STANDARD_LAUNCH, 0.7, CurveLaw::LeviFlat, 1e-3, 0.2, 0.2) {
                Ok(ehs) => {
                    match law_certify(&ehs, [10, 3, 3], &tol) {
                        Ok((_, rep)) => v.push(Check::below(S, format!("{label}.levi_form"), rep.residuals["levi_form"], 1e-3)),
                        Err(e) => v.push(Check::failed(S, format!("{label}.levi_form"), e)),
                    }
                    // Levi-flat with η = 1 is rejected
                    match levi_flat_cmc_certify(&ehs, 1.0, [10, 3, 3], &tol) {
                        Ok(c) => v.push(Check::flag(
                            S,
                            format!("{label}.nonminimal_rejected"),
                            !c.passed && c.failures.iter().any(|f| f.starts_with("spectrum_spread") || f.starts_with("levi_form")),
                            Some(c.failures.join("; ")),
                        )),
                        Err(e) => v.push(Check::failed(S, format!("{label}.nonminimal_rejected"), e)),
                    }
                }
                Err(e) => v.push(Check::failed(S, format!("{label}.construct"), e)),
            }
            // minimal Levi-flat: the Levi-flat law launched along an austere curve
            if let Ok(found) = austere_search(&spec, &SectionGrid::default()) {
                if let Some(c) = found.first() {
                    let y = spec.section.coords_to_y(c.start);
                    let d = nalgebra::Vector3::from(c.direction);
                    let res = integrate_sigma_symmetric(&spec, &y, &d, CurveLaw::LeviFlat, 1e-3, 300)
                        .and_then(|s| build_hypersurface(&spec, &s, 0.2, 0.2))
                        .and_then(|e| levi_flat_cmc_certify(&e, 0.0, [10, 3, 3], &tol));
                    match res {
                        Ok(cert) => {
                            let get = |k: &str| cert.residuals.get(k).copied().unwrap_or(f64::INFINITY);
                            v.push(Check::below(S, format!("{label}.minimal.gamma"), get("gamma_minus_eta_over_4"), 1e-3));
                            v.push(Check::below(S, format!("{label}.minimal.alpha_plus_beta"), get("alpha_plus_beta_minus_3eta_over_4"), 1e-3));
                            v.push(Check::flag(S, format!("{label}.minimal.certified"), cert.passed, (!cert.passed).then(|| cert.failures.join("; "))));
                        }
                        Err(e) => v.push(Check::failed(S, format!("{label}.minimal"), e)),
                    }
                }
            }
            v
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Plain-text table of a report.
pub fn render_table(report: &SuiteReport) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let op = match c.comparison {
            Comparison::Below => "<",
            Comparison::Above => ">",
        };
        s += &format!(
            "{:4} {:14} {:48} {:>12.4e} {} {:.1e}{}\n",
            if c.passed { "ok" } else { "FAIL" },
            c.suite.as_str(),
            c.name,
            c.value,
            op,
            c.tolerance,
            c.detail.as_ref().map(|d| format!("  [{d}]")).unwrap_or_default()
        );
    }
    let failed = report.failures().count();
    s += &format!("{} checks, {} failed\n", report.checks.len(), failed);
    s
}
