//! Equivariant construction `H·σ`: a curve in the section with prescribed
//! geodesic curvature, swept by the two-parameter group.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::{ActionLabel, PolarActionSpec};
use crate::ambient::{RealVec, C3};
use crate::error::{GeometryError, Result};
use crate::fd;
use crate::hypersurface::{
    classify, compare_connection, frame_jet, ClassificationReport, ConnectionModel, HypersurfacePatch, Tolerances,
};

/// Geodesic curvature prescribed for `σ` as a function of the orbit data at `(σ, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveLaw {
    Geodesic,
    /// Mean curvature `η` for the swept hypersurface.
    Cmc { eta: f64 },
    LeviFlat,
    /// Geodesic law used by the austere search.
    AusterePregeodesic,
}

/// Orbit quantities entering the laws, for the normal `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitScalars {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

impl CurveLaw {
    pub fn target(&self, o: &OrbitScalars) -> f64 {
        match *self {
            CurveLaw::Geodesic | CurveLaw::AusterePregeodesic => 0.0,
            CurveLaw::Cmc { eta } => eta - o.alpha - o.beta,
            CurveLaw::LeviFlat => -o.b * o.b * o.alpha - o.a * o.a * o.beta,
        }
    }

    /// Law satisfied by the same curve run backwards (normal flipped).
    pub fn reversed(&self) -> Self {
        match *self {
            CurveLaw::Cmc { eta } => CurveLaw::Cmc { eta: -eta },
            other => other,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CurveLaw::Geodesic => "geodesic",
            CurveLaw::Cmc { .. } => "cmc",
            CurveLaw::LeviFlat => "levi-flat",
            CurveLaw::AusterePregeodesic => "austere",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSample {
    pub t: f64,
    /// Section coordinates `y` (`yᵀεy = κ`).
    pub point: [f64; 3],
    pub velocity: [f64; 3],
    pub normal: [f64; 3],
    /// Achieved curvature `⟨σ̈, ξ⟩`.
    pub gamma: f64,
    pub orbit: OrbitScalars,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaCurve {
    pub action: ActionLabel,
    pub c: f64,
    pub law: CurveLaw,
    pub step: f64,
    /// Sorted by `t`.
    pub samples: Vec<SigmaSample>,
    /// Set when integration stopped early at the edge of the regular set.
    pub truncated: bool,
}

fn v3(a: &[f64; 3]) -> RealVec {
    RealVec::new(a[0], a[1], a[2])
}

fn arr(v: &RealVec) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

struct Ode<'a> {
    spec: &'a PolarActionSpec,
    law: CurveLaw,
}

impl Ode<'_> {
    fn scalars(&self, y: &RealVec, xi: &RealVec) -> Result<OrbitScalars> {
        let [alpha, beta, a, b] = self.spec.orbit_scalars(y, xi)?;
        Ok(OrbitScalars { alpha, beta, a, b })
    }

    /// Unit normal and orbit data at a (possibly slightly off-shell) state.
    fn frame(&self, y: &RealVec, v: &RealVec) -> Result<(RealVec, RealVec, f64, OrbitScalars)> {
        let ch = &self.spec.section;
        let yn = ch.normalize(y).ok_or(GeometryError::Normalization(ch.dot(y, y)))?;
        let vt = ch.tangent_part(&yn, v);
        let speed2 = ch.dot(&vt, &vt);
        let xi = ch.rot(&yn, &vt) / speed2.sqrt();
        let o = self.scalars(&yn, &xi)?;
        Ok((yn, xi, speed2, o))
    }

    fn rhs(&self, y: &RealVec, v: &RealVec) -> Result<(RealVec, RealVec)> {
        let ch = &self.spec.section;
        let (_, xi, speed2, o) = self.frame(y, v)?;
        let acc = -y * (ch.dot(v, v) / self.spec.ambient.kappa()) + xi * (self.law.target(&o) * speed2);
        Ok((*v, acc))
    }

    fn step(&self, y: &RealVec, v: &RealVec, h: f64) -> Result<(RealVec, RealVec)> {
        let (k1y, k1v) = self.rhs(y, v)?;
        let (k2y, k2v) = self.rhs(&(y + k1y * (h / 2.0)), &(v + k1v * (h / 2.0)))?;
        let (k3y, k3v) = self.rhs(&(y + k2y * (h / 2.0)), &(v + k2v * (h / 2.0)))?;
        let (k4y, k4v) = self.rhs(&(y + k3y * h), &(v + k3v * h))?;
        let y1 = y + (k1y + k2y * 2.0 + k3y * 2.0 + k4y) * (h / 6.0);
        let v1 = v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        self.renormalize(&y1, &v1)
    }

    fn renormalize(&self, y: &RealVec, v: &RealVec) -> Result<(RealVec, RealVec)> {
        let ch = &self.spec.section;
        let yn = ch.normalize(y).ok_or(GeometryError::Normalization(ch.dot(y, y)))?;
        let vt = ch.tangent_part(&yn, v);
        Ok((yn, ch.unit(&vt)))
    }

    fn sample(&self, t: f64, y: &RealVec, v: &RealVec) -> Result<SigmaSample> {
        let (yn, xi, _, o) = self.frame(y, v)?;
        Ok(SigmaSample {
            t,
            point: arr(&yn),
            velocity: arr(v),
            normal: arr(&xi),
            gamma: self.law.target(&o),
            orbit: o,
        })
    }

    /// Samples at `t = k h`, `k = 0..=n`, stopping when the regular set is left.
    fn run(&self, y0: &RealVec, w0: &RealVec, h: f64, n: usize) -> Result<(Vec<SigmaSample>, bool)> {
        let mut out = vec![self.sample(0.0, y0, w0)?];
        let (mut y, mut v) = (*y0, *w0);
        for k in 1..=n {
            let next = self.step(&y, &v, h).and_then(|(y1, v1)| self.sample(k as f64 * h, &y1, &v1).map(|s| (y1, v1, s)));
            match next {
                Ok((y1, v1, s)) => {
                    y = y1;
                    v = v1;
                    out.push(s);
                }
                Err(_) => {
                    if k == 1 {
                        return Err(GeometryError::RegularityLost);
                    }
                    return Ok((out, true));
                }
            }
        }
        Ok((out, false))
    }
}

fn check_initial(spec: &PolarActionSpec, p0: &RealVec, w0: &RealVec, step: f64) -> Result<(RealVec, RealVec)> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!("step must be positive, got {step}")));
    }
    let ch = &spec.section;
    let y = ch.normalize(p0).ok_or(GeometryError::Normalization(ch.dot(p0, p0)))?;
    let tang = ch.dot(&y, w0).abs() / spec.ambient.kappa().abs().sqrt();
    let unit = (ch.dot(w0, w0) - 1.0).abs();
    if tang > 1e-8 || unit > 1e-8 {
        return Err(GeometryError::InvalidParameter(format!(
            "initial direction must be a unit section tangent (tangency {tang:.2e}, norm defect {unit:.2e})"
        )));
    }
    let det = spec.killing_gram(&ch.lift(&y)).determinant();
    if !spec.is_regular(&ch.lift(&y)) {
        return Err(GeometryError::Singular(det));
    }
    Ok((y, *w0))
}

/// Integrates `σ̈ = γ_law ξ` forward from `p0` for `n_steps` steps of size `step`.
pub fn integrate_sigma(
    spec: &PolarActionSpec,
    p0: &RealVec,
    w0: &RealVec,
    law: CurveLaw,
    step: f64,
    n_steps: usize,
) -> Result<SigmaCurve> {
    let (y, w) = check_initial(spec, p0, w0, step)?;
    let ode = Ode { spec, law };
    let (samples, truncated) = ode.run(&y, &w, step, n_steps)?;
    Ok(SigmaCurve { action: spec.label, c: spec.ambient.c(), law, step, samples, truncated })
}

/// Same ODE integrated `n_each` steps in both time directions from `p0`.
pub fn integrate_sigma_symmetric(
    spec: &PolarActionSpec,
    p0: &RealVec,
    w0: &RealVec,
    law: CurveLaw,
    step: f64,
    n_each: usize,
) -> Result<SigmaCurve> {
    let (y, w) = check_initial(spec, p0, w0, step)?;
    let ode = Ode { spec, law };
    let (fwd, tf) = ode.run(&y, &w, step, n_each)?;
    let (bwd, tb) = ode.run(&y, &w, -step, n_each)?;
    let mut samples: Vec<SigmaSample> = bwd.into_iter().skip(1).rev().collect();
    samples.extend(fwd);
    Ok(SigmaCurve { action: spec.label, c: spec.ambient.c(), law, step, samples, truncated: tf || tb })
}

impl SigmaCurve {
    pub fn t_range(&self) -> [f64; 2] {
        [self.samples.first().map_or(0.0, |s| s.t), self.samples.last().map_or(0.0, |s| s.t)]
    }

    /// `(y, σ̇)` at `t` by a partial step from the nearest sample.
    pub fn state(&self, spec: &PolarActionSpec, t: f64) -> Result<(RealVec, RealVec)> {
        if self.samples.is_empty() {
            return Err(GeometryError::InvalidParameter("empty curve".into()));
        }
        let i = self.samples.partition_point(|s| s.t < t);
        let k = if i == 0 {
            0
        } else if i >= self.samples.len() {
            self.samples.len() - 1
        } else if (self.samples[i].t - t).abs() < (t - self.samples[i - 1].t).abs() {
            i
        } else {
            i - 1
        };
        let s = &self.samples[k];
        let (y, v) = (v3(&s.point), v3(&s.velocity));
        let dt = t - s.t;
        if dt == 0.0 {
            return Ok((y, v));
        }
        Ode { spec, law: self.law }.step(&y, &v, dt)
    }
}

/// `H·σ` with its patch `Ψ(t, s₁, s₂) = exp(s₁G₁ + s₂G₂)·σ(t)`.
#[derive(Debug, Clone)]
pub struct EquivariantHypersurface {
    pub spec: PolarActionSpec,
    pub sigma: SigmaCurve,
    pub patch: HypersurfacePatch,
}

/// Distance kept between the parameter box and the ends of `σ`.
const T_MARGIN: f64 = 0.05;
const INJECTIVITY_GRID: [usize; 3] = [5, 5, 5];
/// Smallest `min(a, b)` kept inside the box when `σ(0)` itself stays above it;
/// the adapted frame degenerates as `a` or `b` goes to zero.
const AB_MIN: f64 = 0.3;

/// Largest interval around `t = 0` on which `min(a, b) ≥ AB_MIN`, when `σ(0)` satisfies it.
fn frame_window(sigma: &SigmaCurve) -> [f64; 2] {
    let ab = |s: &SigmaSample| s.orbit.a.abs().min(s.orbit.b.abs());
    let Some(k0) = sigma.samples.iter().position(|s| s.t == 0.0) else { return sigma.t_range() };
    if ab(&sigma.samples[k0]) < AB_MIN {
        return sigma.t_range();
    }
    let s = &sigma.samples;
    let hi = s[k0..].iter().take_while(|x| ab(x) >= AB_MIN).last().map_or(0.0, |x| x.t);
    let lo = s[..=k0].iter().rev().take_while(|x| ab(x) >= AB_MIN).last().map_or(0.0, |x| x.t);
    [lo, hi]
}

/// Sweeps `sigma` by the group on `t ∈ [-t_half, t_half] ∩ samples`, `s ∈ [-s_extent, s_extent]²`.
pub fn build_hypersurface(
    spec: &PolarActionSpec,
    sigma: &SigmaCurve,
    t_half: f64,
    s_extent: f64,
) -> Result<EquivariantHypersurface> {
    if sigma.samples.len() < 2 {
        return Err(GeometryError::InvalidParameter("curve has fewer than two samples".into()));
    }
    if !(t_half > 0.0 && s_extent > 0.0) {
        return Err(GeometryError::InvalidParameter("box half-widths must be positive".into()));
    }
    let [t0, t1] = sigma.t_range();
    let [f0, f1] = frame_window(sigma);
    let lo = (-t_half).max(t0 + T_MARGIN).max(f0);
    let hi = t_half.min(t1 - T_MARGIN).min(f1);
    if !(hi > lo) {
        return Err(GeometryError::RegularityLost);
    }
    let spec_c = spec.clone();
    let curve = sigma.clone();
    let chart = spec.section;
    let gens = spec.generators.clone();
    let map = Arc::new(move |x: [f64; 3]| -> C3 {
        match curve.state(&spec_c, x[0]) {
            Ok((y, _)) => {
                let m = (gens[0] * Complex64::from(x[1]) + gens[1] * Complex64::from(x[2])).exp();
                m * chart.lift(&y).rep
            }
            Err(_) => C3::repeat(Complex64::from(f64::NAN)),
        }
    });
    let name = format!("{}-{}", spec.label.cli_name(), sigma.law.name());
    let patch = HypersurfacePatch::new(name, spec.ambient, [[lo, hi], [-s_extent, s_extent], [-s_extent, s_extent]], map);
    let tc = 0.5 * (lo + hi);
    let (yc, vc) = sigma.state(spec, tc)?;
    let xi = chart.lift_tangent(&yc, &chart.rot(&yc, &vc));
    let patch = patch.oriented_along([tc, 0.0, 0.0], |p| {
        let lam = spec.ambient.align_phase(&xi.base.rep, &p.rep);
        xi.vec * lam
    })?;
    for s in sigma.samples.iter().filter(|s| s.t >= lo && s.t <= hi).step_by(10) {
        patch.jet1([s.t, 0.0, 0.0])?;
        if !spec.is_regular(&chart.lift(&v3(&s.point))) {
            return Err(GeometryError::RegularityLost);
        }
    }
    let pts: Vec<C3> = patch.grid(INJECTIVITY_GRID).iter().map(|x| patch.point(*x).map(|p| p.rep)).collect::<Result<_>>()?;
    let mut closest = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = spec.ambient.distance(&crate::AmbientPoint { rep: pts[i] }, &crate::AmbientPoint { rep: pts[j] });
            closest = closest.min(d);
        }
    }
    if !(closest > 1e-6) {
        return Err(GeometryError::NotInjective(closest));
    }
    Ok(EquivariantHypersurface { spec: spec.clone(), sigma: sigma.clone(), patch })
}

/// Integrates from section coordinates `u` at angle `theta` and sweeps.
pub fn construct(
    spec: &PolarActionSpec,
    u: [f64; 2],
    theta: f64,
    law: CurveLaw,
    step: f64,
    t_half: f64,
    s_extent: f64,
) -> Result<EquivariantHypersurface> {
    let y = spec.section.coords_to_y(u);
    let w = spec.section.direction(&y, theta);
    let n = ((t_half + 2.0 * T_MARGIN) / step).ceil() as usize;
    let sigma = integrate_sigma_symmetric(spec, &y, &w, law, step, n)?;
    build_hypersurface(spec, &sigma, t_half, s_extent)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub grid: [usize; 3],
    pub tolerances: Tolerances,
    /// Points along `σ` used for the connection, leaf and `∇_A A` checks.
    pub structure_points: usize,
    pub connection_tol: f64,
    pub nabla_aa_tol: f64,
    pub leaf_curvature_tol: f64,
    pub totally_real_tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            grid: [20, 5, 5],
            tolerances: Tolerances::default(),
            structure_points: 5,
            connection_tol: 1e-3,
            nabla_aa_tol: 1e-4,
            leaf_curvature_tol: 1e-3,
            totally_real_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub bounds: [[f64; 2]; 3],
    pub grid: [usize; 3],
    pub h_counts: BTreeMap<usize, usize>,
    #[serde(with = "crate::serde_f64::map")]
    pub residuals: BTreeMap<String, f64>,
    pub passed: bool,
    /// Names of the failed checks with their residuals.
    pub failures: Vec<String>,
}

impl Certification {
    fn finish(mut self, checks: &[(&str, f64, f64)]) -> Self {
        for (name, value, tol) in checks {
            self.residuals.insert(name.to_string(), *value);
            if !(value < tol) {
                self.failures.push(format!("{name} = {value:.3e} (tolerance {tol:.1e})"));
            }
        }
        self.passed = self.failures.is_empty();
        self
    }
}

/// Structure checks at one point of `σ` (with `s = 0`).
struct StructurePoint {
    connection: f64,
    nabla_aa: f64,
    fiber: f64,
    leaf_curvature: f64,
    totally_real: f64,
}

fn leaf_curvature(patch: &HypersurfacePatch, t: f64) -> f64 {
    let metric = |s: &[f64]| -> nalgebra::DMatrix<f64> {
        match patch.jet1([t, s[0], s[1]]) {
            Ok(j) => nalgebra::DMatrix::from_fn(2, 2, |a, b| j.gram[(a + 1, b + 1)]),
            Err(_) => nalgebra::DMatrix::from_element(2, 2, f64::NAN),
        }
    };
    let r = fd::riemann(&metric, &[0.0, 0.0], patch.diff.field_step);
    let g = metric(&[0.0, 0.0]);
    (fd::eval4(&r, 2, &[1.0, 0.0], &[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]) / g.determinant()).abs()
}

fn structure_point(ehs: &EquivariantHypersurface, t: f64, tol: &Tolerances) -> Result<StructurePoint> {
    let patch = &ehs.patch;
    let x = [t, 0.0, 0.0];
    let j = frame_jet(patch, x)?;
    let conn = compare_connection(&j, ehs.spec.ambient.c(), tol.tau_mult, ConnectionModel::StronglyTwoHopf, f64::INFINITY);
    let connection = if conn.skipped.is_some() { f64::INFINITY } else { conn.max_residual };
    let nabla_aa = j.nabla[2][2][0].abs().max(j.nabla[2][2][1].abs());
    let fiber = (0..2).map(|k| j.coords[k][0].abs() / j.coords[k].iter().map(|c| c * c).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let jet = patch.jet1(x)?;
    let s = &ehs.spec.ambient;
    let (e1, e2) = (jet.d1[1], jet.d1[2]);
    let totally_real = s.g(&(e1 * Complex64::i()), &e2).abs() / (s.norm(&e1) * s.norm(&e2));
    Ok(StructurePoint { connection, nabla_aa, fiber, leaf_curvature: leaf_curvature(patch, t), totally_real })
}

fn structure_ts(patch: &HypersurfacePatch, n: usize) -> Vec<f64> {
    let [lo, hi] = patch.bounds[0];
    let n = n.max(1);
    (0..n).map(|k| if n == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

/// Strongly 2-Hopf certification: `h = 2`, integrable `D`, spectrum constant along `D`,
/// plus the connection table, flat totally real leaves and geodesic `A`-curves.
pub fn strongly_2hopf_certify(ehs: &EquivariantHypersurface, opts: &CertifyOptions) -> Result<Certification> {
    let tol = &opts.tolerances;
    let grid = ehs.patch.grid(opts.grid);
    let report = classify(&ehs.patch, &grid, tol)?;
    let all_h2 = report.points.iter().all(|p| p.h == 2);
    let base = Certification {
        bounds: ehs.patch.bounds,
        grid: opts.grid,
        h_counts: report.h_counts.clone(),
        residuals: BTreeMap::new(),
        passed: false,
        failures: if all_h2 { vec![] } else { vec![format!("h = 2 fails: counts {:?}", report.h_counts)] },
    };
    let get = |k: &str| report.residuals.get(k).cloned().unwrap_or(f64::INFINITY);
    let pts: Vec<Result<StructurePoint>> =
        structure_ts(&ehs.patch, opts.structure_points).par_iter().map(|t| structure_point(ehs, *t, tol)).collect();
    let mut agg = [0.0f64; 5];
    for p in pts {
        match p {
            Ok(p) => {
                for (k, v) in [p.connection, p.nabla_aa, p.fiber, p.leaf_curvature, p.totally_real].iter().enumerate() {
                    agg[k] = if v.is_nan() { f64::INFINITY } else { agg[k].max(*v) };
                }
            }
            Err(_) => agg = [f64::INFINITY; 5],
        }
    }
    Ok(base.finish(&[
        ("integrability", get("integrability"), tol.integrability),
        ("spectrum_derivative", get("spectrum_derivative"), tol.derivative),
        ("connection", agg[0], opts.connection_tol),
        ("nabla_a_a", agg[1], opts.nabla_aa_tol),
        ("d_tangent_to_orbits", agg[2], tol.integrability.max(1e-6)),
        ("leaf_curvature", agg[3], opts.leaf_curvature_tol),
        ("leaf_totally_real", agg[4], opts.totally_real_tol),
    ]))
}

/// Checks the property targeted by the law on a classification grid.
pub fn law_certify(ehs: &EquivariantHypersurface, grid: [usize; 3], tol: &Tolerances) -> Result<(Certification, ClassificationReport)> {
    let report = classify(&ehs.patch, &ehs.patch.grid(grid), tol)?;
    let base = Certification {
        bounds: ehs.patch.bounds,
        grid,
        h_counts: report.h_counts.clone(),
        residuals: BTreeMap::new(),
        passed: false,
        failures: vec![],
    };
    let r = |k: &str| report.residuals.get(k).cloned().unwrap_or(f64::INFINITY);
    let cert = match ehs.sigma.law {
        CurveLaw::Cmc { eta } => base.finish(&[
            ("mean_curvature_spread", r("mean_curvature_spread"), tol.flag),
            ("mean_curvature_error", (report.mean_curvature - eta).abs(), tol.flag),
        ]),
        CurveLaw::LeviFlat => base.finish(&[("levi_form", r("levi_form"), tol.flag)]),
        CurveLaw::Geodesic | CurveLaw::AusterePregeodesic => base.finish(&[
            ("austere", r("austere"), tol.flag),
            ("ruled", r("ruled"), tol.flag),
            ("levi_form", r("levi_form"), tol.flag),
        ]),
    };
    Ok((cert, report))
}

/// Levi-flat together with constant mean curvature `eta`.
///
/// Besides the two defining properties this records the adapted-frame
/// relations `γ = η/4` and `α + β = 3η/4` and constancy of the spectrum.
pub fn levi_flat_cmc_certify(
    ehs: &EquivariantHypersurface,
    eta: f64,
    grid: [usize; 3],
    tol: &Tolerances,
) -> Result<Certification> {
    let report = classify(&ehs.patch, &ehs.patch.grid(grid), tol)?;
    let r = |k: &str| report.residuals.get(k).cloned().unwrap_or(f64::INFINITY);
    let mut gamma: f64 = 0.0;
    let mut alpha_beta: f64 = 0.0;
    let mut ab: f64 = 0.0;
    let mut framed = true;
    for p in &report.points {
        match ehs.patch.adapted_frame(p.params) {
            Ok(f) => {
                gamma = gamma.max((f.gamma - eta / 4.0).abs());
                alpha_beta = alpha_beta.max((f.alpha + f.beta - 0.75 * eta).abs());
                ab = ab.max((f.a - FRAC_1_SQRT_2).abs()).max((f.b - FRAC_1_SQRT_2).abs());
            }
            Err(_) => framed = false,
        }
    }
    if !framed {
        gamma = f64::INFINITY;
        alpha_beta = f64::INFINITY;
    }
    let base = Certification {
        bounds: ehs.patch.bounds,
        grid,
        h_counts: report.h_counts.clone(),
        residuals: BTreeMap::new(),
        passed: false,
        failures: vec![],
    };
    let mut checks = vec![
        ("levi_form", r("levi_form"), tol.flag),
        ("mean_curvature_spread", r("mean_curvature_spread"), tol.flag),
        ("mean_curvature_error", (report.mean_curvature - eta).abs(), tol.flag),
        ("gamma_minus_eta_over_4", gamma, tol.flag),
        ("alpha_plus_beta_minus_3eta_over_4", alpha_beta, tol.flag),
    ];
    if eta == 0.0 {
        checks.push(("a_b_minus_inv_sqrt2", ab, tol.flag));
    } else {
        // nonminimal case forces a constant spectrum
        checks.push(("spectrum_spread", r("spectrum_spread"), tol.flag));
    }
    Ok(base.finish(&checks))
}

/// Ambient distances from points of leaf `t1` to leaf `t2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistanceReport {
    pub t1: f64,
    pub t2: f64,
    #[serde(with = "crate::serde_f64::vec")]
    pub distances: Vec<f64>,
    #[serde(with = "crate::serde_f64")]
    pub spread: f64,
    /// Points whose minimization did not converge.
    pub failures: Vec<usize>,
}

struct LeafDistance<'a> {
    ehs: &'a EquivariantHypersurface,
    from: crate::AmbientPoint,
    t: f64,
}

impl CostFunction for LeafDistance<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, s: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let q = self.ehs.patch.point([self.t, s[0], s[1]])?;
        Ok(self.ehs.spec.ambient.distance(&self.from, &q))
    }
}

/// Spread of the distance from leaf `t1` to leaf `t2` over `n_points` points of leaf `t1`.
pub fn equidistance_spot_check(ehs: &EquivariantHypersurface, t1: f64, t2: f64, n_points: usize) -> Result<EquidistanceReport> {
    let s_ext = ehs.patch.bounds[1][1];
    let pts: Vec<[f64; 2]> = (0..n_points)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n_points.max(1) as f64;
            [0.5 * s_ext * th.cos(), 0.5 * s_ext * th.sin()]
        })
        .collect();
    let results: Vec<Option<f64>> = pts
        .par_iter()
        .map(|s| {
            let from = ehs.patch.point([t1, s[0], s[1]]).ok()?;
            if t1 == t2 {
                return Some(0.0);
            }
            let cost = LeafDistance { ehs, from, t: t2 };
            let d = 0.05;
            let simplex = vec![vec![s[0], s[1]], vec![s[0] + d, s[1]], vec![s[0], s[1] + d]];
            let solver = NelderMead::new(simplex).with_sd_tolerance(1e-13).ok()?;
            let res = Executor::new(cost, solver).configure(|st| st.max_iters(2000)).run().ok()?;
            let st = res.state();
            st.get_best_cost().is_finite().then(|| st.get_best_cost())
        })
        .collect();
    let failures: Vec<usize> = results.iter().enumerate().filter(|(_, r)| r.is_none()).map(|(k, _)| k).collect();
    let distances: Vec<f64> = results.iter().map(|r| r.unwrap_or(f64::NAN)).collect();
    let ok: Vec<f64> = distances.iter().cloned().filter(|d| d.is_finite()).collect();
    let spread = if ok.is_empty() {
        f64::INFINITY
    } else {
        ok.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ok.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    Ok(EquidistanceReport { t1, t2, distances, spread, failures })
}

/// Section grid for the austere search: `n × n` points of section coordinates
/// in `[-half_width, half_width]²`, each axis shifted by its `offset` in cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionGrid {
    pub n: usize,
    pub half_width: f64,
    pub offset: [f64; 2],
}

impl Default for SectionGrid {
    fn default() -> Self {
        // unequal offsets keep nodes off the axes and both diagonals
        SectionGrid { n: 41, half_width: 1.0, offset: [0.1373, 0.3791] }
    }
}

impl SectionGrid {
    fn coord(&self, axis: usize, i: usize) -> f64 {
        let d = 2.0 * self.half_width / (self.n.max(2) - 1) as f64;
        -self.half_width + (i as f64 + self.offset[axis]) * d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AustereCurve {
    /// Section coordinates where `sigma` starts.
    pub start: [f64; 2],
    pub direction: [f64; 3],
    /// `max |⟨H, ξ⟩| / max(1, |H|)` along the checked geodesic.
    pub residual: f64,
    /// Section coordinates sampled along the checked segment.
    pub trace: Vec<[f64; 2]>,
    /// Representative of an open family of admissible curves (the curl of `Ĥ` vanishes nearby).
    pub family: bool,
    pub sigma: SigmaCurve,
}

const ALIGN_TOL: f64 = 1e-6;
const H_ZERO: f64 = 1e-8;
const DEDUP_TOL: f64 = 1e-3;
const CURL_ZERO: f64 = 1e-7;
const TRACE_LENGTH: f64 = 0.5;
const TRACE_STEP: f64 = 0.01;
const RECENTER_REACH: f64 = 3.0;

struct Search<'a> {
    spec: &'a PolarActionSpec,
}

impl Search<'_> {
    fn h_vec(&self, y: &RealVec) -> Option<RealVec> {
        let h = self.spec.mean_curvature_section(y).ok()?;
        h.iter().all(|v| v.is_finite()).then_some(h)
    }

    fn h_hat(&self, y: &RealVec) -> Option<RealVec> {
        let h = self.h_vec(y)?;
        let n = self.spec.section.dot(&h, &h).sqrt();
        (n > H_ZERO).then(|| h / n)
    }

    /// Geodesic curvature of the integral curve of `Ĥ` through `y`.
    fn curl(&self, y: &RealVec) -> Option<f64> {
        let ch = &self.spec.section;
        let u = self.h_hat(y)?;
        let f = |s: f64| -> f64 {
            let (yy, vv) = ch.geodesic(y, &u, s);
            match self.h_hat(&yy) {
                Some(hh) => ch.dot(&hh, &ch.rot(&yy, &vv)),
                None => f64::NAN,
            }
        };
        let k = fd::d1(f, 1e-4);
        k.is_finite().then_some(k)
    }

    /// Max alignment residual along the geodesic from `y` with direction `u`, both ways.
    fn alignment(&self, y: &RealVec, u: &RealVec, h_zero: bool) -> (f64, Vec<[f64; 2]>) {
        let ch = &self.spec.section;
        let mut worst: f64 = 0.0;
        let mut trace = Vec::new();
        let n = (TRACE_LENGTH / TRACE_STEP) as i64;
        for k in -n..=n {
            let s = k as f64 * TRACE_STEP;
            let (yy, vv) = ch.geodesic(y, u, s);
            let h = match self.h_vec(&yy) {
                Some(h) => h,
                None => continue,
            };
            let xi = ch.rot(&yy, &vv);
            let r = if h_zero {
                let hn = ch.dot(&h, &h).sqrt();
                let ab = match self.spec.orbit_scalars(&yy, &xi) {
                    Ok([_, _, a, b]) => (a - b).abs(),
                    Err(_) => continue,
                };
                hn.max(ab * 1e-2)
            } else {
                ch.dot(&h, &xi).abs() / ch.dot(&h, &h).sqrt().max(1.0)
            };
            worst = worst.max(r);
            trace.push(ch.y_to_coords(&yy));
        }
        (worst, trace)
    }

    /// Section geodesics are plane sections through the origin; two launches are
    /// the same curve when their planes agree.
    fn duplicate(&self, found: &[(RealVec, bool)], plane: &RealVec) -> bool {
        found.iter().any(|(p, _)| p.cross(plane).norm() < DEDUP_TOL)
    }
}

/// Point of the geodesic through `y` along `u`, inside the search window, where
/// the orbit is largest; the curve is integrated from there.
fn recenter(spec: &PolarActionSpec, y: &RealVec, u: &RealVec, half_width: f64) -> (RealVec, RealVec) {
    let ch = &spec.section;
    let n = (RECENTER_REACH / TRACE_STEP) as i64;
    let mut best = (f64::NEG_INFINITY, *y, *u);
    for k in -n..=n {
        let (yy, vv) = ch.geodesic(y, u, k as f64 * TRACE_STEP);
        let q = ch.y_to_coords(&yy);
        if q[0].hypot(q[1]) > half_width {
            continue;
        }
        let det = spec.killing_gram(&ch.lift(&yy)).determinant();
        if det > best.0 {
            best = (det, yy, vv);
        }
    }
    (best.1, best.2)
}

fn plane_of(y: &RealVec, u: &RealVec) -> RealVec {
    let p = y.cross(u);
    p / p.norm()
}

/// Curves `σ` for which `H·σ` is austere: geodesics along which the orbit mean
/// curvature vector stays tangent to `σ`.
pub fn austere_search(spec: &PolarActionSpec, grid: &SectionGrid) -> Result<Vec<AustereCurve>> {
    if grid.n == 0 {
        return Err(GeometryError::EmptyGrid);
    }
    let srch = Search { spec };
    let ch = &spec.section;
    let n = grid.n;
    let coords: Vec<[f64; 2]> = (0..n * n).map(|k| [grid.coord(0, k / n), grid.coord(1, k % n)]).collect();
    let ys: Vec<RealVec> = coords.iter().map(|u| ch.coords_to_y(*u)).collect();
    let regular: Vec<bool> = ys.iter().map(|y| spec.is_regular(&ch.lift(y))).collect();
    let curls: Vec<Option<f64>> =
        ys.par_iter().zip(regular.par_iter()).map(|(y, r)| if *r { srch.curl(y) } else { None }).collect();
    let hnorm: Vec<Option<f64>> =
        ys.iter().zip(&regular).map(|(y, r)| if *r { srch.h_vec(y).map(|h| ch.dot(&h, &h).sqrt()) } else { None }).collect();

    let flat = |k: usize| curls[k].is_some_and(|v| v.abs() < CURL_ZERO);
    let neighbours = |k: usize| {
        let (i, j) = (k / n, k % n);
        [
            (i + 1 < n).then(|| k + n),
            (i > 0).then(|| k - n),
            (j + 1 < n).then(|| k + 1),
            (j > 0).then(|| k - 1),
        ]
        .into_iter()
        .flatten()
    };

    // open regions where the curl vanishes: every integral curve of Ĥ there is a
    // geodesic, so one representative stands for the whole family
    let interior: Vec<bool> = (0..n * n).map(|k| flat(k) && neighbours(k).all(flat)).collect();
    let mut seen = vec![false; n * n];
    let mut family_launches = Vec::new();
    for k0 in 0..n * n {
        if !interior[k0] || seen[k0] {
            continue;
        }
        let mut stack = vec![k0];
        seen[k0] = true;
        let mut best = k0;
        while let Some(k) = stack.pop() {
            let r = |k: usize| coords[k][0].hypot(coords[k][1]);
            if r(k) < r(best) {
                best = k;
            }
            for m in neighbours(k) {
                if interior[m] && !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        if let Some(d) = srch.h_hat(&ys[best]) {
            family_launches.push((coords[best], d, false, true));
        }
    }

    // isolated candidates: sign changes of the curl along grid edges
    let mut edges = Vec::new();
    for a in 0..n * n {
        for b in neighbours(a).filter(|&b| b > a) {
            if interior[a] || interior[b] {
                continue;
            }
            if let (Some(ka), Some(kb)) = (curls[a], curls[b]) {
                if ka * kb < 0.0 || (flat(a) && !flat(b)) || (flat(b) && !flat(a)) {
                    edges.push((a, b, ka));
                }
            }
        }
    }
    let candidates: Vec<([f64; 2], RealVec)> = edges
        .par_iter()
        .filter_map(|&(a, b, ka)| {
            let (ua, ub) = (coords[a], coords[b]);
            let at = |s: f64| [ua[0] + s * (ub[0] - ua[0]), ua[1] + s * (ub[1] - ua[1])];
            let (mut lo, mut hi, mut flo) = (0.0, 1.0, ka);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                let fm = srch.curl(&ch.coords_to_y(at(mid)))?;
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            let u = at(0.5 * (lo + hi));
            let y = ch.coords_to_y(u);
            Some((u, srch.h_hat(&y)?))
        })
        .collect();

    let mut launches: Vec<([f64; 2], RealVec, bool, bool)> = family_launches;
    launches.extend(candidates.into_iter().map(|(u, d)| (u, d, false, false)));
    // open sets where H vanishes: any direction is admissible
    for i in 1..n.saturating_sub(1) {
        for j in 1..n - 1 {
            let nb = [i * n + j, (i + 1) * n + j, (i - 1) * n + j, i * n + j + 1, i * n + j - 1];
            if nb.iter().all(|&k| hnorm[k].is_some_and(|h| h < H_ZERO)) {
                let y = ys[i * n + j];
                for k in 0..8 {
                    let th = std::f64::consts::PI * k as f64 / 8.0;
                    launches.push((coords[i * n + j], ch.direction(&y, th), true, false));
                }
            }
        }
    }

    let checked: Vec<Option<(f64, Vec<[f64; 2]>)>> = launches
        .par_iter()
        .map(|(u, d, zero, _)| {
            let (res, trace) = srch.alignment(&ch.coords_to_y(*u), d, *zero);
            (res < ALIGN_TOL && trace.len() > 10).then_some((res, trace))
        })
        .collect();
    let mut found: Vec<AustereCurve> = Vec::new();
    let mut planes: Vec<(RealVec, bool)> = Vec::new();
    for ((u, d, _, family), ok) in launches.iter().zip(checked) {
        let Some((residual, trace)) = ok else { continue };
        let y = ch.coords_to_y(*u);
        let plane = plane_of(&y, d);
        if srch.duplicate(&planes, &plane) {
            continue;
        }
        let (yc, dc) = recenter(spec, &y, d, grid.half_width);
        let sigma = match integrate_sigma_symmetric(spec, &yc, &dc, CurveLaw::AusterePregeodesic, 1e-3, 500) {
            Ok(s) => s,
            Err(_) => continue,
        };
        planes.push((plane, *family));
        found.push(AustereCurve { start: ch.y_to_coords(&yc), direction: arr(&dc), residual, trace, family: *family, sigma });
    }
    Ok(found)
}

/// One row of an exported mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshRow {
    pub t: f64,
    pub s1: f64,
    pub s2: f64,
    /// Point representative as `(re, im)` pairs.
    pub z: [f64; 6],
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub h: usize,
    pub mean_curvature: f64,
    pub levi: f64,
    pub austere: f64,
}

/// Geometry sampled on `grid` of the patch; frame columns are `NaN` where `h ≠ 2`.
pub fn sample_mesh(patch: &HypersurfacePatch, grid: [usize; 3]) -> Result<Vec<MeshRow>> {
    patch
        .grid(grid)
        .par_iter()
        .map(|x| {
            let g = patch.analyze(*x)?;
            let z = g.jet.point.rep;
            let f = g.adapted_frame(patch.diff.tau_mult).ok();
            let pick = |k: fn(&crate::hypersurface::AdaptedFrame) -> f64| f.as_ref().map_or(f64::NAN, k);
            Ok(MeshRow {
                t: x[0],
                s1: x[1],
                s2: x[2],
                z: [z[0].re, z[0].im, z[1].re, z[1].im, z[2].re, z[2].im],
                alpha: pick(|f| f.alpha),
                beta: pick(|f| f.beta),
                gamma: pick(|f| f.gamma),
                a: pick(|f| f.a),
                b: pick(|f| f.b),
                h: g.h(),
                mean_curvature: g.mean_curvature(),
                levi: g.levi_residual().abs(),
                austere: g.austere_residual(),
            })
        })
        .collect()
}
