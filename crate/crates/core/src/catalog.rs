//! Canonical hypersurfaces with known geometry.
//!
//! Spheres and tubes come from the normal exponential map of their core,
//! horospheres from the nilpotent group fixing a null line, and the ruled
//! examples from explicit group or slice sweeps.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::actions::{ActionLabel, PolarActionSpec};
use crate::ambient::{cscale, AmbientPoint, CMat3, SpaceForm, C3};
use crate::error::{GeometryError, Result};
use crate::hypersurface::{ClassificationReport, HypersurfacePatch};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Known parts of the classification of an entry. `None` means "not asserted".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectedFragment {
    pub hopf: Option<bool>,
    pub strongly_two_hopf: Option<bool>,
    pub austere: Option<bool>,
    pub levi_flat: Option<bool>,
    pub ruled: Option<bool>,
    pub cmc: Option<bool>,
    /// Principal curvatures, descending.
    pub spectrum: Option<[f64; 3]>,
    pub mean_curvature: Option<f64>,
    /// `(a, b)` of the adapted frame.
    pub hopf_components: Option<[f64; 2]>,
}

impl ExpectedFragment {
    /// Human-readable mismatches between the expectation and `report`.
    pub fn mismatches(&self, report: &ClassificationReport, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let flags = [
            ("hopf", self.hopf, report.hopf),
            ("strongly_two_hopf", self.strongly_two_hopf, report.strongly_two_hopf),
            ("austere", self.austere, report.austere),
            ("levi_flat", self.levi_flat, report.levi_flat),
            ("ruled", self.ruled, report.ruled),
            ("cmc", self.cmc, report.cmc),
        ];
        for (name, want, got) in flags {
            if let Some(w) = want {
                if w != got {
                    out.push(format!("{name}: expected {w}, got {got}"));
                }
            }
        }
        if let Some(s) = self.spectrum {
            for p in &report.points {
                let d = (0..3).map(|k| (p.spectrum[k] - s[k]).abs()).fold(0.0, f64::max);
                if !(d < tol) {
                    out.push(format!("spectrum at {:?}: {:?} vs {:?}", p.params, p.spectrum, s));
                    break;
                }
            }
        }
        if let Some(m) = self.mean_curvature {
            if !((report.mean_curvature - m).abs() < tol) {
                out.push(format!("mean curvature {} vs {}", report.mean_curvature, m));
            }
        }
        if let Some(ab) = self.hopf_components {
            for p in &report.points {
                match p.ab {
                    Some(v) if (v[0] - ab[0]).abs() < tol && (v[1] - ab[1]).abs() < tol => {}
                    other => {
                        out.push(format!("(a,b) at {:?}: {:?} vs {:?}", p.params, other, ab));
                        break;
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub ambient: SpaceForm,
    pub parameters: BTreeMap<String, f64>,
    pub patch: HypersurfacePatch,
    pub expected: ExpectedFragment,
}

fn params(list: &[(&str, f64)]) -> BTreeMap<String, f64> {
    list.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn unit_c3(e: &[f64; 3]) -> C3 {
    C3::new(e[0].into(), e[1].into(), e[2].into())
}

/// Unit vector of the horizontal space at `p` complex-orthogonal to `u`.
fn complex_complement(space: &SpaceForm, p: &AmbientPoint, u: &C3) -> C3 {
    let mut best = C3::zeros();
    for b in space.horizontal_basis(p) {
        let w = b - cscale(u, space.herm(&b, u));
        if space.norm(&w) > space.norm(&best) {
            best = w;
        }
    }
    cscale(&best, (1.0 / space.norm(&best)).into())
}

/// Distance sphere of radius `r` about `center`, inward normal.
pub fn geodesic_sphere(ambient: SpaceForm, center: &AmbientPoint, r: f64) -> Result<CatalogEntry> {
    let c = ambient.c();
    let k = c.abs().sqrt();
    if !(r > 0.0) || (ambient.is_projective() && r >= PI / k) {
        return Err(GeometryError::InvalidParameter(format!("sphere radius {r} outside (0, focal radius)")));
    }
    let center = ambient.point(center.rep)?;
    let [e, f1, f2, f3] = ambient.horizontal_basis(&center);
    let s = ambient;
    let map = Arc::new(move |x: [f64; 3]| {
        let v = e + cscale(&f1, x[0].into()) + cscale(&f2, x[1].into()) + cscale(&f3, x[2].into());
        let v = cscale(&v, (1.0 / s.norm(&v)).into());
        s.exp_vec(&center, &v, r).rep
    });
    let b = 0.3;
    let patch = HypersurfacePatch::new("geodesic-sphere", ambient, [[-b, b]; 3], map);
    let patch = patch.oriented_along([0.0; 3], |p| s.log_map(p, &center).vec)?;
    let (hopf, other) = if ambient.is_projective() {
        (k / (k * r).tan(), 0.5 * k / (0.5 * k * r).tan())
    } else {
        (k / (k * r).tanh(), 0.5 * k / (0.5 * k * r).tanh())
    };
    let mut spec = [hopf, other, other];
    spec.sort_by(|a, b| b.total_cmp(a));
    Ok(CatalogEntry {
        name: "geodesic-sphere".into(),
        ambient,
        parameters: params(&[("c", c), ("r", r)]),
        patch,
        expected: ExpectedFragment {
            hopf: Some(true),
            cmc: Some(true),
            austere: Some(false),
            spectrum: Some(spec),
            mean_curvature: Some(hopf + 2.0 * other),
            ..Default::default()
        },
    })
}

/// Horosphere through `[1:0:0]` centred at the null line `[1:1:0]`; normal towards the centre.
pub fn horosphere(c: f64) -> Result<CatalogEntry> {
    if !(c < 0.0) {
        return Err(GeometryError::InvalidCurvature(c));
    }
    let ambient = SpaceForm::new(c)?;
    let re = |m: [[f64; 3]; 3]| CMat3::from_fn(|i, j| Complex64::from(m[i][j]));
    let y1 = re([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [-1.0, 1.0, 0.0]]) * I;
    let yi = re([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, -1.0, 0.0]]);
    let z = re([[-1.0, 1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 0.0]]) * I;
    let o = ambient.origin();
    let map = Arc::new(move |x: [f64; 3]| {
        let m = (y1 * Complex64::from(x[0]) + yi * Complex64::from(x[1]) + z * Complex64::from(x[2])).exp();
        m * o.rep
    });
    let patch = HypersurfacePatch::new("horosphere", ambient, [[-0.3, 0.3]; 3], map);
    let patch = patch.oriented_along([0.0; 3], |_| unit_c3(&[0.0, 1.0, 0.0]))?;
    let k = (-c).sqrt();
    Ok(CatalogEntry {
        name: "horosphere".into(),
        ambient,
        parameters: params(&[("c", c)]),
        patch,
        expected: ExpectedFragment {
            hopf: Some(true),
            cmc: Some(true),
            austere: Some(false),
            spectrum: Some([k, 0.5 * k, 0.5 * k]),
            mean_curvature: Some(2.0 * k),
            ..Default::default()
        },
    })
}

/// Tube of radius `r` about the totally geodesic real plane `RP²` (`c > 0`).
pub fn tube_rp2(c: f64, r: f64) -> Result<CatalogEntry> {
    if !(c > 0.0) {
        return Err(GeometryError::InvalidCurvature(c));
    }
    let ambient = SpaceForm::new(c)?;
    let focal = PI / (2.0 * c.sqrt());
    if !(r > 0.0 && r < focal) {
        return Err(GeometryError::InvalidParameter(format!("tube radius {r} outside (0, {focal})")));
    }
    let chart = ambient.real_section();
    let s = ambient;
    let map = Arc::new(move |x: [f64; 3]| {
        let y = chart.coords_to_y([x[0], x[1]]);
        let [f1, f2] = chart.frame_at(&y);
        let w = f1 * x[2].cos() + f2 * x[2].sin();
        let base = chart.lift(&y);
        let v = cscale(&chart.lift_tangent(&y, &w).vec, I);
        s.exp_vec(&base, &v, r).rep
    });
    let patch = HypersurfacePatch::new("tube-rp2", ambient, [[-0.3, 0.3], [-0.3, 0.3], [0.2, 0.8]], map);
    // outward normal: velocity of the normal geodesic
    let patch = patch.oriented_along([0.0, 0.0, 0.5], move |p| {
        let y = chart.coords_to_y([0.0, 0.0]);
        let [f1, f2] = chart.frame_at(&y);
        let w = f1 * 0.5f64.cos() + f2 * 0.5f64.sin();
        let v = cscale(&chart.lift_tangent(&y, &w).vec, I);
        let vel = s.geodesic_velocity(&chart.lift(&y), &v, r);
        cscale(&vel.vec, s.align_phase(&vel.base.rep, &p.rep))
    })?;
    let k = c.sqrt();
    let mut spec = [k * (k * r).tan(), 0.5 * k * (0.5 * k * r).tan(), -0.5 * k / (0.5 * k * r).tan()];
    spec.sort_by(|a, b| b.total_cmp(a));
    Ok(CatalogEntry {
        name: "tube-rp2".into(),
        ambient,
        parameters: params(&[("c", c), ("r", r)]),
        patch,
        expected: ExpectedFragment {
            hopf: Some(true),
            cmc: Some(true),
            spectrum: Some(spec),
            mean_curvature: Some(spec.iter().sum()),
            ..Default::default()
        },
    })
}

/// Tube of radius `r` about the complex line `{z₂ = 0}` of `CH²`.
pub fn tube_ch1(c: f64, r: f64) -> Result<CatalogEntry> {
    if !(c < 0.0) {
        return Err(GeometryError::InvalidCurvature(c));
    }
    if !(r > 0.0) {
        return Err(GeometryError::InvalidParameter(format!("tube radius {r} must be positive")));
    }
    let ambient = SpaceForm::new(c)?;
    let o = ambient.origin();
    let (e1, e2) = (unit_c3(&[0.0, 1.0, 0.0]), unit_c3(&[0.0, 0.0, 1.0]));
    let s = ambient;
    let map = Arc::new(move |x: [f64; 3]| {
        let base = s.exp_vec(&o, &cscale(&e1, Complex64::new(x[0], x[1])), 1.0);
        let v = cscale(&e2, Complex64::from_polar(1.0, x[2]));
        s.exp_vec(&base, &v, r).rep
    });
    let patch = HypersurfacePatch::new("tube-ch1", ambient, [[-0.3, 0.3], [-0.3, 0.3], [-0.5, 0.5]], map);
    let patch = patch.oriented_along([0.0; 3], |p| s.log_map(p, &o).vec)?;
    let k = (-c).sqrt();
    let (hopf, other) = (k / (k * r).tanh(), 0.5 * k * (0.5 * k * r).tanh());
    Ok(CatalogEntry {
        name: "tube-ch1".into(),
        ambient,
        parameters: params(&[("c", c), ("r", r)]),
        patch,
        expected: ExpectedFragment {
            hopf: Some(true),
            cmc: Some(true),
            austere: Some(false),
            spectrum: Some([hopf, other, other]),
            mean_curvature: Some(hopf + 2.0 * other),
            ..Default::default()
        },
    })
}

fn ruled_minimal(k: Option<f64>) -> ExpectedFragment {
    ExpectedFragment {
        hopf: Some(false),
        strongly_two_hopf: Some(true),
        austere: Some(true),
        levi_flat: Some(true),
        ruled: Some(true),
        mean_curvature: Some(0.0),
        spectrum: k.map(|k| [0.5 * k, 0.0, -0.5 * k]),
        hopf_components: Some([FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        ..Default::default()
    }
}

/// Orbit sweep of the section geodesic `{x₂ = 0}` under the `CH2_LINE_G2A` action.
pub fn lohnherr(c: f64) -> Result<CatalogEntry> {
    if !(c < 0.0) {
        return Err(GeometryError::InvalidCurvature(c));
    }
    let spec = PolarActionSpec::new(ActionLabel::Ch2LineG2a, c)?;
    let chart = spec.section;
    let y0 = chart.y0();
    let w0 = Vector3::new(0.0, 1.0, 0.0);
    let gens = spec.generators.clone();
    let map = Arc::new(move |x: [f64; 3]| {
        let (y, _) = chart.geodesic(&y0, &w0, x[0]);
        let m = (gens[0] * Complex64::from(x[1]) + gens[1] * Complex64::from(x[2])).exp();
        m * chart.lift(&y).rep
    });
    let patch = HypersurfacePatch::new("lohnherr", spec.ambient, [[-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]], map);
    Ok(CatalogEntry {
        name: "lohnherr".into(),
        ambient: spec.ambient,
        parameters: params(&[("c", c)]),
        patch,
        expected: ruled_minimal(Some((-c).sqrt())),
    })
}

/// Equidistant locus of `p1` and `p2`, swept by the complex slices over the real spine.
pub fn bisector(c: f64, p1: &AmbientPoint, p2: &AmbientPoint) -> Result<CatalogEntry> {
    if !(c < 0.0) {
        return Err(GeometryError::InvalidCurvature(c));
    }
    let s = SpaceForm::new(c)?;
    let (p1, p2) = (s.point(p1.rep)?, s.point(p2.rep)?);
    let d = s.distance(&p1, &p2);
    if !(d > 1e-8) {
        return Err(GeometryError::InvalidParameter("bisector needs two distinct points".into()));
    }
    let v = s.log_map(&p1, &p2).vec;
    let m = s.exp_vec(&p1, &v, 0.5);
    let u = s.geodesic_velocity(&p1, &v, 0.5).vec;
    let u = cscale(&u, (1.0 / s.norm(&u)).into());
    let ju = cscale(&u, I);
    let n = complex_complement(&s, &m, &u);
    let map = Arc::new(move |x: [f64; 3]| {
        let q = s.exp_vec(&m, &ju, x[0]);
        // n stays horizontal and parallel along the spine
        s.exp_vec(&q, &cscale(&n, Complex64::new(x[1], x[2])), 1.0).rep
    });
    let patch = HypersurfacePatch::new("bisector", s, [[-0.4, 0.4], [0.1, 0.5], [-0.4, 0.4]], map);
    Ok(CatalogEntry {
        name: "bisector".into(),
        ambient: s,
        parameters: params(&[("c", c), ("distance", d)]),
        patch,
        expected: ruled_minimal(None),
    })
}

/// Default bisector: points at distance `1/2` on either side of `[1:0:0]`.
pub fn standard_bisector(c: f64) -> Result<CatalogEntry> {
    let s = SpaceForm::new(c)?;
    let o = s.origin();
    let e1 = unit_c3(&[0.0, 1.0, 0.0]);
    bisector(c, &s.exp_vec(&o, &e1, -0.5), &s.exp_vec(&o, &e1, 0.5))
}

/// Cone of geodesic rays from a torus-fixed `vertex` over the minimal torus orbit.
pub fn clifford_cone(ambient: SpaceForm, vertex: &AmbientPoint) -> Result<CatalogEntry> {
    let label = if ambient.is_projective() { ActionLabel::Cp2Torus } else { ActionLabel::Ch2Torus };
    let spec = PolarActionSpec::new(label, ambient.c())?;
    let vertex = ambient.point(vertex.rep)?;
    for g in 0..2 {
        let k = spec.killing_field(g, &vertex)?;
        if ambient.norm(&k.vec) > 1e-10 {
            return Err(GeometryError::InvalidParameter("cone vertex is not fixed by the torus".into()));
        }
    }
    let kidx = (0..3)
        .max_by(|&a, &b| vertex.rep[a].norm().total_cmp(&vertex.rep[b].norm()))
        .expect("three coordinates");
    let others: Vec<usize> = (0..3).filter(|&k| k != kidx).collect();
    let mut v = C3::zeros();
    for &k in &others {
        v[k] = FRAC_1_SQRT_2.into();
    }
    let v = ambient.horizontal(&vertex.rep, &v);
    if (ambient.norm(&v) - 1.0).abs() > 1e-10 {
        return Err(GeometryError::InvalidParameter("cone vertex is not a coordinate point".into()));
    }
    let gens = spec.generators.clone();
    let s = ambient;
    let map = Arc::new(move |x: [f64; 3]| {
        let m = (gens[0] * Complex64::from(x[1]) + gens[1] * Complex64::from(x[2])).exp();
        m * s.exp_vec(&vertex, &v, x[0]).rep
    });
    let name = if ambient.is_projective() { "clifford-cone-cp2" } else { "clifford-cone-ch2" };
    let patch = HypersurfacePatch::new(name, ambient, [[0.3, 0.7], [-0.5, 0.5], [-0.5, 0.5]], map);
    Ok(CatalogEntry {
        name: name.into(),
        ambient,
        parameters: params(&[("c", ambient.c()), ("vertex_index", kidx as f64)]),
        patch,
        expected: ruled_minimal(None),
    })
}

/// Names accepted by [`build`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogName {
    Lohnherr,
    Bisector,
    CliffordConeCp2,
    CliffordConeCh2,
    GeodesicSphere,
    Horosphere,
    TubeRp2,
    TubeCh1,
}

impl CatalogName {
    pub const ALL: [CatalogName; 8] = [
        CatalogName::Lohnherr,
        CatalogName::Bisector,
        CatalogName::CliffordConeCp2,
        CatalogName::CliffordConeCh2,
        CatalogName::GeodesicSphere,
        CatalogName::Horosphere,
        CatalogName::TubeRp2,
        CatalogName::TubeCh1,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CatalogName::Lohnherr => "lohnherr",
            CatalogName::Bisector => "bisector",
            CatalogName::CliffordConeCp2 => "clifford-cone-cp2",
            CatalogName::CliffordConeCh2 => "clifford-cone-ch2",
            CatalogName::GeodesicSphere => "geodesic-sphere",
            CatalogName::Horosphere => "horosphere",
            CatalogName::TubeRp2 => "tube-rp2",
            CatalogName::TubeCh1 => "tube-ch1",
        }
    }

    /// Curvature used when none is given.
    pub fn default_curvature(&self) -> f64 {
        match self {
            CatalogName::CliffordConeCp2 | CatalogName::GeodesicSphere | CatalogName::TubeRp2 => 4.0,
            _ => -4.0,
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogName {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        CatalogName::ALL
            .iter()
            .find(|n| n.as_str() == s)
            .copied()
            .ok_or_else(|| GeometryError::UnknownCatalog(s.to_string()))
    }
}

/// Optional overrides for [`build`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CatalogParams {
    pub c: Option<f64>,
    /// Radius of spheres and tubes.
    pub r: Option<f64>,
}

/// Builds a named entry with default data where `params` is silent.
pub fn build(name: CatalogName, params: &CatalogParams) -> Result<CatalogEntry> {
    let c = params.c.unwrap_or(name.default_curvature());
    let r = |d: f64| params.r.unwrap_or(d);
    match name {
        CatalogName::Lohnherr => lohnherr(c),
        CatalogName::Bisector => standard_bisector(c),
        CatalogName::CliffordConeCp2 | CatalogName::CliffordConeCh2 => {
            if (c > 0.0) != (name == CatalogName::CliffordConeCp2) {
                return Err(GeometryError::InvalidCurvature(c));
            }
            let s = SpaceForm::new(c)?;
            clifford_cone(s, &s.origin())
        }
        CatalogName::GeodesicSphere => {
            let s = SpaceForm::new(c)?;
            geodesic_sphere(s, &s.origin(), r(PI / 4.0))
        }
        CatalogName::Horosphere => horosphere(c),
        CatalogName::TubeRp2 => tube_rp2(c, r(0.3)),
        CatalogName::TubeCh1 => tube_ch1(c, r(0.5)),
    }
}

/// Every entry with default data.
pub fn all() -> Result<Vec<CatalogEntry>> {
    CatalogName::ALL.iter().map(|n| build(*n, &CatalogParams::default())).collect()
}
