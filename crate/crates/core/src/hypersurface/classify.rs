//! Grid classification of a patch.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::connection::frame_jet;
use super::{DiffConfig, HypersurfacePatch};
use crate::error::{GeometryError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tau_mult: f64,
    pub tau_proj: f64,
    /// Austere, Levi-flat, ruled and CMC flags.
    pub flag: f64,
    /// `|⟨[U,V], A⟩|`.
    pub integrability: f64,
    /// `|Uα|, |Vα|, |Uβ|, |Vβ|`.
    pub derivative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tau_mult: 1e-4, tau_proj: 1e-4, flag: 1e-3, integrability: 1e-5, derivative: 1e-4 }
    }
}

/// Pointwise quantities behind the flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub params: [f64; 3],
    pub h: usize,
    pub spectrum: [f64; 3],
    pub mean_curvature: f64,
    #[serde(with = "crate::serde_f64")]
    pub austere: f64,
    #[serde(with = "crate::serde_f64")]
    pub levi: f64,
    #[serde(with = "crate::serde_f64")]
    pub ruled: f64,
    /// `(a, b)` where the adapted frame exists.
    pub ab: Option<[f64; 2]>,
    #[serde(with = "crate::serde_f64::option")]
    pub integrability: Option<f64>,
    #[serde(with = "crate::serde_f64::option")]
    pub spectrum_derivative: Option<f64>,
    #[serde(with = "crate::serde_f64::option")]
    pub torsion_consistency: Option<f64>,
    #[serde(with = "crate::serde_f64::option")]
    pub frame_identity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    /// Largest `h` on the grid.
    pub h: usize,
    pub h_counts: BTreeMap<usize, usize>,
    pub hopf: bool,
    pub two_hopf: bool,
    pub strongly_two_hopf: bool,
    pub austere: bool,
    pub levi_flat: bool,
    pub ruled: bool,
    pub cmc: bool,
    #[serde(with = "crate::serde_f64")]
    pub mean_curvature: f64,
    #[serde(with = "crate::serde_f64")]
    pub mean_curvature_spread: f64,
    #[serde(with = "crate::serde_f64::map")]
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: Tolerances,
    pub points: Vec<PointReport>,
}

fn analyze_point(patch: &HypersurfacePatch, x: [f64; 3], tol: &Tolerances) -> Result<PointReport> {
    let g = patch.analyze(x)?;
    let h = g.hopf_count(tol.tau_proj);
    let mut rep = PointReport {
        params: x,
        h,
        spectrum: g.spectrum.values,
        mean_curvature: g.mean_curvature(),
        austere: g.austere_residual(),
        levi: g.levi_residual().abs(),
        ruled: g.ruled_residual(),
        ab: None,
        integrability: None,
        spectrum_derivative: None,
        torsion_consistency: None,
        frame_identity: None,
    };
    if h == 2 {
        match frame_jet(patch, x) {
            Ok(j) => {
                rep.ab = Some([j.frame.a, j.frame.b]);
                rep.integrability = Some(j.integrability());
                rep.spectrum_derivative = Some(j.spectrum_derivative());
                rep.torsion_consistency = Some(j.torsion_consistency());
                rep.frame_identity = Some(j.frame.identity_residuals().iter().cloned().fold(0.0, f64::max));
            }
            Err(_) => {
                rep.integrability = Some(f64::INFINITY);
                rep.spectrum_derivative = Some(f64::INFINITY);
            }
        }
    }
    Ok(rep)
}

fn max_of(points: &[PointReport], f: impl Fn(&PointReport) -> f64) -> f64 {
    points.iter().map(f).fold(0.0, |m: f64, v| if v.is_nan() { f64::INFINITY } else { m.max(v) })
}

/// Evaluates `h`, the flags and their residuals over `grid`.
pub fn classify(patch: &HypersurfacePatch, grid: &[[f64; 3]], tol: &Tolerances) -> Result<ClassificationReport> {
    if grid.is_empty() {
        return Err(GeometryError::EmptyGrid);
    }
    let patch = patch.clone().with_diff(DiffConfig { tau_mult: tol.tau_mult, tau_proj: tol.tau_proj, ..patch.diff });
    let points: Vec<PointReport> =
        grid.par_iter().map(|x| analyze_point(&patch, *x, tol)).collect::<Result<Vec<_>>>()?;

    let mut h_counts = BTreeMap::new();
    for p in &points {
        *h_counts.entry(p.h).or_insert(0) += 1;
    }
    let h = points.iter().map(|p| p.h).max().unwrap_or(0);
    let all_h = |k: usize| points.iter().all(|p| p.h == k);

    let means: Vec<f64> = points.iter().map(|p| p.mean_curvature).collect();
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    let spread = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - means.iter().cloned().fold(f64::INFINITY, f64::min);
    let spectrum_spread = (0..3)
        .map(|k| {
            let v = points.iter().map(|p| p.spectrum[k]);
            v.clone().fold(f64::NEG_INFINITY, f64::max) - v.fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);

    let mut residuals = BTreeMap::new();
    let austere = max_of(&points, |p| p.austere);
    let levi = max_of(&points, |p| p.levi);
    let ruled = max_of(&points, |p| p.ruled);
    residuals.insert("austere".to_string(), austere);
    residuals.insert("levi_form".to_string(), levi);
    residuals.insert("ruled".to_string(), ruled);
    residuals.insert("mean_curvature_spread".to_string(), spread);
    residuals.insert("spectrum_spread".to_string(), spectrum_spread);
    let with_frame: Vec<&PointReport> = points.iter().filter(|p| p.integrability.is_some()).collect();
    let (mut integ, mut deriv) = (f64::INFINITY, f64::INFINITY);
    if all_h(2) && !with_frame.is_empty() {
        let m = |f: &dyn Fn(&PointReport) -> Option<f64>| {
            with_frame.iter().filter_map(|p| f(p)).fold(0.0, |m: f64, v| if v.is_nan() { f64::INFINITY } else { m.max(v) })
        };
        integ = m(&|p| p.integrability);
        deriv = m(&|p| p.spectrum_derivative);
        residuals.insert("integrability".to_string(), integ);
        residuals.insert("spectrum_derivative".to_string(), deriv);
        residuals.insert("torsion_consistency".to_string(), m(&|p| p.torsion_consistency));
        residuals.insert("frame_identity".to_string(), m(&|p| p.frame_identity));
    }

    let hopf = all_h(1);
    let two_hopf = all_h(2) && integ < tol.integrability;
    let strongly_two_hopf = two_hopf && deriv < tol.derivative;
    let levi_flat = levi < tol.flag;
    Ok(ClassificationReport {
        h,
        h_counts,
        hopf,
        two_hopf,
        strongly_two_hopf,
        austere: austere < tol.flag,
        levi_flat,
        ruled: levi_flat && ruled < tol.flag,
        cmc: spread < tol.flag,
        mean_curvature: mean,
        mean_curvature_spread: spread,
        residuals,
        tolerances: *tol,
        points,
    })
}
