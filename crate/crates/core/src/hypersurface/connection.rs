//! Derivatives of the adapted frame and the connection identities of `h = 2`
//! hypersurfaces.

use std::collections::BTreeMap;

use nalgebra::{DVector, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AdaptedFrame, HypersurfacePatch};
use crate::ambient::{cscale, C3};
use crate::error::{GeometryError, Result};

/// Which table of connection coefficients to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionModel {
    /// Any `h = 2` point with three distinct principal curvatures.
    Generic,
    /// Strongly 2-Hopf hypersurfaces (spectrum constant along `D`).
    StronglyTwoHopf,
}

/// Frame at a point together with its first derivatives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameJet {
    pub frame: AdaptedFrame,
    /// Coordinate components of `U`, `V`, `A`.
    pub coords: [[f64; 3]; 3],
    /// `nabla[X][Y][k] = ⟨∇_X Y, E_k⟩` with `X, Y, E ∈ (U, V, A)`.
    pub nabla: [[[f64; 3]; 3]; 3],
    /// `derivs[f][X]` for `f ∈ (α, β, γ, a, b)` and `X ∈ (U, V, A)`.
    pub derivs: [[f64; 3]; 5],
    /// Components of `[U,V]` on `(U, V, A)` from coordinate differences.
    pub bracket_uv: [f64; 3],
}

impl FrameJet {
    /// `|⟨[U,V], A⟩|`.
    pub fn integrability(&self) -> f64 {
        self.bracket_uv[2].abs()
    }

    /// `max(|Uα|, |Vα|, |Uβ|, |Vβ|)`.
    pub fn spectrum_derivative(&self) -> f64 {
        let d = &self.derivs;
        d[0][0].abs().max(d[0][1].abs()).max(d[1][0].abs()).max(d[1][1].abs())
    }

    /// `max |[U,V] − (∇_U V − ∇_V U)|` over the three components.
    pub fn torsion_consistency(&self) -> f64 {
        (0..3)
            .map(|k| (self.bracket_uv[k] - (self.nabla[0][1][k] - self.nabla[1][0][k])).abs())
            .fold(0.0, f64::max)
    }
}

/// Residuals of the connection identities at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReport {
    pub model: ConnectionModel,
    pub params: [f64; 3],
    /// `|numeric − formula| / max(1, |formula|)` per named entry.
    #[serde(with = "crate::serde_f64::map")]
    pub residuals: BTreeMap<String, f64>,
    #[serde(with = "crate::serde_f64")]
    pub max_residual: f64,
    /// Reason the comparison was not made (degenerate spectrum).
    pub skipped: Option<String>,
    pub passed: bool,
}

const SCALARS: usize = 18;
const COORDS: usize = 23;
const LEN: usize = 32;

fn pack(frame: &AdaptedFrame, coords: &[Vector3<f64>; 3], phase: Complex64) -> DVector<f64> {
    let mut out = DVector::zeros(LEN);
    for (k, v) in [&frame.frame_u, &frame.frame_v, &frame.frame_a].iter().enumerate() {
        let w = cscale(&v.vec, phase);
        for i in 0..3 {
            out[6 * k + 2 * i] = w[i].re;
            out[6 * k + 2 * i + 1] = w[i].im;
        }
    }
    let sc = [frame.alpha, frame.beta, frame.gamma, frame.a, frame.b];
    for (k, v) in sc.iter().enumerate() {
        out[SCALARS + k] = *v;
    }
    for (k, c) in coords.iter().enumerate() {
        for i in 0..3 {
            out[COORDS + 3 * k + i] = c[i];
        }
    }
    out
}

fn unpack_vec(d: &DVector<f64>, k: usize) -> C3 {
    C3::from_fn(|i, _| Complex64::new(d[6 * k + 2 * i], d[6 * k + 2 * i + 1]))
}

/// Frame, its coordinate components and the phase-aligned packing at `x`.
fn sample(patch: &HypersurfacePatch, x: [f64; 3], z0: &C3) -> Result<(AdaptedFrame, [Vector3<f64>; 3], DVector<f64>)> {
    let g = patch.analyze(x)?;
    let f = g.adapted_frame(patch.diff.tau_mult)?;
    let coords = [&f.frame_u, &f.frame_v, &f.frame_a].map(|v| g.coords(&v.vec));
    let phase = patch.space.align_phase(&g.jet.point.rep, z0);
    let packed = pack(&f, &coords, phase);
    Ok((f, coords, packed))
}

/// Adapted frame at `x` and its derivatives along `U`, `V`, `A`.
pub fn frame_jet(patch: &HypersurfacePatch, x: [f64; 3]) -> Result<FrameJet> {
    let z0 = patch.point(x)?.rep;
    let (frame, coords, _) = sample(patch, x, &z0)?;
    let mut d = Vec::with_capacity(3);
    for c in &coords {
        let scale = c.amax();
        if scale == 0.0 {
            return Err(GeometryError::InvalidParameter("frame vector has no coordinate components".into()));
        }
        let h = patch.diff.field_step / scale;
        let mut acc = DVector::zeros(LEN);
        for (off, w) in crate::fd::D1 {
            let y = [0, 1, 2].map(|k| x[k] + off * h * c[k]);
            let (_, _, packed) = sample(patch, y, &z0)?;
            acc += packed * (w / h);
        }
        d.push(acc);
    }
    let s = &patch.space;
    let e = [frame.frame_u.vec, frame.frame_v.vec, frame.frame_a.vec];
    let mut nabla = [[[0.0; 3]; 3]; 3];
    for xi in 0..3 {
        for yi in 0..3 {
            let dy = unpack_vec(&d[xi], yi);
            for k in 0..3 {
                nabla[xi][yi][k] = s.g(&dy, &e[k]);
            }
        }
    }
    let mut derivs = [[0.0; 3]; 5];
    for (f, row) in derivs.iter_mut().enumerate() {
        for xi in 0..3 {
            row[xi] = d[xi][SCALARS + f];
        }
    }
    // [U,V]^k = U(c_V^k) − V(c_U^k)
    let g = patch.jet1(x)?;
    let br: C3 = (0..3)
        .map(|k| {
            let comp = d[0][COORDS + 3 + k] - d[1][COORDS + k];
            cscale(&g.d1[k], comp.into())
        })
        .sum();
    let bracket_uv = [0, 1, 2].map(|k| s.g(&br, &e[k]));
    Ok(FrameJet {
        frame,
        coords: coords.map(|c| [c[0], c[1], c[2]]),
        nabla,
        derivs,
        bracket_uv,
    })
}

struct Vals {
    al: f64,
    be: f64,
    ga: f64,
    a: f64,
    b: f64,
    c: f64,
    // derivatives: first letter is the direction
    v_al: f64,
    a_al: f64,
    u_be: f64,
    a_be: f64,
    u_ga: f64,
    v_ga: f64,
    a_b: f64,
}

impl Vals {
    fn new(j: &FrameJet, c: f64) -> Self {
        let f = &j.frame;
        let d = &j.derivs;
        Vals {
            al: f.alpha,
            be: f.beta,
            ga: f.gamma,
            a: f.a,
            b: f.b,
            c,
            v_al: d[0][1],
            a_al: d[0][2],
            u_be: d[1][0],
            a_be: d[1][2],
            u_ga: d[2][0],
            v_ga: d[2][1],
            a_b: d[4][2],
        }
    }

    /// `∇_X Y` components on `(U, V, A)` for any `h = 2` point.
    fn generic_table(&self) -> [[[f64; 3]; 3]; 3] {
        let Vals { al, be, ga, a, b, c, v_al, a_al, u_be, a_be, u_ga, v_ga, a_b } = *self;
        let uu_a = -(3.0 * a * b * c - 4.0 * a_al) / (4.0 * (al - ga));
        let uv_a = al + (3.0 * a * a * b * c - 4.0 * a * a_al) / (4.0 * b * (al - ga));
        let vv_a = (3.0 * a * b * c + 4.0 * a_be) / (4.0 * (be - ga));
        let vu_a = -(be + (3.0 * a * b * b * c + 4.0 * b * a_be) / (4.0 * a * (be - ga)));
        let au_v = ga - a_b / a;
        [
            [
                [0.0, v_al / (al - be), uu_a],
                [-v_al / (al - be), 0.0, uv_a],
                [-uu_a, -uv_a, 0.0],
            ],
            [
                [0.0, u_be / (al - be), vu_a],
                [-u_be / (al - be), 0.0, vv_a],
                [-vu_a, -vv_a, 0.0],
            ],
            [
                [0.0, au_v, u_ga / (al - ga)],
                [-au_v, 0.0, v_ga / (be - ga)],
                [-u_ga / (al - ga), -v_ga / (be - ga), 0.0],
            ],
        ]
    }

    /// `∇_X Y` components when the spectrum is constant along `D`.
    fn strong_table(&self) -> [[[f64; 3]; 3]; 3] {
        let Vals { al, be, ga, a, b, c, .. } = *self;
        let d = al - be;
        let uu = -b * (c - 4.0 * al * d) / (4.0 * a * d);
        let uv = c / (4.0 * d);
        let vv = -a * (c + 4.0 * be * d) / (4.0 * b * d);
        let k = c * (be - ga) / (4.0 * d * d) - c * (a * a - 2.0 * b * b) / (4.0 * d);
        [
            [[0.0, 0.0, uu], [0.0, 0.0, uv], [-uu, -uv, 0.0]],
            [[0.0, 0.0, uv], [0.0, 0.0, vv], [-uv, -vv, 0.0]],
            [[0.0, k, 0.0], [-k, 0.0, 0.0], [0.0, 0.0, 0.0]],
        ]
    }

    /// Derivative identities valid at every `h = 2` point: (name, numeric, formula).
    fn generic_derivatives(&self, j: &FrameJet) -> Vec<(&'static str, f64, f64)> {
        let Vals { al, be, ga, a, b, c, v_al, a_al, u_be, a_be, u_ga, v_ga, a_b } = *self;
        let d = &j.derivs;
        let (ua, va, aa, ub, vb) = (d[3][0], d[3][1], d[3][2], d[4][0], d[4][1]);
        let ab_f = a * ga + a * c * (a * a - 2.0 * b * b) / (4.0 * (al - be))
            - 3.0 * a.powi(3) * c * (be - ga) / (4.0 * (al - be) * (al - ga))
            - al * a * (be - ga) / (al - be)
            + a * a * (be - ga) / (b * (al - be) * (al - ga)) * a_al;
        let abe_f = -3.0 * a * b * c / 4.0 - a * be * (be - ga) / b - a * c * (be - ga) / (4.0 * b * (al - ga))
            - a * al * (be - ga).powi(2) / (b * (al - ga))
            - 3.0 * a.powi(3) * c * (be - ga).powi(2) / (4.0 * b * (al - ga).powi(2))
            + a * a * (be - ga).powi(2) / (b * b * (al - ga).powi(2)) * a_al;
        vec![
            ("U(a)", ua, b * v_al / (al - be)),
            ("V(a)", va, b * u_be / (al - be)),
            ("A(a)", aa, -b * a_b / a),
            ("U(b)", ub, -a * v_al / (al - be)),
            ("V(b)", vb, -a * u_be / (al - be)),
            ("V(gamma)", v_ga, a * (ga - be) * u_ga / (b * (al - ga))),
            ("A(b)", a_b, ab_f),
            ("A(beta)", a_be, abe_f),
        ]
    }

    /// Identities of strongly 2-Hopf hypersurfaces.
    fn strong_derivatives(&self, j: &FrameJet) -> Vec<(&'static str, f64, f64)> {
        let Vals { al, be, ga, a, b, c, a_al, a_be, a_b, .. } = *self;
        let d = &j.derivs;
        let mut out = vec![
            ("A(alpha)", a_al, al * b * (al - ga) / a + b * c * (al - ga) / (4.0 * a * (be - al)) + 3.0 * a * b * c / 4.0),
            ("A(beta)", a_be, -be * a * (be - ga) / b - a * c * (be - ga) / (4.0 * b * (al - be)) - 3.0 * a * b * c / 4.0),
            (
                "A(b)",
                a_b,
                a * (c * (a * a - 2.0 * b * b) / (4.0 * (al - be)) - c * (be - ga) / (4.0 * (al - be).powi(2)) + ga),
            ),
        ];
        let names = [
            ["U(alpha)", "V(alpha)"],
            ["U(beta)", "V(beta)"],
            ["U(gamma)", "V(gamma)"],
            ["U(a)", "V(a)"],
            ["U(b)", "V(b)"],
        ];
        for (f, pair) in names.iter().enumerate() {
            out.push((pair[0], d[f][0], 0.0));
            out.push((pair[1], d[f][1], 0.0));
        }
        out
    }
}

const FRAME_NAMES: [&str; 3] = ["U", "V", "A"];

/// Compares numeric connection coefficients and frame derivatives with the
/// closed-form tables of `model`.
pub fn verify_connection_formulas(
    patch: &HypersurfacePatch,
    x: [f64; 3],
    model: ConnectionModel,
    tol: f64,
) -> Result<ConnectionReport> {
    let j = frame_jet(patch, x)?;
    Ok(compare_connection(&j, patch.space.c(), patch.diff.tau_mult, model, tol))
}

/// Same comparison for an already computed frame jet.
pub fn compare_connection(j: &FrameJet, c: f64, tau_mult: f64, model: ConnectionModel, tol: f64) -> ConnectionReport {
    let v = Vals::new(j, c);
    let f = &j.frame;
    let scale = [f.alpha, f.beta, f.gamma].iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let gap = match model {
        ConnectionModel::Generic => (f.alpha - f.beta).abs().min((f.alpha - f.gamma).abs()).min((f.beta - f.gamma).abs()),
        ConnectionModel::StronglyTwoHopf => (f.alpha - f.beta).abs(),
    };
    let mut report = ConnectionReport {
        model,
        params: f.params,
        residuals: BTreeMap::new(),
        max_residual: 0.0,
        skipped: None,
        passed: true,
    };
    if gap < 10.0 * tau_mult * scale {
        report.skipped = Some(format!("principal curvature gap {gap:.3e} below 10 tau_mult"));
        return report;
    }
    let (table, extra) = match model {
        ConnectionModel::Generic => (v.generic_table(), v.generic_derivatives(j)),
        ConnectionModel::StronglyTwoHopf => (v.strong_table(), v.strong_derivatives(j)),
    };
    let rel = |num: f64, formula: f64| (num - formula).abs() / formula.abs().max(1.0);
    for xi in 0..3 {
        for yi in 0..3 {
            for k in 0..3 {
                let name = format!("nabla_{}{}.{}", FRAME_NAMES[xi], FRAME_NAMES[yi], FRAME_NAMES[k]);
                report.residuals.insert(name, rel(j.nabla[xi][yi][k], table[xi][yi][k]));
            }
        }
    }
    for (name, num, formula) in extra {
        report.residuals.insert(name.to_string(), rel(num, formula));
    }
    report.max_residual = report.residuals.values().cloned().fold(0.0, f64::max);
    report.passed = report.max_residual < tol;
    report
}
