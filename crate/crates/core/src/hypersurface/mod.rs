//! Parametrized real hypersurfaces: jets, shape operator, adapted frame,
//! Levi form, and the classification and identity checks built on them.
//!
//! A patch is a map `(t, s1, s2) ↦ z ∈ C³`. Derivatives are taken on
//! representatives phase-aligned to the base point, which makes the
//! difference quotients horizontal and turns `hor(∂ᵢ∂ⱼ z)` into `∇̄_{∂ᵢ}∂ⱼ`.

mod classify;
mod connection;
mod gauss_codazzi;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambient::{cscale, AmbientPoint, AmbientTangent, SpaceForm, C3};
use crate::error::{GeometryError, Result};
use crate::fd;

pub use classify::{classify, ClassificationReport, PointReport, Tolerances};
pub use connection::{compare_connection, frame_jet, verify_connection_formulas, ConnectionModel, ConnectionReport, FrameJet};
pub use gauss_codazzi::{verify_gauss_codazzi, GaussCodazziOptions, GaussCodazziReport};

/// Gram determinant of the coordinate velocities below which a patch is not an immersion.
pub const IMMERSION_THRESHOLD: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Finite-difference and clustering settings of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffConfig {
    /// Step for first and second derivatives of the map.
    pub jet_step: f64,
    /// Step for derivatives of fields that are themselves computed from jets.
    pub field_step: f64,
    /// Eigenvalue clustering tolerance, relative to `max(1, max|λ|)`.
    pub tau_mult: f64,
    /// Projection threshold for counting `h`.
    pub tau_proj: f64,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig { jet_step: 1e-3, field_step: 1e-2, tau_mult: 1e-4, tau_proj: 1e-4 }
    }
}

pub type PatchFn = Arc<dyn Fn([f64; 3]) -> C3 + Send + Sync>;

/// A three-parameter hypersurface patch.
#[derive(Clone)]
pub struct HypersurfacePatch {
    pub name: String,
    pub space: SpaceForm,
    map: PatchFn,
    /// Declared parameter box; the map must stay defined a few steps beyond it.
    pub bounds: [[f64; 2]; 3],
    pub diff: DiffConfig,
    /// Sign applied to the complex-orientation normal.
    pub orientation: f64,
}

impl fmt::Debug for HypersurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HypersurfacePatch")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("bounds", &self.bounds)
            .field("diff", &self.diff)
            .field("orientation", &self.orientation)
            .finish()
    }
}

/// First and second derivatives of a patch at one parameter.
#[derive(Debug, Clone)]
pub struct Jet {
    pub params: [f64; 3],
    pub point: AmbientPoint,
    /// Coordinate velocities `Xᵢ`.
    pub d1: [C3; 3],
    /// `hor(∂ᵢ∂ⱼ z)`, i.e. `∇̄_{Xᵢ}Xⱼ`.
    pub d2: Option<[[C3; 3]; 3]>,
    pub gram: Matrix3<f64>,
}

/// Eigen-decomposition of the shape operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeSpectrum {
    /// Principal curvatures, descending.
    pub values: [f64; 3],
    pub vectors: [AmbientTangent; 3],
    /// Index groups of eigenvalues equal within `τ_mult`.
    pub clusters: Vec<Vec<usize>>,
    /// Asymmetry of the shape operator before symmetrization.
    pub symmetry_defect: f64,
    /// `max |S e − λ e|`.
    pub eigen_residual: f64,
}

/// Everything computed at one parameter from a second-order jet.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub jet: Jet,
    pub normal: C3,
    /// `IIᵢⱼ = ⟨∇̄_{Xᵢ}Xⱼ, ξ⟩`.
    pub ii: Matrix3<f64>,
    /// Orthonormal tangent frame and the shape operator in it.
    pub frame: [C3; 3],
    pub shape: Matrix3<f64>,
    pub spectrum: ShapeSpectrum,
    space: SpaceForm,
    tau_proj: f64,
}

/// The frame `{U, V, A, ξ}` of an `h = 2` point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptedFrame {
    pub params: [f64; 3],
    pub xi: AmbientTangent,
    pub frame_u: AmbientTangent,
    pub frame_v: AmbientTangent,
    pub frame_a: AmbientTangent,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AdaptedFrame {
    /// Residuals of `Jξ = aU + bV`, `JU = −bA − aξ`, `JV = aA − bξ`, `JA = bU − aV`.
    pub fn identity_residuals(&self) -> [f64; 4] {
        let (u, v, a_, x) = (self.frame_u.vec, self.frame_v.vec, self.frame_a.vec, self.xi.vec);
        let (a, b) = (Complex64::from(self.a), Complex64::from(self.b));
        let j = |w: &C3| cscale(w, I);
        [
            (j(&x) - u * a - v * b).norm(),
            (j(&u) + a_ * b + x * a).norm(),
            (j(&v) - a_ * a + x * b).norm(),
            (j(&a_) - u * b + v * a).norm(),
        ]
    }
}

fn unit(space: &SpaceForm, v: &C3) -> C3 {
    cscale(v, (1.0 / space.norm(v)).into())
}

impl HypersurfacePatch {
    pub fn new(name: impl Into<String>, space: SpaceForm, bounds: [[f64; 2]; 3], map: PatchFn) -> Self {
        HypersurfacePatch { name: name.into(), space, map, bounds, diff: DiffConfig::default(), orientation: 1.0 }
    }

    pub fn with_orientation(mut self, sign: f64) -> Self {
        self.orientation = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    pub fn with_diff(mut self, diff: DiffConfig) -> Self {
        self.diff = diff;
        self
    }

    /// Same patch with the orientation reversed.
    pub fn flipped(&self) -> Self {
        self.clone().with_orientation(-self.orientation)
    }

    /// Flips the patch if needed so that its normal at `x` has a positive component along `target(p)`.
    pub fn oriented_along(self, x: [f64; 3], target: impl Fn(&AmbientPoint) -> C3) -> Result<Self> {
        let g = self.analyze(x)?;
        let t = target(&g.jet.point);
        if self.space.g(&g.normal, &t) < 0.0 {
            Ok(self.flipped())
        } else {
            Ok(self)
        }
    }

    /// Raw map value.
    pub fn eval(&self, x: [f64; 3]) -> C3 {
        (self.map)(x)
    }

    pub fn point(&self, x: [f64; 3]) -> Result<AmbientPoint> {
        self.space.point(self.eval(x))
    }

    fn aligned(&self, x: [f64; 3], z0: &C3) -> C3 {
        let z = match self.space.point(self.eval(x)) {
            Ok(p) => p.rep,
            Err(_) => return C3::repeat(Complex64::from(f64::NAN)),
        };
        cscale(&z, self.space.align_phase(&z, z0))
    }

    /// Midpoint of the parameter box.
    pub fn center(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| 0.5 * (self.bounds[k][0] + self.bounds[k][1]))
    }

    /// Regular grid with `n[k]` points per axis spanning the box (midpoint when `n[k] = 1`).
    pub fn grid(&self, n: [usize; 3]) -> Vec<[f64; 3]> {
        let axis = |k: usize| -> Vec<f64> {
            let [lo, hi] = self.bounds[k];
            match n[k] {
                0 => vec![],
                1 => vec![0.5 * (lo + hi)],
                m => (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect(),
            }
        };
        let (a, b, c) = (axis(0), axis(1), axis(2));
        let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
        for t in &a {
            for s1 in &b {
                for s2 in &c {
                    out.push([*t, *s1, *s2]);
                }
            }
        }
        out
    }

    fn shifted(x: [f64; 3], k: usize, e: f64) -> [f64; 3] {
        let mut y = x;
        y[k] += e;
        y
    }

    /// First-order jet; fails where the coordinate velocities are dependent.
    pub fn jet1(&self, x: [f64; 3]) -> Result<Jet> {
        let p = self.point(x)?;
        let h = self.diff.jet_step;
        let d1 = [0, 1, 2].map(|k| {
            let d = fd::d1(|e| self.aligned(Self::shifted(x, k, e), &p.rep), h);
            self.space.horizontal(&p.rep, &d)
        });
        let gram = Matrix3::from_fn(|i, j| self.space.g(&d1[i], &d1[j]));
        let det = gram.determinant();
        if !(det > IMMERSION_THRESHOLD) {
            return Err(GeometryError::Immersion { params: x, gram: det });
        }
        Ok(Jet { params: x, point: p, d1, d2: None, gram })
    }

    /// Second-order jet.
    pub fn jet2(&self, x: [f64; 3]) -> Result<Jet> {
        let mut jet = self.jet1(x)?;
        let z0 = jet.point.rep;
        let h = self.diff.jet_step;
        let mut d2 = [[C3::zeros(); 3]; 3];
        for i in 0..3 {
            let dd = fd::d2(|e| self.aligned(Self::shifted(x, i, e), &z0), h);
            d2[i][i] = self.space.horizontal(&z0, &dd);
            for j in (i + 1)..3 {
                let mixed = fd::d1(
                    |e| fd::d1(|f| self.aligned(Self::shifted(Self::shifted(x, i, e), j, f), &z0), h),
                    h,
                );
                let m = self.space.horizontal(&z0, &mixed);
                d2[i][j] = m;
                d2[j][i] = m;
            }
        }
        jet.d2 = Some(d2);
        Ok(jet)
    }

    /// Unit normal with the complex orientation times `self.orientation`.
    fn normal_of(&self, jet: &Jet) -> Result<C3> {
        let s = &self.space;
        let z = &jet.point.rep;
        let mut ortho: Vec<C3> = Vec::with_capacity(3);
        for v in &jet.d1 {
            let mut w = *v;
            for o in &ortho {
                w -= cscale(o, s.g(&w, o).into());
            }
            ortho.push(unit(s, &w));
        }
        let mut best = C3::zeros();
        let mut best_norm = 0.0;
        for k in 0..3 {
            for ph in [Complex64::from(1.0), I] {
                let mut e = C3::zeros();
                e[k] = ph;
                let mut w = s.horizontal(z, &e);
                for o in &ortho {
                    w -= cscale(o, s.g(&w, o).into());
                }
                let n = s.norm(&w);
                if n > best_norm {
                    best_norm = n;
                    best = w;
                }
            }
        }
        if best_norm < 1e-8 {
            return Err(GeometryError::NotNormal(best_norm));
        }
        let n = unit(s, &best);
        let basis = s.horizontal_basis(&jet.point);
        let cols = [ortho[0], ortho[1], ortho[2], n];
        let m = Matrix4::from_fn(|i, j| s.g(&cols[j], &basis[i]));
        let sign = m.determinant().signum() * self.orientation;
        Ok(cscale(&n, sign.into()))
    }

    /// Full pointwise analysis from a second-order jet.
    pub fn analyze(&self, x: [f64; 3]) -> Result<PointGeometry> {
        let jet = self.jet2(x)?;
        self.analyze_jet(jet)
    }

    fn analyze_jet(&self, jet: Jet) -> Result<PointGeometry> {
        let s = &self.space;
        let normal = self.normal_of(&jet)?;
        let d2 = jet.d2.expect("second-order jet");
        let ii = Matrix3::from_fn(|i, j| s.g(&d2[i][j], &normal));
        // Gram-Schmidt coefficients: frame_i = Σ t_ik X_k
        let mut t = Matrix3::<f64>::zeros();
        let mut frame = [C3::zeros(); 3];
        for i in 0..3 {
            let mut row = Vector3::zeros();
            row[i] = 1.0;
            for k in 0..i {
                let proj = s.g(&jet.d1[i], &frame[k]);
                row -= t.row(k).transpose() * proj;
            }
            let v: C3 = (0..3).map(|k| cscale(&jet.d1[k], row[k].into())).sum();
            let n = s.norm(&v);
            t.set_row(i, &(row / n).transpose());
            frame[i] = cscale(&v, (1.0 / n).into());
        }
        let shape = t * ii * t.transpose();
        let spectrum = self.spectrum_of(&jet.point, &frame, &shape, 0.0);
        Ok(PointGeometry { jet, normal, ii, frame, shape, spectrum, space: *s, tau_proj: self.diff.tau_proj })
    }

    fn spectrum_of(&self, p: &AmbientPoint, frame: &[C3; 3], shape: &Matrix3<f64>, asym: f64) -> ShapeSpectrum {
        let sym = (shape + shape.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = idx.map(|k| eig.eigenvalues[k]);
        let coeff = idx.map(|k| eig.eigenvectors.column(k).into_owned());
        let mut residual: f64 = 0.0;
        for (k, c) in coeff.iter().enumerate() {
            residual = residual.max((sym * c - c * values[k]).norm());
        }
        let vectors = coeff.map(|c| AmbientTangent {
            base: *p,
            vec: (0..3).map(|k| cscale(&frame[k], c[k].into())).sum(),
        });
        ShapeSpectrum { values, vectors, clusters: cluster(&values, self.diff.tau_mult), symmetry_defect: asym, eigen_residual: residual }
    }

    /// Shape operator and unit normal at `x`.
    ///
    /// The operator is assembled from the second fundamental form; the
    /// asymmetry reported in the spectrum comes from an independent
    /// Weingarten evaluation `S Xᵢ = −tan(∂ᵢ ξ)`.
    pub fn shape_operator(&self, x: [f64; 3]) -> Result<(ShapeSpectrum, AmbientTangent)> {
        let g = self.analyze(x)?;
        let s = &self.space;
        let z0 = g.jet.point.rep;
        let h = self.diff.field_step;
        let normal_at = |y: [f64; 3]| -> C3 {
            match self.jet1(y).and_then(|j| self.normal_of(&j).map(|n| (j, n))) {
                Ok((j, n)) => cscale(&n, s.align_phase(&j.point.rep, &z0)),
                Err(_) => C3::repeat(Complex64::from(f64::NAN)),
            }
        };
        let mut w = Matrix3::zeros();
        for i in 0..3 {
            let coeffs = g.coords(&g.frame[i]);
            let dxi = fd::d1(
                |e| normal_at([0, 1, 2].map(|k| x[k] + e * coeffs[k])),
                h,
            );
            for j in 0..3 {
                w[(i, j)] = -s.g(&dxi, &g.frame[j]);
            }
        }
        let asym = (w - w.transpose()).norm();
        let route = (((w + w.transpose()) * 0.5) - g.shape).norm();
        let mut spectrum = self.spectrum_of(&g.jet.point, &g.frame, &g.shape, asym);
        spectrum.eigen_residual = spectrum.eigen_residual.max(route);
        let xi = AmbientTangent { base: g.jet.point, vec: g.normal };
        Ok((spectrum, xi))
    }

    /// Number of principal-curvature clusters onto which `Jξ` projects beyond `tau_proj`.
    pub fn hopf_projection_count(&self, x: [f64; 3], tau_proj: f64) -> Result<usize> {
        Ok(self.analyze(x)?.hopf_count(tau_proj))
    }

    pub fn adapted_frame(&self, x: [f64; 3]) -> Result<AdaptedFrame> {
        self.analyze(x)?.adapted_frame(self.diff.tau_mult)
    }

    /// `L(X,Y) = ⟨SX,Y⟩ + ⟨SJX,JY⟩` for tangent `X, Y` orthogonal to `Jξ`.
    pub fn levi_form(&self, x: [f64; 3], v: &AmbientTangent, w: &AmbientTangent) -> Result<f64> {
        let g = self.analyze(x)?;
        let p = g.jet.point;
        let s = &self.space;
        let (vv, wv) = (s.vec_at(&p, v)?, s.vec_at(&p, w)?);
        let jxi = g.hopf_vector();
        for u in [&vv, &wv] {
            let d = s.g(u, &jxi).abs().max(s.g(u, &g.normal).abs()) / s.norm(u).max(1e-300);
            if d > 1e-6 {
                return Err(GeometryError::NotComplexDistribution(d));
            }
        }
        Ok(g.levi(&vv, &wv))
    }

    /// `|2α(β+γ) − 4βγ + c|` at a Hopf point, `α` the Hopf principal curvature.
    pub fn hopf_cmc_relation_check(&self, x: [f64; 3], tau_proj: f64) -> Result<f64> {
        let g = self.analyze(x)?;
        let h = g.hopf_count(tau_proj);
        if h != 1 {
            return Err(GeometryError::HopfCount { found: h, required: 1 });
        }
        Ok(g.hopf_relation())
    }
}

/// Groups consecutive (descending) eigenvalues closer than `tau·max(1, max|λ|)`.
pub fn cluster(values: &[f64; 3], tau: f64) -> Vec<Vec<usize>> {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..3 {
        if (values[k - 1] - values[k]).abs() <= tau * scale {
            out.last_mut().expect("nonempty").push(k);
        } else {
            out.push(vec![k]);
        }
    }
    out
}

impl PointGeometry {
    pub fn point(&self) -> AmbientPoint {
        self.jet.point
    }

    pub fn hopf_vector(&self) -> C3 {
        cscale(&self.normal, I)
    }

    /// Coordinate components `c` with `v = Σ cᵏ Xₖ` (tangential part).
    pub fn coords(&self, v: &C3) -> Vector3<f64> {
        let rhs = Vector3::from_fn(|i, _| self.g_impl(v, &self.jet.d1[i]));
        self.jet.gram.try_inverse().unwrap_or_else(Matrix3::zeros) * rhs
    }

    fn g_impl(&self, v: &C3, w: &C3) -> f64 {
        self.space.g(v, w)
    }

    /// `S v` for a tangent vector.
    pub fn apply_shape(&self, v: &C3) -> C3 {
        let mut out = C3::zeros();
        for (k, e) in self.spectrum.vectors.iter().enumerate() {
            out += cscale(&e.vec, (self.spectrum.values[k] * self.g_impl(v, &e.vec)).into());
        }
        out
    }

    /// Norm of the projection of `Jξ` onto each eigenvalue cluster.
    pub fn cluster_projections(&self) -> Vec<f64> {
        let jxi = self.hopf_vector();
        self.spectrum
            .clusters
            .iter()
            .map(|c| c.iter().map(|&k| self.g_impl(&jxi, &self.spectrum.vectors[k].vec).powi(2)).sum::<f64>().sqrt())
            .collect()
    }

    pub fn hopf_count(&self, tau_proj: f64) -> usize {
        self.cluster_projections().iter().filter(|&&p| p > tau_proj).count()
    }

    /// `h` at the configured projection threshold.
    pub fn h(&self) -> usize {
        self.hopf_count(self.tau_proj)
    }

    pub fn mean_curvature(&self) -> f64 {
        self.spectrum.values.iter().sum()
    }

    /// Unit `X` in the maximal complex distribution (`X ⊥ ξ, Jξ`).
    pub fn complex_direction(&self) -> C3 {
        let jxi = self.hopf_vector();
        let mut best = C3::zeros();
        let mut best_n = 0.0;
        for f in &self.frame {
            let w = f - cscale(&jxi, self.g_impl(f, &jxi).into());
            let n = self.g_impl(&w, &w).sqrt();
            if n > best_n {
                best_n = n;
                best = cscale(&w, (1.0 / n).into());
            }
        }
        best
    }

    pub fn levi(&self, v: &C3, w: &C3) -> f64 {
        let jv = cscale(v, I);
        let jw = cscale(w, I);
        self.g_impl(&self.apply_shape(v), w) + self.g_impl(&self.apply_shape(&jv), &jw)
    }

    /// `S` restricted and projected to the maximal complex distribution, in the basis `(X, JX)`.
    pub fn complex_block(&self) -> Matrix2<f64> {
        let x = self.complex_direction();
        let jx = cscale(&x, I);
        let b = [x, jx];
        Matrix2::from_fn(|i, j| self.g_impl(&self.apply_shape(&b[i]), &b[j]))
    }

    /// `L(X,X)` on a unit vector of the maximal complex distribution.
    pub fn levi_residual(&self) -> f64 {
        let m = self.complex_block();
        m[(0, 0)] + m[(1, 1)]
    }

    /// Size of the complex-distribution block of `S`; zero for ruled hypersurfaces.
    pub fn ruled_residual(&self) -> f64 {
        let m = self.complex_block();
        m[(0, 0)].abs().max(m[(1, 1)].abs()).max(m[(0, 1)].abs())
    }

    /// `max(|λ₂|, |λ₁ + λ₃|)`.
    pub fn austere_residual(&self) -> f64 {
        let v = self.spectrum.values;
        v[1].abs().max((v[0] + v[2]).abs())
    }

    pub fn hopf_relation(&self) -> f64 {
        let jxi = self.hopf_vector();
        let alpha = self.g_impl(&self.apply_shape(&jxi), &jxi);
        let m = self.complex_block();
        let sym = (m + m.transpose()) * 0.5;
        let e = SymmetricEigen::new(sym).eigenvalues;
        let (beta, gamma) = (e[0], e[1]);
        (2.0 * alpha * (beta + gamma) - 4.0 * beta * gamma + self.space.c()).abs()
    }

    pub fn adapted_frame(&self, tau_mult: f64) -> Result<AdaptedFrame> {
        let jxi = self.hopf_vector();
        let proj = self.cluster_projections();
        let active: Vec<usize> = (0..proj.len()).filter(|&k| proj[k] > self.tau_proj).collect();
        if active.len() != 2 {
            return Err(GeometryError::HopfCount { found: active.len(), required: 2 });
        }
        let part = |ci: usize| -> C3 {
            self.spectrum.clusters[ci]
                .iter()
                .map(|&k| {
                    let e = &self.spectrum.vectors[k].vec;
                    cscale(e, self.g_impl(&jxi, e).into())
                })
                .sum()
        };
        let (pu, pv) = (part(active[0]), part(active[1]));
        let (mut a, mut b) = (self.g_impl(&pu, &pu).sqrt(), self.g_impl(&pv, &pv).sqrt());
        let u = cscale(&pu, (1.0 / a).into());
        let v = cscale(&pv, (1.0 / b).into());
        let n = (a * a + b * b).sqrt();
        a /= n;
        b /= n;
        let xi = self.normal;
        let mut big_a = -(cscale(&u, I) + cscale(&xi, a.into())) * Complex64::from(1.0 / b);
        big_a = cscale(&big_a, (1.0 / self.g_impl(&big_a, &big_a).sqrt()).into());
        let q = |w: &C3| self.g_impl(&self.apply_shape(w), w);
        let (alpha, beta, gamma) = (q(&u), q(&v), q(&big_a));
        let scale = self.spectrum.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if (alpha - beta).abs() < 10.0 * tau_mult * scale {
            return Err(GeometryError::ClusterAmbiguity((alpha - beta).abs()));
        }
        let p = self.jet.point;
        let wrap = |vec: C3| AmbientTangent { base: p, vec };
        Ok(AdaptedFrame {
            params: self.jet.params,
            xi: wrap(xi),
            frame_u: wrap(u),
            frame_v: wrap(v),
            frame_a: wrap(big_a),
            a,
            b,
            alpha,
            beta,
            gamma,
        })
    }
}
