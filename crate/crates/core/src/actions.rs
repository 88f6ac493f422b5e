//! The five cohomogeneity-two polar actions on `CP²` and `CH²`.
//!
//! Every action here is abelian with generators `iB`, `B` real and `εB`
//! symmetric, so the real slice `{[x] : x ∈ R³}` is a section for all of
//! them. The generator matrices ship in `data/actions.json` and are validated
//! on load.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{cscale, AmbientPoint, AmbientTangent, CMat3, RealVec, SectionChart, SpaceForm, C3};
use crate::error::{GeometryError, Result};

/// Gram determinant below which a point counts as singular.
pub const REGULARITY_THRESHOLD: f64 = 1e-10;
/// Iteration cap for the bisection of Φ.
pub const BISECTION_ITERS: usize = 60;

const TABLE: &str = include_str!("../data/actions.json");
const TABLE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionLabel {
    #[serde(rename = "CP2_TORUS")]
    Cp2Torus,
    #[serde(rename = "CH2_TORUS")]
    Ch2Torus,
    #[serde(rename = "CH2_G0")]
    Ch2G0,
    #[serde(rename = "CH2_K0_G2A")]
    Ch2K0G2a,
    #[serde(rename = "CH2_LINE_G2A")]
    Ch2LineG2a,
}

impl ActionLabel {
    pub const ALL: [ActionLabel; 5] =
        [Self::Cp2Torus, Self::Ch2Torus, Self::Ch2G0, Self::Ch2K0G2a, Self::Ch2LineG2a];

    /// Name used on the command line.
    pub fn cli_name(&self) -> &'static str {
        match self {
            Self::Cp2Torus => "cp2-torus",
            Self::Ch2Torus => "ch2-torus",
            Self::Ch2G0 => "ch2-g0",
            Self::Ch2K0G2a => "ch2-k0-g2a",
            Self::Ch2LineG2a => "ch2-line-g2a",
        }
    }

    pub fn table_name(&self) -> &'static str {
        match self {
            Self::Cp2Torus => "CP2_TORUS",
            Self::Ch2Torus => "CH2_TORUS",
            Self::Ch2G0 => "CH2_G0",
            Self::Ch2K0G2a => "CH2_K0_G2A",
            Self::Ch2LineG2a => "CH2_LINE_G2A",
        }
    }

    /// Curvature used when none is given: `4` or `−4`.
    pub fn default_curvature(&self) -> f64 {
        if *self == Self::Cp2Torus {
            4.0
        } else {
            -4.0
        }
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for ActionLabel {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.cli_name() == s || l.table_name() == s)
            .ok_or_else(|| GeometryError::UnknownAction(s.to_string()))
    }
}

#[derive(Deserialize)]
struct Table {
    schema_version: u32,
    actions: Vec<TableEntry>,
}

#[derive(Deserialize)]
struct TableEntry {
    label: ActionLabel,
    curvature_sign: i32,
    #[allow(dead_code)]
    description: String,
    generators: Vec<[[[f64; 2]; 3]; 3]>,
}

fn parse_matrix(m: &[[[f64; 2]; 3]; 3]) -> CMat3 {
    CMat3::from_fn(|i, j| Complex64::new(m[i][j][0], m[i][j][1]))
}

/// One polar action together with its section.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarActionSpec {
    pub label: ActionLabel,
    pub ambient: SpaceForm,
    pub generators: Vec<CMat3>,
    pub section: SectionChart,
}

/// Extrinsic data of the orbit through a section point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitData {
    pub point: AmbientPoint,
    /// Orthonormal basis of the orbit tangent space.
    pub tangent_basis: [AmbientTangent; 2],
    pub normal: AmbientTangent,
    /// `S_ξ` in `tangent_basis`.
    pub shape: [[f64; 2]; 2],
    pub mean_curvature_vector: AmbientTangent,
    /// `(α, β)` with `α ≥ β`.
    pub orbit_principal_curvatures: (f64, f64),
    /// Unit principal directions, signed so that `Jξ` has nonnegative components.
    pub principal_directions: [AmbientTangent; 2],
    /// `(a, b)`: components of `Jξ` along the principal directions.
    pub hopf_components: (f64, f64),
}

/// A zero of the obstruction map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfDirection {
    /// Angle from the transported `e1`.
    pub theta: f64,
    pub direction: [f64; 3],
    pub phi: f64,
}

/// Killing fields, their Gram matrix and its inverse at a point.
struct KillingJet {
    x: C3,
    k: [C3; 2],
    gram: Matrix2<f64>,
}

impl PolarActionSpec {
    /// Loads `label` from the shipped table with holomorphic curvature `c`.
    pub fn new(label: ActionLabel, c: f64) -> Result<Self> {
        let ambient = SpaceForm::new(c)?;
        let table: Table = serde_json::from_str(TABLE).map_err(|e| GeometryError::ActionTable(e.to_string()))?;
        if table.schema_version != TABLE_VERSION {
            return Err(GeometryError::ActionTable(format!("schema_version {}", table.schema_version)));
        }
        let entry = table
            .actions
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| GeometryError::ActionTable(format!("missing {}", label.table_name())))?;
        if (entry.curvature_sign > 0) != (c > 0.0) {
            return Err(GeometryError::InvalidCurvature(c));
        }
        let generators: Vec<CMat3> = entry.generators.iter().map(parse_matrix).collect();
        let spec = PolarActionSpec { label, ambient, generators, section: ambient.real_section() };
        spec.validate()?;
        Ok(spec)
    }

    /// Default curvature for the label.
    pub fn standard(label: ActionLabel) -> Self {
        Self::new(label, label.default_curvature()).expect("shipped action table is valid")
    }

    /// Checks the isometry condition `G*H + HG = 0` and commutation.
    pub fn validate(&self) -> Result<()> {
        if self.generators.len() < 2 {
            return Err(GeometryError::ActionTable("fewer than two generators".into()));
        }
        let h = self.ambient.hermitian_matrix();
        for (i, g) in self.generators.iter().enumerate() {
            let d = (g.adjoint() * h + h * g).norm();
            if d > 1e-12 {
                return Err(GeometryError::ActionTable(format!("generator {i} is not skew-hermitian (defect {d:.3e})")));
            }
        }
        let (a, b) = (&self.generators[0], &self.generators[1]);
        let comm = (a * b - b * a).norm();
        if comm > 1e-12 {
            return Err(GeometryError::ActionTable(format!("generators do not commute (defect {comm:.3e})")));
        }
        Ok(())
    }

    fn generator(&self, g: usize) -> Result<&CMat3> {
        self.generators
            .get(g)
            .ok_or(GeometryError::GeneratorIndex { index: g, count: self.generators.len() })
    }

    /// Horizontal projection of `G_g p`.
    pub fn killing_field(&self, g: usize, p: &AmbientPoint) -> Result<AmbientTangent> {
        let m = self.generator(g)?;
        Ok(self.ambient.project(p, &(m * p.rep)))
    }

    /// `exp(s1 G1 + s2 G2)`.
    pub fn group_element(&self, s: [f64; 2]) -> CMat3 {
        let x = self.generators[0] * Complex64::from(s[0]) + self.generators[1] * Complex64::from(s[1]);
        x.exp()
    }

    /// Gram matrix of the two Killing fields at `p`.
    pub fn killing_gram(&self, p: &AmbientPoint) -> Matrix2<f64> {
        self.jet(&p.rep).gram
    }

    pub fn is_regular(&self, p: &AmbientPoint) -> bool {
        self.killing_gram(p).determinant() > REGULARITY_THRESHOLD
    }

    fn jet(&self, x: &C3) -> KillingJet {
        let s = &self.ambient;
        let k = [0, 1].map(|i| s.horizontal(x, &(self.generators[i] * x)));
        let gram = Matrix2::from_fn(|i, j| s.g(&k[i], &k[j]));
        KillingJet { x: *x, k, gram }
    }

    /// `∇̄_{K_i} K_j` at `x`.
    fn killing_connection(&self, jet: &KillingJet, i: usize, j: usize) -> C3 {
        let s = &self.ambient;
        let x = &jet.x;
        let (gi, gj) = (&self.generators[i], &self.generators[j]);
        let kap = s.kappa();
        let hor = s.horizontal(x, &(gj * (gi * x)));
        hor - cscale(&jet.k[i], s.herm(&(gj * x), x) / kap) - cscale(&jet.k[j], s.herm(&(gi * x), x) / kap)
    }

    /// Second fundamental form of the orbit in the Killing basis, paired with `nu`.
    fn second_form(&self, jet: &KillingJet, nu: &C3) -> Matrix2<f64> {
        let mut h = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                h[(i, j)] = self.ambient.g(&self.killing_connection(jet, i, j), nu);
            }
        }
        (h + h.transpose()) * 0.5
    }

    fn regular_jet(&self, x: &C3) -> Result<KillingJet> {
        let jet = self.jet(x);
        let det = jet.gram.determinant();
        if !(det > REGULARITY_THRESHOLD) {
            return Err(GeometryError::Singular(det));
        }
        Ok(jet)
    }

    /// Coefficients of the orbit-tangent vector `v` in the Killing basis.
    fn killing_coeffs(&self, jet: &KillingJet, v: &C3) -> nalgebra::Vector2<f64> {
        let rhs = nalgebra::Vector2::new(self.ambient.g(v, &jet.k[0]), self.ambient.g(v, &jet.k[1]));
        jet.gram.try_inverse().unwrap_or_else(Matrix2::zeros) * rhs
    }

    /// Shape operator of the orbit through `p` with respect to the normal `xi`.
    pub fn orbit_shape_operator(&self, p: &AmbientPoint, xi: &AmbientTangent) -> Result<OrbitData> {
        let s = &self.ambient;
        let nu = s.vec_at(p, xi)?;
        let jet = self.regular_jet(&p.rep)?;
        let n = s.norm(&nu);
        if (n - 1.0).abs() > 1e-6 {
            return Err(GeometryError::InvalidParameter(format!("normal has length {n}")));
        }
        let defect = (0..2)
            .map(|i| s.g(&nu, &jet.k[i]).abs() / jet.gram[(i, i)].sqrt())
            .fold(0.0, f64::max);
        if defect > 1e-6 {
            return Err(GeometryError::NotNormal(defect));
        }
        // orthonormal orbit basis by Gram-Schmidt on the Killing fields
        let o1 = cscale(&jet.k[0], (1.0 / jet.gram[(0, 0)].sqrt()).into());
        let t = jet.k[1] - cscale(&o1, s.g(&jet.k[1], &o1).into());
        let o2 = cscale(&t, (1.0 / s.norm(&t)).into());
        let basis = [o1, o2];
        let coeffs = [0, 1].map(|i| self.killing_coeffs(&jet, &basis[i]));
        let h = self.second_form(&jet, &nu);
        let shape = Matrix2::from_fn(|i, j| (coeffs[i].transpose() * h * coeffs[j])[(0, 0)]);
        let eig = SymmetricEigen::new(shape);
        let (ia, ib) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let jxi = cscale(&nu, Complex64::i());
        let dir = |k: usize| {
            let c = eig.eigenvectors.column(k);
            let v = cscale(&o1, c[0].into()) + cscale(&o2, c[1].into());
            if s.g(&v, &jxi) < 0.0 {
                -v
            } else {
                v
            }
        };
        let (ea, eb) = (dir(ia), dir(ib));
        let hopf = (s.g(&jxi, &ea), s.g(&jxi, &eb));
        let mean = self.mean_vector(&jet);
        let wrap = |v: C3| AmbientTangent { base: *p, vec: v };
        Ok(OrbitData {
            point: *p,
            tangent_basis: [wrap(o1), wrap(o2)],
            normal: wrap(nu),
            shape: [[shape[(0, 0)], shape[(0, 1)]], [shape[(1, 0)], shape[(1, 1)]]],
            mean_curvature_vector: wrap(mean),
            orbit_principal_curvatures: (eig.eigenvalues[ia], eig.eigenvalues[ib]),
            principal_directions: [wrap(ea), wrap(eb)],
            hopf_components: hopf,
        })
    }

    /// Mean curvature vector `Σ II(oᵢ,oᵢ)` of the orbit.
    fn mean_vector(&self, jet: &KillingJet) -> C3 {
        let ginv = jet.gram.try_inverse().unwrap_or_else(Matrix2::zeros);
        let mut acc = C3::zeros();
        for i in 0..2 {
            for j in 0..2 {
                acc += cscale(&self.killing_connection(jet, i, j), ginv[(i, j)].into());
            }
        }
        // remove the orbit-tangent part
        let c = self.killing_coeffs(jet, &acc);
        acc - cscale(&jet.k[0], c[0].into()) - cscale(&jet.k[1], c[1].into())
    }

    /// Orbit data at the section point `y` with section normal `xi` (real coordinates).
    pub fn orbit_data_at(&self, y: &RealVec, xi: &RealVec) -> Result<OrbitData> {
        let v = self.section.lift_tangent(y, xi);
        self.orbit_shape_operator(&v.base, &v)
    }

    /// `(α, β, a, b)` at the section point `y` with normal `xi`, without allocating tangents.
    pub fn orbit_scalars(&self, y: &RealVec, xi: &RealVec) -> Result<[f64; 4]> {
        let d = self.orbit_data_at(y, xi)?;
        Ok([d.orbit_principal_curvatures.0, d.orbit_principal_curvatures.1, d.hopf_components.0, d.hopf_components.1])
    }

    /// Mean curvature vector of the orbit through section coordinates `q`.
    pub fn mean_curvature_field(&self, q: [f64; 2]) -> Result<AmbientTangent> {
        let y = self.section.coords_to_y(q);
        let p = self.section.lift(&y);
        let jet = self.regular_jet(&p.rep)?;
        Ok(AmbientTangent { base: p, vec: self.mean_vector(&jet) })
    }

    /// Mean curvature vector at `y` as a section tangent vector.
    pub fn mean_curvature_section(&self, y: &RealVec) -> Result<RealVec> {
        let p = self.section.lift(y);
        let jet = self.regular_jet(&p.rep)?;
        Ok(self.section.pull_tangent(y, &self.mean_vector(&jet)))
    }

    /// `Φ(w) = ⟨S_ξ Jξ, Jw⟩` with `ξ` the +90° rotation of `w`, at the section point `y`.
    pub fn phi_at(&self, y: &RealVec, w: &RealVec) -> Result<f64> {
        let ch = &self.section;
        let p = ch.lift(y);
        let jet = self.regular_jet(&p.rep)?;
        let xi = ch.rot(y, w);
        let nu = ch.lift_tangent(y, &xi).vec;
        let wv = ch.lift_tangent(y, w).vec;
        let h = self.second_form(&jet, &nu);
        let cx = self.killing_coeffs(&jet, &cscale(&nu, Complex64::i()));
        let cw = self.killing_coeffs(&jet, &cscale(&wv, Complex64::i()));
        Ok((cx.transpose() * h * cw)[(0, 0)])
    }

    /// `Φ` for an ambient point of the section and a unit tangent of the section.
    pub fn phi_map(&self, p: &AmbientPoint, w: &AmbientTangent) -> Result<f64> {
        let wv = self.ambient.vec_at(p, w)?;
        let y = self.section_coords_of(p)?;
        let lam = self.section_phase(p, &y);
        let wy = self.section.pull_tangent(&y, &cscale(&wv, lam));
        let n = self.section.dot(&wy, &wy).sqrt();
        if (n - 1.0).abs() > 1e-6 {
            return Err(GeometryError::InvalidParameter(format!("direction is not a unit section vector ({n})")));
        }
        self.phi_at(&y, &wy)
    }

    /// Real coordinates of an ambient point lying on the section.
    pub fn section_coords_of(&self, p: &AmbientPoint) -> Result<RealVec> {
        let ch = &self.section;
        let e = ch.signature();
        let mut y = RealVec::zeros();
        let mut c = [Complex64::from(0.0); 3];
        for (k, ck) in c.iter_mut().enumerate() {
            let col: C3 = ch.frame.column(k).into_owned();
            *ck = self.ambient.herm(&p.rep, &col) * e[k];
        }
        let big = (0..3).max_by(|&i, &j| c[i].norm().total_cmp(&c[j].norm())).unwrap_or(0);
        let lam = c[big].conj() / c[big].norm();
        for k in 0..3 {
            y[k] = (c[k] * lam).re;
        }
        let y = ch.normalize(&y).ok_or(GeometryError::Normalization(ch.dot(&y, &y)))?;
        if !self.ambient.same_point(p, &ch.lift(&y)) {
            return Err(GeometryError::InvalidParameter("point is not on the section".into()));
        }
        Ok(y)
    }

    fn section_phase(&self, p: &AmbientPoint, y: &RealVec) -> Complex64 {
        self.ambient.phase_between(p, &self.section.lift(y)).unwrap_or(Complex64::from(1.0))
    }

    /// Samples of `Φ(θ)` for `θ = 2πk/n` measured from the transported `e1` at `y`.
    pub fn phi_profile(&self, y: &RealVec, n: usize) -> Result<Vec<(f64, f64)>> {
        self.regular_jet(&self.section.lift(y).rep)?;
        (0..n)
            .into_par_iter()
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / n as f64;
                Ok((th, self.phi_at(y, &self.section.direction(y, th))?))
            })
            .collect()
    }

    /// Zeros of `Φ` on the unit circle of `T_yΣ`.
    pub fn hopf_directions(&self, y: &RealVec, n_samples: usize, tol: f64) -> Result<Vec<HopfDirection>> {
        if n_samples < 90 {
            return Err(GeometryError::InvalidParameter(format!("n_samples = {n_samples} < 90")));
        }
        let prof = self.phi_profile(y, n_samples)?;
        let max = prof.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        if max < tol {
            return Err(GeometryError::DegenerateObstruction(max));
        }
        let phi = |th: f64| self.phi_at(y, &self.section.direction(y, th));
        let mut out = Vec::new();
        for k in 0..n_samples {
            let (t0, f0) = prof[k];
            let (mut t1, f1) = prof[(k + 1) % n_samples];
            if k + 1 == n_samples {
                t1 += std::f64::consts::TAU;
            }
            if f0 == 0.0 {
                out.push((t0, 0.0));
                continue;
            }
            if f0 * f1 >= 0.0 {
                continue;
            }
            let (mut lo, mut hi, mut flo) = (t0, t1, f0);
            let mut mid = 0.5 * (lo + hi);
            let mut fm = phi(mid)?;
            for _ in 0..BISECTION_ITERS {
                if fm.abs() < tol * 1e-3 {
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                mid = 0.5 * (lo + hi);
                fm = phi(mid)?;
            }
            out.push((mid.rem_euclid(std::f64::consts::TAU), fm));
        }
        Ok(out
            .into_iter()
            .map(|(theta, phi)| {
                let d = self.section.direction(y, theta);
                HopfDirection { theta, direction: [d[0], d[1], d[2]], phi }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y_of(spec: &PolarActionSpec, u: [f64; 2]) -> RealVec {
        spec.section.coords_to_y(u)
    }

    #[test]
    fn table_loads_and_validates() {
        for l in ActionLabel::ALL {
            let s = PolarActionSpec::standard(l);
            assert_eq!(s.generators.len(), 2);
            assert_eq!(l.cli_name().parse::<ActionLabel>().unwrap(), l);
        }
        assert!(PolarActionSpec::new(ActionLabel::Ch2G0, 4.0).is_err());
        assert!("nosuch".parse::<ActionLabel>().is_err());
    }

    #[test]
    fn generator_index_checked() {
        let s = PolarActionSpec::standard(ActionLabel::Cp2Torus);
        let p = s.section.origin();
        assert_eq!(s.killing_field(2, &p), Err(GeometryError::GeneratorIndex { index: 2, count: 2 }));
    }

    #[test]
    fn torus_fixed_points() {
        let s = PolarActionSpec::standard(ActionLabel::Cp2Torus);
        let r = s.ambient.radius();
        for k in 0..3 {
            let mut z = C3::zeros();
            z[k] = r.into();
            let p = AmbientPoint { rep: z };
            for g in 0..2 {
                assert!(s.killing_field(g, &p).unwrap().vec.norm() < 1e-14);
            }
        }
        let h = PolarActionSpec::standard(ActionLabel::Ch2Torus);
        let o = h.section.origin();
        assert!(h.killing_field(0, &o).unwrap().vec.norm() < 1e-14);
        assert!(h.killing_field(1, &o).unwrap().vec.norm() < 1e-14);
    }

    #[test]
    fn clifford_torus_is_minimal() {
        let s = PolarActionSpec::standard(ActionLabel::Cp2Torus);
        let r = s.ambient.radius();
        let y = RealVec::new(1.0, 1.0, 1.0) * (r / 3f64.sqrt());
        let h = s.mean_curvature_section(&y).unwrap();
        assert!(h.norm() < 1e-12);
    }

    #[test]
    fn orbit_shape_is_symmetric_and_hopf_components_unit() {
        for l in ActionLabel::ALL {
            let s = PolarActionSpec::standard(l);
            let y = y_of(&s, [0.3, 0.5]);
            let w = s.section.direction(&y, 0.4);
            let xi = s.section.rot(&y, &w);
            let d = s.orbit_data_at(&y, &xi).unwrap();
            assert!((d.shape[0][1] - d.shape[1][0]).abs() < 1e-12);
            let (a, b) = d.hopf_components;
            assert!((a * a + b * b - 1.0).abs() < 1e-10, "{l}: {a} {b}");
            let h = s.mean_curvature_field([0.3, 0.5]).unwrap();
            let hy = s.section.pull_tangent(&y, &h.vec);
            let back = s.section.lift_tangent(&y, &hy).vec;
            assert!((back - h.vec).norm() < 1e-8);
        }
    }

    #[test]
    fn phi_is_odd() {
        for l in ActionLabel::ALL {
            let s = PolarActionSpec::standard(l);
            let y = y_of(&s, [0.3, 0.5]);
            let w = s.section.direction(&y, 1.1);
            let a = s.phi_at(&y, &w).unwrap();
            let b = s.phi_at(&y, &(-w)).unwrap();
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_map_matches_section_form() {
        let s = PolarActionSpec::standard(ActionLabel::Ch2G0);
        let y = y_of(&s, [0.3, 0.5]);
        let w = s.section.direction(&y, 0.8);
        let p = s.section.lift(&y);
        let wt = s.section.lift_tangent(&y, &w);
        let direct = s.phi_at(&y, &w).unwrap();
        assert!((s.phi_map(&p, &wt).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn singular_points_rejected() {
        let s = PolarActionSpec::standard(ActionLabel::Ch2G0);
        let y = y_of(&s, [0.4, 0.0]);
        assert!(matches!(s.mean_curvature_section(&y), Err(GeometryError::Singular(_))));
        assert!(s.hopf_directions(&y, 360, 1e-10).is_err());
    }
}
