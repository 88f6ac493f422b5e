//! Acceptance criteria 1-12. Each criterion prints one `PASS`/`FAIL` line;
//! the test fails if any criterion does.

use std::io::Write;
use std::process::Command;

use hopflab::actions::{ActionLabel, PolarActionSpec};
use hopflab::ambient::{cscale, RealVec};
use hopflab::catalog::{self, CatalogName, CatalogParams};
use hopflab::constructor::{
    austere_search, build_hypersurface, construct, integrate_sigma_symmetric, law_certify, levi_flat_cmc_certify,
    strongly_2hopf_certify, AustereCurve, CertifyOptions, Certification, CurveLaw, EquivariantHypersurface, SectionGrid,
};
use hopflab::hypersurface::{classify, verify_gauss_codazzi, GaussCodazziOptions, HypersurfacePatch, Tolerances};
use hopflab::suites::{austere_residuals, fd_kahler_defect, fd_sectional_curvature, random_point, random_unit, standard_cmc, STANDARD_LAUNCH};
use hopflab::{AmbientPoint, SpaceForm, C3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// tolerances, pinned
const HOL_CLOSED: f64 = 1e-8;
const HOL_FD_REL: f64 = 1e-3;
const TOTALLY_REAL: f64 = 1e-8;
const KAHLER: f64 = 1e-6;
const SECTION_REAL: f64 = 1e-8;
const SECTION_SFF: f64 = 1e-6;
const KILLING_ORTHO: f64 = 1e-8;
const PHI_NONZERO: f64 = 1e-6;
const INTEGRABILITY: f64 = 1e-5;
const SPECTRUM_DERIVATIVE: f64 = 1e-4;
const MEAN_CURVATURE: f64 = 1e-3;
const CONNECTION: f64 = 1e-3;
const NABLA_AA: f64 = 1e-4;
const LEAF_CURVATURE: f64 = 1e-3;
const LEAF_REAL: f64 = 1e-6;
const AUSTERE_FLAG: f64 = 1e-3;
const AB_TOL: f64 = 1e-4;
const SPECTRUM: f64 = 1e-4;
const HOPF_RELATION: f64 = 1e-6;
const LEVI_CMC: f64 = 1e-3;
const GAUSS_CODAZZI: f64 = 1e-4;
const CORRUPTED: f64 = 1e-2;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn fmax(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

/// Chordal distance between two points given by representatives, after
/// normalizing and aligning phases. Agrees with the geodesic distance to first
/// order and keeps full precision near zero, unlike arccos of the cross ratio.
fn oracle_chordal(c: f64, z: &C3, w: &C3) -> f64 {
    let e = if c > 0.0 { [1.0, 1.0, 1.0] } else { [-1.0, 1.0, 1.0] };
    let h = |a: &C3, b: &C3| -> Complex64 { (0..3).map(|k| a[k] * b[k].conj() * e[k]).sum() };
    let z = z / Complex64::from(h(z, z).re.abs().sqrt());
    let w = w / Complex64::from(h(w, w).re.abs().sqrt());
    // z ≈ λw with λ = <z,w>/<w,w>, and <w,w> = -1 on the hyperbolic side
    let ph = h(&z, &w) * h(&w, &w).re.signum();
    let w = w * (ph / ph.norm());
    let d = z - w;
    h(&d, &d).re.abs().sqrt()
}

fn totally_real_unit(space: &SpaceForm, p: &AmbientPoint, x: &C3, rng: &mut ChaCha8Rng) -> C3 {
    let y = random_unit(space, p, rng);
    let y = y - cscale(x, space.herm(&y, x));
    cscale(&y, (1.0 / space.norm(&y)).into())
}

fn crit1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = [0.0f64; 3];
    for c in [4.0, -4.0] {
        let s = SpaceForm::new(c).unwrap();
        for _ in 0..50 {
            let p = random_point(&s, &mut rng);
            let x = random_unit(&s, &p, &mut rng);
            let jx = cscale(&x, Complex64::i());
            let y = totally_real_unit(&s, &p, &x, &mut rng);
            worst[0] = fmax(worst[0], (s.curvature_form(&x, &jx, &jx, &x) - c).abs());
            worst[1] = fmax(worst[1], (fd_sectional_curvature(&s, &p, &x, &jx, 1e-2) - c).abs() / c.abs());
            worst[2] = fmax(worst[2], (s.curvature_form(&x, &y, &y, &x) - c / 4.0).abs());
        }
    }
    outcome(
        worst[0] < HOL_CLOSED && worst[1] < HOL_FD_REL && worst[2] < TOTALLY_REAL,
        format!("holomorphic {:.1e}, fd {:.1e} (rel), totally real {:.1e}", worst[0], worst[1], worst[2]),
    )
}

fn crit2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for c in [4.0, -4.0] {
        let s = SpaceForm::new(c).unwrap();
        for _ in 0..20 {
            let p = random_point(&s, &mut rng);
            let v = random_unit(&s, &p, &mut rng);
            let t = rng.random_range(0.1..0.5);
            let vel = s.geodesic_velocity(&p, &v, t);
            let q = s.point(vel.base.rep).unwrap();
            let vq = s.vec_at(&q, &vel).unwrap();
            worst = fmax(worst, fd_kahler_defect(&s, &q, &vq, 1e-3));
        }
    }
    outcome(worst < KAHLER, format!("max |nabla J| {worst:.1e} over 40 geodesics"))
}

fn crit3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut real, mut sff, mut kill, mut ctl) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for label in ActionLabel::ALL {
        let spec = PolarActionSpec::standard(label);
        let (s, ch) = (spec.ambient, &spec.section);
        let mut n = 0;
        while n < 20 {
            let u = [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)];
            let y = ch.coords_to_y(u);
            let p = ch.lift(&y);
            if !spec.is_regular(&p) {
                continue;
            }
            n += 1;
            let [f1, f2] = ch.frame_at(&y);
            let (t1, t2) = (ch.lift_tangent(&y, &f1).vec, ch.lift_tangent(&y, &f2).vec);
            real = fmax(real, s.g(&cscale(&t1, Complex64::i()), &t2).abs());
            // totally geodesic: section geodesics agree with ambient geodesics;
            // the deviation after t = 0.05 is ½|II(w,w)|t² to leading order
            let w = ch.direction(&y, rng.random_range(0.0..std::f64::consts::TAU));
            let wv = ch.lift_tangent(&y, &w).vec;
            let t = 0.05;
            let dev = oracle_chordal(s.c(), &ch.lift(&ch.geodesic(&y, &w, t).0).rep, &s.exp_vec(&p, &wv, t).rep);
            sff = fmax(sff, 2.0 * dev / (t * t));
            // control: the oracle sees a displacement of length t
            let ratio = oracle_chordal(s.c(), &p.rep, &s.exp_vec(&p, &wv, t).rep) / t;
            ctl = fmax(ctl, (ratio - 1.0).abs());
            for g in 0..spec.generators.len() {
                let k = spec.killing_field(g, &p).unwrap();
                let kv = s.vec_at(&p, &k).unwrap();
                kill = fmax(kill, fmax(s.g(&kv, &t1).abs(), s.g(&kv, &t2).abs()));
            }
        }
    }
    outcome(
        real < SECTION_REAL && sff < SECTION_SFF && kill < KILLING_ORTHO && ctl < 1e-2,
        format!("<J TS, TS> {real:.1e}, second fundamental form {sff:.1e}, Killing.TS {kill:.1e}, oracle control {ctl:.1e}"),
    )
}

fn crit4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut min_max, mut ok) = (f64::INFINITY, true);
    let mut counts = Vec::new();
    for label in ActionLabel::ALL {
        let spec = PolarActionSpec::standard(label);
        let mut n = 0;
        while n < 5 {
            let u = [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)];
            let y = spec.section.coords_to_y(u);
            if !spec.is_regular(&spec.section.lift(&y)) {
                continue;
            }
            n += 1;
            let prof = spec.phi_profile(&y, 720).unwrap();
            min_max = min_max.min(prof.iter().map(|p| p.1.abs()).fold(0.0, f64::max));
            match (spec.hopf_directions(&y, 720, 1e-6), spec.hopf_directions(&y, 1440, 1e-6)) {
                (Ok(a), Ok(b)) => {
                    ok &= a.len() % 2 == 0 && a.len() == b.len();
                    counts.push(a.len());
                }
                _ => ok = false,
            }
        }
    }
    outcome(ok && min_max > PHI_NONZERO, format!("min over points of max|phi| {min_max:.3e}; zero counts {counts:?}"))
}

struct CmcRun {
    label: ActionLabel,
    ehs: EquivariantHypersurface,
    cert: Certification,
    mean_err: f64,
    wp_h: usize,
}

fn cmc_runs() -> Vec<CmcRun> {
    std::thread::scope(|sc| {
        let hs: Vec<_> = ActionLabel::ALL
            .into_iter()
            .map(|label| {
                sc.spawn(move || {
                    let spec = PolarActionSpec::standard(label);
                    let ehs = standard_cmc(&spec, 1.0).unwrap();
                    let cert = strongly_2hopf_certify(&ehs, &CertifyOptions::default()).unwrap();
                    let (_, rep) = law_certify(&ehs, [20, 5, 5], &Tolerances::default()).unwrap();
                    let y = spec.section.coords_to_y(STANDARD_LAUNCH);
                    let wp = spec.hopf_directions(&y, 720, 1e-6).unwrap()[0].theta;
                    let e = construct(&spec, STANDARD_LAUNCH, wp, CurveLaw::Cmc { eta: 1.0 }, 1e-3, 0.1, 0.2).unwrap();
                    let wp_h = e.patch.hopf_projection_count([0.0; 3], Tolerances::default().tau_proj).unwrap();
                    CmcRun { label, ehs, cert, mean_err: (rep.mean_curvature - 1.0).abs(), wp_h }
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn get(c: &Certification, k: &str) -> f64 {
    c.residuals.get(k).copied().unwrap_or(f64::INFINITY)
}

fn crit5(runs: &[CmcRun]) -> Outcome {
    let mut ok = true;
    let mut d = Vec::new();
    for r in runs {
        let h2 = !r.cert.h_counts.is_empty() && r.cert.h_counts.keys().all(|&h| h == 2);
        let (i, s) = (get(&r.cert, "integrability"), get(&r.cert, "spectrum_derivative"));
        ok &= h2 && i < INTEGRABILITY && s < SPECTRUM_DERIVATIVE && r.mean_err < MEAN_CURVATURE && r.wp_h == 1;
        d.push(format!("{}: h=2 {h2}, int {i:.1e}, dspec {s:.1e}, |H-1| {:.1e}, w_p h={}", r.label, r.mean_err, r.wp_h));
    }
    outcome(ok, d.join("; "))
}

fn crit6(runs: &[CmcRun]) -> Outcome {
    let mut w = [0.0f64; 4];
    for r in runs {
        for (k, name) in ["connection", "nabla_a_a", "leaf_curvature", "leaf_totally_real"].iter().enumerate() {
            w[k] = fmax(w[k], get(&r.cert, name));
        }
    }
    outcome(
        w[0] < CONNECTION && w[1] < NABLA_AA && w[2] < LEAF_CURVATURE && w[3] < LEAF_REAL,
        format!("connection {:.1e}, nabla_A A {:.1e}, leaf curvature {:.1e}, leaf totally real {:.1e}", w[0], w[1], w[2], w[3]),
    )
}

fn austere_curves() -> Vec<(ActionLabel, Vec<AustereCurve>)> {
    std::thread::scope(|sc| {
        let hs: Vec<_> = ActionLabel::ALL
            .into_iter()
            .map(|l| sc.spawn(move || (l, austere_search(&PolarActionSpec::standard(l), &SectionGrid::default()).unwrap())))
            .collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

/// Whether the section geodesic of `c` passes through the section point `yo`
/// (geodesics of the slice are its intersections with planes through 0).
fn passes_through(c: &AustereCurve, yo: &RealVec) -> bool {
    let s = &c.sigma.samples[c.sigma.samples.len() / 2];
    let n = RealVec::from(s.point).cross(&RealVec::from(s.velocity));
    (n.dot(yo) / (n.norm() * yo.norm())).abs() < 1e-6
}

fn crit7(curves: &[(ActionLabel, Vec<AustereCurve>)]) -> Outcome {
    let mut ok = true;
    let mut d = Vec::new();
    for (label, found) in curves {
        let spec = PolarActionSpec::standard(*label);
        let count_ok = match label {
            ActionLabel::Cp2Torus | ActionLabel::Ch2Torus => !found.is_empty(),
            ActionLabel::Ch2G0 | ActionLabel::Ch2LineG2a => found.len() == 1,
            ActionLabel::Ch2K0G2a => found.is_empty(),
        };
        // identification with the reference hypersurfaces; in CH² the austere
        // spectrum {α, -α, 0} has α above, at or below √(-c)/2 for cones,
        // Lohnherr and bisectors
        let alphas: Vec<f64> = found.iter().map(|c| austere_alpha(&build_hypersurface(&spec, &c.sigma, 0.2, 0.2).unwrap().patch)).collect();
        let vertex = || {
            let yo = spec.section_coords_of(&spec.ambient.origin()).unwrap();
            found.iter().any(|c| passes_through(c, &yo))
        };
        let ident = match label {
            ActionLabel::Cp2Torus => vertex(),
            ActionLabel::Ch2Torus => vertex() && alphas.iter().all(|a| *a > 1.0 + SPECTRUM),
            ActionLabel::Ch2G0 => alphas.iter().all(|a| *a < 1.0 - SPECTRUM),
            ActionLabel::Ch2LineG2a => alphas.iter().all(|a| (a - 1.0).abs() < SPECTRUM),
            ActionLabel::Ch2K0G2a => true,
        };
        let mut worst = [0.0f64; 6];
        for c in found {
            let r = austere_residuals(&spec, c).unwrap_or([f64::INFINITY; 6]);
            for k in 0..6 {
                worst[k] = fmax(worst[k], r[k]);
            }
        }
        let res_ok = worst[..4].iter().all(|v| *v < AUSTERE_FLAG) && worst[4] < AB_TOL && worst[5] < AB_TOL;
        ok &= count_ok && ident && res_ok;
        d.push(format!(
            "{label}: {} curve(s), alpha {alphas:.4?}, identified {ident}, |a+b| {:.1e} |g| {:.1e} levi {:.1e} ruled {:.1e} |a-1/r2| {:.1e} |b-1/r2| {:.1e}",
            found.len(),
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            worst[4],
            worst[5]
        ));
    }
    let reference = [
        (CatalogName::CliffordConeCh2, 1),
        (CatalogName::Lohnherr, 0),
        (CatalogName::Bisector, -1),
    ];
    for (name, band) in reference {
        let e = catalog::build(name, &CatalogParams::default()).unwrap();
        let a = austere_alpha(&e.patch);
        let side = if (a - 1.0).abs() < SPECTRUM { 0 } else if a > 1.0 { 1 } else { -1 };
        ok &= side == band;
        d.push(format!("reference {name} alpha {a:.4}"));
    }
    outcome(ok, d.join("; "))
}

/// Largest principal curvature at the center of an austere patch.
fn austere_alpha(patch: &HypersurfacePatch) -> f64 {
    patch.analyze(patch.center()).unwrap().spectrum.values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn crit8() -> Outcome {
    let e = catalog::lohnherr(-4.0).unwrap();
    let grid = e.patch.grid([5, 2, 2]);
    let mut worst = 0.0f64;
    for x in &grid {
        let mut v = e.patch.analyze(*x).unwrap().spectrum.values;
        v.sort_by(f64::total_cmp);
        worst = fmax(worst, (v[0] + 1.0).abs().max(v[1].abs()).max((v[2] - 1.0).abs()));
    }
    let rep = classify(&e.patch, &grid, &Tolerances::default()).unwrap();
    let spread = rep.residuals["spectrum_spread"];
    outcome(worst < SPECTRUM && spread < SPECTRUM, format!("{} points, max deviation {worst:.1e}, spread {spread:.1e}", grid.len()))
}

fn crit9() -> Outcome {
    let mut ok = true;
    let mut d = Vec::new();
    for name in [CatalogName::GeodesicSphere, CatalogName::Horosphere, CatalogName::TubeRp2, CatalogName::TubeCh1] {
        let e = catalog::build(name, &CatalogParams::default()).unwrap();
        let grid = e.patch.grid([5, 2, 2]);
        let rel = grid.iter().map(|x| e.patch.hopf_cmc_relation_check(*x, 1e-4).unwrap_or(f64::INFINITY)).fold(0.0, fmax);
        let rep = classify(&e.patch, &grid, &Tolerances::default()).unwrap();
        let spread = rep.residuals["spectrum_spread"];
        ok &= rep.hopf && rel < HOPF_RELATION && spread < SPECTRUM;
        d.push(format!("{name}: relation {rel:.1e}, spread {spread:.1e}"));
    }
    let e = catalog::horosphere(-4.0).unwrap();
    let mut v = e.patch.analyze(e.patch.center()).unwrap().spectrum.values;
    v.sort_by(f64::total_cmp);
    let dev = (v[0] - 1.0).abs().max((v[1] - 1.0).abs()).max((v[2] - 2.0).abs());
    ok &= dev < SPECTRUM;
    d.push(format!("horosphere {{2,1,1}} deviation {dev:.1e}"));
    outcome(ok, d.join("; "))
}

fn crit10(curves: &[(ActionLabel, Vec<AustereCurve>)]) -> Outcome {
    let tol = Tolerances::default();
    let mut ok = true;
    let mut d = Vec::new();
    let mut minimal_runs = 0;
    for (label, found) in curves {
        let spec = PolarActionSpec::standard(*label);
        if let Some(c) = found.first() {
            let y = spec.section.coords_to_y(c.start);
            let sigma = integrate_sigma_symmetric(&spec, &y, &RealVec::from(c.direction), CurveLaw::LeviFlat, 1e-3, 300).unwrap();
            let ehs = build_hypersurface(&spec, &sigma, 0.2, 0.2).unwrap();
            let cert = levi_flat_cmc_certify(&ehs, 0.0, [10, 3, 3], &tol).unwrap();
            let (g, ab) = (get(&cert, "gamma_minus_eta_over_4"), get(&cert, "alpha_plus_beta_minus_3eta_over_4"));
            ok &= g < LEVI_CMC && ab < LEVI_CMC;
            minimal_runs += 1;
            d.push(format!("{label} minimal: |g| {g:.1e}, |a+b| {ab:.1e}"));
        }
        let ehs = construct(&spec, STANDARD_LAUNCH, 0.7, CurveLaw::LeviFlat, 1e-3, 0.2, 0.2).unwrap();
        let cert = levi_flat_cmc_certify(&ehs, 1.0, [10, 3, 3], &tol).unwrap();
        let cited = cert.failures.iter().any(|f| f.starts_with("spectrum_spread") || f.starts_with("levi_form"));
        ok &= !cert.passed && cited;
        d.push(format!("{label} eta=1 rejected: {}", !cert.passed && cited));
    }
    ok &= minimal_runs > 0;
    outcome(ok, d.join("; "))
}

fn crit11(runs: &[CmcRun]) -> Outcome {
    let mut patches: Vec<(String, HypersurfacePatch)> = catalog::all().unwrap().into_iter().map(|e| (e.name, e.patch)).collect();
    patches.extend(runs.iter().map(|r| (format!("{}.cmc", r.label), r.ehs.patch.clone())));
    let (mut worst, mut control) = (0.0f64, f64::INFINITY);
    let mut worst_name = String::new();
    for (k, (name, patch)) in patches.iter().enumerate() {
        let opts = GaussCodazziOptions { probes: 20, seed: 1100 + k as u64, shape_perturbation: 0.0 };
        let bad = GaussCodazziOptions { shape_perturbation: 0.2, ..opts };
        let mut rng = ChaCha8Rng::seed_from_u64(1100 + k as u64);
        let mut xs = patch.grid([2, 1, 1]);
        xs.extend((0..3).map(|_| patch.bounds.map(|[lo, hi]| rng.random_range(lo..hi))));
        for x in xs {
            let r = verify_gauss_codazzi(patch, x, GAUSS_CODAZZI, &opts).unwrap();
            let v = fmax(r.gauss, r.codazzi);
            if v > worst {
                worst = v;
                worst_name = name.clone();
            }
            let b = verify_gauss_codazzi(patch, x, GAUSS_CODAZZI, &bad).unwrap();
            control = control.min(fmax(b.gauss, b.codazzi));
        }
    }
    outcome(
        worst < GAUSS_CODAZZI && control > CORRUPTED,
        format!("{} patches, worst {worst:.1e} ({worst_name}), corrupted control min {control:.1e}", patches.len()),
    )
}

fn crit12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_hopflab"))
            .args(["verify", "all", "--seed", "7", "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        (o.status.code(), o.stdout, std::fs::read(&out).unwrap_or_default())
    };
    let (a, b) = std::thread::scope(|sc| {
        let h = sc.spawn(|| run("a.json"));
        let b = run("b.json");
        (h.join().unwrap(), b)
    });
    let same = a.1 == b.1 && a.2 == b.2 && !a.2.is_empty();
    outcome(same && a.0 == Some(0) && b.0 == Some(0), format!("exit {:?}/{:?}, reports identical {same} ({} bytes)", a.0, b.0, a.2.len()))
}

#[test]
fn acceptance_criteria() {
    let results: Vec<(usize, &str, Outcome)> = std::thread::scope(|sc| {
        let det = sc.spawn(crit12);
        let geo = sc.spawn(|| {
            let curves = austere_curves();
            (crit7(&curves), crit10(&curves))
        });
        let cheap = sc.spawn(|| (crit1(), crit2(), crit3(), crit4(), crit8(), crit9()));
        let runs = cmc_runs();
        let (c5, c6, c11) = (crit5(&runs), crit6(&runs), crit11(&runs));
        let (c1, c2, c3, c4, c8, c9) = cheap.join().unwrap();
        let (c7, c10) = geo.join().unwrap();
        vec![
            (1, "ambient curvature", c1),
            (2, "Kahler identity", c2),
            (3, "section geometry", c3),
            (4, "obstruction map", c4),
            (5, "CMC construction pipeline", c5),
            (6, "strongly 2-Hopf structure", c6),
            (7, "austere classification", c7),
            (8, "Lohnherr spectrum", c8),
            (9, "Hopf CMC rigidity", c9),
            (10, "Levi-flat with constant mean curvature", c10),
            (11, "Gauss and Codazzi identities", c11),
            (12, "determinism of verify all", det.join().unwrap()),
        ]
    });
    // write past the test harness capture so the table shows in the log
    let mut so = std::io::stdout().lock();
    writeln!(so).unwrap();
    for (n, name, o) in &results {
        writeln!(so, "acceptance {n:2} {:4} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail).unwrap();
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
