//! Scene documents and CSV exports.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use hopflab::constructor::{Certification, MeshRow, SigmaCurve};
use hopflab::hypersurface::GaussCodazziReport;
use hopflab::hypersurface::ClassificationReport;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCENE_SCHEMA_VERSION: u32 = 1;
pub const MESH_HEADER: &str = "# hopflab-mesh v1";
pub const PROFILE_HEADER: &str = "# hopflab-phi v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneCertification {
    pub passed: bool,
    pub strongly_two_hopf: Certification,
    pub law: Certification,
    pub gauss_codazzi: GaussCodazziReport,
}

/// Output of `construct`; `classify --scene` and `sample --scene` rebuild the patch from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub schema_version: u32,
    /// Resolved configuration (defaults filled in, output paths dropped).
    pub config: RunConfig,
    pub sigma: SigmaCurve,
    pub certification: SceneCertification,
    pub classification: ClassificationReport,
}

impl SceneFile {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: SceneFile = serde_json::from_str(text)?;
        if scene.schema_version != SCENE_SCHEMA_VERSION {
            anyhow::bail!("unsupported scene schema_version {} (expected {SCENE_SCHEMA_VERSION})", scene.schema_version);
        }
        Ok(scene)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read scene {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("cannot parse scene {}", path.display()))
    }
}

fn num(v: f64) -> String {
    v.to_string()
}

const MESH_COLUMNS: [&str; 18] = [
    "t", "s1", "s2", "z0_re", "z0_im", "z1_re", "z1_im", "z2_re", "z2_im", "alpha", "beta", "gamma", "a", "b", "h",
    "mean_curvature", "levi", "austere",
];

pub fn write_mesh<W: Write>(mut out: W, rows: &[MeshRow]) -> Result<()> {
    writeln!(out, "{MESH_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MESH_COLUMNS)?;
    for r in rows {
        let mut rec: Vec<String> = [r.t, r.s1, r.s2].iter().map(|v| num(*v)).collect();
        rec.extend(r.z.iter().map(|v| num(*v)));
        rec.extend([r.alpha, r.beta, r.gamma, r.a, r.b].iter().map(|v| num(*v)));
        rec.push(r.h.to_string());
        rec.extend([r.mean_curvature, r.levi, r.austere].iter().map(|v| num(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile<W: Write>(mut out: W, profile: &[(f64, f64)]) -> Result<()> {
    writeln!(out, "{PROFILE_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "phi"])?;
    for (t, p) in profile {
        w.write_record([num(*t), num(*p)])?;
    }
    w.flush()?;
    Ok(())
}

/// Gnuplot script plotting a profile CSV written by [`write_profile`].
pub fn profile_script(csv_path: &Path) -> String {
    format!(
        "set datafile separator ','\nset xlabel 'theta'\nset ylabel 'phi'\nset xrange [0:2*pi]\nset grid\n\
         plot '{}' every ::1 using 1:2 with lines title 'phi', 0 with lines dt 2 notitle\n",
        csv_path.display()
    )
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
    }
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}
