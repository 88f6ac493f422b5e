//! Run configuration: JSON file first, command-line flags on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hopflab::actions::{ActionLabel, PolarActionSpec};
use hopflab::constructor::CurveLaw;
use hopflab::hypersurface::Tolerances;
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "HOPFLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Geodesic,
    Cmc,
    LeviFlat,
    Austere,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub tau_mult: Option<f64>,
    pub tau_proj: Option<f64>,
    pub flag: Option<f64>,
    pub integrability: Option<f64>,
    pub derivative: Option<f64>,
}

impl ToleranceOverrides {
    fn merge(&mut self, other: &ToleranceOverrides) {
        let pick = |a: &mut Option<f64>, b: Option<f64>| {
            if b.is_some() {
                *a = b;
            }
        };
        pick(&mut self.tau_mult, other.tau_mult);
        pick(&mut self.tau_proj, other.tau_proj);
        pick(&mut self.flag, other.flag);
        pick(&mut self.integrability, other.integrability);
        pick(&mut self.derivative, other.derivative);
    }

    pub fn resolve(&self) -> Result<Tolerances> {
        let d = Tolerances::default();
        let t = Tolerances {
            tau_mult: self.tau_mult.unwrap_or(d.tau_mult),
            tau_proj: self.tau_proj.unwrap_or(d.tau_proj),
            flag: self.flag.unwrap_or(d.flag),
            integrability: self.integrability.unwrap_or(d.integrability),
            derivative: self.derivative.unwrap_or(d.derivative),
        };
        for (name, v) in [
            ("tolerances.tau_mult", t.tau_mult),
            ("tolerances.tau_proj", t.tau_proj),
            ("tolerances.flag", t.flag),
            ("tolerances.integrability", t.integrability),
            ("tolerances.derivative", t.derivative),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("invalid config: {name} must be positive, got {v}");
            }
        }
        Ok(t)
    }
}

/// Everything `construct` needs. Missing fields take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub action: String,
    /// Holomorphic curvature; the action's default (±4) when absent.
    pub c: Option<f64>,
    /// Launch point in section coordinates.
    pub point: [f64; 2],
    /// Launch angle; direction of largest `|Φ|` when absent.
    pub theta: Option<f64>,
    pub law: LawKind,
    pub eta: f64,
    pub step: f64,
    /// Steps in each time direction; enough to cover the box when absent.
    pub n_steps: Option<usize>,
    pub t_half: f64,
    pub s_extent: f64,
    pub grid: [usize; 3],
    pub tolerances: ToleranceOverrides,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            action: "cp2-torus".into(),
            c: None,
            point: [0.3, 0.5],
            theta: None,
            law: LawKind::Cmc,
            eta: 1.0,
            step: 1e-3,
            n_steps: None,
            t_half: 0.2,
            s_extent: 0.3,
            grid: [20, 5, 5],
            tolerances: ToleranceOverrides::default(),
            out: None,
            mesh: None,
            seed: None,
        }
    }
}

/// Flag values; `None` leaves the file (or default) value in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub action: Option<String>,
    pub c: Option<f64>,
    pub point: Option<[f64; 2]>,
    pub theta: Option<f64>,
    pub law: Option<LawKind>,
    pub eta: Option<f64>,
    pub step: Option<f64>,
    pub n_steps: Option<usize>,
    pub t_half: Option<f64>,
    pub s_extent: Option<f64>,
    pub grid: Option<[usize; 3]>,
    pub tolerances: ToleranceOverrides,
    pub out: Option<PathBuf>,
    pub mesh: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = o.$f.clone() { self.$f = v; } )* };
        }
        set!(action, point, law, eta, step, t_half, s_extent, grid);
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if o.$f.is_some() { self.$f = o.$f.clone(); } )* };
        }
        set_opt!(c, theta, n_steps, out, mesh, seed);
        self.tolerances.merge(&o.tolerances);
    }

    pub fn label(&self) -> Result<ActionLabel> {
        self.action.parse().map_err(|_| {
            let names: Vec<&str> = ActionLabel::ALL.iter().map(|l| l.cli_name()).collect();
            anyhow::anyhow!("invalid config: action `{}` is not one of {}", self.action, names.join(", "))
        })
    }

    pub fn spec(&self) -> Result<PolarActionSpec> {
        let label = self.label()?;
        let c = self.c.unwrap_or(label.default_curvature());
        if !c.is_finite() || c == 0.0 || (c > 0.0) != (label == ActionLabel::Cp2Torus) {
            bail!("invalid config: c = {c} has the wrong sign or is zero for action {label}");
        }
        Ok(PolarActionSpec::new(label, c)?)
    }

    pub fn curve_law(&self) -> CurveLaw {
        match self.law {
            LawKind::Geodesic => CurveLaw::Geodesic,
            LawKind::Cmc => CurveLaw::Cmc { eta: self.eta },
            LawKind::LeviFlat => CurveLaw::LeviFlat,
            LawKind::Austere => CurveLaw::AusterePregeodesic,
        }
    }

    /// Checks every field and fills the seed from the environment.
    pub fn validate(&mut self) -> Result<()> {
        self.spec()?;
        let positive = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0 && v.is_finite()) {
                bail!("invalid config: {name} must be positive, got {v}");
            }
            Ok(())
        };
        positive("step", self.step)?;
        positive("t_half", self.t_half)?;
        positive("s_extent", self.s_extent)?;
        if !self.eta.is_finite() {
            bail!("invalid config: eta must be finite");
        }
        if !self.point.iter().all(|v| v.is_finite()) {
            bail!("invalid config: point must be finite");
        }
        if let Some(t) = self.theta {
            if !t.is_finite() {
                bail!("invalid config: theta must be finite");
            }
        }
        if self.n_steps == Some(0) {
            bail!("invalid config: n_steps must be at least 1");
        }
        if self.grid.iter().any(|&n| n == 0) {
            bail!("invalid config: grid sizes must be at least 1, got {:?}", self.grid);
        }
        self.tolerances.resolve()?;
        if self.seed.is_none() {
            self.seed = seed_from_env()?;
        }
        Ok(())
    }

    /// Steps per direction covering the box plus the integration margin.
    pub fn steps(&self) -> usize {
        self.n_steps.unwrap_or(((self.t_half + 0.1) / self.step).ceil() as usize)
    }
}

pub fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| anyhow::anyhow!("invalid {SEED_ENV}: `{s}` is not an unsigned integer")),
        Err(_) => Ok(None),
    }
}
