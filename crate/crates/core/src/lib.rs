//! Numerical geometry of real hypersurfaces in the complex projective plane
//! `CP²(c)` and the complex hyperbolic plane `CH²(c)`.
//!
//! The crate builds cohomogeneity-one hypersurfaces by sweeping a curve of a
//! two-dimensional section with one of the five cohomogeneity-two polar
//! actions, and classifies hypersurfaces (Hopf, strongly 2-Hopf, austere,
//! Levi-flat, ruled, constant mean curvature) from finite-difference jets.
//!
//! Module map:
//! - [`ambient`]: space forms, metric, complex structure, curvature, geodesics.
//! - [`actions`]: the polar actions, orbit shape operators, the Hopf obstruction.
//! - [`hypersurface`]: patches, shape operators, adapted frames, classification.
//! - [`constructor`]: prescribed-curvature curves and the equivariant sweep.
//! - [`catalog`]: closed-form reference hypersurfaces.
//! - [`suites`]: the invariant suites driven by `hopflab verify`.

pub mod actions;
pub mod ambient;
pub mod catalog;
pub mod constructor;
pub mod error;
pub mod fd;
pub mod hypersurface;
pub mod serde_c3;
pub mod serde_f64;
pub mod suites;

pub use ambient::{AmbientPoint, AmbientTangent, SectionChart, SpaceForm, SpaceKind, C3};
pub use error::{GeometryError, Result};
