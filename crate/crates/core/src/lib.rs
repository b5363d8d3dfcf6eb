//! Spherical analysis and heat kernels on noncompact Riemannian symmetric
//! spaces: c-functions, spherical functions, heat kernels and long-time
//! convergence experiments for the Laplace–Beltrami and distinguished
//! Laplacian heat flows.

pub mod acceptance;
pub mod convlab;
pub mod error;
pub mod fit;
pub mod gamma;
pub mod harish;
pub mod heatkern;
pub mod ode;
pub mod quad;
pub mod spacegeom;
pub mod solvlab;
pub mod spherical;

pub use error::{Error, Result};
pub use harish::{CFunction, SpectralPoint};
pub use spacegeom::{AbstractDatum, ChamberPoint, JacobiParams, RootDatum, SpaceName, SpaceSpec};
pub use heatkern::{ConcentrationSpec, HeatEngine, KernelTable};
pub use convlab::{ConvergenceReport, InitialDatum, Profile};
