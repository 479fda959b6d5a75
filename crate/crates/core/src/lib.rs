//! Weak-value amplified beam deflection in a Sagnac interferometer.
//!
//! Three independent routes to the dark-port deflection:
//!
//! * [`wv`]: pre/post-selection algebra of the which-path two-level system.
//! * [`collimated`]: the reexponentiated weak-value amplitude and the exact
//!   beamsplitter/mirror matrix chain for a collimated Gaussian beam.
//! * [`fourier`]: sampled-field paraxial optics (lens, free propagation,
//!   mirror kicks) for the diverging-beam configuration.
//!
//! [`measure`] turns sampled detector fields into deflections and
//! post-selection probabilities.

pub mod collimated;
pub mod error;
pub mod field;
pub mod fourier;
pub mod measure;
pub mod wv;

pub use collimated::{CollimatedParams, CollimatedReport, TwoPortField, TwoPortMatrix};
pub use error::{Result, WeakBeamError};
pub use field::{Grid, SampledField};
pub use fourier::{DivergingGeometry, EffectiveLength, FftPlan, Plane};
pub use measure::{DeflectionReport, GaussianFit, SignConvention};
pub use wv::{Observable2, TwoLevelState, WeakValueResult};
