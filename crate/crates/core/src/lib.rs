//! Umbilic points of surfaces through the space of their cubic forms.
//!
//! - [`cubic_forms`]: coefficient vectors `(a, b, b', a')`, the rotation action,
//!   the index form `T` and the invariant planes `U1`, `U2`.
//! - [`invariant_metrics`]: the rotation-invariant metrics `Q(alpha, beta)`,
//!   orbit averaging, the asymmetry `sigma` and adapted orthonormal frames.
//! - [`volume_geometry`]: volumes of the cones where `T` is negative or
//!   positive, in closed form and by seeded Monte Carlo.
//! - [`principal_field`]: Monge-chart surfaces with an umbilic at the origin,
//!   their principal line fields, and the index by winding.

pub mod cubic_forms;
pub mod error;
pub mod invariant_metrics;
pub mod principal_field;
pub mod stream;
pub mod volume_geometry;

pub use cubic_forms::{CubicForm, RComponents, UmbilicIndex};
pub use error::{Error, Result};
pub use invariant_metrics::{InvariantMetric, OrthonormalFrame};
pub use principal_field::{LmnCoefficients, MongeSurface};
pub use volume_geometry::{ConeVolumes, McEstimate};
