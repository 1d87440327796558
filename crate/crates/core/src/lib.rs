//! Heat and Poisson kernels on the three constant-curvature model spaces.
//!
//! Every kernel is radial, so a query is a dimension, a kernel kind with its
//! time `t` (heat) or height `y` (Poisson), and a geodesic distance. Each
//! space offers several independent representations of the same kernel:
//!
//! - closed forms where they exist,
//! - the dimension-raising operator `D = -(2π w(r))⁻¹ d/dr` iterated on a
//!   low-dimensional generator, evaluated exactly with truncated Taylor jets,
//! - Abel-type descent integrals from dimension `n + 1` to `n`,
//! - the wrapped-Gaussian theta series on the circle and its two-sphere analogue,
//! - subordination of the heat semigroup into the Poisson semigroup,
//! - Gruet-type Bromwich contour integrals, switched to multiprecision
//!   arithmetic automatically when the contour integrand cancels badly.
//!
//! The [`analysis`] module cross-checks these against one another and against
//! the defining PDEs; [`suites`] bundles the checks into reports.

pub mod analysis;
pub mod error;
pub mod euclid;
pub mod exec;
pub mod geometry;
pub mod hyperbolic;
pub mod jets;
pub mod kernel;
pub mod quadrature;
pub mod special;
pub mod sphere;
pub mod suites;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{Convention, KernelKind, KernelQuery, Space};
pub use jets::Jet;
pub use kernel::{evaluate, EvalOptions, Evaluation, Representation, Warning};
pub use quadrature::{ContourSpec, QuadResult};

/// Default quadrature tolerance when neither a flag nor `CK_DEFAULT_TOL` is given.
pub const DEFAULT_TOL: f64 = 1e-10;
