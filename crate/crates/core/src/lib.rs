//! Country fitness and product complexity on bipartite export networks.
//!
//! The crate is organised along the processing chain:
//!
//! * [`trade`] turns export volumes into revealed comparative advantage and
//!   a binary country×product matrix ([`matrix::BinaryMatrix`]);
//! * [`fixed_point`] iterates the original normalised map as well as the
//!   inhomogeneous and rescaled maps;
//! * [`analytic`] evaluates the mean-field, first- and second-order closed
//!   forms of the rescaled fixed point;
//! * [`stability`] builds the Jacobian at a fixed point and certifies local
//!   convergence through its spectral radius;
//! * [`analysis`] derives inefficiency and net-efficiency, rank correlations,
//!   power-law fits and the bit-flip noise experiment.
//!
//! [`generate`] holds deterministic synthetic matrix families used by the
//! tests, the CLI and the browser demo.

pub mod analysis;
pub mod analytic;
pub mod error;
pub mod fixed_point;
pub mod generate;
pub mod matrix;
pub mod report;
pub mod stability;
pub mod trade;

pub use error::{Error, Result};
pub use fixed_point::{Convergence, MapConfig, MetricState, Variant};
pub use matrix::BinaryMatrix;
