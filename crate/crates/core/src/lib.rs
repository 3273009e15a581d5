//! Reconstruction of multivariate bandlimited functions from samples on
//! nonuniform Riesz-basis node sequences by kernel collocation.

pub mod bandlimited;
pub mod conditions;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod interpolation;
pub mod kernels;
pub mod nodes;
pub mod quadrature;

pub use bandlimited::{synthesize, BandlimitedFunction, FunctionSpec, Preset, Spectrum};
pub use error::{Error, Result};
pub use geometry::{BodyKind, BodyMetrics, BodySpec, ConvexBody};
pub use interpolation::{averaged, AveragedApproximant, CollocationSystem, Interpolant};
pub use kernels::{Family, Kernel, KernelSpec, RadialProfile};
pub use nodes::{kadec_1d, separation, tensor, NodeSet, NodeSpec};
pub use conditions::{check_interpolator, regularity_sweep, series_bound_check, theoretical_exponent};
pub use experiments::{fit_rate, read_report, run_sweep, write_report, SweepConfig, SweepReport};
