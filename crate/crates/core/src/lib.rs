//! Trajectory grouping structure.
//!
//! Given synchronized trajectories of moving entities, this crate builds the
//! Reeb graph of the ε-connected components over time, reports every maximal
//! group for a minimum size `m` and duration `δ`, and optionally relaxes the
//! graph so that interruptions shorter than a window `α` are ignored.
//!
//! Everything numeric is generic over [`Scalar`] (`f64` and `f32`); the
//! aliases at the crate root fix the scalar to `f64`, with `…32` variants for
//! `f32`.
//!
//! ```
//! use trajgroup::{fixtures, run_pipeline, Params};
//!
//! let ds = fixtures::figure2::<f64>();
//! let params = Params::new(fixtures::FIGURE2_EPS, 2, 1.5, 0.0).unwrap();
//! let out = run_pipeline(&ds, &params).unwrap();
//! assert_eq!(out.groups.len(), 4);
//! ```

pub mod connectivity;
pub mod events;
pub mod fixtures;
pub mod gen;
pub mod groups;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod query;
pub mod reeb;
pub mod robust;
pub mod scalar;

pub use pipeline::{run_pipeline, PipelineError};
pub use scalar::Scalar;

pub type Point = model::Point<f64>;
pub type Dataset = model::Dataset<f64>;
pub type Params = model::Params<f64>;
pub type Interval = model::Interval<f64>;
pub type ReebGraph = reeb::ReebGraph<f64>;
pub type MaximalGroup = groups::MaximalGroup<f64>;
pub type PipelineOutput = pipeline::PipelineOutput<f64>;

pub type Point32 = model::Point<f32>;
pub type Dataset32 = model::Dataset<f32>;
pub type Params32 = model::Params<f32>;
pub type Interval32 = model::Interval<f32>;
pub type ReebGraph32 = reeb::ReebGraph<f32>;
pub type MaximalGroup32 = groups::MaximalGroup<f32>;
pub type PipelineOutput32 = pipeline::PipelineOutput<f32>;

pub use model::EntitySet;
