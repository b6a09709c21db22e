//! End-to-end computation for one dataset and one parameter set.

use thiserror::Error;

use crate::groups::{compute_maximal_groups, GroupError, MaximalGroup};
use crate::model::{Dataset, ModelError, Params};
use crate::reeb::{build_reeb, reduce, ReebError, ReebGraph};
use crate::robust::{robustify_with_stats, RobustError, RobustStats};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reeb(#[from] ReebError),
    #[error(transparent)]
    Robust(#[from] RobustError),
    #[error(transparent)]
    Groups(#[from] GroupError),
}

impl PipelineError {
    /// True when the failure is a broken internal invariant rather than bad
    /// input or parameters.
    pub fn is_internal(&self) -> bool {
        match self {
            PipelineError::Model(_) => false,
            PipelineError::Reeb(ReebError::Model(_)) => false,
            PipelineError::Reeb(_) => true,
            PipelineError::Robust(RobustError::InvalidAlpha(_)) => false,
            PipelineError::Robust(_) => true,
            PipelineError::Groups(_) => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput<T> {
    /// Reeb graph of the ε-components.
    pub reeb: ReebGraph<T>,
    /// The same graph after robustification with α (identical for α = 0).
    pub robust_reeb: ReebGraph<T>,
    pub groups: Vec<MaximalGroup<T>>,
    /// `robust_reeb` restricted to the edges that support a reported group.
    pub reduced: ReebGraph<T>,
    pub stats: RobustStats,
}

/// Builds the Reeb graph, robustifies it, computes the maximal groups and
/// reduces the graph to their support.
pub fn run_pipeline<T: Scalar>(ds: &Dataset<T>, params: &Params<T>) -> Result<PipelineOutput<T>, PipelineError> {
    params.validate()?;
    let reeb = build_reeb(ds, params.eps)?;
    let (robust_reeb, stats) = robustify_with_stats(&reeb, params.alpha)?;
    let groups = compute_maximal_groups(&robust_reeb, params.m, params.delta)?;
    let reduced = reduce(&robust_reeb, &groups);
    Ok(PipelineOutput { reeb, robust_reeb, groups, reduced, stats })
}
