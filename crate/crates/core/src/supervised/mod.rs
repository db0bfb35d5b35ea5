//! Supervised baselines: L2-regularized logistic regression trained by
//! full-batch gradient descent, and a Gini random forest with
//! class-probability leaves.

mod forest;
mod logistic;

use thiserror::Error;

pub use forest::{
    bootstrap_indices, predict_proba_forest, train_forest, tree_rng, ForestModel, ForestParams,
    Node,
};
pub use logistic::{
    classify, loss_and_gradient, predict_proba_logistic, sigmoid, train_logistic, LogisticModel,
    LogisticParams,
};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("feature matrix is empty")]
    EmptyMatrix,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("expected {expected} feature columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
}
