//! Principal component analysis over standardized features.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureMatrix, Standardization};

/// Eigenvalues below this are treated as numerically zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PcaError {
    #[error("k = {k} exceeds min(rows - 1, columns) = {max}")]
    KTooLarge { k: usize, max: usize },
    #[error("k must be at least 1")]
    ZeroComponents,
    #[error("PCA needs at least two rows")]
    TooFewRows,
    #[error("expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaProjection {
    pub column_means: Vec<f64>,
    pub column_stds: Vec<f64>,
    /// k × d; rows are principal directions in standardized space.
    pub components: Array2<f64>,
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// Components beyond the numerical rank, zero-padded.
    pub rank_deficient: Vec<bool>,
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues sorted descending and eigenvectors as matching columns.
pub fn symmetric_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let scale = m
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| m[[p, q]] * m[[p, q]])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[[k, p]], m[[k, q]]);
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[[p, k]], m[[q, k]]);
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].total_cmp(&m[[i, i]]));
    let values = order.iter().map(|&i| m[[i, i]]).collect();
    let vectors = v.select(Axis(1), &order);
    (values, vectors)
}

/// Population covariance of standardized columns.
fn covariance(z: &Array2<f64>) -> Array2<f64> {
    z.t().dot(z) / z.nrows() as f64
}

pub fn fit_pca(features: &FeatureMatrix, k: usize) -> Result<PcaProjection, PcaError> {
    let (n, d) = features.values.dim();
    if n < 2 {
        return Err(PcaError::TooFewRows);
    }
    if k == 0 {
        return Err(PcaError::ZeroComponents);
    }
    let max = (n - 1).min(d);
    if k > max {
        return Err(PcaError::KTooLarge { k, max });
    }
    let scale = Standardization::fit(&features.values);
    let mut z = features.values.clone();
    scale.apply(&mut z);
    let (eigenvalues, vectors) = symmetric_eigen(&covariance(&z));
    let total: f64 = eigenvalues.iter().map(|v| v.max(0.0)).sum();

    let mut components = Array2::zeros((k, d));
    let mut explained_variance = Vec::with_capacity(k);
    let mut rank_deficient = Vec::with_capacity(k);
    for (i, &lambda) in eigenvalues.iter().enumerate().take(k) {
        if lambda < RANK_TOLERANCE {
            explained_variance.push(0.0);
            rank_deficient.push(true);
            continue;
        }
        let mut dir: Array1<f64> = vectors.column(i).to_owned();
        let pivot = dir
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0f64), |best, (j, x)| {
                if x.abs() > best.1.abs() {
                    (j, x)
                } else {
                    best
                }
            })
            .0;
        if dir[pivot] < 0.0 {
            dir.mapv_inplace(|x| -x);
        }
        components.row_mut(i).assign(&dir);
        explained_variance.push(lambda);
        rank_deficient.push(false);
    }
    let explained_variance_ratio = explained_variance
        .iter()
        .map(|v| if total > 0.0 { v / total } else { 0.0 })
        .collect();
    Ok(PcaProjection {
        column_means: scale.means,
        column_stds: scale.stds,
        components,
        explained_variance,
        explained_variance_ratio,
        rank_deficient,
    })
}

impl PcaProjection {
    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.components.ncols()
    }

    fn scale(&self) -> Standardization {
        Standardization {
            means: self.column_means.clone(),
            stds: self.column_stds.clone(),
        }
    }

    /// Scores = standardized(X) · Cᵀ.
    pub fn transform(&self, x: &Array2<f64>) -> Result<Array2<f64>, PcaError> {
        if x.ncols() != self.n_features() {
            return Err(PcaError::DimensionMismatch {
                expected: self.n_features(),
                found: x.ncols(),
            });
        }
        let mut z = x.clone();
        self.scale().apply(&mut z);
        Ok(z.dot(&self.components.t()))
    }

    /// Maps scores back to the original feature scale.
    pub fn inverse_transform(&self, scores: &Array2<f64>) -> Result<Array2<f64>, PcaError> {
        if scores.ncols() != self.n_components() {
            return Err(PcaError::DimensionMismatch {
                expected: self.n_components(),
                found: scores.ncols(),
            });
        }
        let mut x = scores.dot(&self.components);
        self.scale().invert(&mut x);
        Ok(x)
    }

    /// Per-row mean squared reconstruction error in standardized units.
    pub fn reconstruction_errors(&self, x: &Array2<f64>) -> Result<Vec<f64>, PcaError> {
        let scores = self.transform(x)?;
        let mut z = x.clone();
        self.scale().apply(&mut z);
        let recon = scores.dot(&self.components);
        let d = self.n_features() as f64;
        Ok(z.rows()
            .into_iter()
            .zip(recon.rows())
            .map(|(a, b)| {
                a.iter()
                    .zip(b.iter())
                    .map(|(p, q)| (p - q).powi(2))
                    .sum::<f64>()
                    / d
            })
            .collect())
    }
}
