use std::io::Write;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::FeatureError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisUnit {
    #[default]
    Claim,
    Provider,
}

/// Per-column (mean, std) used to standardize a matrix. Constant columns carry std 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardization {
    /// Population mean and std per column.
    pub fn fit(values: &Array2<f64>) -> Self {
        let n = values.nrows().max(1) as f64;
        let mut means = Vec::with_capacity(values.ncols());
        let mut stds = Vec::with_capacity(values.ncols());
        for col in values.axis_iter(Axis(1)) {
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            means.push(mean);
            stds.push(if std <= 1e-12 * mean.abs().max(1.0) {
                1.0
            } else {
                std
            });
        }
        Standardization { means, stds }
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn apply(&self, values: &mut Array2<f64>) {
        for (j, mut col) in values.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.means[j], self.stds[j]);
            col.mapv_inplace(|v| (v - m) / s);
        }
    }

    pub fn invert(&self, values: &mut Array2<f64>) {
        for (j, mut col) in values.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.means[j], self.stds[j]);
            col.mapv_inplace(|v| v * s + m);
        }
    }
}

/// Dense design matrix: one row per analysis unit, named columns, binary target.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub values: Array2<f64>,
    pub column_names: Vec<String>,
    pub target: Vec<bool>,
    /// Claim ids or provider ids, aligned with rows.
    pub row_ids: Vec<String>,
    pub standardization: Option<Standardization>,
    pub unit: AnalysisUnit,
}

impl FeatureMatrix {
    pub fn new(
        values: Array2<f64>,
        column_names: Vec<String>,
        target: Vec<bool>,
        row_ids: Vec<String>,
        unit: AnalysisUnit,
    ) -> Result<Self, FeatureError> {
        if values.ncols() != column_names.len()
            || values.nrows() != target.len()
            || values.nrows() != row_ids.len()
        {
            return Err(FeatureError::DimensionMismatch(format!(
                "{}x{} values, {} columns, {} targets, {} ids",
                values.nrows(),
                values.ncols(),
                column_names.len(),
                target.len(),
                row_ids.len()
            )));
        }
        if let Some(((r, c), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(FeatureError::NonFinite {
                row: r,
                column: column_names[c].clone(),
            });
        }
        Ok(FeatureMatrix {
            values,
            column_names,
            target,
            row_ids,
            standardization: None,
            unit,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    /// Fits standardization on this matrix, applies it and records it.
    pub fn standardize(&mut self) -> &Standardization {
        let s = Standardization::fit(&self.values);
        s.apply(&mut self.values);
        self.standardization.insert(s)
    }

    /// Applies previously fitted parameters (e.g. from a training split).
    pub fn apply_standardization(&mut self, s: &Standardization) -> Result<(), FeatureError> {
        if s.len() != self.n_cols() {
            return Err(FeatureError::DimensionMismatch(format!(
                "{} standardization columns for {} features",
                s.len(),
                self.n_cols()
            )));
        }
        s.apply(&mut self.values);
        self.standardization = Some(s.clone());
        Ok(())
    }

    /// Values on the original scale.
    pub fn destandardized(&self) -> Array2<f64> {
        let mut v = self.values.clone();
        if let Some(s) = &self.standardization {
            s.invert(&mut v);
        }
        v
    }

    /// Rows whose index satisfies `keep`, in order.
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> FeatureMatrix {
        let idx: Vec<usize> = (0..self.n_rows()).filter(|&i| keep(i)).collect();
        FeatureMatrix {
            values: self.values.select(Axis(0), &idx),
            column_names: self.column_names.clone(),
            target: idx.iter().map(|&i| self.target[i]).collect(),
            row_ids: idx.iter().map(|&i| self.row_ids[i].clone()).collect(),
            standardization: self.standardization.clone(),
            unit: self.unit,
        }
    }

    /// Rows labeled non-fraud.
    pub fn non_fraud(&self) -> FeatureMatrix {
        self.select_rows(|i| !self.target[i])
    }

    /// CSV with one column per feature and a trailing `target` column.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), FeatureError> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header = self.column_names.clone();
        header.push("target".into());
        w.write_record(&header)?;
        for (row, &t) in self.values.axis_iter(Axis(0)).zip(&self.target) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(u8::from(t).to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// JSON sidecar holding the column names and standardization parameters.
    pub fn sidecar(&self) -> FeatureSidecar {
        FeatureSidecar {
            unit: self.unit,
            columns: self
                .column_names
                .iter()
                .enumerate()
                .map(|(j, name)| ColumnScale {
                    name: name.clone(),
                    mean: self.standardization.as_ref().map(|s| s.means[j]),
                    std: self.standardization.as_ref().map(|s| s.stds[j]),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub name: String,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSidecar {
    pub unit: AnalysisUnit,
    pub columns: Vec<ColumnScale>,
}
