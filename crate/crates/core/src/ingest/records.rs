use std::fmt;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Names of the eleven chronic-condition indicators, in column order.
pub const CHRONIC_CONDITIONS: [&str; 11] = [
    "alzheimer",
    "heart_failure",
    "kidney_disease",
    "cancer",
    "obstructive_pulmonary",
    "depression",
    "diabetes",
    "ischemic_heart",
    "osteoporosis",
    "rheumatoid_arthritis",
    "stroke",
];

pub const MAX_DIAGNOSIS_CODES: usize = 10;
pub const MAX_PROCEDURE_CODES: usize = 6;

/// Currency amount held as integer cents.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Cents(pub i64);

impl Cents {
    pub fn from_dollars(dollars: i64) -> Self {
        Cents(dollars * 100)
    }

    pub fn as_dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        if abs.is_multiple_of(100) {
            write!(f, "{sign}{}", abs / 100)
        } else {
            write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    Inpatient,
    Outpatient,
}

impl Setting {
    pub fn as_str(self) -> &'static str {
        match self {
            Setting::Inpatient => "inpatient",
            Setting::Outpatient => "outpatient",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeneficiaryRecord {
    pub beneficiary_id: String,
    pub date_of_birth: NaiveDate,
    pub date_of_death: Option<NaiveDate>,
    pub gender: String,
    pub race: String,
    /// Indexed like [`CHRONIC_CONDITIONS`]; `true` means the condition is present.
    pub chronic_conditions: [bool; 11],
    pub annual_ip_reimbursement: Cents,
    pub annual_op_reimbursement: Cents,
    pub annual_ip_deductible: Cents,
    pub annual_op_deductible: Cents,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimRecord {
    pub claim_id: String,
    pub beneficiary_id: String,
    pub provider_id: String,
    pub claim_start: NaiveDate,
    pub claim_end: NaiveDate,
    pub admission_date: Option<NaiveDate>,
    pub discharge_date: Option<NaiveDate>,
    pub reimbursed_amount: Cents,
    pub deductible_paid: Cents,
    pub attending_physician: Option<String>,
    pub operating_physician: Option<String>,
    pub other_physician: Option<String>,
    pub diagnosis_codes: Vec<String>,
    pub procedure_codes: Vec<String>,
    pub setting: Setting,
}

impl ClaimRecord {
    /// Checks the date and setting invariants, returning a description of the first breach.
    pub fn validate(&self) -> Result<(), String> {
        if self.claim_end < self.claim_start {
            return Err(format!(
                "claim_end {} precedes claim_start {}",
                self.claim_end, self.claim_start
            ));
        }
        if let (Some(admit), Some(discharge)) = (self.admission_date, self.discharge_date) {
            if discharge < admit {
                return Err(format!(
                    "discharge_date {discharge} precedes admission_date {admit}"
                ));
            }
        }
        if self.setting == Setting::Inpatient {
            if self.admission_date.is_none() {
                return Err("inpatient claim without admission_date".into());
            }
            if self.discharge_date.is_none() {
                return Err("inpatient claim without discharge_date".into());
            }
        }
        if self.diagnosis_codes.len() > MAX_DIAGNOSIS_CODES {
            return Err(format!("{} diagnosis codes", self.diagnosis_codes.len()));
        }
        if self.procedure_codes.len() > MAX_PROCEDURE_CODES {
            return Err(format!("{} procedure codes", self.procedure_codes.len()));
        }
        Ok(())
    }

    pub fn duration_days(&self) -> i64 {
        (self.claim_end - self.claim_start).num_days()
    }

    pub fn admission_days(&self) -> Option<i64> {
        match (self.admission_date, self.discharge_date) {
            (Some(a), Some(d)) => Some((d - a).num_days()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProviderLabel {
    pub provider_id: String,
    pub potential_fraud: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedRow {
    pub claim: ClaimRecord,
    pub beneficiary: Arc<BeneficiaryRecord>,
    pub potential_fraud: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCounts {
    pub n_inpatient: usize,
    pub n_outpatient: usize,
    pub n_beneficiaries: usize,
    pub n_providers: usize,
}

/// Rows lost to the inner joins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinReport {
    pub dropped_missing_beneficiary: usize,
    pub dropped_missing_label: usize,
}

impl JoinReport {
    pub fn total_dropped(&self) -> usize {
        self.dropped_missing_beneficiary + self.dropped_missing_label
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergedDataset {
    pub rows: Vec<MergedRow>,
    pub source_counts: SourceCounts,
    pub join_report: JoinReport,
}

impl MergedDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct provider ids in first-appearance order.
    pub fn provider_ids(&self) -> Vec<&str> {
        let mut seen = std::collections::HashSet::new();
        self.rows
            .iter()
            .map(|r| r.claim.provider_id.as_str())
            .filter(|p| seen.insert(*p))
            .collect()
    }

    /// Keeps the rows whose provider satisfies `keep`, preserving order.
    pub fn filter_providers(&self, keep: impl Fn(&str) -> bool) -> MergedDataset {
        let rows: Vec<MergedRow> = self
            .rows
            .iter()
            .filter(|r| keep(&r.claim.provider_id))
            .cloned()
            .collect();
        let mut out = MergedDataset {
            rows,
            source_counts: SourceCounts::default(),
            join_report: JoinReport::default(),
        };
        out.source_counts = out.observed_counts();
        out
    }

    /// Counts derived from the rows themselves.
    pub fn observed_counts(&self) -> SourceCounts {
        let mut benes = std::collections::HashSet::new();
        let mut providers = std::collections::HashSet::new();
        let mut counts = SourceCounts::default();
        for row in &self.rows {
            match row.claim.setting {
                Setting::Inpatient => counts.n_inpatient += 1,
                Setting::Outpatient => counts.n_outpatient += 1,
            }
            benes.insert(row.claim.beneficiary_id.as_str());
            providers.insert(row.claim.provider_id.as_str());
        }
        counts.n_beneficiaries = benes.len();
        counts.n_providers = providers.len();
        counts
    }
}
