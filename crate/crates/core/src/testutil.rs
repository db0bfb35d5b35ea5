//! Small hand-built datasets shared by unit tests.

use std::sync::Arc;

use chrono::NaiveDate;

use crate::ingest::{BeneficiaryRecord, Cents, ClaimRecord, MergedDataset, MergedRow, Setting};

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

pub fn beneficiary(id: &str, dob: NaiveDate) -> BeneficiaryRecord {
    BeneficiaryRecord {
        beneficiary_id: id.into(),
        date_of_birth: dob,
        date_of_death: None,
        gender: "1".into(),
        race: "1".into(),
        chronic_conditions: [false; 11],
        annual_ip_reimbursement: Cents(0),
        annual_op_reimbursement: Cents(0),
        annual_ip_deductible: Cents(0),
        annual_op_deductible: Cents(0),
    }
}

pub struct RowSpec<'a> {
    pub claim_id: &'a str,
    pub provider: &'a str,
    pub dollars: i64,
    pub fraud: bool,
    pub codes: &'a [&'a str],
}

pub fn row(spec: RowSpec<'_>, bene: &Arc<BeneficiaryRecord>) -> MergedRow {
    let d = date(2009, 3, 1);
    MergedRow {
        claim: ClaimRecord {
            claim_id: spec.claim_id.into(),
            beneficiary_id: bene.beneficiary_id.clone(),
            provider_id: spec.provider.into(),
            claim_start: d,
            claim_end: d,
            admission_date: None,
            discharge_date: None,
            reimbursed_amount: Cents::from_dollars(spec.dollars),
            deductible_paid: Cents(0),
            attending_physician: Some(format!("PHY-{}", spec.provider)),
            operating_physician: None,
            other_physician: None,
            diagnosis_codes: spec.codes.iter().map(|s| s.to_string()).collect(),
            procedure_codes: vec![],
            setting: Setting::Outpatient,
        },
        beneficiary: Arc::clone(bene),
        potential_fraud: spec.fraud,
    }
}

/// Rows from (provider, dollars, fraud, codes) tuples sharing one beneficiary born 1940-01-01.
pub fn dataset(rows: &[(&str, i64, bool, &[&str])]) -> MergedDataset {
    let bene = Arc::new(beneficiary("B1", date(1940, 1, 1)));
    let rows: Vec<MergedRow> = rows
        .iter()
        .enumerate()
        .map(|(i, &(provider, dollars, fraud, codes))| {
            let id = format!("C{i}");
            row(
                RowSpec {
                    claim_id: &id,
                    provider,
                    dollars,
                    fraud,
                    codes,
                },
                &bene,
            )
        })
        .collect();
    let mut ds = MergedDataset {
        rows,
        ..Default::default()
    };
    ds.source_counts = ds.observed_counts();
    ds
}
