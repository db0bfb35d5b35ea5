//! CSV writers: the four source tables in the default dataset layout, and a
//! single-file canonical form of a merged dataset.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::Arc;

use chrono::NaiveDate;

use super::parse::parse_date;
use super::records::{
    BeneficiaryRecord, Cents, ClaimRecord, MergedDataset, MergedRow, ProviderLabel, Setting,
    CHRONIC_CONDITIONS, MAX_DIAGNOSIS_CODES, MAX_PROCEDURE_CODES,
};
use super::schema::{BeneficiaryColumns, ClaimColumns, LabelColumns};
use super::IngestError;

fn date_text(d: Option<NaiveDate>) -> String {
    d.map(|d| d.format("%Y-%m-%d").to_string())
        .unwrap_or_default()
}

pub fn write_beneficiaries<W: Write>(
    sink: W,
    records: &[BeneficiaryRecord],
) -> Result<(), IngestError> {
    let cols = BeneficiaryColumns::default();
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec![
        cols.beneficiary_id.clone(),
        cols.date_of_birth.clone(),
        cols.date_of_death.clone(),
        cols.gender.clone(),
        cols.race.clone(),
    ];
    header.extend(cols.chronic_conditions.iter().cloned());
    header.extend([
        cols.annual_ip_reimbursement.clone(),
        cols.annual_ip_deductible.clone(),
        cols.annual_op_reimbursement.clone(),
        cols.annual_op_deductible.clone(),
    ]);
    w.write_record(&header)?;
    for b in records {
        let mut row = vec![
            b.beneficiary_id.clone(),
            date_text(Some(b.date_of_birth)),
            date_text(b.date_of_death),
            b.gender.clone(),
            b.race.clone(),
        ];
        row.extend(
            b.chronic_conditions
                .iter()
                .map(|&f| if f { "1" } else { "2" }.to_string()),
        );
        row.extend([
            b.annual_ip_reimbursement.to_string(),
            b.annual_ip_deductible.to_string(),
            b.annual_op_reimbursement.to_string(),
            b.annual_op_deductible.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_claims<W: Write>(sink: W, records: &[ClaimRecord]) -> Result<(), IngestError> {
    let cols = ClaimColumns::default();
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec![
        cols.beneficiary_id.clone(),
        cols.claim_id.clone(),
        cols.claim_start.clone(),
        cols.claim_end.clone(),
        cols.provider_id.clone(),
        cols.reimbursed_amount.clone(),
        cols.attending_physician.clone(),
        cols.operating_physician.clone(),
        cols.other_physician.clone(),
        cols.admission_date.clone(),
        cols.deductible_paid.clone(),
        cols.discharge_date.clone(),
    ];
    header.extend((1..=MAX_DIAGNOSIS_CODES).map(|k| format!("{}{k}", cols.diagnosis_prefix)));
    header.extend((1..=MAX_PROCEDURE_CODES).map(|k| format!("{}{k}", cols.procedure_prefix)));
    w.write_record(&header)?;
    for c in records {
        let mut row = vec![
            c.beneficiary_id.clone(),
            c.claim_id.clone(),
            date_text(Some(c.claim_start)),
            date_text(Some(c.claim_end)),
            c.provider_id.clone(),
            c.reimbursed_amount.to_string(),
            c.attending_physician.clone().unwrap_or_default(),
            c.operating_physician.clone().unwrap_or_default(),
            c.other_physician.clone().unwrap_or_default(),
            date_text(c.admission_date),
            c.deductible_paid.to_string(),
            date_text(c.discharge_date),
        ];
        row.extend(padded(&c.diagnosis_codes, MAX_DIAGNOSIS_CODES));
        row.extend(padded(&c.procedure_codes, MAX_PROCEDURE_CODES));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn padded(codes: &[String], width: usize) -> impl Iterator<Item = String> + '_ {
    codes
        .iter()
        .cloned()
        .chain(std::iter::repeat(String::new()))
        .take(width)
}

pub fn write_labels<W: Write>(sink: W, labels: &[ProviderLabel]) -> Result<(), IngestError> {
    let cols = LabelColumns::default();
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([&cols.provider_id, &cols.potential_fraud])?;
    for l in labels {
        w.write_record([
            l.provider_id.as_str(),
            if l.potential_fraud { "Yes" } else { "No" },
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

const CANONICAL_FIXED: [&str; 14] = [
    "claim_id",
    "beneficiary_id",
    "provider_id",
    "setting",
    "claim_start",
    "claim_end",
    "admission_date",
    "discharge_date",
    "reimbursed_amount",
    "deductible_paid",
    "attending_physician",
    "operating_physician",
    "other_physician",
    "diagnosis_codes",
];

const CANONICAL_TAIL: [&str; 9] = [
    "annual_ip_reimbursement",
    "annual_op_reimbursement",
    "annual_ip_deductible",
    "annual_op_deductible",
    "potential_fraud",
    "date_of_birth",
    "date_of_death",
    "gender",
    "race",
];

fn canonical_header() -> Vec<String> {
    let mut h: Vec<String> = CANONICAL_FIXED.iter().map(|s| s.to_string()).collect();
    h.push("procedure_codes".into());
    h.extend(CHRONIC_CONDITIONS.iter().map(|c| format!("chronic_{c}")));
    h.extend(CANONICAL_TAIL.iter().map(|s| s.to_string()));
    h
}

/// One row per merged claim; code lists are `|`-joined.
pub fn write_canonical<W: Write>(sink: W, dataset: &MergedDataset) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(canonical_header())?;
    for r in &dataset.rows {
        let c = &r.claim;
        let b = &r.beneficiary;
        let mut row = vec![
            c.claim_id.clone(),
            c.beneficiary_id.clone(),
            c.provider_id.clone(),
            c.setting.as_str().to_string(),
            date_text(Some(c.claim_start)),
            date_text(Some(c.claim_end)),
            date_text(c.admission_date),
            date_text(c.discharge_date),
            c.reimbursed_amount.0.to_string(),
            c.deductible_paid.0.to_string(),
            c.attending_physician.clone().unwrap_or_default(),
            c.operating_physician.clone().unwrap_or_default(),
            c.other_physician.clone().unwrap_or_default(),
            c.diagnosis_codes.join("|"),
            c.procedure_codes.join("|"),
        ];
        row.extend(
            b.chronic_conditions
                .iter()
                .map(|&f| u8::from(f).to_string()),
        );
        row.extend([
            b.annual_ip_reimbursement.0.to_string(),
            b.annual_op_reimbursement.0.to_string(),
            b.annual_ip_deductible.0.to_string(),
            b.annual_op_deductible.0.to_string(),
            u8::from(r.potential_fraud).to_string(),
            date_text(Some(b.date_of_birth)),
            date_text(b.date_of_death),
            b.gender.clone(),
            b.race.clone(),
        ]);
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads the canonical form back. Source counts are recomputed from the rows
/// and the join report is empty.
pub fn read_canonical<R: Read>(source: R) -> Result<MergedDataset, IngestError> {
    let mut rdr = csv::Reader::from_reader(source);
    let expected = canonical_header();
    let headers = rdr.headers()?.clone();
    for name in &expected {
        if !headers.iter().any(|h| h == name) {
            return Err(IngestError::MissingColumn(name.clone()));
        }
    }
    let idx: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let mut benes: HashMap<String, Arc<BeneficiaryRecord>> = HashMap::new();
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let get = |name: &str| record.get(idx[name]).unwrap_or_default();
        let opt = |name: &str| {
            Some(get(name))
                .filter(|s| !s.is_empty())
                .map(str::to_string)
        };
        let date = |name: &str| -> Result<Option<NaiveDate>, IngestError> {
            let text = get(name);
            if text.is_empty() {
                return Ok(None);
            }
            parse_date(text)
                .map(Some)
                .ok_or_else(|| IngestError::UnparseableDate {
                    row,
                    column: name.to_string(),
                    value: text.to_string(),
                })
        };
        let req_date = |name: &str| -> Result<NaiveDate, IngestError> {
            date(name)?.ok_or_else(|| IngestError::InvalidRecord {
                row,
                reason: format!("missing {name}"),
            })
        };
        let cents = |name: &str| -> Result<Cents, IngestError> {
            get(name)
                .parse::<i64>()
                .map(Cents)
                .map_err(|_| IngestError::InvalidAmount {
                    row,
                    column: name.to_string(),
                    value: get(name).to_string(),
                })
        };
        let codes = |name: &str| -> Vec<String> {
            get(name)
                .split('|')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect()
        };
        let setting = match get("setting") {
            "inpatient" => Setting::Inpatient,
            "outpatient" => Setting::Outpatient,
            other => {
                return Err(IngestError::InvalidRecord {
                    row,
                    reason: format!("unknown setting {other:?}"),
                })
            }
        };
        let claim = ClaimRecord {
            claim_id: get("claim_id").to_string(),
            beneficiary_id: get("beneficiary_id").to_string(),
            provider_id: get("provider_id").to_string(),
            claim_start: req_date("claim_start")?,
            claim_end: req_date("claim_end")?,
            admission_date: date("admission_date")?,
            discharge_date: date("discharge_date")?,
            reimbursed_amount: cents("reimbursed_amount")?,
            deductible_paid: cents("deductible_paid")?,
            attending_physician: opt("attending_physician"),
            operating_physician: opt("operating_physician"),
            other_physician: opt("other_physician"),
            diagnosis_codes: codes("diagnosis_codes"),
            procedure_codes: codes("procedure_codes"),
            setting,
        };
        let mut chronic_conditions = [false; 11];
        for (flag, name) in chronic_conditions.iter_mut().zip(CHRONIC_CONDITIONS) {
            *flag = get(&format!("chronic_{name}")) == "1";
        }
        let bene = BeneficiaryRecord {
            beneficiary_id: claim.beneficiary_id.clone(),
            date_of_birth: req_date("date_of_birth")?,
            date_of_death: date("date_of_death")?,
            gender: get("gender").to_string(),
            race: get("race").to_string(),
            chronic_conditions,
            annual_ip_reimbursement: cents("annual_ip_reimbursement")?,
            annual_op_reimbursement: cents("annual_op_reimbursement")?,
            annual_ip_deductible: cents("annual_ip_deductible")?,
            annual_op_deductible: cents("annual_op_deductible")?,
        };
        let beneficiary = match benes.get(&bene.beneficiary_id) {
            Some(existing) if **existing == bene => Arc::clone(existing),
            _ => {
                let shared = Arc::new(bene);
                benes.insert(shared.beneficiary_id.clone(), Arc::clone(&shared));
                shared
            }
        };
        rows.push(MergedRow {
            claim,
            beneficiary,
            potential_fraud: get("potential_fraud") == "1",
        });
    }
    let mut out = MergedDataset {
        rows,
        ..Default::default()
    };
    out.source_counts = out.observed_counts();
    Ok(out)
}
