use std::collections::{HashMap, HashSet};
use std::io::Read;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::records::{BeneficiaryRecord, Cents, ClaimRecord, ProviderLabel, Setting};
use super::schema::{BeneficiaryColumns, ClaimColumns, LabelColumns};
use super::IngestError;
use crate::ingest::records::{MAX_DIAGNOSIS_CODES, MAX_PROCEDURE_CODES};

/// Header lookup for one table. Row numbers reported in errors are 1-based
/// data-row indices (the header is not counted).
struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn new(headers: &csv::StringRecord) -> Self {
        let index = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        Columns { index }
    }

    fn require(&self, name: &str) -> Result<usize, IngestError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    }

    fn optional(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

fn cell(record: &csv::StringRecord, idx: usize) -> Option<&str> {
    let v = record.get(idx)?.trim();
    if v.is_empty() || v == "NA" {
        None
    } else {
        Some(v)
    }
}

/// Parses `YYYY-MM-DD`, or an ISO-8601 date-time whose date part is taken.
pub fn parse_date(text: &str) -> Option<NaiveDate> {
    if let Ok(d) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
        return Some(d);
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%.f") {
        return Some(dt.date());
    }
    DateTime::parse_from_rfc3339(text)
        .ok()
        .map(|dt| dt.date_naive())
}

fn parse_amount_text(text: &str) -> Option<Cents> {
    let v: f64 = text.parse().ok()?;
    if !v.is_finite() {
        return None;
    }
    Some(Cents((v * 100.0).round() as i64))
}

struct RowCtx<'a> {
    row: usize,
    record: &'a csv::StringRecord,
}

impl RowCtx<'_> {
    fn text(&self, idx: usize) -> Option<&str> {
        cell(self.record, idx)
    }

    fn required_text(&self, idx: usize, column: &str) -> Result<String, IngestError> {
        self.text(idx)
            .map(str::to_string)
            .ok_or_else(|| IngestError::InvalidRecord {
                row: self.row,
                reason: format!("missing value in column {column}"),
            })
    }

    fn date(&self, idx: Option<usize>, column: &str) -> Result<Option<NaiveDate>, IngestError> {
        let Some(text) = idx.and_then(|i| self.text(i)) else {
            return Ok(None);
        };
        parse_date(text)
            .map(Some)
            .ok_or_else(|| IngestError::UnparseableDate {
                row: self.row,
                column: column.to_string(),
                value: text.to_string(),
            })
    }

    fn required_date(&self, idx: usize, column: &str) -> Result<NaiveDate, IngestError> {
        self.date(Some(idx), column)?
            .ok_or_else(|| IngestError::InvalidRecord {
                row: self.row,
                reason: format!("missing date in column {column}"),
            })
    }

    /// Missing amounts read as zero; negative amounts are rejected.
    fn amount(&self, idx: Option<usize>, column: &str) -> Result<Cents, IngestError> {
        let Some(text) = idx.and_then(|i| self.text(i)) else {
            return Ok(Cents(0));
        };
        let cents = parse_amount_text(text).ok_or_else(|| IngestError::InvalidAmount {
            row: self.row,
            column: column.to_string(),
            value: text.to_string(),
        })?;
        if cents.0 < 0 {
            return Err(IngestError::NegativeAmount {
                row: self.row,
                column: column.to_string(),
            });
        }
        Ok(cents)
    }
}

fn finish<T>(items: Vec<T>, mut errors: Vec<IngestError>) -> Result<Vec<T>, IngestError> {
    match errors.len() {
        0 => Ok(items),
        1 => Err(errors.pop().unwrap()),
        _ => Err(IngestError::Many(errors)),
    }
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source)
}

/// Chronic flags arrive as `1` (present) / `2` (absent); `0` is also accepted as absent.
fn chronic_flag(text: Option<&str>, row: usize) -> Result<bool, IngestError> {
    match text {
        Some("1") => Ok(true),
        Some("2") | Some("0") => Ok(false),
        Some(other) => Err(IngestError::UnknownFlagValue {
            row,
            text: other.to_string(),
        }),
        None => Err(IngestError::InvalidRecord {
            row,
            reason: "missing chronic-condition flag".into(),
        }),
    }
}

pub fn parse_beneficiaries<R: Read>(
    source: R,
    columns: &BeneficiaryColumns,
) -> Result<Vec<BeneficiaryRecord>, IngestError> {
    let mut rdr = reader(source);
    let cols = Columns::new(rdr.headers()?);
    let id = cols.require(&columns.beneficiary_id)?;
    let dob = cols.require(&columns.date_of_birth)?;
    let dod = cols.require(&columns.date_of_death)?;
    let gender = cols.require(&columns.gender)?;
    let race = cols.require(&columns.race)?;
    let mut chronic = [0usize; 11];
    for (slot, name) in chronic.iter_mut().zip(&columns.chronic_conditions) {
        *slot = cols.require(name)?;
    }
    let ip_reimb = cols.require(&columns.annual_ip_reimbursement)?;
    let ip_ded = cols.require(&columns.annual_ip_deductible)?;
    let op_reimb = cols.require(&columns.annual_op_reimbursement)?;
    let op_ded = cols.require(&columns.annual_op_deductible)?;

    let mut out = Vec::new();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let ctx = RowCtx {
            row: i + 1,
            record: &record,
        };
        let parsed = (|| {
            let beneficiary_id = ctx.required_text(id, &columns.beneficiary_id)?;
            let date_of_birth = ctx.required_date(dob, &columns.date_of_birth)?;
            let date_of_death = ctx.date(Some(dod), &columns.date_of_death)?;
            if let Some(death) = date_of_death {
                if death < date_of_birth {
                    return Err(IngestError::InvalidRecord {
                        row: ctx.row,
                        reason: format!(
                            "date_of_death {death} precedes date_of_birth {date_of_birth}"
                        ),
                    });
                }
            }
            let mut chronic_conditions = [false; 11];
            for (flag, &idx) in chronic_conditions.iter_mut().zip(&chronic) {
                *flag = chronic_flag(ctx.text(idx), ctx.row)?;
            }
            Ok(BeneficiaryRecord {
                beneficiary_id,
                date_of_birth,
                date_of_death,
                gender: ctx.text(gender).unwrap_or_default().to_string(),
                race: ctx.text(race).unwrap_or_default().to_string(),
                chronic_conditions,
                annual_ip_reimbursement: ctx
                    .amount(Some(ip_reimb), &columns.annual_ip_reimbursement)?,
                annual_op_reimbursement: ctx
                    .amount(Some(op_reimb), &columns.annual_op_reimbursement)?,
                annual_ip_deductible: ctx.amount(Some(ip_ded), &columns.annual_ip_deductible)?,
                annual_op_deductible: ctx.amount(Some(op_ded), &columns.annual_op_deductible)?,
            })
        })();
        match parsed {
            Ok(rec) => {
                if !seen.insert(rec.beneficiary_id.clone()) {
                    errors.push(IngestError::DuplicateKey(rec.beneficiary_id));
                } else {
                    out.push(rec);
                }
            }
            Err(e) => errors.push(e),
        }
    }
    finish(out, errors)
}

pub fn parse_claims<R: Read>(
    source: R,
    setting: Setting,
    columns: &ClaimColumns,
) -> Result<Vec<ClaimRecord>, IngestError> {
    let mut rdr = reader(source);
    let cols = Columns::new(rdr.headers()?);
    let claim_id = cols.require(&columns.claim_id)?;
    let bene = cols.require(&columns.beneficiary_id)?;
    let provider = cols.require(&columns.provider_id)?;
    let start = cols.require(&columns.claim_start)?;
    let end = cols.require(&columns.claim_end)?;
    let reimbursed = cols.require(&columns.reimbursed_amount)?;
    let deductible = cols.require(&columns.deductible_paid)?;
    let (admission, discharge) = match setting {
        Setting::Inpatient => (
            Some(cols.require(&columns.admission_date)?),
            Some(cols.require(&columns.discharge_date)?),
        ),
        Setting::Outpatient => (
            cols.optional(&columns.admission_date),
            cols.optional(&columns.discharge_date),
        ),
    };
    let attending = cols.optional(&columns.attending_physician);
    let operating = cols.optional(&columns.operating_physician);
    let other = cols.optional(&columns.other_physician);
    let diagnosis: Vec<usize> = (1..=MAX_DIAGNOSIS_CODES)
        .filter_map(|k| cols.optional(&format!("{}{k}", columns.diagnosis_prefix)))
        .collect();
    let procedure: Vec<usize> = (1..=MAX_PROCEDURE_CODES)
        .filter_map(|k| cols.optional(&format!("{}{k}", columns.procedure_prefix)))
        .collect();

    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let ctx = RowCtx {
            row: i + 1,
            record: &record,
        };
        let parsed = (|| {
            let physician = |idx: Option<usize>| idx.and_then(|i| ctx.text(i)).map(str::to_string);
            let codes = |idxs: &[usize]| -> Vec<String> {
                idxs.iter()
                    .filter_map(|&i| ctx.text(i))
                    .map(str::to_string)
                    .collect()
            };
            let claim = ClaimRecord {
                claim_id: ctx.required_text(claim_id, &columns.claim_id)?,
                beneficiary_id: ctx.required_text(bene, &columns.beneficiary_id)?,
                provider_id: ctx.required_text(provider, &columns.provider_id)?,
                claim_start: ctx.required_date(start, &columns.claim_start)?,
                claim_end: ctx.required_date(end, &columns.claim_end)?,
                admission_date: ctx.date(admission, &columns.admission_date)?,
                discharge_date: ctx.date(discharge, &columns.discharge_date)?,
                reimbursed_amount: ctx.amount(Some(reimbursed), &columns.reimbursed_amount)?,
                deductible_paid: ctx.amount(Some(deductible), &columns.deductible_paid)?,
                attending_physician: physician(attending),
                operating_physician: physician(operating),
                other_physician: physician(other),
                diagnosis_codes: codes(&diagnosis),
                procedure_codes: codes(&procedure),
                setting,
            };
            claim
                .validate()
                .map_err(|reason| IngestError::InvalidRecord {
                    row: ctx.row,
                    reason,
                })?;
            Ok(claim)
        })();
        match parsed {
            Ok(c) => out.push(c),
            Err(e) => errors.push(e),
        }
    }
    finish(out, errors)
}

pub fn parse_labels<R: Read>(
    source: R,
    columns: &LabelColumns,
) -> Result<Vec<ProviderLabel>, IngestError> {
    let mut rdr = reader(source);
    let cols = Columns::new(rdr.headers()?);
    let provider = cols.require(&columns.provider_id)?;
    let flag = cols.require(&columns.potential_fraud)?;

    let mut out = Vec::new();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let ctx = RowCtx {
            row: i + 1,
            record: &record,
        };
        let parsed = (|| {
            let provider_id = ctx.required_text(provider, &columns.provider_id)?;
            let text = ctx.text(flag).unwrap_or_default();
            let potential_fraud = if text.eq_ignore_ascii_case("yes") {
                true
            } else if text.eq_ignore_ascii_case("no") {
                false
            } else {
                return Err(IngestError::UnknownFlagValue {
                    row: ctx.row,
                    text: text.to_string(),
                });
            };
            Ok(ProviderLabel {
                provider_id,
                potential_fraud,
            })
        })();
        match parsed {
            Ok(label) => {
                if !seen.insert(label.provider_id.clone()) {
                    errors.push(IngestError::DuplicateKey(label.provider_id));
                } else {
                    out.push(label);
                }
            }
            Err(e) => errors.push(e),
        }
    }
    finish(out, errors)
}
