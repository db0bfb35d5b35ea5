//! Column names for the four input tables. Defaults follow the headers of the
//! public provider-fraud dataset.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BeneficiaryColumns {
    pub beneficiary_id: String,
    pub date_of_birth: String,
    pub date_of_death: String,
    pub gender: String,
    pub race: String,
    pub chronic_conditions: [String; 11],
    pub annual_ip_reimbursement: String,
    pub annual_ip_deductible: String,
    pub annual_op_reimbursement: String,
    pub annual_op_deductible: String,
}

impl Default for BeneficiaryColumns {
    fn default() -> Self {
        BeneficiaryColumns {
            beneficiary_id: "BeneID".into(),
            date_of_birth: "DOB".into(),
            date_of_death: "DOD".into(),
            gender: "Gender".into(),
            race: "Race".into(),
            chronic_conditions: [
                "ChronicCond_Alzheimer",
                "ChronicCond_Heartfailure",
                "ChronicCond_KidneyDisease",
                "ChronicCond_Cancer",
                "ChronicCond_ObstrPulmonary",
                "ChronicCond_Depression",
                "ChronicCond_Diabetes",
                "ChronicCond_IschemicHeart",
                "ChronicCond_Osteoporasis",
                "ChronicCond_rheumatoidarthritis",
                "ChronicCond_stroke",
            ]
            .map(String::from),
            annual_ip_reimbursement: "IPAnnualReimbursementAmt".into(),
            annual_ip_deductible: "IPAnnualDeductibleAmt".into(),
            annual_op_reimbursement: "OPAnnualReimbursementAmt".into(),
            annual_op_deductible: "OPAnnualDeductibleAmt".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClaimColumns {
    pub claim_id: String,
    pub beneficiary_id: String,
    pub provider_id: String,
    pub claim_start: String,
    pub claim_end: String,
    pub admission_date: String,
    pub discharge_date: String,
    pub reimbursed_amount: String,
    pub deductible_paid: String,
    pub attending_physician: String,
    pub operating_physician: String,
    pub other_physician: String,
    /// Diagnosis columns are `{prefix}1` .. `{prefix}10`.
    pub diagnosis_prefix: String,
    /// Procedure columns are `{prefix}1` .. `{prefix}6`.
    pub procedure_prefix: String,
}

impl Default for ClaimColumns {
    fn default() -> Self {
        ClaimColumns {
            claim_id: "ClaimID".into(),
            beneficiary_id: "BeneID".into(),
            provider_id: "Provider".into(),
            claim_start: "ClaimStartDt".into(),
            claim_end: "ClaimEndDt".into(),
            admission_date: "AdmissionDt".into(),
            discharge_date: "DischargeDt".into(),
            reimbursed_amount: "InscClaimAmtReimbursed".into(),
            deductible_paid: "DeductibleAmtPaid".into(),
            attending_physician: "AttendingPhysician".into(),
            operating_physician: "OperatingPhysician".into(),
            other_physician: "OtherPhysician".into(),
            diagnosis_prefix: "ClmDiagnosisCode_".into(),
            procedure_prefix: "ClmProcedureCode_".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelColumns {
    pub provider_id: String,
    pub potential_fraud: String,
}

impl Default for LabelColumns {
    fn default() -> Self {
        LabelColumns {
            provider_id: "Provider".into(),
            potential_fraud: "PotentialFraud".into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schema {
    pub beneficiary: BeneficiaryColumns,
    pub claims: ClaimColumns,
    pub labels: LabelColumns,
}
