//! Synthetic claim corpora with planted provider-level fraud schemes.
//!
//! Clean providers bill from baseline distributions. Each fraud provider is
//! assigned one scheme:
//! - duplicate billing: claims re-submitted as near-identical pairs (same
//!   beneficiary, codes and amount, start date shifted by at most a day);
//! - upcoding: every claim billed at 2.5–4× the clean mean for its setting and
//!   primary diagnosis;
//! - phantom service: a share of claims dated after the beneficiary's death.
//!
//! Fraud providers also draw beneficiaries preferentially from the 70+ pool.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use chrono::{Days, Months, NaiveDate};
use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::LogNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{
    merge_dataset, write_beneficiaries, write_claims, write_labels, BeneficiaryRecord, Cents,
    ClaimRecord, IngestError, MergedDataset, ProviderLabel, Setting, SourceFiles,
};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    DuplicateBilling,
    Upcoding,
    PhantomService,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeMix {
    pub duplicate_billing: f64,
    pub upcoding: f64,
    pub phantom_service: f64,
}

impl Default for SchemeMix {
    fn default() -> Self {
        SchemeMix {
            duplicate_billing: 1.0 / 3.0,
            upcoding: 1.0 / 3.0,
            phantom_service: 1.0 / 3.0,
        }
    }
}

impl SchemeMix {
    fn weights(&self) -> [f64; 3] {
        [self.duplicate_billing, self.upcoding, self.phantom_service]
    }
}

const SCHEMES: [Scheme; 3] = [
    Scheme::DuplicateBilling,
    Scheme::Upcoding,
    Scheme::PhantomService,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_providers: usize,
    pub n_beneficiaries: usize,
    pub n_claims: usize,
    pub fraud_provider_fraction: f64,
    pub seed: u64,
    pub scheme_mix: SchemeMix,
    /// Probability that a claim is inpatient.
    pub inpatient_share: f64,
    /// Median of the log-normal baseline amount, in dollars.
    pub inpatient_median: f64,
    pub outpatient_median: f64,
    /// Log-scale standard deviation of baseline amounts.
    pub amount_sigma: f64,
    pub death_probability: f64,
    /// Probability a fraud provider's claim goes to a beneficiary aged 70+.
    pub elderly_preference: f64,
    /// Probability a duplicate-billing provider re-submits a claim.
    pub duplicate_rate: f64,
    /// Share of a phantom-service provider's claims dated after death.
    pub phantom_share: f64,
    pub upcoding_factor: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_providers: 500,
            n_beneficiaries: 2500,
            n_claims: 10_000,
            fraud_provider_fraction: 0.0935,
            seed: 42,
            scheme_mix: SchemeMix::default(),
            inpatient_share: 0.12,
            inpatient_median: 6000.0,
            outpatient_median: 300.0,
            amount_sigma: 0.5,
            death_probability: 0.08,
            elderly_preference: 0.6,
            duplicate_rate: 0.6,
            phantom_share: 0.5,
            upcoding_factor: (2.5, 4.0),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidConfig(msg));
        if self.n_providers == 0 || self.n_beneficiaries == 0 {
            return bad("n_providers and n_beneficiaries must be positive".into());
        }
        if self.n_claims < self.n_providers {
            return bad(format!(
                "n_claims ({}) must be at least n_providers ({})",
                self.n_claims, self.n_providers
            ));
        }
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(SynthError::InvalidConfig(format!(
                    "{name} = {v} outside [0, 1]"
                )))
            }
        };
        unit("fraud_provider_fraction", self.fraud_provider_fraction)?;
        unit("inpatient_share", self.inpatient_share)?;
        unit("death_probability", self.death_probability)?;
        unit("elderly_preference", self.elderly_preference)?;
        unit("duplicate_rate", self.duplicate_rate)?;
        unit("phantom_share", self.phantom_share)?;
        let w = self.scheme_mix.weights();
        if w.iter().any(|&x| x.is_nan() || x < 0.0) {
            return bad("scheme weights must be non-negative".into());
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return bad(format!("scheme weights sum to {sum}, not 1"));
        }
        if !(self.inpatient_median > 0.0
            && self.outpatient_median > 0.0
            && self.amount_sigma >= 0.0)
        {
            return bad("amount distribution parameters must be positive".into());
        }
        let (lo, hi) = self.upcoding_factor;
        if !(lo >= 2.5 && hi >= lo) {
            return bad(format!(
                "upcoding factor range ({lo}, {hi}) must start at 2.5 or above"
            ));
        }
        Ok(())
    }

    /// Fraud providers: floor(fraction · n + 0.5).
    pub fn n_fraud_providers(&self) -> usize {
        (self.fraud_provider_fraction * self.n_providers as f64 + 0.5).floor() as usize
    }
}

/// A generated corpus plus its ground truth.
#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub inpatient: Vec<ClaimRecord>,
    pub outpatient: Vec<ClaimRecord>,
    pub beneficiaries: Vec<BeneficiaryRecord>,
    pub labels: Vec<ProviderLabel>,
    pub provider_schemes: BTreeMap<String, Scheme>,
    /// Claims that carry their provider's scheme (duplicates, upcoded and post-death claims).
    pub planted_claims: BTreeMap<String, Scheme>,
}

pub const BENEFICIARY_FILE: &str = "beneficiary.csv";
pub const INPATIENT_FILE: &str = "inpatient.csv";
pub const OUTPATIENT_FILE: &str = "outpatient.csv";
pub const LABEL_FILE: &str = "labels.csv";

impl SyntheticCorpus {
    /// Joins the generated tables in memory, as `load_dataset` would after a round trip through CSV.
    pub fn to_dataset(&self) -> Result<MergedDataset, IngestError> {
        merge_dataset(
            self.inpatient.clone(),
            self.outpatient.clone(),
            self.beneficiaries.clone(),
            &self.labels,
        )
    }

    /// Writes the four tables into `dir` using the default dataset headers.
    pub fn write_csv(&self, dir: &Path) -> Result<SourceFiles, SynthError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| SynthError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let files = SourceFiles {
            beneficiaries: dir.join(BENEFICIARY_FILE),
            inpatient: dir.join(INPATIENT_FILE),
            outpatient: dir.join(OUTPATIENT_FILE),
            labels: dir.join(LABEL_FILE),
        };
        let create = |p: &Path| File::create(p).map(BufWriter::new).map_err(io_err(p));
        write_beneficiaries(create(&files.beneficiaries)?, &self.beneficiaries)?;
        write_claims(create(&files.inpatient)?, &self.inpatient)?;
        write_claims(create(&files.outpatient)?, &self.outpatient)?;
        write_labels(create(&files.labels)?, &self.labels)?;
        Ok(files)
    }
}

const DIAGNOSIS_VOCAB: [(&str, f64); 30] = [
    ("4019", 9.0),
    ("4011", 6.0),
    ("2724", 6.0),
    ("25000", 3.0),
    ("42731", 2.5),
    ("4280", 2.5),
    ("41401", 2.0),
    ("V5869", 2.0),
    ("53081", 1.5),
    ("2449", 1.5),
    ("V5861", 1.0),
    ("496", 1.0),
    ("5990", 1.0),
    ("4241", 1.0),
    ("2859", 1.0),
    ("311", 1.0),
    ("V4581", 1.0),
    ("28521", 1.0),
    ("7802", 1.0),
    ("78650", 1.0),
    ("486", 1.0),
    ("5849", 1.0),
    ("41400", 1.0),
    ("V5883", 1.0),
    ("73300", 1.0),
    ("71590", 1.0),
    ("78900", 1.0),
    ("2720", 1.0),
    ("V1582", 1.0),
    ("27651", 1.0),
];

const PROCEDURE_VOCAB: [&str; 10] = [
    "9904", "8154", "66", "3893", "5123", "4516", "8151", "3995", "4513", "9671",
];

/// Price multiplier for a primary diagnosis, in [0.8, 1.3).
fn code_factor(code_index: usize) -> f64 {
    if code_index < 3 {
        1.0
    } else {
        0.8 + ((code_index * 7) % 10) as f64 * 0.05
    }
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2009, 12, 1).unwrap()
}

fn year_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2009, 1, 1).unwrap()
}

fn add_days(d: NaiveDate, n: u64) -> NaiveDate {
    d.checked_add_days(Days::new(n)).unwrap()
}

struct Beneficiaries {
    records: Vec<BeneficiaryRecord>,
    elderly: Vec<usize>,
    deceased: Vec<usize>,
}

fn generate_beneficiaries(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Beneficiaries {
    let mut records = Vec::with_capacity(cfg.n_beneficiaries);
    let mut elderly = Vec::new();
    let mut deceased = Vec::new();
    for i in 0..cfg.n_beneficiaries {
        let age: u32 = if rng.random_bool(0.8) {
            rng.random_range(65..=95)
        } else {
            rng.random_range(25..65)
        };
        let dob = epoch()
            .checked_sub_months(Months::new(12 * age))
            .unwrap()
            .checked_sub_days(Days::new(rng.random_range(0..365)))
            .unwrap();
        let death_p = if age >= 70 {
            (cfg.death_probability * 1.5).min(1.0)
        } else {
            cfg.death_probability * 0.5
        };
        let date_of_death = rng
            .random_bool(death_p)
            .then(|| add_days(year_start(), rng.random_range(0..240)));
        let chronic_p = if age >= 70 { 0.4 } else { 0.2 };
        let mut chronic_conditions = [false; 11];
        for flag in chronic_conditions.iter_mut() {
            *flag = rng.random_bool(chronic_p);
        }
        let race = if rng.random_bool(0.85) {
            "1"
        } else {
            ["2", "3", "5"][rng.random_range(0..3)]
        };
        let ip_annual = if rng.random_bool(0.25) {
            rng.random_range(1..=40) * 1000
        } else {
            0
        };
        let op_annual = rng.random_range(0..=60) * 100;
        if age >= 70 {
            elderly.push(i);
        }
        if date_of_death.is_some() {
            deceased.push(i);
        }
        records.push(BeneficiaryRecord {
            beneficiary_id: format!("BENE{:06}", i + 1),
            date_of_birth: dob,
            date_of_death,
            gender: if rng.random_bool(0.57) { "2" } else { "1" }.to_string(),
            race: race.to_string(),
            chronic_conditions,
            annual_ip_reimbursement: Cents::from_dollars(ip_annual),
            annual_op_reimbursement: Cents::from_dollars(op_annual),
            annual_ip_deductible: Cents::from_dollars(if ip_annual > 0 { 1068 } else { 0 }),
            annual_op_deductible: Cents::from_dollars(rng.random_range(0..=10) * 10),
        });
    }
    Beneficiaries {
        records,
        elderly,
        deceased,
    }
}

struct ProviderPlan {
    id: String,
    scheme: Option<Scheme>,
    physicians: Vec<String>,
    n_claims: usize,
}

struct ClaimFactory<'a> {
    cfg: &'a SynthConfig,
    benes: &'a Beneficiaries,
    dx_index: WeightedIndex<f64>,
    ip_amount: LogNormal<f64>,
    op_amount: LogNormal<f64>,
    next_claim: usize,
}

impl ClaimFactory<'_> {
    fn clean_mean(&self, setting: Setting, code_index: usize) -> f64 {
        let median = match setting {
            Setting::Inpatient => self.cfg.inpatient_median,
            Setting::Outpatient => self.cfg.outpatient_median,
        };
        median * (self.cfg.amount_sigma.powi(2) / 2.0).exp() * code_factor(code_index)
    }

    fn pick_beneficiary(&self, provider: &ProviderPlan, rng: &mut ChaCha8Rng) -> usize {
        if provider.scheme.is_some()
            && !self.benes.elderly.is_empty()
            && rng.random_bool(self.cfg.elderly_preference)
        {
            self.benes.elderly[rng.random_range(0..self.benes.elderly.len())]
        } else {
            rng.random_range(0..self.benes.records.len())
        }
    }

    fn codes(&self, setting: Setting, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<String>) {
        let n_dx = match setting {
            Setting::Inpatient => rng.random_range(3..=9),
            Setting::Outpatient => rng.random_range(1..=4),
        };
        let mut dx: Vec<usize> = Vec::with_capacity(n_dx);
        while dx.len() < n_dx {
            let c = self.dx_index.sample(rng);
            if !dx.contains(&c) {
                dx.push(c);
            }
        }
        let n_proc = match setting {
            Setting::Inpatient => rng.random_range(0..=3),
            Setting::Outpatient => usize::from(rng.random_bool(0.05)),
        };
        let procs: Vec<String> = PROCEDURE_VOCAB
            .choose_multiple(rng, n_proc)
            .map(|s| s.to_string())
            .collect();
        (dx, procs)
    }

    fn claim(
        &mut self,
        provider: &ProviderPlan,
        rng: &mut ChaCha8Rng,
        planted: &mut BTreeMap<String, Scheme>,
    ) -> ClaimRecord {
        let setting = if rng.random_bool(self.cfg.inpatient_share) {
            Setting::Inpatient
        } else {
            Setting::Outpatient
        };
        let phantom = provider.scheme == Some(Scheme::PhantomService)
            && !self.benes.deceased.is_empty()
            && rng.random_bool(self.cfg.phantom_share);
        let bene_idx = if phantom {
            self.benes.deceased[rng.random_range(0..self.benes.deceased.len())]
        } else {
            self.pick_beneficiary(provider, rng)
        };
        let bene = &self.benes.records[bene_idx];
        let claim_start = match (phantom, bene.date_of_death) {
            (true, Some(death)) => add_days(death, rng.random_range(1..=90)),
            (false, Some(death)) => {
                let span = (death - year_start()).num_days().max(0) as u64;
                add_days(year_start(), rng.random_range(0..=span))
            }
            _ => add_days(year_start(), rng.random_range(0..365)),
        };
        let stay = match setting {
            Setting::Inpatient => rng.random_range(1..=12),
            Setting::Outpatient => [0, 0, 0, 1, 2][rng.random_range(0..5)],
        };
        let claim_end = add_days(claim_start, stay);
        let (dx, procedure_codes) = self.codes(setting, rng);
        let base = match setting {
            Setting::Inpatient => self.ip_amount.sample(rng),
            Setting::Outpatient => self.op_amount.sample(rng),
        } * code_factor(dx[0]);
        let upcoded = provider.scheme == Some(Scheme::Upcoding);
        let amount = if upcoded {
            let (lo, hi) = self.cfg.upcoding_factor;
            self.clean_mean(setting, dx[0]) * rng.random_range(lo..=hi)
        } else {
            base
        };
        // Whole tens of dollars, rounded up so upcoded claims stay above their floor.
        let dollars = ((amount / 10.0).ceil() as i64).max(1) * 10;
        let pick_physician = |rng: &mut ChaCha8Rng| {
            provider.physicians[rng.random_range(0..provider.physicians.len())].clone()
        };
        let attending_physician = Some(pick_physician(rng));
        let operating_p = if setting == Setting::Inpatient {
            0.6
        } else {
            0.2
        };
        let operating_physician = rng.random_bool(operating_p).then(|| pick_physician(rng));
        let other_physician = rng.random_bool(0.3).then(|| pick_physician(rng));
        let deductible = match setting {
            Setting::Inpatient => 1068,
            Setting::Outpatient if rng.random_bool(0.1) => rng.random_range(1..=10) * 10,
            Setting::Outpatient => 0,
        };
        self.next_claim += 1;
        let claim_id = format!("CLM{:07}", self.next_claim);
        if phantom {
            planted.insert(claim_id.clone(), Scheme::PhantomService);
        } else if upcoded {
            planted.insert(claim_id.clone(), Scheme::Upcoding);
        }
        let inpatient = setting == Setting::Inpatient;
        ClaimRecord {
            claim_id,
            beneficiary_id: bene.beneficiary_id.clone(),
            provider_id: provider.id.clone(),
            claim_start,
            claim_end,
            admission_date: inpatient.then_some(claim_start),
            discharge_date: inpatient.then_some(claim_end),
            reimbursed_amount: Cents::from_dollars(dollars),
            deductible_paid: Cents::from_dollars(deductible),
            attending_physician,
            operating_physician,
            other_physician,
            diagnosis_codes: dx
                .iter()
                .map(|&i| DIAGNOSIS_VOCAB[i].0.to_string())
                .collect(),
            procedure_codes,
            setting,
        }
    }

    fn duplicate(&mut self, original: &ClaimRecord, rng: &mut ChaCha8Rng) -> ClaimRecord {
        let shift = rng.random_range(0..=1);
        let mut dup = original.clone();
        self.next_claim += 1;
        dup.claim_id = format!("CLM{:07}", self.next_claim);
        dup.claim_start = add_days(original.claim_start, shift);
        dup.claim_end = add_days(original.claim_end, shift);
        dup.admission_date = original.admission_date.map(|d| add_days(d, shift));
        dup.discharge_date = original.discharge_date.map(|d| add_days(d, shift));
        dup
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SyntheticCorpus, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let benes = generate_beneficiaries(cfg, &mut rng);

    let mut order: Vec<usize> = (0..cfg.n_providers).collect();
    order.shuffle(&mut rng);
    let n_fraud = cfg.n_fraud_providers();
    let mut is_fraud = vec![false; cfg.n_providers];
    for &i in &order[..n_fraud] {
        is_fraud[i] = true;
    }

    let scheme_index = WeightedIndex::new(cfg.scheme_mix.weights())
        .map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
    let volume = LogNormal::new(0.0, 0.4).unwrap();
    let mut next_physician = 0usize;
    let mut providers: Vec<ProviderPlan> = (0..cfg.n_providers)
        .map(|i| {
            let scheme = is_fraud[i].then(|| SCHEMES[scheme_index.sample(&mut rng)]);
            let n_phys = rng.random_range(2..=6);
            let physicians = (0..n_phys)
                .map(|_| {
                    next_physician += 1;
                    format!("PHY{:06}", next_physician)
                })
                .collect();
            ProviderPlan {
                id: format!("PRV{:05}", i + 1),
                scheme,
                physicians,
                n_claims: 1,
            }
        })
        .collect();
    let weights: Vec<f64> = (0..cfg.n_providers)
        .map(|_| volume.sample(&mut rng))
        .collect();
    let pick = WeightedIndex::new(&weights).unwrap();
    for _ in cfg.n_providers..cfg.n_claims {
        providers[pick.sample(&mut rng)].n_claims += 1;
    }

    let mut factory = ClaimFactory {
        cfg,
        benes: &benes,
        dx_index: WeightedIndex::new(DIAGNOSIS_VOCAB.iter().map(|(_, w)| *w)).unwrap(),
        ip_amount: LogNormal::new(cfg.inpatient_median.ln(), cfg.amount_sigma).unwrap(),
        op_amount: LogNormal::new(cfg.outpatient_median.ln(), cfg.amount_sigma).unwrap(),
        next_claim: 0,
    };
    let mut planted = BTreeMap::new();
    let mut inpatient = Vec::new();
    let mut outpatient = Vec::new();
    for provider in &providers {
        let mut produced = 0;
        while produced < provider.n_claims {
            let claim = factory.claim(provider, &mut rng, &mut planted);
            produced += 1;
            let dup = (provider.scheme == Some(Scheme::DuplicateBilling)
                && produced < provider.n_claims
                && rng.random_bool(cfg.duplicate_rate))
            .then(|| factory.duplicate(&claim, &mut rng));
            let mut push = |c: ClaimRecord| match c.setting {
                Setting::Inpatient => inpatient.push(c),
                Setting::Outpatient => outpatient.push(c),
            };
            push(claim);
            if let Some(dup) = dup {
                planted.insert(dup.claim_id.clone(), Scheme::DuplicateBilling);
                produced += 1;
                push(dup);
            }
        }
    }

    let labels = providers
        .iter()
        .map(|p| ProviderLabel {
            provider_id: p.id.clone(),
            potential_fraud: p.scheme.is_some(),
        })
        .collect();
    let provider_schemes = providers
        .iter()
        .filter_map(|p| p.scheme.map(|s| (p.id.clone(), s)))
        .collect();
    Ok(SyntheticCorpus {
        inpatient,
        outpatient,
        beneficiaries: benes.records,
        labels,
        provider_schemes,
        planted_claims: planted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::merge_dataset;
    use std::collections::HashMap;

    fn small() -> SynthConfig {
        SynthConfig {
            n_providers: 60,
            n_beneficiaries: 400,
            n_claims: 1500,
            fraud_provider_fraction: 0.3,
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn zero_fraction_gives_all_clean_labels() {
        let corpus = generate(&SynthConfig {
            fraud_provider_fraction: 0.0,
            ..small()
        })
        .unwrap();
        assert!(corpus.labels.iter().all(|l| !l.potential_fraud));
        assert!(corpus.planted_claims.is_empty());
    }

    #[test]
    fn fraud_count_rounding() {
        let cfg = SynthConfig {
            n_providers: 1000,
            n_claims: 1000,
            n_beneficiaries: 50,
            ..Default::default()
        };
        assert_eq!(cfg.n_fraud_providers(), 94);
        let corpus = generate(&cfg).unwrap();
        assert_eq!(
            corpus.labels.iter().filter(|l| l.potential_fraud).count(),
            94
        );
    }

    #[test]
    fn claim_budget_is_exact() {
        let cfg = small();
        let corpus = generate(&cfg).unwrap();
        assert_eq!(
            corpus.inpatient.len() + corpus.outpatient.len(),
            cfg.n_claims
        );
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            SynthConfig {
                fraud_provider_fraction: 1.5,
                ..small()
            },
            SynthConfig {
                n_claims: 10,
                ..small()
            },
            SynthConfig {
                scheme_mix: SchemeMix {
                    duplicate_billing: 0.5,
                    upcoding: 0.5,
                    phantom_service: 0.5,
                },
                ..small()
            },
        ];
        for cfg in bad {
            assert!(matches!(generate(&cfg), Err(SynthError::InvalidConfig(_))));
        }
    }

    #[test]
    fn planted_schemes_hold() {
        let corpus = generate(&small()).unwrap();
        let benes: HashMap<_, _> = corpus
            .beneficiaries
            .iter()
            .map(|b| (b.beneficiary_id.as_str(), b))
            .collect();
        let all: Vec<&ClaimRecord> = corpus.inpatient.iter().chain(&corpus.outpatient).collect();
        let mut phantom = 0;
        for c in &all {
            match corpus.planted_claims.get(&c.claim_id) {
                Some(Scheme::PhantomService) => {
                    phantom += 1;
                    let death = benes[c.beneficiary_id.as_str()].date_of_death.unwrap();
                    assert!(c.claim_start > death);
                }
                Some(_) => {}
                None => {
                    if let Some(death) = benes[c.beneficiary_id.as_str()].date_of_death {
                        assert!(c.claim_start <= death, "unplanted claim after death");
                    }
                }
            }
            assert!(c.validate().is_ok());
        }
        assert!(phantom > 0);

        // Duplicates mirror an earlier claim from the same provider.
        let dups: Vec<&&ClaimRecord> = all
            .iter()
            .filter(|c| corpus.planted_claims.get(&c.claim_id) == Some(&Scheme::DuplicateBilling))
            .collect();
        assert!(!dups.is_empty());
        for d in dups {
            assert!(all.iter().any(|c| c.claim_id != d.claim_id
                && c.provider_id == d.provider_id
                && c.beneficiary_id == d.beneficiary_id
                && c.diagnosis_codes == d.diagnosis_codes
                && c.reimbursed_amount == d.reimbursed_amount
                && (d.claim_start - c.claim_start).num_days().abs() <= 1));
        }
    }

    #[test]
    fn upcoding_providers_bill_at_least_twice_the_clean_mean() {
        let corpus = generate(&small()).unwrap();
        let mut up = (0i64, 0usize);
        let mut clean = (0i64, 0usize);
        for c in corpus.inpatient.iter().chain(&corpus.outpatient) {
            let acc = match corpus.provider_schemes.get(&c.provider_id) {
                Some(Scheme::Upcoding) => &mut up,
                None => &mut clean,
                _ => continue,
            };
            acc.0 += c.reimbursed_amount.0;
            acc.1 += 1;
        }
        let ratio = (up.0 as f64 / up.1 as f64) / (clean.0 as f64 / clean.1 as f64);
        assert!(ratio >= 2.0, "{ratio}");
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let write = |cfg: &SynthConfig| {
            let c = generate(cfg).unwrap();
            let mut out = Vec::new();
            write_claims(&mut out, &c.outpatient).unwrap();
            write_claims(&mut out, &c.inpatient).unwrap();
            write_beneficiaries(&mut out, &c.beneficiaries).unwrap();
            write_labels(&mut out, &c.labels).unwrap();
            out
        };
        let cfg = small();
        assert_eq!(write(&cfg), write(&cfg));
        assert_ne!(
            write(&cfg),
            write(&SynthConfig {
                seed: cfg.seed + 1,
                ..cfg.clone()
            })
        );
    }

    #[test]
    fn every_key_joins() {
        let c = generate(&small()).unwrap();
        let ds = merge_dataset(c.inpatient, c.outpatient, c.beneficiaries, &c.labels).unwrap();
        assert_eq!(ds.join_report.total_dropped(), 0);
        assert_eq!(ds.len(), small().n_claims);
    }
}
