//! Seeded synthetic-corpus generator with controllable productivity skew,
//! per-form latent collaboration rates, and a rank coupling between
//! productivity and one form's rate.
//!
//! Generation model, per academic: a bivariate standard normal (z1, z2)
//! with the configured correlation drives a Gaussian copula; z1 maps
//! through the productivity distribution's quantile function to the
//! publication count p, z2 through the Beta quantile to the correlated
//! form's latent rate. The remaining rates are sampled independently.
//!
//! Each publication "slot" of an academic becomes one publication. A
//! collaborative slot is shared with a same-field partner with probability
//! `shared_pub_rate` (consuming one of the partner's slots, so realized p
//! always equals the drawn p); the partner comes from the same university
//! when the initiator's intramural draw fires, from a different one
//! otherwise. Address evidence (a domestic non-home organization for the
//! extramural-domestic draw, a foreign one for the international draw) is
//! attached so that the classifier reproduces the drawn flags; shared
//! publications omit the authors' own universities from the address list,
//! which the pipeline tolerates. With `shared_pub_rate = 0` every realized
//! per-form count is an exact binomial draw from the academic's latent
//! rates; sharing makes partners inherit the initiator's publication-level
//! flags.
//!
//! The generator is deterministic for a given seed (ChaCha8 stream), and
//! every generated corpus passes full corpus validation.

use crate::corpus::{
    build_corpus, AcademicRecord, Corpus, FieldScope, FieldTaxonomy, Organization, Publication,
};
use crate::classify::build_profiles;
use crate::indicators::{compare_over, propensities, Form};
use crate::stats::{normal_cdf, reg_inc_beta};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta as BetaSampler, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Share of single-authored publications that carry a decoy foreign
/// affiliation (exercises the rule that single-authored papers are never
/// collaborations, whatever their address list says).
const FOREIGN_DECOY_RATE: f64 = 0.05;
/// Publication years assigned round-robin-free, uniformly.
const YEAR_RANGE: std::ops::RangeInclusive<i32> = 2006..=2010;
/// Hard cap on one academic's drawn publication count.
const MAX_PRODUCTIVITY: u64 = 100_000;
/// How many live-but-unusable queue entries a partner search may step
/// over before giving up.
const PARTNER_SCAN_BUDGET: usize = 16;
/// Attempts at finding a different-university partner cell.
const CROSS_CELL_RETRIES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProductivityDist {
    Constant { value: u32 },
    Lognormal { mu: f64, sigma: f64 },
    Pareto { alpha: f64, x_min: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RateDist {
    Beta { a: f64, b: f64 },
    Constant { value: f64 },
}

/// Latent-rate specs for the four forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormRates {
    pub c: RateDist,
    pub ci: RateDist,
    pub ced: RateDist,
    pub cef: RateDist,
}

impl FormRates {
    fn get(&self, form: Form) -> RateDist {
        match form {
            Form::C => self.c,
            Form::Ci => self.ci,
            Form::Ced => self.ced,
            Form::Cef => self.cef,
        }
    }
}

fn default_sds_per_uda() -> usize {
    1
}
fn default_correlated_form() -> Form {
    Form::Cef
}
fn default_universities() -> usize {
    50
}
fn default_domestic_orgs() -> usize {
    50
}
fn default_foreign_orgs() -> usize {
    100
}
fn default_country() -> String {
    "IT".to_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    /// Number of SDS fields.
    pub n_fields: usize,
    pub academics_per_field: usize,
    /// SDS fields grouped under one UDA.
    #[serde(default = "default_sds_per_uda")]
    pub sds_per_uda: usize,
    pub productivity: ProductivityDist,
    pub propensity: FormRates,
    /// Gaussian-copula rank coupling between productivity and the
    /// correlated form's latent rate, in [-1, 1].
    #[serde(default)]
    pub productivity_propensity_correlation: f64,
    #[serde(default = "default_correlated_form")]
    pub correlated_form: Form,
    /// Probability that a collaborative publication is co-authored by two
    /// academics of the same field.
    pub shared_pub_rate: f64,
    #[serde(default = "default_universities")]
    pub n_universities: usize,
    #[serde(default = "default_domestic_orgs")]
    pub n_domestic_orgs: usize,
    #[serde(default = "default_foreign_orgs")]
    pub n_foreign_orgs: usize,
    #[serde(default = "default_country")]
    pub domestic_country: String,
}

impl SynthConfig {
    /// Preset reproducing a heavily skewed productivity distribution in a
    /// single 10,000-academic field: the top 29% of academics hold well
    /// over half of all publications.
    pub fn skew_preset(seed: u64) -> SynthConfig {
        SynthConfig {
            seed,
            n_fields: 1,
            academics_per_field: 10_000,
            sds_per_uda: 1,
            productivity: ProductivityDist::Lognormal { mu: 1.0, sigma: 1.0 },
            propensity: FormRates {
                c: RateDist::Beta { a: 9.0, b: 1.0 },
                ci: RateDist::Beta { a: 2.0, b: 2.0 },
                ced: RateDist::Beta { a: 2.0, b: 2.0 },
                cef: RateDist::Beta { a: 2.0, b: 5.0 },
            },
            productivity_propensity_correlation: 0.0,
            correlated_form: Form::Cef,
            shared_pub_rate: 0.1,
            n_universities: 50,
            n_domestic_orgs: 20,
            n_foreign_orgs: 40,
            domestic_country: default_country(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::BadConfig(msg));
        if self.n_fields == 0 {
            return bad("n_fields must be >= 1".into());
        }
        if self.academics_per_field < 2 {
            return bad("academics_per_field must be >= 2".into());
        }
        if self.sds_per_uda == 0 {
            return bad("sds_per_uda must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.shared_pub_rate) {
            return bad(format!(
                "shared_pub_rate must be in [0, 1], got {}",
                self.shared_pub_rate
            ));
        }
        if !(-1.0..=1.0).contains(&self.productivity_propensity_correlation) {
            return bad(format!(
                "productivity_propensity_correlation must be in [-1, 1], got {}",
                self.productivity_propensity_correlation
            ));
        }
        match self.productivity {
            ProductivityDist::Constant { .. } => {}
            ProductivityDist::Lognormal { sigma, .. } => {
                if sigma <= 0.0 || !sigma.is_finite() {
                    return bad(format!("lognormal sigma must be > 0, got {sigma}"));
                }
            }
            ProductivityDist::Pareto { alpha, x_min } => {
                if alpha <= 0.0 || x_min <= 0.0 {
                    return bad(format!(
                        "pareto parameters must be > 0, got alpha={alpha} x_min={x_min}"
                    ));
                }
            }
        }
        for form in Form::ALL {
            match self.propensity.get(form) {
                RateDist::Beta { a, b } => {
                    if a <= 0.0 || b <= 0.0 {
                        return bad(format!("{form} beta parameters must be > 0, got a={a} b={b}"));
                    }
                }
                RateDist::Constant { value } => {
                    if !(0.0..=1.0).contains(&value) {
                        return bad(format!("{form} constant rate must be in [0, 1], got {value}"));
                    }
                }
            }
        }
        if self.n_universities < 2 {
            return bad("n_universities must be >= 2".into());
        }
        if self.n_domestic_orgs == 0 || self.n_foreign_orgs == 0 {
            return bad("need at least one domestic and one foreign organization".into());
        }
        if self.domestic_country.is_empty() {
            return bad("domestic_country must be non-empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("bad config: {0}")]
    BadConfig(String),
}

/// Inverse CDF of Beta(a, b) by bisection on the regularized incomplete
/// beta function.
fn beta_quantile(a: f64, b: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if reg_inc_beta(a, b, mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl ProductivityDist {
    /// Quantile mapped from a standard normal draw, discretized, min 0.
    fn discretized_from_z(&self, z: f64) -> u32 {
        let raw = match *self {
            ProductivityDist::Constant { value } => return value,
            ProductivityDist::Lognormal { mu, sigma } => (mu + sigma * z).exp(),
            ProductivityDist::Pareto { alpha, x_min } => {
                let u = normal_cdf(z).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16);
                x_min * (1.0 - u).powf(-1.0 / alpha)
            }
        };
        raw.round().clamp(0.0, MAX_PRODUCTIVITY as f64) as u32
    }
}

impl RateDist {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            RateDist::Beta { a, b } => BetaSampler::new(a, b)
                .expect("validated parameters")
                .sample(rng),
            RateDist::Constant { value } => value,
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        match *self {
            RateDist::Beta { a, b } => beta_quantile(a, b, u),
            RateDist::Constant { value } => value,
        }
    }
}

struct FieldAcademic {
    /// Registry id.
    id: String,
    /// Cell (university) index within the field.
    cell: usize,
    /// University org id.
    university: String,
    /// Latent rates indexed like Form::ALL.
    rates: [f64; 4],
    productivity: u32,
}

/// Pops the first live token usable for a publication of
/// `forbidden_academic` (a different academic). Consumed tokens found on
/// the way are dropped; live-but-own tokens are put back in order.
fn pop_partner(
    queue: &mut VecDeque<usize>,
    consumed: &[bool],
    token_owner: &[usize],
    forbidden_academic: usize,
) -> Option<usize> {
    let mut shelved = Vec::new();
    let mut found = None;
    while let Some(token) = queue.pop_front() {
        if consumed[token] {
            continue;
        }
        if token_owner[token] == forbidden_academic {
            shelved.push(token);
            if shelved.len() > PARTNER_SCAN_BUDGET {
                break;
            }
            continue;
        }
        found = Some(token);
        break;
    }
    for token in shelved.into_iter().rev() {
        queue.push_front(token);
    }
    found
}

/// Generates the four record collections for a config. Deterministic for
/// a given seed.
pub fn generate_records(
    config: &SynthConfig,
) -> Result<
    (
        Vec<Publication>,
        Vec<AcademicRecord>,
        Vec<Organization>,
        FieldTaxonomy,
    ),
    SynthError,
> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let foreign_countries = ["US", "DE", "FR", "GB", "CH", "JP", "ES", "NL"];
    let mut organizations = Vec::new();
    let universities: Vec<String> = (0..config.n_universities)
        .map(|i| format!("UNIV{i:03}"))
        .collect();
    for id in &universities {
        organizations.push(Organization {
            org_id: id.clone(),
            country_code: config.domestic_country.clone(),
            is_university: true,
        });
    }
    let domestic_orgs: Vec<String> = (0..config.n_domestic_orgs)
        .map(|i| format!("DORG{i:03}"))
        .collect();
    for id in &domestic_orgs {
        organizations.push(Organization {
            org_id: id.clone(),
            country_code: config.domestic_country.clone(),
            is_university: false,
        });
    }
    let foreign_orgs: Vec<String> = (0..config.n_foreign_orgs)
        .map(|i| format!("FORG{i:03}"))
        .collect();
    for (i, id) in foreign_orgs.iter().enumerate() {
        organizations.push(Organization {
            org_id: id.clone(),
            country_code: foreign_countries[i % foreign_countries.len()].to_owned(),
            is_university: false,
        });
    }

    let taxonomy_entries: Vec<(String, String)> = (0..config.n_fields)
        .map(|f| (format!("S{f:03}"), format!("A{:02}", f / config.sds_per_uda)))
        .collect();
    let taxonomy = FieldTaxonomy::new(taxonomy_entries.clone()).expect("codes are unique");

    // At least two academics per (field, university) cell whenever the
    // field is large enough, so intramural partners exist.
    let cells_per_field = config
        .n_universities
        .min((config.academics_per_field / 2).max(2));

    let correlation = config.productivity_propensity_correlation;
    let residual = (1.0 - correlation * correlation).sqrt();
    let correlated_slot = Form::ALL
        .iter()
        .position(|f| *f == config.correlated_form)
        .expect("form list is exhaustive");

    let mut academic_records = Vec::new();
    let mut publications = Vec::new();
    let mut pub_counter = 0usize;

    for field in 0..config.n_fields {
        let sds = &taxonomy_entries[field].0;
        let mut members = Vec::with_capacity(config.academics_per_field);
        for k in 0..config.academics_per_field {
            let cell = k % cells_per_field;
            let university = universities[(field + cell) % universities.len()].clone();
            let z1: f64 = rng.sample(StandardNormal);
            let e2: f64 = rng.sample(StandardNormal);
            let z2 = correlation * z1 + residual * e2;
            let productivity = config.productivity.discretized_from_z(z1);
            let mut rates = [0.0f64; 4];
            for (slot, form) in Form::ALL.iter().enumerate() {
                rates[slot] = if slot == correlated_slot {
                    config.propensity.get(*form).quantile(normal_cdf(z2))
                } else {
                    config.propensity.get(*form).sample(&mut rng)
                };
            }
            let id = format!("a{field:03}-{k:05}");
            academic_records.push(AcademicRecord {
                academic_id: id.clone(),
                university_id: university.clone(),
                sds: sds.clone(),
            });
            members.push(FieldAcademic {
                id,
                cell,
                university,
                rates,
                productivity,
            });
        }

        // One token per publication slot, shuffled once; pairing walks the
        // shuffled order.
        let mut token_owner: Vec<usize> = Vec::new();
        for (local, member) in members.iter().enumerate() {
            for _ in 0..member.productivity {
                token_owner.push(local);
            }
        }
        let mut order: Vec<usize> = (0..token_owner.len()).collect();
        order.shuffle(&mut rng);
        let token_owner: Vec<usize> = order.iter().map(|&i| token_owner[i]).collect();
        let mut consumed = vec![false; token_owner.len()];
        let mut cell_queues: Vec<VecDeque<usize>> = vec![VecDeque::new(); cells_per_field];
        for (token, &owner) in token_owner.iter().enumerate() {
            cell_queues[members[owner].cell].push_back(token);
        }

        for token in 0..token_owner.len() {
            if consumed[token] {
                continue;
            }
            consumed[token] = true;
            let owner = token_owner[token];
            let initiator = &members[owner];
            let year = rng.random_range(YEAR_RANGE);
            let pub_id = format!("P{pub_counter:07}");
            pub_counter += 1;

            let collaborative = rng.random_bool(initiator.rates[0]);
            if !collaborative {
                let mut orgs = vec![initiator.university.clone()];
                if rng.random_bool(FOREIGN_DECOY_RATE) {
                    orgs.push(foreign_orgs[rng.random_range(0..foreign_orgs.len())].clone());
                }
                publications.push(Publication {
                    pub_id,
                    year,
                    n_authors: 1,
                    academic_authors: [initiator.id.clone()].into_iter().collect(),
                    org_addresses: orgs.into_iter().collect(),
                });
                continue;
            }

            let wants_share = rng.random_bool(config.shared_pub_rate);
            let wants_intramural = rng.random_bool(initiator.rates[1]);
            let wants_domestic = rng.random_bool(initiator.rates[2]);
            let wants_foreign = rng.random_bool(initiator.rates[3]);

            let mut partner: Option<usize> = None;
            if wants_share {
                if wants_intramural {
                    partner = pop_partner(
                        &mut cell_queues[initiator.cell],
                        &consumed,
                        &token_owner,
                        owner,
                    );
                } else if cells_per_field > 1 {
                    for _ in 0..CROSS_CELL_RETRIES {
                        let cell = rng.random_range(0..cells_per_field);
                        if cell == initiator.cell {
                            continue;
                        }
                        partner =
                            pop_partner(&mut cell_queues[cell], &consumed, &token_owner, owner);
                        if partner.is_some() {
                            break;
                        }
                    }
                }
            }

            let mut academic_authors = vec![initiator.id.clone()];
            let mut orgs: Vec<String> = Vec::new();
            let extra_authors;
            if let Some(partner_token) = partner {
                consumed[partner_token] = true;
                let partner_member = &members[token_owner[partner_token]];
                academic_authors.push(partner_member.id.clone());
                // Universities are left off shared bylines so both
                // partners realize exactly the drawn address evidence.
                extra_authors = rng.random_range(0..=2u32);
            } else {
                orgs.push(initiator.university.clone());
                extra_authors = rng.random_range(1..=3u32);
            }
            if wants_domestic {
                orgs.push(domestic_orgs[rng.random_range(0..domestic_orgs.len())].clone());
            }
            if wants_foreign {
                orgs.push(foreign_orgs[rng.random_range(0..foreign_orgs.len())].clone());
            }
            publications.push(Publication {
                pub_id,
                year,
                n_authors: academic_authors.len() as u32 + extra_authors,
                academic_authors: academic_authors.into_iter().collect(),
                org_addresses: orgs.into_iter().collect(),
            });
        }
    }

    Ok((publications, academic_records, organizations, taxonomy))
}

/// Generates and validates a full corpus.
pub fn generate_corpus(config: &SynthConfig) -> Result<Corpus, SynthError> {
    let (publications, academics, organizations, taxonomy) = generate_records(config)?;
    Ok(build_corpus(
        publications,
        academics,
        organizations,
        taxonomy,
        &config.domestic_country.clone(),
    )
    .expect("generated corpora satisfy corpus invariants"))
}

/// Paths of the four written corpus files.
#[derive(Debug, Clone)]
pub struct CorpusFiles {
    pub publications: PathBuf,
    pub academics: PathBuf,
    pub organizations: PathBuf,
    pub taxonomy: PathBuf,
}

/// Writes a generated corpus as the four pipeline input files (no header
/// lines), so synthetic corpora flow through the identical ingest path as
/// real ones.
pub fn write_corpus_files(config: &SynthConfig, dir: &Path) -> Result<CorpusFiles, io::Error> {
    let (publications, academics, organizations, taxonomy) =
        generate_records(config).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    std::fs::create_dir_all(dir)?;
    let files = CorpusFiles {
        publications: dir.join("publications.jsonl"),
        academics: dir.join("academics.csv"),
        organizations: dir.join("organizations.csv"),
        taxonomy: dir.join("taxonomy.csv"),
    };
    crate::ingest::write_publications(
        &mut std::io::BufWriter::new(std::fs::File::create(&files.publications)?),
        &publications,
    )?;
    crate::ingest::write_academics(
        &mut std::io::BufWriter::new(std::fs::File::create(&files.academics)?),
        &academics,
    )?;
    crate::ingest::write_organizations(
        &mut std::io::BufWriter::new(std::fs::File::create(&files.organizations)?),
        &organizations,
    )?;
    crate::ingest::write_taxonomy(
        &mut std::io::BufWriter::new(std::fs::File::create(&files.taxonomy)?),
        &taxonomy,
    )?;
    Ok(files)
}

/// One row of the propensity-vs-incidence divergence table.
#[derive(Debug, Clone)]
pub struct DivergenceRow {
    pub form: Form,
    pub mean_propensity: f64,
    pub incidence: f64,
    /// Mean minus incidence, percentage points.
    pub delta: f64,
    /// Sign of the sample covariance between p and the realized
    /// propensity over productive academics.
    pub cov_sign: i8,
}

/// Generates a corpus and confronts the two indicator families on the
/// whole population, per form.
pub fn divergence_experiment(
    config: &SynthConfig,
    forms: &[Form],
) -> Result<Vec<DivergenceRow>, SynthError> {
    let corpus = generate_corpus(config)?;
    let profiles = build_profiles(&corpus);
    let academics = corpus
        .academics_in_scope(&FieldScope::Whole)
        .expect("whole scope always resolves")
        .clone();
    let mut rows = Vec::new();
    for &form in forms {
        let row = compare_over(&corpus, &profiles, "Total", form, &academics)
            .expect("generated corpora are non-empty");
        // Population covariance between p and the realized propensity.
        let mut n = 0usize;
        let mut sum_p = 0.0;
        let mut sum_r = 0.0;
        let mut sum_pr = 0.0;
        for (_, profile) in profiles.iter().filter(|(_, pr)| pr.p > 0) {
            let rate = propensities(profile).expect("productive").get(form);
            let p = f64::from(profile.p);
            n += 1;
            sum_p += p;
            sum_r += rate;
            sum_pr += p * rate;
        }
        let nf = n as f64;
        let cov = sum_pr / nf - (sum_p / nf) * (sum_r / nf);
        let cov_sign = if cov > 1e-12 {
            1
        } else if cov < -1e-12 {
            -1
        } else {
            0
        };
        rows.push(DivergenceRow {
            form,
            mean_propensity: row.mean_propensity,
            incidence: row.incidence,
            delta: row.delta,
            cov_sign,
        });
    }
    Ok(rows)
}
