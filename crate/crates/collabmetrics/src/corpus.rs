//! Immutable, validated in-memory corpus: publications, the academic
//! registry, organizations, the field taxonomy, and the author/field
//! indexes everything downstream reads.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Maps each fine-grained field code (SDS) to exactly one discipline
/// code (UDA).
#[derive(Debug, Clone, Default)]
pub struct FieldTaxonomy {
    entries: BTreeMap<String, String>,
}

impl FieldTaxonomy {
    pub fn new<I>(entries: I) -> Result<Self, BuildError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut map = BTreeMap::new();
        for (sds, uda) in entries {
            if sds.is_empty() || uda.is_empty() {
                return Err(BuildError::EmptyCode { kind: "taxonomy" });
            }
            if map.contains_key(&sds) {
                return Err(BuildError::DuplicateId {
                    kind: "sds",
                    id: sds,
                });
            }
            map.insert(sds, uda);
        }
        Ok(FieldTaxonomy { entries: map })
    }

    pub fn uda_of(&self, sds: &str) -> Option<&str> {
        self.entries.get(sds).map(String::as_str)
    }

    pub fn contains_sds(&self, sds: &str) -> bool {
        self.entries.contains_key(sds)
    }

    pub fn contains_uda(&self, uda: &str) -> bool {
        self.entries.values().any(|u| u == uda)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(s, u)| (s.as_str(), u.as_str()))
    }

    pub fn uda_codes(&self) -> BTreeSet<&str> {
        self.entries.values().map(String::as_str).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Organization {
    pub org_id: String,
    /// ISO 3166-1 alpha-2.
    pub country_code: String,
    pub is_university: bool,
}

/// Registry row as parsed from the academics file; the discipline code is
/// derived from the taxonomy at corpus build time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcademicRecord {
    pub academic_id: String,
    pub university_id: String,
    pub sds: String,
}

/// A registry academic bound to one university, one SDS and one UDA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Academic {
    pub academic_id: String,
    pub university_id: String,
    pub sds: String,
    pub uda: String,
}

/// One bibliographic record. `n_authors` counts the full byline;
/// non-academic co-authors have no registry entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Publication {
    #[serde(rename = "id")]
    pub pub_id: String,
    pub year: i32,
    pub n_authors: u32,
    #[serde(rename = "academics")]
    pub academic_authors: BTreeSet<String>,
    #[serde(rename = "orgs")]
    pub org_addresses: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("publication `{pub_id}` references unknown id `{missing_id}`")]
    DanglingReference { pub_id: String, missing_id: String },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("academic sds `{sds}` is not in the taxonomy")]
    TaxonomyMiss { sds: String },
    #[error("academic `{academic_id}`: university `{university_id}` {reason}")]
    InvalidUniversity {
        academic_id: String,
        university_id: String,
        reason: String,
    },
    #[error("publication `{pub_id}` is malformed: {reason}")]
    InvalidPublication { pub_id: String, reason: String },
    #[error("empty code in {kind} input")]
    EmptyCode { kind: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("unknown field code `{0}`")]
    UnknownField(String),
}

/// Which slice of the corpus an operation runs over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldScope {
    Whole,
    Uda(String),
    Sds(String),
}

impl FieldScope {
    pub fn label(&self) -> &str {
        match self {
            FieldScope::Whole => "Total",
            FieldScope::Uda(c) | FieldScope::Sds(c) => c,
        }
    }
}

/// Immutable corpus. All reads are safe from any number of concurrent
/// workers; construction validates every cross-reference once.
#[derive(Debug)]
pub struct Corpus {
    publications: Vec<Publication>,
    academics: BTreeMap<String, Academic>,
    organizations: BTreeMap<String, Organization>,
    taxonomy: FieldTaxonomy,
    domestic_country: String,
    pubs_by_academic: BTreeMap<String, Vec<u32>>,
    academics_by_uda: BTreeMap<String, BTreeSet<String>>,
    academics_by_sds: BTreeMap<String, BTreeSet<String>>,
    all_academics: BTreeSet<String>,
}

/// Builds a corpus from parsed records, validating all cross-references
/// and constructing the author/field indexes. Publications are stored
/// sorted by id, so identical inputs in any order produce identical
/// indexes.
pub fn build_corpus(
    mut publications: Vec<Publication>,
    academic_records: Vec<AcademicRecord>,
    organizations: Vec<Organization>,
    taxonomy: FieldTaxonomy,
    domestic_country: &str,
) -> Result<Corpus, BuildError> {
    let mut orgs = BTreeMap::new();
    for org in organizations {
        if org.org_id.is_empty() || org.country_code.is_empty() {
            return Err(BuildError::EmptyCode {
                kind: "organization",
            });
        }
        if orgs.insert(org.org_id.clone(), org.clone()).is_some() {
            return Err(BuildError::DuplicateId {
                kind: "organization",
                id: org.org_id,
            });
        }
    }

    let mut academics = BTreeMap::new();
    for rec in academic_records {
        if rec.academic_id.is_empty() {
            return Err(BuildError::EmptyCode { kind: "academic" });
        }
        let org = orgs
            .get(&rec.university_id)
            .ok_or_else(|| BuildError::InvalidUniversity {
                academic_id: rec.academic_id.clone(),
                university_id: rec.university_id.clone(),
                reason: "is not a known organization".into(),
            })?;
        if !org.is_university {
            return Err(BuildError::InvalidUniversity {
                academic_id: rec.academic_id,
                university_id: rec.university_id,
                reason: "is not a university".into(),
            });
        }
        if org.country_code != domestic_country {
            return Err(BuildError::InvalidUniversity {
                academic_id: rec.academic_id,
                university_id: rec.university_id,
                reason: format!(
                    "is in `{}`, not the domestic country `{}`",
                    org.country_code, domestic_country
                ),
            });
        }
        let uda = taxonomy
            .uda_of(&rec.sds)
            .ok_or_else(|| BuildError::TaxonomyMiss {
                sds: rec.sds.clone(),
            })?
            .to_owned();
        let academic = Academic {
            academic_id: rec.academic_id.clone(),
            university_id: rec.university_id,
            sds: rec.sds,
            uda,
        };
        if academics.insert(rec.academic_id.clone(), academic).is_some() {
            return Err(BuildError::DuplicateId {
                kind: "academic",
                id: rec.academic_id,
            });
        }
    }

    publications.sort_by(|a, b| a.pub_id.cmp(&b.pub_id));
    for window in publications.windows(2) {
        if window[0].pub_id == window[1].pub_id {
            return Err(BuildError::DuplicateId {
                kind: "publication",
                id: window[0].pub_id.clone(),
            });
        }
    }

    let mut pubs_by_academic: BTreeMap<String, Vec<u32>> = academics
        .keys()
        .map(|id| (id.clone(), Vec::new()))
        .collect();
    for (idx, publication) in publications.iter().enumerate() {
        if publication.n_authors == 0 {
            return Err(BuildError::InvalidPublication {
                pub_id: publication.pub_id.clone(),
                reason: "n_authors must be >= 1".into(),
            });
        }
        if (publication.n_authors as usize) < publication.academic_authors.len() {
            return Err(BuildError::InvalidPublication {
                pub_id: publication.pub_id.clone(),
                reason: "n_authors is less than the academic author list".into(),
            });
        }
        for academic_id in &publication.academic_authors {
            let slot =
                pubs_by_academic
                    .get_mut(academic_id)
                    .ok_or_else(|| BuildError::DanglingReference {
                        pub_id: publication.pub_id.clone(),
                        missing_id: academic_id.clone(),
                    })?;
            slot.push(idx as u32);
        }
        for org_id in &publication.org_addresses {
            if !orgs.contains_key(org_id) {
                return Err(BuildError::DanglingReference {
                    pub_id: publication.pub_id.clone(),
                    missing_id: org_id.clone(),
                });
            }
        }
    }

    let mut academics_by_sds: BTreeMap<String, BTreeSet<String>> = taxonomy
        .iter()
        .map(|(sds, _)| (sds.to_owned(), BTreeSet::new()))
        .collect();
    let mut academics_by_uda: BTreeMap<String, BTreeSet<String>> = taxonomy
        .iter()
        .map(|(_, uda)| (uda.to_owned(), BTreeSet::new()))
        .collect();
    for academic in academics.values() {
        academics_by_sds
            .get_mut(&academic.sds)
            .expect("sds validated against taxonomy")
            .insert(academic.academic_id.clone());
        academics_by_uda
            .get_mut(&academic.uda)
            .expect("uda derived from taxonomy")
            .insert(academic.academic_id.clone());
    }
    let all_academics = academics.keys().cloned().collect();

    Ok(Corpus {
        publications,
        academics,
        organizations: orgs,
        taxonomy,
        domestic_country: domestic_country.to_owned(),
        pubs_by_academic,
        academics_by_uda,
        academics_by_sds,
        all_academics,
    })
}

impl Corpus {
    pub fn publications(&self) -> &[Publication] {
        &self.publications
    }

    pub fn publication(&self, idx: u32) -> &Publication {
        &self.publications[idx as usize]
    }

    pub fn academics(&self) -> &BTreeMap<String, Academic> {
        &self.academics
    }

    pub fn academic(&self, id: &str) -> Option<&Academic> {
        self.academics.get(id)
    }

    pub fn organizations(&self) -> &BTreeMap<String, Organization> {
        &self.organizations
    }

    pub fn organization(&self, id: &str) -> Option<&Organization> {
        self.organizations.get(id)
    }

    pub fn taxonomy(&self) -> &FieldTaxonomy {
        &self.taxonomy
    }

    pub fn domestic_country(&self) -> &str {
        &self.domestic_country
    }

    /// Publication indexes attributed to one academic, ascending.
    pub fn pubs_of(&self, academic_id: &str) -> &[u32] {
        self.pubs_by_academic
            .get(academic_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// The registered academics of a scope. Unknown codes are an error;
    /// known codes with no registered academics yield an empty set.
    pub fn academics_in_scope(&self, scope: &FieldScope) -> Result<&BTreeSet<String>, ScopeError> {
        match scope {
            FieldScope::Whole => Ok(&self.all_academics),
            FieldScope::Uda(code) => self
                .academics_by_uda
                .get(code)
                .ok_or_else(|| ScopeError::UnknownField(code.clone())),
            FieldScope::Sds(code) => self
                .academics_by_sds
                .get(code)
                .ok_or_else(|| ScopeError::UnknownField(code.clone())),
        }
    }

    /// De-duplicated, ascending publication indexes authored by at least
    /// one academic of the scope (the union counting of the field).
    pub fn publications_in_scope(&self, scope: &FieldScope) -> Result<Vec<u32>, ScopeError> {
        let academics = self.academics_in_scope(scope)?;
        Ok(self.publications_of_academics(academics.iter().map(String::as_str)))
    }

    /// Union publication indexes over an explicit academic set.
    pub fn publications_of_academics<'a, I>(&self, academics: I) -> Vec<u32>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut indexes: Vec<u32> = academics
            .into_iter()
            .flat_map(|id| self.pubs_of(id).iter().copied())
            .collect();
        indexes.sort_unstable();
        indexes.dedup();
        indexes
    }

    pub fn uda_codes(&self) -> BTreeSet<&str> {
        self.taxonomy.uda_codes()
    }

    pub fn sds_codes(&self) -> impl Iterator<Item = &str> {
        self.taxonomy.iter().map(|(sds, _)| sds)
    }
}

/// Academics of the scope with at least one publication in the corpus.
pub fn productive_academics<'a>(
    corpus: &'a Corpus,
    scope: &FieldScope,
) -> Result<BTreeSet<&'a str>, ScopeError> {
    Ok(corpus
        .academics_in_scope(scope)?
        .iter()
        .map(String::as_str)
        .filter(|id| !corpus.pubs_of(id).is_empty())
        .collect())
}

/// Academics of the scope with at least one co-authored publication.
/// Always a subset of the productive academics.
pub fn collaborative_academics<'a>(
    corpus: &'a Corpus,
    scope: &FieldScope,
) -> Result<BTreeSet<&'a str>, ScopeError> {
    Ok(corpus
        .academics_in_scope(scope)?
        .iter()
        .map(String::as_str)
        .filter(|id| {
            corpus
                .pubs_of(id)
                .iter()
                .any(|&idx| corpus.publication(idx).n_authors >= 2)
        })
        .collect())
}

/// SDSs where at least `threshold` of registered academics are productive
/// (boundary inclusive). Field reports restrict to these by default.
pub fn filter_active_fields(corpus: &Corpus, threshold: f64) -> BTreeSet<&str> {
    assert!(
        (0.0..=1.0).contains(&threshold),
        "threshold must be within [0, 1]"
    );
    corpus
        .taxonomy
        .iter()
        .map(|(sds, _)| sds)
        .filter(|sds| {
            let registered = &corpus.academics_by_sds[*sds];
            if registered.is_empty() {
                return threshold == 0.0;
            }
            let productive = registered
                .iter()
                .filter(|id| !corpus.pubs_of(id).is_empty())
                .count();
            productive as f64 >= threshold * registered.len() as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn org(id: &str, country: &str, university: bool) -> Organization {
        Organization {
            org_id: id.into(),
            country_code: country.into(),
            is_university: university,
        }
    }

    fn publication(id: &str, n_authors: u32, academics: &[&str], orgs: &[&str]) -> Publication {
        Publication {
            pub_id: id.into(),
            year: 2008,
            n_authors,
            academic_authors: academics.iter().map(|s| s.to_string()).collect(),
            org_addresses: orgs.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn small_inputs() -> (
        Vec<Publication>,
        Vec<AcademicRecord>,
        Vec<Organization>,
        FieldTaxonomy,
    ) {
        let taxonomy = FieldTaxonomy::new([("FIS/01".to_string(), "PHY".to_string())]).unwrap();
        let orgs = vec![org("uniX", "IT", true), org("orgY", "US", false)];
        let academics = vec![AcademicRecord {
            academic_id: "a1".into(),
            university_id: "uniX".into(),
            sds: "FIS/01".into(),
        }];
        let pubs = vec![publication("p1", 1, &["a1"], &["uniX"])];
        (pubs, academics, orgs, taxonomy)
    }

    #[test]
    fn single_record_identity() {
        let (pubs, academics, orgs, taxonomy) = small_inputs();
        let corpus = build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap();
        assert_eq!(corpus.pubs_of("a1"), &[0]);
        let in_uda = corpus
            .academics_in_scope(&FieldScope::Uda("PHY".into()))
            .unwrap();
        assert!(in_uda.contains("a1"));
    }

    #[test]
    fn dangling_academic_reference() {
        let (mut pubs, academics, orgs, taxonomy) = small_inputs();
        pubs.push(publication("p2", 2, &["zz"], &[]));
        let err = build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap_err();
        assert_eq!(
            err,
            BuildError::DanglingReference {
                pub_id: "p2".into(),
                missing_id: "zz".into()
            }
        );
    }

    #[test]
    fn dangling_org_reference() {
        let (mut pubs, academics, orgs, taxonomy) = small_inputs();
        pubs.push(publication("p2", 1, &["a1"], &["nowhere"]));
        let err = build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap_err();
        assert!(matches!(err, BuildError::DanglingReference { .. }));
    }

    #[test]
    fn duplicate_publication_id() {
        let (mut pubs, academics, orgs, taxonomy) = small_inputs();
        pubs.push(publication("p1", 2, &["a1"], &[]));
        let err = build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap_err();
        assert_eq!(
            err,
            BuildError::DuplicateId {
                kind: "publication",
                id: "p1".into()
            }
        );
    }

    #[test]
    fn taxonomy_miss() {
        let (pubs, mut academics, orgs, taxonomy) = small_inputs();
        academics.push(AcademicRecord {
            academic_id: "a2".into(),
            university_id: "uniX".into(),
            sds: "CHIM/01".into(),
        });
        let err = build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap_err();
        assert_eq!(err, BuildError::TaxonomyMiss { sds: "CHIM/01".into() });
    }

    #[test]
    fn university_must_be_domestic_university() {
        let (pubs, mut academics, orgs, taxonomy) = small_inputs();
        academics[0].university_id = "orgY".into();
        let err = build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap_err();
        assert!(matches!(err, BuildError::InvalidUniversity { .. }));
    }

    #[test]
    fn taxonomy_rejects_duplicate_sds() {
        let err = FieldTaxonomy::new([
            ("FIS/01".to_string(), "PHY".to_string()),
            ("FIS/01".to_string(), "CHE".to_string()),
        ])
        .unwrap_err();
        assert_eq!(
            err,
            BuildError::DuplicateId {
                kind: "sds",
                id: "FIS/01".into()
            }
        );
    }

    #[test]
    fn build_is_order_independent() {
        let taxonomy = || {
            FieldTaxonomy::new([
                ("FIS/01".to_string(), "PHY".to_string()),
                ("MAT/05".to_string(), "MAT".to_string()),
            ])
            .unwrap()
        };
        let orgs = || vec![org("uniX", "IT", true), org("uniY", "IT", true)];
        let academics = || {
            vec![
                AcademicRecord {
                    academic_id: "a1".into(),
                    university_id: "uniX".into(),
                    sds: "FIS/01".into(),
                },
                AcademicRecord {
                    academic_id: "a2".into(),
                    university_id: "uniY".into(),
                    sds: "MAT/05".into(),
                },
            ]
        };
        let pubs = || {
            vec![
                publication("p1", 2, &["a1", "a2"], &["uniX"]),
                publication("p2", 1, &["a2"], &[]),
                publication("p3", 3, &["a1"], &["uniY"]),
            ]
        };
        let forward = build_corpus(pubs(), academics(), orgs(), taxonomy(), "IT").unwrap();
        let mut reversed_pubs = pubs();
        reversed_pubs.reverse();
        let mut reversed_orgs = orgs();
        reversed_orgs.reverse();
        let mut reversed_academics = academics();
        reversed_academics.reverse();
        let backward = build_corpus(
            reversed_pubs,
            reversed_academics,
            reversed_orgs,
            taxonomy(),
            "IT",
        )
        .unwrap();
        assert_eq!(forward.publications(), backward.publications());
        assert_eq!(forward.pubs_by_academic, backward.pubs_by_academic);
        assert_eq!(forward.academics_by_sds, backward.academics_by_sds);
        assert_eq!(forward.academics_by_uda, backward.academics_by_uda);
    }

    fn two_academic_corpus(pubs: Vec<Publication>) -> Corpus {
        let taxonomy = FieldTaxonomy::new([("FIS/01".to_string(), "PHY".to_string())]).unwrap();
        let orgs = vec![org("uniX", "IT", true), org("uniY", "IT", true)];
        let academics = vec![
            AcademicRecord {
                academic_id: "a1".into(),
                university_id: "uniX".into(),
                sds: "FIS/01".into(),
            },
            AcademicRecord {
                academic_id: "a2".into(),
                university_id: "uniY".into(),
                sds: "FIS/01".into(),
            },
        ];
        build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap()
    }

    #[test]
    fn productive_excludes_zero_publication_academics() {
        let corpus = two_academic_corpus(vec![publication("p1", 1, &["a1"], &[])]);
        let productive = productive_academics(&corpus, &FieldScope::Whole).unwrap();
        assert!(productive.contains("a1"));
        assert!(!productive.contains("a2"));
    }

    #[test]
    fn productive_need_not_be_collaborative() {
        let corpus = two_academic_corpus(vec![publication("p1", 1, &["a1"], &[])]);
        let productive = productive_academics(&corpus, &FieldScope::Sds("FIS/01".into())).unwrap();
        assert!(productive.contains("a1"));
        let collaborative =
            collaborative_academics(&corpus, &FieldScope::Sds("FIS/01".into())).unwrap();
        assert!(collaborative.is_empty());
    }

    #[test]
    fn collaborative_subset_of_productive() {
        let corpus = two_academic_corpus(vec![
            publication("p1", 1, &["a1"], &[]),
            publication("p2", 2, &["a1", "a2"], &[]),
            publication("p3", 1, &["a2"], &[]),
        ]);
        let productive = productive_academics(&corpus, &FieldScope::Whole).unwrap();
        let collaborative = collaborative_academics(&corpus, &FieldScope::Whole).unwrap();
        assert!(collaborative.is_subset(&productive));
        assert!(collaborative.contains("a1"));
        assert!(collaborative.contains("a2"));
    }

    #[test]
    fn unknown_scope_code_is_an_error() {
        let corpus = two_academic_corpus(vec![]);
        assert_eq!(
            productive_academics(&corpus, &FieldScope::Uda("XXX".into())).unwrap_err(),
            ScopeError::UnknownField("XXX".into())
        );
    }

    #[test]
    fn active_field_filter_boundary() {
        let taxonomy = FieldTaxonomy::new([
            ("S1".to_string(), "U1".to_string()),
            ("S2".to_string(), "U1".to_string()),
        ])
        .unwrap();
        let orgs = vec![org("uniX", "IT", true)];
        let mut academics = Vec::new();
        for i in 0..10 {
            academics.push(AcademicRecord {
                academic_id: format!("s1-{i}"),
                university_id: "uniX".into(),
                sds: "S1".into(),
            });
            academics.push(AcademicRecord {
                academic_id: format!("s2-{i}"),
                university_id: "uniX".into(),
                sds: "S2".into(),
            });
        }
        // 5 of 10 productive in S1 (kept at 0.5), 4 of 10 in S2 (dropped).
        let mut pubs = Vec::new();
        for i in 0..5 {
            pubs.push(publication(&format!("pa{i}"), 1, &[&format!("s1-{i}")], &[]));
        }
        for i in 0..4 {
            pubs.push(publication(&format!("pb{i}"), 1, &[&format!("s2-{i}")], &[]));
        }
        let corpus = build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap();
        let active = filter_active_fields(&corpus, 0.5);
        assert!(active.contains("S1"));
        assert!(!active.contains("S2"));
        let all = filter_active_fields(&corpus, 0.0);
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn union_publications_deduplicate_shared_papers() {
        let corpus = two_academic_corpus(vec![
            publication("p1", 2, &["a1", "a2"], &[]),
            publication("p2", 1, &["a1"], &[]),
            publication("p3", 1, &["a2"], &[]),
        ]);
        let union = corpus.publications_in_scope(&FieldScope::Whole).unwrap();
        assert_eq!(union.len(), 3);
        let per_academic_sum: usize = ["a1", "a2"]
            .iter()
            .map(|id| corpus.pubs_of(id).len())
            .sum();
        assert_eq!(per_academic_sum, 4);
        assert!(union.len() <= per_academic_sum);
    }
}
