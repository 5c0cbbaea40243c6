//! The two indicator families and the classical co-authorship indices.
//!
//! Propensity indicators are per-academic ratios (each productive academic
//! weighs the same in a field mean); incidence indicators are per-field
//! publication ratios over the de-duplicated union (the traditional
//! method). `compare` reports the gap between the two in percentage
//! points.
//!
//! Field means are taken over productive academics only: the ratios are
//! undefined at p = 0, and the zero/full percentage columns only make
//! sense over academics with at least one publication.

use crate::classify::{CollaborationProfile, Profiles};
use crate::corpus::{Corpus, FieldScope, ScopeError};
use std::collections::BTreeSet;
use thiserror::Error;

/// The four collaboration forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Form {
    #[serde(rename = "C")]
    C,
    #[serde(rename = "CI")]
    Ci,
    #[serde(rename = "CED")]
    Ced,
    #[serde(rename = "CEF")]
    Cef,
}

impl Form {
    pub const ALL: [Form; 4] = [Form::C, Form::Ci, Form::Ced, Form::Cef];

    pub fn as_str(&self) -> &'static str {
        match self {
            Form::C => "C",
            Form::Ci => "CI",
            Form::Ced => "CED",
            Form::Cef => "CEF",
        }
    }
}

impl std::fmt::Display for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "C" => Ok(Form::C),
            "CI" => Ok(Form::Ci),
            "CED" => Ok(Form::Ced),
            "CEF" => Ok(Form::Cef),
            other => Err(format!("unknown form `{other}` (expected C, CI, CED or CEF)")),
        }
    }
}

/// One academic's four propensity ratios, each in [0, 1] with
/// CI, CED, CEF <= C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropensitySet {
    pub c: f64,
    pub ci: f64,
    pub ced: f64,
    pub cef: f64,
}

impl PropensitySet {
    pub fn get(&self, form: Form) -> f64 {
        match form {
            Form::C => self.c,
            Form::Ci => self.ci,
            Form::Ced => self.ced,
            Form::Cef => self.cef,
        }
    }
}

/// Distribution digest of one propensity indicator over one field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSummary {
    pub field_code: String,
    pub form: Form,
    pub n_productive: usize,
    /// Unweighted mean ratio over productive academics.
    pub mean: f64,
    /// Percentage of productive academics with the indicator exactly 0.
    pub pct_zero: f64,
    /// Percentage of productive academics with the indicator exactly 1.
    pub pct_full: f64,
}

/// Publication-classification (incidence) value of one form in one field.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceSummary {
    pub field_code: String,
    pub form: Form,
    pub n_pubs_union: usize,
    pub n_pubs_with_form: usize,
    pub incidence: f64,
}

/// Mean propensity vs incidence for one field and one form; delta is
/// mean minus incidence, in percentage points.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub field_code: String,
    pub form: Form,
    pub mean_propensity: f64,
    pub incidence: f64,
    pub delta: f64,
}

/// The classical publication-level co-authorship indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalIndices {
    pub degree_of_collaboration: f64,
    pub collaborative_index: f64,
    pub collaborative_coefficient: f64,
    pub revised_cc: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndicatorError {
    #[error(transparent)]
    Scope(#[from] ScopeError),
    #[error("field `{0}` has no productive academics or publications")]
    EmptyField(String),
    #[error("academic `{0}` is not productive (p = 0)")]
    NotProductive(String),
}

/// Component-wise propensity ratios of one profile. Requires p >= 1.
pub fn propensities(profile: &CollaborationProfile) -> Result<PropensitySet, IndicatorError> {
    if profile.p == 0 {
        return Err(IndicatorError::NotProductive(profile.academic_id.clone()));
    }
    let p = f64::from(profile.p);
    Ok(PropensitySet {
        c: f64::from(profile.cp) / p,
        ci: f64::from(profile.cip) / p,
        ced: f64::from(profile.cedp) / p,
        cef: f64::from(profile.cefp) / p,
    })
}

/// Field summary of one form over an explicit academic set.
pub fn summary_over(
    profiles: &Profiles,
    label: &str,
    form: Form,
    academics: &BTreeSet<String>,
) -> Result<FieldSummary, IndicatorError> {
    let mut n = 0usize;
    let mut sum = 0.0;
    let mut zero = 0usize;
    let mut full = 0usize;
    for id in academics {
        let Some(profile) = profiles.get(id) else {
            continue;
        };
        if profile.p == 0 {
            continue;
        }
        n += 1;
        let count = profile.count_for(form);
        sum += f64::from(count) / f64::from(profile.p);
        // Zero/full membership is decided on exact integer counts, never on
        // rounded ratios.
        if count == 0 {
            zero += 1;
        }
        if count == profile.p {
            full += 1;
        }
    }
    if n == 0 {
        return Err(IndicatorError::EmptyField(label.to_owned()));
    }
    Ok(FieldSummary {
        field_code: label.to_owned(),
        form,
        n_productive: n,
        mean: sum / n as f64,
        pct_zero: 100.0 * zero as f64 / n as f64,
        pct_full: 100.0 * full as f64 / n as f64,
    })
}

/// Field summary of one form over a scope.
pub fn field_summary(
    corpus: &Corpus,
    profiles: &Profiles,
    scope: &FieldScope,
    form: Form,
) -> Result<FieldSummary, IndicatorError> {
    let academics = corpus.academics_in_scope(scope)?;
    summary_over(profiles, scope.label(), form, academics)
}

/// True iff the publication exhibits `form` for at least one academic of
/// the given set. Uses the same evidence rules as the classifier, computed
/// publication-wide.
fn publication_has_form(
    corpus: &Corpus,
    pub_idx: u32,
    form: Form,
    academics: &BTreeSet<String>,
) -> bool {
    let publication = corpus.publication(pub_idx);
    if publication.n_authors < 2 {
        return false;
    }
    match form {
        Form::C => true,
        Form::Cef => publication.org_addresses.iter().any(|org| {
            corpus.organization(org).expect("validated").country_code != corpus.domestic_country()
        }),
        Form::Ced => {
            let domestic: Vec<&str> = publication
                .org_addresses
                .iter()
                .filter(|org| {
                    corpus.organization(org).expect("validated").country_code
                        == corpus.domestic_country()
                })
                .map(String::as_str)
                .collect();
            if domestic.is_empty() {
                return false;
            }
            publication
                .academic_authors
                .iter()
                .filter(|id| academics.contains(*id))
                .any(|id| {
                    let university = &corpus.academic(id).expect("validated").university_id;
                    domestic.iter().any(|org| org != university)
                })
        }
        Form::Ci => {
            let universities: Vec<&str> = publication
                .academic_authors
                .iter()
                .map(|id| corpus.academic(id).expect("validated").university_id.as_str())
                .collect();
            publication
                .academic_authors
                .iter()
                .filter(|id| academics.contains(*id))
                .any(|id| {
                    let university = &corpus.academic(id).expect("validated").university_id;
                    universities.iter().filter(|u| *u == university).count() >= 2
                })
        }
    }
}

/// Incidence of one form over an explicit academic set: the share of the
/// set's de-duplicated union of publications satisfying the form for at
/// least one of the set's academics.
pub fn incidence_over(
    corpus: &Corpus,
    label: &str,
    form: Form,
    academics: &BTreeSet<String>,
) -> Result<IncidenceSummary, IndicatorError> {
    let union = corpus.publications_of_academics(academics.iter().map(String::as_str));
    if union.is_empty() {
        return Err(IndicatorError::EmptyField(label.to_owned()));
    }
    let with_form = union
        .iter()
        .filter(|&&idx| publication_has_form(corpus, idx, form, academics))
        .count();
    Ok(IncidenceSummary {
        field_code: label.to_owned(),
        form,
        n_pubs_union: union.len(),
        n_pubs_with_form: with_form,
        incidence: with_form as f64 / union.len() as f64,
    })
}

/// Incidence of one form over a scope.
pub fn incidence(
    corpus: &Corpus,
    scope: &FieldScope,
    form: Form,
) -> Result<IncidenceSummary, IndicatorError> {
    let academics = corpus.academics_in_scope(scope)?;
    incidence_over(corpus, scope.label(), form, academics)
}

/// Mean propensity vs incidence over an explicit academic set.
pub fn compare_over(
    corpus: &Corpus,
    profiles: &Profiles,
    label: &str,
    form: Form,
    academics: &BTreeSet<String>,
) -> Result<ComparisonRow, IndicatorError> {
    let summary = summary_over(profiles, label, form, academics)?;
    let incidence = incidence_over(corpus, label, form, academics)?;
    Ok(ComparisonRow {
        field_code: label.to_owned(),
        form,
        mean_propensity: summary.mean,
        incidence: incidence.incidence,
        delta: 100.0 * (summary.mean - incidence.incidence),
    })
}

/// Mean propensity vs incidence for a scope.
pub fn compare(
    corpus: &Corpus,
    profiles: &Profiles,
    scope: &FieldScope,
    form: Form,
) -> Result<ComparisonRow, IndicatorError> {
    let academics = corpus.academics_in_scope(scope)?;
    compare_over(corpus, profiles, scope.label(), form, academics)
}

/// Classical indices over an explicit academic set's publication union.
///
/// With f_j the number of publications carrying exactly j authors, N the
/// union size and A the maximum observed author count:
/// DC = (N - f_1)/N, CollabIndex = sum(j f_j)/N, CC = 1 - sum(f_j/j)/N,
/// RCC = CC / (1 - 1/A) for A >= 2 and 0 otherwise.
pub fn classical_indices_over(
    corpus: &Corpus,
    label: &str,
    academics: &BTreeSet<String>,
) -> Result<ClassicalIndices, IndicatorError> {
    let union = corpus.publications_of_academics(academics.iter().map(String::as_str));
    if union.is_empty() {
        return Err(IndicatorError::EmptyField(label.to_owned()));
    }
    let n = union.len() as f64;
    let mut single = 0usize;
    let mut author_sum = 0.0;
    let mut inverse_sum = 0.0;
    let mut max_authors = 0u32;
    for &idx in &union {
        let authors = corpus.publication(idx).n_authors;
        if authors == 1 {
            single += 1;
        }
        author_sum += f64::from(authors);
        inverse_sum += 1.0 / f64::from(authors);
        max_authors = max_authors.max(authors);
    }
    let cc = 1.0 - inverse_sum / n;
    Ok(ClassicalIndices {
        degree_of_collaboration: (n - single as f64) / n,
        collaborative_index: author_sum / n,
        collaborative_coefficient: cc,
        revised_cc: if max_authors >= 2 {
            cc / (1.0 - 1.0 / f64::from(max_authors))
        } else {
            0.0
        },
    })
}

/// Classical indices for a scope.
pub fn classical_indices(
    corpus: &Corpus,
    scope: &FieldScope,
) -> Result<ClassicalIndices, IndicatorError> {
    let academics = corpus.academics_in_scope(scope)?;
    classical_indices_over(corpus, scope.label(), academics)
}

/// Propensity sets of the productive academics of a set, in id order.
pub fn propensity_sets(profiles: &Profiles, academics: &BTreeSet<String>) -> Vec<PropensitySet> {
    academics
        .iter()
        .filter_map(|id| profiles.get(id))
        .filter(|profile| profile.p > 0)
        .map(|profile| propensities(profile).expect("p > 0 checked"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::build_profiles;
    use crate::corpus::{build_corpus, AcademicRecord, FieldTaxonomy, Organization, Publication};

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

    fn profile(p: u32, cp: u32, cip: u32, cedp: u32, cefp: u32) -> CollaborationProfile {
        CollaborationProfile {
            academic_id: "x".into(),
            p,
            cp,
            cip,
            cedp,
            cefp,
        }
    }

    #[test]
    fn propensities_worked_example_ratios() {
        let alpha = propensities(&profile(23, 23, 0, 0, 4)).unwrap();
        assert!((alpha.cef - 4.0 / 23.0).abs() < 1e-15);
        assert_eq!(format!("{:.1}", alpha.cef * 100.0), "17.4");
        let beta = propensities(&profile(13, 13, 0, 0, 3)).unwrap();
        assert!((beta.cef - 3.0 / 13.0).abs() < 1e-15);
        assert_eq!(format!("{:.1}", beta.cef * 100.0), "23.1");
    }

    #[test]
    fn propensities_of_loner_are_zero() {
        let set = propensities(&profile(5, 0, 0, 0, 0)).unwrap();
        assert_eq!((set.c, set.ci, set.ced, set.cef), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn propensities_require_productivity() {
        assert!(matches!(
            propensities(&profile(0, 0, 0, 0, 0)),
            Err(IndicatorError::NotProductive(_))
        ));
    }

    #[test]
    fn specific_forms_never_exceed_general() {
        for (p, cp, cip, cedp, cefp) in [(7, 5, 3, 4, 5), (3, 3, 3, 3, 3), (9, 1, 0, 1, 1)] {
            let set = propensities(&profile(p, cp, cip, cedp, cefp)).unwrap();
            assert!(set.ci <= set.c && set.ced <= set.c && set.cef <= set.c);
        }
    }

    fn three_academic_corpus(pubs: Vec<Publication>) -> Corpus {
        let taxonomy = FieldTaxonomy::new([("FIS/01".to_string(), "PHY".to_string())]).unwrap();
        let orgs = vec![
            org("uniX", "IT", true),
            org("uniY", "IT", true),
            org("cnr", "IT", false),
            org("mit", "US", false),
        ];
        let academics = ["a1", "a2", "a3"]
            .iter()
            .enumerate()
            .map(|(i, id)| AcademicRecord {
                academic_id: id.to_string(),
                university_id: if i < 2 { "uniX".into() } else { "uniY".into() },
                sds: "FIS/01".into(),
            })
            .collect();
        build_corpus(pubs, academics, orgs, taxonomy, "IT").unwrap()
    }

    #[test]
    fn summary_mean_and_exact_percentages() {
        // a1: one collaborative pub (C = 1); a2 and a3: one single-authored
        // pub each (C = 0) -> mean 1/3, 66.7% zero, 33.3% full.
        let corpus = three_academic_corpus(vec![
            publication("p1", 2, &["a1"], &["uniX"]),
            publication("p2", 1, &["a2"], &[]),
            publication("p3", 1, &["a3"], &[]),
        ]);
        let profiles = build_profiles(&corpus);
        let summary =
            field_summary(&corpus, &profiles, &FieldScope::Uda("PHY".into()), Form::C).unwrap();
        assert_eq!(summary.n_productive, 3);
        assert!((summary.mean - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(format!("{:.1}", summary.pct_zero), "66.7");
        assert_eq!(format!("{:.1}", summary.pct_full), "33.3");
    }

    #[test]
    fn all_collaborative_field_has_full_mean() {
        let corpus = three_academic_corpus(vec![
            publication("p1", 2, &["a1", "a2"], &[]),
            publication("p2", 3, &["a3"], &["cnr"]),
        ]);
        let profiles = build_profiles(&corpus);
        let summary =
            field_summary(&corpus, &profiles, &FieldScope::Sds("FIS/01".into()), Form::C).unwrap();
        assert_eq!(summary.mean, 1.0);
        assert_eq!(summary.pct_full, 100.0);
        assert_eq!(summary.pct_zero, 0.0);
    }

    #[test]
    fn empty_field_is_an_error() {
        let corpus = three_academic_corpus(vec![]);
        assert!(matches!(
            field_summary(&corpus, &build_profiles(&corpus), &FieldScope::Whole, Form::C),
            Err(IndicatorError::EmptyField(_))
        ));
    }

    #[test]
    fn incidence_of_single_authored_corpus_is_zero() {
        let corpus = three_academic_corpus(vec![
            publication("p1", 1, &["a1"], &["uniX", "mit"]),
            publication("p2", 1, &["a2"], &[]),
        ]);
        let summary = incidence(&corpus, &FieldScope::Whole, Form::C).unwrap();
        assert_eq!(summary.n_pubs_union, 2);
        assert_eq!(summary.n_pubs_with_form, 0);
        assert_eq!(summary.incidence, 0.0);
    }

    #[test]
    fn incidence_counts_form_for_at_least_one_member() {
        // p1 is intramural for the a1/a2 pair; p2 is extramural only.
        let corpus = three_academic_corpus(vec![
            publication("p1", 2, &["a1", "a2"], &["uniX"]),
            publication("p2", 2, &["a3"], &["cnr", "mit"]),
        ]);
        let ci = incidence(&corpus, &FieldScope::Whole, Form::Ci).unwrap();
        assert_eq!(ci.n_pubs_with_form, 1);
        let cef = incidence(&corpus, &FieldScope::Whole, Form::Cef).unwrap();
        assert_eq!(cef.n_pubs_with_form, 1);
        let ced = incidence(&corpus, &FieldScope::Whole, Form::Ced).unwrap();
        assert_eq!(ced.n_pubs_with_form, 1);
    }

    /// Brute-force incidence numerator from the per-pair classifier.
    fn incidence_by_pairs(corpus: &Corpus, form: Form) -> usize {
        use crate::classify::classify_for;
        let union = corpus.publications_in_scope(&FieldScope::Whole).unwrap();
        union
            .iter()
            .filter(|&&idx| {
                let publication = corpus.publication(idx);
                publication.academic_authors.iter().any(|id| {
                    let forms =
                        classify_for(publication, corpus.academic(id).unwrap(), corpus).unwrap();
                    match form {
                        Form::C => forms.collaborative,
                        Form::Ci => forms.intramural,
                        Form::Ced => forms.extramural_domestic,
                        Form::Cef => forms.extramural_international,
                    }
                })
            })
            .count()
    }

    #[test]
    fn incidence_matches_per_pair_classifier() {
        let corpus = three_academic_corpus(vec![
            publication("p1", 2, &["a1", "a2"], &["uniX"]),
            publication("p2", 2, &["a1", "a3"], &["uniX", "uniY", "mit"]),
            publication("p3", 1, &["a2"], &["mit"]),
            publication("p4", 3, &["a3"], &["cnr"]),
            publication("p5", 2, &["a2"], &[]),
        ]);
        for form in Form::ALL {
            let got = incidence(&corpus, &FieldScope::Whole, form).unwrap();
            assert_eq!(got.n_pubs_with_form, incidence_by_pairs(&corpus, form), "{form}");
        }
    }

    #[test]
    fn homogeneous_disjoint_corpus_has_zero_delta() {
        // Equal p and identical per-publication flags, disjoint authorship:
        // the weighted and unweighted means coincide.
        let corpus = three_academic_corpus(vec![
            publication("p1", 2, &["a1"], &["mit"]),
            publication("p2", 1, &["a1"], &[]),
            publication("p3", 2, &["a2"], &["mit"]),
            publication("p4", 1, &["a2"], &[]),
            publication("p5", 2, &["a3"], &["mit"]),
            publication("p6", 1, &["a3"], &[]),
        ]);
        let profiles = build_profiles(&corpus);
        for form in Form::ALL {
            let row = compare(&corpus, &profiles, &FieldScope::Whole, form).unwrap();
            assert!(row.delta.abs() < 1e-12, "{form}: {}", row.delta);
        }
    }

    #[test]
    fn classical_indices_hand_computed() {
        // f1 = 2, f2 = 1, f3 = 1 (N = 4).
        let corpus = three_academic_corpus(vec![
            publication("p1", 1, &["a1"], &[]),
            publication("p2", 1, &["a2"], &[]),
            publication("p3", 2, &["a1", "a2"], &[]),
            publication("p4", 3, &["a3"], &[]),
        ]);
        let idx = classical_indices(&corpus, &FieldScope::Whole).unwrap();
        assert!((idx.degree_of_collaboration - 0.5).abs() < 1e-15);
        assert!((idx.collaborative_index - 1.75).abs() < 1e-15);
        assert!((idx.collaborative_coefficient - (1.0 - (2.0 + 0.5 + 1.0 / 3.0) / 4.0)).abs() < 1e-15);
        assert!((idx.revised_cc - 0.4375).abs() < 1e-12);
    }

    #[test]
    fn classical_indices_degenerate_cases() {
        let singles = three_academic_corpus(vec![
            publication("p1", 1, &["a1"], &[]),
            publication("p2", 1, &["a2"], &[]),
        ]);
        let idx = classical_indices(&singles, &FieldScope::Whole).unwrap();
        assert_eq!(idx.degree_of_collaboration, 0.0);
        assert_eq!(idx.collaborative_index, 1.0);
        assert_eq!(idx.collaborative_coefficient, 0.0);
        assert_eq!(idx.revised_cc, 0.0);

        let pairs = three_academic_corpus(vec![
            publication("p1", 2, &["a1"], &[]),
            publication("p2", 2, &["a2"], &[]),
        ]);
        let idx = classical_indices(&pairs, &FieldScope::Whole).unwrap();
        assert!((idx.collaborative_coefficient - 0.5).abs() < 1e-15);
        assert!((idx.revised_cc - 1.0).abs() < 1e-15);
    }

    #[test]
    fn incidence_of_c_equals_degree_of_collaboration() {
        let corpus = three_academic_corpus(vec![
            publication("p1", 1, &["a1"], &[]),
            publication("p2", 2, &["a1", "a2"], &["mit"]),
            publication("p3", 4, &["a3"], &["cnr"]),
            publication("p4", 1, &["a2"], &[]),
        ]);
        let inc = incidence(&corpus, &FieldScope::Whole, Form::C).unwrap();
        let idx = classical_indices(&corpus, &FieldScope::Whole).unwrap();
        assert!((inc.incidence - idx.degree_of_collaboration).abs() < 1e-15);
    }

    #[test]
    fn duplicating_the_corpus_changes_nothing() {
        let base = vec![
            publication("p1", 2, &["a1", "a2"], &["uniX", "mit"]),
            publication("p2", 1, &["a1"], &[]),
            publication("p3", 3, &["a3"], &["cnr"]),
        ];
        let mut tripled = Vec::new();
        for copy in 0..3 {
            for publication_ in &base {
                let mut cloned = publication_.clone();
                cloned.pub_id = format!("{}-{copy}", cloned.pub_id);
                tripled.push(cloned);
            }
        }
        let small = three_academic_corpus(base);
        let big = three_academic_corpus(tripled);
        let profiles_small = build_profiles(&small);
        let profiles_big = build_profiles(&big);
        for form in Form::ALL {
            let a = field_summary(&small, &profiles_small, &FieldScope::Whole, form).unwrap();
            let b = field_summary(&big, &profiles_big, &FieldScope::Whole, form).unwrap();
            assert!((a.mean - b.mean).abs() < 1e-12);
            assert!((a.pct_zero - b.pct_zero).abs() < 1e-12);
            let ia = incidence(&small, &FieldScope::Whole, form).unwrap();
            let ib = incidence(&big, &FieldScope::Whole, form).unwrap();
            assert!((ia.incidence - ib.incidence).abs() < 1e-12);
        }
        let ca = classical_indices(&small, &FieldScope::Whole).unwrap();
        let cb = classical_indices(&big, &FieldScope::Whole).unwrap();
        assert!((ca.collaborative_coefficient - cb.collaborative_coefficient).abs() < 1e-12);
        assert!((ca.revised_cc - cb.revised_cc).abs() < 1e-12);
    }
}
