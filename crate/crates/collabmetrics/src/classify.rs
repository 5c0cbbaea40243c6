//! Per-(publication, academic) collaboration-form classification and the
//! per-academic profile aggregation.
//!
//! Classification rules, all relative to one focal academic:
//! - collaborative: the byline has at least two authors. Single-authored
//!   papers are never collaborations, regardless of how many affiliations
//!   they list.
//! - intramural: collaborative, and a *registry* co-author belongs to the
//!   focal academic's university. Identity-based: non-academic co-authors
//!   cannot establish it.
//! - extramural domestic: collaborative, and the address list names a
//!   domestic organization other than the focal academic's own university.
//! - extramural international: collaborative, and the address list names a
//!   foreign organization.

use crate::corpus::{Academic, Corpus, Publication};
use std::collections::BTreeMap;
use thiserror::Error;

/// Which collaboration forms one publication represents for one academic.
/// Flags are not mutually exclusive; a multi-author paper may set several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PubForms {
    pub collaborative: bool,
    pub intramural: bool,
    pub extramural_domestic: bool,
    pub extramural_international: bool,
}

/// Per-academic publication counts: p total, cp collaborative, cip
/// intramural, cedp extramural domestic, cefp extramural international.
/// Always 0 <= cip, cedp, cefp <= cp <= p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollaborationProfile {
    pub academic_id: String,
    pub p: u32,
    pub cp: u32,
    pub cip: u32,
    pub cedp: u32,
    pub cefp: u32,
}

impl CollaborationProfile {
    fn new(academic_id: String) -> Self {
        CollaborationProfile {
            academic_id,
            p: 0,
            cp: 0,
            cip: 0,
            cedp: 0,
            cefp: 0,
        }
    }

    pub fn count_for(&self, form: crate::indicators::Form) -> u32 {
        use crate::indicators::Form;
        match form {
            Form::C => self.cp,
            Form::Ci => self.cip,
            Form::Ced => self.cedp,
            Form::Cef => self.cefp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("academic `{academic_id}` is not an author of publication `{pub_id}`")]
    AcademicNotOnPublication { academic_id: String, pub_id: String },
}

/// Classifies one publication relative to one of its academic authors.
/// Pure in (publication, academic, registry, organizations); author and
/// address order never matter.
pub fn classify_for(
    publication: &Publication,
    academic: &Academic,
    corpus: &Corpus,
) -> Result<PubForms, ClassifyError> {
    if !publication.academic_authors.contains(&academic.academic_id) {
        return Err(ClassifyError::AcademicNotOnPublication {
            academic_id: academic.academic_id.clone(),
            pub_id: publication.pub_id.clone(),
        });
    }
    let collaborative = publication.n_authors >= 2;
    if !collaborative {
        return Ok(PubForms::default());
    }
    let domestic = corpus.domestic_country();
    let intramural = publication
        .academic_authors
        .iter()
        .filter(|id| *id != &academic.academic_id)
        .any(|id| {
            corpus
                .academic(id)
                .map(|other| other.university_id == academic.university_id)
                .unwrap_or(false)
        });
    let mut extramural_domestic = false;
    let mut extramural_international = false;
    for org_id in &publication.org_addresses {
        let Some(org) = corpus.organization(org_id) else {
            continue;
        };
        if org.country_code == domestic {
            if *org_id != academic.university_id {
                extramural_domestic = true;
            }
        } else {
            extramural_international = true;
        }
    }
    Ok(PubForms {
        collaborative,
        intramural,
        extramural_domestic,
        extramural_international,
    })
}

/// Profiles for every registered academic, keyed by academic id.
/// Unproductive academics are present with all counts zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profiles(BTreeMap<String, CollaborationProfile>);

impl Profiles {
    pub fn get(&self, academic_id: &str) -> Option<&CollaborationProfile> {
        self.0.get(academic_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &CollaborationProfile)> {
        self.0.iter().map(|(id, p)| (id.as_str(), p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Aggregates the author-publication association into per-academic counts.
/// One pass over the publications; per publication the org evidence and the
/// university multiset are computed once and reused for every author.
pub fn build_profiles(corpus: &Corpus) -> Profiles {
    let mut profiles: BTreeMap<String, CollaborationProfile> = corpus
        .academics()
        .keys()
        .map(|id| (id.clone(), CollaborationProfile::new(id.clone())))
        .collect();
    let domestic = corpus.domestic_country();
    let mut domestic_orgs: Vec<&str> = Vec::new();
    let mut universities: Vec<&str> = Vec::new();
    for publication in corpus.publications() {
        let collaborative = publication.n_authors >= 2;
        domestic_orgs.clear();
        let mut has_foreign = false;
        if collaborative {
            for org_id in &publication.org_addresses {
                let org = corpus.organization(org_id).expect("validated at build");
                if org.country_code == domestic {
                    domestic_orgs.push(org_id);
                } else {
                    has_foreign = true;
                }
            }
            universities.clear();
            universities.extend(publication.academic_authors.iter().map(|id| {
                corpus
                    .academic(id)
                    .expect("validated at build")
                    .university_id
                    .as_str()
            }));
        }
        for academic_id in &publication.academic_authors {
            let profile = profiles.get_mut(academic_id).expect("validated at build");
            profile.p += 1;
            if !collaborative {
                continue;
            }
            profile.cp += 1;
            let own_university = corpus
                .academic(academic_id)
                .expect("validated at build")
                .university_id
                .as_str();
            if universities
                .iter()
                .filter(|u| **u == own_university)
                .count()
                >= 2
            {
                profile.cip += 1;
            }
            if domestic_orgs.iter().any(|org| *org != own_university) {
                profile.cedp += 1;
            }
            if has_foreign {
                profile.cefp += 1;
            }
        }
    }
    Profiles(profiles)
}
