//! Bundled two-researcher demonstration corpus.
//!
//! Researcher alpha has 23 publications, 4 of them with a foreign
//! organization in the byline; researcher beta has 13, 3 of them foreign;
//! 8 publications carry both researchers, 3 of those foreign. The field
//! union therefore holds 28 distinct publications of which 4 are foreign:
//! CEF propensities 17.4% and 23.1% (mean 20.2%) against an incidence of
//! 14.3%.

use crate::corpus::{
    build_corpus, AcademicRecord, Corpus, FieldTaxonomy, Organization, Publication,
};
use std::collections::BTreeSet;

fn publication(id: &str, year: i32, n_authors: u32, academics: &[&str], orgs: &[&str]) -> Publication {
    Publication {
        pub_id: id.into(),
        year,
        n_authors,
        academic_authors: academics.iter().map(|s| s.to_string()).collect(),
        org_addresses: orgs.iter().map(|s| s.to_string()).collect(),
    }
}

/// The alpha/beta corpus described in the module docs.
pub fn table9_corpus() -> Corpus {
    let taxonomy = FieldTaxonomy::new([("FIS/01".to_string(), "PHY".to_string())]).unwrap();
    let organizations = vec![
        Organization {
            org_id: "uni-a".into(),
            country_code: "IT".into(),
            is_university: true,
        },
        Organization {
            org_id: "uni-b".into(),
            country_code: "IT".into(),
            is_university: true,
        },
        Organization {
            org_id: "cnr-rm".into(),
            country_code: "IT".into(),
            is_university: false,
        },
        Organization {
            org_id: "eth-zh".into(),
            country_code: "CH".into(),
            is_university: true,
        },
    ];
    let academics = vec![
        AcademicRecord {
            academic_id: "alpha".into(),
            university_id: "uni-a".into(),
            sds: "FIS/01".into(),
        },
        AcademicRecord {
            academic_id: "beta".into(),
            university_id: "uni-b".into(),
            sds: "FIS/01".into(),
        },
    ];

    let mut publications = Vec::new();
    // Alpha's own 15 publications; A01 is the only foreign one.
    publications.push(publication("A01", 2006, 2, &["alpha"], &["uni-a", "eth-zh"]));
    for i in 2..=8 {
        publications.push(publication(
            &format!("A{i:02}"),
            2006 + (i as i32 % 5),
            2,
            &["alpha"],
            &["uni-a", "cnr-rm"],
        ));
    }
    for i in 9..=15 {
        publications.push(publication(
            &format!("A{i:02}"),
            2006 + (i as i32 % 5),
            3,
            &["alpha"],
            &["uni-a"],
        ));
    }
    // Beta's own 5 publications, none foreign.
    for i in 1..=5 {
        let orgs: &[&str] = if i <= 2 {
            &["uni-b", "cnr-rm"]
        } else {
            &["uni-b"]
        };
        publications.push(publication(
            &format!("B{i:02}"),
            2006 + (i as i32 % 5),
            2,
            &["beta"],
            orgs,
        ));
    }
    // Eight shared publications; S01..S03 include a foreign organization.
    for i in 1..=8 {
        let orgs: &[&str] = if i <= 3 {
            &["uni-a", "uni-b", "eth-zh"]
        } else {
            &["uni-a", "uni-b"]
        };
        publications.push(publication(
            &format!("S{i:02}"),
            2006 + (i as i32 % 5),
            2,
            &["alpha", "beta"],
            orgs,
        ));
    }

    build_corpus(publications, academics, organizations, taxonomy, "IT")
        .expect("demo corpus is well-formed")
}

/// The demo corpus decomposed back into its build inputs, for writing the
/// four corpus files.
pub fn table9_records() -> (
    Vec<Publication>,
    Vec<AcademicRecord>,
    Vec<Organization>,
    FieldTaxonomy,
) {
    let corpus = table9_corpus();
    let academics = corpus
        .academics()
        .values()
        .map(|a| AcademicRecord {
            academic_id: a.academic_id.clone(),
            university_id: a.university_id.clone(),
            sds: a.sds.clone(),
        })
        .collect();
    let organizations = corpus.organizations().values().cloned().collect();
    let taxonomy = FieldTaxonomy::new(
        corpus
            .taxonomy()
            .iter()
            .map(|(s, u)| (s.to_owned(), u.to_owned()))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    (
        corpus.publications().to_vec(),
        academics,
        organizations,
        taxonomy,
    )
}

/// Convenience for tests: ids of the union publications flagged foreign.
pub fn foreign_union_ids(corpus: &Corpus) -> BTreeSet<String> {
    corpus
        .publications()
        .iter()
        .filter(|p| {
            p.org_addresses.iter().any(|org| {
                corpus.organization(org).map(|o| o.country_code != corpus.domestic_country())
                    == Some(true)
            })
        })
        .map(|p| p.pub_id.clone())
        .collect()
}
