//! Collaboration-propensity analytics for co-authorship corpora.
//!
//! Measures each scientist's propensity to collaborate - in general,
//! intramurally, extramurally at the domestic level and extramurally at the
//! international level - by classifying *authors* into fields, and
//! contrasts the resulting field averages with the traditional
//! publication-classification (incidence) indicators. Ships with a
//! non-parametric statistics battery, the classical co-authorship indices,
//! and a seeded synthetic-corpus generator that demonstrates how skewed
//! productivity drives the two indicator families apart.
//!
//! Pipeline: [`ingest`] parses the four input files, [`corpus`] validates
//! and indexes them, [`classify`] aggregates per-academic counts,
//! [`indicators`] and [`stats`] produce field-level results, and
//! [`report`] renders them as tables. [`synth`] generates corpora that
//! flow through the identical pipeline.

pub mod classify;
pub mod corpus;
pub mod demo;
pub mod indicators;
pub mod ingest;
pub mod stats;

pub use classify::{build_profiles, classify_for, CollaborationProfile, Profiles, PubForms};
pub use corpus::{
    build_corpus, collaborative_academics, filter_active_fields, productive_academics, Academic,
    AcademicRecord, Corpus, FieldScope, FieldTaxonomy, Organization, Publication,
};
pub use indicators::{
    classical_indices, compare, field_summary, incidence, propensities, ClassicalIndices,
    ComparisonRow, FieldSummary, Form, IncidenceSummary, PropensitySet,
};
