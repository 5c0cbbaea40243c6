//! Parsers for the four corpus input files, with line-addressed
//! reject-and-continue error reporting, plus the matching writers.
//!
//! Formats (one record per line, UTF-8, ids compared byte-wise):
//! - publications: one JSON object per line with fields `id` (string),
//!   `year` (int), `n_authors` (int), `academics` (string array),
//!   `orgs` (string array);
//! - academics: `academic_id,university_id,sds`;
//! - organizations: `org_id,country_code,is_university` with a 0/1 flag;
//! - taxonomy: `sds_code,uda_code`.
//!
//! Each file may carry a single header line, controlled by
//! [`ParseOptions::has_header`]. Blank lines are skipped. Malformed lines
//! are rejected with their line number and reason; parsing always
//! continues. Only an unreadable stream is fatal.

use crate::corpus::{
    build_corpus, AcademicRecord, BuildError, Corpus, FieldTaxonomy, Organization, Publication,
};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Skip one header line at the top of the file.
    pub has_header: bool,
}

/// Why one line was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordIssue {
    #[error("not valid JSON: {0}")]
    BadJson(String),
    #[error("missing or malformed field `{0}`")]
    MissingField(&'static str),
    #[error("bad year `{0}`")]
    BadYear(String),
    #[error("bad value for `{field}`: {detail}")]
    BadField { field: &'static str, detail: String },
    #[error("author `{0}` appears twice in the record")]
    DuplicateAuthorInRecord(String),
    #[error("n_authors {n_authors} is less than the {listed} listed academic authors")]
    NAuthorsLessThanAcademicList { n_authors: u32, listed: usize },
    #[error("expected {expected} columns, got {got}")]
    WrongColumnCount { expected: usize, got: usize },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("sds `{sds}` already maps to uda `{first_uda}`, cannot also map to `{new_uda}`")]
    TwoUdasForSds {
        sds: String,
        first_uda: String,
        new_uda: String,
    },
}

/// One rejected line: absolute 1-based line number plus the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineIssue {
    pub line: usize,
    pub issue: RecordIssue,
}

/// Accepted/rejected accounting for one parsed file. `accepted` plus the
/// rejected count equals the number of non-blank record lines read.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub accepted: usize,
    pub rejected: Vec<LineIssue>,
}

impl ParseReport {
    fn reject(&mut self, line: usize, issue: RecordIssue) {
        self.rejected.push(LineIssue { line, issue });
    }

    pub fn total_lines(&self) -> usize {
        self.accepted + self.rejected.len()
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unreadable stream: {0}")]
    UnreadableStream(#[from] io::Error),
}

/// Yields (line_number, line) for record lines, skipping blanks and an
/// optional header, and stripping a trailing carriage return.
fn record_lines<R: BufRead>(
    reader: R,
    options: &ParseOptions,
) -> impl Iterator<Item = io::Result<(usize, String)>> {
    let skip_header = options.has_header;
    reader
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| match line {
            Err(e) => Some(Err(e)),
            Ok(raw) => {
                if skip_header && i == 0 {
                    return None;
                }
                let line = raw.strip_suffix('\r').unwrap_or(&raw);
                if line.trim().is_empty() {
                    None
                } else {
                    Some(Ok((i + 1, line.to_owned())))
                }
            }
        })
}

fn json_string_array(
    value: &serde_json::Value,
    field: &'static str,
) -> Result<Vec<String>, RecordIssue> {
    let array = value
        .get(field)
        .and_then(|v| v.as_array())
        .ok_or(RecordIssue::MissingField(field))?;
    array
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or(RecordIssue::MissingField(field))
        })
        .collect()
}

fn parse_publication_line(line: &str) -> Result<Publication, RecordIssue> {
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| RecordIssue::BadJson(e.to_string()))?;
    let pub_id = value
        .get("id")
        .and_then(|v| v.as_str())
        .filter(|s| !s.is_empty())
        .ok_or(RecordIssue::MissingField("id"))?
        .to_owned();
    let year = match value.get("year") {
        None => return Err(RecordIssue::MissingField("year")),
        Some(v) => match v.as_i64() {
            Some(y) if i32::try_from(y).is_ok() => y as i32,
            _ => return Err(RecordIssue::BadYear(v.to_string())),
        },
    };
    let n_authors = value
        .get("n_authors")
        .and_then(|v| v.as_u64())
        .and_then(|n| u32::try_from(n).ok())
        .ok_or(RecordIssue::MissingField("n_authors"))?;
    if n_authors == 0 {
        return Err(RecordIssue::BadField {
            field: "n_authors",
            detail: "must be >= 1".into(),
        });
    }
    let academics = json_string_array(&value, "academics")?;
    let mut academic_authors = BTreeSet::new();
    for id in academics {
        if !academic_authors.insert(id.clone()) {
            return Err(RecordIssue::DuplicateAuthorInRecord(id));
        }
    }
    if (n_authors as usize) < academic_authors.len() {
        return Err(RecordIssue::NAuthorsLessThanAcademicList {
            n_authors,
            listed: academic_authors.len(),
        });
    }
    // Addresses are a set; a repeated org id is not evidence of anything.
    let org_addresses: BTreeSet<String> = json_string_array(&value, "orgs")?.into_iter().collect();
    Ok(Publication {
        pub_id,
        year,
        n_authors,
        academic_authors,
        org_addresses,
    })
}

/// Parses the publications file. Ordering of accepted records follows the
/// input.
pub fn parse_publications<R: BufRead>(
    reader: R,
    options: &ParseOptions,
) -> Result<(Vec<Publication>, ParseReport), IngestError> {
    let mut report = ParseReport::default();
    let mut publications = Vec::new();
    for entry in record_lines(reader, options) {
        let (line_no, line) = entry?;
        match parse_publication_line(&line) {
            Ok(publication) => {
                report.accepted += 1;
                publications.push(publication);
            }
            Err(issue) => report.reject(line_no, issue),
        }
    }
    Ok((publications, report))
}

fn split_columns(line: &str, expected: usize) -> Result<Vec<&str>, RecordIssue> {
    let columns: Vec<&str> = line.split(',').collect();
    if columns.len() != expected {
        return Err(RecordIssue::WrongColumnCount {
            expected,
            got: columns.len(),
        });
    }
    Ok(columns)
}

/// Parses the academics registry file. Duplicate academic ids are rejected
/// line by line; the first occurrence wins.
pub fn parse_academics<R: BufRead>(
    reader: R,
    options: &ParseOptions,
) -> Result<(Vec<AcademicRecord>, ParseReport), IngestError> {
    let mut report = ParseReport::default();
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for entry in record_lines(reader, options) {
        let (line_no, line) = entry?;
        let parsed = split_columns(&line, 3).and_then(|cols| {
            if cols.iter().any(|c| c.is_empty()) {
                return Err(RecordIssue::MissingField("academic_id/university_id/sds"));
            }
            if !seen.insert(cols[0].to_owned()) {
                return Err(RecordIssue::DuplicateId(cols[0].to_owned()));
            }
            Ok(AcademicRecord {
                academic_id: cols[0].to_owned(),
                university_id: cols[1].to_owned(),
                sds: cols[2].to_owned(),
            })
        });
        match parsed {
            Ok(record) => {
                report.accepted += 1;
                records.push(record);
            }
            Err(issue) => report.reject(line_no, issue),
        }
    }
    Ok((records, report))
}

/// Parses the organizations file (`org_id,country_code,is_university`).
pub fn parse_organizations<R: BufRead>(
    reader: R,
    options: &ParseOptions,
) -> Result<(Vec<Organization>, ParseReport), IngestError> {
    let mut report = ParseReport::default();
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for entry in record_lines(reader, options) {
        let (line_no, line) = entry?;
        let parsed = split_columns(&line, 3).and_then(|cols| {
            if cols[0].is_empty() || cols[1].is_empty() {
                return Err(RecordIssue::MissingField("org_id/country_code"));
            }
            let is_university = match cols[2] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(RecordIssue::BadField {
                        field: "is_university",
                        detail: format!("expected 0 or 1, got `{other}`"),
                    })
                }
            };
            if !seen.insert(cols[0].to_owned()) {
                return Err(RecordIssue::DuplicateId(cols[0].to_owned()));
            }
            Ok(Organization {
                org_id: cols[0].to_owned(),
                country_code: cols[1].to_owned(),
                is_university,
            })
        });
        match parsed {
            Ok(record) => {
                report.accepted += 1;
                records.push(record);
            }
            Err(issue) => report.reject(line_no, issue),
        }
    }
    Ok((records, report))
}

/// Parses the taxonomy file (`sds_code,uda_code`). An SDS appearing under
/// two different UDAs is rejected where the conflict appears.
pub fn parse_taxonomy<R: BufRead>(
    reader: R,
    options: &ParseOptions,
) -> Result<(FieldTaxonomy, ParseReport), IngestError> {
    let mut report = ParseReport::default();
    let mut entries: BTreeMap<String, String> = BTreeMap::new();
    for entry in record_lines(reader, options) {
        let (line_no, line) = entry?;
        let parsed = split_columns(&line, 2).and_then(|cols| {
            if cols[0].is_empty() || cols[1].is_empty() {
                return Err(RecordIssue::MissingField("sds_code/uda_code"));
            }
            match entries.get(cols[0]) {
                Some(existing) if existing == cols[1] => {
                    Err(RecordIssue::DuplicateId(cols[0].to_owned()))
                }
                Some(existing) => Err(RecordIssue::TwoUdasForSds {
                    sds: cols[0].to_owned(),
                    first_uda: existing.clone(),
                    new_uda: cols[1].to_owned(),
                }),
                None => {
                    entries.insert(cols[0].to_owned(), cols[1].to_owned());
                    Ok(())
                }
            }
        });
        match parsed {
            Ok(()) => report.accepted += 1,
            Err(issue) => report.reject(line_no, issue),
        }
    }
    let taxonomy = FieldTaxonomy::new(entries).expect("conflicts rejected line by line");
    Ok((taxonomy, report))
}

/// Keeps publications whose year lies in `from..=to`.
pub fn filter_by_years(publications: Vec<Publication>, from: i32, to: i32) -> Vec<Publication> {
    publications
        .into_iter()
        .filter(|p| (from..=to).contains(&p.year))
        .collect()
}

fn check_plain(value: &str) -> io::Result<()> {
    if value.contains(',') || value.contains('\n') || value.contains('\r') {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("value `{value}` contains a delimiter or newline"),
        ));
    }
    Ok(())
}

pub fn write_publications<W: Write>(writer: &mut W, publications: &[Publication]) -> io::Result<()> {
    for publication in publications {
        serde_json::to_writer(&mut *writer, publication)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_academics<W: Write>(writer: &mut W, records: &[AcademicRecord]) -> io::Result<()> {
    for r in records {
        for field in [&r.academic_id, &r.university_id, &r.sds] {
            check_plain(field)?;
        }
        writeln!(writer, "{},{},{}", r.academic_id, r.university_id, r.sds)?;
    }
    Ok(())
}

pub fn write_organizations<W: Write>(writer: &mut W, records: &[Organization]) -> io::Result<()> {
    for r in records {
        check_plain(&r.org_id)?;
        check_plain(&r.country_code)?;
        writeln!(
            writer,
            "{},{},{}",
            r.org_id,
            r.country_code,
            u8::from(r.is_university)
        )?;
    }
    Ok(())
}

pub fn write_taxonomy<W: Write>(writer: &mut W, taxonomy: &FieldTaxonomy) -> io::Result<()> {
    for (sds, uda) in taxonomy.iter() {
        check_plain(sds)?;
        check_plain(uda)?;
        writeln!(writer, "{sds},{uda}")?;
    }
    Ok(())
}

/// Parse reports for all four inputs plus the year-filter accounting.
#[derive(Debug, Default)]
pub struct IngestSummary {
    pub publications: ParseReport,
    pub academics: ParseReport,
    pub organizations: ParseReport,
    pub taxonomy: ParseReport,
    pub dropped_by_year: usize,
}

impl IngestSummary {
    pub fn total_rejected(&self) -> usize {
        self.publications.rejected.len()
            + self.academics.rejected.len()
            + self.organizations.rejected.len()
            + self.taxonomy.rejected.len()
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Build(#[from] BuildError),
}

fn open(path: &Path) -> Result<BufReader<std::fs::File>, LoadError> {
    std::fs::File::open(path)
        .map(BufReader::new)
        .map_err(|source| LoadError::Io {
            path: path.to_owned(),
            source,
        })
}

fn io_at(path: &Path) -> impl FnOnce(IngestError) -> LoadError + '_ {
    move |IngestError::UnreadableStream(source)| LoadError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Parses the four files, applies the optional year window, and builds the
/// corpus. Per-line rejects are reported, not fatal; cross-reference
/// failures at build time are.
pub fn load_corpus_files(
    publications_path: &Path,
    academics_path: &Path,
    organizations_path: &Path,
    taxonomy_path: &Path,
    options: &ParseOptions,
    domestic_country: &str,
    years: Option<(i32, i32)>,
) -> Result<(Corpus, IngestSummary), LoadError> {
    let (mut publications, pub_report) =
        parse_publications(open(publications_path)?, options).map_err(io_at(publications_path))?;
    let (academics, academics_report) =
        parse_academics(open(academics_path)?, options).map_err(io_at(academics_path))?;
    let (organizations, org_report) = parse_organizations(open(organizations_path)?, options)
        .map_err(io_at(organizations_path))?;
    let (taxonomy, taxonomy_report) =
        parse_taxonomy(open(taxonomy_path)?, options).map_err(io_at(taxonomy_path))?;
    let mut dropped_by_year = 0;
    if let Some((from, to)) = years {
        let before = publications.len();
        publications = filter_by_years(publications, from, to);
        dropped_by_year = before - publications.len();
    }
    let corpus = build_corpus(
        publications,
        academics,
        organizations,
        taxonomy,
        domestic_country,
    )?;
    Ok((
        corpus,
        IngestSummary {
            publications: pub_report,
            academics: academics_report,
            organizations: org_report,
            taxonomy: taxonomy_report,
            dropped_by_year,
        },
    ))
}
