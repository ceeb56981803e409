//! Paper records, corpus ingestion and keyword frequency tables.
//!
//! Two input formats are accepted:
//!
//! * a delimited table with the header `id,title,venue,year,keywords`,
//!   where the keywords cell is `;`-separated and quoted per RFC 4180;
//! * structured records, one JSON object per line with the same five
//!   fields and `keywords` as an array of strings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_YEAR: i32 = 1980;
pub const MAX_YEAR: i32 = 2100;

const HEADER: [&str; 5] = ["id", "title", "venue", "year", "keywords"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub venue: String,
    pub year: i32,
    #[serde(default)]
    pub keywords: Vec<String>,
}

impl Paper {
    /// Papers without keywords stay in the corpus but never reach a matrix.
    pub fn is_flagged(&self) -> bool {
        self.keywords.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeywordKind {
    Author,
    Expert,
    Taxonomy,
}

impl fmt::Display for KeywordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeywordKind::Author => "author",
            KeywordKind::Expert => "expert",
            KeywordKind::Taxonomy => "taxonomy",
        })
    }
}

impl FromStr for KeywordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "author" => Ok(KeywordKind::Author),
            "expert" => Ok(KeywordKind::Expert),
            "taxonomy" => Ok(KeywordKind::Taxonomy),
            other => Err(Error::Invalid(format!("unknown keyword kind `{other}`"))),
        }
    }
}

/// Inclusive range of calendar years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub start: i32,
    pub end: i32,
}

impl YearRange {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::Invalid(format!("empty year range {start}..={end}")));
        }
        Ok(YearRange { start, end })
    }

    pub fn all() -> Self {
        YearRange {
            start: MIN_YEAR,
            end: MAX_YEAR,
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        self.start <= year && year <= self.end
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start..=self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

impl FromStr for YearRange {
    type Err = Error;

    /// Accepts `2004-2013`, `2004..2013` or a single year.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (a, b) = match s.split_once("..").or_else(|| s.split_once('-')) {
            Some((a, b)) => (a, b),
            None => (s, s),
        };
        let parse = |v: &str| {
            v.trim()
                .parse::<i32>()
                .map_err(|_| Error::Invalid(format!("bad year range `{s}`")))
        };
        YearRange::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    papers: Vec<Paper>,
    provenance: String,
    keyword_kind: KeywordKind,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids and out-of-range years.
    pub fn new(
        papers: Vec<Paper>,
        provenance: impl Into<String>,
        kind: KeywordKind,
    ) -> Result<Self> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, p) in papers.iter().enumerate() {
            if let Some(first) = seen.insert(p.id.as_str(), i) {
                return Err(Error::DuplicateId {
                    id: p.id.clone(),
                    first: first + 1,
                    second: i + 1,
                });
            }
            check_year(p.year).map_err(|message| Error::Parse {
                line: i + 1,
                message,
            })?;
        }
        Ok(Corpus {
            papers,
            provenance: provenance.into(),
            keyword_kind: kind,
        })
    }

    pub fn papers(&self) -> &[Paper] {
        &self.papers
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn keyword_kind(&self) -> KeywordKind {
        self.keyword_kind
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn with_kind(mut self, kind: KeywordKind) -> Self {
        self.keyword_kind = kind;
        self
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Paper> {
        self.papers.iter().find(|p| p.id == id)
    }

    pub fn venues(&self) -> BTreeSet<String> {
        self.papers.iter().map(|p| p.venue.clone()).collect()
    }

    /// Smallest range covering every paper's year.
    pub fn year_span(&self) -> Option<YearRange> {
        let min = self.papers.iter().map(|p| p.year).min()?;
        let max = self.papers.iter().map(|p| p.year).max()?;
        Some(YearRange {
            start: min,
            end: max,
        })
    }

    pub fn flagged(&self) -> impl Iterator<Item = &Paper> {
        self.papers.iter().filter(|p| p.is_flagged())
    }

    /// Rewrites every paper's keyword list. The closure sees the paper's
    /// current keywords and returns the replacement.
    pub(crate) fn map_keywords<F>(&self, mut f: F) -> Result<Corpus>
    where
        F: FnMut(&[String]) -> Result<Vec<String>>,
    {
        let papers = self
            .papers
            .iter()
            .map(|p| {
                Ok(Paper {
                    keywords: f(&p.keywords)?,
                    ..p.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus {
            papers,
            provenance: self.provenance.clone(),
            keyword_kind: self.keyword_kind,
        })
    }

    pub fn digest(&self) -> CorpusDigest {
        let mut vocab = BTreeSet::new();
        let mut occurrences = 0;
        for p in &self.papers {
            let distinct: BTreeSet<&str> = p.keywords.iter().map(String::as_str).collect();
            occurrences += distinct.len();
            vocab.extend(distinct);
        }
        CorpusDigest {
            papers: self.papers.len(),
            papers_with_keywords: self.papers.iter().filter(|p| !p.is_flagged()).count(),
            unique_keywords: vocab.len(),
            occurrences,
        }
    }
}

/// Headline counts of a corpus. Occurrences count each keyword once per paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDigest {
    pub papers: usize,
    pub papers_with_keywords: usize,
    pub unique_keywords: usize,
    pub occurrences: usize,
}

fn check_year(year: i32) -> std::result::Result<(), String> {
    if (MIN_YEAR..=MAX_YEAR).contains(&year) {
        Ok(())
    } else {
        Err(format!("year {year} outside {MIN_YEAR}..={MAX_YEAR}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Comma-separated table with a header row.
    Delimited,
    /// One JSON object per line.
    Records,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" | "delimited" => Ok(Format::Delimited),
            "jsonl" | "records" => Ok(Format::Records),
            other => Err(Error::Invalid(format!("unknown corpus format `{other}`"))),
        }
    }
}

impl Format {
    /// Guesses the format from a file extension, defaulting to delimited.
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") | Some("json") => Format::Records,
            _ => Format::Delimited,
        }
    }
}

pub fn parse_corpus<R: Read>(source: R, format: Format) -> Result<Corpus> {
    let rows = match format {
        Format::Delimited => parse_delimited(source)?,
        Format::Records => parse_records(source)?,
    };
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut papers = Vec::with_capacity(rows.len());
    for (line, paper) in rows {
        if let Some(&first) = seen.get(&paper.id) {
            return Err(Error::DuplicateId {
                id: paper.id,
                first,
                second: line,
            });
        }
        seen.insert(paper.id.clone(), line);
        papers.push(paper);
    }
    let flagged = papers.iter().filter(|p| p.is_flagged()).count();
    if flagged > 0 {
        log::info!("{flagged} paper(s) carry no keywords");
    }
    Corpus::new(papers, "", KeywordKind::Author)
}

fn split_keywords(cell: &str) -> Vec<String> {
    cell.split(';')
        .map(str::trim)
        .filter(|k| !k.is_empty())
        .map(str::to_owned)
        .collect()
}

fn parse_delimited<R: Read>(source: R) -> Result<Vec<(usize, Paper)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let header = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let id = field(0);
        if id.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty paper id".into(),
            });
        }
        let year = field(3).parse::<i32>().map_err(|_| Error::Parse {
            line,
            message: format!("invalid year `{}`", field(3)),
        })?;
        check_year(year).map_err(|message| Error::Parse { line, message })?;
        rows.push((
            line,
            Paper {
                id: id.to_owned(),
                title: field(1).to_owned(),
                venue: field(2).to_owned(),
                year,
                keywords: split_keywords(record.get(4).unwrap_or("")),
            },
        ));
    }
    Ok(rows)
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn parse_records<R: Read>(source: R) -> Result<Vec<(usize, Paper)>> {
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut paper: Paper = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        paper.id = paper.id.trim().to_owned();
        if paper.id.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: "empty paper id".into(),
            });
        }
        check_year(paper.year).map_err(|message| Error::Parse {
            line: lineno,
            message,
        })?;
        paper.keywords = paper
            .keywords
            .iter()
            .map(|k| k.trim())
            .filter(|k| !k.is_empty())
            .map(str::to_owned)
            .collect();
        rows.push((lineno, paper));
    }
    Ok(rows)
}

/// Writes a corpus in either input format. Keywords containing `;` cannot be
/// represented in the delimited format and are rejected.
pub fn write_corpus<W: Write>(corpus: &Corpus, out: W, format: Format) -> Result<()> {
    match format {
        Format::Delimited => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(HEADER)?;
            for p in &corpus.papers {
                if let Some(bad) = p.keywords.iter().find(|k| k.contains(';')) {
                    return Err(Error::Invalid(format!(
                        "keyword `{bad}` contains the `;` separator"
                    )));
                }
                let year = p.year.to_string();
                let kw = p.keywords.join(";");
                w.write_record([p.id.as_str(), &p.title, &p.venue, &year, &kw])?;
            }
            w.flush()?;
        }
        Format::Records => {
            let mut out = out;
            for p in &corpus.papers {
                serde_json::to_writer(&mut out, p)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Keeps papers whose venue is in `venues` and whose year is in `years`.
pub fn filter_corpus(corpus: &Corpus, venues: &BTreeSet<String>, years: YearRange) -> Corpus {
    Corpus {
        papers: corpus
            .papers
            .iter()
            .filter(|p| venues.contains(&p.venue) && years.contains(p.year))
            .cloned()
            .collect(),
        provenance: corpus.provenance.clone(),
        keyword_kind: corpus.keyword_kind,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyEntry {
    pub keyword: String,
    pub count: usize,
    pub rank: usize,
}

/// Keywords ranked by the number of papers they appear on.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    entries: Vec<FrequencyEntry>,
}

impl FrequencyTable {
    /// Ranks `(keyword, count)` pairs: descending count, ties broken by the
    /// lexicographically smaller keyword.
    pub fn from_counts<I: IntoIterator<Item = (String, usize)>>(counts: I) -> Self {
        let mut pairs: Vec<(String, usize)> = counts.into_iter().collect();
        pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        FrequencyTable {
            entries: pairs
                .into_iter()
                .enumerate()
                .map(|(i, (keyword, count))| FrequencyEntry {
                    keyword,
                    count,
                    rank: i + 1,
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[FrequencyEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, keyword: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.keyword == keyword)
            .map(|e| e.count)
    }

    pub fn to_map(&self) -> BTreeMap<String, usize> {
        self.entries
            .iter()
            .map(|e| (e.keyword.clone(), e.count))
            .collect()
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// First `n` entries.
    pub fn top(&self, n: usize) -> &[FrequencyEntry] {
        &self.entries[..n.min(self.entries.len())]
    }
}

/// Per-paper presence counts for every keyword in the corpus.
pub fn frequency_table(corpus: &Corpus) -> FrequencyTable {
    FrequencyTable::from_counts(paper_counts(corpus.papers()))
}

pub(crate) fn paper_counts<'a, I>(papers: I) -> BTreeMap<String, usize>
where
    I: IntoIterator<Item = &'a Paper>,
{
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for p in papers {
        let distinct: BTreeSet<&String> = p.keywords.iter().collect();
        for k in distinct {
            *counts.entry(k.clone()).or_default() += 1;
        }
    }
    counts
}
