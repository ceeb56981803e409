//! Keyword canonicalization, alias consolidation and expert code mapping.
//!
//! Mechanical clean-up (case, whitespace, stray punctuation) lives in
//! [`canonicalize`]. Every semantic merge, including singular/plural and
//! hyphenation variants, must be spelled out in an [`AliasMap`]; nothing
//! here stems or guesses.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, KeywordKind};
use crate::error::{Error, Result};

const TERMINAL_PUNCTUATION: &[char] = &['.', ',', ';', ':', '!', '?', '"', '\'', '`'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationRules {
    pub fold_case: bool,
    pub collapse_whitespace: bool,
    pub strip_terminal_punctuation: bool,
}

impl Default for NormalizationRules {
    fn default() -> Self {
        NormalizationRules {
            fold_case: true,
            collapse_whitespace: true,
            strip_terminal_punctuation: true,
        }
    }
}

pub fn canonicalize(raw: &str, rules: &NormalizationRules) -> Result<String> {
    let mut s = if rules.fold_case {
        raw.to_lowercase()
    } else {
        raw.to_owned()
    };
    if rules.collapse_whitespace {
        s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    }
    // Stripping punctuation can expose whitespace and vice versa.
    loop {
        let mut t = s.trim();
        if rules.strip_terminal_punctuation {
            t = t.trim_matches(TERMINAL_PUNCTUATION);
        }
        if t.len() == s.len() {
            break;
        }
        s = t.to_owned();
    }
    if s.is_empty() {
        return Err(Error::EmptyKeyword);
    }
    Ok(s)
}

/// Canonicalizes every keyword and collapses per-paper duplicates, keeping
/// the first occurrence's position.
pub fn canonicalize_corpus(corpus: &Corpus, rules: &NormalizationRules) -> Result<Corpus> {
    corpus.map_keywords(|kws| {
        let mut out = Vec::with_capacity(kws.len());
        for k in kws {
            match canonicalize(k, rules) {
                Ok(c) => out.push(c),
                // A keyword made only of punctuation carries no information.
                Err(Error::EmptyKeyword) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(dedupe(out))
    })
}

fn dedupe(keywords: Vec<String>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    keywords
        .into_iter()
        .filter(|k| seen.insert(k.clone()))
        .collect()
}

/// Consolidation map from variant spellings to a chosen canonical keyword.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasMap {
    entries: BTreeMap<String, String>,
}

impl AliasMap {
    pub fn new<I, K, V>(entries: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        AliasMap {
            entries: entries
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        }
    }

    /// Reads a `raw,canonical` table with a header row. Both columns are
    /// canonicalized with `rules` so lookups match a canonicalized corpus.
    pub fn from_csv<R: Read>(source: R, rules: &NormalizationRules) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(source);
        let mut entries = BTreeMap::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let (Some(raw), Some(canon)) = (record.get(0), record.get(1)) else {
                return Err(Error::Parse {
                    line,
                    message: "expected `raw,canonical`".into(),
                });
            };
            let raw = canonicalize(raw, rules).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            let canon = canonicalize(canon, rules).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            entries.insert(raw, canon);
        }
        let map = AliasMap { entries };
        map.validate()?;
        Ok(map)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks for cycles and chains longer than two hops.
    pub fn validate(&self) -> Result<()> {
        for start in self.entries.keys() {
            let mut path = vec![start.as_str()];
            let mut cur = start.as_str();
            while let Some(next) = self.entries.get(cur) {
                if next == cur {
                    break;
                }
                if let Some(pos) = path.iter().position(|p| *p == next) {
                    let mut cycle: Vec<String> =
                        path[pos..].iter().map(|s| s.to_string()).collect();
                    cycle.push(next.clone());
                    return Err(Error::AliasCycle(cycle));
                }
                path.push(next);
                cur = next;
            }
            if path.len() > 3 {
                return Err(Error::AliasChainTooLong(start.clone()));
            }
        }
        Ok(())
    }

    /// Fixed point of `keyword` under the map. Assumes a validated map.
    pub fn resolve<'a>(&'a self, keyword: &'a str) -> &'a str {
        let mut cur = keyword;
        for _ in 0..2 {
            match self.entries.get(cur) {
                Some(next) if next != cur => cur = next,
                _ => break,
            }
        }
        cur
    }
}

pub fn apply_alias_map(corpus: &Corpus, map: &AliasMap) -> Result<Corpus> {
    map.validate()?;
    corpus.map_keywords(|kws| {
        Ok(dedupe(
            kws.iter().map(|k| map.resolve(k).to_owned()).collect(),
        ))
    })
}

/// One coder's assignment of canonical keywords to higher-level codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMap {
    entries: BTreeMap<String, BTreeSet<String>>,
    coder_id: String,
}

impl CodeMap {
    pub fn new<I, K, C>(coder_id: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, C)>,
        K: Into<String>,
        C: IntoIterator,
        C::Item: Into<String>,
    {
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (k, codes) in entries {
            let k = k.into();
            let codes: BTreeSet<String> = codes
                .into_iter()
                .map(Into::into)
                .map(|c: String| c.trim().to_owned())
                .collect();
            if codes.is_empty() || codes.iter().any(String::is_empty) {
                return Err(Error::EmptyCodeSet(k));
            }
            map.entry(k).or_default().extend(codes);
        }
        Ok(CodeMap {
            entries: map,
            coder_id: coder_id.into(),
        })
    }

    /// Reads `keyword,code1|code2|...,coder_id` rows (with header) and
    /// returns one map per coder, ordered by coder id.
    pub fn read_csv<R: Read>(source: R, rules: &NormalizationRules) -> Result<Vec<CodeMap>> {
        let mut reader = csv::ReaderBuilder::new().from_reader(source);
        let mut by_coder: BTreeMap<String, Vec<(String, Vec<String>)>> = BTreeMap::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let (Some(kw), Some(codes), Some(coder)) =
                (record.get(0), record.get(1), record.get(2))
            else {
                return Err(Error::Parse {
                    line,
                    message: "expected `keyword,codes,coder_id`".into(),
                });
            };
            let kw = canonicalize(kw, rules).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            let codes: Vec<String> = codes
                .split('|')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(str::to_owned)
                .collect();
            if codes.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: format!("no codes for `{kw}`"),
                });
            }
            by_coder
                .entry(coder.trim().to_owned())
                .or_default()
                .push((kw, codes));
        }
        by_coder
            .into_iter()
            .map(|(coder, rows)| CodeMap::new(coder, rows))
            .collect()
    }

    pub fn coder_id(&self) -> &str {
        &self.coder_id
    }

    pub fn codes(&self, keyword: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(keyword)
    }

    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Co-coding indicator over `keywords`: 1 when this coder gave both
    /// keywords at least one common code. Row-major.
    pub fn indicator(&self, keywords: &[String]) -> CoderIndicator {
        let n = keywords.len();
        let sets: Vec<Option<&BTreeSet<String>>> =
            keywords.iter().map(|k| self.entries.get(k)).collect();
        let mut cells = vec![0u8; n * n];
        for i in 0..n {
            for j in i..n {
                if let (Some(a), Some(b)) = (sets[i], sets[j]) {
                    if !a.is_disjoint(b) {
                        cells[i * n + j] = 1;
                        cells[j * n + i] = 1;
                    }
                }
            }
        }
        CoderIndicator {
            coder_id: self.coder_id.clone(),
            keywords: keywords.to_vec(),
            cells,
        }
    }
}

/// Symmetric 0/1 matrix recording which keyword pairs one coder co-coded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoderIndicator {
    pub coder_id: String,
    pub keywords: Vec<String>,
    pub cells: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodingMode {
    /// Every keyword must have codes.
    #[default]
    Strict,
    /// Keywords without codes are dropped and counted in the report.
    Lenient,
}

impl FromStr for CodingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(CodingMode::Strict),
            "lenient" => Ok(CodingMode::Lenient),
            other => Err(Error::Invalid(format!("unknown coding mode `{other}`"))),
        }
    }
}

/// Keywords dropped by a lenient coding pass, with the number of papers each
/// was dropped from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CodingReport {
    pub dropped: BTreeMap<String, usize>,
}

impl CodingReport {
    pub fn dropped_occurrences(&self) -> usize {
        self.dropped.values().sum()
    }
}

/// Replaces each paper's keywords by the union of their codes.
pub fn apply_code_map(
    corpus: &Corpus,
    map: &CodeMap,
    mode: CodingMode,
) -> Result<(Corpus, CodingReport)> {
    let mut report = CodingReport::default();
    let coded = corpus.map_keywords(|kws| {
        let mut out = Vec::new();
        for k in kws {
            match map.codes(k) {
                Some(codes) => out.extend(codes.iter().cloned()),
                None => match mode {
                    CodingMode::Strict => return Err(Error::UnmappedKeyword(k.clone())),
                    CodingMode::Lenient => *report.dropped.entry(k.clone()).or_default() += 1,
                },
            }
        }
        Ok(dedupe(out))
    })?;
    if !report.dropped.is_empty() {
        log::warn!(
            "{} keyword(s) without codes dropped ({} occurrences)",
            report.dropped.len(),
            report.dropped_occurrences()
        );
    }
    Ok((coded.with_kind(KeywordKind::Expert), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Paper;

    fn corpus(papers: &[&[&str]]) -> Corpus {
        let papers = papers
            .iter()
            .enumerate()
            .map(|(i, kws)| Paper {
                id: format!("p{i}"),
                title: String::new(),
                venue: "V".into(),
                year: 2010,
                keywords: kws.iter().map(|s| s.to_string()).collect(),
            })
            .collect();
        Corpus::new(papers, "test", KeywordKind::Author).unwrap()
    }

    fn rules() -> NormalizationRules {
        NormalizationRules::default()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(
            canonicalize(" Volume Rendering ", &rules()).unwrap(),
            "volume rendering"
        );
        assert_eq!(
            canonicalize("volume rendering", &rules()).unwrap(),
            "volume rendering"
        );
        assert_eq!(canonicalize("GPU,", &rules()).unwrap(), "gpu");
        assert_eq!(
            canonicalize("  multi   dimensional\tdata ", &rules()).unwrap(),
            "multi dimensional data"
        );
        assert!(matches!(
            canonicalize("   ", &rules()),
            Err(Error::EmptyKeyword)
        ));
        assert!(matches!(
            canonicalize(" ., ", &rules()),
            Err(Error::EmptyKeyword)
        ));
    }

    #[test]
    fn canonicalize_keeps_meaningful_symbols_and_hyphens() {
        assert_eq!(
            canonicalize("Focus+Context", &rules()).unwrap(),
            "focus+context"
        );
        assert_eq!(canonicalize("C++.", &rules()).unwrap(), "c++");
        assert_eq!(
            canonicalize("multi-dimensional", &rules()).unwrap(),
            "multi-dimensional"
        );
        assert_ne!(
            canonicalize("multi-dimensional", &rules()).unwrap(),
            canonicalize("multidimensional", &rules()).unwrap()
        );
        // No stemming.
        assert_eq!(
            canonicalize("Isosurfaces", &rules()).unwrap(),
            "isosurfaces"
        );
    }

    #[test]
    fn canonicalize_respects_disabled_rules() {
        let r = NormalizationRules {
            fold_case: false,
            collapse_whitespace: false,
            strip_terminal_punctuation: false,
        };
        assert_eq!(canonicalize(" GPU,  x ", &r).unwrap(), "GPU,  x");
    }

    #[test]
    fn alias_merge_removes_per_paper_duplicates() {
        let c = corpus(&[&["isosurface", "isosurfaces"], &["isosurface"]]);
        let m = AliasMap::new([("isosurface", "isosurfaces")]);
        let out = apply_alias_map(&c, &m).unwrap();
        assert_eq!(out.papers()[0].keywords, ["isosurfaces"]);
        assert_eq!(out.papers()[1].keywords, ["isosurfaces"]);
    }

    #[test]
    fn empty_alias_map_is_identity() {
        let c = corpus(&[&["a", "b"], &[]]);
        assert_eq!(apply_alias_map(&c, &AliasMap::default()).unwrap(), c);
    }

    #[test]
    fn two_hop_resolution() {
        let c = corpus(&[&["a"]]);
        let m = AliasMap::new([("a", "b"), ("b", "c")]);
        assert_eq!(apply_alias_map(&c, &m).unwrap().papers()[0].keywords, ["c"]);
        let m = AliasMap::new([("a", "b"), ("b", "c"), ("c", "c")]);
        assert_eq!(m.resolve("a"), "c");
    }

    #[test]
    fn cyclic_alias_map_reports_cycle() {
        let m = AliasMap::new([("a", "b"), ("b", "a")]);
        match apply_alias_map(&corpus(&[&["a"]]), &m).unwrap_err() {
            Error::AliasCycle(cycle) => assert_eq!(cycle, ["a", "b", "a"]),
            e => panic!("unexpected {e:?}"),
        }
        let m = AliasMap::new([("a", "b"), ("b", "c"), ("c", "d")]);
        assert!(matches!(m.validate(), Err(Error::AliasChainTooLong(_))));
    }

    #[test]
    fn alias_csv_is_canonicalized() {
        let src = "raw,canonical\nIsosurface,isosurfaces\n\" GPUs \",gpu\n";
        let m = AliasMap::from_csv(src.as_bytes(), &rules()).unwrap();
        assert_eq!(m.resolve("isosurface"), "isosurfaces");
        assert_eq!(m.resolve("gpus"), "gpu");
        assert_eq!(m.resolve("unrelated"), "unrelated");
    }

    #[test]
    fn code_map_union_and_dedupe() {
        let c = corpus(&[&["streamlines", "pathlines"]]);
        let m = CodeMap::new("c1", [("streamlines", ["flow"]), ("pathlines", ["flow"])]).unwrap();
        let (out, report) = apply_code_map(&c, &m, CodingMode::Strict).unwrap();
        assert_eq!(out.papers()[0].keywords, ["flow"]);
        assert_eq!(out.keyword_kind(), KeywordKind::Expert);
        assert!(report.dropped.is_empty());
    }

    #[test]
    fn code_map_modes() {
        let c = corpus(&[&["streamlines", "mystery"], &["mystery"]]);
        let m = CodeMap::new("c1", [("streamlines", ["flow", "vector"])]).unwrap();
        match apply_code_map(&c, &m, CodingMode::Strict).unwrap_err() {
            Error::UnmappedKeyword(k) => assert_eq!(k, "mystery"),
            e => panic!("unexpected {e:?}"),
        }
        let (out, report) = apply_code_map(&c, &m, CodingMode::Lenient).unwrap();
        assert_eq!(out.papers()[0].keywords, ["flow", "vector"]);
        assert!(out.papers()[1].keywords.is_empty());
        assert_eq!(report.dropped.get("mystery"), Some(&2));
    }

    #[test]
    fn code_csv_groups_by_coder() {
        let src = "keyword,codes,coder_id\nStreamlines,flow|vector,ann\npathlines,flow,bob\nglyphs,glyph,ann\n";
        let maps = CodeMap::read_csv(src.as_bytes(), &rules()).unwrap();
        assert_eq!(maps.len(), 2);
        assert_eq!(maps[0].coder_id(), "ann");
        assert_eq!(maps[0].codes("streamlines").unwrap().len(), 2);
        assert!(maps[1].codes("glyphs").is_none());
        let bad = "keyword,codes,coder_id\nx,|,ann\n";
        assert!(CodeMap::read_csv(bad.as_bytes(), &rules()).is_err());
        assert!(CodeMap::new("c", [("x", Vec::<String>::new())]).is_err());
    }
}
