use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use coword_core::{
    canonicalize, keyword_trend, yearly_counts, AnalysisSnapshot, Corpus, NormalizationRules,
    Result, TrendOptions,
};

use crate::api::{
    ClusterDetail, ClusterList, ClusterSummary, KeywordDetail, KeywordHit, KeywordTrend, Meta,
    Neighbor, Page, PaperRef, Strategic, StrategicPointBody, TrendLine, YearCount,
};

struct Entry {
    keyword: String,
    folded: String,
    count: usize,
    rank: usize,
    cluster: Option<usize>,
}

/// Lookup structures over one snapshot. Built once and never mutated.
pub struct QueryIndex {
    snapshot: AnalysisSnapshot,
    corpus: Corpus,
    /// Frequency order: count descending, then keyword.
    entries: Vec<Entry>,
    by_keyword: HashMap<String, usize>,
    /// Paper indices per entry, in corpus order.
    postings: Vec<Vec<usize>>,
    /// Co-occurring entries and counts per entry.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl QueryIndex {
    /// Validates the snapshot and builds the index.
    pub fn new(snapshot: AnalysisSnapshot) -> Result<Self> {
        snapshot.validate()?;
        let corpus = snapshot.corpus()?;
        let assignment = &snapshot.assignment;
        let entries: Vec<Entry> = snapshot
            .frequency
            .entries()
            .iter()
            .map(|e| Entry {
                keyword: e.keyword.clone(),
                folded: e.keyword.to_lowercase(),
                count: e.count,
                rank: e.rank,
                cluster: assignment.label_of(&e.keyword),
            })
            .collect();
        let by_keyword: HashMap<String, usize> = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.keyword.clone(), i))
            .collect();

        let mut postings = vec![Vec::new(); entries.len()];
        let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (p, paper) in corpus.papers().iter().enumerate() {
            let mut ids: Vec<usize> = paper
                .keywords
                .iter()
                .filter_map(|k| by_keyword.get(k).copied())
                .collect();
            ids.sort_unstable();
            ids.dedup();
            for (x, &a) in ids.iter().enumerate() {
                postings[a].push(p);
                for &b in &ids[x + 1..] {
                    *pairs.entry((a, b)).or_default() += 1;
                }
            }
        }
        let mut adjacency = vec![Vec::new(); entries.len()];
        for ((a, b), c) in pairs {
            adjacency[a].push((b, c));
            adjacency[b].push((a, c));
        }

        Ok(QueryIndex {
            snapshot,
            corpus,
            entries,
            by_keyword,
            postings,
            adjacency,
        })
    }

    pub fn load(dir: &Path) -> Result<Self> {
        QueryIndex::new(AnalysisSnapshot::read_dir(dir)?)
    }

    pub fn snapshot(&self) -> &AnalysisSnapshot {
        &self.snapshot
    }

    fn hit(&self, i: usize) -> KeywordHit {
        let e = &self.entries[i];
        KeywordHit {
            keyword: e.keyword.clone(),
            count: e.count,
            cluster: e.cluster,
        }
    }

    /// Exact match first, then the canonical form of `keyword`.
    fn find(&self, keyword: &str) -> Option<usize> {
        self.by_keyword.get(keyword).copied().or_else(|| {
            let canon = canonicalize(keyword, &NormalizationRules::default()).ok()?;
            self.by_keyword.get(&canon).copied()
        })
    }

    /// The indexed spelling of `keyword`, if it is known.
    pub fn resolve(&self, keyword: &str) -> Option<&str> {
        self.find(keyword).map(|i| self.entries[i].keyword.as_str())
    }

    /// Case-insensitive substring search. Prefix matches rank first, then
    /// higher counts, then keywords in lexicographic order. An empty query
    /// lists every keyword by count.
    pub fn search(&self, q: &str, offset: usize, limit: usize) -> Page<KeywordHit> {
        let q = q.trim().to_lowercase();
        let mut hits: Vec<(bool, usize)> = self
            .entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.folded.find(&q).map(|pos| (pos != 0, i)))
            .collect();
        // Entries are already in (count desc, keyword) order, so a stable sort
        // on the prefix flag completes the ranking.
        hits.sort_by_key(|&(infix, _)| infix);
        paginate(
            hits.into_iter().map(|(_, i)| self.hit(i)).collect(),
            offset,
            limit,
        )
    }

    /// Co-occurring keywords by count, then correlation (unknown last), then
    /// keyword.
    pub fn neighbors(&self, keyword: &str) -> Option<Vec<Neighbor>> {
        let i = self.find(keyword)?;
        let corr = &self.snapshot.correlation;
        let row = corr.index_of(&self.entries[i].keyword);
        let mut out: Vec<Neighbor> = self.adjacency[i]
            .iter()
            .map(|&(j, c)| Neighbor {
                keyword: self.entries[j].keyword.clone(),
                cooccurrences: c,
                correlation: row
                    .zip(corr.index_of(&self.entries[j].keyword))
                    .map(|(a, b)| corr.get(a, b)),
            })
            .collect();
        out.sort_by(|a, b| {
            b.cooccurrences
                .cmp(&a.cooccurrences)
                .then_with(|| match (a.correlation, b.correlation) {
                    (Some(x), Some(y)) => y.total_cmp(&x),
                    (Some(_), None) => std::cmp::Ordering::Less,
                    (None, Some(_)) => std::cmp::Ordering::Greater,
                    (None, None) => std::cmp::Ordering::Equal,
                })
                .then_with(|| a.keyword.cmp(&b.keyword))
        });
        Some(out)
    }

    fn paper_ref(&self, p: usize) -> PaperRef {
        let paper = &self.corpus.papers()[p];
        PaperRef {
            id: paper.id.clone(),
            title: paper.title.clone(),
            venue: paper.venue.clone(),
            year: paper.year,
        }
    }

    /// Papers mentioning `keyword`, or every paper when `keyword` is `None`.
    pub fn papers(&self, keyword: Option<&str>) -> Option<Vec<PaperRef>> {
        match keyword {
            Some(k) => {
                let i = self.find(k)?;
                Some(
                    self.postings[i]
                        .iter()
                        .map(|&p| self.paper_ref(p))
                        .collect(),
                )
            }
            None => Some((0..self.corpus.len()).map(|p| self.paper_ref(p)).collect()),
        }
    }

    /// Yearly counts over the snapshot's trend years with a linear fit when
    /// the series supports one.
    pub fn trend(&self, keyword: &str) -> Option<KeywordTrend> {
        let i = self.find(keyword)?;
        let keyword = &self.entries[i].keyword;
        let years = self.snapshot.trend_years;
        let opts = TrendOptions {
            normalized: self.snapshot.config.trend_normalized,
            excluded: Default::default(),
        };
        let fit = keyword_trend(&self.corpus, keyword, years, &opts)
            .ok()
            .map(|f| TrendLine {
                slope: f.slope,
                stderr: f.stderr,
                p_value: f.p_value,
                significant: f.significant,
                normalized: opts.normalized,
            });
        Some(KeywordTrend {
            keyword: keyword.clone(),
            years,
            series: yearly_counts(&self.corpus, keyword, years)
                .into_iter()
                .map(|(year, count)| YearCount { year, count })
                .collect(),
            fit,
        })
    }

    pub fn detail(&self, keyword: &str) -> Option<KeywordDetail> {
        let i = self.find(keyword)?;
        let e = &self.entries[i];
        Some(KeywordDetail {
            keyword: e.keyword.clone(),
            count: e.count,
            rank: e.rank,
            cluster: e.cluster,
            neighbors: self.neighbors(&e.keyword)?,
            papers: self.papers(Some(&e.keyword))?,
            trend: self.trend(&e.keyword)?,
        })
    }

    fn summary(&self, id: usize) -> Option<ClusterSummary> {
        let m = self.snapshot.metrics.iter().find(|m| m.cluster == id)?;
        let p = self
            .snapshot
            .strategic
            .points
            .iter()
            .find(|p| p.cluster == id)?;
        Some(ClusterSummary {
            id,
            n: m.n,
            label: m.members.iter().take(2).cloned().collect(),
            median_freq: m.median_freq,
            cw_freq: m.cw_freq,
            density: m.density,
            centrality: m.centrality,
            quadrant: p.quadrant.to_string(),
            theme: p.quadrant.description().to_owned(),
        })
    }

    pub fn clusters(&self) -> ClusterList {
        ClusterList {
            k: self.snapshot.assignment.k(),
            clusters: self
                .snapshot
                .metrics
                .iter()
                .filter_map(|m| self.summary(m.cluster))
                .collect(),
        }
    }

    pub fn cluster(&self, id: usize) -> Option<ClusterDetail> {
        let summary = self.summary(id)?;
        let m = self.snapshot.metrics.iter().find(|m| m.cluster == id)?;
        let members = m
            .members
            .iter()
            .filter_map(|k| self.by_keyword.get(k).map(|&i| self.hit(i)))
            .collect();
        Some(ClusterDetail { summary, members })
    }

    pub fn strategic(&self) -> Strategic {
        let sd = &self.snapshot.strategic;
        Strategic {
            median_centrality: sd.median_centrality,
            median_density: sd.median_density,
            points: sd
                .points
                .iter()
                .map(|p| StrategicPointBody {
                    cluster: p.cluster,
                    centrality: p.x,
                    density: p.y,
                    quadrant: p.quadrant.to_string(),
                    theme: p.quadrant.description().to_owned(),
                    margin_centrality: p.margin.0,
                    margin_density: p.margin.1,
                    label: self
                        .snapshot
                        .metrics
                        .iter()
                        .find(|m| m.cluster == p.cluster)
                        .map(|m| m.members.iter().take(2).cloned().collect())
                        .unwrap_or_default(),
                })
                .collect(),
        }
    }

    pub fn meta(&self) -> Meta {
        let s = &self.snapshot;
        Meta {
            snapshot_version: s.snapshot_version,
            provenance: s.provenance.clone(),
            keyword_kind: s.keyword_kind,
            digest: s.digest,
            config: s.config.clone(),
            retained_keywords: s.keywords().len(),
            clusters: s.assignment.k(),
            trend_years: s.trend_years,
            powerlaw: s.powerlaw,
        }
    }
}

pub fn paginate<T>(items: Vec<T>, offset: usize, limit: usize) -> Page<T> {
    let total = items.len();
    Page {
        total,
        offset,
        limit,
        items: items.into_iter().skip(offset).take(limit).collect(),
    }
}
