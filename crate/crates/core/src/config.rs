//! Run configuration: a `key = value` text file plus overrides.
//!
//! Grammar: one `key = value` pair per line; blank lines and lines starting
//! with `#` are ignored; later assignments win. Unknown keys are errors.

use std::path::PathBuf;

use crate::analysis::CountingMode;
use crate::crgraph::{PercentBase, DEFAULT_CLIQUE_CAP, DEFAULT_MAX_HOP};
use crate::eval::{DEFAULT_K, DEFAULT_MIN_SLICE_SAMPLES};
use crate::ingest::{ColumnMapping, Column, DatasetPreset, Grouping, SplitRatios};
use crate::recommenders::{BprConfig, SknnConfig, DEFAULT_ITEM_NEIGHBORS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    ItemKnn,
    Sknn,
    BprMf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::ItemKnn, ModelKind::Sknn, ModelKind::BprMf];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ItemKnn => "item-knn",
            ModelKind::Sknn => "sknn",
            ModelKind::BprMf => "bpr-mf",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: String,
    pub input: Option<PathBuf>,
    pub session_col: Option<String>,
    pub item_col: Option<String>,
    pub time_col: Option<String>,
    pub grouping: Option<Grouping>,
    pub min_item_freq: u64,
    pub min_len: usize,
    pub split: SplitRatios,
    pub max_hop: usize,
    pub k: usize,
    pub models: Vec<ModelKind>,
    pub item_knn_neighbors: usize,
    pub sknn: SknnConfig,
    pub bpr: BprConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// 0 means one worker per core.
    pub workers: usize,
    pub clique_cap: usize,
    pub min_slice_samples: u64,
    pub percent_base: PercentBase,
    pub counting_mode: CountingMode,
    pub persist_records: bool,
    pub max_bad_line_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: "dataset".into(),
            input: None,
            session_col: None,
            item_col: None,
            time_col: None,
            grouping: None,
            min_item_freq: 5,
            min_len: 2,
            split: SplitRatios::default(),
            max_hop: DEFAULT_MAX_HOP,
            k: DEFAULT_K,
            models: ModelKind::ALL.to_vec(),
            item_knn_neighbors: DEFAULT_ITEM_NEIGHBORS,
            sknn: SknnConfig::default(),
            bpr: BprConfig::default(),
            out_dir: PathBuf::from("out"),
            seed: 0,
            workers: 0,
            clique_cap: DEFAULT_CLIQUE_CAP,
            min_slice_samples: DEFAULT_MIN_SLICE_SAMPLES,
            percent_base: PercentBase::default(),
            counting_mode: CountingMode::default(),
            persist_records: false,
            max_bad_line_fraction: 0.1,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", no + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dataset" => self.dataset = value.to_string(),
            "input" => self.input = Some(PathBuf::from(value)),
            "session_col" => self.session_col = Some(value.to_string()),
            "item_col" => self.item_col = Some(value.to_string()),
            "time_col" => self.time_col = Some(value.to_string()),
            "grouping" => self.grouping = Some(value.parse()?),
            "min_item_freq" => self.min_item_freq = num(key, value)?,
            "min_len" => self.min_len = num(key, value)?,
            "split" => self.split = value.parse()?,
            "max_hop" => self.max_hop = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "models" => {
                self.models = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "item_knn.neighbors" => self.item_knn_neighbors = num(key, value)?,
            "sknn.k" => self.sknn.k_neighbors = num(key, value)?,
            "sknn.m_recent" => self.sknn.m_recent = num(key, value)?,
            "bpr.dim" => self.bpr.dim = num(key, value)?,
            "bpr.lr" => self.bpr.learning_rate = num(key, value)?,
            "bpr.l2" => self.bpr.l2 = num(key, value)?,
            "bpr.epochs" => self.bpr.epochs = num(key, value)?,
            "bpr.negatives" => self.bpr.negatives = num(key, value)?,
            "bpr.init_std" => self.bpr.init_std = num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => self.seed = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "clique_cap" => self.clique_cap = num(key, value)?,
            "min_slice_samples" => self.min_slice_samples = num(key, value)?,
            "percent_base" => self.percent_base = value.parse()?,
            "counting_mode" => self.counting_mode = value.parse()?,
            "persist_records" => self.persist_records = flag(key, value)?,
            "max_bad_line_fraction" => self.max_bad_line_fraction = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.max_hop < 1 {
            return fail("max_hop must be at least 1");
        }
        if self.k < 1 {
            return fail("k must be at least 1");
        }
        if self.min_item_freq < 1 {
            return fail("min_item_freq must be at least 1");
        }
        if self.min_len < 2 {
            return fail("min_len must be at least 2");
        }
        if self.item_knn_neighbors < 1 {
            return fail("item_knn.neighbors must be at least 1");
        }
        if self.sknn.k_neighbors < 1 || self.sknn.m_recent < 1 {
            return fail("sknn.k and sknn.m_recent must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.max_bad_line_fraction) {
            return fail("max_bad_line_fraction must lie in [0, 1]");
        }
        if self.dataset.is_empty() || self.dataset.contains(['/', '\\']) {
            return fail("dataset must be a plain name");
        }
        Ok(())
    }

    pub fn preset(&self) -> Option<&'static DatasetPreset> {
        DatasetPreset::find(&self.dataset)
    }

    /// Explicit columns override the dataset preset; without a preset every
    /// column must be given.
    pub fn column_mapping(&self) -> Result<ColumnMapping> {
        let preset = self.preset();
        let pick = |explicit: &Option<String>, from_preset: Option<&str>, key: &str| {
            explicit
                .as_deref()
                .or(from_preset)
                .map(Column::parse)
                .ok_or_else(|| Error::Config(format!("{key} not set and no preset for this dataset")))
        };
        Ok(ColumnMapping {
            session: pick(&self.session_col, preset.map(|p| p.session_col), "session_col")?,
            item: pick(&self.item_col, preset.map(|p| p.item_col), "item_col")?,
            timestamp: pick(&self.time_col, preset.map(|p| p.time_col), "time_col")?,
        })
    }

    pub fn grouping(&self) -> Grouping {
        self.grouping
            .or(self.preset().map(|p| p.grouping))
            .unwrap_or_default()
    }

    /// Canonical text of every setting that affects ingestion output.
    pub fn ingest_fingerprint(&self) -> Result<String> {
        let m = self.column_mapping()?;
        let col = |c: &Column| match c {
            Column::Name(n) => format!("name:{n}"),
            Column::Index(i) => format!("index:{i}"),
        };
        Ok(format!(
            "dataset={}\nsession={}\nitem={}\ntime={}\ngrouping={:?}\nmin_item_freq={}\nmin_len={}\nsplit={}\n",
            self.dataset,
            col(&m.session),
            col(&m.item),
            col(&m.timestamp),
            self.grouping(),
            self.min_item_freq,
            self.min_len,
            self.split,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_keys() {
        let cfg = RunConfig::parse(
            "# toy run\n\
             dataset = diginetica\n\
             input = data/dg.tsv\n\
             max_hop = 5\n\
             models = item-knn, sknn\n\
             bpr.dim = 64\n\
             persist_records = true\n",
        )
        .unwrap();
        assert_eq!(cfg.max_hop, 5);
        assert_eq!(cfg.models, vec![ModelKind::ItemKnn, ModelKind::Sknn]);
        assert_eq!(cfg.bpr.dim, 64);
        assert!(cfg.persist_records);
        assert_eq!(cfg.grouping(), Grouping::Session);
        assert_eq!(
            cfg.column_mapping().unwrap(),
            ColumnMapping::by_name("sessionId", "itemId", "timestamp")
        );
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(RunConfig::parse("colour = red\n").is_err());
        assert!(RunConfig::parse("max_hop = 0\n").is_err());
        assert!(RunConfig::parse("k = ten\n").is_err());
        assert!(RunConfig::parse("just words\n").is_err());
        assert!(RunConfig::parse("models = gru4rec\n").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::parse("k = 10\n").unwrap();
        cfg.apply_override("k=20").unwrap();
        assert_eq!(cfg.k, 20);
        assert!(cfg.apply_override("k").is_err());
    }

    #[test]
    fn custom_dataset_needs_columns() {
        let mut cfg = RunConfig::parse("dataset = toy\n").unwrap();
        assert!(cfg.column_mapping().is_err());
        cfg.set("session_col", "0").unwrap();
        cfg.set("item_col", "item").unwrap();
        cfg.set("time_col", "2").unwrap();
        let m = cfg.column_mapping().unwrap();
        assert_eq!(m.session, Column::Index(0));
        assert_eq!(m.item, Column::Name("item".into()));
    }

    #[test]
    fn fingerprint_tracks_ingest_settings_only() {
        let base = "dataset = tmall\n";
        let a = RunConfig::parse(base).unwrap();
        let mut b = a.clone();
        b.k = 50;
        assert_eq!(a.ingest_fingerprint().unwrap(), b.ingest_fingerprint().unwrap());
        b.min_item_freq = 3;
        assert_ne!(a.ingest_fingerprint().unwrap(), b.ingest_fingerprint().unwrap());
    }
}
