//! Content-addressed ingest cache.
//!
//! One directory per (input bytes, ingest settings) pair under
//! `<out_dir>/cache/<key>`. A manifest records the key inputs and a digest
//! of every file so later stages can detect drift.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crprobe::config::RunConfig;
use crprobe::crgraph::{read_graph, write_graph};
use crprobe::ingest::{read_sample_set, read_sequence_set, write_sample_set, write_sequence_set};
use crprobe::{DatasetSplit, Error, GlobalGraph, Result, SampleSet, SequenceSet};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const CORPUS: &str = "corpus.crp";
pub const TRAIN: &str = "train.crp";
pub const VALID: &str = "valid.crs";
pub const TEST: &str = "test.crs";
pub const GRAPH: &str = "graph.crg";
pub const STATS: &str = "stats.json";
pub const MANIFEST: &str = "manifest.json";

const FILES: [&str; 6] = [CORPUS, TRAIN, VALID, TEST, GRAPH, STATS];

pub struct CacheKey {
    pub input_sha256: String,
    pub fingerprint: String,
    pub key: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn input_path(cfg: &RunConfig) -> Result<&Path> {
    cfg.input
        .as_deref()
        .ok_or_else(|| Error::Config("input is not set".into()))
}

pub fn read_input(cfg: &RunConfig) -> Result<Vec<u8>> {
    let path = input_path(cfg)?;
    fs::read(path).map_err(|e| Error::Data(format!("cannot read input {}: {e}", path.display())))
}

pub fn cache_key(cfg: &RunConfig, input: &[u8]) -> Result<CacheKey> {
    let input_sha256 = sha256_hex(input);
    let fingerprint = cfg.ingest_fingerprint()?;
    let mut h = Sha256::new();
    h.update(input_sha256.as_bytes());
    h.update(b"\n");
    h.update(fingerprint.as_bytes());
    let key = hex::encode(h.finalize())[..16].to_string();
    Ok(CacheKey {
        input_sha256,
        fingerprint,
        key,
    })
}

pub fn cache_root(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("cache")
}

pub struct CacheContents<'a> {
    pub corpus: &'a SequenceSet,
    pub split: &'a DatasetSplit,
    pub graph: &'a GlobalGraph,
    pub stats: &'a Value,
}

fn write_file(dir: &Path, name: &str, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(dir.join(name))?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes every cache file into a scratch directory, then moves it into
/// place.
pub fn write_cache(cfg: &RunConfig, key: &CacheKey, c: &CacheContents) -> Result<PathBuf> {
    let root = cache_root(cfg);
    fs::create_dir_all(&root)?;
    let dir = root.join(&key.key);
    let tmp = root.join(format!(".{}.tmp", key.key));
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    fs::create_dir_all(&tmp)?;
    write_file(&tmp, CORPUS, |w| write_sequence_set(w, c.corpus))?;
    write_file(&tmp, TRAIN, |w| write_sequence_set(w, &c.split.train))?;
    write_file(&tmp, VALID, |w| write_sample_set(w, &c.split.valid))?;
    write_file(&tmp, TEST, |w| write_sample_set(w, &c.split.test))?;
    write_file(&tmp, GRAPH, |w| write_graph(w, c.graph))?;
    write_file(&tmp, STATS, |w| Ok(write_json_to(w, c.stats)?))?;

    let mut digests = serde_json::Map::new();
    for name in FILES {
        digests.insert(name.into(), sha256_hex(&fs::read(tmp.join(name))?).into());
    }
    let manifest = json!({
        "schema_version": 1,
        "dataset": cfg.dataset,
        "key": key.key,
        "input": input_path(cfg)?.display().to_string(),
        "input_sha256": key.input_sha256,
        "fingerprint": key.fingerprint,
        "files": digests,
    });
    write_file(&tmp, MANIFEST, |w| Ok(write_json_to(w, &manifest)?))?;

    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::rename(&tmp, &dir)?;
    Ok(dir)
}

pub struct LoadedCache {
    pub dir: PathBuf,
    pub split: DatasetSplit,
    pub graph: GlobalGraph,
}

fn stale(msg: String) -> Error {
    Error::Cache(format!("{msg}; run `crprobe ingest` with this configuration first"))
}

/// Opens the cache matching the current input and settings, verifying the
/// manifest digests.
pub fn load_cache(cfg: &RunConfig) -> Result<LoadedCache> {
    let input = read_input(cfg)?;
    let key = cache_key(cfg, &input)?;
    let dir = cache_root(cfg).join(&key.key);
    let manifest_path = dir.join(MANIFEST);
    if !manifest_path.exists() {
        return Err(stale(format!(
            "no ingest cache for the current input and settings (expected {})",
            dir.display()
        )));
    }
    let manifest: Value = serde_json::from_slice(&fs::read(&manifest_path)?)
        .map_err(|e| stale(format!("unreadable manifest {}: {e}", manifest_path.display())))?;
    if manifest["fingerprint"] != key.fingerprint.as_str()
        || manifest["input_sha256"] != key.input_sha256.as_str()
    {
        return Err(stale(format!("cache {} was built from different settings", dir.display())));
    }
    for name in FILES {
        let bytes = fs::read(dir.join(name)).map_err(|e| stale(format!("{name}: {e}")))?;
        if manifest["files"][name] != sha256_hex(&bytes).as_str() {
            return Err(stale(format!("{name} in {} does not match its manifest", dir.display())));
        }
    }
    let open = |name: &str| -> Result<BufReader<fs::File>> {
        Ok(BufReader::new(fs::File::open(dir.join(name))?))
    };
    let train = read_sequence_set(&mut open(TRAIN)?)?;
    let valid = read_sample_set(&mut open(VALID)?)?;
    let test = read_sample_set(&mut open(TEST)?)?;
    let graph = read_graph(&mut open(GRAPH)?)?;
    if graph.n() != train.n_items() {
        return Err(stale(format!("graph in {} does not match training items", dir.display())));
    }
    check_samples(&valid, train.n_items())?;
    check_samples(&test, train.n_items())?;
    Ok(LoadedCache {
        dir,
        split: DatasetSplit { train, valid, test },
        graph,
    })
}

fn check_samples(samples: &SampleSet, n: usize) -> Result<()> {
    let bad = samples
        .iter()
        .any(|s| s.label as usize >= n || s.prefix.iter().any(|&i| i as usize >= n));
    if bad {
        return Err(stale("cached samples reference unknown items".into()));
    }
    Ok(())
}

pub fn write_json_to<W: Write>(w: &mut W, v: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    w.write_all(b"\n")
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_json_to(&mut w, v)?;
    w.flush()?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let mut text = String::new();
    fs::File::open(path)?.read_to_string(&mut text)?;
    serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}
