use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crprobe::analysis::{
    direct_indirect_partition, label_cr_records, prediction_cr_proportions, pure_partition,
    read_prediction_file, write_prediction_file, write_records_tsv, PredictionSet, SlicePartition,
};
use crprobe::config::{ModelKind, RunConfig};
use crprobe::crgraph::{build_global_graph_with_cap, cooc_frequency_histogram, pair_class_histogram};
use crprobe::eval::{compare_reports, evaluate_slices, EvalOptions, MetricsReport, OVERALL};
use crprobe::ingest::{build_sequences, dataset_stats, parse_events, preprocess, split_chronological};
use crprobe::recommenders::{predict_all, train_bpr_mf, train_item_knn, train_sknn};
use crprobe::{BprMf, Error, ItemKnn, Result, Sknn};
use log::info;
use serde_json::json;

use crate::cache::{self, CacheContents, LoadedCache};

fn dataset_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join(&cfg.dataset)
}

fn ensure_dir(p: &Path) -> Result<()> {
    fs::create_dir_all(p)?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

pub fn ingest(cfg: &RunConfig) -> Result<PathBuf> {
    let input = cache::read_input(cfg)?;
    let key = cache::cache_key(cfg, &input)?;
    let parsed = parse_events(&input[..], &cfg.column_mapping()?)?;
    for e in parsed.errors.iter().take(5) {
        log::warn!("input line {}: {}", e.line, e.reason);
    }
    if parsed.errors.len() > 5 {
        log::warn!("{} more malformed input lines", parsed.errors.len() - 5);
    }
    let raw = build_sequences(&parsed.events, cfg.grouping())?;
    let corpus = preprocess(&raw, cfg.min_item_freq, cfg.min_len)?;
    let split = split_chronological(&corpus, cfg.split)?;
    let graph = build_global_graph_with_cap(&split.train, cfg.clique_cap);

    let mut stats = dataset_stats(&corpus).to_json();
    stats["dataset"] = cfg.dataset.clone().into();
    stats["events"] = parsed.events.len().into();
    stats["malformed_rows"] = parsed.errors.len().into();
    stats["raw_sequences"] = raw.len().into();
    stats["split"] = json!({
        "ratios": cfg.split.to_string(),
        "train_sequences": split.train.len(),
        "train_items": split.train.n_items(),
        "valid_samples": split.valid.len(),
        "test_samples": split.test.len(),
    });
    stats["graph"] = json!({"nodes": graph.n(), "edges": graph.n_edges()});

    let dir = cache::write_cache(
        cfg,
        &key,
        &CacheContents {
            corpus: &corpus,
            split: &split,
            graph: &graph,
            stats: &stats,
        },
    )?;
    let out = dataset_dir(cfg);
    ensure_dir(&out)?;
    cache::write_json(&out.join("stats.json"), &stats)?;
    info!("ingest cache written to {}", dir.display());
    println!(
        "{}: {} items, {} interactions, {} sequences, avg length {}",
        cfg.dataset,
        stats["items"],
        stats["interactions"],
        stats["sequences"],
        dataset_stats(&corpus).avg_length_2dp()
    );
    println!("cache: {}", dir.display());
    Ok(dir)
}

struct Partitions {
    pure: SlicePartition,
    direct: SlicePartition,
}

fn partitions(c: &LoadedCache, max_hop: usize) -> Result<(crprobe::analysis::LabelCrAnalysis, Partitions)> {
    let analysis = label_cr_records(&c.graph, &c.split.test, max_hop)?;
    let parts = Partitions {
        pure: pure_partition(&analysis.records),
        direct: direct_indirect_partition(&analysis.records),
    };
    Ok((analysis, parts))
}

pub fn analyze(cfg: &RunConfig) -> Result<PathBuf> {
    let c = cache::load_cache(cfg)?;
    let out = dataset_dir(cfg).join("analysis");
    ensure_dir(&out)?;

    let hist = pair_class_histogram(&c.graph, cfg.max_hop);
    cache::write_json(&out.join("pair_histogram.json"), &hist.to_json(cfg.percent_base))?;
    cache::write_json(
        &out.join("cooc_histogram.json"),
        &cooc_frequency_histogram(&c.graph).to_json(),
    )?;

    let (analysis, parts) = partitions(&c, cfg.max_hop)?;
    cache::write_json(&out.join("label_cr.json"), &analysis.distribution.to_json())?;
    let mut pure = parts.pure.to_json();
    pure["test_samples"] = c.split.test.len().into();
    cache::write_json(&out.join("pure_partition.json"), &pure)?;
    let mut direct = parts.direct.to_json();
    direct["test_samples"] = c.split.test.len().into();
    cache::write_json(&out.join("direct_indirect.json"), &direct)?;
    if cfg.persist_records {
        let mut w = BufWriter::new(fs::File::create(out.join("label_cr_records.tsv"))?);
        write_records_tsv(&mut w, &analysis.records)?;
        w.flush()?;
    }
    println!("analysis written to {}", out.display());
    Ok(out)
}

fn eval_options(cfg: &RunConfig, model: &str) -> EvalOptions {
    EvalOptions {
        k: cfg.k,
        min_slice_samples: cfg.min_slice_samples,
        model: model.to_string(),
        dataset: cfg.dataset.clone(),
    }
}

/// Writes the sliced metrics report and the prediction CR proportions.
fn write_evaluation(
    cfg: &RunConfig,
    c: &LoadedCache,
    parts: &Partitions,
    preds: &PredictionSet,
    name: &str,
    out: &Path,
) -> Result<MetricsReport> {
    let report = evaluate_slices(
        preds,
        &c.split.test,
        &[&parts.pure, &parts.direct],
        &eval_options(cfg, name),
    );
    cache::write_json(&out.join("metrics.json"), &serde_json::to_value(&report)?)?;
    write_text(&out.join("metrics.txt"), &report.to_table())?;
    let props = prediction_cr_proportions(&c.graph, preds, &c.split.test, cfg.max_hop, cfg.counting_mode)?;
    cache::write_json(&out.join("proportions.json"), &props.to_json())?;
    Ok(report)
}

fn train_and_predict(cfg: &RunConfig, c: &LoadedCache, kind: ModelKind, out: &Path) -> Result<PredictionSet> {
    let train = &c.split.train;
    let test = &c.split.test;
    let model_path = out.join("model.bin");
    let mut w = BufWriter::new(fs::File::create(&model_path)?);
    let preds = match kind {
        ModelKind::ItemKnn => {
            let m: ItemKnn = train_item_knn(train, cfg.item_knn_neighbors);
            m.write(&mut w)?;
            predict_all(&m, test, cfg.k)?
        }
        ModelKind::Sknn => {
            let m: Sknn = train_sknn(train, cfg.sknn)?;
            m.write(&mut w)?;
            predict_all(&m, test, cfg.k)?
        }
        ModelKind::BprMf => {
            let t = train_bpr_mf::<f32>(train, &cfg.bpr, cfg.seed)?;
            let m: BprMf = t.model;
            m.write(&mut w)?;
            cache::write_json(
                &out.join("training.json"),
                &json!({"schema_version": 1, "seed": cfg.seed, "epoch_losses": t.epoch_losses}),
            )?;
            predict_all(&m, test, cfg.k)?
        }
    };
    w.flush()?;
    Ok(preds)
}

pub fn run_models(cfg: &RunConfig, models: &[ModelKind]) -> Result<Vec<MetricsReport>> {
    let c = cache::load_cache(cfg)?;
    if cfg.k > c.split.train.n_items() {
        return Err(Error::Config(format!(
            "k = {} exceeds the {} training items",
            cfg.k,
            c.split.train.n_items()
        )));
    }
    let (_, parts) = partitions(&c, cfg.max_hop)?;
    let mut reports = Vec::new();
    for &kind in models {
        let out = dataset_dir(cfg).join("models").join(kind.name());
        ensure_dir(&out)?;
        info!("training {}", kind.name());
        let preds = train_and_predict(cfg, &c, kind, &out)?;
        let mut w = BufWriter::new(fs::File::create(out.join("predictions.tsv"))?);
        write_prediction_file(&mut w, &preds, &c.split.train.vocab)?;
        w.flush()?;
        let report = write_evaluation(cfg, &c, &parts, &preds, kind.name(), &out)?;
        print!("{}", report.to_table());
        reports.push(report);
    }
    Ok(reports)
}

pub fn audit_predictions(cfg: &RunConfig, file: &Path, name: &str) -> Result<PathBuf> {
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(Error::Config("audit name must be a plain name".into()));
    }
    let c = cache::load_cache(cfg)?;
    let reader = BufReader::new(
        fs::File::open(file)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", file.display())))?,
    );
    let (preds, parse) = read_prediction_file(reader, &c.split.train.vocab, cfg.k)?;
    let out = dataset_dir(cfg).join("audit").join(name);
    ensure_dir(&out)?;
    let mut parse_json = serde_json::to_value(&parse)?;
    parse_json["schema_version"] = 1.into();
    parse_json["error_rate"] = parse.error_rate().into();
    cache::write_json(&out.join("parse_report.json"), &parse_json)?;
    if parse.error_rate() > cfg.max_bad_line_fraction {
        return Err(Error::Data(format!(
            "{} of {} prediction lines are malformed (limit {})",
            parse.errors.len(),
            parse.lines,
            cfg.max_bad_line_fraction
        )));
    }
    if !parse.errors.is_empty() {
        log::warn!("{} malformed prediction lines skipped", parse.errors.len());
    }
    let (_, parts) = partitions(&c, cfg.max_hop)?;
    let report = write_evaluation(cfg, &c, &parts, &preds, name, &out)?;
    print!("{}", report.to_table());
    Ok(out)
}

pub fn compare(files: &[PathBuf], out: &Path) -> Result<()> {
    let reports = files
        .iter()
        .map(|f| {
            serde_json::from_value::<MetricsReport>(cache::read_json(f)?)
                .map_err(|e| Error::Data(format!("{}: {e}", f.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some((f, _)) = files.iter().zip(&reports).find(|(_, r)| r.slice(OVERALL).is_none()) {
        return Err(Error::Data(format!("{}: no overall slice", f.display())));
    }
    let cmp = compare_reports(&reports).map_err(Error::Data)?;
    ensure_dir(out)?;
    cache::write_json(&out.join("comparison.json"), &serde_json::to_value(&cmp)?)?;
    let table = cmp.to_table();
    write_text(&out.join("comparison.txt"), &table)?;
    print!("{table}");
    Ok(())
}
