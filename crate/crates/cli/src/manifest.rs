//! The `grid` subcommand: orchestrate an experiment grid from a JSON
//! manifest and emit every grid statistic in one pass.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;
use serde_json::{json, Value};

use guessmetrics::corpus::{load_plaintext_opts, CorpusFormat, IngestOptions};
use guessmetrics::features::{feature_vector, FeatureConfig, Weighting};
use guessmetrics::guessers::{generate_identity, train_identity};
use guessmetrics::metrics::{cosine, generalized_jaccard};
use guessmetrics::stats::{
    guessing_similarity, pearson, success_tensor, successful_guessing_similarity,
    training_similarity, Denominator, ExperimentGrid, GuessListSource, ListMetric,
};

use crate::report::{checksum_files, float_cell, CsvTable, Report};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub cutoff: u64,
    #[serde(default = "default_l_max")]
    pub l_max: u32,
    #[serde(default = "default_denominator")]
    pub denominator: Denominator,
    pub datasets: Vec<DatasetSpec>,
    pub guessers: Vec<GuesserSpec>,
}

fn default_l_max() -> u32 {
    64
}

fn default_denominator() -> Denominator {
    Denominator::Total
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub label: String,
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: ManifestFormat,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifestFormat {
    Raw,
    Counted,
}

fn default_format() -> ManifestFormat {
    ManifestFormat::Raw
}

impl From<ManifestFormat> for CorpusFormat {
    fn from(f: ManifestFormat) -> CorpusFormat {
        match f {
            ManifestFormat::Raw => CorpusFormat::RawLines,
            ManifestFormat::Counted => CorpusFormat::Counted,
        }
    }
}

/// A guesser is either the built-in Identity guesser (lists generated from
/// each training dataset) or an imported one with a list file per training
/// dataset label.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GuesserSpec {
    Identity { label: String },
    Import { label: String, lists: BTreeMap<String, PathBuf> },
}

impl GuesserSpec {
    fn label(&self) -> &str {
        match self {
            GuesserSpec::Identity { label } | GuesserSpec::Import { label, .. } => label,
        }
    }
}

fn edge(a: &str, b: &str, weight: f64) -> Value {
    json!({ "source": a, "target": b, "weight": weight })
}

pub fn run_grid(manifest_path: &Path, config: Value) -> Result<Report> {
    let text = std::fs::read_to_string(manifest_path)
        .with_context(|| format!("{}", manifest_path.display()))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| guessmetrics::Error::Config(format!("manifest: {e}")))?;
    if manifest.datasets.len() < 2 {
        anyhow::bail!(guessmetrics::Error::Config(
            "grid statistics need at least two datasets".into()
        ));
    }
    if manifest.guessers.is_empty() {
        anyhow::bail!(guessmetrics::Error::Config("grid needs at least one guesser".into()));
    }

    // Checksums cover the manifest and every file it references, in manifest order.
    let mut input_paths = vec![manifest_path.to_path_buf()];
    input_paths.extend(manifest.datasets.iter().map(|d| d.path.clone()));
    for guesser in &manifest.guessers {
        if let GuesserSpec::Import { lists, .. } = guesser {
            input_paths.extend(lists.values().cloned());
        }
    }
    let inputs = checksum_files(input_paths.iter())?;

    let feature_config = FeatureConfig { l_max: manifest.l_max };
    let mut grid = ExperimentGrid::new(manifest.cutoff).with_feature_config(feature_config);

    let mut dataset_index: BTreeMap<&str, usize> = BTreeMap::new();
    for spec in &manifest.datasets {
        eprintln!("loading dataset {} from {}", spec.label, spec.path.display());
        let opts = IngestOptions { label: Some(spec.label.clone()), mem_limit: None };
        let ingest = load_plaintext_opts(&spec.path, spec.format.into(), &opts)?;
        if ingest.multiset.is_empty() {
            anyhow::bail!(guessmetrics::Error::Domain(format!(
                "dataset {} is empty",
                spec.label
            )));
        }
        let idx = grid.add_dataset(ingest.multiset);
        if dataset_index.insert(&spec.label, idx).is_some() {
            anyhow::bail!(guessmetrics::Error::Config(format!(
                "duplicate dataset label {:?}",
                spec.label
            )));
        }
    }

    for spec in &manifest.guessers {
        let gi = grid.add_guesser(spec.label());
        match spec {
            GuesserSpec::Identity { label } => {
                for j in 0..manifest.datasets.len() {
                    eprintln!("training {label} on {}", grid.datasets()[j].label());
                    let model = train_identity(&grid.datasets()[j])?;
                    let list = generate_identity(&model, manifest.cutoff)?;
                    grid.set_list(gi, j, GuessListSource::Memory(list));
                }
            }
            GuesserSpec::Import { label, lists } => {
                for (training_label, path) in lists {
                    let &j = dataset_index.get(training_label.as_str()).ok_or_else(|| {
                        guessmetrics::Error::UnknownLabel(format!(
                            "guesser {label} references unknown dataset {training_label:?}"
                        ))
                    })?;
                    grid.set_list(
                        gi,
                        j,
                        GuessListSource::File { path: path.clone(), dedupe: true },
                    );
                }
            }
        }
    }

    let m = manifest.guessers.len();
    let n = manifest.datasets.len();
    let guesser_labels: Vec<&str> = manifest.guessers.iter().map(|g| g.label()).collect();
    let dataset_labels: Vec<String> =
        grid.datasets().iter().map(|d| d.label().to_string()).collect();

    eprintln!("computing success tensor ({m} guessers x {n} datasets)");
    let tensor = success_tensor(&grid, manifest.denominator)?;

    let mut csv_rows: Vec<Vec<String>> = Vec::new();
    let mut push_row = |section: &str, a: &str, b: &str, c: &str, v: f64| {
        csv_rows.push(vec![section.into(), a.into(), b.into(), c.into(), float_cell(v)]);
    };

    let mut success_rates = Vec::new();
    for (i, guesser) in guesser_labels.iter().enumerate() {
        for j in 0..n {
            for k in 0..n {
                if let Some(rate) = tensor.get(i, j, k) {
                    success_rates.push(json!({
                        "guesser": guesser,
                        "training": dataset_labels[j],
                        "target": dataset_labels[k],
                        "rate": rate,
                    }));
                    push_row(
                        "success_rate",
                        guesser,
                        &dataset_labels[j],
                        &dataset_labels[k],
                        rate,
                    );
                }
            }
        }
    }

    let mut mean_guesser = Vec::new();
    for (i, label) in guesser_labels.iter().enumerate() {
        let rate = tensor.mean_guesser_success(i)?;
        mean_guesser.push(json!({ "guesser": label, "rate": rate }));
        push_row("mean_guesser_success", label, "", "", rate);
    }
    let mut mean_training = Vec::new();
    for (j, label) in dataset_labels.iter().enumerate() {
        let rate = tensor.mean_training_success(j)?;
        mean_training.push(json!({ "training": label, "rate": rate }));
        push_row("mean_training_success", label, "", "", rate);
    }
    let mut mean_pair = Vec::new();
    for (i, guesser) in guesser_labels.iter().enumerate() {
        for (j, training) in dataset_labels.iter().enumerate() {
            let rate = tensor.mean_pair_success(i, j)?;
            mean_pair.push(json!({
                "guesser": guesser,
                "training": training,
                "rate": rate,
            }));
            push_row("mean_pair_success", guesser, training, "", rate);
        }
    }

    // Pairwise dataset similarity (cosine over by-occurrence features, and
    // generalized Jaccard), emitted as graph edges.
    eprintln!("computing dataset similarities");
    let dataset_vectors = grid
        .datasets()
        .iter()
        .map(|d| feature_vector(d, Weighting::ByOccurrence, &feature_config))
        .collect::<guessmetrics::Result<Vec<_>>>()?;
    let mut ds_cosine = Vec::new();
    let mut ds_gj = Vec::new();
    for j1 in 0..n {
        for j2 in (j1 + 1)..n {
            let c = cosine(&dataset_vectors[j1], &dataset_vectors[j2])?.value;
            let g = generalized_jaccard(&grid.datasets()[j1], &grid.datasets()[j2])?.value;
            ds_cosine.push(edge(&dataset_labels[j1], &dataset_labels[j2], c));
            ds_gj.push(edge(&dataset_labels[j1], &dataset_labels[j2], g));
            push_row("dataset_similarity_cosine", &dataset_labels[j1], &dataset_labels[j2], "", c);
            push_row("dataset_similarity_gjaccard", &dataset_labels[j1], &dataset_labels[j2], "", g);
        }
    }

    eprintln!("computing guessing similarities");
    let mut guessing_cosine = Vec::new();
    let mut guessing_jaccard = Vec::new();
    let mut successful = Vec::new();
    for i1 in 0..m {
        for i2 in (i1 + 1)..m {
            let c = guessing_similarity(&grid, i1, i2, ListMetric::Cosine)?;
            let j = guessing_similarity(&grid, i1, i2, ListMetric::Jaccard)?;
            guessing_cosine.push(edge(guesser_labels[i1], guesser_labels[i2], c));
            guessing_jaccard.push(edge(guesser_labels[i1], guesser_labels[i2], j));
            push_row("guessing_similarity_cosine", guesser_labels[i1], guesser_labels[i2], "", c);
            push_row("guessing_similarity_jaccard", guesser_labels[i1], guesser_labels[i2], "", j);
            let sg = successful_guessing_similarity(&grid, i1, i2)?;
            successful.push(json!({
                "source": guesser_labels[i1],
                "target": guesser_labels[i2],
                "weight": sg.value,
                "skipped_terms": sg.skipped_terms,
            }));
            push_row(
                "successful_guessing_similarity",
                guesser_labels[i1],
                guesser_labels[i2],
                "",
                sg.value,
            );
        }
    }

    eprintln!("computing training similarities");
    let mut training_cosine = Vec::new();
    let mut training_jaccard = Vec::new();
    for j1 in 0..n {
        for j2 in (j1 + 1)..n {
            let c = training_similarity(&grid, j1, j2, ListMetric::Cosine)?;
            let j = training_similarity(&grid, j1, j2, ListMetric::Jaccard)?;
            training_cosine.push(edge(&dataset_labels[j1], &dataset_labels[j2], c));
            training_jaccard.push(edge(&dataset_labels[j1], &dataset_labels[j2], j));
            push_row("training_similarity_cosine", &dataset_labels[j1], &dataset_labels[j2], "", c);
            push_row("training_similarity_jaccard", &dataset_labels[j1], &dataset_labels[j2], "", j);
        }
    }

    // Correlation between dataset-pair similarity and mean success over
    // guessers, across ordered (training, target) pairs.
    let mut sim_cosine = Vec::new();
    let mut sim_gj = Vec::new();
    let mut mean_success = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            sim_cosine.push(cosine(&dataset_vectors[j], &dataset_vectors[k])?.value);
            sim_gj.push(generalized_jaccard(&grid.datasets()[j], &grid.datasets()[k])?.value);
            let mut sum = 0.0;
            for i in 0..m {
                sum += tensor.get(i, j, k).unwrap_or(0.0);
            }
            mean_success.push(sum / m as f64);
        }
    }
    let correlation = |x: &[f64]| -> Value {
        match pearson(x, &mean_success) {
            Ok((r, p)) => json!({ "r": r, "p": p }),
            Err(_) => Value::Null,
        }
    };

    let payload = json!({
        "cutoff": manifest.cutoff,
        "l_max": manifest.l_max,
        "denominator": manifest.denominator,
        "dataset_weighting": "by-occurrence",
        "guessers": guesser_labels,
        "datasets": grid
            .datasets()
            .iter()
            .map(|d| {
                let s = d.summary().expect("datasets validated nonempty");
                json!({ "label": d.label(), "total": s.total, "unique": s.unique, "ratio": s.ratio })
            })
            .collect::<Vec<_>>(),
        "success_rates": success_rates,
        "mean_guesser_success": mean_guesser,
        "mean_training_success": mean_training,
        "mean_pair_success": mean_pair,
        "dataset_similarity": { "cosine": ds_cosine, "generalized_jaccard": ds_gj },
        "guessing_similarity": { "cosine": guessing_cosine, "jaccard": guessing_jaccard },
        "successful_guessing_similarity": successful,
        "training_similarity": { "cosine": training_cosine, "jaccard": training_jaccard },
        "similarity_success_correlation": {
            "cosine": correlation(&sim_cosine),
            "generalized_jaccard": correlation(&sim_gj),
        },
    });
    let csv = CsvTable {
        headers: vec!["section".into(), "a".into(), "b".into(), "c".into(), "value".into()],
        rows: csv_rows,
    };
    Ok(Report { config, inputs, payload, csv: Some(csv) })
}
