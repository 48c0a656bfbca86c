//! One handler per subcommand. Each returns a [`Report`] ready for emission.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};

use guessmetrics::combo::{self, EvalTarget};
use guessmetrics::corpus::{self, CorpusFormat, Ingest, IngestOptions, PasswordMultiset};
use guessmetrics::features::{feature_vector, FeatureConfig, Weighting};
use guessmetrics::guessers::{generate_identity, import_guess_list, train_identity, GuessList};
use guessmetrics::hashed::{
    hashed_generalized_jaccard, hashed_success_rate, HashAlgorithm, HashScheme, HashedTarget,
    SaltPlacement,
};
use guessmetrics::metrics::{cosine, generalized_jaccard, jaccard, Metric};
use guessmetrics::stats::{success_rate_with, Denominator};

use crate::report::{checksum_files, float_cell, CsvTable, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    /// One password per line.
    Raw,
    /// `<count>\t<password>` per line.
    Counted,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> CorpusFormat {
        match f {
            FormatArg::Raw => CorpusFormat::RawLines,
            FormatArg::Counted => CorpusFormat::Counted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingArg {
    ByOccurrence,
    ByUnique,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Weighting {
        match w {
            WeightingArg::ByOccurrence => Weighting::ByOccurrence,
            WeightingArg::ByUnique => Weighting::ByUnique,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashArg {
    Sha1,
    Md5,
    Sha256,
    IdentityDebug,
}

impl From<HashArg> for HashAlgorithm {
    fn from(h: HashArg) -> HashAlgorithm {
        match h {
            HashArg::Sha1 => HashAlgorithm::Sha1,
            HashArg::Md5 => HashAlgorithm::Md5,
            HashArg::Sha256 => HashAlgorithm::Sha256,
            HashArg::IdentityDebug => HashAlgorithm::IdentityDebug,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementArg {
    Append,
    Prepend,
}

impl From<PlacementArg> for SaltPlacement {
    fn from(p: PlacementArg) -> SaltPlacement {
        match p {
            PlacementArg::Append => SaltPlacement::Append,
            PlacementArg::Prepend => SaltPlacement::Prepend,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct HashFlags {
    /// Hash algorithm of the target dump.
    #[arg(long = "hash", value_enum)]
    pub hash: HashArg,
    /// Where the per-entry salt goes relative to the password.
    #[arg(long, value_enum, default_value_t = PlacementArg::Append)]
    pub salt_placement: PlacementArg,
    /// Interpret the salt field as hex bytes instead of percent-encoded text.
    #[arg(long)]
    pub salt_hex: bool,
}

impl HashFlags {
    fn scheme(&self) -> HashScheme {
        HashScheme { algorithm: self.hash.into(), salt_placement: self.salt_placement.into() }
    }

    fn is_debug(&self) -> bool {
        self.hash == HashArg::IdentityDebug
    }

    fn load_target(&self, path: &Path) -> Result<HashedTarget> {
        eprintln!("loading hashed target {}", path.display());
        let target = HashedTarget::load(path, self.scheme(), self.salt_hex)?;
        eprintln!(
            "loaded {} entries under {} distinct salts",
            target.total(),
            target.distinct_salts()
        );
        Ok(target)
    }
}

/// Parse sizes like `1024`, `64K`, `10M`, `4G` (powers of 1024).
pub fn parse_bytes(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let (digits, factor) = match s.chars().last() {
        Some('k') | Some('K') => (&s[..s.len() - 1], 1u64 << 10),
        Some('m') | Some('M') => (&s[..s.len() - 1], 1u64 << 20),
        Some('g') | Some('G') => (&s[..s.len() - 1], 1u64 << 30),
        _ => (s, 1),
    };
    let n: u64 = digits.parse().map_err(|_| format!("invalid size {s:?}"))?;
    n.checked_mul(factor).ok_or_else(|| format!("size {s:?} overflows"))
}

/// Parse `label=path` pairs for --list flags.
pub fn parse_labeled_path(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => {
            Ok((label.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected label=path, got {s:?}")),
    }
}

fn load_corpus(path: &Path, format: FormatArg, label: Option<&str>) -> Result<Ingest> {
    eprintln!("loading corpus {}", path.display());
    let opts = IngestOptions { label: label.map(String::from), mem_limit: None };
    let ingest = corpus::load_plaintext_opts(path, format.into(), &opts)?;
    eprintln!(
        "processed {} lines: {} total, {} unique",
        ingest.report.lines_read,
        ingest.multiset.total(),
        ingest.multiset.unique()
    );
    Ok(ingest)
}

fn load_guesses(path: &Path, cutoff: u64, dedupe: bool) -> Result<GuessList> {
    eprintln!("importing guess list {}", path.display());
    let (list, report) = import_guess_list(path, cutoff, dedupe)?;
    eprintln!(
        "kept {} guesses ({} lines read, {} duplicates dropped)",
        list.len(),
        report.lines_read,
        report.duplicates_dropped
    );
    Ok(list)
}

fn summary_value(m: &PasswordMultiset) -> Value {
    match m.summary() {
        Ok(s) => json!({ "total": s.total, "unique": s.unique, "ratio": s.ratio }),
        Err(_) => json!({ "total": 0, "unique": 0, "ratio": Value::Null }),
    }
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    /// Input corpus file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    /// Label for the dataset (defaults to the file stem).
    #[arg(long)]
    pub label: Option<String>,
    /// Abort if the in-memory count table would exceed this size.
    #[arg(long, value_parser = parse_bytes)]
    pub mem_limit: Option<u64>,
    /// Write the counted multiset here.
    #[arg(long)]
    pub save: Option<PathBuf>,
}

pub fn ingest(args: &IngestArgs, config: Value) -> Result<Report> {
    let opts = IngestOptions { label: args.label.clone(), mem_limit: args.mem_limit };
    eprintln!("loading corpus {}", args.input.display());
    let ingest = corpus::load_plaintext_opts(&args.input, args.format.into(), &opts)?;
    eprintln!("processed {} lines", ingest.report.lines_read);
    if let Some(save) = &args.save {
        ingest.multiset.write_counted(save)?;
        eprintln!("saved counted multiset to {}", save.display());
    }
    let payload = json!({
        "label": ingest.multiset.label(),
        "summary": summary_value(&ingest.multiset),
        "ingest": ingest.report,
        "estimated_bytes": ingest.multiset.estimated_bytes(),
        "saved": args.save,
    });
    Ok(Report { config, inputs: checksum_files([&args.input])?, payload, csv: None })
}

// ---------------------------------------------------------------------------
// summary
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct SummaryArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    #[arg(long)]
    pub label: Option<String>,
}

pub fn summary(args: &SummaryArgs, config: Value) -> Result<Report> {
    let ingest = load_corpus(&args.input, args.format, args.label.as_deref())?;
    let s = ingest.multiset.summary()?;
    let payload = json!({
        "label": ingest.multiset.label(),
        "total": s.total,
        "unique": s.unique,
        "ratio": s.ratio,
    });
    let csv = CsvTable {
        headers: vec!["label".into(), "total".into(), "unique".into(), "ratio".into()],
        rows: vec![vec![
            ingest.multiset.label().to_string(),
            s.total.to_string(),
            s.unique.to_string(),
            float_cell(s.ratio),
        ]],
    };
    Ok(Report { config, inputs: checksum_files([&args.input])?, payload, csv: Some(csv) })
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct FeaturesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value_t = WeightingArg::ByOccurrence)]
    pub weighting: WeightingArg,
    /// Length-axis bound; longer passwords land in the overflow bucket.
    #[arg(long, default_value_t = 64)]
    pub l_max: u32,
}

pub fn features(args: &FeaturesArgs, config: Value) -> Result<Report> {
    let ingest = load_corpus(&args.input, args.format, None)?;
    let cfg = FeatureConfig { l_max: args.l_max };
    let v = feature_vector(&ingest.multiset, args.weighting.into(), &cfg)?;
    let rows: Vec<Vec<String>> = {
        let cols = args.l_max as usize + 1;
        v.weights()
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| vec![(i / cols).to_string(), (i % cols).to_string(), float_cell(*w)])
            .collect()
    };
    let payload = json!({
        "label": ingest.multiset.label(),
        "weighting": args.weighting,
        "features": v,
    });
    let csv = CsvTable {
        headers: vec!["class_count".into(), "length".into(), "weight".into()],
        rows,
    };
    Ok(Report { config, inputs: checksum_files([&args.input])?, payload, csv: Some(csv) })
}

// ---------------------------------------------------------------------------
// sim
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    Cosine,
    Jaccard,
    Gjaccard,
}

#[derive(Debug, Args, Serialize)]
pub struct SimArgs {
    #[arg(long, value_enum)]
    pub metric: MetricArg,
    /// First corpus file.
    #[arg(long)]
    pub a: PathBuf,
    /// Second corpus file.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    /// Feature weighting (cosine only).
    #[arg(long, value_enum, default_value_t = WeightingArg::ByOccurrence)]
    pub weighting: WeightingArg,
    #[arg(long, default_value_t = 64)]
    pub l_max: u32,
}

pub fn sim(args: &SimArgs, config: Value) -> Result<Report> {
    let a = load_corpus(&args.a, args.format, None)?.multiset;
    let b = load_corpus(&args.b, args.format, None)?.multiset;
    let similarity = match args.metric {
        MetricArg::Cosine => {
            let cfg = FeatureConfig { l_max: args.l_max };
            let va = feature_vector(&a, args.weighting.into(), &cfg)?;
            let vb = feature_vector(&b, args.weighting.into(), &cfg)?;
            cosine(&va, &vb)?
        }
        MetricArg::Jaccard => jaccard(&a.support_set(), &b.support_set())?,
        MetricArg::Gjaccard => generalized_jaccard(&a, &b)?,
    };
    let metric_name = match similarity.metric {
        Metric::Cosine => "cosine",
        Metric::Jaccard => "jaccard",
        Metric::GeneralizedJaccard => "generalized-jaccard",
    };
    let payload = json!({
        "metric": metric_name,
        "value": similarity.value,
        "weighting": if args.metric == MetricArg::Cosine { json!(args.weighting) } else { Value::Null },
        "a": { "label": a.label(), "summary": summary_value(&a) },
        "b": { "label": b.label(), "summary": summary_value(&b) },
    });
    let csv = CsvTable {
        headers: vec!["metric".into(), "a".into(), "b".into(), "value".into()],
        rows: vec![vec![
            metric_name.to_string(),
            a.label().to_string(),
            b.label().to_string(),
            float_cell(similarity.value),
        ]],
    };
    Ok(Report { config, inputs: checksum_files([&args.a, &args.b])?, payload, csv: Some(csv) })
}

// ---------------------------------------------------------------------------
// identity
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct IdentityArgs {
    /// Training corpus.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    /// Maximum number of guesses to emit.
    #[arg(long, default_value_t = u64::MAX)]
    pub cutoff: u64,
    /// Write the guess list here (replayable raw-lines file).
    #[arg(long)]
    pub save: PathBuf,
}

pub fn identity(args: &IdentityArgs, config: Value) -> Result<Report> {
    let training = load_corpus(&args.train, args.format, None)?.multiset;
    let model = train_identity(&training)?;
    let list = generate_identity(&model, args.cutoff)?;
    list.write(&args.save)?;
    eprintln!("wrote {} guesses to {}", list.len(), args.save.display());
    let payload = json!({
        "training_label": training.label(),
        "model_size": model.len(),
        "emitted": list.len(),
        "exhausted": (list.len() as u64) < args.cutoff,
        "saved": args.save,
    });
    Ok(Report { config, inputs: checksum_files([&args.train])?, payload, csv: None })
}

// ---------------------------------------------------------------------------
// import
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct ImportArgs {
    /// External guesser output, one guess per line in generation order.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub cutoff: u64,
    /// Keep duplicates (raw mode, for success-curve fidelity).
    #[arg(long)]
    pub no_dedupe: bool,
    #[arg(long)]
    pub save: PathBuf,
}

pub fn import(args: &ImportArgs, config: Value) -> Result<Report> {
    let (list, report) = import_guess_list(&args.input, args.cutoff, !args.no_dedupe)?;
    list.write(&args.save)?;
    eprintln!("kept {} of {} lines", list.len(), report.lines_read);
    let payload = json!({
        "source": list.source(),
        "kept": list.len(),
        "import": report,
        "saved": args.save,
    });
    Ok(Report { config, inputs: checksum_files([&args.input])?, payload, csv: None })
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// Guess list file.
    #[arg(long)]
    pub guesses: PathBuf,
    /// Plaintext target corpus.
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    #[arg(long, default_value_t = u64::MAX)]
    pub cutoff: u64,
    /// Divide by unique passwords instead of total accounts.
    #[arg(long)]
    pub unique: bool,
}

pub fn evaluate(args: &EvaluateArgs, config: Value) -> Result<Report> {
    let list = load_guesses(&args.guesses, args.cutoff, true)?;
    let target = load_corpus(&args.target, args.format, None)?.multiset;
    let denominator = if args.unique { Denominator::Unique } else { Denominator::Total };
    let rate = success_rate_with(&list, &target, denominator)?;
    let payload = json!({
        "success_rate": rate,
        "denominator": denominator,
        "guesses": { "source": list.source(), "count": list.len() },
        "target": { "label": target.label(), "summary": summary_value(&target) },
    });
    let csv = CsvTable {
        headers: vec!["guesses".into(), "target".into(), "denominator".into(), "success_rate".into()],
        rows: vec![vec![
            list.source().to_string(),
            target.label().to_string(),
            if args.unique { "unique".into() } else { "total".into() },
            float_cell(rate),
        ]],
    };
    Ok(Report { config, inputs: checksum_files([&args.guesses, &args.target])?, payload, csv: Some(csv) })
}

// ---------------------------------------------------------------------------
// curve
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    #[arg(long)]
    pub guesses: PathBuf,
    /// Target file: plaintext corpus, or a hash dump with --hashed.
    #[arg(long)]
    pub target: PathBuf,
    /// Cumulative checkpoints (1-based guess counts, ascending).
    #[arg(long, value_delimiter = ',', required = true)]
    pub checkpoints: Vec<u64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    #[arg(long, default_value_t = u64::MAX)]
    pub cutoff: u64,
    /// Replay the guess file verbatim, keeping duplicates.
    #[arg(long)]
    pub raw: bool,
    /// Treat the target as a salted-hash dump hashed with this algorithm.
    #[arg(long = "hash", value_enum)]
    pub hash: Option<HashArg>,
    #[arg(long, value_enum, default_value_t = PlacementArg::Append)]
    pub salt_placement: PlacementArg,
    #[arg(long)]
    pub salt_hex: bool,
}

pub fn curve(args: &CurveArgs, config: Value) -> Result<Report> {
    let list = load_guesses(&args.guesses, args.cutoff, !args.raw)?;
    eprintln!("evaluating {} guesses", list.len());
    let (curve, target_desc, debug_scheme) = if let Some(hash) = args.hash {
        let flags = HashFlags {
            hash,
            salt_placement: args.salt_placement,
            salt_hex: args.salt_hex,
        };
        let target = flags.load_target(&args.target)?;
        let curve = combo::evaluate_curve(&list, EvalTarget::Hashed(&target), &args.checkpoints)?;
        let desc = json!({ "entries": target.total(), "distinct_salts": target.distinct_salts() });
        (curve, desc, flags.is_debug())
    } else {
        let target = load_corpus(&args.target, args.format, None)?.multiset;
        let curve = combo::evaluate_curve(&list, EvalTarget::Plain(&target), &args.checkpoints)?;
        let desc = json!({ "label": target.label(), "summary": summary_value(&target) });
        (curve, desc, false)
    };
    let rows = curve
        .points
        .iter()
        .map(|p| vec![p.guess_index.to_string(), float_cell(p.cumulative_success)])
        .collect();
    let payload = json!({
        "curve": curve,
        "guesses": { "source": list.source(), "count": list.len() },
        "target": target_desc,
        "identity_debug_scheme": debug_scheme,
    });
    let csv = CsvTable {
        headers: vec!["guess_index".into(), "cumulative_success".into()],
        rows,
    };
    Ok(Report { config, inputs: checksum_files([&args.guesses, &args.target])?, payload, csv: Some(csv) })
}

// ---------------------------------------------------------------------------
// combine
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct CombineArgs {
    /// JSON plan: stage labels with budgets.
    #[arg(long)]
    pub plan: PathBuf,
    /// Stage list files as label=path (repeatable).
    #[arg(long = "list", value_parser = parse_labeled_path)]
    pub lists: Vec<(String, PathBuf)>,
    #[arg(long)]
    pub save: PathBuf,
}

pub fn combine(args: &CombineArgs, config: Value) -> Result<Report> {
    let plan_text = std::fs::read_to_string(&args.plan)
        .with_context(|| format!("{}", args.plan.display()))?;
    let (plan, checkpoints) = combo::parse_plan(&plan_text)?;
    let paths: HashMap<&str, &PathBuf> =
        args.lists.iter().map(|(label, path)| (label.as_str(), path)).collect();
    let (combined, stages) = combo::combine_with(&plan, |label, budget| {
        let path = paths
            .get(label)
            .ok_or_else(|| guessmetrics::Error::UnknownLabel(label.to_string()))?;
        eprintln!("stage {label}: reading up to {budget} guesses from {}", path.display());
        let (list, _) = import_guess_list(path, budget, true)?;
        Ok(list)
    })?;
    combined.write(&args.save)?;
    eprintln!("wrote {} combined guesses to {}", combined.len(), args.save.display());
    let mut inputs = vec![args.plan.clone()];
    inputs.extend(args.lists.iter().map(|(_, p)| p.clone()));
    let payload = json!({
        "source": combined.source(),
        "stages": stages,
        "combined_length": combined.len(),
        "total_budget": plan.total_budget(),
        "checkpoints": checkpoints,
        "saved": args.save,
    });
    Ok(Report { config, inputs: checksum_files(inputs.iter())?, payload, csv: None })
}

// ---------------------------------------------------------------------------
// hashed-sim
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct HashedSimArgs {
    /// Candidate training corpus (plaintext).
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    /// Salted-hash dump file.
    #[arg(long)]
    pub target: PathBuf,
    #[command(flatten)]
    pub hash_flags: HashFlags,
}

pub fn hashed_sim(args: &HashedSimArgs, config: Value) -> Result<Report> {
    let candidate = load_corpus(&args.train, args.format, None)?.multiset;
    let target = args.hash_flags.load_target(&args.target)?;
    let similarity = hashed_generalized_jaccard(&candidate, &target)?;
    let payload = json!({
        "metric": "generalized-jaccard",
        "value": similarity.value,
        "candidate": { "label": candidate.label(), "summary": summary_value(&candidate) },
        "target": { "entries": target.total(), "distinct_salts": target.distinct_salts() },
        "identity_debug_scheme": args.hash_flags.is_debug(),
    });
    let csv = CsvTable {
        headers: vec!["candidate".into(), "target_entries".into(), "value".into()],
        rows: vec![vec![
            candidate.label().to_string(),
            target.total().to_string(),
            float_cell(similarity.value),
        ]],
    };
    Ok(Report { config, inputs: checksum_files([&args.train, &args.target])?, payload, csv: Some(csv) })
}

// ---------------------------------------------------------------------------
// hashed-evaluate
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct HashedEvaluateArgs {
    #[arg(long)]
    pub guesses: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, default_value_t = u64::MAX)]
    pub cutoff: u64,
    #[command(flatten)]
    pub hash_flags: HashFlags,
}

pub fn hashed_evaluate(args: &HashedEvaluateArgs, config: Value) -> Result<Report> {
    let list = load_guesses(&args.guesses, args.cutoff, true)?;
    let target = args.hash_flags.load_target(&args.target)?;
    eprintln!("evaluating {} guesses against {} entries", list.len(), target.total());
    let rate = hashed_success_rate(&list, &target)?;
    let payload = json!({
        "success_rate": rate,
        "guesses": { "source": list.source(), "count": list.len() },
        "target": { "entries": target.total(), "distinct_salts": target.distinct_salts() },
        "identity_debug_scheme": args.hash_flags.is_debug(),
    });
    let csv = CsvTable {
        headers: vec!["guesses".into(), "target_entries".into(), "success_rate".into()],
        rows: vec![vec![
            list.source().to_string(),
            target.total().to_string(),
            float_cell(rate),
        ]],
    };
    Ok(Report { config, inputs: checksum_files([&args.guesses, &args.target])?, payload, csv: Some(csv) })
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    /// Number of password instances to draw (without replacement).
    #[arg(short = 'n', long = "size")]
    pub size: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub save: PathBuf,
}

pub fn sample(args: &SampleArgs, config: Value) -> Result<Report> {
    let source = load_corpus(&args.input, args.format, None)?.multiset;
    let sampled = source.sample(args.size, args.seed)?;
    sampled.write_counted(&args.save)?;
    eprintln!("sampled {} of {} instances", sampled.total(), source.total());
    let payload = json!({
        "source": { "label": source.label(), "summary": summary_value(&source) },
        "sample": { "label": sampled.label(), "summary": summary_value(&sampled) },
        "seed": args.seed,
        "saved": args.save,
    });
    Ok(Report { config, inputs: checksum_files([&args.input])?, payload, csv: None })
}

// ---------------------------------------------------------------------------
// merge
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct MergeArgs {
    /// Input corpora (repeatable).
    #[arg(long = "in", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Raw)]
    pub format: FormatArg,
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long)]
    pub save: PathBuf,
}

pub fn merge(args: &MergeArgs, config: Value) -> Result<Report> {
    let mut sets = Vec::with_capacity(args.inputs.len());
    for path in &args.inputs {
        sets.push(load_corpus(path, args.format, None)?.multiset);
    }
    let mut merged = corpus::merge(sets.iter())?;
    if let Some(label) = &args.label {
        merged.set_label(label.clone());
    }
    merged.write_counted(&args.save)?;
    eprintln!("merged {} corpora into {} instances", sets.len(), merged.total());
    let payload = json!({
        "label": merged.label(),
        "members": sets.iter().map(|m| m.label()).collect::<Vec<_>>(),
        "summary": summary_value(&merged),
        "saved": args.save,
    });
    Ok(Report { config, inputs: checksum_files(args.inputs.iter())?, payload, csv: None })
}

