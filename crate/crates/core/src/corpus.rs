//! Password corpora as frequency-counted multisets.
//!
//! A [`PasswordMultiset`] stores one count per distinct password. Ingestion
//! reads raw-lines or counted files in newline-aligned blocks; block counts
//! are additive, so the result is identical whether blocks are processed
//! sequentially or in parallel.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Hypergeometric};

use crate::error::{Error, Result};

/// Per-entry bookkeeping overhead assumed by the memory estimator, on top of
/// the key bytes themselves (boxed str header, count, table slot slack).
const ENTRY_OVERHEAD_BYTES: u64 = 48;

/// Block size for chunked ingestion. Blocks are extended to the next newline.
const BLOCK_BYTES: usize = 1 << 22;

/// On-disk corpus layouts accepted by [`load_plaintext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One password per line.
    RawLines,
    /// `<decimal count>\t<password>` per line.
    Counted,
}

/// A frequency-counted password corpus.
///
/// Invariants: every stored count is >= 1, `total` is the exact sum of all
/// counts, and passwords are validated UTF-8 (never trimmed or case-folded).
#[derive(Debug, Clone, Default)]
pub struct PasswordMultiset {
    label: String,
    entries: HashMap<Box<str>, u64>,
    total: u64,
    key_bytes: u64,
}

/// Total/unique counts and their ratio for a nonempty multiset.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DatasetSummary {
    pub total: u64,
    pub unique: u64,
    pub ratio: f64,
}

/// Ingestion side channel: what was skipped or flagged while loading.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct IngestReport {
    /// Lines read from the file (including skipped ones).
    pub lines_read: u64,
    /// Lines dropped because their password bytes were not valid UTF-8.
    pub invalid_utf8_skipped: u64,
    /// Occurrences of the empty password (kept, but flagged).
    pub empty_passwords: u64,
}

/// A loaded multiset together with its ingestion report.
#[derive(Debug, Clone)]
pub struct Ingest {
    pub multiset: PasswordMultiset,
    pub report: IngestReport,
}

/// Optional ingestion knobs.
#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Label for the resulting multiset; defaults to the file stem.
    pub label: Option<String>,
    /// Abort ingestion once the estimated in-memory size exceeds this many bytes.
    pub mem_limit: Option<u64>,
}

impl PasswordMultiset {
    pub fn new(label: impl Into<String>) -> Self {
        PasswordMultiset { label: label.into(), ..Default::default() }
    }

    /// Build from explicit (password, count) pairs; zero counts are ignored.
    pub fn from_counts<S: AsRef<str>>(
        label: impl Into<String>,
        counts: impl IntoIterator<Item = (S, u64)>,
    ) -> Self {
        let mut m = PasswordMultiset::new(label);
        for (pw, c) in counts {
            m.add(pw.as_ref(), c);
        }
        m
    }

    /// Add `count` occurrences of `password`.
    pub fn add(&mut self, password: &str, count: u64) {
        if count == 0 {
            return;
        }
        self.total += count;
        match self.entries.get_mut(password) {
            Some(c) => *c += count,
            None => {
                self.key_bytes += password.len() as u64;
                self.entries.insert(Box::from(password), count);
            }
        }
    }

    /// Occurrence count o(w, A); zero when absent.
    pub fn count(&self, password: &str) -> u64 {
        self.entries.get(password).copied().unwrap_or(0)
    }

    pub fn contains(&self, password: &str) -> bool {
        self.entries.contains_key(password)
    }

    /// Number of distinct passwords, |supp(A)|.
    pub fn unique(&self) -> u64 {
        self.entries.len() as u64
    }

    /// Total occurrences, |A|.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.entries.iter().map(|(k, &v)| (k.as_ref(), v))
    }

    /// The support as a borrowed set.
    pub fn support_set(&self) -> HashSet<&str> {
        self.entries.keys().map(|k| k.as_ref()).collect()
    }

    pub(crate) fn entries(&self) -> &HashMap<Box<str>, u64> {
        &self.entries
    }

    /// Approximate resident bytes of the count table.
    pub fn estimated_bytes(&self) -> u64 {
        self.key_bytes + ENTRY_OVERHEAD_BYTES * self.entries.len() as u64
    }

    /// Total, unique, and unique/total ratio. Errors on an empty multiset
    /// (the ratio is undefined).
    pub fn summary(&self) -> Result<DatasetSummary> {
        if self.is_empty() {
            return Err(Error::Domain("summary of an empty multiset".into()));
        }
        Ok(DatasetSummary {
            total: self.total,
            unique: self.unique(),
            ratio: self.unique() as f64 / self.total as f64,
        })
    }

    /// Entries sorted by descending count, ties broken by ascending byte order.
    ///
    /// This is the canonical presentation order (also the Identity guesser's
    /// ranking), used wherever deterministic output is required.
    pub fn ranked_entries(&self) -> Vec<(&str, u64)> {
        let mut entries: Vec<(&str, u64)> = self.iter().collect();
        sort_ranked(&mut entries);
        entries
    }

    /// Draw `n` password instances uniformly without replacement from the
    /// multiset expansion. Deterministic for a fixed seed.
    pub fn sample(&self, n: u64, seed: u64) -> Result<PasswordMultiset> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        if n > self.total {
            return Err(Error::SampleTooLarge { requested: n, available: self.total });
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        // Keys visited in sorted order so the draw sequence is reproducible.
        let mut keys: Vec<(&str, u64)> = self.iter().collect();
        keys.sort_unstable_by(|a, b| a.0.cmp(b.0));

        let mut out = PasswordMultiset::new(format!("{}:sample", self.label));
        let mut remaining = self.total;
        let mut need = n;
        for (pw, c) in keys {
            if need == 0 {
                break;
            }
            // Number of this key drawn follows the hypergeometric law of
            // drawing `need` from `remaining` where `c` are this key.
            let taken = if remaining == c {
                need
            } else {
                let dist = Hypergeometric::new(remaining, c, need)
                    .map_err(|e| Error::Domain(format!("hypergeometric: {e}")))?;
                dist.sample(&mut rng)
            };
            if taken > 0 {
                out.add(pw, taken);
                need -= taken;
            }
            remaining -= c;
        }
        debug_assert_eq!(out.total, n);
        Ok(out)
    }

    /// Write the counted format (`count\tpassword\n`) in ranked order.
    ///
    /// Passwords containing tabs are only representable in raw-lines format
    /// and are rejected here.
    pub fn write_counted(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
        let mut w = BufWriter::new(file);
        for (pw, count) in self.ranked_entries() {
            if pw.contains('\t') || pw.contains('\n') {
                return Err(Error::Domain(format!(
                    "password {pw:?} contains a tab or newline and cannot be written in counted format"
                )));
            }
            writeln!(w, "{count}\t{pw}").map_err(|e| Error::Io { path: path.into(), source: e })?;
        }
        w.flush().map_err(|e| Error::Io { path: path.into(), source: e })
    }

    fn absorb(&mut self, mut other: PasswordMultiset) {
        // Drain the smaller table into the larger one; counts are additive,
        // so the swap cannot change the result.
        if other.entries.len() > self.entries.len() {
            std::mem::swap(&mut self.entries, &mut other.entries);
            std::mem::swap(&mut self.total, &mut other.total);
            std::mem::swap(&mut self.key_bytes, &mut other.key_bytes);
        }
        for (pw, c) in other.entries {
            self.total += c;
            match self.entries.get_mut(&pw) {
                Some(existing) => *existing += c,
                None => {
                    self.key_bytes += pw.len() as u64;
                    self.entries.insert(pw, c);
                }
            }
        }
    }
}

/// Canonical presentation order: count descending, password bytes ascending.
pub(crate) fn rank_order(a: &(&str, u64), b: &(&str, u64)) -> std::cmp::Ordering {
    b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

pub(crate) fn sort_ranked(entries: &mut [(&str, u64)]) {
    entries.sort_unstable_by(rank_order);
}

/// Keywise sum of a nonempty list of multisets.
pub fn merge<'a>(sets: impl IntoIterator<Item = &'a PasswordMultiset>) -> Result<PasswordMultiset> {
    let mut iter = sets.into_iter();
    let first = iter.next().ok_or_else(|| Error::Domain("merge of an empty list".into()))?;
    let mut labels = vec![first.label.clone()];
    let mut out = first.clone();
    for m in iter {
        labels.push(m.label.clone());
        out.absorb(m.clone());
    }
    out.label = labels.join("+");
    Ok(out)
}

/// Load a corpus file, counting duplicates. See [`IngestReport`] for what is
/// skipped versus flagged.
pub fn load_plaintext(path: &Path, format: CorpusFormat) -> Result<Ingest> {
    load_plaintext_opts(path, format, &IngestOptions::default())
}

pub fn load_plaintext_opts(
    path: &Path,
    format: CorpusFormat,
    opts: &IngestOptions,
) -> Result<Ingest> {
    let file = File::open(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    let reader = BufReader::with_capacity(BLOCK_BYTES, file);
    let mut ingest = count_blocks(Blocks::new(reader, path), format, path, opts.mem_limit)?;
    let label = match &opts.label {
        Some(l) => l.clone(),
        None => path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    ingest.multiset.label = label;
    Ok(ingest)
}

/// Sequential reference ingestion; used as the fallback when the `parallel`
/// feature is disabled and by the benchmark suite.
#[doc(hidden)]
pub fn load_plaintext_seq(path: &Path, format: CorpusFormat) -> Result<Ingest> {
    let file = File::open(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    let reader = BufReader::with_capacity(BLOCK_BYTES, file);
    let mut ingest = count_blocks_seq(Blocks::new(reader, path), format, path, None)?;
    ingest.multiset.label =
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(ingest)
}

/// A newline-aligned chunk of the input plus the 1-based number of its first line.
struct Block {
    first_line: u64,
    data: Vec<u8>,
}

struct Blocks<R> {
    reader: R,
    path: std::path::PathBuf,
    next_line: u64,
    done: bool,
}

impl<R: BufRead> Blocks<R> {
    fn new(reader: R, path: &Path) -> Self {
        Blocks { reader, path: path.into(), next_line: 1, done: false }
    }
}

impl<R: BufRead> Iterator for Blocks<R> {
    type Item = Result<Block>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut data = Vec::with_capacity(BLOCK_BYTES + 256);
        let io_err = |path: &Path, e: std::io::Error| Error::Io { path: path.into(), source: e };
        if let Err(e) = (&mut self.reader).take(BLOCK_BYTES as u64).read_to_end(&mut data) {
            self.done = true;
            return Some(Err(io_err(&self.path, e)));
        }
        // Extend to the end of the current line so no password is split.
        if data.last() != Some(&b'\n') {
            if let Err(e) = self.reader.read_until(b'\n', &mut data) {
                self.done = true;
                return Some(Err(io_err(&self.path, e)));
            }
        }
        if data.is_empty() {
            self.done = true;
            return None;
        }
        let first_line = self.next_line;
        self.next_line += data.iter().filter(|&&b| b == b'\n').count() as u64;
        if data.last() != Some(&b'\n') {
            // Final unterminated line.
            self.next_line += 1;
            self.done = true;
        }
        Some(Ok(Block { first_line, data }))
    }
}

#[derive(Default)]
struct Shard {
    set: PasswordMultiset,
    report: IngestReport,
}

impl Shard {
    fn absorb(mut self, other: Shard) -> Shard {
        self.set.absorb(other.set);
        self.report.lines_read += other.report.lines_read;
        self.report.invalid_utf8_skipped += other.report.invalid_utf8_skipped;
        self.report.empty_passwords += other.report.empty_passwords;
        self
    }

    fn check_limit(&self, limit: Option<u64>) -> Result<()> {
        if let Some(limit) = limit {
            let estimated = self.set.estimated_bytes();
            if estimated > limit {
                return Err(Error::MemoryLimit { limit, estimated });
            }
        }
        Ok(())
    }
}

fn count_block(block: &Block, format: CorpusFormat, path: &Path, shard: &mut Shard) -> Result<()> {
    // Strip the trailing newline before splitting so it does not produce a
    // phantom empty line; interior empty lines (empty passwords) survive.
    let data = match block.data.last() {
        Some(&b'\n') => &block.data[..block.data.len() - 1],
        _ => &block.data[..],
    };
    for (offset, raw) in data.split(|&b| b == b'\n').enumerate() {
        let line_no = block.first_line + offset as u64;
        shard.report.lines_read += 1;
        match format {
            CorpusFormat::RawLines => match std::str::from_utf8(raw) {
                Ok(pw) => {
                    if pw.is_empty() {
                        shard.report.empty_passwords += 1;
                    }
                    shard.set.add(pw, 1);
                }
                Err(_) => shard.report.invalid_utf8_skipped += 1,
            },
            CorpusFormat::Counted => {
                let tab = raw.iter().position(|&b| b == b'\t').ok_or_else(|| Error::Parse {
                    path: path.into(),
                    line: line_no,
                    message: "missing tab separator".into(),
                })?;
                let count_field = std::str::from_utf8(&raw[..tab]).map_err(|_| Error::Parse {
                    path: path.into(),
                    line: line_no,
                    message: "count field is not valid UTF-8".into(),
                })?;
                let count: u64 = count_field.parse().map_err(|_| Error::Parse {
                    path: path.into(),
                    line: line_no,
                    message: format!("invalid count {count_field:?}"),
                })?;
                if count == 0 {
                    return Err(Error::Parse {
                        path: path.into(),
                        line: line_no,
                        message: "count must be positive".into(),
                    });
                }
                match std::str::from_utf8(&raw[tab + 1..]) {
                    Ok(pw) => {
                        if pw.is_empty() {
                            shard.report.empty_passwords += count;
                        }
                        shard.set.add(pw, count);
                    }
                    Err(_) => shard.report.invalid_utf8_skipped += 1,
                }
            }
        }
    }
    Ok(())
}

fn count_blocks_seq(
    blocks: impl Iterator<Item = Result<Block>>,
    format: CorpusFormat,
    path: &Path,
    mem_limit: Option<u64>,
) -> Result<Ingest> {
    let mut shard = Shard::default();
    for block in blocks {
        count_block(&block?, format, path, &mut shard)?;
        shard.check_limit(mem_limit)?;
    }
    Ok(Ingest { multiset: shard.set, report: shard.report })
}

#[cfg(feature = "parallel")]
fn count_blocks(
    blocks: impl Iterator<Item = Result<Block>> + Send,
    format: CorpusFormat,
    path: &Path,
    mem_limit: Option<u64>,
) -> Result<Ingest> {
    use rayon::prelude::*;

    let shard = blocks
        .par_bridge()
        .try_fold(Shard::default, |mut shard, block| {
            count_block(&block?, format, path, &mut shard)?;
            shard.check_limit(mem_limit)?;
            Ok(shard)
        })
        .try_reduce(Shard::default, |a, b| {
            let merged = a.absorb(b);
            merged.check_limit(mem_limit)?;
            Ok(merged)
        })?;
    Ok(Ingest { multiset: shard.set, report: shard.report })
}

#[cfg(not(feature = "parallel"))]
fn count_blocks(
    blocks: impl Iterator<Item = Result<Block>> + Send,
    format: CorpusFormat,
    path: &Path,
    mem_limit: Option<u64>,
) -> Result<Ingest> {
    count_blocks_seq(blocks, format, path, mem_limit)
}
