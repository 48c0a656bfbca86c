//! The Identity guesser and ordered guess lists, including import of
//! external guessers' output files.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[cfg(not(feature = "parallel"))]
use crate::corpus::sort_ranked;
use crate::corpus::PasswordMultiset;
use crate::error::{Error, Result};
use crate::features::{feature_vector_of_passwords, FeatureConfig, FeatureVector};

/// An ordered sequence of password guesses with a cutoff and a source label.
///
/// Lists produced by this crate are duplicate-free; only a raw (non-deduped)
/// import may carry duplicates, for replaying a generator's native output
/// through success curves. The framework statistics require deduped lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessList {
    source: String,
    cutoff: u64,
    guesses: Vec<Box<str>>,
}

impl GuessList {
    /// Build from guesses that must already be unique and within the cutoff.
    pub fn from_unique(
        source: impl Into<String>,
        cutoff: u64,
        guesses: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let guesses: Vec<Box<str>> = guesses.into_iter().map(|g| g.into_boxed_str()).collect();
        let mut seen: HashSet<&str> = HashSet::with_capacity(guesses.len());
        for g in &guesses {
            if !seen.insert(g) {
                return Err(Error::Domain(format!("duplicate guess {g:?}")));
            }
        }
        if guesses.len() as u64 > cutoff {
            return Err(Error::Domain(format!(
                "{} guesses exceed cutoff {cutoff}",
                guesses.len()
            )));
        }
        Ok(GuessList { source: source.into(), cutoff, guesses })
    }

    pub(crate) fn new_unchecked(source: String, cutoff: u64, guesses: Vec<Box<str>>) -> Self {
        GuessList { source, cutoff, guesses }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn set_source(&mut self, source: impl Into<String>) {
        self.source = source.into();
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.guesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guesses.is_empty()
    }

    pub fn as_slice(&self) -> &[Box<str>] {
        &self.guesses
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.guesses.iter().map(|g| g.as_ref())
    }

    pub fn guess_set(&self) -> HashSet<&str> {
        self.iter().collect()
    }

    /// Structural feature distribution of the guesses (by-unique weighting;
    /// a guess list has no duplicates).
    pub fn feature_vector(&self, config: &FeatureConfig) -> Result<FeatureVector> {
        feature_vector_of_passwords(&self.guesses, config)
    }

    /// The multiset of target passwords this list cracks: for each guess
    /// present in the target, its occurrence count there.
    pub fn cracked_multiset(&self, target: &PasswordMultiset) -> PasswordMultiset {
        let mut out = PasswordMultiset::new(format!("{}^{}", self.source, target.label()));
        for guess in self.iter() {
            let count = target.count(guess);
            if count > 0 && !out.contains(guess) {
                out.add(guess, count);
            }
        }
        out
    }

    /// Write one guess per line; the file is a replayable raw-lines input.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
        let mut w = BufWriter::new(file);
        for g in self.iter() {
            if g.contains('\n') {
                return Err(Error::Domain(format!("guess {g:?} contains a newline")));
            }
            writeln!(w, "{g}").map_err(|e| Error::Io { path: path.into(), source: e })?;
        }
        w.flush().map_err(|e| Error::Io { path: path.into(), source: e })
    }
}

/// The Identity guesser's model: training passwords ranked by descending
/// frequency, ties broken by ascending byte order.
#[derive(Debug, Clone)]
pub struct IdentityModel {
    label: String,
    ranked: Vec<(Box<str>, u64)>,
}

impl IdentityModel {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn ranked(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.ranked.iter().map(|(pw, c)| (pw.as_ref(), *c))
    }
}

/// Rank the training passwords by empirical frequency.
pub fn train_identity(training: &PasswordMultiset) -> Result<IdentityModel> {
    if training.is_empty() {
        return Err(Error::Domain("identity training set is empty".into()));
    }
    let mut entries: Vec<(&str, u64)> = training.iter().collect();
    // Passwords are unique, so the rank comparator is a total order and the
    // unstable (parallel) sort is still deterministic.
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        entries.par_sort_unstable_by(crate::corpus::rank_order);
    }
    #[cfg(not(feature = "parallel"))]
    sort_ranked(&mut entries);
    Ok(IdentityModel {
        label: training.label().to_string(),
        ranked: entries.into_iter().map(|(pw, c)| (Box::from(pw), c)).collect(),
    })
}

/// Emit the top of the ranking as a guess list. The list exhausts at the
/// model size when the cutoff is larger.
pub fn generate_identity(model: &IdentityModel, cutoff: u64) -> Result<GuessList> {
    if cutoff == 0 {
        return Err(Error::Config("cutoff must be at least 1".into()));
    }
    let take = (cutoff.min(model.ranked.len() as u64)) as usize;
    let guesses = model.ranked[..take].iter().map(|(pw, _)| pw.clone()).collect();
    Ok(GuessList::new_unchecked(format!("identity:{}", model.label), cutoff, guesses))
}

/// What an import skipped or dropped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ImportReport {
    pub lines_read: u64,
    pub duplicates_dropped: u64,
    pub invalid_utf8_skipped: u64,
}

/// Import an external guesser's output: one guess per line in generation
/// order. With `dedupe`, first occurrences are kept; reading stops as soon as
/// the cutoff is reached, so huge files cost only their needed prefix.
pub fn import_guess_list(
    path: &Path,
    cutoff: u64,
    dedupe: bool,
) -> Result<(GuessList, ImportReport)> {
    if cutoff == 0 {
        return Err(Error::Config("cutoff must be at least 1".into()));
    }
    let file = File::open(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    let mut reader = BufReader::new(file);
    let mut report = ImportReport::default();
    let mut guesses: Vec<Box<str>> = Vec::new();
    let mut seen: HashSet<Box<str>> = HashSet::new();
    let mut buf = Vec::new();
    loop {
        if guesses.len() as u64 >= cutoff {
            break;
        }
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::Io { path: path.into(), source: e })?;
        if n == 0 {
            break;
        }
        report.lines_read += 1;
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        match std::str::from_utf8(&buf) {
            Ok(guess) => {
                if dedupe {
                    if seen.contains(guess) {
                        report.duplicates_dropped += 1;
                        continue;
                    }
                    seen.insert(Box::from(guess));
                }
                guesses.push(Box::from(guess));
            }
            Err(_) => report.invalid_utf8_skipped += 1,
        }
    }
    let source = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok((GuessList::new_unchecked(source, cutoff, guesses), report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(counts: &[(&str, u64)]) -> IdentityModel {
        let m = PasswordMultiset::from_counts("train", counts.iter().copied());
        train_identity(&m).unwrap()
    }

    #[test]
    fn training_ranks_by_frequency() {
        let m = model(&[("a", 3), ("b", 1)]);
        let ranked: Vec<_> = m.ranked().collect();
        assert_eq!(ranked, vec![("a", 3), ("b", 1)]);
    }

    #[test]
    fn ties_break_lexicographically() {
        // Oracle: stable sort by (-count, password).
        let m = model(&[("b", 2), ("a", 2)]);
        let ranked: Vec<_> = m.ranked().collect();
        assert_eq!(ranked, vec![("a", 2), ("b", 2)]);
    }

    #[test]
    fn uniform_counts_are_pure_lexicographic() {
        let m = model(&[("c", 1), ("a", 1), ("b", 1)]);
        let order: Vec<&str> = m.ranked().map(|(pw, _)| pw).collect();
        assert_eq!(order, vec!["a", "b", "c"]);
    }

    #[test]
    fn empty_training_errors() {
        assert!(train_identity(&PasswordMultiset::new("e")).is_err());
    }

    #[test]
    fn generation_respects_cutoff_and_exhaustion() {
        let m = model(&[("a", 3), ("b", 1)]);
        let full = generate_identity(&m, 100).unwrap();
        assert_eq!(full.iter().collect::<Vec<_>>(), vec!["a", "b"]);
        let top1 = generate_identity(&m, 1).unwrap();
        assert_eq!(top1.iter().collect::<Vec<_>>(), vec!["a"]);
    }

    #[test]
    fn generation_tie_break_example() {
        // Oracle: sort by (-count, password): a and c tie at 5, a < c.
        let m = model(&[("c", 5), ("a", 5), ("b", 1)]);
        let list = generate_identity(&m, 2).unwrap();
        assert_eq!(list.iter().collect::<Vec<_>>(), vec!["a", "c"]);
    }

    #[test]
    fn prefix_property_holds() {
        let m = model(&[("a", 9), ("b", 5), ("c", 5), ("d", 1)]);
        for k in 1..4u64 {
            let shorter = generate_identity(&m, k).unwrap();
            let longer = generate_identity(&m, k + 1).unwrap();
            assert_eq!(&longer.as_slice()[..shorter.len()], shorter.as_slice());
        }
    }

    #[test]
    fn import_dedupes_and_reports() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "a\nb\na\n").unwrap();
        f.flush().unwrap();
        let (list, report) = import_guess_list(f.path(), 10, true).unwrap();
        assert_eq!(list.iter().collect::<Vec<_>>(), vec!["a", "b"]);
        assert_eq!(report.duplicates_dropped, 1);
    }

    #[test]
    fn import_cutoff_stops_streaming_early() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for i in 0..10_000 {
            writeln!(f, "pw{}", i % 100).unwrap();
        }
        f.flush().unwrap();
        let (list, report) = import_guess_list(f.path(), 50, true).unwrap();
        assert_eq!(list.len(), 50);
        // Oracle: a prefix scan needs the first 50 unique lines, i.e. lines pw0..pw49.
        assert_eq!(list.iter().last(), Some("pw49"));
        assert!(report.lines_read <= 100);
    }

    #[test]
    fn import_cutoff_one_keeps_first_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "first\nsecond\n").unwrap();
        f.flush().unwrap();
        let (list, _) = import_guess_list(f.path(), 1, true).unwrap();
        assert_eq!(list.iter().collect::<Vec<_>>(), vec!["first"]);
    }

    #[test]
    fn raw_import_keeps_duplicates() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "a\na\nb\n").unwrap();
        f.flush().unwrap();
        let (list, report) = import_guess_list(f.path(), 10, false).unwrap();
        assert_eq!(list.len(), 3);
        assert_eq!(report.duplicates_dropped, 0);
    }

    #[test]
    fn from_unique_rejects_duplicates() {
        let err = GuessList::from_unique("t", 10, ["a".to_string(), "a".to_string()]);
        assert!(err.is_err());
    }

    #[test]
    fn cracked_multiset_carries_target_counts() {
        let m = PasswordMultiset::from_counts("d", [("a", 2u64), ("c", 1)]);
        let list =
            GuessList::from_unique("g", 10, ["a".to_string(), "b".to_string()]).unwrap();
        let cracked = list.cracked_multiset(&m);
        assert_eq!(cracked.count("a"), 2);
        assert_eq!(cracked.count("b"), 0);
        assert_eq!(cracked.total(), 2);
    }

    #[test]
    fn written_lists_are_replayable() {
        let m = model(&[("b", 2), ("a", 7), ("z", 1)]);
        let list = generate_identity(&m, 10).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("guesses.txt");
        list.write(&path).unwrap();
        let (back, _) = import_guess_list(&path, 10, true).unwrap();
        assert_eq!(back.as_slice(), list.as_slice());
    }

    #[test]
    fn identical_training_yields_identical_lists() {
        let counts = [("x1", 4u64), ("x2", 4), ("abc", 9), ("zz", 1)];
        let m1 = PasswordMultiset::from_counts("t", counts);
        let m2 = PasswordMultiset::from_counts("t", counts.iter().rev().copied());
        let l1 = generate_identity(&train_identity(&m1).unwrap(), 10).unwrap();
        let l2 = generate_identity(&train_identity(&m2).unwrap(), 10).unwrap();
        assert_eq!(l1.as_slice(), l2.as_slice());
    }
}
