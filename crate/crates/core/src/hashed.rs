//! Salted-hash matching: counting how often candidate passwords occur in a
//! hashed target list, generalized Jaccard against hashed targets, and
//! success rates without ever inverting the hash.
//!
//! Entries are grouped by salt, so a candidate is hashed once per distinct
//! salt rather than once per entry; an unsalted target is the single-group
//! case. Digest comparison assumes the hash behaves injectively on the data:
//! a digest collision between distinct passwords would inflate match counts.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use md5::Md5;
use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};
use sha2::Sha256;

use crate::corpus::PasswordMultiset;
use crate::error::{Error, Result};
use crate::guessers::GuessList;
use crate::metrics::{finish_generalized_jaccard, Similarity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashAlgorithm {
    Sha1,
    Md5,
    Sha256,
    /// Digest = the input bytes themselves, hex-encoded. Testing only; must
    /// be flagged wherever results are reported.
    IdentityDebug,
}

impl HashAlgorithm {
    /// Digest size in bytes; `None` for the variable-length debug scheme.
    pub fn digest_len(&self) -> Option<usize> {
        match self {
            HashAlgorithm::Sha1 => Some(20),
            HashAlgorithm::Md5 => Some(16),
            HashAlgorithm::Sha256 => Some(32),
            HashAlgorithm::IdentityDebug => None,
        }
    }
}

/// Where the per-entry salt goes relative to the password bytes. `Append`
/// matches the usual `H(w + s)` convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaltPlacement {
    Append,
    Prepend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashScheme {
    pub algorithm: HashAlgorithm,
    pub salt_placement: SaltPlacement,
}

impl HashScheme {
    pub fn unsalted(algorithm: HashAlgorithm) -> Self {
        HashScheme { algorithm, salt_placement: SaltPlacement::Append }
    }
}

fn raw_digest(scheme: &HashScheme, password: &[u8], salt: &[u8]) -> Vec<u8> {
    let (first, second) = match scheme.salt_placement {
        SaltPlacement::Append => (password, salt),
        SaltPlacement::Prepend => (salt, password),
    };
    match scheme.algorithm {
        HashAlgorithm::Sha1 => {
            let mut h = Sha1::new();
            h.update(first);
            h.update(second);
            h.finalize().to_vec()
        }
        HashAlgorithm::Md5 => {
            let mut h = Md5::new();
            h.update(first);
            h.update(second);
            h.finalize().to_vec()
        }
        HashAlgorithm::Sha256 => {
            let mut h = Sha256::new();
            h.update(first);
            h.update(second);
            h.finalize().to_vec()
        }
        HashAlgorithm::IdentityDebug => {
            let mut out = Vec::with_capacity(first.len() + second.len());
            out.extend_from_slice(first);
            out.extend_from_slice(second);
            out
        }
    }
}

/// Lowercase hex digest of a password under the given salt and scheme.
pub fn hash_password(password: &str, salt: &[u8], scheme: &HashScheme) -> String {
    hex::encode(raw_digest(scheme, password.as_bytes(), salt))
}

#[derive(Debug)]
struct SaltGroup {
    salt: Vec<u8>,
    /// Raw digest bytes -> cell id into `cell_mult`.
    digests: HashMap<Box<[u8]>, u32>,
}

/// A salted-and-hashed password list, indexed for bulk matching.
#[derive(Debug)]
pub struct HashedTarget {
    scheme: HashScheme,
    total: u64,
    groups: Vec<SaltGroup>,
    cell_mult: Vec<u64>,
}

impl HashedTarget {
    /// Index a list of (hex digest, salt) entries. Digests are case-folded
    /// and length-checked against the algorithm.
    pub fn from_entries<S: AsRef<str>>(
        scheme: HashScheme,
        entries: impl IntoIterator<Item = (S, Vec<u8>)>,
    ) -> Result<Self> {
        let mut target = HashedTarget { scheme, total: 0, groups: Vec::new(), cell_mult: Vec::new() };
        let mut group_index: HashMap<Vec<u8>, usize> = HashMap::new();
        for (n, (digest_hex, salt)) in entries.into_iter().enumerate() {
            let raw = decode_digest(digest_hex.as_ref(), scheme.algorithm).map_err(|message| {
                Error::Parse { path: "<entries>".into(), line: n as u64 + 1, message }
            })?;
            target.push_entry(raw, salt, &mut group_index);
        }
        target.groups.sort_by(|a, b| a.salt.cmp(&b.salt));
        Ok(target)
    }

    /// Read a target file: one `<hex-digest>` or `<hex-digest>:<salt>` per
    /// line. Salts are percent-decoded, or hex-decoded when `salt_hex` is set.
    pub fn load(path: &Path, scheme: HashScheme, salt_hex: bool) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
        let mut reader = BufReader::new(file);
        let mut target = HashedTarget { scheme, total: 0, groups: Vec::new(), cell_mult: Vec::new() };
        let mut group_index: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut buf = Vec::new();
        let mut line_no = 0u64;
        loop {
            buf.clear();
            let n = reader
                .read_until(b'\n', &mut buf)
                .map_err(|e| Error::Io { path: path.into(), source: e })?;
            if n == 0 {
                break;
            }
            line_no += 1;
            if buf.last() == Some(&b'\n') {
                buf.pop();
            }
            let parse_err = |message: String| Error::Parse { path: path.into(), line: line_no, message };
            let line = std::str::from_utf8(&buf)
                .map_err(|_| parse_err("entry is not printable ASCII".into()))?;
            let (digest_part, salt_part) = match line.find(':') {
                Some(pos) => (&line[..pos], Some(&line[pos + 1..])),
                None => (line, None),
            };
            let raw = decode_digest(digest_part, scheme.algorithm).map_err(parse_err)?;
            let salt = match salt_part {
                None => Vec::new(),
                Some(field) if salt_hex => hex::decode(field)
                    .map_err(|e| parse_err(format!("invalid hex salt: {e}")))?,
                Some(field) => percent_decode(field).map_err(parse_err)?,
            };
            target.push_entry(raw, salt, &mut group_index);
        }
        target.groups.sort_by(|a, b| a.salt.cmp(&b.salt));
        Ok(target)
    }

    fn push_entry(&mut self, raw_digest: Vec<u8>, salt: Vec<u8>, index: &mut HashMap<Vec<u8>, usize>) {
        self.total += 1;
        let gid = *index.entry(salt.clone()).or_insert_with(|| {
            self.groups.push(SaltGroup { salt, digests: HashMap::new() });
            self.groups.len() - 1
        });
        let cell_mult = &mut self.cell_mult;
        let cell = *self.groups[gid]
            .digests
            .entry(raw_digest.into_boxed_slice())
            .or_insert_with(|| {
                cell_mult.push(0);
                (cell_mult.len() - 1) as u32
            });
        self.cell_mult[cell as usize] += 1;
    }

    pub fn scheme(&self) -> &HashScheme {
        &self.scheme
    }

    /// Number of entries, |B_h|.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn distinct_salts(&self) -> usize {
        self.groups.len()
    }

    /// Number of entries whose digest equals the candidate hashed under the
    /// entry's salt: g(w, B_h).
    pub fn match_count(&self, password: &str) -> u64 {
        self.groups
            .iter()
            .map(|g| {
                let digest = raw_digest(&self.scheme, password.as_bytes(), &g.salt);
                g.digests.get(digest.as_slice()).map_or(0, |&cell| self.cell_mult[cell as usize])
            })
            .sum()
    }

    /// Entries in deterministic order (salt, then digest), expanded to their
    /// multiplicity. Digests come back as lowercase hex.
    pub fn iter_entries(&self) -> impl Iterator<Item = (String, &[u8])> + '_ {
        self.groups.iter().flat_map(move |g| {
            let mut digests: Vec<(&Box<[u8]>, &u32)> = g.digests.iter().collect();
            digests.sort();
            digests.into_iter().flat_map(move |(raw, &cell)| {
                let n = self.cell_mult[cell as usize];
                std::iter::repeat_with(move || (hex::encode(raw), g.salt.as_slice())).take(n as usize)
            })
        })
    }

    /// Write the target file format; inverse of [`HashedTarget::load`] with
    /// percent-encoded salts.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
        let mut w = BufWriter::new(file);
        for (digest, salt) in self.iter_entries() {
            let line = if salt.is_empty() {
                digest
            } else {
                format!("{digest}:{}", percent_encode(salt))
            };
            writeln!(w, "{line}").map_err(|e| Error::Io { path: path.into(), source: e })?;
        }
        w.flush().map_err(|e| Error::Io { path: path.into(), source: e })
    }
}

fn decode_digest(hex_str: &str, algorithm: HashAlgorithm) -> std::result::Result<Vec<u8>, String> {
    let raw = hex::decode(hex_str.to_ascii_lowercase())
        .map_err(|e| format!("invalid hex digest {hex_str:?}: {e}"))?;
    if let Some(expected) = algorithm.digest_len() {
        if raw.len() != expected {
            return Err(format!(
                "digest has {} bytes, expected {expected} for {algorithm:?}",
                raw.len()
            ));
        }
    }
    Ok(raw)
}

/// Percent-encode salt bytes: anything outside printable ASCII, plus `:` and
/// `%` themselves, becomes `%XX`.
pub fn percent_encode(salt: &[u8]) -> String {
    let mut out = String::with_capacity(salt.len());
    for &b in salt {
        if (0x20..=0x7e).contains(&b) && b != b':' && b != b'%' {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02x}"));
        }
    }
    out
}

pub fn percent_decode(field: &str) -> std::result::Result<Vec<u8>, String> {
    let bytes = field.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes
                .get(i + 1..i + 3)
                .ok_or_else(|| format!("truncated percent escape in salt {field:?}"))?;
            let mut byte = [0u8];
            hex::decode_to_slice(hex, &mut byte)
                .map_err(|_| format!("invalid percent escape in salt {field:?}"))?;
            out.push(byte[0]);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    Ok(out)
}

/// Hash every occurrence of a multiset into a target, assigning each entry
/// the salt returned by `salt_for` (entry indices follow the canonical ranked
/// order). Pass a closure returning empty vectors for an unsalted target.
pub fn hash_multiset(
    source: &PasswordMultiset,
    scheme: HashScheme,
    mut salt_for: impl FnMut(u64) -> Vec<u8>,
) -> HashedTarget {
    let mut target = HashedTarget { scheme, total: 0, groups: Vec::new(), cell_mult: Vec::new() };
    let mut group_index: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut entry_idx = 0u64;
    for (pw, count) in source.ranked_entries() {
        for _ in 0..count {
            let salt = salt_for(entry_idx);
            let raw = raw_digest(&scheme, pw.as_bytes(), &salt);
            target.push_entry(raw, salt, &mut group_index);
            entry_idx += 1;
        }
    }
    target.groups.sort_by(|a, b| a.salt.cmp(&b.salt));
    target
}

/// Generalized Jaccard between a plaintext candidate list and a hashed
/// target, computed as F_min / (|A| + |B_h| - F_min) where F_min sums
/// min(o(w, A), g(w, B_h)) over the candidate support.
pub fn hashed_generalized_jaccard(
    candidate: &PasswordMultiset,
    target: &HashedTarget,
) -> Result<Similarity> {
    if candidate.is_empty() {
        return Err(Error::Domain("hashed generalized jaccard of an empty candidate".into()));
    }
    if target.is_empty() {
        return Err(Error::Domain("hashed generalized jaccard against an empty target".into()));
    }
    let f_min = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            candidate
                .entries()
                .par_iter()
                .map(|(pw, &c)| c.min(target.match_count(pw)))
                .sum::<u64>()
        }
        #[cfg(not(feature = "parallel"))]
        {
            f_min_seq(candidate, target)
        }
    };
    finish_generalized_jaccard(f_min, candidate.total(), target.total())
}

/// Sequential reference path for [`hashed_generalized_jaccard`].
#[doc(hidden)]
pub fn hashed_generalized_jaccard_seq(
    candidate: &PasswordMultiset,
    target: &HashedTarget,
) -> Result<Similarity> {
    if candidate.is_empty() || target.is_empty() {
        return Err(Error::Domain("hashed generalized jaccard of an empty input".into()));
    }
    finish_generalized_jaccard(f_min_seq(candidate, target), candidate.total(), target.total())
}

fn f_min_seq(candidate: &PasswordMultiset, target: &HashedTarget) -> u64 {
    candidate.iter().map(|(pw, c)| c.min(target.match_count(pw))).sum()
}

/// Which target cells a guess list cracks, and with which guess.
pub struct CrackAttribution {
    /// (1-based index of the first cracking guess, entry multiplicity),
    /// sorted by index.
    matched: Vec<(u64, u64)>,
    total_entries: u64,
}

impl CrackAttribution {
    pub fn matched(&self) -> &[(u64, u64)] {
        &self.matched
    }

    pub fn total_entries(&self) -> u64 {
        self.total_entries
    }

    /// Entries cracked by the full list.
    pub fn cracked_entries(&self) -> u64 {
        self.matched.iter().map(|&(_, mult)| mult).sum()
    }

    /// Entries cracked by the first `prefix` guesses.
    pub fn cracked_by(&self, prefix: u64) -> u64 {
        self.matched
            .iter()
            .take_while(|&&(idx, _)| idx <= prefix)
            .map(|&(_, mult)| mult)
            .sum()
    }
}

/// Match every guess against the target and record, per cracked cell, the
/// first guess that cracked it. The per-cell minimum makes the result
/// independent of evaluation order.
pub fn crack_attribution(guesses: &GuessList, target: &HashedTarget) -> CrackAttribution {
    let n_cells = target.cell_mult.len();
    let first = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            guesses
                .as_slice()
                .par_iter()
                .enumerate()
                .fold(
                    || vec![u64::MAX; n_cells],
                    |mut first, (i, guess)| {
                        record_guess(&mut first, target, i as u64 + 1, guess);
                        first
                    },
                )
                .reduce(
                    || vec![u64::MAX; n_cells],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x = (*x).min(y);
                        }
                        a
                    },
                )
        }
        #[cfg(not(feature = "parallel"))]
        {
            first_crack_seq(guesses, target)
        }
    };
    collect_attribution(first, target)
}

/// Sequential reference path for [`crack_attribution`].
#[doc(hidden)]
pub fn crack_attribution_seq(guesses: &GuessList, target: &HashedTarget) -> CrackAttribution {
    collect_attribution(first_crack_seq(guesses, target), target)
}

fn first_crack_seq(guesses: &GuessList, target: &HashedTarget) -> Vec<u64> {
    let mut first = vec![u64::MAX; target.cell_mult.len()];
    for (i, guess) in guesses.as_slice().iter().enumerate() {
        record_guess(&mut first, target, i as u64 + 1, guess);
    }
    first
}

fn record_guess(first: &mut [u64], target: &HashedTarget, index: u64, guess: &str) {
    for group in &target.groups {
        let digest = raw_digest(&target.scheme, guess.as_bytes(), &group.salt);
        if let Some(&cell) = group.digests.get(digest.as_slice()) {
            let slot = &mut first[cell as usize];
            *slot = (*slot).min(index);
        }
    }
}

fn collect_attribution(first: Vec<u64>, target: &HashedTarget) -> CrackAttribution {
    let mut matched: Vec<(u64, u64)> = first
        .into_iter()
        .zip(&target.cell_mult)
        .filter(|&(idx, _)| idx != u64::MAX)
        .map(|(idx, &mult)| (idx, mult))
        .collect();
    matched.sort_unstable();
    CrackAttribution { matched, total_entries: target.total }
}

/// Fraction of target entries cracked by any guess in the list.
pub fn hashed_success_rate(guesses: &GuessList, target: &HashedTarget) -> Result<f64> {
    if target.is_empty() {
        return Err(Error::Domain("success rate against an empty target".into()));
    }
    let attribution = crack_attribution(guesses, target);
    Ok(attribution.cracked_entries() as f64 / target.total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::generalized_jaccard;
    use proptest::prelude::*;

    fn scheme(algorithm: HashAlgorithm) -> HashScheme {
        HashScheme::unsalted(algorithm)
    }

    fn guess_list(words: &[&str]) -> GuessList {
        GuessList::from_unique("test", words.len() as u64, words.iter().map(|w| w.to_string()))
            .unwrap()
    }

    #[test]
    fn known_digests() {
        assert_eq!(
            hash_password("abc", b"", &scheme(HashAlgorithm::Sha1)),
            "a9993e364706816aba3e25717850c26c9cd0d89d"
        );
        assert_eq!(
            hash_password("abc", b"", &scheme(HashAlgorithm::Md5)),
            "900150983cd24fb0d6963f7d28e17f72"
        );
        assert_eq!(
            hash_password("abc", b"", &scheme(HashAlgorithm::Sha256)),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn identity_debug_digests() {
        assert_eq!(hash_password("abc", b"", &scheme(HashAlgorithm::IdentityDebug)), "616263");
        assert_eq!(hash_password("ab", b"c", &scheme(HashAlgorithm::IdentityDebug)), "616263");
        let prepend = HashScheme {
            algorithm: HashAlgorithm::IdentityDebug,
            salt_placement: SaltPlacement::Prepend,
        };
        assert_eq!(hash_password("bc", b"a", &prepend), "616263");
    }

    #[test]
    fn salt_placement_changes_fixed_hashes() {
        let append = HashScheme { algorithm: HashAlgorithm::Sha1, salt_placement: SaltPlacement::Append };
        let prepend =
            HashScheme { algorithm: HashAlgorithm::Sha1, salt_placement: SaltPlacement::Prepend };
        assert_ne!(hash_password("pw", b"salt", &append), hash_password("pw", b"salt", &prepend));
        // H(pw + salt) under append equals H(salt + pw) under prepend with swapped roles.
        assert_eq!(hash_password("pw", b"salt", &append), hash_password("salt", b"pw", &prepend));
    }

    #[test]
    fn match_count_examples() {
        let m = PasswordMultiset::from_counts("t", [("abc", 3u64), ("xyz", 1)]);
        let target = hash_multiset(&m, scheme(HashAlgorithm::Sha1), |_| Vec::new());
        assert_eq!(target.match_count("abc"), 3);
        assert_eq!(target.match_count("xyz"), 1);
        assert_eq!(target.match_count("nope"), 0);
        assert_eq!(target.distinct_salts(), 1);
    }

    #[test]
    fn salted_match_counts_per_entry_salts() {
        // "abc" under two distinct salts, "zzz" under one of them.
        let sch = scheme(HashAlgorithm::Sha1);
        let entries = vec![
            (hash_password("abc", b"s1", &sch), b"s1".to_vec()),
            (hash_password("abc", b"s2", &sch), b"s2".to_vec()),
            (hash_password("zzz", b"s1", &sch), b"s1".to_vec()),
        ];
        let target = HashedTarget::from_entries(sch, entries).unwrap();
        assert_eq!(target.distinct_salts(), 2);
        assert_eq!(target.match_count("abc"), 2);
        assert_eq!(target.match_count("zzz"), 1);
        assert_eq!(target.match_count("abd"), 0);
    }

    #[test]
    fn digests_are_case_folded_on_load() {
        let sch = scheme(HashAlgorithm::Sha1);
        let upper = hash_password("abc", b"", &sch).to_ascii_uppercase();
        let target = HashedTarget::from_entries(sch, [(upper, Vec::new())]).unwrap();
        assert_eq!(target.match_count("abc"), 1);
    }

    #[test]
    fn wrong_digest_length_is_rejected() {
        let err = HashedTarget::from_entries(scheme(HashAlgorithm::Sha1), [("abcd", Vec::new())]);
        assert!(err.is_err());
    }

    #[test]
    fn self_comparison_is_one() {
        let m = PasswordMultiset::from_counts("t", [("abc", 2u64), ("", 1), ("x y", 3)]);
        let target = hash_multiset(&m, scheme(HashAlgorithm::IdentityDebug), |_| Vec::new());
        assert_eq!(hashed_generalized_jaccard(&m, &target).unwrap().value, 1.0);
    }

    #[test]
    fn disjoint_preimages_give_zero() {
        let a = PasswordMultiset::from_counts("a", [("one", 2u64)]);
        let b = PasswordMultiset::from_counts("b", [("two", 2u64)]);
        let target = hash_multiset(&b, scheme(HashAlgorithm::Sha1), |_| Vec::new());
        assert_eq!(hashed_generalized_jaccard(&a, &target).unwrap().value, 0.0);
    }

    #[test]
    fn success_rate_examples() {
        let b = PasswordMultiset::from_counts("b", [("a", 1u64), ("b", 1), ("c", 1), ("d", 1)]);
        let target = hash_multiset(&b, scheme(HashAlgorithm::Sha1), |_| Vec::new());
        assert_eq!(hashed_success_rate(&guess_list(&[]), &target).unwrap(), 0.0);
        assert_eq!(hashed_success_rate(&guess_list(&["a", "b", "c", "d"]), &target).unwrap(), 1.0);
        assert_eq!(hashed_success_rate(&guess_list(&["a", "c"]), &target).unwrap(), 0.5);
    }

    #[test]
    fn attribution_records_first_cracking_guess() {
        let b = PasswordMultiset::from_counts("b", [("a", 2u64), ("c", 1)]);
        let target = hash_multiset(&b, scheme(HashAlgorithm::Sha1), |_| Vec::new());
        let attr = crack_attribution(&guess_list(&["x", "c", "a"]), &target);
        assert_eq!(attr.matched(), &[(2, 1), (3, 2)]);
        assert_eq!(attr.cracked_by(1), 0);
        assert_eq!(attr.cracked_by(2), 1);
        assert_eq!(attr.cracked_by(3), 3);
    }

    #[test]
    fn file_roundtrip_with_awkward_salts() {
        let sch = HashScheme { algorithm: HashAlgorithm::Sha256, salt_placement: SaltPlacement::Prepend };
        let salts: Vec<Vec<u8>> = vec![b"".to_vec(), b"plain".to_vec(), b"a:b%c".to_vec(), vec![0, 255, 10]];
        let entries: Vec<(String, Vec<u8>)> = salts
            .iter()
            .enumerate()
            .map(|(i, s)| (hash_password(&format!("pw{i}"), s, &sch), s.clone()))
            .collect();
        let target = HashedTarget::from_entries(sch, entries).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dump.txt");
        target.write(&path).unwrap();
        let back = HashedTarget::load(&path, sch, false).unwrap();
        assert_eq!(back.total(), target.total());
        for (i, s) in salts.iter().enumerate() {
            assert_eq!(back.match_count(&format!("pw{i}")), 1, "salt {s:?}");
        }
    }

    #[test]
    fn salt_hex_mode_decodes_hex_salts() {
        let sch = scheme(HashAlgorithm::Md5);
        let digest = hash_password("pw", &[0xde, 0xad], &sch);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dump.txt");
        std::fs::write(&path, format!("{digest}:dead\n")).unwrap();
        let target = HashedTarget::load(&path, sch, true).unwrap();
        assert_eq!(target.match_count("pw"), 1);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dump.txt");
        let good = hash_password("x", b"", &scheme(HashAlgorithm::Sha1));
        std::fs::write(&path, format!("{good}\nnot-hex!!\n")).unwrap();
        match HashedTarget::load(&path, scheme(HashAlgorithm::Sha1), false).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    fn arb_multiset() -> impl Strategy<Value = PasswordMultiset> {
        proptest::collection::vec(("[a-b0-1]{0,3}", 1u64..8), 1..20)
            .prop_map(|pairs| PasswordMultiset::from_counts("p", pairs))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// Hashed-target generalized Jaccard equals the plaintext value exactly,
        /// salted or not, for every scheme.
        #[test]
        fn hashed_equals_plaintext(a in arb_multiset(), b in arb_multiset(), salted in any::<bool>()) {
            for algorithm in [
                HashAlgorithm::Sha1,
                HashAlgorithm::Md5,
                HashAlgorithm::Sha256,
                HashAlgorithm::IdentityDebug,
            ] {
                for placement in [SaltPlacement::Append, SaltPlacement::Prepend] {
                    let sch = HashScheme { algorithm, salt_placement: placement };
                    let target = hash_multiset(&b, sch, |i| {
                        if salted { format!("s{}", i % 5).into_bytes() } else { Vec::new() }
                    });
                    let expected = generalized_jaccard(&a, &b).unwrap().value;
                    let got = hashed_generalized_jaccard(&a, &target).unwrap().value;
                    prop_assert_eq!(got, expected);
                }
            }
        }

        /// The grouped index agrees with a naive per-entry scan.
        #[test]
        fn match_count_agrees_with_linear_scan(b in arb_multiset(), w in "[a-b0-1]{0,3}") {
            let sch = scheme(HashAlgorithm::Sha1);
            let target = hash_multiset(&b, sch, |i| format!("s{}", i % 3).into_bytes());
            let naive = target
                .iter_entries()
                .filter(|(digest, salt)| *digest == hash_password(&w, salt, &sch))
                .count() as u64;
            prop_assert_eq!(target.match_count(&w), naive);
        }

        /// Results do not depend on entry order.
        #[test]
        fn entry_order_does_not_matter(b in arb_multiset(), w in "[a-b0-1]{0,3}") {
            let sch = scheme(HashAlgorithm::Md5);
            let forward: Vec<(String, Vec<u8>)> = b
                .ranked_entries()
                .iter()
                .enumerate()
                .flat_map(|(i, (pw, c))| {
                    (0..*c).map(move |_| {
                        let salt = format!("s{}", i % 3).into_bytes();
                        (hash_password(pw, &salt, &sch), salt)
                    })
                })
                .collect();
            let mut reversed = forward.clone();
            reversed.reverse();
            let t1 = HashedTarget::from_entries(sch, forward).unwrap();
            let t2 = HashedTarget::from_entries(sch, reversed).unwrap();
            prop_assert_eq!(t1.match_count(&w), t2.match_count(&w));
            let probe = PasswordMultiset::from_counts("probe", [(w.as_str(), 2u64)]);
            if !probe.is_empty() && !t1.is_empty() {
                prop_assert_eq!(
                    hashed_generalized_jaccard(&probe, &t1).unwrap().value,
                    hashed_generalized_jaccard(&probe, &t2).unwrap().value
                );
            }
        }
    }
}
