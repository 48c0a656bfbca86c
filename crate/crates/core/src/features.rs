//! Structural password features: character classes, length, and the joint
//! class-count x length distribution of a password list.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use unicode_properties::{GeneralCategory, UnicodeGeneralCategory};

use crate::corpus::PasswordMultiset;
use crate::error::{Error, Result};

/// The four character classes. Classification is total: every Unicode scalar
/// value maps to exactly one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharClass {
    Lowercase,
    Uppercase,
    Digit,
    Symbol,
}

/// Class membership follows Unicode general categories: Lu is uppercase,
/// Ll lowercase, Nd digit; titlecase, uncased letters, marks, spaces and
/// controls all count as symbols.
pub fn classify_char(ch: char) -> CharClass {
    match ch {
        'a'..='z' => CharClass::Lowercase,
        'A'..='Z' => CharClass::Uppercase,
        '0'..='9' => CharClass::Digit,
        c if c.is_ascii() => CharClass::Symbol,
        c => match c.general_category() {
            GeneralCategory::UppercaseLetter => CharClass::Uppercase,
            GeneralCategory::LowercaseLetter => CharClass::Lowercase,
            GeneralCategory::DecimalNumber => CharClass::Digit,
            _ => CharClass::Symbol,
        },
    }
}

/// Per-password structural features: length in Unicode scalar values and the
/// number of distinct character classes present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PasswordFeatures {
    pub length: u32,
    pub class_count: u8,
}

pub fn password_features(password: &str) -> PasswordFeatures {
    let mut length: u32 = 0;
    let mut seen = [false; 4];
    for ch in password.chars() {
        length += 1;
        seen[classify_char(ch) as usize] = true;
    }
    let class_count = seen.iter().filter(|&&s| s).count() as u8;
    PasswordFeatures { length, class_count }
}

/// How much each distinct password weighs in a feature distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Each occurrence counts (default for leaked datasets).
    ByOccurrence,
    /// Each distinct password counts once (guess lists have no duplicates).
    ByUnique,
}

/// Feature-matrix shape. Lengths above `l_max` accumulate in the final
/// overflow bucket so vectors stay comparable across lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureConfig {
    pub l_max: u32,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { l_max: 64 }
    }
}

/// Rows of the feature matrix: class counts 0 through 4. Row 0 carries only
/// the empty password, which is kept (and flagged) rather than dropped.
const CLASS_ROWS: usize = 5;

/// The joint distribution of (class count, length) over a password list,
/// flattened row-major with the class index outer.
///
/// Entries are nonnegative and sum to 1 for any nonempty source list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FeatureVectorRepr", into = "FeatureVectorRepr")]
pub struct FeatureVector {
    l_max: u32,
    weights: Vec<f64>,
}

impl FeatureVector {
    /// Build directly from flattened weights; shape must be `5 * (l_max + 1)`.
    #[doc(hidden)]
    pub fn from_raw(l_max: u32, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != CLASS_ROWS * (l_max as usize + 1) {
            return Err(Error::DimensionMismatch {
                left: weights.len(),
                right: CLASS_ROWS * (l_max as usize + 1),
            });
        }
        if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::Domain("feature weights must be finite and nonnegative".into()));
        }
        Ok(FeatureVector { l_max, weights })
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    /// Flattened weights, length `5 * (l_max + 1)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at (class_count, length); lengths above `l_max` read the
    /// overflow bucket.
    pub fn get(&self, class_count: u8, length: u32) -> f64 {
        debug_assert!(class_count < CLASS_ROWS as u8);
        self.weights[self.index(class_count, length)]
    }

    fn index(&self, class_count: u8, length: u32) -> usize {
        let cols = self.l_max as usize + 1;
        class_count as usize * cols + (length.min(self.l_max)) as usize
    }
}

/// Sparse JSON form: `{class_count: {length: weight}}` plus the shape.
#[derive(Serialize, Deserialize)]
struct FeatureVectorRepr {
    l_max: u32,
    weights: BTreeMap<u8, BTreeMap<u32, f64>>,
}

impl From<FeatureVector> for FeatureVectorRepr {
    fn from(v: FeatureVector) -> Self {
        let cols = v.l_max as usize + 1;
        let mut weights: BTreeMap<u8, BTreeMap<u32, f64>> = BTreeMap::new();
        for (i, &w) in v.weights.iter().enumerate() {
            if w != 0.0 {
                let class = (i / cols) as u8;
                let length = (i % cols) as u32;
                weights.entry(class).or_default().insert(length, w);
            }
        }
        FeatureVectorRepr { l_max: v.l_max, weights }
    }
}

impl TryFrom<FeatureVectorRepr> for FeatureVector {
    type Error = String;

    fn try_from(repr: FeatureVectorRepr) -> std::result::Result<Self, String> {
        let cols = repr.l_max as usize + 1;
        let mut weights = vec![0.0; CLASS_ROWS * cols];
        for (class, row) in repr.weights {
            if class as usize >= CLASS_ROWS {
                return Err(format!("class count {class} out of range"));
            }
            for (length, w) in row {
                if length > repr.l_max {
                    return Err(format!("length {length} exceeds l_max {}", repr.l_max));
                }
                if !(0.0..=1.0).contains(&w) {
                    return Err(format!("weight {w} outside [0, 1]"));
                }
                weights[class as usize * cols + length as usize] = w;
            }
        }
        Ok(FeatureVector { l_max: repr.l_max, weights })
    }
}

/// Exact integer tally of (class, length) cells; division happens once at the
/// end so the result is identical for any processing order.
fn tally_into(cells: &mut [u64], password: &str, weight: u64, l_max: u32) {
    let f = password_features(password);
    let cols = l_max as usize + 1;
    cells[f.class_count as usize * cols + f.length.min(l_max) as usize] += weight;
}

fn normalize(cells: Vec<u64>, l_max: u32) -> Result<FeatureVector> {
    let total: u64 = cells.iter().sum();
    if total == 0 {
        return Err(Error::Domain("feature vector of an empty list".into()));
    }
    let weights = cells.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(FeatureVector { l_max, weights })
}

fn weight_of(count: u64, weighting: Weighting) -> u64 {
    match weighting {
        Weighting::ByOccurrence => count,
        Weighting::ByUnique => 1,
    }
}

/// Feature distribution of a password multiset.
pub fn feature_vector(
    list: &PasswordMultiset,
    weighting: Weighting,
    config: &FeatureConfig,
) -> Result<FeatureVector> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let cols = config.l_max as usize + 1;
        let cells = list
            .iter()
            .collect::<Vec<_>>()
            .par_iter()
            .fold(
                || vec![0u64; CLASS_ROWS * cols],
                |mut cells, &(pw, count)| {
                    tally_into(&mut cells, pw, weight_of(count, weighting), config.l_max);
                    cells
                },
            )
            .reduce(
                || vec![0u64; CLASS_ROWS * cols],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
        normalize(cells, config.l_max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        feature_vector_seq(list, weighting, config)
    }
}

/// Sequential reference path for [`feature_vector`].
#[doc(hidden)]
pub fn feature_vector_seq(
    list: &PasswordMultiset,
    weighting: Weighting,
    config: &FeatureConfig,
) -> Result<FeatureVector> {
    let cols = config.l_max as usize + 1;
    let mut cells = vec![0u64; CLASS_ROWS * cols];
    for (pw, count) in list.iter() {
        tally_into(&mut cells, pw, weight_of(count, weighting), config.l_max);
    }
    normalize(cells, config.l_max)
}

/// Feature distribution of a plain password sequence, one unit of weight per
/// entry (the by-unique view used for guess lists).
pub fn feature_vector_of_passwords<S: AsRef<str> + Sync>(
    passwords: &[S],
    config: &FeatureConfig,
) -> Result<FeatureVector> {
    let cols = config.l_max as usize + 1;
    #[cfg(feature = "parallel")]
    let cells = {
        use rayon::prelude::*;
        passwords
            .par_iter()
            .fold(
                || vec![0u64; CLASS_ROWS * cols],
                |mut cells, pw| {
                    tally_into(&mut cells, pw.as_ref(), 1, config.l_max);
                    cells
                },
            )
            .reduce(
                || vec![0u64; CLASS_ROWS * cols],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    };
    #[cfg(not(feature = "parallel"))]
    let cells = {
        let mut cells = vec![0u64; CLASS_ROWS * cols];
        for pw in passwords {
            tally_into(&mut cells, pw.as_ref(), 1, config.l_max);
        }
        cells
    };
    normalize(cells, config.l_max)
}
