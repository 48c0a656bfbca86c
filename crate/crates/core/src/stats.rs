//! Framework statistics over guessers x training sets x targets: success
//! rates and their means, guessing/training similarity, successful guessing
//! similarity, and Pearson correlation.

use std::borrow::Cow;
use std::collections::HashMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::PasswordMultiset;
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::guessers::{import_guess_list, GuessList};
use crate::metrics::{cosine, generalized_jaccard, jaccard};

/// What counts as the target size in a success rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// Accounts cracked: duplicated passwords weigh proportionally (default).
    Total,
    /// Distinct passwords cracked.
    Unique,
}

/// Fraction of the target cracked by the guess list (accounts convention).
pub fn success_rate(guesses: &GuessList, target: &PasswordMultiset) -> Result<f64> {
    success_rate_with(guesses, target, Denominator::Total)
}

/// Success rate with an explicit denominator convention.
///
/// The sum runs over the target support, so a duplicate guess in a raw list
/// cannot double-count a password.
pub fn success_rate_with(
    guesses: &GuessList,
    target: &PasswordMultiset,
    denominator: Denominator,
) -> Result<f64> {
    if target.is_empty() {
        return Err(Error::Domain("success rate against an empty target".into()));
    }
    let guess_set = guesses.guess_set();
    let weight = |count: u64| match denominator {
        Denominator::Total => count,
        Denominator::Unique => 1,
    };
    let cracked: u64 = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            target
                .entries()
                .par_iter()
                .map(|(pw, &c)| if guess_set.contains(pw.as_ref()) { weight(c) } else { 0 })
                .sum()
        }
        #[cfg(not(feature = "parallel"))]
        {
            target
                .iter()
                .map(|(pw, c)| if guess_set.contains(pw) { weight(c) } else { 0 })
                .sum()
        }
    };
    let denom = match denominator {
        Denominator::Total => target.total(),
        Denominator::Unique => target.unique(),
    };
    Ok(cracked as f64 / denom as f64)
}

/// Success rates s_ijk for guesser i trained on dataset j, tested against
/// dataset k (j != k). Cells default to missing.
#[derive(Debug, Clone)]
pub struct SuccessTensor {
    guessers: Vec<String>,
    datasets: Vec<String>,
    cells: Vec<Option<f64>>,
}

impl SuccessTensor {
    pub fn new(guessers: Vec<String>, datasets: Vec<String>) -> Self {
        let cells = vec![None; guessers.len() * datasets.len() * datasets.len()];
        SuccessTensor { guessers, datasets, cells }
    }

    pub fn guessers(&self) -> &[String] {
        &self.guessers
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.datasets.len();
        (i * n + j) * n + k
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) -> Result<()> {
        if i >= self.guessers.len() || j >= self.datasets.len() || k >= self.datasets.len() {
            return Err(Error::Config(format!("tensor index ({i},{j},{k}) out of range")));
        }
        if j == k {
            return Err(Error::Config("success rate requires training != target".into()));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Config(format!("success rate {value} outside [0, 1]")));
        }
        let idx = self.index(i, j, k);
        self.cells[idx] = Some(value);
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Option<f64> {
        self.cells.get(self.index(i, j, k)).copied().flatten()
    }

    fn require(&self, i: usize, j: usize, k: usize) -> Result<f64> {
        self.get(i, j, k).ok_or_else(|| {
            Error::IncompleteGrid(format!(
                "missing cell (guesser {}, training {}, target {})",
                self.guessers[i], self.datasets[j], self.datasets[k]
            ))
        })
    }

    fn check_cross(&self) -> Result<()> {
        if self.datasets.len() < 2 {
            return Err(Error::IncompleteGrid(
                "cross statistics need at least two datasets".into(),
            ));
        }
        Ok(())
    }

    /// Mean success rate of guesser i over all distinct training/testing pairs.
    pub fn mean_guesser_success(&self, i: usize) -> Result<f64> {
        self.check_cross()?;
        let n = self.datasets.len();
        let mut sum = 0.0;
        for j in 0..n {
            for k in 0..n {
                if k != j {
                    sum += self.require(i, j, k)?;
                }
            }
        }
        Ok(sum / (n * (n - 1)) as f64)
    }

    /// Mean success rate of training dataset j over all guessers and targets.
    pub fn mean_training_success(&self, j: usize) -> Result<f64> {
        self.check_cross()?;
        let m = self.guessers.len();
        let n = self.datasets.len();
        let mut sum = 0.0;
        for i in 0..m {
            for k in 0..n {
                if k != j {
                    sum += self.require(i, j, k)?;
                }
            }
        }
        Ok(sum / (m * (n - 1)) as f64)
    }

    /// Mean success rate of guesser i trained on dataset j over all targets.
    pub fn mean_pair_success(&self, i: usize, j: usize) -> Result<f64> {
        self.check_cross()?;
        let n = self.datasets.len();
        let mut sum = 0.0;
        for k in 0..n {
            if k != j {
                sum += self.require(i, j, k)?;
            }
        }
        Ok(sum / (n - 1) as f64)
    }
}

/// Where a grid cell's guess list comes from. File-backed cells are loaded
/// per use, so the grid never holds all m x n lists at once.
#[derive(Debug, Clone)]
pub enum GuessListSource {
    Memory(GuessList),
    File { path: PathBuf, dedupe: bool },
}

/// The experiment layout: m guessers by n datasets with a guess list per
/// (guesser, training dataset) cell.
pub struct ExperimentGrid {
    guessers: Vec<String>,
    datasets: Vec<PasswordMultiset>,
    lists: HashMap<(usize, usize), GuessListSource>,
    cutoff: u64,
    feature_config: FeatureConfig,
}

impl ExperimentGrid {
    pub fn new(cutoff: u64) -> Self {
        ExperimentGrid {
            guessers: Vec::new(),
            datasets: Vec::new(),
            lists: HashMap::new(),
            cutoff,
            feature_config: FeatureConfig::default(),
        }
    }

    pub fn with_feature_config(mut self, config: FeatureConfig) -> Self {
        self.feature_config = config;
        self
    }

    pub fn add_guesser(&mut self, label: impl Into<String>) -> usize {
        self.guessers.push(label.into());
        self.guessers.len() - 1
    }

    pub fn add_dataset(&mut self, dataset: PasswordMultiset) -> usize {
        self.datasets.push(dataset);
        self.datasets.len() - 1
    }

    pub fn set_list(&mut self, guesser: usize, training: usize, source: GuessListSource) {
        self.lists.insert((guesser, training), source);
    }

    pub fn guesser_labels(&self) -> &[String] {
        &self.guessers
    }

    pub fn datasets(&self) -> &[PasswordMultiset] {
        &self.datasets
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.feature_config
    }

    /// Load the guess list for (guesser, training), from memory or disk.
    pub fn load_list(&self, guesser: usize, training: usize) -> Result<Cow<'_, GuessList>> {
        match self.lists.get(&(guesser, training)) {
            Some(GuessListSource::Memory(list)) => Ok(Cow::Borrowed(list)),
            Some(GuessListSource::File { path, dedupe }) => {
                let (mut list, _) = import_guess_list(path, self.cutoff, *dedupe)?;
                list.set_source(format!(
                    "{}:{}",
                    self.guessers[guesser],
                    self.datasets[training].label()
                ));
                Ok(Cow::Owned(list))
            }
            None => Err(Error::IncompleteGrid(format!(
                "no guess list for (guesser {}, training {})",
                self.guessers.get(guesser).map(String::as_str).unwrap_or("?"),
                self.datasets.get(training).map(|d| d.label()).unwrap_or("?")
            ))),
        }
    }
}

/// Guess-list comparison metrics usable in Eq-5/Eq-7 style statistics.
/// Cosine compares by-unique feature vectors; Jaccard compares guess sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ListMetric {
    Cosine,
    Jaccard,
}

fn list_metric(a: &GuessList, b: &GuessList, metric: ListMetric, cfg: &FeatureConfig) -> Result<f64> {
    match metric {
        ListMetric::Cosine => {
            let va = a.feature_vector(cfg)?;
            let vb = b.feature_vector(cfg)?;
            Ok(cosine(&va, &vb)?.value)
        }
        ListMetric::Jaccard => Ok(jaccard(&a.guess_set(), &b.guess_set())?.value),
    }
}

/// Mean similarity of two guessers' guess lists over all training datasets.
pub fn guessing_similarity(
    grid: &ExperimentGrid,
    i1: usize,
    i2: usize,
    metric: ListMetric,
) -> Result<f64> {
    let n = grid.datasets.len();
    if n == 0 {
        return Err(Error::IncompleteGrid("grid has no datasets".into()));
    }
    let mut sum = 0.0;
    for k in 0..n {
        let a = grid.load_list(i1, k)?;
        let b = grid.load_list(i2, k)?;
        sum += list_metric(&a, &b, metric, &grid.feature_config)?;
    }
    Ok(sum / n as f64)
}

/// Mean similarity of the guess lists a fixed guesser produces from two
/// training datasets, averaged over guessers.
pub fn training_similarity(
    grid: &ExperimentGrid,
    j1: usize,
    j2: usize,
    metric: ListMetric,
) -> Result<f64> {
    let m = grid.guessers.len();
    if m == 0 {
        return Err(Error::IncompleteGrid("grid has no guessers".into()));
    }
    let mut sum = 0.0;
    for i in 0..m {
        let a = grid.load_list(i, j1)?;
        let b = grid.load_list(i, j2)?;
        sum += list_metric(&a, &b, metric, &grid.feature_config)?;
    }
    Ok(sum / m as f64)
}

/// Eq-6 style result: the mean over defined terms, plus how many 0/0 terms
/// (both cracked multisets empty) were excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuccessfulGuessingSimilarity {
    pub value: f64,
    pub skipped_terms: u64,
}

/// Generalized Jaccard between two guessers' cracked-password multisets,
/// averaged over (training k, target l != k) pairs. Cracked passwords are
/// weighted by their frequency in the target.
pub fn successful_guessing_similarity(
    grid: &ExperimentGrid,
    i1: usize,
    i2: usize,
) -> Result<SuccessfulGuessingSimilarity> {
    let n = grid.datasets.len();
    if n < 2 {
        return Err(Error::IncompleteGrid("successful guessing similarity needs n >= 2".into()));
    }
    let mut sum = 0.0;
    let mut included = 0u64;
    let mut skipped = 0u64;
    for k in 0..n {
        let a = grid.load_list(i1, k)?;
        let b = grid.load_list(i2, k)?;
        for l in 0..n {
            if l == k {
                continue;
            }
            let target = &grid.datasets[l];
            let cracked_a = a.cracked_multiset(target);
            let cracked_b = b.cracked_multiset(target);
            if cracked_a.is_empty() && cracked_b.is_empty() {
                skipped += 1;
                continue;
            }
            sum += generalized_jaccard(&cracked_a, &cracked_b)?.value;
            included += 1;
        }
    }
    if included == 0 {
        return Err(Error::Domain(
            "every (training, target) term had empty cracked multisets".into(),
        ));
    }
    Ok(SuccessfulGuessingSimilarity { value: sum / included as f64, skipped_terms: skipped })
}

/// Fill the full success tensor from the grid, one cell per
/// (guesser, training, target != training) triple.
pub fn success_tensor(grid: &ExperimentGrid, denominator: Denominator) -> Result<SuccessTensor> {
    let labels: Vec<String> = grid.datasets.iter().map(|d| d.label().to_string()).collect();
    let mut tensor = SuccessTensor::new(grid.guessers.clone(), labels);
    let m = grid.guessers.len();
    let n = grid.datasets.len();
    let pairs: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();

    let compute = |&(i, j): &(usize, usize)| -> Result<Vec<(usize, usize, usize, f64)>> {
        let list = grid.load_list(i, j)?;
        let mut cells = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n {
            if k != j {
                let rate = success_rate_with(&list, &grid.datasets[k], denominator)?;
                cells.push((i, j, k, rate));
            }
        }
        Ok(cells)
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Vec<(usize, usize, usize, f64)>> = {
        use rayon::prelude::*;
        pairs.par_iter().map(compute).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Vec<(usize, usize, usize, f64)>> =
        pairs.iter().map(compute).collect::<Result<_>>()?;

    for cells in results {
        for (i, j, k, rate) in cells {
            tensor.set(i, j, k, rate)?;
        }
    }
    Ok(tensor)
}

/// Sample Pearson correlation with a two-sided p-value from the t statistic
/// against Student's t with n-2 degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { left: x.len(), right: y.len() });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Domain("pearson needs at least 3 points".into()));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Domain("pearson undefined for zero-variance input".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok((r, pearson_p_value(r, n)))
}

/// Two-sided p-value for a sample correlation r over n points:
/// P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2) with nu = n - 2 degrees of freedom.
pub fn pearson_p_value(r: f64, n: usize) -> f64 {
    let nu = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t2 = r * r * nu / (1.0 - r * r);
    statrs::function::beta::beta_reg(nu / 2.0, 0.5, nu / (nu + t2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guessers::{generate_identity, train_identity};

    fn list(words: &[&str]) -> GuessList {
        GuessList::from_unique("g", 1_000_000, words.iter().map(|w| w.to_string())).unwrap()
    }

    fn mem(list: GuessList) -> GuessListSource {
        GuessListSource::Memory(list)
    }

    #[test]
    fn success_rate_examples() {
        let target = PasswordMultiset::from_counts("d", [("a", 2u64), ("c", 1)]);
        // Oracle: per-occurrence scan cracks a twice out of three accounts.
        assert_eq!(success_rate(&list(&["a", "b"]), &target).unwrap(), 2.0 / 3.0);
        assert_eq!(success_rate(&list(&["a", "c", "z"]), &target).unwrap(), 1.0);
        assert_eq!(success_rate(&list(&["x"]), &target).unwrap(), 0.0);
        assert!(success_rate(&list(&["a"]), &PasswordMultiset::new("e")).is_err());
    }

    #[test]
    fn unique_denominator_variant() {
        let target = PasswordMultiset::from_counts("d", [("a", 2u64), ("c", 1)]);
        let rate = success_rate_with(&list(&["a", "b"]), &target, Denominator::Unique).unwrap();
        assert_eq!(rate, 0.5);
    }

    #[test]
    fn identity_self_coverage_is_total() {
        let d = PasswordMultiset::from_counts("d", [("a", 5u64), ("b", 2), ("", 1)]);
        let full = generate_identity(&train_identity(&d).unwrap(), u64::MAX).unwrap();
        assert_eq!(success_rate(&full, &d).unwrap(), 1.0);
    }

    #[test]
    fn success_rate_monotone_in_prefix() {
        let target = PasswordMultiset::from_counts("d", [("a", 3u64), ("b", 1), ("c", 2)]);
        let words = ["x", "b", "y", "a", "c"];
        let mut prev = 0.0;
        for k in 1..=words.len() {
            let rate = success_rate(&list(&words[..k]), &target).unwrap();
            assert!(rate >= prev);
            prev = rate;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn tensor_means_match_direct_averages() {
        let mut t = SuccessTensor::new(vec!["g".into()], vec!["d1".into(), "d2".into()]);
        t.set(0, 0, 1, 0.2).unwrap();
        t.set(0, 1, 0, 0.4).unwrap();
        // Oracle: direct average of the two cells.
        assert!((t.mean_guesser_success(0).unwrap() - 0.3).abs() < 1e-15);
        // With n=2, Eq-10 and Eq-11 reduce to per-cell values for m=1.
        assert_eq!(t.mean_pair_success(0, 0).unwrap(), 0.2);
        assert_eq!(t.mean_pair_success(0, 1).unwrap(), 0.4);
        assert!((t.mean_training_success(0).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn tensor_reduces_to_constant_on_constant_cells() {
        let guessers = vec!["a".into(), "b".into()];
        let datasets = vec!["x".into(), "y".into(), "z".into()];
        let mut t = SuccessTensor::new(guessers, datasets);
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..3 {
                    if j != k {
                        t.set(i, j, k, 0.25).unwrap();
                    }
                }
            }
        }
        assert_eq!(t.mean_guesser_success(1).unwrap(), 0.25);
        assert_eq!(t.mean_training_success(2).unwrap(), 0.25);
        assert_eq!(t.mean_pair_success(0, 1).unwrap(), 0.25);
    }

    #[test]
    fn tensor_random_cells_match_hand_sum() {
        // m=2, n=3 oracle by direct summation.
        let cells = [
            (0, 0, 1, 0.1),
            (0, 0, 2, 0.2),
            (0, 1, 0, 0.3),
            (0, 1, 2, 0.4),
            (0, 2, 0, 0.5),
            (0, 2, 1, 0.6),
            (1, 0, 1, 0.15),
            (1, 0, 2, 0.25),
            (1, 1, 0, 0.35),
            (1, 1, 2, 0.45),
            (1, 2, 0, 0.55),
            (1, 2, 1, 0.65),
        ];
        let mut t = SuccessTensor::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into(), "z".into()],
        );
        for &(i, j, k, v) in &cells {
            t.set(i, j, k, v).unwrap();
        }
        let hand: f64 = cells.iter().filter(|&&(i, ..)| i == 0).map(|&(.., v)| v).sum::<f64>() / 6.0;
        assert!((t.mean_guesser_success(0).unwrap() - hand).abs() < 1e-15);
        let hand_j1: f64 =
            cells.iter().filter(|&&(_, j, ..)| j == 1).map(|&(.., v)| v).sum::<f64>() / 4.0;
        assert!((t.mean_training_success(1).unwrap() - hand_j1).abs() < 1e-15);
    }

    #[test]
    fn degenerate_or_incomplete_tensors_error() {
        let mut single = SuccessTensor::new(vec!["g".into()], vec!["only".into()]);
        assert!(single.set(0, 0, 0, 0.5).is_err());
        assert!(single.mean_guesser_success(0).is_err());

        let sparse = SuccessTensor::new(vec!["g".into()], vec!["a".into(), "b".into()]);
        assert!(matches!(sparse.mean_guesser_success(0), Err(Error::IncompleteGrid(_))));
    }

    fn toy_grid() -> ExperimentGrid {
        // Two guessers, two datasets; Jaccard overlaps 1/3 (on d1) and 1/2 (on d2).
        let mut grid = ExperimentGrid::new(1_000_000);
        let ga = grid.add_guesser("A");
        let gb = grid.add_guesser("B");
        let d1 = grid.add_dataset(PasswordMultiset::from_counts("d1", [("p", 2u64), ("q", 1)]));
        let d2 = grid.add_dataset(PasswordMultiset::from_counts("d2", [("q", 3u64), ("r", 1)]));
        grid.set_list(ga, d1, mem(list(&["a", "b"])));
        grid.set_list(gb, d1, mem(list(&["b", "c"])));
        grid.set_list(ga, d2, mem(list(&["x", "y"])));
        grid.set_list(gb, d2, mem(list(&["x", "y", "z", "w"])));
        grid
    }

    #[test]
    fn guessing_similarity_toy_case() {
        let grid = toy_grid();
        // Oracle: per-dataset Jaccard then mean: (1/3 + 1/2) / 2 = 5/12.
        let v = guessing_similarity(&grid, 0, 1, ListMetric::Jaccard).unwrap();
        assert!((v - 5.0 / 12.0).abs() < 1e-15);
        assert_eq!(guessing_similarity(&grid, 0, 0, ListMetric::Jaccard).unwrap(), 1.0);
        assert_eq!(guessing_similarity(&grid, 1, 1, ListMetric::Cosine).unwrap(), 1.0);
    }

    #[test]
    fn guessing_similarity_disjoint_lists_is_zero() {
        let mut grid = ExperimentGrid::new(100);
        let ga = grid.add_guesser("A");
        let gb = grid.add_guesser("B");
        let d = grid.add_dataset(PasswordMultiset::from_counts("d", [("x", 1u64)]));
        grid.set_list(ga, d, mem(list(&["a"])));
        grid.set_list(gb, d, mem(list(&["b"])));
        assert_eq!(guessing_similarity(&grid, 0, 1, ListMetric::Jaccard).unwrap(), 0.0);
    }

    #[test]
    fn guessing_similarity_missing_list_errors() {
        let mut grid = ExperimentGrid::new(100);
        grid.add_guesser("A");
        grid.add_guesser("B");
        grid.add_dataset(PasswordMultiset::from_counts("d", [("x", 1u64)]));
        assert!(matches!(
            guessing_similarity(&grid, 0, 1, ListMetric::Jaccard),
            Err(Error::IncompleteGrid(_))
        ));
    }

    #[test]
    fn training_similarity_toy_cases() {
        let grid = toy_grid();
        assert_eq!(training_similarity(&grid, 0, 0, ListMetric::Jaccard).unwrap(), 1.0);
        // Oracle: mean of per-guesser similarities.
        // A: {a,b} vs {x,y} -> 0; B: {b,c} vs {x,y,z,w} -> 0.
        assert_eq!(training_similarity(&grid, 0, 1, ListMetric::Jaccard).unwrap(), 0.0);

        let mut grid2 = ExperimentGrid::new(100);
        let ga = grid2.add_guesser("A");
        let gb = grid2.add_guesser("B");
        let d1 = grid2.add_dataset(PasswordMultiset::from_counts("d1", [("x", 1u64)]));
        let d2 = grid2.add_dataset(PasswordMultiset::from_counts("d2", [("y", 1u64)]));
        grid2.set_list(ga, d1, mem(list(&["a", "b"])));
        grid2.set_list(ga, d2, mem(list(&["b", "c"])));
        grid2.set_list(gb, d1, mem(list(&["p", "q"])));
        grid2.set_list(gb, d2, mem(list(&["p", "q"])));
        // Oracle: mean of 1/3 (guesser A) and 1 (guesser B).
        let v = training_similarity(&grid2, 0, 1, ListMetric::Jaccard).unwrap();
        assert!((v - (1.0 / 3.0 + 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_identity_guesser_disjoint_training_gives_zero() {
        let d1 = PasswordMultiset::from_counts("d1", [("aa", 2u64)]);
        let d2 = PasswordMultiset::from_counts("d2", [("bb", 3u64)]);
        let mut grid = ExperimentGrid::new(100);
        let g = grid.add_guesser("identity");
        let i1 = grid.add_dataset(d1.clone());
        let i2 = grid.add_dataset(d2.clone());
        grid.set_list(g, i1, mem(generate_identity(&train_identity(&d1).unwrap(), 100).unwrap()));
        grid.set_list(g, i2, mem(generate_identity(&train_identity(&d2).unwrap(), 100).unwrap()));
        assert_eq!(training_similarity(&grid, 0, 1, ListMetric::Jaccard).unwrap(), 0.0);
    }

    #[test]
    fn successful_guessing_similarity_toy_case() {
        let mut grid = ExperimentGrid::new(1_000_000);
        let ga = grid.add_guesser("A");
        let gb = grid.add_guesser("B");
        let d1 = grid.add_dataset(PasswordMultiset::from_counts("d1", [("p", 2u64), ("q", 1)]));
        let d2 = grid.add_dataset(PasswordMultiset::from_counts("d2", [("q", 3u64), ("r", 1)]));
        grid.set_list(ga, d1, mem(list(&["p", "q"])));
        grid.set_list(gb, d1, mem(list(&["q", "r"])));
        grid.set_list(ga, d2, mem(list(&["q"])));
        grid.set_list(gb, d2, mem(list(&["p"])));
        // Hand-built terms:
        //   k=d1, l=d2: A cracks {q:3}, B cracks {q:3, r:1} -> GJ = 3/4.
        //   k=d2, l=d1: A cracks {q:1}, B cracks {p:2} -> GJ = 0/3 = 0.
        let got = successful_guessing_similarity(&grid, 0, 1).unwrap();
        assert_eq!(got.skipped_terms, 0);
        assert!((got.value - 3.0 / 8.0).abs() < 1e-15);

        let self_sim = successful_guessing_similarity(&grid, 0, 0).unwrap();
        assert_eq!(self_sim.value, 1.0);
    }

    #[test]
    fn successful_guessing_similarity_skips_zero_over_zero_terms() {
        let mut grid = ExperimentGrid::new(1_000_000);
        let ga = grid.add_guesser("A");
        let gb = grid.add_guesser("B");
        let d1 = grid.add_dataset(PasswordMultiset::from_counts("d1", [("p", 2u64), ("q", 1)]));
        let d2 = grid.add_dataset(PasswordMultiset::from_counts("d2", [("q", 3u64), ("r", 1)]));
        // Lists trained on d2 crack nothing of d1, so the (k=d2, l=d1) term
        // is 0/0 and excluded.
        grid.set_list(ga, d1, mem(list(&["p", "q"])));
        grid.set_list(gb, d1, mem(list(&["q", "r"])));
        grid.set_list(ga, d2, mem(list(&["x"])));
        grid.set_list(gb, d2, mem(list(&["y"])));
        let got = successful_guessing_similarity(&grid, 0, 1).unwrap();
        assert_eq!(got.skipped_terms, 1);
        assert!((got.value - 3.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn successful_guessing_similarity_disjoint_cracks_is_zero() {
        let mut grid = ExperimentGrid::new(100);
        let ga = grid.add_guesser("A");
        let gb = grid.add_guesser("B");
        let d1 = grid.add_dataset(PasswordMultiset::from_counts("d1", [("a", 1u64), ("b", 1)]));
        let d2 = grid.add_dataset(PasswordMultiset::from_counts("d2", [("a", 2u64), ("b", 5)]));
        // Both guessers guess the same lists from both trainings, but crack
        // disjoint target passwords.
        for j in [d1, d2] {
            grid.set_list(ga, j, mem(list(&["a"])));
            grid.set_list(gb, j, mem(list(&["b"])));
        }
        let got = successful_guessing_similarity(&grid, 0, 1).unwrap();
        assert_eq!(got.value, 0.0);
        assert_eq!(got.skipped_terms, 0);
    }

    #[test]
    fn success_tensor_fills_all_cross_cells() {
        let grid = toy_grid();
        let t = success_tensor(&grid, Denominator::Total).unwrap();
        // A trained on d1 = [a, b] cracks nothing of d2 = {q:3, r:1}.
        assert_eq!(t.get(0, 0, 1), Some(0.0));
        // B trained on d2 = [x,y,z,w] cracks nothing of d1.
        assert_eq!(t.get(1, 1, 0), Some(0.0));
        assert_eq!(t.get(0, 0, 0), None);
    }

    #[test]
    fn pearson_exact_cases() {
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let (r, p) = pearson(&x, &x).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(p, 0.0);

        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let (r, _) = pearson(&x, &neg).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_matches_direct_formula() {
        // Oracle: direct arithmetic gives r = 15 / sqrt(228).
        let (r, _) = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 7.0]).unwrap();
        assert!((r - 15.0 / 228f64.sqrt()).abs() < 1e-12);
        assert!((r - 0.9934).abs() < 1e-4);
    }

    #[test]
    fn pearson_rejects_degenerate_input() {
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
