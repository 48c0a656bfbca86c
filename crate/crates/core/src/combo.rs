//! Combination attacks: ordered unions of guess lists with cross-stage
//! deduplication, cumulative success curves, and marginal gains.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::PasswordMultiset;
use crate::error::{Error, Result};
use crate::guessers::GuessList;
use crate::hashed::{crack_attribution, hashed_success_rate, HashedTarget};
use crate::stats::success_rate;

/// An ordered sequence of stages, each drawing up to its budget of guesses
/// from a named list. Budgets count a stage's own guesses (pre-dedup);
/// duplicates of earlier stages are dropped from the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationPlan {
    stages: Vec<(String, u64)>,
}

impl CombinationPlan {
    pub fn new(stages: Vec<(String, u64)>) -> Result<Self> {
        if stages.is_empty() {
            return Ok(CombinationPlan { stages });
        }
        let mut seen = HashSet::new();
        for (label, budget) in &stages {
            if !seen.insert(label.as_str()) {
                return Err(Error::Config(format!("duplicate stage label {label:?}")));
            }
            if *budget == 0 {
                return Err(Error::Config(format!("stage {label:?} has zero budget")));
            }
        }
        Ok(CombinationPlan { stages })
    }

    /// All stages share one budget.
    pub fn uniform(labels: impl IntoIterator<Item = String>, budget: u64) -> Result<Self> {
        CombinationPlan::new(labels.into_iter().map(|l| (l, budget)).collect())
    }

    pub fn stages(&self) -> &[(String, u64)] {
        &self.stages
    }

    pub fn contains(&self, label: &str) -> bool {
        self.stages.iter().any(|(l, _)| l == label)
    }

    /// The plan extended by one more stage.
    pub fn with_stage(&self, label: impl Into<String>, budget: u64) -> Result<Self> {
        let mut stages = self.stages.clone();
        stages.push((label.into(), budget));
        CombinationPlan::new(stages)
    }

    pub fn total_budget(&self) -> u64 {
        self.stages.iter().map(|(_, b)| b).sum()
    }
}

/// JSON plan file: stages as labels (with a shared top-level `budget`) or as
/// `{label, budget}` objects, plus an optional checkpoint grid.
#[derive(Debug, Deserialize)]
struct PlanFile {
    stages: Vec<StageSpec>,
    #[serde(default)]
    budget: Option<u64>,
    #[serde(default)]
    checkpoints: Vec<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StageSpec {
    Label(String),
    Full { label: String, budget: u64 },
}

/// Parse a plan file; returns the plan and its (possibly empty) checkpoints.
pub fn parse_plan(json: &str) -> Result<(CombinationPlan, Vec<u64>)> {
    let file: PlanFile =
        serde_json::from_str(json).map_err(|e| Error::Config(format!("plan file: {e}")))?;
    let stages = file
        .stages
        .into_iter()
        .map(|s| match s {
            StageSpec::Full { label, budget } => Ok((label, budget)),
            StageSpec::Label(label) => match file.budget {
                Some(budget) => Ok((label, budget)),
                None => Err(Error::Config(format!(
                    "stage {label:?} has no budget and the plan sets no shared budget"
                ))),
            },
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((CombinationPlan::new(stages)?, file.checkpoints))
}

/// How much each stage contributed to a combined list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub label: String,
    /// Guesses taken from the stage list (its budget, or less if it ran out).
    pub raw_guesses: u64,
    /// Guesses that survived cross-stage deduplication.
    pub effective_guesses: u64,
}

/// Concatenate stage lists in order, truncating each to its budget and
/// dropping guesses already emitted by an earlier stage.
///
/// `fetch` resolves a stage label to its guess list, already cut to at most
/// the requested budget (a file-backed fetcher can stop reading there).
pub fn combine_with(
    plan: &CombinationPlan,
    mut fetch: impl FnMut(&str, u64) -> Result<GuessList>,
) -> Result<(GuessList, Vec<StageReport>)> {
    let mut emitted: Vec<Box<str>> = Vec::new();
    let mut seen: HashSet<Box<str>> = HashSet::new();
    let mut reports = Vec::with_capacity(plan.stages.len());
    for (label, budget) in &plan.stages {
        let stage = fetch(label, *budget)?;
        let take = (*budget).min(stage.len() as u64) as usize;
        let mut effective = 0u64;
        for guess in &stage.as_slice()[..take] {
            if seen.insert(guess.clone()) {
                emitted.push(guess.clone());
                effective += 1;
            }
        }
        reports.push(StageReport {
            label: label.clone(),
            raw_guesses: take as u64,
            effective_guesses: effective,
        });
    }
    let source = plan
        .stages
        .iter()
        .map(|(l, _)| l.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let cutoff = plan.total_budget().max(1);
    Ok((GuessList::new_unchecked(source, cutoff, emitted), reports))
}

/// [`combine_with`] over an in-memory label -> list map.
pub fn combine(
    plan: &CombinationPlan,
    lists: &HashMap<String, GuessList>,
) -> Result<(GuessList, Vec<StageReport>)> {
    combine_with(plan, |label, _budget| {
        lists.get(label).cloned().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    })
}

/// A target a guess list can be evaluated against.
#[derive(Clone, Copy)]
pub enum EvalTarget<'a> {
    Plain(&'a PasswordMultiset),
    Hashed(&'a HashedTarget),
}

impl EvalTarget<'_> {
    /// Full-list success rate (accounts convention).
    pub fn success_rate(&self, guesses: &GuessList) -> Result<f64> {
        match self {
            EvalTarget::Plain(target) => success_rate(guesses, target),
            EvalTarget::Hashed(target) => hashed_success_rate(guesses, target),
        }
    }

    fn total_entries(&self) -> u64 {
        match self {
            EvalTarget::Plain(target) => target.total(),
            EvalTarget::Hashed(target) => target.total(),
        }
    }

    /// (first cracking guess index, entry multiplicity) pairs, sorted by index.
    fn matched(&self, guesses: &GuessList) -> Vec<(u64, u64)> {
        match self {
            EvalTarget::Plain(target) => {
                let mut cracked: HashSet<&str> = HashSet::new();
                let mut matched = Vec::new();
                for (i, guess) in guesses.iter().enumerate() {
                    let count = target.count(guess);
                    if count > 0 && cracked.insert(guess) {
                        matched.push((i as u64 + 1, count));
                    }
                }
                matched
            }
            EvalTarget::Hashed(target) => crack_attribution(guesses, target).matched().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub guess_index: u64,
    pub cumulative_success: f64,
}

/// Cumulative success after the first c guesses, for each checkpoint c.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessCurve {
    pub points: Vec<CurvePoint>,
    /// Set when the list ran out before the last checkpoint; later
    /// checkpoints repeat the final value.
    pub exhausted_at: Option<u64>,
}

/// Evaluate the success curve of a guess list at the given checkpoints
/// (1-based prefix lengths, strictly ascending).
pub fn evaluate_curve(
    guesses: &GuessList,
    target: EvalTarget<'_>,
    checkpoints: &[u64],
) -> Result<SuccessCurve> {
    if checkpoints.is_empty() {
        return Err(Error::Config("empty checkpoint list".into()));
    }
    if checkpoints[0] == 0 {
        return Err(Error::Config("checkpoints are 1-based guess indices".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("checkpoints must be strictly ascending".into()));
    }
    if target.total_entries() == 0 {
        return Err(Error::Domain("curve against an empty target".into()));
    }
    let matched = target.matched(guesses);
    let denom = target.total_entries() as f64;
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut cracked = 0u64;
    let mut next = 0usize;
    for &checkpoint in checkpoints {
        while next < matched.len() && matched[next].0 <= checkpoint {
            cracked += matched[next].1;
            next += 1;
        }
        points.push(CurvePoint {
            guess_index: checkpoint,
            cumulative_success: cracked as f64 / denom,
        });
    }
    let len = guesses.len() as u64;
    let exhausted_at = (len < *checkpoints.last().unwrap()).then_some(len);
    Ok(SuccessCurve { points, exhausted_at })
}

/// Success-rate gain from appending `candidate` (with its budget) to `base`.
/// Never negative: the combined list extends the base output.
pub fn marginal_gain(
    base: &CombinationPlan,
    candidate: &str,
    candidate_budget: u64,
    target: EvalTarget<'_>,
    lists: &HashMap<String, GuessList>,
) -> Result<f64> {
    if base.contains(candidate) {
        return Err(Error::Config(format!("candidate {candidate:?} is already in the plan")));
    }
    let (base_list, _) = combine(base, lists)?;
    let extended = base.with_stage(candidate, candidate_budget)?;
    let (combined_list, _) = combine(&extended, lists)?;
    let base_rate =
        if base_list.is_empty() { 0.0 } else { target.success_rate(&base_list)? };
    let combined_rate = target.success_rate(&combined_list)?;
    Ok(combined_rate - base_rate)
}
