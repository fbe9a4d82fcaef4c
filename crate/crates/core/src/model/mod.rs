//! The prediction model: experiments with hidden parameters, scoped
//! extractors, total predictors, repetition procedures, and the finite
//! evaluation of the correctness criterion.
//!
//! A predictor is correct for an extractor when, for every `k` and every
//! repetition procedure, some finite run contains `k` correct predictions and
//! no incorrect one. [`Evaluator`] checks the level-`(k, n_max)`
//! approximation of that statement: one incorrect prediction refutes, `k`
//! correct predictions attain, anything else is inconclusive.

mod experiment;
mod extractor;
mod predictor;
mod scope;

use serde::{Deserialize, Serialize};

use crate::bitstreams::BitString;
use crate::error::{Error, Result};

pub(crate) use experiment::unsupported;
pub use experiment::{Experiment, FreshSeed, Preparation, RepetitionProcedure, SameBox, SeedList};
pub use extractor::{Extractor, ExtractorSet, NullExtractor, Policy, TrialIndexExtractor};
pub use predictor::{
    invoke, predictor_by_id, shipped_predictors, Constant, Fuel, Identity, Majority, NegateLast,
    OutOfFuel, Prediction, Predictor, Withhold, DEFAULT_FUEL, PREDICTOR_IDS,
};
pub use scope::{Component, HiddenState, IoEvent, PreparationInfo, Scope, ScopedView};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Correct,
    Incorrect,
    Withheld,
}

pub fn classify(prediction: Prediction, outcome: u8) -> Classification {
    match prediction.bit() {
        None => Classification::Withheld,
        Some(b) if b == outcome => Classification::Correct,
        Some(_) => Classification::Incorrect,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub extracted: BitString,
    pub prediction: Prediction,
    pub outcome: u8,
    pub classification: Classification,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub correct: usize,
    pub incorrect: usize,
    pub withheld: usize,
}

impl Counts {
    fn add(&mut self, c: Classification) {
        match c {
            Classification::Correct => self.correct += 1,
            Classification::Incorrect => self.incorrect += 1,
            Classification::Withheld => self.withheld += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.correct + self.incorrect + self.withheld
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Refuted,
    AttainedK,
    Inconclusive,
}

impl Verdict {
    pub fn from_counts(counts: &Counts, k: usize) -> Self {
        if counts.incorrect >= 1 {
            Verdict::Refuted
        } else if counts.correct >= k {
            Verdict::AttainedK
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub k: usize,
    pub n_max: usize,
    pub n_used: usize,
    pub counts: Counts,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<Vec<TrialRecord>>,
}

/// Settings for one evaluation run.
#[derive(Clone, Copy, Debug)]
pub struct Evaluator {
    pub k: usize,
    pub n_max: usize,
    pub fuel: u64,
    pub record_trials: bool,
}

impl Evaluator {
    pub fn new(k: usize, n_max: usize) -> Self {
        Self {
            k,
            n_max,
            fuel: DEFAULT_FUEL,
            record_trials: true,
        }
    }

    pub fn fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn record_trials(mut self, record: bool) -> Self {
        self.record_trials = record;
        self
    }

    /// Runs trials until the first incorrect prediction, until `k` correct
    /// predictions, or until `n_max` trials, whichever comes first.
    pub fn run(
        &self,
        experiment: &mut dyn Experiment,
        repetition: &mut dyn RepetitionProcedure,
        extractor: &dyn Extractor,
        predictor: &dyn Predictor,
    ) -> Result<EvaluationReport> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if self.n_max < self.k {
            return Err(Error::InvalidArgument(format!(
                "n_max {} is smaller than k {}",
                self.n_max, self.k
            )));
        }
        check_admissible(experiment, extractor)?;

        let mut history: Vec<TrialRecord> = Vec::new();
        let mut counts = Counts::default();
        for index in 1..=self.n_max {
            let preparation = repetition.next_preparation(index, &history)?;
            let record = execute_trial(
                experiment,
                extractor,
                predictor,
                index,
                &preparation,
                self.fuel,
            )?;
            counts.add(record.classification);
            history.push(record);
            if counts.incorrect > 0 || counts.correct >= self.k {
                break;
            }
        }
        Ok(EvaluationReport {
            k: self.k,
            n_max: self.n_max,
            n_used: history.len(),
            counts,
            verdict: Verdict::from_counts(&counts, self.k),
            trials: self.record_trials.then_some(history),
        })
    }
}

/// Evaluates the correctness criterion at level `(k, n_max)` with the default fuel.
pub fn run_trials(
    experiment: &mut dyn Experiment,
    repetition: &mut dyn RepetitionProcedure,
    extractor: &dyn Extractor,
    predictor: &dyn Predictor,
    k: usize,
    n_max: usize,
) -> Result<EvaluationReport> {
    Evaluator::new(k, n_max).run(experiment, repetition, extractor, predictor)
}

/// Runs one trial with the experiment's default preparation.
pub fn single_trial(
    experiment: &mut dyn Experiment,
    extractor: &dyn Extractor,
    predictor: &dyn Predictor,
) -> Result<TrialRecord> {
    check_admissible(experiment, extractor)?;
    let index = experiment.trials_completed() + 1;
    execute_trial(
        experiment,
        extractor,
        predictor,
        index,
        &Preparation::Default,
        DEFAULT_FUEL,
    )
}

pub(crate) fn check_admissible(experiment: &dyn Experiment, extractor: &dyn Extractor) -> Result<()> {
    match extractor
        .scope()
        .first_outside(&experiment.admissible_scope())
    {
        None => Ok(()),
        Some(component) => Err(Error::ScopeViolation {
            extractor: extractor.id(),
            component: component.to_string(),
        }),
    }
}

fn execute_trial(
    experiment: &mut dyn Experiment,
    extractor: &dyn Extractor,
    predictor: &dyn Predictor,
    index: usize,
    preparation: &Preparation,
    fuel: u64,
) -> Result<TrialRecord> {
    experiment.prepare(index, preparation)?;
    let scope = extractor.scope();
    let id = extractor.id();
    let extracted = extractor.extract(&ScopedView::new(experiment.hidden(), &scope, &id))?;
    let prediction = invoke(predictor, &extracted, fuel)?;
    let outcome = experiment.run_trial()?;
    Ok(TrialRecord {
        index,
        extracted,
        prediction,
        outcome,
        classification: classify(prediction, outcome),
    })
}
