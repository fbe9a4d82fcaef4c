use crate::bitstreams::BitStream;
use crate::error::{Error, Result};
use crate::model::scope::{HiddenState, Scope};
use crate::model::TrialRecord;

/// How the next trial is set up.
#[derive(Clone, Debug, PartialEq)]
pub enum Preparation {
    /// The experiment's own reset rule.
    Default,
    /// Use this seed for the trial.
    Seed(BitStream),
    /// Feed these input symbols before the trial.
    Feed(Vec<char>),
}

impl Preparation {
    pub fn describe(&self) -> String {
        match self {
            Preparation::Default => "default".into(),
            Preparation::Seed(s) => format!("seed {}", s.describe()),
            Preparation::Feed(syms) => format!("feed \"{}\"", syms.iter().collect::<String>()),
        }
    }
}

/// A repeatable process emitting one outcome bit per trial.
pub trait Experiment: Send {
    fn id(&self) -> String;

    /// Components any extractor used with this experiment may read.
    fn admissible_scope(&self) -> Scope;

    /// Sets up trial `trial_index` (1-based).
    fn prepare(&mut self, trial_index: usize, preparation: &Preparation) -> Result<()>;

    /// Hidden parameter of the prepared trial.
    fn hidden(&self) -> &dyn HiddenState;

    /// Runs the prepared trial and returns its outcome.
    fn run_trial(&mut self) -> Result<u8>;

    /// Number of trials completed so far.
    fn trials_completed(&self) -> usize;
}

pub(crate) fn unsupported(experiment: &dyn Experiment, preparation: &Preparation) -> Error {
    Error::UnsupportedPreparation {
        experiment: experiment.id(),
        preparation: preparation.describe(),
    }
}

/// Algorithmic rule for resetting and repeating an experiment.
///
/// The preparation may depend only on the procedure's own parameters, the
/// trial index and the visible history of earlier trials.
pub trait RepetitionProcedure: Send {
    fn id(&self) -> String;

    fn next_preparation(
        &mut self,
        trial_index: usize,
        history: &[TrialRecord],
    ) -> Result<Preparation>;
}

/// Each trial uses the experiment's own fresh-seed rule.
#[derive(Clone, Copy, Debug, Default)]
pub struct FreshSeed;

impl RepetitionProcedure for FreshSeed {
    fn id(&self) -> String {
        "fresh-seed".into()
    }

    fn next_preparation(
        &mut self,
        _trial_index: usize,
        _history: &[TrialRecord],
    ) -> Result<Preparation> {
        Ok(Preparation::Default)
    }
}

/// Trial `i` uses `seeds[(i - 1) mod len]`.
#[derive(Clone, Debug)]
pub struct SeedList {
    seeds: Vec<BitStream>,
}

impl SeedList {
    pub fn new(seeds: Vec<BitStream>) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::InvalidArgument("seed list is empty".into()));
        }
        Ok(Self { seeds })
    }
}

impl RepetitionProcedure for SeedList {
    fn id(&self) -> String {
        "fresh-seed(list)".into()
    }

    fn next_preparation(
        &mut self,
        trial_index: usize,
        _history: &[TrialRecord],
    ) -> Result<Preparation> {
        Ok(Preparation::Seed(
            self.seeds[(trial_index - 1) % self.seeds.len()].clone(),
        ))
    }
}

/// Repeats on the same system without resetting hidden state, feeding an
/// optional preparation string first (the experiment's default otherwise).
#[derive(Clone, Debug, Default)]
pub struct SameBox {
    prepare_with: Option<Vec<char>>,
}

impl SameBox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_preparation(symbols: impl IntoIterator<Item = char>) -> Self {
        Self {
            prepare_with: Some(symbols.into_iter().collect()),
        }
    }
}

impl RepetitionProcedure for SameBox {
    fn id(&self) -> String {
        match &self.prepare_with {
            None => "same-box".into(),
            Some(s) => format!("same-box({})", s.iter().collect::<String>()),
        }
    }

    fn next_preparation(
        &mut self,
        _trial_index: usize,
        _history: &[TrialRecord],
    ) -> Result<Preparation> {
        Ok(match &self.prepare_with {
            None => Preparation::Default,
            Some(s) => Preparation::Feed(s.clone()),
        })
    }
}
