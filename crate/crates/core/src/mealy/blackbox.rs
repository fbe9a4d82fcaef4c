use super::MealyAutomaton;
use crate::analysis::floyd_cycle;
use crate::bitstreams::BitString;
use crate::error::{Error, Result};
use crate::model::{
    unsupported, Component, Experiment, Extractor, HiddenState, IoEvent, Preparation, Scope,
    ScopedView,
};

/// An automaton whose tables and current state are hidden; only the
/// input/output log is public.
#[derive(Clone, Debug)]
pub struct BlackBox {
    automaton: MealyAutomaton,
    state: usize,
    log: Vec<IoEvent>,
}

impl BlackBox {
    /// Starts in `start`, or in the lowest-labelled state.
    pub fn new(automaton: MealyAutomaton, start: Option<&str>) -> Result<Self> {
        let state = match start {
            Some(label) => automaton.state_index(label)?,
            None => (0..automaton.n_states())
                .min_by_key(|&q| automaton.state_label(q))
                .unwrap_or(0),
        };
        Ok(Self {
            automaton,
            state,
            log: Vec::new(),
        })
    }

    pub fn feed(&mut self, symbol: char) -> Result<u8> {
        let a = self.automaton.input_index(symbol)?;
        let output = self.automaton.output(self.state, a);
        self.state = self.automaton.next(self.state, a);
        self.log.push(IoEvent {
            input: symbol,
            output,
        });
        Ok(output)
    }

    pub fn io_log(&self) -> &[IoEvent] {
        &self.log
    }

    /// Hidden; exposed for tests and oracles, never to extractors.
    pub fn state(&self) -> usize {
        self.state
    }

    pub fn automaton(&self) -> &MealyAutomaton {
        &self.automaton
    }

    /// One same-box repetition: prepare with `x`, then run the trial `xz`.
    fn repetition(&mut self) -> Result<u8> {
        self.feed('x')?;
        self.trial()
    }

    fn trial(&mut self) -> Result<u8> {
        self.feed('x')?;
        self.feed('z')
    }
}

/// Repeats the experiment on the same box `repetitions` times and returns the
/// trial outputs (the `z` output of each `xz`).
pub fn run_em(black_box: &mut BlackBox, repetitions: usize) -> Result<Vec<u8>> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument(
            "run_em needs at least one repetition".into(),
        ));
    }
    (0..repetitions).map(|_| black_box.repetition()).collect()
}

/// `(transient, period)` of the state sequence seen at repetition
/// boundaries, starting from state index `start`. Both are bounded by
/// `|Q|` in sum, since the boundary map is a function on `Q`.
pub fn em_orbit(m: &MealyAutomaton, start: usize) -> Result<(usize, usize)> {
    let x = m.input_index('x')?;
    let z = m.input_index('z')?;
    let step = |q: &usize| m.next(m.next(m.next(*q, x), x), z);
    Ok(floyd_cycle(start, step))
}

#[derive(Debug)]
struct EmState {
    black_box: BlackBox,
    trial_index: usize,
}

impl HiddenState for EmState {
    fn trial_index(&self) -> usize {
        self.trial_index
    }

    fn io_log(&self) -> Option<&[IoEvent]> {
        Some(self.black_box.io_log())
    }

    fn automaton_state(&self) -> Option<usize> {
        Some(self.black_box.state())
    }
}

/// Each trial feeds `xz` and reports the `z` output. The default
/// preparation feeds `x`; the box is never reset.
#[derive(Debug)]
pub struct EmExperiment {
    inner: EmState,
    prepared: bool,
    completed: usize,
}

pub fn em_experiment(black_box: BlackBox) -> Result<EmExperiment> {
    black_box.automaton().input_index('x')?;
    black_box.automaton().input_index('z')?;
    Ok(EmExperiment {
        inner: EmState {
            black_box,
            trial_index: 1,
        },
        prepared: false,
        completed: 0,
    })
}

impl EmExperiment {
    pub fn black_box(&self) -> &BlackBox {
        &self.inner.black_box
    }
}

impl Experiment for EmExperiment {
    fn id(&self) -> String {
        "mealy-em".into()
    }

    fn admissible_scope(&self) -> Scope {
        Scope::new([Component::IoLog, Component::TrialIndex])
    }

    fn prepare(&mut self, trial_index: usize, preparation: &Preparation) -> Result<()> {
        match preparation {
            Preparation::Default => {
                self.inner.black_box.feed('x')?;
            }
            Preparation::Feed(symbols) => {
                for &c in symbols {
                    self.inner.black_box.feed(c)?;
                }
            }
            Preparation::Seed(_) => return Err(unsupported(self, preparation)),
        }
        self.inner.trial_index = trial_index;
        self.prepared = true;
        Ok(())
    }

    fn hidden(&self) -> &dyn HiddenState {
        &self.inner
    }

    fn run_trial(&mut self) -> Result<u8> {
        if !self.prepared {
            self.prepare(self.completed + 1, &Preparation::Default)?;
        }
        let out = self.inner.black_box.trial()?;
        self.prepared = false;
        self.completed += 1;
        Ok(out)
    }

    fn trials_completed(&self) -> usize {
        self.completed
    }
}

/// Outputs recorded in the io log, optionally only those answering `symbol`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IoLogExtractor {
    only: Option<char>,
}

impl IoLogExtractor {
    pub fn all() -> Self {
        Self { only: None }
    }

    pub fn outputs_of(symbol: char) -> Self {
        Self { only: Some(symbol) }
    }
}

impl Extractor for IoLogExtractor {
    fn id(&self) -> String {
        match self.only {
            None => "io-log".into(),
            Some(c) => format!("io-log({c})"),
        }
    }

    fn scope(&self) -> Scope {
        Scope::new([Component::IoLog])
    }

    fn extract(&self, view: &ScopedView<'_>) -> Result<BitString> {
        let log = view.io_log()?;
        Ok(BitString::from_bools(
            log.iter()
                .filter(|e| self.only.is_none_or(|c| e.input == c))
                .map(|e| e.output == 1),
        ))
    }
}

/// Reads the hidden state index (8 bits). Outside every complementarity-restricted scope.
#[derive(Clone, Copy, Debug, Default)]
pub struct StateExtractor;

impl Extractor for StateExtractor {
    fn id(&self) -> String {
        "automaton-state".into()
    }

    fn scope(&self) -> Scope {
        Scope::new([Component::AutomatonState])
    }

    fn extract(&self, view: &ScopedView<'_>) -> Result<BitString> {
        Ok(BitString::from_uint(view.automaton_state()? as u64, 8))
    }
}
