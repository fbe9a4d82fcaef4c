//! Visibility scopes and the scoped, read-only view extractors receive.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One readable component of an experiment's hidden parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "component", rename_all = "kebab-case")]
pub enum Component {
    /// Seed bits `lo..=hi` (1-based, inclusive).
    SeedBits {
        lo: usize,
        hi: usize,
    },
    TrialIndex,
    /// The visible input/output history of a black box.
    IoLog,
    /// The hidden current state of an automaton.
    AutomatonState,
    /// Description of the prepared state and measurement.
    Preparation,
    /// The source deciding outcomes (noise seed or script).
    OutcomeSource,
}

impl Component {
    pub const ALL_SEED_BITS: Component = Component::SeedBits {
        lo: 1,
        hi: usize::MAX,
    };

    fn covers(&self, other: &Component) -> bool {
        match (self, other) {
            (Component::SeedBits { lo, hi }, Component::SeedBits { lo: a, hi: b }) => {
                lo <= a && b <= hi
            }
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::SeedBits { lo, hi } if *hi == usize::MAX => write!(f, "seed bits {lo}.."),
            Component::SeedBits { lo, hi } if lo == hi => write!(f, "seed bit {lo}"),
            Component::SeedBits { lo, hi } => write!(f, "seed bits {lo}..={hi}"),
            Component::TrialIndex => f.write_str("trial index"),
            Component::IoLog => f.write_str("io log"),
            Component::AutomatonState => f.write_str("automaton state"),
            Component::Preparation => f.write_str("preparation"),
            Component::OutcomeSource => f.write_str("outcome source"),
        }
    }
}

/// A set of components an extractor declares it reads, or an experiment
/// declares it exposes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope(Vec<Component>);

impl Scope {
    pub fn new(components: impl IntoIterator<Item = Component>) -> Self {
        Self(components.into_iter().collect())
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn components(&self) -> &[Component] {
        &self.0
    }

    pub fn permits(&self, component: &Component) -> bool {
        self.0.iter().any(|c| c.covers(component))
    }

    pub fn permits_seed_bit(&self, j: usize) -> bool {
        self.permits(&Component::SeedBits { lo: j, hi: j })
    }

    /// Every component of `self` is permitted by `outer`.
    pub fn is_within(&self, outer: &Scope) -> bool {
        self.0.iter().all(|c| outer.permits(c))
    }

    /// First component of `self` not permitted by `outer`.
    pub fn first_outside(&self, outer: &Scope) -> Option<Component> {
        self.0.iter().find(|c| !outer.permits(c)).copied()
    }

    /// Highest seed bit this scope can read, 0 when it reads none.
    pub fn max_seed_bit(&self) -> usize {
        self.0
            .iter()
            .filter_map(|c| match c {
                Component::SeedBits { hi, .. } => Some(*hi),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

/// One entry of a black box's visible history.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoEvent {
    pub input: char,
    pub output: u8,
}

/// Public description of a quantum preparation/measurement pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreparationInfo {
    /// |<psi|phi>|^2.
    pub overlap_sqr: f64,
}

/// The hidden parameter of the trial about to run.
///
/// Experiments implement whichever accessors apply; the rest return `None`.
pub trait HiddenState {
    fn trial_index(&self) -> usize;

    fn seed_bit(&self, _j: usize) -> Option<Result<u8>> {
        None
    }

    fn io_log(&self) -> Option<&[IoEvent]> {
        None
    }

    fn automaton_state(&self) -> Option<usize> {
        None
    }

    fn preparation(&self) -> Option<PreparationInfo> {
        None
    }

    /// Bit `j` of the hidden outcome source, if it is script- or seed-based.
    fn outcome_source_bit(&self, _j: usize) -> Option<Result<u8>> {
        None
    }
}

/// Read-only access to a hidden parameter, gated by an extractor's declared scope.
pub struct ScopedView<'a> {
    hidden: &'a dyn HiddenState,
    scope: &'a Scope,
    extractor: &'a str,
}

impl<'a> ScopedView<'a> {
    pub fn new(hidden: &'a dyn HiddenState, scope: &'a Scope, extractor: &'a str) -> Self {
        Self {
            hidden,
            scope,
            extractor,
        }
    }

    fn check(&self, component: Component) -> Result<()> {
        if self.scope.permits(&component) {
            Ok(())
        } else {
            Err(self.violation(component))
        }
    }

    fn violation(&self, component: Component) -> Error {
        Error::ScopeViolation {
            extractor: self.extractor.to_string(),
            component: component.to_string(),
        }
    }

    fn missing(&self, component: Component) -> Error {
        Error::ScopeViolation {
            extractor: self.extractor.to_string(),
            component: format!("{component} (not exposed by this experiment)"),
        }
    }

    pub fn trial_index(&self) -> Result<usize> {
        self.check(Component::TrialIndex)?;
        Ok(self.hidden.trial_index())
    }

    pub fn seed_bit(&self, j: usize) -> Result<u8> {
        let c = Component::SeedBits { lo: j, hi: j };
        self.check(c)?;
        self.hidden.seed_bit(j).ok_or_else(|| self.missing(c))?
    }

    pub fn io_log(&self) -> Result<&'a [IoEvent]> {
        self.check(Component::IoLog)?;
        self.hidden
            .io_log()
            .ok_or_else(|| self.missing(Component::IoLog))
    }

    pub fn automaton_state(&self) -> Result<usize> {
        self.check(Component::AutomatonState)?;
        self.hidden
            .automaton_state()
            .ok_or_else(|| self.missing(Component::AutomatonState))
    }

    pub fn preparation(&self) -> Result<PreparationInfo> {
        self.check(Component::Preparation)?;
        self.hidden
            .preparation()
            .ok_or_else(|| self.missing(Component::Preparation))
    }

    pub fn outcome_source_bit(&self, j: usize) -> Result<u8> {
        self.check(Component::OutcomeSource)?;
        self.hidden
            .outcome_source_bit(j)
            .ok_or_else(|| self.missing(Component::OutcomeSource))?
    }
}
