use std::fmt;
use std::sync::Arc;

use crate::bitstreams::BitString;
use crate::error::{Error, Result};
use crate::model::scope::{Component, Scope, ScopedView};

/// A passive device producing a finite bit string from the hidden parameter.
///
/// Extractors only ever see a [`ScopedView`], which rejects reads outside
/// [`Extractor::scope`] and cannot mutate the experiment.
pub trait Extractor: Send + Sync {
    fn id(&self) -> String;

    fn scope(&self) -> Scope;

    fn extract(&self, view: &ScopedView<'_>) -> Result<BitString>;
}

impl fmt::Debug for dyn Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Extractor({})", self.id())
    }
}

/// Reads nothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullExtractor;

impl Extractor for NullExtractor {
    fn id(&self) -> String {
        "null".into()
    }

    fn scope(&self) -> Scope {
        Scope::empty()
    }

    fn extract(&self, _view: &ScopedView<'_>) -> Result<BitString> {
        Ok(BitString::new())
    }
}

/// The trial index as a 32-bit big-endian string.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrialIndexExtractor;

impl Extractor for TrialIndexExtractor {
    fn id(&self) -> String {
        "trial-index".into()
    }

    fn scope(&self) -> Scope {
        Scope::new([Component::TrialIndex])
    }

    fn extract(&self, view: &ScopedView<'_>) -> Result<BitString> {
        Ok(BitString::from_uint(view.trial_index()? as u64, 32))
    }
}

/// The restriction an extractor set imposes on its members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    Unrestricted,
    /// Reads at most seed bits `1..=l`, plus the trial index.
    SeedPrefix {
        l: usize,
    },
    /// Never reads hidden automaton state or the outcome source.
    Complementarity,
}

impl Policy {
    pub fn permits(&self, scope: &Scope) -> bool {
        match self {
            Policy::Unrestricted => true,
            Policy::SeedPrefix { l } => scope.is_within(&Scope::new([
                Component::SeedBits { lo: 1, hi: *l },
                Component::TrialIndex,
            ])),
            Policy::Complementarity => scope.is_within(&Scope::new([
                Component::IoLog,
                Component::TrialIndex,
                Component::Preparation,
            ])),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Policy::Unrestricted => "unrestricted".into(),
            Policy::SeedPrefix { l } => {
                format!("reads at most seed bits 1..={l} and the trial index")
            }
            Policy::Complementarity => {
                "cannot read hidden automaton state or the outcome source".into()
            }
        }
    }
}

/// A named catalogue of extractors whose members all satisfy a policy.
#[derive(Debug)]
pub struct ExtractorSet {
    name: String,
    policy: Policy,
    members: Vec<Arc<dyn Extractor>>,
}

impl ExtractorSet {
    pub fn new(name: impl Into<String>, policy: Policy) -> Self {
        Self {
            name: name.into(),
            policy,
            members: Vec::new(),
        }
    }

    /// Adds `extractor` if its declared scope satisfies the policy.
    pub fn register(&mut self, extractor: Arc<dyn Extractor>) -> Result<()> {
        if !self.policy.permits(&extractor.scope()) {
            return Err(Error::PolicyViolation {
                extractor: extractor.id(),
                policy: self.policy.describe(),
            });
        }
        self.members.push(extractor);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn members(&self) -> &[Arc<dyn Extractor>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Reads(Scope);
    impl Extractor for Reads {
        fn id(&self) -> String {
            "reads".into()
        }
        fn scope(&self) -> Scope {
            self.0.clone()
        }
        fn extract(&self, _view: &ScopedView<'_>) -> Result<BitString> {
            Ok(BitString::new())
        }
    }

    #[test]
    fn seed_prefix_policy() {
        let mut set = ExtractorSet::new("xi-3", Policy::SeedPrefix { l: 3 });
        set.register(Arc::new(Reads(Scope::new([Component::SeedBits {
            lo: 2,
            hi: 3,
        }]))))
        .unwrap();
        set.register(Arc::new(TrialIndexExtractor)).unwrap();
        let err = set
            .register(Arc::new(Reads(Scope::new([Component::SeedBits {
                lo: 3,
                hi: 4,
            }]))))
            .unwrap_err();
        assert!(matches!(err, Error::PolicyViolation { .. }));
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn complementarity_policy() {
        let p = Policy::Complementarity;
        assert!(p.permits(&Scope::new([Component::IoLog, Component::TrialIndex])));
        assert!(!p.permits(&Scope::new([Component::AutomatonState])));
        assert!(!p.permits(&Scope::new([Component::OutcomeSource])));
        assert!(Policy::Unrestricted.permits(&Scope::new([Component::AutomatonState])));
    }
}
