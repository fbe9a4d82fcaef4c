//! Output stability and the complementarity predicates.
//!
//! Every check compares `omega(q, m)` with `omega(delta(q, d), m)`: the output
//! of a measured input `m` before and after a disturbing input `d`.

use serde::{Deserialize, Serialize};

use super::MealyAutomaton;
use crate::error::{Error, Result};

/// Table access shared by [`MealyAutomaton`] and the enumerator's scratch tables.
pub(crate) trait Tables {
    fn n_states(&self) -> usize;
    fn next(&self, q: usize, a: usize) -> usize;
    fn output(&self, q: usize, a: usize) -> u8;
}

impl Tables for MealyAutomaton {
    fn n_states(&self) -> usize {
        MealyAutomaton::n_states(self)
    }

    fn next(&self, q: usize, a: usize) -> usize {
        MealyAutomaton::next(self, q, a)
    }

    fn output(&self, q: usize, a: usize) -> u8 {
        MealyAutomaton::output(self, q, a)
    }
}

#[inline]
fn disturbed<T: Tables + ?Sized>(t: &T, q: usize, measured: usize, disturbing: usize) -> bool {
    t.output(q, measured) != t.output(t.next(q, disturbing), measured)
}

/// First `(q, a)` with `omega(q, a) != omega(delta(q, a), a)`.
pub(crate) fn first_unstable<T: Tables + ?Sized>(t: &T, n_inputs: usize) -> Option<(usize, usize)> {
    (0..t.n_states())
        .flat_map(|q| (0..n_inputs).map(move |a| (q, a)))
        .find(|&(q, a)| disturbed(t, q, a, a))
}

/// First state where measuring `disturbing` changes the output of `measured`.
pub(crate) fn first_disturbance<T: Tables + ?Sized>(
    t: &T,
    measured: usize,
    disturbing: usize,
) -> Option<usize> {
    (0..t.n_states()).find(|&q| disturbed(t, q, measured, disturbing))
}

/// First state where measuring `disturbing` leaves the output of `measured` unchanged.
pub(crate) fn first_undisturbed<T: Tables + ?Sized>(
    t: &T,
    measured: usize,
    disturbing: usize,
) -> Option<usize> {
    (0..t.n_states()).find(|&q| !disturbed(t, q, measured, disturbing))
}

pub(crate) enum RestrictedFailure {
    /// A non-fixed state whose measured output is not disturbed.
    Violation(usize),
    /// Every state is fixed under the disturbing input.
    Vacuous,
}

/// The restricted condition in one direction.
pub(crate) fn restricted_direction<T: Tables + ?Sized>(
    t: &T,
    measured: usize,
    disturbing: usize,
) -> std::result::Result<(), RestrictedFailure> {
    let mut moved = false;
    for q in 0..t.n_states() {
        if t.next(q, disturbing) == q {
            continue;
        }
        moved = true;
        if !disturbed(t, q, measured, disturbing) {
            return Err(RestrictedFailure::Violation(q));
        }
    }
    if moved {
        Ok(())
    } else {
        Err(RestrictedFailure::Vacuous)
    }
}

/// An instantiated instance of `omega(state, measured)` vs
/// `omega(delta(state, disturbing), measured)`, or a vacuity certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Pair {
        state: String,
        disturbing: char,
        measured: char,
        next_state: String,
        before: u8,
        after: u8,
    },
    /// Every state is fixed under `input`.
    Vacuous { input: char },
}

impl Witness {
    fn pair(m: &MealyAutomaton, q: usize, measured: usize, disturbing: usize) -> Self {
        let next = m.next(q, disturbing);
        Witness::Pair {
            state: m.state_label(q).to_string(),
            disturbing: m.inputs()[disturbing],
            measured: m.inputs()[measured],
            next_state: m.state_label(next).to_string(),
            before: m.output(q, measured),
            after: m.output(next, measured),
        }
    }

    /// The recorded values agree with the automaton's tables.
    pub fn reproduces(&self, m: &MealyAutomaton) -> bool {
        match self {
            Witness::Pair {
                state,
                disturbing,
                measured,
                next_state,
                before,
                after,
            } => {
                let (Ok(q), Ok(d), Ok(a)) = (
                    m.state_index(state),
                    m.input_index(*disturbing),
                    m.input_index(*measured),
                ) else {
                    return false;
                };
                let next = m.next(q, d);
                m.state_label(next) == next_state
                    && m.output(q, a) == *before
                    && m.output(next, a) == *after
            }
            Witness::Vacuous { input } => match m.input_index(*input) {
                Ok(a) => (0..m.n_states()).all(|q| m.next(q, a) == q),
                Err(_) => false,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub holds: bool,
    /// Counterexample when `holds` is false; for existential predicates, the
    /// witness when it is true.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl PredicateReport {
    fn holds() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }
}

fn distinct(m: &MealyAutomaton, a: char, b: char) -> Result<(usize, usize)> {
    if a == b {
        return Err(Error::InvalidArgument(format!(
            "complementarity needs two distinct inputs, got `{a}` twice"
        )));
    }
    Ok((m.input_index(a)?, m.input_index(b)?))
}

/// Holds iff `omega(q, a) = omega(delta(q, a), a)` for every `q` and `a`.
pub fn output_stable(m: &MealyAutomaton) -> PredicateReport {
    match first_unstable(m, m.inputs().len()) {
        None => PredicateReport::holds(),
        Some((q, a)) => PredicateReport {
            holds: false,
            witness: Some(Witness::pair(m, q, a, a)),
        },
    }
}

/// Holds iff some state `s` has `omega(s, a) != omega(delta(s, b), a)`.
pub fn complementary_witnessed(m: &MealyAutomaton, a: char, b: char) -> Result<PredicateReport> {
    let (ai, bi) = distinct(m, a, b)?;
    Ok(match first_disturbance(m, ai, bi) {
        Some(q) => PredicateReport {
            holds: true,
            witness: Some(Witness::pair(m, q, ai, bi)),
        },
        None => PredicateReport {
            holds: false,
            witness: None,
        },
    })
}

/// Holds iff for every `q`, `x` disturbs `z` and `z` disturbs `x`.
pub fn complementary_strict(m: &MealyAutomaton, x: char, z: char) -> Result<PredicateReport> {
    let (xi, zi) = distinct(m, x, z)?;
    for (measured, disturbing) in [(zi, xi), (xi, zi)] {
        if let Some(q) = first_undisturbed(m, measured, disturbing) {
            return Ok(PredicateReport {
                holds: false,
                witness: Some(Witness::pair(m, q, measured, disturbing)),
            });
        }
    }
    Ok(PredicateReport::holds())
}

/// Like [`complementary_strict`], but only over states the disturbing input
/// actually moves, and requiring at least one such state per direction.
pub fn complementary_restricted(m: &MealyAutomaton, x: char, z: char) -> Result<PredicateReport> {
    let (xi, zi) = distinct(m, x, z)?;
    for (measured, disturbing) in [(zi, xi), (xi, zi)] {
        match restricted_direction(m, measured, disturbing) {
            Ok(()) => {}
            Err(RestrictedFailure::Violation(q)) => {
                return Ok(PredicateReport {
                    holds: false,
                    witness: Some(Witness::pair(m, q, measured, disturbing)),
                })
            }
            Err(RestrictedFailure::Vacuous) => {
                return Ok(PredicateReport {
                    holds: false,
                    witness: Some(Witness::Vacuous {
                        input: m.inputs()[disturbing],
                    }),
                })
            }
        }
    }
    Ok(PredicateReport::holds())
}
