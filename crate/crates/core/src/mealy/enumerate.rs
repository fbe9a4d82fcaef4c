//! Exhaustive enumeration of Mealy automata over `Sigma = {x, z}`.
//!
//! Candidates with `n` states are indexed `d * 4^n + w`: digit `e` (base `n`,
//! least significant first) of `d` is `delta` entry `e = q * 2 + a`, bit `e`
//! of `w` is `omega` entry `e`. No isomorphism reduction is applied.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::predicates::{
    first_disturbance, first_undisturbed, first_unstable, restricted_direction, Tables,
};
use super::MealyAutomaton;
use crate::error::{Error, Result};

pub const MAX_ENUMERATION_STATES: usize = 4;

const X: usize = 0;
const Z: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredicateKind {
    OutputStable,
    /// Strict complementarity of `x` and `z`.
    Strict,
    /// Complementarity over non-fixed states, non-vacuous.
    Restricted,
    /// `complementary_witnessed(z, x)` and `complementary_witnessed(x, z)`.
    Witnessed,
}

impl PredicateKind {
    pub const ALL: [PredicateKind; 4] = [
        PredicateKind::OutputStable,
        PredicateKind::Strict,
        PredicateKind::Restricted,
        PredicateKind::Witnessed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredicateKind::OutputStable => "output-stable",
            PredicateKind::Strict => "strict",
            PredicateKind::Restricted => "restricted",
            PredicateKind::Witnessed => "witnessed",
        }
    }

    fn eval<T: Tables>(self, t: &T) -> bool {
        match self {
            PredicateKind::OutputStable => first_unstable(t, 2).is_none(),
            PredicateKind::Strict => {
                first_undisturbed(t, Z, X).is_none() && first_undisturbed(t, X, Z).is_none()
            }
            PredicateKind::Restricted => {
                restricted_direction(t, Z, X).is_ok() && restricted_direction(t, X, Z).is_ok()
            }
            PredicateKind::Witnessed => {
                first_disturbance(t, Z, X).is_some() && first_disturbance(t, X, Z).is_some()
            }
        }
    }

    /// Evaluates this predicate on an automaton with inputs `x` and `z`.
    pub fn holds(self, m: &MealyAutomaton) -> Result<bool> {
        Ok(match self {
            PredicateKind::OutputStable => m.output_stable().holds,
            PredicateKind::Strict => m.complementary_strict('x', 'z')?.holds,
            PredicateKind::Restricted => m.complementary_restricted('x', 'z')?.holds,
            PredicateKind::Witnessed => {
                m.complementary_witnessed('z', 'x')?.holds
                    && m.complementary_witnessed('x', 'z')?.holds
            }
        })
    }
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjunctionCount {
    pub predicates: Vec<PredicateKind>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub states: usize,
    pub candidates: u64,
    pub conjunctions: Vec<ConjunctionCount>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub q_max: usize,
    pub predicates: Vec<PredicateKind>,
    pub sizes: Vec<SizeSummary>,
    pub totals: Vec<ConjunctionCount>,
    /// Automata satisfying every selected predicate, in index order.
    pub exemplars: Vec<String>,
}

struct Scratch {
    n: usize,
    delta: [usize; 2 * MAX_ENUMERATION_STATES],
    omega: [u8; 2 * MAX_ENUMERATION_STATES],
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            n,
            delta: [0; 2 * MAX_ENUMERATION_STATES],
            omega: [0; 2 * MAX_ENUMERATION_STATES],
        }
    }

    fn load_delta(&mut self, mut d: u64) {
        for e in 0..2 * self.n {
            self.delta[e] = (d % self.n as u64) as usize;
            d /= self.n as u64;
        }
    }

    fn load_omega(&mut self, w: u64) {
        for e in 0..2 * self.n {
            self.omega[e] = ((w >> e) & 1) as u8;
        }
    }

    fn to_automaton(&self) -> MealyAutomaton {
        let cells = 2 * self.n;
        MealyAutomaton::from_tables(
            self.n,
            vec!['x', 'z'],
            self.delta[..cells].to_vec(),
            self.omega[..cells].to_vec(),
        )
        .expect("enumerated tables are total")
    }
}

impl Tables for Scratch {
    fn n_states(&self) -> usize {
        self.n
    }

    fn next(&self, q: usize, a: usize) -> usize {
        self.delta[q * 2 + a]
    }

    fn output(&self, q: usize, a: usize) -> u8 {
        self.omega[q * 2 + a]
    }
}

fn delta_tables(n: usize) -> u64 {
    (n as u64).pow(2 * n as u32)
}

/// Every automaton with `n` states over `{x, z}`, in index order.
pub fn all_automata(n: usize) -> impl Iterator<Item = MealyAutomaton> {
    let omegas = 1u64 << (2 * n);
    (0..delta_tables(n)).flat_map(move |d| {
        (0..omegas).map(move |w| {
            let mut s = Scratch::new(n);
            s.load_delta(d);
            s.load_omega(w);
            s.to_automaton()
        })
    })
}

/// Counts, for each `|Q| <= q_max`, the automata satisfying every non-empty
/// conjunction of `predicates`, and collects up to `max_exemplars`
/// automata satisfying all of them.
pub fn enumerate_automata(
    q_max: usize,
    predicates: &[PredicateKind],
    max_exemplars: usize,
) -> Result<EnumerationSummary> {
    if q_max > MAX_ENUMERATION_STATES {
        return Err(Error::EnumerationTooLarge {
            requested: q_max,
            max: MAX_ENUMERATION_STATES,
        });
    }
    let mut selected = predicates.to_vec();
    selected.sort();
    selected.dedup();
    let p = selected.len();
    let full_mask = (1usize << p) - 1;

    let mut sizes = Vec::new();
    let mut exemplars = Vec::new();
    for n in 1..=q_max {
        let omegas = 1u64 << (2 * n);
        // Histogram over which predicates held, plus the first few exemplars.
        let partials: Vec<(Vec<u64>, Vec<MealyAutomaton>)> = (0..delta_tables(n))
            .into_par_iter()
            .map(|d| {
                let mut hist = vec![0u64; 1 << p];
                let mut found = Vec::new();
                let mut s = Scratch::new(n);
                s.load_delta(d);
                for w in 0..omegas {
                    s.load_omega(w);
                    let mut mask = 0usize;
                    for (i, kind) in selected.iter().enumerate() {
                        if kind.eval(&s) {
                            mask |= 1 << i;
                        }
                    }
                    hist[mask] += 1;
                    if mask == full_mask && found.len() < max_exemplars {
                        found.push(s.to_automaton());
                    }
                }
                (hist, found)
            })
            .collect();

        let mut hist = vec![0u64; 1 << p];
        for (h, found) in partials {
            for (acc, v) in hist.iter_mut().zip(h) {
                *acc += v;
            }
            for m in found {
                if exemplars.len() < max_exemplars {
                    exemplars.push(m.to_text());
                }
            }
        }
        let conjunctions = (1..=full_mask)
            .map(|subset| ConjunctionCount {
                predicates: (0..p)
                    .filter(|i| subset & (1 << i) != 0)
                    .map(|i| selected[i])
                    .collect(),
                count: hist
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| m & subset == subset)
                    .map(|(_, c)| c)
                    .sum(),
            })
            .collect();
        sizes.push(SizeSummary {
            states: n,
            candidates: delta_tables(n) * omegas,
            conjunctions,
        });
    }

    let totals = (1..=full_mask)
        .map(|subset| {
            let idx = subset - 1;
            ConjunctionCount {
                predicates: sizes.first().map_or_else(Vec::new, |s: &SizeSummary| {
                    s.conjunctions[idx].predicates.clone()
                }),
                count: sizes.iter().map(|s| s.conjunctions[idx].count).sum(),
            }
        })
        .collect();

    Ok(EnumerationSummary {
        q_max,
        predicates: selected,
        sizes,
        totals,
        exemplars,
    })
}
