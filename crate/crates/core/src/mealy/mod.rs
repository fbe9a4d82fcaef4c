//! Mealy automata as value-definite toy models of complementary measurements.
//!
//! Text format, one item per line, `#` starts a comment:
//!
//! ```text
//! states: p0 p1 q0 q1
//! inputs: x z
//! p0 x -> p0 0
//! p0 z -> q0 0
//! ...
//! ```
//!
//! Every `(state, input)` pair must appear exactly once. [`MealyAutomaton::to_text`]
//! prints states in declaration order and inputs in declaration order, so
//! printing a parsed canonical file reproduces it byte for byte.

mod blackbox;
mod enumerate;
mod predicates;

use std::fmt;

use crate::error::{Error, Result};

pub use blackbox::{
    em_experiment, em_orbit, run_em, BlackBox, EmExperiment, IoLogExtractor, StateExtractor,
};
pub use enumerate::{
    all_automata, enumerate_automata, ConjunctionCount, EnumerationSummary, PredicateKind,
    SizeSummary, MAX_ENUMERATION_STATES,
};
pub use predicates::{PredicateReport, Witness};

/// `(Q, Sigma, {0,1}, delta, omega)` with total tables.
#[derive(Clone, PartialEq, Eq)]
pub struct MealyAutomaton {
    states: Vec<String>,
    inputs: Vec<char>,
    /// `delta[q * |Sigma| + a]`
    delta: Vec<usize>,
    /// `omega[q * |Sigma| + a]`
    omega: Vec<u8>,
}

impl MealyAutomaton {
    pub fn new(
        states: Vec<String>,
        inputs: Vec<char>,
        delta: Vec<usize>,
        omega: Vec<u8>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidArgument(
                "automaton needs at least one state".into(),
            ));
        }
        if inputs.is_empty() {
            return Err(Error::InvalidArgument(
                "automaton needs at least one input symbol".into(),
            ));
        }
        for (i, s) in states.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '#') {
                return Err(Error::InvalidArgument(format!("invalid state label `{s}`")));
            }
            if states[..i].contains(s) {
                return Err(Error::InvalidArgument(format!("duplicate state `{s}`")));
            }
        }
        for (i, c) in inputs.iter().enumerate() {
            if c.is_whitespace() || *c == '#' || *c == ':' {
                return Err(Error::InvalidArgument(format!(
                    "invalid input symbol `{c}`"
                )));
            }
            if inputs[..i].contains(c) {
                return Err(Error::InvalidArgument(format!("duplicate input `{c}`")));
            }
        }
        let cells = states.len() * inputs.len();
        if delta.len() != cells || omega.len() != cells {
            return Err(Error::InvalidArgument(format!(
                "tables must have {cells} entries, got delta {} and omega {}",
                delta.len(),
                omega.len()
            )));
        }
        if let Some(&bad) = delta.iter().find(|&&q| q >= states.len()) {
            return Err(Error::InvalidArgument(format!(
                "transition to unknown state index {bad}"
            )));
        }
        if let Some(&bad) = omega.iter().find(|&&o| o > 1) {
            return Err(Error::InvalidArgument(format!("output {bad} is not a bit")));
        }
        Ok(Self {
            states,
            inputs,
            delta,
            omega,
        })
    }

    /// States labelled `s0, s1, ...`.
    pub fn from_tables(
        n_states: usize,
        inputs: Vec<char>,
        delta: Vec<usize>,
        omega: Vec<u8>,
    ) -> Result<Self> {
        Self::new(
            (0..n_states).map(|i| format!("s{i}")).collect(),
            inputs,
            delta,
            omega,
        )
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn inputs(&self) -> &[char] {
        &self.inputs
    }

    pub fn state_label(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown state `{label}`")))
    }

    pub fn input_index(&self, symbol: char) -> Result<usize> {
        self.inputs
            .iter()
            .position(|&c| c == symbol)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown input symbol `{symbol}`")))
    }

    /// `delta(q, a)` by indices.
    pub fn next(&self, q: usize, a: usize) -> usize {
        self.delta[q * self.inputs.len() + a]
    }

    /// `omega(q, a)` by indices.
    pub fn output(&self, q: usize, a: usize) -> u8 {
        self.omega[q * self.inputs.len() + a]
    }

    /// Feeds `symbols` from state `q`; returns the outputs and the final state.
    pub fn trace(&self, q: usize, symbols: &str) -> Result<(Vec<u8>, usize)> {
        let mut state = q;
        let mut out = Vec::with_capacity(symbols.len());
        for c in symbols.chars() {
            let a = self.input_index(c)?;
            out.push(self.output(state, a));
            state = self.next(state, a);
        }
        Ok((out, state))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("states: {}\ninputs: ", self.states.join(" "));
        let inputs: Vec<String> = self.inputs.iter().map(|c| c.to_string()).collect();
        s.push_str(&inputs.join(" "));
        s.push('\n');
        for q in 0..self.n_states() {
            for (a, c) in self.inputs.iter().enumerate() {
                s.push_str(&format!(
                    "{} {} -> {} {}\n",
                    self.states[q],
                    c,
                    self.states[self.next(q, a)],
                    self.output(q, a)
                ));
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse { line, message };
        let mut states: Option<Vec<String>> = None;
        let mut inputs: Option<Vec<char>> = None;
        let mut rows: Vec<(usize, String, char, String, u8)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("states:") {
                if states.is_some() {
                    return Err(perr(line_no, "duplicate `states:` line".into()));
                }
                states = Some(rest.split_whitespace().map(str::to_string).collect());
            } else if let Some(rest) = line.strip_prefix("inputs:") {
                if inputs.is_some() {
                    return Err(perr(line_no, "duplicate `inputs:` line".into()));
                }
                let mut syms = Vec::new();
                for tok in rest.split_whitespace() {
                    let mut chars = tok.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => syms.push(c),
                        _ => {
                            return Err(perr(
                                line_no,
                                format!("input symbol `{tok}` must be one character"),
                            ))
                        }
                    }
                }
                inputs = Some(syms);
            } else {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                let [from, sym, arrow, to, out] = tokens[..] else {
                    return Err(perr(
                        line_no,
                        format!("expected `STATE INPUT -> STATE BIT`, got `{line}`"),
                    ));
                };
                if arrow != "->" {
                    return Err(perr(line_no, format!("expected `->`, got `{arrow}`")));
                }
                let mut chars = sym.chars();
                let (Some(c), None) = (chars.next(), chars.next()) else {
                    return Err(perr(
                        line_no,
                        format!("input symbol `{sym}` must be one character"),
                    ));
                };
                let bit = match out {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(perr(line_no, format!("output `{out}` is not 0 or 1"))),
                };
                rows.push((line_no, from.to_string(), c, to.to_string(), bit));
            }
        }

        let states = states.ok_or_else(|| perr(0, "missing `states:` line".into()))?;
        let inputs = inputs.ok_or_else(|| perr(0, "missing `inputs:` line".into()))?;
        let cells = states.len() * inputs.len();
        let mut delta: Vec<Option<usize>> = vec![None; cells];
        let mut omega = vec![0u8; cells];
        for (line_no, from, c, to, bit) in rows {
            let q = states
                .iter()
                .position(|s| *s == from)
                .ok_or_else(|| perr(line_no, format!("unknown state `{from}`")))?;
            let a = inputs
                .iter()
                .position(|&s| s == c)
                .ok_or_else(|| perr(line_no, format!("unknown input `{c}`")))?;
            let t = states
                .iter()
                .position(|s| *s == to)
                .ok_or_else(|| perr(line_no, format!("unknown state `{to}`")))?;
            let cell = q * inputs.len() + a;
            if delta[cell].is_some() {
                return Err(perr(line_no, format!("duplicate entry for ({from}, {c})")));
            }
            delta[cell] = Some(t);
            omega[cell] = bit;
        }
        if let Some(missing) = delta.iter().position(Option::is_none) {
            let q = missing / inputs.len();
            let a = missing % inputs.len();
            return Err(perr(
                0,
                format!("missing entry for ({}, {})", states[q], inputs[a]),
            ));
        }
        Self::new(
            states,
            inputs,
            delta.into_iter().map(Option::unwrap).collect(),
            omega,
        )
    }

    /// `{ q : delta(q, a) = q }`, as state labels in declaration order.
    pub fn eigenstates(&self, a: char) -> Result<Vec<String>> {
        let ai = self.input_index(a)?;
        Ok((0..self.n_states())
            .filter(|&q| self.next(q, ai) == q)
            .map(|q| self.states[q].clone())
            .collect())
    }

    pub fn output_stable(&self) -> PredicateReport {
        predicates::output_stable(self)
    }

    pub fn complementary_witnessed(&self, a: char, b: char) -> Result<PredicateReport> {
        predicates::complementary_witnessed(self, a, b)
    }

    pub fn complementary_strict(&self, x: char, z: char) -> Result<PredicateReport> {
        predicates::complementary_strict(self, x, z)
    }

    pub fn complementary_restricted(&self, x: char, z: char) -> Result<PredicateReport> {
        predicates::complementary_restricted(self, x, z)
    }
}

impl fmt::Debug for MealyAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The four-state qubit analogue: `p_a` are the x-eigenstates with x-value
/// `a`, `q_b` the z-eigenstates with z-value `b`.
///
/// | state | x          | z          |
/// |-------|------------|------------|
/// | p_a   | p_a / a    | q_a / a    |
/// | q_b   | p_¬b / ¬b  | q_b / b    |
pub fn canonical_example() -> MealyAutomaton {
    let states = ["p0", "p1", "q0", "q1"].map(String::from).to_vec();
    let (p0, p1, q0, q1) = (0, 1, 2, 3);
    // rows: (x-next, x-out, z-next, z-out)
    let rows = [
        (p0, 0, q0, 0),
        (p1, 1, q1, 1),
        (p1, 1, q0, 0),
        (p0, 0, q1, 1),
    ];
    let delta = rows.iter().flat_map(|r| [r.0, r.2]).collect();
    let omega = rows.iter().flat_map(|r| [r.1, r.3]).collect();
    MealyAutomaton::new(states, vec!['x', 'z'], delta, omega).expect("canonical tables are total")
}

pub fn output_stable(m: &MealyAutomaton) -> PredicateReport {
    m.output_stable()
}

pub fn complementary_witnessed(m: &MealyAutomaton, a: char, b: char) -> Result<PredicateReport> {
    m.complementary_witnessed(a, b)
}

pub fn complementary_strict(m: &MealyAutomaton, x: char, z: char) -> Result<PredicateReport> {
    m.complementary_strict(x, z)
}

pub fn complementary_restricted(m: &MealyAutomaton, x: char, z: char) -> Result<PredicateReport> {
    m.complementary_restricted(x, z)
}

pub fn eigenstates(m: &MealyAutomaton, a: char) -> Result<Vec<String>> {
    m.eigenstates(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_tables() {
        let m = canonical_example();
        let q0 = m.state_index("q0").unwrap();
        let (out, fin) = m.trace(q0, "x").unwrap();
        assert_eq!(out, vec![1]);
        assert_eq!(m.state_label(fin), "p1");
        let (out, fin) = m.trace(fin, "xz").unwrap();
        assert_eq!(out, vec![1, 1]);
        assert_eq!(m.state_label(fin), "q1");
    }

    #[test]
    fn eigenstate_sets() {
        let m = canonical_example();
        assert_eq!(m.eigenstates('x').unwrap(), vec!["p0", "p1"]);
        assert_eq!(m.eigenstates('z').unwrap(), vec!["q0", "q1"]);
        assert!(m.eigenstates('y').is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = canonical_example();
        let text = m.to_text();
        let back = MealyAutomaton::parse(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_accepts_comments_and_any_order() {
        let text = "# toy\ninputs: x z\nstates: a\na z -> a 1  # keep\na x -> a 0\n";
        let m = MealyAutomaton::parse(text).unwrap();
        assert_eq!(m.output(0, 1), 1);
        assert_eq!(
            m.to_text(),
            "states: a\ninputs: x z\na x -> a 0\na z -> a 1\n"
        );
    }

    #[test]
    fn parse_errors() {
        let missing = "states: a b\ninputs: x\na x -> b 0\n";
        assert!(matches!(
            MealyAutomaton::parse(missing),
            Err(Error::Parse { .. })
        ));
        let dup = "states: a\ninputs: x\na x -> a 0\na x -> a 1\n";
        assert!(matches!(
            MealyAutomaton::parse(dup),
            Err(Error::Parse { line: 4, .. })
        ));
        let bad_bit = "states: a\ninputs: x\na x -> a 2\n";
        assert!(matches!(
            MealyAutomaton::parse(bad_bit),
            Err(Error::Parse { line: 3, .. })
        ));
        let unknown = "states: a\ninputs: x\na x -> b 0\n";
        assert!(MealyAutomaton::parse(unknown).is_err());
        assert!(MealyAutomaton::parse("inputs: x\n").is_err());
    }

    #[test]
    fn construction_validates_tables() {
        assert!(MealyAutomaton::from_tables(0, vec!['x'], vec![], vec![]).is_err());
        assert!(MealyAutomaton::from_tables(1, vec!['x'], vec![1], vec![0]).is_err());
        assert!(MealyAutomaton::from_tables(1, vec!['x'], vec![0], vec![2]).is_err());
        assert!(MealyAutomaton::from_tables(1, vec!['x', 'x'], vec![0, 0], vec![0, 0]).is_err());
    }
}
