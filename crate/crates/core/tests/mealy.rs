use predlab::analysis::detect_cycle;
use predlab::mealy::{
    all_automata, canonical_example, em_orbit, enumerate_automata, run_em, BlackBox, EnumerationSummary,
    MealyAutomaton, PredicateKind,
};
use proptest::prelude::*;

const GOLDEN_Q2: &str = include_str!("golden/enumeration_q2.json");

/// Direct transcriptions of the predicate definitions over `{x=0, z=1}`.
mod naive {
    use predlab::mealy::MealyAutomaton;

    fn changes(m: &MealyAutomaton, q: usize, measured: usize, disturbing: usize) -> bool {
        m.output(q, measured) != m.output(m.next(q, disturbing), measured)
    }

    pub fn output_stable(m: &MealyAutomaton) -> bool {
        (0..m.n_states()).all(|q| (0..2).all(|a| !changes(m, q, a, a)))
    }

    pub fn strict(m: &MealyAutomaton) -> bool {
        (0..m.n_states()).all(|q| changes(m, q, 1, 0) && changes(m, q, 0, 1))
    }

    pub fn restricted(m: &MealyAutomaton) -> bool {
        [(1, 0), (0, 1)].iter().all(|&(measured, disturbing)| {
            let moved: Vec<usize> = (0..m.n_states()).filter(|&q| m.next(q, disturbing) != q).collect();
            !moved.is_empty() && moved.iter().all(|&q| changes(m, q, measured, disturbing))
        })
    }

    pub fn witnessed(m: &MealyAutomaton) -> bool {
        [(1, 0), (0, 1)].iter().all(|&(measured, disturbing)| (0..m.n_states()).any(|q| changes(m, q, measured, disturbing)))
    }

    pub fn holds(kind: &str, m: &MealyAutomaton) -> bool {
        match kind {
            "output-stable" => output_stable(m),
            "strict" => strict(m),
            "restricted" => restricted(m),
            "witnessed" => witnessed(m),
            other => panic!("unknown predicate {other}"),
        }
    }
}

#[test]
fn q2_counts_match_golden_file() {
    let golden: EnumerationSummary = serde_json::from_str(GOLDEN_Q2).unwrap();
    let fresh = enumerate_automata(2, &PredicateKind::ALL, 0).unwrap();
    assert_eq!(fresh, golden);
}

#[test]
fn enumeration_counts_match_naive_oracle() {
    let summary = enumerate_automata(3, &PredicateKind::ALL, 0).unwrap();
    for size in &summary.sizes {
        let automata: Vec<MealyAutomaton> = all_automata(size.states).collect();
        assert_eq!(automata.len() as u64, size.candidates);
        for c in &size.conjunctions {
            let names: Vec<&str> = c.predicates.iter().map(|p| p.name()).collect();
            let expected = automata.iter().filter(|m| names.iter().all(|n| naive::holds(n, m))).count() as u64;
            assert_eq!(c.count, expected, "|Q|={} {:?}", size.states, names);
        }
    }
}

#[test]
fn single_state_counts() {
    let s = enumerate_automata(1, &[PredicateKind::Strict, PredicateKind::OutputStable], 0).unwrap();
    let count = |k: PredicateKind| s.sizes[0].conjunctions.iter().find(|c| c.predicates == [k]).unwrap().count;
    assert_eq!(count(PredicateKind::Strict), 0);
    assert_eq!(count(PredicateKind::OutputStable), 4);
}

#[test]
fn pigeonhole_periodicity_up_to_three_states() {
    for n in 1..=3 {
        for m in all_automata(n) {
            for q in 0..n {
                let (mu, lambda) = em_orbit(&m, q).unwrap();
                assert!(mu + lambda <= n, "orbit of {q} in\n{}", m.to_text());
                let label = m.state_label(q).to_string();
                let mut b = BlackBox::new(m.clone(), Some(&label)).unwrap();
                let out = run_em(&mut b, 4 * n).unwrap();
                let r = detect_cycle(&out, 4 * n).unwrap();
                assert!(r.found);
                assert!(r.transient + r.period <= n, "{out:?} from {label} in\n{}", m.to_text());
            }
        }
    }
}

#[test]
fn strict_implies_no_eigenstates() {
    let mut strict = 0;
    for n in 1..=3 {
        for m in all_automata(n) {
            if m.complementary_strict('x', 'z').unwrap().holds {
                strict += 1;
                assert!(m.eigenstates('x').unwrap().is_empty());
                assert!(m.eigenstates('z').unwrap().is_empty());
            }
        }
    }
    assert!(strict > 0);
}

#[test]
fn strict_implies_restricted_when_not_vacuous() {
    for n in 1..=3 {
        for m in all_automata(n) {
            let moves = |a: usize| (0..n).any(|q| m.next(q, a) != q);
            if m.complementary_strict('x', 'z').unwrap().holds && moves(0) && moves(1) {
                assert!(m.complementary_restricted('x', 'z').unwrap().holds, "\n{}", m.to_text());
            }
        }
    }
}

#[test]
fn counterexamples_reproduce() {
    for n in 1..=2 {
        for m in all_automata(n) {
            let reports = [
                m.output_stable(),
                m.complementary_strict('x', 'z').unwrap(),
                m.complementary_restricted('x', 'z').unwrap(),
                m.complementary_witnessed('z', 'x').unwrap(),
                m.complementary_witnessed('x', 'z').unwrap(),
            ];
            for r in reports {
                if let Some(w) = r.witness {
                    assert!(w.reproduces(&m), "{w:?} in\n{}", m.to_text());
                }
            }
        }
    }
}

#[test]
fn canonical_exemplar() {
    let m = canonical_example();
    assert!(m.output_stable().holds);
    assert!(m.complementary_restricted('x', 'z').unwrap().holds);
    assert_eq!(m.eigenstates('x').unwrap(), vec!["p0", "p1"]);
    let mut b = BlackBox::new(m, Some("q0")).unwrap();
    let out = run_em(&mut b, 10_000).unwrap();
    assert!(out.iter().enumerate().all(|(i, &o)| o == u8::from(i % 2 == 0)));
    let r = detect_cycle(&out, out.len()).unwrap();
    assert_eq!((r.transient, r.period), (0, 2));
}

#[test]
fn canonical_text_round_trip() {
    let m = canonical_example();
    let text = m.to_text();
    assert_eq!(MealyAutomaton::parse(&text).unwrap(), m);
    assert_eq!(MealyAutomaton::parse(&text).unwrap().to_text(), text);
}

fn arb_automaton() -> impl Strategy<Value = MealyAutomaton> {
    (1usize..6, 1usize..4).prop_flat_map(|(n, k)| {
        let labels = prop::collection::hash_set("[a-z][a-z0-9_]{0,4}", n);
        let inputs = prop::sample::subsequence(vec!['a', 'b', 'c', 'x', 'z', '0', '1'], k);
        (labels, inputs, prop::collection::vec(0..n, n * k), prop::collection::vec(0u8..=1, n * k)).prop_map(
            |(labels, inputs, delta, omega)| {
                MealyAutomaton::new(labels.into_iter().collect(), inputs, delta, omega).unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn text_round_trip(m in arb_automaton()) {
        let text = m.to_text();
        let parsed = MealyAutomaton::parse(&text).unwrap();
        prop_assert_eq!(parsed.to_text(), text);
        prop_assert_eq!(parsed, m);
    }

    #[test]
    fn row_order_does_not_matter(m in arb_automaton(), seed in any::<u64>()) {
        let text = m.to_text();
        let mut lines: Vec<&str> = text.lines().collect();
        let n = lines.len();
        for i in (1..n).rev() {
            let j = (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize;
            lines.swap(i, j);
        }
        let parsed = MealyAutomaton::parse(&lines.join("\n")).unwrap();
        prop_assert_eq!(parsed, m);
    }
}
