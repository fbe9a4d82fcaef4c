//! Scenario generators shared by the property suites.

use predlab::bitstreams::BitString;
use predlab::mealy::MealyAutomaton;
use predlab::model::PREDICTOR_IDS;
use predlab::scenario::{
    AutomatonSpec, ExperimentSpec, ExtractorSpec, QubitSpec, RepetitionSpec, ScenarioConfig, SeedSpec, SourceSpec,
    StreamSpec,
};
use proptest::prelude::*;

pub fn arb_stream() -> impl Strategy<Value = StreamSpec> {
    prop_oneof![
        prop::sample::select(vec!["champernowne-binary", "pi-binary", "alternating", "constant(0)", "constant(1)"])
            .prop_map(|r| StreamSpec::Rule { rule: r.into() }),
        any::<u64>().prop_map(|seed| StreamSpec::Noise { seed }),
        (prop::collection::vec(0u8..=1, 0..6), prop::collection::vec(0u8..=1, 1..6)).prop_map(|(p, c)| {
            StreamSpec::Periodic { prefix: BitString::from_bits(p).unwrap(), cycle: BitString::from_bits(c).unwrap() }
        }),
    ]
}

fn arb_dyadic() -> impl Strategy<Value = (ExperimentSpec, ExtractorSpec, RepetitionSpec)> {
    (1usize..12).prop_flat_map(|k| {
        let seeds = prop_oneof![
            any::<u64>().prop_map(|base_seed| SeedSpec::FreshNoise { base_seed }),
            arb_stream().prop_map(|stream| SeedSpec::Fixed { stream }),
            prop::collection::vec(arb_stream(), 1..4).prop_map(|streams| SeedSpec::Cycle { streams }),
        ];
        let free = (1usize..=k + 2, 0usize..3).prop_map(|(lo, w)| ExtractorSpec::Window { lo, hi: lo + w });
        let plain = (seeds.clone(), free, Just(RepetitionSpec::FreshSeed));
        let adversarial = (seeds, 1usize..=k).prop_flat_map(move |(seeds, l)| {
            (1usize..=l).prop_flat_map(move |hi| {
                let seeds = seeds.clone();
                (1usize..=hi).prop_map(move |lo| {
                    (seeds.clone(), ExtractorSpec::Window { lo, hi }, RepetitionSpec::Adversarial { l, base: None })
                })
            })
        });
        prop_oneof![plain, adversarial].prop_map(move |(seeds, ext, rep)| (ExperimentSpec::Dyadic { k, seeds }, ext, rep))
    })
}

fn arb_automaton() -> impl Strategy<Value = (String, String)> {
    (1usize..=3).prop_flat_map(|n| {
        (prop::collection::vec(0..n, 2 * n), prop::collection::vec(0u8..=1, 2 * n), 0..n).prop_map(move |(d, w, s)| {
            let m = MealyAutomaton::from_tables(n, vec!['x', 'z'], d, w).unwrap();
            (m.to_text(), m.state_label(s).to_string())
        })
    })
}

fn arb_mealy() -> impl Strategy<Value = (ExperimentSpec, ExtractorSpec, RepetitionSpec)> {
    let extractor = prop_oneof![
        Just(ExtractorSpec::IoLog { only: None }),
        Just(ExtractorSpec::IoLog { only: Some('z') }),
        Just(ExtractorSpec::TrialIndex),
        Just(ExtractorSpec::Null),
    ];
    let preparation = prop_oneof![Just(None), Just(Some("x".to_string())), Just(Some("zx".to_string()))];
    (arb_automaton(), extractor, preparation).prop_map(|((text, start), ext, preparation)| {
        (
            ExperimentSpec::MealyEm { automaton: AutomatonSpec::Text(text), start: Some(start) },
            ext,
            RepetitionSpec::SameBox { preparation },
        )
    })
}

fn arb_qubit() -> impl Strategy<Value = (ExperimentSpec, ExtractorSpec, RepetitionSpec)> {
    let source = prop_oneof![
        any::<u64>().prop_map(|seed| SourceSpec::Born { seed }),
        arb_stream().prop_map(|stream| SourceSpec::Scripted { stream }),
    ];
    let angle = prop_oneof![Just(0.0), Just(std::f64::consts::FRAC_PI_2), 0.0f64..3.2];
    let extractor = prop_oneof![Just(ExtractorSpec::Preparation), Just(ExtractorSpec::TrialIndex), Just(ExtractorSpec::Null)];
    (angle.clone(), angle, source, extractor).prop_map(|(a, b, source, ext)| {
        (
            ExperimentSpec::QubitEc { psi: QubitSpec::Angle(a), phi: QubitSpec::Angle(b), source },
            ext,
            RepetitionSpec::FreshSeed,
        )
    })
}

pub fn arb_config() -> impl Strategy<Value = ScenarioConfig> {
    let parts = prop_oneof![arb_dyadic(), arb_mealy(), arb_qubit()];
    (parts, prop::sample::select(PREDICTOR_IDS.to_vec()), 1usize..40, 0usize..40).prop_map(
        |((experiment, extractor, repetition), predictor, k, slack)| ScenarioConfig {
            name: "generated".into(),
            experiment,
            extractor,
            predictor: predictor.into(),
            repetition,
            k,
            n_max: k + slack,
            seed: None,
            outputs: Default::default(),
        },
    )
}

pub fn with_counts(c: &ScenarioConfig, k: usize, n_max: usize) -> ScenarioConfig {
    ScenarioConfig { k, n_max, ..c.clone() }
}
