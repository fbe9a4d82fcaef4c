//! JSON scenario files: one evaluation per scenario, with the experiment,
//! extractor, predictor and repetition procedure named by spec records.
//!
//! A file holds either a single scenario object or `{"scenarios": [...]}`.
//! Relative input paths (automaton and stream files) resolve against the
//! directory of the config file.
//!
//! ```json
//! {
//!   "name": "dyadic",
//!   "experiment": { "kind": "dyadic", "k": 3, "seeds": { "kind": "fresh-noise", "base_seed": 42 } },
//!   "extractor": { "kind": "window", "lo": 4, "hi": 4 },
//!   "predictor": "identity",
//!   "repetition": { "kind": "fresh-seed" },
//!   "k": 100,
//!   "n_max": 100
//! }
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bitstreams::{BitStream, BitString};
use crate::dyadic::{dyadic_experiment, AdversarialRepetition, SeedSource, WindowExtractor};
use crate::error::{Error, Result};
use crate::mealy::{
    canonical_example, em_experiment, BlackBox, IoLogExtractor, MealyAutomaton, StateExtractor,
};
use crate::model::{
    predictor_by_id, EvaluationReport, Evaluator, Experiment, Extractor, FreshSeed, NullExtractor,
    Predictor, RepetitionProcedure, SameBox, SeedList, TrialIndexExtractor, TrialRecord,
    PREDICTOR_IDS,
};
use crate::quantum::{
    ec_experiment, OutcomeSource, PreparationExtractor, QubitState, ScriptExtractor,
};

pub const TOOL_NAME: &str = "predlab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StreamSpec {
    Rule {
        rule: String,
    },
    Periodic {
        #[serde(default)]
        prefix: BitString,
        cycle: BitString,
    },
    /// A finite string followed by zeros.
    Bits {
        bits: BitString,
    },
    Noise {
        seed: u64,
    },
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        total_bits: Option<usize>,
    },
}

impl StreamSpec {
    pub fn build(&self) -> Result<BitStream> {
        match self {
            StreamSpec::Rule { rule } => crate::bitstreams::make_rule_stream(rule),
            StreamSpec::Periodic { prefix, cycle } => {
                BitStream::periodic(prefix.clone(), cycle.clone())
            }
            StreamSpec::Bits { bits } => Ok(BitStream::zero_padded(bits.clone())),
            StreamSpec::Noise { seed } => Ok(BitStream::SeededNoise { seed: *seed }),
            StreamSpec::File { path, total_bits } => {
                let bytes = fs::read(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                BitStream::from_bytes(bytes, *total_bits, path)
            }
        }
    }

    fn resolve(&mut self, base: &Path) {
        if let StreamSpec::File { path, .. } = self {
            *path = base.join(&*path);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeedSpec {
    /// Trial `i` gets SplitMix64 word `i` of `base_seed` as its noise seed.
    FreshNoise {
        base_seed: u64,
    },
    Fixed {
        stream: StreamSpec,
    },
    Cycle {
        streams: Vec<StreamSpec>,
    },
}

impl SeedSpec {
    pub fn build(&self) -> Result<SeedSource> {
        Ok(match self {
            SeedSpec::FreshNoise { base_seed } => SeedSource::FreshNoise {
                base_seed: *base_seed,
            },
            SeedSpec::Fixed { stream } => SeedSource::Fixed(stream.build()?),
            SeedSpec::Cycle { streams } => {
                if streams.is_empty() {
                    return Err(Error::Config("seed cycle needs at least one stream".into()));
                }
                SeedSource::Cycle(
                    streams
                        .iter()
                        .map(StreamSpec::build)
                        .collect::<Result<_>>()?,
                )
            }
        })
    }

    fn streams_mut(&mut self) -> Vec<&mut StreamSpec> {
        match self {
            SeedSpec::FreshNoise { .. } => Vec::new(),
            SeedSpec::Fixed { stream } => vec![stream],
            SeedSpec::Cycle { streams } => streams.iter_mut().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum AutomatonSpec {
    Canonical,
    Path(PathBuf),
    Text(String),
}

impl AutomatonSpec {
    pub fn build(&self) -> Result<MealyAutomaton> {
        match self {
            AutomatonSpec::Canonical => Ok(canonical_example()),
            AutomatonSpec::Path(path) => {
                let text = fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                MealyAutomaton::parse(&text)
            }
            AutomatonSpec::Text(text) => MealyAutomaton::parse(text),
        }
    }
}

/// `{"angle": theta}` for `cos(theta)|0> + sin(theta)|1>`, or
/// `{"amplitudes": [[re0, im0], [re1, im1]]}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum QubitSpec {
    Angle(f64),
    Amplitudes([[f64; 2]; 2]),
}

impl QubitSpec {
    pub fn build(&self) -> Result<QubitState> {
        match *self {
            QubitSpec::Angle(theta) => Ok(QubitState::from_angle(theta)),
            QubitSpec::Amplitudes([[r0, i0], [r1, i1]]) => QubitState::new(
                num_complex::Complex64::new(r0, i0),
                num_complex::Complex64::new(r1, i1),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    Born { seed: u64 },
    Scripted { stream: StreamSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentSpec {
    Dyadic {
        k: usize,
        seeds: SeedSpec,
    },
    MealyEm {
        automaton: AutomatonSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<String>,
    },
    QubitEc {
        psi: QubitSpec,
        phi: QubitSpec,
        source: SourceSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExtractorSpec {
    Null,
    TrialIndex,
    Window {
        lo: usize,
        hi: usize,
    },
    IoLog {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        only: Option<char>,
    },
    AutomatonState,
    Preparation,
    Script,
}

impl ExtractorSpec {
    pub fn build(&self) -> Result<Arc<dyn Extractor>> {
        Ok(match self {
            ExtractorSpec::Null => Arc::new(NullExtractor),
            ExtractorSpec::TrialIndex => Arc::new(TrialIndexExtractor),
            ExtractorSpec::Window { lo, hi } => Arc::new(WindowExtractor::new(*lo, *hi)?),
            ExtractorSpec::IoLog { only: None } => Arc::new(IoLogExtractor::all()),
            ExtractorSpec::IoLog { only: Some(c) } => Arc::new(IoLogExtractor::outputs_of(*c)),
            ExtractorSpec::AutomatonState => Arc::new(StateExtractor),
            ExtractorSpec::Preparation => Arc::new(PreparationExtractor),
            ExtractorSpec::Script => Arc::new(ScriptExtractor),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RepetitionSpec {
    FreshSeed,
    SeedList {
        streams: Vec<StreamSpec>,
    },
    SameBox {
        /// Symbols fed before each trial instead of the default `x`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preparation: Option<String>,
    },
    /// Dyadic experiments only. The extractor must stay inside seed bits `1..=l`.
    Adversarial {
        l: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<SeedSpec>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials_csv: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub experiment: ExperimentSpec,
    pub extractor: ExtractorSpec,
    pub predictor: String,
    pub repetition: RepetitionSpec,
    pub k: usize,
    pub n_max: usize,
    /// Replaces the dyadic `fresh-noise` base seed and the `born` seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioList {
    scenarios: Vec<ScenarioConfig>,
}

/// Parses a single scenario or a `{"scenarios": [...]}` list.
pub fn parse_config(text: &str) -> Result<Vec<ScenarioConfig>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(json_error)?;
    let configs = if value.get("scenarios").is_some() {
        serde_json::from_value::<ScenarioList>(value)
            .map_err(json_error)?
            .scenarios
    } else {
        vec![serde_json::from_value::<ScenarioConfig>(value).map_err(json_error)?]
    };
    if configs.is_empty() {
        return Err(Error::Config("no scenarios".into()));
    }
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Config(e.to_string())
}

/// Reads and validates a config file, resolving relative input paths
/// against its directory.
pub fn load_config(path: &Path) -> Result<Vec<ScenarioConfig>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut configs = parse_config(&text)?;
    let base = path.parent().unwrap_or(Path::new(""));
    for c in &mut configs {
        c.resolve_paths(base);
    }
    Ok(configs)
}

impl ScenarioConfig {
    /// Registry lookups and count checks that need no I/O.
    pub fn validate(&self) -> Result<()> {
        if predictor_by_id(&self.predictor).is_none() {
            return Err(Error::Config(format!(
                "scenario `{}`: unknown predictor `{}` (known: {})",
                self.name,
                self.predictor,
                PREDICTOR_IDS.join(", ")
            )));
        }
        if self.k == 0 || self.n_max < self.k {
            return Err(Error::Config(format!(
                "scenario `{}`: need 1 <= k <= n_max, got k={}, n_max={}",
                self.name, self.k, self.n_max
            )));
        }
        if let RepetitionSpec::Adversarial { .. } = self.repetition {
            if !matches!(self.experiment, ExperimentSpec::Dyadic { .. }) {
                return Err(Error::Config(format!(
                    "scenario `{}`: adversarial repetition needs a dyadic experiment",
                    self.name
                )));
            }
        }
        let mut streams: Vec<&StreamSpec> = Vec::new();
        match &self.experiment {
            ExperimentSpec::Dyadic {
                seeds: SeedSpec::Fixed { stream },
                ..
            } => streams.push(stream),
            ExperimentSpec::Dyadic {
                seeds: SeedSpec::Cycle { streams: s },
                ..
            } => streams.extend(s),
            ExperimentSpec::QubitEc {
                source: SourceSpec::Scripted { stream },
                ..
            } => streams.push(stream),
            _ => {}
        }
        if let RepetitionSpec::SeedList { streams: s } = &self.repetition {
            streams.extend(s);
        }
        for s in streams {
            if let StreamSpec::Rule { rule } = s {
                crate::bitstreams::Rule::parse(rule)?;
            }
        }
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        match &mut self.experiment {
            ExperimentSpec::Dyadic { seeds, .. } => seeds
                .streams_mut()
                .into_iter()
                .for_each(|s| s.resolve(base)),
            ExperimentSpec::MealyEm {
                automaton: AutomatonSpec::Path(p),
                ..
            } => *p = base.join(&*p),
            ExperimentSpec::QubitEc {
                source: SourceSpec::Scripted { stream },
                ..
            } => stream.resolve(base),
            _ => {}
        }
        match &mut self.repetition {
            RepetitionSpec::SeedList { streams } => {
                streams.iter_mut().for_each(|s| s.resolve(base))
            }
            RepetitionSpec::Adversarial {
                base: Some(seeds), ..
            } => seeds
                .streams_mut()
                .into_iter()
                .for_each(|s| s.resolve(base)),
            _ => {}
        }
    }

    /// The config with the `seed` override folded into the noise sources.
    pub fn effective(&self) -> ScenarioConfig {
        let mut c = self.clone();
        if let Some(seed) = c.seed {
            match &mut c.experiment {
                ExperimentSpec::Dyadic {
                    seeds: SeedSpec::FreshNoise { base_seed },
                    ..
                } => *base_seed = seed,
                ExperimentSpec::QubitEc {
                    source: SourceSpec::Born { seed: s },
                    ..
                } => *s = seed,
                _ => {}
            }
        }
        c
    }

    /// Instantiates every component.
    pub fn build(&self, fuel: u64) -> Result<Scenario> {
        let c = self.effective();
        let predictor = predictor_by_id(&c.predictor)
            .ok_or_else(|| Error::Config(format!("unknown predictor `{}`", c.predictor)))?;
        let extractor = c.extractor.build()?;
        let mut degenerate = None;
        let mut dyadic_k = None;
        let experiment: Box<dyn Experiment> = match &c.experiment {
            ExperimentSpec::Dyadic { k, seeds } => {
                dyadic_k = Some(*k);
                Box::new(dyadic_experiment(*k, seeds.build()?)?)
            }
            ExperimentSpec::MealyEm { automaton, start } => Box::new(em_experiment(
                BlackBox::new(automaton.build()?, start.as_deref())?,
            )?),
            ExperimentSpec::QubitEc { psi, phi, source } => {
                let source = match source {
                    SourceSpec::Born { seed } => OutcomeSource::Born { seed: *seed },
                    SourceSpec::Scripted { stream } => OutcomeSource::Scripted(stream.build()?),
                };
                let e = ec_experiment(psi.build()?, phi.build()?, source)?;
                degenerate = Some(e.is_degenerate());
                Box::new(e)
            }
        };
        crate::model::check_admissible(experiment.as_ref(), extractor.as_ref())?;
        let repetition: Box<dyn RepetitionProcedure> = match &c.repetition {
            RepetitionSpec::FreshSeed => Box::new(FreshSeed),
            RepetitionSpec::SeedList { streams } => Box::new(SeedList::new(
                streams
                    .iter()
                    .map(StreamSpec::build)
                    .collect::<Result<_>>()?,
            )?),
            RepetitionSpec::SameBox { preparation: None } => Box::new(SameBox::new()),
            RepetitionSpec::SameBox {
                preparation: Some(p),
            } => Box::new(SameBox::with_preparation(p.chars())),
            RepetitionSpec::Adversarial { l, base } => {
                let k = dyadic_k.ok_or_else(|| {
                    Error::Config("adversarial repetition needs a dyadic experiment".into())
                })?;
                let mut adv =
                    AdversarialRepetition::new(predictor.clone(), extractor.clone(), *l, k)?
                        .with_fuel(fuel);
                if let Some(base) = base {
                    adv = adv.with_base(base.build()?);
                }
                Box::new(adv)
            }
        };
        Ok(Scenario {
            config: c,
            experiment,
            repetition,
            extractor,
            predictor,
            fuel,
            degenerate,
        })
    }

    /// Builds and runs with `fuel` steps per predictor call.
    pub fn run(&self, fuel: u64) -> Result<RunReport> {
        self.build(fuel)?.run()
    }
}

/// A built scenario, ready to evaluate once.
pub struct Scenario {
    config: ScenarioConfig,
    experiment: Box<dyn Experiment>,
    repetition: Box<dyn RepetitionProcedure>,
    extractor: Arc<dyn Extractor>,
    predictor: Arc<dyn Predictor>,
    fuel: u64,
    degenerate: Option<bool>,
}

impl Scenario {
    pub fn run(mut self) -> Result<RunReport> {
        let started = Instant::now();
        let report = Evaluator::new(self.config.k, self.config.n_max)
            .fuel(self.fuel)
            .run(
                self.experiment.as_mut(),
                self.repetition.as_mut(),
                self.extractor.as_ref(),
                self.predictor.as_ref(),
            )?;
        Ok(RunReport {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            scenario: self.config,
            components: Components {
                experiment: self.experiment.id(),
                extractor: self.extractor.id(),
                predictor: self.predictor.id(),
                repetition: self.repetition.id(),
                fuel: self.fuel,
            },
            degenerate: self.degenerate,
            report,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    pub experiment: String,
    pub extractor: String,
    pub predictor: String,
    pub repetition: String,
    pub fuel: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub scenario: ScenarioConfig,
    pub components: Components,
    /// Set for qubit experiments: the preparation and target commute.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<bool>,
    pub report: EvaluationReport,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

pub const TRIALS_CSV_HEADER: [&str; 5] = [
    "index",
    "extracted",
    "prediction",
    "outcome",
    "classification",
];

/// One row per trial: `index,extracted,prediction,outcome,classification`.
pub fn trials_csv(trials: &[TrialRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRIALS_CSV_HEADER).expect("in-memory write");
    for t in trials {
        let class = serde_json::to_value(t.classification).expect("serialises");
        w.write_record([
            t.index.to_string(),
            t.extracted.to_string(),
            t.prediction.label().to_string(),
            t.outcome.to_string(),
            class.as_str().unwrap_or_default().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}
