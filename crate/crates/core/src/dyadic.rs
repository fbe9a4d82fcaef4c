//! The dyadic-map experiment: shift the seed `k` times and report the first
//! bit, i.e. seed bit `k + 1`.
//!
//! Extractors that see bit `k + 1` predict it trivially. Extractors limited to
//! bits `1..=l` with `l <= k` cannot, and [`AdversarialRepetition`] shows it
//! for any concrete predictor by choosing bit `k + 1` after the prediction is
//! fixed.

use std::sync::Arc;

use crate::bitstreams::{splitmix_word, BitStream, BitString};
use crate::error::{Error, Result};
use crate::model::{
    invoke, unsupported, Component, Experiment, Extractor, ExtractorSet, HiddenState, Policy,
    Predictor, Preparation, RepetitionProcedure, Scope, ScopedView, TrialIndexExtractor,
    TrialRecord, DEFAULT_FUEL,
};

/// Assigns a seed stream to each trial index.
#[derive(Clone, Debug, PartialEq)]
pub enum SeedSource {
    /// Trial `i` gets the noise stream seeded with word `i` of SplitMix64(base).
    FreshNoise { base_seed: u64 },
    /// Every trial gets the same stream.
    Fixed(BitStream),
    /// Trial `i` gets `streams[(i - 1) mod len]`.
    Cycle(Vec<BitStream>),
}

impl SeedSource {
    pub fn seed_for(&self, trial_index: usize) -> BitStream {
        match self {
            SeedSource::FreshNoise { base_seed } => BitStream::SeededNoise {
                seed: splitmix_word(*base_seed, trial_index as u64),
            },
            SeedSource::Fixed(s) => s.clone(),
            SeedSource::Cycle(list) => list[(trial_index.max(1) - 1) % list.len()].clone(),
        }
    }
}

/// Hidden parameter of a dyadic trial: the seed and the trial index.
#[derive(Clone, Debug)]
pub struct SeedState {
    pub seed: BitStream,
    pub trial_index: usize,
}

impl HiddenState for SeedState {
    fn trial_index(&self) -> usize {
        self.trial_index
    }

    fn seed_bit(&self, j: usize) -> Option<Result<u8>> {
        Some(self.seed.bit(j))
    }
}

#[derive(Debug)]
pub struct DyadicExperiment {
    k: usize,
    seeds: SeedSource,
    current: SeedState,
    prepared: bool,
    completed: usize,
}

/// The experiment whose trial `i` outcome is bit `k + 1` of seed stream `i`.
pub fn dyadic_experiment(k: usize, seeds: SeedSource) -> Result<DyadicExperiment> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "dyadic shift count k must be at least 1".into(),
        ));
    }
    if let SeedSource::Cycle(list) = &seeds {
        if list.is_empty() {
            return Err(Error::InvalidArgument("seed cycle is empty".into()));
        }
    }
    let current = SeedState {
        seed: seeds.seed_for(1),
        trial_index: 1,
    };
    Ok(DyadicExperiment {
        k,
        seeds,
        current,
        prepared: false,
        completed: 0,
    })
}

impl DyadicExperiment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn current_seed(&self) -> &BitStream {
        &self.current.seed
    }
}

impl Experiment for DyadicExperiment {
    fn id(&self) -> String {
        format!("dyadic(k={})", self.k)
    }

    fn admissible_scope(&self) -> Scope {
        Scope::new([Component::ALL_SEED_BITS, Component::TrialIndex])
    }

    fn prepare(&mut self, trial_index: usize, preparation: &Preparation) -> Result<()> {
        let seed = match preparation {
            Preparation::Default => self.seeds.seed_for(trial_index),
            Preparation::Seed(s) => s.clone(),
            Preparation::Feed(_) => return Err(unsupported(self, preparation)),
        };
        self.current = SeedState { seed, trial_index };
        self.prepared = true;
        Ok(())
    }

    fn hidden(&self) -> &dyn HiddenState {
        &self.current
    }

    fn run_trial(&mut self) -> Result<u8> {
        if !self.prepared {
            self.prepare(self.completed + 1, &Preparation::Default)?;
        }
        let outcome = self.current.seed.bit(self.k + 1)?;
        self.prepared = false;
        self.completed += 1;
        Ok(outcome)
    }

    fn trials_completed(&self) -> usize {
        self.completed
    }
}

/// Reads seed bits `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowExtractor {
    lo: usize,
    hi: usize,
}

impl WindowExtractor {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "window needs 1 <= lo <= hi, got {lo}..={hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// The single-bit window `j..=j`.
    pub fn bit(j: usize) -> Result<Self> {
        Self::new(j, j)
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }
}

impl Extractor for WindowExtractor {
    fn id(&self) -> String {
        format!("window({},{})", self.lo, self.hi)
    }

    fn scope(&self) -> Scope {
        Scope::new([Component::SeedBits {
            lo: self.lo,
            hi: self.hi,
        }])
    }

    fn extract(&self, view: &ScopedView<'_>) -> Result<BitString> {
        (self.lo..=self.hi)
            .map(|j| view.seed_bit(j))
            .collect::<Result<Vec<u8>>>()
            .and_then(BitString::from_bits)
    }
}

/// All windows inside `1..=l`, plus the trial-index tap.
pub fn precision_limited_family(l: usize) -> Result<ExtractorSet> {
    let mut set = ExtractorSet::new(format!("precision-limited({l})"), Policy::SeedPrefix { l });
    for lo in 1..=l {
        for hi in lo..=l {
            set.register(Arc::new(WindowExtractor::new(lo, hi)?))?;
        }
    }
    set.register(Arc::new(TrialIndexExtractor))?;
    Ok(set)
}

/// Builds each trial's seed after querying the predictor on what the
/// extractor will see, then sets bit `k + 1` to the opposite of the
/// committed prediction (0 when it withholds).
///
/// Seed bits `1..=l` come from `base` (all zero by default) and are never
/// altered; bits `l+1..=k` and everything after `k + 1` are 0.
pub struct AdversarialRepetition {
    predictor: Arc<dyn Predictor>,
    extractor: Arc<dyn Extractor>,
    l: usize,
    k: usize,
    base: SeedSource,
    fuel: u64,
    constructed: Vec<BitString>,
}

impl AdversarialRepetition {
    pub fn new(
        predictor: Arc<dyn Predictor>,
        extractor: Arc<dyn Extractor>,
        l: usize,
        k: usize,
    ) -> Result<Self> {
        let scope = extractor.scope();
        let hi = scope.max_seed_bit();
        if hi > l || l > k || !(Policy::SeedPrefix { l }).permits(&scope) {
            return Err(Error::ScopeTooWide { hi, l, k });
        }
        Ok(Self {
            predictor,
            extractor,
            l,
            k,
            base: SeedSource::Fixed(BitStream::constant(0)),
            fuel: DEFAULT_FUEL,
            constructed: Vec::new(),
        })
    }

    /// Draw seed bits `1..=l` from `base` instead of zeros.
    pub fn with_base(mut self, base: SeedSource) -> Self {
        self.base = base;
        self
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    /// Bits `1..=k+1` of every seed built so far.
    pub fn constructed_seeds(&self) -> &[BitString] {
        &self.constructed
    }
}

/// Adversary for a window extractor inside `1..=l`, with `l <= k`.
pub fn adversarial_repetition(
    predictor: Arc<dyn Predictor>,
    extractor: WindowExtractor,
    l: usize,
    k: usize,
) -> Result<AdversarialRepetition> {
    AdversarialRepetition::new(predictor, Arc::new(extractor), l, k)
}

impl RepetitionProcedure for AdversarialRepetition {
    fn id(&self) -> String {
        format!("adversarial(l={},k={})", self.l, self.k)
    }

    fn next_preparation(
        &mut self,
        trial_index: usize,
        _history: &[TrialRecord],
    ) -> Result<Preparation> {
        let visible = self.base.seed_for(trial_index).prefix(self.l)?;
        let probe = SeedState {
            seed: BitStream::zero_padded(visible.clone()),
            trial_index,
        };
        let scope = self.extractor.scope();
        let id = self.extractor.id();
        let extracted = self
            .extractor
            .extract(&ScopedView::new(&probe, &scope, &id))?;
        let prediction = invoke(self.predictor.as_ref(), &extracted, self.fuel)?;

        let mut bits = visible.into_bits();
        bits.resize(self.k, 0);
        bits.push(prediction.bit().map_or(0, |b| 1 - b));
        let bits = BitString::from_bits(bits)?;
        self.constructed.push(bits.clone());
        Ok(Preparation::Seed(BitStream::zero_padded(bits)))
    }
}
