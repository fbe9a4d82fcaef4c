//! A two-dimensional preparation/measurement experiment.
//!
//! Each trial prepares `psi` and projects onto `phi`, reporting 1 when the
//! projection succeeds. Outcomes come either from standard Born weights
//! driven by a seeded uniform source, or from a hidden script (a bit stream)
//! that fixes every outcome in advance, i.e. a value-definite reading.
//! Units have hbar = 1; a spin outcome +1 maps to bit 1 and -1 to bit 0.

use num_complex::Complex64;

use crate::bitstreams::{unit_draw, BitCursor, BitStream, BitString};
use crate::error::{Error, Result};
use crate::model::{
    unsupported, Component, Experiment, Extractor, HiddenState, Preparation, PreparationInfo,
    Scope, ScopedView,
};

/// Tolerance on `|a0|^2 + |a1|^2 = 1`.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Overlaps within this distance of 0 or 1 count as commuting.
pub const COMMUTE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    a0: Complex64,
    a1: Complex64,
}

impl QubitState {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm_sqr = a0.norm_sqr() + a1.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalised { norm_sqr });
        }
        Ok(Self { a0, a1 })
    }

    pub fn real(a0: f64, a1: f64) -> Result<Self> {
        Self::new(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0))
    }

    /// `cos(theta)|0> + sin(theta)|1>`.
    pub fn from_angle(theta: f64) -> Self {
        Self {
            a0: Complex64::new(theta.cos(), 0.0),
            a1: Complex64::new(theta.sin(), 0.0),
        }
    }

    pub fn zero() -> Self {
        Self::from_angle(0.0)
    }

    pub fn one() -> Self {
        Self {
            a0: Complex64::new(0.0, 0.0),
            a1: Complex64::new(1.0, 0.0),
        }
    }

    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (self.a0, self.a1)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    /// A unit vector orthogonal to `self`.
    pub fn orthogonal(&self) -> QubitState {
        QubitState {
            a0: -self.a1.conj(),
            a1: self.a0.conj(),
        }
    }

    fn check(&self) -> Result<()> {
        Self::new(self.a0, self.a1).map(|_| ())
    }
}

/// Projector onto a target state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveMeasurement {
    target: QubitState,
}

impl ProjectiveMeasurement {
    pub fn onto(target: QubitState) -> Result<Self> {
        target.check()?;
        Ok(Self { target })
    }

    pub fn target(&self) -> &QubitState {
        &self.target
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap {
    /// `|<psi|phi>|`, clamped to `[0, 1]`.
    pub value: f64,
    /// Strictly between 0 and 1, beyond [`COMMUTE_TOLERANCE`].
    pub non_commuting: bool,
}

pub fn overlap(psi: &QubitState, phi: &QubitState) -> Result<Overlap> {
    psi.check()?;
    phi.check()?;
    let value = psi.inner(phi).norm().clamp(0.0, 1.0);
    Ok(Overlap {
        value,
        non_commuting: value > COMMUTE_TOLERANCE && value < 1.0 - COMMUTE_TOLERANCE,
    })
}

/// Born probability of projecting `state` onto `target`, snapped to exactly
/// 0 or 1 within [`COMMUTE_TOLERANCE`].
fn success_probability(state: &QubitState, target: &QubitState) -> f64 {
    let p = state.inner(target).norm_sqr().clamp(0.0, 1.0);
    if p < COMMUTE_TOLERANCE {
        0.0
    } else if p > 1.0 - COMMUTE_TOLERANCE {
        1.0
    } else {
        p
    }
}

/// Post-measurement state for `outcome`: the target on 1, the normalised
/// component orthogonal to it on 0.
fn collapse(state: &QubitState, target: &QubitState, outcome: u8) -> QubitState {
    if outcome == 1 {
        return *target;
    }
    let c = target.inner(state);
    let r0 = state.a0 - c * target.a0;
    let r1 = state.a1 - c * target.a1;
    let norm = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
    if norm < 1e-12 {
        target.orthogonal()
    } else {
        QubitState {
            a0: r0 / norm,
            a1: r1 / norm,
        }
    }
}

/// Outcome 1 iff `draw < |<target|state>|^2`.
pub fn measure(
    state: &QubitState,
    m: &ProjectiveMeasurement,
    draw: f64,
) -> Result<(u8, QubitState)> {
    state.check()?;
    let outcome = u8::from(draw < success_probability(state, &m.target));
    Ok((outcome, collapse(state, &m.target, outcome)))
}

/// What decides trial outcomes.
#[derive(Clone, Debug, PartialEq)]
pub enum OutcomeSource {
    /// Born weights; measurement `j` (1-based) uses SplitMix64 word `j - 1` of `seed`.
    Born { seed: u64 },
    /// Trial `i` reports bit `i` of the stream.
    Scripted(BitStream),
}

#[derive(Debug)]
enum SourceState {
    Born { seed: u64, draws: u64 },
    Scripted(BitCursor),
}

#[derive(Debug)]
struct EcState {
    overlap_sqr: f64,
    trial_index: usize,
    source: SourceState,
}

impl HiddenState for EcState {
    fn trial_index(&self) -> usize {
        self.trial_index
    }

    fn preparation(&self) -> Option<PreparationInfo> {
        Some(PreparationInfo {
            overlap_sqr: self.overlap_sqr,
        })
    }

    fn outcome_source_bit(&self, j: usize) -> Option<Result<u8>> {
        Some(match &self.source {
            SourceState::Born { seed, .. } => BitStream::SeededNoise { seed: *seed }.bit(j),
            SourceState::Scripted(c) => c.stream().bit(j),
        })
    }
}

#[derive(Debug)]
pub struct EcExperiment {
    psi: QubitState,
    measurement: ProjectiveMeasurement,
    state: QubitState,
    inner: EcState,
    degenerate: bool,
    completed: usize,
}

/// Prepare `psi`, project onto `phi`. Commuting pairs are allowed but flagged
/// via [`EcExperiment::is_degenerate`].
pub fn ec_experiment(
    psi: QubitState,
    phi: QubitState,
    source: OutcomeSource,
) -> Result<EcExperiment> {
    let ov = overlap(&psi, &phi)?;
    let source = match source {
        OutcomeSource::Born { seed } => SourceState::Born { seed, draws: 0 },
        OutcomeSource::Scripted(stream) => SourceState::Scripted(BitCursor::new(stream)),
    };
    Ok(EcExperiment {
        psi,
        measurement: ProjectiveMeasurement::onto(phi)?,
        state: psi,
        inner: EcState {
            overlap_sqr: ov.value * ov.value,
            trial_index: 1,
            source,
        },
        degenerate: !ov.non_commuting,
        completed: 0,
    })
}

impl EcExperiment {
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// State after the most recent measurement.
    pub fn state(&self) -> &QubitState {
        &self.state
    }
}

impl Experiment for EcExperiment {
    fn id(&self) -> String {
        "qubit-ec".into()
    }

    fn admissible_scope(&self) -> Scope {
        Scope::new([Component::Preparation, Component::TrialIndex])
    }

    fn prepare(&mut self, trial_index: usize, preparation: &Preparation) -> Result<()> {
        if *preparation != Preparation::Default {
            return Err(unsupported(self, preparation));
        }
        self.state = self.psi;
        self.inner.trial_index = trial_index;
        Ok(())
    }

    fn hidden(&self) -> &dyn HiddenState {
        &self.inner
    }

    fn run_trial(&mut self) -> Result<u8> {
        let target = *self.measurement.target();
        let outcome = match &mut self.inner.source {
            SourceState::Born { seed, draws } => {
                let draw = unit_draw(*seed, *draws);
                *draws += 1;
                let (outcome, post) = measure(&self.state, &self.measurement, draw)?;
                self.state = post;
                outcome
            }
            SourceState::Scripted(cursor) => {
                let outcome = cursor.next_bit()?;
                self.state = collapse(&self.state, &target, outcome);
                outcome
            }
        };
        self.completed += 1;
        Ok(outcome)
    }

    fn trials_completed(&self) -> usize {
        self.completed
    }
}

/// `|<psi|phi>|^2` as a 16-bit fixed-point fraction (all ones for 1.0).
#[derive(Clone, Copy, Debug, Default)]
pub struct PreparationExtractor;

impl Extractor for PreparationExtractor {
    fn id(&self) -> String {
        "preparation".into()
    }

    fn scope(&self) -> Scope {
        Scope::new([Component::Preparation])
    }

    fn extract(&self, view: &ScopedView<'_>) -> Result<BitString> {
        let p = view.preparation()?.overlap_sqr;
        Ok(BitString::from_uint((p * 65535.0).round() as u64, 16))
    }
}

/// Reads the hidden outcome source at the current trial index. Outside the
/// complementarity-restricted scope.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScriptExtractor;

impl Extractor for ScriptExtractor {
    fn id(&self) -> String {
        "script".into()
    }

    fn scope(&self) -> Scope {
        Scope::new([Component::OutcomeSource, Component::TrialIndex])
    }

    fn extract(&self, view: &ScopedView<'_>) -> Result<BitString> {
        let i = view.trial_index()?;
        BitString::from_bits(vec![view.outcome_source_bit(i)?])
    }
}
