use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitstreams::BitString;
use crate::error::{Error, Result};

/// Default per-invocation step budget.
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Prediction {
    Zero,
    One,
    Withheld,
}

impl Prediction {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Prediction::Zero
        } else {
            Prediction::One
        }
    }

    /// The committed bit, `None` when withheld.
    pub fn bit(self) -> Option<u8> {
        match self {
            Prediction::Zero => Some(0),
            Prediction::One => Some(1),
            Prediction::Withheld => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Prediction::Zero => "0",
            Prediction::One => "1",
            Prediction::Withheld => "withheld",
        }
    }
}

/// Step budget for one predictor invocation.
#[derive(Debug)]
pub struct Fuel {
    limit: u64,
    used: u64,
}

impl Fuel {
    pub fn new(limit: u64) -> Self {
        Self { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Consumes `steps`; fails once the budget is exceeded.
    pub fn burn(&mut self, steps: u64) -> Result<(), OutOfFuel> {
        self.used = self.used.saturating_add(steps);
        if self.used > self.limit {
            Err(OutOfFuel)
        } else {
            Ok(())
        }
    }
}

/// Marker returned by [`Fuel::burn`]; the evaluator turns it into
/// [`Error::PredictorNonTotal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutOfFuel;

/// A deterministic total procedure from extracted bits to a prediction.
pub trait Predictor: Send + Sync {
    fn id(&self) -> String;

    fn predict(&self, input: &BitString, fuel: &mut Fuel) -> Result<Prediction, OutOfFuel>;
}

impl fmt::Debug for dyn Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Predictor({})", self.id())
    }
}

/// Runs `predictor` with a fresh budget of `fuel` steps.
pub fn invoke(predictor: &dyn Predictor, input: &BitString, fuel: u64) -> Result<Prediction> {
    let mut budget = Fuel::new(fuel);
    predictor
        .predict(input, &mut budget)
        .map_err(|OutOfFuel| Error::PredictorNonTotal {
            predictor: predictor.id(),
            fuel,
        })
}

/// Passes the last input bit through; withholds on empty input.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl Predictor for Identity {
    fn id(&self) -> String {
        "identity".into()
    }

    fn predict(&self, input: &BitString, fuel: &mut Fuel) -> Result<Prediction, OutOfFuel> {
        fuel.burn(1)?;
        Ok(input
            .last()
            .map_or(Prediction::Withheld, Prediction::from_bit))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub u8);

impl Predictor for Constant {
    fn id(&self) -> String {
        format!("constant-{}", self.0)
    }

    fn predict(&self, _input: &BitString, fuel: &mut Fuel) -> Result<Prediction, OutOfFuel> {
        fuel.burn(1)?;
        Ok(Prediction::from_bit(self.0))
    }
}

/// Strict majority of the input bits; withholds on ties and empty input.
#[derive(Clone, Copy, Debug, Default)]
pub struct Majority;

impl Predictor for Majority {
    fn id(&self) -> String {
        "majority".into()
    }

    fn predict(&self, input: &BitString, fuel: &mut Fuel) -> Result<Prediction, OutOfFuel> {
        let mut ones = 0usize;
        for &b in input.bits() {
            fuel.burn(1)?;
            ones += b as usize;
        }
        fuel.burn(1)?;
        let zeros = input.len() - ones;
        Ok(match ones.cmp(&zeros) {
            std::cmp::Ordering::Greater => Prediction::One,
            std::cmp::Ordering::Less => Prediction::Zero,
            std::cmp::Ordering::Equal => Prediction::Withheld,
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Withhold;

impl Predictor for Withhold {
    fn id(&self) -> String {
        "withhold".into()
    }

    fn predict(&self, _input: &BitString, fuel: &mut Fuel) -> Result<Prediction, OutOfFuel> {
        fuel.burn(1)?;
        Ok(Prediction::Withheld)
    }
}

/// Negation of the last input bit; withholds on empty input.
#[derive(Clone, Copy, Debug, Default)]
pub struct NegateLast;

impl Predictor for NegateLast {
    fn id(&self) -> String {
        "negate-last".into()
    }

    fn predict(&self, input: &BitString, fuel: &mut Fuel) -> Result<Prediction, OutOfFuel> {
        fuel.burn(1)?;
        Ok(input
            .last()
            .map_or(Prediction::Withheld, |b| Prediction::from_bit(1 - b)))
    }
}

/// Ids accepted by [`predictor_by_id`].
pub const PREDICTOR_IDS: &[&str] = &[
    "identity",
    "constant-0",
    "constant-1",
    "majority",
    "withhold",
    "negate-last",
];

pub fn predictor_by_id(id: &str) -> Option<Arc<dyn Predictor>> {
    Some(match id {
        "identity" => Arc::new(Identity),
        "constant-0" => Arc::new(Constant(0)),
        "constant-1" => Arc::new(Constant(1)),
        "majority" => Arc::new(Majority),
        "withhold" => Arc::new(Withhold),
        "negate-last" => Arc::new(NegateLast),
        _ => return None,
    })
}

/// Every predictor shipped with the library.
pub fn shipped_predictors() -> Vec<Arc<dyn Predictor>> {
    PREDICTOR_IDS
        .iter()
        .filter_map(|id| predictor_by_id(id))
        .collect()
}
