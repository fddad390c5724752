//! Handles for the maximum-entropy functions that enter the bounds.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::scalarfun::g_nats;
use crate::spectrum::{fhat, SpectrumKind, SpectrumModel};
use crate::{Error, Real, Result};

/// Which function stands in for the grounded maximum entropy `F̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FSource {
    /// The exact Gibbs maximum entropy.
    #[default]
    Exact,
    /// The closed-form oscillator bound `F̂_{ℓ,ω}`.
    Fhat,
}

impl FSource {
    pub fn name(self) -> &'static str {
        match self {
            FSource::Exact => "exact",
            FSource::Fhat => "fhat",
        }
    }
}

impl std::str::FromStr for FSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(FSource::Exact),
            "fhat" => Ok(FSource::Fhat),
            other => Err(format!("unknown f-source `{other}` (expected exact or fhat)")),
        }
    }
}

type CustomFn<T> = Arc<dyn Fn(T) -> Result<T> + Send + Sync>;

/// A concave, nondecreasing entropy function of energy, evaluated in nats.
#[derive(Clone)]
pub enum MaxEntropy<T> {
    /// `F̄(E) = F(E + E₀)` from the Gibbs solver.
    Gibbs(SpectrumModel<T>),
    /// `F̄(E) = g(E/ħω)` for a one-mode oscillator.
    SingleModeClosedForm { quantum: T },
    /// `F̂_{ℓ,ω}(E + E₀)`, the grounded closed-form oscillator bound.
    FhatGrounded { omegas: Vec<T>, hbar: T },
    /// `F̂_{ℓ,ω}(E)` evaluated at the raw argument.
    Fhat { omegas: Vec<T>, hbar: T },
    /// Caller-supplied function.
    Custom(CustomFn<T>),
}

impl<T: fmt::Debug> fmt::Debug for MaxEntropy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxEntropy::Gibbs(s) => f.debug_tuple("Gibbs").field(s).finish(),
            MaxEntropy::SingleModeClosedForm { quantum } => f
                .debug_struct("SingleModeClosedForm")
                .field("quantum", quantum)
                .finish(),
            MaxEntropy::FhatGrounded { omegas, hbar } => f
                .debug_struct("FhatGrounded")
                .field("omegas", omegas)
                .field("hbar", hbar)
                .finish(),
            MaxEntropy::Fhat { omegas, hbar } => f
                .debug_struct("Fhat")
                .field("omegas", omegas)
                .field("hbar", hbar)
                .finish(),
            MaxEntropy::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl<T: Real> MaxEntropy<T> {
    /// The grounded function `F̄_H` of an input spectrum. With
    /// [`FSource::Exact`] one-mode oscillators use `g(E/ħω)` directly and
    /// every other spectrum goes through the Gibbs solver.
    pub fn grounded(spec: &SpectrumModel<T>, source: FSource) -> Result<Self> {
        match (source, spec.kind()) {
            (FSource::Exact, _) => Ok(match spec.single_mode_quantum() {
                Some(quantum) => MaxEntropy::SingleModeClosedForm { quantum },
                None => MaxEntropy::Gibbs(spec.clone()),
            }),
            (FSource::Fhat, SpectrumKind::Oscillator { omegas, hbar }) => Ok(MaxEntropy::FhatGrounded {
                omegas: omegas.clone(),
                hbar: *hbar,
            }),
            (FSource::Fhat, SpectrumKind::Explicit(_)) => Err(Error::Precondition(
                "the closed-form bound requires an oscillator spectrum".into(),
            )),
        }
    }

    /// An upper bound for an output system's maximum entropy, defined on
    /// `[0, ∞)`: the grounded exact function, or `F̂_{ℓ,ω}` at the raw
    /// argument.
    pub fn output_bound(spec: &SpectrumModel<T>, source: FSource) -> Result<Self> {
        match (source, spec.kind()) {
            (FSource::Exact, _) => Self::grounded(spec, FSource::Exact),
            (FSource::Fhat, SpectrumKind::Oscillator { omegas, hbar }) => Ok(MaxEntropy::Fhat {
                omegas: omegas.clone(),
                hbar: *hbar,
            }),
            (FSource::Fhat, SpectrumKind::Explicit(_)) => Err(Error::Precondition(
                "the closed-form bound requires an oscillator spectrum".into(),
            )),
        }
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(T) -> Result<T> + Send + Sync + 'static,
    {
        MaxEntropy::Custom(Arc::new(f))
    }

    /// Evaluates the function (nats) at `energy ≥ 0`.
    pub fn eval(&self, energy: T) -> Result<T> {
        if energy.is_nan() || energy < T::zero() {
            return Err(Error::domain("max-entropy argument", energy));
        }
        match self {
            MaxEntropy::Gibbs(spec) => spec.fbar(energy),
            MaxEntropy::SingleModeClosedForm { quantum } => Ok(g_nats(energy / *quantum)),
            MaxEntropy::FhatGrounded { omegas, hbar } => {
                let e0 = T::lit(0.5) * *hbar * omegas.iter().fold(T::zero(), |a, &w| a + w);
                fhat(omegas.len(), omegas, *hbar, energy + e0)
            }
            MaxEntropy::Fhat { omegas, hbar } => fhat(omegas.len(), omegas, *hbar, energy),
            MaxEntropy::Custom(f) => f(energy),
        }
    }

    /// `x · F(y/x)`-style products vanish when the prefactor does, even if
    /// the argument overflows.
    pub(crate) fn weighted(&self, weight: T, energy: T) -> Result<T> {
        if weight == T::zero() {
            return Ok(T::zero());
        }
        Ok(weight * self.eval(energy)?)
    }
}
