//! Explicit bounds for energy-constrained quantum channel capacities.
//!
//! The crate evaluates the dimension bounds `f(E, m)` that control how much
//! capacity is lost when a channel's input is restricted to the `m`
//! lowest-energy eigenvectors of the input Hamiltonian, searches for the
//! smallest `m` that keeps the loss below a tolerance, and evaluates the
//! continuity bounds built from them.
//!
//! All numerical code is generic over a [`Real`] scalar; the aliases at the
//! bottom of this module fix it to `f64`, which is what the tables and the
//! command-line tool use.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contbounds;
pub mod dimbounds;
mod error;
pub mod maxent;
pub mod optimize;
pub mod roots;
pub mod scalarfun;
pub mod spectrum;
pub mod tables;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Floating point scalar accepted by every bound in the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target cannot represent
    /// finite values of that magnitude, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn from_index(k: u64) -> Self {
        Self::from_u64(k).expect("index representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub use contbounds::{Lemma1Variant, Lemma2Variant};
pub use dimbounds::{BoundEvaluation, CapacityKind, EnergyLimitParams, EpsSpec};
pub use maxent::{FSource, MaxEntropy};
pub use scalarfun::LogBase;
pub use spectrum::{ConditionReport, GibbsSolution};

/// Spectrum model in double precision.
pub type Spectrum = spectrum::SpectrumModel<f64>;
/// Energy budget in double precision.
pub type Energy = spectrum::EnergyBudget<f64>;
/// Maximum-entropy function handle in double precision.
pub type MaxEntropyF64 = maxent::MaxEntropy<f64>;
/// Evaluator of the bounds valid for all channels, in double precision.
pub type UniversalBounds = dimbounds::UniversalBounds<f64>;
/// Energy-limited evaluator in double precision.
pub type EnergyLimitedBounds = dimbounds::EnergyLimitedBounds<f64>;
