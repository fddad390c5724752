//! Scalar entropy functions: `η(x) = -x log x`, the binary entropy `h₂` and
//! `g(x) = (x+1) log(x+1) - x log x`.
//!
//! Everything is computed in nats; [`LogBase`] converts at the boundary.

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Logarithm base used when reporting entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    #[serde(alias = "nat")]
    Natural,
    #[serde(alias = "bits")]
    Two,
}

impl LogBase {
    /// Natural logarithm of the base: 1 for nats, ln 2 for bits.
    pub fn factor<T: Real>(self) -> T {
        match self {
            LogBase::Natural => T::one(),
            LogBase::Two => T::LN_2(),
        }
    }

    /// Converts an entropy in nats to this base.
    pub fn from_nats<T: Real>(self, nats: T) -> T {
        match self {
            LogBase::Natural => nats,
            LogBase::Two => nats / T::LN_2(),
        }
    }

    /// Converts an entropy expressed in this base to nats.
    pub fn to_nats<T: Real>(self, value: T) -> T {
        match self {
            LogBase::Natural => value,
            LogBase::Two => value * T::LN_2(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::Natural => "nat",
            LogBase::Two => "two",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nat" | "natural" | "e" => Ok(LogBase::Natural),
            "two" | "2" | "bits" => Ok(LogBase::Two),
            other => Err(format!("unknown log base `{other}` (expected nat or two)")),
        }
    }
}

/// `-x ln x`, with the continuous extension `η(0) = 0`. No domain check.
#[inline]
pub fn eta_nats<T: Real>(x: T) -> T {
    if x < T::lit(1e-300) {
        T::zero()
    } else {
        -x * x.ln()
    }
}

/// Binary entropy in nats. No domain check.
#[inline]
pub fn h2_nats<T: Real>(p: T) -> T {
    eta_nats(p) + eta_nats(T::one() - p)
}

/// `g(x) = (x+1) ln(x+1) - x ln x` in nats. No domain check.
///
/// Evaluated as `ln(1+x) + x ln(1 + 1/x)`; the textbook form loses every
/// significant digit once `x` exceeds ~1e13, and the bound searches evaluate
/// `g` far beyond that.
#[inline]
pub fn g_nats<T: Real>(x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    let tail = if x < T::one() {
        x * (x.ln_1p() - x.ln())
    } else {
        x * x.recip().ln_1p()
    };
    x.ln_1p() + tail
}

fn check_nonneg<T: Real>(what: &'static str, x: T) -> Result<()> {
    if x.is_nan() || x < T::zero() {
        Err(Error::domain(what, x))
    } else {
        Ok(())
    }
}

pub fn eta<T: Real>(x: T, base: LogBase) -> Result<T> {
    check_nonneg("eta", x)?;
    Ok(base.from_nats(eta_nats(x)))
}

pub fn binary_entropy<T: Real>(p: T, base: LogBase) -> Result<T> {
    if p.is_nan() || p < T::zero() || p > T::one() {
        return Err(Error::domain("binary_entropy", p));
    }
    Ok(base.from_nats(h2_nats(p)))
}

pub fn g_func<T: Real>(x: T, base: LogBase) -> Result<T> {
    check_nonneg("g", x)?;
    Ok(base.from_nats(g_nats(x)))
}
