//! Continuity bounds for conditional mutual information and for the
//! capacities of channels with infinite-dimensional input.
//!
//! The dimension bounds in [`crate::dimbounds`] are built from these
//! estimates; the functions here expose them directly so that the
//! compositions can be checked term by term.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dimbounds::{BoundEvaluation, CapacityKind, EnergyLimitParams, UniversalBounds};
use crate::maxent::MaxEntropy;
use crate::scalarfun::{g_nats, h2_nats};
use crate::spectrum::{EnergyBudget, LevelOracle, SpectrumModel};
use crate::{Error, LogBase, Real, Result};

/// Which form of the QCMI continuity bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma1Variant {
    General,
    /// The two states have equal `BC` marginals; the entropic term appears once.
    EqualMarginalBC,
    /// Both states are pure; `ε` is replaced by `ε²/2`.
    PureStates,
    PureAndEqualMarginalBC,
}

impl Lemma1Variant {
    pub const ALL: [Lemma1Variant; 4] = [
        Lemma1Variant::General,
        Lemma1Variant::EqualMarginalBC,
        Lemma1Variant::PureStates,
        Lemma1Variant::PureAndEqualMarginalBC,
    ];

    fn pure(self) -> bool {
        matches!(self, Lemma1Variant::PureStates | Lemma1Variant::PureAndEqualMarginalBC)
    }

    fn equal_marginal(self) -> bool {
        matches!(
            self,
            Lemma1Variant::EqualMarginalBC | Lemma1Variant::PureAndEqualMarginalBC
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Lemma1Variant::General => "general",
            Lemma1Variant::EqualMarginalBC => "equal-marginal-bc",
            Lemma1Variant::PureStates => "pure-states",
            Lemma1Variant::PureAndEqualMarginalBC => "pure-and-equal-marginal-bc",
        }
    }
}

impl fmt::Display for Lemma1Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Lemma1Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Lemma1Variant::ALL
            .into_iter()
            .find(|v| v.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// Which form of the truncation bound `f(E, m)` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma2Variant {
    General,
    /// Energy constraint holds per copy (`Ē < Ē_m/16`); the last term is dropped.
    PerCopyEnergy,
    /// One copy only; requires `s < 1/2`.
    SingleCopy,
}

impl Lemma2Variant {
    pub const ALL: [Lemma2Variant; 3] = [
        Lemma2Variant::General,
        Lemma2Variant::PerCopyEnergy,
        Lemma2Variant::SingleCopy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma2Variant::General => "general",
            Lemma2Variant::PerCopyEnergy => "per-copy-energy",
            Lemma2Variant::SingleCopy => "single-copy",
        }
    }
}

impl fmt::Display for Lemma2Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Lemma2Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Lemma2Variant::ALL
            .into_iter()
            .find(|v| v.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// Continuity bound for the QCMI of two states `ε`-close in trace norm with
/// `Tr H* ρ ≤ E`, in nats. `f_star` is evaluated at `E/ε` and must bound the
/// maximum entropy of `H*` at that energy from above.
pub fn lemma1_bound<T: Real>(eps: T, energy: T, f_star: &MaxEntropy<T>, variant: Lemma1Variant) -> Result<T> {
    if eps.is_nan() || eps < T::zero() {
        return Err(Error::domain("epsilon", eps));
    }
    if energy.is_nan() || energy < T::zero() {
        return Err(Error::domain("energy", energy));
    }
    let eps = if variant.pure() { eps * eps / T::lit(2.0) } else { eps };
    if eps == T::zero() {
        return Ok(T::zero());
    }
    if eps >= T::lit(0.5) {
        return Err(Error::domain("epsilon", eps));
    }
    let root = (T::lit(2.0) * eps).sqrt();
    let entropic = if variant.equal_marginal() {
        g_nats(root)
    } else {
        T::lit(2.0) * g_nats(root)
    };
    Ok(T::lit(2.0) * root * f_star.eval(energy / eps)? + entropic)
}

/// The truncation estimate `f(E, m)` for input spectrum `spec` and its
/// grounded maximum-entropy function `fbar`, in nats.
///
/// This is computed independently of [`UniversalBounds`], so the identities
/// `General = f_Q`, `PerCopyEnergy = f_C`, `SingleCopy = f_χ` are checks
/// rather than tautologies.
pub fn lemma2_f<T: Real>(
    spec: &SpectrumModel<T>,
    fbar: &MaxEntropy<T>,
    energy: EnergyBudget<T>,
    m: u64,
    variant: Lemma2Variant,
) -> Result<T> {
    let e_bar = energy.grounded(spec)?;
    let gap = if m == 0 {
        T::zero()
    } else {
        LevelOracle::new(spec).gap(m)?
    };
    if !(gap > T::zero()) {
        return Err(Error::DegenerateGap { m });
    }
    if e_bar == T::zero() {
        return Ok(T::zero());
    }
    let x = e_bar / gap;
    match variant {
        Lemma2Variant::SingleCopy => {
            let s = x + x.sqrt();
            if s >= T::lit(0.5) {
                return Err(Error::Precondition(format!(
                    "single-copy bound needs s < 1/2, got s = {s}"
                )));
            }
            let w = (T::lit(2.0) * s).sqrt();
            Ok(T::lit(2.0) * w * fbar.eval(e_bar / s)? + g_nats(w))
        }
        Lemma2Variant::General | Lemma2Variant::PerCopyEnergy => {
            let y = x.powf(T::lit(0.25));
            let head = T::lit(4.0) * y * fbar.eval((e_bar * gap).sqrt() / T::lit(2.0))? + g_nats(T::lit(2.0) * y);
            if variant == Lemma2Variant::PerCopyEnergy {
                if !(e_bar < gap / T::lit(16.0)) {
                    return Err(Error::Precondition("per-copy bound needs Ē < Ē_m/16".into()));
                }
                return Ok(head);
            }
            Ok(head + T::lit(32.0) * x * fbar.eval(gap / T::lit(16.0))?)
        }
    }
}

/// `ε` such that the `m`-level truncation of any state with grounded energy
/// `Ē` is `ε`-close in the energy-constrained diamond norm: `x + √x` with
/// `x = Ē/Ē_m`.
pub fn ecd_truncation_eps<T: Real>(e_bar: T, gap: T) -> Result<T> {
    if !(gap > T::zero()) {
        return Err(Error::domain("grounded gap", gap));
    }
    if e_bar.is_nan() || e_bar < T::zero() {
        return Err(Error::domain("grounded energy", e_bar));
    }
    let x = e_bar / gap;
    Ok(x + x.sqrt())
}

/// QCMI continuity bound for energy-limited channels, in nats.
///
/// `energy` is the raw input energy `E`; `f_b` is the output bound function
/// taken at `E_p/t` and `E_p = α p E + E_c`. With `per_copy` the energy
/// constraint is assumed per copy: `p` is forced to 1 and the `(2/p) F(E_p)`
/// term is dropped.
#[allow(clippy::too_many_arguments)]
pub fn lemma5_bound<T: Real>(
    eps: T,
    energy: T,
    params: EnergyLimitParams<T>,
    f_b: &MaxEntropy<T>,
    p: T,
    t: T,
    per_copy: bool,
) -> Result<T> {
    if eps.is_nan() || eps < T::zero() {
        return Err(Error::domain("epsilon", eps));
    }
    if !(t > T::zero() && t <= T::lit(0.5)) {
        return Err(Error::domain("t", t));
    }
    if !per_copy && !(p > T::one()) {
        return Err(Error::domain("p", p));
    }
    let p = if per_copy { T::one() } else { p };
    let ep = params.alpha * p * energy + params.ec;
    let r = (eps + t / T::lit(2.0)) / (T::one() - t);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let core = (four * t + two * r) * f_b.eval(ep / t)? + two * g_nats(r) + four * h2_nats(t);
    if per_copy {
        Ok(core)
    } else {
        Ok(core + two / p * f_b.eval(ep)?)
    }
}

/// A minimized continuity bound with its witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityBound<T> {
    pub evaluation: BoundEvaluation<T>,
    pub cap: u64,
    /// The search stopped at the cap rather than at a confirmed minimum.
    pub cap_reached: bool,
}

/// Consecutive non-improving doublings that end the coarse scan.
const PATIENCE: u32 = 8;

fn continuity_coefficients<T: Real>(kind: CapacityKind) -> Result<(T, T)> {
    match kind {
        CapacityKind::Chi => Ok((T::one(), T::lit(2.0))),
        CapacityKind::Classical | CapacityKind::Quantum => Ok((T::lit(2.0), T::lit(2.0))),
        CapacityKind::Private => Ok((T::lit(4.0), T::lit(4.0))),
        CapacityKind::Ea => Err(Error::Precondition(
            "the entanglement-assisted capacity has a dimension-free continuity bound".into(),
        )),
    }
}

/// The objective minimized by [`v_theorem3`], at index `m`, in nats.
pub fn theorem3_objective<T: Real>(
    bounds: &UniversalBounds<T>,
    kind: CapacityKind,
    energy: EnergyBudget<T>,
    eps: T,
    m: u64,
) -> Result<T> {
    let (c1, c2) = continuity_coefficients::<T>(kind)?;
    let e_bar = energy.grounded(bounds.spectrum())?;
    let gap = LevelOracle::new(bounds.spectrum()).gap(m)?;
    objective(bounds, kind, e_bar, gap, eps, m, c1, c2)
}

#[allow(clippy::too_many_arguments)]
fn objective<T: Real>(
    bounds: &UniversalBounds<T>,
    kind: CapacityKind,
    e_bar: T,
    gap: T,
    eps: T,
    m: u64,
    c1: T,
    c2: T,
) -> Result<T> {
    if !(gap > T::zero()) {
        return Err(Error::DegenerateGap { m });
    }
    let w = (T::lit(2.0) * gap / e_bar * eps).sqrt();
    let log2m = (T::lit(2.0) * T::from_index(m)).ln();
    Ok(c1 * w * log2m + c2 * g_nats(w) + T::lit(2.0) * bounds.f_nats(kind, e_bar, gap)?)
}

/// Uniform continuity bound `v_C*(ε, E)` for the capacity `kind` over all
/// channels from the system of `bounds`, minimized over `m` with
/// `Ē_m ≥ 16 Ē`.
pub fn v_theorem3<T: Real>(
    bounds: &UniversalBounds<T>,
    kind: CapacityKind,
    energy: EnergyBudget<T>,
    eps: T,
) -> Result<ContinuityBound<T>> {
    let (c1, c2) = continuity_coefficients::<T>(kind)?;
    if !(eps > T::zero() && eps <= T::one()) {
        return Err(Error::domain("epsilon", eps));
    }
    let spec = bounds.spectrum();
    let e_bar = energy.grounded(spec)?;
    if !(e_bar > T::zero()) {
        return Err(Error::Precondition(
            "the continuity bound needs E above the ground energy".into(),
        ));
    }
    let floor = bounds.constraint_floor(energy)?;
    let mut oracle = LevelOracle::new(spec);
    let cap = bounds.cap().min(oracle.max_index());
    let mut obj = |m: u64| -> Result<T> {
        let gap = oracle.gap(m)?;
        objective(bounds, kind, e_bar, gap, eps, m, c1, c2)
    };

    let mut best = (floor, obj(floor)?);
    let mut m = floor;
    let mut stale = 0;
    let mut cap_reached = false;
    while stale < PATIENCE {
        if m >= cap {
            cap_reached = true;
            break;
        }
        m = m.saturating_mul(2).min(cap);
        let v = obj(m)?;
        if v < best.1 {
            best = (m, v);
            stale = 0;
        } else {
            stale += 1;
        }
    }

    // Integer ternary search between the neighbouring doublings.
    let mut lo = (best.0 / 2).max(floor);
    let mut hi = best.0.saturating_mul(2).min(cap);
    while hi - lo > 2 {
        let a = lo + (hi - lo) / 3;
        let b = hi - (hi - lo) / 3;
        let (va, vb) = (obj(a)?, obj(b)?);
        for (mm, vv) in [(a, va), (b, vb)] {
            if vv < best.1 {
                best = (mm, vv);
            }
        }
        if va <= vb {
            hi = b;
        } else {
            lo = a;
        }
    }
    for mm in lo..=hi {
        let v = obj(mm)?;
        if v < best.1 {
            best = (mm, v);
        }
    }

    // Hill-climb until both integer neighbours are no better.
    loop {
        let (mm, v) = best;
        if mm > floor {
            let down = obj(mm - 1)?;
            if down < v {
                best = (mm - 1, down);
                continue;
            }
        }
        if mm < cap {
            let up = obj(mm + 1)?;
            if up < v {
                best = (mm + 1, up);
                continue;
            }
        }
        break;
    }
    cap_reached |= best.0 == cap;

    let base: LogBase = bounds.base();
    Ok(ContinuityBound {
        evaluation: BoundEvaluation {
            value: base.from_nats(best.1),
            base,
            t: None,
            p: None,
            m: Some(best.0),
            feasible: true,
        },
        cap,
        cap_reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimbounds::EnergyLimitedBounds;
    use crate::maxent::FSource;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fhat1() -> MaxEntropy<f64> {
        MaxEntropy::grounded(&SpectrumModel::single_mode_unit(), FSource::Fhat).unwrap()
    }

    fn osc1() -> SpectrumModel<f64> {
        SpectrumModel::single_mode_unit()
    }

    #[test]
    fn lemma1_frozen_value() {
        let v = lemma1_bound(0.125, 1.0, &fhat1(), Lemma1Variant::General).unwrap();
        assert_relative_eq!(v, 5.106_767_082_220_657_8, max_relative = 1e-13);
    }

    #[test]
    fn lemma1_variants() {
        let f = fhat1();
        let (eps, e) = (0.2, 4.0);
        let gen = lemma1_bound(eps, e, &f, Lemma1Variant::General).unwrap();
        let eq = lemma1_bound(eps, e, &f, Lemma1Variant::EqualMarginalBC).unwrap();
        assert_relative_eq!(gen - eq, g_nats((2.0f64 * eps).sqrt()), max_relative = 1e-14);
        let pure = lemma1_bound(eps, e, &f, Lemma1Variant::PureStates).unwrap();
        let subst = lemma1_bound(eps * eps / 2.0, e, &f, Lemma1Variant::General).unwrap();
        assert_eq!(pure, subst);
        assert!(lemma1_bound(0.5, e, &f, Lemma1Variant::General).is_err());
        assert!(lemma1_bound(0.9, e, &f, Lemma1Variant::PureStates).is_ok());
        assert_eq!(lemma1_bound(0.0, e, &f, Lemma1Variant::General).unwrap(), 0.0);
        assert!(lemma1_bound(0.5 - 1e-12, e, &f, Lemma1Variant::General)
            .unwrap()
            .is_finite());
    }

    #[test]
    fn lemma1_vanishes_with_eps() {
        let f = fhat1();
        let mut prev = f64::INFINITY;
        for k in 1..70 {
            let eps = 0.4 * 0.6f64.powi(k);
            let v = lemma1_bound(eps, 2.0, &f, Lemma1Variant::General).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn lemma5_frozen_value() {
        let params = EnergyLimitParams::new(1.0, 0.0).unwrap();
        let fb = MaxEntropy::output_bound(&osc1(), FSource::Fhat).unwrap();
        let v = lemma5_bound(0.0, 3.0, params, &fb, 2.0, 0.5, false).unwrap();
        assert_relative_eq!(v, 18.131_119_336_950_577, max_relative = 1e-13);
        let pc = lemma5_bound(0.0, 3.0, params, &fb, 7.0, 0.5, true).unwrap();
        let core_at_1 = 3.0 * fb.eval(6.0).unwrap() + 2.0 * g_nats(0.5) + 4.0 * h2_nats(0.5);
        assert_relative_eq!(pc, core_at_1, max_relative = 1e-14);
        assert!(lemma5_bound(0.0, 3.0, params, &fhat1(), 1.0, 0.5, false).is_err());
        assert!(lemma5_bound(0.0, 3.0, params, &fhat1(), 2.0, 0.6, false).is_err());
    }

    #[test]
    fn lemma2_variants_match_universal_f() {
        let spec = osc1();
        let f = MaxEntropy::grounded(&spec, FSource::Exact).unwrap();
        let u = UniversalBounds::new(spec.clone(), FSource::Exact).unwrap();
        let e = EnergyBudget(7.5);
        for m in [200u64, 10_000, 10_000_000_000] {
            let q = u.f(CapacityKind::Quantum, e, m).unwrap().value;
            let c = u.f(CapacityKind::Classical, e, m).unwrap().value;
            let chi = u.f(CapacityKind::Chi, e, m).unwrap().value;
            assert_relative_eq!(
                lemma2_f(&spec, &f, e, m, Lemma2Variant::General).unwrap(),
                q,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                lemma2_f(&spec, &f, e, m, Lemma2Variant::PerCopyEnergy).unwrap(),
                c,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                lemma2_f(&spec, &f, e, m, Lemma2Variant::SingleCopy).unwrap(),
                chi,
                max_relative = 1e-12
            );
        }
        assert!(lemma2_f(&spec, &f, e, 10, Lemma2Variant::SingleCopy).is_err());
        assert!(lemma2_f(&spec, &f, e, 100, Lemma2Variant::PerCopyEnergy).is_err());
    }

    #[test]
    fn lemma5_composes_to_energy_limited_f() {
        let spec = osc1();
        let fb = MaxEntropy::output_bound(&spec, FSource::Exact).unwrap();
        let params = EnergyLimitParams::new(1.0, 0.0).unwrap();
        let b = EnergyLimitedBounds::new(spec, fb.clone(), params).unwrap();
        let (e, e_bar, gap) = (3.0, 2.5, 40_000.0);
        let eps = ecd_truncation_eps(e_bar, gap).unwrap();
        for &(t, p) in &[(0.01, 1.5), (0.3, 40.0), (0.5, 2.0)] {
            let q = b.f_at_nats(CapacityKind::Quantum, e, e_bar, gap, t, Some(p)).unwrap();
            assert_relative_eq!(
                lemma5_bound(eps, e, params, &fb, p, t, false).unwrap(),
                q,
                max_relative = 1e-12
            );
            let c = b.f_at_nats(CapacityKind::Classical, e, e_bar, gap, t, None).unwrap();
            assert_relative_eq!(
                lemma5_bound(eps, e, params, &fb, p, t, true).unwrap(),
                c,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn continuity_bound_golden() {
        let u = UniversalBounds::new(osc1(), FSource::Exact).unwrap();
        let r = v_theorem3(&u, CapacityKind::Chi, EnergyBudget(3.0), 1e-6).unwrap();
        let m = r.evaluation.m.unwrap();
        assert!(m.abs_diff(13_326) <= 3, "witness {m}");
        assert_relative_eq!(r.evaluation.value, 6.824_760_620_067_016, max_relative = 1e-9);
        assert!(!r.cap_reached);
    }

    #[test]
    fn continuity_bound_rejects_ea_and_ground_energy() {
        let u = UniversalBounds::new(osc1(), FSource::Exact).unwrap();
        assert!(v_theorem3(&u, CapacityKind::Ea, EnergyBudget(3.0), 0.1).is_err());
        assert!(v_theorem3(&u, CapacityKind::Chi, EnergyBudget(0.5), 0.1).is_err());
        assert!(v_theorem3(&u, CapacityKind::Chi, EnergyBudget(3.0), 0.0).is_err());
    }

    #[test]
    fn continuity_bound_reports_cap() {
        let u = UniversalBounds::new(osc1(), FSource::Exact).unwrap().with_cap(100);
        let r = v_theorem3(&u, CapacityKind::Chi, EnergyBudget(3.0), 1e-9).unwrap();
        assert!(r.cap_reached);
        assert_eq!(r.evaluation.m, Some(100));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn continuity_witness_is_local_minimum(e in 0.6f64..200.0, log_eps in -9.0f64..-1.0) {
            let u = UniversalBounds::new(osc1(), FSource::Exact).unwrap();
            let eps = 10f64.powf(log_eps);
            let energy = EnergyBudget(e);
            for kind in [CapacityKind::Chi, CapacityKind::Quantum] {
                let r = v_theorem3(&u, kind, energy, eps).unwrap();
                let m = r.evaluation.m.unwrap();
                prop_assert!(m as f64 >= 16.0 * (e - 0.5));
                let v = theorem3_objective(&u, kind, energy, eps, m).unwrap();
                let floor = u.constraint_floor(energy).unwrap();
                if m > floor {
                    prop_assert!(theorem3_objective(&u, kind, energy, eps, m - 1).unwrap() >= v);
                }
                prop_assert!(theorem3_objective(&u, kind, energy, eps, m + 1).unwrap() >= v);
            }
        }

        #[test]
        fn continuity_bound_monotone_and_ordered(e in 0.6f64..100.0, a in -8.0f64..-1.0, b in -8.0f64..-1.0) {
            let u = UniversalBounds::new(osc1(), FSource::Exact).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let energy = EnergyBudget(e);
            let v = |kind, x: f64| v_theorem3(&u, kind, energy, 10f64.powf(x)).unwrap().evaluation.value;
            prop_assert!(v(CapacityKind::Chi, lo) <= v(CapacityKind::Chi, hi) * (1.0 + 1e-12));
            prop_assert!(v(CapacityKind::Private, lo) >= v(CapacityKind::Quantum, lo));
        }
    }
}
