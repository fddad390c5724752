//! Discrete Hamiltonian spectra, the maximum-entropy function `F_H(E)` and
//! its closed-form oscillator upper bound.
//!
//! `F_H(E)` is the entropy of the Gibbs state `e^{-λH}/Tr e^{-λH}` whose mean
//! energy equals `E`. It is computed by solving for `λ` with a bracketed root
//! finder in `ln λ`. Oscillator spectra are summed mode by mode with the
//! geometric-series (Bose) closed forms, so no truncation is needed at any
//! energy; explicit spectra are finite and summed exactly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::roots::{brent, Tolerance};
use crate::{Error, LogBase, Real, Result};

/// Largest eigenvalue index the multi-mode enumerator will produce.
pub const ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumKind<T> {
    /// Sorted (nondecreasing) finite list of eigenvalues.
    Explicit(Vec<T>),
    /// `ℓ`-mode harmonic oscillator `Σ ħωᵢ (nᵢ + 1/2)`.
    Oscillator { omegas: Vec<T>, hbar: T },
}

/// Spectrum of a positive Hamiltonian with discrete, finite-multiplicity
/// eigenvalues. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumModel<T> {
    kind: SpectrumKind<T>,
}

/// On-disk description of a spectrum.
///
/// ```json
/// {"kind":"oscillator","ell":1,"omegas":[1.0],"hbar":1.0}
/// {"kind":"explicit","levels":[0.0,1.0,4.0]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpectrumDef {
    Oscillator {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ell: Option<usize>,
        omegas: Vec<f64>,
        hbar: f64,
    },
    Explicit {
        levels: Vec<f64>,
    },
}

/// Mean energy `E` available to input states.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EnergyBudget<T>(pub T);

impl<T: Real> EnergyBudget<T> {
    pub fn value(self) -> T {
        self.0
    }

    /// `Ē = E - E₀`; fails when `E < E₀`.
    pub fn grounded(self, spec: &SpectrumModel<T>) -> Result<T> {
        let e0 = spec.ground_energy();
        if self.0.is_nan() || self.0 < e0 {
            return Err(Error::BelowGround {
                energy: self.0.as_f64(),
                ground: e0.as_f64(),
            });
        }
        Ok(self.0 - e0)
    }
}

/// Gibbs state solving the mean-energy constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsSolution<T> {
    /// Inverse temperature; `+∞` at the ground energy, `0` when the energy
    /// constraint is inactive (finite spectra above their mean level).
    pub lambda: T,
    /// `F_H(E)` in nats.
    pub entropy_nats: T,
    /// Mean energy of the returned Gibbs state.
    pub mean_energy: T,
    /// `|⟨H⟩ - E| / (E - E₀ + ε_machine)`.
    pub residual: T,
    /// Number of levels summed; `None` when the ladder was summed in closed form.
    pub levels_used: Option<usize>,
}

impl<T: Real> GibbsSolution<T> {
    pub fn entropy(&self, base: LogBase) -> T {
        base.from_nats(self.entropy_nats)
    }
}

/// Heuristic growth diagnostics for the two spectral conditions
/// `Tr e^{-λH} < ∞ (λ > 0)` and `lim_{λ→0} [Tr e^{-λH}]^λ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub finite_dimensional: bool,
    /// Verdict for the partition-function condition.
    pub h_cond: bool,
    /// Verdict for the stronger `[Tr e^{-λH}]^λ → 1` condition.
    pub h_cond_plus: bool,
    /// True when the verdicts come from extrapolating the growth of the
    /// listed levels rather than from structure.
    pub extrapolated: bool,
    pub witness: String,
}

impl<T: Real> SpectrumModel<T> {
    pub fn explicit(levels: Vec<T>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidSpectrum(
                "an explicit spectrum needs at least two levels".into(),
            ));
        }
        if levels.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum("levels must be finite".into()));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpectrum("levels must be nondecreasing".into()));
        }
        Ok(SpectrumModel {
            kind: SpectrumKind::Explicit(levels),
        })
    }

    pub fn oscillator(omegas: Vec<T>, hbar: T) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidSpectrum("an oscillator needs at least one mode".into()));
        }
        if omegas.iter().any(|w| !(w.is_finite() && *w > T::zero())) {
            return Err(Error::InvalidSpectrum("frequencies must be positive".into()));
        }
        if !(hbar.is_finite() && hbar > T::zero()) {
            return Err(Error::InvalidSpectrum("hbar must be positive".into()));
        }
        Ok(SpectrumModel {
            kind: SpectrumKind::Oscillator { omegas, hbar },
        })
    }

    /// One-mode oscillator with `ħω = 1`, so energies are in units of `ħω`.
    pub fn single_mode_unit() -> Self {
        Self::oscillator(vec![T::one()], T::one()).expect("valid")
    }

    pub fn from_def(def: &SpectrumDef) -> Result<Self> {
        let cast = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        match def {
            SpectrumDef::Explicit { levels } => Self::explicit(cast(levels)),
            SpectrumDef::Oscillator { ell, omegas, hbar } => {
                if let Some(ell) = ell {
                    if *ell != omegas.len() {
                        return Err(Error::InvalidSpectrum(format!(
                            "ell = {ell} but {} frequencies given",
                            omegas.len()
                        )));
                    }
                }
                Self::oscillator(cast(omegas), T::lit(*hbar))
            }
        }
    }

    pub fn kind(&self) -> &SpectrumKind<T> {
        &self.kind
    }

    /// `ħω` for one-mode oscillators.
    pub fn single_mode_quantum(&self) -> Option<T> {
        match &self.kind {
            SpectrumKind::Oscillator { omegas, hbar } if omegas.len() == 1 => Some(*hbar * omegas[0]),
            _ => None,
        }
    }

    pub fn ground_energy(&self) -> T {
        match &self.kind {
            SpectrumKind::Explicit(levels) => levels[0],
            SpectrumKind::Oscillator { omegas, hbar } => {
                let sum = omegas.iter().fold(T::zero(), |acc, &w| acc + w);
                T::lit(0.5) * *hbar * sum
            }
        }
    }

    /// Multiplicity of the lowest eigenvalue.
    pub fn ground_multiplicity(&self) -> usize {
        match &self.kind {
            SpectrumKind::Explicit(levels) => levels.iter().take_while(|&&x| x == levels[0]).count(),
            SpectrumKind::Oscillator { .. } => 1,
        }
    }

    /// Number of levels, `None` for infinite spectra.
    pub fn dimension(&self) -> Option<usize> {
        match &self.kind {
            SpectrumKind::Explicit(levels) => Some(levels.len()),
            SpectrumKind::Oscillator { .. } => None,
        }
    }

    /// The `k`-th smallest eigenvalue, counting multiplicity (`k = 0` is the
    /// ground level).
    pub fn eigenvalue_at(&self, k: u64) -> Result<T> {
        match &self.kind {
            SpectrumKind::Explicit(levels) => levels.get(k as usize).copied().ok_or(Error::IndexOutOfRange {
                index: k,
                len: levels.len(),
            }),
            SpectrumKind::Oscillator { omegas, hbar } if omegas.len() == 1 => {
                Ok((T::from_index(k) + T::lit(0.5)) * *hbar * omegas[0])
            }
            SpectrumKind::Oscillator { .. } => LevelOracle::new(self).level(k),
        }
    }

    /// The first `n` eigenvalues in nondecreasing order.
    pub fn ladder(&self, n: usize) -> Result<Vec<T>> {
        let mut oracle = LevelOracle::new(self);
        (0..n as u64).map(|k| oracle.level(k)).collect()
    }

    /// Solves for the Gibbs state of mean energy `energy` and returns
    /// `F_H(energy)` together with the inverse temperature.
    pub fn gibbs_entropy(&self, energy: EnergyBudget<T>) -> Result<GibbsSolution<T>> {
        let grounded = energy.grounded(self)?;
        let e0 = self.ground_energy();
        if grounded == T::zero() {
            return Ok(GibbsSolution {
                lambda: T::infinity(),
                entropy_nats: T::from_index(self.ground_multiplicity() as u64).ln(),
                mean_energy: e0,
                residual: T::zero(),
                levels_used: self.dimension(),
            });
        }
        match &self.kind {
            SpectrumKind::Explicit(levels) => gibbs_explicit(levels, grounded),
            SpectrumKind::Oscillator { omegas, hbar } => {
                let quanta: Vec<T> = omegas.iter().map(|&w| w * *hbar).collect();
                gibbs_oscillator(&quanta, e0, grounded)
            }
        }
    }

    /// Grounded maximum entropy `F̄(E) = F(E + E₀)` in nats.
    pub fn fbar(&self, grounded_energy: T) -> Result<T> {
        if grounded_energy.is_nan() || grounded_energy < T::zero() {
            return Err(Error::domain("fbar", grounded_energy));
        }
        Ok(self
            .gibbs_entropy(EnergyBudget(grounded_energy + self.ground_energy()))?
            .entropy_nats)
    }

    /// Closed-form upper bound `F̂_{ℓ,ω}` at `energy` (oscillators only).
    pub fn fhat(&self, energy: T) -> Result<T> {
        match &self.kind {
            SpectrumKind::Oscillator { omegas, hbar } => fhat(omegas.len(), omegas, *hbar, energy),
            SpectrumKind::Explicit(_) => Err(Error::Precondition(
                "the closed-form bound is defined for oscillator spectra only".into(),
            )),
        }
    }

    /// Heuristic check of the spectral growth conditions. This is a
    /// diagnostic, not a proof.
    pub fn condition_diagnostics(&self) -> ConditionReport {
        match &self.kind {
            SpectrumKind::Oscillator { omegas, .. } => ConditionReport {
                finite_dimensional: false,
                h_cond: true,
                h_cond_plus: true,
                extrapolated: false,
                witness: format!(
                    "{}-mode oscillator: E_k grows like k^(1/{}), faster than any power of log k",
                    omegas.len(),
                    omegas.len()
                ),
            },
            SpectrumKind::Explicit(levels) => explicit_growth_report(levels),
        }
    }
}

/// `F̂_{ℓ,ω}(E) = ℓ ln((E + E₀)/(ℓ E*)) + ℓ` with `E* = (Π ħωᵢ)^{1/ℓ}`, in nats.
pub fn fhat<T: Real>(ell: usize, omegas: &[T], hbar: T, energy: T) -> Result<T> {
    if ell == 0 || ell != omegas.len() {
        return Err(Error::Precondition(format!(
            "ell = {ell} does not match {} frequencies",
            omegas.len()
        )));
    }
    let l = T::from_index(ell as u64);
    let log_star = omegas.iter().fold(T::zero(), |acc, &w| acc + (hbar * w).ln()) / l;
    let e0 = T::lit(0.5) * hbar * omegas.iter().fold(T::zero(), |acc, &w| acc + w);
    let ratio_num = energy + e0;
    if !(ratio_num > T::zero()) {
        return Err(Error::domain("fhat", energy));
    }
    Ok(l * ((ratio_num / l).ln() - log_star) + l)
}

fn gibbs_explicit<T: Real>(levels: &[T], grounded: T) -> Result<GibbsSolution<T>> {
    let e0 = levels[0];
    let shifted: Vec<T> = levels.iter().map(|&x| x - e0).collect();
    let n = T::from_index(shifted.len() as u64);
    let average = shifted.iter().fold(T::zero(), |a, &x| a + x) / n;
    if grounded >= average {
        // The constraint is inactive: the maximally mixed state is admissible.
        return Ok(GibbsSolution {
            lambda: T::zero(),
            entropy_nats: n.ln(),
            mean_energy: average + e0,
            residual: T::zero(),
            levels_used: Some(shifted.len()),
        });
    }
    let moments = |lambda: T| {
        let (mut z, mut first) = (T::zero(), T::zero());
        for &x in &shifted {
            let w = (-lambda * x).exp();
            z = z + w;
            first = first + x * w;
        }
        (z, first / z)
    };
    let lambda = solve_lambda(|l| moments(l).1, grounded, -(average.ln()))?;
    let (z, mean) = moments(lambda);
    Ok(GibbsSolution {
        lambda,
        entropy_nats: lambda * mean + z.ln(),
        mean_energy: mean + e0,
        residual: relative_residual(mean, grounded),
        levels_used: Some(shifted.len()),
    })
}

fn gibbs_oscillator<T: Real>(quanta: &[T], e0: T, grounded: T) -> Result<GibbsSolution<T>> {
    // Per-mode Bose occupation n̄ = 1/(e^{λħω} - 1); grounded mean energy
    // Σ ħω n̄; ln Z = -Σ ln(1 - e^{-λħω}).
    let mean = |lambda: T| quanta.iter().fold(T::zero(), |acc, &q| acc + q / (lambda * q).exp_m1());
    let log_z = |lambda: T| {
        quanta
            .iter()
            .fold(T::zero(), |acc, &q| acc - (-(-lambda * q).exp_m1()).ln())
    };
    let ell = T::from_index(quanta.len() as u64);
    let qmin = quanta.iter().copied().fold(T::infinity(), T::min);
    // High-temperature guess λ ≈ ℓ/Ē, low-temperature guess λ ≈ ln(ħω/Ē)/ħω.
    let guess = if grounded > qmin {
        ell / grounded
    } else {
        (ell * qmin / grounded).ln() / qmin
    };
    let lambda = solve_lambda(mean, grounded, guess.ln())?;
    let m = mean(lambda);
    Ok(GibbsSolution {
        lambda,
        entropy_nats: lambda * m + log_z(lambda),
        mean_energy: m + e0,
        residual: relative_residual(m, grounded),
        levels_used: None,
    })
}

fn relative_residual<T: Real>(mean: T, target: T) -> T {
    (mean - target).abs() / (target + T::epsilon())
}

/// Finds `λ > 0` with `mean(λ) = target`, where `mean` is strictly
/// decreasing. Works in `u = ln λ` on `ln mean - ln target`.
fn solve_lambda<T, M>(mean: M, target: T, u_guess: T) -> Result<T>
where
    T: Real,
    M: Fn(T) -> T,
{
    let ln_target = target.ln();
    let tiny = T::min_positive_value();
    let h = |u: T| mean(u.exp()).max(tiny).ln() - ln_target;
    let u0 = if u_guess.is_finite() { u_guess } else { T::zero() };
    let mut lo = u0 - T::one();
    let mut hi = u0 + T::one();
    let limit = T::lit(700.0).min(T::max_value().ln() - T::one());
    let mut width = T::one();
    while h(lo) < T::zero() {
        width = width + width;
        lo = lo - width;
        if lo < -limit {
            return Err(Error::NonConvergence("Gibbs bracket (low temperature side)"));
        }
    }
    width = T::one();
    while h(hi) > T::zero() {
        width = width + width;
        hi = hi + width;
        if hi > limit {
            return Err(Error::NonConvergence("Gibbs bracket (high inverse temperature)"));
        }
    }
    let u = brent(h, lo, hi, Tolerance::default())?;
    Ok(u.exp())
}

fn explicit_growth_report<T: Real>(levels: &[T]) -> ConditionReport {
    let n = levels.len();
    if n < 16 {
        return ConditionReport {
            finite_dimensional: true,
            h_cond: true,
            h_cond_plus: true,
            extrapolated: false,
            witness: format!("finite spectrum with {n} levels"),
        };
    }
    let e0 = levels[0].as_f64();
    let x = |k: usize| levels[k].as_f64() - e0;
    let k1 = (n / 8).max(2);
    let k2 = n - 1;
    let growth = |q: f64| {
        let r1 = x(k1) / (k1 as f64).ln().powf(q);
        let r2 = x(k2) / (k2 as f64).ln().powf(q);
        r2 / r1
    };
    let (g1, g2) = (growth(1.0), growth(2.0));
    // A ratio that keeps growing along the listed tail is read as divergence
    // of E_k / log^q k.
    let h_cond = g1.is_finite() && g1 >= 1.25;
    let h_cond_plus = h_cond && g2.is_finite() && g2 >= 1.25;
    ConditionReport {
        finite_dimensional: true,
        h_cond,
        h_cond_plus,
        extrapolated: true,
        witness: format!(
            "tail growth of (E_k - E_0)/ln^q k between k = {k1} and k = {k2}: {g1:.3} for q = 1, {g2:.3} for q = 2"
        ),
    }
}

/// Grounded eigenvalue gaps `E_m - E₀`, with a cache for multi-mode ladders.
pub struct LevelOracle<'a, T> {
    spec: &'a SpectrumModel<T>,
    ladder: Option<LadderEnumerator<T>>,
}

impl<'a, T: Real> LevelOracle<'a, T> {
    pub fn new(spec: &'a SpectrumModel<T>) -> Self {
        let ladder = match &spec.kind {
            SpectrumKind::Oscillator { omegas, hbar } if omegas.len() > 1 => {
                Some(LadderEnumerator::new(omegas.clone(), *hbar))
            }
            _ => None,
        };
        LevelOracle { spec, ladder }
    }

    pub fn spectrum(&self) -> &'a SpectrumModel<T> {
        self.spec
    }

    /// Largest index this oracle can answer, if bounded.
    pub fn max_index(&self) -> u64 {
        match &self.spec.kind {
            SpectrumKind::Explicit(levels) => levels.len() as u64 - 1,
            SpectrumKind::Oscillator { omegas, .. } if omegas.len() == 1 => i64::MAX as u64,
            SpectrumKind::Oscillator { .. } => ENUMERATION_CAP - 1,
        }
    }

    pub fn level(&mut self, k: u64) -> Result<T> {
        match &mut self.ladder {
            Some(ladder) => ladder.get(k),
            None => self.spec.eigenvalue_at(k),
        }
    }

    /// `Ē_m = E_m - E₀`. For one-mode oscillators this is `m ħω` exactly,
    /// avoiding cancellation at very large `m`.
    pub fn gap(&mut self, m: u64) -> Result<T> {
        if let Some(q) = self.spec.single_mode_quantum() {
            return Ok(T::from_index(m) * q);
        }
        Ok(self.level(m)? - self.spec.ground_energy())
    }
}

#[derive(Debug, Clone)]
struct Frontier<T> {
    energy: T,
    occupation: Box<[u32]>,
    last_nonzero: usize,
}

impl<T: Real> PartialEq for Frontier<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Frontier<T> {}
impl<T: Real> PartialOrd for Frontier<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Frontier<T> {
    // Reversed so that `BinaryHeap` pops the lowest energy first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .energy
            .partial_cmp(&self.energy)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.occupation.cmp(&self.occupation))
    }
}

/// Best-first enumeration of the multi-mode oscillator ladder.
///
/// Every occupation tuple is generated exactly once: a tuple's children
/// increment only modes at or after its last nonzero mode.
#[derive(Debug, Clone)]
struct LadderEnumerator<T> {
    omegas: Vec<T>,
    hbar: T,
    heap: BinaryHeap<Frontier<T>>,
    produced: Vec<T>,
}

impl<T: Real> LadderEnumerator<T> {
    fn new(omegas: Vec<T>, hbar: T) -> Self {
        let zero = vec![0u32; omegas.len()].into_boxed_slice();
        let mut heap = BinaryHeap::new();
        let mut this = LadderEnumerator {
            omegas,
            hbar,
            heap: BinaryHeap::new(),
            produced: Vec::new(),
        };
        heap.push(Frontier {
            energy: this.energy(&zero),
            occupation: zero,
            last_nonzero: 0,
        });
        this.heap = heap;
        this
    }

    fn energy(&self, occ: &[u32]) -> T {
        let half = T::lit(0.5);
        occ.iter().zip(&self.omegas).fold(T::zero(), |acc, (&n, &w)| {
            acc + self.hbar * w * (T::from_index(n as u64) + half)
        })
    }

    fn get(&mut self, k: u64) -> Result<T> {
        if k >= ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                index: k,
                cap: ENUMERATION_CAP,
            });
        }
        while self.produced.len() as u64 <= k {
            let node = self.heap.pop().expect("the ladder is infinite");
            for j in node.last_nonzero..self.omegas.len() {
                let mut occ = node.occupation.clone();
                occ[j] += 1;
                let energy = self.energy(&occ);
                self.heap.push(Frontier {
                    energy,
                    occupation: occ,
                    last_nonzero: j,
                });
            }
            self.produced.push(node.energy);
        }
        Ok(self.produced[k as usize])
    }
}
