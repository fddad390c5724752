//! Brute-force checks of the finite-dimensional inequalities behind the
//! continuity and dimension bounds.
//!
//! Each check exists at two levels: an instance function that evaluates one
//! inequality on given operands and returns a [`Comparison`], and a seeded
//! suite that samples operands, runs trials in parallel and reduces them in
//! trial order into a [`CheckReport`].

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use ecdim::contbounds::lemma1_bound;
use ecdim::scalarfun::h2_nats;
use ecdim::spectrum::{EnergyBudget, SpectrumModel};
use ecdim::{CapacityKind, FSource, Lemma1Variant, MaxEntropyF64, UniversalBounds};

use crate::sample::{
    random_channel, random_hamiltonian, random_projector, random_pure, random_state_any_rank, random_unitary,
    random_vector, trial_rng,
};
use crate::state::{
    conditional_entropy, embed_operator, holevo_quantity, mutual_information, partial_trace_matrix, qcmi, trace,
    trace_distance, trace_norm, von_neumann_entropy, CMatrix, CVector, ChannelRep, DensityMatrix, Ensemble,
};
use crate::{Result, VerifyError};

/// Slack for inequalities between entropies.
pub const ENTROPY_SLACK: f64 = 1e-6;
/// Slack for trace-norm inequalities.
pub const NORM_SLACK: f64 = 1e-9;
/// Slack for the linear tail estimate.
pub const TAIL_SLACK: f64 = 1e-12;
/// Slack for exact entropy identities.
pub const IDENTITY_SLACK: f64 = 1e-9;
/// Required agreement of the `BC` marginals in the equal-marginal construction.
pub const MARGINAL_TOL: f64 = 1e-12;

/// One evaluated inequality `lhs ≤ rhs + slack`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Comparison {
    pub fn new(lhs: f64, rhs: f64, slack: f64) -> Self {
        Comparison { lhs, rhs, slack }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.slack
    }

    /// Fraction of the bound consumed; 0 when the bound vanishes.
    pub fn used(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub trial: u64,
    pub inequality: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub trials: u64,
    /// Largest dimension drawn for each tensor factor.
    pub dims: Vec<usize>,
    pub seed: u64,
    pub violations: Vec<Violation>,
    /// Largest `lhs / rhs` over comparisons with a positive bound.
    pub max_margin_used: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Gentle,
    Pinching,
    TailBound,
    Misc,
    Lemma1,
    ChiTruncation,
    ChainRule,
    ChiRep,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Gentle,
        CheckKind::Pinching,
        CheckKind::TailBound,
        CheckKind::Misc,
        CheckKind::Lemma1,
        CheckKind::ChiTruncation,
        CheckKind::ChainRule,
        CheckKind::ChiRep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Gentle => "gentle",
            CheckKind::Pinching => "pinching",
            CheckKind::TailBound => "tail",
            CheckKind::Misc => "misc",
            CheckKind::Lemma1 => "lemma1",
            CheckKind::ChiTruncation => "chi-truncation",
            CheckKind::ChainRule => "chain-rule",
            CheckKind::ChiRep => "chi-rep",
        }
    }

    pub fn default_trials(self) -> u64 {
        match self {
            CheckKind::Gentle | CheckKind::Pinching | CheckKind::TailBound | CheckKind::Misc => 10_000,
            _ => 1_000,
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase();
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

/// Runs a suite with its default shape.
pub fn run_check(kind: CheckKind, trials: u64, seed: u64) -> Result<CheckReport> {
    match kind {
        CheckKind::Gentle => check_gentle(trials, seed),
        CheckKind::Pinching => check_pinching(trials, seed),
        CheckKind::TailBound => check_tail_bound(trials, seed),
        CheckKind::Misc => check_misc_inequalities(trials, seed),
        CheckKind::Lemma1 => check_lemma1(trials, seed),
        CheckKind::ChiTruncation => check_chi_truncation(ChiTruncationConfig::default(), trials, seed),
        CheckKind::ChainRule => check_chain_rule(trials, seed),
        CheckKind::ChiRep => check_chi_rep(trials, seed),
    }
}

#[derive(Default)]
struct Trial {
    comparisons: Vec<(&'static str, Comparison)>,
    skipped: bool,
}

impl Trial {
    fn push(&mut self, name: &'static str, c: Comparison) {
        self.comparisons.push((name, c));
    }

    fn skipped() -> Self {
        Trial {
            comparisons: Vec::new(),
            skipped: true,
        }
    }
}

fn run_suite<F>(
    check: &str,
    trials: u64,
    seed: u64,
    dims: Vec<usize>,
    notes: Option<String>,
    f: F,
) -> Result<CheckReport>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Trial> + Sync,
{
    let outcomes: Vec<Result<Trial>> = (0..trials)
        .into_par_iter()
        .map(|i| f(&mut trial_rng(seed, i)))
        .collect();
    let mut report = CheckReport {
        check: check.to_string(),
        trials,
        dims,
        seed,
        violations: Vec::new(),
        max_margin_used: 0.0,
        skipped: None,
        notes,
    };
    let mut skipped = 0;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let trial = outcome?;
        if trial.skipped {
            skipped += 1;
        }
        for (name, c) in trial.comparisons {
            report.max_margin_used = report.max_margin_used.max(c.used());
            if !c.holds() {
                report.violations.push(Violation {
                    trial: i as u64,
                    inequality: name,
                    lhs: c.lhs,
                    rhs: c.rhs,
                });
            }
        }
    }
    if skipped > 0 {
        report.skipped = Some(skipped);
    }
    Ok(report)
}

fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `‖(I − P) ρ P‖₁ ≤ √Tr((I − P) ρ)`.
pub fn gentle(rho: &DensityMatrix, projector: &CMatrix) -> Result<Comparison> {
    let q = identity(rho.dim()) - projector;
    let lhs = trace_norm(&(&q * rho.matrix() * projector))?;
    let rhs = trace(&(&q * rho.matrix())).re.max(0.0).sqrt();
    Ok(Comparison::new(lhs, rhs, NORM_SLACK))
}

pub fn check_gentle(trials: u64, seed: u64) -> Result<CheckReport> {
    run_suite("gentle", trials, seed, vec![6], None, |rng| {
        let d = rng.random_range(1..=6);
        let rho = random_state_any_rank(rng, &[d])?;
        let rank = rng.random_range(0..=d);
        let p = random_projector(rng, d, rank);
        let mut t = Trial::default();
        t.push("gentle", gentle(&rho, &p)?);
        Ok(t)
    })
}

/// `‖ω − Π⊗id(ω)‖₁ ≤ 2q + 2√q`, `q = Tr((I − P) ω_A)`, for `ω` on `A ⊗ B`.
pub fn pinching(omega: &DensityMatrix, projector: &CMatrix, tau: &DensityMatrix) -> Result<Comparison> {
    let dims = omega.dims();
    if dims.len() != 2 || projector.nrows() != dims[0] || tau.dim() != dims[0] {
        return Err(VerifyError::Dimension(
            "pinching expects ω on A⊗B with P, τ on A".into(),
        ));
    }
    let p_big = embed_operator(projector, dims, &[0])?;
    let q_big = embed_operator(&(identity(dims[0]) - projector), dims, &[0])?;
    let lost_b = partial_trace_matrix(&(&q_big * omega.matrix()), dims, &[1])?;
    let pinched = &p_big * omega.matrix() * &p_big + tau.matrix().kronecker(&lost_b);
    let lhs = trace_norm(&(omega.matrix() - pinched))?;
    let q = trace(&lost_b).re.max(0.0);
    Ok(Comparison::new(lhs, 2.0 * q + 2.0 * q.sqrt(), NORM_SLACK))
}

pub fn check_pinching(trials: u64, seed: u64) -> Result<CheckReport> {
    run_suite("pinching", trials, seed, vec![4, 4], None, |rng| {
        let (da, db) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let omega = random_state_any_rank(rng, &[da, db])?;
        let rank = rng.random_range(0..=da);
        let p = random_projector(rng, da, rank);
        let tau = random_state_any_rank(rng, &[da])?;
        let mut t = Trial::default();
        t.push("pinching", pinching(&omega, &p, &tau)?);
        Ok(t)
    })
}

/// `Tr((I − P_m) ρ) ≤ (Tr(Hρ) − E₀)/(E_m − E₀)` for `H` diagonal in the
/// computational basis with the (sorted) levels of `spec`.
pub fn tail_bound(spec: &SpectrumModel<f64>, rho: &DensityMatrix, m: usize) -> Result<Comparison> {
    let d = rho.dim();
    if spec.dimension() != Some(d) || m == 0 || m >= d {
        return Err(VerifyError::Dimension(format!(
            "tail bound with m = {m} in dimension {d}"
        )));
    }
    let levels = spec.ladder(d)?;
    let gap = levels[m] - levels[0];
    if !(gap > 0.0) {
        return Err(VerifyError::Bound(ecdim::Error::DegenerateGap { m: m as u64 }));
    }
    let diag: Vec<f64> = (0..d).map(|k| rho.matrix()[(k, k)].re).collect();
    let lhs = 1.0 - diag[..m].iter().sum::<f64>();
    let energy: f64 = levels.iter().zip(&diag).map(|(e, p)| e * p).sum();
    Ok(Comparison::new(lhs, (energy - levels[0]) / gap, TAIL_SLACK))
}

pub fn check_tail_bound(trials: u64, seed: u64) -> Result<CheckReport> {
    run_suite("tail", trials, seed, vec![12], None, |rng| {
        let d = rng.random_range(2..=12);
        let degenerate = rng.random_bool(1.0 / 3.0);
        let levels: Vec<f64> = loop {
            let mut l: Vec<f64> = (0..d)
                .map(|_| {
                    if degenerate {
                        rng.random_range(0..4) as f64
                    } else {
                        rng.random_range(0.0..10.0)
                    }
                })
                .collect();
            l.sort_by(f64::total_cmp);
            if l[d - 1] > l[0] {
                break l;
            }
        };
        let candidates: Vec<usize> = (1..d).filter(|&m| levels[m] > levels[0]).collect();
        let m = candidates[rng.random_range(0..candidates.len())];
        let spec = SpectrumModel::explicit(levels)?;
        let rho = random_state_any_rank(rng, &[d])?;
        let mut t = Trial::default();
        t.push("tail", tail_bound(&spec, &rho, m)?);
        Ok(t)
    })
}

pub fn check_misc_inequalities(trials: u64, seed: u64) -> Result<CheckReport> {
    run_suite("misc", trials, seed, vec![3, 3, 3], None, |rng| {
        let (da, db, dc) = (
            rng.random_range(2..=3),
            rng.random_range(2..=3),
            rng.random_range(1..=3),
        );
        let p: f64 = rng.random();
        let h2 = h2_nats(p);
        let rho = random_state_any_rank(rng, &[da, db])?;
        let sigma = random_state_any_rank(rng, &[da, db])?;
        let mix = rho.mix(p, &sigma)?;
        let mut t = Trial::default();

        let (ha, hb) = (
            von_neumann_entropy(&rho.partial_trace(&[0])?)?,
            von_neumann_entropy(&rho.partial_trace(&[1])?)?,
        );
        t.push(
            "mi-ub",
            Comparison::new(mutual_information(&rho, &[0], &[1])?, 2.0 * ha.min(hb), ENTROPY_SLACK),
        );

        let (h_rho, h_sigma) = (von_neumann_entropy(&rho)?, von_neumann_entropy(&sigma)?);
        t.push(
            "w-k",
            Comparison::new(
                von_neumann_entropy(&mix)?,
                p * h_rho + (1.0 - p) * h_sigma + h2,
                ENTROPY_SLACK,
            ),
        );

        let (c_rho, c_sigma, c_mix) = (
            conditional_entropy(&rho, &[0], &[1])?,
            conditional_entropy(&sigma, &[0], &[1])?,
            conditional_entropy(&mix, &[0], &[1])?,
        );
        let avg = p * c_rho + (1.0 - p) * c_sigma;
        t.push("ce-ac", Comparison::new(c_mix, avg + h2, ENTROPY_SLACK));
        t.push("ce-concave", Comparison::new(avg, c_mix, ENTROPY_SLACK));

        let rho3 = random_state_any_rank(rng, &[da, db, dc])?;
        let sigma3 = random_state_any_rank(rng, &[da, db, dc])?;
        let mix3 = rho3.mix(p, &sigma3)?;
        let i = |s: &DensityMatrix| qcmi(s, &[0], &[1], &[2]);
        let lhs = (p * i(&rho3)? + (1.0 - p) * i(&sigma3)? - i(&mix3)?).abs();
        t.push("f-c-b", Comparison::new(lhs, h2, ENTROPY_SLACK));
        Ok(t)
    })
}

/// `|I(A:B|C)_ρ − I(A:B|C)_σ|` against the QCMI continuity bound, for
/// states on `A ⊗ B ⊗ C ⊗ D` and `H*` acting on `A ⊗ D`. `ε` is the actual
/// trace distance and `E` the larger of the two `H*` energies.
pub fn lemma1_instance(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    h_star: &CMatrix,
    f_star: &MaxEntropyF64,
    variant: Lemma1Variant,
) -> Result<Comparison> {
    if rho.dims().len() != 4 {
        return Err(VerifyError::Dimension("expected states on ABCD".into()));
    }
    let eps = trace_distance(rho, sigma)?;
    let energy = rho
        .partial_trace(&[0, 3])?
        .expectation(h_star)?
        .max(sigma.partial_trace(&[0, 3])?.expectation(h_star)?);
    let lhs = (qcmi(rho, &[0], &[1], &[2])? - qcmi(sigma, &[0], &[1], &[2])?).abs();
    let rhs = lemma1_bound(eps, energy, f_star, variant)?;
    Ok(Comparison::new(lhs, rhs, ENTROPY_SLACK))
}

/// `F_{H*}(E)` of a finite spectrum, without grounding.
fn spectrum_max_entropy(levels: Vec<f64>) -> Result<MaxEntropyF64> {
    let spec = SpectrumModel::explicit(levels)?;
    let floor = spec.ground_energy();
    Ok(MaxEntropyF64::custom(move |e: f64| {
        Ok(spec.gibbs_entropy(EnergyBudget(e.max(floor)))?.entropy_nats)
    }))
}

fn orthogonal_partner<R: Rng + ?Sized>(rng: &mut R, psi: &CVector) -> CVector {
    loop {
        let v = random_vector(rng, psi.len());
        let w = &v - psi * psi.dotc(&v);
        let n = w.norm();
        if n > 1e-6 {
            return w.unscale(n);
        }
    }
}

pub fn check_lemma1(trials: u64, seed: u64) -> Result<CheckReport> {
    let notes = "H* acts on the whole of H_AD, which contains both AD supports; \
                 pure pairs use ε²/2, equal-BC pairs use a channel on AD";
    run_suite("lemma1", trials, seed, vec![3, 3, 3, 3], Some(notes.into()), |rng| {
        let dims = [
            rng.random_range(2..=3),
            rng.random_range(2..=3),
            rng.random_range(1..=3),
            rng.random_range(1..=3),
        ];
        let d: usize = dims.iter().product();
        let d_ad = dims[0] * dims[3];
        let mut levels: Vec<f64> = (0..d_ad).map(|_| rng.random_range(0.0..3.0)).collect();
        levels.sort_by(f64::total_cmp);
        let h_star = random_hamiltonian(rng, &levels);
        let f_star = spectrum_max_entropy(levels)?;
        let mut t = Trial::default();

        // Mixed pair at a prescribed distance.
        let rho = random_state_any_rank(rng, &dims)?;
        let other = random_state_any_rank(rng, &dims)?;
        let dist = trace_distance(&rho, &other)?;
        if dist > 1e-9 {
            let target = rng.random_range(1e-6..0.49) * dist.min(1.0);
            let sigma = other.mix(target / dist, &rho)?;
            t.push(
                "general",
                lemma1_instance(&rho, &sigma, &h_star, &f_star, Lemma1Variant::General)?,
            );
        }

        // Pure pair: φ = cos θ ψ + sin θ ψ⊥ has distance sin θ.
        let psi = random_vector(rng, d);
        let perp = orthogonal_partner(rng, &psi);
        let s: f64 = rng.random_range(1e-6..0.99);
        let phi = psi.scale((1.0 - s * s).sqrt()) + perp.scale(s);
        let (pr, ps) = (
            DensityMatrix::pure(&psi, dims.to_vec())?,
            DensityMatrix::pure(&phi, dims.to_vec())?,
        );
        t.push(
            "pure",
            lemma1_instance(&pr, &ps, &h_star, &f_star, Lemma1Variant::PureStates)?,
        );

        // Equal BC marginals: mix with the image under a channel on AD.
        let channel = random_channel(rng, d_ad, d_ad, 2)?;
        let moved = rho.apply_local(&channel.kraus(), &[0, 3])?;
        let dist = trace_distance(&rho, &moved)?;
        if dist > 1e-9 {
            let x = rng.random_range(1e-6..1.0) * (0.49 / dist).min(1.0);
            let sigma = moved.mix(x, &rho)?;
            ensure_equal_bc(&rho, &sigma)?;
            t.push(
                "equal-bc",
                lemma1_instance(&rho, &sigma, &h_star, &f_star, Lemma1Variant::EqualMarginalBC)?,
            );
        }

        // Pure with equal BC marginals: a unitary on AD with bounded phases.
        let spread = rng.random_range(1e-3..std::f64::consts::PI);
        let v = random_unitary(rng, d_ad);
        let phases = CVector::from_fn(d_ad, |_, _| {
            num_complex::Complex64::from_polar(1.0, rng.random_range(-spread..spread))
        });
        let u = &v * CMatrix::from_diagonal(&phases) * v.adjoint();
        let pr = random_pure(rng, &dims)?;
        let ps = pr.conjugate_local(&u, &[0, 3])?;
        ensure_equal_bc(&pr, &ps)?;
        if trace_distance(&pr, &ps)? < 1.0 - 1e-9 {
            t.push(
                "pure-equal-bc",
                lemma1_instance(&pr, &ps, &h_star, &f_star, Lemma1Variant::PureAndEqualMarginalBC)?,
            );
        }
        Ok(t)
    })
}

fn ensure_equal_bc(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    let diff = rho.partial_trace(&[1, 2])?.matrix() - sigma.partial_trace(&[1, 2])?.matrix();
    let err = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if err > MARGINAL_TOL {
        return Err(VerifyError::Sampling(format!("BC marginals differ by {err:e}")));
    }
    Ok(())
}

/// Shape of the Holevo truncation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiTruncationConfig {
    pub d_a: usize,
    pub d_b: usize,
    pub m: usize,
}

impl Default for ChiTruncationConfig {
    fn default() -> Self {
        ChiTruncationConfig { d_a: 8, d_b: 4, m: 6 }
    }
}

/// `Π_m(ρ) = P_m ρ P_m + Tr((I − P_m) ρ) |0⟩⟨0|` in the eigenbasis of `H_A`.
pub fn truncate(rho: &DensityMatrix, m: usize) -> Result<DensityMatrix> {
    let d = rho.dim();
    let p = CMatrix::from_fn(d, d, |i, j| if i == j && i < m { 1.0.into() } else { 0.0.into() });
    rho.pinch(&p, &DensityMatrix::basis(d, 0)?)
}

/// `|χ(Φ(ρ_i)) − χ(Φ(Π_m ρ_i))|` against `f_Cχ(E, m)` with `E` the average
/// energy of the ensemble; `None` when `s ≥ 1/2`.
pub fn chi_truncation_instance(
    bounds: &UniversalBounds,
    channel: &ChannelRep,
    ensemble: &Ensemble,
    m: usize,
) -> Result<Option<Comparison>> {
    let spec = bounds.spectrum();
    let d = ensemble.states()[0].dim();
    if spec.dimension() != Some(d) || m == 0 || m >= d {
        return Err(VerifyError::Dimension(format!(
            "truncation to {m} levels in dimension {d}"
        )));
    }
    let levels = spec.ladder(d)?;
    let h = CMatrix::from_diagonal(&CVector::from_iterator(d, levels.iter().map(|&l| l.into())));
    let energy = ensemble.average().expectation(&h)?.max(levels[0]);
    let x = (energy - levels[0]) / (levels[m] - levels[0]);
    if x + x.sqrt() >= 0.5 {
        return Ok(None);
    }
    let full = holevo_quantity(&ensemble.map(|s| channel.apply(s))?)?;
    let cut = holevo_quantity(&ensemble.map(|s| channel.apply(&truncate(s, m)?))?)?;
    let rhs = bounds.f_nats(CapacityKind::Chi, energy - levels[0], levels[m] - levels[0])?;
    Ok(Some(Comparison::new((full - cut).abs(), rhs, ENTROPY_SLACK)))
}

pub fn check_chi_truncation(config: ChiTruncationConfig, trials: u64, seed: u64) -> Result<CheckReport> {
    let ChiTruncationConfig { d_a, d_b, m } = config;
    if m == 0 || m >= d_a || d_b == 0 {
        return Err(VerifyError::Dimension(format!(
            "need 0 < m < d_A, got m = {m}, d_A = {d_a}"
        )));
    }
    let spec = SpectrumModel::explicit((0..d_a).map(|k| k as f64).collect())?;
    let bounds = UniversalBounds::new(spec, FSource::Exact)?;
    let d_env = d_a.div_ceil(d_b).max(2);
    let notes = format!("E_k = k, m = {m}, environment dimension {d_env}; trials with s >= 1/2 skipped");
    run_suite("chi-truncation", trials, seed, vec![d_a, d_b], Some(notes), |rng| {
        let channel = random_channel(rng, d_a, d_b, d_env)?;
        let k = rng.random_range(2..=4);
        let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let ground = DensityMatrix::basis(d_a, 0)?;
        let states = (0..k)
            .map(|_| {
                let excited = random_state_any_rank(rng, &[d_a])?;
                excited.mix(rng.random_range(0.0..0.25), &ground)
            })
            .collect::<Result<Vec<_>>>()?;
        let ens = Ensemble::new(probs, states)?;
        Ok(match chi_truncation_instance(&bounds, &channel, &ens, m)? {
            Some(c) => {
                let mut t = Trial::default();
                t.push("chi-truncation", c);
                t
            }
            None => Trial::skipped(),
        })
    })
}

/// `I(X:YZ|C) = I(X:Y|C) + I(X:Z|YC)` on `X ⊗ Y ⊗ Z ⊗ C`.
pub fn chain_rule_defect(rho: &DensityMatrix) -> Result<f64> {
    let whole = qcmi(rho, &[0], &[1, 2], &[3])?;
    let first = qcmi(rho, &[0], &[1], &[3])?;
    let second = qcmi(rho, &[0], &[2], &[1, 3])?;
    Ok((whole - first - second).abs())
}

pub fn check_chain_rule(trials: u64, seed: u64) -> Result<CheckReport> {
    run_suite("chain-rule", trials, seed, vec![3, 3, 3, 3], None, |rng| {
        let dims: Vec<usize> = (0..4).map(|_| rng.random_range(1..=3)).collect();
        let rho = random_state_any_rank(rng, &dims)?;
        let mut t = Trial::default();
        t.push(
            "chain-rule",
            Comparison::new(chain_rule_defect(&rho)?, 0.0, IDENTITY_SLACK),
        );
        let sub = qcmi(&rho, &[0], &[1], &[2])?;
        t.push("ssa", Comparison::new(-sub, 0.0, IDENTITY_SLACK));
        Ok(t)
    })
}

/// `|χ − I(A:B)|` for the classical-quantum state of the ensemble.
pub fn chi_rep_defect(ens: &Ensemble) -> Result<f64> {
    Ok((holevo_quantity(ens)? - mutual_information(&ens.cq_state(), &[0], &[1])?).abs())
}

pub fn check_chi_rep(trials: u64, seed: u64) -> Result<CheckReport> {
    run_suite("chi-rep", trials, seed, vec![2], None, |rng| {
        let states = (0..3)
            .map(|_| random_state_any_rank(rng, &[2]))
            .collect::<Result<Vec<_>>>()?;
        let w: Vec<f64> = (0..3).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = w.iter().sum();
        let ens = Ensemble::new(w.iter().map(|x| x / total).collect(), states)?;
        let mut t = Trial::default();
        t.push("chi-rep", Comparison::new(chi_rep_defect(&ens)?, 0.0, IDENTITY_SLACK));
        Ok(t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::random_state;

    #[test]
    fn gentle_edge_cases() {
        let mut rng = trial_rng(3, 0);
        let rho = random_state(&mut rng, &[4]).unwrap();
        let c = gentle(&rho, &identity(4)).unwrap();
        assert!(c.lhs < 1e-14 && c.rhs < 1e-7);
        let c = gentle(&rho, &CMatrix::zeros(4, 4)).unwrap();
        assert!(c.lhs < 1e-14 && (c.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pinching_is_exact_on_supported_states() {
        let mut rng = trial_rng(3, 1);
        let omega = random_state(&mut rng, &[3, 2]).unwrap();
        let tau = random_state(&mut rng, &[3]).unwrap();
        let c = pinching(&omega, &identity(3), &tau).unwrap();
        assert!(c.lhs < 1e-12 && c.rhs < 1e-12);
    }

    #[test]
    fn tail_bound_is_tight_on_level_m() {
        let spec = SpectrumModel::explicit(vec![0.5, 1.0, 2.0, 4.0]).unwrap();
        let c = tail_bound(&spec, &DensityMatrix::basis(4, 2).unwrap(), 2).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-15 && (c.rhs - 1.0).abs() < 1e-15);
        let c = tail_bound(&spec, &DensityMatrix::basis(4, 0).unwrap(), 2).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
    }

    #[test]
    fn truncation_of_supported_ensemble_is_lossless() {
        let mut rng = trial_rng(5, 0);
        let spec = SpectrumModel::explicit((0..8).map(|k| k as f64).collect()).unwrap();
        let bounds = UniversalBounds::new(spec, FSource::Exact).unwrap();
        let channel = random_channel(&mut rng, 8, 4, 2).unwrap();
        let ground = DensityMatrix::basis(8, 0).unwrap();
        let one = DensityMatrix::basis(8, 1).unwrap();
        let ens = Ensemble::new(vec![0.97, 0.03], vec![ground, one]).unwrap();
        let c = chi_truncation_instance(&bounds, &channel, &ens, 6).unwrap().unwrap();
        assert!(c.lhs < 1e-12 && c.holds());
    }

    #[test]
    fn lemma1_identical_states() {
        let mut rng = trial_rng(9, 0);
        let rho = random_state(&mut rng, &[2, 2, 2, 2]).unwrap();
        let h = random_hamiltonian(&mut rng, &[0.0, 1.0, 1.5, 2.0]);
        let f = spectrum_max_entropy(vec![0.0, 1.0, 1.5, 2.0]).unwrap();
        let c = lemma1_instance(&rho, &rho, &h, &f, Lemma1Variant::General).unwrap();
        assert!(c.lhs < 1e-12 && c.rhs == 0.0 && c.holds());
    }

    #[test]
    fn suites_are_deterministic_and_clean() {
        for kind in CheckKind::ALL {
            let a = run_check(kind, 40, 11).unwrap();
            let b = run_check(kind, 40, 11).unwrap();
            assert_eq!(a, b, "{kind}");
            assert!(a.passed(), "{kind}: {:?}", a.violations);
        }
    }

    #[test]
    fn check_names_round_trip() {
        for kind in CheckKind::ALL {
            assert_eq!(kind.name().parse::<CheckKind>().unwrap(), kind);
        }
    }
}
