//! Argument definitions and the subcommand implementations.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ecdim::contbounds::{ecd_truncation_eps, lemma1_bound, lemma2_f, lemma5_bound, v_theorem3};
use ecdim::spectrum::{EnergyBudget, LevelOracle, SpectrumDef};
use ecdim::tables::{generate_table, TableConfig};
use ecdim::{
    CapacityKind, EnergyLimitParams, EnergyLimitedBounds, EpsSpec, FSource, Lemma1Variant, Lemma2Variant, LogBase,
    MaxEntropy, Spectrum, UniversalBounds,
};
use ecdim_verify::{run_check, CheckKind};
use serde::Serialize;

use crate::output::{emit, emit_table};
use crate::{CliError, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "ecdim",
    version,
    about = "Sufficient input dimensions and continuity bounds for energy-constrained channel capacities"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Logarithm base for reported entropies: nat or two.
    #[arg(long, global = true, default_value = "nat")]
    pub base: LogBase,
    /// Maximum-entropy function used inside the bounds: exact or fhat.
    #[arg(long = "f-source", global = true, default_value = "exact")]
    pub f_source: FSource,
    /// Largest dimension a search may return.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    /// Relative tolerance for table comparisons.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub tol: f64,
    #[arg(long, global = true, default_value = "csv")]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
}

impl GlobalArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            base: self.base,
            f_source: self.f_source,
            cap: self.cap,
            tol: self.tol,
            format: self.format,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute a published dimension table and compare against it.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        id: u8,
    },
    /// Smallest input dimension whose truncation loss is within tolerance.
    #[command(allow_negative_numbers = true)]
    Mdim {
        kind: CapacityKind,
        spectrum: PathBuf,
        energy: f64,
        /// `frac:x` for x·F(E), `abs:x` (or a bare number) in the chosen base.
        eps: EpsArg,
        /// Output energy slope; switches to the energy-limited bounds.
        #[arg(long)]
        alpha: Option<f64>,
        /// Output energy offset (energy-limited bounds, default 0).
        #[arg(long, requires = "alpha")]
        ec: Option<f64>,
    },
    /// Uniform continuity bound for a capacity, minimized over the dimension.
    #[command(allow_negative_numbers = true)]
    Vbound {
        kind: CapacityKind,
        spectrum: PathBuf,
        energy: f64,
        /// Energy-constrained diamond-norm distance, in (0, 1].
        eps: f64,
    },
    /// Evaluate one building-block bound.
    Bound {
        #[command(subcommand)]
        which: BoundCommand,
    },
    /// Maximum entropy F(E) of a spectrum.
    #[command(allow_negative_numbers = true)]
    Fmax { spectrum: PathBuf, energy: f64 },
    /// Randomized inequality checks.
    Verify {
        /// A check name or `all`.
        check: CheckSelection,
        /// Number of trials; defaults to the suite's standard size.
        trials: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoundCommand {
    /// QCMI continuity bound for trace-norm-close states.
    #[command(allow_negative_numbers = true)]
    Lemma1 {
        /// Spectrum of the Hamiltonian constraining the states.
        spectrum: PathBuf,
        eps: f64,
        energy: f64,
        #[arg(long, default_value = "general")]
        variant: Lemma1Variant,
    },
    /// Truncation estimate f(E, m).
    #[command(allow_negative_numbers = true)]
    Lemma2 {
        spectrum: PathBuf,
        energy: f64,
        m: u64,
        #[arg(long, default_value = "general")]
        variant: Lemma2Variant,
    },
    /// QCMI continuity bound for energy-limited channels at fixed t and p.
    #[command(allow_negative_numbers = true)]
    Lemma5 {
        /// Output spectrum.
        spectrum: PathBuf,
        eps: f64,
        energy: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        ec: f64,
        #[arg(long)]
        t: f64,
        /// Required unless `--per-copy` is given.
        #[arg(long, required_unless_present = "per_copy")]
        p: Option<f64>,
        #[arg(long)]
        per_copy: bool,
    },
    /// Diamond-norm distance of the m-level truncation at energy E.
    #[command(allow_negative_numbers = true)]
    Ecd { spectrum: PathBuf, energy: f64, m: u64 },
}

/// Tolerance given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsArg(pub EpsSpec<f64>);

impl std::str::FromStr for EpsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (tag, num) = s.split_once(':').unwrap_or(("abs", s));
        let x: f64 = num.trim().parse().map_err(|_| format!("`{num}` is not a number"))?;
        match tag.to_ascii_lowercase().as_str() {
            "abs" => Ok(EpsArg(EpsSpec::Absolute(x))),
            "frac" => Ok(EpsArg(EpsSpec::FractionOfF(x))),
            other => Err(format!("unknown tolerance form `{other}` (expected abs:x or frac:x)")),
        }
    }
}

impl std::fmt::Display for EpsArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            EpsSpec::Absolute(x) => write!(f, "abs:{x}"),
            EpsSpec::FractionOfF(x) => write!(f, "frac:{x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckSelection {
    All,
    One(CheckKind),
}

impl std::str::FromStr for CheckSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            Ok(CheckSelection::All)
        } else {
            s.parse().map(CheckSelection::One)
        }
    }
}

pub fn load_spectrum(path: &Path) -> Result<Spectrum, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let def: SpectrumDef = serde_json::from_reader(BufReader::new(file)).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Spectrum::from_def(&def)?)
}

/// Runs a parsed command line, writing results to `out`.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<(), CliError> {
    let cfg = cli.global.config();
    cfg.validate()?;
    match &cli.command {
        Command::Table { id } => cmd_table(*id, &cfg, out),
        Command::Mdim {
            kind,
            spectrum,
            energy,
            eps,
            alpha,
            ec,
        } => {
            let limits = alpha.map(|a| (a, ec.unwrap_or(0.0)));
            cmd_mdim(*kind, &load_spectrum(spectrum)?, *energy, *eps, limits, &cfg, out)
        }
        Command::Vbound {
            kind,
            spectrum,
            energy,
            eps,
        } => cmd_vbound(*kind, &load_spectrum(spectrum)?, *energy, *eps, &cfg, out),
        Command::Bound { which } => cmd_bound(which, &cfg, out),
        Command::Fmax { spectrum, energy } => cmd_fmax(&load_spectrum(spectrum)?, *energy, &cfg, out),
        Command::Verify { check, trials } => cmd_verify(*check, *trials, &cfg, out),
    }
}

/// Emits the table, then fails if any cell is outside `cfg.tol`.
pub fn cmd_table<W: Write>(id: u8, cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    if !(1..=6).contains(&id) {
        return Err(CliError::Usage(format!("no table {id}; expected 1 to 6")));
    }
    let table = generate_table(
        id,
        TableConfig {
            base: cfg.base,
            f_source: cfg.f_source,
        },
    )?;
    emit_table(&table, cfg.format, out)?;
    if table.within(cfg.tol) {
        Ok(())
    } else {
        Err(CliError::TableMismatch {
            table: id,
            max_rel_err: table.max_rel_err(),
            tol: cfg.tol,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct MdimRecord {
    pub kind: CapacityKind,
    #[serde(rename = "E")]
    pub energy: f64,
    pub eps_spec: String,
    /// Tolerance in the reporting base.
    pub eps: f64,
    pub m: u64,
    pub f_value: f64,
    pub t: Option<f64>,
    pub p: Option<f64>,
    /// Smallest admissible index before the tolerance is considered.
    pub floor: u64,
    /// True when the answer sits on the floor rather than on the tolerance.
    pub floor_binding: bool,
    pub alpha: Option<f64>,
    pub ec: Option<f64>,
    pub log_base: LogBase,
    pub f_source: FSource,
    pub h_cond: bool,
    pub h_cond_plus: bool,
    pub conditions_extrapolated: bool,
}

pub fn mdim(
    kind: CapacityKind,
    spec: &Spectrum,
    energy: f64,
    eps: EpsArg,
    limits: Option<(f64, f64)>,
    cfg: &RunConfig,
) -> Result<MdimRecord, CliError> {
    let budget = EnergyBudget(energy);
    let (eval, eps_nats, floor) = match limits {
        None => {
            let mut b = UniversalBounds::new(spec.clone(), cfg.f_source)?.with_base(cfg.base);
            if let Some(cap) = cfg.cap {
                b = b.with_cap(cap);
            }
            (
                b.minimal_m(kind, budget, eps.0)?,
                b.epsilon_nats(budget, eps.0)?,
                b.constraint_floor(budget)?,
            )
        }
        Some((alpha, ec)) => {
            let params = EnergyLimitParams::new(alpha, ec)?;
            let output = MaxEntropy::output_bound(spec, cfg.f_source)?;
            let mut b = EnergyLimitedBounds::new(spec.clone(), output, params)?.with_base(cfg.base);
            if let Some(cap) = cfg.cap {
                b = b.with_cap(cap);
            }
            (
                b.minimal_m(kind, budget, eps.0)?,
                b.epsilon_nats(budget, eps.0)?,
                first_positive_gap(spec)?,
            )
        }
    };
    let m = eval.m.expect("searches return a witness");
    let conditions = spec.condition_diagnostics();
    Ok(MdimRecord {
        kind,
        energy,
        eps_spec: eps.to_string(),
        eps: cfg.base.from_nats(eps_nats),
        m,
        f_value: eval.value,
        t: eval.t,
        p: eval.p,
        floor,
        floor_binding: m == floor,
        alpha: limits.map(|l| l.0),
        ec: limits.map(|l| l.1),
        log_base: cfg.base,
        f_source: cfg.f_source,
        h_cond: conditions.h_cond,
        h_cond_plus: conditions.h_cond_plus,
        conditions_extrapolated: conditions.extrapolated,
    })
}

fn first_positive_gap(spec: &Spectrum) -> Result<u64, CliError> {
    let mut oracle = LevelOracle::new(spec);
    let last = oracle.max_index();
    for m in 1..=last {
        if oracle.gap(m)? > 0.0 {
            return Ok(m);
        }
    }
    Err(ecdim::Error::DegenerateGap { m: last }.into())
}

pub fn cmd_mdim<W: Write>(
    kind: CapacityKind,
    spec: &Spectrum,
    energy: f64,
    eps: EpsArg,
    limits: Option<(f64, f64)>,
    cfg: &RunConfig,
    out: &mut W,
) -> Result<(), CliError> {
    emit(&mdim(kind, spec, energy, eps, limits, cfg)?, cfg.format, out)
}

#[derive(Debug, Serialize)]
pub struct VboundRecord {
    pub kind: CapacityKind,
    #[serde(rename = "E")]
    pub energy: f64,
    pub eps: f64,
    pub value: f64,
    pub witness_m: u64,
    pub cap: u64,
    pub cap_reached: bool,
    pub log_base: LogBase,
    pub f_source: FSource,
}

pub fn cmd_vbound<W: Write>(
    kind: CapacityKind,
    spec: &Spectrum,
    energy: f64,
    eps: f64,
    cfg: &RunConfig,
    out: &mut W,
) -> Result<(), CliError> {
    let mut b = UniversalBounds::new(spec.clone(), cfg.f_source)?.with_base(cfg.base);
    if let Some(cap) = cfg.cap {
        b = b.with_cap(cap);
    }
    let bound = v_theorem3(&b, kind, EnergyBudget(energy), eps)?;
    let record = VboundRecord {
        kind,
        energy,
        eps,
        value: bound.evaluation.value,
        witness_m: bound.evaluation.m.expect("the minimizer has a witness"),
        cap: bound.cap,
        cap_reached: bound.cap_reached,
        log_base: cfg.base,
        f_source: cfg.f_source,
    };
    emit(&record, cfg.format, out)
}

#[derive(Debug, Serialize)]
pub struct BoundRecord {
    pub bound: &'static str,
    pub variant: Option<String>,
    pub eps: Option<f64>,
    #[serde(rename = "E")]
    pub energy: f64,
    pub m: Option<u64>,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub value: f64,
    /// `None` for dimensionless results.
    pub log_base: Option<LogBase>,
}

pub fn cmd_bound<W: Write>(which: &BoundCommand, cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    let record = match which {
        BoundCommand::Lemma1 {
            spectrum,
            eps,
            energy,
            variant,
        } => {
            let spec = load_spectrum(spectrum)?;
            let f_star = MaxEntropy::output_bound(&spec, cfg.f_source)?;
            let v = lemma1_bound(*eps, *energy, &f_star, *variant)?;
            BoundRecord {
                bound: "lemma1",
                variant: Some(variant.to_string()),
                eps: Some(*eps),
                energy: *energy,
                m: None,
                t: None,
                p: None,
                value: cfg.base.from_nats(v),
                log_base: Some(cfg.base),
            }
        }
        BoundCommand::Lemma2 {
            spectrum,
            energy,
            m,
            variant,
        } => {
            let spec = load_spectrum(spectrum)?;
            let fbar = MaxEntropy::grounded(&spec, cfg.f_source)?;
            let v = lemma2_f(&spec, &fbar, EnergyBudget(*energy), *m, *variant)?;
            BoundRecord {
                bound: "lemma2",
                variant: Some(variant.to_string()),
                eps: None,
                energy: *energy,
                m: Some(*m),
                t: None,
                p: None,
                value: cfg.base.from_nats(v),
                log_base: Some(cfg.base),
            }
        }
        BoundCommand::Lemma5 {
            spectrum,
            eps,
            energy,
            alpha,
            ec,
            t,
            p,
            per_copy,
        } => {
            let spec = load_spectrum(spectrum)?;
            let f_b = MaxEntropy::output_bound(&spec, cfg.f_source)?;
            let params = EnergyLimitParams::new(*alpha, *ec)?;
            let p_used = if *per_copy { 1.0 } else { p.expect("clap requires p") };
            let v = lemma5_bound(*eps, *energy, params, &f_b, p_used, *t, *per_copy)?;
            BoundRecord {
                bound: "lemma5",
                variant: Some(if *per_copy { "per-copy" } else { "general" }.to_string()),
                eps: Some(*eps),
                energy: *energy,
                m: None,
                t: Some(*t),
                p: Some(p_used),
                value: cfg.base.from_nats(v),
                log_base: Some(cfg.base),
            }
        }
        BoundCommand::Ecd { spectrum, energy, m } => {
            let spec = load_spectrum(spectrum)?;
            let e_bar = EnergyBudget(*energy).grounded(&spec)?;
            let gap = LevelOracle::new(&spec).gap(*m)?;
            BoundRecord {
                bound: "ecd-truncation",
                variant: None,
                eps: None,
                energy: *energy,
                m: Some(*m),
                t: None,
                p: None,
                value: ecd_truncation_eps(e_bar, gap)?,
                log_base: None,
            }
        }
    };
    emit(&record, cfg.format, out)
}

#[derive(Debug, Serialize)]
pub struct FmaxRecord {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "F")]
    pub f: f64,
    /// Closed-form upper bound, oscillator spectra only.
    pub fhat: Option<f64>,
    /// Inverse temperature of the Gibbs state; `null` at the ground energy.
    pub lambda: Option<f64>,
    pub mean_energy: f64,
    pub residual: f64,
    pub log_base: LogBase,
    pub h_cond: bool,
    pub h_cond_plus: bool,
    pub conditions_extrapolated: bool,
}

pub fn fmax(spec: &Spectrum, energy: f64, cfg: &RunConfig) -> Result<FmaxRecord, CliError> {
    let sol = spec.gibbs_entropy(EnergyBudget(energy))?;
    let fhat = match spec.fhat(energy) {
        Ok(v) => Some(cfg.base.from_nats(v)),
        Err(ecdim::Error::Precondition(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let conditions = spec.condition_diagnostics();
    Ok(FmaxRecord {
        energy,
        f: sol.entropy(cfg.base),
        fhat,
        lambda: sol.lambda.is_finite().then_some(sol.lambda),
        mean_energy: sol.mean_energy,
        residual: sol.residual,
        log_base: cfg.base,
        h_cond: conditions.h_cond,
        h_cond_plus: conditions.h_cond_plus,
        conditions_extrapolated: conditions.extrapolated,
    })
}

pub fn cmd_fmax<W: Write>(spec: &Spectrum, energy: f64, cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    emit(&fmax(spec, energy, cfg)?, cfg.format, out)
}

/// Runs the selected suites with `cfg.seed`; fails after emitting if any
/// suite found a violation.
pub fn cmd_verify<W: Write>(
    check: CheckSelection,
    trials: Option<u64>,
    cfg: &RunConfig,
    out: &mut W,
) -> Result<(), CliError> {
    let kinds: Vec<CheckKind> = match check {
        CheckSelection::All => CheckKind::ALL.to_vec(),
        CheckSelection::One(k) => vec![k],
    };
    let reports = kinds
        .iter()
        .map(|&k| run_check(k, trials.unwrap_or_else(|| k.default_trials()), cfg.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    match check {
        CheckSelection::One(_) => emit(&reports[0], cfg.format, out)?,
        CheckSelection::All => emit(&reports, cfg.format, out)?,
    }
    if failed > 0 {
        return Err(CliError::Violations {
            failed,
            total: reports.len(),
        });
    }
    Ok(())
}
