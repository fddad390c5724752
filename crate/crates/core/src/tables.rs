//! Sufficient dimensions for a one-mode oscillator input (`ħω = 1`), for the
//! twelve published grids: universal bounds at `ε = 0.1 F(E)` and
//! `ε = 0.01 F(E)` (tables 1, 2) and energy-limited bounds for
//! `(α, E_c) = (1, 0)` and `(10⁶, 10⁶ ħω)` (tables 3 to 6).

use rayon::prelude::*;
use serde::Serialize;

use crate::dimbounds::{CapacityKind, EnergyLimitParams, EnergyLimitedBounds, EpsSpec, UniversalBounds};
use crate::maxent::{FSource, MaxEntropy};
use crate::spectrum::{EnergyBudget, SpectrumModel};
use crate::{Error, LogBase, Result};

pub const ROWS: [f64; 3] = [3.0, 10.0, 100.0];

const UNIVERSAL_COLUMNS: [CapacityKind; 5] = [
    CapacityKind::Chi,
    CapacityKind::Classical,
    CapacityKind::Ea,
    CapacityKind::Quantum,
    CapacityKind::Private,
];

const LIMITED_COLUMNS: [CapacityKind; 4] = [
    CapacityKind::Chi,
    CapacityKind::Classical,
    CapacityKind::Ea,
    CapacityKind::Quantum,
];

/// Published values, row-major over [`ROWS`] and the table's columns.
const PUBLISHED: [&[f64]; 6] = [
    &[
        5.0e9, 2.0e10, 8.6e4, 2.0e10, 5.2e11, //
        3.2e9, 1.3e10, 1.3e5, 1.3e10, 3.4e11, //
        5.5e9, 2.2e10, 5.3e5, 2.2e10, 5.5e11,
    ],
    &[
        2.1e14, 8.2e14, 1.7e7, 8.2e14, 1.8e16, //
        1.3e14, 5.3e14, 2.6e7, 5.3e14, 1.7e16, //
        2.0e14, 8.1e14, 1.0e8, 8.1e14, 1.8e16,
    ],
    &[
        3.1e4, 7.8e4, 7.8e4, 1.9e5, //
        4.8e4, 1.3e5, 1.3e5, 2.9e5, //
        1.9e5, 5.3e5, 5.3e5, 1.1e6,
    ],
    &[
        5.6e6, 1.3e7, 1.3e7, 3.1e7, //
        8.5e6, 2.0e7, 2.0e7, 4.7e7, //
        3.3e7, 8.3e7, 8.3e7, 1.8e8,
    ],
    &[
        9.0e4, 2.7e5, 2.7e5, 4.7e5, //
        1.4e5, 4.2e5, 4.2e5, 7.1e5, //
        5.2e5, 1.7e6, 1.7e6, 2.7e6,
    ],
    &[
        1.3e7, 3.6e7, 3.6e7, 6.4e7, //
        1.9e7, 5.4e7, 5.4e7, 9.7e7, //
        7.2e7, 2.1e8, 2.1e8, 3.6e8,
    ],
];

/// Layout of one table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableSpec {
    pub id: u8,
    pub epsilon_fraction: f64,
    /// `None` for the universal bounds.
    pub alpha: Option<f64>,
    pub ec: Option<f64>,
    pub columns: &'static [CapacityKind],
}

impl TableSpec {
    pub fn get(id: u8) -> Result<TableSpec> {
        let (epsilon_fraction, limits, columns): (f64, Option<(f64, f64)>, &'static [CapacityKind]) = match id {
            1 => (0.1, None, &UNIVERSAL_COLUMNS),
            2 => (0.01, None, &UNIVERSAL_COLUMNS),
            3 => (0.1, Some((1.0, 0.0)), &LIMITED_COLUMNS),
            4 => (0.01, Some((1.0, 0.0)), &LIMITED_COLUMNS),
            5 => (0.1, Some((1e6, 1e6)), &LIMITED_COLUMNS),
            6 => (0.01, Some((1e6, 1e6)), &LIMITED_COLUMNS),
            _ => return Err(Error::Precondition(format!("no table {id}; expected 1 to 6"))),
        };
        Ok(TableSpec {
            id,
            epsilon_fraction,
            alpha: limits.map(|l| l.0),
            ec: limits.map(|l| l.1),
            columns,
        })
    }

    pub fn published(&self, row: usize, col: usize) -> f64 {
        PUBLISHED[self.id as usize - 1][row * self.columns.len() + col]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableConfig {
    pub base: LogBase,
    pub f_source: FSource,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            base: LogBase::Natural,
            f_source: FSource::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    #[serde(rename = "E_over_hbar_omega")]
    pub e_over_hbar_omega: f64,
    pub capacity: CapacityKind,
    pub epsilon_fraction: f64,
    pub m: u64,
    /// Bound value at `m`, in the configured base.
    pub f_value: f64,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub published_m: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableResult {
    pub table: u8,
    pub epsilon_fraction: f64,
    pub alpha: Option<f64>,
    pub ec: Option<f64>,
    pub log_base: LogBase,
    pub f_source: FSource,
    pub cells: Vec<TableCell>,
}

impl TableResult {
    pub fn max_rel_err(&self) -> f64 {
        self.cells.iter().map(|c| c.rel_err).fold(0.0, f64::max)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.cells.iter().all(|c| c.rel_err <= tol)
    }
}

/// Computes one table. Cells are evaluated in parallel; the output order is
/// row-major.
pub fn generate_table(id: u8, config: TableConfig) -> Result<TableResult> {
    let spec = TableSpec::get(id)?;
    let osc = SpectrumModel::<f64>::single_mode_unit();
    let eps = EpsSpec::FractionOfF(spec.epsilon_fraction);
    let jobs: Vec<(usize, usize)> = (0..ROWS.len())
        .flat_map(|r| (0..spec.columns.len()).map(move |c| (r, c)))
        .collect();

    let universal = match spec.alpha {
        None => Some(UniversalBounds::new(osc.clone(), config.f_source)?.with_base(config.base)),
        Some(_) => None,
    };
    let limited = match (spec.alpha, spec.ec) {
        (Some(alpha), Some(ec)) => {
            let out = MaxEntropy::output_bound(&osc, config.f_source)?;
            let params = EnergyLimitParams::new(alpha, ec)?;
            Some(EnergyLimitedBounds::new(osc.clone(), out, params)?.with_base(config.base))
        }
        _ => None,
    };

    let cells = jobs
        .par_iter()
        .map(|&(r, c)| {
            let kind = spec.columns[c];
            let energy = EnergyBudget(ROWS[r]);
            let eval = match (&universal, &limited) {
                (Some(u), _) => u.minimal_m(kind, energy, eps)?,
                (None, Some(l)) => l.minimal_m(kind, energy, eps)?,
                (None, None) => unreachable!("every table has bounds"),
            };
            let m = eval.m.expect("searches return a witness");
            let published_m = spec.published(r, c);
            Ok(TableCell {
                e_over_hbar_omega: ROWS[r],
                capacity: kind,
                epsilon_fraction: spec.epsilon_fraction,
                m,
                f_value: eval.value,
                t: eval.t,
                p: eval.p,
                published_m,
                rel_err: (m as f64 - published_m).abs() / published_m,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(TableResult {
        table: id,
        epsilon_fraction: spec.epsilon_fraction,
        alpha: spec.alpha,
        ec: spec.ec,
        log_base: config.base,
        f_source: config.f_source,
        cells,
    })
}
