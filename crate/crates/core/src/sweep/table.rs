use std::io::Write;

use rayon::prelude::*;

use crate::equilibrium::{
    critical_fines, eta_b, eta_u, solve, EquilibriumSolution, SliceRegime, Support,
};
use crate::error::SweepError;
use crate::model::{classify_case, delta, CaseLabel, InformationEnvironment, PopulationModel};
use crate::numerics::fmt_sig;

use super::scenario::{Mode, Scenario};

/// Smallest welfare change that can be flagged as a discontinuity.
pub const JUMP_FLOOR: f64 = 1e-9;
/// A change must exceed this multiple of both neighbouring changes.
pub const JUMP_RATIO: f64 = 10.0;

/// Direction of a flagged discontinuity between a row and its predecessor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Jump {
    Up,
    Down,
}

/// Solution at one grid point under one mode; `solution` holds the solver
/// error message when the point failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mode: Mode,
    pub value: f64,
    pub env: InformationEnvironment,
    pub pop: PopulationModel,
    pub case: CaseLabel,
    pub fine_u: f64,
    pub fine_b: f64,
    pub delta: f64,
    pub eta_b: f64,
    pub eta_u: f64,
    pub solution: Result<EquilibriumSolution, String>,
    pub jump: Option<Jump>,
    /// Regime or slice labels differ from the previous row of the same mode.
    pub regime_change: bool,
}

impl SweepRow {
    pub fn welfare(&self) -> Option<f64> {
        self.solution.as_ref().ok().map(|s| s.welfare)
    }

    /// `ok`, `error`, or the support marker of an unsupported point.
    pub fn status(&self) -> &'static str {
        match &self.solution {
            Err(_) => "error",
            Ok(s) if s.support == Support::Supported => "ok",
            Ok(s) => support_name(s.support),
        }
    }
}

/// Rows of a sweep, grouped by mode in scenario order and by grid point
/// within a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub scenario: Scenario,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn series(&self, mode: Mode) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.mode == mode)
    }

    pub fn jumps(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.jump.is_some())
    }
}

fn evaluate(scenario: &Scenario, mode: Mode, value: f64) -> Result<SweepRow, SweepError> {
    let (env, pop) = scenario.at(value)?;
    let (fine_u, fine_b) = critical_fines(&env);
    Ok(SweepRow {
        mode,
        value,
        env,
        pop,
        case: classify_case(&env),
        fine_u,
        fine_b,
        delta: delta(&env),
        eta_b: eta_b(&pop, &env).value,
        eta_u: eta_u(&pop).value,
        solution: solve(&env, &pop, mode.institution()).map_err(|e| e.to_string()),
        jump: None,
        regime_change: false,
    })
}

/// Flags index `i` when `|W_i - W_{i-1}|` exceeds both [`JUMP_FLOOR`] and
/// [`JUMP_RATIO`] times each neighbouring difference. Missing neighbours
/// count as zero; failed points break the series.
pub fn flag_jumps(welfare: &[Option<f64>]) -> Vec<Option<Jump>> {
    let diff = |i: usize| -> Option<f64> {
        if i == 0 || i >= welfare.len() {
            return None;
        }
        Some(welfare[i]? - welfare[i - 1]?)
    };
    (0..welfare.len())
        .map(|i| {
            let d = diff(i)?;
            let prev = diff(i.wrapping_sub(1)).unwrap_or(0.0).abs();
            let next = diff(i + 1).unwrap_or(0.0).abs();
            let big = d.abs() > JUMP_FLOOR && d.abs() > JUMP_RATIO * prev.max(next);
            big.then_some(if d > 0.0 { Jump::Up } else { Jump::Down })
        })
        .collect()
}

fn labels(row: &SweepRow) -> Option<(crate::equilibrium::Regime, [SliceRegime; 2])> {
    row.solution.as_ref().ok().map(|s| (s.regime, s.slices))
}

/// Solves every grid point under every mode of the scenario.
///
/// Points are evaluated in parallel and collected in grid order, so the
/// table does not depend on the thread count. A point whose parameters are
/// invalid aborts the sweep; a point the solver rejects is kept with status
/// `error`.
pub fn run_sweep(scenario: &Scenario) -> Result<SweepTable, SweepError> {
    let points = scenario.sweep.points();
    let mut rows = Vec::with_capacity(points.len() * scenario.modes.len());
    for &mode in &scenario.modes {
        let mut series = points
            .par_iter()
            .map(|&v| evaluate(scenario, mode, v))
            .collect::<Result<Vec<_>, _>>()?;
        let welfare: Vec<Option<f64>> = series.iter().map(SweepRow::welfare).collect();
        for (row, jump) in series.iter_mut().zip(flag_jumps(&welfare)) {
            row.jump = jump;
        }
        for i in 1..series.len() {
            series[i].regime_change = labels(&series[i]) != labels(&series[i - 1]);
        }
        rows.extend(series);
    }
    Ok(SweepTable {
        scenario: scenario.clone(),
        rows,
    })
}

/// Column names of the sweep CSV.
pub const SWEEP_COLUMNS: [&str; 26] = [
    "mode",
    "axis",
    "value",
    "beta",
    "p_x",
    "p_y",
    "gamma",
    "gamma_bar",
    "case",
    "support",
    "regime",
    "slice_low",
    "slice_high",
    "welfare",
    "f_bar",
    "fine_u",
    "fine_b",
    "delta",
    "eta_b",
    "eta_u",
    "a_b_bad",
    "a_u_mixed",
    "jump",
    "regime_change",
    "status",
    "error",
];

fn support_name(s: Support) -> &'static str {
    match s {
        Support::Supported => "supported",
        Support::OutsideAssumedRegion => "outside-assumed-region",
        Support::TrivialRegion => "trivial-region",
    }
}

fn slice_name(s: SliceRegime) -> &'static str {
    match s {
        SliceRegime::AllAct => "all-act",
        SliceRegime::NoneAct => "none-act",
        SliceRegime::FreePass => "free-pass",
        SliceRegime::FullDeterrence => "full-deterrence",
        SliceRegime::BiasedMixing => "biased-mixing",
        SliceRegime::UnbiasedMixing => "unbiased-mixing",
        SliceRegime::InterimEfficient => "interim-efficient",
        SliceRegime::TotalDeterrence => "total-deterrence",
    }
}

fn record(table: &SweepTable, r: &SweepRow) -> Vec<String> {
    let sig = |v: f64| fmt_sig(v, 12);
    let axis = table.scenario.sweep.axis.name();
    let mut out = vec![
        r.mode.name().to_string(),
        axis.to_string(),
        sig(r.value),
        sig(r.env.beta()),
        sig(r.env.p_x()),
        sig(r.env.p_y()),
        sig(r.pop.gamma()),
        sig(r.pop.gamma_bar()),
        r.case.name().to_string(),
    ];
    match &r.solution {
        Ok(s) => out.extend([
            support_name(s.support).to_string(),
            s.regime.name().to_string(),
            slice_name(s.slices[0]).to_string(),
            slice_name(s.slices[1]).to_string(),
            sig(s.welfare),
            sig(s.f_bar),
        ]),
        Err(_) => out.extend(std::iter::repeat_n(String::new(), 6)),
    }
    out.extend([
        sig(r.fine_u),
        sig(r.fine_b),
        sig(r.delta),
        sig(r.eta_b),
        sig(r.eta_u),
    ]);
    match &r.solution {
        Ok(s) => out.extend([sig(s.biased_on_bad_pair()), sig(s.unbiased_on_mixed_pair())]),
        Err(_) => out.extend([String::new(), String::new()]),
    }
    out.extend([
        match r.jump {
            Some(Jump::Up) => "up".into(),
            Some(Jump::Down) => "down".into(),
            None => String::new(),
        },
        r.regime_change.to_string(),
        r.status().to_string(),
        r.solution.as_ref().err().cloned().unwrap_or_default(),
    ]);
    out
}

fn write_rows<'a, W: Write>(
    out: W,
    table: &SweepTable,
    rows: impl Iterator<Item = &'a SweepRow>,
) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        w.write_record(record(table, r))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every row with [`SWEEP_COLUMNS`] as header. Floats carry 12
/// significant digits; fields that need a solution are empty on error.
pub fn write_sweep_csv<W: Write>(out: W, table: &SweepTable) -> Result<(), SweepError> {
    write_rows(out, table, table.rows.iter())
}

/// Same columns as [`write_sweep_csv`], flagged rows only.
pub fn write_jumps_csv<W: Write>(out: W, table: &SweepTable) -> Result<(), SweepError> {
    write_rows(out, table, table.jumps())
}
