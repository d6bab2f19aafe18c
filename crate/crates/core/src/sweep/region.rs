use std::io::Write;

use crate::error::SweepError;
use crate::model::{classify_case, critical_px, delta, CaseLabel, InformationEnvironment};
use crate::numerics::fmt_sig;

/// One grid cell of the precision plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell {
    pub p_x: f64,
    pub p_y: f64,
    pub case: CaseLabel,
    pub delta: f64,
}

/// Case labels and the sign of `F^b - F^u` over `(p_x, p_y)`, with the
/// zero locus located by bisection along every row.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub beta: f64,
    pub step: f64,
    /// Row-major by `p_y`, then `p_x`.
    pub cells: Vec<RegionCell>,
    /// `(p_x, p_y)` with `F^b = F^u` inside the either-positive region.
    pub locus: Vec<(f64, f64)>,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Grid `p = 1/2 + i * step` strictly inside `(1/2, 1)` on both axes.
pub fn region_map(beta: f64, step: f64) -> Result<RegionMap, SweepError> {
    InformationEnvironment::new(beta, 0.75, 0.75)?;
    if !(step > 0.0 && step < 0.5) {
        return Err(SweepError::InvalidScenario(format!(
            "step {step} must lie in (0, 1/2)"
        )));
    }
    let grid: Vec<f64> = (1..)
        .map(|i| 0.5 + i as f64 * step)
        .take_while(|p| *p < 1.0 - 1e-12)
        .collect();
    let mut cells = Vec::with_capacity(grid.len() * grid.len());
    let mut locus = Vec::new();
    for &p_y in &grid {
        for &p_x in &grid {
            let env = InformationEnvironment::new(beta, p_x, p_y)?;
            cells.push(RegionCell {
                p_x,
                p_y,
                case: classify_case(&env),
                delta: delta(&env),
            });
        }
        if let Some(p_x) = critical_px(beta, p_y) {
            locus.push((p_x, p_y));
        }
    }
    Ok(RegionMap {
        beta,
        step,
        cells,
        locus,
    })
}

/// Writes `kind, p_x, p_y, case, delta, delta_sign`; `kind` is `cell` or
/// `locus`. Locus rows carry `delta_sign = 0` and a `delta` within the
/// bisection tolerance of zero.
pub fn write_region_csv<W: Write>(out: W, map: &RegionMap) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "p_x", "p_y", "case", "delta", "delta_sign"])?;
    let sig = |v: f64| fmt_sig(v, 12);
    for c in &map.cells {
        w.write_record([
            "cell".to_string(),
            sig(c.p_x),
            sig(c.p_y),
            c.case.name().to_string(),
            sig(c.delta),
            sign(c.delta).to_string(),
        ])?;
    }
    for &(p_x, p_y) in &map.locus {
        let env = InformationEnvironment::new(map.beta, p_x, p_y)?;
        w.write_record([
            "locus".to_string(),
            sig(p_x),
            sig(p_y),
            classify_case(&env).name().to_string(),
            sig(delta(&env)),
            "0".to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
