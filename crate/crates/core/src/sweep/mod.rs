//! Parameter sweeps over scenario files and maps of the precision plane,
//! written as CSV with 12 significant digits.

mod region;
mod scenario;
mod table;

pub use region::{region_map, write_region_csv, RegionCell, RegionMap};
pub use scenario::{bundled_names, parse_number, Axis, Mode, Number, Output, Scenario, SweepRange};
pub use table::{
    flag_jumps, run_sweep, write_jumps_csv, write_sweep_csv, Jump, SweepRow, SweepTable,
    JUMP_FLOOR, JUMP_RATIO, SWEEP_COLUMNS,
};
