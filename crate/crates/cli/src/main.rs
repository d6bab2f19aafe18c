use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use liability_core::equilibrium::critical_fines;
use liability_core::model::{critical_px, InformationEnvironment};
use liability_core::oracle::{property_sweep, PROPERTY_IDS};
use liability_core::sweep::{
    bundled_names, parse_number, region_map, run_sweep, write_jumps_csv, write_region_csv,
    write_sweep_csv, Output, Scenario,
};

/// Designer-optimal liability equilibria: sweeps, region maps and checks.
#[derive(Debug, Parser)]
#[command(name = "liability", version)]
struct Cli {
    /// Worker threads; all output is identical for any count.
    #[arg(long, global = true, env = "LIABILITY_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file, or a bundled scenario by name (fig2a, fig2b,
    /// fig3, fig3b), and write its table as CSV.
    Sweep {
        scenario: String,
        /// Table path. Flagged jumps go to `<stem>.jumps.csv` beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Case labels and the sign of F^b - F^u over the precision plane.
    RegionMap {
        #[arg(long, value_parser = number)]
        beta: f64,
        #[arg(long, value_parser = number)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run randomized property suites against the solver.
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to these property ids; all by default.
        #[arg(long = "property")]
        properties: Vec<String>,
    },
    /// Print the critical verifiable precision and the critical fines.
    ShowThresholds {
        #[arg(long, value_parser = number)]
        beta: f64,
        #[arg(long, value_parser = number)]
        py: f64,
        /// Also print the fines at this verifiable precision.
        #[arg(long, value_parser = number)]
        px: Option<f64>,
    },
}

fn number(s: &str) -> Result<f64, String> {
    parse_number(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn jumps_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.jumps.csv"))
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.exists() {
        return Scenario::from_file(path).with_context(|| format!("loading {arg}"));
    }
    if bundled_names().contains(&arg) {
        return Ok(Scenario::bundled(arg)?);
    }
    bail!(
        "{arg} is neither a file nor a bundled scenario ({})",
        bundled_names().join(", ")
    )
}

fn sweep(scenario: &str, out: &Path) -> Result<bool> {
    let s = load_scenario(scenario)?;
    let table = run_sweep(&s)?;
    let table_wanted = s.outputs.contains(&Output::Table);
    if table_wanted {
        write_sweep_csv(create(out)?, &table)?;
    }
    if s.outputs.contains(&Output::Jumps) {
        let path = if table_wanted {
            jumps_path(out)
        } else {
            out.to_path_buf()
        };
        write_jumps_csv(create(&path)?, &table)?;
    }
    let errors = table.rows.iter().filter(|r| r.status() == "error").count();
    println!(
        "{}: {} rows, {} jumps, {} solver errors",
        s.name,
        table.rows.len(),
        table.jumps().count(),
        errors
    );
    for r in table.jumps() {
        println!(
            "  {} {}={} welfare={:.12} {:?}",
            r.mode.name(),
            s.sweep.axis.name(),
            r.value,
            r.welfare().unwrap_or(f64::NAN),
            r.jump.expect("filtered on jumps")
        );
    }
    Ok(errors == 0)
}

fn verify(trials: u64, seed: u64, properties: &[String]) -> Result<bool> {
    let ids: Vec<&str> = if properties.is_empty() {
        PROPERTY_IDS.to_vec()
    } else {
        properties.iter().map(String::as_str).collect()
    };
    let mut all = true;
    for id in ids {
        let r = property_sweep(id, trials, seed)?;
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {id} ({} trials, {} failures)",
            r.trials, r.failures
        );
        if let Some(c) = &r.counterexample {
            println!("  {c}");
        }
        all &= r.passed;
    }
    Ok(all)
}

fn show_thresholds(beta: f64, py: f64, px: Option<f64>) -> Result<bool> {
    InformationEnvironment::new(beta, 0.75, py)?;
    match critical_px(beta, py) {
        Some(p) => {
            let (fu, fb) = critical_fines(&InformationEnvironment::new(beta, p, py)?);
            println!("p_x* = {p:.12}");
            println!("F^u(p_x*) = {fu:.12}");
            println!("F^b(p_x*) = {fb:.12}");
        }
        None => println!("p_x* = none (no root inside the either-positive region)"),
    }
    if let Some(px) = px {
        let (fu, fb) = critical_fines(&InformationEnvironment::new(beta, px, py)?);
        println!("F^u({px}) = {fu:.12}");
        println!("F^b({px}) = {fb:.12}");
    }
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Sweep { scenario, out } => sweep(&scenario, &out),
        Command::RegionMap { beta, step, out } => {
            let map = region_map(beta, step)?;
            write_region_csv(create(&out)?, &map)?;
            println!(
                "{} cells, {} locus points",
                map.cells.len(),
                map.locus.len()
            );
            Ok(true)
        }
        Command::Verify {
            trials,
            seed,
            properties,
        } => verify(trials, seed, &properties),
        Command::ShowThresholds { beta, py, px } => show_thresholds(beta, py, px),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
