use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nematic::coefficients::{check_dissipation, check_parodi, PARODI_TOL_DEFAULT};
use nematic::config::{parse_config, RunConfig};
use nematic::diagnostics::EnergyReport;
use nematic::field::{Field, VectorField};
use nematic::galerkin::{
    basis_field, compare_trajectories, enumerate_basis, integrate_counterpart, integrate_ode,
    Counterpart, GalerkinSystem, MomentumForm,
};
use nematic::grid::PeriodicGrid;
use nematic::{checkpoint, presets, solver, verify, NematicError};

#[derive(Parser)]
#[command(name = "nematic", about = "Pseudo-spectral nematic liquid crystal flow solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-step the coupled system and write diagnostics
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for CSV and checkpoints
        #[arg(long, default_value = ".")]
        output: PathBuf,
        /// Override the configured seed
        #[arg(long)]
        seed: Option<u64>,
        /// Bypass the coefficient admissibility gate (recorded in the CSV header)
        #[arg(long)]
        force: bool,
        /// Continue from a checkpoint instead of the configured preset
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Print the admissibility report for the configured coefficients
    CheckCoefficients {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the seeded self-check battery
    Verify,
    /// Integrate the low-mode ODE oracle and its pseudo-spectral
    /// counterpart from the configured initial data and report the
    /// amplitude discrepancies
    OracleCompare {
        #[arg(long)]
        config: PathBuf,
        /// Number of basis modes
        #[arg(long, default_value_t = 4)]
        modes: usize,
    },
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_BLOWUP: u8 = 3;
const EXIT_CONFIG: u8 = 4;

fn exit_for(err: &NematicError) -> u8 {
    match err {
        NematicError::Config(_) | NematicError::Io(_) | NematicError::Checkpoint(_) => EXIT_CONFIG,
        NematicError::BlowUp { .. }
        | NematicError::CflViolation { .. }
        | NematicError::RhoBounds { .. } => EXIT_BLOWUP,
        _ => EXIT_VALIDATION,
    }
}

fn fail(err: NematicError) -> ExitCode {
    match &err {
        NematicError::Config(list) => {
            eprintln!("configuration errors:");
            for e in list {
                eprintln!("  {e}");
            }
        }
        other => eprintln!("error: {other}"),
    }
    ExitCode::from(exit_for(&err))
}

fn load_config(path: &PathBuf) -> Result<RunConfig, NematicError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

fn cmd_run(
    config: PathBuf,
    output: PathBuf,
    seed: Option<u64>,
    force: bool,
    resume: Option<PathBuf>,
) -> Result<(), NematicError> {
    let mut cfg = load_config(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let c = cfg.coefficients()?;
    let initial = if let Some(path) = resume {
        checkpoint::load(&path, cfg.m1, cfg.m2)?
    } else if let Some(path) = &cfg.checkpoint {
        checkpoint::load(path, cfg.m1, cfg.m2)?
    } else {
        presets::make_initial_data(&cfg)?
    };
    let t0 = initial.t;
    if t0 >= cfg.t_final {
        return Err(NematicError::Unsatisfiable(format!(
            "checkpoint time {t0} is at or past the horizon {}",
            cfg.t_final
        )));
    }
    std::fs::create_dir_all(&output)?;
    let stepper = cfg.stepper();
    eprintln!(
        "run: dim={} n={} dt={:.3e} T={} scheme={:?}",
        cfg.dim, cfg.n, cfg.dt, cfg.t_final, cfg.scheme
    );
    let out = solver::run(initial, &c, &stepper, cfg.t_final, force)?;
    let csv_path = output.join(&cfg.csv);
    let mut csv = String::new();
    if force {
        csv.push_str("# admissibility gate bypassed (--force)\n");
    }
    csv.push_str(EnergyReport::csv_header());
    csv.push('\n');
    for rep in &out.reports {
        csv.push_str(&rep.csv_row());
        csv.push('\n');
    }
    std::fs::write(&csv_path, csv)?;
    checkpoint::save(&output.join("final.elcs"), &out.final_state)?;
    eprintln!(
        "done: t={} reports={} csv={}",
        out.final_state.t,
        out.reports.len(),
        csv_path.display()
    );
    Ok(())
}

fn cmd_check_coefficients(config: PathBuf) -> Result<(), NematicError> {
    let cfg = load_config(&config)?;
    let c = cfg.coefficients()?;
    let report = check_dissipation(&c);
    let (parodi, parodi_ok) = check_parodi(&c, PARODI_TOL_DEFAULT);
    println!("lambda1 = {}", c.lambda1());
    println!("lambda2 = {}", c.lambda2());
    println!("parodi_residual = {parodi:.3e} ({})", if parodi_ok { "ok" } else { "violated" });
    println!("regime = {}", report.regime_2d);
    if report.ok() {
        println!("admissible");
        Ok(())
    } else {
        for v in &report.violations {
            println!("violated: {v}");
        }
        Err(NematicError::Inadmissible(report.violations))
    }
}

fn cmd_verify() -> Result<(), NematicError> {
    let mut failures = Vec::new();
    for (name, result) in verify::run_battery() {
        match result {
            Ok(()) => println!("ok      {name}"),
            Err(msg) => {
                println!("FAILED  {name}: {msg}");
                failures.push(name.to_string());
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(NematicError::Unsatisfiable(format!(
            "{} verification check(s) failed",
            failures.len()
        )))
    }
}

fn cmd_oracle_compare(config: PathBuf, modes: usize) -> Result<(), NematicError> {
    let cfg = load_config(&config)?;
    let c = cfg.coefficients()?;
    let initial = presets::make_initial_data(&cfg)?;
    let grid = PeriodicGrid::square(cfg.dim, cfg.n)?;
    // the counterpart projection assumes constant density
    let rho0 = Field::constant(grid, 1.0);
    let mode_list = enumerate_basis(cfg.dim, modes);
    let basis: Vec<VectorField> = mode_list.iter().map(|m| basis_field(m, grid)).collect();
    let mut sys = GalerkinSystem::new(
        grid,
        modes,
        c,
        MomentumForm::Anse,
        rho0.clone(),
        initial.d.clone(),
        &initial.u,
    )?;
    let dt = cfg.dt;
    let traj_oracle = integrate_ode(&mut sys, dt, cfg.t_final)?;
    let mut cp = Counterpart {
        u: initial.u.clone(),
        rho: rho0,
        d: initial.d.clone(),
    };
    let traj_spec = integrate_counterpart(
        &mut cp,
        &basis,
        &c,
        MomentumForm::Anse,
        cfg.dealias_factor,
        dt,
        cfg.t_final,
    )?;
    let cmp = compare_trajectories(&traj_oracle, &traj_spec);
    println!("modes = {modes}, dt = {dt:.3e}, T = {}", cfg.t_final);
    for (i, v) in cmp.per_mode_max.iter().enumerate() {
        println!("mode {i}: max |discrepancy| = {v:.6e}");
    }
    println!("max_discrepancy = {:.6e}", cmp.max_discrepancy);
    println!("l2_discrepancy = {:.6e}", cmp.l2_discrepancy);
    Ok(())
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("NEMATIC_THREADS") {
        if threads.parse::<usize>().is_err() {
            eprintln!("warning: NEMATIC_THREADS is not a number; ignoring");
        }
        // execution is single-threaded; any cap is trivially honored
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            output,
            seed,
            force,
            resume,
        } => cmd_run(config, output, seed, force, resume),
        Command::CheckCoefficients { config } => cmd_check_coefficients(config),
        Command::Verify => cmd_verify(),
        Command::OracleCompare { config, modes } => cmd_oracle_compare(config, modes),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => fail(err),
    }
}
