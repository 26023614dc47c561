use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entspec::error::Result;
use entspec::experiment::{
    emit_aux, emit_csv, emit_plot_data, load_config, run_appendix_b_repro, run_convergence_sweep,
    run_single, Statistic,
};
use entspec::rdm::Bipartition;
use entspec::semiclassics::{classical_probability, ClassicalOrbit};

const EXIT_CODE_HELP: &str = "EXIT CODES:
  0  success
  1  reproduction tolerances not met
  2  configuration / invalid input
  3  numerical failure
  4  resource limit exceeded
  5  i/o failure";

#[derive(Parser)]
#[command(
    name = "entspec",
    version,
    about = "Entanglement spectra of 1D few-particle states and their classical limits",
    after_help = EXIT_CODE_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Plot,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured modes and print energies, occupations and the
    /// entanglement entropy of the configured bipartition.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configured sweep and write comparison rows.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        /// Optional TSV file for auxiliary statistics (overlaps, EFP, ...).
        #[arg(long)]
        aux: Option<PathBuf>,
    },
    /// Recompute the boundary-asymptotics reference numbers and compare
    /// them with the recorded targets.
    ReproAppendixB,
    /// Emptiness formation probability of the configured interval
    /// (the bipartition block names the empty region B), by both routes.
    Efp {
        #[arg(long)]
        config: PathBuf,
    },
}

fn cmd_solve(config: PathBuf) -> Result<i32> {
    let cfg = load_config(&config)?;
    let modes =
        entspec::experiment::continuum_modes(&cfg.potential, &cfg.params, &cfg.mode_labels)?;
    let part = Bipartition::interval(cfg.bipartition.a_lo, cfg.bipartition.a_hi)?;
    println!("# config {}", cfg.config_hash);
    println!("{:>6} {:>18} {:>18} {:>18}", "eta", "energy", "lambda_11", "P_cl");
    for m in &modes {
        let o = entspec::rdm::overlap_matrix(std::slice::from_ref(m), &part)?;
        let lam = o.matrix[(0, 0)].re;
        let orbit = ClassicalOrbit::new(&cfg.potential, m.energy, &cfg.params)?;
        let pcl = classical_probability(&part, &orbit)?;
        println!("{:>6} {:>18.12} {:>18.12} {:>18.12}", m.eta, m.energy, lam, pcl);
    }
    let spec = entspec::rdm::rdm_spectrum_exact(&modes, &part)?;
    let entropy = entspec::rdm::entanglement_entropy(&spec)?;
    println!("# entanglement entropy = {entropy:.12} nats");
    if cfg.statistics.contains(&Statistic::Efp)
        || cfg.statistics.contains(&Statistic::Overlaps)
        || cfg.statistics.contains(&Statistic::CorrectedOccupation)
    {
        let result = run_single(&cfg)?;
        for a in &result.aux {
            println!(
                "# {} {} value={:.12e} reference={:.12e} deviation={:.3e}",
                a.statistic, a.label, a.value, a.reference, a.deviation
            );
        }
    }
    Ok(0)
}

fn cmd_sweep(
    config: PathBuf,
    out: PathBuf,
    format: OutputFormat,
    aux: Option<PathBuf>,
) -> Result<i32> {
    let cfg = load_config(&config)?;
    let result = run_convergence_sweep(&cfg)?;
    match format {
        OutputFormat::Csv => emit_csv(&result, &out)?,
        OutputFormat::Plot => emit_plot_data(&result, &out)?,
    }
    if let Some(aux_path) = aux {
        emit_aux(&result, &aux_path)?;
    }
    eprintln!(
        "wrote {} rows ({} aux) for config {} [entspec {}]",
        result.rows.len(),
        result.aux.len(),
        result.config_hash,
        result.tool_version
    );
    Ok(0)
}

fn cmd_repro() -> Result<i32> {
    let report = run_appendix_b_repro()?;
    println!("# appendix-b reproduction [entspec {}]", report.tool_version);
    println!("# config {}  runtime {:.3}s", report.config_hash, report.runtime_seconds);
    println!(
        "numeric     = {:+.5} {:+.5}i   target {:+.5} {:+.5}i   {}",
        report.numeric.re,
        report.numeric.im,
        report.target_numeric.re,
        report.target_numeric.im,
        if report.numeric_ok { "PASS" } else { "FAIL" }
    );
    println!(
        "asymptotic  = {:+.5} {:+.5}i   target {:+.5} {:+.5}i   {}",
        report.asymptotic.re,
        report.asymptotic.im,
        report.target_asymptotic.re,
        report.target_asymptotic.im,
        if report.asymptotic_ok { "PASS" } else { "FAIL" }
    );
    println!(
        "|numeric - asymptotic| = {:.3e}   |numeric| vs |target| agree: {}",
        report.internal_difference,
        if report.magnitudes_ok { "yes" } else { "no" }
    );
    Ok(if report.passes() { 0 } else { 1 })
}

fn cmd_efp(config: PathBuf) -> Result<i32> {
    let cfg = load_config(&config)?;
    let modes =
        entspec::experiment::continuum_modes(&cfg.potential, &cfg.params, &cfg.mode_labels)?;
    let b = (cfg.bipartition.a_lo, cfg.bipartition.a_hi);
    let det = entspec::efp::efp_determinant(&modes, b)?;
    let kernel = entspec::efp::CdKernel::new(modes)?;
    let fred = entspec::efp::efp_fredholm_converged(&kernel, b, 1e-6)?;
    println!("# config {}", cfg.config_hash);
    println!("B = [{}, {}]", b.0, b.1);
    println!("efp_determinant = {det:.12e}");
    println!("efp_fredholm    = {fred:.12e}");
    println!("|difference|    = {:.3e}", (det - fred).abs());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve { config } => cmd_solve(config),
        Command::Sweep {
            config,
            out,
            format,
            aux,
        } => cmd_sweep(config, out, format, aux),
        Command::ReproAppendixB => cmd_repro(),
        Command::Efp { config } => cmd_efp(config),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
