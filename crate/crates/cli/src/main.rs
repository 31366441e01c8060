use clap::{Parser, Subcommand};
use cvqkd_cli::commands::{analyze, mc_validate, point, sweep, synth};

/// Secret-key rates and detector-noise analysis for Gaussian-modulated
/// coherent-state CV-QKD.
#[derive(Parser)]
#[command(name = "cvqkd", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Key rate at one operating point.
    Point(point::PointArgs),
    /// Key rate versus distance with the modulation variance optimized.
    Sweep(sweep::SweepArgs),
    /// Monte Carlo check of the mutual-information formula.
    McValidate(mc_validate::McValidateArgs),
    /// Variance decomposition, QCNR, autocorrelation, and histograms for
    /// trace files.
    Analyze(analyze::AnalyzeArgs),
    /// Generate a synthetic homodyne trace file.
    Synth(synth::SynthArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            e.print().expect("stderr is writable");
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Point(args) => point::run(args),
        Command::Sweep(args) => sweep::run(args),
        Command::McValidate(args) => mc_validate::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Synth(args) => synth::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
