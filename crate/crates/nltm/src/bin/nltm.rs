use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nltm::cli::{cmd_scatter, cmd_transfer, cmd_verify, RunContext};

/// Transfer matrices and scattering amplitudes for energy-dependent
/// nonlocal potentials in two dimensions.
#[derive(Parser)]
#[command(name = "nltm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to the TOML run configuration.
    #[arg(long, global = true, default_value = "nltm.toml")]
    config: PathBuf,

    /// Output directory (overrides NLTM_OUT and the config's output.dir).
    #[arg(long, global = true)]
    out: Option<String>,

    /// Worker thread count (0 = one per core). Outputs are identical for
    /// any value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Seed for the sampled certificates.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the truncated transfer matrix and report norms and tails.
    Transfer,
    /// Compute scattering amplitudes and cross-section tables.
    Scatter,
    /// Run the inequality certificates; exit 0 iff all pass.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: failed to configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let config_text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let ctx = match RunContext::new(&config_text, cli.out.as_deref(), cli.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Transfer => cmd_transfer(&ctx).map(|path| {
            println!("wrote {}", path.display());
            true
        }),
        Command::Scatter => cmd_scatter(&ctx).map(|path| {
            println!("wrote {}", path.display());
            true
        }),
        Command::Verify => cmd_verify(&ctx).map(|(path, pass)| {
            println!(
                "wrote {} ({})",
                path.display(),
                if pass { "all pass" } else { "FAILURES" }
            );
            pass
        }),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
