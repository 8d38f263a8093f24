use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use lfscatter::reference::OaaAlgebra;
use lfscatter::run::{compare, run, sweep, Algorithm, Mode, RunConfig, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "lfscatter", version, about = "Quark scattering off a sampled colour field on a light-front lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve the initial state and write manifest.json, observables.csv and probabilities.csv.
    Run(RunArgs),
    /// Per-step relative deviation of run A against reference run B.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Output CSV; defaults to <A>/deviations.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// TOML run configuration. Flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// tts, trotter, exact or tts-matrix.
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Taylor truncation order.
    #[arg(long = "K")]
    k_max: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Trotter step size in GeV⁻¹ (defaults to ln2/Λ).
    #[arg(long)]
    tau_prime: Option<f64>,
    /// Number of measurement shots; implies --mode shots.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// statevector or shots.
    #[arg(long)]
    mode: Option<Mode>,
    /// exact or idealized amplification algebra for tts-matrix.
    #[arg(long)]
    oaa: Option<String>,
    /// Initial basis state as a bitstring, most significant qubit first.
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run n seeds concurrently, starting at --seed, into <out>/seed-<n>.
    #[arg(long)]
    sweep: Option<usize>,
}

fn resolve(args: &RunArgs) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_path(path).with_context(|| format!("reading {}", path.display()))?,
        None => RunConfig::default(),
    };
    let e = &mut config.engine;
    if let Some(a) = args.algorithm {
        e.algorithm = a;
    }
    if let Some(k) = args.k_max {
        e.k_max = k;
    }
    if let Some(s) = args.steps {
        e.steps = s;
    }
    if args.tau_prime.is_some() {
        e.tau_prime = args.tau_prime;
    }
    if let Some(shots) = args.shots {
        e.shots = Some(shots);
        if args.mode.is_none() {
            e.mode = Mode::Shots;
        }
    }
    if let Some(m) = args.mode {
        e.mode = m;
        if m == Mode::Statevector && args.shots.is_none() {
            e.shots = None;
        }
    }
    if let Some(o) = &args.oaa {
        e.oaa = match o.as_str() {
            "exact" => OaaAlgebra::Exact,
            "idealized" => OaaAlgebra::Idealized,
            other => bail!("unknown amplification algebra {other:?}"),
        };
    }
    if args.initial.is_some() {
        e.initial = args.initial.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output.dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn summary(m: &RunManifest) {
    println!(
        "{}: Λ = {:.9} GeV, τ = {:.6} GeV⁻¹, {} steps to x⁺ = {:.4} GeV⁻¹, {} qubits, {:.1} s",
        m.config.output.dir.display(),
        m.lambda,
        m.tau,
        m.steps,
        m.x_plus_final,
        m.qubits.total,
        m.wall_clock_seconds
    );
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let config = resolve(&args)?;
            match args.sweep {
                Some(0) => bail!("--sweep needs at least one seed"),
                Some(n) => sweep(&config, n)?.iter().for_each(summary),
                None => summary(&run(&config)?),
            }
        }
        Command::Compare { a, b, out } => {
            let out = out.unwrap_or_else(|| a.join(lfscatter::run::DEVIATIONS_FILE));
            let rows = compare(&a, &b, &out)?;
            let worst = rows.iter().flat_map(|r| r.values.iter().flatten()).fold(0.0f64, |m, v| m.max(*v));
            println!("{} steps compared, max relative deviation {worst:.3e}, written to {}", rows.len(), out.display());
        }
    }
    Ok(())
}
