use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use toml::{Table, Value};

use crate::{commands, parse_assignment, ArtifactWriter, CliError, Meta, RunConfig, THREADS_VAR};

#[derive(Debug, Parser)]
#[command(name = "harper", version, about = "Spectra, eigenvectors and identities of the non-self-adjoint almost Mathieu family")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command; each overrides the key of the same name.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML file with flat keys
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// `golden`, `p/q` or a decimal
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub half_width: Option<i64>,
    #[arg(long, global = true)]
    pub phases: Option<i64>,
    #[arg(long, global = true)]
    pub seed: Option<i64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Any other key, as key=value; repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Overrides {
    pub fn table(&self) -> Result<Table, CliError> {
        let mut t = Table::new();
        for s in &self.set {
            let (k, v) = parse_assignment(s)?;
            t.insert(k, v);
        }
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                t.insert(k.into(), v);
            }
        };
        put("alpha", self.alpha.clone().map(Value::String));
        put("beta", self.beta.map(Value::Float));
        put("delta", self.delta.map(Value::Float));
        put("gamma", self.gamma.map(Value::Float));
        put("half_width", self.half_width.map(Value::Integer));
        put("phases", self.phases.map(Value::Integer));
        put("seed", self.seed.map(Value::Integer));
        put("out", self.out.as_ref().map(|p| Value::String(p.display().to_string())));
        Ok(t)
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Eigenvalue cloud of phase-swept truncations, with the level curve
    Spectrum,
    /// Density of states from a periodic approximant, its gaps and critical points
    Dos,
    /// Logarithmic potential on a square grid
    Potential,
    /// The level curve Φ = log(βδ)
    Levelcurve,
    /// Decaying eigenvector with eigenvalue on the level curve nearest z
    Eigvec,
    /// Transfer recursion orbit and Wronskian check
    Transfer,
    /// Resolvent Fourier coefficients and the polynomial family at z
    Resolvent,
    /// Kernel of the Fredholm operator built from a mode
    Fredholm,
    /// Run the verification suite
    Verify {
        /// Algebraic and recursion checks only
        #[arg(long)]
        quick: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Dos => "dos",
            Command::Potential => "potential",
            Command::Levelcurve => "levelcurve",
            Command::Eigvec => "eigvec",
            Command::Transfer => "transfer",
            Command::Resolvent => "resolvent",
            Command::Fredholm => "fredholm",
            Command::Verify { .. } => "verify",
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

/// Parses arguments, runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    let cfg = match cli.overrides.table().and_then(|t| RunConfig::load(cli.overrides.config.as_deref(), t)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match commands::execute(&cli.command, &cfg) {
        Ok(files) => {
            for f in files {
                println!("{}", cfg.out.join(f).display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 3 {
                let written = ArtifactWriter::new(&cfg.out, Meta::new(cli.command.name(), &cfg))
                    .and_then(|mut w| w.json("error.json", &json!({ "error": e.to_string() })).map(|_| ()));
                if let Err(w) = written {
                    eprintln!("error: could not write diagnostic: {w}");
                }
            }
            e.exit_code()
        }
    }
}
