use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hasse_lab::config::parse_config;
use hasse_lab::report::{emit_report, run_command, Command, Format};

#[derive(Parser)]
#[command(name = "hasse-lab", version, about = "Circle-method experiments over number fields")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Worker threads (overrides the configuration).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Random seed (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Zero all wall-times so repeated runs are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Field invariants and prime factorizations.
    FieldInfo,
    /// Exact counts N_m(P).
    Count,
    /// Exponential sum T_P(alpha) and arc classification.
    Expsum,
    /// Local densities and the truncated singular series.
    Local,
    /// Archimedean density estimators.
    Arch,
    /// Counts against the product of local densities.
    Hasse,
    /// Bound tower table.
    Bounds,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    Json,
    Csv,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::FieldInfo => Command::FieldInfo,
            Cmd::Count => Command::Count,
            Cmd::Expsum => Command::Expsum,
            Cmd::Local => Command::Local,
            Cmd::Arch => Command::Arch,
            Cmd::Hasse => Command::Hasse,
            Cmd::Bounds => Command::Bounds,
        }
    }
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let Some(config_path) = cli.config.as_deref() else {
        eprintln!("error: --config FILE is required");
        return ExitCode::from(1);
    };
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return ExitCode::from(1);
        }
    };
    let mut validated = match parse_config(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{}: {e}", config_path.display());
            return ExitCode::from(1);
        }
    };
    let run = &mut validated.config.run;
    if let Some(s) = cli.seed {
        run.seed = s;
    }
    if let Some(t) = cli.threads {
        run.threads = t;
    }
    run.deterministic |= cli.deterministic;
    if run.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(run.threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    let cmd: Command = cli.command.into();
    let report = run_command(&validated, cmd);
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    if let Err(e) = write_out(cli.out.as_deref(), &emit_report(&report, format)) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    // the ratio table accompanies the JSON report of `hasse`
    if let (Command::Hasse, Format::Json, Some(out)) = (cmd, format, cli.out.as_deref()) {
        if let Err(e) = std::fs::write(out.with_extension("csv"), emit_report(&report, Format::Csv)) {
            eprintln!("error: cannot write ratio table: {e}");
            return ExitCode::from(1);
        }
    }
    for e in &report.errors {
        eprintln!("{}: {}", e.stage, e.message);
    }
    if report.budget_exceeded() {
        ExitCode::from(2)
    } else if !report.errors.is_empty() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
