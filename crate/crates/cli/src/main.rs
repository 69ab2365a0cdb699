use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nlse_cli::{
    cmd_associate, cmd_classify, cmd_reduce, cmd_simulate, cmd_verify, load_problem, CliError, InitKind, SimulateArgs,
    VerificationReport,
};

#[derive(Parser)]
#[command(
    name = "nlse-verify",
    version,
    about = "Verify conservation laws, symmetries and reductions of the cubic Schrödinger equation"
)]
struct Cli {
    /// Problem file; the shipped cubic_nlse.prob when omitted.
    #[arg(long, global = true)]
    problem: Option<PathBuf>,
    /// Tolerance for numeric verdicts (classify: 1e-10, simulate: 1e-6).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Use the printed readings of items that have one.
    #[arg(long, global = true)]
    printed_variants: bool,
    /// Also write the report as JSON.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    PlaneWave,
    Random,
    Gaussian,
    Case1Exact,
}

impl From<Init> for InitKind {
    fn from(i: Init) -> Self {
        match i {
            Init::PlaneWave => InitKind::PlaneWave,
            Init::Random => InitKind::Random,
            Init::Gaussian => InitKind::Gaussian,
            Init::Case1Exact => InitKind::Case1Exact,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Multiplier, conservation-law and symmetry checks.
    Verify,
    /// Association matrix of symmetries and conservation laws.
    Associate,
    /// Double reduction along the time-translation plus phase-rotation generator.
    Reduce {
        /// Rational value for the shift c (symbolic when omitted).
        #[arg(long = "c")]
        c: Option<String>,
        #[arg(long)]
        case: Option<u32>,
    },
    /// Integrate the equation numerically and monitor the conserved quantities.
    Simulate {
        #[arg(long = "N", default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        t_end: f64,
        /// Domain length (default 8π).
        #[arg(long = "L")]
        length: Option<f64>,
        #[arg(long, value_enum, default_value = "plane-wave")]
        init: Init,
        #[arg(long, default_value_t = 0.5)]
        amplitude: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 10)]
        sample_every: usize,
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Classify the closed-form candidates of the problem file.
    Classify {
        #[arg(long)]
        label: Option<String>,
    },
}

fn execute(cli: &Cli) -> Result<VerificationReport, CliError> {
    let problem = load_problem(cli.problem.as_deref())?;
    let printed = cli.printed_variants;
    match &cli.command {
        Command::Verify => cmd_verify(&problem, printed),
        Command::Associate => cmd_associate(&problem, printed),
        Command::Reduce { c, case } => cmd_reduce(&problem, printed, c.as_deref(), *case, cli.seed, cli.tol),
        Command::Simulate {
            n,
            dt,
            t_end,
            length,
            init,
            amplitude,
            k,
            sample_every,
            csv_out,
        } => {
            let args = SimulateArgs {
                n: *n,
                dt: *dt,
                t_end: *t_end,
                length: *length,
                init: (*init).into(),
                amplitude: *amplitude,
                k: *k,
                sample_every: *sample_every,
                csv_out: csv_out.clone(),
            };
            cmd_simulate(&problem, printed, &args, cli.seed, cli.tol).map(|(rep, _)| rep)
        }
        Command::Classify { label } => cmd_classify(&problem, printed, label.as_deref(), cli.seed, cli.tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = report.write_records(io::stdout().lock()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    let _ = writeln!(io::stderr(), "{}", report.summary_line());
    if report.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
