//! `hvp`: triaxial material-point simulations of undrained peat.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hvp_core::io::{self, Alignment, SweepAxis};
use hvp_core::triaxial::{run, LoadProgram};
use hvp_core::verify::{run_suite, Suite};
use hvp_core::{Error, FlowRuleMode, MaterialParams};

#[derive(Parser)]
#[command(
    name = "hvp",
    version,
    about = "Finite-strain hyperviscoplastic peat model, triaxial material point"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlowRule {
    Original,
    Gated,
}

impl From<FlowRule> for FlowRuleMode {
    fn from(f: FlowRule) -> Self {
        match f {
            FlowRule::Original => FlowRuleMode::Original,
            FlowRule::Gated => FlowRuleMode::HeavisideGated,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    All,
    Tangent,
    Convergence,
    Dissipation,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Tangent => Suite::Tangent,
            SuiteArg::Convergence => Suite::Convergence,
            SuiteArg::Dissipation => Suite::Dissipation,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum By {
    Time,
    Strain,
}

impl From<By> for Alignment {
    fn from(b: By) -> Self {
        match b {
            By::Time => Alignment::Time,
            By::Strain => Alignment::Strain,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one load program and write the record as CSV.
    Simulate {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        program: PathBuf,
        #[arg(long, value_enum, default_value = "original")]
        flow_rule: FlowRule,
        /// Let the platen separate from the specimen on unloading.
        #[arg(long)]
        detach: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the numerical self-checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
    /// Vary one material constant and summarise peak q and irrecoverable strain.
    Sweep {
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        /// Defaults to the calibrated peat constants.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Defaults to the slow loading-unloading cycle to 20 %.
        #[arg(long)]
        program: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "original")]
        flow_rule: FlowRule,
        #[arg(long)]
        detach: bool,
        /// Write one record CSV per value into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Fit statistics of a simulated record against a measured curve.
    Compare {
        #[arg(long)]
        sim: PathBuf,
        #[arg(long)]
        exp: PathBuf,
        #[arg(long, value_enum, default_value = "time")]
        by: By,
    },
}

enum Failure {
    Input(String),
    Convergence(String),
    Verification(usize),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Convergence(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Convergence(m) => write!(f, "convergence failure: {m}"),
            Failure::Verification(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

fn failure_at(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| match classify(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn classify(e: Error) -> Failure {
    match e {
        Error::TimeStepUnderflow { .. } => Failure::Convergence(e.to_string()),
        e if e.is_recoverable() => Failure::Convergence(e.to_string()),
        e => Failure::Input(e.to_string()),
    }
}

fn load_program(path: &Path, detach: bool) -> Result<LoadProgram<f64>, Failure> {
    let mut prog = io::load_program(path).map_err(failure_at(path))?;
    if detach {
        prog.platen_detachment = true;
    }
    Ok(prog)
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate {
            params,
            program,
            flow_rule,
            detach,
            out,
        } => {
            let p = io::load_params(&params).map_err(failure_at(&params))?;
            let prog = load_program(&program, detach)?;
            let rec = run(&prog, &p, flow_rule.into()).map_err(classify)?;
            io::write_record(&out, &rec).map_err(failure_at(&out))?;
            println!(
                "{} rows, peak q {:.4} kPa, irrecoverable strain {:.4} %",
                rec.rows.len(),
                rec.peak_q(),
                rec.irrecoverable_strain()
            );
            Ok(())
        }
        Command::Verify { suite } => {
            let reports = run_suite(suite.into());
            for r in &reports {
                println!("{r}");
            }
            match reports.iter().filter(|r| !r.passed).count() {
                0 => Ok(()),
                n => Err(Failure::Verification(n)),
            }
        }
        Command::Sweep {
            axis,
            values,
            params,
            program,
            flow_rule,
            detach,
            out_dir,
        } => {
            let axis: SweepAxis = axis.parse().map_err(classify)?;
            let base = match &params {
                Some(path) => io::load_params(path).map_err(failure_at(path))?,
                None => MaterialParams::fitted_peat(),
            };
            let prog = match &program {
                Some(path) => load_program(path, detach)?,
                None => LoadProgram::equilibrium_test(true),
            };
            let runs =
                io::sweep(&base, axis, &values, &prog, flow_rule.into()).map_err(classify)?;
            println!("{axis},peak_q_kpa,irrecoverable_strain_pct");
            for r in &runs {
                let s = r.summary;
                println!("{},{},{}", s.value, s.peak_q, s.irrecoverable_strain);
            }
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
                for r in &runs {
                    let path = dir.join(format!("{axis}_{}.csv", r.summary.value));
                    io::write_record(&path, &r.record).map_err(failure_at(&path))?;
                }
            }
            Ok(())
        }
        Command::Compare { sim, exp, by } => {
            let s = io::read_record(&sim).map_err(failure_at(&sim))?;
            let e = io::read_experiment(&exp).map_err(failure_at(&exp))?;
            let m = io::compare(&s, &e, by.into()).map_err(classify)?;
            println!("{m}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // clap's own usage errors exit with 2, which is reserved for convergence failures
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hvp: {f}");
            ExitCode::from(f.code())
        }
    }
}
