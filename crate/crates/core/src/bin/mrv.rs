use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use miura_reciprocal::numerics::transport::Interpolation;
use miura_reciprocal::numerics::{csv, NumericConfig};
use miura_reciprocal::suite::{run, Command, SuiteOptions};
use miura_reciprocal::systems::{build_cbs_family, build_ch_system, build_mch_system, build_mcbs_family};

#[derive(Parser)]
#[command(name = "mrv", version, about = "Verify the CH(2+1)/mCH(2+1) reciprocal and Miura links")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Number of components.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    n: u8,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized engine checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Record wall-clock times (reports are then not reproducible).
    #[arg(long, global = true)]
    timings: bool,
    /// Resolution ladder, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    ladder: Option<Vec<usize>>,
    /// Time step as a multiple of h^3.
    #[arg(long, global = true)]
    cfl: Option<f64>,
    /// Final time of the standalone Dym run.
    #[arg(long, global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true, value_enum)]
    interp: Option<Interp>,
    /// Write the convergence tables as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Interp {
    Lagrange,
    Cubic,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    VerifyHierarchies,
    VerifyReciprocal,
    VerifyMiura,
    VerifyLax,
    VerifyComposite,
    VerifyReductions,
    NumericCheck,
    All,
    /// Print a system in the plain-text format.
    Emit {
        #[arg(value_enum)]
        system: Emitted,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emitted {
    Ch,
    Mch,
    XForm,
    MDefs,
    Cbs,
    Mcbs,
    MDefsModified,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("mrv: {msg}");
    ExitCode::from(2)
}

fn write(path: &PathBuf, text: &str) -> Result<(), ExitCode> {
    std::fs::write(path, text).map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let n = cli.n as usize;
    let command = match cli.cmd {
        Cmd::VerifyHierarchies => Command::Hierarchies,
        Cmd::VerifyReciprocal => Command::Reciprocal,
        Cmd::VerifyMiura => Command::Miura,
        Cmd::VerifyLax => Command::Lax,
        Cmd::VerifyComposite => Command::Composite,
        Cmd::VerifyReductions => Command::Reductions,
        Cmd::NumericCheck => Command::Numeric,
        Cmd::All => Command::All,
        Cmd::Emit { system } => {
            let text = match system {
                Emitted::Ch => build_ch_system(n).map(|s| s.to_text()),
                Emitted::Mch => build_mch_system(n).map(|s| s.to_text()),
                Emitted::XForm => build_cbs_family(n).map(|f| f.x_form.to_text()),
                Emitted::MDefs => build_cbs_family(n).map(|f| f.m_defs.to_text()),
                Emitted::Cbs => build_cbs_family(n).map(|f| f.cbs.to_text()),
                Emitted::Mcbs => build_mcbs_family(n).map(|f| f.x_form.to_text()),
                Emitted::MDefsModified => build_mcbs_family(n).map(|f| f.m_defs.to_text()),
            };
            let text = match text {
                Ok(t) => t,
                Err(e) => return config_error(e),
            };
            return match &cli.out {
                Some(p) => write(p, &text).map_or_else(|c| c, |_| ExitCode::SUCCESS),
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
            };
        }
    };

    let mut numeric = NumericConfig::default();
    if let Some(l) = cli.ladder {
        numeric.ladder = l;
    }
    if let Some(c) = cli.cfl {
        numeric.dym.cfl = c;
    }
    if let Some(t) = cli.t_end {
        numeric.t_end = t;
    }
    if let Some(i) = cli.interp {
        numeric.interpolation = match i {
            Interp::Lagrange => Interpolation::Lagrange8,
            Interp::Cubic => Interpolation::MonotoneCubic,
        };
    }
    if let Err(e) = numeric.validate() {
        return config_error(e);
    }
    let opts = SuiteOptions { n, seed: cli.seed, timings: cli.timings, numeric, ..SuiteOptions::default() };
    let out = run(command, &opts);
    print!("{}", out.report.summary());
    if let Some(p) = &cli.out {
        if let Err(c) = write(p, &out.report.to_json()) {
            return c;
        }
    }
    if let Some(p) = &cli.csv {
        if let Err(c) = write(p, &csv(&out.tables)) {
            return c;
        }
    }
    if out.report.budget_exhausted() {
        ExitCode::from(3)
    } else if out.report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
