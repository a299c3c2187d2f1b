use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use zn_core::cli_report::{run, Check, Format, RunConfig};
use zn_core::collections::enumerate_collection;
use zn_core::exceptionality::verify_collection_exceptional;
use zn_core::fullness::{line_bundle_targets, pushforward_targets, verify_with, Generator, KPairing};
use zn_core::Result;

#[derive(Parser)]
#[command(name = "zn-verify", version, about = "Checks the invariant exceptional collections on Z_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Structured,
    Tabular,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Structured => Format::Structured,
            FormatArg::Tabular => Format::Tabular,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Number of light markings.
    #[arg(long)]
    n: usize,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tabular")]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// List the collection with its ordering levels.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Run selected checks.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of enumerate,invariance,windows,maxmin,exceptional,gram,fullness,dictionary.
        #[arg(long, value_delimiter = ',', default_value = "enumerate,invariance,windows,maxmin,exceptional,gram")]
        checks: Vec<String>,
        /// Also certify every L_{E,p} with |p| <= MAX_P.
        #[arg(long)]
        max_p: Option<i64>,
    },
    /// Export the Gram matrix as CSV with a header row of item labels.
    Gram {
        #[command(flatten)]
        common: Common,
    },
    /// Generate and verify fullness certificates.
    Fullness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_p: Option<i64>,
    },
    /// Run every check.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_p: Option<i64>,
    },
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| zn_core::Error::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_checks(common: &Common, checks: Vec<Check>, max_p: Option<i64>) -> Result<bool> {
    let config = RunConfig {
        n: common.n,
        checks,
        jobs: common.jobs,
        out: common.out.clone(),
        format: common.format.into(),
        max_p,
    };
    let report = run(&config)?;
    if common.out.is_none() {
        println!("{}", report.render(config.format)?);
    } else {
        print!("{}", report.to_table());
    }
    Ok(report.ok())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Enumerate { common } => {
            let c = enumerate_collection(common.n)?;
            let text = match Format::from(common.format) {
                Format::Structured => serde_json::to_string_pretty(&c.items).map_err(|e| zn_core::Error::Io(e.to_string()))?,
                Format::Tabular => {
                    c.items.iter().map(|x| format!("{}\t{}", x.label(), c.level[x])).collect::<Vec<_>>().join("\n")
                }
            };
            write_or_print(&common.out, &text)?;
            Ok(true)
        }
        Command::Verify { common, checks, max_p } => {
            let checks = checks.iter().map(|s| s.parse()).collect::<Result<Vec<Check>>>()?;
            run_checks(&common, checks, max_p)
        }
        Command::Gram { common } => {
            let r = verify_collection_exceptional(common.n)?;
            write_or_print(&common.out, &r.gram.to_csv())?;
            Ok(r.passed())
        }
        Command::Fullness { common, max_p } => {
            let Some(out) = &common.out else {
                return run_checks(&common, vec![Check::Fullness], max_p);
            };
            // with --out, write the certificates themselves
            let n = common.n;
            let mut targets = pushforward_targets(n)?;
            if let Some(m) = max_p {
                targets.extend(line_bundle_targets(n, m).into_iter().filter(|t| !targets.contains(t)).collect::<Vec<_>>());
            }
            let mut g = Generator::new(n)?;
            let mut k = KPairing::new(n)?;
            let mut certs = Vec::new();
            let mut ok = true;
            for t in &targets {
                let c = g.certificate(t)?;
                let check = verify_with(&c, &mut k)?;
                println!("{:<40} {:>6} nodes  {}", t.to_string(), check.nodes, if check.passed() { "PASS" } else { "FAIL" });
                ok &= check.passed();
                certs.push(c);
            }
            let json = serde_json::to_string_pretty(&certs).map_err(|e| zn_core::Error::Io(e.to_string()))?;
            write_or_print(&Some(out.clone()), &json)?;
            Ok(ok)
        }
        Command::Report { common, max_p } => run_checks(&common, Check::ALL.to_vec(), max_p),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
