//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when any tolerance check fails,
//! 2 on configuration, domain or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracmono::harness::{self, builtin, builtin_names, builtin_suite, emit, Format, Report, Scenario};
use fracmono::lift::{convergence_report, LiftOptions};
use fracmono::{Error, Result, TimePowerSolution};

#[derive(Parser)]
#[command(name = "fracmono", version, about = "Monotone functionals of fractional heat extensions, checked numerically")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Override every quadrature resolution (even, 8..=512).
    #[arg(long, global = true)]
    res: Option<usize>,
    /// Override a named tolerance, e.g. `--tol monotone=1e-9` (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Number of scenarios run concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in self checks.
    Check {
        #[command(subcommand)]
        what: CheckWhat,
    },
    /// Run a scenario file, a builtin scenario name, or `suite`.
    Run {
        target: String,
        /// Write `<name>.json`, `<name>.csv` and `<name>.svg` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter sweeps.
    Sweep {
        #[command(subcommand)]
        what: SweepWhat,
    },
    /// Write one report in one format.
    Emit {
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: PathBuf,
        /// Scenario to run (file or builtin name).
        #[arg(long, conflicts_with = "from")]
        scenario: Option<String>,
        /// Previously written json report.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// List the builtin scenarios.
    List,
}

#[derive(Subcommand)]
enum CheckWhat {
    /// Kernel normalisations and constants.
    Kernels,
}

#[derive(Subcommand)]
enum SweepWhat {
    /// The lift convergence table `C_n E_n -> E`.
    Lift {
        /// Comma-separated dimensions `n`.
        #[arg(long, value_delimiter = ',', default_values_t = harness::DEFAULT_N_LIST)]
        n: Vec<usize>,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.4])]
        r: Vec<f64>,
        /// Scenario providing the field (self-similar or shifted family).
        #[arg(long, default_value = "shifted_s0.5_p2")]
        scenario: String,
    },
}

fn load(target: &str, global: &Global) -> Result<Vec<Scenario>> {
    let mut list = if target == "suite" {
        builtin_suite()
    } else if let Some(sc) = builtin(target) {
        vec![sc]
    } else {
        let path = PathBuf::from(target);
        if !path.exists() {
            return Err(Error::config(
                "scenario",
                format!("`{target}` is neither a file nor a builtin ({})", builtin_names().join(", ")),
            ));
        }
        vec![Scenario::parse(&std::fs::read_to_string(path)?)?]
    };
    for sc in &mut list {
        if let Some(res) = global.res {
            sc.resolutions = harness::Resolutions::uniform(res);
        }
        for spec in &global.tol {
            let (k, v) = spec
                .split_once('=')
                .ok_or_else(|| Error::config("--tol", format!("expected NAME=VALUE, got `{spec}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::config("--tol", format!("`{v}` is not a number")))?;
            sc.set_tol(k.trim(), v)?;
        }
        sc.validate()?;
    }
    Ok(list)
}

fn run_all(list: &[Scenario], parallel: usize) -> Result<Vec<Report>> {
    #[cfg(feature = "parallel")]
    if parallel > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| Error::config("--parallel", e.to_string()))?;
        return pool.install(|| list.par_iter().map(harness::run).collect());
    }
    let _ = parallel;
    list.iter().map(harness::run).collect()
}

fn print_report(r: &Report) {
    println!(
        "{} [{}] {} ({:.1} s)",
        if r.passed() { "PASS" } else { "FAIL" },
        r.scenario.family.name(),
        r.scenario.name,
        r.provenance.wall_time_s
    );
    for c in &r.checks {
        println!("  {}", c.line());
    }
    for s in &r.skipped {
        println!("  SKIP {}: {}", s.name, s.reason);
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { what: CheckWhat::Kernels } => {
            let checks = harness::kernel_checks()?;
            for c in &checks {
                println!("{}", c.line());
            }
            Ok(checks.iter().all(|c| c.passed))
        }
        Command::List => {
            for name in builtin_names() {
                println!("{name}");
            }
            Ok(true)
        }
        Command::Run { target, out } => {
            let list = load(&target, &cli.global)?;
            let reports = run_all(&list, cli.global.parallel)?;
            for r in &reports {
                print_report(r);
                if let Some(dir) = &out {
                    std::fs::create_dir_all(dir)?;
                    for (fmt, ext) in [(Format::Json, "json"), (Format::Csv, "csv"), (Format::Svg, "svg")] {
                        emit(r, fmt, &dir.join(format!("{}.{ext}", r.scenario.name)))?;
                    }
                }
            }
            Ok(reports.iter().all(Report::passed))
        }
        Command::Emit {
            format,
            out,
            scenario,
            from,
        } => {
            let fmt: Format = format.parse()?;
            let report = match (scenario, from) {
                (_, Some(path)) => serde_json::from_str::<Report>(&std::fs::read_to_string(path)?)?,
                (Some(target), None) => {
                    let list = load(&target, &cli.global)?;
                    if list.len() != 1 {
                        return Err(Error::config("--scenario", "emit takes a single scenario"));
                    }
                    harness::run(&list[0])?
                }
                (None, None) => return Err(Error::config("emit", "needs --scenario or --from")),
            };
            emit(&report, fmt, &out)?;
            Ok(report.passed())
        }
        Command::Sweep {
            what: SweepWhat::Lift { n, r, scenario },
        } => {
            let list = load(&scenario, &cli.global)?;
            let sc = &list[0];
            let c = match sc.family {
                harness::Family::SelfSimilar => 0.0,
                harness::Family::Shifted { c } => c,
                _ => return Err(Error::config("--scenario", "the lift sweep needs a self_similar or shifted scenario")),
            };
            let sol = TimePowerSolution::exact(sc.params, c)?;
            let ext = sol.extension();
            let opts = LiftOptions {
                res: sc.resolutions.lift,
                eps: sc.lift_eps,
            };
            let table = convergence_report(&sol, &ext, &sc.params, &r, &n, opts)?;
            println!("R,n,CnEn,E,energy_gap,A_n,dE_dR,a_gap,B_n,fd_derivative,theorem_residual");
            for row in &table.rows {
                println!(
                    "{:?},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                    row.r,
                    row.n,
                    row.cn_en,
                    row.e_script,
                    row.energy_gap,
                    row.a_n,
                    row.d_script,
                    row.a_gap,
                    row.b_n,
                    row.fd_derivative,
                    row.theorem_residual
                );
            }
            for fit in &table.b_decay {
                println!("# R = {}: |B_n| ~ {:.4e} n^-{:.4}", fit.r, fit.constant, fit.exponent);
            }
            let tol = sc.tol("lift_theorem");
            Ok(table.rows.iter().all(|row| row.theorem_residual <= tol))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
