use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dauction::search::{default_report_grid, mine_ic_failures};
use dauction::verify::Check;
use dauction::{Grid, ValuationProfile};

use crate::config::{amount, Configured, GridConfig, MechanismConfig};
use crate::error::{CliError, CliResult};
use crate::repro::{render, ScenarioFile};
use crate::report::{PropertyResult, Report};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dauction", version, about = "Double-auction mechanisms and exhaustive property checks")]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a mechanism at one profile: sellers first, then buyers.
    Run {
        #[arg(long)]
        mechanism: PathBuf,
        #[arg(required = true, allow_hyphen_values = true)]
        profile: Vec<String>,
    },
    /// Run property checkers over a grid and write a report.
    Check {
        #[command(flatten)]
        scan: ScanArgs,
        /// Comma-separated subset of ic,ir,bb,nw,a1,a2,a3,lemma1,prop1,prop2,value_respecting.
        #[arg(long)]
        properties: Option<String>,
    },
    /// Search every grid profile for the most profitable misreport.
    Mine {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Reproduce the golden scenarios and print a pass/fail table.
    Repro {
        /// Print scenario names without running them.
        #[arg(long)]
        list: bool,
        /// Scenario file to use instead of the built-in set.
        #[arg(long)]
        scenarios: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub mechanism: PathBuf,
    /// Equispaced points per player; price neighbours are added.
    #[arg(long, conflicts_with = "grid_file")]
    pub grid: Option<usize>,
    /// TOML file with explicit grid points.
    #[arg(long)]
    pub grid_file: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Violation records kept per property.
    #[arg(long, default_value_t = 100)]
    pub max_violations: usize,
    /// Record wall-clock time per checker. Makes reports run-dependent.
    #[arg(long)]
    pub timing: bool,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Output goes to the given writers so tests can capture it.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_CLEAN };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> CliResult<i32> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build()?;
    // output is buffered so the writer need not cross into the pool
    let mut buf = Vec::new();
    let code = pool.install(|| match cli.command {
        Command::Run { mechanism, profile } => cmd_run(&mechanism, &profile, &mut buf),
        Command::Check { scan, properties } => {
            let checks = parse_properties(properties.as_deref())?;
            cmd_check(&scan, &checks, &mut buf)
        }
        Command::Mine { scan } => cmd_mine(&scan, &mut buf),
        Command::Repro { list, scenarios } => cmd_repro(list, scenarios.as_deref(), &mut buf),
    });
    stdout.write_all(&buf)?;
    code
}

pub fn parse_properties(csv: Option<&str>) -> CliResult<Vec<Check>> {
    let Some(csv) = csv else {
        return Ok(Check::ALL.to_vec());
    };
    let mut checks = csv
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Check>().map_err(|e| CliError::Usage(e.to_string())))
        .collect::<CliResult<Vec<_>>>()?;
    if checks.is_empty() {
        return Err(CliError::Usage("--properties lists no property".into()));
    }
    checks.sort();
    checks.dedup();
    Ok(checks)
}

fn load(path: &Path) -> CliResult<Configured> {
    MechanismConfig::load(path)?.build()
}

fn scan_grid(scan: &ScanArgs, built: &Configured) -> CliResult<Grid> {
    let config = match (&scan.grid_file, scan.grid) {
        (Some(path), _) => GridConfig::load(path)?,
        (None, points) => GridConfig {
            points,
            ..GridConfig::default()
        },
    };
    config.build(built.mechanism())
}

fn emit(report: &Report, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let text = report.to_json()?;
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn elapsed(timing: bool, start: Instant) -> Option<u64> {
    timing.then(|| start.elapsed().as_millis() as u64)
}

pub fn cmd_run(config: &Path, values: &[String], stdout: &mut dyn Write) -> CliResult<i32> {
    let built = load(config)?;
    let mech = built.mechanism();
    let values = values
        .iter()
        .map(|x| amount("profile", x))
        .collect::<CliResult<Vec<_>>>()?;
    let v = ValuationProfile::from_flat(mech.shape(), &values)?;
    let out = mech.evaluate(&v)?;

    writeln!(stdout, "mechanism  {}", mech.name())?;
    for (k, val) in mech.params() {
        writeln!(stdout, "  {k} = {val}")?;
    }
    writeln!(stdout, "profile    {v}")?;
    if let Configured::Linear(lp) = &built {
        let trace = lp.trace(&v)?;
        writeln!(stdout, "kappa      {}", trace.stats.kappa)?;
        let note = if trace.used_fallback { " (fallback)" } else { "" };
        writeln!(stdout, "price      {}{note}", trace.price)?;
        writeln!(stdout, "eligible   {}", trace.eligible)?;
    }
    writeln!(stdout, "traders    {}", out.trader_set())?;
    writeln!(stdout, "{:<10} {:>8} {:>6} {:>10} {:>8}", "player", "value", "trade", "transfer", "payoff")?;
    for p in mech.shape().iter_players() {
        writeln!(
            stdout,
            "{:<10} {:>8} {:>6} {:>10} {:>8}",
            p.to_string(),
            v.get(p).to_string(),
            if out.trades(p) { "yes" } else { "no" },
            out.transfer(p).to_string(),
            out.payoff(&v, p).to_string()
        )?;
    }
    Ok(EXIT_CLEAN)
}

pub fn cmd_check(scan: &ScanArgs, checks: &[Check], stdout: &mut dyn Write) -> CliResult<i32> {
    let built = load(&scan.mechanism)?;
    let mech = built.mechanism();
    let grid = scan_grid(scan, &built)?;
    let mut results = Vec::new();
    for check in checks {
        let start = Instant::now();
        let found = check.run(mech, &grid)?;
        results.push(PropertyResult::new(
            check.name(),
            &found,
            scan.max_violations,
            elapsed(scan.timing, start),
        ));
    }
    let report = Report::new("check", mech, &grid, results);
    emit(&report, scan.out.as_deref(), stdout)?;
    Ok(if report.passed() { EXIT_CLEAN } else { EXIT_VIOLATIONS })
}

pub fn cmd_mine(scan: &ScanArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let built = load(&scan.mechanism)?;
    let mech = built.mechanism();
    let grid = scan_grid(scan, &built)?;
    let start = Instant::now();
    let found = mine_ic_failures(mech, &grid, &default_report_grid(&grid))?;
    let result = PropertyResult::new("deviations", &found, scan.max_violations, elapsed(scan.timing, start));
    let report = Report::new("mine", mech, &grid, vec![result]);
    emit(&report, scan.out.as_deref(), stdout)?;
    Ok(if report.passed() { EXIT_CLEAN } else { EXIT_VIOLATIONS })
}

pub fn cmd_repro(list: bool, scenarios: Option<&Path>, stdout: &mut dyn Write) -> CliResult<i32> {
    let file = match scenarios {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.to_path_buf(),
                source,
            })?;
            ScenarioFile::parse(&text, path)?
        }
        None => ScenarioFile::builtin(),
    };
    if list {
        for name in file.names() {
            writeln!(stdout, "{name}")?;
        }
        return Ok(EXIT_CLEAN);
    }
    let rows = file.run();
    stdout.write_all(render(&rows).as_bytes())?;
    Ok(if rows.iter().all(|r| r.passed) { EXIT_CLEAN } else { EXIT_VIOLATIONS })
}
