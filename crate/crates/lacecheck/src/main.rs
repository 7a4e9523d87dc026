//! Batch front end: computes two-point tables, diagram values, and
//! verification reports for a model described by a plain-text config file.
//!
//! Exit codes: 0 = success / all checks pass, 1 = verification failures,
//! 2 = configuration error, 3 = a budget was exceeded.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use lacecheck::cache::Cache;
use lacecheck::connectivity::DEFAULT_PATH_BUDGET;
use lacecheck::diagrams::DiagramSet;
use lacecheck::model::{ModelSpec, DEFAULT_BOND_BUDGET, DEFAULT_STATE_BUDGET};
use lacecheck::oracle::{two_point_enumeration, two_point_transfer, TwoPointTable};
use lacecheck::verify::{
    check_coefficient_bounds, check_inclusions, check_intermediates, check_sum_bounds,
    VerificationReport, VerifyContext,
};
use lacecheck::{Error, Result};

/// Exhaustive per-configuration inclusion checking enumerates 2^bonds
/// configurations; above this bond count the family is skipped with a note.
const INCLUSION_BOND_LIMIT: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "lacecheck", about = "Finite-lattice certification of lace-expansion bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Model config file (keys: d, W, T, kernel, L, p, m).
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Output directory for tables, reports, and the cache.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed for the Monte Carlo cross-check stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Maximum bond count for exact configuration enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BOND_BUDGET)]
    bond_budget: usize,

    /// Maximum witness paths enumerated per event in inclusion checks.
    #[arg(long, global = true, default_value_t = DEFAULT_PATH_BUDGET)]
    path_budget: usize,

    /// Time-weight values m (comma-separated).
    #[arg(long, global = true, value_delimiter = ',', default_value = "0.8,1,1.25")]
    m: Vec<f64>,

    /// Polynomial time-weight exponents (comma-separated).
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,1,2")]
    ell: Vec<usize>,

    /// Largest expansion order N to verify.
    #[arg(long, global = true, default_value_t = 2)]
    nmax: usize,

    /// Occupation probabilities for the sweep command (comma-separated).
    #[arg(long, global = true, value_delimiter = ',', default_value = "0.2,0.5,0.8")]
    p_grid: Vec<f64>,

    /// Ignore cached tables and recompute everything.
    #[arg(long, global = true)]
    force_recompute: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute and cache the exact two-point table; dump it as CSV.
    Twopoint,
    /// Compute the scalar diagram values per m; dump them as JSON.
    Diagrams,
    /// Run the full verification suite and emit a report.
    Verify,
    /// Sweep the occupation probability and tabulate diagram values.
    Sweep,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::BondBudgetExceeded { .. }
                | Error::StateBudgetExceeded { .. }
                | Error::PathBudgetExceeded { .. } => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let model_path = cli.model.as_ref().ok_or_else(|| {
        Error::InvalidArgument("--model <file> is required".to_string())
    })?;
    let spec = ModelSpec::from_config_file(model_path)?;
    fs::create_dir_all(&cli.out)?;
    let cache = Cache::new(cli.out.join("cache"));
    match cli.command {
        Command::Twopoint => cmd_twopoint(cli, &spec, &cache),
        Command::Diagrams => cmd_diagrams(cli, &spec, &cache),
        Command::Verify => cmd_verify(cli, &spec),
        Command::Sweep => cmd_sweep(cli, &spec),
    }
}

/// Loads the exact two-point table from the cache or computes it by transfer.
fn cached_two_point(cli: &Cli, spec: &ModelSpec, cache: &Cache) -> Result<TwoPointTable> {
    let hash = spec.hash();
    if !cli.force_recompute {
        if let Some(table) = cache.load::<TwoPointTable>("twopoint", &hash)? {
            eprintln!("two-point table: cache hit ({hash})");
            return Ok(table);
        }
    }
    let start = Instant::now();
    let table = two_point_transfer(spec, DEFAULT_STATE_BUDGET)?;
    eprintln!("two-point table: computed in {:?}", start.elapsed());
    cache.store("twopoint", &hash, &table)?;
    Ok(table)
}

fn cmd_twopoint(cli: &Cli, spec: &ModelSpec, cache: &Cache) -> Result<ExitCode> {
    let table = cached_two_point(cli, spec, cache)?;

    // Cross-check against exhaustive configuration enumeration when feasible.
    if spec.bond_count() <= cli.bond_budget {
        let check = two_point_enumeration(spec, cli.bond_budget)?;
        let max_diff = table
            .values
            .iter()
            .zip(&check.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        eprintln!("enumeration cross-check: max entry difference {max_diff:e}");
        if max_diff > 1e-12 {
            eprintln!("enumeration cross-check FAILED");
            return Ok(ExitCode::from(1));
        }
    } else {
        eprintln!(
            "enumeration cross-check skipped: {} bonds exceeds budget {}",
            spec.bond_count(),
            cli.bond_budget
        );
    }

    let mut csv = String::new();
    let dim = spec.kernel.dim;
    for i in 0..dim {
        write!(csv, "dsigma{i},").unwrap();
    }
    csv.push_str("dtau,value\n");
    for dt in 0..=spec.horizon {
        for dsite in 0..spec.sites() {
            for c in spec.kernel.coords(dsite) {
                write!(csv, "{c},").unwrap();
            }
            writeln!(csv, "{dt},{}", table.get(spec, dsite, dt)).unwrap();
        }
    }
    let path = cli.out.join("twopoint.csv");
    fs::write(&path, csv)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_diagrams(cli: &Cli, spec: &ModelSpec, cache: &Cache) -> Result<ExitCode> {
    let phi = cached_two_point(cli, spec, cache)?.to_function(spec);
    let hash = spec.hash();
    for &m in &cli.m {
        let kind = format!("diagrams-m{m}");
        let set = match (!cli.force_recompute)
            .then(|| cache.load::<DiagramSet>(&kind, &hash))
            .transpose()?
            .flatten()
        {
            Some(set) => {
                eprintln!("diagram set m={m}: cache hit");
                set
            }
            None => {
                let start = Instant::now();
                let set = DiagramSet::compute(spec, &phi, m);
                eprintln!("diagram set m={m}: computed in {:?}", start.elapsed());
                cache.store(&kind, &hash, &set)?;
                set
            }
        };
        let text = serde_json::to_string_pretty(&set).map_err(Error::Json)?;
        let path = cli.out.join(format!("diagrams-m{m}.json"));
        fs::write(&path, text)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli: &Cli, spec: &ModelSpec) -> Result<ExitCode> {
    let start = Instant::now();
    let mut report = match VerifyContext::new(spec, cli.nmax, cli.bond_budget) {
        Ok(ctx) => {
            let mut report = check_coefficient_bounds(&ctx);
            report.merge(check_sum_bounds(&ctx, &cli.m, &cli.ell));
            report.merge(check_intermediates(&ctx, &cli.m));
            report
        }
        Err(err @ (Error::BondBudgetExceeded { .. } | Error::StateBudgetExceeded { .. })) => {
            let mut report = VerificationReport::new(spec);
            report.skipped.extend(
                ["coefficient-bounds", "sum-bounds", "intermediates", "event-inclusions"]
                    .map(String::from),
            );
            emit_report(cli, &report)?;
            eprintln!("partial report: {err}");
            return Err(err);
        }
        Err(err) => return Err(err),
    };
    if spec.bond_count() <= INCLUSION_BOND_LIMIT {
        report.merge(check_inclusions(spec, cli.path_budget)?);
    } else {
        report.skipped.push("event-inclusions".to_string());
        eprintln!(
            "event-inclusion suite skipped: {} bonds would mean 2^{} configurations \
             (limit 2^{INCLUSION_BOND_LIMIT}); run it on a smaller lattice",
            spec.bond_count(),
            spec.bond_count()
        );
    }
    eprintln!("verification ran in {:?}", start.elapsed());
    emit_report(cli, &report)?;
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

/// Writes the canonical JSON report and prints a human-readable summary.
/// Timings never enter the JSON so repeated runs are byte-identical.
fn emit_report(cli: &Cli, report: &VerificationReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(Error::Json)?;
    let path = cli.out.join("verify-report.json");
    fs::write(&path, text)?;

    println!("model: {}", report.model);
    println!("{:<28} {:>8} {:>8} {:>14}", "check family", "pass", "fail", "min margin");
    let mut families: Vec<&str> = Vec::new();
    for c in &report.checks {
        if !families.contains(&c.id.as_str()) {
            families.push(c.id.as_str());
        }
    }
    for family in families {
        let rows = report.checks.iter().filter(|c| c.id == family);
        let (mut pass, mut fail, mut min_margin) = (0usize, 0usize, f64::INFINITY);
        for c in rows {
            if c.pass {
                pass += 1;
            } else {
                fail += 1;
            }
            min_margin = min_margin.min(c.margin);
        }
        println!("{family:<28} {pass:>8} {fail:>8} {min_margin:>14.3e}");
    }
    for skipped in &report.skipped {
        println!("{skipped:<28}  skipped");
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        println!("FAIL {} {:?}: lhs {} > rhs {}", c.id, c.params, c.lhs, c.rhs);
    }
    println!(
        "{}: {} passed, {} failed (report: {})",
        if report.all_pass() { "PASS" } else { "FAIL" },
        report.passed,
        report.failed,
        path.display()
    );
    Ok(())
}

fn cmd_sweep(cli: &Cli, spec: &ModelSpec) -> Result<ExitCode> {
    let mut grid: Vec<f64> = Vec::new();
    for &p in &cli.p_grid {
        if grid.contains(&p) {
            eprintln!("duplicate p={p} in grid dropped");
        } else {
            grid.push(p);
        }
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("--p-grid must be non-empty".to_string()));
    }

    let mut csv = String::from("p,m,triangle,triangle_tilde,square,h,bubble_max,min_margin\n");
    // triangles[m index] collects the T column per m for the monotonicity report.
    let mut triangles: Vec<Vec<f64>> = vec![Vec::new(); cli.m.len()];
    for &p in &grid {
        let spec_p = ModelSpec::new(spec.kernel.clone(), spec.horizon, p, spec.m)?;
        let phi = two_point_transfer(&spec_p, DEFAULT_STATE_BUDGET)?.to_function(&spec_p);
        let ctx = VerifyContext::new(&spec_p, cli.nmax, cli.bond_budget)?;
        let mut report = check_coefficient_bounds(&ctx);
        report.merge(check_sum_bounds(&ctx, &cli.m, &cli.ell));
        report.merge(check_intermediates(&ctx, &cli.m));
        let min_margin = report.checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        for (i, &m) in cli.m.iter().enumerate() {
            let set = DiagramSet::compute(&spec_p, &phi, m);
            let bubble_max = set.bubble.iter().fold(0.0f64, |a, &b| a.max(b));
            triangles[i].push(set.triangle);
            writeln!(
                csv,
                "{p},{m},{},{},{},{},{bubble_max},{min_margin}",
                set.triangle, set.triangle_tilde, set.square, set.h
            )
            .unwrap();
        }
        if !report.all_pass() {
            eprintln!("verification failures at p={p}: {} checks failed", report.failed);
        }
    }
    let path = cli.out.join("sweep.csv");
    fs::write(&path, csv)?;
    println!("wrote {}", path.display());

    let sorted = {
        let mut g = grid.clone();
        g.sort_by(|a, b| a.partial_cmp(b).unwrap());
        g
    };
    let mut monotone = true;
    for (i, &m) in cli.m.iter().enumerate() {
        // Compare the T column in p-sorted order.
        let by_p: Vec<f64> = sorted
            .iter()
            .map(|p| triangles[i][grid.iter().position(|g| g == p).unwrap()])
            .collect();
        let ok = by_p.windows(2).all(|w| w[0] <= w[1] + 1e-12);
        println!(
            "triangle monotone nondecreasing in p at m={m}: {}",
            if ok { "yes" } else { "NO" }
        );
        monotone &= ok;
    }
    Ok(if monotone { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
