//! Subcommand definitions and dispatch.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hilbertforge_core::bounds::{decimal_digits, BoundInputs, BoundLedger, LedgerEntry};
use hilbertforge_core::verifier::{fuzz_case, summarize, EngineConfig, Fault, FuzzCaseStatus, FuzzParams};
use rayon::prelude::*;

use crate::builtin;
use crate::cache::Cache;
use crate::casefile::{emit_case, parse_case_file, CaseFile, Expected};
use crate::report::{exit_code, render_bound, render_human, run_case, RecordStatus, ReportRecord};

#[derive(Parser, Debug)]
#[command(name = "hilbertforge", version, about = "Hilbert coefficients, regularity and their bounds for monomial filtrations")]
pub struct Cli {
    /// Cache directory (default: $HILBERTFORGE_CACHE, else .hilbertforge-cache/).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Omit wall-clock timings from JSON output.
    #[arg(long, global = true)]
    pub no_timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analyze one case file: print a table and write the JSON record.
    Analyze {
        case: PathBuf,
        /// JSON output path (default: <case stem>.report.json).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON record instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Verify every *.case file under a directory; exit 0 iff no check fails.
    Verify {
        dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Write JSON lines here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print JSON lines instead of one summary line per case.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the bound ledger at a point, or tabulate it over a grid as CSV.
    Bounds(BoundsArgs),
    /// Run seeded random cases and shrink any failure to a reproducer.
    Fuzz(FuzzArgs),
    /// Run the built-in families with closed-form invariants.
    #[command(alias = "paper-examples")]
    WorkedExamples,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Dimension: a value, a list `1,3` or a range `1..3`.
    #[arg(long)]
    pub d: String,
    /// Depth.
    #[arg(long)]
    pub t: String,
    /// Reduction number.
    #[arg(long, default_value = "0")]
    pub r: String,
    /// Common magnitude of the Hilbert coefficients.
    #[arg(long)]
    pub xi: String,
    #[arg(long, default_value_t = 0)]
    pub delta_prime: u64,
    #[arg(long)]
    pub reg: Option<u64>,
    #[arg(long)]
    pub reg1: Option<u64>,
    #[arg(long)]
    pub reg_bar: Option<i64>,
    #[arg(long)]
    pub h0: Option<u64>,
    #[arg(long)]
    pub b: Option<u64>,
    /// CSV output, one row per grid point and bound.
    #[arg(long)]
    pub table: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FaultArg {
    FlipFirstCoefficientSign,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 500)]
    pub count: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 6)]
    pub deg_max: u32,
    #[arg(long, default_value_t = 4)]
    pub gen_max: usize,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Directory for reproducer case files.
    #[arg(long, default_value = "fuzz-reproducers")]
    pub reproducers: PathBuf,
    /// Corrupt every report before checking, to exercise the failure path.
    #[arg(long, value_enum)]
    pub inject_fault: Option<FaultArg>,
}

/// Parses `argv` and runs the subcommand, returning the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cache = (!cli.no_cache).then(|| Cache::resolve(cli.cache.as_deref()));
    let timings = !cli.no_timings;
    let result = match cli.command {
        Command::Analyze { case, out, json } => analyze(&case, out, json, cache.as_ref(), timings),
        Command::Verify { dir, jobs, out, json } => verify(&dir, jobs, out, json, cache.as_ref(), timings),
        Command::Bounds(args) => bounds(&args),
        Command::Fuzz(args) => fuzz(&args),
        Command::WorkedExamples => worked_examples(cache.as_ref(), timings),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, String> {
    let n = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| format!("{}: {e}", parent.display()))?;
    }
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn analyze(path: &Path, out: Option<PathBuf>, json: bool, cache: Option<&Cache>, timings: bool) -> Result<i32, String> {
    let case = match parse_case_file(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return Ok(2);
        }
    };
    let record = run_case(&case, cache, timings);
    let line = record.to_json_line();
    if json {
        println!("{line}");
    } else {
        print!("{}", render_human(&record));
    }
    let out = out.unwrap_or_else(|| {
        PathBuf::from(format!("{}.report.json", path.file_stem().map_or("case".into(), |s| s.to_string_lossy())))
    });
    write_file(&out, &format!("{line}\n"))?;
    Ok(exit_code([&record.status]))
}

/// Every `*.case` file below `dir`, sorted by path.
pub fn collect_cases(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(|e| format!("{}: {e}", d.display()))? {
            let p = entry.map_err(|e| e.to_string())?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "case") {
                files.push(p);
            }
        }
    }
    files.sort();
    Ok(files)
}

/// Runs every case file under `dir` on `jobs` workers. Records are sorted by case id, then label.
pub fn verify_corpus(dir: &Path, jobs: Option<usize>, cache: Option<&Cache>, timings: bool) -> Result<Vec<ReportRecord>, String> {
    let files = collect_cases(dir)?;
    let mut records: Vec<ReportRecord> = pool(jobs)?.install(|| {
        files
            .par_iter()
            .map(|p| match parse_case_file(p) {
                Ok(case) => run_case(&case, cache, timings),
                Err(e) => {
                    let text = fs::read(p).unwrap_or_default();
                    ReportRecord::input_error(&p.display().to_string(), &text, e.to_string())
                }
            })
            .collect()
    });
    records.sort_by(|a, b| (&a.id, &a.label).cmp(&(&b.id, &b.label)));
    Ok(records)
}

fn status_word(s: RecordStatus) -> &'static str {
    match s {
        RecordStatus::Pass => "PASS",
        RecordStatus::Fail => "FAIL",
        RecordStatus::Error => "ERROR",
        RecordStatus::ResourceLimited => "LIMIT",
        RecordStatus::Unsupported => "UNSUPPORTED",
        RecordStatus::InputError => "INPUT",
    }
}

fn verify(dir: &Path, jobs: Option<usize>, out: Option<PathBuf>, json: bool, cache: Option<&Cache>, timings: bool) -> Result<i32, String> {
    let records = verify_corpus(dir, jobs, cache, timings)?;
    let lines: String = records.iter().map(|r| r.to_json_line() + "\n").collect();
    if let Some(out) = out {
        write_file(&out, &lines)?;
    }
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    if json {
        let _ = w.write_all(lines.as_bytes());
    } else {
        for r in &records {
            let detail = match (&r.reason, r.failures.is_empty()) {
                (Some(reason), _) => format!(" ({reason})"),
                (None, false) => format!(" failed: {}", r.failures.join(", ")),
                _ => String::new(),
            };
            let _ = writeln!(w, "{:<11} {} [{}]{}", status_word(r.status), r.label, r.id, detail);
        }
        let pass = records.iter().filter(|r| r.status == RecordStatus::Pass).count();
        let _ = writeln!(w, "{pass}/{} cases pass", records.len());
    }
    Ok(exit_code(records.iter().map(|r| &r.status)))
}

/// Parses `5`, `1,3,4` or `1..3` (inclusive).
pub fn parse_grid(s: &str) -> Result<Vec<u64>, String> {
    let bad = |_| format!("invalid grid `{s}`: use 5, 1,3,4 or 1..3");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        if a > b {
            return Err(format!("empty range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(bad)).collect()
}

/// Ledger inputs for a grid point: every coefficient has magnitude `xi`.
pub fn point_inputs(args: &BoundsArgs, d: usize, t: usize, r: u64, xi: u64) -> BoundInputs {
    BoundInputs {
        d,
        t,
        r,
        delta_prime: args.delta_prime,
        e: vec![xi as i64; d + 1],
        graded_e: Some(vec![xi as i64; d]),
        reg: args.reg,
        reg1: args.reg1,
        reg_bar: args.reg_bar,
        h0: args.h0,
        b: args.b,
        adic: r == 0,
    }
}

/// CSV rows `d,t,r,xi,bound,value,digits,note` over the grid.
pub fn bounds_table(args: &BoundsArgs) -> Result<String, String> {
    let mut w = csv_row(&["d", "t", "r", "xi", "bound", "value", "digits", "note"]);
    for d in parse_grid(&args.d)? {
        for t in parse_grid(&args.t)?.into_iter().filter(|&t| t <= d) {
            for r in parse_grid(&args.r)? {
                for xi in parse_grid(&args.xi)? {
                    let ledger = BoundLedger::build(&point_inputs(args, d as usize, t as usize, r, xi)).map_err(|e| e.to_string())?;
                    for (name, entry) in ledger.iter() {
                        let (value, digits, note) = match entry {
                            LedgerEntry::Value(v) => (v.to_string(), decimal_digits(v).to_string(), String::new()),
                            LedgerEntry::Inapplicable(why) => (String::new(), String::new(), why.clone()),
                        };
                        let fields = [d.to_string(), t.to_string(), r.to_string(), xi.to_string(), name.to_string(), value, digits, note];
                        w.push_str(&csv_row(&fields.iter().map(String::as_str).collect::<Vec<_>>()));
                    }
                }
            }
        }
    }
    Ok(w)
}

fn csv_row(fields: &[&str]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| if f.contains([',', '"', '\n']) { format!("\"{}\"", f.replace('"', "\"\"")) } else { f.to_string() })
        .collect();
    quoted.join(",") + "\n"
}

fn bounds(args: &BoundsArgs) -> Result<i32, String> {
    let grid = [parse_grid(&args.d)?, parse_grid(&args.t)?, parse_grid(&args.r)?, parse_grid(&args.xi)?];
    if args.table || grid.iter().any(|g| g.len() != 1) {
        print!("{}", bounds_table(args)?);
        return Ok(0);
    }
    let [d, t, r, xi] = grid.map(|g| g[0]);
    let ledger = BoundLedger::build(&point_inputs(args, d as usize, t as usize, r, xi)).map_err(|e| e.to_string())?;
    println!("d = {d}, t = {t}, r = {r}, xi = {xi}");
    for (name, entry) in ledger.iter() {
        match entry {
            LedgerEntry::Value(v) => println!("  {name:<34} {}", render_bound(&v.to_string())),
            LedgerEntry::Inapplicable(why) => println!("  {name:<34} inapplicable: {why}"),
        }
    }
    Ok(0)
}

fn fuzz(args: &FuzzArgs) -> Result<i32, String> {
    let params = FuzzParams {
        count: args.count,
        seed: args.seed,
        n_max: args.n_max,
        deg_max: args.deg_max,
        gen_max: args.gen_max,
        fault: args.inject_fault.map(|FaultArg::FlipFirstCoefficientSign| Fault::FlipFirstCoefficientSign),
        ..FuzzParams::default()
    };
    let cfg = EngineConfig::default();
    let results = pool(args.jobs)?.install(|| (0..params.count).into_par_iter().map(|i| fuzz_case(&params, &cfg, i)).collect());
    let summary = summarize(&params, results);
    for f in &summary.failures {
        if let FuzzCaseStatus::Failed { shrunk, checks } = &f.status {
            let case = CaseFile {
                label: format!("fuzz-seed{}-case{}", params.seed, f.index),
                spec: shrunk.clone(),
                config: cfg.clone(),
                expected: Expected::default(),
            };
            let path = args.reproducers.join(format!("{}.case", case.label));
            let header = format!("# failing checks: {}\n", checks.join(", "));
            write_file(&path, &(header + &emit_case(&case)))?;
            eprintln!("reproducer written to {}", path.display());
        }
    }
    println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())?);
    Ok(if summary.clean() { 0 } else { 1 })
}

fn worked_examples(cache: Option<&Cache>, timings: bool) -> Result<i32, String> {
    let mut statuses = Vec::new();
    for case in builtin::stable_pair_suite().iter().chain(builtin::embedded_point_suite().iter()) {
        let rec = run_case(case, cache, timings);
        let r = rec.report.clone().unwrap_or_default();
        let margin = rec
            .verdict
            .as_ref()
            .and_then(|v| v["checks"].as_array()?.iter().find(|c| c["name"] == "reg_vs_saturation").cloned())
            .map_or("-".to_string(), |c| c["margin"].to_string());
        println!(
            "{:<22} {}  reg = {}  e = {}  h0 = {}  B = {}  depth = {}  tightness margin = {}",
            rec.label,
            status_word(rec.status),
            r["reg"],
            r["e"],
            r["h0"],
            r["b"],
            r["depth"],
            margin
        );
        for f in &rec.failures {
            println!("    failed: {f}");
        }
        statuses.push(rec.status);
    }
    Ok(exit_code(statuses.iter()))
}
