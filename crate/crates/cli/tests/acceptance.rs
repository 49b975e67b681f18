//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use hilbertforge_cli::builtin::{embedded_point_suite, stable_pair_suite};
use hilbertforge_cli::cache::Cache;
use hilbertforge_cli::casefile::parse_case_file;
use hilbertforge_cli::commands::{collect_cases, verify_corpus};
use hilbertforge_cli::report::RecordStatus;
use hilbertforge_core::bounds::{decimal_digits, names, BoundInputs, BoundLedger};
use hilbertforge_core::hilbert::{hilbert_function, series_expansion, series_numerator};
use hilbertforge_core::monomial::MonomialIdeal;
use hilbertforge_core::verifier::{
    fuzz_case, summarize, verify_case, CaseOutcome, CheckStatus, EngineConfig, FuzzParams, Regime,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_outcomes() -> Result<Vec<(String, CaseOutcome)>, String> {
    let mut out = Vec::new();
    for path in collect_cases(&corpus_dir())? {
        let case = parse_case_file(&path).map_err(|e| e.to_string())?;
        let outcome = verify_case(&case.spec, &case.config).map_err(|e| format!("{}: {e}", case.label))?;
        out.push((case.label, outcome));
    }
    Ok(out)
}

/// `C(top, k)` through the falling product; exact for negative `top` as well.
fn binom(top: i64, k: usize) -> BigInt {
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for i in 0..k as i64 {
        num *= BigInt::from(top - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `Σ (-1)^i e_i C(n + d - i, d - i)`, evaluated independently of the library.
fn samuel_polynomial(e: &[i64], n: i64) -> BigInt {
    let d = e.len() - 1;
    e.iter().enumerate().fold(BigInt::from(0), |acc, (i, &ei)| {
        let term = BigInt::from(ei) * binom(n + (d - i) as i64, d - i);
        if i % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

fn stable_pair_family() -> Outcome {
    let mut slowest = 0f64;
    for (s, case) in (1..=10i64).zip(stable_pair_suite()) {
        let start = Instant::now();
        let out = verify_case(&case.spec, &case.config).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        let r = &out.report;
        ensure!(r.reg == Some(s), "s = {s}: reg = {:?}", r.reg);
        ensure!(r.e == vec![1, -s], "s = {s}: e = {:?}", r.e);
        ensure!(r.h0 == s as u64 && r.b == Some(2), "s = {s}: h0 = {}, B = {:?}", r.h0, r.b);
        ensure!(r.depth == 0 && r.d == 1, "s = {s}: depth {}, dim {}", r.depth, r.d);
        ensure!(out.verdict.passed(), "s = {s}: failing checks");
        ensure!(secs < 1.0, "s = {s}: {secs:.3} s");
    }
    Ok(format!("reg = s, e = (1, -s), h0 = s, B = 2, depth 0, dim 1 for s = 1..10; slowest case {:.1} ms", slowest * 1e3))
}

fn embedded_point_family() -> Outcome {
    let mut n = 0;
    for case in embedded_point_suite() {
        let out = verify_case(&case.spec, &case.config).map_err(|e| e.to_string())?;
        let want = case.expected.e.clone().expect("pinned");
        ensure!(out.report.e == want, "{}: e = {:?}, expected {want:?}", case.label, out.report.e);
        let check = out.verdict.get(names::REG_ALL_COEFFS).ok_or("missing regularity check")?;
        ensure!(check.status == CheckStatus::Pass, "{}: regularity bound {:?}", case.label, check.status);
        n += 1;
    }
    Ok(format!("e = (1, 0, ..., 0, (-1)^d s) and strict regularity bound pass on {n} cases (d <= 3, s <= 4)"))
}

fn identity_suite() -> Outcome {
    let outcomes = corpus_outcomes()?;
    let mut regime_a = 0;
    let mut uncertified = 0;
    for (label, out) in &outcomes {
        let r = &out.report;
        let d = r.d;
        let sign = if d % 2 == 0 { 1 } else { -1 };
        ensure!(r.h0 as i64 == sign * (r.e[d] - r.e_bar[d]), "{label}: h0 {} vs e_d {} and saturated e_d {}", r.h0, r.e[d], r.e_bar[d]);
        ensure!(r.e[..d] == r.e_bar[..d], "{label}: lower coefficients differ from the saturation's");
        ensure!(r.sections.depth + r.pd == r.n, "{label}: depth {} + pd {} != {}", r.sections.depth, r.pd, r.n);
        if r.regime == Regime::A {
            let reg = r.reg.ok_or("graded case without reg")? as usize;
            for n in reg..=reg + d + 5 {
                let h = r.samuel_values.get(n).ok_or(format!("{label}: no H({n})"))?;
                ensure!(BigInt::from(*h) == samuel_polynomial(&r.e, n as i64), "{label}: H({n}) = {h} differs from P({n})");
            }
            regime_a += 1;
        }
        // the equalities were recomputed above; an uncertified status only flags an empirically fitted postulation
        for name in ["h0_coefficient_identity", "auslander_buchsbaum", "lower_coefficients_saturation"] {
            let c = out.verdict.get(name).ok_or(format!("{label}: no {name}"))?;
            ensure!(matches!(c.status, CheckStatus::Pass | CheckStatus::Uncertified), "{label}: {name} is {:?}", c.status);
            if c.status == CheckStatus::Uncertified {
                uncertified += 1;
            }
        }
    }
    Ok(format!(
        "{} corpus cases; H = P on [reg, reg + d + 5] for {regime_a} graded cases; exact integers; {uncertified} identity records rest on a guard-window fit",
        outcomes.len()
    ))
}

/// Families of inequality checks that must be exercised with at least one pass.
const FAMILIES: &[&str] = &[
    "reg1_recursive",
    "reg1_explicit",
    "reg_all_coeffs",
    "reg_depth",
    "postulation_vs_depth_bound",
    "alternating_coeff_sharp_",
    "alternating_coeff_weak_",
    "tail_coeff_1",
    "tail_coeff_adic_",
    "tail_coeff_cm_",
    "coeff_vs_sections_",
    "graded_coeff_vs_sections_",
    "section_h0_",
    "section_length",
    "reg_vs_saturation",
    "h0_vs_polynomial",
    "cm_e1_nonnegative",
    "cm_e2_nonnegative",
];

fn family_of(name: &str) -> Option<&'static str> {
    FAMILIES.iter().copied().find(|f| if f.ends_with('_') { name.starts_with(f) } else { name == *f })
}

fn inequality_suite() -> Outcome {
    let start = Instant::now();
    let outcomes = corpus_outcomes()?;
    let mut shape = BTreeSet::new();
    let mut passes: BTreeMap<&str, usize> = BTreeMap::new();
    let mut tally = |out: &CaseOutcome| {
        for c in &out.verdict.checks {
            if let (Some(f), CheckStatus::Pass) = (family_of(&c.name), c.status) {
                *passes.entry(f).or_default() += 1;
            }
        }
    };
    for (label, out) in &outcomes {
        let failed: Vec<_> = out.verdict.failures().map(|c| c.name.clone()).collect();
        ensure!(failed.is_empty(), "corpus case {label} fails {failed:?}");
        shape.insert((out.report.d, out.report.depth));
        tally(out);
    }
    for d in 1..=3 {
        for t in 0..=d {
            ensure!(shape.contains(&(d, t)), "corpus lacks a case with d = {d}, depth = {t}");
        }
    }
    ensure!(outcomes.len() >= 30, "corpus has {} cases", outcomes.len());

    let params = FuzzParams { count: 500, seed: 42, n_max: 4, deg_max: 6, ..FuzzParams::default() };
    let cfg = EngineConfig::default();
    let results: Vec<_> = (0..params.count).map(|i| fuzz_case(&params, &cfg, i)).collect();
    for r in &results {
        if let Some(out) = &r.outcome {
            tally(out);
        }
    }
    let summary = summarize(&params, results);
    ensure!(summary.clean(), "fuzz failures {:?}, errors {:?}", summary.failures, summary.errors);
    let unexercised: Vec<_> = FAMILIES.iter().filter(|f| !passes.contains_key(**f)).collect();
    ensure!(unexercised.is_empty(), "never passed: {unexercised:?}");
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 120.0, "took {secs:.1} s");
    Ok(format!(
        "{} corpus cases, fuzz seed 42: {} passed, {} skipped, {} resource-limited; 0 failures; {} families exercised; {secs:.1} s",
        outcomes.len(),
        summary.passed,
        summary.skipped.len(),
        summary.resource_limited.len(),
        FAMILIES.len()
    ))
}

fn tightness_witness() -> Outcome {
    for (s, case) in (1..=10).zip(stable_pair_suite()) {
        let out = verify_case(&case.spec, &case.config).map_err(|e| e.to_string())?;
        let c = out.verdict.get(names::REG_VS_SATURATION).ok_or("missing check")?;
        ensure!(c.status == CheckStatus::Pass && c.margin == Some(0), "s = {s}: {:?} margin {:?}", c.status, c.margin);
        ensure!(c.lhs.as_deref() == Some(&*s.to_string()) && c.rhs == c.lhs, "s = {s}: {:?} vs {:?}", c.lhs, c.rhs);
    }
    Ok("reg = max(reg of saturation, r) + h0 = s with margin 0 for s = 1..10".into())
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4usize);
        let k = rng.gen_range(0..=5usize);
        let gens: Vec<Vec<u32>> = (0..k)
            .map(|_| {
                let mut g: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
                if g.iter().all(|&e| e == 0) {
                    g[rng.gen_range(0..n)] = 1;
                }
                g
            })
            .collect();
        let q = MonomialIdeal::from_exponents(n, &gens).map_err(|e| e.to_string())?;
        let series = series_expansion(&series_numerator(&q).map_err(|e| e.to_string())?, n, 12);
        for j in 0..=12 {
            let enumerated = hilbert_function(&q, j as u64);
            ensure!(enumerated as i64 == series[j], "{q}: degree {j}: {enumerated} vs {}", series[j]);
        }
        checked += 1;
    }
    Ok(format!("{checked} random ideals, degrees 0..=12, exact agreement"))
}

fn big_integer_capability() -> Outcome {
    let inputs = BoundInputs { d: 5, t: 1, r: 0, e: vec![3; 6], ..BoundInputs::default() };
    let start = Instant::now();
    let ledger = BoundLedger::build(&inputs).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let value = ledger.value(names::REG_DEPTH).ok_or("missing value")?;
    let mut oracle = BigInt::from(1);
    for _ in 0..1200 {
        oracle *= 4;
    }
    oracle -= 2;
    ensure!(*value == oracle, "value differs from 4^1200 - 2");
    ensure!(decimal_digits(value) == 723 && oracle.to_string().len() == 723, "digit count {}", decimal_digits(value));
    ensure!(secs < 0.010, "ledger took {:.2} ms", secs * 1e3);
    Ok(format!("4^1200 - 2 exactly, 723 digits, whole ledger in {:.2} ms", secs * 1e3))
}

fn determinism_and_cache() -> Outcome {
    for path in collect_cases(&corpus_dir())? {
        let case = parse_case_file(&path).map_err(|e| e.to_string())?;
        let a = serde_json::to_string(&verify_case(&case.spec, &case.config).map_err(|e| e.to_string())?).unwrap();
        let b = serde_json::to_string(&verify_case(&case.spec, &case.config).map_err(|e| e.to_string())?).unwrap();
        ensure!(a == b, "{}: repeated verdicts differ", case.label);
    }
    let lines = |jobs, cache: Option<&Cache>| -> Result<Vec<String>, String> {
        Ok(verify_corpus(&corpus_dir(), Some(jobs), cache, false)?.iter().map(|r| r.without_run_info().to_json_line()).collect())
    };
    let fresh = lines(1, None)?;
    ensure!(fresh == lines(1, None)?, "repeated corpus runs differ");
    ensure!(fresh == lines(4, None)?, "corpus output depends on the job count");
    let dir = std::env::temp_dir().join(format!("hilbertforge-acceptance-{}", std::process::id()));
    let cache = Cache::new(&dir);
    let first = verify_corpus(&corpus_dir(), Some(4), Some(&cache), false)?;
    let second = verify_corpus(&corpus_dir(), Some(4), Some(&cache), false)?;
    let _ = std::fs::remove_dir_all(&dir);
    ensure!(second.iter().all(|r| r.run.cached || r.status != RecordStatus::Pass), "second run not served from cache");
    let strip = |v: &[hilbertforge_cli::report::ReportRecord]| v.iter().map(|r| r.without_run_info().to_json_line()).collect::<Vec<_>>();
    ensure!(strip(&first) == fresh && strip(&second) == fresh, "cached records differ from fresh ones");
    Ok(format!("{} records byte-identical across repeats, job counts 1 and 4, and cache hits", fresh.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("stable pair family", stable_pair_family),
        ("embedded point family", embedded_point_family),
        ("identity suite", identity_suite),
        ("inequality suite", inequality_suite),
        ("tightness witness", tightness_witness),
        ("oracle equivalence", oracle_equivalence),
        ("big-integer bound", big_integer_capability),
        ("determinism and cache", determinism_and_cache),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {title}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {title}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
