//! JSON-lines report records, content-hash case ids, and the per-case runner.

use std::time::Instant;

use hilbertforge_core::bounds::{decimal_digits, scientific};
use hilbertforge_core::hilbert::FiltrationSpec;
use hilbertforge_core::verifier::{verify_case, CheckRecord, CheckStatus, EngineConfig, Relation};
use hilbertforge_core::Error;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cache::{Cache, Lookup};
use crate::casefile::{CaseFile, Expected};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The spec in the layout used for hashing and reporting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalSpec {
    pub n: usize,
    pub q: Vec<Vec<u32>>,
    pub j: Vec<Vec<u32>>,
    /// `N_1, ..., N_r`.
    pub initial: Vec<Vec<Vec<u32>>>,
}

impl From<&FiltrationSpec> for CanonicalSpec {
    fn from(f: &FiltrationSpec) -> Self {
        CanonicalSpec {
            n: f.ring.n,
            q: f.q.exponent_tuples(),
            j: f.j.exponent_tuples(),
            initial: f.initial[1..].iter().map(|i| i.exponent_tuples()).collect(),
        }
    }
}

/// Content hash of the canonical spec, engine configuration and tool version. Labels and
/// file names do not enter it.
pub fn case_id(spec: &FiltrationSpec, cfg: &EngineConfig) -> String {
    let payload = json!({
        "tool_version": TOOL_VERSION,
        "spec": CanonicalSpec::from(spec),
        "prime": cfg.prime,
        "check_prime": cfg.check_prime,
        "seed": cfg.seed,
    });
    let digest = Sha256::digest(serde_json::to_vec(&payload).expect("json value"));
    hex::encode(&digest[..16])
}

/// The cacheable part of a record: everything computed from the spec and configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CachedCore {
    pub id: String,
    pub tool_version: String,
    pub primes: Vec<u64>,
    pub seed: u64,
    pub report: Value,
    pub ledger: Value,
    pub verdict: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Pass,
    Fail,
    /// The engine could not complete, for a reason other than a resource ceiling.
    Error,
    ResourceLimited,
    Unsupported,
    InputError,
}

/// Per-invocation metadata; excluded from determinism comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub cached: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub id: String,
    pub label: String,
    pub tool_version: String,
    pub primes: Vec<u64>,
    pub seed: u64,
    pub status: RecordStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec: Option<CanonicalSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ledger: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<Value>,
    /// Comparisons against the case's pinned values.
    pub expected: Vec<Value>,
    pub failures: Vec<String>,
    pub run: RunInfo,
}

impl ReportRecord {
    /// A record for a file that did not parse.
    pub fn input_error(label: &str, text: &[u8], message: String) -> Self {
        ReportRecord {
            id: format!("input-{}", hex::encode(&Sha256::digest(text)[..8])),
            label: label.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            primes: Vec::new(),
            seed: 0,
            status: RecordStatus::InputError,
            reason: Some(message),
            spec: None,
            report: None,
            ledger: None,
            verdict: None,
            expected: Vec::new(),
            failures: Vec::new(),
            run: RunInfo { cached: false, elapsed_ms: None },
        }
    }

    /// The record with per-invocation metadata cleared.
    pub fn without_run_info(&self) -> ReportRecord {
        ReportRecord { run: RunInfo { cached: false, elapsed_ms: None }, ..self.clone() }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

fn computed(report: &Value, key: &str) -> Option<BigInt> {
    match &report[key] {
        Value::Number(n) => n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from)),
        _ => None,
    }
}

fn pin(out: &mut Vec<CheckRecord>, name: String, got: Option<BigInt>, want: BigInt) {
    out.push(match got {
        Some(v) => CheckRecord::compare(name, v, Relation::Eq, want, None),
        None => CheckRecord {
            name,
            status: CheckStatus::Fail,
            relation: Some(Relation::Eq),
            lhs: None,
            rhs: Some(want.to_string()),
            margin: None,
            note: Some("value not computed for this case".into()),
        },
    });
}

/// Compares the report against pinned values, one record per pinned quantity.
pub fn expectation_checks(report: &Value, expected: &Expected) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let scalars: [(&str, Option<BigInt>); 7] = [
        ("d", expected.d.map(BigInt::from)),
        ("depth", expected.depth.map(BigInt::from)),
        ("reg", expected.reg.map(BigInt::from)),
        ("h0", expected.h0.map(BigInt::from)),
        ("b", expected.b.map(BigInt::from)),
        ("r", expected.r.map(BigInt::from)),
        ("postulation", expected.postulation.map(BigInt::from)),
    ];
    for (key, want) in scalars {
        if let Some(want) = want {
            pin(&mut out, format!("expected_{key}"), computed(report, key), want);
        }
    }
    if let Some(e) = &expected.e {
        let got = report["e"].as_array().cloned().unwrap_or_default();
        if got.len() != e.len() {
            pin(&mut out, "expected_e_len".into(), Some(BigInt::from(got.len())), BigInt::from(e.len()));
        }
        for (i, &want) in e.iter().enumerate() {
            let v = got.get(i).and_then(Value::as_i64).map(BigInt::from);
            pin(&mut out, format!("expected_e_{i}"), v, BigInt::from(want));
        }
    }
    out
}

fn failed_names(checks: &Value) -> Vec<String> {
    checks
        .as_array()
        .map(|a| {
            a.iter()
                .filter(|c| c["status"] == "fail")
                .filter_map(|c| c["name"].as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default()
}

fn compute_core(case: &CaseFile, id: &str) -> Result<CachedCore, Error> {
    let outcome = verify_case(&case.spec, &case.config)?;
    Ok(CachedCore {
        id: id.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        primes: case.config.primes(),
        seed: case.config.seed,
        report: serde_json::to_value(&outcome.report).expect("report serializes"),
        ledger: serde_json::to_value(&outcome.ledger).expect("ledger serializes"),
        verdict: serde_json::to_value(&outcome.verdict).expect("verdict serializes"),
    })
}

/// Runs one case, consulting and filling `cache` when given.
pub fn run_case(case: &CaseFile, cache: Option<&Cache>, timings: bool) -> ReportRecord {
    let start = Instant::now();
    let id = case_id(&case.spec, &case.config);
    let primes = case.config.primes();
    let mut cached = false;
    let mut core = None;
    if let Some(c) = cache {
        match c.lookup(&id, TOOL_VERSION, &primes, case.config.seed) {
            Lookup::Hit(hit) => {
                core = Some(*hit);
                cached = true;
            }
            Lookup::Evicted(why) => eprintln!("warning: evicted cache entry {why}"),
            Lookup::Miss => {}
        }
    }
    let core = match core {
        Some(c) => Ok(c),
        None => compute_core(case, &id).inspect(|fresh| {
            if let Some(c) = cache {
                if let Err(e) = c.store(fresh) {
                    eprintln!("warning: cannot write cache entry {id}: {e}");
                }
            }
        }),
    };
    let mut record = ReportRecord {
        id,
        label: case.label.clone(),
        tool_version: TOOL_VERSION.to_string(),
        primes,
        seed: case.config.seed,
        status: RecordStatus::Pass,
        reason: None,
        spec: Some(CanonicalSpec::from(&case.spec)),
        report: None,
        ledger: None,
        verdict: None,
        expected: Vec::new(),
        failures: Vec::new(),
        run: RunInfo { cached, elapsed_ms: None },
    };
    match core {
        Ok(core) => {
            let pins = expectation_checks(&core.report, &case.expected);
            let pins_json = serde_json::to_value(&pins).expect("checks serialize");
            let mut failures = failed_names(&core.verdict["checks"]);
            failures.extend(failed_names(&pins_json));
            record.status = if failures.is_empty() { RecordStatus::Pass } else { RecordStatus::Fail };
            record.failures = failures;
            record.expected = pins_json.as_array().cloned().unwrap_or_default();
            record.report = Some(core.report);
            record.ledger = Some(core.ledger);
            record.verdict = Some(core.verdict);
        }
        Err(e) => {
            record.status = match &e {
                e if e.is_resource() => RecordStatus::ResourceLimited,
                Error::Unsupported(_) => RecordStatus::Unsupported,
                _ => RecordStatus::Error,
            };
            record.reason = Some(e.to_string());
        }
    }
    if timings {
        record.run.elapsed_ms = Some((start.elapsed().as_secs_f64() * 1e3 * 1e3).round() / 1e3);
    }
    record
}

/// Exit code for a batch: 1 on any failure, else 2 on any input error, else 3 on any resource ceiling.
pub fn exit_code<'a>(statuses: impl IntoIterator<Item = &'a RecordStatus>) -> i32 {
    let all: Vec<_> = statuses.into_iter().collect();
    if all.iter().any(|s| matches!(s, RecordStatus::Fail | RecordStatus::Error)) {
        1
    } else if all.iter().any(|s| matches!(s, RecordStatus::InputError | RecordStatus::Unsupported)) {
        2
    } else if all.iter().any(|s| matches!(s, RecordStatus::ResourceLimited)) {
        3
    } else {
        0
    }
}

/// `exact` for short values, otherwise scientific notation with the digit count.
pub fn render_bound(decimal: &str) -> String {
    match decimal.parse::<BigInt>() {
        Ok(v) if decimal_digits(&v) > 12 => format!("≈ {} ({} digits)", scientific(&v), decimal_digits(&v)),
        Ok(v) => v.to_string(),
        Err(_) => decimal.to_string(),
    }
}

fn show(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Array(a) => format!("({})", a.iter().map(show).collect::<Vec<_>>().join(", ")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Human-readable summary of one record.
pub fn render_human(rec: &ReportRecord) -> String {
    let mut out = format!("case {} [{}]{}\n", rec.label, rec.id, if rec.run.cached { " (cached)" } else { "" });
    out.push_str(&format!("status: {}\n", show(&serde_json::to_value(rec.status).expect("status"))));
    if let Some(reason) = &rec.reason {
        out.push_str(&format!("reason: {reason}\n"));
    }
    let Some(r) = &rec.report else { return out };
    out.push_str(&format!(
        "  regime {}  n = {}  d = {}  depth = {}  pd = {}  r = {}\n",
        show(&r["regime"]),
        show(&r["n"]),
        show(&r["d"]),
        show(&r["depth"]),
        show(&r["pd"]),
        show(&r["r"])
    ));
    out.push_str(&format!(
        "  reg = {}  reg1 = {}  reg_bar = {}  h0 = {}  B = {}\n",
        show(&r["reg"]),
        show(&r["reg1"]),
        show(&r["reg_bar"]),
        show(&r["h0"]),
        show(&r["b"])
    ));
    out.push_str(&format!(
        "  e = {}  postulation = {} ({})\n",
        show(&r["e"]),
        show(&r["postulation"]),
        show(&r["certification"])
    ));
    if let Some(values) = rec.ledger.as_ref().and_then(|l| l["values"].as_object()) {
        out.push_str("  bounds:\n");
        for (name, v) in values {
            out.push_str(&format!("    {name:<34} {}\n", render_bound(v.as_str().unwrap_or_default())));
        }
    }
    if let Some(checks) = rec.verdict.as_ref().and_then(|v| v["checks"].as_array()) {
        let all = checks.iter().chain(rec.expected.iter());
        let mut counts = std::collections::BTreeMap::new();
        for c in all.clone() {
            *counts.entry(c["status"].as_str().unwrap_or("?").to_string()).or_insert(0usize) += 1;
        }
        let summary: Vec<String> = counts.iter().map(|(k, v)| format!("{v} {k}")).collect();
        out.push_str(&format!("  checks: {}\n", summary.join(", ")));
        for c in all.filter(|c| c["status"] == "fail") {
            out.push_str(&format!(
                "    FAIL {}: {} {} {}\n",
                show(&c["name"]),
                show(&c["lhs"]),
                show(&c["relation"]),
                show(&c["rhs"])
            ));
        }
    }
    out
}
