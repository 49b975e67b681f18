//! Seeded random cases, shrinking of failures, and the finiteness consequence check.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::analyze::{EngineConfig, InvariantReport, Regime};
use super::checks::{CheckRecord, CheckStatus, Relation};
use super::{verify_case_with, CaseOutcome};
use crate::bounds::{reg_bound_depth, tail_coeff_bound, xi};
use crate::error::{Error, Result};
use crate::hilbert::FiltrationSpec;
use crate::monomial::{minimalize, Monomial, MonomialIdeal, RingSpec};

/// Deliberate corruption applied to a report before checking, to exercise the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    FlipFirstCoefficientSign,
}

impl Fault {
    pub fn apply(self, rep: &mut InvariantReport) {
        match self {
            Fault::FlipFirstCoefficientSign => {
                if rep.e.len() > 1 {
                    rep.e[1] = -rep.e[1];
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzParams {
    pub count: usize,
    pub seed: u64,
    pub n_max: usize,
    pub deg_max: u32,
    pub gen_max: usize,
    /// Every `k`-th case uses a non-maximal `J` or an initial chain (`0` disables).
    pub general_every: usize,
    pub fault: Option<Fault>,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams { count: 500, seed: 42, n_max: 4, deg_max: 6, gen_max: 4, general_every: 5, fault: None }
    }
}

/// Redraws of `Q` before a case is skipped.
const DRAW_ATTEMPTS: usize = 8;

fn case_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_monomial(rng: &mut ChaCha8Rng, n: usize, deg_min: u32, deg_max: u32) -> Monomial {
    let deg = rng.gen_range(deg_min..=deg_max);
    let mut e = vec![0u32; n];
    for _ in 0..deg {
        e[rng.gen_range(0..n)] += 1;
    }
    Monomial::new(e).expect("small exponents")
}

/// Draws case `index`. `Err` carries the reason a draw is skipped.
pub fn generate_case(params: &FuzzParams, index: usize) -> std::result::Result<FiltrationSpec, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed(params.seed, index));
    let general = params.general_every > 0 && index % params.general_every == params.general_every - 1;
    let n_cap = if general { params.n_max.min(3) } else { params.n_max };
    let n = rng.gen_range(1..=n_cap.max(1));
    let ring = RingSpec::new(n, crate::linalg::DEFAULT_PRIME).map_err(|e| e.to_string())?;
    let mut draw = || -> std::result::Result<MonomialIdeal, String> {
        // occasionally the zero ideal; a single variable admits nothing else of positive dimension
        let k = if n == 1 || rng.gen_bool(0.04) { 0 } else { rng.gen_range(1..=params.gen_max.max(1)) };
        let gens: Vec<Monomial> = (0..k).map(|_| random_monomial(&mut rng, n, 1, params.deg_max)).collect();
        let q = minimalize(n, gens).map_err(|e| e.to_string())?;
        classify_draw(&q).map(|_| q)
    };
    let mut attempt = draw();
    for _ in 1..DRAW_ATTEMPTS {
        if attempt.is_ok() {
            break;
        }
        attempt = draw();
    }
    let q = attempt?;
    if !general {
        return FiltrationSpec::adic(ring, q, MonomialIdeal::maximal(n)).map_err(|e| e.to_string());
    }
    // m-primary J: pure powers of exponent 1..=2 plus an optional mixed generator
    let mut jg: Vec<Monomial> = (0..n).map(|i| Monomial::pure_power(i, n, rng.gen_range(1..=2))).collect();
    if n > 1 && rng.gen_bool(0.5) {
        jg.push(random_monomial(&mut rng, n, 2, 2));
    }
    let j = minimalize(n, jg).map_err(|e| e.to_string())?;
    let with_chain = rng.gen_bool(0.5);
    if !with_chain || j == MonomialIdeal::maximal(n) {
        return FiltrationSpec::adic(ring, q, j).map_err(|e| e.to_string());
    }
    let base = j.sum(&q).map_err(|e| e.to_string())?;
    let extra = (0..16)
        .map(|_| random_monomial(&mut rng, n, 1, 2))
        .find(|m| !base.contains(m))
        .ok_or_else(|| "no monomial outside J + Q for the initial chain".to_string())?;
    let n1 = base.sum(&minimalize(n, vec![extra]).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    FiltrationSpec::new(ring, q, j, vec![n1]).map_err(|e| e.to_string())
}

/// Rejects draws outside the supported domain.
pub fn classify_draw(q: &MonomialIdeal) -> std::result::Result<(), String> {
    if q.is_unit() {
        return Err("unit ideal: the module is zero".into());
    }
    match q.krull_dim() {
        Ok(0) => Err("dimension 0: the module must have positive dimension".into()),
        Ok(_) => Ok(()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FuzzCaseStatus {
    Passed,
    Skipped { reason: String },
    ResourceLimited { reason: String },
    Failed { checks: Vec<String>, shrunk: FiltrationSpec },
    Error { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzCaseResult {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<FiltrationSpec>,
    pub status: FuzzCaseStatus,
    #[serde(skip)]
    pub outcome: Option<CaseOutcome>,
}

fn failing_names(outcome: &CaseOutcome) -> Vec<String> {
    outcome.verdict.failures().map(|c| c.name.clone()).collect()
}

/// Runs one fuzz case end to end, shrinking on failure.
pub fn fuzz_case(params: &FuzzParams, cfg: &EngineConfig, index: usize) -> FuzzCaseResult {
    let spec = match generate_case(params, index) {
        Ok(s) => s,
        Err(reason) => return FuzzCaseResult { index, spec: None, status: FuzzCaseStatus::Skipped { reason }, outcome: None },
    };
    let status_and_outcome = match verify_case_with(&spec, cfg, params.fault) {
        Ok(outcome) if outcome.verdict.passed() => (FuzzCaseStatus::Passed, Some(outcome)),
        Ok(outcome) => {
            let checks = failing_names(&outcome);
            let shrunk = shrink(&spec, cfg, params.fault);
            (FuzzCaseStatus::Failed { checks, shrunk }, Some(outcome))
        }
        Err(e) if e.is_resource() => (FuzzCaseStatus::ResourceLimited { reason: e.to_string() }, None),
        Err(Error::Unsupported(reason)) => (FuzzCaseStatus::Skipped { reason }, None),
        Err(e) => (FuzzCaseStatus::Error { reason: e.to_string() }, None),
    };
    FuzzCaseResult { index, spec: Some(spec), status: status_and_outcome.0, outcome: status_and_outcome.1 }
}

fn still_fails(spec: &FiltrationSpec, cfg: &EngineConfig, fault: Option<Fault>) -> bool {
    matches!(verify_case_with(spec, cfg, fault), Ok(o) if !o.verdict.passed())
}

fn rebuild(spec: &FiltrationSpec, gens: Vec<Monomial>) -> Option<FiltrationSpec> {
    let n = spec.ring.n;
    let q = minimalize(n, gens).ok()?;
    classify_draw(&q).ok()?;
    FiltrationSpec::new(spec.ring, q, spec.j.clone(), spec.initial[1..].to_vec()).ok()
}

/// Greedy shrinking: drop generators of `Q`, then lower exponents, while some check still fails.
pub fn shrink(spec: &FiltrationSpec, cfg: &EngineConfig, fault: Option<Fault>) -> FiltrationSpec {
    let mut best = spec.clone();
    loop {
        let gens = best.q.gens().to_vec();
        let mut candidates: Vec<Vec<Monomial>> = Vec::new();
        for k in 0..gens.len() {
            let mut g = gens.clone();
            g.remove(k);
            candidates.push(g);
        }
        for k in 0..gens.len() {
            for v in 0..best.ring.n {
                if gens[k].exps()[v] > 0 {
                    let mut e = gens[k].exps().to_vec();
                    e[v] -= 1;
                    if e.iter().all(|&x| x == 0) {
                        continue;
                    }
                    let mut g = gens.clone();
                    g[k] = Monomial::new(e).expect("lowered exponent");
                    candidates.push(g);
                }
            }
        }
        let next = candidates
            .into_iter()
            .filter_map(|g| rebuild(&best, g))
            .filter(|s| s.q != best.q)
            .find(|s| still_fails(s, cfg, fault));
        match next {
            Some(s) => best = s,
            None => return best,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzSummary {
    pub params: FuzzParams,
    pub passed: usize,
    pub skipped: Vec<(usize, String)>,
    pub resource_limited: Vec<(usize, String)>,
    pub errors: Vec<(usize, String)>,
    pub failures: Vec<FuzzCaseResult>,
    pub finiteness: Vec<CheckRecord>,
}

impl FuzzSummary {
    pub fn clean(&self) -> bool {
        self.failures.is_empty()
            && self.errors.is_empty()
            && self.finiteness.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// Aggregates per-case results (in index order).
pub fn summarize(params: &FuzzParams, mut results: Vec<FuzzCaseResult>) -> FuzzSummary {
    results.sort_by_key(|r| r.index);
    let reports: Vec<&InvariantReport> =
        results.iter().filter_map(|r| r.outcome.as_ref()).filter(|o| o.verdict.passed()).map(|o| &o.report).collect();
    let finiteness = finiteness_consequence(&reports);
    let mut summary = FuzzSummary {
        params: params.clone(),
        passed: 0,
        skipped: Vec::new(),
        resource_limited: Vec::new(),
        errors: Vec::new(),
        failures: Vec::new(),
        finiteness,
    };
    for r in results {
        match &r.status {
            FuzzCaseStatus::Passed => summary.passed += 1,
            FuzzCaseStatus::Skipped { reason } => summary.skipped.push((r.index, reason.clone())),
            FuzzCaseStatus::ResourceLimited { reason } => summary.resource_limited.push((r.index, reason.clone())),
            FuzzCaseStatus::Error { reason } => summary.errors.push((r.index, reason.clone())),
            FuzzCaseStatus::Failed { .. } => summary.failures.push(r),
        }
    }
    summary
}

/// Sequential fuzz run.
pub fn fuzz(params: &FuzzParams, cfg: &EngineConfig) -> FuzzSummary {
    let results = (0..params.count).map(|i| fuzz_case(params, cfg, i)).collect();
    summarize(params, results)
}

/// Within each class of cases sharing `(d, t, e_0..e_{d-t})`, the number of distinct
/// Hilbert–Samuel functions stays below `N_poly · (P_max + 1)^A`, where `A` bounds the
/// regularity, `N_poly` counts the admissible tails `e_{d-t+1..d}`, and `P_max` is the
/// largest `P(A)` observed in the class.
pub fn finiteness_consequence(reports: &[&InvariantReport]) -> Vec<CheckRecord> {
    type Key = (usize, usize, Vec<i64>);
    let mut classes: BTreeMap<Key, Vec<&InvariantReport>> = BTreeMap::new();
    for rep in reports.iter().filter(|r| r.regime == Regime::A) {
        let key = (rep.d, rep.depth, rep.e[..=rep.d - rep.depth].to_vec());
        classes.entry(key).or_default().push(rep);
    }
    let mut out = Vec::new();
    for ((d, t, head), members) in classes {
        let name = format!("hilbert_function_count_d{d}_t{t}_e{}", head.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("_"));
        let record = match class_bound(d, t, &head, &members) {
            Ok((count, bound)) => CheckRecord::compare(name, BigInt::from(count), Relation::Le, bound, None),
            Err(e) => CheckRecord::inapplicable(name, format!("bound not evaluated: {e}")),
        };
        out.push(record);
    }
    out
}

fn class_bound(d: usize, t: usize, head: &[i64], members: &[&InvariantReport]) -> Result<(usize, BigInt)> {
    let distinct: BTreeSet<(Vec<i64>, Vec<i64>)> = members
        .iter()
        .map(|r| (r.e.clone(), r.samuel_values[..r.postulation.min(r.samuel_values.len())].to_vec()))
        .collect();
    let count = distinct.len();
    let xi_dt = xi(head, d - t);
    let mut n_poly = BigInt::from(1);
    for j in d - t + 1..=d {
        if let Some(b) = tail_coeff_bound(xi_dt, 0, d, t, j)? {
            n_poly *= b.adic.expect("r = 0") * 2 - 1;
        }
    }
    let a = reg_bound_depth(xi_dt, 0, d, t)?;
    let a_small = match u32::try_from(&a) {
        Ok(v) if v < 64 => v,
        // 2^A alone already exceeds any batch size
        _ => return Ok((count, n_poly << 64usize)),
    };
    let p_max = members
        .iter()
        .map(|r| r.samuel_polynomial(a_small as i64))
        .max()
        .unwrap_or(0)
        .max(1);
    Ok((count, n_poly * num_traits::pow(BigInt::from(p_max + 1), a_small as usize)))
}
