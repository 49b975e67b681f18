//! Case files: TOML documents describing one filtration and, optionally, pinned values.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use hilbertforge_core::hilbert::FiltrationSpec;
use hilbertforge_core::linalg::{CHECK_PRIME, DEFAULT_PRIME};
use hilbertforge_core::monomial::{MonomialIdeal, RingSpec};
use hilbertforge_core::verifier::EngineConfig;
use serde::{Deserialize, Serialize};
use toml::Spanned;

type Gens = Vec<Vec<u32>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    label: Option<String>,
    seed: Option<u64>,
    ring: Spanned<RawRing>,
    q: Spanned<Gens>,
    j: Option<Spanned<Gens>>,
    initial: Option<Spanned<Vec<Gens>>>,
    expected: Option<Expected>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    n: usize,
    primes: Option<Vec<u64>>,
}

/// Values a case pins for regression. Absent fields are not compared.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reg: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h0: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub postulation: Option<usize>,
}

impl Expected {
    pub fn is_empty(&self) -> bool {
        *self == Expected::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseFile {
    pub label: String,
    pub spec: FiltrationSpec,
    pub config: EngineConfig,
    pub expected: Expected,
}

/// A diagnostic anchored at a 1-based line and column of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for CaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.origin, self.line, self.column, self.message)
    }
}

impl std::error::Error for CaseError {}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Source<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn error(&self, span: Option<Range<usize>>, message: impl Into<String>) -> CaseError {
        let (line, column) = span.map_or((1, 1), |s| position(self.text, s.start));
        CaseError { origin: self.origin.to_string(), line, column, message: message.into() }
    }

    fn ideal(&self, n: usize, gens: &Spanned<Gens>, what: &str) -> Result<MonomialIdeal, CaseError> {
        if let Some((k, g)) = gens.get_ref().iter().enumerate().find(|(_, g)| g.len() != n) {
            return Err(self.error(
                Some(gens.span()),
                format!("{what}: generator {} has {} exponents, ring has {n} variables", k + 1, g.len()),
            ));
        }
        MonomialIdeal::from_exponents(n, gens.get_ref()).map_err(|e| self.error(Some(gens.span()), format!("{what}: {e}")))
    }
}

/// Parses case-file text. `origin` names the source in diagnostics.
pub fn parse_case_str(text: &str, origin: &str) -> Result<CaseFile, CaseError> {
    let src = Source { origin, text };
    let raw: RawCase = toml::from_str(text).map_err(|e| src.error(e.span(), e.message().trim_end().to_string()))?;

    let ring_span = raw.ring.span();
    let ring_raw = raw.ring.into_inner();
    let (prime, check_prime) = match ring_raw.primes.as_deref() {
        None => (DEFAULT_PRIME, Some(CHECK_PRIME)),
        Some([p]) => (*p, None),
        Some([p, c]) => (*p, Some(*c)),
        Some(_) => return Err(src.error(Some(ring_span), "ring.primes lists one or two primes")),
    };
    let ring = RingSpec::new(ring_raw.n, prime).map_err(|e| src.error(Some(ring_span.clone()), e.to_string()))?;
    if let Some(c) = check_prime {
        RingSpec::new(ring_raw.n, c).map_err(|e| src.error(Some(ring_span), e.to_string()))?;
    }
    let n = ring.n;

    let q = src.ideal(n, &raw.q, "q")?;
    let j = match &raw.j {
        Some(j) => src.ideal(n, j, "j")?,
        None => MonomialIdeal::maximal(n),
    };
    let mut chain = Vec::new();
    if let Some(init) = &raw.initial {
        for (k, gens) in init.get_ref().iter().enumerate() {
            let spanned = Spanned::new(init.span(), gens.clone());
            chain.push(src.ideal(n, &spanned, &format!("initial[{k}]"))?);
        }
    }
    let anchor = match (&raw.initial, &raw.j) {
        (Some(i), _) => i.span(),
        (None, Some(j)) => j.span(),
        (None, None) => raw.q.span(),
    };
    let spec = FiltrationSpec::new(ring, q, j, chain).map_err(|e| src.error(Some(anchor), e.to_string()))?;

    let label = raw.label.unwrap_or_else(|| {
        Path::new(origin).file_stem().map_or_else(|| origin.to_string(), |s| s.to_string_lossy().into_owned())
    });
    Ok(CaseFile {
        label,
        spec,
        config: EngineConfig { prime, check_prime, seed: raw.seed.unwrap_or(0) },
        expected: raw.expected.unwrap_or_default(),
    })
}

/// Reads and parses a case file.
pub fn parse_case_file(path: &Path) -> Result<CaseFile, CaseError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CaseError { origin: origin.clone(), line: 1, column: 1, message: format!("cannot read: {e}") })?;
    parse_case_str(&text, &origin)
}

fn gens_literal(ideal: &MonomialIdeal) -> String {
    let tuples: Vec<String> = ideal
        .exponent_tuples()
        .iter()
        .map(|t| format!("[{}]", t.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", tuples.join(", "))
}

/// Renders a case in the canonical layout; `parse_case_str` inverts it.
pub fn emit_case(case: &CaseFile) -> String {
    let spec = &case.spec;
    let n = spec.ring.n;
    let mut out = String::new();
    out.push_str(&format!("label = {}\n", toml::Value::String(case.label.clone())));
    if case.config.seed != 0 {
        out.push_str(&format!("seed = {}\n", case.config.seed));
    }
    out.push_str(&format!("q = {}\n", gens_literal(&spec.q)));
    if spec.j != MonomialIdeal::maximal(n) {
        out.push_str(&format!("j = {}\n", gens_literal(&spec.j)));
    }
    if spec.initial.len() > 1 {
        let chain: Vec<String> = spec.initial[1..].iter().map(gens_literal).collect();
        out.push_str(&format!("initial = [{}]\n", chain.join(", ")));
    }
    out.push_str(&format!("\n[ring]\nn = {n}\n"));
    let default_primes = case.config.prime == DEFAULT_PRIME && case.config.check_prime == Some(CHECK_PRIME);
    if !default_primes {
        let primes: Vec<String> = case.config.primes().iter().map(u64::to_string).collect();
        out.push_str(&format!("primes = [{}]\n", primes.join(", ")));
    }
    if !case.expected.is_empty() {
        out.push_str("\n[expected]\n");
        out.push_str(&toml::to_string(&case.expected).expect("plain table"));
    }
    out
}
