//! Built-in families with closed-form invariants.

use hilbertforge_core::hilbert::FiltrationSpec;
use hilbertforge_core::linalg::DEFAULT_PRIME;
use hilbertforge_core::monomial::{MonomialIdeal, RingSpec};
use hilbertforge_core::verifier::EngineConfig;

use crate::casefile::{CaseFile, Expected};

fn m_adic(n: usize, gens: &[Vec<u32>]) -> FiltrationSpec {
    let ring = RingSpec::new(n, DEFAULT_PRIME).expect("small ring");
    let q = MonomialIdeal::from_exponents(n, gens).expect("valid generators");
    FiltrationSpec::adic(ring, q, MonomialIdeal::maximal(n)).expect("valid filtration")
}

/// `(x², xy^s)`: a line with an embedded point of length `s`.
pub fn stable_pair(s: u32) -> CaseFile {
    CaseFile {
        label: format!("stable-pair-s{s}"),
        spec: m_adic(2, &[vec![2, 0], vec![1, s]]),
        config: EngineConfig::default(),
        expected: Expected {
            d: Some(1),
            depth: Some(0),
            reg: Some(s as i64),
            h0: Some(s as u64),
            b: Some(2),
            r: Some(0),
            e: Some(vec![1, -(s as i64)]),
            postulation: Some(s as usize),
        },
    }
}

/// `(x_0², x_0x_1, ..., x_0x_{d-1}, x_0x_d^s)` in `d + 1` variables.
pub fn embedded_point(d: usize, s: u32) -> CaseFile {
    let n = d + 1;
    let mut gens = Vec::with_capacity(n);
    let mut lead = vec![0; n];
    lead[0] = 2;
    gens.push(lead);
    for k in 1..n {
        let mut g = vec![0; n];
        g[0] = 1;
        g[k] = if k == d { s } else { 1 };
        gens.push(g);
    }
    let mut e = vec![0i64; d + 1];
    e[0] = 1;
    e[d] = if d.is_multiple_of(2) { s as i64 } else { -(s as i64) };
    CaseFile {
        label: format!("embedded-point-d{d}-s{s}"),
        spec: m_adic(n, &gens),
        config: EngineConfig::default(),
        expected: Expected { d: Some(d), depth: Some(0), r: Some(0), e: Some(e), ..Default::default() },
    }
}

pub fn stable_pair_suite() -> Vec<CaseFile> {
    (1..=10).map(stable_pair).collect()
}

pub fn embedded_point_suite() -> Vec<CaseFile> {
    (1..=3).flat_map(|d| (1..=4).map(move |s| embedded_point(d, s))).collect()
}
