//! Koszul homology, regularity, depth, and chains of generic hyperplane sections.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    cyclic_module, h0_functionals, h0_graded, quotient_by_linear_form, LinearForm, PrimeFieldMatrix,
    SparseVec, TruncatedGradedModule,
};
use crate::monomial::{MonomialIdeal, RingSpec};

/// Largest truncation degree any Koszul or section computation may request.
pub const MAX_TRUNCATION: usize = 160;

/// Redraws allowed per stage before a section chain gives up.
pub const CERTIFICATION_ATTEMPTS: u64 = 8;

/// Graded Betti numbers `β_{i,j} = dim Tor_i(E, K)_j`, nonzero entries only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiTable {
    entries: BTreeMap<(usize, usize), usize>,
}

impl Serialize for BettiTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for (&(i, j), &b) in &self.entries {
            seq.serialize_element(&[i, j, b])?;
        }
        seq.end()
    }
}

impl BettiTable {
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, usize, usize)>) -> Self {
        BettiTable { entries: entries.into_iter().filter(|e| e.2 > 0).map(|(i, j, b)| ((i, j), b)).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.entries.iter().map(|(&(i, j), &b)| (i, j, b))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Coefficients of `Σ_{i,j} (-1)^i β_{i,j} t^j`, the Hilbert-series numerator over `(1-t)^n`.
    pub fn euler_numerator(&self) -> Vec<i64> {
        let top = self.entries.keys().map(|&(_, j)| j).max().unwrap_or(0);
        let mut out = vec![0i64; top + 1];
        for (i, j, b) in self.entries() {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            out[j] += sign * b as i64;
        }
        while out.len() > 1 && out.last() == Some(&0) {
            out.pop();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HomologicalProfile {
    pub reg: i64,
    pub reg1: i64,
    pub pd: usize,
    pub depth: usize,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Differential `K_i → K_{i-1}` of the Koszul complex on all variables, in internal degree `j`.
fn koszul_differential(e: &TruncatedGradedModule, i: usize, j: usize, subs: &[Vec<Vec<usize>>]) -> PrimeFieldMatrix {
    let p = e.ring().p;
    let src_dim = e.dim(j - i);
    let tgt_dim = e.dim(j + 1 - i);
    let tgt_index: BTreeMap<&[usize], usize> =
        subs[i - 1].iter().enumerate().map(|(k, s)| (s.as_slice(), k * tgt_dim)).collect();
    let mut columns: Vec<SparseVec> = Vec::with_capacity(subs[i].len() * src_dim);
    for s in &subs[i] {
        let faces: Vec<(usize, usize, bool)> = (0..s.len())
            .map(|pos| {
                let mut t = s.clone();
                let var = t.remove(pos);
                (var, tgt_index[t.as_slice()], pos % 2 == 1)
            })
            .collect();
        for b in 0..src_dim {
            let mut col: SparseVec = Vec::new();
            for &(var, offset, negative) in &faces {
                for &(r, v) in e.mult(var, j - i).column(b) {
                    let v = if negative { p - v } else { v };
                    col.push((offset as u32 + r, v));
                }
            }
            col.sort_by_key(|x| x.0);
            columns.push(col);
        }
    }
    PrimeFieldMatrix::from_entries(
        subs[i - 1].len() * tgt_dim,
        columns.len(),
        p,
        columns.into_iter().enumerate().flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r as usize, c, v))),
    )
}

/// Betti numbers of `e` in every internal degree `j <= e.top()`, by Koszul homology.
///
/// Degree-`j` Koszul homology only involves `E_{j-n}, ..., E_j`, so each entry is exact.
pub fn koszul_betti(e: &TruncatedGradedModule) -> BettiTable {
    let n = e.ring().n;
    let subs: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets(n, k)).collect();
    let mut entries = Vec::new();
    for j in 0..=e.top() {
        // ranks[i] = rank of d_i in degree j, for 1 <= i <= min(n, j)
        let imax = n.min(j);
        let mut ranks = vec![0usize; imax + 2];
        for (i, rank) in ranks.iter_mut().enumerate().take(imax + 1).skip(1) {
            if e.dim(j - i) > 0 && e.dim(j + 1 - i) > 0 {
                *rank = koszul_differential(e, i, j, &subs).rank();
            }
        }
        for i in 0..=imax {
            let chain_dim = subs[i].len() * e.dim(j - i);
            let beta = chain_dim - ranks[i] - ranks[i + 1];
            if beta > 0 {
                entries.push((i, j, beta));
            }
        }
    }
    BettiTable::from_entries(entries)
}

/// Betti table of `R/q`, truncating at the degree of the lcm of the generators.
///
/// Every multidegree carrying a Betti number of `R/q` divides that lcm, so the
/// table is complete.
pub fn betti_of_ideal(q: &MonomialIdeal, ring: RingSpec) -> Result<BettiTable> {
    let top = q.lcm_degree() as usize;
    if top > MAX_TRUNCATION {
        return Err(Error::ResourceCeiling(format!("Koszul truncation {top} > {MAX_TRUNCATION}")));
    }
    let e = cyclic_module(q, top, ring)?;
    Ok(koszul_betti(&e))
}

/// Regularity, projective dimension, and depth from a Betti table.
///
/// `saturated` is the table of the module modulo its `H⁰`; when omitted (or when
/// the depth is positive) `reg1 = reg`.
pub fn homological_profile(b: &BettiTable, saturated: Option<&BettiTable>, n: usize) -> Result<HomologicalProfile> {
    fn reg_pd(b: &BettiTable) -> Result<(i64, usize)> {
        if b.is_empty() {
            return Err(Error::Malformed("empty Betti table".into()));
        }
        let reg = b.entries().map(|(i, j, _)| j as i64 - i as i64).max().expect("nonempty");
        let pd = b.entries().map(|(i, _, _)| i).max().expect("nonempty");
        Ok((reg, pd))
    }
    let (reg, pd) = reg_pd(b)?;
    let depth = n - pd;
    let reg1 = match saturated {
        Some(sat) if depth == 0 => reg_pd(sat)?.0,
        _ => reg,
    };
    Ok(HomologicalProfile { reg, reg1, pd, depth })
}

/// Whether `f` is filter-regular on `e`: its kernel lies inside `H⁰_m(e)` in every degree
/// the truncation can see (at least through `reg_e + 1`).
pub fn filter_regular_check(e: &TruncatedGradedModule, f: &LinearForm, reg_e: usize) -> Result<bool> {
    if e.top() < reg_e + 2 {
        return Err(Error::TruncationTooLow { have: e.top(), need: reg_e + 2 });
    }
    let funcs = h0_functionals(e, reg_e)?;
    for j in 0..e.top() {
        let a = e.multiplication_by_form(f, j).transpose();
        let mut ech = crate::linalg::Echelon::new(e.ring().p);
        for c in 0..a.cols() {
            ech.insert(a.column(c).clone());
        }
        let rank_a = ech.rank();
        if rank_a == e.dim(j) {
            continue;
        }
        if j > reg_e {
            return Ok(false);
        }
        // ker(A) ⊆ ker(P) iff the rows of P lie in the row space of A
        for phi in funcs[j].basis() {
            if ech.insert(phi.clone()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionChainReport {
    /// `ℓ(M/(y_1, ..., y_d)M)`.
    pub b: u64,
    /// `h⁰(M_i)` for `0 <= i < d`.
    pub h0_chain: Vec<u64>,
    /// Seed used for the accepted form at each stage.
    pub seeds: Vec<u64>,
    /// Draws rejected by the certificate before acceptance, per stage.
    pub rejected: Vec<u64>,
    /// Every form passed `filter_regular_check`.
    pub filter_regular: bool,
    /// The final Artinian quotient vanishes above `reg`.
    pub artinian_top_clear: bool,
    /// Depth read off the chain: the first `i` with `h⁰(M_i) > 0`, else `d`.
    pub depth: usize,
}

fn stage_seed(seed: u64, stage: usize, attempt: u64) -> u64 {
    // splitmix64 over the packed triple
    let mut z = seed ^ ((stage as u64) << 32) ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Cuts `R/q` by `d` certified generic linear forms, recording `h⁰` along the way and the final length `B`.
///
/// `reg` must be `reg(R/q)`; the truncation is `reg + d + 2`.
pub fn section_chain(q: &MonomialIdeal, d: usize, reg: usize, seed: u64, ring: RingSpec) -> Result<SectionChainReport> {
    let top = reg + d + 2;
    if top > MAX_TRUNCATION {
        return Err(Error::ResourceCeiling(format!("section truncation {top} > {MAX_TRUNCATION}")));
    }
    let mut module = cyclic_module(q, top, ring)?;
    let mut h0_chain = Vec::with_capacity(d);
    let mut seeds = Vec::with_capacity(d);
    let mut rejected = Vec::with_capacity(d);
    for stage in 0..d {
        h0_chain.push(h0_graded(&module, reg)?.iter().sum::<usize>() as u64);
        let mut tried = Vec::new();
        let mut accepted = None;
        for attempt in 0..CERTIFICATION_ATTEMPTS {
            let s = stage_seed(seed, stage, attempt);
            tried.push(s);
            let f = LinearForm::random(&ring, &mut ChaCha8Rng::seed_from_u64(s));
            if filter_regular_check(&module, &f, reg)? {
                accepted = Some((s, f));
                break;
            }
        }
        let (s, f) = accepted.ok_or(Error::CertificationFailed { stage, seeds: tried.clone() })?;
        seeds.push(s);
        rejected.push(tried.len() as u64 - 1);
        module = quotient_by_linear_form(&module, &f)?;
    }
    let artinian_top_clear = (reg + 1..=module.top()).all(|j| module.dim(j) == 0);
    let depth = h0_chain.iter().position(|&h| h > 0).unwrap_or(d);
    Ok(SectionChainReport {
        b: module.total_dim() as u64,
        h0_chain,
        seeds,
        rejected,
        filter_regular: true,
        artinian_top_clear,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> RingSpec {
        RingSpec::new(n, 32003).unwrap()
    }

    fn ideal(n: usize, gens: &[&[u32]]) -> MonomialIdeal {
        MonomialIdeal::from_exponents(n, &gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn betti_free_module() {
        for n in 1..4 {
            let b = betti_of_ideal(&MonomialIdeal::zero(n), ring(n)).unwrap();
            assert_eq!(b.entries().collect::<Vec<_>>(), vec![(0, 0, 1)]);
            let prof = homological_profile(&b, None, n).unwrap();
            assert_eq!((prof.reg, prof.depth), (0, n));
        }
    }

    #[test]
    fn betti_of_stable_family() {
        for s in 1..7u32 {
            let b = betti_of_ideal(&ideal(2, &[&[2, 0], &[1, s]]), ring(2)).unwrap();
            let mut expect = BettiTable::from_entries(vec![(0, 0, 1), (1, 2, 1), (2, s as usize + 2, 1)]);
            if s == 1 {
                expect = BettiTable::from_entries(vec![(0, 0, 1), (1, 2, 2), (2, 3, 1)]);
            } else {
                expect.entries.insert((1, s as usize + 1), 1);
            }
            assert_eq!(b, expect, "s = {s}");
            let sat = betti_of_ideal(&ideal(2, &[&[1, 0]]), ring(2)).unwrap();
            let prof = homological_profile(&b, Some(&sat), 2).unwrap();
            assert_eq!(prof, HomologicalProfile { reg: s as i64, reg1: 0, pd: 2, depth: 0 });
        }
    }

    #[test]
    fn betti_complete_intersection() {
        for (a, b) in [(2u32, 3u32), (3, 3), (1, 4)] {
            let t = betti_of_ideal(&ideal(2, &[&[a, 0], &[0, b]]), ring(2)).unwrap();
            assert_eq!(t.get(2, (a + b) as usize), 1);
            if a == b {
                assert_eq!(t.get(1, a as usize), 2);
            } else {
                assert_eq!(t.get(1, a as usize), 1);
                assert_eq!(t.get(1, b as usize), 1);
            }
            let prof = homological_profile(&t, None, 2).unwrap();
            assert_eq!(prof.reg, (a + b) as i64 - 2);
            assert_eq!(prof.depth, 0);
        }
    }

    #[test]
    fn empty_table_is_an_error() {
        assert!(homological_profile(&BettiTable::default(), None, 2).is_err());
    }

    #[test]
    fn filter_regular_examples() {
        let r2 = ring(2);
        let q = ideal(2, &[&[2, 0], &[1, 2]]);
        let e = cyclic_module(&q, 5, r2).unwrap();
        assert!(filter_regular_check(&e, &LinearForm::new(&r2, vec![0, 1]).unwrap(), 2).unwrap());
        let xy = ideal(2, &[&[1, 1]]);
        let e = cyclic_module(&xy, 4, r2).unwrap();
        assert!(!filter_regular_check(&e, &LinearForm::new(&r2, vec![1, 0]).unwrap(), 1).unwrap());
        assert!(filter_regular_check(&e, &LinearForm::new(&r2, vec![3, 5]).unwrap(), 1).unwrap());
        let free = cyclic_module(&MonomialIdeal::zero(2), 3, r2).unwrap();
        assert!(filter_regular_check(&free, &LinearForm::new(&r2, vec![7, 11]).unwrap(), 0).unwrap());
        assert!(filter_regular_check(&free, &LinearForm::new(&r2, vec![7, 11]).unwrap(), 2).is_err());
    }

    #[test]
    fn section_chain_examples() {
        let rep = section_chain(&MonomialIdeal::zero(3), 3, 0, 7, ring(3)).unwrap();
        assert_eq!((rep.b, rep.h0_chain.clone(), rep.depth), (1, vec![0, 0, 0], 3));
        for s in 1..6u32 {
            let rep = section_chain(&ideal(2, &[&[2, 0], &[1, s]]), 1, s as usize, 42, ring(2)).unwrap();
            assert_eq!(rep.b, 2);
            assert_eq!(rep.h0_chain, vec![s as u64]);
            assert!(rep.artinian_top_clear);
            assert_eq!(rep.depth, 0);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let q = ideal(3, &[&[2, 0, 0], &[1, 1, 0], &[1, 0, 2]]);
        let a = section_chain(&q, 2, 2, 99, ring(3)).unwrap();
        let b = section_chain(&q, 2, 2, 99, ring(3)).unwrap();
        assert_eq!(a, b);
    }
}
