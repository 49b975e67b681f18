//! Monomials and monomial ideals in `n` variables.
//!
//! Every ideal is stored through its minimal generating set (an antichain
//! under divisibility), sorted by degree and then lexicographically, so two
//! ideals are equal exactly when their generator lists are equal.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Upper bound on any single exponent.
pub const DEFAULT_EXPONENT_CAP: u32 = 1 << 20;

/// Largest variable count accepted by the subset enumeration in [`MonomialIdeal::krull_dim`].
pub const MAX_VARIABLES: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Result<Self> {
        if let Some(&e) = exps.iter().find(|&&e| e > DEFAULT_EXPONENT_CAP) {
            return Err(Error::ExponentCap { value: e as u64, cap: DEFAULT_EXPONENT_CAP });
        }
        Ok(Monomial { exps })
    }

    pub fn one(n: usize) -> Self {
        Monomial { exps: vec![0; n] }
    }

    pub fn var(i: usize, n: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn pure_power(i: usize, n: usize, e: u32) -> Self {
        let mut exps = vec![0; n];
        exps[i] = e;
        Monomial { exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(&a, &b)| a as u64 + b as u64)
            .map(|e| {
                if e > DEFAULT_EXPONENT_CAP as u64 {
                    Err(Error::ExponentCap { value: e, cap: DEFAULT_EXPONENT_CAP })
                } else {
                    Ok(e as u32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Monomial { exps })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial { exps: self.exps.iter().zip(&other.exps).map(|(&a, &b)| a.max(b)).collect() }
    }

    /// Multiplies by `x_i`; `None` on exponent-cap breach.
    pub fn times_var(&self, i: usize) -> Option<Monomial> {
        let mut exps = self.exps.clone();
        exps[i] = exps[i].checked_add(1).filter(|&e| e <= DEFAULT_EXPONENT_CAP)?;
        Some(Monomial { exps })
    }

    /// Variables with a positive exponent, as a bit mask.
    pub fn support_mask(&self) -> u64 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }

    /// If this is a pure power `x_i^a` with `a > 0`, returns `(i, a)`.
    pub fn as_pure_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }

    fn graded_cmp(&self, other: &Monomial) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match e {
                1 => write!(f, "x{i}")?,
                _ => write!(f, "x{i}^{e}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial ring model: variable count plus the prime used for linear algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub n: usize,
    pub p: u64,
}

impl RingSpec {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        if n == 0 || n > MAX_VARIABLES {
            return Err(Error::Malformed(format!("variable count {n} outside 1..={MAX_VARIABLES}")));
        }
        if !is_prime(p) {
            return Err(Error::Malformed(format!("characteristic {p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::Malformed(format!("characteristic {p} exceeds 2^31")));
        }
        Ok(RingSpec { n, p })
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    n: usize,
    gens: Vec<Monomial>,
}

impl Serialize for MonomialIdeal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.gens.len()))?;
        for g in &self.gens {
            seq.serialize_element(g.exps())?;
        }
        seq.end()
    }
}

impl fmt::Debug for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "))
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Reduces a set of monomials to the divisibility antichain generating the same ideal.
pub fn minimalize(n: usize, gens: Vec<Monomial>) -> Result<MonomialIdeal> {
    if let Some(g) = gens.iter().find(|g| g.nvars() != n) {
        return Err(Error::Malformed(format!(
            "monomial {:?} has {} exponents, ring has {n} variables",
            g,
            g.nvars()
        )));
    }
    Ok(MonomialIdeal { n, gens: minimal_antichain(gens) })
}

fn minimal_antichain(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_by(|a, b| a.graded_cmp(b));
    gens.dedup();
    let mut kept: Vec<Monomial> = Vec::with_capacity(gens.len());
    for g in gens {
        // kept only holds monomials of degree <= deg g, and equal degree divisibility is equality
        if !kept.iter().any(|k| k.divides(&g)) {
            kept.push(g);
        }
    }
    kept
}

impl MonomialIdeal {
    /// Builds an ideal from exponent tuples, minimalizing.
    pub fn from_exponents(n: usize, tuples: &[Vec<u32>]) -> Result<Self> {
        let gens = tuples.iter().map(|t| Monomial::new(t.clone())).collect::<Result<Vec<_>>>()?;
        minimalize(n, gens)
    }

    pub fn zero(n: usize) -> Self {
        MonomialIdeal { n, gens: Vec::new() }
    }

    pub fn unit(n: usize) -> Self {
        MonomialIdeal { n, gens: vec![Monomial::one(n)] }
    }

    /// The homogeneous maximal ideal `(x_0, ..., x_{n-1})`.
    pub fn maximal(n: usize) -> Self {
        MonomialIdeal { n, gens: (0..n).rev().map(|i| Monomial::var(i, n)).collect() }
            .canonical()
    }

    fn canonical(mut self) -> Self {
        self.gens = minimal_antichain(self.gens);
        self
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn exponent_tuples(&self) -> Vec<Vec<u32>> {
        self.gens.iter().map(|g| g.exps().to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_one()
    }

    pub fn contains(&self, u: &Monomial) -> bool {
        self.gens.iter().any(|g| g.divides(u))
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &MonomialIdeal) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    fn check_same_ring(&self, other: &MonomialIdeal) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VariableMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn sum(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_same_ring(other)?;
        let gens = self.gens.iter().chain(&other.gens).cloned().collect();
        minimalize(self.n, gens)
    }

    pub fn product(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_same_ring(other)?;
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.mul(b)?);
            }
        }
        minimalize(self.n, gens)
    }

    pub fn power(&self, k: u32) -> Result<MonomialIdeal> {
        let mut result = MonomialIdeal::unit(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.product(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.product(&base)?;
            }
        }
        Ok(result)
    }

    pub fn intersection(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_same_ring(other)?;
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.lcm(b));
            }
        }
        minimalize(self.n, gens)
    }

    /// `self : x_i^∞`: drop the `x_i` exponent of every generator.
    pub fn colon_var_infinity(&self, i: usize) -> MonomialIdeal {
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let mut exps = g.exps.clone();
                exps[i] = 0;
                Monomial { exps }
            })
            .collect();
        MonomialIdeal { n: self.n, gens: minimal_antichain(gens) }
    }

    /// `self : m^∞ = ∩_i (self : x_i^∞)`.
    pub fn saturate(&self) -> Result<MonomialIdeal> {
        if self.is_unit() {
            return Err(Error::UnitIdeal("saturate"));
        }
        let mut acc: Option<MonomialIdeal> = None;
        for i in 0..self.n {
            let c = self.colon_var_infinity(i);
            acc = Some(match acc {
                None => c,
                Some(a) => a.intersection(&c)?,
            });
        }
        Ok(acc.expect("n >= 1"))
    }

    /// Krull dimension of `R/self`: the largest set of variables containing no generator's support.
    pub fn krull_dim(&self) -> Result<usize> {
        if self.is_unit() {
            return Err(Error::UnitIdeal("krull_dim"));
        }
        if self.n > MAX_VARIABLES {
            return Err(Error::ResourceCeiling(format!("krull_dim over {} variables", self.n)));
        }
        let supports: Vec<u64> = self.gens.iter().map(|g| g.support_mask()).collect();
        let mut best = 0;
        for s in 0u64..(1u64 << self.n) {
            let size = s.count_ones() as usize;
            if size > best && supports.iter().all(|&sup| sup & !s != 0) {
                best = size;
            }
        }
        Ok(best)
    }

    /// Exponent of the smallest pure power of `x_i` in the ideal.
    pub fn pure_power_exponent(&self, i: usize) -> Option<u32> {
        self.gens
            .iter()
            .filter_map(|g| g.as_pure_power())
            .filter(|&(v, _)| v == i)
            .map(|(_, e)| e)
            .min()
            .or_else(|| if self.is_unit() { Some(0) } else { None })
    }

    pub fn is_m_primary(&self) -> bool {
        (0..self.n).all(|i| self.pure_power_exponent(i).is_some())
    }

    /// Length of the Artinian quotient `R/self`, i.e. its number of standard monomials.
    pub fn artinian_length(&self) -> Result<u64> {
        if self.is_unit() {
            return Ok(0);
        }
        if !self.is_m_primary() {
            return Err(Error::PositiveDimension(self.krull_dim()?));
        }
        Ok(count_standard(self.n, self.gens.iter().map(|g| g.exps.clone()).collect()))
    }

    /// Highest degree of the lcm of all generators (0 for the zero ideal).
    pub fn lcm_degree(&self) -> u64 {
        self.gens
            .iter()
            .fold(Monomial::one(self.n), |acc, g| acc.lcm(g))
            .degree()
    }

    /// Largest exponent of each variable over the generators.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.n];
        for g in &self.gens {
            for (o, &e) in out.iter_mut().zip(&g.exps) {
                *o = (*o).max(e);
            }
        }
        out
    }

    /// Standard monomials of degree `j`, in the ideal's canonical order.
    pub fn standard_monomials(&self, j: u64) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.n];
        self.enumerate_degree(0, j, &mut exps, &mut out);
        out
    }

    fn enumerate_degree(&self, var: usize, left: u64, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var + 1 == self.n {
            exps[var] = left as u32;
            let m = Monomial { exps: exps.clone() };
            if !self.contains(&m) {
                out.push(m);
            }
            return;
        }
        for e in (0..=left).rev() {
            exps[var] = e as u32;
            self.enumerate_degree(var + 1, left - e, exps, out);
        }
        exps[var] = 0;
    }

    /// Number of monomials in `other` but not in `self`, for `self ⊆ other` with `other/self` of finite length.
    ///
    /// Every such monomial lies strictly below the per-variable maximal exponents of `self`.
    pub fn finite_difference_count(&self, other: &MonomialIdeal) -> Result<u64> {
        self.check_same_ring(other)?;
        let bounds = self.max_exponents();
        let mut count = 0u64;
        let mut exps = vec![0u32; self.n];
        loop {
            let m = Monomial { exps: exps.clone() };
            if other.contains(&m) && !self.contains(&m) {
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == self.n {
                    return Ok(count);
                }
                exps[k] += 1;
                if exps[k] < bounds[k] {
                    break;
                }
                exps[k] = 0;
                k += 1;
            }
        }
    }

    /// Maps every generator through a variable permutation (`perm[i]` is the new index of `x_i`).
    pub fn permuted(&self, perm: &[usize]) -> MonomialIdeal {
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let mut exps = vec![0; self.n];
                for (i, &e) in g.exps.iter().enumerate() {
                    exps[perm[i]] = e;
                }
                Monomial { exps }
            })
            .collect();
        MonomialIdeal { n: self.n, gens: minimal_antichain(gens) }
    }
}

/// Standard-monomial count of an m-primary monomial ideal, sliced along the last variable.
fn count_standard(n: usize, gens: Vec<Vec<u32>>) -> u64 {
    if n == 1 {
        return gens.iter().map(|g| g[0] as u64).min().unwrap_or(0);
    }
    let last = n - 1;
    let top = gens
        .iter()
        .filter(|g| g[..last].iter().all(|&e| e == 0))
        .map(|g| g[last])
        .min()
        .expect("m-primary ideal has a pure power of every variable");
    let mut by_last = gens;
    by_last.sort_by_key(|g| g[last]);
    let mut total = 0u64;
    let mut slice: Vec<Vec<u32>> = Vec::new();
    let mut idx = 0;
    let mut a = 0u32;
    while a < top {
        while idx < by_last.len() && by_last[idx][last] <= a {
            slice.push(by_last[idx][..last].to_vec());
            idx += 1;
        }
        let next = if idx < by_last.len() { by_last[idx][last].min(top) } else { top };
        let slice_min = minimal_antichain(slice.iter().cloned().map(|exps| Monomial { exps }).collect());
        slice = slice_min.iter().map(|m| m.exps.clone()).collect();
        let width = (next - a) as u64;
        total += width * count_standard(last, slice.clone());
        a = next;
    }
    total
}
