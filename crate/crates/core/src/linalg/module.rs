//! Graded modules known through a truncation degree, as a basis per degree
//! plus one multiplication matrix per variable and degree.

use std::collections::HashMap;

use rand::Rng;

use super::matrix::{Echelon, PrimeFieldMatrix, SparseVec};
use crate::error::{Error, Result};
use crate::monomial::{MonomialIdeal, RingSpec};

#[derive(Clone, Debug)]
pub struct TruncatedGradedModule {
    ring: RingSpec,
    top: usize,
    dims: Vec<usize>,
    /// `mult[i][j]`: multiplication by `x_i` from degree `j` to `j + 1`, for `j < top`.
    mult: Vec<Vec<PrimeFieldMatrix>>,
    provenance: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: Vec<u64>,
}

impl LinearForm {
    pub fn new(ring: &RingSpec, coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.len() != ring.n {
            return Err(Error::VariableMismatch { left: coeffs.len(), right: ring.n });
        }
        let coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % ring.p).collect();
        if coeffs.iter().all(|&c| c == 0) {
            return Err(Error::Malformed("linear form with all coefficients zero".into()));
        }
        Ok(LinearForm { coeffs })
    }

    /// A form with every coefficient drawn uniformly from `1..p`.
    pub fn random<R: Rng>(ring: &RingSpec, rng: &mut R) -> Self {
        LinearForm { coeffs: (0..ring.n).map(|_| rng.gen_range(1..ring.p)).collect() }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn has_full_support(&self) -> bool {
        self.coeffs.iter().all(|&c| c != 0)
    }
}

impl TruncatedGradedModule {
    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims.get(j).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn mult(&self, var: usize, j: usize) -> &PrimeFieldMatrix {
        &self.mult[var][j]
    }

    /// Multiplication by `f` from degree `j` to degree `j + 1`.
    pub fn multiplication_by_form(&self, f: &LinearForm, j: usize) -> PrimeFieldMatrix {
        let p = self.ring.p;
        let mut acc = PrimeFieldMatrix::zero(self.dims[j + 1], self.dims[j], p);
        for (i, &c) in f.coeffs.iter().enumerate() {
            if c != 0 {
                acc = acc.add_scaled(c, &self.mult[i][j]);
            }
        }
        acc
    }

    /// Checks `x_i x_k = x_k x_i` on every degree pair inside the truncation.
    pub fn multiplication_commutes(&self) -> bool {
        let n = self.ring.n;
        (0..self.top.saturating_sub(1)).all(|j| {
            (0..n).all(|i| {
                (i + 1..n).all(|k| {
                    self.mult[i][j + 1].compose(&self.mult[k][j]) == self.mult[k][j + 1].compose(&self.mult[i][j])
                })
            })
        })
    }
}

/// `R/q` through degree `top`, with standard monomials as basis.
pub fn cyclic_module(q: &MonomialIdeal, top: usize, ring: RingSpec) -> Result<TruncatedGradedModule> {
    if q.is_unit() {
        return Err(Error::UnitIdeal("cyclic_module"));
    }
    if q.nvars() != ring.n {
        return Err(Error::VariableMismatch { left: q.nvars(), right: ring.n });
    }
    let n = ring.n;
    let bases: Vec<_> = (0..=top as u64).map(|j| q.standard_monomials(j)).collect();
    let dims: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let mut mult = vec![Vec::with_capacity(top); n];
    for j in 0..top {
        let index: HashMap<_, usize> = bases[j + 1].iter().enumerate().map(|(k, m)| (m, k)).collect();
        for (i, per_var) in mult.iter_mut().enumerate() {
            let columns = bases[j]
                .iter()
                .map(|u| {
                    let target = u.times_var(i).ok_or(Error::Overflow("cyclic_module"))?;
                    Ok(match index.get(&target) {
                        Some(&k) => vec![(k as u32, 1)],
                        None => Vec::new(),
                    })
                })
                .collect::<Result<Vec<SparseVec>>>()?;
            per_var.push(PrimeFieldMatrix::from_columns(dims[j + 1], ring.p, columns));
        }
    }
    Ok(TruncatedGradedModule { ring, top, dims, mult, provenance: format!("R/{q}") })
}

/// `e / f·e`, known through degree `e.top - 1`.
///
/// The cokernel basis in each degree is the set of coordinates that are not
/// pivots of the (leading-index) echelon form of the image.
pub fn quotient_by_linear_form(e: &TruncatedGradedModule, f: &LinearForm) -> Result<TruncatedGradedModule> {
    if e.top == 0 {
        return Err(Error::TruncationTooLow { have: 0, need: 1 });
    }
    let p = e.ring.p;
    let new_top = e.top - 1;
    let mut echelons = Vec::with_capacity(new_top + 2);
    for j in 0..=e.top {
        let mut ech = Echelon::new(p);
        if j >= 1 {
            let a = e.multiplication_by_form(f, j - 1);
            for c in 0..a.cols() {
                ech.insert(a.column(c).clone());
            }
        }
        echelons.push(ech);
    }
    let complements: Vec<Vec<u32>> = (0..=e.top)
        .map(|j| (0..e.dims[j] as u32).filter(|&k| !echelons[j].is_pivot(k)).collect())
        .collect();
    let positions: Vec<HashMap<u32, u32>> = complements
        .iter()
        .map(|c| c.iter().enumerate().map(|(pos, &k)| (k, pos as u32)).collect())
        .collect();
    let dims: Vec<usize> = complements[..=new_top].iter().map(|c| c.len()).collect();
    let mut mult = vec![Vec::with_capacity(new_top); e.ring.n];
    for j in 0..new_top {
        for (i, per_var) in mult.iter_mut().enumerate() {
            let src = &e.mult[i][j];
            let columns = complements[j]
                .iter()
                .map(|&k| {
                    let image = echelons[j + 1].reduce_full(src.column(k as usize).clone());
                    image.into_iter().map(|(r, v)| (positions[j + 1][&r], v)).collect()
                })
                .collect();
            per_var.push(PrimeFieldMatrix::from_columns(dims[j + 1], p, columns));
        }
    }
    let provenance = format!("{} / ({})", e.provenance, fmt_form(f));
    Ok(TruncatedGradedModule { ring: e.ring, top: new_top, dims, mult, provenance })
}

fn fmt_form(f: &LinearForm) -> String {
    f.coeffs.iter().enumerate().map(|(i, c)| format!("{c}*x{i}")).collect::<Vec<_>>().join(" + ")
}

/// For each degree `j <= reg_hint + 1`, linear functionals on `E_j` whose common kernel is `H⁰_j`.
///
/// Relies on `reg_hint >= reg(e)`, so `H⁰` vanishes from degree `reg_hint + 1` on.
pub(crate) fn h0_functionals(e: &TruncatedGradedModule, reg_hint: usize) -> Result<Vec<Echelon>> {
    if e.top < reg_hint + 1 {
        return Err(Error::TruncationTooLow { have: e.top, need: reg_hint + 1 });
    }
    let p = e.ring.p;
    let mut out: Vec<Echelon> = Vec::with_capacity(reg_hint + 2);
    let mut identity = Echelon::new(p);
    for k in 0..e.dims[reg_hint + 1] {
        identity.insert(vec![(k as u32, 1)]);
    }
    out.push(identity);
    let transposes: Vec<Vec<PrimeFieldMatrix>> = (0..=reg_hint)
        .map(|j| (0..e.ring.n).map(|i| e.mult[i][j].transpose()).collect())
        .collect();
    for j in (0..=reg_hint).rev() {
        let upper = out.last().expect("seeded");
        let mut ech = Echelon::new(p);
        'outer: for phi in upper.basis() {
            for t in &transposes[j] {
                if ech.rank() == e.dims[j] {
                    break 'outer;
                }
                let row = t.apply(phi);
                if !row.is_empty() {
                    ech.insert(row);
                }
            }
        }
        out.push(ech);
    }
    out.reverse();
    Ok(out)
}

/// Dimensions of `H⁰_m(e)` in degrees `0..=reg_hint`; their sum is `h⁰`.
pub fn h0_graded(e: &TruncatedGradedModule, reg_hint: usize) -> Result<Vec<usize>> {
    let funcs = h0_functionals(e, reg_hint)?;
    Ok((0..=reg_hint).map(|j| e.dims[j] - funcs[j].rank()).collect())
}
