//! Hilbert functions, Hilbert–Samuel functions of good filtrations, and
//! Hilbert-coefficient extraction in the binomial basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::{Monomial, MonomialIdeal, RingSpec};

/// Extra values beyond the interpolation window that a fitted polynomial must reproduce,
/// on top of `d`.
pub const GUARD_EXTRA: usize = 5;

/// Ceiling on the number of pivot-recursion nodes for one series numerator.
pub const SERIES_NODE_CEILING: usize = 2_000_000;

/// Largest `n` a Hilbert–Samuel window may grow to.
pub const MAX_WINDOW: usize = 400;

pub fn hilbert_function(q: &MonomialIdeal, j: u64) -> u64 {
    if q.is_unit() {
        return 0;
    }
    q.standard_monomials(j).len() as u64
}

// ---------------------------------------------------------------------------
// Hilbert series numerator by pivot recursion

fn poly_trim(mut p: Vec<i64>) -> Vec<i64> {
    while p.len() > 1 && p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_add_shifted(a: &[i64], b: &[i64], shift: usize) -> Vec<i64> {
    let len = a.len().max(b.len() + shift);
    let mut out = vec![0; len];
    out[..a.len()].copy_from_slice(a);
    for (k, &c) in b.iter().enumerate() {
        out[k + shift] += c;
    }
    poly_trim(out)
}

/// Multiplies by `(1 - t^k)`.
fn poly_times_one_minus(a: &[i64], k: usize) -> Vec<i64> {
    let neg: Vec<i64> = a.iter().map(|c| -c).collect();
    poly_add_shifted(a, &neg, k)
}

/// Numerator `h(t)` of the Hilbert series `h(t)/(1-t)^n` of `R/q`.
pub fn series_numerator(q: &MonomialIdeal) -> Result<Vec<i64>> {
    if q.is_unit() {
        return Err(Error::UnitIdeal("series_numerator"));
    }
    let mut budget = SERIES_NODE_CEILING;
    numerator_rec(q.nvars(), q.gens().to_vec(), &mut budget)
}

fn numerator_rec(n: usize, gens: Vec<Monomial>, budget: &mut usize) -> Result<Vec<i64>> {
    if *budget == 0 {
        return Err(Error::ResourceCeiling("series_numerator recursion".into()));
    }
    *budget -= 1;
    // a variable shared by two or more generators, if any
    let shared = (0..n).find(|&i| gens.iter().filter(|g| g.exps()[i] > 0).count() >= 2);
    let Some(var) = shared else {
        return Ok(gens.iter().fold(vec![1], |acc, g| poly_times_one_minus(&acc, g.degree() as usize)));
    };
    let a = gens
        .iter()
        .filter(|g| g.exps()[var] > 0 && g.as_pure_power().is_none())
        .map(|g| g.exps()[var])
        .min()
        .expect("two generators share the variable, at most one is its pure power");
    let pivot = Monomial::pure_power(var, n, a);
    let mut with_pivot = gens.clone();
    with_pivot.push(pivot.clone());
    let sum = crate::monomial::minimalize(n, with_pivot)?;
    let colon: Vec<Monomial> = gens
        .iter()
        .map(|g| {
            let mut e = g.exps().to_vec();
            e[var] = e[var].saturating_sub(a);
            Monomial::new(e)
        })
        .collect::<Result<_>>()?;
    let colon = crate::monomial::minimalize(n, colon)?;
    let left = numerator_rec(n, sum.gens().to_vec(), budget)?;
    let right = numerator_rec(n, colon.gens().to_vec(), budget)?;
    Ok(poly_add_shifted(&left, &right, a as usize))
}

/// Expands `h(t)/(1-t)^n` through degree `max_deg`.
pub fn series_expansion(numerator: &[i64], n: usize, max_deg: usize) -> Vec<i64> {
    let mut coeffs: Vec<i64> = (0..=max_deg).map(|k| numerator.get(k).copied().unwrap_or(0)).collect();
    for _ in 0..n {
        for k in 1..=max_deg {
            coeffs[k] += coeffs[k - 1];
        }
    }
    coeffs
}

// ---------------------------------------------------------------------------
// Filtrations

/// A good `J`-filtration of `M = R/Q`, given by `N_0 = R ⊇ N_1 ⊇ ... ⊇ N_r` and the
/// tail rule `N_{k+1} = J·N_k + Q` for `k >= r`; `M_k = N_k/Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationSpec {
    pub ring: RingSpec,
    pub q: MonomialIdeal,
    pub j: MonomialIdeal,
    /// `N_0, ..., N_r` with `N_0` the unit ideal.
    pub initial: Vec<MonomialIdeal>,
}

fn first_missing(sub: &MonomialIdeal, sup: &MonomialIdeal) -> Option<Monomial> {
    sub.gens().iter().find(|g| !sup.contains(g)).cloned()
}

impl FiltrationSpec {
    /// Validates and builds a filtration. `chain` lists `N_1, ..., N_r` (may be empty).
    pub fn new(ring: RingSpec, q: MonomialIdeal, j: MonomialIdeal, chain: Vec<MonomialIdeal>) -> Result<Self> {
        let n = ring.n;
        for (what, ideal) in [("Q", &q), ("J", &j)].into_iter().chain(chain.iter().map(|c| ("N_k", c))) {
            if ideal.nvars() != n {
                return Err(Error::Malformed(format!("{what} has {} variables, ring has {n}", ideal.nvars())));
            }
        }
        if q.is_unit() {
            return Err(Error::UnitIdeal("filtration with Q = R"));
        }
        if j.is_unit() || !j.is_m_primary() {
            return Err(Error::Malformed(format!("J = {j} is not a proper m-primary ideal")));
        }
        let mut initial = Vec::with_capacity(chain.len() + 1);
        initial.push(MonomialIdeal::unit(n));
        initial.extend(chain);
        for (k, nk) in initial.iter().enumerate() {
            if let Some(g) = first_missing(&q, nk) {
                return Err(Error::InvalidFiltration { index: k, reason: format!("Q ⊄ N_{k}: generator {g} missing") });
            }
            if k == 0 {
                continue;
            }
            let prev = &initial[k - 1];
            if let Some(g) = first_missing(nk, prev) {
                return Err(Error::InvalidFiltration {
                    index: k,
                    reason: format!("chain not descending: N_{k} ⊄ N_{}, generator {g}", k - 1),
                });
            }
            let needed = j.product(prev)?.sum(&q)?;
            if let Some(g) = first_missing(&needed, nk) {
                return Err(Error::InvalidFiltration {
                    index: k,
                    reason: format!("filtration condition J·N_{} ⊆ N_{k} violated: {g} ∉ N_{k}", k - 1),
                });
            }
        }
        let r = initial.len() - 1;
        if r >= 1 {
            let tail = j.product(&initial[r - 1])?.sum(&q)?;
            if tail == initial[r] {
                return Err(Error::InvalidFiltration {
                    index: r,
                    reason: format!("N_{r} = J·N_{} + Q, so the reduction number is below {r}", r - 1),
                });
            }
        }
        Ok(FiltrationSpec { ring, q, j, initial })
    }

    /// The `J`-adic filtration of `R/Q`.
    pub fn adic(ring: RingSpec, q: MonomialIdeal, j: MonomialIdeal) -> Result<Self> {
        Self::new(ring, q, j, Vec::new())
    }

    pub fn reduction_number(&self) -> usize {
        self.initial.len() - 1
    }

    /// `J = m` with no initial chain: the graded case where `G(ℱ) ≅ R/Q`.
    pub fn is_m_adic(&self) -> bool {
        self.initial.len() == 1 && self.j == MonomialIdeal::maximal(self.ring.n)
    }

    /// The induced filtration on `R/Q'` for `Q ⊆ Q'`, with the reduction number re-minimized.
    pub fn quotient(&self, q_bar: &MonomialIdeal) -> Result<FiltrationSpec> {
        let mut chain: Vec<MonomialIdeal> =
            self.initial[1..].iter().map(|nk| nk.sum(q_bar)).collect::<Result<_>>()?;
        while let Some(last) = chain.last() {
            let prev = if chain.len() >= 2 { chain[chain.len() - 2].clone() } else { MonomialIdeal::unit(self.ring.n) };
            if self.j.product(&prev)?.sum(q_bar)? == *last {
                chain.pop();
            } else {
                break;
            }
        }
        FiltrationSpec::new(self.ring, q_bar.clone(), self.j.clone(), chain)
    }

    /// `N_0, ..., N_{k_max}`, each computed once.
    pub fn chain_through(&self, k_max: usize) -> Result<Vec<MonomialIdeal>> {
        let mut out: Vec<MonomialIdeal> = self.initial.iter().take(k_max + 1).cloned().collect();
        while out.len() <= k_max {
            let next = self.j.product(out.last().expect("N_0 present"))?.sum(&self.q)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// `H(n) = ℓ(M/M_{n+1}) = ℓ(R/N_{n+1})`; `H(-1) = 0`.
pub fn hilbert_samuel(f: &FiltrationSpec, n: i64) -> Result<u64> {
    if n < 0 {
        return Ok(0);
    }
    let chain = f.chain_through(n as usize + 1)?;
    chain[n as usize + 1].artinian_length()
}

/// `H(0), ..., H(n_max)` by materializing the filtration.
pub fn hilbert_samuel_by_tail(f: &FiltrationSpec, n_max: usize) -> Result<Vec<i64>> {
    let chain = f.chain_through(n_max + 1)?;
    chain[1..].iter().map(|nk| nk.artinian_length().map(|l| l as i64)).collect()
}

/// `H(0), ..., H(n_max)`; for the m-adic filtration this is the running sum of the
/// Hilbert function of `R/Q`.
pub fn hilbert_samuel_values(f: &FiltrationSpec, n_max: usize) -> Result<Vec<i64>> {
    if f.is_m_adic() {
        let mut acc = 0i64;
        Ok((0..=n_max as u64)
            .map(|j| {
                acc += hilbert_function(&f.q, j) as i64;
                acc
            })
            .collect())
    } else {
        hilbert_samuel_by_tail(f, n_max)
    }
}

// ---------------------------------------------------------------------------
// Coefficient fitting

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// `P(t) = Σ_{i=0}^{d} (-1)^i e_i C(t+d-i, d-i)`.
    Local,
    /// `p(t) = Σ_{i=0}^{d-1} (-1)^i e_i C(t+d-1-i, d-1-i)`.
    Graded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Fitted past a proven stabilization point.
    Proved,
    /// Stabilization detected empirically and confirmed on the guard window only.
    GuardCertified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertCoefficients {
    pub d: usize,
    pub mode: FitMode,
    pub e: Vec<i64>,
    pub postulation: usize,
    pub certification: Certification,
}

/// Generalized binomial `C(top, k)` for any integer `top` and `k >= 0`.
pub(crate) fn binom_i128(top: i128, k: usize) -> i128 {
    let mut acc: i128 = 1;
    for i in 0..k as i128 {
        acc = acc * (top - i) / (i + 1);
    }
    acc
}

impl HilbertCoefficients {
    fn degree(&self) -> usize {
        match self.mode {
            FitMode::Local => self.d,
            FitMode::Graded => self.d - 1,
        }
    }

    /// Value of the fitted polynomial at `t`.
    pub fn eval(&self, t: i64) -> i128 {
        let deg = self.degree();
        self.e
            .iter()
            .enumerate()
            .map(|(i, &ei)| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                sign * ei as i128 * binom_i128(t as i128 + (deg - i) as i128, deg - i)
            })
            .sum()
    }

    /// `ξ_s = max(e_0, |e_1|, ..., |e_s|)`.
    pub fn xi(&self, s: usize) -> i64 {
        self.e.iter().take(s + 1).enumerate().map(|(i, &e)| if i == 0 { e } else { e.abs() }).max().unwrap_or(0)
    }
}

/// Interpolates the binomial-basis coefficients from `values[n0..=n0+deg]`.
fn interpolate(values: &[i64], n0: usize, deg: usize) -> Result<Vec<i128>> {
    // backward differences ∇^k H(top) at the window's last point
    let top = n0 + deg;
    let mut diffs = Vec::with_capacity(deg + 1);
    let mut row: Vec<i128> = values[n0..=top].iter().map(|&v| v as i128).collect();
    for _ in 0..=deg {
        diffs.push(*row.last().expect("window is non-empty"));
        row = row.windows(2).map(|w| w[1] - w[0]).collect();
    }
    // basis b_i(t) = C(t + deg - i, deg - i) satisfies ∇ b_i = b_{i+1}
    let basis = |i: usize| binom_i128(top as i128 + (deg - i) as i128, deg - i);
    let mut c = vec![0i128; deg + 1];
    for k in (0..=deg).rev() {
        let idx = deg - k;
        let known: i128 = (0..idx).map(|i| c[i] * basis(i + k)).sum();
        c[idx] = diffs[k] - known;
    }
    Ok(c)
}

/// Fits Hilbert coefficients to `values[n] = H(n)`, `n = 0..=n_max`.
///
/// With `n0 = Some(a)` the caller guarantees `H = P` from `a` on: the fit uses
/// `[a, a+deg]` and is checked on `d + GUARD_EXTRA` further values. With `None`,
/// the fit uses the last `deg + 1` values and the detected postulation must leave
/// room for a full window plus guard.
pub fn fit_coefficients(values: &[i64], d: usize, mode: FitMode, n0: Option<usize>) -> Result<HilbertCoefficients> {
    let deg = match mode {
        FitMode::Local => d,
        FitMode::Graded => d.checked_sub(1).ok_or_else(|| Error::Malformed("graded fit needs d >= 1".into()))?,
    };
    let guard = d + GUARD_EXTRA;
    let n_max = values.len().checked_sub(1).ok_or(Error::StabilizationNotReached { n_max: 0 })?;
    let start = match n0 {
        Some(a) => a,
        None => n_max.checked_sub(deg).ok_or(Error::StabilizationNotReached { n_max })?,
    };
    if start + deg + if n0.is_some() { guard } else { 0 } > n_max {
        return Err(Error::StabilizationNotReached { n_max });
    }
    let c = interpolate(values, start, deg)?;
    let e: Vec<i64> = c
        .iter()
        .enumerate()
        .map(|(i, &ci)| {
            let ei = if i % 2 == 0 { ci } else { -ci };
            i64::try_from(ei).map_err(|_| Error::Overflow("fit_coefficients"))
        })
        .collect::<Result<_>>()?;
    let fitted = HilbertCoefficients { d, mode, e, postulation: 0, certification: Certification::Proved };
    let agrees: Vec<bool> = (0..=n_max).map(|n| fitted.eval(n as i64) == values[n] as i128).collect();
    if n0.is_some() && !agrees[start..].iter().all(|&a| a) {
        return Err(Error::StabilizationNotReached { n_max });
    }
    let postulation = agrees.iter().rposition(|&a| !a).map_or(0, |k| k + 1);
    let certification = match n0 {
        Some(_) => Certification::Proved,
        None => {
            if postulation + deg + guard > n_max {
                return Err(Error::StabilizationNotReached { n_max });
            }
            Certification::GuardCertified
        }
    };
    Ok(HilbertCoefficients { postulation, certification, ..fitted })
}

/// Computes `H` on a growing window and fits empirically (no stabilization certificate).
pub fn fit_filtration_empirical(f: &FiltrationSpec, d: usize) -> Result<(HilbertCoefficients, Vec<i64>)> {
    let mut n_max = 3 * d + 2 * GUARD_EXTRA + 2 + 2 * f.reduction_number();
    loop {
        let values = hilbert_samuel_values(f, n_max)?;
        match fit_coefficients(&values, d, FitMode::Local, None) {
            Ok(c) => return Ok((c, values)),
            Err(Error::StabilizationNotReached { .. }) if n_max < MAX_WINDOW => n_max = (2 * n_max).min(MAX_WINDOW),
            Err(e) => return Err(e),
        }
    }
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
    fn hilbert_function_examples() {
        assert_eq!(hilbert_function(&MonomialIdeal::zero(2), 3), 4);
        for s in 1..6u32 {
            let q = ideal(2, &[&[2, 0], &[1, s]]);
            for j in 1..12u64 {
                assert_eq!(hilbert_function(&q, j), if j <= s as u64 { 2 } else { 1 });
            }
        }
        assert_eq!(hilbert_function(&ideal(2, &[&[2, 0], &[0, 3]]), 9), 0);
    }

    #[test]
    fn numerator_examples() {
        assert_eq!(series_numerator(&MonomialIdeal::zero(3)).unwrap(), vec![1]);
        assert_eq!(series_numerator(&MonomialIdeal::maximal(2)).unwrap(), vec![1, -2, 1]);
        for s in 1..6u32 {
            let q = ideal(2, &[&[2, 0], &[1, s]]);
            let mut expect = vec![0i64; s as usize + 3];
            expect[0] += 1;
            expect[2] -= 1;
            expect[s as usize + 1] -= 1;
            expect[s as usize + 2] += 1;
            assert_eq!(series_numerator(&q).unwrap(), poly_trim(expect), "s = {s}");
        }
        // a pure power shares its variable with another generator
        let q = ideal(2, &[&[3, 0], &[1, 1]]);
        let num = series_numerator(&q).unwrap();
        let exp = series_expansion(&num, 2, 8);
        for j in 0..=8 {
            assert_eq!(exp[j] as u64, hilbert_function(&q, j as u64));
        }
    }

    #[test]
    fn hilbert_samuel_examples() {
        for s in 1..5u32 {
            let f = FiltrationSpec::adic(ring(2), ideal(2, &[&[2, 0], &[1, s]]), MonomialIdeal::maximal(2)).unwrap();
            for n in 0..10i64 {
                assert_eq!(hilbert_samuel(&f, n).unwrap() as i64, n + 1 + n.min(s as i64));
            }
            assert_eq!(hilbert_samuel(&f, -1).unwrap(), 0);
        }
        let f = FiltrationSpec::new(
            ring(1),
            MonomialIdeal::zero(1),
            ideal(1, &[&[2]]),
            vec![ideal(1, &[&[1]])],
        )
        .unwrap();
        assert_eq!(f.reduction_number(), 1);
        for n in 0..10i64 {
            assert_eq!(hilbert_samuel(&f, n).unwrap() as i64, 2 * n + 1);
        }
    }

    #[test]
    fn filtration_validation() {
        let m = MonomialIdeal::maximal(2);
        let bad = FiltrationSpec::new(ring(2), MonomialIdeal::zero(2), m.clone(), vec![ideal(2, &[&[1, 0], &[0, 2]])]);
        match bad {
            Err(Error::InvalidFiltration { index: 1, reason }) => assert!(reason.contains("x1"), "{reason}"),
            other => panic!("unexpected {other:?}"),
        }
        // N_1 = J·N_0 + Q would mean r = 0
        let redundant = FiltrationSpec::new(ring(2), MonomialIdeal::zero(2), m.clone(), vec![m.clone()]);
        assert!(matches!(redundant, Err(Error::InvalidFiltration { index: 1, .. })));
        let not_primary = FiltrationSpec::adic(ring(2), MonomialIdeal::zero(2), ideal(2, &[&[1, 0]]));
        assert!(not_primary.is_err());
    }

    #[test]
    fn fit_examples() {
        for s in 1..8i64 {
            let values: Vec<i64> = (0..40).map(|n| n + 1 + n.min(s)).collect();
            let c = fit_coefficients(&values, 1, FitMode::Local, Some(s as usize)).unwrap();
            assert_eq!(c.e, vec![1, -s]);
            assert_eq!(c.postulation, s as usize);
            let c = fit_coefficients(&values, 1, FitMode::Local, None).unwrap();
            assert_eq!(c.e, vec![1, -s]);
            assert_eq!(c.certification, Certification::GuardCertified);
        }
        // ℓ(R/(x²,y³)^{n+1}) = 6·C(n+2, 2)
        let values: Vec<i64> = (0..30).map(|n| 6 * (n + 2) * (n + 1) / 2).collect();
        let c = fit_coefficients(&values, 2, FitMode::Local, Some(0)).unwrap();
        assert_eq!(c.e, vec![6, 0, 0]);
        assert_eq!(c.postulation, 0);
        assert_eq!(c.xi(2), 6);
    }

    #[test]
    fn fit_detects_short_windows() {
        let values: Vec<i64> = (0..8).map(|n| n + 1 + n.min(6)).collect();
        assert!(matches!(
            fit_coefficients(&values, 1, FitMode::Local, None),
            Err(Error::StabilizationNotReached { .. })
        ));
        assert!(fit_coefficients(&values, 1, FitMode::Local, Some(3)).is_err());
    }

    #[test]
    fn graded_fit() {
        // R/(x², xy³): h(t) = 1 for t > 3, so p(t) = 1 and e_0 = 1
        let h: Vec<i64> = (0..20).map(|t| if t == 0 { 1 } else if t <= 3 { 2 } else { 1 }).collect();
        let c = fit_coefficients(&h, 1, FitMode::Graded, Some(4)).unwrap();
        assert_eq!(c.e, vec![1]);
        assert_eq!(c.postulation, 4);
        assert!(fit_coefficients(&h, 1, FitMode::Graded, Some(3)).is_err());
    }

    #[test]
    fn quotient_reminimizes_reduction_number() {
        let r = ring(2);
        let q = MonomialIdeal::zero(2);
        let f = FiltrationSpec::new(r, q, MonomialIdeal::maximal(2), vec![MonomialIdeal::maximal(2), ideal(2, &[&[1, 0], &[0, 2]])])
            .unwrap();
        assert_eq!(f.reduction_number(), 2);
        let fbar = f.quotient(&ideal(2, &[&[1, 0]])).unwrap();
        assert_eq!(fbar.reduction_number(), 0);
    }
}
