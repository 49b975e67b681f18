//! Exact evaluation of the regularity and Hilbert-coefficient bounds.
//!
//! All values are arbitrary-precision integers. Bounds that do not apply to a
//! given input carry a reason instead of a value.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest number of bits a single bound value may occupy.
pub const MAX_BOUND_BITS: u64 = 1 << 24;

/// Largest dimension whose factorials enter an exponent.
pub const MAX_BOUND_DIM: usize = 20;

pub fn factorial(n: usize) -> Result<u64> {
    if n > MAX_BOUND_DIM {
        return Err(Error::Overflow("factorial beyond the dimension ceiling"));
    }
    Ok((1..=n as u64).product())
}

fn checked_exp(parts: &[u64]) -> Result<u64> {
    parts.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p)).ok_or(Error::Overflow("bound exponent"))
}

/// `base^exp`, refusing results wider than [`MAX_BOUND_BITS`].
pub fn pow_checked(base: &BigInt, exp: u64) -> Result<BigInt> {
    let bits = base.bits();
    if bits > 1 && bits.saturating_sub(1).saturating_mul(exp) > MAX_BOUND_BITS {
        return Err(Error::ResourceCeiling(format!("bound value exceeds {MAX_BOUND_BITS} bits")));
    }
    let exp32 = u32::try_from(exp).map_err(|_| Error::Overflow("bound exponent"))?;
    if bits <= 1 {
        // base in {-1, 0, 1}
        return Ok(num_traits::pow(base.clone(), exp32 as usize));
    }
    Ok(base.pow(exp32))
}

/// Generalized binomial `C(top, k)` for any integer `top`, `k >= 0`.
pub fn binomial(top: &BigInt, k: u64) -> Result<BigInt> {
    if top.bits().saturating_mul(k) > MAX_BOUND_BITS {
        return Err(Error::ResourceCeiling(format!("binomial exceeds {MAX_BOUND_BITS} bits")));
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc = C(top, i) here; C(top, i)·(top - i) is divisible by i + 1
        acc = acc * (top - BigInt::from(i)) / BigInt::from(i + 1);
    }
    Ok(acc)
}

/// The recursive sequence `m_1, ..., m_d` bounding `reg¹` of a graded module by `m_d - 1`.
///
/// `m_1 = e_0 + Δ'` and `m_i = m_{i-1} + Σ_{k<i} (-1)^k e_k C(m_{i-1} + i - 2 - k, i - 1 - k)`.
pub fn reg1_recursive_sequence(e: &[i64], delta_prime: u64, d: usize) -> Result<Vec<BigInt>> {
    if d == 0 || e.len() < d {
        return Err(Error::Malformed(format!("need e_0..e_{} for d = {d}", d.saturating_sub(1))));
    }
    let mut m = vec![BigInt::from(e[0]) + BigInt::from(delta_prime)];
    for i in 2..=d {
        let prev = m.last().expect("m_1 present").clone();
        let mut next = prev.clone();
        for (k, &ek) in e.iter().enumerate().take(i) {
            let top = &prev + BigInt::from(i as i64 - 2 - k as i64);
            let term = BigInt::from(ek) * binomial(&top, (i - 1 - k) as u64)?;
            if k % 2 == 0 {
                next += term;
            } else {
                next -= term;
            }
        }
        m.push(next);
    }
    Ok(m)
}

/// `(ξ_{d-1} + Δ' + 1)^{d!} - 2`, the closed form bounding `reg¹` of a graded module.
pub fn reg1_explicit_bound(xi_dm1: u64, delta_prime: u64, d: usize) -> Result<BigInt> {
    let base = BigInt::from(xi_dm1) + BigInt::from(delta_prime) + 1;
    Ok(pow_checked(&base, factorial(d)?)? - 2)
}

/// `(ξ_d + r + 1)^{d·d! + 1} - 2`; `reg(G)` lies strictly below it.
pub fn reg_bound_all_coeffs(xi_d: u64, r: u64, d: usize) -> Result<BigInt> {
    let base = BigInt::from(xi_d) + BigInt::from(r) + 1;
    let exp = checked_exp(&[d as u64, factorial(d)?])?.checked_add(1).ok_or(Error::Overflow("bound exponent"))?;
    Ok(pow_checked(&base, exp)? - 2)
}

/// `(ξ_{d-t} + r + 1)^{2(d-t+1)d!} - 2`, using only the first `d - t + 1` coefficients.
pub fn reg_bound_depth(xi_dt: u64, r: u64, d: usize, t: usize) -> Result<BigInt> {
    if t > d {
        return Err(Error::Malformed(format!("depth {t} exceeds dimension {d}")));
    }
    let base = BigInt::from(xi_dt) + BigInt::from(r) + 1;
    let exp = checked_exp(&[2, (d - t + 1) as u64, factorial(d)?])?;
    Ok(pow_checked(&base, exp)? - 2)
}

/// Bounds on `(-1)^{i-1} e_i` from the preceding coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingCoeffBound {
    /// `C(e_0, 2)` for `i = 1`; `ξ_{i-1}·C((ξ_{i-1}+r+1)^{i!} + i, i)` for `i >= 2`.
    pub sharp: BigInt,
    /// `(ξ_{i-1}+r+1)^{i·i!+1}` for `i >= 2`; the sharp value lies strictly below it.
    pub weak: Option<BigInt>,
}

/// For `i = 1` pass `e_0` as `e0_or_xi`, otherwise `ξ_{i-1}`.
pub fn alternating_coeff_bound(e0_or_xi: u64, r: u64, i: usize) -> Result<AlternatingCoeffBound> {
    match i {
        0 => Err(Error::Malformed("coefficient index must be >= 1".into())),
        1 => Ok(AlternatingCoeffBound { sharp: binomial(&BigInt::from(e0_or_xi), 2)?, weak: None }),
        _ => {
            let xi = BigInt::from(e0_or_xi);
            let base = &xi + BigInt::from(r) + 1;
            let inner = pow_checked(&base, factorial(i)?)? + BigInt::from(i);
            let sharp = &xi * binomial(&inner, i as u64)?;
            let exp = checked_exp(&[i as u64, factorial(i)?])? + 1;
            Ok(AlternatingCoeffBound { sharp, weak: Some(pow_checked(&base, exp)?) })
        }
    }
}

/// Bounds on `|e_j|` for `d - t + 1 <= j <= d` in terms of `ξ_{d-t}` and `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailCoeffBound {
    /// `(ξ_{d-t} + r + 1)^{3j(d+1-t)j!}`, non-strict.
    pub general: BigInt,
    /// `(ξ_{d-t} + 1)^{3j(d-t+1)j!}`, strict; ideal-adic filtrations (`r = 0`) only.
    pub adic: Option<BigInt>,
    /// `(e_0 + r + 1)^{3j! - j + 1}`, non-strict; Cohen–Macaulay case `t = d` only.
    pub cohen_macaulay: Option<BigInt>,
}

/// `None` when `t = 0` or `j` lies outside `[d - t + 1, d]`.
pub fn tail_coeff_bound(xi_dt: u64, r: u64, d: usize, t: usize, j: usize) -> Result<Option<TailCoeffBound>> {
    if t == 0 || t > d || j + t < d + 1 || j > d {
        return Ok(None);
    }
    let exp = checked_exp(&[3, j as u64, (d + 1 - t) as u64, factorial(j)?])?;
    let general = pow_checked(&(BigInt::from(xi_dt) + BigInt::from(r) + 1), exp)?;
    let adic = if r == 0 { Some(pow_checked(&(BigInt::from(xi_dt) + 1), exp)?) } else { None };
    let cohen_macaulay = if t == d {
        // ξ_0 = e_0 here
        let exp = checked_exp(&[3, factorial(j)?])? + 1 - j as u64;
        Some(pow_checked(&(BigInt::from(xi_dt) + BigInt::from(r) + 1), exp)?)
    } else {
        None
    };
    Ok(Some(TailCoeffBound { general, adic, cohen_macaulay }))
}

/// `B(2·reg + 2)^i`; `|e_i|` lies strictly below it.
pub fn coeff_vs_sections_bound(b: u64, reg: u64, i: usize) -> Result<BigInt> {
    Ok(BigInt::from(b) * pow_checked(&BigInt::from(2 * reg + 2), i as u64)?)
}

/// `B(reg¹ + 1)^i`, bounding graded `|e_i|` for `1 <= i <= d - 1`.
pub fn graded_coeff_vs_sections_bound(b: u64, reg1: u64, i: usize) -> Result<BigInt> {
    Ok(BigInt::from(b) * pow_checked(&BigInt::from(reg1 + 1), i as u64)?)
}

/// `(i + 1)·ξ_d·(reg + 2)^d`, bounding `h⁰` after cutting by `i` superficial forms.
pub fn section_h0_bound(xi_d: u64, reg: u64, d: usize, i: usize) -> Result<BigInt> {
    Ok(BigInt::from(i as u64 + 1) * BigInt::from(xi_d) * pow_checked(&BigInt::from(reg + 2), d as u64)?)
}

/// `(d + 1)·ξ_d·(reg + 2)^d`; `B` lies strictly below it.
pub fn section_length_bound(xi_d: u64, reg: u64, d: usize) -> Result<BigInt> {
    section_h0_bound(xi_d, reg, d, d)
}

/// `max(reg(Ḡ), r) + h⁰`, bounding `reg(G)`.
pub fn reg_vs_saturation_bound(reg_bar: i64, r: u64, h0: u64) -> BigInt {
    BigInt::from(reg_bar.max(r as i64)) + BigInt::from(h0)
}

/// `P(n) = Σ (-1)^i e_i C(n + d - i, d - i)`, the Hilbert–Samuel polynomial at `n`.
pub fn samuel_polynomial_at(e: &[i64], n: i64) -> Result<BigInt> {
    let d = e.len().checked_sub(1).ok_or_else(|| Error::Malformed("empty coefficient vector".into()))?;
    let mut acc = BigInt::zero();
    for (i, &ei) in e.iter().enumerate() {
        let term = BigInt::from(ei) * binomial(&BigInt::from(n + (d - i) as i64), (d - i) as u64)?;
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `ξ_s = max(e_0, |e_1|, ..., |e_s|)`.
pub fn xi(e: &[i64], s: usize) -> u64 {
    e.iter().take(s + 1).enumerate().map(|(i, &v)| if i == 0 { v.max(0) as u64 } else { v.unsigned_abs() }).max().unwrap_or(0)
}

// ---------------------------------------------------------------------------
// Ledger

/// Everything the bound formulas consume. Missing optional inputs make the
/// corresponding entries inapplicable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundInputs {
    pub d: usize,
    pub t: usize,
    pub r: u64,
    pub delta_prime: u64,
    /// Local coefficients `e_0, ..., e_d`.
    pub e: Vec<i64>,
    /// Graded coefficients `e_0, ..., e_{d-1}` of the associated graded module, when it is a standard graded quotient.
    pub graded_e: Option<Vec<i64>>,
    pub reg: Option<u64>,
    pub reg1: Option<u64>,
    /// Regularity of the associated graded module of the filtration modulo `H⁰`.
    pub reg_bar: Option<i64>,
    pub h0: Option<u64>,
    pub b: Option<u64>,
    /// Whether the filtration is ideal-adic.
    pub adic: bool,
}

impl BoundInputs {
    fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_BOUND_DIM {
            return Err(Error::Malformed(format!("dimension {} outside 1..={MAX_BOUND_DIM}", self.d)));
        }
        if self.t > self.d {
            return Err(Error::Malformed(format!("depth {} exceeds dimension {}", self.t, self.d)));
        }
        if self.e.len() != self.d + 1 {
            return Err(Error::Malformed(format!("expected {} coefficients, got {}", self.d + 1, self.e.len())));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LedgerEntry {
    Value(BigInt),
    Inapplicable(String),
}

impl LedgerEntry {
    pub fn value(&self) -> Option<&BigInt> {
        match self {
            LedgerEntry::Value(v) => Some(v),
            LedgerEntry::Inapplicable(_) => None,
        }
    }
}

/// Named bound values. Serializes as `{"values": {name: "decimal"}, "inapplicable": {name: reason}}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundLedger {
    entries: BTreeMap<String, LedgerEntry>,
}

impl Serialize for BoundLedger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            values: BTreeMap<&'a str, String>,
            inapplicable: BTreeMap<&'a str, &'a str>,
        }
        let mut wire = Wire { values: BTreeMap::new(), inapplicable: BTreeMap::new() };
        for (k, v) in &self.entries {
            match v {
                LedgerEntry::Value(x) => {
                    wire.values.insert(k, x.to_string());
                }
                LedgerEntry::Inapplicable(why) => {
                    wire.inapplicable.insert(k, why);
                }
            }
        }
        wire.serialize(s)
    }
}

/// Ledger entry names.
pub mod names {
    pub const REG1_RECURSIVE: &str = "reg1_recursive";
    pub const REG1_EXPLICIT: &str = "reg1_explicit";
    pub const REG_ALL_COEFFS: &str = "reg_all_coeffs";
    pub const REG_DEPTH: &str = "reg_depth";
    pub const SECTION_LENGTH: &str = "section_length";
    pub const REG_VS_SATURATION: &str = "reg_vs_saturation";
    pub const H0_VS_POLYNOMIAL: &str = "h0_vs_polynomial";

    pub fn alternating_sharp(i: usize) -> String {
        format!("alternating_coeff_sharp_{i}")
    }
    pub fn alternating_weak(i: usize) -> String {
        format!("alternating_coeff_weak_{i}")
    }
    pub fn tail_general(j: usize) -> String {
        format!("tail_coeff_{j}")
    }
    pub fn tail_adic(j: usize) -> String {
        format!("tail_coeff_adic_{j}")
    }
    pub fn tail_cm(j: usize) -> String {
        format!("tail_coeff_cm_{j}")
    }
    pub fn coeff_vs_sections(i: usize) -> String {
        format!("coeff_vs_sections_{i}")
    }
    pub fn graded_coeff_vs_sections(i: usize) -> String {
        format!("graded_coeff_vs_sections_{i}")
    }
    pub fn section_h0(i: usize) -> String {
        format!("section_h0_{i}")
    }
}

impl BoundLedger {
    pub fn get(&self, name: &str) -> Option<&LedgerEntry> {
        self.entries.get(name)
    }

    pub fn value(&self, name: &str) -> Option<&BigInt> {
        self.entries.get(name).and_then(LedgerEntry::value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LedgerEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn put(&mut self, name: impl Into<String>, v: Result<BigInt>) -> Result<()> {
        let entry = match v {
            Ok(x) => LedgerEntry::Value(x),
            Err(e) if e.is_resource() => LedgerEntry::Inapplicable(format!("not evaluated: {e}")),
            Err(e) => return Err(e),
        };
        self.entries.insert(name.into(), entry);
        Ok(())
    }

    fn skip(&mut self, name: impl Into<String>, why: &str) {
        self.entries.insert(name.into(), LedgerEntry::Inapplicable(why.to_string()));
    }

    /// Evaluates every bound for which `inputs` carries the needed quantities.
    pub fn build(inputs: &BoundInputs) -> Result<BoundLedger> {
        inputs.validate()?;
        let BoundInputs { d, t, r, delta_prime, .. } = *inputs;
        let e = &inputs.e;
        let mut ledger = BoundLedger::default();

        match &inputs.graded_e {
            Some(ge) if ge.len() >= d => {
                let m = reg1_recursive_sequence(ge, delta_prime, d);
                ledger.put(names::REG1_RECURSIVE, m.map(|m| m[d - 1].clone() - 1))?;
                ledger.put(names::REG1_EXPLICIT, reg1_explicit_bound(xi(ge, d - 1), delta_prime, d))?;
            }
            _ => {
                ledger.skip(names::REG1_RECURSIVE, "requires a standard graded associated module");
                ledger.skip(names::REG1_EXPLICIT, "requires a standard graded associated module");
            }
        }

        ledger.put(names::REG_ALL_COEFFS, reg_bound_all_coeffs(xi(e, d), r, d))?;
        ledger.put(names::REG_DEPTH, reg_bound_depth(xi(e, d - t), r, d, t))?;

        for i in 1..=d {
            if i == 1 {
                ledger.put(names::alternating_sharp(1), alternating_coeff_bound(e[0].max(0) as u64, r, 1).map(|b| b.sharp))?;
                ledger.skip(names::alternating_weak(1), "weak form stated for i >= 2");
            } else {
                match alternating_coeff_bound(xi(e, i - 1), r, i) {
                    Ok(b) => {
                        ledger.put(names::alternating_sharp(i), Ok(b.sharp))?;
                        ledger.put(names::alternating_weak(i), Ok(b.weak.expect("i >= 2")))?;
                    }
                    Err(err) => {
                        ledger.put(names::alternating_sharp(i), Err(err.clone()))?;
                        ledger.put(names::alternating_weak(i), Err(err))?;
                    }
                }
            }
        }

        for j in 1..=d {
            match tail_coeff_bound(xi(e, d - t), r, d, t, j) {
                Ok(Some(b)) => {
                    ledger.put(names::tail_general(j), Ok(b.general))?;
                    match (b.adic, inputs.adic) {
                        (Some(v), true) => ledger.put(names::tail_adic(j), Ok(v))?,
                        _ => ledger.skip(names::tail_adic(j), "requires an ideal-adic filtration"),
                    }
                    match b.cohen_macaulay {
                        Some(v) => ledger.put(names::tail_cm(j), Ok(v))?,
                        None => ledger.skip(names::tail_cm(j), "requires depth = dimension"),
                    }
                }
                Ok(None) => {
                    let why = if t == 0 { "requires depth >= 1" } else { "index below d - t + 1" };
                    ledger.skip(names::tail_general(j), why);
                    ledger.skip(names::tail_adic(j), why);
                    ledger.skip(names::tail_cm(j), why);
                }
                Err(err) => {
                    for name in [names::tail_general(j), names::tail_adic(j), names::tail_cm(j)] {
                        ledger.put(name, Err(err.clone()))?;
                    }
                }
            }
        }

        match (inputs.b, inputs.reg) {
            (Some(b), Some(reg)) => {
                for i in 1..=d {
                    ledger.put(names::coeff_vs_sections(i), coeff_vs_sections_bound(b, reg, i))?;
                }
            }
            _ => {
                for i in 1..=d {
                    ledger.skip(names::coeff_vs_sections(i), "requires B and reg(G)");
                }
            }
        }

        for i in 1..d {
            match (inputs.b, inputs.reg1, &inputs.graded_e) {
                _ if t == 0 => ledger.skip(names::graded_coeff_vs_sections(i), "checked only for depth >= 1"),
                (Some(b), Some(reg1), Some(_)) => {
                    ledger.put(names::graded_coeff_vs_sections(i), graded_coeff_vs_sections_bound(b, reg1, i))?
                }
                _ => ledger.skip(names::graded_coeff_vs_sections(i), "requires B, reg¹ and graded coefficients"),
            }
        }

        match inputs.reg {
            Some(reg) => {
                for i in 0..d {
                    ledger.put(names::section_h0(i), section_h0_bound(xi(e, d), reg, d, i))?;
                }
                ledger.put(names::SECTION_LENGTH, section_length_bound(xi(e, d), reg, d))?;
            }
            None => {
                for i in 0..d {
                    ledger.skip(names::section_h0(i), "requires reg(G)");
                }
                ledger.skip(names::SECTION_LENGTH, "requires reg(G)");
            }
        }

        match (inputs.reg_bar, inputs.h0) {
            (Some(rb), Some(h0)) => {
                ledger.put(names::REG_VS_SATURATION, Ok(reg_vs_saturation_bound(rb, r, h0)))?;
                ledger.put(names::H0_VS_POLYNOMIAL, samuel_polynomial_at(e, rb.max(0)))?;
            }
            _ => {
                ledger.skip(names::REG_VS_SATURATION, "requires reg(Ḡ) and h⁰");
                ledger.skip(names::H0_VS_POLYNOMIAL, "requires reg(Ḡ) and h⁰");
            }
        }
        Ok(ledger)
    }
}

/// Decimal digit count of `|v|`.
pub fn decimal_digits(v: &BigInt) -> usize {
    if v.is_zero() {
        1
    } else {
        v.abs().to_string().len()
    }
}

/// Scientific rendering such as `1.7e722`.
pub fn scientific(v: &BigInt) -> String {
    let s = v.abs().to_string();
    let sign = if v.is_negative() { "-" } else { "" };
    if s.len() <= 6 {
        return format!("{sign}{s}");
    }
    let mantissa: f64 = format!("{}.{}", &s[..1], &s[1..5]).parse().unwrap_or(0.0);
    format!("{sign}{mantissa:.2}e{}", s.len() - 1)
}

/// `floor(log2(a / b))` for positive `a`, `b`.
pub fn floor_log2_ratio(a: &BigInt, b: &BigInt) -> i64 {
    debug_assert!(a.is_positive() && b.is_positive());
    let k = a.bits() as i64 - b.bits() as i64;
    let ge = if k >= 0 { *a >= (b << k as usize) } else { (a << (-k) as usize) >= *b };
    if ge {
        k
    } else {
        k - 1
    }
}

/// Saturating conversion for reporting small values.
pub fn to_i64_saturating(v: &BigInt) -> i64 {
    v.to_i64().unwrap_or(if v.is_negative() { i64::MIN } else { i64::MAX })
}
