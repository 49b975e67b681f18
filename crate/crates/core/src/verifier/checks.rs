//! Inequality and identity checks over an [`InvariantReport`] and its bound ledger.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use super::analyze::{InvariantReport, Regime};
use crate::bounds::{floor_log2_ratio, names, BoundLedger, LedgerEntry};
use crate::hilbert::{series_expansion, Certification};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
    /// Holds, but an input rests on a missing certificate named in the note.
    Uncertified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    fn holds(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    /// `floor(log2(max(rhs, 1) / max(lhs, 1)))` for inequalities.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn inapplicable(name: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            status: CheckStatus::Inapplicable,
            relation: None,
            lhs: None,
            rhs: None,
            margin: None,
            note: Some(reason.into()),
        }
    }

    /// Evaluates `lhs rel rhs`. `missing` names a certificate the inputs lack, if any.
    pub fn compare(name: impl Into<String>, lhs: BigInt, rel: Relation, rhs: BigInt, missing: Option<String>) -> Self {
        let holds = rel.holds(&lhs, &rhs);
        let margin = match rel {
            Relation::Eq => None,
            _ => {
                let one = BigInt::one();
                Some(floor_log2_ratio(&rhs.clone().max(one.clone()), &lhs.clone().max(one)))
            }
        };
        let status = match (holds, &missing) {
            (false, _) => CheckStatus::Fail,
            (true, Some(_)) => CheckStatus::Uncertified,
            (true, None) => CheckStatus::Pass,
        };
        CheckRecord {
            name: name.into(),
            status,
            relation: Some(rel),
            lhs: Some(lhs.to_string()),
            rhs: Some(rhs.to_string()),
            margin,
            note: missing,
        }
    }
}

/// Result of checking one case.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationVerdict {
    pub checks: Vec<CheckRecord>,
}

impl VerificationVerdict {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const GUARD_CERTIFICATE: &str = "missing certificate: postulation detected empirically (guard-window fit)";
pub const CHARACTERISTIC_CERTIFICATE: &str = "missing certificate: invariants differ at the check prime";

fn big(v: impl Into<BigInt>) -> BigInt {
    v.into()
}

struct Ctx<'a> {
    rep: &'a InvariantReport,
    ledger: &'a BoundLedger,
    out: Vec<CheckRecord>,
}

impl Ctx<'_> {
    fn coeff_cert(&self) -> Option<String> {
        (self.rep.certification == Certification::GuardCertified).then(|| GUARD_CERTIFICATE.to_string())
    }

    fn linalg_cert(&self) -> Option<String> {
        (self.rep.characteristic_consistent == Some(false)).then(|| CHARACTERISTIC_CERTIFICATE.to_string())
    }

    fn both_certs(&self) -> Option<String> {
        match (self.coeff_cert(), self.linalg_cert()) {
            (Some(a), Some(b)) => Some(format!("{a}; {b}")),
            (a, b) => a.or(b),
        }
    }

    /// Compares `lhs` against a ledger entry.
    fn against(&mut self, check: &str, entry: &str, lhs: Option<BigInt>, rel: Relation, cert: Option<String>) {
        let record = match (self.ledger.get(entry), lhs) {
            (Some(LedgerEntry::Value(rhs)), Some(lhs)) => CheckRecord::compare(check, lhs, rel, rhs.clone(), cert),
            (Some(LedgerEntry::Inapplicable(why)), _) => CheckRecord::inapplicable(check, why.clone()),
            (None, _) => CheckRecord::inapplicable(check, "no ledger entry"),
            (_, None) => CheckRecord::inapplicable(check, "left-hand side not computed in this regime"),
        };
        self.out.push(record);
    }
}

/// Every inequality applicable to the report, one record per check name.
pub fn check_inequalities(rep: &InvariantReport, ledger: &BoundLedger) -> Vec<CheckRecord> {
    let mut cx = Ctx { rep, ledger, out: Vec::new() };
    let d = rep.d;
    let e = &rep.e;
    let graded = rep.regime == Regime::A;
    let reg = rep.reg.map(big);
    let reg1 = rep.reg1.map(big);

    let lin = cx.linalg_cert();
    let both = cx.both_certs();
    let coeff = cx.coeff_cert();

    cx.against(names::REG1_RECURSIVE, names::REG1_RECURSIVE, reg1.clone(), Relation::Le, lin.clone());
    cx.against(names::REG1_EXPLICIT, names::REG1_EXPLICIT, reg1.clone(), Relation::Le, lin.clone());
    cx.against(names::REG_ALL_COEFFS, names::REG_ALL_COEFFS, reg.clone(), Relation::Lt, lin.clone());
    cx.against(names::REG_DEPTH, names::REG_DEPTH, reg.clone(), Relation::Le, lin.clone());
    cx.against("postulation_vs_depth_bound", names::REG_DEPTH, Some(big(rep.postulation as u64)), Relation::Le, both.clone());

    for i in 1..=d {
        let signed = if i % 2 == 1 { big(e[i]) } else { -big(e[i]) };
        cx.against(&names::alternating_sharp(i), &names::alternating_sharp(i), Some(signed.clone()), Relation::Le, both.clone());
        cx.against(&names::alternating_weak(i), &names::alternating_weak(i), Some(signed), Relation::Lt, both.clone());
    }

    for j in 1..=d {
        let abs = Some(big(e[j]).abs());
        cx.against(&names::tail_general(j), &names::tail_general(j), abs.clone(), Relation::Le, both.clone());
        cx.against(&names::tail_adic(j), &names::tail_adic(j), abs.clone(), Relation::Lt, both.clone());
        cx.against(&names::tail_cm(j), &names::tail_cm(j), abs, Relation::Le, both.clone());
    }

    for i in 1..=d {
        let lhs = graded.then(|| big(e[i]).abs());
        cx.against(&names::coeff_vs_sections(i), &names::coeff_vs_sections(i), lhs, Relation::Lt, both.clone());
    }
    for i in 1..d {
        let lhs = rep.graded_e.as_ref().map(|g| big(g[i]).abs());
        cx.against(&names::graded_coeff_vs_sections(i), &names::graded_coeff_vs_sections(i), lhs, Relation::Le, both.clone());
    }
    for i in 0..d {
        let lhs = graded.then(|| big(rep.sections.h0_chain[i]));
        cx.against(&names::section_h0(i), &names::section_h0(i), lhs, Relation::Le, both.clone());
    }
    cx.against(names::SECTION_LENGTH, names::SECTION_LENGTH, rep.b.map(big), Relation::Lt, both.clone());
    cx.against(names::REG_VS_SATURATION, names::REG_VS_SATURATION, reg, Relation::Le, lin);
    cx.against(names::H0_VS_POLYNOMIAL, names::H0_VS_POLYNOMIAL, Some(big(rep.h0)), Relation::Le, both);

    if rep.depth == d {
        cx.out.push(CheckRecord::compare("cm_e1_nonnegative", big(0), Relation::Le, big(e[1]), coeff.clone()));
    } else {
        cx.out.push(CheckRecord::inapplicable("cm_e1_nonnegative", "requires depth = dimension"));
    }
    if rep.depth == d && d >= 2 {
        cx.out.push(CheckRecord::compare("cm_e2_nonnegative", big(0), Relation::Le, big(e[2]), coeff));
    } else {
        cx.out.push(CheckRecord::inapplicable("cm_e2_nonnegative", "requires depth = dimension >= 2"));
    }
    cx.out
}

/// Exact identities between independently computed quantities.
pub fn check_identities(rep: &InvariantReport) -> Vec<CheckRecord> {
    let cx = Ctx { rep, ledger: &BoundLedger::default(), out: Vec::new() };
    let coeff = cx.coeff_cert();
    let lin = cx.linalg_cert();
    let both = cx.both_certs();
    let mut out = Vec::new();
    let d = rep.d;

    let sign = if d.is_multiple_of(2) { 1 } else { -1 };
    out.push(CheckRecord::compare(
        "h0_coefficient_identity",
        big(rep.h0),
        Relation::Eq,
        big(sign) * (big(rep.e[d]) - big(rep.e_bar[d])),
        coeff.clone(),
    ));
    let lower_equal = (0..d).all(|i| rep.e[i] == rep.e_bar[i]);
    out.push(CheckRecord::compare(
        "lower_coefficients_saturation",
        big(lower_equal as u8),
        Relation::Eq,
        big(1),
        coeff.clone(),
    ));

    match rep.reg {
        Some(reg) => {
            let reg = reg.max(0) as usize;
            let window: Vec<usize> = (reg..=reg + d + 5).collect();
            let mismatches = window
                .iter()
                .filter(|&&n| rep.samuel_values.get(n).map(|&v| v as i128) != Some(rep.samuel_polynomial(n as i64)))
                .count();
            out.push(CheckRecord::compare("polynomial_from_regularity", big(mismatches as u64), Relation::Eq, big(0), lin.clone()));
            out.push(CheckRecord::compare(
                "postulation_vs_regularity",
                big(rep.postulation as u64),
                Relation::Le,
                big(reg as u64),
                lin.clone(),
            ));
        }
        None => {
            out.push(CheckRecord::inapplicable("polynomial_from_regularity", "requires reg(G)"));
            out.push(CheckRecord::inapplicable("postulation_vs_regularity", "requires reg(G)"));
        }
    }

    out.push(CheckRecord::compare(
        "auslander_buchsbaum",
        big((rep.sections.depth + rep.pd) as u64),
        Relation::Eq,
        big(rep.n as u64),
        lin.clone(),
    ));
    out.push(CheckRecord::compare(
        "depth_zero_iff_h0",
        big(((rep.depth == 0) == (rep.h0 > 0)) as u8),
        Relation::Eq,
        big(1),
        None,
    ));

    let expansion = series_expansion(&rep.series_numerator, rep.n, rep.hilbert_function.len() - 1);
    let oracle_mismatch = expansion.iter().zip(&rep.hilbert_function).filter(|(a, b)| **a != **b as i64).count();
    out.push(CheckRecord::compare("hilbert_series_oracle", big(oracle_mismatch as u64), Relation::Eq, big(0), None));

    let euler = rep.betti.euler_numerator();
    out.push(CheckRecord::compare(
        "betti_euler_characteristic",
        big((euler == rep.series_numerator) as u8),
        Relation::Eq,
        big(1),
        lin.clone(),
    ));
    out.push(CheckRecord::compare(
        "h0_linear_algebra",
        big(rep.sections.h0_chain.first().copied().unwrap_or(0)),
        Relation::Eq,
        big(rep.h0),
        lin.clone(),
    ));

    match &rep.graded_e {
        Some(g) => {
            let agree = (0..d).all(|i| g[i] == rep.e[i]);
            out.push(CheckRecord::compare("graded_local_agreement", big(agree as u8), Relation::Eq, big(1), None));
        }
        None => out.push(CheckRecord::inapplicable("graded_local_agreement", "requires a standard graded associated module")),
    }
    match (rep.reg, rep.reg1) {
        (Some(reg), Some(reg1)) => out.push(CheckRecord::compare("reg1_le_reg", big(reg1), Relation::Le, big(reg), lin.clone())),
        _ => out.push(CheckRecord::inapplicable("reg1_le_reg", "requires reg(G)")),
    }
    match rep.b {
        Some(b) => out.push(CheckRecord::compare("multiplicity_le_sections", big(rep.e[0]), Relation::Le, big(b), both.clone())),
        None => out.push(CheckRecord::inapplicable("multiplicity_le_sections", "requires B")),
    }
    out.push(CheckRecord::compare("multiplicity_positive", big(1), Relation::Le, big(rep.e[0]), coeff));
    out
}

/// Inequalities and identities for one case.
pub fn verify_report(rep: &InvariantReport, ledger: &BoundLedger) -> VerificationVerdict {
    let mut checks = check_inequalities(rep, ledger);
    checks.extend(check_identities(rep));
    VerificationVerdict { checks }
}
