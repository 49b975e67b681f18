//! Per-case pipeline: every invariant of a filtration presented by monomial ideals.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundInputs};
use crate::error::{Error, Result};
use crate::hilbert::{
    self, fit_coefficients, fit_filtration_empirical, series_numerator, Certification, FiltrationSpec, FitMode,
    GUARD_EXTRA,
};
use crate::invariants::{betti_of_ideal, homological_profile, section_chain, BettiTable, SectionChainReport};
use crate::linalg::{CHECK_PRIME, DEFAULT_PRIME};
use crate::monomial::RingSpec;

/// Degrees through which the Hilbert function is enumerated for the series cross-check.
pub const ORACLE_DEGREE: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `J = m`, no initial chain: the associated graded module is `R/Q` itself.
    A,
    /// Any other filtration; coefficients are fitted empirically.
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub prime: u64,
    /// Second characteristic for the consistency recheck.
    pub check_prime: Option<u64>,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { prime: DEFAULT_PRIME, check_prime: Some(CHECK_PRIME), seed: 0 }
    }
}

impl EngineConfig {
    pub fn primes(&self) -> Vec<u64> {
        std::iter::once(self.prime).chain(self.check_prime).collect()
    }
}

/// Linear-algebra summary of `R/Q` cut by generic linear forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionSummary {
    pub b: u64,
    pub h0_chain: Vec<u64>,
    pub depth: usize,
    pub seeds: Vec<u64>,
    pub rejected: Vec<u64>,
    pub artinian_top_clear: bool,
}

impl From<SectionChainReport> for SectionSummary {
    fn from(r: SectionChainReport) -> Self {
        SectionSummary {
            b: r.b,
            h0_chain: r.h0_chain,
            depth: r.depth,
            seeds: r.seeds,
            rejected: r.rejected,
            artinian_top_clear: r.artinian_top_clear,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub regime: Regime,
    pub n: usize,
    pub d: usize,
    /// `depth(R/Q) = n - pd`.
    pub depth: usize,
    pub pd: usize,
    /// `reg(R/Q)` and `reg(R/Q^sat)` from the Betti tables.
    pub reg_quotient: i64,
    pub reg_saturated: i64,
    pub reg1_quotient: i64,
    /// `reg(G(ℱ))`, `reg¹(G(ℱ))`, `reg(G(ℱ̄))`; known only when `G(ℱ) = R/Q`.
    pub reg: Option<i64>,
    pub reg1: Option<i64>,
    pub reg_bar: Option<i64>,
    pub h0: u64,
    /// Length of `M` modulo a superficial sequence; known only when `G(ℱ) = R/Q`.
    pub b: Option<u64>,
    pub r: usize,
    pub e: Vec<i64>,
    /// Coefficients of the filtration induced on `R/Q^sat`.
    pub e_bar: Vec<i64>,
    pub graded_e: Option<Vec<i64>>,
    pub xi: Vec<u64>,
    pub postulation: usize,
    pub postulation_bar: usize,
    pub certification: Certification,
    /// `H(0), ..., H(n_max)`.
    pub samuel_values: Vec<i64>,
    /// Enumerated Hilbert function of `R/Q`.
    pub hilbert_function: Vec<u64>,
    pub series_numerator: Vec<i64>,
    pub betti: BettiTable,
    pub sections: SectionSummary,
    /// `None` when no check prime is configured.
    pub characteristic_consistent: Option<bool>,
    pub primes: Vec<u64>,
    pub seed: u64,
}

impl InvariantReport {
    /// Inputs for the bound ledger.
    pub fn bound_inputs(&self) -> BoundInputs {
        BoundInputs {
            d: self.d,
            t: self.depth,
            r: self.r as u64,
            delta_prime: 0,
            e: self.e.clone(),
            graded_e: self.graded_e.clone(),
            reg: self.reg.map(|v| v.max(0) as u64),
            reg1: self.reg1.map(|v| v.max(0) as u64),
            reg_bar: self.reg_bar,
            h0: Some(self.h0),
            b: self.b,
            adic: self.r == 0,
        }
    }

    /// `P(n)` for the fitted local polynomial.
    pub fn samuel_polynomial(&self, n: i64) -> i128 {
        hilbert::HilbertCoefficients {
            d: self.d,
            mode: FitMode::Local,
            e: self.e.clone(),
            postulation: self.postulation,
            certification: self.certification,
        }
        .eval(n)
    }
}

fn regime_of(f: &FiltrationSpec) -> Regime {
    if f.is_m_adic() {
        Regime::A
    } else {
        Regime::B
    }
}

/// Coefficients of the m-adic filtration of `R/q` from its enumerated Hilbert function,
/// fitted past `reg + d + GUARD_EXTRA + 1`.
fn graded_fit(hf: &[u64], reg: usize, d: usize) -> Result<(hilbert::HilbertCoefficients, Vec<i64>, hilbert::HilbertCoefficients)> {
    let n0 = reg + d + GUARD_EXTRA + 1;
    let mut acc = 0i64;
    let samuel: Vec<i64> = hf
        .iter()
        .map(|&h| {
            acc += h as i64;
            acc
        })
        .collect();
    let local = fit_coefficients(&samuel, d, FitMode::Local, Some(n0))?;
    let hf_i: Vec<i64> = hf.iter().map(|&h| h as i64).collect();
    let graded = fit_coefficients(&hf_i, d, FitMode::Graded, Some(n0))?;
    Ok((local, samuel, graded))
}

fn window_for(reg: usize, d: usize) -> usize {
    reg + 3 * d + 2 * GUARD_EXTRA + 1
}

/// Computes every invariant of `f` that the checks consume.
pub fn analyze_case(f: &FiltrationSpec, cfg: &EngineConfig) -> Result<InvariantReport> {
    let ring = RingSpec::new(f.ring.n, cfg.prime)?;
    let q = &f.q;
    let n = ring.n;
    let d = q.krull_dim()?;
    if d == 0 {
        return Err(Error::Unsupported("dimension 0: the module must have positive dimension".into()));
    }
    let regime = regime_of(f);

    let betti = betti_of_ideal(q, ring)?;
    let sat = q.saturate()?;
    let h0 = q.finite_difference_count(&sat)?;
    let betti_sat = if sat == *q { betti.clone() } else { betti_of_ideal(&sat, ring)? };
    let profile = homological_profile(&betti, Some(&betti_sat), n)?;
    let reg_saturated = homological_profile(&betti_sat, None, n)?.reg;
    let reg_q = profile.reg.max(0) as usize;

    let sections: SectionSummary = section_chain(q, d, reg_q, cfg.seed, ring)?.into();

    let characteristic_consistent = match cfg.check_prime {
        Some(p) => {
            let ring_p = RingSpec::new(n, p)?;
            let betti_p = betti_of_ideal(q, ring_p)?;
            let sections_p: SectionSummary = section_chain(q, d, reg_q, cfg.seed, ring_p)?.into();
            Some(
                betti_p == betti
                    && sections_p.b == sections.b
                    && sections_p.h0_chain == sections.h0_chain
                    && sections_p.depth == sections.depth,
            )
        }
        None => None,
    };

    let oracle_top = ORACLE_DEGREE.max(window_for(reg_q, d));
    let hilbert_function: Vec<u64> = (0..=oracle_top as u64).map(|j| hilbert::hilbert_function(q, j)).collect();
    let numerator = series_numerator(q)?;

    let (local, samuel_values, graded_e, e_bar, postulation_bar) = match regime {
        Regime::A => {
            let n_max = window_for(reg_q, d);
            let (local, samuel, graded) = graded_fit(&hilbert_function[..=n_max], reg_q, d)?;
            let reg_bar = reg_saturated.max(0) as usize;
            let n_bar = window_for(reg_bar, d);
            let hf_bar: Vec<u64> = (0..=n_bar as u64).map(|j| hilbert::hilbert_function(&sat, j)).collect();
            let (local_bar, _, _) = graded_fit(&hf_bar, reg_bar, d)?;
            (local, samuel, Some(graded.e), local_bar.e, local_bar.postulation)
        }
        Regime::B => {
            let (local, samuel) = fit_filtration_empirical(f, d)?;
            let f_bar = f.quotient(&sat)?;
            let (local_bar, _) = fit_filtration_empirical(&f_bar, d)?;
            (local, samuel, None, local_bar.e, local_bar.postulation)
        }
    };

    let graded_regime = regime == Regime::A;
    let xi = (0..=d).map(|s| bounds::xi(&local.e, s)).collect();
    Ok(InvariantReport {
        regime,
        n,
        d,
        depth: profile.depth,
        pd: profile.pd,
        reg_quotient: profile.reg,
        reg_saturated,
        reg1_quotient: profile.reg1,
        reg: graded_regime.then_some(profile.reg),
        reg1: graded_regime.then_some(profile.reg1),
        reg_bar: graded_regime.then_some(reg_saturated),
        h0,
        b: graded_regime.then_some(sections.b),
        r: f.reduction_number(),
        e: local.e,
        e_bar,
        graded_e,
        xi,
        postulation: local.postulation,
        postulation_bar,
        certification: local.certification,
        samuel_values,
        hilbert_function,
        series_numerator: numerator,
        betti,
        sections,
        characteristic_consistent,
        primes: cfg.primes(),
        seed: cfg.seed,
    })
}
