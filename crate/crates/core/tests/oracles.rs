//! Independent oracles and algebraic properties, checked on random inputs.

use hilbertforge_core::bounds::{
    alternating_coeff_bound, coeff_vs_sections_bound, graded_coeff_vs_sections_bound, reg1_explicit_bound,
    reg1_recursive_sequence, reg_bound_all_coeffs, reg_bound_depth, reg_vs_saturation_bound, section_h0_bound,
    section_length_bound, tail_coeff_bound, xi, BoundLedger,
};
use hilbertforge_core::hilbert::{
    hilbert_function, hilbert_samuel_by_tail, hilbert_samuel_values, series_expansion, series_numerator,
    FiltrationSpec,
};
use hilbertforge_core::invariants::betti_of_ideal;
use hilbertforge_core::linalg::{cyclic_module, PrimeFieldMatrix};
use hilbertforge_core::monomial::{MonomialIdeal, RingSpec};
use hilbertforge_core::verifier::fuzz::generate_case;
use hilbertforge_core::verifier::{analyze_case, check_inequalities, CheckStatus, EngineConfig, FuzzParams};
use num_bigint::BigInt;
use proptest::prelude::*;

fn dense_rank(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let inv = |x: u64| {
        let (mut r, mut b, mut e) = (1u128, x as u128, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u128;
            }
            b = b * b % p as u128;
            e >>= 1;
        }
        r as u64
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let s = inv(a[rank][c]);
        for x in a[rank].iter_mut() {
            *x = (*x as u128 * s as u128 % p as u128) as u64;
        }
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..cols {
                    let sub = (f as u128 * a[rank][k] as u128 % p as u128) as u64;
                    a[r][k] = (a[r][k] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Counts degree-`j` monomials outside the ideal by listing them all.
fn brute_force_hilbert(gens: &[Vec<u32>], n: usize, j: u32) -> u64 {
    fn walk(gens: &[Vec<u32>], cur: &mut Vec<u32>, i: usize, left: u32, count: &mut u64) {
        if i + 1 == cur.len() {
            cur[i] = left;
            if !gens.iter().any(|g| g.iter().zip(cur.iter()).all(|(a, b)| a <= b)) {
                *count += 1;
            }
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            walk(gens, cur, i + 1, left - e, count);
        }
    }
    let mut count = 0;
    walk(gens, &mut vec![0; n], 0, j, &mut count);
    count
}

fn ideal_strategy(n_max: usize, gen_max: usize, exp_max: u32) -> impl Strategy<Value = (usize, Vec<Vec<u32>>)> {
    (1..=n_max).prop_flat_map(move |n| {
        let gen = prop::collection::vec(0..=exp_max, n).prop_filter("constant", |g| g.iter().any(|&e| e > 0));
        (Just(n), prop::collection::vec(gen, 0..=gen_max))
    })
}

fn matrix_strategy() -> impl Strategy<Value = (u64, Vec<Vec<u64>>)> {
    (prop::sample::select(vec![2u64, 3, 7, 32003]), 1..=10usize, 1..=10usize).prop_flat_map(|(p, r, c)| {
        let entry = prop_oneof![3 => Just(0u64), 2 => 0..p];
        (Just(p), prop::collection::vec(prop::collection::vec(entry, c), r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn sparse_rank_matches_dense_elimination((p, dense) in matrix_strategy()) {
        let m = PrimeFieldMatrix::from_dense(p, &dense);
        prop_assert_eq!(m.rank(), dense_rank(dense.clone(), p));
        prop_assert_eq!(m.transpose().rank(), m.rank());
        let (rank, kernel) = m.rank_kernel();
        prop_assert_eq!(rank + kernel, m.cols());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn enumeration_matches_series_expansion((n, gens) in ideal_strategy(4, 5, 4)) {
        let q = MonomialIdeal::from_exponents(n, &gens).unwrap();
        let numerator = series_numerator(&q).unwrap();
        let series = series_expansion(&numerator, n, 12);
        for j in 0..=12u32 {
            let enumerated = hilbert_function(&q, j as u64);
            prop_assert_eq!(enumerated, brute_force_hilbert(&gens, n, j), "degree {}", j);
            prop_assert_eq!(enumerated as i64, series[j as usize], "degree {}", j);
        }
    }

    #[test]
    fn betti_numbers_reproduce_the_series((n, gens) in ideal_strategy(3, 4, 3)) {
        let q = MonomialIdeal::from_exponents(n, &gens).unwrap();
        prop_assume!(!q.is_unit());
        let betti = betti_of_ideal(&q, RingSpec::new(n, 32003).unwrap()).unwrap();
        let mut lhs = betti.euler_numerator();
        let mut rhs = series_numerator(&q).unwrap();
        for v in [&mut lhs, &mut rhs] {
            while v.last() == Some(&0) {
                v.pop();
            }
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn variable_permutations_preserve_invariants(
        (n, gens) in ideal_strategy(4, 4, 3),
        shuffle in any::<prop::sample::Index>(),
    ) {
        let q = MonomialIdeal::from_exponents(n, &gens).unwrap();
        prop_assume!(!q.is_unit());
        let perms = permutations(n);
        let perm = &perms[shuffle.index(perms.len())];
        let moved = q.permuted(perm);
        prop_assert_eq!(moved.krull_dim().unwrap(), q.krull_dim().unwrap());
        prop_assert_eq!(series_numerator(&moved).unwrap(), series_numerator(&q).unwrap());
        let ring = RingSpec::new(n, 32003).unwrap();
        prop_assert_eq!(betti_of_ideal(&moved, ring).unwrap(), betti_of_ideal(&q, ring).unwrap());
        if !q.is_m_primary() {
            prop_assert_eq!(moved.saturate().unwrap(), q.saturate().unwrap().permuted(perm));
        }
    }

    #[test]
    fn dimension_is_the_pole_order_at_one((n, gens) in ideal_strategy(4, 5, 4)) {
        let q = MonomialIdeal::from_exponents(n, &gens).unwrap();
        prop_assume!(!q.is_unit());
        let mut num = series_numerator(&q).unwrap();
        let mut divisions = 0;
        // synthetic division by (1 - t) while t = 1 is a root
        while num.iter().sum::<i64>() == 0 && !num.is_empty() {
            let mut quotient = Vec::with_capacity(num.len() - 1);
            let mut acc = 0;
            for &c in &num[..num.len() - 1] {
                acc += c;
                quotient.push(acc);
            }
            num = quotient;
            divisions += 1;
        }
        prop_assert_eq!(n - divisions, q.krull_dim().unwrap());
    }

    #[test]
    fn cyclic_module_dimensions_are_the_hilbert_function((n, gens) in ideal_strategy(3, 4, 3)) {
        let q = MonomialIdeal::from_exponents(n, &gens).unwrap();
        prop_assume!(!q.is_unit());
        let module = cyclic_module(&q, 8, RingSpec::new(n, 32003).unwrap()).unwrap();
        for j in 0..=8usize {
            prop_assert_eq!(module.dim(j) as u64, hilbert_function(&q, j as u64));
        }
        prop_assert!(module.multiplication_commutes());
    }

    #[test]
    fn samuel_values_agree_with_tail_lengths(index in 0usize..10_000) {
        let params = FuzzParams::default();
        let Ok(f) = generate_case(&params, index) else { return Ok(()) };
        prop_assert_eq!(hilbert_samuel_by_tail(&f, 10).unwrap(), hilbert_samuel_values(&f, 10).unwrap());
    }

    #[test]
    fn saturation_is_idempotent_and_larger((n, gens) in ideal_strategy(4, 4, 4)) {
        let q = MonomialIdeal::from_exponents(n, &gens).unwrap();
        if q.is_m_primary() {
            prop_assert!(q.is_unit() || q.saturate().unwrap().is_unit());
            return Ok(());
        }
        let sat = q.saturate().unwrap();
        prop_assert!(q.is_subset_of(&sat));
        prop_assert_eq!(sat.saturate().unwrap(), sat.clone());
        if !sat.is_unit() {
            prop_assert_eq!(sat.krull_dim().unwrap(), q.krull_dim().unwrap());
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn coeffs_strategy() -> impl Strategy<Value = (usize, Vec<i64>)> {
    (1..=4usize).prop_flat_map(|d| {
        (Just(d), 1..=6i64, prop::collection::vec(-6..=6i64, d)).prop_map(|(d, e0, rest)| {
            let mut e = vec![e0];
            e.extend(rest);
            (d, e)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn explicit_reg1_bound_dominates_recursion((d, e) in coeffs_strategy(), dp in 0u64..=3) {
        let m = reg1_recursive_sequence(&e, dp, d).unwrap();
        let explicit = reg1_explicit_bound(xi(&e, d - 1), dp, d).unwrap();
        prop_assert!(explicit >= m[d - 1].clone() - 1, "m_d = {}, explicit {}", m[d - 1], explicit);
    }

    #[test]
    fn bounds_are_monotone(xi_v in 0u64..=5, r in 0u64..=3, b in 1u64..=6, reg in 0u64..=6, d in 1usize..=3, i in 1usize..=3) {
        let grow = |f: &dyn Fn(u64, u64, u64, u64) -> BigInt| {
            let base = f(xi_v, r, b, reg);
            [f(xi_v + 1, r, b, reg), f(xi_v, r + 1, b, reg), f(xi_v, r, b + 1, reg), f(xi_v, r, b, reg + 1)]
                .into_iter()
                .all(|v| v >= base)
        };
        prop_assert!(grow(&|x, r, _, _| reg_bound_all_coeffs(x, r, d).unwrap()));
        for t in 0..=d {
            prop_assert!(grow(&|x, r, _, _| reg_bound_depth(x, r, d, t).unwrap()));
            for j in 1..=d {
                if let Some(base) = tail_coeff_bound(xi_v, r, d, t, j).unwrap() {
                    let up = tail_coeff_bound(xi_v + 1, r + 1, d, t, j).unwrap().unwrap();
                    prop_assert!(up.general >= base.general);
                }
            }
        }
        prop_assert!(grow(&|x, r, _, _| alternating_coeff_bound(x.max(1), r, i).unwrap().sharp));
        prop_assert!(grow(&|_, _, b, reg| coeff_vs_sections_bound(b, reg, i).unwrap()));
        prop_assert!(grow(&|_, _, b, reg| graded_coeff_vs_sections_bound(b, reg, i).unwrap()));
        prop_assert!(grow(&|x, _, _, reg| section_h0_bound(x, reg, d, i).unwrap()));
        prop_assert!(grow(&|x, _, _, reg| section_length_bound(x, reg, d).unwrap()));
        prop_assert!(grow(&|_, r, b, reg| reg_vs_saturation_bound(reg as i64, r, b)));
        prop_assert!(grow(&|x, _, _, _| reg1_explicit_bound(x, 0, d).unwrap()));
        prop_assert!(grow(&|x, r, _, _| reg1_explicit_bound(x, r, d).unwrap()));
    }

    #[test]
    fn adic_tail_bound_is_the_general_bound_at_zero_reduction(xi_v in 0u64..=6, d in 1usize..=3, t in 1usize..=3, j in 1usize..=3) {
        prop_assume!(t <= d);
        if let Some(b) = tail_coeff_bound(xi_v, 0, d, t, j).unwrap() {
            prop_assert_eq!(Some(b.general), b.adic);
        }
    }

    #[test]
    fn strict_alternating_bound_sits_below_the_weak_one(xi_v in 1u64..=5, r in 0u64..=2, i in 2usize..=3) {
        let b = alternating_coeff_bound(xi_v, r, i).unwrap();
        prop_assert!(b.sharp < b.weak.unwrap());
    }
}

#[test]
fn fabricated_coefficient_violation_is_reported() {
    let ring = RingSpec::new(2, 32003).unwrap();
    let q = MonomialIdeal::from_exponents(2, &[vec![2, 0], vec![1, 2]]).unwrap();
    let f = FiltrationSpec::adic(ring, q, MonomialIdeal::maximal(2)).unwrap();
    let mut rep = analyze_case(&f, &EngineConfig::default()).unwrap();
    rep.e = vec![2, 100];
    rep.xi = vec![2, 100];
    let ledger = BoundLedger::build(&rep.bound_inputs()).unwrap();
    let checks = check_inequalities(&rep, &ledger);
    let c = checks.iter().find(|c| c.name == "alternating_coeff_sharp_1").unwrap();
    assert_eq!(c.status, CheckStatus::Fail);
    assert_eq!((c.lhs.as_deref(), c.rhs.as_deref()), (Some("100"), Some("1")));
}
