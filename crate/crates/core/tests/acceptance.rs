//! Acceptance gate: one test per criterion, each ending in a single
//! pass/fail line (visible with `--nocapture`). Every tolerance and
//! runtime budget is pinned here in code.

use std::time::Instant;

use num::{BigUint, ToPrimitive};
use picodes::code_builder::{
    gram_matrix, index_set, logical_state, validate, validate_legacy,
};
use picodes::damping_analytics::{
    cross_term_vanishes, dicke_pair_expectation, fourier_diagonal, state_expectation,
    CrossTermVerdict, KrausPair,
};
use picodes::dense_oracle::{
    compose_recovery_with_damping, dense_from_dicke, dicke_dense, entanglement_fidelity,
    expectation_dense, omega_fourier_set, random_invariant_state, recovery_map, CodeDensity,
    DenseOperator,
};
use picodes::exact_poly::{moment_sum, parse_rational, rational_string};
use picodes::fidelity_bound::taylor_comparison;
use picodes::number_theory::verify_no_interior_collision;
use picodes::{BigRational, CodeParameters};

fn reference_code() -> CodeParameters {
    validate(&[5, 6, 7], 3).expect("reference parameters are valid")
}

fn rat(s: &str) -> BigRational {
    parse_rational(s).expect("literal rational")
}

/// Criterion 1 — the normalized odd-weight binomial moments match their
/// closed forms exactly for all 1 ≤ n ≤ 64, r ∈ {0, 1, 2, 3}, in < 1 s.
/// `moment_sum` itself cross-checks the direct sum against the closed form
/// and errors on any mismatch.
#[test]
fn criterion_1_binomial_identities() {
    let start = Instant::now();
    for n in 1..=64 {
        for r in 0..=3 {
            moment_sum(n, r).unwrap_or_else(|e| panic!("n={n} r={r}: {e}"));
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 1 binomial identity suite: PASS ({elapsed:?})");
}

/// Criterion 2 — dense-oracle expectations of K_0†K_0, F_1†F_1, F_1†F_m on
/// every Dicke state match the analytic kernels within 1e-12 for all
/// m ≤ 10, 0 ≤ w ≤ m, γ ∈ {0.1, 0.37, 0.8}, in < 30 s.
#[test]
fn criterion_2_kernel_equivalence() {
    let start = Instant::now();
    let tol = 1e-12;
    let mut checked = 0usize;
    for m in 1..=10usize {
        let m_big = BigUint::from(m);
        for w in 0..=m as u64 {
            let psi = dicke_dense(m, w).unwrap();
            for gamma in [0.1, 0.37, 0.8] {
                let k0 = DenseOperator::K0 { gamma };
                let f1 = DenseOperator::F { gamma, j: 1 };
                let fm = DenseOperator::F { gamma, j: m };
                for (pair, a, b) in [
                    (KrausPair::K0K0, &k0, &k0),
                    (KrausPair::F1F1, &f1, &f1),
                    (KrausPair::F1Fm, &f1, &fm),
                ] {
                    let dense = expectation_dense(&psi, a, b).unwrap();
                    let exact = dicke_pair_expectation(w, &m_big, pair)
                        .eval_f64(gamma)
                        .to_f64()
                        .unwrap();
                    assert!(
                        (dense.re - exact).abs() <= tol && dense.im.abs() <= tol,
                        "m={m} w={w} gamma={gamma} {pair:?}: dense {dense} exact {exact}"
                    );
                    checked += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("criterion 2 kernel equivalence ({checked} cases): PASS ({elapsed:?})");
}

/// Criterion 3 — Fourier orthogonality on permutation-invariant states at
/// m ∈ {4, 6, 8}, γ ∈ {0.05, 0.2}: off-diagonal |⟨K_ℓ†K_ℓ′⟩| ≤ 1e-10 and
/// diagonals match the closed form within 1e-10, in < 60 s.
#[test]
fn criterion_3_fourier_orthogonality() {
    let start = Instant::now();
    let tol = 1e-10;
    for m in [4usize, 6, 8] {
        let (exact, dense) = random_invariant_state(m, 1000 + m as u64).unwrap();
        for gamma in [0.05, 0.2] {
            for l in 1..=m {
                let kl = DenseOperator::KFourier { gamma, l };
                for l2 in 1..=m {
                    let kl2 = DenseOperator::KFourier { gamma, l: l2 };
                    let value = expectation_dense(&dense, &kl, &kl2).unwrap();
                    if l == l2 {
                        let closed = fourier_diagonal(&exact, l == 1)
                            .eval_f64(gamma)
                            .to_f64()
                            .unwrap();
                        assert!(
                            (value.re - closed).abs() <= tol && value.im.abs() <= tol,
                            "m={m} gamma={gamma} l={l}: {value} vs {closed}"
                        );
                    } else {
                        assert!(
                            value.norm() <= tol,
                            "m={m} gamma={gamma} l={l} l2={l2}: |{value}|"
                        );
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 3 fourier orthogonality: PASS ({elapsed:?})");
}

/// Criterion 4 — construction exactness for the (5, 6, 7, q=3) code, zero
/// tolerance, < 1 s: parameters, logical supports and squared amplitudes,
/// Gram off-diagonals {0, 1/32, 0}, and all Diophantine verdicts.
#[test]
fn criterion_4_construction_exactness() {
    let start = Instant::now();
    let p = reference_code();
    assert_eq!(p.big_n(), 210);
    assert_eq!(p.g(), &[42, 35, 30]);
    assert_eq!(p.m(), &BigUint::from(9_261_000u64));

    let expected: [&[(u64, &str)]; 3] = [
        &[(42, "5/16"), (126, "5/8"), (210, "1/16")],
        &[(35, "3/16"), (105, "5/8"), (175, "3/16")],
        &[(30, "7/64"), (90, "35/64"), (150, "21/64"), (210, "1/64")],
    ];
    for (d, want) in expected.iter().enumerate() {
        let state = logical_state(&p, d + 1).unwrap();
        let got: Vec<(u64, BigRational)> = state.terms().to_vec();
        assert_eq!(got.len(), want.len(), "level {} support size", d + 1);
        for ((w, s), (w_want, s_want)) in got.iter().zip(want.iter()) {
            assert_eq!(w, w_want, "level {} support", d + 1);
            assert_eq!(s, &rat(s_want), "level {} amplitude at weight {w}", d + 1);
        }
    }

    let gram = gram_matrix(&p).unwrap();
    assert_eq!(gram[0][1], rat("0"));
    assert_eq!(gram[0][2], rat("1/32"));
    assert_eq!(gram[1][2], rat("0"));

    // Diophantine verdicts: no interior collisions, all weight-shift-(±1)
    // cross terms vanish, and the only shared weight sits at the top, w = N.
    let records = verify_no_interior_collision(&p).unwrap();
    assert_eq!(records.len(), 3);
    for r in &records {
        assert_eq!(r.lcm, 210);
        assert!(r.gcd > 1);
    }
    for d in 1..=3usize {
        for d2 in d + 1..=3 {
            for shift in [-1i64, 1] {
                assert!(
                    cross_term_vanishes(&p, d, d2, shift).vanishes(),
                    "cross({d},{d2},{shift})"
                );
            }
            match cross_term_vanishes(&p, d, d2, 0) {
                CrossTermVerdict::Vanishes { .. } => {}
                CrossTermVerdict::Collides { weight, .. } => assert_eq!(weight, 210),
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 4 construction exactness: PASS ({elapsed:?})");
}

/// Criterion 5 — the exact γ¹ coefficient of the assembled bound for
/// (5, 6, 7, q=3) is ≥ −N·g_1/(4m) = −1/4200, with the delta reported, and
/// the first-order magnitude respects the 1/(4N^(q−2)) envelope for
/// q ∈ {3, 4}. Exact arithmetic, < 5 s.
#[test]
fn criterion_5_first_order_coefficient() {
    let start = Instant::now();
    let p = reference_code();
    let t = taylor_comparison(&p).unwrap();

    assert_eq!(t.reference_first_order, rat("-1/4200"));
    assert!(t.per_operator.first_order >= t.reference_first_order);
    assert_eq!(t.per_operator.first_order, rat("-1/14700"));
    assert_eq!(t.first_order_delta, rat("1/5880"));

    assert_eq!(t.q_scaling.len(), 2);
    for row in &t.q_scaling {
        assert!(row.within_envelope, "q={} outside envelope", row.q);
        assert!(row.extracted_magnitude <= row.envelope);
    }
    assert_eq!(t.q_scaling[0].q, 3);
    assert_eq!(t.q_scaling[0].envelope, rat("1/840"));
    assert_eq!(t.q_scaling[0].extracted_magnitude, rat("1/14700"));
    assert_eq!(t.q_scaling[1].q, 4);
    assert_eq!(t.q_scaling[1].envelope, rat("1/176400"));
    assert_eq!(t.q_scaling[1].extracted_magnitude, rat("1/3087000"));

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 5 first-order coefficient: PASS (delta = {}, {elapsed:?})",
        rational_string(&t.first_order_delta)
    );
}

/// Criterion 6 — second-order comparison for (5, 6, 7, q=3): c′ = 197/105
/// reproduced exactly from its formula, c = c′ + 3g_1/m exact, reference
/// second order −c·N²/8, and the extracted-vs-reference discrepancy
/// reported exactly. < 5 s.
#[test]
fn criterion_6_second_order_comparison() {
    let start = Instant::now();
    let p = reference_code();
    let t = taylor_comparison(&p).unwrap();

    assert_eq!(t.reference_c_prime, rat("197/105"));
    let c_expected = rat("197/105") + rat("126/9261000");
    assert_eq!(t.reference_c, c_expected);
    let second_expected = -&c_expected * rat("44100") / rat("8");
    assert_eq!(t.reference_second_order, second_expected);

    // The discrepancy is reported exactly; the per-operator assembly may
    // legitimately differ from the reference constant (it is a bound, not
    // an equality), so the check is exact generation, not zero delta.
    let delta = &t.per_operator.second_order - &t.reference_second_order;
    assert_eq!(delta, t.second_order_delta);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 6 second-order comparison: PASS (c' = {}, c = {}, delta = {}, {elapsed:?})",
        rational_string(&t.reference_c_prime),
        rational_string(&t.reference_c),
        rational_string(&t.second_order_delta)
    );
}

/// Criterion 7 — recovery bound on a toy instance at m = 8: the dense
/// entanglement fidelity of recovery ∘ damping is ≥ Σ_A λ_A at
/// γ ∈ {0.02, 0.05} with margin ≥ −1e-9, the two sides computed by
/// disjoint code paths (dense linear algebra vs exact polynomials). < 60 s.
#[test]
fn criterion_7_recovery_bound() {
    let start = Instant::now();
    let m = 8usize;
    let p = validate_legacy(&[2, 3], &[8, 2], &BigUint::from(8u32)).unwrap();
    let states: Vec<_> = (1..=2).map(|d| logical_state(&p, d).unwrap()).collect();
    let basis: Vec<_> = states.iter().map(|s| dense_from_dicke(s).unwrap()).collect();
    let rho = CodeDensity {
        mixture: basis.iter().map(|b| (0.5, b.clone())).collect(),
    };

    for gamma_str in ["1/50", "1/20"] {
        let gamma_exact = rat(gamma_str);
        let gamma = gamma_exact.to_f64().unwrap();

        // Dense side.
        let recovery = recovery_map(&basis, &omega_fourier_set(m, gamma)).unwrap();
        let with_completion = entanglement_fidelity(
            &rho,
            &compose_recovery_with_damping(&recovery, m, gamma, true),
        )
        .unwrap();
        let without_completion = entanglement_fidelity(
            &rho,
            &compose_recovery_with_damping(&recovery, m, gamma, false),
        )
        .unwrap();

        // Exact side: λ_K0 + λ_K1 + (m−1)·λ_Kℓ from the polynomials.
        let min_over = |f: &dyn Fn(&picodes::DickeVector) -> BigRational| {
            states.iter().map(|s| f(s)).min().unwrap()
        };
        let lambda_k0 =
            min_over(&|s| state_expectation(s, KrausPair::K0K0).eval(&gamma_exact));
        let lambda_k1 = min_over(&|s| fourier_diagonal(s, true).eval(&gamma_exact));
        let lambda_kl = min_over(&|s| fourier_diagonal(s, false).eval(&gamma_exact));
        let bound = &lambda_k0
            + &lambda_k1
            + &lambda_kl * BigRational::from_integer((m as i64 - 1).into());
        let bound = bound.to_f64().unwrap();

        assert!(
            with_completion >= bound - 1e-9,
            "gamma={gamma}: F_e {with_completion} below bound {bound}"
        );
        assert!(
            without_completion >= bound - 1e-9,
            "gamma={gamma}: no-completion F_e {without_completion} below bound {bound}"
        );
        assert!(with_completion >= without_completion - 1e-12);
        println!(
            "  gamma={gamma_str}: F_e = {with_completion:.12} (no completion {without_completion:.12}) >= bound {bound:.12}"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 7 recovery bound on toy instance: PASS ({elapsed:?})");
}

/// The index sets feeding criterion 4, pinned separately so a support
/// regression is reported against the right module.
#[test]
fn index_sets_for_reference_levels() {
    assert_eq!(index_set(5), vec![1, 3, 5]);
    assert_eq!(index_set(6), vec![1, 3, 5]);
    assert_eq!(index_set(7), vec![1, 3, 5, 7]);
    println!("index sets for reference levels: PASS");
}
