//! Closed-form expectations of amplitude-damping Kraus pairs on
//! permutation-invariant states, and their Fourier diagonalization.
//!
//! Every quantity here is a polynomial in the damping rate γ with exact
//! rational coefficients. The primitives are per-weight kernels — the three
//! matrix elements on a single Dicke state |D^m_w⟩:
//!
//! ```text
//! ⟨D_w| K_0†K_0 |D_w⟩ = (1−γ)^w
//! ⟨D_w| F_1†F_1 |D_w⟩ = γ(1−γ)^(w−1) · w/m
//! ⟨D_w| F_1†F_m |D_w⟩ = γ(1−γ)^(w−1) · w(m−w)/(m(m−1))
//! ```
//!
//! All three operators preserve Dicke weight, so expectations extend
//! linearly over the squared amplitudes of a [`DickeVector`]. The Fourier
//! recombination K_ℓ = (1/√m)·Σ_j ω^((ℓ−1)(j−1)) F_j then diagonalizes
//! exactly: ⟨K_ℓ†K_ℓ'⟩ = δ_ℓℓ' · (⟨F_1†F_1⟩ + (mδ_ℓ1 − 1)⟨F_1†F_m⟩),
//! because the permutation group acts 2-transitively on qubit positions,
//! making ⟨F_i†F_j⟩ depend only on whether i = j.

use num::{BigInt, BigUint, One, Zero};
use serde::{Deserialize, Serialize};

use crate::code_builder::{index_set, logical_state, CodeParameters, DickeVector};
use crate::error::{Error, Result};
use crate::exact_poly::{one_minus_gamma_pow, rational_string, BigRational, GammaPolynomial};
use crate::number_theory::diophantine_solvable;

fn big_rat(u: &BigUint) -> BigRational {
    BigRational::from(BigInt::from(u.clone()))
}

/// The three primitive Kraus pairs with closed-form Dicke kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrausPair {
    /// K_0†K_0 where K_0 = A_0^⊗m (no decay anywhere).
    K0K0,
    /// F_1†F_1 (decay on one fixed qubit, twice the same).
    F1F1,
    /// F_1†F_m (decay on two different fixed qubits).
    F1Fm,
}

/// Per-weight kernel: the matrix element of the pair on |D^m_w⟩.
pub fn dicke_pair_expectation(w: u64, m: &BigUint, pair: KrausPair) -> GammaPolynomial {
    assert!(
        BigUint::from(w) <= *m,
        "weight {w} exceeds qubit count {m}"
    );
    match pair {
        KrausPair::K0K0 => one_minus_gamma_pow(w),
        KrausPair::F1F1 => {
            if w == 0 {
                return GammaPolynomial::zero();
            }
            let factor = BigRational::from(BigInt::from(w)) / big_rat(m);
            one_minus_gamma_pow(w - 1).mul_gamma().scale(&factor)
        }
        KrausPair::F1Fm => {
            if w == 0 {
                return GammaPolynomial::zero();
            }
            // On a single qubit the last site is the first site, so the
            // cross pair degenerates to F_1†F_1.
            if *m == BigUint::from(1u32) {
                return dicke_pair_expectation(w, m, KrausPair::F1F1);
            }
            let m_rat = big_rat(m);
            let w_rat = BigRational::from(BigInt::from(w));
            let factor = &w_rat * (&m_rat - &w_rat)
                / (&m_rat * (&m_rat - BigRational::one()));
            one_minus_gamma_pow(w - 1).mul_gamma().scale(&factor)
        }
    }
}

/// Expectation of a primitive pair in an arbitrary weight-superposition:
/// Σ_w s_w · kernel(w) over the squared amplitudes s_w.
pub fn state_expectation(state: &DickeVector, pair: KrausPair) -> GammaPolynomial {
    let mut total = GammaPolynomial::zero();
    for (w, s) in state.terms() {
        total = total.add(&dicke_pair_expectation(*w, state.m(), pair).scale(s));
    }
    total
}

/// ⟨d_L| K_0†K_0 |d_L⟩ = Σ_t (C(n_d,t)/2^(n_d−1)) (1−γ)^(g_d t), exact.
pub fn k0_expectation(params: &CodeParameters, d: usize) -> Result<GammaPolynomial> {
    Ok(state_expectation(&logical_state(params, d)?, KrausPair::K0K0))
}

/// ⟨d_L| F_1†F_1 |d_L⟩, exact.
pub fn f1f1_expectation(params: &CodeParameters, d: usize) -> Result<GammaPolynomial> {
    Ok(state_expectation(&logical_state(params, d)?, KrausPair::F1F1))
}

/// ⟨d_L| F_1†F_m |d_L⟩, exact.
pub fn f1fm_expectation(params: &CodeParameters, d: usize) -> Result<GammaPolynomial> {
    Ok(state_expectation(&logical_state(params, d)?, KrausPair::F1Fm))
}

/// ⟨d_L| K_ℓ†K_ℓ' |d_L⟩ for Fourier labels 1 ≤ ℓ, ℓ' ≤ m: the zero
/// polynomial off the diagonal, and on the diagonal
/// ⟨F_1†F_1⟩ + (mδ_ℓ1 − 1)·⟨F_1†F_m⟩.
pub fn fourier_expectation(
    params: &CodeParameters,
    d: usize,
    l: u64,
    l2: u64,
) -> Result<GammaPolynomial> {
    assert!(l >= 1 && l2 >= 1, "Fourier labels start at 1");
    assert!(
        BigUint::from(l) <= *params.m() && BigUint::from(l2) <= *params.m(),
        "Fourier labels end at m"
    );
    if l != l2 {
        return Ok(GammaPolynomial::zero());
    }
    let state = logical_state(params, d)?;
    Ok(fourier_diagonal(&state, l == 1))
}

/// Diagonal Fourier value on an arbitrary permutation-invariant state:
/// the ℓ = 1 mode when `first` is set, any ℓ ≥ 2 mode otherwise.
pub fn fourier_diagonal(state: &DickeVector, first: bool) -> GammaPolynomial {
    let f1f1 = state_expectation(state, KrausPair::F1F1);
    let f1fm = state_expectation(state, KrausPair::F1Fm);
    if first {
        let m_minus_1 = big_rat(state.m()) - BigRational::one();
        f1f1.add(&f1fm.scale(&m_minus_1))
    } else {
        f1f1.sub(&f1fm)
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Per-logical-state record of the three inner products and the two
/// distinct Fourier diagonal values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DampingReport {
    pub d: usize,
    pub k0k0: GammaPolynomial,
    pub f1f1: GammaPolynomial,
    pub f1fm: GammaPolynomial,
    pub fourier_diag_l1: GammaPolynomial,
    pub fourier_diag_lgt1: GammaPolynomial,
}

/// Assemble the full report for one logical state, re-checking the exact
/// invariants: values at γ = 0 and the two Fourier identities.
pub fn damping_report(params: &CodeParameters, d: usize) -> Result<DampingReport> {
    let state = logical_state(params, d)?;
    let k0k0 = state_expectation(&state, KrausPair::K0K0);
    let f1f1 = state_expectation(&state, KrausPair::F1F1);
    let f1fm = state_expectation(&state, KrausPair::F1Fm);
    let fourier_diag_l1 = fourier_diagonal(&state, true);
    let fourier_diag_lgt1 = fourier_diagonal(&state, false);

    assert!(k0k0.coefficient(0).is_one(), "K_0†K_0 must be 1 at γ=0");
    assert!(f1f1.coefficient(0).is_zero(), "F_1†F_1 must vanish at γ=0");
    assert!(f1fm.coefficient(0).is_zero(), "F_1†F_m must vanish at γ=0");
    let m_minus_1 = big_rat(params.m()) - BigRational::one();
    assert_eq!(
        fourier_diag_l1,
        f1f1.add(&f1fm.scale(&m_minus_1)),
        "ℓ=1 diagonal identity"
    );
    assert_eq!(fourier_diag_lgt1, f1f1.sub(&f1fm), "ℓ≥2 diagonal identity");

    Ok(DampingReport {
        d,
        k0k0,
        f1f1,
        f1fm,
        fourier_diag_l1,
        fourier_diag_lgt1,
    })
}

/// JSON document form of a report: polynomials as lists of exact fraction
/// strings, ascending powers of γ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DampingReportDoc {
    pub d: usize,
    pub k0k0: Vec<String>,
    pub f1f1: Vec<String>,
    pub f1fm: Vec<String>,
    pub fourier_diag_l1: Vec<String>,
    pub fourier_diag_lgt1: Vec<String>,
}

impl From<&DampingReport> for DampingReportDoc {
    fn from(r: &DampingReport) -> Self {
        Self {
            d: r.d,
            k0k0: r.k0k0.coefficient_strings(),
            f1f1: r.f1f1.coefficient_strings(),
            f1fm: r.f1fm.coefficient_strings(),
            fourier_diag_l1: r.fourier_diag_l1.coefficient_strings(),
            fourier_diag_lgt1: r.fourier_diag_lgt1.coefficient_strings(),
        }
    }
}

/// Reports for every logical state as one JSON array.
pub fn damping_report_json(params: &CodeParameters) -> Result<String> {
    let docs: Vec<DampingReportDoc> = (1..=params.num_levels())
        .map(|d| damping_report(params, d).map(|r| DampingReportDoc::from(&r)))
        .collect::<Result<_>>()?;
    let mut text = serde_json::to_string_pretty(&docs)
        .map_err(|e| Error::BadDescriptor(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------------------
// Cross terms between logical states
// ---------------------------------------------------------------------------

/// Outcome of the weight-shift collision analysis for one pair of logical
/// states and one weight shift s ∈ {−1, 0, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossTermVerdict {
    /// No supported weights satisfy w = w' + s, so the matrix element is
    /// identically zero. `diophantine_obstruction` records whether already
    /// gcd(g_d, g_d') ∤ s rules out solutions over all integers.
    Vanishes { diophantine_obstruction: bool },
    /// Supported weights collide; the witness gives the occupation numbers
    /// and the common weight (only s = 0 can collide for valid parameters,
    /// and only at weight N).
    Collides { t: u64, t2: u64, weight: u64 },
}

impl CrossTermVerdict {
    pub fn vanishes(&self) -> bool {
        matches!(self, CrossTermVerdict::Vanishes { .. })
    }
}

/// Decide whether ⟨d_L| A†B |d2_L⟩ vanishes identically for an operator
/// pair shifting Dicke weight by `shift` (0 for K_0†K_0 and F_i†F_j, ±1
/// for K_0†F_j and F_j†K_0). The Diophantine criterion gives the fast
/// obstruction; the index sets are searched exhaustively either way and the
/// two must agree.
pub fn cross_term_vanishes(
    params: &CodeParameters,
    d: usize,
    d2: usize,
    shift: i64,
) -> CrossTermVerdict {
    assert!(d != d2, "use the diagonal expectations for d = d2");
    assert!(shift.abs() <= 1, "Kraus pairs here shift weight by at most 1");
    let g_d = params.g()[d - 1];
    let g_d2 = params.g()[d2 - 1];
    let solvable = diophantine_solvable(g_d, g_d2, shift);
    let mut witness = None;
    for t in index_set(params.n()[d - 1]) {
        for t2 in index_set(params.n()[d2 - 1]) {
            let w = g_d as i128 * t as i128;
            let w2 = g_d2 as i128 * t2 as i128;
            if w == w2 + shift as i128 && witness.is_none() {
                witness = Some((t, t2, w as u64));
            }
        }
    }
    match witness {
        Some((t, t2, weight)) => {
            assert!(solvable, "collision found despite Diophantine obstruction");
            CrossTermVerdict::Collides { t, t2, weight }
        }
        None => CrossTermVerdict::Vanishes {
            diophantine_obstruction: !solvable,
        },
    }
}

/// Exact weight-preserving matrix element ⟨d_L| · |d2_L⟩ of a primitive
/// pair between two different logical states: Σ over common weights of
/// √(s_w s'_w)·kernel(w). Non-zero only when the supports intersect (at
/// weight N for valid parameters); reported exactly rather than assumed
/// zero.
pub fn cross_state_expectation(
    params: &CodeParameters,
    d: usize,
    d2: usize,
    pair: KrausPair,
) -> Result<GammaPolynomial> {
    let a = logical_state(params, d)?;
    let b = logical_state(params, d2)?;
    let mut total = GammaPolynomial::zero();
    for (w, s) in a.terms() {
        let s2 = b.squared_amplitude(*w);
        if s2.is_zero() {
            continue;
        }
        let product = s * &s2;
        let root = crate::code_builder::sqrt_exact(&product).ok_or_else(|| {
            Error::CollisionFound(format!(
                "cross element at weight {w} is irrational: sqrt({})",
                rational_string(&product)
            ))
        })?;
        total = total.add(&dicke_pair_expectation(*w, a.m(), pair).scale(&root));
    }
    Ok(total)
}
