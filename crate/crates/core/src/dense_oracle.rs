//! Brute-force 2^m state-vector oracle (m ≤ 14) validating the analytic
//! machinery: Kraus kernels, Fourier orthogonality, recovery maps, and the
//! fidelity bound, all on small instances.
//!
//! States are complex amplitude vectors over computational basis strings;
//! qubit j (1-based) is bit j−1 of the basis index. The damping operators
//! act matrix-free; dense matrices appear only inside recovery maps, where
//! the linear algebra is genuinely two-dimensional-array shaped.
//!
//! Toy codes exercised here deliberately violate the standard parameter
//! constraints (legacy flag): the oracle validates formulas and machinery
//! at small m, not asymptotic code quality.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::{BigUint, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code_builder::DickeVector;
use crate::damping_analytics::{dicke_pair_expectation, fourier_diagonal, KrausPair};
use crate::error::{Error, Result};
use crate::exact_poly::{binomial, BigRational};

/// Hard cap on dense simulation size (vector length 2^14 = 16384).
pub const MAX_QUBITS: usize = 14;

/// Singular values at or below this are treated as exact zeros when
/// factoring corrupted codespaces.
pub const SINGULAR_TOL: f64 = 1e-10;

/// Pairwise-orthogonality requirement on corrupted codespaces.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

fn check_m(m: usize) -> Result<()> {
    if m > MAX_QUBITS {
        Err(Error::TooLarge(m))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Dense m-qubit state: 2^m complex amplitudes.
#[derive(Debug, Clone)]
pub struct DenseState {
    m: usize,
    amp: Vec<Complex64>,
}

impl DenseState {
    pub fn from_amplitudes(m: usize, amp: Vec<Complex64>) -> Result<Self> {
        check_m(m)?;
        if amp.len() != 1 << m {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits",
                amp.len(),
                m
            )));
        }
        Ok(Self { m, amp })
    }

    pub fn zeros(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(Self {
            m,
            amp: vec![Complex64::zero(); 1 << m],
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    /// ⟨self|other⟩ with the conjugation on `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch(format!(
                "inner product between m={} and m={}",
                self.m, other.m
            )));
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            m: self.m,
            amp: self.amp.iter().map(|a| a * c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch("state subtraction".into()));
        }
        Ok(Self {
            m: self.m,
            amp: self
                .amp
                .iter()
                .zip(&other.amp)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amp)
    }

    fn from_dvector(m: usize, v: DVector<Complex64>) -> Self {
        Self {
            m,
            amp: v.iter().copied().collect(),
        }
    }
}

/// Uniform superposition over all weight-w basis strings.
pub fn dicke_dense(m: usize, w: u64) -> Result<DenseState> {
    check_m(m)?;
    assert!(w <= m as u64, "weight {w} exceeds {m} qubits");
    let count = binomial(m as u64, w)
        .to_f64()
        .expect("binomials fit in f64 for m <= 14");
    let a = Complex64::new(1.0 / count.sqrt(), 0.0);
    let mut amp = vec![Complex64::zero(); 1 << m];
    for (x, slot) in amp.iter_mut().enumerate() {
        if x.count_ones() as u64 == w {
            *slot = a;
        }
    }
    DenseState::from_amplitudes(m, amp)
}

/// Realize a weight-superposition with exact squared amplitudes as a dense
/// state: Σ_w √(s_w)·|D^m_w⟩.
pub fn dense_from_dicke(v: &DickeVector) -> Result<DenseState> {
    let m = v.m().to_usize().ok_or(Error::TooLarge(usize::MAX))?;
    check_m(m)?;
    let mut amp = vec![Complex64::zero(); 1 << m];
    for (w, s) in v.terms() {
        let count = binomial(m as u64, *w).to_f64().expect("small binomial");
        let a = Complex64::new((s.to_f64().expect("small rational") / count).sqrt(), 0.0);
        for (x, slot) in amp.iter_mut().enumerate() {
            if x.count_ones() as u64 == *w {
                *slot = a;
            }
        }
    }
    DenseState::from_amplitudes(m, amp)
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// Matrix-free (or, for recovery factors, explicitly dense) operator on an
/// m-qubit state space.
#[derive(Debug, Clone)]
pub enum DenseOperator {
    Identity,
    /// K_0 = A_0^⊗m at damping rate γ: diagonal factor (1−γ)^(weight/2).
    K0 { gamma: f64 },
    /// F_j: decay exactly on qubit j (1-based).
    F { gamma: f64, j: usize },
    /// Fourier mode K_ℓ = (1/√m)·Σ_j ω^((ℓ−1)(j−1)) F_j, ℓ 1-based.
    KFourier { gamma: f64, l: usize },
    /// Full damping Kraus A_S for the qubit subset with bitmask `mask`:
    /// A_1 on every qubit in S, A_0 elsewhere.
    DampSubset { gamma: f64, mask: u64 },
    /// Explicit dense matrix (recovery factors, completion, test gadgets).
    Matrix(DMatrix<Complex64>),
    /// Apply `second` first, then `first` (operator product first·second).
    /// Shared so composed channels over all 2^m subsets stay cheap.
    Compose(Arc<DenseOperator>, Arc<DenseOperator>),
}

impl DenseOperator {
    pub fn apply(&self, state: &DenseState) -> Result<DenseState> {
        let m = state.m;
        match self {
            DenseOperator::Identity => Ok(state.clone()),
            DenseOperator::K0 { gamma } => {
                let sq = (1.0 - gamma).sqrt();
                let amp = state
                    .amp
                    .iter()
                    .enumerate()
                    .map(|(x, a)| a * sq.powi(x.count_ones() as i32))
                    .collect();
                DenseState::from_amplitudes(m, amp)
            }
            DenseOperator::F { gamma, j } => {
                assert!((1..=m).contains(j), "qubit {j} outside 1..={m}");
                let bit = 1usize << (j - 1);
                let sq = (1.0 - gamma).sqrt();
                let root = gamma.sqrt();
                let mut amp = vec![Complex64::zero(); state.dim()];
                for (x, a) in state.amp.iter().enumerate() {
                    if x & bit != 0 {
                        let wt = x.count_ones() as i32;
                        amp[x ^ bit] = a * (root * sq.powi(wt - 1));
                    }
                }
                DenseState::from_amplitudes(m, amp)
            }
            DenseOperator::KFourier { gamma, l } => {
                assert!((1..=m).contains(l), "Fourier label {l} outside 1..={m}");
                let sq = (1.0 - gamma).sqrt();
                let root = gamma.sqrt() / (m as f64).sqrt();
                let mut amp = vec![Complex64::zero(); state.dim()];
                for (x, a) in state.amp.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let wt = x.count_ones() as i32;
                    let scale = root * sq.powi(wt - 1);
                    for p in 0..m {
                        if x & (1 << p) != 0 {
                            let angle =
                                std::f64::consts::TAU * ((l - 1) as f64) * (p as f64) / m as f64;
                            amp[x ^ (1 << p)] += a * scale * Complex64::from_polar(1.0, angle);
                        }
                    }
                }
                DenseState::from_amplitudes(m, amp)
            }
            DenseOperator::DampSubset { gamma, mask } => {
                let k = mask.count_ones() as i32;
                let sq = (1.0 - gamma).sqrt();
                let root = gamma.sqrt();
                let mask = *mask as usize;
                assert!(mask < 1 << m, "subset mask outside the register");
                let mut amp = vec![Complex64::zero(); state.dim()];
                for (x, a) in state.amp.iter().enumerate() {
                    if x & mask == mask {
                        let wt = x.count_ones() as i32;
                        amp[x ^ mask] = a * (root.powi(k) * sq.powi(wt - k));
                    }
                }
                DenseState::from_amplitudes(m, amp)
            }
            DenseOperator::Matrix(mat) => {
                if mat.ncols() != state.dim() || mat.nrows() != state.dim() {
                    return Err(Error::DimensionMismatch(format!(
                        "{}x{} matrix on dimension {}",
                        mat.nrows(),
                        mat.ncols(),
                        state.dim()
                    )));
                }
                Ok(DenseState::from_dvector(m, mat * state.to_dvector()))
            }
            DenseOperator::Compose(first, second) => first.apply(&second.apply(state)?),
        }
    }
}

/// ⟨ψ|A†B|ψ⟩ computed as ⟨Aψ, Bψ⟩.
pub fn expectation_dense(
    psi: &DenseState,
    a: &DenseOperator,
    b: &DenseOperator,
) -> Result<Complex64> {
    a.apply(psi)?.inner(&b.apply(psi)?)
}

/// The truncated correctable set Ω = {K_0, K_1, …, K_m} as dense operators.
pub fn omega_fourier_set(m: usize, gamma: f64) -> Vec<DenseOperator> {
    let mut out = vec![DenseOperator::K0 { gamma }];
    for l in 1..=m {
        out.push(DenseOperator::KFourier { gamma, l });
    }
    out
}

/// The complete amplitude-damping channel: one Kraus operator per qubit
/// subset (2^m of them).
pub fn full_damping_channel(m: usize, gamma: f64) -> Vec<DenseOperator> {
    (0..(1u64 << m))
        .map(|mask| DenseOperator::DampSubset { gamma, mask })
        .collect()
}

/// Apply random qubit permutations and return the largest ‖Pψ − ψ‖ seen.
pub fn permutation_invariance_check(psi: &DenseState, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = psi.m;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rng);
        let mut amp = vec![Complex64::zero(); psi.dim()];
        for (x, a) in psi.amp.iter().enumerate() {
            let mut y = 0usize;
            for (p, target) in perm.iter().enumerate() {
                if x & (1 << p) != 0 {
                    y |= 1 << target;
                }
            }
            amp[y] = *a;
        }
        let deviation = DenseState { m, amp }
            .sub(psi)
            .expect("same dimensions")
            .norm();
        worst = worst.max(deviation);
    }
    worst
}

// ---------------------------------------------------------------------------
// Recovery map
// ---------------------------------------------------------------------------

/// Truncated recovery channel: one Kraus factor per kept Ω operator,
/// mapping its corrupted codespace isometrically back onto the code, plus a
/// completion factor making the set trace preserving.
#[derive(Debug, Clone)]
pub struct RecoveryMap {
    /// R_A for every kept operator, same order as `kept`.
    pub kraus: Vec<DMatrix<Complex64>>,
    /// Indices into the supplied Ω of operators that survived.
    pub kept: Vec<usize>,
    /// Indices of operators dropped for annihilating the codespace.
    pub dropped: Vec<usize>,
    /// √(I − Σ R†R): completes the channel.
    pub completion: DMatrix<Complex64>,
    /// Largest |⟨w_A|w_B⟩| between corrupted-space frames of distinct kept
    /// operators (the orthogonality certificate).
    pub max_cross_overlap: f64,
    /// Largest entry of |Σ R†R + completion² − I|.
    pub completeness_residual: f64,
}

fn orthonormalize(basis: &[DenseState]) -> Result<Vec<DVector<Complex64>>> {
    let mut out: Vec<DVector<Complex64>> = Vec::with_capacity(basis.len());
    for b in basis {
        let mut v = b.to_dvector();
        for prev in &out {
            let coeff = prev.dotc(&v);
            v -= prev * coeff;
        }
        let norm = v.norm();
        if norm < SINGULAR_TOL {
            return Err(Error::RankDeficient(
                "code basis is linearly dependent".into(),
            ));
        }
        v /= Complex64::new(norm, 0.0);
        out.push(v);
    }
    Ok(out)
}

/// Build the truncated recovery for a code and a Kraus set Ω.
///
/// For each A, the polar factor of A·Π restricted to the code support is
/// taken via the eigendecomposition of the K×K Gram matrix (AC)†(AC);
/// directions with singular value ≤ [`SINGULAR_TOL`] are treated as exact
/// zeros. Operators annihilating the code entirely are dropped (recorded,
/// not fatal). Pairwise orthogonality of the corrupted spaces is certified
/// first and the construction refuses when it fails.
pub fn recovery_map(
    code_basis: &[DenseState],
    omega: &[DenseOperator],
) -> Result<RecoveryMap> {
    assert!(!code_basis.is_empty(), "need at least one code vector");
    let m = code_basis[0].m;
    let dim = 1usize << m;
    let ortho = orthonormalize(code_basis)?;
    let k = ortho.len();
    let code = DMatrix::from_columns(&ortho);

    // Corrupted frames W_A with orthonormal columns spanning A·code.
    let mut frames: Vec<(usize, DMatrix<Complex64>, DMatrix<Complex64>)> = Vec::new();
    let mut dropped = Vec::new();
    for (index, op) in omega.iter().enumerate() {
        let mut cols = Vec::with_capacity(k);
        for v in &ortho {
            let image = op.apply(&DenseState::from_dvector(m, v.clone()))?;
            cols.push(image.to_dvector());
        }
        let ac = DMatrix::from_columns(&cols);
        let gram = ac.adjoint() * &ac;
        let eig = gram.symmetric_eigen();
        let keep: Vec<usize> = (0..k)
            .filter(|&i| eig.eigenvalues[i].max(0.0).sqrt() > SINGULAR_TOL)
            .collect();
        if keep.is_empty() {
            dropped.push(index);
            continue;
        }
        // V_kept (k×r) and W = AC·V_kept·diag(1/σ) (dim×r, orthonormal
        // columns spanning the corrupted space).
        let r = keep.len();
        let mut v_kept = DMatrix::zeros(k, r);
        let mut inv_sigma = DMatrix::zeros(r, r);
        for (col, &i) in keep.iter().enumerate() {
            v_kept.set_column(col, &eig.eigenvectors.column(i));
            inv_sigma[(col, col)] =
                Complex64::new(1.0 / eig.eigenvalues[i].max(0.0).sqrt(), 0.0);
        }
        let w = &ac * &v_kept * &inv_sigma;
        frames.push((index, v_kept, w));
    }
    if frames.is_empty() {
        return Err(Error::RankDeficient(
            "every operator annihilates the codespace".into(),
        ));
    }

    // Orthogonality certificate across distinct operators.
    let mut max_cross_overlap = 0.0f64;
    for i in 0..frames.len() {
        for j in i + 1..frames.len() {
            let cross = frames[i].2.adjoint() * &frames[j].2;
            let worst = cross.iter().map(|c| c.norm()).fold(0.0, f64::max);
            max_cross_overlap = max_cross_overlap.max(worst);
        }
    }
    if max_cross_overlap > ORTHOGONALITY_TOL {
        return Err(Error::NotCorrectable(format!(
            "corrupted codespaces overlap: max |<w_A|w_B>| = {max_cross_overlap:.3e}"
        )));
    }

    // R_A = C · V_kept · W† and the accumulated range projector Q = Σ W W†.
    let mut kraus = Vec::with_capacity(frames.len());
    let mut kept = Vec::with_capacity(frames.len());
    let mut q = DMatrix::<Complex64>::zeros(dim, dim);
    for (index, v_kept, w) in &frames {
        kraus.push(&code * v_kept * w.adjoint());
        kept.push(*index);
        q += w * w.adjoint();
    }

    // Completion √(I − Q): once the frames pass the orthogonality
    // certificate, Q is an orthogonal projector, so the root is I − Q
    // itself. The completeness residual below then reports the actual
    // projector defect instead of factorization noise.
    let completion = DMatrix::<Complex64>::identity(dim, dim) - &q;

    // Channel completeness: Σ R†R + completion† completion = I.
    let mut total = completion.adjoint() * &completion;
    for r in &kraus {
        total += r.adjoint() * r;
    }
    let completeness_residual = (total - DMatrix::identity(dim, dim))
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);

    Ok(RecoveryMap {
        kraus,
        kept,
        dropped,
        completion,
        max_cross_overlap,
        completeness_residual,
    })
}

/// All Kraus operators of recovery ∘ damping: each recovery factor
/// (completion included unless excluded) composed with each damping subset
/// operator.
pub fn compose_recovery_with_damping(
    recovery: &RecoveryMap,
    m: usize,
    gamma: f64,
    include_completion: bool,
) -> Vec<DenseOperator> {
    let mut recovery_ops: Vec<Arc<DenseOperator>> = recovery
        .kraus
        .iter()
        .map(|r| Arc::new(DenseOperator::Matrix(r.clone())))
        .collect();
    if include_completion {
        recovery_ops.push(Arc::new(DenseOperator::Matrix(recovery.completion.clone())));
    }
    let mut out = Vec::with_capacity(recovery_ops.len() << m);
    for damp in full_damping_channel(m, gamma) {
        let damp = Arc::new(damp);
        for r in &recovery_ops {
            out.push(DenseOperator::Compose(Arc::clone(r), Arc::clone(&damp)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Entanglement fidelity
// ---------------------------------------------------------------------------

/// Density operator on the codespace, held as an explicit mixture
/// Σ p_i |ψ_i⟩⟨ψ_i| of normalized pure states.
#[derive(Debug, Clone)]
pub struct CodeDensity {
    pub mixture: Vec<(f64, DenseState)>,
}

impl CodeDensity {
    pub fn pure(state: DenseState) -> Self {
        Self {
            mixture: vec![(1.0, state)],
        }
    }

    fn validate(&self) -> Result<()> {
        let mut trace = 0.0;
        for (p, psi) in &self.mixture {
            if *p < -1e-10 {
                return Err(Error::BadDensity(format!("negative weight {p}")));
            }
            let norm = psi.norm();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::BadDensity(format!(
                    "mixture component has norm {norm}"
                )));
            }
            trace += p;
        }
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::BadDensity(format!("trace {trace} != 1")));
        }
        Ok(())
    }
}

/// F_e(ρ, channel) = Σ_k |tr(ρ·E_k)|², with tr(ρE) = Σ_i p_i ⟨ψ_i|E|ψ_i⟩.
pub fn entanglement_fidelity(rho: &CodeDensity, channel: &[DenseOperator]) -> Result<f64> {
    rho.validate()?;
    let mut total = 0.0;
    for op in channel {
        let mut tr = Complex64::zero();
        for (p, psi) in &rho.mixture {
            tr += psi.inner(&op.apply(psi)?)? * Complex64::new(*p, 0.0);
        }
        total += tr.norm_sqr();
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Oracle suite
// ---------------------------------------------------------------------------

/// One oracle check: a computed value against its reference at a stated
/// tolerance.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub tol: f64,
}

impl CheckLine {
    pub fn delta(&self) -> f64 {
        (self.computed - self.reference).abs()
    }

    pub fn pass(&self) -> bool {
        self.delta() <= self.tol
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("report values fit in f64")
}

/// Exact kernel evaluated at the dyadic rational of γ, as f64.
fn kernel_at(w: u64, m: usize, pair: KrausPair, gamma: f64) -> f64 {
    let m_big = BigUint::from(m);
    let poly = dicke_pair_expectation(w, &m_big, pair);
    rational_to_f64(&poly.eval_f64(gamma))
}

/// A reproducible permutation-invariant test state: a random Dicke mixture
/// with exact rational squared amplitudes, returned in both exact and
/// dense form.
pub fn random_invariant_state(m: usize, seed: u64) -> Result<(DickeVector, DenseState)> {
    check_m(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<u64> = (0..=m as u64).collect();
    weights.shuffle(&mut rng);
    let support = weights.into_iter().take((m / 2).max(2)).collect::<Vec<_>>();
    let raw: Vec<u64> = support.iter().map(|_| rng.gen_range(1..100u64)).collect();
    let total: u64 = raw.iter().sum();
    let terms = support
        .iter()
        .zip(&raw)
        .map(|(&w, &r)| {
            (
                w,
                BigRational::new(num::BigInt::from(r), num::BigInt::from(total)),
            )
        })
        .collect();
    let exact = DickeVector::new(BigUint::from(m), terms)?;
    let dense = dense_from_dicke(&exact)?;
    Ok((exact, dense))
}

/// The standard oracle suite at one (m, γ, seed) configuration.
pub fn oracle_suite(m: usize, gamma: f64, seed: u64) -> Result<Vec<CheckLine>> {
    check_m(m)?;
    assert!((0.0..=1.0).contains(&gamma), "γ outside [0, 1]");
    let mut lines = Vec::new();

    // Kernel equivalence on every Dicke state.
    for w in 0..=m as u64 {
        let psi = dicke_dense(m, w)?;
        let k0 = DenseOperator::K0 { gamma };
        let f1 = DenseOperator::F { gamma, j: 1 };
        let fm = DenseOperator::F { gamma, j: m };
        for (pair, a, b) in [
            (KrausPair::K0K0, &k0, &k0),
            (KrausPair::F1F1, &f1, &f1),
            (KrausPair::F1Fm, &f1, &fm),
        ] {
            let dense = expectation_dense(&psi, a, b)?;
            lines.push(CheckLine {
                name: format!("kernel_{pair:?}_w{w}"),
                computed: dense.re,
                reference: kernel_at(w, m, pair, gamma),
                tol: 1e-12,
            });
            lines.push(CheckLine {
                name: format!("kernel_{pair:?}_w{w}_imag"),
                computed: dense.im,
                reference: 0.0,
                tol: 1e-12,
            });
        }
    }

    // ⟨D_w|F_j†F_j|D_w⟩ independent of j (take the middle weight).
    let mid = dicke_dense(m, (m / 2) as u64)?;
    let f1 = DenseOperator::F { gamma, j: 1 };
    let base = expectation_dense(&mid, &f1, &f1)?.re;
    let mut worst = 0.0f64;
    for j in 2..=m {
        let fj = DenseOperator::F { gamma, j };
        worst = worst.max((expectation_dense(&mid, &fj, &fj)?.re - base).abs());
    }
    lines.push(CheckLine {
        name: "fjfj_j_independence".into(),
        computed: worst,
        reference: 0.0,
        tol: 1e-12,
    });

    // Fourier orthogonality and diagonal closed form on a random
    // permutation-invariant state.
    let (exact, dense) = random_invariant_state(m, seed)?;
    let mut worst_offdiag = 0.0f64;
    let mut worst_diag = 0.0f64;
    for l in 1..=m {
        let kl = DenseOperator::KFourier { gamma, l };
        for l2 in l..=m {
            let kl2 = DenseOperator::KFourier { gamma, l: l2 };
            let value = expectation_dense(&dense, &kl, &kl2)?;
            if l == l2 {
                let closed = rational_to_f64(&fourier_diagonal(&exact, l == 1).eval_f64(gamma));
                worst_diag = worst_diag.max((value.re - closed).abs().max(value.im.abs()));
            } else {
                worst_offdiag = worst_offdiag.max(value.norm());
            }
        }
    }
    lines.push(CheckLine {
        name: "fourier_offdiagonal".into(),
        computed: worst_offdiag,
        reference: 0.0,
        tol: 1e-10,
    });
    lines.push(CheckLine {
        name: "fourier_diagonal_closed_form".into(),
        computed: worst_diag,
        reference: 0.0,
        tol: 1e-10,
    });

    // The Fourier rotation preserves the decay flux: Σ_ℓ ‖K_ℓψ‖² = Σ_j ‖F_jψ‖².
    let mut fourier_sum = 0.0;
    let mut site_sum = 0.0;
    for l in 1..=m {
        fourier_sum += DenseOperator::KFourier { gamma, l }.apply(&dense)?.norm().powi(2);
    }
    for j in 1..=m {
        site_sum += DenseOperator::F { gamma, j }.apply(&dense)?.norm().powi(2);
    }
    lines.push(CheckLine {
        name: "fourier_rotation_flux".into(),
        computed: fourier_sum,
        reference: site_sum,
        tol: 1e-10,
    });

    // Full damping channel resolves the identity.
    let mut mass = 0.0;
    for op in full_damping_channel(m, gamma) {
        mass += op.apply(&dense)?.norm().powi(2);
    }
    lines.push(CheckLine {
        name: "damping_completeness".into(),
        computed: mass,
        reference: 1.0,
        tol: 1e-10,
    });

    // Dicke states are permutation invariant.
    lines.push(CheckLine {
        name: "permutation_invariance".into(),
        computed: permutation_invariance_check(&dense, 20, seed ^ 0x5eed),
        reference: 0.0,
        tol: 1e-12,
    });

    // K_0†K_ℓ vanishes when supported weights are spaced ≥ 2 apart.
    let spaced = DickeVector::new(
        BigUint::from(m),
        vec![
            (0, BigRational::new(1.into(), 2.into())),
            (2, BigRational::new(1.into(), 2.into())),
        ],
    )?;
    let spaced_dense = dense_from_dicke(&spaced)?;
    let k0 = DenseOperator::K0 { gamma };
    let mut worst_cross = 0.0f64;
    for l in 1..=m {
        let kl = DenseOperator::KFourier { gamma, l };
        worst_cross = worst_cross.max(expectation_dense(&spaced_dense, &k0, &kl)?.norm());
    }
    lines.push(CheckLine {
        name: "k0_fourier_cross_term".into(),
        computed: worst_cross,
        reference: 0.0,
        tol: 1e-12,
    });

    Ok(lines)
}

/// Render check lines as the oracle report: one line per check with
/// computed, reference, delta, tolerance, and verdict.
pub fn render_report(lines: &[CheckLine]) -> String {
    let mut out = String::from("check computed reference delta tol verdict\n");
    for line in lines {
        out.push_str(&format!(
            "{} {:.15e} {:.15e} {:.3e} {:.1e} {}\n",
            line.name,
            line.computed,
            line.reference,
            line.delta(),
            line.tol,
            if line.pass() { "PASS" } else { "FAIL" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_builder::{logical_state, validate_legacy};
    use crate::damping_analytics::state_expectation;
    use crate::exact_poly::parse_rational;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dicke_states() {
        let d31 = dicke_dense(3, 1).unwrap();
        let expect = 1.0 / 3f64.sqrt();
        for (x, a) in d31.amplitudes().iter().enumerate() {
            if [1, 2, 4].contains(&x) {
                assert!((a.re - expect).abs() < 1e-15);
            } else {
                assert!(a.is_zero());
            }
        }
        let vac = dicke_dense(4, 0).unwrap();
        assert_eq!(vac.amplitudes()[0], c(1.0, 0.0));
        let full = dicke_dense(5, 5).unwrap();
        assert_eq!(full.amplitudes()[31], c(1.0, 0.0));
        assert!((dicke_dense(6, 3).unwrap().norm() - 1.0).abs() < 1e-14);
        assert!(matches!(dicke_dense(15, 1).unwrap_err(), Error::TooLarge(15)));
    }

    #[test]
    fn k0_at_zero_damping_is_identity() {
        let (_, psi) = random_invariant_state(5, 7).unwrap();
        let out = DenseOperator::K0 { gamma: 0.0 }.apply(&psi).unwrap();
        assert!(out.sub(&psi).unwrap().norm() < 1e-15);
    }

    #[test]
    fn f1_on_single_excitation() {
        // |10⟩: qubit 1 excited → basis index 1.
        let mut amp = vec![Complex64::zero(); 4];
        amp[1] = c(1.0, 0.0);
        let psi = DenseState::from_amplitudes(2, amp).unwrap();
        let out = DenseOperator::F { gamma: 0.36, j: 1 }.apply(&psi).unwrap();
        assert!((out.amplitudes()[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!(out.amplitudes()[1..].iter().all(|a| a.is_zero()));
    }

    #[test]
    fn operators_are_linear() {
        let (_, a) = random_invariant_state(6, 1).unwrap();
        let (_, b) = random_invariant_state(6, 2).unwrap();
        let alpha = c(0.3, -0.4);
        for op in [
            DenseOperator::K0 { gamma: 0.2 },
            DenseOperator::F { gamma: 0.2, j: 3 },
            DenseOperator::KFourier { gamma: 0.2, l: 2 },
            DenseOperator::DampSubset {
                gamma: 0.2,
                mask: 0b101,
            },
        ] {
            let lhs = op
                .apply(&DenseState {
                    m: 6,
                    amp: a
                        .amplitudes()
                        .iter()
                        .zip(b.amplitudes())
                        .map(|(x, y)| x * alpha + y)
                        .collect(),
                })
                .unwrap();
            let rhs_a = op.apply(&a).unwrap().scaled(alpha);
            let rhs_b = op.apply(&b).unwrap();
            let diff = lhs
                .sub(&DenseState {
                    m: 6,
                    amp: rhs_a
                        .amplitudes()
                        .iter()
                        .zip(rhs_b.amplitudes())
                        .map(|(x, y)| x + y)
                        .collect(),
                })
                .unwrap();
            assert!(diff.norm() < 1e-13);
        }
    }

    #[test]
    fn kernel_spot_values() {
        // ⟨D³₁|F_1†F_1|D³₁⟩ at γ = 0.1 is 1/30.
        let psi = dicke_dense(3, 1).unwrap();
        let f1 = DenseOperator::F { gamma: 0.1, j: 1 };
        let v = expectation_dense(&psi, &f1, &f1).unwrap();
        assert!((v.re - 1.0 / 30.0).abs() < 1e-12 && v.im.abs() < 1e-15);

        // ⟨D⁴₂|F_1†F_4|D⁴₂⟩ at γ = 0.2 is γ(1−γ)·w(m−w)/(m(m−1)) = 4/75.
        let psi = dicke_dense(4, 2).unwrap();
        let f1 = DenseOperator::F { gamma: 0.2, j: 1 };
        let f4 = DenseOperator::F { gamma: 0.2, j: 4 };
        let v = expectation_dense(&psi, &f1, &f4).unwrap();
        assert!((v.re - 4.0 / 75.0).abs() < 1e-12 && v.im.abs() < 1e-15);
    }

    #[test]
    fn oracle_suite_passes() {
        for (m, gamma) in [(4usize, 0.1f64), (6, 0.37)] {
            let lines = oracle_suite(m, gamma, 42).unwrap();
            for line in &lines {
                assert!(
                    line.pass(),
                    "{} computed {} reference {} delta {}",
                    line.name,
                    line.computed,
                    line.reference,
                    line.delta()
                );
            }
            let report = render_report(&lines);
            assert!(report.contains("PASS"));
            assert!(!report.contains("FAIL"));
        }
    }

    #[test]
    fn permutation_asymmetry_detected() {
        // |01⟩ (qubit 2 excited): the swap moves it entirely.
        let mut amp = vec![Complex64::zero(); 4];
        amp[2] = c(1.0, 0.0);
        let psi = DenseState::from_amplitudes(2, amp).unwrap();
        let dev = permutation_invariance_check(&psi, 50, 3);
        assert!((dev - 2f64.sqrt()).abs() < 1e-12);
    }

    fn toy_code() -> Vec<DenseState> {
        let p = validate_legacy(&[2, 3], &[8, 2], &BigUint::from(8u32)).unwrap();
        (1..=2)
            .map(|d| dense_from_dicke(&logical_state(&p, d).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn recovery_identity_omega_acts_as_projector() {
        let basis = toy_code();
        let recovery = recovery_map(&basis, &[DenseOperator::Identity]).unwrap();
        assert_eq!(recovery.kept, vec![0]);
        assert!(
            recovery.completeness_residual < 1e-10,
            "residual {} cross {}",
            recovery.completeness_residual,
            recovery.max_cross_overlap
        );
        // On a code state the single recovery factor acts as the identity.
        let psi = &basis[0];
        let out = DenseOperator::Matrix(recovery.kraus[0].clone())
            .apply(psi)
            .unwrap();
        assert!(out.sub(psi).unwrap().norm() < 1e-10);
        let fe = entanglement_fidelity(
            &CodeDensity::pure(psi.clone()),
            &[DenseOperator::Matrix(recovery.kraus[0].clone())],
        )
        .unwrap();
        assert!((fe - 1.0).abs() < 1e-10);
    }

    #[test]
    fn recovery_refuses_overlapping_images() {
        let basis = toy_code();
        let op = DenseOperator::K0 { gamma: 0.05 };
        assert!(matches!(
            recovery_map(&basis, &[op.clone(), op]).unwrap_err(),
            Error::NotCorrectable(_)
        ));
    }

    #[test]
    fn recovery_channel_is_complete_on_toy_code() {
        let basis = toy_code();
        let gamma = 0.05;
        let recovery = recovery_map(&basis, &omega_fourier_set(8, gamma)).unwrap();
        assert!(recovery.dropped.is_empty());
        assert!(recovery.max_cross_overlap < 1e-10);
        assert!(
            recovery.completeness_residual < 1e-10,
            "residual {}",
            recovery.completeness_residual
        );
    }

    #[test]
    fn recovery_bound_holds_on_toy_code() {
        let p = validate_legacy(&[2, 3], &[8, 2], &BigUint::from(8u32)).unwrap();
        let basis = toy_code();
        let gamma = 0.05;
        let m = 8usize;

        // Dense side: F_e of recovery ∘ full damping on the mixed code state.
        let recovery = recovery_map(&basis, &omega_fourier_set(m, gamma)).unwrap();
        let channel = compose_recovery_with_damping(&recovery, m, gamma, true);
        let rho = CodeDensity {
            mixture: basis.iter().map(|b| (0.5, b.clone())).collect(),
        };
        let fe = entanglement_fidelity(&rho, &channel).unwrap();

        // Analytic side: Σ_A λ_A from the exact polynomials.
        let g = parse_rational("1/20").unwrap();
        let states: Vec<_> = (1..=2).map(|d| logical_state(&p, d).unwrap()).collect();
        let lambda_k0 = states
            .iter()
            .map(|s| state_expectation(s, KrausPair::K0K0).eval(&g))
            .min()
            .unwrap();
        let lambda_k1 = states
            .iter()
            .map(|s| fourier_diagonal(s, true).eval(&g))
            .min()
            .unwrap();
        let lambda_kl = states
            .iter()
            .map(|s| fourier_diagonal(s, false).eval(&g))
            .min()
            .unwrap();
        let m_rat = BigRational::from(num::BigInt::from(m));
        let bound = lambda_k0
            + lambda_k1
            + lambda_kl * (m_rat - BigRational::from(num::BigInt::from(1)));
        let bound = bound.to_f64().unwrap();

        assert!(
            fe >= bound - 1e-9,
            "entanglement fidelity {fe} below analytic bound {bound}"
        );
    }

    #[test]
    fn density_validation() {
        let psi = dicke_dense(3, 1).unwrap();
        let bad = CodeDensity {
            mixture: vec![(0.7, psi.clone())],
        };
        assert!(matches!(
            entanglement_fidelity(&bad, &[DenseOperator::Identity]).unwrap_err(),
            Error::BadDensity(_)
        ));
        let bad = CodeDensity {
            mixture: vec![(1.0, psi.scaled(c(0.5, 0.0)))],
        };
        assert!(matches!(
            entanglement_fidelity(&bad, &[DenseOperator::Identity]).unwrap_err(),
            Error::BadDensity(_)
        ));
    }

    #[test]
    fn depolarizing_fidelity() {
        // Fully depolarizing single-qubit channel: Kraus {I, X, Y, Z}/2 on
        // the maximally mixed state gives F_e = 1/4.
        let half = c(0.5, 0.0);
        let i2 = DMatrix::from_row_slice(2, 2, &[half, c(0.0, 0.0), c(0.0, 0.0), half]);
        let x = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), half, half, c(0.0, 0.0)]);
        let y = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)],
        );
        let z = DMatrix::from_row_slice(2, 2, &[half, c(0.0, 0.0), c(0.0, 0.0), -half]);
        let channel: Vec<DenseOperator> = [i2, x, y, z].into_iter().map(DenseOperator::Matrix).collect();
        let zero = DenseState::from_amplitudes(1, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let one = DenseState::from_amplitudes(1, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rho = CodeDensity {
            mixture: vec![(0.5, zero), (0.5, one)],
        };
        let fe = entanglement_fidelity(&rho, &channel).unwrap();
        assert!((fe - 0.25).abs() < 1e-12);
    }
}
