//! Worst-case deformations λ_A, the entanglement-fidelity lower bound over
//! a γ-grid, and the Taylor-coefficient comparison with the closed-form
//! constants.
//!
//! The correctable set is Ω = {K_0, K_1, …, K_m}. On permutation-invariant
//! states the m−1 modes K_ℓ with ℓ ≥ 2 share a single expectation
//! polynomial, so the bound collapses to three λ values:
//!
//! ```text
//! bound(γ) = λ_K0(γ) + λ_K1(γ) + (m−1)·λ_Kℓ≥2(γ),   λ_A = min_d ⟨d_L|A†A|d_L⟩
//! ```
//!
//! Each λ_A is a pointwise minimum of exact polynomials — a piecewise
//! quantity, not a polynomial — so every row records which d attained it.
//! Taylor work instead selects d lexicographically on coefficient
//! sequences (the γ → 0⁺ minimizer) and reports exact deltas against the
//! reference constants; deltas are reported, never patched over.

use num::{BigInt, BigUint, One, Signed, Zero};

use crate::code_builder::{gram_matrix, CodeParameters};
use crate::code_builder::logical_state;
use crate::damping_analytics::{fourier_diagonal, k0_expectation};
use crate::error::{Error, Result};
use crate::exact_poly::{rational_from_f64, sci_string, BigRational, GammaPolynomial};

fn big_rat(u: &BigUint) -> BigRational {
    BigRational::from(BigInt::from(u.clone()))
}

/// The three distinct operators of Ω on permutation-invariant states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundOperator {
    /// K_0 = A_0^⊗m.
    K0,
    /// The uniform Fourier mode K_1.
    KFirst,
    /// Any K_ℓ with ℓ ≥ 2 (all m−1 of them agree).
    KRest,
}

/// Expectation polynomial of one Ω operator on every logical state,
/// indexed by d−1.
pub fn per_level_polynomials(
    params: &CodeParameters,
    op: BoundOperator,
) -> Result<Vec<GammaPolynomial>> {
    (1..=params.num_levels())
        .map(|d| {
            Ok(match op {
                BoundOperator::K0 => k0_expectation(params, d)?,
                BoundOperator::KFirst => fourier_diagonal(&logical_state(params, d)?, true),
                BoundOperator::KRest => fourier_diagonal(&logical_state(params, d)?, false),
            })
        })
        .collect()
}

fn check_unit_interval(gamma: &BigRational, allow_zero: bool) -> Result<()> {
    let ok = (*gamma > BigRational::zero() || (allow_zero && gamma.is_zero()))
        && *gamma < BigRational::one();
    if ok {
        Ok(())
    } else {
        Err(Error::GridOutOfRange(format!(
            "γ = {} outside the unit interval",
            sci_string(gamma, 6)
        )))
    }
}

/// Evaluate every per-level polynomial at γ and take the minimum; ties go
/// to the smaller d. Returns the value and the attaining 1-based d.
pub fn lambda_min(
    op: BoundOperator,
    params: &CodeParameters,
    gamma: &BigRational,
) -> Result<(BigRational, usize)> {
    check_unit_interval(gamma, true)?;
    let polys = per_level_polynomials(params, op)?;
    Ok(min_at(&polys, gamma))
}

fn min_at(polys: &[GammaPolynomial], gamma: &BigRational) -> (BigRational, usize) {
    let mut best: Option<(BigRational, usize)> = None;
    for (i, p) in polys.iter().enumerate() {
        let v = p.eval(gamma);
        match &best {
            Some((bv, _)) if v >= *bv => {}
            _ => best = Some((v, i + 1)),
        }
    }
    best.expect("at least one logical level")
}

/// One evaluated grid point of the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub gamma: BigRational,
    pub raw_bound: BigRational,
    /// raw_bound · (1 − D·max_overlap): a rigorous allowance for the slight
    /// non-orthogonality of the logical states.
    pub discounted_bound: BigRational,
    pub lambda_k0: BigRational,
    pub lambda_k1: BigRational,
    pub lambda_kl: BigRational,
    pub argmin_k0: usize,
    pub argmin_k1: usize,
    pub argmin_kl: usize,
}

/// Fidelity bound evaluated over a γ-grid, with the per-level polynomials
/// and the Gram non-orthogonality correction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FidelityReport {
    pub per_level_k0: Vec<GammaPolynomial>,
    pub per_level_k1: Vec<GammaPolynomial>,
    pub per_level_kl: Vec<GammaPolynomial>,
    pub rows: Vec<BoundRow>,
    /// Largest off-diagonal Gram entry of the logical states.
    pub gram_correction: BigRational,
    /// 1 − D·gram_correction, the factor applied to the raw bound.
    pub discount_factor: BigRational,
}

/// Evaluate the assembled lower bound on 1−ε at every grid point in (0, 1).
pub fn fidelity_lower_bound(
    params: &CodeParameters,
    grid: &[BigRational],
) -> Result<FidelityReport> {
    for gamma in grid {
        check_unit_interval(gamma, false)?;
    }
    let per_level_k0 = per_level_polynomials(params, BoundOperator::K0)?;
    let per_level_k1 = per_level_polynomials(params, BoundOperator::KFirst)?;
    let per_level_kl = per_level_polynomials(params, BoundOperator::KRest)?;

    let gram = gram_matrix(params)?;
    let mut gram_correction = BigRational::zero();
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j && v.abs() > gram_correction {
                gram_correction = v.abs();
            }
        }
    }
    let levels = BigRational::from(BigInt::from(params.num_levels()));
    let discount_factor = BigRational::one() - levels * &gram_correction;

    let m_minus_1 = big_rat(params.m()) - BigRational::one();
    let rows = grid
        .iter()
        .map(|gamma| {
            let (lambda_k0, argmin_k0) = min_at(&per_level_k0, gamma);
            let (lambda_k1, argmin_k1) = min_at(&per_level_k1, gamma);
            let (lambda_kl, argmin_kl) = min_at(&per_level_kl, gamma);
            let raw_bound = &lambda_k0 + &lambda_k1 + &lambda_kl * &m_minus_1;
            let discounted_bound = &raw_bound * &discount_factor;
            BoundRow {
                gamma: gamma.clone(),
                raw_bound,
                discounted_bound,
                lambda_k0,
                lambda_k1,
                lambda_kl,
                argmin_k0,
                argmin_k1,
                argmin_kl,
            }
        })
        .collect();

    Ok(FidelityReport {
        per_level_k0,
        per_level_k1,
        per_level_kl,
        rows,
        gram_correction,
        discount_factor,
    })
}

/// Deterministic γ-grid: `count` points from `min` to `max` inclusive,
/// linearly or logarithmically spaced. Points are computed in f64 and then
/// adopted exactly as dyadic rationals, so downstream arithmetic stays
/// exact and runs are reproducible bit for bit.
pub fn gamma_grid(min: f64, max: f64, count: usize, log_spacing: bool) -> Result<Vec<BigRational>> {
    if !(min > 0.0 && max < 1.0 && min <= max) {
        return Err(Error::GridOutOfRange(format!(
            "need 0 < min <= max < 1, got [{min}, {max}]"
        )));
    }
    if count == 0 {
        return Err(Error::GridOutOfRange("need at least one grid point".into()));
    }
    let mut grid = Vec::with_capacity(count);
    for i in 0..count {
        // Endpoints are taken verbatim so the grid is inclusive even where
        // exp(ln(x)) does not round-trip.
        let value = if i == 0 {
            min
        } else if i == count - 1 {
            max
        } else {
            let fraction = i as f64 / (count - 1) as f64;
            let interior = if log_spacing {
                (min.ln() + (max.ln() - min.ln()) * fraction).exp()
            } else {
                min + (max - min) * fraction
            };
            interior.clamp(min, max)
        };
        grid.push(rational_from_f64(value).expect("grid points are finite"));
    }
    Ok(grid)
}

/// CSV rendering of a report: γ with 6 significant digits, bounds and λ
/// values with 12, argmin levels as integers. The discounted column is
/// opt-in.
pub fn bound_table_csv(report: &FidelityReport, include_discounted: bool) -> String {
    let mut out = String::new();
    if include_discounted {
        out.push_str(
            "gamma,raw_bound,discounted_bound,lambda_K0,lambda_K1,lambda_Kl,argmin_K0,argmin_K1,argmin_Kl\n",
        );
    } else {
        out.push_str(
            "gamma,raw_bound,lambda_K0,lambda_K1,lambda_Kl,argmin_K0,argmin_K1,argmin_Kl\n",
        );
    }
    for row in &report.rows {
        let mut fields = vec![sci_string(&row.gamma, 6), sci_string(&row.raw_bound, 12)];
        if include_discounted {
            fields.push(sci_string(&row.discounted_bound, 12));
        }
        fields.push(sci_string(&row.lambda_k0, 12));
        fields.push(sci_string(&row.lambda_k1, 12));
        fields.push(sci_string(&row.lambda_kl, 12));
        fields.push(row.argmin_k0.to_string());
        fields.push(row.argmin_k1.to_string());
        fields.push(row.argmin_kl.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Taylor comparison
// ---------------------------------------------------------------------------

/// Order polynomials by their behavior as γ → 0⁺: compare coefficient
/// sequences lexicographically.
fn lex_less(a: &GammaPolynomial, b: &GammaPolynomial) -> bool {
    let top = a.coefficients().len().max(b.coefficients().len());
    for j in 0..top {
        let ca = a.coefficient(j);
        let cb = b.coefficient(j);
        if ca != cb {
            return ca < cb;
        }
    }
    false
}

fn lex_argmin(polys: &[GammaPolynomial]) -> usize {
    let mut best = 0;
    for i in 1..polys.len() {
        if lex_less(&polys[i], &polys[best]) {
            best = i;
        }
    }
    best + 1
}

/// γ¹ and γ² of the bound with each operator's d chosen independently
/// (lexicographic minimizer per operator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerOperatorAssembly {
    pub argmin_k0: usize,
    pub argmin_k1: usize,
    pub argmin_kl: usize,
    pub first_order: BigRational,
    pub second_order: BigRational,
}

/// γ¹ and γ² of the bound with a single d used for all three operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformAssembly {
    pub argmin_d: usize,
    pub first_order: BigRational,
    pub second_order: BigRational,
    /// (γ¹, γ²) of the single-d bound for every d, for inspection.
    pub per_level: Vec<(BigRational, BigRational)>,
}

/// First-order magnitude against the 1/(4N^(q−2)) envelope for one q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QScalingRow {
    pub q: u32,
    /// Exact −γ¹ of the per-operator assembly at this q.
    pub extracted_magnitude: BigRational,
    /// N·g_1/(4m) with m = N^q.
    pub reference_magnitude: BigRational,
    /// 1/(4N^(q−2)).
    pub envelope: BigRational,
    pub within_envelope: bool,
}

/// Exact Taylor data of the assembled bound next to the closed-form
/// constants. Differences are reported as exact rationals; nothing is
/// adjusted to force agreement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorComparison {
    /// −N·g_1/(4m): the reference first-order coefficient.
    pub reference_first_order: BigRational,
    /// c = 1 + (2g_D − g_1)/N − 2/N + 3g_1/m + 4g_1/N.
    pub reference_c: BigRational,
    /// c′ = c − 3g_1/m (the m → ∞ limit of c).
    pub reference_c_prime: BigRational,
    /// −c·N²/8: the reference second-order coefficient.
    pub reference_second_order: BigRational,
    pub per_operator: PerOperatorAssembly,
    pub uniform: UniformAssembly,
    /// per_operator.first_order − reference_first_order.
    pub first_order_delta: BigRational,
    /// per_operator.second_order − reference_second_order.
    pub second_order_delta: BigRational,
    /// Envelope check for q ∈ {3, 4}; empty for legacy parameters.
    pub q_scaling: Vec<QScalingRow>,
}

fn assemble_polys(params: &CodeParameters) -> Result<(Vec<GammaPolynomial>, Vec<GammaPolynomial>, Vec<GammaPolynomial>)> {
    Ok((
        per_level_polynomials(params, BoundOperator::K0)?,
        per_level_polynomials(params, BoundOperator::KFirst)?,
        per_level_polynomials(params, BoundOperator::KRest)?,
    ))
}

fn per_operator_assembly(params: &CodeParameters) -> Result<PerOperatorAssembly> {
    let (k0, k1, kl) = assemble_polys(params)?;
    let argmin_k0 = lex_argmin(&k0);
    let argmin_k1 = lex_argmin(&k1);
    let argmin_kl = lex_argmin(&kl);
    let m_minus_1 = big_rat(params.m()) - BigRational::one();
    let bound = k0[argmin_k0 - 1]
        .add(&k1[argmin_k1 - 1])
        .add(&kl[argmin_kl - 1].scale(&m_minus_1));
    Ok(PerOperatorAssembly {
        argmin_k0,
        argmin_k1,
        argmin_kl,
        first_order: bound.coefficient(1),
        second_order: bound.coefficient(2),
    })
}

fn uniform_assembly(params: &CodeParameters) -> Result<UniformAssembly> {
    let (k0, k1, kl) = assemble_polys(params)?;
    let m_minus_1 = big_rat(params.m()) - BigRational::one();
    let bounds: Vec<GammaPolynomial> = (0..params.num_levels())
        .map(|i| k0[i].add(&k1[i]).add(&kl[i].scale(&m_minus_1)))
        .collect();
    let argmin_d = lex_argmin(&bounds);
    let per_level = bounds
        .iter()
        .map(|b| (b.coefficient(1), b.coefficient(2)))
        .collect();
    Ok(UniformAssembly {
        argmin_d,
        first_order: bounds[argmin_d - 1].coefficient(1),
        second_order: bounds[argmin_d - 1].coefficient(2),
        per_level,
    })
}

/// c with the finite-m term 3g_1/m included.
pub fn reference_c(params: &CodeParameters) -> BigRational {
    let three_g1_over_m = BigRational::from(BigInt::from(3 * params.g()[0])) / big_rat(params.m());
    reference_c_prime(params) + three_g1_over_m
}

/// c′ = 1 + (2g_D − g_1)/N − 2/N + 4g_1/N.
pub fn reference_c_prime(params: &CodeParameters) -> BigRational {
    let n = BigRational::from(BigInt::from(params.big_n()));
    let g1 = BigInt::from(params.g()[0]);
    let gd = BigInt::from(params.g()[params.num_levels() - 1]);
    BigRational::one()
        + BigRational::from(BigInt::from(2) * gd - &g1) / &n
        - BigRational::from(BigInt::from(2)) / &n
        + BigRational::from(BigInt::from(4) * g1) / &n
}

/// −N·g_1/(4m).
pub fn reference_first_order(params: &CodeParameters) -> BigRational {
    -BigRational::from(BigInt::from(params.big_n()) * BigInt::from(params.g()[0]))
        / (BigRational::from(BigInt::from(4)) * big_rat(params.m()))
}

/// Full Taylor comparison for the given parameters.
pub fn taylor_comparison(params: &CodeParameters) -> Result<TaylorComparison> {
    let per_operator = per_operator_assembly(params)?;
    let uniform = uniform_assembly(params)?;
    let reference_first = reference_first_order(params);
    let c = reference_c(params);
    let c_prime = reference_c_prime(params);
    let n_sq = BigRational::from(BigInt::from(params.big_n()) * BigInt::from(params.big_n()));
    let reference_second = -&c * n_sq / BigRational::from(BigInt::from(8));

    let mut q_scaling = Vec::new();
    if params.q().is_some() {
        for q in [3u32, 4] {
            let scaled = crate::code_builder::validate_allow_odd(params.n(), q)?;
            let assembly = per_operator_assembly(&scaled)?;
            let reference_magnitude = -reference_first_order(&scaled);
            let envelope = BigRational::one()
                / (BigRational::from(BigInt::from(4))
                    * BigRational::from(BigInt::from(scaled.big_n())).pow((q - 2) as i32));
            let extracted_magnitude = -assembly.first_order;
            let within_envelope =
                extracted_magnitude <= envelope && reference_magnitude <= envelope;
            q_scaling.push(QScalingRow {
                q,
                extracted_magnitude,
                reference_magnitude,
                envelope,
                within_envelope,
            });
        }
    }

    let first_order_delta = &per_operator.first_order - &reference_first;
    let second_order_delta = &per_operator.second_order - &reference_second;
    Ok(TaylorComparison {
        reference_first_order: reference_first,
        reference_c: c,
        reference_c_prime: c_prime,
        reference_second_order: reference_second,
        per_operator,
        uniform,
        first_order_delta,
        second_order_delta,
        q_scaling,
    })
}

/// Human-readable report of a Taylor comparison, one `name = value` per
/// line, all values exact.
pub fn taylor_report_text(params: &CodeParameters, t: &TaylorComparison) -> String {
    use crate::exact_poly::rational_string as rs;
    let mut out = String::new();
    out.push_str(&format!(
        "parameters: n={:?} g={:?} N={} m={}\n",
        params.n(),
        params.g(),
        params.big_n(),
        params.m()
    ));
    out.push_str(&format!("reference_first_order = {}\n", rs(&t.reference_first_order)));
    out.push_str(&format!("reference_c = {}\n", rs(&t.reference_c)));
    out.push_str(&format!("reference_c_prime = {}\n", rs(&t.reference_c_prime)));
    out.push_str(&format!(
        "reference_second_order = {}\n",
        rs(&t.reference_second_order)
    ));
    out.push_str(&format!(
        "per_operator_assembly: argmin=(K0:d{},K1:d{},Kl:d{}) gamma1 = {} gamma2 = {}\n",
        t.per_operator.argmin_k0,
        t.per_operator.argmin_k1,
        t.per_operator.argmin_kl,
        rs(&t.per_operator.first_order),
        rs(&t.per_operator.second_order)
    ));
    out.push_str(&format!(
        "uniform_assembly: argmin=d{} gamma1 = {} gamma2 = {}\n",
        t.uniform.argmin_d,
        rs(&t.uniform.first_order),
        rs(&t.uniform.second_order)
    ));
    for (i, (g1, g2)) in t.uniform.per_level.iter().enumerate() {
        out.push_str(&format!(
            "uniform_level d{} gamma1 = {} gamma2 = {}\n",
            i + 1,
            rs(g1),
            rs(g2)
        ));
    }
    out.push_str(&format!(
        "first_order_delta = {}\n",
        rs(&t.first_order_delta)
    ));
    out.push_str(&format!(
        "second_order_delta = {}\n",
        rs(&t.second_order_delta)
    ));
    for row in &t.q_scaling {
        out.push_str(&format!(
            "q_scaling q={} extracted = {} reference = {} envelope = {} within = {}\n",
            row.q,
            rs(&row.extracted_magnitude),
            rs(&row.reference_magnitude),
            rs(&row.envelope),
            row.within_envelope
        ));
    }
    out
}
