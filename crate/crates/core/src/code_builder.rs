//! Code parameter validation and logical-state construction.
//!
//! Logical states live entirely in the Dicke-weight basis: a state is a
//! finite list of (weight, squared amplitude) pairs, because every amplitude
//! in the construction is the positive square root of a rational. Keeping
//! the *squares* makes normalization, overlaps, and every later expectation
//! value exact; square roots are only taken pairwise inside [`DickeVector::overlap`],
//! where the products happen to be perfect squares again.

use std::fmt;
use std::str::FromStr;

use num::{BigRational as NumRational, BigUint, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_poly::{binomial, parse_rational, pow2, rational_string, BigRational};
use crate::number_theory::gcd;

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Validated parameters of a permutation-invariant code.
///
/// The standard recipe takes pairwise-coprime block sizes n_1 ≤ … ≤ n_D and
/// a length exponent q, and derives N = Πn_d, step sizes g_d = N/n_d, and
/// qubit count m = N^q. Legacy parameters carry explicit step sizes and m
/// instead, with far weaker guarantees (no coprimality, no interior-collision
/// analysis); they exist for small hand-built test codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParameters {
    n: Vec<u64>,
    g: Vec<u64>,
    big_n: u64,
    q: Option<u32>,
    m: BigUint,
    legacy: bool,
}

impl CodeParameters {
    /// Block sizes n_1 ≤ … ≤ n_D.
    pub fn n(&self) -> &[u64] {
        &self.n
    }

    /// Weight step sizes g_1, …, g_D.
    pub fn g(&self) -> &[u64] {
        &self.g
    }

    /// N = Πn_d (the largest supported weight for standard parameters).
    pub fn big_n(&self) -> u64 {
        self.big_n
    }

    /// Length exponent, present only for standard parameters.
    pub fn q(&self) -> Option<u32> {
        self.q
    }

    /// Number of physical qubits.
    pub fn m(&self) -> &BigUint {
        &self.m
    }

    /// Number of logical levels D.
    pub fn num_levels(&self) -> usize {
        self.n.len()
    }

    pub fn is_legacy(&self) -> bool {
        self.legacy
    }
}

impl fmt::Display for CodeParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={:?} g={:?} N={} m={}", self.n, self.g, self.big_n, self.m)
    }
}

fn check_shape(n: &[u64]) -> Result<()> {
    if n.len() < 2 {
        return Err(Error::TooSmall(format!(
            "need at least 2 logical levels, got {}",
            n.len()
        )));
    }
    if n.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::NotSorted(n.to_vec()));
    }
    Ok(())
}

fn checked_product(n: &[u64]) -> Result<u64> {
    let mut acc = 1u64;
    for &v in n {
        acc = acc
            .checked_mul(v)
            .ok_or_else(|| Error::Overflow(format!("product of {n:?} exceeds u64")))?;
    }
    Ok(acc)
}

fn validate_inner(n: &[u64], q: u32, allow_odd: bool) -> Result<CodeParameters> {
    check_shape(n)?;
    for (d, &v) in n.iter().enumerate() {
        if v < 4 {
            return Err(Error::TooSmall(format!("n_{} = {} < 4", d + 1, v)));
        }
    }
    for i in 0..n.len() {
        for j in i + 1..n.len() {
            if gcd(n[i], n[j]) != 1 {
                return Err(Error::NotCoprime(n[i], n[j]));
            }
        }
    }
    let big_n = checked_product(n)?;
    if big_n % 2 == 1 && !allow_odd {
        return Err(Error::OddProduct(big_n));
    }
    if q < 3 {
        return Err(Error::BadExponent(q));
    }
    let g: Vec<u64> = n.iter().map(|&v| big_n / v).collect();
    for (d, &gv) in g.iter().enumerate() {
        if gv < 3 {
            return Err(Error::TooSmall(format!("g_{} = {} < 3", d + 1, gv)));
        }
    }
    let m = BigUint::from(big_n).pow(q);
    Ok(CodeParameters {
        n: n.to_vec(),
        g,
        big_n,
        q: Some(q),
        m,
        legacy: false,
    })
}

/// Validate standard parameters: sorted pairwise-coprime n_d ≥ 4, even
/// N = Πn_d, steps g_d = N/n_d ≥ 3, length exponent q ≥ 3, m = N^q.
pub fn validate(n: &[u64], q: u32) -> Result<CodeParameters> {
    validate_inner(n, q, false)
}

/// Like [`validate`] but accepts an odd product N. Odd-N codes keep every
/// exactness guarantee; only the evenness convention of the standard recipe
/// is waived.
pub fn validate_allow_odd(n: &[u64], q: u32) -> Result<CodeParameters> {
    validate_inner(n, q, true)
}

/// Validate legacy parameters with explicit step sizes and qubit count.
/// Requires n_d ≥ 2, g_d ≥ 1, and every supported weight to fit in m; no
/// coprimality or evenness is demanded.
pub fn validate_legacy(n: &[u64], g: &[u64], m: &BigUint) -> Result<CodeParameters> {
    check_shape(n)?;
    if n.len() != g.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} block sizes but {} step sizes",
            n.len(),
            g.len()
        )));
    }
    for (d, &v) in n.iter().enumerate() {
        if v < 2 {
            return Err(Error::TooSmall(format!("n_{} = {} < 2", d + 1, v)));
        }
    }
    for (d, &gv) in g.iter().enumerate() {
        if gv < 1 {
            return Err(Error::TooSmall(format!("g_{} = {} < 1", d + 1, gv)));
        }
    }
    for (&v, &gv) in n.iter().zip(g) {
        let top = *index_set(v).last().expect("index sets are never empty");
        let weight = gv
            .checked_mul(top)
            .ok_or_else(|| Error::Overflow(format!("weight {gv}*{top} exceeds u64")))?;
        if BigUint::from(weight) > *m {
            return Err(Error::WeightOverflow {
                weight,
                m: m.to_string(),
            });
        }
    }
    let big_n = checked_product(n)?;
    Ok(CodeParameters {
        n: n.to_vec(),
        g: g.to_vec(),
        big_n,
        q: None,
        m: m.clone(),
        legacy: true,
    })
}

/// Occupation numbers entering the d-th logical state: the odd integers
/// from 1 through 2⌊(n_d−1)/2⌋+1, i.e. up to n_d itself when n_d is odd and
/// n_d−1 when it is even.
pub fn index_set(n_d: u64) -> Vec<u64> {
    let top = 2 * ((n_d - 1) / 2) + 1;
    (1..=top).step_by(2).collect()
}

// ---------------------------------------------------------------------------
// Dicke-weight vectors
// ---------------------------------------------------------------------------

/// A real vector with nonnegative amplitudes supported on finitely many
/// Dicke states of an m-qubit system, stored as (weight, squared amplitude)
/// pairs sorted by weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DickeVector {
    m: BigUint,
    terms: Vec<(u64, BigRational)>,
}

impl DickeVector {
    /// Build from (weight, squared amplitude) pairs. Weights must be
    /// distinct and at most m; squared amplitudes must be positive.
    pub fn new(m: BigUint, mut terms: Vec<(u64, BigRational)>) -> Result<Self> {
        terms.sort_by_key(|&(w, _)| w);
        for pair in terms.windows(2) {
            assert_ne!(pair[0].0, pair[1].0, "duplicate weight {}", pair[0].0);
        }
        for (w, s) in &terms {
            if BigUint::from(*w) > m {
                return Err(Error::WeightOverflow {
                    weight: *w,
                    m: m.to_string(),
                });
            }
            assert!(s.is_positive(), "squared amplitude at weight {w} must be positive");
        }
        Ok(Self { m, terms })
    }

    pub fn m(&self) -> &BigUint {
        &self.m
    }

    pub fn terms(&self) -> &[(u64, BigRational)] {
        &self.terms
    }

    pub fn weights(&self) -> Vec<u64> {
        self.terms.iter().map(|&(w, _)| w).collect()
    }

    /// Squared amplitude at a weight, zero off the support.
    pub fn squared_amplitude(&self, weight: u64) -> BigRational {
        self.terms
            .iter()
            .find(|&&(w, _)| w == weight)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn norm_squared(&self) -> BigRational {
        self.terms.iter().map(|(_, s)| s).sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_squared().is_one()
    }

    /// Exact inner product with another vector on the same qubit count.
    /// Each common weight contributes √(s·s′); the construction only ever
    /// produces perfect-square products, and anything else is reported as a
    /// collision rather than approximated.
    pub fn overlap(&self, other: &Self) -> Result<BigRational> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch(format!(
                "overlap between m={} and m={}",
                self.m, other.m
            )));
        }
        let mut total = BigRational::zero();
        for (w, s) in &self.terms {
            let s2 = other.squared_amplitude(*w);
            if s2.is_zero() {
                continue;
            }
            let product = s * &s2;
            let root = sqrt_exact(&product).ok_or_else(|| {
                Error::CollisionFound(format!(
                    "overlap term at weight {w} is irrational: sqrt({})",
                    rational_string(&product)
                ))
            })?;
            total += root;
        }
        Ok(total)
    }
}

/// Exact square root of a nonnegative rational, when one exists.
pub(crate) fn sqrt_exact(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let numer = r.numer().magnitude();
    let denom = r.denom().magnitude();
    let sn = numer.sqrt();
    let sd = denom.sqrt();
    if &(&sn * &sn) == numer && &(&sd * &sd) == denom {
        Some(NumRational::new(sn.into(), sd.into()))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Logical states, overlaps, Gram matrix
// ---------------------------------------------------------------------------

/// The d-th logical state (d is 1-based): weights g_d·j for j in the index
/// set of n_d, squared amplitudes C(n_d, j)/2^(n_d−1). Normalization is
/// re-verified exactly — it is the r = 0 odd-index binomial identity.
pub fn logical_state(params: &CodeParameters, d: usize) -> Result<DickeVector> {
    assert!(
        (1..=params.num_levels()).contains(&d),
        "logical level {d} outside 1..={}",
        params.num_levels()
    );
    let n_d = params.n()[d - 1];
    let g_d = params.g()[d - 1];
    let norm = pow2(-((n_d - 1) as i64));
    let mut terms = Vec::new();
    for j in index_set(n_d) {
        let weight = g_d
            .checked_mul(j)
            .ok_or_else(|| Error::Overflow(format!("weight {g_d}*{j} exceeds u64")))?;
        let squared = BigRational::from(binomial(n_d, j)) * &norm;
        terms.push((weight, squared));
    }
    let vector = DickeVector::new(params.m().clone(), terms)?;
    if !vector.is_normalized() {
        return Err(Error::IdentityViolation {
            n: n_d,
            r: 0,
            direct: rational_string(&vector.norm_squared()),
            closed: "1".into(),
        });
    }
    Ok(vector)
}

/// All D logical states in order.
pub fn logical_states(params: &CodeParameters) -> Result<Vec<DickeVector>> {
    (1..=params.num_levels())
        .map(|d| logical_state(params, d))
        .collect()
}

/// Exact overlap ⟨d_L|d′_L⟩ between two logical states (1-based labels).
pub fn overlap(params: &CodeParameters, d: usize, d2: usize) -> Result<BigRational> {
    logical_state(params, d)?.overlap(&logical_state(params, d2)?)
}

/// D×D Gram matrix of the logical states, exactly.
pub fn gram_matrix(params: &CodeParameters) -> Result<Vec<Vec<BigRational>>> {
    let states = logical_states(params)?;
    let n = states.len();
    let mut gram = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let value = states[i].overlap(&states[j])?;
            gram[i][j] = value.clone();
            gram[j][i] = value;
        }
    }
    Ok(gram)
}

// ---------------------------------------------------------------------------
// Descriptors
// ---------------------------------------------------------------------------

/// Format tag carried by every descriptor this crate writes.
pub const DESCRIPTOR_FORMAT: &str = "picode-descriptor/1";

/// Per-state block of a descriptor: support weights and exact squared
/// amplitudes as "p/q" strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDescriptor {
    pub d: usize,
    pub weights: Vec<u64>,
    pub squared_amplitudes: Vec<String>,
}

/// Serializable snapshot of a code: parameters, every logical state, and
/// the exact Gram matrix. All rationals are "p" or "p/q" strings so the
/// document survives JSON round-trips without precision loss.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub format: String,
    pub n: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    pub g: Vec<u64>,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub m: String,
    pub legacy: bool,
    pub states: Vec<StateDescriptor>,
    pub gram: Vec<Vec<String>>,
}

/// Snapshot a validated code into a descriptor.
pub fn describe(params: &CodeParameters) -> Result<CodeDescriptor> {
    let states = logical_states(params)?
        .iter()
        .enumerate()
        .map(|(i, v)| StateDescriptor {
            d: i + 1,
            weights: v.weights(),
            squared_amplitudes: v.terms().iter().map(|(_, s)| rational_string(s)).collect(),
        })
        .collect();
    let gram = gram_matrix(params)?
        .iter()
        .map(|row| row.iter().map(rational_string).collect())
        .collect();
    Ok(CodeDescriptor {
        format: DESCRIPTOR_FORMAT.into(),
        n: params.n().to_vec(),
        q: params.q(),
        g: params.g().to_vec(),
        big_n: params.big_n(),
        m: params.m().to_string(),
        legacy: params.is_legacy(),
        states,
        gram,
    })
}

/// Render a descriptor as pretty-printed JSON with a trailing newline.
/// Field order is fixed by the struct, so equal codes produce identical
/// bytes.
pub fn descriptor_json(params: &CodeParameters) -> Result<String> {
    let descriptor = describe(params)?;
    let mut text = serde_json::to_string_pretty(&descriptor)
        .map_err(|e| Error::BadDescriptor(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parse a descriptor document, re-validate the parameters from scratch,
/// and verify that every recorded state and Gram entry matches what those
/// parameters actually produce.
pub fn parse_descriptor(text: &str) -> Result<CodeParameters> {
    let doc: CodeDescriptor =
        serde_json::from_str(text).map_err(|e| Error::BadDescriptor(e.to_string()))?;
    if doc.format != DESCRIPTOR_FORMAT {
        return Err(Error::BadDescriptor(format!(
            "unknown format {:?} (expected {DESCRIPTOR_FORMAT:?})",
            doc.format
        )));
    }
    let m = BigUint::from_str(&doc.m)
        .map_err(|e| Error::BadDescriptor(format!("bad qubit count {:?}: {e}", doc.m)))?;
    let params = if doc.legacy {
        validate_legacy(&doc.n, &doc.g, &m)?
    } else {
        let q = doc
            .q
            .ok_or_else(|| Error::BadDescriptor("standard descriptor lacks q".into()))?;
        let p = validate_allow_odd(&doc.n, q)?;
        if p.m() != &m {
            return Err(Error::BadDescriptor(format!(
                "recorded m = {} but N^q = {}",
                m,
                p.m()
            )));
        }
        p
    };
    if params.g() != doc.g {
        return Err(Error::BadDescriptor(format!(
            "recorded steps {:?} but parameters give {:?}",
            doc.g,
            params.g()
        )));
    }
    if params.big_n() != doc.big_n {
        return Err(Error::BadDescriptor(format!(
            "recorded N = {} but parameters give {}",
            doc.big_n,
            params.big_n()
        )));
    }
    let rebuilt = describe(&params)?;
    if rebuilt.states != doc.states {
        return Err(Error::BadDescriptor(
            "recorded logical states disagree with the parameters".into(),
        ));
    }
    if rebuilt.gram != doc.gram {
        return Err(Error::BadDescriptor(
            "recorded Gram matrix disagrees with the parameters".into(),
        ));
    }
    // Round-trip the rational strings to guarantee they were canonical.
    for state in &doc.states {
        for s in &state.squared_amplitudes {
            parse_rational(s)?;
        }
    }
    Ok(params)
}
