//! Primes, pairwise-coprime parameter sequences, and the linear Diophantine
//! collision analysis behind the code's orthogonality guarantees.
//!
//! All operations are pure functions on plain integers. Parameters in this
//! module never exceed 64 bits, so primality is decided deterministically:
//! trial division below 2^32 and a fixed-base strong-probable-prime test
//! above it.

use num::Integer;

use crate::code_builder::CodeParameters;
use crate::error::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Strong-probable-prime test to base `a` for odd `x = d·2^s + 1`.
fn sprp(x: u64, a: u64, d: u64, s: u32) -> bool {
    let a = a % x;
    if a == 0 {
        return true;
    }
    let mut y = powmod(a, d, x);
    if y == 1 || y == x - 1 {
        return true;
    }
    for _ in 1..s {
        y = mulmod(y, y, x);
        if y == x - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for the full u64 range.
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x < 1 << 32 {
        if x % 2 == 0 {
            return x == 2;
        }
        let mut f = 3u64;
        while f * f <= x {
            if x % f == 0 {
                return false;
            }
            f += 2;
        }
        return true;
    }
    if x % 2 == 0 {
        return false;
    }
    let s = (x - 1).trailing_zeros();
    let d = (x - 1) >> s;
    // These twelve bases decide primality for every x below 3.3·10^24.
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .all(|&a| sprp(x, a, d, s))
}

/// The k-th prime, 1-indexed: p_1 = 2, p_2 = 3, p_3 = 5, …
pub fn nth_prime(k: usize) -> u64 {
    assert!(k >= 1, "prime indices are 1-based");
    let mut count = 0usize;
    let mut x = 1u64;
    while count < k {
        x += 1;
        if is_prime(x) {
            count += 1;
        }
    }
    x
}

/// Index k with p_k = p, when p is prime.
pub fn prime_index(p: u64) -> Option<usize> {
    if !is_prime(p) {
        return None;
    }
    Some((2..=p).filter(|&x| is_prime(x)).count())
}

// ---------------------------------------------------------------------------
// Coprime parameter sequences
// ---------------------------------------------------------------------------

/// Sorted, pairwise-coprime positive integers with their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeSequence {
    values: Vec<u64>,
    product: u64,
}

impl CoprimeSequence {
    /// Validates sortedness and pairwise coprimality.
    pub fn new(values: Vec<u64>) -> Result<Self> {
        assert!(values.iter().all(|&v| v >= 1), "values must be positive");
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotSorted(values));
        }
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                let g = gcd(values[i], values[j]);
                if g != 1 {
                    return Err(Error::CoprimalityViolation(values[i], values[j], g));
                }
            }
        }
        let mut product = 1u64;
        for &v in &values {
            product = product
                .checked_mul(v)
                .ok_or_else(|| Error::Overflow(format!("product of {values:?} exceeds u64")))?;
        }
        Ok(Self { values, product })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn product(&self) -> u64 {
        self.product
    }
}

/// The consecutive-prime recipe: starting from the k-th prime p_k (≥ 5),
/// take (p_k, p_k + 1, p_{k+1}, …, p_{k+D-2}). The even member p_k + 1
/// makes the product even; coprimality is re-verified explicitly.
pub fn build_coprime_sequence(k: usize, d: usize) -> Result<CoprimeSequence> {
    assert!(d >= 2, "need at least two members");
    let p = nth_prime(k);
    assert!(p >= 5, "recipe requires p_k >= 5");
    let mut values = vec![p, p + 1];
    let mut next_index = k + 1;
    for _ in 2..d {
        values.push(nth_prime(next_index));
        next_index += 1;
    }
    values.sort_unstable();
    CoprimeSequence::new(values)
}

// ---------------------------------------------------------------------------
// Diophantine collision analysis
// ---------------------------------------------------------------------------

/// Whether x·g = y·g2 + s admits integer solutions: true iff gcd(g, g2)
/// divides s.
pub fn diophantine_solvable(g: u64, g2: u64, s: i64) -> bool {
    assert!(g >= 1 && g2 >= 1);
    s.unsigned_abs() % gcd(g, g2) == 0
}

/// Minimal positive (x, y) with x·g = y·g2, namely (g2/gcd, g/gcd).
pub fn min_positive_solution(g: u64, g2: u64) -> (u64, u64) {
    assert!(g >= 1 && g2 >= 1);
    let c = gcd(g, g2);
    (g2 / c, g / c)
}

/// Per-pair record of the interior-collision identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCollisionRecord {
    /// 1-based logical indices of the pair.
    pub d: usize,
    pub d2: usize,
    pub g_d: u64,
    pub g_d2: u64,
    pub gcd: u64,
    /// g_d·g_d2 / gcd; must equal N.
    pub lcm: u64,
    /// N/(n_d·n_d2); must equal the gcd and exceed 1.
    pub expected_gcd: u64,
}

/// For every pair d ≠ d', assert g_d·g_d'/gcd = N exactly and
/// gcd(g_d, g_d') = N/(n_d·n_d') > 1. Violations mean a smallest positive
/// weight collision sits strictly inside (0, N), which would break the
/// cross-state orthogonality argument.
pub fn verify_no_interior_collision(params: &CodeParameters) -> Result<Vec<PairCollisionRecord>> {
    let n = params.n();
    let g = params.g();
    let big_n = params.big_n();
    let mut records = Vec::new();
    for d in 0..n.len() {
        for d2 in d + 1..n.len() {
            let c = gcd(g[d], g[d2]);
            let lcm = g[d] / c * g[d2];
            let expected = big_n / (n[d] * n[d2]);
            let record = PairCollisionRecord {
                d: d + 1,
                d2: d2 + 1,
                g_d: g[d],
                g_d2: g[d2],
                gcd: c,
                lcm,
                expected_gcd: expected,
            };
            if lcm != big_n {
                return Err(Error::CollisionFound(format!(
                    "pair ({},{}) has lcm(g_{},g_{}) = {} != N = {}",
                    record.d, record.d2, record.d, record.d2, lcm, big_n
                )));
            }
            if c != expected || c <= 1 {
                return Err(Error::CollisionFound(format!(
                    "pair ({},{}) has gcd(g_{},g_{}) = {} (expected N/(n_d*n_d') = {} > 1)",
                    record.d, record.d2, record.d, record.d2, c, expected
                )));
            }
            records.push(record);
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_builder::validate;

    /// Independent oracle: plain trial division over every candidate factor.
    fn trial_division_prime(x: u64) -> bool {
        if x < 2 {
            return false;
        }
        (2..x).take_while(|f| f * f <= x).all(|f| x % f != 0)
    }

    #[test]
    fn is_prime_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(is_prime(7919));
        assert!(trial_division_prime(7919));
    }

    #[test]
    fn is_prime_matches_trial_division() {
        for x in 0..2000u64 {
            assert_eq!(is_prime(x), trial_division_prime(x), "x = {x}");
        }
    }

    #[test]
    fn sprp_path_known_values() {
        // Above 2^32, forcing the strong-probable-prime branch.
        assert!(is_prime(4294967311)); // first prime past 2^32
        assert!(!is_prime(4294967297)); // 641 * 6700417
        assert!(is_prime(18446744073709551557)); // largest u64 prime
        assert!(!is_prime(18446744073709551555));
    }

    #[test]
    fn nth_prime_indexing() {
        assert_eq!(nth_prime(1), 2);
        assert_eq!(nth_prime(3), 5);
        assert_eq!(nth_prime(6), 13);
        assert_eq!(prime_index(5), Some(3));
        assert_eq!(prime_index(6), None);
    }

    #[test]
    fn coprime_sequence_recipe() {
        let s = build_coprime_sequence(3, 3).unwrap();
        assert_eq!(s.values(), &[5, 6, 7]);
        assert_eq!(s.product(), 210);

        let s = build_coprime_sequence(3, 2).unwrap();
        assert_eq!(s.values(), &[5, 6]);
        assert_eq!(s.product(), 30);

        let s = build_coprime_sequence(6, 4).unwrap();
        assert_eq!(s.values(), &[13, 14, 17, 19]);
        assert_eq!(s.product(), 58786);
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(gcd(s.values()[i], s.values()[j]), 1);
            }
        }
    }

    #[test]
    fn coprime_sequence_rejects_shared_factors() {
        let err = CoprimeSequence::new(vec![4, 6, 7]).unwrap_err();
        assert_eq!(err, Error::CoprimalityViolation(4, 6, 2));
        let err = CoprimeSequence::new(vec![6, 5, 7]).unwrap_err();
        assert!(matches!(err, Error::NotSorted(_)));
    }

    #[test]
    fn product_is_even_for_odd_starting_prime() {
        for k in [3usize, 4, 5, 6, 10] {
            for d in 2..=5 {
                let s = build_coprime_sequence(k, d).unwrap();
                assert_eq!(s.product() % 2, 0, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn diophantine_examples() {
        assert!(!diophantine_solvable(42, 35, 1));
        assert!(diophantine_solvable(42, 35, 7));
        assert!(diophantine_solvable(42, 35, 0));
        assert!(diophantine_solvable(42, 35, -7));
        assert!(!diophantine_solvable(42, 35, -1));
    }

    #[test]
    fn min_positive_solution_examples() {
        assert_eq!(min_positive_solution(42, 35), (5, 6));
        assert_eq!(5 * 42, 6 * 35);
        assert_eq!(min_positive_solution(3, 3), (1, 1));
        assert_eq!(min_positive_solution(30, 35), (7, 6));
        assert_eq!(7 * 30, 210);
    }

    /// Brute-force oracle: smallest positive x with x·g divisible by g2.
    fn min_positive_brute(g: u64, g2: u64) -> (u64, u64) {
        for x in 1..=g2 {
            if (x * g) % g2 == 0 {
                return (x, x * g / g2);
            }
        }
        unreachable!("x = g2 always works");
    }

    #[test]
    fn min_positive_matches_brute_force() {
        for g in 1..=40u64 {
            for g2 in 1..=40u64 {
                assert_eq!(min_positive_solution(g, g2), min_positive_brute(g, g2));
            }
        }
    }

    #[test]
    fn interior_collision_on_reference_code() {
        let params = validate(&[5, 6, 7], 3).unwrap();
        let records = verify_no_interior_collision(&params).unwrap();
        assert_eq!(records.len(), 3);
        let pair12 = &records[0];
        assert_eq!((pair12.g_d, pair12.g_d2), (42, 35));
        assert_eq!(pair12.gcd, 7);
        assert_eq!(pair12.expected_gcd, 210 / 30);
        assert_eq!(pair12.lcm, 210);
        let pair13 = &records[1];
        assert_eq!((pair13.g_d, pair13.g_d2), (42, 30));
        assert_eq!(pair13.gcd, 6);
        assert_eq!(pair13.lcm, 210);
    }

    #[test]
    fn interior_collision_rejects_coprime_steps() {
        // D = 2 gives gcd(g_1, g_2) = 1, violating the > 1 requirement.
        let params = crate::code_builder::validate_legacy(&[5, 6], &[6, 5], &num::BigUint::from(30u32))
            .unwrap();
        let err = verify_no_interior_collision(&params).unwrap_err();
        assert!(matches!(err, Error::CollisionFound(_)));
    }
}
