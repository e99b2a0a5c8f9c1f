//! Arbitrary-precision rational arithmetic, big-integer binomial
//! coefficients, and polynomials in the damping parameter γ.
//!
//! Everything in the exact path of this crate is carried by
//! [`GammaPolynomial`]: a dense polynomial in γ whose coefficients are
//! reduced big rationals. Evaluation at a rational point is exact; decimal
//! rendering goes through [`sci_string`], which rounds half-even at the
//! requested number of significant digits, so no binary float ever enters
//! the arithmetic.

use num::{BigInt, BigUint, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

/// Reduced fraction of two big integers, denominator always positive.
pub type BigRational = num::BigRational;

/// Binomial coefficient C(n, k); 0 when k > n.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// 2^e for a possibly negative exponent, as an exact rational.
pub fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Σ_{t=0}^{n} t^r·C(n,t) by direct summation, cross-checked against the
/// closed forms 2^n, 2^{n-1}·n, 2^{n-2}·n(n+1), 2^{n-3}·n²(n+3) for
/// r = 0, 1, 2, 3. The closed form is rational for n < 3, which is why the
/// return type is a rational rather than an integer.
pub fn moment_sum(n: u64, r: u32) -> Result<BigRational> {
    assert!(n >= 1, "moment_sum requires n >= 1");
    assert!(r <= 3, "moment_sum supports r in 0..=3");
    let mut direct = BigInt::zero();
    for t in 0..=n {
        direct += BigInt::from(t).pow(r) * binomial(n, t);
    }
    let direct = BigRational::from_integer(direct);

    let nn = BigRational::from_integer(BigInt::from(n));
    let closed = match r {
        0 => pow2(n as i64),
        1 => pow2(n as i64 - 1) * &nn,
        2 => pow2(n as i64 - 2) * &nn * (&nn + BigRational::one()),
        3 => pow2(n as i64 - 3) * &nn * &nn * (&nn + BigRational::from_integer(BigInt::from(3))),
        _ => unreachable!(),
    };

    if direct != closed {
        return Err(Error::IdentityViolation {
            n,
            r,
            direct: rational_string(&direct),
            closed: rational_string(&closed),
        });
    }
    Ok(direct)
}

/// Render a rational as `p` when the denominator is 1, else `p/q`.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the output of [`rational_string`].
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = |what: &str| Error::BadDescriptor(format!("invalid rational '{s}': {what}"));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.trim().parse().map_err(|_| bad("numerator"))?;
            Ok(BigRational::from_integer(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad("numerator"))?;
            let q: BigInt = q.trim().parse().map_err(|_| bad("denominator"))?;
            if q.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Exact rational equal to the given finite float.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

// ---------------------------------------------------------------------------
// Polynomials in γ
// ---------------------------------------------------------------------------

/// Dense polynomial in γ with exact rational coefficients, constant term
/// first. Trailing zero coefficients are always trimmed, so the zero
/// polynomial is the empty coefficient list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPolynomial {
    coeffs: Vec<BigRational>,
}

impl GammaPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// c·γ^power.
    pub fn monomial(c: BigRational, power: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); power + 1];
        coeffs[power] = c;
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of γ^j (zero beyond the stored length).
    pub fn coefficient(&self, j: usize) -> BigRational {
        self.coeffs.get(j).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficients rendered with [`rational_string`], constant term first.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_string).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for j in 0..n {
            coeffs.push(self.coefficient(j) + other.coefficient(j));
        }
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// Multiply by γ (shift all powers up by one).
    pub fn mul_gamma(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Exact Horner evaluation at a rational point.
    pub fn eval(&self, at: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    /// Evaluate at the exact rational value of a finite float.
    pub fn eval_f64(&self, at: f64) -> BigRational {
        let at = rational_from_f64(at).expect("evaluation point must be finite");
        self.eval(&at)
    }

    /// Evaluation rendered as a decimal with `sig` significant digits
    /// (half-even rounding). `sig = 50` is the crate-wide high-precision
    /// setting.
    pub fn eval_decimal(&self, at: &BigRational, sig: usize) -> String {
        sci_string(&self.eval(at), sig)
    }
}

/// Exact expansion of (1−γ)^e: coefficients (−1)^k·C(e,k).
pub fn one_minus_gamma_pow(e: u64) -> GammaPolynomial {
    let mut coeffs = Vec::with_capacity(e as usize + 1);
    for k in 0..=e {
        let mut c = binomial(e, k);
        if k % 2 == 1 {
            c = -c;
        }
        coeffs.push(BigRational::from_integer(c));
    }
    GammaPolynomial::new(coeffs)
}

// ---------------------------------------------------------------------------
// Decimal rendering
// ---------------------------------------------------------------------------

/// Compare a positive rational against 10^k without leaving integers.
fn cmp_pow10(r: &BigRational, k: i64) -> std::cmp::Ordering {
    let ten = BigUint::from(10u32);
    if k >= 0 {
        let rhs = r.denom().magnitude() * ten.pow(k as u32);
        r.numer().magnitude().cmp(&rhs)
    } else {
        let lhs = r.numer().magnitude() * ten.pow((-k) as u32);
        lhs.cmp(r.denom().magnitude())
    }
}

/// Scientific-notation rendering of an exact rational with `sig`
/// significant digits, rounding half to even. Examples with `sig = 6`:
/// `1.00000e-4`, `-2.38095e-1`, `0.00000e0` for zero.
pub fn sci_string(r: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return if sig == 1 {
            "0e0".to_string()
        } else {
            format!("0.{}e0", "0".repeat(sig - 1))
        };
    }
    let neg = r.is_negative();
    let mag = r.abs();

    // Exponent: the unique e with 10^e <= |r| < 10^(e+1). Digit counts give
    // a two-candidate window; resolve by exact comparison.
    let mut e10 = r.numer().magnitude().to_string().len() as i64
        - r.denom().magnitude().to_string().len() as i64;
    while cmp_pow10(&mag, e10) == std::cmp::Ordering::Less {
        e10 -= 1;
    }
    while cmp_pow10(&mag, e10 + 1) != std::cmp::Ordering::Less {
        e10 += 1;
    }

    // Scale so the first `sig` digits sit left of the point, then round.
    let shift = sig as i64 - 1 - e10;
    let (num, den) = if shift >= 0 {
        (
            mag.numer().magnitude() * BigUint::from(10u32).pow(shift as u32),
            mag.denom().magnitude().clone(),
        )
    } else {
        (
            mag.numer().magnitude().clone(),
            mag.denom().magnitude() * BigUint::from(10u32).pow((-shift) as u32),
        )
    };
    let (mut q, rem) = num.div_rem(&den);
    let twice = &rem * BigUint::from(2u32);
    match twice.cmp(&den) {
        std::cmp::Ordering::Greater => q += 1u32,
        std::cmp::Ordering::Equal => {
            if q.is_odd() {
                q += 1u32;
            }
        }
        std::cmp::Ordering::Less => {}
    }

    let mut digits = q.to_string();
    let mut exp = e10;
    if digits.len() > sig {
        // Rounding overflowed to 10^sig; drop the trailing zero.
        digits.truncate(sig);
        exp += 1;
    }
    debug_assert_eq!(digits.len(), sig);

    let body = if sig == 1 {
        digits
    } else {
        format!("{}.{}", &digits[..1], &digits[1..])
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, body, exp)
}
