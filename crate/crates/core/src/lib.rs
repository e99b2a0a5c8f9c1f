//! Exact-arithmetic construction and verification of multi-qubit
//! permutation-invariant codes under amplitude damping.
//!
//! The library builds codes whose logical states are binomially weighted
//! superpositions of Dicke states, proves their orthogonality properties
//! with integer arithmetic, computes closed-form Kraus-pair expectations as
//! polynomials in the damping rate γ with exact rational coefficients, and
//! assembles the entanglement-fidelity lower bound together with its Taylor
//! coefficients. A brute-force dense state-vector oracle independently
//! validates every analytic formula at small qubit counts.
//!
//! Module map:
//! - [`number_theory`]: primes, coprime parameter sequences, and the linear
//!   Diophantine collision analysis.
//! - [`exact_poly`]: big rationals, binomial coefficients, and polynomials
//!   in γ.
//! - [`code_builder`]: parameter validation, logical-state construction in
//!   the Dicke-weight basis, exact overlaps and Gram matrices.
//! - [`damping_analytics`]: closed-form expectations of amplitude-damping
//!   Kraus pairs and the Fourier diagonalization.
//! - [`fidelity_bound`]: worst-case deformations λ_A, the fidelity lower
//!   bound over a γ-grid, and the Taylor-coefficient comparison.
//! - [`dense_oracle`]: matrix-free 2^m simulator (m ≤ 14) used as an
//!   independent check on everything above.

pub mod code_builder;
pub mod damping_analytics;
pub mod dense_oracle;
pub mod error;
pub mod exact_poly;
pub mod fidelity_bound;
pub mod number_theory;

pub use code_builder::{CodeParameters, DickeVector};
pub use error::{Error, Result};
pub use exact_poly::{BigRational, GammaPolynomial};
