//! Second moments of primitive Dirichlet L-functions at the central point.
//!
//! The library computes the mean square of `L(1/2, χ)` over primitive
//! Dirichlet characters `χ mod q` three independent ways and compares them:
//!
//! * **Direct summation** ([`moments`]): enumerate the character group,
//!   evaluate each `L(1/2 + shift, χ)` from deflated Hurwitz zeta values, and
//!   sum over the even, odd, or full primitive family.
//! * **Closed-form asymptotics** ([`mainterms`]): the main term of size
//!   `φ*(q) log q` and the secondary term of size `√q` built from Gauss sums
//!   and restricted L-values over the unitary factorizations of `q`.
//! * **Divisor-sum expansion** ([`moments::divisor_component_series`]): the
//!   all-characters moment as a smooth divisor-weighted series against an
//!   oscillatory kernel, with a certified truncation bound.
//!
//! [`verify`] turns the comparisons into reportable probes: residuals against
//! the predicted `q^{1/4}`-scale error, fitted error exponents over sweeps,
//! the structure of the sub-leading expansion (half-integer powers only), and
//! a reciprocity check between twisted moments `S(p,h)` and `S(h,-p)`.
//!
//! Supporting layers: [`arith`] (factorization, Möbius, coprime splittings),
//! [`characters`] (character groups, conductors, Gauss sums), [`lfunc`]
//! (complex gamma, Hurwitz zeta, Dirichlet L), and [`kernels`] (the contour
//! kernels behind the expansions). Numeric tolerances used across the crate
//! are centralized in [`tolerances`].

pub mod arith;
pub mod characters;
pub mod kernels;
pub mod lfunc;
pub mod mainterms;
pub mod moments;
pub mod tolerances;
pub mod verify;

pub use num_complex::Complex64;
