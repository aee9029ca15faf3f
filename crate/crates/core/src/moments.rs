//! Brute-force moment sums: the left-hand sides that the closed forms in
//! [`crate::mainterms`] are measured against.
//!
//! * [`moment_even`] / [`moment_odd`] / [`moment_all_primitive`] — shifted
//!   second moments `Σ* L(1/2+α,χ) L(1/2+β,χ̄)` over the primitive
//!   characters of one parity class (or both), by direct evaluation of every
//!   L-value.
//! * [`moment_all_characters`] — `Σ_{χ mod q} |L(1/2,χ)|²` over *all*
//!   characters, principal included.
//! * [`divisor_component`] / [`divisor_component_series`] — the component
//!   `T` in the divisor decomposition
//!   `Σ_{χ mod q} |L(1/2,χ)|² = (φ(q)/q) Σ_{k|q} μ(q/k) T(k)`, computed two
//!   independent ways: recovered from character moments, and summed as the
//!   divisor series `4√(k/2π) Re Σ_n d(n)/√n · K(2πn/k)` with a certified
//!   oscillatory tail.
//! * [`twisted_moment`] — `S(p,h) = Σ*_{χ mod p} |L(1/2,χ)|² χ(h)` for prime
//!   `p`, the object of the reciprocity comparison.
//!
//! Sums are parallelized per character but reduced in label order, so
//! results are byte-identical across thread counts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{divisors, euler_phi, is_prime};
use crate::characters::CharacterGroup;
use crate::kernels::{HbKernelTable, KernelError, TailGate};
use crate::lfunc::{dirichlet_l_with, HurwitzVector};
use crate::mainterms::assert_shift_domain;
use crate::tolerances::{
    L_VALUE_ERROR_BUDGET, REALITY_TOL, TSERIES_BLOCK_POWER, TSERIES_MAX_X, TSERIES_TAIL_TOL,
};

/// Which characters a moment sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    /// Primitive characters with `χ(-1) = 1`.
    Even,
    /// Primitive characters with `χ(-1) = -1`.
    Odd,
    /// All primitive characters.
    AllPrimitive,
    /// Every character of the modulus, principal included, at zero shifts.
    AllCharacters,
}

/// One computed moment, with enough context to audit it.
#[derive(Debug, Clone)]
pub struct MomentValue {
    pub q: u64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub parity: ParityClass,
    pub value: Complex64,
    /// Number of characters actually summed.
    pub character_count: u64,
    /// Crude numeric-error estimate: two L-evaluations per character, each
    /// within [`L_VALUE_ERROR_BUDGET`].
    pub est_numeric_error: f64,
}

/// `Σ*_{χ mod q, χ(-1)=1} L(1/2+α, χ) L(1/2+β, χ̄)`.
pub fn moment_even(q: u64, alpha: Complex64, beta: Complex64) -> MomentValue {
    primitive_moment(q, alpha, beta, ParityClass::Even)
}

/// `Σ*_{χ mod q, χ(-1)=-1} L(1/2+α, χ) L(1/2+β, χ̄)`.
pub fn moment_odd(q: u64, alpha: Complex64, beta: Complex64) -> MomentValue {
    primitive_moment(q, alpha, beta, ParityClass::Odd)
}

/// `Σ*_{χ mod q} L(1/2+α, χ) L(1/2+β, χ̄)` over all primitive characters.
pub fn moment_all_primitive(q: u64, alpha: Complex64, beta: Complex64) -> MomentValue {
    primitive_moment(q, alpha, beta, ParityClass::AllPrimitive)
}

fn primitive_moment(
    q: u64,
    alpha: Complex64,
    beta: Complex64,
    parity: ParityClass,
) -> MomentValue {
    assert!(q >= 3, "moduli below 3 carry no primitive characters");
    assert_shift_domain(alpha, beta);
    let group = CharacterGroup::new(q);
    let half = Complex64::new(0.5, 0.0);
    let hv_alpha = HurwitzVector::new(half + alpha, q);
    let hv_beta = HurwitzVector::new(half + beta, q);
    let chars: Vec<_> = group
        .characters()
        .filter(|chi| {
            chi.is_primitive()
                && match parity {
                    ParityClass::Even => chi.is_even(),
                    ParityClass::Odd => chi.is_odd(),
                    ParityClass::AllPrimitive | ParityClass::AllCharacters => true,
                }
        })
        .collect();
    let terms: Vec<Complex64> = chars
        .par_iter()
        .map(|chi| {
            let l_alpha = dirichlet_l_with(chi, &hv_alpha)
                .expect("primitive characters have no pole");
            let l_beta = dirichlet_l_with(&chi.conjugate(), &hv_beta)
                .expect("primitive characters have no pole");
            l_alpha * l_beta
        })
        .collect();
    let value = terms.iter().sum();
    finish_moment(q, alpha, beta, parity, value, chars.len() as u64)
}

/// `Σ_{χ mod q} |L(1/2, χ)|²` over every character of the modulus. `q = 1`
/// and `q = 2` are allowed: their sole (principal) character contributes
/// `ζ(1/2)²` resp. `(1-2^{-1/2})² ζ(1/2)²`, which keeps the divisor
/// decomposition total.
pub fn moment_all_characters(q: u64) -> MomentValue {
    assert!(q >= 1);
    let group = CharacterGroup::new(q);
    let hv = HurwitzVector::new(Complex64::new(0.5, 0.0), q);
    let chars: Vec<_> = group.characters().collect();
    let terms: Vec<f64> = chars
        .par_iter()
        .map(|chi| {
            dirichlet_l_with(chi, &hv)
                .expect("s = 1/2 is off the pole")
                .norm_sqr()
        })
        .collect();
    let value = Complex64::new(terms.iter().sum(), 0.0);
    finish_moment(
        q,
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        ParityClass::AllCharacters,
        value,
        chars.len() as u64,
    )
}

fn finish_moment(
    q: u64,
    alpha: Complex64,
    beta: Complex64,
    parity: ParityClass,
    value: Complex64,
    character_count: u64,
) -> MomentValue {
    MomentValue {
        q,
        alpha,
        beta,
        parity,
        value,
        character_count,
        est_numeric_error: character_count as f64 * L_VALUE_ERROR_BUDGET * 2.0,
    }
}

// ---------------------------------------------------------------------------
// Divisor component of the all-characters mean square
// ---------------------------------------------------------------------------

/// The divisor component `T(k)` recovered from character moments:
/// `T(k) = Σ_{d|k} (d/φ(d)) Σ_{χ mod d} |L(1/2,χ)|²`, the inversion of
/// `Σ_{χ mod q}|L(1/2,χ)|² = (φ(q)/q) Σ_{k|q} μ(q/k) T(k)`.
pub fn divisor_component(k: u64) -> f64 {
    assert!(k >= 1);
    divisors(k)
        .into_iter()
        .map(|d| d as f64 / euler_phi(d) as f64 * moment_all_characters(d).value.re)
        .sum()
}

/// The same component summed as a divisor series,
/// `T(k) = 4√(k/2π) · Re Σ_{n≥1} d(n)/√n · K(2πn/k)`,
/// against a caller-provided kernel table (building one is expensive; share
/// it across many `k`).
///
/// Terms are accumulated in blocks of one oscillation period (`k`
/// consecutive `n`); the tail is cut only once the certified block envelope
/// puts the remainder below [`TSERIES_TAIL_TOL`] (at the series level,
/// before the `4√(k/2π)` prefactor). If that does not happen by
/// `x = 2πn/k = cutoff_x`, the sum is *not* silently truncated — it returns
/// [`KernelError::TailNotCertified`].
pub fn divisor_component_series_with(
    k: u64,
    cutoff_x: f64,
    table: &HbKernelTable,
) -> Result<f64, KernelError> {
    assert!(k >= 1);
    let kf = k as f64;
    let scale = 2.0 * PI / kf; // x = scale · n
    let prefactor = 4.0 * (kf / (2.0 * PI)).sqrt();
    let mut gate = TailGate::with_power(TSERIES_BLOCK_POWER);
    let mut total = Complex64::new(0.0, 0.0);
    let mut block = Complex64::new(0.0, 0.0);
    let mut last_block = f64::INFINITY;

    const SEGMENT: usize = 1 << 15;
    let mut counts = vec![0u16; SEGMENT];
    let mut seg_lo: u64 = 1;
    loop {
        fill_divisor_counts(seg_lo, &mut counts);
        for (i, &d) in counts.iter().enumerate() {
            let n = seg_lo + i as u64;
            let x = scale * n as f64;
            if x > cutoff_x {
                return Err(KernelError::TailNotCertified {
                    reached_x: x,
                    last_block,
                    target: TSERIES_TAIL_TOL,
                });
            }
            // e^{ix} evaluated from the exact rational phase 2π(n mod k)/k;
            // forming x first would smear the phase by ulp(x) per period.
            let phase = 2.0 * PI * ((n % k) as f64) / kf;
            block += d as f64 / (n as f64).sqrt() * table.kernel_with_phase(x, phase);
            if n % k == 0 {
                total += block;
                last_block = block.norm();
                gate.push(last_block, x);
                block = Complex64::new(0.0, 0.0);
                if gate.certified(x, TSERIES_TAIL_TOL) {
                    return Ok(prefactor * total.re);
                }
            }
        }
        seg_lo += SEGMENT as u64;
    }
}

/// [`divisor_component_series_with`] with a freshly built kernel table and
/// the default cap [`TSERIES_MAX_X`].
pub fn divisor_component_series(k: u64) -> Result<f64, KernelError> {
    divisor_component_series_with(k, TSERIES_MAX_X, &HbKernelTable::new())
}

/// Divisor-count sieve for the window `[lo, lo + out.len())`:
/// `out[i] = d(lo + i)`, by the `√n` divisor-pairing walk.
fn fill_divisor_counts(lo: u64, out: &mut [u16]) {
    out.fill(0);
    let hi = lo + out.len() as u64; // exclusive
    let mut j = 1u64;
    while j * j < hi {
        // n = j·m with m ≥ j: each such n below j² is someone else's pair.
        let start = lo.max(j * j);
        let mut n = start.div_ceil(j) * j;
        while n < hi {
            out[(n - lo) as usize] += if n == j * j { 1 } else { 2 };
            n += j;
        }
        j += 1;
    }
}

// ---------------------------------------------------------------------------
// Twisted moments
// ---------------------------------------------------------------------------

/// `S(p,h) = Σ*_{χ mod p} |L(1/2,χ)|² χ(h)` for prime `p` and `h` coprime
/// to `p` (negative `h` allowed; the twist only depends on `h mod p`).
/// Conjugate pairing `χ ↔ χ̄` makes the sum real; the imaginary residue is
/// checked against [`REALITY_TOL`] and discarded.
pub fn twisted_moment(p: u64, h: i64) -> f64 {
    assert!(is_prime(p), "twisted moments are defined over prime moduli");
    let hm = h.rem_euclid(p as i64) as u64;
    assert!(hm != 0, "twist must be coprime to the modulus");
    let group = CharacterGroup::new(p);
    let hv = HurwitzVector::new(Complex64::new(0.5, 0.0), p);
    let chars: Vec<_> = group.characters().filter(|chi| chi.is_primitive()).collect();
    let terms: Vec<Complex64> = chars
        .par_iter()
        .map(|chi| {
            let l2 = dirichlet_l_with(chi, &hv)
                .expect("s = 1/2 is off the pole")
                .norm_sqr();
            chi.eval(hm) * l2
        })
        .collect();
    let value: Complex64 = terms.iter().sum();
    assert!(
        value.im.abs() <= REALITY_TOL * (1.0 + value.re.abs()),
        "twisted moment should be real, got {value}"
    );
    value.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::phi_star;
    use crate::lfunc::ZETA_HALF;

    const C0: Complex64 = Complex64::new(0.0, 0.0);

    /// Central values of the two smallest primitive characters, frozen from
    /// the independent Hermite-integral oracle.
    const L_HALF_CHI5: f64 = 0.2317509475040157558833837;
    const L_HALF_CHI3: f64 = 0.4808675576968286261812201;
    /// `Σ over the two odd primitive characters mod 5 of |L(1/2,χ)|²`.
    const ODD_PAIR_MOD5: f64 = 1.26076906945632575495212;

    #[test]
    fn even_moment_mod5_is_the_quadratic_character_square() {
        let m = moment_even(5, C0, C0);
        assert_eq!(m.character_count, 1);
        let want = L_HALF_CHI5 * L_HALF_CHI5;
        assert!(
            (m.value.re - want).abs() < 1e-13,
            "got {}, want {want}",
            m.value.re
        );
        assert!(m.value.im.abs() < 1e-15);
        assert!(m.est_numeric_error <= 2.0 * L_VALUE_ERROR_BUDGET);
    }

    #[test]
    fn odd_moment_small_moduli() {
        let m3 = moment_odd(3, C0, C0);
        assert_eq!(m3.character_count, 1);
        assert!((m3.value.re - L_HALF_CHI3 * L_HALF_CHI3).abs() < 1e-13);

        let m5 = moment_odd(5, C0, C0);
        assert_eq!(m5.character_count, 2);
        assert!((m5.value.re - ODD_PAIR_MOD5).abs() < 1e-12);
    }

    #[test]
    fn parity_classes_partition_the_primitive_moment() {
        for q in [5u64, 12, 15, 40] {
            let even = moment_even(q, C0, C0);
            let odd = moment_odd(q, C0, C0);
            let all = moment_all_primitive(q, C0, C0);
            assert_eq!(
                even.character_count + odd.character_count,
                all.character_count
            );
            assert_eq!(all.character_count, phi_star(q));
            assert!((even.value + odd.value - all.value).norm() < 1e-12);
        }
    }

    #[test]
    fn shifted_moments_are_symmetric_in_the_shift_pair() {
        // χ ↔ χ̄ relabels the defining sum.
        let a = Complex64::new(0.02, 0.01);
        let b = Complex64::new(-0.01, 0.03);
        let m1 = moment_even(13, a, b);
        let m2 = moment_even(13, b, a);
        assert!((m1.value - m2.value).norm() < 1e-12 * m1.value.norm());
    }

    #[test]
    fn all_characters_moment_covers_degenerate_moduli() {
        let q1 = moment_all_characters(1);
        assert_eq!(q1.character_count, 1);
        assert!((q1.value.re - ZETA_HALF * ZETA_HALF).abs() < 1e-13);

        let q2 = moment_all_characters(2);
        let principal2 = (1.0 - 0.5f64.sqrt()) * ZETA_HALF;
        assert_eq!(q2.character_count, 1);
        assert!((q2.value.re - principal2 * principal2).abs() < 1e-13);

        let q3 = moment_all_characters(3);
        let principal3 = (1.0 - 1.0 / 3.0f64.sqrt()) * ZETA_HALF;
        let want = L_HALF_CHI3 * L_HALF_CHI3 + principal3 * principal3;
        assert_eq!(q3.character_count, 2);
        assert!((q3.value.re - want).abs() < 1e-13);
    }

    #[test]
    fn prime_all_characters_moment_splits_off_the_principal_term() {
        let p = 11u64;
        let all = moment_all_characters(p).value.re;
        let prim = moment_all_primitive(p, C0, C0).value.re;
        let principal = (1.0 - (p as f64).powf(-0.5)) * ZETA_HALF;
        assert!((all - prim - principal * principal).abs() < 1e-12);
    }

    #[test]
    fn divisor_component_small_values() {
        assert!((divisor_component(1) - ZETA_HALF * ZETA_HALF).abs() < 1e-13);
        // k = 2 by hand: ζ(1/2)² + 2·(1−2^{-1/2})² ζ(1/2)².
        let want2 = ZETA_HALF * ZETA_HALF
            + 2.0 * ((1.0 - 0.5f64.sqrt()) * ZETA_HALF).powi(2);
        assert!((divisor_component(2) - want2).abs() < 1e-13);
        // prime k: two divisors.
        let p = 7u64;
        let want_p = ZETA_HALF * ZETA_HALF
            + p as f64 / (p - 1) as f64 * moment_all_characters(p).value.re;
        assert!((divisor_component(p) - want_p).abs() < 1e-12);
    }

    #[test]
    fn divisor_component_inverts_back_to_the_moment() {
        use crate::arith::mobius;
        for q in [6u64, 12, 30] {
            let recovered: f64 = divisors(q)
                .into_iter()
                .map(|k| mobius(q / k) as f64 * divisor_component(k))
                .sum::<f64>()
                * euler_phi(q) as f64
                / q as f64;
            let direct = moment_all_characters(q).value.re;
            assert!(
                (recovered - direct).abs() < 1e-10 * direct.abs().max(1.0),
                "q={q}: {recovered} vs {direct}"
            );
        }
    }

    #[test]
    fn divisor_series_matches_recovery_route() {
        let table = HbKernelTable::new();
        for k in [1u64, 2, 5] {
            let series = divisor_component_series_with(k, TSERIES_MAX_X, &table)
                .expect("desk-scale k certifies well before the cap");
            let recovered = divisor_component(k);
            assert!(
                (series - recovered).abs() < 1e-4,
                "k={k}: series {series} vs recovered {recovered}"
            );
        }
        // A cap below the certification floor must refuse, not truncate.
        let err = divisor_component_series_with(3, 500.0, &table);
        assert!(matches!(err, Err(KernelError::TailNotCertified { .. })));
    }

    #[test]
    fn divisor_counts_sieve_agrees_with_direct_division() {
        let mut window = vec![0u16; 240];
        let lo = 9973u64;
        fill_divisor_counts(lo, &mut window);
        for (i, &d) in window.iter().enumerate() {
            let n = lo + i as u64;
            let direct = (1..=n).filter(|j| n % j == 0).count() as u16;
            assert_eq!(d, direct, "d({n})");
        }
    }

    #[test]
    fn twisted_moment_at_unit_twist_is_the_primitive_moment() {
        let s = twisted_moment(5, 1);
        let m = moment_all_primitive(5, C0, C0);
        assert!((s - m.value.re).abs() < 1e-13);
    }

    #[test]
    fn twisted_moments_sum_to_zero_over_a_full_residue_orbit() {
        // Σ_{h mod p} S(p,h) = Σ*_χ |L|² Σ_h χ(h) = 0: non-principal
        // characters kill the inner sum.
        let p = 7u64;
        let total: f64 = (1..p).map(|h| twisted_moment(p, h as i64)).sum();
        assert!(total.abs() < 1e-10, "orbit sum {total}");
    }

    #[test]
    fn twisted_moment_accepts_negative_twists() {
        let direct = twisted_moment(11, -3);
        let reduced = twisted_moment(11, 8);
        assert_eq!(direct, reduced);
    }

    #[test]
    #[should_panic(expected = "prime")]
    fn twisted_moment_rejects_composite_moduli() {
        twisted_moment(9, 2);
    }

    #[test]
    #[should_panic(expected = "coprime")]
    fn twisted_moment_rejects_divisible_twists() {
        twisted_moment(5, 10);
    }
}
