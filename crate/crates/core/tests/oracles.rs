//! Cross-checks of the library's analytic building blocks against the
//! test-side Hermite-integral oracle in `common`, which shares no code or
//! method with the implementation.

mod common;

use common::{hurwitz_oracle, hurwitz_oracle_real};
use lmoment::characters::CharacterGroup;
use lmoment::lfunc::{
    dirichlet_l, hurwitz_zeta, hurwitz_zeta_deflated, zeta_q, HurwitzVector, ZETA_HALF,
    ZETA_NEG_HALF,
};
use lmoment::Complex64;
use std::f64::consts::PI;

const CROSS_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Evaluation points spanning what the moment computations actually use:
/// the central point, shifted central points (real, imaginary, mixed), and
/// a couple of off-line values.
fn probe_points() -> Vec<Complex64> {
    vec![
        c(0.5, 0.0),
        c(0.52, 0.0),
        c(0.48, -0.01),
        c(0.5, 0.02),
        c(0.5, -1.5),
        c(2.0, 0.0),
        c(1.25, 0.75),
        c(-0.5, 0.0),
    ]
}

#[test]
fn oracle_reproduces_frozen_zeta_values() {
    assert!((hurwitz_oracle_real(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-13);
    assert!((hurwitz_oracle_real(0.5, 1.0) - ZETA_HALF).abs() < 1e-13);
    assert!((hurwitz_oracle_real(-0.5, 1.0) - ZETA_NEG_HALF).abs() < 1e-13);
    // ζ(2, 1/2) = π²/2: the even-index tail of ζ(2).
    assert!((hurwitz_oracle_real(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-13);
}

#[test]
fn library_hurwitz_matches_the_integral_route() {
    let fractions: Vec<f64> = (1..=7)
        .map(|a| a as f64 / 7.0)
        .chain([1.0 / 3.0, 0.5, 0.05])
        .collect();
    for s in probe_points() {
        for &a in &fractions {
            let lib = hurwitz_zeta(s, a).unwrap();
            let orc = hurwitz_oracle(s, a);
            assert!(
                (lib - orc).norm() < CROSS_TOL,
                "s={s} a={a}: {lib} vs {orc}"
            );
        }
    }
}

#[test]
fn deflation_removes_exactly_the_pole_term() {
    // Just off the pole the deflated value must equal the full value minus
    // 1/(s-1), even though the two routes organize the cancellation very
    // differently.
    for eps in [1e-4, -2e-4] {
        let s = c(1.0 + eps, 0.0);
        for a in [0.3, 0.85] {
            let lib = hurwitz_zeta_deflated(s, a).unwrap();
            let orc = hurwitz_oracle(s, a) - 1.0 / (s - 1.0);
            assert!(
                (lib - orc).norm() < 1e-10,
                "s={s} a={a}: {lib} vs {orc}"
            );
        }
    }
}

#[test]
fn hurwitz_vectors_agree_with_the_oracle() {
    let s = c(0.5, 0.01);
    let q = 12u64;
    let hv = HurwitzVector::new(s, q);
    for a in 1..=q {
        let orc = hurwitz_oracle(s, a as f64 / q as f64) - 1.0 / (s - 1.0);
        assert!((hv.value(a) - orc).norm() < CROSS_TOL, "a={a}");
    }
}

#[test]
fn l_values_match_oracle_built_character_sums() {
    // L(s,χ) = q^{-s} Σ_a χ(a) ζ(s, a/q) for non-principal χ (the character
    // sum kills the pole term, so the full oracle values can be used).
    for q in [7u64, 12] {
        let group = CharacterGroup::new(q);
        for s in [c(0.5, 0.0), c(0.5, 0.35), c(0.52, -0.01)] {
            for chi in group.characters().filter(|x| !x.is_principal()) {
                let lib = dirichlet_l(s, &chi).unwrap();
                let mut sum = Complex64::new(0.0, 0.0);
                for a in 1..=q {
                    let w = chi.eval(a);
                    if w.norm() > 0.0 {
                        sum += w * hurwitz_oracle(s, a as f64 / q as f64);
                    }
                }
                let orc = (-s * (q as f64).ln()).exp() * sum;
                assert!(
                    (lib - orc).norm() < CROSS_TOL,
                    "q={q} s={s} chi={:?}: {lib} vs {orc}",
                    chi.label()
                );
            }
        }
    }
}

#[test]
fn restricted_zeta_matches_oracle_euler_products() {
    // ζ_q(s) = ζ(s) Π_{p|q} (1 - p^{-s}) with ζ from the integral route.
    for q in [5u64, 12, 30] {
        for s in [c(0.5, 0.0), c(1.5, 0.0), c(0.5, 0.6)] {
            let lib = zeta_q(s, q).unwrap();
            let mut orc = hurwitz_oracle(s, 1.0);
            for (p, _) in lmoment::arith::factorize(q) {
                orc *= 1.0 - (-s * (p as f64).ln()).exp();
            }
            assert!((lib - orc).norm() < CROSS_TOL, "q={q} s={s}");
        }
    }
}
