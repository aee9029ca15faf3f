//! Closed-form sides of the mean-square expansions.
//!
//! The brute-force moments in [`crate::moments`] are compared against the
//! expansions evaluated here:
//!
//! * [`main_even`] / [`main_even_limit`] — the leading bracket
//!   `φ*(q)/2 · (ζ_q(1+α+β) + X⁺(q,α,β) ζ_q(1−α−β))` of the shifted even
//!   moment, with a contour-Taylor path across the removable singularity at
//!   `α+β = 0`.
//! * [`secondary_even`] — the `√q`-scale correction: a sum over unitary
//!   splittings `q = c·d` of Gauss-sum-twisted restricted L-values.
//! * [`even_secondary`], [`odd_main`], [`odd_secondary`], [`allprim_main`],
//!   [`allprim_secondary`] — zero-shift forms for the even, odd, and combined
//!   primitive families.
//! * [`hb_main`] — the smooth expansion `k ln k + A k + B√k` of the divisor
//!   component of the all-characters mean square.
//! * [`reciprocity_rhs`] — the prime-twist reciprocity right side.
//! * [`error_budget`] — the four-term error diagnostic attached to the
//!   splitting-cut parameter `D`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{coprime_splittings, euler_phi, factorize, is_prime, mobius, phi_star};
use crate::characters::CharacterGroup;
use crate::kernels::x_plus;
use crate::lfunc::{gamma, l_restricted_with, riemann_zeta_deflated, HurwitzVector};
use crate::tolerances::{
    ERROR_BUDGET_EPSILON, MAIN_TERM_LIMIT_DOMAIN, MAIN_TERM_LIMIT_SWITCH, REALITY_TOL,
};

/// Linear coefficient `A = γ − ln 8π` of the divisor-component expansion;
/// equivalently `2γ − ln 2π + Γ'/Γ(1/2)`.
pub const HB_A: f64 = -2.646955762627703241788612;

/// Square-root coefficient `B = 2 ζ(1/2)²` of the divisor-component
/// expansion.
pub const HB_B: f64 = 4.265270582800979136592992;

/// Next-order coefficient `4π ζ(−1/2)²` of the `k^{−1/2}` correction to
/// [`hb_main`], obtained from the first kernel-transform pole below zero.
/// The constant term of the expansion vanishes: the transform has no pole at
/// `s = −1/2`. Verification probes use this as the reference decay.
pub const HB_C1: f64 = 0.543076849462126510483565;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Shifts are meant to be `O(1/ln q)`; enforce a generous box that keeps
/// every L-argument away from `s = 1` and every `Γ(1/2 − shift)` away from
/// its poles.
pub(crate) fn assert_shift_domain(alpha: Complex64, beta: Complex64) {
    assert!(
        alpha.re.abs() <= 0.4
            && beta.re.abs() <= 0.4
            && alpha.im.abs() <= 2.0
            && beta.im.abs() <= 2.0,
        "shifts out of supported domain |Re| <= 0.4, |Im| <= 2: alpha={alpha}, beta={beta}"
    );
}

/// `Π_{p|q} (1 − p^{−s})` — the finite Euler product that turns `ζ` into
/// `ζ_q`.
fn euler_product(q: u64, s: Complex64) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for (p, _) in factorize(q) {
        prod *= 1.0 - (-s * (p as f64).ln()).exp();
    }
    prod
}

/// `Σ_{p|q} ln p / (p−1)` — the prime-sum constant in the zero-shift main
/// terms.
fn prime_log_sum(q: u64) -> f64 {
    factorize(q)
        .into_iter()
        .map(|(p, _)| (p as f64).ln() / (p as f64 - 1.0))
        .sum()
}

// ---------------------------------------------------------------------------
// Leading (main) terms
// ---------------------------------------------------------------------------

/// Leading term of the shifted even moment:
/// `φ*(q)/2 · (ζ_q(1+α+β) + X⁺(q,α,β) ζ_q(1−α−β))`.
///
/// The two `ζ_q` poles at `α+β = 0` cancel; for `|α+β|` below the switch
/// tolerance this routes to [`main_even_limit`], which evaluates the
/// removable singularity stably. Panics outside the shift domain or for
/// `q < 3`.
pub fn main_even(q: u64, alpha: Complex64, beta: Complex64) -> Complex64 {
    assert!(q >= 3, "moduli below 3 carry no primitive characters");
    assert_shift_domain(alpha, beta);
    let u = alpha + beta;
    if u.norm() < MAIN_TERM_LIMIT_SWITCH {
        return main_even_limit(q, alpha, beta);
    }
    // ζ_q(1±u) assembled from the deflated zeta and an exact ±1/u: forming
    // the argument 1±u first and letting the zeta code recover the pole
    // distance from it would round away the low bits of u (ulp(1) is 2⁻⁵²)
    // and poison the reflected pair's cancellation for small |u|.
    let zp = euler_product(q, 1.0 + u) * (riemann_zeta_deflated(1.0 + u) + 1.0 / u);
    let zm = euler_product(q, 1.0 - u) * (riemann_zeta_deflated(1.0 - u) - 1.0 / u);
    0.5 * phi_star(q) as f64 * (zp + x_plus(q, alpha, beta) * zm)
}

/// [`main_even`] across the removable singularity at `α+β = 0`.
///
/// With `u = α+β` and `ν = α−β` held fixed, the bracket equals `N(u)/u` for
/// the entire function
/// `N(u) = A(u)P(1+u) − g(u)A(−u)P(1−u)` with `A(u) = u ζ(1+u)`,
/// `P(s) = Π_{p|q}(1−p^{−s})`, and `g(u) = X⁺` along the fixed-`ν` line;
/// `N(0) = 0` because `g(0) = 1`. The quotient's Taylor coefficients come
/// from a 64-node contour on `|w| = 1/4`, giving machine-precision values
/// for `|u| <` [`MAIN_TERM_LIMIT_DOMAIN`] (asserted). At `α = β = 0` this
/// reproduces the zero-shift closed form
/// `φ*(q)/2 · (φ(q)/q)(ln(q/2π) + 2γ + Γ'/Γ(1/2) − π/2 + 2Σ_{p|q} ln p/(p−1))`.
pub fn main_even_limit(q: u64, alpha: Complex64, beta: Complex64) -> Complex64 {
    assert!(q >= 3, "moduli below 3 carry no primitive characters");
    assert_shift_domain(alpha, beta);
    let u = alpha + beta;
    let nu = alpha - beta;
    assert!(
        u.norm() < MAIN_TERM_LIMIT_DOMAIN,
        "limit path wants |α+β| < {MAIN_TERM_LIMIT_DOMAIN}, got {}",
        u.norm()
    );

    // A(w) = w ζ(1+w) = w ζ*(1+w) + 1 is entire (ζ* is the deflated zeta).
    let entire_a = |w: Complex64| w * riemann_zeta_deflated(1.0 + w) + 1.0;
    let n_of = |w: Complex64| {
        let g = x_plus(q, (w + nu) / 2.0, (w - nu) / 2.0);
        entire_a(w) * euler_product(q, 1.0 + w)
            - g * entire_a(-w) * euler_product(q, 1.0 - w)
    };

    const RADIUS: f64 = 0.25;
    const NODES: usize = 64;
    const TERMS: usize = 8;
    let samples: Vec<Complex64> = (0..NODES)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / NODES as f64;
            n_of(Complex64::from_polar(RADIUS, theta))
        })
        .collect();
    let coeff = |k: usize| -> Complex64 {
        let mut acc = ZERO;
        for (j, nj) in samples.iter().enumerate() {
            let theta = 2.0 * PI * (j * k % NODES) as f64 / NODES as f64;
            acc += nj * Complex64::from_polar(1.0, -theta);
        }
        acc / (NODES as f64 * RADIUS.powi(k as i32))
    };
    // The k = 0 coefficient is N(0) = 0; its numerical size gauges contour
    // error.
    debug_assert!(
        coeff(0).norm() <= 1e-10 * (1.0 + coeff(1).norm()),
        "removable singularity check failed"
    );
    let mut bracket = coeff(TERMS);
    for k in (1..TERMS).rev() {
        bracket = bracket * u + coeff(k);
    }
    0.5 * phi_star(q) as f64 * bracket
}

/// Zero-shift main term of the odd-family moment: same bracket as the even
/// family with the `−π/2` replaced by `+π/2`.
pub fn odd_main(q: u64) -> f64 {
    assert!(q >= 3, "moduli below 3 carry no primitive characters");
    zero_shift_main_bracket(q, 0.5 * PI) * 0.5 * phi_star(q) as f64
}

/// Zero-shift main term over all primitive characters:
/// `φ*(q) (φ(q)/q)(ln(q/2π) + 2γ + Γ'/Γ(1/2) + 2Σ_{p|q} ln p/(p−1))` —
/// the `±π/2` of the even/odd halves cancels.
pub fn allprim_main(q: u64) -> f64 {
    assert!(q >= 3, "moduli below 3 carry no primitive characters");
    zero_shift_main_bracket(q, 0.0) * phi_star(q) as f64
}

/// `(φ(q)/q)(ln(q/2π) + 2γ + Γ'/Γ(1/2) + half_pi_term + 2Σ_{p|q} ln p/(p−1))`.
fn zero_shift_main_bracket(q: u64, half_pi_term: f64) -> f64 {
    use crate::lfunc::{DIGAMMA_HALF, EULER_GAMMA};
    let qf = q as f64;
    euler_phi(q) as f64 / qf
        * ((qf / (2.0 * PI)).ln()
            + 2.0 * EULER_GAMMA
            + DIGAMMA_HALF
            + half_pi_term
            + 2.0 * prime_log_sum(q))
}

// ---------------------------------------------------------------------------
// Secondary (√q-scale) terms
// ---------------------------------------------------------------------------

/// Secondary term of the shifted even moment:
///
/// `2 (φ(q)/q) Σ_{cd=q, (c,d)=1} μ²(c)/φ(c) · 1/φ(m) Σ_{ψ even mod m}
///  τ(ψ̄) ψ̄(M) [ Γ(1/2−β)cos(π/2(1/2−β)) (q/2π)^{1/2−β}
///  L_q(1/2+α,ψ) L_q(1/2−β,ψ)  +  (α ↔ β) ]`
///
/// with `m = min{c,d}`, `M = max{c,d}`; `ψ` runs over **all** even
/// characters mod `m` including the principal one (`ψ` mod 1 contributes
/// `τ = 1`, `L_q = ζ_q`). At `α = β = 0` this reduces to
/// [`even_secondary`].
pub fn secondary_even(q: u64, alpha: Complex64, beta: Complex64) -> Complex64 {
    assert!(q >= 3, "moduli below 3 carry no primitive characters");
    assert_shift_domain(alpha, beta);
    let qf = q as f64;
    let half = Complex64::new(0.5, 0.0);
    // Γ(1/2−shift) cos(π/2 (1/2−shift)) (q/2π)^{1/2−shift}
    let gamma_factor = |shift: Complex64| -> Complex64 {
        gamma(half - shift)
            * (PI / 2.0 * (half - shift)).cos()
            * ((half - shift) * (qf / (2.0 * PI)).ln()).exp()
    };
    let g_beta = gamma_factor(beta);
    let g_alpha = gamma_factor(alpha);
    let s_points = [half + alpha, half - beta, half - alpha, half + beta];

    let mut total = ZERO;
    for (c, d) in coprime_splittings(q) {
        if c >= d {
            continue; // one pass per unordered splitting {m, M}
        }
        let (m, big) = (c, d);
        // Even ψ cannot see the sign of the twist argument, so the two
        // ordered splittings (m,M) and (M,m) share the inner sum and only
        // their squarefree weights differ.
        let weight = squarefree_weight(m) + squarefree_weight(big);
        if weight == 0.0 {
            continue;
        }
        let group = CharacterGroup::new(m);
        let hvs: Vec<HurwitzVector> =
            s_points.iter().map(|&s| HurwitzVector::new(s, m)).collect();
        let mut inner = ZERO;
        for psi in group.characters().filter(|psi| psi.is_even()) {
            let psi_bar = psi.conjugate();
            let tau_bar = psi_bar.gauss_sum();
            let twist = psi_bar.eval(big);
            let l: Vec<Complex64> = hvs
                .iter()
                .map(|hv| {
                    l_restricted_with(&psi, q, hv)
                        .expect("shift domain keeps L-arguments off the pole")
                })
                .collect();
            inner += tau_bar * twist * (g_beta * l[0] * l[1] + g_alpha * l[2] * l[3]);
        }
        total += weight / euler_phi(m) as f64 * inner;
    }
    2.0 * (euler_phi(q) as f64 / qf) * total
}

/// `μ²(n)/φ(n)`.
fn squarefree_weight(n: u64) -> f64 {
    if mobius(n) == 0 {
        0.0
    } else {
        1.0 / euler_phi(n) as f64
    }
}

/// Zero-shift secondary term of the even-family moment:
/// `2 (φ(q)/√q) Σ_{cd=q,(c,d)=1} μ²(c)/φ(c) · 1/φ(m) Σ_{ψ even mod m}
///  τ(ψ̄) ψ̄(M) L_q(1/2,ψ)²`.
pub fn even_secondary(q: u64) -> f64 {
    parity_secondary(q, true, false)
}

/// Zero-shift secondary term of the odd-family moment: the odd-character
/// sum carries a factor `−i` and twists by `ψ̄(−d)` or `ψ̄(c)` according to
/// which side of the splitting is larger:
/// `2 (φ(q)/√q) Σ_{cd=q,(c,d)=1} μ²(c)/φ(c) · 1/φ(m) Σ_{ψ odd mod m}
///  (−i) τ(ψ̄) (δ_{c<d} ψ̄(−d) + δ_{c>d} ψ̄(c)) L_q(1/2,ψ)²`.
pub fn odd_secondary(q: u64) -> f64 {
    parity_secondary(q, false, true)
}

/// Zero-shift secondary term over all primitive characters: the even and
/// odd sums combined, each odd `ψ` weighted by `−i`.
pub fn allprim_secondary(q: u64) -> f64 {
    parity_secondary(q, true, true)
}

/// Shared core of the zero-shift secondary terms. Each unordered splitting
/// `{m, M}` of `q` contributes
/// `Σ_ψ i(ψ) τ(ψ̄) (w⁻ ψ̄(−M) + w⁺ ψ̄(M)) L_q(1/2,ψ)² / φ(m)` where
/// `w⁻ = μ²(m)/φ(m)` comes from the ordered splitting `(c,d) = (m,M)` and
/// `w⁺ = μ²(M)/φ(M)` from `(M,m)`; `i(ψ) = 1` for even `ψ`, `−i` for odd.
/// Conjugate pairing `ψ ↔ ψ̄` makes the result real; the imaginary residue
/// is checked against [`REALITY_TOL`].
fn parity_secondary(q: u64, include_even: bool, include_odd: bool) -> f64 {
    assert!(q >= 3, "moduli below 3 carry no primitive characters");
    let qf = q as f64;
    let half = Complex64::new(0.5, 0.0);
    let mut total = ZERO;
    for (c, d) in coprime_splittings(q) {
        if c >= d {
            continue;
        }
        let (m, big) = (c, d);
        let w_minus = squarefree_weight(m);
        let w_plus = squarefree_weight(big);
        if w_minus == 0.0 && w_plus == 0.0 {
            continue;
        }
        let group = CharacterGroup::new(m);
        let hv = HurwitzVector::new(half, m);
        let neg_big = (m - big % m) % m; // −M mod m
        let mut inner = ZERO;
        for psi in group.characters() {
            let even = psi.is_even();
            if (even && !include_even) || (!even && !include_odd) {
                continue;
            }
            let psi_bar = psi.conjugate();
            let tau_bar = psi_bar.gauss_sum();
            let twist = w_minus * psi_bar.eval(neg_big) + w_plus * psi_bar.eval(big);
            let parity_weight = if even {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0)
            };
            let l = l_restricted_with(&psi, q, &hv)
                .expect("s = 1/2 is off the pole");
            inner += parity_weight * tau_bar * twist * l * l;
        }
        total += inner / euler_phi(m) as f64;
    }
    let value = 2.0 * euler_phi(q) as f64 / qf.sqrt() * total;
    debug_assert!(
        value.im.abs() <= REALITY_TOL * (1.0 + value.re.abs()),
        "conjugate pairing should make the secondary term real, got {value}"
    );
    value.re
}

// ---------------------------------------------------------------------------
// Divisor-component expansion and prime-twist reciprocity
// ---------------------------------------------------------------------------

/// Smooth expansion `k ln k + A k + B √k` of the divisor component of the
/// all-characters mean square (see `moments::divisor_component`); the next
/// correction decays like [`HB_C1`]`/√k`.
pub fn hb_main(k: u64) -> f64 {
    assert!(k >= 1);
    let kf = k as f64;
    kf * kf.ln() + HB_A * kf + HB_B * kf.sqrt()
}

/// Right side of the prime-twist reciprocity: for primes `h < p` and
/// `s_h_minus_p` the companion twisted moment over characters mod `h` with
/// twist `−p`, returns
/// `√(p/h)·s_h_minus_p + (p/√h)(ln(p/h) + A) + (B/2)√p`.
///
/// The comparison against the direct twisted moment mod `p` is meaningful
/// for `h` up to about `p^{2/3}`; beyond that the neglected terms catch up
/// (see [`reciprocity_error_scale`]).
pub fn reciprocity_rhs(p: u64, h: u64, s_h_minus_p: f64) -> f64 {
    assert!(is_prime(p) && is_prime(h), "reciprocity wants prime p and h");
    assert!(0 < h && h < p, "reciprocity wants h < p");
    let (pf, hf) = (p as f64, h as f64);
    (pf / hf).sqrt() * s_h_minus_p
        + pf / hf.sqrt() * ((pf / hf).ln() + HB_A)
        + 0.5 * HB_B * pf.sqrt()
}

/// Size scale `h + ln p + √(p/h) ln p` of the terms the reciprocity right
/// side drops; residuals are reported relative to this envelope.
pub fn reciprocity_error_scale(p: u64, h: u64) -> f64 {
    let (pf, hf) = (p as f64, h as f64);
    hf + pf.ln() + (pf / hf).sqrt() * pf.ln()
}

// ---------------------------------------------------------------------------
// Error budget
// ---------------------------------------------------------------------------

/// Four-term error diagnostic of the splitting expansion at cut `D`:
/// `(1/q) Σ_{d|q, d≤D} φ(d) d^{3/2} + √q Σ_{d|q, d>D} φ(d)/d^{3/2} + q^ε +
/// q^{ε−1} D²`, with all O-constants set to 1. A scale, not a bound.
pub fn error_budget(q: u64, d_cut: u64, epsilon: f64) -> f64 {
    assert!(q >= 1 && (1..=q).contains(&d_cut), "need 1 <= D <= q");
    let qf = q as f64;
    let mut small = 0.0;
    let mut large = 0.0;
    for d in crate::arith::divisors(q) {
        let df = d as f64;
        let phi = euler_phi(d) as f64;
        if d <= d_cut {
            small += phi * df.powf(1.5);
        } else {
            large += phi / df.powf(1.5);
        }
    }
    small / qf + qf.sqrt() * large + qf.powf(epsilon) + qf.powf(epsilon - 1.0) * (d_cut as f64).powi(2)
}

/// The cut `D = ⌊√q⌋` that balances the two divisor sums; with it the
/// budget is of order `q^{1/4} d(q)`.
pub fn default_cut(q: u64) -> u64 {
    ((q as f64).sqrt().floor() as u64).max(1)
}

/// One evaluation of the even-family expansion with its error diagnostic.
#[derive(Debug, Clone)]
pub struct MainTermBreakdown {
    pub q: u64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// The `φ*(q)/2` bracket.
    pub leading: Complex64,
    /// The `√q`-scale splitting sum.
    pub secondary: Complex64,
    /// [`error_budget`] at the stored cut and ε = [`ERROR_BUDGET_EPSILON`].
    pub error_budget: f64,
    pub d_cut: u64,
}

impl MainTermBreakdown {
    pub fn compute(q: u64, alpha: Complex64, beta: Complex64, d_cut: u64) -> Self {
        let leading = main_even(q, alpha, beta);
        debug_assert!(leading.re.is_finite() && leading.im.is_finite());
        MainTermBreakdown {
            q,
            alpha,
            beta,
            leading,
            secondary: secondary_even(q, alpha, beta),
            error_budget: error_budget(q, d_cut, ERROR_BUDGET_EPSILON),
            d_cut,
        }
    }
}
