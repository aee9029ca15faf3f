//! Elementary multiplicative number theory on `u64`.
//!
//! Everything here is exact integer arithmetic: factorization by trial
//! division (the crate operates at desk scale, `q ≤ ~10^6`), divisor
//! enumeration, Euler phi, Möbius, the primitive-character count `φ*`, and
//! the unitary (coprime) factorizations `q = c·d` that index the secondary
//! terms of the moment asymptotics.

use num_integer::Integer;

/// Prime factorization as `(prime, exponent)` pairs, primes ascending.
///
/// `factorize(1)` is empty. Panics on `n = 0`.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize(0) is undefined");
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors of `n`, sorted ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Number of divisors `d(n)`.
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Euler's totient `φ(n)`.
pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factorize(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// Möbius function `μ(n)`: 0 if `n` has a squared factor, else `(-1)^ω(n)`.
pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of primitive Dirichlet characters mod `q`:
/// `φ*(q) = Σ_{d|q} φ(d) μ(q/d)`.
///
/// Multiplicative, with `φ*(p) = p - 2` and `φ*(p^e) = p^{e-2}(p-1)^2` for
/// `e ≥ 2`; in particular `φ*(2) = 0` (there is no primitive character mod 2)
/// and the result is always nonnegative.
pub fn phi_star(q: u64) -> u64 {
    let mut sum: i64 = 0;
    for d in divisors(q) {
        sum += euler_phi(d) as i64 * mobius(q / d);
    }
    debug_assert!(sum >= 0);
    sum as u64
}

/// Unitary factorizations `q = c·d` with `gcd(c,d) = 1`, sorted by `d`
/// ascending. There are `2^ω(q)` of them; `(q,1)` comes first and `(1,q)`
/// last.
pub fn coprime_splittings(q: u64) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = divisors(q)
        .into_iter()
        .filter(|&d| (q / d).gcd(&d) == 1)
        .map(|d| (q / d, d))
        .collect();
    out.sort_unstable_by_key(|&(_, d)| d);
    out
}

/// Inverse of `a` modulo `m > 0`, or `None` if `gcd(a, m) > 1`.
///
/// `mod_inverse(x, 1) = Some(0)` for every `x`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    assert!(m > 0, "modulus must be positive");
    if m == 1 {
        return Some(0);
    }
    // Extended Euclid on (a mod m, m) tracking the first Bézout coefficient.
    let (mut r0, mut r1) = ((a % m) as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Deterministic primality test (trial division; ample at desk scale).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// All primes in the inclusive range `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Greatest common divisor (re-export of the workhorse used throughout).
pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
