//! Dirichlet characters mod `q` via the cyclic decomposition of `(Z/qZ)^*`.
//!
//! The unit group splits into cyclic components: one per odd prime power
//! `p^e || q` (generated by a lifted primitive root), and for the 2-part
//! either nothing (`2^1`), a single order-2 component (`2^2`), or the pair
//! `⟨-1⟩ × ⟨5⟩` (`2^e`, `e ≥ 3`). Each component carries a precomputed
//! discrete-log table, so a character is just a vector of exponents (its
//! *label*) and evaluation is a weighted sum of logs modulo the group
//! exponent `E`. Character values are read off a shared table of the `E`-th
//! roots of unity.
//!
//! The module also provides conductors (hence primitivity), Gauss sums with
//! exact rational phase reduction, and the closed divisor-sum forms of the
//! orthogonality relations for primitive and even-primitive character pairs.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use std::f64::consts::PI;

use crate::arith;

/// Sentinel in discrete-log tables marking residues not coprime to the
/// component modulus.
pub const NO_LOG: u64 = u64::MAX;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r: u128 = 1;
    let mm = m as u128;
    let mut bb = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % mm;
        }
        bb = bb * bb % mm;
        e >>= 1;
    }
    let _ = &mut b;
    r as u64
}

/// Smallest primitive root mod an odd prime `p`.
fn primitive_root_mod_p(p: u64) -> u64 {
    let prime_factors: Vec<u64> = arith::factorize(p - 1).into_iter().map(|(r, _)| r).collect();
    (2..p)
        .find(|&g| prime_factors.iter().all(|&r| pow_mod(g, (p - 1) / r, p) != 1))
        .expect("every odd prime has a primitive root")
}

/// One cyclic factor of the unit group, with its discrete-log table indexed
/// by residue mod `modulus` (entries `NO_LOG` off the unit group).
struct Component {
    modulus: u64,
    order: u64,
    dlog: Vec<u64>,
}

impl Component {
    fn odd_prime_power(p: u64, e: u32) -> Self {
        let m = p.pow(e);
        let g0 = primitive_root_mod_p(p);
        // Lift to a generator mod p^e: g stays primitive for all e unless
        // g^{p-1} ≡ 1 (mod p²), in which case g+p works.
        let g = if pow_mod(g0, p - 1, p * p) == 1 { g0 + p } else { g0 };
        let order = m / p * (p - 1);
        let mut dlog = vec![NO_LOG; m as usize];
        let mut x: u64 = 1;
        for j in 0..order {
            debug_assert_eq!(dlog[x as usize], NO_LOG);
            dlog[x as usize] = j;
            x = (x as u128 * g as u128 % m as u128) as u64;
        }
        debug_assert_eq!(x, 1, "generator order mismatch for {p}^{e}");
        Component { modulus: m, order, dlog }
    }

    fn four() -> Self {
        Component { modulus: 4, order: 2, dlog: vec![NO_LOG, 0, NO_LOG, 1] }
    }

    /// Sign part of `(Z/2^e)^* = ⟨-1⟩ × ⟨5⟩` for `e ≥ 3`.
    fn two_sign(e: u32) -> Self {
        let m = 2u64.pow(e);
        let mut dlog = vec![NO_LOG; m as usize];
        for a in (1..m).step_by(2) {
            dlog[a as usize] = if a % 4 == 1 { 0 } else { 1 };
        }
        Component { modulus: m, order: 2, dlog }
    }

    /// `⟨5⟩` part of `(Z/2^e)^*` for `e ≥ 3`: the log of `a` is the log of
    /// whichever of `a`, `2^e - a` lies in `⟨5⟩` (i.e. is `≡ 1 mod 4`).
    fn two_five(e: u32) -> Self {
        let m = 2u64.pow(e);
        let order = m / 4;
        let mut five_log = vec![NO_LOG; m as usize];
        let mut x: u64 = 1;
        for j in 0..order {
            five_log[x as usize] = j;
            x = x * 5 % m;
        }
        debug_assert_eq!(x, 1);
        let mut dlog = vec![NO_LOG; m as usize];
        for a in (1..m).step_by(2) {
            let rep = if a % 4 == 1 { a } else { m - a };
            dlog[a as usize] = five_log[rep as usize];
            debug_assert_ne!(dlog[a as usize], NO_LOG);
        }
        Component { modulus: m, order, dlog }
    }
}

/// The full character group mod `q`, ready to mint [`DirichletCharacter`]s.
pub struct CharacterGroup {
    q: u64,
    phi: u64,
    /// Group exponent `E` = lcm of the component orders.
    exponent: u64,
    components: Vec<Component>,
    /// `roots[t] = e^{2πi t / E}`.
    roots: Vec<Complex64>,
}

impl CharacterGroup {
    /// Build the group for modulus `q ≥ 1` (components in ascending-prime
    /// order; the 2-part contributes its sign component before its `⟨5⟩`
    /// component).
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let mut components = Vec::new();
        for (p, e) in arith::factorize(q) {
            if p == 2 {
                match e {
                    1 => {}
                    2 => components.push(Component::four()),
                    _ => {
                        components.push(Component::two_sign(e));
                        components.push(Component::two_five(e));
                    }
                }
            } else {
                components.push(Component::odd_prime_power(p, e));
            }
        }
        let phi: u64 = components.iter().map(|c| c.order).product();
        let exponent = components.iter().fold(1u64, |acc, c| acc.lcm(&c.order));
        let roots = (0..exponent)
            .map(|t| {
                let ang = 2.0 * PI * t as f64 / exponent as f64;
                Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        debug_assert_eq!(phi, arith::euler_phi(q));
        CharacterGroup { q, phi, exponent, components, roots }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    /// Exponent `E` of the group (every character value is an `E`-th root of
    /// unity).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Orders of the cyclic components (the shape of a valid label).
    pub fn component_orders(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.order).collect()
    }

    /// `e^{2πi t/E}` from the shared root table (`t < E`); the value of any
    /// character of the group at exponent `t`.
    pub fn root(&self, t: u64) -> Complex64 {
        self.roots[t as usize]
    }

    /// The character with the given label (one exponent per component,
    /// `label[i] < order_i`). Panics on malformed labels.
    pub fn character(&self, label: &[u64]) -> DirichletCharacter<'_> {
        assert_eq!(label.len(), self.components.len(), "label length mismatch");
        for (k, c) in label.iter().zip(&self.components) {
            assert!(*k < c.order, "label entry {k} out of range for order {}", c.order);
        }
        let e = self.exponent;
        let weights: Vec<u64> = label
            .iter()
            .zip(&self.components)
            .map(|(&k, c)| (k as u128 * (e / c.order) as u128 % e as u128) as u64)
            .collect();
        let mut chi = DirichletCharacter {
            group: self,
            label: label.to_vec(),
            weights,
            even: true,
            conductor: 1,
        };
        chi.even = if self.q <= 2 {
            true
        } else {
            let t = chi.exponent_at(self.q - 1).expect("-1 is a unit");
            debug_assert!(t == 0 || 2 * t == e);
            t == 0
        };
        chi.conductor = chi.compute_conductor();
        chi
    }

    /// The principal character (all-zero label).
    pub fn principal(&self) -> DirichletCharacter<'_> {
        self.character(&vec![0; self.components.len()])
    }

    /// All `φ(q)` characters in lexicographic label order (last component
    /// varies fastest).
    pub fn characters(&self) -> Characters<'_> {
        Characters { group: self, next: Some(vec![0; self.components.len()]) }
    }
}

/// Iterator over all characters of a group in lexicographic label order.
pub struct Characters<'g> {
    group: &'g CharacterGroup,
    next: Option<Vec<u64>>,
}

impl<'g> Iterator for Characters<'g> {
    type Item = DirichletCharacter<'g>;

    fn next(&mut self) -> Option<Self::Item> {
        let label = self.next.take()?;
        let item = self.group.character(&label);
        let mut lab = label;
        for i in (0..lab.len()).rev() {
            lab[i] += 1;
            if lab[i] < self.group.components[i].order {
                self.next = Some(lab);
                return Some(item);
            }
            lab[i] = 0;
        }
        // Odometer wrapped (or the label is empty): this was the last one.
        Some(item)
    }
}

/// A Dirichlet character mod `q`, tied to its [`CharacterGroup`].
pub struct DirichletCharacter<'g> {
    group: &'g CharacterGroup,
    label: Vec<u64>,
    /// Per-component weights `k_i · E / N_i mod E`, so that the value
    /// exponent of `a` is `Σ_i w_i · log_i(a) mod E`.
    weights: Vec<u64>,
    even: bool,
    conductor: u64,
}

impl<'g> DirichletCharacter<'g> {
    pub fn q(&self) -> u64 {
        self.group.q
    }

    pub fn group(&self) -> &'g CharacterGroup {
        self.group
    }

    pub fn label(&self) -> &[u64] {
        &self.label
    }

    fn exponent_at(&self, a: u64) -> Option<u64> {
        let q = self.group.q;
        let a = a % q;
        if a.gcd(&q) != 1 {
            return None;
        }
        let e = self.group.exponent as u128;
        let mut t: u128 = 0;
        for (comp, &w) in self.group.components.iter().zip(&self.weights) {
            let l = comp.dlog[(a % comp.modulus) as usize];
            debug_assert_ne!(l, NO_LOG);
            t = (t + w as u128 * l as u128) % e;
        }
        Some(t as u64)
    }

    /// Exponent `t ∈ [0, E)` with `χ(a) = e^{2πi t/E}`, or `None` when
    /// `gcd(a, q) > 1` (where `χ(a) = 0`).
    pub fn eval_exponent(&self, a: u64) -> Option<u64> {
        self.exponent_at(a)
    }

    /// `χ(a)` as a complex number (`0` off the unit group).
    pub fn eval(&self, a: u64) -> Complex64 {
        match self.exponent_at(a) {
            Some(t) => self.group.roots[t as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Value exponents for all residues `0..q` in one pass; entries are
    /// [`NO_LOG`] where `χ` vanishes. Hot-loop companion of
    /// [`Self::eval_exponent`].
    pub fn exponent_table(&self) -> Vec<u64> {
        (0..self.group.q)
            .map(|a| self.exponent_at(a).unwrap_or(NO_LOG))
            .collect()
    }

    pub fn is_principal(&self) -> bool {
        self.label.iter().all(|&k| k == 0)
    }

    /// `χ(-1) = 1`?
    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn is_odd(&self) -> bool {
        !self.even
    }

    /// `χ(-1)` as `±1`.
    pub fn sign(&self) -> f64 {
        if self.even {
            1.0
        } else {
            -1.0
        }
    }

    /// Conductor: the smallest `f | q` such that `χ(a) = 1` whenever
    /// `a ≡ 1 (mod f)` and `gcd(a, q) = 1`.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    fn compute_conductor(&self) -> u64 {
        let q = self.group.q;
        'next_f: for f in arith::divisors(q) {
            let mut a = 1 + f;
            while a <= q {
                if a.gcd(&q) == 1 && self.exponent_at(a) != Some(0) {
                    continue 'next_f;
                }
                a += f;
            }
            return f;
        }
        unreachable!("f = q always passes")
    }

    /// Primitive iff the conductor equals the modulus.
    pub fn is_primitive(&self) -> bool {
        self.conductor == self.group.q
    }

    /// The complex-conjugate character `χ̄` (labels negated componentwise).
    pub fn conjugate(&self) -> DirichletCharacter<'g> {
        let conj_label: Vec<u64> = self
            .label
            .iter()
            .zip(&self.group.components)
            .map(|(&k, c)| (c.order - k) % c.order)
            .collect();
        self.group.character(&conj_label)
    }

    /// Gauss sum `τ(χ) = Σ_{a mod q} χ(a) e(a/q)`.
    ///
    /// Each term's phase is reduced as the exact rational
    /// `(t(a)·q + a·E) / (qE) mod 1` before the single trig call, so the
    /// modulus-√q magnitude survives to near machine precision even for
    /// `q` in the thousands.
    pub fn gauss_sum(&self) -> Complex64 {
        let q = self.group.q;
        let e = self.group.exponent;
        let qe = q as u128 * e as u128;
        let mut sum = Complex64::new(0.0, 0.0);
        for a in 1..=q {
            if let Some(t) = self.exponent_at(a) {
                let num = (t as u128 * q as u128 + a as u128 * e as u128) % qe;
                let ang = 2.0 * PI * (num as f64 / qe as f64);
                sum += Complex64::new(ang.cos(), ang.sin());
            }
        }
        sum
    }
}

/// `Σ_{d | q, d | x} φ(d) μ(q/d)` — the divisor kernel behind the
/// orthogonality relations (`x` taken as a signed difference).
fn divisor_kernel(q: u64, x: i64) -> i64 {
    arith::divisors(q)
        .into_iter()
        .filter(|&d| x % d as i64 == 0)
        .map(|d| arith::euler_phi(d) as i64 * arith::mobius(q / d))
        .sum()
}

/// Orthogonality over primitive characters:
/// `Σ*_{χ mod q} χ(m) χ̄(n) = Σ_{d|q, d|m-n} φ(d) μ(q/d)`
/// for `gcd(mn, q) = 1`.
pub fn primitive_pair_sum(q: u64, m: u64, n: u64) -> i64 {
    assert_eq!(m.gcd(&q), 1, "m must be coprime to q");
    assert_eq!(n.gcd(&q), 1, "n must be coprime to q");
    divisor_kernel(q, m as i64 - n as i64)
}

/// Orthogonality over even primitive characters:
/// `Σ*_{χ mod q, χ(-1)=1} χ(m) χ̄(n)
///  = ½ Σ_{d|q, d|m-n} φ(d) μ(q/d) + ½ Σ_{d|q, d|m+n} φ(d) μ(q/d)`,
/// an exact half-integer for `gcd(mn, q) = 1`.
pub fn even_primitive_pair_sum(q: u64, m: u64, n: u64) -> Ratio<i64> {
    assert_eq!(m.gcd(&q), 1, "m must be coprime to q");
    assert_eq!(n.gcd(&q), 1, "n must be coprime to q");
    let diff = divisor_kernel(q, m as i64 - n as i64);
    let sum = divisor_kernel(q, m as i64 + n as i64);
    Ratio::new(diff + sum, 2)
}

/// `Σ e(a/(cd))` over `1 ≤ a ≤ cd` with `a ≡ r (mod d)` and `(a, cd) = 1`,
/// for a unit residue `r` modulo `d`.
///
/// In closed form this is a twisted Ramanujan sum: `μ(c) e(r c̄ / d)` when
/// `(c, d) = 1` (with `c̄` the inverse of `c` modulo `d`), and `0` otherwise.
/// The phase is reduced modulo `d` exactly, so no angle accuracy is lost for
/// large arguments.
pub fn restricted_phase_sum(c: u64, d: u64, r: u64) -> Complex64 {
    assert!(c >= 1 && d >= 1, "both moduli must be positive");
    let r = r % d;
    assert_eq!(r.gcd(&d), 1, "the residue must be a unit modulo d");
    if c.gcd(&d) != 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mu = arith::mobius(c);
    if mu == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let c_inv = arith::mod_inverse(c % d, d).expect("coprime moduli always invert");
    let numerator = (r as u128 * c_inv as u128 % d as u128) as f64;
    mu as f64 * Complex64::from_polar(1.0, 2.0 * PI * numerator / d as f64)
}

/// Brute-force companion of [`restricted_phase_sum`]: the literal sum, term
/// by term. Quadratic in `cd`; meant for cross-checking, not production.
pub fn restricted_phase_sum_direct(c: u64, d: u64, r: u64) -> Complex64 {
    assert!(c >= 1 && d >= 1, "both moduli must be positive");
    let q = c * d;
    let r = r % d;
    assert_eq!(r.gcd(&d), 1, "the residue must be a unit modulo d");
    let mut total = Complex64::new(0.0, 0.0);
    let mut a = if r == 0 { d } else { r };
    while a <= q {
        if a.gcd(&q) == 1 {
            total += Complex64::from_polar(1.0, 2.0 * PI * a as f64 / q as f64);
        }
        a += d;
    }
    total
}
