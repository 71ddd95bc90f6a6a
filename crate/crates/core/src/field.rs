//! Arithmetic in Z/pZ for a word-size prime p with smooth p - 1.
//!
//! Elements are plain `u64` residues in `[0, p)`; every operation goes
//! through a [`PrimeField`] so that the modulus is chosen at runtime.
//! Discrete logarithms use Pohlig-Hellman with baby-step/giant-step in
//! each prime-order subgroup.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};

/// A field element, always reduced into `[0, p)`.
pub type Fp = u64;

/// 2^64 - 2^32 + 1.
pub const GOLDILOCKS: u64 = 0xffff_ffff_0000_0001;

/// Largest prime factor of p - 1 accepted at construction. Baby-step tables
/// have about `sqrt(q)` entries.
pub const SMOOTHNESS_BOUND: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Reduction {
    /// p < 2^32: products fit in a u64.
    Small,
    /// p = 2^64 - 2^32 + 1.
    Goldilocks,
    /// Anything else: u128 remainder.
    Generic,
}

#[derive(Clone, Debug)]
struct BabySteps {
    q: u64,
    /// gamma = g^((p-1)/q), an element of order q.
    gamma: Fp,
    m: u64,
    table: HashMap<Fp, u64>,
    /// gamma^(-m)
    giant: Fp,
}

/// The prime field F_p together with a primitive root and the factorization
/// of p - 1.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
    g: Fp,
    factors: Vec<(u64, u32)>,
    red: Reduction,
    baby: OnceLock<Vec<BabySteps>>,
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.g == other.g
    }
}

impl Eq for PrimeField {}

impl PrimeField {
    /// Builds F_p, verifying primality, factoring p - 1 and searching for a
    /// primitive root.
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let factors = factor(p - 1);
        Self::with_factorization(p, factors)
    }

    /// Builds F_p from a claimed factorization of p - 1, which is checked.
    pub fn with_factorization(p: u64, factors: Vec<(u64, u32)>) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut prod: u128 = 1;
        for &(q, e) in &factors {
            if e == 0 || !is_prime(q) {
                return Err(Error::BadFactorization);
            }
            for _ in 0..e {
                prod *= q as u128;
                if prod > p as u128 {
                    return Err(Error::BadFactorization);
                }
            }
        }
        if prod != (p - 1) as u128 {
            return Err(Error::BadFactorization);
        }
        let mut factors = factors;
        factors.sort_unstable();
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::BadFactorization);
            }
        }
        if let Some(&(q, _)) = factors.iter().find(|&&(q, _)| q > SMOOTHNESS_BOUND) {
            return Err(Error::NotSmooth(p - 1, q));
        }
        let red = if p == GOLDILOCKS {
            Reduction::Goldilocks
        } else if p < (1 << 32) {
            Reduction::Small
        } else {
            Reduction::Generic
        };
        let mut field = PrimeField {
            p,
            g: 0,
            factors,
            red,
            baby: OnceLock::new(),
        };
        field.g = find_primitive_root(&field);
        Ok(field)
    }

    /// The default field, p = 2^64 - 2^32 + 1.
    pub fn goldilocks() -> Self {
        let factors = vec![
            (2, 32),
            (3, 1),
            (5, 1),
            (17, 1),
            (257, 1),
            (65537, 1),
        ];
        Self::with_factorization(GOLDILOCKS, factors).expect("goldilocks parameters are valid")
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The primitive root used as the base of discrete logarithms.
    #[inline]
    pub fn generator(&self) -> Fp {
        self.g
    }

    /// Order of the multiplicative group, p - 1.
    #[inline]
    pub fn order(&self) -> u64 {
        self.p - 1
    }

    pub fn order_factorization(&self) -> &[(u64, u32)] {
        &self.factors
    }

    #[inline]
    pub fn from_u64(&self, v: u64) -> Fp {
        if v >= self.p {
            v % self.p
        } else {
            v
        }
    }

    #[inline]
    pub fn from_i64(&self, v: i64) -> Fp {
        if v >= 0 {
            self.from_u64(v as u64)
        } else {
            self.neg(self.from_u64(v.unsigned_abs()))
        }
    }

    /// Reduces an arbitrary signed 128-bit integer.
    pub fn from_i128(&self, v: i128) -> Fp {
        let r = v.rem_euclid(self.p as i128);
        r as u64
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn to_signed(&self, a: Fp) -> i128 {
        if a > self.p / 2 {
            a as i128 - self.p as i128
        } else {
            a as i128
        }
    }

    #[inline]
    pub fn add(&self, a: Fp, b: Fp) -> Fp {
        let (s, over) = a.overflowing_add(b);
        if over || s >= self.p {
            s.wrapping_sub(self.p)
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Fp, b: Fp) -> Fp {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(self.p)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fp) -> Fp {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Fp, b: Fp) -> Fp {
        match self.red {
            Reduction::Small => (a * b) % self.p,
            Reduction::Goldilocks => reduce_goldilocks(a as u128 * b as u128),
            Reduction::Generic => ((a as u128 * b as u128) % self.p as u128) as u64,
        }
    }

    /// a * b + c
    #[inline]
    pub fn mul_add(&self, a: Fp, b: Fp, c: Fp) -> Fp {
        self.add(self.mul(a, b), c)
    }

    pub fn pow(&self, a: Fp, mut e: u64) -> Fp {
        let mut base = a;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// a^e for a signed exponent; `a` must be nonzero when `e < 0`.
    pub fn pow_signed(&self, a: Fp, e: i64) -> Fp {
        let r = self.pow(a, e.unsigned_abs());
        if e < 0 {
            self.inv_nz(r)
        } else {
            r
        }
    }

    /// Multiplicative inverse; fails on zero.
    pub fn inv(&self, a: Fp) -> Result<Fp> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nz(a))
    }

    /// Multiplicative inverse of a value the caller knows to be nonzero.
    #[inline]
    pub fn inv_nz(&self, a: Fp) -> Fp {
        debug_assert!(a != 0 && a < self.p);
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        self.from_i128(t0)
    }

    pub fn div(&self, a: Fp, b: Fp) -> Result<Fp> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        rng.gen_range(0..self.p)
    }

    /// Uniform element of the multiplicative group.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        rng.gen_range(1..self.p)
    }

    /// Solves g^x = h, returning x in `[0, p - 1)`.
    pub fn discrete_log(&self, h: Fp) -> Result<u64> {
        discrete_log(self, h)
    }

    fn baby_steps(&self) -> &[BabySteps] {
        self.baby.get_or_init(|| {
            self.factors
                .iter()
                .map(|&(q, _)| {
                    let gamma = self.pow(self.g, (self.p - 1) / q);
                    let m = (q as f64).sqrt().ceil() as u64;
                    let mut table = HashMap::with_capacity(m as usize);
                    let mut cur = 1;
                    for j in 0..m {
                        table.entry(cur).or_insert(j);
                        cur = self.mul(cur, gamma);
                    }
                    let giant = self.inv_nz(self.pow(gamma, m));
                    BabySteps {
                        q,
                        gamma,
                        m,
                        table,
                        giant,
                    }
                })
                .collect()
        })
    }
}

#[inline]
fn reduce_goldilocks(x: u128) -> u64 {
    const EPSILON: u64 = 0xffff_ffff;
    let lo = x as u64;
    let hi = (x >> 64) as u64;
    let hi_hi = hi >> 32;
    let hi_lo = hi & EPSILON;
    let (mut t0, borrow) = lo.overflowing_sub(hi_hi);
    if borrow {
        t0 = t0.wrapping_sub(EPSILON);
    }
    let t1 = hi_lo * EPSILON;
    let (res, carry) = t0.overflowing_add(t1);
    let r = res.wrapping_add(EPSILON * carry as u64);
    if r >= GOLDILOCKS {
        r - GOLDILOCKS
    } else {
        r
    }
}

/// Smallest g with g^((p-1)/q) != 1 for every prime q | p - 1.
pub fn find_primitive_root(k: &PrimeField) -> Fp {
    let n = k.p - 1;
    (2..k.p)
        .find(|&g| k.factors.iter().all(|&(q, _)| k.pow(g, n / q) != 1))
        .unwrap_or(1)
}

/// Pohlig-Hellman discrete logarithm to base `k.generator()`.
pub fn discrete_log(k: &PrimeField, h: Fp) -> Result<u64> {
    if h == 0 || h >= k.p {
        return Err(Error::DivisionByZero);
    }
    let n = k.p - 1;
    let baby = k.baby_steps();
    let mut x: u128 = 0;
    let mut modulus: u128 = 1;
    for (&(q, e), bs) in k.factors.iter().zip(baby) {
        let qe = q.pow(e);
        let cofactor = n / qe;
        let gq = k.pow(k.g, cofactor);
        let hq = k.pow(h, cofactor);
        let gq_inv = k.inv_nz(gq);
        // digits of log_{gq}(hq) in base q
        let mut digits: u64 = 0;
        let mut qpow: u64 = 1;
        for i in 0..e {
            let shifted = k.mul(hq, k.pow(gq_inv, digits));
            let probe = k.pow(shifted, q.pow(e - 1 - i));
            let d = bsgs(k, bs, probe).ok_or(Error::DivisionByZero)?;
            digits += d * qpow;
            if i + 1 < e {
                qpow *= q;
            }
        }
        x = crt(x, modulus, digits as u128, qe as u128);
        modulus *= qe as u128;
    }
    Ok((x % n as u128) as u64)
}

fn bsgs(k: &PrimeField, bs: &BabySteps, h: Fp) -> Option<u64> {
    debug_assert!(bs.q > 0 && bs.gamma != 0);
    let mut cur = h;
    for i in 0..bs.m {
        if let Some(&j) = bs.table.get(&cur) {
            return Some((i * bs.m + j) % bs.q);
        }
        cur = k.mul(cur, bs.giant);
    }
    None
}

fn crt(a: u128, m: u128, b: u128, n: u128) -> u128 {
    // x = a mod m, x = b mod n with gcd(m, n) = 1
    let mm = (m % n) as i128;
    let inv = mod_inverse_i128(mm, n as i128);
    let diff = (b as i128 - (a % n) as i128).rem_euclid(n as i128);
    let t = (diff * inv).rem_euclid(n as i128) as u128;
    a + m * t
}

fn mod_inverse_i128(a: i128, n: i128) -> i128 {
    let (mut r0, mut r1) = (n, a.rem_euclid(n));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(n)
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division followed by Pollard-Brent rho.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut primes: Vec<u64> = Vec::new();
    let mut q = 2u64;
    while q < 1 << 12 && q * q <= n {
        while n.is_multiple_of(q) {
            primes.push(q);
            n /= q;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut g = 1u64;
        const BLOCK: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += BLOCK;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_field_examples() {
        let k = PrimeField::new(101).unwrap();
        assert_eq!(k.inv(2).unwrap(), 51);
        assert_eq!(k.pow(2, 100), 1);
        assert_eq!(k.inv(0), Err(Error::DivisionByZero));
        assert_eq!(k.generator(), 2);
        assert_eq!(k.discrete_log(14).unwrap(), 10);
        assert_eq!(k.discrete_log(1).unwrap(), 0);
        assert_eq!(k.discrete_log(2).unwrap(), 1);
    }

    #[test]
    fn primitive_roots_of_tiny_primes() {
        assert_eq!(PrimeField::new(5).unwrap().generator(), 2);
        assert_eq!(PrimeField::new(3).unwrap().generator(), 2);
        let k = PrimeField::new(101).unwrap();
        // brute-force order of the returned root
        let g = k.generator();
        let mut x = g;
        let mut ord = 1;
        while x != 1 {
            x = k.mul(x, g);
            ord += 1;
        }
        assert_eq!(ord, 100);
    }

    #[test]
    fn goldilocks_basics() {
        let k = PrimeField::goldilocks();
        assert_eq!(k.mul(k.p() - 1, k.p() - 1), 1);
        let g = k.generator();
        assert_eq!(k.pow(g, k.order()), 1);
        for &(q, _) in k.order_factorization() {
            assert_ne!(k.pow(g, k.order() / q), 1);
        }
        assert_eq!(factor(GOLDILOCKS - 1), k.order_factorization().to_vec());
    }

    #[test]
    fn goldilocks_reduction_matches_u128() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let a = k.random(&mut rng);
            let b = k.random(&mut rng);
            let want = ((a as u128 * b as u128) % GOLDILOCKS as u128) as u64;
            assert_eq!(k.mul(a, b), want);
        }
        for &(a, b) in &[(k.p() - 1, 1), (k.p() - 1, 2), (0xffff_ffff, 0xffff_ffff)] {
            let want = ((a as u128 * b as u128) % GOLDILOCKS as u128) as u64;
            assert_eq!(k.mul(a, b), want);
        }
    }

    #[test]
    fn discrete_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [
            PrimeField::goldilocks(),
            PrimeField::new(10007).unwrap(),
            PrimeField::new((1u64 << 61) - 1).unwrap(),
        ] {
            for _ in 0..1000 {
                let e = rng.gen_range(0..k.order());
                let h = k.pow(k.generator(), e);
                assert_eq!(k.discrete_log(h).unwrap(), e);
            }
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert_eq!(PrimeField::new(100).unwrap_err(), Error::NotPrime(100));
        assert!(PrimeField::with_factorization(101, vec![(2, 2), (5, 1)]).is_err());
        // 2 * large prime: p = 2q + 1 with q prime and huge
        let p = 18446744073709550147u64; // largest safe-ish prime test
        if is_prime(p) {
            let f = factor(p - 1);
            if f.iter().any(|&(q, _)| q > SMOOTHNESS_BOUND) {
                assert!(matches!(PrimeField::new(p), Err(Error::NotSmooth(..))));
            }
        }
    }

    #[test]
    fn factor_and_primality() {
        assert!(is_prime(GOLDILOCKS));
        assert!(!is_prime(GOLDILOCKS - 2));
        assert_eq!(factor(1 << 20), vec![(2, 20)]);
        assert_eq!(factor(600851475143), vec![(71, 1), (839, 1), (1471, 1), (6857, 1)]);
        let n = 4294967291u64 * 4294967279u64;
        assert_eq!(factor(n), vec![(4294967279, 1), (4294967291, 1)]);
    }
}
