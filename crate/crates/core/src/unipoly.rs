//! Dense univariate polynomials over F_p.
//!
//! The workhorse behind every projected computation: arithmetic, Euclid,
//! root extraction, square-free decomposition, Cantor-Zassenhaus,
//! evaluation/interpolation on geometric progressions, rational
//! reconstruction and the transposed Vandermonde solver used by sparse
//! interpolation.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};

const KARATSUBA_THRESHOLD: usize = 32;

/// Coefficient vector, index i holding the coefficient of x^i. The last
/// entry is nonzero unless the polynomial is zero (empty vector).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DensePoly {
    c: Vec<Fp>,
}

/// `unit * prod(f^e)` for a univariate polynomial; every factor is monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseFactorization {
    pub unit: Fp,
    pub factors: Vec<(DensePoly, usize)>,
}

impl DenseFactorization {
    pub fn expand(&self, k: &PrimeField) -> DensePoly {
        let mut acc = DensePoly::constant(self.unit);
        for (f, e) in &self.factors {
            acc = mul(k, &acc, &pow(k, f, *e as u64));
        }
        acc
    }
}

impl DensePoly {
    pub fn zero() -> Self {
        DensePoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        DensePoly { c: vec![1] }
    }

    pub fn x() -> Self {
        DensePoly { c: vec![0, 1] }
    }

    pub fn constant(a: Fp) -> Self {
        Self::from_coeffs(vec![a])
    }

    /// c * x^d
    pub fn monomial(a: Fp, d: usize) -> Self {
        if a == 0 {
            return Self::zero();
        }
        let mut c = vec![0; d + 1];
        c[d] = a;
        DensePoly { c }
    }

    /// Takes reduced coefficients and trims trailing zeros.
    pub fn from_coeffs(mut c: Vec<Fp>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        DensePoly { c }
    }

    /// Reduces arbitrary signed integers into the field.
    pub fn from_i64s(k: &PrimeField, c: &[i64]) -> Self {
        Self::from_coeffs(c.iter().map(|&v| k.from_i64(v)).collect())
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Fp> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }

    /// Number of stored coefficients, deg + 1 (0 for the zero polynomial).
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Fp {
        self.c.get(i).copied().unwrap_or(0)
    }

    /// Leading coefficient (0 for the zero polynomial).
    pub fn lc(&self) -> Fp {
        self.c.last().copied().unwrap_or(0)
    }

    /// Order of vanishing at 0; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|&a| a != 0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    pub fn eval(&self, k: &PrimeField, x: Fp) -> Fp {
        self.c.iter().rev().fold(0, |acc, &a| k.mul_add(acc, x, a))
    }

    pub fn derivative(&self, k: &PrimeField) -> Self {
        Self::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| k.mul(a, k.from_u64(i as u64)))
                .collect(),
        )
    }

    pub fn neg(&self, k: &PrimeField) -> Self {
        DensePoly {
            c: self.c.iter().map(|&a| k.neg(a)).collect(),
        }
    }

    pub fn scale(&self, k: &PrimeField, s: Fp) -> Self {
        if s == 0 {
            return Self::zero();
        }
        DensePoly {
            c: self.c.iter().map(|&a| k.mul(a, s)).collect(),
        }
    }

    /// Multiplication by x^n.
    pub fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![0; n];
        c.extend_from_slice(&self.c);
        DensePoly { c }
    }

    /// Division by x^n, discarding the low coefficients.
    pub fn unshift(&self, n: usize) -> Self {
        Self::from_coeffs(self.c.iter().skip(n).copied().collect())
    }

    /// Reduction modulo x^n.
    pub fn truncate(&self, n: usize) -> Self {
        Self::from_coeffs(self.c.iter().take(n).copied().collect())
    }

    /// x^n f(1/x) for n >= deg f.
    pub fn reverse(&self, n: usize) -> Self {
        let mut c = vec![0; n + 1];
        for (i, &a) in self.c.iter().enumerate() {
            c[n - i] = a;
        }
        Self::from_coeffs(c)
    }

    /// Returns (lc, f / lc); the zero polynomial maps to (0, 0).
    pub fn monic(&self, k: &PrimeField) -> (Fp, Self) {
        let lc = self.lc();
        if lc == 0 || lc == 1 {
            return (lc, self.clone());
        }
        (lc, self.scale(k, k.inv_nz(lc)))
    }

    pub fn make_monic(&self, k: &PrimeField) -> Self {
        self.monic(k).1
    }

    /// f(x + a)
    pub fn taylor_shift(&self, k: &PrimeField, a: Fp) -> Self {
        let mut c = self.c.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] = k.mul_add(c[j + 1], a, c[j]);
            }
        }
        Self::from_coeffs(c)
    }
}

pub fn add(k: &PrimeField, f: &DensePoly, g: &DensePoly) -> DensePoly {
    let (long, short) = if f.len() >= g.len() { (f, g) } else { (g, f) };
    let mut c = long.c.clone();
    for (i, &b) in short.c.iter().enumerate() {
        c[i] = k.add(c[i], b);
    }
    DensePoly::from_coeffs(c)
}

pub fn sub(k: &PrimeField, f: &DensePoly, g: &DensePoly) -> DensePoly {
    let n = f.len().max(g.len());
    let c = (0..n).map(|i| k.sub(f.coeff(i), g.coeff(i))).collect();
    DensePoly::from_coeffs(c)
}

fn schoolbook(k: &PrimeField, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = k.mul_add(x, y, out[i + j]);
        }
    }
    out
}

fn add_into(k: &PrimeField, out: &mut [Fp], src: &[Fp]) {
    for (o, &s) in out.iter_mut().zip(src) {
        *o = k.add(*o, s);
    }
}

fn mul_slices(k: &PrimeField, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.len() < KARATSUBA_THRESHOLD {
        return schoolbook(k, a, b);
    }
    if a.len() > b.len() {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, chunk) in a.chunks(b.len()).enumerate() {
            let prod = mul_slices(k, chunk, b);
            add_into(k, &mut out[i * b.len()..], &prod);
        }
        return out;
    }
    let n = a.len();
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let z0 = mul_slices(k, a0, b0);
    let z2 = mul_slices(k, a1, b1);
    let sum = |x: &[Fp], y: &[Fp]| -> Vec<Fp> {
        let mut s = y.to_vec();
        add_into(k, &mut s, x);
        s
    };
    let mut z1 = mul_slices(k, &sum(a0, a1), &sum(b0, b1));
    for (i, &v) in z0.iter().enumerate() {
        z1[i] = k.sub(z1[i], v);
    }
    for (i, &v) in z2.iter().enumerate() {
        z1[i] = k.sub(z1[i], v);
    }
    let mut out = vec![0; 2 * n - 1];
    add_into(k, &mut out, &z0);
    add_into(k, &mut out[h..], &z1);
    add_into(k, &mut out[2 * h..], &z2);
    out
}

/// Exact product (schoolbook below a crossover, Karatsuba above).
pub fn mul(k: &PrimeField, f: &DensePoly, g: &DensePoly) -> DensePoly {
    DensePoly::from_coeffs(mul_slices(k, &f.c, &g.c))
}

/// Product reduced modulo x^n.
pub fn mul_trunc(k: &PrimeField, f: &DensePoly, g: &DensePoly, n: usize) -> DensePoly {
    let a = &f.c[..f.len().min(n)];
    let b = &g.c[..g.len().min(n)];
    let mut c = mul_slices(k, a, b);
    c.truncate(n);
    DensePoly::from_coeffs(c)
}

pub fn pow(k: &PrimeField, f: &DensePoly, mut e: u64) -> DensePoly {
    let mut acc = DensePoly::one();
    let mut base = f.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(k, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(k, &base, &base);
        }
    }
    acc
}

/// Division with remainder: f = q g + r, deg r < deg g.
pub fn divrem(k: &PrimeField, f: &DensePoly, g: &DensePoly) -> Result<(DensePoly, DensePoly)> {
    if g.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if f.len() < g.len() {
        return Ok((DensePoly::zero(), f.clone()));
    }
    let inv = k.inv_nz(g.lc());
    let dg = g.len() - 1;
    let mut r = f.c.clone();
    let mut q = vec![0; f.len() - dg];
    for i in (0..q.len()).rev() {
        let coef = k.mul(r[i + dg], inv);
        q[i] = coef;
        if coef == 0 {
            continue;
        }
        for j in 0..dg {
            r[i + j] = k.sub(r[i + j], k.mul(coef, g.c[j]));
        }
        r[i + dg] = 0;
    }
    r.truncate(dg);
    Ok((DensePoly::from_coeffs(q), DensePoly::from_coeffs(r)))
}

pub fn rem(k: &PrimeField, f: &DensePoly, g: &DensePoly) -> Result<DensePoly> {
    Ok(divrem(k, f, g)?.1)
}

/// Quotient f / g, failing with `NotDivisible` when the remainder is nonzero.
pub fn div_exact(k: &PrimeField, f: &DensePoly, g: &DensePoly) -> Result<DensePoly> {
    let (q, r) = divrem(k, f, g)?;
    if !r.is_zero() {
        return Err(Error::NotDivisible);
    }
    Ok(q)
}

/// Monic gcd; gcd(0, 0) = 0.
pub fn gcd(k: &PrimeField, f: &DensePoly, g: &DensePoly) -> DensePoly {
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = divrem(k, &a, &b).expect("nonzero divisor").1;
        a = b;
        b = r;
    }
    a.make_monic(k)
}

/// Extended Euclid: returns (d, u, v) with u f + v g = d and d monic.
pub fn xgcd(k: &PrimeField, f: &DensePoly, g: &DensePoly) -> (DensePoly, DensePoly, DensePoly) {
    let (mut r0, mut r1) = (f.clone(), g.clone());
    let (mut s0, mut s1) = (DensePoly::one(), DensePoly::zero());
    let (mut t0, mut t1) = (DensePoly::zero(), DensePoly::one());
    while !r1.is_zero() {
        let (q, r) = divrem(k, &r0, &r1).expect("nonzero divisor");
        let s = sub(k, &s0, &mul(k, &q, &s1));
        let t = sub(k, &t0, &mul(k, &q, &t1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
        (t0, t1) = (t1, t);
    }
    let lc = r0.lc();
    if lc == 0 {
        return (r0, s0, t0);
    }
    let inv = k.inv_nz(lc);
    (r0.scale(k, inv), s0.scale(k, inv), t0.scale(k, inv))
}

/// base^e mod m.
pub fn pow_mod(k: &PrimeField, base: &DensePoly, mut e: u64, m: &DensePoly) -> DensePoly {
    let mut acc = rem(k, &DensePoly::one(), m).expect("nonzero modulus");
    let mut b = rem(k, base, m).expect("nonzero modulus");
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(k, &mul(k, &acc, &b), m).expect("nonzero modulus");
        }
        e >>= 1;
        if e > 0 {
            b = rem(k, &mul(k, &b, &b), m).expect("nonzero modulus");
        }
    }
    acc
}

/// Power series inverse of f modulo x^n; requires f(0) != 0.
pub fn series_inverse(k: &PrimeField, f: &DensePoly, n: usize) -> Result<DensePoly> {
    let f0 = f.coeff(0);
    if f0 == 0 {
        return Err(Error::DivisionByZero);
    }
    let inv0 = k.inv_nz(f0);
    let mut g = vec![0; n];
    if n == 0 {
        return Ok(DensePoly::zero());
    }
    g[0] = inv0;
    for i in 1..n {
        let mut s = 0;
        for j in 1..=i.min(f.len().saturating_sub(1)) {
            s = k.mul_add(f.c[j], g[i - j], s);
        }
        g[i] = k.neg(k.mul(s, inv0));
    }
    Ok(DensePoly::from_coeffs(g))
}

/// f = c g^l with g monic, verified by re-expansion.
///
/// Works on the reversed polynomial, whose l-th root is the unique power
/// series with constant term 1; requires p > deg f.
pub fn root_extract(k: &PrimeField, f: &DensePoly, l: usize) -> Result<(Fp, DensePoly)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if l == 0 {
        return Err(Error::Precondition("root index must be positive"));
    }
    let (c, h) = f.monic(k);
    if l == 1 {
        return Ok((c, h));
    }
    let d = h.deg();
    if d % l != 0 {
        return Err(Error::NotAPower);
    }
    if (l as u64).is_multiple_of(k.p()) || (d as u64) >= k.p() {
        return Err(Error::Precondition("characteristic must exceed the degree"));
    }
    let m = d / l;
    let a = h.reverse(d);
    let alpha1 = k.add(k.inv_nz(k.from_u64(l as u64)), 1);
    let mut b = vec![0; m + 1];
    b[0] = 1;
    for n in 1..=m {
        let mut s = 0;
        for j in 1..=n {
            let aj = a.coeff(j);
            if aj == 0 {
                continue;
            }
            let w = k.sub(k.mul(alpha1, k.from_u64(j as u64)), k.from_u64(n as u64));
            s = k.add(s, k.mul(k.mul(w, aj), b[n - j]));
        }
        b[n] = k.mul(s, k.inv_nz(k.from_u64(n as u64)));
    }
    let g = DensePoly::from_coeffs(b).reverse(m);
    if pow(k, &g, l as u64) != h {
        return Err(Error::NotAPower);
    }
    Ok((c, g))
}

/// Yun's square-free decomposition; requires p > deg f.
///
/// Returns `lc(f)` and the nontrivial parts P_i with multiplicity i.
pub fn squarefree_decomposition(k: &PrimeField, f: &DensePoly) -> Result<DenseFactorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (unit, f) = f.monic(k);
    let mut factors = Vec::new();
    if f.deg() == 0 {
        return Ok(DenseFactorization { unit, factors });
    }
    if (f.deg() as u64) >= k.p() {
        return squarefree_char_p(k, &f).map(|factors| DenseFactorization { unit, factors });
    }
    let df = f.derivative(k);
    let a0 = gcd(k, &f, &df);
    let mut b = div_exact(k, &f, &a0)?;
    let c = div_exact(k, &df, &a0)?;
    let mut d = sub(k, &c, &b.derivative(k));
    let mut i = 1;
    while b.deg() > 0 {
        let a = gcd(k, &b, &d);
        b = div_exact(k, &b, &a)?;
        let c = div_exact(k, &d, &a)?;
        d = sub(k, &c, &b.derivative(k));
        if a.deg() > 0 {
            factors.push((a, i));
        }
        i += 1;
    }
    Ok(DenseFactorization { unit, factors })
}

/// Square-free decomposition valid in any characteristic (monic input).
fn squarefree_char_p(k: &PrimeField, f: &DensePoly) -> Result<Vec<(DensePoly, usize)>> {
    let p = k.p() as usize;
    let mut out: Vec<(DensePoly, usize)> = Vec::new();
    let df = f.derivative(k);
    if df.is_zero() {
        let root = pth_root(f, p);
        for (g, e) in squarefree_char_p(k, &root)? {
            out.push((g, e * p));
        }
        return Ok(out);
    }
    let mut c = gcd(k, f, &df);
    let mut w = div_exact(k, f, &c)?;
    let mut i = 1;
    while w.deg() > 0 {
        let y = gcd(k, &w, &c);
        let fac = div_exact(k, &w, &y)?;
        if fac.deg() > 0 {
            out.push((fac, i));
        }
        w = y;
        c = div_exact(k, &c, &w)?;
        i += 1;
    }
    if c.deg() > 0 {
        let root = pth_root(&c, p);
        for (g, e) in squarefree_char_p(k, &root)? {
            out.push((g, e * p));
        }
    }
    out.sort_by_key(|(_, e)| *e);
    let mut merged: Vec<(DensePoly, usize)> = Vec::new();
    for (g, e) in out {
        match merged.last_mut() {
            Some((h, e2)) if *e2 == e => *h = mul(k, h, &g),
            _ => merged.push((g, e)),
        }
    }
    Ok(merged)
}

fn pth_root(f: &DensePoly, p: usize) -> DensePoly {
    DensePoly::from_coeffs(f.c.iter().step_by(p).copied().collect())
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn distinct_degree(k: &PrimeField, f: &DensePoly) -> Vec<(DensePoly, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = DensePoly::x();
    let mut h = rem(k, &x, &f).expect("nonzero");
    let mut d = 0;
    while 2 * (d + 1) <= f.deg() {
        d += 1;
        h = pow_mod(k, &h, k.p(), &f);
        let g = gcd(k, &sub(k, &h, &x), &f);
        if g.deg() > 0 {
            f = div_exact(k, &f, &g).expect("gcd divides");
            h = rem(k, &h, &f).expect("nonzero");
            out.push((g, d));
        }
    }
    if f.deg() > 0 {
        let d = f.deg();
        out.push((f, d));
    }
    out
}

/// Splits a monic product of distinct degree-d irreducibles (odd p).
fn equal_degree<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &DensePoly,
    d: usize,
    rng: &mut R,
    out: &mut Vec<DensePoly>,
) {
    let n = f.deg();
    if n == d {
        out.push(f.clone());
        return;
    }
    loop {
        let a = DensePoly::from_coeffs((0..n).map(|_| k.random(rng)).collect());
        if a.deg() == 0 {
            continue;
        }
        // a^((p^d - 1)/2) = (a^(1 + p + ... + p^(d-1)))^((p-1)/2)
        let mut t = a.clone();
        let mut u = a.clone();
        for _ in 1..d {
            t = pow_mod(k, &t, k.p(), f);
            u = rem(k, &mul(k, &u, &t), f).expect("nonzero");
        }
        let b = pow_mod(k, &u, (k.p() - 1) / 2, f);
        let g = gcd(k, &sub(k, &b, &DensePoly::one()), f);
        if g.deg() > 0 && g.deg() < n {
            let h = div_exact(k, f, &g).expect("gcd divides");
            equal_degree(k, &g, d, rng, out);
            equal_degree(k, &h, d, rng, out);
            return;
        }
    }
}

/// Irreducible factorization by Cantor-Zassenhaus (Las Vegas).
///
/// Factors are monic and sorted by (degree, coefficients).
pub fn factor<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &DensePoly,
    rng: &mut R,
) -> Result<DenseFactorization> {
    let sqf = squarefree_decomposition(k, f)?;
    let mut factors = Vec::new();
    for (part, e) in &sqf.factors {
        for (g, d) in distinct_degree(k, part) {
            let mut split = Vec::new();
            equal_degree(k, &g, d, rng, &mut split);
            factors.extend(split.into_iter().map(|h| (h, *e)));
        }
    }
    factors.sort_by(|(a, ea), (b, eb)| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.c.iter().rev().cmp(b.c.iter().rev()))
            .then(ea.cmp(eb))
    });
    Ok(DenseFactorization {
        unit: sqf.unit,
        factors,
    })
}

/// Distinct roots of f in F_p, sorted.
pub fn roots<R: Rng + ?Sized>(k: &PrimeField, f: &DensePoly, rng: &mut R) -> Vec<Fp> {
    if f.deg() == 0 {
        return Vec::new();
    }
    let f = f.make_monic(k);
    let x = DensePoly::x();
    let xp = pow_mod(k, &x, k.p(), &f);
    let g = gcd(k, &sub(k, &xp, &x), &f);
    let mut lin = Vec::new();
    if g.deg() > 0 {
        equal_degree(k, &g, 1, rng, &mut lin);
    }
    let mut out: Vec<Fp> = lin.iter().map(|h| k.neg(h.coeff(0))).collect();
    out.sort_unstable();
    out
}

/// [f(beta alpha^i) for i in 0..m]
pub fn geometric_evaluate(k: &PrimeField, f: &DensePoly, beta: Fp, alpha: Fp, m: usize) -> Vec<Fp> {
    let mut out = Vec::with_capacity(m);
    let mut x = beta;
    for _ in 0..m {
        out.push(f.eval(k, x));
        x = k.mul(x, alpha);
    }
    out
}

/// Newton interpolation through (points[i], values[i]).
pub fn interpolate(k: &PrimeField, points: &[Fp], values: &[Fp]) -> Result<DensePoly> {
    let n = points.len();
    assert_eq!(n, values.len(), "one value per point");
    let mut seen = HashSet::with_capacity(n);
    if !points.iter().all(|x| seen.insert(*x)) {
        return Err(Error::DuplicatePoints);
    }
    let mut dd = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = k.sub(dd[i], dd[i - 1]);
            let den = k.sub(points[i], points[i - j]);
            dd[i] = k.mul(num, k.inv_nz(den));
        }
    }
    // Horner on the Newton basis.
    let mut acc = DensePoly::zero();
    for i in (0..n).rev() {
        let lin = DensePoly::from_coeffs(vec![k.neg(points[i]), 1]);
        acc = add(k, &mul(k, &acc, &lin), &DensePoly::constant(dd[i]));
    }
    Ok(acc)
}

/// The unique f of degree < len(values) with f(beta alpha^i) = values[i].
pub fn geometric_interpolate(
    k: &PrimeField,
    values: &[Fp],
    beta: Fp,
    alpha: Fp,
) -> Result<DensePoly> {
    let mut points = Vec::with_capacity(values.len());
    let mut x = beta;
    for _ in 0..values.len() {
        points.push(x);
        x = k.mul(x, alpha);
    }
    interpolate(k, &points, values)
}

/// Finds A/B = series mod y^nu with deg A <= dmax, deg B < nu - dmax,
/// gcd(A, B) = 1 and B(0) != 0; B is made monic.
pub fn rational_reconstruct(
    k: &PrimeField,
    series: &DensePoly,
    nu: usize,
    dmax: usize,
) -> Result<(DensePoly, DensePoly)> {
    let s = series.truncate(nu);
    if s.is_zero() {
        return Ok((DensePoly::zero(), DensePoly::one()));
    }
    let (mut r0, mut r1) = (DensePoly::monomial(1, nu), s);
    let (mut t0, mut t1) = (DensePoly::zero(), DensePoly::one());
    while !r1.is_zero() && r1.deg() > dmax {
        let (q, r) = divrem(k, &r0, &r1)?;
        let t = sub(k, &t0, &mul(k, &q, &t1));
        (r0, r1) = (r1, r);
        (t0, t1) = (t1, t);
    }
    let (a, b) = (r1, t1);
    if b.is_zero() || b.coeff(0) == 0 || b.deg() + dmax >= nu {
        return Err(Error::NoReconstruction);
    }
    if !a.is_zero() && gcd(k, &a, &b).deg() > 0 {
        return Err(Error::NoReconstruction);
    }
    let inv = k.inv_nz(b.lc());
    Ok((a.scale(k, inv), b.scale(k, inv)))
}

/// Solves sum_j c_j roots_j^i = values[i] for i < len(roots).
pub fn transposed_vandermonde_solve(k: &PrimeField, roots: &[Fp], values: &[Fp]) -> Result<Vec<Fp>> {
    let s = roots.len();
    if values.len() < s {
        return Err(Error::Precondition("need at least as many values as roots"));
    }
    let mut seen = HashSet::with_capacity(s);
    if !roots.iter().all(|r| seen.insert(*r)) {
        return Err(Error::SingularSystem);
    }
    // Lambda(z) = prod (z - r_j)
    let mut lambda = vec![1u64];
    for &r in roots {
        let mut next = vec![0; lambda.len() + 1];
        for (i, &a) in lambda.iter().enumerate() {
            next[i + 1] = k.add(next[i + 1], a);
            next[i] = k.sub(next[i], k.mul(a, r));
        }
        lambda = next;
    }
    let mut out = Vec::with_capacity(s);
    let mut q = vec![0; s];
    for &r in roots {
        // synthetic division Lambda / (z - r)
        let mut carry = 0;
        for i in (0..s).rev() {
            carry = k.mul_add(carry, r, lambda[i + 1]);
            q[i] = carry;
        }
        let mut num = 0;
        let mut den = 0;
        let mut rp = 1;
        for i in 0..s {
            num = k.mul_add(q[i], values[i], num);
            den = k.mul_add(q[i], rp, den);
            rp = k.mul(rp, r);
        }
        out.push(k.mul(num, k.inv_nz(den)));
    }
    Ok(out)
}

/// Berlekamp-Massey: the shortest connection polynomial
/// C(z) = 1 + c_1 z + ... + c_L z^L with sum_i c_i s_{n-i} = 0 for n >= L.
pub fn berlekamp_massey(k: &PrimeField, seq: &[Fp]) -> (DensePoly, usize) {
    let mut c = vec![1u64];
    let mut b = vec![1u64];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bdisc = 1u64;
    for n in 0..seq.len() {
        let mut d = seq[n];
        for i in 1..=l.min(c.len() - 1) {
            d = k.mul_add(c[i], seq[n - i], d);
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = k.mul(d, k.inv_nz(bdisc));
        let t = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + m] = k.sub(c[i + m], k.mul(coef, bi));
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = t;
            bdisc = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.truncate(l + 1);
    (DensePoly::from_coeffs(c), l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(k: &PrimeField, c: &[i64]) -> DensePoly {
        DensePoly::from_i64s(k, c)
    }

    #[test]
    fn spec_examples_arith() {
        let k = PrimeField::new(101).unwrap();
        assert_eq!(mul(&k, &p(&k, &[-1, 1]), &p(&k, &[1, 1])), p(&k, &[-1, 0, 1]));
        assert!(mul(&k, &p(&k, &[3, 4]), &DensePoly::zero()).is_zero());
        let k7 = PrimeField::new(7).unwrap();
        assert_eq!(mul(&k7, &p(&k7, &[1, 3]), &p(&k7, &[2, 5])), p(&k7, &[2, 4, 1]));
        let (q, r) = divrem(&k, &p(&k, &[-1, 0, 1]), &p(&k, &[-1, 1])).unwrap();
        assert_eq!((q, r), (p(&k, &[1, 1]), DensePoly::zero()));
        let (q, r) = divrem(&k, &p(&k, &[0, 1]), &p(&k, &[0, 0, 1])).unwrap();
        assert_eq!((q, r), (DensePoly::zero(), p(&k, &[0, 1])));
        let k5 = PrimeField::new(5).unwrap();
        let (q, r) = divrem(&k5, &p(&k5, &[1, 2, 0, 1]), &p(&k5, &[1, 2])).unwrap();
        assert_eq!((q, r), (p(&k5, &[3, 1, 3]), p(&k5, &[3])));
        assert_eq!(
            divrem(&k, &p(&k, &[1]), &DensePoly::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn spec_examples_gcd() {
        let k = PrimeField::new(101).unwrap();
        assert_eq!(gcd(&k, &p(&k, &[-1, 0, 1]), &p(&k, &[-1, 1])), p(&k, &[-1, 1]));
        assert_eq!(gcd(&k, &p(&k, &[2, 4]), &DensePoly::zero()), p(&k, &[51, 1]));
        let k5 = PrimeField::new(5).unwrap();
        let f = p(&k5, &[-1, 0, 0, 0, 1]);
        let g = p(&k5, &[-1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(gcd(&k5, &f, &g), p(&k5, &[-1, 0, 1]));
        let (d, u, v) = xgcd(&k5, &f, &g);
        assert_eq!(add(&k5, &mul(&k5, &u, &f), &mul(&k5, &v, &g)), d);
    }

    #[test]
    fn spec_examples_root() {
        let k = PrimeField::new(101).unwrap();
        assert_eq!(root_extract(&k, &p(&k, &[1, 2, 1]), 2).unwrap(), (1, p(&k, &[1, 1])));
        assert_eq!(root_extract(&k, &p(&k, &[2, 4, 2]), 2).unwrap(), (2, p(&k, &[1, 1])));
        let k7 = PrimeField::new(7).unwrap();
        assert_eq!(root_extract(&k7, &p(&k7, &[1, 0, 1]), 2), Err(Error::NotAPower));
        // x^2 has a root even though its reversal is a constant
        assert_eq!(root_extract(&k, &p(&k, &[0, 0, 3]), 2).unwrap(), (3, p(&k, &[0, 1])));
    }

    #[test]
    fn spec_examples_squarefree() {
        let k = PrimeField::new(101).unwrap();
        let sq = squarefree_decomposition(&k, &p(&k, &[0, 0, 1, 1])).unwrap();
        assert_eq!(sq.factors, vec![(p(&k, &[1, 1]), 1), (p(&k, &[0, 1]), 2)]);
        let sq = squarefree_decomposition(&k, &p(&k, &[-1, 0, 1])).unwrap();
        assert_eq!(sq.factors, vec![(p(&k, &[-1, 0, 1]), 1)]);
        let k7 = PrimeField::new(7).unwrap();
        let f = mul(&k7, &pow(&k7, &p(&k7, &[1, 1]), 3), &p(&k7, &[2, 1]));
        let sq = squarefree_decomposition(&k7, &f).unwrap();
        assert_eq!(sq.factors, vec![(p(&k7, &[2, 1]), 1), (p(&k7, &[1, 1]), 3)]);
    }

    #[test]
    fn squarefree_in_small_characteristic() {
        let k = PrimeField::new(3).unwrap();
        // (x^3 + 2)^2 (x + 1) = (x + 2)^6 (x + 1)
        let f = mul(&k, &pow(&k, &p(&k, &[2, 0, 0, 1]), 2), &p(&k, &[1, 1]));
        let sq = squarefree_decomposition(&k, &f).unwrap();
        assert_eq!(sq.expand(&k), f);
        assert_eq!(sq.factors, vec![(p(&k, &[1, 1]), 1), (p(&k, &[2, 1]), 6)]);
    }

    #[test]
    fn spec_examples_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k5 = PrimeField::new(5).unwrap();
        let fz = factor(&k5, &p(&k5, &[1, 0, 1]), &mut rng).unwrap();
        assert_eq!(fz.factors, vec![(p(&k5, &[2, 1]), 1), (p(&k5, &[3, 1]), 1)]);
        let k7 = PrimeField::new(7).unwrap();
        let fz = factor(&k7, &p(&k7, &[1, 0, 1]), &mut rng).unwrap();
        assert_eq!(fz.factors, vec![(p(&k7, &[1, 0, 1]), 1)]);
        let fz = factor(&k7, &p(&k7, &[0, 0, 1]), &mut rng).unwrap();
        assert_eq!(fz.factors, vec![(p(&k7, &[0, 1]), 2)]);
    }

    #[test]
    fn spec_examples_geometric() {
        let k = PrimeField::new(101).unwrap();
        let f = p(&k, &[1, 0, 1]);
        assert_eq!(geometric_evaluate(&k, &f, 1, 2, 3), vec![2, 5, 17]);
        assert_eq!(geometric_evaluate(&k, &p(&k, &[9]), 3, 2, 3), vec![9, 9, 9]);
        assert!(geometric_evaluate(&k, &f, 1, 2, 0).is_empty());
        assert_eq!(geometric_interpolate(&k, &[2, 5, 17], 1, 2).unwrap(), f);
        assert_eq!(geometric_interpolate(&k, &[7], 1, 2).unwrap(), p(&k, &[7]));
        assert_eq!(geometric_interpolate(&k, &[1, 2, 4], 1, 2).unwrap(), p(&k, &[0, 1]));
        assert_eq!(geometric_interpolate(&k, &[1, 2, 4], 1, 1), Err(Error::DuplicatePoints));
    }

    #[test]
    fn spec_examples_reconstruct() {
        let k = PrimeField::new(101).unwrap();
        let (a, b) = rational_reconstruct(&k, &p(&k, &[1, 1, 1, 1]), 4, 1).unwrap();
        // A/B = 1/(1 - y), normalized with B monic
        assert_eq!((a, b), (p(&k, &[-1]), p(&k, &[-1, 1])));
        let (a, b) = rational_reconstruct(&k, &p(&k, &[3, 4]), 5, 2).unwrap();
        assert_eq!((a, b), (p(&k, &[3, 4]), DensePoly::one()));
    }

    #[test]
    fn spec_examples_transposed_vandermonde() {
        let k = PrimeField::new(101).unwrap();
        assert_eq!(transposed_vandermonde_solve(&k, &[1], &[5, 5]).unwrap(), vec![5]);
        assert_eq!(transposed_vandermonde_solve(&k, &[1, 2], &[3, 5, 9]).unwrap(), vec![1, 2]);
        assert_eq!(transposed_vandermonde_solve(&k, &[7], &[0, 0]).unwrap(), vec![0]);
        assert_eq!(
            transposed_vandermonde_solve(&k, &[3, 3], &[1, 2]),
            Err(Error::SingularSystem)
        );
    }

    #[test]
    fn berlekamp_massey_finds_recurrence() {
        let k = PrimeField::new(101).unwrap();
        // s_i = 2 * 3^i + 5 * 7^i
        let seq: Vec<Fp> = (0..6)
            .map(|i| k.add(k.mul(2, k.pow(3, i)), k.mul(5, k.pow(7, i))))
            .collect();
        let (c, l) = berlekamp_massey(&k, &seq);
        assert_eq!(l, 2);
        let lambda = c.reverse(l);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(roots(&k, &lambda, &mut rng), vec![3, 7]);
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, m) in [(40, 40), (100, 33), (257, 64), (64, 500)] {
            let a: Vec<Fp> = (0..n).map(|_| k.random(&mut rng)).collect();
            let b: Vec<Fp> = (0..m).map(|_| k.random(&mut rng)).collect();
            assert_eq!(mul_slices(&k, &a, &b), schoolbook(&k, &a, &b));
        }
    }

    #[test]
    fn taylor_shift_matches_composition() {
        let k = PrimeField::new(101).unwrap();
        let f = p(&k, &[5, 0, 3, 1]);
        let g = f.taylor_shift(&k, 4);
        for x in 0..10 {
            assert_eq!(g.eval(&k, x), f.eval(&k, k.add(x, 4)));
        }
    }
}
