//! Evaluation on geometric progressions and Prony-style sparse
//! interpolation.
//!
//! Exponent vectors are packed into one integer by a mixed-radix
//! (Kronecker) encoding, so term k of F evaluated at point i contributes
//! c_k beta^e_k (g^K_k)^i. Berlekamp-Massey recovers the g^K_k, discrete
//! logarithms recover K_k.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::sparsepoly::SparsePoly;
use crate::unipoly::{self, DensePoly};

/// Points beta * alpha^i with alpha_j = g^(D_{j-1}) and an exponent window
/// [lo_j, hi_j] per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricSequence {
    pub alpha: Vec<Fp>,
    pub beta: Vec<Fp>,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    /// D_0 = 1, D_j = D_{j-1} (hi_j - lo_j + 1)
    pub radix: Vec<u64>,
}

impl GeometricSequence {
    /// Sequence for exponents in [0, bound_j] (or [-bound_j, bound_j] when
    /// `laurent`).
    pub fn new<R: Rng + ?Sized>(
        k: &PrimeField,
        degree_bounds: &[u64],
        rng: &mut R,
        laurent: bool,
    ) -> Result<Self> {
        let hi: Vec<i64> = degree_bounds.iter().map(|&d| d as i64).collect();
        let lo: Vec<i64> = if laurent {
            hi.iter().map(|d| -d).collect()
        } else {
            vec![0; hi.len()]
        };
        Self::with_window(k, &lo, &hi, rng)
    }

    pub fn with_window<R: Rng + ?Sized>(
        k: &PrimeField,
        lo: &[i64],
        hi: &[i64],
        rng: &mut R,
    ) -> Result<Self> {
        assert_eq!(lo.len(), hi.len());
        let mut radix = vec![1u64];
        for (l, h) in lo.iter().zip(hi) {
            if h < l {
                return Err(Error::Precondition("empty exponent window"));
            }
            let width = (h - l + 1) as u64;
            let d = radix
                .last()
                .unwrap()
                .checked_mul(width)
                .ok_or(Error::KroneckerOverflow)?;
            if d >= k.order() {
                return Err(Error::KroneckerOverflow);
            }
            radix.push(d);
        }
        let g = k.generator();
        let alpha = radix[..lo.len()].iter().map(|&d| k.pow(g, d)).collect();
        let beta = (0..lo.len()).map(|_| k.random_nonzero(rng)).collect();
        Ok(GeometricSequence {
            alpha,
            beta,
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            radix,
        })
    }

    pub fn nvars(&self) -> usize {
        self.alpha.len()
    }

    /// Number of exponent vectors in the window.
    pub fn capacity(&self) -> u64 {
        *self.radix.last().unwrap()
    }

    pub fn contains(&self, e: &[i64]) -> bool {
        e.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| l <= x && x <= h)
    }

    /// The i-th point (beta_j alpha_j^i)_j.
    pub fn point(&self, k: &PrimeField, i: u64) -> Vec<Fp> {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(&a, &b)| k.mul(b, k.pow(a, i)))
            .collect()
    }

    /// alpha^e = g^(Kronecker index of e)
    pub fn root_of(&self, k: &PrimeField, e: &[i64]) -> Fp {
        e.iter()
            .zip(&self.alpha)
            .fold(1, |acc, (&x, &a)| k.mul(acc, k.pow_signed(a, x)))
    }

    /// beta^e
    pub fn beta_power(&self, k: &PrimeField, e: &[i64]) -> Fp {
        e.iter()
            .zip(&self.beta)
            .fold(1, |acc, (&x, &b)| k.mul(acc, k.pow_signed(b, x)))
    }

    /// Inverse of `root_of` on the window.
    pub fn decode(&self, k: &PrimeField, r: Fp) -> Result<Vec<i64>> {
        let order = k.order() as i128;
        let log = k.discrete_log(r)? as i128;
        let offset: i128 = self
            .lo
            .iter()
            .zip(&self.radix)
            .map(|(&l, &d)| l as i128 * d as i128)
            .sum();
        let idx = (log - offset).rem_euclid(order) as u64;
        if idx >= self.capacity() {
            return Err(Error::InterpolationFailed("root outside the exponent window"));
        }
        Ok((0..self.nvars())
            .map(|j| {
                let width = (self.hi[j] - self.lo[j] + 1) as u64;
                ((idx / self.radix[j]) % width) as i64 + self.lo[j]
            })
            .collect())
    }
}

/// [F(point i0 + j) for j in 0..m], by stepping each term's root.
pub fn eval_sequence(
    k: &PrimeField,
    f: &SparsePoly,
    seq: &GeometricSequence,
    i0: u64,
    m: usize,
) -> Vec<Fp> {
    let mut out = vec![0; m];
    for (e, c) in f.terms() {
        let r = seq.root_of(k, e);
        let mut t = k.mul(k.mul(c, seq.beta_power(k, e)), k.pow(r, i0));
        for v in out.iter_mut() {
            *v = k.add(*v, t);
            t = k.mul(t, r);
        }
    }
    out
}

/// Recovers F with at most `s` terms from values at points 0..2s.
pub fn prony_interpolate<R: Rng + ?Sized>(
    k: &PrimeField,
    values: &[Fp],
    seq: &GeometricSequence,
    s: usize,
    rng: &mut R,
) -> Result<SparsePoly> {
    if values.len() < 2 * s {
        return Err(Error::Precondition("need 2s values"));
    }
    let (c, l) = unipoly::berlekamp_massey(k, &values[..2 * s]);
    if l == 0 {
        return Ok(SparsePoly::zero(seq.nvars()));
    }
    if l > s {
        return Err(Error::InterpolationFailed("linear complexity exceeds the term bound"));
    }
    if c.len() != l + 1 {
        return Err(Error::InterpolationFailed("connection polynomial has a zero root"));
    }
    let lambda = c.reverse(l);
    let roots = unipoly::roots(k, &lambda, rng);
    if roots.len() != l {
        return Err(Error::InterpolationFailed("connection polynomial does not split"));
    }
    let coeffs = unipoly::transposed_vandermonde_solve(k, &roots, &values[..l])?;
    let mut out = SparsePoly::zero(seq.nvars());
    for (&r, &c) in roots.iter().zip(&coeffs) {
        let e = seq.decode(k, r)?;
        let c = k.mul(c, k.inv_nz(seq.beta_power(k, &e)));
        if c == 0 {
            return Err(Error::InterpolationFailed("vanishing coefficient"));
        }
        out.add_term(k, e, c);
    }
    if out.len() != l {
        return Err(Error::InterpolationFailed("colliding exponents"));
    }
    Ok(out)
}

/// The polynomial supported on `support` matching values at points 0..s.
pub fn interpolate_known_support(
    k: &PrimeField,
    support: &[Vec<i64>],
    values: &[Fp],
    seq: &GeometricSequence,
) -> Result<SparsePoly> {
    let roots: Vec<Fp> = support.iter().map(|e| seq.root_of(k, e)).collect();
    let coeffs = unipoly::transposed_vandermonde_solve(k, &roots, values)?;
    let mut out = SparsePoly::zero(seq.nvars());
    for (e, &c) in support.iter().zip(&coeffs) {
        out.add_term(k, e.clone(), k.mul(c, k.inv_nz(seq.beta_power(k, e))));
    }
    Ok(out)
}

/// Compares the candidate with the oracle at one random point with
/// nonzero coordinates.
pub fn verify_candidate<R, O>(k: &PrimeField, oracle: O, candidate: &SparsePoly, rng: &mut R) -> bool
where
    R: Rng + ?Sized,
    O: Fn(&[Fp]) -> Fp,
{
    let z: Vec<Fp> = (0..candidate.nvars()).map(|_| k.random_nonzero(rng)).collect();
    candidate.eval(k, &z).map(|v| v == oracle(&z)).unwrap_or(false)
}

/// Product by evaluation and interpolation with a doubling term bound.
pub fn sparse_mul<R: Rng + ?Sized>(
    k: &PrimeField,
    a: &SparsePoly,
    b: &SparsePoly,
    rng: &mut R,
) -> Result<SparsePoly> {
    if a.nvars() != b.nvars() {
        return Err(Error::ArityMismatch(a.nvars(), b.nvars()));
    }
    if a.is_zero() || b.is_zero() {
        return Ok(SparsePoly::zero(a.nvars()));
    }
    if a.nvars() == 0 || a.len() == 1 || b.len() == 1 {
        return Ok(a.mul(k, b));
    }
    let lo: Vec<i64> = a.min_exponents().iter().zip(b.min_exponents()).map(|(x, y)| x + y).collect();
    let hi: Vec<i64> = a.max_exponents().iter().zip(b.max_exponents()).map(|(x, y)| x + y).collect();
    let seq = match GeometricSequence::with_window(k, &lo, &hi, rng) {
        Ok(seq) => seq,
        Err(Error::KroneckerOverflow) => return Ok(a.mul(k, b)),
        Err(e) => return Err(e),
    };
    let cap = (a.len() * b.len()).min(seq.capacity() as usize);
    let mut values: Vec<Fp> = Vec::new();
    let mut s = 1;
    loop {
        let have = values.len();
        let need = 2 * s;
        let va = eval_sequence(k, a, &seq, have as u64, need - have);
        let vb = eval_sequence(k, b, &seq, have as u64, need - have);
        values.extend(va.iter().zip(&vb).map(|(&x, &y)| k.mul(x, y)));
        if let Ok(c) = prony_interpolate(k, &values, &seq, s, rng) {
            let oracle = |z: &[Fp]| k.mul(a.eval(k, z).unwrap(), b.eval(k, z).unwrap());
            if verify_candidate(k, oracle, &c, rng) {
                return Ok(c);
            }
        }
        if s >= cap {
            return Ok(a.mul(k, b));
        }
        s = (2 * s).min(cap);
    }
}

/// Default cap on the quotient term bound in `sparse_exact_divide`.
pub const DIVIDE_TERM_BUDGET: usize = 1 << 14;

/// Exact quotient C / A in the Laurent ring via evaluation and
/// interpolation, confirmed by exact re-multiplication.
pub fn sparse_exact_divide<R: Rng + ?Sized>(
    k: &PrimeField,
    c: &SparsePoly,
    a: &SparsePoly,
    rng: &mut R,
) -> Result<SparsePoly> {
    if a.nvars() != c.nvars() {
        return Err(Error::ArityMismatch(c.nvars(), a.nvars()));
    }
    if a.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let n = c.nvars();
    if c.is_zero() {
        return Ok(SparsePoly::zero(n));
    }
    if a.len() == 1 || n == 0 {
        return c.div_exact(k, a);
    }
    let (vc, c0) = c.strip_monomial();
    let (va, a0) = a.strip_monomial();
    let shift: Vec<i64> = vc.iter().zip(&va).map(|(x, y)| x - y).collect();
    let hi: Vec<i64> = c0
        .max_exponents()
        .iter()
        .zip(a0.max_exponents())
        .map(|(x, y)| x - y)
        .collect();
    if hi.iter().any(|&x| x < 0) {
        return Err(Error::NotDivisible);
    }
    // Necessary condition: divisibility of a univariate projection.
    let z: Vec<Fp> = (0..n).map(|_| k.random_nonzero(rng)).collect();
    let project = |f: &SparsePoly| {
        let mut coeffs = vec![0; f.total_degree() as usize + 1];
        for (e, c) in f.terms() {
            let d = e.iter().sum::<i64>() as usize;
            let v = e.iter().zip(&z).fold(c, |acc, (&x, &zi)| k.mul(acc, k.pow(zi, x as u64)));
            coeffs[d] = k.add(coeffs[d], v);
        }
        DensePoly::from_coeffs(coeffs)
    };
    let pa = project(&a0);
    if !pa.is_zero() && !unipoly::rem(k, &project(&c0), &pa)?.is_zero() {
        return Err(Error::NotDivisible);
    }
    let lo = vec![0; n];
    let seq = match GeometricSequence::with_window(k, &lo, &hi, rng) {
        Ok(seq) => seq,
        Err(Error::KroneckerOverflow) => return c.div_exact(k, a),
        Err(e) => return Err(e),
    };
    let dense = seq.capacity() as usize;
    let cap = dense.min(DIVIDE_TERM_BUDGET);
    let mut values: Vec<Fp> = Vec::new();
    let mut s = 1;
    loop {
        let have = values.len();
        let need = 2 * s;
        let vc = eval_sequence(k, &c0, &seq, have as u64, need - have);
        let va = eval_sequence(k, &a0, &seq, have as u64, need - have);
        for (x, y) in vc.into_iter().zip(va) {
            if y == 0 {
                // A vanishes on the progression; fall back to long division.
                return c.div_exact(k, a);
            }
            values.push(k.mul(x, k.inv_nz(y)));
        }
        let (_, l) = unipoly::berlekamp_massey(k, &values);
        if let Ok(q) = prony_interpolate(k, &values, &seq, s, rng) {
            if q.mul(k, &a0) == c0 {
                return Ok(q.mul_monomial(&shift));
            }
            if l < s {
                return Err(Error::NotDivisible);
            }
        }
        if s >= cap {
            return Err(if cap == dense {
                Error::NotDivisible
            } else {
                Error::TermBudgetExceeded
            });
        }
        s = (2 * s).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parse(k: &PrimeField, s: &str, n: usize) -> SparsePoly {
        SparsePoly::parse(k, s, Some(n)).unwrap()
    }

    fn fixed_seq(k: &PrimeField, alpha: Vec<Fp>, lo: Vec<i64>, hi: Vec<i64>) -> GeometricSequence {
        let mut radix = vec![1u64];
        for (l, h) in lo.iter().zip(&hi) {
            radix.push(radix.last().unwrap() * (h - l + 1) as u64);
        }
        let n = alpha.len();
        let _ = k;
        GeometricSequence {
            alpha,
            beta: vec![1; n],
            lo,
            hi,
            radix,
        }
    }

    #[test]
    fn sequence_construction() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seq = GeometricSequence::new(&k, &[10, 10, 10], &mut rng, false).unwrap();
        assert_eq!(seq.capacity(), 1331);
        let seq = GeometricSequence::new(&k, &[7], &mut rng, false).unwrap();
        assert_eq!(seq.alpha, vec![k.generator()]);
        let k101 = PrimeField::new(101).unwrap();
        assert_eq!(
            GeometricSequence::new(&k101, &[9, 9], &mut rng, false),
            Err(Error::KroneckerOverflow)
        );
        assert_eq!(
            GeometricSequence::new(&k, &[1 << 40, 1 << 40], &mut rng, false),
            Err(Error::KroneckerOverflow)
        );
    }

    #[test]
    fn evaluation_matches_direct() {
        let k = PrimeField::new(101).unwrap();
        let f = parse(&k, "3*x1^2*x2 + 5", 2);
        let seq = fixed_seq(&k, vec![2, 3], vec![0, 0], vec![2, 1]);
        let vals = eval_sequence(&k, &f, &seq, 0, 4);
        for (i, v) in vals.iter().enumerate() {
            let pt = [k.pow(2, i as u64), k.pow(3, i as u64)];
            assert_eq!(*v, f.eval(&k, &pt).unwrap());
        }
        assert_eq!(&vals[..2], &[8, 41]);
        let c = SparsePoly::constant(2, 5);
        assert_eq!(eval_sequence(&k, &c, &seq, 0, 3), vec![5, 5, 5]);
        let x = SparsePoly::var(2, 0);
        assert_eq!(eval_sequence(&k, &x, &seq, 0, 3), vec![1, 2, 4]);
    }

    #[test]
    fn prony_roundtrip() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let seq = GeometricSequence::new(&k, &[3, 3], &mut rng, false).unwrap();
        let f = parse(&k, "3*x1^2*x2 + 5", 2);
        let vals = eval_sequence(&k, &f, &seq, 0, 4);
        assert_eq!(prony_interpolate(&k, &vals, &seq, 2, &mut rng).unwrap(), f);
        let c = SparsePoly::constant(2, 5);
        let vals = eval_sequence(&k, &c, &seq, 0, 2);
        assert_eq!(prony_interpolate(&k, &vals, &seq, 1, &mut rng).unwrap(), c);
        let g = parse(&k, "x1^3 + x1*x2 + 7*x2^3", 2);
        let vals = eval_sequence(&k, &g, &seq, 0, 4);
        match prony_interpolate(&k, &vals, &seq, 2, &mut rng) {
            Ok(wrong) => {
                assert_ne!(wrong, g);
                let oracle = |z: &[Fp]| g.eval(&k, z).unwrap();
                assert!(!verify_candidate(&k, oracle, &wrong, &mut rng));
            }
            Err(e) => assert!(matches!(e, Error::InterpolationFailed(_))),
        }
    }

    #[test]
    fn laurent_roundtrip() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seq = GeometricSequence::new(&k, &[4, 4, 4], &mut rng, true).unwrap();
        let f = parse(&k, "x1^-4*x2^3 - 2*x3^-1 + 9*x1^4*x2^-4*x3^4", 3);
        let vals = eval_sequence(&k, &f, &seq, 0, 6);
        assert_eq!(prony_interpolate(&k, &vals, &seq, 3, &mut rng).unwrap(), f);
    }

    #[test]
    fn known_support() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let seq = GeometricSequence::new(&k, &[3, 3], &mut rng, false).unwrap();
        let f = parse(&k, "3*x1^2*x2 + 5", 2);
        let vals = eval_sequence(&k, &f, &seq, 0, 2);
        assert_eq!(interpolate_known_support(&k, &f.support(), &vals, &seq).unwrap(), f);
        assert_eq!(
            interpolate_known_support(&k, &[vec![0, 0]], &[7], &seq).unwrap(),
            SparsePoly::constant(2, 7)
        );
        assert_eq!(
            interpolate_known_support(&k, &[vec![1, 0], vec![1, 0]], &[1, 2], &seq),
            Err(Error::SingularSystem)
        );
    }

    #[test]
    fn verification() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = parse(&k, "x1^2 + x2", 2);
        let oracle = |z: &[Fp]| f.eval(&k, z).unwrap();
        assert!(verify_candidate(&k, oracle, &f, &mut rng));
        assert!(!verify_candidate(&k, oracle, &parse(&k, "x1^2 + 2*x2", 2), &mut rng));
        let zero = SparsePoly::zero(2);
        assert!(verify_candidate(&k, |_: &[Fp]| 0, &zero, &mut rng));
    }

    #[test]
    fn mul_and_divide() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = parse(&k, "x1 - 1", 1);
        let b = parse(&k, "x1^4 + x1^3 + x1^2 + x1 + 1", 1);
        let c = sparse_mul(&k, &a, &b, &mut rng).unwrap();
        assert_eq!(c, parse(&k, "x1^5 - 1", 1));
        assert_eq!(sparse_exact_divide(&k, &c, &a, &mut rng).unwrap(), b);
        let k7 = PrimeField::new(7).unwrap();
        let c7 = parse(&k7, "x1^5 - 1", 1);
        assert_eq!(
            sparse_exact_divide(&k7, &c7, &parse(&k7, "x1 - 2", 1), &mut rng),
            Err(Error::NotDivisible)
        );
        let p = parse(&k, "x1*x2^3 + 2*x3 - x1^2", 3);
        let q = parse(&k, "x2 - x3^2*x1 + 4", 3);
        let pq = sparse_mul(&k, &p, &q, &mut rng).unwrap();
        assert_eq!(pq, p.mul(&k, &q));
        assert_eq!(sparse_exact_divide(&k, &pq, &p, &mut rng).unwrap(), q);
        let off = pq.add(&k, &SparsePoly::var(3, 1));
        assert!(sparse_exact_divide(&k, &off, &p, &mut rng).is_err());
    }
}
