//! Direct multivariate reductions: content detection and extraction,
//! l-th roots and square-free factorization.
//!
//! Root extraction and square-free factorization tag the input with a
//! regularizing weight, so every image along the geometric progression is
//! a monic polynomial in t whose univariate answer can be interpolated
//! back. Both keep an exact fallback for tiny fields.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bivar::{content_x, BivPoly};
use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::mfactor::Factorization;
use crate::mgcd::{self, content_in, dense_rec};
use crate::project::{collapse, interpolate_images, laurent_window, Projector};
use crate::sparseinterp::{sparse_exact_divide, sparse_mul};
use crate::sparsepoly::{regularizing_weight, Monomial, SparsePoly};
use crate::unipoly::{self, DensePoly};

const RETRIES: usize = 4;
const WEIGHT_TRIALS: usize = 16;

/// Variables in which F is not content-free.
///
/// Variable x_i is probed through B(x, t) = F(x_i := x, x_j := a_j t + g_j)
/// for random a_j, g_j; x_i offends when cont_x B is nonconstant.
pub fn contentfree_test<R: Rng + ?Sized>(k: &PrimeField, f: &SparsePoly, rng: &mut R) -> Result<Vec<usize>> {
    if f.is_constant() {
        return Err(Error::Precondition("polynomial must be nonconstant"));
    }
    let n = f.nvars();
    let shift: Vec<i64> = f.min_exponents().iter().map(|&v| (-v).max(0)).collect();
    let f = f.mul_monomial(&shift);
    let lin: Vec<DensePoly> = (0..n)
        .map(|_| DensePoly::from_coeffs(vec![k.random(rng), k.random_nonzero(rng)]))
        .collect();
    let maxe = f.max_exponents();
    let mut powers: Vec<Vec<DensePoly>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut pj = vec![DensePoly::one()];
        for e in 1..=maxe[j].max(0) as usize {
            pj.push(unipoly::mul(k, &pj[e - 1], &lin[j]));
        }
        powers.push(pj);
    }
    let mut out = Vec::new();
    for i in f.variables() {
        let mut rows = vec![DensePoly::zero(); maxe[i] as usize + 1];
        for (e, c) in f.terms() {
            let mut h = DensePoly::constant(c);
            for j in (0..n).filter(|&j| j != i && e[j] > 0) {
                h = unipoly::mul(k, &h, &powers[j][e[j] as usize]);
            }
            let r = &mut rows[e[i] as usize];
            *r = unipoly::add(k, r, &h);
        }
        let b = BivPoly::from_rows(rows);
        if content_x(k, &b, rng)?.deg() > 0 {
            out.push(i);
        }
    }
    Ok(out)
}

/// (C, F / C) with C the content of F in x_i, computed as the gcd of
/// F(x_i := sigma) and F(x_i := tau).
pub fn content_extract<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &SparsePoly,
    i: usize,
    rng: &mut R,
) -> Result<(SparsePoly, SparsePoly)> {
    if i >= f.nvars() {
        return Err(Error::ArityMismatch(i + 1, f.nvars()));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    for _ in 0..RETRIES {
        let a = f.substitute(k, &[(i, k.random_nonzero(rng))])?;
        let b = f.substitute(k, &[(i, k.random_nonzero(rng))])?;
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let c = mgcd::gcd(k, &a, &b, rng)?;
        if c.is_constant() {
            return Err(Error::Precondition("polynomial is content-free in this variable"));
        }
        match sparse_exact_divide(k, f, &c, rng) {
            Ok(q) => return Ok((c, q)),
            Err(Error::TermBudgetExceeded) => {
                if let Ok(q) = f.div_exact(k, &c) {
                    return Ok((c, q));
                }
            }
            Err(_) => {}
        }
    }
    Err(Error::VerificationFailed("content does not divide"))
}

/// F = c R^l with R normalized (graded-lex leading coefficient 1).
pub fn mroot_extract<R: Rng + ?Sized>(k: &PrimeField, f: &SparsePoly, l: usize, rng: &mut R) -> Result<(Fp, SparsePoly)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if l == 0 {
        return Err(Error::Precondition("root index must be positive"));
    }
    if l == 1 {
        return Ok(f.normalize(k));
    }
    let n = f.nvars();
    let (v, f0) = f.strip_monomial();
    if v.iter().any(|&x| x % l as i64 != 0) {
        return Err(Error::NotAPower);
    }
    let nu: Vec<i64> = v.iter().map(|&x| x / l as i64).collect();
    let (c, r) = if f0.is_constant() {
        (f0.lc(), SparsePoly::one(n))
    } else if let [x] = f0.variables()[..] {
        let (c, g) = unipoly::root_extract(k, &f0.to_dense(x)?, l)?;
        (c, SparsePoly::from_dense(n, x, &g))
    } else {
        match root_by_tagging(k, &f0, l, rng) {
            Ok(cr) => cr,
            Err(Error::NotAPower) => return Err(Error::NotAPower),
            Err(_) => root_exact(k, &f0, l)?,
        }
    };
    let (lr, r) = r.mul_monomial(&nu).normalize(k);
    let c = k.mul(c, k.pow(lr, l as u64));
    Ok((c, r))
}

fn root_by_tagging<R: Rng + ?Sized>(k: &PrimeField, f0: &SparsePoly, l: usize, rng: &mut R) -> Result<(Fp, SparsePoly)> {
    let n = f0.nvars();
    let w = regularizing_weight(f0, WEIGHT_TRIALS, rng);
    let prof = f0.weight_profile(&w)?;
    if !prof.regular {
        return Err(Error::Precondition("no regularizing weight"));
    }
    if prof.ec % l as i64 != 0 {
        return Err(Error::NotAPower);
    }
    let bounds: Vec<i64> = f0.max_exponents().iter().map(|&d| d / l as i64).collect();
    let vars: Vec<usize> = (0..n).collect();
    let c = f0.lc();
    let mut last = Error::NormalizationFailed;
    for _ in 0..RETRIES {
        let seq = laurent_window(k, &bounds, rng)?;
        let pr = Projector::new(k, f0, &seq, &vars, &w, None);
        let images = |i: u64| -> Result<Vec<DensePoly>> {
            let img = pr.univariate(k, i);
            if img.deg() != pr.t_degree() || img.coeff(0) == 0 {
                return Err(Error::NormalizationFailed);
            }
            Ok(vec![unipoly::root_extract(k, &img, l)?.1])
        };
        let mut vrng = ChaCha8Rng::seed_from_u64(rng.next_u64());
        let accept = |parts: &[Vec<SparsePoly>]| {
            let r = collapse(k, n, &parts[0]).strip_monomial().1.normalize(k).1;
            power_matches(k, &r, l, c, f0, &mut vrng)
        };
        match interpolate_images(k, &seq, images, 1, rng, accept) {
            Ok(parts) => {
                let r = collapse(k, n, &parts[0]).strip_monomial().1.normalize(k).1;
                return Ok((c, r));
            }
            Err(Error::NotAPower) => return Err(Error::NotAPower),
            Err(e @ Error::KroneckerOverflow) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn power_matches<R: Rng + ?Sized>(k: &PrimeField, r: &SparsePoly, l: usize, c: Fp, f: &SparsePoly, rng: &mut R) -> bool {
    let mut acc = SparsePoly::constant(r.nvars(), c);
    for _ in 0..l {
        match sparse_mul(k, &acc, r, rng) {
            Ok(p) if p.len() <= 4 * f.len() => acc = p,
            _ => return false,
        }
    }
    acc == *f
}

/// Term-by-term root in graded-lex order: each new term of R is read off
/// the leading term of F/c - R^l. Needs l invertible in F_p.
fn root_exact(k: &PrimeField, f0: &SparsePoly, l: usize) -> Result<(Fp, SparsePoly)> {
    let n = f0.nvars();
    let li = k.inv(k.from_u64(l as u64)).map_err(|_| Error::Unsupported("root index divisible by the characteristic"))?;
    let (c, g) = f0.normalize(k);
    let lead: Vec<i64> = g.leading_term().expect("nonzero").0.to_vec();
    if lead.iter().any(|&x| x % l as i64 != 0) {
        return Err(Error::NotAPower);
    }
    let m0: Vec<i64> = lead.iter().map(|&x| x / l as i64).collect();
    let hi: Vec<i64> = g.max_exponents().iter().map(|&d| d / l as i64).collect();
    let mut r = SparsePoly::monomial(n, m0.clone(), 1);
    loop {
        let rem = g.sub(k, &r.pow(k, l as u32));
        let Some((e, a)) = rem.leading_term() else {
            return Ok((c, r));
        };
        let m: Vec<i64> = e.iter().zip(&m0).map(|(x, y)| x - (l as i64 - 1) * y).collect();
        let smallest = r.terms().next().expect("nonzero").0.to_vec();
        let below = Monomial(m.clone()) < Monomial(smallest);
        if !below || m.iter().zip(&hi).any(|(&x, &h)| x < 0 || x > h) {
            return Err(Error::NotAPower);
        }
        r.add_term(k, m, k.mul(a, li));
    }
}

/// Square-free factorization F = unit * prod P_m^m.
pub fn msquarefree<R: Rng + ?Sized>(k: &PrimeField, f: &SparsePoly, rng: &mut R) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_polynomial() {
        return Err(Error::NegativeExponent);
    }
    let n = f.nvars();
    let (v, f0) = f.strip_monomial();
    let mut parts: BTreeMap<usize, SparsePoly> = BTreeMap::new();
    if !f0.is_constant() {
        let found = if let [x] = f0.variables()[..] {
            let sqf = unipoly::squarefree_decomposition(k, &f0.to_dense(x)?)?;
            sqf.factors
                .iter()
                .map(|(g, m)| (*m, SparsePoly::from_dense(n, x, g)))
                .collect()
        } else {
            let d = f0.total_degree() as u128;
            let small = (k.p() as u128) <= d * d;
            let tagged = if small { Err(Error::KroneckerOverflow) } else { sqf_by_tagging(k, &f0, rng) };
            match tagged {
                Ok(p) => p,
                Err(_) => sqf_exact(k, &f0)?,
            }
        };
        for (m, g) in found {
            mul_into(k, &mut parts, m, &g);
        }
    }
    for (j, &e) in v.iter().enumerate() {
        if e > 0 {
            mul_into(k, &mut parts, e as usize, &SparsePoly::var(n, j));
        }
    }
    let out = Factorization {
        nvars: n,
        unit: 1,
        factors: parts.into_iter().map(|(m, g)| (g, m)).collect(),
    };
    let mut out = out.canonicalize(k);
    out.unit = k.mul(out.unit, f.lc());
    if out.expand(k) != *f {
        return Err(Error::VerificationFailed("square-free parts do not re-expand"));
    }
    Ok(out)
}

fn mul_into(k: &PrimeField, parts: &mut BTreeMap<usize, SparsePoly>, m: usize, g: &SparsePoly) {
    let slot = parts.entry(m).or_insert_with(|| SparsePoly::one(g.nvars()));
    *slot = slot.mul(k, g).normalize(k).1;
}

fn sqf_by_tagging<R: Rng + ?Sized>(k: &PrimeField, f0: &SparsePoly, rng: &mut R) -> Result<Vec<(usize, SparsePoly)>> {
    let n = f0.nvars();
    let w = regularizing_weight(f0, WEIGHT_TRIALS, rng);
    if !f0.weight_profile(&w)?.regular {
        return Err(Error::Precondition("no regularizing weight"));
    }
    let bounds = f0.max_exponents();
    let vars: Vec<usize> = (0..n).collect();
    let target = f0.normalize(k).1;
    let assemble = |parts: &[Vec<SparsePoly>]| -> Vec<(usize, SparsePoly)> {
        parts
            .iter()
            .enumerate()
            .map(|(i, h)| (i + 1, collapse(k, n, h).strip_monomial().1.normalize(k).1))
            .filter(|(_, g)| !g.is_constant())
            .collect()
    };
    let mut last = Error::NormalizationFailed;
    for _ in 0..RETRIES {
        let seq = laurent_window(k, &bounds, rng)?;
        let pr = Projector::new(k, f0, &seq, &vars, &w, None);
        let images = |i: u64| -> Result<Vec<DensePoly>> {
            let img = pr.univariate(k, i);
            if img.deg() != pr.t_degree() || img.coeff(0) == 0 {
                return Err(Error::NormalizationFailed);
            }
            let sqf = unipoly::squarefree_decomposition(k, &img)?;
            let top = sqf.factors.iter().map(|f| f.1).max().unwrap_or(0);
            let mut out = vec![DensePoly::one(); top];
            for (g, m) in sqf.factors {
                out[m - 1] = g;
            }
            Ok(out)
        };
        let mut vrng = ChaCha8Rng::seed_from_u64(rng.next_u64());
        let accept = |parts: &[Vec<SparsePoly>]| {
            let mut acc = SparsePoly::one(n);
            for (m, g) in assemble(parts) {
                for _ in 0..m {
                    match sparse_mul(k, &acc, &g, &mut vrng) {
                        Ok(p) => acc = p,
                        Err(_) => return false,
                    }
                }
            }
            acc.normalize(k).1 == target
        };
        let start = (f0.len() / (f0.total_degree() as usize + 1)).max(1);
        match interpolate_images(k, &seq, images, start, rng, accept) {
            Ok(parts) => return Ok(assemble(&parts)),
            Err(e @ Error::KroneckerOverflow) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// d/dx_v
fn derivative(k: &PrimeField, f: &SparsePoly, v: usize) -> SparsePoly {
    let mut out = SparsePoly::zero(f.nvars());
    for (e, c) in f.terms() {
        if e[v] != 0 {
            let mut e2 = e.to_vec();
            e2[v] -= 1;
            out.add_term(k, e2, k.mul(c, k.from_i64(e[v])));
        }
    }
    out
}

/// Exact Yun in the main variable over the dense recursive gcd, recursing
/// on the content.
fn sqf_exact(k: &PrimeField, f: &SparsePoly) -> Result<Vec<(usize, SparsePoly)>> {
    let Some(&v) = f.variables().last() else {
        return Ok(Vec::new());
    };
    if (f.degree_in(v) as u64) >= k.p() {
        return Err(Error::Unsupported("degree reaches the characteristic"));
    }
    let (cont, prim) = content_in(k, f, v);
    let mut out = sqf_exact(k, &cont)?;
    let df = derivative(k, &prim, v);
    let a0 = dense_rec(k, &prim, &df);
    let mut b = prim.div_exact(k, &a0)?;
    let c = df.div_exact(k, &a0)?;
    let mut d = c.sub(k, &derivative(k, &b, v));
    let mut i = 1;
    while b.degree_in(v) > 0 {
        let a = dense_rec(k, &b, &d);
        b = b.div_exact(k, &a)?;
        d = d.div_exact(k, &a)?.sub(k, &derivative(k, &b, v));
        if a.degree_in(v) > 0 {
            out.push((i, a));
        }
        i += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sp(k: &PrimeField, s: &str, n: usize) -> SparsePoly {
        SparsePoly::parse(k, s, Some(n)).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(23)
    }

    fn prod(k: &PrimeField, n: usize, c: u64, fs: &[(&str, u32)]) -> SparsePoly {
        fs.iter()
            .fold(SparsePoly::constant(n, c), |acc, (f, e)| acc.mul(k, &sp(k, f, n).pow(k, *e)))
    }

    #[test]
    fn contentfree_examples() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        assert_eq!(contentfree_test(&k, &sp(&k, "x1*x2 + x1", 2), &mut r).unwrap(), vec![0, 1]);
        assert!(contentfree_test(&k, &sp(&k, "x1 + x2", 2), &mut r).unwrap().is_empty());
        assert_eq!(contentfree_test(&k, &prod(&k, 3, 1, &[("x2 + x3", 1), ("x1 + 1", 1)]), &mut r).unwrap(), vec![0, 1, 2]);
        assert!(contentfree_test(&k, &sp(&k, "x1*x2 + x3", 3), &mut r).unwrap().is_empty());
        assert!(contentfree_test(&k, &sp(&k, "7", 2), &mut r).is_err());
    }

    #[test]
    fn cyclotomic_content() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let f = sp(&k, "x1^20 - 1 + x1^9*x2 - x1^5*x2 - x1^4*x2 + x2", 2);
        assert_eq!(contentfree_test(&k, &f, &mut r).unwrap(), vec![1]);
        let (c, q) = content_extract(&k, &f, 1, &mut r).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c, sp(&k, "x1^8 + x1^7 + x1^6 + x1^5 - x1^3 - x1^2 - x1 - 1", 2));
        assert_eq!(c.mul(&k, &q), f);
    }

    #[test]
    fn content_extract_examples() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let (c, q) = content_extract(&k, &prod(&k, 2, 1, &[("x1", 1), ("x2 + 1", 1)]), 1, &mut r).unwrap();
        assert_eq!((c, q), (sp(&k, "x1", 2), sp(&k, "x2 + 1", 2)));
        assert_eq!(
            content_extract(&k, &sp(&k, "x1 + x2", 2), 1, &mut r),
            Err(Error::Precondition("polynomial is content-free in this variable"))
        );
    }

    #[test]
    fn root_examples() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let f = prod(&k, 2, 1, &[("x1 + x2", 2)]);
        assert_eq!(mroot_extract(&k, &f, 2, &mut r).unwrap(), (1, sp(&k, "x1 + x2", 2)));
        assert_eq!(mroot_extract(&k, &sp(&k, "x1^2 + x2", 2), 2, &mut r), Err(Error::NotAPower));
        let g = prod(&k, 4, 5, &[("x1^3*x2^6", 1), ("x1*x3 - 2*x2 + x3^2*x4 + 9", 3)]);
        let (c, root) = mroot_extract(&k, &g, 3, &mut r).unwrap();
        assert_eq!(root.pow(&k, 3).scale(&k, c), g);
        assert_eq!(mroot_extract(&k, &g, 2, &mut r), Err(Error::NotAPower));
        let k7 = PrimeField::new(7).unwrap();
        let h = prod(&k7, 3, 3, &[("x1*x2 + x3", 3)]);
        assert_eq!(mroot_extract(&k7, &h, 3, &mut r).unwrap(), (3, sp(&k7, "x1*x2 + x3", 3)));
    }

    #[test]
    fn tagged_paths_without_fallback() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let base = sp(&k, "x1^2*x2^-1 + 3*x2*x3 - x1 + 7", 3).strip_monomial().1;
        let f = base.pow(&k, 3).scale(&k, 11);
        let (c, root) = root_by_tagging(&k, &f, 3, &mut r).unwrap();
        assert_eq!(root.pow(&k, 3).scale(&k, c), f);
        let g = prod(&k, 3, 1, &[("x1*x2 + x3", 1), ("x1 - x3^2 + 2", 2), ("x2^3 + x1", 3)]);
        let parts = sqf_by_tagging(&k, &g, &mut r).unwrap();
        let ms: Vec<usize> = parts.iter().map(|p| p.0).collect();
        assert_eq!(ms, vec![1, 2, 3]);
        assert_eq!(parts[1].1, sp(&k, "x1 - x3^2 + 2", 3).normalize(&k).1);
    }

    #[test]
    fn exact_root_agrees() {
        let k = PrimeField::goldilocks();
        let f = prod(&k, 3, 1, &[("2*x1^2 + x2*x3 - 1", 4)]);
        let (c, r) = root_exact(&k, &f, 4).unwrap();
        assert_eq!(r.pow(&k, 4).scale(&k, c), f);
        assert_eq!(root_exact(&k, &sp(&k, "x1^4 + x2", 3), 4), Err(Error::NotAPower));
    }

    #[test]
    fn squarefree_examples() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let f = prod(&k, 2, 1, &[("x1 + x2", 2), ("x1 - x2", 1)]);
        let s = msquarefree(&k, &f, &mut r).unwrap();
        assert_eq!(s.factors, vec![(sp(&k, "x1 - x2", 2), 1), (sp(&k, "x1 + x2", 2), 2)]);
        assert_eq!(s.unit, 1);
        let g = prod(&k, 3, 1, &[("x1 + x2*x3", 3)]);
        assert_eq!(msquarefree(&k, &g, &mut r).unwrap().factors, vec![(sp(&k, "x1 + x2*x3", 3), 3)]);
        let h = sp(&k, "4*x1*x2 + 2*x3 - 6", 3);
        let s = msquarefree(&k, &h, &mut r).unwrap();
        assert_eq!((s.unit, s.factors), (4, vec![(h.normalize(&k).1, 1)]));
        let m = prod(&k, 3, 1, &[("x1^2*x3", 1), ("x2 + x3", 2), ("x1 + 1", 1)]);
        let s = msquarefree(&k, &m, &mut r).unwrap();
        assert_eq!(s.expand(&k), m);
        assert_eq!(s.factors.len(), 2);
    }

    #[test]
    fn squarefree_small_field() {
        let k = PrimeField::new(11).unwrap();
        let mut r = rng();
        let f = prod(&k, 3, 1, &[("x1 + x2 + 1", 2), ("x1*x2 + x3", 1), ("x3 + 2", 3)]);
        let s = msquarefree(&k, &f, &mut r).unwrap();
        assert_eq!(s.expand(&k), f);
        let ms: Vec<usize> = s.factors.iter().map(|x| x.1).collect();
        assert_eq!(ms.iter().sum::<usize>(), 6);
        assert_eq!(sqf_exact(&k, &f.normalize(&k).1).unwrap().len(), 3);
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = Vec<(Vec<i64>, u64)>> {
        prop::collection::vec((prop::collection::vec(0i64..3, n), 1u64..1000), 1..5)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn root_of_power_is_identity(terms in arb_poly(3), l in 2usize..5, c in 1u64..1000, seed in any::<u64>()) {
            let k = PrimeField::goldilocks();
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let base = SparsePoly::from_terms(&k, 3, terms);
            prop_assume!(!base.is_constant());
            let want = base.normalize(&k).1;
            let f = base.pow(&k, l as u32).scale(&k, c);
            let (c2, root) = mroot_extract(&k, &f, l, &mut r).unwrap();
            prop_assert_eq!(root.pow(&k, l as u32).scale(&k, c2), f);
            // the root is unique up to an l-th root of unity
            prop_assert_eq!(root.pow(&k, l as u32), want.pow(&k, l as u32));
        }

        #[test]
        fn squarefree_reexpands(a in arb_poly(3), b in arb_poly(3), seed in any::<u64>()) {
            let k = PrimeField::goldilocks();
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let a = SparsePoly::from_terms(&k, 3, a);
            let b = SparsePoly::from_terms(&k, 3, b);
            let f = a.mul(&k, &b.pow(&k, 2));
            prop_assume!(!f.is_constant());
            let s = msquarefree(&k, &f, &mut r).unwrap();
            prop_assert_eq!(s.expand(&k), f);
            for (i, (p, _)) in s.factors.iter().enumerate() {
                for (q, _) in &s.factors[i + 1..] {
                    prop_assert!(mgcd::gcd_dense(&k, p, q).unwrap().is_constant());
                }
            }
        }
    }
}
