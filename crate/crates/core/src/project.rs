//! Projections of sparse polynomials along a geometric progression and
//! recovery of sparse polynomials from their projected images.
//!
//! A projection keeps at most two free variables: a tag t, collecting the
//! weighted degree of the sequence variables, and optionally one original
//! variable u. Everything else is specialized to beta alpha^i.

use rayon::prelude::*;

use crate::bivar::BivPoly;
use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::sparseinterp::{prony_interpolate, GeometricSequence, DIVIDE_TERM_BUDGET};
use crate::sparsepoly::SparsePoly;
use crate::unipoly::DensePoly;

/// Terms of A(beta alpha^i x t^w, u) ready for evaluation at any i.
#[derive(Clone, Debug)]
pub struct Projector {
    /// (t level, u exponent, c beta^e, alpha^e)
    terms: Vec<(i64, usize, Fp, Fp)>,
    offset: i64,
    top: i64,
}

impl Projector {
    /// Sequence coordinate j stands for variable `vars[j]` with weight
    /// `w[j]`; `u` is kept symbolic. All remaining exponents must be zero.
    pub fn new(
        k: &PrimeField,
        a: &SparsePoly,
        seq: &GeometricSequence,
        vars: &[usize],
        w: &[i64],
        u: Option<usize>,
    ) -> Self {
        assert_eq!(vars.len(), seq.nvars());
        assert_eq!(vars.len(), w.len());
        let mut terms = Vec::with_capacity(a.len());
        let mut sub = vec![0i64; vars.len()];
        for (e, c) in a.terms() {
            debug_assert!(e
                .iter()
                .enumerate()
                .all(|(v, &x)| x == 0 || vars.contains(&v) || Some(v) == u));
            for (s, &v) in sub.iter_mut().zip(vars) {
                *s = e[v];
            }
            let level: i64 = sub.iter().zip(w).map(|(x, y)| x * y).sum();
            let ue = u.map_or(0, |v| e[v].max(0) as usize);
            let coef = k.mul(c, seq.beta_power(k, &sub));
            terms.push((level, ue, coef, seq.root_of(k, &sub)));
        }
        let offset = terms.iter().map(|t| t.0).min().unwrap_or(0);
        let top = terms.iter().map(|t| t.0).max().unwrap_or(0);
        Projector { terms, offset, top }
    }

    /// Lowest t level, removed from every image.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn t_degree(&self) -> usize {
        (self.top - self.offset) as usize
    }

    /// Image at point i as a polynomial in t (u set to 1).
    pub fn univariate(&self, k: &PrimeField, i: u64) -> DensePoly {
        let mut c = vec![0; self.t_degree() + 1];
        for &(level, _, coef, root) in &self.terms {
            let j = (level - self.offset) as usize;
            c[j] = k.add(c[j], k.mul(coef, k.pow(root, i)));
        }
        DensePoly::from_coeffs(c)
    }

    /// Image at point i as a polynomial in u (t set to 1).
    pub fn in_u(&self, k: &PrimeField, i: u64) -> DensePoly {
        let du = self.terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut c = vec![0; du + 1];
        for &(_, ue, coef, root) in &self.terms {
            c[ue] = k.add(c[ue], k.mul(coef, k.pow(root, i)));
        }
        DensePoly::from_coeffs(c)
    }

    /// Image at point i with x = t and y = u.
    pub fn bivariate(&self, k: &PrimeField, i: u64) -> BivPoly {
        let du = self.terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut grid = vec![vec![0; du + 1]; self.t_degree() + 1];
        for &(level, ue, coef, root) in &self.terms {
            let j = (level - self.offset) as usize;
            grid[j][ue] = k.add(grid[j][ue], k.mul(coef, k.pow(root, i)));
        }
        BivPoly::from_rows(grid.into_iter().map(DensePoly::from_coeffs).collect())
    }
}

/// Recovers Laurent polynomials H_1..H_r from images h_l(i) = H_l(beta alpha^i, t)
/// given as polynomials in t; returns the t-coefficients of each H_l.
///
/// Every point must produce the same number of parts with the same
/// t-degrees, otherwise the sequence is rejected with NormalizationFailed.
/// Term bounds start at `start` and double per part until Prony
/// interpolation stabilizes; `accept` then gets the final say.
pub fn interpolate_images<R, E, A>(
    k: &PrimeField,
    seq: &GeometricSequence,
    images: E,
    start: usize,
    rng: &mut R,
    mut accept: A,
) -> Result<Vec<Vec<SparsePoly>>>
where
    R: rand::Rng + ?Sized,
    E: Fn(u64) -> Result<Vec<DensePoly>> + Sync,
    A: FnMut(&[Vec<SparsePoly>]) -> bool,
{
    let cap = (seq.capacity().min(usize::MAX as u64) as usize).min(DIVIDE_TERM_BUDGET);
    let first = images(0)?;
    let shape: Vec<usize> = first.iter().map(|f| f.deg()).collect();
    // values[l][j][i]
    let mut values: Vec<Vec<Vec<Fp>>> = shape.iter().map(|&d| vec![Vec::new(); d + 1]).collect();
    let push = |values: &mut Vec<Vec<Vec<Fp>>>, img: &[DensePoly]| -> Result<()> {
        if img.len() != shape.len() || img.iter().zip(&shape).any(|(f, &d)| f.deg() != d) {
            return Err(Error::NormalizationFailed);
        }
        for (vl, f) in values.iter_mut().zip(img) {
            for (j, v) in vl.iter_mut().enumerate() {
                v.push(f.coeff(j));
            }
        }
        Ok(())
    };
    push(&mut values, &first)?;
    let mut have = 1u64;
    let start = start.clamp(1, cap.max(1));
    let mut bounds = vec![start; shape.len()];
    let mut found: Vec<Option<Vec<SparsePoly>>> = vec![None; shape.len()];
    loop {
        let need = 2 * *bounds.iter().max().unwrap_or(&1) as u64;
        if need > have {
            let fresh: Vec<Result<Vec<DensePoly>>> = (have..need).into_par_iter().map(&images).collect();
            for img in fresh {
                push(&mut values, &img?)?;
            }
            have = need;
        }
        for l in 0..shape.len() {
            if found[l].is_some() {
                continue;
            }
            let s = bounds[l];
            let mut h = Vec::with_capacity(values[l].len());
            let mut ok = true;
            for v in &values[l] {
                match prony_interpolate(k, &v[..2 * s], seq, s, rng) {
                    Ok(c) if c.len() < s || s >= cap => h.push(c),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                found[l] = Some(h);
            }
        }
        if found.iter().all(Option::is_some) {
            let parts: Vec<Vec<SparsePoly>> = found.iter().map(|h| h.clone().unwrap()).collect();
            if accept(&parts) {
                return Ok(parts);
            }
            if bounds.iter().all(|&s| s >= cap) {
                return Err(Error::VerificationFailed("interpolated candidate rejected"));
            }
            for (s, f) in bounds.iter_mut().zip(found.iter_mut()) {
                *s = (*s * 2).min(cap);
                *f = None;
            }
        } else {
            for (s, f) in bounds.iter_mut().zip(&found) {
                if f.is_none() {
                    if *s >= cap {
                        return Err(Error::InterpolationFailed("term bound exhausted"));
                    }
                    *s = (*s * 2).min(cap);
                }
            }
        }
    }
}

/// Sum of graded pieces, i.e. t set to 1.
pub fn collapse(k: &PrimeField, n: usize, graded: &[SparsePoly]) -> SparsePoly {
    graded.iter().fold(SparsePoly::zero(n), |acc, h| acc.add(k, h))
}

/// Exponent bounds [-d, d] of a Laurent quotient by a leading monomial.
pub fn laurent_window<R: rand::Rng + ?Sized>(k: &PrimeField, bounds: &[i64], rng: &mut R) -> Result<GeometricSequence> {
    let hi: Vec<u64> = bounds.iter().map(|&d| d.max(0) as u64).collect();
    GeometricSequence::new(k, &hi, rng, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projector_images() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SparsePoly::parse(&k, "2*x1^2*x2 + 3*x1*x2^2 + x1*x2 + 3*x2 + 2*x3 + 4", Some(3)).unwrap();
        let seq = GeometricSequence::new(&k, &[3, 3], &mut rng, false).unwrap();
        let pr = Projector::new(&k, &f, &seq, &[0, 1], &[2, 1], Some(2));
        assert_eq!(pr.offset(), 0);
        assert_eq!(pr.t_degree(), 5);
        let i = 4;
        let pt = seq.point(&k, i);
        let img = pr.bivariate(&k, i);
        // coefficient of t^5 is 2 x1^2 x2 at the point
        let want = k.mul(2, k.mul(k.mul(pt[0], pt[0]), pt[1]));
        assert_eq!(img.coeff(5, 0), want);
        assert_eq!(img.coeff(0, 1), 2);
        assert_eq!(img.coeff(0, 0), 4);
        assert_eq!(pr.univariate(&k, i).coeff(0), 6);
    }

    #[test]
    fn recovers_parts() {
        let k = PrimeField::goldilocks();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = SparsePoly::parse(&k, "x1^2*x2^-1 + 7*x2 - 3", Some(2)).unwrap();
        let b = SparsePoly::parse(&k, "x1 - x2^3", Some(2)).unwrap();
        let seq = laurent_window(&k, &[4, 4], &mut rng).unwrap();
        let pa = Projector::new(&k, &a, &seq, &[0, 1], &[0, 0], None);
        let pb = Projector::new(&k, &b, &seq, &[0, 1], &[0, 0], None);
        let got = interpolate_images(
            &k,
            &seq,
            |i| Ok(vec![pa.univariate(&k, i), pb.univariate(&k, i)]),
            1,
            &mut rng,
            |_| true,
        )
        .unwrap();
        let got: Vec<SparsePoly> = got.iter().map(|g| collapse(&k, 2, g)).collect();
        assert_eq!(got, vec![a, b]);
    }
}
