//! Multivariate gcd: iteration on the number of variables, tagging with a
//! regularizing weight, and an exact dense fallback.
//!
//! Results are normalized to graded-lex leading coefficient 1.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::project::{collapse, interpolate_images, laurent_window, Projector};
use crate::sparseinterp::{interpolate_known_support, sparse_exact_divide, GeometricSequence};
use crate::sparsepoly::{regularizing_weight, Monomial, SparsePoly};
use crate::unipoly::{self, DensePoly};

/// Random anchors c_1..c_n used for A^[k] = A(x_1..x_k, c_{k+1}..c_n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionContext {
    pub c: Vec<Fp>,
}

impl ProjectionContext {
    pub fn random<R: Rng + ?Sized>(k: &PrimeField, n: usize, rng: &mut R) -> Self {
        ProjectionContext {
            c: (0..n).map(|_| k.random_nonzero(rng)).collect(),
        }
    }

    /// A^[level]: variables level.. replaced by their anchors.
    pub fn project(&self, k: &PrimeField, a: &SparsePoly, level: usize) -> Result<SparsePoly> {
        let sub: Vec<(usize, Fp)> = (level..self.c.len()).map(|j| (j, self.c[j])).collect();
        a.substitute(k, &sub)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdConfig {
    /// The regularizing method goes first when ec <= factor * max degree.
    pub ecart_factor: i64,
    /// Random weight probes.
    pub trials: usize,
    /// Fresh sequences per method before giving up.
    pub retries: usize,
}

impl Default for GcdConfig {
    fn default() -> Self {
        GcdConfig {
            ecart_factor: 4,
            trials: 16,
            retries: 4,
        }
    }
}

/// Divisibility check by exact sparse division.
pub(crate) fn divides<R: Rng + ?Sized>(k: &PrimeField, g: &SparsePoly, f: &SparsePoly, rng: &mut R) -> bool {
    match sparse_exact_divide(k, f, g, rng) {
        Ok(_) => true,
        Err(Error::TermBudgetExceeded) => g.divides(k, f),
        Err(_) => false,
    }
}

fn finish(k: &PrimeField, nu: &[i64], g: &SparsePoly) -> SparsePoly {
    g.mul_monomial(nu).normalize(k).1
}

struct Stripped {
    nu: Vec<i64>,
    p: SparsePoly,
    q: SparsePoly,
}

/// Strips monomial factors; Ok(Err(g)) when the answer is already known.
fn prepare(k: &PrimeField, p: &SparsePoly, q: &SparsePoly) -> Result<std::result::Result<Stripped, SparsePoly>> {
    if p.nvars() != q.nvars() {
        return Err(Error::ArityMismatch(p.nvars(), q.nvars()));
    }
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (vp, p0) = p.strip_monomial();
    let (vq, q0) = q.strip_monomial();
    let nu: Vec<i64> = vp.iter().zip(&vq).map(|(a, b)| *a.min(b)).collect();
    let n = p.nvars();
    if p0.is_constant() || q0.is_constant() {
        return Ok(Err(finish(k, &nu, &SparsePoly::one(n))));
    }
    if let Some(v) = univariate_var(&p0, &q0) {
        let g = unipoly::gcd(k, &p0.to_dense(v)?, &q0.to_dense(v)?);
        return Ok(Err(finish(k, &nu, &SparsePoly::from_dense(n, v, &g))));
    }
    Ok(Ok(Stripped { nu, p: p0, q: q0 }))
}

fn univariate_var(p: &SparsePoly, q: &SparsePoly) -> Option<usize> {
    let mut vars = p.variables();
    vars.extend(q.variables());
    vars.sort_unstable();
    vars.dedup();
    match vars.as_slice() {
        [v] => Some(*v),
        _ => None,
    }
}

fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::NormalizationFailed | Error::VerificationFailed(_) | Error::InterpolationFailed(_)
    )
}

/// Iterative gcd: G^[1] by a univariate gcd, then G^[k+1] from G^[k] by
/// per-point gcds in x_{k+1}, anchored so that G^[k+1](.., c_{k+1}) = G^[k],
/// and interpolation on the support of G^[k] (Prony if that fails).
pub fn gcd_iterative<R: Rng + ?Sized>(
    k: &PrimeField,
    p: &SparsePoly,
    q: &SparsePoly,
    ctx: &ProjectionContext,
    rng: &mut R,
) -> Result<SparsePoly> {
    gcd_iterative_with(k, p, q, ctx, &GcdConfig::default(), rng)
}

pub fn gcd_iterative_with<R: Rng + ?Sized>(
    k: &PrimeField,
    p: &SparsePoly,
    q: &SparsePoly,
    ctx: &ProjectionContext,
    cfg: &GcdConfig,
    rng: &mut R,
) -> Result<SparsePoly> {
    let s = match prepare(k, p, q)? {
        Ok(s) => s,
        Err(g) => return Ok(g),
    };
    if ctx.c.len() != p.nvars() || ctx.c.contains(&0) {
        return Err(Error::Precondition("anchors must be nonzero, one per variable"));
    }
    let n = p.nvars();
    let p1 = ctx.project(k, &s.p, 1)?.to_dense(0)?;
    let q1 = ctx.project(k, &s.q, 1)?.to_dense(0)?;
    if p1.is_zero() || q1.is_zero() {
        return Err(Error::NormalizationFailed);
    }
    let mut g = SparsePoly::from_dense(n, 0, &unipoly::gcd(k, &p1, &q1));
    for lev in 1..n {
        let pl = ctx.project(k, &s.p, lev + 1)?;
        let ql = ctx.project(k, &s.q, lev + 1)?;
        let hi: Vec<i64> = (0..lev).map(|j| s.p.degree_in(j).min(s.q.degree_in(j))).collect();
        let mut last = Error::NormalizationFailed;
        let mut next = None;
        for _ in 0..cfg.retries.max(1) {
            let seq = GeometricSequence::with_window(k, &vec![0; lev], &hi, rng)?;
            match lift_gcd_level(k, &pl, &ql, &g, ctx.c[lev], lev, &seq, rng) {
                Ok(h) => {
                    next = Some(h);
                    break;
                }
                Err(e) if retryable(&e) => last = e,
                Err(e) => return Err(e),
            }
        }
        g = next.ok_or(last)?;
    }
    if !divides(k, &g, &s.p, rng) || !divides(k, &g, &s.q, rng) {
        return Err(Error::VerificationFailed("gcd candidate does not divide both inputs"));
    }
    Ok(finish(k, &s.nu, &g))
}

#[allow(clippy::too_many_arguments)]
fn lift_gcd_level<R: Rng + ?Sized>(
    k: &PrimeField,
    pl: &SparsePoly,
    ql: &SparsePoly,
    g: &SparsePoly,
    anchor_c: Fp,
    lev: usize,
    seq: &GeometricSequence,
    rng: &mut R,
) -> Result<SparsePoly> {
    let n = pl.nvars();
    let vars: Vec<usize> = (0..lev).collect();
    let zeros = vec![0; lev];
    let prp = Projector::new(k, pl, seq, &vars, &zeros, Some(lev));
    let prq = Projector::new(k, ql, seq, &vars, &zeros, Some(lev));
    let prg = Projector::new(k, g, seq, &vars, &zeros, None);
    let image = |i: u64| -> Result<DensePoly> {
        let a = prp.in_u(k, i);
        let b = prq.in_u(k, i);
        if a.is_zero() || b.is_zero() {
            return Err(Error::NormalizationFailed);
        }
        let h = unipoly::gcd(k, &a, &b);
        let anchor = prg.in_u(k, i).coeff(0);
        let hv = h.eval(k, anchor_c);
        if anchor == 0 || hv == 0 {
            return Err(Error::NormalizationFailed);
        }
        Ok(h.scale(k, k.mul(anchor, k.inv_nz(hv))))
    };
    let embed = |graded: &[SparsePoly]| -> SparsePoly {
        let mut out = SparsePoly::zero(n);
        for (j, h) in graded.iter().enumerate() {
            for (e, c) in h.terms() {
                let mut full = vec![0; n];
                full[..lev].copy_from_slice(e);
                full[lev] = j as i64;
                out.add_term(k, full, c);
            }
        }
        out
    };
    let consistent = |cand: &SparsePoly| cand.substitute(k, &[(lev, anchor_c)]).map(|x| x == *g).unwrap_or(false);

    // known support: supp G^[k+1] lies in supp G^[k] x N
    let support: Vec<Vec<i64>> = g.support().iter().map(|e| e[..lev].to_vec()).collect();
    let m = support.len() as u64;
    let images: Vec<DensePoly> = (0..m).map(image).collect::<Result<_>>()?;
    let d = images[0].deg();
    if images.iter().any(|h| h.deg() != d) {
        return Err(Error::NormalizationFailed);
    }
    let mut graded = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let vals: Vec<Fp> = images.iter().map(|h| h.coeff(j)).collect();
        let h = interpolate_known_support(k, &support, &vals, seq)?;
        graded.push(h);
    }
    let cand = embed(&graded);
    if consistent(&cand) {
        return Ok(cand);
    }
    let parts = interpolate_images(
        k,
        seq,
        |i| image(i).map(|h| vec![h]),
        support.len(),
        rng,
        |parts| consistent(&embed(&parts[0])),
    )?;
    Ok(embed(&parts[0]))
}

/// Gcd through a regularizing weight w: per point the monic gcd in t of
/// the tagged, normalized inputs, adaptive sparse interpolation of its
/// coefficients (Laurent in x), then t := 1 and a monomial correction.
pub fn gcd_regularizing<R: Rng + ?Sized>(
    k: &PrimeField,
    p: &SparsePoly,
    q: &SparsePoly,
    rng: &mut R,
) -> Result<SparsePoly> {
    gcd_regularizing_with(k, p, q, &GcdConfig::default(), rng)
}

/// A regular weight for P or Q with minimal ecart.
pub fn best_weight<R: Rng + ?Sized>(p: &SparsePoly, q: &SparsePoly, trials: usize, rng: &mut R) -> (Vec<i64>, i64) {
    let mut best: Option<(Vec<i64>, i64)> = None;
    for f in [p, q] {
        let w = regularizing_weight(f, trials, rng);
        if let Ok(prof) = f.weight_profile(&w) {
            if prof.regular && best.as_ref().is_none_or(|b| prof.ec < b.1) {
                best = Some((w, prof.ec));
            }
        }
    }
    best.unwrap_or_else(|| (vec![0; p.nvars()], i64::MAX))
}

pub fn gcd_regularizing_with<R: Rng + ?Sized>(
    k: &PrimeField,
    p: &SparsePoly,
    q: &SparsePoly,
    cfg: &GcdConfig,
    rng: &mut R,
) -> Result<SparsePoly> {
    let s = match prepare(k, p, q)? {
        Ok(s) => s,
        Err(g) => return Ok(g),
    };
    let n = p.nvars();
    let (w, ec) = best_weight(&s.p, &s.q, cfg.trials, rng);
    if ec == i64::MAX {
        return Err(Error::Precondition("no regularizing weight"));
    }
    let bounds: Vec<i64> = (0..n).map(|j| s.p.degree_in(j).min(s.q.degree_in(j))).collect();
    let vars: Vec<usize> = (0..n).collect();
    let start = s.p.len().min(s.q.len()) / (ec as usize + 1);
    let mut last = Error::NormalizationFailed;
    for _ in 0..cfg.retries.max(1) {
        let seq = laurent_window(k, &bounds, rng)?;
        let prp = Projector::new(k, &s.p, &seq, &vars, &w, None);
        let prq = Projector::new(k, &s.q, &seq, &vars, &w, None);
        let images = |i: u64| -> Result<Vec<DensePoly>> {
            let a = prp.univariate(k, i);
            let b = prq.univariate(k, i);
            if a.is_zero() || b.is_zero() {
                return Err(Error::NormalizationFailed);
            }
            Ok(vec![unipoly::gcd(k, &a, &b)])
        };
        let mut verify_rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng.next_u64());
        let accept = |parts: &[Vec<SparsePoly>]| {
            let g = collapse(k, n, &parts[0]).strip_monomial().1;
            divides(k, &g, &s.p, &mut verify_rng) && divides(k, &g, &s.q, &mut verify_rng)
        };
        match interpolate_images(k, &seq, images, start, rng, accept) {
            Ok(parts) => {
                let g = collapse(k, n, &parts[0]).strip_monomial().1;
                return Ok(finish(k, &s.nu, &g));
            }
            Err(e) if retryable(&e) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(match last {
        Error::NormalizationFailed => Error::VerificationFailed("no consistent evaluation sequence"),
        e => e,
    })
}


/// Dispatcher: the regularizing method first when a low-ecart weight
/// exists, the iterative method otherwise; each falls back to the other,
/// and both fall back to the exact dense gcd.
pub fn gcd<R: Rng + ?Sized>(k: &PrimeField, p: &SparsePoly, q: &SparsePoly, rng: &mut R) -> Result<SparsePoly> {
    gcd_with(k, p, q, &GcdConfig::default(), rng)
}

pub fn gcd_with<R: Rng + ?Sized>(
    k: &PrimeField,
    p: &SparsePoly,
    q: &SparsePoly,
    cfg: &GcdConfig,
    rng: &mut R,
) -> Result<SparsePoly> {
    if p.nvars() != q.nvars() {
        return Err(Error::ArityMismatch(p.nvars(), q.nvars()));
    }
    match (p.is_zero(), q.is_zero()) {
        (true, true) => return Err(Error::ZeroPolynomial),
        (true, false) => return Ok(q.normalize(k).1),
        (false, true) => return Ok(p.normalize(k).1),
        _ => {}
    }
    let (_, ec) = best_weight(p, q, cfg.trials, rng);
    let maxdeg = p.max_degree().max(q.max_degree());
    let regular_first = ec <= cfg.ecart_factor.saturating_mul(maxdeg);
    for round in 0..2 {
        let use_regular = regular_first == (round == 0);
        let res = if use_regular {
            gcd_regularizing_with(k, p, q, cfg, rng)
        } else {
            let ctx = ProjectionContext::random(k, p.nvars(), rng);
            gcd_iterative_with(k, p, q, &ctx, cfg, rng)
        };
        match res {
            Ok(g) => return Ok(g),
            Err(Error::KroneckerOverflow) => break,
            Err(e) if retryable(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    gcd_dense(k, p, q)
}

/// Exact gcd by dense evaluation and interpolation; needs no random
/// choices.
pub fn gcd_dense(k: &PrimeField, p: &SparsePoly, q: &SparsePoly) -> Result<SparsePoly> {
    match prepare(k, p, q)? {
        Ok(s) => Ok(finish(k, &s.nu, &dense_rec(k, &s.p, &s.q))),
        Err(g) => Ok(g),
    }
}

fn main_var(a: &SparsePoly, b: &SparsePoly) -> Option<usize> {
    a.variables().into_iter().chain(b.variables()).max()
}

fn coeff_of(f: &SparsePoly, v: usize, d: i64) -> SparsePoly {
    f.coefficients_in(v).remove(&d).unwrap_or_else(|| SparsePoly::zero(f.nvars()))
}

/// (content, primitive part) with respect to x_v.
pub(crate) fn content_in(k: &PrimeField, f: &SparsePoly, v: usize) -> (SparsePoly, SparsePoly) {
    let mut c = SparsePoly::zero(f.nvars());
    for (_, h) in f.coefficients_in(v) {
        c = dense_rec(k, &c, &h);
        if c.is_constant() {
            break;
        }
    }
    let c = c.normalize(k).1;
    let prim = f.div_exact(k, &c).expect("content divides");
    (c, prim)
}

/// Normalized gcd of two polynomials: univariate Euclid in one variable,
/// otherwise evaluation of the last variable at 1, 2, .. with dense
/// interpolation of the images. Fields too small to supply enough points
/// fall back to primitive remainder sequences.
pub(crate) fn dense_rec(k: &PrimeField, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    if a.is_zero() {
        return b.normalize(k).1;
    }
    if b.is_zero() {
        return a.normalize(k).1;
    }
    let n = a.nvars();
    let mut vars = a.variables();
    vars.extend(b.variables());
    vars.sort_unstable();
    vars.dedup();
    match vars.as_slice() {
        [] => return SparsePoly::one(n),
        [x] => {
            let (da, db) = (a.to_dense(*x).expect("polynomial"), b.to_dense(*x).expect("polynomial"));
            return SparsePoly::from_dense(n, *x, &unipoly::gcd(k, &da, &db));
        }
        _ => {}
    }
    let v = *vars.last().unwrap();
    brown(k, a, b, v).unwrap_or_else(|| prs_rec(k, a, b))
}

/// Coefficients in F[x_v] of the monomials in the other variables.
fn split_v(f: &SparsePoly, v: usize) -> BTreeMap<Monomial, DensePoly> {
    let mut out: BTreeMap<Monomial, Vec<Fp>> = BTreeMap::new();
    for (e, c) in f.terms() {
        let mut rest = e.to_vec();
        let d = std::mem::replace(&mut rest[v], 0) as usize;
        let row = out.entry(Monomial(rest)).or_default();
        if row.len() <= d {
            row.resize(d + 1, 0);
        }
        row[d] = c;
    }
    out.into_iter().map(|(m, c)| (m, DensePoly::from_coeffs(c))).collect()
}

fn join_v(k: &PrimeField, n: usize, v: usize, parts: &BTreeMap<Monomial, DensePoly>) -> SparsePoly {
    let mut out = SparsePoly::zero(n);
    for (m, c) in parts {
        for (d, &x) in c.coeffs().iter().enumerate() {
            if x != 0 {
                let mut e = m.0.clone();
                e[v] = d as i64;
                out.add_term(k, e, x);
            }
        }
    }
    out
}

fn content_v(k: &PrimeField, parts: &BTreeMap<Monomial, DensePoly>) -> DensePoly {
    let mut g = DensePoly::zero();
    for c in parts.values() {
        g = unipoly::gcd(k, &g, c);
        if g.deg() == 0 {
            break;
        }
    }
    g
}

fn divide_v(k: &PrimeField, parts: &BTreeMap<Monomial, DensePoly>, c: &DensePoly) -> BTreeMap<Monomial, DensePoly> {
    parts
        .iter()
        .map(|(m, p)| (m.clone(), unipoly::div_exact(k, p, c).expect("content divides")))
        .collect()
}

fn brown(k: &PrimeField, a: &SparsePoly, b: &SparsePoly, v: usize) -> Option<SparsePoly> {
    let n = a.nvars();
    let (sa, sb) = (split_v(a, v), split_v(b, v));
    let (ca, cb) = (content_v(k, &sa), content_v(k, &sb));
    let (pa, pb) = (divide_v(k, &sa, &ca), divide_v(k, &sb, &cb));
    let gc = SparsePoly::from_dense(n, v, &unipoly::gcd(k, &ca, &cb));
    let (la, lb) = (pa.last_key_value()?.1, pb.last_key_value()?.1);
    let gamma = unipoly::gcd(k, la, lb);
    let (a1, b1) = (join_v(k, n, v, &pa), join_v(k, n, v, &pb));
    let bound = gamma.deg() + pa.values().map(DensePoly::deg).max()?.min(pb.values().map(DensePoly::deg).max()?);
    let mut points: Vec<Fp> = Vec::new();
    let mut images: Vec<BTreeMap<Monomial, Fp>> = Vec::new();
    let mut lead: Option<Monomial> = None;
    let mut alpha: u64 = 0;
    loop {
        alpha += 1;
        if alpha >= k.p() {
            return None;
        }
        let x = k.from_u64(alpha);
        if la.eval(k, x) == 0 || lb.eval(k, x) == 0 {
            continue;
        }
        let g = dense_rec(k, &a1.substitute(k, &[(v, x)]).ok()?, &b1.substitute(k, &[(v, x)]).ok()?);
        let lm = Monomial(g.leading_term()?.0.to_vec());
        if lm.0.iter().all(|&e| e == 0) {
            return Some(gc.normalize(k).1);
        }
        match lead.as_ref().map(|l| lm.cmp(l)) {
            Some(std::cmp::Ordering::Greater) => continue,
            Some(std::cmp::Ordering::Less) | None => {
                lead = Some(lm);
                points.clear();
                images.clear();
            }
            Some(std::cmp::Ordering::Equal) => {}
        }
        let s = gamma.eval(k, x);
        points.push(x);
        images.push(g.terms().map(|(e, c)| (Monomial(e.to_vec()), k.mul(c, s))).collect());
        if points.len() <= bound {
            continue;
        }
        let mut keys: Vec<Monomial> = images.iter().flat_map(|m| m.keys().cloned()).collect();
        keys.sort();
        keys.dedup();
        let parts: BTreeMap<Monomial, DensePoly> = keys
            .into_iter()
            .map(|m| {
                let vals: Vec<Fp> = images.iter().map(|img| img.get(&m).copied().unwrap_or(0)).collect();
                (m, unipoly::interpolate(k, &points, &vals).expect("distinct points"))
            })
            .collect();
        let h = join_v(k, n, v, &divide_v(k, &parts, &content_v(k, &parts)));
        if a1.div_exact(k, &h).is_ok() && b1.div_exact(k, &h).is_ok() {
            return Some(gc.mul(k, &h).normalize(k).1);
        }
    }
}

/// Primitive remainder sequences in the largest variable, recursing on
/// contents.
fn prs_rec(k: &PrimeField, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    if a.is_zero() {
        return b.normalize(k).1;
    }
    if b.is_zero() {
        return a.normalize(k).1;
    }
    let Some(v) = main_var(a, b) else {
        return SparsePoly::one(a.nvars());
    };
    let (ca, pa) = content_in(k, a, v);
    let (cb, pb) = content_in(k, b, v);
    let c = prs_rec(k, &ca, &cb);
    let (mut u, mut w) = (pa, pb);
    if u.degree_in(v) < w.degree_in(v) {
        std::mem::swap(&mut u, &mut w);
    }
    while !w.is_zero() {
        if w.degree_in(v) == 0 {
            u = SparsePoly::one(a.nvars());
            break;
        }
        let r = prem(k, &u, &w, v);
        u = w;
        w = if r.is_zero() { r } else { content_in(k, &r, v).1 };
    }
    c.mul(k, &u).normalize(k).1
}

fn prem(k: &PrimeField, u: &SparsePoly, w: &SparsePoly, v: usize) -> SparsePoly {
    let n = u.nvars();
    let dw = w.degree_in(v);
    let lw = coeff_of(w, v, dw);
    let mut r = u.clone();
    while !r.is_zero() && r.degree_in(v) >= dw {
        let dr = r.degree_in(v);
        let lr = coeff_of(&r, v, dr);
        let mut e = vec![0; n];
        e[v] = dr - dw;
        r = r.mul(k, &lw).sub(k, &lr.mul_monomial(&e).mul(k, w));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sp(k: &PrimeField, s: &str, n: usize) -> SparsePoly {
        SparsePoly::parse(k, s, Some(n)).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn simple_pairs() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let a = sp(&k, "x1^2 - x2^2", 2);
        let b = sp(&k, "x1 - x2", 2);
        let ctx = ProjectionContext::random(&k, 2, &mut r);
        assert_eq!(gcd_iterative(&k, &a, &b, &ctx, &mut r).unwrap(), b);
        assert_eq!(gcd_regularizing(&k, &a, &b, &mut r).unwrap(), b);
        assert_eq!(gcd(&k, &a, &b, &mut r).unwrap(), b);
        assert_eq!(gcd_dense(&k, &a, &b).unwrap(), b);
        let c = sp(&k, "x1*x2 - x1", 2);
        let d = sp(&k, "x2^2 - x2", 2);
        let want = sp(&k, "x2 - 1", 2);
        assert_eq!(gcd_regularizing(&k, &c, &d, &mut r).unwrap(), want);
        assert_eq!(gcd_iterative(&k, &c, &d, &ctx, &mut r).unwrap(), want);
        assert_eq!(gcd_dense(&k, &c, &d).unwrap(), want);
    }

    #[test]
    fn degenerate_inputs() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let f = sp(&k, "3*x1^2*x2 + x3 - 1", 3);
        let nf = f.normalize(&k).1;
        assert_eq!(gcd(&k, &f, &f, &mut r).unwrap(), nf);
        assert_eq!(gcd(&k, &f, &SparsePoly::zero(3), &mut r).unwrap(), nf);
        assert_eq!(gcd(&k, &SparsePoly::zero(3), &SparsePoly::zero(3), &mut r), Err(Error::ZeroPolynomial));
        let g = sp(&k, "x1 + x2 + x3", 3);
        assert!(gcd_regularizing(&k, &f, &g, &mut r).unwrap().is_constant());
        assert_eq!(gcd(&k, &sp(&k, "x1^2*x2", 3), &sp(&k, "x1*x2^3", 3), &mut r).unwrap(), sp(&k, "x1*x2", 3));
    }

    #[test]
    fn cyclotomic_pair() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let a = sp(&k, "x1^20 - 1", 1);
        let b = sp(&k, "x1^9 - x1^5 - x1^4 + 1", 1);
        let g = gcd(&k, &a, &b, &mut r).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g, sp(&k, "x1^8 + x1^7 + x1^6 + x1^5 - x1^3 - x1^2 - x1 - 1", 1));
    }

    #[test]
    fn small_field_falls_back_to_dense() {
        let k = PrimeField::new(7).unwrap();
        let mut r = rng();
        let g = sp(&k, "x1*x2 + x3 + 2", 3);
        let a = g.mul(&k, &sp(&k, "x1 + x2^2", 3));
        let b = g.mul(&k, &sp(&k, "x3*x1 + 3", 3));
        assert_eq!(gcd(&k, &a, &b, &mut r).unwrap(), g.normalize(&k).1);
    }

    #[test]
    fn monic_in_x1_uses_unit_weight() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let g = sp(&k, "x1^3 + x2*x3 + 5*x2^2", 3);
        let a = g.mul(&k, &sp(&k, "x1^2 + x3 + 1", 3));
        let b = g.mul(&k, &sp(&k, "x1 + x2^2 - x3", 3));
        let ctx = ProjectionContext::random(&k, 3, &mut r);
        let x = gcd_regularizing(&k, &a, &b, &mut r).unwrap();
        let y = gcd_iterative(&k, &a, &b, &ctx, &mut r).unwrap();
        assert_eq!(x, g.normalize(&k).1);
        assert_eq!(x, y);
    }

    fn small_poly() -> impl Strategy<Value = Vec<(i64, [i64; 3])>> {
        prop::collection::vec((-5i64..=5, [0i64..3, 0i64..3, 0i64..3]), 1..5)
    }

    fn build(k: &PrimeField, t: &[(i64, [i64; 3])]) -> SparsePoly {
        SparsePoly::from_terms(k, 3, t.iter().map(|(c, e)| (e.to_vec(), k.from_i64(*c))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn gcd_divides_and_is_unit_invariant(a in small_poly(), b in small_poly(), g in small_poly(), s in 1u64..1000) {
            let k = PrimeField::goldilocks();
            let mut r = rng();
            let (a, b, g) = (build(&k, &a), build(&k, &b), build(&k, &g));
            prop_assume!(!a.is_zero() && !b.is_zero() && !g.is_zero());
            let p = a.mul(&k, &g);
            let q = b.mul(&k, &g);
            let h = gcd(&k, &p, &q, &mut r).unwrap();
            prop_assert!(h.divides(&k, &p) && h.divides(&k, &q));
            prop_assert!(g.divides(&k, &h));
            prop_assert_eq!(gcd(&k, &p.scale(&k, s), &q, &mut r).unwrap(), h.clone());
            prop_assert_eq!(gcd_dense(&k, &p, &q).unwrap(), h);
        }
    }
}
