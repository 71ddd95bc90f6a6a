//! Multivariate irreducible factorization.
//!
//! The main route lifts a bivariate factorization of
//! F^[2] = F(x_1, x_2, c_3, .., c_n) one variable at a time. At level k
//! every known factor is specialized along a geometric progression in
//! x_1..x_k collapsed onto one variable t, lifted bivariately in
//! (t, x_{k+1}) and interpolated on the support of its previous level.
//!
//! Projective lifting (one bivariate lift per point, no anchors) is
//! available separately for inputs whose Newton polygon allows it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bivar::{biv_factor, hensel_lift_multi, hensel_lift_single_slope, hensel_lift_two, BivPoly};
use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::mgcd::{divides, ProjectionContext};
use crate::mreduce::{content_extract, contentfree_test, msquarefree};
use crate::project::interpolate_images;
use crate::rng::stream;
use crate::sparseinterp::{interpolate_known_support, sparse_exact_divide, verify_candidate, GeometricSequence};
use crate::sparsepoly::{newton_polygon, SparsePoly};
use crate::unipoly::{self, DensePoly};

/// Fresh anchor draws before the monomial substitution fallback.
pub const ANCHOR_RETRIES: usize = 4;

/// unit * prod f^m, factors normalized to graded-lex leading coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub nvars: usize,
    pub unit: Fp,
    pub factors: Vec<(SparsePoly, usize)>,
}

impl Factorization {
    pub fn unit(nvars: usize, unit: Fp) -> Self {
        Factorization {
            nvars,
            unit,
            factors: Vec::new(),
        }
    }

    pub fn expand(&self, k: &PrimeField) -> SparsePoly {
        let mut acc = SparsePoly::constant(self.nvars, self.unit);
        for (f, m) in &self.factors {
            acc = acc.mul(k, &f.pow(k, *m as u32));
        }
        acc
    }

    /// Normalizes every factor into the unit, merges repeated factors,
    /// drops constants and sorts by factor (descending graded-lex) then
    /// multiplicity.
    pub fn canonicalize(mut self, k: &PrimeField) -> Self {
        let mut merged: Vec<(SparsePoly, usize)> = Vec::new();
        for (f, m) in self.factors.drain(..) {
            let (c, g) = f.normalize(k);
            self.unit = k.mul(self.unit, k.pow(c, m as u64));
            if g.is_constant() || m == 0 {
                continue;
            }
            match merged.iter_mut().find(|(h, _)| *h == g) {
                Some((_, e)) => *e += m,
                None => merged.push((g, m)),
            }
        }
        merged.sort_by(|a, b| b.0.terms().rev().cmp(a.0.terms().rev()).then(a.1.cmp(&b.1)));
        self.factors = merged;
        self
    }
}

/// Diagnostics of one lifting level (or of one whole attempt when
/// `level` is 2, the bivariate start).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub evaluations: usize,
    pub retries: usize,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub levels: Vec<LevelReport>,
    pub substitutions: usize,
}

impl LiftReport {
    fn record(&mut self, level: usize, evaluations: usize, retries: usize, failure: Option<&Error>) {
        self.levels.push(LevelReport {
            level,
            evaluations,
            retries,
            failure: failure.map(|e| e.to_string()),
        });
    }
}

/// Evaluation points x_j = beta_j alpha_j^i, or independent random points
/// when the field is too small for a Kronecker window.
enum Points {
    Geometric(GeometricSequence),
    Free(Vec<Vec<Fp>>),
}

impl Points {
    fn new<R: Rng + ?Sized>(k: &PrimeField, bounds: &[i64], count: usize, rng: &mut R) -> Result<Self> {
        let hi: Vec<u64> = bounds.iter().map(|&d| d.max(0) as u64).collect();
        match GeometricSequence::new(k, &hi, rng, false) {
            Ok(seq) => Ok(Points::Geometric(seq)),
            Err(Error::KroneckerOverflow) => Ok(Points::Free(
                (0..count)
                    .map(|_| (0..bounds.len()).map(|_| k.random_nonzero(rng)).collect())
                    .collect(),
            )),
            Err(e) => Err(e),
        }
    }

    fn point(&self, k: &PrimeField, i: usize) -> Vec<Fp> {
        match self {
            Points::Geometric(seq) => seq.point(k, i as u64),
            Points::Free(pts) => pts[i].clone(),
        }
    }

    /// Coefficients on `support` from the values at points 0..support.len().
    fn solve(&self, k: &PrimeField, support: &[Vec<i64>], values: &[Fp]) -> Result<SparsePoly> {
        match self {
            Points::Geometric(seq) => interpolate_known_support(k, support, values, seq),
            Points::Free(pts) => {
                let rows: Vec<Vec<Fp>> = pts[..support.len()]
                    .iter()
                    .map(|pt| support.iter().map(|e| monomial_value(k, e, pt)).collect())
                    .collect();
                let c = solve_linear(k, rows, values.to_vec())?;
                let mut out = SparsePoly::zero(pts[0].len());
                for (e, c) in support.iter().zip(c) {
                    out.add_term(k, e.clone(), c);
                }
                Ok(out)
            }
        }
    }
}

fn monomial_value(k: &PrimeField, e: &[i64], pt: &[Fp]) -> Fp {
    e.iter()
        .zip(pt)
        .fold(1, |acc, (&x, &v)| if x == 0 { acc } else { k.mul(acc, k.pow_signed(v, x)) })
}

/// Gaussian elimination on a square system.
fn solve_linear(k: &PrimeField, mut a: Vec<Vec<Fp>>, mut b: Vec<Fp>) -> Result<Vec<Fp>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| a[r][col] != 0)
            .ok_or(Error::InterpolationFailed("singular evaluation matrix"))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = k.inv_nz(a[col][col]);
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let f = k.mul(a[r][col], inv);
            let pivot = a[col].clone();
            for (x, &y) in a[r].iter_mut().zip(&pivot).skip(col) {
                *x = k.sub(*x, k.mul(f, y));
            }
            b[r] = k.sub(b[r], k.mul(f, b[col]));
        }
    }
    Ok((0..n).map(|i| k.mul(b[i], k.inv_nz(a[i][i]))).collect())
}

/// A(pt_0 t, .., pt_{l-1} t, x_u) as a bivariate polynomial with x = t and
/// y = x_u, where l = pt.len(). All other exponents must be zero.
fn project_tu(k: &PrimeField, a: &SparsePoly, pt: &[Fp], u: Option<usize>) -> BivPoly {
    let l = pt.len();
    let terms: Vec<(usize, usize, Fp)> = a
        .terms()
        .map(|(e, c)| {
            let level: i64 = e[..l].iter().sum();
            let ue = u.map_or(0, |u| e[u]);
            (level as usize, ue as usize, k.mul(c, monomial_value(k, &e[..l], pt)))
        })
        .collect();
    BivPoly::from_terms(k, &terms)
}

/// A(x_0, pt_0 t, .., pt_{n-2} t) with x = x_0 and y = t.
fn project_x0(k: &PrimeField, a: &SparsePoly, pt: &[Fp]) -> BivPoly {
    let terms: Vec<(usize, usize, Fp)> = a
        .terms()
        .map(|(e, c)| {
            let level: i64 = e[1..].iter().sum();
            (e[0] as usize, level as usize, k.mul(c, monomial_value(k, &e[1..], pt)))
        })
        .collect();
    BivPoly::from_terms(k, &terms)
}

fn x_valuation(f: &BivPoly) -> usize {
    f.rows().iter().position(|r| !r.is_zero()).unwrap_or(0)
}

fn drop_x(f: &BivPoly, v: usize) -> BivPoly {
    BivPoly::from_rows(f.rows()[v..].to_vec())
}

fn raise_x(f: &BivPoly, v: usize) -> BivPoly {
    let mut rows = vec![DensePoly::zero(); v];
    rows.extend(f.rows().iter().cloned());
    BivPoly::from_rows(rows)
}

fn lift_err(e: Error) -> Error {
    match e {
        Error::LiftFailed(m) => Error::LiftError(m),
        Error::ReconstructFailed => Error::LiftError("denominator reconstruction failed"),
        other => other,
    }
}

/// One evaluation point of a lifting level: the images of the tracked
/// factors at level kk+1, in (t, x_kk).
fn lift_point<R: Rng + ?Sized>(
    k: &PrimeField,
    f_next: &SparsePoly,
    tracked: &[SparsePoly],
    mults: &[usize],
    ck: Fp,
    pt: &[Fp],
    rng: &mut R,
) -> Result<Vec<BivPoly>> {
    let kk = pt.len();
    let fimg = project_tu(k, f_next, pt, Some(kk));
    let fimg = drop_x(&fimg, x_valuation(&fimg));
    let fy = fimg.shift_y(k, ck);
    let f0 = fy.eval_y(k, 0);
    if f0.is_zero() || f0.deg() != fy.dx() {
        return Err(Error::LiftError("leading coefficient vanishes at the anchor"));
    }
    let mut p0s = Vec::with_capacity(tracked.len() + 1);
    let mut ms = mults.to_vec();
    let mut scale = Vec::with_capacity(tracked.len());
    let mut prod = DensePoly::one();
    for (p, &m) in tracked.iter().zip(mults) {
        let img = project_tu(k, p, pt, None).eval_y(k, 0);
        let v = img.valuation().ok_or(Error::LiftError("factor vanishes at the point"))?;
        let (l, monic) = img.unshift(v).monic(k);
        prod = unipoly::mul(k, &prod, &unipoly::pow(k, &monic, m as u64));
        p0s.push(monic);
        scale.push((l, v));
    }
    let rest = unipoly::div_exact(k, &f0, &prod).map_err(|_| Error::LiftError("factor images do not divide"))?;
    if rest.deg() > 0 {
        p0s.push(rest.make_monic(k));
        ms.push(1);
    }
    let (_, lifted) = hensel_lift_multi(k, &fy, &p0s, &ms, rng).map_err(lift_err)?;
    Ok(lifted
        .iter()
        .zip(&scale)
        .map(|(g, &(l, v))| raise_x(&g.shift_y(k, k.neg(ck)).scale(k, l), v))
        .collect())
}

/// Lifts the tracked factors from level kk (variables x_0..x_{kk-1}) to
/// level kk+1.
#[allow(clippy::too_many_arguments)]
fn lift_level<R: Rng + ?Sized>(
    k: &PrimeField,
    f_next: &SparsePoly,
    tracked: &[SparsePoly],
    mults: &[usize],
    kk: usize,
    ck: Fp,
    rng: &mut R,
    report: &mut LiftReport,
) -> Result<Vec<SparsePoly>> {
    let n = f_next.nvars();
    // per factor: t-level -> monomials in x_0..x_{kk-1}
    let groups: Vec<BTreeMap<usize, Vec<Vec<i64>>>> = tracked
        .iter()
        .map(|p| {
            let mut g: BTreeMap<usize, Vec<Vec<i64>>> = BTreeMap::new();
            for (e, _) in p.terms() {
                g.entry(e[..kk].iter().sum::<i64>() as usize).or_default().push(e[..kk].to_vec());
            }
            g
        })
        .collect();
    let npts = groups.iter().flat_map(|g| g.values().map(Vec::len)).max().unwrap_or(1);
    let bounds: Vec<i64> = (0..kk).map(|j| f_next.degree_in(j)).collect();
    let pts = Points::new(k, &bounds, npts, rng)?;
    let base = rng.next_u64();
    let images: Result<Vec<Vec<BivPoly>>> = (0..npts)
        .into_par_iter()
        .map(|i| {
            let mut r = stream(base, &format!("mfactor.lift.{kk}.{i}"));
            lift_point(k, f_next, tracked, mults, ck, &pts.point(k, i), &mut r)
        })
        .collect();
    let images = match images {
        Ok(v) => v,
        Err(e) => {
            report.record(kk + 1, npts, 0, Some(&e));
            return Err(e);
        }
    };
    report.record(kk + 1, npts, 0, None);
    let lower: Vec<usize> = (0..kk).collect();
    let mut out = Vec::with_capacity(tracked.len());
    for (j, g) in groups.iter().enumerate() {
        let du = images.iter().map(|img| img[j].dy()).max().unwrap_or(0);
        let dt = images.iter().map(|img| img[j].dx()).max().unwrap_or(0);
        let mut p = SparsePoly::zero(n);
        for a in 0..=dt {
            let Some(supp) = g.get(&a) else {
                if images.iter().any(|img| !img[j].row(a).is_zero()) {
                    return Err(Error::VerificationFailed("lifted factor leaves its known support"));
                }
                continue;
            };
            for b in 0..=du {
                let values: Vec<Fp> = images[..supp.len()].iter().map(|img| img[j].coeff(a, b)).collect();
                if values.iter().all(|&v| v == 0) {
                    continue;
                }
                let h = pts.solve(k, supp, &values)?;
                let mut shift = vec![0; n];
                shift[kk] = b as i64;
                p = p.add(k, &h.embed_vars(n, &lower).mul_monomial(&shift));
            }
        }
        if p.substitute(k, &[(kk, ck)])? != tracked[j] {
            return Err(Error::VerificationFailed("lifted factor is inconsistent with its projection"));
        }
        out.push(p);
    }
    Ok(out)
}

/// Lifts P_j^[2] up to P_j; factors not tracked are handled implicitly
/// as a cofactor at every point.
fn lift_core<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &SparsePoly,
    start: Vec<SparsePoly>,
    mults: &[usize],
    ctx: &ProjectionContext,
    rng: &mut R,
    report: &mut LiftReport,
) -> Result<Vec<SparsePoly>> {
    let n = f.nvars();
    let mut cur = start;
    for kk in 2..n {
        let f_next = ctx.project(k, f, kk + 1)?;
        cur = lift_level(k, &f_next, &cur, mults, kk, ctx.c[kk], rng, report)?;
    }
    Ok(cur)
}

fn product(k: &PrimeField, n: usize, unit: Fp, fs: &[SparsePoly], mults: &[usize]) -> SparsePoly {
    fs.iter()
        .zip(mults)
        .fold(SparsePoly::constant(n, unit), |acc, (f, &m)| acc.mul(k, &f.pow(k, m as u32)))
}

/// F = P Q from a coprime factorization F^[2] = A B in (x_1, x_2).
///
/// Only the factor with fewer terms is interpolated; the other one is
/// the exact quotient.
pub fn lift_two<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &SparsePoly,
    a: &BivPoly,
    b: &BivPoly,
    ctx: &ProjectionContext,
    rng: &mut R,
) -> Result<(SparsePoly, SparsePoly)> {
    let n = f.nvars();
    if n < 2 {
        return Err(Error::Precondition("at least two variables required"));
    }
    let (sa, sb) = (a.to_sparse(k, n, 0, 1), b.to_sparse(k, n, 0, 1));
    if sa.mul(k, &sb) != ctx.project(k, f, 2)? {
        return Err(Error::Precondition("A B is not the bivariate projection of F"));
    }
    if sa.is_constant() || sb.is_constant() {
        return Err(Error::Precondition("A and B must be nonconstant"));
    }
    if n == 2 {
        return Ok((sa, sb));
    }
    let swap = sb.len() < sa.len();
    let small = if swap { sb } else { sa };
    let mut report = LiftReport::default();
    let p = lift_core(k, f, vec![small], &[1], ctx, rng, &mut report)?.remove(0);
    let q = match sparse_exact_divide(k, f, &p, rng) {
        Ok(q) => q,
        Err(Error::TermBudgetExceeded) => f.div_exact(k, &p).map_err(|_| Error::VerificationFailed("cofactor division failed"))?,
        Err(_) => return Err(Error::VerificationFailed("lifted factor does not divide F")),
    };
    Ok(if swap { (q, p) } else { (p, q) })
}

/// F = lambda prod P_i^(nu_i) from F^[2] = lambda prod A_i^(nu_i), with
/// P_i^[2] = A_i.
pub fn lift_multi<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &SparsePoly,
    a_list: &[BivPoly],
    nus: &[usize],
    lambda: Fp,
    ctx: &ProjectionContext,
    rng: &mut R,
) -> Result<Vec<SparsePoly>> {
    lift_multi_report(k, f, a_list, nus, lambda, ctx, rng, &mut LiftReport::default())
}

#[allow(clippy::too_many_arguments)]
pub fn lift_multi_report<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &SparsePoly,
    a_list: &[BivPoly],
    nus: &[usize],
    lambda: Fp,
    ctx: &ProjectionContext,
    rng: &mut R,
    report: &mut LiftReport,
) -> Result<Vec<SparsePoly>> {
    let n = f.nvars();
    if n < 2 || a_list.len() != nus.len() {
        return Err(Error::Precondition("malformed lifting input"));
    }
    let start: Vec<SparsePoly> = a_list.iter().map(|a| a.to_sparse(k, n, 0, 1)).collect();
    if product(k, n, lambda, &start, nus) != ctx.project(k, f, 2)? {
        return Err(Error::Precondition("factors do not multiply to the bivariate projection"));
    }
    if n == 2 {
        return Ok(start);
    }
    let out = lift_core(k, f, start, nus, ctx, rng, report)?;
    if product(k, n, lambda, &out, nus) != *f {
        return Err(Error::VerificationFailed("lifted factors do not multiply to F"));
    }
    Ok(out)
}

/// Irreducible factorization; every factor re-expands exactly or the call
/// fails.
pub fn factor_irreducible<R: Rng + ?Sized>(k: &PrimeField, f: &SparsePoly, rng: &mut R) -> Result<Factorization> {
    factor_irreducible_report(k, f, rng, &mut LiftReport::default())
}

pub fn factor_irreducible_report<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &SparsePoly,
    rng: &mut R,
    report: &mut LiftReport,
) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_polynomial() {
        return Err(Error::NegativeExponent);
    }
    let n = f.nvars();
    let (v, f0) = f.strip_monomial();
    let mut factors: Vec<(SparsePoly, usize)> = v
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| (SparsePoly::var(n, j), e as usize))
        .collect();
    if !f0.is_constant() {
        let sqf = msquarefree(k, &f0, rng)?;
        for (part, m) in &sqf.factors {
            for g in factor_squarefree(k, part, 0, rng, report)? {
                factors.push((g, *m));
            }
        }
    }
    let mut out = Factorization { nvars: n, unit: 1, factors }.canonicalize(k);
    out.unit = f.lc();
    let oracle = |z: &[Fp]| f.eval(k, z).unwrap_or(0);
    if !verify_candidate(k, oracle, &out.expand(k), rng) || out.expand(k) != *f {
        return Err(Error::VerificationFailed("factorization does not re-expand"));
    }
    Ok(out)
}

/// Irreducible factors of a square-free polynomial without monomial
/// factors.
fn factor_squarefree<R: Rng + ?Sized>(
    k: &PrimeField,
    p: &SparsePoly,
    depth: usize,
    rng: &mut R,
    report: &mut LiftReport,
) -> Result<Vec<SparsePoly>> {
    let n = p.nvars();
    let vars = p.variables();
    match vars.len() {
        0 => return Ok(Vec::new()),
        1 => {
            let x = vars[0];
            let fz = unipoly::factor(k, &p.to_dense(x)?, rng)?;
            return Ok(fz.factors.iter().map(|(g, _)| SparsePoly::from_dense(n, x, g)).collect());
        }
        2 => {
            let b = BivPoly::from_sparse(p, vars[0], vars[1])?;
            let fz = biv_factor(k, &b, rng)?;
            return Ok(fz.factors.iter().map(|(g, _)| g.to_sparse(k, n, vars[0], vars[1])).collect());
        }
        _ => {}
    }
    if let Some(&i) = contentfree_test(k, p, rng)?.first() {
        match content_extract(k, p, i, rng) {
            Ok((c, q)) => {
                let mut out = factor_squarefree(k, &c, depth, rng, report)?;
                out.extend(factor_squarefree(k, &q, depth, rng, report)?);
                return Ok(out);
            }
            Err(Error::Precondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let q = p.select_vars(&vars);
    let fs = factor_content_free(k, &q, depth, rng, report)?;
    Ok(fs.iter().map(|g| g.embed_vars(n, &vars)).collect())
}

/// Square-free, content-free, at least three variables, all present.
fn factor_content_free<R: Rng + ?Sized>(
    k: &PrimeField,
    q: &SparsePoly,
    depth: usize,
    rng: &mut R,
    report: &mut LiftReport,
) -> Result<Vec<SparsePoly>> {
    let n = q.nvars();
    for attempt in 0..ANCHOR_RETRIES {
        let ctx = ProjectionContext::random(k, n, rng);
        match try_anchor(k, q, &ctx, rng, report) {
            Ok(fs) => return Ok(fs),
            Err(e) => report.record(2, 0, attempt, Some(&e)),
        }
    }
    if depth == 0 {
        report.substitutions += 1;
        if let Ok(fs) = factor_by_substitution(k, q, rng, report) {
            return Ok(fs);
        }
    }
    Err(Error::Inconclusive("lifting failed for every anchor"))
}

fn try_anchor<R: Rng + ?Sized>(
    k: &PrimeField,
    q: &SparsePoly,
    ctx: &ProjectionContext,
    rng: &mut R,
    report: &mut LiftReport,
) -> Result<Vec<SparsePoly>> {
    let n = q.nvars();
    let f2 = ctx.project(k, q, 2)?;
    if f2.degree_in(0) != q.degree_in(0) || f2.degree_in(1) != q.degree_in(1) {
        return Err(Error::LiftError("anchor lowers a degree"));
    }
    let bf = biv_factor(k, &BivPoly::from_sparse(&f2, 0, 1)?, rng)?;
    if bf.factors.iter().any(|(_, m)| *m > 1) {
        return Err(Error::LiftError("bivariate projection is not square-free"));
    }
    if bf.factors.len() == 1 {
        // the degrees in x_1 and x_2 survive, so a splitting of q would
        // split its projection
        return Ok(vec![q.clone()]);
    }
    let a: Vec<BivPoly> = bf.factors.iter().map(|(g, _)| g.clone()).collect();
    let ones = vec![1; a.len()];
    let out = lift_multi_report(k, q, &a, &ones, bf.unit, ctx, rng, report)?;
    debug_assert_eq!(product(k, n, bf.unit, &out, &ones), *q);
    Ok(out)
}

/// Factors q(x^M) for a random unimodular M and maps the factors back.
fn factor_by_substitution<R: Rng + ?Sized>(
    k: &PrimeField,
    q: &SparsePoly,
    rng: &mut R,
    report: &mut LiftReport,
) -> Result<Vec<SparsePoly>> {
    let n = q.nvars();
    let (m, inv) = random_unimodular(n, rng);
    let g = q.monomial_map(k, &m).strip_monomial().1;
    let parts = factor_squarefree(k, &g, 1, rng, report)?;
    let mut out = Vec::new();
    for h in parts {
        let back = h.monomial_map(k, &inv).strip_monomial().1;
        if !back.is_constant() {
            out.push(back);
        }
    }
    let prod = out.iter().fold(SparsePoly::one(n), |acc, h| acc.mul(k, h));
    if prod.normalize(k).1 != q.normalize(k).1 {
        return Err(Error::VerificationFailed("substituted factors do not map back"));
    }
    Ok(out)
}

/// U L with U upper and L lower unit triangular (entries 0/1), and its
/// inverse.
pub fn random_unimodular<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut u = identity(n);
    let mut l = identity(n);
    for i in 0..n {
        for j in i + 1..n {
            u[i][j] = rng.gen_range(0..2);
            l[j][i] = rng.gen_range(0..2);
        }
    }
    let m = matmul(&u, &l);
    let inv = matmul(&lower_inverse(&l), &transpose(&lower_inverse(&transpose(&u))));
    (m, inv)
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..a.len()).map(|i| a.iter().map(|r| r[i]).collect()).collect()
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

/// Inverse of a unit lower triangular integer matrix.
#[allow(clippy::needless_range_loop)]
fn lower_inverse(l: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = l.len();
    let mut x = identity(n);
    for col in 0..n {
        for i in col + 1..n {
            let s: i64 = (col..i).map(|t| l[i][t] * x[t][col]).sum();
            x[i][col] = -s;
        }
    }
    x
}

/// Collapses F(x_1, beta alpha^i t) for growing i, lifts each with
/// `lift_at` and interpolates the lifted factor coefficient-wise; the
/// cofactor is an exact quotient.
fn projective_core<R, L>(k: &PrimeField, f: &SparsePoly, lift_at: L, retries: usize, rng: &mut R) -> Result<(SparsePoly, SparsePoly)>
where
    R: Rng + ?Sized,
    L: Fn(&[Fp], &mut crate::rng::Rng) -> Result<BivPoly> + Sync,
{
    let n = f.nvars();
    let upper: Vec<usize> = (1..n).collect();
    let bounds: Vec<u64> = upper.iter().map(|&j| f.degree_in(j) as u64).collect();
    let budget = 4 * f.len() as u64 + 16;
    let assemble = |parts: &[Vec<SparsePoly>]| -> SparsePoly {
        let mut p = SparsePoly::zero(n);
        for (a, row) in parts.iter().enumerate() {
            let mut e = vec![0; n];
            e[0] = a as i64;
            for h in row {
                p = p.add(k, &h.embed_vars(n, &upper).mul_monomial(&e));
            }
        }
        p
    };
    let mut last = Error::LiftError("no attempt");
    for attempt in 0..retries.max(1) {
        let seq = GeometricSequence::new(k, &bounds, rng, false)?;
        let base = rng.next_u64();
        let images = |i: u64| -> Result<Vec<DensePoly>> {
            if i >= budget {
                return Err(Error::InterpolationFailed("evaluation budget exhausted"));
            }
            let mut r = stream(base, &format!("mfactor.projective.{attempt}.{i}"));
            Ok(lift_at(&seq.point(k, i), &mut r)?.rows().to_vec())
        };
        let mut vrng = ChaCha8Rng::seed_from_u64(rng.next_u64());
        let accept = |parts: &[Vec<SparsePoly>]| {
            let p = assemble(parts);
            !p.is_constant() && divides(k, &p, f, &mut vrng)
        };
        match interpolate_images(k, &seq, images, 1, rng, accept) {
            Ok(parts) => {
                let p = assemble(&parts);
                let q = sparse_exact_divide(k, f, &p, rng).or_else(|_| f.div_exact(k, &p))?;
                return Ok((p, q));
            }
            Err(e @ (Error::HypothesisViolated(_) | Error::KroneckerOverflow)) => return Err(e),
            Err(e) => last = lift_err(e),
        }
    }
    Err(last)
}

/// F = P Q from P(x_1, 0, .., 0) = P0 (monic) and Q(x_1, 0, .., 0) = Q0.
pub fn factor_projective<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &SparsePoly,
    p0: &DensePoly,
    q0: &DensePoly,
    rng: &mut R,
) -> Result<(SparsePoly, SparsePoly)> {
    let n = f.nvars();
    if n < 2 || !f.is_polynomial() {
        return Err(Error::Precondition("polynomial in at least two variables required"));
    }
    let zeros: Vec<(usize, Fp)> = (1..n).map(|j| (j, 0)).collect();
    let f0 = f.substitute(k, &zeros)?.to_dense(0)?;
    if f0.is_zero() || f0.deg() as i64 != f.degree_in(0) {
        return Err(Error::HypothesisViolated("deg F(x1, 0, .., 0) < deg_x1 F"));
    }
    if unipoly::gcd(k, p0, q0).deg() > 0 {
        return Err(Error::HypothesisViolated("P0 and Q0 are not coprime"));
    }
    if !p0.is_monic() || unipoly::mul(k, p0, q0) != f0 {
        return Err(Error::Precondition("F(x1, 0, .., 0) must equal P0 Q0 with P0 monic"));
    }
    let lift_at = |pt: &[Fp], r: &mut crate::rng::Rng| -> Result<BivPoly> {
        let g = project_x0(k, f, pt);
        hensel_lift_two(k, &g, p0, q0, r).map(|(p, _)| p).map_err(lift_err)
    };
    projective_core(k, f, lift_at, ANCHOR_RETRIES, rng)
}

/// F = P Q through the last edge of the Newton polygon of
/// {(e_1, e_2 + .. + e_n)}: its edge polynomial is factored recursively and
/// every split into two coprime parts is tried.
pub fn factor_single_slope<R: Rng + ?Sized>(k: &PrimeField, f: &SparsePoly, rng: &mut R) -> Result<(SparsePoly, SparsePoly)> {
    let n = f.nvars();
    if n < 2 || !f.is_polynomial() || f.is_constant() {
        return Err(Error::Precondition("nonconstant polynomial in at least two variables required"));
    }
    let pts: Vec<(i64, i64)> = f.terms().map(|(e, _)| (e[0], e[1..].iter().sum())).collect();
    let poly = newton_polygon(&pts);
    let (p, q) = match poly.vertices.len() {
        0 | 1 => (0, 1),
        l => {
            let (a1, a) = poly.vertices[l - 2];
            let (b1, b) = poly.vertices[l - 1];
            let g = gcd_i64(a - b, b1 - a1);
            ((a - b) / g, (b1 - a1) / g)
        }
    };
    let wdeg = |e: &[i64]| p * e[0] + q * e[1..].iter().sum::<i64>();
    let low = f.terms().map(|(e, _)| wdeg(e)).min().unwrap_or(0);
    let tp = SparsePoly::from_terms(k, n, f.terms().filter(|(e, _)| wdeg(e) == low).map(|(e, c)| (e.to_vec(), c)));
    if tp.degree_in(0) != f.degree_in(0) {
        return Err(Error::HypothesisViolated("edge polynomial loses the degree in x1"));
    }
    if tp.len() == f.len() {
        return split_weighted_homogeneous(k, f, p, q, rng);
    }
    let tpf = factor_irreducible(k, &tp, rng)?;
    let items: Vec<SparsePoly> = tpf.factors.iter().map(|(g, m)| g.pow(k, *m as u32)).collect();
    if items.len() < 2 {
        return Err(Error::HypothesisViolated("edge polynomial has no coprime splitting"));
    }
    let mut last = Error::HypothesisViolated("no splitting of the edge polynomial lifts");
    for mask in 0..(1usize << (items.len() - 1)) {
        let side = |i: usize| i == 0 || mask >> (i - 1) & 1 == 1;
        if (0..items.len()).all(side) {
            continue;
        }
        let tp_p = (0..items.len()).filter(|&i| side(i)).fold(SparsePoly::one(n), |acc, i| acc.mul(k, &items[i]));
        let tp_q = (0..items.len())
            .filter(|&i| !side(i))
            .fold(SparsePoly::constant(n, tpf.unit), |acc, i| acc.mul(k, &items[i]));
        let lift_at = |pt: &[Fp], r: &mut crate::rng::Rng| -> Result<BivPoly> {
            let g = project_x0(k, f, pt);
            let a = project_x0(k, &tp_p, pt);
            let b = project_x0(k, &tp_q, pt);
            let (pp, _) = hensel_lift_single_slope(k, &g, &a, &b, p, q, r).map_err(lift_err)?;
            match_trailing(k, &pp, &a, p, q)
        };
        match projective_core(k, f, lift_at, 2, rng) {
            Ok(res) => return Ok(res),
            Err(e @ Error::KroneckerOverflow) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Rescales a lifted factor, known up to a constant and a power of y, so
/// that its edge part matches `target`.
fn match_trailing(k: &PrimeField, pp: &BivPoly, target: &BivPoly, p: i64, q: i64) -> Result<BivPoly> {
    let key = |f: &BivPoly| -> Option<(usize, usize, Fp)> {
        let mut best: Option<(i64, usize, usize, Fp)> = None;
        for (i, row) in f.rows().iter().enumerate() {
            for (j, &c) in row.coeffs().iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let w = p * i as i64 + q * j as i64;
                if best.is_none_or(|b| (w, std::cmp::Reverse(i)) < (b.0, std::cmp::Reverse(b.1))) {
                    best = Some((w, i, j, c));
                }
            }
        }
        best.map(|b| (b.1, b.2, b.3))
    };
    let (Some((i1, j1, c1)), Some((i2, j2, c2))) = (key(pp), key(target)) else {
        return Err(Error::LiftError("empty factor"));
    };
    if i1 != i2 || j2 < j1 {
        return Err(Error::LiftError("lifted factor does not match its edge part"));
    }
    let s = k.mul(c2, k.inv_nz(c1));
    Ok(pp.scale(k, s).mul_y(k, &DensePoly::monomial(1, j2 - j1)))
}

/// A weighted homogeneous F is recovered from F(1, x_2, .., x_n) by
/// rehomogenizing each factor.
fn split_weighted_homogeneous<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &SparsePoly,
    p: i64,
    q: i64,
    rng: &mut R,
) -> Result<(SparsePoly, SparsePoly)> {
    if p == 0 {
        return Err(Error::HypothesisViolated("support is degenerate in x1"));
    }
    let n = f.nvars();
    let (v, f1) = f.strip_monomial();
    let g = f1.substitute(k, &[(0, 1)])?;
    let mut factors: Vec<SparsePoly> = (0..n).filter(|&j| v[j] > 0).map(|j| SparsePoly::var(n, j)).collect();
    if !g.is_constant() {
        for (h, _) in factor_irreducible(k, &g, rng)?.factors {
            let r: Vec<i64> = h.terms().map(|(e, _)| q * e[1..].iter().sum::<i64>()).collect();
            let anchor = if p > 0 { *r.iter().max().unwrap() } else { *r.iter().min().unwrap() };
            let mut out = SparsePoly::zero(n);
            for ((e, c), ri) in h.terms().zip(&r) {
                let num = anchor - ri;
                if num % p != 0 {
                    return Err(Error::LiftError("factor does not rehomogenize"));
                }
                let mut e = e.to_vec();
                e[0] = num / p;
                out.add_term(k, e, c);
            }
            factors.push(out);
        }
    }
    let Some(first) = factors.first().cloned() else {
        return Err(Error::HypothesisViolated("no nonconstant factor"));
    };
    let rest = f.div_exact(k, &first).map_err(|_| Error::VerificationFailed("rehomogenized factor does not divide"))?;
    if rest.is_constant() {
        return Err(Error::HypothesisViolated("polynomial is irreducible"));
    }
    Ok((first, rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sp(k: &PrimeField, s: &str, n: usize) -> SparsePoly {
        SparsePoly::parse(k, s, Some(n)).unwrap()
    }

    fn prod(k: &PrimeField, n: usize, fs: &[(&str, u32)]) -> SparsePoly {
        fs.iter().fold(SparsePoly::one(n), |acc, (f, e)| acc.mul(k, &sp(k, f, n).pow(k, *e)))
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(31)
    }

    fn normalized(k: &PrimeField, fs: &[SparsePoly]) -> Vec<SparsePoly> {
        let mut v: Vec<SparsePoly> = fs.iter().map(|f| f.normalize(k).1).collect();
        v.sort_by(|a, b| a.terms().cmp(b.terms()));
        v
    }

    #[test]
    fn canonical_form() {
        let k = PrimeField::goldilocks();
        let fz = Factorization {
            nvars: 2,
            unit: 2,
            factors: vec![(sp(&k, "3*x1 + 3*x2", 2), 1), (sp(&k, "x1 - x2", 2), 1), (sp(&k, "2*x1 + 2*x2", 2), 1)],
        }
        .canonicalize(&k);
        assert_eq!(fz.unit, 12);
        assert_eq!(fz.factors, vec![(sp(&k, "x1 - x2", 2), 1), (sp(&k, "x1 + x2", 2), 2)]);
    }

    #[test]
    fn lift_two_recovers_linear_factors() {
        let k = PrimeField::new(10007).unwrap();
        let mut r = rng();
        let p = sp(&k, "x1 + x2 + x3", 3);
        let q = sp(&k, "x1 + 2*x2 + 3*x3", 3);
        let f = p.mul(&k, &q);
        let ctx = ProjectionContext::random(&k, 3, &mut r);
        let a = BivPoly::from_sparse(&ctx.project(&k, &p, 2).unwrap(), 0, 1).unwrap();
        let b = BivPoly::from_sparse(&ctx.project(&k, &q, 2).unwrap(), 0, 1).unwrap();
        let (pp, qq) = lift_two(&k, &f, &a, &b, &ctx, &mut r).unwrap();
        assert_eq!((pp, qq), (p, q));
        let g = sp(&k, "x1*x2 + x3^2 + 1", 3);
        let ga = BivPoly::from_sparse(&ctx.project(&k, &g, 2).unwrap(), 0, 1).unwrap();
        let fake = BivPoly::from_sparse(&sp(&k, "x1 + 1", 3), 0, 1).unwrap();
        assert!(lift_two(&k, &g, &ga, &fake, &ctx, &mut r).is_err());
    }

    #[test]
    fn lift_multi_with_multiplicities() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let p1 = sp(&k, "x1 + x2", 3);
        let p2 = sp(&k, "x1 + x3", 3);
        let f = p1.pow(&k, 2).mul(&k, &p2);
        let ctx = ProjectionContext::random(&k, 3, &mut r);
        let a: Vec<BivPoly> = [&p1, &p2]
            .iter()
            .map(|p| BivPoly::from_sparse(&ctx.project(&k, p, 2).unwrap(), 0, 1).unwrap())
            .collect();
        let out = lift_multi(&k, &f, &a, &[2, 1], 1, &ctx, &mut r).unwrap();
        assert_eq!(out, vec![p1, p2]);
    }

    #[test]
    fn lift_multi_avoids_swell() {
        // P_i = (x_i + y_i)^3 - (u_i + v_i)^3, variables x1 x2 y1 y2 u1 u2 v1 v2
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let p1 = sp(&k, "x1^3 + 3*x1^2*x3 + 3*x1*x3^2 + x3^3 - x5^3 - 3*x5^2*x7 - 3*x5*x7^2 - x7^3", 8);
        let p2 = sp(&k, "x2^3 + 3*x2^2*x4 + 3*x2*x4^2 + x4^3 - x6^3 - 3*x6^2*x8 - 3*x6*x8^2 - x8^3", 8);
        let f = p1.mul(&k, &p2);
        let ctx = ProjectionContext::random(&k, 8, &mut r);
        let a: Vec<BivPoly> = [&p1, &p2]
            .iter()
            .map(|p| BivPoly::from_sparse(&ctx.project(&k, p, 2).unwrap(), 0, 1).unwrap())
            .collect();
        let out = lift_multi(&k, &f, &a, &[1, 1], 1, &ctx, &mut r).unwrap();
        assert_eq!(out, vec![p1, p2]);
    }

    #[test]
    fn factor_examples() {
        let k = PrimeField::goldilocks();
        let mut r = rng();
        let f = prod(&k, 3, &[("x1 + x2 + 1", 1), ("x1*x2 + x3", 1)]);
        let fz = factor_irreducible(&k, &f, &mut r).unwrap();
        assert_eq!(fz.unit, 1);
        assert_eq!(fz.factors, vec![(sp(&k, "x1*x2 + x3", 3), 1), (sp(&k, "x1 + x2 + 1", 3), 1)]);
        let g = prod(&k, 2, &[("x1 - x2", 1), ("x1 + x2", 1)]);
        let fz = factor_irreducible(&k, &g, &mut r).unwrap();
        assert_eq!(fz.factors, vec![(sp(&k, "x1 - x2", 2), 1), (sp(&k, "x1 + x2", 2), 1)]);
        let h = prod(&k, 4, &[("x1", 2), ("x2*x3 + x4 + 1", 2), ("x1 + x3", 1), ("x4 + 5", 1), ("x1*x4 - x2^2 + 3", 1)])
            .scale(&k, 7);
        let fz = factor_irreducible(&k, &h, &mut r).unwrap();
        assert_eq!(fz.expand(&k), h);
        assert_eq!(fz.unit, 7);
        assert_eq!(fz.factors.len(), 5);
    }

    #[test]
    fn square_minus_variable_never_wrong() {
        for p in [7u64, 10007] {
            let k = PrimeField::new(p).unwrap();
            let f = sp(&k, "x1^2 + 2*x1*x2 + x2^2 - x3", 3);
            for seed in 0..10 {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                match factor_irreducible(&k, &f, &mut r) {
                    Ok(fz) => assert_eq!(fz.factors, vec![(f.clone(), 1)]),
                    Err(e) => assert!(matches!(e, Error::Inconclusive(_)), "{e:?}"),
                }
            }
        }
    }

    #[test]
    fn monomial_substitution_rewrite() {
        let k = PrimeField::goldilocks();
        let f = sp(&k, "x1^2 + x2^2 - x3^2", 3);
        // x1 = y1 y2 y3, x2 = y2 y3, x3 = y3: exponent e maps to M e
        let m = vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]];
        assert_eq!(f.monomial_map(&k, &m), sp(&k, "x1^2*x2^2*x3^2 + x2^2*x3^2 - x3^2", 3));
        let mut r = rng();
        for _ in 0..8 {
            let (m, inv) = random_unimodular(4, &mut r);
            assert_eq!(matmul(&m, &inv), identity(4));
        }
        let mut report = LiftReport::default();
        let q = prod(&k, 3, &[("x1 + x2*x3 + 2", 1), ("x1*x3 + x2 - 1", 1)]);
        let fs = factor_by_substitution(&k, &q, &mut r, &mut report).unwrap();
        assert_eq!(normalized(&k, &fs), normalized(&k, &[sp(&k, "x1 + x2*x3 + 2", 3), sp(&k, "x1*x3 + x2 - 1", 3)]));
    }

    #[test]
    fn projective_examples() {
        let k = PrimeField::new(10007).unwrap();
        let mut r = rng();
        let p = sp(&k, "x1 + x2 + 1", 2);
        let q = sp(&k, "x1 + 2*x2 + 3", 2);
        let f = p.mul(&k, &q);
        let p0 = DensePoly::from_i64s(&k, &[1, 1]);
        let q0 = DensePoly::from_i64s(&k, &[3, 1]);
        assert_eq!(factor_projective(&k, &f, &p0, &q0, &mut r).unwrap(), (p.clone(), q.clone()));
        let (p5, q5) = factor_projective(&k, &f.scale(&k, 5), &p0, &q0.scale(&k, 5), &mut r).unwrap();
        assert_eq!((p5.normalize(&k).1, q5.normalize(&k).1), (p.clone(), q.clone()));
        let hom = prod(&k, 2, &[("x1 + x2", 1), ("x1 + 2*x2", 1)]);
        let x = DensePoly::from_i64s(&k, &[0, 1]);
        assert!(matches!(factor_projective(&k, &hom, &x, &x, &mut r), Err(Error::HypothesisViolated(_))));
        let g = prod(&k, 2, &[("x1 + x2 + 1", 1), ("x1 - x2 + 1", 1)]);
        assert!(matches!(factor_projective(&k, &g, &p0, &p0, &mut r), Err(Error::HypothesisViolated(_))));
        let big = prod(&k, 4, &[("x1^2 + x2*x3 + 3*x4 + 1", 1), ("x1 + x2^2*x4 - x3 + 5", 1)]);
        let (pp, qq) = factor_projective(
            &k,
            &big,
            &DensePoly::from_i64s(&k, &[1, 0, 1]),
            &DensePoly::from_i64s(&k, &[5, 1]),
            &mut r,
        )
        .unwrap();
        assert_eq!(pp.mul(&k, &qq), big);
        assert_eq!(pp, sp(&k, "x1^2 + x2*x3 + 3*x4 + 1", 4));
    }

    #[test]
    fn single_slope_examples() {
        let k = PrimeField::new(10007).unwrap();
        let mut r = rng();
        let f = prod(&k, 2, &[("x1 + x2", 1), ("x1 + 2*x2", 1)]);
        let (p, q) = factor_single_slope(&k, &f, &mut r).unwrap();
        assert_eq!(normalized(&k, &[p.clone(), q.clone()]), normalized(&k, &[sp(&k, "x1 + x2", 2), sp(&k, "x1 + 2*x2", 2)]));
        assert_eq!(p.mul(&k, &q), f);
        // trivial polygon: same as the projective case
        let g = prod(&k, 2, &[("x1 + x2 + 1", 1), ("x1 + 2*x2 + 3", 1)]);
        let (p, q) = factor_single_slope(&k, &g, &mut r).unwrap();
        assert_eq!(p.mul(&k, &q), g);
        // nontrivial edge x1^2 x2 .. with both factors lifted along it
        let h = prod(&k, 3, &[("x1*x2 + x3 + x2^2", 1), ("x1*x3 + 2*x2 + x3^2", 1)]);
        let (p, q) = factor_single_slope(&k, &h, &mut r).unwrap();
        assert_eq!(p.mul(&k, &q), h);
        assert_eq!(
            normalized(&k, &[p, q]),
            normalized(&k, &[sp(&k, "x1*x2 + x3 + x2^2", 3), sp(&k, "x1*x3 + 2*x2 + x3^2", 3)])
        );
    }

    #[test]
    fn torture_example_is_reported() {
        let k = PrimeField::new(10007).unwrap();
        let mut r = rng();
        let p = "x1*x2 + x1*x3 + x2*x3 + x1^2*x2^2*x3 + x1^2*x2*x3^2 + x1*x2^2*x3^2";
        let f = prod(&k, 3, &[(&format!("{p} + 2*x1*x2*x3"), 1), (&format!("{p} + 5*x1*x2*x3"), 1)]);
        match factor_single_slope(&k, &f, &mut r) {
            Err(Error::HypothesisViolated(_) | Error::LiftError(_)) => {}
            Ok((a, b)) => assert_eq!(a.mul(&k, &b), f),
            Err(e) => panic!("unexpected {e:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn factorization_reexpands(
            a in prop::collection::vec((prop::collection::vec(0i64..3, 4), 1u64..50), 1..5),
            b in prop::collection::vec((prop::collection::vec(0i64..3, 4), 1u64..50), 1..5),
            seed in any::<u64>(),
        ) {
            let k = PrimeField::goldilocks();
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let f = SparsePoly::from_terms(&k, 4, a).mul(&k, &SparsePoly::from_terms(&k, 4, b));
            prop_assume!(!f.is_zero());
            match factor_irreducible(&k, &f, &mut r) {
                Ok(fz) => prop_assert_eq!(fz.expand(&k), f),
                Err(e) => prop_assert!(matches!(e, Error::Inconclusive(_)), "{:?}", e),
            }
        }
    }
}
