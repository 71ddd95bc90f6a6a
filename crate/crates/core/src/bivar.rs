//! Dense bivariate polynomials and the lifting kernel.
//!
//! `BivPoly` stores rows by x-degree; each row is a polynomial in y. The
//! multivariate algorithms project onto this module: contents, root
//! extraction, Hensel lifting, square-free decomposition and irreducible
//! factorization.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::sparsepoly::SparsePoly;
use crate::unipoly::{self, DensePoly};

/// sum_i rows[i](y) x^i, top row nonzero unless zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivPoly {
    rows: Vec<DensePoly>,
}

/// `unit * prod(f^e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivFactorization {
    pub unit: Fp,
    pub factors: Vec<(BivPoly, usize)>,
}

impl BivFactorization {
    pub fn expand(&self, k: &PrimeField) -> BivPoly {
        let mut acc = BivPoly::constant(self.unit);
        for (f, e) in &self.factors {
            acc = acc.mul(k, &f.pow(k, *e));
        }
        acc
    }
}

const SHIFT_RETRIES: usize = 8;

/// Fields this small get every shift tried instead of random draws.
const EXHAUSTIVE_SHIFT_LIMIT: u64 = 64;

impl BivPoly {
    pub fn zero() -> Self {
        BivPoly { rows: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: Fp) -> Self {
        Self::from_rows(vec![DensePoly::constant(c)])
    }

    pub fn from_rows(mut rows: Vec<DensePoly>) -> Self {
        while rows.last().is_some_and(DensePoly::is_zero) {
            rows.pop();
        }
        BivPoly { rows }
    }

    /// Polynomial in x only.
    pub fn from_x(f: &DensePoly) -> Self {
        Self::from_rows(f.coeffs().iter().map(|&c| DensePoly::constant(c)).collect())
    }

    /// Polynomial in y only.
    pub fn from_y(f: &DensePoly) -> Self {
        Self::from_rows(vec![f.clone()])
    }

    /// Builds from (i, j, c) triples for c x^i y^j.
    pub fn from_terms(k: &PrimeField, terms: &[(usize, usize, Fp)]) -> Self {
        let dx = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let dy = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut grid = vec![vec![0; dy + 1]; dx + 1];
        for &(i, j, c) in terms {
            grid[i][j] = k.add(grid[i][j], c);
        }
        Self::from_rows(grid.into_iter().map(DensePoly::from_coeffs).collect())
    }

    /// View of a sparse polynomial whose only variables are `xv` and `yv`.
    pub fn from_sparse(f: &SparsePoly, xv: usize, yv: usize) -> Result<Self> {
        let mut terms = Vec::with_capacity(f.len());
        for (e, c) in f.terms() {
            if e.iter().any(|&x| x < 0) {
                return Err(Error::NegativeExponent);
            }
            if e.iter().enumerate().any(|(v, &x)| v != xv && v != yv && x != 0) {
                return Err(Error::Precondition("polynomial is not bivariate"));
            }
            terms.push((e[xv] as usize, e[yv] as usize, c));
        }
        let dx = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let dy = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut grid = vec![vec![0; dy + 1]; dx + 1];
        for (i, j, c) in terms {
            grid[i][j] = c;
        }
        Ok(Self::from_rows(grid.into_iter().map(DensePoly::from_coeffs).collect()))
    }

    pub fn to_sparse(&self, k: &PrimeField, n: usize, xv: usize, yv: usize) -> SparsePoly {
        let mut out = SparsePoly::zero(n);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &c) in row.coeffs().iter().enumerate() {
                if c != 0 {
                    let mut e = vec![0; n];
                    e[xv] += i as i64;
                    e[yv] += j as i64;
                    out.add_term(k, e, c);
                }
            }
        }
        out
    }

    pub fn rows(&self) -> &[DensePoly] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> DensePoly {
        self.rows.get(i).cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Fp {
        self.rows.get(i).map_or(0, |r| r.coeff(j))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.rows.len() <= 1 && self.rows.first().is_none_or(|r| r.len() <= 1)
    }

    pub fn dx(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn dy(&self) -> usize {
        self.rows.iter().map(DensePoly::deg).max().unwrap_or(0)
    }

    /// Leading coefficient in x, a polynomial in y.
    pub fn lc_x(&self) -> DensePoly {
        self.rows.last().cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.coeffs().iter().filter(|&&c| c != 0).count())
            .sum()
    }

    /// F(sigma, y)
    pub fn eval_x(&self, k: &PrimeField, sigma: Fp) -> DensePoly {
        let mut acc = DensePoly::zero();
        for row in self.rows.iter().rev() {
            acc = unipoly::add(k, &acc.scale(k, sigma), row);
        }
        acc
    }

    /// F(x, a)
    pub fn eval_y(&self, k: &PrimeField, a: Fp) -> DensePoly {
        DensePoly::from_coeffs(self.rows.iter().map(|r| r.eval(k, a)).collect())
    }

    pub fn transpose(&self) -> Self {
        let dy = self.dy();
        if self.is_zero() {
            return Self::zero();
        }
        Self::from_rows(
            (0..=dy)
                .map(|j| DensePoly::from_coeffs(self.rows.iter().map(|r| r.coeff(j)).collect()))
                .collect(),
        )
    }

    pub fn add(&self, k: &PrimeField, other: &Self) -> Self {
        let n = self.rows.len().max(other.rows.len());
        Self::from_rows((0..n).map(|i| unipoly::add(k, &self.row(i), &other.row(i))).collect())
    }

    pub fn sub(&self, k: &PrimeField, other: &Self) -> Self {
        let n = self.rows.len().max(other.rows.len());
        Self::from_rows((0..n).map(|i| unipoly::sub(k, &self.row(i), &other.row(i))).collect())
    }

    pub fn scale(&self, k: &PrimeField, s: Fp) -> Self {
        Self::from_rows(self.rows.iter().map(|r| r.scale(k, s)).collect())
    }

    /// Multiplication by a polynomial in y.
    pub fn mul_y(&self, k: &PrimeField, f: &DensePoly) -> Self {
        Self::from_rows(self.rows.iter().map(|r| unipoly::mul(k, r, f)).collect())
    }

    pub fn mul(&self, k: &PrimeField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut rows = vec![DensePoly::zero(); self.rows.len() + other.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.rows.iter().enumerate() {
                rows[i + j] = unipoly::add(k, &rows[i + j], &unipoly::mul(k, a, b));
            }
        }
        Self::from_rows(rows)
    }

    pub fn pow(&self, k: &PrimeField, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(k, self);
        }
        acc
    }

    /// Reduces every row modulo y^n.
    pub fn truncate_y(&self, n: usize) -> Self {
        Self::from_rows(self.rows.iter().map(|r| r.truncate(n)).collect())
    }

    /// F(x, y + sigma)
    pub fn shift_y(&self, k: &PrimeField, sigma: Fp) -> Self {
        Self::from_rows(self.rows.iter().map(|r| r.taylor_shift(k, sigma)).collect())
    }

    /// F(x, h(x, y)) by Horner in y.
    pub fn compose_y(&self, k: &PrimeField, h: &Self) -> Self {
        let t = self.transpose();
        let mut acc = Self::zero();
        for col in t.rows.iter().rev() {
            acc = acc.mul(k, h).add(k, &Self::from_x(col));
        }
        acc
    }

    pub fn derivative_x(&self, k: &PrimeField) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, r)| r.scale(k, k.from_u64(i as u64)))
                .collect(),
        )
    }

    /// Divides every row by a polynomial in y, which must divide exactly.
    pub fn div_y(&self, k: &PrimeField, f: &DensePoly) -> Result<Self> {
        Ok(Self::from_rows(
            self.rows
                .iter()
                .map(|r| unipoly::div_exact(k, r, f))
                .collect::<Result<Vec<_>>>()?,
        ))
    }

    /// Exact quotient in K[x, y].
    pub fn div_exact(&self, k: &PrimeField, a: &Self) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if self.dx() < a.dx() {
            return Err(Error::NotDivisible);
        }
        let da = a.dx();
        let lc = a.lc_x();
        let mut r = self.rows.clone();
        let mut q = vec![DensePoly::zero(); self.dx() - da + 1];
        for i in (0..q.len()).rev() {
            let top = &r[i + da];
            if top.is_zero() {
                continue;
            }
            let qi = unipoly::div_exact(k, top, &lc)?;
            for (j, arow) in a.rows.iter().enumerate() {
                r[i + j] = unipoly::sub(k, &r[i + j], &unipoly::mul(k, &qi, arow));
            }
            q[i] = qi;
        }
        if r.iter().any(|row| !row.is_zero()) {
            return Err(Error::NotDivisible);
        }
        Ok(Self::from_rows(q))
    }

    /// Coefficient of the graded-lex leading term (x before y).
    pub fn glex_lc(&self) -> Fp {
        let mut best: Option<(usize, usize, Fp)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(j) = row.degree() {
                let key = (i + j, i);
                if best.is_none_or(|(d, bi, _)| key > (d, bi)) {
                    best = Some((key.0, key.1, row.lc()));
                }
            }
        }
        best.map_or(0, |b| b.2)
    }

    /// (c, F / c) with graded-lex leading coefficient 1.
    pub fn normalize(&self, k: &PrimeField) -> (Fp, Self) {
        let c = self.glex_lc();
        if c == 0 || c == 1 {
            return (c, self.clone());
        }
        (c, self.scale(k, k.inv_nz(c)))
    }
}

/// gcd of all rows (monic in y), computed exactly.
pub fn content_x_exact(k: &PrimeField, f: &BivPoly) -> DensePoly {
    let mut g = DensePoly::zero();
    for row in &f.rows {
        g = unipoly::gcd(k, &g, row);
        if g.is_one() {
            break;
        }
    }
    g
}

/// cont_x F = gcd(F(sigma, y), F(tau, y)) for random sigma, tau, verified
/// against every row; falls back to the exact row gcd.
pub fn content_x<R: Rng + ?Sized>(k: &PrimeField, f: &BivPoly, rng: &mut R) -> Result<DensePoly> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.dx() == 0 {
        return Ok(f.rows[0].make_monic(k));
    }
    for _ in 0..SHIFT_RETRIES {
        let (s, t) = (k.random_nonzero(rng), k.random_nonzero(rng));
        let g = unipoly::gcd(k, &f.eval_x(k, s), &f.eval_x(k, t));
        if g.is_zero() {
            continue;
        }
        // the specialized gcd is a multiple of the content; dividing every row makes it equal
        if g.is_one() || f.rows.iter().all(|r| unipoly::rem(k, r, &g).is_ok_and(|x| x.is_zero())) {
            return Ok(g);
        }
    }
    Ok(content_x_exact(k, f))
}

/// gcd of the columns, a polynomial in x (monic).
pub fn content_y<R: Rng + ?Sized>(k: &PrimeField, f: &BivPoly, rng: &mut R) -> Result<DensePoly> {
    content_x(k, &f.transpose(), rng)
}

fn primitive_exact(k: &PrimeField, f: &BivPoly) -> BivPoly {
    let c = content_x_exact(k, f);
    if c.is_zero() || c.is_one() {
        return f.clone();
    }
    f.div_y(k, &c).expect("content divides")
}

/// F = c R^l with lc_x(R) monic in y, verified by re-expansion.
pub fn biv_root_extract(k: &PrimeField, f: &BivPoly, l: usize) -> Result<(Fp, BivPoly)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if l == 0 {
        return Err(Error::Precondition("root index must be positive"));
    }
    let (c, lead) = unipoly::root_extract(k, &f.lc_x(), l)?;
    if l == 1 {
        return Ok((c, f.scale(k, k.inv_nz(c))));
    }
    if !f.dx().is_multiple_of(l) || !f.dy().is_multiple_of(l) {
        return Err(Error::NotAPower);
    }
    let m = f.dx() / l;
    let need = f.dy() / l + 1;
    let mut points = Vec::with_capacity(need);
    let mut samples: Vec<Vec<Fp>> = vec![Vec::with_capacity(need); m + 1];
    let mut y = 0u64;
    while points.len() < need {
        y += 1;
        if y >= k.p() {
            return Err(Error::Precondition("field too small for root extraction"));
        }
        let ly = lead.eval(k, y);
        if ly == 0 {
            continue;
        }
        let (_, g) = unipoly::root_extract(k, &f.eval_y(k, y), l)?;
        if g.deg() != m {
            return Err(Error::NotAPower);
        }
        points.push(y);
        for (i, s) in samples.iter_mut().enumerate() {
            s.push(k.mul(ly, g.coeff(i)));
        }
    }
    let rows = samples
        .iter()
        .map(|s| unipoly::interpolate(k, &points, s))
        .collect::<Result<Vec<_>>>()?;
    let r = BivPoly::from_rows(rows);
    if r.pow(k, l).scale(k, c) != *f {
        return Err(Error::NotAPower);
    }
    Ok((c, r))
}

/// y-slices of F: entry j is the coefficient of y^j, a polynomial in x.
fn y_slices(f: &BivPoly, nu: usize) -> Vec<DensePoly> {
    (0..nu)
        .map(|j| DensePoly::from_coeffs(f.rows.iter().map(|r| r.coeff(j)).collect()))
        .collect()
}

fn from_y_slices(slices: &[DensePoly]) -> BivPoly {
    let dx = slices.iter().map(DensePoly::len).max().unwrap_or(0);
    BivPoly::from_rows(
        (0..dx)
            .map(|i| DensePoly::from_coeffs(slices.iter().map(|s| s.coeff(i)).collect()))
            .collect(),
    )
}

/// Linear Hensel lifting in K[[y]][x]: F = P Q mod y^nu with P monic,
/// P(x, 0) = p0 and Q(x, 0) = q0.
fn series_lift(
    k: &PrimeField,
    fs: &[DensePoly],
    p0: &DensePoly,
    q0: &DensePoly,
    nu: usize,
) -> Result<(Vec<DensePoly>, Vec<DensePoly>)> {
    let (g, _, t) = unipoly::xgcd(k, p0, q0);
    if !g.is_one() {
        return Err(Error::LiftFailed("initial factors are not coprime"));
    }
    if fs.first().cloned().unwrap_or_default() != unipoly::mul(k, p0, q0) {
        return Err(Error::LiftFailed("initial factors do not multiply to F(x, 0)"));
    }
    let mut ps = vec![p0.clone()];
    let mut qs = vec![q0.clone()];
    for j in 1..nu {
        let mut e = fs.get(j).cloned().unwrap_or_default();
        for i in 1..j {
            e = unipoly::sub(k, &e, &unipoly::mul(k, &ps[i], &qs[j - i]));
        }
        let pj = unipoly::rem(k, &unipoly::mul(k, &e, &t), p0)?;
        let qj = unipoly::div_exact(k, &unipoly::sub(k, &e, &unipoly::mul(k, &pj, q0)), p0)
            .map_err(|_| Error::LiftFailed("inconsistent lifting step"))?;
        ps.push(pj);
        qs.push(qj);
    }
    Ok((ps, qs))
}

/// Lifts many monic factors of a monic series F; returns each lifted
/// factor as y-slices.
fn series_lift_multi(
    k: &PrimeField,
    fs: &[DensePoly],
    factors: &[DensePoly],
    nu: usize,
) -> Result<Vec<Vec<DensePoly>>> {
    if factors.len() == 1 {
        return Ok(vec![fs.to_vec()]);
    }
    let mid = factors.len() / 2;
    let a0 = factors[..mid].iter().fold(DensePoly::one(), |acc, f| unipoly::mul(k, &acc, f));
    let b0 = factors[mid..].iter().fold(DensePoly::one(), |acc, f| unipoly::mul(k, &acc, f));
    let (a, b) = series_lift(k, fs, &a0, &b0, nu)?;
    let mut out = series_lift_multi(k, &a, &factors[..mid], nu)?;
    out.extend(series_lift_multi(k, &b, &factors[mid..], nu)?);
    Ok(out)
}

/// Turns the lifted monic series factor into the true factor P = B P̂
/// and checks F = P Q exactly.
fn finish_lift(
    k: &PrimeField,
    f: &BivPoly,
    phat: &BivPoly,
    b: &DensePoly,
    nu: usize,
    dy: usize,
) -> Option<(BivPoly, BivPoly)> {
    let p = phat.mul_y(k, b).truncate_y(nu);
    if p.dy() > dy || b.coeff(0) == 0 {
        return None;
    }
    let p = p.scale(k, k.inv_nz(b.coeff(0)));
    let q = f.div_exact(k, &p).ok()?;
    Some((p, q))
}

/// Lifts F(x, 0) = P0 Q0 into F = P Q with P(x, 0) = P0, Q(x, 0) = Q0.
///
/// Requires cont_x F = 1, deg F(x, 0) = deg_x F, P0 monic and coprime to
/// Q0. The denominator of the monic series factor is found by rational
/// reconstruction of P̂(sigma, y).
pub fn hensel_lift_two<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &BivPoly,
    p0: &DensePoly,
    q0: &DensePoly,
    rng: &mut R,
) -> Result<(BivPoly, BivPoly)> {
    if !p0.is_monic() {
        return Err(Error::Precondition("P0 must be monic"));
    }
    let f0 = f.eval_y(k, 0);
    if f0.deg() != f.dx() || f0 != unipoly::mul(k, p0, q0) {
        return Err(Error::LiftFailed("F(x, 0) is not P0 Q0 of full degree"));
    }
    if p0.deg() == 0 {
        return Ok((BivPoly::one(), f.clone()));
    }
    if q0.deg() == 0 {
        let c = q0.coeff(0);
        return Ok((f.scale(k, k.inv_nz(c)), BivPoly::constant(c)));
    }
    let dy = f.dy();
    let nu = 2 * dy + 1;
    let (ps, _) = series_lift(k, &y_slices(f, nu), p0, q0, nu)?;
    let phat = from_y_slices(&ps);
    for _ in 0..SHIFT_RETRIES {
        let sigma = k.random_nonzero(rng);
        let s = phat.eval_x(k, sigma);
        if let Ok((_, b)) = unipoly::rational_reconstruct(k, &s, nu, dy) {
            if let Some(res) = finish_lift(k, f, &phat, &b, nu, dy) {
                return Ok(res);
            }
        }
    }
    // lcm of the per-coefficient denominators
    let mut b = DensePoly::one();
    for row in phat.rows() {
        let (_, bi) = unipoly::rational_reconstruct(k, row, nu, dy).map_err(|_| Error::ReconstructFailed)?;
        let g = unipoly::gcd(k, &b, &bi);
        b = unipoly::mul(k, &b, &unipoly::div_exact(k, &bi, &g)?);
    }
    finish_lift(k, f, &phat, &b, nu, dy).ok_or(Error::ReconstructFailed)
}

/// Lifts F(x, 0) = u prod P0_i^(m_i) (P0_i monic, pairwise coprime) into
/// F = u prod P_i^(m_i) with P_i(x, 0) = P0_i. Returns (u, [P_i]).
pub fn hensel_lift_multi<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &BivPoly,
    p0s: &[DensePoly],
    mults: &[usize],
    rng: &mut R,
) -> Result<(Fp, Vec<BivPoly>)> {
    assert_eq!(p0s.len(), mults.len());
    if p0s.is_empty() {
        return match f.is_constant() {
            true => Ok((f.coeff(0, 0), Vec::new())),
            false => Err(Error::LiftFailed("no initial factors")),
        };
    }
    if p0s.iter().any(|p| !p.is_monic()) {
        return Err(Error::Precondition("initial factors must be monic"));
    }
    let targets: Vec<DensePoly> = p0s
        .iter()
        .zip(mults)
        .map(|(p, &m)| unipoly::pow(k, p, m as u64))
        .collect();
    let mut leaves = Vec::with_capacity(targets.len());
    lift_tree(k, f, &targets, rng, &mut leaves)?;
    let mut unit = 1;
    let mut out = Vec::with_capacity(leaves.len());
    for ((g, p0), &m) in leaves.iter().zip(p0s).zip(mults) {
        let (c, r) = biv_root_extract(k, g, m).map_err(|_| Error::LiftFailed("lifted block is not a power"))?;
        let r0 = r.eval_y(k, 0);
        let scale = r0.lc();
        if scale == 0 || r0.make_monic(k) != *p0 {
            return Err(Error::LiftFailed("lifted factor does not match its image"));
        }
        unit = k.mul(unit, k.mul(c, k.pow(scale, m as u64)));
        out.push(r.scale(k, k.inv_nz(scale)));
    }
    Ok((unit, out))
}

fn lift_tree<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &BivPoly,
    targets: &[DensePoly],
    rng: &mut R,
    out: &mut Vec<BivPoly>,
) -> Result<()> {
    if targets.len() == 1 {
        out.push(f.clone());
        return Ok(());
    }
    let mid = targets.len() / 2;
    let a0 = targets[..mid].iter().fold(DensePoly::one(), |acc, t| unipoly::mul(k, &acc, t));
    let b0 = unipoly::div_exact(k, &f.eval_y(k, 0), &a0).map_err(|_| Error::LiftFailed("initial factors do not divide F(x, 0)"))?;
    let (a, b) = hensel_lift_two(k, f, &a0, &b0, rng)?;
    lift_tree(k, &a, &targets[..mid], rng, out)?;
    lift_tree(k, &b, &targets[mid..], rng, out)
}

fn shift_candidates<R: Rng + ?Sized>(k: &PrimeField, rng: &mut R) -> Vec<Fp> {
    if k.p() <= EXHAUSTIVE_SHIFT_LIMIT {
        (0..k.p()).collect()
    } else {
        (0..SHIFT_RETRIES).map(|_| k.random_nonzero(rng)).collect()
    }
}

/// Exact gcd in K[y][x] by primitive remainder sequences; the result has
/// graded-lex leading coefficient 1.
pub fn biv_gcd_exact(k: &PrimeField, a: &BivPoly, b: &BivPoly) -> BivPoly {
    if a.is_zero() {
        return b.normalize(k).1;
    }
    if b.is_zero() {
        return a.normalize(k).1;
    }
    let c = unipoly::gcd(k, &content_x_exact(k, a), &content_x_exact(k, b));
    let (mut u, mut v) = (primitive_exact(k, a), primitive_exact(k, b));
    if u.dx() < v.dx() {
        std::mem::swap(&mut u, &mut v);
    }
    while !v.is_zero() {
        if v.dx() == 0 {
            u = BivPoly::one();
            break;
        }
        let r = pseudo_rem(k, &u, &v);
        u = v;
        v = if r.is_zero() { r } else { primitive_exact(k, &r) };
    }
    u.mul_y(k, &c).normalize(k).1
}

fn pseudo_rem(k: &PrimeField, a: &BivPoly, b: &BivPoly) -> BivPoly {
    let db = b.dx();
    let lc = b.lc_x();
    let mut r = a.clone();
    while !r.is_zero() && r.dx() >= db {
        let shift = r.dx() - db;
        let top = r.lc_x();
        let mut rows = vec![DensePoly::zero(); shift];
        rows.extend(b.rows.iter().map(|row| unipoly::mul(k, row, &top)));
        r = r.mul_y(k, &lc).sub(k, &BivPoly::from_rows(rows));
    }
    r
}

/// Yun's algorithm over K[y][x] with exact gcds; F primitive in x and
/// char K > deg_x F.
fn yun_exact(k: &PrimeField, f: &BivPoly) -> Result<Vec<(BivPoly, usize)>> {
    let fx = f.derivative_x(k);
    let a0 = biv_gcd_exact(k, f, &fx);
    let mut b = f.div_exact(k, &a0)?;
    let c = fx.div_exact(k, &a0)?;
    let mut d = c.sub(k, &b.derivative_x(k));
    let mut out = Vec::new();
    let mut i = 1;
    while b.dx() > 0 {
        let a = biv_gcd_exact(k, &b, &d);
        b = b.div_exact(k, &a)?;
        let c = d.div_exact(k, &a)?;
        d = c.sub(k, &b.derivative_x(k));
        if a.dx() > 0 {
            out.push((a, i));
        }
        i += 1;
    }
    Ok(out)
}

/// Square-free parts of an x-primitive F (unit excluded).
fn squarefree_primitive<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &BivPoly,
    rng: &mut R,
) -> Result<Vec<(BivPoly, usize)>> {
    if f.dx() == 0 {
        return Ok(Vec::new());
    }
    let lc = f.lc_x();
    for sigma in shift_candidates(k, rng) {
        if lc.eval(k, sigma) == 0 {
            continue;
        }
        let g = f.shift_y(k, sigma);
        let Ok(sq) = unipoly::squarefree_decomposition(k, &g.eval_y(k, 0)) else {
            continue;
        };
        if sq.factors.len() == 1 && sq.factors[0].1 == 1 {
            return Ok(vec![(f.clone(), 1)]);
        }
        let p0s: Vec<DensePoly> = sq.factors.iter().map(|(p, _)| p.clone()).collect();
        let mults: Vec<usize> = sq.factors.iter().map(|(_, m)| *m).collect();
        let Ok((_, parts)) = hensel_lift_multi(k, &g, &p0s, &mults, rng) else {
            continue;
        };
        let parts: Vec<(BivPoly, usize)> = parts
            .into_iter()
            .map(|p| p.shift_y(k, k.neg(sigma)))
            .zip(mults)
            .collect();
        let prod = parts.iter().fold(BivPoly::one(), |acc, (p, m)| acc.mul(k, &p.pow(k, *m)));
        if prod.normalize(k).1 == f.normalize(k).1 {
            return Ok(parts);
        }
    }
    if (f.dx() as u64) >= k.p() {
        return Err(Error::Unsupported("characteristic does not exceed the x-degree"));
    }
    yun_exact(k, f)
}

fn with_unit(k: &PrimeField, f: &BivPoly, mut factors: Vec<(BivPoly, usize)>) -> BivFactorization {
    let mut prod = BivPoly::one();
    for (g, m) in factors.iter_mut() {
        *g = g.normalize(k).1;
        prod = prod.mul(k, &g.pow(k, *m));
    }
    let unit = k.mul(f.glex_lc(), k.inv_nz(prod.glex_lc()));
    factors.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| biv_order(a.0.clone(), b.0.clone())));
    BivFactorization { unit, factors }
}

fn biv_order(a: BivPoly, b: BivPoly) -> std::cmp::Ordering {
    let key = |f: &BivPoly| {
        let mut terms: Vec<(usize, usize, Fp)> = Vec::new();
        for (i, r) in f.rows.iter().enumerate() {
            for (j, &c) in r.coeffs().iter().enumerate() {
                if c != 0 {
                    terms.push((i + j, i, c));
                }
            }
        }
        terms.sort_by(|x, y| y.cmp(x));
        terms
    };
    key(&a).cmp(&key(&b))
}

/// Square-free decomposition F = u prod P_i^i; parts normalized and
/// pairwise coprime.
pub fn biv_squarefree<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &BivPoly,
    rng: &mut R,
) -> Result<BivFactorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let cy = content_x(k, f, rng)?;
    let f1 = f.div_y(k, &cy)?;
    let mut parts = squarefree_primitive(k, &f1, rng)?;
    for (g, m) in unipoly::squarefree_decomposition(k, &cy)?.factors {
        let gy = BivPoly::from_y(&g);
        match parts.iter_mut().find(|(_, e)| *e == m) {
            Some((p, _)) => *p = p.mul(k, &gy),
            None => parts.push((gy, m)),
        }
    }
    Ok(with_unit(k, f, parts))
}

/// Factors a square-free F primitive in both variables.
fn factor_squarefree_part<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &BivPoly,
    rng: &mut R,
) -> Result<Vec<BivPoly>> {
    if f.dx() == 0 {
        return Ok(vec![f.clone()]);
    }
    if f.dy() == 0 {
        let fz = unipoly::factor(k, &f.eval_y(k, 0), rng)?;
        return Ok(fz.factors.iter().map(|(g, _)| BivPoly::from_x(g)).collect());
    }
    let lc = f.lc_x();
    for sigma in shift_candidates(k, rng) {
        if lc.eval(k, sigma) == 0 {
            continue;
        }
        let g = f.shift_y(k, sigma);
        let g0 = g.eval_y(k, 0);
        if !unipoly::gcd(k, &g0, &g0.derivative(k)).is_one() {
            continue;
        }
        let found = lift_and_recombine(k, &g, rng)?;
        return Ok(found.into_iter().map(|h| h.shift_y(k, k.neg(sigma))).collect());
    }
    // Substitute y -> y + sigma + x^e: the new x-leading coefficient is a
    // constant and the y = 0 fiber becomes F(x, sigma + x^e).
    let dx = f.dx();
    for e in dx + 1..dx + 1 + SHIFT_RETRIES {
        for sigma in shift_candidates(k, rng) {
            let mut h_rows = vec![DensePoly::zero(); e + 1];
            h_rows[0] = DensePoly::from_coeffs(vec![sigma, 1]);
            h_rows[e] = DensePoly::one();
            let h = BivPoly::from_rows(h_rows.clone());
            let g = f.compose_y(k, &h);
            let g0 = g.eval_y(k, 0);
            if !unipoly::gcd(k, &g0, &g0.derivative(k)).is_one() {
                continue;
            }
            let found = lift_and_recombine(k, &g, rng)?;
            h_rows[0] = DensePoly::from_coeffs(vec![k.neg(sigma), 1]);
            h_rows[e] = DensePoly::constant(k.neg(1));
            let back = BivPoly::from_rows(h_rows);
            return Ok(found.into_iter().map(|q| primitive_exact(k, &q.compose_y(k, &back))).collect());
        }
    }
    Err(Error::DegenerateShift)
}

/// Factors G with G(x, 0) square-free of full degree: univariate factors,
/// series lifting of the monic G / lc_x(G), then Zassenhaus recombination.
fn lift_and_recombine<R: Rng + ?Sized>(
    k: &PrimeField,
    g: &BivPoly,
    rng: &mut R,
) -> Result<Vec<BivPoly>> {
    let g0 = g.eval_y(k, 0);
    let fz = unipoly::factor(k, &g0, rng)?;
    let locals: Vec<DensePoly> = fz.factors.iter().map(|(h, _)| h.clone()).collect();
    if locals.len() <= 1 {
        return Ok(vec![g.clone()]);
    }
    let dy = g.dy();
    let nu = 2 * dy + 1;
    let inv = unipoly::series_inverse(k, &g.lc_x(), nu)?;
    let monic = BivPoly::from_rows(
        g.rows
            .iter()
            .map(|r| unipoly::mul_trunc(k, r, &inv, nu))
            .collect(),
    );
    let lifted: Vec<BivPoly> = series_lift_multi(k, &y_slices(&monic, nu), &locals, nu)?
        .iter()
        .map(|s| from_y_slices(s))
        .collect();
    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut cur = g.clone();
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= remaining.len() {
        for subset in combinations(remaining.len(), size) {
            let mut h = BivPoly::from_y(&cur.lc_x());
            for &i in &subset {
                h = h.mul(k, &lifted[remaining[i]]).truncate_y(nu);
            }
            let h = primitive_exact(k, &h);
            if h.dx() == 0 || h.dx() >= cur.dx() {
                continue;
            }
            if let Ok(q) = cur.div_exact(k, &h) {
                found.push(h);
                cur = q;
                let drop: Vec<usize> = subset.iter().map(|&i| remaining[i]).collect();
                remaining.retain(|i| !drop.contains(i));
                continue 'outer;
            }
        }
        size += 1;
    }
    found.push(cur);
    Ok(found)
}

/// All size-r subsets of 0..n in lexicographic order.
pub(crate) fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Irreducible factorization F = u prod q_i^(e_i), factors normalized to
/// graded-lex leading coefficient 1 and sorted.
pub fn biv_factor<R: Rng + ?Sized>(k: &PrimeField, f: &BivPoly, rng: &mut R) -> Result<BivFactorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out: Vec<(BivPoly, usize)> = Vec::new();
    let cy = content_x(k, f, rng)?;
    let f1 = f.div_y(k, &cy)?;
    for (g, m) in unipoly::factor(k, &cy, rng)?.factors {
        out.push((BivPoly::from_y(&g), m));
    }
    let cx = content_y(k, &f1, rng)?;
    let f2 = f1.div_exact(k, &BivPoly::from_x(&cx))?;
    for (g, m) in unipoly::factor(k, &cx, rng)?.factors {
        out.push((BivPoly::from_x(&g), m));
    }
    if !f2.is_constant() {
        for (part, m) in squarefree_primitive(k, &f2, rng)? {
            for q in factor_squarefree_part(k, &part, rng)? {
                out.push((q, m));
            }
        }
    }
    let fz = with_unit(k, f, out);
    if fz.expand(k) != *f {
        return Err(Error::VerificationFailed("bivariate factorization does not re-expand"));
    }
    Ok(fz)
}

/// F(x t^p, t^q) t^(-val), a polynomial in (x, t).
pub fn single_slope_transform(f: &BivPoly, p: i64, q: i64) -> BivPoly {
    assert!(q > 0, "q must be positive");
    let mut terms = Vec::new();
    for (i, row) in f.rows.iter().enumerate() {
        for (j, &c) in row.coeffs().iter().enumerate() {
            if c != 0 {
                terms.push((i, p * i as i64 + q * j as i64, c));
            }
        }
    }
    let v = terms.iter().map(|t| t.1).min().unwrap_or(0);
    let dx = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let dt = terms.iter().map(|t| t.1 - v).max().unwrap_or(0) as usize;
    let mut grid = vec![vec![0; dt + 1]; dx + 1];
    for (i, m, c) in terms {
        grid[i][(m - v) as usize] = c;
    }
    BivPoly::from_rows(grid.into_iter().map(DensePoly::from_coeffs).collect())
}

/// Inverse of `single_slope_transform` on factors, normalized to have
/// y-valuation 0.
pub fn single_slope_inverse(f: &BivPoly, p: i64, q: i64) -> Result<BivPoly> {
    let mut terms = Vec::new();
    for (i, row) in f.rows.iter().enumerate() {
        for (m, &c) in row.coeffs().iter().enumerate() {
            if c != 0 {
                terms.push((i as i64, m as i64, c));
            }
        }
    }
    let Some(&(i0, m0, _)) = terms.first() else {
        return Ok(BivPoly::zero());
    };
    let v = (p * i0 - m0).rem_euclid(q);
    let mut js = Vec::with_capacity(terms.len());
    for &(i, m, _) in &terms {
        let num = m + v - p * i;
        if num.rem_euclid(q) != 0 {
            return Err(Error::LiftFailed("factor is not quasi-homogeneous for the slope"));
        }
        js.push(num / q);
    }
    let jmin = js.iter().copied().min().unwrap_or(0);
    let dx = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
    let dy = js.iter().map(|j| j - jmin).max().unwrap_or(0) as usize;
    let mut grid = vec![vec![0; dy + 1]; dx + 1];
    for ((i, _, c), j) in terms.into_iter().zip(js) {
        grid[i as usize][(j - jmin) as usize] = c;
    }
    Ok(BivPoly::from_rows(grid.into_iter().map(DensePoly::from_coeffs).collect()))
}

/// Lifts the factorization tp_w F = tpP tpQ along a single Newton polygon
/// edge of slope data (p, q).
pub fn hensel_lift_single_slope<R: Rng + ?Sized>(
    k: &PrimeField,
    f: &BivPoly,
    tp_p: &BivPoly,
    tp_q: &BivPoly,
    p: i64,
    q: i64,
    rng: &mut R,
) -> Result<(BivPoly, BivPoly)> {
    let ft = single_slope_transform(f, p, q);
    let a = single_slope_transform(tp_p, p, q).eval_y(k, 0);
    let b = single_slope_transform(tp_q, p, q).eval_y(k, 0);
    let (ca, a) = a.monic(k);
    if ca == 0 {
        return Err(Error::LiftFailed("empty edge factor"));
    }
    let b = b.scale(k, ca);
    if ft.eval_y(k, 0) != unipoly::mul(k, &a, &b) {
        return Err(Error::LiftFailed("edge factors do not match the edge polynomial"));
    }
    let (pt, _) = hensel_lift_two(k, &ft, &a, &b, rng).map_err(|e| match e {
        Error::ReconstructFailed => Error::LiftFailed("reconstruction failed"),
        other => other,
    })?;
    let pp = single_slope_inverse(&pt, p, q)?;
    let qq = f
        .div_exact(k, &pp)
        .map_err(|_| Error::LiftFailed("lifted factor does not divide F"))?;
    Ok((pp, qq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn biv(k: &PrimeField, s: &str) -> BivPoly {
        let f = SparsePoly::parse(k, s, Some(2)).unwrap();
        BivPoly::from_sparse(&f, 0, 1).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(17)
    }

    #[test]
    fn contents() {
        let k = PrimeField::new(101).unwrap();
        let mut r = rng();
        let f = biv(&k, "x1*x2^2 - x1 + x2^2 - 1");
        assert_eq!(content_x(&k, &f, &mut r).unwrap(), DensePoly::from_i64s(&k, &[-1, 0, 1]));
        assert!(content_x(&k, &biv(&k, "x1 + x2"), &mut r).unwrap().is_one());
        let f54 = biv(&k, "x1^20 - 1 + x1^9*x2 - x1^5*x2 - x1^4*x2 + x2");
        let c = content_y(&k, &f54, &mut r).unwrap();
        assert_eq!(c, DensePoly::from_i64s(&k, &[-1, -1, -1, -1, 0, 1, 1, 1, 1]));
    }

    #[test]
    fn root_extraction() {
        let k = PrimeField::new(101).unwrap();
        let s = biv(&k, "x1 + x2");
        assert_eq!(biv_root_extract(&k, &s.pow(&k, 2), 2).unwrap(), (1, s.clone()));
        assert_eq!(biv_root_extract(&k, &s.pow(&k, 2).scale(&k, 3), 2).unwrap(), (3, s));
        assert_eq!(biv_root_extract(&k, &biv(&k, "x1^2 + x2"), 2), Err(Error::NotAPower));
        let r = biv(&k, "x1^2*x2 + 3*x1 + x2^2 + 5");
        let (c, got) = biv_root_extract(&k, &r.pow(&k, 3).scale(&k, 7), 3).unwrap();
        assert_eq!(got.pow(&k, 3).scale(&k, c), r.pow(&k, 3).scale(&k, 7));
    }

    fn example_45(k: &PrimeField) -> BivPoly {
        biv(
            k,
            "x1^3*x2^2 - x1^3 + x1^2*x2^3 + x1^2 + x1*x2^2 + 3*x1*x2 - 2*x1 + 2*x2^2 - 2*x2",
        )
    }

    #[test]
    fn lift_two_example() {
        let k = PrimeField::new(10007).unwrap();
        let mut r = rng();
        let f = example_45(&k);
        let p0 = DensePoly::from_i64s(&k, &[2, -1, 1]);
        let q0 = DensePoly::from_i64s(&k, &[0, -1]);
        let (p, q) = hensel_lift_two(&k, &f, &p0, &q0, &mut r).unwrap();
        assert_eq!(p.mul(&k, &q), f);
        let want_p = biv(&k, "x1^2*x2^2 - x1^2 + x1*x2 + x1 + 2*x2 - 2");
        assert_eq!(p.normalize(&k).1, want_p.normalize(&k).1);
        assert_eq!(q.normalize(&k).1, biv(&k, "x1 + x2"));
        // P(x, 0) = P0 fixes the unit
        assert_eq!(p.eval_y(&k, 0), p0);
    }

    #[test]
    fn lift_two_simple_and_failure() {
        let k = PrimeField::new(101).unwrap();
        let mut r = rng();
        let f = biv(&k, "x1 + x2").mul(&k, &biv(&k, "x1 + 1"));
        let (p, q) = hensel_lift_two(
            &k,
            &f,
            &DensePoly::from_i64s(&k, &[0, 1]),
            &DensePoly::from_i64s(&k, &[1, 1]),
            &mut r,
        )
        .unwrap();
        assert_eq!((p, q), (biv(&k, "x1 + x2"), biv(&k, "x1 + 1")));
        let g = biv(&k, "x1^2 + x2");
        let x = DensePoly::from_i64s(&k, &[0, 1]);
        assert!(matches!(hensel_lift_two(&k, &g, &x, &x, &mut r), Err(Error::LiftFailed(_))));
    }

    #[test]
    fn lift_multi() {
        let k = PrimeField::new(101).unwrap();
        let mut r = rng();
        let a = biv(&k, "x1 + x2");
        let b = biv(&k, "x1 + 1");
        let c = biv(&k, "x1 + 2 + x2");
        let f = a.mul(&k, &b).mul(&k, &c);
        let p0s: Vec<DensePoly> = [&a, &b, &c].iter().map(|p| p.eval_y(&k, 0)).collect();
        let (u, got) = hensel_lift_multi(&k, &f, &p0s, &[1, 1, 1], &mut r).unwrap();
        assert_eq!((u, got), (1, vec![a.clone(), b.clone(), c.clone()]));
        let (u, got) = hensel_lift_multi(&k, &f, &[f.eval_y(&k, 0)], &[1], &mut r).unwrap();
        assert_eq!((u, got), (1, vec![f.clone()]));
        let x = DensePoly::from_i64s(&k, &[0, 1]);
        assert!(hensel_lift_multi(&k, &f, &[x.clone(), x], &[1, 1], &mut r).is_err());
        let g = a.pow(&k, 2).mul(&k, &c).scale(&k, 5);
        let (u, got) = hensel_lift_multi(&k, &g, &[p0s[0].clone(), p0s[2].clone()], &[2, 1], &mut r).unwrap();
        assert_eq!(u, 5);
        assert_eq!(got, vec![a, c]);
    }

    #[test]
    fn squarefree() {
        let k = PrimeField::new(101).unwrap();
        let mut r = rng();
        let a = biv(&k, "x1 + x2");
        let b = biv(&k, "x1 - x2");
        let sq = biv_squarefree(&k, &a.pow(&k, 2).mul(&k, &b), &mut r).unwrap();
        assert_eq!(sq.factors, vec![(b.clone(), 1), (a.clone(), 2)]);
        let sq = biv_squarefree(&k, &a.mul(&k, &b), &mut r).unwrap();
        assert_eq!(sq.factors, vec![(a.mul(&k, &b), 1)]);
        let sq = biv_squarefree(&k, &a.pow(&k, 3), &mut r).unwrap();
        assert_eq!(sq.factors, vec![(a, 3)]);
    }

    #[test]
    fn exact_yun_in_small_field() {
        let k = PrimeField::new(3).unwrap();
        let a = biv(&k, "x1 + x2^2 + x2");
        let b = biv(&k, "x1*x2 + 1");
        let f = a.pow(&k, 2).mul(&k, &b);
        let parts = yun_exact(&k, &f).unwrap();
        let fz = with_unit(&k, &f, parts);
        assert_eq!(fz.expand(&k), f);
        assert_eq!(fz.factors.len(), 2);
    }

    #[test]
    fn factoring() {
        let k = PrimeField::new(101).unwrap();
        let mut r = rng();
        let fz = biv_factor(&k, &biv(&k, "x1^2 - x2^2"), &mut r).unwrap();
        assert_eq!(fz.factors, vec![(biv(&k, "x1 + x2"), 1), (biv(&k, "x1 - x2"), 1)]);
        let k7 = PrimeField::new(7).unwrap();
        let fz = biv_factor(&k7, &biv(&k7, "x1^2 + 1"), &mut r).unwrap();
        assert_eq!(fz.factors.len(), 1);
        let k2 = PrimeField::new(10007).unwrap();
        let f = example_45(&k2);
        let fz = biv_factor(&k2, &f, &mut r).unwrap();
        assert_eq!(fz.factors.len(), 2);
        assert_eq!(fz.expand(&k2), f);
        assert!(fz.factors.iter().any(|(g, _)| *g == biv(&k2, "x1 + x2")));
    }

    #[test]
    fn factoring_tiny_field_without_good_shift() {
        let k = PrimeField::new(3).unwrap();
        let mut r = rng();
        // every y = sigma fiber of x^2 + x y^2 + y^2 over F_3 is a square or degenerate
        let f = biv(&k, "x1^2 + x1*x2^2 + x2^2");
        let fz = biv_factor(&k, &f, &mut r).unwrap();
        assert_eq!(fz.expand(&k), f);
        assert_eq!(fz.factors.len(), 1);
    }

    #[test]
    fn slope_transform() {
        let k = PrimeField::new(101).unwrap();
        let f = biv(&k, "x1^2 + x2");
        let t = single_slope_transform(&f, 1, 2);
        assert_eq!(t, BivPoly::from_x(&DensePoly::from_i64s(&k, &[1, 0, 1])));
        let h = biv(&k, "x1 + x2").mul(&k, &biv(&k, "x1 + 2*x2"));
        assert_eq!(single_slope_transform(&h, 1, 1).dy(), 0);
        assert_eq!(single_slope_transform(&biv(&k, "x1*x2^2 + x2^3"), 0, 1), biv(&k, "x1 + x2"));
        let a = biv(&k, "x1^3*x2 + 2*x2^4 + x1");
        let b = biv(&k, "x1*x2^2 + 5 + x1^2");
        assert_eq!(
            single_slope_transform(&a.mul(&k, &b), 2, 3),
            single_slope_transform(&a, 2, 3).mul(&k, &single_slope_transform(&b, 2, 3))
        );
    }

    #[test]
    fn single_slope_lift() {
        let k = PrimeField::new(101).unwrap();
        let mut r = rng();
        let a = biv(&k, "x1 + x2");
        let b = biv(&k, "x1 + 2*x2");
        let (p, q) = hensel_lift_single_slope(&k, &a.mul(&k, &b), &a, &b, 1, 1, &mut r).unwrap();
        assert_eq!(p, a);
        assert_eq!(q, b);
        assert!(hensel_lift_single_slope(&k, &a.mul(&k, &a), &a, &a, 1, 1, &mut r).is_err());
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 1), vec![vec![0], vec![1], vec![2]]);
    }
}
