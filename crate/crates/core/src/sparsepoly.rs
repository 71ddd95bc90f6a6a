//! Sparse multivariate Laurent polynomials over F_p.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors under graded-lex
//! order, so iteration, printing and serialization are canonical.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::unipoly::DensePoly;

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i64>);

impl Monomial {
    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    n: usize,
    terms: BTreeMap<Monomial, Fp>,
}

/// Weighted degree data of a polynomial for one weight vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightProfile {
    pub deg: i64,
    pub val: i64,
    pub ec: i64,
    pub lp: SparsePoly,
    pub tp: SparsePoly,
    pub regular: bool,
    /// Coefficient of the single leading term when `regular`.
    pub lc: Option<Fp>,
}

/// Lower boundary of a planar point set, left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, i64)>,
    /// Per edge (dj, di) in lowest terms with di > 0, i.e. slope dj/di.
    pub slopes: Vec<(i64, i64)>,
}

fn dot(w: &[i64], e: &[i64]) -> i64 {
    w.iter().zip(e).map(|(a, b)| a * b).sum()
}

impl SparsePoly {
    pub fn zero(n: usize) -> Self {
        SparsePoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Fp) -> Self {
        Self::monomial(n, vec![0; n], c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, 1)
    }

    /// x_i (0-based index).
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::monomial(n, e, 1)
    }

    pub fn monomial(n: usize, e: Vec<i64>, c: Fp) -> Self {
        assert_eq!(e.len(), n, "exponent length");
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Monomial(e), c);
        }
        SparsePoly { n, terms }
    }

    /// Builds a polynomial, merging repeated exponents.
    pub fn from_terms<I>(k: &PrimeField, n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, Fp)>,
    {
        let mut out = Self::zero(n);
        for (e, c) in terms {
            out.add_term(k, e, c);
        }
        out
    }

    /// Adds c x^e in place.
    pub fn add_term(&mut self, k: &PrimeField, e: Vec<i64>, c: Fp) {
        assert_eq!(e.len(), self.n, "exponent length");
        if c == 0 {
            return;
        }
        let key = Monomial(e);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = k.add(*v, c);
                if *v == 0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[i64], Fp)> + '_ {
        self.terms.iter().map(|(m, &c)| (m.0.as_slice(), c))
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().map(|m| m.0.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().all(|m| m.0.iter().all(|&x| x == 0)))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<Fp> {
        if self.is_zero() {
            return Some(0);
        }
        if self.is_constant() {
            return self.terms.values().next().copied();
        }
        None
    }

    pub fn coeff(&self, e: &[i64]) -> Fp {
        self.terms.get(&Monomial(e.to_vec())).copied().unwrap_or(0)
    }

    /// Graded-lex leading term.
    pub fn leading_term(&self) -> Option<(&[i64], Fp)> {
        self.terms.iter().next_back().map(|(m, &c)| (m.0.as_slice(), c))
    }

    pub fn lc(&self) -> Fp {
        self.leading_term().map_or(0, |(_, c)| c)
    }

    /// Returns (lc, P / lc) so that the graded-lex leading coefficient is 1.
    pub fn normalize(&self, k: &PrimeField) -> (Fp, Self) {
        let lc = self.lc();
        if lc == 0 || lc == 1 {
            return (lc, self.clone());
        }
        (lc, self.scale(k, k.inv_nz(lc)))
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> i64 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn valuation_in(&self, i: usize) -> i64 {
        self.terms.keys().map(|m| m.0[i]).min().unwrap_or(0)
    }

    pub fn max_exponents(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.degree_in(i)).collect()
    }

    pub fn min_exponents(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.valuation_in(i)).collect()
    }

    /// max_i deg_{x_i}
    pub fn max_degree(&self) -> i64 {
        self.max_exponents().into_iter().max().unwrap_or(0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&x| x >= 0))
    }

    /// Indices of variables with a nonzero exponent somewhere.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] != 0))
            .collect()
    }

    pub fn neg(&self, k: &PrimeField) -> Self {
        SparsePoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), k.neg(c))).collect(),
        }
    }

    pub fn scale(&self, k: &PrimeField, s: Fp) -> Self {
        if s == 0 {
            return Self::zero(self.n);
        }
        SparsePoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), k.mul(c, s))).collect(),
        }
    }

    pub fn add(&self, k: &PrimeField, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count");
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(k, m.0.clone(), c);
        }
        out
    }

    pub fn sub(&self, k: &PrimeField, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count");
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(k, m.0.clone(), k.neg(c));
        }
        out
    }

    /// Schoolbook product.
    pub fn mul(&self, k: &PrimeField, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count");
        let mut acc: std::collections::HashMap<Vec<i64>, Fp> = std::collections::HashMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let e: Vec<i64> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                let v = acc.entry(e).or_insert(0);
                *v = k.mul_add(ca, cb, *v);
            }
        }
        SparsePoly {
            n: self.n,
            terms: acc
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|(e, c)| (Monomial(e), c))
                .collect(),
        }
    }

    pub fn pow(&self, k: &PrimeField, e: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..e {
            acc = acc.mul(k, self);
        }
        acc
    }

    /// P * x^e
    pub fn mul_monomial(&self, e: &[i64]) -> Self {
        SparsePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (Monomial(m.0.iter().zip(e).map(|(a, b)| a + b).collect()), c))
                .collect(),
        }
    }

    /// Splits P = x^v Q with v the componentwise minimum exponent.
    pub fn strip_monomial(&self) -> (Vec<i64>, Self) {
        if self.is_zero() {
            return (vec![0; self.n], self.clone());
        }
        let v = self.min_exponents();
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        (v, self.mul_monomial(&neg))
    }

    pub fn eval(&self, k: &PrimeField, point: &[Fp]) -> Result<Fp> {
        if point.len() != self.n {
            return Err(Error::ArityMismatch(point.len(), self.n));
        }
        let mut acc = 0;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if point[i] == 0 && e < 0 {
                    return Err(Error::ZeroSubstitutionForLaurent);
                }
                t = k.mul(t, k.pow_signed(point[i], e));
            }
            acc = k.add(acc, t);
        }
        Ok(acc)
    }

    /// Partial evaluation; substituted variables keep their slot with
    /// exponent 0.
    pub fn substitute(&self, k: &PrimeField, assignment: &[(usize, Fp)]) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for (m, &c) in &self.terms {
            let mut e = m.0.clone();
            let mut t = c;
            for &(i, v) in assignment {
                if e[i] == 0 {
                    continue;
                }
                if v == 0 && e[i] < 0 {
                    return Err(Error::ZeroSubstitutionForLaurent);
                }
                t = k.mul(t, k.pow_signed(v, e[i]));
                e[i] = 0;
            }
            out.add_term(k, e, t);
        }
        Ok(out)
    }

    /// Weighted degree, valuation, ecart and extreme parts.
    pub fn weight_profile(&self, w: &[i64]) -> Result<WeightProfile> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut deg = i64::MIN;
        let mut val = i64::MAX;
        for m in self.terms.keys() {
            let d = dot(w, &m.0);
            deg = deg.max(d);
            val = val.min(d);
        }
        let part = |target: i64| SparsePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| dot(w, &m.0) == target)
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        };
        let lp = part(deg);
        let tp = part(val);
        let regular = lp.len() == 1;
        let lc = if regular { Some(lp.lc()) } else { None };
        Ok(WeightProfile {
            deg,
            val,
            ec: deg - val,
            lp,
            tp,
            regular,
            lc,
        })
    }

    /// P(x_1 t^{w_1}, ..., x_n t^{w_n}) with t appended as the last variable.
    pub fn tag(&self, w: &[i64]) -> Self {
        SparsePoly {
            n: self.n + 1,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| {
                    let mut e = m.0.clone();
                    e.push(dot(w, &m.0));
                    (Monomial(e), c)
                })
                .collect(),
        }
    }

    /// Sets the last variable to 1 and drops it.
    pub fn untag(&self, k: &PrimeField) -> Self {
        let mut out = Self::zero(self.n - 1);
        for (m, &c) in &self.terms {
            out.add_term(k, m.0[..self.n - 1].to_vec(), c);
        }
        out
    }

    /// e -> M e for an m x n matrix M; colliding images merge.
    pub fn monomial_map(&self, k: &PrimeField, m: &[Vec<i64>]) -> Self {
        let rows = m.len();
        let mut out = Self::zero(rows);
        for (mono, &c) in &self.terms {
            let e: Vec<i64> = m.iter().map(|row| dot(row, &mono.0)).collect();
            out.add_term(k, e, c);
        }
        out
    }

    /// Renames variables: new variable i is old variable perm[i].
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        SparsePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (Monomial(perm.iter().map(|&j| m.0[j]).collect()), c))
                .collect(),
        }
    }

    /// Embeds into n' >= n variables (new ones appended).
    pub fn extend(&self, n: usize) -> Self {
        assert!(n >= self.n);
        SparsePoly {
            n,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| {
                    let mut e = m.0.clone();
                    e.resize(n, 0);
                    (Monomial(e), c)
                })
                .collect(),
        }
    }

    /// Restriction to the listed variables, which must carry every nonzero
    /// exponent.
    pub fn select_vars(&self, vars: &[usize]) -> Self {
        SparsePoly {
            n: vars.len(),
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| {
                    debug_assert!((0..self.n).all(|i| vars.contains(&i) || m.0[i] == 0));
                    (Monomial(vars.iter().map(|&i| m.0[i]).collect()), c)
                })
                .collect(),
        }
    }

    /// Inverse of `select_vars`: places the variables at slot `vars[i]` of
    /// an n-variable polynomial.
    pub fn embed_vars(&self, n: usize, vars: &[usize]) -> Self {
        SparsePoly {
            n,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| {
                    let mut e = vec![0; n];
                    for (j, &i) in vars.iter().enumerate() {
                        e[i] = m.0[j];
                    }
                    (Monomial(e), c)
                })
                .collect(),
        }
    }

    /// Coefficients with respect to x_i; the x_i slot is zeroed.
    pub fn coefficients_in(&self, i: usize) -> BTreeMap<i64, SparsePoly> {
        let mut out: BTreeMap<i64, SparsePoly> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let mut e = m.0.clone();
            let d = e[i];
            e[i] = 0;
            out.entry(d)
                .or_insert_with(|| SparsePoly::zero(self.n))
                .terms
                .insert(Monomial(e), c);
        }
        out
    }

    /// Univariate view in x_i; all other exponents must vanish.
    pub fn to_dense(&self, i: usize) -> Result<DensePoly> {
        let mut c = vec![0; self.degree_in(i).max(0) as usize + 1];
        for (m, &v) in &self.terms {
            if m.0.iter().enumerate().any(|(j, &e)| (j != i && e != 0) || e < 0) {
                return Err(Error::Precondition("not a univariate polynomial"));
            }
            c[m.0[i] as usize] = v;
        }
        Ok(DensePoly::from_coeffs(c))
    }

    pub fn from_dense(n: usize, i: usize, f: &DensePoly) -> Self {
        let mut terms = BTreeMap::new();
        for (d, &c) in f.coeffs().iter().enumerate() {
            if c != 0 {
                let mut e = vec![0; n];
                e[i] = d as i64;
                terms.insert(Monomial(e), c);
            }
        }
        SparsePoly { n, terms }
    }

    /// Exact quotient self / a in the Laurent ring, by leading-term
    /// division after clearing monomial factors.
    pub fn div_exact(&self, k: &PrimeField, a: &Self) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.n));
        }
        let (vc, c) = self.strip_monomial();
        let (va, a) = a.strip_monomial();
        let shift: Vec<i64> = vc.iter().zip(&va).map(|(x, y)| x - y).collect();
        let (lm, lc) = a.leading_term().expect("nonzero");
        let lm = lm.to_vec();
        let inv = k.inv_nz(lc);
        let bound: Vec<i64> = c
            .max_exponents()
            .iter()
            .zip(a.max_exponents())
            .map(|(x, y)| x - y)
            .collect();
        let mut r = c.terms.clone();
        let mut q = Self::zero(self.n);
        while let Some((m, &v)) = r.iter().next_back() {
            let e: Vec<i64> = m.0.iter().zip(&lm).map(|(x, y)| x - y).collect();
            if e.iter().zip(&bound).any(|(&x, &b)| x < 0 || x > b) {
                return Err(Error::NotDivisible);
            }
            let coef = k.mul(v, inv);
            for (am, &ac) in &a.terms {
                let t: Vec<i64> = am.0.iter().zip(&e).map(|(x, y)| x + y).collect();
                let key = Monomial(t);
                let prod = k.mul(coef, ac);
                match r.get_mut(&key) {
                    Some(x) => {
                        *x = k.sub(*x, prod);
                        if *x == 0 {
                            r.remove(&key);
                        }
                    }
                    None => {
                        r.insert(key, k.neg(prod));
                    }
                }
            }
            q.terms.insert(Monomial(e), coef);
        }
        Ok(q.mul_monomial(&shift))
    }

    pub fn divides(&self, k: &PrimeField, c: &Self) -> bool {
        c.div_exact(k, self).is_ok()
    }

    /// Text form: descending graded-lex terms, symmetric coefficients.
    pub fn to_text(&self, k: &PrimeField) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (m, &c)) in self.terms.iter().rev().enumerate() {
            let v = k.to_signed(c);
            let mag = v.unsigned_abs();
            if idx == 0 {
                if v < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if v < 0 { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            let is_const = m.0.iter().all(|&e| e == 0);
            if mag != 1 || is_const {
                parts.push(mag.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("x{}", i + 1)),
                    _ => parts.push(format!("x{}^{}", i + 1, e)),
                }
            }
            let _ = write!(s, "{}", parts.join("*"));
        }
        s
    }

    /// Parses the text grammar; `n` defaults to the largest variable index.
    pub fn parse(k: &PrimeField, text: &str, n: Option<usize>) -> Result<Self> {
        parse_text(k, text, n, 1)
    }

    pub fn to_json(&self) -> JsonPoly {
        JsonPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, &c)| JsonTerm {
                    c: c.to_string(),
                    e: m.0.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(k: &PrimeField, j: &JsonPoly) -> Result<Self> {
        let mut out = Self::zero(j.n);
        for (idx, t) in j.terms.iter().enumerate() {
            let perr = |message: String| Error::Parse {
                line: 1,
                column: idx + 1,
                message,
            };
            if t.e.len() != j.n {
                return Err(perr(format!("term {} has {} exponents, expected {}", idx, t.e.len(), j.n)));
            }
            let c = reduce_decimal(k, &t.c).ok_or_else(|| perr(format!("bad coefficient `{}`", t.c)))?;
            out.add_term(k, t.e.clone(), c);
        }
        Ok(out)
    }
}

/// JSON wire form: `{"n": .., "terms": [{"c": "<decimal>", "e": [..]}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonPoly {
    pub n: usize,
    pub terms: Vec<JsonTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub c: String,
    pub e: Vec<i64>,
}

fn reduce_decimal(k: &PrimeField, s: &str) -> Option<Fp> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(d) => (true, d),
        None => (false, s),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let p = k.p() as u128;
    let mut acc: u128 = 0;
    for b in digits.bytes() {
        acc = (acc * 10 + (b - b'0') as u128) % p;
    }
    let v = acc as Fp;
    Some(if neg { k.neg(v) } else { v })
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl Lexer<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii"))
    }
}

pub(crate) fn parse_text(k: &PrimeField, text: &str, n: Option<usize>, line: usize) -> Result<SparsePoly> {
    let mut lx = Lexer {
        s: text.as_bytes(),
        pos: 0,
        line,
    };
    let mut raw: Vec<(BTreeMap<usize, i64>, Fp)> = Vec::new();
    let mut first = true;
    loop {
        let mut sign_neg = false;
        match lx.peek() {
            None if first => return Err(lx.err("empty polynomial")),
            None => break,
            Some(b'+') => lx.pos += 1,
            Some(b'-') => {
                sign_neg = true;
                lx.pos += 1;
            }
            Some(_) if first => {}
            Some(c) => return Err(lx.err(format!("expected `+` or `-`, found `{}`", c as char))),
        }
        first = false;
        let mut coef: Fp = 1;
        let mut exps: BTreeMap<usize, i64> = BTreeMap::new();
        loop {
            match lx.peek() {
                Some(b'x') => {
                    lx.pos += 1;
                    let col = lx.pos;
                    let idx: usize = lx.digits()?.parse().map_err(|_| lx.err("variable index too large"))?;
                    if idx == 0 {
                        lx.pos = col;
                        return Err(lx.err("variables are numbered from x1"));
                    }
                    let mut e: i64 = 1;
                    if lx.peek() == Some(b'^') {
                        lx.pos += 1;
                        let neg = if lx.peek() == Some(b'-') {
                            lx.pos += 1;
                            true
                        } else {
                            false
                        };
                        e = lx.digits()?.parse().map_err(|_| lx.err("exponent too large"))?;
                        if neg {
                            e = -e;
                        }
                    }
                    *exps.entry(idx - 1).or_insert(0) += e;
                }
                Some(c) if c.is_ascii_digit() => {
                    let d = lx.digits()?.to_string();
                    coef = k.mul(coef, reduce_decimal(k, &d).expect("digits"));
                }
                Some(c) => return Err(lx.err(format!("unexpected `{}`", c as char))),
                None => return Err(lx.err("unexpected end of input")),
            }
            if lx.peek() == Some(b'*') {
                lx.pos += 1;
            } else {
                break;
            }
        }
        if sign_neg {
            coef = k.neg(coef);
        }
        raw.push((exps, coef));
    }
    let needed = raw
        .iter()
        .filter_map(|(e, _)| e.keys().next_back().map(|i| i + 1))
        .max()
        .unwrap_or(0);
    let n = match n {
        Some(n) if needed > n => {
            return Err(Error::Parse {
                line,
                column: 1,
                message: format!("variable x{} exceeds declared count {}", needed, n),
            })
        }
        Some(n) => n,
        None => needed,
    };
    let mut out = SparsePoly::zero(n);
    for (exps, c) in raw {
        let mut e = vec![0; n];
        for (i, v) in exps {
            e[i] = v;
        }
        out.add_term(k, e, c);
    }
    Ok(out)
}

/// A weight making P regular with small ecart.
///
/// Probes the signed unit vectors and `trials` random vectors in
/// [-3, 3]^n, keeping the regular one of minimal ecart; falls back to the
/// support point of maximal Euclidean norm, which is always regular.
pub fn regularizing_weight<R: Rng + ?Sized>(p: &SparsePoly, trials: usize, rng: &mut R) -> Vec<i64> {
    let n = p.nvars();
    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut consider = |w: Vec<i64>| {
        if w.iter().all(|&x| x == 0) {
            return;
        }
        if let Ok(prof) = p.weight_profile(&w) {
            if prof.regular && best.as_ref().is_none_or(|(ec, _)| prof.ec < *ec) {
                best = Some((prof.ec, w));
            }
        }
    };
    for i in 0..n {
        for s in [1, -1] {
            let mut w = vec![0; n];
            w[i] = s;
            consider(w);
        }
    }
    for _ in 0..trials {
        consider((0..n).map(|_| rng.gen_range(-3..=3)).collect());
    }
    if let Some((_, w)) = best {
        return w;
    }
    p.terms
        .keys()
        .rev()
        .max_by_key(|m| m.0.iter().map(|x| x * x).sum::<i64>())
        .map(|m| m.0.clone())
        .unwrap_or_else(|| {
            let mut w = vec![0; n];
            if n > 0 {
                w[0] = 1;
            }
            w
        })
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i64(b, a % b)
    }
}

/// Lower convex boundary of a planar point set.
pub fn newton_polygon(points: &[(i64, i64)]) -> NewtonPolygon {
    let mut lowest: BTreeMap<i64, i64> = BTreeMap::new();
    for &(i, j) in points {
        let e = lowest.entry(i).or_insert(j);
        *e = (*e).min(j);
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for (i, j) in lowest {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], (i, j)) <= 0 {
            hull.pop();
        }
        hull.push((i, j));
    }
    let slopes = hull
        .windows(2)
        .map(|w| {
            let (di, dj) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            let g = gcd_i64(di, dj);
            (dj / g, di / g)
        })
        .collect();
    NewtonPolygon {
        vertices: hull,
        slopes,
    }
}

/// Vertices of the convex hull, counter-clockwise from the lowest-leftmost.
pub fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let pts: Vec<(i64, i64)> = points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &q in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &q in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn planar_support(p: &SparsePoly) -> Vec<(i64, i64)> {
    p.terms()
        .map(|(e, _)| (e.first().copied().unwrap_or(0), e.get(1).copied().unwrap_or(0)))
        .collect()
}

/// Checks that hull(PQ) = hull(P) + hull(Q) by vertex enumeration.
pub fn hull_minkowski_check(k: &PrimeField, p: &SparsePoly, q: &SparsePoly) -> Result<bool> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.nvars() > 2 {
        return Err(Error::Unsupported("Minkowski check is planar"));
    }
    let hp = convex_hull(&planar_support(p));
    let hq = convex_hull(&planar_support(q));
    let sums: Vec<(i64, i64)> = hp
        .iter()
        .flat_map(|a| hq.iter().map(move |b| (a.0 + b.0, a.1 + b.1)))
        .collect();
    let expected: BTreeSet<_> = convex_hull(&sums).into_iter().collect();
    let actual: BTreeSet<_> = convex_hull(&planar_support(&p.mul(k, q))).into_iter().collect();
    Ok(expected == actual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parse(k: &PrimeField, s: &str, n: usize) -> SparsePoly {
        SparsePoly::parse(k, s, Some(n)).unwrap()
    }

    fn example_f(k: &PrimeField) -> SparsePoly {
        parse(k, "2*x1^2*x2 + 3*x1*x2^2 + x1*x2 + 3*x2 + 2*x3 + 4", 3)
    }

    #[test]
    fn telescoping_product() {
        let k = PrimeField::new(101).unwrap();
        let a = parse(&k, "x1 - 1", 1);
        let b = parse(&k, "x1^4 + x1^3 + x1^2 + x1 + 1", 1);
        assert_eq!(a.mul(&k, &b), parse(&k, "x1^5 - 1", 1));
        assert!(a.add(&k, &a.neg(&k)).is_zero());
        let k7 = PrimeField::new(7).unwrap();
        let s = parse(&k7, "x1 + x2", 2);
        assert_eq!(s.mul(&k7, &s), parse(&k7, "x1^2 + 2*x1*x2 + x2^2", 2));
    }

    #[test]
    fn weight_profiles() {
        let k = PrimeField::new(101).unwrap();
        let f = example_f(&k);
        let prof = f.weight_profile(&[2, 1, 0]).unwrap();
        assert_eq!((prof.deg, prof.val, prof.ec, prof.regular), (5, 0, 5, true));
        assert_eq!(prof.lp, parse(&k, "2*x1^2*x2", 3));
        assert!(!f.weight_profile(&[1, 1, 1]).unwrap().regular);
        assert_eq!(f.weight_profile(&[0, 0, 1]).unwrap().ec, 1);
        let m = parse(&k, "5*x1^2*x2", 2);
        let prof = m.weight_profile(&[3, -1]).unwrap();
        assert_eq!((prof.deg, prof.val), (5, 5));
        assert_eq!(prof.lp, m);
        assert_eq!(prof.tp, m);
        assert_eq!(SparsePoly::zero(2).weight_profile(&[1, 0]), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn tagging() {
        let k = PrimeField::new(101).unwrap();
        let f = example_f(&k);
        let tagged = f.tag(&[2, 1, 0]);
        let expected = parse(
            &k,
            "2*x1^2*x2*x4^5 + 3*x1*x2^2*x4^4 + x1*x2*x4^3 + 3*x2*x4 + 2*x3 + 4",
            4,
        );
        assert_eq!(tagged, expected);
        assert_eq!(tagged.untag(&k), f);
        assert_eq!(SparsePoly::constant(2, 7).tag(&[1, 2]), SparsePoly::constant(3, 7));
    }

    #[test]
    fn monomial_maps() {
        let k = PrimeField::new(101).unwrap();
        let f = parse(&k, "x1^2 + x2^2 - x3^2", 3);
        let m = vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]];
        let expected = parse(&k, "x1^2*x2^2*x3^2 + x2^2*x3^2 - x3^2", 3);
        assert_eq!(f.monomial_map(&k, &m), expected);
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(f.monomial_map(&k, &id), f);
        let inv = vec![vec![1, 0, 0], vec![-1, 1, 0], vec![0, -1, 1]];
        assert_eq!(f.monomial_map(&k, &m).monomial_map(&k, &inv), f);
    }

    #[test]
    fn regularizing_weights() {
        let k = PrimeField::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = example_f(&k);
        let w = regularizing_weight(&f, 16, &mut rng);
        let prof = f.weight_profile(&w).unwrap();
        assert!(prof.regular);
        assert!(prof.ec <= 1);
        let g = parse(&k, "x1^3 + x1*x2^2 + x2*x3", 3);
        let prof = g.weight_profile(&[1, 0, 0]).unwrap();
        assert!(prof.regular);
        assert_eq!(prof.ec, 3);
        let w = regularizing_weight(&g, 0, &mut rng);
        assert!(g.weight_profile(&w).unwrap().ec <= 3);
        let m = parse(&k, "4*x1*x2^3", 2);
        assert!(m.weight_profile(&regularizing_weight(&m, 4, &mut rng)).unwrap().regular);
    }

    #[test]
    fn substitution() {
        let k = PrimeField::new(101).unwrap();
        let f = parse(&k, "x1 + x2*x3", 3);
        assert_eq!(f.substitute(&k, &[(2, 2)]).unwrap(), parse(&k, "x1 + 2*x2", 3));
        assert_eq!(
            f.substitute(&k, &[(0, 1), (1, 2), (2, 3)]).unwrap(),
            SparsePoly::constant(3, 7)
        );
        let k7 = PrimeField::new(7).unwrap();
        let g = parse(&k7, "x1^2 + 2*x1*x2 + x2^2 - x3", 3);
        let lhs = g.substitute(&k7, &[(2, 4)]).unwrap();
        let rhs = parse(&k7, "x1 + x2 - 2", 3).mul(&k7, &parse(&k7, "x1 + x2 + 2", 3));
        assert_eq!(lhs, rhs);
        let laurent = parse(&k, "x1^-1 + x2", 2);
        assert_eq!(laurent.substitute(&k, &[(0, 0)]), Err(Error::ZeroSubstitutionForLaurent));
    }

    #[test]
    fn newton_polygons() {
        let pts = [(0, 2), (1, 1), (2, 0), (2, 2), (3, 1), (4, 2)];
        let np = newton_polygon(&pts);
        assert_eq!(np.vertices, vec![(0, 2), (2, 0), (4, 2)]);
        assert_eq!(np.slopes, vec![(-1, 1), (1, 1)]);
        let np = newton_polygon(&[(1, 1)]);
        assert_eq!((np.vertices.len(), np.slopes.len()), (1, 0));
        let np = newton_polygon(&[(0, 0), (3, 0)]);
        assert_eq!(np.slopes, vec![(0, 1)]);
    }

    #[test]
    fn minkowski() {
        let k = PrimeField::new(7).unwrap();
        let a = parse(&k, "x1 - 1", 1);
        let b = parse(&k, "x1 + 1", 1);
        assert!(hull_minkowski_check(&k, &a, &b).unwrap());
        let s = parse(&k, "x1 + x2", 2);
        assert!(hull_minkowski_check(&k, &s, &s).unwrap());
    }

    #[test]
    fn exact_division() {
        let k = PrimeField::new(101).unwrap();
        let c = parse(&k, "x1^5 - 1", 1);
        let a = parse(&k, "x1 - 1", 1);
        assert_eq!(c.div_exact(&k, &a).unwrap(), parse(&k, "x1^4 + x1^3 + x1^2 + x1 + 1", 1));
        assert_eq!(c.div_exact(&k, &parse(&k, "x1 - 2", 1)), Err(Error::NotDivisible));
        let l = parse(&k, "x1^-2*x2 + x1^-1", 2);
        let m = parse(&k, "x2 + x1", 2);
        assert_eq!(l.div_exact(&k, &m).unwrap(), parse(&k, "x1^-2", 2));
    }

    #[test]
    fn text_and_json_roundtrip() {
        let k = PrimeField::goldilocks();
        let f = parse(&k, "3*x1^2*x2 - 5 + x2^-3*x1", 2);
        assert_eq!(f.to_text(&k), "3*x1^2*x2 - 5 + x1*x2^-3");
        assert_eq!(SparsePoly::parse(&k, &f.to_text(&k), Some(2)).unwrap(), f);
        let j = serde_json::to_string(&f.to_json()).unwrap();
        let back: JsonPoly = serde_json::from_str(&j).unwrap();
        assert_eq!(SparsePoly::from_json(&k, &back).unwrap(), f);
        assert_eq!(SparsePoly::zero(1).to_text(&k), "0");
        assert_eq!(SparsePoly::parse(&k, "0", Some(1)).unwrap(), SparsePoly::zero(1));
    }

    #[test]
    fn parse_errors_have_positions() {
        let k = PrimeField::new(101).unwrap();
        match SparsePoly::parse(&k, "x1 + y", None) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("unexpected {:?}", other),
        }
        assert!(SparsePoly::parse(&k, "x3", Some(2)).is_err());
        assert!(SparsePoly::parse(&k, "x0", None).is_err());
        assert!(SparsePoly::parse(&k, "", None).is_err());
    }
}
