//! Exact multivariate polynomials over the rationals.
//!
//! Variables are addressed by 0-based index in the API and printed as
//! `x1, …, xn`. Every polynomial carries its ambient variable count; binary
//! operations between polynomials of different arity panic, while the
//! user-facing entry points (`eval`, `partial`, `jacobian`) return errors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // ratio too large for a direct conversion; fall back to scaled digits
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Total degree of a polynomial; the zero polynomial has degree −∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

/// Exponent vector of a monomial in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// Number of monomials of total degree at most `d` in `n` variables,
/// `C(n + d, d)`.
pub fn rho(n: usize, d: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidInput("rho requires n >= 1".into()));
    }
    let mut acc: u128 = 1;
    for i in 1..=d as u128 {
        acc = acc * (n as u128 + i) / i;
    }
    usize::try_from(acc).map_err(|_| Error::InvalidInput(format!("rho({n},{d}) overflows")))
}

/// Monomials of degree at most `d`, ordered by degree and, within a degree,
/// lexicographically with `x1` most significant:
/// `1, x1, …, xn, x1², x1x2, …, xn^d`.
///
/// This is the canonical column layout of coefficient matrices.
pub fn monomial_vector(n: usize, d: usize) -> Vec<Monomial> {
    fn fill(rest: usize, deg: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if rest == 1 {
            cur.push(deg);
            out.push(Monomial(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=deg).rev() {
            cur.push(e);
            fill(rest - 1, deg - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for deg in 0..=d as u32 {
        fill(n, deg, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// A polynomial in `nvars` variables with exact rational coefficients.
///
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, Rational::one())
    }

    /// The coordinate polynomial `x_{i+1}`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range");
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::var(nvars, i), Rational::one());
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Polynomial::zero(nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: exps.len() });
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    /// Affine polynomial `a·x + c`.
    pub fn affine(coeffs: &[Rational], c: Rational) -> Self {
        let n = coeffs.len();
        let mut p = Polynomial::constant(n, c);
        for (i, a) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), a.clone());
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// True when the total degree is at most one (including the zero polynomial).
    pub fn is_affine(&self) -> bool {
        self.degree() <= Degree::Finite(1)
    }

    /// Linear coefficients and constant term of an affine polynomial.
    pub fn affine_parts(&self) -> Option<(Vec<Rational>, Rational)> {
        if !self.is_affine() {
            return None;
        }
        let n = self.nvars;
        let coeffs = (0..n).map(|i| self.coefficient(&Monomial::var(n, i))).collect();
        Some((coeffs, self.coefficient(&Monomial::one(n))))
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= num::pow::pow(xi.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point shadow evaluation; `x.len()` must equal `nvars`.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(x)
                    .fold(to_f64(c), |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum()
    }

    pub fn partial(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), c * Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Gradient as an `n × 1` column.
    pub fn gradient(&self) -> PolyMatrix {
        let entries = (0..self.nvars).map(|i| self.partial(i).expect("index in range")).collect();
        PolyMatrix::new(self.nvars, 1, self.nvars, entries).expect("shape")
    }

    pub fn gradient_vec(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.partial(i).expect("index in range")).collect()
    }

    pub fn hessian(&self) -> PolyMatrix {
        let n = self.nvars;
        let grad = self.gradient_vec();
        let mut entries = Vec::with_capacity(n * n);
        for gi in &grad {
            for j in 0..n {
                entries.push(gi.partial(j).expect("index in range"));
            }
        }
        PolyMatrix::new(n, n, n, entries).expect("shape")
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Re-index into `target_nvars` variables, sending variable `i` to
    /// `map[i]`.
    pub fn embed(&self, target_nvars: usize, map: &[usize]) -> Polynomial {
        assert_eq!(map.len(), self.nvars);
        let mut out = Polynomial::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target_nvars];
            for (i, &e) in m.exponents().iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Same polynomial viewed in `target_nvars ≥ nvars` variables, the new
    /// variables appended after the existing ones.
    pub fn extend(&self, target_nvars: usize) -> Polynomial {
        assert!(target_nvars >= self.nvars);
        let map: Vec<usize> = (0..self.nvars).collect();
        self.embed(target_nvars, &map)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first reads naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| b.0.cmp(a.0)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Dense row-major matrix of polynomials sharing one ambient variable count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, nvars: usize, entries: Vec<Polynomial>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: entries.len() });
        }
        if let Some(bad) = entries.iter().find(|p| p.nvars() != nvars) {
            return Err(Error::DimensionMismatch { expected: nvars, got: bad.nvars() });
        }
        Ok(PolyMatrix { rows, cols, nvars, entries })
    }

    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, nvars, entries: vec![Polynomial::zero(nvars); rows * cols] }
    }

    pub fn from_constant(m: &QMatrix, nvars: usize) -> Self {
        let entries = (0..m.rows())
            .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
            .map(|(r, c)| Polynomial::constant(nvars, m.get(r, c).clone()))
            .collect();
        PolyMatrix { rows: m.rows(), cols: m.cols(), nvars, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial) {
        assert_eq!(p.nvars(), self.nvars);
        self.entries[r * self.cols + c] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.cols, self.rows, self.nvars);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    /// True when no entry depends on any variable.
    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|p| p.as_constant().is_some())
    }

    /// Whether any entry mentions variable `i`.
    pub fn mentions_var(&self, i: usize) -> bool {
        self.entries
            .iter()
            .any(|p| p.terms().any(|(m, _)| m.exponents()[i] > 0))
    }

    pub fn eval(&self, x: &[Rational]) -> Result<QMatrix> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        let data = self.entries.iter().map(|p| p.eval(x)).collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::new(self.rows, self.cols, data))
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|p| p.eval_f64(x)).collect()
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        PolyMatrix { rows: self.rows, cols: self.cols, nvars: self.nvars, entries }
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        PolyMatrix { rows: self.rows, cols: self.cols, nvars: self.nvars, entries }
    }

    pub fn scale(&self, p: &Polynomial) -> PolyMatrix {
        let entries = self.entries.iter().map(|e| e * p).collect();
        PolyMatrix { rows: self.rows, cols: self.cols, nvars: self.nvars, entries }
    }

    pub fn matmul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = PolyMatrix::zeros(self.rows, other.cols, self.nvars);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Polynomial::zero(self.nvars);
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    let b = other.get(k, c);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a * b;
                    }
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Block of rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(r1 - r0, c1 - c0, self.nvars);
        for r in r0..r1 {
            for c in c0..c1 {
                out.set(r - r0, c - c0, self.get(r, c).clone());
            }
        }
        out
    }

    /// Embed every entry into a larger variable set (see [`Polynomial::extend`]).
    pub fn extend(&self, target_nvars: usize) -> PolyMatrix {
        let entries = self.entries.iter().map(|p| p.extend(target_nvars)).collect();
        PolyMatrix { rows: self.rows, cols: self.cols, nvars: target_nvars, entries }
    }

    /// Symbolic minor on the given row and column index sets.
    ///
    /// Laplace expansion memoised over column subsets, O(k·2^k) products;
    /// no division, so it works over the polynomial ring directly.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Polynomial {
        let k = rows.len();
        assert_eq!(k, cols.len());
        assert!(k <= 20, "minor size {k} too large for subset expansion");
        if k == 0 {
            return Polynomial::one(self.nvars);
        }
        let full = 1usize << k;
        let mut dets: Vec<Option<Polynomial>> = vec![None; full];
        dets[0] = Some(Polynomial::one(self.nvars));
        // iterate masks in order of popcount: mask with i bits covers the first i rows
        let mut by_count: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
        for mask in 0..full {
            by_count[mask.count_ones() as usize].push(mask);
        }
        for i in 1..=k {
            let row = rows[i - 1];
            for &mask in &by_count[i] {
                let mut acc = Polynomial::zero(self.nvars);
                let mut pos = 0usize;
                for j in 0..k {
                    if mask & (1 << j) == 0 {
                        continue;
                    }
                    let a = self.get(row, cols[j]);
                    let sub = dets[mask & !(1 << j)].as_ref().expect("filled");
                    if !a.is_zero() && !sub.is_zero() {
                        let t = a * sub;
                        if (i - 1 + pos) % 2 == 0 {
                            acc = acc + t;
                        } else {
                            acc = acc - t;
                        }
                    }
                    pos += 1;
                }
                dets[mask] = Some(acc);
            }
            // masks with fewer bits are no longer needed
            for &mask in &by_count[i - 1] {
                dets[mask] = None;
            }
        }
        dets[full - 1].take().expect("filled")
    }

    pub fn det(&self) -> Result<Polynomial> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.minor(&idx, &idx))
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Jacobian of a polynomial map: row `i` is the gradient of `fs[i]`.
pub fn jacobian(fs: &[Polynomial], nvars: usize) -> Result<PolyMatrix> {
    if let Some(bad) = fs.iter().find(|p| p.nvars() != nvars) {
        return Err(Error::DimensionMismatch { expected: nvars, got: bad.nvars() });
    }
    let mut entries = Vec::with_capacity(fs.len() * nvars);
    for f in fs {
        for j in 0..nvars {
            entries.push(f.partial(j)?);
        }
    }
    PolyMatrix::new(fs.len(), nvars, nvars, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn c(n: usize, v: i64) -> Polynomial {
        Polynomial::constant(n, int(v))
    }

    /// x1^3 + x1 - x2
    fn cubic() -> Polynomial {
        &(&(&x(2, 0) * &x(2, 0)) * &x(2, 0)) + &(&x(2, 0) - &x(2, 1))
    }

    #[test]
    fn eval_examples() {
        assert_eq!(cubic().eval(&[int(1), int(2)]).unwrap(), int(0));
        assert_eq!(Polynomial::zero(3).eval(&[int(4), rat(1, 2), int(-7)]).unwrap(), int(0));
        let p = &(&x(2, 0) * &x(2, 1)) + &Polynomial::constant(2, rat(1, 2));
        assert_eq!(p.eval(&[rat(1, 2), rat(1, 3)]).unwrap(), rat(2, 3));
    }

    #[test]
    fn eval_rejects_wrong_length() {
        assert_eq!(
            cubic().eval(&[int(1)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn partial_examples() {
        let p = cubic();
        let d1 = p.partial(0).unwrap();
        assert_eq!(d1, &(&c(2, 3) * &(&x(2, 0) * &x(2, 0))) + &c(2, 1));
        assert_eq!(p.partial(1).unwrap(), c(2, -1));
        assert!(c(2, 5).partial(0).unwrap().is_zero());
        assert_eq!(p.partial(2), Err(Error::IndexOutOfRange { index: 2, nvars: 2 }));
    }

    #[test]
    fn jacobian_example_pcp() {
        // F = (x1 - 1, -x1^3 - x2 + 1)
        let n = 2;
        let f1 = &x(n, 0) - &c(n, 1);
        let x1cube = &(&x(n, 0) * &x(n, 0)) * &x(n, 0);
        let f2 = &(&(-&x1cube) - &x(n, 1)) + &c(n, 1);
        let jac = jacobian(&[f1, f2], n).unwrap();
        assert_eq!(jac.get(0, 0), &c(n, 1));
        assert!(jac.get(0, 1).is_zero());
        assert_eq!(jac.get(1, 0), &(&c(n, -3) * &(&x(n, 0) * &x(n, 0))));
        assert_eq!(jac.get(1, 1), &c(n, -1));
    }

    #[test]
    fn hessian_of_square_difference() {
        let n = 2;
        let p = &(&(&x(n, 0) * &x(n, 0)) - &(&c(n, 2) * &(&x(n, 0) * &x(n, 1)))) + &(&x(n, 1) * &x(n, 1));
        let h = p.hessian();
        let want = [[2, -2], [-2, 2]];
        for r in 0..2 {
            for s in 0..2 {
                assert_eq!(h.get(r, s), &c(n, want[r][s]));
            }
        }
    }

    #[test]
    fn jacobian_of_affine_is_constant() {
        let m = [[1, 2, 0], [0, -1, 3], [4, 0, 0]];
        let fs: Vec<_> = m
            .iter()
            .map(|row| Polynomial::affine(&row.map(int), int(7)))
            .collect();
        let jac = jacobian(&fs, 3).unwrap();
        assert!(jac.is_constant());
        for r in 0..3 {
            for s in 0..3 {
                assert_eq!(jac.get(r, s).as_constant().unwrap(), int(m[r][s]));
            }
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(2, 3).unwrap(), 10);
        assert_eq!(rho(5, 0).unwrap(), 1);
        // brute-force count of exponent vectors with sum <= 2 in 3 variables
        let mut count = 0;
        for a in 0..=2u32 {
            for b in 0..=2u32 {
                for e in 0..=2u32 {
                    if a + b + e <= 2 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(rho(3, 2).unwrap(), count);
        assert!(rho(0, 2).is_err());
    }

    #[test]
    fn monomial_vector_examples() {
        let show = |n, d| -> Vec<String> {
            monomial_vector(n, d).iter().map(|m| m.to_string()).collect()
        };
        assert_eq!(show(2, 1), ["1", "x1", "x2"]);
        assert_eq!(show(1, 2), ["1", "x1", "x1^2"]);
        assert_eq!(show(2, 2), ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]);
        assert_eq!(
            show(3, 2),
            ["1", "x1", "x2", "x3", "x1^2", "x1*x2", "x1*x3", "x2^2", "x2*x3", "x3^2"]
        );
    }

    #[test]
    fn degree_of_zero_is_neg_infinity() {
        assert_eq!(Polynomial::zero(2).degree(), Degree::NegInfinity);
        assert_eq!(c(2, 3).degree(), Degree::Finite(0));
        assert_eq!(cubic().degree(), Degree::Finite(3));
        assert!(Degree::NegInfinity < Degree::Finite(0));
    }

    #[test]
    fn display_reads_naturally() {
        assert_eq!(cubic().to_string(), "x1^3 + x1 - x2");
        assert_eq!(Polynomial::affine(&[rat(-1, 2), int(0)], int(-3)).to_string(), "-1/2*x1 - 3");
    }

    #[test]
    fn minor_matches_leibniz_on_3x3() {
        let n = 2;
        let a = [[x(n, 0), c(n, 2), c(n, 0)], [c(n, 1), x(n, 1), c(n, 3)], [x(n, 0), c(n, 0), c(n, 1)]];
        let entries: Vec<_> = a.iter().flatten().cloned().collect();
        let m = PolyMatrix::new(3, 3, n, entries).unwrap();
        // Leibniz by hand
        let perms: [([usize; 3], i64); 6] = [
            ([0, 1, 2], 1),
            ([0, 2, 1], -1),
            ([1, 0, 2], -1),
            ([1, 2, 0], 1),
            ([2, 0, 1], 1),
            ([2, 1, 0], -1),
        ];
        let mut want = Polynomial::zero(n);
        for (p, s) in perms {
            let t = &(&a[0][p[0]] * &a[1][p[1]]) * &a[2][p[2]];
            want = want + t.scale(&int(s));
        }
        assert_eq!(m.det().unwrap(), want);
    }

    #[test]
    fn embed_reindexes_variables() {
        let p = &x(1, 0) * &x(1, 0);
        let q = p.embed(3, &[2]);
        assert_eq!(q.to_string(), "x3^2");
        assert_eq!(cubic().extend(4).eval(&[int(1), int(2), int(9), int(9)]).unwrap(), int(0));
    }
}
