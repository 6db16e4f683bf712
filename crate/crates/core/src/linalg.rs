//! Exact dense linear algebra over the rationals.
//!
//! Rank and determinant use Bareiss fraction-free elimination on
//! integer-scaled rows; everything else is plain Gauss–Jordan over
//! [`Rational`]. A small Bland-rule simplex backs [`max_margin`], which decides
//! strict and non-strict feasibility of affine systems exactly.

use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::poly::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols);
        QMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> QMatrix {
        let mut out = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn matmul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + a * b;
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(crate::poly::to_f64).collect()
    }

    /// Rows scaled by the lcm of their denominators, plus the product of all
    /// scale factors.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut scale = BigInt::one();
        let rows = (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                scale *= &l;
                row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
            })
            .collect();
        (rows, scale)
    }

    /// Exact rank by Bareiss elimination.
    pub fn rank(&self) -> usize {
        let (mut a, _) = self.integer_rows();
        bareiss(&mut a, self.cols).0
    }

    /// Exact determinant by Bareiss elimination; panics if not square.
    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return Rational::one();
        }
        let (mut a, scale) = self.integer_rows();
        let (rank, sign) = bareiss(&mut a, self.cols);
        if rank < self.rows {
            return Rational::zero();
        }
        let d = &a[self.rows - 1][self.cols - 1] * BigInt::from(sign);
        Rational::new(d, scale)
    }

    /// Exact inverse by Gauss–Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let piv = a.get(col, col).clone();
            for c in 0..n {
                a.set(col, c, a.get(col, c) / &piv);
                inv.set(col, c, inv.get(col, c) / &piv);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for c in 0..n {
                    let v = a.get(r, c) - &f * a.get(col, c);
                    a.set(r, c, v);
                    let w = inv.get(r, c) - &f * inv.get(col, c);
                    inv.set(r, c, w);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Solve `self · y = rhs`; `None` when inconsistent. The particular
    /// solution sets every free variable to zero.
    pub fn solve_affine(&self, rhs: &[Rational]) -> Option<AffineSpace> {
        assert_eq!(rhs.len(), self.rows);
        let n = self.cols;
        let mut a: Vec<Vec<Rational>> = (0..self.rows)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.push(rhs[r].clone());
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..n {
            let Some(p) = (prow..a.len()).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(prow, p);
            let piv = a[prow][col].clone();
            for v in a[prow].iter_mut() {
                *v /= &piv;
            }
            for r in 0..a.len() {
                if r != prow && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..=n {
                        let v = &a[r][c] - &f * &a[prow][c];
                        a[r][c] = v;
                    }
                }
            }
            pivots.push(col);
            prow += 1;
        }
        if a[prow..].iter().any(|row| !row[n].is_zero()) {
            return None;
        }
        let mut particular = vec![Rational::zero(); n];
        for (r, &col) in pivots.iter().enumerate() {
            particular[col] = a[r][n].clone();
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); n];
                v[f] = Rational::one();
                for (r, &col) in pivots.iter().enumerate() {
                    v[col] = -a[r][f].clone();
                }
                v
            })
            .collect();
        Some(AffineSpace { origin: particular, basis })
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// In-place Bareiss elimination on integer rows. Returns the rank and the
/// sign accumulated by row swaps. When the matrix is square and of full rank
/// the bottom-right entry is its determinant (up to that sign).
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (usize, i64) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut sign = 1i64;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        let piv = a[rank][col].clone();
        for r in rank + 1..rows {
            let f = a[r][col].clone();
            for c in col + 1..cols {
                let v = (&a[r][c] * &piv - &f * &a[rank][c]) / &prev;
                a[r][c] = v;
            }
            a[r][col] = BigInt::zero();
        }
        prev = piv;
        rank += 1;
    }
    (rank, sign)
}

/// Affine subspace `origin + span(basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSpace {
    pub origin: Vec<Rational>,
    pub basis: Vec<Vec<Rational>>,
}

impl AffineSpace {
    pub fn whole(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::one();
                v
            })
            .collect();
        AffineSpace { origin: vec![Rational::zero(); n], basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn point(&self, t: &[Rational]) -> Vec<Rational> {
        assert_eq!(t.len(), self.basis.len());
        let mut y = self.origin.clone();
        for (ti, b) in t.iter().zip(&self.basis) {
            if ti.is_zero() {
                continue;
            }
            for (yk, bk) in y.iter_mut().zip(b) {
                *yk += ti * bk;
            }
        }
        y
    }
}

/// Affine form `a·y + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl LinearForm {
    pub fn eval(&self, y: &[Rational]) -> Rational {
        self.coeffs.iter().zip(y).fold(self.constant.clone(), |acc, (a, v)| acc + a * v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Margin {
    /// Largest `s ≤ cap` with every form `≤ -s` at `point`.
    pub value: Rational,
    pub point: Vec<Rational>,
}

/// Maximise the uniform slack `s` (capped at `cap`) such that
/// `form(y) + s ≤ 0` for every form, over `y` in the affine space.
///
/// `value > 0` certifies a point satisfying all forms strictly; `value < 0`
/// proves that no point satisfies them even non-strictly; `value ≥ 0` means
/// the non-strict system is feasible.
pub fn max_margin(space: &AffineSpace, forms: &[LinearForm], cap: &Rational) -> Margin {
    let p = space.dim();
    if forms.is_empty() {
        return Margin { value: cap.clone(), point: space.origin.clone() };
    }
    // variables: t+ (p), t- (p), s' = s + shift
    let mut rows = Vec::with_capacity(forms.len() + 1);
    let mut rhs = Vec::with_capacity(forms.len() + 1);
    let mut raw = Vec::with_capacity(forms.len());
    for f in forms {
        let an: Vec<Rational> = space
            .basis
            .iter()
            .map(|b| f.coeffs.iter().zip(b).fold(Rational::zero(), |acc, (a, v)| acc + a * v))
            .collect();
        let r = -f.eval(&space.origin);
        raw.push((an, r));
    }
    let shift = raw
        .iter()
        .map(|(_, r)| -r.clone())
        .fold(Rational::zero(), |acc, v| if v > acc { v } else { acc });
    for (an, r) in raw {
        let mut row: Vec<Rational> = an.clone();
        row.extend(an.into_iter().map(|v| -v));
        row.push(Rational::one());
        rows.push(row);
        rhs.push(r + &shift);
    }
    let mut cap_row = vec![Rational::zero(); 2 * p];
    cap_row.push(Rational::one());
    rows.push(cap_row);
    rhs.push(cap + &shift);
    let mut obj = vec![Rational::zero(); 2 * p];
    obj.push(Rational::one());

    let z = simplex_max(&rows, &rhs, &obj).expect("margin LP is bounded by the cap row");
    let t: Vec<Rational> = (0..p).map(|i| &z[i] - &z[p + i]).collect();
    Margin { value: &z[2 * p] - &shift, point: space.point(&t) }
}

/// Maximise `c·z` subject to `A z ≤ b`, `z ≥ 0`, with `b ≥ 0` so the slack
/// basis is feasible. Bland's rule; `None` when unbounded.
pub fn simplex_max(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let nv = c.len();
    assert!(b.iter().all(|v| !v.is_negative()), "simplex needs b >= 0");
    let width = nv + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            assert_eq!(row.len(), nv);
            row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut obj: Vec<Rational> = c.to_vec();
    obj.resize(width, Rational::zero());
    let mut basis: Vec<usize> = (nv..nv + m).collect();

    loop {
        let Some(enter) = (0..nv + m).find(|&j| obj[j].is_positive()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width - 1] / &t[i][enter];
            let better = match &best {
                None => true,
                Some(bv) => ratio < *bv || (ratio == *bv && basis[i] < basis[leave.unwrap()]),
            };
            if better {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        let l = leave?;
        let piv = t[l][enter].clone();
        for v in t[l].iter_mut() {
            *v /= &piv;
        }
        for i in 0..m {
            if i != l && !t[i][enter].is_zero() {
                let f = t[i][enter].clone();
                for j in 0..width {
                    let v = &t[i][j] - &f * &t[l][j];
                    t[i][j] = v;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for j in 0..width {
                let v = &obj[j] - &f * &t[l][j];
                obj[j] = v;
            }
        }
        basis[l] = enter;
    }
    let mut z = vec![Rational::zero(); nv];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nv {
            z[bv] = t[i][width - 1].clone();
        }
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    #[test]
    fn rank_and_det_small() {
        assert_eq!(q(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(q(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(q(&[&[0, 1, 2], &[0, 2, 4], &[1, 0, 0]]).rank(), 2);
        assert_eq!(q(&[&[2, 1], &[1, 3]]).det(), int(5));
        assert_eq!(q(&[&[0, 1], &[1, 0]]).det(), int(-1));
        let m = QMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 5), rat(1, 7)]]);
        assert_eq!(m.det(), rat(1, 14) - rat(1, 15));
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = q(&[&[3, -1, 4, 1], &[5, 9, -2, 6], &[5, 3, 5, -8], &[9, 7, 9, 3]]);
        fn cof(m: &QMatrix) -> Rational {
            let n = m.rows();
            if n == 1 {
                return m.get(0, 0).clone();
            }
            let mut acc = Rational::zero();
            for j in 0..n {
                let sub = QMatrix::from_rows(
                    (1..n)
                        .map(|r| (0..n).filter(|&c| c != j).map(|c| m.get(r, c).clone()).collect())
                        .collect(),
                );
                let t = m.get(0, j) * cof(&sub);
                acc = if j % 2 == 0 { acc + t } else { acc - t };
            }
            acc
        }
        assert_eq!(m.det(), cof(&m));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), QMatrix::identity(3));
        assert!(q(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_affine_reports_nullspace() {
        // x1 + x2 = 0
        let s = q(&[&[1, 1]]).solve_affine(&[int(0)]).unwrap();
        assert_eq!(s.origin, vec![int(0), int(0)]);
        assert_eq!(s.basis, vec![vec![int(-1), int(1)]]);
        // x1 = 0 and x1 = 1
        assert!(q(&[&[1], &[1]]).solve_affine(&[int(0), int(1)]).is_none());
    }

    #[test]
    fn margin_finds_box_center() {
        // 0 <= x_i <= 1 written as -x_i <= 0, x_i - 1 <= 0
        let forms = vec![
            LinearForm { coeffs: vec![int(-1), int(0)], constant: int(0) },
            LinearForm { coeffs: vec![int(1), int(0)], constant: int(-1) },
            LinearForm { coeffs: vec![int(0), int(-1)], constant: int(0) },
            LinearForm { coeffs: vec![int(0), int(1)], constant: int(-1) },
        ];
        let m = max_margin(&AffineSpace::whole(2), &forms, &int(1));
        assert_eq!(m.value, rat(1, 2));
        assert_eq!(m.point, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn margin_detects_empty_strict_system() {
        // x < 0 and -x < 0
        let forms = vec![
            LinearForm { coeffs: vec![int(1)], constant: int(0) },
            LinearForm { coeffs: vec![int(-1)], constant: int(0) },
        ];
        let m = max_margin(&AffineSpace::whole(1), &forms, &int(1));
        assert_eq!(m.value, int(0));
        // x <= -1 and -x <= -1 (x >= 1): infeasible even non-strictly
        let forms = vec![
            LinearForm { coeffs: vec![int(1)], constant: int(1) },
            LinearForm { coeffs: vec![int(-1)], constant: int(1) },
        ];
        assert!(max_margin(&AffineSpace::whole(1), &forms, &int(1)).value.is_negative());
    }
}
