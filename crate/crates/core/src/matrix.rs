//! Dense exact matrices: rationals for linear algebra over ℚ, integers for
//! Smith normal form and lattice arithmetic. Sizes stay at desk scale
//! (rank ≤ 24 here), so straightforward Gaussian elimination is the right
//! tool; there is no pivoting for numerical stability because nothing is
//! approximate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::Rational;

/// Row-major matrix over ℚ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.denom().is_one())
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> Result<QMat, Error> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * &other[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, Error> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * vec{}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Rational::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_zero() {
                    out[i] += &self[(i, j)] * &v[j];
                }
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-full Gaussian elimination.
    pub fn det(&self) -> Result<Rational, Error> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[(r, col)].is_zero());
            let Some(p) = pivot else {
                return Ok(Rational::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pv = m[(col, col)].clone();
            det *= &pv;
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] / &pv;
                for c in col..n {
                    let sub = &factor * &m[(col, c)];
                    m[(r, c)] -= sub;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Result<Option<QMat>, Error> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[(r, col)].is_zero());
            let Some(p) = pivot else {
                return Ok(None);
            };
            if p != col {
                m.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let pv = m[(col, col)].clone();
            m.scale_row(col, &(Rational::one() / &pv));
            inv.scale_row(col, &(Rational::one() / &pv));
            for r in 0..n {
                if r == col || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                m.sub_scaled_row(r, col, &factor);
                inv.sub_scaled_row(r, col, &factor);
            }
        }
        Ok(Some(inv))
    }

    /// One exact solution of `self * x = rhs`, or `None` if inconsistent.
    /// Works for any shape; free variables are set to zero.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Option<Vec<Rational>>, Error> {
        if rhs.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "rhs length {} for {} rows",
                rhs.len(),
                self.rows
            )));
        }
        let (reduced, pivots, rhs_red) = self.row_reduce_augmented(rhs);
        // inconsistent when a zero row has nonzero rhs
        for r in pivots.len()..reduced.rows {
            if !rhs_red[r].is_zero() {
                return Ok(None);
            }
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            // reduced row echelon: entry (r, pc) is 1 and pc column is cleared
            let mut val = rhs_red[r].clone();
            for c in pc + 1..self.cols {
                if !reduced[(r, c)].is_zero() {
                    val -= &reduced[(r, c)] * &x[c];
                }
            }
            x[pc] = val;
        }
        Ok(Some(x))
    }

    /// Basis of the right kernel over ℚ.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (reduced, pivots, _) = self.row_reduce_augmented(&vec![Rational::zero(); self.rows]);
        let pivot_set: Vec<usize> = pivots.clone();
        let free: Vec<usize> =
            (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -reduced[(r, f)].clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn rank(&self) -> usize {
        let (_, pivots, _) = self.row_reduce_augmented(&vec![Rational::zero(); self.rows]);
        pivots.len()
    }

    /// Signature (positive, negative, zero) of a symmetric matrix, by exact
    /// congruence diagonalization over ℚ.
    pub fn signature(&self) -> Result<(usize, usize, usize), Error> {
        if !self.is_symmetric() {
            return Err(Error::AsymmetricGram);
        }
        let n = self.rows;
        let mut m = self.clone();
        let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
        for k in 0..n {
            if m[(k, k)].is_zero() {
                // bring a nonzero diagonal entry to position k if one exists
                if let Some(j) = (k + 1..n).find(|&j| !m[(j, j)].is_zero()) {
                    m.swap_rows(k, j);
                    m.swap_cols(k, j);
                } else if let Some(j) = (k + 1..n).find(|&j| !m[(k, j)].is_zero()) {
                    // all remaining diagonal zero: fold row/col j into k,
                    // producing 2*m[k][j] on the diagonal
                    m.add_row(k, j);
                    m.add_col(k, j);
                } else {
                    // whole remaining row is zero
                    zero += 1;
                    continue;
                }
            }
            let pv = m[(k, k)].clone();
            if pv.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for r in k + 1..n {
                if m[(r, k)].is_zero() {
                    continue;
                }
                let factor = &m[(r, k)] / &pv;
                for c in k..n {
                    let sub = &factor * &m[(k, c)];
                    m[(r, c)] -= sub;
                }
                // keep symmetry: same operation on columns
                for rr in 0..n {
                    let sub = &factor * &m[(rr, k)];
                    m[(rr, r)] -= sub;
                }
            }
        }
        Ok((pos, neg, zero))
    }

    fn row_reduce_augmented(
        &self,
        rhs: &[Rational],
    ) -> (QMat, Vec<usize>, Vec<Rational>) {
        let mut m = self.clone();
        let mut b = rhs.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                m.swap_rows(p, r);
                b.swap(p, r);
            }
            let pv = m[(r, c)].clone();
            m.scale_row(r, &(Rational::one() / &pv));
            b[r] /= &pv;
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                m.sub_scaled_row(i, r, &factor);
                let sub = &factor * &b[r];
                b[i] -= sub;
            }
            pivots.push(c);
            r += 1;
        }
        // move zero rows' rhs entries after the pivot rows for the
        // consistency scan in solve()
        (m, pivots, b)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn scale_row(&mut self, r: usize, f: &Rational) {
        for c in 0..self.cols {
            self[(r, c)] *= f;
        }
    }

    fn sub_scaled_row(&mut self, target: usize, source: usize, f: &Rational) {
        for c in 0..self.cols {
            let sub = f * &self[(source, c)];
            self[(target, c)] -= sub;
        }
    }

    fn add_row(&mut self, target: usize, source: usize) {
        for c in 0..self.cols {
            let add = self[(source, c)].clone();
            self[(target, c)] += add;
        }
    }

    fn add_col(&mut self, target: usize, source: usize) {
        for r in 0..self.rows {
            let add = self[(r, source)].clone();
            self[(r, target)] += add;
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

/// Row-major matrix over ℤ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl ZMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(ZMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, Error> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() }
                })
            })
    }

    pub fn transpose(&self) -> ZMat {
        let mut t = ZMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ZMat) -> Result<ZMat, Error> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ZMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * &other[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, Error> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * vec{}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_zero() {
                    out[i] += &self[(i, j)] * &v[j];
                }
            }
        }
        Ok(out)
    }

    pub fn to_qmat(&self) -> QMat {
        let mut q = QMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                q[(i, j)] = Rational::from_integer(self[(i, j)].clone());
            }
        }
        q
    }

    /// Rounds a rational matrix to ZMat if every entry is integral.
    pub fn try_from_qmat(q: &QMat) -> Result<ZMat, Error> {
        if !q.is_integral() {
            return Err(Error::NotIntegral("rational entries remain".into()));
        }
        let mut m = ZMat::zeros(q.rows(), q.cols());
        for i in 0..q.rows() {
            for j in 0..q.cols() {
                m[(i, j)] = q[(i, j)].numer().clone();
            }
        }
        Ok(m)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self[(r, c)].clone();
            self[(r, c)] = v;
        }
    }

    /// row[target] += f * row[source]
    fn add_scaled_row(&mut self, target: usize, source: usize, f: &BigInt) {
        for c in 0..self.cols {
            let add = f * &self[(source, c)];
            self[(target, c)] += add;
        }
    }

    /// col[target] += f * col[source]
    fn add_scaled_col(&mut self, target: usize, source: usize, f: &BigInt) {
        for r in 0..self.rows {
            let add = f * &self[(r, source)];
            self[(r, target)] += add;
        }
    }
}

impl std::ops::Index<(usize, usize)> for ZMat {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ZMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

/// Smith normal form `u * a * v = d` with `u`, `v` unimodular and `d`
/// diagonal with each entry dividing the next.
pub struct SmithForm {
    pub u: ZMat,
    pub d: ZMat,
    pub v: ZMat,
}

pub fn smith_normal_form(a: &ZMat) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = ZMat::identity(m);
    let mut v = ZMat::identity(n);

    let mut t = 0;
    while t < m.min(n) {
        // locate a pivot of minimal absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[(i, j)].is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if d[(i, j)].abs() < d[(pi, pj)].abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // clear column t below and row t to the right; repeat until stable
        // because euclidean steps can reintroduce entries
        let mut clean = false;
        while !clean {
            clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = div_rounded(&d[(i, t)], &d[(t, t)]);
                if !q.is_zero() {
                    d.add_scaled_row(i, t, &-&q);
                    u.add_scaled_row(i, t, &-&q);
                }
                if !d[(i, t)].is_zero() {
                    // remainder smaller than pivot: swap it up and restart
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = div_rounded(&d[(t, j)], &d[(t, t)]);
                if !q.is_zero() {
                    d.add_scaled_col(j, t, &-&q);
                    v.add_scaled_col(j, t, &-&q);
                }
                if !d[(t, j)].is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    clean = false;
                }
            }
        }

        // divisibility condition: pivot must divide the remaining block
        let mut fixed = true;
        'scan: for i in t + 1..m {
            for j in t + 1..n {
                if (&d[(i, j)] % &d[(t, t)]).is_zero() {
                    continue;
                }
                d.add_scaled_row(t, i, &BigInt::one());
                u.add_scaled_row(t, i, &BigInt::one());
                fixed = false;
                break 'scan;
            }
        }
        if !fixed {
            continue; // redo elimination at the same index
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithForm { u, d, v }
}

/// Rounded division keeping remainders small in absolute value. Floor
/// division leaves a remainder with the divisor's sign; bumping the
/// quotient by one shrinks it below |b|/2 in either case.
fn div_rounded(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_mod_floor(a, b);
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Solves `a * x = rhs` over ℤ, returning one solution if any exists.
pub fn solve_integer(a: &ZMat, rhs: &[BigInt]) -> Option<Vec<BigInt>> {
    if rhs.len() != a.rows() {
        return None;
    }
    let snf = smith_normal_form(a);
    let y = snf.u.mul_vec(rhs).expect("u has matching size");
    let n = a.cols();
    let r = (0..a.rows().min(n)).take_while(|&i| !snf.d[(i, i)].is_zero()).count();
    let mut z = vec![BigInt::zero(); n];
    for (i, yi) in y.iter().enumerate() {
        if i < r {
            let (q, rem) = num_integer::Integer::div_rem(yi, &snf.d[(i, i)]);
            if !rem.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&z).expect("v has matching size"))
}

/// ℤ-basis of the right kernel of `a`; saturated because the columns of the
/// unimodular Smith transform span it.
pub fn integer_kernel_basis(a: &ZMat) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let n = a.cols();
    let r = (0..a.rows().min(n)).take_while(|&i| !snf.d[(i, i)].is_zero()).count();
    (r..n)
        .map(|j| (0..n).map(|i| snf.v[(i, j)].clone()).collect())
        .collect()
}
