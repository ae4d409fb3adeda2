//! Exact linear algebra over the finite local rings used everywhere else:
//! generic matrices over a [`Scalar`], division-free characteristic
//! polynomials (Berkowitz), Gauss-Jordan inversion with unit pivoting, a
//! p-adic Smith normal form for integer matrices, and a small F_p solver.

use crate::error::{Error, Result};
use crate::rings::{RingElement, Witt};
use std::fmt::Debug;

/// Arithmetic interface for matrix entries. All our scalars live in finite
/// local rings, so "unit" is decidable and inverses are exact.
pub trait Scalar: Clone + PartialEq + Debug {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn inv(&self) -> Result<Self>;
}

impl Scalar for RingElement {
    fn add(&self, o: &Self) -> Self {
        RingElement::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RingElement::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RingElement::mul(self, o)
    }
    fn neg(&self) -> Self {
        RingElement::neg(self)
    }
    fn zero_like(&self) -> Self {
        self.ring_arc().zero()
    }
    fn one_like(&self) -> Self {
        self.ring_arc().one()
    }
    fn is_zero(&self) -> bool {
        RingElement::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        RingElement::is_unit(self)
    }
    fn inv(&self) -> Result<Self> {
        RingElement::inv(self)
    }
}

impl Scalar for Witt {
    fn add(&self, o: &Self) -> Self {
        Witt::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Witt::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Witt::mul(self, o)
    }
    fn neg(&self) -> Self {
        Witt::neg(self)
    }
    fn zero_like(&self) -> Self {
        Witt::zero(self.ring_arc(), self.len())
    }
    fn one_like(&self) -> Self {
        Witt::one(self.ring_arc(), self.len())
    }
    fn is_zero(&self) -> bool {
        Witt::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        Witt::is_unit(self)
    }
    fn inv(&self) -> Result<Self> {
        Witt::inv(self)
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Debug> Debug for Matrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize, like: &T) -> Self {
        Matrix::from_fn(rows, cols, |_, _| like.zero_like())
    }

    pub fn identity(n: usize, like: &T) -> Self {
        Matrix::from_fn(n, n, |r, c| {
            if r == c {
                like.one_like()
            } else {
                like.zero_like()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn sample(&self) -> &T {
        &self.data[0]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    pub fn scalar_mul(&self, s: &T) -> Self {
        self.map(|a| a.mul(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, o.cols, |r, c| {
            let mut acc = self.data[0].zero_like();
            for k in 0..self.cols {
                acc = acc.add(&self.at(r, k).mul(o.at(k, c)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = self.data[0].zero_like();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(r, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    /// Gauss-Jordan inverse over a local ring: pivots must be units.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Singular("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, self.sample());
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| a.at(r, col).is_unit())
                .ok_or_else(|| Error::Singular(format!("no unit pivot in column {col}")))?;
            if pivot_row != col {
                for c in 0..n {
                    a.data.swap(pivot_row * n + c, col * n + c);
                    inv.data.swap(pivot_row * n + c, col * n + c);
                }
            }
            let pinv = a.at(col, col).inv()?;
            for c in 0..n {
                let v = a.at(col, c).mul(&pinv);
                a.set(col, c, v);
                let w = inv.at(col, c).mul(&pinv);
                inv.set(col, c, w);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let factor = a.at(r, col).clone();
                for c in 0..n {
                    let v = a.at(r, c).sub(&factor.mul(a.at(col, c)));
                    a.set(r, c, v);
                    let w = inv.at(r, c).sub(&factor.mul(inv.at(col, c)));
                    inv.set(r, c, w);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.det().is_unit()
    }

    /// Characteristic polynomial of a square matrix by the Berkowitz
    /// algorithm (division-free). Returns coefficients c[0..=n] of
    /// det(tI - A) with c[k] the coefficient of t^k, c[n] = 1.
    pub fn charpoly(&self) -> Vec<T> {
        assert!(self.is_square());
        let n = self.rows;
        let one = self.sample().one_like();
        if n == 0 {
            return vec![one];
        }
        // leading-first coefficient vector of the 1x1 leading submatrix
        let mut v = vec![one.clone(), self.at(0, 0).neg()];
        for i in 1..n {
            // q_0 = a_ii, q_k = R M^{k-1} C for k >= 1
            let mut q = Vec::with_capacity(i + 1);
            q.push(self.at(i, i).clone());
            // w starts as C = A[0..i][i]
            let mut w: Vec<T> = (0..i).map(|r| self.at(r, i).clone()).collect();
            for _ in 1..=i {
                // R . w
                let mut dot = one.zero_like();
                for k in 0..i {
                    dot = dot.add(&self.at(i, k).mul(&w[k]));
                }
                q.push(dot);
                // w <- M w
                let mut nw = vec![one.zero_like(); i];
                for (r, slot) in nw.iter_mut().enumerate() {
                    for k in 0..i {
                        *slot = slot.add(&self.at(r, k).mul(&w[k]));
                    }
                }
                w = nw;
            }
            // Toeplitz vector t = [1, -q_0, ..., -q_i]; convolve with v
            let mut t = Vec::with_capacity(i + 2);
            t.push(one.clone());
            for qk in &q {
                t.push(qk.neg());
            }
            let mut nv = vec![one.zero_like(); v.len() + 1];
            for (j, tj) in t.iter().enumerate() {
                if tj.is_zero() {
                    continue;
                }
                for (k, vk) in v.iter().enumerate() {
                    if j + k < nv.len() {
                        nv[j + k] = nv[j + k].add(&tj.mul(vk));
                    }
                }
            }
            v = nv;
        }
        v.reverse(); // now c[k] = coefficient of t^k
        v
    }

    pub fn det(&self) -> T {
        let n = self.rows;
        let c0 = self.charpoly()[0].clone();
        // det(tI - A) at t = 0 is (-1)^n det A
        if n % 2 == 1 {
            c0.neg()
        } else {
            c0
        }
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut acc = self.sample().zero_like();
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    /// Kronecker (tensor) product, index order (i1*n2 + i2).
    pub fn kronecker(&self, o: &Self) -> Self {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |r, c| {
            let (r1, r2) = (r / o.rows, r % o.rows);
            let (c1, c2) = (c / o.cols, c % o.cols);
            self.at(r1, c1).mul(o.at(r2, c2))
        })
    }
}

// ---------------------------------------------------------------------------
// p-adic Smith normal form over Z/p^K for integer matrices
// ---------------------------------------------------------------------------

/// U * A * V = diag(p^e_1, ..) mod p^K, with U, V invertible mod p^K.
/// An exponent of K means the elementary divisor is indistinguishable from 0
/// at this precision.
pub struct PadicSnf {
    pub p: u64,
    pub prec: u32,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
    pub exponents: Vec<u32>,
    pub rows: usize,
    pub cols: usize,
}

fn val_p(mut x: i128, p: i128, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x % p == 0 && v < cap {
        x /= p;
        v += 1;
    }
    v
}

fn inv_mod(a: i128, m: i128) -> i128 {
    // extended Euclid; a must be a unit mod m
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert!(old_r == 1, "inv_mod of a non-unit");
    old_s.rem_euclid(m)
}

pub fn padic_snf(a: &[Vec<i128>], p: u64, prec: u32) -> PadicSnf {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let pk: i128 = (p as i128).pow(prec);
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(pk)).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..rows)
        .map(|i| (0..rows).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut v: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut exps = Vec::new();
    let pi = p as i128;
    let n = rows.min(cols);
    for k in 0..n {
        // find the min-valuation entry in the remaining block
        let mut best: Option<(usize, usize, u32)> = None;
        for r in k..rows {
            for c in k..cols {
                let vv = val_p(m[r][c], pi, prec);
                if best.map_or(true, |(_, _, bv)| vv < bv) {
                    best = Some((r, c, vv));
                }
            }
        }
        let (br, bc, bv) = best.unwrap();
        if bv >= prec {
            // remaining block is 0 at this precision
            for _ in k..n {
                exps.push(prec);
            }
            break;
        }
        m.swap(k, br);
        u.swap(k, br);
        if bc != k {
            for row in m.iter_mut() {
                row.swap(k, bc);
            }
            for row in v.iter_mut() {
                row.swap(k, bc);
            }
        }
        // normalize pivot to exactly p^bv: multiply row by unit inverse
        let unit = m[k][k] / pi.pow(bv);
        let uinv = inv_mod(unit.rem_euclid(pk), pk);
        for c in 0..cols {
            m[k][c] = (m[k][c] * uinv).rem_euclid(pk);
        }
        for c in 0..rows {
            u[k][c] = (u[k][c] * uinv).rem_euclid(pk);
        }
        let pivot = pi.pow(bv);
        // clear the column below and the row to the right
        for r in 0..rows {
            if r == k || m[r][k] == 0 {
                continue;
            }
            let q = m[r][k] / pivot; // exact: val >= bv
            debug_assert_eq!(q * pivot, m[r][k]);
            for c in 0..cols {
                m[r][c] = (m[r][c] - q * m[k][c]).rem_euclid(pk);
            }
            for c in 0..rows {
                u[r][c] = (u[r][c] - q * u[k][c]).rem_euclid(pk);
            }
        }
        for c in 0..cols {
            if c == k || m[k][c] == 0 {
                continue;
            }
            let q = m[k][c] / pivot;
            debug_assert_eq!(q * pivot, m[k][c]);
            for r in 0..cols {
                v[r][c] = (v[r][c] - q * v[r][k]).rem_euclid(pk);
            }
            for r in 0..rows {
                m[r][c] = (m[r][c] - q * m[r][k]).rem_euclid(pk);
            }
        }
        exps.push(bv);
    }
    while exps.len() < n {
        exps.push(prec);
    }
    PadicSnf {
        p,
        prec,
        u,
        v,
        exponents: exps,
        rows,
        cols,
    }
}

/// Inverse of an invertible integer matrix mod p^K.
pub fn int_inverse_mod(a: &[Vec<i128>], p: u64, prec: u32) -> Result<Vec<Vec<i128>>> {
    let n = a.len();
    let pk: i128 = (p as i128).pow(prec);
    let pi = p as i128;
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(pk)).collect())
        .collect();
    let mut inv: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let pr = (col..n)
            .find(|&r| m[r][col] % pi != 0)
            .ok_or_else(|| Error::Singular("int matrix not invertible mod p".into()))?;
        m.swap(col, pr);
        inv.swap(col, pr);
        let d = inv_mod(m[col][col], pk);
        for c in 0..n {
            m[col][c] = (m[col][c] * d).rem_euclid(pk);
            inv[col][c] = (inv[col][c] * d).rem_euclid(pk);
        }
        for r in 0..n {
            if r == col || m[r][col] == 0 {
                continue;
            }
            let f = m[r][col];
            for c in 0..n {
                m[r][c] = (m[r][c] - f * m[col][c]).rem_euclid(pk);
                inv[r][c] = (inv[r][c] - f * inv[col][c]).rem_euclid(pk);
            }
        }
    }
    Ok(inv)
}

// ---------------------------------------------------------------------------
// Linear algebra over F_p (for square-zero deformation stages)
// ---------------------------------------------------------------------------

/// Solve A x = b mod p. Returns (particular solution, kernel basis) or None
/// if inconsistent.
pub fn fp_solve(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bb)| {
            let mut row: Vec<u64> = r.iter().map(|&x| x % p).collect();
            row.push(bb % p);
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| m[r][col] % p != 0) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = mod_pow(m[rank][col], p - 2, p);
        for c in col..=cols {
            m[rank][c] = m[rank][c] * inv % p;
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in col..=cols {
                    let sub = f * m[rank][c] % p;
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // consistency
    for r in rank..rows {
        if m[r][cols] % p != 0 {
            return None;
        }
    }
    let mut x = vec![0u64; cols];
    for (i, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = m[i][cols];
    }
    // kernel basis from free columns
    let pivot_set: std::collections::HashSet<usize> = pivot_cols.iter().copied().collect();
    let mut kernel = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut k = vec![0u64; cols];
        k[free] = 1;
        for (i, &pc) in pivot_cols.iter().enumerate() {
            k[pc] = (p - m[i][free] % p) % p;
        }
        kernel.push(k);
    }
    Some((x, kernel))
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::BaseRing;
    use rand::SeedableRng;

    #[test]
    fn inverse_over_w3f4() {
        let f4 = BaseRing::f4();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = Matrix::from_fn(3, 3, |_, _| Witt::random(&f4, 3, &mut rng));
            if !m.is_invertible() {
                continue;
            }
            let inv = m.inverse().unwrap();
            assert_eq!(m.mul(&inv), Matrix::identity(3, m.sample()));
            assert_eq!(inv.mul(&m), Matrix::identity(3, m.sample()));
        }
    }

    #[test]
    fn charpoly_matches_trace_det_2x2() {
        let z9 = BaseRing::zpm(3, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let m = Matrix::from_fn(2, 2, |_, _| RingElement::random(&z9, &mut rng));
            let cp = m.charpoly();
            // det(tI - A) = t^2 - tr t + det
            assert_eq!(cp[2], z9.one());
            assert_eq!(cp[1], m.trace().neg());
            assert_eq!(cp[0], m.det());
        }
    }

    #[test]
    fn charpoly_cayley_hamilton_3x3() {
        let f4 = BaseRing::f4();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = Matrix::from_fn(3, 3, |_, _| Witt::random(&f4, 2, &mut rng));
        let cp = m.charpoly();
        let n = 3;
        let mut acc = Matrix::zero(n, n, m.sample());
        let mut power = Matrix::identity(n, m.sample());
        for c in cp.iter() {
            acc = acc.add(&power.scalar_mul(c));
            power = power.mul(&m);
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn snf_diagonalizes() {
        let a = vec![vec![2i128, 4], vec![6, 8]];
        let s = padic_snf(&a, 2, 6);
        // U A V = diag(p^e): verify by direct multiplication
        let pk = 1i128 << 6;
        let mut prod = vec![vec![0i128; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0i128;
                for k in 0..2 {
                    for l in 0..2 {
                        acc += s.u[i][k] * a[k][l] % pk * s.v[l][j];
                    }
                }
                prod[i][j] = acc.rem_euclid(pk);
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                if i == j {
                    let e = s.exponents[i];
                    let expect = if e >= 6 { 0 } else { 1i128 << e };
                    assert_eq!(prod[i][j], expect);
                } else {
                    assert_eq!(prod[i][j], 0);
                }
            }
        }
    }

    #[test]
    fn fp_solver_solves_and_kernels() {
        // x + y = 1, 2x + 2y = 2 mod 3 has kernel dim 1
        let a = vec![vec![1u64, 1], vec![2, 2]];
        let b = vec![1u64, 2];
        let (x, k) = fp_solve(&a, &b, 3).unwrap();
        assert_eq!((x[0] + x[1]) % 3, 1);
        assert_eq!(k.len(), 1);
        // inconsistent system
        assert!(fp_solve(&a, &[1, 0], 3).is_none());
    }
}
