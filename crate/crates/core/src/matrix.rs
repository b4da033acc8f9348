//! Dense integer matrices with the exact algorithms the rest of the crate
//! needs: Hermite normal form, fraction-free determinants, ranks, and a few
//! GF(2) routines for parity systems and fast basis prefilters.
//!
//! Everything is arbitrary precision; rank-29 HNF intermediates overflow
//! 64-bit words, so there is no machine-word fast path here. Hot loops that
//! can prove their inputs small (inner products of short vectors, modular
//! determinants) live elsewhere and work on `i64`/`u64` directly.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense matrix over the integers, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        IntMat { rows: r, cols: c, entries }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..i {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// `self * other * self^T`; the usual base-change of a Gram matrix by a
    /// matrix of row vectors.
    pub fn conjugate(&self, gram: &IntMat) -> IntMat {
        self.mul(gram).mul(&self.transpose())
    }

    /// Entries converted to `i64`, or `None` if any entry does not fit.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                row.push(i64::try_from(&self[(i, j)]).ok()?);
            }
            out.push(row);
        }
        Some(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[(k, k)] * &m[(i, j)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = num / &prev;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            for i in rank + 1..m.rows {
                for j in col + 1..m.cols {
                    let num = &m[(rank, col)] * &m[(i, j)] - &m[(i, col)] * &m[(rank, j)];
                    m[(i, j)] = num / &prev;
                }
                m[(i, col)] = BigInt::zero();
            }
            prev = m[(rank, col)].clone();
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// All leading principal minors positive, i.e. positive definiteness for
    /// a symmetric matrix.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        for k in 1..=self.rows {
            let mut sub = IntMat::zero(k, k);
            for i in 0..k {
                for j in 0..k {
                    sub[(i, j)] = self[(i, j)].clone();
                }
            }
            if !sub.det().is_positive() {
                return false;
            }
        }
        true
    }
}

impl core::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Row-style Hermite normal form of the row span of `gens`.
///
/// Returns the nonzero rows of the triangularized generating system: a
/// canonical basis of the generated sublattice of `Z^cols`, in row echelon
/// form with positive pivots and reduced entries above each pivot.
pub fn hnf(gens: &IntMat) -> IntMat {
    let mut h = Hnf::new(gens.cols);
    for i in 0..gens.rows {
        h.add_row(gens.row(i).to_vec());
    }
    h.into_matrix()
}

/// Incremental HNF accumulator. Rows can be fed one by one; useful both for
/// streaming generator sets and for early-exit index checks.
pub struct Hnf {
    cols: usize,
    /// `pivot_rows[j]` is a row whose leading nonzero entry (positive) is in
    /// column `j`.
    pivot_rows: Vec<Option<Vec<BigInt>>>,
}

impl Hnf {
    pub fn new(cols: usize) -> Self {
        Hnf { cols, pivot_rows: vec![None; cols] }
    }

    pub fn add_row(&mut self, mut row: Vec<BigInt>) {
        assert_eq!(row.len(), self.cols);
        for j in 0..self.cols {
            if row[j].is_zero() {
                continue;
            }
            match &mut self.pivot_rows[j] {
                None => {
                    if row[j].is_negative() {
                        for v in row.iter_mut() {
                            *v = -core::mem::take(v);
                        }
                    }
                    self.pivot_rows[j] = Some(row);
                    return;
                }
                Some(pivot) => {
                    // Euclidean step on column j between `row` and the pivot.
                    loop {
                        let q = row[j].div_euclid(&pivot[j]);
                        if !q.is_zero() {
                            for (r, p) in row.iter_mut().zip(pivot.iter()) {
                                *r -= &q * p;
                            }
                        }
                        if row[j].is_zero() {
                            break;
                        }
                        core::mem::swap(pivot, &mut row);
                    }
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.iter().filter(|r| r.is_some()).count()
    }

    /// Product of the pivots: the index of the row span in `Z^cols` when the
    /// rank is full, meaningless otherwise.
    pub fn index(&self) -> Option<BigInt> {
        if self.rank() < self.cols {
            return None;
        }
        let mut idx = BigInt::one();
        for (j, r) in self.pivot_rows.iter().enumerate() {
            idx *= &r.as_ref().expect("full rank")[j];
        }
        Some(idx)
    }

    /// True once the accumulated rows span all of `Z^cols`.
    pub fn is_full(&self) -> bool {
        self.index().map_or(false, |i| i.is_one())
    }

    /// Extract the canonical form: entries above each pivot reduced into
    /// `[0, pivot)`, processing pivot columns left to right.
    pub fn into_matrix(mut self) -> IntMat {
        for j in 0..self.cols {
            let Some(pj) = self.pivot_rows[j].clone() else {
                continue;
            };
            for i in 0..j {
                if let Some(pi) = self.pivot_rows[i].as_mut() {
                    let q = pi[j].div_euclid(&pj[j]);
                    if !q.is_zero() {
                        for (r, p) in pi.iter_mut().zip(pj.iter()) {
                            *r -= &q * p;
                        }
                    }
                }
            }
        }
        let rows: Vec<Vec<BigInt>> = self.pivot_rows.into_iter().flatten().collect();
        if rows.is_empty() {
            IntMat::zero(0, self.cols)
        } else {
            IntMat::from_rows(rows)
        }
    }
}

trait DivEuclidRef {
    fn div_euclid(&self, other: &Self) -> Self;
}

impl DivEuclidRef for BigInt {
    fn div_euclid(&self, other: &Self) -> Self {
        // num-integer's div_floor matches Euclidean division for positive
        // divisors; HNF pivots are kept positive.
        Integer::div_floor(self, other)
    }
}

/// Inverse of a unimodular integer matrix, by rational Gauss-Jordan; panics
/// if the matrix is not invertible or the inverse is not integral.
pub fn inverse_unimodular(m: &IntMat) -> IntMat {
    use num_rational::Ratio;
    let n = m.rows();
    assert!(m.is_square());
    let mut a: Vec<Vec<Ratio<BigInt>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Ratio::from_integer(m[(i, j)].clone()))
                .chain((0..n).map(|j| {
                    Ratio::from_integer(if i == j { BigInt::one() } else { BigInt::zero() })
                }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero()).expect("matrix is invertible");
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for j in 0..2 * n {
            a[col][j] *= &inv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..2 * n {
                let t = &f * &a[col][j];
                a[i][j] -= t;
            }
        }
    }
    let mut out = IntMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let r = &a[i][n + j];
            assert!(r.is_integer(), "inverse is not integral");
            out[(i, j)] = r.to_integer();
        }
    }
    out
}

/// Determinant of an `i64` matrix modulo an odd word-sized prime, by Gaussian
/// elimination over `Z/p`. Used as a cheap `|det| = 1` prefilter.
pub fn det_mod_p(rows: &[Vec<i64>], p: u64) -> u64 {
    let n = rows.len();
    let mut m: Vec<Vec<u64>> =
        rows.iter().map(|r| r.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect()).collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| m[i][k] % p != 0) else {
            return 0;
        };
        if piv != k {
            m.swap(k, piv);
            det = p - det;
            if det == p {
                det = 0;
            }
        }
        let inv = inv_mod_u64(m[k][k] % p, p);
        det = mulmod(det, m[k][k] % p, p);
        for i in k + 1..n {
            if m[i][k] % p == 0 {
                continue;
            }
            let f = mulmod(m[i][k] % p, inv, p);
            for j in k..n {
                let sub = mulmod(f, m[k][j], p);
                m[i][j] = (m[i][j] + p - sub) % p;
            }
        }
    }
    det % p
}

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Inverse of `a` modulo `m` for `gcd(a, m) = 1`.
pub fn inv_mod_u64(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible");
    t.rem_euclid(m as i128) as u64
}

/// Bit-packed matrix over GF(2).
#[derive(Clone, Debug)]
pub struct Gf2Mat {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl Gf2Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Gf2Mat { rows, cols, words, data: vec![0u64; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.data[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (a, b) = (dst * self.words, src * self.words);
        for k in 0..self.words {
            let v = self.data[b + k];
            self.data[a + k] ^= v;
        }
    }

    /// Determinant over GF(2) (destructive elimination on a copy).
    pub fn det(&self) -> bool {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        for k in 0..m.rows {
            let Some(p) = (k..m.rows).find(|&i| m.get(i, k)) else {
                return false;
            };
            if p != k {
                for w in 0..m.words {
                    m.data.swap(k * m.words + w, p * m.words + w);
                }
            }
            for i in k + 1..m.rows {
                if m.get(i, k) {
                    m.xor_rows(i, k);
                }
            }
        }
        true
    }

    /// Solve `M x = b` over GF(2); `None` if inconsistent. When the kernel is
    /// nontrivial an arbitrary solution is returned.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.rows);
        let mut m = self.clone();
        let mut rhs: Vec<bool> = b.to_vec();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            let Some(p) = (row..m.rows).find(|&i| m.get(i, col)) else {
                continue;
            };
            if p != row {
                for w in 0..m.words {
                    m.data.swap(row * m.words + w, p * m.words + w);
                }
                rhs.swap(row, p);
            }
            for i in 0..m.rows {
                if i != row && m.get(i, col) {
                    m.xor_rows(i, row);
                    rhs[i] ^= rhs[row];
                }
            }
            pivots.push((row, col));
            row += 1;
            if row == m.rows {
                break;
            }
        }
        for i in row..m.rows {
            if rhs[i] {
                return None;
            }
        }
        let mut x = vec![false; m.cols];
        for &(r, c) in &pivots {
            x[c] = rhs[r];
        }
        Some(x)
    }

    /// Basis of the kernel `{x : M x = 0}` over GF(2).
    pub fn kernel(&self) -> Vec<Vec<bool>> {
        let mut m = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            let Some(p) = (row..m.rows).find(|&i| m.get(i, col)) else {
                continue;
            };
            if p != row {
                for w in 0..m.words {
                    m.data.swap(row * m.words + w, p * m.words + w);
                }
            }
            for i in 0..m.rows {
                if i != row && m.get(i, col) {
                    m.xor_rows(i, row);
                }
            }
            pivots.push((row, col));
            row += 1;
            if row == m.rows {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in (0..m.cols).filter(|c| !pivot_cols.contains(c)) {
            let mut x = vec![false; m.cols];
            x[free] = true;
            for &(r, c) in &pivots {
                x[c] = m.get(r, free);
            }
            basis.push(x);
        }
        basis
    }
}

/// gcd of a slice of i64, nonnegative.
pub fn gcd_all(xs: &[i64]) -> i64 {
    xs.iter().fold(0i64, |g, &x| g.gcd(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(rows: &[&[i64]]) -> IntMat {
        IntMat::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn det_small() {
        assert_eq!(m(&[&[2, 1], &[1, 2]]).det(), BigInt::from(3));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), BigInt::zero());
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
        assert_eq!(IntMat::identity(5).det(), BigInt::one());
    }

    #[test]
    fn det_matches_mod_p() {
        // deterministic pseudo-random small matrices
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..50 {
            let n = 3 + (next() % 3) as usize;
            let rows: Vec<Vec<i64>> =
                (0..n).map(|_| (0..n).map(|_| (next() % 11) as i64 - 5).collect()).collect();
            let exact = IntMat::from_i64_rows(&rows).det();
            let p = 1_000_003u64;
            let modular = det_mod_p(&rows, p);
            let expect = exact.mod_floor(&BigInt::from(p));
            assert_eq!(BigInt::from(modular), expect);
        }
    }

    #[test]
    fn hnf_index() {
        // span{2e1, e2} has index 2 in Z^2
        let h = hnf(&m(&[&[2, 0], &[0, 1]]));
        assert_eq!(h.rows(), 2);
        let mut acc = Hnf::new(2);
        acc.add_row(vec![BigInt::from(2), BigInt::zero()]);
        acc.add_row(vec![BigInt::zero(), BigInt::one()]);
        assert_eq!(acc.index(), Some(BigInt::from(2)));
        // adding (1,0) brings it to index 1
        acc.add_row(vec![BigInt::one(), BigInt::zero()]);
        assert!(acc.is_full());
    }

    #[test]
    fn hnf_rank_deficient() {
        let mut acc = Hnf::new(3);
        acc.add_row(vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)]);
        acc.add_row(vec![BigInt::from(2), BigInt::from(4), BigInt::from(6)]);
        assert_eq!(acc.rank(), 1);
        assert_eq!(acc.index(), None);
    }

    #[test]
    fn hnf_canonical() {
        // HNF of a unimodular row set is the identity
        let h = hnf(&m(&[&[3, 1], &[2, 1]]));
        assert_eq!(h, IntMat::identity(2));
    }

    #[test]
    fn rank_works() {
        assert_eq!(m(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]).rank(), 2);
        assert_eq!(IntMat::identity(4).rank(), 4);
        assert_eq!(IntMat::zero(3, 3).rank(), 0);
    }

    #[test]
    fn pd_check() {
        assert!(m(&[&[2, -1], &[-1, 2]]).is_positive_definite());
        assert!(!m(&[&[1, 2], &[2, 1]]).is_positive_definite());
        assert!(!m(&[&[0, 0], &[0, 1]]).is_positive_definite());
    }

    #[test]
    fn gf2_solve_and_kernel() {
        let mut a = Gf2Mat::zero(3, 3);
        // singular: rows (1,1,0), (0,1,1), (1,0,1)
        a.set(0, 0, true);
        a.set(0, 1, true);
        a.set(1, 1, true);
        a.set(1, 2, true);
        a.set(2, 0, true);
        a.set(2, 2, true);
        assert!(!a.det());
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![true, true, true]);
        assert!(a.solve(&[true, true, false]).is_some());
        assert!(a.solve(&[true, false, false]).is_none());

        let id = {
            let mut m = Gf2Mat::zero(2, 2);
            m.set(0, 0, true);
            m.set(1, 1, true);
            m
        };
        assert!(id.det());
        assert_eq!(id.solve(&[true, false]).unwrap(), vec![true, false]);
    }

    #[test]
    fn inverse_mod() {
        assert_eq!(inv_mod_u64(3, 7), 5);
        assert_eq!(inv_mod_u64(1, 2), 1);
        let p = 1009;
        for a in 1..p {
            assert_eq!(mulmod(a, inv_mod_u64(a, p), p), 1);
        }
    }
}
