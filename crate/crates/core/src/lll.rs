//! Exact integer LLL on Gram matrices.
//!
//! This is the all-integer variant that tracks the Gram-Schmidt data as the
//! scaled integers `d_i` (leading principal minors) and `lambda_{i,j}`, so no
//! rationals or floats appear. It reduces the quadratic form directly: no
//! basis vectors are needed, and the unimodular transform (plus its inverse)
//! is returned alongside the reduced Gram matrix.

use crate::matrix::IntMat;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Lovasz parameter delta = 99/100.
const DELTA_NUM: u32 = 99;
const DELTA_DEN: u32 = 100;

pub struct LllResult {
    /// Rows are the reduced basis expressed in the input basis.
    pub transform: IntMat,
    /// Inverse of `transform`: input basis expressed in the reduced basis.
    pub inverse: IntMat,
    /// `transform * gram * transform^T`.
    pub gram: IntMat,
}

/// LLL-reduce a symmetric positive definite Gram matrix.
pub fn reduce(gram: &IntMat) -> LllResult {
    let n = gram.rows();
    let mut st = State {
        g: gram.clone(),
        u: IntMat::identity(n),
        uinv: IntMat::identity(n),
        d: vec![BigInt::one(); n + 1],
        lam: vec![vec![BigInt::zero(); n]; n],
        k_max: 0,
    };
    if n <= 1 {
        return LllResult { transform: st.u, inverse: st.uinv, gram: st.g };
    }
    st.incorporate(0);
    let mut k = 1usize;
    while k < n {
        if k > st.k_max {
            st.k_max = k;
            st.incorporate(k);
        }
        st.red(k, k - 1);
        let lam = st.lam[k][k - 1].clone();
        let lhs = (&st.d[k + 1] * &st.d[k - 1] + &lam * &lam) * BigInt::from(DELTA_DEN);
        let rhs = &st.d[k] * &st.d[k] * BigInt::from(DELTA_NUM);
        if lhs < rhs {
            st.swap(k);
            k = k.max(2) - 1;
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                st.red(k, l);
            }
            k += 1;
        }
    }
    LllResult { transform: st.u, inverse: st.uinv, gram: st.g }
}

struct State {
    g: IntMat,
    u: IntMat,
    uinv: IntMat,
    /// `d[i]` = Gram determinant of the first `i` basis vectors, `d[0] = 1`.
    d: Vec<BigInt>,
    /// `lam[i][j]` for `j < i`: `d[j+1] * mu_{i,j}` in Gram-Schmidt terms.
    lam: Vec<Vec<BigInt>>,
    k_max: usize,
}

impl State {
    /// Compute `lam[k][..k]` and `d[k+1]` from the current Gram matrix.
    fn incorporate(&mut self, k: usize) {
        for j in 0..=k {
            let mut u = self.g[(k, j)].clone();
            for i in 0..j {
                u = (&self.d[i + 1] * &u - &self.lam[k][i] * &self.lam[j][i]) / &self.d[i];
            }
            if j < k {
                self.lam[k][j] = u;
            } else {
                assert!(u.is_positive(), "form not positive definite");
                self.d[k + 1] = u;
            }
        }
    }

    /// Size-reduce basis vector `k` against vector `l < k`.
    fn red(&mut self, k: usize, l: usize) {
        let two_lam: BigInt = &self.lam[k][l] * 2;
        if two_lam.abs() <= self.d[l + 1] {
            return;
        }
        // q = round(lam / d)
        let q = (&two_lam + &self.d[l + 1]).div_floor(&(&self.d[l + 1] * 2));
        let n = self.g.rows();
        for m in 0..n {
            let t = &q * &self.g[(l, m)];
            self.g[(k, m)] -= t;
        }
        for m in 0..n {
            let t = &q * &self.g[(m, l)];
            self.g[(m, k)] -= t;
        }
        for m in 0..n {
            let t = &q * &self.u[(l, m)];
            self.u[(k, m)] -= t;
            let s = &q * &self.uinv[(m, k)];
            self.uinv[(m, l)] += s;
        }
        self.lam[k][l] -= &q * &self.d[l + 1];
        for i in 0..l {
            let t = &q * &self.lam[l][i];
            self.lam[k][i] -= t;
        }
    }

    /// Exchange basis vectors `k-1` and `k`, updating all invariants.
    fn swap(&mut self, k: usize) {
        let n = self.g.rows();
        for m in 0..n {
            let a = self.g[(k - 1, m)].clone();
            self.g[(k - 1, m)] = self.g[(k, m)].clone();
            self.g[(k, m)] = a;
        }
        for m in 0..n {
            let a = self.g[(m, k - 1)].clone();
            self.g[(m, k - 1)] = self.g[(m, k)].clone();
            self.g[(m, k)] = a;
        }
        for m in 0..n {
            let a = self.u[(k - 1, m)].clone();
            self.u[(k - 1, m)] = self.u[(k, m)].clone();
            self.u[(k, m)] = a;
            let b = self.uinv[(m, k - 1)].clone();
            self.uinv[(m, k - 1)] = self.uinv[(m, k)].clone();
            self.uinv[(m, k)] = b;
        }
        for j in 0..k.saturating_sub(1) {
            let a = self.lam[k][j].clone();
            self.lam[k][j] = self.lam[k - 1][j].clone();
            self.lam[k - 1][j] = a;
        }
        let lam = self.lam[k][k - 1].clone();
        let b = (&self.d[k - 1] * &self.d[k + 1] + &lam * &lam) / &self.d[k];
        for i in k + 1..=self.k_max {
            let t = self.lam[i][k].clone();
            self.lam[i][k] = (&self.d[k + 1] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k];
            self.lam[i][k - 1] = (&b * &t + &lam * &self.lam[i][k]) / &self.d[k + 1];
        }
        self.d[k] = b;
    }
}
