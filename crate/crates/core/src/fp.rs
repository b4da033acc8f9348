//! Depth-first short-vector enumeration for positive definite integer
//! quadratic forms (Fincke-Pohst), with optional coset shifts.
//!
//! The pruning bounds are computed from a floating-point Cholesky
//! decomposition with a conservative slack, and every candidate leaf is
//! re-checked with exact integer arithmetic before it is emitted. Attainable
//! norms are multiples of `1/den^2`, so a slack well below that quantum
//! cannot drop a true solution unless the float evaluation drifts by more
//! than the slack itself, far beyond what these matrix sizes can produce.
//! The completeness property tests compare against brute-force box
//! enumeration on random forms.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FpError {
    NotPositiveDefinite,
}

/// Enumerate all `v = den*x + offset` (`x` integral) with
/// `0 < v^T G v <= bound`, calling `visit(v, norm)` once per vector, where
/// `norm = v^T G v`.
///
/// `gram` must be symmetric positive definite. Both `v` and `-v` are
/// visited; callers canonicalize signs. Vectors are emitted in depth-first
/// order, which is deterministic but otherwise unspecified.
pub fn enumerate(
    gram: &[Vec<i64>],
    den: i64,
    offset: &[i64],
    bound: i64,
    mut visit: impl FnMut(&[i64], i64),
) -> Result<(), FpError> {
    let n = gram.len();
    debug_assert!(den >= 1);
    debug_assert_eq!(offset.len(), n);
    if n == 0 || bound < 1 {
        return Ok(());
    }

    // Rational Cholesky in f64: Q(y) = sum_i d[i] * (y_i + sum_{j>i} u[i][j] y_j)^2.
    let mut c: Vec<Vec<f64>> =
        gram.iter().map(|row| row.iter().map(|&v| v as f64).collect()).collect();
    let mut d = vec![0f64; n];
    let mut u = vec![vec![0f64; n]; n];
    for i in 0..n {
        d[i] = c[i][i];
        if d[i] <= 0.0 {
            return Err(FpError::NotPositiveDefinite);
        }
        for j in i + 1..n {
            u[i][j] = c[i][j] / d[i];
        }
        for j in i + 1..n {
            for k in j..n {
                c[j][k] -= u[i][j] * c[i][k];
            }
        }
    }

    // Work in y = x + offset/den; the norm gets a 1/den^2 scale.
    let denf = den as f64;
    let shift: Vec<f64> = offset.iter().map(|&o| o as f64 / denf).collect();
    // Slack of a tenth of the attainable-norm quantum (1/den^2).
    let budget = (bound as f64 + 0.1) / (denf * denf);
    let eps = 1e-9;

    // Iterative DFS from the last coordinate down to the first.
    let mut x = vec![0i64; n];
    let mut centers = vec![0f64; n]; // shift_i + sum_{j>i} u[i][j] y_j
    let mut remaining = vec![0f64; n]; // budget left at each level
    let mut his = vec![0i64; n];
    let mut level = n - 1;
    let mut entering = true;
    let mut scratch = vec![0i64; n];
    loop {
        if entering {
            let mut t = shift[level];
            for j in level + 1..n {
                t += u[level][j] * (x[j] as f64 + shift[j]);
            }
            centers[level] = t;
            let rem = if level == n - 1 { budget } else { remaining[level] };
            let r = libm::sqrt(if rem > 0.0 { rem / d[level] } else { 0.0 });
            let lo = libm::ceil(-t - r - eps) as i64;
            his[level] = libm::floor(-t + r + eps) as i64;
            x[level] = lo;
            remaining[level] = rem;
        } else {
            x[level] += 1;
        }
        if x[level] > his[level] {
            // Exhausted this level; backtrack.
            if level == n - 1 {
                return Ok(());
            }
            level += 1;
            entering = false;
            continue;
        }
        // Contribution of this coordinate.
        let y = x[level] as f64 + centers[level];
        let used = d[level] * y * y;
        if used > remaining[level] + eps {
            entering = false;
            continue;
        }
        if level == 0 {
            // Leaf: exact check.
            for i in 0..n {
                scratch[i] = den * x[i] + offset[i];
            }
            let norm = exact_norm(gram, &scratch);
            if norm > 0 && norm <= i128::from(bound) {
                visit(&scratch, i64::try_from(norm).expect("norm fits i64"));
            }
            entering = false;
        } else {
            remaining[level - 1] = remaining[level] - used;
            level -= 1;
            entering = true;
        }
    }
}

/// `v^T G v`, exactly.
pub fn exact_norm(gram: &[Vec<i64>], v: &[i64]) -> i128 {
    let n = v.len();
    let mut acc: i128 = 0;
    for i in 0..n {
        if v[i] == 0 {
            continue;
        }
        let mut row: i128 = 0;
        for j in 0..n {
            row += i128::from(gram[i][j]) * i128::from(v[j]);
        }
        acc += i128::from(v[i]) * row;
    }
    acc
}

/// `u^T G v`, exactly.
pub fn exact_inner(gram: &[Vec<i64>], u: &[i64], v: &[i64]) -> i128 {
    let n = u.len();
    let mut acc: i128 = 0;
    for i in 0..n {
        if u[i] == 0 {
            continue;
        }
        let mut row: i128 = 0;
        for j in 0..n {
            row += i128::from(gram[i][j]) * i128::from(v[j]);
        }
        acc += i128::from(u[i]) * row;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use std::vec::Vec;

    /// All vectors of norm in (0, bound] by brute force over a box.
    fn brute_force(gram: &[Vec<i64>], bound: i64, radius: i64) -> BTreeSet<(Vec<i64>, i64)> {
        let n = gram.len();
        let mut out = BTreeSet::new();
        let mut v = vec![-radius; n];
        'outer: loop {
            let norm = exact_norm(gram, &v);
            if norm > 0 && norm <= i128::from(bound) {
                out.insert((v.clone(), norm as i64));
            }
            for i in 0..n {
                v[i] += 1;
                if v[i] <= radius {
                    continue 'outer;
                }
                v[i] = -radius;
            }
            return out;
        }
    }

    fn collect(gram: &[Vec<i64>], den: i64, offset: &[i64], bound: i64) -> BTreeSet<(Vec<i64>, i64)> {
        let mut got = BTreeSet::new();
        enumerate(gram, den, offset, bound, |v, norm| {
            assert!(got.insert((v.to_vec(), norm)), "duplicate vector emitted");
        })
        .unwrap();
        got
    }

    #[test]
    fn identity_norms() {
        let gram = vec![vec![1, 0], vec![0, 1]];
        let got = collect(&gram, 1, &[0, 0], 2);
        // 4 of norm 1, 4 of norm 2
        assert_eq!(got.len(), 8);
        assert_eq!(got.iter().filter(|(_, n)| *n == 1).count(), 4);
    }

    #[test]
    fn rejects_indefinite() {
        let gram = vec![vec![1, 2], vec![2, 1]];
        assert_eq!(enumerate(&gram, 1, &[0, 0], 2, |_, _| {}), Err(FpError::NotPositiveDefinite));
    }

    #[test]
    fn matches_brute_force_small() {
        // A few fixed moderately skew forms.
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![2, 1], vec![1, 2]],
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
            vec![vec![5, 2, 1], vec![2, 4, 2], vec![1, 2, 6]],
            vec![vec![3, 1, 1, 1], vec![1, 3, 1, 1], vec![1, 1, 3, 1], vec![1, 1, 1, 3]],
        ];
        for gram in cases {
            for bound in 1..=6 {
                let got = collect(&gram, 1, &vec![0; gram.len()], bound);
                let expect = brute_force(&gram, bound, 8);
                assert_eq!(got, expect, "gram {gram:?} bound {bound}");
            }
        }
    }

    #[test]
    fn coset_enumeration() {
        // Odd-first-coordinate vectors v = 2x + (1,0) in Z^2.
        let gram = vec![vec![1, 0], vec![0, 1]];
        let got = collect(&gram, 2, &[1, 0], 5);
        for (v, norm) in &got {
            assert_eq!(v[0].rem_euclid(2), 1);
            assert_eq!(v[1].rem_euclid(2), 0);
            assert_eq!(v[0] * v[0] + v[1] * v[1], *norm);
            assert!(*norm <= 5);
        }
        // v^T v <= 5 with v = (odd, even): (±1,0) and (±1,±2)
        assert_eq!(got.len(), 6);
        // and with a larger bound: (±3,0) (±3,±2) (±1,±4) join
        assert_eq!(collect(&gram, 2, &[1, 0], 20).len(), 16);
    }
}
