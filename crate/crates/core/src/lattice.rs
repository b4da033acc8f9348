//! Integral lattices as exact Gram matrices, with short-vector enumeration,
//! norm counts, sublattice indices and parity predicates.

use crate::fp;
use crate::lll;
use crate::matrix::{Hnf, IntMat};
use crate::Coords;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    NotSquare,
    NotSymmetric,
    NotPositiveDefinite,
    /// Gram entries do not fit machine words; enumeration paths refuse them.
    EntriesTooLarge,
    InvalidBound,
    EmbeddingMismatch,
    /// Operation defined only for odd lattices was given an even one.
    EvenLattice,
    /// Operation defined only for unimodular lattices.
    NotUnimodular,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LatticeError::NotSquare => "gram matrix is not square",
            LatticeError::NotSymmetric => "gram matrix is not symmetric",
            LatticeError::NotPositiveDefinite => "gram matrix is not positive definite",
            LatticeError::EntriesTooLarge => "gram entries exceed machine words",
            LatticeError::InvalidBound => "bound must be >= 1",
            LatticeError::EmbeddingMismatch => "embedding does not reproduce the gram matrix",
            LatticeError::EvenLattice => "operation requires an odd lattice",
            LatticeError::NotUnimodular => "operation requires a unimodular lattice",
        };
        f.write_str(s)
    }
}

/// A rational embedding of the lattice into `Q^m`: row `i` of `basis_num`,
/// divided by `den`, is the image of the `i`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub basis_num: IntMat,
    pub den: BigInt,
}

/// Rank-`n` integral lattice given by a symmetric positive definite integer
/// Gram matrix, optionally with a rational embedding.
#[derive(Clone, Debug)]
pub struct Lattice {
    gram: IntMat,
    gram_i64: Option<Vec<Vec<i64>>>,
    det: BigInt,
    embedding: Option<Embedding>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram && self.embedding == other.embedding
    }
}
impl Eq for Lattice {}

impl Lattice {
    pub fn from_gram(gram: IntMat) -> Result<Self, LatticeError> {
        if !gram.is_square() {
            return Err(LatticeError::NotSquare);
        }
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        let det = pd_det(&gram).ok_or(LatticeError::NotPositiveDefinite)?;
        let gram_i64 = gram.to_i64();
        Ok(Lattice { gram, gram_i64, det, embedding: None })
    }

    pub fn from_i64_gram(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::from_gram(IntMat::from_i64_rows(rows))
    }

    /// The standard lattice `Z^n`.
    pub fn standard(n: usize) -> Self {
        let gram = IntMat::identity(n);
        Lattice {
            gram_i64: gram.to_i64(),
            gram: gram.clone(),
            det: BigInt::one(),
            embedding: Some(Embedding { basis_num: gram, den: BigInt::one() }),
        }
    }

    /// Attach an embedding, checking `basis * basis^T = den^2 * gram` exactly.
    pub fn with_embedding(mut self, basis_num: IntMat, den: BigInt) -> Result<Self, LatticeError> {
        let mut scaled = basis_num.mul(&basis_num.transpose());
        let d2 = &den * &den;
        for i in 0..scaled.rows() {
            for j in 0..scaled.cols() {
                let v = core::mem::take(&mut scaled[(i, j)]);
                let (q, r) = num_integer::Integer::div_rem(&v, &d2);
                if !r.is_zero() {
                    return Err(LatticeError::EmbeddingMismatch);
                }
                scaled[(i, j)] = q;
            }
        }
        if scaled != self.gram {
            return Err(LatticeError::EmbeddingMismatch);
        }
        self.embedding = Some(Embedding { basis_num, den });
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMat {
        &self.gram
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.is_one()
    }

    /// Even iff every diagonal entry is even (suffices by bilinearity).
    pub fn is_even(&self) -> bool {
        let two = BigInt::from(2);
        (0..self.rank()).all(|i| (&self.gram[(i, i)] % &two).is_zero())
    }

    /// Machine-word view of the Gram matrix, for enumeration-grade hot
    /// paths; errors out when entries exceed `i64`.
    pub fn gram_i64(&self) -> Result<&[Vec<i64>], LatticeError> {
        self.gram_i64.as_deref().ok_or(LatticeError::EntriesTooLarge)
    }

    /// Inner product of two coordinate vectors.
    pub fn inner(&self, u: &[i64], v: &[i64]) -> Result<i128, LatticeError> {
        Ok(fp::exact_inner(self.gram_i64()?, u, v))
    }

    pub fn norm(&self, v: &[i64]) -> Result<i128, LatticeError> {
        Ok(fp::exact_norm(self.gram_i64()?, v))
    }

    /// All vectors of norm in `(0, bound]` up to sign, complete and sorted by
    /// norm then lexicographically.
    pub fn short_vectors(&self, bound: i64) -> Result<VectorSet, LatticeError> {
        if bound < 1 {
            return Err(LatticeError::InvalidBound);
        }
        let reps = self.enumerate_coset(1, &vec![0; self.rank()], bound)?;
        Ok(VectorSet { bound, reps })
    }

    /// Vectors `v = den*x + offset` with `0 < v^T G v <= bound`, up to sign,
    /// sorted by norm then lexicographically. The coset must be stable under
    /// negation (`2*offset = 0 mod den`), which holds for the uses here
    /// (`den = 1` and parity cosets with `den = 2`).
    pub fn coset_vectors(
        &self,
        den: i64,
        offset: &[i64],
        bound: i64,
    ) -> Result<Vec<(Coords, i64)>, LatticeError> {
        if bound < 1 {
            return Err(LatticeError::InvalidBound);
        }
        self.enumerate_coset(den, offset, bound)
    }

    fn enumerate_coset(
        &self,
        den: i64,
        offset: &[i64],
        bound: i64,
    ) -> Result<Vec<(Coords, i64)>, LatticeError> {
        let n = self.rank();
        if n == 0 {
            return Ok(Vec::new());
        }
        self.gram_i64()?;
        let red = lll::reduce(&self.gram);
        let gred = red.gram.to_i64().ok_or(LatticeError::EntriesTooLarge)?;
        let umat = red.transform.to_i64().ok_or(LatticeError::EntriesTooLarge)?;
        let uinv = red.inverse.to_i64().ok_or(LatticeError::EntriesTooLarge)?;
        // v = y * U for reduced coordinates y; the coset condition
        // v = offset mod den becomes y = offset * Uinv mod den.
        let mut off_red = vec![0i64; n];
        for j in 0..n {
            let mut acc: i128 = 0;
            for i in 0..n {
                acc += i128::from(offset[i]) * i128::from(uinv[i][j]);
            }
            off_red[j] = (acc.rem_euclid(i128::from(den))) as i64;
        }
        // Both signs of every vector appear; canonicalize and dedupe.
        let mut seen: alloc::collections::BTreeSet<(i64, Coords)> =
            alloc::collections::BTreeSet::new();
        fp::enumerate(&gred, den, &off_red, bound, |y, norm| {
            let mut v = vec![0i64; n];
            for j in 0..n {
                let mut acc: i128 = 0;
                for i in 0..n {
                    acc += i128::from(y[i]) * i128::from(umat[i][j]);
                }
                v[j] = i64::try_from(acc).expect("coordinate fits i64");
            }
            if canonical_sign(&mut v) {
                seen.insert((norm, v));
            }
        })
        .map_err(|_| LatticeError::NotPositiveDefinite)?;
        Ok(seen.into_iter().map(|(norm, v)| (v, norm)).collect())
    }

    /// Counts `r_i` of vectors of each norm `0 < i <= bound`, both signs
    /// counted.
    pub fn norm_counts(&self, bound: i64) -> Result<alloc::collections::BTreeMap<i64, u64>, LatticeError> {
        let set = self.short_vectors(bound)?;
        let mut map: alloc::collections::BTreeMap<i64, u64> =
            (1..=bound).map(|i| (i, 0)).collect();
        for (_, norm) in &set.reps {
            *map.get_mut(norm).expect("norm in range") += 2;
        }
        Ok(map)
    }

    /// Index of the span of `gens` in this lattice, or `None` when the span
    /// has deficient rank.
    pub fn sublattice_index(&self, gens: &[Coords]) -> Option<BigInt> {
        let mut acc = Hnf::new(self.rank());
        for g in gens {
            acc.add_row(g.iter().map(|&v| BigInt::from(v)).collect());
        }
        acc.index()
    }

    /// Index check with early exit: true iff `gens` generate the lattice.
    pub fn generated_by(&self, gens: &[Coords]) -> bool {
        let mut acc = Hnf::new(self.rank());
        for g in gens {
            acc.add_row(g.iter().map(|&v| BigInt::from(v)).collect());
            // cheap early exit once the span is everything
            if acc.is_full() {
                return true;
            }
        }
        acc.is_full()
    }
}

/// Express an ambient vector in the coordinates of an embedded lattice:
/// solve `y * basis = den * ambient` over the rationals and return `y` when
/// it is integral (i.e. the vector lies in the lattice).
pub fn ambient_to_lattice_coords(lat: &Lattice, ambient: &[i64]) -> Option<Coords> {
    use num_rational::Ratio;
    let emb = lat.embedding()?;
    let n = lat.rank();
    let b = &emb.basis_num;
    // rational elimination on [B^T | den * ambient]
    let mut a: Vec<Vec<Ratio<BigInt>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Ratio::from_integer(b[(j, i)].clone()))
                .chain(core::iter::once(Ratio::from_integer(
                    BigInt::from(ambient[i]) * &emb.den,
                )))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for j in 0..=n {
            a[col][j] *= &inv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..=n {
                let t = &f * &a[col][j];
                a[i][j] -= t;
            }
        }
    }
    let mut y = vec![0i64; n];
    for i in 0..n {
        if !a[i][n].is_integer() {
            return None;
        }
        y[i] = i64::try_from(&a[i][n].to_integer()).ok()?;
    }
    Some(y)
}

/// Keep `v` or `-v` so that the first nonzero coordinate is positive;
/// returns false for the zero vector.
pub fn canonical_sign(v: &mut [i64]) -> bool {
    match v.iter().find(|&&c| c != 0) {
        None => false,
        Some(&c) => {
            if c < 0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            true
        }
    }
}

/// Complete set of short vectors of a lattice up to sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorSet {
    pub bound: i64,
    /// One representative per pair `{v, -v}`, with its norm; sorted by norm
    /// then lexicographically, zero excluded.
    pub reps: Vec<(Coords, i64)>,
}

impl VectorSet {
    /// Number of representatives of the given norm.
    pub fn rep_count(&self, norm: i64) -> usize {
        self.reps.iter().filter(|(_, m)| *m == norm).count()
    }

    /// `r_i`: number of vectors of the given norm, both signs counted.
    pub fn r(&self, norm: i64) -> u64 {
        2 * self.rep_count(norm) as u64
    }

    pub fn coords(&self) -> Vec<Coords> {
        self.reps.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn reps_of_norm(&self, norm: i64) -> impl Iterator<Item = &Coords> {
        self.reps.iter().filter(move |(_, m)| *m == norm).map(|(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Determinant via Bareiss if all leading principal minors are positive,
/// `None` otherwise. For symmetric input this is exactly positive
/// definiteness.
fn pd_det(gram: &IntMat) -> Option<BigInt> {
    let n = gram.rows();
    if n == 0 {
        return Some(BigInt::one());
    }
    let mut m = gram.clone();
    let mut prev = BigInt::one();
    for k in 0..n {
        if !m[(k, k)].is_positive() {
            return None;
        }
        if k == n - 1 {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[(k, k)] * &m[(i, j)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = num / &prev;
            }
        }
        prev = m[(k, k)].clone();
    }
    Some(m[(n - 1, n - 1)].clone())
}

/// Basis (as HNF rows) of the sublattice `{v in Z^n : v . x = 0 mod d}`.
///
/// Built as the projection of the kernel of `w -> w . (x mod d, d)` on
/// `Z^{n+1}` to the first `n` coordinates, so no coordinate of `x` needs to
/// be a unit mod `d`.
pub fn zn_congruence_basis(x: &[i64], d: u64) -> IntMat {
    let n = x.len();
    if d == 1 {
        return IntMat::identity(n);
    }
    let mut y: Vec<BigInt> = x
        .iter()
        .map(|&v| BigInt::from(v.rem_euclid(d as i64)))
        .chain(core::iter::once(BigInt::from(d)))
        .collect();
    let mut t = IntMat::identity(n + 1);
    loop {
        let mut piv = None;
        for (i, v) in y.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            match piv {
                None => piv = Some(i),
                Some(p) if v.magnitude() < y[p].magnitude() => piv = Some(i),
                _ => {}
            }
        }
        let p = piv.expect("d entry is nonzero");
        let mut done = true;
        for j in 0..=n {
            if j == p || y[j].is_zero() {
                continue;
            }
            let q = num_integer::Integer::div_floor(&y[j], &y[p]);
            if !q.is_zero() {
                let sub = &q * &y[p];
                y[j] -= sub;
            }
            for c in 0..=n {
                let sub = &q * &t[(p, c)];
                t[(j, c)] -= sub;
            }
            if !y[j].is_zero() {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    let mut acc = Hnf::new(n);
    for i in 0..=n {
        if y[i].is_zero() {
            acc.add_row((0..n).map(|c| t[(i, c)].clone()).collect());
        }
    }
    acc.into_matrix()
}
