//! The BV graph invariant.
//!
//! Vertices are the sign pairs of the vectors of norm at most 3; two
//! vertices are joined when the inner product of representatives is odd, so
//! the adjacency matrix is the representative Gram matrix mod 2, loops
//! included for odd-norm vertices. The invariant is the collection of
//! per-vertex multisets of entries of `S = A^2` taken mod 1009, canonically
//! serialized and hashed to 64 bits.
//!
//! Since `A` is 0/1 symmetric, `S[u][v]` is the number of common neighbors
//! `popcount(row_u & row_v)`, computed exactly on bit rows and reduced mod
//! 1009 afterwards; this agrees entry by entry with modular matrix squaring.

use crate::lattice::{Lattice, LatticeError};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub const BV_MODULUS: u32 = 1009;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BvVariant {
    /// Distinct column multisets only. What the searches use.
    SetOfMultisets,
    /// Every column multiset with repetition.
    MultisetOfMultisets,
}

impl BvVariant {
    fn tag(self) -> u8 {
        match self {
            BvVariant::SetOfMultisets => 0,
            BvVariant::MultisetOfMultisets => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BvError {
    VariantMismatch,
    Lattice(LatticeError),
}

impl fmt::Display for BvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BvError::VariantMismatch => f.write_str("comparing different BV variants"),
            BvError::Lattice(e) => write!(f, "{e}"),
        }
    }
}

impl From<LatticeError> for BvError {
    fn from(e: LatticeError) -> Self {
        BvError::Lattice(e)
    }
}

/// Adjacency matrix of the graph on sign pairs of `R_{<=3}`, as bit rows.
#[derive(Clone, Debug)]
pub struct AdjacencyMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl AdjacencyMatrix {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Unordered adjacent pairs of distinct vertices.
    pub fn edge_count(&self) -> u64 {
        let mut ones: u64 = 0;
        let mut loops: u64 = 0;
        for i in 0..self.n {
            for w in 0..self.words {
                ones += u64::from(self.rows[i * self.words + w].count_ones());
            }
            if self.get(i, i) {
                loops += 1;
            }
        }
        (ones - loops) / 2
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }
}

/// Build the mod-2 adjacency matrix from the norm `<= 3` representatives.
pub fn build_graph(lat: &Lattice) -> Result<AdjacencyMatrix, BvError> {
    let reps = lat.short_vectors(3)?;
    let gram = lat.gram_i64()?;
    let n = reps.len();
    let words = n.div_ceil(64).max(1);
    let mut adj = AdjacencyMatrix { n, words, rows: vec![0u64; n * words] };
    for i in 0..n {
        for j in i..n {
            let odd = crate::fp::exact_inner(gram, &reps.reps[i].0, &reps.reps[j].0) & 1 == 1;
            if odd {
                adj.rows[i * words + j / 64] |= 1 << (j % 64);
                adj.rows[j * words + i / 64] |= 1 << (i % 64);
            }
        }
    }
    Ok(adj)
}

/// The canonical invariant: per-vertex column multisets of `A^2 mod 1009`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BvInvariant {
    pub variant: BvVariant,
    pub vertex_count: u32,
    /// Sorted tuples of residues, themselves in lexicographic order;
    /// deduplicated for the set variant.
    pub columns: Vec<Vec<u16>>,
    pub hash64: u64,
}

/// Compute the invariant of a lattice with the given variant.
pub fn bv(lat: &Lattice, variant: BvVariant) -> Result<BvInvariant, BvError> {
    let adj = build_graph(lat)?;
    Ok(bv_of_graph(&adj, variant))
}

/// Compute the invariant with the default (set) variant.
pub fn bv_default(lat: &Lattice) -> Result<BvInvariant, BvError> {
    bv(lat, BvVariant::SetOfMultisets)
}

pub fn bv_of_graph(adj: &AdjacencyMatrix, variant: BvVariant) -> BvInvariant {
    let n = adj.vertex_count();
    let mut columns: Vec<Vec<u16>> = Vec::with_capacity(n);
    for v in 0..n {
        let col: Vec<u16> = (0..n)
            .map(|u| {
                let mut acc: u64 = 0;
                for (a, b) in adj.row(u).iter().zip(adj.row(v)) {
                    acc += u64::from((a & b).count_ones());
                }
                (acc % u64::from(BV_MODULUS)) as u16
            })
            .collect();
        let mut col = col;
        col.sort_unstable();
        columns.push(col);
    }
    columns.sort_unstable();
    if variant == BvVariant::SetOfMultisets {
        columns.dedup();
    }
    let hash64 = hash_columns(n as u32, variant, &columns);
    BvInvariant { variant, vertex_count: n as u32, columns, hash64 }
}

/// FNV-1a over the canonical serialization: vertex count (4 bytes LE),
/// variant byte, then each tuple as 2-byte LE entries closed by 0xFFFF.
fn hash_columns(vertex_count: u32, variant: BvVariant, columns: &[Vec<u16>]) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut h = OFFSET;
    let mut eat = |byte: u8| {
        h ^= u64::from(byte);
        h = h.wrapping_mul(PRIME);
    };
    for b in vertex_count.to_le_bytes() {
        eat(b);
    }
    eat(variant.tag());
    for col in columns {
        for &e in col {
            for b in e.to_le_bytes() {
                eat(b);
            }
        }
        eat(0xff);
        eat(0xff);
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BvComparison {
    Equal,
    Distinct,
    /// Same 64-bit hash, different canonical collections. Must be surfaced:
    /// the searches rely on the hash being fine enough, which can only be
    /// confirmed a posteriori.
    HashCollision,
}

pub fn bv_compare(a: &BvInvariant, b: &BvInvariant) -> Result<BvComparison, BvError> {
    if a.variant != b.variant {
        return Err(BvError::VariantMismatch);
    }
    if a.hash64 != b.hash64 {
        return Ok(BvComparison::Distinct);
    }
    if a.vertex_count == b.vertex_count && a.columns == b.columns {
        Ok(BvComparison::Equal)
    } else {
        Ok(BvComparison::HashCollision)
    }
}

/// Equality with full-invariant confirmation on hash ties.
pub fn bv_equal(a: &BvInvariant, b: &BvInvariant) -> Result<bool, BvError> {
    Ok(bv_compare(a, b)? == BvComparison::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll;
    use crate::matrix::IntMat;
    use crate::neighbors::neighbor;

    #[test]
    fn single_vertex_graph() {
        let l = Lattice::standard(1);
        let adj = build_graph(&l).unwrap();
        assert_eq!(adj.vertex_count(), 1);
        assert!(adj.get(0, 0));
        assert_eq!(adj.edge_count(), 0);
        let inv = bv_default(&l).unwrap();
        assert_eq!(inv.columns, vec![vec![1u16]]);
    }

    #[test]
    fn e8_graph_statistics() {
        let e8 = neighbor(2, &[1; 8], Some(0)).unwrap();
        let adj = build_graph(&e8).unwrap();
        assert_eq!(adj.vertex_count(), 120);
        for i in 0..120 {
            assert!(!adj.get(i, i), "even lattice has no loops");
            let deg = (0..120).filter(|&j| adj.get(i, j)).count();
            assert_eq!(deg, 56);
        }
        assert_eq!(adj.edge_count(), 56 * 120 / 2);
        let inv = bv(&e8, BvVariant::SetOfMultisets).unwrap();
        // vertex-transitive: all columns identical
        assert_eq!(inv.columns.len(), 1);
        assert!(inv.columns[0].contains(&56));
        let full = bv(&e8, BvVariant::MultisetOfMultisets).unwrap();
        assert_eq!(full.columns.len(), 120);
    }

    #[test]
    fn eps_classes_of_one_line_agree() {
        let a = bv_default(&neighbor(2, &[1; 8], Some(0)).unwrap()).unwrap();
        let b = bv_default(&neighbor(2, &[1; 8], Some(1)).unwrap()).unwrap();
        assert_eq!(bv_compare(&a, &b).unwrap(), BvComparison::Equal);
        assert_eq!(a.hash64, b.hash64);
    }

    #[test]
    fn different_vertex_counts_are_distinct() {
        let a = bv_default(&Lattice::standard(4)).unwrap();
        let b = bv_default(&Lattice::standard(5)).unwrap();
        assert_eq!(bv_compare(&a, &b).unwrap(), BvComparison::Distinct);
        assert!(!bv_equal(&a, &b).unwrap());
    }

    #[test]
    fn variant_mismatch_is_an_error() {
        let a = bv(&Lattice::standard(2), BvVariant::SetOfMultisets).unwrap();
        let b = bv(&Lattice::standard(2), BvVariant::MultisetOfMultisets).unwrap();
        assert_eq!(bv_compare(&a, &b).unwrap_err(), BvError::VariantMismatch);
    }

    #[test]
    fn invariant_under_base_change() {
        // push a lattice through random unimodular transforms
        let base = neighbor(4, &[1, 1, 1, 1, 2], Some(0)).unwrap();
        let reference = bv_default(&base).unwrap();
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..5 {
            // random product of elementary row operations
            let mut u = IntMat::identity(5);
            for _ in 0..6 {
                let i = (next() % 5) as usize;
                let j = (next() % 5) as usize;
                if i == j {
                    continue;
                }
                let c = (next() % 3) as i64 - 1;
                for k in 0..5 {
                    let t = &u[(j, k)] * num_bigint::BigInt::from(c);
                    u[(i, k)] += t;
                }
            }
            let g = u.conjugate(base.gram());
            let lat = Lattice::from_gram(g).unwrap();
            let inv = bv_default(&lat).unwrap();
            assert_eq!(bv_compare(&reference, &inv).unwrap(), BvComparison::Equal);
        }
    }

    #[test]
    fn mod_reduction_matches_integer_counts_below_modulus() {
        // vertex count below 1009: integer common-neighbor counts survive
        // reduction untouched, so sorting commutes with the mod
        let lat = neighbor(3, &[1, 1, 1], None).unwrap();
        let adj = build_graph(&lat).unwrap();
        assert!(adj.vertex_count() < 1009);
        let inv = bv_of_graph(&adj, BvVariant::MultisetOfMultisets);
        for v in 0..adj.vertex_count() {
            let mut ints: Vec<u64> = (0..adj.vertex_count())
                .map(|u| {
                    (0..adj.vertex_count())
                        .filter(|&k| adj.get(u, k) && adj.get(k, v))
                        .count() as u64
                })
                .collect();
            ints.sort_unstable();
            let reduced: Vec<u16> = ints.iter().map(|&x| (x % 1009) as u16).collect();
            assert!(inv.columns.contains(&reduced));
        }
    }

    #[test]
    fn lll_stability() {
        // same lattice, reduced basis: identical invariant
        let lat = neighbor(5, &[1, 2, 3, 4, 5], None).unwrap();
        let red = lll::reduce(lat.gram());
        let lat2 = Lattice::from_gram(red.gram).unwrap();
        let a = bv_default(&lat).unwrap();
        let b = bv_default(&lat2).unwrap();
        assert_eq!(bv_compare(&a, &b).unwrap(), BvComparison::Equal);
    }
}
