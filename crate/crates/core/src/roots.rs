//! ADE root systems: identification from a lattice, Weyl group orders, the
//! standard root lattices, and the text grammar used in tables and lists.
//!
//! Roots always have norm 2. Components are identified from (rank, root
//! count) alone, which separates all ADE types once the conventions
//! `D_2 = 2A_1` and `D_3 = A_3` are applied; no Dynkin diagrams are needed.

use crate::lattice::{zn_congruence_basis, Lattice};
use crate::matrix::IntMat;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_traits::One;

/// An irreducible ADE symbol. Ordering is by rank, then root count, then
/// letter (A < D < E), matching the canonical serialization order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSymbol {
    A(u32),
    D(u32),
    E(u32),
}

impl RootSymbol {
    pub fn rank(self) -> u32 {
        match self {
            RootSymbol::A(k) | RootSymbol::D(k) | RootSymbol::E(k) => k,
        }
    }

    pub fn root_count(self) -> u64 {
        match self {
            RootSymbol::A(k) => u64::from(k) * (u64::from(k) + 1),
            RootSymbol::D(k) => 2 * u64::from(k) * (u64::from(k) - 1),
            RootSymbol::E(6) => 72,
            RootSymbol::E(7) => 126,
            RootSymbol::E(8) => 240,
            RootSymbol::E(_) => unreachable!("only E6, E7, E8 exist"),
        }
    }

    pub fn weyl_order(self) -> BigInt {
        fn factorial(k: u64) -> BigInt {
            (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
        }
        match self {
            RootSymbol::A(k) => factorial(u64::from(k) + 1),
            RootSymbol::D(k) => (BigInt::one() << (k - 1)) * factorial(u64::from(k)),
            RootSymbol::E(6) => BigInt::from(51840u64),
            RootSymbol::E(7) => BigInt::from(2903040u64),
            RootSymbol::E(8) => BigInt::from(696729600u64),
            RootSymbol::E(_) => unreachable!(),
        }
    }

    fn letter_rank(self) -> (u32, u8) {
        match self {
            RootSymbol::A(k) => (k, 0),
            RootSymbol::D(k) => (k, 1),
            RootSymbol::E(k) => (k, 2),
        }
    }

    fn sort_key(self) -> (u32, u64, u8) {
        let (rank, letter) = self.letter_rank();
        (rank, self.root_count(), letter)
    }

    /// Validity under the crate conventions: `A_k` with `k >= 1`, `D_k` with
    /// `k >= 4` (smaller D are renamed), `E_6`, `E_7`, `E_8`.
    pub fn is_canonical(self) -> bool {
        match self {
            RootSymbol::A(k) => k >= 1,
            RootSymbol::D(k) => k >= 4,
            RootSymbol::E(k) => (6..=8).contains(&k),
        }
    }
}

impl PartialOrd for RootSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for RootSymbol {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for RootSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSymbol::A(k) => write!(f, "A{k}"),
            RootSymbol::D(k) => write!(f, "D{k}"),
            RootSymbol::E(k) => write!(f, "E{k}"),
        }
    }
}

/// A multiset of irreducible ADE components.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct RootSystem {
    components: BTreeMap<RootSymbol, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSystemError {
    /// A connected root component whose (rank, count) matches no ADE type:
    /// impossible for integral lattices, so it signals a bug.
    Unidentifiable { rank: usize, count: u64 },
    /// Malformed symbol text.
    Parse(String),
}

impl fmt::Display for RootSystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSystemError::Unidentifiable { rank, count } => {
                write!(f, "no ADE type with rank {rank} and {count} roots")
            }
            RootSystemError::Parse(s) => write!(f, "bad root system symbol: {s}"),
        }
    }
}

impl RootSystem {
    pub fn empty() -> Self {
        RootSystem::default()
    }

    /// Add a component, applying the `A_0 = D_0 = D_1 = empty`, `D_2 = 2A_1`,
    /// `D_3 = A_3` conventions.
    pub fn push(&mut self, symbol: RootSymbol, mult: u32) {
        if mult == 0 {
            return;
        }
        match symbol {
            RootSymbol::A(0) | RootSymbol::D(0) | RootSymbol::D(1) => {}
            RootSymbol::D(2) => *self.components.entry(RootSymbol::A(1)).or_insert(0) += 2 * mult,
            RootSymbol::D(3) => *self.components.entry(RootSymbol::A(3)).or_insert(0) += mult,
            s => *self.components.entry(s).or_insert(0) += mult,
        }
    }

    pub fn single(symbol: RootSymbol) -> Self {
        let mut r = RootSystem::empty();
        r.push(symbol, 1);
        r
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Components in canonical order with multiplicities.
    pub fn components(&self) -> impl Iterator<Item = (RootSymbol, u32)> + '_ {
        self.components.iter().map(|(&s, &m)| (s, m))
    }

    pub fn total_rank(&self) -> u64 {
        self.components().map(|(s, m)| u64::from(s.rank()) * u64::from(m)).sum()
    }

    pub fn total_roots(&self) -> u64 {
        self.components().map(|(s, m)| s.root_count() * u64::from(m)).sum()
    }

    /// `|W|`: product of the component Weyl orders.
    pub fn weyl_order(&self) -> BigInt {
        let mut acc = BigInt::one();
        for (s, m) in self.components() {
            for _ in 0..m {
                acc *= s.weyl_order();
            }
        }
        acc
    }

    /// Componentwise containment as multisets.
    pub fn contains(&self, other: &RootSystem) -> bool {
        other
            .components()
            .all(|(s, m)| self.components.get(&s).copied().unwrap_or(0) >= m)
    }
}

impl fmt::Display for RootSystem {
    /// Grammar: terms joined by `+`, multiplicity prefix, e.g. `8A1+2A2`;
    /// `0` for the empty system.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (s, m) in self.components() {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            if m > 1 {
                write!(f, "{m}")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for RootSystem {
    type Err = RootSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(RootSystem::empty());
        }
        let mut out = RootSystem::empty();
        for term in s.split('+') {
            let term = term.trim();
            let bad = || RootSystemError::Parse(String::from(term));
            let letter_pos = term.find(|c| matches!(c, 'A' | 'D' | 'E')).ok_or_else(bad)?;
            let (mult_s, rest) = term.split_at(letter_pos);
            let mult: u32 =
                if mult_s.is_empty() { 1 } else { mult_s.parse().map_err(|_| bad())? };
            let rank: u32 = rest[1..].parse().map_err(|_| bad())?;
            let symbol = match rest.as_bytes()[0] {
                b'A' if rank >= 1 => RootSymbol::A(rank),
                b'D' if rank >= 2 => RootSymbol::D(rank),
                b'E' if (6..=8).contains(&rank) => RootSymbol::E(rank),
                _ => return Err(bad()),
            };
            out.push(symbol, mult);
        }
        Ok(out)
    }
}

/// Decompose the norm-2 vectors of `L` into irreducible ADE components.
pub fn root_system(lat: &Lattice) -> Result<RootSystem, RootSystemError> {
    let roots = lat.short_vectors(2).expect("valid lattice");
    let reps: Vec<_> = roots.reps_of_norm(2).cloned().collect();
    let gram = lat.gram_i64().expect("desk-scale gram");
    identify_components(&reps, |u, v| crate::fp::exact_inner(gram, u, v))
}

/// Group root representatives into connected components under
/// non-orthogonality and identify each by (rank, root count).
pub fn identify_components(
    reps: &[Vec<i64>],
    inner: impl Fn(&[i64], &[i64]) -> i128,
) -> Result<RootSystem, RootSystemError> {
    let m = reps.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..m {
        for j in i + 1..m {
            if inner(&reps[i], &reps[j]) != 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out = RootSystem::empty();
    for group in groups.values() {
        let rows: Vec<Vec<BigInt>> = group
            .iter()
            .map(|&i| reps[i].iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        let rank = IntMat::from_rows(rows).rank();
        let count = 2 * group.len() as u64;
        let symbol = identify_one(rank, count)
            .ok_or(RootSystemError::Unidentifiable { rank, count })?;
        out.push(symbol, 1);
    }
    Ok(out)
}

fn identify_one(rank: usize, count: u64) -> Option<RootSymbol> {
    let k = rank as u64;
    if count == k * (k + 1) {
        return Some(RootSymbol::A(rank as u32));
    }
    if k >= 2 && count == 2 * k * (k - 1) {
        return Some(RootSymbol::D(rank as u32));
    }
    match (rank, count) {
        (6, 72) => Some(RootSymbol::E(6)),
        (7, 126) => Some(RootSymbol::E(7)),
        (8, 240) => Some(RootSymbol::E(8)),
        _ => None,
    }
}

/// Gram matrix of the standard root lattice `Q(S)`.
///
/// `A_k`, `E_6`, `E_7`, `E_8` use the simple-root basis (the Cartan matrix);
/// `D_k` is realized as the even-coordinate-sum sublattice of `Z^k`.
pub fn standard_root_lattice(symbol: RootSymbol) -> Result<Lattice, RootSystemError> {
    let bad = RootSystemError::Parse(alloc::format!("{symbol}"));
    match symbol {
        RootSymbol::A(k) if k >= 1 => {
            let n = k as usize;
            let mut g = IntMat::zero(n, n);
            for i in 0..n {
                g[(i, i)] = BigInt::from(2);
                if i + 1 < n {
                    g[(i, i + 1)] = BigInt::from(-1);
                    g[(i + 1, i)] = BigInt::from(-1);
                }
            }
            Ok(Lattice::from_gram(g).expect("Cartan matrix is PD"))
        }
        RootSymbol::D(k) if k >= 2 => {
            let basis = zn_congruence_basis(&vec![1; k as usize], 2);
            let gram = basis.mul(&basis.transpose());
            Ok(Lattice::from_gram(gram)
                .expect("PD")
                .with_embedding(basis, BigInt::one())
                .expect("exact embedding"))
        }
        RootSymbol::E(k @ 6..=8) => {
            let e8: [[i64; 8]; 8] = [
                [2, 0, -1, 0, 0, 0, 0, 0],
                [0, 2, 0, -1, 0, 0, 0, 0],
                [-1, 0, 2, -1, 0, 0, 0, 0],
                [0, -1, -1, 2, -1, 0, 0, 0],
                [0, 0, 0, -1, 2, -1, 0, 0],
                [0, 0, 0, 0, -1, 2, -1, 0],
                [0, 0, 0, 0, 0, -1, 2, -1],
                [0, 0, 0, 0, 0, 0, -1, 2],
            ];
            let n = k as usize;
            let rows: Vec<Vec<i64>> =
                (0..n).map(|i| (0..n).map(|j| e8[i][j]).collect()).collect();
            Ok(Lattice::from_i64_gram(&rows).expect("Cartan matrix is PD"))
        }
        _ => Err(bad),
    }
}
