//! Characteristic vectors, exceptional lattices, even parts and companions.
//!
//! A characteristic vector of an integral lattice `L` is `xi` with
//! `xi.v = v.v mod 2` for all `v`. For odd unimodular `L` they form a single
//! coset of `2L`, with norms `= n mod 8`; the ones of norm below 8 make up
//! `Exc(L)`. In ranks `n = 4 mod 8` an odd unimodular lattice shares its
//! even part with exactly two companions, and an exceptional lattice with no
//! norm-1 vectors has a distinguished singular companion carrying norm-1
//! vectors.

use crate::lattice::{Lattice, LatticeError};
use crate::matrix::{Gf2Mat, Hnf, IntMat};
use crate::{Coords, Rational};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharError {
    /// The notion trivializes on even lattices; inputs are rejected.
    EvenLattice,
    NotUnimodular,
    /// Companions exist only in ranks `n = 4 mod 8`.
    RankNot4Mod8,
    Lattice(LatticeError),
}

impl fmt::Display for CharError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharError::EvenLattice => f.write_str("even lattice rejected"),
            CharError::NotUnimodular => f.write_str("lattice must be unimodular"),
            CharError::RankNot4Mod8 => f.write_str("rank must be 4 mod 8"),
            CharError::Lattice(e) => write!(f, "{e}"),
        }
    }
}

impl From<LatticeError> for CharError {
    fn from(e: LatticeError) -> Self {
        CharError::Lattice(e)
    }
}

/// Characteristic vectors of norm up to the requested bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharVectorReport {
    /// Representatives up to sign, with norms, sorted by norm then lex.
    pub vectors: Vec<(Coords, i64)>,
    /// `|Exc(L)|`: characteristic vectors of norm < 8, both signs counted.
    /// Only complete when the report was computed with bound >= 7.
    pub exc_size: u64,
    pub min_char_norm: Option<i64>,
}

/// The characteristic coset representative: any `c` with
/// `G c = diag(G) mod 2`. Unique mod 2 for unimodular `G`.
fn char_offset(lat: &Lattice) -> Result<Vec<i64>, CharError> {
    if lat.is_even() {
        return Err(CharError::EvenLattice);
    }
    if !lat.is_unimodular() {
        return Err(CharError::NotUnimodular);
    }
    let n = lat.rank();
    let mut a = Gf2Mat::zero(n, n);
    let mut b = vec![false; n];
    let two = BigInt::from(2);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, (&lat.gram()[(i, j)] % &two).is_odd());
        }
        b[i] = (&lat.gram()[(i, i)] % &two).is_odd();
    }
    let sol = a.solve(&b).expect("unimodular gram is invertible mod 2");
    Ok(sol.into_iter().map(i64::from).collect())
}

/// All characteristic vectors of norm `<= bound`, up to sign.
pub fn characteristic_vectors(lat: &Lattice, bound: i64) -> Result<CharVectorReport, CharError> {
    let offset = char_offset(lat)?;
    let vectors = if bound >= 1 { lat.coset_vectors(2, &offset, bound)? } else { Vec::new() };
    let exc_size = 2 * vectors.iter().filter(|(_, norm)| *norm < 8).count() as u64;
    let min_char_norm = vectors.first().map(|(_, norm)| *norm);
    Ok(CharVectorReport { vectors, exc_size, min_char_norm })
}

/// True iff a characteristic vector of norm < 8 exists.
pub fn is_exceptional(lat: &Lattice) -> Result<bool, CharError> {
    Ok(characteristic_vectors(lat, 7)?.exc_size > 0)
}

/// The even part: `{x in L : x.x = 0 mod 2}`. Returns `(lattice, true)`
/// unchanged when `L` is already even. When `L` carries an embedding into
/// `Q^n` the even part inherits the composed one.
pub fn even_part(lat: &Lattice) -> (Lattice, bool) {
    let (even, basis, was_even) = even_part_with_basis(lat);
    if was_even {
        return (even, true);
    }
    let even = match lat.embedding() {
        Some(emb) => even
            .with_embedding(basis.mul(&emb.basis_num), emb.den.clone())
            .expect("composed embedding reproduces the gram"),
        None => even,
    };
    (even, false)
}

/// Even part plus its basis expressed in `L`-coordinates.
fn even_part_with_basis(lat: &Lattice) -> (Lattice, IntMat, bool) {
    let n = lat.rank();
    if lat.is_even() {
        return (lat.clone(), IntMat::identity(n), true);
    }
    // v.v mod 2 is linear: the parity functional g = diag(G) mod 2.
    let g: Vec<i64> = (0..n)
        .map(|i| i64::from((&lat.gram()[(i, i)] % BigInt::from(2)).is_odd()))
        .collect();
    let basis = crate::lattice::zn_congruence_basis(&g, 2);
    let gram = basis.conjugate(lat.gram());
    let even = Lattice::from_gram(gram).expect("sublattice of PD form is PD");
    (even, basis, false)
}

/// All integral unimodular overlattices of index 2 of a determinant-4
/// lattice, each tagged by its glue class: the nonzero kernel vectors `u` of
/// the Gram matrix mod 2 with `u^T G u = 0 mod 4` give `M + (u/2) Z`.
pub fn index2_unimodular_overlattices(m: &Lattice) -> Vec<(Vec<bool>, Lattice)> {
    let n = m.rank();
    let two = BigInt::from(2);
    let four = BigInt::from(4);
    let mut a = Gf2Mat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, (&m.gram()[(i, j)] % &two).is_odd());
        }
    }
    let kernel = a.kernel();
    let mut classes: Vec<Vec<bool>> = Vec::new();
    match kernel.len() {
        1 => classes.push(kernel[0].clone()),
        2 => {
            classes.push(kernel[0].clone());
            classes.push(kernel[1].clone());
            classes.push(kernel[0].iter().zip(&kernel[1]).map(|(&x, &y)| x ^ y).collect());
        }
        k => panic!("determinant-4 lattice has 2-torsion rank {k}"),
    }
    let mut out = Vec::new();
    for u in classes {
        let ui: Vec<BigInt> =
            u.iter().map(|&b| if b { BigInt::one() } else { BigInt::zero() }).collect();
        // integrality: (u/2).(u/2) in Z
        let mut q = BigInt::zero();
        for i in 0..n {
            for j in 0..n {
                if u[i] && u[j] {
                    q += &m.gram()[(i, j)];
                }
            }
        }
        if !(&q % &four).is_zero() {
            continue;
        }
        let mut acc = Hnf::new(n);
        for i in 0..n {
            let mut row = vec![BigInt::zero(); n];
            row[i] = two.clone();
            acc.add_row(row);
        }
        acc.add_row(ui);
        let basis = acc.into_matrix();
        let scaled = basis.conjugate(m.gram());
        let mut gram = IntMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let (div, rem) = scaled[(i, j)].div_rem(&four);
                assert!(rem.is_zero(), "overlattice gram must be integral");
                gram[(i, j)] = div;
            }
        }
        let lat = Lattice::from_gram(gram).expect("overlattice of PD form is PD");
        debug_assert!(lat.is_unimodular());
        out.push((u, lat));
    }
    out
}

/// The two other odd unimodular lattices sharing `L`'s even part
/// (rank `n = 4 mod 8` only).
pub fn companions(lat: &Lattice) -> Result<[Lattice; 2], CharError> {
    if lat.rank() % 8 != 4 {
        return Err(CharError::RankNot4Mod8);
    }
    if lat.is_even() {
        return Err(CharError::EvenLattice);
    }
    if !lat.is_unimodular() {
        return Err(CharError::NotUnimodular);
    }
    let (even, e_basis, _) = even_part_with_basis(lat);
    // L's own glue class: for a basis vector of odd norm, 2*e_i lies in the
    // even part; its coordinates there mod 2 identify the coset of L.
    let n = lat.rank();
    let i_odd = (0..n)
        .find(|&i| (&lat.gram()[(i, i)] % BigInt::from(2)).is_odd())
        .expect("odd lattice has an odd basis vector");
    let mut target = vec![BigInt::zero(); n];
    target[i_odd] = BigInt::from(2);
    let y = solve_upper_triangular(&e_basis, &target);
    let own: Vec<bool> = y.iter().map(|v| (v % BigInt::from(2)).is_odd()).collect();
    let mut found = Vec::new();
    for (tag, over) in index2_unimodular_overlattices(&even) {
        if tag != own {
            found.push(over);
        }
    }
    let pair: [Lattice; 2] =
        found.try_into().map_err(|_| ()).expect("rank 4 mod 8 gives exactly two companions");
    Ok(pair)
}

/// The unique companion with norm-1 vectors, for exceptional `L` with
/// `r_1(L) = 0`; `None` when `L` is not exceptional.
pub fn singular_companion(lat: &Lattice) -> Result<Option<Lattice>, CharError> {
    if !is_exceptional(lat)? {
        return Ok(None);
    }
    let pair = companions(lat)?;
    let with_units: Vec<Lattice> = pair
        .into_iter()
        .filter(|c| !c.short_vectors(1).expect("bound 1").is_empty())
        .collect();
    let mut it = with_units.into_iter();
    let sing = it.next().expect("exceptional lattice has a singular companion");
    assert!(it.next().is_none(), "singular companion is unique");
    Ok(Some(sing))
}

/// The lower bound `(4n^3 - n) / (3p^2)` for norms of characteristic vectors
/// of `p`-neighbors with empty visible root system.
pub fn lemma_char_norm_bound(n: u64, p: u64) -> Rational {
    let num = BigInt::from(4) * BigInt::from(n).pow(3) - BigInt::from(n);
    let den = BigInt::from(3) * BigInt::from(p) * BigInt::from(p);
    Rational::new(num, den)
}

/// Solve `y * B = v` for upper-triangular `B` (HNF basis rows) with an exact
/// integer solution; panics if none exists.
fn solve_upper_triangular(b: &IntMat, v: &[BigInt]) -> Vec<BigInt> {
    let n = b.rows();
    let mut y = vec![BigInt::zero(); n];
    for j in 0..n {
        let mut acc = v[j].clone();
        for i in 0..j {
            acc -= &y[i] * &b[(i, j)];
        }
        let (q, r) = acc.div_rem(&b[(j, j)]);
        assert!(r.is_zero(), "vector not in the row span");
        y[j] = q;
    }
    y
}
