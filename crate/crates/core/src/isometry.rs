//! Automorphism group orders and isometry testing by backtracking over
//! short vectors.
//!
//! An isometry is pinned down by the images of a basis among vectors of the
//! matching norms. The backtracker prunes candidates by norm, by a
//! fingerprint (the multiset of inner products against the whole short
//! vector pool), and by inner products with the images already chosen. The
//! group order comes from the orbit-stabilizer chain over a fixed base: the
//! order is the product over base vectors of the orbit sizes under the
//! successive stabilizers, each orbit determined exactly by exhaustive
//! searches, with already-found generators used to close orbits cheaply.

use crate::lattice::{Lattice, LatticeError};
use crate::matrix::{inverse_unimodular, IntMat};
use crate::reduce::{basis_max_norm, best_basis};
use crate::roots::root_system;
use crate::Rational;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsomError {
    /// No bound `<= 8` whose short vectors generate the lattice.
    NoGeneratingBound,
    Lattice(LatticeError),
}

impl fmt::Display for IsomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsomError::NoGeneratingBound => {
                f.write_str("short vectors up to norm 8 do not generate the lattice")
            }
            IsomError::Lattice(e) => write!(f, "{e}"),
        }
    }
}

impl From<LatticeError> for IsomError {
    fn from(e: LatticeError) -> Self {
        IsomError::Lattice(e)
    }
}

#[derive(Clone, Debug)]
pub struct AutOrderReport {
    pub order: BigInt,
    /// `order / |W(R_2(L))|`.
    pub reduced_order: BigInt,
    /// `|W(R_2(L))| / order`, the reduced mass.
    pub reduced_mass: Rational,
}

/// Smallest bound `<= 8` whose short vectors generate the lattice.
fn generating_bound(lat: &Lattice) -> Result<i64, IsomError> {
    for b in 1..=8 {
        let pool = lat.short_vectors(b)?;
        if lat.generated_by(&pool.coords()) {
            return Ok(b);
        }
    }
    Err(IsomError::NoGeneratingBound)
}

/// Signed pool with norms and fingerprint classes.
struct Pool {
    vectors: Vec<Vec<i64>>,
    norms: Vec<i64>,
    /// fingerprint class id per signed vector
    classes: Vec<u32>,
    /// canonical fingerprint -> class id
    class_map: BTreeMap<Vec<(i64, u32)>, u32>,
    /// representatives the fingerprints are computed against
    fp_reps: Vec<(Vec<i64>, i64)>,
}

/// Isometry-invariant fingerprint reference set: all representatives up to
/// the smallest norm cutoff that accumulates at least 64 of them (or the
/// whole list). Keeps fingerprinting quadratic in a bounded prefix instead
/// of the full pool.
fn fingerprint_reps(reps: &[(Vec<i64>, i64)]) -> Vec<(Vec<i64>, i64)> {
    if reps.len() <= 64 {
        return reps.to_vec();
    }
    let cutoff = reps[63].1;
    // extend to the end of that norm class
    let upto = reps.iter().take_while(|(_, norm)| *norm <= cutoff).count();
    reps[..upto].to_vec()
}

impl Pool {
    /// Build from the representative list of a lattice.
    fn build(lat: &Lattice, bound: i64) -> Result<Pool, IsomError> {
        let reps = lat.short_vectors(bound)?;
        let gram = lat.gram_i64()?;
        let fp_reps = fingerprint_reps(&reps.reps);
        let mut class_map = BTreeMap::new();
        let mut vectors = Vec::with_capacity(reps.len() * 2);
        let mut norms = Vec::with_capacity(reps.len() * 2);
        let mut classes = Vec::with_capacity(reps.len() * 2);
        for (v, norm) in &reps.reps {
            let fp = fingerprint(gram, v, &fp_reps);
            let next = class_map.len() as u32;
            let id = *class_map.entry(fp).or_insert(next);
            let neg: Vec<i64> = v.iter().map(|&c| -c).collect();
            vectors.push(v.clone());
            norms.push(*norm);
            classes.push(id);
            vectors.push(neg);
            norms.push(*norm);
            classes.push(id);
        }
        Ok(Pool { vectors, norms, classes, class_map, fp_reps })
    }

    /// Class id of an arbitrary vector, fingerprinted against `fp_src` (the
    /// source-side reference set, which must mirror this pool's).
    fn class_of(&self, gram: &[Vec<i64>], v: &[i64], fp_src: &[(Vec<i64>, i64)]) -> Option<u32> {
        self.class_map.get(&fingerprint(gram, v, fp_src)).copied()
    }
}

/// Sign-invariant fingerprint: sorted multiset of |v.u| over the reference
/// representatives.
fn fingerprint(gram: &[Vec<i64>], v: &[i64], reps: &[(Vec<i64>, i64)]) -> Vec<(i64, u32)> {
    let mut counts: BTreeMap<i64, u32> = BTreeMap::new();
    for (u, _) in reps {
        let p = crate::fp::exact_inner(gram, v, u).unsigned_abs();
        *counts.entry(i64::try_from(p).expect("inner product fits")).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Backtracking context: find maps from a fixed source basis into a target
/// pool that preserve all inner products.
struct Searcher<'a> {
    /// pairwise inner products of the source basis
    base_gram: Vec<Vec<i64>>,
    pool: &'a Pool,
    target_gram: &'a [Vec<i64>],
    /// per level, pool indices with matching norm and fingerprint class
    cand: Vec<Vec<u32>>,
}

impl<'a> Searcher<'a> {
    /// Depth-first completion of `imgs` (entries below `from` fixed): true
    /// once a full gram-preserving assignment exists; `imgs` then holds it.
    fn extend(&self, imgs: &mut Vec<Vec<i64>>, from: usize) -> bool {
        let n = self.base_gram.len();
        if from == n {
            return true;
        }
        'cands: for &ci in &self.cand[from] {
            let w = &self.pool.vectors[ci as usize];
            for l in 0..from {
                let need = self.base_gram[from][l];
                let got = crate::fp::exact_inner(self.target_gram, w, &imgs[l]);
                if got != i128::from(need) {
                    continue 'cands;
                }
            }
            imgs.push(w.clone());
            if self.extend(imgs, from + 1) {
                return true;
            }
            imgs.pop();
        }
        false
    }
}

/// The automorphism group order of `L`, with a generating set of isometries
/// (as matrices acting on row coordinate vectors).
pub fn aut_order_with_generators(lat: &Lattice) -> Result<(AutOrderReport, Vec<IntMat>), IsomError> {
    let n = lat.rank();
    if n == 0 {
        let one = BigInt::one();
        return Ok((
            AutOrderReport {
                order: one.clone(),
                reduced_order: one.clone(),
                reduced_mass: Rational::one(),
            },
            Vec::new(),
        ));
    }
    let b = generating_bound(lat)?;
    let (basis, m_basis) = best_basis(lat, 2000, 0x6b);
    let pool_bound = b.max(basis_max_norm(lat, &basis).max(m_basis));
    let pool = Pool::build(lat, pool_bound)?;
    let gram = lat.gram_i64()?;

    let mut base: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i64::try_from(&basis[(i, j)]).expect("desk-scale basis"))
                .collect()
        })
        .collect();
    // most-constrained-first: order base vectors by candidate class size
    let mut class_sizes: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in &pool.classes {
        *class_sizes.entry(c).or_insert(0) += 1;
    }
    let fp_src = pool.fp_reps.clone();
    base.sort_by_key(|v| {
        pool.class_of(gram, v, &fp_src).map(|c| class_sizes[&c]).unwrap_or(usize::MAX)
    });

    let base_gram: Vec<Vec<i64>> = base
        .iter()
        .map(|u| {
            base.iter()
                .map(|v| i64::try_from(crate::fp::exact_inner(gram, u, v)).expect("fits"))
                .collect()
        })
        .collect();
    let cand: Vec<Vec<u32>> = base
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let class = pool.class_of(gram, v, &fp_src).expect("basis vector is in pool");
            (0..pool.vectors.len() as u32)
                .filter(|&ci| {
                    pool.norms[ci as usize] == base_gram[i][i]
                        && pool.classes[ci as usize] == class
                })
                .collect()
        })
        .collect();
    let searcher = Searcher { base_gram: base_gram.clone(), pool: &pool, target_gram: gram, cand };

    let base_mat = IntMat::from_i64_rows(&base);
    let base_inv = inverse_unimodular(&base_mat);
    let to_matrix = |imgs: &[Vec<i64>]| -> IntMat {
        base_inv.mul(&IntMat::from_i64_rows(imgs))
    };

    // -1 is always an isometry; seed the generator list with it.
    let mut gens: Vec<IntMat> = vec![{
        let mut m = IntMat::identity(n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(-1);
        }
        m
    }];
    let mut order = BigInt::one();
    for i in 0..n {
        // generators known to fix the prefix e_0..e_{i-1}
        let fixing: Vec<&IntMat> = gens
            .iter()
            .filter(|g| (0..i).all(|l| apply(g, &base[l]) == base[l]))
            .collect();
        let mut orbit: BTreeSet<Vec<i64>> = BTreeSet::new();
        orbit.insert(base[i].clone());
        close_orbit(&mut orbit, &fixing);
        // candidates consistent with the fixed prefix
        let consistent: Vec<u32> = searcher.cand[i]
            .iter()
            .copied()
            .filter(|&ci| {
                let w = &pool.vectors[ci as usize];
                (0..i).all(|l| {
                    crate::fp::exact_inner(gram, w, &base[l])
                        == i128::from(base_gram[i][l])
                })
            })
            .collect();
        for &ci in &consistent {
            let w = pool.vectors[ci as usize].clone();
            if orbit.contains(&w) {
                continue;
            }
            let mut imgs: Vec<Vec<i64>> = base[..i].to_vec();
            imgs.push(w.clone());
            if searcher.extend(&mut imgs, i + 1) {
                let g = to_matrix(&imgs);
                debug_assert_eq!(g.conjugate(lat.gram()), *lat.gram());
                gens.push(g);
                let fixing: Vec<&IntMat> = gens
                    .iter()
                    .filter(|g| (0..i).all(|l| apply(g, &base[l]) == base[l]))
                    .collect();
                close_orbit(&mut orbit, &fixing);
            }
        }
        order *= BigInt::from(orbit.len() as u64);
    }

    let weyl = root_system(lat)
        .expect("valid lattice")
        .weyl_order();
    let (reduced_order, rem) = order.div_rem(&weyl);
    assert!(rem.is_zero(), "Weyl group order divides the isometry group order");
    let reduced_mass = Rational::new(weyl, order.clone());
    Ok((AutOrderReport { order, reduced_order, reduced_mass }, gens))
}

/// The automorphism group order report alone.
pub fn aut_order(lat: &Lattice) -> Result<AutOrderReport, IsomError> {
    Ok(aut_order_with_generators(lat)?.0)
}

/// Reduced mass `|W(L)|/|O(L)|` of a lattice.
pub fn reduced_mass(lat: &Lattice) -> Result<Rational, IsomError> {
    Ok(aut_order(lat)?.reduced_mass)
}

fn apply(g: &IntMat, v: &[i64]) -> Vec<i64> {
    let n = v.len();
    (0..n)
        .map(|j| {
            let mut acc = BigInt::zero();
            for i in 0..n {
                if v[i] != 0 {
                    acc += BigInt::from(v[i]) * &g[(i, j)];
                }
            }
            i64::try_from(&acc).expect("orbit vector fits")
        })
        .collect()
}

fn close_orbit(orbit: &mut BTreeSet<Vec<i64>>, gens: &[&IntMat]) {
    let mut frontier: Vec<Vec<i64>> = orbit.iter().cloned().collect();
    while let Some(v) = frontier.pop() {
        for g in gens {
            let w = apply(g, &v);
            if orbit.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
}

/// Decide whether two lattices are isometric; cheap invariants first, then a
/// backtracking search for a single gram-preserving basis image.
pub fn isometric(a: &Lattice, b: &Lattice) -> Result<bool, IsomError> {
    if a.rank() != b.rank() {
        return Ok(false);
    }
    if a.det() != b.det() {
        return Ok(false);
    }
    let n = a.rank();
    if n == 0 {
        return Ok(true);
    }
    let bound_a = generating_bound(a)?;
    // an LLL basis is enough here; the pool just has to cover its norms
    let (basis, gram_red) = crate::reduce::lll_basis(a);
    let m_basis = (0..n)
        .map(|i| i64::try_from(&gram_red[(i, i)]).expect("desk-scale norms"))
        .max()
        .unwrap_or(0);
    let pool_bound = bound_a.max(m_basis);
    if a.norm_counts(pool_bound)? != b.norm_counts(pool_bound)? {
        return Ok(false);
    }
    let pool_b = Pool::build(b, pool_bound)?;
    let gram_a = a.gram_i64()?;
    let gram_b = b.gram_i64()?;
    let reps_a = a.short_vectors(pool_bound)?;
    let fp_a = fingerprint_reps(&reps_a.reps);
    // fingerprint census must agree
    {
        let mut census_a: BTreeMap<Vec<(i64, u32)>, u32> = BTreeMap::new();
        for (v, _) in &reps_a.reps {
            *census_a.entry(fingerprint(gram_a, v, &fp_a)).or_insert(0) += 1;
        }
        let mut census_b: BTreeMap<Vec<(i64, u32)>, u32> = BTreeMap::new();
        // even indices of the signed pool are the representatives
        for i in (0..pool_b.vectors.len()).step_by(2) {
            let v = &pool_b.vectors[i];
            *census_b.entry(fingerprint(gram_b, v, &pool_b.fp_reps)).or_insert(0) += 1;
        }
        if census_a != census_b {
            return Ok(false);
        }
    }
    let base: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i64::try_from(&basis[(i, j)]).expect("desk-scale basis"))
                .collect()
        })
        .collect();
    let base_gram: Vec<Vec<i64>> = base
        .iter()
        .map(|u| {
            base.iter()
                .map(|v| i64::try_from(crate::fp::exact_inner(gram_a, u, v)).expect("fits"))
                .collect()
        })
        .collect();
    let cand: Vec<Vec<u32>> = base
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let Some(class) = pool_b.class_of(gram_a, v, &fp_a) else {
                return Vec::new();
            };
            (0..pool_b.vectors.len() as u32)
                .filter(|&ci| {
                    pool_b.norms[ci as usize] == base_gram[i][i]
                        && pool_b.classes[ci as usize] == class
                })
                .collect()
        })
        .collect();
    if cand.iter().any(Vec::is_empty) {
        return Ok(false);
    }
    let searcher =
        Searcher { base_gram, pool: &pool_b, target_gram: gram_b, cand };
    let mut imgs: Vec<Vec<i64>> = Vec::with_capacity(n);
    Ok(searcher.extend(&mut imgs, 0))
}
