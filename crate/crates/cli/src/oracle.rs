//! Desk-scale classification by exhaustive 2-neighbor closure from `Z^n`
//! with explicit isometry testing.
//!
//! This is the independent route against which the randomized hunts are
//! checked: it never consults BV invariants to decide class membership.
//! Matching uses norm counts and the root system as cheap invariants, then a
//! full backtracking isometry test. Lines of `L/2L` are reduced to orbit
//! representatives under the automorphism group before neighbors are built,
//! which is sound because isometries map neighbor constructions to
//! isometric ones.

use kneser_core::bv::{bv_default, BvInvariant};
use kneser_core::charvec::index2_unimodular_overlattices;
use kneser_core::isometry::{aut_order_with_generators, isometric};
use kneser_core::lattice::zn_congruence_basis;
use kneser_core::matrix::IntMat;
use kneser_core::roots::{root_system, RootSystem};
use kneser_core::{Lattice, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub struct OracleClass {
    pub lattice: Lattice,
    pub aut_order: BigInt,
    pub root: RootSystem,
    pub r1: u64,
    /// Computed for downstream comparisons and reports; never used to decide
    /// class membership here.
    pub bv: BvInvariant,
    gens: Vec<IntMat>,
}

pub struct OracleResult {
    pub n: usize,
    pub classes: Vec<OracleClass>,
    /// Sum of 1/|O(L)| over all classes.
    pub total_mass: Rational,
}

impl OracleResult {
    /// Reduced masses per root system over the classes with no norm-1
    /// vectors: the target table for the hunts.
    pub fn rmass_table(&self) -> BTreeMap<RootSystem, Rational> {
        let mut table: BTreeMap<RootSystem, Rational> = BTreeMap::new();
        for c in &self.classes {
            if c.r1 != 0 {
                continue;
            }
            let w = c.root.weyl_order();
            let mass = Rational::new(w, c.aut_order.clone());
            *table.entry(c.root.clone()).or_insert_with(Rational::zero) += mass;
        }
        table
    }

    /// Classes with no norm-1 vectors.
    pub fn root_free_classes(&self) -> impl Iterator<Item = &OracleClass> {
        self.classes.iter().filter(|c| c.r1 == 0)
    }
}

/// Cheap invariant key for matching: norm counts up to 3 plus the root
/// system symbol.
fn invariant_key(lat: &Lattice) -> (Vec<u64>, String) {
    let counts = lat.norm_counts(3).expect("desk-scale lattice");
    let root = root_system(lat).expect("valid lattice");
    ((1..=3).map(|i| counts[&i]).collect(), root.to_string())
}

/// Classify all unimodular lattices of rank `n` reachable from `Z^n` by
/// chains of 2-neighbors. For the ranks used here that is the whole genus.
pub fn classify(n: usize) -> OracleResult {
    assert!(n >= 1 && n <= 24, "closure oracle is sized for desk ranks");
    let mut classes: Vec<OracleClass> = Vec::new();
    let mut keys: Vec<(Vec<u64>, String)> = Vec::new();
    let mut queue: Vec<usize> = Vec::new();

    let mut register = |lat: Lattice,
                        classes: &mut Vec<OracleClass>,
                        keys: &mut Vec<(Vec<u64>, String)>|
     -> Option<usize> {
        let key = invariant_key(&lat);
        for (i, k) in keys.iter().enumerate() {
            if *k == key && isometric(&classes[i].lattice, &lat).expect("desk-scale") {
                return None;
            }
        }
        let (rep, gens) = aut_order_with_generators(&lat).expect("generated by short vectors");
        let bv = bv_default(&lat).expect("desk-scale");
        let r1 = lat.short_vectors(1).expect("bound 1").r(1);
        let root = root_system(&lat).expect("valid lattice");
        classes.push(OracleClass { lattice: lat, aut_order: rep.order, root, r1, bv, gens });
        keys.push(key);
        Some(classes.len() - 1)
    };

    let start = Lattice::standard(n);
    let idx = register(start, &mut classes, &mut keys).expect("fresh registry");
    queue.push(idx);

    while let Some(ci) = queue.pop() {
        let lat = classes[ci].lattice.clone();
        let gens = classes[ci].gens.clone();
        let reps = isotropic_line_orbit_reps(&lat, &gens);
        if std::env::var("KNESER_ORACLE_DEBUG").is_ok() {
            eprintln!("class {ci}: {} isotropic orbit reps", reps.len());
        }
        for rep_line in reps {
            // M = {v : v . x = 0 mod 2} in lattice coordinates
            let gram = lat.gram_i64().expect("desk-scale");
            let nn = lat.rank();
            let functional: Vec<i64> = (0..nn)
                .map(|j| {
                    let mut acc = 0i64;
                    for i in 0..nn {
                        if rep_line >> i & 1 == 1 {
                            acc += gram[i][j] & 1;
                        }
                    }
                    acc & 1
                })
                .collect();
            let basis = zn_congruence_basis(&functional, 2);
            let m_gram = basis.conjugate(lat.gram());
            let m = Lattice::from_gram(m_gram).expect("sublattice of PD form");
            debug_assert_eq!(m.det(), &BigInt::from(4));
            for (_, over) in index2_unimodular_overlattices(&m) {
                if let Some(idx) = register(over, &mut classes, &mut keys) {
                    queue.push(idx);
                }
            }
        }
    }

    let total_mass = classes
        .iter()
        .fold(Rational::zero(), |acc, c| {
            acc + Rational::new(BigInt::one(), c.aut_order.clone())
        });
    OracleResult { n, classes, total_mass }
}

/// Orbit representatives of the 2-isotropic lines of `L/2L` under the
/// automorphism group, as bitmasks of coordinates. A line is isotropic when
/// any lift has norm `0 mod 4` (well-defined mod `2L`).
fn isotropic_line_orbit_reps(lat: &Lattice, gens: &[IntMat]) -> Vec<u32> {
    let n = lat.rank();
    assert!(n <= 24);
    let gram = lat.gram_i64().expect("desk-scale");
    // generator columns as bitmasks mod 2
    let gen_cols: Vec<Vec<u32>> = gens
        .iter()
        .map(|g| {
            (0..n)
                .map(|j| {
                    let mut mask = 0u32;
                    for i in 0..n {
                        if (&g[(i, j)] % BigInt::from(2)) != BigInt::zero() {
                            mask |= 1 << i;
                        }
                    }
                    mask
                })
                .collect()
        })
        .collect();
    let apply = |cols: &[u32], v: u32| -> u32 {
        let mut out = 0u32;
        for (j, &c) in cols.iter().enumerate() {
            if ((v & c).count_ones() & 1) == 1 {
                out |= 1 << j;
            }
        }
        out
    };
    let size = 1u32 << n;
    let mut seen = vec![false; size as usize];
    let mut reps = Vec::new();
    for v in 1..size {
        if seen[v as usize] {
            continue;
        }
        // orbit closure
        let mut orbit = vec![v];
        seen[v as usize] = true;
        let mut head = 0;
        while head < orbit.len() {
            let w = orbit[head];
            head += 1;
            for cols in &gen_cols {
                let img = apply(cols, w);
                if !seen[img as usize] {
                    seen[img as usize] = true;
                    orbit.push(img);
                }
            }
        }
        // norm mod 4 of the 0/1 lift decides isotropy for the whole orbit
        let mut norm = 0i64;
        for i in 0..n {
            if v >> i & 1 == 0 {
                continue;
            }
            for j in 0..n {
                if v >> j & 1 == 1 {
                    norm = (norm + gram[i][j]) & 3;
                }
            }
        }
        if norm & 3 == 0 {
            reps.push(v);
        }
    }
    reps
}
