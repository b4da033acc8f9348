//! Bookkeeping and biased candidate streams for the neighbor hunts: the
//! exact-rational mass ledger, found-class entries, per-d progress rows,
//! strict 2-neighbor candidates of an odd-d neighbor, and the biased stream
//! that plants a visible characteristic vector.

use crate::matrix::IntMat;
use crate::neighbors::{is_isotropic, NeighborSpec};
use crate::roots::RootSystem;
use crate::Rational;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Zero;

/// One found isometry class: the neighbor that realized it, its reduced
/// mass, BV hash, root system and Gram matrix.
#[derive(Clone, Debug)]
pub struct ClassEntry {
    pub spec: NeighborSpec,
    pub mu: Rational,
    pub beta: u64,
    pub root: RootSystem,
    pub gram: IntMat,
}

/// Progress record for one `d`, mirroring the hunt tables: lines surviving
/// isotropy and dedup, candidates with the wanted root system, new classes,
/// and the remaining reduced mass afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgressRow {
    pub d: u64,
    pub n_iso: u64,
    pub n_found: u64,
    pub n_new: u64,
    pub remaining: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LedgerError {
    /// Subtraction drove a remaining mass below zero: the target table or an
    /// isometry-group order is wrong. Reported with the offending entry.
    Overdraft { root: RootSystem, by: Rational },
    UnknownRoot(RootSystem),
}

impl fmt::Display for LedgerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LedgerError::Overdraft { root, by } => {
                write!(f, "mass ledger overdraft on {root} by {by}")
            }
            LedgerError::UnknownRoot(r) => write!(f, "no ledger row for root system {r}"),
        }
    }
}

/// Exact-rational bookkeeping of remaining reduced mass per root system.
#[derive(Clone, Debug, Default)]
pub struct MassLedger {
    target: BTreeMap<RootSystem, Rational>,
    remaining: BTreeMap<RootSystem, Rational>,
    found: Vec<ClassEntry>,
}

impl MassLedger {
    pub fn new(target: BTreeMap<RootSystem, Rational>) -> Self {
        let remaining = target.clone();
        MassLedger { target, remaining, found: Vec::new() }
    }

    pub fn single(root: RootSystem, rmass: Rational) -> Self {
        let mut target = BTreeMap::new();
        target.insert(root, rmass);
        Self::new(target)
    }

    pub fn target(&self, root: &RootSystem) -> Option<&Rational> {
        self.target.get(root)
    }

    pub fn remaining(&self, root: &RootSystem) -> Option<&Rational> {
        self.remaining.get(root)
    }

    /// Root systems still waiting for mass.
    pub fn open_roots(&self) -> impl Iterator<Item = &RootSystem> {
        self.remaining.iter().filter(|(_, m)| !m.is_zero()).map(|(r, _)| r)
    }

    pub fn is_open(&self, root: &RootSystem) -> bool {
        self.remaining.get(root).map_or(false, |m| !m.is_zero())
    }

    pub fn all_done(&self) -> bool {
        self.remaining.values().all(Rational::is_zero)
    }

    pub fn found(&self) -> &[ClassEntry] {
        &self.found
    }

    pub fn into_found(self) -> Vec<ClassEntry> {
        self.found
    }

    /// Record a new class: subtract its reduced mass and keep the entry.
    pub fn record(&mut self, entry: ClassEntry) -> Result<(), LedgerError> {
        let rem = self
            .remaining
            .get_mut(&entry.root)
            .ok_or_else(|| LedgerError::UnknownRoot(entry.root.clone()))?;
        if *rem < entry.mu {
            let by = entry.mu.clone() - rem.clone();
            return Err(LedgerError::Overdraft { root: entry.root.clone(), by });
        }
        *rem -= entry.mu.clone();
        self.found.push(entry);
        Ok(())
    }

    /// Conservation: target = remaining + sum of recorded masses, per root.
    pub fn conserved(&self) -> bool {
        let mut spent: BTreeMap<&RootSystem, Rational> = BTreeMap::new();
        for e in &self.found {
            *spent.entry(&e.root).or_insert_with(Rational::zero) += e.mu.clone();
        }
        self.target.iter().all(|(root, total)| {
            let rem = self.remaining.get(root).cloned().unwrap_or_else(Rational::zero);
            let used = spent.get(root).cloned().unwrap_or_else(Rational::zero);
            rem + used == *total
        })
    }
}

/// Candidate `y` vectors for the strict 2-neighbors of `N_d(x)`, `d` odd:
/// `y = x mod d`, `y_1 = 1`, and coordinates sharing a value in `x` share
/// parity in `y`. One free parity bit per coordinate-value class except the
/// class of 1, so there are `2^(classes - 1)` candidates before isotropy.
pub struct StrictTwoCandidates {
    x: Vec<i64>,
    d: u64,
    /// class id per coordinate; class 0 contains the leading 1s
    class_of: Vec<usize>,
    n_classes: usize,
    next: u64,
}

impl StrictTwoCandidates {
    /// `spec` must be a normalized pair with odd `d`.
    pub fn new(spec: &NeighborSpec) -> StrictTwoCandidates {
        assert!(spec.d % 2 == 1, "strict 2-neighbors start from odd d");
        debug_assert!(spec.is_normalized());
        let mut values: Vec<i64> = spec.x.clone();
        values.dedup();
        let class_of: Vec<usize> = spec
            .x
            .iter()
            .map(|v| values.iter().position(|w| w == v).expect("value present"))
            .collect();
        StrictTwoCandidates {
            x: spec.x.clone(),
            d: spec.d,
            class_of,
            n_classes: values.len(),
            next: 0,
        }
    }

    /// Number of candidates before isotropy filtering.
    pub fn candidate_count(&self) -> u64 {
        1u64 << (self.n_classes - 1)
    }
}

impl Iterator for StrictTwoCandidates {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.next >= self.candidate_count() {
            return None;
        }
        let bits = self.next;
        self.next += 1;
        // class 0 (the coordinates equal to 1) keeps y = x; other classes
        // lift by d when their bit is set
        let y: Vec<i64> = self
            .x
            .iter()
            .zip(&self.class_of)
            .map(|(&xi, &c)| {
                if c > 0 && (bits >> (c - 1)) & 1 == 1 {
                    xi + self.d as i64
                } else {
                    xi
                }
            })
            .collect();
        Some(y)
    }
}

/// All strict 2-neighbor specs of a normalized odd-d pair: the isotropic
/// candidate lifts, each with both parity classes.
pub fn strict_two_neighbors(spec: &NeighborSpec) -> impl Iterator<Item = NeighborSpec> + '_ {
    let d2 = 2 * spec.d;
    StrictTwoCandidates::new(spec)
        .filter(move |y| is_isotropic(d2, y))
        .flat_map(move |y| {
            [
                NeighborSpec { d: d2, x: y.clone(), eps: Some(0) },
                NeighborSpec { d: d2, x: y, eps: Some(1) },
            ]
        })
}

/// Biased stream for hunting exceptional lattices: `d`-isotropic vectors
/// (`d` even) with `n - k` distinct odd folded residues and `k` distinct
/// even ones summing to `0 mod d`, so that the norm-`k` vector supported on
/// the even coordinates is a visible characteristic vector of the neighbor.
/// Coordinates are emitted odd block first, each block ascending.
pub struct ExceptionalBiasedStream {
    d: u64,
    odd_pool: Vec<i64>,
    even_pool: Vec<i64>,
    /// combination indices into the pools
    odd_combo: Vec<usize>,
    even_combo: Vec<usize>,
    exhausted: bool,
}

impl ExceptionalBiasedStream {
    pub fn new(n: usize, k: usize, d: u64) -> ExceptionalBiasedStream {
        let half = (d / 2) as i64;
        let odd_pool: Vec<i64> = (1..=half).filter(|v| v % 2 == 1).collect();
        let even_pool: Vec<i64> = (1..=half).filter(|v| v % 2 == 0).collect();
        let odd_need = n - k;
        let mut s = ExceptionalBiasedStream {
            d,
            odd_combo: (0..odd_need).collect(),
            even_combo: (0..k).collect(),
            odd_pool,
            even_pool,
            exhausted: false,
        };
        if d % 2 != 0
            || k == 0
            || k >= n
            || s.odd_pool.len() < odd_need
            || s.even_pool.len() < k
        {
            s.exhausted = true;
        }
        s
    }

    fn build(&self) -> Vec<i64> {
        let mut x: Vec<i64> = self.odd_combo.iter().map(|&i| self.odd_pool[i]).collect();
        x.extend(self.even_combo.iter().map(|&i| self.even_pool[i]));
        x
    }

    fn admissible(&self, x: &[i64]) -> bool {
        let k = self.even_combo.len();
        let even_sum: i64 = x[x.len() - k..].iter().sum();
        even_sum.rem_euclid(self.d as i64) == 0
            && crate::matrix::gcd_all(x) == 1
            && is_isotropic(self.d, x)
    }

    fn advance(&mut self) {
        // advance the even block first, then the odd block
        if advance_combination(&mut self.even_combo, self.even_pool.len()) {
            return;
        }
        self.even_combo = (0..self.even_combo.len()).collect();
        if !advance_combination(&mut self.odd_combo, self.odd_pool.len()) {
            self.exhausted = true;
        }
    }
}

fn advance_combination(combo: &mut [usize], pool: usize) -> bool {
    let k = combo.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] + (k - i) <= pool {
            // can advance position i
            if combo[i] + (k - i) < pool || combo[i] + 1 + (k - 1 - i) < pool {
                // recomputed below anyway
            }
        }
        if combo[i] + 1 <= pool - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl Iterator for ExceptionalBiasedStream {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        while !self.exhausted {
            let x = self.build();
            self.advance();
            if self.admissible(&x) {
                return Some(x);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charvec;
    use crate::neighbors::{neighbor, visible_root_system};
    use crate::roots::RootSymbol;
    use alloc::vec;
    use core::str::FromStr;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ledger_accounting() {
        let root = RootSystem::from_str("2A1").unwrap();
        let mut ledger = MassLedger::single(root.clone(), rat(3, 8));
        assert!(ledger.is_open(&root));
        let entry = |mu: Rational| ClassEntry {
            spec: NeighborSpec { d: 3, x: vec![1, 1, 1], eps: None },
            mu,
            beta: 0,
            root: root.clone(),
            gram: IntMat::identity(3),
        };
        ledger.record(entry(rat(1, 4))).unwrap();
        assert!(ledger.conserved());
        assert_eq!(ledger.remaining(&root), Some(&rat(1, 8)));
        // overdraft is fatal and reported with the gap
        let err = ledger.record(entry(rat(1, 4))).unwrap_err();
        assert_eq!(err, LedgerError::Overdraft { root: root.clone(), by: rat(1, 8) });
        ledger.record(entry(rat(1, 8))).unwrap();
        assert!(ledger.all_done());
        assert!(ledger.conserved());
        // unknown root system
        let other = RootSystem::from_str("A2").unwrap();
        let bad = ClassEntry {
            spec: NeighborSpec { d: 3, x: vec![1, 1, 1], eps: None },
            mu: rat(1, 2),
            beta: 0,
            root: other.clone(),
            gram: IntMat::identity(3),
        };
        assert_eq!(ledger.record(bad).unwrap_err(), LedgerError::UnknownRoot(other));
    }

    #[test]
    fn strict_two_candidate_counts() {
        // all distinct coordinates: 2^(n-1) candidates
        let spec = NeighborSpec { d: 11, x: vec![1, 2, 3, 4, 5], eps: None };
        let cands = StrictTwoCandidates::new(&spec);
        assert_eq!(cands.candidate_count(), 16);
        assert_eq!(cands.into_iter().count(), 16);
        // repeats tie parities: type 2+2+1 has 3 classes
        let spec = NeighborSpec { d: 11, x: vec![1, 1, 2, 2, 3], eps: None };
        assert_eq!(StrictTwoCandidates::new(&spec).candidate_count(), 4);
    }

    #[test]
    fn strict_two_candidates_respect_congruences() {
        let spec = NeighborSpec { d: 7, x: vec![1, 1, 2, 3], eps: None };
        for y in StrictTwoCandidates::new(&spec) {
            assert_eq!(y[0], 1);
            // y = x mod 7
            for (a, b) in y.iter().zip(&spec.x) {
                assert_eq!((a - b).rem_euclid(7), 0);
            }
            // equal x-coordinates share parity
            assert_eq!(y[0].rem_euclid(2), y[1].rem_euclid(2));
        }
        // emitted specs are isotropic for 2d with both parity classes
        for s in strict_two_neighbors(&spec) {
            assert_eq!(s.d, 14);
            assert!(is_isotropic(14, &s.x));
            assert!(s.eps.is_some());
        }
    }

    #[test]
    fn strict_two_of_rank12_line() {
        // a normalized odd-d pair at rank 12; every emitted spec must build
        // a unimodular neighbor whose visible root system contains the
        // original line's visible roots (parities only refine congruences)
        let x: Vec<i64> = vec![1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6];
        let d = 13u64;
        assert!(is_isotropic(d, &x));
        let spec = NeighborSpec { d, x, eps: None };
        let mut seen = 0;
        for s in strict_two_neighbors(&spec).take(6) {
            let lat = neighbor(s.d, &s.x, s.eps).unwrap();
            assert!(lat.is_unimodular());
            let vis = visible_root_system(s.d, &s.x).unwrap();
            let orig = visible_root_system(spec.d, &spec.x).unwrap();
            assert_eq!(vis, orig, "strict lifts keep the visible root system");
            seen += 1;
        }
        assert!(seen > 0);
    }

    #[test]
    fn exceptional_stream_shapes() {
        // k = n is degenerate (gcd could never be 1): empty
        assert_eq!(ExceptionalBiasedStream::new(5, 5, 10).count(), 0);
        // rank 29 with k = 5 needs d >= 94: 24 distinct odd residues
        assert_eq!(ExceptionalBiasedStream::new(29, 5, 92).count(), 0);
        assert!(ExceptionalBiasedStream::new(29, 5, 94).next().is_some());
    }

    #[test]
    fn exceptional_stream_plants_characteristic_vector() {
        // small analogue: rank 13 with 5 trailing even coordinates. The odd
        // block must have size 0 mod 4 for even-d isotropy to be possible,
        // and a norm-k characteristic vector needs k = n mod 8.
        let n = 13usize;
        let k = 5usize;
        let mut produced = 0;
        for d in (30..=44u64).step_by(2) {
            for x in ExceptionalBiasedStream::new(n, k, d).take(2) {
                assert!(x[..n - k].iter().all(|v| v % 2 == 1));
                assert!(x[n - k..].iter().all(|v| v % 2 == 0));
                let even_sum: i64 = x[n - k..].iter().sum();
                assert_eq!(even_sum.rem_euclid(d as i64), 0);
                // the norm-k vector on the even coordinates is visible and
                // characteristic in at least one parity class
                let mut xi_ambient = vec![0i64; n];
                for c in &mut xi_ambient[n - k..] {
                    *c = 1;
                }
                let mut ok_eps = 0;
                for eps in [0u8, 1] {
                    let lat = neighbor(d, &x, Some(eps)).unwrap();
                    if lat.is_even() {
                        continue;
                    }
                    let xi = crate::lattice::ambient_to_lattice_coords(&lat, &xi_ambient)
                        .expect("even-coordinate sum vector is visible");
                    assert_eq!(lat.norm(&xi).unwrap(), k as i128);
                    let rep = charvec::characteristic_vectors(&lat, k as i64).unwrap();
                    if rep.vectors.iter().any(|(_, norm)| *norm == k as i64) {
                        // confirm the planted vector itself is characteristic
                        let good = (0..n).all(|i| {
                            let mut e = vec![0i64; n];
                            e[i] = 1;
                            let dot = lat.inner(&xi, &e).unwrap();
                            let diag = lat.inner(&e, &e).unwrap();
                            (dot - diag) % 2 == 0
                        });
                        if good {
                            ok_eps += 1;
                        }
                    }
                }
                if ok_eps > 0 {
                    produced += 1;
                }
            }
        }
        assert!(produced > 0, "the stream produced testable neighbors");
    }

    #[test]
    fn visible_d_component_from_strict_two() {
        // visible root system of the 2d-lift keeps A-components from value
        // classes; sanity-check symbols parse
        let rs = RootSystem::single(RootSymbol::A(2));
        assert_eq!(alloc::format!("{rs}"), "A2");
    }
}
