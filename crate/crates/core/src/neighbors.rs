//! Cyclic d-neighbors of the standard lattice `Z^n`.
//!
//! A pair `(d, x)` with `gcd(x) = 1` and `sum x_i^2 = 0 mod e*d` (`e = 1` for
//! odd `d`, `e = 2` for even `d`) determines the index-`d` sublattice
//! `M_d(x) = {v : v.x = 0 mod d}` and exactly `e` unimodular lattices `N`
//! with `N` meeting `Z^n` in `M_d(x)`. For even `d` the two are told apart by
//! a parity class `eps` of the lift `x'`. This module constructs them
//! exactly, together with the line normalization, typed enumeration,
//! equivalent-line deduplication and visible root systems that the search
//! drivers are built from.

use crate::lattice::{zn_congruence_basis, Lattice, LatticeError};
use crate::matrix::{gcd_all, inv_mod_u64, Hnf, IntMat};
use crate::roots::{identify_components, RootSystem, RootSystemError};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NeighborError {
    /// Coordinates have a common factor.
    NotPrimitive,
    /// `sum x_i^2 != 0 mod e*d`.
    NotIsotropic,
    /// All coordinates are divisible by `d`.
    Degenerate,
    /// No coordinate is invertible mod `d`; the caller must re-present `x`.
    LiftFailure,
    /// `eps` given for odd `d`, missing for even `d`, or out of range.
    BadEps,
    /// Normalization hypothesis fails: some coordinate is `0 mod d`, or no
    /// unit residue attains the maximal non-end multiplicity.
    NotNormalizable,
    /// Partition and end do not describe a type: parts must be positive and
    /// sum with `e` to `n`; `e > 0` needs `d` even.
    BadType,
    Lattice(LatticeError),
    Roots(RootSystemError),
}

impl fmt::Display for NeighborError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighborError::NotPrimitive => f.write_str("coordinates are not coprime"),
            NeighborError::NotIsotropic => f.write_str("vector is not d-isotropic"),
            NeighborError::Degenerate => f.write_str("all coordinates divisible by d"),
            NeighborError::LiftFailure => f.write_str("no coordinate invertible mod d"),
            NeighborError::BadEps => f.write_str("bad eps for this d"),
            NeighborError::NotNormalizable => f.write_str("pair cannot be normalized"),
            NeighborError::BadType => f.write_str("invalid type partition"),
            NeighborError::Lattice(e) => write!(f, "{e}"),
            NeighborError::Roots(e) => write!(f, "{e}"),
        }
    }
}

impl From<LatticeError> for NeighborError {
    fn from(e: LatticeError) -> Self {
        NeighborError::Lattice(e)
    }
}

/// Identifies the cyclic `d`-neighbor `N_d(x; eps)` of `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NeighborSpec {
    pub d: u64,
    pub x: Vec<i64>,
    /// Parity class for even `d`; `None` for odd `d`.
    pub eps: Option<u8>,
}

impl NeighborSpec {
    pub fn new(d: u64, x: Vec<i64>, eps: Option<u8>) -> Result<Self, NeighborError> {
        match (d % 2, eps) {
            (1, None) | (0, Some(0)) | (0, Some(1)) => Ok(NeighborSpec { d, x, eps }),
            _ => Err(NeighborError::BadEps),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Residues folded into `[0, d/2]`: `x_i mod d`, then `r -> d - r` above
    /// `d/2`. Folding is a sign change, so the folded multiset determines the
    /// line up to coordinate permutations and sign flips.
    pub fn folded_residues(&self) -> Vec<u64> {
        self.x
            .iter()
            .map(|&v| {
                let r = v.rem_euclid(self.d as i64) as u64;
                r.min(self.d - r)
            })
            .collect()
    }

    /// Multiplicity of each nonzero folded residue.
    pub fn residue_multiplicities(&self) -> BTreeMap<u64, u32> {
        let mut m = BTreeMap::new();
        for r in self.folded_residues() {
            if r != 0 {
                *m.entry(r).or_insert(0) += 1;
            }
        }
        m
    }

    /// The type: all nonzero residue multiplicities as a decreasing partition.
    pub fn type_partition(&self) -> Vec<u32> {
        let mut parts: Vec<u32> = self.residue_multiplicities().into_values().collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }

    /// Multiplicity of residue 1.
    pub fn index(&self) -> u32 {
        self.residue_multiplicities().get(&1).copied().unwrap_or(0)
    }

    /// Multiplicity of the residue `d/2` (always 0 for odd `d`).
    pub fn end(&self) -> u32 {
        if self.d % 2 != 0 {
            return 0;
        }
        self.residue_multiplicities().get(&(self.d / 2)).copied().unwrap_or(0)
    }

    /// Normalized means `1 = x_1 <= ... <= x_n <= d/2` with the multiplicity
    /// of 1 maximal among residues below `d/2`.
    pub fn is_normalized(&self) -> bool {
        let n = self.n();
        if n == 0 || self.x[0] != 1 {
            return false;
        }
        for w in self.x.windows(2) {
            if w[0] > w[1] {
                return false;
            }
        }
        if self.x[0] < 1 || 2 * (*self.x.last().expect("nonempty") as u64) > self.d {
            return false;
        }
        let m1 = self.index();
        self.residue_multiplicities().iter().all(|(&r, &m)| 2 * r == self.d || m <= m1)
    }
}

impl fmt::Display for NeighborSpec {
    /// Text record `d:x1,...,xn:eps`, with `eps` omitted for odd `d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.d)?;
        for (i, v) in self.x.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        if let Some(e) = self.eps {
            write!(f, ":{e}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for NeighborSpec {
    type Err = NeighborError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |_: core::num::ParseIntError| NeighborError::BadEps;
        let mut parts = s.trim().split(':');
        let d: u64 = parts.next().unwrap_or("").trim().parse().map_err(bad)?;
        let coords = parts.next().ok_or(NeighborError::BadEps)?;
        let x: Vec<i64> = coords
            .split(',')
            .map(|t| t.trim().parse().map_err(bad))
            .collect::<Result<_, _>>()?;
        let eps = match parts.next() {
            None => None,
            Some(t) => Some(t.trim().parse().map_err(bad)?),
        };
        if parts.next().is_some() {
            return Err(NeighborError::BadEps);
        }
        NeighborSpec::new(d, x, eps)
    }
}

/// `e` in the isotropy condition: 1 for odd `d`, 2 for even.
pub fn isotropy_scale(d: u64) -> u64 {
    if d % 2 == 0 {
        2
    } else {
        1
    }
}

/// True iff `sum x_i^2 = 0 mod e*d`.
pub fn is_isotropic(d: u64, x: &[i64]) -> bool {
    let m = i128::from(isotropy_scale(d) * d);
    let mut acc: i128 = 0;
    for &v in x {
        acc = (acc + i128::from(v) * i128::from(v)) % m;
    }
    acc == 0
}

/// The sublattice `M_d(x) = {v in Z^n : v.x = 0 mod d}` with its embedding
/// into `Z^n`. Has index `d` (and determinant `d^2`) whenever `gcd(x) = 1`.
pub fn m_lattice(d: u64, x: &[i64]) -> Result<Lattice, NeighborError> {
    if d > 1 && x.iter().all(|&v| v.rem_euclid(d as i64) == 0) {
        return Err(NeighborError::Degenerate);
    }
    let basis = zn_congruence_basis(x, d);
    let gram = basis.mul(&basis.transpose());
    Ok(Lattice::from_gram(gram)?.with_embedding(basis, BigInt::from(1))?)
}

/// A lift `x'` of `x`: `x' = x mod d`, `x'.x' = 0 mod d^2`, and for even `d`
/// additionally the parity condition `2 x'.x = x.x + eps*d^2 mod 2d^2`.
pub fn lift(d: u64, x: &[i64], eps: Option<u8>) -> Result<Vec<i64>, NeighborError> {
    if gcd_all(x) != 1 {
        return Err(NeighborError::NotPrimitive);
    }
    if !is_isotropic(d, x) {
        return Err(NeighborError::NotIsotropic);
    }
    if d == 1 {
        if eps.is_some() {
            return Err(NeighborError::BadEps);
        }
        return Ok(x.to_vec());
    }
    let di = i128::from(d);
    let norm: i128 = x.iter().map(|&v| i128::from(v) * i128::from(v)).sum();
    let j = x
        .iter()
        .position(|&v| {
            let r = v.rem_euclid(d as i64) as u64;
            r != 0 && num_integer::gcd(r, d) == 1
        })
        .ok_or(NeighborError::LiftFailure)?;
    let xj = x[j].rem_euclid(d as i64) as u64;
    let mut out: Vec<i64> = x.to_vec();
    if d % 2 == 1 {
        if eps.is_some() {
            return Err(NeighborError::BadEps);
        }
        // x.x = d*m; need m + 2*t*x_j = 0 mod d.
        let m = ((norm / di) % di).rem_euclid(di) as u64;
        let inv = inv_mod_u64(2 * xj % d, d);
        let t = crate::matrix::mulmod((d - m) % d, inv, d);
        out[j] = out[j].checked_add((d * t) as i64).expect("lift fits i64");
    } else {
        let eps = eps.ok_or(NeighborError::BadEps)?;
        if eps > 1 {
            return Err(NeighborError::BadEps);
        }
        // x.x = 2d*m; need m + t*x_j = 0 mod d/2.
        let h = d / 2;
        let m = ((norm / (2 * di)) % i128::from(h)).rem_euclid(i128::from(h)) as u64;
        let inv = inv_mod_u64(xj % h, h);
        let t = crate::matrix::mulmod((h - m) % h, inv, h);
        out[j] = out[j].checked_add((d * t) as i64).expect("lift fits i64");
        if lift_parity(d, x, &out) != eps {
            // flip the parity class: add (d^2/2) * u with u.x odd
            let i = x
                .iter()
                .position(|&v| v.rem_euclid(2) == 1)
                .expect("primitive vector has an odd coordinate");
            out[i] = out[i].checked_add((d * d / 2) as i64).expect("lift fits i64");
        }
        debug_assert_eq!(lift_parity(d, x, &out), eps);
    }
    debug_assert!({
        let n2: i128 = out.iter().map(|&v| i128::from(v) * i128::from(v)).sum();
        n2 % (di * di) == 0
    });
    Ok(out)
}

/// The `eps` class of a given lift, for even `d`.
fn lift_parity(d: u64, x: &[i64], xp: &[i64]) -> u8 {
    let di = i128::from(d);
    let dot: i128 = x.iter().zip(xp).map(|(&a, &b)| i128::from(a) * i128::from(b)).sum();
    let norm: i128 = x.iter().map(|&v| i128::from(v) * i128::from(v)).sum();
    let r = (2 * dot - norm).rem_euclid(2 * di * di);
    debug_assert!(r == 0 || r == di * di, "lift congruences violated");
    u8::from(r != 0)
}

/// The unimodular neighbor `N_d(x; eps) = M_d(x) + (x'/d) Z`, carrying its
/// rational embedding of denominator `d`.
pub fn neighbor(d: u64, x: &[i64], eps: Option<u8>) -> Result<Lattice, NeighborError> {
    let xp = lift(d, x, eps)?;
    let m_basis = zn_congruence_basis(x, d);
    let n = x.len();
    let mut acc = Hnf::new(n);
    for i in 0..m_basis.rows() {
        acc.add_row((0..n).map(|c| &m_basis[(i, c)] * BigInt::from(d)).collect());
    }
    acc.add_row(xp.iter().map(|&v| BigInt::from(v)).collect());
    let basis = acc.into_matrix();
    // gram = (basis/d) (basis/d)^T, integral by construction
    let scaled = basis.mul(&basis.transpose());
    let d2 = BigInt::from(d) * BigInt::from(d);
    let mut gram = IntMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let (q, r) = scaled[(i, j)].div_rem(&d2);
            assert!(r.is_zero(), "neighbor gram must be integral");
            gram[(i, j)] = q;
        }
    }
    let lat = Lattice::from_gram(gram)?.with_embedding(basis, BigInt::from(d))?;
    debug_assert!(lat.is_unimodular());
    Ok(lat)
}

/// Construct the neighbor named by a spec.
pub fn neighbor_of_spec(spec: &NeighborSpec) -> Result<Lattice, NeighborError> {
    neighbor(spec.d, &spec.x, spec.eps)
}

/// Normalize a pair `(d, x)` with no coordinate divisible by `d`: returns
/// the normalized `(d, y)` and the unit `a` with `sigma(x) = a*y mod d` for
/// some signed permutation `sigma`.
///
/// `a` is the smallest unit residue of maximal multiplicity. Fails when some
/// coordinate is `0 mod d` or no unit residue yields a normalized vector
/// (possible only for composite `d`).
pub fn normalize(d: u64, x: &[i64]) -> Result<(NeighborSpec, u64), NeighborError> {
    let probe = NeighborSpec { d, x: x.to_vec(), eps: None };
    let folded = probe.folded_residues();
    if folded.iter().any(|&r| r == 0) {
        return Err(NeighborError::NotNormalizable);
    }
    let mults = probe.residue_multiplicities();
    let a = mults
        .iter()
        .filter(|&(&r, _)| num_integer::gcd(r, d) == 1)
        .min_by_key(|&(&r, &m)| (core::cmp::Reverse(m), r))
        .map(|(&r, _)| r)
        .ok_or(NeighborError::NotNormalizable)?;
    let y = scale_fold_sort(d, &folded, a);
    let spec = NeighborSpec { d, x: y, eps: None };
    if !spec.is_normalized() {
        return Err(NeighborError::NotNormalizable);
    }
    Ok((spec, a))
}

/// Coordinates `fold(a^{-1} * r)` sorted ascending, as `i64`.
fn scale_fold_sort(d: u64, folded: &[u64], a: u64) -> Vec<i64> {
    let inv = inv_mod_u64(a % d, d);
    let mut y: Vec<i64> = folded
        .iter()
        .map(|&r| {
            let s = crate::matrix::mulmod(r % d, inv, d);
            s.min(d - s) as i64
        })
        .collect();
    y.sort_unstable();
    y
}

/// Number of unit residues whose multiplicity ties the index: the count `f`
/// of normalized vectors generating an equivalent line.
pub fn line_equivalents_count(d: u64, x: &[i64]) -> u32 {
    let spec = NeighborSpec { d, x: x.to_vec(), eps: None };
    let mults = spec.residue_multiplicities();
    let m1 = spec.index();
    mults.iter().filter(|&(&r, &m)| m == m1 && num_integer::gcd(r, d) == 1).count() as u32
}

/// Keep a normalized `x` iff it is the lexicographically largest among the
/// normalized generators of its line. Exactly one vector per line class
/// survives, and the decision is local to `x`, so it can run per candidate
/// inside any chunking scheme.
pub fn line_is_canonical(d: u64, x: &[i64]) -> bool {
    let spec = NeighborSpec { d, x: x.to_vec(), eps: None };
    let folded = spec.folded_residues();
    let mults = spec.residue_multiplicities();
    let m1 = spec.index();
    debug_assert!(m1 > 0, "dedup expects normalized input");
    for (&r, &m) in &mults {
        if m != m1 || num_integer::gcd(r, d) != 1 {
            continue;
        }
        let y = scale_fold_sort(d, &folded, r);
        if y.as_slice() > x {
            return false;
        }
    }
    true
}

/// Filter a batch of normalized vectors down to canonical line
/// representatives.
pub fn dedup_lines(d: u64, batch: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    batch.into_iter().filter(|x| line_is_canonical(d, x)).collect()
}

/// Root system of the norm-2 vectors of `Z^n` lying in `M_d(x)`: the visible
/// root system of every neighbor on the line, independent of `eps`.
pub fn visible_root_system(d: u64, x: &[i64]) -> Result<RootSystem, NeighborError> {
    let n = x.len();
    let di = i128::from(d);
    let mut reps: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for sign in [1i64, -1] {
                let s = i128::from(x[i]) + i128::from(sign) * i128::from(x[j]);
                if s.rem_euclid(di) == 0 {
                    let mut v = vec![0i64; n];
                    v[i] = 1;
                    v[j] = sign;
                    reps.push(v);
                }
            }
        }
    }
    identify_components(&reps, |u, v| {
        u.iter().zip(v).map(|(&a, &b)| i128::from(a) * i128::from(b)).sum()
    })
    .map_err(NeighborError::Roots)
}

/// Stream of all normalized `x` of the given type, index and end, in a fixed
/// deterministic order.
///
/// The type is `partition + e`: the parts are the multiplicities of distinct
/// residues in `[1, d/2)` with the largest part on residue 1, and `e` is the
/// multiplicity of the end residue `d/2`. Empty when the residue range
/// cannot host the parts. (The lone `d = 2` line `1^n`, whose only residue
/// is the end, is not expressible as such a type; drivers handle it
/// directly.)
pub struct NormalizedEnumerator {
    d: u64,
    end_mult: u32,
    /// distinct part values, descending, with counts (residue 1's part
    /// excluded)
    groups: Vec<(u32, usize)>,
    /// largest part, assigned to residue 1
    first_part: u32,
    /// residues `2..=max_residue` available for the remaining parts
    pool: Vec<u64>,
    /// combination odometer per group: indices into the pool
    state: Option<Vec<Vec<usize>>>,
    exhausted: bool,
}

impl NormalizedEnumerator {
    pub fn new(
        n: usize,
        d: u64,
        partition: &[u32],
        end: u32,
    ) -> Result<NormalizedEnumerator, NeighborError> {
        let mut parts: Vec<u32> = partition.to_vec();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let total: u64 = parts.iter().map(|&p| u64::from(p)).sum::<u64>() + u64::from(end);
        if total != n as u64 || parts.iter().any(|&p| p == 0) || parts.is_empty() {
            return Err(NeighborError::BadType);
        }
        if end > 0 && d % 2 != 0 {
            return Err(NeighborError::BadType);
        }
        let max_residue = if d % 2 == 0 { d / 2 - 1 } else { (d - 1) / 2 };
        let first_part = parts[0];
        let rest = &parts[1..];
        let mut groups: Vec<(u32, usize)> = Vec::new();
        for &p in rest {
            match groups.last_mut() {
                Some((v, c)) if *v == p => *c += 1,
                _ => groups.push((p, 1)),
            }
        }
        let pool: Vec<u64> = (2..=max_residue).collect();
        let needed: usize = groups.iter().map(|&(_, c)| c).sum();
        let mut en = NormalizedEnumerator {
            d,
            end_mult: end,
            groups,
            first_part,
            pool,
            state: None,
            exhausted: false,
        };
        if max_residue < 1 || needed > en.pool.len() {
            en.exhausted = true;
        } else {
            en.state = en.initial_state();
            if en.state.is_none() {
                en.exhausted = true;
            }
        }
        Ok(en)
    }

    /// First combination per group: greedily the lowest available indices.
    fn initial_state(&self) -> Option<Vec<Vec<usize>>> {
        let mut used = vec![false; self.pool.len()];
        let mut state = Vec::with_capacity(self.groups.len());
        for &(_, count) in &self.groups {
            let mut combo = Vec::with_capacity(count);
            let mut idx = 0;
            while combo.len() < count {
                if idx >= self.pool.len() {
                    return None;
                }
                if !used[idx] {
                    used[idx] = true;
                    combo.push(idx);
                }
                idx += 1;
            }
            state.push(combo);
        }
        Some(state)
    }

    /// Advance the odometer: advance the deepest group's combination that can
    /// move, rebuilding deeper groups greedily.
    fn advance(&mut self) {
        let Some(state) = &mut self.state else {
            self.exhausted = true;
            return;
        };
        let pool_len = self.pool.len();
        let mut level = state.len();
        loop {
            if level == 0 {
                self.exhausted = true;
                return;
            }
            level -= 1;
            // occupancy by groups before this level
            let mut used = vec![false; pool_len];
            for combo in state[..level].iter() {
                for &i in combo {
                    used[i] = true;
                }
            }
            if Self::advance_combo(&mut state[level], &used, pool_len) {
                for &i in state[level].iter() {
                    used[i] = true;
                }
                let k = state.len();
                let mut ok = true;
                for lv in level + 1..k {
                    let count = state[lv].len();
                    let mut combo = Vec::with_capacity(count);
                    for (i, u) in used.iter().enumerate() {
                        if !u {
                            combo.push(i);
                            if combo.len() == count {
                                break;
                            }
                        }
                    }
                    if combo.len() < count {
                        ok = false;
                        break;
                    }
                    for &i in &combo {
                        used[i] = true;
                    }
                    state[lv] = combo;
                }
                if ok {
                    return;
                }
            }
        }
    }

    /// Advance a strictly-increasing index combination avoiding `used`
    /// slots; rightmost index first.
    fn advance_combo(combo: &mut [usize], used: &[bool], pool_len: usize) -> bool {
        let k = combo.len();
        let mut pos = k;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            let mut next = combo[pos] + 1;
            while next < pool_len && used[next] {
                next += 1;
            }
            if next >= pool_len {
                continue;
            }
            combo[pos] = next;
            // rebuild the suffix of this combo greedily above `next`
            let mut cur = next;
            let mut fine = true;
            for p in pos + 1..k {
                let mut cand = cur + 1;
                while cand < pool_len && used[cand] {
                    cand += 1;
                }
                if cand >= pool_len {
                    fine = false;
                    break;
                }
                combo[p] = cand;
                cur = cand;
            }
            if fine {
                return true;
            }
        }
    }

    fn build(&self) -> Vec<i64> {
        let state = self.state.as_ref().expect("not exhausted");
        let mut coords: Vec<i64> = Vec::new();
        for _ in 0..self.first_part {
            coords.push(1);
        }
        for (g, combo) in self.groups.iter().zip(state) {
            for &idx in combo {
                for _ in 0..g.0 {
                    coords.push(self.pool[idx] as i64);
                }
            }
        }
        for _ in 0..self.end_mult {
            coords.push((self.d / 2) as i64);
        }
        coords.sort_unstable();
        coords
    }
}

impl Iterator for NormalizedEnumerator {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.exhausted {
            return None;
        }
        let out = self.build();
        self.advance();
        Some(out)
    }
}

/// Smallest `d` that can host `s` distinct non-end residues.
pub fn min_d_for_parts(s: usize, needs_end: bool) -> u64 {
    if needs_end {
        2 * s as u64 + 2
    } else {
        2 * s as u64 + 1
    }
}

/// Render helper mirroring the `FromStr` impl.
pub fn render_spec(spec: &NeighborSpec) -> String {
    alloc::format!("{spec}")
}
