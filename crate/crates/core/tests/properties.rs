//! Property suites: completeness of the short-vector enumerator against
//! brute force, invariance of counts and BV under base change, neighbor
//! postconditions on randomized specs, and line dedup against a pairwise
//! orbit oracle.

use kneser_core::matrix::IntMat;
use kneser_core::neighbors::{
    self, is_isotropic, line_is_canonical, NeighborSpec, NormalizedEnumerator,
};
use kneser_core::{bv, lattice::Lattice};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

/// Random square integer matrix with entries in [-3, 3] and nonzero det.
fn nonsingular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), n)
        .prop_filter("nonsingular", |rows| !IntMat::from_i64_rows(rows).det().is_zero())
}

/// Brute-force enumeration over the box given by inverse-Gram bounds.
fn brute_force_shorts(gram: &IntMat, bound: i64) -> Vec<(Vec<i64>, i64)> {
    let n = gram.rows();
    let g: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::try_from(&gram[(i, j)]).unwrap() as f64).collect())
        .collect();
    // crude f64 inverse for the box radius
    let mut a = g.clone();
    let mut inv: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| a[r][c].abs() > 1e-9).unwrap();
        a.swap(c, p);
        inv.swap(c, p);
        let f = a[c][c];
        for j in 0..n {
            a[c][j] /= f;
            inv[c][j] /= f;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] -= f * a[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    let radii: Vec<i64> =
        (0..n).map(|i| ((bound as f64 * inv[i][i]).sqrt().ceil() as i64) + 1).collect();
    let gi: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::try_from(&gram[(i, j)]).unwrap()).collect())
        .collect();
    let mut out = Vec::new();
    let mut v: Vec<i64> = radii.iter().map(|r| -r).collect();
    'outer: loop {
        let norm: i128 = {
            let mut acc = 0i128;
            for i in 0..n {
                for j in 0..n {
                    acc += i128::from(v[i]) * i128::from(gi[i][j]) * i128::from(v[j]);
                }
            }
            acc
        };
        if norm > 0 && norm <= i128::from(bound) {
            // canonical sign
            let mut w = v.clone();
            if w.iter().find(|&&c| c != 0).copied().unwrap_or(0) < 0 {
                for c in w.iter_mut() {
                    *c = -*c;
                }
            }
            let pair = (w, norm as i64);
            if !out.contains(&pair) {
                out.push(pair);
            }
        }
        for i in 0..n {
            v[i] += 1;
            if v[i] <= radii[i] {
                continue 'outer;
            }
            v[i] = -radii[i];
        }
        break;
    }
    out.sort();
    out.sort_by_key(|(_, norm)| *norm);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn short_vectors_complete_3x3(rows in nonsingular(3), bound in 1i64..=4) {
        let b = IntMat::from_i64_rows(&rows);
        let gram = b.mul(&b.transpose());
        let lat = Lattice::from_gram(gram.clone()).unwrap();
        let got = lat.short_vectors(bound).unwrap();
        let expect = brute_force_shorts(&gram, bound);
        let got_pairs: Vec<(Vec<i64>, i64)> = got.reps.clone();
        prop_assert_eq!(got_pairs, expect);
    }

    #[test]
    fn short_vectors_complete_4x4(rows in nonsingular(4), bound in 1i64..=3) {
        let b = IntMat::from_i64_rows(&rows);
        let gram = b.mul(&b.transpose());
        let lat = Lattice::from_gram(gram.clone()).unwrap();
        let got = lat.short_vectors(bound).unwrap();
        let expect = brute_force_shorts(&gram, bound);
        let got_pairs: Vec<(Vec<i64>, i64)> = got.reps.clone();
        prop_assert_eq!(got_pairs, expect);
    }

    #[test]
    fn norm_counts_invariant_under_base_change(
        rows in nonsingular(3),
        shear in prop::collection::vec((-2i64..=2, 0usize..3, 0usize..3), 4),
    ) {
        let b = IntMat::from_i64_rows(&rows);
        let gram = b.mul(&b.transpose());
        let lat = Lattice::from_gram(gram.clone()).unwrap();
        // random unimodular transform from shears
        let mut u = IntMat::identity(3);
        for &(c, i, j) in &shear {
            if i != j {
                for k in 0..3 {
                    let t = &u[(j, k)] * BigInt::from(c);
                    u[(i, k)] += t;
                }
            }
        }
        let moved = Lattice::from_gram(u.conjugate(&gram)).unwrap();
        prop_assert_eq!(lat.norm_counts(4).unwrap(), moved.norm_counts(4).unwrap());
    }

    #[test]
    fn full_basis_has_index_one(rows in nonsingular(4)) {
        let b = IntMat::from_i64_rows(&rows);
        let gram = b.mul(&b.transpose());
        let lat = Lattice::from_gram(gram).unwrap();
        let basis: Vec<Vec<i64>> =
            (0..4).map(|i| (0..4).map(|j| i64::from(i == j)).collect()).collect();
        prop_assert_eq!(lat.sublattice_index(&basis), Some(BigInt::one()));
    }

    #[test]
    fn bv_invariant_under_base_change(
        shear in prop::collection::vec((-2i64..=2, 0usize..5, 0usize..5), 5),
    ) {
        let base = neighbors::neighbor(4, &[1, 1, 1, 1, 2], Some(0)).unwrap();
        let mut u = IntMat::identity(5);
        for &(c, i, j) in &shear {
            if i != j {
                for k in 0..5 {
                    let t = &u[(j, k)] * BigInt::from(c);
                    u[(i, k)] += t;
                }
            }
        }
        let moved = Lattice::from_gram(u.conjugate(base.gram())).unwrap();
        let a = bv::bv_default(&base).unwrap();
        let b = bv::bv_default(&moved).unwrap();
        prop_assert_eq!(bv::bv_compare(&a, &b).unwrap(), bv::BvComparison::Equal);
    }
}

/// Randomized neighbor specs: isotropic vectors at small rank and d.
fn isotropic_specs() -> impl Strategy<Value = NeighborSpec> {
    (2u64..=9, 3usize..=6)
        .prop_flat_map(|(d, n)| {
            (
                Just(d),
                prop::collection::vec(1i64..=(2 * d) as i64, n),
                prop::bool::ANY,
            )
        })
        .prop_filter_map("isotropic and primitive", |(d, mut x, flip)| {
            x[0] = 1; // keep gcd 1
            if !is_isotropic(d, &x) {
                return None;
            }
            let eps = if d % 2 == 0 { Some(u8::from(flip)) } else { None };
            Some(NeighborSpec { d, x, eps })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn neighbors_are_unimodular_and_integral(spec in isotropic_specs()) {
        let lat = neighbors::neighbor_of_spec(&spec).unwrap();
        prop_assert!(lat.is_unimodular());
        prop_assert!(lat.gram().is_symmetric());
        // embedding matches: checked at construction, re-assert determinant
        prop_assert_eq!(lat.det(), &BigInt::one());
        // visible roots are norm-2 vectors of the neighbor: counts and
        // ranks can only grow, and each visible root lies in the lattice
        let visible = neighbors::visible_root_system(spec.d, &spec.x).unwrap();
        let full = kneser_core::roots::root_system(&lat).unwrap();
        prop_assert!(visible.total_roots() <= full.total_roots());
        prop_assert!(visible.total_rank() <= full.total_rank());
        let n = spec.x.len();
        let di = spec.d as i64;
        for i in 0..n {
            for j in i + 1..n {
                for sign in [1i64, -1] {
                    if (spec.x[i] + sign * spec.x[j]).rem_euclid(di) == 0 {
                        let mut root = vec![0i64; n];
                        root[i] = 1;
                        root[j] = sign;
                        let y = kneser_core::lattice::ambient_to_lattice_coords(&lat, &root)
                            .expect("visible root lies in the neighbor");
                        prop_assert_eq!(lat.norm(&y).unwrap(), 2i128);
                    }
                }
            }
        }
    }

    #[test]
    fn odd_d_has_single_class(spec in isotropic_specs().prop_filter("odd", |s| s.d % 2 == 1)) {
        // for odd d the lattice does not depend on any lift choice
        let a = neighbors::neighbor(spec.d, &spec.x, None).unwrap();
        prop_assert!(a.is_unimodular());
    }
}

#[test]
fn dedup_matches_pairwise_orbit_oracle() {
    // group whole-type batches by pairwise line equivalence computed with
    // every unit (not only the ones the dedup rule uses) and check exactly
    // one survivor per group
    for (n, d, partition) in [
        (4usize, 11u64, vec![1u32, 1, 1, 1]),
        (5, 9, vec![2, 1, 1, 1]),
        (5, 13, vec![2, 2, 1]),
        (6, 11, vec![2, 2, 1, 1]),
    ] {
        let batch: Vec<Vec<i64>> =
            NormalizedEnumerator::new(n, d, &partition, 0).unwrap().collect();
        let fold_scale = |x: &[i64], a: u64| -> Vec<i64> {
            let mut y: Vec<i64> = x
                .iter()
                .map(|&v| {
                    let r = (v as u64 * a) % d;
                    r.min(d - r) as i64
                })
                .collect();
            y.sort_unstable();
            y
        };
        let units: Vec<u64> = (1..d).filter(|&a| num_integer::gcd(a, d) == 1).collect();
        let equivalent = |x: &[i64], y: &[i64]| units.iter().any(|&a| fold_scale(x, a) == y);
        // partition `batch` into equivalence classes
        let mut classes: Vec<Vec<&Vec<i64>>> = Vec::new();
        'next: for x in &batch {
            for class in classes.iter_mut() {
                if equivalent(class[0], x) {
                    class.push(x);
                    continue 'next;
                }
            }
            classes.push(vec![x]);
        }
        for class in &classes {
            let survivors =
                class.iter().filter(|x| line_is_canonical(d, x)).count();
            assert_eq!(survivors, 1, "n={n} d={d} class of {:?}", class[0]);
        }
    }
}

#[test]
fn normalize_is_idempotent_on_enumerated_types() {
    for (n, d, partition, end) in
        [(5usize, 9u64, vec![2u32, 1, 1, 1], 0u32), (6, 10, vec![2, 1, 1], 2), (4, 11, vec![1; 4], 0)]
    {
        for x in NormalizedEnumerator::new(n, d, &partition, end).unwrap().take(50) {
            let (spec, a) = neighbors::normalize(d, &x).unwrap();
            assert_eq!(a, 1);
            assert_eq!(spec.x, x);
        }
    }
}

#[test]
fn lll_never_raises_max_diagonal() {
    // the reduced gram's max diagonal entry is never worse than the input's
    let mut state = 0x2545f4914f6cdd1du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..20 {
        let n = 3 + (next() % 3) as usize;
        let rows: Vec<Vec<i64>> =
            (0..n).map(|_| (0..n).map(|_| (next() % 7) as i64 - 3).collect()).collect();
        let b = IntMat::from_i64_rows(&rows);
        if b.det().is_zero() {
            continue;
        }
        let gram = b.mul(&b.transpose());
        let red = kneser_core::lll::reduce(&gram);
        let max_in: BigInt =
            (0..n).map(|i| gram[(i, i)].clone()).max().unwrap();
        let max_out: BigInt =
            (0..n).map(|i| red.gram[(i, i)].clone()).max().unwrap();
        assert!(max_out <= max_in);
        assert!((0..n).all(|i| red.gram[(i, i)].is_positive()));
    }
}
