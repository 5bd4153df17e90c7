//! Generators for the matrix-set families used across the test suites and
//! the corpus runner, plus a catalog of small built-in example sets.

use crate::boolmat::{BinaryMatrix, MatrixSet};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// The NZ pair whose associated automata (in both directions) are the
/// classic slowly-synchronizing cycle automaton with reset threshold
/// `(n-1)^2`: an identity with a shortcut edge, and the full cycle.
pub fn cerny_nz(n: usize) -> Result<MatrixSet> {
    if n < 2 || n > crate::boolmat::MAX_DIM {
        return Err(Error::Invalid(format!(
            "cerny_nz needs 2 <= n <= {}",
            crate::boolmat::MAX_DIM
        )));
    }
    let mut a = BinaryMatrix::identity(n);
    a.set(n - 1, 0, true);
    let mut b = BinaryMatrix::zeros(n);
    for i in 0..n - 1 {
        b.set(i, i + 1, true);
    }
    b.set(n - 1, 0, true);
    MatrixSet::new(vec![a, b])
}

/// A three-generator family with quadratic square-graph diameter: two
/// alternating near-permutations and an identity with one extra entry whose
/// position depends on `n mod 4`.
pub fn mn_family(n: usize) -> Result<MatrixSet> {
    if n < 5 || n > crate::boolmat::MAX_DIM {
        return Err(Error::Invalid(format!(
            "mn_family needs 5 <= n <= {}",
            crate::boolmat::MAX_DIM
        )));
    }
    // 1-indexed entry predicates, translated to 0-indexed storage
    let build = |pred: &dyn Fn(usize, usize) -> bool| {
        let mut m = BinaryMatrix::zeros(n);
        for i in 1..=n {
            for j in 1..=n {
                if pred(i, j) {
                    m.set(i - 1, j - 1, true);
                }
            }
        }
        m
    };
    // both walkers are permutations: adjacent transpositions starting at an
    // even or odd position, with fixed points where the pairing leaves the
    // ends uncovered
    let (q1, q2) = if n.is_multiple_of(2) {
        let q1 = build(&|i, j| {
            (i == 1 && j == 1)
                || (i == n && j == n)
                || (i % 2 == 0 && j == i + 1)
                || (i % 2 == 1 && j + 1 == i)
        });
        let q2 = build(&|i, j| (i % 2 == 1 && j == i + 1) || (i % 2 == 0 && j + 1 == i));
        (q1, q2)
    } else {
        let q1 = build(&|i, j| {
            (i == 1 && j == 1) || (i % 2 == 0 && j == i + 1) || (i % 2 == 1 && j + 1 == i)
        });
        let q2 = build(&|i, j| {
            (i == n && j == n) || (i % 2 == 1 && j == i + 1) || (i % 2 == 0 && j + 1 == i)
        });
        (q1, q2)
    };
    let (ei, ej) = if !n.is_multiple_of(2) {
        ((n - 1) / 2, (n + 1) / 2)
    } else if n.is_multiple_of(4) {
        (1, n - 2)
    } else {
        (1, n - 4)
    };
    let mut third = BinaryMatrix::identity(n);
    third.set(ei - 1, ej - 1, true);
    MatrixSet::new(vec![q1, q2, third])
}

/// `m` random permutation matrices with a single randomly chosen 0-entry of
/// one randomly chosen matrix flipped to 1. Deterministic per seed.
pub fn perturbed_permutation(n: usize, m: usize, seed: u64) -> MatrixSet {
    assert!(n >= 2, "perturbed_permutation needs n >= 2");
    assert!(m >= 2, "perturbed_permutation needs m >= 2");
    let mut rng = SplitMix64::new(seed);
    let mut matrices = Vec::with_capacity(m);
    for _ in 0..m {
        matrices.push(random_permutation(n, &mut rng));
    }
    let target = rng.below(m as u64) as usize;
    let zero_rank = rng.below((n * (n - 1)) as u64) as usize;
    let mut remaining = zero_rank;
    'outer: for i in 0..n {
        for j in 0..n {
            if !matrices[target].get(i, j) {
                if remaining == 0 {
                    matrices[target].set(i, j, true);
                    break 'outer;
                }
                remaining -= 1;
            }
        }
    }
    MatrixSet::new(matrices).expect("construction is well formed")
}

fn random_permutation(n: usize, rng: &mut SplitMix64) -> BinaryMatrix {
    let mut image: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut image);
    let mut m = BinaryMatrix::zeros(n);
    for (i, &j) in image.iter().enumerate() {
        m.set(i, j, true);
    }
    m
}

/// `m` matrices drawn uniformly over all binary `n x n` matrices, each
/// resampled until it is NZ. Deterministic per seed.
pub fn uniform_nz(n: usize, m: usize, seed: u64) -> MatrixSet {
    assert!(n >= 1 && m >= 1);
    let mut rng = SplitMix64::new(seed);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut matrices = Vec::with_capacity(m);
    while matrices.len() < m {
        let mut mat = BinaryMatrix::zeros(n);
        for i in 0..n {
            let bits = rng.next_u64() & mask;
            for j in 0..n {
                if bits >> j & 1 == 1 {
                    mat.set(i, j, true);
                }
            }
        }
        if mat.is_nz() {
            matrices.push(mat);
        }
    }
    MatrixSet::new(matrices).expect("construction is well formed")
}

/// Identifiers accepted by [`example_set`].
pub const EXAMPLE_IDS: &[&str] = &[
    "threestate",
    "fourstate",
    "fivestate-a",
    "fivestate-b",
    "nondominating",
    "stagnation",
];

/// Small built-in example sets used throughout the test suites:
///
/// * `threestate` — a 3x3 pair; primitive, reset thresholds 4 and 2.
/// * `fourstate` — a 4x4 pair with a 15-vertex subset multigraph.
/// * `fivestate-a`, `fivestate-b` — 5x5 triples with exponents 9 and 13.
/// * `nondominating` — a 5x5 pair in which no generator dominates a
///   permutation matrix.
/// * `stagnation` — a 4x4 pair whose game value stays flat until `t = 3`.
pub fn example_set(id: &str) -> Result<MatrixSet> {
    let m = |entries: &[&[u8]]| BinaryMatrix::from_entries(entries.len(), entries);
    let mats = match id {
        "threestate" => vec![
            m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]),
            m(&[&[1, 0, 1], &[0, 0, 1], &[0, 1, 0]]),
        ],
        "fourstate" => vec![
            m(&[&[0, 0, 0, 1], &[1, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]),
            m(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[1, 0, 0, 1], &[0, 0, 1, 0]]),
        ],
        "fivestate-a" => vec![
            m(&[
                &[0, 0, 0, 1, 0],
                &[0, 0, 1, 0, 0],
                &[1, 0, 0, 0, 0],
                &[0, 1, 0, 0, 0],
                &[0, 0, 0, 0, 1],
            ]),
            m(&[
                &[1, 0, 0, 0, 0],
                &[0, 0, 0, 1, 0],
                &[0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 1],
                &[0, 1, 0, 0, 0],
            ]),
            m(&[
                &[0, 0, 1, 0, 0],
                &[0, 0, 1, 0, 1],
                &[0, 0, 1, 1, 0],
                &[1, 0, 0, 0, 0],
                &[0, 1, 0, 0, 0],
            ]),
        ],
        "fivestate-b" => vec![
            m(&[
                &[0, 1, 0, 0, 0],
                &[0, 0, 0, 1, 0],
                &[0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 1],
                &[1, 0, 0, 0, 0],
            ]),
            m(&[
                &[0, 0, 0, 1, 0],
                &[0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 1],
                &[1, 0, 0, 0, 0],
                &[0, 1, 0, 0, 1],
            ]),
            m(&[
                &[0, 1, 0, 0, 0],
                &[0, 0, 0, 0, 1],
                &[0, 0, 1, 0, 0],
                &[1, 0, 0, 0, 0],
                &[0, 0, 0, 1, 0],
            ]),
        ],
        "nondominating" => vec![
            m(&[
                &[1, 0, 0, 0, 0],
                &[1, 0, 0, 0, 0],
                &[1, 0, 0, 0, 0],
                &[0, 1, 1, 0, 0],
                &[0, 0, 0, 1, 1],
            ]),
            m(&[
                &[0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 1],
                &[1, 0, 1, 0, 0],
                &[0, 1, 0, 1, 0],
            ]),
        ],
        "stagnation" => vec![
            m(&[&[0, 0, 0, 1], &[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]),
            m(&[&[1, 0, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]),
        ],
        other => return Err(Error::UnknownExample(other.to_string())),
    };
    MatrixSet::new(mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{aut_of, is_synchronizing, reset_threshold_exact};

    #[test]
    fn cerny_nz_shapes() {
        let set = cerny_nz(4).unwrap();
        assert!(set.is_nz());
        // first generator: identity plus the jump (n, 1)
        assert!(set.get(0).get(0, 0) && set.get(0).get(3, 0) && set.get(0).get(3, 3));
        // second generator: the full cycle
        assert!(set.get(1).is_permutation());
        assert!(cerny_nz(1).is_err());
    }

    #[test]
    fn cerny_nz_reset_thresholds_are_quadratic_in_both_directions() {
        for n in [2usize, 4, 5, 6] {
            let set = cerny_nz(n).unwrap();
            for dfa in [aut_of(&set).unwrap(), aut_of(&set.transpose()).unwrap()] {
                let rt = reset_threshold_exact(&dfa).unwrap().rt.unwrap();
                assert_eq!(rt, (n - 1) * (n - 1), "n = {n}");
            }
        }
    }

    #[test]
    fn cerny_nz_five_exponent_bounds() {
        use crate::automata::exponent_bounds;
        let set = cerny_nz(5).unwrap();
        let bounds = exponent_bounds(&set).unwrap();
        assert_eq!(bounds.lower, 16);
        assert_eq!(bounds.upper, 2 * 16 + 4);
    }

    #[test]
    fn mn_family_shapes() {
        assert!(mn_family(4).is_err());
        for n in 5..=9 {
            let set = mn_family(n).unwrap();
            assert!(set.is_nz(), "n = {n}");
            assert_eq!(set.len(), 3);
        }
        // third generator for n = 8 is the identity plus (1, 6)
        let set = mn_family(8).unwrap();
        assert!(set.get(2).get(0, 5));
        assert_eq!(set.get(2).row_sum_vector().iter().sum::<u32>(), 9);
        // the two walkers are permutations for every parity
        for n in [6usize, 7, 8, 9] {
            let set = mn_family(n).unwrap();
            assert!(set.get(0).is_permutation(), "n = {n}");
            assert!(set.get(1).is_permutation(), "n = {n}");
        }
        // odd case puts the extra entry in the middle
        let set = mn_family(5).unwrap();
        assert!(set.get(2).get(1, 2));
    }

    #[test]
    fn mn_family_five_is_primitive() {
        use crate::automata::exponent_bfs;
        let set = mn_family(5).unwrap();
        assert!(is_synchronizing(&aut_of(&set).unwrap()));
        let (exp, _) = exponent_bfs(&set).unwrap().unwrap();
        assert_eq!(exp, 23);
    }

    #[test]
    fn mn_family_five_has_quadratic_order_diameter() {
        use crate::automata::sg_diameter;
        let set = mn_family(5).unwrap();
        let dfa = aut_of(&set).unwrap();
        let diam = sg_diameter(&dfa);
        let rt = reset_threshold_exact(&dfa).unwrap().rt.unwrap();
        assert_eq!(diam, 8);
        // the observed reset threshold agrees with (n^2 - 1)/2 at n = 5
        assert_eq!(rt, 12);
        assert!(diam <= rt);
    }

    #[test]
    fn mn_family_reset_thresholds_match_the_quadratic_pattern() {
        // observed thresholds: (n^2 - 1)/2 for odd n, (n^2 - 2)/2 for
        // n = 4k, (n^2 - 10)/2 for n = 4k + 2
        for (n, expected) in [(5usize, 12usize), (6, 13), (7, 24), (8, 31)] {
            let set = mn_family(n).unwrap();
            let rt = reset_threshold_exact(&aut_of(&set).unwrap())
                .unwrap()
                .rt
                .unwrap();
            assert_eq!(rt, expected, "n = {n}");
        }
    }

    #[test]
    fn perturbed_permutation_has_one_double_row() {
        for seed in 0..20 {
            let set = perturbed_permutation(6, 2, seed);
            assert!(set.is_nz());
            let doubled: Vec<_> = set
                .matrices()
                .iter()
                .filter(|m| m.row_sum_vector().contains(&2))
                .collect();
            assert_eq!(doubled.len(), 1, "seed = {seed}");
            let total: u32 = set
                .matrices()
                .iter()
                .map(|m| m.row_sum_vector().iter().sum::<u32>())
                .sum();
            assert_eq!(total, 2 * 6 + 1);
        }
    }

    #[test]
    fn generators_are_seed_reproducible() {
        assert_eq!(
            perturbed_permutation(5, 3, 7),
            perturbed_permutation(5, 3, 7)
        );
        assert_eq!(uniform_nz(5, 2, 7), uniform_nz(5, 2, 7));
        assert_ne!(
            perturbed_permutation(5, 3, 7),
            perturbed_permutation(5, 3, 8)
        );
    }

    #[test]
    fn uniform_nz_is_nz() {
        for seed in 0..20 {
            assert!(uniform_nz(5, 3, seed).is_nz());
        }
    }

    #[test]
    fn perturbed_sets_are_usually_primitive_at_n10() {
        use crate::automata::is_irreducible;
        let mut primitive = 0;
        let total = 200;
        for seed in 0..total {
            let set = perturbed_permutation(10, 2, seed);
            // for irreducible sets, synchronization of the associated DFA
            // is exactly primitivity
            if is_irreducible(&set) && is_synchronizing(&aut_of(&set).unwrap()) {
                primitive += 1;
            }
        }
        assert!(
            primitive * 100 >= total * 80,
            "only {primitive}/{total} primitive"
        );
    }

    #[test]
    fn example_catalog() {
        for id in EXAMPLE_IDS {
            let set = example_set(id).unwrap();
            assert!(set.is_nz(), "{id}");
        }
        assert!(example_set("missing").is_err());
        assert_eq!(example_set("fivestate-a").unwrap().len(), 3);
        assert_eq!(example_set("threestate").unwrap().dim(), 3);
    }
}
