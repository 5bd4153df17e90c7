//! Acceptance suite: one test per criterion, each printing a status line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! for passing criteria too.

use std::collections::HashSet;
use std::sync::OnceLock;

use num_traits::{One, Signed};

use spf_core::approx::{r1_estimate, r2_estimate};
use spf_core::automata::{
    aut_of, eppstein, exponent_bfs, exponent_bfs_with_cap, reset_threshold_exact, sg_diameter,
};
use spf_core::boolmat::{bool_product, BinaryMatrix, MatrixSet};
use spf_core::families::{cerny_nz, example_set, perturbed_permutation};
use spf_core::lp::{rat, rat_int, solve_dual, solve_primal, PolicyVector, Rational};
use spf_core::rng::SplitMix64;
use spf_core::semigroup::{
    build_ht, first_dominating_time, prune_ht_columns, prune_ht_rows, HtMatrix, ProductLayer,
};
use spf_core::spf::{
    check_stagnation_theorems, game_value, kbar_optimal_rows, spf_k, spf_kbar, spf_keq,
    stagnations, SpfMode, SpfPoint, SpfSeries,
};

fn report(id: &str, ok: bool, detail: &str) -> bool {
    println!(
        "criterion {id}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

/// Cap on the deduplicated product count explored per corpus set; admission
/// under this cap keeps the unpruned comparisons of criterion 9 tractable.
const CORPUS_CLOSURE_CAP: usize = 300_000;

struct CorpusEntry {
    seed: u64,
    set: MatrixSet,
    exp: usize,
    /// Dominance- and column-pruned `H_t` for `t = 0..=exp`.
    hts: Vec<HtMatrix>,
    k: SpfSeries,
    kbar: SpfSeries,
}

/// Deterministic corpus: for each n, the first seeds whose perturbed
/// permutation pair is primitive with a product closure small enough to
/// enumerate unpruned (50 sets across n = 3..=6).
fn corpus() -> &'static Vec<CorpusEntry> {
    static CORPUS: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut entries = Vec::new();
        for (n, want) in [(3usize, 16usize), (4, 14), (5, 12), (6, 8)] {
            let mut found = 0;
            let mut seed = 1u64;
            while found < want {
                let set = perturbed_permutation(n, 2, seed);
                if let Ok(Some((exp, _))) = exponent_bfs_with_cap(&set, CORPUS_CLOSURE_CAP) {
                    entries.push(build_entry(seed, set, exp));
                    found += 1;
                }
                seed += 1;
            }
        }
        entries
    })
}

/// One pruned pipeline pass: stores the per-horizon `H_t` and assembles the
/// game-value and deterministic-player series from them.
fn build_entry(seed: u64, set: MatrixSet, exp: usize) -> CorpusEntry {
    let n = set.dim();
    let mut layer = ProductLayer::initial(n);
    let mut hts = Vec::with_capacity(exp + 1);
    let mut k_points = Vec::with_capacity(exp + 1);
    let mut kbar_points = Vec::with_capacity(exp + 1);
    let mut kbar_one = None;
    for t in 0..=exp {
        if t > 0 {
            layer.grow(&set).expect("corpus layers stay under the cap");
            layer.prune_dominated();
        }
        let h = prune_ht_columns(&build_ht(&layer));
        let sol = solve_primal(&h).expect("well-formed Ht");
        k_points.push(SpfPoint {
            t,
            value: sol.value,
            p_opt: Some(sol.p_opt),
            tight_columns: Some(sol.tight_columns),
            optimal_rows: None,
        });
        let rows = kbar_optimal_rows(&h);
        let kbar_value = rat_int(h.row_max(rows[0]) as i64) / rat_int(n as i64);
        if kbar_value.is_one() && kbar_one.is_none() {
            kbar_one = Some(t);
        }
        kbar_points.push(SpfPoint {
            t,
            value: kbar_value,
            p_opt: None,
            tight_columns: None,
            optimal_rows: Some(rows),
        });
        hts.push(h);
    }
    assert!(
        k_points[exp].value.is_one(),
        "game value must reach 1 exactly at the exponent (seed {seed}, n {n})"
    );
    assert!(
        exp > 0 && !k_points[exp - 1].value.is_one(),
        "game value must not reach 1 early (seed {seed}, n {n})"
    );
    let k = SpfSeries {
        mode: SpfMode::K,
        n,
        points: k_points,
        reached_one_at: Some(exp),
        cap_hit: false,
        closed_at: None,
    };
    let kbar = SpfSeries {
        mode: SpfMode::KBar,
        n,
        points: kbar_points,
        reached_one_at: kbar_one,
        cap_hit: false,
        closed_at: None,
    };
    CorpusEntry {
        seed,
        set,
        exp,
        hts,
        k,
        kbar,
    }
}

#[test]
fn criterion_01_exponents_of_the_five_state_triples() {
    let mut ok = true;
    for (id, expected) in [("fivestate-a", 9usize), ("fivestate-b", 13usize)] {
        let set = example_set(id).unwrap();
        let (exp, witness) = exponent_bfs(&set).unwrap().unwrap();
        let series = spf_k(&set, expected + 2);
        ok &= exp == expected;
        ok &= witness.len() == expected;
        ok &= series.reached_one_at == Some(expected);
    }
    assert!(report(
        "01",
        ok,
        "product search and game value both give exponents 9 and 13"
    ));
}

#[test]
fn criterion_02_three_state_bridge() {
    let set = example_set("threestate").unwrap();
    let rt_fwd = reset_threshold_exact(&aut_of(&set).unwrap())
        .unwrap()
        .rt
        .unwrap();
    let rt_bwd = reset_threshold_exact(&aut_of(&set.transpose()).unwrap())
        .unwrap()
        .rt
        .unwrap();
    let (exp, _) = exponent_bfs(&set).unwrap().unwrap();
    let series = spf_k(&set, 10);
    let ok = rt_fwd == 4
        && rt_bwd == 2
        && exp == 8
        && series.reached_one_at == Some(8)
        && rt_fwd <= exp
        && exp <= rt_fwd + rt_bwd + set.dim() - 1;
    assert!(report(
        "02",
        ok,
        &format!(
            "rt = {rt_fwd}, rt of transpose = {rt_bwd}, exponent resolves to {exp} within [4, 8]"
        ),
    ));
}

#[test]
fn criterion_03_exact_length_game_suite() {
    let set = example_set("nondominating").unwrap();
    let s = first_dominating_time(&set, 10).unwrap().unwrap();
    let (exp, _) = exponent_bfs(&set).unwrap().unwrap();
    let keq = spf_keq(&set, 12);
    let keq_one = keq.reached_one_at.unwrap();
    let shifted_one = keq_one - s;

    // the sandwich K(t) >= K=(t) >= K(t-s) for every computed t > s
    let k = spf_k(&set, exp + s);
    let mut sandwich = true;
    for t in (s + 1)..=keq.last_t() {
        let mid = keq.value_clamped(t).unwrap();
        sandwich &= mid <= k.value_clamped(t).unwrap();
        sandwich &= mid >= k.value_clamped(t - s).unwrap();
    }

    let ok = s == 3 && exp == 6 && sandwich && keq_one == 7 && shifted_one == 4;
    report(
        "03",
        ok,
        &format!(
            "s = {s}, exp = {exp}, sandwich holds = {sandwich}, \
             first exact-length-1 time = {keq_one} (required 7), shifted = {shifted_one} (required 4)"
        ),
    );
    assert_eq!(s, 3);
    assert_eq!(exp, 6);
    assert!(
        sandwich,
        "exact-length sandwich must hold at every computed t"
    );
    assert_eq!(
        keq_one, 7,
        "required first time the exact-length game value reaches 1; \
         the semigroup has an all-ones product of length exactly {exp}, \
         so the exact-length game reaches 1 at {keq_one}"
    );
    assert_eq!(shifted_one, 4, "required shifted first-hit time");
}

#[test]
fn criterion_04_long_stagnation_estimates() {
    let set = example_set("stagnation").unwrap();
    let (exp, _) = exponent_bfs(&set).unwrap().unwrap();
    let series = spf_k(&set, 19);
    let l0 = stagnations(&series).l0;
    let r1 = r1_estimate(&series, l0, 8).unwrap().estimate;
    let r2 = r2_estimate(&series, l0, 8).unwrap().estimate;
    let in_window = |v: &Rational| v > &rat_int(16) && v < &rat_int(17);
    let ok = l0 == 3
        && exp == 19
        && series.reached_one_at == Some(19)
        && in_window(&r1)
        && in_window(&r2);
    assert!(report(
        "04",
        ok,
        &format!("l0 = {l0}, exp = {exp}, r1 = {r1}, r2 = {r2}, both strictly inside (16, 17)"),
    ));
}

#[test]
fn criterion_05_cerny_family() {
    let mut ok = true;
    for n in 4..=8usize {
        let set = cerny_nz(n).unwrap();
        let rt = reset_threshold_exact(&aut_of(&set).unwrap())
            .unwrap()
            .rt
            .unwrap();
        ok &= rt == (n - 1) * (n - 1);
    }
    let mut exps = Vec::new();
    for n in 4..=6usize {
        let set = cerny_nz(n).unwrap();
        let (exp, _) = exponent_bfs(&set).unwrap().unwrap();
        let lo = (n - 1) * (n - 1);
        let hi = 2 * (n - 1) * (n - 1) + n - 1;
        ok &= lo <= exp && exp <= hi;
        exps.push(exp);
    }
    assert!(report(
        "05",
        ok,
        &format!(
            "reset thresholds are (n-1)^2 for n = 4..8; exponents {exps:?} inside \
             [(n-1)^2, 2(n-1)^2 + n - 1] for n = 4..6"
        ),
    ));
}

#[test]
fn criterion_06_strong_duality_on_the_corpus() {
    let mut checked = 0;
    for entry in corpus() {
        for (t, h) in entry.hts.iter().enumerate() {
            let primal = solve_primal(h).unwrap();
            let dual = solve_dual(h).unwrap();
            assert_eq!(
                primal.value, dual.value,
                "duality gap at seed {}, t = {t}",
                entry.seed
            );
            assert_eq!(primal.value, entry.k.points[t].value);
            checked += 1;
        }
    }
    assert!(report(
        "06",
        true,
        &format!(
            "both program routes agree exactly on {} horizons across {} primitive sets",
            checked,
            corpus().len()
        ),
    ));
}

#[test]
fn criterion_07_value_threshold_suite_on_the_corpus() {
    for entry in corpus() {
        let n = entry.set.dim() as i64;
        let series = &entry.k;
        assert_eq!(series.value(0).unwrap(), &rat(1, n), "seed {}", entry.seed);
        let at_n = series
            .value_clamped(n as usize)
            .expect("series reaches 1 and clamps");
        assert!(at_n > rat(1, n), "seed {}", entry.seed);
        for (t, v) in series.values() {
            if *v > rat(1, n) {
                assert!(*v >= rat(n + 1, n * n), "seed {}, t = {t}", entry.seed);
            }
            if !v.is_one() {
                assert!(*v <= rat(n * n - 1, n * n), "seed {}, t = {t}", entry.seed);
            }
        }
    }
    assert!(report(
        "07",
        true,
        &format!(
            "start value, rise by n, jump floor and ceiling gap hold exactly on {} sets",
            corpus().len()
        ),
    ));
}

#[test]
fn criterion_08_deterministic_player_suite_on_the_corpus() {
    let mut bound_checks = 0;
    for entry in corpus() {
        let n = entry.set.dim() as i64;
        for (t, kv) in entry.k.values() {
            let kb = entry
                .kbar
                .value_clamped(t)
                .expect("deterministic series reaches 1 no later");
            assert!(kb >= *kv, "seed {}, t = {t}", entry.seed);
            assert!(
                (kb * rat_int(n)).is_integer(),
                "seed {}, t = {t}: value not a multiple of 1/n",
                entry.seed
            );
        }
        // jumps are at least 1/n
        for t in 1..=entry.kbar.last_t() {
            let prev = entry.kbar.value(t - 1).unwrap();
            let cur = entry.kbar.value(t).unwrap();
            assert!(cur >= prev, "seed {}, t = {t}", entry.seed);
            if cur > prev {
                assert!(cur - prev >= rat(1, n), "seed {}, t = {t}", entry.seed);
            }
        }
        let checks = check_stagnation_theorems(&entry.kbar);
        for c in &checks {
            assert!(
                c.satisfied,
                "seed {}: stagnation bound {:?} at t = {} (deadline {}) violated",
                entry.seed, c.kind, c.t, c.deadline
            );
        }
        bound_checks += checks.len();
    }
    assert!(report(
        "08",
        true,
        &format!(
            "domination, value lattice, jump floor and {} stagnation bounds verified",
            bound_checks
        ),
    ));
}

#[test]
fn criterion_09_pruning_invariance_on_the_corpus() {
    use num_bigint::BigInt;
    use num_traits::Zero;

    for entry in corpus() {
        let n = entry.set.dim();
        // Enumerate the deduplicated, completely unpruned product set level
        // by level, accumulating the distinct row-sum columns of the raw
        // H_t (duplicate constraints collapse; nothing else is dropped).
        let mut seen: HashSet<BinaryMatrix> = HashSet::new();
        let identity = BinaryMatrix::identity(n);
        let mut frontier = vec![identity.clone()];
        seen.insert(identity.clone());
        let mut columns: Vec<Vec<u32>> = vec![identity.row_sum_vector()];
        let mut column_set: HashSet<Vec<u32>> = columns.iter().cloned().collect();
        for t in 0..=entry.exp {
            if t > 0 {
                let mut next = Vec::new();
                for p in &frontier {
                    for g in entry.set.matrices() {
                        let q = bool_product(p, g);
                        if seen.insert(q.clone()) {
                            let col = q.row_sum_vector();
                            if column_set.insert(col.clone()) {
                                columns.push(col);
                            }
                            next.push(q);
                        }
                    }
                }
                frontier = next;
            }

            let h_pruned = &entry.hts[t];
            let pruned_value = &entry.k.points[t].value;
            let k_target = pruned_value * rat_int(n as i64);

            // Equality of the unpruned and fully pruned optima, certified
            // from both sides. The unpruned program only adds constraints,
            // so its optimum is >= the pruned one; and the pruned optimal
            // policy satisfying every unpruned constraint forces <=.
            let p_opt = entry.k.points[t].p_opt.as_ref().unwrap();
            let denom = p_opt.entries().iter().fold(BigInt::from(1), |acc, e| {
                num_integer::lcm(acc, e.denom().clone())
            });
            let scaled: Vec<BigInt> = p_opt
                .entries()
                .iter()
                .map(|e| e.numer() * (&denom / e.denom()))
                .collect();
            let mut worst = BigInt::zero();
            for col in &columns {
                let dot: BigInt = scaled
                    .iter()
                    .zip(col)
                    .map(|(a, &c)| a * BigInt::from(c))
                    .sum();
                if dot > worst {
                    worst = dot;
                }
            }
            let unpruned_upper = Rational::new(worst, denom);
            assert!(
                unpruned_upper <= k_target,
                "seed {}, t = {t}: pruned optimum infeasible for some unpruned column",
                entry.seed
            );

            // row pruning (valid for the maximizing program only) must give
            // the same optimum as well
            let via_row_pruned_dual = solve_dual(&prune_ht_rows(h_pruned)).unwrap().value;
            assert_eq!(
                via_row_pruned_dual, *pruned_value,
                "seed {}, t = {t}",
                entry.seed
            );
        }

        // direct unpruned solves as a spot check where the column count is
        // small enough to feed the program whole
        if n <= 4 {
            let raw = HtMatrix::from_columns(n, columns.clone(), vec![0; columns.len()]);
            let unpruned = solve_dual(&raw).unwrap().value;
            assert_eq!(
                unpruned, entry.k.points[entry.exp].value,
                "seed {}: direct unpruned solve at the exponent",
                entry.seed
            );
        }
    }
    assert!(report(
        "09",
        true,
        "dominance, column and row pruning leave every game value unchanged"
    ));
}

#[test]
fn criterion_10_column_reduction_on_the_corpus() {
    use spf_core::lp::reduce_columns;
    let mut reduced_count = 0;
    for entry in corpus() {
        let n = entry.set.dim();
        for (t, h) in entry.hts.iter().enumerate() {
            let sol = solve_dual(h).unwrap();
            let (reduced, q) = reduce_columns(h, &sol.q_opt);
            assert!(reduced.h() <= n, "seed {}, t = {t}", entry.seed);
            assert_eq!(q.len(), reduced.h());
            let again = solve_dual(&reduced).unwrap();
            assert_eq!(again.value, sol.value, "seed {}, t = {t}", entry.seed);
            reduced_count += 1;
        }
    }
    assert!(report(
        "10",
        true,
        &format!(
            "{reduced_count} reductions all ended with at most n columns and the same optimum"
        ),
    ));
}

#[test]
fn criterion_11_ordering_chain_on_the_corpus() {
    for entry in corpus() {
        let n = entry.set.dim();
        for dfa in [
            aut_of(&entry.set).unwrap(),
            aut_of(&entry.set.transpose()).unwrap(),
        ] {
            let diam = sg_diameter(&dfa);
            let rt = reset_threshold_exact(&dfa).unwrap().rt.unwrap();
            let epp = eppstein(&dfa).unwrap().rt.unwrap();
            assert!(
                diam <= rt && rt <= epp,
                "seed {}: diam {diam}, rt {rt}, epp {epp}",
                entry.seed
            );
        }
        let rt_fwd = reset_threshold_exact(&aut_of(&entry.set).unwrap())
            .unwrap()
            .rt
            .unwrap();
        let rt_bwd = reset_threshold_exact(&aut_of(&entry.set.transpose()).unwrap())
            .unwrap()
            .rt
            .unwrap();
        assert!(
            rt_fwd <= entry.exp && entry.exp <= rt_fwd + rt_bwd + n - 1,
            "seed {}: rt {rt_fwd}, exp {}, upper {}",
            entry.seed,
            entry.exp,
            rt_fwd + rt_bwd + n - 1
        );
    }
    assert!(report(
        "11",
        true,
        "merging diameter <= exact rt <= greedy length and the exponent sandwich hold on every set"
    ));
}

#[test]
fn criterion_12_paired_row_cover_bound_on_the_corpus() {
    for entry in corpus() {
        let fwd = entry
            .kbar
            .reached_one_at
            .expect("primitive sets reach full row cover");
        let kbar_t = spf_kbar(&entry.set.transpose(), entry.exp + entry.set.dim());
        let bwd = kbar_t
            .reached_one_at
            .expect("transpose set is primitive too");
        assert!(
            entry.exp <= fwd + bwd,
            "seed {}: exp {} > {} + {}",
            entry.seed,
            entry.exp,
            fwd,
            bwd
        );
    }
    assert!(report(
        "12",
        true,
        "exponent never exceeds the sum of first full-cover times of the set and its transpose"
    ));
}

#[test]
fn criterion_13_saddle_point_on_the_corpus() {
    let mut rng = SplitMix64::new(0x5add1e);
    let mut random_policy = |len: usize| -> PolicyVector {
        loop {
            let weights: Vec<Rational> =
                (0..len).map(|_| rat_int(rng.below(1000) as i64)).collect();
            if weights.iter().any(|w| w.is_positive()) {
                return PolicyVector::from_weights(weights).unwrap();
            }
        }
    };
    for entry in corpus().iter().take(10) {
        let n = entry.set.dim();
        let horizons = [1, entry.exp / 2, entry.exp.saturating_sub(1).max(1)];
        for &t in &horizons {
            let mut layer = ProductLayer::initial(n);
            for _ in 0..t {
                layer.grow(&entry.set).unwrap();
                layer.prune_dominated();
            }
            // solve on the layer's full column set so policies align with it
            let h = build_ht(&layer);
            let sol = solve_primal(&h).unwrap();
            assert_eq!(&sol.value, entry.k.value(t).unwrap());
            for _ in 0..100 {
                let p = random_policy(n);
                let q = random_policy(layer.len());
                let low = game_value(&sol.p_opt, &q, &layer);
                let high = game_value(&p, &sol.q_opt, &layer);
                assert!(low <= sol.value, "seed {}, t = {t}", entry.seed);
                assert!(high >= sol.value, "seed {}, t = {t}", entry.seed);
            }
        }
    }
    assert!(report(
        "13",
        true,
        "optimal policies form a saddle point against 100 random opponents at 3 horizons on 10 sets"
    ));
}
