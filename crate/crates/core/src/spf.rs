//! The synchronizing probability function of a binary NZ-matrix set and its
//! variants, stagnation analysis, the subset multigraph, and the game value.
//!
//! Three series are computed over a growing product set:
//!
//! * `K`  — exact game value over products of length at most `t`;
//! * `K̄` — the same game with the row player restricted to deterministic
//!   choices, which collapses to `min_i max_j H_t[i,j] / n`;
//! * `K⁼` — the game restricted to products of length exactly `t`.
//!
//! `K` and `K̄` are nondecreasing and reach 1 exactly when the set is
//! primitive; the first time they do is the exponent (for `K`).

use num_traits::{One, Zero};

use crate::automata::aut_of;
use crate::boolmat::{BinaryMatrix, MatrixSet};
use crate::error::{Error, Result};
use crate::lp::{rat_int, solve_primal, PolicyVector, Rational};
use crate::semigroup::{
    build_ht, build_ht_for, exact_levels_step, prune_ht_columns, HtMatrix, ProductLayer,
    DEFAULT_LAYER_CAP,
};

/// Default cap on the dimension for subset-space constructions.
pub const DEFAULT_SUBSET_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpfMode {
    K,
    KBar,
    KEq,
}

impl std::fmt::Display for SpfMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpfMode::K => write!(f, "k"),
            SpfMode::KBar => write!(f, "kbar"),
            SpfMode::KEq => write!(f, "keq"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpfOptions {
    /// Erase dominated products from layers as they grow.
    pub prune_dominance: bool,
    /// Erase dominated columns from `H_t` before solving.
    pub prune_columns: bool,
    pub layer_cap: usize,
}

impl Default for SpfOptions {
    fn default() -> Self {
        SpfOptions {
            prune_dominance: true,
            prune_columns: true,
            layer_cap: DEFAULT_LAYER_CAP,
        }
    }
}

impl SpfOptions {
    pub fn no_pruning() -> Self {
        SpfOptions {
            prune_dominance: false,
            prune_columns: false,
            layer_cap: DEFAULT_LAYER_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpfPoint {
    pub t: usize,
    pub value: Rational,
    /// Optimal row policy at this horizon (mode `K`/`K⁼`).
    pub p_opt: Option<PolicyVector>,
    /// Columns of the (pruned) `H_t` tight at the optimum (mode `K`/`K⁼`).
    pub tight_columns: Option<Vec<usize>>,
    /// Rows attaining the min row-max (mode `K̄`), i.e. the optimal
    /// deterministic choices of the row player.
    pub optimal_rows: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct SpfSeries {
    pub mode: SpfMode,
    pub n: usize,
    pub points: Vec<SpfPoint>,
    /// First horizon with value exactly 1, when reached.
    pub reached_one_at: Option<usize>,
    /// The series was cut short by the layer cap.
    pub cap_hit: bool,
    /// Horizon at which the product set closed without new products; the
    /// series is constant from there on.
    pub closed_at: Option<usize>,
}

impl SpfSeries {
    pub fn value(&self, t: usize) -> Option<&Rational> {
        self.points.get(t).map(|p| {
            debug_assert_eq!(p.t, t);
            &p.value
        })
    }

    /// Value at `t`, extending past the computed horizon where the series
    /// is known to stay constant (after reaching 1 or closing).
    pub fn value_clamped(&self, t: usize) -> Option<Rational> {
        if let Some(p) = self.points.get(t) {
            return Some(p.value.clone());
        }
        match (self.reached_one_at, self.closed_at) {
            (Some(t0), _) if t >= t0 => Some(Rational::one()),
            (_, Some(_)) => self.points.last().map(|p| p.value.clone()),
            _ => None,
        }
    }

    pub fn last_t(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn values(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.points.iter().map(|p| (p.t, &p.value))
    }
}

/// The exact game-value series `K(t)` for `t = 0..=t_max`, stopping early
/// once the value 1 is reached (that horizon is the exponent). A layer-cap
/// overflow truncates the series and sets `cap_hit`.
pub fn spf_k(set: &MatrixSet, t_max: usize) -> SpfSeries {
    spf_k_with(set, t_max, &SpfOptions::default())
}

pub fn spf_k_with(set: &MatrixSet, t_max: usize, opts: &SpfOptions) -> SpfSeries {
    let n = set.dim();
    let mut series = SpfSeries {
        mode: SpfMode::K,
        n,
        points: Vec::new(),
        reached_one_at: None,
        cap_hit: false,
        closed_at: None,
    };
    let mut layer = ProductLayer::initial_with_cap(n, opts.layer_cap);
    for t in 0..=t_max {
        if t > 0 {
            let before = layer.known_count();
            if layer.grow(set).is_err() {
                series.cap_hit = true;
                break;
            }
            if layer.known_count() == before {
                series.closed_at = Some(t - 1);
                break;
            }
            if opts.prune_dominance {
                layer.prune_dominated();
            }
        }
        let mut h = build_ht(&layer);
        if opts.prune_columns {
            h = prune_ht_columns(&h);
        }
        let sol = solve_primal(&h).expect("layer Ht is well formed");
        let one = sol.value.is_one();
        series.points.push(SpfPoint {
            t,
            value: sol.value,
            p_opt: Some(sol.p_opt),
            tight_columns: Some(sol.tight_columns),
            optimal_rows: None,
        });
        if one {
            series.reached_one_at = Some(t);
            break;
        }
    }
    series
}

/// The deterministic-row-player series `K̄(t)` by its closed form
/// `min_i max_j H_t[i,j] / n`; no linear program is solved.
pub fn spf_kbar(set: &MatrixSet, t_max: usize) -> SpfSeries {
    spf_kbar_with(set, t_max, &SpfOptions::default())
}

pub fn spf_kbar_with(set: &MatrixSet, t_max: usize, opts: &SpfOptions) -> SpfSeries {
    let n = set.dim();
    let mut series = SpfSeries {
        mode: SpfMode::KBar,
        n,
        points: Vec::new(),
        reached_one_at: None,
        cap_hit: false,
        closed_at: None,
    };
    let mut layer = ProductLayer::initial_with_cap(n, opts.layer_cap);
    for t in 0..=t_max {
        if t > 0 {
            let before = layer.known_count();
            if layer.grow(set).is_err() {
                series.cap_hit = true;
                break;
            }
            if layer.known_count() == before {
                series.closed_at = Some(t - 1);
                break;
            }
            if opts.prune_dominance {
                layer.prune_dominated();
            }
        }
        let h = build_ht(&layer);
        let basis = kbar_optimal_rows(&h);
        let value = rat_int(h.row_max(basis[0]) as i64) / rat_int(n as i64);
        let one = value.is_one();
        series.points.push(SpfPoint {
            t,
            value,
            p_opt: None,
            tight_columns: None,
            optimal_rows: Some(basis),
        });
        if one {
            series.reached_one_at = Some(t);
            break;
        }
    }
    series
}

/// The exact-length series `K⁼(t)`: the game where the column player only
/// plays products of length exactly `t`.
pub fn spf_keq(set: &MatrixSet, t_max: usize) -> SpfSeries {
    spf_keq_with(set, t_max, &SpfOptions::default())
}

pub fn spf_keq_with(set: &MatrixSet, t_max: usize, opts: &SpfOptions) -> SpfSeries {
    let n = set.dim();
    let mut series = SpfSeries {
        mode: SpfMode::KEq,
        n,
        points: Vec::new(),
        reached_one_at: None,
        cap_hit: false,
        closed_at: None,
    };
    let mut level = vec![BinaryMatrix::identity(n)];
    for t in 0..=t_max {
        if t > 0 {
            // one exact-length step; a cap overflow keeps the prefix
            match exact_levels_step(set, &level, opts.prune_dominance, opts.layer_cap) {
                Ok(next) => level = next,
                Err(_) => {
                    series.cap_hit = true;
                    break;
                }
            }
        }
        let mut h = build_ht_for(&level, t);
        if opts.prune_columns {
            h = prune_ht_columns(&h);
        }
        let sol = solve_primal(&h).expect("level Ht is well formed");
        let one = sol.value.is_one();
        series.points.push(SpfPoint {
            t,
            value: sol.value,
            p_opt: Some(sol.p_opt),
            tight_columns: Some(sol.tight_columns),
            optimal_rows: None,
        });
        if one {
            // once the all-ones product appears it persists under any NZ
            // generator, so the series stays at 1
            series.reached_one_at = Some(t);
            break;
        }
    }
    series
}

/// Maximal constant runs of a series. `intervals` holds `(t̄, l)` with
/// `value(t̄) = ... = value(t̄+l)` maximal and `l >= 1`; `l0` is the length
/// of the run starting at `t = 0` (zero when the series rises immediately).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagnationReport {
    pub l0: usize,
    pub intervals: Vec<(usize, usize)>,
}

pub fn stagnations(series: &SpfSeries) -> StagnationReport {
    assert!(!series.points.is_empty(), "series must be nonempty");
    let values: Vec<&Rational> = series.points.iter().map(|p| &p.value).collect();
    let mut intervals = Vec::new();
    let mut start = 0;
    for t in 1..=values.len() {
        if t == values.len() || values[t] != values[start] {
            if t - 1 > start {
                intervals.push((start, t - 1 - start));
            }
            start = t;
        }
    }
    let l0 = match intervals.first() {
        Some(&(0, l)) => l,
        _ => 0,
    };
    StagnationReport { l0, intervals }
}

/// Rows of `H` attaining `min_i max_j H[i,j]`: the optimal deterministic
/// choices of the row player, as indices into the canonical basis.
pub fn kbar_optimal_rows(h: &HtMatrix) -> Vec<usize> {
    let maxima: Vec<u32> = (0..h.n()).map(|i| h.row_max(i)).collect();
    let best = *maxima.iter().min().expect("H has rows");
    (0..h.n()).filter(|&i| maxima[i] == best).collect()
}

/// The optimal deterministic choices together with the value they attain.
#[derive(Clone, Debug)]
pub struct OptimalBasisSet {
    pub rows: Vec<usize>,
    pub value: Rational,
}

pub fn optimal_basis_set(h: &HtMatrix) -> OptimalBasisSet {
    let rows = kbar_optimal_rows(h);
    let value = rat_int(h.row_max(rows[0]) as i64) / rat_int(h.game_dim() as i64);
    OptimalBasisSet { rows, value }
}

/// Membership oracle for the optimal set of the minimizing program at value
/// `k/n`: `p` belongs iff it is feasible with that objective, i.e.
/// `p^T H <= n * value` entrywise.
pub fn in_optimal_set(h: &HtMatrix, value: &Rational, p: &PolicyVector) -> bool {
    assert_eq!(p.len(), h.n(), "dimension mismatch");
    let k = value * rat_int(h.game_dim() as i64);
    (0..h.h()).all(|j| {
        let dot: Rational = (0..h.n())
            .map(|i| p.get(i) * rat_int(h.entry(i, j) as i64))
            .sum();
        dot <= k
    })
}

/// At a stagnation `K(t) = K(t+1)`, the optimal set can only shrink, and it
/// is stable under the transposed action of every letter of the associated
/// DFA. Verifies both facts for the computed optimal vertex at `t+1`.
pub fn check_pt_containment(set: &MatrixSet, t: usize) -> Result<bool> {
    let opts = SpfOptions::default();
    let mut layer = ProductLayer::initial_with_cap(set.dim(), opts.layer_cap);
    for _ in 0..t {
        layer.grow(set)?;
        layer.prune_dominated();
    }
    let h_t = prune_ht_columns(&build_ht(&layer));
    let mut layer_next = layer.clone();
    layer_next.grow(set)?;
    layer_next.prune_dominated();
    let h_next = prune_ht_columns(&build_ht(&layer_next));

    let sol_t = solve_primal(&h_t)?;
    let sol_next = solve_primal(&h_next)?;
    if sol_t.value != sol_next.value {
        return Err(Error::Invalid(format!(
            "no stagnation at t = {t}: K(t) != K(t+1)"
        )));
    }

    let p_next = &sol_next.p_opt;
    if !in_optimal_set(&h_t, &sol_t.value, p_next) {
        return Ok(false);
    }
    let dfa = aut_of(set)?;
    for letter in 0..dfa.letter_count() {
        let mut entries = vec![Rational::zero(); set.dim()];
        for j in 0..set.dim() {
            entries[dfa.delta(letter, j)] += p_next.get(j);
        }
        let image = PolicyVector::new(entries).expect("transposed letter action is stochastic");
        if !in_optimal_set(&h_t, &sol_t.value, &image) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The full subset multigraph: one vertex per nonzero binary vector, one
/// labeled edge per generator, `v -> [v^T M]`.
#[derive(Clone, Debug)]
pub struct SubsetMultigraph {
    n: usize,
    m: usize,
    /// `succ[label][v - 1]` is the image mask of vertex mask `v`.
    succ: Vec<Vec<u64>>,
}

impl SubsetMultigraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label_count(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> usize {
        (1usize << self.n) - 1
    }

    /// Image of the vertex with mask `v` (nonzero) under generator `label`.
    pub fn successor(&self, v: u64, label: usize) -> u64 {
        assert!(v > 0 && (v as u128) < (1u128 << self.n));
        self.succ[label][(v - 1) as usize]
    }
}

pub fn build_subset_multigraph(set: &MatrixSet) -> Result<SubsetMultigraph> {
    build_subset_multigraph_with_cap(set, DEFAULT_SUBSET_CAP)
}

pub fn build_subset_multigraph_with_cap(set: &MatrixSet, cap: usize) -> Result<SubsetMultigraph> {
    let n = set.dim();
    if n > cap {
        return Err(Error::StateCapExceeded { cap, n });
    }
    let count = (1usize << n) - 1;
    let mut succ = Vec::with_capacity(set.len());
    for mat in set.matrices() {
        let rows: Vec<u64> = (0..n).map(|i| mat.row_bits(i)).collect();
        let mut images = Vec::with_capacity(count);
        for v in 1..=count as u64 {
            let mut acc = 0u64;
            let mut sel = v;
            while sel != 0 {
                let k = sel.trailing_zeros() as usize;
                acc |= rows[k];
                sel &= sel - 1;
            }
            images.push(acc);
        }
        succ.push(images);
    }
    Ok(SubsetMultigraph {
        n,
        m: set.len(),
        succ,
    })
}

/// The probability that the column player wins when the players mix with
/// `q` over the layer's products and `p` over start vertices:
/// `sum_j q_j * p^T (A_j e) / n`.
///
/// # Panics
///
/// Panics if `p` does not match the layer dimension or `q` does not match
/// the layer size.
pub fn game_value(p: &PolicyVector, q: &PolicyVector, layer: &ProductLayer) -> Rational {
    assert_eq!(p.len(), layer.dim(), "dimension mismatch");
    assert_eq!(q.len(), layer.len(), "dimension mismatch");
    let mut total = Rational::zero();
    for (j, entry) in layer.entries().iter().enumerate() {
        if q.get(j).is_zero() {
            continue;
        }
        let row_sums = entry.matrix.row_sum_vector();
        let dot: Rational = (0..layer.dim())
            .map(|i| p.get(i) * rat_int(row_sums[i] as i64))
            .sum();
        total += q.get(j) * dot;
    }
    total / rat_int(layer.dim() as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StagnationBoundKind {
    /// Fewer than `n` optimal deterministic choices: the value must rise
    /// within `n - 1` further steps.
    SmallBasis,
    /// All `n` choices optimal at value `k/n`: the value must rise within
    /// `ceil(n^2 (k-1) / 2k) + n` further steps.
    FullBasis,
    /// The value at `t = n` must exceed the value at `t = 0`.
    InitialRise,
}

#[derive(Clone, Debug)]
pub struct StagnationBoundCheck {
    pub kind: StagnationBoundKind,
    pub t: usize,
    pub deadline: usize,
    pub satisfied: bool,
}

/// Evaluate every stagnation bound of the deterministic-player series that
/// the computed horizon can decide. The series must come from `spf_kbar` on
/// a primitive set; each check compares the value at the bound's deadline
/// against the stagnating value.
pub fn check_stagnation_theorems(series: &SpfSeries) -> Vec<StagnationBoundCheck> {
    assert_eq!(
        series.mode,
        SpfMode::KBar,
        "bounds apply to the kbar series"
    );
    let n = series.n;
    let mut checks = Vec::new();

    if let Some(at_n) = series.value_clamped(n) {
        checks.push(StagnationBoundCheck {
            kind: StagnationBoundKind::InitialRise,
            t: 0,
            deadline: n,
            satisfied: at_n > *series.value(0).expect("nonempty series"),
        });
    }

    for t in 0..series.last_t() {
        let value = series.value(t).unwrap().clone();
        if value.is_one() || *series.value(t + 1).unwrap() != value {
            continue;
        }
        let basis = series.points[t]
            .optimal_rows
            .as_ref()
            .expect("kbar series stores optimal rows");
        let (kind, deadline) = if basis.len() < n {
            (StagnationBoundKind::SmallBasis, t + n - 1)
        } else {
            // k = n * value is an integer for the kbar series
            let k = (value.clone() * rat_int(n as i64))
                .to_integer()
                .try_into()
                .unwrap_or(1usize);
            let num = n * n * (k - 1);
            let den = 2 * k;
            let ceil = num.div_ceil(den);
            (StagnationBoundKind::FullBasis, t + ceil + n)
        };
        if let Some(at_deadline) = series.value_clamped(deadline) {
            checks.push(StagnationBoundCheck {
                kind,
                t,
                deadline,
                satisfied: at_deadline > value,
            });
        }
    }
    checks
}
