//! Layer-by-layer construction of the product sets `M^{<=t}` and `M^t`,
//! dominance pruning, and the row-sum matrix `H_t`.
//!
//! Layers store the product matrices themselves, not just their row sums:
//! the boolean product does not act column-wise on row sums, so `H_{t+1}`
//! cannot be derived from `H_t` alone.

use std::collections::{HashMap, HashSet};

use crate::boolmat::{bool_product, BinaryMatrix, MatrixSet};
use crate::error::{Error, Result};

/// Default hard cap on the number of stored products per layer.
pub const DEFAULT_LAYER_CAP: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct LayerEntry {
    pub matrix: BinaryMatrix,
    /// Length of the shortest generating word seen for this product during
    /// the exploration that built the layer.
    pub length: usize,
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Stored(usize),
    /// Erased by dominance pruning; stays excluded from future expansion.
    Removed,
}

/// The deduplicated product set `M^{<=t}`, optionally dominance-pruned.
/// The identity is the length-0 product.
#[derive(Clone, Debug)]
pub struct ProductLayer {
    n: usize,
    horizon: usize,
    cap: usize,
    entries: Vec<LayerEntry>,
    index: HashMap<BinaryMatrix, Slot>,
}

impl ProductLayer {
    /// The layer `M^{<=0} = {I}`.
    pub fn initial(n: usize) -> Self {
        Self::initial_with_cap(n, DEFAULT_LAYER_CAP)
    }

    pub fn initial_with_cap(n: usize, cap: usize) -> Self {
        let identity = BinaryMatrix::identity(n);
        let mut index = HashMap::new();
        index.insert(identity.clone(), Slot::Stored(0));
        ProductLayer {
            n,
            horizon: 0,
            cap,
            entries: vec![LayerEntry {
                matrix: identity,
                length: 0,
            }],
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The horizon `t` of this layer.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LayerEntry] {
        &self.entries
    }

    pub fn matrices(&self) -> impl Iterator<Item = &BinaryMatrix> {
        self.entries.iter().map(|e| &e.matrix)
    }

    pub fn contains(&self, m: &BinaryMatrix) -> bool {
        matches!(self.index.get(m), Some(Slot::Stored(_)))
    }

    pub fn contains_all_ones(&self) -> bool {
        self.contains(&BinaryMatrix::all_ones(self.n))
    }

    /// Number of distinct products ever generated, stored or pruned. When
    /// an expansion step leaves this unchanged, the reachable product set
    /// has closed.
    pub fn known_count(&self) -> usize {
        self.index.len()
    }

    /// Length tag of the all-ones product, when present.
    pub fn all_ones_length(&self) -> Option<usize> {
        match self.index.get(&BinaryMatrix::all_ones(self.n)) {
            Some(Slot::Stored(i)) => Some(self.entries[*i].length),
            _ => None,
        }
    }

    /// One expansion step in place: adds every `P·M_i` over stored products
    /// `P`, deduplicated; new products are tagged with the new horizon.
    /// Products erased by dominance pruning are not re-admitted.
    pub fn grow(&mut self, set: &MatrixSet) -> Result<()> {
        assert_eq!(set.dim(), self.n, "dimension mismatch");
        self.horizon += 1;
        let new_len = self.horizon;
        let snapshot = self.entries.len();
        for idx in 0..snapshot {
            let base = self.entries[idx].matrix.clone();
            for gen in set.matrices() {
                let prod = bool_product(&base, gen);
                if self.index.contains_key(&prod) {
                    continue;
                }
                if self.entries.len() == self.cap {
                    return Err(Error::LayerCapExceeded {
                        cap: self.cap,
                        attempted: self.cap + 1,
                    });
                }
                self.index
                    .insert(prod.clone(), Slot::Stored(self.entries.len()));
                self.entries.push(LayerEntry {
                    matrix: prod,
                    length: new_len,
                });
            }
        }
        Ok(())
    }

    /// Erase every product dominated by another stored product, in place.
    /// Processing candidates by decreasing number of ones means every
    /// dominator is examined before anything it dominates, so comparing
    /// against the kept set alone is enough.
    pub fn prune_dominated(&mut self) {
        let count = self.entries.len();
        if count <= 1 {
            return;
        }
        let mut order: Vec<(u32, usize)> = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.matrix.row_sum_vector().iter().sum::<u32>(), i))
            .collect();
        order.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut keep = vec![false; count];
        if self.n <= 8 {
            // whole matrix packed into one word: domination is one bit test
            let packed: Vec<u64> = self
                .entries
                .iter()
                .map(|e| (0..self.n).fold(0u64, |acc, i| acc | (e.matrix.row_bits(i) << (8 * i))))
                .collect();
            let mut kept: Vec<u64> = Vec::new();
            let mut kept_idx: Vec<usize> = Vec::new();
            for &(_, i) in &order {
                let cand = packed[i];
                let dominated = kept.iter().any(|&k| cand & !k == 0);
                if !dominated {
                    kept.push(cand);
                    kept_idx.push(i);
                }
            }
            for i in kept_idx {
                keep[i] = true;
            }
        } else {
            let mut kept_idx: Vec<usize> = Vec::new();
            for &(_, i) in &order {
                let cand = &self.entries[i].matrix;
                let dominated = kept_idx
                    .iter()
                    .any(|&k| self.entries[k].matrix.dominates(cand));
                if !dominated {
                    kept_idx.push(i);
                }
            }
            for i in kept_idx {
                keep[i] = true;
            }
        }

        if keep.iter().all(|&k| k) {
            return;
        }
        let mut entries = Vec::with_capacity(count);
        for (i, entry) in self.entries.drain(..).enumerate() {
            if keep[i] {
                self.index
                    .insert(entry.matrix.clone(), Slot::Stored(entries.len()));
                entries.push(entry);
            } else {
                self.index.insert(entry.matrix.clone(), Slot::Removed);
            }
        }
        self.entries = entries;
    }
}

/// One expansion step: `M^{<=t+1} = M^{<=t} ∪ {P·M_i}`, deduplicated, with
/// new products tagged `t+1`.
pub fn expand(set: &MatrixSet, layer: &ProductLayer) -> Result<ProductLayer> {
    let mut out = layer.clone();
    out.grow(set)?;
    Ok(out)
}

/// Erase every product that is entrywise dominated by another stored
/// product. Erased products are excluded from future expansion for good:
/// any extension of a dominated product is dominated by the matching
/// extension of its dominator, so it can never contribute a better column.
pub fn prune_dominated_products(layer: &ProductLayer) -> ProductLayer {
    let mut out = layer.clone();
    out.prune_dominated();
    out
}

/// The `n x h_t` integer matrix whose columns are the row-sum vectors of the
/// stored products, in layer order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HtMatrix {
    n: usize,
    /// Dimension of the underlying matrices. Stays put when rows are
    /// pruned away, since the game value is normalized by it and entries
    /// range up to it.
    game_dim: usize,
    columns: Vec<Vec<u32>>,
    /// Length tag of the product each column came from.
    origins: Vec<usize>,
}

impl HtMatrix {
    pub fn from_columns(n: usize, columns: Vec<Vec<u32>>, origins: Vec<usize>) -> Self {
        assert_eq!(columns.len(), origins.len());
        assert!(columns.iter().all(|c| c.len() == n), "ragged columns");
        HtMatrix {
            n,
            game_dim: n,
            columns,
            origins,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The game normalization dimension (the matrix dimension), which can
    /// exceed the stored row count after row pruning.
    pub fn game_dim(&self) -> usize {
        self.game_dim
    }

    /// Number of columns `h_t`.
    pub fn h(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.columns[j][i]
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    pub fn origins(&self) -> &[usize] {
        &self.origins
    }

    pub fn row_max(&self, i: usize) -> u32 {
        self.columns.iter().map(|c| c[i]).max().unwrap_or(0)
    }

    /// Whether some column equals `n·e`, i.e. some product is all-ones.
    pub fn has_full_column(&self) -> bool {
        let n = self.n as u32;
        self.columns.iter().any(|c| c.iter().all(|&v| v == n))
    }
}

/// Build `H_t` from a layer: one column per stored product.
pub fn build_ht(layer: &ProductLayer) -> HtMatrix {
    assert!(!layer.is_empty(), "layer must be nonempty");
    let columns: Vec<Vec<u32>> = layer
        .entries
        .iter()
        .map(|e| e.matrix.row_sum_vector())
        .collect();
    let origins = layer.entries.iter().map(|e| e.length).collect();
    HtMatrix::from_columns(layer.n, columns, origins)
}

/// Build `H` for an explicit list of matrices, all tagged with one length.
pub fn build_ht_for(matrices: &[BinaryMatrix], length: usize) -> HtMatrix {
    assert!(!matrices.is_empty());
    let n = matrices[0].dim();
    let columns: Vec<Vec<u32>> = matrices.iter().map(|m| m.row_sum_vector()).collect();
    let origins = vec![length; matrices.len()];
    HtMatrix::from_columns(n, columns, origins)
}

/// Drop every column that is entrywise dominated by another column. Such a
/// column's constraint in the minimizing program is implied by its
/// dominator's, so the optimum is unchanged.
pub fn prune_ht_columns(h: &HtMatrix) -> HtMatrix {
    let m = h.h();
    let mut keep = vec![true; m];
    for i in 0..m {
        if !keep[i] {
            continue;
        }
        for j in 0..m {
            if i == j || !keep[j] {
                continue;
            }
            let ci = &h.columns[i];
            let cj = &h.columns[j];
            let dominated = cj.iter().zip(ci).all(|(a, b)| a <= b);
            if dominated && (ci != cj || j > i) {
                keep[j] = false;
            }
        }
    }
    let mut columns = Vec::new();
    let mut origins = Vec::new();
    for i in 0..m {
        if keep[i] {
            columns.push(h.columns[i].clone());
            origins.push(h.origins[i]);
        }
    }
    HtMatrix::from_columns(h.n, columns, origins)
}

/// Drop every row that entrywise dominates another row. Valid only for the
/// maximizing program: a dominating row's covering constraint is implied by
/// the dominated row's, so the dual optimum is unchanged. The minimizing
/// program's policy loses its indexing, so this is not applied there.
pub fn prune_ht_rows(h: &HtMatrix) -> HtMatrix {
    let n = h.n;
    let mut keep = vec![true; n];
    let row = |i: usize| -> Vec<u32> { h.columns.iter().map(|c| c[i]).collect() };
    let rows: Vec<Vec<u32>> = (0..n).map(row).collect();
    for i in 0..n {
        if !keep[i] {
            continue;
        }
        for j in 0..n {
            if i == j || !keep[j] {
                continue;
            }
            // j erased if it dominates i
            let dominating = rows[j].iter().zip(&rows[i]).all(|(a, b)| a >= b);
            if dominating && (rows[i] != rows[j] || j > i) {
                keep[j] = false;
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    let columns: Vec<Vec<u32>> = h
        .columns
        .iter()
        .map(|c| kept.iter().map(|&i| c[i]).collect())
        .collect();
    let mut out = HtMatrix::from_columns(kept.len(), columns, h.origins.clone());
    out.game_dim = h.game_dim;
    out
}

/// Smallest `s <= t_cap` such that `M^{<=s}` contains a product dominating a
/// permutation matrix, or `None` within the cap.
pub fn first_dominating_time(set: &MatrixSet, t_cap: usize) -> Result<Option<usize>> {
    assert!(t_cap >= 1);
    let mut layer = ProductLayer::initial(set.dim());
    for s in 1..=t_cap {
        layer.grow(set)?;
        if layer
            .entries
            .iter()
            .any(|e| e.length == s && e.matrix.dominates_permutation())
        {
            return Ok(Some(s));
        }
        layer.prune_dominated();
        // a pruned survivor of length <= s dominating a permutation would
        // have been caught at its own generation step
    }
    Ok(None)
}

/// The sets `M^1, M^2, ..., M^{t_max}` of products of exact length,
/// deduplicated within each level. With `prune` set, products dominated by
/// another product of the same length are dropped; same-length extensions
/// preserve the dominance, so the later levels stay faithful.
pub fn exact_levels(
    set: &MatrixSet,
    t_max: usize,
    prune: bool,
    cap: usize,
) -> Result<Vec<Vec<BinaryMatrix>>> {
    let mut levels = vec![vec![BinaryMatrix::identity(set.dim())]];
    for _ in 1..=t_max {
        let next = exact_levels_step(set, levels.last().unwrap(), prune, cap)?;
        levels.push(next);
    }
    Ok(levels)
}

/// One exact-length step: all `P·M_i` over the previous level, deduplicated
/// (and optionally pruned within the level).
pub fn exact_levels_step(
    set: &MatrixSet,
    prev: &[BinaryMatrix],
    prune: bool,
    cap: usize,
) -> Result<Vec<BinaryMatrix>> {
    let mut seen = HashSet::new();
    let mut next = Vec::new();
    for p in prev {
        for g in set.matrices() {
            let q = bool_product(p, g);
            if seen.insert(q.clone()) {
                if next.len() == cap {
                    return Err(Error::LayerCapExceeded {
                        cap,
                        attempted: cap + 1,
                    });
                }
                next.push(q);
            }
        }
    }
    Ok(if prune { prune_level(next) } else { next })
}

fn prune_level(mats: Vec<BinaryMatrix>) -> Vec<BinaryMatrix> {
    let m = mats.len();
    let mut keep = vec![true; m];
    for i in 0..m {
        if !keep[i] {
            continue;
        }
        for j in 0..m {
            if i != j && keep[j] && mats[i].dominates(&mats[j]) && mats[i] != mats[j] {
                keep[j] = false;
            }
        }
    }
    mats.into_iter()
        .zip(keep)
        .filter_map(|(m, k)| k.then_some(m))
        .collect()
}
