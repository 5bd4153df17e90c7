//! The DFA side: the associated automaton of a matrix set, synchronization,
//! reset thresholds (exact and greedy), the pair graph, and the exponent
//! bridge between a primitive set and its automata.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::boolmat::{bool_product, BinaryMatrix, MatrixSet};
use crate::error::{Error, Result};

/// Default cap on the number of letters materialized by `aut_of`.
pub const DEFAULT_LETTER_CAP: u128 = 1_000_000;
/// Default cap on the state count for subset-space searches.
pub const DEFAULT_STATE_CAP: usize = 20;
/// Default cap on distinct products explored by `exponent_bfs`.
pub const DEFAULT_CLOSURE_CAP: usize = 4_000_000;

/// A complete DFA in matrix representation: every letter is binary and
/// row-stochastic.
#[derive(Clone, Debug)]
pub struct Dfa {
    n: usize,
    letters: Vec<BinaryMatrix>,
    /// `delta[letter][state]` = image state.
    delta: Vec<Vec<usize>>,
}

impl Dfa {
    pub fn new(letters: Vec<BinaryMatrix>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Invalid("a DFA needs at least one letter".into()));
        }
        let n = letters[0].dim();
        if letters.iter().any(|l| l.dim() != n) {
            return Err(Error::Invalid("letters must share one dimension".into()));
        }
        if letters.iter().any(|l| !l.is_binary_row_stochastic()) {
            return Err(Error::Invalid(
                "letters must have exactly one 1 per row".into(),
            ));
        }
        let delta = letters
            .iter()
            .map(|l| {
                (0..n)
                    .map(|i| l.row_bits(i).trailing_zeros() as usize)
                    .collect()
            })
            .collect();
        Ok(Dfa { n, letters, delta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[BinaryMatrix] {
        &self.letters
    }

    pub fn delta(&self, letter: usize, state: usize) -> usize {
        self.delta[letter][state]
    }

    /// Image of a state set (bitmask) under a letter.
    pub fn image_mask(&self, mask: u64, letter: usize) -> u64 {
        let mut out = 0u64;
        let mut sel = mask;
        while sel != 0 {
            let s = sel.trailing_zeros() as usize;
            out |= 1u64 << self.delta[letter][s];
            sel &= sel - 1;
        }
        out
    }

    pub fn image_mask_word(&self, mask: u64, word: &[usize]) -> u64 {
        word.iter().fold(mask, |m, &a| self.image_mask(m, a))
    }

    fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }
}

/// The DFA whose letters are all binary row-stochastic matrices dominated
/// entrywise by some generator: every way of keeping exactly one 1 per row.
pub fn aut_of(set: &MatrixSet) -> Result<Dfa> {
    aut_of_with_cap(set, DEFAULT_LETTER_CAP)
}

pub fn aut_of_with_cap(set: &MatrixSet, cap: u128) -> Result<Dfa> {
    if !set.is_nz() {
        return Err(Error::Invalid("generators must be NZ".into()));
    }
    let n = set.dim();
    let mut count: u128 = 0;
    for mat in set.matrices() {
        let mut per: u128 = 1;
        for i in 0..n {
            per = per.saturating_mul(mat.row_bits(i).count_ones() as u128);
        }
        count = count.saturating_add(per);
    }
    if count > cap {
        return Err(Error::LetterCapExceeded { cap, count });
    }

    let mut letters = Vec::new();
    let mut seen = HashSet::new();
    for mat in set.matrices() {
        let choices: Vec<Vec<usize>> = (0..n).map(|i| mat.row(i).support()).collect();
        // odometer over one choice per row, row-major
        let mut pick = vec![0usize; n];
        loop {
            let mut letter = BinaryMatrix::zeros(n);
            for (i, &c) in pick.iter().enumerate() {
                letter.set(i, choices[i][c], true);
            }
            if seen.insert(letter.clone()) {
                letters.push(letter);
            }
            let mut row = n;
            loop {
                if row == 0 {
                    break;
                }
                row -= 1;
                pick[row] += 1;
                if pick[row] < choices[row].len() {
                    break;
                }
                pick[row] = 0;
                if row == 0 {
                    break;
                }
            }
            if pick.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    Dfa::new(letters)
}

/// The pair graph on unordered state pairs `(i, j)`, `i <= j`, with one
/// labeled edge per letter.
#[derive(Clone, Debug)]
pub struct SquareGraph {
    n: usize,
    verts: Vec<(usize, usize)>,
    /// `succ[letter][v]` = index of the image vertex.
    succ: Vec<Vec<usize>>,
}

impl SquareGraph {
    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn vertex(&self, idx: usize) -> (usize, usize) {
        self.verts[idx]
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        tri_index(self.n, i, j)
    }

    pub fn successor(&self, letter: usize, idx: usize) -> usize {
        self.succ[letter][idx]
    }

    pub fn label_count(&self) -> usize {
        self.succ.len()
    }

    pub fn is_diagonal(&self, idx: usize) -> bool {
        let (i, j) = self.verts[idx];
        i == j
    }

    /// Shortest distance from every vertex to the diagonal, `None` where the
    /// diagonal is unreachable. Multi-source backward BFS.
    pub fn merge_distances(&self) -> Vec<Option<usize>> {
        let count = self.vertex_count();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); count];
        for outs in &self.succ {
            for (v, &w) in outs.iter().enumerate() {
                rev[w].push(v);
            }
        }
        let mut dist = vec![None; count];
        let mut queue = VecDeque::new();
        for (v, d) in dist.iter_mut().enumerate() {
            if self.is_diagonal(v) {
                *d = Some(0);
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in &rev[v] {
                if dist[u].is_none() {
                    dist[u] = Some(dist[v].unwrap() + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * (i + 1) / 2 + j
}

pub fn square_graph(dfa: &Dfa) -> SquareGraph {
    let n = dfa.n();
    let mut verts = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            verts.push((i, j));
        }
    }
    let succ = (0..dfa.letter_count())
        .map(|a| {
            verts
                .iter()
                .map(|&(i, j)| {
                    let (x, y) = (dfa.delta(a, i), dfa.delta(a, j));
                    let (x, y) = if x <= y { (x, y) } else { (y, x) };
                    tri_index(n, x, y)
                })
                .collect()
        })
        .collect();
    SquareGraph { n, verts, succ }
}

/// A DFA is synchronizing iff every pair of states can be merged, i.e.
/// every pair-graph vertex reaches the diagonal.
pub fn is_synchronizing(dfa: &Dfa) -> bool {
    square_graph(dfa)
        .merge_distances()
        .iter()
        .all(|d| d.is_some())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResetMethod {
    Exact,
    Eppstein,
    DiameterLowerBound,
}

/// Outcome of a reset-word computation. For `Exact`, `rt` is the reset
/// threshold and the witness has exactly that length; for `Eppstein`, `rt`
/// is the greedy word length, an upper bound on the true threshold.
#[derive(Clone, Debug)]
pub struct ResetResult {
    pub synchronizing: bool,
    pub rt: Option<usize>,
    pub witness_word: Option<Vec<usize>>,
    pub method: ResetMethod,
}

/// Shortest reset word via breadth-first search over state subsets, from
/// the full set down to any singleton.
pub fn reset_threshold_exact(dfa: &Dfa) -> Result<ResetResult> {
    reset_threshold_exact_with_cap(dfa, DEFAULT_STATE_CAP)
}

pub fn reset_threshold_exact_with_cap(dfa: &Dfa, state_cap: usize) -> Result<ResetResult> {
    let n = dfa.n();
    if n > state_cap {
        return Err(Error::StateCapExceeded { cap: state_cap, n });
    }
    let full = dfa.full_mask();
    if full.count_ones() == 1 {
        return Ok(ResetResult {
            synchronizing: true,
            rt: Some(0),
            witness_word: Some(Vec::new()),
            method: ResetMethod::Exact,
        });
    }
    let mut parent: HashMap<u64, (u64, usize)> = HashMap::new();
    let mut dist: HashMap<u64, usize> = HashMap::new();
    dist.insert(full, 0);
    let mut queue = VecDeque::new();
    queue.push_back(full);
    while let Some(mask) = queue.pop_front() {
        let d = dist[&mask];
        for a in 0..dfa.letter_count() {
            let img = dfa.image_mask(mask, a);
            if dist.contains_key(&img) {
                continue;
            }
            dist.insert(img, d + 1);
            parent.insert(img, (mask, a));
            if img.count_ones() == 1 {
                let mut word = Vec::with_capacity(d + 1);
                let mut cur = img;
                while cur != full {
                    let (prev, letter) = parent[&cur];
                    word.push(letter);
                    cur = prev;
                }
                word.reverse();
                return Ok(ResetResult {
                    synchronizing: true,
                    rt: Some(d + 1),
                    witness_word: Some(word),
                    method: ResetMethod::Exact,
                });
            }
            queue.push_back(img);
        }
    }
    Ok(ResetResult {
        synchronizing: false,
        rt: None,
        witness_word: None,
        method: ResetMethod::Exact,
    })
}

/// Greedy synchronizing word: repeatedly merge the cheapest pair of the
/// current image (ties: lexicographically smallest pair, then smallest
/// letters) and apply its merging word to the whole image. The total length
/// is an upper bound on the reset threshold.
pub fn eppstein(dfa: &Dfa) -> Result<ResetResult> {
    let sg = square_graph(dfa);
    let dist = sg.merge_distances();
    if dist.iter().any(|d| d.is_none()) {
        return Err(Error::NotSynchronizing);
    }
    let n = dfa.n();
    let mut mask = dfa.full_mask();
    let mut word: Vec<usize> = Vec::new();
    while mask.count_ones() > 1 {
        let states: Vec<usize> = (0..n).filter(|&s| mask >> s & 1 == 1).collect();
        let mut best: Option<(usize, usize, usize)> = None; // (dist, i, j)
        for (ii, &i) in states.iter().enumerate() {
            for &j in &states[ii + 1..] {
                let d = dist[tri_index(n, i, j)].unwrap();
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let (d, i, j) = best.expect("non-singleton image has a pair");
        // lexicographically smallest shortest merging word for the pair
        let mut v = tri_index(n, i, j);
        let mut left = d;
        while left > 0 {
            let a = (0..dfa.letter_count())
                .find(|&a| dist[sg.successor(a, v)] == Some(left - 1))
                .expect("distance decreases along some letter");
            word.push(a);
            mask = dfa.image_mask(mask, a);
            v = sg.successor(a, v);
            left -= 1;
        }
    }
    Ok(ResetResult {
        synchronizing: true,
        rt: Some(word.len()),
        witness_word: Some(word),
        method: ResetMethod::Eppstein,
    })
}

/// The merging diameter of the pair graph: the largest shortest merging
/// distance among pairs that can reach the diagonal at all. A lower bound
/// on the reset threshold.
pub fn sg_diameter(dfa: &Dfa) -> usize {
    square_graph(dfa)
        .merge_distances()
        .iter()
        .flatten()
        .copied()
        .max()
        .unwrap_or(0)
}

/// Breadth-first exploration of the generated semigroup (deduplicated)
/// until the all-ones matrix appears or the semigroup closes. Returns the
/// exponent with a witness word of generator indices, or `None` when the
/// set is not primitive.
pub fn exponent_bfs(set: &MatrixSet) -> Result<Option<(usize, Vec<usize>)>> {
    exponent_bfs_with_cap(set, DEFAULT_CLOSURE_CAP)
}

pub fn exponent_bfs_with_cap(
    set: &MatrixSet,
    closure_cap: usize,
) -> Result<Option<(usize, Vec<usize>)>> {
    let n = set.dim();
    let identity = BinaryMatrix::identity(n);
    if identity.is_all_ones() {
        return Ok(Some((0, Vec::new())));
    }
    // nodes: (matrix, parent index, letter); index 0 is the identity root
    let mut nodes: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    let mut seen: HashMap<BinaryMatrix, usize> = HashMap::new();
    seen.insert(identity.clone(), 0);
    let mut mats: Vec<BinaryMatrix> = vec![identity];
    let mut frontier: Vec<usize> = vec![0];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &idx in &frontier {
            for (a, gen) in set.matrices().iter().enumerate() {
                let prod = bool_product(&mats[idx], gen);
                if prod.is_all_ones() {
                    let mut word = vec![a];
                    let mut cur = idx;
                    while cur != 0 {
                        let (parent, letter) = nodes[cur];
                        word.push(letter);
                        cur = parent;
                    }
                    word.reverse();
                    debug_assert_eq!(word.len(), depth);
                    return Ok(Some((depth, word)));
                }
                if seen.contains_key(&prod) {
                    continue;
                }
                if mats.len() >= closure_cap {
                    return Err(Error::ClosureCapExceeded { cap: closure_cap });
                }
                let id = mats.len();
                seen.insert(prod.clone(), id);
                mats.push(prod);
                nodes.push((idx, a));
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(None)
}

/// Primitivity via semigroup exploration; cross-checkable against
/// synchronization of the associated DFA.
pub fn is_primitive(set: &MatrixSet) -> Result<bool> {
    Ok(exponent_bfs(set)?.is_some())
}

/// Irreducibility: strong connectivity of the digraph with an edge `i -> j`
/// whenever some generator has a 1 at `(i, j)`.
pub fn is_irreducible(set: &MatrixSet) -> bool {
    let n = set.dim();
    let mut adj = vec![0u64; n];
    let mut radj = vec![0u64; n];
    for mat in set.matrices() {
        for (i, a) in adj.iter_mut().enumerate() {
            *a |= mat.row_bits(i);
        }
    }
    for (i, &a) in adj.iter().enumerate() {
        let mut sel = a;
        while sel != 0 {
            let j = sel.trailing_zeros() as usize;
            radj[j] |= 1u64 << i;
            sel &= sel - 1;
        }
    }
    reaches_all(&adj, n) && reaches_all(&radj, n)
}

fn reaches_all(adj: &[u64], n: usize) -> bool {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut seen = 1u64;
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        let fresh = adj[u] & !seen;
        seen |= fresh;
        let mut sel = fresh;
        while sel != 0 {
            stack.push(sel.trailing_zeros() as usize);
            sel &= sel - 1;
        }
    }
    seen == full
}

/// Two-sided exponent bounds from the associated automata: the exact reset
/// threshold (or, where the subset search is out of reach, the merging
/// diameter) from below, and the sum of reset-word lengths of both automata
/// plus `n - 1` from above.
#[derive(Clone, Debug)]
pub struct ExponentBounds {
    pub lower: usize,
    pub upper: usize,
    pub lower_method: ResetMethod,
    /// Reset-word length used on each side of the upper bound.
    pub rt_forward: usize,
    pub rt_transpose: usize,
    pub upper_method: ResetMethod,
}

pub fn exponent_bounds(set: &MatrixSet) -> Result<ExponentBounds> {
    exponent_bounds_with_caps(set, DEFAULT_LETTER_CAP, DEFAULT_STATE_CAP)
}

pub fn exponent_bounds_with_caps(
    set: &MatrixSet,
    letter_cap: u128,
    state_cap: usize,
) -> Result<ExponentBounds> {
    let dfa = aut_of_with_cap(set, letter_cap)?;
    // synchronization of the associated DFA characterizes primitivity only
    // together with irreducibility; reducible sets can synchronize in one
    // direction without ever producing a positive product
    if !is_irreducible(set) || !is_synchronizing(&dfa) {
        return Err(Error::NotPrimitive);
    }
    let dfa_t = aut_of_with_cap(&set.transpose(), letter_cap)?;
    let n = set.dim();

    let exact_ok = n <= state_cap;
    let (lower, lower_method, rt_fwd, rt_t, upper_method) = if exact_ok {
        let fwd = reset_threshold_exact_with_cap(&dfa, state_cap)?;
        let bwd = reset_threshold_exact_with_cap(&dfa_t, state_cap)?;
        let fwd_rt = fwd.rt.ok_or(Error::NotPrimitive)?;
        let bwd_rt = bwd.rt.ok_or(Error::NotPrimitive)?;
        (
            fwd_rt,
            ResetMethod::Exact,
            fwd_rt,
            bwd_rt,
            ResetMethod::Exact,
        )
    } else {
        let diam = sg_diameter(&dfa);
        let fwd = eppstein(&dfa)?.rt.unwrap();
        let bwd = eppstein(&dfa_t)?.rt.unwrap();
        (
            diam,
            ResetMethod::DiameterLowerBound,
            fwd,
            bwd,
            ResetMethod::Eppstein,
        )
    };
    Ok(ExponentBounds {
        lower,
        upper: rt_fwd + rt_t + n - 1,
        lower_method,
        rt_forward: rt_fwd,
        rt_transpose: rt_t,
        upper_method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(entries: &[&[u8]]) -> BinaryMatrix {
        BinaryMatrix::from_entries(entries.len(), entries)
    }

    fn three_state_pair() -> MatrixSet {
        MatrixSet::new(vec![
            m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]),
            m(&[&[1, 0, 1], &[0, 0, 1], &[0, 1, 0]]),
        ])
        .unwrap()
    }

    fn cerny_dfa(n: usize) -> Dfa {
        // letter a: cyclic shift; letter b: identity except n-1 -> 0
        let mut a = BinaryMatrix::zeros(n);
        for i in 0..n {
            a.set(i, (i + 1) % n, true);
        }
        let mut b = BinaryMatrix::identity(n);
        b.set(n - 1, n - 1, false);
        b.set(n - 1, 0, true);
        Dfa::new(vec![a, b]).unwrap()
    }

    #[test]
    fn aut_of_three_state_pair_has_the_three_letters() {
        let dfa = aut_of(&three_state_pair()).unwrap();
        assert_eq!(dfa.letter_count(), 3);
        let a = m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let b1 = m(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        let b2 = m(&[&[0, 0, 1], &[0, 0, 1], &[0, 1, 0]]);
        assert_eq!(dfa.letters(), &[a, b1, b2]);
    }

    #[test]
    fn aut_of_transpose_set() {
        let dfa = aut_of(&three_state_pair().transpose()).unwrap();
        let a = m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let b1 = m(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        let b2p = m(&[&[1, 0, 0], &[0, 0, 1], &[1, 0, 0]]);
        assert_eq!(dfa.letter_count(), 3);
        for letter in [&a, &b1, &b2p] {
            assert!(dfa.letters().contains(letter));
        }
    }

    #[test]
    fn aut_of_permutation_set_is_the_set_itself() {
        let set = MatrixSet::new(vec![
            m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]),
            BinaryMatrix::identity(3),
        ])
        .unwrap();
        let dfa = aut_of(&set).unwrap();
        assert_eq!(dfa.letters(), set.matrices());
    }

    #[test]
    fn aut_of_letter_cap() {
        let set = MatrixSet::new(vec![BinaryMatrix::all_ones(4)]).unwrap();
        let err = aut_of_with_cap(&set, 100).unwrap_err();
        assert_eq!(
            err,
            Error::LetterCapExceeded {
                cap: 100,
                count: 256
            }
        );
    }

    #[test]
    fn square_graph_identity_only_self_loops() {
        let dfa = Dfa::new(vec![BinaryMatrix::identity(3)]).unwrap();
        let sg = square_graph(&dfa);
        for v in 0..sg.vertex_count() {
            assert_eq!(sg.successor(0, v), v);
        }
        assert!(!is_synchronizing(&dfa));
    }

    #[test]
    fn square_graph_cyclic_permutation_never_merges() {
        let mut a = BinaryMatrix::zeros(4);
        for i in 0..4 {
            a.set(i, (i + 1) % 4, true);
        }
        let dfa = Dfa::new(vec![a]).unwrap();
        let dist = square_graph(&dfa).merge_distances();
        for v in 0..dist.len() {
            let (i, j) = square_graph(&dfa).vertex(v);
            assert_eq!(dist[v].is_some(), i == j);
        }
        assert!(!is_synchronizing(&dfa));
    }

    #[test]
    fn cerny_family_synchronizes_with_quadratic_threshold() {
        for n in 2..=6 {
            let dfa = cerny_dfa(n);
            assert!(is_synchronizing(&dfa));
            let res = reset_threshold_exact(&dfa).unwrap();
            assert_eq!(res.rt, Some((n - 1) * (n - 1)), "n = {n}");
            // the witness really resets the automaton
            let word = res.witness_word.unwrap();
            let image = dfa.image_mask_word(dfa.full_mask(), &word);
            assert_eq!(image.count_ones(), 1);
        }
    }

    #[test]
    fn cerny_three_merges_every_pair() {
        let dfa = cerny_dfa(3);
        let dist = square_graph(&dfa).merge_distances();
        assert!(dist.iter().all(|d| d.is_some()));
    }

    #[test]
    fn reset_threshold_of_associated_automata() {
        let set = three_state_pair();
        let fwd = reset_threshold_exact(&aut_of(&set).unwrap()).unwrap();
        assert_eq!(fwd.rt, Some(4));
        let bwd = reset_threshold_exact(&aut_of(&set.transpose()).unwrap()).unwrap();
        assert_eq!(bwd.rt, Some(2));
    }

    #[test]
    fn one_state_dfa_resets_with_empty_word() {
        let dfa = Dfa::new(vec![BinaryMatrix::identity(1)]).unwrap();
        let res = reset_threshold_exact(&dfa).unwrap();
        assert_eq!(res.rt, Some(0));
        assert_eq!(res.witness_word, Some(vec![]));
        assert_eq!(sg_diameter(&dfa), 0);
        let epp = eppstein(&dfa).unwrap();
        assert_eq!(epp.rt, Some(0));
    }

    #[test]
    fn non_synchronizing_reported() {
        let perms = Dfa::new(vec![m(&[&[0, 1], &[1, 0]])]).unwrap();
        let res = reset_threshold_exact(&perms).unwrap();
        assert!(!res.synchronizing);
        assert_eq!(res.rt, None);
        assert_eq!(eppstein(&perms).unwrap_err(), Error::NotSynchronizing);
    }

    #[test]
    fn eppstein_upper_bounds_exact() {
        for dfa in [
            cerny_dfa(4),
            cerny_dfa(5),
            aut_of(&three_state_pair()).unwrap(),
        ] {
            let exact = reset_threshold_exact(&dfa).unwrap().rt.unwrap();
            let greedy = eppstein(&dfa).unwrap();
            let len = greedy.rt.unwrap();
            assert!(len >= exact);
            // greedy word is a genuine reset word
            let word = greedy.witness_word.unwrap();
            assert_eq!(word.len(), len);
            let image = dfa.image_mask_word(dfa.full_mask(), &word);
            assert_eq!(image.count_ones(), 1);
        }
        let c4 = cerny_dfa(4);
        assert_eq!(reset_threshold_exact(&c4).unwrap().rt, Some(9));
    }

    #[test]
    fn merging_diameter_is_a_lower_bound() {
        for dfa in [
            cerny_dfa(4),
            cerny_dfa(5),
            aut_of(&three_state_pair()).unwrap(),
        ] {
            let diam = sg_diameter(&dfa);
            let rt = reset_threshold_exact(&dfa).unwrap().rt.unwrap();
            assert!(diam <= rt);
        }
        assert_eq!(sg_diameter(&cerny_dfa(4)), 6);
        assert_eq!(sg_diameter(&aut_of(&three_state_pair()).unwrap()), 3);
    }

    #[test]
    fn exponent_bfs_on_examples() {
        let set = three_state_pair();
        let (exp, word) = exponent_bfs(&set).unwrap().unwrap();
        assert_eq!(exp, 8);
        assert_eq!(word.len(), 8);
        // the witness word multiplies out to the all-ones matrix
        let product = word.iter().fold(BinaryMatrix::identity(3), |acc, &a| {
            bool_product(&acc, set.get(a))
        });
        assert!(product.is_all_ones());
    }

    #[test]
    fn permutation_sets_are_not_primitive() {
        let set = MatrixSet::new(vec![
            m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]),
            m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]),
        ])
        .unwrap();
        assert_eq!(exponent_bfs(&set).unwrap(), None);
        assert!(!is_primitive(&set).unwrap());
        assert!(is_irreducible(&set));
    }

    #[test]
    fn closure_cap_is_reported() {
        let set = three_state_pair();
        assert!(matches!(
            exponent_bfs_with_cap(&set, 4),
            Err(Error::ClosureCapExceeded { cap: 4 })
        ));
    }

    #[test]
    fn primitivity_matches_synchronization_for_irreducible_sets() {
        use crate::families::perturbed_permutation;
        let mut checked = 0;
        for n in 3..=5usize {
            for seed in 0..30u64 {
                let set = perturbed_permutation(n, 2, seed);
                if !is_irreducible(&set) {
                    continue;
                }
                let prim = is_primitive(&set).unwrap();
                assert_eq!(prim, is_synchronizing(&aut_of(&set).unwrap()));
                assert_eq!(prim, is_synchronizing(&aut_of(&set.transpose()).unwrap()));
                checked += 1;
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn reducible_sets_can_synchronize_one_way_without_being_primitive() {
        // row 1 of both generators is e_2, so no product is ever positive,
        // yet the associated DFA synchronizes; without irreducibility the
        // synchronization test says nothing about primitivity
        let set = MatrixSet::new(vec![
            m(&[&[0, 1, 1], &[0, 1, 0], &[1, 0, 0]]),
            m(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]),
        ])
        .unwrap();
        assert!(!is_irreducible(&set));
        assert!(!is_primitive(&set).unwrap());
        assert!(is_synchronizing(&aut_of(&set).unwrap()));
        assert!(!is_synchronizing(&aut_of(&set.transpose()).unwrap()));
        assert_eq!(exponent_bounds(&set).unwrap_err(), Error::NotPrimitive);
    }

    #[test]
    fn irreducibility_cases() {
        assert!(!is_irreducible(
            &MatrixSet::new(vec![BinaryMatrix::identity(3)]).unwrap()
        ));
        let mut cycle = BinaryMatrix::zeros(4);
        for i in 0..4 {
            cycle.set(i, (i + 1) % 4, true);
        }
        assert!(is_irreducible(&MatrixSet::new(vec![cycle]).unwrap()));
        assert!(is_irreducible(&three_state_pair()));
        assert!(is_irreducible(
            &MatrixSet::new(vec![BinaryMatrix::identity(1)]).unwrap()
        ));
    }

    #[test]
    fn exponent_bounds_bracket_the_exponent() {
        let set = three_state_pair();
        let bounds = exponent_bounds(&set).unwrap();
        assert_eq!(bounds.lower, 4);
        assert_eq!(bounds.upper, 4 + 2 + 2);
        let (exp, _) = exponent_bfs(&set).unwrap().unwrap();
        assert!(bounds.lower <= exp && exp <= bounds.upper);

        let perms = MatrixSet::new(vec![
            m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]),
            m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]),
        ])
        .unwrap();
        assert_eq!(exponent_bounds(&perms).unwrap_err(), Error::NotPrimitive);
    }
}
