//! Exact-rational optimization of the two game programs over `H_t`.
//!
//! The minimizing program picks a stochastic `p` over rows with
//! `p^T H_t <= k e^T`; the maximizing program picks a stochastic `q` over
//! columns with `H_t q >= k e`. They are each other's dual, so both routes
//! must agree exactly; the test suites lean on that.

mod simplex;

use num_traits::{One, Signed, Zero};

pub use simplex::Rational;

use crate::error::{Error, Result};
use crate::semigroup::HtMatrix;
use simplex::{LpRow, StandardLp};

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// A probability distribution with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyVector {
    entries: Vec<Rational>,
}

impl PolicyVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("empty policy".into()));
        }
        if entries.iter().any(|e| e.is_negative()) {
            return Err(Error::Invalid("policy entries must be nonnegative".into()));
        }
        let sum: Rational = entries.iter().sum();
        if !sum.is_one() {
            return Err(Error::Invalid(format!("policy must sum to 1, got {sum}")));
        }
        Ok(PolicyVector { entries })
    }

    /// The uniform distribution `e/n`.
    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(1.into(), (n as i64).into());
        PolicyVector {
            entries: vec![w; n],
        }
    }

    /// The point distribution on index `i`.
    pub fn basis(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut entries = vec![Rational::zero(); n];
        entries[i] = Rational::one();
        PolicyVector { entries }
    }

    /// Normalize nonnegative weights into a policy.
    pub fn from_weights(weights: Vec<Rational>) -> Result<Self> {
        if weights.iter().any(|e| e.is_negative()) {
            return Err(Error::Invalid("weights must be nonnegative".into()));
        }
        let sum: Rational = weights.iter().sum();
        if sum.is_zero() {
            return Err(Error::Invalid("weights must not all be zero".into()));
        }
        Ok(PolicyVector {
            entries: weights.into_iter().map(|w| w / &sum).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !self.entries[i].is_zero())
            .collect()
    }
}

/// Exact optimum of the game programs plus the optimal policies of both
/// players. `value = k/n`.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: Rational,
    /// Optimal row policy (length n).
    pub p_opt: PolicyVector,
    /// Optimal column policy (length h).
    pub q_opt: PolicyVector,
    /// Columns `j` with `p^T c_j = k`.
    pub tight_columns: Vec<usize>,
}

fn validate_ht(h: &HtMatrix) -> Result<()> {
    if h.h() == 0 {
        return Err(Error::Invalid("H must have at least one column".into()));
    }
    let bound = h.game_dim() as u32;
    for j in 0..h.h() {
        for i in 0..h.n() {
            let v = h.entry(i, j);
            if v < 1 || v > bound {
                return Err(Error::Invalid(format!(
                    "H entry ({i},{j}) = {v} outside 1..={bound}"
                )));
            }
        }
    }
    Ok(())
}

fn tight_columns(h: &HtMatrix, p: &PolicyVector, k: &Rational) -> Vec<usize> {
    (0..h.h())
        .filter(|&j| {
            let dot: Rational = (0..h.n())
                .map(|i| p.get(i) * rat_int(h.entry(i, j) as i64))
                .sum();
            dot == *k
        })
        .collect()
}

/// The minimizing program: `min k/n` over stochastic `p` with
/// `p^T H <= k e^T`. The optimal column policy comes out of the dual
/// multipliers of the same tableau.
pub fn solve_primal(h: &HtMatrix) -> Result<LpSolution> {
    validate_ht(h)?;
    let n = h.n();
    let hc = h.h();
    // columns: p_0..p_{n-1}, k, s_0..s_{hc-1}
    let ncols = n + 1 + hc;
    let mut rows = Vec::with_capacity(hc + 1);
    for j in 0..hc {
        let mut coeffs = vec![Rational::zero(); ncols];
        for i in 0..n {
            coeffs[i] = rat_int(h.entry(i, j) as i64);
        }
        coeffs[n] = -Rational::one();
        coeffs[n + 1 + j] = Rational::one();
        rows.push(LpRow {
            coeffs,
            rhs: Rational::zero(),
            basic: Some(n + 1 + j),
        });
    }
    let mut norm = vec![Rational::zero(); ncols];
    for c in norm.iter_mut().take(n) {
        *c = Rational::one();
    }
    rows.push(LpRow {
        coeffs: norm,
        rhs: Rational::one(),
        basic: None,
    });

    let mut objective = vec![Rational::zero(); ncols];
    objective[n] = Rational::one();

    let sol = simplex::solve(&StandardLp {
        ncols,
        rows,
        objective,
    })?;
    let k = sol.value.clone();
    debug_assert_eq!(k, sol.x[n]);
    let p = PolicyVector::new(sol.x[..n].to_vec())?;
    let q_entries: Vec<Rational> = sol.duals[..hc].iter().map(|y| -y.clone()).collect();
    let q = PolicyVector::new(q_entries)
        .map_err(|e| Error::Invalid(format!("dual multipliers are not a policy: {e}")))?;
    let tight = tight_columns(h, &p, &k);
    Ok(LpSolution {
        value: k / rat_int(h.game_dim() as i64),
        p_opt: p,
        q_opt: q,
        tight_columns: tight,
    })
}

/// The maximizing program: `max k/n` over stochastic `q` with `H q >= k e`.
/// The optimal row policy comes out of the dual multipliers.
pub fn solve_dual(h: &HtMatrix) -> Result<LpSolution> {
    validate_ht(h)?;
    let n = h.n();
    let hc = h.h();
    // columns: q_0..q_{hc-1}, k, s_0..s_{n-1}
    let ncols = hc + 1 + n;
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n {
        // -(H q)_i + k + s_i = 0  <=>  (H q)_i >= k
        let mut coeffs = vec![Rational::zero(); ncols];
        for j in 0..hc {
            coeffs[j] = -rat_int(h.entry(i, j) as i64);
        }
        coeffs[hc] = Rational::one();
        coeffs[hc + 1 + i] = Rational::one();
        rows.push(LpRow {
            coeffs,
            rhs: Rational::zero(),
            basic: Some(hc + 1 + i),
        });
    }
    let mut norm = vec![Rational::zero(); ncols];
    for c in norm.iter_mut().take(hc) {
        *c = Rational::one();
    }
    rows.push(LpRow {
        coeffs: norm,
        rhs: Rational::one(),
        basic: None,
    });

    let mut objective = vec![Rational::zero(); ncols];
    objective[hc] = -Rational::one();

    let sol = simplex::solve(&StandardLp {
        ncols,
        rows,
        objective,
    })?;
    let k = -sol.value.clone();
    debug_assert_eq!(k, sol.x[hc]);
    let q = PolicyVector::new(sol.x[..hc].to_vec())?;
    let p_entries: Vec<Rational> = sol.duals[..n].iter().map(|y| -y.clone()).collect();
    let p = PolicyVector::new(p_entries)
        .map_err(|e| Error::Invalid(format!("dual multipliers are not a policy: {e}")))?;
    let tight = tight_columns(h, &p, &k);
    Ok(LpSolution {
        value: k / rat_int(h.game_dim() as i64),
        p_opt: p,
        q_opt: q,
        tight_columns: tight,
    })
}

/// Shrink `H` to at most `n` columns without changing the optimum of the
/// maximizing program, rebalancing `q` along null-space directions and
/// dropping zeroed columns, as in the constructive support-reduction
/// argument.
pub fn reduce_columns(h: &HtMatrix, q_opt: &PolicyVector) -> (HtMatrix, PolicyVector) {
    assert_eq!(q_opt.len(), h.h(), "policy length must match column count");
    let n = h.n();

    let mut cols: Vec<usize> = Vec::new();
    let mut q: Vec<Rational> = Vec::new();
    for (j, w) in q_opt.entries().iter().enumerate() {
        if !w.is_zero() {
            cols.push(j);
            q.push(w.clone());
        }
    }

    while cols.len() > n {
        let mut x = null_space_vector(h, &cols);
        let sum: Rational = x.iter().sum();
        if sum.is_positive() {
            for v in x.iter_mut() {
                *v = -v.clone();
            }
        }
        let lambda = x
            .iter()
            .zip(&q)
            .filter(|(xi, _)| xi.is_negative())
            .map(|(xi, qi)| qi / -xi.clone())
            .min()
            .expect("a null vector with nonpositive sum has a negative entry");
        for (qi, xi) in q.iter_mut().zip(&x) {
            *qi += &lambda * xi;
        }
        let keep: Vec<bool> = q.iter().map(|v| !v.is_zero()).collect();
        cols = cols
            .iter()
            .zip(&keep)
            .filter_map(|(&c, &k)| k.then_some(c))
            .collect();
        q.retain(|v| !v.is_zero());
        let total: Rational = q.iter().sum();
        if !total.is_one() {
            for v in q.iter_mut() {
                *v /= &total;
            }
        }
    }

    let columns = cols.iter().map(|&j| h.column(j).to_vec()).collect();
    let origins = cols.iter().map(|&j| h.origins()[j]).collect();
    let reduced = HtMatrix::from_columns(n, columns, origins);
    let policy = PolicyVector::new(q).expect("rebalanced q stays a policy");
    (reduced, policy)
}

/// A nonzero solution of `H' x = 0` restricted to the chosen columns.
/// Requires more columns than rows.
fn null_space_vector(h: &HtMatrix, cols: &[usize]) -> Vec<Rational> {
    let n = h.n();
    let w = cols.len();
    debug_assert!(w > n);
    // Gaussian elimination on the n x w submatrix
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            cols.iter()
                .map(|&j| rat_int(h.entry(i, j) as i64))
                .collect()
        })
        .collect();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut is_pivot = vec![false; w];
    let mut r = 0;
    for c in 0..w {
        if r == n {
            break;
        }
        let Some(pr) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v /= &inv;
        }
        for i in 0..n {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for cc in 0..w {
                    let delta = &f * &a[r][cc];
                    a[i][cc] -= delta;
                }
            }
        }
        is_pivot[c] = true;
        pivot_col_of_row.push(c);
        r += 1;
    }
    let free = (0..w)
        .find(|&c| !is_pivot[c])
        .expect("wide matrix has a free column");
    let mut x = vec![Rational::zero(); w];
    x[free] = Rational::one();
    for (row, &pc) in pivot_col_of_row.iter().enumerate() {
        x[pc] = -a[row][free].clone();
    }
    x
}
