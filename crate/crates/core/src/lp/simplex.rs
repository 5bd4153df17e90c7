//! A small dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems are given in standard form `min c^T x, Ax = b, x >= 0` with
//! `b >= 0`. Rows that already contain a usable basic column (a slack with
//! coefficient 1 appearing in no other row) declare it via `basic`, which
//! keeps phase one down to the rows that genuinely need an artificial
//! variable. Bland's rule (smallest eligible index for both the entering and
//! the leaving choice) makes the pivot path deterministic and cycle-free.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub struct LpRow {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    /// Column already usable as the initial basic variable of this row.
    pub basic: Option<usize>,
}

pub struct StandardLp {
    pub ncols: usize,
    pub rows: Vec<LpRow>,
    /// Minimized objective over the `ncols` structural columns.
    pub objective: Vec<Rational>,
}

pub struct SimplexSolution {
    pub x: Vec<Rational>,
    /// Dual multipliers, one per input row.
    pub duals: Vec<Rational>,
    pub value: Rational,
}

struct Tableau {
    cols: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Column that formed the initial identity in each row; the final values
    /// of these columns are B^{-1}, which yields the dual multipliers.
    init_basic: Vec<usize>,
    artificial_start: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col].clone();
        debug_assert!(!piv.is_zero());
        if !piv.is_one() {
            for v in self.rows[row].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
            self.rhs[row] /= &piv;
        }
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for c in 0..self.cols {
                if !self.rows[row][c].is_zero() {
                    let delta = &factor * &self.rows[row][c];
                    self.rows[r][c] -= delta;
                }
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[r] -= delta;
        }
        self.basis[row] = col;
    }

    /// Minimize `obj` (length `cols`) from the current basis. `allow` limits
    /// the entering columns. Returns the objective value.
    fn run(&mut self, obj: &[Rational], allow: impl Fn(usize) -> bool) -> Result<Rational> {
        loop {
            // reduced costs: r_j = obj_j - sum_r obj[basis[r]] * T[r][j]
            let mut entering = None;
            'cols: for j in 0..self.cols {
                if !allow(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut red = obj[j].clone();
                for (r, row) in self.rows.iter().enumerate() {
                    if !obj[self.basis[r]].is_zero() && !row[j].is_zero() {
                        red -= &obj[self.basis[r]] * &row[j];
                    }
                }
                if red.is_negative() {
                    entering = Some(j);
                    break 'cols;
                }
            }
            let Some(col) = entering else {
                let mut value = Rational::zero();
                for (r, b) in self.basis.iter().enumerate() {
                    if !obj[*b].is_zero() {
                        value += &obj[*b] * &self.rhs[r];
                    }
                }
                return Ok(value);
            };
            // ratio test, ties by smallest basis index (Bland)
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col].is_positive() {
                    let ratio = &self.rhs[r] / &self.rows[r][col];
                    match &leave {
                        None => leave = Some((r, ratio)),
                        Some((lr, best)) => {
                            if ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                            {
                                leave = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Invalid("unbounded linear program".into()));
            };
            self.pivot(row, col);
        }
    }
}

pub fn solve(lp: &StandardLp) -> Result<SimplexSolution> {
    let m = lp.rows.len();
    let artificial_rows: Vec<usize> = (0..m).filter(|&r| lp.rows[r].basic.is_none()).collect();
    let cols = lp.ncols + artificial_rows.len();

    let mut t = Tableau {
        cols,
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: vec![0; m],
        init_basic: vec![0; m],
        artificial_start: lp.ncols,
    };

    let mut next_art = lp.ncols;
    for (r, row) in lp.rows.iter().enumerate() {
        assert_eq!(row.coeffs.len(), lp.ncols, "row width mismatch");
        assert!(!row.rhs.is_negative(), "standard form needs rhs >= 0");
        let mut coeffs = row.coeffs.clone();
        coeffs.resize(cols, Rational::zero());
        match row.basic {
            Some(b) => {
                assert!(
                    coeffs[b].is_one(),
                    "declared basic column must have coefficient 1"
                );
                debug_assert!(
                    lp.rows
                        .iter()
                        .enumerate()
                        .all(|(rr, other)| rr == r || other.coeffs[b].is_zero()),
                    "declared basic column must vanish in every other row"
                );
                t.basis[r] = b;
                t.init_basic[r] = b;
            }
            None => {
                coeffs[next_art] = Rational::one();
                t.basis[r] = next_art;
                t.init_basic[r] = next_art;
                next_art += 1;
            }
        }
        t.rows.push(coeffs);
        t.rhs.push(row.rhs.clone());
    }

    if !artificial_rows.is_empty() {
        let mut phase1 = vec![Rational::zero(); cols];
        for c in lp.ncols..cols {
            phase1[c] = Rational::one();
        }
        let infeasibility = t.run(&phase1, |_| true)?;
        if !infeasibility.is_zero() {
            return Err(Error::Invalid("infeasible linear program".into()));
        }
        // drive any degenerate artificial out of the basis
        for r in 0..m {
            if t.basis[r] >= t.artificial_start {
                if let Some(c) = (0..lp.ncols).find(|&c| !t.rows[r][c].is_zero()) {
                    t.pivot(r, c);
                }
                // a fully zero row is redundant; its artificial stays basic at 0
            }
        }
    }

    let mut obj = lp.objective.clone();
    obj.resize(cols, Rational::zero());
    let art_start = t.artificial_start;
    let value = t.run(&obj, |j| j < art_start)?;

    let mut x = vec![Rational::zero(); lp.ncols];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < lp.ncols {
            x[b] = t.rhs[r].clone();
        }
    }
    // y^T = c_B^T B^{-1}; B^{-1} sits under the initial basic columns
    let mut duals = vec![Rational::zero(); m];
    for i in 0..m {
        let col = t.init_basic[i];
        let mut y = Rational::zero();
        for (r, &b) in t.basis.iter().enumerate() {
            if !obj[b].is_zero() && !t.rows[r][col].is_zero() {
                y += &obj[b] * &t.rows[r][col];
            }
        }
        duals[i] = y;
    }

    Ok(SimplexSolution { x, duals, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn solves_a_tiny_equality_program() {
        // min x0 + 2 x1  s.t. x0 + x1 = 1, x >= 0  ->  x = (1, 0), value 1
        let lp = StandardLp {
            ncols: 2,
            rows: vec![LpRow {
                coeffs: vec![r(1, 1), r(1, 1)],
                rhs: r(1, 1),
                basic: None,
            }],
            objective: vec![r(1, 1), r(2, 1)],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.value, r(1, 1));
        assert_eq!(sol.x, vec![r(1, 1), r(0, 1)]);
        // dual of the single equality row
        assert_eq!(sol.duals, vec![r(1, 1)]);
    }

    #[test]
    fn uses_declared_slack_basis() {
        // min -x0 s.t. x0 + s = 3  ->  x0 = 3, value -3, dual -1
        let lp = StandardLp {
            ncols: 2,
            rows: vec![LpRow {
                coeffs: vec![r(1, 1), r(1, 1)],
                rhs: r(3, 1),
                basic: Some(1),
            }],
            objective: vec![r(-1, 1), r(0, 1)],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.value, r(-3, 1));
        assert_eq!(sol.x[0], r(3, 1));
        assert_eq!(sol.duals, vec![r(-1, 1)]);
    }

    #[test]
    fn rejects_infeasible() {
        // x0 = 1 and x0 = 2 cannot both hold
        let lp = StandardLp {
            ncols: 1,
            rows: vec![
                LpRow {
                    coeffs: vec![r(1, 1)],
                    rhs: r(1, 1),
                    basic: None,
                },
                LpRow {
                    coeffs: vec![r(1, 1)],
                    rhs: r(2, 1),
                    basic: None,
                },
            ],
            objective: vec![r(0, 1)],
        };
        assert!(solve(&lp).is_err());
    }

    #[test]
    fn rejects_unbounded() {
        // min -x0 s.t. x0 - x1 = 0: x0 can grow forever
        let lp = StandardLp {
            ncols: 2,
            rows: vec![LpRow {
                coeffs: vec![r(1, 1), r(-1, 1)],
                rhs: r(0, 1),
                basic: None,
            }],
            objective: vec![r(-1, 1), r(0, 1)],
        };
        assert!(solve(&lp).is_err());
    }
}
