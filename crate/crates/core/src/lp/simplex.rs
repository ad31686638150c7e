//! Exact primal simplex for `min cᵀx  s.t.  P·x >= b, x >= 0`.
//!
//! The tableau is kept fraction-free: every entry is an integer and the true
//! rational value is `entry / denom`, where `denom` is the previous pivot
//! element. A pivot is then two multiplications and one exact division per
//! entry, with no gcd work. Entering and leaving variables follow Bland's
//! rule, so the method terminates on degenerate problems.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::ExactScalar;

const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Structural(usize),
    Slack(usize),
    Artificial(usize),
}

impl Var {
    fn name(self) -> String {
        match self {
            Var::Structural(j) => format!("x{j}"),
            Var::Slack(i) => format!("s{i}"),
            Var::Artificial(i) => format!("a{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<ExactScalar>,
    pub objective: ExactScalar,
    /// Basic variable per remaining constraint row (`x*`, `s*`, `a*` names).
    pub basis: Vec<String>,
    pub pivots: usize,
    pub phase_one_pivots: usize,
}

struct Tableau {
    rows: Vec<Vec<BigInt>>,
    z: Vec<BigInt>,
    denom: BigInt,
    vars: Vec<Var>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.vars.len()
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let p = self.rows[r][s].clone();
        debug_assert!(!p.is_zero());
        let width = self.vars.len() + 1;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let denom = &self.denom;
        let update = |row: &mut Vec<BigInt>| {
            let f = row[s].clone();
            if f.is_zero() {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v = exact_div(&*v * &p, denom);
                    }
                }
            } else {
                for j in 0..width {
                    let t = &row[j] * &p - &f * &pivot_row[j];
                    row[j] = if t.is_zero() { t } else { exact_div(t, denom) };
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                update(row);
            }
        }
        update(&mut self.z);
        self.rows[r] = pivot_row;
        self.denom = p;
        if self.denom.is_negative() {
            self.denom = -&self.denom;
            for row in self.rows.iter_mut().chain(std::iter::once(&mut self.z)) {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
            }
        }
        self.basis[r] = s;
        self.pivots += 1;
    }

    /// Bland: lowest-index improving column among `allowed`.
    fn entering(&self, allowed: &[bool]) -> Option<usize> {
        (0..self.vars.len()).find(|&j| allowed[j] && self.z[j].is_negative())
    }

    /// Minimum ratio test; ties go to the lowest-index basic variable.
    fn leaving(&self, s: usize) -> Option<usize> {
        let rhs = self.rhs();
        let mut best: Option<usize> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[s].is_positive() {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) => {
                    let lhs = &row[rhs] * &self.rows[b][s];
                    let other = &self.rows[b][rhs] * &row[s];
                    match lhs.cmp(&other) {
                        Ordering::Less => Some(i),
                        Ordering::Equal if self.basis[i] < self.basis[b] => Some(i),
                        _ => Some(b),
                    }
                }
            };
        }
        best
    }

    fn run(&mut self, allowed: &[bool]) -> Result<()> {
        while let Some(s) = self.entering(allowed) {
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::IterationLimit(MAX_PIVOTS));
            }
            let r = self.leaving(s).ok_or(Error::LpUnbounded(s))?;
            self.pivot(r, s);
        }
        Ok(())
    }

    fn set_objective(&mut self, costs: &[BigInt]) {
        let rhs = self.rhs();
        let mut z: Vec<BigInt> = costs.iter().map(|c| c * &self.denom).collect();
        z.push(BigInt::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=rhs {
                z[j] -= cb * &row[j];
            }
        }
        self.z = z;
    }
}

fn exact_div(t: BigInt, d: &BigInt) -> BigInt {
    let (q, r) = t.div_rem(d);
    debug_assert!(r.is_zero(), "fraction-free pivot lost exactness");
    q
}

fn lcm_of_denoms<'a>(it: impl Iterator<Item = &'a ExactScalar>) -> BigInt {
    it.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn scaled(v: &ExactScalar, by: &BigInt) -> BigInt {
    (v * ExactScalar::from_integer(by.clone())).to_integer()
}

/// Solves `min cᵀx` over `{x >= 0 : P·x >= b}` exactly.
pub fn solve(c: &[ExactScalar], p: &[Vec<ExactScalar>], b: &[ExactScalar]) -> Result<SimplexOutcome> {
    let nvars = c.len();
    let m = p.len();
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.len(),
        });
    }
    if let Some(row) = p.iter().find(|r| r.len() != nvars) {
        return Err(Error::DimensionMismatch {
            expected: nvars,
            got: row.len(),
        });
    }

    let needs_artificial: Vec<bool> = b.iter().map(|v| v.is_positive()).collect();
    let mut vars: Vec<Var> = (0..nvars).map(Var::Structural).collect();
    vars.extend((0..m).map(Var::Slack));
    let mut art_col = vec![usize::MAX; m];
    for i in 0..m {
        if needs_artificial[i] {
            art_col[i] = vars.len();
            vars.push(Var::Artificial(i));
        }
    }
    let width = vars.len() + 1;
    let rhs = vars.len();

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let l = lcm_of_denoms(p[i].iter().chain(std::iter::once(&b[i])));
        let mut row = vec![BigInt::zero(); width];
        let sign = if needs_artificial[i] { 1 } else { -1 };
        for j in 0..nvars {
            row[j] = scaled(&p[i][j], &l) * sign;
        }
        row[nvars + i] = BigInt::from(-sign);
        row[rhs] = scaled(&b[i], &l) * sign;
        if needs_artificial[i] {
            row[art_col[i]] = BigInt::one();
            basis.push(art_col[i]);
        } else {
            basis.push(nvars + i);
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        z: vec![BigInt::zero(); width],
        denom: BigInt::one(),
        vars,
        basis,
        pivots: 0,
    };

    let not_artificial: Vec<bool> = t.vars.iter().map(|v| !matches!(v, Var::Artificial(_))).collect();
    let mut phase_one_pivots = 0;

    if needs_artificial.iter().any(|&a| a) {
        let costs: Vec<BigInt> = t
            .vars
            .iter()
            .map(|v| match v {
                Var::Artificial(_) => BigInt::one(),
                _ => BigInt::zero(),
            })
            .collect();
        t.set_objective(&costs);
        let all = vec![true; t.vars.len()];
        t.run(&all)?;
        phase_one_pivots = t.pivots;
        if !t.z[rhs].is_zero() {
            return Err(Error::LpInfeasible);
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if matches!(t.vars[t.basis[i]], Var::Artificial(_)) {
                match (0..t.vars.len()).find(|&j| not_artificial[j] && !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let lc = lcm_of_denoms(c.iter());
    let mut costs: Vec<BigInt> = c.iter().map(|v| scaled(v, &lc)).collect();
    costs.resize(t.vars.len(), BigInt::zero());
    t.set_objective(&costs);
    t.run(&not_artificial)?;

    let mut x = vec![ExactScalar::zero(); nvars];
    for (i, &bj) in t.basis.iter().enumerate() {
        if let Var::Structural(j) = t.vars[bj] {
            x[j] = ExactScalar::new(t.rows[i][rhs].clone(), t.denom.clone());
        }
    }
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(SimplexOutcome {
        x,
        objective,
        basis: t.basis.iter().map(|&j| t.vars[j].name()).collect(),
        pivots: t.pivots,
        phase_one_pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(xs: &[i64]) -> Vec<ExactScalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_max_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  => (2, 6), value 36
        let c = v(&[-3, -5]);
        let p = vec![v(&[-1, 0]), v(&[0, -2]), v(&[-3, -2])];
        let b = v(&[-4, -12, -18]);
        let out = solve(&c, &p, &b).unwrap();
        assert_eq!(out.x, v(&[2, 6]));
        assert_eq!(out.objective, int(-36));
    }

    #[test]
    fn needs_phase_one() {
        // min x + y, x + y >= 2, x - y >= 1/2  => value 2
        let c = v(&[1, 1]);
        let p = vec![v(&[1, 1]), vec![int(1), int(-1)]];
        let b = vec![int(2), ratio(1, 2)];
        let out = solve(&c, &p, &b).unwrap();
        assert_eq!(out.objective, int(2));
        assert!(out.phase_one_pivots > 0);
        assert!(out.x[0].clone() - &out.x[1] >= ratio(1, 2));
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x >= 1 and -x >= 0
        let p = vec![v(&[1]), v(&[-1])];
        assert_eq!(solve(&v(&[1]), &p, &v(&[1, 0])), Err(Error::LpInfeasible));
        // min -x, x >= 0
        assert!(matches!(solve(&v(&[-1]), &[v(&[1])], &v(&[0])), Err(Error::LpUnbounded(_))));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's cycling example (as a minimisation); Bland's rule must terminate.
        let c = vec![ratio(-3, 4), int(150), ratio(-1, 50), int(6)];
        let p = vec![
            vec![ratio(-1, 4), int(60), ratio(1, 25), int(-9)],
            vec![ratio(-1, 2), int(90), ratio(1, 50), int(-3)],
            vec![int(0), int(0), int(-1), int(0)],
        ];
        let b = vec![int(0), int(0), int(-1)];
        let out = solve(&c, &p, &b).unwrap();
        assert_eq!(out.objective, ratio(-1, 20));
    }

    #[test]
    fn redundant_equality_rows() {
        // x + y >= 1 twice plus -(x + y) >= -1: forces x + y = 1; min x.
        let p = vec![v(&[1, 1]), v(&[1, 1]), v(&[-1, -1])];
        let out = solve(&v(&[1, 0]), &p, &v(&[1, 1, -1])).unwrap();
        assert_eq!(out.objective, int(0));
        assert_eq!(out.x, v(&[0, 1]));
    }

    #[test]
    fn shape_errors() {
        assert!(solve(&v(&[1, 1]), &[v(&[1])], &v(&[0])).is_err());
        assert!(solve(&v(&[1]), &[v(&[1])], &v(&[0, 0])).is_err());
    }
}
