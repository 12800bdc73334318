//! Exact feasibility of small linear systems over the rationals.
//!
//! The systems have the shape `A x = b` with every variable nonnegative (or
//! strictly positive). Equalities are eliminated by Gaussian elimination,
//! the remaining inequalities by Fourier–Motzkin.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `coeffs . x + constant >= 0`, or `> 0` when `strict`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub coeffs: Vec<BigRational>,
    pub constant: BigRational,
    pub strict: bool,
}

impl Inequality {
    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn holds_trivially(&self) -> bool {
        if self.strict {
            self.constant.is_positive()
        } else {
            !self.constant.is_negative()
        }
    }

    /// Scales so the first nonzero coefficient has absolute value 1.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c = &*c / &lead;
            }
            self.constant = &self.constant / &lead;
        }
        self
    }
}

/// Drops trivially true rows and, among rows with equal coefficients, keeps
/// the tightest. Returns `None` if a trivially false row is present.
fn prune(rows: Vec<Inequality>) -> Option<Vec<Inequality>> {
    let mut best: HashMap<Vec<BigRational>, (BigRational, bool)> = HashMap::new();
    for row in rows {
        if row.is_trivial() {
            if !row.holds_trivially() {
                return None;
            }
            continue;
        }
        let row = row.normalized();
        match best.get_mut(&row.coeffs) {
            Some(slot) => {
                let tighter = row.constant < slot.0 || (row.constant == slot.0 && row.strict);
                if tighter {
                    *slot = (row.constant, row.strict);
                }
            }
            None => {
                best.insert(row.coeffs, (row.constant, row.strict));
            }
        }
    }
    let mut out: Vec<Inequality> = best
        .into_iter()
        .map(|(coeffs, (constant, strict))| Inequality { coeffs, constant, strict })
        .collect();
    // deterministic elimination order regardless of hash iteration
    out.sort_by(|a, b| a.coeffs.cmp(&b.coeffs).then(a.constant.cmp(&b.constant)));
    Some(out)
}

/// Fourier–Motzkin: whether the inequality system has a real solution.
pub fn inequalities_feasible(rows: Vec<Inequality>, nvars: usize) -> bool {
    let Some(mut rows) = prune(rows) else { return false };
    for var in (0..nvars).rev() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.coeffs[var].is_positive() {
                pos.push(r);
            } else if r.coeffs[var].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                let (a, b) = (p.coeffs[var].clone(), -n.coeffs[var].clone());
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(x, y)| x * &b + y * &a)
                    .collect();
                rest.push(Inequality {
                    coeffs,
                    constant: &p.constant * &b + &n.constant * &a,
                    strict: p.strict || n.strict,
                });
            }
        }
        match prune(rest) {
            Some(r) => rows = r,
            None => return false,
        }
    }
    rows.iter().all(Inequality::holds_trivially)
}

/// Whether `A x = b` has a solution with `x >= 0` (`x > 0` when `strict`).
/// `a` is given by rows.
pub fn signed_solution_exists(a: &[Vec<BigInt>], b: &[BigInt], nvars: usize, strict: bool) -> bool {
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            r.push(BigRational::from_integer(rhs.clone()));
            r
        })
        .collect();

    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nvars {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = BigRational::one() / &m[row][col];
        for x in &mut m[row] {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=nvars {
                    let delta = &m[row][c] * &f;
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[nvars].is_zero()) {
        return false;
    }

    let free: Vec<usize> = (0..nvars).filter(|c| !pivots.contains(c)).collect();
    let mut ineqs = Vec::with_capacity(nvars);
    // pivot variable = rhs - sum over free columns
    for (r, _) in pivots.iter().enumerate() {
        ineqs.push(Inequality {
            coeffs: free.iter().map(|&f| -m[r][f].clone()).collect(),
            constant: m[r][nvars].clone(),
            strict,
        });
    }
    for k in 0..free.len() {
        let mut coeffs = vec![BigRational::zero(); free.len()];
        coeffs[k] = BigRational::one();
        ineqs.push(Inequality { coeffs, constant: BigRational::zero(), strict });
    }
    inequalities_feasible(ineqs, free.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn ineq(c: &[i64], k: i64, strict: bool) -> Inequality {
        Inequality { coeffs: c.iter().map(|&x| q(x)).collect(), constant: q(k), strict }
    }

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect()
    }

    fn vec(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn interval_systems() {
        // 1 <= x <= 2
        assert!(inequalities_feasible(vec![ineq(&[1], -1, false), ineq(&[-1], 2, false)], 1));
        // x >= 2, x <= 1
        assert!(!inequalities_feasible(vec![ineq(&[1], -2, false), ineq(&[-1], 1, false)], 1));
        // x >= 1, x <= 1 closed, then open
        assert!(inequalities_feasible(vec![ineq(&[1], -1, false), ineq(&[-1], 1, false)], 1));
        assert!(!inequalities_feasible(vec![ineq(&[1], -1, true), ineq(&[-1], 1, false)], 1));
    }

    #[test]
    fn two_variable_triangle() {
        // x >= 0, y >= 0, x + y <= 1: feasible; with x + y >= 2 added: not
        let base = vec![ineq(&[1, 0], 0, false), ineq(&[0, 1], 0, false), ineq(&[-1, -1], 1, false)];
        assert!(inequalities_feasible(base.clone(), 2));
        let mut more = base;
        more.push(ineq(&[1, 1], -2, false));
        assert!(!inequalities_feasible(more, 2));
    }

    #[test]
    fn nonnegative_solutions() {
        // x - y = 1 has x = 1, y = 0, and strictly x = 2, y = 1
        assert!(signed_solution_exists(&ints(&[&[1, -1]]), &vec(&[1]), 2, false));
        assert!(signed_solution_exists(&ints(&[&[1, -1]]), &vec(&[1]), 2, true));
        // x + y = 0 forces x = y = 0: closed yes, open no
        assert!(signed_solution_exists(&ints(&[&[1, 1]]), &vec(&[0]), 2, false));
        assert!(!signed_solution_exists(&ints(&[&[1, 1]]), &vec(&[0]), 2, true));
        // x = -1 impossible
        assert!(!signed_solution_exists(&ints(&[&[1]]), &vec(&[-1]), 1, false));
        // inconsistent equalities
        assert!(!signed_solution_exists(&ints(&[&[1], &[1]]), &vec(&[1, 2]), 1, false));
        // no variables: b must vanish
        assert!(signed_solution_exists(&ints(&[&[]]), &vec(&[0]), 0, false));
        assert!(!signed_solution_exists(&ints(&[&[]]), &vec(&[3]), 0, false));
    }
}
