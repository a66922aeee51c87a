//! Exhaustive reference solver.

use crate::error::{Error, Result};
use crate::instance::{Instance, Solution, SolveOutcome};

/// Largest `N` accepted by [`brute_solve`].
pub const MAX_ORACLE_N: usize = 25;

/// Tries every non-empty subset, counting the bitmask up from 1, and keeps a
/// largest feasible one. Ties go to the lexicographically smallest sorted
/// index list.
pub fn brute_solve(inst: &Instance) -> Result<SolveOutcome> {
    let n = inst.len();
    if n > MAX_ORACLE_N {
        return Err(Error::GuardExceeded {
            what: "oracle N",
            limit: MAX_ORACLE_N,
            got: n,
        });
    }
    let mut best: Option<Vec<usize>> = None;
    let mut sum = vec![0i64; inst.dim()];
    for mask in 1u32..(1u32 << n) {
        let count = mask.count_ones() as usize;
        if best.as_ref().is_some_and(|b| count < b.len()) {
            continue;
        }
        sum.iter_mut().for_each(|s| *s = 0);
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for (s, &c) in sum.iter_mut().zip(inst.vector(i)) {
                *s += c;
            }
        }
        if !inst.sum_is_feasible(&sum, count) {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let replace = match &best {
            None => true,
            Some(b) => count > b.len() || idx < *b,
        };
        if replace {
            best = Some(idx);
        }
    }
    match best {
        Some(idx) => Ok(SolveOutcome::Feasible(Solution::new(inst, &idx)?)),
        None => Ok(SolveOutcome::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{is_feasible, Alpha};

    fn inst(v: Vec<Vec<i64>>, a: (u64, u64)) -> Instance {
        Instance::new(v, Alpha::new(a.0, a.1).unwrap(), "").unwrap()
    }

    #[test]
    fn antipodal_pair() {
        let out = brute_solve(&inst(vec![vec![1, 1, 1], vec![-1, -1, -1]], (1, 2))).unwrap();
        assert_eq!(out.cardinality(), 2);
    }

    #[test]
    fn lone_vector_is_infeasible() {
        let out = brute_solve(&inst(vec![vec![3, 4]], (1, 10))).unwrap();
        assert_eq!(out, SolveOutcome::Infeasible);
    }

    #[test]
    fn zero_vector_makes_it_feasible() {
        let i = inst(vec![vec![7, 1], vec![0, 0], vec![5, 5]], (1, 10));
        let out = brute_solve(&i).unwrap();
        assert!(out.cardinality() >= 1);
        assert!(is_feasible(&i, out.solution().unwrap().indices()).unwrap());
    }

    #[test]
    fn lexicographic_tie_break() {
        // T = 121/400; {0,1} and {1,2} both sum to zero, {0,1,2} gives 1/3 > T.
        let i = inst(vec![vec![1], vec![-1], vec![1], vec![10]], (1, 100));
        let out = brute_solve(&i).unwrap();
        assert_eq!(out.solution().unwrap().indices(), &[0, 1]);
    }

    #[test]
    fn guard() {
        let v = vec![vec![1]; MAX_ORACLE_N + 1];
        assert!(matches!(
            brute_solve(&inst(v, (1, 2))),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
