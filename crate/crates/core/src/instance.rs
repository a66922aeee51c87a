//! Problem data and the feasibility predicate.
//!
//! A subset `C` of the input vectors `Y` is feasible when
//!
//! ```text
//! (1/|C|) ||sum_{y in C} y||^2  <=  alpha (1/|Y|) ||sum_{y in Y} y||^2
//! ```
//!
//! Everything here is evaluated on integers. The predicate is tested in the
//! cross-multiplied form `||s_C||^2 * N * alpha_den <= alpha_num * ||s_Y||^2 * |C|`,
//! whose magnitude is bounded when the instance is built, so `i128` never
//! overflows.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational `num/den` with `0 < num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alpha {
    num: u64,
    den: u64,
}

impl Alpha {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::AlphaOutOfRange(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `num/den` or a plain decimal such as `0.1` (converted exactly).
impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::AlphaOutOfRange(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Alpha::new(n, d);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty()
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_v))
            .ok_or_else(bad)?;
        Alpha::new(num, den)
    }
}

/// The right-hand side `alpha * ||sum Y||^2 / N` as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threshold {
    pub numerator: i128,
    pub denominator: i128,
}

impl Threshold {
    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// A set of integer vectors of common dimension together with the bound `alpha`.
///
/// Immutable once built. The coordinate bound `b`, the total sum and its
/// squared norm are computed at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    dim: usize,
    coords: Vec<i64>,
    alpha: Alpha,
    meta: String,
    bound: i64,
    total: Vec<i64>,
    total_sq: i128,
}

impl Instance {
    pub fn new(vectors: Vec<Vec<i64>>, alpha: Alpha, meta: impl Into<String>) -> Result<Self> {
        let n = vectors.len();
        if n == 0 {
            return Err(Error::InvalidInstance("no vectors".into()));
        }
        let dim = vectors[0].len();
        if dim == 0 {
            return Err(Error::InvalidInstance("dimension must be at least 1".into()));
        }
        let mut coords = Vec::with_capacity(n * dim);
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidInstance(format!(
                    "vector {i} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            coords.extend_from_slice(v);
        }
        Self::from_flat(dim, coords, alpha, meta.into())
    }

    fn from_flat(dim: usize, coords: Vec<i64>, alpha: Alpha, meta: String) -> Result<Self> {
        let n = coords.len() / dim;
        let bound = coords
            .iter()
            .map(|c| c.checked_abs())
            .try_fold(0i64, |acc, c| c.map(|c| acc.max(c)))
            .ok_or_else(|| Error::Overflow("coordinate i64::MIN".into()))?;

        // Largest quantity ever formed: ||z||^2 * N * max(alpha_num, alpha_den)
        // with ||z||^2 <= q (bN)^2.
        let overflow = || Error::Overflow(format!("b={bound}, N={n}, q={dim}, alpha={alpha}"));
        let bn = (bound as u128).checked_mul(n as u128).ok_or_else(overflow)?;
        if bn > i64::MAX as u128 {
            return Err(overflow());
        }
        let worst = bn
            .checked_mul(bn)
            .and_then(|v| v.checked_mul(dim as u128))
            .and_then(|v| v.checked_mul(n as u128))
            .and_then(|v| v.checked_mul(alpha.num.max(alpha.den) as u128))
            .ok_or_else(overflow)?;
        if worst > i128::MAX as u128 {
            return Err(overflow());
        }

        let mut total = vec![0i64; dim];
        for v in coords.chunks_exact(dim) {
            for (t, &c) in total.iter_mut().zip(v) {
                *t += c;
            }
        }
        let total_sq = sq_norm(&total);
        Ok(Self {
            dim,
            coords,
            alpha,
            meta,
            bound,
            total,
            total_sq,
        })
    }

    /// Number of vectors `N`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dimension `q`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn meta(&self) -> &str {
        &self.meta
    }

    /// Largest absolute coordinate `b`.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn vector(&self, i: usize) -> &[i64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors(&self) -> impl ExactSizeIterator<Item = &[i64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn total_sum(&self) -> &[i64] {
        &self.total
    }

    pub fn total_sq_norm(&self) -> i128 {
        self.total_sq
    }

    /// Same vectors, different bound.
    pub fn with_alpha(&self, alpha: Alpha) -> Result<Self> {
        Self::from_flat(self.dim, self.coords.clone(), alpha, self.meta.clone())
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = meta.into();
        self
    }

    /// Every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: i64) -> Result<Self> {
        let coords = self
            .coords
            .iter()
            .map(|&c| c.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Overflow(format!("scaling by {factor}")))?;
        Self::from_flat(self.dim, coords, self.alpha, self.meta.clone())
    }

    pub fn threshold(&self) -> Threshold {
        threshold(self)
    }

    /// The feasibility predicate for a subset with coordinate sum `sum` and
    /// `count >= 1` elements.
    pub fn sum_is_feasible(&self, sum: &[i64], count: usize) -> bool {
        debug_assert!(count >= 1);
        let lhs = sq_norm(sum) * self.len() as i128 * self.alpha.den as i128;
        let rhs = self.alpha.num as i128 * self.total_sq * count as i128;
        lhs <= rhs
    }

    pub fn subset_sum(&self, indices: &[usize]) -> Vec<i64> {
        let mut s = vec![0i64; self.dim];
        for &i in indices {
            for (acc, &c) in s.iter_mut().zip(self.vector(i)) {
                *acc += c;
            }
        }
        s
    }

    /// Checks that `indices` is a non-empty set of valid, distinct indices
    /// and returns it sorted.
    pub fn check_indices(&self, indices: &[usize]) -> Result<Vec<usize>> {
        if indices.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        if let Some(&last) = sorted.last() {
            if last >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    len: self.len(),
                });
            }
        }
        Ok(sorted)
    }
}

pub(crate) fn sq_norm(v: &[i64]) -> i128 {
    v.iter().map(|&c| c as i128 * c as i128).sum()
}

/// `alpha * ||sum Y||^2 / N`, reduced.
pub fn threshold(inst: &Instance) -> Threshold {
    let num = inst.alpha.num as i128 * inst.total_sq;
    let den = inst.alpha.den as i128 * inst.len() as i128;
    let g = num.gcd(&den);
    Threshold {
        numerator: num / g,
        denominator: den / g,
    }
}

pub fn is_feasible(inst: &Instance, indices: &[usize]) -> Result<bool> {
    let idx = inst.check_indices(indices)?;
    Ok(inst.sum_is_feasible(&inst.subset_sum(&idx), idx.len()))
}

/// Absolute difference between the two sides of
/// `(1/|C|) ||sum_C y||^2 = sum_C ||y||^2 - sum_C ||y - centroid(C)||^2`,
/// evaluated with exact rationals. Always zero.
pub fn spread_identity_check(inst: &Instance, indices: &[usize]) -> Result<BigRational> {
    let idx = inst.check_indices(indices)?;
    let count = BigInt::from(idx.len());
    let sum = inst.subset_sum(&idx);

    let lhs = BigRational::new(BigInt::from(sq_norm(&sum)), count.clone());

    let centroid: Vec<BigRational> = sum
        .iter()
        .map(|&s| BigRational::new(BigInt::from(s), count.clone()))
        .collect();
    let mut about_zero = BigRational::zero();
    let mut about_centroid = BigRational::zero();
    for &i in &idx {
        let y = inst.vector(i);
        about_zero += BigRational::from_integer(BigInt::from(sq_norm(y)));
        for (c, m) in y.iter().zip(&centroid) {
            let d = BigRational::from_integer(BigInt::from(*c)) - m;
            about_centroid += &d * &d;
        }
    }
    Ok((lhs - (about_zero - about_centroid)).abs())
}

/// A non-empty feasible subset, indices sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    indices: Vec<usize>,
    sum: Vec<i64>,
}

impl Solution {
    pub fn new(inst: &Instance, indices: &[usize]) -> Result<Self> {
        let indices = inst.check_indices(indices)?;
        let sum = inst.subset_sum(&indices);
        Ok(Self { indices, sum })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn sum(&self) -> &[i64] {
        &self.sum
    }

    pub fn cardinality(&self) -> usize {
        self.indices.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Feasible(Solution),
    Infeasible,
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }

    /// Optimal cardinality, 0 when infeasible.
    pub fn cardinality(&self) -> usize {
        match self {
            SolveOutcome::Feasible(s) => s.cardinality(),
            SolveOutcome::Infeasible => 0,
        }
    }

    pub fn solution(&self) -> Option<&Solution> {
        match self {
            SolveOutcome::Feasible(s) => Some(s),
            SolveOutcome::Infeasible => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn inst(v: Vec<Vec<i64>>, a: (u64, u64)) -> Instance {
        Instance::new(v, Alpha::new(a.0, a.1).unwrap(), "").unwrap()
    }

    #[test]
    fn alpha_parsing() {
        assert_eq!("1/10".parse::<Alpha>().unwrap(), Alpha::new(1, 10).unwrap());
        assert_eq!("0.1".parse::<Alpha>().unwrap(), Alpha::new(1, 10).unwrap());
        assert_eq!(".5".parse::<Alpha>().unwrap(), Alpha::new(1, 2).unwrap());
        assert_eq!("2/4".parse::<Alpha>().unwrap().to_string(), "1/2");
        for bad in ["0", "1", "1/1", "3/2", "0/5", "1/0", "-0.1", "nan", "0.5x", ""] {
            assert!(bad.parse::<Alpha>().is_err(), "{bad}");
        }
    }

    #[test]
    fn threshold_examples() {
        let t = inst(vec![vec![1], vec![-1]], (1, 2)).threshold();
        assert!(t.is_zero());

        let t = inst(vec![vec![3, 4]], (1, 10)).threshold();
        assert_eq!((t.numerator, t.denominator), (5, 2));

        // sum = (2,2), ||sum||^2 = 8, T = (1/3) * 8 / 3
        let t = inst(vec![vec![1, 0], vec![0, 1], vec![1, 1]], (1, 3)).threshold();
        assert_eq!((t.numerator, t.denominator), (8, 9));
    }

    #[test]
    fn feasibility_examples() {
        let i = inst(vec![vec![3, 4]], (1, 10));
        assert!(!is_feasible(&i, &[0]).unwrap());

        let i = inst(vec![vec![1], vec![-1]], (1, 2));
        assert!(is_feasible(&i, &[0, 1]).unwrap());
        assert!(!is_feasible(&i, &[0]).unwrap());

        let i = inst(vec![vec![5, 5], vec![0, 0], vec![1, -2]], (1, 10));
        assert!(is_feasible(&i, &[1]).unwrap());
    }

    #[test]
    fn index_errors() {
        let i = inst(vec![vec![1], vec![2]], (1, 2));
        assert!(matches!(is_feasible(&i, &[]), Err(Error::EmptySubset)));
        assert!(matches!(is_feasible(&i, &[0, 0]), Err(Error::DuplicateIndex(0))));
        assert!(matches!(
            is_feasible(&i, &[2]),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        assert!(matches!(spread_identity_check(&i, &[]), Err(Error::EmptySubset)));
    }

    #[test]
    fn rejects_bad_instances() {
        let a = Alpha::new(1, 2).unwrap();
        assert!(Instance::new(vec![], a, "").is_err());
        assert!(Instance::new(vec![vec![]], a, "").is_err());
        assert!(Instance::new(vec![vec![1, 2], vec![1]], a, "").is_err());
        assert!(matches!(
            Instance::new(vec![vec![i64::MAX / 2], vec![1]], a, ""),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn spread_identity_small_cases() {
        let i = inst(vec![vec![7, -3, 2]], (1, 2));
        assert!(spread_identity_check(&i, &[0]).unwrap().is_zero());
        let i = inst(vec![vec![1], vec![-1]], (1, 2));
        assert!(spread_identity_check(&i, &[0, 1]).unwrap().is_zero());
    }

    #[test]
    fn derived_values() {
        let i = inst(vec![vec![1, 2], vec![-3, 4], vec![0, 0]], (1, 4));
        assert_eq!(i.bound(), 4);
        assert_eq!(i.total_sum(), &[-2, 6]);
        assert_eq!(i.total_sq_norm(), 40);
        assert_eq!(i.subset_sum(&[0, 1]), vec![-2, 6]);
    }
}
