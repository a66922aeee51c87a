//! Hard instances from exact cover by 3-sets.
//!
//! Each 3-subset `A_i` of `{1..3p}` becomes its 0/1 characteristic vector in
//! dimension `q = 3p`, and one extra vector `(-1, ..., -1)` is appended. A
//! subset sums to zero exactly when it is an exact cover plus the extra
//! vector. Any other non-empty subset `C` has `||sum_C y||^2 >= 2`: without
//! the extra vector every coordinate count contributes at least its own value
//! (so `>= 3|C|`), with it the coordinate residues sum to a multiple of 3 and
//! cannot be a single `+-1`. Choosing `alpha` with `alpha ||sum Y||^2 < 2`
//! therefore puts the threshold below `2/N <= ||sum_C y||^2 / |C|`, so the
//! reduced instance is feasible iff an exact cover exists.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::format::{parse_instance_with_comments, trailer_value, write_instance};
use crate::instance::{Alpha, Instance};

/// Largest family size [`certify`] will search exhaustively.
pub const MAX_CERTIFY_N: usize = 20;

/// Ground sets are held as 64-bit masks.
pub const MAX_P: usize = 21;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3cInstance {
    p: usize,
    subsets: Vec<[usize; 3]>,
}

impl X3cInstance {
    /// Elements are 1-based, in `1..=3p`.
    pub fn new(p: usize, subsets: Vec<[usize; 3]>) -> Result<Self> {
        if p == 0 || p > MAX_P {
            return Err(Error::InvalidX3c(format!("p must be in 1..={MAX_P}")));
        }
        if subsets.is_empty() {
            return Err(Error::InvalidX3c("family must not be empty".into()));
        }
        for (i, s) in subsets.iter().enumerate() {
            if s.iter().any(|&e| e == 0 || e > 3 * p) {
                return Err(Error::InvalidX3c(format!("subset {} has an element outside 1..={}", i + 1, 3 * p)));
            }
            if s[0] == s[1] || s[0] == s[2] || s[1] == s[2] {
                return Err(Error::InvalidX3c(format!("subset {} repeats an element", i + 1)));
            }
        }
        Ok(Self { p, subsets })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn ground_set_size(&self) -> usize {
        3 * self.p
    }

    pub fn subsets(&self) -> &[[usize; 3]] {
        &self.subsets
    }

    fn masks(&self) -> Vec<u64> {
        self.subsets
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &e| m | 1 << (e - 1)))
            .collect()
    }
}

/// Random family of `n` 3-subsets of `{1..3p}`. With `plant_cover`, the first
/// `p` subsets (before shuffling) partition the ground set.
pub fn random_x3c(p: usize, n: usize, seed: u64, plant_cover: bool) -> Result<X3cInstance> {
    if plant_cover && n < p {
        return Err(Error::InvalidX3c(format!("cannot plant a cover of {p} sets in {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground: Vec<usize> = (1..=3 * p).collect();
    let mut subsets = Vec::with_capacity(n);
    if plant_cover {
        let mut perm = ground.clone();
        perm.shuffle(&mut rng);
        subsets.extend(perm.chunks_exact(3).map(|c| [c[0], c[1], c[2]]));
    }
    while subsets.len() < n {
        let mut pick = ground.clone();
        pick.shuffle(&mut rng);
        subsets.push([pick[0], pick[1], pick[2]]);
    }
    subsets.shuffle(&mut rng);
    for s in &mut subsets {
        s.sort_unstable();
    }
    X3cInstance::new(p, subsets)
}

/// The reduced instance: characteristic vectors, then `(-1, ..., -1)`.
///
/// `alpha = 1/2` when `||sum Y||^2 <= 3`, else `3 / (2 ||sum Y||^2)`, so
/// `alpha ||sum Y||^2 <= 3/2 < 2`.
pub fn reduce_x3c(x3c: &X3cInstance) -> Result<Instance> {
    let q = x3c.ground_set_size();
    let mut vectors: Vec<Vec<i64>> = x3c
        .subsets
        .iter()
        .map(|s| {
            let mut v = vec![0i64; q];
            for &e in s {
                v[e - 1] = 1;
            }
            v
        })
        .collect();
    vectors.push(vec![-1; q]);

    let mut total = vec![0i64; q];
    for v in &vectors {
        for (t, c) in total.iter_mut().zip(v) {
            *t += c;
        }
    }
    let s2: u64 = total.iter().map(|&t| (t * t) as u64).sum();
    let alpha = if s2 <= 3 { Alpha::new(1, 2)? } else { Alpha::new(3, 2 * s2)? };
    Instance::new(
        vectors,
        alpha,
        format!("x3c p={} n={}", x3c.p, x3c.subsets.len()),
    )
}

/// Indices of `p` pairwise disjoint subsets covering the ground set, if any.
pub fn exact_cover(x3c: &X3cInstance) -> Option<Vec<usize>> {
    let masks = x3c.masks();
    let full = (1u64 << (3 * x3c.p)) - 1;
    let mut chosen = Vec::new();
    search(&masks, full, 0, &mut chosen).then_some(chosen)
}

fn search(masks: &[u64], full: u64, covered: u64, chosen: &mut Vec<usize>) -> bool {
    if covered == full {
        return true;
    }
    let elem = (!covered & full).trailing_zeros();
    for (i, &m) in masks.iter().enumerate() {
        if m >> elem & 1 == 1 && m & covered == 0 {
            chosen.push(i);
            if search(masks, full, covered | m, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub x3c: X3cInstance,
    pub mcsv: Instance,
    /// Whether an exact cover exists, hence whether `mcsv` is feasible.
    pub truth: bool,
    pub cover: Option<Vec<usize>>,
}

pub fn certify(x3c: &X3cInstance) -> Result<ReductionCertificate> {
    let n = x3c.subsets.len();
    if n > MAX_CERTIFY_N {
        return Err(Error::GuardExceeded {
            what: "X3C family size",
            limit: MAX_CERTIFY_N,
            got: n,
        });
    }
    let cover = exact_cover(x3c);
    Ok(ReductionCertificate {
        x3c: x3c.clone(),
        mcsv: reduce_x3c(x3c)?,
        truth: cover.is_some(),
        cover,
    })
}

impl ReductionCertificate {
    /// The instance file followed by a `# truth:` trailer.
    pub fn to_text(&self) -> String {
        let mut out = write_instance(&self.mcsv);
        let _ = writeln!(
            out,
            "# truth: {}",
            if self.truth { "feasible" } else { "infeasible" }
        );
        out
    }
}

/// Reads a certificate file back into the instance and its truth label.
pub fn parse_certificate(text: &str) -> Result<(Instance, bool)> {
    let (inst, comments) = parse_instance_with_comments(text)?;
    let truth = match trailer_value(&comments, "truth") {
        Some("feasible") => true,
        Some("infeasible") => false,
        _ => return Err(parse_err(0, "missing `# truth: feasible|infeasible` trailer")),
    };
    Ok((inst, truth))
}

/// `x3c <p> <n>` followed by `n` lines of three 1-based elements.
pub fn parse_x3c(text: &str) -> Result<X3cInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let f: Vec<&str> = header.split_whitespace().collect();
    if f.len() != 3 || f[0] != "x3c" {
        return Err(parse_err(1, "expected header `x3c <p> <n>`"));
    }
    let p: usize = f[1].parse().map_err(|_| parse_err(1, "bad p"))?;
    let n: usize = f[2].parse().map_err(|_| parse_err(1, "bad n"))?;
    let mut subsets = Vec::with_capacity(n);
    for (ln, line) in lines {
        if subsets.len() == n {
            return Err(parse_err(ln, "more subsets than declared"));
        }
        let e: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad element `{t}`"))))
            .collect::<Result<_>>()?;
        if e.len() != 3 {
            return Err(parse_err(ln, "each subset needs exactly 3 elements"));
        }
        subsets.push([e[0], e[1], e[2]]);
    }
    if subsets.len() != n {
        return Err(parse_err(0, format!("declared {n} subsets, found {}", subsets.len())));
    }
    X3cInstance::new(p, subsets)
}

pub fn write_x3c(x3c: &X3cInstance) -> String {
    let mut out = format!("x3c {} {}\n", x3c.p, x3c.subsets.len());
    for s in &x3c.subsets {
        let _ = writeln!(out, "{} {} {}", s[0], s[1], s[2]);
    }
    out
}
