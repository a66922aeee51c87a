//! Exact pseudo-polynomial dynamic program.
//!
//! Layer `k` holds every sum `z` of distinct vectors among the first `k`
//! inputs, annotated with `n_z`, the largest number of addends producing it:
//!
//! ```text
//! S_1 = {0, y_1},   S_k = S_{k-1} + ({0} u {y_k}),
//! n_{z + y_k} = max(n_{z + y_k}, n_z + 1)
//! ```
//!
//! Keeping only the largest count per sum loses nothing: for fixed `z` the
//! feasibility test `||z||^2 N <= alpha ||sum Y||^2 n` only gets easier as `n`
//! grows. After the last layer the feasible entry with the largest `n_z` wins.
//!
//! The witness subset is recovered by divide and conquer over the input
//! sequence rather than by storing a back-pointer per state; see
//! [`reconstruct`].

mod dense;
mod sparse;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::instance::{sq_norm, Instance, Solution, SolveOutcome};

use dense::{box_volume, DenseGrid};
use sparse::SparseMap;

trait Layer {
    fn add(&mut self, y: &[i64]) -> Result<()>;
    fn len(&self) -> u64;
    fn get(&self, z: &[i64]) -> Option<u32>;
    fn for_each(&self, f: &mut dyn FnMut(&[i64], u32));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Dense when the bounding box fits the cell budget, sparse otherwise.
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone)]
pub struct DpOptions {
    pub backend: Backend,
    /// Largest dense grid, in cells (two bytes each).
    pub dense_cell_limit: u64,
    /// Largest sparse state set.
    pub max_states: u64,
    pub deadline: Option<Instant>,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self {
            backend: Backend::Auto,
            dense_cell_limit: 1 << 28,
            max_states: 1 << 24,
            deadline: None,
        }
    }
}

impl DpOptions {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }

    fn check_deadline(&self, layer: usize) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::Timeout { layer }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpStats {
    /// `|S_k|` for `k = 1..=N`.
    pub layer_sizes: Vec<u64>,
    /// Wall time elapsed when each layer was finished.
    pub layer_elapsed: Vec<Duration>,
    pub peak_states: u64,
    /// Forward pass, scan and reconstruction together.
    pub elapsed: Duration,
    pub backend: Backend,
}

impl DpStats {
    /// One line per layer: `k |S_k| cumulative_ms`.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (k, (size, t)) in self.layer_sizes.iter().zip(&self.layer_elapsed).enumerate() {
            let _ = writeln!(out, "{} {} {:.3}", k + 1, size, t.as_secs_f64() * 1e3);
        }
        out
    }
}

/// One DP layer: the reachable sums of a prefix of the input together with
/// their maximal addend counts.
pub struct StateSet {
    dim: usize,
    layer: usize,
    store: Store,
}

enum Store {
    Dense(DenseGrid),
    Sparse(SparseMap),
}

impl StateSet {
    fn start(vectors: &[&[i64]], dim: usize, opts: &DpOptions) -> Result<Self> {
        let mut lo = vec![0i64; dim];
        let mut hi = vec![0i64; dim];
        for y in vectors {
            for j in 0..dim {
                lo[j] += y[j].min(0);
                hi[j] += y[j].max(0);
            }
        }
        let volume = box_volume(&lo, &hi);
        let fits = volume.is_some_and(|v| v <= opts.dense_cell_limit)
            && vectors.len() <= dense::MAX_ITEMS;
        let dense = match opts.backend {
            Backend::Auto => fits,
            Backend::Dense if fits => true,
            Backend::Dense => {
                return Err(Error::ResourceExhausted {
                    states: volume.unwrap_or(u64::MAX),
                    limit: opts.dense_cell_limit,
                })
            }
            Backend::Sparse => false,
        };
        let store = if dense {
            Store::Dense(DenseGrid::new(lo, hi)?)
        } else {
            Store::Sparse(SparseMap::new(dim, opts.max_states))
        };
        Ok(Self {
            dim,
            layer: 0,
            store,
        })
    }

    fn inner(&self) -> &dyn Layer {
        match &self.store {
            Store::Dense(d) => d,
            Store::Sparse(s) => s,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Layer {
        match &mut self.store {
            Store::Dense(d) => d,
            Store::Sparse(s) => s,
        }
    }

    fn add(&mut self, y: &[i64]) -> Result<()> {
        self.inner_mut().add(y)?;
        self.layer += 1;
        Ok(())
    }

    /// Layer index `k`: the set covers the first `k` input vectors.
    pub fn layer(&self) -> usize {
        self.layer
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> u64 {
        self.inner().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn backend(&self) -> Backend {
        match self.store {
            Store::Dense(_) => Backend::Dense,
            Store::Sparse(_) => Backend::Sparse,
        }
    }

    /// `n_z`, or `None` when `z` is not reachable.
    pub fn get(&self, z: &[i64]) -> Option<u32> {
        if z.len() != self.dim {
            return None;
        }
        self.inner().get(z)
    }

    /// Visits every entry. Order is lexicographic for dense sets and
    /// unspecified for sparse ones.
    pub fn for_each(&self, mut f: impl FnMut(&[i64], u32)) {
        self.inner().for_each(&mut f)
    }

    /// All entries sorted lexicographically by sum.
    pub fn entries(&self) -> Vec<(Vec<i64>, u32)> {
        let mut out = Vec::with_capacity(self.len() as usize);
        self.for_each(|z, n| out.push((z.to_vec(), n)));
        out.sort_unstable();
        out
    }
}

fn build(
    vectors: &[&[i64]],
    dim: usize,
    opts: &DpOptions,
    mut on_layer: impl FnMut(&StateSet),
) -> Result<StateSet> {
    let mut set = StateSet::start(vectors, dim, opts)?;
    for (k, y) in vectors.iter().enumerate() {
        opts.check_deadline(k)?;
        set.add(y)?;
        on_layer(&set);
    }
    Ok(set)
}

/// Layer `S_k` for the first `k` vectors of `inst` (`S_0` is the root alone).
pub fn build_layer(inst: &Instance, k: usize, opts: &DpOptions) -> Result<StateSet> {
    let vectors: Vec<&[i64]> = inst.vectors().take(k).collect();
    build(&vectors, inst.dim(), opts, |_| {})
}

/// Final-layer entries that pass the threshold test, excluding the root
/// (`z = 0`, `n = 0`), sorted by sum.
pub fn dp_feasible_set(inst: &Instance) -> Result<Vec<(Vec<i64>, u32)>> {
    dp_feasible_set_with(inst, &DpOptions::default())
}

pub fn dp_feasible_set_with(inst: &Instance, opts: &DpOptions) -> Result<Vec<(Vec<i64>, u32)>> {
    let last = build_layer(inst, inst.len(), opts)?;
    let mut out = Vec::new();
    last.for_each(|z, n| {
        if n >= 1 && inst.sum_is_feasible(z, n as usize) {
            out.push((z.to_vec(), n));
        }
    });
    out.sort_unstable();
    Ok(out)
}

pub fn dp_solve(inst: &Instance) -> Result<(SolveOutcome, DpStats)> {
    dp_solve_with(inst, &DpOptions::default())
}

pub fn dp_solve_with(inst: &Instance, opts: &DpOptions) -> Result<(SolveOutcome, DpStats)> {
    let start = Instant::now();
    let vectors: Vec<&[i64]> = inst.vectors().collect();
    let mut layer_sizes = Vec::with_capacity(vectors.len());
    let mut layer_elapsed = Vec::with_capacity(vectors.len());
    let last = build(&vectors, inst.dim(), opts, |s| {
        layer_sizes.push(s.len());
        layer_elapsed.push(start.elapsed());
    })?;
    let backend = last.backend();

    // Largest n, then smallest ||z||^2, then lexicographically smallest z.
    let mut best: Option<(u32, i128, Vec<i64>)> = None;
    last.for_each(|z, n| {
        if n == 0 || !inst.sum_is_feasible(z, n as usize) {
            return;
        }
        let norm = sq_norm(z);
        let better = match &best {
            None => true,
            Some((bn, bnorm, bz)) => {
                n > *bn || (n == *bn && (norm < *bnorm || (norm == *bnorm && z < bz.as_slice())))
            }
        };
        if better {
            best = Some((n, norm, z.to_vec()));
        }
    });
    drop(last);

    let outcome = match best {
        None => SolveOutcome::Infeasible,
        Some((n, _, z)) => {
            let mut indices = Vec::with_capacity(n as usize);
            witness(inst, 0, inst.len(), &z, n, opts, &mut indices)?;
            SolveOutcome::Feasible(Solution::new(inst, &indices)?)
        }
    };
    let peak_states = layer_sizes.iter().copied().max().unwrap_or(0);
    Ok((
        outcome,
        DpStats {
            layer_sizes,
            layer_elapsed,
            peak_states,
            elapsed: start.elapsed(),
            backend,
        },
    ))
}

/// Recovers `n_z` distinct indices among the first `states.layer()` vectors
/// whose vectors sum to `z`.
pub fn reconstruct(inst: &Instance, states: &StateSet, z: &[i64]) -> Result<Vec<usize>> {
    reconstruct_with(inst, states, z, &DpOptions::default())
}

pub fn reconstruct_with(
    inst: &Instance,
    states: &StateSet,
    z: &[i64],
    opts: &DpOptions,
) -> Result<Vec<usize>> {
    let n = states.get(z).ok_or(Error::StateNotFound)?;
    let mut out = Vec::with_capacity(n as usize);
    witness(inst, 0, states.layer(), z, n, opts, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

/// Appends to `out` exactly `n` indices from `lo..hi` summing to `z`, where
/// `n` is the maximal addend count for `z` over that range.
///
/// Splits the range in half, builds the final layer of each half, and picks
/// the lexicographically smallest left sum `a` with
/// `n_left(a) + n_right(z - a) = n`. Maximality of `n` guarantees such a split
/// exists and that both halves again carry maximal counts.
fn witness(
    inst: &Instance,
    lo: usize,
    hi: usize,
    z: &[i64],
    n: u32,
    opts: &DpOptions,
    out: &mut Vec<usize>,
) -> Result<()> {
    let len = hi - lo;
    if n == 0 {
        debug_assert!(z.iter().all(|&c| c == 0));
        return Ok(());
    }
    if n as usize == len {
        out.extend(lo..hi);
        return Ok(());
    }
    if len == 1 {
        debug_assert_eq!(inst.vector(lo), z);
        out.push(lo);
        return Ok(());
    }
    opts.check_deadline(lo)?;

    let mid = lo + len / 2;
    let left_vecs: Vec<&[i64]> = (lo..mid).map(|i| inst.vector(i)).collect();
    let right_vecs: Vec<&[i64]> = (mid..hi).map(|i| inst.vector(i)).collect();
    let left = build(&left_vecs, inst.dim(), opts, |_| {})?;
    let right = build(&right_vecs, inst.dim(), opts, |_| {})?;

    let mut rest = vec![0i64; z.len()];
    let mut split: Option<(Vec<i64>, u32, u32)> = None;
    left.for_each(|a, na| {
        if split.as_ref().is_some_and(|(best, _, _)| a >= best.as_slice()) {
            return;
        }
        for j in 0..z.len() {
            rest[j] = z[j] - a[j];
        }
        if let Some(nb) = right.get(&rest) {
            if na + nb == n {
                split = Some((a.to_vec(), na, nb));
            }
        }
    });
    drop(left);
    drop(right);
    let (a, na, nb) = split.ok_or(Error::StateNotFound)?;
    let b: Vec<i64> = z.iter().zip(&a).map(|(x, y)| x - y).collect();
    witness(inst, lo, mid, &a, na, opts, out)?;
    witness(inst, mid, hi, &b, nb, opts, out)
}
