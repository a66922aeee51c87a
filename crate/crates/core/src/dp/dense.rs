//! Dense state grid over the bounding box of all reachable sums.
//!
//! Cell value `0` marks an unreachable sum, otherwise it holds `n_z + 1`.
//! Cells are laid out row-major with the last coordinate contiguous, so one
//! Minkowski step is a shifted element-wise max over rows.

use super::Layer;
use crate::error::{Error, Result};

pub(super) struct DenseGrid {
    dim: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    stride: Vec<usize>,
    cells: Vec<u16>,
    cur_lo: Vec<i64>,
    cur_hi: Vec<i64>,
    len: u64,
    scratch: Vec<u16>,
}

/// Largest item count representable in a `u16` cell.
pub(super) const MAX_ITEMS: usize = u16::MAX as usize - 1;

/// Number of cells in the box `lo..=hi`, or `None` past `u64`.
pub(super) fn box_volume(lo: &[i64], hi: &[i64]) -> Option<u64> {
    lo.iter().zip(hi).try_fold(1u64, |acc, (&l, &h)| {
        let side = u64::try_from(h - l + 1).ok()?;
        acc.checked_mul(side)
    })
}

impl DenseGrid {
    /// `lo..=hi` must contain every sum the grid will ever hold.
    pub(super) fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        let dim = lo.len();
        let vol = box_volume(&lo, &hi)
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| Error::Overflow("dense grid volume".into()))?;
        let mut stride = vec![1usize; dim];
        for j in (0..dim.saturating_sub(1)).rev() {
            stride[j] = stride[j + 1] * (hi[j + 1] - lo[j + 1] + 1) as usize;
        }
        let mut grid = Self {
            dim,
            cells: vec![0; vol],
            cur_lo: vec![0; dim],
            cur_hi: vec![0; dim],
            len: 1,
            scratch: Vec::new(),
            lo,
            hi,
            stride,
        };
        let root = grid.index(&vec![0; dim]).expect("box contains the origin");
        grid.cells[root] = 1;
        Ok(grid)
    }

    fn index(&self, z: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for (((&c, &l), &h), &st) in z.iter().zip(&self.lo).zip(&self.hi).zip(&self.stride) {
            if c < l || c > h {
                return None;
            }
            idx += (c - l) as usize * st;
        }
        Some(idx)
    }

    fn row_len(&self) -> usize {
        let last = self.dim - 1;
        (self.cur_hi[last] - self.cur_lo[last] + 1) as usize
    }

    fn row_count(&self) -> usize {
        (0..self.dim - 1)
            .map(|j| (self.cur_hi[j] - self.cur_lo[j] + 1) as usize)
            .product()
    }

    /// Linear index of the first cell of outer row `r` of the current box,
    /// writing the row's outer coordinates into `z`.
    fn row_start(&self, mut r: usize, z: &mut [i64]) -> usize {
        let last = self.dim - 1;
        let mut idx = (self.cur_lo[last] - self.lo[last]) as usize;
        for j in (0..last).rev() {
            let side = (self.cur_hi[j] - self.cur_lo[j] + 1) as usize;
            let off = r % side;
            r /= side;
            z[j] = self.cur_lo[j] + off as i64;
            idx += (z[j] - self.lo[j]) as usize * self.stride[j];
        }
        idx
    }
}

impl Layer for DenseGrid {
    fn add(&mut self, y: &[i64]) -> Result<()> {
        let last = self.dim - 1;
        let len = self.row_len();
        let rows = self.row_count();
        let shift: isize = y
            .iter()
            .zip(&self.stride)
            .map(|(&c, &s)| c as isize * s as isize)
            .sum();
        // Rows that receive writes must already have been read: walk rows
        // against the direction of the outer shift.
        let descending = y[..last].iter().find(|&&c| c != 0).is_some_and(|&c| c > 0);

        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.resize(len, 0);
        let mut z = vec![0i64; self.dim];
        let mut created = 0u64;
        for step in 0..rows {
            let r = if descending { rows - 1 - step } else { step };
            let src = self.row_start(r, &mut z);
            let dst = (src as isize + shift) as usize;
            scratch.copy_from_slice(&self.cells[src..src + len]);
            let mut row_created = 0u32;
            for (d, &s) in self.cells[dst..dst + len].iter_mut().zip(&scratch) {
                // s <= MAX_ITEMS here, so the increment cannot wrap.
                let cand = s.wrapping_add((s != 0) as u16);
                row_created = row_created.wrapping_add(((*d == 0) & (cand != 0)) as u32);
                *d = (*d).max(cand);
            }
            created += row_created as u64;
        }
        self.scratch = scratch;

        for ((l, h), &c) in self.cur_lo.iter_mut().zip(&mut self.cur_hi).zip(y) {
            *l = (*l).min(*l + c);
            *h = (*h).max(*h + c);
        }
        self.len += created;
        Ok(())
    }

    fn len(&self) -> u64 {
        self.len
    }

    fn get(&self, z: &[i64]) -> Option<u32> {
        let v = self.cells[self.index(z)?];
        (v != 0).then(|| v as u32 - 1)
    }

    fn for_each(&self, f: &mut dyn FnMut(&[i64], u32)) {
        let last = self.dim - 1;
        let len = self.row_len();
        let mut z = vec![0i64; self.dim];
        for r in 0..self.row_count() {
            let start = self.row_start(r, &mut z);
            for (t, &v) in self.cells[start..start + len].iter().enumerate() {
                if v != 0 {
                    z[last] = self.cur_lo[last] + t as i64;
                    f(&z, v as u32 - 1);
                }
            }
        }
    }
}
