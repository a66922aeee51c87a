use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::Layer;
use crate::error::{Error, Result};

/// Hash-keyed state set for boxes too large to allocate densely.
pub(super) struct SparseMap {
    map: HashMap<Box<[i64]>, u32>,
    limit: u64,
}

impl SparseMap {
    pub(super) fn new(dim: usize, limit: u64) -> Self {
        let mut map = HashMap::new();
        map.insert(vec![0i64; dim].into_boxed_slice(), 0);
        Self { map, limit }
    }
}

impl Layer for SparseMap {
    fn add(&mut self, y: &[i64]) -> Result<()> {
        // Candidates come from the previous layer only, so y is used at most once.
        let snapshot: Vec<(Box<[i64]>, u32)> =
            self.map.iter().map(|(z, &n)| (z.clone(), n)).collect();
        for (z, n) in snapshot {
            let shifted: Box<[i64]> = z.iter().zip(y).map(|(a, b)| a + b).collect();
            match self.map.entry(shifted) {
                Entry::Occupied(mut e) => {
                    if *e.get() < n + 1 {
                        e.insert(n + 1);
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(n + 1);
                }
            }
        }
        let states = self.map.len() as u64;
        if states > self.limit {
            return Err(Error::ResourceExhausted {
                states,
                limit: self.limit,
            });
        }
        Ok(())
    }

    fn len(&self) -> u64 {
        self.map.len() as u64
    }

    fn get(&self, z: &[i64]) -> Option<u32> {
        self.map.get(z).copied()
    }

    fn for_each(&self, f: &mut dyn FnMut(&[i64], u32)) {
        for (z, &n) in &self.map {
            f(z, n);
        }
    }
}
