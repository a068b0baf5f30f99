//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! the rayon pool; without it, or with `Exec::Sequential`, loops run in order.
//! Results never depend on the choice.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Calls `f(i)` for every i in 0..n.
pub fn for_each<F>(exec: Exec, n: usize, f: F)
where
    F: Fn(usize) + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().for_each(f);
        }
        _ => (0..n).for_each(f),
    }
}

/// Collects `f(i)` for i in 0..n, in index order.
pub fn map<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Sums `f(i)` for i in 0..n.
pub fn sum<F>(exec: Exec, n: usize, f: F) -> u128
where
    F: Fn(usize) -> u128 + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).sum()
        }
        _ => (0..n).map(f).sum(),
    }
}

/// Fixed-size bitset that tolerates concurrent marking.
pub struct AtomicBitset {
    words: Vec<AtomicU64>,
    len: u64,
}

impl AtomicBitset {
    pub fn new(len: u64) -> Self {
        let n = len.div_ceil(64) as usize;
        AtomicBitset {
            words: (0..n).map(|_| AtomicU64::new(0)).collect(),
            len,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn set(&self, i: u64) {
        self.words[(i >> 6) as usize].fetch_or(1 << (i & 63), Ordering::Relaxed);
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        self.words[(i >> 6) as usize].load(Ordering::Relaxed) & (1 << (i & 63)) != 0
    }

    pub fn count_ones(&self, exec: Exec) -> u64 {
        sum(exec, self.words.len(), |i| {
            self.words[i].load(Ordering::Relaxed).count_ones() as u128
        }) as u64
    }

    /// Calls `f` on every index whose bit is clear, in chunks of 64 indices.
    pub fn for_each_clear<F>(&self, exec: Exec, f: F)
    where
        F: Fn(u64) + Sync + Send,
    {
        for_each(exec, self.words.len(), |w| {
            let bits = self.words[w].load(Ordering::Relaxed);
            let base = (w as u64) << 6;
            for b in 0..64u64 {
                let i = base + b;
                if i >= self.len {
                    break;
                }
                if bits & (1 << b) == 0 {
                    f(i);
                }
            }
        });
    }
}
