//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature, [`Exec::Parallel`] runs on the rayon pool.
//! Without it, both modes run sequentially. Results never depend on the mode.

use std::cmp::Ordering;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Order-preserving map.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
        }
        items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
    }

    /// Minimum of `f` over `items` under a total order `cmp`; `None` values are skipped.
    pub fn min_by<T, R, F, C>(self, items: &[T], f: F, cmp: C) -> Option<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Option<R> + Sync + Send,
        C: Fn(&R, &R) -> Ordering + Sync + Send,
    {
        let pick = |a: Option<R>, b: Option<R>| match (a, b) {
            (Some(a), Some(b)) => Some(if cmp(&b, &a) == Ordering::Less { b } else { a }),
            (a, None) => a,
            (None, b) => b,
        };
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(&f).reduce(|| None, pick);
        }
        items.iter().map(f).fold(None, pick)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let sq = |_: usize, x: &u64| x * x % 97;
        assert_eq!(Exec::Parallel.map(&xs, sq), Exec::Sequential.map(&xs, sq));
        let key = |x: &u64| Some((x * 31 % 101, *x));
        let a = Exec::Parallel.min_by(&xs, key, |a, b| a.cmp(b));
        let b = Exec::Sequential.min_by(&xs, key, |a, b| a.cmp(b));
        assert_eq!(a, b);
        assert_eq!(a.unwrap().0, 0);
    }
}
