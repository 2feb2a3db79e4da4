//! Data-parallel iteration with a sequential fallback.
//!
//! With the `parallel` feature this re-exports the rayon prelude. Without it
//! the same method names resolve to plain iterators, so call sites compile
//! unchanged. Only the adaptor subset shared by `Iterator` and rayon's
//! `ParallelIterator` (`map`, `enumerate`, `zip`, `collect`, `sum`, `max_by`,
//! `all`, `any`) may be used downstream of these entry points.

#[cfg(feature = "parallel")]
pub use rayon::prelude::*;

#[cfg(not(feature = "parallel"))]
pub use self::sequential::*;

#[cfg(not(feature = "parallel"))]
mod sequential {
    pub trait IntoParallelIterator: Sized {
        type Item;
        type Iter: Iterator<Item = Self::Item>;

        fn into_par_iter(self) -> Self::Iter;
    }

    impl<I: IntoIterator> IntoParallelIterator for I {
        type Item = I::Item;
        type Iter = I::IntoIter;

        fn into_par_iter(self) -> Self::Iter {
            self.into_iter()
        }
    }

    pub trait IntoParallelRefIterator<'data> {
        type Item: 'data;
        type Iter: Iterator<Item = Self::Item>;

        fn par_iter(&'data self) -> Self::Iter;
    }

    impl<'data, I: 'data + ?Sized> IntoParallelRefIterator<'data> for I
    where
        &'data I: IntoParallelIterator,
    {
        type Item = <&'data I as IntoParallelIterator>::Item;
        type Iter = <&'data I as IntoParallelIterator>::Iter;

        fn par_iter(&'data self) -> Self::Iter {
            self.into_par_iter()
        }
    }

    pub trait ParallelSlice<T> {
        fn par_windows(&self, size: usize) -> std::slice::Windows<'_, T>;
        fn par_chunks(&self, size: usize) -> std::slice::Chunks<'_, T>;
    }

    impl<T> ParallelSlice<T> for [T] {
        fn par_windows(&self, size: usize) -> std::slice::Windows<'_, T> {
            self.windows(size)
        }

        fn par_chunks(&self, size: usize) -> std::slice::Chunks<'_, T> {
            self.chunks(size)
        }
    }
}

/// Number of worker threads the data-parallel sections can use.
pub fn workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
