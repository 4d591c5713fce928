//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the helpers dispatch to rayon; without
//! it they run the same closures on the calling thread. Call sites never
//! branch on the feature themselves.

use ndarray::{Array3, Axis, Zip};

use crate::C64;

/// Maps every lane of `input` along `axis` into the matching lane of a new array
/// whose extent along `axis` is `out_len`.
///
/// `f` receives a contiguous copy of the input lane and a zeroed output buffer.
pub fn map_lanes<F>(input: &Array3<C64>, axis: usize, out_len: usize, f: F) -> Array3<C64>
where
    F: Fn(&mut [C64], &mut [C64]) + Sync + Send,
{
    let mut shape = [input.dim().0, input.dim().1, input.dim().2];
    shape[axis] = out_len;
    let mut out = Array3::<C64>::zeros(shape);
    let zip = Zip::from(input.lanes(Axis(axis))).and(out.lanes_mut(Axis(axis)));
    let body = |src: ndarray::ArrayView1<C64>, mut dst: ndarray::ArrayViewMut1<C64>| {
        let mut a: Vec<C64> = src.to_vec();
        let mut b = vec![C64::new(0.0, 0.0); out_len];
        f(&mut a, &mut b);
        for (d, v) in dst.iter_mut().zip(b) {
            *d = v;
        }
    };
    if threads() > 1 {
        #[cfg(feature = "parallel")]
        zip.par_for_each(body);
    } else {
        zip.for_each(body);
    }
    out
}

/// Runs `f` over `0..n` and collects the results in order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Applies `f` to every element of `arr` in place.
pub fn for_each_mut<F>(arr: &mut Array3<C64>, f: F)
where
    F: Fn(&mut C64) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use ndarray::parallel::prelude::*;
        arr.par_iter_mut().for_each(f);
    }
    #[cfg(not(feature = "parallel"))]
    arr.iter_mut().for_each(f);
}

/// Worker threads available to the helpers (1 without the `parallel` feature).
///
/// A single worker runs the sequential path: splitting fine-grained lane work
/// across a one-thread pool only adds scheduling overhead.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// `true` when compiled with rayon support.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
