//! Thin wrappers over `rustfft` with a per-thread planner cache.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized in-place transform. `forward` uses the `e^{-i}` kernel.
pub fn fft_inplace(buf: &mut [Complex64], forward: bool) {
    let n = buf.len();
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    });
    plan.process(buf);
}

/// Unnormalized 2D transform of a row-major `rows x cols` array.
pub fn fft2_inplace(buf: &mut [Complex64], rows: usize, cols: usize, forward: bool) {
    debug_assert_eq!(buf.len(), rows * cols);
    for row in buf.chunks_exact_mut(cols) {
        fft_inplace(row, forward);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = buf[r * cols + c];
        }
        fft_inplace(&mut column, forward);
        for r in 0..rows {
            buf[r * cols + c] = column[r];
        }
    }
}

/// Signed wavenumber index of storage slot `i` for an `n`-point transform.
#[inline]
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Storage slot of signed index `k`, if it exists on an `n`-point lattice.
#[inline]
pub fn slot_of(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k < -half || k >= half {
        None
    } else if k >= 0 {
        Some(k as usize)
    } else {
        Some((k + n as i64) as usize)
    }
}

#[inline]
pub(crate) fn parity_sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}
