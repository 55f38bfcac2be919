//! Symmetric-normalised discrete Fourier transform on [`GridSpec`] lattices.
//!
//! `dft(u)(xi_j) = (2 pi)^{-n/2} h^n sum_k u(x_k) exp(-i <xi_j, x_k>)`, which
//! approximates the unitary continuum transform. `idft` is its exact inverse.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{Domain, Field};
use super::grid::GridSpec;
use crate::error::Result;
use crate::exec;

type Plan = Arc<dyn Fft<f64>>;
type PlanCache = Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Plan>)>;

fn plan(len: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let (planner, plans) = &mut *guard;
    plans
        .entry((len, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Unnormalised n-D FFT in place, one axis at a time.
fn fft_nd(values: &mut [Complex64], grid: &GridSpec, inverse: bool) {
    let n = grid.points();
    let dim = grid.dim();
    let fft = plan(n, inverse);
    let lines = grid.len() / n;

    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            transform_contiguous(values, n, &fft);
            continue;
        }
        let src: &[Complex64] = values;
        let out: Vec<Vec<Complex64>> = exec::map_indices(lines, |line| {
            let outer = line / stride;
            let inner = line % stride;
            let start = outer * n * stride + inner;
            let mut buf: Vec<Complex64> = (0..n).map(|k| src[start + k * stride]).collect();
            fft.process(&mut buf);
            buf
        });
        for (line, buf) in out.into_iter().enumerate() {
            let start = (line / stride) * n * stride + line % stride;
            for (k, v) in buf.into_iter().enumerate() {
                values[start + k * stride] = v;
            }
        }
    }
}

fn transform_contiguous(values: &mut [Complex64], n: usize, fft: &Plan) {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        values.par_chunks_mut(n).for_each(|chunk| fft.process(chunk));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for chunk in values.chunks_mut(n) {
            fft.process(chunk);
        }
    }
}

/// Maps stored spectral position `k` (j = k - N/2) to the FFT bin of `j`.
#[inline]
fn fft_bin(k: usize, n: usize) -> usize {
    (k + n / 2) % n
}

fn checkerboard_sign(idx: &[usize]) -> f64 {
    // (-1)^{sum j_a}; N/2 is even for N >= 8, so the parity of j equals that of k.
    if idx.iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn forward_scale(grid: &GridSpec) -> f64 {
    grid.cell_volume() * (2.0 * PI).powf(-(grid.dim() as f64) / 2.0)
}

/// Forward transform of a physical field.
pub fn dft(u: &Field) -> Result<Field> {
    u.expect_domain(Domain::Physical)?;
    let grid = *u.grid();
    let mut raw = u.values().to_vec();
    fft_nd(&mut raw, &grid, false);

    let n = grid.points();
    let dim = grid.dim();
    let scale = forward_scale(&grid);
    let raw = &raw;
    let values = exec::map_indices(grid.len(), |flat| {
        let idx = grid.unravel(flat);
        let mut src = [0usize; 3];
        for a in 0..dim {
            src[a] = fft_bin(idx[a], n);
        }
        raw[grid.ravel(&src[..dim])] * (scale * checkerboard_sign(&idx[..dim]))
    });
    Ok(Field::from_parts(grid, Domain::Spectral, values))
}

/// Exact inverse of [`dft`].
pub fn idft(v: &Field) -> Result<Field> {
    v.expect_domain(Domain::Spectral)?;
    let grid = *v.grid();
    let n = grid.points();
    let dim = grid.dim();
    let src = v.values();

    // Undo the shift and the checkerboard, landing in FFT bin order.
    let mut raw = exec::map_indices(grid.len(), |bin_flat| {
        let bins = grid.unravel(bin_flat);
        let mut idx = [0usize; 3];
        for a in 0..dim {
            idx[a] = (bins[a] + n / 2) % n;
        }
        src[grid.ravel(&idx[..dim])] * checkerboard_sign(&idx[..dim])
    });
    fft_nd(&mut raw, &grid, true);

    let inv = 1.0 / (forward_scale(&grid) * grid.len() as f64);
    for x in raw.iter_mut() {
        *x *= inv;
    }
    Ok(Field::from_parts(grid, Domain::Physical, raw))
}
