//! Uniform grids, sampled fields, the symmetric DFT, `L_p` quadrature and
//! log-log regression.

mod dump;
mod fft;
mod field;
mod fit;
mod grid;

pub use dump::{read_field, write_field, HEADER_LEN, MAGIC, VERSION};
pub use fft::{dft, idft};
pub use field::{cyclic_translate, inner_product, lp_norm, sample_function, Domain, Field};
pub use fit::{fit_loglog_slope, SlopeFit};
pub use grid::{GridSpec, MAX_DIM};

/// Convenience constructor mirroring [`GridSpec::new`].
pub fn make_grid(dim: usize, half_extent: f64, points: usize) -> crate::Result<GridSpec> {
    GridSpec::new(dim, half_extent, points)
}
