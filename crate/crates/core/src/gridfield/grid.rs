use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// A uniform grid on `[-L, L)^n` with `N` points per axis.
///
/// Grid point `k` sits at `x_k = -L + k h` with `h = 2L / N`. The matching
/// frequency lattice is `xi_j = (pi / L) j` for `j in -N/2 .. N/2`; spectral
/// arrays store `j` at position `j + N/2` on every axis, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_extent: f64,
    points: usize,
    spacing: f64,
}

impl GridSpec {
    pub fn new(dim: usize, half_extent: f64, points: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} unsupported (expected 1, 2 or 3)"
            )));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-extent must be positive and finite, got {half_extent}"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        // Division by a power of two is exact, so h * N == 2L holds bitwise.
        let spacing = 2.0 * half_extent / points as f64;
        Ok(Self {
            dim,
            half_extent,
            points,
            spacing,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Spacing of the frequency lattice, `pi / L`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_extent
    }

    /// Spectral cell volume `(pi / L)^n`.
    pub fn freq_cell_volume(&self) -> f64 {
        self.freq_spacing().powi(self.dim as i32)
    }

    /// Physical coordinate of axis index `k`.
    pub fn coordinate(&self, k: usize) -> f64 {
        -self.half_extent + k as f64 * self.spacing
    }

    /// Frequency of stored axis index `k` (i.e. `j = k - N/2`).
    pub fn frequency(&self, k: usize) -> f64 {
        self.freq_spacing() * (k as f64 - (self.points / 2) as f64)
    }

    /// Same extent with `2N` points per axis.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.dim, self.half_extent, self.points * 2)
    }

    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.dim, self.half_extent, points)
    }

    /// Multi-index of a flat row-major position (unused axes are zero).
    pub fn unravel(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.dim)
            .fold(0usize, |acc, &k| acc * self.points + k)
    }

    /// Physical point of a flat index.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(flat);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.coordinate(idx[a]);
        }
        x
    }

    /// Frequency point of a flat spectral index.
    pub fn frequency_point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(flat);
        let mut xi = [0.0; MAX_DIM];
        for a in 0..self.dim {
            xi[a] = self.frequency(idx[a]);
        }
        xi
    }

    /// `|xi|^2` at a flat spectral index.
    pub fn frequency_norm_sq(&self, flat: usize) -> f64 {
        self.frequency_point(flat)[..self.dim]
            .iter()
            .map(|v| v * v)
            .sum()
    }

    pub(crate) fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "point has {} components, grid dimension is {}",
                p.len(),
                self.dim
            )));
        }
        Ok(())
    }
}
