use std::fmt;

use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{invalid, Error, Result};
use crate::exec;

/// Which side of the transform a [`Field`] lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Physical,
    Spectral,
}

impl Domain {
    pub fn tag(self) -> u8 {
        match self {
            Domain::Physical => 0,
            Domain::Spectral => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Domain::Physical),
            1 => Some(Domain::Spectral),
            _ => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Physical => f.write_str("physical"),
            Domain::Spectral => f.write_str("spectral"),
        }
    }
}

/// Complex samples on a grid, row-major. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    domain: Domain,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: GridSpec, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            domain,
            values,
        })
    }

    pub(crate) fn from_parts(grid: GridSpec, domain: Domain, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid,
            domain,
            values,
        }
    }

    pub fn constant(grid: GridSpec, domain: Domain, value: Complex64) -> Self {
        Self::from_parts(grid, domain, vec![value; grid.len()])
    }

    pub fn from_real(grid: GridSpec, domain: Domain, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            domain,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain != expected {
            return Err(Error::DomainMismatch {
                expected,
                found: self.domain,
            });
        }
        Ok(())
    }

    pub fn expect_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Pointwise map, keeping grid and domain.
    pub fn map<F>(&self, f: F) -> Field
    where
        F: Fn(Complex64) -> Complex64 + Sync + Send,
    {
        let values = exec::map(&self.values, |&v| f(v));
        Self::from_parts(self.grid, self.domain, values)
    }

    /// Pointwise map that also sees the flat index.
    pub fn map_indexed<F>(&self, f: F) -> Field
    where
        F: Fn(usize, Complex64) -> Complex64 + Sync + Send,
    {
        let vals = &self.values;
        let values = exec::map_indices(vals.len(), |i| f(i, vals[i]));
        Self::from_parts(self.grid, self.domain, values)
    }

    /// Pointwise combination of two fields on the same grid and domain.
    pub fn zip_with<F>(&self, other: &Field, f: F) -> Result<Field>
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Sync + Send,
    {
        self.expect_same_grid(other)?;
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain,
                found: other.domain,
            });
        }
        let (a, b) = (&self.values, &other.values);
        let values = exec::map_indices(a.len(), |i| f(a[i], b[i]));
        Ok(Self::from_parts(self.grid, self.domain, values))
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// First non-finite sample, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if let Some(index) = self.first_non_finite() {
            let p = match self.domain {
                Domain::Physical => self.grid.point(index),
                Domain::Spectral => self.grid.frequency_point(index),
            };
            return Err(Error::NonFinite {
                index,
                point: p[..self.grid.dim()].to_vec(),
                value: format!("{}", self.values[index]),
            });
        }
        Ok(())
    }
}

/// Samples `f` at every grid point, producing a physical field.
pub fn sample_function<F>(f: F, grid: &GridSpec) -> Result<Field>
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    let dim = grid.dim();
    let values = exec::map_indices(grid.len(), |i| {
        let x = grid.point(i);
        f(&x[..dim])
    });
    let field = Field::from_parts(*grid, Domain::Physical, values);
    field.check_finite()?;
    Ok(field)
}

/// Discrete `L_p` norm `h^{n/p} (sum |u_k|^p)^{1/p}` of a physical field.
///
/// Terms are sorted before the pairwise sum, so the result depends only on
/// the multiset of sample magnitudes.
pub fn lp_norm(u: &Field, p: f64) -> Result<f64> {
    u.expect_domain(Domain::Physical)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("L_p norm needs 1 < p < inf, got {p}")));
    }
    let mut terms: Vec<f64> = if p == 2.0 {
        exec::map(u.values(), |v| v.norm_sqr())
    } else {
        exec::map(u.values(), |v| v.norm().powf(p))
    };
    terms.sort_unstable_by(f64::total_cmp);
    let s = exec::pairwise_sum(&terms);
    Ok(u.grid().cell_volume().powf(1.0 / p) * s.powf(1.0 / p))
}

/// Grid inner product `h^n sum a_k conj(b_k)`.
pub fn inner_product(a: &Field, b: &Field) -> Result<Complex64> {
    a.expect_same_grid(b)?;
    let (x, y) = (a.values(), b.values());
    let s = exec::pairwise_sum_by(x.len(), |i| x[i] * y[i].conj());
    Ok(s * a.grid().cell_volume())
}

/// Cyclic shift: `out[k] = u[k - shift]` componentwise modulo `N`.
pub fn cyclic_translate(u: &Field, shift: &[usize]) -> Result<Field> {
    let grid = *u.grid();
    if shift.len() != grid.dim() {
        return Err(invalid(format!(
            "shift has {} components, grid dimension is {}",
            shift.len(),
            grid.dim()
        )));
    }
    let n = grid.points();
    let dim = grid.dim();
    let src = u.values();
    let values = exec::map_indices(grid.len(), |flat| {
        let mut idx = grid.unravel(flat);
        for a in 0..dim {
            idx[a] = (idx[a] + n - shift[a] % n) % n;
        }
        src[grid.ravel(&idx[..dim])]
    });
    Ok(Field::from_parts(grid, u.domain(), values))
}
