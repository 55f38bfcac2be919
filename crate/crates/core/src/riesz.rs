//! The Riesz family `f_alpha(x) = |x|^{-alpha}` (with `f_alpha(0) = 0`).
//!
//! Pointwise evaluation, integrability and temperedness predicates, the
//! Fourier-transform constant `C(alpha, n)`, singularity-aware sampling and a
//! convolution oracle for `F(psi f_alpha)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, precondition, Error, Result};
use crate::exec;
use crate::gridfield::{Domain, Field, GridSpec, MAX_DIM};
use crate::special::{gamma, gauss_legendre};

/// Exponent `alpha` of `|x|^{-alpha}` on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszParam {
    alpha: f64,
    dim: usize,
}

impl RieszParam {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self { alpha, dim })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `f_alpha` defines a tempered distribution iff `alpha < n`.
    pub fn is_tempered(&self) -> bool {
        self.alpha < self.dim as f64
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        radial_power(r2, self.alpha)
    }

    /// The partner exponent `n - alpha` appearing in the transform law.
    pub fn dual(&self) -> Result<Self> {
        self.require_tempered()?;
        Self::new(self.dim as f64 - self.alpha, self.dim)
    }

    fn require_tempered(&self) -> Result<()> {
        if !self.is_tempered() {
            return Err(precondition(format!(
                "f_alpha with alpha = {} >= n = {} is not a tempered distribution",
                self.alpha, self.dim
            )));
        }
        Ok(())
    }
}

#[inline]
fn radial_power(r2: f64, alpha: f64) -> f64 {
    if r2 == 0.0 {
        0.0
    } else {
        r2.powf(-0.5 * alpha)
    }
}

/// `|x|^{-alpha}` away from the origin and exactly 0 at the origin.
pub fn f_alpha_eval(param: &RieszParam, x: &[f64]) -> f64 {
    param.eval(x)
}

/// Local and global integrability of `f_alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Integrability {
    /// Integrable on the unit ball: `alpha < n`.
    pub on_unit_ball: bool,
    /// Integrable outside the unit ball: `alpha > n`.
    pub off_unit_ball: bool,
}

pub fn integrability_check(param: &RieszParam) -> Integrability {
    let n = param.dim as f64;
    Integrability {
        on_unit_ball: param.alpha < n,
        off_unit_ball: param.alpha > n,
    }
}

/// Surface area of the unit sphere in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
pub fn sphere_area(dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// `C(alpha, n) = 2^{n/2 - alpha} Gamma((n - alpha)/2) / Gamma(alpha/2)`,
/// so that `F(f_alpha) = C(alpha, n) f_{n - alpha}` under the unitary transform.
pub fn riesz_ft_constant(param: &RieszParam) -> Result<f64> {
    param.require_tempered()?;
    let n = param.dim as f64;
    let a = param.alpha;
    Ok(2f64.powf(n / 2.0 - a) * gamma((n - a) / 2.0) / gamma(a / 2.0))
}

/// Quadrature settings for the grid cell that contains the singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularCellRule {
    subdivision_depth: u32,
    samples_per_axis: usize,
}

impl Default for SingularCellRule {
    fn default() -> Self {
        Self {
            subdivision_depth: 3,
            samples_per_axis: 4,
        }
    }
}

impl SingularCellRule {
    pub fn new(subdivision_depth: u32, samples_per_axis: usize) -> Result<Self> {
        if subdivision_depth < 1 {
            return Err(invalid("subdivision depth must be at least 1"));
        }
        if samples_per_axis < 2 {
            return Err(invalid("need at least 2 samples per axis"));
        }
        if subdivision_depth > 8 {
            return Err(invalid("subdivision depth above 8 is not supported"));
        }
        Ok(Self {
            subdivision_depth,
            samples_per_axis,
        })
    }

    pub fn subdivision_depth(&self) -> u32 {
        self.subdivision_depth
    }

    pub fn samples_per_axis(&self) -> usize {
        self.samples_per_axis
    }

    fn panels(&self) -> usize {
        1 << (self.subdivision_depth - 1)
    }
}

/// Homogeneous-kernel box integrator behind the singular-cell averages.
struct BoxRule {
    alpha: f64,
    dim: usize,
    panels: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl BoxRule {
    fn new(alpha: f64, dim: usize, rule: &SingularCellRule) -> Self {
        let (nodes, weights) = gauss_legendre(rule.samples_per_axis);
        Self {
            alpha,
            dim,
            panels: rule.panels(),
            nodes,
            weights,
        }
    }

    /// Gauss points of `[a, b]` split into `pieces` equal panels, appended to `out`.
    fn push_interval(&self, a: f64, b: f64, pieces: usize, out: &mut Vec<(f64, f64)>) {
        let w = (b - a) / pieces as f64;
        for p in 0..pieces {
            let lo = a + p as f64 * w;
            let mid = lo + 0.5 * w;
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + 0.5 * w * x, 0.5 * w * wt));
            }
        }
    }

    /// Panels of `[a, b]` graded geometrically away from `a` at length scale `scale`.
    fn graded_axis(&self, a: f64, b: f64, scale: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut lo = a;
        while lo < b {
            let next = if lo <= 0.0 {
                scale
            } else {
                (lo + scale).max(2.0 * lo)
            };
            let hi = next.min(b);
            self.push_interval(lo, hi, self.panels, &mut out);
            lo = hi;
        }
        out
    }

    fn uniform_axis(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        self.push_interval(a, b, self.panels, &mut out);
        out
    }

    fn tensor(&self, axes: &[Vec<(f64, f64)>]) -> f64 {
        let a = self.alpha;
        match axes.len() {
            1 => axes[0].iter().map(|&(x, w)| w * radial_power(x * x, a)).sum(),
            2 => {
                let mut s = 0.0;
                for &(x, wx) in &axes[0] {
                    let mut row = 0.0;
                    for &(y, wy) in &axes[1] {
                        row += wy * radial_power(x * x + y * y, a);
                    }
                    s += wx * row;
                }
                s
            }
            3 => {
                let mut s = 0.0;
                for &(x, wx) in &axes[0] {
                    for &(y, wy) in &axes[1] {
                        let mut row = 0.0;
                        for &(z, wz) in &axes[2] {
                            row += wz * radial_power(x * x + y * y + z * z, a);
                        }
                        s += wx * wy * row;
                    }
                }
                s
            }
            _ => unreachable!("dimension is at most 3"),
        }
    }

    /// Integral over `prod [0, sides_i]`, singularity at the shared corner.
    ///
    /// The cube `[0, m]^n` (m = shortest side) is handled by exact
    /// self-similarity: `I(Q) = I(Q \ Q/2) / (1 - 2^{alpha - n})`. The rest of
    /// the box is a union of slabs at distance >= m from the origin.
    fn corner_box(&self, sides: &[f64]) -> f64 {
        let m = sides.iter().cloned().fold(f64::INFINITY, f64::min);
        if m <= 0.0 {
            return 0.0;
        }
        let n = self.dim;
        let mut shell = 0.0;
        for mask in 1usize..(1 << n) {
            let axes: Vec<_> = (0..n)
                .map(|i| {
                    if mask & (1 << i) != 0 {
                        self.uniform_axis(0.5 * m, m)
                    } else {
                        self.uniform_axis(0.0, 0.5 * m)
                    }
                })
                .collect();
            shell += self.tensor(&axes);
        }
        let mut total = shell / (1.0 - 2f64.powf(self.alpha - n as f64));

        for i in 0..n {
            if sides[i] <= m {
                continue;
            }
            let axes: Vec<_> = (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => self.uniform_axis(0.0, m),
                    std::cmp::Ordering::Equal => self.graded_axis(m, sides[i], m),
                    std::cmp::Ordering::Greater => self.graded_axis(0.0, sides[j], m),
                })
                .collect();
            total += self.tensor(&axes);
        }
        total
    }

    /// Integral over a box `prod [a_i, b_i]` with `0 <= a_i < b_i`.
    fn positive_box(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim;
        let dist2: f64 = a.iter().map(|v| v * v).sum();
        let width = (0..n).map(|i| b[i] - a[i]).fold(0.0, f64::max);
        if dist2 >= width * width {
            let axes: Vec<_> = (0..n).map(|i| self.uniform_axis(a[i], b[i])).collect();
            return self.tensor(&axes);
        }
        // Near the origin: inclusion-exclusion over corner boxes.
        let mut total = 0.0;
        let mut sides = [0.0; MAX_DIM];
        for mask in 0usize..(1 << n) {
            let mut sign = 1.0;
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    sides[i] = a[i];
                    sign = -sign;
                } else {
                    sides[i] = b[i];
                }
            }
            if sides[..n].iter().all(|&s| s > 0.0) {
                total += sign * self.corner_box(&sides[..n]);
            }
        }
        total
    }

    /// Integral of `|x|^{-alpha}` over the box `prod [lo_i, hi_i]`.
    fn integral(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let n = self.dim;
        // Reflect every axis onto [0, inf), splitting intervals that straddle 0.
        let mut pieces: Vec<[(f64, f64); 2]> = Vec::with_capacity(n);
        let mut counts = [0usize; MAX_DIM];
        for i in 0..n {
            let (l, h) = (lo[i], hi[i]);
            let mut p = [(0.0, 0.0); 2];
            let mut c = 0;
            if l >= 0.0 {
                p[c] = (l, h);
                c += 1;
            } else if h <= 0.0 {
                p[c] = (-h, -l);
                c += 1;
            } else {
                p[c] = (0.0, -l);
                p[c + 1] = (0.0, h);
                c += 2;
            }
            pieces.push(p);
            counts[i] = c;
        }
        let mut total = 0.0;
        let mut a = [0.0; MAX_DIM];
        let mut b = [0.0; MAX_DIM];
        let combos: usize = counts[..n].iter().product();
        for mut code in 0..combos {
            for i in 0..n {
                let k = code % counts[i];
                code /= counts[i];
                a[i] = pieces[i][k].0;
                b[i] = pieces[i][k].1;
            }
            if (0..n).all(|i| b[i] > a[i]) {
                total += self.positive_box(&a[..n], &b[..n]);
            }
        }
        total
    }
}

/// Mean of `|x|^{-alpha}` over the cube `center +- width/2`.
///
/// Requires `alpha < n` whenever the cube contains the origin.
pub fn cell_average(
    alpha: f64,
    center: &[f64],
    width: f64,
    rule: &SingularCellRule,
) -> Result<f64> {
    let dim = center.len();
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(invalid(format!("unsupported dimension {dim}")));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(invalid(format!("cell width must be positive, got {width}")));
    }
    let lo: Vec<f64> = center.iter().map(|c| c - 0.5 * width).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + 0.5 * width).collect();
    let contains_origin = lo.iter().zip(&hi).all(|(l, h)| *l <= 0.0 && *h >= 0.0);
    if contains_origin && alpha >= dim as f64 {
        return Err(precondition(format!(
            "|x|^-{alpha} is not integrable near 0 in dimension {dim}"
        )));
    }
    let integrator = BoxRule::new(alpha, dim, rule);
    Ok(integrator.integral(&lo, &hi) / width.powi(dim as i32))
}

/// Flat index of the grid cell containing `target`, if it lies on the grid.
fn cell_containing(grid: &GridSpec, target: &[f64]) -> Option<usize> {
    let mut idx = [0usize; MAX_DIM];
    for a in 0..grid.dim() {
        let k = ((target[a] + grid.half_extent()) / grid.spacing() + 0.5).floor();
        if k < 0.0 || k >= grid.points() as f64 {
            return None;
        }
        idx[a] = k as usize;
    }
    Some(grid.ravel(&idx[..grid.dim()]))
}

/// Samples `x -> f_alpha(x + offset)` on the grid.
///
/// The cell containing the singularity (if any) receives its exact cell
/// average rather than a point value; every other sample is pointwise.
pub fn sample_f_alpha(
    param: &RieszParam,
    grid: &GridSpec,
    rule: &SingularCellRule,
    center_offset: &[f64],
) -> Result<Field> {
    param.require_tempered()?;
    if param.dim != grid.dim() {
        return Err(invalid(format!(
            "parameter dimension {} does not match grid dimension {}",
            param.dim,
            grid.dim()
        )));
    }
    grid.check_point(center_offset)?;
    let dim = grid.dim();
    let alpha = param.alpha;
    let z = center_offset;
    let mut values = exec::map_indices(grid.len(), |i| {
        let x = grid.point(i);
        let r2: f64 = (0..dim).map(|a| (x[a] + z[a]).powi(2)).sum();
        Complex64::new(radial_power(r2, alpha), 0.0)
    });
    let singular: Vec<f64> = z.iter().map(|v| -v).collect();
    if let Some(k) = cell_containing(grid, &singular) {
        let x = grid.point(k);
        let center: Vec<f64> = (0..dim).map(|a| x[a] + z[a]).collect();
        values[k] = Complex64::new(cell_average(alpha, &center, grid.spacing(), rule)?, 0.0);
    }
    let field = Field::from_parts(*grid, Domain::Physical, values);
    field.check_finite()?;
    Ok(field)
}

/// Flat index of the cell holding the singularity of `f_alpha(. + offset)`.
pub fn singular_cell(grid: &GridSpec, center_offset: &[f64]) -> Option<usize> {
    let singular: Vec<f64> = center_offset.iter().map(|v| -v).collect();
    cell_containing(grid, &singular)
}

/// Lattice cells within this Chebyshev radius of the kernel singularity are
/// integrated as cell averages in the convolution oracle.
pub const ORACLE_NEAR_CELLS: i64 = 8;
/// Largest admissible relative magnitude of the spectrum on the lattice boundary.
pub const ORACLE_BOUNDARY_DECAY: f64 = 1e-8;

/// Independent route to `F(psi f_alpha)(x)`:
/// `(2 pi)^{-n/2} C(alpha, n) (F psi * f_{n-alpha})(x)`, with the convolution
/// done by product-rectangle quadrature over the spectral lattice.
///
/// `psi_spectral` holds `F psi` on the lattice. Lattice cells near the
/// kernel singularity use exact cell averages of `f_{n-alpha}`; the rest use
/// point values.
pub fn ft_oracle_convolution(
    psi_spectral: &Field,
    param: &RieszParam,
    eval_points: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    psi_spectral.expect_domain(Domain::Spectral)?;
    let grid = *psi_spectral.grid();
    if param.dim != grid.dim() {
        return Err(invalid("parameter dimension does not match the grid"));
    }
    let c_alpha = riesz_ft_constant(param)?;
    check_boundary_decay(psi_spectral)?;

    let dual = param.dual()?;
    let beta = dual.alpha;
    let dim = grid.dim();
    let dxi = grid.freq_spacing();
    let rule = SingularCellRule::default();
    let integrator = BoxRule::new(beta, dim, &rule);
    let prefactor = (2.0 * PI).powf(-(dim as f64) / 2.0) * c_alpha * grid.freq_cell_volume();
    let psi = psi_spectral.values();

    let mut out = Vec::with_capacity(eval_points.len());
    for x in eval_points {
        grid.check_point(x)?;
        // Lattice position of x: x = dxi * (k - N/2), possibly fractional.
        let pos: Vec<f64> = x.iter().map(|v| v / dxi).collect();
        let sum = exec::pairwise_sum_by(grid.len(), |j| {
            let xi = grid.frequency_point(j);
            let idx = grid.unravel(j);
            let mut near = true;
            let mut r2 = 0.0;
            let mut center = [0.0; MAX_DIM];
            for a in 0..dim {
                let lattice = idx[a] as f64 - (grid.points() / 2) as f64;
                if (pos[a] - lattice).abs() > ORACLE_NEAR_CELLS as f64 {
                    near = false;
                }
                center[a] = x[a] - xi[a];
                r2 += center[a] * center[a];
            }
            let kernel = if near {
                let lo: Vec<f64> = (0..dim).map(|a| center[a] - 0.5 * dxi).collect();
                let hi: Vec<f64> = (0..dim).map(|a| center[a] + 0.5 * dxi).collect();
                integrator.integral(&lo, &hi) / grid.freq_cell_volume()
            } else {
                radial_power(r2, beta)
            };
            psi[j] * kernel
        });
        out.push(sum * prefactor);
    }
    Ok(out)
}

fn check_boundary_decay(psi: &Field) -> Result<()> {
    let grid = psi.grid();
    let n = grid.points();
    let dim = grid.dim();
    let peak = psi.max_abs();
    if peak == 0.0 {
        return Ok(());
    }
    let mut edge: f64 = 0.0;
    for (i, v) in psi.values().iter().enumerate() {
        let idx = grid.unravel(i);
        if idx[..dim].iter().any(|&k| k == 0 || k == n - 1) {
            edge = edge.max(v.norm());
        }
    }
    if edge > ORACLE_BOUNDARY_DECAY * peak {
        return Err(Error::Precondition(format!(
            "spectrum is not negligible on the lattice boundary \
             (relative magnitude {:.3e} > {:.0e}); increase N (finer h) or L",
            edge / peak,
            ORACLE_BOUNDARY_DECAY
        )));
    }
    Ok(())
}
