//! Multipliers `H^s_2 -> H^{-t}_2`: the bilinear witness quotient, a power
//! iteration for the operator norm and the `eta_m` growth integral.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::besselnorm::{hs_norm, on_threshold, SpaceIndex};
use crate::error::{invalid, precondition, Error, Result};
use crate::exec;
use crate::gridfield::{dft, fit_loglog_slope, idft, inner_product, Domain, Field, SlopeFit};
use crate::riesz::sphere_area;
use crate::special::gauss_legendre;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 500;
/// Default number of nodes per axis of the bi-radial rule.
pub const DEFAULT_QUAD_POINTS: usize = 512;
/// Nodes per Gauss-Legendre panel in the bi-radial rule.
pub const GROWTH_PANEL_NODES: usize = 8;
/// Relative slack on `n` when reading a growth slope as consistent with membership.
pub const GROWTH_SLOPE_TOLERANCE: f64 = 0.05;

/// The pair `(s, t)` of `M[H^s_2 -> H^{-t}_2]` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierProblem {
    dim: usize,
    s: f64,
    t: f64,
}

impl MultiplierProblem {
    pub fn new(dim: usize, s: f64, t: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        for (name, v) in [("s", s), ("t", t)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { dim, s, t })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s_max(&self) -> f64 {
        self.s.max(self.t)
    }

    pub fn s_min(&self) -> f64 {
        self.s.min(self.t)
    }

    /// `(t, s)`.
    pub fn swapped(&self) -> Self {
        Self {
            dim: self.dim,
            s: self.t,
            t: self.s,
        }
    }

    /// Checks `0 < max(s, t) < n/2`.
    pub fn check_sharpness_regime(&self) -> Result<()> {
        let half = self.dim as f64 / 2.0;
        if !(self.s_max() > 0.0 && self.s_max() < half) {
            return Err(precondition(format!(
                "need 0 < max(s, t) < n/2 = {half}, got max(s, t) = {}",
                self.s_max()
            )));
        }
        Ok(())
    }
}

fn grid_l2(u: &Field) -> f64 {
    let v = u.values();
    (u.grid().cell_volume() * exec::pairwise_sum_by(v.len(), |i| v[i].norm_sqr())).sqrt()
}

/// `|<mu, g conj(h)>| / (||g||_{H^s_2} ||h||_{H^t_2})`, a lower bound for the
/// discrete multiplier norm.
pub fn bilinear_witness(mu: &Field, g: &Field, h: &Field, prob: &MultiplierProblem) -> Result<f64> {
    for f in [mu, g, h] {
        f.expect_domain(Domain::Physical)?;
    }
    mu.expect_same_grid(g)?;
    mu.expect_same_grid(h)?;
    let ng = hs_norm(g, &SpaceIndex::new(prob.s, 2.0)?)?.value;
    let nh = hs_norm(h, &SpaceIndex::new(prob.t, 2.0)?)?.value;
    if ng == 0.0 || nh == 0.0 {
        return Err(precondition("zero witness norm"));
    }
    let mg = mu.zip_with(g, |a, b| a * b)?;
    Ok(inner_product(&mg, h)?.norm() / (ng * nh))
}

/// `B = J_{-t} M_mu J_{-s}` with cached spectral weights.
struct Conjugated<'a> {
    mu: &'a Field,
    mu_conj: Field,
    ws: Option<Vec<f64>>,
    wt: Option<Vec<f64>>,
}

impl<'a> Conjugated<'a> {
    fn new(mu: &'a Field, prob: &MultiplierProblem) -> Result<Self> {
        mu.expect_domain(Domain::Physical)?;
        if prob.dim != mu.grid().dim() {
            return Err(invalid(format!(
                "problem dimension {} does not match grid dimension {}",
                prob.dim,
                mu.grid().dim()
            )));
        }
        mu.check_finite()?;
        let grid = *mu.grid();
        let weights = |gamma: f64| {
            (gamma != 0.0).then(|| {
                exec::map_indices(grid.len(), |j| (1.0 + grid.frequency_norm_sq(j)).powf(0.5 * gamma))
            })
        };
        Ok(Self {
            mu,
            mu_conj: mu.conj(),
            ws: weights(-prob.s),
            wt: weights(-prob.t),
        })
    }

    fn weight(u: &Field, w: &Option<Vec<f64>>) -> Result<Field> {
        match w {
            None => Ok(u.clone()),
            Some(w) => idft(&dft(u)?.map_indexed(|j, v| v * w[j])),
        }
    }

    fn forward(&self, x: &Field) -> Result<Field> {
        let y = Self::weight(x, &self.ws)?.zip_with(self.mu, |a, m| a * m)?;
        Self::weight(&y, &self.wt)
    }

    fn adjoint(&self, y: &Field) -> Result<Field> {
        let x = Self::weight(y, &self.wt)?.zip_with(&self.mu_conj, |a, m| a * m)?;
        Self::weight(&x, &self.ws)
    }
}

/// `B g = J_{-t}(mu * J_{-s} g)`.
pub fn apply_conjugated_multiplier(mu: &Field, prob: &MultiplierProblem, g: &Field) -> Result<Field> {
    mu.expect_same_grid(g)?;
    Conjugated::new(mu, prob)?.forward(g)
}

/// `B* h = J_{-s}(conj(mu) * J_{-t} h)`.
pub fn apply_conjugated_adjoint(mu: &Field, prob: &MultiplierProblem, h: &Field) -> Result<Field> {
    mu.expect_same_grid(h)?;
    Conjugated::new(mu, prob)?.adjoint(h)
}

#[derive(Debug, Clone)]
pub struct OperatorNormEstimate {
    /// Largest-singular-value estimate of `B`; a lower bound of its norm.
    pub sigma: f64,
    /// `J_{-s} a` for the converged unit vector `a`; `||witness_g||_{H^s_2} = 1`.
    pub witness_g: Field,
    /// `J_{-t} (B a / ||B a||)`; realizes `sigma` as a bilinear witness.
    pub witness_h: Field,
    pub iterations: usize,
    pub converged: bool,
    /// `sigma` after each iteration.
    pub history: Vec<f64>,
}

/// Power iteration on `B* B` from a seeded random start.
pub fn estimate_operator_norm(
    mu: &Field,
    prob: &MultiplierProblem,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<OperatorNormEstimate> {
    if max_iters < 1 {
        return Err(invalid("max_iters must be at least 1"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    let op = Conjugated::new(mu, prob)?;
    let grid = *mu.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<Complex64> = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut x = Field::new(grid, Domain::Physical, start)?;
    x = x.scale(Complex64::new(1.0 / grid_l2(&x), 0.0));

    let mut history = Vec::new();
    let mut converged = false;
    let mut bx;
    loop {
        bx = op.forward(&x)?;
        let sigma = grid_l2(&bx);
        if !sigma.is_finite() {
            return Err(Error::Numeric(format!(
                "power iteration produced a non-finite estimate at step {}",
                history.len() + 1
            )));
        }
        let prev = history.last().copied();
        history.push(sigma);
        if sigma == 0.0 {
            converged = true;
            break;
        }
        if let Some(p) = prev {
            if (sigma - p).abs() <= tol * sigma {
                converged = true;
                break;
            }
        }
        if history.len() >= max_iters {
            break;
        }
        let z = op.adjoint(&bx)?;
        let nz = grid_l2(&z);
        if nz == 0.0 || !nz.is_finite() {
            return Err(Error::Numeric("power iteration collapsed".into()));
        }
        x = z.scale(Complex64::new(1.0 / nz, 0.0));
    }
    let sigma = *history.last().expect("at least one iteration");
    let witness_g = Conjugated::weight(&x, &op.ws)?;
    let b = if sigma > 0.0 {
        bx.scale(Complex64::new(1.0 / sigma, 0.0))
    } else {
        bx
    };
    let witness_h = Conjugated::weight(&b, &op.wt)?;
    Ok(OperatorNormEstimate {
        sigma,
        witness_g,
        witness_h,
        iterations: history.len(),
        converged,
        history,
    })
}

fn check_growth_inputs(prob: &MultiplierProblem, alpha: f64) -> Result<()> {
    let n = prob.dim as f64;
    if !(alpha > 0.0 && alpha < n) {
        return Err(precondition(format!("need 0 < alpha < n = {n}, got {alpha}")));
    }
    if prob.s_max() >= n / 2.0 {
        return Err(precondition(format!(
            "need max(s, t) < n/2 = {}, got {}",
            n / 2.0,
            prob.s_max()
        )));
    }
    Ok(())
}

/// Composite Gauss-Legendre nodes and weights on `[0, m]`.
fn composite_rule(m: f64, quad_points: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = quad_points / GROWTH_PANEL_NODES;
    let (x, w) = gauss_legendre(GROWTH_PANEL_NODES);
    let width = m / panels as f64;
    let mut nodes = Vec::with_capacity(quad_points);
    let mut weights = Vec::with_capacity(quad_points);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + 0.5 * width * xi);
            weights.push(0.5 * width * wi);
        }
    }
    (nodes, weights)
}

/// `I(m) = int_{B_m x B_m} (1 + |x|^2 + |y|^2)^{-(n - alpha + s + t)/2} dx dy`,
/// reduced to two radial variables.
///
/// `quad_points` is the node count per radial axis and must be a positive
/// multiple of [`GROWTH_PANEL_NODES`].
pub fn growth_integral(prob: &MultiplierProblem, alpha: f64, m: f64, quad_points: usize) -> Result<f64> {
    check_growth_inputs(prob, alpha)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(precondition(format!("need m > 0, got {m}")));
    }
    if quad_points == 0 || !quad_points.is_multiple_of(GROWTH_PANEL_NODES) {
        return Err(invalid(format!(
            "quad_points must be a positive multiple of {GROWTH_PANEL_NODES}, got {quad_points}"
        )));
    }
    let n = prob.dim as f64;
    let beta = n - alpha + prob.s + prob.t;
    let (r, w) = composite_rule(m, quad_points);
    let radial: Vec<f64> = r.iter().zip(&w).map(|(ri, wi)| wi * ri.powf(n - 1.0)).collect();
    let rows = exec::map_indices(r.len(), |i| {
        let a = 1.0 + r[i] * r[i];
        let mut acc = 0.0;
        for j in 0..r.len() {
            acc += radial[j] * (a + r[j] * r[j]).powf(-0.5 * beta);
        }
        radial[i] * acc
    });
    let c = sphere_area(prob.dim);
    Ok(c * c * exec::pairwise_sum(&rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthExperiment {
    pub problem: MultiplierProblem,
    pub alpha: f64,
    pub m_values: Vec<f64>,
    pub i_values: Vec<f64>,
    pub fit: SlopeFit,
}

impl GrowthExperiment {
    /// `n + alpha - s - t`.
    pub fn analytic_exponent(&self) -> f64 {
        self.problem.dim as f64 + self.alpha - self.problem.s - self.problem.t
    }

    /// The growth outpaces the `m^n` bound any multiplier must obey.
    pub fn exceeds_n(&self) -> bool {
        self.fit.slope > self.problem.dim as f64
    }

    /// `slope <= n (1 + tolerance)`.
    pub fn consistent_with_membership(&self) -> bool {
        self.fit.slope <= self.problem.dim as f64 * (1.0 + GROWTH_SLOPE_TOLERANCE)
    }
}

/// Runs [`growth_integral`] for each `m` and fits `ln I` against `ln m`.
pub fn growth_slope_experiment(
    prob: &MultiplierProblem,
    alpha: f64,
    m_values: &[f64],
) -> Result<GrowthExperiment> {
    growth_slope_experiment_with(prob, alpha, m_values, DEFAULT_QUAD_POINTS)
}

pub fn growth_slope_experiment_with(
    prob: &MultiplierProblem,
    alpha: f64,
    m_values: &[f64],
    quad_points: usize,
) -> Result<GrowthExperiment> {
    if m_values.len() < 4 {
        return Err(invalid(format!(
            "growth experiment needs at least 4 values of m, got {}",
            m_values.len()
        )));
    }
    if m_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("m values must be strictly increasing"));
    }
    let i_values = exec::try_map(m_values, |&m| growth_integral(prob, alpha, m, quad_points))?;
    let pts: Vec<(f64, f64)> = m_values.iter().copied().zip(i_values.iter().copied()).collect();
    let fit = fit_loglog_slope(&pts)?;
    Ok(GrowthExperiment {
        problem: *prob,
        alpha,
        m_values: m_values.to_vec(),
        i_values,
        fit,
    })
}

/// True when `alpha` equals `s + t` up to round-off.
pub(crate) fn at_critical_alpha(prob: &MultiplierProblem, alpha: f64) -> bool {
    on_threshold(alpha, prob.s + prob.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfield::{sample_function, GridSpec};

    fn bumpy(grid: GridSpec, shift: f64, phase: f64) -> Field {
        sample_function(
            |x| {
                let r2: f64 = x.iter().map(|v| (v - shift).powi(2)).sum();
                Complex64::from_polar((-r2).exp(), phase * x[0])
            },
            &grid,
        )
        .unwrap()
    }

    fn real_mu(grid: GridSpec) -> Field {
        sample_function(
            |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Complex64::new(1.0 + 0.5 * (-r2).exp() - 0.2 * (x[0]).cos(), 0.0)
            },
            &grid,
        )
        .unwrap()
    }

    #[test]
    fn problem_validation() {
        assert!(MultiplierProblem::new(0, 0.1, 0.1).is_err());
        assert!(MultiplierProblem::new(2, -0.1, 0.1).is_err());
        let p = MultiplierProblem::new(2, 0.3, 0.9).unwrap();
        assert!(p.check_sharpness_regime().is_ok());
        assert_eq!(p.swapped().s(), 0.9);
        assert!(MultiplierProblem::new(2, 0.0, 0.0).unwrap().check_sharpness_regime().is_err());
        assert!(MultiplierProblem::new(2, 1.0, 0.2).unwrap().check_sharpness_regime().is_err());
    }

    #[test]
    fn witness_cauchy_schwarz_equality() {
        let g = GridSpec::new(1, 8.0, 128).unwrap();
        let u = bumpy(g, 0.3, 1.1);
        let u = u.scale(Complex64::new(1.0 / grid_l2(&u), 0.0));
        let one = Field::constant(g, Domain::Physical, Complex64::new(1.0, 0.0));
        let p = MultiplierProblem::new(1, 0.0, 0.0).unwrap();
        assert!((bilinear_witness(&one, &u, &u, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_symmetry_and_scaling() {
        let grid = GridSpec::new(2, 6.0, 32).unwrap();
        let mu = real_mu(grid);
        let g = bumpy(grid, 0.5, 0.7);
        let h = bumpy(grid, -0.4, -1.3);
        let p = MultiplierProblem::new(2, 0.3, 0.8).unwrap();
        let a = bilinear_witness(&mu, &g, &h, &p).unwrap();
        let b = bilinear_witness(&mu, &h, &g, &p.swapped()).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        let c = bilinear_witness(&mu, &g.scale(Complex64::new(-3.0, 2.0)), &h, &p).unwrap();
        assert!((a - c).abs() < 1e-12 * a);
        let zero = Field::constant(grid, Domain::Physical, Complex64::new(0.0, 0.0));
        assert!(bilinear_witness(&mu, &zero, &h, &p).is_err());
    }

    #[test]
    fn adjoint_identity() {
        let grid = GridSpec::new(2, 5.0, 32).unwrap();
        let mu = bumpy(grid, 0.2, 0.9);
        let p = MultiplierProblem::new(2, 0.4, 0.7).unwrap();
        let g = bumpy(grid, 1.0, 0.3);
        let h = bumpy(grid, -1.0, -0.6);
        let lhs = inner_product(&apply_conjugated_multiplier(&mu, &p, &g).unwrap(), &h).unwrap();
        let rhs = inner_product(&g, &apply_conjugated_adjoint(&mu, &p, &h).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1e-300));
    }

    #[test]
    fn operator_norm_of_scalars() {
        let grid = GridSpec::new(1, 8.0, 256).unwrap();
        let p = MultiplierProblem::new(1, 0.0, 0.0).unwrap();
        for c in [Complex64::new(1.0, 0.0), Complex64::new(-2.5, 1.0)] {
            let mu = Field::constant(grid, Domain::Physical, c);
            let est = estimate_operator_norm(&mu, &p, DEFAULT_MAX_ITERS, DEFAULT_TOL, 7).unwrap();
            assert!((est.sigma - c.norm()).abs() < 1e-6, "{} vs {}", est.sigma, c.norm());
        }
    }

    #[test]
    fn operator_norm_bounds_witness_and_is_monotone() {
        let grid = GridSpec::new(1, 8.0, 256).unwrap();
        let mu = real_mu(grid);
        let p = MultiplierProblem::new(1, 0.3, 0.2).unwrap();
        let est = estimate_operator_norm(&mu, &p, DEFAULT_MAX_ITERS, 1e-12, 11).unwrap();
        for w in est.history.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
        let g = bumpy(grid, 0.0, 0.5);
        let h = bumpy(grid, 1.0, 0.0);
        assert!(bilinear_witness(&mu, &g, &h, &p).unwrap() <= est.sigma + 1e-9);
        let w = bilinear_witness(&mu, &est.witness_g, &est.witness_h, &p).unwrap();
        assert!((w - est.sigma).abs() < 1e-8 * est.sigma);
    }

    #[test]
    fn operator_norm_rejects_bad_input() {
        let grid = GridSpec::new(1, 8.0, 64).unwrap();
        let p = MultiplierProblem::new(1, 0.0, 0.0).unwrap();
        let mut v = vec![Complex64::new(1.0, 0.0); 64];
        v[5] = Complex64::new(f64::NAN, 0.0);
        let mu = Field::new(grid, Domain::Physical, v).unwrap();
        assert!(matches!(
            estimate_operator_norm(&mu, &p, 10, 1e-8, 1),
            Err(Error::NonFinite { index: 5, .. })
        ));
        let ok = Field::constant(grid, Domain::Physical, Complex64::new(1.0, 0.0));
        assert!(estimate_operator_norm(&ok, &p, 0, 1e-8, 1).is_err());
        assert!(estimate_operator_norm(&ok, &p, 10, 0.0, 1).is_err());
    }

    #[test]
    fn growth_integral_matches_reference_in_one_dimension() {
        // n = 1, beta = 1: 4 int_0^3 int_0^3 (1 + a^2 + b^2)^{-1/2}, adaptive quadrature at 1e-14.
        let p = MultiplierProblem::new(1, 0.25, 0.25).unwrap();
        let got = growth_integral(&p, 0.5, 3.0, 256).unwrap();
        let want = 15.791748539769017;
        assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
    }

    #[test]
    fn growth_integral_monotone_and_validated() {
        let p = MultiplierProblem::new(2, 0.5, 0.5).unwrap();
        let a = growth_integral(&p, 1.0, 4.0, 128).unwrap();
        let b = growth_integral(&p, 1.0, 8.0, 128).unwrap();
        assert!(b > a);
        assert!(growth_integral(&p, 2.0, 4.0, 128).is_err());
        assert!(growth_integral(&p, 1.0, 0.0, 128).is_err());
        assert!(growth_integral(&p, 1.0, 4.0, 100).is_err());
        let wide = MultiplierProblem::new(2, 1.0, 0.0).unwrap();
        assert!(growth_integral(&wide, 1.0, 4.0, 128).is_err());
    }

    #[test]
    fn growth_slopes_track_the_exponent() {
        let m = [4.0, 8.0, 16.0, 32.0, 64.0];
        let p = MultiplierProblem::new(2, 0.5, 0.5).unwrap();
        for alpha in [0.8, 1.0, 1.4] {
            let e = growth_slope_experiment(&p, alpha, &m).unwrap();
            let want = e.analytic_exponent();
            assert!((e.fit.slope - want).abs() < 0.05 * want, "alpha {alpha}: {}", e.fit.slope);
        }
        let e = growth_slope_experiment(&p, 1.4, &m).unwrap();
        assert!(e.exceeds_n());
        let e = growth_slope_experiment(&p, 0.6, &m).unwrap();
        assert!(!e.exceeds_n() && e.consistent_with_membership());
        assert!(growth_slope_experiment(&p, 1.0, &m[..3]).is_err());
        assert!(growth_slope_experiment(&p, 1.0, &[4.0, 8.0, 8.0, 16.0]).is_err());
    }
}
