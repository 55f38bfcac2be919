//! Bessel potential norms `||J_gamma u||_{L_p}`, the cutoff bump, uniformly
//! localized norms and the membership classifier for `f_alpha`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, precondition, Result};
use crate::exec;
use crate::gridfield::{
    dft, fit_loglog_slope, idft, lp_norm, sample_function, Domain, Field, GridSpec, SlopeFit,
};
use crate::riesz::{ft_oracle_convolution, sample_f_alpha, RieszParam, SingularCellRule};

/// Fraction of weighted spectral energy in the boundary shells above which
/// a transform result is flagged as possibly aliased.
pub const ALIASING_THRESHOLD: f64 = 1e-6;

/// Smallest half-extent accepted by the localized sweeps (support radius 2 plus padding).
pub const MIN_SWEEP_HALF_EXTENT: f64 = 4.0;

/// Names the space `H^gamma_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceIndex {
    gamma: f64,
    p: f64,
}

impl SpaceIndex {
    pub fn new(gamma: f64, p: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(invalid(format!("smoothness must be finite, got {gamma}")));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(invalid(format!("integrability must satisfy 1 < p < inf, got {p}")));
        }
        Ok(Self { gamma, p })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// A value together with the aliasing-guard outcome of the transforms behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Guarded<T> {
    pub value: T,
    pub aliasing_warning: bool,
}

/// `(1 + |xi|^2)^{gamma/2}`.
pub fn phi_weight(gamma: f64, xi: &[f64]) -> f64 {
    let r2: f64 = xi.iter().map(|v| v * v).sum();
    phi_from_sq(gamma, r2)
}

#[inline]
fn phi_from_sq(gamma: f64, r2: f64) -> f64 {
    (1.0 + r2).powf(0.5 * gamma)
}

/// Share of `sum w_j |v_j|^2` carried by the two outermost lattice layers.
pub fn boundary_shell_fraction(spectrum: &Field, gamma: f64) -> f64 {
    let grid = spectrum.grid();
    let n = grid.points();
    let dim = grid.dim();
    let vals = spectrum.values();
    let energy = |j: usize| vals[j].norm_sqr() * phi_from_sq(gamma, grid.frequency_norm_sq(j)).powi(2);
    let total = exec::pairwise_sum_by(vals.len(), energy);
    if total == 0.0 {
        return 0.0;
    }
    let shell = exec::pairwise_sum_by(vals.len(), |j| {
        let idx = grid.unravel(j);
        if idx[..dim].iter().any(|&k| k <= 1 || k == n - 1) {
            energy(j)
        } else {
            0.0
        }
    });
    shell / total
}

/// Multiplies a spectrum by `phi_gamma`.
pub fn weight_spectrum(spectrum: &Field, gamma: f64) -> Result<Field> {
    spectrum.expect_domain(Domain::Spectral)?;
    let grid = *spectrum.grid();
    Ok(spectrum.map_indexed(|j, v| v * phi_from_sq(gamma, grid.frequency_norm_sq(j))))
}

/// `J_gamma u = idft(phi_gamma * dft(u))`.
pub fn apply_bessel(u: &Field, gamma: f64) -> Result<Guarded<Field>> {
    u.expect_domain(Domain::Physical)?;
    if gamma == 0.0 {
        return Ok(Guarded {
            value: u.clone(),
            aliasing_warning: false,
        });
    }
    let spectrum = dft(u)?;
    let warn = boundary_shell_fraction(&spectrum, gamma) > ALIASING_THRESHOLD;
    let weighted = weight_spectrum(&spectrum, gamma)?;
    Ok(Guarded {
        value: idft(&weighted)?,
        aliasing_warning: warn,
    })
}

/// `||u||_{H^gamma_p} = ||J_gamma u||_{L_p}`.
pub fn hs_norm(u: &Field, idx: &SpaceIndex) -> Result<Guarded<f64>> {
    let j = apply_bessel(u, idx.gamma)?;
    Ok(Guarded {
        value: lp_norm(&j.value, idx.p)?,
        aliasing_warning: j.aliasing_warning,
    })
}

/// The cutoff bump `eta`: 1 on `|x| <= 1`, 0 on `|x| >= 2`, smooth in between.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BumpSpec;

impl BumpSpec {
    pub const R_INNER: f64 = 1.0;
    pub const R_OUTER: f64 = 2.0;
}

fn smooth_step_kernel(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Radial profile `q(r) = s(2 - r) / (s(2 - r) + s(r - 1))`, `s(u) = e^{-1/u}` for `u > 0`.
pub fn bump_profile(r: f64) -> f64 {
    if r <= BumpSpec::R_INNER {
        return 1.0;
    }
    if r >= BumpSpec::R_OUTER {
        return 0.0;
    }
    let a = smooth_step_kernel(BumpSpec::R_OUTER - r);
    let b = smooth_step_kernel(r - BumpSpec::R_INNER);
    a / (a + b)
}

pub fn bump_eta(x: &[f64]) -> f64 {
    bump_profile(x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Samples `eta((x - center) / scale)`.
pub fn sample_bump(grid: &GridSpec, scale: f64, center: &[f64]) -> Result<Field> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid(format!("bump scale must be positive, got {scale}")));
    }
    grid.check_point(center)?;
    sample_function(
        |x| {
            let r2: f64 = x
                .iter()
                .zip(center)
                .map(|(xi, ci)| ((xi - ci) / scale).powi(2))
                .sum();
            Complex64::new(bump_profile(r2.sqrt()), 0.0)
        },
        grid,
    )
}

/// Something that can be sampled as `x -> u(x + offset)` on any grid.
pub trait FieldSource: Sync {
    fn sample(&self, grid: &GridSpec, offset: &[f64]) -> Result<Field>;
}

/// `f_alpha` recentred by the singular-cell-aware sampler.
#[derive(Debug, Clone, Copy)]
pub struct RieszSource {
    pub param: RieszParam,
    pub rule: SingularCellRule,
}

impl RieszSource {
    pub fn new(param: RieszParam) -> Self {
        Self {
            param,
            rule: SingularCellRule::default(),
        }
    }
}

impl FieldSource for RieszSource {
    fn sample(&self, grid: &GridSpec, offset: &[f64]) -> Result<Field> {
        sample_f_alpha(&self.param, grid, &self.rule, offset)
    }
}

/// A pointwise function, sampled with a shifted argument.
pub struct FnSource<F>(pub F);

impl<F> FieldSource for FnSource<F>
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    fn sample(&self, grid: &GridSpec, offset: &[f64]) -> Result<Field> {
        grid.check_point(offset)?;
        let f = &self.0;
        sample_function(
            |x| {
                let mut y = [0.0; 3];
                for (a, v) in x.iter().enumerate() {
                    y[a] = v + offset[a];
                }
                f(&y[..x.len()])
            },
            grid,
        )
    }
}

/// Default sweep radii (geometric, 0 to 16).
pub const DEFAULT_RADII: [f64; 6] = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0];

/// Default directions per radius: both signs in 1-D, 8 in 2-D, 26 in 3-D.
pub fn default_directions(dim: usize) -> usize {
    match dim {
        1 => 2,
        2 => 8,
        _ => 26,
    }
}

/// Unit directions used at each sweep radius.
pub fn sweep_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let count = count.max(1);
    match dim {
        1 => {
            if count == 1 {
                vec![vec![1.0]]
            } else {
                vec![vec![1.0], vec![-1.0]]
            }
        }
        2 => (0..count)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ if count == 26 => {
            let mut out = Vec::with_capacity(26);
            for i in -1i32..=1 {
                for j in -1i32..=1 {
                    for k in -1i32..=1 {
                        if (i, j, k) == (0, 0, 0) {
                            continue;
                        }
                        let v = [i as f64, j as f64, k as f64];
                        let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                        out.push(v.iter().map(|c| c / r).collect());
                    }
                }
            }
            out
        }
        _ => {
            // Fibonacci sphere.
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let y = if count == 1 {
                        1.0
                    } else {
                        1.0 - 2.0 * k as f64 / (count - 1) as f64
                    };
                    let r = (1.0 - y * y).max(0.0).sqrt();
                    let th = golden * k as f64;
                    vec![r * th.cos(), y, r * th.sin()]
                })
                .collect()
        }
    }
}

/// Sweep points: the origin once for a zero radius, otherwise `radius * direction`.
pub fn sweep_points(dim: usize, radii: &[f64], directions_per_radius: usize) -> Vec<Vec<f64>> {
    let dirs = sweep_directions(dim, directions_per_radius);
    let mut out = Vec::new();
    for &r in radii {
        if r == 0.0 {
            out.push(vec![0.0; dim]);
        } else {
            out.extend(dirs.iter().map(|d| d.iter().map(|c| c * r).collect()));
        }
    }
    out
}

/// One row of a localized-norm sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub z: Vec<f64>,
    pub norm: f64,
    pub aliasing_warning: bool,
}

/// Result of [`unif_norm_sweep`]. `sup` is a lower bound of the true supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifSweep {
    pub sup: f64,
    pub argmax_z: Vec<f64>,
    pub table: Vec<SweepEntry>,
}

impl UnifSweep {
    pub fn any_aliasing(&self) -> bool {
        self.table.iter().any(|e| e.aliasing_warning)
    }
}

fn check_sweep_grid(grid: &GridSpec) -> Result<()> {
    if grid.half_extent() < MIN_SWEEP_HALF_EXTENT {
        return Err(precondition(format!(
            "grid half-extent {} is too small for the cutoff support (need >= {})",
            grid.half_extent(),
            MIN_SWEEP_HALF_EXTENT
        )));
    }
    Ok(())
}

/// `sup_z ||eta * u(. + z)||_{H^gamma_p}` over a radius-by-direction sweep.
///
/// The cutoff stays at the origin and the field is recentred, which is
/// equivalent by translation invariance of the norm.
pub fn unif_norm_sweep<S: FieldSource + ?Sized>(
    source: &S,
    idx: &SpaceIndex,
    grid: &GridSpec,
    radii: &[f64],
    directions_per_radius: usize,
) -> Result<UnifSweep> {
    check_sweep_grid(grid)?;
    if radii.is_empty() {
        return Err(invalid("sweep needs at least one radius"));
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(invalid(format!("sweep radii must be non-negative, got {r}")));
    }
    let eta = sample_bump(grid, 1.0, &vec![0.0; grid.dim()])?;
    let points = sweep_points(grid.dim(), radii, directions_per_radius);
    let table = exec::try_map(&points, |z| {
        let u = source.sample(grid, z)?;
        let local = eta.zip_with(&u, |a, b| a * b)?;
        let norm = hs_norm(&local, idx)?;
        Ok::<_, crate::Error>(SweepEntry {
            z: z.clone(),
            norm: norm.value,
            aliasing_warning: norm.aliasing_warning,
        })
    })?;
    let mut best = 0;
    for (i, e) in table.iter().enumerate() {
        if e.norm > table[best].norm {
            best = i;
        }
    }
    Ok(UnifSweep {
        sup: table[best].norm,
        argmax_z: table[best].z.clone(),
        table,
    })
}

/// `R(z) = max_xi |F(eta f_alpha(. + z))(xi)| (1 + |xi|^2)^{(n - alpha)/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRatio {
    pub z: Vec<f64>,
    pub ratio: f64,
    /// `|xi|` where the maximum was attained.
    pub argmax_frequency: f64,
    pub aliasing_warning: bool,
}

pub fn decay_ratio_sweep(
    param: &RieszParam,
    z_list: &[Vec<f64>],
    grid: &GridSpec,
) -> Result<Vec<DecayRatio>> {
    check_sweep_grid(grid)?;
    if !param.is_tempered() {
        return Err(precondition(format!(
            "decay sweep needs 0 < alpha < n, got alpha = {}",
            param.alpha()
        )));
    }
    let source = RieszSource::new(*param);
    let eta = sample_bump(grid, 1.0, &vec![0.0; grid.dim()])?;
    let exponent = param.dim() as f64 - param.alpha();
    exec::try_map(z_list, |z| {
        let u = source.sample(grid, z)?;
        let spectrum = dft(&eta.zip_with(&u, |a, b| a * b)?)?;
        let mut ratio = 0.0;
        let mut at = 0usize;
        for (j, v) in spectrum.values().iter().enumerate() {
            let w = v.norm() * phi_from_sq(exponent, grid.frequency_norm_sq(j));
            if w > ratio {
                ratio = w;
                at = j;
            }
        }
        Ok(DecayRatio {
            z: z.clone(),
            ratio,
            argmax_frequency: grid.frequency_norm_sq(at).sqrt(),
            aliasing_warning: boundary_shell_fraction(&spectrum, exponent) > ALIASING_THRESHOLD,
        })
    })
}

/// `dft(eta f_alpha)` against the convolution oracle on the lattice
/// frequencies with `|xi| <= xi_max`.
#[derive(Debug, Clone)]
pub struct FtLawCheck {
    pub points: Vec<Vec<f64>>,
    pub computed: Vec<Complex64>,
    pub oracle: Vec<Complex64>,
    /// `max |computed - oracle| / max |oracle|`.
    pub rel_linf_error: f64,
    /// `eta f_alpha` on the grid.
    pub localized: Field,
}

pub fn ft_law_check(param: &RieszParam, grid: &GridSpec, xi_max: f64) -> Result<FtLawCheck> {
    if !(xi_max > 0.0 && xi_max.is_finite()) {
        return Err(invalid(format!("xi_max must be positive, got {xi_max}")));
    }
    if param.dim() != grid.dim() {
        return Err(invalid("parameter dimension does not match the grid"));
    }
    let origin = vec![0.0; grid.dim()];
    let eta = sample_bump(grid, 1.0, &origin)?;
    let f = sample_f_alpha(param, grid, &SingularCellRule::default(), &origin)?;
    let localized = eta.zip_with(&f, |a, b| a * b)?;
    let spectrum = dft(&localized)?;
    let psi = dft(&eta)?;
    let sel: Vec<usize> = (0..grid.len())
        .filter(|&j| grid.frequency_norm_sq(j) <= xi_max * xi_max)
        .collect();
    let points: Vec<Vec<f64>> = sel
        .iter()
        .map(|&j| grid.frequency_point(j)[..grid.dim()].to_vec())
        .collect();
    let oracle = ft_oracle_convolution(&psi, param, &points)?;
    let computed: Vec<Complex64> = sel.iter().map(|&j| spectrum.values()[j]).collect();
    let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let diff = computed
        .iter()
        .zip(&oracle)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    Ok(FtLawCheck {
        points,
        computed,
        oracle,
        rel_linf_error: diff / scale,
        localized,
    })
}

/// Outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Member,
    NonMember,
    /// The parameter sits exactly on the criterion threshold.
    Boundary,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Member => "Member",
            Verdict::NonMember => "NonMember",
            Verdict::Boundary => "Boundary",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    pub rationale: String,
    /// Log-log fit of the localized norm against grid resolution.
    pub numeric_evidence: Option<SlopeFit>,
    pub ladder: Option<RefinementLadder>,
}

/// True when `a` and `b` agree up to a few ulps; used for threshold ties.
pub(crate) fn on_threshold(a: f64, b: f64) -> bool {
    (a - b).abs() <= 8.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0)
}

/// One resolution of a refinement ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderLevel {
    pub points: usize,
    pub sup: f64,
    pub argmax_z: Vec<f64>,
    pub aliasing_warning: bool,
}

/// Localized norms across successively refined grids.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementLadder {
    pub levels: Vec<LadderLevel>,
    /// `ln sup` against `ln N`.
    pub fit: SlopeFit,
}

impl RefinementLadder {
    pub fn norms(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.sup).collect()
    }

    /// `(v_{k+1} - v_k) / v_k` for consecutive levels.
    pub fn relative_changes(&self) -> Vec<f64> {
        self.norms().windows(2).map(|w| (w[1] - w[0]) / w[0]).collect()
    }

    pub fn last_relative_change(&self) -> f64 {
        self.relative_changes().last().copied().unwrap_or(0.0)
    }

    pub fn strictly_increasing(&self) -> bool {
        self.norms().windows(2).all(|w| w[1] > w[0])
    }

    /// Successive increments shrink in magnitude: the discrete Cauchy signature
    /// of a convergent sequence. Needs at least three levels.
    pub fn increments_contracting(&self) -> bool {
        let v = self.norms();
        if v.len() < 3 {
            return false;
        }
        let inc: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        inc.windows(2).all(|w| w[1] < w[0])
    }
}

/// Runs [`unif_norm_sweep`] on each grid and fits the growth rate.
pub fn unif_refinement_ladder<S: FieldSource + ?Sized>(
    source: &S,
    idx: &SpaceIndex,
    grids: &[GridSpec],
    radii: &[f64],
    directions_per_radius: usize,
) -> Result<RefinementLadder> {
    if grids.len() < 3 {
        return Err(invalid("refinement ladder needs at least 3 grids"));
    }
    if grids.windows(2).any(|w| w[1].points() <= w[0].points()) {
        return Err(invalid("ladder grids must be strictly refining"));
    }
    let levels = exec::try_map(grids, |g| {
        let s = unif_norm_sweep(source, idx, g, radii, directions_per_radius)?;
        Ok::<_, crate::Error>(LadderLevel {
            points: g.points(),
            aliasing_warning: s.any_aliasing(),
            sup: s.sup,
            argmax_z: s.argmax_z,
        })
    })?;
    let pts: Vec<(f64, f64)> = levels.iter().map(|l| (l.points as f64, l.sup)).collect();
    let fit = fit_loglog_slope(&pts)?;
    Ok(RefinementLadder { levels, fit })
}

/// Numeric settings for membership evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderConfig {
    pub half_extent: f64,
    pub base_points: usize,
    pub levels: usize,
    pub radii: Vec<f64>,
    pub directions: usize,
}

impl LadderConfig {
    pub fn default_for(dim: usize) -> Self {
        let (half_extent, base_points) = match dim {
            1 => (8.0, 1 << 11),
            2 => (8.0, 64),
            _ => (4.0, 16),
        };
        Self {
            half_extent,
            base_points,
            levels: 3,
            radii: DEFAULT_RADII.to_vec(),
            directions: default_directions(dim),
        }
    }

    pub fn grids(&self, dim: usize) -> Result<Vec<GridSpec>> {
        (0..self.levels)
            .map(|k| GridSpec::new(dim, self.half_extent, self.base_points << k))
            .collect()
    }
}

/// The analytic criterion: `f_alpha` is uniformly locally in `H^{-t}_2`
/// iff `alpha < min(n, t + n/2)`.
pub fn unif_membership_analytic(param: &RieszParam, t: f64) -> Result<(Verdict, String)> {
    let n = param.dim() as f64;
    if !(t.is_finite() && t > -n / 2.0) {
        return Err(precondition(format!("need t > -n/2 = {}, got t = {t}", -n / 2.0)));
    }
    let a = param.alpha();
    let threshold = t + n / 2.0;
    if a >= n {
        return Ok((
            Verdict::NonMember,
            format!("alpha = {a} >= n = {n}: f_alpha is not a tempered distribution"),
        ));
    }
    if on_threshold(a, threshold) {
        return Ok((
            Verdict::Boundary,
            format!("alpha = t + n/2 = {threshold}: threshold case"),
        ));
    }
    if a < threshold {
        Ok((
            Verdict::Member,
            format!("alpha = {a} < min(n, t + n/2) = {}", threshold.min(n)),
        ))
    } else {
        Ok((
            Verdict::NonMember,
            format!("alpha = {a} > t + n/2 = {threshold}"),
        ))
    }
}

/// Classifies `f_alpha` against `H^{-t}_{2,unif}`; optionally attaches a
/// refinement ladder of localized `H^{-t}_2` norms as numeric evidence.
pub fn classify_unif_membership(
    param: &RieszParam,
    t: f64,
    analytic_only: bool,
) -> Result<MembershipVerdict> {
    classify_unif_membership_with(param, t, analytic_only, &LadderConfig::default_for(param.dim()))
}

pub fn classify_unif_membership_with(
    param: &RieszParam,
    t: f64,
    analytic_only: bool,
    config: &LadderConfig,
) -> Result<MembershipVerdict> {
    let (verdict, rationale) = unif_membership_analytic(param, t)?;
    if analytic_only || !param.is_tempered() {
        return Ok(MembershipVerdict {
            verdict,
            rationale,
            numeric_evidence: None,
            ladder: None,
        });
    }
    let idx = SpaceIndex::new(-t, 2.0)?;
    let grids = config.grids(param.dim())?;
    let ladder = unif_refinement_ladder(
        &RieszSource::new(*param),
        &idx,
        &grids,
        &config.radii,
        config.directions,
    )?;
    Ok(MembershipVerdict {
        verdict,
        rationale,
        numeric_evidence: Some(ladder.fit.clone()),
        ladder: Some(ladder),
    })
}
