//! The sharpness pipeline: `p1`, `delta(eps)`, the counterexample `f_alpha`
//! with `alpha = s + t + delta(eps)`, and its two-sided verification.

use crate::besselnorm::{
    default_directions, unif_refinement_ladder, MembershipVerdict, RefinementLadder, RieszSource,
    SpaceIndex, Verdict, DEFAULT_RADII,
};
use crate::error::{invalid, precondition, Error, Result};
use crate::exec;
use crate::gridfield::GridSpec;
use crate::multiplier::{at_critical_alpha, growth_slope_experiment, GrowthExperiment, MultiplierProblem};
use crate::riesz::RieszParam;

/// Absolute tolerance for the exponent bookkeeping identity.
pub const IDENTITY_TOL: f64 = 1e-12;

/// `p1 = n / max(s, t)`.
pub fn compute_p1(prob: &MultiplierProblem) -> Result<f64> {
    if prob.s_max() <= 0.0 {
        return Err(precondition("p1 needs max(s, t) > 0"));
    }
    Ok(prob.dim() as f64 / prob.s_max())
}

/// Upper end of the admissible `eps` range, `n / max(s, t) - 2`.
pub fn eps_upper(prob: &MultiplierProblem) -> Result<f64> {
    Ok(compute_p1(prob)? - 2.0)
}

/// `delta(eps) = s^2 / (2 (n/eps - s))` with `s = max(s, t)`.
pub fn delta_of_eps(prob: &MultiplierProblem, eps: f64) -> Result<f64> {
    let upper = eps_upper(prob)?;
    if !(eps > 0.0 && eps < upper) {
        return Err(precondition(format!("need 0 < eps < n/max(s, t) - 2 = {upper}, got {eps}")));
    }
    let s = prob.s_max();
    Ok(s * s / (2.0 * (prob.dim() as f64 / eps - s)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleSpec {
    pub problem: MultiplierProblem,
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub p1: f64,
    pub p_target: f64,
    /// Smoothness of the uniformly localized space `H^{-t1}_{2,unif}` holding `f_alpha`.
    pub t1: f64,
    /// `s + t - n/2`.
    pub s1: f64,
}

/// Builds the counterexample and checks every invariant of the construction.
pub fn construct_counterexample(prob: &MultiplierProblem, eps: f64) -> Result<CounterexampleSpec> {
    prob.check_sharpness_regime()?;
    let n = prob.dim() as f64;
    let delta = delta_of_eps(prob, eps)?;
    let p1 = compute_p1(prob)?;
    let spec = CounterexampleSpec {
        problem: *prob,
        epsilon: eps,
        delta,
        alpha: prob.s() + prob.t() + delta,
        p1,
        p_target: p1 - eps,
        t1: prob.s() + prob.t() + 2.0 * delta - n / 2.0,
        s1: prob.s() + prob.t() - n / 2.0,
    };
    spec.check_invariants()?;
    Ok(spec)
}

impl CounterexampleSpec {
    /// Every inequality and identity of the construction; the first failure is reported.
    pub fn check_invariants(&self) -> Result<()> {
        let p = &self.problem;
        let n = p.dim() as f64;
        let sm = p.s_max();
        let checks: [(bool, &str); 9] = [
            (self.epsilon > 0.0 && self.epsilon < n / sm - 2.0, "0 < eps < n/max(s,t) - 2"),
            (self.delta > 0.0 && self.delta < n / 2.0 - sm, "0 < delta < n/2 - max(s,t)"),
            (
                (self.delta - sm * sm / (2.0 * (n / self.epsilon - sm))).abs() <= IDENTITY_TOL,
                "delta = s_max^2 / (2 (n/eps - s_max))",
            ),
            (
                (self.alpha - (p.s() + p.t() + self.delta)).abs() <= IDENTITY_TOL && self.alpha < n,
                "alpha = s + t + delta < n",
            ),
            (self.t1 > -n / 2.0, "t1 > -n/2"),
            (self.alpha < self.t1 + n / 2.0, "alpha < t1 + n/2"),
            (
                (self.p1 - n / sm).abs() <= IDENTITY_TOL && self.p_target > 2.0,
                "p1 = n/max(s,t) and p1 - eps > 2",
            ),
            (
                (-self.t1 - n / 2.0 - self.exponent_rhs()).abs() <= IDENTITY_TOL,
                "-t1 - n/2 = -min(s,t) - n/(n/max(s,t) - eps)",
            ),
            (
                (self.s1 - (p.s() + p.t() - n / 2.0)).abs() <= IDENTITY_TOL,
                "s1 = s + t - n/2",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            None => Ok(()),
            Some((_, name)) => Err(Error::Numeric(format!("counterexample invariant failed: {name}"))),
        }
    }

    /// `-min(s,t) - n / (n/max(s,t) - eps)`.
    pub fn exponent_rhs(&self) -> f64 {
        let n = self.problem.dim() as f64;
        -self.problem.s_min() - n / (n / self.problem.s_max() - self.epsilon)
    }

    /// A copy with `alpha` replaced; the remaining fields are left as they were.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let n = self.problem.dim() as f64;
        if !(alpha > 0.0 && alpha < n) {
            return Err(precondition(format!(
                "f_alpha is tempered only for 0 < alpha < n = {n}, got {alpha}"
            )));
        }
        Ok(Self { alpha, ..*self })
    }
}

/// `f_alpha` is a multiplier `H^s_2 -> H^{-t}_2` iff `alpha < s + t`; the
/// endpoint `alpha = s + t` is left open.
pub fn classify_multiplier_membership(prob: &MultiplierProblem, alpha: f64) -> Result<MembershipVerdict> {
    let n = prob.dim() as f64;
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
    let st = prob.s() + prob.t();
    let (verdict, rationale) = if at_critical_alpha(prob, alpha) {
        (Verdict::Boundary, format!("alpha = s + t = {st}: endpoint, no claim either way"))
    } else if alpha < st {
        (Verdict::Member, format!("alpha = {alpha} < s + t = {st}"))
    } else {
        (Verdict::NonMember, format!("alpha = {alpha} > s + t = {st}"))
    };
    Ok(MembershipVerdict {
        verdict,
        rationale,
        numeric_evidence: None,
        ladder: None,
    })
}

/// Outcome of [`verify_counterexample`].
#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    pub spec: CounterexampleSpec,
    /// (a) `alpha < n` and `alpha < t1 + n/2`.
    pub analytic_ok: bool,
    /// (b) localized `H^{-t1}_2` norms of `f_alpha` across the grid ladder.
    pub ladder: RefinementLadder,
    /// Increments of the ladder contract.
    pub ladder_stable: bool,
    /// (c) growth of the `eta_m` integral.
    pub growth: GrowthExperiment,
    pub growth_exceeds_n: bool,
    /// (a), (b) and (c) together.
    pub sharpness_witnessed: bool,
}

/// Checks both sides of the counterexample: membership in the uniformly
/// localized space (analytically and along a grid ladder) and failure of the
/// multiplier bound (growth slope above `n`).
pub fn verify_counterexample(
    spec: &CounterexampleSpec,
    grid_ladder: &[GridSpec],
    m_values: &[f64],
) -> Result<CounterexampleReport> {
    let prob = spec.problem;
    let n = prob.dim() as f64;
    if let Some(g) = grid_ladder.iter().find(|g| g.dim() != prob.dim()) {
        return Err(invalid(format!(
            "ladder grid has dimension {}, problem has {}",
            g.dim(),
            prob.dim()
        )));
    }
    let param = RieszParam::new(spec.alpha, prob.dim())?;
    let analytic_ok = spec.alpha < n && spec.alpha < spec.t1 + n / 2.0;
    let idx = SpaceIndex::new(-spec.t1, 2.0)?;
    let source = RieszSource::new(param);
    let directions = default_directions(prob.dim());
    let (ladder, growth) = exec::join(
        || unif_refinement_ladder(&source, &idx, grid_ladder, &DEFAULT_RADII, directions),
        || growth_slope_experiment(&prob, spec.alpha, m_values),
    );
    let ladder = ladder?;
    let growth = growth?;
    let ladder_stable = ladder.increments_contracting();
    let growth_exceeds_n = growth.exceeds_n();
    Ok(CounterexampleReport {
        spec: *spec,
        analytic_ok,
        ladder_stable,
        growth_exceeds_n,
        sharpness_witnessed: analytic_ok && ladder_stable && growth_exceeds_n,
        ladder,
        growth,
    })
}
