use num_complex::Complex64;

use super::config::ResolvedConfig;
use super::output::{fmt_f64, Table};
use super::schema::Subcommand;
use super::CliError;
use crate::besselnorm::{
    classify_unif_membership_with, decay_ratio_sweep, default_directions, ft_law_check, sample_bump,
    unif_norm_sweep, LadderConfig, RefinementLadder, RieszSource, SpaceIndex,
};
use crate::gridfield::{dft, Domain, Field, GridSpec};
use crate::multiplier::{
    bilinear_witness, estimate_operator_norm, growth_slope_experiment_with, GrowthExperiment,
    MultiplierProblem, DEFAULT_QUAD_POINTS,
};
use crate::riesz::{riesz_ft_constant, sample_f_alpha, RieszParam, SingularCellRule};
use crate::sharpness::{classify_multiplier_membership, construct_counterexample, verify_counterexample};

/// Everything a run produces before it touches the file system.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub report: Vec<(String, String)>,
    /// `(file stem, table)`.
    pub tables: Vec<(String, Table)>,
    /// `(file stem, field)`, written only with `--dump`.
    pub dumps: Vec<(String, Field)>,
    /// Stages whose aliasing guard tripped.
    pub aliasing: Vec<String>,
}

impl RunOutput {
    fn text(&mut self, key: &str, value: impl Into<String>) {
        self.report.push((key.to_string(), value.into()));
    }

    fn num(&mut self, key: &str, v: f64) -> Result<(), CliError> {
        if !v.is_finite() {
            return Err(CliError::Numeric(format!("non-finite result for {key}: {v}")));
        }
        self.text(key, fmt_f64(v));
        Ok(())
    }

    fn int(&mut self, key: &str, v: usize) {
        self.text(key, v.to_string());
    }

    fn flag(&mut self, key: &str, v: bool) {
        self.text(key, v.to_string());
    }
}

fn point_text(z: &[f64]) -> String {
    z.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
}

fn axis_header(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|a| format!("{prefix}_{a}")).collect()
}

pub fn run(cfg: &ResolvedConfig) -> Result<RunOutput, CliError> {
    match cfg.subcommand {
        Subcommand::FtCheck => ft_check(cfg),
        Subcommand::DecaySweep => decay_sweep(cfg),
        Subcommand::UnifNorm => unif_norm(cfg),
        Subcommand::Membership => membership(cfg),
        Subcommand::Growth => growth(cfg),
        Subcommand::Opnorm => opnorm(cfg),
        Subcommand::Counterexample => counterexample(cfg),
    }
}

fn grid_from(cfg: &ResolvedConfig, n: usize) -> Result<GridSpec, CliError> {
    Ok(GridSpec::new(n, cfg.f64("L")?, cfg.usize("N")?)?)
}

fn ft_check(cfg: &ResolvedConfig) -> Result<RunOutput, CliError> {
    let n = cfg.usize("n")?;
    let param = RieszParam::new(cfg.f64("alpha")?, n)?;
    let grid = grid_from(cfg, n)?;
    let check = ft_law_check(&param, &grid, cfg.f64("xi-max")?)?;

    let mut out = RunOutput::default();
    out.num("ft_constant", riesz_ft_constant(&param)?)?;
    out.int("eval_points", check.points.len());
    out.num("rel_linf_error", check.rel_linf_error)?;

    let mut header = axis_header("xi", n);
    header.extend(["re_dft", "im_dft", "re_oracle", "im_oracle", "abs_err"].map(String::from));
    let mut table = Table::new(header);
    for ((xi, a), b) in check.points.iter().zip(&check.computed).zip(&check.oracle) {
        let mut row: Vec<String> = xi.iter().map(|v| fmt_f64(*v)).collect();
        row.extend([a.re, a.im, b.re, b.im, (a - b).norm()].map(fmt_f64));
        table.push(row);
    }
    out.tables.push(("ft_check".into(), table));
    let spectrum = dft(&check.localized)?;
    out.dumps.push(("eta_f_alpha".into(), check.localized));
    out.dumps.push(("eta_f_alpha_spectrum".into(), spectrum));
    Ok(out)
}

fn decay_sweep(cfg: &ResolvedConfig) -> Result<RunOutput, CliError> {
    let n = cfg.usize("n")?;
    let param = RieszParam::new(cfg.f64("alpha")?, n)?;
    let grid = grid_from(cfg, n)?;
    let z_list: Vec<Vec<f64>> = cfg
        .f64_list("z")?
        .iter()
        .map(|&r| {
            let mut z = vec![0.0; n];
            z[0] = r;
            z
        })
        .collect();
    let ratios = decay_ratio_sweep(&param, &z_list, &grid)?;

    let mut out = RunOutput::default();
    let mut table = Table::new(["z", "ratio", "argmax_xi", "aliasing_warning"]);
    for r in &ratios {
        table.push(vec![
            fmt_f64(r.z[0]),
            fmt_f64(r.ratio),
            fmt_f64(r.argmax_frequency),
            r.aliasing_warning.to_string(),
        ]);
        if r.aliasing_warning {
            out.aliasing.push(format!("decay-sweep at z = {}", fmt_f64(r.z[0])));
        }
    }
    let max = ratios.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    out.num("max_ratio", max)?;
    out.num("min_ratio", min)?;
    out.flag("any_aliasing", ratios.iter().any(|r| r.aliasing_warning));
    out.tables.push(("decay_sweep".into(), table));
    Ok(out)
}

fn unif_norm(cfg: &ResolvedConfig) -> Result<RunOutput, CliError> {
    let n = cfg.usize("n")?;
    let param = RieszParam::new(cfg.f64("alpha")?, n)?;
    let idx = SpaceIndex::new(-cfg.f64("t")?, cfg.f64("p")?)?;
    let grid = grid_from(cfg, n)?;
    let directions = cfg.opt_usize("directions")?.unwrap_or_else(|| default_directions(n));
    let source = RieszSource::new(param);
    let sweep = unif_norm_sweep(&source, &idx, &grid, &cfg.f64_list("radii")?, directions)?;

    let mut out = RunOutput::default();
    out.num("sup", sweep.sup)?;
    out.text("argmax_z", point_text(&sweep.argmax_z));
    out.int("sweep_points", sweep.table.len());
    out.flag("any_aliasing", sweep.any_aliasing());
    if sweep.any_aliasing() {
        out.aliasing.push("unif-norm sweep".into());
    }
    let mut header = axis_header("z", n);
    header.extend(["norm", "aliasing_warning"].map(String::from));
    let mut table = Table::new(header);
    for e in &sweep.table {
        let mut row: Vec<String> = e.z.iter().map(|v| fmt_f64(*v)).collect();
        row.push(fmt_f64(e.norm));
        row.push(e.aliasing_warning.to_string());
        table.push(row);
    }
    out.tables.push(("unif_norm".into(), table));
    let eta = sample_bump(&grid, 1.0, &vec![0.0; n])?;
    let f = sample_f_alpha(&param, &grid, &SingularCellRule::default(), &sweep.argmax_z)?;
    out.dumps.push(("localized_at_argmax".into(), eta.zip_with(&f, |a, b| a * b)?));
    Ok(out)
}

fn ladder_table(ladder: &RefinementLadder) -> Table {
    let mut t = Table::new(["N", "sup", "argmax_z", "aliasing_warning"]);
    for l in &ladder.levels {
        t.push(vec![
            l.points.to_string(),
            fmt_f64(l.sup),
            point_text(&l.argmax_z),
            l.aliasing_warning.to_string(),
        ]);
    }
    t
}

fn report_ladder(out: &mut RunOutput, ladder: &RefinementLadder) -> Result<(), CliError> {
    out.num("ladder_slope", ladder.fit.slope)?;
    out.num("ladder_last_relative_change", ladder.last_relative_change())?;
    out.flag("ladder_increments_contracting", ladder.increments_contracting());
    out.flag("ladder_strictly_increasing", ladder.strictly_increasing());
    if ladder.levels.iter().any(|l| l.aliasing_warning) {
        out.aliasing.push("refinement ladder".into());
    }
    out.tables.push(("ladder".into(), ladder_table(ladder)));
    Ok(())
}

fn growth_table(g: &GrowthExperiment) -> Table {
    let mut t = Table::new(["m", "I"]);
    for (m, i) in g.m_values.iter().zip(&g.i_values) {
        t.push(vec![fmt_f64(*m), fmt_f64(*i)]);
    }
    t
}

fn report_growth(out: &mut RunOutput, g: &GrowthExperiment) -> Result<(), CliError> {
    out.num("growth_slope", g.fit.slope)?;
    out.num("growth_intercept", g.fit.intercept)?;
    out.num("growth_r2", g.fit.r2)?;
    out.num("analytic_exponent", g.analytic_exponent())?;
    out.flag("growth_exceeds_n", g.exceeds_n());
    out.flag("growth_consistent_with_membership", g.consistent_with_membership());
    out.tables.push(("growth".into(), growth_table(g)));
    Ok(())
}

fn membership(cfg: &ResolvedConfig) -> Result<RunOutput, CliError> {
    let n = cfg.usize("n")?;
    let alpha = cfg.f64("alpha")?;
    let t = cfg.f64("t")?;
    let analytic_only = cfg.flag("analytic-only");
    let mut out = RunOutput::default();

    if let Some(s) = cfg.opt_f64("s")? {
        let prob = MultiplierProblem::new(n, s, t)?;
        let v = classify_multiplier_membership(&prob, alpha)?;
        out.text("criterion", "multiplier");
        out.text("verdict", v.verdict.to_string());
        out.text("rationale", v.rationale);
        if !analytic_only {
            let g = growth_slope_experiment_with(&prob, alpha, &cfg.f64_list("m")?, DEFAULT_QUAD_POINTS)?;
            report_growth(&mut out, &g)?;
        }
        return Ok(out);
    }

    let param = RieszParam::new(alpha, n)?;
    let mut ladder_cfg = LadderConfig::default_for(n);
    if let Some(l) = cfg.opt_f64("L")? {
        ladder_cfg.half_extent = l;
    }
    if let Some(base) = cfg.opt_usize("N")? {
        ladder_cfg.base_points = base;
    }
    ladder_cfg.levels = cfg.usize("levels")?;
    let v = classify_unif_membership_with(&param, t, analytic_only, &ladder_cfg)?;
    out.text("criterion", "unif");
    out.text("verdict", v.verdict.to_string());
    out.text("rationale", v.rationale);
    if let Some(ladder) = &v.ladder {
        report_ladder(&mut out, ladder)?;
    }
    Ok(out)
}

fn growth(cfg: &ResolvedConfig) -> Result<RunOutput, CliError> {
    let prob = MultiplierProblem::new(cfg.usize("n")?, cfg.f64("s")?, cfg.f64("t")?)?;
    let g = growth_slope_experiment_with(
        &prob,
        cfg.f64("alpha")?,
        &cfg.f64_list("m")?,
        cfg.usize("quad-points")?,
    )?;
    let mut out = RunOutput::default();
    report_growth(&mut out, &g)?;
    Ok(out)
}

fn opnorm(cfg: &ResolvedConfig) -> Result<RunOutput, CliError> {
    let n = cfg.usize("n")?;
    let prob = MultiplierProblem::new(n, cfg.f64("s")?, cfg.f64("t")?)?;
    let grid = grid_from(cfg, n)?;
    let mu = match cfg.opt_f64("alpha")? {
        Some(a) => sample_f_alpha(
            &RieszParam::new(a, n)?,
            &grid,
            &SingularCellRule::default(),
            &vec![0.0; n],
        )?,
        None => Field::constant(grid, Domain::Physical, Complex64::new(1.0, 0.0)),
    };
    let est = estimate_operator_norm(
        &mu,
        &prob,
        cfg.usize("max-iters")?,
        cfg.f64("tol")?,
        cfg.u64("seed")?,
    )?;
    let mut out = RunOutput::default();
    out.num("sigma", est.sigma)?;
    out.int("iterations", est.iterations);
    out.flag("converged", est.converged);
    if est.sigma > 0.0 {
        out.num(
            "witness_quotient",
            bilinear_witness(&mu, &est.witness_g, &est.witness_h, &prob)?,
        )?;
    }
    let mut table = Table::new(["iteration", "sigma"]);
    for (i, s) in est.history.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), fmt_f64(*s)]);
    }
    out.tables.push(("history".into(), table));
    out.dumps.push(("mu".into(), mu));
    out.dumps.push(("witness_g".into(), est.witness_g));
    out.dumps.push(("witness_h".into(), est.witness_h));
    Ok(out)
}

fn counterexample(cfg: &ResolvedConfig) -> Result<RunOutput, CliError> {
    let n = cfg.usize("n")?;
    let prob = MultiplierProblem::new(n, cfg.f64("s")?, cfg.f64("t")?)?;
    let spec = construct_counterexample(&prob, cfg.f64("eps")?)?;
    let levels = cfg.usize("levels")?;
    let finest = cfg.usize("N")?;
    if !(3..=16).contains(&levels) {
        return Err(CliError::Validation(format!("invalid value for levels: need 3..=16, got {levels}")));
    }
    let half_extent = cfg.f64("L")?;
    let grids = (0..levels)
        .rev()
        .map(|k| GridSpec::new(n, half_extent, finest >> k))
        .collect::<crate::Result<Vec<_>>>()?;
    let report = verify_counterexample(&spec, &grids, &cfg.f64_list("m")?)?;

    let mut out = RunOutput::default();
    out.num("delta", spec.delta)?;
    out.num("alpha", spec.alpha)?;
    out.num("p1", spec.p1)?;
    out.num("p_target", spec.p_target)?;
    out.num("t1", spec.t1)?;
    out.num("s1", spec.s1)?;
    out.flag("analytic_ok", report.analytic_ok);
    out.flag("ladder_stable", report.ladder_stable);
    report_ladder(&mut out, &report.ladder)?;
    report_growth(&mut out, &report.growth)?;
    out.flag("sharpness_witnessed", report.sharpness_witnessed);
    Ok(out)
}
