//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use besselab::besselnorm::{
    classify_unif_membership_with, decay_ratio_sweep, ft_law_check, hs_norm, LadderConfig,
    SpaceIndex, Verdict,
};
use besselab::gridfield::{cyclic_translate, dft, idft, lp_norm, Domain, Field, GridSpec};
use besselab::multiplier::{bilinear_witness, estimate_operator_norm, growth_slope_experiment, MultiplierProblem};
use besselab::riesz::{sample_f_alpha, RieszParam, SingularCellRule};
use besselab::sharpness::{construct_counterexample, eps_upper};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// First observed relative L-infinity error at N = 4096 for alpha = 0.3, 0.5, 0.7, times 1.5.
const FT_LAW_BOUNDS: [f64; 3] = [
    7.03801599176133e-4 * 1.5,
    1.9268516722242334e-3 * 1.5,
    4.580956440699761e-3 * 1.5,
];
/// First observed max_z R(z) (attained at z = 0), times 1.5.
const DECAY_RATIO_BOUND: f64 = 1.7568532603709421 * 1.5;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run(id: u32, name: &str, budget_s: f64, f: impl FnOnce() -> Check) -> bool {
    let t0 = Instant::now();
    let outcome = f();
    let secs = t0.elapsed().as_secs_f64();
    let in_time = secs < budget_s;
    let (pass, detail) = match outcome {
        Ok(d) => (in_time, d),
        Err(d) => (false, d),
    };
    let timing = if in_time {
        format!("{secs:.2} s of {budget_s} s")
    } else {
        format!("{secs:.2} s EXCEEDS {budget_s} s")
    };
    println!(
        "{} criterion {id:>2} {name}: {detail} [{timing}]",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn random_field(grid: GridSpec, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Field::new(grid, Domain::Physical, v).unwrap()
}

fn sq_sum(u: &Field) -> f64 {
    u.values().iter().map(|v| v.norm_sqr()).sum()
}

fn transform_fidelity() -> Check {
    let mut worst_round = 0.0f64;
    let mut worst_plancherel = 0.0f64;
    for (dim, n, seed) in [(1, 64, 1), (2, 128, 2)] {
        let grid = GridSpec::new(dim, 5.0, n).unwrap();
        let u = random_field(grid, seed);
        let spec = dft(&u).map_err(|e| e.to_string())?;
        let back = idft(&spec).map_err(|e| e.to_string())?;
        let diff = u
            .values()
            .iter()
            .zip(back.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        worst_round = worst_round.max(diff / u.max_abs());
        let phys = grid.cell_volume() * sq_sum(&u);
        let freq = grid.freq_cell_volume() * sq_sum(&spec);
        worst_plancherel = worst_plancherel.max((phys - freq).abs() / phys);
    }
    ensure(
        worst_round < 1e-10 && worst_plancherel < 1e-10,
        format!("round-trip {worst_round:.2e}, Plancherel {worst_plancherel:.2e} (tol 1e-10)"),
    )
}

fn definition_consistency() -> Check {
    let grid = GridSpec::new(2, 6.0, 64).unwrap();
    let u = random_field(grid, 3);
    let mut worst_eq = 0.0f64;
    for p in [1.5, 2.0, 3.0] {
        let a = hs_norm(&u, &SpaceIndex::new(0.0, p).unwrap()).unwrap().value;
        let b = lp_norm(&u, p).unwrap();
        worst_eq = worst_eq.max((a - b).abs() / b);
    }
    let shifted = cyclic_translate(&u, &[17, 40]).unwrap();
    let mut worst_shift = 0.0f64;
    for (gamma, p) in [(0.8, 2.0), (-0.6, 3.0), (1.3, 1.5)] {
        let idx = SpaceIndex::new(gamma, p).unwrap();
        let a = hs_norm(&u, &idx).unwrap().value;
        let b = hs_norm(&shifted, &idx).unwrap().value;
        worst_shift = worst_shift.max((a - b).abs() / a);
    }
    ensure(
        worst_eq < 1e-14 && worst_shift < 1e-10,
        format!("gamma=0 vs L_p {worst_eq:.2e} (tol 1e-14), translation {worst_shift:.2e} (tol 1e-10)"),
    )
}

fn riesz_ft_law() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, alpha) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let p = RieszParam::new(alpha, 1).unwrap();
        let err = |n| {
            ft_law_check(&p, &GridSpec::new(1, 16.0, n).unwrap(), 20.0)
                .map(|c| c.rel_linf_error)
                .map_err(|e| e.to_string())
        };
        let coarse = err(2048)?;
        let fine = err(4096)?;
        ok &= fine < FT_LAW_BOUNDS[k] && fine < coarse;
        parts.push(format!(
            "alpha={alpha}: {fine:.3e} (bound {:.3e}, N=2048 {coarse:.3e})",
            FT_LAW_BOUNDS[k]
        ));
    }
    ensure(ok, parts.join("; "))
}

fn lemma_uniformity() -> Check {
    let p = RieszParam::new(1.0, 2).unwrap();
    let z: Vec<Vec<f64>> = [0.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&r| vec![r, 0.0]).collect();
    let coarse = GridSpec::new(2, 8.0, 128).unwrap();
    let a = decay_ratio_sweep(&p, &z, &coarse).map_err(|e| e.to_string())?;
    let b = decay_ratio_sweep(&p, &z, &coarse.refined().unwrap()).map_err(|e| e.to_string())?;
    let max = a.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let worst_change = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (y.ratio - x.ratio).abs() / x.ratio)
        .fold(0.0, f64::max);
    let values: Vec<String> = a.iter().map(|r| format!("{:.4}", r.ratio)).collect();
    ensure(
        max < DECAY_RATIO_BOUND && worst_change < 0.10,
        format!(
            "R = [{}], max {max:.4} (bound {DECAY_RATIO_BOUND:.4}), worst refinement change {:.2}% (tol 10%)",
            values.join(", "),
            100.0 * worst_change
        ),
    )
}

fn transition() -> Check {
    let cfg = LadderConfig {
        half_extent: 8.0,
        base_points: 1 << 11,
        levels: 3,
        ..LadderConfig::default_for(1)
    };
    let member = classify_unif_membership_with(&RieszParam::new(0.6, 1).unwrap(), 0.25, false, &cfg)
        .map_err(|e| e.to_string())?;
    let non = classify_unif_membership_with(&RieszParam::new(0.9, 1).unwrap(), 0.25, false, &cfg)
        .map_err(|e| e.to_string())?;
    let lm = member.ladder.as_ref().unwrap();
    let ln = non.ladder.as_ref().unwrap();
    let change = lm.last_relative_change().abs();
    ensure(
        change < 0.05
            && ln.strictly_increasing()
            && member.verdict == Verdict::Member
            && non.verdict == Verdict::NonMember,
        format!(
            "alpha=0.6 change 2^12->2^13 {:.2}% (tol 5%), verdict {}; alpha=0.9 norms {:?} increasing={}, verdict {}",
            100.0 * change,
            member.verdict,
            ln.norms().iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>(),
            ln.strictly_increasing(),
            non.verdict
        ),
    )
}

fn necessity() -> Check {
    let p = MultiplierProblem::new(2, 0.5, 0.5).unwrap();
    let m = [4.0, 8.0, 16.0, 32.0, 64.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.8, 1.0, 1.4] {
        let g = growth_slope_experiment(&p, alpha, &m).map_err(|e| e.to_string())?;
        let want = g.analytic_exponent();
        let rel = (g.fit.slope - want).abs() / want;
        // alpha = s + t has exponent exactly n: only the 5% band applies there.
        let side = if alpha < 1.0 {
            !g.exceeds_n()
        } else if alpha > 1.0 {
            g.exceeds_n()
        } else {
            g.consistent_with_membership()
        };
        ok &= rel < 0.05 && side;
        parts.push(format!(
            "alpha={alpha}: slope {:.4} vs {want:.1} ({:.2}%), exceeds n={}",
            g.fit.slope,
            100.0 * rel,
            g.exceeds_n()
        ));
    }
    ensure(ok, parts.join("; "))
}

fn formula_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 1000 {
        let n = rng.random_range(1..=3usize);
        let half = n as f64 / 2.0;
        let p = MultiplierProblem::new(n, rng.random_range(0.0..half), rng.random_range(0.0..half)).unwrap();
        if p.s_max() == 0.0 {
            continue;
        }
        let eps = rng.random_range(0.0..1.0) * eps_upper(&p).unwrap();
        if eps == 0.0 {
            continue;
        }
        let c = construct_counterexample(&p, eps).map_err(|e| format!("n={n} {p:?} eps={eps}: {e}"))?;
        c.check_invariants().map_err(|e| e.to_string())?;
        worst = worst.max((-c.t1 - half - c.exponent_rhs()).abs());
        checked += 1;
    }
    ensure(
        worst <= 1e-12,
        format!("{checked} admissible inputs, worst exponent identity residual {worst:.2e} (tol 1e-12)"),
    )
}

fn symmetry() -> Check {
    let grid = GridSpec::new(1, 8.0, 256).unwrap();
    let f = |x: &[f64]| {
        Complex64::new(1.0 + (-x[0] * x[0]).exp(), 0.4 * (-0.5 * (x[0] - 1.0).powi(2)).exp())
    };
    let mu = Field::new(grid, Domain::Physical, (0..256).map(|k| f(&[grid.coordinate(k)])).collect()).unwrap();
    let g = random_field(grid, 4);
    let h = random_field(grid, 5);
    let p = MultiplierProblem::new(1, 0.3, 0.7).unwrap();
    let w1 = bilinear_witness(&mu, &g, &h, &p).map_err(|e| e.to_string())?;
    let w2 = bilinear_witness(&mu.conj(), &h, &g, &p.swapped()).map_err(|e| e.to_string())?;
    let s1 = estimate_operator_norm(&mu, &p, 5000, 1e-14, 21).map_err(|e| e.to_string())?;
    let s2 = estimate_operator_norm(&mu.conj(), &p.swapped(), 5000, 1e-14, 22).map_err(|e| e.to_string())?;
    let dw = (w1 - w2).abs();
    let ds = (s1.sigma - s2.sigma).abs();
    ensure(
        dw < 1e-9 && ds < 1e-9,
        format!(
            "witness diff {dw:.2e}, sigma {:.12} vs {:.12} diff {ds:.2e} (tol 1e-9)",
            s1.sigma, s2.sigma
        ),
    )
}

fn operator_norm_sanity() -> Check {
    let grid = GridSpec::new(1, 8.0, 512).unwrap();
    let one = Field::constant(grid, Domain::Physical, Complex64::new(1.0, 0.0));
    let id = MultiplierProblem::new(1, 0.0, 0.0).unwrap();
    let unit = estimate_operator_norm(&one, &id, 500, 1e-8, 1).map_err(|e| e.to_string())?;
    let p = MultiplierProblem::new(1, 0.3, 0.3).unwrap();
    let param = RieszParam::new(0.5, 1).unwrap();
    let sigma = |n| {
        let g = GridSpec::new(1, 8.0, n).unwrap();
        let mu = sample_f_alpha(&param, &g, &SingularCellRule::default(), &[0.0]).unwrap();
        estimate_operator_norm(&mu, &p, 500, 1e-8, 2).map_err(|e| e.to_string())
    };
    let a = sigma(512)?;
    let b = sigma(1024)?;
    let change = (b.sigma - a.sigma).abs() / a.sigma;
    ensure(
        (unit.sigma - 1.0).abs() < 1e-6 && a.converged && b.converged && change < 0.05,
        format!(
            "identity sigma {:.9} (tol 1e-6); f_0.5 sigma {:.6} -> {:.6} ({} and {} iterations), change {:.2}% (tol 5%)",
            unit.sigma,
            a.sigma,
            b.sigma,
            a.iterations,
            b.iterations,
            100.0 * change
        ),
    )
}

fn read_report(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    Ok(text
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once(','))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

fn end_to_end() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("run1");
    let status = Command::new(env!("CARGO_BIN_EXE_besselab"))
        .args(["counterexample", "--n", "2", "--s", "0.9", "--t", "0.9", "--eps", "0.1"])
        .args(["--N", "256", "--m", "4,8,16,32", "--out"])
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
    }
    let rows = read_report(&out.join("report.csv"))?;
    let get = |k: &str| rows.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone()).unwrap_or_default();
    let num = |k: &str| get(k).parse::<f64>().unwrap_or(f64::NAN);
    let delta = num("delta");
    let alpha = num("alpha");
    let slope = num("growth_slope");
    ensure(
        (delta - 0.021204).abs() < 5e-7
            && (alpha - 1.821204).abs() < 5e-7
            && slope > 2.0
            && get("ladder_stable") == "true"
            && get("sharpness_witnessed") == "true",
        format!(
            "delta {delta:.6}, alpha {alpha:.6}, growth slope {slope:.4}, ladder stable {}, sharpness_witnessed {}",
            get("ladder_stable"),
            get("sharpness_witnessed")
        ),
    )
}

fn main() {
    let results = [
        run(1, "transform fidelity", 5.0, transform_fidelity),
        run(2, "definition consistency", 5.0, definition_consistency),
        run(3, "Riesz Fourier-transform law", 30.0, riesz_ft_law),
        run(4, "uniform cutoff decay", 60.0, lemma_uniformity),
        run(5, "unif-membership transition", 60.0, transition),
        run(6, "necessity growth slopes", 30.0, necessity),
        run(7, "sharpness formula suite", 5.0, formula_suite),
        run(8, "symmetry under (s,t) swap", 30.0, symmetry),
        run(9, "operator-norm sanity", 60.0, operator_norm_sanity),
        run(10, "end-to-end counterexample", 300.0, end_to_end),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
