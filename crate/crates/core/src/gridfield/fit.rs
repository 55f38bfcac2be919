use crate::error::{invalid, Result};

/// Least-squares line through `(ln m, ln value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// The `(ln m, ln value)` pairs the line was fitted to.
    pub points: Vec<(f64, f64)>,
}

impl SlopeFit {
    /// Value of the fitted power law at `m`.
    pub fn predict(&self, m: f64) -> f64 {
        (self.intercept + self.slope * m.ln()).exp()
    }
}

/// Fits `value ~ exp(intercept) * m^slope`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(invalid(format!(
            "log-log fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(m, v)) = points
        .iter()
        .find(|(m, v)| !(*m > 0.0 && *v > 0.0 && m.is_finite() && v.is_finite()))
    {
        return Err(invalid(format!(
            "log-log fit needs positive finite data, got ({m}, {v})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(m, v)| (m.ln(), v.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("log-log fit needs at least two distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r2,
        points: logs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand::Rng;

    #[test]
    fn exact_power_laws() {
        let f = fit_loglog_slope(&[(2.0, 4.0), (4.0, 16.0), (8.0, 64.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        let pts: Vec<_> = [1.0, 2.0, 4.0, 8.0].iter().map(|&m: &f64| (m, 0.7 * m.powi(3))).collect();
        let f = fit_loglog_slope(&pts).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.predict(3.0) - 0.7 * 27.0).abs() < 1e-10);
    }

    #[test]
    fn noisy_power_law() {
        // 10% multiplicative noise, fixed seed.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let pts: Vec<_> = (0..8)
            .map(|i| {
                let m = 2f64.powi(i);
                (m, 5.0 * m.powf(1.5) * (1.0 + rng.random_range(-0.1..0.1)))
            })
            .collect();
        let f = fit_loglog_slope(&pts).unwrap();
        assert!((f.slope - 1.5).abs() < 0.15, "slope {}", f.slope);
        assert!(f.r2 > 0.99);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_loglog_slope(&[(-1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(fit_loglog_slope(&[(2.0, 1.0), (2.0, 3.0), (2.0, 1.0)]).is_err());
    }
}
