//! Least-squares exponential fits.

use alloc::vec::Vec;

use thiserror::Error;

use crate::math;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("xs and ys differ in length")]
    LengthMismatch,
    #[error("non-finite input")]
    NonFinite,
    #[error("ys are constant")]
    Degenerate,
    #[error("iteration did not converge")]
    NoConvergence,
}

const MAX_ITERATIONS: usize = 200;
const PARAM_TOLERANCE: f64 = 1e-10;

/// `y = a * exp(-b * x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpDecayFit {
    pub a: f64,
    pub b: f64,
    pub sse: f64,
    pub r2: f64,
    /// `1 - (1 - R²)(n - 1)/(n - 3)` for two fitted parameters.
    pub adj_r2: f64,
}

pub fn exp_decay_sse(xs: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = a * math::exp(-b * x) - y;
            e * e
        })
        .sum()
}

/// Log-linear regression of `ln|y|` on `x` when all ys share a sign;
/// otherwise a flat curve through the first point.
fn initial_guess(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let sign = if ys.iter().all(|&y| y > 0.0) {
        1.0
    } else if ys.iter().all(|&y| y < 0.0) {
        -1.0
    } else {
        let a = if ys[0] != 0.0 { ys[0] } else { math::mean(ys) };
        return (a, 0.0);
    };
    let ly: alloc::vec::Vec<f64> = ys.iter().map(|y| math::ln(y.abs())).collect();
    let mx = math::mean(xs);
    let my = math::mean(&ly);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    (sign * math::exp(intercept), -slope)
}

/// Levenberg–Marquardt fit of `y = a * exp(-b * x)` seeded by a log-linear
/// estimate. Stops when the proposed parameter step falls below `1e-10`
/// (relative to the parameter scale) and fails after 200 iterations.
pub fn fit_exp_decay(xs: &[f64], ys: &[f64]) -> Result<ExpDecayFit, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch);
    }
    let n = xs.len();
    if n < 4 {
        return Err(FitError::TooFewPoints { needed: 4, got: n });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(FitError::NonFinite);
    }
    let ybar = math::mean(ys);
    let sst: f64 = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    if sst == 0.0 {
        return Err(FitError::Degenerate);
    }

    let (mut a, mut b) = initial_guess(xs, ys);
    let mut sse = exp_decay_sse(xs, ys, a, b);
    if !sse.is_finite() {
        a = ybar;
        b = 0.0;
        sse = exp_decay_sse(xs, ys, a, b);
    }
    let mut lambda = 1e-3;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        // Normal equations: J columns are d/da = e, d/db = -a x e.
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in xs.iter().zip(ys) {
            let e = math::exp(-b * x);
            let res = a * e - y;
            let da = e;
            let db = -a * x * e;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * res;
            gb += db * res;
        }
        let maa = jaa * (1.0 + lambda) + if jaa == 0.0 { lambda } else { 0.0 };
        let mbb = jbb * (1.0 + lambda) + if jbb == 0.0 { lambda } else { 0.0 };
        let det = maa * mbb - jab * jab;
        if det == 0.0 || !det.is_finite() {
            return Err(FitError::NoConvergence);
        }
        let step_a = -(mbb * ga - jab * gb) / det;
        let step_b = -(maa * gb - jab * ga) / det;
        let cand_a = a + step_a;
        let cand_b = b + step_b;
        let cand_sse = exp_decay_sse(xs, ys, cand_a, cand_b);
        if cand_sse.is_finite() && cand_sse <= sse {
            a = cand_a;
            b = cand_b;
            sse = cand_sse;
            lambda = (lambda * 0.1).max(1e-12);
        } else {
            lambda *= 10.0;
        }
        let tol_a = PARAM_TOLERANCE * (1.0 + a.abs());
        let tol_b = PARAM_TOLERANCE * (1.0 + b.abs());
        if step_a.abs() <= tol_a && step_b.abs() <= tol_b {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(FitError::NoConvergence);
    }
    let r2 = 1.0 - sse / sst;
    let adj_r2 = 1.0 - (1.0 - r2) * (n - 1) as f64 / (n - 3) as f64;
    Ok(ExpDecayFit {
        a,
        b,
        sse,
        r2,
        adj_r2,
    })
}

pub fn exp_density_sse(zs: &[f64], density: &[f64], rate: f64) -> f64 {
    zs.iter()
        .zip(density)
        .map(|(&z, &d)| {
            let e = rate * math::exp(-rate * z) - d;
            e * e
        })
        .sum()
}

/// Least-squares fit of the exponential density `rate * exp(-rate * z)` to
/// `(z, density)` pairs. The rate is bracketed on a log grid around
/// `initial_rate` (factors 2^-20..2^20), refined by golden-section search and
/// polished with safeguarded Newton steps.
pub fn fit_exp_density(zs: &[f64], density: &[f64], initial_rate: f64) -> Result<f64, FitError> {
    if zs.len() != density.len() {
        return Err(FitError::LengthMismatch);
    }
    if zs.is_empty() {
        return Err(FitError::TooFewPoints { needed: 1, got: 0 });
    }
    if !(initial_rate > 0.0) || !initial_rate.is_finite() {
        return Err(FitError::NonFinite);
    }
    let sse = |r: f64| exp_density_sse(zs, density, r);

    const STEPS_PER_OCTAVE: i32 = 8;
    const OCTAVES: i32 = 20;
    let grid: Vec<f64> = (-OCTAVES * STEPS_PER_OCTAVE..=OCTAVES * STEPS_PER_OCTAVE)
        .map(|k| initial_rate * libm::exp2(f64::from(k) / f64::from(STEPS_PER_OCTAVE)))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&r| sse(r)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FitError::NonFinite);
    }
    let best = (0..grid.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .expect("non-empty grid");
    if best == 0 || best == grid.len() - 1 {
        return Err(FitError::NoConvergence);
    }

    // Golden-section search on the bracketing grid cell pair.
    let inv_phi = (math::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (sse(c), sse(d));
    for _ in 0..MAX_ITERATIONS {
        if b - a <= PARAM_TOLERANCE * (a + b) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sse(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sse(d);
        }
    }
    let (lo, hi) = (a, b);
    let mut rate = if fc <= fd { c } else { d };
    let mut current = sse(rate);

    // Newton on the gradient, kept inside the bracket and never increasing
    // the residual.
    for _ in 0..20 {
        let (mut g, mut h) = (0.0, 0.0);
        for (&z, &y) in zs.iter().zip(density) {
            let e = math::exp(-rate * z);
            let resid = rate * e - y;
            let j = e * (1.0 - rate * z);
            let j2 = e * z * (rate * z - 2.0);
            g += resid * j;
            h += j * j + resid * j2;
        }
        if !(h > 0.0) {
            break;
        }
        let cand = rate - g / h;
        if !(cand > lo && cand < hi) {
            break;
        }
        let cand_sse = sse(cand);
        if cand_sse > current {
            break;
        }
        let moved = (cand - rate).abs();
        rate = cand;
        current = cand_sse;
        if moved <= 1e-15 * rate {
            break;
        }
    }
    Ok(rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_exponential() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 2.0 * math::exp(-0.5 * x)).collect();
        let fit = fit_exp_decay(&xs, &ys).unwrap();
        assert!((fit.a - 2.0).abs() < 1e-6);
        assert!((fit.b - 0.5).abs() < 1e-6);
        assert!((fit.adj_r2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn density_fit_beats_dense_scan_on_bell_shape() {
        let zs: Vec<f64> = (0..30).map(|k| k as f64 + 0.5).collect();
        let ds: Vec<f64> = zs
            .iter()
            .map(|&z| 0.09 * math::exp(-(z - 16.0) * (z - 16.0) / 40.0))
            .collect();
        let rate = fit_exp_density(&zs, &ds, 0.08).unwrap();
        let best = (1..20_000)
            .map(|k| exp_density_sse(&zs, &ds, k as f64 * 1e-5))
            .fold(f64::INFINITY, f64::min);
        assert!(exp_density_sse(&zs, &ds, rate) <= best + 1e-15);
    }

    #[test]
    fn recovers_negative_amplitude() {
        let xs: Vec<f64> = (2..=40).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| -0.7 * math::exp(-0.1 * x)).collect();
        let fit = fit_exp_decay(&xs, &ys).unwrap();
        assert!((fit.a + 0.7).abs() < 1e-6);
        assert!((fit.b - 0.1).abs() < 1e-6);
    }

    #[test]
    fn constant_ys_are_degenerate() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(fit_exp_decay(&xs, &[3.0; 4]), Err(FitError::Degenerate));
        assert_eq!(
            fit_exp_decay(&xs[..3], &[1.0, 2.0, 3.0]),
            Err(FitError::TooFewPoints { needed: 4, got: 3 })
        );
    }

    #[test]
    fn density_fit_recovers_rate() {
        let zs: Vec<f64> = (0..30).map(|k| (k as f64 + 0.5) * 0.2).collect();
        let d: Vec<f64> = zs.iter().map(|&z| 1.5 * math::exp(-1.5 * z)).collect();
        let rate = fit_exp_density(&zs, &d, 0.4).unwrap();
        assert!((rate - 1.5).abs() < 1e-8);
    }
}
