//! Hyperparameter fitting by log-marginal-likelihood maximisation.
//!
//! Parameters live in log space and are optimised by Nelder–Mead from a
//! fixed set of starting points, so fits are deterministic.

use super::kernel::{KernelFamily, KernelSpec};
use super::model::{GpModel, PriorMean};
use crate::Flagged;

pub const START_POINTS: usize = 4;
pub const MAX_ITERATIONS: usize = 200;

const LN_LENGTH: (f64, f64) = (-4.0, 7.0);
const LN_SIGNAL: (f64, f64) = (-14.0, 10.0);
const LN_NOISE: (f64, f64) = (-14.0, 5.0);
const LN_RQ_ALPHA: (f64, f64) = (-5.0, 5.0);
const LN_PERIOD: (f64, f64) = (0.7, 9.0);

/// Log marginal likelihood of `ys` observed at `xs` under `spec`;
/// `-inf` when the covariance cannot be factorised.
pub fn log_marginal_likelihood(xs: &[f64], ys: &[f64], spec: &KernelSpec, mean: PriorMean) -> f64 {
    match GpModel::fit_single(xs.to_vec(), ys.to_vec(), *spec, mean) {
        Ok(m) => m.outputs()[0].log_marginal_likelihood(),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Fit a spec of the given family. Flagged (and returning the default spec)
/// when fewer than two observations are available.
pub fn fit_hyperparams(xs: &[f64], ys: &[f64], family: KernelFamily) -> Flagged<KernelSpec> {
    fit_hyperparams_with(xs, ys, family, PriorMean::Empirical, MAX_ITERATIONS)
}

pub fn fit_hyperparams_with(
    xs: &[f64],
    ys: &[f64],
    family: KernelFamily,
    mean: PriorMean,
    max_iterations: usize,
) -> Flagged<KernelSpec> {
    let default = KernelSpec::default_for(family);
    if xs.len() < 2 || xs.len() != ys.len() {
        return Flagged::fallback(default);
    }
    let objective = |p: &[f64]| {
        let lml = log_marginal_likelihood(xs, ys, &decode(family, p), mean);
        if lml.is_finite() {
            -lml
        } else {
            f64::INFINITY
        }
    };

    let mut best = default;
    let mut best_lml = log_marginal_likelihood(xs, ys, &default, mean);
    for start in start_points(family, xs, ys) {
        let (p, f) = nelder_mead(&objective, &start, 1.0, max_iterations);
        if f.is_finite() && -f > best_lml {
            best_lml = -f;
            best = decode(family, &p);
        }
    }
    Flagged::clean(best)
}

fn start_points(family: KernelFamily, xs: &[f64], ys: &[f64]) -> Vec<Vec<f64>> {
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let var = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n).max(1e-4);
    let span = (xs[xs.len() - 1] - xs[0]).max(1.0);
    let lv = var.ln();
    let base = [
        [0.0, lv, lv + 0.1f64.ln()],
        [3f64.ln(), lv, lv + 0.01f64.ln()],
        [(span / 2.0).max(1.0).ln(), lv, lv + 0.001f64.ln()],
        [span.ln(), lv + 1.0, lv + 0.1f64.ln()],
    ];
    base.iter()
        .take(START_POINTS)
        .map(|b| {
            let mut p = b.to_vec();
            match family {
                KernelFamily::RationalQuadratic => p.push(0.0),
                KernelFamily::ExpSineSquared => p.push((2.0 * span).ln()),
                _ => {}
            }
            p
        })
        .collect()
}

fn decode(family: KernelFamily, p: &[f64]) -> KernelSpec {
    let clamp = |v: f64, (lo, hi): (f64, f64)| v.clamp(lo, hi).exp();
    let mut spec = KernelSpec::default_for(family);
    spec.length_scale = clamp(p[0], LN_LENGTH);
    spec.signal_variance = clamp(p[1], LN_SIGNAL);
    spec.noise = clamp(p[2], LN_NOISE);
    match family {
        KernelFamily::RationalQuadratic => spec.rq_alpha = clamp(p[3], LN_RQ_ALPHA),
        KernelFamily::ExpSineSquared => spec.periodicity = clamp(p[3], LN_PERIOD),
        _ => {}
    }
    spec
}

/// Minimise `f` from `x0` with an axis-aligned initial simplex of size `step`.
/// Returns the best vertex and its value.
pub fn nelder_mead(f: &impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, max_iterations: usize) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect() };

    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[dim].1);
        if hi.is_finite() && (hi - lo).abs() <= 1e-10 * (1.0 + lo.abs()) {
            break;
        }
        let centroid: Vec<f64> =
            (0..dim).map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64).collect();
        let worst = simplex[dim].0.clone();

        let reflected = blend(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = blend(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[dim].1 {
            let c = blend(&centroid, &worst, -0.5);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = blend(&centroid, &worst, 0.5);
            let fc = f(&c);
            (c, fc)
        };
        if fc < simplex[dim].1.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = blend(&best, &vertex.0, 0.5);
            let fx = f(&x);
            *vertex = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |p: &[f64]| (p[0] - 1.5).powi(2) + 3.0 * (p[1] + 0.5).powi(2);
        let (x, fx) = nelder_mead(&f, &[0.0, 0.0], 1.0, 400);
        assert!((x[0] - 1.5).abs() < 1e-4 && (x[1] + 0.5).abs() < 1e-4);
        assert!(fx < 1e-8);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let (x, _) = nelder_mead(&f, &[-1.2, 1.0], 0.5, 2000);
        assert!((x[0] - 1.0).abs() < 1e-3 && (x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn too_few_points_returns_flagged_default() {
        let r = fit_hyperparams(&[1.0], &[2.0], KernelFamily::Rbf);
        assert!(r.flagged);
        assert_eq!(r.value, KernelSpec::default_for(KernelFamily::Rbf));
    }

    #[test]
    fn fitted_spec_at_least_as_likely_as_default() {
        let xs: Vec<f64> = (1..=12).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x / 3.0).sin() * 4.0 + 0.1 * (x * 7.3).cos()).collect();
        for family in KernelFamily::ALL {
            let fitted = fit_hyperparams(&xs, &ys, family);
            assert!(!fitted.flagged);
            let default = KernelSpec::default_for(family);
            assert!(
                log_marginal_likelihood(&xs, &ys, &fitted.value, PriorMean::Empirical)
                    >= log_marginal_likelihood(&xs, &ys, &default, PriorMean::Empirical)
            );
        }
    }

    #[test]
    fn constant_series_gets_small_signal_variance() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let flat = vec![4.0; 10];
        let wavy: Vec<f64> = xs.iter().map(|x| 4.0 + 2.0 * (x / 2.0).sin()).collect();
        let control_var = {
            let m = wavy.iter().sum::<f64>() / 10.0;
            wavy.iter().map(|y| (y - m).powi(2)).sum::<f64>() / 10.0
        };
        let fitted = fit_hyperparams(&xs, &flat, KernelFamily::Rbf).value;
        assert!(fitted.signal_variance < 1e-3 * control_var);

        // Grid oracle: for the flat series, smaller signal variances are always more likely.
        let mut previous = f64::NEG_INFINITY;
        for ln_s2 in [2.0, 0.0, -2.0, -4.0, -6.0] {
            let spec = KernelSpec { signal_variance: f64::exp(ln_s2), ..KernelSpec::default_for(KernelFamily::Rbf) };
            let lml = log_marginal_likelihood(&xs, &flat, &spec, PriorMean::Empirical);
            assert!(lml > previous);
            previous = lml;
        }
    }
}
