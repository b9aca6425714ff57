//! Shared oracles and generators for the integration suites. Everything
//! here is independent of the engine code paths it is used to check:
//! quadrature against closed-form Gaussian integrals, and plain random
//! data generators.

#![allow(dead_code)]

use gexpect_core::{CovariancePolytope, DiscreteDistribution, ScenarioSet, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gauss-Hermite nodes and weights for `integral f(x) exp(-x^2) dx`.
/// Roots located by sign scan plus bisection on the physicists' Hermite
/// polynomial; the plain recurrence overflows past n of about 150, which
/// is far more than these oracles need.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    assert!(
        n <= 128,
        "unscaled Hermite recurrence overflows for large n"
    );
    fn hermite(n: usize, x: f64) -> (f64, f64) {
        // Returns (H_n(x), H_{n-1}(x)).
        let mut hm = 1.0f64;
        let mut h = 2.0 * x;
        if n == 0 {
            return (1.0, 0.0);
        }
        for k in 1..n {
            let next = 2.0 * x * h - 2.0 * k as f64 * hm;
            hm = h;
            h = next;
        }
        (h, hm)
    }

    let bound = (2.0 * n as f64 + 1.0).sqrt() + 2.0;
    let grid = 20_000usize;
    let mut roots = Vec::with_capacity(n);
    let mut prev_x = -bound;
    let mut prev_v = hermite(n, prev_x).0;
    for k in 1..=grid {
        let x = -bound + 2.0 * bound * k as f64 / grid as f64;
        let v = hermite(n, x).0;
        if prev_v == 0.0 {
            roots.push(prev_x);
        } else if prev_v.signum() != v.signum() {
            let (mut lo, mut hi) = (prev_x, x);
            let mut flo = prev_v;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = hermite(n, mid).0;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo.signum() == fm.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
    assert_eq!(roots.len(), n, "root scan lost Hermite roots");

    let mut log_factor = (n as f64 - 1.0) * std::f64::consts::LN_2
        + (1..=n).map(|k| (k as f64).ln()).sum::<f64>()
        + 0.5 * std::f64::consts::PI.ln();
    log_factor -= 2.0 * (n as f64).ln();
    roots
        .into_iter()
        .map(|x| {
            let (_, hm) = hermite(n, x);
            let w = (log_factor - 2.0 * hm.abs().ln()).exp();
            (x, w)
        })
        .collect()
}

/// `E[f(sigma Z)]` for standard normal `Z`, by Gauss-Hermite quadrature.
pub fn gaussian_expectation_gh(f: impl Fn(f64) -> f64, sigma: f64, nodes: usize) -> f64 {
    let rule = gauss_hermite(nodes);
    let c = 1.0 / std::f64::consts::PI.sqrt();
    rule.iter()
        .map(|(x, w)| c * w * f(sigma * std::f64::consts::SQRT_2 * x))
        .sum()
}

/// `E[f(sigma Z)]` by composite Simpson over twelve standard deviations;
/// slower but kink-tolerant.
pub fn gaussian_expectation_simpson(f: impl Fn(f64) -> f64, sigma: f64) -> f64 {
    let half = 12.0 * sigma.max(1e-12);
    let intervals = 48_000usize; // even
    let h = 2.0 * half / intervals as f64;
    let density = |x: f64| {
        (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let g = |x: f64| f(x) * density(x);
    let mut acc = g(-half) + g(half);
    for k in 1..intervals {
        let x = -half + k as f64 * h;
        acc += g(x) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `E[f(|Z|)]` for a standard 2-d Gaussian `Z`, via the radial density
/// `r exp(-r^2/2)`.
pub fn rayleigh_expectation(f: impl Fn(f64) -> f64) -> f64 {
    let half = 14.0;
    let intervals = 48_000usize;
    let h = half / intervals as f64;
    let g = |r: f64| f(r) * r * (-r * r / 2.0).exp();
    let mut acc = g(0.0) + g(half);
    for k in 1..intervals {
        let r = k as f64 * h;
        acc += g(r) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Random scenario set on an exact binary lattice, suitable for
/// lattice-mode DP: up to `max_scenarios` scenarios of up to `max_atoms`
/// distinct points with positive normalized weights.
pub fn random_lattice_scenario_set(
    dimension: usize,
    max_scenarios: usize,
    max_atoms: usize,
    rng: &mut ChaCha8Rng,
) -> ScenarioSet {
    let pitch = [0.25, 0.5, 1.0][rng.random_range(0..3)];
    let n_scen = rng.random_range(1..=max_scenarios);
    let mut scenarios = Vec::with_capacity(n_scen);
    for _ in 0..n_scen {
        let n_atoms = rng.random_range(1..=max_atoms);
        let mut points: Vec<Vec<f64>> = Vec::new();
        while points.len() < n_atoms {
            let p: Vec<f64> = (0..dimension)
                .map(|_| pitch * rng.random_range(-3i64..=3) as f64)
                .collect();
            if !points.contains(&p) {
                points.push(p);
            }
        }
        let mut weights: Vec<f64> = (0..points.len())
            .map(|_| rng.random_range(0.05..1.0))
            .collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let atoms = points.into_iter().zip(weights).collect();
        scenarios.push(DiscreteDistribution::new(atoms).unwrap());
    }
    ScenarioSet::new(dimension, scenarios).unwrap()
}

/// Mean-zero variant: symmetric two-point scenarios at random magnitudes.
pub fn random_symmetric_scenario_set(
    dimension: usize,
    max_scenarios: usize,
    rng: &mut ChaCha8Rng,
) -> ScenarioSet {
    let n_scen = rng.random_range(1..=max_scenarios);
    let scenarios = (0..n_scen)
        .map(|_| {
            let point: Vec<f64> = (0..dimension)
                .map(|_| 0.5 * rng.random_range(-4i64..=4) as f64)
                .collect();
            DiscreteDistribution::symmetric_pair(point).unwrap()
        })
        .collect();
    ScenarioSet::new(dimension, scenarios).unwrap()
}

/// Random PSD-vertex polytope.
pub fn random_polytope(
    dimension: usize,
    max_vertices: usize,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> CovariancePolytope {
    let n = rng.random_range(1..=max_vertices);
    let vertices = (0..n)
        .map(|_| SymMatrix::random_psd(dimension, scale, rng))
        .collect();
    CovariancePolytope::new(dimension, vertices).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
