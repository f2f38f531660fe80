//! Oracle suites shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use daernn::censor::feasible_set;
use daernn::expectile::{check_loss, check_loss_grad, sample_expectile, ExpectileLevel};
use daernn::nn::{self, Activation, MlpParams, MlpSpec, Mode};
use daernn::simgen::{gen_scenario, table1_cells, ScenarioSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative error with the denominator floored at `floor`, so coordinates
/// whose true value is ~0 are compared absolutely at that scale.
pub fn rel_err(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

pub const GRAD_FLOOR: f64 = 1e-3;

pub fn lvl(t: f64) -> ExpectileLevel {
    ExpectileLevel::new(t).unwrap()
}

/// Worst relative error of `check_loss_grad` against a central difference
/// over `count` random `(u, tau)` pairs.
pub fn check_loss_gradient_worst(count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < count {
        let u: f64 = rng.random_range(-10.0..10.0);
        if u.abs() < 1e-3 {
            continue;
        }
        let tau = lvl(rng.random_range(0.001..0.999));
        let fd = (check_loss(u + h, tau).unwrap() - check_loss(u - h, tau).unwrap()) / (2.0 * h);
        worst = worst.max(rel_err(check_loss_grad(u, tau).unwrap(), fd, GRAD_FLOOR));
        done += 1;
    }
    worst
}

pub struct NetCase {
    pub widths: Vec<usize>,
    pub activation: Activation,
    pub input_dim: usize,
}

pub fn gradient_cases() -> Vec<NetCase> {
    let mut cases = Vec::new();
    for activation in [Activation::Relu, Activation::Sigmoid] {
        for widths in [vec![1], vec![4], vec![8], vec![3, 5], vec![8, 8]] {
            for input_dim in [1, 2, 3] {
                cases.push(NetCase { widths: widths.clone(), activation, input_dim });
            }
        }
    }
    cases
}

fn off_kink(params: &MlpParams, xs: &[Vec<f64>], ys: &[f64], margin: f64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    xs.iter().zip(ys).all(|(x, &y)| {
        let (pred, cache) = nn::forward(params, x, Mode::Eval, &mut rng).unwrap();
        let relu_ok = params.spec().activation != Activation::Relu
            || cache.hidden_pre_activations().iter().flatten().all(|z| z.abs() > margin);
        relu_ok && (y - pred).abs() > margin
    })
}

/// Worst relative error over every parameter of a random net and batch of
/// eight, dropout off, step `1e-5`.
pub fn mlp_gradient_worst(case: &NetCase, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = MlpSpec::new(case.input_dim, case.widths.clone(), case.activation, 0.0).unwrap();
    let tau = lvl(rng.random_range(0.05..0.95));
    let (params, xs, ys) = loop {
        let mut params: MlpParams = nn::init_params(&spec, rng.random()).unwrap();
        for layer in params.layers_mut() {
            for b in layer.biases.iter_mut() {
                *b = rng.random_range(-0.5..0.5);
            }
        }
        let xs: Vec<Vec<f64>> =
            (0..8).map(|_| (0..case.input_dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let ys: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        if off_kink(&params, &xs, &ys, 1e-3) {
            break (params, xs, ys);
        }
    };
    let mut drng = ChaCha8Rng::seed_from_u64(1);
    let (_, grad) = nn::loss_and_gradient(&params, &xs, &ys, tau, Mode::Train, &mut drng).unwrap();
    let analytic = grad.to_flat();
    let flat = params.to_flat();
    let h = 1e-5;
    let loss_at = |theta: &[f64]| {
        let p = MlpParams::from_flat(&spec, theta).unwrap();
        nn::loss_and_gradient(&p, &xs, &ys, tau, Mode::Eval, &mut ChaCha8Rng::seed_from_u64(1)).unwrap().0
    };
    let mut worst: f64 = 0.0;
    let mut theta = flat.clone();
    for i in 0..flat.len() {
        theta[i] = flat[i] + h;
        let up = loss_at(&theta);
        theta[i] = flat[i] - h;
        let down = loss_at(&theta);
        theta[i] = flat[i];
        worst = worst.max(rel_err(analytic[i], (up - down) / (2.0 * h), GRAD_FLOOR));
    }
    worst
}

/// Minimiser of the expectile objective on the lattice `lo + j * step`,
/// searched coarse-to-fine; exact for a convex objective.
pub fn grid_expectile(values: &[f64], tau: f64, step: f64) -> f64 {
    let obj = |theta: f64| -> f64 {
        values
            .iter()
            .map(|&v| {
                let u = v - theta;
                0.5 * if u < 0.0 { 1.0 - tau } else { tau } * u * u
            })
            .sum()
    };
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return lo;
    }
    let lattice_len = ((hi - lo) / step).floor() as i64;
    let mut best_j = 0i64;
    let mut stride = lattice_len.max(1);
    let (mut a, mut b) = (0i64, lattice_len);
    loop {
        stride = (stride / 1000).max(1);
        let mut best = f64::INFINITY;
        let mut j = a;
        while j <= b {
            let v = obj(lo + j as f64 * step);
            if v < best {
                best = v;
                best_j = j;
            }
            j += stride;
        }
        if stride == 1 {
            break;
        }
        a = (best_j - stride).max(0);
        b = (best_j + stride).min(lattice_len);
    }
    lo + best_j as f64 * step
}

/// Worst `|solver - grid oracle|` and worst `|tau=0.5 solution - mean|`.
pub fn expectile_oracle_worst(samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut worst_mean): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let n = rng.random_range(1..=20);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        for k in 1..=9 {
            let tau = k as f64 / 10.0;
            let got = sample_expectile(&values, lvl(tau)).unwrap();
            worst = worst.max((got - grid_expectile(&values, tau, 1e-6)).abs());
            if k == 5 {
                let mean = values.iter().sum::<f64>() / n as f64;
                worst_mean = worst_mean.max((got - mean).abs());
            }
        }
    }
    (worst, worst_mean)
}

pub struct CellReport {
    pub id: String,
    pub nominal: f64,
    pub rate: f64,
    pub consistent: bool,
}

/// Censoring consistency and realised rates for every tabulated scenario cell.
pub fn censoring_cells(n: usize, seed: u64) -> Vec<CellReport> {
    table1_cells()
        .into_iter()
        .enumerate()
        .map(|(c, (model, error, censor_kind, rate))| {
            let spec = ScenarioSpec { model, error, censor_kind, rate, n, seed: seed + c as u64 };
            let obs = gen_scenario(&spec).unwrap();
            let consistent = obs.iter().all(|o| {
                let y = o.y_true.unwrap();
                if o.is_censored() {
                    feasible_set(o).contains(y)
                } else {
                    o.t == y
                }
            });
            let realised = obs.iter().filter(|o| o.is_censored()).count() as f64 / n as f64;
            CellReport { id: spec.id(), nominal: rate.nominal(), rate: realised, consistent }
        })
        .collect()
}
