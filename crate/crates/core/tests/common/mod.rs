#![allow(dead_code)]

use lq_sweep::numerics::{from_rows, Matrix, Vector};
use lq_sweep::problem::{Interp, LqProblem, TimeMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SUITE_SEED: u64 = 0x5eed_2024;
pub const SUITE_SIZE: usize = 50;

pub fn scalar(v: f64) -> Matrix {
    from_rows(&[&[v]])
}

/// x' = u, x(0) − x(1) = 1, unit weights.
pub fn p1() -> LqProblem {
    LqProblem::new(
        scalar(0.0),
        scalar(1.0),
        scalar(1.0),
        scalar(1.0),
        scalar(1.0),
        scalar(1.0),
        scalar(1.0),
        0.0,
        1.0,
    )
    .unwrap()
}

/// x' = −x + u, x(0) = 1, x(1) = 1, no state cost.
pub fn p2() -> LqProblem {
    LqProblem::new(
        scalar(-1.0),
        scalar(1.0),
        scalar(0.0),
        scalar(1.0),
        from_rows(&[&[1.0], &[0.0]]),
        from_rows(&[&[0.0], &[-1.0]]),
        from_rows(&[&[1.0], &[1.0]]),
        0.0,
        1.0,
    )
    .unwrap()
}

pub fn p3() -> LqProblem {
    let mut p = p1();
    p.q = scalar(0.0);
    p
}

pub fn problem_path(name: &str) -> String {
    format!("{}/examples/problems/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[derive(Debug, Clone)]
pub struct Case {
    pub id: usize,
    pub varying: bool,
    pub problem: LqProblem,
}

fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| scale * rng.gen_range(-1.0..1.0))
}

fn psd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = uniform(rng, n, n, 1.0);
    &a * a.transpose() / n as f64
}

fn pd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    psd(rng, n) + Matrix::identity(n, n) * 0.5
}

/// Linear interpolation through five knots at multiples of a quarter of the
/// horizon, so knots fall on grid nodes whenever the step count is a
/// multiple of four.
fn sampled(t0: f64, horizon: f64, mut value: impl FnMut(usize) -> Matrix) -> TimeMatrix {
    let times = (0..5).map(|j| t0 + j as f64 * horizon / 4.0).collect();
    let values = (0..5).map(&mut value).collect();
    TimeMatrix::sampled(times, values, Interp::Linear).unwrap()
}

pub fn random_problem(rng: &mut ChaCha8Rng, varying: bool) -> LqProblem {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=n);
    let k = rng.gen_range(1..=2 * n);
    let t0 = rng.gen_range(-1.0..1.0);
    let horizon = rng.gen_range(0.5..1.5);

    let f0 = uniform(rng, n, n, 0.8);
    let g0 = uniform(rng, n, m, 1.0);
    let r0 = psd(rng, n);
    let c0 = pd(rng, m);
    let phi1 = uniform(rng, k, n, 1.0);
    let phi2 = uniform(rng, k, n, 1.0);
    let q = uniform(rng, k, 1, 1.0);

    let mut p = LqProblem::new(f0.clone(), g0.clone(), r0, c0, phi1, phi2, q, t0, t0 + horizon).unwrap();
    if varying {
        p.f = sampled(t0, horizon, |_| &f0 + uniform(rng, n, n, 0.3));
        p.g = sampled(t0, horizon, |_| &g0 + uniform(rng, n, m, 0.3));
        p.r = sampled(t0, horizon, |_| psd(rng, n));
        p.c = sampled(t0, horizon, |_| pd(rng, m));
    }
    p
}

/// Fixed random suite; odd ids carry time-varying coefficients.
pub fn random_suite() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    (0..SUITE_SIZE)
        .map(|id| {
            let varying = id % 2 == 1;
            Case {
                id,
                varying,
                problem: random_problem(&mut rng, varying),
            }
        })
        .collect()
}

/// Constant coefficients, R = 0, F Hurwitz.
pub fn stationary_suite(count: usize) -> Vec<LqProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 0xffff);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=n);
            let k = rng.gen_range(1..=2 * n);
            let skew = uniform(&mut rng, n, n, 1.0);
            let f = (&skew - skew.transpose()) * 0.5 - pd(&mut rng, n);
            LqProblem::new(
                f,
                uniform(&mut rng, n, m, 1.0),
                Matrix::zeros(n, n),
                pd(&mut rng, m),
                uniform(&mut rng, k, n, 1.0),
                uniform(&mut rng, k, n, 1.0),
                uniform(&mut rng, k, 1, 1.0),
                0.0,
                rng.gen_range(0.5..2.0),
            )
            .unwrap()
        })
        .collect()
}

pub fn sup_distance(a: &[Vector], b: &[Vector]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).amax()).fold(0.0, f64::max)
}
