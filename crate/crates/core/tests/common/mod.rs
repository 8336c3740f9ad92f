#![allow(dead_code)]

use rtforest::sequences::Prng;
use rtforest::{build_cdf, Cdf, Pmf};

pub fn below(rng: &mut Prng, n: usize) -> usize {
    ((rng.next_f64() * n as f64) as usize).min(n - 1)
}

/// Uniform, high-dynamic-range or sparse weights, chosen at random.
pub fn random_pmf(rng: &mut Prng, n: usize) -> Pmf {
    let style = below(rng, 3);
    let range = 1.0 + 40.0 * rng.next_f64();
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| match style {
                0 => rng.next_f64() + 1e-3,
                1 => (range * rng.next_f64()).exp2(),
                _ if rng.next_f64() < 0.25 => 0.0,
                _ => (8.0 * rng.next_f64()).exp2(),
            })
            .collect();
        if let Ok(p) = Pmf::new(w) {
            return p;
        }
    }
}

/// Strictly increasing CDF over a random positive pmf.
pub fn random_strict_cdf(rng: &mut Prng, n: usize) -> Cdf {
    loop {
        let w: Vec<f64> = (0..n).map(|_| (12.0 * rng.next_f64()).exp2()).collect();
        let cdf = build_cdf(&Pmf::new(w).unwrap());
        if rtforest::distribution::validate_strictly_increasing(&cdf) {
            return cdf;
        }
    }
}

/// Probe points: every bound and midpoint below 1, and `extra` uniform draws.
pub fn probe_points(cdf: &Cdf, rng: &mut Prng, extra: usize) -> Vec<f64> {
    let b = cdf.bounds();
    let mut xs: Vec<f64> = (0..cdf.len())
        .flat_map(|i| [b[i], 0.5 * (b[i] + b[i + 1])])
        .filter(|&x| x < 1.0)
        .collect();
    xs.extend((0..extra).map(|_| rng.next_f64()));
    xs
}
