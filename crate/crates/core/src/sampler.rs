//! Seeded sampling of `G(n, n, p)` with independent edge colors.
//!
//! Draw order: potential edges are visited row-major (`a` outer, `b` inner).
//! Each gets one uniform draw for inclusion; an included edge immediately
//! consumes one more uniform draw, mapped to a color by inverse CDF over the
//! alphas in index order. The generator is ChaCha8 seeded via
//! `seed_from_u64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Color, ColorSpec, ColoredBipartiteGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("edge probability {0} is outside [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("invalid sampling parameter: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleParams {
    pub n: usize,
    pub p: f64,
    pub colors: ColorSpec,
    pub seed: u64,
}

impl SampleParams {
    pub fn new(n: usize, p: f64, colors: ColorSpec, seed: u64) -> Result<Self, SampleError> {
        if n == 0 {
            return Err(SampleError::Domain("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(SampleError::OutOfUnitInterval(p));
        }
        Ok(SampleParams { n, p, colors, seed })
    }
}

/// `(ln n + omega) / (alpha_min * n)`.
pub fn threshold_p(n: usize, omega: f64, alpha_min: f64) -> Result<f64, SampleError> {
    if n < 2 {
        return Err(SampleError::Domain(format!("n = {n}, need n >= 2")));
    }
    if !(alpha_min > 0.0 && alpha_min <= 1.0) {
        return Err(SampleError::Domain(format!("alpha_min = {alpha_min} outside (0, 1]")));
    }
    let p = ((n as f64).ln() + omega) / (alpha_min * n as f64);
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(SampleError::OutOfUnitInterval(p))
    }
}

/// [`threshold_p`] clamped into `[0, 1]`; the flag reports whether clamping
/// happened. Sweeps far below the threshold push the formula negative.
pub fn threshold_p_clamped(n: usize, omega: f64, alpha_min: f64) -> Result<(f64, bool), SampleError> {
    match threshold_p(n, omega, alpha_min) {
        Ok(p) => Ok((p, false)),
        Err(SampleError::OutOfUnitInterval(p)) if p.is_finite() => Ok((p.clamp(0.0, 1.0), true)),
        Err(e) => Err(e),
    }
}

fn pick_color(u: f64, alphas: &[f64]) -> Color {
    let mut acc = 0.0;
    for (i, a) in alphas.iter().enumerate() {
        acc += a;
        if u < acc {
            return i + 1;
        }
    }
    // Rounding can leave the cumulative sum a hair under 1.
    alphas.len()
}

pub fn sample_graph(params: &SampleParams) -> ColoredBipartiteGraph {
    let n = params.n;
    let alphas = params.colors.alphas();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.gen::<f64>() < params.p {
                edges.push((a, b, pick_color(rng.gen::<f64>(), alphas)));
            }
        }
    }
    ColoredBipartiteGraph::new(n, alphas.len(), edges)
        .and_then(|g| g.with_alphas(&params.colors))
        .expect("sampled edges are in range and unique")
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn params(n: usize, p: f64, alphas: Vec<f64>, seed: u64) -> SampleParams {
        SampleParams::new(n, p, ColorSpec::new(alphas).unwrap(), seed).unwrap()
    }

    #[test]
    fn threshold_formula() {
        let p = threshold_p(1000, 2.0, 0.25).unwrap();
        assert!((p - (1000f64.ln() + 2.0) / 250.0).abs() < 1e-15);
        assert!((p - 0.035_631_0).abs() < 1e-7);
        assert!((threshold_p(1000, 0.0, 1.0).unwrap() - 0.006_907_8).abs() < 1e-7);
        assert!(matches!(threshold_p(2, 1000.0, 0.1), Err(SampleError::OutOfUnitInterval(_))));
        assert!(matches!(threshold_p(1, 0.0, 0.5), Err(SampleError::Domain(_))));
        assert!(matches!(threshold_p(10, 0.0, 0.0), Err(SampleError::Domain(_))));
        assert_eq!(threshold_p_clamped(1000, -20.0, 0.5).unwrap(), (0.0, true));
        assert_eq!(threshold_p_clamped(2, 1000.0, 0.1).unwrap(), (1.0, true));
    }

    #[test]
    fn degenerate_probabilities() {
        let g = sample_graph(&params(5, 0.0, vec![0.5, 0.5], 9));
        assert_eq!(g.edge_count(), 0);
        let g = sample_graph(&params(3, 1.0, vec![1.0], 9));
        assert_eq!(g.edge_count(), 9);
        assert!(g.edges().iter().all(|e| e.color == 1));
        assert!(SampleParams::new(3, 1.5, ColorSpec::uniform(1).unwrap(), 0).is_err());
        assert!(SampleParams::new(0, 0.5, ColorSpec::uniform(1).unwrap(), 0).is_err());
    }

    #[test]
    fn same_seed_same_graph() {
        let p = params(50, 0.2, vec![0.5, 0.25, 0.25], 77);
        assert_eq!(sample_graph(&p), sample_graph(&p));
        let other = params(50, 0.2, vec![0.5, 0.25, 0.25], 78);
        assert_ne!(sample_graph(&p), sample_graph(&other));
    }

    #[test]
    fn draw_order_is_row_major() {
        // Replay the documented draw order by hand.
        let p = params(6, 0.4, vec![0.3, 0.7], 5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut expected = Vec::new();
        for a in 0..6 {
            for b in 0..6 {
                if rng.gen::<f64>() < 0.4 {
                    let u: f64 = rng.gen();
                    expected.push((a, b, if u < 0.3 { 1 } else { 2 }));
                }
            }
        }
        let got: Vec<_> = sample_graph(&p).edges().iter().map(|e| (e.a, e.b, e.color)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn edge_count_matches_binomial_moments() {
        let (n, p, seeds) = (200usize, 0.1, 1000u64);
        let mean_expected = (n * n) as f64 * p;
        let sigma = ((n * n) as f64 * p * (1.0 - p)).sqrt();
        assert!((sigma - 60.0).abs() < 1e-9);
        let counts: Vec<f64> = (0..seeds)
            .map(|s| sample_graph(&params(n, p, vec![1.0], s)).edge_count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / seeds as f64;
        assert!((mean - mean_expected).abs() <= 3.0 * sigma, "mean {mean}");
        // The mean of 1000 draws has standard error sigma / sqrt(1000).
        assert!((mean - mean_expected).abs() <= 4.0 * sigma / (seeds as f64).sqrt(), "mean {mean}");
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
        assert!((var.sqrt() - sigma).abs() < 0.1 * sigma, "sd {}", var.sqrt());
    }

    #[test]
    fn color_frequencies_fit_alphas() {
        let alphas = vec![0.5, 0.3, 0.15, 0.05];
        let mut observed = [0f64; 4];
        let mut total = 0usize;
        let mut seed = 0;
        while total < 100_000 {
            let g = sample_graph(&params(100, 0.5, alphas.clone(), seed));
            for e in g.edges() {
                observed[e.color - 1] += 1.0;
            }
            total += g.edge_count();
            seed += 1;
        }
        let stat: f64 = observed
            .iter()
            .zip(&alphas)
            .map(|(o, a)| {
                let e = a * total as f64;
                (o - e).powi(2) / e
            })
            .sum();
        let critical = ChiSquared::new(3.0).unwrap().inverse_cdf(1.0 - 0.001);
        assert!(stat < critical, "chi-square {stat} >= {critical}");
    }

    #[test]
    fn inverse_cdf_boundaries() {
        let alphas = [0.5, 0.25, 0.25];
        assert_eq!(pick_color(0.0, &alphas), 1);
        assert_eq!(pick_color(0.4999, &alphas), 1);
        assert_eq!(pick_color(0.5, &alphas), 2);
        assert_eq!(pick_color(0.75, &alphas), 3);
        assert_eq!(pick_color(0.999_999_999_999, &alphas), 3);
    }
}
