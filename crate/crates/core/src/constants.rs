//! Asymptotic constants of the structural argument, evaluated at a concrete
//! `n`. All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::audit::AuditError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub n: usize,
    pub q: usize,
    pub alpha_min: f64,
    /// `10 ln(e q)`: set-size coefficient of the low-degree and
    /// high-degree-into-small-set events.
    pub beta: f64,
    pub beta_prime: f64,
    pub beta_double_prime: f64,
    /// Degree cap `10 ln n / ln ln n`.
    pub k0: f64,
    /// Minimum same-color degree into the matched class, `ln n / (10 q)`.
    pub deg_threshold: f64,
    /// `delta * alpha_min^2 / 8`, the small-set size coefficient.
    pub gamma: f64,
    /// Free coefficient for the balanced dense-cut event.
    pub gamma_lemma3: f64,
    pub delta: f64,
    /// Required layer growth `ln n / (25 q)`.
    pub expansion_factor: f64,
    /// Layers at most this large must grow: `alpha_min^2 n / (200 q ln n)`.
    pub lm_size_bound: f64,
    /// Layer size that ends the expansion: `alpha_min^2 n / (5000 q^2)`.
    pub stop_size: f64,
}

impl AsymptoticConstants {
    /// Lower bound on `|R_0| / |A_1|`: `1 - beta'' / ln n`.
    pub fn r0_fraction_bound(&self) -> f64 {
        1.0 - self.beta_double_prime / (self.n as f64).ln()
    }

    /// Lower bound on `|N(a) ∩ M(R_0)|` for `a ∈ R_0`.
    pub fn r0_degree_bound(&self) -> f64 {
        self.deg_threshold - self.k0
    }
}

pub fn default_constants(n: usize, q: usize, alpha_min: f64, delta: f64, gamma_lemma3: f64) -> Result<AsymptoticConstants, AuditError> {
    if n < 3 {
        return Err(AuditError::Domain(format!("n = {n}: ln ln n needs n >= 3")));
    }
    if q == 0 {
        return Err(AuditError::Domain("q must be positive".into()));
    }
    if !(alpha_min > 0.0 && alpha_min <= 1.0) {
        return Err(AuditError::Domain(format!("alpha_min = {alpha_min} outside (0, 1]")));
    }
    if !(delta > 0.0 && gamma_lemma3 > 0.0) {
        return Err(AuditError::Domain("delta and gamma must be positive".into()));
    }
    let nf = n as f64;
    let qf = q as f64;
    let ln_n = nf.ln();
    let beta = 10.0 * (std::f64::consts::E * qf).ln();
    Ok(AsymptoticConstants {
        n,
        q,
        alpha_min,
        beta,
        beta_prime: beta + 1.0,
        beta_double_prime: beta + 2.0,
        k0: 10.0 * ln_n / ln_n.ln(),
        deg_threshold: ln_n / (10.0 * qf),
        gamma: delta * alpha_min * alpha_min / 8.0,
        gamma_lemma3,
        delta,
        expansion_factor: ln_n / (25.0 * qf),
        lm_size_bound: alpha_min * alpha_min * nf / (200.0 * qf * ln_n),
        stop_size: alpha_min * alpha_min * nf / (5000.0 * qf * qf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let c = default_constants(16, 2, 0.5, 10.0, 2.0).unwrap();
        let ln16 = 16f64.ln();
        assert!((c.k0 - 10.0 * ln16 / ln16.ln()).abs() < 1e-12);
        assert!((c.k0 - 27.188).abs() < 1e-3, "k0 = {}", c.k0);
        assert!((c.beta - 10.0 * (1.0 + 2f64.ln())).abs() < 1e-12);
        assert!((c.beta_prime - c.beta - 1.0).abs() < 1e-12);
        assert!((c.beta_double_prime - c.beta_prime - 1.0).abs() < 1e-12);
        assert!((c.gamma - 10.0 * 0.25 / 8.0).abs() < 1e-12);
        assert!((c.deg_threshold - ln16 / 20.0).abs() < 1e-12);
        let one = default_constants(100, 1, 1.0, 1.0, 1.0).unwrap();
        assert!((one.beta - 10.0).abs() < 1e-12);
        assert!(matches!(default_constants(2, 2, 0.5, 1.0, 1.0), Err(AuditError::Domain(_))));
        assert!(default_constants(3, 2, 0.5, 1.0, 1.0).is_ok());
        assert!(default_constants(10, 2, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn all_positive() {
        for n in [3, 16, 1000, 100_000] {
            for q in 1..5 {
                let c = default_constants(n, q, 1.0 / q as f64, 10.0, 1.0).unwrap();
                for v in [
                    c.beta,
                    c.beta_prime,
                    c.beta_double_prime,
                    c.k0,
                    c.deg_threshold,
                    c.gamma,
                    c.gamma_lemma3,
                    c.delta,
                    c.expansion_factor,
                    c.stop_size,
                    c.lm_size_bound,
                ] {
                    assert!(v > 0.0);
                }
            }
        }
    }
}
