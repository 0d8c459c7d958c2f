//! Two evaluations of the Lévy identity
//!
//!   ∫₀¹ Σ_k f(q_k(α), q_{k−1}(α)) dα = Σ′ f(q, q′) / (q(q + q′)).
//!
//! The left side is a stratified Monte Carlo integral over exact rational
//! sample points; the right side enumerates coprime pairs. On the right,
//! a pair with q′ < q is the last step of the two continued fractions of
//! q′/q (ending in a digit ≥ 2 or in 1), so it carries weight 2; the pair
//! (1, 1) comes from the first digit being 1 only and carries weight 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Result};

const GOLDEN: f64 = 1.618_033_988_749_895;

/// |f(q, q′)| ≤ constant · q^{−exponent}.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Decay {
    pub exponent: f64,
    pub constant: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LevyConfig {
    /// Number of equal strata of [0,1]; two jittered samples each.
    pub strata: u64,
    /// Denominators beyond this are dropped from the left side.
    pub depth: u64,
    /// Largest q enumerated on the right side.
    pub cutoff: u64,
    pub seed: u64,
}

impl Default for LevyConfig {
    fn default() -> Self {
        Self { strata: 1 << 19, depth: 1_000_000, cutoff: 2000, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LevySides {
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs: f64,
    pub rhs_error: f64,
}

impl LevySides {
    pub fn agree(&self) -> bool {
        (self.lhs - self.rhs).abs() <= self.lhs_error + self.rhs_error
    }
}

/// Sample points are a/b with b = strata · RESOLUTION.
const RESOLUTION: u64 = 1_000_003;

/// Σ_{k : q_k ≤ depth} f(q_k, q_{k−1}) for α = a/b, by exact Euclid.
fn convergent_sum(f: &dyn Fn(u64, u64) -> f64, mut a: u64, mut b: u64, depth: u64) -> f64 {
    // α = a/b in (0,1); digits k = ⌊b/a⌋
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut acc = 0.0;
    while a != 0 {
        let k = b / a;
        let r = b % a;
        let Some(next) = k.checked_mul(q).and_then(|x| x.checked_add(q_prev)) else { break };
        if next > depth {
            break;
        }
        q_prev = q;
        q = next;
        acc += f(q, q_prev);
        b = a;
        a = r;
    }
    acc
}

pub fn levy_average(f: &dyn Fn(u64, u64) -> f64, decay: Decay, cfg: &LevyConfig) -> Result<LevySides> {
    if !(decay.exponent > 1.0) {
        return domain("declared decay exponent must exceed 1 for absolute convergence");
    }
    if !(decay.constant >= 0.0) || cfg.strata == 0 || cfg.depth < 2 || cfg.cutoff == 0 {
        return domain("invalid Lévy configuration");
    }
    let s = decay.exponent;

    let b = cfg.strata.checked_mul(RESOLUTION).ok_or(crate::Error::Overflow)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sum = 0.0;
    let mut var = 0.0;
    for j in 0..cfg.strata {
        let mut g = [0.0; 2];
        for gi in &mut g {
            let a = j * RESOLUTION + rng.random_range(1..RESOLUTION);
            *gi = convergent_sum(f, a, b, cfg.depth);
        }
        sum += g[0] + g[1];
        var += (g[0] - g[1]).powi(2) / 2.0;
    }
    let m = cfg.strata as f64;
    let lhs = sum / (2.0 * m);
    // within-stratum variance s_j², estimator variance Σ s_j² / (2 m²)
    let sd = (var / (2.0 * m * m)).sqrt();
    // q_{k+j} ≥ φ^{j−1} q_k past the depth
    let trunc = decay.constant * (cfg.depth as f64).powf(-s) * GOLDEN.powf(s) / (1.0 - GOLDEN.powf(-s));

    let mut rhs = 0.0;
    for q in 1..=cfg.cutoff {
        for qp in 1..=q {
            if num_integer::gcd(q, qp) != 1 {
                continue;
            }
            let weight = if qp < q { 2.0 } else { 1.0 };
            rhs += weight * f(q, qp) / (q as f64 * (q + qp) as f64);
        }
    }
    // Σ_{q>Q} 2 C q^{−s} Σ_{q′<q} 1/(q(q+q′)) ≤ 2 C log 2 Σ_{q>Q} q^{−s−1}
    let rhs_error = 2.0 * decay.constant * (cfg.cutoff as f64).powf(-s) / s + rhs.abs() * 1e-14;

    Ok(LevySides { lhs, lhs_error: 3.0 * sd + trunc + lhs.abs() * 1e-14, rhs, rhs_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LevyConfig {
        LevyConfig { strata: 1 << 14, depth: 100_000, cutoff: 400, seed: 7 }
    }

    #[test]
    fn zero_function_gives_zero() {
        let r = levy_average(&|_, _| 0.0, Decay { exponent: 2.0, constant: 0.0 }, &small()).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn indicator_of_q_one_is_one_half() {
        let f = |q: u64, _| if q == 1 { 1.0 } else { 0.0 };
        let r = levy_average(&f, Decay { exponent: 2.0, constant: 1.0 }, &small()).unwrap();
        assert_eq!(r.rhs, 0.5);
        // q_k = 1 happens only for k = 1 with first digit 1, i.e. α ∈ (1/2, 1)
        assert!((r.lhs - 0.5).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn indicator_of_q_two_is_one_third() {
        let f = |q: u64, _| if q == 2 { 1.0 } else { 0.0 };
        let r = levy_average(&f, Decay { exponent: 2.0, constant: 4.0 }, &small()).unwrap();
        assert!((r.rhs - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.lhs - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn cube_decay_agrees() {
        let f = |q: u64, _| (q as f64).powi(-3);
        let r = levy_average(&f, Decay { exponent: 3.0, constant: 1.0 }, &small()).unwrap();
        assert!(r.agree(), "{r:?}");
    }

    #[test]
    fn slow_decay_rejected() {
        assert!(levy_average(&|_, _| 1.0, Decay { exponent: 1.0, constant: 1.0 }, &small()).is_err());
    }

    #[test]
    fn rational_sum_is_exact() {
        // 2/5 = [0; 2, 2]: q = 2, 5
        let got = convergent_sum(&|q, qp| (q * 10 + qp) as f64, 2, 5, 100);
        assert_eq!(got, 21.0 + 52.0);
    }
}
