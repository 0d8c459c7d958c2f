//! The dynamical cohomology of the shift on the limit set of a genus g
//! Schottky group, and the spectrum of the associated Dirac operator.
//!
//! 𝒫_n is the free module of functions of the first n + 1 letters of an
//! admissible sequence, of rank θ_n = 2g(2g−1)^n. With T the shift,
//! F_0 = 𝒫_0 and F_n = 𝒫_n / (1 − T)𝒫_{n−1}.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::linalg::{smith_invariants, IntMatrix};

#[derive(Clone, Debug, Serialize)]
pub struct SolenoidLevel {
    pub n: usize,
    pub rank: u128,
    /// Rank of the cokernel of 1 − T by Smith normal form, when small enough.
    pub rank_computed: Option<u128>,
    pub torsion_free: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolenoidRanks {
    pub genus: usize,
    pub levels: Vec<SolenoidLevel>,
}

/// θ_n = 2g(2g−1)^n.
pub fn theta(g: usize, n: usize) -> u128 {
    let mut t = 2 * g as u128;
    for _ in 0..n {
        t = t.saturating_mul(2 * g as u128 - 1);
    }
    t
}

/// rank F_0 = 2g, rank F_n = 2g(2g−1)^{n−1}(2g−2) + 1.
pub fn solenoid_rank(g: usize, n: usize) -> u128 {
    if n == 0 {
        theta(g, 0)
    } else {
        theta(g, n - 1).saturating_mul(2 * g as u128 - 2).saturating_add(1)
    }
}

/// Admissible words of length n + 1 over letters 0..2g, where letter
/// i + g is the inverse of letter i.
fn words(g: usize, n: usize) -> Vec<Vec<usize>> {
    let inv = |x: usize| (x + g) % (2 * g);
    let mut out: Vec<Vec<usize>> = (0..2 * g).map(|x| vec![x]).collect();
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (2 * g - 1));
        for w in &out {
            let last = *w.last().expect("nonempty");
            for x in (0..2 * g).filter(|&x| x != inv(last)) {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// The matrix of 1 − T : 𝒫_{n−1} → 𝒫_n on cylinder indicators.
pub fn coboundary_matrix(g: usize, n: usize) -> IntMatrix {
    let rows = words(g, n);
    let cols = words(g, n - 1);
    let index: std::collections::HashMap<&[usize], usize> = cols.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut m = vec![vec![0i128; cols.len()]; rows.len()];
    for (i, v) in rows.iter().enumerate() {
        // χ_w(v) = [v starts with w], (χ_w ∘ T)(v) = [v without its first letter is w]
        m[i][index[&v[..n]]] += 1;
        m[i][index[&v[1..]]] -= 1;
    }
    m
}

/// Largest θ_n for which the Smith form is computed.
pub const EXPLICIT_LIMIT: u128 = 400;

pub fn solenoid_ranks(g: usize, n_max: usize) -> Result<SolenoidRanks> {
    if !(1..=60).contains(&g) {
        return domain("genus must be between 1 and 60");
    }
    let mut levels = Vec::new();
    for n in 0..=n_max {
        let rank = solenoid_rank(g, n);
        let (rank_computed, torsion_free) = if n == 0 {
            (Some(theta(g, 0)), Some(true))
        } else if g >= 2 && theta(g, n) <= EXPLICIT_LIMIT {
            let inv = smith_invariants(&coboundary_matrix(g, n))?;
            (Some(theta(g, n) - inv.len() as u128), Some(inv.iter().all(|&d| d == 1)))
        } else {
            (None, None)
        };
        levels.push(SolenoidLevel { n, rank, rank_computed, torsion_free });
    }
    Ok(SolenoidRanks { genus: g, levels })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracLevel {
    pub n: usize,
    /// dim of the n-th graded piece 𝒫_n ⊖ 𝒫_{n−1}.
    pub multiplicity: u128,
    /// Eigenvalue on the first copy; the second copy carries −n.
    pub eigenvalue: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracSpectrum {
    pub genus: usize,
    pub levels: Vec<DiracLevel>,
    pub t: f64,
    /// Σ over both copies of mult · e^{−tλ²} for levels ≤ n_max.
    pub theta_partial: f64,
    pub theta_tail_bound: f64,
    /// (p, Σ mult · |λ|^{−p} over λ ≠ 0 up to each level).
    pub zeta_partial_sums: Vec<(f64, Vec<f64>)>,
}

pub fn dirac_multiplicity(g: usize, n: usize) -> u128 {
    if n == 0 {
        theta(g, 0)
    } else {
        theta(g, n - 1).saturating_mul(2 * g as u128 - 2)
    }
}

pub fn dirac_spectrum(g: usize, n_max: usize, t: f64) -> Result<DiracSpectrum> {
    if !(1..=60).contains(&g) {
        return domain("genus must be between 1 and 60");
    }
    if !(t > 0.0) {
        return domain("heat parameter must be positive");
    }
    let levels: Vec<DiracLevel> =
        (0..=n_max).map(|n| DiracLevel { n, multiplicity: dirac_multiplicity(g, n), eigenvalue: n as i64 + 1 }).collect();
    let mut theta_partial = 0.0;
    for l in &levels {
        let n = l.n as f64;
        theta_partial += l.multiplicity as f64 * ((-t * (n + 1.0).powi(2)).exp() + (-t * n * n).exp());
    }
    // both copies: ≤ 2 · 2g(2g−1)^n e^{−tn²}, with ratio (2g−1)e^{−t(2n+1)}
    let k = (2 * g - 1) as f64;
    let n1 = (n_max + 1) as f64;
    let first = 4.0 * g as f64 * (n1 * k.ln() - t * n1 * n1).exp();
    let r = k * (-t * (2.0 * n1 + 1.0)).exp();
    let theta_tail_bound = if r < 1.0 { first / (1.0 - r) } else { f64::INFINITY };
    let zeta_partial_sums = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&p| {
            let mut acc = 0.0;
            let sums = levels
                .iter()
                .map(|l| {
                    let n = l.n as f64;
                    let m = l.multiplicity as f64;
                    acc += m * (n + 1.0).powf(-p);
                    if l.n > 0 {
                        acc += m * n.powf(-p);
                    }
                    acc
                })
                .collect();
            (p, sums)
        })
        .collect();
    Ok(DiracSpectrum { genus: g, levels, t, theta_partial, theta_tail_bound, zeta_partial_sums })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_ranks() {
        let r = solenoid_ranks(2, 4).unwrap();
        let ranks: Vec<u128> = r.levels.iter().map(|l| l.rank).collect();
        assert_eq!(ranks, vec![4, 9, 25, 73, 217]);
        for l in &r.levels {
            assert_eq!(l.rank_computed, Some(l.rank), "level {}", l.n);
            assert_eq!(l.torsion_free, Some(true));
        }
    }

    #[test]
    fn genus_three_first_level() {
        let r = solenoid_ranks(3, 2).unwrap();
        assert_eq!(r.levels[1].rank, 25);
        assert_eq!(r.levels[1].rank_computed, Some(25));
        assert_eq!(r.levels[2].rank_computed, Some(r.levels[2].rank));
    }

    #[test]
    fn rank_is_successive_difference_plus_one() {
        for g in 2..6 {
            for n in 1..6 {
                assert_eq!(solenoid_rank(g, n), theta(g, n) - theta(g, n - 1) + 1);
            }
        }
    }

    #[test]
    fn coboundary_kills_only_constants() {
        let m = coboundary_matrix(2, 1);
        assert_eq!(m.len(), 12);
        assert_eq!(crate::linalg::integer_kernel(&m, 4).unwrap().len(), 1);
    }

    #[test]
    fn dirac_levels() {
        let d = dirac_spectrum(2, 10, 1.0).unwrap();
        let m: Vec<u128> = d.levels.iter().take(4).map(|l| l.multiplicity).collect();
        assert_eq!(m, vec![4, 8, 24, 72]);
        assert!(d.theta_tail_bound < 1e-12);
        // level dimensions add up to θ_n
        let total: u128 = d.levels.iter().take(4).map(|l| l.multiplicity).sum();
        assert_eq!(total, theta(2, 3));
        // zeta sums keep growing for every p: no finite summability degree
        for (_, s) in &d.zeta_partial_sums {
            let n = s.len();
            assert!(s[n - 1] - s[n - 2] > s[n - 2] - s[n - 3]);
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(solenoid_ranks(0, 2).is_err());
        assert!(dirac_spectrum(2, 3, 0.0).is_err());
    }
}
