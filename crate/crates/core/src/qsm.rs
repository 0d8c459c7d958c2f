//! Partition functions and KMS values of the Bost–Connes system and the
//! partition function of the GL₂ system.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::special::{hurwitz_zeta_real, zeta};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Truncated {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: u64,
}

/// Σ_{k≤K} k^{−β}, tail ≤ K^{1−β}/(β − 1).
pub fn bc_partition(beta: f64, k_max: u64) -> Result<Truncated> {
    if !(beta > 1.0) {
        return domain("need β > 1");
    }
    if k_max == 0 {
        return domain("need K ≥ 1");
    }
    let value = (1..=k_max).rev().map(|k| (k as f64).powf(-beta)).sum();
    Ok(Truncated { value, tail_bound: (k_max as f64).powf(1.0 - beta) / (beta - 1.0), terms: k_max })
}

/// σ(k) for k ≤ n by sieving over divisors.
pub fn divisor_sums(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut s = vec![0u64; n + 1];
    for d in 1..=n {
        for m in (d..=n).step_by(d) {
            s[m] += d as u64;
        }
    }
    s
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Gl2Partition {
    pub value: f64,
    pub tail_bound: f64,
    pub zeta_product: f64,
    pub zeta_error: f64,
    pub difference: f64,
}

impl Gl2Partition {
    pub fn agrees(&self) -> bool {
        self.difference.abs() <= self.tail_bound + self.zeta_error
    }
}

/// Σ_{k≤K} σ(k) k^{−β} against ζ(β)ζ(β−1).
pub fn gl2_partition(beta: f64, k_max: u64) -> Result<Gl2Partition> {
    if !(beta > 2.0) {
        return domain("need β > 2");
    }
    if !(3..=50_000_000).contains(&k_max) {
        return domain("need 3 ≤ K ≤ 5·10⁷");
    }
    let sigma = divisor_sums(k_max);
    let value: f64 = (1..=k_max as usize).rev().map(|k| sigma[k] as f64 * (k as f64).powf(-beta)).sum();
    // σ(k) ≤ k(1 + log k), and (1 + log x) x^{1−β} decreases for x ≥ 3
    let (k, b) = (k_max as f64, beta - 2.0);
    let tail_bound = k.powf(-b) * ((1.0 + k.ln()) / b + 1.0 / (b * b));
    let zeta_product = zeta(beta) * zeta(beta - 1.0);
    let zeta_error = 1e-13 * zeta_product;
    Ok(Gl2Partition { value, tail_bound, zeta_product, zeta_error, difference: zeta_product - value })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BcQuery {
    pub a: i64,
    pub b: u64,
    pub alpha: u64,
    pub beta: f64,
    pub k_max: u64,
}

impl BcQuery {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 1.0) {
            return domain("need β > 1 for the extremal KMS states");
        }
        if self.b == 0 || self.k_max == 0 {
            return domain("need b ≥ 1 and K ≥ 1");
        }
        if self.a.unsigned_abs().gcd(&self.b) != 1 && self.b != 1 {
            return domain("r = a/b must be in lowest terms");
        }
        if self.alpha.gcd(&self.b) != 1 {
            return domain("α must be a unit mod b");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BcValue {
    /// φ_{β,α}(e(a/b)), summed exactly over residues mod b.
    pub value: C64,
    /// The Gibbs sum truncated at K.
    pub truncated: C64,
    /// |value − truncated| ≤ K^{1−β}/((β − 1)ζ(β)).
    pub tail_bound: f64,
}

/// (1/ζ(β)) Σ_k e^{2πiαak/b} k^{−β}.
///
/// The exact value groups k by residue j mod b:
/// Σ_j e^{2πiαaj/b} b^{−β} ζ(β, j/b).
pub fn bc_kms_value(q: &BcQuery) -> Result<BcValue> {
    q.validate()?;
    let b = q.b;
    let z = zeta(q.beta);
    let phase = |k: u64| {
        let t = ((q.alpha as i128 * q.a as i128 * k as i128).rem_euclid(b as i128)) as f64 / b as f64;
        C64::from_polar(1.0, 2.0 * PI * t)
    };
    let mut value = C64::new(0.0, 0.0);
    for j in 1..=b {
        value += phase(j) * (b as f64).powf(-q.beta) * hurwitz_zeta_real(q.beta, j as f64 / b as f64);
    }
    let mut truncated = C64::new(0.0, 0.0);
    for k in (1..=q.k_max).rev() {
        truncated += phase(k) * (k as f64).powf(-q.beta);
    }
    let tail_bound = (q.k_max as f64).powf(1.0 - q.beta) / ((q.beta - 1.0) * z);
    Ok(BcValue { value: value / z, truncated: truncated / z, tail_bound })
}

/// Units mod b.
pub fn units(b: u64) -> Vec<u64> {
    if b == 1 {
        return vec![0];
    }
    (1..b).filter(|x| x.gcd(&b) == 1).collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AverageIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
}

/// Average of φ_{β,α}(e(a/b)) over α ∈ (ℤ/bℤ)* against
/// b^{−β} Π_{p|b} (1 − p^{β−1})/(1 − p^{−1}).
pub fn bc_low_temperature_identity(a: i64, b: u64, beta: f64, k_max: u64) -> Result<AverageIdentity> {
    let us = units(b);
    let mut acc = C64::new(0.0, 0.0);
    for &alpha in &us {
        acc += bc_kms_value(&BcQuery { a, b, alpha: alpha.max(1), beta, k_max })?.value;
    }
    let lhs = acc.re / us.len() as f64;
    let mut rhs = (b as f64).powf(-beta);
    for p in prime_factors(b) {
        let p = p as f64;
        rhs *= (1.0 - p.powf(beta - 1.0)) / (1.0 - 1.0 / p);
    }
    Ok(AverageIdentity { lhs, rhs, difference: lhs - rhs })
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn partition_is_zeta() {
        for (beta, z) in [(2.0, PI * PI / 6.0), (4.0, PI.powi(4) / 90.0)] {
            let p = bc_partition(beta, 10_000).unwrap();
            assert!(z - p.value > 0.0 && z - p.value <= p.tail_bound);
            assert!(p.tail_bound <= 10_000f64.powf(1.0 - beta) / (beta - 1.0));
        }
        assert!(bc_partition(1.0, 10).is_err());
    }

    #[test]
    fn divisor_sum_values() {
        let s = divisor_sums(12);
        assert_eq!(s[6], 12);
        assert_eq!(&s[1..=5], &[1, 3, 4, 7, 6]);
    }

    #[test]
    fn gl2_partition_is_zeta_product() {
        for beta in [3.0, 4.0] {
            let p = gl2_partition(beta, 100_000).unwrap();
            assert!(p.agrees(), "{p:?}");
            assert!(p.difference > 0.0);
        }
        let d: Vec<f64> = [100, 1000, 10_000].iter().map(|&k| gl2_partition(3.0, k).unwrap().difference).collect();
        assert!(d[0] > d[1] && d[1] > d[2]);
        assert!(gl2_partition(2.0, 100).is_err());
    }

    /// −η(β)/ζ(β) from the alternating series, independent of Hurwitz zeta.
    fn alternating(beta: f64) -> f64 {
        // pair consecutive terms; the remainder is below the next term
        let mut eta = 0.0;
        for k in (1..=2_000_000u64).rev() {
            let s = if k % 2 == 1 { 1.0 } else { -1.0 };
            eta += s * (k as f64).powf(-beta);
        }
        -eta / zeta(beta)
    }

    #[test]
    fn half_is_minus_one_half() {
        let v = bc_kms_value(&BcQuery { a: 1, b: 2, alpha: 1, beta: 2.0, k_max: 1000 }).unwrap();
        assert!((v.value.re + 0.5).abs() < 1e-10 && v.value.im.abs() < 1e-12);
        assert!((v.value - v.truncated).norm() <= v.tail_bound);
        assert!((alternating(2.0) + 0.5).abs() < 1e-10);
        assert!((alternating(3.0) - v_at(3.0)).abs() < 1e-10);
    }

    fn v_at(beta: f64) -> f64 {
        bc_kms_value(&BcQuery { a: 1, b: 2, alpha: 1, beta, k_max: 10 }).unwrap().value.re
    }

    #[test]
    fn trivial_phase_is_one() {
        let v = bc_kms_value(&BcQuery { a: 0, b: 1, alpha: 1, beta: 2.5, k_max: 10 }).unwrap();
        assert!((v.value - 1.0).norm() < 1e-14);
    }

    #[test]
    fn averaging_identity() {
        for b in 2..=5 {
            for beta in [1.5, 2.0, 3.0] {
                let r = bc_low_temperature_identity(1, b, beta, 100).unwrap();
                assert!(r.difference.abs() < 1e-10, "b={b} β={beta}: {r:?}");
            }
        }
        let r = bc_low_temperature_identity(1, 2, 2.0, 100).unwrap();
        assert!((r.rhs + 0.5).abs() < 1e-15);
        let r = bc_low_temperature_identity(0, 1, 2.0, 100).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-13 && (r.rhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_queries() {
        assert!(bc_kms_value(&BcQuery { a: 2, b: 4, alpha: 1, beta: 2.0, k_max: 10 }).is_err());
        assert!(bc_kms_value(&BcQuery { a: 1, b: 4, alpha: 2, beta: 2.0, k_max: 10 }).is_err());
        assert!(bc_kms_value(&BcQuery { a: 1, b: 4, alpha: 1, beta: 1.0, k_max: 10 }).is_err());
    }

    proptest! {
        #[test]
        fn kms_values_bounded_hermitian_and_equivariant(b in 2u64..30, a in 1i64..30, g in 1u64..30, beta in 1.2f64..5.0) {
            prop_assume!((a as u64).gcd(&b) == 1 && g.gcd(&b) == 1);
            let q = BcQuery { a, b, alpha: 1, beta, k_max: 50 };
            let v = bc_kms_value(&q).unwrap().value;
            prop_assert!(v.norm() <= 1.0 + 1e-12);
            let neg = bc_kms_value(&BcQuery { a: -a, ..q }).unwrap().value;
            prop_assert!((neg - v.conj()).norm() < 1e-12);
            let moved = bc_kms_value(&BcQuery { alpha: g, ..q }).unwrap().value;
            let reindexed = bc_kms_value(&BcQuery { a: (g as i64 * a) % b as i64, ..q }).unwrap().value;
            prop_assert!((moved - reindexed).norm() < 1e-12);
        }
    }
}
