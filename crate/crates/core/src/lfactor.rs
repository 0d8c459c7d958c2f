//! Archimedean L-factors from Hodge numbers, zeta-regularized determinants
//! of ladder spectra, and the Birkhoff factorization of a nilpotent
//! monodromy.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::special::{gamma, hurwitz_zeta_with_derivative, is_gamma_pole, ln_gamma};

fn pole(factor: &str, s: C64) -> Error {
    Error::Domain(format!("{factor} has a pole at s = {s}"))
}

/// Γ_C(s) = (2π)^{−s} Γ(s).
pub fn gamma_c(s: C64) -> Result<C64> {
    if is_gamma_pole(s) {
        return Err(pole("Γ_C(s)", s));
    }
    Ok((-s * (2.0 * PI).ln()).exp() * gamma(s))
}

/// Γ_R(s) = 2^{−1/2} π^{−s/2} Γ(s/2).
pub fn gamma_r(s: C64) -> Result<C64> {
    if is_gamma_pole(s / 2.0) {
        return Err(pole("Γ_R(s)", s));
    }
    Ok(std::f64::consts::FRAC_1_SQRT_2 * (-s / 2.0 * PI.ln()).exp() * gamma(s / 2.0))
}

pub fn gamma_factors(s: C64) -> Result<(C64, C64)> {
    Ok((gamma_c(s)?, gamma_r(s)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Embedding {
    Complex,
    /// h^{p,+} and h^{p,−} for each p with 2p = weight.
    Real { splits: BTreeMap<i64, (u32, u32)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeData {
    pub weight: i64,
    pub h: BTreeMap<(i64, i64), u32>,
    pub embedding: Embedding,
}

impl HodgeData {
    pub fn new(weight: i64, h: BTreeMap<(i64, i64), u32>, embedding: Embedding) -> Result<Self> {
        for (&(p, q), &n) in &h {
            if p + q != weight {
                return domain(format!("h^{{{p},{q}}} does not have weight {weight}"));
            }
            if h.get(&(q, p)).copied().unwrap_or(0) != n {
                return domain(format!("h^{{{p},{q}}} ≠ h^{{{q},{p}}}"));
            }
        }
        if let Embedding::Real { splits } = &embedding {
            for (&p, &(plus, minus)) in splits {
                if plus + minus != h.get(&(p, p)).copied().unwrap_or(0) {
                    return domain(format!("h^{{{p},+}} + h^{{{p},−}} ≠ h^{{{p},{p}}}"));
                }
            }
            if weight % 2 == 0 && h.get(&(weight / 2, weight / 2)).copied().unwrap_or(0) > 0 && !splits.contains_key(&(weight / 2)) {
                return domain("real embedding needs the ± split of the middle Hodge number");
            }
        }
        Ok(Self { weight, h, embedding })
    }

    /// H¹ of a genus-g curve at a complex place.
    pub fn curve(g: u32) -> Self {
        let h = if g == 0 { BTreeMap::new() } else { BTreeMap::from([((1, 0), g), ((0, 1), g)]) };
        Self { weight: 1, h, embedding: Embedding::Complex }
    }

    pub fn dimension(&self) -> u64 {
        self.h.values().map(|&n| n as u64).sum()
    }
}

pub fn hodge_lfactor(hd: &HodgeData, s: C64) -> Result<C64> {
    let mut acc = C64::new(1.0, 0.0);
    let factor = |name: String, v: Result<C64>| v.map_err(|_| Error::Domain(format!("{name} has a pole at s = {s}")));
    match &hd.embedding {
        Embedding::Complex => {
            for (&(p, q), &n) in &hd.h {
                let k = p.min(q);
                acc *= factor(format!("Γ_C(s − {k}) from h^{{{p},{q}}}"), gamma_c(s - k as f64))?.powu(n);
            }
        }
        Embedding::Real { splits } => {
            for (&(p, q), &n) in &hd.h {
                if p < q {
                    acc *= factor(format!("Γ_C(s − {p}) from h^{{{p},{q}}}"), gamma_c(s - p as f64))?.powu(n);
                }
            }
            for (&p, &(plus, minus)) in splits {
                let x = s - p as f64;
                acc *= factor(format!("Γ_R(s − {p}) from h^{{{p},+}}"), gamma_r(x))?.powu(plus);
                acc *= factor(format!("Γ_R(s − {p} + 1) from h^{{{p},−}}"), gamma_r(x + 1.0))?.powu(minus);
            }
        }
    }
    Ok(acc)
}

/// Eigenvalues top − n for n ≥ 0, each with the given multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ladder {
    pub top: C64,
    pub multiplicity: u64,
}

/// Spectrum of T; determinants are of (s − T)/scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<(C64, u64)>,
    pub ladders: Vec<Ladder>,
    pub scale: f64,
}

impl Spectrum {
    pub fn empty() -> Self {
        Self { eigenvalues: Vec::new(), ladders: Vec::new(), scale: 1.0 }
    }

    pub fn union(&self, o: &Self) -> Result<Self> {
        if self.scale != o.scale {
            return Err(Error::Unsupported("union of spectra with different scales".into()));
        }
        let mut u = self.clone();
        u.eigenvalues.extend_from_slice(&o.eigenvalues);
        u.ladders.extend_from_slice(&o.ladders);
        Ok(u)
    }
}

/// det_∞((s − T)/c) = exp(−∂_z ζ(s, z)|_{z=0}), ζ(s, z) = Σ m_λ ((s − λ)/c)^{−z}.
///
/// A ladder with a = s − top contributes ζ = m c^z ζ_H(z, a), so its factor
/// is exp(−m[log c · ζ_H(0, a) + ζ_H′(0, a)]) with the Lerch values
/// ζ_H(0, a) = ½ − a and ζ_H′(0, a) = log Γ(a) − ½ log 2π.
pub fn regularized_det(sp: &Spectrum, s: C64) -> Result<C64> {
    if !(sp.scale > 0.0) {
        return domain("scale must be positive");
    }
    let lc = sp.scale.ln();
    let mut log_det = C64::new(0.0, 0.0);
    for &(lambda, m) in &sp.eigenvalues {
        let x = s - lambda;
        if x.norm() == 0.0 {
            return domain(format!("s = {s} is an eigenvalue"));
        }
        log_det += m as f64 * ((x / sp.scale).ln());
    }
    for l in &sp.ladders {
        let a = s - l.top;
        if a.re <= 0.0 && a.im == 0.0 {
            return Err(Error::Unsupported(format!("no closed-form continuation: s − λ meets the negative axis at a = {a}")));
        }
        let (z0, dz0) = lerch(a);
        log_det -= l.multiplicity as f64 * (lc * z0 + dz0);
    }
    Ok(log_det.exp())
}

/// (ζ_H(0, a), ζ_H′(0, a)) by Lerch's formula.
pub fn lerch(a: C64) -> (C64, C64) {
    (0.5 - a, ln_gamma(a) - 0.5 * (2.0 * PI).ln())
}

/// max deviation of the Lerch values from the Euler–Maclaurin continuation.
pub fn lerch_deviation(a: C64) -> f64 {
    let (z, dz) = hurwitz_zeta_with_derivative(C64::new(0.0, 0.0), a);
    let (lz, ldz) = lerch(a);
    (z - lz).norm().max((dz - ldz).norm())
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiSpectrum {
    /// (−n, 2g) for n = 0..n_max.
    pub listed: Vec<(i64, u64)>,
    pub truncated: bool,
    /// The full ladder {−n : n ≥ 0} scaled by 2π.
    pub full: Spectrum,
}

pub fn phi_spectrum(hd: &HodgeData, n_max: usize) -> Result<PhiSpectrum> {
    if hd.weight != 1 {
        return domain("expected weight 1 Hodge data");
    }
    let m = hd.dimension();
    let listed = (0..=n_max as i64).map(|n| (-n, m)).collect();
    let ladders = if m == 0 { Vec::new() } else { vec![Ladder { top: C64::new(0.0, 0.0), multiplicity: m }] };
    Ok(PhiSpectrum { listed, truncated: true, full: Spectrum { eigenvalues: Vec::new(), ladders, scale: 2.0 * PI } })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegdetCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub relative_error: f64,
    /// Largest gap between Lerch and Euler–Maclaurin at a = s.
    pub lerch_deviation: f64,
}

/// Γ_C(s)^{2g} against det_∞((s − Φ)/2π)^{−1} on H¹ of a genus-g curve.
pub fn verify_regdet_identity(g: u32, s: C64) -> Result<RegdetCheck> {
    if s.re <= 0.0 {
        return domain("need Re s > 0");
    }
    let hd = HodgeData::curve(g);
    let lhs = hodge_lfactor(&hd, s)?;
    let rhs = 1.0 / regularized_det(&phi_spectrum(&hd, 0)?.full, s)?;
    let relative_error = (lhs - rhs).norm() / lhs.norm();
    Ok(RegdetCheck { lhs, rhs, relative_error, lerch_deviation: lerch_deviation(s) })
}

#[derive(Clone, Debug, Serialize)]
pub struct Birkhoff {
    pub phi_minus: DMatrix<C64>,
    pub phi_plus: DMatrix<C64>,
    pub phi_mu: DMatrix<C64>,
    /// ‖(φ⁻)⁻¹φ⁺ − φ_μ‖.
    pub factorization_error: f64,
    /// μ^N = exp(log μ · N).
    pub phi_plus_at_zero: DMatrix<C64>,
}

fn nilpotency_index(n: &DMatrix<C64>) -> Result<usize> {
    if !n.is_square() {
        return domain("matrix must be square");
    }
    let d = n.nrows();
    let mut p = DMatrix::<C64>::identity(d, d);
    for k in 0..=d {
        if p.iter().all(|x| x.norm() < 1e-13) {
            return Ok(k);
        }
        p = &p * n;
    }
    domain("matrix is not nilpotent")
}

/// exp(tN), exact for nilpotent N of index k.
fn exp_nil(n: &DMatrix<C64>, k: usize, t: C64) -> DMatrix<C64> {
    let d = n.nrows();
    let mut acc = DMatrix::<C64>::identity(d, d);
    let mut term = DMatrix::<C64>::identity(d, d);
    for j in 1..k.max(1) {
        term = &term * n * (t / j as f64);
        acc += &term;
    }
    acc
}

/// φ⁻(z) = exp(−N/z), φ⁺(z) = exp(((μ^z − 1)/z)N), φ_μ(z) = exp((μ^z/z)N).
pub fn birkhoff_monodromy(n: &DMatrix<C64>, mu: f64, z: C64) -> Result<Birkhoff> {
    if !(mu > 0.0) {
        return domain("μ must be positive");
    }
    if z.norm() == 0.0 {
        return domain("z must be nonzero");
    }
    let k = nilpotency_index(n)?;
    let muz = (z * mu.ln()).exp();
    let phi_minus = exp_nil(n, k, -1.0 / z);
    let phi_plus = exp_nil(n, k, (muz - 1.0) / z);
    let phi_mu = exp_nil(n, k, muz / z);
    let inv_minus = exp_nil(n, k, 1.0 / z);
    let factorization_error = (&inv_minus * &phi_plus - &phi_mu).norm();
    let phi_plus_at_zero = exp_nil(n, k, C64::new(mu.ln(), 0.0));
    Ok(Birkhoff { phi_minus, phi_plus, phi_mu, factorization_error, phi_plus_at_zero })
}

/// d/dz φ⁻(1/z)^{−1} at z = 0: the linear coefficient of exp(zN).
pub fn birkhoff_residue(n: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    nilpotency_index(n)?;
    Ok(n.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn gamma_factor_values() {
        assert!((gamma_c(r(1.0)).unwrap() - 1.0 / (2.0 * PI)).norm() < 1e-15);
        assert!((gamma_c(r(2.0)).unwrap() - 1.0 / (4.0 * PI * PI)).norm() < 1e-15);
        let s = r(2.7);
        let d = gamma_r(s).unwrap() * gamma_r(s + 1.0).unwrap() / gamma_c(s).unwrap();
        assert!((d - 1.0).norm() < 1e-12);
        assert!(gamma_c(r(0.0)).is_err());
        assert!(gamma_r(r(-2.0)).is_err());
    }

    #[test]
    fn hodge_examples() {
        let s = C64::new(1.7, 0.4);
        let e = hodge_lfactor(&HodgeData::curve(1), s).unwrap();
        assert!((e - gamma_c(s).unwrap().powu(2)).norm() < 1e-14 * e.norm());
        let g3 = hodge_lfactor(&HodgeData::curve(3), s).unwrap();
        assert!((g3 - gamma_c(s).unwrap().powu(6)).norm() < 1e-13 * g3.norm());
        let point = HodgeData::new(0, BTreeMap::from([((0, 0), 1)]), Embedding::Real { splits: BTreeMap::from([(0, (1, 0))]) }).unwrap();
        assert_eq!(hodge_lfactor(&point, s).unwrap(), gamma_r(s).unwrap());
        let err = hodge_lfactor(&HodgeData::curve(1), r(-1.0)).unwrap_err();
        assert!(err.to_string().contains("Γ_C(s − 0)"));
    }

    #[test]
    fn hodge_validation() {
        assert!(HodgeData::new(1, BTreeMap::from([((1, 0), 2), ((0, 1), 1)]), Embedding::Complex).is_err());
        assert!(HodgeData::new(2, BTreeMap::from([((1, 0), 1), ((0, 1), 1)]), Embedding::Complex).is_err());
        let bad = Embedding::Real { splits: BTreeMap::from([(0, (1, 1))]) };
        assert!(HodgeData::new(0, BTreeMap::from([((0, 0), 1)]), bad).is_err());
    }

    #[test]
    fn determinant_examples() {
        let single = Spectrum { eigenvalues: vec![], ladders: vec![Ladder { top: r(0.0), multiplicity: 1 }], scale: 1.0 };
        let d = regularized_det(&single, r(2.0)).unwrap();
        assert!((d.re - (2.0 * PI).sqrt()).abs() < 1e-13);
        assert_eq!(regularized_det(&Spectrum::empty(), r(3.0)).unwrap(), r(1.0));
        let triple = Spectrum { ladders: vec![Ladder { top: r(0.0), multiplicity: 3 }], ..single.clone() };
        let d1 = regularized_det(&single, r(3.0)).unwrap();
        assert!((regularized_det(&triple, r(3.0)).unwrap() - d1.powu(3)).norm() < 1e-12);
        let bad = Spectrum { ladders: vec![Ladder { top: r(5.0), multiplicity: 1 }], ..single };
        assert!(matches!(regularized_det(&bad, r(2.0)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn finite_part_is_a_product() {
        let sp = Spectrum { eigenvalues: vec![(r(1.0), 2), (C64::new(0.0, 1.0), 1)], ladders: vec![], scale: 2.0 };
        let s = r(3.0);
        let want = ((s - 1.0) / 2.0).powu(2) * ((s - C64::new(0.0, 1.0)) / 2.0);
        assert!((regularized_det(&sp, s).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn phi_spectrum_shape() {
        let p = phi_spectrum(&HodgeData::curve(2), 3).unwrap();
        assert_eq!(p.listed, vec![(0, 4), (-1, 4), (-2, 4), (-3, 4)]);
        let p = phi_spectrum(&HodgeData::curve(1), 5).unwrap();
        assert!(p.listed.iter().all(|x| x.1 == 2));
        assert_eq!(p.listed.iter().map(|x| x.1).sum::<u64>(), 2 * 6);
        let bad = HodgeData::new(0, BTreeMap::from([((0, 0), 1)]), Embedding::Complex).unwrap();
        assert!(phi_spectrum(&bad, 3).is_err());
    }

    #[test]
    fn regdet_identity() {
        for g in 1..=3 {
            for s in [2.0, 2.5, 3.0] {
                let c = verify_regdet_identity(g, r(s)).unwrap();
                assert!(c.relative_error < 1e-8, "g={g} s={s}: {c:?}");
                assert!(c.lerch_deviation < 1e-10);
            }
        }
        let c = verify_regdet_identity(1, r(2.0)).unwrap();
        assert!((c.lhs.re - (2.0 * PI).powi(-4)).abs() < 1e-15);
        let c = verify_regdet_identity(0, r(2.0)).unwrap();
        assert_eq!((c.lhs, c.rhs), (r(1.0), r(1.0)));
    }

    #[test]
    fn birkhoff_examples() {
        let zero = DMatrix::<C64>::zeros(2, 2);
        let b = birkhoff_monodromy(&zero, 2.0, r(1.0)).unwrap();
        assert_eq!(b.phi_mu, DMatrix::identity(2, 2));
        let mut n = DMatrix::<C64>::zeros(2, 2);
        n[(0, 1)] = r(1.0);
        let b = birkhoff_monodromy(&n, 2.0, r(1.0)).unwrap();
        assert!(b.factorization_error < 1e-15);
        let b = birkhoff_monodromy(&n, 2.0, r(1e-6)).unwrap();
        assert!((&b.phi_plus - &b.phi_plus_at_zero).norm() < 1e-6);
        let far = birkhoff_monodromy(&n, 2.0, r(1e12)).unwrap();
        assert!((far.phi_minus - DMatrix::identity(2, 2)).norm() < 1e-11);
        assert_eq!(birkhoff_residue(&n).unwrap(), n);
        let mut bad = n.clone();
        bad[(1, 0)] = r(1.0);
        assert!(birkhoff_monodromy(&bad, 2.0, r(1.0)).is_err());
    }

    #[test]
    fn renormalization_group_is_a_power() {
        // φ⁺_{λμ}(0) = λ^N φ⁺_μ(0)
        let mut n = DMatrix::<C64>::zeros(3, 3);
        n[(0, 1)] = r(1.0);
        n[(1, 2)] = r(2.0);
        let (lambda, mu) = (3.0, 1.7);
        let a = birkhoff_monodromy(&n, lambda * mu, r(0.5)).unwrap().phi_plus_at_zero;
        let b = birkhoff_monodromy(&n, mu, r(0.5)).unwrap().phi_plus_at_zero;
        let rho = birkhoff_monodromy(&n, lambda, r(0.5)).unwrap().phi_plus_at_zero;
        assert!((a - rho * b).norm() < 1e-13);
    }

    proptest! {
        #[test]
        fn duplication(s in 0.1f64..20.0, t in -3.0f64..3.0) {
            let s = C64::new(s, t);
            let d = gamma_r(s).unwrap() * gamma_r(s + 1.0).unwrap() / gamma_c(s).unwrap();
            prop_assert!((d - 1.0).norm() < 1e-12);
        }

        #[test]
        fn lerch_matches_continuation(a in 0.5f64..5.0) {
            prop_assert!(lerch_deviation(r(a)) < 1e-10);
        }

        #[test]
        fn determinant_is_multiplicative(a in 0.0f64..2.0, b in -1.0f64..1.0, s in 1.5f64..4.0, k in 1u64..4) {
            let x = Spectrum { eigenvalues: vec![(r(b), 1)], ladders: vec![Ladder { top: r(a - 2.0), multiplicity: k }], scale: 1.3 };
            let y = Spectrum { eigenvalues: vec![], ladders: vec![Ladder { top: r(-a), multiplicity: 2 }], scale: 1.3 };
            let s = r(s);
            let u = regularized_det(&x.union(&y).unwrap(), s).unwrap();
            let p = regularized_det(&x, s).unwrap() * regularized_det(&y, s).unwrap();
            prop_assert!((u - p).norm() < 1e-11 * p.norm());
        }
    }
}
