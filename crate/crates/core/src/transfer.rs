//! Galerkin truncations of the Gauss-map transfer operator
//!
//! (L_σ f)(x, t) = Σ_{k≥1} (x+k)^{−2σ} f(1/(x+k), ((0,1),(1,k))·t)
//!
//! in the Taylor basis (x − x₀)^m, together with the spectral quantities
//! built on top of it: Lyapunov exponent, Gauss–Kuzmin convergence,
//! Fredholm determinants and the dimension of bounded-digit Cantor sets.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::contfrac::CosetSpace;
use crate::error::{domain, Error, Result};
use crate::linalg::{determinant, eigenvalues, eigenvector, CMatrix};
use crate::special::{hurwitz_zeta, rising_binomial};

/// Default expansion point: the fixed point (√5−1)/2 of the branch
/// z ↦ 1/(z+1). Every branch z ↦ 1/(z+k) maps the disc of radius
/// `INVARIANT_RADIUS` around it strictly into itself, so the truncation
/// converges geometrically.
pub const DEFAULT_X0: f64 = 0.618_033_988_749_894_8;

/// Radius ρ of the invariant disc around `DEFAULT_X0`: ρ > x₀ and
/// (x₀+ρ)(1+x₀−ρ) > 1.
pub const INVARIANT_RADIUS: f64 = 0.7;

/// Branches k ≤ this are composed as explicit power series; the rest go
/// through Hurwitz zeta values. Expanding (1/(x+k) − x₀)^m binomially
/// cancels catastrophically for small k, so the closed form is only used
/// where 1/(x+k) is small.
/// Expansion point for the Gauss–Kuzmin iteration: centering at 1/2 keeps
/// |x − x₀| ≤ 1/2 on the whole unit interval.
pub const GAUSS_KUZMIN_X0: f64 = 0.5;

const EXPLICIT_BRANCHES: u64 = 48;

/// Relative spectral gap below which the leading eigenvalue is not
/// considered simple.
pub const GAP_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum Variant {
    Full,
    /// Skew product over ℙ¹(ℤ/N).
    Coset(u64),
    /// Digits restricted to 1..=D.
    Hensley(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferSpec {
    #[serde(serialize_with = "ser_c64")]
    pub sigma: C64,
    pub variant: Variant,
    pub dim: usize,
    pub x0: f64,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

impl TransferSpec {
    pub fn new(sigma: f64, variant: Variant, dim: usize) -> Self {
        Self { sigma: C64::new(sigma, 0.0), variant, dim, x0: DEFAULT_X0 }
    }

    pub fn complex(sigma: C64, variant: Variant, dim: usize) -> Self {
        Self { sigma, variant, dim, x0: DEFAULT_X0 }
    }

    pub fn at(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return domain("basis dimension must be positive");
        }
        if !(0.0..1.0).contains(&self.x0) {
            return domain("expansion point must lie in [0, 1)");
        }
        match self.variant {
            Variant::Full | Variant::Coset(_) => {
                if 2.0 * self.sigma.re <= 1.0 {
                    return domain("the full k-sum needs Re(2σ) > 1");
                }
            }
            Variant::Hensley(d) => {
                if d == 0 {
                    return domain("digit bound must be at least 1");
                }
            }
        }
        if let Variant::Coset(0) = self.variant {
            return domain("coset modulus must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub spec: TransferSpec,
    pub entries: CMatrix,
    pub blocks: usize,
    pub space: Option<CosetSpace>,
}

pub fn build_matrix(spec: &TransferSpec) -> Result<TransferMatrix> {
    spec.validate()?;
    let m = spec.dim;
    let x0 = spec.x0;
    let w0 = spec.sigma * 2.0;
    let space = match spec.variant {
        Variant::Coset(n) => Some(CosetSpace::new(n)?),
        _ => None,
    };
    let blocks = space.as_ref().map_or(1, |p| p.len());
    let modulus = match spec.variant {
        Variant::Coset(n) => n,
        _ => 1,
    };
    let explicit = match spec.variant {
        Variant::Hensley(d) => d,
        _ => EXPLICIT_BRANCHES,
    };

    // one m×m block per residue class of k mod N
    let mut per_residue = vec![vec![vec![C64::new(0.0, 0.0); m]; m]; modulus as usize];
    for k in 1..=explicit {
        let blk = &mut per_residue[(k % modulus) as usize];
        add_branch_series(blk, x0 + k as f64, w0, x0, m);
    }
    if !matches!(spec.variant, Variant::Hensley(_)) {
        let c = pascal(m);
        let nf = modulus as f64;
        for r in 0..modulus {
            // first k > explicit with k ≡ r, then k, k+N, k+2N, ...
            let start = explicit + 1 + (r + modulus - (explicit + 1) % modulus) % modulus;
            let a = C64::new((x0 + start as f64) / nf, 0.0);
            let z: Vec<C64> = (0..2 * m)
                .map(|i| {
                    let w = w0 + i as f64;
                    (-w * nf.ln()).exp() * hurwitz_zeta(w, a)
                })
                .collect();
            let tail = tail_block(&z, w0, x0, m, &c)?;
            let blk = &mut per_residue[r as usize];
            for j in 0..m {
                for mm in 0..m {
                    blk[j][mm] += tail[j][mm];
                }
            }
        }
    }

    let mut a = CMatrix::zeros(m * blocks, m * blocks);
    for (r, blk) in per_residue.iter().enumerate() {
        for t in 0..blocks {
            let s = space.as_ref().map_or(0, |p| p.digit_act(r as u64, t));
            for j in 0..m {
                for mm in 0..m {
                    a[(t * m + j, s * m + mm)] += blk[j][mm];
                }
            }
        }
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical(format!(
            "matrix entries overflowed at dimension {m}; use a smaller basis (at most 64)"
        )));
    }
    Ok(TransferMatrix { spec: *spec, entries: a, blocks, space })
}

/// Adds the Taylor coefficients at x₀ of (x+k)^{−w}(1/(x+k) − x₀)^m, with
/// a = x₀ + k, for all columns m, by power-series composition in y = x − x₀.
fn add_branch_series(blk: &mut [Vec<C64>], a: f64, w: C64, x0: f64, m: usize) {
    let la = a.ln();
    let base = (-w * la).exp();
    let mut p: Vec<C64> = (0..m)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            base * rising_binomial(w, j) * (sign * a.powi(-(j as i32)))
        })
        .collect();
    let u: Vec<f64> = (0..m)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign * a.powi(-(j as i32) - 1);
            if j == 0 { c - x0 } else { c }
        })
        .collect();
    for mm in 0..m {
        for j in 0..m {
            blk[j][mm] += p[j];
        }
        if mm + 1 < m {
            let mut q = vec![C64::new(0.0, 0.0); m];
            for (i, pi) in p.iter().enumerate() {
                for (l, ul) in u.iter().enumerate().take(m - i) {
                    q[i + l] += pi * ul;
                }
            }
            p = q;
        }
    }
}

fn pascal(m: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; m + 1]; m + 1];
    for i in 0..=m {
        c[i][0] = 1.0;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + if j < i { c[i - 1][j] } else { 0.0 };
        }
    }
    c
}

/// Tail branches through their zeta sums Z(w) = Σ_k (x₀+k)^{−w}:
/// entry (j, m) = Σ_l C(m,l)(−x₀)^{m−l} (−1)^j C(w₀+l+j−1, j) Z(w₀+l+j).
fn tail_block(z: &[C64], w0: C64, x0: f64, m: usize, c: &[Vec<f64>]) -> Result<Vec<Vec<C64>>> {
    let mut g = vec![vec![C64::new(0.0, 0.0); m]; m];
    for (l, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *v = rising_binomial(w0 + l as f64, j) * z[l + j] * sign;
        }
    }
    let mut out = vec![vec![C64::new(0.0, 0.0); m]; m];
    for (j, row) in out.iter_mut().enumerate() {
        for (mm, v) in row.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..=mm {
                acc += g[l][j] * (c[mm][l] * (-x0).powi((mm - l) as i32));
            }
            if !acc.re.is_finite() || !acc.im.is_finite() {
                return Err(Error::Numerical(format!("tail entry ({j},{mm}) overflowed")));
            }
            *v = acc;
        }
    }
    Ok(out)
}

/// Row norms, per block-local row index, of the matrix in the rescaled
/// basis ((x − x₀)/ρ)^m. On an invariant disc these decay geometrically.
pub fn trailing_row_norms(t: &TransferMatrix, rho: f64) -> Vec<f64> {
    let m = t.spec.dim;
    (0..m)
        .map(|j| {
            let mut s = 0.0;
            for b in 0..t.blocks {
                for c in 0..t.entries.ncols() {
                    let scale = rho.powi(j as i32 - (c % m) as i32);
                    s += (t.entries[(b * m + j, c)] * scale).norm_sqr();
                }
            }
            s.sqrt()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    #[serde(skip)]
    pub eigenvalues: Vec<C64>,
}

/// A real disc around x₀ mapped into itself by z ↦ 1/(z+1) and containing
/// the images near 0 exists only for x₀ ≥ 1/2; below that the truncated
/// spectrum diverges with the dimension.
fn check_spectral_point(t: &TransferMatrix) -> Result<()> {
    if t.spec.x0 < 0.5 {
        return domain("expansion point below 1/2 has no invariant disc; the truncated spectrum does not converge");
    }
    Ok(())
}

pub fn spectrum(t: &TransferMatrix) -> Result<Spectrum> {
    check_spectral_point(t)?;
    Ok(Spectrum { eigenvalues: eigenvalues(&t.entries)? })
}

#[derive(Clone, Debug, Serialize)]
pub struct TopEigen {
    pub lambda: f64,
    /// Taylor coefficients at x₀, one vector per coset block.
    pub coefficients: Vec<Vec<f64>>,
    pub x0: f64,
    pub second: f64,
    pub second_im: f64,
    /// (|λ₁| − |λ₂|)/|λ₁|
    pub gap: f64,
    pub gap_warning: bool,
}

impl TopEigen {
    pub fn eval(&self, block: usize, x: f64) -> f64 {
        horner(&self.coefficients[block], x - self.x0)
    }
}

pub fn horner(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * y + v)
}

pub fn top_eigen(t: &TransferMatrix) -> Result<TopEigen> {
    if t.spec.sigma.im != 0.0 {
        return domain("top_eigen needs real σ");
    }
    check_spectral_point(t)?;
    let ev = eigenvalues(&t.entries)?;
    let lead = ev[0];
    let second = ev.get(1).copied().unwrap_or(C64::new(0.0, 0.0));
    let gap = (lead.norm() - second.norm()) / lead.norm();
    let v = eigenvector(&t.entries, lead)?;
    let m = t.spec.dim;
    let base = t.space.as_ref().map_or(0, |p| p.identity());
    // scale so the base block equals 1 at x = 0, then drop the phase
    let at0 = (0..m)
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, j| acc * (-t.spec.x0) + v[base * m + j]);
    if at0.norm() == 0.0 {
        return Err(Error::Numerical("eigenfunction vanishes at 0".into()));
    }
    let coefficients: Vec<Vec<f64>> = (0..t.blocks)
        .map(|b| (0..m).map(|j| (v[b * m + j] / at0).re).collect())
        .collect();
    Ok(TopEigen {
        lambda: lead.re,
        coefficients,
        x0: t.spec.x0,
        second: second.re,
        second_im: second.im,
        gap,
        gap_warning: gap < GAP_THRESHOLD,
    })
}

pub fn leading_eigenvalue(sigma: f64, variant: Variant, dim: usize) -> Result<f64> {
    let t = build_matrix(&TransferSpec::new(sigma, variant, dim))?;
    Ok(eigenvalues(&t.entries)?[0].re)
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error_estimate: f64,
}

/// |dλ_σ/dσ| at σ* by central differences with one Richardson step.
pub fn lyapunov_exponent(variant: Variant, sigma_star: f64, dim: usize) -> Result<Estimate> {
    let h = 1e-4;
    let d = |h: f64| -> Result<f64> {
        Ok((leading_eigenvalue(sigma_star + h, variant, dim)? - leading_eigenvalue(sigma_star - h, variant, dim)?)
            / (2.0 * h))
    };
    let d1 = d(h)?;
    let d2 = d(h / 2.0)?;
    let r = (4.0 * d2 - d1) / 3.0;
    let err = (r - d2).abs();
    if !r.is_finite() || err > 1e-3 * r.abs().max(1e-12) {
        return Err(Error::NotConverging("difference quotient is not settling".into()));
    }
    Ok(Estimate { value: r.abs(), error_estimate: err })
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussKuzmin {
    /// Taylor coefficients of L₁ᵏ(1) at x₀, k = 0..=n.
    pub densities: Vec<Vec<f64>>,
    /// sup over the 0.01 grid of |L₁ᵏ(1) − 1/((1+x) log 2)|.
    pub distances: Vec<f64>,
    pub x0: f64,
}

impl GaussKuzmin {
    pub fn ratios(&self) -> Vec<f64> {
        self.distances.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

pub fn grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

pub fn gauss_kuzmin_iterate(n: usize, dim: usize) -> Result<GaussKuzmin> {
    gauss_kuzmin_iterate_at(n, dim, GAUSS_KUZMIN_X0)
}

pub fn gauss_kuzmin_iterate_at(n: usize, dim: usize, x0: f64) -> Result<GaussKuzmin> {
    if n == 0 {
        return domain("need at least one iteration");
    }
    let t = build_matrix(&TransferSpec::new(1.0, Variant::Full, dim).at(x0))?;
    let a = t.entries.map(|z| z.re);
    let mut v = nalgebra::DVector::<f64>::zeros(dim);
    v[0] = 1.0;
    let xs = grid(0.01);
    let dist = |c: &[f64]| {
        xs.iter()
            .map(|&x| (horner(c, x - t.spec.x0) - 1.0 / ((1.0 + x) * std::f64::consts::LN_2)).abs())
            .fold(0.0, f64::max)
    };
    let mut densities = vec![v.as_slice().to_vec()];
    let mut distances = vec![dist(v.as_slice())];
    for _ in 0..n {
        v = &a * &v;
        distances.push(dist(v.as_slice()));
        densities.push(v.as_slice().to_vec());
    }
    Ok(GaussKuzmin { densities, distances, x0: t.spec.x0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Pgl2z,
    Sl2z,
    Coset(u64),
}

#[derive(Clone, Debug, Serialize)]
pub struct SelbergValue {
    pub re: f64,
    pub im: f64,
    pub dim: usize,
    /// The same determinant at dim + 8.
    pub re_next: f64,
    pub im_next: f64,
    /// |Z(dim) − Z(dim+8)|
    pub stability: f64,
    /// |det − Π(1 − λᵢ)| at `dim`.
    pub product_mismatch: f64,
}

impl SelbergValue {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

fn fredholm(s: C64, group: Group, dim: usize) -> Result<(C64, C64)> {
    let (variant, square) = match group {
        Group::Pgl2z => (Variant::Full, false),
        Group::Sl2z => (Variant::Full, true),
        Group::Coset(n) => (Variant::Coset(n), false),
    };
    let t = build_matrix(&TransferSpec::complex(s, variant, dim))?;
    let n = t.entries.nrows();
    let id = CMatrix::identity(n, n);
    let ev = eigenvalues(&t.entries)?;
    let (det, prod) = if square {
        let sq = &t.entries * &t.entries;
        (
            determinant(&(&id - sq)),
            ev.iter().fold(C64::new(1.0, 0.0), |acc, &l| acc * (C64::new(1.0, 0.0) - l * l)),
        )
    } else {
        (
            determinant(&(&id - &t.entries)),
            ev.iter().fold(C64::new(1.0, 0.0), |acc, &l| acc * (C64::new(1.0, 0.0) - l)),
        )
    };
    Ok((det, prod))
}

/// det(1 − L_s) (or det(1 − L_s²) for SL(2,ℤ)) from the truncated matrix.
pub fn selberg_zeta(s: C64, group: Group, dim: usize) -> Result<SelbergValue> {
    if 2.0 * s.re <= 1.0 {
        return domain("Selberg zeta via the transfer operator needs Re(2s) > 1");
    }
    let (z, prod) = fredholm(s, group, dim)?;
    let (z2, _) = fredholm(s, group, dim + 8)?;
    Ok(SelbergValue {
        re: z.re,
        im: z.im,
        dim,
        re_next: z2.re,
        im_next: z2.im,
        stability: (z - z2).norm(),
        product_mismatch: (z - prod).norm(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HensleyDimension {
    pub digits: u64,
    pub dimension: f64,
    pub bisection_steps: usize,
    pub error_estimate: f64,
}

/// σ with top eigenvalue of the D-digit operator equal to 1, by bisection.
pub fn hensley_dimension(digits: u64, dim: usize) -> Result<HensleyDimension> {
    if digits < 2 {
        return domain("digit bound must be at least 2");
    }
    let f = |s: f64| leading_eigenvalue(s, Variant::Hensley(digits), dim).map(|l| l - 1.0);
    let (mut lo, mut hi) = (0.1, 1.0);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::Numerical(format!("bracket (0.1, 1) does not enclose a root ({flo}, {fhi})")));
    }
    let mut steps = 0;
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok(HensleyDimension { digits, dimension: 0.5 * (lo + hi), bisection_steps: steps, error_estimate: hi - lo })
}

/// 1 − 6/(π²N) − 72 log N/(π⁴N²).
pub fn hensley_asymptotic(n: u64) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    let n = n as f64;
    1.0 - 6.0 / (pi2 * n) - 72.0 * n.ln() / (pi2 * pi2 * n * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_by_one_entries() {
        let t = build_matrix(&TransferSpec::new(1.0, Variant::Full, 1).at(0.0)).unwrap();
        assert!((t.entries[(0, 0)].re - PI * PI / 6.0).abs() < 1e-14);
        let t = build_matrix(&TransferSpec::new(1.0, Variant::Hensley(1), 1).at(0.0)).unwrap();
        assert!((t.entries[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coset_blocks_partition_full_operator() {
        for &x0 in &[0.0, 0.5] {
            for n in [2, 3, 5] {
                let full = build_matrix(&TransferSpec::new(1.0, Variant::Full, 8).at(x0)).unwrap();
                let cos = build_matrix(&TransferSpec::new(1.0, Variant::Coset(n), 8).at(x0)).unwrap();
                for t in 0..cos.blocks {
                    for j in 0..8 {
                        for m in 0..8 {
                            let s: C64 = (0..cos.blocks).map(|b| cos.entries[(t * 8 + j, b * 8 + m)]).sum();
                            let f = full.entries[(j, m)];
                            assert!((s - f).norm() <= 1e-12 * f.norm().max(1.0), "N={n} x0={x0}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(build_matrix(&TransferSpec::new(0.5, Variant::Full, 4)).is_err());
        assert!(build_matrix(&TransferSpec::new(0.3, Variant::Hensley(3), 4)).is_ok());
        assert!(build_matrix(&TransferSpec::new(1.0, Variant::Full, 4).at(1.0)).is_err());
    }

    #[test]
    fn spectrum_needs_an_invariant_disc() {
        let low = build_matrix(&TransferSpec::new(1.0, Variant::Full, 8).at(0.4)).unwrap();
        assert!(top_eigen(&low).is_err());
        assert!(spectrum(&low).is_err());
        let edge = build_matrix(&TransferSpec::new(1.0, Variant::Full, 24).at(0.5)).unwrap();
        assert!((top_eigen(&edge).unwrap().lambda - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gauss_density_is_fixed() {
        let t = build_matrix(&TransferSpec::new(1.0, Variant::Full, 24)).unwrap();
        let e = top_eigen(&t).unwrap();
        assert!((e.lambda - 1.0).abs() < 1e-10);
        assert!(!e.gap_warning);
        for x in grid(0.01) {
            assert!((e.eval(0, x) - 1.0 / (1.0 + x)).abs() < 1e-8);
        }
    }

    #[test]
    fn coset_eigenfunction_is_constant_across_blocks() {
        let t = build_matrix(&TransferSpec::new(1.0, Variant::Coset(2), 24)).unwrap();
        let e = top_eigen(&t).unwrap();
        assert!((e.lambda - 1.0).abs() < 1e-10);
        for x in grid(0.1) {
            for b in 0..3 {
                assert!((e.eval(b, x) - 1.0 / (1.0 + x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn wirsing_constant_is_stable() {
        let a = top_eigen(&build_matrix(&TransferSpec::new(1.0, Variant::Full, 24)).unwrap()).unwrap();
        let b = top_eigen(&build_matrix(&TransferSpec::new(1.0, Variant::Full, 32)).unwrap()).unwrap();
        assert!((a.second - b.second).abs() < 1e-6);
        assert!((a.second + 0.3036630).abs() < 1e-6);
    }

    #[test]
    fn leading_eigenvalue_decreases_in_sigma() {
        let vals: Vec<f64> = [0.55, 0.7, 0.9, 1.0, 1.3, 1.6, 2.0]
            .iter()
            .map(|&s| leading_eigenvalue(s, Variant::Full, 24).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn eigenfunction_positive() {
        for v in [Variant::Full, Variant::Hensley(3)] {
            let e = top_eigen(&build_matrix(&TransferSpec::new(0.8, v, 20)).unwrap()).unwrap();
            assert!(grid(0.01).iter().all(|&x| e.eval(0, x) > 0.0));
        }
    }

    #[test]
    fn trailing_rows_decay() {
        let t = build_matrix(&TransferSpec::new(1.0, Variant::Full, 32)).unwrap();
        let r = trailing_row_norms(&t, INVARIANT_RADIUS);
        assert!(r[31] < 1e-2 * r[0]);
        for j in 0..24 {
            assert!(r[j + 8] < 0.5 * r[j], "row {j}");
        }
    }

    #[test]
    fn golden_orbit_lyapunov() {
        let e = lyapunov_exponent(Variant::Hensley(1), 0.0, 8).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((e.value - 2.0 * phi.ln()).abs() < 1e-8);
    }

    #[test]
    fn determinant_matches_eigen_product() {
        let z = selberg_zeta(C64::new(1.5, 0.3), Group::Pgl2z, 24).unwrap();
        assert!(z.product_mismatch < 1e-8);
        let z = selberg_zeta(C64::new(2.0, 0.0), Group::Sl2z, 24).unwrap();
        assert!(z.product_mismatch < 1e-8);
    }

    #[test]
    fn selberg_domain() {
        assert!(selberg_zeta(C64::new(0.5, 0.0), Group::Pgl2z, 8).is_err());
    }

    #[test]
    fn hensley_bracket() {
        assert!(hensley_dimension(1, 8).is_err());
    }
}
