//! Differentials, periods and the Green function of a Schottky group, and
//! the closed form on the Tate curve ℂ*/q^ℤ.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::series::{poincare_exponent, thick, PairOrbit, SeriesSum};
use super::{geodesic_foot, log_abs_cr_point, ordist, Circle, Point, SchottkyGroup};
use crate::error::{domain, Error, Result};

/// How log|⟨x,y,p,q⟩| is evaluated: directly, or as −ordist(x*, y*) on
/// the geodesic {p,q}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Evaluation {
    CrossRatio,
    Geodesic,
}

fn log_cr(mode: Evaluation, x: Point, y: Point, p: Point, q: Point) -> f64 {
    match mode {
        Evaluation::CrossRatio => log_abs_cr_point(x, y, p, q),
        Evaluation::Geodesic => {
            let feet = geodesic_foot(x, p, q).and_then(|fx| geodesic_foot(y, p, q).and_then(|fy| ordist(&fx, &fy)));
            feet.map_or(f64::NAN, |d| -d)
        }
    }
}

fn pole(z: C64, p: Point) -> C64 {
    match p {
        Point::Finite(p) => 1.0 / (z - p),
        Point::Infinity => C64::new(0.0, 0.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DifferentialKind {
    /// ν_{a−b}, residues +1 at Γa and −1 at Γb.
    Third { a: C64, b: C64 },
    /// ω_ℓ, ℓ counted from 0.
    First(usize),
}

/// Precomputed poles of a differential.
#[derive(Clone, Debug)]
pub struct Differential {
    orbit: PairOrbit,
}

impl Differential {
    pub fn new(g: &SchottkyGroup, kind: DifferentialKind, len: usize) -> Result<Self> {
        let orbit = match kind {
            DifferentialKind::Third { a, b } => PairOrbit::group(g, a.into(), b.into(), len)?,
            DifferentialKind::First(ell) => {
                if ell >= g.genus() {
                    return domain("differential index exceeds the genus");
                }
                PairOrbit::axes(g, ell, len)?
            }
        };
        Ok(Self { orbit })
    }

    /// Coefficient of dz at z, with a tail estimate.
    pub fn eval(&self, z: C64) -> Result<SeriesSum> {
        self.orbit.sum(|p, q| pole(z, p) - pole(z, q))
    }
}

pub fn differential_eval(g: &SchottkyGroup, kind: DifferentialKind, z: C64, len: usize) -> Result<SeriesSum> {
    Differential::new(g, kind, len)?.eval(z)
}

/// ∮ over a circle, counterclockwise, by the trapezoid rule.
pub fn contour_integral(f: impl Fn(C64) -> Result<C64>, circle: &Circle, nodes: usize) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    let h = std::f64::consts::TAU / nodes as f64;
    for j in 0..nodes {
        let e = C64::from_polar(1.0, j as f64 * h);
        acc += f(circle.center + circle.radius * e)? * C64::new(0.0, circle.radius) * e;
    }
    Ok(acc * h)
}

/// True when z is in the closed disc bounded by `circle` on the side of `marker`.
fn on_side(circle: &Circle, marker: Point, z: C64) -> bool {
    let inside = (z - circle.center).norm() <= circle.radius;
    inside == circle.contains(marker)
}

/// Whether z lies outside every marked disc.
pub fn in_fundamental_domain(g: &SchottkyGroup, z: C64) -> Result<bool> {
    let Some(cs) = &g.circles else { return domain("group has no marking circles") };
    let n = g.genus();
    for k in 0..n {
        let (zp, zm) = g.generators[k].fixed_points()?;
        if on_side(&cs[k], zm, z) || on_side(&cs[k + n], zp, z) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two base points in the fundamental domain.
pub fn base_points(g: &SchottkyGroup) -> Result<[C64; 2]> {
    let candidates = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(0.93, 0.7),
        C64::new(0.5, 0.3),
        C64::new(-0.7, 0.2),
        C64::new(1.9, 1.7),
        C64::new(-1.3, -2.1),
    ];
    let ok: Vec<C64> = candidates.iter().copied().filter(|&z| in_fundamental_domain(g, z).unwrap_or(false)).collect();
    if ok.len() < 2 {
        return domain("could not place base points in the fundamental domain");
    }
    Ok([ok[0], ok[1]])
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodData {
    /// a_periods[k][ℓ] = ∮_{a_k} ω_ℓ, with a_k = C_{k+g}.
    pub a_periods: Vec<Vec<C64>>,
    /// Re τ_kℓ = Σ_{h ∈ Γ/⟨γ_ℓ⟩} log|⟨h z⁺_ℓ, h z⁻_ℓ, γ_k w, w⟩|.
    pub re_tau: Vec<Vec<f64>>,
    /// The same at a second base point.
    pub re_tau_alt: Vec<Vec<f64>>,
    pub base_points: [C64; 2],
    pub tail: f64,
}

impl PeriodData {
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.re_tau.len();
        let mut m: f64 = 0.0;
        for k in 0..n {
            for l in 0..n {
                m = m.max((self.re_tau[k][l] - self.re_tau[l][k]).abs());
            }
        }
        m
    }

    /// max |∮_{a_k} ω_ℓ − 2πi δ_kℓ|.
    pub fn a_period_error(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (k, row) in self.a_periods.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                let want = if k == l { C64::new(0.0, std::f64::consts::TAU) } else { C64::new(0.0, 0.0) };
                m = m.max((v - want).norm());
            }
        }
        m
    }

    pub fn base_point_drift(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (r, s) in self.re_tau.iter().zip(&self.re_tau_alt) {
            for (x, y) in r.iter().zip(s) {
                m = m.max((x - y).abs());
            }
        }
        m
    }
}

/// Real period matrix at base point w, via the axis orbits.
fn re_tau_at(g: &SchottkyGroup, axes: &[PairOrbit], w: C64, mode: Evaluation) -> Result<(Vec<Vec<f64>>, f64)> {
    let n = g.genus();
    let mut m = vec![vec![0.0; n]; n];
    let mut tail: f64 = 0.0;
    for k in 0..n {
        let gw = g.generators[k].apply(w.into());
        for l in 0..n {
            let s = axes[l].sum_real(|p, q| log_cr(mode, gw, w.into(), p, q))?;
            m[k][l] = s.value.re;
            tail = tail.max(s.tail);
        }
    }
    Ok((m, tail))
}

fn axis_orbits(g: &SchottkyGroup, len: usize) -> Result<Vec<PairOrbit>> {
    (0..g.genus()).map(|l| PairOrbit::axes(g, l, len)).collect()
}

pub const PERIOD_NODES: usize = 512;

pub fn period_data(g: &SchottkyGroup, len: usize) -> Result<PeriodData> {
    let n = g.genus();
    let cs = g.circles.as_ref().ok_or_else(|| Error::Domain("group has no marking circles".into()))?;
    let axes = axis_orbits(g, len)?;
    let mut a_periods = vec![vec![C64::new(0.0, 0.0); n]; n];
    for (l, axis) in axes.iter().enumerate() {
        let omega = Differential { orbit: axis.clone() };
        for k in 0..n {
            a_periods[k][l] = contour_integral(|z| Ok(omega.eval(z)?.value), &cs[k + n], PERIOD_NODES)?;
        }
    }
    let base = base_points(g)?;
    let (re_tau, t0) = re_tau_at(g, &axes, base[0], Evaluation::CrossRatio)?;
    let (re_tau_alt, t1) = re_tau_at(g, &axes, base[1], Evaluation::CrossRatio)?;
    Ok(PeriodData { a_periods, re_tau, re_tau_alt, base_points: base, tail: t0.max(t1) })
}

/// A divisor Σ m_i (z_i) of degree zero with finite support.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct DivisorC {
    pub points: Vec<(C64, i64)>,
}

impl DivisorC {
    pub fn pair(a: C64, b: C64) -> Self {
        Self { points: vec![(a, 1), (b, -1)] }
    }

    pub fn degree(&self) -> i64 {
        self.points.iter().map(|p| p.1).sum()
    }

    /// Σ m_i ((z_i) − (z_0)).
    fn pairs(&self) -> Result<Vec<(C64, C64, i64)>> {
        if self.degree() != 0 {
            return domain("divisor must have degree zero");
        }
        let Some(&(z0, _)) = self.points.first() else { return Ok(Vec::new()) };
        Ok(self.points.iter().skip(1).filter(|p| p.1 != 0).map(|&(z, m)| (z, z0, m)).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenValue {
    pub value: f64,
    pub error_estimate: f64,
    pub len: usize,
    pub mode: Evaluation,
    /// Poincaré shell ratio at s = 1.
    pub poincare_ratio: f64,
}

/// Shared evaluation data for one group and truncation length.
pub struct GreenContext<'a> {
    g: &'a SchottkyGroup,
    len: usize,
    mode: Evaluation,
    axes: Vec<PairOrbit>,
    re_tau_inv: DMatrix<f64>,
    re_tau_tail: f64,
    poincare_ratio: f64,
}

impl<'a> GreenContext<'a> {
    pub fn new(g: &'a SchottkyGroup, len: usize, mode: Evaluation) -> Result<Self> {
        if len < 2 {
            return domain("need words of length at least 2");
        }
        let base = match &g.circles {
            Some(_) => base_points(g)?[0],
            None => C64::new(0.0, 0.0),
        };
        let p = poincare_exponent(g, base, len.min(8))?;
        if p.ratio_at_one >= 1.0 {
            return Err(thick());
        }
        let axes = axis_orbits(g, len)?;
        let (m, re_tau_tail) = re_tau_at(g, &axes, base, mode)?;
        let n = g.genus();
        let re_tau = DMatrix::from_fn(n, n, |i, j| m[i][j]);
        let re_tau_inv = re_tau.try_inverse().ok_or_else(|| Error::Numerical("singular period matrix".into()))?;
        Ok(Self { g, len, mode, axes, re_tau_inv, re_tau_tail, poincare_ratio: p.ratio_at_one })
    }

    /// R_ℓ(x, y) = Σ_{h ∈ Γ/⟨γ_ℓ⟩} log|⟨x, y, h z⁺_ℓ, h z⁻_ℓ⟩| for each ℓ.
    fn axis_sums(&self, x: C64, y: C64) -> Result<(DVector<f64>, f64)> {
        let mut v = DVector::zeros(self.axes.len());
        let mut tail: f64 = 0.0;
        for (l, axis) in self.axes.iter().enumerate() {
            let s = axis.sum_real(|p, q| log_cr(self.mode, x.into(), y.into(), p, q))?;
            v[l] = s.value.re;
            tail = tail.max(s.tail);
        }
        Ok((v, tail))
    }

    /// g((a) − (b), (c) − (d)) with an error estimate.
    pub fn pair(&self, a: C64, b: C64, c: C64, d: C64) -> Result<(f64, f64)> {
        let orbit = PairOrbit::group(self.g, c.into(), d.into(), self.len)?;
        for &(_, p, q) in &orbit.pairs {
            for x in [p, q] {
                if let Point::Finite(x) = x {
                    if (x - a).norm() < 1e-12 || (x - b).norm() < 1e-12 {
                        return domain("divisor supports meet modulo the group");
                    }
                }
            }
        }
        let main = orbit.sum_real(|p, q| log_cr(self.mode, a.into(), b.into(), p, q))?;
        let (rab, tab) = self.axis_sums(a, b)?;
        let (rcd, tcd) = self.axis_sums(c, d)?;
        let x = &self.re_tau_inv * &rab;
        let value = main.value.re - x.dot(&rcd);
        let inv = self.re_tau_inv.abs().max();
        let dx = inv * (tab + self.re_tau_tail * x.abs().sum());
        let err = main.tail + x.abs().sum() * tcd + rcd.abs().sum() * dx;
        if !value.is_finite() {
            return Err(Error::Numerical("non-finite Green value".into()));
        }
        Ok((value, err))
    }

    pub fn divisors(&self, a: &DivisorC, b: &DivisorC) -> Result<GreenValue> {
        let (mut value, mut err) = (0.0, 0.0);
        for (x, y, m) in a.pairs()? {
            for (u, v, n) in b.pairs()? {
                let (g, e) = self.pair(x, y, u, v)?;
                value += (m * n) as f64 * g;
                err += (m * n).abs() as f64 * e;
            }
        }
        Ok(GreenValue { value, error_estimate: err, len: self.len, mode: self.mode, poincare_ratio: self.poincare_ratio })
    }
}

pub fn green_function(g: &SchottkyGroup, a: &DivisorC, b: &DivisorC, len: usize) -> Result<GreenValue> {
    GreenContext::new(g, len, Evaluation::CrossRatio)?.divisors(a, b)
}

/// The same sum with every log|cross-ratio| taken as a signed geodesic
/// distance between perpendicular feet.
pub fn green_geodesic(g: &SchottkyGroup, a: &DivisorC, b: &DivisorC, len: usize) -> Result<GreenValue> {
    GreenContext::new(g, len, Evaluation::Geodesic)?.divisors(a, b)
}

/// Largest |log|⟨a,b,hc,hd⟩| + ordist(a*, b*)| over words h.
pub fn term_identity_residual(g: &SchottkyGroup, a: C64, b: C64, c: C64, d: C64, len: usize) -> Result<f64> {
    let orbit = PairOrbit::group(g, c.into(), d.into(), len)?;
    let mut m: f64 = 0.0;
    for &(_, p, q) in &orbit.pairs {
        let x = log_cr(Evaluation::CrossRatio, a.into(), b.into(), p, q);
        let y = log_cr(Evaluation::Geodesic, a.into(), b.into(), p, q);
        m = m.max((x - y).abs());
    }
    Ok(m)
}

fn check_q(q: C64) -> Result<()> {
    if !(q.norm() > 0.0 && q.norm() < 1.0) {
        return domain("need 0 < |q| < 1");
    }
    Ok(())
}

/// Move z into |q| < |z| ≤ 1 by powers of q.
fn reduce(q: C64, mut z: C64) -> C64 {
    let lq = q.norm().ln();
    let n = (z.norm().ln() / lq).floor();
    if n.is_finite() && n != 0.0 {
        z /= q.powf(n);
    }
    while z.norm() > 1.0 {
        z *= q;
    }
    while z.norm() <= q.norm() {
        z /= q;
    }
    z
}

fn b2(t: f64) -> f64 {
    t * t - t + 1.0 / 6.0
}

const PRODUCT_EPS: f64 = 1e-18;

/// g(z, 1) on ℂ*/q^ℤ:
/// ½ B₂(log|z|/log|q|) log|q| + log|1 − z| + Σ_{n≥1} log|1 − qⁿz| + log|1 − qⁿ/z|.
/// Invariant under z ↦ qz, so z is first moved into the fundamental
/// annulus; returns −∞ on the divisor z ∈ q^ℤ.
pub fn btz_green(q: C64, z: C64) -> Result<f64> {
    check_q(q)?;
    if z.norm() == 0.0 || !z.is_finite() {
        return domain("z must be a finite nonzero point");
    }
    let z = reduce(q, z);
    let t = z.norm().ln() / q.norm().ln();
    let mut acc = 0.5 * b2(t) * q.norm().ln() + (1.0 - z).norm().ln();
    let mut qn = q;
    while qn.norm() / z.norm() > PRODUCT_EPS {
        acc += (1.0 - qn * z).norm().ln() + (1.0 - qn / z).norm().ln();
        qn *= q;
    }
    Ok(acc)
}

/// The same value as a B₂ term along the axis {0, ∞} plus oriented
/// distances along {1, ∞} from the foot of 0 to the feet of qⁿz and qⁿ/z.
pub fn btz_green_geodesic(q: C64, z: C64) -> Result<f64> {
    check_q(q)?;
    if z.norm() == 0.0 || !z.is_finite() {
        return domain("z must be a finite nonzero point");
    }
    let z = reduce(q, z);
    let (zero, one, inf) = (Point::Finite(C64::new(0.0, 0.0)), Point::Finite(C64::new(1.0, 0.0)), Point::Infinity);
    let axis = ordist(&geodesic_foot(z.into(), zero, inf)?, &geodesic_foot(one, zero, inf)?)?;
    let ell = -q.norm().ln();
    let mut acc = -0.5 * ell * b2(axis / ell);
    let base = geodesic_foot(zero, one, inf)?;
    let leg = |x: C64| -> Result<f64> {
        if (x - 1.0).norm() == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        ordist(&base, &geodesic_foot(x.into(), one, inf)?)
    };
    acc += leg(z)?;
    let mut qn = q;
    while qn.norm() / z.norm() > PRODUCT_EPS {
        acc += leg(qn * z)? + leg(qn / z)?;
        qn *= q;
    }
    Ok(acc)
}

/// g((a) − (b), (c) − (d)) on ℂ*/q^ℤ from the closed form.
pub fn btz_divisor_green(q: C64, a: C64, b: C64, c: C64, d: C64) -> Result<f64> {
    Ok(btz_green(q, a / c)? - btz_green(q, a / d)? - btz_green(q, b / c)? + btz_green(q, b / d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cz(x: f64, y: f64) -> C64 {
        C64::new(x, y)
    }

    #[test]
    fn btz_invariances() {
        let q = cz(0.2, 0.1);
        for z in [cz(0.5, 0.3), cz(-0.4, 0.6), cz(0.25, -0.05)] {
            let g = btz_green(q, z).unwrap();
            assert!((btz_green(q, q * z).unwrap() - g).abs() < 1e-12);
            assert!((btz_green(q, z / q).unwrap() - g).abs() < 1e-12);
            assert!((btz_green(q, 1.0 / z).unwrap() - g).abs() < 1e-12);
            assert!((btz_green(q.conj(), z.conj()).unwrap() - g).abs() < 1e-12);
            assert!((btz_green_geodesic(q, z).unwrap() - g).abs() < 1e-12);
        }
        assert_eq!(btz_green(q, q).unwrap(), f64::NEG_INFINITY);
        assert!(btz_green(cz(1.0, 0.0), cz(0.5, 0.0)).is_err());
    }

    #[test]
    fn genus_one_matches_closed_form() {
        for q in [0.1, 0.2, 0.3] {
            let q = cz(q, 0.0);
            let g = SchottkyGroup::genus_one(q).unwrap();
            let ctx = GreenContext::new(&g, 40, Evaluation::CrossRatio).unwrap();
            let (b, c, d) = (cz(0.7, 0.2), cz(-0.6, 0.5), cz(0.45, -0.55));
            for j in 0..10 {
                let r = q.norm().powf(0.5 - 0.09 * j as f64 - 0.02);
                let a = C64::from_polar(r, 0.6 * j as f64 + 0.3);
                let (v, e) = ctx.pair(a, b, c, d).unwrap();
                let want = btz_divisor_green(q, a, b, c, d).unwrap();
                assert!((v - want).abs() < 1e-8, "q={q} j={j}: {v} vs {want}");
                assert!(e < 1e-8);
            }
        }
    }

    #[test]
    fn genus_one_period() {
        let q = cz(0.15, 0.05);
        let g = SchottkyGroup::genus_one(q).unwrap();
        let p = period_data(&g, 30).unwrap();
        assert!((p.re_tau[0][0] - q.norm().ln()).abs() < 1e-12);
        assert!(p.a_period_error() < 1e-6);
        assert!(p.base_point_drift() < 1e-10);
    }

    #[test]
    fn genus_two_periods() {
        let g = SchottkyGroup::standard_genus_two();
        let p = period_data(&g, 7).unwrap();
        assert!(p.a_period_error() < 1e-6, "{:?}", p.a_periods);
        assert!(p.max_asymmetry() < 1e-6, "{:?}", p.re_tau);
        assert!(p.base_point_drift() < 1e-6);
        assert!(p.re_tau[0][0] < 0.0 && p.re_tau[1][1] < 0.0);
    }

    #[test]
    fn residues_of_differentials() {
        let g = SchottkyGroup::standard_genus_two();
        let (a, b) = (cz(0.3, 0.2), cz(-1.1, 0.4));
        let nu = Differential::new(&g, DifferentialKind::Third { a, b }, 6).unwrap();
        let small = |z: C64| Circle { center: z, radius: 1e-3 };
        let res = contour_integral(|z| Ok(nu.eval(z)?.value), &small(a), 64).unwrap() / C64::new(0.0, std::f64::consts::TAU);
        assert!((res - 1.0).norm() < 1e-9);
        let res = contour_integral(|z| Ok(nu.eval(z)?.value), &small(b), 64).unwrap() / C64::new(0.0, std::f64::consts::TAU);
        assert!((res + 1.0).norm() < 1e-9);
        let omega = Differential::new(&g, DifferentialKind::First(1), 6).unwrap();
        let res = contour_integral(|z| Ok(omega.eval(z)?.value), &small(cz(1.0, 1.0)), 64).unwrap();
        assert!(res.norm() < 1e-9);
    }

    #[test]
    fn third_kind_is_derivative_of_closed_form() {
        // on ℂ*/q^ℤ, ν_{a−b}(z) = 2∂_z u(z) + X/z, u(z) = g((a) − (b), (z) − (z0))
        let q = cz(0.2, 0.0);
        let g = SchottkyGroup::genus_one(q).unwrap();
        let (a, b, z0) = (cz(0.5, 0.2), cz(-0.3, 0.6), cz(0.9, -0.1));
        let nu = differential_eval(&g, DifferentialKind::Third { a, b }, cz(0.6, -0.4), 40).unwrap();
        let u = |z: C64| btz_divisor_green(q, a, b, z, z0).unwrap();
        let (z, h) = (cz(0.6, -0.4), 1e-5);
        let ux = (u(z + h) - u(z - h)) / (2.0 * h);
        let uy = (u(z + cz(0.0, h)) - u(z - cz(0.0, h))) / (2.0 * h);
        let x = (a / b).norm().ln() / q.norm().ln();
        let want = cz(ux, -uy) + x / z;
        assert!((nu.value - want).norm() < 1e-6, "{} vs {}", nu.value, want);
    }

    fn genus_two_ctx(mode: Evaluation) -> (SchottkyGroup, usize, Evaluation) {
        (SchottkyGroup::standard_genus_two(), 7, mode)
    }

    #[test]
    fn genus_two_green_symmetric_and_harmonic() {
        let (g, len, mode) = genus_two_ctx(Evaluation::CrossRatio);
        let ctx = GreenContext::new(&g, len, mode).unwrap();
        let (a, b, c, d) = (cz(0.3, 0.2), cz(-1.1, 0.4), cz(1.2, -0.9), cz(-0.5, -1.5));
        let (x, ex) = ctx.pair(a, b, c, d).unwrap();
        let (y, ey) = ctx.pair(c, d, a, b).unwrap();
        assert!((x - y).abs() <= 2.0 * (ex + ey) + 1e-12, "{x} vs {y}, tails {ex} {ey}");
        // bilinear in the first divisor
        let e = cz(0.9, 1.3);
        let (p, _) = ctx.pair(a, e, c, d).unwrap();
        let (r, _) = ctx.pair(e, b, c, d).unwrap();
        assert!((p + r - x).abs() < 1e-10);
        // harmonic in c away from the support
        let h = 1e-3;
        let f = |z: C64| ctx.pair(a, b, z, d).unwrap().0;
        let lap = (f(c + h) + f(c - h) + f(c + cz(0.0, h)) + f(c - cz(0.0, h)) - 4.0 * f(c)) / (h * h);
        assert!(lap.abs() < 1e-4, "{lap}");
        // invariant under moving c by the group
        let gc = g.generators[0].apply_finite(c);
        let (z, _) = ctx.pair(a, b, gc, d).unwrap();
        assert!((z - x).abs() < 1e-6, "{z} vs {x}");
    }

    #[test]
    fn geodesic_form_agrees() {
        let g = SchottkyGroup::standard_genus_two();
        let a = DivisorC::pair(cz(0.3, 0.2), cz(-1.1, 0.4));
        let b = DivisorC { points: vec![(cz(1.2, -0.9), 2), (cz(-0.5, -1.5), -1), (cz(0.1, 2.0), -1)] };
        let x = green_function(&g, &a, &b, 6).unwrap();
        let y = green_geodesic(&g, &a, &b, 6).unwrap();
        assert!((x.value - y.value).abs() < 1e-9, "{} vs {}", x.value, y.value);
        let r = term_identity_residual(&g, cz(0.3, 0.2), cz(-1.1, 0.4), cz(1.2, -0.9), cz(-0.5, -1.5), 5).unwrap();
        assert!(r < 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        let g = SchottkyGroup::standard_genus_two();
        let bad = DivisorC { points: vec![(cz(0.0, 0.0), 1)] };
        let ok = DivisorC::pair(cz(0.3, 0.2), cz(-1.1, 0.4));
        assert!(green_function(&g, &bad, &ok, 4).is_err());
        assert!(green_function(&g, &ok, &ok, 4).is_err());
        // discs nearly touching: the Poincaré series diverges at s = 1
        let c = |x: f64, y: f64| Circle { center: cz(x, y), radius: 0.999 };
        let thick = SchottkyGroup::classical(&[(c(1.0, 0.0), c(-1.0, 0.0)), (c(0.0, 1.0), c(0.0, -1.0))]);
        if let Ok(t) = thick {
            assert!(matches!(green_function(&t, &ok, &ok, 6), Err(Error::NotConverging(_)) | Err(Error::Domain(_))));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn btz_is_q_periodic(r in 0.05f64..0.6, th in 0.0f64..6.28, x in 0.01f64..1.0, y in 0.0f64..6.28) {
            let q = C64::from_polar(r, th);
            let z = C64::from_polar(r.powf(x), y);
            prop_assume!((z - 1.0).norm() > 1e-6);
            let g = btz_green(q, z).unwrap();
            prop_assert!((btz_green(q, q * z).unwrap() - g).abs() < 1e-10);
            prop_assert!((btz_green_geodesic(q, z).unwrap() - g).abs() < 1e-10);
        }
    }
}
