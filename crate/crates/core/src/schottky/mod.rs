//! Schottky groups acting on ℙ¹(ℂ) and the hyperbolic geometry of ℍ³.
//!
//! Cross-ratios use the slot order ⟨a,b,c,d⟩ = (a−c)(b−d)/((a−d)(b−c)),
//! which equals w(c)/w(d) for w(z) = (z−a)/(z−b). With it, d log⟨a,b,z,z₀⟩
//! is 1/(z−a) − 1/(z−b) and the averaged differentials below converge.

pub mod green;
pub mod series;
pub mod solenoid;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A point of ℙ¹(ℂ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Finite(C64),
    Infinity,
}

impl Point {
    pub fn finite(self) -> Option<C64> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }
}

impl From<C64> for Point {
    fn from(z: C64) -> Self {
        Point::Finite(z)
    }
}

/// z ↦ (az + b)/(cz + d) with ad − bc = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moebius {
    pub m: [[C64; 2]; 2],
}

impl Moebius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 || !det.norm().is_finite() {
            return domain("singular matrix");
        }
        let s = det.sqrt();
        Ok(Self { m: [[a / s, b / s], [c / s, d / s]] })
    }

    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self { m: [[o, z], [z, o]] }
    }

    pub fn compose(&self, o: &Self) -> Self {
        let (x, y) = (&self.m, &o.m);
        Self {
            m: [
                [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
                [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
            ],
        }
    }

    pub fn inverse(&self) -> Self {
        let m = &self.m;
        Self { m: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]] }
    }

    pub fn apply(&self, p: Point) -> Point {
        let m = &self.m;
        match p {
            Point::Infinity => {
                if m[1][0] == C64::new(0.0, 0.0) {
                    Point::Infinity
                } else {
                    Point::Finite(m[0][0] / m[1][0])
                }
            }
            Point::Finite(z) => {
                let den = m[1][0] * z + m[1][1];
                if den == C64::new(0.0, 0.0) {
                    Point::Infinity
                } else {
                    Point::Finite((m[0][0] * z + m[0][1]) / den)
                }
            }
        }
    }

    pub fn apply_finite(&self, z: C64) -> C64 {
        let m = &self.m;
        (m[0][0] * z + m[0][1]) / (m[1][0] * z + m[1][1])
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Loxodromic: trace² ∉ [0, 4].
    pub fn is_loxodromic(&self) -> bool {
        let t2 = self.trace() * self.trace();
        !(t2.im.abs() < 1e-12 && t2.re >= -1e-12 && t2.re <= 4.0 + 1e-12)
    }

    /// Multiplier κ = λ₁/λ₂ with |κ| > 1.
    pub fn multiplier(&self) -> C64 {
        let t = self.trace();
        let r = (t * t - 4.0).sqrt();
        let (l1, l2) = ((t + r) / 2.0, (t - r) / 2.0);
        if l1.norm() >= l2.norm() {
            l1 / l2
        } else {
            l2 / l1
        }
    }

    /// (attracting z⁺, repelling z⁻) fixed points of a loxodromic map.
    pub fn fixed_points(&self) -> Result<(Point, Point)> {
        if !self.is_loxodromic() {
            return domain("not loxodromic");
        }
        let [[a, b], [c, d]] = self.m;
        let (p, q) = if c.norm() < 1e-15 * (a.norm() + d.norm()) {
            (Point::Infinity, Point::Finite(b / (d - a)))
        } else {
            let r = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
            (Point::Finite((a - d + r) / (2.0 * c)), Point::Finite((a - d - r) / (2.0 * c)))
        };
        // |γ′(z)| = 1/|cz + d|², and 1/|c·∞ + d|² is read as |d|²/… via the
        // multiplier at ∞: γ′(∞) = 1/γ′(finite point) for c = 0
        let contraction = |z: Point| match z {
            Point::Finite(z) => 1.0 / (c * z + d).norm_sqr(),
            Point::Infinity => (d / a).norm_sqr(),
        };
        if contraction(p) < contraction(q) {
            Ok((p, q))
        } else {
            Ok((q, p))
        }
    }

    /// |γ′(z)| in the spherical metric.
    pub fn spherical_derivative(&self, z: C64) -> f64 {
        let w = self.apply_finite(z);
        let den = (self.m[1][0] * z + self.m[1][1]).norm_sqr();
        (1.0 + z.norm_sqr()) / (den * (1.0 + w.norm_sqr()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: Point) -> bool {
        p.finite().is_some_and(|z| (z - self.center).norm() < self.radius)
    }

    pub fn point(&self, theta: f64) -> C64 {
        self.center + C64::from_polar(self.radius, theta)
    }
}

/// Generators γ₁..γ_g. With circles C₁..C_{2g}, γ_k carries C_k onto
/// C_{k+g} and its attracting fixed point lies inside C_{k+g}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchottkyGroup {
    pub generators: Vec<Moebius>,
    #[serde(default)]
    pub circles: Option<Vec<Circle>>,
}

impl SchottkyGroup {
    pub fn new(generators: Vec<Moebius>, circles: Option<Vec<Circle>>) -> Result<Self> {
        let g = Self { generators, circles };
        g.validate()?;
        Ok(g)
    }

    /// ⟨z ↦ qz⟩, 0 < |q| < 1, marked by |z| = |q|^{∓1/2}.
    pub fn genus_one(q: C64) -> Result<Self> {
        if !(q.norm() > 0.0 && q.norm() < 1.0) {
            return domain("need 0 < |q| < 1");
        }
        let s = q.sqrt();
        let z = C64::new(0.0, 0.0);
        let gen = Moebius::new(s, z, z, C64::new(1.0, 0.0) / s)?;
        let r = q.norm().sqrt();
        Self::new(
            vec![gen],
            Some(vec![Circle { center: z, radius: 1.0 / r }, Circle { center: z, radius: r }]),
        )
    }

    /// γ_k(z) = c′_k − r_k r′_k/(z − c_k) for circle pairs (C_k, C′_k).
    pub fn classical(pairs: &[(Circle, Circle)]) -> Result<Self> {
        let mut gens = Vec::new();
        for (c, cp) in pairs {
            let rr = C64::new(c.radius * cp.radius, 0.0);
            let one = C64::new(1.0, 0.0);
            gens.push(Moebius::new(cp.center, -(c.center * cp.center) - rr, one, -c.center)?);
        }
        let mut circles: Vec<Circle> = pairs.iter().map(|p| p.0).collect();
        circles.extend(pairs.iter().map(|p| p.1));
        Self::new(gens, Some(circles))
    }

    /// Genus 2: unit circles at 4 ↔ −4 and 4i ↔ −4i.
    pub fn standard_genus_two() -> Self {
        let c = |x: f64, y: f64| Circle { center: C64::new(x, y), radius: 1.0 };
        Self::classical(&[(c(4.0, 0.0), c(-4.0, 0.0)), (c(0.0, 4.0), c(0.0, -4.0))])
            .expect("well separated circles")
    }

    pub fn genus(&self) -> usize {
        self.generators.len()
    }

    /// Letter ±k (k = 1..g) as a map.
    pub fn letter(&self, x: i8) -> Moebius {
        let g = self.generators[x.unsigned_abs() as usize - 1];
        if x > 0 {
            g
        } else {
            g.inverse()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.is_empty() || self.generators.len() > 60 {
            return domain("need between 1 and 60 generators");
        }
        for (k, g) in self.generators.iter().enumerate() {
            if !g.is_loxodromic() {
                return domain(format!("generator {} is not loxodromic", k + 1));
            }
        }
        if let Some(cs) = &self.circles {
            let g = self.genus();
            if cs.len() != 2 * g {
                return domain("need 2g marking circles");
            }
            for k in 0..g {
                let (src, dst) = (cs[k], cs[k + g]);
                let gen = &self.generators[k];
                for j in 0..16 {
                    let z = src.point(j as f64 * std::f64::consts::PI / 8.0);
                    let w = gen.apply_finite(z);
                    if ((w - dst.center).norm() - dst.radius).abs() > 1e-9 * (1.0 + dst.radius) {
                        return domain(format!("generator {} does not carry C{} onto C{}", k + 1, k + 1, k + g + 1));
                    }
                }
                let (zp, _) = gen.fixed_points()?;
                if !dst.contains(zp) {
                    return domain(format!("attracting fixed point of generator {} lies outside C{}", k + 1, k + g + 1));
                }
            }
        }
        Ok(())
    }
}

/// A reduced word with its matrix; letters are ±k for γ_k^{±1}.
#[derive(Clone, Debug)]
pub struct Word {
    pub letters: Vec<i8>,
    pub map: Moebius,
}

/// 1 + Σ_{n=1}^L 2g(2g−1)^{n−1}.
pub fn word_count(g: usize, len: usize) -> u128 {
    let mut total = 1u128;
    let mut shell = 2 * g as u128;
    for _ in 0..len {
        total = total.saturating_add(shell);
        shell = shell.saturating_mul(2 * g as u128 - 1);
    }
    total
}

pub const WORD_BUDGET: u128 = 5_000_000;

/// All reduced words of length ≤ `len`, shortest first.
pub fn enumerate_words(g: &SchottkyGroup, len: usize) -> Result<Vec<Word>> {
    let count = word_count(g.genus(), len);
    if count > WORD_BUDGET {
        return Err(Error::Budget(format!("{count} words exceed the budget of {WORD_BUDGET}")));
    }
    let mut out = vec![Word { letters: Vec::new(), map: Moebius::identity() }];
    let mut start = 0;
    for _ in 0..len {
        let end = out.len();
        for i in start..end {
            let last = out[i].letters.last().copied();
            for x in letters(g.genus()) {
                if last == Some(-x) {
                    continue;
                }
                let mut letters = out[i].letters.clone();
                letters.push(x);
                let map = out[i].map.compose(&g.letter(x));
                out.push(Word { letters, map });
            }
        }
        start = end;
    }
    Ok(out)
}

pub(crate) fn letters(g: usize) -> impl Iterator<Item = i8> {
    (1..=g as i8).flat_map(|k| [k, -k])
}

/// ⟨a,b,c,d⟩ = (a−c)(b−d)/((a−d)(b−c)); a factor containing ∞ cancels
/// against its partner.
pub fn cross_ratio(a: Point, b: Point, c: Point, d: Point) -> Result<C64> {
    let inf = [a, b, c, d].iter().filter(|p| **p == Point::Infinity).count();
    if inf > 1 {
        return domain("degenerate quadruple: more than one point at infinity");
    }
    let diff = |x: Point, y: Point| match (x, y) {
        (Point::Finite(x), Point::Finite(y)) => Some(x - y),
        _ => None,
    };
    let one = C64::new(1.0, 0.0);
    let num = diff(a, c).unwrap_or(one) * diff(b, d).unwrap_or(one);
    let den = diff(a, d).unwrap_or(one) * diff(b, c).unwrap_or(one);
    if den.norm() == 0.0 {
        return domain("degenerate quadruple: a = d or b = c");
    }
    Ok(num / den)
}

/// log|⟨a,b,c,d⟩| for finite points, without forming the product.
pub(crate) fn log_abs_cr(a: C64, b: C64, c: C64, d: C64) -> f64 {
    ((a - c) / (a - d) * ((b - d) / (b - c))).norm().ln()
}

/// log|⟨a,b,c,d⟩| allowing ∞ (fixed points of genus-one groups).
pub(crate) fn log_abs_cr_point(a: Point, b: Point, c: Point, d: Point) -> f64 {
    match (a, b, c, d) {
        (Point::Finite(a), Point::Finite(b), Point::Finite(c), Point::Finite(d)) => log_abs_cr(a, b, c, d),
        _ => cross_ratio(a, b, c, d).map_or(f64::NAN, |x| x.norm().ln()),
    }
}

/// The foot a*{c,d} of the perpendicular from a to the geodesic {c,d} in
/// upper half-space, stored relative to the endpoint c (or d when c = ∞).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Foot {
    pub base: Point,
    pub offset: C64,
    pub height: f64,
    /// Height |m(a)| in the chart m(z) = (z−c)/(z−d).
    pub chart_height: f64,
}

impl Foot {
    /// Position (z, t) in ℍ³.
    pub fn position(&self) -> (C64, f64) {
        (self.base.finite().unwrap_or_default() + self.offset, self.height)
    }
}

pub fn geodesic_foot(a: Point, c: Point, d: Point) -> Result<Foot> {
    if c == d {
        return domain("degenerate geodesic: c = d");
    }
    if a == c || a == d {
        return domain("point is an endpoint of the geodesic");
    }
    match (a, c, d) {
        (Point::Infinity, Point::Finite(c), Point::Finite(d)) => {
            // |m(∞)| = 1
            Ok(Foot { base: Point::Finite(c), offset: (d - c) / 2.0, height: (d - c).norm() / 2.0, chart_height: 1.0 })
        }
        (Point::Finite(a), Point::Finite(c), Point::Infinity) => {
            let h = (a - c).norm();
            Ok(Foot { base: Point::Finite(c), offset: C64::new(0.0, 0.0), height: h, chart_height: h })
        }
        (Point::Finite(a), Point::Infinity, Point::Finite(d)) => {
            let h = 1.0 / (a - d).norm();
            Ok(Foot { base: Point::Finite(d), offset: C64::new(0.0, 0.0), height: 1.0 / h, chart_height: h })
        }
        (Point::Finite(a), Point::Finite(c), Point::Finite(d)) => {
            // m⁻¹(h j) = ((c + d h²)/(1 + h²), |c − d| h/(1 + h²))
            let h = (a - c).norm() / (a - d).norm();
            let s = 1.0 + h * h;
            Ok(Foot {
                base: Point::Finite(c),
                offset: (d - c) * (h * h / s),
                height: (d - c).norm() * h / s,
                chart_height: h,
            })
        }
        _ => domain("degenerate configuration"),
    }
}

/// Hyperbolic distance in ℍ³.
pub fn hyperbolic_distance(z1: C64, t1: f64, z2: C64, t2: f64) -> f64 {
    2.0 * (((z1 - z2).norm_sqr() + (t1 - t2).powi(2)).sqrt() / (2.0 * (t1 * t2).sqrt())).asinh()
}

/// Oriented distance from p to q along the same geodesic {c,d}, positive
/// in the direction of d.
pub fn ordist(p: &Foot, q: &Foot) -> Result<f64> {
    if p.base != q.base {
        return domain("feet lie on different geodesics");
    }
    let d = hyperbolic_distance(p.offset, p.height, q.offset, q.height);
    Ok(if q.chart_height >= p.chart_height { d } else { -d })
}

/// (log|⟨a,b,c,d⟩|, −ordist(a*{c,d}, b*{c,d})).
pub fn ordist_identity_check(a: Point, b: Point, c: Point, d: Point) -> Result<(f64, f64)> {
    let lhs = cross_ratio(a, b, c, d)?.norm().ln();
    let fa = geodesic_foot(a, c, d)?;
    let fb = geodesic_foot(b, c, d)?;
    Ok((lhs, -ordist(&fa, &fb)?))
}

/// Attracting fixed points of all words of length exactly `depth`.
pub fn limit_points(g: &SchottkyGroup, depth: usize) -> Result<Vec<C64>> {
    if depth == 0 {
        return domain("depth must be positive");
    }
    let words = enumerate_words(g, depth)?;
    let mut out = Vec::new();
    for w in words.iter().filter(|w| w.letters.len() == depth) {
        if let Ok((Point::Finite(z), _)) = w.map.fixed_points() {
            out.push(z);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Point {
        Point::Finite(C64::new(x, y))
    }

    #[test]
    fn word_counts() {
        let g = SchottkyGroup::standard_genus_two();
        assert_eq!(enumerate_words(&g, 1).unwrap().len(), 5);
        assert_eq!(enumerate_words(&g, 2).unwrap().len(), 17);
        assert_eq!(word_count(2, 2), 17);
        let g1 = SchottkyGroup::genus_one(C64::new(0.2, 0.0)).unwrap();
        assert_eq!(enumerate_words(&g1, 5).unwrap().len(), 11);
        assert!(enumerate_words(&g, 40).is_err());
    }

    #[test]
    fn words_multiply() {
        let g = SchottkyGroup::standard_genus_two();
        let ws = enumerate_words(&g, 3).unwrap();
        let find = |l: &[i8]| ws.iter().find(|w| w.letters == l).unwrap().map;
        let lhs = find(&[1, 2, -1]);
        let rhs = find(&[1, 2]).compose(&find(&[-1]));
        for i in 0..2 {
            for j in 0..2 {
                assert!((lhs.m[i][j] - rhs.m[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fixed_points_attract_and_repel() {
        let g = SchottkyGroup::standard_genus_two();
        for gen in &g.generators {
            let (p, m) = gen.fixed_points().unwrap();
            let (p, m) = (p.finite().unwrap(), m.finite().unwrap());
            let der = |z: C64| 1.0 / (gen.m[1][0] * z + gen.m[1][1]).norm_sqr();
            assert!(der(p) < 1.0 && der(m) > 1.0);
            assert!((gen.apply_finite(p) - p).norm() < 1e-12);
            assert!(gen.multiplier().norm() > 1.0);
        }
        let g1 = SchottkyGroup::genus_one(C64::new(0.3, 0.1)).unwrap();
        let (p, m) = g1.generators[0].fixed_points().unwrap();
        assert_eq!(p, c(0.0, 0.0));
        assert_eq!(m, Point::Infinity);
    }

    #[test]
    fn marking_is_checked() {
        let bad = Moebius::new(C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)).unwrap();
        let circles = vec![Circle { center: C64::new(5.0, 0.0), radius: 1.0 }, Circle { center: C64::new(-5.0, 0.0), radius: 1.0 }];
        assert!(SchottkyGroup::new(vec![bad], Some(circles)).is_err());
        let elliptic = Moebius::new(C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!(SchottkyGroup::new(vec![elliptic], None).is_err());
    }

    #[test]
    fn cross_ratio_at_infinity() {
        let x = C64::new(0.3, 0.7);
        let v = cross_ratio(c(0.0, 0.0), c(1.0, 0.0), Point::Infinity, Point::Finite(x)).unwrap();
        let far = cross_ratio(c(0.0, 0.0), c(1.0, 0.0), c(1e9, 0.0), Point::Finite(x)).unwrap();
        assert!((v - far).norm() < 1e-8);
        assert!((v - (x - 1.0) / x).norm() < 1e-15);
        assert!(cross_ratio(c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(cross_ratio(Point::Infinity, c(2.0, 0.0), c(3.0, 0.0), Point::Infinity).is_err());
    }

    #[test]
    fn feet_on_the_vertical_axis() {
        let o = c(0.0, 0.0);
        let f = geodesic_foot(c(1.0, 0.0), o, Point::Infinity).unwrap();
        assert_eq!(f.position(), (C64::new(0.0, 0.0), 1.0));
        let f = geodesic_foot(c(0.0, 2.0), o, Point::Infinity).unwrap();
        assert_eq!(f.position(), (C64::new(0.0, 0.0), 2.0));
        assert!(geodesic_foot(c(1.0, 0.0), o, o).is_err());
    }

    #[test]
    fn axis_case_in_closed_form() {
        let (x, y) = (3.0, 0.7);
        let (l, r) = ordist_identity_check(c(x, 0.0), c(y, 0.0), c(0.0, 0.0), Point::Infinity).unwrap();
        assert!((l - (x / y).ln()).abs() < 1e-15);
        assert!((r - (x / y).ln()).abs() < 1e-14);
    }

    #[test]
    fn foot_minimizes_busemann_function() {
        // the foot of a is where the horospheres at a first touch {c,d}:
        // the minimum of (|z − a|² + t²)/t along the semicircle
        let (a, cc, d) = (C64::new(0.4, 1.3), C64::new(-1.0, 0.2), C64::new(2.0, -0.5));
        let f = geodesic_foot(Point::Finite(a), Point::Finite(cc), Point::Finite(d)).unwrap();
        let (z, t) = f.position();
        let (mid, r, u) = ((cc + d) / 2.0, (d - cc).norm() / 2.0, (d - cc) / (d - cc).norm());
        assert!(((z - mid).norm_sqr() + t * t - r * r).abs() < 1e-12);
        let busemann = |z: C64, t: f64| ((z - a).norm_sqr() + t * t) / t;
        let th = t.atan2(((z - mid) / u).re);
        let at = |th: f64| busemann(mid + u * (r * th.cos()), r * th.sin());
        for k in 1..200 {
            let x = std::f64::consts::PI * k as f64 / 200.0;
            assert!(at(x) >= at(th) - 1e-12, "{x} {th}");
        }
    }

    fn pt() -> impl Strategy<Value = C64> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y)| C64::new(x, y))
    }

    proptest! {
        #[test]
        fn cross_ratio_symmetry_and_invariance(a in pt(), b in pt(), cc in pt(), d in pt(), m in prop::array::uniform4(pt())) {
            let pts = [a, b, cc, d];
            for i in 0..4 { for j in i + 1..4 { prop_assume!((pts[i] - pts[j]).norm() > 1e-2); } }
            let g = Moebius::new(m[0], m[1], m[2], m[3]);
            prop_assume!(g.is_ok());
            let g = g.unwrap();
            prop_assume!((m[0] * m[3] - m[1] * m[2]).norm() > 1e-2);
            let p = |z: C64| Point::Finite(z);
            let v = cross_ratio(p(a), p(b), p(cc), p(d)).unwrap();
            let swapped = cross_ratio(p(b), p(a), p(d), p(cc)).unwrap();
            prop_assert!((v - swapped).norm() < 1e-9 * (1.0 + v.norm()));
            let moved = cross_ratio(g.apply(p(a)), g.apply(p(b)), g.apply(p(cc)), g.apply(p(d)));
            prop_assume!(moved.is_ok());
            let moved = moved.unwrap();
            prop_assert!((v - moved).norm() < 1e-7 * (1.0 + v.norm()), "{} vs {}", v, moved);
        }

        #[test]
        fn cross_ratio_is_oriented_distance(a in pt(), b in pt(), cc in pt(), d in pt()) {
            let pts = [a, b, cc, d];
            for i in 0..4 { for j in i + 1..4 { prop_assume!((pts[i] - pts[j]).norm() > 1e-2); } }
            let p = |z: C64| Point::Finite(z);
            let (l, r) = ordist_identity_check(p(a), p(b), p(cc), p(d)).unwrap();
            prop_assert!((l - r).abs() < 1e-10, "{} vs {}", l, r);
        }
    }
}
