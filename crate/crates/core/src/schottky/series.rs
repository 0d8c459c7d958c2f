//! Sums over a Schottky group, organized by word length.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{enumerate_words, Point, SchottkyGroup};
use crate::error::{Error, Result};

/// Pairs (h·p, h·q) for h running over reduced words, tagged by |h|.
#[derive(Clone, Debug)]
pub struct PairOrbit {
    pub len: usize,
    pub pairs: Vec<(usize, Point, Point)>,
}

impl PairOrbit {
    /// h over all of Γ.
    pub fn group(g: &SchottkyGroup, p: Point, q: Point, len: usize) -> Result<Self> {
        Self::build(g, p, q, len, None)
    }

    /// h over words not ending in γ_ℓ^{±1}, applied to the fixed points of
    /// γ_ℓ (ℓ counted from 0): the axes of the conjugates of γ_ℓ.
    pub fn axes(g: &SchottkyGroup, ell: usize, len: usize) -> Result<Self> {
        let (zp, zm) = g.generators[ell].fixed_points()?;
        Self::build(g, zp, zm, len, Some(ell as i8 + 1))
    }

    fn build(g: &SchottkyGroup, p: Point, q: Point, len: usize, exclude: Option<i8>) -> Result<Self> {
        let words = enumerate_words(g, len)?;
        let pairs = words
            .iter()
            .filter(|w| exclude.is_none_or(|l| w.letters.last().is_none_or(|x| x.abs() != l)))
            .map(|w| (w.letters.len(), w.map.apply(p), w.map.apply(q)))
            .collect();
        Ok(Self { len, pairs })
    }

    pub fn sum(&self, term: impl Fn(Point, Point) -> C64) -> Result<SeriesSum> {
        let mut value = C64::new(0.0, 0.0);
        let mut shells = vec![0.0; self.len + 1];
        for &(l, p, q) in &self.pairs {
            let t = term(p, q);
            value += t;
            shells[l] += t.norm();
        }
        if !value.is_finite() {
            return Err(Error::Numerical("non-finite term in group sum".into()));
        }
        let tail = tail_bound(&shells)?;
        Ok(SeriesSum { value, shells, tail })
    }

    pub fn sum_real(&self, term: impl Fn(Point, Point) -> f64) -> Result<SeriesSum> {
        self.sum(|p, q| C64::new(term(p, q), 0.0))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesSum {
    pub value: C64,
    /// Σ|term| per word length.
    pub shells: Vec<f64>,
    /// Geometric bound on the omitted words.
    pub tail: f64,
}

impl SeriesSum {
    pub fn ratio(&self) -> Option<f64> {
        let n = self.shells.len();
        (n >= 2 && self.shells[n - 2] > 0.0).then(|| self.shells[n - 1] / self.shells[n - 2])
    }
}

pub(crate) fn thick() -> Error {
    Error::NotConverging("series not converging; group too thick".into())
}

/// shell_L · r/(1 − r) with r the last shell ratio; shells that stop
/// shrinking above rounding level mean the sum does not converge.
pub fn tail_bound(shells: &[f64]) -> Result<f64> {
    let n = shells.len();
    let last = shells[n - 1];
    let top = shells.iter().fold(0.0f64, |a, &b| a.max(b));
    if last <= 1e-14 * top {
        return Ok(last);
    }
    if n < 2 {
        return Err(thick());
    }
    let prev = shells[n - 2];
    if prev == 0.0 || last >= prev {
        return Err(thick());
    }
    let r = last / prev;
    Ok(last * r / (1.0 - r))
}

/// Critical exponent of the Poincaré series Σ |h′(z₀)|^s in the spherical
/// metric, from the ratio of the last two word-length shells.
#[derive(Clone, Debug, Serialize)]
pub struct PoincareEstimate {
    pub exponent: f64,
    /// Shell ratio at s = 1; below one means the Green series converges.
    pub ratio_at_one: f64,
    pub len: usize,
}

pub fn poincare_exponent(g: &SchottkyGroup, base: C64, len: usize) -> Result<PoincareEstimate> {
    if len < 2 {
        return crate::error::domain("need words of length at least 2");
    }
    let words = super::enumerate_words(g, len)?;
    let ders: Vec<(usize, f64)> =
        words.iter().filter(|w| w.letters.len() >= len - 1).map(|w| (w.letters.len(), w.map.spherical_derivative(base))).collect();
    let ratio = |s: f64| {
        let (mut a, mut b) = (0.0, 0.0);
        for &(l, d) in &ders {
            if l == len {
                a += d.powf(s);
            } else {
                b += d.powf(s);
            }
        }
        a / b
    };
    let ratio_at_one = ratio(1.0);
    let exponent = if ratio(0.0) <= 1.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, 4.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(PoincareEstimate { exponent, ratio_at_one, len })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_sizes_and_tails() {
        let g = SchottkyGroup::standard_genus_two();
        let z = |x: f64, y: f64| Point::Finite(C64::new(x, y));
        let o = PairOrbit::group(&g, z(0.0, 0.0), z(0.5, 0.5), 3).unwrap();
        assert_eq!(o.pairs.len(), 53);
        // identity plus, per length n, words ending in γ₂^{±1}: 2·3^{n−1}
        let a = PairOrbit::axes(&g, 0, 3).unwrap();
        assert_eq!(a.pairs.len(), 1 + 2 + 6 + 18);
        assert!(o.sum_real(|_, _| 1.0).is_err());
        let s = o.sum(|p, q| p.finite().unwrap() - q.finite().unwrap()).unwrap();
        assert!(s.tail < s.shells[3] && s.ratio().unwrap() < 0.5);
    }

    #[test]
    fn tail_is_geometric() {
        assert_eq!(tail_bound(&[1.0, 0.5, 0.25]).unwrap(), 0.25);
        assert!(tail_bound(&[1.0, 2.0]).is_err());
        assert_eq!(tail_bound(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(tail_bound(&[1.0, 1e-17, 2e-17]).unwrap(), 2e-17);
    }

    #[test]
    fn genus_one_exponent_is_zero() {
        let g = SchottkyGroup::genus_one(C64::new(0.2, 0.0)).unwrap();
        let p = poincare_exponent(&g, C64::new(1.0, 0.0), 6).unwrap();
        assert_eq!(p.exponent, 0.0);
        assert!(p.ratio_at_one < 0.25);
    }

    #[test]
    fn thin_group_has_small_exponent() {
        let g = SchottkyGroup::standard_genus_two();
        let p = poincare_exponent(&g, C64::new(0.0, 0.0), 7).unwrap();
        assert!(p.exponent > 0.0 && p.exponent < 1.0, "{p:?}");
        assert!(p.ratio_at_one < 1.0);
    }
}
