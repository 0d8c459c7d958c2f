//! Exact continued fractions of rationals and real quadratic irrationals,
//! convergents, the Gauss shift and its skew extension over ℙ¹(ℤ/N).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Longest orbit explored while looking for a period.
const PERIOD_BUDGET: usize = 200_000;

/// 2×2 integer matrix, row major.
pub type Mat2 = [[BigInt; 2]; 2];

pub fn mat2(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
    [[a.into(), b.into()], [c.into(), d.into()]]
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat2_det(x: &Mat2) -> BigInt {
    &x[0][0] * &x[1][1] - &x[0][1] * &x[1][0]
}

/// ((0,1),(1,k)): the branch x ↦ 1/(x+k).
pub fn digit_matrix(k: u64) -> Mat2 {
    [[0.into(), 1.into()], [1.into(), k.into()]]
}

/// ((−k,1),(1,0)): the inverse branch, x ↦ 1/x − k.
pub fn shift_matrix(k: u64) -> Mat2 {
    [[-BigInt::from(k), 1.into()], [1.into(), 0.into()]]
}

fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// (a + b√d)/c with d squarefree, gcd(a,b,c) = 1 and c > 0.
/// Rationals are stored with b = 0 and d = 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: u64,
}

impl QuadraticSurd {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: u64) -> Result<Self> {
        let c = c.into();
        if c.is_zero() {
            return domain("zero denominator");
        }
        if !is_squarefree(d) {
            return domain(format!("d = {d} is not a squarefree positive integer"));
        }
        Ok(Self::canonical(a.into(), b.into(), c, d))
    }

    pub fn rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        Self::new(p, 0, q, 1)
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::canonical(n.into(), BigInt::zero(), BigInt::one(), 1)
    }

    /// (a + b√disc)/c for an arbitrary nonnegative discriminant; square
    /// factors are pulled out of `disc`.
    pub fn from_discriminant(a: BigInt, b: BigInt, c: BigInt, disc: BigInt) -> Result<Self> {
        if c.is_zero() {
            return domain("zero denominator");
        }
        if disc.is_negative() {
            return domain("negative discriminant");
        }
        if disc.is_zero() {
            return Ok(Self::canonical(a, BigInt::zero(), c, 1));
        }
        let (f, d) = split_square(&disc);
        let d = d.to_u64().ok_or(Error::Overflow)?;
        Ok(Self::canonical(a, b * f, c, d))
    }

    /// As `from_discriminant`, when the squarefree part of `disc` is known.
    pub fn from_discriminant_in(a: BigInt, b: BigInt, c: BigInt, disc: BigInt, d: u64) -> Result<Self> {
        let dd = BigInt::from(d);
        if d == 0 || !(&disc % &dd).is_zero() {
            return Self::from_discriminant(a, b, c, disc);
        }
        let q = &disc / &dd;
        let f = q.sqrt();
        if &f * &f != q {
            return Self::from_discriminant(a, b, c, disc);
        }
        if c.is_zero() {
            return domain("zero denominator");
        }
        Ok(Self::canonical(a, b * f, c, d))
    }

    fn canonical(mut a: BigInt, mut b: BigInt, mut c: BigInt, mut d: u64) -> Self {
        if d == 1 {
            a += &b;
            b = BigInt::zero();
        }
        if b.is_zero() {
            d = 1;
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() && !g.is_zero() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        if a.is_zero() && b.is_zero() {
            c = BigInt::one();
        }
        Self { a, b, c, d }
    }

    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt, u64) {
        (&self.a, &self.b, &self.c, self.d)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Sign of the numerator a + b√d (c is positive).
    pub fn signum(&self) -> Ordering {
        let sa = self.a.sign();
        let sb = self.b.sign();
        use num_bigint::Sign::*;
        match (sa, sb) {
            (NoSign, NoSign) => Ordering::Equal,
            (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => Ordering::Greater,
            (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => Ordering::Less,
            _ => {
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * BigInt::from(self.d);
                // |a| vs |b|√d decides, sign follows the larger part
                let mag = a2.cmp(&b2d);
                let a_pos = sa == Plus;
                match mag {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => if a_pos { Ordering::Greater } else { Ordering::Less },
                    Ordering::Less => if a_pos { Ordering::Less } else { Ordering::Greater },
                }
            }
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        let b2d = &self.b * &self.b * BigInt::from(self.d);
        let r = b2d.sqrt();
        let fb = if self.b.is_negative() {
            if &r * &r == b2d { -r } else { -r - 1 }
        } else {
            r
        };
        (&self.a + fb).div_floor(&self.c)
    }

    pub fn to_f64(&self) -> f64 {
        let sd = (self.d as f64).sqrt();
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        if self.a.sign() != self.b.sign() && !self.a.is_zero() && !self.b.is_zero() {
            // avoid cancellation: a + b√d = (a² − b²d)/(a − b√d)
            let n = (&self.a * &self.a - &self.b * &self.b * BigInt::from(self.d)).to_f64().unwrap_or(f64::NAN);
            n / (a - b * sd) / c
        } else {
            (a + b * sd) / c
        }
    }

    fn common_d(&self, other: &Self) -> Result<u64> {
        if self.b.is_zero() {
            Ok(other.d)
        } else if other.b.is_zero() || self.d == other.d {
            Ok(self.d)
        } else {
            domain(format!("mixing √{} and √{}", self.d, other.d))
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let d = self.common_d(o)?;
        Ok(Self::canonical(
            &self.a * &o.c + &o.a * &self.c,
            &self.b * &o.c + &o.b * &self.c,
            &self.c * &o.c,
            d,
        ))
    }

    pub fn neg(&self) -> Self {
        Self::canonical(-&self.a, -&self.b, self.c.clone(), self.d)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let d = self.common_d(o)?;
        let dd = BigInt::from(d);
        Ok(Self::canonical(
            &self.a * &o.a + &self.b * &o.b * &dd,
            &self.a * &o.b + &o.a * &self.b,
            &self.c * &o.c,
            d,
        ))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return domain("reciprocal of zero");
        }
        let den = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        Ok(Self::canonical(&self.c * &self.a, -(&self.c * &self.b), den, self.d))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.recip()?)
    }

    pub fn conj(&self) -> Self {
        Self::canonical(self.a.clone(), -&self.b, self.c.clone(), self.d)
    }

    pub fn add_int(&self, k: &BigInt) -> Self {
        Self::canonical(&self.a + k * &self.c, self.b.clone(), self.c.clone(), self.d)
    }

    /// Fractional-linear action (αx+β)/(γx+δ).
    pub fn mobius(&self, m: &Mat2) -> Result<Self> {
        let num = self.mul(&Self::integer(m[0][0].clone()))?.add_int(&m[0][1]);
        let den = self.mul(&Self::integer(m[1][0].clone()))?.add_int(&m[1][1]);
        if den.is_zero() {
            return domain("pole: cθ + d = 0");
        }
        num.div(&den)
    }
}

impl PartialOrd for QuadraticSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.sub(other).ok().map(|x| x.signum())
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            if self.c.is_one() {
                write!(f, "{}", self.a)
            } else {
                write!(f, "{}/{}", self.a, self.c)
            }
        } else {
            write!(f, "({} + {}√{})/{}", self.a, self.b, self.d, self.c)
        }
    }
}

/// Integers that fit are written as JSON numbers, larger ones as strings.
struct BigNum<'a>(&'a BigInt);

impl Serialize for BigNum<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl Serialize for QuadraticSurd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QuadraticSurd", 4)?;
        st.serialize_field("a", &BigNum(&self.a))?;
        st.serialize_field("b", &BigNum(&self.b))?;
        st.serialize_field("c", &BigNum(&self.c))?;
        st.serialize_field("d", &self.d)?;
        st.end()
    }
}

/// Write n = f² · r, pulling out all prime squares below a trial bound and
/// a trailing perfect-square cofactor.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut f = BigInt::one();
    let mut p = 2u64;
    while p < 100_000 {
        let pp = BigInt::from(p * p);
        if pp > rest {
            break;
        }
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            f *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        return (f * r, BigInt::one());
    }
    (f, rest)
}

/// [a₀; preperiod, (period)] with every digit ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    #[serde(skip)]
    pub integer_part: BigInt,
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
    /// Squarefree d of the quadratic field, when known.
    #[serde(skip)]
    pub radicand: Option<u64>,
}

impl ContinuedFraction {
    pub fn is_rational(&self) -> bool {
        self.period.is_empty()
    }

    /// Digits k₁, k₂, …; infinite for surds.
    pub fn digits(&self) -> impl Iterator<Item = u64> + '_ {
        let tail: Box<dyn Iterator<Item = u64>> = if self.period.is_empty() {
            Box::new(std::iter::empty())
        } else {
            Box::new(self.period.iter().copied().cycle())
        };
        self.preperiod.iter().copied().chain(tail)
    }

    /// The fractional part [0; k₁, k₂, …] as an exact number.
    pub fn fractional_value(&self) -> Result<QuadraticSurd> {
        let mut tail = if self.period.is_empty() {
            None
        } else {
            let g = self
                .period
                .iter()
                .fold(mat2(1, 0, 0, 1), |acc, &k| mat2_mul(&acc, &digit_matrix(k)));
            Some(attracting_fixed_point(&g, self.radicand)?)
        };
        for &k in self.preperiod.iter().rev() {
            let v = match tail {
                None => QuadraticSurd::rational(1, k)?,
                Some(t) => t.add_int(&BigInt::from(k)).recip()?,
            };
            tail = Some(v);
        }
        Ok(tail.unwrap_or_else(|| QuadraticSurd::integer(0)))
    }

    pub fn value(&self) -> Result<QuadraticSurd> {
        Ok(self.fractional_value()?.add_int(&self.integer_part))
    }
}

/// Positive fixed point y = (αy+β)/(γy+δ) of a period matrix with γ > 0.
fn attracting_fixed_point(g: &Mat2, radicand: Option<u64>) -> Result<QuadraticSurd> {
    let (al, be, ga, de) = (&g[0][0], &g[0][1], &g[1][0], &g[1][1]);
    if !ga.is_positive() {
        return domain("period matrix has no positive fixed point");
    }
    let diff = de - al;
    let disc = &diff * &diff + BigInt::from(4) * be * ga;
    let c = BigInt::from(2) * ga;
    match radicand {
        Some(d) => QuadraticSurd::from_discriminant_in(al - de, BigInt::one(), c, disc, d),
        None => QuadraticSurd::from_discriminant(al - de, BigInt::one(), c, disc),
    }
}

/// Expand a rational or quadratic surd. Period is found by hashing the
/// orbit under the Gauss shift.
pub fn cf_expand(x: &QuadraticSurd) -> Result<ContinuedFraction> {
    let a0 = x.floor();
    let mut y = x.add_int(&-a0.clone());
    let mut digits = Vec::new();
    let mut seen: HashMap<QuadraticSurd, usize> = HashMap::new();
    let radicand = (!x.is_rational()).then_some(x.d);
    loop {
        if y.is_zero() {
            return Ok(ContinuedFraction { integer_part: a0, preperiod: digits, period: Vec::new(), radicand });
        }
        if !y.is_rational() {
            if let Some(&start) = seen.get(&y) {
                let period = digits.split_off(start);
                return Ok(ContinuedFraction { integer_part: a0, preperiod: digits, period, radicand });
            }
            seen.insert(y.clone(), digits.len());
        }
        if digits.len() >= PERIOD_BUDGET {
            return Err(Error::Budget(format!("no period within {PERIOD_BUDGET} digits")));
        }
        let inv = y.recip()?;
        let k = inv.floor();
        digits.push(k.to_u64().ok_or(Error::Overflow)?);
        y = inv.add_int(&-k);
    }
}

/// A digit drawn from the Gauss–Kuzmin law P(k) = log₂(1 + 1/(k(k+2)))
/// by inverting its distribution function at a uniform `u ∈ [0,1)`.
pub fn gauss_kuzmin_digit(u: f64) -> u64 {
    // P(K ≤ k) = 1 − log₂((k+2)/(k+1))
    let t = (1.0 - u).exp2() - 1.0;
    if t <= 0.0 {
        return u64::MAX;
    }
    let k = (1.0 / t).ceil() - 1.0;
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        (k as u64).max(1)
    }
}

/// T(x) = 1/x − ⌊1/x⌋.
pub fn gauss_shift(x: &QuadraticSurd) -> Result<QuadraticSurd> {
    if x.signum() != Ordering::Greater || x.floor() != BigInt::zero() {
        return domain("gauss_shift needs 0 < x < 1");
    }
    let inv = x.recip()?;
    let k = inv.floor();
    Ok(inv.add_int(&-k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub n: usize,
    pub p: BigInt,
    pub q: BigInt,
}

/// p_k/q_k for k = 1..=n (fractional part only). The flag is set when the
/// expansion ended before n.
pub fn convergents(cf: &ContinuedFraction, n: usize) -> (Vec<Convergent>, bool) {
    let (mut p0, mut p1) = (BigInt::one(), BigInt::zero()); // p_{-1}, p_0
    let (mut q0, mut q1) = (BigInt::zero(), BigInt::one()); // q_{-1}, q_0
    let mut out = Vec::with_capacity(n);
    for (i, k) in cf.digits().take(n).enumerate() {
        let k = BigInt::from(k);
        let p2 = &k * &p1 + &p0;
        let q2 = &k * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        out.push(Convergent { n: i + 1, p: p1.clone(), q: q1.clone() });
    }
    let truncated = out.len() < n;
    (out, truncated)
}

/// g_n = D_{k₁}⋯D_{k_n} = ((p_{n−1}, p_n), (q_{n−1}, q_n)).
pub fn convergent_matrix(digits: &[u64]) -> Mat2 {
    digits
        .iter()
        .fold(mat2(1, 0, 0, 1), |acc, &k| mat2_mul(&acc, &digit_matrix(k)))
}

/// ℙ¹(ℤ/N) with the left action of integer matrices reduced mod N.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    n: u64,
    points: Vec<(u64, u64)>,
    canon: Vec<usize>,
    shift_tables: Vec<Vec<usize>>,
    digit_tables: Vec<Vec<usize>>,
    sigma: Vec<usize>,
    tau: Vec<usize>,
    identity: usize,
}

impl CosetSpace {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return domain("modulus must be positive");
        }
        if n > 2048 {
            return Err(Error::Budget(format!("modulus {n} too large for dense action tables")));
        }
        let nn = n as usize;
        let units: Vec<u64> = (1..=n).map(|u| u % n).filter(|&u| u.gcd(&n) == 1).collect();
        let rep = |a: u64, c: u64| -> (u64, u64) {
            if c.gcd(&n) == 1 {
                let ci = mod_inverse(c, n);
                ((a * ci) % n, 1 % n)
            } else {
                units
                    .iter()
                    .map(|&u| ((u * a) % n, (u * c) % n))
                    .min()
                    .unwrap_or((a, c))
            }
        };
        let mut points: Vec<(u64, u64)> = (0..n).map(|x| (x, 1 % n)).collect();
        points.dedup();
        let mut rest: Vec<(u64, u64)> = Vec::new();
        for a in 0..n {
            for c in 0..n {
                if a.gcd(&c).gcd(&n) != 1 || c.gcd(&n) == 1 {
                    continue;
                }
                let r = rep(a, c);
                if !rest.contains(&r) {
                    rest.push(r);
                }
            }
        }
        rest.sort_by_key(|&(a, c)| (c, a));
        points.extend(rest);
        let index: HashMap<(u64, u64), usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut canon = vec![usize::MAX; nn * nn];
        for a in 0..n {
            for c in 0..n {
                if a.gcd(&c).gcd(&n) == 1 {
                    canon[(a * n + c) as usize] = index[&rep(a, c)];
                }
            }
        }
        let mut sp = Self {
            n,
            points,
            canon,
            shift_tables: Vec::new(),
            digit_tables: Vec::new(),
            sigma: Vec::new(),
            tau: Vec::new(),
            identity: 0,
        };
        sp.identity = sp.canon[((1 % n) * n) as usize];
        let table = |sp: &Self, m: [[i64; 2]; 2]| (0..sp.len()).map(|s| sp.act_small(m, s)).collect::<Vec<_>>();
        sp.shift_tables = (0..n).map(|r| table(&sp, [[-(r as i64), 1], [1, 0]])).collect();
        sp.digit_tables = (0..n).map(|r| table(&sp, [[0, 1], [1, r as i64]])).collect();
        sp.sigma = table(&sp, [[0, -1], [1, 0]]);
        sp.tau = table(&sp, [[0, -1], [1, 1]]);
        Ok(sp)
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(u64, u64)] {
        &self.points
    }

    /// The coset of the identity, i.e. the point ∞ = (1:0).
    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, a: i64, c: i64) -> Option<usize> {
        let n = self.n as i64;
        let (a, c) = (a.rem_euclid(n) as u64, c.rem_euclid(n) as u64);
        let i = self.canon[(a * self.n + c) as usize];
        (i != usize::MAX).then_some(i)
    }

    pub fn label(&self, s: usize) -> String {
        let (a, c) = self.points[s];
        if s == self.identity {
            "∞".into()
        } else if c == 1 % self.n {
            a.to_string()
        } else {
            format!("({a}:{c})")
        }
    }

    fn act_small(&self, m: [[i64; 2]; 2], s: usize) -> usize {
        let n = self.n as i64;
        let (a, c) = self.points[s];
        let (a, c) = (a as i64, c as i64);
        let na = (m[0][0] * a + m[0][1] * c).rem_euclid(n);
        let nc = (m[1][0] * a + m[1][1] * c).rem_euclid(n);
        self.canon[(na as u64 * self.n + nc as u64) as usize]
    }

    /// Left action s ↦ M·s of a matrix invertible mod N.
    pub fn act(&self, m: &Mat2, s: usize) -> Result<usize> {
        let nb = BigInt::from(self.n);
        let r = |x: &BigInt| x.mod_floor(&nb).to_i64().unwrap_or(0);
        if mat2_det(m).gcd(&nb) != BigInt::one() {
            return domain("matrix not invertible mod N");
        }
        Ok(self.act_small([[r(&m[0][0]), r(&m[0][1])], [r(&m[1][0]), r(&m[1][1])]], s))
    }

    /// ((−k,1),(1,0))·s.
    pub fn shift_act(&self, k: u64, s: usize) -> usize {
        self.shift_tables[(k % self.n) as usize][s]
    }

    /// ((0,1),(1,k))·s.
    pub fn digit_act(&self, k: u64, s: usize) -> usize {
        self.digit_tables[(k % self.n) as usize][s]
    }

    pub fn sigma(&self, s: usize) -> usize {
        self.sigma[s]
    }

    pub fn tau(&self, s: usize) -> usize {
        self.tau[s]
    }
}

fn mod_inverse(c: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let e = (c as i64).extended_gcd(&(n as i64));
    e.x.rem_euclid(n as i64) as u64
}

/// (Tx, ((−⌊1/x⌋,1),(1,0))·s).
pub fn generalized_shift(x: &QuadraticSurd, s: usize, p: &CosetSpace) -> Result<(QuadraticSurd, usize)> {
    if s >= p.len() {
        return domain("coset index out of range");
    }
    let k = x.recip()?.floor();
    let tx = gauss_shift(x)?;
    Ok((tx, p.act(&shift_matrix(k.to_u64().ok_or(Error::Overflow)?), s)?))
}

#[derive(Clone, Debug)]
pub struct PeriodData {
    /// Product of the digit matrices over one period.
    pub g: Mat2,
    pub ell: usize,
    /// Number of preperiod digits removed first.
    pub strip: usize,
    /// The purely periodic tail the period matrix fixes.
    pub periodic_part: QuadraticSurd,
    pub lambda_g: f64,
    pub lambda_g_exact: QuadraticSurd,
}

pub fn surd_period_matrix(x: &QuadraticSurd) -> Result<PeriodData> {
    let cf = cf_expand(x)?;
    if cf.is_rational() {
        return domain("no period: rational input");
    }
    let g = convergent_matrix(&cf.period);
    let periodic = ContinuedFraction {
        integer_part: BigInt::zero(),
        preperiod: Vec::new(),
        period: cf.period.clone(),
        radicand: cf.radicand,
    }
    .fractional_value()?;
    let tr = &g[0][0] + &g[1][1];
    let det = mat2_det(&g);
    let disc = &tr * &tr - BigInt::from(4) * det;
    let lam = QuadraticSurd::from_discriminant_in(tr, BigInt::one(), BigInt::from(2), disc, x.d)?;
    Ok(PeriodData {
        ell: cf.period.len(),
        strip: cf.preperiod.len(),
        lambda_g: lam.to_f64(),
        lambda_g_exact: lam,
        periodic_part: periodic,
        g,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Theta {
    Surd(QuadraticSurd),
    Real(f64),
}

/// θ ↦ (aθ+b)/(cθ+d).
pub fn morita_theta_action(theta: &Theta, g: &Mat2) -> Result<Theta> {
    match theta {
        Theta::Surd(s) => Ok(Theta::Surd(s.mobius(g)?)),
        Theta::Real(t) => {
            let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
            let den = f(&g[1][0]) * t + f(&g[1][1]);
            if den == 0.0 {
                return domain("pole: cθ + d = 0");
            }
            Ok(Theta::Real((f(&g[0][0]) * t + f(&g[0][1])) / den))
        }
    }
}
