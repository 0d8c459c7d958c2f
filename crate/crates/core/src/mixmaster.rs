//! Kasner eras of the mixmaster universe as the continued-fraction shift on
//! [0,1] × ℙ¹(F₂), with axis labels carried by the coset component.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contfrac::{gauss_shift, generalized_shift, CosetSpace, QuadraticSurd};
use crate::error::{domain, Result};
use crate::linalg::{smith_invariants, IntMatrix};

/// Exponents (p₁, p₂, p₃) of the Kasner metric at parameter u.
pub fn kasner_exponents(u: f64) -> (f64, f64, f64) {
    let d = 1.0 + u + u * u;
    (-u / d, (1.0 + u) / d, u * (1.0 + u) / d)
}

/// Space axis named by a point of ℙ¹(F₂): 0 ↦ z, ∞ ↦ y, 1 ↦ x.
pub fn axis_name(p: &CosetSpace, s: usize) -> char {
    match p.points()[s] {
        (0, 1) => 'z',
        (1, 0) => 'y',
        _ => 'x',
    }
}

#[derive(Clone, Debug)]
pub enum Orbit {
    Surd(QuadraticSurd),
    Digits(Vec<u64>),
}

#[derive(Clone, Debug, Serialize)]
pub struct Era {
    pub index: usize,
    /// Number of cycles k = ⌊u⌋.
    pub k: u64,
    /// u at the start of the era; the cycles run through u, u−1, …, u−k+1.
    pub u: f64,
    pub cycles: Vec<f64>,
    pub v: Option<f64>,
    /// Coset index of the axis label in ℙ¹(F₂) and its axis name.
    pub axis: usize,
    pub axis_label: String,
    pub axis_name: char,
    pub exponents: (f64, f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct Evolution {
    pub eras: Vec<Era>,
    /// The input ran out of digits (rational start or finite stream).
    pub truncated: bool,
    #[serde(skip)]
    pub states: Vec<QuadraticSurd>,
}

/// Runs `eras` Kasner eras from x₀ with axis label `s0`; `v0` enables the
/// amplitude recursion y ↦ 1/(y + k), y = 1/v.
pub fn evolve(x0: &Orbit, s0: usize, eras: usize, v0: Option<f64>) -> Result<Evolution> {
    let p = CosetSpace::new(2)?;
    if s0 >= p.len() {
        return domain("axis label must be a point of P1(F2)");
    }
    if eras == 0 {
        return domain("need at least one era");
    }
    let mut out = Vec::with_capacity(eras);
    let mut states = Vec::new();
    let mut s = s0;
    let mut y = match v0 {
        Some(v) if v <= 0.0 => return domain("v must be positive"),
        Some(v) => Some(1.0 / v),
        None => None,
    };
    let mut truncated = false;
    let mut push = |n: usize, k: u64, u: f64, s: usize, y: Option<f64>| {
        out.push(Era {
            index: n,
            k,
            u,
            cycles: (0..k.min(1 << 16)).map(|j| u - j as f64).collect(),
            v: y.map(|y| 1.0 / y),
            axis: s,
            axis_label: p.label(s),
            axis_name: axis_name(&p, s),
            exponents: kasner_exponents(u),
        });
    };
    match x0 {
        Orbit::Surd(x) => {
            if x.signum() != std::cmp::Ordering::Greater || x.floor() != 0.into() {
                return domain("x0 must lie in (0,1)");
            }
            let mut x = x.clone();
            for n in 0..eras {
                if x.is_zero() {
                    truncated = true;
                    break;
                }
                let inv = x.recip()?;
                let k = num_traits::ToPrimitive::to_u64(&inv.floor()).ok_or(crate::Error::Overflow)?;
                push(n, k, inv.to_f64(), s, y);
                states.push(x.clone());
                let (tx, ts) = generalized_shift(&x, s, &p)?;
                debug_assert_eq!(tx, gauss_shift(&x)?);
                x = tx;
                s = ts;
                y = y.map(|y| 1.0 / (y + k as f64));
            }
        }
        Orbit::Digits(d) => {
            if d.contains(&0) {
                return domain("continued-fraction digits must be positive");
            }
            // u_n = k_n + x_{n+1} needs the tail; evaluate it backwards
            let tails = digit_tails(d);
            for n in 0..eras {
                let Some(&k) = d.get(n) else {
                    truncated = true;
                    break;
                };
                push(n, k, k as f64 + tails[n + 1], s, y);
                s = p.shift_act(k, s);
                y = y.map(|y| 1.0 / (y + k as f64));
            }
        }
    }
    Ok(Evolution { eras: out, truncated, states })
}

/// tails[n] = [0; d_n, d_{n+1}, …] for a finite stream (0 past the end).
fn digit_tails(d: &[u64]) -> Vec<f64> {
    let mut t = vec![0.0; d.len() + 1];
    for n in (0..d.len()).rev() {
        t[n] = 1.0 / (d[n] as f64 + t[n + 1]);
    }
    t
}

/// A point drawn from the Gauss measure dx/((1+x) log 2): x = 2^U − 1.
pub fn gauss_sample(u: f64) -> f64 {
    u.exp2() - 1.0
}

#[derive(Clone, Debug, Serialize)]
pub struct AxisStatistics {
    pub steps: u64,
    /// Frequencies of the labels 0, 1, ∞ (axes z, x, y).
    pub frequencies: [f64; 3],
    /// Binomial standard error √(p(1−p)/n) at p = 1/3.
    pub standard_error: f64,
    /// max |f − 1/3| / standard_error
    pub max_deviation_sigmas: f64,
}

/// Frequencies of the dominant axis over `samples` orbits of `eras` era
/// steps each, x₀ from the Gauss measure and s₀ uniform on ℙ¹(F₂).
pub fn axis_statistics(samples: u64, eras: u64, seed: u64) -> Result<AxisStatistics> {
    axis_statistics_with(samples, eras, seed, |rng| gauss_sample(rng.random::<f64>()))
}

/// As `axis_statistics`, with a caller-supplied sampler for x₀.
pub fn axis_statistics_with(
    samples: u64,
    eras: u64,
    seed: u64,
    mut sampler: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> Result<AxisStatistics> {
    if samples == 0 || eras == 0 {
        return domain("need at least one sample and one era");
    }
    let p = CosetSpace::new(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0u64; 3];
    for _ in 0..samples {
        let mut x = sampler(&mut rng);
        let mut s = rng.random_range(0..3usize);
        for _ in 0..eras {
            counts[s] += 1;
            if !(x > 0.0) {
                // landed on a rational point: restart from a fresh sample
                x = sampler(&mut rng);
            }
            let inv = 1.0 / x;
            let k = inv.floor();
            x = inv - k;
            s = p.shift_act(k as u64, s);
        }
    }
    let n = samples * eras;
    let frequencies = counts.map(|c| c as f64 / n as f64);
    let se = (2.0 / 9.0 / n as f64).sqrt();
    let dev = frequencies.iter().map(|f| (f - 1.0 / 3.0).abs() / se).fold(0.0, f64::max);
    Ok(AxisStatistics { steps: n, frequencies, standard_error: se, max_deviation_sigmas: dev })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovMatrix {
    pub digits: u64,
    /// Rows (k, t), columns (ℓ, s), index 3(k−1) + t with t ∈ (0, 1, ∞).
    pub entries: Vec<Vec<u8>>,
}

impl MarkovMatrix {
    /// The 3×3 block (rows t, columns s) for digits k, ℓ.
    pub fn block(&self, k: u64, l: u64) -> [[u8; 3]; 3] {
        let mut b = [[0; 3]; 3];
        for (t, row) in b.iter_mut().enumerate() {
            for (s, v) in row.iter_mut().enumerate() {
                *v = self.entries[3 * (k as usize - 1) + t][3 * (l as usize - 1) + s];
            }
        }
        b
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        self.entries.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect()
    }
}

/// A_{(k,t),(ℓ,s)} = 1 iff ((0,1),(1,ℓ))·s = t in ℙ¹(F₂).
pub fn markov_matrix(digits: u64) -> Result<MarkovMatrix> {
    if digits == 0 {
        return domain("digit bound must be positive");
    }
    if digits > 4096 {
        return Err(crate::Error::Budget("digit bound too large for a dense matrix".into()));
    }
    let p = CosetSpace::new(2)?;
    let n = 3 * digits as usize;
    let mut entries = vec![vec![0u8; n]; n];
    for k in 0..digits as usize {
        for l in 1..=digits {
            for s in 0..3 {
                let t = p.digit_act(l, s);
                entries[3 * k + t][3 * (l as usize - 1) + s] = 1;
            }
        }
    }
    Ok(MarkovMatrix { digits, entries })
}

/// Both descriptions of the axis action agree: the era shift by digit k
/// undoes the Markov-partition map ((0,1),(1,k)) on ℙ¹(F₂).
pub fn axis_descriptions_agree() -> Result<bool> {
    let p = CosetSpace::new(2)?;
    Ok((1..=2).all(|k| (0..3).all(|s| p.shift_act(k, p.digit_act(k, s)) == s)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KGroups {
    /// K₀ = ℤ^free_rank ⊕ ⊕ ℤ/d for d in torsion.
    pub k0_free_rank: usize,
    pub k0_torsion: Vec<i128>,
    pub k1_rank: usize,
}

/// Cuntz–Krieger invariants: K₀ = coker(1 − Aᵀ), K₁ = ker(1 − Aᵀ).
pub fn ck_ktheory(a: &IntMatrix) -> Result<KGroups> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return domain("matrix must be square");
    }
    if a.iter().flatten().any(|&x| x != 0 && x != 1) {
        return domain("matrix must have 0/1 entries");
    }
    let m: IntMatrix = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j) - a[j][i]).collect())
        .collect();
    let inv = smith_invariants(&m)?;
    let free = n - inv.len();
    Ok(KGroups {
        k0_free_rank: free,
        k0_torsion: inv.into_iter().filter(|&d| d > 1).collect(),
        k1_rank: free,
    })
}

/// The 2g × 2g transition matrix of reduced words in a free group on g
/// generators: A_{ij} = 1 unless |i − j| = g.
pub fn schottky_subshift_matrix(g: usize) -> IntMatrix {
    (0..2 * g)
        .map(|i| (0..2 * g).map(|j| i128::from(i.abs_diff(j) != g)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    const EVEN: [[u8; 3]; 3] = [[0, 0, 1], [0, 1, 0], [1, 0, 0]];
    const ODD: [[u8; 3]; 3] = [[0, 0, 1], [1, 0, 0], [0, 1, 0]];

    #[test]
    fn kasner_at_one() {
        let (a, b, c) = kasner_exponents(1.0);
        assert!((a + 1.0 / 3.0).abs() < 1e-15 && (b - 2.0 / 3.0).abs() < 1e-15 && (c - 2.0 / 3.0).abs() < 1e-15);
        let (a, b, c) = kasner_exponents(1e6);
        assert!(a.abs() < 1e-5 && b.abs() < 1e-5 && (c - 1.0).abs() < 1e-5);
        let (a2, _, c2) = kasner_exponents(1e5);
        assert!(a2.abs() > a.abs() && c2 < c);
    }

    #[test]
    fn first_era_counts_cycles() {
        // 1/x starts with 3: x = 1/(3 + golden)
        let g = QuadraticSurd::new(-1, 1, 2, 5).unwrap();
        let x = g.add_int(&3.into()).recip().unwrap();
        let e = evolve(&Orbit::Surd(x), 0, 4, Some(1.0)).unwrap();
        assert_eq!(e.eras[0].k, 3);
        assert_eq!(e.eras[0].cycles.len(), 3);
        assert!(e.eras[0].cycles[2] > 1.0 && e.eras[0].cycles[2] < 2.0);
        assert_eq!(e.eras[1].k, 1);
        assert!(!e.truncated);
    }

    #[test]
    fn even_digit_sends_zero_to_infinity() {
        let p = CosetSpace::new(2).unwrap();
        let e = evolve(&Orbit::Digits(vec![2, 1, 1]), 0, 2, None).unwrap();
        assert_eq!(e.eras[0].axis_label, "0");
        assert_eq!(e.eras[1].axis, p.identity());
        assert_eq!(e.eras[1].axis_name, 'y');
    }

    #[test]
    fn rational_start_truncates() {
        let x = QuadraticSurd::rational(2, 5).unwrap();
        let e = evolve(&Orbit::Surd(x), 0, 10, None).unwrap();
        assert!(e.truncated);
        assert_eq!(e.eras.iter().map(|r| r.k).collect::<Vec<_>>(), vec![2, 2]);
    }

    #[test]
    fn evolution_is_the_generalized_shift() {
        let p = CosetSpace::new(2).unwrap();
        let x0 = QuadraticSurd::new(0, 1, 1, 7).unwrap().sub(&QuadraticSurd::integer(2)).unwrap();
        let e = evolve(&Orbit::Surd(x0.clone()), 2, 30, None).unwrap();
        let (mut x, mut s) = (x0, 2);
        for era in &e.eras {
            assert_eq!(e.states[era.index], x);
            assert_eq!(era.axis, s);
            (x, s) = generalized_shift(&x, s, &p).unwrap();
        }
    }

    #[test]
    fn amplitude_recursion() {
        let e = evolve(&Orbit::Digits(vec![1, 2, 3]), 0, 3, Some(1.0)).unwrap();
        // y: 1 → 1/2 → 2/5
        assert_eq!(e.eras[1].v, Some(2.0));
        assert!((e.eras[2].v.unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn golden_sampler_cycles_all_axes() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let st = axis_statistics_with(1, 3000, 1, |_| g).unwrap();
        // digit 1 permutes ℙ¹(F₂) as a 3-cycle; float drift stays on the
        // digit-1 orbit long enough for exact thirds over whole cycles
        for f in st.frequencies {
            assert!((f - 1.0 / 3.0).abs() < 0.02, "{:?}", st.frequencies);
        }
        let det = axis_statistics_with(1, 30, 1, |_| g).unwrap();
        assert_eq!(det.frequencies, [1.0 / 3.0; 3]);
    }

    #[test]
    fn statistics_repeat_with_seed() {
        let a = axis_statistics(1000, 10, 7).unwrap();
        let b = axis_statistics(1000, 10, 7).unwrap();
        assert_eq!(a.frequencies, b.frequencies);
    }

    #[test]
    fn gauss_sampler_passes_kolmogorov_smirnov() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n).map(|_| gauss_sample(rng.random::<f64>())).collect();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = (1.0 + x).log2();
                (f - i as f64 / n as f64).abs().max((f - (i + 1) as f64 / n as f64).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value
        assert!(d < 1.63 / (n as f64).sqrt(), "KS {d}");
    }

    #[test]
    fn markov_blocks_follow_parity() {
        for n in 1..=8 {
            let m = markov_matrix(n).unwrap();
            for k in 1..=n {
                for l in 1..=n {
                    assert_eq!(m.block(k, l), if l % 2 == 0 { EVEN } else { ODD });
                }
            }
        }
        assert!(axis_descriptions_agree().unwrap());
    }

    #[test]
    fn k_theory_examples() {
        assert_eq!(ck_ktheory(&vec![vec![1]]).unwrap(), KGroups { k0_free_rank: 1, k0_torsion: vec![], k1_rank: 1 });
        // free group on 2 generators: 1 − Aᵀ has rank 2 with unit invariants
        let s = ck_ktheory(&schottky_subshift_matrix(2)).unwrap();
        assert_eq!(s, KGroups { k0_free_rank: 2, k0_torsion: vec![], k1_rank: 2 });
        let m = ck_ktheory(&markov_matrix(2).unwrap().to_int_matrix()).unwrap();
        assert_eq!(m, KGroups { k0_free_rank: 0, k0_torsion: vec![2], k1_rank: 0 });
    }

    proptest! {
        #[test]
        fn kasner_constraints(u in -1e3f64..1e3) {
            let (a, b, c) = kasner_exponents(u);
            prop_assert!((a + b + c - 1.0).abs() < 1e-14);
            prop_assert!((a * a + b * b + c * c - 1.0).abs() < 1e-14);
        }

        #[test]
        fn k_groups_survive_relabeling(bits in prop::collection::vec(0i128..2, 25), perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
            let a: IntMatrix = bits.chunks(5).map(|r| r.to_vec()).collect();
            let b: IntMatrix = (0..5).map(|i| (0..5).map(|j| a[perm[i]][perm[j]]).collect()).collect();
            prop_assert_eq!(ck_ktheory(&a).unwrap(), ck_ktheory(&b).unwrap());
        }
    }
}
