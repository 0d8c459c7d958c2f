//! Coset homology of modular curves and limiting modular symbols.
//!
//! Cosets of Γ₀(N) in PSL₂(ℤ) are the points of ℙ¹(ℤ/N). The relative
//! homology is presented by ℤ^|ℙ| → ℤ^|ℙ_I| ⊕ ℤ^|ℙ_R|, where ℙ_I and ℙ_R are
//! the orbits of the order-2 element σ and the order-3 element τ.

pub mod levy;

use serde::Serialize;

use crate::contfrac::{cf_expand, generalized_shift, surd_period_matrix, CosetSpace, QuadraticSurd};
use crate::error::{domain, Result};
use crate::linalg::{integer_kernel, mat_vec, smith_invariants, IntMatrix};

/// Integer coefficients indexed by the points of a coset space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolVector(pub Vec<i64>);

impl SymbolVector {
    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn delta(len: usize, s: usize) -> Self {
        let mut v = Self::zero(len);
        v.0[s] = 1;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// s ↦ λ_{σs}.
    pub fn sigma_reindex(&self, p: &CosetSpace) -> Self {
        Self((0..self.len()).map(|s| self.0[p.sigma(s)]).collect())
    }

    /// The class s ↦ Δ_x(s) = λ_s − λ_{σs}.
    pub fn antisymmetrize(&self, p: &CosetSpace) -> Self {
        Self((0..self.len()).map(|s| intersection_number(self, s, p)).collect())
    }
}

/// Δ_x(s) = λ_s − λ_{σs}.
pub fn intersection_number(x: &SymbolVector, s: usize, p: &CosetSpace) -> i64 {
    x.0[s] - x.0[p.sigma(s)]
}

fn orbits(len: usize, f: impl Fn(usize) -> usize) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; len];
    let mut out = Vec::new();
    for s in 0..len {
        if seen[s] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut t = s;
        while !seen[t] {
            seen[t] = true;
            orbit.push(t);
            t = f(t);
        }
        if t != s {
            return domain("action table is not a permutation");
        }
        out.push(orbit);
    }
    Ok(out)
}

fn orbit_matrix(orbits: &[Vec<usize>], len: usize) -> IntMatrix {
    orbits
        .iter()
        .map(|o| {
            let mut row = vec![0i128; len];
            for &s in o {
                row[s] = 1;
            }
            row
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyPresentation {
    pub level: u64,
    pub beta_i: Vec<Vec<i64>>,
    pub beta_r: Vec<Vec<i64>>,
    pub kernel: Vec<SymbolVector>,
    pub points: usize,
    pub sigma_orbits: usize,
    pub tau_orbits: usize,
    /// |ℙ| − |ℙ_I| − |ℙ_R| + 1.
    pub euler_count: i64,
    /// Every invariant factor of the stacked presentation is 1.
    pub torsion_free: bool,
}

impl HomologyPresentation {
    pub fn kernel_rank(&self) -> usize {
        self.kernel.len()
    }

    /// β_I x = 0 and β_R x = 0.
    pub fn annihilates(&self, x: &SymbolVector) -> bool {
        self.beta_i
            .iter()
            .chain(&self.beta_r)
            .all(|row| row.iter().zip(&x.0).map(|(a, b)| a * b).sum::<i64>() == 0)
    }
}

pub fn homology_presentation(p: &CosetSpace) -> Result<HomologyPresentation> {
    let n = p.len();
    let oi = orbits(n, |s| p.sigma(s))?;
    let or = orbits(n, |s| p.tau(s))?;
    let bi = orbit_matrix(&oi, n);
    let br = orbit_matrix(&or, n);
    let stacked: IntMatrix = bi.iter().chain(&br).cloned().collect();
    let kernel = integer_kernel(&stacked, n)?;
    for v in &kernel {
        if mat_vec(&stacked, v).iter().any(|&x| x != 0) {
            return Err(crate::Error::Numerical("kernel vector not annihilated".into()));
        }
    }
    let invariants = smith_invariants(&stacked)?;
    let small = |m: &IntMatrix| m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    Ok(HomologyPresentation {
        level: p.modulus(),
        beta_i: small(&bi),
        beta_r: small(&br),
        kernel: kernel
            .into_iter()
            .map(|v| SymbolVector(v.into_iter().map(|x| x as i64).collect()))
            .collect(),
        points: n,
        sigma_orbits: oi.len(),
        tau_orbits: or.len(),
        euler_count: n as i64 - oi.len() as i64 - or.len() as i64 + 1,
        torsion_free: invariants.iter().all(|&d| d == 1),
    })
}

/// Limiting modular symbol of a quadratic irrationality.
///
/// The sum runs over the joint period of (digits, coset): `cycles` copies of
/// the continued-fraction period, the fewest that bring the coset back.
#[derive(Clone, Debug, Serialize)]
pub struct LimitingSymbol {
    pub level: u64,
    /// Visit counts of each coset over one joint period.
    pub counts: SymbolVector,
    pub steps: usize,
    /// Continued-fraction period ℓ and the number of them per joint period.
    pub ell: usize,
    pub cycles: usize,
    /// Preperiod digits consumed before the periodic sum starts.
    pub strip: usize,
    pub start_coset: usize,
    pub lambda_g: f64,
    /// λ(β) = 2 log Λ_g / ℓ.
    pub lyapunov: f64,
    /// counts / (λ(β) · steps)
    pub by_lyapunov: Vec<f64>,
    /// counts / (cycles · log Λ_g)
    pub by_log_eigenvalue: Vec<f64>,
    /// by_log_eigenvalue / by_lyapunov; identically 2.
    pub normalization_ratio: f64,
    /// Δ of the integer counts is annihilated by β_I and β_R.
    pub antisymmetric_in_kernel: bool,
}

pub fn limiting_symbol_closed(beta: &QuadraticSurd, p: &CosetSpace) -> Result<LimitingSymbol> {
    let cf = cf_expand(beta)?;
    if cf.is_rational() {
        return domain("rational endpoint: the limiting symbol is a cusp");
    }
    let period = surd_period_matrix(beta)?;
    let mut s = p.identity();
    for &k in &cf.preperiod {
        s = p.shift_act(k, s);
    }
    let start = s;
    let mut counts = vec![0i64; p.len()];
    let mut cycles = 0;
    loop {
        for &k in &cf.period {
            s = p.shift_act(k, s);
            counts[s] += 1;
        }
        cycles += 1;
        if s == start {
            break;
        }
    }
    let ell = cf.period.len();
    let steps = ell * cycles;
    let log_l = period.lambda_g.ln().abs();
    let lyapunov = 2.0 * log_l / ell as f64;
    let by_lyapunov = counts.iter().map(|&c| c as f64 / (lyapunov * steps as f64)).collect();
    let by_log_eigenvalue = counts.iter().map(|&c| c as f64 / (cycles as f64 * log_l)).collect();
    let counts = SymbolVector(counts);
    let h = homology_presentation(p)?;
    Ok(LimitingSymbol {
        level: p.modulus(),
        antisymmetric_in_kernel: h.annihilates(&counts.antisymmetrize(p)),
        counts,
        steps,
        ell,
        cycles,
        strip: cf.preperiod.len(),
        start_coset: start,
        lambda_g: period.lambda_g,
        lyapunov,
        by_lyapunov,
        by_log_eigenvalue,
        normalization_ratio: lyapunov * steps as f64 / (cycles as f64 * log_l),
    })
}

/// Birkhoff average (1/(λ n)) Σ_{k=1}^n δ_{T^k t₀}.
#[derive(Clone, Debug, Serialize)]
pub struct ErgodicSymbol {
    pub level: u64,
    pub counts: SymbolVector,
    pub steps: usize,
    pub lyapunov: f64,
    pub vector: Vec<f64>,
}

impl ErgodicSymbol {
    fn new(p: &CosetSpace, counts: Vec<i64>, steps: usize, lyapunov: f64) -> Self {
        let vector = counts.iter().map(|&c| c as f64 / (lyapunov * steps as f64)).collect();
        Self { level: p.modulus(), counts: SymbolVector(counts), steps, lyapunov, vector }
    }

    /// Euclidean norm of s ↦ v_s − v_{σs}.
    pub fn antisymmetric_norm(&self, p: &CosetSpace) -> f64 {
        (0..self.vector.len())
            .map(|s| (self.vector[s] - self.vector[p.sigma(s)]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Exact equality of the rational parts counts/steps.
    pub fn same_average(&self, counts: &SymbolVector, steps: usize) -> bool {
        self.counts
            .0
            .iter()
            .zip(&counts.0)
            .all(|(&a, &b)| a as i128 * steps as i128 == b as i128 * self.steps as i128)
    }
}

/// Exact surd dynamics: n generalized shifts starting from the identity
/// coset, normalized by the exact λ(β) of the period.
pub fn limiting_symbol_ergodic(beta: &QuadraticSurd, p: &CosetSpace, n: usize) -> Result<ErgodicSymbol> {
    if n == 0 {
        return domain("need at least one iteration");
    }
    let period = surd_period_matrix(beta)?;
    let lyapunov = 2.0 * period.lambda_g.ln().abs() / period.ell as f64;
    let mut x = beta.sub(&QuadraticSurd::integer(beta.floor()))?;
    let mut s = p.identity();
    let mut counts = vec![0i64; p.len()];
    for _ in 0..n {
        let (tx, ts) = generalized_shift(&x, s, p)?;
        x = tx;
        s = ts;
        counts[s] += 1;
    }
    Ok(ErgodicSymbol::new(p, counts, n, lyapunov))
}

/// The same average along an arbitrary digit stream; λ is estimated as
/// (2/n) log q_n through q_k/q_{k−1} = k_k + q_{k−2}/q_{k−1}.
pub fn limiting_symbol_digits(digits: &[u64], p: &CosetSpace) -> Result<ErgodicSymbol> {
    if digits.is_empty() {
        return domain("need at least one digit");
    }
    if digits.contains(&0) {
        return domain("continued-fraction digits must be positive");
    }
    let mut s = p.identity();
    let mut counts = vec![0i64; p.len()];
    let mut log_q = 0.0;
    let mut r = f64::INFINITY;
    for &k in digits {
        r = k as f64 + 1.0 / r;
        log_q += r.ln();
        s = p.shift_act(k, s);
        counts[s] += 1;
    }
    let lyapunov = 2.0 * log_q / digits.len() as f64;
    Ok(ErgodicSymbol::new(p, counts, digits.len(), lyapunov))
}
