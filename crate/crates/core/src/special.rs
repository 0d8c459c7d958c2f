//! Complex Gamma and Hurwitz zeta.
//!
//! Gamma uses the Lanczos approximation (g = 7, nine terms) with the
//! reflection formula on the left half plane. The Hurwitz zeta function and
//! its derivative in `s` come from an Euler–Maclaurin expansion, which also
//! provides the analytic continuation to `Re s <= 1` (except the pole at 1).

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// B_2, B_4, ..., B_28.
const BERNOULLI_EVEN: [f64; 14] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
];

/// True when `z` sits on a pole of Gamma (a nonpositive integer).
pub fn is_gamma_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal-ish branch of log Gamma; exact up to multiples of 2πi in the
/// reflected region, which is harmless for everything built on `exp`.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = (z * PI).sin();
        return C64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(C64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    C64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

/// Gamma on the complex plane. Returns an infinite value at poles.
pub fn gamma(z: C64) -> C64 {
    if is_gamma_pole(z) {
        return C64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return C64::new(PI, 0.0) / (s * gamma(C64::new(1.0, 0.0) - z));
    }
    ln_gamma(z).exp()
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(C64::new(x, 0.0)).re
}

/// Generalized binomial coefficient C(w + j − 1, j) = (w)_j / j!.
///
/// Evaluated as a rising product, which stays accurate for the moderate `j`
/// used by the transfer matrices and never hits a Gamma pole.
pub fn rising_binomial(w: C64, j: usize) -> C64 {
    let mut r = C64::new(1.0, 0.0);
    for i in 0..j {
        r *= (w + i as f64) / (i as f64 + 1.0);
    }
    r
}

/// Hurwitz zeta ζ(s, a) together with ∂ζ/∂s.
///
/// Requires `Re a > 0` and `s != 1`.
pub fn hurwitz_zeta_with_derivative(s: C64, a: C64) -> (C64, C64) {
    let radius = s.norm().max(10.0) + 12.0;
    let n = if a.re >= radius {
        0
    } else {
        (radius - a.re).ceil() as usize
    };

    let mut z = C64::new(0.0, 0.0);
    let mut dz = C64::new(0.0, 0.0);
    for k in 0..n {
        let base = a + k as f64;
        let lb = base.ln();
        let t = (-s * lb).exp();
        z += t;
        dz -= lb * t;
    }

    let x = a + n as f64;
    let lx = x.ln();
    let xs = (-s * lx).exp(); // x^{-s}
    let sm1 = s - 1.0;
    let x1s = xs * x; // x^{1-s}
    z += x1s / sm1 + xs * 0.5;
    dz += x1s * (-lx / sm1 - C64::new(1.0, 0.0) / (sm1 * sm1)) - lx * xs * 0.5;

    // Σ_j B_{2j}/(2j)! · (s)_{2j−1} · x^{−s−2j+1}
    let mut poch = s; // (s)_{2j-1}, starting at j = 1
    let mut dpoch = C64::new(1.0, 0.0);
    let mut fact = 2.0; // (2j)!
    let mut xpow = xs / x; // x^{-s-1}
    let inv_x2 = C64::new(1.0, 0.0) / (x * x);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let coef = *b / fact;
        let term = poch * xpow * coef;
        let dterm = (dpoch - lx * poch) * xpow * coef;
        z += term;
        dz += dterm;
        if term.norm() <= 1e-18 * z.norm() && dterm.norm() <= 1e-18 * dz.norm() {
            break;
        }
        // advance (s)_{2j-1} -> (s)_{2j+1}
        let jj = (j + 1) as f64;
        for shift in [2.0 * jj - 1.0, 2.0 * jj] {
            let f = s + shift;
            dpoch = dpoch * f + poch;
            poch *= f;
        }
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        xpow *= inv_x2;
    }
    (z, dz)
}

pub fn hurwitz_zeta(s: C64, a: C64) -> C64 {
    hurwitz_zeta_with_derivative(s, a).0
}

pub fn hurwitz_zeta_real(s: f64, a: f64) -> f64 {
    hurwitz_zeta(C64::new(s, 0.0), C64::new(a, 0.0)).re
}

/// Riemann zeta for real s > 1 (and its continuation elsewhere except s = 1).
pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta_real(s, 1.0)
}
