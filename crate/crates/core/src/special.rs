//! Gamma-type functions with complex arguments and the Hurwitz zeta function.

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

/// Even-index Bernoulli numbers B_2, B_4, ..., B_30.
const BERNOULLI_EVEN: [f64; 15] = [
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
    8615841276005.0 / 14322.0,
];

/// log Γ(z) for Re z ≥ 1/2 (Lanczos, g = 7).
fn ln_gamma_right(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Γ(z) for complex z; returns infinity at the poles.
pub fn cgamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let s = (PI * z).sin();
        if s.norm() == 0.0 {
            return C64::new(f64::INFINITY, 0.0);
        }
        PI / (s * cgamma(1.0 - z))
    } else {
        ln_gamma_right(z).exp()
    }
}

/// 1/Γ(z), entire; exactly zero at non-positive integers.
pub fn rgamma(z: C64) -> C64 {
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return C64::new(0.0, 0.0);
        }
        (PI * z).sin() * cgamma(1.0 - z) / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

pub fn gamma(x: f64) -> f64 {
    if x > 0.5 {
        ln_gamma_right(C64::new(x, 0.0)).re.exp()
    } else {
        cgamma(C64::new(x, 0.0)).re
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    if x >= 0.5 {
        ln_gamma_right(C64::new(x, 0.0)).re
    } else {
        (PI / (PI * x).sin()).ln() - ln_gamma_right(C64::new(1.0 - x, 0.0)).re
    }
}

/// ψ(x) for real x > 0.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let series = x2 * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 / 132.0))));
    acc + x.ln() - 0.5 / x - series
}

/// Generalized binomial coefficient binom(z, k).
pub fn binom(z: C64, k: usize) -> C64 {
    let mut out = C64::new(1.0, 0.0);
    for i in 0..k {
        out *= (z - i as f64) / (i as f64 + 1.0);
    }
    out
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

fn near_integer(s: C64) -> Option<i64> {
    let r = s.re.round();
    if s.im.abs() < 1e-12 && (s.re - r).abs() < 1e-12 {
        Some(r as i64)
    } else {
        None
    }
}

/// Hurwitz zeta ζ(s, a) for complex s and real a > 0, by Euler–Maclaurin.
///
/// At the pole s = 1 the finite part −ψ(a) is returned.
pub fn hurwitz_zeta(s: C64, a: f64) -> C64 {
    assert!(a > 0.0, "hurwitz_zeta needs a > 0");
    let pole = near_integer(s) == Some(1);
    let n = 12 + s.norm().ceil() as usize;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (a + k as f64).ln()).exp();
    }
    let b = a + n as f64;
    let lb = b.ln();
    if pole {
        sum -= lb;
    } else {
        sum += ((1.0 - s) * lb).exp() / (s - 1.0);
    }
    let bs = (-s * lb).exp();
    sum += 0.5 * bs;
    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * b^{-s-2j+1}
    let mut poch = s;
    let mut bpow = bs / b;
    let mut fact = 2.0;
    for (j, &b2j) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b2j / fact * poch * bpow;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
        let k = 2 * j + 1;
        poch *= (s + k as f64) * (s + (k + 1) as f64);
        bpow /= b * b;
        fact *= ((k + 2) * (k + 3)) as f64;
    }
    sum
}

/// Taylor coefficients c_n of t ↦ ζ(s, a + t) at t = 0, for |t| < a.
///
/// Coefficients are binom(−s, n)·ζ(s + n, a); when s is a non-positive integer −q the
/// expansion is the polynomial −B_{q+1}(a + t)/(q + 1) and the degree-(q+1) coefficient
/// is the finite limit −1/(q+1).
pub fn hurwitz_taylor(s: C64, a: f64, nmax: usize) -> Vec<C64> {
    let int = near_integer(s);
    let mut out = Vec::with_capacity(nmax + 1);
    let mut bin = C64::new(1.0, 0.0);
    for n in 0..=nmax {
        let c = match int {
            Some(q) if q <= 0 && n as i64 == 1 - q => C64::new(-1.0 / n as f64, 0.0),
            Some(q) if q <= 0 && n as i64 > 1 - q => C64::new(0.0, 0.0),
            _ => bin * hurwitz_zeta(s + n as f64, a),
        };
        out.push(c);
        bin *= (-s - n as f64) / (n as f64 + 1.0);
    }
    out
}

/// The Bernoulli polynomial B_n(x), n ≤ 8 (test and oracle helper).
pub fn bernoulli_poly(n: usize, x: f64) -> f64 {
    let bnum = |k: usize| -> f64 {
        match k {
            0 => 1.0,
            1 => -0.5,
            k if k % 2 == 1 => 0.0,
            k => BERNOULLI_EVEN[k / 2 - 1],
        }
    };
    (0..=n)
        .map(|k| binom(C64::new(n as f64, 0.0), k).re * bnum(k) * x.powi((n - k) as i32))
        .sum()
}
