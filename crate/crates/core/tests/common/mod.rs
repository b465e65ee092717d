//! Independent reference computations used by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Hankel function `H1^(1)(z)` from its large-argument expansion, accurate to
/// about `1e-12` for `z > 500`.
pub fn hankel1_1(z: f64) -> Complex64 {
    // Coefficients of i^k / z^k for order one:
    // a1 = 3 / 8, a2 = 3 (-5) / (2! 8^2), a3 = 3 (-5) (-21) / (3! 8^3).
    let a = [1.0, 3.0 / 8.0, -15.0 / 128.0, 105.0 / 1024.0];
    let mut series = Complex64::new(0.0, 0.0);
    let mut ik = Complex64::new(1.0, 0.0);
    for (k, ak) in a.iter().enumerate() {
        series += ik * ak / z.powi(k as i32);
        ik *= Complex64::i();
    }
    (2.0 / (PI * z)).sqrt() * Complex64::from_polar(1.0, z - 0.75 * PI) * series
}

/// Two-dimensional Rayleigh-Sommerfeld (first kind) diffraction integral by
/// direct summation over the input samples:
/// `U(x, z) = sum U0(x') (i k z / (2 r)) H1(k r) dx'`.
pub fn rayleigh_sommerfeld(
    input: &[Complex64],
    x_in: &[f64],
    pitch: f64,
    wavelength: f64,
    z: f64,
    x_out: &[f64],
) -> Vec<Complex64> {
    let k = 2.0 * PI / wavelength;
    x_out
        .iter()
        .map(|&x| {
            input
                .iter()
                .zip(x_in)
                .filter(|(u, _)| u.norm_sqr() > 0.0)
                .map(|(u, &xp)| {
                    let r = ((x - xp).powi(2) + z * z).sqrt();
                    u * Complex64::new(0.0, k * z / (2.0 * r)) * hankel1_1(k * r) * pitch
                })
                .sum()
        })
        .collect()
}

/// Fresnel diffraction integral by direct summation, up to the constant
/// prefactor: `sum U0(x') exp(i pi (x - x')^2 / (lambda z)) dx'`.
pub fn fresnel(
    input: &[Complex64],
    x_in: &[f64],
    pitch: f64,
    wavelength: f64,
    z: f64,
    x_out: &[f64],
) -> Vec<Complex64> {
    let c = PI / (wavelength * z);
    let support: Vec<(Complex64, f64)> = input
        .iter()
        .zip(x_in)
        .filter(|(u, _)| u.norm_sqr() > 0.0)
        .map(|(u, &x)| (*u, x))
        .collect();
    x_out
        .iter()
        .map(|&x| {
            support
                .iter()
                .map(|(u, xp)| u * Complex64::from_polar(pitch, c * (x - xp).powi(2)))
                .sum()
        })
        .collect()
}

pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Equal-tailed interval `[lo, hi]` of Binomial(n, p) holding at least
/// `coverage` of the probability.
pub fn binomial_interval(n: u64, p: f64, coverage: f64) -> (u64, u64) {
    let tail = (1.0 - coverage) / 2.0;
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    // log C(n, k) built up incrementally.
    let mut ln_choose = 0.0;
    let mut cdf = 0.0;
    let mut lo = None;
    let mut hi = n;
    for k in 0..=n {
        if k > 0 {
            ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let pmf = (ln_choose + k as f64 * ln_p + (n - k) as f64 * ln_q).exp();
        cdf += pmf;
        if lo.is_none() && cdf > tail {
            lo = Some(k);
        }
        if cdf >= 1.0 - tail {
            hi = k;
            break;
        }
    }
    (lo.unwrap_or(0), hi)
}

/// Mean spacing of sorted node positions.
pub fn mean_spacing(nodes: &[f64]) -> f64 {
    (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64
}

/// Central `2 * half` samples of a profile and their positions.
pub fn window<'a, T>(values: &'a [T], positions: &'a [f64], half: usize) -> (&'a [T], &'a [f64]) {
    let mid = values.len() / 2;
    (&values[mid - half..mid + half], &positions[mid - half..mid + half])
}

/// Mean first-escape time from the exact step distribution:
/// `sum k dt q_k prod_{j<k} (1 - q_j)` with `q_k = 1 - (1 - p_k)^n` and
/// `p_k = exp(-(B - k e) / kT)` capped at one.
pub fn expected_latency(n: u64, kt: f64, binding: f64, per_step: f64, step: f64) -> f64 {
    let mut survive = 1.0;
    let mut mean = 0.0;
    let mut k = 1u64;
    while survive > 1e-300 {
        let p = (-(binding - per_step * k as f64) / kt).exp().min(1.0);
        let q = 1.0 - (1.0 - p).powf(n as f64);
        mean += k as f64 * step * q * survive;
        survive *= 1.0 - q;
        k += 1;
    }
    mean
}

/// Electron-by-electron simulation of the threshold population: every step
/// each electron draws a fresh exponential noise energy and escapes if its
/// signal plus noise energy reaches `binding`.
pub fn brute_force_latencies(
    n: u64,
    kt: f64,
    binding: f64,
    per_step: f64,
    step: f64,
    trials: usize,
    seed: u64,
) -> Vec<f64> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Exp};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let noise = Exp::new(1.0 / kt).unwrap();
    (0..trials)
        .map(|_| {
            let mut k = 1u64;
            loop {
                let signal = per_step * k as f64;
                if (0..n).any(|_| signal + noise.sample(&mut rng) >= binding) {
                    return k as f64 * step;
                }
                k += 1;
            }
        })
        .collect()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Coincidence matching by exhaustive search: every signal/idler pair within
/// `width / 2` of `delay` is a candidate, candidates are taken greedily in
/// order of time difference, and each click is used at most once. Returns
/// `(signal, idler)` index pairs sorted by signal index.
pub fn brute_force_matching(
    signal: &[wavecomp::detection::ClickEvent],
    idler: &[wavecomp::detection::ClickEvent],
    width: f64,
    delay: f64,
) -> Vec<(usize, usize)> {
    let mut all = Vec::new();
    for (s, a) in signal.iter().enumerate() {
        for (i, b) in idler.iter().enumerate() {
            let dt = (a.timestamp - delay - b.timestamp).abs();
            if dt <= width / 2.0 {
                all.push((dt, s, i));
            }
        }
    }
    all.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let (mut su, mut iu) = (vec![false; signal.len()], vec![false; idler.len()]);
    let mut out = Vec::new();
    for (_, s, i) in all {
        if !su[s] && !iu[i] {
            su[s] = true;
            iu[i] = true;
            out.push((s, i));
        }
    }
    out.sort_unstable();
    out
}
