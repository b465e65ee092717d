//! Levenberg-Marquardt fit of `k exp(-a x^2) cos^2(b x + phi)`.
//!
//! Starting point, all derived from the data:
//! - `k`: the largest sample.
//! - `b`: the strongest spectral peak past the envelope lobe, refined by
//!   maximising the fringe projection `|sum I exp(-2ibx)|` on a fine grid.
//! - `a`: regression of `ln I` on `x^2` over the fringe crests.
//! - `phi`: half the argument of that projection.
//!
//! The reported phase is canonicalised to `[0, pi)` with `b > 0`, using
//! `cos^2(u) = cos^2(u + pi) = cos^2(-u)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const MAX_ITERATIONS: usize = 500;
const MIN_PERIODS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub k: f64,
    /// 1/m^2.
    pub a: f64,
    /// rad/m.
    pub b: f64,
    /// Radians, in `[0, pi)`.
    pub phi: f64,
    /// RMS residual divided by the profile maximum.
    pub rms_residual: f64,
    pub converged: bool,
}

impl FringeFit {
    pub fn evaluate(&self, x: f64) -> f64 {
        fringe_model(self.k, self.a, self.b, self.phi, x)
    }

    /// Intensity period `pi / b`.
    pub fn period(&self) -> f64 {
        PI / self.b
    }
}

pub fn fringe_model(k: f64, a: f64, b: f64, phi: f64, x: f64) -> f64 {
    k * (-a * x * x).exp() * (b * x + phi).cos().powi(2)
}

fn projection(profile: &[f64], positions: &[f64], b: f64) -> Complex64 {
    profile
        .iter()
        .zip(positions)
        .map(|(&v, &x)| v * Complex64::from_polar(1.0, -2.0 * b * x))
        .sum()
}

fn initial_b(profile: &[f64], positions: &[f64], pitch: f64) -> Option<f64> {
    let n = profile.len();
    let mean = profile.iter().sum::<f64>() / n as f64;
    let mut spectrum: Vec<Complex64> = profile.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    let mag: Vec<f64> = spectrum[..n / 2 + 1].iter().map(|c| c.norm()).collect();
    let mut k = 1;
    while k + 1 < mag.len() && mag[k + 1] < mag[k] {
        k += 1;
    }
    let peak = (k..mag.len()).max_by(|&i, &j| mag[i].total_cmp(&mag[j]).then(j.cmp(&i)))?;
    if peak == 0 || mag[peak] == 0.0 {
        return None;
    }
    // Intensity frequency f = b / pi cycles per meter.
    let df = 1.0 / (n as f64 * pitch);
    let score = |b: f64| projection(profile, positions, b).norm();
    let (mut lo, mut hi) = ((peak as f64 - 1.0).max(0.5) * df * PI, (peak as f64 + 1.0) * df * PI);
    let mut best = peak as f64 * df * PI;
    for _ in 0..3 {
        let steps = 64;
        let h = (hi - lo) / steps as f64;
        let mut best_score = f64::NEG_INFINITY;
        for s in 0..=steps {
            let b = lo + s as f64 * h;
            let v = score(b);
            if v > best_score {
                best_score = v;
                best = b;
            }
        }
        lo = best - h;
        hi = best + h;
    }
    Some(best)
}

fn initial_a(profile: &[f64], positions: &[f64], max: f64, span: f64) -> f64 {
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 1..profile.len().saturating_sub(1) {
        let v = profile[i];
        if v >= profile[i - 1] && v >= profile[i + 1] && v > 0.05 * max {
            let x2 = positions[i] * positions[i];
            let y = v.ln();
            sx += x2;
            sy += y;
            sxx += x2 * x2;
            sxy += x2 * y;
            m += 1.0;
        }
    }
    let denom = m * sxx - sx * sx;
    let fallback = 1.0 / (span * span);
    if m < 2.0 || denom <= 0.0 {
        return fallback;
    }
    let slope = (m * sxy - sx * sy) / denom;
    if -slope > 0.0 {
        -slope
    } else {
        fallback
    }
}

fn cost(profile: &[f64], positions: &[f64], p: &[f64; 4]) -> f64 {
    profile
        .iter()
        .zip(positions)
        .map(|(&y, &x)| (fringe_model(p[0], p[1], p[2], p[3], x) - y).powi(2))
        .sum()
}

fn solve4(mut m: [[f64; 4]; 4], mut r: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col] == 0.0 || !m[pivot][col].is_finite() {
            return None;
        }
        m.swap(col, pivot);
        r.swap(col, pivot);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for c in col..4 {
                m[row][c] -= f * m[col][c];
            }
            r[row] -= f * r[col];
        }
    }
    let mut out = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = (row + 1..4).map(|c| m[row][c] * out[c]).sum();
        out[row] = (r[row] - tail) / m[row][row];
    }
    out.iter().all(|v| v.is_finite()).then_some(out)
}

fn canonical(k: f64, a: f64, b: f64, phi: f64, rms: f64, converged: bool) -> FringeFit {
    let (b, phi) = if b < 0.0 { (-b, -phi) } else { (b, phi) };
    let mut phi = phi.rem_euclid(PI);
    if phi >= PI {
        phi = 0.0;
    }
    FringeFit {
        k,
        a,
        b,
        phi,
        rms_residual: rms,
        converged,
    }
}

/// Fits the fringe model to `profile` sampled at uniformly spaced `positions`.
///
/// Needs at least eight fringe periods across the samples. On failure to
/// converge the best parameters found are returned inside the error.
pub fn fit_fringe(profile: &[f64], positions: &[f64]) -> Result<FringeFit> {
    if profile.len() != positions.len() {
        return Err(Error::LengthMismatch {
            expected: positions.len(),
            found: profile.len(),
        });
    }
    if profile.len() < 16 {
        return Err(invalid("profile", "needs at least 16 samples"));
    }
    if profile.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
        return Err(invalid("profile", "entries must be finite and >= 0"));
    }
    let n = profile.len();
    let pitch = (positions[n - 1] - positions[0]) / (n - 1) as f64;
    if !(pitch > 0.0) {
        return Err(invalid("positions", "must increase"));
    }
    let max = profile.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(invalid("profile", "is identically zero"));
    }
    let span = n as f64 * pitch;
    let b0 = initial_b(profile, positions, pitch).ok_or(Error::TooFewFringes {
        required: MIN_PERIODS,
        found: 0.0,
    })?;
    let periods = span * b0 / PI;
    if periods < MIN_PERIODS {
        return Err(Error::TooFewFringes {
            required: MIN_PERIODS,
            found: periods,
        });
    }
    let a0 = initial_a(profile, positions, max, span);
    let phi0 = 0.5 * projection(profile, positions, b0).arg();

    let mut p = [max, a0, b0, phi0];
    let mut c = cost(profile, positions, &p);
    let mut lambda = 1e-3;
    let mut converged = c == 0.0;
    let mut iterations = 0;
    while !converged && iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        for (&y, &x) in profile.iter().zip(positions) {
            let env = (-p[1] * x * x).exp();
            let u = p[2] * x + p[3];
            let cos2 = u.cos().powi(2);
            let model = p[0] * env * cos2;
            let s2 = -p[0] * env * (2.0 * u).sin();
            let j = [env * cos2, -x * x * model, s2 * x, s2];
            let r = y - model;
            for row in 0..4 {
                jtr[row] += j[row] * r;
                for col in 0..4 {
                    jtj[row][col] += j[row] * j[col];
                }
            }
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for d in 0..4 {
                damped[d][d] += lambda * jtj[d][d].max(1e-300);
            }
            let Some(step) = solve4(damped, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2], p[3] + step[3]];
            if trial[0] <= 0.0 || trial[1] <= 0.0 {
                lambda *= 10.0;
                continue;
            }
            let tc = cost(profile, positions, &trial);
            if tc <= c {
                let small = step
                    .iter()
                    .zip(&trial)
                    .enumerate()
                    .all(|(i, (s, t))| s.abs() <= 1e-12 * if i == 3 { 1.0 } else { t.abs() });
                let stalled = c - tc <= 1e-15 * c;
                p = trial;
                c = tc;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                converged = small || stalled || c == 0.0;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No downhill step at any damping: a minimum to working precision.
            converged = true;
        }
    }
    let rms = (c / n as f64).sqrt() / max;
    let fit = canonical(p[0], p[1], p[2], p[3], rms, converged);
    if converged {
        Ok(fit)
    } else {
        Err(Error::FitDidNotConverge {
            iterations,
            best: Box::new(FringeFit { converged: false, ..fit }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(k: f64, a: f64, b: f64, phi: f64, n: usize, dx: f64) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..n).map(|i| (i as f64 - (n / 2) as f64) * dx).collect();
        let y = x.iter().map(|&x| fringe_model(k, a, b, phi, x)).collect();
        (y, x)
    }

    #[test]
    fn round_trip_fringe() {
        let (y, x) = synth(10.0, 4e3, 2.2e3, 0.0, 400, 1e-4);
        let f = fit_fringe(&y, &x).unwrap();
        assert!((f.k / 10.0 - 1.0).abs() < 1e-6);
        assert!((f.a / 4e3 - 1.0).abs() < 1e-6);
        assert!((f.b / 2.2e3 - 1.0).abs() < 1e-6);
        assert!(f.phi.min(PI - f.phi) < 1e-6);
        assert!(f.rms_residual < 1e-9);
    }

    #[test]
    fn round_trip_antifringe() {
        let (y, x) = synth(1.0, 4e3, 2.2e3, PI / 2.0, 400, 1e-4);
        let f = fit_fringe(&y, &x).unwrap();
        assert!((f.phi - PI / 2.0).abs() < 1e-6, "{}", f.phi);
    }

    #[test]
    fn too_few_fringes_is_an_error() {
        let (y, x) = synth(1.0, 1.0, 300.0, 0.0, 400, 1e-4);
        assert!(matches!(fit_fringe(&y, &x), Err(Error::TooFewFringes { .. })));
    }

    #[test]
    fn bad_inputs() {
        assert!(fit_fringe(&[1.0; 20], &[0.0; 19]).is_err());
        assert!(fit_fringe(&[0.0; 20], &(0..20).map(f64::from).collect::<Vec<_>>()).is_err());
        let mut y = vec![1.0; 20];
        y[3] = -1.0;
        assert!(fit_fringe(&y, &(0..20).map(f64::from).collect::<Vec<_>>()).is_err());
    }

    #[test]
    fn canonical_phase_range() {
        let f = canonical(1.0, 1.0, -2.0, 0.3, 0.0, true);
        assert!(f.b > 0.0);
        assert!((f.phi - (PI - 0.3)).abs() < 1e-12);
        let g = canonical(1.0, 1.0, 2.0, -7.0, 0.0, true);
        assert!((0.0..PI).contains(&g.phi));
    }
}
