//! Fringe visibility.
//!
//! [`visibility`] is the textbook `(I_max - I_min) / (I_max + I_min)` over
//! local extrema, refined by a parabola through each extremum and its two
//! neighbours. It is exact on clean profiles but shot noise creates spurious
//! extrema, so histograms are better served by [`fringe_visibility`], which
//! projects the counts onto the expected fringe frequency.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

/// Hull of the samples at or above `fraction` of the maximum.
pub fn central_region(profile: &[f64], fraction: f64) -> Range<usize> {
    let max = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return 0..profile.len();
    }
    let level = fraction * max;
    let first = profile.iter().position(|&v| v >= level).unwrap_or(0);
    let last = profile.iter().rposition(|&v| v >= level).unwrap_or(0);
    first..last + 1
}

fn vertex(y0: f64, y1: f64, y2: f64) -> f64 {
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature == 0.0 {
        y1
    } else {
        y1 - (y2 - y0).powi(2) / (8.0 * curvature)
    }
}

/// Visibility from local extrema inside `region`; 0 when the region holds no
/// interior maximum or no interior minimum.
pub fn visibility(profile: &[f64], region: Range<usize>) -> f64 {
    let end = region.end.min(profile.len());
    let start = region.start.min(end);
    let p = &profile[start..end];
    if p.len() < 3 {
        return 0.0;
    }
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 1..p.len() - 1 {
        let (a, b, c) = (p[i - 1], p[i], p[i + 1]);
        if b >= a && b >= c && (b > a || b > c) {
            hi = hi.max(vertex(a, b, c).max(b));
        }
        if b <= a && b <= c && (b < a || b < c) {
            lo = lo.min(vertex(a, b, c).clamp(0.0, b));
        }
    }
    if !hi.is_finite() || !lo.is_finite() || hi + lo <= 0.0 {
        return 0.0;
    }
    ((hi - lo) / (hi + lo)).clamp(0.0, 1.0)
}

/// Lock-in visibility of `counts` at intensity fringe frequency `b` (the
/// pattern is `cos^2(b x + phi)`, i.e. period `pi / b`).
///
/// Uses `2 |sum I exp(-2ibx)| / sum I` over the largest whole number of
/// periods centered in `region`. An envelope times a perfect `cos^2` gives 1;
/// a smooth profile gives roughly 0.
pub fn fringe_visibility(counts: &[f64], positions: &[f64], region: Range<usize>, b: f64) -> f64 {
    let end = region.end.min(counts.len()).min(positions.len());
    let start = region.start.min(end);
    if end - start < 2 || !(b > 0.0) {
        return 0.0;
    }
    let pitch = (positions[end - 1] - positions[start]) / (end - start - 1) as f64;
    let span = positions[end - 1] - positions[start] + pitch;
    let period = PI / b;
    let n_periods = (span / period).floor();
    if n_periods < 1.0 {
        return 0.0;
    }
    let center = 0.5 * (positions[start] + positions[end - 1]);
    let half = 0.5 * n_periods * period;
    let (mut sum, mut total) = (Complex64::new(0.0, 0.0), 0.0);
    for i in start..end {
        let x = positions[i];
        if x - center >= -half && x - center < half {
            sum += counts[i] * Complex64::from_polar(1.0, -2.0 * b * x);
            total += counts[i];
        }
    }
    if total <= 0.0 {
        return 0.0;
    }
    (2.0 * sum.norm() / total).clamp(0.0, 1.0)
}
