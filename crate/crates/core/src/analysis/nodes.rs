//! Interference nodes: deep local minima of an intensity profile.

/// Minima must sit below this fraction of the global maximum.
pub const DEFAULT_NODE_THRESHOLD: f64 = 0.05;

pub fn find_nodes(profile: &[f64], positions: &[f64]) -> Vec<f64> {
    find_nodes_with_threshold(profile, positions, DEFAULT_NODE_THRESHOLD)
}

/// Positions of local minima below `threshold * max`, refined by a parabola
/// through the minimum and its neighbours, ascending.
///
/// A minimum only counts when the nearest local maxima on both sides reach
/// the threshold too, so wiggles in the dark tails of a pattern are not
/// reported as nodes.
pub fn find_nodes_with_threshold(profile: &[f64], positions: &[f64], threshold: f64) -> Vec<f64> {
    let n = profile.len().min(positions.len());
    if n < 3 {
        return Vec::new();
    }
    let p = &profile[..n];
    let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Vec::new();
    }
    let level = threshold * max;

    let is_min = |i: usize| p[i] <= p[i - 1] && p[i] <= p[i + 1] && (p[i] < p[i - 1] || p[i] < p[i + 1]);
    let peak_left = |i: usize| {
        let mut j = i;
        while j > 0 && p[j - 1] >= p[j] {
            j -= 1;
        }
        p[j]
    };
    let peak_right = |i: usize| {
        let mut j = i;
        while j + 1 < n && p[j + 1] >= p[j] {
            j += 1;
        }
        p[j]
    };

    let mut nodes = Vec::new();
    for i in 1..n - 1 {
        if !is_min(i) || p[i] >= level {
            continue;
        }
        if peak_left(i) < level || peak_right(i) < level {
            continue;
        }
        let (y0, y1, y2) = (p[i - 1], p[i], p[i + 1]);
        let curvature = y0 - 2.0 * y1 + y2;
        let shift = if curvature > 0.0 {
            (0.5 * (y0 - y2) / curvature).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let x = if shift >= 0.0 {
            positions[i] + shift * (positions[i + 1] - positions[i])
        } else {
            positions[i] + shift * (positions[i] - positions[i - 1])
        };
        nodes.push(x);
    }
    nodes.sort_by(f64::total_cmp);
    nodes
}
