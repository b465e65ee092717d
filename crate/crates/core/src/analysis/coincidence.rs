//! One-to-one coincidence matching between signal and idler click streams.
//!
//! A signal click at `t_s` and an idler click at `t_i` are candidates when
//! `|t_s - delay - t_i| <= width / 2`. Candidates are taken in order of
//! increasing time offset (ties by signal index, then idler index) and each
//! click is used at most once. Widening the window only appends candidates
//! at the end of that order, so the retained set can only grow.

use serde::{Deserialize, Serialize};

use crate::detection::ClickEvent;
use crate::error::{ensure_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CoincidenceWindow(f64);

impl CoincidenceWindow {
    pub const DEFAULT_WIDTH: f64 = 5e-9;

    pub fn new(width: f64) -> Result<Self> {
        ensure_positive("coincidence window", width)?;
        Ok(Self(width))
    }

    /// Seconds.
    pub fn width(self) -> f64 {
        self.0
    }
}

impl Default for CoincidenceWindow {
    fn default() -> Self {
        Self(Self::DEFAULT_WIDTH)
    }
}

/// Matched `(signal index, idler index)` pairs, sorted by signal index.
///
/// `delay` is subtracted from signal times before comparing, so a signal arm
/// that is longer than the idler arm by `delay` seconds lines up again.
pub fn match_coincidences(
    signal: &[ClickEvent],
    idler: &[ClickEvent],
    window: CoincidenceWindow,
    delay: f64,
) -> Vec<(usize, usize)> {
    let half = window.width() / 2.0;
    let mut by_time: Vec<usize> = (0..idler.len()).collect();
    by_time.sort_by(|&a, &b| idler[a].timestamp.total_cmp(&idler[b].timestamp).then(a.cmp(&b)));
    let times: Vec<f64> = by_time.iter().map(|&i| idler[i].timestamp).collect();

    let mut candidates = Vec::new();
    for (s, click) in signal.iter().enumerate() {
        let t = click.timestamp - delay;
        let start = times.partition_point(|&ti| ti < t - half);
        for (k, &ti) in times.iter().enumerate().skip(start) {
            let dt = (t - ti).abs();
            if ti > t + half {
                break;
            }
            if dt <= half {
                candidates.push((dt, s, by_time[k]));
            }
        }
    }
    greedy(candidates, signal.len(), idler.len())
}

fn greedy(mut candidates: Vec<(f64, usize, usize)>, n_signal: usize, n_idler: usize) -> Vec<(usize, usize)> {
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut signal_used = vec![false; n_signal];
    let mut idler_used = vec![false; n_idler];
    let mut pairs = Vec::new();
    for (_, s, i) in candidates {
        if !signal_used[s] && !idler_used[i] {
            signal_used[s] = true;
            idler_used[i] = true;
            pairs.push((s, i));
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Signal clicks with a matched idler partner, in input order.
pub fn coincidence_filter(
    signal: &[ClickEvent],
    idler: &[ClickEvent],
    window: CoincidenceWindow,
) -> Vec<ClickEvent> {
    coincidence_filter_with_delay(signal, idler, window, 0.0)
}

pub fn coincidence_filter_with_delay(
    signal: &[ClickEvent],
    idler: &[ClickEvent],
    window: CoincidenceWindow,
    delay: f64,
) -> Vec<ClickEvent> {
    match_coincidences(signal, idler, window, delay)
        .into_iter()
        .map(|(s, _)| signal[s])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::DetectorId;

    fn clicks(times: &[f64]) -> Vec<ClickEvent> {
        times
            .iter()
            .map(|&t| ClickEvent::new(DetectorId(0), 0, t))
            .collect()
    }

    #[test]
    fn empty_idler_gives_empty_output() {
        let w = CoincidenceWindow::default();
        assert!(coincidence_filter(&clicks(&[1.0, 2.0]), &[], w).is_empty());
    }

    #[test]
    fn identical_streams_are_fully_retained() {
        let s = clicks(&[1e-6, 2e-6, 2.000001e-6, 5e-6]);
        let out = coincidence_filter(&s, &s, CoincidenceWindow::default());
        assert_eq!(out, s);
    }

    #[test]
    fn one_idler_serves_one_signal() {
        let s = clicks(&[0.0, 1e-9]);
        let i = clicks(&[0.8e-9]);
        let pairs = match_coincidences(&s, &i, CoincidenceWindow::new(4e-9).unwrap(), 0.0);
        assert_eq!(pairs, vec![(1, 0)]);
    }

    #[test]
    fn delay_realigns_streams() {
        let s = clicks(&[10e-9, 30e-9]);
        let i = clicks(&[2e-9, 22e-9]);
        let w = CoincidenceWindow::default();
        assert!(coincidence_filter(&s, &i, w).is_empty());
        assert_eq!(coincidence_filter_with_delay(&s, &i, w, 8e-9).len(), 2);
    }

    #[test]
    fn window_must_be_positive() {
        assert!(CoincidenceWindow::new(0.0).is_err());
        assert!(CoincidenceWindow::new(-1e-9).is_err());
    }
}
