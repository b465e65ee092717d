//! Semiclassical photodetection: continuous intensity in, discrete clicks out.
//!
//! Click counts per bin are Poisson with a mean proportional to the local
//! intensity (square-law response) plus a dark rate. The discreteness comes
//! from the detector, not from the light.

mod latency;

pub use latency::{first_click_latency, LatencyStats, ThresholdPopulation};

use std::cmp::Ordering;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, ensure_unit_interval, invalid, Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::wavefield::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DetectorId(pub u32);

/// One discrete detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickEvent {
    pub detector: DetectorId,
    pub bin: usize,
    /// Seconds.
    pub timestamp: f64,
}

impl ClickEvent {
    pub fn new(detector: DetectorId, bin: usize, timestamp: f64) -> Self {
        Self {
            detector,
            bin,
            timestamp,
        }
    }
}

/// Orders by time, then detector, then bin.
pub fn chronological(a: &ClickEvent, b: &ClickEvent) -> Ordering {
    a.timestamp
        .total_cmp(&b.timestamp)
        .then(a.detector.cmp(&b.detector))
        .then(a.bin.cmp(&b.bin))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    efficiency: f64,
    /// Dark counts per second per bin.
    dark_rate: f64,
    n_bins: usize,
    /// Exposure window length in seconds.
    exposure: f64,
    /// Seconds after a registered click during which the detector is blind.
    dead_time: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64, dark_rate: f64, n_bins: usize, exposure: f64) -> Result<Self> {
        ensure_unit_interval("efficiency", efficiency)?;
        if !(dark_rate.is_finite() && dark_rate >= 0.0) {
            return Err(invalid("dark_rate", format!("must be >= 0, got {dark_rate}")));
        }
        if n_bins == 0 {
            return Err(invalid("n_bins", "must be >= 1"));
        }
        ensure_positive("exposure", exposure)?;
        Ok(Self {
            efficiency,
            dark_rate,
            n_bins,
            exposure,
            dead_time: 0.0,
        })
    }

    pub fn with_dead_time(mut self, dead_time: f64) -> Result<Self> {
        if !(dead_time.is_finite() && dead_time >= 0.0) {
            return Err(invalid("dead_time", format!("must be >= 0, got {dead_time}")));
        }
        self.dead_time = dead_time;
        Ok(self)
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn dark_rate(&self) -> f64 {
        self.dark_rate
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn exposure(&self) -> f64 {
        self.exposure
    }

    pub fn dead_time(&self) -> f64 {
        self.dead_time
    }

    /// Expected counts in a bin receiving `intensity` clicks per second.
    pub fn expected_counts(&self, intensity: f64) -> f64 {
        (self.efficiency * intensity + self.dark_rate) * self.exposure
    }
}

fn check_profile(profile: &[f64], model: &DetectorModel) -> Result<()> {
    if profile.len() != model.n_bins {
        return Err(Error::LengthMismatch {
            expected: model.n_bins,
            found: profile.len(),
        });
    }
    if let Some(bad) = profile.iter().find(|&&i| !(i.is_finite() && i >= 0.0)) {
        return Err(invalid("intensity profile", format!("entries must be >= 0, found {bad}")));
    }
    Ok(())
}

fn poisson_counts<R: Rng + ?Sized>(profile: &[f64], model: &DetectorModel, rng: &mut R) -> Result<Vec<u64>> {
    profile
        .iter()
        .map(|&intensity| {
            let mean = model.expected_counts(intensity);
            if mean <= 0.0 {
                return Ok(0);
            }
            Ok(Poisson::new(mean)
                .map_err(|e| invalid("expected counts", e.to_string()))?
                .sample(rng) as u64)
        })
        .collect()
}

/// Click counts per bin without timestamps: Poisson with mean
/// `(efficiency * I + dark_rate) * exposure`.
pub fn sample_counts(profile: &[f64], model: &DetectorModel, seed: u64) -> Result<Vec<u64>> {
    check_profile(profile, model)?;
    poisson_counts(profile, model, &mut stream_rng(seed, Stream::Clicks))
}

/// Draws clicks from an intensity profile given in clicks per second per bin.
///
/// Counts per bin are those of [`sample_counts`] for the same seed; click
/// times are uniform over the exposure window. The output is sorted
/// chronologically, with dead time applied.
pub fn sample_clicks(
    profile: &[f64],
    model: &DetectorModel,
    detector: DetectorId,
    seed: u64,
) -> Result<Vec<ClickEvent>> {
    check_profile(profile, model)?;
    let mut rng = stream_rng(seed, Stream::Clicks);
    let counts = poisson_counts(profile, model, &mut rng)?;
    let mut clicks = Vec::with_capacity(counts.iter().sum::<u64>() as usize);
    for (bin, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let t = rng.random::<f64>() * model.exposure;
            clicks.push(ClickEvent::new(detector, bin, t));
        }
    }
    clicks.sort_by(chronological);
    Ok(apply_dead_time(clicks, model.dead_time))
}

/// Drops clicks arriving within `dead_time` of the previous registered click
/// on the same detector. Input must be chronological.
pub fn apply_dead_time(clicks: Vec<ClickEvent>, dead_time: f64) -> Vec<ClickEvent> {
    if dead_time <= 0.0 {
        return clicks;
    }
    let mut last: std::collections::HashMap<DetectorId, f64> = Default::default();
    clicks
        .into_iter()
        .filter(|c| match last.get(&c.detector) {
            Some(&t) if c.timestamp - t < dead_time => false,
            _ => {
                last.insert(c.detector, c.timestamp);
                true
            }
        })
        .collect()
}

/// A detector screen of `n_bins` equal bins centered on `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    center: f64,
    width: f64,
    n_bins: usize,
}

impl Screen {
    pub fn new(center: f64, width: f64, n_bins: usize) -> Result<Self> {
        ensure_positive("screen width", width)?;
        if n_bins == 0 {
            return Err(invalid("n_bins", "must be >= 1"));
        }
        if !center.is_finite() {
            return Err(invalid("screen center", "must be finite"));
        }
        Ok(Self {
            center,
            width,
            n_bins,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn bin_width(&self) -> f64 {
        self.width / self.n_bins as f64
    }

    fn left(&self) -> f64 {
        self.center - self.width / 2.0
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.n_bins)
            .map(|i| self.left() + (i as f64 + 0.5) * self.bin_width())
            .collect()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let u = (x - self.left()) / self.bin_width();
        (u >= 0.0 && u < self.n_bins as f64).then(|| (u as usize).min(self.n_bins - 1))
    }

    /// Integrates a sampled intensity over each bin. Sample `i` stands for
    /// the cell `x_i +- pitch / 2` and is shared between bins in proportion
    /// to overlap, so bin edges falling on samples cause no ripple.
    pub fn integrate(&self, intensity: &[f64], grid: &Grid) -> Result<Vec<f64>> {
        if intensity.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: intensity.len(),
            });
        }
        let mut bins = vec![0.0; self.n_bins];
        let bw = self.bin_width();
        let pitch = grid.pitch();
        for (i, &v) in intensity.iter().enumerate() {
            // Cell edges in units of bins from the left screen edge.
            let lo = (grid.position(i) - pitch / 2.0 - self.left()) / bw;
            let hi = lo + pitch / bw;
            if hi <= 0.0 || lo >= self.n_bins as f64 {
                continue;
            }
            let first = lo.max(0.0).floor() as usize;
            let last = (hi.ceil() as usize).min(self.n_bins);
            for (b, slot) in bins.iter_mut().enumerate().take(last).skip(first) {
                let overlap = hi.min(b as f64 + 1.0) - lo.max(b as f64);
                if overlap > 0.0 {
                    *slot += v * overlap * bw;
                }
            }
        }
        Ok(bins)
    }
}
