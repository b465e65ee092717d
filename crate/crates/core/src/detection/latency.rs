//! Time to the first photoemission for a population of bound electrons that
//! carry a fluctuating noise energy.
//!
//! Time advances in steps of `step` seconds. At step `k` every electron holds
//! the signal energy absorbed so far, `coupling * intensity * k * step`, plus
//! a noise energy freshly drawn from an exponential distribution with mean
//! `noise_energy_scale`. The first electron whose total reaches the binding
//! energy escapes and produces the click. A cold population (zero noise) has
//! to wait for the full classical charging time
//! `binding_energy / (coupling * intensity)`; a noisy one always holds some
//! electrons a short push away from threshold and fires much sooner.

use rand::Rng;
use serde::Serialize;

use crate::error::{ensure_positive, invalid, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdPopulation {
    n_electrons: u64,
    /// Mean noise energy in eV; zero for a cold population.
    noise_energy_scale: f64,
    /// eV.
    binding_energy: f64,
    /// eV per second per unit intensity.
    signal_power_coupling: f64,
    /// Seconds per step; also the noise refresh time.
    step: f64,
    max_steps: u64,
}

impl ThresholdPopulation {
    pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

    pub fn new(
        n_electrons: u64,
        noise_energy_scale: f64,
        binding_energy: f64,
        signal_power_coupling: f64,
        step: f64,
    ) -> Result<Self> {
        if n_electrons == 0 {
            return Err(invalid("n_electrons", "must be >= 1"));
        }
        if !(noise_energy_scale.is_finite() && noise_energy_scale >= 0.0) {
            return Err(invalid("noise_energy_scale", "must be >= 0"));
        }
        ensure_positive("binding_energy", binding_energy)?;
        if binding_energy <= noise_energy_scale {
            return Err(invalid(
                "binding_energy",
                "must exceed noise_energy_scale",
            ));
        }
        ensure_positive("signal_power_coupling", signal_power_coupling)?;
        ensure_positive("step", step)?;
        Ok(Self {
            n_electrons,
            noise_energy_scale,
            binding_energy,
            signal_power_coupling,
            step,
            max_steps: Self::DEFAULT_MAX_STEPS,
        })
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps.max(1);
        self
    }

    pub fn n_electrons(&self) -> u64 {
        self.n_electrons
    }

    pub fn noise_energy_scale(&self) -> f64 {
        self.noise_energy_scale
    }

    pub fn binding_energy(&self) -> f64 {
        self.binding_energy
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Signal energy absorbed per electron per step.
    pub fn energy_per_step(&self, intensity: f64) -> f64 {
        self.signal_power_coupling * intensity * self.step
    }

    /// Classical time to absorb the binding energy; `None` without signal.
    pub fn charging_time(&self, intensity: f64) -> Option<f64> {
        (intensity > 0.0).then(|| self.binding_energy / (self.signal_power_coupling * intensity))
    }

    /// Probability that one electron's noise energy reaches `gap`.
    fn tail(&self, gap: f64) -> f64 {
        if gap <= 0.0 {
            1.0
        } else if self.noise_energy_scale == 0.0 {
            0.0
        } else {
            (-gap / self.noise_energy_scale).exp()
        }
    }

    /// Fraction of the population within one step's signal energy of escape.
    pub fn fraction_within_one_step(&self, intensity: f64) -> f64 {
        self.tail(self.binding_energy - self.energy_per_step(intensity))
    }

    /// Probability that at least one electron escapes at step `k` (1-based).
    pub fn escape_probability(&self, intensity: f64, k: u64) -> f64 {
        let gap = self.binding_energy - self.energy_per_step(intensity) * k as f64;
        let p = self.tail(gap);
        if p >= 1.0 {
            return 1.0;
        }
        -(self.n_electrons as f64 * (-p).ln_1p()).exp_m1()
    }

    /// First step at which the absorbed signal alone reaches the binding energy.
    fn saturation_step(&self, intensity: f64) -> Option<u64> {
        let per_step = self.energy_per_step(intensity);
        if per_step <= 0.0 {
            return None;
        }
        let mut k = (self.binding_energy / per_step).ceil().max(1.0) as u64;
        while k > 1 && per_step * (k - 1) as f64 >= self.binding_energy {
            k -= 1;
        }
        while per_step * (k as f64) < self.binding_energy {
            k += 1;
        }
        Some(k)
    }

    /// Simulates one trial; `None` if nothing escapes within `max_steps`.
    pub fn sample_latency<R: Rng + ?Sized>(&self, intensity: f64, rng: &mut R) -> Option<f64> {
        let last = self
            .saturation_step(intensity)
            .map_or(self.max_steps, |s| s.min(self.max_steps));
        if self.noise_energy_scale == 0.0 {
            return self
                .saturation_step(intensity)
                .filter(|&s| s <= self.max_steps)
                .map(|s| s as f64 * self.step);
        }
        if intensity <= 0.0 {
            // Memoryless: geometric number of steps.
            let q = self.escape_probability(0.0, 1);
            if q <= 0.0 {
                return None;
            }
            let u: f64 = 1.0 - rng.random::<f64>();
            let k = if q >= 1.0 {
                1.0
            } else {
                (u.ln() / (-q).ln_1p()).floor() + 1.0
            };
            return (k <= self.max_steps as f64).then_some(k * self.step);
        }
        for k in 1..=last {
            if rng.random::<f64>() < self.escape_probability(intensity, k) {
                return Some(k as f64 * self.step);
            }
        }
        None
    }
}

/// Summary of first-click latencies over many trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencyStats {
    pub n_trials: usize,
    /// Trials that produced a click.
    pub n_clicked: usize,
    pub mean: Option<f64>,
    /// Standard error of the mean.
    pub std_error: Option<f64>,
    pub median: Option<f64>,
    pub q05: Option<f64>,
    pub q95: Option<f64>,
    pub charging_time: Option<f64>,
}

impl LatencyStats {
    pub fn from_samples(mut latencies: Vec<f64>, n_trials: usize, charging_time: Option<f64>) -> Self {
        let n = latencies.len();
        latencies.sort_by(f64::total_cmp);
        let quantile = |p: f64| {
            (n > 0).then(|| latencies[((p * n as f64).ceil() as usize).clamp(1, n) - 1])
        };
        let mean = (n > 0).then(|| latencies.iter().sum::<f64>() / n as f64);
        let std_error = mean.filter(|_| n > 1).map(|m| {
            let var = latencies.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        });
        Self {
            n_trials,
            n_clicked: n,
            mean,
            std_error,
            median: quantile(0.5),
            q05: quantile(0.05),
            q95: quantile(0.95),
            charging_time,
        }
    }
}

/// Runs `n_trials` independent first-click simulations at `incident_intensity`.
pub fn first_click_latency(
    population: &ThresholdPopulation,
    incident_intensity: f64,
    n_trials: usize,
    seed: u64,
) -> Result<LatencyStats> {
    if n_trials == 0 {
        return Err(invalid("n_trials", "must be >= 1"));
    }
    if !(incident_intensity.is_finite() && incident_intensity >= 0.0) {
        return Err(invalid("incident_intensity", "must be >= 0"));
    }
    let mut rng = stream_rng(seed, Stream::Latency);
    let latencies = (0..n_trials)
        .filter_map(|_| population.sample_latency(incident_intensity, &mut rng))
        .collect();
    Ok(LatencyStats::from_samples(
        latencies,
        n_trials,
        population.charging_time(incident_intensity),
    ))
}
