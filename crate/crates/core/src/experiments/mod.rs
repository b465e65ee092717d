//! End-to-end runs: polarization-tagged eraser, delayed-choice subensembles
//! and wire-grid imaging.
//!
//! The slit field is solved once per polarization component; clicks are then
//! sampled from the resulting screen intensities, since every pulse sees the
//! same optics.

mod afshar;
mod delayed_choice;
mod eraser;

pub use afshar::{run_afshar, AfsharConfig, SlitBlock};
pub use delayed_choice::{run_delayed_choice, DelayedChoiceConfig};
pub use eraser::{run_eraser, screen_patterns, EraserConfig, IdlerPolarizer, ScreenPatterns};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::FringeFit;
use crate::error::{ensure_positive, invalid, Result};
use crate::wavefield::{apply_mask, ApertureMask, Grid, ScalarField};

/// Click counts per screen bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Meters.
    pub bin_centers: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

/// A sampled real profile (intensity or expected counts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    /// Meters.
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub histograms: BTreeMap<String, Histogram>,
    pub profiles: BTreeMap<String, Profile>,
    pub fits: BTreeMap<String, FringeFit>,
    pub scalars: BTreeMap<String, f64>,
    /// Variable-length numeric outputs such as node positions.
    pub series: BTreeMap<String, Vec<f64>>,
    pub provenance: Provenance,
}

impl ExperimentResult {
    fn new<C: Serialize>(experiment: &str, seed: u64, config: &C) -> Self {
        Self {
            experiment: experiment.to_owned(),
            histograms: BTreeMap::new(),
            profiles: BTreeMap::new(),
            fits: BTreeMap::new(),
            scalars: BTreeMap::new(),
            series: BTreeMap::new(),
            provenance: Provenance {
                seed,
                version: crate::VERSION.to_owned(),
                config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            },
        }
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.get(name).copied()
    }

    pub fn histogram(&self, name: &str) -> Option<&Histogram> {
        self.histograms.get(name)
    }
}

/// Slit illumination shared by the experiments: a Gaussian of waist
/// `beam_waist` centered on each open slit, cut off at the slit edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitGeometry {
    /// Meters.
    pub width: f64,
    /// Center-to-center, meters.
    pub separation: f64,
    /// Meters.
    pub beam_waist: f64,
}

impl SlitGeometry {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("slit_width", self.width)?;
        ensure_positive("slit_separation", self.separation)?;
        ensure_positive("beam_waist", self.beam_waist)?;
        if self.separation <= self.width {
            return Err(invalid("slit_separation", "must exceed slit_width"));
        }
        Ok(())
    }

    /// Centers of slit A (left) and slit B (right).
    pub fn centers(&self) -> [f64; 2] {
        [-self.separation / 2.0, self.separation / 2.0]
    }

    /// Scalar field just behind one slit.
    pub fn slit_field(&self, grid: Grid, wavelength: f64, center: f64) -> Result<ScalarField> {
        let beam = ScalarField::gaussian(grid, wavelength, center, self.beam_waist)?;
        apply_mask(&beam, &ApertureMask::slit(grid, center, self.width)?)
    }
}

pub(crate) fn ensure_count(name: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid(name, "must be >= 1"));
    }
    Ok(())
}

/// Inverse-CDF bin sampler over nonnegative weights.
pub(crate) struct BinSampler {
    cumulative: Vec<f64>,
}

impl BinSampler {
    pub(crate) fn new(weights: &[f64]) -> Result<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|&w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(invalid("screen intensity", "no light reaches the screen"));
        }
        Ok(Self { cumulative })
    }

    /// Bin for a uniform draw `u` in `[0, 1)`.
    pub(crate) fn sample(&self, u: f64) -> usize {
        let total = *self.cumulative.last().expect("nonempty");
        let target = u * total;
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.cumulative.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_skips_empty_bins() {
        let s = BinSampler::new(&[0.0, 1.0, 0.0, 3.0]).unwrap();
        assert_eq!(s.sample(0.0), 1);
        assert_eq!(s.sample(0.2499), 1);
        assert_eq!(s.sample(0.25), 3);
        assert_eq!(s.sample(0.999_999), 3);
        assert!(BinSampler::new(&[0.0; 3]).is_err());
    }

    #[test]
    fn slit_geometry_validation() {
        let ok = SlitGeometry {
            width: 40e-6,
            separation: 250e-6,
            beam_waist: 8e-6,
        };
        assert!(ok.validate().is_ok());
        assert!(SlitGeometry { separation: 30e-6, ..ok }.validate().is_err());
        assert!(SlitGeometry { beam_waist: 0.0, ..ok }.validate().is_err());
    }
}
