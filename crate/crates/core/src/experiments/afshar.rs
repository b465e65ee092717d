use serde::{Deserialize, Serialize};

use super::{ensure_count, ExperimentResult, Histogram, Profile, SlitGeometry};
use crate::analysis::{find_nodes_with_threshold, histogram};
use crate::detection::{sample_clicks, DetectorId, DetectorModel, Screen};
use crate::error::{ensure_positive, ensure_unit_interval, invalid, Error, Result};
use crate::wavefield::{propagate, apply_mask, apply_thin_lens, ApertureMask, Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlitBlock {
    None,
    SlitA,
    SlitB,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AfsharConfig {
    /// Meters.
    pub wavelength: f64,
    pub slits: SlitGeometry,
    pub grid_samples: usize,
    /// Meters.
    pub grid_pitch: f64,
    /// Slits to wire grid, meters.
    pub slits_to_grid: f64,
    /// Wire grid to lens, meters.
    pub grid_to_lens: f64,
    /// Meters.
    pub focal_length: f64,
    /// Lens to image plane, meters.
    pub lens_to_image: f64,
    /// Allowed relative mismatch `|1/s + 1/s' - 1/f| * f`.
    pub imaging_tolerance: f64,
    /// Wire width as a fraction of the mean node spacing.
    pub wire_width_fraction: f64,
    /// Node depth threshold as a fraction of the peak intensity.
    pub node_threshold: f64,
    /// Slit closed in the recorded case; also the slit closed in the
    /// one-slit comparison (slit B when `None`).
    pub blocked_slit: SlitBlock,
    /// Whether the recorded case has the wires in place.
    pub grid_present: bool,
    /// Width of the binned image window, meters.
    pub image_window: f64,
    pub image_bins: usize,
    /// Mean total clicks in the recorded image histogram.
    pub expected_counts: f64,
    pub seed: u64,
}

impl Default for AfsharConfig {
    fn default() -> Self {
        Self {
            wavelength: 702e-9,
            slits: SlitGeometry {
                width: 40e-6,
                separation: 250e-6,
                beam_waist: 8e-6,
            },
            grid_samples: 65_536,
            grid_pitch: 1e-6,
            slits_to_grid: 0.1,
            grid_to_lens: 0.05,
            focal_length: 0.075,
            lens_to_image: 0.15,
            imaging_tolerance: 1e-3,
            wire_width_fraction: 0.1,
            node_threshold: 0.05,
            blocked_slit: SlitBlock::None,
            grid_present: true,
            image_window: 1e-3,
            image_bins: 500,
            expected_counts: 1e5,
            seed: 12345,
        }
    }
}

impl AfsharConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("wavelength", self.wavelength)?;
        self.slits.validate()?;
        if self.grid_samples < 2 {
            return Err(invalid("grid_samples", "must be >= 2"));
        }
        ensure_positive("grid_pitch", self.grid_pitch)?;
        ensure_positive("slits_to_grid", self.slits_to_grid)?;
        if !(self.grid_to_lens.is_finite() && self.grid_to_lens >= 0.0) {
            return Err(invalid("grid_to_lens", "must be >= 0"));
        }
        ensure_positive("focal_length", self.focal_length)?;
        ensure_positive("lens_to_image", self.lens_to_image)?;
        ensure_positive("imaging_tolerance", self.imaging_tolerance)?;
        ensure_positive("wire_width_fraction", self.wire_width_fraction)?;
        if self.wire_width_fraction >= 1.0 {
            return Err(invalid("wire_width_fraction", "wires must be narrower than the node spacing"));
        }
        ensure_unit_interval("node_threshold", self.node_threshold)?;
        ensure_positive("image_window", self.image_window)?;
        ensure_count("image_bins", self.image_bins)?;
        ensure_positive("expected_counts", self.expected_counts)?;
        let object = self.slits_to_grid + self.grid_to_lens;
        let mismatch = (1.0 / object + 1.0 / self.lens_to_image - 1.0 / self.focal_length).abs();
        if mismatch * self.focal_length > self.imaging_tolerance {
            return Err(Error::ImagingCondition {
                object,
                image: self.lens_to_image,
                focal: self.focal_length,
            });
        }
        Ok(())
    }

    /// Slit closed in the one-slit comparison.
    pub fn comparison_block(&self) -> SlitBlock {
        match self.blocked_slit {
            SlitBlock::None => SlitBlock::SlitB,
            b => b,
        }
    }
}

/// `<a, b> / sqrt(<a, a> <b, b>)`.
pub fn normalized_cross_correlation(a: &[f64], b: &[f64]) -> f64 {
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let denom = (dot(a, a) * dot(b, b)).sqrt();
    if denom > 0.0 {
        dot(a, b) / denom
    } else {
        0.0
    }
}

fn source(cfg: &AfsharConfig, grid: Grid, block: SlitBlock) -> Result<ScalarField> {
    let [ca, cb] = cfg.slits.centers();
    let mut field = ScalarField::zeros(grid, cfg.wavelength)?;
    if block != SlitBlock::SlitA {
        field = field.add(&cfg.slits.slit_field(grid, cfg.wavelength, ca)?)?;
    }
    if block != SlitBlock::SlitB {
        field = field.add(&cfg.slits.slit_field(grid, cfg.wavelength, cb)?)?;
    }
    Ok(field)
}

struct Case {
    image: Vec<f64>,
    intercepted: f64,
}

/// Carries a grid-plane field through the optional wires, the lens and on to
/// the image plane.
fn image(cfg: &AfsharConfig, at_grid: &ScalarField, wires: Option<&ApertureMask>) -> Result<Case> {
    let before = at_grid.total_power();
    let after_grid = match wires {
        Some(mask) => apply_mask(at_grid, mask)?,
        None => at_grid.clone(),
    };
    let intercepted = if before > 0.0 {
        (before - after_grid.total_power()) / before
    } else {
        0.0
    };
    let at_lens = propagate(&after_grid, cfg.grid_to_lens)?;
    let out = propagate(&apply_thin_lens(&at_lens, cfg.focal_length)?, cfg.lens_to_image)?;
    Ok(Case {
        image: out.intensity(),
        intercepted,
    })
}

/// Wire-grid imaging: wires at the interference nodes, then a lens imaging
/// the slits.
///
/// Always evaluates the four cases {wires, no wires} x {both slits, one
/// slit}. Interception is the fraction of grid-plane power stopped by the
/// wires; fidelity is the normalized cross-correlation of the image with and
/// without wires; `image_intensity_ratio` is the projection
/// `<with, without> / <without, without>`, which also registers overall
/// dimming.
pub fn run_afshar(cfg: &AfsharConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let grid = Grid::centered(cfg.grid_samples, cfg.grid_pitch)?;
    let positions = grid.positions();

    let both_at_grid = propagate(&source(cfg, grid, SlitBlock::None)?, cfg.slits_to_grid)?;
    let one_at_grid = propagate(&source(cfg, grid, cfg.comparison_block())?, cfg.slits_to_grid)?;
    let grid_profile = both_at_grid.intensity();
    let nodes = find_nodes_with_threshold(&grid_profile, &positions, cfg.node_threshold);
    if nodes.len() < 2 {
        return Err(Error::NoNodes);
    }
    let spacing = (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64;
    let wire_width = cfg.wire_width_fraction * spacing;
    let wires = ApertureMask::wires(grid, &nodes, wire_width)?;

    let both_open = image(cfg, &both_at_grid, None)?;
    let both_grid = image(cfg, &both_at_grid, Some(&wires))?;
    let one_open = image(cfg, &one_at_grid, None)?;
    let one_grid = image(cfg, &one_at_grid, Some(&wires))?;

    let mut result = ExperimentResult::new("afshar", cfg.seed, cfg);
    let ratio = |with: &[f64], without: &[f64]| {
        let num: f64 = with.iter().zip(without).map(|(a, b)| a * b).sum();
        let den: f64 = without.iter().map(|b| b * b).sum();
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    };
    for (label, open, wired) in [("both", &both_open, &both_grid), ("one", &one_open, &one_grid)] {
        result
            .scalars
            .insert(format!("power_intercepted_{label}"), wired.intercepted);
        result.scalars.insert(
            format!("fidelity_{label}"),
            normalized_cross_correlation(&open.image, &wired.image),
        );
        result.scalars.insert(
            format!("image_intensity_ratio_{label}"),
            ratio(&wired.image, &open.image),
        );
    }
    result.scalars.insert("node_count".into(), nodes.len() as f64);
    result.scalars.insert("node_spacing".into(), spacing);
    result.scalars.insert(
        "node_spacing_reference".into(),
        cfg.wavelength * cfg.slits_to_grid / cfg.slits.separation,
    );
    result.scalars.insert("wire_width".into(), wire_width);
    result.scalars.insert(
        "magnification".into(),
        -cfg.lens_to_image / (cfg.slits_to_grid + cfg.grid_to_lens),
    );
    result.series.insert("nodes".into(), nodes.clone());

    let window = Screen::new(0.0, cfg.image_window, cfg.image_bins)?;
    let centers = window.bin_centers();
    let mut binned = |name: &str, values: &[f64]| -> Result<Vec<f64>> {
        let v = window.integrate(values, &grid)?;
        result.profiles.insert(
            name.to_owned(),
            Profile {
                positions: centers.clone(),
                values: v.clone(),
            },
        );
        Ok(v)
    };
    let images = [
        binned("image_both_open", &both_open.image)?,
        binned("image_both_grid", &both_grid.image)?,
        binned("image_one_open", &one_open.image)?,
        binned("image_one_grid", &one_grid.image)?,
    ];
    let half_span = nodes[0].abs().max(nodes[nodes.len() - 1].abs()) + spacing;
    let plane = Screen::new(0.0, 2.0 * half_span, cfg.image_bins)?;
    result.profiles.insert(
        "grid_plane_both".into(),
        Profile {
            positions: plane.bin_centers(),
            values: plane.integrate(&grid_profile, &grid)?,
        },
    );

    let recorded = match (cfg.blocked_slit, cfg.grid_present) {
        (SlitBlock::None, false) => &images[0],
        (SlitBlock::None, true) => &images[1],
        (_, false) => &images[2],
        (_, true) => &images[3],
    };
    let total: f64 = recorded.iter().sum();
    let rates: Vec<f64> = if total > 0.0 {
        recorded.iter().map(|v| v / total * cfg.expected_counts).collect()
    } else {
        vec![0.0; recorded.len()]
    };
    let model = DetectorModel::new(1.0, 0.0, cfg.image_bins, 1.0)?;
    let clicks = sample_clicks(&rates, &model, DetectorId(0), cfg.seed)?;
    result.histograms.insert(
        "image_clicks".into(),
        Histogram {
            bin_centers: centers,
            counts: histogram(&clicks, cfg.image_bins),
        },
    );
    Ok(result)
}
