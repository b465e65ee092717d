//! Flat TOML configuration files. Every key carries its unit in the name and
//! unknown keys are rejected, so `slit_width = 40` (meters? microns?) fails
//! instead of silently building a 40 m slit.

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wavecomp::analysis::CoincidenceWindow;
use wavecomp::experiments::{
    AfsharConfig, DelayedChoiceConfig, EraserConfig, IdlerPolarizer, SlitBlock, SlitGeometry,
};
use wavecomp::sources::PdcType;
use wavecomp::PolarizerAngle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PdcKind {
    #[serde(rename = "type_i")]
    TypeI,
    #[serde(rename = "type_ii")]
    TypeII,
}

impl From<PdcKind> for PdcType {
    fn from(k: PdcKind) -> Self {
        match k {
            PdcKind::TypeI => PdcType::TypeI,
            PdcKind::TypeII => PdcType::TypeII,
        }
    }
}

/// Keys shared by `eraser` and `delayed-choice`. `splitter_transmittance`
/// only affects `delayed-choice`; `idler_settings` only affects `eraser`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoSlitSettings {
    pub wavelength_nm: f64,
    pub slit_width_um: f64,
    pub slit_separation_um: f64,
    pub beam_waist_um: f64,
    pub screen_distance_m: f64,
    pub slit_polarizer_a_deg: f64,
    pub slit_polarizer_b_deg: f64,
    pub idler_settings: Vec<IdlerPolarizer>,
    pub pdc_type: PdcKind,
    pub n_pairs: usize,
    pub pair_rate_hz: f64,
    pub pairing_efficiency: f64,
    pub detector_efficiency: f64,
    pub dark_rate_hz: f64,
    pub grid_samples: usize,
    pub grid_pitch_um: f64,
    pub screen_width_mm: f64,
    pub screen_bins: usize,
    pub coincidence_window_ns: f64,
    pub signal_delay_ns: f64,
    pub splitter_transmittance: f64,
}

impl Default for TwoSlitSettings {
    fn default() -> Self {
        Self {
            wavelength_nm: 702.0,
            slit_width_um: 40.0,
            slit_separation_um: 250.0,
            beam_waist_um: 8.0,
            screen_distance_m: 0.5,
            slit_polarizer_a_deg: -45.0,
            slit_polarizer_b_deg: 45.0,
            idler_settings: IdlerPolarizer::ALL.to_vec(),
            pdc_type: PdcKind::TypeI,
            n_pairs: 100_000,
            pair_rate_hz: 1e5,
            pairing_efficiency: 1.0,
            detector_efficiency: 1.0,
            dark_rate_hz: 0.0,
            grid_samples: 65_536,
            grid_pitch_um: 2.0,
            screen_width_mm: 40.0,
            screen_bins: 400,
            coincidence_window_ns: 5.0,
            signal_delay_ns: 8.0,
            splitter_transmittance: 0.5,
        }
    }
}

impl TwoSlitSettings {
    pub fn eraser(&self, seed: u64) -> Result<EraserConfig> {
        let cfg = EraserConfig {
            wavelength: self.wavelength_nm * 1e-9,
            slits: SlitGeometry {
                width: self.slit_width_um * 1e-6,
                separation: self.slit_separation_um * 1e-6,
                beam_waist: self.beam_waist_um * 1e-6,
            },
            screen_distance: self.screen_distance_m,
            slit_polarizers: [
                PolarizerAngle::from_degrees(self.slit_polarizer_a_deg),
                PolarizerAngle::from_degrees(self.slit_polarizer_b_deg),
            ],
            idler_settings: self.idler_settings.clone(),
            pdc_type: self.pdc_type.into(),
            n_pairs: self.n_pairs,
            pair_rate: self.pair_rate_hz,
            pairing_efficiency: self.pairing_efficiency,
            detector_efficiency: self.detector_efficiency,
            dark_rate: self.dark_rate_hz,
            grid_samples: self.grid_samples,
            grid_pitch: self.grid_pitch_um * 1e-6,
            screen_width: self.screen_width_mm * 1e-3,
            screen_bins: self.screen_bins,
            coincidence_window: CoincidenceWindow::new(self.coincidence_window_ns * 1e-9)
                .context("coincidence_window_ns")?,
            signal_delay: self.signal_delay_ns * 1e-9,
            seed,
        };
        cfg.validate().context("invalid configuration")?;
        Ok(cfg)
    }

    pub fn delayed_choice(&self, seed: u64) -> Result<DelayedChoiceConfig> {
        if !(0.0..=1.0).contains(&self.splitter_transmittance) {
            anyhow::bail!(
                "invalid configuration: splitter_transmittance must lie in [0, 1], got {}",
                self.splitter_transmittance
            );
        }
        Ok(DelayedChoiceConfig {
            eraser: self.eraser(seed)?,
            splitter_transmittance: self.splitter_transmittance,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AfsharSettings {
    pub wavelength_nm: f64,
    pub slit_width_um: f64,
    pub slit_separation_um: f64,
    pub beam_waist_um: f64,
    pub grid_samples: usize,
    pub grid_pitch_um: f64,
    pub slits_to_grid_m: f64,
    pub grid_to_lens_m: f64,
    pub focal_length_m: f64,
    pub lens_to_image_m: f64,
    pub imaging_tolerance: f64,
    pub wire_width_fraction: f64,
    pub node_threshold: f64,
    pub blocked_slit: SlitBlock,
    pub grid_present: bool,
    pub image_window_mm: f64,
    pub image_bins: usize,
    pub expected_counts: f64,
}

impl Default for AfsharSettings {
    fn default() -> Self {
        Self {
            wavelength_nm: 702.0,
            slit_width_um: 40.0,
            slit_separation_um: 250.0,
            beam_waist_um: 8.0,
            grid_samples: 65_536,
            grid_pitch_um: 1.0,
            slits_to_grid_m: 0.1,
            grid_to_lens_m: 0.05,
            focal_length_m: 0.075,
            lens_to_image_m: 0.15,
            imaging_tolerance: 1e-3,
            wire_width_fraction: 0.1,
            node_threshold: 0.05,
            blocked_slit: SlitBlock::None,
            grid_present: true,
            image_window_mm: 1.0,
            image_bins: 500,
            expected_counts: 1e5,
        }
    }
}

impl AfsharSettings {
    pub fn afshar(&self, seed: u64) -> Result<AfsharConfig> {
        let cfg = AfsharConfig {
            wavelength: self.wavelength_nm * 1e-9,
            slits: SlitGeometry {
                width: self.slit_width_um * 1e-6,
                separation: self.slit_separation_um * 1e-6,
                beam_waist: self.beam_waist_um * 1e-6,
            },
            grid_samples: self.grid_samples,
            grid_pitch: self.grid_pitch_um * 1e-6,
            slits_to_grid: self.slits_to_grid_m,
            grid_to_lens: self.grid_to_lens_m,
            focal_length: self.focal_length_m,
            lens_to_image: self.lens_to_image_m,
            imaging_tolerance: self.imaging_tolerance,
            wire_width_fraction: self.wire_width_fraction,
            node_threshold: self.node_threshold,
            blocked_slit: self.blocked_slit,
            grid_present: self.grid_present,
            image_window: self.image_window_mm * 1e-3,
            image_bins: self.image_bins,
            expected_counts: self.expected_counts,
            seed,
        };
        cfg.validate().context("invalid configuration")?;
        Ok(cfg)
    }
}

/// Reads a settings file; no file means all defaults.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("cannot parse config {}", path.display()))
}

pub fn to_toml<T: Serialize>(settings: &T) -> Result<String> {
    Ok(toml::to_string(settings)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
    }

    #[test]
    fn empty_file_gives_defaults() {
        let s: TwoSlitSettings = toml::from_str("").unwrap();
        assert_eq!(s, TwoSlitSettings::default());
        let a: AfsharSettings = toml::from_str("").unwrap();
        assert_eq!(a, AfsharSettings::default());
    }

    #[test]
    fn defaults_round_trip() {
        let text = to_toml(&TwoSlitSettings::default()).unwrap();
        let back: TwoSlitSettings = toml::from_str(&text).unwrap();
        assert_eq!(back, TwoSlitSettings::default());
        let text = to_toml(&AfsharSettings::default()).unwrap();
        let back: AfsharSettings = toml::from_str(&text).unwrap();
        assert_eq!(back, AfsharSettings::default());
    }

    #[test]
    fn default_settings_match_library_defaults() {
        let got = TwoSlitSettings::default().eraser(12345).unwrap();
        let want = EraserConfig::default();
        assert!(close(got.wavelength, want.wavelength));
        assert!(close(got.slits.width, want.slits.width));
        assert!(close(got.slits.separation, want.slits.separation));
        assert!(close(got.slits.beam_waist, want.slits.beam_waist));
        assert!(close(got.grid_pitch, want.grid_pitch));
        assert!(close(got.screen_width, want.screen_width));
        assert!(close(got.signal_delay, want.signal_delay));
        assert!(close(got.coincidence_window.width(), want.coincidence_window.width()));
        assert!(close(got.slit_polarizers[0].radians(), want.slit_polarizers[0].radians()));
        assert!(close(got.slit_polarizers[1].radians(), want.slit_polarizers[1].radians()));
        assert_eq!(got.n_pairs, want.n_pairs);
        assert_eq!(got.idler_settings, want.idler_settings);
        assert_eq!(got.seed, want.seed);

        let got = AfsharSettings::default().afshar(12345).unwrap();
        let want = AfsharConfig::default();
        assert!(close(got.wavelength, want.wavelength));
        assert!(close(got.grid_pitch, want.grid_pitch));
        assert!(close(got.image_window, want.image_window));
        assert_eq!(got.image_bins, want.image_bins);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<TwoSlitSettings>("slit_width = 40").unwrap_err();
        assert!(err.to_string().contains("slit_width"), "{err}");
    }

    #[test]
    fn invalid_values_name_the_key() {
        let s: TwoSlitSettings = toml::from_str("slit_width_um = -1").unwrap();
        let err = format!("{:#}", s.eraser(1).unwrap_err());
        assert!(err.contains("slit_width"), "{err}");
        let s: TwoSlitSettings = toml::from_str("splitter_transmittance = 2.0").unwrap();
        let err = format!("{:#}", s.delayed_choice(1).unwrap_err());
        assert!(err.contains("splitter_transmittance"), "{err}");
    }

    #[test]
    fn partial_files_keep_other_defaults() {
        let s: TwoSlitSettings = toml::from_str("n_pairs = 10\npdc_type = \"type_ii\"").unwrap();
        assert_eq!(s.n_pairs, 10);
        assert_eq!(s.pdc_type, PdcKind::TypeII);
        assert_eq!(s.screen_bins, 400);
    }
}
