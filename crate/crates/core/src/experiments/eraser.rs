use std::f64::consts::{FRAC_PI_4, PI};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{ensure_count, BinSampler, ExperimentResult, Histogram, Profile, SlitGeometry};
use crate::analysis::{
    central_region, fit_fringe, fringe_visibility, histogram, match_coincidences, visibility,
    CoincidenceWindow, FringeFit,
};
use crate::detection::{chronological, ClickEvent, DetectorId, Screen};
use crate::error::{ensure_positive, ensure_unit_interval, invalid, Error, Result};
use crate::polarization::{apply_polarizer, JonesVector, PolarizerAngle};
use crate::rng::{indexed_rng, stream_rng, Stream};
use crate::sources::{PdcSource, PdcType, PulsePair};
use crate::wavefield::{Grid, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdlerPolarizer {
    Vertical,
    Horizontal,
    /// No polarizer: every idler reaching the detector clicks.
    Absent,
}

impl IdlerPolarizer {
    pub const ALL: [IdlerPolarizer; 3] = [Self::Vertical, Self::Horizontal, Self::Absent];

    pub fn label(self) -> &'static str {
        match self {
            Self::Vertical => "vertical",
            Self::Horizontal => "horizontal",
            Self::Absent => "absent",
        }
    }

    /// Probability that an idler polarized as `idler` passes.
    pub fn transmission(self, idler: &JonesVector) -> f64 {
        match self {
            Self::Vertical => JonesVector::vertical().inner(idler).norm_sqr(),
            Self::Horizontal => JonesVector::horizontal().inner(idler).norm_sqr(),
            Self::Absent => idler.intensity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EraserConfig {
    /// Meters.
    pub wavelength: f64,
    pub slits: SlitGeometry,
    /// Slits to detection screen, meters.
    pub screen_distance: f64,
    /// Polarizers in front of slit A (left) and slit B (right).
    pub slit_polarizers: [PolarizerAngle; 2],
    /// Idler analyzer settings to run; each gets its own coincidence histogram
    /// from the same signal clicks.
    pub idler_settings: Vec<IdlerPolarizer>,
    pub pdc_type: PdcType,
    pub n_pairs: usize,
    /// Pairs per second.
    pub pair_rate: f64,
    pub pairing_efficiency: f64,
    /// Applies to signal and idler detectors alike.
    pub detector_efficiency: f64,
    /// Dark clicks per second per detector.
    pub dark_rate: f64,
    pub grid_samples: usize,
    /// Meters.
    pub grid_pitch: f64,
    /// Meters.
    pub screen_width: f64,
    pub screen_bins: usize,
    pub coincidence_window: CoincidenceWindow,
    /// Extra signal path delay, seconds.
    pub signal_delay: f64,
    pub seed: u64,
}

impl Default for EraserConfig {
    fn default() -> Self {
        Self {
            wavelength: 702e-9,
            slits: SlitGeometry {
                width: 40e-6,
                separation: 250e-6,
                beam_waist: 8e-6,
            },
            screen_distance: 0.5,
            slit_polarizers: [
                PolarizerAngle::from_radians(-FRAC_PI_4),
                PolarizerAngle::from_radians(FRAC_PI_4),
            ],
            idler_settings: IdlerPolarizer::ALL.to_vec(),
            pdc_type: PdcType::TypeI,
            n_pairs: 100_000,
            pair_rate: 1e5,
            pairing_efficiency: 1.0,
            detector_efficiency: 1.0,
            dark_rate: 0.0,
            grid_samples: 65_536,
            grid_pitch: 2e-6,
            screen_width: 40e-3,
            screen_bins: 400,
            coincidence_window: CoincidenceWindow::default(),
            signal_delay: 8e-9,
            seed: 12345,
        }
    }
}

impl EraserConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("wavelength", self.wavelength)?;
        self.slits.validate()?;
        ensure_positive("screen_distance", self.screen_distance)?;
        ensure_count("n_pairs", self.n_pairs)?;
        ensure_positive("pair_rate", self.pair_rate)?;
        ensure_unit_interval("pairing_efficiency", self.pairing_efficiency)?;
        ensure_unit_interval("detector_efficiency", self.detector_efficiency)?;
        if !(self.dark_rate.is_finite() && self.dark_rate >= 0.0) {
            return Err(invalid("dark_rate", "must be >= 0"));
        }
        if self.grid_samples < 2 {
            return Err(invalid("grid_samples", "must be >= 2"));
        }
        ensure_positive("grid_pitch", self.grid_pitch)?;
        ensure_positive("screen_width", self.screen_width)?;
        ensure_count("screen_bins", self.screen_bins)?;
        if !(self.signal_delay.is_finite() && self.signal_delay >= 0.0) {
            return Err(invalid("signal_delay", "must be >= 0"));
        }
        let extent = self.grid_samples as f64 * self.grid_pitch;
        if self.screen_width > extent {
            return Err(Error::GeometryDoesNotFit(format!(
                "screen width {} m exceeds grid extent {extent} m",
                self.screen_width
            )));
        }
        Ok(())
    }

    /// Analytic fringe frequency `pi d / (lambda L)` of the intensity pattern.
    pub fn reference_b(&self) -> f64 {
        PI * self.slits.separation / (self.wavelength * self.screen_distance)
    }
}

/// Screen intensities (power per bin) of the slit field, split by polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenPatterns {
    pub screen: Screen,
    pub bin_centers: Vec<f64>,
    /// Vertical component.
    pub v: Vec<f64>,
    /// Horizontal component.
    pub h: Vec<f64>,
    /// Component along slit A's polarizer axis.
    pub tag_a: Vec<f64>,
    /// Component orthogonal to slit A's polarizer axis.
    pub tag_b: Vec<f64>,
    pub total: Vec<f64>,
}

/// Axis of slit A's polarizer as a unit Jones vector.
pub(crate) fn tag_axis(cfg: &EraserConfig) -> JonesVector {
    JonesVector::linear(cfg.slit_polarizers[0])
}

/// Solves the tagged two-slit field once and bins it onto the screen.
pub fn screen_patterns(cfg: &EraserConfig) -> Result<ScreenPatterns> {
    cfg.validate()?;
    let grid = Grid::centered(cfg.grid_samples, cfg.grid_pitch)?;
    let [ca, cb] = cfg.slits.centers();
    let mother = JonesVector::vertical();
    let a = VectorField::from_scalar(
        &cfg.slits.slit_field(grid, cfg.wavelength, ca)?,
        apply_polarizer(mother, cfg.slit_polarizers[0]),
    );
    let b = VectorField::from_scalar(
        &cfg.slits.slit_field(grid, cfg.wavelength, cb)?,
        apply_polarizer(mother, cfg.slit_polarizers[1]),
    );
    let field = a.add(&b)?.propagate(cfg.screen_distance)?;
    let screen = Screen::new(0.0, cfg.screen_width, cfg.screen_bins)?;
    let bin = |intensity: Vec<f64>| screen.integrate(&intensity, &grid);
    let axis = tag_axis(cfg);
    let v = bin(field.v().intensity())?;
    let h = bin(field.h().intensity())?;
    let tag_a = bin(field.project(&axis).intensity())?;
    let tag_b = bin(field.project(&axis.orthogonal()).intensity())?;
    let total = v.iter().zip(&h).map(|(v, h)| v + h).collect();
    Ok(ScreenPatterns {
        bin_centers: screen.bin_centers(),
        screen,
        v,
        h,
        tag_a,
        tag_b,
        total,
    })
}

/// Which of two analysis channels a signal click belongs to, with the bin.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SignalClick {
    pub bin: usize,
    pub first_channel: bool,
}

/// Per-pair uniform draws for the signal arm. Three draws per pair keep the
/// stream aligned however the pair is later analysed.
pub(crate) struct SignalDraws {
    draws: Vec<[f64; 3]>,
}

impl SignalDraws {
    pub(crate) fn new(seed: u64, n: usize) -> Self {
        let mut rng = stream_rng(seed, Stream::Signal);
        let draws = (0..n)
            .map(|_| [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        Self { draws }
    }

    /// Detected click for pair `i`, its bin drawn from the total intensity and
    /// its channel from the share of `first` in that bin.
    pub(crate) fn click(
        &self,
        i: usize,
        efficiency: f64,
        sampler: &BinSampler,
        first: &[f64],
        second: &[f64],
    ) -> Option<SignalClick> {
        let [u_eff, u_bin, u_channel] = self.draws[i];
        if u_eff >= efficiency {
            return None;
        }
        let bin = sampler.sample(u_bin);
        let (w1, w2) = (first[bin].max(0.0), second[bin].max(0.0));
        let first_channel = w1 + w2 > 0.0 && u_channel * (w1 + w2) < w1;
        Some(SignalClick {
            bin,
            first_channel,
        })
    }
}

/// Dark clicks spread uniformly over `[0, duration)` and over `n_bins` bins.
pub(crate) fn dark_clicks(
    seed: u64,
    index: u64,
    detector: DetectorId,
    rate: f64,
    duration: f64,
    n_bins: usize,
) -> Result<Vec<ClickEvent>> {
    let mean = rate * duration;
    if mean <= 0.0 {
        return Ok(Vec::new());
    }
    let mut rng = indexed_rng(seed, Stream::Dark, index);
    let n = Poisson::new(mean)
        .map_err(|e| invalid("dark_rate", e.to_string()))?
        .sample(&mut rng) as u64;
    Ok((0..n)
        .map(|_| {
            let t = rng.random::<f64>() * duration;
            let bin = rng.random_range(0..n_bins);
            ClickEvent::new(detector, bin, t)
        })
        .collect())
}

pub(crate) fn run_duration(pairs: &[PulsePair], delay: f64) -> f64 {
    pairs.last().map_or(0.0, |p| p.timestamp) + delay
}

pub(crate) const SIGNAL_DETECTOR: DetectorId = DetectorId(0);

/// Lock-in visibility of a histogram against the expected fringe frequency.
pub(crate) fn histogram_visibility(
    hist: &Histogram,
    region: std::ops::Range<usize>,
    b: f64,
) -> f64 {
    fringe_visibility(&hist.counts_f64(), &hist.bin_centers, region, b)
}

/// Fits histograms that visibly carry fringes; failed fits are skipped and
/// non-converged ones are kept with `converged = false`.
pub(crate) fn fit_if_fringed(hist: &Histogram, vis: f64) -> Option<FringeFit> {
    if vis <= 0.5 {
        return None;
    }
    match fit_fringe(&hist.counts_f64(), &hist.bin_centers) {
        Ok(fit) => Some(fit),
        Err(Error::FitDidNotConverge { best, .. }) => Some(*best),
        Err(_) => None,
    }
}

pub(crate) fn normalized(values: &[f64]) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        values.iter().map(|v| v / total).collect()
    } else {
        values.to_vec()
    }
}

/// Polarization-tagged two-slit eraser with coincidence filtering.
///
/// Each signal pulse lands in a bin drawn from the total screen intensity and
/// belongs to the vertical or horizontal daughter with probability equal to
/// that daughter's share of the bin. Its idler partner carries the matching
/// polarization for the source type and passes the idler analyzer per Malus's
/// law. With ideal pairing the vertical and horizontal coincidence
/// histograms therefore split the paired signal clicks exactly.
pub fn run_eraser(cfg: &EraserConfig) -> Result<ExperimentResult> {
    let patterns = screen_patterns(cfg)?;
    let sampler = BinSampler::new(&patterns.total)?;
    let pairs = PdcSource::new(cfg.pdc_type, cfg.pair_rate, cfg.pairing_efficiency)?
        .generate(cfg.n_pairs, cfg.seed);
    let draws = SignalDraws::new(cfg.seed, pairs.len());
    let duration = run_duration(&pairs, cfg.signal_delay);

    let mut signal = Vec::with_capacity(pairs.len());
    let mut partners = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let Some(click) = draws.click(i, cfg.detector_efficiency, &sampler, &patterns.v, &patterns.h)
        else {
            continue;
        };
        let axis = if click.first_channel {
            JonesVector::vertical()
        } else {
            JonesVector::horizontal()
        };
        signal.push(ClickEvent::new(
            SIGNAL_DETECTOR,
            click.bin,
            pair.timestamp + cfg.signal_delay,
        ));
        partners.push((i, pair.idler.map(|_| cfg.pdc_type.partner(&axis))));
    }
    // Signal clicks are already chronological; dark clicks are merged in.
    signal.extend(dark_clicks(
        cfg.seed,
        0,
        SIGNAL_DETECTOR,
        cfg.dark_rate,
        duration,
        cfg.screen_bins,
    )?);
    signal.sort_by(chronological);

    let mut result = ExperimentResult::new("eraser", cfg.seed, cfg);
    let region = central_region(&patterns.total, 0.5);
    let b_ref = cfg.reference_b();
    let centers = patterns.bin_centers.clone();
    let make_hist = |clicks: &[ClickEvent]| Histogram {
        bin_centers: centers.clone(),
        counts: histogram(clicks, cfg.screen_bins),
    };

    let raw = make_hist(&signal);
    let raw_total = raw.total() as f64;
    let raw_vis = histogram_visibility(&raw, region.clone(), b_ref);
    result.scalars.insert("visibility_raw".into(), raw_vis);
    if let Some(fit) = fit_if_fringed(&raw, raw_vis) {
        result.fits.insert("raw".into(), fit);
    }
    result.histograms.insert("raw".into(), raw);

    // Every setting sees the same idler draws, so complementary settings
    // partition the pairs exactly.
    let idler_draws: Vec<f64> = {
        let mut rng = stream_rng(cfg.seed, Stream::Idler);
        partners.iter().map(|_| rng.random::<f64>()).collect()
    };
    for (k, &setting) in cfg.idler_settings.iter().enumerate() {
        let detector = DetectorId(1 + k as u32);
        let mut idler: Vec<ClickEvent> = partners
            .iter()
            .zip(&idler_draws)
            .filter_map(|(&(i, partner), &u)| {
                let partner = partner?;
                let p = cfg.detector_efficiency * setting.transmission(&partner);
                (u < p).then(|| ClickEvent::new(detector, 0, pairs[i].timestamp))
            })
            .collect();
        idler.extend(dark_clicks(cfg.seed, 1 + k as u64, detector, cfg.dark_rate, duration, 1)?);
        idler.sort_by(chronological);

        let matched: Vec<ClickEvent> =
            match_coincidences(&signal, &idler, cfg.coincidence_window, cfg.signal_delay)
                .into_iter()
                .map(|(s, _)| signal[s])
                .collect();
        let name = format!("coincidence_{}", setting.label());
        let hist = make_hist(&matched);
        let vis = histogram_visibility(&hist, region.clone(), b_ref);
        result.scalars.insert(format!("visibility_{name}"), vis);
        result.scalars.insert(
            format!("retained_fraction_{}", setting.label()),
            if raw_total > 0.0 { hist.total() as f64 / raw_total } else { 0.0 },
        );
        if let Some(fit) = fit_if_fringed(&hist, vis) {
            result.fits.insert(name.clone(), fit);
        }
        result.histograms.insert(name, hist);
    }

    if let (Some(v), Some(h)) = (
        result.fits.get("coincidence_vertical"),
        result.fits.get("coincidence_horizontal"),
    ) {
        result
            .scalars
            .insert("phase_difference".into(), (h.phi - v.phi).rem_euclid(PI));
    }

    let share_v = patterns.v.iter().sum::<f64>() / patterns.total.iter().sum::<f64>();
    result.scalars.insert("vertical_share".into(), share_v);
    result.scalars.insert("b_reference".into(), b_ref);
    result.scalars.insert("fringe_period_reference".into(), PI / b_ref);
    for (name, values) in [("v", &patterns.v), ("h", &patterns.h), ("total", &patterns.total)] {
        result.scalars.insert(
            format!("expected_visibility_{name}"),
            visibility(values, region.clone()),
        );
        result.profiles.insert(
            format!("intensity_{name}"),
            Profile {
                positions: centers.clone(),
                values: normalized(values),
            },
        );
    }
    Ok(result)
}
