use rand::Rng;
use serde::{Deserialize, Serialize};

use super::eraser::{
    dark_clicks, fit_if_fringed, histogram_visibility, run_duration, screen_patterns, tag_axis,
    SignalDraws, SIGNAL_DETECTOR,
};
use super::{BinSampler, EraserConfig, ExperimentResult, Histogram};
use crate::analysis::{central_region, histogram, match_coincidences};
use crate::detection::{chronological, ClickEvent, DetectorId};
use crate::error::Result;
use crate::polarization::JonesVector;
use crate::rng::{stream_rng, Stream};
use crate::sources::{BeamSplitter, PdcSource, Port};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayedChoiceConfig {
    /// Slit, source and detector settings; `idler_settings` is not used.
    pub eraser: EraserConfig,
    /// Probability that an idler is sent to the eraser arm.
    pub splitter_transmittance: f64,
}

impl Default for DelayedChoiceConfig {
    fn default() -> Self {
        Self {
            eraser: EraserConfig::default(),
            splitter_transmittance: 0.5,
        }
    }
}

/// Idler detectors, named after the signal subensemble they herald.
const SUBENSEMBLES: [&str; 4] = [
    "eraser_signal_v",
    "eraser_signal_h",
    "which_path_slit_a",
    "which_path_slit_b",
];

/// Delayed-choice eraser with a passive splitter in the idler path.
///
/// Transmitted idlers reach the eraser arm, a polarizing analyzer in the
/// horizontal/vertical basis: it sorts signal clicks by daughter pattern.
/// Reflected idlers reach the which-path arm, an analyzer aligned with the
/// slit polarizers: it sorts signal clicks by slit. Every signal click is
/// matched against the merged idler stream once, so the subensembles plus
/// the unmatched remainder partition the raw histogram exactly.
pub fn run_delayed_choice(cfg: &DelayedChoiceConfig) -> Result<ExperimentResult> {
    let e = &cfg.eraser;
    let splitter = BeamSplitter::new(cfg.splitter_transmittance)?;
    let patterns = screen_patterns(e)?;
    let sampler = BinSampler::new(&patterns.total)?;
    let pairs = PdcSource::new(e.pdc_type, e.pair_rate, e.pairing_efficiency)?.generate(e.n_pairs, e.seed);
    let draws = SignalDraws::new(e.seed, pairs.len());
    let mut route_rng = stream_rng(e.seed, Stream::Splitter);
    let mut idler_rng = stream_rng(e.seed, Stream::Idler);
    let duration = run_duration(&pairs, e.signal_delay);

    let tag = tag_axis(e);
    let eraser_axes = [JonesVector::vertical(), JonesVector::horizontal()];
    let which_axes = [tag, tag.orthogonal()];

    let mut signal = Vec::with_capacity(pairs.len());
    let mut idler = Vec::with_capacity(pairs.len());
    let (mut n_transmitted, mut n_reflected) = (0u64, 0u64);
    for (i, pair) in pairs.iter().enumerate() {
        let port = splitter.route(&mut route_rng);
        let u_idler: f64 = idler_rng.random();
        let (axes, first, second, base) = match port {
            Port::Transmitted => {
                n_transmitted += 1;
                (&eraser_axes, &patterns.v, &patterns.h, 1)
            }
            Port::Reflected => {
                n_reflected += 1;
                (&which_axes, &patterns.tag_a, &patterns.tag_b, 3)
            }
        };
        let Some(click) = draws.click(i, e.detector_efficiency, &sampler, first, second) else {
            continue;
        };
        signal.push(ClickEvent::new(SIGNAL_DETECTOR, click.bin, pair.timestamp + e.signal_delay));
        if pair.idler.is_none() {
            continue;
        }
        let channel = if click.first_channel { axes[0] } else { axes[1] };
        let partner = e.pdc_type.partner(&channel);
        // Two detectors behind the arm's analyzer, each aligned with the
        // partner of one signal channel.
        let t1 = e.pdc_type.partner(&axes[0]).inner(&partner).norm_sqr();
        let t2 = e.pdc_type.partner(&axes[1]).inner(&partner).norm_sqr();
        let eff = e.detector_efficiency;
        let detector = if u_idler < eff * t1 {
            Some(base)
        } else if u_idler < eff * (t1 + t2) {
            Some(base + 1)
        } else {
            None
        };
        if let Some(d) = detector {
            idler.push(ClickEvent::new(DetectorId(d), 0, pair.timestamp));
        }
    }
    signal.extend(dark_clicks(e.seed, 0, SIGNAL_DETECTOR, e.dark_rate, duration, e.screen_bins)?);
    signal.sort_by(chronological);
    for d in 1..=4u32 {
        idler.extend(dark_clicks(e.seed, d as u64, DetectorId(d), e.dark_rate, duration, 1)?);
    }
    idler.sort_by(chronological);

    let mut groups: [Vec<ClickEvent>; 5] = Default::default();
    let mut matched = vec![false; signal.len()];
    for (s, i) in match_coincidences(&signal, &idler, e.coincidence_window, e.signal_delay) {
        matched[s] = true;
        groups[(idler[i].detector.0 - 1) as usize].push(signal[s]);
    }
    groups[4] = signal
        .iter()
        .zip(&matched)
        .filter(|(_, &m)| !m)
        .map(|(c, _)| *c)
        .collect();

    let mut result = ExperimentResult::new("delayed_choice", e.seed, cfg);
    let region = central_region(&patterns.total, 0.5);
    let b_ref = e.reference_b();
    let make_hist = |clicks: &[ClickEvent]| Histogram {
        bin_centers: patterns.bin_centers.clone(),
        counts: histogram(clicks, e.screen_bins),
    };
    let names = SUBENSEMBLES.iter().copied().chain(["unmatched"]);
    for (name, group) in names.zip(&groups).chain([("raw", &signal)]) {
        let hist = make_hist(group);
        let vis = histogram_visibility(&hist, region.clone(), b_ref);
        result.scalars.insert(format!("visibility_{name}"), vis);
        result.scalars.insert(format!("count_{name}"), hist.total() as f64);
        if name.starts_with("eraser") {
            if let Some(fit) = fit_if_fringed(&hist, vis) {
                result.fits.insert(name.to_owned(), fit);
            }
        }
        result.histograms.insert(name.to_owned(), hist);
    }
    result.scalars.insert("routed_eraser_arm".into(), n_transmitted as f64);
    result.scalars.insert("routed_which_path_arm".into(), n_reflected as f64);
    result.scalars.insert("splitter_transmittance".into(), cfg.splitter_transmittance);
    result.scalars.insert("b_reference".into(), b_ref);
    Ok(result)
}
