//! Classical correlated pulse pairs standing in for a down-conversion source,
//! and whole-pulse beam-splitter routing.
//!
//! Pulses carry definite polarization; no superposition is modeled. The
//! signal leaves the source vertically polarized and its idler partner is
//! orthogonal (Type I) or parallel (Type II) to it.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, ensure_unit_interval, invalid, Result};
use crate::polarization::JonesVector;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PdcType {
    /// Signal and idler polarizations anticorrelated.
    TypeI,
    /// Signal and idler polarizations correlated.
    TypeII,
}

impl PdcType {
    /// Polarization of the idler partner of a signal polarized as `signal`.
    pub fn partner(self, signal: &JonesVector) -> JonesVector {
        match self {
            PdcType::TypeI => signal.orthogonal(),
            PdcType::TypeII => *signal,
        }
    }
}

/// One emission event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePair {
    /// Emission time in seconds.
    pub timestamp: f64,
    pub signal: JonesVector,
    /// `None` when the idler partner was lost (pairing efficiency below one).
    pub idler: Option<JonesVector>,
    pub pdc_type: PdcType,
}

/// Pair source with Poissonian emission times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdcSource {
    pdc_type: PdcType,
    mean_rate: f64,
    pairing_efficiency: f64,
}

impl PdcSource {
    pub fn new(pdc_type: PdcType, mean_rate: f64, pairing_efficiency: f64) -> Result<Self> {
        ensure_positive("mean_rate", mean_rate)?;
        ensure_unit_interval("pairing_efficiency", pairing_efficiency)?;
        Ok(Self {
            pdc_type,
            mean_rate,
            pairing_efficiency,
        })
    }

    pub fn pdc_type(&self) -> PdcType {
        self.pdc_type
    }

    pub fn mean_rate(&self) -> f64 {
        self.mean_rate
    }

    /// Endless, seed-determined stream of pairs.
    pub fn stream(&self, seed: u64) -> PulseStream {
        PulseStream {
            source: *self,
            rng: stream_rng(seed, Stream::Source),
            gap: Exp::new(self.mean_rate).expect("rate validated at construction"),
            clock: 0.0,
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Vec<PulsePair> {
        self.stream(seed).take(n).collect()
    }
}

/// Iterator over the pairs of one [`PdcSource`]; timestamps strictly increase.
#[derive(Debug, Clone)]
pub struct PulseStream {
    source: PdcSource,
    rng: ChaCha8Rng,
    gap: Exp<f64>,
    clock: f64,
}

impl Iterator for PulseStream {
    type Item = PulsePair;

    fn next(&mut self) -> Option<PulsePair> {
        let mut next = self.clock + self.gap.sample(&mut self.rng);
        while next <= self.clock {
            next = self.clock + self.gap.sample(&mut self.rng);
        }
        self.clock = next;
        let kept = self.rng.random::<f64>() < self.source.pairing_efficiency;
        let signal = JonesVector::vertical();
        Some(PulsePair {
            timestamp: next,
            signal,
            idler: kept.then(|| self.source.pdc_type.partner(&signal)),
            pdc_type: self.source.pdc_type,
        })
    }
}

/// `n` perfectly paired pulses at `mean_rate` Hz.
pub fn generate_pdc_pairs(
    n: usize,
    pdc_type: PdcType,
    mean_rate: f64,
    seed: u64,
) -> Result<Vec<PulsePair>> {
    Ok(PdcSource::new(pdc_type, mean_rate, 1.0)?.generate(n, seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    Transmitted,
    Reflected,
}

/// Passive splitter that routes each pulse, whole, to exactly one port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    transmittance: f64,
}

impl BeamSplitter {
    pub fn new(transmittance: f64) -> Result<Self> {
        if !transmittance.is_finite() {
            return Err(invalid("transmittance", "must be finite"));
        }
        ensure_unit_interval("transmittance", transmittance)?;
        Ok(Self { transmittance })
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    /// Bernoulli(transmittance) choice; consumes exactly one draw.
    pub fn route<R: Rng + ?Sized>(&self, rng: &mut R) -> Port {
        if rng.random::<f64>() < self.transmittance {
            Port::Transmitted
        } else {
            Port::Reflected
        }
    }
}

/// Routes one pulse through a splitter of the given transmittance.
pub fn beam_splitter<R: Rng + ?Sized>(transmittance: f64, rng: &mut R) -> Result<Port> {
    Ok(BeamSplitter::new(transmittance)?.route(rng))
}
