//! Sampled complex fields on uniform 1-D transverse grids, apertures, and
//! their propagation through free space and thin lenses.

mod propagation;

pub use propagation::{
    apply_thin_lens, band_limit, propagate, propagate_with_guard, SAMPLING_GUARD_TOLERANCE,
};

use num_complex::Complex64;

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::polarization::JonesVector;

/// Uniform 1-D sample grid: `n` samples spaced `pitch` meters apart, the
/// first at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    pitch: f64,
    origin: f64,
}

impl Grid {
    pub fn new(n: usize, pitch: f64, origin: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("grid samples", format!("need at least 2, got {n}")));
        }
        ensure_positive("grid pitch", pitch)?;
        if !origin.is_finite() {
            return Err(invalid("grid origin", "must be finite"));
        }
        Ok(Self { n, pitch, origin })
    }

    /// Grid with sample `n / 2` at `x = 0`.
    pub fn centered(n: usize, pitch: f64) -> Result<Self> {
        Self::new(n, pitch, -((n / 2) as f64) * pitch)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Total width covered by the samples, `n * pitch`.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.pitch
    }

    pub fn position(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.pitch
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.position(i)).collect()
    }

    pub fn first(&self) -> f64 {
        self.origin
    }

    pub fn last(&self) -> f64 {
        self.position(self.n - 1)
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Complex scalar amplitude sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    wavelength: f64,
    samples: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(grid: Grid, wavelength: f64, samples: Vec<Complex64>) -> Result<Self> {
        ensure_positive("wavelength", wavelength)?;
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: samples.len(),
            });
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(invalid("field samples", "must be finite"));
        }
        Ok(Self {
            grid,
            wavelength,
            samples,
        })
    }

    pub fn zeros(grid: Grid, wavelength: f64) -> Result<Self> {
        Self::new(grid, wavelength, vec![Complex64::new(0.0, 0.0); grid.len()])
    }

    pub fn uniform(grid: Grid, wavelength: f64, amplitude: Complex64) -> Result<Self> {
        Self::new(grid, wavelength, vec![amplitude; grid.len()])
    }

    /// Gaussian beam at its waist: amplitude `exp(-((x - center) / waist)^2)`.
    pub fn gaussian(grid: Grid, wavelength: f64, center: f64, waist: f64) -> Result<Self> {
        ensure_positive("beam waist", waist)?;
        let samples = grid
            .positions()
            .into_iter()
            .map(|x| {
                let u = (x - center) / waist;
                Complex64::new((-u * u).exp(), 0.0)
            })
            .collect();
        Self::new(grid, wavelength, samples)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `sum |a|^2 * pitch`.
    pub fn total_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.grid.pitch
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    pub fn scaled(&self, factor: Complex64) -> ScalarField {
        self.map(|s| s * factor)
    }

    /// `self + other` on a shared grid and wavelength.
    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.check_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid,
            wavelength: self.wavelength,
            samples,
        })
    }

    pub(crate) fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ScalarField {
        Self {
            grid: self.grid,
            wavelength: self.wavelength,
            samples: self.samples.iter().map(|&s| f(s)).collect(),
        }
    }

    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> ScalarField {
        debug_assert_eq!(samples.len(), self.grid.len());
        Self {
            grid: self.grid,
            wavelength: self.wavelength,
            samples,
        }
    }

    fn check_compatible(&self, other: &ScalarField) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.wavelength != other.wavelength {
            return Err(Error::GridMismatch(format!(
                "wavelength {} vs {}",
                self.wavelength, other.wavelength
            )));
        }
        Ok(())
    }
}

/// Two orthogonal polarization components sharing one grid and wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    h: ScalarField,
    v: ScalarField,
}

impl VectorField {
    pub fn new(h: ScalarField, v: ScalarField) -> Result<Self> {
        h.check_compatible(&v)?;
        Ok(Self { h, v })
    }

    /// Scalar amplitude profile carrying a uniform polarization state.
    pub fn from_scalar(field: &ScalarField, polarization: JonesVector) -> Self {
        Self {
            h: field.scaled(polarization.e_h),
            v: field.scaled(polarization.e_v),
        }
    }

    pub fn h(&self) -> &ScalarField {
        &self.h
    }

    pub fn v(&self) -> &ScalarField {
        &self.v
    }

    pub fn grid(&self) -> &Grid {
        self.h.grid()
    }

    pub fn wavelength(&self) -> f64 {
        self.h.wavelength()
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        Ok(Self {
            h: self.h.add(&other.h)?,
            v: self.v.add(&other.v)?,
        })
    }

    pub fn total_power(&self) -> f64 {
        self.h.total_power() + self.v.total_power()
    }

    /// Amplitude of the component along `axis`: `<axis, E(x)>` at every sample.
    pub fn project(&self, axis: &JonesVector) -> ScalarField {
        let samples = self
            .h
            .samples
            .iter()
            .zip(&self.v.samples)
            .map(|(&h, &v)| axis.inner(&JonesVector::new(h, v)))
            .collect();
        self.h.with_samples(samples)
    }

    pub fn propagate(&self, distance: f64) -> Result<VectorField> {
        Ok(Self {
            h: propagate(&self.h, distance)?,
            v: propagate(&self.v, distance)?,
        })
    }

    pub fn apply_mask(&self, mask: &ApertureMask) -> Result<VectorField> {
        Ok(Self {
            h: apply_mask(&self.h, mask)?,
            v: apply_mask(&self.v, mask)?,
        })
    }

    pub fn apply_thin_lens(&self, focal_length: f64) -> Result<VectorField> {
        Ok(Self {
            h: apply_thin_lens(&self.h, focal_length)?,
            v: apply_thin_lens(&self.v, focal_length)?,
        })
    }
}

/// Amplitude transmission in `[0, 1]` per grid sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureMask {
    grid: Grid,
    transmission: Vec<f64>,
}

impl ApertureMask {
    pub fn new(grid: Grid, transmission: Vec<f64>) -> Result<Self> {
        if transmission.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: transmission.len(),
            });
        }
        if let Some(bad) = transmission.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(invalid(
                "mask transmission",
                format!("entries must lie in [0, 1], found {bad}"),
            ));
        }
        Ok(Self { grid, transmission })
    }

    pub fn open(grid: Grid) -> Self {
        Self {
            grid,
            transmission: vec![1.0; grid.len()],
        }
    }

    pub fn opaque(grid: Grid) -> Self {
        Self {
            grid,
            transmission: vec![0.0; grid.len()],
        }
    }

    /// Single binary slit: open where `|x - center| <= width / 2`.
    pub fn slit(grid: Grid, center: f64, width: f64) -> Result<Self> {
        ensure_positive("slit width", width)?;
        let (lo, hi) = (center - width / 2.0, center + width / 2.0);
        if lo < grid.first() || hi > grid.last() {
            return Err(Error::GeometryDoesNotFit(format!(
                "slit [{lo:.4e}, {hi:.4e}] m exceeds grid [{:.4e}, {:.4e}] m",
                grid.first(),
                grid.last()
            )));
        }
        let transmission = grid
            .positions()
            .into_iter()
            .map(|x| if (x - center).abs() <= width / 2.0 { 1.0 } else { 0.0 })
            .collect();
        Ok(Self { grid, transmission })
    }

    /// Opaque wires of the given width centered on `centers`; open elsewhere.
    pub fn wires(grid: Grid, centers: &[f64], width: f64) -> Result<Self> {
        ensure_positive("wire width", width)?;
        let mut transmission = vec![1.0; grid.len()];
        for &c in centers {
            let first = ((c - width / 2.0 - grid.origin) / grid.pitch).floor() - 1.0;
            let first = first.max(0.0) as usize;
            for (i, t) in transmission.iter_mut().enumerate().skip(first) {
                let x = grid.position(i);
                if x - c > width / 2.0 {
                    break;
                }
                if (x - c).abs() <= width / 2.0 {
                    *t = 0.0;
                }
            }
        }
        Ok(Self { grid, transmission })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn transmission(&self) -> &[f64] {
        &self.transmission
    }

    /// Pointwise product of two masks on the same grid.
    pub fn combine(&self, other: &ApertureMask) -> Result<ApertureMask> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            transmission: self
                .transmission
                .iter()
                .zip(&other.transmission)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Fraction of samples with nonzero transmission.
    pub fn open_fraction(&self) -> f64 {
        self.transmission.iter().filter(|&&t| t > 0.0).count() as f64 / self.grid.len() as f64
    }
}

/// Two binary slits of width `slit_width` centered at `±slit_separation / 2`.
pub fn make_two_slit_mask(grid: Grid, slit_width: f64, slit_separation: f64) -> Result<ApertureMask> {
    ensure_positive("slit_width", slit_width)?;
    ensure_positive("slit_separation", slit_separation)?;
    if slit_separation <= slit_width {
        return Err(invalid(
            "slit_separation",
            format!("must exceed slit_width ({slit_separation} <= {slit_width})"),
        ));
    }
    let a = ApertureMask::slit(grid, -slit_separation / 2.0, slit_width)?;
    let b = ApertureMask::slit(grid, slit_separation / 2.0, slit_width)?;
    let transmission = a
        .transmission
        .iter()
        .zip(&b.transmission)
        .map(|(x, y)| x.max(*y))
        .collect();
    Ok(ApertureMask { grid, transmission })
}

pub fn apply_mask(field: &ScalarField, mask: &ApertureMask) -> Result<ScalarField> {
    field.grid.check_same(&mask.grid)?;
    let samples = field
        .samples
        .iter()
        .zip(&mask.transmission)
        .map(|(s, t)| s * *t)
        .collect();
    Ok(field.with_samples(samples))
}

/// `|h|^2 + |v|^2` at every sample.
pub fn intensity_profile(field: &VectorField) -> Vec<f64> {
    field
        .h
        .samples
        .iter()
        .zip(&field.v.samples)
        .map(|(h, v)| h.norm_sqr() + v.norm_sqr())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::centered(2000, 1e-6).unwrap()
    }

    #[test]
    fn two_slit_open_fraction_matches_geometry() {
        let mask = make_two_slit_mask(grid(), 40e-6, 250e-6).unwrap();
        let expected = 2.0 * 40.0 / 2000.0;
        // ±1 sample per edge
        assert!((mask.open_fraction() - expected).abs() <= 4.0 / 2000.0);
        assert!(mask.transmission().iter().all(|&t| t == 0.0 || t == 1.0));
    }

    #[test]
    fn slit_wider_than_separation_is_rejected() {
        assert!(make_two_slit_mask(grid(), 300e-6, 250e-6).is_err());
        assert!(make_two_slit_mask(grid(), 250e-6, 250e-6).is_err());
    }

    #[test]
    fn slits_outside_grid_are_rejected() {
        let err = make_two_slit_mask(grid(), 40e-6, 1.99e-3).unwrap_err();
        assert!(matches!(err, Error::GeometryDoesNotFit(_)));
    }

    #[test]
    fn mask_passes_power_times_open_fraction() {
        let g = grid();
        let f = ScalarField::uniform(g, 702e-9, Complex64::new(1.0, 0.0)).unwrap();
        let mask = make_two_slit_mask(g, 40e-6, 250e-6).unwrap();
        let out = apply_mask(&f, &mask).unwrap();
        let expected = f.total_power() * mask.open_fraction();
        assert!((out.total_power() - expected).abs() < 1e-15);
    }

    #[test]
    fn identity_null_and_half_masks() {
        let g = grid();
        let f = ScalarField::gaussian(g, 702e-9, 0.0, 200e-6).unwrap();
        assert_eq!(apply_mask(&f, &ApertureMask::open(g)).unwrap(), f);
        assert_eq!(apply_mask(&f, &ApertureMask::opaque(g)).unwrap().total_power(), 0.0);

        let u = ScalarField::uniform(g, 702e-9, Complex64::new(2.0, 0.0)).unwrap();
        let half: Vec<f64> = (0..g.len()).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let out = apply_mask(&u, &ApertureMask::new(g, half).unwrap()).unwrap();
        assert!((out.total_power() - u.total_power() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn mask_grid_mismatch_is_an_error() {
        let f = ScalarField::zeros(grid(), 702e-9).unwrap();
        let other = ApertureMask::open(Grid::centered(10, 1e-6).unwrap());
        assert!(matches!(apply_mask(&f, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn mask_rejects_out_of_range_transmission() {
        let g = Grid::centered(4, 1.0).unwrap();
        assert!(ApertureMask::new(g, vec![0.0, 1.0, 1.5, 0.0]).is_err());
    }

    #[test]
    fn wires_block_their_width() {
        let g = Grid::centered(1000, 1e-6).unwrap();
        let m = ApertureMask::wires(g, &[0.0, 100e-6], 10.5e-6).unwrap();
        let closed = m.transmission().iter().filter(|&&t| t == 0.0).count();
        assert_eq!(closed, 22);
    }

    #[test]
    fn intensity_profile_examples() {
        let g = Grid::centered(64, 1e-6).unwrap();
        let zero = ScalarField::zeros(g, 1e-6).unwrap();
        let null = VectorField::new(zero.clone(), zero.clone()).unwrap();
        assert!(intensity_profile(&null).iter().all(|&i| i == 0.0));

        let h = ScalarField::gaussian(g, 1e-6, 0.0, 10e-6).unwrap();
        let hv = VectorField::new(h.clone(), zero).unwrap();
        assert_eq!(intensity_profile(&hv), h.intensity());
    }

    #[test]
    fn complementary_components_sum_to_envelope() {
        use crate::analysis::visibility;
        let g = Grid::centered(4096, 1e-5).unwrap();
        let (a, b) = (500.0_f64, 2000.0_f64);
        let env = |x: f64| (-a * x * x).exp().sqrt();
        let h: Vec<Complex64> = g
            .positions()
            .iter()
            .map(|&x| Complex64::new(env(x) * (b * x).cos(), 0.0))
            .collect();
        let v: Vec<Complex64> = g
            .positions()
            .iter()
            .map(|&x| Complex64::new(0.0, env(x) * (b * x).sin()))
            .collect();
        let field = VectorField::new(
            ScalarField::new(g, 702e-9, h).unwrap(),
            ScalarField::new(g, 702e-9, v).unwrap(),
        )
        .unwrap();
        let total = intensity_profile(&field);
        let sum: Vec<f64> = field
            .h()
            .intensity()
            .iter()
            .zip(field.v().intensity())
            .map(|(x, y)| x + y)
            .collect();
        assert_eq!(total, sum);
        let region = visibility::central_region(&total, 0.5);
        assert!(visibility::visibility(&total, region) < 0.05);
    }

    #[test]
    fn projection_onto_axes_recovers_components() {
        let g = Grid::centered(16, 1e-6).unwrap();
        let f = ScalarField::gaussian(g, 1e-6, 0.0, 3e-6).unwrap();
        let vf = VectorField::from_scalar(&f, JonesVector::from_real(0.6, 0.8));
        let h = vf.project(&JonesVector::horizontal());
        for (p, s) in h.samples().iter().zip(f.samples()) {
            assert!((p - s * 0.6).norm() < 1e-15);
        }
    }
}
