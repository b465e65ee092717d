//! Jones-vector polarization algebra.
//!
//! Vectors are ordered `(H, V)`. Polarizer angles are measured from the
//! vertical axis, counterclockwise positive, so the transmission axis of a
//! polarizer at angle `theta` is `(sin theta, cos theta)`. All polarizers are
//! ideal: lossless along the axis, perfectly extinguishing across it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Fully polarized transverse field as two complex amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JonesVector {
    pub e_h: Complex64,
    pub e_v: Complex64,
}

impl JonesVector {
    pub const fn new(e_h: Complex64, e_v: Complex64) -> Self {
        Self { e_h, e_v }
    }

    pub const fn from_real(e_h: f64, e_v: f64) -> Self {
        Self::new(Complex64::new(e_h, 0.0), Complex64::new(e_v, 0.0))
    }

    pub const fn zero() -> Self {
        Self::from_real(0.0, 0.0)
    }

    pub const fn horizontal() -> Self {
        Self::from_real(1.0, 0.0)
    }

    pub const fn vertical() -> Self {
        Self::from_real(0.0, 1.0)
    }

    /// Unit linear polarization along the axis of a polarizer at `angle`.
    pub fn linear(angle: PolarizerAngle) -> Self {
        let (s, c) = angle.radians().sin_cos();
        Self::from_real(s, c)
    }

    /// Unit circular polarization, `(±i, 1) / sqrt(2)`.
    pub fn circular(left_handed: bool) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sign = if left_handed { -1.0 } else { 1.0 };
        Self::new(Complex64::new(0.0, sign * r), Complex64::new(r, 0.0))
    }

    pub fn intensity(&self) -> f64 {
        self.e_h.norm_sqr() + self.e_v.norm_sqr()
    }

    /// Hermitian inner product `<self, other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &JonesVector) -> Complex64 {
        self.e_h.conj() * other.e_h + self.e_v.conj() * other.e_v
    }

    /// The state orthogonal to `self` with the same intensity.
    ///
    /// For vertical input this is `(1, 0)`.
    pub fn orthogonal(&self) -> Self {
        Self::new(self.e_v.conj(), -self.e_h.conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.e_h * factor, self.e_v * factor)
    }

    /// Returns a unit-intensity copy, or `None` for the null field.
    pub fn normalized(&self) -> Option<Self> {
        let norm = self.intensity().sqrt();
        (norm > 0.0 && norm.is_finite()).then(|| self.scale(Complex64::new(1.0 / norm, 0.0)))
    }
}

impl Add for JonesVector {
    type Output = JonesVector;

    fn add(self, rhs: JonesVector) -> JonesVector {
        JonesVector::new(self.e_h + rhs.e_h, self.e_v + rhs.e_v)
    }
}

impl Mul<f64> for JonesVector {
    type Output = JonesVector;

    fn mul(self, rhs: f64) -> JonesVector {
        JonesVector::new(self.e_h * rhs, self.e_v * rhs)
    }
}

/// Polarizer transmission-axis angle from the vertical, canonicalized into `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct PolarizerAngle(f64);

impl From<f64> for PolarizerAngle {
    fn from(theta: f64) -> Self {
        Self::from_radians(theta)
    }
}

impl From<PolarizerAngle> for f64 {
    fn from(angle: PolarizerAngle) -> f64 {
        angle.0
    }
}

impl PolarizerAngle {
    pub const VERTICAL: PolarizerAngle = PolarizerAngle(0.0);
    pub const HORIZONTAL: PolarizerAngle = PolarizerAngle(FRAC_PI_2);

    pub fn from_radians(theta: f64) -> Self {
        let t = theta.rem_euclid(2.0 * PI);
        Self(if t > PI { t - 2.0 * PI } else { t })
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    /// The axis rotated by a quarter turn.
    pub fn perpendicular(self) -> Self {
        Self::from_radians(self.0 + FRAC_PI_2)
    }
}

/// Projects `j` onto the transmission axis `u` of an ideal polarizer at `theta`,
/// returning `(u . j) u`.
pub fn apply_polarizer(j: JonesVector, theta: PolarizerAngle) -> JonesVector {
    let (s, c) = theta.radians().sin_cos();
    let along = j.e_h * s + j.e_v * c;
    JonesVector::new(along * s, along * c)
}

pub fn intensity(j: &JonesVector) -> f64 {
    j.intensity()
}

/// Splits `j` into its horizontal and vertical amplitudes.
pub fn decompose(j: &JonesVector) -> (Complex64, Complex64) {
    (j.e_h, j.e_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn close(a: JonesVector, b: JonesVector, tol: f64) -> bool {
        (a.e_h - b.e_h).norm() <= tol && (a.e_v - b.e_v).norm() <= tol
    }

    #[test]
    fn aligned_polarizer_passes_vertical() {
        let out = apply_polarizer(JonesVector::vertical(), PolarizerAngle::VERTICAL);
        assert_eq!(out, JonesVector::vertical());
    }

    #[test]
    fn crossed_polarizer_extinguishes() {
        let out = apply_polarizer(JonesVector::vertical(), PolarizerAngle::HORIZONTAL);
        assert!(out.intensity() < 1e-30);
    }

    #[test]
    fn diagonal_daughters_have_half_amplitudes_with_opposite_h_sign() {
        let v = JonesVector::vertical();
        let plus = apply_polarizer(v, PolarizerAngle::from_radians(FRAC_PI_4));
        let minus = apply_polarizer(v, PolarizerAngle::from_radians(-FRAC_PI_4));
        assert!(close(plus, JonesVector::from_real(0.5, 0.5), 1e-15));
        assert!(close(minus, JonesVector::from_real(-0.5, 0.5), 1e-15));
        assert_eq!(plus.e_h, -minus.e_h);
        assert_eq!(plus.e_v, minus.e_v);
    }

    #[test]
    fn intensity_examples() {
        assert_eq!(intensity(&JonesVector::vertical()), 1.0);
        assert!((intensity(&JonesVector::from_real(0.5, 0.5)) - 0.5).abs() < 1e-15);
        let circ = JonesVector::new(
            Complex64::new(0.0, FRAC_1_SQRT_2),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        );
        assert!((intensity(&circ) - 1.0).abs() < 1e-15);
        assert!((JonesVector::circular(true).intensity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decompose_reconstructs() {
        for j in [
            JonesVector::from_real(0.5, 0.5),
            JonesVector::from_real(-0.5, 0.5),
            JonesVector::zero(),
        ] {
            let (h, v) = decompose(&j);
            assert_eq!(JonesVector::new(h, v), j);
        }
    }

    #[test]
    fn angle_canonicalization() {
        assert_eq!(PolarizerAngle::from_radians(-PI).radians(), PI);
        assert_eq!(PolarizerAngle::from_radians(PI).radians(), PI);
        let a = PolarizerAngle::from_radians(3.0 * PI / 2.0).radians();
        assert!((a + FRAC_PI_2).abs() < 1e-15);
        assert!((PolarizerAngle::from_degrees(45.0).radians() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let j = JonesVector::new(Complex64::new(0.3, -0.2), Complex64::new(0.1, 0.9));
        assert!(j.inner(&j.orthogonal()).norm() < 1e-15);
        assert_eq!(JonesVector::vertical().orthogonal(), JonesVector::horizontal());
    }
}
