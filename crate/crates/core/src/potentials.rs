//! Analytic potentials evaluated at complex argument, their derivatives, and
//! the admissible contour-rotation angle implied by their singularities.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance below which an evaluation counts as hitting a pole.
pub const POLE_TOLERANCE: f64 = 1e-8;

/// Absolute size below which a potential tail counts as flat.
const FLAT_TOLERANCE: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum PotentialSpec {
    Free,
    /// V0 / cosh² x
    RosenMorse {
        v0: f64,
    },
    /// (V0/2)(1 + tanh x)
    SmoothStep {
        v0: f64,
    },
    /// (x² − 1)² / (1 + (x/α)⁴)
    TruncatedDoubleWell {
        alpha: f64,
    },
    /// −depth · [e^{−((x−2)/2)²} + e^{−((x+2)/2)²}]
    GaussianDoubleWell {
        depth: f64,
    },
    /// ω² x² / 2 (unit oscillator mass)
    Harmonic {
        omega: f64,
    },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| Err(Error::InvalidParameter { field, reason: reason.to_string() });
        match *self {
            PotentialSpec::RosenMorse { v0 } | PotentialSpec::SmoothStep { v0 } if !(v0 > 0.0 && v0.is_finite()) => {
                bad("potential.V0", "must be > 0")
            }
            PotentialSpec::TruncatedDoubleWell { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                bad("potential.alpha", "must be > 0")
            }
            PotentialSpec::GaussianDoubleWell { depth } if !depth.is_finite() => {
                bad("potential.depth", "must be finite")
            }
            PotentialSpec::Harmonic { omega } if !(omega >= 0.0 && omega.is_finite()) => {
                bad("potential.omega", "must be >= 0")
            }
            _ => Ok(()),
        }
    }

    /// Whether V0 > ℏ²/(8m), the regime in which the Rosen-Morse scattering
    /// states carry a complex Legendre degree. `None` for other kinds.
    pub fn rosen_morse_above_threshold(&self, mass: f64, hbar: f64) -> Option<bool> {
        match *self {
            PotentialSpec::RosenMorse { v0 } => Some(v0 > hbar * hbar / (8.0 * mass)),
            _ => None,
        }
    }

    pub fn is_even(&self) -> bool {
        !matches!(self, PotentialSpec::SmoothStep { .. })
    }

    /// True when V tends to finite constants at ±∞, so that J_n − J̄_n decays.
    pub fn has_finite_limits(&self) -> bool {
        !matches!(self, PotentialSpec::Harmonic { .. })
    }

    /// Pole of the analytic continuation nearest to `z`, if any.
    pub fn nearest_pole(&self, z: Complex64) -> Option<Complex64> {
        match *self {
            PotentialSpec::RosenMorse { .. } | PotentialSpec::SmoothStep { .. } => {
                let k = ((z.im - FRAC_PI_2) / PI).round();
                Some(Complex64::new(0.0, FRAC_PI_2 + k * PI))
            }
            PotentialSpec::TruncatedDoubleWell { alpha } => {
                tdw_poles(alpha).into_iter().min_by(|a, b| (a - z).norm().partial_cmp(&(b - z).norm()).unwrap())
            }
            _ => None,
        }
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        if let Some(p) = self.nearest_pole(z) {
            let distance = (z - p).norm();
            if distance < POLE_TOLERANCE {
                return Err(Error::PoleProximity { z, distance });
            }
        }
        Ok(())
    }

    pub fn eval_potential(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.value(z))
    }

    pub fn eval_gradient(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.gradient(z))
    }

    pub fn eval_hessian(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.hessian(z))
    }

    /// V(z) without the pole check; callers must stay on admissible contours.
    #[inline]
    pub fn value(&self, z: Complex64) -> Complex64 {
        match *self {
            PotentialSpec::Free => Complex64::new(0.0, 0.0),
            PotentialSpec::RosenMorse { v0 } => v0 * sech_tanh(z).0,
            PotentialSpec::SmoothStep { v0 } => 0.5 * v0 * (1.0 + sech_tanh(z).1),
            PotentialSpec::TruncatedDoubleWell { alpha } => {
                let z2 = z * z;
                let num = (z2 - 1.0) * (z2 - 1.0);
                let den = 1.0 + z2 * z2 / alpha.powi(4);
                num / den
            }
            PotentialSpec::GaussianDoubleWell { depth } => {
                let (g1, g2) = gaussians(z);
                -depth * (g1 + g2)
            }
            PotentialSpec::Harmonic { omega } => 0.5 * omega * omega * z * z,
        }
    }

    #[inline]
    pub fn gradient(&self, z: Complex64) -> Complex64 {
        match *self {
            PotentialSpec::Free => Complex64::new(0.0, 0.0),
            PotentialSpec::RosenMorse { v0 } => {
                let (s2, t) = sech_tanh(z);
                -2.0 * v0 * s2 * t
            }
            PotentialSpec::SmoothStep { v0 } => 0.5 * v0 * sech_tanh(z).0,
            PotentialSpec::TruncatedDoubleWell { alpha } => {
                let (n, n1, _, d, d1, _) = tdw_parts(z, alpha);
                (n1 * d - n * d1) / (d * d)
            }
            PotentialSpec::GaussianDoubleWell { depth } => {
                let (g1, g2) = gaussians(z);
                depth * (0.5 * (z - 2.0) * g1 + 0.5 * (z + 2.0) * g2)
            }
            PotentialSpec::Harmonic { omega } => omega * omega * z,
        }
    }

    #[inline]
    pub fn hessian(&self, z: Complex64) -> Complex64 {
        match *self {
            PotentialSpec::Free => Complex64::new(0.0, 0.0),
            PotentialSpec::RosenMorse { v0 } => {
                let (s2, t) = sech_tanh(z);
                2.0 * v0 * s2 * (2.0 * t * t - s2)
            }
            PotentialSpec::SmoothStep { v0 } => {
                let (s2, t) = sech_tanh(z);
                -v0 * s2 * t
            }
            PotentialSpec::TruncatedDoubleWell { alpha } => {
                let (n, n1, n2, d, d1, d2) = tdw_parts(z, alpha);
                let first = n1 * d - n * d1;
                (n2 * d - n * d2) / (d * d) - 2.0 * d1 * first / (d * d * d)
            }
            PotentialSpec::GaussianDoubleWell { depth } => {
                let (g1, g2) = gaussians(z);
                let h = |u: Complex64, g: Complex64| (0.25 * u * u - 0.5) * g;
                -depth * (h(z - 2.0, g1) + h(z + 2.0, g2))
            }
            PotentialSpec::Harmonic { omega } => Complex64::new(omega * omega, 0.0),
        }
    }

    /// The constant that V equals (to within 1e−18 absolute) at `z`, if `z`
    /// lies in a flat tail of the potential.
    #[inline]
    pub fn flat_tail(&self, z: Complex64) -> Option<Complex64> {
        match *self {
            PotentialSpec::Free => Some(Complex64::new(0.0, 0.0)),
            PotentialSpec::RosenMorse { v0 } => {
                (z.re.abs() > tanh_flat_radius(4.0 * v0)).then(|| Complex64::new(0.0, 0.0))
            }
            PotentialSpec::SmoothStep { v0 } => {
                if z.re.abs() > tanh_flat_radius(v0) {
                    Some(Complex64::new(if z.re > 0.0 { v0 } else { 0.0 }, 0.0))
                } else {
                    None
                }
            }
            PotentialSpec::GaussianDoubleWell { depth } => {
                let margin = 4.0 * (2.0 * depth.abs().max(1e-300) / FLAT_TOLERANCE).ln();
                let u = z.re.abs() - 2.0;
                (u > 0.0 && u * u - z.im * z.im > margin).then(|| Complex64::new(0.0, 0.0))
            }
            PotentialSpec::TruncatedDoubleWell { .. } | PotentialSpec::Harmonic { .. } => None,
        }
    }

    /// Largest angle θ such that the line r + e^{iθ}ℝ through the real point
    /// `r` keeps every singularity strictly on the side it started on,
    /// capped at π/4.
    pub fn line_angle(&self, r: f64) -> f64 {
        let mut theta = FRAC_PI_4;
        for p in self.hull_vertices() {
            let clearance = if p.im > 0.0 { p.re - r } else { r - p.re };
            if clearance > 0.0 {
                theta = theta.min((p.im.abs() / clearance).atan());
            }
        }
        theta
    }

    /// Admissible rotation for a J_n integral whose interpolation points run
    /// along the chord from x0 to q_s.
    pub fn max_deformation_angle(&self, x0: f64, q_s: f64) -> f64 {
        self.line_angle(x0).min(self.line_angle(q_s))
    }

    /// Singularities that bound the convex hulls relevant for lines crossing
    /// the real axis; further poles lie behind these.
    fn hull_vertices(&self) -> Vec<Complex64> {
        match *self {
            PotentialSpec::RosenMorse { .. } | PotentialSpec::SmoothStep { .. } => {
                vec![Complex64::new(0.0, FRAC_PI_2), Complex64::new(0.0, -FRAC_PI_2)]
            }
            PotentialSpec::TruncatedDoubleWell { alpha } => tdw_poles(alpha).to_vec(),
            _ => Vec::new(),
        }
    }

    /// Default working angle: half the admissible maximum, which is π/8 for
    /// the entire potentials.
    pub fn working_angle(&self, x0: f64, q_s: f64) -> f64 {
        0.5 * self.max_deformation_angle(x0, q_s)
    }
}

fn tdw_poles(alpha: f64) -> [Complex64; 4] {
    [
        Complex64::from_polar(alpha, FRAC_PI_4),
        Complex64::from_polar(alpha, 3.0 * FRAC_PI_4),
        Complex64::from_polar(alpha, -FRAC_PI_4),
        Complex64::from_polar(alpha, -3.0 * FRAC_PI_4),
    ]
}

/// |Re z| beyond which scale·e^{−2|Re z|} < 1e−18.
fn tanh_flat_radius(scale: f64) -> f64 {
    0.5 * (scale.max(1e-300) / FLAT_TOLERANCE).ln().max(0.0) + 0.5
}

/// (sech² z, tanh z), stable for large |Re z|.
#[inline]
fn sech_tanh(z: Complex64) -> (Complex64, Complex64) {
    let flip = z.re < 0.0;
    let u = if flip { -z } else { z };
    let w = (-2.0 * u).exp();
    let inv = 1.0 / (1.0 + w);
    let s2 = 4.0 * w * inv * inv;
    let t = (1.0 - w) * inv;
    (s2, if flip { -t } else { t })
}

#[inline]
fn gaussians(z: Complex64) -> (Complex64, Complex64) {
    let a = z - 2.0;
    let b = z + 2.0;
    ((-0.25 * a * a).exp(), (-0.25 * b * b).exp())
}

/// Numerator, denominator and their first two derivatives for the truncated
/// double well.
#[inline]
fn tdw_parts(z: Complex64, alpha: f64) -> (Complex64, Complex64, Complex64, Complex64, Complex64, Complex64) {
    let a4 = alpha.powi(4);
    let z2 = z * z;
    let n = (z2 - 1.0) * (z2 - 1.0);
    let n1 = 4.0 * z * (z2 - 1.0);
    let n2 = 12.0 * z2 - 4.0;
    let d = 1.0 + z2 * z2 / a4;
    let d1 = 4.0 * z2 * z / a4;
    let d2 = 12.0 * z2 / a4;
    (n, n1, n2, d, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_specs() -> Vec<PotentialSpec> {
        vec![
            PotentialSpec::Free,
            PotentialSpec::RosenMorse { v0: 1.0 },
            PotentialSpec::SmoothStep { v0: 1.0 },
            PotentialSpec::TruncatedDoubleWell { alpha: 2.0 },
            PotentialSpec::GaussianDoubleWell { depth: 1.0 },
            PotentialSpec::Harmonic { omega: 0.7 },
        ]
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reference_values() {
        let rm = PotentialSpec::RosenMorse { v0: 1.0 };
        assert_eq!(rm.eval_potential(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(rm.eval_gradient(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let ss = PotentialSpec::SmoothStep { v0: 1.0 };
        assert_eq!(ss.eval_potential(c(0.0, 0.0)).unwrap(), c(0.5, 0.0));
        let gdw = PotentialSpec::GaussianDoubleWell { depth: 1.0 };
        assert!((gdw.value(c(0.0, 0.0)) - c(-2.0 * (-1.0f64).exp(), 0.0)).norm() < 1e-15);
        assert!((gdw.value(c(0.0, 0.0)).re + 0.735_758_882_342_884_6).abs() < 1e-15);
        let tdw = PotentialSpec::TruncatedDoubleWell { alpha: 2.0 };
        assert!((tdw.value(c(1e5, 0.0)).re - 16.0).abs() < 1e-6);
        assert!((tdw.value(c(-1e5, 0.0)).re - 16.0).abs() < 1e-6);
        assert_eq!(PotentialSpec::Free.eval_gradient(c(3.0, 1.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn rosen_morse_stable_far_out() {
        let rm = PotentialSpec::RosenMorse { v0: 1.0 };
        for x in [30.0, 400.0, 800.0, -800.0] {
            let v = rm.value(c(x, 0.3));
            assert!(v.re.is_finite() && v.im.is_finite());
            assert!(v.norm() < 1e-20);
        }
        let x: f64 = 3.0;
        assert!((rm.value(c(x, 0.0)).re - 1.0 / x.cosh().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn poles_are_detected() {
        let rm = PotentialSpec::RosenMorse { v0: 1.0 };
        let z = c(1e-9, FRAC_PI_2 + 3.0 * PI);
        assert!(matches!(rm.eval_potential(z), Err(Error::PoleProximity { .. })));
        assert!(rm.eval_potential(c(0.0, FRAC_PI_2 + 1e-6)).is_ok());
        let tdw = PotentialSpec::TruncatedDoubleWell { alpha: 1.5 };
        let p = Complex64::from_polar(1.5, 3.0 * FRAC_PI_4);
        assert!(tdw.eval_hessian(p).is_err());
        assert!(PotentialSpec::Free.eval_potential(c(0.0, FRAC_PI_2)).is_ok());
    }

    #[test]
    fn deformation_angle_rules() {
        let rm = PotentialSpec::RosenMorse { v0: 1.0 };
        assert!((rm.max_deformation_angle(-5.0, -5.0) - 0.304_395_797_364_615_1).abs() < 1e-12);
        assert!((rm.max_deformation_angle(-5.0, -5.0) - (PI / 10.0).atan()).abs() < 1e-15);
        assert_eq!(rm.max_deformation_angle(0.0, 0.0), FRAC_PI_4);
        assert!((rm.max_deformation_angle(-5.0, 20.0) - (PI / 40.0).atan()).abs() < 1e-15);
        assert_eq!(PotentialSpec::Free.max_deformation_angle(3.0, -40.0), FRAC_PI_4);
        assert_eq!(PotentialSpec::GaussianDoubleWell { depth: 1.0 }.max_deformation_angle(-9.0, 9.0), FRAC_PI_4);
        assert!((PotentialSpec::GaussianDoubleWell { depth: 1.0 }.working_angle(0.0, 4.0) - PI / 8.0).abs() < 1e-15);
        // Truncated double well, α = 1: poles at (±1 ± i)/√2.
        let tdw = PotentialSpec::TruncatedDoubleWell { alpha: 1.0 };
        let h = 0.5f64.sqrt();
        let expect = (h / (3.0 + h)).atan();
        assert!((tdw.max_deformation_angle(-3.0, 0.0) - expect).abs() < 1e-14);
        assert!((tdw.max_deformation_angle(3.0, 3.0) - expect).abs() < 1e-14);
    }

    #[test]
    fn rotated_lines_stay_clear_of_poles() {
        // The line through r at the admissible angle keeps each pole on its side.
        for spec in all_specs() {
            for r in [-20.0, -5.0, -0.7, 0.0, 0.4, 3.0, 45.0] {
                let theta = spec.line_angle(r);
                for p in spec.hull_vertices() {
                    let line_im = (p.re - r) * theta.tan();
                    if p.im > 0.0 {
                        assert!(p.im >= line_im - 1e-12);
                    } else {
                        assert!(p.im <= line_im + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_domination_contract() {
        for spec in all_specs() {
            if matches!(spec, PotentialSpec::Harmonic { .. }) {
                continue;
            }
            for x in [20.0, -20.0, 50.0, -50.0, 100.0, -100.0] {
                assert!(spec.eval_hessian(c(x, 0.0)).unwrap().norm() < 0.1, "{spec:?} at {x}");
            }
        }
        let tdw = PotentialSpec::TruncatedDoubleWell { alpha: 1.0 };
        assert!(tdw.hessian(c(20.0, 0.0)).norm() < 0.1);
    }

    #[test]
    fn flat_tails_are_flat() {
        for spec in all_specs() {
            for x in [-60.0, -30.0, -25.0, 25.0, 30.0, 60.0] {
                for y in [0.0, 0.5, -1.0] {
                    let z = c(x, y);
                    if let Some(v) = spec.flat_tail(z) {
                        assert!((spec.value(z) - v).norm() < 1e-17, "{spec:?} at {z}");
                    }
                }
            }
        }
        assert!(PotentialSpec::RosenMorse { v0: 1.0 }.flat_tail(c(25.0, 0.0)).is_some());
        assert!(PotentialSpec::RosenMorse { v0: 1.0 }.flat_tail(c(5.0, 0.0)).is_none());
    }

    fn finite_difference_ok(spec: PotentialSpec, z: Complex64) -> bool {
        let h = 1e-5;
        let fd_grad = (spec.value(z + h) - spec.value(z - h)) / (2.0 * h);
        let fd_hess = (spec.gradient(z + h) - spec.gradient(z - h)) / (2.0 * h);
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(1e-3);
        rel(fd_grad, spec.gradient(z)) < 1e-6 && rel(fd_hess, spec.hessian(z)) < 1e-6
    }

    #[test]
    fn gradient_example_point() {
        for spec in all_specs() {
            assert!(finite_difference_ok(spec, c(0.7, 0.1)), "{spec:?}");
        }
    }

    proptest! {
        #[test]
        fn real_axis_reality(x in -60.0f64..60.0) {
            for spec in all_specs() {
                prop_assert!(spec.value(c(x, 0.0)).im.abs() < 1e-14);
            }
        }

        #[test]
        fn schwarz_symmetry(re in -8.0f64..8.0, im in -1.2f64..1.2) {
            let z = c(re, im);
            for spec in all_specs() {
                let a = spec.value(z.conj());
                let b = spec.value(z).conj();
                prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
            }
        }

        #[test]
        fn derivatives_match_finite_differences(re in -6.0f64..6.0, im in -0.6f64..0.6) {
            let z = c(re, im);
            for spec in all_specs() {
                prop_assert!(finite_difference_ok(spec, z), "{:?} at {}", spec, z);
            }
        }
    }
}
