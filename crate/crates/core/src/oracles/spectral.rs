//! Exact Rosen-Morse propagator from the scattering eigenstates
//! φ_k^±(x) ∝ P_{ν_L}^{ik}(±tanh x), integrated over k along a contour that
//! leaves the real axis into the lower half-plane.
//!
//! With ζ(x) = 1/(1 + e^{2x}) one has P_{ν_L}^{ik}(tanh x) =
//! e^{ikx} ₂F₁(−ν_L, ν_L+1; 1−ik; ζ)/Γ(1−ik), and the products entering the
//! propagator combine into (T(k)/2π)·E(k,x1;+)·E(k,x0;−) with
//! E(k,x;s) = e^{iskx} ₂F₁(−ν_L, ν_L+1; 1−isk; ζ(x)), which is analytic in k.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GridFunction, SpatialLattice};
use crate::special::{gauss_legendre, ln_gamma, Hyp2F1};

/// Angle of the ray beyond the real segment.
const RAY_ANGLE: f64 = 0.1;
/// Gauss-Legendre nodes per panel.
const PANEL_NODES: usize = 20;
/// Panel width times the largest phase rate of the integrand.
const PANEL_PHASE: f64 = 12.0;
/// Decay exponent α R² sin 2φ reached at the end of the ray.
const RAY_DECAY: f64 = 40.0;
const TAIL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Incoming from the left, pure transmitted wave e^{ikx} on the right.
    Plus,
    /// The mirror image x ↦ −x.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosenMorseSpectral {
    pub v0: f64,
    pub mass: f64,
    pub hbar: f64,
    /// ν = sqrt(8mV0 − ℏ²)/(2ℏ); imaginary below the threshold V0 = ℏ²/(8m).
    pub nu: Complex64,
    /// ν_L = −1/2 + iν.
    pub legendre_degree: Complex64,
}

impl RosenMorseSpectral {
    pub fn new(v0: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(Error::InvalidParameter { field: "potential.V0", reason: "must be > 0".into() });
        }
        if !(mass > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidParameter { field: "physical", reason: "m and hbar must be > 0".into() });
        }
        let nu = Complex64::new(8.0 * mass * v0 - hbar * hbar, 0.0).sqrt() / (2.0 * hbar);
        let legendre_degree = Complex64::new(-0.5, 0.0) + Complex64::i() * nu;
        Ok(Self { v0, mass, hbar, nu, legendre_degree })
    }

    /// Whether V0 exceeds ℏ²/(8m), so that ν is real.
    pub fn above_threshold(&self) -> bool {
        8.0 * self.mass * self.v0 > self.hbar * self.hbar
    }

    fn hypergeometric(&self, k: Complex64, sign: f64) -> Hyp2F1 {
        let a = -self.legendre_degree;
        let b = self.legendre_degree + 1.0;
        Hyp2F1::new(a, b, Complex64::new(1.0, 0.0) - Complex64::i() * sign * k)
    }

    /// T(k)/(2π) = (1/2π)·sinh²πk/(sinh²πk + cosh²πν).
    fn transmission_over_2pi(&self, k: Complex64) -> Complex64 {
        let s = (PI * k).sinh();
        let c = (PI * self.nu).cosh();
        1.0 / (2.0 * PI * (1.0 + c * c / (s * s)))
    }
}

/// ζ = 1/(1 + e^{2x}) and ln(1 − ζ), both without cancellation.
fn zeta(x: f64) -> (f64, f64) {
    if x >= 0.0 {
        let e = (-2.0 * x).exp();
        (e / (1.0 + e), -e.ln_1p())
    } else {
        let e = (2.0 * x).exp();
        (1.0 / (1.0 + e), 2.0 * x - e.ln_1p())
    }
}

/// E(k, x; s) = e^{iskx} ₂F₁(a, b; 1 − isk; ζ(x)) with the prepared ₂F₁.
fn plane_factor(hyp: &Hyp2F1, k: Complex64, sign: f64, x: f64) -> Result<Complex64> {
    let (z, ln1mz) = zeta(x);
    Ok((Complex64::i() * sign * k * x).exp() * hyp.eval(z, ln1mz)?)
}

/// φ_k^±(x) for real k > 0, normalized to δ(k − k′).
pub fn rm_eigenstate(k: f64, x: f64, branch: Branch, spectral: &RosenMorseSpectral) -> Result<Complex64> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::InvalidParameter { field: "k", reason: "must be > 0".into() });
    }
    let x = match branch {
        Branch::Plus => x,
        Branch::Minus => -x,
    };
    let kc = Complex64::new(k, 0.0);
    // k sinh πk/(cosh 2πk + cosh 2πν) = k sinh πk/(2(sinh²πk + cosh²πν))
    let s = (PI * k).sinh();
    let c = (PI * spectral.nu).cosh();
    let norm = (k * s / (2.0 * (s * s + (c * c).re))).sqrt();
    let hyp = spectral.hypergeometric(kc, 1.0);
    let gamma_inv = (-ln_gamma(Complex64::new(1.0, -k))).exp();
    Ok(norm * gamma_inv * plane_factor(&hyp, kc, 1.0, x)?)
}

/// One node of the k contour with everything that does not depend on x.
struct KNode {
    k: Complex64,
    /// dk-weight × T(k)/2π × e^{−iαk²}
    coefficient: Complex64,
    plus: Hyp2F1,
    minus: Hyp2F1,
}

/// The k contour [0, K0] ∪ {K0 + re^{−iφ}: 0 ≤ r ≤ R} for |x1|, |x0| up to
/// `reach` at time T.
struct KContour {
    nodes: Vec<KNode>,
    /// Ray end, where the tail estimate is taken.
    end: Complex64,
    ray_length: f64,
    alpha: f64,
}

impl KContour {
    fn new(spectral: &RosenMorseSpectral, reach: f64, time: f64, ray_scale: f64) -> Self {
        let alpha = spectral.hbar * time / (2.0 * spectral.mass);
        let k_barrier = 5.0 * (2.0 * spectral.mass * spectral.v0).sqrt() / spectral.hbar;
        let k_fresnel = 1.25 * reach / (2.0 * alpha) + 2.0;
        let k0 = k_barrier.max(k_fresnel);
        let ray_length = ray_scale * (RAY_DECAY / (alpha * (2.0 * RAY_ANGLE).sin())).sqrt();
        let (gl_x, gl_w) = gauss_legendre(PANEL_NODES);
        let mut points: Vec<(Complex64, Complex64)> = Vec::new();
        let mut add_segment = |start: Complex64, dir: Complex64, length: f64, rate: f64| {
            let panels = ((length * rate / PANEL_PHASE).ceil() as usize).max(1);
            let h = length / panels as f64;
            for p in 0..panels {
                let mid = (p as f64 + 0.5) * h;
                for (&x, &w) in gl_x.iter().zip(&gl_w) {
                    points.push((start + dir * (mid + 0.5 * h * x), dir * (0.5 * h * w)));
                }
            }
        };
        let real_rate = reach + 2.0 * alpha * k0 + 1.0;
        add_segment(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), k0, real_rate);
        let ray_rate = reach + 2.0 * alpha * (k0 + ray_length) + 1.0;
        let dir = Complex64::from_polar(1.0, -RAY_ANGLE);
        add_segment(Complex64::new(k0, 0.0), dir, ray_length, ray_rate);
        let nodes = points
            .into_par_iter()
            .map(|(k, w)| KNode {
                k,
                coefficient: w * spectral.transmission_over_2pi(k) * (Complex64::new(0.0, -alpha) * k * k).exp(),
                plus: spectral.hypergeometric(k, 1.0),
                minus: spectral.hypergeometric(k, -1.0),
            })
            .collect();
        Self { nodes, end: Complex64::new(k0, 0.0) + dir * ray_length, ray_length, alpha }
    }

    /// Bound on the integral beyond the ray end for the pair (x1, x0).
    fn tail(&self, spectral: &RosenMorseSpectral, x1: f64, x0: f64) -> Result<f64> {
        let k = self.end;
        let plus = spectral.hypergeometric(k, 1.0);
        let minus = spectral.hypergeometric(k, -1.0);
        let f = spectral.transmission_over_2pi(k)
            * (Complex64::new(0.0, -self.alpha) * k * k).exp()
            * (plane_factor(&plus, k, 1.0, x1)? * plane_factor(&minus, k, -1.0, x0)?
                + plane_factor(&plus, k, 1.0, -x1)? * plane_factor(&minus, k, -1.0, -x0)?);
        // ∫_R^∞ e^{−c r²} dr ≤ e^{−cR²}/(2cR), c = α sin 2φ
        Ok(f.norm() / (2.0 * self.alpha * (2.0 * RAY_ANGLE).sin() * self.ray_length))
    }

    /// Ray lengths are grown until the tail estimate passes.
    fn admissible(spectral: &RosenMorseSpectral, reach: f64, time: f64, extremes: &[(f64, f64)]) -> Result<Self> {
        let mut worst = 0.0;
        for scale in [1.0, 1.5, 2.25] {
            let contour = Self::new(spectral, reach, time, scale);
            worst = 0.0f64;
            for &(x1, x0) in extremes {
                worst = worst.max(contour.tail(spectral, x1, x0)?);
            }
            if worst <= TAIL_TOLERANCE {
                return Ok(contour);
            }
        }
        Err(Error::TailBoundViolation { bound: worst, tolerance: TAIL_TOLERANCE })
    }
}

/// Factors of x0 shared by every x1.
struct SourceFactors {
    direct: Vec<Complex64>,
    mirrored: Vec<Complex64>,
}

impl SourceFactors {
    fn new(contour: &KContour, x0: f64) -> Result<Self> {
        let direct = contour
            .nodes
            .par_iter()
            .map(|n| Ok(n.coefficient * plane_factor(&n.minus, n.k, -1.0, x0)?))
            .collect::<Result<Vec<_>>>()?;
        let mirrored = contour
            .nodes
            .par_iter()
            .map(|n| Ok(n.coefficient * plane_factor(&n.minus, n.k, -1.0, -x0)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { direct, mirrored })
    }

    fn propagate(&self, contour: &KContour, x1: f64) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for ((n, d), m) in contour.nodes.iter().zip(&self.direct).zip(&self.mirrored) {
            sum += d * plane_factor(&n.plus, n.k, 1.0, x1)? + m * plane_factor(&n.plus, n.k, 1.0, -x1)?;
        }
        Ok(sum)
    }
}

fn check_time(time: f64) -> Result<()> {
    if !(time > 0.0 && time.is_finite()) {
        return Err(Error::InvalidParameter { field: "physical.T", reason: "must be > 0".into() });
    }
    Ok(())
}

/// G(x1, x0, T) = ∫_0^∞ Σ_± φ_k^±(x1) φ_k^±(x0)* e^{−iℏk²T/(2m)} dk.
pub fn exact_rm_propagator(x1: f64, x0: f64, time: f64, spectral: &RosenMorseSpectral) -> Result<Complex64> {
    check_time(time)?;
    let reach = x1.abs() + x0.abs();
    let contour = KContour::admissible(spectral, reach, time, &[(x1, x0)])?;
    SourceFactors::new(&contour, x0)?.propagate(&contour, x1)
}

/// G(·, x0, T) on every lattice point, sharing one contour.
pub fn exact_rm_grid(
    lattice: &SpatialLattice,
    x0: f64,
    time: f64,
    spectral: &RosenMorseSpectral,
) -> Result<GridFunction> {
    check_time(time)?;
    let far = lattice.x_min().abs().max(lattice.x_max().abs());
    let reach = far + x0.abs();
    let extremes = [(lattice.x_min(), x0), (lattice.x(lattice.points() - 1), x0)];
    let contour = KContour::admissible(spectral, reach, time, &extremes)?;
    let source = SourceFactors::new(&contour, x0)?;
    let values =
        lattice.positions().into_par_iter().map(|x1| source.propagate(&contour, x1)).collect::<Result<Vec<_>>>()?;
    GridFunction::new(*lattice, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> RosenMorseSpectral {
        RosenMorseSpectral::new(1.0, 1.0, 0.25).unwrap()
    }

    fn free(x1: f64, x0: f64, t: f64, m: f64, hbar: f64) -> Complex64 {
        let modulus = (m / (2.0 * PI * hbar * t)).sqrt();
        Complex64::from_polar(modulus, -PI / 4.0 + m * (x1 - x0).powi(2) / (2.0 * hbar * t))
    }

    #[test]
    fn degree_and_threshold() {
        let s = reference();
        assert!(s.above_threshold());
        assert!((s.nu.re - (8.0f64 - 0.0625).sqrt() / 0.5).abs() < 1e-14);
        assert!(s.legendre_degree.im > 0.0);
        // ν_L(ν_L + 1) = −2mV0/ℏ²
        let d = s.legendre_degree;
        assert!((d * (d + 1.0) + 32.0).norm() < 1e-12);
        let weak = RosenMorseSpectral::new(1e-6, 1.0, 0.25).unwrap();
        assert!(!weak.above_threshold());
        assert!(RosenMorseSpectral::new(0.0, 1.0, 0.25).is_err());
    }

    #[test]
    fn eigenstate_solves_schrodinger_equation() {
        let s = reference();
        let h = 1e-3;
        for &k in &[0.7, 3.0, 6.5] {
            for &x in &[-4.0, -1.0, 0.3, 2.0, 5.0] {
                for branch in [Branch::Plus, Branch::Minus] {
                    let f = |x: f64| rm_eigenstate(k, x, branch, &s).unwrap();
                    let second = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
                    let v = 32.0 / x.cosh().powi(2);
                    let res = second + (k * k - v) * f(x);
                    assert!(res.norm() < 1e-5 * (1.0 + k * k), "k={k} x={x}: {res}");
                }
            }
        }
    }

    #[test]
    fn eigenstate_transmitted_amplitude_is_flat() {
        let s = reference();
        for &k in &[1.0, 5.0, 8.0] {
            let sh = (PI * k).sinh();
            let ch = (PI * s.nu.re).cosh();
            let expect = (sh * sh / (sh * sh + ch * ch) / (2.0 * PI)).sqrt();
            for &x in &[15.0, 20.0, 30.0] {
                let v = rm_eigenstate(k, x, Branch::Plus, &s).unwrap();
                assert!((v.norm() - expect).abs() < 1e-8 * expect.max(1e-3), "k={k} x={x}");
            }
            for &x in &[-30.0, -15.0, -3.0, 0.0] {
                let v = rm_eigenstate(k, x, Branch::Plus, &s).unwrap();
                assert!(v.norm() <= 2.0 / (2.0 * PI).sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn eigenstates_concentrate_on_the_diagonal() {
        let s = reference();
        let overlap = |k: f64, kp: f64| {
            let n = 24000;
            let h = 120.0 / n as f64;
            (0..=n)
                .map(|i| {
                    let x = -60.0 + i as f64 * h;
                    let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                    w * h
                        * rm_eigenstate(k, x, Branch::Plus, &s).unwrap()
                        * rm_eigenstate(kp, x, Branch::Plus, &s).unwrap().conj()
                })
                .sum::<Complex64>()
        };
        let diag = overlap(6.0, 6.0).norm();
        let off = overlap(6.0, 6.5).norm();
        assert!(diag > 10.0 * off, "{diag} vs {off}");
    }

    #[test]
    fn propagator_is_symmetric() {
        let s = reference();
        for &(a, b) in &[(-3.0, -5.0), (2.0, -5.0), (7.5, 1.0)] {
            let g1 = exact_rm_propagator(a, b, 10.0, &s).unwrap();
            let g2 = exact_rm_propagator(b, a, 10.0, &s).unwrap();
            assert!((g1 - g2).norm() < 1e-8, "{g1} {g2}");
        }
    }

    #[test]
    fn weak_barrier_is_nearly_free() {
        let s = RosenMorseSpectral::new(1e-6, 1.0, 0.25).unwrap();
        let g = exact_rm_propagator(0.0, -5.0, 10.0, &s).unwrap();
        assert!((g - free(0.0, -5.0, 10.0, 1.0, 0.25)).norm() < 1e-4, "{g}");
    }

    #[test]
    fn grid_matches_pointwise() {
        let s = reference();
        let l = SpatialLattice::new(-10.0, 10.0, 40).unwrap();
        let g = exact_rm_grid(&l, -5.0, 10.0, &s).unwrap();
        for j in [0, 13, 27, 39] {
            let p = exact_rm_propagator(l.x(j), -5.0, 10.0, &s).unwrap();
            assert!((g.values()[j] - p).norm() < 1e-8);
        }
    }
}
