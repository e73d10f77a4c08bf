//! Independent ground truths for the stitched propagator and the classical
//! structure behind its interference patterns.

mod brute;
mod classical;
mod crank;
mod spectral;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{GridFunction, PhysicalParams, PropagatorStack};

pub use brute::{brute_force_gn, brute_force_gn_at_angle, BruteForceOutcome};
pub use classical::{
    caustics, classical_shoot, discretized_map_xi, multiplicity, CausticSet, Trajectory, MULTIPLICITY_STEP,
    MULTIPLICITY_V0_RANGE,
};
pub use crank::{crank_nicolson_evolve, CrankNicolsonOutcome};
pub use spectral::{exact_rm_grid, exact_rm_propagator, rm_eigenstate, Branch, RosenMorseSpectral};

/// sqrt(m/(2πiℏT)) e^{im(x1−x0)²/(2ℏT)}.
pub fn free_propagator(x1: f64, x0: f64, time: f64, params: &PhysicalParams) -> Result<Complex64> {
    if !(time > 0.0 && time.is_finite()) {
        return Err(Error::InvalidParameter { field: "physical.T", reason: "must be > 0".into() });
    }
    let (m, hbar) = (params.mass(), params.hbar());
    let modulus = (m / (2.0 * PI * hbar * time)).sqrt();
    Ok(Complex64::from_polar(modulus, -PI / 4.0 + m * (x1 - x0).powi(2) / (2.0 * hbar * time)))
}

/// ε = (1/(B−A)) ∫_A^B |exact − approx| dx, trapezoid over the lattice points in [A, B].
pub fn error_epsilon(approx: &GridFunction, exact: &GridFunction, a: f64, b: f64) -> Result<f64> {
    if approx.lattice() != exact.lattice() {
        return Err(Error::InvalidParameter { field: "exact", reason: "lattice differs from the stack".into() });
    }
    if b.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidParameter { field: "B", reason: "must exceed A".into() });
    }
    let lattice = approx.lattice();
    let dx = lattice.dx();
    let inside: Vec<f64> = (0..lattice.points())
        .filter(|&j| (a..=b).contains(&lattice.x(j)))
        .map(|j| (approx.values()[j] - exact.values()[j]).norm())
        .collect();
    if inside.len() < 2 {
        return Err(Error::InvalidParameter { field: "A", reason: "fewer than two lattice points in [A, B]".into() });
    }
    let ends = 0.5 * (inside[0] + inside[inside.len() - 1]);
    let interior: f64 = inside[1..inside.len() - 1].iter().sum();
    Ok((ends + interior) * dx / (b - a))
}

/// ε_N of the last slice of a stitched stack against the spectral propagator.
pub fn error_epsilon_rm(stack: &PropagatorStack, spectral: &RosenMorseSpectral, a: f64, b: f64) -> Result<f64> {
    let params = stack.params();
    let exact = exact_rm_grid(stack.lattice(), params.x0(), params.total_time(), spectral)?;
    error_epsilon(stack.last(), &exact, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SpatialLattice;

    fn params() -> PhysicalParams {
        PhysicalParams::new(1.0, 0.25, 10.0, 10, -5.0).unwrap()
    }

    #[test]
    fn free_propagator_reference() {
        let g = free_propagator(-5.0, -5.0, 10.0, &params()).unwrap();
        assert!((g.re - 0.1784124116152774).abs() < 1e-15);
        assert!((g.im + 0.1784124116152774).abs() < 1e-15);
        for x1 in [-40.0, 0.0, 13.0] {
            assert!((free_propagator(x1, -5.0, 10.0, &params()).unwrap().norm() - g.norm()).abs() < 1e-15);
        }
        assert!(free_propagator(0.0, 0.0, 0.0, &params()).is_err());
    }

    #[test]
    fn free_semigroup() {
        // ∫ G(x2,x1,T/2) G(x1,x0,T/2) dx1 along x1 = e^{iπ/4}·u, where both
        // factors are Gaussian, with a dense trapezoid.
        let p = params();
        let (x0, x2) = (-5.0, 3.0);
        let rot = Complex64::from_polar(1.0, PI / 4.0);
        let (m, hbar, t) = (p.mass(), p.hbar(), 5.0);
        let g = |xa: Complex64, xb: Complex64| {
            (m / (2.0 * PI * hbar * t)).sqrt()
                * Complex64::from_polar(1.0, -PI / 4.0)
                * (Complex64::i() * m * (xa - xb) * (xa - xb) / (2.0 * hbar * t)).exp()
        };
        let centre = Complex64::new(0.5 * (x0 + x2), 0.0);
        let h = 1e-3;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in -20000..=20000 {
            let x1 = centre + rot * (i as f64 * h);
            sum += g(Complex64::new(x2, 0.0), x1) * g(x1, Complex64::new(x0, 0.0)) * rot * h;
        }
        let exact = free_propagator(x2, x0, 10.0, &p).unwrap();
        assert!((sum - exact).norm() < 1e-8, "{sum} {exact}");
    }

    #[test]
    fn epsilon_identity_and_constant_offset() {
        let l = SpatialLattice::new(-50.0, 50.0, 1000).unwrap();
        let f = GridFunction::from_fn(l, |x| Complex64::new(x.sin(), x.cos()));
        assert_eq!(error_epsilon(&f, &f, -50.0, 50.0).unwrap(), 0.0);
        let g = GridFunction::from_fn(l, |x| Complex64::new(x.sin() + 0.25, x.cos()));
        let e = error_epsilon(&g, &f, -10.0, 10.0).unwrap();
        assert!((e - 0.25).abs() < 1e-12, "{e}");
        assert!(error_epsilon(&g, &f, 1.0, 1.0).is_err());
    }
}
