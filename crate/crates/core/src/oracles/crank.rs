//! Crank-Nicolson evolution of the Schrödinger equation on a lattice with
//! zero Dirichlet values just outside the window.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{GridFunction, PhysicalParams};
use crate::potentials::PotentialSpec;

#[derive(Debug, Clone)]
pub struct CrankNicolsonOutcome {
    pub psi: GridFunction,
    /// |‖ψ(T)‖/‖ψ(0)‖ − 1|.
    pub norm_drift: f64,
}

/// Evolves ψ0 over the total time of `params` in `steps` implicit-midpoint
/// steps. Only m, ℏ and T are taken from `params`; the spatial step is the
/// lattice spacing of ψ0.
pub fn crank_nicolson_evolve(
    psi0: &GridFunction,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    steps: usize,
) -> Result<CrankNicolsonOutcome> {
    spec.validate()?;
    if steps == 0 {
        return Err(Error::InvalidParameter { field: "steps", reason: "must be >= 1".into() });
    }
    let lattice = *psi0.lattice();
    let len = lattice.points();
    let dx = lattice.dx();
    let (m, hbar) = (params.mass(), params.hbar());
    let dt = params.total_time() / steps as f64;
    // H = −(ℏ²/2m)D² + V; A = 1 + (iΔt/2ℏ)H, B = 1 − (iΔt/2ℏ)H
    let hop = -hbar * hbar / (2.0 * m * dx * dx);
    let factor = Complex64::new(0.0, dt / (2.0 * hbar));
    let diag_h: Vec<f64> =
        lattice.positions().iter().map(|&x| -2.0 * hop + spec.value(Complex64::new(x, 0.0)).re).collect();
    let off_a = factor * hop;
    let diag_a: Vec<Complex64> = diag_h.iter().map(|&d| 1.0 + factor * d).collect();

    // Thomas elimination of A, which is the same at every step.
    let mut upper = vec![Complex64::new(0.0, 0.0); len];
    let mut pivot = vec![Complex64::new(0.0, 0.0); len];
    pivot[0] = diag_a[0];
    upper[0] = off_a / pivot[0];
    for j in 1..len {
        pivot[j] = diag_a[j] - off_a * upper[j - 1];
        upper[j] = off_a / pivot[j];
    }

    let mut psi = psi0.values().to_vec();
    let mut rhs = vec![Complex64::new(0.0, 0.0); len];
    for _ in 0..steps {
        for j in 0..len {
            let left = if j > 0 { psi[j - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if j + 1 < len { psi[j + 1] } else { Complex64::new(0.0, 0.0) };
            rhs[j] = psi[j] - factor * (diag_h[j] * psi[j] + hop * (left + right));
        }
        psi[0] = rhs[0] / pivot[0];
        for j in 1..len {
            psi[j] = (rhs[j] - off_a * psi[j - 1]) / pivot[j];
        }
        for j in (0..len - 1).rev() {
            let next = psi[j + 1];
            psi[j] -= upper[j] * next;
        }
    }
    let psi = GridFunction::new(lattice, psi)?;
    let norm_drift = (psi.l2_norm() / psi0.l2_norm() - 1.0).abs();
    Ok(CrankNicolsonOutcome { psi, norm_drift })
}
