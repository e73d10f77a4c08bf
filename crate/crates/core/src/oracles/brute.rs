//! The lattice propagator G_N for N ≤ 4 as a direct (N−1)-dimensional
//! integral over q_1 … q_{N−1}, all rotated by one global angle about the
//! straight path q*_j = x0 + j(x1 − x0)/N.
//!
//! On q = q* + e^{iθ}y the kinetic term becomes iκe^{2iθ} yᵀKy with K the
//! (2, −1) tridiagonal matrix; in its eigenbasis each direction is a 1-D
//! rotated Gaussian handled by Gauss-Hermite.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{normalization_c, PhysicalParams};
use crate::potentials::PotentialSpec;
use crate::special::GaussHermite;

const MIN_NODES: usize = 200;
/// Truncation target of the Gaussian under the rule, as in the J_n engine.
const RULE_TOLERANCE: f64 = 1e-13;
const REFINE_TOLERANCE: f64 = 1e-10;
/// Change under doubling that ends the angle search.
const SETTLED: f64 = 1e-9;
/// Largest accepted change under doubling. The convergence is geometric in
/// the node count, so the finer rule's own error is about its square.
const ACCEPTABLE_CHANGE: f64 = 1e-5;
const MAX_ANGLE_HALVINGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceOutcome {
    pub value: Complex64,
    pub theta: f64,
    /// Nodes per dimension of the accepted rule.
    pub nodes: usize,
    /// Σ|terms|/|Σ terms| of the accepted rule.
    pub cancellation: f64,
    /// Last change under node doubling.
    pub change: f64,
}

/// Normal modes of the discrete kinetic term.
struct Modes {
    dims: usize,
    /// basis[j][i]: component j of mode i.
    basis: Vec<Vec<f64>>,
    /// 1/sqrt(κ μ_i).
    scale: Vec<f64>,
}

impl Modes {
    fn new(slices: usize, kappa: f64) -> Self {
        let dims = slices - 1;
        let n = slices as f64;
        let basis = (1..=dims)
            .map(|j| (1..=dims).map(|i| (2.0 / n).sqrt() * (PI * (i * j) as f64 / n).sin()).collect())
            .collect();
        let scale = (1..=dims).map(|i| 1.0 / (kappa * (2.0 - 2.0 * (PI * i as f64 / n).cos())).sqrt()).collect();
        Self { dims, basis, scale }
    }
}

fn check_slices(params: &PhysicalParams) -> Result<()> {
    if !(2..=4).contains(&params.slices()) {
        return Err(Error::InvalidParameter { field: "physical.N", reason: "brute force needs N in {2, 3, 4}".into() });
    }
    Ok(())
}

fn max_nodes(dims: usize) -> usize {
    match dims {
        1 => 4096,
        2 => 1024,
        _ => 256,
    }
}

fn nodes_for(theta: f64, dims: usize) -> usize {
    let rate = -(PI / 4.0 - theta).tan().ln();
    let needed = (-RULE_TOLERANCE.ln() / rate.max(1e-6)).ceil() as usize;
    (needed.max(MIN_NODES).div_ceil(32) * 32).min(max_nodes(dims))
}

/// (Σ terms, Σ|terms|) of the rule with `nodes` nodes per dimension.
fn rule_sum(
    x1: f64,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    modes: &Modes,
    theta: f64,
    nodes: usize,
) -> Result<(Complex64, f64)> {
    let rule = GaussHermite::cached(nodes);
    let z = Complex64::from_polar(1.0, 2.0 * theta - FRAC_PI_2);
    let kept: Vec<(f64, Complex64)> = rule
        .nodes
        .iter()
        .zip(&rule.log_scaled_weights)
        .filter_map(|(&u, &lw)| {
            let log_mag = lw - z.re * u * u;
            (log_mag >= -50.0).then(|| (u, Complex64::new(log_mag, -z.im * u * u)))
        })
        .collect();
    let x0 = params.x0();
    let slices = params.slices() as f64;
    let straight: Vec<f64> = (1..=modes.dims).map(|j| x0 + j as f64 * (x1 - x0) / slices).collect();
    let dir = Complex64::from_polar(1.0, theta);
    let ratio = params.lattice_spacing() / params.hbar();
    let k = kept.len();
    let total = k.pow(modes.dims as u32);
    let (sum, abs_sum) = (0..total)
        .into_par_iter()
        .map(|mut index| {
            let mut log_weight = Complex64::new(0.0, 0.0);
            let mut u = [0.0f64; 3];
            for slot in u.iter_mut().take(modes.dims) {
                let (node, lw) = kept[index % k];
                index /= k;
                *slot = node;
                log_weight += lw;
            }
            let mut potential = Complex64::new(0.0, 0.0);
            for (j, row) in modes.basis.iter().enumerate() {
                let y: f64 = row.iter().zip(&modes.scale).zip(&u).map(|((p, s), u)| p * s * u).sum();
                potential += spec.value(straight[j] + dir * y);
            }
            let term = (log_weight - Complex64::i() * ratio * potential).exp();
            (term, term.norm())
        })
        .reduce(|| (Complex64::new(0.0, 0.0), 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    if !sum.is_finite() {
        return Err(Error::ContourViolation { center: x1, theta });
    }
    Ok((sum, abs_sum))
}

/// G_N(x1) at a fixed global angle, doubling the rule until it settles.
pub fn brute_force_gn_at_angle(
    x1: f64,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    theta: f64,
) -> Result<BruteForceOutcome> {
    check_slices(params)?;
    if !(theta > 0.0 && theta < PI / 4.0 + 1e-12) {
        return Err(Error::InvalidParameter { field: "theta", reason: "must lie in (0, pi/4]".into() });
    }
    let x0 = params.x0();
    let kappa = params.kinetic_coefficient();
    let modes = Modes::new(params.slices(), kappa);
    let ratio = params.lattice_spacing() / params.hbar();
    let slices = params.slices() as f64;
    let ends = spec.value(Complex64::new(x0, 0.0)) + spec.value(Complex64::new(x1, 0.0));
    let jacobian: f64 = modes.scale.iter().product();
    let prefactor = normalization_c(params).powi(params.slices() as i32)
        * (Complex64::i() * (kappa * (x1 - x0).powi(2) / slices - 0.5 * ratio * ends)).exp()
        * Complex64::from_polar(jacobian, modes.dims as f64 * theta);

    let cap = max_nodes(modes.dims);
    let mut nodes = nodes_for(theta, modes.dims);
    let (mut coarse, _) = rule_sum(x1, params, spec, &modes, theta, nodes / 2)?;
    loop {
        let (fine, abs_sum) = rule_sum(x1, params, spec, &modes, theta, nodes)?;
        let change = ((fine - coarse) * prefactor).norm();
        if change <= REFINE_TOLERANCE || 2 * nodes > cap {
            return Ok(BruteForceOutcome {
                value: fine * prefactor,
                theta,
                nodes,
                cancellation: abs_sum / fine.norm().max(f64::MIN_POSITIVE),
                change,
            });
        }
        coarse = fine;
        nodes *= 2;
    }
}

/// G_N(x1) for N ∈ {2, 3, 4}. The global angle starts at half the smallest
/// admissible line angle along the straight path and is halved while the
/// rule has not settled: near θ_max the integrand grows on the contour, at
/// small θ the Gaussian is too wide for the capped rule. The angle whose rule
/// changed least under doubling is kept.
pub fn brute_force_gn(x1: f64, params: &PhysicalParams, spec: &PotentialSpec) -> Result<BruteForceOutcome> {
    check_slices(params)?;
    spec.validate()?;
    let x0 = params.x0();
    let slices = params.slices();
    let mut theta =
        0.5 * (1..slices).map(|j| spec.line_angle(x0 + j as f64 * (x1 - x0) / slices as f64)).fold(PI / 4.0, f64::min);
    let mut best: Option<BruteForceOutcome> = None;
    for _ in 0..=MAX_ANGLE_HALVINGS {
        let outcome = match brute_force_gn_at_angle(x1, params, spec, theta) {
            // the integrand overflowed on the contour; entire potentials grow off the axis too
            Err(Error::ContourViolation { .. }) => {
                theta *= 0.5;
                continue;
            }
            other => other?,
        };
        if best.is_none_or(|b| outcome.change < b.change) {
            best = Some(outcome);
        }
        if outcome.change <= SETTLED {
            break;
        }
        theta *= 0.5;
    }
    let best = best.ok_or(Error::ContourViolation { center: x1, theta })?;
    if best.change > ACCEPTABLE_CHANGE {
        return Err(Error::QuadratureNonConvergence { change: best.change });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::free_propagator;

    fn params(n: usize) -> PhysicalParams {
        PhysicalParams::new(1.0, 0.25, 10.0, n, -5.0).unwrap()
    }

    #[test]
    fn free_matches_closed_form() {
        for n in 2..=4 {
            let p = params(n);
            for x1 in [-7.0, 0.0, 4.5] {
                let g = brute_force_gn(x1, &p, &PotentialSpec::Free).unwrap().value;
                let exact = free_propagator(x1, -5.0, 10.0, &p).unwrap();
                assert!((g - exact).norm() < 1e-8, "N={n} x1={x1}: {g} {exact}");
            }
        }
    }

    #[test]
    fn harmonic_matches_discrete_mehler() {
        // For V = ½mω²x² the lattice action is quadratic. The exact G_N
        // follows from the Gaussian integral over the (N−1)×(N−1) matrix.
        let omega = 0.1;
        let spec = PotentialSpec::Harmonic { omega };
        let p = params(3);
        let a = p.lattice_spacing();
        let kappa = p.kinetic_coefficient();
        let r = a / p.hbar();
        let v = |x: f64| 0.5 * omega * omega * x * x;
        let x1 = 2.0;
        let x0 = -5.0;
        // exponent i[κ((q1−x0)² + (q2−q1)² + (x1−q2)²) − r(v0/2 + q1²w + q2²w + v1/2)]
        let w = 0.5 * omega * omega;
        let diag = Complex64::i() * (2.0 * kappa - r * w);
        let off = Complex64::i() * (-kappa);
        let lin = Complex64::i() * Complex64::new(-2.0 * kappa * x0, 0.0);
        let lin2 = Complex64::i() * Complex64::new(-2.0 * kappa * x1, 0.0);
        // ∫exp(qᵀAq + bᵀq) = π/sqrt(det(−A)) · exp(−¼ bᵀA⁻¹b)
        let det = diag * diag - off * off;
        let inv = [[diag / det, -off / det], [-off / det, diag / det]];
        let b = [lin, lin2];
        let quad = b[0] * (inv[0][0] * b[0] + inv[0][1] * b[1]) + b[1] * (inv[1][0] * b[0] + inv[1][1] * b[1]);
        let constant = Complex64::i() * (kappa * (x0 * x0 + x1 * x1) - 0.5 * r * (v(x0) + v(x1)));
        let c = normalization_c(&p);
        // −A = −iM with M positive definite, so sqrt(det(−A)) = −i·sqrt(det M)
        let det_m = (2.0 * kappa - r * w).powi(2) - kappa * kappa;
        let root = Complex64::from_polar(det_m.sqrt(), -FRAC_PI_2);
        let exact = c.powi(3) * PI / root * (constant - 0.25 * quad).exp();
        let g = brute_force_gn(x1, &p, &spec).unwrap().value;
        assert!((g - exact).norm() < 1e-8, "{g} {exact}");
    }

    #[test]
    fn global_angle_invariance() {
        let p = params(3);
        let spec = PotentialSpec::RosenMorse { v0: 1.0 };
        for x1 in [-7.0, 0.0, 3.0] {
            let first = brute_force_gn(x1, &p, &spec).unwrap();
            let second = brute_force_gn_at_angle(x1, &p, &spec, 0.5 * first.theta).unwrap();
            assert!((first.value - second.value).norm() < 1e-7, "x1={x1}: {first:?} {second:?}");
        }
    }

    #[test]
    fn rejects_large_n() {
        assert!(brute_force_gn(0.0, &params(5), &PotentialSpec::Free).is_err());
        assert!(brute_force_gn_at_angle(0.0, &params(3), &PotentialSpec::Free, 0.0).is_err());
    }
}
