//! The per-slice integrals J_n and their asymptotics J̄_n.
//!
//! J_n(q_n) = c (n−1)^{−1/2} ∫ exp[iκ(q_n − q)² + iκ(q − x0)²/(n−1)
//! − (ia/ℏ) Σ_{k=1}^{n−1} V(x0 + k(q − x0)/(n−1))] dq with κ = m/(2aℏ),
//! evaluated either on the rotated line q = q_s + e^{iθ}λ through the kinetic
//! saddle, or by stationary phase at the real saddle of the full exponent.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{normalization_c, GridFunction, PhysicalParams, SpatialLattice};
use crate::potentials::PotentialSpec;
use crate::special::GaussHermite;

/// ln 1e3: the cancellation the adaptive angle tolerates.
const MAX_LOG_GROWTH: f64 = 6.907_755_278_982_137;
const MAX_ANGLE_HALVINGS: usize = 8;
const GROWTH_SAMPLES: usize = 96;

/// How the rotation angle of the contour is picked at each lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum AngleStrategy {
    /// θ_max/2, halved while the integrand on the line rises more than a
    /// factor 1e3 above its saddle value (strong potentials at coarse slicing).
    Adaptive,
    /// θ = θ_max/2.
    HalfMax,
    /// θ = f·θ_max with 0 < f < 1.
    FractionOfMax(f64),
    /// A fixed θ, clamped below θ_max.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Minimum number of Gauss-Hermite nodes.
    pub node_count: usize,
    pub angle_strategy: AngleStrategy,
    /// Scale λ by |A|^{−1/2}, A the complex Gaussian coefficient, and raise
    /// the node count as θ shrinks. Without it λ is used unscaled with
    /// exactly `node_count` nodes.
    pub rescale: bool,
    /// Target truncation error of the kinetic Gaussian under the rule.
    pub tolerance: f64,
    /// With rescaling on, the node count doubles until the value moves by
    /// less than this against the rule of half the size.
    pub refine_tolerance: f64,
    pub max_nodes: usize,
    /// Recompute with doubled nodes and fail if values move by more than 1e−6.
    pub diagnostic: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            node_count: 100,
            angle_strategy: AngleStrategy::Adaptive,
            rescale: true,
            tolerance: 1e-13,
            refine_tolerance: 1e-8,
            max_nodes: 4096,
            diagnostic: false,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::InvalidParameter { field: "method.node_count", reason: "must be >= 8".into() });
        }
        match self.angle_strategy {
            AngleStrategy::Fixed(t) if !(t > 0.0 && t <= FRAC_PI_4) => Err(Error::InvalidParameter {
                field: "method.angle",
                reason: "fixed angle must lie in (0, pi/4]".into(),
            }),
            AngleStrategy::FractionOfMax(f) if !(f > 0.0 && f < 1.0) => Err(Error::InvalidParameter {
                field: "method.angle",
                reason: "fraction of the maximal angle must lie in (0, 1)".into(),
            }),
            _ if !(self.tolerance > 0.0 && self.refine_tolerance > 0.0) => {
                Err(Error::InvalidParameter { field: "method.tolerance", reason: "must be > 0".into() })
            }
            _ if self.max_nodes < self.node_count => Err(Error::InvalidParameter {
                field: "method.max_nodes",
                reason: "must be >= method.node_count".into(),
            }),
            _ => Ok(()),
        }
    }

    fn angle(&self, theta_max: f64) -> f64 {
        match self.angle_strategy {
            AngleStrategy::Adaptive | AngleStrategy::HalfMax => 0.5 * theta_max,
            AngleStrategy::FractionOfMax(f) => f * theta_max,
            AngleStrategy::Fixed(t) => t.min(0.999 * theta_max),
        }
    }

    /// Nodes needed so that tan(π/4 − θ)^n, the decay rate of the rule on
    /// the rotated Gaussian, falls below the tolerance. Rounded up to a
    /// multiple of 32 to bound the number of distinct cached rules.
    pub(crate) fn nodes_for(&self, theta: f64) -> usize {
        if !self.rescale {
            return self.node_count;
        }
        let rate = -(FRAC_PI_4 - theta).tan().ln();
        let needed = (-self.tolerance.ln() / rate.max(1e-6)).ceil() as usize;
        (needed.max(self.node_count).div_ceil(32) * 32).min(self.max_nodes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EikonalConfig {
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for EikonalConfig {
    fn default() -> Self {
        Self { newton_tol: 1e-12, newton_max_iter: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JnMode {
    Quadrature,
    Eikonal,
}

/// Configuration of both evaluation modes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JnConfigs {
    pub quadrature: QuadratureConfig,
    pub eikonal: EikonalConfig,
}

/// J_n for n = 2…N on one lattice.
#[derive(Debug, Clone)]
pub struct JnTable {
    pub params: PhysicalParams,
    pub spec: PotentialSpec,
    pub mode: JnMode,
    entries: Vec<GridFunction>,
}

impl JnTable {
    /// J_n, 2 ≤ n ≤ N.
    pub fn get(&self, n: usize) -> &GridFunction {
        &self.entries[n - 2]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// q̄_n^k = x0 + (k/n)(q_n − x0).
pub fn interp_point(x0: f64, q_n: f64, k: usize, n: usize) -> f64 {
    x0 + (k as f64 / n as f64) * (q_n - x0)
}

/// q_s = (x0 + (n−1) q_n)/n.
pub fn kinetic_saddle(n: usize, q_n: f64, x0: f64) -> f64 {
    (x0 + (n as f64 - 1.0) * q_n) / n as f64
}

/// ℏ_eff = (Tℏ/(mN))·(n−1)/n.
pub fn effective_hbar(n: usize, params: &PhysicalParams) -> f64 {
    let nf = n as f64;
    params.total_time() * params.hbar() / (params.mass() * params.slices() as f64) * (nf - 1.0) / nf
}

/// J̄_n at one point.
pub fn jbar_at(n: usize, q_n: f64, params: &PhysicalParams, spec: &PotentialSpec) -> Complex64 {
    let x0 = params.x0();
    let a = params.lattice_spacing();
    let kappa = params.kinetic_coefficient();
    let sum: f64 = (1..n).map(|k| spec.value(Complex64::new(interp_point(x0, q_n, k, n), 0.0)).re).sum();
    let phase = kappa * (x0 - q_n).powi(2) / n as f64 - a / params.hbar() * sum;
    Complex64::from_polar((n as f64).powf(-0.5), phase)
}

pub fn jbar(n: usize, lattice: &SpatialLattice, params: &PhysicalParams, spec: &PotentialSpec) -> GridFunction {
    let values = lattice.positions().into_par_iter().map(|q| jbar_at(n, q, params, spec)).collect();
    GridFunction::new(*lattice, values).expect("length matches lattice")
}

/// ∫_ℝ e^{iβe^{2iθ}λ²} g(λ) dλ by Gauss-Hermite, scaled so that the rule's
/// weight matches |e^{iβe^{2iθ}λ²}| up to a residual phase. Nodes whose
/// Gaussian factor is below e^{−50} are skipped; `g` must stay bounded.
pub(crate) fn rotated_gaussian_integral(
    beta: f64,
    theta: f64,
    cfg: &QuadratureConfig,
    nodes: usize,
    mut g: impl FnMut(f64) -> Complex64,
) -> Complex64 {
    let rule = GaussHermite::cached(nodes);
    // A = −iβe^{2iθ}; integrand e^{−Aλ²}
    let a_coef = Complex64::new(0.0, -beta) * Complex64::from_polar(1.0, 2.0 * theta);
    let scale = if cfg.rescale { beta.powf(-0.5) } else { 1.0 };
    let z = a_coef * scale * scale;
    let mut sum = Complex64::new(0.0, 0.0);
    for (&u, &lw) in rule.nodes.iter().zip(&rule.log_scaled_weights) {
        let log_mag = lw - z.re * u * u;
        if log_mag < -50.0 {
            continue;
        }
        let w = Complex64::new(log_mag, -z.im * u * u).exp();
        sum += w * g(scale * u);
    }
    sum * scale
}

/// The rotated integral with node doubling: accepted once the rule agrees
/// with the rule of half its size to `refine_tolerance`, so its own error is
/// far smaller, or once `max_nodes` is reached. Without rescaling the rule
/// is used as configured.
pub(crate) fn adaptive_rotated_integral(
    beta: f64,
    theta: f64,
    cfg: &QuadratureConfig,
    g: impl Fn(f64) -> Complex64,
) -> Result<(Complex64, usize)> {
    let mut nodes = cfg.nodes_for(theta);
    if !cfg.rescale {
        return Ok((rotated_gaussian_integral(beta, theta, cfg, nodes, &g), nodes));
    }
    let mut coarse = rotated_gaussian_integral(beta, theta, cfg, nodes / 2, &g);
    loop {
        let fine = rotated_gaussian_integral(beta, theta, cfg, nodes, &g);
        let change = (fine - coarse).norm();
        if change <= cfg.refine_tolerance {
            return Ok((fine, nodes));
        }
        if 2 * nodes > cfg.max_nodes {
            // Diagnostic mode reports this through its own doubling check.
            return Ok((fine, nodes));
        }
        coarse = fine;
        nodes *= 2;
    }
}

/// Largest |λ| at which the rotated Gaussian still exceeds e^{−50} relative
/// to its peak.
fn envelope_radius(beta: f64, theta: f64) -> f64 {
    (50.0 / (beta * (2.0 * theta).sin())).sqrt()
}

/// Splits Σ_k V(q̄^k) over a contour segment into a constant from terms that
/// stay in a flat tail of V and the list of remaining (active) fractions k/(n−1).
struct PotentialSum {
    flat: Complex64,
    /// Indices k of active terms, ascending.
    active: Vec<usize>,
    steps: f64,
    /// Active indices are consecutive and V is a rational function of
    /// e^{−2z}, so the terms follow from one exponential per point.
    geometric: bool,
}

impl PotentialSum {
    /// Terms V(x0 + t_k (c + e^{iθ}λ − x0)), t_k = k/(n−1), for λ ∈ [−L, L].
    fn new(spec: &PotentialSpec, x0: f64, center: f64, theta: f64, n: usize, radius: f64) -> Self {
        let dir = Complex64::from_polar(radius, theta);
        let steps = n as f64 - 1.0;
        let mut flat = Complex64::new(0.0, 0.0);
        let mut active = Vec::new();
        for k in 1..n {
            let t = k as f64 / steps;
            let mid = Complex64::new(x0 + t * (center - x0), 0.0);
            let lo = mid - t * dir;
            let hi = mid + t * dir;
            match segment_tail(spec, lo, hi) {
                Some(v) => flat += v,
                None => active.push(k),
            }
        }
        let consecutive = active.windows(2).all(|w| w[1] == w[0] + 1);
        // e^{−2z} stays far from overflow while |Re z| < 150.
        let bounded = x0.abs().max(center.abs()) + radius < 150.0;
        let geometric = consecutive
            && bounded
            && matches!(spec, PotentialSpec::RosenMorse { .. } | PotentialSpec::SmoothStep { .. });
        Self { flat, active, steps, geometric }
    }

    #[inline]
    fn eval(&self, spec: &PotentialSpec, x0: f64, q: Complex64) -> Complex64 {
        let d = q - x0;
        let mut s = self.flat;
        if self.geometric && !self.active.is_empty() {
            // w_k = e^{−2(x0 + t_k d)} advances by the ratio e^{−2d/(n−1)}.
            let ratio = (-2.0 * d / self.steps).exp();
            let mut w = (-2.0 * (x0 + self.active[0] as f64 / self.steps * d)).exp();
            match *spec {
                PotentialSpec::RosenMorse { v0 } => {
                    for _ in &self.active {
                        let one = 1.0 + w;
                        s += 4.0 * v0 * w / (one * one);
                        w *= ratio;
                    }
                }
                PotentialSpec::SmoothStep { v0 } => {
                    for _ in &self.active {
                        s += v0 / (1.0 + w);
                        w *= ratio;
                    }
                }
                _ => unreachable!("geometric sums only for exponential potentials"),
            }
            return s;
        }
        for &k in &self.active {
            s += spec.value(x0 + (k as f64 / self.steps) * d);
        }
        s
    }
}

/// Tail value if the whole segment [lo, hi] lies in one flat tail of V.
fn segment_tail(spec: &PotentialSpec, lo: Complex64, hi: Complex64) -> Option<Complex64> {
    if lo.re.signum() != hi.re.signum() {
        return None;
    }
    // Worst corner of the bounding box: smallest |Re|, largest |Im|.
    let re = if lo.re.abs() < hi.re.abs() { lo.re } else { hi.re };
    let im = lo.im.abs().max(hi.im.abs());
    let corner = Complex64::new(re, im);
    let v = spec.flat_tail(corner)?;
    spec.flat_tail(Complex64::new(re, -im)).map(|_| v)
}

/// Rotation angle and its admissible maximum for J_n at q_n.
pub fn jn_angle(
    n: usize,
    q_n: f64,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    cfg: &QuadratureConfig,
) -> (f64, f64) {
    let x0 = params.x0();
    let q_s = kinetic_saddle(n, q_n, x0);
    let theta_max = spec.max_deformation_angle(x0, q_s);
    let mut theta = cfg.angle(theta_max);
    if cfg.angle_strategy != AngleStrategy::Adaptive {
        return (theta, theta_max);
    }
    let beta = params.kinetic_coefficient() * n as f64 / (n as f64 - 1.0);
    let ratio = params.lattice_spacing() / params.hbar();
    let mut best = (f64::INFINITY, theta);
    for _ in 0..MAX_ANGLE_HALVINGS {
        let growth = contour_growth(spec, x0, q_s, theta, n, beta, ratio);
        if growth <= MAX_LOG_GROWTH {
            return (theta, theta_max);
        }
        if growth < best.0 {
            best = (growth, theta);
        }
        theta *= 0.5;
    }
    (best.1, theta_max)
}

/// Largest log-magnitude of the integrand e^{iβ(q−q_s)²}e^{−(ia/ℏ)ΣV} on the
/// rotated line, relative to its value at the saddle, sampled over the
/// Gaussian envelope.
fn contour_growth(spec: &PotentialSpec, x0: f64, q_s: f64, theta: f64, n: usize, beta: f64, ratio: f64) -> f64 {
    let radius = envelope_radius(beta, theta);
    let sum = PotentialSum::new(spec, x0, q_s, theta, n, radius);
    if sum.active.is_empty() {
        return 0.0;
    }
    let dir = Complex64::from_polar(1.0, theta);
    let base = sum.eval(spec, x0, Complex64::new(q_s, 0.0)).im;
    let decay = beta * (2.0 * theta).sin();
    (0..=GROWTH_SAMPLES)
        .map(|i| {
            let lambda = radius * (2.0 * i as f64 / GROWTH_SAMPLES as f64 - 1.0);
            let im = sum.eval(spec, x0, q_s + dir * lambda).im;
            ratio * (im - base) - decay * lambda * lambda
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// J_n at a single q_n by contour-rotated Gauss-Hermite quadrature.
pub fn jn_quadrature_at(
    n: usize,
    q_n: f64,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let (theta, theta_max) = jn_angle(n, q_n, params, spec, cfg);
    let (value, nodes) = jn_quadrature_with(n, q_n, params, spec, cfg, theta, theta_max, None)?;
    if cfg.diagnostic {
        let (doubled, _) = jn_quadrature_with(n, q_n, params, spec, cfg, theta, theta_max, Some(2 * nodes))?;
        let change = (doubled - value).norm();
        if change > 1e-6 {
            return Err(Error::QuadratureNonConvergence { change });
        }
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn jn_quadrature_with(
    n: usize,
    q_n: f64,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    cfg: &QuadratureConfig,
    theta: f64,
    theta_max: f64,
    nodes: Option<usize>,
) -> Result<(Complex64, usize)> {
    let x0 = params.x0();
    let q_s = kinetic_saddle(n, q_n, x0);
    if !(theta > 0.0 && theta <= theta_max + 1e-15) {
        return Err(Error::ContourViolation { center: q_s, theta });
    }
    let a = params.lattice_spacing();
    let hbar = params.hbar();
    let nf = n as f64;
    let beta = params.kinetic_coefficient() * nf / (nf - 1.0);
    let jbar = jbar_at(n, q_n, params, spec);
    let sum = PotentialSum::new(spec, x0, q_s, theta, n, envelope_radius(beta, theta));
    if sum.active.is_empty() {
        return Ok((jbar, 0));
    }
    let dir = Complex64::from_polar(1.0, theta);
    let phase = |s: Complex64| (Complex64::new(0.0, -a / hbar) * s).exp();
    let at_saddle = phase(sum.eval(spec, x0, Complex64::new(q_s, 0.0)));
    let integrand = |lambda: f64| phase(sum.eval(spec, x0, q_s + dir * lambda)) - at_saddle;
    let (integral, used) = match nodes {
        Some(nodes) => (rotated_gaussian_integral(beta, theta, cfg, nodes, integrand), nodes),
        None => adaptive_rotated_integral(beta, theta, cfg, integrand)?,
    };
    let prefactor = normalization_c(params) / (nf - 1.0).sqrt()
        * Complex64::from_polar(1.0, params.kinetic_coefficient() * (q_n - x0).powi(2) / nf + theta);
    Ok((jbar + prefactor * integral, used))
}

pub fn jn_quadrature(
    n: usize,
    lattice: &SpatialLattice,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    let values = lattice
        .positions()
        .into_par_iter()
        .map(|q| jn_quadrature_at(n, q, params, spec, cfg))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(*lattice, values)
}

/// χ_n(q) = q − (a²/m)(1/n) Σ_{k=1}^{n−1} k V′(q̄_{n−1}^k(q)).
pub fn chi_map(n: usize, q: f64, params: &PhysicalParams, spec: &PotentialSpec) -> f64 {
    let x0 = params.x0();
    let a = params.lattice_spacing();
    let sum: f64 =
        (1..n).map(|k| k as f64 * spec.gradient(Complex64::new(interp_point(x0, q, k, n - 1), 0.0)).re).sum();
    q - a * a / params.mass() / n as f64 * sum
}

/// dχ_n/dq; each interpolation point moves with factor k/(n−1).
pub fn chi_jacobian(n: usize, q: f64, params: &PhysicalParams, spec: &PotentialSpec) -> f64 {
    let x0 = params.x0();
    let a = params.lattice_spacing();
    let m1 = n as f64 - 1.0;
    let sum: f64 = (1..n)
        .map(|k| {
            let kf = k as f64;
            kf * kf / m1 * spec.hessian(Complex64::new(interp_point(x0, q, k, n - 1), 0.0)).re
        })
        .sum();
    1.0 - a * a / params.mass() / n as f64 * sum
}

/// J_n at a single q_n by stationary phase at the real saddle.
pub fn jn_eikonal_at(
    n: usize,
    q_n: f64,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    cfg: &EikonalConfig,
) -> Result<Complex64> {
    let x0 = params.x0();
    let q_s = kinetic_saddle(n, q_n, x0);
    let mut q = q_s;
    let mut converged = false;
    for _ in 0..cfg.newton_max_iter {
        let step = (chi_map(n, q, params, spec) - q_s) / chi_jacobian(n, q, params, spec);
        if !step.is_finite() {
            break;
        }
        q -= step;
        if step.abs() <= cfg.newton_tol * q.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NewtonDivergence { q: q_n });
    }
    let jacobian = chi_jacobian(n, q, params, spec);
    if jacobian <= 0.0 {
        return Err(Error::NegativeJacobian { q: q_n, jacobian });
    }
    let nf = n as f64;
    let kappa = params.kinetic_coefficient();
    let sum: f64 = (1..n).map(|k| spec.value(Complex64::new(interp_point(x0, q, k, n - 1), 0.0)).re).sum();
    let phase = kappa * (q_n - x0).powi(2) / nf + kappa * nf / (nf - 1.0) * (q - q_s).powi(2)
        - params.lattice_spacing() / params.hbar() * sum;
    Ok(Complex64::from_polar((nf * jacobian).powf(-0.5), phase))
}

pub fn jn_eikonal(
    n: usize,
    lattice: &SpatialLattice,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    cfg: &EikonalConfig,
) -> Result<GridFunction> {
    let values = lattice
        .positions()
        .into_par_iter()
        .map(|q| jn_eikonal_at(n, q, params, spec, cfg))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(*lattice, values)
}

/// J_n in the chosen mode, with errors annotated by slice.
pub fn jn(
    n: usize,
    lattice: &SpatialLattice,
    params: &PhysicalParams,
    spec: &PotentialSpec,
    mode: JnMode,
    cfgs: &JnConfigs,
) -> Result<GridFunction> {
    let out = match mode {
        JnMode::Quadrature => jn_quadrature(n, lattice, params, spec, &cfgs.quadrature),
        JnMode::Eikonal => jn_eikonal(n, lattice, params, spec, &cfgs.eikonal),
    };
    out.map_err(|e| e.at_slice(n))
}

pub fn build_jn_table(
    params: &PhysicalParams,
    spec: &PotentialSpec,
    lattice: &SpatialLattice,
    mode: JnMode,
    cfgs: &JnConfigs,
) -> Result<JnTable> {
    let entries =
        (2..=params.slices()).map(|n| jn(n, lattice, params, spec, mode, cfgs)).collect::<Result<Vec<_>>>()?;
    Ok(JnTable { params: *params, spec: *spec, mode, entries })
}

/// Closed-form J_n for the harmonic potential, where the integrand is an
/// exact Gaussian: exponent iκ(q_n − q)² + iκ(q − x0)²/(n−1) − (ia/ℏ)(ω²/2)Σ_k q̄_k².
pub fn jn_harmonic_exact(n: usize, q_n: f64, params: &PhysicalParams, omega: f64) -> Complex64 {
    let x0 = params.x0();
    let kappa = params.kinetic_coefficient();
    let g = params.lattice_spacing() / params.hbar() * 0.5 * omega * omega;
    let m1 = n as f64 - 1.0;
    // Σ_k (x0 + t_k(q − x0))² = A q² + B q + C with t_k = k/(n−1).
    let (mut s1, mut s2) = (0.0, 0.0);
    for k in 1..n {
        let t = k as f64 / m1;
        s1 += t;
        s2 += t * t;
    }
    let qa = s2;
    let qb = 2.0 * x0 * (s1 - s2);
    let qc = x0 * x0 * (m1 - 2.0 * s1 + s2);
    // Exponent i(P q² + Q q + R)
    let p = kappa + kappa / m1 - g * qa;
    let qq = -2.0 * kappa * q_n - 2.0 * kappa * x0 / m1 - g * qb;
    let r = kappa * q_n * q_n + kappa * x0 * x0 / m1 - g * qc;
    // ∫ e^{i(Pq² + Qq + R)} dq = sqrt(iπ/P) e^{i(R − Q²/(4P))}
    let gauss = (Complex64::new(0.0, PI) / p).sqrt() * Complex64::from_polar(1.0, r - qq * qq / (4.0 * p));
    normalization_c(params) / m1.sqrt() * gauss
}
