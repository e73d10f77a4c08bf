//! FFT stitching: I_{n+1} = J_{n+1} + c∫δI_n e^{−iaV/ℏ} e^{iκ(q − q')²} dq with
//! δI_n = I_n − J̄_n, and the Gaussian-initial-state variant that needs no
//! residual split because the packet itself decays.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jn::{self, adaptive_rotated_integral, jbar, JnConfigs, JnMode, QuadratureConfig};
use crate::lattice::{
    gaussian_kernel_fourier, normalization_c, FftPair, GridFunction, PhysicalParams, PropagatorStack, SpatialLattice,
};
use crate::potentials::PotentialSpec;

/// Fraction of lattice points at each end that count as the edge.
const EDGE_FRACTION: f64 = 0.05;
/// Edge-to-peak ratio of δI_n above which leakage is reported.
const RESIDUAL_LEAK_RATIO: f64 = 1e-3;
/// Edge amplitude of an evolved packet above which leakage is reported.
const PACKET_LEAK_LEVEL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaddingConfig {
    pub pad_factor: usize,
}

impl Default for PaddingConfig {
    fn default() -> Self {
        Self { pad_factor: 2 }
    }
}

impl PaddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pad_factor == 0 {
            return Err(Error::InvalidParameter { field: "lattice.pad_factor", reason: "must be >= 1".into() });
        }
        Ok(())
    }
}

/// A non-fatal report that a function is not negligible at the window edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeLeakage {
    pub slice: usize,
    /// Edge maximum, relative to the global maximum for residuals and
    /// absolute for wave packets.
    pub level: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StitchDiagnostics {
    pub edge_leakage: Vec<EdgeLeakage>,
    /// Largest residual edge ratio seen over all slices.
    pub max_edge_ratio: f64,
}

/// I_n on the unpadded window.
#[derive(Debug, Clone)]
pub struct StitchState {
    pub n: usize,
    pub i_n: GridFunction,
}

/// Max over the outer 5% of points at each end, divided by the global max
/// (0 for an identically vanishing function).
pub fn edge_ratio(f: &GridFunction) -> f64 {
    let peak = f.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let values = f.values();
    let m = values.len();
    let w = ((m as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    let edge = values[..w].iter().chain(&values[m - w..]).map(|z| z.norm()).fold(0.0, f64::max);
    edge / peak
}

/// δI_n = I_n − J̄_n with the relative edge maximum of the result.
pub fn residual(i_n: &GridFunction, jbar_n: &GridFunction) -> Result<(GridFunction, f64)> {
    if i_n.lattice() != jbar_n.lattice() {
        return Err(Error::InvalidParameter {
            field: "residual",
            reason: "operands live on different lattices".into(),
        });
    }
    let values = i_n.values().iter().zip(jbar_n.values()).map(|(a, b)| a - b).collect();
    let delta = GridFunction::new(*i_n.lattice(), values)?;
    let ratio = edge_ratio(&delta);
    Ok((delta, ratio))
}

/// Convolution with the one-slice kernel on a zero-padded copy of the window.
pub struct Convolver {
    window: SpatialLattice,
    padded: SpatialLattice,
    offset: usize,
    fft: FftPair,
    kernel: Vec<Complex64>,
    potential_phase: Vec<Complex64>,
}

impl Convolver {
    pub fn new(params: &PhysicalParams, spec: &PotentialSpec, window: &SpatialLattice, padding: PaddingConfig) -> Self {
        let (padded, offset) = window.padded(padding.pad_factor);
        let scale = -params.lattice_spacing() / params.hbar();
        let potential_phase = padded
            .positions()
            .into_iter()
            .map(|q| Complex64::from_polar(1.0, scale * spec.value(Complex64::new(q, 0.0)).re))
            .collect();
        Self {
            window: *window,
            padded,
            offset,
            fft: FftPair::new(padded.points()),
            kernel: gaussian_kernel_fourier(params, &padded).into_values(),
            potential_phase,
        }
    }

    pub fn window(&self) -> &SpatialLattice {
        &self.window
    }

    /// IFFT[FFT(f·e^{−iaV/ℏ})·e^{−iaℏk²/(2m)}] restricted back to the window.
    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        let mut work = f.embed(self.padded, self.offset).into_values();
        work.iter_mut().zip(&self.potential_phase).for_each(|(z, p)| *z *= p);
        self.fft.apply_kernel(&mut work, &self.kernel);
        GridFunction::new(self.padded, work).expect("padded length").crop(self.window, self.offset)
    }
}

/// One-shot convolution with default padding.
pub fn convolve_step(delta: &GridFunction, params: &PhysicalParams, spec: &PotentialSpec) -> GridFunction {
    Convolver::new(params, spec, delta.lattice(), PaddingConfig::default()).apply(delta)
}

/// I_1(q) = e^{iκ(x0 − q)²}.
pub fn i1(lattice: &SpatialLattice, params: &PhysicalParams) -> GridFunction {
    let kappa = params.kinetic_coefficient();
    let x0 = params.x0();
    GridFunction::from_fn(*lattice, |q| Complex64::from_polar(1.0, kappa * (x0 - q).powi(2)))
}

/// Advances the state by one slice. Returns the residual edge ratio.
pub fn stitch_step(
    state: &mut StitchState,
    j_next: &GridFunction,
    jbar_n: &GridFunction,
    convolver: &Convolver,
) -> Result<f64> {
    let (delta, ratio) = residual(&state.i_n, jbar_n)?;
    let conv = convolver.apply(&delta);
    let values = j_next.values().iter().zip(conv.values()).map(|(j, c)| j + c).collect();
    state.i_n = GridFunction::new(*j_next.lattice(), values)?;
    state.n += 1;
    if !state.i_n.is_finite() {
        return Err(Error::Overflow { slice: state.n });
    }
    Ok(ratio)
}

/// G_n(x1) = c e^{−(ia/(2ℏ))[V(x0)+V(x1)]} I_n(x1).
pub fn normalize(i_n: &GridFunction, params: &PhysicalParams, spec: &PotentialSpec) -> GridFunction {
    let c = normalization_c(params);
    let half = -params.lattice_spacing() / (2.0 * params.hbar());
    let v0 = spec.value(Complex64::new(params.x0(), 0.0)).re;
    let lattice = *i_n.lattice();
    let values = i_n
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let v1 = spec.value(Complex64::new(lattice.x(j), 0.0)).re;
            c * Complex64::from_polar(1.0, half * (v0 + v1)) * v
        })
        .collect();
    GridFunction::new(lattice, values).expect("same length")
}

/// Options of a stitching run beyond the J_n configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StitchOptions {
    pub padding: PaddingConfig,
    /// Keep only G_N.
    pub low_memory: bool,
}

/// Full run returning every slice G_1…G_N.
pub fn run_stitch(
    params: &PhysicalParams,
    spec: &PotentialSpec,
    lattice: &SpatialLattice,
    mode: JnMode,
    cfgs: &JnConfigs,
) -> Result<PropagatorStack> {
    run_stitch_with(params, spec, lattice, mode, cfgs, &StitchOptions::default()).map(|(stack, _)| stack)
}

/// Run with explicit options. In low-memory mode J_n is produced slice by
/// slice and the returned stack holds G_N only.
pub fn run_stitch_with(
    params: &PhysicalParams,
    spec: &PotentialSpec,
    lattice: &SpatialLattice,
    mode: JnMode,
    cfgs: &JnConfigs,
    options: &StitchOptions,
) -> Result<(PropagatorStack, StitchDiagnostics)> {
    spec.validate()?;
    options.padding.validate()?;
    cfgs.quadrature.validate()?;
    let n_total = params.slices();
    let table = if options.low_memory { None } else { Some(jn::build_jn_table(params, spec, lattice, mode, cfgs)?) };
    let convolver = Convolver::new(params, spec, lattice, options.padding);
    let mut diagnostics = StitchDiagnostics::default();
    let mut slices = Vec::with_capacity(if options.low_memory { 1 } else { n_total });
    let mut state = StitchState { n: 1, i_n: i1(lattice, params) };
    if !options.low_memory {
        slices.push(normalize(&state.i_n, params, spec));
    }
    while state.n < n_total {
        let n = state.n;
        let j_next = match &table {
            Some(t) => t.get(n + 1).clone(),
            None => jn::jn(n + 1, lattice, params, spec, mode, cfgs)?,
        };
        let jbar_n = jbar(n, lattice, params, spec);
        let ratio = stitch_step(&mut state, &j_next, &jbar_n, &convolver).map_err(|e| e.at_slice(n + 1))?;
        diagnostics.max_edge_ratio = diagnostics.max_edge_ratio.max(ratio);
        if ratio > RESIDUAL_LEAK_RATIO {
            diagnostics.edge_leakage.push(EdgeLeakage { slice: n, level: ratio });
        }
        if !options.low_memory {
            slices.push(normalize(&state.i_n, params, spec));
        }
    }
    if options.low_memory {
        let last = normalize(&state.i_n, params, spec);
        return Ok((PropagatorStack::final_only(*params, *lattice, last)?, diagnostics));
    }
    Ok((PropagatorStack::new(*params, *lattice, slices)?, diagnostics))
}

/// G_N(x2, x0) for each x2 from two half-time stacks:
/// ∫G_{N/2}(x2, x1)G_{N/2}(x1, x0)dx1.
///
/// Each half stack splits into its asymptotic part c e^{…}J̄ and a decaying
/// remainder. The product of asymptotic parts is a chirp whose integral is
/// taken analytically along a rotated line; everything else decays and is
/// summed on the lattice, so the window must hold the remainders.
/// G_{N/2}(x2, x1) = G_{N/2}(x1, x2) by the symmetry of the lattice action,
/// so the second stack is a run from x2.
pub fn compose_halves(
    params: &PhysicalParams,
    spec: &PotentialSpec,
    lattice: &SpatialLattice,
    x2s: &[f64],
    mode: JnMode,
    cfgs: &JnConfigs,
) -> Result<Vec<Complex64>> {
    let n_total = params.slices();
    if !n_total.is_multiple_of(2) || n_total < 4 {
        return Err(Error::InvalidParameter { field: "physical.N", reason: "composition needs an even N >= 4".into() });
    }
    let n = n_total / 2;
    let half = PhysicalParams::new(params.mass(), params.hbar(), params.total_time() / 2.0, n, params.x0())?;
    let low_memory = StitchOptions { low_memory: true, ..StitchOptions::default() };
    let (from_x0, _) = run_stitch_with(&half, spec, lattice, mode, cfgs, &low_memory)?;
    let asym_x0 = normalize(&jbar(n, lattice, &half, spec), &half, spec);
    x2s.iter()
        .map(|&x2| {
            let half_x2 = half.with_x0(x2)?;
            let (from_x2, _) = run_stitch_with(&half_x2, spec, lattice, mode, cfgs, &low_memory)?;
            let asym_x2 = normalize(&jbar(n, lattice, &half_x2, spec), &half_x2, spec);
            let a = from_x0.last().values();
            let b = from_x2.last().values();
            let lattice_part: Complex64 = a
                .iter()
                .zip(b)
                .zip(asym_x0.values().iter().zip(asym_x2.values()))
                .map(|((a, b), (abar, bbar))| a * b - abar * bbar)
                .sum::<Complex64>()
                * lattice.dx();
            Ok(lattice_part + asymptotic_product_integral(&half, spec, x2, &cfgs.quadrature)?)
        })
        .collect()
}

/// ∫ Ā(x1)B̄(x1) dx1 over ℝ for the half-time asymptotic parts from x0 and x2.
fn asymptotic_product_integral(
    half: &PhysicalParams,
    spec: &PotentialSpec,
    x2: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let n = half.slices();
    let nf = n as f64;
    let x0 = half.x0();
    let kappa = half.kinetic_coefficient();
    let ratio = half.lattice_spacing() / half.hbar();
    let c = normalization_c(half);
    // Exponent iκ[(x1−x0)² + (x1−x2)²]/n − (ia/ℏ)S(x1) with
    // S = V(x1) + Σ_k V(x0 + k(x1−x0)/n) + Σ_k V(x2 + k(x1−x2)/n);
    // the x0 and x2 endpoint factors are constant and applied last.
    let r = 0.5 * (x0 + x2);
    let beta = 2.0 * kappa / nf;
    let theta_max = spec.line_angle(x0).min(spec.line_angle(x2)).min(std::f64::consts::FRAC_PI_4);
    let theta = 0.5 * theta_max;
    let s = |x1: Complex64| -> Complex64 {
        let mut acc = spec.value(x1);
        for k in 1..n {
            let t = k as f64 / nf;
            acc += spec.value(x0 + t * (x1 - x0)) + spec.value(x2 + t * (x1 - x2));
        }
        acc
    };
    let phase = |x1: Complex64| (Complex64::new(0.0, -ratio) * s(x1)).exp();
    let dir = Complex64::from_polar(1.0, theta);
    let center = phase(Complex64::new(r, 0.0));
    let (diff, _) = adaptive_rotated_integral(beta, theta, cfg, |lambda| phase(r + dir * lambda) - center)?;
    // ∫ e^{iβ(x1−r)²} dx1 = sqrt(iπ/β)
    let gaussian = (Complex64::new(0.0, std::f64::consts::PI) / beta).sqrt();
    let integral = gaussian * center + dir * diff;
    let ends = spec.value(Complex64::new(x0, 0.0)).re + spec.value(Complex64::new(x2, 0.0)).re;
    Ok(c * c / nf * Complex64::from_polar(1.0, kappa * (x2 - x0).powi(2) / (2.0 * nf) - 0.5 * ratio * ends) * integral)
}

/// ψ0(x) = (2πσ²)^{−1/4} e^{−(x−μ)²/(4σ²) + ip0x/ℏ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub mean: f64,
    pub spread: f64,
    pub momentum: f64,
}

impl GaussianState {
    pub fn new(mean: f64, spread: f64, momentum: f64) -> Result<Self> {
        if !(spread > 0.0 && spread.is_finite()) {
            return Err(Error::InvalidParameter { field: "state.sigma", reason: "must be > 0".into() });
        }
        if !mean.is_finite() || !momentum.is_finite() {
            return Err(Error::InvalidParameter { field: "state", reason: "must be finite".into() });
        }
        Ok(Self { mean, spread, momentum })
    }

    pub fn normalization(&self) -> f64 {
        (2.0 * std::f64::consts::PI * self.spread * self.spread).powf(-0.25)
    }

    /// Unnormalized amplitude at a complex point.
    fn envelope(&self, q: Complex64, hbar: f64) -> Complex64 {
        let d = q - self.mean;
        (-d * d / (4.0 * self.spread * self.spread) + Complex64::new(0.0, self.momentum / hbar) * q).exp()
    }

    pub fn sample(&self, lattice: &SpatialLattice, hbar: f64) -> GridFunction {
        let norm = self.normalization();
        GridFunction::from_fn(*lattice, |x| norm * self.envelope(Complex64::new(x, 0.0), hbar))
    }
}

/// ψ at t = a·n for n = 1…N together with any edge leakage.
pub fn evolve_gaussian(
    params: &PhysicalParams,
    spec: &PotentialSpec,
    state0: &GaussianState,
    lattice: &SpatialLattice,
) -> Result<(Vec<GridFunction>, Vec<EdgeLeakage>)> {
    spec.validate()?;
    let hbar = params.hbar();
    let kappa = params.kinetic_coefficient();
    let half_ratio = params.lattice_spacing() / (2.0 * hbar);
    let c = normalization_c(params);
    let cfg = QuadratureConfig::default();
    // Beyond this distance from μ the Gaussian factor is below e^{−90}.
    let reach = 19.0 * state0.spread;
    let first: Vec<Complex64> = {
        use rayon::prelude::*;
        lattice
            .positions()
            .into_par_iter()
            .map(|q1| {
                if (q1 - state0.mean).abs() > reach {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let theta = 0.5 * spec.line_angle(q1).min(std::f64::consts::FRAC_PI_4);
                let dir = Complex64::from_polar(1.0, theta);
                let (integral, _) = adaptive_rotated_integral(kappa, theta, &cfg, |lambda| {
                    let q0 = q1 + dir * lambda;
                    state0.envelope(q0, hbar) * (Complex64::new(0.0, -half_ratio) * spec.value(q0)).exp()
                })?;
                Ok(c * dir * integral)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut current = GridFunction::new(*lattice, first)?;
    let convolver = Convolver::new(params, spec, lattice, PaddingConfig::default());
    let norm = state0.normalization();
    let end_phase: Vec<Complex64> = lattice
        .positions()
        .into_iter()
        .map(|x| norm * Complex64::from_polar(1.0, -half_ratio * spec.value(Complex64::new(x, 0.0)).re))
        .collect();
    let to_psi = |i_n: &GridFunction| {
        let values = i_n.values().iter().zip(&end_phase).map(|(v, p)| v * p).collect();
        GridFunction::new(*lattice, values).expect("same length")
    };
    let mut out = Vec::with_capacity(params.slices());
    let mut leaks = Vec::new();
    for n in 1..=params.slices() {
        if n > 1 {
            current = convolver.apply(&current);
        }
        let psi = to_psi(&current);
        if !psi.is_finite() {
            return Err(Error::Overflow { slice: n });
        }
        let edge = edge_ratio(&psi) * psi.max_abs();
        if edge > PACKET_LEAK_LEVEL {
            leaks.push(EdgeLeakage { slice: n, level: edge });
        }
        out.push(psi);
    }
    Ok((out, leaks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(n: usize) -> PhysicalParams {
        PhysicalParams::new(1.0, 0.25, 10.0, n, -5.0).unwrap()
    }

    /// Free propagator from x0 = −5 with m = 1, ℏ = 0.25.
    fn free(t: f64, x: f64) -> Complex64 {
        let modulus = (1.0 / (2.0 * std::f64::consts::PI * 0.25 * t)).sqrt();
        Complex64::from_polar(modulus, -std::f64::consts::FRAC_PI_4 + (x + 5.0).powi(2) / (2.0 * 0.25 * t))
    }

    #[test]
    fn i1_values() {
        let p = reference(20);
        let l = SpatialLattice::new(-10.0, 10.0, 200).unwrap();
        let f = i1(&l, &p);
        assert!(f.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        let j = l.nearest_index(-4.0);
        assert!((l.x(j) + 4.0).abs() < 1e-12);
        assert!((f.values()[j] - Complex64::new(-0.653_643_620_863_611_9, -0.756_802_495_307_928_2)).norm() < 1e-10);
        assert!((f.values()[l.nearest_index(-5.0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn residual_is_pointwise_difference() {
        let l = SpatialLattice::new(-5.0, 5.0, 100).unwrap();
        let jb = GridFunction::from_fn(l, |x| Complex64::new(x.cos(), x));
        let g = GridFunction::from_fn(l, |x| Complex64::new(0.0, (-x * x).exp()));
        let i = GridFunction::from_fn(l, |x| Complex64::new(x.cos(), x) + Complex64::new(0.0, (-x * x).exp()));
        let (d, ratio) = residual(&i, &jb).unwrap();
        assert!(d.sup_distance(&g) < 1e-15);
        assert!(ratio < 1e-3);
        let (z, ratio) = residual(&jb, &jb).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        assert_eq!(ratio, 0.0);
    }

    #[test]
    fn convolution_of_narrow_gaussian_is_fresnel_spread() {
        let p = reference(20);
        let l = SpatialLattice::default();
        let s = 0.1;
        let delta = GridFunction::from_fn(l, |q| Complex64::new((-q * q / (2.0 * s * s)).exp(), 0.0));
        let out = convolve_step(&delta, &p, &PotentialSpec::Free);
        // c∫e^{−q²/(2s²)} e^{iκ(x−q)²} dq with κ = m/(2aℏ)
        let kappa = 1.0 / (2.0 * 0.5 * 0.25);
        let c = normalization_c(&p);
        let exact = GridFunction::from_fn(l, |x| {
            let alpha = Complex64::new(1.0 / (2.0 * s * s), -kappa);
            let gamma = Complex64::new(0.0, kappa);
            c * (std::f64::consts::PI / alpha).sqrt() * (gamma * x * x + (gamma * x) * (gamma * x) / alpha).exp()
        });
        assert!(out.sup_distance(&exact) < 1e-8, "{}", out.sup_distance(&exact));
        assert_eq!(convolve_step(&GridFunction::zeros(l), &p, &PotentialSpec::Free).max_abs(), 0.0);
    }

    #[test]
    fn two_free_steps_equal_one_double_step() {
        let p = reference(20);
        let p2 = PhysicalParams::new(1.0, 0.25, 20.0, 20, -5.0).unwrap();
        let l = SpatialLattice::default();
        let f = GridFunction::from_fn(l, |q| Complex64::new(-q * q / 8.0, 0.3 * q).exp());
        let twice = convolve_step(&convolve_step(&f, &p, &PotentialSpec::Free), &p, &PotentialSpec::Free);
        let once = convolve_step(&f, &p2, &PotentialSpec::Free);
        assert!(twice.sup_distance(&once) < 1e-10);
    }

    #[test]
    fn free_stack_is_exact_every_slice() {
        let p = reference(10);
        let l = SpatialLattice::default();
        let stack = run_stitch(&p, &PotentialSpec::Free, &l, JnMode::Quadrature, &JnConfigs::default()).unwrap();
        assert_eq!(stack.slices().len(), 10);
        for n in 1..=10 {
            let t = n as f64;
            let g = stack.slice(n);
            for j in (0..l.points()).step_by(37) {
                let x = l.x(j);
                if (x + 5.0).abs() <= 20.0 {
                    let e = free(t, x);
                    assert!((g.values()[j] - e).norm() < 1e-12 * e.norm());
                }
            }
        }
        let e = free(10.0, -5.0);
        assert!((e - Complex64::new(0.178_412_411_615_277_4, -0.178_412_411_615_277_4)).norm() < 1e-12);
    }

    #[test]
    fn low_memory_matches_full_run() {
        let p = reference(6);
        let l = SpatialLattice::new(-40.0, 40.0, 2048).unwrap();
        let spec = PotentialSpec::RosenMorse { v0: 1.0 };
        let full = run_stitch(&p, &spec, &l, JnMode::Quadrature, &JnConfigs::default()).unwrap();
        let opts = StitchOptions { low_memory: true, ..Default::default() };
        let (low, diag) = run_stitch_with(&p, &spec, &l, JnMode::Quadrature, &JnConfigs::default(), &opts).unwrap();
        assert_eq!(low.slices().len(), 1);
        assert!(low.last().sup_distance(full.last()) < 1e-14);
        assert_eq!(low.first_slice(), 6);
        assert!(diag.max_edge_ratio.is_finite());
    }

    #[test]
    fn composition_of_free_halves() {
        let p = reference(8);
        let l = SpatialLattice::default();
        let x2s = [-7.0, 0.0, 12.5];
        let g = compose_halves(&p, &PotentialSpec::Free, &l, &x2s, JnMode::Quadrature, &JnConfigs::default()).unwrap();
        for (x2, v) in x2s.iter().zip(g) {
            assert!((v - free(10.0, *x2)).norm() < 1e-12, "{x2}: {v}");
        }
        assert!(compose_halves(&reference(7), &PotentialSpec::Free, &l, &x2s, JnMode::Quadrature, &JnConfigs::default())
            .is_err());
    }

    #[test]
    fn composition_of_rosen_morse_halves() {
        // The window holds the half-time remainders for N = 8.
        let p = reference(8);
        let l = SpatialLattice::new(-100.0, 100.0, 8192).unwrap();
        let spec = PotentialSpec::RosenMorse { v0: 1.0 };
        let full = run_stitch(&p, &spec, &l, JnMode::Quadrature, &JnConfigs::default()).unwrap();
        let idx = [l.nearest_index(-6.0), l.nearest_index(1.0)];
        let x2s: Vec<f64> = idx.iter().map(|&j| l.x(j)).collect();
        let g = compose_halves(&p, &spec, &l, &x2s, JnMode::Quadrature, &JnConfigs::default()).unwrap();
        for (&j, v) in idx.iter().zip(g) {
            assert!((v - full.last().values()[j]).norm() < 1e-8, "{}: {v}", l.x(j));
        }
    }

    #[test]
    fn parity_of_even_potential() {
        // Points at ±(j + ½)dx so that x ↦ −x maps index j to M − 1 − j.
        let m = 4096;
        let dx = 100.0 / m as f64;
        let l = SpatialLattice::new(-50.0 + 0.5 * dx, 50.0 + 0.5 * dx, m).unwrap();
        let spec = PotentialSpec::RosenMorse { v0: 1.0 };
        let a = run_stitch(&reference(5), &spec, &l, JnMode::Quadrature, &JnConfigs::default()).unwrap();
        let b =
            run_stitch(&reference(5).with_x0(5.0).unwrap(), &spec, &l, JnMode::Quadrature, &JnConfigs::default()).unwrap();
        let d = (0..m).map(|j| (a.last().values()[j] - b.last().values()[m - 1 - j]).norm()).fold(0.0, f64::max);
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn free_gaussian_spreads_as_closed_form() {
        let p = PhysicalParams::new(1.0, 0.25, 1.0, 10, 0.0).unwrap();
        let l = SpatialLattice::default();
        let g = GaussianState::new(0.0, 1.0, 0.0).unwrap();
        let (psi, leaks) = evolve_gaussian(&p, &PotentialSpec::Free, &g, &l).unwrap();
        assert!(leaks.is_empty());
        let st2 = 1.0 + (0.25 * 1.0 / 2.0f64).powi(2);
        let exact = |x: f64| (2.0 * std::f64::consts::PI * st2).powf(-0.5) * (-x * x / (2.0 * st2)).exp();
        let last = psi.last().unwrap();
        let err = (0..l.points()).map(|j| (last.values()[j].norm_sqr() - exact(l.x(j))).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        let norm = last.l2_norm();
        assert!((norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_state_rejects_bad_spread() {
        assert!(GaussianState::new(0.0, 0.0, 1.0).is_err());
        let g = GaussianState::new(-5.0, 1.0, 1.0).unwrap();
        assert!((g.sample(&SpatialLattice::default(), 0.25).l2_norm() - 1.0).abs() < 1e-6);
    }
}
