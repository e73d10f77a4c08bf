//! Physical parameters, uniform lattices, sampled complex fields and the
//! Fourier-domain free kernel shared by every other module.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass, Planck constant, total time, slice count and initial point of one
/// propagator problem. The configuration space is one-dimensional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    mass: f64,
    hbar: f64,
    total_time: f64,
    slices: usize,
    x0: f64,
}

impl PhysicalParams {
    pub fn new(mass: f64, hbar: f64, total_time: f64, slices: usize, x0: f64) -> Result<Self> {
        let positive = |field, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { field, reason: format!("must be finite and > 0, got {v}") })
            }
        };
        positive("mass", mass)?;
        positive("hbar", hbar)?;
        positive("total_time", total_time)?;
        if slices < 2 {
            return Err(Error::InvalidParameter { field: "slices", reason: format!("must be >= 2, got {slices}") });
        }
        if !x0.is_finite() {
            return Err(Error::InvalidParameter { field: "x0", reason: "must be finite".into() });
        }
        Ok(Self { mass, hbar, total_time, slices, x0 })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Spatial dimension; fixed to one.
    pub fn dim(&self) -> usize {
        1
    }

    /// Time step a = T/N.
    pub fn lattice_spacing(&self) -> f64 {
        self.total_time / self.slices as f64
    }

    /// Same problem with a different slice count and the same total time.
    pub fn with_slices(&self, slices: usize) -> Result<Self> {
        Self::new(self.mass, self.hbar, self.total_time, slices, self.x0)
    }

    /// Same time step and initial point, different slice count (total time
    /// scales with it).
    pub fn with_slices_fixed_step(&self, slices: usize) -> Result<Self> {
        let a = self.lattice_spacing();
        Self::new(self.mass, self.hbar, a * slices as f64, slices, self.x0)
    }

    pub fn with_x0(&self, x0: f64) -> Result<Self> {
        Self::new(self.mass, self.hbar, self.total_time, self.slices, x0)
    }

    /// Coefficient m/(2aℏ) of the kinetic phase.
    pub(crate) fn kinetic_coefficient(&self) -> f64 {
        self.mass / (2.0 * self.lattice_spacing() * self.hbar)
    }
}

/// M samples x_j = x_min + j·dx on [x_min, x_max), periodic for FFT purposes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialLattice {
    x_min: f64,
    x_max: f64,
    points: usize,
}

impl Default for SpatialLattice {
    fn default() -> Self {
        Self { x_min: -50.0, x_max: 50.0, points: 4096 }
    }
}

impl SpatialLattice {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter {
                field: "lattice",
                reason: format!("need finite x_min < x_max, got [{x_min}, {x_max})"),
            });
        }
        if points < 2 {
            return Err(Error::InvalidParameter { field: "lattice.M", reason: format!("must be >= 2, got {points}") });
        }
        Ok(Self { x_min, x_max, points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.x(j)).collect()
    }

    /// Index of the sample closest to `x` (clamped to the window).
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x - self.x_min) / self.dx()).round();
        j.clamp(0.0, (self.points - 1) as f64) as usize
    }

    /// Lattice with `factor`·M points and the same spacing, centered on this
    /// window, together with the index at which this window starts.
    pub fn padded(&self, factor: usize) -> (SpatialLattice, usize) {
        let factor = factor.max(1);
        let extra = (factor - 1) * self.points;
        let offset = extra / 2;
        let dx = self.dx();
        let x_min = self.x_min - offset as f64 * dx;
        let points = factor * self.points;
        let lattice = SpatialLattice { x_min, x_max: x_min + points as f64 * dx, points };
        (lattice, offset)
    }
}

/// A complex field sampled on a lattice.
#[derive(Clone, PartialEq)]
pub struct GridFunction {
    lattice: SpatialLattice,
    values: Vec<Complex64>,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction").field("lattice", &self.lattice).field("len", &self.values.len()).finish()
    }
}

impl GridFunction {
    pub fn new(lattice: SpatialLattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.points() {
            return Err(Error::InvalidParameter {
                field: "values",
                reason: format!("length {} does not match lattice size {}", values.len(), lattice.points()),
            });
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: SpatialLattice) -> Self {
        Self { lattice, values: vec![Complex64::new(0.0, 0.0); lattice.points()] }
    }

    pub fn from_fn(lattice: SpatialLattice, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = (0..lattice.points()).map(|j| f(lattice.x(j))).collect();
        Self { lattice, values }
    }

    pub fn lattice(&self) -> &SpatialLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at the sample nearest to `x`.
    pub fn at(&self, x: f64) -> Complex64 {
        self.values[self.lattice.nearest_index(x)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// sup |self − other| over the shared lattice.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// (Σ |ψ|² dx)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.lattice.dx()).sqrt()
    }

    /// Embed into the padded lattice at `offset`, zeros elsewhere.
    pub fn embed(&self, padded: SpatialLattice, offset: usize) -> GridFunction {
        let mut out = GridFunction::zeros(padded);
        out.values[offset..offset + self.values.len()].copy_from_slice(&self.values);
        out
    }

    /// Restrict to `window`, which starts at index `offset` of this lattice.
    pub fn crop(&self, window: SpatialLattice, offset: usize) -> GridFunction {
        GridFunction { lattice: window, values: self.values[offset..offset + window.points()].to_vec() }
    }
}

/// G_n(x1, x0, a·n) for n = first…N sampled over x1; first is 1 for a full
/// stack and N for a final-only one.
#[derive(Debug, Clone)]
pub struct PropagatorStack {
    params: PhysicalParams,
    lattice: SpatialLattice,
    slices: Vec<GridFunction>,
    first: usize,
}

impl PropagatorStack {
    pub fn new(params: PhysicalParams, lattice: SpatialLattice, slices: Vec<GridFunction>) -> Result<Self> {
        if slices.len() != params.slices() {
            return Err(Error::InvalidParameter {
                field: "slices",
                reason: format!("expected {} slices, got {}", params.slices(), slices.len()),
            });
        }
        if slices.iter().any(|s| *s.lattice() != lattice) {
            return Err(Error::InvalidParameter { field: "slices", reason: "lattice mismatch".into() });
        }
        Ok(Self { params, lattice, slices, first: 1 })
    }

    /// A stack holding G_N only.
    pub fn final_only(params: PhysicalParams, lattice: SpatialLattice, last: GridFunction) -> Result<Self> {
        if *last.lattice() != lattice {
            return Err(Error::InvalidParameter { field: "slices", reason: "lattice mismatch".into() });
        }
        Ok(Self { first: params.slices(), params, lattice, slices: vec![last] })
    }

    /// Index of the first retained slice.
    pub fn first_slice(&self) -> usize {
        self.first
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn lattice(&self) -> &SpatialLattice {
        &self.lattice
    }

    pub fn slices(&self) -> &[GridFunction] {
        &self.slices
    }

    /// Slice n, 1-based; panics if n was not retained.
    pub fn slice(&self, n: usize) -> &GridFunction {
        &self.slices[n - self.first]
    }

    /// G_N, the full-time propagator.
    pub fn last(&self) -> &GridFunction {
        self.slices.last().expect("stack holds N >= 2 slices")
    }
}

/// c = (m/(2πiℏa))^{1/2}, principal root, so arg c = −π/4.
pub fn normalization_c(params: &PhysicalParams) -> Complex64 {
    let modulus = (params.mass() / (2.0 * PI * params.hbar() * params.lattice_spacing())).sqrt();
    Complex64::from_polar(modulus, -PI / 4.0)
}

/// Angular wavenumbers 2π f_j/(M dx) in standard DFT order.
pub fn fourier_wavenumbers(lattice: &SpatialLattice) -> Vec<f64> {
    let m = lattice.points();
    let scale = 2.0 * PI / (m as f64 * lattice.dx());
    (0..m)
        .map(|j| {
            let f = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
            scale * f
        })
        .collect()
}

/// e^{−iaℏk²/(2m)}: the Fourier image of c·e^{imq²/(2aℏ)}.
pub fn gaussian_kernel_fourier(params: &PhysicalParams, lattice: &SpatialLattice) -> GridFunction {
    let factor = params.lattice_spacing() * params.hbar() / (2.0 * params.mass());
    let values =
        fourier_wavenumbers(lattice).into_iter().map(|k| Complex64::from_polar(1.0, -factor * k * k)).collect();
    GridFunction { lattice: *lattice, values }
}

/// Forward/inverse transform pair of one size. The forward transform is the
/// plain DFT sum; the inverse carries the 1/M factor, so the pair realizes a
/// continuous convolution when combined with a Fourier-space kernel.
#[derive(Clone)]
pub struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    len: usize,
}

impl FftPair {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len), len }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.len as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    /// data ← IFFT(FFT(data)·kernel).
    pub fn apply_kernel(&self, data: &mut [Complex64], kernel: &[Complex64]) {
        self.forward(data);
        data.iter_mut().zip(kernel).for_each(|(z, k)| *z *= k);
        self.inverse(data);
    }
}
