//! Classical paths: shooting with the variational equation, critical curves
//! and caustics, path multiplicity, and the discrete map ξ of the lattice
//! action.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::PhysicalParams;
use crate::potentials::PotentialSpec;

const RELATIVE_TOLERANCE: f64 = 1e-10;
const ABSOLUTE_TOLERANCE: f64 = 1e-12;
const MAX_STEPS: usize = 1_000_000;
const BISECTION_TOLERANCE: f64 = 1e-8;
/// Initial-velocity bracket scanned by `multiplicity`.
pub const MULTIPLICITY_V0_RANGE: (f64, f64) = (-30.0, 30.0);
pub const MULTIPLICITY_STEP: f64 = 0.01;
const ORBIT_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub x: f64,
    pub v: f64,
    /// ∂x(T)/∂v0.
    pub dx_dv0: f64,
    pub energy_start: f64,
    pub energy_end: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CausticSet {
    /// (x0, v0) with ∂x(T)/∂v0 = 0.
    pub critical_points: Vec<(f64, f64)>,
    /// (x0, x(T)) for each critical point, in the same order.
    pub caustic_points: Vec<(f64, f64)>,
}

type State = [f64; 4];

/// (x, v, X, W) with X = ∂x/∂v0, W = ∂v/∂v0.
fn rhs(spec: &PotentialSpec, mass: f64, y: &State) -> State {
    let z = Complex64::new(y[0], 0.0);
    let force = -spec.gradient(z).re / mass;
    let stiffness = -spec.hessian(z).re / mass;
    [y[1], force, y[3], stiffness * y[2]]
}

fn combine(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Dormand-Prince 5(4) from t = 0 to `time`.
fn integrate(spec: &PotentialSpec, mass: f64, y0: State, time: f64) -> Result<State> {
    let f = |y: &State| rhs(spec, mass, y);
    let mut y = y0;
    let mut t = 0.0;
    let mut h = (time * 1e-3).max(1e-6);
    let mut k1 = f(&y);
    for _ in 0..MAX_STEPS {
        if t >= time {
            return Ok(y);
        }
        h = h.min(time - t);
        let k2 = f(&combine(&y, h, &[(1.0 / 5.0, &k1)]));
        let k3 = f(&combine(&y, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]));
        let k4 = f(&combine(&y, h, &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]));
        let k5 = f(&combine(
            &y,
            h,
            &[(19372.0 / 6561.0, &k1), (-25360.0 / 2187.0, &k2), (64448.0 / 6561.0, &k3), (-212.0 / 729.0, &k4)],
        ));
        let k6 = f(&combine(
            &y,
            h,
            &[
                (9017.0 / 3168.0, &k1),
                (-355.0 / 33.0, &k2),
                (46732.0 / 5247.0, &k3),
                (49.0 / 176.0, &k4),
                (-5103.0 / 18656.0, &k5),
            ],
        ));
        let next = combine(
            &y,
            h,
            &[
                (35.0 / 384.0, &k1),
                (500.0 / 1113.0, &k3),
                (125.0 / 192.0, &k4),
                (-2187.0 / 6784.0, &k5),
                (11.0 / 84.0, &k6),
            ],
        );
        let k7 = f(&next);
        // fifth minus fourth order weights
        let e = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
        let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut err: f64 = 0.0;
        for i in 0..4 {
            let est: f64 = h * ks.iter().zip(&e).map(|(k, c)| c * k[i]).sum::<f64>();
            let scale = ABSOLUTE_TOLERANCE + RELATIVE_TOLERANCE * y[i].abs().max(next[i].abs());
            err = err.max((est / scale).abs());
        }
        if !err.is_finite() {
            return Err(Error::StepFailure { t });
        }
        if err <= 1.0 {
            t += h;
            y = next;
            k1 = k7;
        }
        let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= grow;
        if h < 1e-14 * time.max(1.0) {
            return Err(Error::StepFailure { t });
        }
    }
    Err(Error::StepFailure { t })
}

fn energy(spec: &PotentialSpec, mass: f64, x: f64, v: f64) -> f64 {
    0.5 * mass * v * v + spec.value(Complex64::new(x, 0.0)).re
}

/// Integrates m ẍ = −V′(x) from (x0, v0) over `time`, with ∂x/∂v0 alongside.
pub fn classical_shoot(
    x0: f64,
    v0: f64,
    time: f64,
    spec: &PotentialSpec,
    params: &PhysicalParams,
) -> Result<Trajectory> {
    if !(x0.is_finite() && v0.is_finite() && time.is_finite() && time >= 0.0) {
        return Err(Error::InvalidParameter { field: "shoot", reason: "x0, v0 and T must be finite, T >= 0".into() });
    }
    let mass = params.mass();
    let y = integrate(spec, mass, [x0, v0, 0.0, 1.0], time)?;
    Ok(Trajectory {
        x: y[0],
        v: y[1],
        dx_dv0: y[2],
        energy_start: energy(spec, mass, x0, v0),
        energy_end: energy(spec, mass, y[0], y[1]),
    })
}

fn grid(range: (f64, f64), count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![range.0];
    }
    (0..count).map(|i| range.0 + (range.1 - range.0) * i as f64 / (count - 1) as f64).collect()
}

/// Bisection of a sign change of `f` on [lo, hi] to `BISECTION_TOLERANCE`.
fn bisect(mut lo: f64, mut hi: f64, mut f_lo: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots of `f` over `points`, bracketed by sign changes between neighbours.
fn roots(points: &[f64], f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let values = points.par_iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
    let brackets: Vec<usize> = (1..points.len())
        .filter(|&i| values[i] == 0.0 || (values[i - 1] != 0.0 && (values[i - 1] > 0.0) != (values[i] > 0.0)))
        .collect();
    brackets
        .into_par_iter()
        .map(|i| if values[i] == 0.0 { Ok(points[i]) } else { bisect(points[i - 1], points[i], values[i - 1], &f) })
        .collect()
}

/// Critical curve ∂x(T)/∂v0 = 0 over an (x0, v0) grid and its image under
/// the flow. Ranges are (start, end, count).
pub fn caustics(
    spec: &PotentialSpec,
    params: &PhysicalParams,
    time: f64,
    x0_range: (f64, f64, usize),
    v0_range: (f64, f64, usize),
) -> Result<CausticSet> {
    spec.validate()?;
    if v0_range.2 < 2 {
        return Err(Error::InvalidParameter { field: "v0_range", reason: "needs at least two points".into() });
    }
    let v0s = grid((v0_range.0, v0_range.1), v0_range.2);
    let per_x0 = grid((x0_range.0, x0_range.1), x0_range.2)
        .into_par_iter()
        .map(|x0| {
            let crit = roots(&v0s, |v0| Ok(classical_shoot(x0, v0, time, spec, params)?.dx_dv0))?;
            crit.into_iter()
                .map(|v0| Ok(((x0, v0), (x0, classical_shoot(x0, v0, time, spec, params)?.x))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut set = CausticSet::default();
    for (critical, caustic) in per_x0.into_iter().flatten() {
        set.critical_points.push(critical);
        set.caustic_points.push(caustic);
    }
    Ok(set)
}

/// Number of classical paths from x0 to x1 in time T: roots of x(T; v0) − x1
/// over v0 ∈ [−30, 30] scanned at 0.01.
pub fn multiplicity(x0: f64, x1: f64, time: f64, spec: &PotentialSpec, params: &PhysicalParams) -> Result<usize> {
    let (lo, hi) = MULTIPLICITY_V0_RANGE;
    let count = ((hi - lo) / MULTIPLICITY_STEP).round() as usize + 1;
    let v0s = grid((lo, hi), count);
    Ok(roots(&v0s, |v0| Ok(classical_shoot(x0, v0, time, spec, params)?.x - x1))?.len())
}

/// x1 = ξ(q1): iterate q_n = −q_{n−2} + 2q_{n−1} − (a²/m)V′(q_{n−1}) from
/// q_0 = x0 to q_N.
pub fn discretized_map_xi(q1: f64, params: &PhysicalParams, spec: &PotentialSpec) -> Result<f64> {
    let slices = params.slices();
    if slices < 2 {
        return Err(Error::InvalidParameter { field: "physical.N", reason: "must be >= 2".into() });
    }
    let a = params.lattice_spacing();
    let kick = a * a / params.mass();
    let (mut before, mut current) = (params.x0(), q1);
    for n in 2..=slices {
        let next = -before + 2.0 * current - kick * spec.gradient(Complex64::new(current, 0.0)).re;
        if next.is_nan() || next.abs() > ORBIT_LIMIT {
            return Err(Error::Overflow { slice: n });
        }
        before = current;
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize) -> PhysicalParams {
        PhysicalParams::new(1.0, 0.25, 10.0, n, -5.0).unwrap()
    }

    const RM: PotentialSpec = PotentialSpec::RosenMorse { v0: 1.0 };

    #[test]
    fn free_flight() {
        let t = classical_shoot(-5.0, 1.5, 10.0, &PotentialSpec::Free, &params(10)).unwrap();
        assert!((t.x - 10.0).abs() < 1e-9);
        assert!((t.dx_dv0 - 10.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_flow() {
        let omega = 0.7;
        let spec = PotentialSpec::Harmonic { omega };
        let t = classical_shoot(1.0, 0.5, 3.0, &spec, &params(10)).unwrap();
        let exact = (omega * 3.0).cos() + 0.5 / omega * (omega * 3.0).sin();
        assert!((t.x - exact).abs() < 1e-8);
        assert!((t.dx_dv0 - (omega * 3.0).sin() / omega).abs() < 1e-8);
    }

    #[test]
    fn energy_is_conserved() {
        let t = classical_shoot(-5.0, 2.0, 10.0, &RM, &params(10)).unwrap();
        assert!(((t.energy_end - t.energy_start) / t.energy_start).abs() < 1e-8);
    }

    #[test]
    fn variational_derivative_matches_finite_difference() {
        let p = params(10);
        let h = 1e-4;
        let x = |v0: f64| classical_shoot(-5.0, v0, 10.0, &RM, &p).unwrap().x;
        for v0 in [0.8, 1.41, 2.0] {
            let t = classical_shoot(-5.0, v0, 10.0, &RM, &p).unwrap();
            // fourth-order central difference
            let fd = (8.0 * (x(v0 + h) - x(v0 - h)) - (x(v0 + 2.0 * h) - x(v0 - 2.0 * h))) / (12.0 * h);
            assert!(((fd - t.dx_dv0) / t.dx_dv0).abs() < 1e-6, "v0={v0}: {fd} {}", t.dx_dv0);
        }
    }

    #[test]
    fn free_has_no_caustics() {
        let set = caustics(&PotentialSpec::Free, &params(10), 10.0, (-6.0, -4.0, 3), (-3.0, 3.0, 61)).unwrap();
        assert!(set.critical_points.is_empty() && set.caustic_points.is_empty());
    }

    #[test]
    fn caustic_points_are_flow_images() {
        let p = params(10);
        let set = caustics(&RM, &p, 10.0, (-5.0, -5.0, 1), (0.0, 4.0, 401)).unwrap();
        assert!(!set.critical_points.is_empty());
        for (&(x0, v0), &(x0b, x1)) in set.critical_points.iter().zip(&set.caustic_points) {
            assert_eq!(x0, x0b);
            let t = classical_shoot(x0, v0, 10.0, &RM, &p).unwrap();
            assert!((t.x - x1).abs() < 1e-9);
            assert!(t.dx_dv0.abs() < 1e-4);
        }
    }

    #[test]
    fn three_paths_inside_one_outside() {
        let p = params(10);
        assert_eq!(multiplicity(-5.0, -5.0, 10.0, &RM, &p).unwrap(), 3);
        assert_eq!(multiplicity(-5.0, 10.0, 10.0, &RM, &p).unwrap(), 1);
    }

    #[test]
    fn xi_map_forms() {
        let p = params(7);
        let a = p.lattice_spacing();
        let x = discretized_map_xi(-4.0, &p, &PotentialSpec::Free).unwrap();
        assert!((x - (-5.0 + 7.0 * 1.0)).abs() < 1e-12);
        let p2 = params(2);
        let a2 = p2.lattice_spacing();
        let q1 = -0.7;
        let expect = 5.0 + 2.0 * q1 - a2 * a2 * RM.gradient(Complex64::new(q1, 0.0)).re;
        assert!((discretized_map_xi(q1, &p2, &RM).unwrap() - expect).abs() < 1e-12);
        assert!(a > 0.0);
        let harsh = PotentialSpec::Harmonic { omega: 50.0 };
        assert!(matches!(discretized_map_xi(1.0, &params(200), &harsh), Err(Error::Overflow { .. })));
    }
}
